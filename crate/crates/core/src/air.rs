//! Achievable information rates, required-SNR inversion, 4D data rates and
//! Gaussian-noise-model optical reach.
//!
//! Rates are in bits per 4D symbol (two polarisations, I and Q), each real
//! dimension carrying one PAM symbol.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::modem::{n0_from_snr_db, q_function, Constellation, NoiseVariance};
use crate::scc::CodeId;

pub const DIMENSIONS: f64 = 4.0;
pub const SYMBOL_RATE_GBAUD: f64 = 45.0;
pub const DEFAULT_GH_NODES: usize = 96;
pub const DEFAULT_SNR_BRACKET: (f64, f64) = (-10.0, 40.0);

fn noise_sigma(snr_db: f64, variance: NoiseVariance) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(Error::invalid(format!("SNR {snr_db} dB is not finite")));
    }
    Ok(variance.variance(n0_from_snr_db(snr_db)).sqrt())
}

/// Decision thresholds of the hard demapper between consecutive points.
fn boundaries(cons: &Constellation) -> Vec<f64> {
    cons.points().windows(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

/// Exact average bit error probability of the Gray-labelled hard demapper,
/// summed over decision regions and averaged over points and bit positions.
pub fn pre_fec_ber(cons: &Constellation, snr_db: f64, variance: NoiseVariance) -> Result<f64> {
    let sigma = noise_sigma(snr_db, variance)?;
    let b = boundaries(cons);
    let order = cons.order();
    let m = cons.bits_per_symbol();
    // P(y falls in region j | point i).
    let region = |i: usize, j: usize| -> f64 {
        let s = cons.points()[i];
        let upper = if j + 1 < order { q_function((b[j] - s) / sigma) } else { 0.0 };
        let lower = if j > 0 { q_function((b[j - 1] - s) / sigma) } else { 1.0 };
        lower - upper
    };
    let mut total = 0.0;
    for i in 0..order {
        for j in 0..order {
            if i == j {
                continue;
            }
            let flips = (cons.label(i) ^ cons.label(j)).count_ones() as f64;
            total += flips * region(i, j);
        }
    }
    Ok(total / (order * m) as f64)
}

fn h2(p: f64) -> f64 {
    let t = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    t(p) + t(1.0 - p)
}

/// HD-FEC AIR `4m(1 − h2(p))` in bits per 4D symbol.
pub fn hd_air(p: f64, m: usize) -> Result<f64> {
    if !(0.0..=0.5).contains(&p) {
        return Err(Error::invalid(format!("pre-FEC BER {p} outside [0, 1/2]")));
    }
    Ok(DIMENSIONS * m as f64 * (1.0 - h2(p)))
}

/// Nodes and weights of `n`-point Gauss–Hermite quadrature for
/// `∫ f(x) exp(−x²) dx`, by Newton iteration on the normalised Hermite
/// recurrence.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::invalid("quadrature needs at least one node"));
    }
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    let mut z = 0.0;
    for i in 0..n.div_ceil(2) {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.855_75 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..200 {
            let (mut p1, mut p2) = (PIM4, 0.0);
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-14 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Bracket(format!("Hermite root {i} of {n} did not converge")));
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    Ok((x, w))
}

/// `log2(1 + exp(x))` without overflow.
#[inline]
fn softplus2(x: f64) -> f64 {
    (x.max(0.0) + (-x.abs()).exp().ln_1p()) / std::f64::consts::LN_2
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GmiEstimator {
    GaussHermite { nodes: usize },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Default for GmiEstimator {
    fn default() -> Self {
        GmiEstimator::GaussHermite { nodes: DEFAULT_GH_NODES }
    }
}

/// Bit-metric GMI in bits per 4D symbol, from LLRs that are exact for the
/// channel's true noise variance.
pub fn gmi(cons: &Constellation, snr_db: f64, variance: NoiseVariance, est: GmiEstimator) -> Result<f64> {
    let sigma = noise_sigma(snr_db, variance)?;
    let m = cons.bits_per_symbol();
    let order = cons.order();
    let llr_n0 = 2.0 * sigma * sigma;
    let mut llr = vec![0.0; m];
    // Σ_k log2(1 + exp(−(2b − 1) λ_k)) for point i received at y.
    let mut loss = |i: usize, y: f64| -> f64 {
        cons.llr_into(y, llr_n0, &mut llr);
        (0..m)
            .map(|k| {
                let sign = if cons.label_bit(i, k) { 1.0 } else { -1.0 };
                softplus2(-sign * llr[k])
            })
            .sum::<f64>()
    };
    let expected_loss = match est {
        GmiEstimator::GaussHermite { nodes } => {
            if nodes < 64 {
                return Err(Error::invalid(format!("{nodes} Gauss–Hermite nodes; at least 64 required")));
            }
            let (x, w) = gauss_hermite(nodes)?;
            let mut acc = 0.0;
            for i in 0..order {
                let s = cons.points()[i];
                for (xj, wj) in x.iter().zip(&w) {
                    acc += wj * loss(i, s + std::f64::consts::SQRT_2 * sigma * xj);
                }
            }
            acc / (order as f64 * std::f64::consts::PI.sqrt())
        }
        GmiEstimator::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::invalid("Monte Carlo GMI needs samples"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut acc = 0.0;
            for _ in 0..samples {
                let i = rng.random_range(0..order);
                let z: f64 = StandardNormal.sample(&mut rng);
                acc += loss(i, cons.points()[i] + sigma * z);
            }
            acc / samples as f64
        }
    };
    Ok((DIMENSIONS * (m as f64 - expected_loss)).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirPoint {
    pub snr_db: f64,
    pub p: f64,
    pub i_hd: f64,
    pub i_gmi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AirCurve {
    pub pam_order: usize,
    pub variance: NoiseVariance,
    pub estimator: GmiEstimator,
    pub points: Vec<AirPoint>,
}

pub fn air_point(cons: &Constellation, snr_db: f64, variance: NoiseVariance, est: GmiEstimator) -> Result<AirPoint> {
    let p = pre_fec_ber(cons, snr_db, variance)?;
    Ok(AirPoint {
        snr_db,
        p,
        i_hd: hd_air(p.min(0.5), cons.bits_per_symbol())?,
        i_gmi: gmi(cons, snr_db, variance, est)?,
    })
}

pub fn air_curve(cons: &Constellation, snrs: &[f64], variance: NoiseVariance, est: GmiEstimator) -> Result<AirCurve> {
    let points = snrs.iter().map(|&s| air_point(cons, s, variance, est)).collect::<Result<Vec<_>>>()?;
    Ok(AirCurve { pam_order: cons.order(), variance, estimator: est, points })
}

/// Smallest SNR in `bracket` at which the increasing `curve` reaches
/// `target`, by bisection to within 1e-6 bits.
pub fn required_snr(target: f64, bracket: (f64, f64), curve: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(Error::Bracket(format!("empty bracket [{lo}, {hi}]")));
    }
    let f_lo = curve(lo)?;
    if target <= f_lo {
        return Ok(lo);
    }
    let f_hi = curve(hi)?;
    if target > f_hi {
        return Err(Error::Bracket(format!("target {target} above {f_hi} reached at {hi} dB")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let f = curve(mid)?;
        if (f - target).abs() < 1e-6 && hi - lo < 1e-6 {
            return Ok(mid);
        }
        if f < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    if (curve(mid)? - target).abs() < 1e-6 {
        Ok(mid)
    } else {
        Err(Error::Bracket(format!("no SNR meets {target} bits to 1e-6")))
    }
}

/// SNR where the HD-FEC AIR equals `4mR`.
pub fn required_snr_hd(cons: &Constellation, rate: f64, variance: NoiseVariance) -> Result<f64> {
    let m = cons.bits_per_symbol();
    required_snr(DIMENSIONS * m as f64 * rate, DEFAULT_SNR_BRACKET, |s| hd_air(pre_fec_ber(cons, s, variance)?.min(0.5), m))
}

/// SNR where the pre-FEC BER falls to `p`.
pub fn snr_for_pre_fec_ber(cons: &Constellation, p: f64, variance: NoiseVariance) -> Result<f64> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::invalid(format!("target BER {p} outside (0, 1/2)")));
    }
    // −log10 p increases with SNR.
    required_snr(-p.log10(), DEFAULT_SNR_BRACKET, |s| Ok(-pre_fec_ber(cons, s, variance)?.log10()))
}

/// Net data rate `4·m·R·R_s` in Gb/s.
pub fn data_rate_gbps(m: usize, rate: f64) -> f64 {
    DIMENSIONS * m as f64 * rate * SYMBOL_RATE_GBAUD
}

/// Staircase code rate `R = 2kc/nc − 1`.
pub fn scc_rate(code: CodeId) -> Result<f64> {
    let c = code.build()?;
    Ok((2 * c.kc()) as f64 / c.nc() as f64 - 1.0)
}

/// `I_SCC = 4mR` for a code and PAM order.
pub fn scc_rate_bits(code: CodeId, m: usize) -> Result<f64> {
    Ok(DIMENSIONS * m as f64 * scc_rate(code)?)
}

const PLANCK: f64 = 6.626_070_15e-34;
const LIGHT_SPEED: f64 = 299_792_458.0;

/// Multi-span WDM link; lengths in km, powers in dBm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    pub span_km: f64,
    pub loss_db_per_km: f64,
    pub dispersion_ps_nm_km: f64,
    pub gamma_per_w_km: f64,
    pub noise_figure_db: f64,
    pub symbol_rate_gbaud: f64,
    pub channels: usize,
    pub spacing_ghz: f64,
    pub wavelength_nm: f64,
    /// Launch power search range per channel.
    pub launch_dbm_range: (f64, f64),
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            span_km: 80.0,
            loss_db_per_km: 0.2,
            dispersion_ps_nm_km: 17.0,
            gamma_per_w_km: 1.2,
            noise_figure_db: 5.0,
            symbol_rate_gbaud: 45.0,
            channels: 11,
            spacing_ghz: 50.0,
            wavelength_nm: 1550.0,
            launch_dbm_range: (-10.0, 10.0),
        }
    }
}

fn dbm_to_w(dbm: f64) -> f64 {
    1e-3 * 10f64.powf(dbm / 10.0)
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        let vals = [
            self.span_km,
            self.loss_db_per_km,
            self.dispersion_ps_nm_km,
            self.gamma_per_w_km,
            self.noise_figure_db,
            self.symbol_rate_gbaud,
            self.spacing_ghz,
            self.wavelength_nm,
        ];
        if vals.iter().any(|v| !(v.is_finite() && *v > 0.0)) || self.channels == 0 {
            return Err(Error::invalid("link parameters must be positive"));
        }
        if !(self.launch_dbm_range.0 < self.launch_dbm_range.1) {
            return Err(Error::invalid("empty launch power range"));
        }
        Ok(())
    }

    fn alpha_per_m(&self) -> f64 {
        self.loss_db_per_km / (10.0 * std::f64::consts::E.log10()) / 1e3
    }

    /// ASE power per span in the symbol-rate bandwidth, in W.
    pub fn ase_per_span_w(&self) -> f64 {
        let gain = 10f64.powf(self.loss_db_per_km * self.span_km / 10.0);
        let nf = 10f64.powf(self.noise_figure_db / 10.0);
        let freq = LIGHT_SPEED / (self.wavelength_nm * 1e-9);
        nf * PLANCK * freq * (gain - 1.0) * self.symbol_rate_gbaud * 1e9
    }

    /// Incoherent-GN NLI coefficient per span: `P_NLI = η P³`, in W⁻².
    pub fn nli_coefficient(&self) -> f64 {
        let alpha = self.alpha_per_m();
        let l = self.span_km * 1e3;
        let l_eff = (1.0 - (-alpha * l).exp()) / alpha;
        let l_eff_a = 1.0 / alpha;
        let lambda = self.wavelength_nm * 1e-9;
        let d = self.dispersion_ps_nm_km * 1e-6; // s/m²
        let beta2 = d * lambda * lambda / (2.0 * std::f64::consts::PI * LIGHT_SPEED);
        let gamma = self.gamma_per_w_km * 1e-3;
        let rs = self.symbol_rate_gbaud * 1e9;
        let df = self.spacing_ghz * 1e9;
        let pi = std::f64::consts::PI;
        let arg = pi * pi / 2.0 * beta2 * l_eff_a * rs * rs * (self.channels as f64).powf(2.0 * rs / df);
        8.0 / 27.0 * gamma * gamma * l_eff * l_eff * arg.asinh() / (pi * beta2 * l_eff_a * rs * rs)
    }

    /// Linear SNR after `spans` spans at launch power `dbm` per channel.
    pub fn snr(&self, spans: f64, dbm: f64) -> f64 {
        let p = dbm_to_w(dbm);
        p / (spans * (self.ase_per_span_w() + self.nli_coefficient() * p * p * p))
    }

    /// Launch power (dBm) maximising the SNR, by golden-section search.
    /// The optimum does not depend on the span count.
    pub fn optimal_launch_dbm(&self) -> f64 {
        let (mut a, mut b) = self.launch_dbm_range;
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut c = b - g * (b - a);
        let mut d = a + g * (b - a);
        while b - a > 1e-9 {
            if self.snr(1.0, c) > self.snr(1.0, d) {
                b = d;
            } else {
                a = c;
            }
            c = b - g * (b - a);
            d = a + g * (b - a);
        }
        0.5 * (a + b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReachResult {
    pub required_snr_db: f64,
    pub optimal_launch_dbm: f64,
    pub max_spans: u32,
    pub reach_km: f64,
    /// Reach with a fractional span count, for comparison with reach
    /// differences that are not whole spans.
    pub reach_km_continuous: f64,
    pub data_rate_gbps: Option<f64>,
}

impl ReachResult {
    pub fn with_rate(mut self, m: usize, rate: f64) -> Self {
        self.data_rate_gbps = Some(data_rate_gbps(m, rate));
        self
    }
}

/// Largest whole number of spans whose optimum-power SNR still meets
/// `required_snr_db`.
pub fn gn_reach(link: &LinkParams, required_snr_db: f64) -> Result<ReachResult> {
    link.validate()?;
    if !required_snr_db.is_finite() {
        return Err(Error::invalid(format!("required SNR {required_snr_db} dB is not finite")));
    }
    let p_opt = link.optimal_launch_dbm();
    let snr_one = link.snr(1.0, p_opt);
    let required = 10f64.powf(required_snr_db / 10.0);
    if snr_one < required {
        return Err(Error::Unreachable(format!(
            "required SNR {required_snr_db:.3} dB exceeds the single-span SNR {:.3} dB",
            10.0 * snr_one.log10()
        )));
    }
    // SNR is exactly inverse in the span count at fixed power.
    let continuous = snr_one / required;
    let mut spans = continuous.floor() as u32;
    while link.snr(f64::from(spans + 1), p_opt) >= required {
        spans += 1;
    }
    while spans > 1 && link.snr(f64::from(spans), p_opt) < required {
        spans -= 1;
    }
    Ok(ReachResult {
        required_snr_db,
        optimal_launch_dbm: p_opt,
        max_spans: spans,
        reach_km: f64::from(spans) * link.span_km,
        reach_km_continuous: continuous * link.span_km,
        data_rate_gbps: None,
    })
}

pub fn write_air_csv<W: Write>(out: W, curve: &AirCurve) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["snr_db", "p", "I_HD", "I_GMI"])?;
    for p in &curve.points {
        w.serialize((p.snr_db, p.p, p.i_hd, p.i_gmi))?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReachRow {
    pub code: CodeId,
    #[serde(rename = "M")]
    pub pam_order: usize,
    pub decoder: String,
    pub required_snr_db: f64,
    pub reach_km: f64,
    pub rate_gbps: f64,
}

pub fn write_reach_csv<W: Write>(out: W, rows: &[ReachRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
