//! Reliability marking of hard-decided bits from `|λ|`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scc::low_mask;
use crate::word::{self, Word};

/// Threshold rule used to classify bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MarkMode {
    /// HRB if `|λ| ≥ δ1`, UB if `δ2 ≤ |λ| < δ1`, HUB if `|λ| < δ2`.
    TwoThreshold { delta1: f64, delta2: f64 },
    /// HRB if `|λ| ≥ δ3`, HUB otherwise.
    OneThreshold { delta3: f64 },
}

impl MarkMode {
    pub fn two(delta1: f64, delta2: f64) -> Result<Self> {
        let m = MarkMode::TwoThreshold { delta1, delta2 };
        m.validate()?;
        Ok(m)
    }

    pub fn one(delta3: f64) -> Result<Self> {
        let m = MarkMode::OneThreshold { delta3 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MarkMode::TwoThreshold { delta1, delta2 } => {
                if delta1.is_nan() || delta2.is_nan() || !(delta2 >= 0.0) || delta1 < delta2 {
                    return Err(Error::invalid(format!(
                        "thresholds must satisfy delta1 ≥ delta2 ≥ 0, got ({delta1}, {delta2})"
                    )));
                }
            }
            MarkMode::OneThreshold { delta3 } => {
                if !(delta3 >= 0.0) {
                    return Err(Error::invalid(format!("delta3 must be non-negative, got {delta3}")));
                }
            }
        }
        Ok(())
    }

    /// `(δ_HRB, δ_HUB)`: a bit is HRB iff `|λ| ≥ δ_HRB`, HUB iff `|λ| < δ_HUB`.
    #[inline]
    fn bounds(&self) -> (f64, f64) {
        match *self {
            MarkMode::TwoThreshold { delta1, delta2 } => (delta1, delta2),
            MarkMode::OneThreshold { delta3 } => (delta3, delta3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mark {
    /// Highly reliable bit.
    Hrb,
    /// Uncertain bit.
    Ub,
    /// Highly unreliable bit.
    Hub,
}

#[inline]
pub fn mark(abs_llr: f64, mode: &MarkMode) -> Mark {
    let (hrb, hub) = mode.bounds();
    if abs_llr >= hrb {
        Mark::Hrb
    } else if abs_llr < hub {
        Mark::Hub
    } else {
        Mark::Ub
    }
}

/// Marks of one `w × w` block: two bits per position (an HRB plane and a
/// HUB plane), each stored in both orientations. Never modified after
/// construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkMap {
    w: usize,
    hrb_rows: Vec<u128>,
    hrb_cols: Vec<u128>,
    hub_rows: Vec<u128>,
    hub_cols: Vec<u128>,
}

impl MarkMap {
    /// Every position HRB (used for the known all-zero `B_0`).
    pub fn all_reliable(w: usize) -> Self {
        let full = low_mask(w);
        Self { w, hrb_rows: vec![full; w], hrb_cols: vec![full; w], hub_rows: vec![0; w], hub_cols: vec![0; w] }
    }

    /// Every position UB.
    pub fn all_uncertain(w: usize) -> Self {
        Self { w, hrb_rows: vec![0; w], hrb_cols: vec![0; w], hub_rows: vec![0; w], hub_cols: vec![0; w] }
    }

    pub fn side(&self) -> usize {
        self.w
    }

    pub fn get(&self, r: usize, c: usize) -> Mark {
        if (self.hrb_rows[r] >> c) & 1 == 1 {
            Mark::Hrb
        } else if (self.hub_rows[r] >> c) & 1 == 1 {
            Mark::Hub
        } else {
            Mark::Ub
        }
    }

    /// Counts of (HRB, UB, HUB).
    pub fn counts(&self) -> (usize, usize, usize) {
        let hrb: usize = self.hrb_rows.iter().map(|r| r.count_ones() as usize).sum();
        let hub: usize = self.hub_rows.iter().map(|r| r.count_ones() as usize).sum();
        (hrb, self.w * self.w - hrb - hub, hub)
    }

    /// HRB and HUB planes of the component word `row` of `(older, newer)`.
    #[inline]
    pub(crate) fn word_planes(older: &MarkMap, newer: &MarkMap, row: usize) -> (Word, Word) {
        let w = older.w;
        (
            word::concat(older.hrb_cols[row], newer.hrb_rows[row], w),
            word::concat(older.hub_cols[row], newer.hub_rows[row], w),
        )
    }
}

/// Marks a block from its `w²` LLR magnitudes in row-major order.
pub fn mark_block(abs_llrs: &[f64], w: usize, mode: &MarkMode) -> Result<MarkMap> {
    if !(1..=128).contains(&w) {
        return Err(Error::invalid(format!("block side {w} out of range 1..=128")));
    }
    Error::check_len(w * w, abs_llrs.len())?;
    mode.validate()?;
    let (hrb_th, hub_th) = mode.bounds();
    let mut map = MarkMap::all_uncertain(w);
    for (r, chunk) in abs_llrs.chunks(w).enumerate() {
        for (c, &a) in chunk.iter().enumerate() {
            if a >= hrb_th {
                map.hrb_rows[r] |= 1 << c;
                map.hrb_cols[c] |= 1 << r;
            } else if a < hub_th {
                map.hub_rows[r] |= 1 << c;
                map.hub_cols[c] |= 1 << r;
            }
        }
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::{n0_from_snr_db, q_function, AwgnChannel, ChannelConfig};
    use proptest::prelude::*;

    #[test]
    fn boundaries() {
        let m = MarkMode::two(10.0, 2.5).unwrap();
        assert_eq!(mark(10.0, &m), Mark::Hrb);
        assert_eq!(mark(9.999, &m), Mark::Ub);
        assert_eq!(mark(2.5, &m), Mark::Ub);
        assert_eq!(mark(2.49, &m), Mark::Hub);
        let one = MarkMode::one(9.5).unwrap();
        assert_eq!(mark(9.4, &one), Mark::Hub);
        assert_eq!(mark(9.5, &one), Mark::Hrb);
    }

    #[test]
    fn invalid_modes() {
        assert!(MarkMode::two(2.0, 2.5).is_err());
        assert!(MarkMode::two(2.0, -0.1).is_err());
        assert!(MarkMode::two(f64::NAN, 1.0).is_err());
        assert!(MarkMode::one(-1.0).is_err());
        assert!(MarkMode::two(f64::INFINITY, 0.0).is_ok());
    }

    #[test]
    fn block_extremes() {
        let m = MarkMode::two(10.0, 2.5).unwrap();
        let zeros = mark_block(&[0.0; 64], 8, &m).unwrap();
        assert_eq!(zeros.counts(), (0, 0, 64));
        let big = mark_block(&[1e9; 64], 8, &m).unwrap();
        assert_eq!(big, MarkMap::all_reliable(8));
        assert!(mark_block(&[0.0; 63], 8, &m).is_err());
    }

    #[test]
    fn hub_fraction_matches_gaussian_integral() {
        // 2-PAM, s = +1: λ = 4y/N0 with y ~ N(1, N0/2). P(|λ| < δ) by Simpson
        // integration of the Gaussian density over |y| < δ N0 / 4.
        let snr = 6.45;
        let n0 = n0_from_snr_db(snr);
        let delta2 = 2.5;
        let a = delta2 * n0 / 4.0;
        let sigma = (n0 / 2.0).sqrt();
        let pdf = |y: f64| (-(y - 1.0).powi(2) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        let steps = 2000;
        let h = 2.0 * a / steps as f64;
        let mut s = pdf(-a) + pdf(a);
        for i in 1..steps {
            s += pdf(-a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let expected = s * h / 3.0;
        // Sanity on the oracle itself.
        let closed = q_function((1.0 - a) / sigma) - q_function((1.0 + a) / sigma);
        assert!((expected - closed).abs() < 1e-9);

        let mut ch = AwgnChannel::new(ChannelConfig::new(snr, 21)).unwrap();
        let y = ch.transmit(&vec![1.0; 1 << 20]);
        let llr: Vec<f64> = y.iter().map(|&v| (4.0 * v / n0).abs()).collect();
        let mut hub = 0usize;
        for chunk in llr.chunks(128 * 128) {
            hub += mark_block(chunk, 128, &MarkMode::two(10.0, delta2).unwrap()).unwrap().counts().2;
        }
        let frac = hub as f64 / llr.len() as f64;
        assert!((frac / expected - 1.0).abs() < 0.01, "{frac} vs {expected}");
    }

    #[test]
    fn hrb_fraction_grows_with_snr() {
        let mode = MarkMode::two(10.0, 2.5).unwrap();
        let frac = |snr: f64| {
            let mut ch = AwgnChannel::new(ChannelConfig::new(snr, 8)).unwrap();
            let n0 = ch.n0();
            let y = ch.transmit(&vec![1.0; 128 * 128 * 8]);
            let llr: Vec<f64> = y.iter().map(|&v| (4.0 * v / n0).abs()).collect();
            llr.chunks(128 * 128).map(|c| mark_block(c, 128, &mode).unwrap().counts().0).sum::<usize>()
        };
        assert!(frac(6.65) > frac(6.45));
    }

    proptest! {
        #[test]
        fn monotone_in_thresholds(a in 0.0f64..30.0, d1 in 0.0f64..20.0, d2 in 0.0f64..20.0, bump in 0.0f64..5.0) {
            let (hi, lo) = if d1 >= d2 { (d1, d2) } else { (d2, d1) };
            let base = mark(a, &MarkMode::TwoThreshold { delta1: hi, delta2: lo });
            // Raising δ2 (within δ1) never turns a HUB into something else.
            let lo2 = (lo + bump).min(hi);
            let raised2 = mark(a, &MarkMode::TwoThreshold { delta1: hi, delta2: lo2 });
            if base == Mark::Hub { prop_assert_eq!(raised2, Mark::Hub); }
            // Raising δ1 never creates an HRB.
            let raised1 = mark(a, &MarkMode::TwoThreshold { delta1: hi + bump, delta2: lo });
            if raised1 == Mark::Hrb { prop_assert_eq!(base, Mark::Hrb); }
            // One-threshold never yields UB.
            prop_assert_ne!(mark(a, &MarkMode::OneThreshold { delta3: hi }), Mark::Ub);
        }
    }
}
