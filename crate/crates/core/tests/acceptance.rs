//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::Instant;

use staircase::air::{self, gn_reach, hd_air, snr_for_pre_fec_ber, GmiEstimator, LinkParams};
use staircase::bch::{BchCode, BddOutcome};
use staircase::marking::MarkMode;
use staircase::modem::{Constellation, NoiseVariance};
use staircase::scc::{CodeId, SccParams};
use staircase::sim::{
    self, grid_search, interpolate_log_linear, run_point, write_csv, BerRecord, DecoderSpec, ExperimentSpec,
    GridCell, Manifest, StopRule,
};
use staircase::word;

type Check = Result<String, String>;

fn isabm(k_marked: usize, d1: f64, d2: f64) -> DecoderSpec {
    DecoderSpec::Isabm { k: 9 - k_marked, mode: MarkMode::two(d1, d2).unwrap() }
}

fn spec(decoder: DecoderSpec, bits: u64, min_errors: u64) -> ExperimentSpec {
    let mut s = ExperimentSpec::new(CodeId::C1, 2, decoder);
    s.stop = StopRule::fixed_budget(min_errors, bits);
    s.master_seed = 2024;
    s
}

fn point(decoder: DecoderSpec, snr: f64, bits: u64) -> BerRecord {
    run_point(&spec(decoder, bits, 100), snr).expect("simulation runs")
}

fn within_factor(x: f64, target: f64, factor: f64) -> bool {
    x >= target / factor && x <= target * factor
}

fn table_one() -> Check {
    let expected = [
        (CodeId::C1, 256, 239, 0.8671875),
        (CodeId::C2, 256, 231, 0.8046875),
        (CodeId::C3, 256, 223, 0.7421875),
    ];
    for (id, nc, kc, rate) in expected {
        let p = SccParams::new(id.build().map_err(|e| e.to_string())?, 9, 7).map_err(|e| e.to_string())?;
        let got = (p.code().nc(), p.code().kc(), p.w(), p.rate());
        if got != (nc, kc, 128, rate) {
            return Err(format!("{id}: got {got:?}"));
        }
    }
    Ok("(256,239|231|223), w = 128, R = 0.8671875 / 0.8046875 / 0.7421875".into())
}

/// Every word within distance t of each codeword, by brute force.
fn exhaustive_agreement(code: &BchCode) -> Result<usize, String> {
    let n = code.nc();
    let k = code.kc();
    let t = code.t() as u32;
    let mut nearest: Vec<Option<u32>> = vec![None; 1 << n];
    let mut codewords = Vec::with_capacity(1 << k);
    for m in 0..1u32 << k {
        let info: Vec<bool> = (0..k).map(|i| (m >> i) & 1 == 1).collect();
        let c = code.encode(&info).map_err(|e| e.to_string())?;
        codewords.push(c.iter().enumerate().fold(0u32, |acc, (i, &b)| acc | (b as u32) << i));
    }
    for &c in &codewords {
        for r in 0..1u32 << n {
            if (r ^ c).count_ones() <= t {
                if nearest[r as usize].is_some() {
                    return Err("two codewords within radius t".into());
                }
                nearest[r as usize] = Some(c);
            }
        }
    }
    for r in 0..1u32 << n {
        let bits: Vec<bool> = (0..n).map(|i| (r >> i) & 1 == 1).collect();
        let got = match code.bdd_decode(&word::from_bits(&bits)) {
            BddOutcome::Decoded { codeword, .. } => {
                Some(word::to_bits(&codeword, n).iter().enumerate().fold(0u32, |a, (i, &b)| a | (b as u32) << i))
            }
            BddOutcome::Failure => None,
        };
        if got != nearest[r as usize] {
            return Err(format!("(ν=4, u={}, t={t}) word {r:#06x}: {got:?} vs {:?}", code.u(), nearest[r as usize]));
        }
    }
    Ok(1 << n)
}

fn bdd_oracle() -> Check {
    let mut total = 0;
    let mut names = Vec::new();
    for u in [0, 1] {
        for t in [1, 2] {
            let code = BchCode::new(4, u, t).map_err(|e| e.to_string())?;
            total += exhaustive_agreement(&code)?;
            names.push(format!("({},{})", code.nc(), code.kc()));
        }
    }
    Ok(format!("{} words over {} agree with radius-t search", total, names.join(" ")))
}

fn operating_point(snr: f64, d1: f64, d2: f64, bits: u64, target: f64, factor: f64) -> Check {
    let r = point(isabm(7, d1, d2), snr, bits);
    let line = format!(
        "SNR {snr} dB ({d1},{d2}): post-FEC {:.3e} (target {target:.2e} ×/÷{factor}), {} errors in {} bits",
        r.post_fec_ber, r.bit_errors, r.info_bits
    );
    if r.bit_errors >= 100 && within_factor(r.post_fec_ber, target, factor) {
        Ok(line)
    } else {
        Err(line)
    }
}

fn threshold_argmin() -> Check {
    let base = spec(isabm(7, 10.0, 2.5), 10_000_000, 100);
    let cells: Vec<GridCell> = [(8.0, 2.0), (10.0, 2.5), (12.0, 4.0), (10.0, 0.5), (14.0, 2.5)]
        .iter()
        .map(|&(delta1, delta2)| GridCell::Thresholds { delta1, delta2 })
        .collect();
    let table = grid_search(&base, 6.45, &cells).map_err(|e| e.to_string())?;
    let summary: Vec<String> = table
        .rows
        .iter()
        .map(|r| match r.cell {
            GridCell::Thresholds { delta1, delta2 } => format!("({delta1},{delta2}) {:.2e}", r.record.post_fec_ber),
            _ => unreachable!(),
        })
        .collect();
    let line = summary.join(", ");
    match table.argmin.map(|i| table.rows[i].cell) {
        Some(GridCell::Thresholds { delta1, delta2 }) if (delta1, delta2) == (10.0, 2.5) => Ok(line),
        _ => Err(line),
    }
}

fn marked_block_trend() -> Check {
    let snr = 6.6;
    let bers: Vec<(usize, BerRecord)> =
        [3, 5, 7, 8].iter().map(|&lk| (lk, point(isabm(lk, 10.0, 2.5), snr, 30_000_000))).collect();
    let line = bers
        .iter()
        .map(|(lk, r)| format!("L−K={lk} {:.2e} ({} err)", r.post_fec_ber, r.bit_errors))
        .collect::<Vec<_>>()
        .join(", ");
    let b: Vec<f64> = bers.iter().map(|(_, r)| r.post_fec_ber).collect();
    let enough = bers.iter().all(|(_, r)| r.bit_errors >= 50);
    if enough && b[0] >= b[1] && b[1] >= b[2] && b[3] > b[2] {
        Ok(line)
    } else {
        Err(line)
    }
}

/// Required SNR at BER 1e-4 from two bracketing points, with the points.
fn required_at(decoder: DecoderSpec, snrs: &[f64]) -> (Option<f64>, String) {
    let recs: Vec<BerRecord> = snrs.iter().map(|&s| point(decoder, s, 30_000_000)).collect();
    let pts: Vec<(f64, f64)> = recs.iter().map(|r| (r.snr_db, r.post_fec_ber)).collect();
    let desc = pts.iter().map(|(s, b)| format!("{s}:{b:.2e}")).collect::<Vec<_>>().join(" ");
    (interpolate_log_linear(&pts, 1e-4), desc)
}

fn gain_proxy(std_required: &mut Option<f64>) -> Check {
    let (std, std_pts) = required_at(DecoderSpec::Standard, &[7.2, 7.3]);
    let (isa, isa_pts) = required_at(isabm(7, 10.0, 2.5), &[6.5, 6.6]);
    *std_required = std;
    match (std, isa) {
        (Some(s), Some(i)) => {
            let gain = s - i;
            let line = format!("standard {s:.3} dB [{std_pts}], iSABM {i:.3} dB [{isa_pts}], gain {gain:.3} dB");
            if (0.4..=0.8).contains(&gain) {
                Ok(line)
            } else {
                Err(line)
            }
        }
        _ => Err(format!("1e-4 not bracketed: standard [{std_pts}], iSABM [{isa_pts}]")),
    }
}

fn air_curves() -> Check {
    let snrs: Vec<f64> = (0..=70).map(|i| -5.0 + 0.5 * i as f64).collect();
    for m in [1, 3] {
        let cons = Constellation::pam(m).unwrap();
        for variance in [NoiseVariance::HalfN0, NoiseVariance::FullN0] {
            let curve = air::air_curve(&cons, &snrs, variance, GmiEstimator::default()).map_err(|e| e.to_string())?;
            if let Some(p) = curve.points.iter().find(|p| p.i_gmi < p.i_hd) {
                return Err(format!("M={} GMI below HD at {} dB: {p:?}", cons.order(), p.snr_db));
            }
        }
        if hd_air(0.0, m).unwrap() != 4.0 * m as f64 || hd_air(0.5, m).unwrap() != 0.0 {
            return Err("hd_air limits".into());
        }
    }
    let rates = |m: usize| -> Vec<f64> {
        [CodeId::C3, CodeId::C2, CodeId::C1]
            .iter()
            .map(|&c| air::data_rate_gbps(m, air::scc_rate(c).unwrap()))
            .collect()
    };
    let eight = rates(3);
    let two = rates(1);
    let rounded = |v: &[f64]| v.iter().map(|x| x.round() as i64).collect::<Vec<_>>();
    // C2 at 8-PAM is 12·0.8046875·45 = 434.53 Gb/s.
    let line = format!("GMI ≥ HD on 2/8-PAM grids; 8-PAM {eight:.2?} Gb/s, 2-PAM {two:.2?} Gb/s");
    if rounded(&eight) == [401, 435, 468] && rounded(&two) == [134, 145, 156] {
        Ok(line)
    } else {
        Err(line)
    }
}

fn reach(std_required: Option<f64>) -> Check {
    let link = LinkParams::default();
    // Monotone in the required SNR.
    let mut prev = f64::INFINITY;
    for i in 0..400 {
        let s = 5.0 + 0.06 * i as f64;
        let r = gn_reach(&link, s).map_err(|e| e.to_string())?.reach_km;
        if r > prev {
            return Err(format!("reach increased with required SNR at {s} dB"));
        }
        prev = r;
    }
    let std2 = std_required.ok_or("no standard baseline")?;
    let two = Constellation::pam(1).unwrap();
    let eight = Constellation::pam(3).unwrap();
    let p = air::pre_fec_ber(&two, std2, NoiseVariance::FullN0).map_err(|e| e.to_string())?;
    let std8 = snr_for_pre_fec_ber(&eight, p, NoiseVariance::FullN0).map_err(|e| e.to_string())?;
    let increase = |base: f64, gain: f64| -> Result<(f64, f64, f64), String> {
        let a = gn_reach(&link, base).map_err(|e| e.to_string())?;
        let b = gn_reach(&link, base - gain).map_err(|e| e.to_string())?;
        Ok((a.reach_km, b.reach_km, 100.0 * (b.reach_km / a.reach_km - 1.0)))
    };
    let (a2, b2, inc2) = increase(std2, 0.68)?;
    let (a8, b8, inc8) = increase(std8, 0.89)?;
    let line = format!(
        "2-PAM {std2:.2} dB: {a2:.0} → {b2:.0} km ({inc2:+.1}%); 8-PAM {std8:.2} dB: {a8:.0} → {b8:.0} km ({inc8:+.1}%)"
    );
    if (inc2 - 17.0).abs() <= 5.0 && (inc8 - 22.0).abs() <= 5.0 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut s = spec(isabm(7, 10.0, 2.5), 2_000_000, 100);
    s.snr_db = vec![6.45, 6.55];
    s.shard_count = 3;
    s.chunk_blocks = 8;
    let mut m = Manifest::new();
    m.push_sweep(&s, &sim::sweep(&s, 1e-4).map_err(|e| e.to_string())?);
    let mut std = spec(DecoderSpec::Standard, 1_000_000, 100);
    std.snr_db = vec![7.1];
    m.push_sweep(&std, &sim::sweep(&std, 1e-4).map_err(|e| e.to_string())?);
    let path = dir.path().join("run.json");
    m.write(&path).map_err(|e| e.to_string())?;
    let mut first = Vec::new();
    write_csv(&mut first, &m.rows()).map_err(|e| e.to_string())?;
    let again = Manifest::read(&path).and_then(|m| m.rerun()).map_err(|e| e.to_string())?;
    let mut second = Vec::new();
    write_csv(&mut second, &again.rows()).map_err(|e| e.to_string())?;
    if first == second {
        Ok(format!("{} CSV bytes identical after rerun from manifest", first.len()))
    } else {
        Err("CSV differs after rerun".into())
    }
}

fn main() -> ExitCode {
    let mut std_required = None;
    let mut results: Vec<(u32, &str, Check, f64)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Check| {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        let (tag, msg) = match &r {
            Ok(m) => ("PASS", m),
            Err(m) => ("FAIL", m),
        };
        println!("[{tag}] {id:>2}. {name} ({secs:.1} s): {msg}");
        results.push((id, name, r, secs));
    };
    run(1, "code construction", &mut table_one);
    run(2, "BDD matches exhaustive decoding", &mut bdd_oracle);
    run(3, "iSABM at 6.45 dB", &mut || operating_point(6.45, 10.0, 2.5, 20_000_000, 4.5e-3, 2.0));
    run(4, "iSABM at 6.55 dB", &mut || operating_point(6.55, 10.5, 3.0, 50_000_000, 1.78e-4, 3.0));
    run(5, "threshold argmin", &mut threshold_argmin);
    run(6, "L−K trend", &mut marked_block_trend);
    run(7, "gain at 1e-4", &mut || gain_proxy(&mut std_required));
    run(8, "AIR curves and data rates", &mut air_curves);
    run(9, "reach increase", &mut || reach(std_required));
    run(10, "manifest determinism", &mut determinism);
    let failed = results.iter().filter(|r| r.2.is_err()).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
