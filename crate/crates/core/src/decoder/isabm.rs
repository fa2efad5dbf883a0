//! Improved soft-aided bit-marking (iSABM) component decoding.
//!
//! Each component word is first decoded with plain BDD. A decoded output is
//! accepted only if none of the bits it changes is marked highly reliable
//! and none lies in a crossing component word already trusted as correctly
//! decoded. A rejected output (treated as a miscorrection) or a BDD failure
//! triggers one retry after flipping randomly chosen highly unreliable bits.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bch::{BchCode, BddOutcome};
use crate::error::{Error, Result};
use crate::marking::{MarkMap, MarkMode};
use crate::scc::{apply_delta, component_word};
use crate::word::{self, Word};

use super::{standard, DecoderStats, WindowState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsabmConfig {
    /// Number of plain-BDD groups `K`; the newest `L − K` blocks are marked.
    pub k: usize,
    pub mode: MarkMode,
    pub flip_seed: u64,
}

impl IsabmConfig {
    pub fn new(k: usize, mode: MarkMode, flip_seed: u64) -> Self {
        Self { k, mode, flip_seed }
    }

    /// Configuration with `L − K = marked` for a window of `window` blocks.
    pub fn with_marked_blocks(window: usize, marked: usize, mode: MarkMode, flip_seed: u64) -> Result<Self> {
        if marked < 2 || marked > window {
            return Err(Error::invalid(format!("L − K = {marked} must lie in 2..={window}")));
        }
        let cfg = Self::new(window - marked, mode, flip_seed);
        cfg.validate(window)?;
        Ok(cfg)
    }

    pub fn validate(&self, window: usize) -> Result<()> {
        if self.k + 2 > window {
            return Err(Error::invalid(format!("K = {} must not exceed L − 2 = {}", self.k, window as i64 - 2)));
        }
        self.mode.validate()
    }
}

/// Trust flags of the crossing words, split by the half of the component
/// word they cross: bit `k` of `older` covers word position `k`, bit `k`
/// of `newer` covers position `w + k`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CrossFlags {
    pub older: u128,
    pub newer: u128,
}

/// True when the change set `e` conflicts with neither an HRB nor a
/// trusted crossing word.
#[inline]
pub fn miscorrection_check(e: &Word, hrb: &Word, cross: CrossFlags, w: usize) -> bool {
    if !word::is_zero(&word::and(e, hrb)) {
        return false;
    }
    let (lo, hi) = word::split(e, w);
    lo & cross.older == 0 && hi & cross.newer == 0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentOutcome {
    /// A codeword passed the check; `delta` is its difference to the input.
    Accepted { codeword: Word, delta: Word, flipped: bool },
    /// BDD output rejected and no successful retry.
    Rejected { flips_tried: usize },
    /// BDD failed and no successful retry.
    Failed { flips_tried: usize },
    /// Fewer HUBs than the flip rule requires; input returned.
    InsufficientHubs { needed: usize, available: usize },
}

impl ComponentOutcome {
    /// The word left in place of the input `r`.
    pub fn output(&self, r: &Word) -> Word {
        match self {
            ComponentOutcome::Accepted { codeword, .. } => *codeword,
            _ => *r,
        }
    }

    pub fn is_accepted(&self) -> bool {
        matches!(self, ComponentOutcome::Accepted { .. })
    }
}

/// iSABM decoding of one component word `r` with HRB/HUB planes `hrb`,
/// `hub`. `rng` is only drawn from when bits are flipped.
pub fn isabm_component_decode(
    code: &BchCode,
    r: &Word,
    hrb: &Word,
    hub: &Word,
    cross: CrossFlags,
    w: usize,
    rng: impl FnOnce() -> ChaCha8Rng,
) -> ComponentOutcome {
    let (needed, failed) = match code.bdd_decode(r) {
        BddOutcome::Decoded { codeword, error, weight } => {
            if miscorrection_check(&error, hrb, cross, w) {
                return ComponentOutcome::Accepted { codeword, delta: error, flipped: false };
            }
            (code.d0() - weight as usize - code.t(), false)
        }
        BddOutcome::Failure => (1, true),
    };
    let hubs = *hub;
    let available = word::weight(&hubs) as usize;
    if available < needed {
        return ComponentOutcome::InsufficientHubs { needed, available };
    }
    let positions: Vec<usize> = word::ones(&hubs).collect();
    let mut rng = rng();
    let mut flips = word::ZERO;
    for i in rand::seq::index::sample(&mut rng, available, needed).iter() {
        word::flip(&mut flips, positions[i]);
    }
    let trial = word::xor(r, &flips);
    if let BddOutcome::Decoded { codeword, error, .. } = code.bdd_decode(&trial) {
        let delta = word::xor(&flips, &error);
        if miscorrection_check(&delta, hrb, cross, w) {
            return ComponentOutcome::Accepted { codeword, delta, flipped: true };
        }
    }
    if failed {
        ComponentOutcome::Failed { flips_tried: needed }
    } else {
        ComponentOutcome::Rejected { flips_tried: needed }
    }
}

/// Key for the flip generator of one component decode.
fn flip_key(seed: u64, window: u64, pair: u64, row: u64, attempt: u64) -> u64 {
    let mut h = seed;
    for v in [window, pair, row, attempt] {
        h = splitmix(h ^ splitmix(v));
    }
    h
}

#[inline]
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One iteration of iSABM-SCC decoding over the window: pairs touching the
/// `K` oldest blocks use plain BDD, the rest iSABM. Returns bits changed.
pub fn decode_window_isabm(ws: &mut WindowState, code: &BchCode, cfg: &IsabmConfig, iteration: u64) -> usize {
    iteration_with_stats(ws, code, cfg, cfg.k, iteration, &mut DecoderStats::default())
}

pub(crate) fn iteration_with_stats(
    ws: &mut WindowState,
    code: &BchCode,
    cfg: &IsabmConfig,
    k: usize,
    iteration: u64,
    stats: &mut DecoderStats,
) -> usize {
    let mut changed = 0;
    for q in (1..ws.len()).rev() {
        changed += if q > k {
            isabm_group(ws, code, cfg, q, iteration, stats)
        } else {
            standard::plain_group(ws, code, q, stats)
        };
    }
    changed
}

/// All rows of pair `q` are decided against the flags as they stood when
/// the group started; corrections and flag updates are applied afterwards
/// in row order.
fn isabm_group(
    ws: &mut WindowState,
    code: &BchCode,
    cfg: &IsabmConfig,
    q: usize,
    iteration: u64,
    stats: &mut DecoderStats,
) -> usize {
    let w = ws.side();
    let len = ws.len();
    let cross = CrossFlags {
        older: if q >= 2 { ws.flags[q - 1] } else { 0 },
        newer: if q + 1 < len { ws.flags[q + 1] } else { 0 },
    };
    let unmarked = if ws.marks[q - 1].is_none() || ws.marks[q].is_none() {
        Some(MarkMap::all_uncertain(w))
    } else {
        None
    };
    let older_marks = ws.marks[q - 1].as_ref().or(unmarked.as_ref()).expect("marks present");
    let newer_marks = ws.marks[q].as_ref().or(unmarked.as_ref()).expect("marks present");
    let window_index = ws.base;
    let pair_index = ws.base + q as u64;

    let mut decisions: Vec<(usize, Word)> = Vec::new();
    let mut trusted = 0u128;
    {
        let older = &ws.blocks[q - 1];
        let newer = &ws.blocks[q];
        for row in 0..w {
            let r = component_word(older, newer, row);
            let (hrb, hub) = MarkMap::word_planes(older_marks, newer_marks, row);
            let outcome = isabm_component_decode(code, &r, &hrb, &hub, cross, w, || {
                ChaCha8Rng::seed_from_u64(flip_key(cfg.flip_seed, window_index, pair_index, row as u64, iteration))
            });
            stats.bdd_calls += 1;
            match outcome {
                ComponentOutcome::Accepted { delta, flipped, .. } => {
                    stats.accepted += 1;
                    if flipped {
                        stats.bdd_calls += 1;
                        stats.flip_attempts += 1;
                        stats.flip_successes += 1;
                    }
                    trusted |= 1 << row;
                    if !word::is_zero(&delta) {
                        decisions.push((row, delta));
                    }
                }
                ComponentOutcome::Rejected { .. } | ComponentOutcome::Failed { .. } => {
                    stats.rejected += 1;
                    stats.bdd_calls += 1;
                    stats.flip_attempts += 1;
                }
                ComponentOutcome::InsufficientHubs { .. } => {
                    stats.insufficient_hubs += 1;
                }
            }
        }
    }

    let mut changed = 0;
    let mut clear_lo = 0u128;
    let mut clear_hi = 0u128;
    let (older, newer) = ws.pair_mut(q);
    for (row, delta) in &decisions {
        apply_delta(older, newer, *row, delta);
        let (lo, hi) = word::split(delta, w);
        clear_lo |= lo;
        clear_hi |= hi;
        changed += word::weight(delta) as usize;
    }
    ws.flags[q] = trusted;
    if q >= 2 {
        ws.flags[q - 1] &= !clear_lo;
    }
    if q + 1 < len {
        ws.flags[q + 1] &= !clear_hi;
    }
    stats.bits_changed += changed as u64;
    changed
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::{run_stream, DecoderKind};
    use crate::scc::{encode_rows, Block, CodeId, SccParams};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    const W: usize = 128;

    fn c1() -> BchCode {
        CodeId::C1.build().unwrap()
    }

    fn random_codeword(code: &BchCode, seed: u64) -> Word {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let info: Vec<bool> = (0..code.kc()).map(|_| rng.random()).collect();
        word::from_bits(&code.encode(&info).unwrap())
    }

    fn bits(positions: &[usize]) -> Word {
        let mut x = word::ZERO;
        for &p in positions {
            word::flip(&mut x, p);
        }
        x
    }

    fn no_rng() -> ChaCha8Rng {
        panic!("flip generator must not be used")
    }

    #[test]
    fn check_examples() {
        let none = CrossFlags::default();
        assert!(miscorrection_check(&word::ZERO, &bits(&[0, 1, 2]), none, W));
        // Changing an HRB.
        assert!(!miscorrection_check(&bits(&[5, 200]), &bits(&[200]), none, W));
        assert!(miscorrection_check(&bits(&[5, 200]), &bits(&[201]), none, W));
        // Changing a UB whose crossing word is trusted, in either half.
        let older = CrossFlags { older: 1 << 5, newer: 0 };
        assert!(!miscorrection_check(&bits(&[5]), &word::ZERO, older, W));
        assert!(miscorrection_check(&bits(&[6]), &word::ZERO, older, W));
        let newer = CrossFlags { older: 0, newer: 1 << 3 };
        assert!(!miscorrection_check(&bits(&[W + 3]), &word::ZERO, newer, W));
        assert!(miscorrection_check(&bits(&[3]), &word::ZERO, newer, W));
    }

    #[test]
    fn codeword_is_accepted_unchanged() {
        let code = c1();
        let c = random_codeword(&code, 1);
        let all = bits(&(0..256).collect::<Vec<_>>());
        let out = isabm_component_decode(&code, &c, &all, &word::ZERO, CrossFlags::default(), W, no_rng);
        assert_eq!(out, ComponentOutcome::Accepted { codeword: c, delta: word::ZERO, flipped: false });
        assert_eq!(out.output(&c), c);
    }

    #[test]
    fn flip_count_rule() {
        let code = c1();
        let c = random_codeword(&code, 2);
        // Two errors, one on an HRB: BDD is right but vetoed, f = 6 − 2 − 2.
        let r = word::xor(&c, &bits(&[10, 140]));
        let out = isabm_component_decode(&code, &r, &bits(&[140]), &bits(&[77]), CrossFlags::default(), W, no_rng);
        assert_eq!(out, ComponentOutcome::InsufficientHubs { needed: 2, available: 1 });
        assert_eq!(out.output(&r), r);
        // One error vetoed: f = 3.
        let r = word::xor(&c, &bits(&[140]));
        let out = isabm_component_decode(&code, &r, &bits(&[140]), &word::ZERO, CrossFlags::default(), W, no_rng);
        assert_eq!(out, ComponentOutcome::InsufficientHubs { needed: 3, available: 0 });
        // Three errors: BDD fails (d0 = 6), f = 1.
        let r = word::xor(&c, &bits(&[1, 2, 3]));
        let out = isabm_component_decode(&code, &r, &word::ZERO, &word::ZERO, CrossFlags::default(), W, no_rng);
        assert_eq!(out, ComponentOutcome::InsufficientHubs { needed: 1, available: 0 });
    }

    #[test]
    fn failure_with_all_errors_unreliable_is_repaired() {
        // t + 1 errors, all HUB, no other HUBs: any single flip hits an error.
        let code = c1();
        let c = random_codeword(&code, 3);
        let err = [17, 90, 201];
        let r = word::xor(&c, &bits(&err));
        let hub = bits(&err);
        let hrb = word::xor(&bits(&(0..256).collect::<Vec<_>>()), &hub);
        for seed in 0..200 {
            let out = isabm_component_decode(&code, &r, &hrb, &hub, CrossFlags::default(), W, || {
                ChaCha8Rng::seed_from_u64(seed)
            });
            assert_eq!(out.output(&r), c);
            assert!(matches!(out, ComponentOutcome::Accepted { flipped: true, .. }));
        }
    }

    #[test]
    fn repair_probability_matches_hub_fraction() {
        // t + 1 = 3 erroneous HUBs among 12 HUBs, all other bits HRB. The
        // transmitted word comes back iff the single flip hits an error.
        let code = c1();
        let c = random_codeword(&code, 4);
        let err = [5, 60, 180];
        let hub_pos = [5, 60, 180, 7, 33, 99, 130, 150, 170, 222, 240, 255];
        let r = word::xor(&c, &bits(&err));
        let hub = bits(&hub_pos);
        let hrb = word::xor(&bits(&(0..256).collect::<Vec<_>>()), &hub);
        let trials = 10_000;
        let mut repaired = 0;
        for seed in 0..trials {
            let mut flipped_error = false;
            let out = isabm_component_decode(&code, &r, &hrb, &hub, CrossFlags::default(), W, || {
                let rng = ChaCha8Rng::seed_from_u64(seed);
                let mut probe = rng.clone();
                let i = rand::seq::index::sample(&mut probe, hub_pos.len(), 1).index(0);
                flipped_error = err.contains(&word::ones(&hub).nth(i).unwrap());
                rng
            });
            let ok = out.output(&r) == c;
            assert_eq!(ok, flipped_error, "seed {seed}");
            repaired += ok as usize;
        }
        let p = err.len() as f64 / hub_pos.len() as f64;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((repaired as f64 / trials as f64 - p).abs() < 3.0 * sigma);
    }

    #[test]
    fn marked_block_count_bounds() {
        let mode = MarkMode::two(10.0, 2.5).unwrap();
        assert!(IsabmConfig::new(8, mode, 0).validate(9).is_err());
        assert!(IsabmConfig::new(7, mode, 0).validate(9).is_ok());
        assert!(IsabmConfig::with_marked_blocks(9, 1, mode, 0).is_err());
        assert_eq!(IsabmConfig::with_marked_blocks(9, 7, mode, 0).unwrap().k, 2);
        assert!(IsabmConfig::with_marked_blocks(9, 9, mode, 0).is_ok());
        assert!(IsabmConfig::with_marked_blocks(9, 10, mode, 0).is_err());
    }

    #[test]
    fn sparse_errors_decode_like_standard_without_marks() {
        // Few scattered errors: plain BDD never miscorrects, so unmarked
        // iSABM and the standard decoder agree and both recover the data.
        let p = SccParams::new(c1(), 9, 7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut prev = Block::zeros(W);
        let mut tx = Vec::new();
        let mut rx = Vec::new();
        for _ in 0..20 {
            let info: Vec<u128> = (0..W).map(|_| rng.random::<u128>() & p.row_info_mask()).collect();
            let b = encode_rows(&p, &prev, &info).unwrap();
            let mut y = b.clone();
            for _ in 0..4 {
                y.flip(rng.random_range(0..W), rng.random_range(0..W));
            }
            prev = b.clone();
            tx.push(b);
            rx.push(y);
        }
        let mode = MarkMode::two(10.0, 2.5).unwrap();
        let std = run_stream(&p, DecoderKind::Standard, rx.iter().cloned().map(|b| (b, None)).collect()).unwrap();
        let cfg = IsabmConfig::new(2, mode, 5);
        let unmarked = rx.iter().cloned().map(|b| (b, Some(MarkMap::all_uncertain(W)))).collect();
        let isabm = run_stream(&p, DecoderKind::Isabm(cfg), unmarked).unwrap();
        assert_eq!(std, tx);
        assert_eq!(isabm, tx);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn accepted_outputs_are_codewords(
            seed in any::<u64>(),
            errs in prop::collection::vec(0usize..256, 0..6),
            hrb_bits in prop::collection::vec(0usize..256, 0..40),
            hub_bits in prop::collection::vec(0usize..256, 0..20),
            older in any::<u128>(),
            newer in any::<u128>(),
        ) {
            let code = c1();
            let c = random_codeword(&code, seed);
            let r = word::xor(&c, &bits(&errs));
            let hrb = bits(&hrb_bits);
            let hub = word::and(&bits(&hub_bits), &word::xor(&hrb, &bits(&(0..256).collect::<Vec<_>>())));
            let cross = CrossFlags { older: older & older.rotate_left(7), newer: newer & newer.rotate_left(3) };
            let out = isabm_component_decode(&code, &r, &hrb, &hub, cross, W, || ChaCha8Rng::seed_from_u64(seed));
            if let ComponentOutcome::Accepted { codeword, delta, .. } = out {
                prop_assert!(code.is_codeword(&codeword));
                prop_assert_eq!(word::xor(&r, &delta), codeword);
                prop_assert!(miscorrection_check(&delta, &hrb, cross, W));
            } else {
                prop_assert_eq!(out.output(&r), r);
            }
        }
    }
}
