use crate::bch::{BchCode, BddOutcome};
use crate::scc::{apply_delta, component_word};
use crate::word;

use super::{DecoderStats, WindowState};

/// One iteration of plain BDD over every pair of the window, newest first.
/// Returns the number of bits changed.
pub fn decode_iteration(ws: &mut WindowState, code: &BchCode) -> usize {
    iteration_with_stats(ws, code, &mut DecoderStats::default())
}

pub(crate) fn iteration_with_stats(ws: &mut WindowState, code: &BchCode, stats: &mut DecoderStats) -> usize {
    let mut changed = 0;
    for q in (1..ws.len()).rev() {
        changed += plain_group(ws, code, q, stats);
    }
    changed
}

/// Plain BDD on all rows of pair `q`, accepting every decoded word.
///
/// Rows of one pair touch disjoint bits, so applying each correction
/// immediately is equivalent to applying the whole group at the end. Any
/// change clears the trust flags of the crossing words in pairs `q ± 1`.
pub(crate) fn plain_group(ws: &mut WindowState, code: &BchCode, q: usize, stats: &mut DecoderStats) -> usize {
    let w = ws.side();
    let len = ws.len();
    let mut changed = 0;
    let mut clear_lo = 0u128;
    let mut clear_hi = 0u128;
    let (older, newer) = ws.pair_mut(q);
    for row in 0..w {
        let r = component_word(older, newer, row);
        stats.bdd_calls += 1;
        if let BddOutcome::Decoded { error, weight, .. } = code.bdd_decode(&r) {
            if weight > 0 {
                apply_delta(older, newer, row, &error);
                let (lo, hi) = word::split(&error, w);
                clear_lo |= lo;
                clear_hi |= hi;
                changed += weight as usize;
            }
        }
    }
    if q >= 2 {
        ws.flags[q - 1] &= !clear_lo;
    }
    if q + 1 < len {
        ws.flags[q + 1] &= !clear_hi;
    }
    stats.bits_changed += changed as u64;
    changed
}
