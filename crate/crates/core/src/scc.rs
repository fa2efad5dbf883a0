//! Staircase code construction and component-word geometry.
//!
//! Blocks are `w × w` with `w = nc / 2`. Row `j` of the pair
//! `(B_(i−1), B_i)` is the component word made of column `j` of `B_(i−1)`
//! (word positions `0..w`) followed by row `j` of `B_i` (positions
//! `w..2w`). Within that second half the first `kc − w` bits are fresh
//! information and the last `nc − kc` bits are parity.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bch::BchCode;
use crate::error::{Error, Result};
use crate::word::{self, Word};

/// The three component codes used throughout the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CodeId {
    C1,
    C2,
    C3,
}

impl CodeId {
    pub const ALL: [CodeId; 3] = [CodeId::C1, CodeId::C2, CodeId::C3];

    /// `(ν, u, t)`.
    pub fn parameters(self) -> (u32, usize, usize) {
        match self {
            CodeId::C1 => (8, 1, 2),
            CodeId::C2 => (8, 1, 3),
            CodeId::C3 => (8, 1, 4),
        }
    }

    pub fn build(self) -> Result<BchCode> {
        let (nu, u, t) = self.parameters();
        BchCode::new(nu, u, t)
    }
}

impl fmt::Display for CodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CodeId::C1 => "C1",
            CodeId::C2 => "C2",
            CodeId::C3 => "C3",
        };
        f.write_str(s)
    }
}

impl FromStr for CodeId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "C1" => Ok(CodeId::C1),
            "C2" => Ok(CodeId::C2),
            "C3" => Ok(CodeId::C3),
            other => Err(Error::invalid(format!("unknown code id {other:?}"))),
        }
    }
}

/// Staircase parameters: component code, block side, window and iterations.
#[derive(Debug, Clone)]
pub struct SccParams {
    code: Arc<BchCode>,
    w: usize,
    window: usize,
    iterations: usize,
}

impl SccParams {
    pub fn new(code: BchCode, window: usize, iterations: usize) -> Result<Self> {
        Self::from_shared(Arc::new(code), window, iterations)
    }

    pub fn from_shared(code: Arc<BchCode>, window: usize, iterations: usize) -> Result<Self> {
        let nc = code.nc();
        if nc % 2 != 0 {
            return Err(Error::invalid(format!("component length {nc} must be even")));
        }
        let w = nc / 2;
        if w > 128 {
            return Err(Error::invalid(format!("block side {w} exceeds 128")));
        }
        if code.kc() <= w {
            return Err(Error::invalid("kc must exceed nc/2 for a positive rate"));
        }
        if window < 2 {
            return Err(Error::invalid(format!("window of {window} blocks; need at least 2")));
        }
        if iterations == 0 {
            return Err(Error::invalid("at least one decoding iteration is required"));
        }
        Ok(Self { code, w, window, iterations })
    }

    pub fn code(&self) -> &BchCode {
        &self.code
    }
    pub fn shared_code(&self) -> Arc<BchCode> {
        Arc::clone(&self.code)
    }
    pub fn w(&self) -> usize {
        self.w
    }
    /// Window size `L` in blocks.
    pub fn window(&self) -> usize {
        self.window
    }
    /// Decoding iterations `ℓ` per window position.
    pub fn iterations(&self) -> usize {
        self.iterations
    }
    /// Fresh information bits per row, `kc − w`.
    pub fn info_per_row(&self) -> usize {
        self.code.kc() - self.w
    }
    pub fn info_per_block(&self) -> usize {
        self.w * self.info_per_row()
    }
    /// Mask of the information columns of a block row.
    pub fn row_info_mask(&self) -> u128 {
        low_mask(self.info_per_row())
    }
    /// Rate `2kc/nc − 1` as an exact fraction `(2kc − nc, nc)`.
    pub fn rate_fraction(&self) -> (usize, usize) {
        (2 * self.code.kc() - self.code.nc(), self.code.nc())
    }
    pub fn rate(&self) -> f64 {
        let (a, b) = self.rate_fraction();
        a as f64 / b as f64
    }
}

#[inline]
pub(crate) fn low_mask(bits: usize) -> u128 {
    if bits >= 128 {
        u128::MAX
    } else {
        (1u128 << bits) - 1
    }
}

/// A `w × w` binary block kept both row-major and column-major so that
/// either orientation of a component word can be read with one load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    w: usize,
    rows: Vec<u128>,
    cols: Vec<u128>,
}

impl Block {
    pub fn zeros(w: usize) -> Self {
        assert!((1..=128).contains(&w), "block side {w} out of range");
        Self { w, rows: vec![0; w], cols: vec![0; w] }
    }

    /// Builds a block from packed rows (bit `c` of `rows[r]` is entry `(r, c)`).
    pub fn from_rows(w: usize, rows: Vec<u128>) -> Result<Self> {
        Error::check_len(w, rows.len())?;
        let mut b = Self::zeros(w);
        let mask = low_mask(w);
        for (r, &row) in rows.iter().enumerate() {
            let mut bits = row & mask;
            while bits != 0 {
                let c = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                b.cols[c] |= 1 << r;
            }
            b.rows[r] = row & mask;
        }
        Ok(b)
    }

    /// Row-major bit sequence of length `w²`.
    pub fn from_bits(w: usize, bits: &[bool]) -> Result<Self> {
        Error::check_len(w * w, bits.len())?;
        let rows = bits
            .chunks(w)
            .map(|chunk| chunk.iter().enumerate().fold(0u128, |acc, (c, &b)| acc | ((b as u128) << c)))
            .collect();
        Self::from_rows(w, rows)
    }

    pub fn to_bits(&self) -> Vec<bool> {
        let mut out = Vec::with_capacity(self.w * self.w);
        for &row in &self.rows {
            out.extend((0..self.w).map(|c| (row >> c) & 1 == 1));
        }
        out
    }

    pub fn side(&self) -> usize {
        self.w
    }
    pub fn rows(&self) -> &[u128] {
        &self.rows
    }
    pub fn cols(&self) -> &[u128] {
        &self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        (self.rows[r] >> c) & 1 == 1
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.rows[r] ^= 1 << c;
        self.cols[c] ^= 1 << r;
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        if self.get(r, c) != v {
            self.flip(r, c);
        }
    }

    /// Number of differing entries.
    pub fn distance(&self, other: &Block) -> u64 {
        self.rows.iter().zip(&other.rows).map(|(a, b)| (a ^ b).count_ones() as u64).sum()
    }
}

/// Row `row` of the pair `(B_(pair−1), B_pair)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComponentWordRef {
    pub pair: usize,
    pub row: usize,
}

/// The component word for `row` of `(older, newer)`.
#[inline]
pub fn component_word(older: &Block, newer: &Block, row: usize) -> Word {
    word::concat(older.cols[row], newer.rows[row], older.w)
}

/// Flips every position set in `delta` on the pair `(older, newer)`.
pub fn apply_delta(older: &mut Block, newer: &mut Block, row: usize, delta: &Word) {
    let w = older.w;
    let (col_part, row_part) = word::split(delta, w);
    if col_part != 0 {
        older.cols[row] ^= col_part;
        let mut bits = col_part;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            older.rows[k] ^= 1 << row;
        }
    }
    if row_part != 0 {
        newer.rows[row] ^= row_part;
        let mut bits = row_part;
        while bits != 0 {
            let k = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            newer.cols[k] ^= 1 << row;
        }
    }
}

/// Encodes the next staircase block from the previous one. `info_rows[j]`
/// carries the `kc − w` fresh information bits of row `j` (low bits).
pub fn encode_rows(params: &SccParams, prev: &Block, info_rows: &[u128]) -> Result<Block> {
    let w = params.w();
    Error::check_len(w, prev.side())?;
    Error::check_len(w, info_rows.len())?;
    let code = params.code();
    let mask = params.row_info_mask();
    let mut rows = Vec::with_capacity(w);
    for (j, &info) in info_rows.iter().enumerate() {
        let mut cw = word::concat(prev.cols[j], info & mask, w);
        code.encode_word(&mut cw);
        rows.push(word::split(&cw, w).1);
    }
    Block::from_rows(w, rows)
}

/// Bit-sequence front end to [`encode_rows`]: `info` holds `w·(kc − w)` bits,
/// row by row.
pub fn encode_next_block(params: &SccParams, prev: &Block, info: &[bool]) -> Result<Block> {
    let per_row = params.info_per_row();
    Error::check_len(params.w() * per_row, info.len())?;
    let rows: Vec<u128> = info
        .chunks(per_row)
        .map(|chunk| chunk.iter().enumerate().fold(0u128, |acc, (c, &b)| acc | ((b as u128) << c)))
        .collect();
    encode_rows(params, prev, &rows)
}

/// An encoded stream `B_0, B_1, …` with `B_0` all zero.
#[derive(Debug, Clone)]
pub struct SccStream {
    params: SccParams,
    blocks: Vec<Block>,
}

impl SccStream {
    pub fn new(params: SccParams) -> Self {
        let w = params.w();
        Self { params, blocks: vec![Block::zeros(w)] }
    }

    pub fn params(&self) -> &SccParams {
        &self.params
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Encodes and appends the next block.
    pub fn push_info(&mut self, info_rows: &[u128]) -> Result<&Block> {
        let next = encode_rows(&self.params, self.blocks.last().expect("B_0 present"), info_rows)?;
        self.blocks.push(next);
        Ok(self.blocks.last().expect("just pushed"))
    }

    fn check_ref(&self, r: ComponentWordRef) -> Result<()> {
        if r.pair == 0 || r.pair >= self.blocks.len() {
            return Err(Error::OutOfRange(format!("pair {} with {} blocks", r.pair, self.blocks.len())));
        }
        if r.row >= self.params.w() {
            return Err(Error::OutOfRange(format!("row {} with w = {}", r.row, self.params.w())));
        }
        Ok(())
    }

    pub fn extract(&self, r: ComponentWordRef) -> Result<Word> {
        self.check_ref(r)?;
        Ok(component_word(&self.blocks[r.pair - 1], &self.blocks[r.pair], r.row))
    }

    pub fn extract_bits(&self, r: ComponentWordRef) -> Result<Vec<bool>> {
        Ok(word::to_bits(&self.extract(r)?, 2 * self.params.w()))
    }

    /// Writes `new` into the two blocks of the pair.
    pub fn write_back(&mut self, r: ComponentWordRef, new: &Word) -> Result<()> {
        let old = self.extract(r)?;
        let delta = word::xor(&old, new);
        let (head, tail) = self.blocks.split_at_mut(r.pair);
        apply_delta(&mut head[r.pair - 1], &mut tail[0], r.row, &delta);
        Ok(())
    }
}
