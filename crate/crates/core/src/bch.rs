//! Binary (extended) BCH component codes with bounded-distance decoding.
//!
//! Codeword layout is systematic: the `kc` information bits occupy
//! positions `0..kc`, the `νt` BCH parity bits follow, and the overall
//! parity bit (when `u = 1`) sits last at position `nc − 1`. Base position
//! `p < 2^ν − 1` carries the coefficient of `x^(2^ν − 2 − p)`.
//!
//! Syndromes and parities are computed byte-wise from precomputed tables,
//! which keeps the all-zero-syndrome fast path (the common case inside a
//! converged staircase window) to a few dozen table lookups.

use crate::error::{Error, Result};
use crate::gf::{Gf, GfContext};
use crate::word::{self, Word};

/// Largest supported error-correcting capability; the packed syndrome uses
/// one byte per odd syndrome plus one byte of overall parity.
pub const MAX_T: usize = 7;

const PARITY_BYTE_SHIFT: u32 = 56;

/// Result of bounded-distance decoding.
///
/// A miscorrection is indistinguishable from a correct decoding here: both
/// surface as `Decoded`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BddOutcome {
    Decoded { codeword: Word, error: Word, weight: u32 },
    Failure,
}

impl BddOutcome {
    pub fn is_decoded(&self) -> bool {
        matches!(self, BddOutcome::Decoded { .. })
    }
}

#[derive(Debug, Clone)]
pub struct BchCode {
    gf: GfContext,
    t: usize,
    u: usize,
    /// Base (cyclic) length `2^ν − 1`.
    n: usize,
    nc: usize,
    kc: usize,
    d0: usize,
    generator: u64,
    /// `nbytes × 256` packed syndrome contributions.
    syndrome_table: Vec<u64>,
    /// `info_bytes × 256` parity contributions (bit `i` → position `kc + i`).
    parity_table: Vec<u64>,
}

impl BchCode {
    /// Builds the `(2^ν − 1 + u, 2^ν − 1 − νt, t)` code with the default
    /// primitive polynomial for degree `nu`.
    pub fn new(nu: u32, u: usize, t: usize) -> Result<Self> {
        Self::with_field(GfContext::new(nu)?, u, t)
    }

    pub fn with_field(gf: GfContext, u: usize, t: usize) -> Result<Self> {
        let nu = gf.degree() as usize;
        if nu < 3 {
            return Err(Error::invalid(format!("nu = {nu} must be at least 3")));
        }
        if u > 1 {
            return Err(Error::invalid(format!("u = {u} must be 0 or 1")));
        }
        if t == 0 || t > MAX_T {
            return Err(Error::invalid(format!("t = {t} must lie in 1..={MAX_T}")));
        }
        let n = gf.order();
        if nu * t + u >= n {
            return Err(Error::invalid(format!("nu·t + u = {} must be below 2^nu − 1 = {n}", nu * t + u)));
        }
        let nc = n + u;
        if nc > word::WORD_BITS {
            return Err(Error::invalid(format!("codeword length {nc} exceeds {} bits", word::WORD_BITS)));
        }

        // Product of the distinct minimal polynomials of α, α^3, …, α^(2t−1).
        let mut seen: Vec<u64> = Vec::new();
        let mut generator = 1u64;
        let mut deg = 0usize;
        for k in (1..2 * t).step_by(2) {
            let m = gf.minimal_poly(k);
            if seen.contains(&m) {
                continue;
            }
            seen.push(m);
            let mdeg = 63 - m.leading_zeros() as usize;
            generator = clmul(generator, m);
            deg += mdeg;
        }
        if deg != nu * t {
            return Err(Error::invalid(format!(
                "generator degree {deg} differs from nu·t = {}; kc = nc − νt − u would not hold",
                nu * t
            )));
        }
        let kc = n - deg;

        let mut code = Self {
            gf,
            t,
            u,
            n,
            nc,
            kc,
            d0: 2 * t + 1 + u,
            generator,
            syndrome_table: Vec::new(),
            parity_table: Vec::new(),
        };
        code.build_tables();
        Ok(code)
    }

    fn build_tables(&mut self) {
        let n = self.n;
        let r = n - self.kc;
        let nbytes = self.nc.div_ceil(8);

        // Packed syndrome contribution of a single 1 at each position.
        let mut unit = vec![0u64; nbytes * 8];
        for (p, slot) in unit.iter_mut().enumerate().take(self.nc) {
            let mut v = 0u64;
            if p < n {
                let e = (n - 1 - p) as i64;
                for j in 0..self.t {
                    v |= (self.gf.exp((2 * j as i64 + 1) * e) as u64) << (8 * j);
                }
            }
            if self.u == 1 {
                v |= 1 << PARITY_BYTE_SHIFT;
            }
            *slot = v;
        }
        self.syndrome_table = byte_table(&unit, nbytes);

        // x^e mod g(x) for every base exponent.
        let mut rem = vec![0u64; n];
        let mut cur = 1u64;
        for slot in rem.iter_mut() {
            *slot = cur;
            cur <<= 1;
            if (cur >> r) & 1 == 1 {
                cur ^= self.generator;
            }
        }
        let info_bytes = self.kc.div_ceil(8);
        let mut unit = vec![0u64; info_bytes * 8];
        for (p, slot) in unit.iter_mut().enumerate().take(self.kc) {
            let rm = rem[n - 1 - p];
            // Coefficient of x^i lands at position n − 1 − i, i.e. parity index r − 1 − i.
            let mut v = 0u64;
            for i in 0..r {
                if (rm >> i) & 1 == 1 {
                    v |= 1 << (r - 1 - i);
                }
            }
            if self.u == 1 && (1 + rm.count_ones()) & 1 == 1 {
                v |= 1 << r;
            }
            *slot = v;
        }
        self.parity_table = byte_table(&unit, info_bytes);
    }

    pub fn field(&self) -> &GfContext {
        &self.gf
    }
    pub fn nu(&self) -> u32 {
        self.gf.degree()
    }
    pub fn t(&self) -> usize {
        self.t
    }
    pub fn u(&self) -> usize {
        self.u
    }
    pub fn nc(&self) -> usize {
        self.nc
    }
    pub fn kc(&self) -> usize {
        self.kc
    }
    /// Design minimum distance `2t + 1 + u`.
    pub fn d0(&self) -> usize {
        self.d0
    }
    /// Generator of the cyclic base code (bit `i` ↔ `x^i`).
    pub fn generator_poly(&self) -> u64 {
        self.generator
    }

    /// Packed syndrome: byte `j` holds `S_(2j+1)`, the top byte the overall
    /// parity. Zero iff `r` is a codeword.
    #[inline]
    pub fn syndrome(&self, r: &Word) -> u64 {
        let mut s = 0u64;
        let nbytes = self.nc.div_ceil(8);
        for b in 0..nbytes {
            let byte = ((r[b >> 3] >> ((b & 7) * 8)) & 0xFF) as usize;
            s ^= self.syndrome_table[(b << 8) | byte];
        }
        s
    }

    #[inline]
    pub fn is_codeword(&self, r: &Word) -> bool {
        self.syndrome(r) == 0
    }

    /// Fills positions `kc..nc` of `w` with parity for the information in
    /// positions `0..kc`; bits beyond `nc` are cleared.
    pub fn encode_word(&self, w: &mut Word) {
        word::truncate(w, self.kc);
        let mut parity = 0u64;
        for b in 0..self.kc.div_ceil(8) {
            let byte = ((w[b >> 3] >> ((b & 7) * 8)) & 0xFF) as usize;
            parity ^= self.parity_table[(b << 8) | byte];
        }
        word::or_at(w, self.kc, parity);
    }

    /// Systematic encoding of `kc` information bits.
    pub fn encode(&self, info: &[bool]) -> Result<Vec<bool>> {
        Error::check_len(self.kc, info.len())?;
        let mut w = word::from_bits(info);
        self.encode_word(&mut w);
        Ok(word::to_bits(&w, self.nc))
    }

    /// Bit-sequence front end to [`BchCode::bdd_decode`].
    pub fn bdd_decode_bits(&self, r: &[bool]) -> Result<BddOutcome> {
        Error::check_len(self.nc, r.len())?;
        Ok(self.bdd_decode(&word::from_bits(r)))
    }

    /// Bounded-distance decoding with radius `t`.
    pub fn bdd_decode(&self, r: &Word) -> BddOutcome {
        let s = self.syndrome(r);
        if s == 0 {
            return BddOutcome::Decoded { codeword: *r, error: word::ZERO, weight: 0 };
        }
        let parity = ((s >> PARITY_BYTE_SHIFT) & 1) as u32;
        let base = s & ((1u64 << PARITY_BYTE_SHIFT) - 1);

        let mut error = word::ZERO;
        let mut weight = 0u32;
        if base != 0 {
            let mut synd = [0 as Gf; 2 * MAX_T + 1];
            for j in 0..self.t {
                synd[2 * j + 1] = ((base >> (8 * j)) & 0xFF) as Gf;
            }
            for i in 1..=self.t {
                synd[2 * i] = self.gf.mul(synd[i], synd[i]);
            }
            let Some((locator, deg)) = self.berlekamp_massey(&synd[..=2 * self.t]) else {
                return BddOutcome::Failure;
            };
            if !self.chien(&locator, deg, &mut error) {
                return BddOutcome::Failure;
            }
            weight = deg as u32;
        }
        if self.u == 1 && (weight & 1) != parity {
            // Odd-weight mismatch: the remaining error can only be the
            // overall parity bit, which costs one more unit of distance.
            if (weight as usize) < self.t {
                word::flip(&mut error, self.nc - 1);
                weight += 1;
            } else {
                return BddOutcome::Failure;
            }
        }
        BddOutcome::Decoded { codeword: word::xor(r, &error), error, weight }
    }

    /// Error-locator polynomial from `S_1..S_2t` (`synd[0]` unused). Returns
    /// `None` when the LFSR length exceeds `t` or the leading coefficient
    /// vanishes.
    fn berlekamp_massey(&self, synd: &[Gf]) -> Option<([Gf; MAX_T + 2], usize)> {
        let two_t = 2 * self.t;
        let mut c = [0 as Gf; 2 * MAX_T + 2];
        let mut b = [0 as Gf; 2 * MAX_T + 2];
        c[0] = 1;
        b[0] = 1;
        let mut len = 0usize;
        let mut shift = 1usize;
        let mut last = 1 as Gf;
        for k in 0..two_t {
            let mut d = synd[k + 1];
            for i in 1..=len {
                d ^= self.gf.mul(c[i], synd[k + 1 - i]);
            }
            if d == 0 {
                shift += 1;
                continue;
            }
            let coef = self.gf.div(d, last);
            if 2 * len <= k {
                let prev = c;
                for i in 0..(c.len() - shift) {
                    c[i + shift] ^= self.gf.mul(coef, b[i]);
                }
                len = k + 1 - len;
                b = prev;
                last = d;
                shift = 1;
            } else {
                for i in 0..(c.len() - shift) {
                    c[i + shift] ^= self.gf.mul(coef, b[i]);
                }
                shift += 1;
            }
        }
        if len > self.t || c[len] == 0 || c[len + 1..].iter().any(|&x| x != 0) {
            return None;
        }
        let mut out = [0 as Gf; MAX_T + 2];
        out[..=len].copy_from_slice(&c[..=len]);
        Some((out, len))
    }

    /// Finds the roots `α^(−e)` of the locator and marks base position
    /// `n − 1 − e` in `error` for each. True iff exactly `deg` distinct roots.
    fn chien(&self, locator: &[Gf], deg: usize, error: &mut Word) -> bool {
        let n = self.n;
        if deg == 1 {
            let e = self.gf.log(locator[1]);
            word::flip(error, n - 1 - e);
            return true;
        }
        let mut logs = [0usize; MAX_T + 1];
        for i in 1..=deg {
            if locator[i] == 0 {
                logs[i] = usize::MAX;
            } else {
                logs[i] = self.gf.log(locator[i]);
            }
        }
        let mut found = 0usize;
        for e in 0..n {
            let mut sum = 1 as Gf;
            for (i, l) in logs.iter_mut().enumerate().take(deg + 1).skip(1) {
                if *l != usize::MAX {
                    sum ^= self.gf.antilog(*l);
                    // Next evaluation point multiplies term i by α^(−i).
                    let next = *l + n - i;
                    *l = if next >= n { next - n } else { next };
                }
            }
            if sum == 0 {
                word::flip(error, n - 1 - e);
                found += 1;
                if found == deg {
                    return true;
                }
            }
        }
        false
    }
}

/// Carry-less multiplication of two GF(2) polynomials (product must fit 64 bits).
fn clmul(a: u64, b: u64) -> u64 {
    let mut out = 0u64;
    for i in 0..64 {
        if (b >> i) & 1 == 1 {
            out ^= a << i;
        }
    }
    out
}

/// Expands per-position contributions into a per-byte lookup table.
fn byte_table(unit: &[u64], nbytes: usize) -> Vec<u64> {
    let mut table = vec![0u64; nbytes * 256];
    for b in 0..nbytes {
        for v in 1..256usize {
            let low = v.trailing_zeros() as usize;
            table[(b << 8) | v] = table[(b << 8) | (v & (v - 1))] ^ unit[b * 8 + low];
        }
    }
    table
}
