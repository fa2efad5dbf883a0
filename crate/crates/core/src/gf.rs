//! Arithmetic in GF(2^ν) through log/antilog tables.

use crate::error::{Error, Result};

/// Field element. Wide enough for every degree accepted by [`GfContext`].
pub type Gf = u16;

/// Largest field degree supported by the tables.
pub const MAX_FIELD_DEGREE: u32 = 16;

/// Default primitive polynomial (including the leading term) for each
/// degree 3..=16.
pub fn default_primitive_poly(nu: u32) -> Option<u32> {
    Some(match nu {
        3 => 0b1011,
        4 => 0b1_0011,
        5 => 0b10_0101,
        6 => 0b100_0011,
        7 => 0b1000_1001,
        // x^8 + x^4 + x^3 + x^2 + 1
        8 => 0x11D,
        9 => 0x211,
        10 => 0x409,
        11 => 0x805,
        12 => 0x1053,
        13 => 0x201B,
        14 => 0x4443,
        15 => 0x8003,
        16 => 0x1100B,
        _ => return None,
    })
}

/// Log/antilog tables for GF(2^ν) generated by a primitive polynomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfContext {
    nu: u32,
    primitive_poly: u32,
    log: Vec<u32>,
    antilog: Vec<Gf>,
}

impl GfContext {
    /// Field of degree `nu` using [`default_primitive_poly`].
    pub fn new(nu: u32) -> Result<Self> {
        let poly = default_primitive_poly(nu)
            .ok_or_else(|| Error::invalid(format!("no default primitive polynomial for nu = {nu}")))?;
        Self::with_poly(nu, poly)
    }

    /// Field of degree `nu` generated by `primitive_poly` (bit `i` is the
    /// coefficient of `x^i`; bit `nu` must be set).
    pub fn with_poly(nu: u32, primitive_poly: u32) -> Result<Self> {
        if !(2..=MAX_FIELD_DEGREE).contains(&nu) {
            return Err(Error::invalid(format!("field degree {nu} out of range")));
        }
        if primitive_poly >> nu != 1 {
            return Err(Error::invalid(format!(
                "polynomial {primitive_poly:#x} does not have degree {nu}"
            )));
        }
        let order = (1usize << nu) - 1;
        let mut antilog = vec![0 as Gf; order];
        let mut log = vec![u32::MAX; order + 1];
        let mut x: u32 = 1;
        for (i, slot) in antilog.iter_mut().enumerate() {
            if i > 0 && x == 1 {
                return Err(Error::invalid(format!(
                    "polynomial {primitive_poly:#x} is not primitive (period {i})"
                )));
            }
            *slot = x as Gf;
            log[x as usize] = i as u32;
            x <<= 1;
            if x >> nu != 0 {
                x ^= primitive_poly;
            }
        }
        if x != 1 {
            return Err(Error::invalid(format!("polynomial {primitive_poly:#x} is not primitive")));
        }
        Ok(Self { nu, primitive_poly, log, antilog })
    }

    pub fn degree(&self) -> u32 {
        self.nu
    }

    pub fn primitive_poly(&self) -> u32 {
        self.primitive_poly
    }

    /// Multiplicative order of the field, `2^ν − 1`.
    #[inline]
    pub fn order(&self) -> usize {
        self.antilog.len()
    }

    /// `α^k` for any integer exponent.
    #[inline]
    pub fn exp(&self, k: i64) -> Gf {
        let n = self.order() as i64;
        self.antilog[k.rem_euclid(n) as usize]
    }

    /// `α^k` for `k < 2^ν − 1`.
    #[inline]
    pub fn antilog(&self, k: usize) -> Gf {
        self.antilog[k]
    }

    /// Discrete log of a nonzero element.
    #[inline]
    pub fn log(&self, x: Gf) -> usize {
        debug_assert!(x != 0, "log of zero");
        self.log[x as usize] as usize
    }

    #[inline]
    pub fn mul(&self, a: Gf, b: Gf) -> Gf {
        if a == 0 || b == 0 {
            return 0;
        }
        let s = self.log[a as usize] as usize + self.log[b as usize] as usize;
        let n = self.order();
        self.antilog[if s >= n { s - n } else { s }]
    }

    #[inline]
    pub fn div(&self, a: Gf, b: Gf) -> Gf {
        assert!(b != 0, "division by zero in GF(2^{})", self.nu);
        if a == 0 {
            return 0;
        }
        let n = self.order();
        let s = self.log[a as usize] as usize + n - self.log[b as usize] as usize;
        self.antilog[if s >= n { s - n } else { s }]
    }

    #[inline]
    pub fn inv(&self, a: Gf) -> Gf {
        self.div(1, a)
    }

    pub fn pow(&self, a: Gf, e: u64) -> Gf {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        let n = self.order() as u64;
        self.antilog[((self.log[a as usize] as u64 * (e % n)) % n) as usize]
    }

    /// Minimal polynomial over GF(2) of `α^k`, as a bit mask.
    pub fn minimal_poly(&self, k: usize) -> u64 {
        let n = self.order();
        let mut coset = vec![k % n];
        let mut next = (2 * k) % n;
        while next != k % n {
            coset.push(next);
            next = (2 * next) % n;
        }
        // Product of (x − α^c) over the cyclotomic coset, coefficients in GF(2^ν).
        let mut poly: Vec<Gf> = vec![1];
        for &c in &coset {
            let root = self.antilog[c];
            let mut out = vec![0 as Gf; poly.len() + 1];
            for (i, &p) in poly.iter().enumerate() {
                out[i + 1] ^= p;
                out[i] ^= self.mul(p, root);
            }
            poly = out;
        }
        poly.iter().enumerate().fold(0u64, |acc, (i, &c)| {
            debug_assert!(c <= 1, "minimal polynomial must be binary");
            acc | ((c as u64) << i)
        })
    }
}
