//! Fixed-size packed bit words (up to 256 bits), used for component codewords.

/// Packed bits: bit `p` lives at `word[p / 64] >> (p % 64)`.
pub type Word = [u64; 4];

pub const WORD_BITS: usize = 256;

pub const ZERO: Word = [0; 4];

#[inline]
pub fn get(w: &Word, p: usize) -> bool {
    (w[p >> 6] >> (p & 63)) & 1 == 1
}

#[inline]
pub fn flip(w: &mut Word, p: usize) {
    w[p >> 6] ^= 1 << (p & 63);
}

#[inline]
pub fn set(w: &mut Word, p: usize, v: bool) {
    if get(w, p) != v {
        flip(w, p);
    }
}

#[inline]
pub fn weight(w: &Word) -> u32 {
    w.iter().map(|l| l.count_ones()).sum()
}

#[inline]
pub fn is_zero(w: &Word) -> bool {
    w.iter().all(|&l| l == 0)
}

#[inline]
pub fn xor(a: &Word, b: &Word) -> Word {
    [a[0] ^ b[0], a[1] ^ b[1], a[2] ^ b[2], a[3] ^ b[3]]
}

#[inline]
pub fn and(a: &Word, b: &Word) -> Word {
    [a[0] & b[0], a[1] & b[1], a[2] & b[2], a[3] & b[3]]
}

/// Positions of the set bits, ascending.
pub fn ones(w: &Word) -> impl Iterator<Item = usize> + '_ {
    w.iter().enumerate().flat_map(|(i, &limb)| {
        let mut l = limb;
        std::iter::from_fn(move || {
            if l == 0 {
                None
            } else {
                let b = l.trailing_zeros() as usize;
                l &= l - 1;
                Some(i * 64 + b)
            }
        })
    })
}

/// ORs the low `64` bits of `value` in starting at bit `offset`.
#[inline]
pub fn or_at(w: &mut Word, offset: usize, value: u64) {
    let limb = offset >> 6;
    let sh = offset & 63;
    w[limb] |= value << sh;
    if sh != 0 && limb + 1 < 4 {
        w[limb + 1] |= value >> (64 - sh);
    }
}

/// Clears every bit at position `>= len`.
#[inline]
pub fn truncate(w: &mut Word, len: usize) {
    for (i, limb) in w.iter_mut().enumerate() {
        let lo = i * 64;
        if len <= lo {
            *limb = 0;
        } else if len < lo + 64 {
            *limb &= (1u64 << (len - lo)) - 1;
        }
    }
}

/// Concatenates two `half`-bit halves (`half` ≤ 128): `a` occupies bits
/// `0..half`, `b` bits `half..2·half`.
#[inline]
pub fn concat(a: u128, b: u128, half: usize) -> Word {
    let (lo, hi) = if half == 128 {
        (a, b)
    } else {
        (a | (b << half), b >> (128 - half))
    };
    [lo as u64, (lo >> 64) as u64, hi as u64, (hi >> 64) as u64]
}

/// Inverse of [`concat`].
#[inline]
pub fn split(w: &Word, half: usize) -> (u128, u128) {
    let lo = w[0] as u128 | ((w[1] as u128) << 64);
    let hi = w[2] as u128 | ((w[3] as u128) << 64);
    if half == 128 {
        (lo, hi)
    } else {
        let mask = (1u128 << half) - 1;
        (lo & mask, ((lo >> half) | (hi << (128 - half))) & mask)
    }
}

pub fn from_bits(bits: &[bool]) -> Word {
    assert!(bits.len() <= WORD_BITS);
    let mut w = ZERO;
    for (p, &b) in bits.iter().enumerate() {
        if b {
            flip(&mut w, p);
        }
    }
    w
}

pub fn to_bits(w: &Word, len: usize) -> Vec<bool> {
    (0..len).map(|p| get(w, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn concat_split_inverse(a in any::<u128>(), b in any::<u128>(), k in 1usize..=7) {
            let half = 1usize << k;
            let mask = if half == 128 { u128::MAX } else { (1u128 << half) - 1 };
            let w = concat(a & mask, b & mask, half);
            prop_assert_eq!(split(&w, half), (a & mask, b & mask));
            for p in 0..half {
                prop_assert_eq!(get(&w, p), (a >> p) & 1 == 1);
                prop_assert_eq!(get(&w, half + p), (b >> p) & 1 == 1);
            }
        }
    }

    #[test]
    fn ones_and_or_at() {
        let mut w = ZERO;
        or_at(&mut w, 60, 0b1011);
        assert_eq!(ones(&w).collect::<Vec<_>>(), vec![60, 61, 63]);
        or_at(&mut w, 250, 0b11);
        assert_eq!(weight(&w), 5);
        truncate(&mut w, 62);
        assert_eq!(ones(&w).collect::<Vec<_>>(), vec![60, 61]);
    }
}
