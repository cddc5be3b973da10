//! Exact enumeration and uniform sampling of the binary symplectic group
//! `Sp(2n, 2)` by the row-by-row transvection construction.
//!
//! Vectors here use the interleaved layout: bit `2j` is the X part and bit
//! `2j + 1` the Z part of qubit `j`.

use rand::Rng;

/// Source of mixed-radix digits consumed by the construction.
pub trait DigitSource {
    /// A digit in `0..radix`.
    fn digit(&mut self, radix: u64) -> u64;
}

/// Digits of a fixed group index, least significant first.
pub struct IndexDigits(pub u128);

impl DigitSource for IndexDigits {
    fn digit(&mut self, radix: u64) -> u64 {
        let d = (self.0 % radix as u128) as u64;
        self.0 /= radix as u128;
        d
    }
}

/// Independent uniform digits.
pub struct RandomDigits<'a, R: Rng + ?Sized>(pub &'a mut R);

impl<R: Rng + ?Sized> DigitSource for RandomDigits<'_, R> {
    fn digit(&mut self, radix: u64) -> u64 {
        self.0.random_range(0..radix)
    }
}

const X_MASK: u64 = 0x5555_5555_5555_5555;
const Z_MASK: u64 = 0xAAAA_AAAA_AAAA_AAAA;

fn inner(v: u64, w: u64) -> u32 {
    let a = (v & X_MASK) & ((w & Z_MASK) >> 1);
    let b = (w & X_MASK) & ((v & Z_MASK) >> 1);
    (a.count_ones() + b.count_ones()) & 1
}

/// `Z_h(v) = v + ⟨h, v⟩ h`.
fn transvection(h: u64, v: u64) -> u64 {
    if inner(h, v) == 1 {
        v ^ h
    } else {
        v
    }
}

fn pair(v: u64, i: usize) -> u64 {
    (v >> (2 * i)) & 3
}

fn bit(v: u64, i: usize) -> u64 {
    (v >> i) & 1
}

/// Two transvection vectors `(h1, h2)` with `y = Z_h2 Z_h1 x`.
fn find_transvection(x: u64, y: u64, n: usize) -> (u64, u64) {
    if x == y {
        return (0, 0);
    }
    if inner(x, y) == 1 {
        return (x ^ y, 0);
    }
    for i in 0..n {
        if pair(x, i) != 0 && pair(y, i) != 0 {
            let ii = 2 * i;
            let mut z0 = bit(x, ii) ^ bit(y, ii);
            let mut z1 = bit(x, ii + 1) ^ bit(y, ii + 1);
            if z0 + z1 == 0 {
                z1 = 1;
                if bit(x, ii) != bit(x, ii + 1) {
                    z0 = 1;
                }
            }
            let z = (z0 << ii) | (z1 << (ii + 1));
            return (x ^ z, y ^ z);
        }
    }
    let mut z = 0u64;
    for i in 0..n {
        if pair(x, i) != 0 && pair(y, i) == 0 {
            let ii = 2 * i;
            if bit(x, ii) == bit(x, ii + 1) {
                z |= 1 << (ii + 1);
            } else {
                z |= bit(x, ii) << (ii + 1);
                z |= bit(x, ii + 1) << ii;
            }
            break;
        }
    }
    for i in 0..n {
        if pair(x, i) == 0 && pair(y, i) != 0 {
            let ii = 2 * i;
            if bit(y, ii) == bit(y, ii + 1) {
                z |= 1 << (ii + 1);
            } else {
                z |= bit(y, ii) << (ii + 1);
                z |= bit(y, ii + 1) << ii;
            }
            break;
        }
    }
    (x ^ z, y ^ z)
}

/// Builds the symplectic matrix selected by `digits`, returned as `2n` rows in
/// the interleaved layout. Row `2j` is the image of `X_j`, row `2j + 1` of `Z_j`.
pub(crate) fn symplectic_rows<D: DigitSource>(n: usize, digits: &mut D) -> Vec<u64> {
    assert!((1..=32).contains(&n));
    let nn = 2 * n;
    let s = if nn == 64 { u64::MAX } else { (1u64 << nn) - 1 };
    let k = digits.digit(s) + 1;
    let mut f1 = k;
    let e1 = 1u64;
    let (t0, t1) = find_transvection(e1, f1, n);
    let bits = digits.digit(1u64 << (nn - 1));
    let mut eprime = e1;
    for j in 2..nn {
        eprime |= bit(bits, j - 1) << j;
    }
    let h0 = transvection(t1, transvection(t0, eprime));
    if bits & 1 == 1 {
        f1 = 0;
    }
    let mut g = vec![0b01u64, 0b10u64];
    if n > 1 {
        g.extend(symplectic_rows(n - 1, digits).into_iter().map(|r| r << 2));
    }
    for row in g.iter_mut() {
        let mut v = transvection(t0, *row);
        v = transvection(t1, v);
        v = transvection(h0, v);
        v = transvection(f1, v);
        *row = v;
    }
    g
}

/// `|Sp(2n, 2)| = ∏_{j=1}^{n} 2^{2j-1} (4^j - 1)`, when it fits in `u128`.
pub fn symplectic_group_order(n: usize) -> Option<u128> {
    let mut acc: u128 = 1;
    for j in 1..=n as u32 {
        let a = 1u128.checked_shl(2 * j - 1)?;
        let four_j = 1u128.checked_shl(2 * j)?;
        acc = acc.checked_mul(a)?.checked_mul(four_j - 1)?;
    }
    Some(acc)
}

/// The symplectic matrix with canonical index `index < |Sp(2n, 2)|`, as
/// interleaved rows.
pub fn symplectic_from_index(n: usize, index: u128) -> Vec<u64> {
    symplectic_rows(n, &mut IndexDigits(index))
}
