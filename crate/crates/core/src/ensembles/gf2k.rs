//! Arithmetic in `GF(2^k)` for `1 ≤ k ≤ 16`.

use crate::{Error, Result};

/// Irreducible modulus for each degree `k`, including the leading `x^k` term.
///
/// These are the conventional low-weight choices (trinomials where one exists,
/// otherwise pentanomials; degree 8 is the AES polynomial).
pub const IRREDUCIBLE_POLYNOMIALS: [u32; 17] = [
    0,        // unused
    0b11,     // x + 1
    0b111,    // x^2 + x + 1
    0b1011,   // x^3 + x + 1
    0x13,     // x^4 + x + 1
    0x25,     // x^5 + x^2 + 1
    0x43,     // x^6 + x + 1
    0x83,     // x^7 + x + 1
    0x11B,    // x^8 + x^4 + x^3 + x + 1
    0x211,    // x^9 + x^4 + 1
    0x409,    // x^10 + x^3 + 1
    0x805,    // x^11 + x^2 + 1
    0x1053,   // x^12 + x^6 + x^4 + x + 1
    0x201B,   // x^13 + x^4 + x^3 + x + 1
    0x4443,   // x^14 + x^10 + x^6 + x + 1
    0x8003,   // x^15 + x + 1
    0x1100B,  // x^16 + x^12 + x^3 + x + 1
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2k {
    k: u32,
    modulus: u32,
}

impl Gf2k {
    pub fn new(k: u32) -> Result<Self> {
        if !(1..=16).contains(&k) {
            return Err(Error::OutOfRange { what: "field degree", value: u64::from(k), limit: 16 });
        }
        Ok(Self { k, modulus: IRREDUCIBLE_POLYNOMIALS[k as usize] })
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn order(&self) -> u64 {
        1u64 << self.k
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    /// Shift-and-add multiplication with reduction.
    pub fn mul(&self, mut a: u32, mut b: u32) -> u32 {
        let top = 1u32 << self.k;
        let mut acc = 0u32;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        acc
    }
}
