use serde::{Deserialize, Serialize};

use super::gf2k::Gf2k;
use crate::{Error, Result};

/// Degree-`(t-1)` polynomials over `GF(2^max(n, m))`, truncated to `m` output bits.
///
/// A key is the coefficient list `(a_0, …, a_{t-1})`; key index `i` packs
/// `a_j` into bits `[j·k, (j+1)·k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KWiseFamily {
    pub t: usize,
    pub n: u32,
    pub m: u32,
    #[serde(skip)]
    field: Option<Gf2k>,
}

impl KWiseFamily {
    pub fn new(t: usize, n: u32, m: u32) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidParameter("independence order t must be at least 1".into()));
        }
        if n == 0 || m == 0 {
            return Err(Error::InvalidParameter("input and output widths must be positive".into()));
        }
        let field = Gf2k::new(n.max(m))?;
        Ok(Self { t, n, m, field: Some(field) })
    }

    fn field(&self) -> Gf2k {
        self.field.unwrap_or_else(|| Gf2k::new(self.n.max(self.m)).expect("validated degree"))
    }

    pub fn field_degree(&self) -> u32 {
        self.n.max(self.m)
    }

    /// `2^{k t}` keys when that fits in a `u64`.
    pub fn key_count(&self) -> Option<u64> {
        let bits = self.field_degree() as usize * self.t;
        (bits < 64).then(|| 1u64 << bits)
    }

    /// Coefficients of key number `index`.
    pub fn key_from_index(&self, index: u64) -> Result<Vec<u32>> {
        if let Some(count) = self.key_count() {
            if index >= count {
                return Err(Error::OutOfRange { what: "key index", value: index, limit: count });
            }
        }
        let k = self.field_degree();
        let mask = (1u64 << k) - 1;
        Ok((0..self.t).map(|j| ((index >> (j as u32 * k)) & mask) as u32).collect())
    }
}

/// Evaluates the key polynomial at `x` and keeps the low `m` bits.
pub fn kwise_eval(family: &KWiseFamily, key: &[u32], x: u64) -> Result<u64> {
    if key.len() != family.t {
        return Err(Error::DimensionMismatch { expected: family.t, found: key.len() });
    }
    let field = family.field();
    if let Some(&a) = key.iter().find(|&&a| u64::from(a) >= field.order()) {
        return Err(Error::OutOfRange { what: "key coefficient", value: u64::from(a), limit: field.order() });
    }
    if x >= 1u64 << family.n {
        return Err(Error::OutOfRange { what: "input", value: x, limit: 1u64 << family.n });
    }
    let x = x as u32;
    let y = key.iter().rev().fold(0u32, |acc, &a| field.add(field.mul(acc, x), a));
    Ok(u64::from(y) & ((1u64 << family.m) - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_in_range() {
        let f = KWiseFamily::new(3, 5, 3).unwrap();
        let key = f.key_from_index(12345).unwrap();
        for x in 0..32 {
            let y = kwise_eval(&f, &key, x).unwrap();
            assert!(y < 8);
            assert_eq!(y, kwise_eval(&f, &key, x).unwrap());
        }
    }

    #[test]
    fn out_of_range_inputs() {
        let f = KWiseFamily::new(2, 2, 2).unwrap();
        assert!(kwise_eval(&f, &[0, 0], 4).is_err());
        assert!(kwise_eval(&f, &[0, 4], 1).is_err());
        assert!(kwise_eval(&f, &[0], 1).is_err());
        assert!(f.key_from_index(16).is_err());
        assert!(KWiseFamily::new(0, 2, 2).is_err());
    }

    #[test]
    fn one_wise_marginal_is_uniform() {
        let f = KWiseFamily::new(1, 3, 3).unwrap();
        for x in 0..8 {
            let mut counts = [0u32; 8];
            for i in 0..f.key_count().unwrap() {
                counts[kwise_eval(&f, &f.key_from_index(i).unwrap(), x).unwrap() as usize] += 1;
            }
            assert!(counts.iter().all(|&c| c == 1));
        }
    }
}
