use crate::qcore::C64;
use crate::{Error, Result};

/// Permanent of a row-major `t × t` matrix by Ryser's formula, visiting
/// column subsets in Gray-code order. `O(2^t · t)`.
pub fn permanent(matrix: &[C64], t: usize, cap: usize) -> Result<C64> {
    if t > cap {
        return Err(Error::PermanentCap { size: t, cap });
    }
    if matrix.len() != t * t {
        return Err(Error::DimensionMismatch { expected: t * t, found: matrix.len() });
    }
    if t == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let mut row_sums = vec![C64::new(0.0, 0.0); t];
    let mut total = C64::new(0.0, 0.0);
    let mut gray = 0u64;
    for k in 1u64..(1u64 << t) {
        let next = k ^ (k >> 1);
        let col = (gray ^ next).trailing_zeros() as usize;
        let adding = next & (1 << col) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if adding {
                *s += matrix[i * t + col];
            } else {
                *s -= matrix[i * t + col];
            }
        }
        gray = next;
        let prod = row_sums.iter().fold(C64::new(1.0, 0.0), |acc, s| acc * s);
        if (t - next.count_ones() as usize) % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(m: &[C64], t: usize) -> C64 {
        fn rec(m: &[C64], t: usize, row: usize, used: &mut Vec<bool>) -> C64 {
            if row == t {
                return C64::new(1.0, 0.0);
            }
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..t {
                if !used[c] {
                    used[c] = true;
                    acc += m[row * t + c] * rec(m, t, row + 1, used);
                    used[c] = false;
                }
            }
            acc
        }
        rec(m, t, 0, &mut vec![false; t])
    }

    #[test]
    fn small_cases() {
        let ones = vec![C64::new(1.0, 0.0); 4];
        assert!((permanent(&ones, 2, 20).unwrap() - C64::new(2.0, 0.0)).norm() < 1e-12);
        let all = vec![C64::new(1.0, 0.0); 25];
        assert!((permanent(&all, 5, 20).unwrap() - C64::new(120.0, 0.0)).norm() < 1e-9);
        assert_eq!(permanent(&[], 0, 20).unwrap(), C64::new(1.0, 0.0));
    }

    #[test]
    fn matches_permutation_expansion() {
        for t in 1..=6 {
            let m: Vec<C64> = (0..t * t)
                .map(|k| C64::new(((k * 7 + 3) % 11) as f64 / 5.0 - 1.0, ((k * 5 + 1) % 13) as f64 / 6.0 - 1.0))
                .collect();
            let r = permanent(&m, t, 20).unwrap();
            let e = naive(&m, t);
            assert!((r - e).norm() < 1e-9 * e.norm().max(1.0), "t={t}");
        }
    }

    #[test]
    fn cap_enforced() {
        let m = vec![C64::new(0.0, 0.0); 9];
        assert_eq!(permanent(&m, 3, 2).unwrap_err(), Error::PermanentCap { size: 3, cap: 2 });
    }
}
