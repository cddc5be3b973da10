//! In-place gate kernels on raw amplitude slices.

use serde::{Deserialize, Serialize};

use super::{qubit_bit, C64};

/// Elementary gates used by the random-circuit designs and the attack circuits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Gate {
    H(usize),
    X(usize),
    T(usize),
    Tdg(usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    pub fn apply(&self, amps: &mut [C64], n: usize) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match *self {
            Gate::H(q) => apply_1q(amps, n, q, [[h.into(), h.into()], [h.into(), (-h).into()]]),
            Gate::X(q) => apply_x(amps, n, q),
            Gate::T(q) => apply_phase(amps, n, q, C64::from_polar(1.0, std::f64::consts::FRAC_PI_4)),
            Gate::Tdg(q) => {
                apply_phase(amps, n, q, C64::from_polar(1.0, -std::f64::consts::FRAC_PI_4))
            }
            Gate::Cnot { control, target } => apply_cnot(amps, n, control, target),
        }
    }
}

/// Applies the 2×2 matrix `m` (row-major) to qubit `q`.
pub fn apply_1q(amps: &mut [C64], n: usize, q: usize, m: [[C64; 2]; 2]) {
    let stride = 1usize << qubit_bit(n, q);
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        for i in base..base + stride {
            let a0 = amps[i];
            let a1 = amps[i + stride];
            amps[i] = m[0][0] * a0 + m[0][1] * a1;
            amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
        }
        base += 2 * stride;
    }
}

pub fn apply_x(amps: &mut [C64], n: usize, q: usize) {
    let mask = 1usize << qubit_bit(n, q);
    for i in 0..amps.len() {
        if i & mask == 0 {
            amps.swap(i, i | mask);
        }
    }
}

/// `diag(1, phase)` on qubit `q`.
pub fn apply_phase(amps: &mut [C64], n: usize, q: usize, phase: C64) {
    let mask = 1usize << qubit_bit(n, q);
    for (i, a) in amps.iter_mut().enumerate() {
        if i & mask != 0 {
            *a *= phase;
        }
    }
}

pub fn apply_hadamard_all(amps: &mut [C64], n: usize, qubits: impl IntoIterator<Item = usize>) {
    for q in qubits {
        Gate::H(q).apply(amps, n);
    }
}

pub fn apply_cnot(amps: &mut [C64], n: usize, control: usize, target: usize) {
    debug_assert_ne!(control, target);
    let cm = 1usize << qubit_bit(n, control);
    let tm = 1usize << qubit_bit(n, target);
    for i in 0..amps.len() {
        if i & cm != 0 && i & tm == 0 {
            amps.swap(i, i | tm);
        }
    }
}

/// Swaps qubits `a[k]` and `b[k]` for every `k` when `control` is one.
pub fn apply_cswap(amps: &mut [C64], n: usize, control: usize, a: &[usize], b: &[usize]) {
    debug_assert_eq!(a.len(), b.len());
    let cm = 1usize << qubit_bit(n, control);
    let pairs: Vec<(usize, usize)> =
        a.iter().zip(b).map(|(&x, &y)| (1usize << qubit_bit(n, x), 1usize << qubit_bit(n, y))).collect();
    let permute = |i: usize| {
        let mut j = i;
        for &(ma, mb) in &pairs {
            let ba = i & ma != 0;
            let bb = i & mb != 0;
            if ba != bb {
                j ^= ma | mb;
            }
        }
        j
    };
    for i in 0..amps.len() {
        if i & cm == 0 {
            continue;
        }
        let j = permute(i);
        if j > i {
            amps.swap(i, j);
        }
    }
}

/// Flips `target` when every control qubit holds its required value.
pub fn apply_mcx(amps: &mut [C64], n: usize, controls: &[(usize, bool)], target: usize) {
    let mut mask = 0usize;
    let mut want = 0usize;
    for &(q, v) in controls {
        let m = 1usize << qubit_bit(n, q);
        mask |= m;
        if v {
            want |= m;
        }
    }
    let tm = 1usize << qubit_bit(n, target);
    for i in 0..amps.len() {
        if i & tm == 0 && i & mask == want {
            amps.swap(i, i | tm);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(n: usize, x: usize) -> Vec<C64> {
        let mut v = vec![C64::new(0.0, 0.0); 1 << n];
        v[x] = 1.0.into();
        v
    }

    #[test]
    fn cnot_on_control_msb() {
        // |10⟩ -> |11⟩ with qubit 0 as control
        let mut v = basis(2, 0b10);
        apply_cnot(&mut v, 2, 0, 1);
        assert_eq!(v, basis(2, 0b11));
    }

    #[test]
    fn cswap_swaps_registers() {
        // control=1, a=|01⟩, b=|10⟩ on 5 qubits: 1 01 10 -> 1 10 01
        let mut v = basis(5, 0b10110);
        apply_cswap(&mut v, 5, 0, &[1, 2], &[3, 4]);
        assert_eq!(v, basis(5, 0b11001));
        let mut w = basis(5, 0b00110);
        apply_cswap(&mut w, 5, 0, &[1, 2], &[3, 4]);
        assert_eq!(w, basis(5, 0b00110));
    }

    #[test]
    fn open_controlled_x() {
        let mut v = basis(3, 0b000);
        apply_mcx(&mut v, 3, &[(1, false), (2, false)], 0);
        assert_eq!(v, basis(3, 0b100));
        let mut w = basis(3, 0b001);
        apply_mcx(&mut w, 3, &[(1, false), (2, false)], 0);
        assert_eq!(w, basis(3, 0b001));
    }

    #[test]
    fn t_squared_is_s() {
        let mut v = vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        Gate::T(0).apply(&mut v, 1);
        Gate::T(0).apply(&mut v, 1);
        assert!((v[1] - C64::new(0.0, 1.0)).norm() < 1e-15);
        Gate::Tdg(0).apply(&mut v, 1);
        Gate::Tdg(0).apply(&mut v, 1);
        assert!((v[1] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }
}
