use nalgebra::DMatrix;

use super::state::{norm_sqr, PureState};
use super::{check_capacity, check_dims, C64, MAX_QUBITS, UNITARY_TOL};
use crate::{Error, Result};

/// `2^n × 2^n` unitary matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOp {
    n: usize,
    mat: DMatrix<C64>,
}

/// `||M†M - I||_F`.
pub(crate) fn unitarity_defect(mat: &DMatrix<C64>) -> f64 {
    let prod = mat.adjoint() * mat;
    let dim = mat.nrows();
    let mut acc = 0.0;
    for c in 0..dim {
        for r in 0..dim {
            let target = if r == c { 1.0 } else { 0.0 };
            acc += (prod[(r, c)] - C64::new(target, 0.0)).norm_sqr();
        }
    }
    acc.sqrt()
}

impl UnitaryOp {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch { expected: mat.nrows(), found: mat.ncols() });
        }
        let dim = mat.nrows();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        let n = dim.trailing_zeros() as usize;
        check_capacity(n, MAX_QUBITS)?;
        let defect = unitarity_defect(&mat);
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary { defect });
        }
        Ok(Self { n, mat })
    }

    pub(crate) fn from_raw(n: usize, mat: DMatrix<C64>) -> Self {
        debug_assert_eq!(mat.nrows(), 1usize << n);
        Self { n, mat }
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_capacity(n, MAX_QUBITS)?;
        let dim = 1usize << n;
        Ok(Self { n, mat: DMatrix::identity(dim, dim) })
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::from_raw(1, DMatrix::from_row_slice(2, 2, &[
            C64::new(h, 0.0), C64::new(h, 0.0),
            C64::new(h, 0.0), C64::new(-h, 0.0),
        ]))
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self::from_raw(1, DMatrix::from_row_slice(2, 2, &[o, l, l, o]))
    }

    pub fn pauli_z() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self::from_raw(1, DMatrix::from_row_slice(2, 2, &[l, o, o, -l]))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn adjoint(&self) -> Self {
        Self { n: self.n, mat: self.mat.adjoint() }
    }

    /// `self · other`.
    pub fn compose(&self, other: &UnitaryOp) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self { n: self.n, mat: &self.mat * &other.mat })
    }

    /// `e^{iθ} · self`.
    pub fn with_phase(&self, theta: f64) -> Self {
        Self { n: self.n, mat: &self.mat * C64::from_polar(1.0, theta) }
    }

    /// Column `x`, i.e. `U|x⟩`.
    pub fn column(&self, x: usize) -> PureState {
        PureState::from_raw(self.n, self.mat.column(x).iter().copied().collect())
    }
}

/// Matrix–vector product `U|s⟩`, renormalized against rounding drift.
pub fn apply(u: &UnitaryOp, s: &PureState) -> Result<PureState> {
    check_dims(u.dim(), s.dim())?;
    let dim = u.dim();
    let mut out = vec![C64::new(0.0, 0.0); dim];
    for (c, a) in s.amplitudes().iter().enumerate() {
        if *a == C64::new(0.0, 0.0) {
            continue;
        }
        for (o, m) in out.iter_mut().zip(u.mat.column(c).iter()) {
            *o += m * a;
        }
    }
    let inv = norm_sqr(&out).sqrt().recip();
    out.iter_mut().for_each(|o| *o *= inv);
    Ok(PureState::from_raw(u.n, out))
}
