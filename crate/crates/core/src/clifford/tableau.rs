use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::symplectic::{symplectic_group_order, symplectic_rows, DigitSource, IndexDigits, RandomDigits};
use crate::qcore::{apply, check_capacity, check_dims, Bitstring, PureState, UnitaryOp, C64, MAX_QUBITS};
use crate::{Error, Result};

/// Hermitian Pauli `(-1)^sign · i^{|x∧z|} X^x Z^z`; bit `q` of each mask is qubit `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PauliRow {
    pub x: u64,
    pub z: u64,
    pub sign: bool,
}

impl PauliRow {
    fn symplectic_product(&self, other: &PauliRow) -> u32 {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) & 1
    }

    /// `out = P · src` on an `n`-qubit amplitude vector.
    pub(crate) fn apply_into(&self, n: usize, src: &[C64], out: &mut [C64]) {
        let xi = index_mask(self.x, n);
        let zi = index_mask(self.z, n);
        let mut phase = match (self.x & self.z).count_ones() % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        if self.sign {
            phase = -phase;
        }
        for (b, a) in src.iter().enumerate() {
            let v = if (zi & b).count_ones() & 1 == 1 { -phase * a } else { phase * a };
            out[b ^ xi] = v;
        }
    }
}

fn index_mask(mask: u64, n: usize) -> usize {
    let mut out = 0usize;
    for q in 0..n {
        if (mask >> q) & 1 == 1 {
            out |= 1 << (n - 1 - q);
        }
    }
    out
}

fn from_interleaved(row: u64, n: usize) -> (u64, u64) {
    let (mut x, mut z) = (0u64, 0u64);
    for q in 0..n {
        x |= ((row >> (2 * q)) & 1) << q;
        z |= ((row >> (2 * q + 1)) & 1) << q;
    }
    (x, z)
}

/// A Clifford modulo global phase: row `j` is `C X_j C†`, row `n + j` is `C Z_j C†`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CliffordTableau {
    n: usize,
    rows: Vec<PauliRow>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        rows.extend((0..n).map(|q| PauliRow { x: 1 << q, z: 0, sign: false }));
        rows.extend((0..n).map(|q| PauliRow { x: 0, z: 1 << q, sign: false }));
        Self { n, rows }
    }

    /// Single-qubit Hadamard: `X ↦ Z`, `Z ↦ X`.
    pub fn hadamard() -> Self {
        Self {
            n: 1,
            rows: vec![PauliRow { x: 0, z: 1, sign: false }, PauliRow { x: 1, z: 0, sign: false }],
        }
    }

    pub fn from_rows(n: usize, rows: Vec<PauliRow>) -> Result<Self> {
        if rows.len() != 2 * n {
            return Err(Error::DimensionMismatch { expected: 2 * n, found: rows.len() });
        }
        let t = Self { n, rows };
        if !t.is_symplectic() {
            return Err(Error::InvalidParameter("rows violate the symplectic form".into()));
        }
        Ok(t)
    }

    fn from_interleaved_rows(n: usize, interleaved: &[u64], phases: u64) -> Self {
        let mut rows = vec![PauliRow { x: 0, z: 0, sign: false }; 2 * n];
        for q in 0..n {
            let (x, z) = from_interleaved(interleaved[2 * q], n);
            rows[q] = PauliRow { x, z, sign: (phases >> q) & 1 == 1 };
            let (x, z) = from_interleaved(interleaved[2 * q + 1], n);
            rows[n + q] = PauliRow { x, z, sign: (phases >> (n + q)) & 1 == 1 };
        }
        Self { n, rows }
    }

    /// Class number `symplectic_index · 4^n + phases` in canonical order.
    pub fn from_index(n: usize, symplectic_index: u128, phases: u64) -> Self {
        let rows = symplectic_rows(n, &mut IndexDigits(symplectic_index));
        Self::from_interleaved_rows(n, &rows, phases)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[PauliRow] {
        &self.rows
    }

    /// `S Λ Sᵀ = Λ` with `Λ = [[0, I], [I, 0]]` in (x | z) layout.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        (0..2 * n).all(|i| {
            (i..2 * n).all(|j| {
                let want = u32::from(j == i + n && i < n);
                self.rows[i].symplectic_product(&self.rows[j]) == want
            })
        })
    }

    /// `2n × 2n` binary matrix; row `i` lists the x bits then the z bits.
    pub fn symplectic_matrix(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|r| {
                (0..self.n)
                    .map(|q| ((r.x >> q) & 1) as u8)
                    .chain((0..self.n).map(|q| ((r.z >> q) & 1) as u8))
                    .collect()
            })
            .collect()
    }

    pub fn phases(&self) -> Vec<u8> {
        self.rows.iter().map(|r| u8::from(r.sign)).collect()
    }
}

/// `|C_n / U(1)| = |Sp(2n, 2)| · 4^n`.
pub fn clifford_group_order(n: usize) -> Option<u128> {
    symplectic_group_order(n)?.checked_mul(1u128.checked_shl(2 * n as u32)?)
}

/// Exactly uniform Clifford (mod phase): uniform symplectic matrix, uniform signs.
pub fn sample_uniform_clifford<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CliffordTableau {
    sample_with(n, &mut RandomDigits(rng))
}

fn sample_with<D: DigitSource>(n: usize, digits: &mut D) -> CliffordTableau {
    let rows = symplectic_rows(n, digits);
    let lo = digits.digit(1 << n);
    let hi = digits.digit(1 << n);
    CliffordTableau::from_interleaved_rows(n, &rows, lo | (hi << n))
}

/// Dense unitary, unique up to global phase, whose conjugation action matches `c`.
///
/// Column 0 is the stabilizer state of `{C Z_j C†}`; column `x` is
/// `∏_j (C X_j C†)^{x_j}` applied to it.
pub fn tableau_to_unitary(c: &CliffordTableau) -> Result<UnitaryOp> {
    let n = c.n;
    check_capacity(n, MAX_QUBITS)?;
    let dim = 1usize << n;
    let mut v: Vec<C64> = (0..dim)
        .map(|b| C64::from_polar(1.0 + (b as f64 * 0.618_033_988_75).fract(), b as f64 * 2.399_963_229_7))
        .collect();
    if !project_onto_stabilizer(c, &mut v) {
        let found = (0..dim).find(|&b| {
            v.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
            v[b] = C64::new(1.0, 0.0);
            project_onto_stabilizer(c, &mut v)
        });
        debug_assert!(found.is_some());
    }
    let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);

    let mut mat = DMatrix::<C64>::zeros(dim, dim);
    mat.column_mut(0).iter_mut().zip(&v).for_each(|(m, a)| *m = *a);
    let mut buf = vec![C64::new(0.0, 0.0); dim];
    for x in 1..dim {
        let p = x.trailing_zeros() as usize;
        let q = n - 1 - p;
        let prev: Vec<C64> = mat.column(x ^ (1 << p)).iter().copied().collect();
        c.rows[q].apply_into(n, &prev, &mut buf);
        mat.column_mut(x).iter_mut().zip(&buf).for_each(|(m, a)| *m = *a);
    }
    Ok(UnitaryOp::from_raw(n, mat))
}

fn project_onto_stabilizer(c: &CliffordTableau, v: &mut [C64]) -> bool {
    let n = c.n;
    let mut buf = vec![C64::new(0.0, 0.0); v.len()];
    for g in &c.rows[n..] {
        g.apply_into(n, v, &mut buf);
        v.iter_mut().zip(&buf).for_each(|(a, b)| *a = (*a + b) * 0.5);
    }
    v.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-6
}

/// A Clifford basis `C` and the outcome `x` of measuring `C|ψ⟩` computationally.
///
/// `direction` is the post-measurement direction `C†|x⟩` (global phase arbitrary).
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub tableau: CliffordTableau,
    pub outcome: Bitstring,
    direction: PureState,
}

impl MeasurementRecord {
    /// Rebuilds the record, recomputing its direction.
    pub fn new(tableau: CliffordTableau, outcome: Bitstring) -> Result<Self> {
        let u = tableau_to_unitary(&tableau)?;
        if outcome.len != tableau.n || outcome.value >= u.dim() as u64 {
            return Err(Error::DimensionMismatch { expected: tableau.n, found: outcome.len });
        }
        let direction = row_conjugate(&u, outcome.value as usize);
        Ok(Self { tableau, outcome, direction })
    }

    pub fn n(&self) -> usize {
        self.tableau.n
    }

    pub fn direction(&self) -> &PureState {
        &self.direction
    }

    /// `|⟨x|C|φ⟩|²`.
    pub fn probability(&self, phi: &PureState) -> Result<f64> {
        Ok(self.direction.inner(phi)?.norm_sqr())
    }
}

fn row_conjugate(u: &UnitaryOp, x: usize) -> PureState {
    let amps = u.matrix().row(x).iter().map(|a| a.conj()).collect();
    PureState::normalized(amps).expect("unitary rows are unit vectors")
}

/// Applies `C` and measures computationally.
pub fn measure_in_clifford_basis<R: Rng + ?Sized>(
    s: &PureState,
    c: &CliffordTableau,
    rng: &mut R,
) -> Result<MeasurementRecord> {
    check_dims(1 << c.n, s.dim())?;
    let u = tableau_to_unitary(c)?;
    let rotated = apply(&u, s)?;
    let outcome = crate::qcore::measure_computational(&rotated, rng);
    let direction = row_conjugate(&u, outcome.value as usize);
    Ok(MeasurementRecord { tableau: c.clone(), outcome, direction })
}

#[derive(Serialize, Deserialize)]
struct TableauWire {
    n: usize,
    symplectic: Vec<String>,
    phases: String,
}

impl Serialize for CliffordTableau {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let to_str = |bits: &[u8]| bits.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect::<String>();
        TableauWire {
            n: self.n,
            symplectic: self.symplectic_matrix().iter().map(|r| to_str(r)).collect(),
            phases: to_str(&self.phases()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CliffordTableau {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let w = TableauWire::deserialize(d)?;
        let n = w.n;
        if w.symplectic.len() != 2 * n || w.phases.len() != 2 * n {
            return Err(D::Error::custom("tableau shape does not match n"));
        }
        let mut rows = Vec::with_capacity(2 * n);
        for (line, sign) in w.symplectic.iter().zip(w.phases.chars()) {
            let bits: Vec<bool> = line.chars().map(|c| c == '1').collect();
            if bits.len() != 2 * n {
                return Err(D::Error::custom("tableau row has wrong length"));
            }
            let mut x = 0u64;
            let mut z = 0u64;
            for q in 0..n {
                x |= u64::from(bits[q]) << q;
                z |= u64::from(bits[n + q]) << q;
            }
            rows.push(PauliRow { x, z, sign: sign == '1' });
        }
        CliffordTableau::from_rows(n, rows).map_err(D::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RecordWire {
    tableau: CliffordTableau,
    outcome: Bitstring,
}

impl Serialize for MeasurementRecord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RecordWire { tableau: self.tableau.clone(), outcome: self.outcome }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for MeasurementRecord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = RecordWire::deserialize(d)?;
        MeasurementRecord::new(w.tableau, w.outcome).map_err(serde::de::Error::custom)
    }
}
