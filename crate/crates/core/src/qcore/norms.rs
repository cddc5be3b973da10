use nalgebra::linalg::Schur;

use super::unitary::UnitaryOp;
use super::{check_dims, C64, EIGEN_TOL};
use crate::{Error, Result};

/// `||U - V||_F`.
pub fn frobenius_distance(u: &UnitaryOp, v: &UnitaryOp) -> Result<f64> {
    check_dims(u.dim(), v.dim())?;
    Ok(u.matrix().iter().zip(v.matrix().iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt())
}

/// Eigenvalues of `UV†`, each checked to lie on the unit circle and then
/// renormalized onto it.
pub fn relative_eigenvalues(u: &UnitaryOp, v: &UnitaryOp) -> Result<Vec<C64>> {
    check_dims(u.dim(), v.dim())?;
    let w = u.matrix() * v.matrix().adjoint();
    let schur = Schur::try_new(w, 1e-14, 10_000).ok_or(Error::EigenNonConvergence)?;
    let eig = schur.eigenvalues().ok_or(Error::EigenNonConvergence)?;
    eig.iter()
        .map(|l| {
            let modulus = l.norm();
            if (modulus - 1.0).abs() > EIGEN_TOL {
                return Err(Error::EigenvalueOffCircle { modulus });
            }
            Ok(l / modulus)
        })
        .collect()
}

/// Diamond distance between the channels `ρ ↦ UρU†` and `ρ ↦ VρV†`.
///
/// With `λ_i` the eigenvalues of `UV†` and `d` the distance from the origin to
/// their convex hull, the distance is `2·sqrt(1 - d²)`.
pub fn diamond_distance_unitary(u: &UnitaryOp, v: &UnitaryOp) -> Result<f64> {
    let gap = polygon_distance_complement(&relative_eigenvalues(u, v)?);
    Ok(2.0 * gap.clamp(0.0, 1.0).sqrt())
}

fn cross(o: C64, a: C64, b: C64) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Convex hull (counter-clockwise, no repeated or collinear points).
fn convex_hull(points: &[C64]) -> Vec<C64> {
    let mut pts: Vec<C64> = points.to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup_by(|a, b| (*a - *b).norm() < 1e-13);
    if pts.len() <= 2 {
        return pts;
    }
    let mut hull: Vec<C64> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &C64>> =
            if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// `1 - d²` where `d` is the distance from 0 to the convex hull of `points`,
/// all of which lie on the unit circle.
///
/// On a chord between unit vectors `a` and `b`, the point `a + s(b - a)` has
/// squared modulus `1 - s(1 - s)|b - a|²`, which avoids cancellation when `d` is
/// close to one.
pub fn polygon_distance_complement(points: &[C64]) -> f64 {
    let hull = convex_hull(points);
    match hull.len() {
        0 | 1 => 0.0,
        2 => chord_complement(hull[0], hull[1]),
        len => {
            let inside = (0..len).all(|i| cross(hull[i], hull[(i + 1) % len], C64::new(0.0, 0.0)) >= -1e-15);
            if inside {
                return 1.0;
            }
            (0..len)
                .filter(|&i| cross(hull[i], hull[(i + 1) % len], C64::new(0.0, 0.0)) < 0.0)
                .map(|i| chord_complement(hull[i], hull[(i + 1) % len]))
                .fold(0.0, f64::max)
        }
    }
}

fn chord_complement(a: C64, b: C64) -> f64 {
    let e = b - a;
    let len2 = e.norm_sqr();
    if len2 == 0.0 {
        return 0.0;
    }
    let s = (-(a.re * e.re + a.im * e.im) / len2).clamp(0.0, 1.0);
    s * (1.0 - s) * len2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_global_phase() {
        let i = UnitaryOp::identity(2).unwrap();
        assert_eq!(diamond_distance_unitary(&i, &i).unwrap(), 0.0);
        let minus = i.with_phase(std::f64::consts::PI);
        assert!(diamond_distance_unitary(&i, &minus).unwrap().abs() < 1e-9);
        assert!((frobenius_distance(&i, &minus).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn identity_vs_z() {
        let i = UnitaryOp::identity(1).unwrap();
        let z = UnitaryOp::pauli_z();
        assert!((diamond_distance_unitary(&i, &z).unwrap() - 2.0).abs() < 1e-9);
        assert!((frobenius_distance(&i, &z).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn hull_of_arc() {
        // three points within a 90 degree arc: nearest chord is the outer one
        let pts: Vec<C64> = [0.0f64, 0.5, 1.0].iter().map(|&t| C64::from_polar(1.0, t * std::f64::consts::FRAC_PI_2)).collect();
        let gap = polygon_distance_complement(&pts);
        let expected = (std::f64::consts::FRAC_PI_4).sin().powi(2);
        assert!((gap - expected).abs() < 1e-12, "{gap} vs {expected}");
    }

    #[test]
    fn origin_inside_triangle() {
        let pts: Vec<C64> = (0..3).map(|k| C64::from_polar(1.0, k as f64 * 2.0 * std::f64::consts::PI / 3.0)).collect();
        assert_eq!(polygon_distance_complement(&pts), 1.0);
    }
}
