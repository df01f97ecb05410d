//! Dichotomic qubit observables (Hermitian involutions with eigenvalues +-1),
//! their Bloch-vector form, measurement projectors, and the planar solver that
//! turns pairwise inner-product targets into concrete Bloch vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::{SPECTRAL_TOL, STRUCTURAL_TOL};

/// Real 3-vector r such that `r . (X, Y, Z)` is the associated observable.
/// Unit norm for every observable produced by this library.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Unit vector in the x-z plane at angle `theta` from the +z axis.
    pub fn planar(theta: f64) -> Self {
        Self::new(theta.sin(), 0.0, theta.cos())
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n < 1e-14 {
            None
        } else {
            Some(Self::new(self.x / n, self.y / n, self.z / n))
        }
    }
}

/// Measurement outcome label, +1 or -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub const BOTH: [Outcome; 2] = [Outcome::Plus, Outcome::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Outcome::Plus => 1.0,
            Outcome::Minus => -1.0,
        }
    }

    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }
}

/// A 2x2 Hermitian involution. When the operator is traceless (one +1 and one
/// -1 eigenvalue) its Bloch vector is carried alongside the matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DichotomicObservable {
    matrix: Mat2,
    bloch: Option<BlochVector>,
}

impl DichotomicObservable {
    /// Build `r . sigma` from a unit Bloch vector.
    pub fn from_bloch(r: BlochVector) -> Result<Self> {
        let norm = r.norm();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(Error::NotNormalized { norm });
        }
        let matrix = Mat2::new([
            [Complex64::new(r.z, 0.0), Complex64::new(r.x, -r.y)],
            [Complex64::new(r.x, r.y), Complex64::new(-r.z, 0.0)],
        ]);
        Ok(Self {
            matrix,
            bloch: Some(r),
        })
    }

    /// Validate a raw matrix as a dichotomic observable: Hermitian to 1e-12
    /// and an involution to 1e-10. Traceless inputs also get a Bloch vector.
    pub fn from_matrix(matrix: Mat2) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > STRUCTURAL_TOL {
            return Err(Error::NotHermitian { defect });
        }
        let involution_defect = (matrix * matrix).max_abs_diff(&Mat2::identity());
        if involution_defect > SPECTRAL_TOL {
            return Err(Error::NotInvolution {
                defect: involution_defect,
            });
        }
        let trace = matrix.trace().re;
        let bloch = if trace.abs() <= SPECTRAL_TOL {
            Some(BlochVector::new(
                matrix[(0, 1)].re,
                -matrix[(0, 1)].im,
                matrix[(0, 0)].re,
            ))
        } else {
            None
        };
        Ok(Self { matrix, bloch })
    }

    pub fn x() -> Self {
        Self::from_bloch(BlochVector::new(1.0, 0.0, 0.0)).expect("unit vector")
    }

    pub fn y() -> Self {
        Self::from_bloch(BlochVector::new(0.0, 1.0, 0.0)).expect("unit vector")
    }

    pub fn z() -> Self {
        Self::from_bloch(BlochVector::new(0.0, 0.0, 1.0)).expect("unit vector")
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.matrix
    }

    pub fn bloch(&self) -> Option<BlochVector> {
        self.bloch
    }

    /// True when the spectrum splits as one +1 and one -1 eigenvalue.
    pub fn is_rank_split(&self) -> bool {
        self.bloch.is_some()
    }

    /// Projector onto the given outcome, `(I + sign * O) / 2`.
    ///
    /// The closed formula is used rather than an eigendecomposition: the two
    /// agree for involutions and the formula fixes no eigenvector phases.
    pub fn projector(&self, outcome: Outcome) -> Mat2 {
        (Mat2::identity() + self.matrix.scale(outcome.sign())).scale(0.5)
    }
}

/// `O1 O2 + O2 O1`. For Bloch observables this equals `2 (r1 . r2) I`.
pub fn anticommutator(o1: &DichotomicObservable, o2: &DichotomicObservable) -> Mat2 {
    *o1.matrix() * *o2.matrix() + *o2.matrix() * *o1.matrix()
}

/// A required inner product `r_i . r_j = dot` between two of the vectors
/// produced by [`planar_vectors_from_gram`].
#[derive(Clone, Copy, Debug)]
pub struct GramTarget {
    pub i: usize,
    pub j: usize,
    pub dot: f64,
}

impl GramTarget {
    pub fn new(i: usize, j: usize, dot: f64) -> Self {
        Self { i, j, dot }
    }
}

/// Find `count` unit vectors in the x-z plane, `r_i = (sin t_i, 0, cos t_i)`,
/// satisfying every pairwise inner-product target to 1e-10, with the first
/// angle pinned to `anchor`.
///
/// In the plane each target reads `cos(t_i - t_j) = dot`, so angles are placed
/// one at a time with a two-branch depth-first search (the `+arccos` branch is
/// tried first, which reproduces the conventional angle sets for the chained
/// and three-setting constructions given their anchors).
pub fn planar_vectors_from_gram(
    count: usize,
    anchor: f64,
    targets: &[GramTarget],
) -> Result<Vec<BlochVector>> {
    const GRAM_TOL: f64 = 1e-10;

    if count == 0 {
        return Err(Error::InvalidParameter(
            "at least one vector is required".into(),
        ));
    }
    for t in targets {
        if t.i >= count || t.j >= count || t.i == t.j {
            return Err(Error::InvalidParameter(format!(
                "target indices ({}, {}) out of range for {count} vectors",
                t.i, t.j
            )));
        }
        if t.dot.abs() > 1.0 + STRUCTURAL_TOL {
            return Err(Error::InfeasibleGram {
                detail: format!("|r_{} . r_{}| = {} exceeds 1", t.i, t.j, t.dot.abs()),
            });
        }
    }

    let mut angles = vec![0.0f64; count];
    angles[0] = anchor;
    let mut violation: Option<String> = None;

    fn place(
        k: usize,
        angles: &mut [f64],
        targets: &[GramTarget],
        violation: &mut Option<String>,
    ) -> bool {
        let count = angles.len();
        if k == count {
            return true;
        }
        let constraints: Vec<(usize, f64)> = targets
            .iter()
            .filter_map(|t| match (t.i, t.j) {
                (i, j) if i == k && j < k => Some((j, t.dot)),
                (i, j) if j == k && i < k => Some((i, t.dot)),
                _ => None,
            })
            .collect();
        if constraints.is_empty() {
            *violation = Some(format!(
                "vector {k} has no inner-product target linking it to an earlier vector"
            ));
            return false;
        }
        let (base_j, base_dot) = constraints[0];
        let gamma = base_dot.clamp(-1.0, 1.0).acos();
        for candidate in [angles[base_j] + gamma, angles[base_j] - gamma] {
            let mut ok = true;
            for &(j, dot) in &constraints {
                let achieved = (candidate - angles[j]).cos();
                if (achieved - dot).abs() > GRAM_TOL {
                    *violation = Some(format!(
                        "target r_{k} . r_{j} = {dot} is violated (achieved {achieved})"
                    ));
                    ok = false;
                    break;
                }
            }
            if ok {
                angles[k] = candidate;
                if place(k + 1, angles, targets, violation) {
                    return true;
                }
            }
        }
        false
    }

    if !place(1, &mut angles, targets, &mut violation) {
        return Err(Error::InfeasibleGram {
            detail: violation.unwrap_or_else(|| "no consistent angle assignment".into()),
        });
    }

    for t in targets {
        let achieved = (angles[t.i] - angles[t.j]).cos();
        if (achieved - t.dot).abs() > GRAM_TOL {
            return Err(Error::InfeasibleGram {
                detail: format!(
                    "target r_{} . r_{} = {} is violated (achieved {achieved})",
                    t.i, t.j, t.dot
                ),
            });
        }
    }

    Ok(angles.into_iter().map(BlochVector::planar).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn bloch_constructors_match_paulis() {
        assert!(DichotomicObservable::x()
            .matrix()
            .max_abs_diff(&Mat2::pauli_x())
            .eq(&0.0));
        assert!(DichotomicObservable::y()
            .matrix()
            .max_abs_diff(&Mat2::pauli_y())
            .eq(&0.0));
        assert!(DichotomicObservable::z()
            .matrix()
            .max_abs_diff(&Mat2::pauli_z())
            .eq(&0.0));
    }

    #[test]
    fn from_matrix_recovers_bloch_vector() {
        let theta = 0.77f64;
        let o = DichotomicObservable::from_bloch(BlochVector::planar(theta)).unwrap();
        let rebuilt = DichotomicObservable::from_matrix(*o.matrix()).unwrap();
        let r = rebuilt.bloch().unwrap();
        assert!((r.x - theta.sin()).abs() <= 1e-12);
        assert!(r.y.abs() <= 1e-12);
        assert!((r.z - theta.cos()).abs() <= 1e-12);
    }

    #[test]
    fn identity_is_an_involution_without_bloch_vector() {
        let o = DichotomicObservable::from_matrix(Mat2::identity()).unwrap();
        assert!(o.bloch().is_none());
        assert!(!o.is_rank_split());
    }

    #[test]
    fn from_matrix_rejects_non_involutions() {
        let m = Mat2::pauli_x() + Mat2::pauli_z();
        assert!(matches!(
            DichotomicObservable::from_matrix(m),
            Err(Error::NotInvolution { .. })
        ));
    }

    #[test]
    fn from_bloch_rejects_non_unit_vectors() {
        assert!(matches!(
            DichotomicObservable::from_bloch(BlochVector::new(0.5, 0.0, 0.0)),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn projector_of_z_plus_is_diag_1_0() {
        let p = DichotomicObservable::z().projector(Outcome::Plus);
        assert!(p.max_abs_diff(&Mat2::from_real([[1.0, 0.0], [0.0, 0.0]])) <= STRUCTURAL_TOL);
    }

    #[test]
    fn projector_of_x_plus_is_half_ones() {
        let p = DichotomicObservable::x().projector(Outcome::Plus);
        assert!(p.max_abs_diff(&Mat2::from_real([[0.5, 0.5], [0.5, 0.5]])) <= STRUCTURAL_TOL);
    }

    #[test]
    fn rotated_minus_projector_matches_symbolic_expansion() {
        // For O = cos(u) Z + sin(u) X the minus projector expands with
        // a = cos(u) - 1 and b = sin(u) into [[a^2, ab], [ab, b^2]] / (a^2+b^2).
        let u = PI / 5.0;
        let o = DichotomicObservable::from_bloch(BlochVector::planar(u)).unwrap();
        let got = o.projector(Outcome::Minus);
        let (a, b) = (u.cos() - 1.0, u.sin());
        let d = a * a + b * b;
        let expected = Mat2::from_real([[a * a / d, a * b / d], [a * b / d, b * b / d]]);
        assert!(got.max_abs_diff(&expected) <= STRUCTURAL_TOL);
    }

    #[test]
    fn anticommutator_of_orthogonal_paulis_vanishes() {
        let ac = anticommutator(&DichotomicObservable::x(), &DichotomicObservable::z());
        assert!(ac.max_abs_diff(&Mat2::zero()) <= STRUCTURAL_TOL);
    }

    #[test]
    fn chained_neighbours_anticommute_to_2cos_pi_over_n() {
        for n in 2..=6usize {
            let step = PI / n as f64;
            for k in 0..(n - 1) {
                let a =
                    DichotomicObservable::from_bloch(BlochVector::planar(k as f64 * step)).unwrap();
                let b =
                    DichotomicObservable::from_bloch(BlochVector::planar((k + 1) as f64 * step))
                        .unwrap();
                let expected = Mat2::identity().scale(2.0 * step.cos());
                assert!(anticommutator(&a, &b).max_abs_diff(&expected) <= STRUCTURAL_TOL);
            }
        }
    }

    #[test]
    fn gisin_three_setting_targets_give_the_conventional_angles() {
        let vectors = planar_vectors_from_gram(
            3,
            PI / 3.0,
            &[
                GramTarget::new(0, 1, 0.5),
                GramTarget::new(1, 2, 0.5),
                GramTarget::new(0, 2, -0.5),
            ],
        )
        .unwrap();
        let expected = [PI / 3.0, 2.0 * PI / 3.0, PI];
        for (v, theta) in vectors.iter().zip(expected) {
            assert!((v.x - theta.sin()).abs() <= 1e-10);
            assert!((v.z - theta.cos()).abs() <= 1e-10);
            assert!(v.y.abs() <= 1e-14);
        }
    }

    #[test]
    fn orthogonality_target_gives_quarter_turn() {
        let vectors = planar_vectors_from_gram(2, 0.0, &[GramTarget::new(0, 1, 0.0)]).unwrap();
        assert!((vectors[0].z - 1.0).abs() <= 1e-12);
        assert!((vectors[1].x - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn chained_four_setting_targets_give_quarter_pi_ladder() {
        let c = (PI / 4.0).cos();
        let vectors = planar_vectors_from_gram(
            4,
            0.0,
            &[
                GramTarget::new(0, 1, c),
                GramTarget::new(1, 2, c),
                GramTarget::new(2, 3, c),
                GramTarget::new(0, 3, -c),
            ],
        )
        .unwrap();
        for (i, v) in vectors.iter().enumerate() {
            let theta = i as f64 * PI / 4.0;
            assert!((v.x - theta.sin()).abs() <= 1e-10);
            assert!((v.z - theta.cos()).abs() <= 1e-10);
        }
    }

    #[test]
    fn infeasible_targets_report_the_violated_constraint() {
        let err = planar_vectors_from_gram(
            3,
            0.0,
            &[
                GramTarget::new(0, 1, 0.9),
                GramTarget::new(1, 2, 0.9),
                GramTarget::new(0, 2, -0.9),
            ],
        )
        .unwrap_err();
        assert!(matches!(err, Error::InfeasibleGram { .. }));
    }

    #[test]
    fn disconnected_vector_is_rejected() {
        let err = planar_vectors_from_gram(3, 0.0, &[GramTarget::new(0, 1, 0.5)]).unwrap_err();
        assert!(matches!(err, Error::InfeasibleGram { .. }));
    }

    #[test]
    fn out_of_range_dot_is_rejected() {
        let err = planar_vectors_from_gram(2, 0.0, &[GramTarget::new(0, 1, 1.2)]).unwrap_err();
        assert!(matches!(err, Error::InfeasibleGram { .. }));
    }

    fn unit_bloch() -> impl Strategy<Value = BlochVector> {
        (-1.0f64..1.0, 0.0f64..(2.0 * PI)).prop_map(|(z, phi)| {
            let s = (1.0 - z * z).sqrt();
            BlochVector::new(s * phi.cos(), s * phi.sin(), z)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn bloch_observables_square_to_identity(r in unit_bloch()) {
            let o = DichotomicObservable::from_bloch(r).unwrap();
            let sq = *o.matrix() * *o.matrix();
            prop_assert!(sq.max_abs_diff(&Mat2::identity()) <= SPECTRAL_TOL);
            let [lo, hi] = o.matrix().hermitian_eigenvalues().unwrap();
            prop_assert!((lo + 1.0).abs() <= SPECTRAL_TOL);
            prop_assert!((hi - 1.0).abs() <= SPECTRAL_TOL);
        }

        #[test]
        fn projectors_are_complete_orthogonal_and_idempotent(r in unit_bloch()) {
            let o = DichotomicObservable::from_bloch(r).unwrap();
            let plus = o.projector(Outcome::Plus);
            let minus = o.projector(Outcome::Minus);
            prop_assert!((plus + minus).max_abs_diff(&Mat2::identity()) <= STRUCTURAL_TOL);
            prop_assert!((plus * plus).max_abs_diff(&plus) <= STRUCTURAL_TOL);
            prop_assert!((minus * minus).max_abs_diff(&minus) <= STRUCTURAL_TOL);
            prop_assert!((plus * minus).max_abs_diff(&Matrix::zero()) <= STRUCTURAL_TOL);
        }

        #[test]
        fn anticommutator_equals_twice_dot_product(r1 in unit_bloch(), r2 in unit_bloch()) {
            let o1 = DichotomicObservable::from_bloch(r1).unwrap();
            let o2 = DichotomicObservable::from_bloch(r2).unwrap();
            let expected = Mat2::identity().scale(2.0 * r1.dot(&r2));
            prop_assert!(anticommutator(&o1, &o2).max_abs_diff(&expected) <= STRUCTURAL_TOL);
        }
    }
}
