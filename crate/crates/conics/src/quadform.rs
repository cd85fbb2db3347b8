//! Exact-integer ternary quadratic forms, their invariants and unimodular
//! transformation.
//!
//! A form is stored by its six coefficients
//! `c200 x^2 + c110 xy + c101 xz + c020 y^2 + c011 yz + c002 z^2`.
//! The canonical integral matrix attached to it is the *doubled* Gram
//! matrix `A` with `A[i][i] = 2 * (square coefficient)` and off-diagonal
//! entries equal to the cross coefficients, so `x . A x = 2 Q(x)` holds
//! over the integers with no half-integral entries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmath::{gcd_u128, is_primitive};

/// A nonsingular integer quadratic form in three variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TernaryQuadraticForm {
    pub c200: i64,
    pub c110: i64,
    pub c101: i64,
    pub c020: i64,
    pub c011: i64,
    pub c002: i64,
}

/// A form with no `y^2` term, so that `(0,1,0)` lies on the conic:
/// `Q = a x^2 + b xy + d xz + e yz + f z^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpecialConic {
    pub a: i64,
    pub b: i64,
    pub d: i64,
    pub e: i64,
    pub f: i64,
}

/// An integer 3x3 matrix of determinant +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnimodularMatrix {
    m: [[i64; 3]; 3],
}

impl TernaryQuadraticForm {
    /// Validates the two type invariants: not all coefficients zero, and
    /// nonsingularity of the doubled Gram matrix.
    pub fn new(c200: i64, c110: i64, c101: i64, c020: i64, c011: i64, c002: i64) -> Result<Self> {
        let q = TernaryQuadraticForm {
            c200,
            c110,
            c101,
            c020,
            c011,
            c002,
        };
        if [c200, c110, c101, c020, c011, c002] == [0; 6] {
            return Err(Error::ZeroForm);
        }
        if q.gram_determinant() == 0 {
            return Err(Error::SingularForm);
        }
        Ok(q)
    }

    pub fn coefficients(&self) -> [i64; 6] {
        [
            self.c200, self.c110, self.c101, self.c020, self.c011, self.c002,
        ]
    }

    /// The doubled Gram matrix `A`, symmetric with `x . A x = 2 Q(x)`.
    pub fn gram_doubled(&self) -> [[i64; 3]; 3] {
        [
            [2 * self.c200, self.c110, self.c101],
            [self.c110, 2 * self.c020, self.c011],
            [self.c101, self.c011, 2 * self.c002],
        ]
    }

    /// Determinant of the doubled Gram matrix; the canonical integral
    /// discriminant invariant. For a special conic this equals `-2 * Delta`.
    pub fn gram_determinant(&self) -> i128 {
        det3(&self.gram_doubled())
    }

    /// gcd of the absolute values of all nine 2x2 minors of the doubled
    /// Gram matrix. Invariant under unimodular transformation.
    pub fn delta_gcd_minors(&self) -> u128 {
        let a = self.gram_doubled();
        let mut g: u128 = 0;
        for i in 0..3 {
            for j in 0..3 {
                let m = minor2(&a, i, j);
                g = gcd_u128(g, m.unsigned_abs());
            }
        }
        debug_assert!(g > 0, "all minors zero implies a singular form");
        g
    }

    /// Maximum modulus of the six coefficients.
    pub fn height(&self) -> i64 {
        self.coefficients()
            .iter()
            .map(|c| c.abs())
            .max()
            .expect("six coefficients")
    }

    /// Exact value `Q(x)`.
    pub fn evaluate(&self, x: &[i64; 3]) -> i128 {
        let (u, v, w) = (x[0] as i128, x[1] as i128, x[2] as i128);
        self.c200 as i128 * u * u
            + self.c110 as i128 * u * v
            + self.c101 as i128 * u * w
            + self.c020 as i128 * v * v
            + self.c011 as i128 * v * w
            + self.c002 as i128 * w * w
    }

    /// The substituted form `x -> Q(Mx)`. Nonsingularity, `|Delta|` and
    /// `delta` are preserved since `det M = 1`.
    pub fn transform(&self, m: &UnimodularMatrix) -> TernaryQuadraticForm {
        let cols: Vec<[i128; 3]> = (0..3)
            .map(|j| [m.m[0][j] as i128, m.m[1][j] as i128, m.m[2][j] as i128])
            .collect();
        let a = self.gram_doubled();
        // B = M^T A M; coefficient of x_i x_j (i < j) is B[i][j], of x_i^2 is B[i][i] / 2.
        let bilinear = |u: &[i128; 3], v: &[i128; 3]| -> i128 {
            let mut s = 0i128;
            for i in 0..3 {
                for j in 0..3 {
                    s += u[i] * a[i][j] as i128 * v[j];
                }
            }
            s
        };
        let to_i64 = |v: i128| -> i64 {
            i64::try_from(v).expect("transformed coefficient exceeds i64; height out of contract")
        };
        let q = TernaryQuadraticForm {
            c200: to_i64(bilinear(&cols[0], &cols[0]) / 2),
            c110: to_i64(bilinear(&cols[0], &cols[1])),
            c101: to_i64(bilinear(&cols[0], &cols[2])),
            c020: to_i64(bilinear(&cols[1], &cols[1]) / 2),
            c011: to_i64(bilinear(&cols[1], &cols[2])),
            c002: to_i64(bilinear(&cols[2], &cols[2]) / 2),
        };
        debug_assert_eq!(q.gram_determinant(), self.gram_determinant());
        q
    }

    /// Reinterpret as a special conic when the `y^2` coefficient vanishes.
    pub fn as_special(&self) -> Option<SpecialConic> {
        (self.c020 == 0)
            .then(|| SpecialConic::new(self.c200, self.c110, self.c101, self.c011, self.c002).ok())
            .flatten()
    }
}

impl SpecialConic {
    pub fn new(a: i64, b: i64, d: i64, e: i64, f: i64) -> Result<Self> {
        let s = SpecialConic { a, b, d, e, f };
        if s.discriminant() == 0 {
            return Err(Error::DegenerateSpecialConic);
        }
        Ok(s)
    }

    /// `Delta = a e^2 - d e b + f b^2`; nonzero by the type invariant, and
    /// related to the doubled Gram matrix by `det A = -2 Delta`.
    pub fn discriminant(&self) -> i128 {
        let (a, b, d, e, f) = (
            self.a as i128,
            self.b as i128,
            self.d as i128,
            self.e as i128,
            self.f as i128,
        );
        a * e * e - d * e * b + f * b * b
    }

    /// gcd(b, e); positive since `(b, e) = (0, 0)` would force `Delta = 0`.
    pub fn gcd_be(&self) -> u64 {
        crate::intmath::gcd_i64(self.b, self.e)
    }

    pub fn as_form(&self) -> TernaryQuadraticForm {
        TernaryQuadraticForm {
            c200: self.a,
            c110: self.b,
            c101: self.d,
            c020: 0,
            c011: self.e,
            c002: self.f,
        }
    }

    pub fn height(&self) -> i64 {
        [self.a, self.b, self.d, self.e, self.f]
            .iter()
            .map(|c| c.abs())
            .max()
            .expect("five coefficients")
    }

    pub fn evaluate(&self, x: &[i64; 3]) -> i128 {
        self.as_form().evaluate(x)
    }
}

impl UnimodularMatrix {
    pub fn new(m: [[i64; 3]; 3]) -> Result<Self> {
        let entries: [[i64; 3]; 3] = m;
        let d = det3(&entries);
        if d != 1 {
            return Err(Error::NotUnimodular { det: d });
        }
        Ok(UnimodularMatrix { m: entries })
    }

    pub fn identity() -> Self {
        UnimodularMatrix {
            m: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        }
    }

    pub fn entries(&self) -> &[[i64; 3]; 3] {
        &self.m
    }

    pub fn column(&self, j: usize) -> [i64; 3] {
        [self.m[0][j], self.m[1][j], self.m[2][j]]
    }

    /// Maximum modulus of the nine entries.
    pub fn sup_norm(&self) -> i64 {
        self.m
            .iter()
            .flatten()
            .map(|e| e.abs())
            .max()
            .expect("nine entries")
    }

    pub fn mul_vector(&self, x: &[i64; 3]) -> [i64; 3] {
        let mut out = [0i64; 3];
        for i in 0..3 {
            let mut s: i128 = 0;
            for j in 0..3 {
                s += self.m[i][j] as i128 * x[j] as i128;
            }
            out[i] = i64::try_from(s).expect("matrix-vector product exceeds i64");
        }
        out
    }

    pub fn mul_matrix(&self, other: &UnimodularMatrix) -> UnimodularMatrix {
        let mut out = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s: i128 = 0;
                for k in 0..3 {
                    s += self.m[i][k] as i128 * other.m[k][j] as i128;
                }
                out[i][j] = i64::try_from(s).expect("matrix product exceeds i64");
            }
        }
        UnimodularMatrix { m: out }
    }

    /// Inverse, again unimodular: the adjugate, since `det = 1`.
    pub fn inverse(&self) -> UnimodularMatrix {
        let m = &self.m;
        let mut adj = [[0i64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let cof = minor2_i64(m, j, i) * if (i + j) % 2 == 0 { 1 } else { -1 };
                adj[i][j] = cof;
            }
        }
        debug_assert_eq!(det3(&adj), 1);
        UnimodularMatrix { m: adj }
    }
}

/// Determinant of an integer 3x3 matrix, exact in `i128`.
pub fn det3(m: &[[i64; 3]; 3]) -> i128 {
    let a = |i: usize, j: usize| m[i][j] as i128;
    a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
        - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
        + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
}

/// 2x2 minor of `m` obtained by deleting row `i` and column `j`.
fn minor2(m: &[[i64; 3]; 3], i: usize, j: usize) -> i128 {
    let r: Vec<usize> = (0..3).filter(|&r| r != i).collect();
    let c: Vec<usize> = (0..3).filter(|&c| c != j).collect();
    m[r[0]][c[0]] as i128 * m[r[1]][c[1]] as i128 - m[r[0]][c[1]] as i128 * m[r[1]][c[0]] as i128
}

fn minor2_i64(m: &[[i64; 3]; 3], i: usize, j: usize) -> i64 {
    i64::try_from(minor2(m, i, j)).expect("minor exceeds i64")
}

/// Validates primitivity of an integer vector, as required by the modules
/// that consume primitive zeros.
pub fn require_primitive(v: &[i64; 3]) -> Result<()> {
    if *v == [0, 0, 0] {
        return Err(Error::ZeroVector);
    }
    if !is_primitive(v) {
        return Err(Error::NotPrimitive {
            gcd: crate::intmath::gcd3_i64(v[0], v[1], v[2]),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn q0() -> TernaryQuadraticForm {
        // x^2 - yz
        TernaryQuadraticForm::new(1, 0, 0, 0, -1, 0).unwrap()
    }

    pub(crate) fn q1() -> TernaryQuadraticForm {
        // x^2 + 3xy + 5yz + 7z^2
        TernaryQuadraticForm::new(1, 3, 0, 0, 5, 7).unwrap()
    }

    #[test]
    fn gram_doubled_examples() {
        assert_eq!(q0().gram_doubled(), [[2, 0, 0], [0, 0, -1], [0, -1, 0]]);
        assert_eq!(q1().gram_doubled(), [[2, 3, 0], [3, 0, 5], [0, 5, 14]]);
    }

    #[test]
    fn zero_form_rejected() {
        assert!(matches!(
            TernaryQuadraticForm::new(0, 0, 0, 0, 0, 0),
            Err(Error::ZeroForm)
        ));
    }

    #[test]
    fn singular_form_rejected() {
        // x^2 is singular as a ternary form.
        assert!(matches!(
            TernaryQuadraticForm::new(1, 0, 0, 0, 0, 0),
            Err(Error::SingularForm)
        ));
    }

    #[test]
    fn discriminant_special_examples() {
        let s0 = SpecialConic::new(1, 0, 0, -1, 0).unwrap();
        assert_eq!(s0.discriminant(), 1);
        let s1 = SpecialConic::new(1, 3, 0, 5, 7).unwrap();
        assert_eq!(s1.discriminant(), 88);
        // degenerate: only e nonzero with a = 0 gives Delta = 0
        assert!(SpecialConic::new(0, 0, 0, 1, 0).is_err());
    }

    #[test]
    fn gram_det_is_minus_two_delta() {
        for (a, b, d, e, f) in [(1, 0, 0, -1, 0), (1, 3, 0, 5, 7), (2, -3, 5, 1, -4)] {
            if let Ok(s) = SpecialConic::new(a, b, d, e, f) {
                assert_eq!(s.as_form().gram_determinant(), -2 * s.discriminant());
            }
        }
    }

    #[test]
    fn delta_gcd_minors_examples() {
        assert_eq!(q0().delta_gcd_minors(), 1);
        assert_eq!(q1().delta_gcd_minors(), 1);
        let doubled = TernaryQuadraticForm::new(2, 0, 0, 0, -2, 0).unwrap();
        assert_eq!(doubled.delta_gcd_minors(), 4);
    }

    #[test]
    fn height_examples() {
        assert_eq!(q0().height(), 1);
        assert_eq!(q1().height(), 7);
        let scaled = TernaryQuadraticForm::new(2, 6, 0, 0, 10, 14).unwrap();
        assert_eq!(scaled.height(), 14);
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(q0().evaluate(&[1, 1, 1]), 0);
        assert_eq!(q0().evaluate(&[2, 4, 1]), 0);
        assert_eq!(q1().evaluate(&[1, 1, 1]), 16);
    }

    #[test]
    fn transform_identity() {
        let m = UnimodularMatrix::identity();
        assert_eq!(q1().transform(&m), q1());
    }

    #[test]
    fn transform_shear_expansion() {
        // (x,y,z) -> (x+y, y, z): x^2 - yz becomes x^2 + 2xy + y^2 - yz.
        let m = UnimodularMatrix::new([[1, 1, 0], [0, 1, 0], [0, 0, 1]]).unwrap();
        let t = q0().transform(&m);
        assert_eq!(t, TernaryQuadraticForm::new(1, 2, 0, 1, -1, 0).unwrap());
        assert_eq!(t.gram_determinant().unsigned_abs(), 2);
        assert_eq!(t.gram_determinant(), q0().gram_determinant());
    }

    #[test]
    fn transform_signed_swap_keeps_invariants() {
        // det +1 permutation-with-sign swapping y and z.
        let m = UnimodularMatrix::new([[1, 0, 0], [0, 0, -1], [0, 1, 0]]).unwrap();
        let t = q0().transform(&m);
        assert_eq!(t.gram_determinant(), q0().gram_determinant());
        assert_eq!(t.delta_gcd_minors(), q0().delta_gcd_minors());
        assert_eq!(t.c011, 1); // yz term intact up to sign
    }

    #[test]
    fn transform_matches_substitution() {
        let m = UnimodularMatrix::new([[1, 2, 0], [0, 1, -1], [1, 3, 0]]);
        let m = match m {
            Ok(m) => m,
            Err(_) => UnimodularMatrix::new([[1, 2, 0], [0, 1, -1], [0, 3, 1]]).unwrap(),
        };
        let t = q1().transform(&m);
        for x in [[1, 0, 0], [0, 1, 0], [3, -2, 5], [7, 7, -1], [-4, 9, 2]] {
            assert_eq!(t.evaluate(&x), q1().evaluate(&m.mul_vector(&x)));
        }
    }

    #[test]
    fn height_growth_bound() {
        let m = UnimodularMatrix::new([[1, 2, 0], [0, 1, 0], [3, 1, 1]]).unwrap();
        let t = q1().transform(&m);
        let bound = 18 * q1().height() * m.sup_norm() * m.sup_norm();
        assert!(t.height() <= bound);
    }

    #[test]
    fn unimodular_rejects_other_determinants() {
        assert!(matches!(
            UnimodularMatrix::new([[1, 0, 0], [0, 1, 0], [0, 0, -1]]),
            Err(Error::NotUnimodular { det: -1 })
        ));
        assert!(UnimodularMatrix::new([[2, 0, 0], [0, 1, 0], [0, 0, 1]]).is_err());
    }

    #[test]
    fn inverse_roundtrip() {
        let m = UnimodularMatrix::new([[1, 2, 3], [0, 1, 4], [0, 0, 1]]).unwrap();
        let id = m.mul_matrix(&m.inverse());
        assert_eq!(id, UnimodularMatrix::identity());
    }
}
