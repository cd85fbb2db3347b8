//! Search for a primitive integer zero of an isotropic ternary form.
//!
//! The search sweeps sup-norm radii `R = 1, 2, 4, ...` up to the cap and,
//! for each `(x, y)` in the square, solves the residual quadratic in `z`
//! with an exact integer square root. By Cassels' theorem an isotropic
//! form has a zero with `||xi||_inf` bounded by a constant multiple of the
//! coefficient height, so a cap of `3 * <Q>` (the default) makes a failed
//! search conclusive.

use crate::error::{Error, Result};
use crate::intmath::{gcd3_i64, perfect_sqrt};
use crate::quadform::TernaryQuadraticForm;

/// A primitive zero together with the radius at which the search stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimitiveZero {
    pub xi: [i64; 3],
    pub search_radius_used: i64,
}

/// Default search cap `3 * <Q>`, from the classical Cassels bound.
pub fn default_zero_cap(q: &TernaryQuadraticForm) -> i64 {
    3 * q.height()
}

/// Ordering key that makes the returned zero unique: smallest sup norm,
/// then `(|x|, |y|, |z|)` lexicographically, then nonnegative signs first.
fn tie_break_key(v: &[i64; 3]) -> ([i64; 4], [bool; 3]) {
    let norm = v.iter().map(|c| c.abs()).max().unwrap();
    (
        [norm, v[0].abs(), v[1].abs(), v[2].abs()],
        [v[0] < 0, v[1] < 0, v[2] < 0],
    )
}

/// Finds a primitive integer zero of minimal sup norm, up to `cap`.
pub fn find_primitive_zero(q: &TernaryQuadraticForm, cap: i64) -> Result<PrimitiveZero> {
    assert!(cap >= 1, "cap must be positive");
    let mut radius = 1i64;
    loop {
        if let Some(xi) = best_zero_within(q, radius) {
            return Ok(PrimitiveZero {
                xi,
                search_radius_used: radius,
            });
        }
        if radius >= cap {
            return Err(Error::ZeroNotFound {
                cap,
                conclusive: cap >= default_zero_cap(q),
            });
        }
        radius = (radius * 2).min(cap);
    }
}

/// Minimal zero with `||.||_inf <= r`, or `None`.
fn best_zero_within(q: &TernaryQuadraticForm, r: i64) -> Option<[i64; 3]> {
    let mut best: Option<[i64; 3]> = None;
    let mut consider = |v: [i64; 3]| {
        if v == [0, 0, 0] || v.iter().any(|c| c.abs() > r) {
            return;
        }
        if gcd3_i64(v[0], v[1], v[2]) != 1 {
            return;
        }
        debug_assert_eq!(q.evaluate(&v), 0);
        if best.is_none() || tie_break_key(&v) < tie_break_key(&best.unwrap()) {
            best = Some(v);
        }
    };
    for x in -r..=r {
        for y in -r..=r {
            // Q(x, y, z) = c002 z^2 + beta z + gamma
            let beta = q.c101 as i128 * x as i128 + q.c011 as i128 * y as i128;
            let gamma = q.c200 as i128 * x as i128 * x as i128
                + q.c110 as i128 * x as i128 * y as i128
                + q.c020 as i128 * y as i128 * y as i128;
            if q.c002 != 0 {
                let aa = q.c002 as i128;
                let disc = beta * beta - 4 * aa * gamma;
                if let Some(s) = perfect_sqrt(disc) {
                    for num in [-beta + s, -beta - s] {
                        if num % (2 * aa) == 0 {
                            if let Ok(z) = i64::try_from(num / (2 * aa)) {
                                consider([x, y, z]);
                            }
                        }
                    }
                }
            } else if beta != 0 {
                if gamma % beta == 0 {
                    if let Ok(z) = i64::try_from(-gamma / beta) {
                        consider([x, y, z]);
                    }
                }
            } else if gamma == 0 {
                // Q(x, y, .) vanishes identically: every z works.
                for z in -r..=r {
                    consider([x, y, z]);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(c: [i64; 6]) -> TernaryQuadraticForm {
        TernaryQuadraticForm::new(c[0], c[1], c[2], c[3], c[4], c[5]).unwrap()
    }

    #[test]
    fn q0_minimal_zero() {
        // x^2 - yz: radius-1 zeros include (0,1,0) and (0,0,1); the
        // tie-break picks (0,0,1) (smaller |y|).
        let q = form([1, 0, 0, 0, -1, 0]);
        let z = find_primitive_zero(&q, 10).unwrap();
        assert_eq!(z.xi, [0, 0, 1]);
        assert_eq!(z.search_radius_used, 1);
    }

    #[test]
    fn definite_form_not_found() {
        let q = form([1, 0, 0, 1, 0, 1]);
        match find_primitive_zero(&q, 10) {
            Err(Error::ZeroNotFound {
                cap: 10,
                conclusive,
            }) => assert!(conclusive),
            other => panic!("expected NotFound, got {other:?}"),
        }
        // with a cap below 3 * <Q> the failure is inconclusive
        match find_primitive_zero(&q, 2) {
            Err(Error::ZeroNotFound { conclusive, .. }) => assert!(!conclusive),
            other => panic!("expected NotFound, got {other:?}"),
        }
    }

    #[test]
    fn isotropic_diagonal() {
        // x^2 + y^2 - 2 z^2 has (1, 1, 1) as minimal zero.
        let q = form([1, 0, 0, 1, 0, -2]);
        let z = find_primitive_zero(&q, 10).unwrap();
        assert_eq!(z.xi, [1, 1, 1]);
    }

    #[test]
    fn zero_satisfies_invariants() {
        let forms = [
            [1, 0, 0, 0, -1, 0],
            [1, 3, 0, 0, 5, 7],
            [2, 1, -1, 0, 3, -5],
            [1, 0, 0, -2, 0, 1],
        ];
        for c in forms {
            let q = form(c);
            let cap = default_zero_cap(&q);
            let z = find_primitive_zero(&q, cap).unwrap();
            assert_eq!(q.evaluate(&z.xi), 0);
            assert_eq!(gcd3_i64(z.xi[0], z.xi[1], z.xi[2]), 1);
            let norm = z.xi.iter().map(|c| c.abs()).max().unwrap();
            assert!(norm <= z.search_radius_used);
        }
    }

    #[test]
    fn determinism() {
        let q = form([1, 3, 0, 0, 5, 7]);
        let a = find_primitive_zero(&q, 21).unwrap();
        let b = find_primitive_zero(&q, 21).unwrap();
        assert_eq!(a, b);
    }
}
