//! Norms isometric to the supremum norm: `||x|| = ||g x||_inf` for an
//! invertible matrix `g` with exact rational entries.
//!
//! Exactness matters here: the counters compare `||x||` against integer
//! (or rational) bounds, so each row of `g` is pre-scaled to an integer
//! vector together with its common denominator. A comparison
//! `||x|| <= num/den` then becomes three integer inequalities and the
//! lattice enumerations stay rigorous.
//!
//! The constant `K0 = 1 + sup ||x||_inf / ||x||` is computed in closed
//! form as one plus the maximum absolute row sum of `g^{-1}` (the
//! inf-to-inf operator norm). A sampling oracle in the tests confirms the
//! identity.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::quadform::UnimodularMatrix;

pub type Rat = Ratio<i128>;

/// Row of `g` scaled to integers: the test `|row . x| <= den * bound`
/// is exact for integer `x` and rational bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ScaledRow {
    n: [i128; 3],
    den: i128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsometricNorm {
    g: [[Rat; 3]; 3],
    rows: [ScaledRow; 3],
    k0: Rat,
}

fn lcm_i128(a: i128, b: i128) -> i128 {
    (a / crate::intmath::gcd_i128(a, b) as i128) * b
}

fn det3_rat(m: &[[Rat; 3]; 3]) -> Rat {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inverse3_rat(m: &[[Rat; 3]; 3]) -> Option<[[Rat; 3]; 3]> {
    let det = det3_rat(m);
    if det.is_zero() {
        return None;
    }
    let minor = |i: usize, j: usize| -> Rat {
        let r: Vec<usize> = (0..3).filter(|&r| r != i).collect();
        let c: Vec<usize> = (0..3).filter(|&c| c != j).collect();
        m[r[0]][c[0]] * m[r[1]][c[1]] - m[r[0]][c[1]] * m[r[1]][c[0]]
    };
    let mut inv = [[Rat::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
            inv[i][j] = minor(j, i) * Rat::from_integer(sign) / det;
        }
    }
    Some(inv)
}

impl IsometricNorm {
    /// Builds the norm from the matrix `g`; rejects singular matrices.
    pub fn from_matrix(g: [[Rat; 3]; 3]) -> Result<Self> {
        let inv = inverse3_rat(&g).ok_or(Error::SingularNormMatrix)?;
        let mut rows = [ScaledRow { n: [0; 3], den: 1 }; 3];
        for i in 0..3 {
            let den = g[i].iter().fold(1i128, |acc, r| lcm_i128(acc, *r.denom()));
            let mut n = [0i128; 3];
            for j in 0..3 {
                n[j] = g[i][j].numer() * (den / g[i][j].denom());
            }
            rows[i] = ScaledRow { n, den };
        }
        // K0 - 1 is the max absolute row sum of g^{-1}.
        let mut sup = Rat::zero();
        for row in &inv {
            let s: Rat = row.iter().map(|r| r.abs()).sum();
            if s > sup {
                sup = s;
            }
        }
        Ok(IsometricNorm {
            g,
            rows,
            k0: sup + Rat::from_integer(1),
        })
    }

    /// The supremum norm: `g` is the identity.
    pub fn sup() -> Self {
        let mut g = [[Rat::zero(); 3]; 3];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = Rat::from_integer(1);
        }
        IsometricNorm::from_matrix(g).expect("identity is invertible")
    }

    pub fn matrix(&self) -> &[[Rat; 3]; 3] {
        &self.g
    }

    pub fn matrix_f64(&self) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = rat_f64(self.g[i][j]);
            }
        }
        out
    }

    /// `||x|| = max_i |(g x)_i|` for a real vector.
    pub fn value(&self, x: &[f64; 3]) -> f64 {
        let g = self.matrix_f64();
        (0..3)
            .map(|i| (g[i][0] * x[0] + g[i][1] * x[1] + g[i][2] * x[2]).abs())
            .fold(0.0, f64::max)
    }

    pub fn value_int(&self, x: &[i64; 3]) -> f64 {
        self.value(&[x[0] as f64, x[1] as f64, x[2] as f64])
    }

    /// `K0 = 1 + sup_{x != 0} ||x||_inf / ||x||`, exact.
    pub fn k0(&self) -> Rat {
        self.k0
    }

    pub fn k0_f64(&self) -> f64 {
        rat_f64(self.k0)
    }

    /// Exact test `||x|| <= num/den` for an integer vector.
    pub fn le_bound(&self, x: &[i64; 3], num: i128, den: i128) -> bool {
        self.le_bound_wide(&[x[0] as i128, x[1] as i128, x[2] as i128], num, den)
    }

    /// Exact test `||v|| <= num/den` for an `i128` vector (used on the
    /// parametrizing vectors `q(s,t)`). Requires `den > 0`.
    pub fn le_bound_wide(&self, v: &[i128; 3], num: i128, den: i128) -> bool {
        debug_assert!(den > 0);
        if num < 0 {
            return false;
        }
        for row in &self.rows {
            let dot = row.n[0] * v[0] + row.n[1] * v[1] + row.n[2] * v[2];
            // |dot| / row.den <= num / den, cross-multiplied (both dens > 0)
            if dot.abs() * den > row.den * num {
                return false;
            }
        }
        true
    }

    /// The scaled integer rows `(n_i, den_i)` with
    /// `||x|| <= T  iff  |n_i . x| <= den_i T` for all `i`.
    pub fn scaled_rows(&self) -> [([i128; 3], i128); 3] {
        [
            (self.rows[0].n, self.rows[0].den),
            (self.rows[1].n, self.rows[1].den),
            (self.rows[2].n, self.rows[2].den),
        ]
    }

    /// The norm `x -> ||M x||`, used when a form is pulled back through a
    /// unimodular substitution.
    pub fn compose_with_matrix(&self, m: &UnimodularMatrix) -> IsometricNorm {
        let e = m.entries();
        let mut gm = [[Rat::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let mut s = Rat::zero();
                for k in 0..3 {
                    s += self.g[i][k] * Rat::from_integer(e[k][j] as i128);
                }
                gm[i][j] = s;
            }
        }
        IsometricNorm::from_matrix(gm).expect("g M is invertible for unimodular M")
    }
}

pub fn rat_f64(r: Rat) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Parses a norm entry that is either an integer or a `"p/q"` string.
pub fn parse_rat(text: &str) -> Result<Rat> {
    let bad = |_| Error::InvalidNormEntry(text.to_string());
    match text.split_once('/') {
        None => Ok(Rat::from_integer(text.trim().parse::<i128>().map_err(bad)?)),
        Some((p, q)) => {
            let num = p.trim().parse::<i128>().map_err(bad)?;
            let den = q.trim().parse::<i128>().map_err(bad)?;
            if den == 0 {
                return Err(Error::InvalidNormEntry(text.to_string()));
            }
            Ok(Rat::new(num, den))
        }
    }
}
