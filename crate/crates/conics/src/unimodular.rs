//! Completion of a primitive integer vector to an SL3(Z) matrix with small
//! entries, the vector sitting in the second column.
//!
//! Construction: sort so the smallest nonzero modulus comes first, solve
//! `a . y = 1` by extended gcd, reduce `y` by multiples of `(a2, -a1, 0)`
//! and `(a3, 0, -a1)` so the last two components have modulus at most
//! `|a1| / 2`, then assemble
//!
//! ```text
//!        | x2'   a1   -u |
//!    M = | -x1'  a2   -v |         x1' u + x2' v = x3,
//!        | 0     a3    h |         h = gcd(x1, x2),
//! ```
//!
//! whose determinant is `a . x = 1` by direct expansion. Undoing the sort
//! permutes rows; an odd permutation is repaired by negating the first
//! column, which leaves the second column untouched. Every entry is
//! bounded by `1 + ||a||_inf`, comfortably inside the advertised
//! `3 * max(1, ||a||_inf)`.

use crate::error::Result;
use crate::intmath::{ext_gcd, ext_gcd3, gcd_i128};
use crate::quadform::{require_primitive, UnimodularMatrix};

/// Entry bound guaranteed for the completion, validated by the property
/// suite: `||M||_inf <= ENTRY_BOUND_FACTOR * max(1, ||a||_inf)`.
pub const ENTRY_BOUND_FACTOR: i64 = 3;

/// Nearest integer to `n / d` (`d != 0`); ties round toward positive.
fn round_div(n: i128, d: i128) -> i128 {
    let da = d.abs();
    let q = n.div_euclid(da);
    let r = n.rem_euclid(da);
    let rounded = if 2 * r >= da { q + 1 } else { q };
    if d < 0 {
        -rounded
    } else {
        rounded
    }
}

/// Completes primitive `a` to `M` in SL3(Z) with second column `a`.
pub fn complete_to_sl3(a: &[i64; 3]) -> Result<UnimodularMatrix> {
    require_primitive(a)?;

    let nonzero = a.iter().filter(|&&c| c != 0).count();
    if nonzero == 1 {
        return Ok(signed_permutation(a));
    }

    // Sort positions: nonzero entries ascending by modulus, zeros last.
    let mut perm = [0usize, 1, 2];
    perm.sort_by_key(|&i| (a[i] == 0, a[i].abs()));
    let s: [i128; 3] = [a[perm[0]] as i128, a[perm[1]] as i128, a[perm[2]] as i128];
    debug_assert!(s[0] != 0);

    // a . y = 1
    let (g, y1, y2, y3) = ext_gcd3(s[0], s[1], s[2]);
    debug_assert_eq!(g, 1);

    // Reduce the last two components modulo a1.
    let t2 = round_div(y2, s[0]);
    let t3 = round_div(y3, s[0]);
    let mut x = [y1 + t2 * s[1] + t3 * s[2], y2 - t2 * s[0], y3 - t3 * s[0]];
    if x[0] == 0 && x[1] == 0 {
        x[0] += s[1];
        x[1] -= s[0];
    }
    debug_assert_eq!(s[0] * x[0] + s[1] * x[1] + s[2] * x[2], 1);

    let h = gcd_i128(x[0], x[1]) as i128;
    let (x1p, x2p) = (x[0] / h, x[1] / h);

    // x1' u + x2' v = x3 with both |u|, |v| small.
    let (u, v) = if x1p == 0 {
        (0, x[2] * x2p) // x2' = +-1
    } else {
        let (g2, p, q) = ext_gcd(x1p, x2p);
        debug_assert_eq!(g2, 1);
        let (u0, v0) = (p * x[2], q * x[2]);
        let k = round_div(v0, x1p);
        (u0 + k * x2p, v0 - k * x1p)
    };
    debug_assert_eq!(x1p * u + x2p * v, x[2]);

    let sorted = [[x2p, s[0], -u], [-x1p, s[1], -v], [0, s[2], h]];

    // Restore the original row order; an odd permutation flips the sign
    // of the determinant, repaired on the first column.
    let parity = permutation_parity(&perm);
    let mut rows = [[0i64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let val = if j == 0 && parity < 0 {
                -sorted[i][j]
            } else {
                sorted[i][j]
            };
            rows[perm[i]][j] = i64::try_from(val).expect("completion entry exceeds i64");
        }
    }
    let m = UnimodularMatrix::new(rows)?;
    debug_assert_eq!(m.column(1), *a);
    Ok(m)
}

fn permutation_parity(perm: &[usize; 3]) -> i32 {
    let mut inversions = 0;
    for i in 0..3 {
        for j in (i + 1)..3 {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Case of a single nonzero entry, necessarily +-1: a signed permutation.
fn signed_permutation(a: &[i64; 3]) -> UnimodularMatrix {
    let k = (0..3).find(|&i| a[i] != 0).expect("nonzero vector");
    let (i, j) = match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let mut m = [[0i64; 3]; 3];
    m[k][1] = a[k];
    m[i][0] = 1;
    m[j][2] = 1;
    if crate::quadform::det3(&m) != 1 {
        m[i][0] = -1;
    }
    UnimodularMatrix::new(m).expect("signed permutation has det 1")
}
