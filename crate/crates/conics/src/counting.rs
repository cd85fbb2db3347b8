//! Exact point and lattice-parameter counters.
//!
//! Two independent routes count the primitive zeros of height at most `B`:
//!
//! * `count_n_brute` enumerates the box `||x||_inf <= (K0 - 1) B`,
//!   pivoting on a variable with nonzero square coefficient and solving
//!   the residual quadratic with exact integer square roots;
//! * `count_n_param` finds a small zero, completes it to an SL3(Z)
//!   matrix, transforms to the special shape and counts parameter pairs
//!   (`count_n_script`), then applies an exact correction set: the
//!   tangent parameter (whose point is the base point itself), the base
//!   point, the `t = 0` line point, and the two-vectors-per-point factor.
//!
//! The parameter-side region `||q(s,t)|| <= T` is scanned column by
//! column: for fixed `s` the admissible `t` form the intersection of at
//! most three quadratic band conditions, solved exactly with integer
//! root isolation, so only genuine candidates are visited. Every counter
//! stays inside the rigorous bounding box
//! `r^2 = 3 ||adj(Pi)||_inf (K0 - 1) T / |Delta|`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmath::{gcd3_i128, gcd3_i64, gcd_i64, isqrt, perfect_sqrt};
use crate::norms::{rat_f64, IsometricNorm, Rat};
use crate::parametrize::ParamSystem;
use crate::quadform::{SpecialConic, TernaryQuadraticForm};
use crate::unimodular::complete_to_sl3;
use crate::zeros::{default_zero_cap, find_primitive_zero};

/// Number of primitive vectors represented by one projective point
/// (`x` and `-x`). Measured against the brute-force oracle by the test
/// suite rather than assumed; see `vectors_per_point_measured` there.
pub const VECTORS_PER_POINT: u64 = 2;

/// Default cap on `B` for the brute-force counter.
pub const DEFAULT_BRUTE_CAP: u64 = 10_000;

/// Enumeration guard: parameter boxes beyond this radius are refused.
pub const MAX_BOX_RADIUS: i64 = 2_000_000_000;

/// One labelled exact correction applied by the parametrization counter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub label: String,
    pub value: i64,
}

/// Outcome of a counting run; `n_brute = n_param` whenever both ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub spec_version: String,
    pub b: u64,
    pub n_brute: Option<u64>,
    pub n_param: Option<u64>,
    pub script_n: Option<u64>,
    pub corrections: Vec<Correction>,
    pub elapsed_ms_brute: Option<u64>,
    pub elapsed_ms_param: Option<u64>,
}

/// Version tag carried by all JSON outputs.
pub const SPEC_VERSION: &str = "1.0.0";

// ---------------------------------------------------------------------------
// Bounding box (region V and its dilates)
// ---------------------------------------------------------------------------

/// Rigorous integer radius: every `(s, t)` with `t > 0` and
/// `||q(s,t)|| <= t_num / t_den` satisfies `max(|s|, |t|) <= r`.
pub fn bounding_box_radius(
    sys: &ParamSystem,
    norm: &IsometricNorm,
    t_num: i128,
    t_den: i128,
) -> Result<i64> {
    assert!(t_num >= 0 && t_den > 0);
    let k0m1 = norm.k0() - Rat::from_integer(1);
    // r^2 = 3 ||adj(Pi)|| (K0 - 1) T / |Delta|, rounded up.
    let num = 3 * sys.adj_pi_sup() * k0m1.numer() * t_num;
    let den = k0m1.denom() * t_den * sys.delta().abs();
    let r2 = num.div_euclid(den) + 1;
    let r = isqrt(r2 as u128) as i128 + 1;
    if r > MAX_BOX_RADIUS as i128 {
        return Err(Error::CapExceeded {
            what: "parameter box radius",
            value: r as u128,
            cap: MAX_BOX_RADIUS as u128,
        });
    }
    Ok(r as i64)
}

/// The real bounding-box radius `sqrt(3 ||adj(Pi)|| (K0-1) T / |Delta|)`
/// of the dilated region `{t > 0, ||q(s,t)|| <= T}`.
pub fn bounding_box(s: &SpecialConic, norm: &IsometricNorm, t: f64) -> f64 {
    let sys = ParamSystem::new(s);
    let k0m1 = rat_f64(norm.k0()) - 1.0;
    (3.0 * sys.adj_pi_sup() as f64 * k0m1 * t / sys.delta().abs() as f64).sqrt()
}

// ---------------------------------------------------------------------------
// Exact integer interval engine
// ---------------------------------------------------------------------------

fn floor_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    a.div_euclid(b)
}

fn ceil_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    -((-a).div_euclid(b))
}

fn eval_quad(c2: i128, c1: i128, c0: i128, t: i128) -> i128 {
    (c2 * t + c1) * t + c0
}

/// Integer solutions of `lo <= c2 t^2 + c1 t + c0 <= hi` inside `clip`,
/// as up to two disjoint sorted intervals.
///
/// For `c2 > 0` the roots of `P = K` are isolated exactly: with
/// `v = 2 c2 t + c1` and discriminant `D`, the relation `t <= root` is
/// the monotone integer predicate `v <= +-sqrt(D)`, tested as
/// `v <= 0 || v^2 <= D` (resp. `v <= 0 && v^2 >= D`), so the isqrt-based
/// initial guesses are corrected by provably terminating steps.
fn quad_band_intervals(
    c2: i128,
    c1: i128,
    c0: i128,
    lo: i128,
    hi: i128,
    clip: (i128, i128),
    out: &mut Vec<(i128, i128)>,
) {
    out.clear();
    if clip.0 > clip.1 || lo > hi {
        return;
    }
    if c2 < 0 {
        let mut inner = Vec::new();
        quad_band_intervals(-c2, -c1, -c0, -hi, -lo, clip, &mut inner);
        *out = inner;
        return;
    }
    if c2 == 0 {
        if c1 == 0 {
            if lo <= c0 && c0 <= hi {
                out.push(clip);
            }
            return;
        }
        let (a, b) = if c1 > 0 {
            (ceil_div(lo - c0, c1), floor_div(hi - c0, c1))
        } else {
            (ceil_div(c0 - hi, -c1), floor_div(c0 - lo, -c1))
        };
        let (a, b) = (a.max(clip.0), b.min(clip.1));
        if a <= b {
            out.push((a, b));
        }
        return;
    }

    // c2 > 0: P <= hi exactly on [r-, r+].
    let d_hi = c1 * c1 - 4 * c2 * (c0 - hi);
    if d_hi < 0 {
        return;
    }
    let sd = isqrt(d_hi as u128) as i128;
    // t >= r-  <=>  v >= -sqrt(d_hi)  <=>  v >= 0 or v^2 <= d_hi
    let above_lo_root = |t: i128| {
        let v = 2 * c2 * t + c1;
        v >= 0 || v * v <= d_hi
    };
    let mut a = ceil_div(-c1 - sd, 2 * c2);
    while a > clip.0 && above_lo_root(a - 1) {
        a -= 1;
    }
    while !above_lo_root(a) {
        a += 1;
    }
    // t <= r+  <=>  v <= sqrt(d_hi)  <=>  v <= 0 or v^2 <= d_hi
    let below_hi_root = |t: i128| {
        let v = 2 * c2 * t + c1;
        v <= 0 || v * v <= d_hi
    };
    let mut b = floor_div(-c1 + sd, 2 * c2);
    while b < clip.1 && below_hi_root(b + 1) {
        b += 1;
    }
    while !below_hi_root(b) {
        b -= 1;
    }
    let (a, b) = (a.max(clip.0), b.min(clip.1));
    if a > b {
        return;
    }

    // P >= lo everywhere unless d_lo > 0, in which case it fails exactly
    // on the open interval (l-, l+).
    let d_lo = c1 * c1 - 4 * c2 * (c0 - lo);
    if d_lo <= 0 {
        out.push((a, b));
        return;
    }
    let sd2 = isqrt(d_lo as u128) as i128;
    // t <= l-  <=>  v <= -sqrt(d_lo)  <=>  v <= 0 and v^2 >= d_lo
    let left_of_gap = |t: i128| {
        let v = 2 * c2 * t + c1;
        v <= 0 && v * v >= d_lo
    };
    let mut le = floor_div(-c1 - sd2, 2 * c2);
    while !left_of_gap(le) {
        le -= 1;
    }
    while left_of_gap(le + 1) {
        le += 1;
    }
    // t >= l+  <=>  v >= sqrt(d_lo)  <=>  v >= 0 and v^2 >= d_lo
    let right_of_gap = |t: i128| {
        let v = 2 * c2 * t + c1;
        v >= 0 && v * v >= d_lo
    };
    let mut rs = ceil_div(-c1 + sd2, 2 * c2);
    while !right_of_gap(rs) {
        rs += 1;
    }
    while right_of_gap(rs - 1) {
        rs -= 1;
    }
    debug_assert!(eval_quad(c2, c1, c0, le) >= lo && eval_quad(c2, c1, c0, rs) >= lo);
    if a <= b.min(le) {
        out.push((a, b.min(le)));
    }
    if a.max(rs) <= b {
        out.push((a.max(rs), b));
    }
}

fn intersect_intervals(a: &[(i128, i128)], b: &[(i128, i128)], out: &mut Vec<(i128, i128)>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo <= hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
}

/// Per-row quadratics `H_i(s, t) = A_i s^2 + B_i s t + C_i t^2` with
/// `||q(s,t)|| <= T  iff  t_den |H_i| <= den_i t_num` for all rows.
#[derive(Debug, Clone, Copy)]
struct RegionScan {
    rows: [(i128, i128, i128, i128); 3], // (A_i, B_i, C_i, bound_i), pre-scaled
    radius: i64,
}

impl RegionScan {
    fn new(
        sys: &ParamSystem,
        norm: &IsometricNorm,
        t_num: i128,
        t_den: i128,
    ) -> Result<RegionScan> {
        let radius = bounding_box_radius(sys, norm, t_num, t_den)?;
        let pi = sys.pi();
        let mut rows = [(0i128, 0i128, 0i128, 0i128); 3];
        for (i, (n, den)) in norm.scaled_rows().iter().enumerate() {
            let a: i128 = (0..3).map(|j| n[j] * pi[j][0] as i128).sum();
            let b: i128 = (0..3).map(|j| n[j] * pi[j][1] as i128).sum();
            let c: i128 = (0..3).map(|j| n[j] * pi[j][2] as i128).sum();
            rows[i] = (t_den * a, t_den * b, t_den * c, den * t_num);
        }
        Ok(RegionScan { rows, radius })
    }

    /// Admissible `t >= 1` for this column, clipped to the box.
    fn t_intervals(&self, s: i128, sets: &mut ScanBuffers) {
        let clip = (1i128, self.radius as i128);
        sets.acc.clear();
        sets.acc.push(clip);
        for &(a, b, c, bound) in &self.rows {
            quad_band_intervals(c, b * s, a * s * s, -bound, bound, clip, &mut sets.band);
            intersect_intervals(&sets.acc, &sets.band, &mut sets.tmp);
            std::mem::swap(&mut sets.acc, &mut sets.tmp);
            if sets.acc.is_empty() {
                return;
            }
        }
    }
}

#[derive(Default, Clone)]
struct ScanBuffers {
    acc: Vec<(i128, i128)>,
    band: Vec<(i128, i128)>,
    tmp: Vec<(i128, i128)>,
}

// ---------------------------------------------------------------------------
// Lattice-parameter counters M, M*, script N
// ---------------------------------------------------------------------------

fn normalize_residue(x: i64, n: u64) -> i128 {
    (x as i128).rem_euclid(n as i128)
}

/// `M_{sigma,tau}(T, n)`: lattice points `(s, t) = (sigma, tau) mod n`,
/// `t > 0`, `||q(s, t)|| <= T`. `T = t_num / t_den >= 0`.
pub fn count_m(
    s: &SpecialConic,
    norm: &IsometricNorm,
    t_num: i128,
    t_den: i128,
    n: u64,
    sigma: i64,
    tau: i64,
) -> Result<u64> {
    let sys = ParamSystem::new(s);
    count_m_inner(&sys, norm, t_num, t_den, n, sigma, tau, false)
}

/// `M*_{sigma,tau}(T, n)`: as `count_m` with `gcd(s, t) = 1`.
pub fn count_m_star(
    s: &SpecialConic,
    norm: &IsometricNorm,
    t_num: i128,
    t_den: i128,
    n: u64,
    sigma: i64,
    tau: i64,
) -> Result<u64> {
    let sys = ParamSystem::new(s);
    count_m_inner(&sys, norm, t_num, t_den, n, sigma, tau, true)
}

pub(crate) fn count_m_inner(
    sys: &ParamSystem,
    norm: &IsometricNorm,
    t_num: i128,
    t_den: i128,
    n: u64,
    sigma: i64,
    tau: i64,
    primitive_only: bool,
) -> Result<u64> {
    assert!(n >= 1, "modulus must be positive");
    if t_num < 0 {
        return Ok(0);
    }
    let scan = RegionScan::new(sys, norm, t_num, t_den)?;
    let nn = n as i128;
    let sig = normalize_residue(sigma, n);
    let tav = normalize_residue(tau, n);
    let r = scan.radius as i128;
    let mut bufs = ScanBuffers::default();
    let mut count = 0u64;
    // First column congruent to sigma at or above -r.
    let mut s = -r + (sig - (-r)).rem_euclid(nn);
    while s <= r {
        scan.t_intervals(s, &mut bufs);
        for &(lo, hi) in &bufs.acc {
            // First t >= lo congruent to tau mod n.
            let t0 = lo + (tav - lo).rem_euclid(nn);
            if t0 > hi {
                continue;
            }
            if primitive_only {
                let mut t = t0;
                while t <= hi {
                    if gcd_i64(s as i64, t as i64) == 1 {
                        count += 1;
                    }
                    t += nn;
                }
            } else {
                count += ((hi - t0) / nn + 1) as u64;
            }
        }
        s += nn;
    }
    Ok(count)
}

/// Outcome of the primitive-parameter count for `script N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScriptCount {
    pub count: u64,
    /// Whether the tangent parameter itself satisfied the height bound
    /// (its point is the base point, so the pipeline must not count it as
    /// a fresh point).
    pub tangent_counted: bool,
}

/// `script N(Q, B)`: primitive pairs `(s, t)`, `t > 0`, with
/// `||q(s, t)|| <= gcd(q(s, t)) * B`, enumerated inside the rigorous box
/// for `T = lambda_max * B`.
pub fn count_n_script(s: &SpecialConic, norm: &IsometricNorm, b: u64) -> Result<ScriptCount> {
    assert!(b >= 1, "B must be positive");
    let sys = ParamSystem::new(s);
    let lambda_max = sys.lambda_max()? as i128;
    let t_num = lambda_max * b as i128;
    let scan = RegionScan::new(&sys, norm, t_num, 1)?;
    let tangent = sys.tangent_parameter();
    let r = scan.radius as i128;
    let bb = b as i128;

    let result = (-r..=r)
        .into_par_iter()
        .fold(
            || (0u64, false, ScanBuffers::default()),
            |(mut count, mut tangent_counted, mut bufs), s| {
                scan.t_intervals(s, &mut bufs);
                for &(lo, hi) in &bufs.acc {
                    for t in lo..=hi {
                        if gcd_i64(s as i64, t as i64) != 1 {
                            continue;
                        }
                        let q = sys.q(s, t);
                        let lambda = gcd3_i128(q[0], q[1], q[2]) as i128;
                        if norm.le_bound_wide(&q, lambda * bb, 1) {
                            count += 1;
                            if (s, t) == (tangent.0 as i128, tangent.1 as i128) {
                                tangent_counted = true;
                            }
                        }
                    }
                }
                (count, tangent_counted, bufs)
            },
        )
        .map(|(c, tc, _)| (c, tc))
        .reduce(|| (0, false), |a, b| (a.0 + b.0, a.1 || b.1));

    Ok(ScriptCount {
        count: result.0,
        tangent_counted: result.1,
    })
}

// ---------------------------------------------------------------------------
// Brute-force counter
// ---------------------------------------------------------------------------

/// `N(Q, B)` by exhaustive enumeration of the box `||x||_inf <= (K0-1) B`:
/// the independent oracle side of the pipeline. Default cap `10^4` on `B`.
pub fn count_n_brute(q: &TernaryQuadraticForm, norm: &IsometricNorm, b: u64) -> Result<u64> {
    count_n_brute_capped(q, norm, b, DEFAULT_BRUTE_CAP)
}

pub fn count_n_brute_capped(
    q: &TernaryQuadraticForm,
    norm: &IsometricNorm,
    b: u64,
    cap: u64,
) -> Result<u64> {
    assert!(b >= 1, "B must be positive");
    if b > cap {
        return Err(Error::CapExceeded {
            what: "brute-force height bound",
            value: b as u128,
            cap: cap as u128,
        });
    }
    let k0m1 = norm.k0() - Rat::from_integer(1);
    let r_i128 = floor_div(k0m1.numer() * b as i128, *k0m1.denom());
    let r = i64::try_from(r_i128).map_err(|_| Error::CapExceeded {
        what: "brute-force box radius",
        value: r_i128 as u128,
        cap: i64::MAX as u128,
    })?;

    // Pivot on a variable with nonzero square coefficient when possible;
    // otherwise the residual in the pivot is linear (bilinear form).
    let perm: [usize; 3] = if q.c002 != 0 {
        [0, 1, 2]
    } else if q.c020 != 0 {
        [2, 0, 1]
    } else if q.c200 != 0 {
        [1, 2, 0]
    } else {
        [0, 1, 2]
    };
    let c = coeff_matrix(q);
    let (iu, iv, ip) = (perm[0], perm[1], perm[2]);
    let cuu = c[iu][iu];
    let cuv = c[iu.min(iv)][iu.max(iv)];
    let cvv = c[iv][iv];
    let cup = c[iu.min(ip)][iu.max(ip)];
    let cvp = c[iv.min(ip)][iv.max(ip)];
    let cpp = c[ip][ip];

    let count = (-r..=r)
        .into_par_iter()
        .map(|u| {
            let mut local = 0u64;
            for v in -r..=r {
                let beta = cup as i128 * u as i128 + cvp as i128 * v as i128;
                let gamma = cuu as i128 * u as i128 * u as i128
                    + cuv as i128 * u as i128 * v as i128
                    + cvv as i128 * v as i128 * v as i128;
                let mut consider = |p: i128| {
                    if p.unsigned_abs() > r.unsigned_abs() as u128 {
                        return;
                    }
                    let mut x = [0i64; 3];
                    x[iu] = u;
                    x[iv] = v;
                    x[ip] = p as i64;
                    if gcd3_i64(x[0], x[1], x[2]) == 1 && norm.le_bound(&x, b as i128, 1) {
                        debug_assert_eq!(q.evaluate(&x), 0);
                        local += 1;
                    }
                };
                if cpp != 0 {
                    let aa = cpp as i128;
                    let disc = beta * beta - 4 * aa * gamma;
                    if let Some(sq) = perfect_sqrt(disc) {
                        consider_roots(beta, sq, aa, &mut consider);
                    }
                } else if beta != 0 {
                    if gamma % beta == 0 {
                        consider(-gamma / beta);
                    }
                } else if gamma == 0 {
                    for p in -(r as i128)..=(r as i128) {
                        consider(p);
                    }
                }
            }
            local
        })
        .sum();
    Ok(count)
}

fn consider_roots(beta: i128, sq: i128, aa: i128, consider: &mut impl FnMut(i128)) {
    let denom = 2 * aa;
    for num in [-beta + sq, -beta - sq] {
        if num % denom == 0 {
            consider(num / denom);
        }
        if sq == 0 {
            break;
        }
    }
}

fn coeff_matrix(q: &TernaryQuadraticForm) -> [[i64; 3]; 3] {
    // upper-triangular storage: [i][i] squares, [i][j] (i<j) cross terms
    let mut c = [[0i64; 3]; 3];
    c[0][0] = q.c200;
    c[0][1] = q.c110;
    c[0][2] = q.c101;
    c[1][1] = q.c020;
    c[1][2] = q.c011;
    c[2][2] = q.c002;
    c
}

// ---------------------------------------------------------------------------
// Parametrization pipeline
// ---------------------------------------------------------------------------

/// Everything the pipeline produced, for reporting and reuse.
#[derive(Debug, Clone)]
pub struct ParamCount {
    pub n: u64,
    pub script_n: u64,
    pub corrections: Vec<Correction>,
    pub zero: [i64; 3],
    pub transformed: SpecialConic,
}

/// `N(Q, B)` through the parametrization: find a small zero, move it to
/// `(0,1,0)` by an SL3(Z) substitution, count parameters, correct exactly.
pub fn count_n_param(q: &TernaryQuadraticForm, norm: &IsometricNorm, b: u64) -> Result<ParamCount> {
    let zero = find_primitive_zero(q, default_zero_cap(q))?;
    count_n_param_with_zero(q, norm, b, &zero.xi)
}

pub fn count_n_param_with_zero(
    q: &TernaryQuadraticForm,
    norm: &IsometricNorm,
    b: u64,
    xi: &[i64; 3],
) -> Result<ParamCount> {
    let m = complete_to_sl3(xi)?;
    let qt = q.transform(&m);
    let special = qt.as_special().ok_or(Error::SingularForm)?;
    let norm_t = norm.compose_with_matrix(&m);

    let script = count_n_script(&special, &norm_t, b)?;

    let mut corrections = Vec::new();
    corrections.push(Correction {
        label: "parameter_points".into(),
        value: script.count as i64,
    });

    // Tangent parameter: its point is the base point, not a new one.
    let tangent_sub = if script.tangent_counted { 1 } else { 0 };
    corrections.push(Correction {
        label: "tangent_parameter_excluded".into(),
        value: -tangent_sub,
    });

    // Base point (0,1,0) in transformed coordinates, i.e. xi itself.
    let xi_in = norm_t.le_bound(&[0, 1, 0], b as i128, 1);
    corrections.push(Correction {
        label: "base_point_in_ball".into(),
        value: xi_in as i64,
    });

    // The t = 0 line meets the conic in (b, -a, 0)/gcd, a point carried
    // by no t > 0 parameter. When b = 0 that line is the tangent.
    let mut z0_add = 0i64;
    if special.b != 0 {
        let g = gcd_i64(special.a, special.b) as i64;
        let z0 = [special.b / g, -special.a / g, 0];
        debug_assert_eq!(special.evaluate(&z0), 0);
        if norm_t.le_bound(&z0, b as i128, 1) {
            z0_add = 1;
        }
    }
    corrections.push(Correction {
        label: "z_axis_line_point_in_ball".into(),
        value: z0_add,
    });

    let points = script.count as i64 - tangent_sub + xi_in as i64 + z0_add;
    debug_assert!(points >= 0);
    corrections.push(Correction {
        label: "vectors_per_point".into(),
        value: VECTORS_PER_POINT as i64,
    });

    Ok(ParamCount {
        n: VECTORS_PER_POINT * points as u64,
        script_n: script.count,
        corrections,
        zero: *xi,
        transformed: special,
    })
}

/// Which counters a report should run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountMethod {
    Brute,
    Param,
    Both,
}

/// Runs the requested counters and assembles the report with timings.
pub fn count_report(
    q: &TernaryQuadraticForm,
    norm: &IsometricNorm,
    b: u64,
    method: CountMethod,
    brute_cap: u64,
) -> Result<CountReport> {
    let mut report = CountReport {
        spec_version: SPEC_VERSION.into(),
        b,
        n_brute: None,
        n_param: None,
        script_n: None,
        corrections: Vec::new(),
        elapsed_ms_brute: None,
        elapsed_ms_param: None,
    };
    if matches!(method, CountMethod::Brute | CountMethod::Both) {
        let start = std::time::Instant::now();
        report.n_brute = Some(count_n_brute_capped(q, norm, b, brute_cap)?);
        report.elapsed_ms_brute = Some(start.elapsed().as_millis() as u64);
    }
    if matches!(method, CountMethod::Param | CountMethod::Both) {
        let start = std::time::Instant::now();
        let pc = count_n_param(q, norm, b)?;
        report.n_param = Some(pc.n);
        report.script_n = Some(pc.script_n);
        report.corrections = pc.corrections;
        report.elapsed_ms_param = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Region V and its volume
// ---------------------------------------------------------------------------

/// The region `V = {(s, t) : t > 0, ||q(s, t)|| <= 1}` of a parametrized
/// special conic under a fixed norm.
#[derive(Debug, Clone)]
pub struct RegionV {
    sys: ParamSystem,
    norm: IsometricNorm,
    /// Radius of the rigorous bounding box for `T = 1`.
    pub box_radius: f64,
}

impl RegionV {
    pub fn new(s: &SpecialConic, norm: &IsometricNorm) -> RegionV {
        RegionV {
            sys: ParamSystem::new(s),
            norm: norm.clone(),
            box_radius: bounding_box(s, norm, 1.0),
        }
    }

    pub fn contains(&self, s: f64, t: f64) -> bool {
        if t <= 0.0 {
            return false;
        }
        let (a, b, d, e, f) = {
            let src = self.sys.source();
            (
                src.a as f64,
                src.b as f64,
                src.d as f64,
                src.e as f64,
                src.f as f64,
            )
        };
        let l = b * s + e * t;
        let g = a * s * s + d * s * t + f * t * t;
        self.norm.value(&[s * l, -g, t * l]) <= 1.0
    }

    /// Total length of `{t > 0 : ||q(s, t)|| <= 1}` for fixed `s`,
    /// computed from the quadratic band conditions in closed form.
    fn column_length(&self, s: f64) -> f64 {
        let pi = self.sys.pi();
        let mut acc = vec![(0.0f64, self.box_radius)];
        for (n, den) in self.norm.scaled_rows() {
            let a: f64 = (0..3).map(|j| n[j] as f64 * pi[j][0] as f64).sum();
            let b: f64 = (0..3).map(|j| n[j] as f64 * pi[j][1] as f64).sum();
            let c: f64 = (0..3).map(|j| n[j] as f64 * pi[j][2] as f64).sum();
            let bound = den as f64;
            let band = real_band_intervals(c, b * s, a * s * s, bound);
            acc = intersect_real(&acc, &band);
            if acc.is_empty() {
                break;
            }
        }
        acc.iter().map(|(lo, hi)| (hi - lo).max(0.0)).sum()
    }
}

/// Real solutions of `|c2 x^2 + c1 x + c0| <= bound`, as sorted intervals.
fn real_band_intervals(c2: f64, c1: f64, c0: f64, bound: f64) -> Vec<(f64, f64)> {
    if c2 < 0.0 {
        return real_band_intervals(-c2, -c1, -c0, bound);
    }
    if c2 == 0.0 {
        if c1 == 0.0 {
            return if c0.abs() <= bound {
                vec![(f64::MIN, f64::MAX)]
            } else {
                vec![]
            };
        }
        let (a, b) = ((-bound - c0) / c1, (bound - c0) / c1);
        return vec![(a.min(b), a.max(b))];
    }
    let d_hi = c1 * c1 - 4.0 * c2 * (c0 - bound);
    if d_hi < 0.0 {
        return vec![];
    }
    let s = d_hi.sqrt();
    let (a, b) = ((-c1 - s) / (2.0 * c2), (-c1 + s) / (2.0 * c2));
    let d_lo = c1 * c1 - 4.0 * c2 * (c0 + bound);
    if d_lo <= 0.0 {
        return vec![(a, b)];
    }
    let s2 = d_lo.sqrt();
    let (l, r) = ((-c1 - s2) / (2.0 * c2), (-c1 + s2) / (2.0 * c2));
    vec![(a, l), (r, b)]
}

fn intersect_real(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let lo = a[i].0.max(b[j].0);
        let hi = a[i].1.min(b[j].1);
        if lo < hi {
            out.push((lo, hi));
        }
        if a[i].1 < b[j].1 {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// `vol(V)` by deterministic midpoint integration over the bounding box,
/// with grid halving until successive estimates agree to `tol`.
pub fn volume_v(s: &SpecialConic, norm: &IsometricNorm, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol <= 0.1) {
        return Err(Error::ToleranceOutOfRange(tol));
    }
    let region = RegionV::new(s, norm);
    let r = region.box_radius;
    let mut cells = 512usize;
    let mut prev: Option<f64> = None;
    for refinement in 0..=14u32 {
        let h = 2.0 * r / cells as f64;
        let total: f64 = (0..cells)
            .into_par_iter()
            .map(|i| {
                let sm = -r + (i as f64 + 0.5) * h;
                region.column_length(sm)
            })
            .sum::<f64>()
            * h;
        if let Some(p) = prev {
            if (total - p).abs() <= tol * total.abs().max(1e-12) {
                return Ok(total);
            }
        }
        prev = Some(total);
        cells *= 2;
        if refinement == 14 {
            break;
        }
    }
    Err(Error::NonConvergence {
        refinements: 14,
        context: "volume_v",
    })
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------
