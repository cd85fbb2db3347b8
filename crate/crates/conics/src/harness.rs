//! Corpus generation, the exact-identity verification batteries, and
//! asymptotic sweeps.
//!
//! Corpora are deterministic in the seed (ChaCha8, seeded with the 64-bit
//! value via `seed_from_u64`), so runs replicate byte for byte.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::counting::{
    bounding_box_radius, count_m_inner, count_n_brute_capped, count_n_param, count_n_script,
    volume_v,
};
use crate::error::{Error, Result};
use crate::intmath::{divisors, gcd_u64, isqrt, mod_inverse, moebius};
use crate::norms::{rat_f64, IsometricNorm};
use crate::parametrize::{residue_classes, rho_star, rho_star_direct, ParamSystem};
use crate::quadform::{SpecialConic, TernaryQuadraticForm, UnimodularMatrix};
use crate::zeros::{default_zero_cap, find_primitive_zero};

/// Random-corpus description; identical specs generate identical corpora.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub count: u32,
    pub height_bound: i64,
    pub shape: Shape,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Special,
    General,
}

const REJECTION_CAP: u64 = 1_000_000;

/// Samples isotropic forms: special shapes carry the zero `(0,1,0)` by
/// construction; general shapes are unimodular images of special ones and
/// keep a rational point. Every form is checked to admit a zero within
/// the default search cap, so the full pipeline applies.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Vec<TernaryQuadraticForm>> {
    if spec.count < 1 {
        return Err(Error::InvalidInput("corpus count must be >= 1".into()));
    }
    if spec.height_bound < 1 {
        return Err(Error::InvalidInput("height bound must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.count as usize);
    let mut draws = 0u64;
    while out.len() < spec.count as usize {
        draws += 1;
        if draws > REJECTION_CAP {
            return Err(Error::CapExceeded {
                what: "corpus rejection draws",
                value: draws as u128,
                cap: REJECTION_CAP as u128,
            });
        }
        let candidate = match spec.shape {
            Shape::Special => sample_special(&mut rng, spec.height_bound).map(|s| s.as_form()),
            Shape::General => {
                // seed height kept small so the transformed height fits
                let seed_h = (spec.height_bound / 8).max(1);
                sample_special(&mut rng, seed_h).map(|s| {
                    let u = random_unimodular(&mut rng, 6, 3);
                    s.as_form().transform(&u)
                })
            }
        };
        let Some(q) = candidate else { continue };
        if q.height() > spec.height_bound {
            continue;
        }
        if matches!(spec.shape, Shape::General) && q.as_special().is_some() {
            continue; // keep the general half genuinely general-shaped
        }
        if find_primitive_zero(&q, default_zero_cap(&q)).is_err() {
            continue;
        }
        out.push(q);
    }
    Ok(out)
}

fn sample_special(rng: &mut ChaCha8Rng, h: i64) -> Option<SpecialConic> {
    let mut draw = || rng.gen_range(-h..=h);
    SpecialConic::new(draw(), draw(), draw(), draw(), draw()).ok()
}

/// Product of up to `max_factors` elementary matrices with off-diagonal
/// entries in `[-entry_bound, entry_bound]`; determinant 1 by construction.
pub fn random_unimodular(
    rng: &mut ChaCha8Rng,
    max_factors: u32,
    entry_bound: i64,
) -> UnimodularMatrix {
    let mut m = UnimodularMatrix::identity();
    let k = rng.gen_range(1..=max_factors);
    for _ in 0..k {
        let i = rng.gen_range(0..3usize);
        let mut j = rng.gen_range(0..3usize);
        while j == i {
            j = rng.gen_range(0..3usize);
        }
        let c = rng.gen_range(-entry_bound..=entry_bound);
        let mut e = [[0i64; 3]; 3];
        for (d, row) in e.iter_mut().enumerate() {
            row[d] = 1;
        }
        e[i][j] = c;
        m = m.mul_matrix(&UnimodularMatrix::new(e).expect("elementary matrix"));
    }
    m
}

// ---------------------------------------------------------------------------
// Identity batteries
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatteryResult {
    pub name: String,
    pub instances: u64,
    pub failures: Vec<String>,
    /// Informational measurement carried by some batteries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub info: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub spec_version: String,
    pub batteries: Vec<BatteryResult>,
    pub passed: bool,
}

impl VerifyReport {
    fn push(&mut self, b: BatteryResult) {
        if !b.failures.is_empty() {
            self.passed = false;
        }
        self.batteries.push(b);
    }
}

/// Runs every exact identity battery over the corpus. Failures are data,
/// enumerated with their inputs; the report never short-circuits.
pub fn verify_identities(corpus: &[TernaryQuadraticForm], b_max: u64) -> Result<VerifyReport> {
    assert!(b_max <= 100, "verification batteries cap B at 100");
    let norm = IsometricNorm::sup();
    let mut report = VerifyReport {
        spec_version: crate::counting::SPEC_VERSION.into(),
        batteries: Vec::new(),
        passed: true,
    };
    if corpus.is_empty() {
        return Ok(report);
    }

    // Reduce every corpus form to its special shape with composed norm.
    let mut specials: Vec<(SpecialConic, IsometricNorm)> = Vec::new();
    for q in corpus {
        match q.as_special() {
            Some(s) => specials.push((s, norm.clone())),
            None => {
                let zero = find_primitive_zero(q, default_zero_cap(q))?;
                let m = crate::unimodular::complete_to_sl3(&zero.xi)?;
                let qt = q.transform(&m);
                specials.push((
                    qt.as_special().ok_or(Error::SingularForm)?,
                    norm.compose_with_matrix(&m),
                ));
            }
        }
    }

    report.push(battery_oracle_equality(corpus, &norm, b_max)?);
    report.push(battery_zero_height_ratio(corpus)?);
    report.push(battery_adj_identity(&specials));
    report.push(battery_rho_star_support(&specials, 2000)?);
    report.push(battery_multiplicativity(&specials, 50)?);
    report.push(battery_script_n_decomposition(&specials, b_max.min(50))?);
    report.push(battery_primitivity_inversion(&specials, b_max)?);
    report.push(battery_bounding_box(&specials, b_max)?);
    report.push(battery_lattice_error_constant(&specials, b_max)?);
    Ok(report)
}

fn battery_oracle_equality(
    corpus: &[TernaryQuadraticForm],
    norm: &IsometricNorm,
    b_max: u64,
) -> Result<BatteryResult> {
    let mut failures = Vec::new();
    let mut instances = 0;
    for q in corpus {
        for b in [10u64.min(b_max), b_max] {
            instances += 1;
            let brute = count_n_brute_capped(q, norm, b, 10_000)?;
            let param = count_n_param(q, norm, b)?;
            if brute != param.n {
                failures.push(format!("{q:?} B={b}: brute {brute} != param {}", param.n));
            }
        }
    }
    Ok(BatteryResult {
        name: "oracle_equality".into(),
        instances,
        failures,
        info: None,
    })
}

/// Records the empirical maximum of `||xi||_inf / <Q>` over the corpus:
/// the hidden constant in the Cassels small-zero bound. Informational;
/// the search cap `3 <Q>` is validated by the zero being found at all.
fn battery_zero_height_ratio(corpus: &[TernaryQuadraticForm]) -> Result<BatteryResult> {
    let mut max_ratio = 0.0f64;
    let mut instances = 0;
    for q in corpus {
        let z = find_primitive_zero(q, default_zero_cap(q))?;
        let norm = z.xi.iter().map(|c| c.abs()).max().unwrap();
        max_ratio = max_ratio.max(norm as f64 / q.height() as f64);
        instances += 1;
    }
    Ok(BatteryResult {
        name: "cassels_zero_height_ratio".into(),
        instances,
        failures: Vec::new(),
        info: Some(format!("max ||xi||_inf / <Q> = {max_ratio:.4}")),
    })
}

fn battery_adj_identity(specials: &[(SpecialConic, IsometricNorm)]) -> BatteryResult {
    let mut failures = Vec::new();
    let mut instances = 0;
    for (s, _) in specials {
        let sys = ParamSystem::new(s);
        let adj = sys.adj_pi();
        let mut state = 0xDEADBEEFu64 ^ (s.height() as u64);
        for _ in 0..1000 {
            instances += 1;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let sp = ((state >> 20) % 4001) as i128 - 2000;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let t = ((state >> 20) % 4001) as i128 - 2000;
            let q = sys.q(sp, t);
            let want = [sp * sp, sp * t, t * t];
            for i in 0..3 {
                let lhs: i128 = (0..3).map(|j| adj[i][j] * q[j]).sum();
                if lhs != sys.delta() * want[i] {
                    failures.push(format!("{s:?} adj identity fails at ({sp},{t})"));
                }
            }
        }
    }
    BatteryResult {
        name: "adjugate_identity".into(),
        instances,
        failures,
        info: None,
    }
}

fn battery_rho_star_support(
    specials: &[(SpecialConic, IsometricNorm)],
    n_max: u64,
) -> Result<BatteryResult> {
    let mut failures = Vec::new();
    let mut instances = 0;
    for (s, _) in specials {
        let sys = ParamSystem::new(s);
        let support = sys.lambda_max()?;
        for n in 1..=n_max {
            instances += 1;
            let r = rho_star(&sys, n)?;
            if r > 0 && support % n != 0 {
                failures.push(format!("{s:?}: rho*({n}) = {r} outside divisor support"));
            }
            if r > n * s.gcd_be() {
                failures.push(format!("{s:?}: rho*({n}) = {r} > n gcd(b,e)"));
            }
        }
    }
    Ok(BatteryResult {
        name: "rho_star_support_and_bound".into(),
        instances,
        failures,
        info: None,
    })
}

fn battery_multiplicativity(
    specials: &[(SpecialConic, IsometricNorm)],
    pairs: u32,
) -> Result<BatteryResult> {
    let mut failures = Vec::new();
    let mut instances = 0;
    for (s, _) in specials {
        let sys = ParamSystem::new(s);
        let mut state = 0xC0FFEEu64 ^ (s.height() as u64);
        let mut done = 0;
        while done < pairs {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let m = 1 + ((state >> 20) % 999) as u64;
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let n = 1 + ((state >> 20) % 999) as u64;
            if gcd_u64(m, n) != 1 || m * n > 1000 {
                continue;
            }
            done += 1;
            instances += 1;
            let lhs = rho_star(&sys, m * n)?;
            let rhs = rho_star(&sys, m)? * rho_star(&sys, n)?;
            let direct = rho_star_direct(&sys, m * n)?;
            if lhs != rhs || lhs != direct {
                failures.push(format!(
                    "{s:?}: rho*({m}*{n}) = {lhs}, product {rhs}, direct {direct}"
                ));
            }
        }
    }
    Ok(BatteryResult {
        name: "rho_star_multiplicativity".into(),
        instances,
        failures,
        info: None,
    })
}

/// The gcd-stratified decomposition, exactly: `script N(Q,B)` equals the
/// Moebius-weighted sum of
/// `M*` over residue classes killing `q` modulo `k lambda`.
pub fn script_n_decomposition_check(
    s: &SpecialConic,
    norm: &IsometricNorm,
    b: u64,
) -> Result<(u64, i128)> {
    script_n_decomposition_check_with(s, norm, b, |sys, n| {
        residue_classes(sys, n).map(|v| {
            v.into_iter()
                .map(|(a, c)| (a as i64, c as i64))
                .collect::<Vec<_>>()
        })
    })
}

/// Test hook: the class provider is injectable so a tampered `rho*`
/// (dropping or duplicating a class) must break the identity.
pub fn script_n_decomposition_check_with(
    s: &SpecialConic,
    norm: &IsometricNorm,
    b: u64,
    classes: impl Fn(&ParamSystem, u64) -> Result<Vec<(i64, i64)>>,
) -> Result<(u64, i128)> {
    let sys = ParamSystem::new(s);
    let lhs = count_n_script(s, norm, b)?.count;
    let support = sys.lambda_max()?;
    let mut rhs: i128 = 0;
    for lambda in divisors(support) {
        for k in divisors(support / lambda) {
            let mu = moebius(k);
            if mu == 0 {
                continue;
            }
            let n = k * lambda;
            for (sigma, tau) in classes(&sys, n)? {
                let m_star =
                    count_m_inner(&sys, norm, (b * lambda) as i128, 1, n, sigma, tau, true)?;
                rhs += mu as i128 * m_star as i128;
            }
        }
    }
    Ok((lhs, rhs))
}

fn battery_script_n_decomposition(
    specials: &[(SpecialConic, IsometricNorm)],
    b_max: u64,
) -> Result<BatteryResult> {
    let mut failures = Vec::new();
    let mut instances = 0;
    for (s, norm) in specials {
        for b in [b_max / 2, b_max] {
            let b = b.max(1);
            instances += 1;
            let (lhs, rhs) = script_n_decomposition_check(s, norm, b)?;
            if lhs as i128 != rhs {
                failures.push(format!(
                    "{s:?} B={b}: script N {lhs} != decomposition {rhs}"
                ));
            }
        }
    }
    Ok(BatteryResult {
        name: "script_n_decomposition".into(),
        instances,
        failures,
        info: None,
    })
}

/// Moebius inversion of the primitivity condition, exactly, with
/// the truncation `m <= sqrt(2 T K0 / n)`.
pub fn primitivity_inversion_check(
    s: &SpecialConic,
    norm: &IsometricNorm,
    t: u64,
    n: u64,
    sigma: i64,
    tau: i64,
) -> Result<(u64, i128)> {
    let sys = ParamSystem::new(s);
    let lhs = count_m_inner(&sys, norm, t as i128, 1, n, sigma, tau, true)?;
    // m_max = floor(sqrt(2 T K0 / n))
    let k0 = norm.k0();
    let bound = (2 * t as i128 * k0.numer()) / (k0.denom() * n as i128);
    let m_max = isqrt(bound as u128) as u64;
    let mut rhs: i128 = 0;
    for m in 1..=m_max.max(1) {
        if gcd_u64(m, n) != 1 {
            continue;
        }
        let mu = moebius(m);
        if mu == 0 {
            continue;
        }
        let m_inv = mod_inverse(m as i128, n as i128).expect("coprime");
        let sigma_m = (m_inv * sigma as i128).rem_euclid(n as i128) as i64;
        let tau_m = (m_inv * tau as i128).rem_euclid(n as i128) as i64;
        let inner = count_m_inner(
            &sys,
            norm,
            t as i128,
            (m * m) as i128,
            n,
            sigma_m,
            tau_m,
            false,
        )?;
        rhs += mu as i128 * inner as i128;
    }
    Ok((lhs, rhs))
}

fn battery_primitivity_inversion(
    specials: &[(SpecialConic, IsometricNorm)],
    b_max: u64,
) -> Result<BatteryResult> {
    let mut failures = Vec::new();
    let mut instances = 0;
    for (s, norm) in specials {
        let sys = ParamSystem::new(s);
        let support = sys.lambda_max()?;
        for n in divisors(support).into_iter().filter(|&n| n <= 40) {
            let classes = residue_classes(&sys, n)?;
            for &(sigma, tau) in classes.iter().take(3) {
                for t in [b_max, 2 * b_max, 4 * b_max] {
                    instances += 1;
                    let (lhs, rhs) =
                        primitivity_inversion_check(s, norm, t, n, sigma as i64, tau as i64)?;
                    if lhs as i128 != rhs {
                        failures.push(format!(
                            "{s:?} T={t} n={n} ({sigma},{tau}): M* {lhs} != inversion {rhs}"
                        ));
                    }
                }
            }
        }
    }
    Ok(BatteryResult {
        name: "primitivity_moebius_inversion".into(),
        instances,
        failures,
        info: None,
    })
}

fn battery_bounding_box(
    specials: &[(SpecialConic, IsometricNorm)],
    b_max: u64,
) -> Result<BatteryResult> {
    let mut failures = Vec::new();
    let mut instances = 0;
    for (s, norm) in specials {
        let sys = ParamSystem::new(s);
        let t = b_max as i128;
        let r = bounding_box_radius(&sys, norm, t, 1)?;
        let wide = (2 * r + 2).min(r + 400) as i128;
        for sp in -wide..=wide {
            for tt in 1..=wide {
                if sp.abs() <= r as i128 && tt <= r as i128 {
                    continue;
                }
                instances += 1;
                if norm.le_bound_wide(&sys.q(sp, tt), t, 1) {
                    failures.push(format!("{s:?}: ({sp},{tt}) outside the rigorous box"));
                }
            }
        }
    }
    Ok(BatteryResult {
        name: "bounding_box_exhaustive".into(),
        instances,
        failures,
        info: None,
    })
}

/// The lattice-count error against `vol(V) T / n^2`, normalized
/// by `1 + sqrt(K0 T)/n * <Q>/sqrt(|Delta|)`, stays below an absolute
/// constant (10 across the test grid).
pub fn lattice_error_ratio(
    s: &SpecialConic,
    norm: &IsometricNorm,
    t: u64,
    n: u64,
    sigma: i64,
    tau: i64,
    vol: f64,
) -> Result<f64> {
    let sys = ParamSystem::new(s);
    let m = count_m_inner(&sys, norm, t as i128, 1, n, sigma, tau, false)?;
    let err = (m as f64 - vol * t as f64 / (n * n) as f64).abs();
    let k0 = rat_f64(norm.k0());
    let height = s.height() as f64;
    let delta = sys.delta().abs() as f64;
    let bound = 1.0 + (k0 * t as f64).sqrt() / n as f64 * height / delta.sqrt();
    Ok(err / bound)
}

fn battery_lattice_error_constant(
    specials: &[(SpecialConic, IsometricNorm)],
    b_max: u64,
) -> Result<BatteryResult> {
    let mut failures = Vec::new();
    let mut instances = 0;
    for (s, norm) in specials {
        let vol = volume_v(s, norm, 0.005)?;
        for n in [1u64, 2, 3] {
            for (sigma, tau) in [(0i64, 1i64), (1, 1), (1, 2)] {
                if gcd_u64(gcd_u64(sigma as u64, tau as u64), n) != 1 {
                    continue;
                }
                for t in [1, b_max / 2, b_max, 4 * b_max] {
                    let t = t.max(1);
                    instances += 1;
                    let ratio = lattice_error_ratio(s, norm, t, n, sigma, tau, vol)?;
                    if ratio > 10.0 {
                        failures.push(format!(
                            "{s:?} T={t} n={n} ({sigma},{tau}): normalized error {ratio:.2}"
                        ));
                    }
                }
            }
        }
    }
    Ok(BatteryResult {
        name: "lattice_error_constant".into(),
        instances,
        failures,
        info: None,
    })
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

/// One row of an asymptotic sweep; `norm_err` divides the deviation by
/// the theorem-shaped quantity `sqrt(B K0) log(B K0) <Q>^5`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub form_id: String,
    pub b: u64,
    pub n: u64,
    pub c_b: f64,
    pub abs_err: f64,
    pub norm_err: f64,
    pub elapsed_ms: u64,
}

pub fn run_sweep(
    form_id: &str,
    q: &TernaryQuadraticForm,
    norm: &IsometricNorm,
    b_list: &[u64],
    tol: f64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    if b_list.is_empty() {
        return Ok(rows);
    }
    let c_q = crate::densities::peyre_constant(q, norm, tol)?.c_q;
    let k0 = rat_f64(norm.k0());
    let height = q.height() as f64;
    for &b in b_list {
        let start = std::time::Instant::now();
        let pc = count_n_param(q, norm, b)?;
        let elapsed_ms = start.elapsed().as_millis() as u64;
        let c_b = c_q * b as f64;
        let abs_err = (pc.n as f64 - c_b).abs();
        let bk0 = b as f64 * k0;
        let norm_err = abs_err / (bk0.sqrt() * bk0.ln() * height.powi(5));
        rows.push(SweepRow {
            form_id: form_id.to_string(),
            b,
            n: pc.n,
            c_b,
            abs_err,
            norm_err,
            elapsed_ms,
        });
    }
    Ok(rows)
}

/// CSV with the frozen column order.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("form_id,B,N,cB,abs_err,norm_err,elapsed_ms\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{:.6},{:.6},{:.9},{}\n",
            r.form_id, r.b, r.n, r.c_b, r.abs_err, r.norm_err, r.elapsed_ms
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_determinism_and_invariants() {
        let spec = CorpusSpec {
            count: 12,
            height_bound: 8,
            shape: Shape::Special,
            seed: 42,
        };
        let a = generate_corpus(&spec).unwrap();
        let b = generate_corpus(&spec).unwrap();
        assert_eq!(a, b);
        for q in &a {
            assert!(q.height() <= 8);
            assert_eq!(q.c020, 0);
            assert_ne!(q.gram_determinant(), 0);
        }
    }

    #[test]
    fn corpus_general_shape() {
        let spec = CorpusSpec {
            count: 6,
            height_bound: 30,
            shape: Shape::General,
            seed: 7,
        };
        let forms = generate_corpus(&spec).unwrap();
        for q in &forms {
            assert!(q.height() <= 30);
            assert!(q.as_special().is_none());
            assert!(find_primitive_zero(q, default_zero_cap(q)).is_ok());
        }
    }

    #[test]
    fn corpus_rejects_bad_spec() {
        let spec = CorpusSpec {
            count: 0,
            height_bound: 4,
            shape: Shape::Special,
            seed: 1,
        };
        assert!(generate_corpus(&spec).is_err());
        let spec = CorpusSpec {
            count: 1,
            height_bound: 0,
            shape: Shape::Special,
            seed: 1,
        };
        assert!(generate_corpus(&spec).is_err());
    }

    #[test]
    fn verify_small_corpus_passes() {
        let spec = CorpusSpec {
            count: 4,
            height_bound: 4,
            shape: Shape::Special,
            seed: 11,
        };
        let corpus = generate_corpus(&spec).unwrap();
        let report = verify_identities(&corpus, 20).unwrap();
        assert!(
            report.passed,
            "failures: {:#?}",
            report
                .batteries
                .iter()
                .filter(|b| !b.failures.is_empty())
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn verify_empty_corpus_trivially_passes() {
        let report = verify_identities(&[], 10).unwrap();
        assert!(report.passed);
        assert!(report.batteries.is_empty());
    }

    #[test]
    fn tampered_classes_break_decomposition() {
        // dropping one residue class from the provider must break the
        // decomposition (mutation test for the battery's sensitivity)
        let s = SpecialConic::new(1, 3, 0, 5, 7).unwrap();
        let norm = IsometricNorm::sup();
        let (lhs, rhs) = script_n_decomposition_check_with(&s, &norm, 10, |sys, n| {
            let mut classes: Vec<(i64, i64)> = residue_classes(sys, n)?
                .into_iter()
                .map(|(a, b)| (a as i64, b as i64))
                .collect();
            if n > 1 && !classes.is_empty() {
                classes.pop();
            }
            Ok(classes)
        })
        .unwrap();
        assert_ne!(lhs as i128, rhs, "tampered class list must be detected");
    }

    #[test]
    fn sweep_rows_and_csv() {
        let q = TernaryQuadraticForm::new(1, 0, 0, 0, -1, 0).unwrap();
        let rows = run_sweep("q0", &q, &IsometricNorm::sup(), &[10, 100], 0.02).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].n, 32); // N(Q0, 10), fixed by the brute oracle
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with("form_id,B,N,cB,abs_err,norm_err,elapsed_ms\n"));
        assert_eq!(csv.lines().count(), 3);
        assert_eq!(sweep_csv(&[]).lines().count(), 1);
    }
}
