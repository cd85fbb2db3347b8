//! `conics` — count primitive integer points on ternary conics, compute
//! the leading constants, and run the verification batteries.
//!
//! Exit codes: 0 success (and all verifications passed), 1 verification
//! failures, 2 usage or input errors.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use conics::harness::{self, CorpusSpec, Shape};
use conics::io;
use conics::{CountMethod, IsometricNorm, TernaryQuadraticForm, SPEC_VERSION};

#[derive(Parser)]
#[command(
    name = "conics",
    version,
    about = "exact point counts on ternary conics"
)]
struct Cli {
    /// JSON config with default settings (brute_cap, tol)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// rayon worker threads (results are thread-count independent)
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a deterministic corpus of isotropic forms
    Corpus {
        #[arg(long, default_value_t = 10)]
        count: u32,
        #[arg(long, default_value_t = 10)]
        height: i64,
        #[arg(long, value_enum, default_value_t = ShapeArg::Special)]
        shape: ShapeArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the exact identity batteries over a corpus
    Verify {
        /// JSON array of forms; generated from the options below if absent
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        count: u32,
        #[arg(long, default_value_t = 6)]
        height: i64,
        #[arg(long, value_enum, default_value_t = ShapeArg::Special)]
        shape: ShapeArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        b_max: u64,
    },
    /// Count N(Q, B) and emit a report (JSON), or a CSV sweep over
    /// several B values
    Count {
        #[arg(long)]
        form: PathBuf,
        #[arg(long = "B", short = 'B', conflicts_with = "b_list")]
        b: Option<u64>,
        /// comma-separated B values; emits CSV instead of JSON
        #[arg(long)]
        b_list: Option<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::Both)]
        method: MethodArg,
        #[arg(long)]
        norm: Option<PathBuf>,
    },
    /// Compute the leading constants c_Q (and optionally c'_Q)
    Constant {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        norm: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = false)]
        compare_cprime: bool,
    },
    /// Asymptotic sweep over a list of B values, CSV output
    Sweep {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        norm: Option<PathBuf>,
        /// comma-separated B values, e.g. 1000,10000,100000
        #[arg(long)]
        b_list: String,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value = "form")]
        id: String,
    },
    /// Find a primitive integer zero
    Zeros {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        cap: Option<i64>,
    },
    /// Complete a primitive vector to an SL3(Z) matrix
    Complete {
        /// comma-separated vector, e.g. "2,3,5"
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
    },
    /// Evaluate rho*(n) for a special conic
    Rho {
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        n: u64,
    },
    /// Map a parameter pair to its point on the conic
    Param {
        #[arg(long)]
        form: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
        #[arg(long, allow_hyphen_values = true)]
        t: i64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Special,
    General,
}

impl From<ShapeArg> for Shape {
    fn from(s: ShapeArg) -> Shape {
        match s {
            ShapeArg::Special => Shape::Special,
            ShapeArg::General => Shape::General,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Brute,
    Param,
    Both,
}

#[derive(Deserialize, Default)]
struct Config {
    brute_cap: Option<u64>,
    tol: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let config: Config = match &cli.config {
        Some(path) => serde_json::from_str(&fs::read_to_string(path)?)
            .with_context(|| format!("parsing config {}", path.display()))?,
        None => Config::default(),
    };
    let brute_cap = config
        .brute_cap
        .unwrap_or(conics::counting::DEFAULT_BRUTE_CAP);
    let default_tol = config.tol.unwrap_or(0.02);

    let mut exit = ExitCode::SUCCESS;
    let output = match &cli.cmd {
        Cmd::Corpus {
            count,
            height,
            shape,
            seed,
        } => {
            let spec = CorpusSpec {
                count: *count,
                height_bound: *height,
                shape: (*shape).into(),
                seed: *seed,
            };
            let forms = harness::generate_corpus(&spec)?;
            serde_json::to_string_pretty(&serde_json::json!({
                "spec_version": SPEC_VERSION,
                "spec": spec,
                "forms": forms,
            }))?
        }
        Cmd::Verify {
            corpus,
            count,
            height,
            shape,
            seed,
            b_max,
        } => {
            let forms: Vec<TernaryQuadraticForm> = match corpus {
                Some(path) => load_corpus(path)?,
                None => harness::generate_corpus(&CorpusSpec {
                    count: *count,
                    height_bound: *height,
                    shape: (*shape).into(),
                    seed: *seed,
                })?,
            };
            let report = harness::verify_identities(&forms, *b_max)?;
            if !report.passed {
                exit = ExitCode::from(1);
            }
            serde_json::to_string_pretty(&report)?
        }
        Cmd::Count {
            form,
            b,
            b_list,
            method,
            norm,
        } => {
            let q = load_form(form)?;
            let nm = load_norm(norm.as_deref())?;
            let method = match method {
                MethodArg::Brute => CountMethod::Brute,
                MethodArg::Param => CountMethod::Param,
                MethodArg::Both => CountMethod::Both,
            };
            match (b, b_list) {
                (Some(b), None) => {
                    let report = conics::count_report(&q, &nm, *b, method, brute_cap)?;
                    if let (Some(x), Some(y)) = (report.n_brute, report.n_param) {
                        if x != y {
                            exit = ExitCode::from(1);
                        }
                    }
                    serde_json::to_string_pretty(&report)?
                }
                (None, Some(list)) => {
                    let bs: Vec<u64> = list
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(|s| s.trim().parse::<u64>())
                        .collect::<Result<_, _>>()
                        .map_err(|e| anyhow!("bad B list: {e}"))?;
                    let mut csv = String::from(
                        "B,n_brute,n_param,script_n,elapsed_ms_brute,elapsed_ms_param\n",
                    );
                    for b in bs {
                        let report = conics::count_report(&q, &nm, b, method, brute_cap)?;
                        if report.n_brute.is_some()
                            && report.n_param.is_some()
                            && report.n_brute != report.n_param
                        {
                            exit = ExitCode::from(1);
                        }
                        let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
                        csv.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            b,
                            opt(report.n_brute),
                            opt(report.n_param),
                            opt(report.script_n),
                            opt(report.elapsed_ms_brute),
                            opt(report.elapsed_ms_param),
                        ));
                    }
                    csv
                }
                _ => return Err(anyhow!("count needs exactly one of --B or --b-list")),
            }
        }
        Cmd::Constant {
            form,
            norm,
            tol,
            compare_cprime,
        } => {
            let q = load_form(form)?;
            let nm = load_norm(norm.as_deref())?;
            let report =
                conics::density_report(&q, &nm, tol.unwrap_or(default_tol), *compare_cprime)?;
            serde_json::to_string_pretty(&report)?
        }
        Cmd::Sweep {
            form,
            norm,
            b_list,
            tol,
            id,
        } => {
            let q = load_form(form)?;
            let nm = load_norm(norm.as_deref())?;
            let bs: Vec<u64> = b_list
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<u64>())
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow!("bad B list: {e}"))?;
            let rows = harness::run_sweep(id, &q, &nm, &bs, tol.unwrap_or(default_tol))?;
            harness::sweep_csv(&rows)
        }
        Cmd::Zeros { form, cap } => {
            let q = load_form(form)?;
            let cap = cap.unwrap_or_else(|| conics::default_zero_cap(&q));
            let z = conics::find_primitive_zero(&q, cap)?;
            serde_json::to_string_pretty(&serde_json::json!({
                "spec_version": SPEC_VERSION,
                "xi": z.xi,
                "search_radius_used": z.search_radius_used,
            }))?
        }
        Cmd::Complete { vector } => {
            let parts: Vec<i64> = vector
                .split(',')
                .map(|s| s.trim().parse::<i64>())
                .collect::<Result<_, _>>()
                .map_err(|e| anyhow!("bad vector: {e}"))?;
            let a: [i64; 3] = parts
                .try_into()
                .map_err(|_| anyhow!("vector needs exactly 3 components"))?;
            let m = conics::complete_to_sl3(&a)?;
            serde_json::to_string_pretty(&serde_json::json!({
                "spec_version": SPEC_VERSION,
                "m": m.entries(),
            }))?
        }
        Cmd::Rho { form, n } => {
            let s = io::parse_special(&fs::read_to_string(form)?)?;
            let sys = conics::ParamSystem::new(&s);
            let value = conics::rho_star(&sys, *n)?;
            serde_json::to_string_pretty(&serde_json::json!({
                "spec_version": SPEC_VERSION,
                "n": n,
                "rho_star": value,
            }))?
        }
        Cmd::Param { form, s, t } => {
            let sc = io::parse_special(&fs::read_to_string(form)?)?;
            let sys = conics::ParamSystem::new(&sc);
            let p = conics::point_from_parameter(&sys, *s, *t)?;
            serde_json::to_string_pretty(&serde_json::json!({
                "spec_version": SPEC_VERSION,
                "s": p.s,
                "t": p.t,
                "lambda": p.lambda,
                "point": p.point,
                "exceptional": p.exceptional,
            }))?
        }
    };

    match &cli.out {
        Some(path) => fs::write(path, output.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?,
        None if output.ends_with('\n') => print!("{output}"),
        None => println!("{output}"),
    }
    Ok(exit)
}

fn load_form(path: &PathBuf) -> anyhow::Result<TernaryQuadraticForm> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(io::parse_form(&text)?)
}

fn load_norm(path: Option<&std::path::Path>) -> anyhow::Result<IsometricNorm> {
    match path {
        None => Ok(IsometricNorm::sup()),
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(io::parse_norm(Some(&text))?)
        }
    }
}

/// Accepts either a bare JSON array of forms or the `corpus` output shape.
fn load_corpus(path: &PathBuf) -> anyhow::Result<Vec<TernaryQuadraticForm>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: serde_json::Value = serde_json::from_str(&text)?;
    let arr = v
        .get("forms")
        .and_then(|f| f.as_array())
        .or_else(|| v.as_array())
        .ok_or_else(|| anyhow!("corpus file needs a JSON array of forms"))?;
    arr.iter()
        .map(|item| Ok(io::form_from_value(item)?))
        .collect()
}
