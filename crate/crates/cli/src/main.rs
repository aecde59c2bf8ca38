use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cgl_core::ball::{enumerate_ball, BallOptions, BallTable, DEFAULT_MAX_BYTES};
use cgl_core::classifier::{classify_growth, dichotomy_report, DEFAULT_ALPHA_MIN};
use cgl_core::conjugacy::{finite_index_comparison, FiniteIndexEmbedding};
use cgl_core::conjugacy::{conjugacy_growth, conjugacy_growth_pairwise, ConjGrowthTable, ConjugacyContext};
use cgl_core::diophantine::{brute_force_dirichlet, dirichlet_approx, parse_rational};
use cgl_core::distortion::distortion_profile;
use cgl_core::interval::RatInterval;
use cgl_core::json::{element_from_json, element_from_str, element_to_json, int_to_json, matrix_from_json, spec_to_json};
use cgl_core::spectral::is_quasi_unipotent;
use cgl_core::witness::{build_witness_family, verify_witness_family, VerifyOptions};
use cgl_core::{Error, GroupSpec, Parallelism};

const EXIT_USAGE: u8 = 1;
const EXIT_LIMIT: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "cgl", version, about = "Growth and conjugacy growth of Z^k x|_phi Z")]
struct Cli {
    /// Worker threads (1 runs sequentially)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Memory budget for ball enumeration, in bytes
    #[arg(long = "max-mem", global = true, default_value_t = DEFAULT_MAX_BYTES)]
    max_mem: u64,
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SpecArg {
    /// Group spec JSON file
    #[arg(long)]
    spec: String,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a spec
    Validate(SpecArg),
    /// Ball sizes |B(n)|
    Ball {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        radius: usize,
    },
    /// Growth table with a growth-type fit
    Growth {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        radius: usize,
    },
    /// Conjugacy growth table
    Cgrowth {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        radius: usize,
        /// Count classes with pairwise conjugacy tests instead of keys
        #[arg(long)]
        pairwise: bool,
    },
    /// Decide conjugacy of two elements
    Conjugate {
        #[command(flatten)]
        spec: SpecArg,
        /// Element JSON {"v": [...], "s": n}
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Smallest Dirichlet approximation denominator
    Dirichlet {
        /// Coordinates, exact decimals or fractions (repeat or comma-separate)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        coords: Vec<String>,
        #[arg(long)]
        m: u64,
        /// Error bound on every coordinate
        #[arg(long)]
        err: Option<String>,
        /// Use the exhaustive oracle
        #[arg(long)]
        brute: bool,
    },
    /// Build (and optionally verify) a witness family
    Witness {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        verify: bool,
        /// Largest radius for the conjugacy growth cross-check
        #[arg(long, default_value_t = 16)]
        cross_radius: usize,
    },
    /// Distortion profile of powers of an element
    Distortion {
        #[command(flatten)]
        spec: SpecArg,
        /// Element JSON; defaults to ((1,0,...),0)
        #[arg(long)]
        u: Option<String>,
        #[arg(long, default_value_t = 1024)]
        nmax: u64,
        /// Norm search cap
        #[arg(long, default_value_t = 16)]
        cap: usize,
    },
    /// Dichotomy report: algebraic prediction against fitted growth
    Classify {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        radius: usize,
    },
    /// Finite-index comparison of conjugacy growth
    Lemma1 {
        #[command(flatten)]
        spec: SpecArg,
        /// Sublattice basis (columns) as a JSON matrix; defaults to the identity
        #[arg(long)]
        basis: Option<String>,
        /// Shift modulus e
        #[arg(long, default_value_t = 1)]
        e: u64,
        /// Subgroup generators as a JSON list of elements
        #[arg(long)]
        generators: Option<String>,
        #[arg(long)]
        radius: usize,
        /// Norm search cap for the generator constant
        #[arg(long, default_value_t = 16)]
        cap: usize,
    },
}

enum Failure {
    Usage(String),
    Limit(String, Option<String>),
    Verify(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::LimitExceeded { .. } => Failure::Limit(e.to_string(), None),
            other => Failure::Usage(other.to_string()),
        }
    }
}

type Out = Result<String, Failure>;

fn load_spec(a: &SpecArg) -> Result<GroupSpec, Failure> {
    let text = fs::read_to_string(&a.spec).map_err(|e| Failure::Usage(format!("{}: {e}", a.spec)))?;
    Ok(cgl_core::json::spec_from_str(&text)?)
}

fn parse_json(s: &str) -> Result<Value, Failure> {
    serde_json::from_str(s).map_err(|e| Failure::Usage(format!("bad JSON {s:?}: {e}")))
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn ball_output(t: &BallTable, format: Format) -> String {
    match format {
        Format::Csv => t.to_csv(),
        Format::Json => render(&json!({
            "radii": t.radii,
            "ball_size": t.counts,
            "new_elements": t.new_elements,
            "truncated": t.truncated.as_ref().map(|x| json!({
                "last_completed_radius": x.last_completed_radius, "reason": x.reason
            })),
        })),
    }
}

fn cgrowth_output(t: &ConjGrowthTable, format: Format) -> String {
    match format {
        Format::Csv => t.to_csv(),
        Format::Json => render(&json!({
            "radii": t.radii,
            "ball_size": t.ball_sizes,
            "conj_classes": t.conj_classes,
            "truncated": t.truncated.as_ref().map(|x| json!({
                "last_completed_radius": x.last_completed_radius, "reason": x.reason
            })),
        })),
    }
}

/// Partial tables still go to stdout, with exit code 2.
fn finish(out: String, truncated: Option<String>) -> Out {
    match truncated {
        Some(reason) => Err(Failure::Limit(reason, Some(out))),
        None => Ok(out),
    }
}

fn run(cli: Cli) -> Out {
    let parallelism = match cli.threads {
        Some(0) => return Err(Failure::Usage("--threads must be positive".into())),
        Some(1) => Parallelism::Sequential,
        Some(n) => {
            cgl_core::par::configure_threads(n).map_err(Failure::Usage)?;
            Parallelism::default()
        }
        None => Parallelism::default(),
    };
    if cli.max_mem == 0 {
        return Err(Failure::Usage("--max-mem must be positive".into()));
    }
    let opts = BallOptions {
        max_bytes: cli.max_mem,
        parallelism,
        ..Default::default()
    };
    let format = cli.format;
    let json_only = |name: &str| -> Result<(), Failure> {
        if format == Format::Csv {
            Err(Failure::Usage(format!("{name} only supports --format json")))
        } else {
            Ok(())
        }
    };
    match cli.command {
        Command::Validate(a) => {
            json_only("validate")?;
            let spec = load_spec(&a)?;
            Ok(render(&json!({
                "valid": true,
                "spec": spec_to_json(&spec),
                "det": int_to_json(&spec.phi().det()),
                "generators": spec.generators().len(),
                "quasi_unipotent": is_quasi_unipotent(spec.phi())?,
            })))
        }
        Command::Ball { spec, radius } => {
            let spec = load_spec(&spec)?;
            let t = enumerate_ball(&spec, radius, &opts);
            let reason = t.truncated.as_ref().map(|x| x.to_error().to_string());
            finish(ball_output(&t, format), reason)
        }
        Command::Growth { spec, radius } => {
            let spec = load_spec(&spec)?;
            let t = enumerate_ball(&spec, radius, &opts);
            let reason = t.truncated.as_ref().map(|x| x.to_error().to_string());
            let out = match format {
                Format::Csv => {
                    let mut s = String::from("n,ball_size\n");
                    for (n, c) in t.radii.iter().zip(&t.counts) {
                        s.push_str(&format!("{n},{c}\n"));
                    }
                    s
                }
                Format::Json => {
                    let table: Vec<(usize, u64)> = t.radii.iter().copied().zip(t.counts.iter().copied()).collect();
                    let verdict = classify_growth(&table, None, DEFAULT_ALPHA_MIN).ok();
                    render(&json!({
                        "radii": t.radii,
                        "ball_size": t.counts,
                        "fit": verdict.map(|v| v.to_json()),
                        "truncated": reason,
                    }))
                }
            };
            finish(out, reason)
        }
        Command::Cgrowth { spec, radius, pairwise } => {
            let spec = load_spec(&spec)?;
            let t = if pairwise {
                conjugacy_growth_pairwise(&spec, radius, &opts)?
            } else {
                conjugacy_growth(&spec, radius, &opts)?
            };
            let reason = t.truncated.as_ref().map(|x| x.to_error().to_string());
            finish(cgrowth_output(&t, format), reason)
        }
        Command::Conjugate { spec, g, h } => {
            json_only("conjugate")?;
            let spec = load_spec(&spec)?;
            let g = element_from_str(&g)?;
            let h = element_from_str(&h)?;
            let c = ConjugacyContext::new(&spec).are_conjugate(&g, &h)?;
            Ok(render(&json!({
                "conjugate": c.is_some(),
                "witness": c.as_ref().map(element_to_json),
            })))
        }
        Command::Dirichlet { coords, m, err, brute } => {
            json_only("dirichlet")?;
            let radius = match err {
                Some(e) => parse_rational(&e)?,
                None => parse_rational("0")?,
            };
            let c = coords
                .iter()
                .map(|s| Ok(RatInterval::around(parse_rational(s)?, &radius)))
                .collect::<Result<Vec<_>, Error>>()?;
            let r = if brute {
                brute_force_dirichlet(&c, m)?
            } else {
                dirichlet_approx(&c, m, parallelism)?
            };
            Ok(render(&r.to_json()))
        }
        Command::Witness { spec, n, verify, cross_radius } => {
            json_only("witness")?;
            let spec = load_spec(&spec)?;
            let fam = build_witness_family(&spec, n, &opts)?;
            if !verify {
                return Ok(render(&fam.to_json(None)));
            }
            let vopts = VerifyOptions {
                ball: opts.clone(),
                cross_check_max_radius: cross_radius,
                ..Default::default()
            };
            let rep = verify_witness_family(&spec, &fam, &vopts)?;
            let out = render(&fam.to_json(Some(&rep)));
            if rep.verified {
                Ok(out)
            } else {
                print!("{out}");
                Err(Failure::Verify("witness verification failed".into()))
            }
        }
        Command::Distortion { spec, u, nmax, cap } => {
            json_only("distortion")?;
            let spec = load_spec(&spec)?;
            let u = match u {
                Some(s) => element_from_str(&s)?,
                None => {
                    let mut v = vec![0i64; spec.k()];
                    v[0] = 1;
                    cgl_core::Element::from_i64(&v, 0)
                }
            };
            let p = distortion_profile(&spec, &u, nmax, cap, &opts)?;
            Ok(render(&p.to_json()))
        }
        Command::Classify { spec, radius } => {
            json_only("classify")?;
            let spec = load_spec(&spec)?;
            let r = dichotomy_report(&spec, radius, &opts)?;
            let reason = r.truncated_at.map(|n| format!("stopped after radius {n}"));
            finish(render(&r.to_json()), reason)
        }
        Command::Lemma1 { spec, basis, e, generators, radius, cap } => {
            let spec = load_spec(&spec)?;
            let basis = match basis {
                Some(b) => matrix_from_json(&parse_json(&b)?)?,
                None => cgl_core::IntMatrix::identity(spec.k()),
            };
            let gens = match generators {
                Some(g) => {
                    let v = parse_json(&g)?;
                    let list = v
                        .as_array()
                        .ok_or_else(|| Failure::Usage("--generators must be a JSON list".into()))?;
                    Some(list.iter().map(element_from_json).collect::<Result<Vec<_>, Error>>()?)
                }
                None => None,
            };
            let emb = FiniteIndexEmbedding::new(&spec, basis, e, gens, cap)?;
            let rep = finite_index_comparison(&emb, radius, &opts)?;
            let out = match format {
                Format::Csv => {
                    let mut s = String::from("n,gamma_h,g_radius,gamma_g,bound,holds\n");
                    for r in &rep.rows {
                        s.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            r.n, r.gamma_h, r.g_radius, r.gamma_g, r.bound, r.holds
                        ));
                    }
                    s
                }
                Format::Json => render(&json!({
                    "index": int_to_json(&rep.index),
                    "kconst": rep.kconst,
                    "h_radius": rep.h_radius,
                    "g_radius": rep.g_radius,
                    "rows": rep.rows.iter().map(|r| json!({
                        "n": r.n,
                        "gamma_h": r.gamma_h,
                        "g_radius": r.g_radius,
                        "gamma_g": r.gamma_g,
                        "bound": int_to_json(&r.bound),
                        "holds": r.holds,
                        "g_exact": r.g_exact,
                    })).collect::<Vec<_>>(),
                    "holds": rep.holds,
                })),
            };
            if rep.holds {
                Ok(out)
            } else {
                print!("{out}");
                Err(Failure::Verify("finite-index inequality failed".into()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut stdout = std::io::stdout().lock();
    match run(cli) {
        Ok(out) => {
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Limit(msg, partial)) => {
            if let Some(p) = partial {
                let _ = stdout.write_all(p.as_bytes());
            }
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_LIMIT)
        }
        Err(Failure::Verify(msg)) => {
            let _ = stdout.flush();
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_VERIFY)
        }
    }
}
