//! The `gframekit` command line: argument parsing, JSON reports and exit codes.
//!
//! Exit codes are `0` when the checked property holds, `2` when it fails and
//! `1` on any input or usage error. Reports go to standard output as pretty
//! JSON; diagnostics go to standard error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::classify;
use crate::duality::{self, DualPair};
use crate::error::Error;
use crate::excess::{self, Certificate, Verdict};
use crate::generators::{GaborSpec, GeneratorSpec, GroupingSpec};
use crate::gframe::{self, GFrame};
use crate::induced;
use crate::io::{self, IoError};
use crate::linalg::{self, ComplexMatrix, C64};
use crate::resolution::{self, Variant};
use crate::splitting;
use crate::tol::Tolerances;

pub const EXIT_HOLDS: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAILS: i32 = 2;

/// Environment variable holding the base rank/frame tolerance.
pub const TOL_ENV: &str = "GFRAMEKIT_TOL";

#[derive(Debug, Parser)]
#[command(name = "gframekit", version, about = "Generalized frames on ℂⁿ")]
struct Cli {
    /// Base rank/frame tolerance; overrides GFRAMEKIT_TOL.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Worker threads for internal parallel loops.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify a g-frame (holds when it is a g-frame).
    Check { file: PathBuf },
    /// Optimal frame bounds and the spectrum of the frame operator.
    Bounds { file: PathBuf },
    /// Canonical dual `Λ_j S⁻¹`.
    Dual {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parseval transform `Λ_j S^{-1/2}`.
    Tight {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a g-frame with its induced vector sequence.
    Induced {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide what remains after removing one element (holds when still a g-frame).
    Remove {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        index: i64,
    },
    /// Whether every single removal destroys the g-frame property.
    Exact { file: PathBuf },
    /// Atomic resolution of an operator against the canonical dual pair.
    Resolve {
        file: PathBuf,
        #[arg(long)]
        operator: PathBuf,
        #[arg(long, value_parser = parse_variant, default_value = "t-lambda-dual")]
        variant: Variant,
    },
    /// Splitting constants for local forms and the frame-bound sandwich.
    Splitting {
        file: PathBuf,
        #[arg(long)]
        forms: PathBuf,
    },
    /// Generate a g-frame file.
    Gen(GenArgs),
    /// Check `Σ Λ_j* Γ_j = I` for two files.
    VerifyPair { primal: PathBuf, dual: PathBuf },
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Write the frame here and print a report instead of the frame.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Debug, Subcommand)]
enum GenKind {
    Identity {
        #[arg(long)]
        dim: usize,
    },
    MercedesBenz,
    /// Coordinate projections; sets are 1-based, e.g. `1,2/2,3`.
    Partition {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_parser = parse_sets)]
        sets: SetList,
    },
    /// Cyclic groups of functionals of a Riesz basis.
    Grouped {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        group: usize,
        #[arg(long, default_value_t = 0)]
        overlap: usize,
        #[arg(long, default_value_t = 0)]
        padding: usize,
        /// Random basis seed; the standard basis when absent.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1.0)]
        condition: f64,
    },
    /// Cyclic Gabor system with a periodized Gaussian window.
    Gabor {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        time_step: usize,
        #[arg(long)]
        freq_step: usize,
        /// Window width; defaults to √length.
        #[arg(long)]
        width: Option<f64>,
    },
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        conditioning: f64,
    },
}

#[derive(Debug, Clone)]
struct SetList(Vec<Vec<usize>>);

fn parse_sets(s: &str) -> Result<SetList, String> {
    s.split('/')
        .map(|set| {
            set.split(',')
                .map(|k| k.trim().parse::<usize>().map_err(|e| format!("{k:?}: {e}")))
                .collect()
        })
        .collect::<Result<_, _>>()
        .map(SetList)
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::parse(s).ok_or_else(|| {
        let names: Vec<_> = Variant::ALL.iter().map(|v| v.name()).collect();
        format!("unknown variant {s:?}; expected one of {}", names.join(", "))
    })
}

enum Failure {
    /// Bad input or usage: exit 1 with a diagnostic.
    Input(String),
    /// The property under test fails in a way that stops the computation.
    Property(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::NotAFrame { .. }
            | Error::SingularSplitting { .. }
            | Error::NotDualPair { .. }
            | Error::NotRieszBasis => Failure::Property(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

struct Outcome {
    holds: bool,
    results: Value,
}

enum Reply {
    Report(Outcome),
    /// Printed verbatim instead of a report.
    Raw(String),
}

struct Session {
    tol: Tolerances,
    inputs: Vec<Value>,
    outputs: Vec<Value>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable value")
}

/// A numeric result together with the threshold it was compared against.
fn measured(value: f64, tolerance: f64) -> Value {
    json!({ "value": value, "tolerance": tolerance, "within": value <= tolerance })
}

impl Session {
    fn read(&mut self, role: &str, path: &Path) -> Result<String, Failure> {
        let bytes = fs::read(path)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        self.inputs.push(json!({
            "role": role,
            "path": path.display().to_string(),
            "sha256": sha256_hex(&bytes),
        }));
        String::from_utf8(bytes)
            .map_err(|_| Failure::Input(format!("{}: not valid UTF-8", path.display())))
    }

    fn read_gframe(&mut self, role: &str, path: &Path) -> Result<GFrame, Failure> {
        let text = self.read(role, path)?;
        io::parse_gframe(&text)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
    }

    fn write(&mut self, path: &Path, text: &str) -> Result<(), Failure> {
        fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        self.outputs.push(json!({
            "path": path.display().to_string(),
            "sha256": sha256_hex(text.as_bytes()),
        }));
        Ok(())
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = write!(stderr, "{}", e.render());
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_HOLDS,
                _ => EXIT_INPUT,
            };
        }
    };
    let tol = match resolve_tolerances(cli.tol, std::env::var(TOL_ENV).ok()) {
        Ok(t) => t,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INPUT;
        }
    };
    if cli.threads == 0 {
        let _ = writeln!(stderr, "error: --threads must be at least 1");
        return EXIT_INPUT;
    }
    let echo: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let name = command_name(&cli.command);
    let start = Instant::now();
    let mut session = Session {
        tol,
        inputs: Vec::new(),
        outputs: Vec::new(),
    };
    let result = with_threads(cli.threads, || dispatch(&cli.command, &mut session));
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;

    let (code, holds, results, error) = match result {
        Ok(Reply::Raw(text)) => {
            return match stdout.write_all(text.as_bytes()) {
                Ok(()) => EXIT_HOLDS,
                Err(_) => EXIT_INPUT,
            };
        }
        Ok(Reply::Report(o)) => (
            if o.holds { EXIT_HOLDS } else { EXIT_FAILS },
            o.holds,
            o.results,
            Value::Null,
        ),
        Err(Failure::Property(msg)) => (EXIT_FAILS, false, Value::Null, Value::String(msg)),
        Err(Failure::Input(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INPUT;
        }
    };
    let report = json!({
        "command": name,
        "arguments": echo,
        "inputs": session.inputs,
        "outputs": session.outputs,
        "tolerances": to_value(&session.tol),
        "threads": cli.threads,
        "holds": holds,
        "error": error,
        "results": results,
        "wall_time_ms": wall_time_ms,
    });
    let mut text = serde_json::to_string_pretty(&report).expect("serializable report");
    text.push('\n');
    if stdout.write_all(text.as_bytes()).is_err() {
        return EXIT_INPUT;
    }
    code
}

fn resolve_tolerances(flag: Option<f64>, env: Option<String>) -> Result<Tolerances, String> {
    let base = match (flag, env) {
        (Some(t), _) => Some(t),
        (None, Some(s)) => Some(
            s.trim()
                .parse::<f64>()
                .map_err(|e| format!("{TOL_ENV}={s:?}: {e}"))?,
        ),
        (None, None) => None,
    };
    match base {
        None => Ok(Tolerances::default()),
        Some(t) if t.is_finite() && t > 0.0 && t < 1.0 => Ok(Tolerances::with_base(t)),
        Some(t) => Err(format!("tolerance must lie in (0, 1), got {t}")),
    }
}

#[cfg(feature = "parallel")]
fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<R>(_threads: usize, f: impl FnOnce() -> R) -> R {
    f()
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::Bounds { .. } => "bounds",
        Command::Dual { .. } => "dual",
        Command::Tight { .. } => "tight",
        Command::Induced { .. } => "induced",
        Command::Remove { .. } => "remove",
        Command::Exact { .. } => "exact",
        Command::Resolve { .. } => "resolve",
        Command::Splitting { .. } => "splitting",
        Command::Gen(_) => "gen",
        Command::VerifyPair { .. } => "verify-pair",
    }
}

fn dispatch(cmd: &Command, s: &mut Session) -> Result<Reply, Failure> {
    let tol = s.tol;
    let outcome = match cmd {
        Command::Check { file } => {
            let f = s.read_gframe("frame", file)?;
            let r = classify::classify(&f, &tol)?;
            Outcome {
                holds: r.is_frame,
                results: json!({ "classification": to_value(&r) }),
            }
        }
        Command::Bounds { file } => {
            let f = s.read_gframe("frame", file)?;
            let op = gframe::frame_operator(&f)?;
            let b = op.bounds();
            let holds = f.dim_u() > 0 && b.is_frame(&tol);
            Outcome {
                holds,
                results: json!({
                    "bounds": to_value(&b),
                    "ratio": if holds { Value::from(b.ratio()) } else { Value::Null },
                    "spectrum": op.spectrum.eigenvalues,
                    "frame_tolerance": tol.frame,
                }),
            }
        }
        Command::Dual { file, out } => {
            let f = s.read_gframe("frame", file)?;
            let bounds = gframe::optimal_bounds(&f)?;
            let d = duality::canonical_dual(&f, &tol)?;
            let text = io::write_gframe(&d);
            if let Some(path) = out {
                s.write(path, &text)?;
            }
            let back = io::parse_gframe(&text)?;
            let check = duality::verify_dual_pair(&f, &back, &tol)?;
            Outcome {
                holds: check.is_dual,
                results: json!({
                    "round_trip_exact": back == d,
                    "dual_residual": measured(check.residual, tol.dual),
                    "frame_bounds": to_value(&bounds),
                    "dual_bounds": to_value(&gframe::optimal_bounds(&back)?),
                    "predicted_dual_bounds": to_value(&duality::predicted_dual_bounds(&bounds)),
                }),
            }
        }
        Command::Tight { file, out } => {
            let f = s.read_gframe("frame", file)?;
            let q = duality::tight_transform(&f, &tol)?;
            let text = io::write_gframe(&q);
            if let Some(path) = out {
                s.write(path, &text)?;
            }
            let back = io::parse_gframe(&text)?;
            let n = back.dim_u();
            let sq = gframe::frame_operator_matrix(&back);
            let residual =
                (&sq - &ComplexMatrix::identity(n)).frobenius_norm() / (n as f64).sqrt();
            Outcome {
                holds: residual <= tol.dual,
                results: json!({
                    "round_trip_exact": back == q,
                    "parseval_residual": measured(residual, tol.dual),
                    "bounds": to_value(&gframe::optimal_bounds(&back)?),
                }),
            }
        }
        Command::Induced { file, out } => {
            let f = s.read_gframe("frame", file)?;
            let report = induced::equivalence_report(&f, None, &tol)?;
            if let Some(path) = out {
                let seq = induced::induced_sequence(&f, None)?;
                s.write(path, &io::write_vector_frame(&seq))?;
            }
            let scale = gframe::frame_operator_matrix(&f).max_abs().max(1.0);
            Outcome {
                holds: report.statuses_agree && report.operators_agree,
                results: json!({
                    "gframe": to_value(&report.gframe),
                    "induced": to_value(&report.induced),
                    "statuses_agree": report.statuses_agree,
                    "operator_residual": measured(report.operator_residual, 1e-11 * scale),
                }),
            }
        }
        Command::Remove { file, index } => {
            let f = s.read_gframe("frame", file)?;
            let v = excess::classify_removal(&f, *index, &tol)?;
            let certificate_residual = match &v.certificate {
                Certificate::Eigenvector(x) => {
                    let d = duality::canonical_dual(&f, &tol)?;
                    let t0 = d
                        .block(*index)
                        .expect("index present")
                        .matmul(&f.block(*index).expect("index present").adjoint());
                    let r = linalg::norm(&linalg::sub_vec(&t0.mul_vec(x), x));
                    measured(r, tol.eigen_one)
                }
                Certificate::SpectralGap(_) => Value::Null,
            };
            Outcome {
                holds: v.verdict == Verdict::StillGFrame,
                results: json!({
                    "removal": to_value(&v),
                    "eigen_one_tolerance": tol.eigen_one,
                    "ill_conditioned_band": [tol.eigen_one, tol.ill_conditioned],
                    "certificate_residual": certificate_residual,
                }),
            }
        }
        Command::Exact { file } => {
            let f = s.read_gframe("frame", file)?;
            let e = excess::exactness(&f, &tol)?;
            Outcome {
                holds: e.exact,
                results: json!({ "exactness": to_value(&e), "eigen_one_tolerance": tol.eigen_one }),
            }
        }
        Command::Resolve {
            file,
            operator,
            variant,
        } => {
            let f = s.read_gframe("frame", file)?;
            let text = s.read("operator", operator)?;
            let t = io::parse_operator(&text)
                .map_err(|e| Failure::Input(format!("{}: {e}", operator.display())))?;
            let p = DualPair::canonical(&f, &tol)?;
            let r = resolution::resolve(&p, &t, *variant, &tol)?;
            let profile = resolution::atom_rank_profile(&r, &tol);
            let atoms: Vec<Value> = r
                .indices
                .iter()
                .zip(&r.dims)
                .zip(r.atoms.iter().zip(&profile.ranks))
                .map(|((index, dim), (atom, rank))| {
                    json!({ "index": index, "dim_v": dim, "norm": atom.frobenius_norm(), "rank": rank })
                })
                .collect();
            Outcome {
                holds: r.residual <= tol.representation && profile.within_bounds,
                results: json!({
                    "variant": variant.name(),
                    "atoms": atoms,
                    "ranks_within_bounds": profile.within_bounds,
                    "rank_tolerance": tol.rank,
                    "residual": measured(r.residual, tol.representation),
                }),
            }
        }
        Command::Splitting { file, forms } => {
            let f = s.read_gframe("frame", file)?;
            let text = s.read("forms", forms)?;
            let family = io::parse_forms(&text, &tol)
                .map_err(|e| Failure::Input(format!("{}: {e}", forms.display())))?;
            let r = splitting::verify_sandwich(&f, &family, &tol)?;
            Outcome {
                holds: r.holds,
                results: json!({
                    "sandwich": to_value(&r),
                    "sandwich_slack": 1e-8 * r.upper_bound,
                }),
            }
        }
        Command::Gen(args) => {
            let spec = generator_spec(&args.kind);
            let f = spec.build()?;
            let text = io::write_gframe(&f);
            let back = io::parse_gframe(&text)?;
            match &args.out {
                None => return Ok(Reply::Raw(text)),
                Some(path) => {
                    s.write(path, &text)?;
                    Outcome {
                        holds: back == f,
                        results: json!({
                            "spec": to_value(&spec),
                            "dim_u": f.dim_u(),
                            "elements": f.len(),
                            "round_trip_exact": back == f,
                        }),
                    }
                }
            }
        }
        Command::VerifyPair { primal, dual } => {
            let a = s.read_gframe("primal", primal)?;
            let b = s.read_gframe("dual", dual)?;
            let check = duality::verify_dual_pair(&a, &b, &tol)?;
            let canonical = if check.is_dual {
                match DualPair::new(a, b, &tol)?.is_canonical(&tol) {
                    Ok(c) => Value::Bool(c),
                    Err(Error::NotAFrame { .. }) => Value::Null,
                    Err(e) => return Err(e.into()),
                }
            } else {
                Value::Null
            };
            Outcome {
                holds: check.is_dual,
                results: json!({
                    "dual_residual": measured(check.residual, tol.dual),
                    "is_canonical": canonical,
                }),
            }
        }
    };
    Ok(Reply::Report(outcome))
}

fn generator_spec(kind: &GenKind) -> GeneratorSpec {
    match kind {
        GenKind::Identity { dim } => GeneratorSpec::Identity { dim: *dim },
        GenKind::MercedesBenz => GeneratorSpec::MercedesBenz,
        GenKind::Partition { dim, sets } => GeneratorSpec::Partition {
            dim: *dim,
            sets: sets.0.clone(),
        },
        GenKind::Grouped {
            dim,
            group,
            overlap,
            padding,
            seed,
            condition,
        } => GeneratorSpec::Grouped(GroupingSpec {
            n: *dim,
            group: *group,
            overlap: *overlap,
            padding: *padding,
            seed: *seed,
            condition: *condition,
        }),
        GenKind::Gabor {
            length,
            time_step,
            freq_step,
            width,
        } => {
            let w = width.unwrap_or((*length as f64).sqrt());
            let window = (0..*length)
                .map(|k| {
                    let d = k.min(length - k) as f64;
                    C64::new((-std::f64::consts::PI * d * d / (w * w)).exp(), 0.0)
                })
                .collect();
            GeneratorSpec::Gabor(GaborSpec {
                length: *length,
                time_step: *time_step,
                freq_step: *freq_step,
                window,
            })
        }
        GenKind::Random {
            dim,
            dims,
            seed,
            conditioning,
        } => GeneratorSpec::Random {
            dim: *dim,
            dims: dims.clone(),
            seed: *seed,
            conditioning: *conditioning,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_precedence() {
        assert_eq!(resolve_tolerances(None, None).unwrap(), Tolerances::default());
        assert_eq!(resolve_tolerances(None, Some("1e-7".into())).unwrap().rank, 1e-7);
        assert_eq!(resolve_tolerances(Some(1e-6), Some("1e-7".into())).unwrap().frame, 1e-6);
        assert!(resolve_tolerances(None, Some("abc".into())).is_err());
        assert!(resolve_tolerances(Some(0.0), None).is_err());
        assert!(resolve_tolerances(Some(f64::NAN), None).is_err());
    }

    #[test]
    fn set_and_variant_parsers() {
        assert_eq!(parse_sets("1,2/2,3").unwrap().0, vec![vec![1, 2], vec![2, 3]]);
        assert!(parse_sets("1,x").is_err());
        assert_eq!(parse_variant("dual-lambda-t").unwrap(), Variant::DualLambdaT);
        assert!(parse_variant("t").is_err());
    }

    #[test]
    fn usage_errors_exit_one() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["gframekit", "frobnicate"], &mut out, &mut err), EXIT_INPUT);
        assert_eq!(run(["gframekit", "check"], &mut out, &mut err), EXIT_INPUT);
        assert_eq!(
            run(["gframekit", "--threads", "0", "gen", "mercedes-benz"], &mut out, &mut err),
            EXIT_INPUT
        );
        assert!(out.is_empty());
        assert_eq!(run(["gframekit", "--help"], &mut out, &mut err), EXIT_HOLDS);
    }

    #[test]
    fn gen_to_stdout_is_the_canonical_file() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(["gframekit", "gen", "identity", "--dim", "2"], &mut out, &mut err);
        assert_eq!(code, EXIT_HOLDS);
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text, io::write_gframe(&crate::generators::identity_frame(2)));
    }

    #[test]
    fn infeasible_generator_is_input_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let args = ["gframekit", "gen", "random", "--dim", "4", "--dims", "1,1"];
        assert_eq!(run(args, &mut out, &mut err), EXIT_INPUT);
        assert!(String::from_utf8(err).unwrap().contains("error:"));
    }
}
