//! Command-line front end: reads system, element, vector and subset files in
//! JSON, runs one operation and prints the result as JSON.
//!
//! Exit status: 0 on success, 2 when an input cannot be read or parsed, 3 on
//! any other domain error and 4 when a requested tolerance cannot be met.
//! Errors are reported on stderr as `{"error": kind, "message": text}`.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use crossed_ell1::ideals::{
    default_tol, ideal_inclusion, is_member, radical_witness, spectrum_union, unit_circle_samples,
    PrimitiveIdealId,
};
use crossed_ell1::io::{self, parse_json};
use crossed_ell1::reps::{
    aperiodic_apply, density_solve, extract_basis_vector, periodic_rep_matrix, BumpShape, LpOrder,
    PeriodicRep, SolveOptions, Truncation,
};
use crossed_ell1::sspace::{
    hk_closure, hk_closure_certified, lift_witness, structure_space_describe, wiener_witness,
    CertificateKind, TSubset, WitnessOptions,
};
use crossed_ell1::{AlgebraElement, DynSystem, Error, GaussianRational, Point, Result, Scalar, C64};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "crossed-ell1", version, about = "Computations in the crossed product ℓ¹(Σ) of a dynamical system")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SystemArg {
    /// System file (or inline JSON).
    #[arg(long)]
    system: String,
}

#[derive(Args)]
struct ExactArg {
    /// Use exact Gaussian-rational arithmetic.
    #[arg(long)]
    exact: bool,
}

#[derive(Subcommand)]
enum Command {
    /// List the orbits of a finite system (or of the given sample points).
    Orbits {
        #[command(flatten)]
        system: SystemArg,
        /// Sample points, comma separated, for systems with infinitely many points.
        #[arg(long, value_delimiter = ',')]
        points: Vec<String>,
    },
    /// Freeness, topological freeness and transitivity of a system.
    Predicates {
        #[command(flatten)]
        system: SystemArg,
    },
    /// The matrix of π_{x,λ}(a) for a periodic point x.
    RepMatrix {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        x: String,
        /// `re,im`; parts may be rationals such as `3/5`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long)]
        element: String,
        #[command(flatten)]
        exact: ExactArg,
    },
    /// Apply π_x(a) to a vector: a finitely supported sequence for an
    /// aperiodic point, or a coordinate array (with --lambda) for a periodic one.
    Apply {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        x: String,
        #[arg(long)]
        element: String,
        #[arg(long)]
        vector: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[command(flatten)]
        exact: ExactArg,
    },
    /// Find a with π_x(a)ρ = τ at an aperiodic point.
    Solve {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        x: String,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        tau: String,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
        /// Use the smallest truncations meeting the γ contraction.
        #[arg(long)]
        minimal: bool,
        /// Cap on the cutoff radius (implies --minimal).
        #[arg(long)]
        n1_cap: Option<usize>,
        /// Cap on the series radius (implies --minimal).
        #[arg(long)]
        n2_cap: Option<usize>,
        #[command(flatten)]
        exact: ExactArg,
    },
    /// Approximate the basis vector e₀ from a vector ρ with a cutoff of radius n.
    ExtractE0 {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        x: String,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        n: usize,
        /// An integer p ≥ 1 or `inf`.
        #[arg(long, default_value = "1")]
        order: LpOrder,
        #[arg(long, value_enum, default_value_t = Shape::Notch)]
        shape: Shape,
        #[command(flatten)]
        exact: ExactArg,
    },
    /// Decide whether an element lies in a primitive ideal.
    IdealMember {
        #[command(flatten)]
        system: SystemArg,
        /// Ideal file or inline JSON, e.g. `{"orbit_of":3,"lambda":[0,1]}`.
        #[arg(long)]
        ideal: String,
        #[arg(long)]
        element: String,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        exact: ExactArg,
    },
    /// A primitive ideal not containing a nonzero element.
    RadicalWitness {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        element: String,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        exact: ExactArg,
    },
    /// Decide the inclusion of one primitive ideal in another.
    Inclusion {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        ideal1: String,
        #[arg(long)]
        ideal2: String,
    },
    /// Eigenvalues of π_{x,λ}(a) over all orbits and `samples` roots of unity λ.
    Spectrum {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        element: String,
        #[arg(long, default_value_t = 128)]
        samples: usize,
    },
    /// Hull-kernel closure of a subset of the structure space.
    Closure {
        #[command(flatten)]
        system: SystemArg,
        #[arg(long)]
        set: String,
        /// Also produce separating elements on a grid of angles.
        #[arg(long)]
        certify: bool,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// A trigonometric polynomial small on the given arcs and 1 at λ₀.
    Witness {
        /// `lo,hi` in turns; may be repeated.
        #[arg(long, required = true, allow_hyphen_values = true)]
        arc: Vec<String>,
        /// Isolated forbidden angles, in turns.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Vec<f64>,
        /// Angle of λ₀, in turns.
        #[arg(long, allow_hyphen_values = true)]
        lambda0: f64,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        #[arg(long, default_value_t = 2000)]
        max_n: usize,
        #[arg(long)]
        margin: Option<f64>,
        /// Lift the witness to the orbit of this point of the given system.
        #[arg(long, requires = "system")]
        lift_at: Option<String>,
        #[arg(long)]
        system: Option<String>,
    },
    /// Describe the structure space of a system.
    Structure {
        #[command(flatten)]
        system: SystemArg,
    },
    /// Check an input file and report problems with line numbers.
    Validate {
        file: PathBuf,
        /// Check elements, ideals and subsets against this system.
        #[arg(long)]
        system: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Notch,
    Indicator,
}

impl From<Shape> for BumpShape {
    fn from(s: Shape) -> Self {
        match s {
            Shape::Notch => BumpShape::Notch,
            Shape::Indicator => BumpShape::Indicator,
        }
    }
}

/// Reads an argument that is either inline JSON or a path to a JSON file.
fn load(arg: &str) -> Result<Value> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return parse_json(arg);
    }
    let text = fs::read_to_string(arg).map_err(|e| Error::Format(format!("{arg}: {e}")))?;
    parse_json(&text).map_err(|e| Error::Format(format!("{arg}: {e}")))
}

fn load_system(arg: &SystemArg) -> Result<Arc<DynSystem>> {
    Ok(Arc::new(io::system_from_json(&load(&arg.system)?)?))
}

fn parse_lambda<S: Scalar>(s: &str) -> Result<S> {
    let parts: Vec<Value> = s.split(',').map(|p| Value::String(p.trim().to_string())).collect();
    match parts.len() {
        1 => io::scalar_from_json(&parts[0]),
        2 => io::scalar_from_json(&Value::Array(parts)),
        _ => Err(Error::Format(format!("lambda {s:?} is not re,im"))),
    }
}

fn exact_or_float<T>(
    exact: bool,
    exact_fn: impl FnOnce() -> Result<T>,
    float_fn: impl FnOnce() -> Result<T>,
) -> Result<T> {
    if exact {
        exact_fn()
    } else {
        float_fn()
    }
}

fn rep_matrix<S: Scalar>(sys: &Arc<DynSystem>, x: &str, lambda: &str, element: &str) -> Result<Value> {
    let x = io::parse_point_str(sys, x)?;
    let a: AlgebraElement<S> = io::element_from_json(sys, &load(element)?)?;
    let rep = PeriodicRep::new(sys, x, parse_lambda::<S>(lambda)?)?;
    Ok(io::matrix_to_json(&periodic_rep_matrix(&rep, &a)?))
}

fn apply<S: Scalar>(
    sys: &Arc<DynSystem>,
    x: &str,
    element: &str,
    vector: &str,
    lambda: Option<&str>,
) -> Result<Value> {
    let x = io::parse_point_str(sys, x)?;
    let a: AlgebraElement<S> = io::element_from_json(sys, &load(element)?)?;
    match sys.period(&x)? {
        None => {
            let v = io::seq_vector_from_json::<S>(&load(vector)?)?;
            Ok(io::seq_vector_to_json(&aperiodic_apply(&x, &a, &v)?))
        }
        Some(p) => {
            let lambda = lambda.ok_or_else(|| Error::InvalidArgument("--lambda is required at a periodic point".into()))?;
            let v = load(vector)?;
            let v = v
                .as_array()
                .ok_or_else(|| Error::Format("the vector at a periodic point is an array".into()))?
                .iter()
                .map(io::scalar_from_json::<S>)
                .collect::<Result<Vec<S>>>()?;
            if v.len() != p {
                return Err(Error::InvalidArgument(format!("vector has length {}, period is {p}", v.len())));
            }
            let m = periodic_rep_matrix(&PeriodicRep::new(sys, x, parse_lambda::<S>(lambda)?)?, &a)?;
            let out: Vec<Value> = (0..p)
                .map(|i| {
                    let s = (0..p).fold(S::zero(), |acc, j| acc + m[(i, j)].clone() * v[j].clone());
                    io::scalar_to_json(&s)
                })
                .collect();
            Ok(Value::Array(out))
        }
    }
}

fn solve<S: Scalar>(
    sys: &Arc<DynSystem>,
    x: &str,
    rho: &str,
    tau: &str,
    opts: &SolveOptions,
) -> Result<Value> {
    let x = io::parse_point_str(sys, x)?;
    let rho = io::seq_vector_from_json::<S>(&load(rho)?)?;
    let tau = io::seq_vector_from_json::<S>(&load(tau)?)?;
    let sol = density_solve(sys, &x, &rho, &tau, opts)?;
    Ok(json!({
        "element": io::element_to_json(&sol.a),
        "residuals": sol.residual_norms,
        "truncations": sol.truncations,
        "steps": sol.steps(),
        "n0": sol.n0,
        "max_coefficient": sol.max_coefficient,
        "epsilon": sol.epsilon,
        "norm": sol.a.one_norm(),
    }))
}

fn extract<S: Scalar>(sys: &Arc<DynSystem>, x: &str, rho: &str, n: usize, order: LpOrder, shape: BumpShape) -> Result<Value> {
    let x = io::parse_point_str(sys, x)?;
    let rho = io::seq_vector_from_json::<S>(&load(rho)?)?;
    let ex = extract_basis_vector(sys, &x, &rho, n, order, shape)?;
    let distance = ex.vector.sub(&crossed_ell1::reps::SeqVector::basis(0)).norm(order);
    Ok(json!({
        "vector": io::seq_vector_to_json(&ex.vector),
        "error_bound": ex.error_bound,
        "distance_to_e0": distance,
        "order": order.to_string(),
        "n0": ex.n0,
    }))
}

fn ideal_member<S: Scalar>(sys: &Arc<DynSystem>, ideal: &str, element: &str, tol: Option<f64>) -> Result<Value> {
    let id: PrimitiveIdealId<S> = io::ideal_from_json(sys, &load(ideal)?)?;
    let a: AlgebraElement<S> = io::element_from_json(sys, &load(element)?)?;
    Ok(json!(is_member(&a, &id, tol.unwrap_or_else(default_tol::<S>))?))
}

fn radical<S: Scalar>(sys: &Arc<DynSystem>, element: &str, tol: Option<f64>) -> Result<Value> {
    let a: AlgebraElement<S> = io::element_from_json(sys, &load(element)?)?;
    Ok(match radical_witness(&a, tol.unwrap_or_else(default_tol::<S>))? {
        Some(id) => io::ideal_to_json(&id),
        None => Value::Null,
    })
}

fn parse_arc(s: &str) -> Result<(f64, f64)> {
    let bad = || Error::Format(format!("arc {s:?} is not lo,hi"));
    let (lo, hi) = s.split_once(',').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn run(cli: Cli) -> Result<Value> {
    match cli.command {
        Command::Orbits { system, points } => {
            let sys = load_system(&system)?;
            let orbits = if points.is_empty() {
                sys.orbit_space()?
            } else {
                let pts = points
                    .iter()
                    .map(|p| io::parse_point_str(&sys, p))
                    .collect::<Result<Vec<Point>>>()?;
                sys.orbit_space_of_samples(&pts)?
            };
            Ok(Value::Array(orbits.iter().map(io::orbit_to_json).collect()))
        }
        Command::Predicates { system } => {
            let p = load_system(&system)?.predicates();
            Ok(json!({
                "free": p.free,
                "topologically_free": p.topologically_free,
                "topologically_transitive": p.topologically_transitive,
            }))
        }
        Command::RepMatrix {
            system,
            x,
            lambda,
            element,
            exact,
        } => {
            let sys = load_system(&system)?;
            exact_or_float(
                exact.exact,
                || rep_matrix::<GaussianRational>(&sys, &x, &lambda, &element),
                || rep_matrix::<C64>(&sys, &x, &lambda, &element),
            )
        }
        Command::Apply {
            system,
            x,
            element,
            vector,
            lambda,
            exact,
        } => {
            let sys = load_system(&system)?;
            let l = lambda.as_deref();
            exact_or_float(
                exact.exact,
                || apply::<GaussianRational>(&sys, &x, &element, &vector, l),
                || apply::<C64>(&sys, &x, &element, &vector, l),
            )
        }
        Command::Solve {
            system,
            x,
            rho,
            tau,
            gamma,
            max_steps,
            minimal,
            n1_cap,
            n2_cap,
            exact,
        } => {
            if !(gamma > 0.0 && gamma < 1.0) {
                return Err(Error::InvalidArgument(format!("gamma = {gamma} is not in (0, 1)")));
            }
            let truncation = if minimal || n1_cap.is_some() || n2_cap.is_some() {
                Truncation::Minimal {
                    max_n1: n1_cap,
                    max_n2: n2_cap,
                }
            } else {
                Truncation::Exact
            };
            let opts = SolveOptions {
                gamma,
                max_steps,
                truncation,
            };
            let sys = load_system(&system)?;
            exact_or_float(
                exact.exact,
                || solve::<GaussianRational>(&sys, &x, &rho, &tau, &opts),
                || solve::<C64>(&sys, &x, &rho, &tau, &opts),
            )
        }
        Command::ExtractE0 {
            system,
            x,
            rho,
            n,
            order,
            shape,
            exact,
        } => {
            let sys = load_system(&system)?;
            exact_or_float(
                exact.exact,
                || extract::<GaussianRational>(&sys, &x, &rho, n, order, shape.into()),
                || extract::<C64>(&sys, &x, &rho, n, order, shape.into()),
            )
        }
        Command::IdealMember {
            system,
            ideal,
            element,
            tol,
            exact,
        } => {
            check_tol(tol)?;
            let sys = load_system(&system)?;
            exact_or_float(
                exact.exact,
                || ideal_member::<GaussianRational>(&sys, &ideal, &element, tol),
                || ideal_member::<C64>(&sys, &ideal, &element, tol),
            )
        }
        Command::RadicalWitness {
            system,
            element,
            tol,
            exact,
        } => {
            check_tol(tol)?;
            let sys = load_system(&system)?;
            exact_or_float(
                exact.exact,
                || radical::<GaussianRational>(&sys, &element, tol),
                || radical::<C64>(&sys, &element, tol),
            )
        }
        Command::Inclusion { system, ideal1, ideal2 } => {
            let sys = load_system(&system)?;
            let i1: PrimitiveIdealId<C64> = io::ideal_from_json(&sys, &load(&ideal1)?)?;
            let i2: PrimitiveIdealId<C64> = io::ideal_from_json(&sys, &load(&ideal2)?)?;
            Ok(json!(ideal_inclusion(&i1, &i2)))
        }
        Command::Spectrum {
            system,
            element,
            samples,
        } => {
            if samples == 0 {
                return Err(Error::InvalidArgument("samples must be at least 1".into()));
            }
            let sys = load_system(&system)?;
            let a: AlgebraElement<C64> = io::element_from_json(&sys, &load(&element)?)?;
            let values = spectrum_union(&a, &unit_circle_samples(samples))?;
            // Real spectra are printed as plain numbers.
            if values.iter().all(|z| z.im.abs() <= 1e-10) {
                Ok(json!(values.iter().map(|z| z.re).collect::<Vec<_>>()))
            } else {
                Ok(Value::Array(values.into_iter().map(io::c64_to_json).collect()))
            }
        }
        Command::Closure {
            system,
            set,
            certify,
            grid,
            tol,
        } => {
            let sys = load_system(&system)?;
            let e = io::sspace_subset_from_json(&load(&set)?)?;
            if !certify {
                return Ok(io::sspace_subset_to_json(&hk_closure(&sys, &e)?));
            }
            if grid == 0 {
                return Err(Error::InvalidArgument("grid must be at least 1".into()));
            }
            let opts = WitnessOptions { tol, ..Default::default() };
            let (closure, certs, skipped) = hk_closure_certified(&sys, &e, grid, &opts)?;
            let certs: Vec<Value> = certs
                .iter()
                .map(|c| {
                    let kind = match &c.kind {
                        CertificateKind::OrbitIndicator => json!({"kind": "orbit_indicator"}),
                        CertificateKind::LiftedWitness { order, sup_on_forbidden } => json!({
                            "kind": "lifted_witness",
                            "order": order,
                            "sup_on_forbidden": sup_on_forbidden,
                        }),
                    };
                    json!({
                        "orbit": c.orbit,
                        "angle": c.angle,
                        "certificate": kind,
                        "element": io::element_to_json(&c.element),
                    })
                })
                .collect();
            Ok(json!({
                "closure": io::sspace_subset_to_json(&closure),
                "certificates": certs,
                "skipped_near_set": skipped,
            }))
        }
        Command::Witness {
            arc,
            points,
            lambda0,
            tol,
            max_n,
            margin,
            lift_at,
            system,
        } => {
            if tol <= 0.0 {
                return Err(Error::InvalidArgument("tol must be positive".into()));
            }
            let arcs = arc.iter().map(|a| parse_arc(a)).collect::<Result<Vec<_>>>()?;
            let forbidden = TSubset::new(&arcs, &points)?;
            let mut opts = WitnessOptions { tol, max_n, ..Default::default() };
            if let Some(m) = margin {
                opts.margin = m;
            }
            let w = wiener_witness(&forbidden, lambda0, &opts)?;
            let mut out = io::witness_to_json(&w);
            if let (Some(x), Some(s)) = (lift_at, system) {
                let sys = Arc::new(io::system_from_json(&load(&s)?)?);
                let orbit = sys.orbit(&io::parse_point_str(&sys, &x)?)?;
                out["lifted"] = io::element_to_json(&lift_witness(&sys, &orbit, &w)?);
            }
            Ok(out)
        }
        Command::Structure { system } => {
            let sys = load_system(&system)?;
            Ok(io::description_to_json(&structure_space_describe(&sys)?))
        }
        Command::Validate { file, system } => {
            let text = fs::read_to_string(&file).map_err(|e| Error::Format(format!("{}: {e}", file.display())))?;
            let sys = match system {
                Some(s) => Some(Arc::new(io::system_from_json(&load(&s)?)?)),
                None => None,
            };
            let diags = io::validate_formats(&text, sys.as_ref());
            Ok(Value::Array(
                diags
                    .iter()
                    .map(|d| json!({"line": d.line, "message": d.message}))
                    .collect(),
            ))
        }
    }
}

fn check_tol(tol: Option<f64>) -> Result<()> {
    match tol {
        Some(t) if t.is_nan() || t < 0.0 => Err(Error::InvalidArgument("tol must be nonnegative".into())),
        _ => Ok(()),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::PointOutsideDomain(_) => "point_outside_domain",
        Error::InvalidSystem(_) => "invalid_system",
        Error::SystemMismatch => "system_mismatch",
        Error::BackendMismatch(_) => "backend_mismatch",
        Error::Unsupported(_) => "unsupported",
        Error::OrbitCollision { .. } => "orbit_collision",
        Error::NotInvariant => "not_invariant",
        Error::PeriodicPoint(_) => "periodic_point",
        Error::AperiodicPoint(_) => "aperiodic_point",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Inexact(_) => "inexact",
        Error::ToleranceNotMet(_) => "tolerance_not_met",
        Error::Format(_) => "parse_error",
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Format(_) => 2,
        Error::ToleranceNotMet(_) => 4,
        _ => 3,
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("CROSSED_ELL1_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // Fails only if a pool already exists, which cannot happen this early.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let output = cli.output.clone();
    match run(cli) {
        Ok(v) => {
            let text = serde_json::to_string(&v).expect("JSON values serialize") + "\n";
            match output {
                Some(path) => {
                    if let Err(e) = fs::write(&path, text) {
                        let err = Error::Format(format!("{}: {e}", path.display()));
                        report(&err);
                        return ExitCode::from(2);
                    }
                }
                // a closed pipe (e.g. `| head`) is not an error
                None => {
                    let _ = std::io::Write::write_all(&mut std::io::stdout().lock(), text.as_bytes());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            report(&e);
            ExitCode::from(exit_code(&e))
        }
    }
}

fn report(e: &Error) {
    eprintln!("{}", json!({"error": error_kind(e), "message": e.to_string()}));
}
