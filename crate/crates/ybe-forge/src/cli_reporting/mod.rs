//! Command-line front end: argument parsing, model resolution and versioned
//! JSON reports.

use crate::baxterizer::{bmw_baxterize, detect_families, hecke_baxterize, tl_baxterize, AlgebraFit, BmwSign, Family};
use crate::cba_engine::{
    bethe_residual, chain_spectra, completeness_probe, energy_plump, energy_vacuum, solve_free_momenta,
    spectral_set_compare, BetheRoots, Reference, Scattering, SpectralMatch,
};
use crate::model_catalog::{HamiltonianParams, ModelSpecFile, NamedModel, TwistSpec};
use crate::reconstructor::{certify_no_go, reconstruct_univariate, SearchSpace, UniOutcome, Verdict};
use crate::rmatrix_catalog::{rmatrix_model, sample_curve, sample_curve_random, curve_residual, CurveSpec};
use crate::tensor_core::{ComplexMatrix, C64};
use crate::verifier::{verify_model, ybe_residual_multiplicative, MutatedModel, VerifyConfig, TOL_ALGEBRAIC};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use std::path::PathBuf;
use std::sync::Arc;

pub const SCHEMA: &str = "ybe-forge/1";
pub const THREADS_ENV: &str = "YBE_FORGE_THREADS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "ybe-forge", version, about = "Numerical workbench for R-matrices of three-state spin chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Yang–Baxter, unitarity, regularity and transfer-matrix checks.
    Verify(RunConfig),
    /// Univariate Taylor series of Ř from the model's Hamiltonian.
    Reconstruct(RunConfig),
    /// Twist search for an obstruction to a univariate series.
    CertifyNoGo(RunConfig),
    /// Hecke / Temperley–Lieb / BMW detection and Baxterization.
    Baxterize(RunConfig),
    /// Sector spectra of the periodic chain against Bethe-ansatz energies.
    Spectrum(RunConfig),
    /// Points of the MB/SB curve with their residuals.
    Curve(RunConfig),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Verify(_) => "verify",
            Command::Reconstruct(_) => "reconstruct",
            Command::CertifyNoGo(_) => "certify-no-go",
            Command::Baxterize(_) => "baxterize",
            Command::Spectrum(_) => "spectrum",
            Command::Curve(_) => "curve",
        }
    }

    pub fn config(&self) -> &RunConfig {
        match self {
            Command::Verify(c)
            | Command::Reconstruct(c)
            | Command::CertifyNoGo(c)
            | Command::Baxterize(c)
            | Command::Spectrum(c)
            | Command::Curve(c) => c,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Sb,
    Mb,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RunConfig {
    /// Catalogue name (ZF, IK, GB, MB0, SpR, SB17, V17_2, V14, SB); a `-H` suffix is accepted.
    #[arg(long)]
    pub model: Option<String>,
    /// JSON model spec: {"model": name, "params": {...}} (SpR also takes "entries").
    #[arg(long)]
    pub spec_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    /// Truncation order of series and no-go searches.
    #[arg(long, default_value_t = 8)]
    pub order: usize,
    /// Overrides the pass tolerance of the command.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Test hook: scale Ř entry ROW,COL by 1.1 before verifying.
    #[arg(long, num_args = 0..=1, default_missing_value = "1,3", value_name = "ROW,COL")]
    pub mutate: Option<String>,
    /// Model parameter shortcuts; complex values as `re` or `re,im`.
    #[arg(long)]
    pub k: Option<String>,
    #[arg(long)]
    pub xi: Option<String>,
    #[arg(long)]
    pub theta0: Option<String>,
    #[arg(long)]
    pub lambda4: Option<String>,
    /// Any other model parameter, as NAME=VALUE.
    #[arg(long = "param", value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    /// Chain length (spectrum, transfer-matrix check).
    #[arg(long = "L", default_value_t = 3)]
    pub chain_length: usize,
    #[arg(long, value_enum, default_value_t = Branch::Sb)]
    pub branch: Branch,
    /// Curve coordinate a at which every b is listed.
    #[arg(long)]
    pub a: Option<String>,
    /// Bethe-residual input: {"scattering": {...}, "roots": {"k": [...], "reference": ...}}.
    #[arg(long)]
    pub s_matrix: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_FAIL,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

/// `re`, `re,im` or `[re, im]`.
pub fn parse_complex_arg(s: &str) -> Result<C64, CliError> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    let parts: Vec<&str> = t.split(',').map(str::trim).collect();
    let num = |x: &str| x.parse::<f64>().map_err(|_| usage(format!("not a number: {s}")));
    match parts.as_slice() {
        [r] => Ok(C64::new(num(r)?, 0.0)),
        [r, i] => Ok(C64::new(num(r)?, num(i)?)),
        _ => Err(usage(format!("expected re or re,im: {s}"))),
    }
}

fn cvalue(z: C64) -> Value {
    json!([z.re, z.im])
}

/// Resolve the model from `--spec-file` or `--model` plus parameter flags.
pub fn resolve_model(cfg: &RunConfig) -> Result<NamedModel, CliError> {
    let mut spec = match (&cfg.spec_file, &cfg.model) {
        (Some(_), Some(_)) => return Err(usage("give either --model or --spec-file")),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            ModelSpecFile::parse(&text).map_err(usage)?
        }
        (None, Some(name)) => {
            let name = name.strip_suffix("-H").or_else(|| name.strip_suffix("-h")).unwrap_or(name);
            ModelSpecFile { model: name.to_string(), params: Map::new(), entries: None }
        }
        (None, None) => return Err(usage("--model or --spec-file is required")),
    };
    let shortcuts = [("k", &cfg.k), ("xi", &cfg.xi), ("theta0", &cfg.theta0), ("lambda4", &cfg.lambda4)];
    for (key, v) in shortcuts {
        if let Some(v) = v {
            spec.params.insert(key.into(), cvalue(parse_complex_arg(v)?));
        }
    }
    for p in &cfg.params {
        let (key, v) = p.split_once('=').ok_or_else(|| usage(format!("--param expects NAME=VALUE: {p}")))?;
        spec.params.insert(key.trim().into(), cvalue(parse_complex_arg(v)?));
    }
    spec.to_named().map_err(usage)
}

/// Caps the rayon pool from `YBE_FORGE_THREADS`; the first call wins.
pub fn init_threads() -> Result<Option<usize>, CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(None) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| usage(format!("{THREADS_ENV}={v} is not a positive integer")))?;
    // a second initialization in the same process is harmless
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(Some(n))
}

/// Result of one command before it is wrapped into the report envelope.
pub struct Outcome {
    pub pass: bool,
    pub tolerances: Value,
    pub result: Value,
    pub worst: Value,
}

/// The versioned report; complex numbers are `[re, im]`.
pub fn envelope(cmd: &Command, outcome: &Outcome) -> Value {
    let cfg = cmd.config();
    json!({
        "schema": SCHEMA,
        "version": env!("CARGO_PKG_VERSION"),
        "command": cmd.name(),
        "config": serde_json::to_value(cfg).unwrap_or(Value::Null),
        "seed": cfg.seed,
        "tolerances": outcome.tolerances,
        "pass": outcome.pass,
        "worst": outcome.worst,
        "result": outcome.result,
    })
}

pub fn execute(cmd: &Command) -> Result<Outcome, CliError> {
    let cfg = cmd.config();
    match cmd {
        Command::Verify(_) => cmd_verify(cfg),
        Command::Reconstruct(_) => cmd_reconstruct(cfg),
        Command::CertifyNoGo(_) => cmd_certify_no_go(cfg),
        Command::Baxterize(_) => cmd_baxterize(cfg),
        Command::Spectrum(_) => cmd_spectrum(cfg),
        Command::Curve(_) => cmd_curve(cfg),
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(runtime)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let named = resolve_model(cfg)?;
    let mut model = rmatrix_model(&named).ok_or_else(|| usage(format!("{} has no R-matrix to verify", named.name())))?;
    if let Some(m) = &cfg.mutate {
        let (r, c) = m.split_once(',').ok_or_else(|| usage("--mutate expects ROW,COL"))?;
        let idx = |s: &str| s.trim().parse::<usize>().ok().filter(|&i| i < 9).ok_or_else(|| usage("--mutate index out of range"));
        model = Arc::new(MutatedModel { inner: model, entry: (idx(r)?, idx(c)?), factor: C64::new(1.1, 0.0) });
    }
    let vc = VerifyConfig { samples: cfg.samples, seed: cfg.seed, chain_length: cfg.chain_length, tol: cfg.tol };
    let rep = verify_model(model.as_ref(), &vc);
    let worst = rep
        .checks
        .iter()
        .map(|c| (c.name.clone(), json!({"max_residual": c.max_residual, "point": c.worst_point})))
        .collect::<Map<_, _>>();
    let tolerances = rep.checks.iter().map(|c| (c.name.clone(), json!(c.tolerance))).collect::<Map<_, _>>();
    Ok(Outcome { pass: rep.pass, tolerances: tolerances.into(), worst: worst.into(), result: to_json(&rep)? })
}

pub fn cmd_reconstruct(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let named = resolve_model(cfg)?;
    let h = named.hamiltonian().map_err(usage)?;
    let tol = cfg.tol.unwrap_or(crate::reconstructor::OBSTRUCTION_THRESHOLD);
    let out = reconstruct_univariate(&h, cfg.order, &TwistSpec::default()).map_err(usage)?;
    let tolerances = json!({"consistency": tol});
    Ok(match out {
        UniOutcome::Series(s) => {
            let worst = s.residual_by_order.iter().cloned().fold(0.0, f64::max);
            Outcome {
                pass: worst <= tol,
                tolerances,
                worst: json!({"residual": worst}),
                result: json!({
                    "model": named.name(),
                    "status": "series",
                    "order": s.order(),
                    "norm_index": s.norm_index,
                    "normalization_shift": cvalue(s.normalization_shift),
                    "residual_by_order": s.residual_by_order,
                    "coefficient_max_norm": s.coeffs.iter().map(ComplexMatrix::sup_norm).collect::<Vec<_>>(),
                    "coefficients": to_json(&s.coeffs)?,
                }),
            }
        }
        UniOutcome::Obstructed(mut r) => {
            r.model = named.name().to_string();
            let worst = json!({"order_failed": r.order_failed, "residual": r.order_failed.map(|i| r.residual_by_order[i])});
            Outcome { pass: false, tolerances, worst, result: to_json(&r)? }
        }
    })
}

/// Exit 0 when an obstruction is certified, 1 when a series exists.
pub fn cmd_certify_no_go(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let named = resolve_model(cfg)?;
    let h = named.hamiltonian().map_err(usage)?;
    let space = SearchSpace { seed: cfg.seed, ..SearchSpace::default() };
    let rep = certify_no_go(named.name(), &h, cfg.order, &space);
    let best = rep.starts.iter().map(|s| s.residual).fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        pass: rep.verdict == Verdict::Obstructed,
        tolerances: json!({
            "obstruction": crate::reconstructor::OBSTRUCTION_THRESHOLD,
            "existence": crate::reconstructor::EXISTENCE_THRESHOLD,
        }),
        worst: json!({"best_residual": best, "params": rep.twist_params_at_optimum}),
        result: to_json(&rep)?,
    })
}

fn fit_ybe(fit: &AlgebraFit, cfg: &RunConfig) -> Vec<(String, f64, Option<[C64; 2]>)> {
    let rc_list: Vec<(String, Box<dyn Fn(C64) -> Result<ComplexMatrix, crate::baxterizer::BaxterError>>)> = match fit.family {
        Family::Hecke => vec![("hecke".into(), Box::new(|z| hecke_baxterize(fit, z)))],
        Family::TemperleyLieb => vec![("tl".into(), Box::new(|z| tl_baxterize(fit, z)))],
        Family::Bmw => vec![
            ("bmw+".into(), Box::new(|z| bmw_baxterize(fit, z, BmwSign::Plus))),
            ("bmw-".into(), Box::new(|z| bmw_baxterize(fit, z, BmwSign::Minus))),
        ],
    };
    rc_list
        .into_iter()
        .map(|(name, rc)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut worst = (0.0f64, None);
            let mut done = 0;
            let mut tries = 0;
            while done < cfg.samples.max(1) && tries < 20 * cfg.samples.max(1) {
                tries += 1;
                let mut z = || C64::from_polar(rng.gen_range(0.6..1.6), rng.gen_range(-3.0..3.0));
                let (u, v) = (z(), z());
                let f = |x: C64| rc(x).map_err(|e| crate::rmatrix_catalog::RError::Pole(e.to_string()));
                if let Ok(r) = ybe_residual_multiplicative(f, u, v) {
                    done += 1;
                    if worst.1.is_none() || r > worst.0 {
                        worst = (r, Some([u, v]));
                    }
                }
            }
            (name, worst.0, worst.1)
        })
        .collect()
}

pub fn cmd_baxterize(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let named = resolve_model(cfg)?;
    let h = named.hamiltonian().map_err(usage)?;
    let tol = cfg.tol.unwrap_or(TOL_ALGEBRAIC);
    let fits = detect_families(&h);
    let mut worst = Map::new();
    let mut families = Vec::new();
    let mut pass = !fits.is_empty();
    for fit in &fits {
        let mut ybe = Map::new();
        for (name, r, pt) in fit_ybe(fit, cfg) {
            pass &= r <= tol;
            ybe.insert(name.clone(), json!(r));
            worst.insert(name, json!({"ybe_residual": r, "point": pt.map(|p| p.map(cvalue))}));
        }
        let mut v = to_json(fit)?;
        v["ybe_residual"] = ybe.into();
        families.push(v);
    }
    Ok(Outcome {
        pass,
        tolerances: json!({"relations": crate::baxterizer::RELATION_TOL, "ybe": tol}),
        worst: worst.into(),
        result: json!({"model": named.name(), "families": families}),
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BetheInput {
    scattering: Scattering,
    roots: BetheRoots,
}

fn compare_json(m: &SpectralMatch) -> Value {
    json!({"max_distance": m.max_distance, "pass": m.pass, "clusters": m.clusters,
           "unbalanced": m.unbalanced.iter().map(|&z| cvalue(z)).collect::<Vec<_>>()})
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let named = resolve_model(cfg)?;
    let h = named.hamiltonian().map_err(usage)?;
    let l = cfg.chain_length;
    let params = HamiltonianParams::from_matrix(&h).map_err(usage)?;
    let spectra = chain_spectra(&h, l).map_err(usage)?;
    let tol = cfg.tol.unwrap_or(1e-10 * h.sup_norm().max(1.0));
    let vac_e = |r: &BetheRoots| energy_vacuum(&params, l, r);
    let plu_e = |r: &BetheRoots| energy_plump(&params, l, r);
    let zero = |reference| vec![BetheRoots { k: vec![], reference }];
    let cases: [(&str, usize, Vec<BetheRoots>, &dyn Fn(&BetheRoots) -> _); 4] = [
        ("vacuum_M0", 0, zero(Reference::Vacuum), &vac_e),
        ("vacuum_M1", 1, solve_free_momenta(l, Reference::Vacuum), &vac_e),
        ("plump_N0", 2 * l, zero(Reference::Plump), &plu_e),
        ("plump_N1", 2 * l - 1, solve_free_momenta(l, Reference::Plump), &plu_e),
    ];
    let mut comparisons = Map::new();
    let mut pass = true;
    let mut worst = (String::new(), 0.0f64);
    for (name, m, roots, f) in cases {
        let e: Vec<C64> = roots.iter().map(f).collect::<Result<_, _>>().map_err(runtime)?;
        let cmp = spectral_set_compare(&e, &spectra[m], tol).map_err(runtime)?;
        pass &= cmp.pass;
        if cmp.max_distance >= worst.1 {
            worst = (name.to_string(), cmp.max_distance);
        }
        comparisons.insert(name.into(), json!({"sector": m, "cba": e.iter().map(|&z| cvalue(z)).collect::<Vec<_>>(), "match": compare_json(&cmp)}));
    }
    let probe = if (2..=3).contains(&l) { Some(to_json(&completeness_probe(&h, l, 1e-8).map_err(runtime)?)?) } else { None };
    let bethe = match &cfg.s_matrix {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let input: BetheInput = serde_json::from_str(&text).map_err(|e| usage(format!("S-matrix file: {e}")))?;
            Some(json!(bethe_residual(&input.roots, &input.scattering, l).map_err(runtime)?))
        }
        None => None,
    };
    let sectors: Vec<Value> = spectra
        .iter()
        .enumerate()
        .map(|(m, ev)| json!({"m": m, "eigenvalues": ev.iter().map(|&z| cvalue(z)).collect::<Vec<_>>()}))
        .collect();
    Ok(Outcome {
        pass,
        tolerances: json!({"energy": tol, "probe": 1e-8}),
        worst: json!({"comparison": worst.0, "max_distance": worst.1}),
        result: json!({"model": named.name(), "L": l, "sectors": sectors, "cba": comparisons,
                       "completeness_probe": probe, "bethe_residual": bethe}),
    })
}

pub fn cmd_curve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = match cfg.branch {
        Branch::Sb => {
            let lam = cfg.lambda4.as_deref().map(parse_complex_arg).transpose()?.unwrap_or(C64::new(0.3, 0.0));
            CurveSpec::sb(lam)
        }
        Branch::Mb => {
            let mut alpha = C64::new(1.0, 0.0);
            let mut beta = C64::new(0.5, 0.0);
            for p in &cfg.params {
                match p.split_once('=') {
                    Some(("alpha", v)) => alpha = parse_complex_arg(v)?,
                    Some(("beta", v)) => beta = parse_complex_arg(v)?,
                    _ => return Err(usage(format!("mb branch takes --param alpha=.. / beta=..: {p}"))),
                }
            }
            CurveSpec::mb(alpha, beta)
        }
    };
    let tol = cfg.tol.unwrap_or(TOL_ALGEBRAIC);
    let mut points = Vec::new();
    let mut failures = Vec::new();
    match &cfg.a {
        Some(a) => {
            for p in sample_curve(&spec, parse_complex_arg(a)?).map_err(runtime)? {
                match p {
                    Ok(p) => points.push(p),
                    Err(e) => failures.push(e.to_string()),
                }
            }
        }
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            points.extend((0..cfg.samples).map(|_| sample_curve_random(&spec, &mut rng)));
        }
    }
    let rows: Vec<(crate::rmatrix_catalog::CurvePoint, f64)> = points.iter().map(|p| (*p, curve_residual(p, &spec))).collect();
    let worst = rows.iter().cloned().max_by(|a, b| a.1.total_cmp(&b.1));
    Ok(Outcome {
        pass: failures.is_empty() && !rows.is_empty() && rows.iter().all(|r| r.1 <= tol),
        tolerances: json!({"curve": tol}),
        worst: json!(worst.map(|(p, r)| json!({"a": cvalue(p.a), "b": cvalue(p.b), "residual": r}))),
        result: json!({
            "curve": to_json(&spec)?,
            "points": rows.iter().map(|(p, r)| json!({"a": cvalue(p.a), "b": cvalue(p.b), "residual": r})).collect::<Vec<_>>(),
            "failures": failures,
        }),
    })
}

/// Parse, run and write the report; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("{e}");
        return e.exit_code();
    }
    let report = match execute(&cli.command) {
        Ok(outcome) => (envelope(&cli.command, &outcome), if outcome.pass { EXIT_PASS } else { EXIT_FAIL }),
        Err(e) => {
            eprintln!("error: {e}");
            let v = json!({"schema": SCHEMA, "version": env!("CARGO_PKG_VERSION"), "command": cli.command.name(),
                           "seed": cli.command.config().seed, "error": e.to_string()});
            (v, e.exit_code())
        }
    };
    let text = serde_json::to_string_pretty(&report.0).expect("report serializes") + "\n";
    match &cli.command.config().out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("{}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
        None => print!("{text}"),
    }
    report.1
}
