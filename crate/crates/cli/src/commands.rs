use std::path::{Path, PathBuf};

use clap::Args;
use kexcess::canonical::{DEFAULT_FILTER_TOL, DEFAULT_MAX_ITER};
use kexcess::expsim::{
    bell_max_standard_error, estimate_bell_max, run_sweep_experiment, simulate_bell_records,
    ExperimentConfig, SignalBasis, BELL_ANGLES,
};
use kexcess::fuzz::{fuzz_bounds_with_state, FuzzInstance, InstanceChecks, SLACK_TOL};
use kexcess::io::{self, FilterExport, SURFACE_HEADER, SWEEP_HEADER};
use kexcess::knowledge::{check_bound, distinguishability_excess};
use kexcess::states::werner;
use kexcess::sweep::{angle_grid, excess_surface, knowledge_sweep};
use kexcess::{
    bell_max, canonical_form, filter_normal_form, optimal_meter, optimize_excess_sum,
    QubitMeasurement, TwoQubitState,
};
use serde_json::json;

use crate::config::Resolver;
use crate::{CliError, Common};

type CmdResult = Result<(), CliError>;

/// Writes `text` to `--out` plus its manifest, or to standard output.
fn emit(common: &Common, res: &Resolver, text: &str) -> CmdResult {
    res.check_unused()?;
    let Some(path) = &common.out else {
        print!("{text}");
        return Ok(());
    };
    write_file(path, text)?;
    let manifest_path = PathBuf::from(format!("{}.manifest.json", path.display()));
    let manifest = serde_json::to_string_pretty(&res.manifest(vec![path.clone()]))
        .expect("manifest serializes");
    write_file(&manifest_path, &(manifest + "\n"))?;
    eprintln!("wrote {} and {}", path.display(), manifest_path.display());
    Ok(())
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    std::fs::write(path, text).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn json_text(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("report serializes") + "\n"
}

fn load(path: &Path) -> Result<TwoQubitState, CliError> {
    io::load_state(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

#[derive(Args)]
pub struct GridArgs {
    /// First meter angle in degrees.
    #[arg(long)]
    start: Option<f64>,
    /// Last meter angle in degrees (inclusive).
    #[arg(long)]
    stop: Option<f64>,
    /// Angle step in degrees.
    #[arg(long)]
    step: Option<f64>,
}

/// Resolved `(start, stop, step)` and the inclusive grid.
type Grid = ((f64, f64, f64), Vec<f64>);

fn grid(
    res: &mut Resolver,
    prefix: &str,
    args: &GridArgs,
    default: (f64, f64, f64),
) -> Result<Grid, CliError> {
    let start = res.get(&format!("{prefix}start"), args.start, default.0)?;
    let stop = res.get(&format!("{prefix}stop"), args.stop, default.1)?;
    let step = res.get(&format!("{prefix}step"), args.step, default.2)?;
    if !(start.is_finite() && stop.is_finite() && step.is_finite() && step > 0.0 && stop >= start) {
        return Err(CliError::input(format!(
            "invalid angle grid {start}..{stop} step {step}"
        )));
    }
    if (stop - start) / step > 1e6 {
        return Err(CliError::input("angle grid has more than 10^6 points"));
    }
    Ok(((start, stop, step), angle_grid(start, stop, step)))
}

#[derive(Args)]
pub struct NoiseArgs {
    /// Detected pairs per second.
    #[arg(long)]
    pair_rate: Option<f64>,
    /// Seconds per measurement point.
    #[arg(long)]
    duration: Option<f64>,
    /// Accidental coincidences per second in each outcome channel.
    #[arg(long)]
    dark_rate: Option<f64>,
}

fn experiment_config(
    res: &mut Resolver,
    common: &Common,
    args: &NoiseArgs,
) -> Result<ExperimentConfig, CliError> {
    let d = ExperimentConfig::default();
    let cfg = ExperimentConfig {
        pair_rate: res.get("pair-rate", args.pair_rate, d.pair_rate)?,
        duration: res.get("duration", args.duration, d.duration)?,
        dark_coincidence_rate: res.get("dark-rate", args.dark_rate, d.dark_coincidence_rate)?,
        seed: res.get("seed", common.seed, d.seed)?,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// `--state FILE` if given, else the Werner state with `--p`.
fn state_source(
    res: &mut Resolver,
    state: Option<PathBuf>,
    p: Option<f64>,
) -> Result<TwoQubitState, CliError> {
    match res.get_opt("state", state)? {
        Some(path) => load(&path),
        None => Ok(werner(res.get("p", p, 0.82)?)?),
    }
}

fn basis(name: &str) -> Result<SignalBasis, CliError> {
    match name {
        "hv" => Ok(SignalBasis::Hv),
        "xy" => Ok(SignalBasis::Xy),
        other => Err(CliError::input(format!(
            "unknown basis `{other}` (expected hv or xy)"
        ))),
    }
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// State file: {"matrix": ...} or {"factory": ...}.
    state: Option<PathBuf>,
}

pub fn analyze(common: &Common, args: AnalyzeArgs) -> CmdResult {
    let mut res = Resolver::new("analyze", common.config.as_deref())?;
    let path = res
        .get_opt("state", args.state)?
        .ok_or_else(|| CliError::input("analyze needs a state file"))?;
    let st = load(&path)?;
    let form = st.bloch();
    let canon = canonical_form(&st);
    let s = QubitMeasurement::along(canon.o_signal.column(0).into_owned())?;
    let sp = QubitMeasurement::along(canon.o_signal.column(1).into_owned())?;
    let (m, mp) = (
        optimal_meter(&st, &s).measurement,
        optimal_meter(&st, &sp).measurement,
    );
    let check = check_bound(&st, &s, &sp, &m, &mp)?;
    let b = bell_max(&st);
    let report = json!({
        "bloch": form,
        "eigenvalues": st.eigenvalues(),
        "canonical": {
            "diag": [canon.diag[0], canon.diag[1], canon.diag[2]],
            "o_signal": rows3(&canon.o_signal),
            "o_meter": rows3(&canon.o_meter),
        },
        "b_max": b,
        "chsh_violated": b > 2.0,
        "canonical_pair": {
            "signal": s,
            "signal_prime": sp,
            "meter": m,
            "meter_prime": mp,
            "delta_d": distinguishability_excess(&form, &s),
            "delta_d_prime": distinguishability_excess(&form, &sp),
            "check": check,
        },
    });
    eprintln!(
        "B_max = {b:.6}, canonical-pair sum = {:.6}, bound = {:.6}",
        check.sum, check.bound
    );
    emit(common, &res, &json_text(&report))
}

fn rows3(m: &kexcess::linalg::Mat3) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

#[derive(Args)]
pub struct SweepArgs {
    /// Werner parameter p (ignored with --state).
    #[arg(long)]
    p: Option<f64>,
    /// State file instead of a Werner state.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Signal basis: hv or xy.
    #[arg(long)]
    basis: Option<String>,
    /// Simulate Poisson counts for the estimate columns.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    noise: Option<bool>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    rates: NoiseArgs,
}

pub fn sweep(common: &Common, args: SweepArgs) -> CmdResult {
    let mut res = Resolver::new("sweep", common.config.as_deref())?;
    let st = state_source(&mut res, args.state, args.p)?;
    let b = basis(&res.get("basis", args.basis, "hv".to_string())?)?;
    let (_, thetas) = grid(&mut res, "", &args.grid, (0.0, 90.0, 5.0))?;
    let noise = if res.get("noise", args.noise, false)? {
        Some(experiment_config(&mut res, common, &args.rates)?)
    } else {
        None
    };
    let points = knowledge_sweep(&st, b, &thetas, noise.as_ref())?;
    emit(
        common,
        &res,
        &io::csv(SWEEP_HEADER, points.iter().map(|p| p.row())),
    )
}

#[derive(Args)]
pub struct SurfaceArgs {
    /// Werner parameter p (ignored with --state).
    #[arg(long)]
    p: Option<f64>,
    /// State file instead of a Werner state.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Simulate Poisson counts for the excess columns.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    noise: Option<bool>,
    #[command(flatten)]
    grid: GridArgs,
    /// First ϑ' (X/Y signal) angle; defaults to the ϑ grid.
    #[arg(long)]
    prime_start: Option<f64>,
    #[arg(long)]
    prime_stop: Option<f64>,
    #[arg(long)]
    prime_step: Option<f64>,
    #[command(flatten)]
    rates: NoiseArgs,
}

pub fn surface(common: &Common, args: SurfaceArgs) -> CmdResult {
    let mut res = Resolver::new("surface", common.config.as_deref())?;
    let st = state_source(&mut res, args.state, args.p)?;
    let (bounds, thetas) = grid(&mut res, "", &args.grid, (0.0, 90.0, 5.0))?;
    let prime = GridArgs {
        start: args.prime_start,
        stop: args.prime_stop,
        step: args.prime_step,
    };
    let (_, primes) = grid(&mut res, "prime-", &prime, bounds)?;
    let noise = if res.get("noise", args.noise, false)? {
        Some(experiment_config(&mut res, common, &args.rates)?)
    } else {
        None
    };
    let points = excess_surface(&st, &thetas, &primes, noise.as_ref())?;
    emit(
        common,
        &res,
        &io::csv(SURFACE_HEADER, points.iter().map(|p| p.row())),
    )
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Werner parameter p.
    #[arg(long)]
    p: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    rates: NoiseArgs,
}

/// Measured Bell factors of the two prepared states, for comparison.
const MEASURED: [(f64, f64, f64); 2] = [(0.82, 2.36, 0.02), (0.45, 1.32, 0.02)];

pub fn simulate(common: &Common, args: SimulateArgs) -> CmdResult {
    let mut res = Resolver::new("simulate", common.config.as_deref())?;
    let p = res.get("p", args.p, 0.82)?;
    let (_, thetas) = grid(&mut res, "", &args.grid, (0.0, 90.0, 5.0))?;
    let cfg = experiment_config(&mut res, common, &args.rates)?;
    let angles: Vec<_> = [SignalBasis::Hv, SignalBasis::Xy]
        .iter()
        .flat_map(|&b| thetas.iter().map(move |&t| (t, b)))
        .collect();
    let rows = run_sweep_experiment(p, &angles, &cfg)?;
    let st = werner(p)?;
    let records = simulate_bell_records(&st, &cfg, angles.len() as u64);
    let b_hat = estimate_bell_max(&records)?;
    let se = bell_max_standard_error(&records)?;
    let theory = bell_max(&st);
    let measured = MEASURED
        .iter()
        .find(|m| (m.0 - p).abs() < 1e-9)
        .map(|&(_, b, e)| (b, e));
    eprintln!(
        "B_max estimate {b_hat:.4} ± {se:.4} (theory {theory:.4}, {:.1} standard errors)",
        (b_hat - theory) / se
    );
    if let Some((b, e)) = measured {
        let spread = (se * se + e * e).sqrt();
        eprintln!(
            "measured reference {b:.2} ± {e:.2}: {:.1} combined standard errors from this estimate",
            (b - b_hat) / spread
        );
    }
    let report = json!({
        "p": p,
        "config": cfg,
        "rows": rows,
        "bell": {
            "angles": BELL_ANGLES,
            "records": records,
            "b_max_hat": b_hat,
            "standard_error": se,
            "b_max_theory": theory,
            "measured_reference": measured.map(|(b, e)| json!({ "b_max": b, "error": e })),
        },
    });
    emit(common, &res, &json_text(&report))
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Number of random instances.
    #[arg(long)]
    trials: Option<u64>,
    /// Use this state for every instance; measurements stay random.
    #[arg(long)]
    state: Option<PathBuf>,
    /// Re-check one instance previously written with --dump.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Where to write the worst instance. Written always when given, and to
    /// `violation.json` when a violation is found without it.
    #[arg(long)]
    dump: Option<PathBuf>,
}

pub fn verify(common: &Common, args: VerifyArgs) -> CmdResult {
    let mut res = Resolver::new("verify", common.config.as_deref())?;
    if let Some(path) = res.get_opt("replay", args.replay)? {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let inst: FuzzInstance = serde_json::from_str(&text)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let checks = inst.check()?;
        eprintln!(
            "replayed trial {}: slack {:e}, same-meter slack {:e}",
            inst.trial, checks.bell.slack, checks.same_meter.slack
        );
        emit(common, &res, &json_text(&checks))?;
        return violation_check(&checks, &format!("replayed trial {}", inst.trial));
    }
    let trials = res.get("trials", args.trials, 10_000)?;
    if trials == 0 {
        return Err(CliError::input("trials must be at least 1"));
    }
    let seed = res.get("seed", common.seed, 1)?;
    let forced = match res.get_opt("state", args.state)? {
        Some(path) => Some(load(&path)?),
        None => None,
    };
    let dump = res.get_opt("dump", args.dump)?;
    let summary = fuzz_bounds_with_state(trials, seed, forced.as_ref());
    eprintln!(
        "{trials} trials, seed {seed}: min slack {:e}, min same-meter slack {:e}, {} violations",
        summary.min_slack, summary.min_same_meter_slack, summary.violations
    );
    emit(common, &res, &json_text(&summary))?;
    let worst = if summary.min_slack <= summary.min_same_meter_slack {
        &summary.worst
    } else {
        &summary.worst_same_meter
    };
    if !summary.passed() {
        let path = dump.unwrap_or_else(|| PathBuf::from("violation.json"));
        write_file(&path, &json_text(worst))?;
        return Err(CliError::Violation(format!(
            "{} violating instances; worst written to {}",
            summary.violations,
            path.display()
        )));
    }
    if let Some(path) = dump {
        write_file(&path, &json_text(worst))?;
    }
    Ok(())
}

/// `Violation` when either slack is below the tolerance.
fn violation_check(checks: &InstanceChecks, what: &str) -> CmdResult {
    if checks.bell.slack < SLACK_TOL || checks.same_meter.slack < SLACK_TOL {
        Err(CliError::Violation(format!(
            "{what} violates a bound: slack {:e}, same-meter slack {:e}",
            checks.bell.slack, checks.same_meter.slack
        )))
    } else {
        Ok(())
    }
}

#[derive(Args)]
pub struct FilterArgs {
    /// State file: {"matrix": ...} or {"factory": ...}.
    state: Option<PathBuf>,
    /// Target deviation of both reductions from 𝟙/2.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

pub fn filter(common: &Common, args: FilterArgs) -> CmdResult {
    let mut res = Resolver::new("filter", common.config.as_deref())?;
    let path = res
        .get_opt("state", args.state)?
        .ok_or_else(|| CliError::input("filter needs a state file"))?;
    let tol = res.get("tol", args.tol, DEFAULT_FILTER_TOL)?;
    let max_iter = res.get("max-iter", args.max_iter, DEFAULT_MAX_ITER)?;
    let st = load(&path)?;
    let r = filter_normal_form(&st, tol, max_iter).map_err(|e| match e {
        kexcess::Error::SingularReduction { .. } => CliError::input(format!(
            "{e}; the state has a (nearly) pure reduced state and no Bell-diagonal normal form"
        )),
        other => other.into(),
    })?;
    let check = optimize_excess_sum(&r.state_out).check;
    eprintln!(
        "b_max_in {:.6}, b_max_out {:.6}, post-filter slack {:e}, success probability {:.6}",
        r.b_max_in, r.b_max_out, check.slack, r.success_probability
    );
    if r.b_max_out < r.b_max_in - 1e-9 {
        eprintln!(
            "note: filtering lowered B_max; this can happen for states within the CHSH bound"
        );
    }
    let report = json!({ "filter": FilterExport::from(&r), "saturation": check });
    emit(common, &res, &json_text(&report))
}
