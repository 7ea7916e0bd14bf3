use std::fmt::Write as _;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use enttime::stencil::fit_line;
use enttime::{
    entanglement_timescale, entropy_series, first_derivative_check, measured_curvature, predicted_curvature,
    von_neumann_curvature_probe, EntropyOrder, Evolution, TimescaleReport,
};

use crate::error::CliError;
use crate::report::{CheckRow, RunReport, Status, VerifyReport};
use crate::spec::ResolvedModel;

const TOOL: &str = "enttime";
const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Probe times in units of `1 / rate`.
const PROBE_TIMES: [f64; 4] = [1e-2, 1e-3, 1e-4, 1e-5];
/// Fit window for the sixth-order onset, in units of `1 / rate`.
const ONSET_WINDOW: (f64, f64) = (1e-3, 1e-1);
const ONSET_POINTS: usize = 9;
const ONSET_SLOPE: f64 = 6.0;
const ONSET_SLOPE_TOL: f64 = 0.1;
const MIN_R_SQUARED: f64 = 0.99;
const FIRST_DERIVATIVE_TOL: f64 = 1e-6;
const FIRST_DERIVATIVE_STEP: f64 = 1e-4;

pub struct Stamp {
    start: Instant,
    reproducible: bool,
}

impl Stamp {
    pub fn new(reproducible: bool) -> Self {
        Self { start: Instant::now(), reproducible }
    }

    fn wall_time(&self) -> Option<f64> {
        (!self.reproducible).then(|| self.start.elapsed().as_secs_f64())
    }

    fn timestamp(&self) -> Option<f64> {
        if self.reproducible {
            return None;
        }
        SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs_f64())
    }
}

fn renyi_alphas(orders: &[EntropyOrder]) -> Result<Vec<u32>, CliError> {
    let mut alphas = orders
        .iter()
        .map(|o| match o {
            EntropyOrder::Renyi(a) if *a >= 2 => Ok(*a),
            _ => Err(CliError::Schema(format!("alpha {o} is not an integer >= 2"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    alphas.sort_unstable();
    alphas.dedup();
    Ok(alphas)
}

fn warn_degenerate(report: &TimescaleReport) {
    if report.degenerate {
        log::warn!(
            "degenerate timescale: T_ent^-2 = {:.3e} is below tolerance for scale {:.3e}; onset is slower than t^2",
            report.raw_t_ent_inv_sq,
            report.scale
        );
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

pub fn timescale(model: &ResolvedModel, orders: &[EntropyOrder], stamp: &Stamp) -> Result<String, CliError> {
    let alphas = renyi_alphas(orders)?;
    let report = entanglement_timescale(&model.hamiltonian, &model.state)?;
    warn_degenerate(&report);
    let predictions = alphas.iter().map(|&a| predicted_curvature(&report, a)).collect::<Result<Vec<_>, _>>()?;
    let run = RunReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        degenerate: report.degenerate,
        spec: model.echo.clone(),
        natural_rate: model.rate,
        t_ent_natural: report.t_ent.map(|t| t * model.rate),
        timescale: (&report).into(),
        predictions,
        wall_time_s: stamp.wall_time(),
        timestamp_unix: stamp.timestamp(),
    };
    to_json(&run)
}

pub struct EvolveOptions {
    pub t_max: Option<f64>,
    pub points: usize,
    pub ln2_units: bool,
    pub spectra: bool,
}

/// CSV with one row per `(alpha, t)`, sorted by alpha then time. Von Neumann
/// rows use alpha = 1.
pub fn evolve(model: &ResolvedModel, orders: &[EntropyOrder], opts: &EvolveOptions) -> Result<String, CliError> {
    if opts.points < 2 {
        return Err(CliError::Schema(format!("--points must be at least 2, got {}", opts.points)));
    }
    let t_max = opts.t_max.unwrap_or(3.0 / model.rate);
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(CliError::Schema(format!("--t-max must be positive, got {t_max}")));
    }
    let (da, db) = (model.hamiltonian.dim_a(), model.hamiltonian.dim_b());
    if opts.spectra && da.min(db) != 2 {
        return Err(CliError::Schema(format!("spectrum columns need a qubit subsystem, model is {da}x{db}")));
    }
    let mut orders = orders.to_vec();
    orders.sort_by_key(alpha_of);
    orders.dedup();

    let grid: Vec<f64> = (0..opts.points).map(|k| t_max * k as f64 / (opts.points - 1) as f64).collect();
    let series = entropy_series(&model.hamiltonian, &model.state, &orders, &grid, opts.spectra)?;
    let unit = if opts.ln2_units { std::f64::consts::LN_2 } else { 1.0 };

    let mut csv = String::from(if opts.spectra { "t,alpha,entropy,p1,p2\n" } else { "t,alpha,entropy\n" });
    for s in &series {
        for (k, (&t, &v)) in s.times.iter().zip(&s.values).enumerate() {
            let v = v / unit;
            if !v.is_finite() {
                return Err(CliError::Numeric(format!("non-finite entropy at t = {t}")));
            }
            write!(csv, "{t},{},{v:e}", alpha_of(&s.order)).expect("writing to a String");
            if let Some(sp) = &s.spectra {
                let p = &sp[k];
                write!(csv, ",{:e},{:e}", p[0], p.get(1).copied().unwrap_or(0.0)).expect("writing to a String");
            }
            csv.push('\n');
        }
    }
    Ok(csv)
}

fn alpha_of(order: &EntropyOrder) -> u32 {
    match order {
        EntropyOrder::Renyi(a) => *a,
        EntropyOrder::VonNeumann => 1,
    }
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp()).collect()
}

pub fn verify(
    model: &ResolvedModel,
    orders: &[EntropyOrder],
    tolerance: f64,
    stamp: &Stamp,
) -> Result<VerifyReport, CliError> {
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(CliError::Schema(format!("--tolerance must be positive, got {tolerance}")));
    }
    let (h, s, rate) = (&model.hamiltonian, &model.state, model.rate);
    let report = entanglement_timescale(h, s)?;
    warn_degenerate(&report);
    let reference = report.reference_time();
    let step = reference * enttime::timescale::CURVATURE_STEP_FRACTION;

    let mut want_vn = false;
    let mut alphas = Vec::new();
    for o in orders {
        match o {
            EntropyOrder::VonNeumann => want_vn = true,
            EntropyOrder::Renyi(a) if *a >= 2 => alphas.push(*a),
            _ => return Err(CliError::Schema(format!("alpha {o} is not 1 or an integer >= 2"))),
        }
    }
    alphas.sort_unstable();
    alphas.dedup();

    let mut checks = Vec::new();
    for &alpha in &alphas {
        let measured = measured_curvature(h, s, EntropyOrder::Renyi(alpha), Some(step))?;
        if !measured.is_finite() {
            return Err(CliError::Numeric(format!(
                "curvature stencil for alpha = {alpha} is not finite (step {step:.3e}, reference time {reference:.3e})"
            )));
        }
        let predicted = predicted_curvature(&report, alpha)?.curvature;
        let row = if report.degenerate {
            // no scale to compare against, so measure in units of the reference time
            let error = measured.abs() * reference * reference;
            CheckRow {
                check: "curvature_degenerate".into(),
                alpha,
                expected: 0.0,
                measured,
                error,
                tolerance,
                status: if error <= tolerance { Status::Pass } else { Status::Fail },
                note: format!("|d2S/dt2| x ref^2, step {step:.3e}"),
            }
        } else {
            let error = ((measured - predicted) / predicted).abs();
            CheckRow {
                check: "curvature".into(),
                alpha,
                expected: predicted,
                measured,
                error,
                tolerance,
                status: if error <= tolerance { Status::Pass } else { Status::Fail },
                note: format!("step {step:.3e}"),
            }
        };
        checks.push(row);

        let dt = FIRST_DERIVATIVE_STEP / rate;
        let slope = (first_derivative_check(h, s, alpha, dt)? / rate).abs();
        checks.push(CheckRow {
            check: "first_derivative".into(),
            alpha,
            expected: 0.0,
            measured: slope,
            error: slope,
            tolerance: FIRST_DERIVATIVE_TOL,
            status: if slope <= FIRST_DERIVATIVE_TOL { Status::Pass } else { Status::Fail },
            note: "|dS/d(rate t)| at 0".into(),
        });
    }

    if report.degenerate {
        checks.push(onset_fit(model)?);
    }
    if want_vn {
        checks.push(log_divergence_fit(model, &report)?);
    }

    let all_pass = checks.iter().all(|r| r.status != Status::Fail);
    Ok(VerifyReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        degenerate: report.degenerate,
        spec: model.echo.clone(),
        natural_rate: rate,
        timescale: (&report).into(),
        checks,
        all_pass,
        wall_time_s: stamp.wall_time(),
        timestamp_unix: stamp.timestamp(),
    })
}

/// Log-log slope of `S_2` near zero for a degenerate timescale.
fn onset_fit(model: &ResolvedModel) -> Result<CheckRow, CliError> {
    let evolution = Evolution::new(&model.hamiltonian, &model.state)?;
    let x = logspace(ONSET_WINDOW.0, ONSET_WINDOW.1, ONSET_POINTS);
    let mut ln_s = Vec::with_capacity(x.len());
    for &xt in &x {
        let s2 = evolution.entropy_at(EntropyOrder::Renyi(2), xt / model.rate)?;
        if !(s2 > 0.0 && s2.is_finite()) {
            return Err(CliError::Numeric(format!(
                "S_2 = {s2:e} at rate*t = {xt:e} cannot be fitted on a log scale; the model may not entangle at all"
            )));
        }
        ln_s.push(s2.ln());
    }
    let ln_x: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let fit = fit_line(&ln_x, &ln_s)?;
    if !(fit.slope.is_finite() && fit.r_squared >= MIN_R_SQUARED) {
        return Err(CliError::Numeric(format!(
            "unstable onset fit: slope {}, R^2 {} over rate*t in [{:e}, {:e}]",
            fit.slope, fit.r_squared, ONSET_WINDOW.0, ONSET_WINDOW.1
        )));
    }
    let error = (fit.slope - ONSET_SLOPE).abs();
    Ok(CheckRow {
        check: "sixth_order".into(),
        alpha: 2,
        expected: ONSET_SLOPE,
        measured: fit.slope,
        error,
        tolerance: ONSET_SLOPE_TOL,
        status: if error <= ONSET_SLOPE_TOL { Status::Pass } else { Status::Fail },
        note: format!("log-log slope of S_2, R^2 {:.6}", fit.r_squared),
    })
}

/// Fits `d2S_vN/dt2 = a + b ln(rate t)`; `b` should approach `-4 T_ent^-2`.
fn log_divergence_fit(model: &ResolvedModel, report: &TimescaleReport) -> Result<CheckRow, CliError> {
    let times = PROBE_TIMES.map(|x| x / model.rate);
    let probe = von_neumann_curvature_probe(&model.hamiltonian, &model.state, &times)?;
    let x: Vec<f64> = probe.iter().map(|(t, _)| (t * model.rate).ln()).collect();
    let y: Vec<f64> = probe.iter().map(|(_, d2)| *d2).collect();
    if y.iter().any(|v| !v.is_finite()) {
        let diag: Vec<String> = probe.iter().map(|(t, d2)| format!("t={t:.1e}: {d2}")).collect();
        return Err(CliError::Numeric(format!("von Neumann probe not finite: {}", diag.join(", "))));
    }
    let fit = fit_line(&x, &y)?;
    let expected = -4.0 * report.t_ent_inv_sq;
    let error = if expected != 0.0 { ((fit.slope - expected) / expected).abs() } else { fit.slope.abs() };
    Ok(CheckRow {
        check: "log_divergence".into(),
        alpha: 1,
        expected,
        measured: fit.slope,
        error,
        tolerance: 0.0,
        status: Status::Info,
        note: format!("fit a + b ln(rate t): a = {:.6e}, R^2 {:.6}", fit.intercept, fit.r_squared),
    })
}
