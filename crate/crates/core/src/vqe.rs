//! Classical outer loop of the VQE: derivative-free minimizers, the energy
//! cost for each encoding, and the shot-scaling experiment.

use std::cell::RefCell;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Encoding, PauliSum};
use crate::simulator::{
    angles_for, expectation_exact, expectation_sampled, pauli_expectation, prepare_state,
    ReadoutNoiseModel,
};

/// Default starting state for the ansatz, in the block basis.
pub const GOOD_INITIAL_STATE: [f64; 4] = [0.0, -FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Adaptive Nelder-Mead simplex.
    Simplex,
    /// COBYLA (linear approximations in a trust region).
    LinearTrustRegion,
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simplex" | "nelder-mead" => Ok(Method::Simplex),
            "linear-trust-region" | "cobyla" => Ok(Method::LinearTrustRegion),
            _ => Err(Error::InvalidParameter(format!("unknown optimizer {s:?}"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Simplex => "simplex",
            Method::LinearTrustRegion => "linear-trust-region",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub method: Method,
    /// Budget shared by the initial run and all restarts.
    pub max_iterations: usize,
    /// Absolute function tolerance (MeV² for energies).
    pub ftol: f64,
    /// Simplex size tolerance in radians.
    pub xatol: f64,
    pub initial_step: f64,
    pub restarts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            method: Method::Simplex,
            max_iterations: 500,
            ftol: 1.0,
            xatol: 1e-4,
            initial_step: 0.5,
            restarts: 2,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        if !(self.ftol > 0.0) || !(self.xatol > 0.0) || !(self.initial_step > 0.0) {
            return Err(Error::InvalidParameter(
                "tolerances and the initial step must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// A cost value with its statistical uncertainty (zero when exact).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostValue {
    pub value: f64,
    pub std_error: f64,
}

impl CostValue {
    pub fn exact(value: f64) -> Self {
        Self { value, std_error: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    /// Best value seen so far.
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub std_error: f64,
    pub trace: Vec<TracePoint>,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

impl OptimizationResult {
    /// First iteration whose best value is within `tol` of `target`.
    pub fn iterations_to_reach(&self, target: f64, tol: f64) -> Option<usize> {
        self.trace
            .iter()
            .find(|t| (t.energy - target).abs() <= tol)
            .map(|t| t.iteration)
    }
}

struct Tracker<F> {
    cost: F,
    evaluations: usize,
    best: Option<(Vec<f64>, CostValue)>,
}

impl<F: FnMut(&[f64]) -> Result<CostValue>> Tracker<F> {
    fn eval(&mut self, x: &[f64]) -> Result<CostValue> {
        let v = (self.cost)(x)?;
        if !v.value.is_finite() {
            return Err(Error::Numerical(format!("cost is not finite at {x:?}")));
        }
        self.evaluations += 1;
        if self.best.as_ref().is_none_or(|(_, b)| v.value < b.value) {
            self.best = Some((x.to_vec(), v));
        }
        Ok(v)
    }

    fn best_value(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |(_, b)| b.value)
    }
}

/// Minimizes `cost` from `x0`. Returns the best point seen; `converged` is
/// false when the iteration budget ran out first.
pub fn minimize<F>(cost: F, x0: &[f64], config: &OptimizerConfig) -> Result<OptimizationResult>
where
    F: FnMut(&[f64]) -> Result<CostValue>,
{
    config.validate()?;
    if x0.is_empty() {
        return Err(Error::InvalidParameter("empty starting point".into()));
    }
    let mut tracker = Tracker {
        cost,
        evaluations: 0,
        best: None,
    };
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut start = x0.to_vec();
    let mut converged = false;
    for round in 0..=config.restarts {
        if iterations >= config.max_iterations {
            break;
        }
        let before = tracker.best_value();
        converged = match config.method {
            Method::Simplex => nelder_mead(&mut tracker, &start, config, &mut iterations, &mut trace)?,
            Method::LinearTrustRegion => cobyla_run(&mut tracker, &start, config, &mut iterations, &mut trace)?,
        };
        let after = tracker.best_value();
        start = tracker.best.as_ref().map(|(x, _)| x.clone()).unwrap_or(start);
        // A restart that finds nothing better ends the search.
        if round > 0 && converged && before - after <= config.ftol {
            break;
        }
    }
    let (x, best) = tracker.best.clone().ok_or(Error::Numerical("no evaluations".into()))?;
    Ok(OptimizationResult {
        x,
        value: best.value,
        std_error: best.std_error,
        trace,
        iterations,
        evaluations: tracker.evaluations,
        converged,
    })
}

fn nelder_mead<F: FnMut(&[f64]) -> Result<CostValue>>(
    t: &mut Tracker<F>,
    x0: &[f64],
    cfg: &OptimizerConfig,
    iterations: &mut usize,
    trace: &mut Vec<TracePoint>,
) -> Result<bool> {
    let n = x0.len();
    let nf = n as f64;
    // adaptive coefficients for dimension n
    let (alpha, beta, gamma, delta) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let mut simplex: Vec<(Vec<f64>, CostValue)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), t.eval(x0)?));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += cfg.initial_step;
        let f = t.eval(&x)?;
        simplex.push((x, f));
    }
    let affine = |a: &[f64], b: &[f64], s: f64| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + s * (q - p)).collect() };
    while *iterations < cfg.max_iterations {
        simplex.sort_by(|a, b| a.1.value.total_cmp(&b.1.value));
        let f0 = simplex[0].1.value;
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        let f_spread = simplex[1..].iter().map(|(_, f)| (f.value - f0).abs()).fold(0.0, f64::max);
        let noise = simplex.iter().map(|(_, f)| f.std_error).fold(0.0, f64::max);
        if x_spread <= cfg.xatol && f_spread <= cfg.ftol.max(3.0 * noise) {
            return Ok(true);
        }
        *iterations += 1;
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / nf)
            .collect();
        let worst = simplex[n].clone();
        let xr = affine(&centroid, &worst.0, -alpha);
        let fr = t.eval(&xr)?;
        if fr.value < f0 {
            let xe = affine(&centroid, &xr, beta);
            let fe = t.eval(&xe)?;
            simplex[n] = if fe.value < fr.value { (xe, fe) } else { (xr, fr) };
        } else if fr.value < simplex[n - 1].1.value {
            simplex[n] = (xr, fr);
        } else {
            let outside = fr.value < worst.1.value;
            let xc = if outside {
                affine(&centroid, &xr, gamma)
            } else {
                affine(&centroid, &worst.0, gamma)
            };
            let fc = t.eval(&xc)?;
            let accept = if outside { fc.value <= fr.value } else { fc.value < worst.1.value };
            if accept {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let x = affine(&best, &v.0, delta);
                    let f = t.eval(&x)?;
                    *v = (x, f);
                }
            }
        }
        trace.push(TracePoint {
            iteration: *iterations,
            energy: t.best_value(),
        });
    }
    Ok(false)
}

fn cobyla_run<F: FnMut(&[f64]) -> Result<CostValue>>(
    t: &mut Tracker<F>,
    x0: &[f64],
    cfg: &OptimizerConfig,
    iterations: &mut usize,
    trace: &mut Vec<TracePoint>,
) -> Result<bool> {
    let budget = cfg.max_iterations - *iterations;
    let cell = RefCell::new((t, Vec::<TracePoint>::new(), None::<Error>, *iterations));
    let objective = |x: &[f64], _: &mut ()| -> f64 {
        let mut guard = cell.borrow_mut();
        let (tracker, tr, err, it) = &mut *guard;
        if err.is_some() {
            return f64::MAX;
        }
        match tracker.eval(x) {
            Ok(v) => {
                *it += 1;
                let best = tracker.best_value();
                tr.push(TracePoint {
                    iteration: *it,
                    energy: best,
                });
                v.value
            }
            Err(e) => {
                *err = Some(e);
                f64::MAX
            }
        }
    };
    let bounds = vec![(-100.0, 100.0); x0.len()];
    let no_constraints: Vec<fn(&[f64], &mut ()) -> f64> = Vec::new();
    let stop = cobyla::StopTols {
        ftol_abs: cfg.ftol,
        xtol_abs: vec![cfg.xatol; x0.len()],
        ..Default::default()
    };
    let outcome = cobyla::minimize(
        objective,
        x0,
        &bounds,
        &no_constraints,
        (),
        budget,
        cobyla::RhoBeg::All(cfg.initial_step),
        Some(stop),
    );
    let (_, tr, err, it) = cell.into_inner();
    if let Some(e) = err {
        return Err(e);
    }
    trace.extend(tr);
    *iterations = it;
    Ok(matches!(
        outcome,
        Ok((
            cobyla::SuccessStatus::Success
                | cobyla::SuccessStatus::FtolReached
                | cobyla::SuccessStatus::XtolReached,
            _,
            _
        ))
    ))
}

/// How energies are evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Sampling {
    Exact,
    Shots {
        shots_per_term: u64,
        noise: Option<ReadoutNoiseModel>,
        mitigate: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvaluationMode {
    Exact,
    Sampled,
    SampledNoise,
    SampledNoiseMitigated,
}

impl EvaluationMode {
    pub fn label(self) -> &'static str {
        match self {
            EvaluationMode::Exact => "exact",
            EvaluationMode::Sampled => "sampled",
            EvaluationMode::SampledNoise => "sampled+noise",
            EvaluationMode::SampledNoiseMitigated => "sampled+noise+mitigation",
        }
    }
}

impl fmt::Display for EvaluationMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Sampling {
    pub fn mode(&self) -> EvaluationMode {
        match self {
            Sampling::Exact => EvaluationMode::Exact,
            Sampling::Shots { noise: None, .. } => EvaluationMode::Sampled,
            Sampling::Shots { mitigate: false, .. } => EvaluationMode::SampledNoise,
            Sampling::Shots { mitigate: true, .. } => EvaluationMode::SampledNoiseMitigated,
        }
    }
}

/// SplitMix64 mixing of a base seed with an index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Energy of the ansatz state at `theta`.
pub fn energy(h: &PauliSum, encoding: Encoding, theta: [f64; 3], sampling: &Sampling, seed: u64) -> Result<CostValue> {
    let state = prepare_state(encoding, theta);
    match sampling {
        Sampling::Exact => Ok(CostValue::exact(expectation_exact(&state, h)?)),
        Sampling::Shots {
            shots_per_term,
            noise,
            mitigate,
        } => {
            let e = expectation_sampled(&state, h, *shots_per_term, seed, noise.as_ref(), *mitigate)?;
            Ok(CostValue {
                value: e.value,
                std_error: e.std_error,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub theta: [f64; 3],
    /// Energy at `theta`; sampled modes re-evaluate it with a fresh seed.
    pub energy: f64,
    pub std_error: f64,
    pub trace: Vec<TracePoint>,
    pub mode: EvaluationMode,
    pub encoding: Encoding,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub seed: u64,
}

fn check_encoding(h: &PauliSum, encoding: Encoding) -> Result<()> {
    let want = encoding.n_qubits(4);
    if h.n_qubits != want {
        return Err(Error::EncodingMismatch {
            expected: want,
            found: h.n_qubits,
        });
    }
    Ok(())
}

/// Runs the VQE loop. `theta0 = None` starts from [`GOOD_INITIAL_STATE`].
pub fn vqe_run(
    h: &PauliSum,
    encoding: Encoding,
    sampling: &Sampling,
    seed: u64,
    config: &OptimizerConfig,
    theta0: Option<[f64; 3]>,
) -> Result<VqeResult> {
    check_encoding(h, encoding)?;
    let start = theta0.unwrap_or_else(|| angles_for(encoding, &GOOD_INITIAL_STATE));
    let mut k = 0u64;
    let cost = |x: &[f64]| {
        let s = derive_seed(seed, k);
        k += 1;
        energy(h, encoding, [x[0], x[1], x[2]], sampling, s)
    };
    let opt = minimize(cost, &start, config)?;
    let theta = [opt.x[0], opt.x[1], opt.x[2]];
    let final_eval = match sampling {
        Sampling::Exact => CostValue::exact(opt.value),
        _ => energy(h, encoding, theta, sampling, derive_seed(seed, u64::MAX))?,
    };
    Ok(VqeResult {
        theta,
        energy: final_eval.value,
        std_error: final_eval.std_error,
        trace: opt.trace,
        mode: sampling.mode(),
        encoding,
        iterations: opt.iterations,
        evaluations: opt.evaluations,
        converged: opt.converged,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomStartOutcome {
    pub theta0: [f64; 3],
    pub energy: f64,
    pub converged: bool,
    /// Optimizer converged and the energy matches the reference to `tol`.
    pub reached_ground: bool,
}

/// Exact-mode VQE from `trials` uniformly random starting angles in `[-2π, 2π)`.
pub fn random_starts(
    h: &PauliSum,
    encoding: Encoding,
    trials: usize,
    seed: u64,
    config: &OptimizerConfig,
    ground_energy: f64,
    tol: f64,
) -> Result<Vec<RandomStartOutcome>> {
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            let theta0 = [0; 3].map(|_| rng.random_range(-2.0 * PI..2.0 * PI));
            let r = vqe_run(h, encoding, &Sampling::Exact, seed, config, Some(theta0))?;
            Ok(RandomStartOutcome {
                theta0,
                energy: r.energy,
                converged: r.converged,
                reached_ground: r.converged && (r.energy - ground_energy).abs() <= tol,
            })
        })
        .collect()
}

/// `Σ c²(1 - ⟨P⟩²) / E²`: shots per term needed for unit relative error.
pub fn variance_prefactor(h: &PauliSum, encoding: Encoding, theta: [f64; 3]) -> Result<f64> {
    let state = prepare_state(encoding, theta);
    let e = expectation_exact(&state, h)?;
    let var: f64 = h
        .terms
        .iter()
        .filter(|t| !t.axes.is_identity())
        .map(|t| {
            let p = pauli_expectation(&state, &t.axes);
            t.coefficient * t.coefficient * (1.0 - p * p)
        })
        .sum();
    Ok(var / (e * e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub shots_per_term: u64,
    pub rms_relative_error: f64,
    pub repeats: usize,
}

/// Fit of `n = A / ε^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub prefactor: f64,
    pub exponent: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub encoding: Encoding,
    pub exact_energy: f64,
    pub predicted_prefactor: f64,
    pub rows: Vec<ScalingRow>,
    pub fit: PowerLawFit,
}

/// Fit of `n = A / ε^p`. The shot counts are exact and the errors are the
/// noisy coordinate, so this regresses `ln ε` on `ln n` and inverts.
pub fn fit_power_law(rows: &[ScalingRow]) -> Result<PowerLawFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.rms_relative_error > 0.0)
        .map(|r| ((r.shots_per_term as f64).ln(), r.rms_relative_error.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientPoints("power-law fit needs two nonzero errors".into()));
    }
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 || sxy == 0.0 {
        return Err(Error::InsufficientPoints("shot counts or errors do not vary".into()));
    }
    // ln ε = ln A / p - ln n / p
    let exponent = -sxx / sxy;
    let intercept = my - sxy / sxx * mx;
    Ok(PowerLawFit {
        prefactor: (intercept * exponent).exp(),
        exponent,
    })
}

/// Twelve log-spaced relative errors from 2 down to 0.1. At the finest point
/// the direct encoding needs about 5·10⁴ shots per term.
pub fn default_scaling_targets() -> Vec<f64> {
    (0..12).map(|i| 2.0 * 20f64.powf(-(i as f64) / 11.0)).collect()
}

/// Shot count per term that targets relative error `eps` given the prefactor.
pub fn shots_for_target(prefactor: f64, eps: f64) -> u64 {
    (prefactor / (eps * eps)).ceil().max(1.0) as u64
}

/// RMS relative error of noiseless sampled energies at fixed angles over a
/// grid of shot counts, with the power-law fit.
pub fn scaling_experiment(
    h: &PauliSum,
    encoding: Encoding,
    theta: [f64; 3],
    target_relative_errors: &[f64],
    repeats: usize,
    seed: u64,
) -> Result<ScalingResult> {
    check_encoding(h, encoding)?;
    if repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    let state = prepare_state(encoding, theta);
    let exact = expectation_exact(&state, h)?;
    let predicted = variance_prefactor(h, encoding, theta)?;
    let rows = target_relative_errors
        .iter()
        .enumerate()
        .map(|(gi, &eps)| {
            let shots = shots_for_target(predicted, eps);
            let sq: Vec<f64> = (0..repeats)
                .into_par_iter()
                .map(|r| {
                    let s = derive_seed(derive_seed(seed, gi as u64), r as u64);
                    let e = expectation_sampled(&state, h, shots, s, None, false)?;
                    Ok(((e.value - exact) / exact).powi(2))
                })
                .collect::<Result<_>>()?;
            Ok(ScalingRow {
                shots_per_term: shots,
                rms_relative_error: (sq.iter().sum::<f64>() / repeats as f64).sqrt(),
                repeats,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_power_law(&rows)?;
    Ok(ScalingResult {
        encoding,
        exact_energy: exact,
        predicted_prefactor: predicted,
        rows,
        fit,
    })
}
