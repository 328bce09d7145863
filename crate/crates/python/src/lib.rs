//! Python bindings: Hamiltonian, Pauli expansions, VQE runs and observables.

use blfq_vqe::observables::default_q2_grid;
use blfq_vqe::{
    build_effective_hamiltonian, charge_radius, compute_exponents, decay_constant, diagonalize, elastic_form_factor,
    embed_compact, embed_direct, enumerate_block, jw_to_bk_pauli, mass_radius, mass_radius_matrix, pdf, vqe_run,
    BasisCutoffs, Encoding, HermitianObservable, ModelParameters, OptimizerConfig, PauliSum, ReadoutNoiseModel,
    Sampling, WaveFunction,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: blfq_vqe::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Default parameters with the given overrides. `b` follows `kappa`.
pub fn parameters(g_pi: Option<f64>, kappa: Option<f64>, quark_mass: Option<f64>) -> blfq_vqe::Result<ModelParameters> {
    let d = ModelParameters::default();
    let m = quark_mass.unwrap_or(d.quark_mass);
    ModelParameters::new(m, m, kappa.unwrap_or(d.kappa), g_pi.unwrap_or(d.g_pi))
}

fn built(p: &ModelParameters) -> blfq_vqe::Result<HermitianObservable> {
    build_effective_hamiltonian(p, &BasisCutoffs::default(), 0)
}

pub fn qubit_hamiltonian(h: &HermitianObservable, encoding: Encoding) -> blfq_vqe::Result<PauliSum> {
    match encoding {
        Encoding::Compact => embed_compact(h),
        Encoding::Direct => embed_direct(h),
        Encoding::Bk => jw_to_bk_pauli(&embed_direct(h)?),
    }
}

/// The 4×4 `J_z = 0` Hamiltonian in MeV² as nested lists.
#[pyfunction]
#[pyo3(signature = (g_pi=None, kappa=None, quark_mass=None))]
fn hamiltonian(g_pi: Option<f64>, kappa: Option<f64>, quark_mass: Option<f64>) -> PyResult<Vec<Vec<f64>>> {
    let h = parameters(g_pi, kappa, quark_mass).and_then(|p| built(&p)).map_err(py_err)?;
    Ok((0..4).map(|i| (0..4).map(|j| h.entries[(i, j)]).collect()).collect())
}

/// Ascending eigenvalues and the sign-fixed ground state.
#[pyfunction]
#[pyo3(signature = (g_pi=None, kappa=None, quark_mass=None))]
fn spectrum(g_pi: Option<f64>, kappa: Option<f64>, quark_mass: Option<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let sol = parameters(g_pi, kappa, quark_mass).and_then(|p| diagonalize(&built(&p)?)).map_err(py_err)?;
    Ok((sol.eigenvalues.clone(), sol.ground_state()))
}

/// `(label, coefficient)` pairs for `direct`, `compact` or `bk`.
#[pyfunction]
#[pyo3(signature = (encoding="compact", g_pi=None))]
fn pauli_terms(encoding: &str, g_pi: Option<f64>) -> PyResult<Vec<(String, f64)>> {
    let enc: Encoding = encoding.parse().map_err(py_err)?;
    let p = parameters(g_pi, None, None).map_err(py_err)?;
    let s = built(&p).and_then(|h| qubit_hamiltonian(&h, enc)).map_err(py_err)?;
    Ok(s.labeled_terms())
}

#[pyclass(get_all, frozen)]
pub struct VqeOutcome {
    pub theta: [f64; 3],
    pub energy: f64,
    pub std_error: f64,
    pub mode: String,
    pub iterations: usize,
    pub converged: bool,
    /// `(iteration, best energy)` pairs.
    pub trace: Vec<(usize, f64)>,
}

/// Runs the VQE. `mode` is `exact`, `sampled` or `noisy`; `noise` is the
/// symmetric readout flip probability used in noisy mode.
#[pyfunction]
#[pyo3(signature = (encoding="compact", mode="exact", shots=8192, seed=0, noise=0.03, mitigate=false))]
fn vqe(encoding: &str, mode: &str, shots: u64, seed: u64, noise: f64, mitigate: bool) -> PyResult<VqeOutcome> {
    let enc: Encoding = encoding.parse().map_err(py_err)?;
    let sampling = match mode {
        "exact" => Sampling::Exact,
        "sampled" => Sampling::Shots { shots_per_term: shots, noise: None, mitigate: false },
        "noisy" => Sampling::Shots {
            shots_per_term: shots,
            noise: Some(ReadoutNoiseModel::symmetric(enc.n_qubits(4), noise).map_err(py_err)?),
            mitigate,
        },
        other => return Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    };
    if mitigate && mode != "noisy" {
        return Err(PyValueError::new_err("mitigate needs mode=\"noisy\""));
    }
    let p = ModelParameters::default();
    let h = built(&p).and_then(|h| qubit_hamiltonian(&h, enc)).map_err(py_err)?;
    let r = vqe_run(&h, enc, &sampling, seed, &OptimizerConfig::default(), None).map_err(py_err)?;
    Ok(VqeOutcome {
        theta: r.theta,
        energy: r.energy,
        std_error: r.std_error,
        mode: r.mode.label().to_string(),
        iterations: r.iterations,
        converged: r.converged,
        trace: r.trace.iter().map(|t| (t.iteration, t.energy)).collect(),
    })
}

#[pyclass(get_all, frozen)]
pub struct Observables {
    pub f_pi_mev: f64,
    pub r2_fm2: f64,
    pub r_fm: f64,
    pub charge_radius_per_mev: f64,
    /// `(x, f(x))` on an interior grid.
    pub pdf: Vec<(f64, f64)>,
    /// `(Q² in MeV², F_P)`.
    pub form_factor: Vec<(f64, f64)>,
}

/// Observables of a real four-component state; the exact ground state when omitted.
#[pyfunction]
#[pyo3(signature = (state=None))]
fn observables(state: Option<Vec<f64>>) -> PyResult<Observables> {
    compute_observables(state).map_err(py_err)
}

pub fn compute_observables(state: Option<Vec<f64>>) -> blfq_vqe::Result<Observables> {
    let p = ModelParameters::default();
    let exps = compute_exponents(&p);
    let block = enumerate_block(0, &BasisCutoffs::default())?;
    let psi = match state {
        Some(c) => WaveFunction::normalized(c)?,
        None => WaveFunction::new(diagonalize(&built(&p)?)?.ground_state())?,
    };
    let (r2, r) = mass_radius(&psi, &mass_radius_matrix(&p, &block)?)?;
    let xs: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
    let density = pdf(&psi, &exps, &block, &xs)?;
    let curve = elastic_form_factor(&psi, &default_q2_grid(p.b, 60), &p, &exps, &block)?;
    Ok(Observables {
        f_pi_mev: decay_constant(&psi, &p, &exps, &block)?,
        r2_fm2: r2,
        r_fm: r,
        charge_radius_per_mev: charge_radius(&curve)?,
        pdf: xs.into_iter().zip(density.values.iter().copied()).collect(),
        form_factor: curve.points.clone(),
    })
}

#[pymodule]
fn blfq_vqe_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(hamiltonian, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(pauli_terms, m)?)?;
    m.add_function(wrap_pyfunction!(vqe, m)?)?;
    m.add_function(wrap_pyfunction!(observables, m)?)?;
    m.add_class::<VqeOutcome>()?;
    m.add_class::<Observables>()?;
    Ok(())
}
