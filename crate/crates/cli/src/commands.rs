use std::collections::BTreeMap;

use blfq_vqe::observables::{default_q2_grid, HBAR_C};
use blfq_vqe::simulator::{angles_for, decode_state, prepare_state};
use blfq_vqe::vqe::{default_scaling_targets, variance_prefactor};
use blfq_vqe::{
    build_effective_hamiltonian, charge_radius, compute_exponents, decay_constant, decay_projector, diagonalize,
    elastic_form_factor, enumerate_block, expectation_exact, mass_radius, mass_radius_matrix, pdf,
    scaling_experiment, vqe_run, BlockEnumeration, DecayConstantSpec, Eigensolution, Encoding, HermitianObservable,
    LongitudinalExponents, PauliSum, ScalingResult, VqeResult, WaveFunction,
};
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{CliError, Result};
use crate::output::{num, OutputDir};

struct Model {
    h: HermitianObservable,
    exps: LongitudinalExponents,
    block: BlockEnumeration,
    solution: Eigensolution,
}

fn model(cfg: &RunConfig) -> Result<Model> {
    let h = build_effective_hamiltonian(&cfg.params, &cfg.cutoffs, 0)?;
    let solution = diagonalize(&h)?;
    Ok(Model {
        exps: compute_exponents(&cfg.params),
        block: enumerate_block(0, &cfg.cutoffs)?,
        h,
        solution,
    })
}

fn ground_block_vector(m: &Model) -> [f64; 4] {
    let g = m.solution.ground_state();
    [g[0], g[1], g[2], g[3]]
}

#[derive(Serialize)]
struct Term {
    label: String,
    coefficient: f64,
}

fn terms(s: &PauliSum) -> Vec<Term> {
    s.labeled_terms()
        .into_iter()
        .map(|(label, coefficient)| Term { label, coefficient })
        .collect()
}

#[derive(Serialize)]
struct BasisRow {
    index: usize,
    n: u32,
    m: i32,
    l: u32,
    s1: i8,
    s2: i8,
    theta: u32,
}

#[derive(Serialize)]
struct HamiltonianOut {
    config_hash: String,
    units: &'static str,
    jz: i32,
    basis: Vec<BasisRow>,
    matrix: Vec<Vec<f64>>,
    trace: f64,
    eigenvalues: Vec<f64>,
    ground_state: Vec<f64>,
    pauli: BTreeMap<String, Vec<Term>>,
}

pub fn hamiltonian(cfg: &RunConfig) -> Result<Vec<String>> {
    let m = model(cfg)?;
    let mut pauli = BTreeMap::new();
    for enc in Encoding::ALL {
        pauli.insert(enc.to_string(), terms(&enc.encode(&m.h)?));
    }
    let out = HamiltonianOut {
        config_hash: cfg.hash(),
        units: "MeV^2",
        jz: 0,
        basis: m
            .block
            .states
            .iter()
            .enumerate()
            .map(|(index, s)| BasisRow {
                index,
                n: s.n,
                m: s.m,
                l: s.l,
                s1: s.s1,
                s2: s.s2,
                theta: s.theta,
            })
            .collect(),
        matrix: m.h.rows(),
        trace: m.h.trace(),
        eigenvalues: m.solution.eigenvalues.iter().copied().collect(),
        ground_state: m.solution.ground_state(),
        pauli,
    };

    println!("H (MeV^2), J_z = 0 block:");
    for row in &out.matrix {
        println!("  {}", row.iter().map(|x| format!("{x:>14.3}")).collect::<String>());
    }
    println!("eigenvalues (MeV^2): {:?}", out.eigenvalues);
    println!("{} encoding:", cfg.encoding);
    for t in &out.pauli[cfg.encoding.name()] {
        println!("  {:>16.4} {}", t.coefficient, t.label);
    }

    let mut dir = OutputDir::create(&cfg.out_dir())?;
    dir.json("hamiltonian.json", &out)?;
    dir.finish("hamiltonian", cfg)
}

#[derive(Serialize)]
struct VqeOut {
    config_hash: String,
    mode: &'static str,
    encoding: Encoding,
    optimizer: String,
    seed: u64,
    theta: [f64; 3],
    energy_mev2: f64,
    std_error_mev2: f64,
    mass_mev: f64,
    exact_ground_mev2: f64,
    relative_deviation: f64,
    iterations: usize,
    evaluations: usize,
    converged: bool,
}

fn run_vqe(cfg: &RunConfig, m: &Model) -> Result<VqeResult> {
    let q = cfg.encoding.encode(&m.h)?;
    Ok(vqe_run(&q, cfg.encoding, &cfg.sampling()?, cfg.seed, &cfg.optimizer, None)?)
}

fn not_converged(r: &VqeResult) -> CliError {
    CliError::NotConverged {
        iterations: r.iterations,
        energy: r.energy,
    }
}

pub fn vqe(cfg: &RunConfig) -> Result<Vec<String>> {
    let m = model(cfg)?;
    let r = run_vqe(cfg, &m)?;
    let e0 = m.solution.ground_energy();
    let out = VqeOut {
        config_hash: cfg.hash(),
        mode: r.mode.label(),
        encoding: r.encoding,
        optimizer: cfg.optimizer.method.to_string(),
        seed: r.seed,
        theta: r.theta,
        energy_mev2: r.energy,
        std_error_mev2: r.std_error,
        mass_mev: r.energy.max(0.0).sqrt(),
        exact_ground_mev2: e0,
        relative_deviation: (r.energy - e0) / e0,
        iterations: r.iterations,
        evaluations: r.evaluations,
        converged: r.converged,
    };
    println!(
        "{} / {} / {}: E = {:.3} ± {:.3} MeV^2 (exact {:.3}), {} iterations, converged = {}",
        out.encoding, out.mode, out.optimizer, out.energy_mev2, out.std_error_mev2, e0, out.iterations, out.converged
    );

    let mut dir = OutputDir::create(&cfg.out_dir())?;
    dir.json("vqe.json", &out)?;
    let rows: Vec<Vec<String>> = r
        .trace
        .iter()
        .map(|t| vec![t.iteration.to_string(), num(t.energy), out.mode.to_string()])
        .collect();
    dir.csv("vqe_trace.csv", &["iteration", "energy_MeV2", "mode"], &rows)?;
    let files = dir.finish("vqe", cfg)?;
    if !r.converged {
        return Err(not_converged(&r));
    }
    Ok(files)
}

/// Where the observables' wave function comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateSource {
    Exact,
    Angles([f64; 3]),
    Vqe,
}

#[derive(Serialize)]
struct Decay {
    prefactor_mev: f64,
    overlap: f64,
    f_pi_mev: f64,
    f_pi_projector_mev: f64,
}

#[derive(Serialize)]
struct MassRadius {
    diagonal_fm2: Vec<f64>,
    r2_fm2: f64,
    r_fm: f64,
}

#[derive(Serialize)]
struct PdfSummary {
    rho: Vec<Vec<f64>>,
    normalization: f64,
    points: usize,
}

#[derive(Serialize)]
struct FormFactorSummary {
    f_at_zero: f64,
    q2_max_mev2: f64,
    points: usize,
    charge_radius_per_mev: f64,
    charge_radius_fm: f64,
}

#[derive(Serialize)]
struct ScalingSummary {
    encoding: Encoding,
    repeats: usize,
    predicted_prefactor: f64,
    fit_prefactor: f64,
    fit_exponent: f64,
}

#[derive(Serialize)]
struct ObservablesOut {
    config_hash: String,
    mode: &'static str,
    source: &'static str,
    encoding: Encoding,
    theta: Option<[f64; 3]>,
    state: Vec<f64>,
    m_pi2_mev2: f64,
    m_pi_mev: f64,
    decay: Decay,
    mass_radius: MassRadius,
    pdf: PdfSummary,
    form_factor: FormFactorSummary,
    scaling: ScalingSummary,
}

pub fn observables(cfg: &RunConfig, source: StateSource) -> Result<Vec<String>> {
    let m = model(cfg)?;
    let enc = cfg.encoding;
    let mut vqe_result = None;
    let (psi, theta, mode, source_name) = match source {
        StateSource::Exact => (m.solution.ground_state(), None, "exact", "diagonalization"),
        StateSource::Angles(th) => (
            decode_state(enc, &prepare_state(enc, th), 4)?,
            Some(th),
            "exact",
            "angles",
        ),
        StateSource::Vqe => {
            let r = run_vqe(cfg, &m)?;
            let v = decode_state(enc, &prepare_state(enc, r.theta), 4)?;
            let out = (v, Some(r.theta), r.mode.label(), "vqe");
            vqe_result = Some(r);
            out
        }
    };
    let psi = WaveFunction::normalized(psi)?;
    let p = &cfg.params;

    let spec = DecayConstantSpec::new(p, &m.exps)?;
    let f_explicit = decay_constant(&psi, p, &m.exps, &m.block)?;
    let psi4: [f64; 4] = psi.as_slice().try_into().map_err(|_| blfq_vqe::Error::DimensionMismatch {
        expected: 4,
        found: psi.len(),
    })?;
    let register = prepare_state(enc, angles_for(enc, &psi4));
    let projector = expectation_exact(&register, &decay_projector(enc)?)?;
    let overlap: f64 = spec.vector.iter().zip(psi.as_slice()).map(|(a, b)| a * b).sum();

    let mr = mass_radius_matrix(p, &m.block)?;
    let (r2, r) = mass_radius(&psi, &mr)?;
    let mr_fm = mr.in_fm2();

    let x_grid: Vec<f64> = (1..=cfg.pdf_points)
        .map(|k| k as f64 / (cfg.pdf_points + 1) as f64)
        .collect();
    let density = pdf(&psi, &m.exps, &m.block, &x_grid)?;

    let q2 = default_q2_grid(p.b, cfg.q2_points);
    let curve = elastic_form_factor(&psi, &q2, p, &m.exps, &m.block)?;
    let rc = charge_radius(&curve)?;

    let scaling_theta = theta.unwrap_or_else(|| angles_for(enc, &ground_block_vector(&m)));
    let q = enc.encode(&m.h)?;
    let scaling = scaling_experiment(
        &q,
        enc,
        scaling_theta,
        &default_scaling_targets(),
        cfg.scaling_repeats,
        cfg.seed,
    )?;

    let m2 = m.h.expectation(psi.as_slice())?;
    let out = ObservablesOut {
        config_hash: cfg.hash(),
        mode,
        source: source_name,
        encoding: enc,
        theta,
        state: psi.as_slice().to_vec(),
        m_pi2_mev2: m2,
        m_pi_mev: m2.max(0.0).sqrt(),
        decay: Decay {
            prefactor_mev: spec.prefactor,
            overlap,
            f_pi_mev: f_explicit,
            f_pi_projector_mev: spec.from_projector_expectation(projector),
        },
        mass_radius: MassRadius {
            diagonal_fm2: (0..mr_fm.dimension()).map(|i| mr_fm.entries[(i, i)]).collect(),
            r2_fm2: r2,
            r_fm: r,
        },
        pdf: PdfSummary {
            rho: density.rho.clone(),
            normalization: density.normalization()?,
            points: x_grid.len(),
        },
        form_factor: FormFactorSummary {
            f_at_zero: curve.at(0.0).unwrap_or(f64::NAN),
            q2_max_mev2: q2.last().copied().unwrap_or(0.0),
            points: curve.points.len(),
            charge_radius_per_mev: rc,
            charge_radius_fm: rc * HBAR_C,
        },
        scaling: ScalingSummary {
            encoding: enc,
            repeats: cfg.scaling_repeats,
            predicted_prefactor: scaling.predicted_prefactor,
            fit_prefactor: scaling.fit.prefactor,
            fit_exponent: scaling.fit.exponent,
        },
    };
    println!(
        "{source_name} ({mode}): m_pi^2 = {:.2} MeV^2, f_pi = {:.3} MeV, <r_m^2> = {:.4} fm^2, r_c = {:.5e} MeV^-1, p = {:.3}",
        out.m_pi2_mev2, out.decay.f_pi_mev, r2, rc, out.scaling.fit_exponent
    );

    let mut dir = OutputDir::create(&cfg.out_dir())?;
    dir.json("observables.json", &out)?;
    let pdf_rows: Vec<Vec<String>> = x_grid
        .iter()
        .zip(&density.values)
        .map(|(&x, &f)| Ok(vec![num(x), num(f), num(density.antiquark(x)?), mode.to_string()]))
        .collect::<Result<_>>()?;
    dir.csv("pdf.csv", &["x", "f_quark", "f_antiquark", "mode"], &pdf_rows)?;
    let ff_rows: Vec<Vec<String>> = curve
        .points
        .iter()
        .map(|&(q2, f)| vec![num(q2), num(f), mode.to_string()])
        .collect();
    dir.csv("form_factor.csv", &["Q2_MeV2", "F_P", "mode"], &ff_rows)?;
    dir.csv("scaling.csv", SCALING_HEADER, &scaling_rows(&scaling))?;
    let files = dir.finish("observables", cfg)?;
    if let Some(r) = vqe_result.filter(|r| !r.converged) {
        return Err(not_converged(&r));
    }
    Ok(files)
}

const SCALING_HEADER: &[&str] = &[
    "encoding",
    "target_relative_error",
    "shots_per_term",
    "rms_relative_error",
    "repeats",
    "mode",
];

fn scaling_rows(s: &ScalingResult) -> Vec<Vec<String>> {
    s.rows
        .iter()
        .zip(default_scaling_targets())
        .map(|(r, eps)| {
            vec![
                s.encoding.to_string(),
                num(eps),
                r.shots_per_term.to_string(),
                num(r.rms_relative_error),
                r.repeats.to_string(),
                "sampled".to_string(),
            ]
        })
        .collect()
}

#[derive(Serialize)]
struct ScalingOut {
    config_hash: String,
    seed: u64,
    repeats: usize,
    target_relative_errors: Vec<f64>,
    results: Vec<ScalingResult>,
    compact_prefactor_below_direct: bool,
}

pub fn scaling(cfg: &RunConfig) -> Result<Vec<String>> {
    let m = model(cfg)?;
    let g = ground_block_vector(&m);
    let targets = default_scaling_targets();
    let mut results = Vec::new();
    for enc in Encoding::ALL {
        let q = enc.encode(&m.h)?;
        let th = angles_for(enc, &g);
        let r = scaling_experiment(&q, enc, th, &targets, cfg.scaling_repeats, cfg.seed)?;
        println!(
            "{enc}: n = {:.1} / eps^{:.3} (predicted prefactor {:.1})",
            r.fit.prefactor,
            r.fit.exponent,
            variance_prefactor(&q, enc, th)?
        );
        results.push(r);
    }
    let prefactor = |e: Encoding| results.iter().find(|r| r.encoding == e).map(|r| r.fit.prefactor);
    let out = ScalingOut {
        config_hash: cfg.hash(),
        seed: cfg.seed,
        repeats: cfg.scaling_repeats,
        compact_prefactor_below_direct: prefactor(Encoding::Compact) < prefactor(Encoding::Direct),
        target_relative_errors: targets,
        results,
    };
    let mut dir = OutputDir::create(&cfg.out_dir())?;
    dir.json("scaling.json", &out)?;
    let rows: Vec<Vec<String>> = out.results.iter().flat_map(scaling_rows).collect();
    dir.csv("scaling.csv", SCALING_HEADER, &rows)?;
    dir.finish("scaling", cfg)
}
