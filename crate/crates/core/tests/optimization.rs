mod common;

use blfq_vqe::simulator::{angles_for, pauli_expectation, prepare_state};
use blfq_vqe::vqe::{default_scaling_targets, fit_power_law, variance_prefactor, ScalingRow};
use blfq_vqe::{
    diagonalize, embed_compact, embed_direct, jw_to_bk_pauli, minimize, random_starts, scaling_experiment,
    vqe_run, Encoding, EvaluationMode, Method, OptimizerConfig, PauliSum, Sampling,
};
use common::{printed_matrix, PRINTED_GROUND};

/// Four significant digits of a five-digit energy: within half a unit of the tens place.
const FOUR_DIGITS: f64 = 5.0;

fn hamiltonian(enc: Encoding) -> PauliSum {
    let h = printed_matrix();
    match enc {
        Encoding::Compact => embed_compact(&h).unwrap(),
        Encoding::Direct => embed_direct(&h).unwrap(),
        Encoding::Bk => jw_to_bk_pauli(&embed_direct(&h).unwrap()).unwrap(),
    }
}

fn ground() -> f64 {
    diagonalize(&printed_matrix()).unwrap().ground_energy()
}

#[test]
fn quadratic_bowl() {
    let r = minimize(
        |x: &[f64]| Ok(blfq_vqe::vqe::CostValue::exact((x[0] - 1.0).powi(2))),
        &[4.0],
        &OptimizerConfig { ftol: 1e-14, xatol: 1e-9, ..Default::default() },
    )
    .unwrap();
    assert!((r.x[0] - 1.0).abs() < 1e-6);
    assert!(r.converged);
}

#[test]
fn good_guess_reaches_four_digits() {
    let e0 = ground();
    assert!((e0 / PRINTED_GROUND - 1.0).abs() < 1e-3);
    for method in [Method::Simplex, Method::LinearTrustRegion] {
        for enc in Encoding::ALL {
            let cfg = OptimizerConfig { method, ..Default::default() };
            let r = vqe_run(&hamiltonian(enc), enc, &Sampling::Exact, 1, &cfg, None).unwrap();
            assert!(r.converged, "{method} {enc}");
            assert_eq!(r.mode, EvaluationMode::Exact);
            let first = r.trace.iter().find(|t| (t.energy - e0).abs() <= FOUR_DIGITS);
            let it = first.map(|t| t.iteration).unwrap_or(usize::MAX);
            assert!(it <= 200, "{method} {enc}: reached at {it}");
            assert!((r.energy - e0).abs() <= FOUR_DIGITS, "{method} {enc}: {}", r.energy);
        }
    }
}

#[test]
fn encodings_agree_with_diagonalization() {
    let e0 = ground();
    let cfg = OptimizerConfig::default();
    let compact = vqe_run(&hamiltonian(Encoding::Compact), Encoding::Compact, &Sampling::Exact, 0, &cfg, None).unwrap();
    let direct = vqe_run(&hamiltonian(Encoding::Direct), Encoding::Direct, &Sampling::Exact, 0, &cfg, None).unwrap();
    assert!((compact.energy / e0 - 1.0).abs() < 1e-3);
    assert!((direct.energy / compact.energy - 1.0).abs() < 1e-3);
}

#[test]
fn random_starts_mostly_reach_ground() {
    let e0 = ground();
    for enc in [Encoding::Compact, Encoding::Direct] {
        let out = random_starts(&hamiltonian(enc), enc, 20, 2024, &OptimizerConfig::default(), e0, 1e-3 * e0).unwrap();
        assert_eq!(out.len(), 20);
        let hits = out.iter().filter(|o| o.reached_ground).count();
        assert!(hits >= 16, "{enc}: {hits}/20");
        // failures are flagged, never silently reported as ground
        for o in out.iter().filter(|o| !o.reached_ground) {
            assert!(!o.converged || (o.energy - e0).abs() > 1e-3 * e0);
        }
    }
}

#[test]
fn variational_bound_from_random_starts() {
    let e0 = ground();
    let out = random_starts(&hamiltonian(Encoding::Direct), Encoding::Direct, 8, 7, &OptimizerConfig::default(), e0, 1.0)
        .unwrap();
    for o in out {
        assert!(o.energy >= e0 - 1e-6, "{}", o.energy);
    }
}

#[test]
fn sampled_compact_within_combined_error() {
    let e0 = ground();
    let h = hamiltonian(Encoding::Compact);
    let sampling = Sampling::Shots { shots_per_term: 8192, noise: None, mitigate: false };
    for seed in 0..6 {
        let r = vqe_run(&h, Encoding::Compact, &sampling, seed, &OptimizerConfig::default(), None).unwrap();
        assert_eq!(r.mode, EvaluationMode::Sampled);
        // the final estimate's own error, plus the resolution of the noisy
        // comparisons that picked theta (predicted from the exact state)
        let state = prepare_state(Encoding::Compact, r.theta);
        let var: f64 = h
            .terms
            .iter()
            .filter(|t| !t.axes.is_identity())
            .map(|t| t.coefficient.powi(2) * (1.0 - pauli_expectation(&state, &t.axes).powi(2)))
            .sum();
        let se_search = (var / 8192.0).sqrt();
        let combined = (r.std_error.powi(2) + se_search.powi(2)).sqrt();
        assert!((r.energy - e0).abs() <= 3.0 * combined, "seed {seed}: {} ± {combined}", r.energy);
    }
}

#[test]
fn runs_are_bit_reproducible() {
    let h = hamiltonian(Encoding::Compact);
    let sampling = Sampling::Shots {
        shots_per_term: 4096,
        noise: Some(blfq_vqe::ReadoutNoiseModel::symmetric(2, 0.02).unwrap()),
        mitigate: true,
    };
    let a = vqe_run(&h, Encoding::Compact, &sampling, 77, &OptimizerConfig::default(), None).unwrap();
    let b = vqe_run(&h, Encoding::Compact, &sampling, 77, &OptimizerConfig::default(), None).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.energy.to_bits(), b.energy.to_bits());
    let c = vqe_run(&h, Encoding::Compact, &sampling, 78, &OptimizerConfig::default(), None).unwrap();
    assert_ne!(a.energy, c.energy);
}

#[test]
fn trace_is_non_increasing() {
    let h = hamiltonian(Encoding::Direct);
    let sampling = Sampling::Shots { shots_per_term: 2000, noise: None, mitigate: false };
    let r = vqe_run(&h, Encoding::Direct, &sampling, 3, &OptimizerConfig::default(), None).unwrap();
    for w in r.trace.windows(2) {
        assert!(w[1].energy <= w[0].energy);
        assert!(w[1].iteration > w[0].iteration);
    }
}

#[test]
fn mismatched_encoding_is_rejected() {
    let h = hamiltonian(Encoding::Compact);
    assert!(vqe_run(&h, Encoding::Direct, &Sampling::Exact, 0, &OptimizerConfig::default(), None).is_err());
}

#[test]
fn tiny_budget_is_flagged() {
    let cfg = OptimizerConfig { max_iterations: 2, restarts: 0, ..Default::default() };
    let r = vqe_run(&hamiltonian(Encoding::Compact), Encoding::Compact, &Sampling::Exact, 0, &cfg, Some([2.0, -1.0, 0.5]))
        .unwrap();
    assert!(!r.converged);
}

fn ground_angles(enc: Encoding) -> [f64; 3] {
    let g = diagonalize(&printed_matrix()).unwrap().ground_state();
    angles_for(enc, &[g[0], g[1], g[2], g[3]])
}

#[test]
fn sampling_law() {
    let targets = default_scaling_targets();
    let mut prefactors = Vec::new();
    for enc in [Encoding::Compact, Encoding::Direct] {
        let h = hamiltonian(enc);
        let th = ground_angles(enc);
        let r100 = scaling_experiment(&h, enc, th, &targets, 100, 11).unwrap();
        let r200 = scaling_experiment(&h, enc, th, &targets, 200, 11).unwrap();
        for r in [&r100, &r200] {
            assert!((1.8..=2.2).contains(&r.fit.exponent), "{enc}: p = {}", r.fit.exponent);
            let measured = h.terms.iter().filter(|t| !t.axes.is_identity()).count() as u64;
            assert!(r.rows.iter().all(|row| row.shots_per_term * measured <= 1_000_000));
        }
        assert!((r100.fit.exponent - r200.fit.exponent).abs() <= 0.1);
        assert!((r200.predicted_prefactor - variance_prefactor(&h, enc, th).unwrap()).abs() < 1e-12);
        prefactors.push(r200.fit.prefactor);
    }
    assert!(prefactors[0] < prefactors[1], "{prefactors:?}");
}

#[test]
fn power_law_oracle() {
    // errors generated exactly from n = 50 / ε²
    let rows: Vec<ScalingRow> = [100u64, 1000, 10_000]
        .iter()
        .map(|&n| ScalingRow { shots_per_term: n, rms_relative_error: (50.0 / n as f64).sqrt(), repeats: 1 })
        .collect();
    let f = fit_power_law(&rows).unwrap();
    assert!((f.exponent - 2.0).abs() < 1e-12);
    assert!((f.prefactor - 50.0).abs() < 1e-9);
}
