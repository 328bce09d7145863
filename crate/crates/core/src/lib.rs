//! Variational quantum eigensolver study of the pion in a basis light-front
//! quantization (BLFQ) model with an NJL interaction.
//!
//! The crate builds the effective Hamiltonian in the `J_z = 0` block, maps it
//! to qubits in three encodings, minimizes ansatz energies on a statevector
//! simulator and evaluates hadronic observables from the resulting state.

pub mod basis;
pub mod error;
pub mod hamiltonian;
pub mod observables;
pub mod pauli;
pub mod quadrature;
pub mod simulator;
pub mod special;
pub mod vqe;

pub use basis::{
    block_dimensions, chi, compute_exponents, enumerate_block, ho_coordinate, ho_momentum,
    longitudinal_integral, BasisCutoffs, BasisState, BlockDimensions, BlockEnumeration,
    LongitudinalExponents, ModelParameters, WaveFunction,
};
pub use error::{Error, Result};
pub use hamiltonian::{
    build_effective_hamiltonian, build_h0_diagonal, build_njl_matrix, diagonalize, Eigensolution,
    HermitianObservable, Units,
};
pub use observables::{
    charge_radius, decay_constant, decay_projector, elastic_form_factor, form_factor_matrix,
    mass_radius, mass_radius_matrix, pdf, tm_coefficient, DecayConstantSpec, FormFactorCurve,
    MassRadiusMatrix, PdfDensity,
};
pub use pauli::{
    bk_encoder, embed_compact, embed_direct, jw_hopping_pauli, jw_to_bk_pauli, pauli_decompose,
    pauli_sum_to_matrix, EncoderMatrix, Encoding, Pauli, PauliAxes, PauliString, PauliSum,
};
pub use simulator::{
    compact_ansatz, direct_ansatz, expectation_exact, expectation_sampled, jw_to_bk_circuit,
    mitigate_readout, overlap_magnitude, run_circuit, Circuit, Gate, ReadoutNoiseModel,
    SampledExpectation, ShotRecord, Statevector,
};
pub use vqe::{
    minimize, random_starts, scaling_experiment, vqe_run, EvaluationMode, Method,
    OptimizerConfig, Sampling, ScalingResult, VqeResult,
};
