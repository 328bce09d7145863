//! Statevector simulation: gates, ansatz circuits, exact and sampled Pauli
//! expectations, readout noise with mitigation, and the overlap circuit.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{bk_encoder, Encoding, Pauli, PauliAxes, PauliSum, MAX_QUBITS};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    X { target: usize },
    H { target: usize },
    /// Inverse phase gate `diag(1, -i)`.
    Sdg { target: usize },
    /// `[[cos θ/2, -sin θ/2], [sin θ/2, cos θ/2]]`.
    Ry { target: usize, angle: f64 },
    Cnot { control: usize, target: usize },
    ControlledRy { control: usize, target: usize, angle: f64 },
    /// `exp(iθP)`.
    PauliExponential { axes: PauliAxes, angle: f64 },
    /// X on `target` when every control is 1.
    Mcx { controls: Vec<usize>, target: usize },
    /// Dense unitary on `qubits`; `qubits[0]` is the low bit of the matrix index.
    Unitary { qubits: Vec<usize>, matrix: DMatrix<Complex64> },
}

impl Gate {
    fn qubits(&self) -> Vec<usize> {
        match self {
            Gate::X { target } | Gate::H { target } | Gate::Sdg { target } | Gate::Ry { target, .. } => {
                vec![*target]
            }
            Gate::Cnot { control, target } | Gate::ControlledRy { control, target, .. } => {
                vec![*control, *target]
            }
            Gate::PauliExponential { axes, .. } => {
                (0..axes.n_qubits).filter(|q| axes.support() >> q & 1 == 1).collect()
            }
            Gate::Mcx { controls, target } => {
                let mut v = controls.clone();
                v.push(*target);
                v
            }
            Gate::Unitary { qubits, .. } => qubits.clone(),
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        let mut seen = 0u64;
        for &q in &qs {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            if seen >> q & 1 == 1 {
                return Err(Error::RepeatedQubit(q));
            }
            seen |= 1 << q;
        }
        match self {
            Gate::PauliExponential { axes, .. } if axes.n_qubits != n_qubits => Err(Error::EncodingMismatch {
                expected: n_qubits,
                found: axes.n_qubits,
            }),
            Gate::Unitary { qubits, matrix } => {
                let d = 1usize << qubits.len();
                if matrix.nrows() != d || matrix.ncols() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: matrix.nrows(),
                    });
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Ordered gate list on a fixed register.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, gate: Gate) -> Result<&mut Self> {
        gate.validate(self.n_qubits)?;
        self.gates.push(gate);
        Ok(self)
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<&mut Self> {
        for g in &other.gates {
            self.push(g.clone())?;
        }
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Gates in reverse order. Self-inverse gates only (X, H, CNOT, MCX).
    pub fn reversed(&self) -> Circuit {
        Circuit {
            n_qubits: self.n_qubits,
            gates: self.gates.iter().rev().cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    pub amplitudes: Vec<Complex64>,
}

impl Statevector {
    pub const NORM_TOLERANCE: f64 = 1e-10;

    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        if !values.len().is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: values.len().next_power_of_two(),
                found: values.len(),
            });
        }
        let s = Self {
            amplitudes: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        };
        s.check_norm()?;
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.amplitudes.len().trailing_zeros() as usize
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_norm(&self) -> Result<()> {
        let n = self.norm();
        if (n - 1.0).abs() > Self::NORM_TOLERANCE {
            return Err(Error::NotNormalized(n));
        }
        Ok(())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn max_imaginary(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.im.abs()).fold(0.0, f64::max)
    }

    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | bit];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_controlled(&mut self, c: usize, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        let cbit = 1usize << c;
        for i in 0..self.amplitudes.len() {
            if i & bit == 0 && i & cbit != 0 {
                let a0 = self.amplitudes[i];
                let a1 = self.amplitudes[i | bit];
                self.amplitudes[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amplitudes[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_pauli(&self, axes: &PauliAxes) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.amplitudes.len()];
        for (b, a) in self.amplitudes.iter().enumerate() {
            let (o, ph) = axes.apply_to_basis(b as u64);
            out[o as usize] = ph * a;
        }
        out
    }

    pub fn apply(&mut self, gate: &Gate) {
        match gate {
            Gate::X { target } => self.apply_single(*target, [[ZERO, ONE], [ONE, ZERO]]),
            Gate::H { target } => {
                let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
                self.apply_single(*target, [[h, h], [h, -h]])
            }
            Gate::Sdg { target } => self.apply_single(*target, [[ONE, ZERO], [ZERO, Complex64::new(0.0, -1.0)]]),
            Gate::Ry { target, angle } => self.apply_single(*target, ry(*angle)),
            Gate::Cnot { control, target } => self.apply_controlled(*control, *target, [[ZERO, ONE], [ONE, ZERO]]),
            Gate::ControlledRy { control, target, angle } => self.apply_controlled(*control, *target, ry(*angle)),
            Gate::PauliExponential { axes, angle } => {
                let p = self.apply_pauli(axes);
                let c = Complex64::new(angle.cos(), 0.0);
                let s = Complex64::new(0.0, angle.sin());
                for (a, pa) in self.amplitudes.iter_mut().zip(p) {
                    *a = c * *a + s * pa;
                }
            }
            Gate::Mcx { controls, target } => {
                let cmask: usize = controls.iter().map(|c| 1usize << c).sum();
                let bit = 1usize << target;
                for i in 0..self.amplitudes.len() {
                    if i & bit == 0 && i & cmask == cmask {
                        self.amplitudes.swap(i, i | bit);
                    }
                }
            }
            Gate::Unitary { qubits, matrix } => {
                let k = qubits.len();
                let mask: usize = qubits.iter().map(|q| 1usize << q).sum();
                let spread = |local: usize| -> usize {
                    qubits
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| local >> j & 1 == 1)
                        .map(|(_, q)| 1usize << q)
                        .sum()
                };
                let offsets: Vec<usize> = (0..1usize << k).map(spread).collect();
                let mut buf = vec![ZERO; 1 << k];
                for base in 0..self.amplitudes.len() {
                    if base & mask != 0 {
                        continue;
                    }
                    for (j, off) in offsets.iter().enumerate() {
                        buf[j] = self.amplitudes[base | off];
                    }
                    for (r, off) in offsets.iter().enumerate() {
                        self.amplitudes[base | off] = (0..buf.len()).map(|c| matrix[(r, c)] * buf[c]).sum();
                    }
                }
            }
        }
    }
}

fn ry(angle: f64) -> [[Complex64; 2]; 2] {
    let c = Complex64::new((0.5 * angle).cos(), 0.0);
    let s = Complex64::new((0.5 * angle).sin(), 0.0);
    [[c, -s], [s, c]]
}

/// Applies `c` to `initial`.
pub fn run_circuit(c: &Circuit, initial: &Statevector) -> Result<Statevector> {
    if initial.amplitudes.len() != 1 << c.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << c.n_qubits,
            found: initial.amplitudes.len(),
        });
    }
    let mut s = initial.clone();
    for g in &c.gates {
        g.validate(c.n_qubits)?;
        s.apply(g);
        s.check_norm()?;
    }
    Ok(s)
}

/// Four-qubit circuit preparing real superpositions of one-hot states.
/// Circuit wire `q_k` is register qubit `3 - k` (JW mode `f_{3-k}`), giving
/// mode amplitudes `(s1 s3, s1 c3, c1 c2, c1 s2)` with `c_i = cos(θ_i/2)`.
pub fn direct_ansatz(theta: [f64; 3]) -> Circuit {
    let w = |k: usize| 3 - k;
    let mut c = Circuit::new(4);
    let gates = [
        Gate::X { target: w(1) },
        Gate::ControlledRy { control: w(1), target: w(2), angle: theta[0] },
        Gate::Cnot { control: w(2), target: w(1) },
        Gate::ControlledRy { control: w(1), target: w(0), angle: theta[1] },
        Gate::ControlledRy { control: w(2), target: w(3), angle: theta[2] },
        Gate::Cnot { control: w(0), target: w(1) },
        Gate::Cnot { control: w(3), target: w(2) },
    ];
    c.gates.extend(gates);
    c
}

/// Two-qubit circuit preparing `(c2 cos A, c2 sin A, s2 sin B, s2 cos B)` with
/// `A = (θ1+θ3)/2`, `B = (θ1-θ3)/2`.
pub fn compact_ansatz(theta: [f64; 3]) -> Circuit {
    let mut c = Circuit::new(2);
    c.gates.extend([
        Gate::Ry { target: 0, angle: theta[0] },
        Gate::Ry { target: 1, angle: theta[1] },
        Gate::Cnot { control: 1, target: 0 },
        Gate::Ry { target: 0, angle: theta[2] },
    ]);
    c
}

/// CNOT network mapping JW occupations to BK bits.
pub fn jw_to_bk_circuit(n: usize) -> Result<Circuit> {
    if n != 4 {
        return Err(Error::UnsupportedEncoderSize(n));
    }
    let enc = bk_encoder(n)?;
    let mut c = Circuit::new(n);
    for (control, target) in enc.cnot_network() {
        c.push(Gate::Cnot { control, target })?;
    }
    Ok(c)
}

/// The ansatz circuit for an encoding of the four-state block.
pub fn ansatz_circuit(encoding: Encoding, theta: [f64; 3]) -> Circuit {
    match encoding {
        Encoding::Direct => direct_ansatz(theta),
        Encoding::Compact => compact_ansatz(theta),
        Encoding::Bk => {
            let mut c = direct_ansatz(theta);
            let bk = jw_to_bk_circuit(4).expect("four-mode BK network");
            c.gates.extend(bk.gates);
            c
        }
    }
}

pub fn prepare_state(encoding: Encoding, theta: [f64; 3]) -> Statevector {
    let c = ansatz_circuit(encoding, theta);
    let mut s = Statevector::zero(c.n_qubits);
    for g in &c.gates {
        s.apply(g);
    }
    s
}

/// Direct-ansatz angles producing the block vector `v` (length 4, unit norm).
pub fn direct_angles_for(v: &[f64; 4]) -> [f64; 3] {
    let t1 = 2.0 * v[0].hypot(v[1]).atan2(v[2].hypot(v[3]));
    let t2 = 2.0 * v[3].atan2(v[2]);
    let t3 = 2.0 * v[0].atan2(v[1]);
    [t1, t2, t3]
}

/// Compact-ansatz angles producing the block vector `v` (length 4, unit norm).
pub fn compact_angles_for(v: &[f64; 4]) -> [f64; 3] {
    let t2 = 2.0 * v[2].hypot(v[3]).atan2(v[0].hypot(v[1]));
    let a = v[1].atan2(v[0]);
    let b = v[2].atan2(v[3]);
    [a + b, t2, a - b]
}

/// Ansatz angles for a block vector in any encoding.
pub fn angles_for(encoding: Encoding, v: &[f64; 4]) -> [f64; 3] {
    match encoding {
        Encoding::Direct | Encoding::Bk => direct_angles_for(v),
        Encoding::Compact => compact_angles_for(v),
    }
}

/// Register index holding block state `k` (0-based).
pub fn register_index(encoding: Encoding, k: usize) -> Result<usize> {
    Ok(match encoding {
        Encoding::Direct => 1 << k,
        Encoding::Compact => k,
        Encoding::Bk => bk_encoder(4)?.apply(1 << k) as usize,
    })
}

/// Embeds a block vector into the register of an encoding.
pub fn encode_vector(encoding: Encoding, v: &[f64]) -> Result<Vec<f64>> {
    let nq = encoding.n_qubits(v.len());
    if encoding == Encoding::Bk && v.len() != 4 {
        return Err(Error::UnsupportedEncoderSize(v.len()));
    }
    let mut out = vec![0.0; 1 << nq];
    for (k, &x) in v.iter().enumerate() {
        out[register_index(encoding, k)?] = x;
    }
    Ok(out)
}

/// Reads the block amplitudes back out of a register state (real parts).
pub fn decode_state(encoding: Encoding, state: &Statevector, n_states: usize) -> Result<Vec<f64>> {
    (0..n_states)
        .map(|k| {
            let i = register_index(encoding, k)?;
            state
                .amplitudes
                .get(i)
                .map(|a| a.re)
                .ok_or(Error::QubitOutOfRange {
                    index: i,
                    n_qubits: state.n_qubits(),
                })
        })
        .collect()
}

fn check_operator(state: &Statevector, s: &PauliSum) -> Result<()> {
    if state.n_qubits() != s.n_qubits {
        return Err(Error::EncodingMismatch {
            expected: state.n_qubits(),
            found: s.n_qubits,
        });
    }
    Ok(())
}

/// `⟨P⟩` for a single string.
pub fn pauli_expectation(state: &Statevector, axes: &PauliAxes) -> f64 {
    state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(b, a)| {
            let (o, ph) = axes.apply_to_basis(b as u64);
            (state.amplitudes[o as usize].conj() * ph * a).re
        })
        .sum()
}

/// `Σ c_α ⟨ψ|P_α|ψ⟩` without sampling.
pub fn expectation_exact(state: &Statevector, s: &PauliSum) -> Result<f64> {
    check_operator(state, s)?;
    Ok(s.terms
        .iter()
        .map(|t| t.coefficient * pauli_expectation(state, &t.axes))
        .sum())
}

/// Independent per-qubit readout flips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutNoiseModel {
    /// p(read 1 | true 0) per qubit.
    pub p01: Vec<f64>,
    /// p(read 0 | true 1) per qubit.
    pub p10: Vec<f64>,
}

impl ReadoutNoiseModel {
    pub fn new(p01: Vec<f64>, p10: Vec<f64>) -> Result<Self> {
        if p01.len() != p10.len() {
            return Err(Error::DimensionMismatch {
                expected: p01.len(),
                found: p10.len(),
            });
        }
        for &p in p01.iter().chain(&p10) {
            if !(0.0..1.0).contains(&p) {
                return Err(Error::InvalidProbability(p));
            }
        }
        Ok(Self { p01, p10 })
    }

    pub fn uniform(n_qubits: usize, p01: f64, p10: f64) -> Result<Self> {
        Self::new(vec![p01; n_qubits], vec![p10; n_qubits])
    }

    pub fn symmetric(n_qubits: usize, p: f64) -> Result<Self> {
        Self::uniform(n_qubits, p, p)
    }

    pub fn n_qubits(&self) -> usize {
        self.p01.len()
    }

    pub fn is_noiseless(&self) -> bool {
        self.p01.iter().chain(&self.p10).all(|&p| p == 0.0)
    }

    /// `1 - p01 - p10`, the factor by which a qubit's ⟨Z⟩ is shrunk.
    pub fn contrast(&self, q: usize) -> f64 {
        1.0 - self.p01[q] - self.p10[q]
    }

    /// Distribution of read-out bitstrings given the true distribution.
    pub fn corrupt(&self, probs: &[f64]) -> Vec<f64> {
        let mut p = probs.to_vec();
        for q in 0..self.n_qubits() {
            let a = [[1.0 - self.p01[q], self.p10[q]], [self.p01[q], 1.0 - self.p10[q]]];
            apply_qubit_stochastic(&mut p, q, a);
        }
        p
    }
}

fn apply_qubit_stochastic(p: &mut [f64], q: usize, a: [[f64; 2]; 2]) {
    let bit = 1usize << q;
    for i in 0..p.len() {
        if i & bit == 0 {
            let (p0, p1) = (p[i], p[i | bit]);
            p[i] = a[0][0] * p0 + a[0][1] * p1;
            p[i | bit] = a[1][0] * p0 + a[1][1] * p1;
        }
    }
}

/// Sampled measurement outcomes of one circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotRecord {
    pub n_qubits: usize,
    pub counts: BTreeMap<u64, u64>,
    pub shots: u64,
    pub seed: u64,
    pub stream: u64,
}

impl ShotRecord {
    pub fn frequencies(&self) -> Vec<f64> {
        let mut f = vec![0.0; 1 << self.n_qubits];
        for (&b, &c) in &self.counts {
            f[b as usize] = c as f64 / self.shots as f64;
        }
        f
    }

    /// Mean of `(-1)^{popcount(b & mask)}` over the record.
    pub fn parity_expectation(&self, mask: u64) -> f64 {
        parity_mean(&self.frequencies(), mask)
    }
}

pub fn parity_mean(probs: &[f64], mask: u64) -> f64 {
    probs
        .iter()
        .enumerate()
        .map(|(b, p)| if (b as u64 & mask).count_ones() % 2 == 0 { *p } else { -*p })
        .sum()
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `shots` outcomes from `probs` (multinomial via sequential binomials).
pub fn sample_counts(probs: &[f64], shots: u64, seed: u64, stream: u64) -> Result<ShotRecord> {
    if !probs.len().is_power_of_two() {
        return Err(Error::DimensionMismatch {
            expected: probs.len().next_power_of_two(),
            found: probs.len(),
        });
    }
    let mut rng = rng_for(seed, stream);
    let mut counts = BTreeMap::new();
    let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(0);
    let mut remaining = shots;
    let mut mass: f64 = probs.iter().map(|p| p.max(0.0)).sum();
    for (b, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let p = p.max(0.0);
        if p == 0.0 && b != last {
            continue;
        }
        let k = if b == last || p >= mass {
            remaining
        } else {
            let dist = Binomial::new(remaining, (p / mass).clamp(0.0, 1.0))
                .map_err(|e| Error::Numerical(e.to_string()))?;
            dist.sample(&mut rng)
        };
        mass -= p;
        if k > 0 {
            counts.insert(b as u64, k);
            remaining -= k;
        }
    }
    Ok(ShotRecord {
        n_qubits: probs.len().trailing_zeros() as usize,
        counts,
        shots,
        seed,
        stream,
    })
}

/// Inverts the tensor-product confusion matrices on a record's frequencies,
/// clips negative entries and renormalizes.
pub fn mitigate_readout(record: &ShotRecord, model: &ReadoutNoiseModel) -> Result<Vec<f64>> {
    if model.n_qubits() != record.n_qubits {
        return Err(Error::EncodingMismatch {
            expected: record.n_qubits,
            found: model.n_qubits(),
        });
    }
    let mut p = record.frequencies();
    for q in 0..model.n_qubits() {
        let det = model.contrast(q);
        if det.abs() < 1e-12 {
            return Err(Error::SingularCalibration(q));
        }
        let (a, b) = (model.p01[q], model.p10[q]);
        let inv = [[(1.0 - b) / det, -b / det], [-a / det, (1.0 - a) / det]];
        apply_qubit_stochastic(&mut p, q, inv);
    }
    p.iter_mut().for_each(|v| *v = v.max(0.0));
    let total: f64 = p.iter().sum();
    if total <= 0.0 {
        return Err(Error::Numerical("mitigated distribution vanished".into()));
    }
    p.iter_mut().for_each(|v| *v /= total);
    Ok(p)
}

/// Basis change making `axes` diagonal: H for X, S†·H for Y.
pub fn measurement_rotation(axes: &PauliAxes) -> Circuit {
    let mut c = Circuit::new(axes.n_qubits);
    for q in 0..axes.n_qubits {
        match axes.get(q) {
            Pauli::X => c.gates.push(Gate::H { target: q }),
            Pauli::Y => {
                c.gates.push(Gate::Sdg { target: q });
                c.gates.push(Gate::H { target: q });
            }
            _ => {}
        }
    }
    c
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEstimate {
    pub label: String,
    pub coefficient: f64,
    pub expectation: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledExpectation {
    pub value: f64,
    pub std_error: f64,
    pub seed: u64,
    pub shots_per_term: u64,
    pub terms: Vec<TermEstimate>,
}

/// Per-term shot estimate of `⟨ψ|S|ψ⟩`. Term `k` draws from its own RNG
/// stream, so the result does not depend on evaluation order.
pub fn expectation_sampled(
    state: &Statevector,
    s: &PauliSum,
    shots_per_term: u64,
    seed: u64,
    noise: Option<&ReadoutNoiseModel>,
    mitigate: bool,
) -> Result<SampledExpectation> {
    check_operator(state, s)?;
    if shots_per_term == 0 {
        return Err(Error::InvalidParameter("shots per term must be at least 1".into()));
    }
    if let Some(m) = noise {
        if m.n_qubits() != s.n_qubits {
            return Err(Error::EncodingMismatch {
                expected: s.n_qubits,
                found: m.n_qubits(),
            });
        }
    }
    let terms: Vec<TermEstimate> = s
        .terms
        .par_iter()
        .enumerate()
        .map(|(k, t)| -> Result<TermEstimate> {
            if t.axes.is_identity() {
                return Ok(TermEstimate {
                    label: t.label(),
                    coefficient: t.coefficient,
                    expectation: 1.0,
                    std_error: 0.0,
                });
            }
            let mut rotated = state.clone();
            for g in &measurement_rotation(&t.axes).gates {
                rotated.apply(g);
            }
            let mut probs = rotated.probabilities();
            if let Some(m) = noise {
                probs = m.corrupt(&probs);
            }
            let record = sample_counts(&probs, shots_per_term, seed, k as u64)?;
            let mask = t.axes.support();
            let (e, shrink) = match (noise, mitigate) {
                (Some(m), true) => {
                    let p = mitigate_readout(&record, m)?;
                    let shrink: f64 = (0..s.n_qubits)
                        .filter(|q| mask >> q & 1 == 1)
                        .map(|q| m.contrast(q))
                        .product();
                    (parity_mean(&p, mask), shrink)
                }
                _ => (record.parity_expectation(mask), 1.0),
            };
            let ec = e.clamp(-1.0, 1.0);
            let se = ((1.0 - ec * ec) / shots_per_term as f64).sqrt() / shrink.abs();
            Ok(TermEstimate {
                label: t.label(),
                coefficient: t.coefficient,
                expectation: e,
                std_error: se,
            })
        })
        .collect::<Result<_>>()?;
    let value = terms.iter().map(|t| t.coefficient * t.expectation).sum();
    let var: f64 = terms.iter().map(|t| (t.coefficient * t.std_error).powi(2)).sum();
    Ok(SampledExpectation {
        value,
        std_error: var.sqrt(),
        seed,
        shots_per_term,
        terms,
    })
}

/// Householder reflection `R = I - 2wwᵀ` with `R v = |1…1⟩`.
pub fn householder_to_all_ones(v: &[f64]) -> Result<DMatrix<Complex64>> {
    let d = v.len();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let mut w = v.to_vec();
    w[d - 1] -= 1.0;
    let wn = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if wn < 1e-14 {
        return Ok(DMatrix::identity(d, d));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        Complex64::new(delta - 2.0 * w[i] * w[j] / (wn * wn), 0.0)
    }))
}

/// Overlap circuit: prepare ψ, rotate `v` onto `|1…1⟩`, copy the all-ones
/// flag onto an ancilla with a multi-controlled X, rotate back.
pub fn overlap_circuit(ansatz: &Circuit, v: &[f64]) -> Result<Circuit> {
    let n = ansatz.n_qubits;
    if v.len() != 1 << n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            found: v.len(),
        });
    }
    if n + 1 > MAX_QUBITS {
        return Err(Error::QubitOutOfRange {
            index: n + 1,
            n_qubits: MAX_QUBITS,
        });
    }
    let r = householder_to_all_ones(v)?;
    let data: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(n + 1);
    c.extend(ansatz)?;
    c.push(Gate::Unitary {
        qubits: data.clone(),
        matrix: r.clone(),
    })?;
    c.push(Gate::Mcx {
        controls: data.clone(),
        target: n,
    })?;
    c.push(Gate::Unitary {
        qubits: data,
        matrix: r.adjoint(),
    })?;
    Ok(c)
}

/// `|⟨v|ψ⟩|` read from the ancilla of [`overlap_circuit`].
pub fn overlap_magnitude(ansatz: &Circuit, v: &[f64]) -> Result<f64> {
    let c = overlap_circuit(ansatz, v)?;
    let out = run_circuit(&c, &Statevector::zero(c.n_qubits))?;
    let flag = 1usize << ansatz.n_qubits;
    let p1: f64 = out
        .amplitudes
        .iter()
        .enumerate()
        .filter(|(i, _)| i & flag != 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    Ok(p1.sqrt())
}
