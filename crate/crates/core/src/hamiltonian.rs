//! Effective BLFQ-NJL Hamiltonian in the `J_z = 0` block and its classical
//! eigensolver.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::basis::{
    compute_exponents, enumerate_block, longitudinal_integral, BasisCutoffs, BlockEnumeration,
    LongitudinalExponents, ModelParameters,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Units {
    MeV2,
    InverseMeV2,
    Fm2,
    Dimensionless,
}

impl fmt::Display for Units {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Units::MeV2 => "MeV^2",
            Units::InverseMeV2 => "MeV^-2",
            Units::Fm2 => "fm^2",
            Units::Dimensionless => "1",
        })
    }
}

/// Dense real symmetric matrix in the basis representation.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianObservable {
    pub entries: DMatrix<f64>,
    pub units: Units,
}

impl HermitianObservable {
    pub const SYMMETRY_TOLERANCE: f64 = 1e-9;

    pub fn new(entries: DMatrix<f64>, units: Units) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        let scale = entries.amax().max(f64::MIN_POSITIVE);
        let asym = (&entries - entries.transpose()).amax();
        if asym > Self::SYMMETRY_TOLERANCE * scale || entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NotSymmetric(asym / scale));
        }
        Ok(Self { entries, units })
    }

    pub fn from_rows(rows: &[Vec<f64>], units: Units) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: bad.len(),
            });
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]), units)
    }

    pub fn diagonal(values: &[f64], units: Units) -> Self {
        Self {
            entries: DMatrix::from_diagonal(&DVector::from_column_slice(values)),
            units,
        }
    }

    pub fn dimension(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dimension())
            .map(|i| self.entries.row(i).iter().copied().collect())
            .collect()
    }

    /// `⟨ψ|M|ψ⟩` for a real vector.
    pub fn expectation(&self, psi: &[f64]) -> Result<f64> {
        if psi.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: psi.len(),
            });
        }
        let v = DVector::from_column_slice(psi);
        Ok(v.dot(&(&self.entries * &v)))
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigensolution {
    pub eigenvalues: Vec<f64>,
    /// Column `k` belongs to `eigenvalues[k]`.
    pub eigenvectors: DMatrix<f64>,
}

impl Eigensolution {
    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k).iter().copied().collect()
    }

    pub fn ground_state(&self) -> Vec<f64> {
        self.vector(0)
    }
}

fn require_default_block(block: &BlockEnumeration) -> Result<()> {
    let c = block.cutoffs;
    if c.n_max != 0 || c.l_max != 0 || c.m_max != 2 {
        return Err(Error::UnsupportedCutoffs(format!(
            "matrix elements are available for N_max = L_max = 0, M_max = 2 only (got {}, {}, {})",
            c.n_max, c.l_max, c.m_max
        )));
    }
    if block.jz != 0 {
        return Err(Error::InvalidJz(block.jz));
    }
    Ok(())
}

/// Kinetic plus confining diagonal.
pub fn build_h0_diagonal(params: &ModelParameters, block: &BlockEnumeration) -> Result<HermitianObservable> {
    require_default_block(block)?;
    let mass2 = (params.quark_mass + params.antiquark_mass).powi(2);
    let k2 = params.kappa * params.kappa;
    let diag: Vec<f64> = block
        .states
        .iter()
        .map(|s| {
            let excitation = 2 * s.n + s.m.unsigned_abs() + s.l + 1;
            // |m| = 1 -> 5κ², m = 0 -> 3κ²
            mass2 + k2 * (2.0 * excitation as f64 + 1.0)
        })
        .collect();
    Ok(HermitianObservable::diagonal(&diag, Units::MeV2))
}

/// The NJL interaction matrix. Entries follow the closed-form `L_0(a, b)`
/// expressions; `H11` and `H44` share the negative shift and the `H12`
/// longitudinal factor is `L'(0,1) + L'(0,0)`.
pub fn build_njl_matrix(
    params: &ModelParameters,
    exponents: &LongitudinalExponents,
    block: &BlockEnumeration,
) -> Result<HermitianObservable> {
    require_default_block(block)?;
    let (al, be) = (exponents.alpha, exponents.beta);
    let l = |a: f64, b: f64| longitudinal_integral(0, a, b, al, be);
    let m = params.quark_mass;
    let mb = params.antiquark_mass;
    let g = params.g_pi;
    let b = params.b;
    let (b2, b3, b4) = (b * b, b * b * b, b * b * b * b);
    let h = 0.5;

    let l00 = l(0.0, 0.0)?;
    let l01 = l(0.0, 1.0)?;
    let l10 = l(1.0, 0.0)?;
    let lpp = l(h, h)?;
    let lpm = l(h, -h)?;
    let lmp = l(-h, h)?;
    let lmm = l(-h, -h)?;
    let lm3 = l(-h, 3.0 * h)?;

    let a_term = (mb * lmp + m * lpm) * (mb * lmp + m * lpm);
    let b_term = lpp * lmm + lmp * lpm + lpm * lmp + lmm * lpp + lm3 * lmm - 2.0 * lmp * lmp + lmm * lm3;

    let mut v = DMatrix::<f64>::zeros(4, 4);
    let shift_m1 = -8.0 * g * b4 / PI * l00 * l00;
    v[(0, 0)] = shift_m1;
    v[(3, 3)] = shift_m1;
    v[(0, 1)] = 4.0 * g * b3 / PI * (m * (l01 + l00) * lpm + mb * l00 * lmp);
    v[(0, 2)] = -2.0 * g * b3 / PI * l00 * (mb * (2.0 * lmp + lm3 + lpp) + 2.0 * m * lpm);
    v[(0, 3)] = -4.0 * g * b4 / PI
        * (l01 * l10 + l10 * l01 + l01 * l00 + l00 * l01 - 2.0 * l01 * l01 + 2.0 * l00 * l00);
    v[(1, 1)] = -g * b2 / PI * mb * m * b_term - 2.0 * g * b2 / PI * a_term;
    v[(2, 2)] = v[(1, 1)];
    v[(1, 2)] = 2.0 * g * b2 / PI * a_term;
    v[(1, 3)] = 2.0 * g * b3 / PI * mb * ((lm3 + 2.0 * lmp) * l00 - lmp * l01)
        + 2.0 * g * b3 / PI * m * ((lpp + 2.0 * lpm) * l00 + lpm * l01);
    v[(2, 3)] = -4.0 * g * b3 / PI * (m * (lpm * l01 + lpm * l00) + mb * lmp * l00);
    for i in 0..4 {
        for j in 0..i {
            v[(i, j)] = v[(j, i)];
        }
    }
    HermitianObservable::new(v, Units::MeV2)
}

/// `H = H₀ + H_NJL` in the requested block.
pub fn build_effective_hamiltonian(
    params: &ModelParameters,
    cutoffs: &BasisCutoffs,
    jz: i32,
) -> Result<HermitianObservable> {
    params.validate()?;
    let block = enumerate_block(jz, cutoffs)?;
    let exps = compute_exponents(params);
    let h0 = build_h0_diagonal(params, &block)?;
    let v = build_njl_matrix(params, &exps, &block)?;
    HermitianObservable::new(h0.entries + v.entries, Units::MeV2)
}

/// Flips the sign of `v` so its largest-magnitude entry is positive. Ties
/// within 1e-9 go to the lowest index.
pub fn fix_sign(v: &mut [f64]) {
    let Some(max) = v.iter().map(|x| x.abs()).reduce(f64::max) else {
        return;
    };
    if let Some(pivot) = v.iter().find(|x| x.abs() >= max - 1e-9 * max.max(1.0)) {
        if *pivot < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Full spectrum, ascending, with sign-fixed eigenvectors.
pub fn diagonalize(h: &HermitianObservable) -> Result<Eigensolution> {
    let n = h.dimension();
    let eig = nalgebra::SymmetricEigen::try_new(h.entries.clone(), f64::EPSILON, 10_000)
        .ok_or(Error::EigenFailure)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        let mut v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
        fix_sign(&mut v);
        eigenvectors.set_column(col, &DVector::from_vec(v));
    }
    Ok(Eigensolution {
        eigenvalues,
        eigenvectors,
    })
}
