//! Hadronic observables evaluated on a block wave function.

use std::collections::HashMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{
    chi, longitudinal_integral, BlockEnumeration, LongitudinalExponents,
    ModelParameters, WaveFunction,
};
use crate::error::{Error, Result};
use crate::hamiltonian::{HermitianObservable, Units};
use crate::pauli::{Encoding, PauliSum};
use crate::quadrature::{gauss_hermite, longitudinal_rule};
use crate::special::laguerre;

/// ħc in MeV·fm.
pub const HBAR_C: f64 = 197.327;
pub const QUARK_CHARGE: f64 = 2.0 / 3.0;
pub const ANTIQUARK_CHARGE: f64 = -1.0 / 3.0;

fn check_state(psi: &WaveFunction, block: &BlockEnumeration) -> Result<()> {
    if psi.len() != block.len() {
        return Err(Error::DimensionMismatch {
            expected: block.len(),
            found: psi.len(),
        });
    }
    Ok(())
}

/// `f_P = prefactor · |⟨v|ψ⟩|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayConstantSpec {
    pub vector: Vec<f64>,
    /// MeV.
    pub prefactor: f64,
}

impl DecayConstantSpec {
    /// Default-block reference vector and prefactor `2√N_c (b/√π) √2 L_0(½,½)`.
    pub fn new(params: &ModelParameters, exps: &LongitudinalExponents) -> Result<Self> {
        let l0 = longitudinal_integral(0, 0.5, 0.5, exps.alpha, exps.beta)?;
        Ok(Self {
            vector: vec![0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0],
            prefactor: 2.0 * (params.n_c as f64).sqrt() * params.b / PI.sqrt() * 2f64.sqrt() * l0,
        })
    }

    pub fn from_overlap(&self, overlap: f64) -> f64 {
        self.prefactor * overlap.abs()
    }

    /// Decay constant from the expectation of the projector `|v⟩⟨v|`.
    pub fn from_projector_expectation(&self, p: f64) -> f64 {
        self.prefactor * p.max(0.0).sqrt()
    }

    pub fn evaluate(&self, psi: &WaveFunction) -> Result<f64> {
        if psi.len() != self.vector.len() {
            return Err(Error::DimensionMismatch {
                expected: self.vector.len(),
                found: psi.len(),
            });
        }
        let overlap: f64 = self.vector.iter().zip(psi.as_slice()).map(|(a, b)| a * b).sum();
        Ok(self.from_overlap(overlap))
    }
}

/// Explicit basis sum `2√N_c (b/√π) Σ_{n,l} (-1)^n L_l(½,½) (ψ_{n0l+-} - ψ_{n0l-+})`.
pub fn decay_constant(
    psi: &WaveFunction,
    params: &ModelParameters,
    exps: &LongitudinalExponents,
    block: &BlockEnumeration,
) -> Result<f64> {
    check_state(psi, block)?;
    let mut sum = 0.0;
    for (s, c) in block.states.iter().zip(psi.as_slice()) {
        if s.m != 0 || s.s1 == s.s2 {
            continue;
        }
        let sign = if s.n % 2 == 0 { 1.0 } else { -1.0 };
        let l = longitudinal_integral(s.l, 0.5, 0.5, exps.alpha, exps.beta)?;
        sum += sign * l * f64::from(s.s1) * c;
    }
    Ok((2.0 * (params.n_c as f64).sqrt() * params.b / PI.sqrt() * sum).abs())
}

/// Projector onto the decay reference vector in the given encoding.
pub fn decay_projector(encoding: Encoding) -> Result<PauliSum> {
    let v = [0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0];
    let m = DMatrix::from_fn(4, 4, |i, j| v[i] * v[j]);
    encoding.encode(&HermitianObservable::new(m, Units::Dimensionless)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassRadiusMatrix {
    /// MeV⁻².
    pub observable: HermitianObservable,
}

impl MassRadiusMatrix {
    pub fn in_fm2(&self) -> HermitianObservable {
        HermitianObservable {
            entries: &self.observable.entries * (HBAR_C * HBAR_C),
            units: Units::Fm2,
        }
    }
}

/// `(3/2b²) I_m` with the oscillator matrix `I_m` diagonal in `m`, `l` and spins.
pub fn mass_radius_matrix(params: &ModelParameters, block: &BlockEnumeration) -> Result<MassRadiusMatrix> {
    let d = block.len();
    let scale = 1.5 / (params.b * params.b);
    let mut m = DMatrix::zeros(d, d);
    for (i, a) in block.states.iter().enumerate() {
        for (j, c) in block.states.iter().enumerate() {
            if a.m != c.m || a.l != c.l || a.s1 != c.s1 || a.s2 != c.s2 {
                continue;
            }
            let (n, am) = (c.n as f64, c.m.unsigned_abs() as f64);
            let v = if a.n == c.n {
                2.0 * n + am + 1.0
            } else if a.n + 1 == c.n {
                (n * (n + am)).sqrt()
            } else if a.n == c.n + 1 {
                ((n + 1.0) * (n + am + 1.0)).sqrt()
            } else {
                0.0
            };
            m[(i, j)] = scale * v;
        }
    }
    Ok(MassRadiusMatrix {
        observable: HermitianObservable::new(m, Units::InverseMeV2)?,
    })
}

/// Returns `(⟨r_m²⟩ in fm², r_m in fm)`.
pub fn mass_radius(psi: &WaveFunction, matrix: &MassRadiusMatrix) -> Result<(f64, f64)> {
    let r2 = matrix.in_fm2().expectation(psi.as_slice())?;
    Ok((r2, r2.max(0.0).sqrt()))
}

/// Longitudinal density matrix and the valence quark PDF on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdfDensity {
    /// `rho[l'][l]`.
    pub rho: Vec<Vec<f64>>,
    pub alpha: f64,
    pub beta: f64,
    pub x_grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl PdfDensity {
    /// Valence quark PDF `f(x) = (1/4π) Σ ρ_{l'l} χ_{l'}(x) χ_l(x)`.
    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let chis = (0..self.rho.len())
            .map(|l| chi(x, l as u32, self.alpha, self.beta))
            .collect::<Result<Vec<_>>>()?;
        let mut f = 0.0;
        for (lp, row) in self.rho.iter().enumerate() {
            for (l, r) in row.iter().enumerate() {
                f += r * chis[lp] * chis[l];
            }
        }
        Ok(f / (4.0 * PI))
    }

    pub fn antiquark(&self, x: f64) -> Result<f64> {
        self.evaluate(1.0 - x)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rho.len()).map(|l| self.rho[l][l]).sum()
    }

    /// `∫₀¹ f(x) dx` on the longitudinal Gauss-Legendre rule.
    pub fn normalization(&self) -> Result<f64> {
        longitudinal_rule()
            .iter()
            .map(|(x, w)| Ok(w * self.evaluate(x)?))
            .sum()
    }
}

pub fn pdf(
    psi: &WaveFunction,
    exps: &LongitudinalExponents,
    block: &BlockEnumeration,
    x_grid: &[f64],
) -> Result<PdfDensity> {
    check_state(psi, block)?;
    let nl = block.cutoffs.l_max as usize + 1;
    let mut rho = vec![vec![0.0; nl]; nl];
    let c = psi.as_slice();
    for (i, a) in block.states.iter().enumerate() {
        for (j, b) in block.states.iter().enumerate() {
            if a.n == b.n && a.m == b.m && a.s1 == b.s1 && a.s2 == b.s2 {
                rho[a.l as usize][b.l as usize] += c[i] * c[j];
            }
        }
    }
    let mut out = PdfDensity {
        rho,
        alpha: exps.alpha,
        beta: exps.beta,
        x_grid: x_grid.to_vec(),
        values: Vec::new(),
    };
    out.values = x_grid.iter().map(|&x| out.evaluate(x)).collect::<Result<_>>()?;
    Ok(out)
}

/// Largest |m| covered by the Talmi-Moshinsky table.
pub const TM_MAX_ABS_M: i32 = 2;
const TM_NODES: usize = 12;

type TmKey = [i32; 8];

fn tm_table() -> &'static HashMap<TmKey, f64> {
    static TABLE: OnceLock<HashMap<TmKey, f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut keys = Vec::new();
        for mp in -TM_MAX_ABS_M..=TM_MAX_ABS_M {
            for m in -TM_MAX_ABS_M..=TM_MAX_ABS_M {
                let shell = mp.abs() + m.abs();
                for big_n in 0..=shell / 2 {
                    for big_m in -shell..=shell {
                        let mbar = m - mp - big_m;
                        let rest = shell - 2 * big_n - big_m.abs() - mbar.abs();
                        if rest >= 0 && rest % 2 == 0 {
                            keys.push([0, mp, 0, m, big_n, big_m, rest / 2, mbar]);
                        }
                    }
                }
            }
        }
        keys.into_par_iter().map(|k| (k, tm_projection(&k))).collect()
    })
}

/// `∫ d²P d²p/(2π)⁴ [φ_NM(P) φ_n̄m̄(p)]* φ_{n',-m'}(q₁) φ_nm(q₂)` by
/// Gauss-Hermite quadrature. The oscillator scale drops out; b = 1.
fn tm_projection(k: &TmKey) -> f64 {
    let [np, mp, n, m, big_n, big_m, nbar, mbar] = *k;
    let ho = |n: i32, m: i32, q: [f64; 2]| crate::basis::ho_momentum(n as u32, m, q, 1.0);
    let rule = gauss_hermite(TM_NODES);
    let mut acc = Complex64::new(0.0, 0.0);
    for (p1, w1) in rule.iter() {
        for (p2, w2) in rule.iter() {
            let big_p = [p1, p2];
            let a = ho(big_n, big_m, big_p).conj();
            for (r1, w3) in rule.iter() {
                for (r2, w4) in rule.iter() {
                    let p = [r1, r2];
                    let q1 = [(p1 + r1) * FRAC_1_SQRT_2, (p2 + r2) * FRAC_1_SQRT_2];
                    let q2 = [(p1 - r1) * FRAC_1_SQRT_2, (p2 - r2) * FRAC_1_SQRT_2];
                    let f = a * ho(nbar, mbar, p).conj() * ho(np, -mp, q1) * ho(n, m, q2);
                    let gauss = (p1 * p1 + p2 * p2 + r1 * r1 + r2 * r2).exp();
                    acc += f * (w1 * w2 * w3 * w4 * gauss);
                }
            }
        }
    }
    let c = (acc / (2.0 * PI).powi(4)).re;
    // quadrature noise on coefficients that vanish by symmetry
    if c.abs() < 1e-12 { 0.0 } else { c }
}

/// Talmi-Moshinsky coefficient `C(n', -m', n, m; N, M, n̄, m̄)`. Only
/// `n = n' = 0` and `|m|, |m'| ≤ 2` are supported.
#[allow(clippy::too_many_arguments)]
pub fn tm_coefficient(np: u32, mp: i32, n: u32, m: i32, big_n: u32, big_m: i32, nbar: u32, mbar: i32) -> Result<f64> {
    if np != 0 || n != 0 || mp.abs() > TM_MAX_ABS_M || m.abs() > TM_MAX_ABS_M {
        return Err(Error::QuantumNumbersOutOfRange(format!(
            "TM table covers n = n' = 0 and |m| <= {TM_MAX_ABS_M}, got n'={np}, m'={mp}, n={n}, m={m}"
        )));
    }
    if big_m + mbar != m - mp {
        return Ok(0.0);
    }
    let lhs = 2 * big_n as i64 + big_m.abs() as i64 + 2 * nbar as i64 + mbar.abs() as i64;
    let rhs = 2 * np as i64 + mp.abs() as i64 + 2 * n as i64 + m.abs() as i64;
    if lhs != rhs {
        return Ok(0.0);
    }
    Ok(tm_table()
        .get(&[np as i32, mp, n as i32, m, big_n as i32, big_m, nbar as i32, mbar])
        .copied()
        .unwrap_or(0.0))
}

/// Nonzero table entries `((N, M, n̄, m̄), C)` for one source pair.
pub fn tm_expansion(np: u32, mp: i32, n: u32, m: i32) -> Result<Vec<((u32, i32, u32, i32), f64)>> {
    tm_coefficient(np, mp, n, m, 0, m - mp, 0, 0)?;
    let mut out: Vec<_> = tm_table()
        .iter()
        .filter(|(k, _)| k[..4] == [np as i32, mp, n as i32, m])
        .map(|(k, &c)| ((k[4] as u32, k[5], k[6] as u32, k[7]), c))
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    Ok(out)
}

/// Charge-density matrix `C̃(Q²)` in the block basis.
pub fn form_factor_matrix(
    q2: f64,
    params: &ModelParameters,
    exps: &LongitudinalExponents,
    block: &BlockEnumeration,
) -> Result<HermitianObservable> {
    if !(q2 >= 0.0) || !q2.is_finite() {
        return Err(Error::InvalidParameter(format!("Q^2 must be non-negative, got {q2}")));
    }
    let b2 = params.b * params.b;
    let rule = longitudinal_rule();
    let nl = block.cutoffs.l_max + 1;
    // chi_l at every node
    let chis: Vec<Vec<f64>> = (0..nl)
        .map(|l| rule.nodes.iter().map(|&x| chi(x, l, exps.alpha, exps.beta)).collect())
        .collect::<Result<_>>()?;
    let d = block.len();
    let mut out = DMatrix::zeros(d, d);
    for (i, a) in block.states.iter().enumerate() {
        for (j, c) in block.states.iter().enumerate().skip(i) {
            if a.m != c.m || a.s1 != c.s1 || a.s2 != c.s2 {
                continue;
            }
            let mut v = 0.0;
            for ((big_n, _, nbar, _), coef) in tm_expansion(a.n, a.m, c.n, c.m)?
                .into_iter()
                .filter(|((_, mm, _, mb), _)| *mm == 0 && *mb == 0)
            {
                let sign = if big_n % 2 == 0 { 1.0 } else { -1.0 };
                let integral: f64 = rule
                    .iter()
                    .enumerate()
                    .map(|(k, (x, w))| {
                        let zq = (1.0 - x) * q2 / (2.0 * x * b2);
                        let za = x * q2 / (2.0 * (1.0 - x) * b2);
                        let g = QUARK_CHARGE * (-zq / 2.0).exp() * laguerre(nbar, 0.0, zq)
                            - ANTIQUARK_CHARGE * (-za / 2.0).exp() * laguerre(nbar, 0.0, za);
                        w * chis[a.l as usize][k] * chis[c.l as usize][k] / (4.0 * PI) * g
                    })
                    .sum();
                v += coef * sign * integral;
            }
            if !v.is_finite() {
                return Err(Error::Numerical(format!("form factor entry not finite at Q^2 = {q2}")));
            }
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    HermitianObservable::new(out, Units::Dimensionless)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormFactorCurve {
    /// `(Q² in MeV², F_P)`, ascending in Q².
    pub points: Vec<(f64, f64)>,
    pub quark_charge: f64,
    pub antiquark_charge: f64,
}

impl FormFactorCurve {
    pub fn from_points(mut points: Vec<(f64, f64)>) -> Self {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            points,
            quark_charge: QUARK_CHARGE,
            antiquark_charge: ANTIQUARK_CHARGE,
        }
    }

    pub fn at(&self, q2: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|(q, _)| (q - q2).abs() <= 1e-9 * q2.abs().max(1.0))
            .map(|p| p.1)
    }
}

/// Richardson step used by [`charge_radius`] for oscillator scale `b`.
pub fn charge_radius_step(b: f64) -> f64 {
    b * b / 100.0
}

/// Zero, the two Richardson points and `n_uniform` points spread evenly up to 100 b².
pub fn default_q2_grid(b: f64, n_uniform: usize) -> Vec<f64> {
    let h = charge_radius_step(b);
    let top = 100.0 * b * b;
    let mut g = vec![0.0, h / 2.0, h];
    let n = n_uniform.max(2);
    g.extend((1..n).map(|k| top * k as f64 / (n - 1) as f64));
    g.sort_by(f64::total_cmp);
    g.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs().max(1.0));
    g
}

/// `F_P(Q²) = ⟨ψ|C̃(Q²)|ψ⟩` on each grid point.
pub fn elastic_form_factor(
    psi: &WaveFunction,
    q2_grid: &[f64],
    params: &ModelParameters,
    exps: &LongitudinalExponents,
    block: &BlockEnumeration,
) -> Result<FormFactorCurve> {
    check_state(psi, block)?;
    let points = q2_grid
        .par_iter()
        .map(|&q2| Ok((q2, form_factor_matrix(q2, params, exps, block)?.expectation(psi.as_slice())?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(FormFactorCurve::from_points(points))
}

/// `√(-6 F'(0))` in MeV⁻¹ from forward differences at `h` and `h/2`,
/// where `h` is the second-smallest positive Q² of the curve.
pub fn charge_radius(curve: &FormFactorCurve) -> Result<f64> {
    let f0 = curve
        .at(0.0)
        .ok_or_else(|| Error::InsufficientPoints("curve has no Q^2 = 0 point".into()))?;
    let positive: Vec<(f64, f64)> = curve.points.iter().copied().filter(|p| p.0 > 0.0).collect();
    if positive.len() < 2 {
        return Err(Error::InsufficientPoints("need two positive Q^2 points".into()));
    }
    let (half, f_half) = positive[0];
    let (h, f_h) = positive[1];
    if ((h - 2.0 * half) / h).abs() > 1e-9 {
        return Err(Error::InsufficientPoints(format!(
            "smallest positive points {half} and {h} are not a step pair (h/2, h)"
        )));
    }
    let d1 = (f_h - f0) / h;
    let d2 = (f_half - f0) / half;
    let slope = 2.0 * d2 - d1;
    let r2 = -6.0 * slope;
    if r2 < -1e-12 {
        return Err(Error::Numerical(format!("form factor slope at the origin is positive ({slope:e})")));
    }
    Ok(r2.max(0.0).sqrt())
}
