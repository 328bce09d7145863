//! Light-front basis: model parameters, longitudinal and transverse basis
//! functions, the longitudinal overlap integrals, and fixed-J_z blocks.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{jacobi, laguerre, ln_factorial, ln_gamma};

/// Physical constants of the BLFQ-NJL model. Masses and scales in MeV,
/// the NJL coupling in MeV⁻².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParameters {
    pub quark_mass: f64,
    pub antiquark_mass: f64,
    /// Confining strength κ.
    pub kappa: f64,
    /// HO basis scale b. Usually equal to κ.
    pub b: f64,
    pub g_pi: f64,
    pub n_c: u32,
}

impl Default for ModelParameters {
    fn default() -> Self {
        Self {
            quark_mass: 337.01,
            antiquark_mass: 337.01,
            kappa: 227.0,
            b: 227.0,
            g_pi: 250.785e-6,
            n_c: 3,
        }
    }
}

impl ModelParameters {
    /// Parameters with `b = κ`.
    pub fn new(quark_mass: f64, antiquark_mass: f64, kappa: f64, g_pi: f64) -> Result<Self> {
        let p = Self {
            quark_mass,
            antiquark_mass,
            kappa,
            b: kappa,
            g_pi,
            n_c: 3,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("quark_mass", self.quark_mass),
            ("antiquark_mass", self.antiquark_mass),
            ("kappa", self.kappa),
            ("b", self.b),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if !self.g_pi.is_finite() {
            return Err(Error::InvalidParameter(format!("g_pi must be finite, got {}", self.g_pi)));
        }
        if self.n_c == 0 {
            return Err(Error::InvalidParameter("n_c must be at least 1".into()));
        }
        Ok(())
    }
}

/// Truncation of the basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisCutoffs {
    pub n_max: u32,
    pub m_max: u32,
    pub l_max: u32,
}

impl Default for BasisCutoffs {
    fn default() -> Self {
        Self {
            n_max: 0,
            m_max: 2,
            l_max: 0,
        }
    }
}

impl BasisCutoffs {
    pub fn is_default(&self) -> bool {
        *self == Self::default()
    }
}

/// Exponents of the longitudinal basis functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LongitudinalExponents {
    pub alpha: f64,
    pub beta: f64,
}

pub fn compute_exponents(params: &ModelParameters) -> LongitudinalExponents {
    let m = params.quark_mass;
    let mb = params.antiquark_mass;
    let k2 = params.kappa * params.kappa;
    LongitudinalExponents {
        alpha: 2.0 * mb * (m + mb) / k2,
        beta: 2.0 * m * (m + mb) / k2,
    }
}

/// `L_l(a, b; α, β) = ∫₀¹ dx/(4π) x^b (1-x)^a χ_l(x; α, β)`, summed from the
/// `C_{l,m}` recurrences.
pub fn longitudinal_integral(l: u32, a: f64, b_exp: f64, alpha: f64, beta: f64) -> Result<f64> {
    let ha = 0.5 * alpha + a;
    let hb = 0.5 * beta + b_exp;
    let ln_c00 = 0.5 * (ln_gamma(alpha + beta + 1.0)? - ln_gamma(alpha + 1.0)? - ln_gamma(beta + 1.0)?)
        + ln_gamma(hb + 1.0)?
        + ln_gamma(ha + 1.0)?
        - ln_gamma(hb + ha + 2.0)?;
    // l > 0 also evaluates Γ(l+α+1), Γ(l+β+1), Γ(α/2+a+l+1); check them.
    for k in 1..=l {
        let k = k as f64;
        ln_gamma(k + alpha + 1.0)?;
        ln_gamma(k + beta + 1.0)?;
        ln_gamma(ha + k + 1.0)?;
    }
    let mut c_l0 = ln_c00.exp();
    for k in 1..=l {
        let k = k as f64;
        c_l0 *= -((k + beta) * (k + alpha + beta) / (k * (k + alpha))).sqrt() * (ha + k)
            / (hb + ha + k + 1.0);
    }
    let lf = l as f64;
    let mut c = c_l0;
    let mut sum = c;
    for m in 1..=l {
        let mf = m as f64;
        c *= -(lf + alpha - mf + 1.0) * (lf - mf + 1.0) * (hb + mf)
            / (mf * (beta + mf) * (ha + lf - mf + 1.0));
        sum += c;
    }
    Ok(((2.0 * lf + alpha + beta + 1.0) / (4.0 * PI)).sqrt() * sum)
}

fn check_unit_interval(x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideUnitInterval(x))
    }
}

/// ln of the Jacobi normalization `sqrt(Γ(l+1)Γ(l+α+β+1) / (Γ(l+α+1)Γ(l+β+1)))`.
fn ln_jacobi_norm(l: u32, alpha: f64, beta: f64) -> Result<f64> {
    let lf = l as f64;
    Ok(0.5
        * (ln_gamma(lf + 1.0)? + ln_gamma(lf + alpha + beta + 1.0)?
            - ln_gamma(lf + alpha + 1.0)?
            - ln_gamma(lf + beta + 1.0)?))
}

/// Longitudinal basis function `χ_l(x; α, β)`, normalized so that
/// `∫₀¹ χ_l χ_l' dx / 4π = δ_ll'`.
pub fn chi(x: f64, l: u32, alpha: f64, beta: f64) -> Result<f64> {
    check_unit_interval(x)?;
    let lf = l as f64;
    let norm = (4.0 * PI * (2.0 * lf + alpha + beta + 1.0)).sqrt() * ln_jacobi_norm(l, alpha, beta)?.exp();
    Ok(norm
        * x.powf(0.5 * beta)
        * (1.0 - x).powf(0.5 * alpha)
        * jacobi(l, alpha, beta, 2.0 * x - 1.0))
}

fn unit_phase(m: i32, vx: f64, vy: f64) -> Complex64 {
    if m == 0 || (vx == 0.0 && vy == 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    Complex64::from_polar(1.0, m as f64 * vy.atan2(vx))
}

/// Transverse HO function in momentum space, `φ_nm(q⊥; b)`.
pub fn ho_momentum(n: u32, m: i32, q: [f64; 2], b: f64) -> Complex64 {
    let am = m.unsigned_abs();
    let q2 = q[0] * q[0] + q[1] * q[1];
    let rho = q2.sqrt() / b;
    if am > 0 && rho == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let norm = (0.5 * ((4.0 * PI).ln() + ln_factorial(n) - ln_factorial(n + am))).exp() / b;
    let radial = norm * rho.powi(am as i32) * (-0.5 * rho * rho).exp() * laguerre(n, am as f64, rho * rho);
    unit_phase(m, q[0], q[1]) * radial
}

/// Transverse HO function in coordinate space, `φ̃_nm(r⊥; b)`, the 2D Fourier
/// transform of [`ho_momentum`].
pub fn ho_coordinate(n: u32, m: i32, r: [f64; 2], b: f64) -> Complex64 {
    let am = m.unsigned_abs();
    let r2 = r[0] * r[0] + r[1] * r[1];
    let rho = b * r2.sqrt();
    if am > 0 && rho == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let norm = b * (0.5 * (ln_factorial(n) - ln_factorial(n + am))).exp() / PI.sqrt();
    let radial = norm * rho.powi(am as i32) * (-0.5 * rho * rho).exp() * laguerre(n, am as f64, rho * rho);
    // e^{i(n + |m|/2)π} = (-1)^n i^{|m|}
    let fixed = Complex64::from_polar(1.0, (n as f64 + 0.5 * am as f64) * PI);
    let fixed = Complex64::new(fixed.re.round(), fixed.im.round());
    fixed * unit_phase(m, r[0], r[1]) * radial
}

/// Quantum numbers of one basis state. Spins are stored as ±1 (twice the spin).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BasisState {
    pub n: u32,
    pub m: i32,
    pub l: u32,
    pub s1: i8,
    pub s2: i8,
    /// 1-based block index.
    pub theta: u32,
    pub jz: i32,
}

const SPIN_ORDER: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

/// `(m, s1, s2)` combinations of one J_z block, in block order.
fn theta_table(jz: i32, m_max: u32) -> Vec<(i32, i8, i8)> {
    let m_max = m_max as i32;
    let mut out = Vec::new();
    for m in -m_max..=m_max {
        for &(s1, s2) in &SPIN_ORDER {
            if 2 * m + (s1 + s2) as i32 == 2 * jz {
                out.push((m, s1, s2));
            }
        }
    }
    out
}

/// Number of θ values in block J_z.
pub fn theta_degeneracy(jz: i32, m_max: u32) -> usize {
    theta_table(jz, m_max).len()
}

/// Basis states of one J_z block, ordered by the linear index
/// `a(n, l, θ) = [n(L_max+1) + l]·d_θ + θ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockEnumeration {
    pub jz: i32,
    pub cutoffs: BasisCutoffs,
    pub d_theta: usize,
    pub states: Vec<BasisState>,
}

impl BlockEnumeration {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// 0-based position of `(n, l, θ)` in the block, i.e. `a - 1`.
    pub fn index(&self, n: u32, l: u32, theta: u32) -> Option<usize> {
        if n > self.cutoffs.n_max || l > self.cutoffs.l_max || theta == 0 || theta as usize > self.d_theta {
            return None;
        }
        let nl = (n * (self.cutoffs.l_max + 1) + l) as usize;
        Some(nl * self.d_theta + theta as usize - 1)
    }
}

pub fn enumerate_block(jz: i32, cutoffs: &BasisCutoffs) -> Result<BlockEnumeration> {
    if cutoffs.m_max != 2 {
        return Err(Error::UnsupportedCutoffs(format!(
            "block tables exist only for M_max = 2, got {}",
            cutoffs.m_max
        )));
    }
    let table = theta_table(jz, cutoffs.m_max);
    if table.is_empty() {
        return Err(Error::InvalidJz(jz));
    }
    let mut states = Vec::with_capacity(table.len() * ((cutoffs.n_max + 1) * (cutoffs.l_max + 1)) as usize);
    for n in 0..=cutoffs.n_max {
        for l in 0..=cutoffs.l_max {
            for (t, &(m, s1, s2)) in table.iter().enumerate() {
                states.push(BasisState {
                    n,
                    m,
                    l,
                    s1,
                    s2,
                    theta: t as u32 + 1,
                    jz,
                });
            }
        }
    }
    Ok(BlockEnumeration {
        jz,
        cutoffs: *cutoffs,
        d_theta: table.len(),
        states,
    })
}

/// Sizes of the full basis and of each J_z block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDimensions {
    pub n_h: usize,
    pub per_jz: BTreeMap<i32, usize>,
}

pub fn block_dimensions(cutoffs: &BasisCutoffs) -> BlockDimensions {
    let nl = ((cutoffs.n_max + 1) * (cutoffs.l_max + 1)) as usize;
    let n_h = 4 * nl * (2 * cutoffs.m_max as usize + 1);
    let jmax = cutoffs.m_max as i32 + 1;
    let per_jz = (-jmax..=jmax)
        .map(|jz| (jz, theta_degeneracy(jz, cutoffs.m_max) * nl))
        .filter(|&(_, d)| d > 0)
        .collect();
    BlockDimensions { n_h, per_jz }
}

/// Real expansion coefficients of a state within one block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFunction {
    pub coefficients: Vec<f64>,
}

impl WaveFunction {
    pub const NORM_TOLERANCE: f64 = 1e-12;

    /// Wraps coefficients that are already normalized.
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        let norm2: f64 = coefficients.iter().map(|c| c * c).sum();
        if (norm2 - 1.0).abs() > Self::NORM_TOLERANCE || !norm2.is_finite() {
            return Err(Error::NotNormalized(norm2.sqrt()));
        }
        Ok(Self { coefficients })
    }

    /// Normalizes arbitrary nonzero coefficients.
    pub fn normalized(mut coefficients: Vec<f64>) -> Result<Self> {
        let norm = coefficients.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized(norm));
        }
        coefficients.iter_mut().for_each(|c| *c /= norm);
        Ok(Self { coefficients })
    }

    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coefficients
    }
}
