//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use blfq_vqe::basis::ho_momentum;
use blfq_vqe::quadrature::{gauss_hermite, longitudinal_rule};
use blfq_vqe::{
    chi, compute_exponents, enumerate_block, BasisCutoffs, BlockEnumeration, HermitianObservable,
    LongitudinalExponents, ModelParameters, Units,
};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

/// The printed 4×4 Hamiltonian in MeV².
pub const PRINTED_H: [[f64; 4]; 4] = [
    [640323.0, 139872.0, -139872.0, -107450.0],
    [139872.0, 346707.0, 174794.0, 139872.0],
    [-139872.0, 174794.0, 346707.0, -139872.0],
    [-107450.0, 139872.0, -139872.0, 640323.0],
];
pub const PRINTED_TRACE: f64 = 1_974_060.0;
pub const PRINTED_GROUND: f64 = 19488.0;
pub const PRINTED_SECOND: f64 = 521_501.0;

/// Printed two-qubit expansion.
pub const PRINTED_COMPACT: [(&str, f64); 6] = [
    ("II", 493515.0),
    ("XX", 33671.0),
    ("YY", 141122.0),
    ("ZZ", 146807.0),
    ("ZX", 139872.0),
    ("XZ", -139872.0),
];

/// Printed four-qubit expansion.
pub const PRINTED_DIRECT: [(&str, f64); 17] = [
    ("IIII", 987031.0),
    ("IXXI", 87397.0),
    ("IYYI", 87397.0),
    ("YZZY", -53725.0),
    ("XZZX", -53725.0),
    ("IIIZ", -320161.0),
    ("ZIII", -320161.0),
    ("IZII", -173353.0),
    ("IIZI", -173353.0),
    ("IIYY", 69936.0),
    ("IIXX", 69936.0),
    ("YZYI", 69936.0),
    ("XZXI", 69936.0),
    ("IYZY", -69936.0),
    ("IXZX", -69936.0),
    ("YYII", -69936.0),
    ("XXII", -69936.0),
];

pub fn printed_matrix() -> HermitianObservable {
    let rows: Vec<Vec<f64>> = PRINTED_H.iter().map(|r| r.to_vec()).collect();
    HermitianObservable::from_rows(&rows, Units::MeV2).unwrap()
}

pub struct Setup {
    pub params: ModelParameters,
    pub exps: LongitudinalExponents,
    pub block: BlockEnumeration,
}

pub fn setup() -> Setup {
    let params = ModelParameters::default();
    Setup {
        exps: compute_exponents(&params),
        block: enumerate_block(0, &BasisCutoffs::default()).unwrap(),
        params,
    }
}

/// Spectrum of a matrix with the pion block's structure
/// `[[a,c,-c,d],[c,e,f,c],[-c,f,e,-c],[d,c,-c,a]]`, from the two symmetry
/// sectors. Returns `(even sector eigenvalues ascending, odd sector values)`
/// and the even-sector ground vector in the full basis.
pub fn symmetry_sectors(h: &[[f64; 4]; 4]) -> ([f64; 2], [f64; 2], [f64; 4]) {
    let a = 0.5 * (h[0][0] + h[3][3]);
    let e = 0.5 * (h[1][1] + h[2][2]);
    let c = 0.25 * (h[0][1] - h[0][2] + h[3][1] - h[3][2]);
    let d = h[0][3];
    let f = h[1][2];
    // even: u1 = (1,0,0,1)/√2, u2 = (0,1,-1,0)/√2
    let (p, q, r) = (a + d, e - f, 2.0 * c);
    let mean = 0.5 * (p + q);
    let rad = (0.25 * (p - q).powi(2) + r * r).sqrt();
    let low = mean - rad;
    // eigenvector (r, low - p) in the (u1, u2) basis
    let (x, y) = (r, low - p);
    let n = (x * x + y * y).sqrt();
    let s = std::f64::consts::FRAC_1_SQRT_2 / n;
    let v = [x * s, y * s, -y * s, x * s];
    ([low, mean + rad], [a - d, e + f], v)
}

pub fn dense_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `∫₀¹ dx/(4π) x^b (1-x)^a χ_l(x)` by adaptive quadrature.
pub fn longitudinal_quadrature(l: u32, a: f64, b: f64, alpha: f64, beta: f64) -> f64 {
    let f = |x: f64| {
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        x.powf(b) * (1.0 - x).powf(a) * chi(x, l, alpha, beta).unwrap() / (4.0 * PI)
    };
    adaptive_simpson(&f, 0.0, 1.0, 1e-15)
}

/// `χ₀²/4π` in closed form: `x^β (1-x)^α / B(α+1, β+1)`.
pub fn pdf_closed_form(x: f64, alpha: f64, beta: f64) -> f64 {
    let ln_b = statrs::function::gamma::ln_gamma(alpha + 1.0) + statrs::function::gamma::ln_gamma(beta + 1.0)
        - statrs::function::gamma::ln_gamma(alpha + beta + 2.0);
    (beta * x.ln() + alpha * (1.0 - x).ln() - ln_b).exp()
}

/// Charge-density matrix from the transverse integral before the
/// Talmi-Moshinsky step: Gauss-Hermite in the relative momentum, the same
/// Gauss-Legendre rule in x.
pub fn form_factor_oracle(q2: f64, s: &Setup) -> DMatrix<f64> {
    const QUARK: f64 = 2.0 / 3.0;
    const ANTIQUARK: f64 = -1.0 / 3.0;
    let b = s.params.b;
    let gh = gauss_hermite(16);
    let q = q2.sqrt();
    let rule = longitudinal_rule();
    let d = s.block.len();
    let mut out = DMatrix::zeros(d, d);
    // ∫ d²u/(2π)² φ*_{n'm'}(u + a) φ_{nm}(u - a) for a shift a along the x axis
    let overlap = |np: u32, mp: i32, n: u32, m: i32, shift: f64| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (t1, w1) in gh.iter() {
            for (t2, w2) in gh.iter() {
                let u = [b * t1, b * t2];
                let f = ho_momentum(np, mp, [u[0] + shift, u[1]], b).conj() * ho_momentum(n, m, [u[0] - shift, u[1]], b);
                acc += f * (w1 * w2 * b * b * (t1 * t1 + t2 * t2).exp());
            }
        }
        acc / (4.0 * PI * PI)
    };
    for (i, bra) in s.block.states.iter().enumerate() {
        for (j, ket) in s.block.states.iter().enumerate() {
            if bra.s1 != ket.s1 || bra.s2 != ket.s2 {
                continue;
            }
            let mut v = Complex64::new(0.0, 0.0);
            for (x, w) in rule.iter() {
                let cl = chi(x, bra.l, s.exps.alpha, s.exps.beta).unwrap() * chi(x, ket.l, s.exps.alpha, s.exps.beta).unwrap();
                let aq = ((1.0 - x) / x).sqrt() * q / 2.0;
                let aa = (x / (1.0 - x)).sqrt() * q / 2.0;
                let g = overlap(bra.n, bra.m, ket.n, ket.m, aq) * QUARK - overlap(bra.n, bra.m, ket.n, ket.m, -aa) * ANTIQUARK;
                v += g * (w * cl / (4.0 * PI));
            }
            assert!(v.im.abs() < 1e-9, "oracle entry has imaginary part {}", v.im);
            out[(i, j)] = v.re;
        }
    }
    out
}
