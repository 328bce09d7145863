//! Pauli strings and sums, and the fermion-to-qubit encodings.
//!
//! Qubit 0 is the rightmost tensor factor and the least significant bit of a
//! computational-basis index. Labels are written with the highest qubit first,
//! so `"ZX"` is `Z` on qubit 1 and `X` on qubit 0.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{HermitianObservable, Units};

pub const MAX_QUBITS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// The operator part of a Pauli string, stored as symplectic bitmasks.
/// Bit `q` of `x` (`z`) is set when qubit `q` carries an X or Y (Z or Y).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliAxes {
    pub n_qubits: usize,
    pub x: u64,
    pub z: u64,
}

impl PauliAxes {
    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, x: 0, z: 0 }
    }

    /// Builds axes from `(qubit, pauli)` pairs.
    pub fn from_sparse(n_qubits: usize, ops: &[(usize, Pauli)]) -> Result<Self> {
        check_width(n_qubits)?;
        let mut a = Self::identity(n_qubits);
        let mut seen = 0u64;
        for &(q, p) in ops {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
            if seen & (1 << q) != 0 {
                return Err(Error::RepeatedQubit(q));
            }
            seen |= 1 << q;
            a.set(q, p);
        }
        Ok(a)
    }

    pub fn from_label(label: &str) -> Result<Self> {
        let chars: Vec<char> = label.chars().collect();
        let n = chars.len();
        if n == 0 || check_width(n).is_err() {
            return Err(Error::InvalidPauliLabel(label.to_string()));
        }
        let mut a = Self::identity(n);
        for (pos, c) in chars.iter().enumerate() {
            let p = match c.to_ascii_uppercase() {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                _ => return Err(Error::InvalidPauliLabel(label.to_string())),
            };
            a.set(n - 1 - pos, p);
        }
        Ok(a)
    }

    pub fn label(&self) -> String {
        (0..self.n_qubits).rev().map(|q| self.get(q).as_char()).collect()
    }

    pub fn get(&self, q: usize) -> Pauli {
        Pauli::from_bits(self.x >> q & 1 == 1, self.z >> q & 1 == 1)
    }

    fn set(&mut self, q: usize, p: Pauli) {
        let (x, z) = p.bits();
        let mask = 1u64 << q;
        self.x = if x { self.x | mask } else { self.x & !mask };
        self.z = if z { self.z | mask } else { self.z & !mask };
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Qubits acted on non-trivially.
    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> u32 {
        self.support().count_ones()
    }

    pub fn num_y(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// `P|b⟩ = phase · |b ⊕ x⟩`.
    pub fn apply_to_basis(&self, b: u64) -> (u64, Complex64) {
        let mut phase = i_pow(self.num_y());
        if (b & self.z).count_ones() % 2 == 1 {
            phase = -phase;
        }
        (b ^ self.x, phase)
    }

    /// Product `self · other = phase · result`.
    pub fn multiply(&self, other: &PauliAxes) -> (Complex64, PauliAxes) {
        // Write P = i^{y} X^x Z^z; Z^z1 X^x2 = (-1)^{|z1 & x2|} X^x2 Z^z1.
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let sign = (self.z & other.x).count_ones();
        let k = self.num_y() + other.num_y() + 2 * sign;
        let out = PauliAxes {
            n_qubits: self.n_qubits,
            x,
            z,
        };
        // divide by i^{#Y of the result}
        let ky = out.num_y();
        let total = (k + 4 * ky - ky) % 4;
        (i_pow(total), out)
    }

    pub fn commutes_with(&self, other: &PauliAxes) -> bool {
        ((self.x & other.z).count_ones() + (self.z & other.x).count_ones()) % 2 == 0
    }

    /// Dense matrix of the string.
    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim as u64 {
            let (out, ph) = self.apply_to_basis(b);
            m[(out as usize, b as usize)] = ph;
        }
        m
    }

    /// Conjugation by CNOT(control, target): returns `sign, C P C`.
    pub fn conjugate_cnot(&self, control: usize, target: usize) -> (f64, PauliAxes) {
        let xc = self.x >> control & 1;
        let zc = self.z >> control & 1;
        let xt = self.x >> target & 1;
        let zt = self.z >> target & 1;
        let flip = xc & zt & (xt ^ zc ^ 1);
        let mut out = *self;
        out.x ^= xc << target;
        out.z ^= zt << control;
        (if flip == 1 { -1.0 } else { 1.0 }, out)
    }
}

impl fmt::Display for PauliAxes {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PauliAxes {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_label(s)
    }
}

fn i_pow(k: u32) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn check_width(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::QubitOutOfRange {
            index: n_qubits,
            n_qubits: MAX_QUBITS,
        });
    }
    Ok(())
}

/// A weighted Pauli string.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliString {
    pub axes: PauliAxes,
    pub coefficient: f64,
}

impl PauliString {
    pub fn new(axes: PauliAxes, coefficient: f64) -> Self {
        Self { axes, coefficient }
    }

    pub fn label(&self) -> String {
        self.axes.label()
    }
}

/// Real linear combination of Pauli strings on a fixed register. Terms keep
/// first-insertion order; repeated strings are merged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliSum {
    pub n_qubits: usize,
    pub terms: Vec<PauliString>,
    pub units: Units,
}

impl PauliSum {
    pub fn new(n_qubits: usize, units: Units) -> Self {
        Self {
            n_qubits,
            terms: Vec::new(),
            units,
        }
    }

    pub fn from_labels(terms: &[(&str, f64)], units: Units) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::InvalidPauliLabel(String::new()))?;
        let n = first.0.chars().count();
        let mut sum = Self::new(n, units);
        for &(label, c) in terms {
            let axes = PauliAxes::from_label(label)?;
            sum.add(axes, c)?;
        }
        Ok(sum)
    }

    pub fn add(&mut self, axes: PauliAxes, coefficient: f64) -> Result<()> {
        if axes.n_qubits != self.n_qubits {
            return Err(Error::EncodingMismatch {
                expected: self.n_qubits,
                found: axes.n_qubits,
            });
        }
        match self.terms.iter_mut().find(|t| t.axes == axes) {
            Some(t) => t.coefficient += coefficient,
            None => self.terms.push(PauliString::new(axes, coefficient)),
        }
        Ok(())
    }

    pub fn add_sum(&mut self, other: &PauliSum, scale: f64) -> Result<()> {
        for t in &other.terms {
            self.add(t.axes, scale * t.coefficient)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PauliString> {
        self.terms.iter()
    }

    /// Coefficient of a label, zero when absent.
    pub fn coefficient(&self, label: &str) -> f64 {
        PauliAxes::from_label(label)
            .ok()
            .and_then(|a| self.terms.iter().find(|t| t.axes == a))
            .map_or(0.0, |t| t.coefficient)
    }

    /// Drops terms with `|c| <= threshold`.
    pub fn pruned(mut self, threshold: f64) -> Self {
        self.terms.retain(|t| t.coefficient.abs() > threshold);
        self
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).fold(0.0, f64::max)
    }

    pub fn labeled_terms(&self) -> Vec<(String, f64)> {
        self.terms.iter().map(|t| (t.label(), t.coefficient)).collect()
    }

    pub fn to_complex_matrix(&self) -> DMatrix<Complex64> {
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            for b in 0..dim as u64 {
                let (out, ph) = t.axes.apply_to_basis(b);
                m[(out as usize, b as usize)] += ph * t.coefficient;
            }
        }
        m
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}*{}", t.coefficient, t.label())?;
        }
        Ok(())
    }
}

/// All `4^n` strings on `n` qubits, in lexicographic `I < X < Y < Z` label order.
pub fn all_axes(n_qubits: usize) -> Vec<PauliAxes> {
    const ORDER: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let total = 1usize << (2 * n_qubits);
    (0..total)
        .map(|mut k| {
            let mut a = PauliAxes::identity(n_qubits);
            for q in 0..n_qubits {
                a.set(q, ORDER[k & 3]);
                k >>= 2;
            }
            a
        })
        .collect()
}

/// `c_α = tr(M P_α) / 2ⁿ`; coefficients with `|c| <= 1e-9·max|M|` are dropped.
pub fn pauli_decompose(m: &HermitianObservable, n_qubits: usize) -> Result<PauliSum> {
    check_width(n_qubits)?;
    let dim = 1usize << n_qubits;
    if m.dimension() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: m.dimension(),
        });
    }
    let threshold = 1e-9 * m.entries.amax();
    let mut sum = PauliSum::new(n_qubits, m.units);
    for axes in all_axes(n_qubits) {
        // Odd Y count makes the string imaginary-antisymmetric: tr(MP) = 0.
        if axes.num_y() % 2 == 1 {
            continue;
        }
        let mut tr = Complex64::new(0.0, 0.0);
        for b in 0..dim as u64 {
            let (out, ph) = axes.apply_to_basis(b);
            tr += ph * m.entries[(b as usize, out as usize)];
        }
        let c = tr.re / dim as f64;
        if c.abs() > threshold {
            sum.terms.push(PauliString::new(axes, c));
        }
    }
    Ok(sum)
}

/// Dense matrix of a sum; fails if the result is not real.
pub fn pauli_sum_to_matrix(s: &PauliSum) -> Result<HermitianObservable> {
    let cm = s.to_complex_matrix();
    let imag = cm.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let scale = cm.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
    if imag > 1e-12 * scale {
        return Err(Error::NotReal(imag));
    }
    HermitianObservable::new(cm.map(|c| c.re), s.units)
}

fn check_modes(i: usize, j: usize, n: usize) -> Result<()> {
    if i >= j || j >= n || check_width(n).is_err() {
        return Err(Error::InvalidModes { i, j, n_modes: n });
    }
    Ok(())
}

fn z_chain(i: usize, j: usize) -> u64 {
    // qubits strictly between i and j
    ((1u64 << j) - 1) & !((1u64 << (i + 1)) - 1)
}

/// Jordan-Wigner images of a mode pair `i < j` (0-based modes = qubits).
#[derive(Debug, Clone, PartialEq)]
pub struct JwHopping {
    /// `G` with `a†_j a_i − a†_i a_j = i·G`, i.e. `½(Y_i Z…Z X_j − X_i Z…Z Y_j)`.
    pub generator: PauliSum,
    /// `a†_i a_j + a†_j a_i = ½(X_i Z…Z X_j + Y_i Z…Z Y_j)`.
    pub hermitian: PauliSum,
}

pub fn jw_hopping_pauli(i: usize, j: usize, n_qubits: usize) -> Result<JwHopping> {
    check_modes(i, j, n_qubits)?;
    let chain = z_chain(i, j);
    let mk = |pi: Pauli, pj: Pauli| {
        let mut a = PauliAxes::identity(n_qubits);
        a.z = chain;
        a.set(i, pi);
        a.set(j, pj);
        a
    };
    let mut generator = PauliSum::new(n_qubits, Units::Dimensionless);
    generator.add(mk(Pauli::Y, Pauli::X), 0.5)?;
    generator.add(mk(Pauli::X, Pauli::Y), -0.5)?;
    let mut hermitian = PauliSum::new(n_qubits, Units::Dimensionless);
    hermitian.add(mk(Pauli::X, Pauli::X), 0.5)?;
    hermitian.add(mk(Pauli::Y, Pauli::Y), 0.5)?;
    Ok(JwHopping { generator, hermitian })
}

/// `a†_i a_i = (I − Z_i)/2`.
pub fn number_operator(i: usize, n_qubits: usize) -> Result<PauliSum> {
    if i >= n_qubits {
        return Err(Error::QubitOutOfRange { index: i, n_qubits });
    }
    let mut s = PauliSum::new(n_qubits, Units::Dimensionless);
    s.add(PauliAxes::identity(n_qubits), 0.5)?;
    s.add(PauliAxes::from_sparse(n_qubits, &[(i, Pauli::Z)])?, -0.5)?;
    Ok(s)
}

/// One-body operator `Σ_ij h_ij a†_i a_j` under Jordan-Wigner, one qubit per
/// basis state.
pub fn embed_direct(h: &HermitianObservable) -> Result<PauliSum> {
    let n = h.dimension();
    check_width(n)?;
    let mut s = PauliSum::new(n, h.units);
    for i in 0..n {
        s.add_sum(&number_operator(i, n)?, h.entries[(i, i)])?;
    }
    for i in 0..n {
        for j in i + 1..n {
            let hij = h.entries[(i, j)];
            if hij != 0.0 {
                s.add_sum(&jw_hopping_pauli(i, j, n)?.hermitian, hij)?;
            }
        }
    }
    let threshold = 1e-9 * h.entries.amax();
    Ok(s.pruned(threshold))
}

/// Number of qubits for the binary (compact) encoding of `n` states.
pub fn compact_qubits(n: usize) -> usize {
    n.max(2).next_power_of_two().trailing_zeros() as usize
}

/// Binary encoding: the basis index is stored in `⌈log₂N⌉` qubits. Padding
/// states receive a diagonal penalty well above the spectrum.
pub fn embed_compact(h: &HermitianObservable) -> Result<PauliSum> {
    let n = h.dimension();
    let nq = compact_qubits(n);
    let dim = 1usize << nq;
    if dim == n {
        return pauli_decompose(h, nq);
    }
    let bound = (0..n)
        .map(|i| h.entries.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let penalty = 10.0 * bound.max(1.0);
    let mut padded = DMatrix::<f64>::zeros(dim, dim);
    padded.view_mut((0, 0), (n, n)).copy_from(&h.entries);
    for k in n..dim {
        padded[(k, k)] = penalty;
    }
    pauli_decompose(&HermitianObservable::new(padded, h.units)?, nq)
}

/// Lower-triangular GF(2) matrix mapping JW occupations `f` to BK bits `b = 𝒫f`.
/// Row `i` is stored as a bitmask over columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncoderMatrix {
    pub size: usize,
    pub rows: Vec<u64>,
}

impl EncoderMatrix {
    pub fn identity(size: usize) -> Self {
        Self {
            size,
            rows: (0..size).map(|i| 1u64 << i).collect(),
        }
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn apply(&self, f: u64) -> u64 {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, r)| acc | (((r & f).count_ones() as u64 & 1) << i))
    }

    pub fn multiply(&self, other: &EncoderMatrix) -> EncoderMatrix {
        let rows = self
            .rows
            .iter()
            .map(|&r| {
                (0..self.size)
                    .filter(|&k| r >> k & 1 == 1)
                    .fold(0u64, |acc, k| acc ^ other.rows[k])
            })
            .collect();
        EncoderMatrix { size: self.size, rows }
    }

    pub fn is_unit_lower_triangular(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, &r)| r >> i & 1 == 1 && r >> (i + 1) == 0)
    }

    /// Inverse over GF(2), by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<EncoderMatrix> {
        let n = self.size;
        let mut a = self.rows.clone();
        let mut inv = EncoderMatrix::identity(n).rows;
        for col in 0..n {
            let pivot = (col..n).find(|&r| a[r] >> col & 1 == 1).ok_or(Error::Numerical(
                "encoder matrix is singular over GF(2)".into(),
            ))?;
            a.swap(col, pivot);
            inv.swap(col, pivot);
            for r in 0..n {
                if r != col && a[r] >> col & 1 == 1 {
                    a[r] ^= a[col];
                    inv[r] ^= inv[col];
                }
            }
        }
        Ok(EncoderMatrix { size: n, rows: inv })
    }

    /// CNOT network `(control, target)` realizing `|f⟩ → |𝒫f⟩`, generated from
    /// the bottom row upwards.
    pub fn cnot_network(&self) -> Vec<(usize, usize)> {
        let mut gates = Vec::new();
        for i in (0..self.size).rev() {
            for j in 0..i {
                if self.entry(i, j) {
                    gates.push((j, i));
                }
            }
        }
        gates
    }

    pub fn pretty_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|&r| (0..self.size).map(|j| if r >> j & 1 == 1 { '1' } else { '0' }).collect())
            .collect()
    }
}

/// Bravyi-Kitaev encoder for `N = 2^k` modes.
pub fn bk_encoder(n: usize) -> Result<EncoderMatrix> {
    if n == 0 || !n.is_power_of_two() || n > MAX_QUBITS {
        return Err(Error::UnsupportedEncoderSize(n));
    }
    let mut p = EncoderMatrix::identity(1);
    while p.size < n {
        let h = p.size;
        let mut rows = p.rows.clone();
        for (k, &r) in p.rows.iter().enumerate() {
            let mut row = r << h;
            if k == h - 1 {
                row |= (1u64 << h) - 1;
            }
            rows.push(row);
        }
        p = EncoderMatrix { size: 2 * h, rows };
    }
    Ok(p)
}

/// Conjugates every string of a JW sum by the BK CNOT network.
pub fn jw_to_bk_pauli(s: &PauliSum) -> Result<PauliSum> {
    let encoder = bk_encoder(s.n_qubits)?;
    let gates = encoder.cnot_network();
    let mut out = PauliSum::new(s.n_qubits, s.units);
    for t in &s.terms {
        let mut axes = t.axes;
        let mut sign = 1.0;
        for &(c, tg) in &gates {
            let (sg, a) = axes.conjugate_cnot(c, tg);
            sign *= sg;
            axes = a;
        }
        out.add(axes, sign * t.coefficient)?;
    }
    Ok(out)
}

/// Fermion-to-qubit encoding of a block Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Direct,
    Compact,
    Bk,
}

impl Encoding {
    pub const ALL: [Encoding; 3] = [Encoding::Direct, Encoding::Compact, Encoding::Bk];

    pub fn n_qubits(self, n_states: usize) -> usize {
        match self {
            Encoding::Direct | Encoding::Bk => n_states,
            Encoding::Compact => compact_qubits(n_states),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Encoding::Direct => "direct",
            Encoding::Compact => "compact",
            Encoding::Bk => "bk",
        }
    }

    pub fn encode(self, h: &HermitianObservable) -> Result<PauliSum> {
        match self {
            Encoding::Direct => embed_direct(h),
            Encoding::Compact => embed_compact(h),
            Encoding::Bk => jw_to_bk_pauli(&embed_direct(h)?),
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Encoding {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "direct" | "jw" => Ok(Encoding::Direct),
            "compact" => Ok(Encoding::Compact),
            "bk" | "bravyi-kitaev" => Ok(Encoding::Bk),
            _ => Err(Error::InvalidParameter(format!("unknown encoding {s:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn labels_round_trip() {
        let a = PauliAxes::from_label("ZXIY").unwrap();
        assert_eq!(a.get(3), Pauli::Z);
        assert_eq!(a.get(0), Pauli::Y);
        assert_eq!(a.label(), "ZXIY");
        assert!(PauliAxes::from_label("ZQ").is_err());
        assert!(PauliAxes::from_label("").is_err());
    }

    #[test]
    fn single_qubit_matrices() {
        let y = PauliAxes::from_label("Y").unwrap().to_matrix();
        assert_eq!(y[(1, 0)], c(0.0, 1.0));
        assert_eq!(y[(0, 1)], c(0.0, -1.0));
        let zx = PauliAxes::from_label("ZX").unwrap().to_matrix();
        // Z on qubit 1 (high bit), X on qubit 0
        assert_eq!(zx[(1, 0)], c(1.0, 0.0));
        assert_eq!(zx[(3, 2)], c(-1.0, 0.0));
    }

    #[test]
    fn products_match_matrices() {
        let labels = ["XY", "YZ", "ZZ", "IX", "YY", "XI"];
        for a in labels {
            for b in labels {
                let pa = PauliAxes::from_label(a).unwrap();
                let pb = PauliAxes::from_label(b).unwrap();
                let (ph, pc) = pa.multiply(&pb);
                let want = pa.to_matrix() * pb.to_matrix();
                let got = pc.to_matrix() * ph;
                assert!((want - got).norm() < 1e-12, "{a}*{b}");
                let commute = (pa.to_matrix() * pb.to_matrix() - pb.to_matrix() * pa.to_matrix()).norm() < 1e-12;
                assert_eq!(commute, pa.commutes_with(&pb));
            }
        }
    }

    #[test]
    fn decompose_identity_and_zz() {
        let id = HermitianObservable::diagonal(&[1.0, 1.0], Units::Dimensionless);
        let s = pauli_decompose(&id, 1).unwrap();
        assert_eq!(s.labeled_terms(), vec![("I".to_string(), 1.0)]);
        let zz = PauliSum::from_labels(&[("ZZ", 1.0)], Units::Dimensionless).unwrap();
        let m = pauli_sum_to_matrix(&zz).unwrap();
        assert_eq!(m.entries.diagonal().as_slice(), &[1.0, -1.0, -1.0, 1.0]);
        assert!(pauli_decompose(&m, 3).is_err());
    }

    #[test]
    fn ordering_matters() {
        let a = pauli_sum_to_matrix(&PauliSum::from_labels(&[("XZ", 1.0)], Units::Dimensionless).unwrap()).unwrap();
        let b = pauli_sum_to_matrix(&PauliSum::from_labels(&[("ZX", 1.0)], Units::Dimensionless).unwrap()).unwrap();
        assert_ne!(a.entries, b.entries);
    }

    #[test]
    fn imaginary_sum_is_rejected() {
        let s = PauliSum::from_labels(&[("XY", 1.0)], Units::Dimensionless).unwrap();
        assert!(matches!(pauli_sum_to_matrix(&s), Err(Error::NotReal(_))));
    }

    #[test]
    fn hopping_strings() {
        let h = jw_hopping_pauli(0, 1, 4).unwrap();
        assert_relative_eq!(h.generator.coefficient("IIXY"), 0.5);
        assert_relative_eq!(h.generator.coefficient("IIYX"), -0.5);
        let far = jw_hopping_pauli(0, 3, 4).unwrap();
        assert_relative_eq!(far.hermitian.coefficient("XZZX"), 0.5);
        assert_relative_eq!(far.hermitian.coefficient("YZZY"), 0.5);
        assert!(jw_hopping_pauli(2, 1, 4).is_err());
        assert!(jw_hopping_pauli(1, 4, 4).is_err());
    }

    #[test]
    fn number_operator_counts_occupation() {
        let n0 = number_operator(0, 4).unwrap();
        let m = n0.to_complex_matrix();
        assert_eq!(m[(0b0001, 0b0001)], c(1.0, 0.0));
        assert_eq!(m[(0b0010, 0b0010)], c(0.0, 0.0));
    }

    #[test]
    fn jw_generator_is_fermionic() {
        // a_k = Z…Z (X + iY)/2 on qubit k; check a†_j a_i − a†_i a_j = iG.
        let n = 3;
        let lower = |k: usize| {
            let mut m = DMatrix::<Complex64>::identity(1 << n, 1 << n);
            for q in 0..k {
                m = PauliAxes::from_sparse(n, &[(q, Pauli::Z)]).unwrap().to_matrix() * m;
            }
            let x = PauliAxes::from_sparse(n, &[(k, Pauli::X)]).unwrap().to_matrix();
            let y = PauliAxes::from_sparse(n, &[(k, Pauli::Y)]).unwrap().to_matrix();
            m * (x + y * c(0.0, 1.0)) * c(0.5, 0.0)
        };
        let (i, j) = (0, 2);
        let ai = lower(i);
        let aj = lower(j);
        let lhs = aj.adjoint() * &ai - ai.adjoint() * &aj;
        let g = jw_hopping_pauli(i, j, n).unwrap().generator.to_complex_matrix();
        assert!((lhs - g * c(0.0, 1.0)).norm() < 1e-12);
        let herm = ai.adjoint() * &aj + aj.adjoint() * &ai;
        let hm = jw_hopping_pauli(i, j, n).unwrap().hermitian.to_complex_matrix();
        assert!((herm - hm).norm() < 1e-12);
    }

    #[test]
    fn diagonal_embedding() {
        let d = HermitianObservable::diagonal(&[1.0, 2.0, 3.0, 4.0], Units::MeV2);
        let s = embed_direct(&d).unwrap();
        assert_relative_eq!(s.coefficient("IIII"), 5.0);
        assert_relative_eq!(s.coefficient("IIIZ"), -0.5);
        assert_relative_eq!(s.coefficient("ZIII"), -2.0);
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn bk_encoder_four() {
        let p = bk_encoder(4).unwrap();
        assert_eq!(p.pretty_rows(), vec!["1000", "1100", "0010", "1111"]);
        assert!(p.is_unit_lower_triangular());
        assert_eq!(p.multiply(&p.inverse().unwrap()), EncoderMatrix::identity(4));
        assert_eq!(p.cnot_network(), vec![(0, 3), (1, 3), (2, 3), (0, 1)]);
        assert!(matches!(bk_encoder(3), Err(Error::UnsupportedEncoderSize(3))));
        let p8 = bk_encoder(8).unwrap();
        assert!(p8.is_unit_lower_triangular());
        assert_eq!(p8.rows[7], 0xff);
        assert_eq!(p8.rows[5], 0b0011_0000);
    }

    #[test]
    fn cnot_conjugation_matches_matrices() {
        let cnot = |ctl: usize, tgt: usize, n: usize| {
            let dim = 1 << n;
            let mut m = DMatrix::<Complex64>::zeros(dim, dim);
            for b in 0..dim {
                let out = if b >> ctl & 1 == 1 { b ^ (1 << tgt) } else { b };
                m[(out, b)] = c(1.0, 0.0);
            }
            m
        };
        for axes in all_axes(2) {
            for (ctl, tgt) in [(0, 1), (1, 0)] {
                let u = cnot(ctl, tgt, 2);
                let want = &u * axes.to_matrix() * &u;
                let (sign, out) = axes.conjugate_cnot(ctl, tgt);
                let got = out.to_matrix() * c(sign, 0.0);
                assert!((want - got).norm() < 1e-12, "{} {ctl}->{tgt}", axes.label());
            }
        }
    }

    #[test]
    fn compact_qubit_counts() {
        assert_eq!(compact_qubits(4), 2);
        assert_eq!(compact_qubits(5), 3);
        assert_eq!(compact_qubits(2), 1);
        assert_eq!(compact_qubits(1), 1);
    }

    #[test]
    fn compact_padding_keeps_low_spectrum() {
        let h = HermitianObservable::from_rows(
            &[vec![1.0, 0.5, 0.0], vec![0.5, 2.0, 0.1], vec![0.0, 0.1, 3.0]],
            Units::Dimensionless,
        )
        .unwrap();
        let s = embed_compact(&h).unwrap();
        assert_eq!(s.n_qubits, 2);
        let m = pauli_sum_to_matrix(&s).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(m.entries[(i, j)], h.entries[(i, j)], epsilon = 1e-12);
            }
        }
        assert!(m.entries[(3, 3)] > 30.0);
    }

    #[test]
    fn encoding_parse() {
        assert_eq!("compact".parse::<Encoding>().unwrap(), Encoding::Compact);
        assert_eq!("BK".parse::<Encoding>().unwrap(), Encoding::Bk);
        assert!("unary".parse::<Encoding>().is_err());
        assert_eq!(Encoding::Compact.n_qubits(4), 2);
    }
}
