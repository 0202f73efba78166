//! Dense complex matrices for few-qubit systems.
//!
//! Storage is row-major. Multi-qubit operators use the tensor ordering
//! A ⊗ B ⊗ C: qubit 0 is the most significant bit of a basis index, so
//! `|abc⟩` has index `4a + 2b + c`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Input tolerance for the Hermitian eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Label of one qubit in an n-qubit register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Qubit(pub usize);

impl Qubit {
    pub const A: Qubit = Qubit(0);
    pub const B: Qubit = Qubit(1);
    pub const C: Qubit = Qubit(2);

    pub fn index(self) -> usize {
        self.0
    }

    /// Bit mask of this qubit inside an `n_qubits` basis index.
    pub fn mask(self, n_qubits: usize) -> usize {
        1 << (n_qubits - 1 - self.0)
    }
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "A"),
            1 => write!(f, "B"),
            2 => write!(f, "C"),
            k => write!(f, "q{k}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries. Rejects non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (k, &d) in diag.iter().enumerate() {
            m[(k, k)] = d;
        }
        m
    }

    /// `|ψ⟩⟨ψ|`
    pub fn outer(psi: &[C64]) -> Self {
        Self::from_fn(psi.len(), psi.len(), |r, c| psi[r] * psi[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    /// Number of qubits for a square `2^n × 2^n` matrix.
    pub fn n_qubits(&self) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::NotSquare { rows: self.rows, cols: self.cols });
        }
        if self.rows == 0 || !self.rows.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(self.rows));
        }
        Ok(self.rows.trailing_zeros() as usize)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * s).collect() }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: C64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise `|m - m†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        dev
    }

    /// `(m + m†) / 2`
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[r * other.cols..(r + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &self.matmul(other) - &other.matmul(self)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        &mut self.data[r * self.cols + c]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| a[(r / br, c / bc)] * b[(r % br, c % bc)])
}

fn check_qubits(qubits: &[Qubit], n_qubits: usize) -> Result<()> {
    match qubits.iter().find(|q| q.0 >= n_qubits) {
        Some(q) => Err(Error::QubitOutOfRange { index: q.0, n_qubits }),
        None => Ok(()),
    }
}

/// Reduced matrix over the qubits in `keep`, ordered by ascending index.
pub fn partial_trace(rho: &ComplexMatrix, keep: &[Qubit]) -> Result<ComplexMatrix> {
    let n = rho.n_qubits()?;
    if keep.is_empty() {
        return Err(Error::EmptyQubitSet);
    }
    check_qubits(keep, n)?;
    let mut kept: Vec<Qubit> = keep.to_vec();
    kept.sort();
    kept.dedup();

    let kept_masks: Vec<usize> = kept.iter().map(|q| q.mask(n)).collect();
    let traced: Vec<usize> = (0..n).map(|q| Qubit(q).mask(n)).filter(|m| !kept_masks.contains(m)).collect();
    let m = kept.len();
    let out_dim = 1 << m;

    // Scatter a reduced index into the full index; bit (m-1-k) maps to kept_masks[k].
    let scatter = |idx: usize, masks: &[usize]| -> usize {
        let len = masks.len();
        masks.iter().enumerate().filter(|(k, _)| idx & (1 << (len - 1 - k)) != 0).fold(0, |acc, (_, &mk)| acc | mk)
    };

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for r in 0..out_dim {
        let fr = scatter(r, &kept_masks);
        for c in 0..out_dim {
            let fc = scatter(c, &kept_masks);
            let mut acc = ZERO;
            for e in 0..(1usize << traced.len()) {
                let env = scatter(e, &traced);
                acc += rho[(fr | env, fc | env)];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Transposes the row/column indices of the qubits in `subsystem`.
pub fn partial_transpose(rho: &ComplexMatrix, subsystem: &[Qubit]) -> Result<ComplexMatrix> {
    let n = rho.n_qubits()?;
    check_qubits(subsystem, n)?;
    let mask = subsystem.iter().fold(0usize, |acc, q| acc | q.mask(n));
    let dim = rho.rows;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let nr = (r & !mask) | (c & mask);
            let nc = (c & !mask) | (r & mask);
            out[(nr, nc)] = rho[(r, c)];
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(jacobi(m, false)?.values)
}

pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    jacobi(m, true)
}

/// Cyclic complex Jacobi. A pair is skipped once its coupling is below
/// round-off relative to the geometric mean of the two diagonal entries,
/// which keeps small eigenvalues accurate relative to their own size.
fn jacobi(m: &ComplexMatrix, want_vectors: bool) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows, cols: m.cols });
    }
    if !m.is_finite() {
        return Err(Error::NonFinite);
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian(dev));
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = if want_vectors { ComplexMatrix::identity(n) } else { ComplexMatrix::zeros(0, 0) };

    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                if r <= f64::EPSILON * 0.5 * (app.abs() * aqq.abs()).sqrt() {
                    a[(p, q)] = ZERO;
                    a[(q, p)] = ZERO;
                    continue;
                }
                rotated = true;
                let phase = apq / r;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J restricted to (p, q): [[phase c, phase s], [-s, c]]; A <- J† A J.
                let jpp = phase * c;
                let jpq = phase * s;
                let jqp = C64::new(-s, 0.0);
                let jqq = C64::new(c, 0.0);
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    let nkp = akp * jpp + akq * jqp;
                    let nkq = akp * jpq + akq * jqq;
                    a[(k, p)] = nkp;
                    a[(k, q)] = nkq;
                    a[(p, k)] = nkp.conj();
                    a[(q, k)] = nkq.conj();
                }
                a[(p, p)] = C64::new(app - t * r, 0.0);
                a[(q, q)] = C64::new(aqq + t * r, 0.0);
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                if want_vectors {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = vkp * jpp + vkq * jqp;
                        v[(k, q)] = vkp * jpq + vkq * jqq;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = if want_vectors {
        ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])])
    } else {
        v
    };
    Ok(HermitianEigen { values, vectors })
}

/// Hermitian, trace-one, positive semi-definite matrix over `n` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates hermiticity, unit trace and positivity within `tol`.
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        m.n_qubits()?;
        if !m.is_finite() {
            return Err(Error::NonFinite);
        }
        let dev = m.hermitian_deviation();
        if dev > tol {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {dev:e})")));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let m = m.hermitian_part();
        let min = hermitian_eigenvalues(&m)?[0];
        if min < -tol {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix without checks.
    pub fn from_matrix_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// `|ψ⟩⟨ψ| / ⟨ψ|ψ⟩`
    pub fn from_pure(psi: &[C64]) -> Result<Self> {
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !psi.len().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(psi.len()));
        }
        if norm_sqr == 0.0 || !norm_sqr.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        Ok(Self(ComplexMatrix::outer(psi).scale_real(1.0 / norm_sqr)))
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1 << n_qubits;
        Self(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn n_qubits(&self) -> usize {
        self.0.rows().trailing_zeros() as usize
    }

    pub fn purity(&self) -> f64 {
        self.0.matmul(&self.0).trace().re
    }

    /// Dominant eigenvector when the state is pure within `tol`.
    pub fn pure_vector(&self, tol: f64) -> Result<Vec<C64>> {
        let eig = hermitian_eigen(&self.0)?;
        let n = self.dim();
        let top = eig.values[n - 1];
        if (top - 1.0).abs() > tol || eig.values[..n - 1].iter().any(|x| x.abs() > tol) {
            return Err(Error::InvalidState(format!("state is not pure (largest eigenvalue {top})")));
        }
        Ok((0..n).map(|r| eig.vectors[(r, n - 1)]).collect())
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    fn sz() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()
    }

    fn basis(dim: usize, k: usize) -> Vec<C64> {
        let mut v = vec![ZERO; dim];
        v[k] = ONE;
        v
    }

    fn ghz() -> ComplexMatrix {
        let mut psi = vec![ZERO; 8];
        psi[0] = C64::new(0.5f64.sqrt(), 0.0);
        psi[7] = psi[0];
        ComplexMatrix::outer(&psi)
    }

    #[test]
    fn kron_identity_and_pauli() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
        let zi = kron(&sz(), &i2);
        assert_eq!(zi[(0, 0)], ONE);
        assert_eq!(zi[(2, 2)], -ONE);
        let xx = kron(&sx(), &sx());
        assert_eq!(xx.apply(&basis(4, 0)), basis(4, 3));
    }

    #[test]
    fn partial_trace_examples() {
        let p000 = ComplexMatrix::outer(&basis(8, 0));
        let r = partial_trace(&p000, &[Qubit::A, Qubit::B]).unwrap();
        assert_eq!(r, ComplexMatrix::outer(&basis(4, 0)));

        let r = partial_trace(&ghz(), &[Qubit::A, Qubit::B]).unwrap();
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(0, 0)] = C64::new(0.5, 0.0);
        expected[(3, 3)] = C64::new(0.5, 0.0);
        assert!(r.max_abs_diff(&expected) < 1e-15);

        let full = partial_trace(&ghz(), &[Qubit::C, Qubit::A, Qubit::B]).unwrap();
        assert_eq!(full, ghz());
    }

    #[test]
    fn partial_trace_keeps_ascending_order() {
        // |01⟩ on (A, C) with B in |0⟩: keeping {C, A} still orders A then C.
        let p = ComplexMatrix::outer(&basis(8, 0b001));
        let r = partial_trace(&p, &[Qubit::C, Qubit::A]).unwrap();
        assert_eq!(r, ComplexMatrix::outer(&basis(4, 0b01)));
    }

    #[test]
    fn partial_trace_errors() {
        let m = ComplexMatrix::identity(6);
        assert!(matches!(partial_trace(&m, &[Qubit::A]), Err(Error::NotPowerOfTwo(6))));
        assert!(matches!(partial_trace(&ghz(), &[]), Err(Error::EmptyQubitSet)));
        assert!(matches!(partial_trace(&ghz(), &[Qubit(3)]), Err(Error::QubitOutOfRange { .. })));
    }

    #[test]
    fn partial_transpose_examples() {
        let p000 = ComplexMatrix::outer(&basis(8, 0));
        assert_eq!(partial_transpose(&p000, &[Qubit::A]).unwrap(), p000);

        let g = ghz();
        let once = partial_transpose(&g, &[Qubit::B]).unwrap();
        assert_eq!(partial_transpose(&once, &[Qubit::B]).unwrap(), g);

        let pt = partial_transpose(&g, &[Qubit::A]).unwrap();
        let ev = hermitian_eigenvalues(&pt).unwrap();
        assert!((ev[0] + 0.5).abs() < 1e-14);
        assert!(matches!(partial_transpose(&ComplexMatrix::identity(3), &[Qubit::A]), Err(Error::NotPowerOfTwo(3))));
    }

    #[test]
    fn eigenvalues_simple() {
        let ev = hermitian_eigenvalues(&ComplexMatrix::identity(8)).unwrap();
        assert_eq!(ev, vec![1.0; 8]);
        let ev = hermitian_eigenvalues(&sx()).unwrap();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    /// Characteristic polynomial by Faddeev-LeVerrier; coefficients c[k] of
    /// λ^(n-k), with c[0] = 1.
    fn char_poly(m: &ComplexMatrix) -> Vec<C64> {
        let n = m.rows();
        let mut c = vec![ONE];
        let mut mk = ComplexMatrix::zeros(n, n);
        for k in 1..=n {
            let mut prev = mk.clone();
            prev.add_scaled(c[k - 1], &ComplexMatrix::identity(n));
            mk = m.matmul(&prev);
            c.push(-mk.trace() / k as f64);
        }
        c
    }

    fn poly_from_roots(roots: &[f64]) -> Vec<C64> {
        let mut p = vec![ONE];
        for &r in roots {
            let mut next = vec![ZERO; p.len() + 1];
            for (k, &a) in p.iter().enumerate() {
                next[k] += a;
                next[k + 1] -= a * r;
            }
            p = next;
        }
        p
    }

    #[test]
    fn ghz_partial_transpose_spectrum_matches_characteristic_polynomial() {
        let pt = partial_transpose(&ghz(), &[Qubit::A]).unwrap();
        let expected = [-0.5, 0.0, 0.0, 0.0, 0.0, 0.5, 0.5, 0.5];
        // Oracle: the characteristic polynomial of the matrix equals the
        // polynomial with the claimed roots.
        let cp = char_poly(&pt);
        let rp = poly_from_roots(&expected);
        for (a, b) in cp.iter().zip(&rp) {
            assert!((a - b).norm() < 1e-14, "{a} vs {b}");
        }
        let ev = hermitian_eigenvalues(&pt).unwrap();
        for (a, b) in ev.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn eigen_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eigen_keeps_tiny_eigenvalues_relative() {
        let c = 2.3e-16;
        let mut m = ComplexMatrix::zeros(8, 8);
        m[(0, 0)] = C64::new(0.5, 0.0);
        m[(7, 7)] = C64::new(0.5, 0.0);
        m[(3, 4)] = C64::new(0.0, c);
        m[(4, 3)] = C64::new(0.0, -c);
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!(((ev[0] + c) / c).abs() < 1e-14);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(ghz(), 1e-10).is_ok());
        assert!(DensityMatrix::new(ComplexMatrix::identity(8), 1e-10).is_err());
        let mut bad = ComplexMatrix::identity(2).scale_real(0.5);
        bad[(0, 0)] = C64::new(1.5, 0.0);
        bad[(1, 1)] = C64::new(-0.5, 0.0);
        assert!(DensityMatrix::new(bad, 1e-10).is_err());
        assert!(DensityMatrix::from_pure(&[ZERO; 4]).is_err());
        let pure = DensityMatrix::from_pure(&basis(4, 2)).unwrap();
        let v = pure.pure_vector(1e-10).unwrap();
        assert!((v[2].norm() - 1.0).abs() < 1e-14);
        assert!(DensityMatrix::maximally_mixed(2).pure_vector(1e-10).is_err());
    }
}
