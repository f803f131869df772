//! Dense complex linear algebra on bipartite spaces.
//!
//! All operators act on `C^m ⊗ C^n` with the index layout `i·n + j ↔ |i⟩⊗|j⟩`.
//! Partial transposition and partial conjugation act on the first factor,
//! which by construction of [`BipartiteDims`] is the lower-dimensional one.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CVec = DVector<Complex64>;
pub type CMat = DMatrix<Complex64>;

/// Hermiticity tolerance on `max |X − X†|`.
pub const EPS_HERM: f64 = 1e-10;
/// Generic numerical tolerance for reconstruction and norm checks.
pub const EPS_NUM: f64 = 1e-10;
/// Default relative threshold on singular values for rank and kernel decisions.
pub const RANK_TOL: f64 = 1e-8;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Local dimensions of `H_{m,n}`, normalized so that `m ≤ n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BipartiteDims {
    m: usize,
    n: usize,
    swapped: bool,
}

impl BipartiteDims {
    /// Builds dims from the caller's `(first, second)` order. When
    /// `first > second` the factors are exchanged and `swapped()` reports it.
    pub fn new(first: usize, second: usize) -> Result<Self> {
        if first < 2 || second < 2 {
            return Err(Error::InvalidDims(first, second));
        }
        if first <= second {
            Ok(Self { m: first, n: second, swapped: false })
        } else {
            Ok(Self { m: second, n: first, swapped: true })
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> usize {
        self.m * self.n
    }

    /// Whether the caller supplied the factors in `(n, m)` order.
    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// Same dims with the swap flag cleared.
    pub fn canonical(&self) -> Self {
        Self { swapped: false, ..*self }
    }

    pub(crate) fn check_vector(&self, v: &CVec) -> Result<()> {
        if v.len() != self.total() {
            return Err(Error::DimensionMismatch { expected: self.total(), actual: v.len() });
        }
        Ok(())
    }

    pub(crate) fn check_square(&self, x: &CMat) -> Result<()> {
        let d = self.total();
        if x.nrows() != d || x.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: if x.nrows() != d { x.nrows() } else { x.ncols() },
            });
        }
        Ok(())
    }
}

/// A pair `(e, f)` of local vectors; the embedded vector is `e ⊗ f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector {
    pub e: CVec,
    pub f: CVec,
}

impl ProductVector {
    pub fn new(e: CVec, f: CVec) -> Self {
        Self { e, f }
    }

    /// Rescales so that the first nonzero entry of `e` is 1 and `f` has unit
    /// norm with a real positive leading entry. Both factors must be nonzero.
    pub fn canonical(&self) -> Self {
        let e_lead = leading_entry(&self.e);
        let f_norm = self.f.norm();
        let mut e = self.e.clone();
        let mut f = self.f.clone();
        if e_lead != ZERO {
            e /= e_lead;
            f *= e_lead;
        }
        if f_norm > 0.0 {
            let f_lead = leading_entry(&f);
            let phase = if f_lead == ZERO { ONE } else { f_lead / f_lead.norm() };
            // e ⊗ f is only defined up to the scale moved between factors,
            // so the phase and norm of f are fixed here.
            f /= phase * Complex64::from(f.norm());
        }
        Self { e, f }
    }

    /// Index of the affine chart of `e`: position of its first nonzero entry.
    pub fn chart(&self) -> usize {
        leading_index(&self.e).unwrap_or(0)
    }

    pub fn embed(&self) -> CVec {
        tensor(&self.e, &self.f)
    }

    /// `(e*, f)`.
    pub fn partial_conjugate(&self) -> Self {
        partial_conjugate(self)
    }

    pub fn dims_match(&self, dims: &BipartiteDims) -> bool {
        self.e.len() == dims.m() && self.f.len() == dims.n()
    }
}

fn leading_index(v: &CVec) -> Option<usize> {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    v.iter().position(|z| z.norm() > 1e-12 * scale)
}

fn leading_entry(v: &CVec) -> Complex64 {
    leading_index(v).map(|i| v[i]).unwrap_or(ZERO)
}

/// Kronecker product `e ⊗ f`.
pub fn tensor(e: &CVec, f: &CVec) -> CVec {
    let n = f.len();
    CVec::from_fn(e.len() * n, |k, _| e[k / n] * f[k % n])
}

/// Transposition on the first factor:
/// `(X^Γ)_{(i,j),(k,l)} = X_{(k,j),(i,l)}`.
pub fn partial_transpose(x: &CMat, dims: &BipartiteDims) -> Result<CMat> {
    dims.check_square(x)?;
    let n = dims.n();
    let d = dims.total();
    Ok(CMat::from_fn(d, d, |r, c| {
        let (i, j) = (r / n, r % n);
        let (k, l) = (c / n, c % n);
        x[(k * n + j, i * n + l)]
    }))
}

pub fn partial_conjugate(pv: &ProductVector) -> ProductVector {
    ProductVector { e: pv.e.conjugate(), f: pv.f.clone() }
}

/// Reorders a vector given in `(n, m)` layout into `(m, n)` layout.
pub fn swap_vector(v: &CVec, first: usize, second: usize) -> CVec {
    CVec::from_fn(first * second, |k, _| {
        // target index k = j·first + i  ↔ source index i·second + j
        let (j, i) = (k / first, k % first);
        v[i * second + j]
    })
}

/// Conjugates an operator by the swap of the two factors.
pub fn swap_operator(x: &CMat, first: usize, second: usize) -> CMat {
    let d = first * second;
    let src = |k: usize| {
        let (j, i) = (k / first, k % first);
        i * second + j
    };
    CMat::from_fn(d, d, |r, c| x[(src(r), src(c))])
}

/// Schmidt decomposition `ψ = Σ √μᵢ |leftᵢ⟩|rightᵢ⟩`.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// √μᵢ in nonincreasing order, `min(m, n)` of them.
    pub coefficients: Vec<f64>,
    pub left_vectors: Vec<CVec>,
    pub right_vectors: Vec<CVec>,
    pub schmidt_rank: usize,
}

impl SchmidtDecomposition {
    pub fn reconstruct(&self) -> CVec {
        let d = self.left_vectors[0].len() * self.right_vectors[0].len();
        let mut out = CVec::zeros(d);
        for ((c, l), r) in self.coefficients.iter().zip(&self.left_vectors).zip(&self.right_vectors) {
            out += tensor(l, r) * Complex64::from(*c);
        }
        out
    }
}

pub fn schmidt(psi: &CVec, dims: &BipartiteDims) -> Result<SchmidtDecomposition> {
    dims.check_vector(psi)?;
    if psi.norm() == 0.0 {
        return Err(Error::ZeroVector);
    }
    let (m, n) = (dims.m(), dims.n());
    let coeff = CMat::from_fn(m, n, |i, j| psi[i * n + j]);
    let svd = coeff.svd(true, true);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let order = descending_order(svd.singular_values.as_slice());

    let coefficients: Vec<f64> = order.iter().map(|&k| svd.singular_values[k]).collect();
    // C = Σ σ u_k v_k†, so ψ = Σ σ u_k ⊗ conj(v_k) and conj(v_k) is row k of V†.
    let left_vectors = order.iter().map(|&k| u.column(k).into_owned()).collect();
    let right_vectors = order.iter().map(|&k| v_t.row(k).transpose()).collect();
    let largest = coefficients[0];
    let schmidt_rank = coefficients.iter().filter(|&&c| c > RANK_TOL * largest).count();
    Ok(SchmidtDecomposition { coefficients, left_vectors, right_vectors, schmidt_rank })
}

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

/// Singular values in nonincreasing order.
pub fn singular_values(x: &CMat) -> Vec<f64> {
    if x.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = x.clone().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn count_above(s: &[f64], tol: f64) -> usize {
    match s.first() {
        Some(&largest) if largest > 0.0 => s.iter().filter(|&&x| x > tol * largest).count(),
        _ => 0,
    }
}

/// Matrix whose columns are the given vectors.
pub fn columns(vectors: &[CVec]) -> CMat {
    let rows = vectors.first().map_or(0, |v| v.len());
    CMat::from_fn(rows, vectors.len(), |r, c| vectors[c][r])
}

/// Number of singular values above `tol` times the largest one.
pub fn numerical_rank(vectors: &[CVec], tol: f64) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    count_above(&singular_values(&columns(vectors)), tol)
}

pub fn matrix_rank(x: &CMat, tol: f64) -> usize {
    count_above(&singular_values(x), tol)
}

/// Orthonormal basis of the right null space of `x`, using the same relative
/// threshold as [`numerical_rank`].
pub fn kernel(x: &CMat, tol: f64) -> Vec<CVec> {
    let cols = x.ncols();
    if cols == 0 {
        return Vec::new();
    }
    // Thin SVD of a wide matrix drops part of V; pad to square.
    let padded = if x.nrows() < cols {
        let mut p = CMat::zeros(cols, cols);
        p.rows_mut(0, x.nrows()).copy_from(x);
        p
    } else {
        x.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let s = svd.singular_values;
    let largest = s.iter().copied().fold(0.0, f64::max);
    (0..s.len())
        .filter(|&k| largest == 0.0 || s[k] <= tol * largest)
        .map(|k| v_t.row(k).adjoint())
        .collect()
}

/// `max |X − X†|`.
pub fn hermiticity_defect(x: &CMat) -> f64 {
    if x.nrows() != x.ncols() {
        return f64::INFINITY;
    }
    let mut worst: f64 = 0.0;
    for r in 0..x.nrows() {
        for c in r..x.ncols() {
            worst = worst.max((x[(r, c)] - x[(c, r)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(x: &CMat) -> CMat {
    (x + x.adjoint()) * Complex64::from(0.5)
}

fn check_hermitian(x: &CMat) -> Result<()> {
    let defect = hermiticity_defect(x);
    if defect > EPS_HERM {
        return Err(Error::NotHermitian(defect));
    }
    Ok(())
}

/// Eigen-decomposition of the Hermitian part: eigenvalues ascending, with the
/// matching eigenvectors as columns.
pub fn eigh(h: &CMat) -> Result<(Vec<f64>, CMat)> {
    check_hermitian(h)?;
    let eig = hermitian_part(h).symmetric_eigen();
    let order = descending_order(eig.eigenvalues.as_slice());
    let values: Vec<f64> = order.iter().rev().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(h.nrows(), h.ncols(), |r, c| {
        eig.eigenvectors[(r, order[order.len() - 1 - c])]
    });
    Ok((values, vectors))
}

pub fn min_eigenvalue(h: &CMat) -> Result<f64> {
    Ok(eigh(h)?.0[0])
}

pub fn max_eigenvalue(h: &CMat) -> Result<f64> {
    Ok(*eigh(h)?.0.last().expect("nonempty matrix"))
}

pub fn is_psd(h: &CMat, tol: f64) -> Result<bool> {
    Ok(min_eigenvalue(h)? >= -tol)
}

/// `Σ |v⟩⟨v|` over the given vectors.
pub fn projector(basis: &[CVec]) -> CMat {
    let d = basis.first().map_or(0, |v| v.len());
    let mut p = CMat::zeros(d, d);
    for v in basis {
        p += v * v.adjoint();
    }
    p
}

/// `⟨v|H|v⟩ / ⟨v|v⟩`, real part.
pub fn expectation(h: &CMat, v: &CVec) -> f64 {
    let norm2 = v.norm_squared();
    (v.adjoint() * h * v)[(0, 0)].re / norm2
}

/// Partial trace over the second factor (`Tr_B`), an `m × m` operator.
pub fn trace_second(x: &CMat, dims: &BipartiteDims) -> CMat {
    let (m, n) = (dims.m(), dims.n());
    CMat::from_fn(m, m, |i, k| (0..n).map(|j| x[(i * n + j, k * n + j)]).sum())
}

/// Partial trace over the first factor (`Tr_A`), an `n × n` operator.
pub fn trace_first(x: &CMat, dims: &BipartiteDims) -> CMat {
    let (m, n) = (dims.m(), dims.n());
    CMat::from_fn(n, n, |j, l| (0..m).map(|i| x[(i * n + j, i * n + l)]).sum())
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn cvec(entries: &[Complex64]) -> CVec {
    CVec::from_column_slice(entries)
}

pub fn rvec(entries: &[f64]) -> CVec {
    CVec::from_iterator(entries.len(), entries.iter().map(|&x| Complex64::from(x)))
}

/// Computational basis vector `|i⟩⊗|j⟩`.
pub fn basis_ket(dims: &BipartiteDims, i: usize, j: usize) -> CVec {
    let mut v = CVec::zeros(dims.total());
    v[i * dims.n() + j] = ONE;
    v
}
