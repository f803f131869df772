//! Subspaces of `H_{m,n}`, orthocomplements, reduced supports, and
//! completely-entangled-subspace (CES) certification by product-vector search.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::random::{gaussian_vector, rng_for};
use crate::seesaw::{self, SeesawOptions};
use crate::tensor::{
    columns, is_psd, kernel, min_eigenvalue, numerical_rank, projector, tensor, trace_first,
    trace_second, BipartiteDims, CMat, CVec, ProductVector, RANK_TOL,
};

/// Overlap margin below 1 that separates a CES from a subspace with a product vector.
pub const CES_TOL: f64 = 1e-7;
/// Draws attempted by [`random_ces`] before giving up.
pub const CES_DRAW_BUDGET: usize = 200;

/// Orthonormal basis of a subspace of `C^m ⊗ C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    dims: BipartiteDims,
    basis: Vec<CVec>,
}

impl Subspace {
    /// Wraps a basis the caller guarantees to be orthonormal.
    pub fn from_orthonormal(dims: BipartiteDims, basis: Vec<CVec>) -> Self {
        Self { dims, basis }
    }

    pub fn full(dims: BipartiteDims) -> Self {
        let d = dims.total();
        let basis = (0..d)
            .map(|k| {
                let mut v = CVec::zeros(d);
                v[k] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
        Self { dims, basis }
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn basis(&self) -> &[CVec] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn projector(&self) -> CMat {
        if self.basis.is_empty() {
            let d = self.dims.total();
            return CMat::zeros(d, d);
        }
        projector(&self.basis)
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn gram_defect(&self) -> f64 {
        let b = columns(&self.basis);
        let gram = b.adjoint() * &b;
        let k = self.basis.len();
        (gram - CMat::identity(k, k)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Norm of the component of a unit-normalized `v` outside the subspace.
    pub fn distance(&self, v: &CVec) -> f64 {
        let v = v / Complex64::from(v.norm());
        let mut rest = v.clone();
        for b in &self.basis {
            let amp = (b.adjoint() * &v)[(0, 0)];
            rest -= b * amp;
        }
        rest.norm()
    }
}

/// Gram–Schmidt with one reorthogonalization pass.
pub fn orthonormalize(raw: &[CVec], dims: BipartiteDims) -> Result<Subspace> {
    for v in raw {
        dims.check_vector(v)?;
    }
    let rank = numerical_rank(raw, RANK_TOL);
    if rank < raw.len() {
        return Err(Error::DependentVectors { rank, count: raw.len() });
    }
    let mut basis: Vec<CVec> = Vec::with_capacity(raw.len());
    for v in raw {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let amp = (b.adjoint() * &w)[(0, 0)];
                w -= b * amp;
            }
        }
        let norm = w.norm();
        basis.push(w / Complex64::from(norm));
    }
    Ok(Subspace { dims, basis })
}

/// `V^⊥` inside `H_{m,n}`.
pub fn complement(v: &Subspace) -> Subspace {
    if v.basis.is_empty() {
        return Subspace::full(v.dims);
    }
    let rows = columns(&v.basis).adjoint();
    Subspace { dims: v.dims, basis: kernel(&rows, RANK_TOL) }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// `Q_A = Tr_B Q`.
    First,
    /// `Q_B = Tr_A Q`.
    Second,
}

pub fn reduced_support(q: &CMat, dims: &BipartiteDims, side: Side) -> Result<CMat> {
    dims.check_square(q)?;
    let lowest = min_eigenvalue(q)?;
    if lowest < -1e-10 {
        return Err(Error::NotPsd(lowest));
    }
    Ok(match side {
        Side::First => trace_second(q, dims),
        Side::Second => trace_first(q, dims),
    })
}

/// `(m−1)(n−1)`.
pub fn max_ces_dimension(dims: &BipartiteDims) -> usize {
    (dims.m() - 1) * (dims.n() - 1)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CesOptions {
    pub multistarts: usize,
    pub max_iter: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for CesOptions {
    fn default() -> Self {
        Self { multistarts: 64, max_iter: 2000, seed: 0, tol: CES_TOL }
    }
}

impl CesOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    fn seesaw(&self) -> SeesawOptions {
        SeesawOptions { multistarts: self.multistarts, max_iter: self.max_iter, seed: self.seed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CesCertificate {
    pub is_ces: bool,
    pub max_product_overlap: f64,
    pub witness_vector: Option<ProductVector>,
    pub multistarts_used: usize,
    pub seed: u64,
    pub tol: f64,
}

/// Gauss–Newton refinement of a product vector onto the variety
/// `{(e, f) : ⟨cᵢ|e ⊗ f⟩ = 0 ∀i}`.
///
/// The equations are holomorphic in `(e, f)`. One entry of each factor is
/// pinned to 1 (the largest one at entry) and minimum-norm steps are taken on
/// the rest, so underdetermined systems move to the nearest solution. Returns
/// `None` unless the relative residual drops below `1e-13`.
pub fn polish_orthogonal(constraints: &[CVec], dims: &BipartiteDims, pv: &ProductVector) -> Option<ProductVector> {
    let (m, n) = (dims.m(), dims.n());
    if constraints.is_empty() {
        return Some(pv.clone());
    }
    let argmax = |v: &CVec| {
        (0..v.len()).max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm())).expect("nonempty")
    };
    let a = argmax(&pv.e);
    let b = argmax(&pv.f);
    let mut e = &pv.e / pv.e[a];
    let mut f = &pv.f / pv.f[b];
    let r = constraints.len();
    let unknowns = (m - 1) + (n - 1);

    let residual = |e: &CVec, f: &CVec| -> (CVec, f64) {
        let v = tensor(e, f);
        let g = CVec::from_fn(r, |i, _| (constraints[i].adjoint() * &v)[(0, 0)]);
        let rel = g.norm() / (e.norm() * f.norm());
        (g, rel)
    };

    for _ in 0..60 {
        let (g, rel) = residual(&e, &f);
        if rel < 1e-13 {
            return Some(ProductVector::new(e, f));
        }
        if !rel.is_finite() || e.norm() > 1e8 || f.norm() > 1e8 {
            return None;
        }
        let mut jac = CMat::zeros(r, unknowns);
        for (i, ci) in constraints.iter().enumerate() {
            let mut col = 0;
            for j in (0..m).filter(|&j| j != a) {
                jac[(i, col)] = (0..n).map(|l| ci[j * n + l].conj() * f[l]).sum();
                col += 1;
            }
            for l in (0..n).filter(|&l| l != b) {
                jac[(i, col)] = (0..m).map(|j| ci[j * n + l].conj() * e[j]).sum();
                col += 1;
            }
        }
        let step = jac.svd(true, true).solve(&(-g), 1e-12).ok()?;
        let mut col = 0;
        for j in (0..m).filter(|&j| j != a) {
            e[j] += step[col];
            col += 1;
        }
        for l in (0..n).filter(|&l| l != b) {
            f[l] += step[col];
            col += 1;
        }
    }
    let (_, rel) = residual(&e, &f);
    (rel < 1e-13).then(|| ProductVector::new(e, f))
}

fn overlap_with(p: &CMat, pv: &ProductVector) -> f64 {
    crate::tensor::expectation(p, &pv.embed())
}

/// Seesaw search for a product vector in `V`, maximizing `⟨e,f|P_V|e,f⟩`.
/// Near-unit maxima are refined by Gauss–Newton onto `V` before the verdict.
pub fn find_product_vector_in(v: &Subspace, opts: &CesOptions) -> CesCertificate {
    let dims = v.dims();
    let p = v.projector();
    let runs = seesaw::maximize_all(&p, &dims, &opts.seesaw());
    let perp = complement(v);

    let mut best_value = f64::NEG_INFINITY;
    let mut best_pv = None;
    for run in &runs {
        let mut value = run.value;
        let mut pv = run.pv.clone();
        if value < 1.0 - opts.tol && value > 1.0 - 1e-3 {
            if let Some(polished) = polish_orthogonal(perp.basis(), &dims, &run.pv) {
                let polished_value = overlap_with(&p, &polished);
                if polished_value > value {
                    value = polished_value;
                    pv = polished;
                }
            }
        }
        if value > best_value {
            best_value = value;
            best_pv = Some(pv);
        }
    }
    let max_product_overlap = best_value.clamp(0.0, 1.0);
    let is_ces = max_product_overlap < 1.0 - opts.tol;
    CesCertificate {
        is_ces,
        max_product_overlap,
        witness_vector: if is_ces { None } else { best_pv.map(|pv| pv.canonical()) },
        multistarts_used: runs.len(),
        seed: opts.seed,
        tol: opts.tol,
    }
}

/// Alias that reads better at call sites asking the yes/no question.
pub fn certify_ces(v: &Subspace, opts: &CesOptions) -> CesCertificate {
    find_product_vector_in(v, opts)
}

/// Orthonormalized complex-Gaussian subspace of the given dimension.
pub fn random_subspace(dims: BipartiteDims, dim: usize, seed: u64, stream: u64) -> Subspace {
    let mut rng = rng_for(seed, stream);
    loop {
        let raw: Vec<CVec> = (0..dim).map(|_| gaussian_vector(&mut rng, dims.total())).collect();
        if let Ok(s) = orthonormalize(&raw, dims) {
            return s;
        }
    }
}

const CES_STREAM_BASE: u64 = 1 << 40;

/// Random subspace rejection-sampled until it certifies as a CES.
pub fn random_ces(dims: BipartiteDims, dim: usize, opts: &CesOptions) -> Result<(Subspace, CesCertificate)> {
    let bound = max_ces_dimension(&dims);
    if dim == 0 {
        return Err(Error::Precondition("CES dimension must be at least 1".into()));
    }
    if dim > bound {
        return Err(Error::CesDimensionBound { requested: dim, bound });
    }
    for draw in 0..CES_DRAW_BUDGET {
        let v = random_subspace(dims, dim, opts.seed, CES_STREAM_BASE + draw as u64);
        let cert = find_product_vector_in(&v, opts);
        if cert.is_ces {
            return Ok((v, cert));
        }
    }
    Err(Error::BudgetExhausted(CES_DRAW_BUDGET))
}

/// Whether both reduced supports have full rank, i.e. the operator is
/// supported on `H_{m,n}`.
pub fn supported_on_full_space(q: &CMat, dims: &BipartiteDims) -> Result<bool> {
    let qa = reduced_support(q, dims, Side::First)?;
    let qb = reduced_support(q, dims, Side::Second)?;
    Ok(crate::tensor::matrix_rank(&qa, RANK_TOL) == dims.m()
        && crate::tensor::matrix_rank(&qb, RANK_TOL) == dims.n())
}

/// Orthonormal basis of the range of a PSD operator.
pub fn support(q: &CMat, dims: BipartiteDims) -> Result<Subspace> {
    dims.check_square(q)?;
    if !is_psd(q, 1e-10)? {
        return Err(Error::NotPsd(min_eigenvalue(q)?));
    }
    let (values, vectors) = crate::tensor::eigh(q)?;
    let largest = values.last().copied().unwrap_or(0.0);
    let basis = values
        .iter()
        .enumerate()
        .filter(|(_, &x)| largest > 0.0 && x > RANK_TOL * largest)
        .map(|(k, _)| vectors.column(k).into_owned())
        .collect();
    Ok(Subspace { dims, basis })
}
