//! Decomposable witnesses `W = aP + (1−a)Q^Γ`: verification of the witness
//! conditions, the zero set `P_W`, and the spanning/subtraction optimality probe.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{orthogonal_family, recommended_sample_count, FamilySample, ProductFamily};
use crate::seesaw::{self, SeesawOptions};
use crate::subspace::{support, CesOptions, Subspace};
use crate::tensor::{
    columns, eigh, expectation, hermiticity_defect, is_psd, kernel, min_eigenvalue,
    numerical_rank, partial_transpose, projector, schmidt, BipartiteDims, CMat, CVec,
    ProductVector, EPS_HERM, EPS_NUM, RANK_TOL,
};

/// Product-minimum nonnegativity tolerance.
pub const EW_TOL: f64 = 1e-8;
/// Smallest subtraction weight accepted as a genuine improvement.
pub const EPS_MIN: f64 = 1e-4;
/// Bound on `|⟨e,f|W|e,f⟩|` for members of the computed zero set.
pub const ZERO_SET_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub a: f64,
    pub p: CMat,
    pub q: CMat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    matrix: CMat,
    dims: BipartiteDims,
    provenance: Option<Provenance>,
}

fn check_psd(x: &CMat) -> Result<()> {
    let lowest = min_eigenvalue(x)?;
    if lowest < -1e-10 {
        return Err(Error::NotPsd(lowest));
    }
    Ok(())
}

impl Witness {
    /// A Hermitian operator with no decomposition attached.
    pub fn new(matrix: CMat, dims: BipartiteDims) -> Result<Self> {
        dims.check_square(&matrix)?;
        let defect = hermiticity_defect(&matrix);
        if defect > EPS_HERM {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { matrix, dims, provenance: None })
    }

    /// `aP + (1−a)Q^Γ` with `P, Q ⪰ 0` and `a ∈ [0, 1]`.
    pub fn decomposable(a: f64, p: CMat, q: CMat, dims: BipartiteDims) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::Precondition(format!("weight a = {a} outside [0, 1]")));
        }
        dims.check_square(&p)?;
        dims.check_square(&q)?;
        check_psd(&p)?;
        check_psd(&q)?;
        let matrix = &p * Complex64::from(a) + partial_transpose(&q, &dims)? * Complex64::from(1.0 - a);
        Ok(Self { matrix, dims, provenance: Some(Provenance { a, p, q }) })
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// `Q` of a decomposition with `a = 0`: taken from the provenance, or
    /// recovered as `W^Γ` when that operator is PSD.
    pub fn q_operator(&self) -> Option<CMat> {
        match &self.provenance {
            Some(p) if p.a == 0.0 => Some(p.q.clone()),
            Some(_) => None,
            None => {
                let q = partial_transpose(&self.matrix, &self.dims).ok()?;
                is_psd(&q, 1e-10).ok()?.then_some(q)
            }
        }
    }

    /// `⟨e,f|W|e,f⟩` for the normalized product vector.
    pub fn product_expectation(&self, pv: &ProductVector) -> f64 {
        expectation(&self.matrix, &pv.embed())
    }
}

/// `W = Q^Γ`.
pub fn dew_from_q(q: &CMat, dims: BipartiteDims) -> Result<Witness> {
    Witness::decomposable(0.0, CMat::zeros(dims.total(), dims.total()), q.clone(), dims)
}

/// `W = |ψ⟩⟨ψ|^Γ` for an entangled pure state; product states are rejected.
pub fn witness_from_pure_state(psi: &CVec, dims: BipartiteDims) -> Result<Witness> {
    let s = schmidt(psi, &dims)?;
    if s.schmidt_rank < 2 {
        return Err(Error::Precondition("pure state is a product state".into()));
    }
    let unit = psi / Complex64::from(psi.norm());
    dew_from_q(&projector(&[unit]), dims)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EwOptions {
    pub multistarts: usize,
    pub max_iter: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for EwOptions {
    fn default() -> Self {
        Self { multistarts: 64, max_iter: 2000, seed: 0, tol: EW_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EwVerdict {
    pub is_ew: bool,
    pub min_product_value: f64,
    pub min_eigenvalue: f64,
    pub violating_product: Option<ProductVector>,
    /// Projector onto an eigenvector of the most negative eigenvalue.
    pub detected_state: Option<CMat>,
}

/// Checks `⟨e,f|W|e,f⟩ ≥ 0` by seesaw minimization and the presence of a
/// negative eigenvalue. The seesaw runs on the PSD surrogate `λmax·1 − W`.
pub fn verify_ew(w: &Witness, opts: &EwOptions) -> EwVerdict {
    let dims = w.dims();
    let (values, vectors) = eigh(w.matrix()).expect("witness is Hermitian");
    let lowest = values[0];
    let highest = *values.last().expect("nonempty");
    let d = dims.total();
    let shifted = CMat::identity(d, d) * Complex64::from(highest) - w.matrix();
    let run = seesaw::maximize(
        &shifted,
        &dims,
        &SeesawOptions { multistarts: opts.multistarts, max_iter: opts.max_iter, seed: opts.seed },
    );
    let min_product_value = w.product_expectation(&run.pv).min(highest - run.value);
    let negative_on_products = min_product_value < -opts.tol;
    let has_negative_eigenvalue = lowest < -opts.tol;
    let detected_state = has_negative_eigenvalue.then(|| {
        let v = vectors.column(0).into_owned();
        projector(&[v])
    });
    EwVerdict {
        is_ew: !negative_on_products && has_negative_eigenvalue,
        min_product_value,
        min_eigenvalue: lowest,
        violating_product: negative_on_products.then(|| run.pv.canonical()),
        detected_state,
    }
}

/// Product vectors with `⟨e,f|W|e,f⟩ = 0` for `W = Q^Γ`: the partial
/// conjugates of product vectors in `ker Q`, using the recommended sample
/// count for `supp Q`.
pub fn zero_set(w: &Witness, ces: &CesOptions) -> Result<ProductFamily> {
    zero_set_with(w, None, ces)
}

pub fn zero_set_with(w: &Witness, samples: Option<usize>, ces: &CesOptions) -> Result<ProductFamily> {
    let q = w.q_operator().ok_or(Error::MissingProvenance)?;
    let dims = w.dims();
    let v = support(&q, dims)?;
    if v.dim() == 0 {
        return Err(Error::Precondition("Q is zero".into()));
    }
    let count = samples.unwrap_or_else(|| recommended_sample_count(&dims, v.dim()));
    let kernel_family = orthogonal_family(&v, count, ces)?;
    let samples = kernel_family
        .samples
        .into_iter()
        .map(|s| {
            let pv = s.pv.partial_conjugate().canonical();
            let params = s.params.iter().map(|z| z.conj()).collect();
            FamilySample { params, chart: pv.chart(), pv }
        })
        .collect();
    Ok(ProductFamily { dims, samples, certified: kernel_family.certified })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimalityStatus {
    OptimalCertified,
    NonOptimal,
    Undecided,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subtraction {
    pub p: CMat,
    pub epsilon: f64,
    /// `(1+ε)W − εP`.
    pub improved: Witness,
    pub improved_verdict: EwVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityReport {
    /// Dimension spanned by the computed zero set; `None` when the witness has
    /// no `a = 0` decomposition.
    pub pw_span_dim: Option<usize>,
    pub spanning_certified_optimal: bool,
    pub subtractable: Option<Subtraction>,
    pub status: OptimalityStatus,
    pub verdict: EwVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityOptions {
    pub ew: EwOptions,
    pub ces: CesOptions,
    /// Per-chart sample count for the zero set; `None` for the recommended one.
    pub samples: Option<usize>,
    pub eps_min: f64,
    pub bisection_steps: usize,
}

impl Default for OptimalityOptions {
    fn default() -> Self {
        Self {
            ew: EwOptions::default(),
            ces: CesOptions::default(),
            samples: None,
            eps_min: EPS_MIN,
            bisection_steps: 20,
        }
    }
}

impl OptimalityOptions {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            ew: EwOptions { seed, ..EwOptions::default() },
            ces: CesOptions::with_seed(seed),
            ..Self::default()
        }
    }
}

fn subtracted(w: &Witness, p: &CMat, eps: f64) -> Witness {
    let matrix = w.matrix() * Complex64::from(1.0 + eps) - p * Complex64::from(eps);
    let matrix = crate::tensor::hermitian_part(&matrix);
    Witness { matrix, dims: w.dims(), provenance: None }
}

/// Largest `ε ∈ [eps_min, 1]` (by bisection) such that `(1+ε)W − εP` still
/// verifies as a witness. The set of admissible `ε` is an interval starting
/// at 0, since `(1+ε')W − ε'P` is a convex combination of `W` and the
/// operator at any larger `ε`.
pub fn largest_subtraction(w: &Witness, p: &CMat, opts: &OptimalityOptions) -> Option<Subtraction> {
    let check = |eps: f64| {
        let cand = subtracted(w, p, eps);
        let verdict = verify_ew(&cand, &opts.ew);
        (cand, verdict)
    };
    let (cand, verdict) = check(1.0);
    if verdict.is_ew {
        return Some(Subtraction { p: p.clone(), epsilon: 1.0, improved: cand, improved_verdict: verdict });
    }
    let (mut best, mut best_verdict) = check(opts.eps_min);
    if !best_verdict.is_ew {
        return None;
    }
    let (mut lo, mut hi) = (opts.eps_min, 1.0);
    for _ in 0..opts.bisection_steps {
        let mid = 0.5 * (lo + hi);
        let (cand, verdict) = check(mid);
        if verdict.is_ew {
            lo = mid;
            best = cand;
            best_verdict = verdict;
        } else {
            hi = mid;
        }
    }
    Some(Subtraction { p: p.clone(), epsilon: lo, improved: best, improved_verdict: best_verdict })
}

/// Candidate operators orthogonal to `span P_W`: the projector onto the
/// orthocomplement `K` and the rank-1 projectors onto the eigenvectors of
/// `W` compressed to `K`.
fn subtraction_candidates(w: &Witness, k: &Subspace) -> Vec<CMat> {
    if k.dim() == 0 {
        return Vec::new();
    }
    let mut out = vec![k.projector()];
    let b = columns(k.basis());
    let compressed = b.adjoint() * w.matrix() * &b;
    if let Ok((_, vecs)) = eigh(&crate::tensor::hermitian_part(&compressed)) {
        for c in 0..vecs.ncols() {
            let dir = &b * vecs.column(c);
            out.push(projector(&[dir]));
        }
    }
    out
}

/// Spanning test on the zero set, then a single subtraction probe when the
/// zero set does not span.
pub fn optimality_analysis(w: &Witness, opts: &OptimalityOptions) -> Result<OptimalityReport> {
    let verdict = verify_ew(w, &opts.ew);
    if !verdict.is_ew {
        return Err(Error::NotWitness);
    }
    let dims = w.dims();

    let (pw_span_dim, candidates) = match zero_set_with(w, opts.samples, &opts.ces) {
        Ok(fam) => {
            let members = fam.embedded();
            let span = numerical_rank(&members, RANK_TOL);
            let k = if members.is_empty() {
                Subspace::full(dims)
            } else {
                let rows = columns(&members).adjoint();
                Subspace::from_orthonormal(dims, kernel(&rows, RANK_TOL))
            };
            (Some(span), subtraction_candidates(w, &k))
        }
        Err(Error::MissingProvenance) => {
            // aP + (1−a)Q^Γ with a > 0: P itself is the natural candidate.
            let cands = match w.provenance() {
                Some(p) if p.a > 0.0 => support(&p.p, dims).map(|s| vec![s.projector()]).unwrap_or_default(),
                _ => Vec::new(),
            };
            (None, cands)
        }
        Err(e) => return Err(e),
    };

    if pw_span_dim == Some(dims.total()) {
        return Ok(OptimalityReport {
            pw_span_dim,
            spanning_certified_optimal: true,
            subtractable: None,
            status: OptimalityStatus::OptimalCertified,
            verdict,
        });
    }

    let mut best: Option<Subtraction> = None;
    for p in candidates.iter().filter(|p| p.trace().re > EPS_NUM) {
        if let Some(sub) = largest_subtraction(w, p, opts) {
            if best.as_ref().is_none_or(|b| sub.epsilon > b.epsilon) {
                best = Some(sub);
            }
        }
    }
    let status = if best.is_some() { OptimalityStatus::NonOptimal } else { OptimalityStatus::Undecided };
    Ok(OptimalityReport { pw_span_dim, spanning_certified_optimal: false, subtractable: best, status, verdict })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FinerVerdict {
    pub finer: bool,
    /// The two witnesses coincide; reported as finer with `ε = 0`.
    pub equal: bool,
    pub epsilon: Option<f64>,
    pub p: Option<CMat>,
}

/// Scans `eps_grid` for the smallest `ε ∈ (0, 1]` with
/// `W1 = (1−ε)W2 + εP` and `P ⪰ 0`.
pub fn is_finer(w1: &Witness, w2: &Witness, eps_grid: &[f64]) -> Result<FinerVerdict> {
    if w1.dims() != w2.dims() {
        return Err(Error::DimensionMismatch { expected: w2.dims().total(), actual: w1.dims().total() });
    }
    let diff = (w1.matrix() - w2.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if diff <= EPS_NUM {
        return Ok(FinerVerdict { finer: true, equal: true, epsilon: Some(0.0), p: None });
    }
    let mut grid: Vec<f64> = eps_grid.iter().copied().filter(|&e| e > 0.0 && e <= 1.0).collect();
    grid.sort_by(|a, b| a.total_cmp(b));
    for eps in grid {
        let p = (w1.matrix() - w2.matrix() * Complex64::from(1.0 - eps)) / Complex64::from(eps);
        if is_psd(&crate::tensor::hermitian_part(&p), 1e-10)? {
            return Ok(FinerVerdict { finer: true, equal: false, epsilon: Some(eps), p: Some(p) });
        }
    }
    Ok(FinerVerdict { finer: false, equal: false, epsilon: None, p: None })
}

/// Smallest eigenvalue of the partial transpose; negative means NPT.
pub fn partial_transpose_min_eigenvalue(q: &CMat, dims: &BipartiteDims) -> Result<f64> {
    min_eigenvalue(&partial_transpose(q, dims)?)
}
