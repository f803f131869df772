//! Product vectors orthogonal to a subspace, enumerated by numeric kernels.
//!
//! For a fixed first factor `e`, the conditions `⟨Ψᵢ|e ⊗ f⟩ = 0` are linear in
//! `f`: a `k × n` constraint matrix whose kernel holds every admissible `f`.
//! Sampling `e` over the affine charts of the first factor's projective space
//! and collecting kernels traces out the product vectors of `V^⊥` without ever
//! forming the polynomial solutions explicitly. When `dim V ≥ n` a generic `e`
//! admits no `f`; those product vectors are found by seesaw search on `V^⊥`
//! followed by Gauss–Newton refinement instead.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::seesaw::{self, SeesawOptions};
use crate::subspace::{certify_ces, complement, polish_orthogonal, CesOptions, Subspace};
use crate::tensor::{kernel, numerical_rank, BipartiteDims, CMat, CVec, ProductVector, RANK_TOL};

/// Orthogonality bound every emitted sample satisfies.
pub const ORTHO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySample {
    /// Chart coordinates of `e` after its leading 1, followed by the kernel
    /// mixing coordinates when the kernel at this point is degenerate.
    pub params: Vec<Complex64>,
    /// Index of the leading 1 in `e`.
    pub chart: usize,
    pub pv: ProductVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductFamily {
    pub dims: BipartiteDims,
    pub samples: Vec<FamilySample>,
    /// Whether the source subspace was certified as a CES. The span claims of
    /// the lemmas only apply when this is true.
    pub certified: bool,
}

impl ProductFamily {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn embedded(&self) -> Vec<CVec> {
        self.samples.iter().map(|s| s.pv.embed().normalize()).collect()
    }

    pub fn conjugated(&self) -> Vec<CVec> {
        self.samples.iter().map(|s| s.pv.partial_conjugate().embed().normalize()).collect()
    }

    /// Largest `|⟨Ψᵢ|e,f⟩|` over samples and basis vectors of `v`, with
    /// `e ⊗ f` normalized.
    pub fn max_overlap_with(&self, v: &Subspace) -> f64 {
        let mut worst: f64 = 0.0;
        for x in self.embedded() {
            for b in v.basis() {
                worst = worst.max((b.adjoint() * &x)[(0, 0)].norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpanCertificate {
    pub family_span_dim: usize,
    pub pc_span_dim: usize,
    pub sample_count: usize,
    pub rank_tolerance: f64,
}

fn fract(x: f64) -> f64 {
    x - x.floor()
}

/// Deterministic low-discrepancy complex point: radius in `[0.5, 1.5)` and
/// angle both driven by additive (Weyl) sequences, so `α` and `α*` are never
/// tied by `|α| = const`.
pub fn weyl_point(index: usize, coord: usize) -> Complex64 {
    const G1: f64 = 0.618_033_988_749_894_8;
    const G2: f64 = 0.754_877_666_246_692_7;
    const G3: f64 = 0.569_840_290_998_053_3;
    let j = index as f64 + 1.0;
    let q = coord as f64;
    let radius = 0.5 + fract(j * G1 + q * G3);
    let angle = TAU * fract(j * G2 + q * (G1 + G3));
    Complex64::from_polar(radius, angle)
}

/// `count` distinct values of `α`: zero followed by Weyl points.
pub fn alpha_samples(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| if k == 0 { Complex64::new(0.0, 0.0) } else { weyl_point(k, 0) })
        .collect()
}

/// First-factor samples covering every affine chart of `P(C^m)`: `count`
/// points per chart with free coordinates, one point for the last chart.
pub fn chart_samples(m: usize, count: usize) -> Vec<CVec> {
    let mut out = Vec::new();
    for chart in 0..m {
        let free = m - 1 - chart;
        let points = if free == 0 { 1 } else { count };
        for j in 0..points {
            let mut e = CVec::zeros(m);
            e[chart] = Complex64::new(1.0, 0.0);
            for q in 0..free {
                e[chart + 1 + q] = weyl_point(j, q + 7 * chart);
            }
            out.push(e);
        }
    }
    out
}

/// Samples per chart that saturate the spans of polynomial families of the
/// degrees occurring here: `2n + 1` values of `α` on `C^2 ⊗ C^n` and
/// `2mn + 7` points per chart otherwise (25 on `C^3 ⊗ C^3`).
pub fn recommended_sample_count(dims: &BipartiteDims, _k: usize) -> usize {
    if dims.m() == 2 {
        2 * dims.n() + 1
    } else {
        2 * dims.total() + 7
    }
}

/// Row `i` is `⟨Ψᵢ|` contracted against `e` on the first factor.
pub fn constraint_matrix(basis: &[CVec], dims: &BipartiteDims, e: &CVec) -> CMat {
    let (m, n) = (dims.m(), dims.n());
    CMat::from_fn(basis.len(), n, |i, l| (0..m).map(|j| basis[i][j * n + l].conj() * e[j]).sum())
}

fn check_distinct(values: &[Complex64]) -> Result<()> {
    for (i, a) in values.iter().enumerate() {
        if values[i + 1..].iter().any(|b| (a - b).norm() < 1e-12) {
            return Err(Error::Precondition(format!("repeated parameter value {a}")));
        }
    }
    Ok(())
}

fn kernel_samples(v: &Subspace, e: &CVec, coords: Vec<Complex64>, chart: usize) -> Vec<FamilySample> {
    let dims = v.dims();
    let ker = kernel(&constraint_matrix(v.basis(), &dims, e), RANK_TOL);
    let width = ker.len();
    ker.into_iter()
        .enumerate()
        .map(|(idx, f)| {
            let mut params = coords.clone();
            if width > 1 {
                params.extend((0..width).map(|t| Complex64::new(if t == idx { 1.0 } else { 0.0 }, 0.0)));
            }
            FamilySample { params, chart, pv: ProductVector::new(e.clone(), f).canonical() }
        })
        .collect()
}

/// Kernel family on `C^2 ⊗ C^n` with `e(α) = (1, α)` plus the chart at
/// infinity `e = (0, 1)`.
pub fn family_2xn(v: &Subspace, alphas: &[Complex64], ces: &CesOptions) -> Result<ProductFamily> {
    let dims = v.dims();
    if dims.m() != 2 {
        return Err(Error::Precondition(format!("expected m = 2, got m = {}", dims.m())));
    }
    if v.dim() == 0 {
        return Err(Error::Precondition("subspace must be nonzero".into()));
    }
    check_distinct(alphas)?;
    let one = Complex64::new(1.0, 0.0);
    let mut samples = Vec::new();
    for &alpha in alphas {
        let e = CVec::from_column_slice(&[one, alpha]);
        samples.extend(kernel_samples(v, &e, vec![alpha], 0));
    }
    let infinity = CVec::from_column_slice(&[Complex64::new(0.0, 0.0), one]);
    samples.extend(kernel_samples(v, &infinity, Vec::new(), 1));
    Ok(ProductFamily { dims, samples, certified: certify_ces(v, ces).is_ces })
}

/// Kernel family with the first factor ranging over the supplied samples.
/// Samples whose kernel is empty contribute nothing.
pub fn family_general(v: &Subspace, e_samples: &[CVec], ces: &CesOptions) -> Result<ProductFamily> {
    let dims = v.dims();
    if v.dim() == 0 {
        return Err(Error::Precondition("subspace must be nonzero".into()));
    }
    let mut samples = Vec::new();
    for e in e_samples {
        if e.len() != dims.m() {
            return Err(Error::DimensionMismatch { expected: dims.m(), actual: e.len() });
        }
        let canon = ProductVector::new(e.clone(), CVec::from_element(1, Complex64::new(1.0, 0.0))).canonical();
        let chart = canon.chart();
        let coords = canon.e.iter().skip(chart + 1).copied().collect();
        samples.extend(kernel_samples(v, &canon.e, coords, chart));
    }
    Ok(ProductFamily { dims, samples, certified: certify_ces(v, ces).is_ces })
}

fn poly_eval(coeffs: &[Complex64], t: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * t + c)
}

fn poly_derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    coeffs.iter().enumerate().skip(1).map(|(l, &c)| c * l as f64).collect()
}

/// Roots of `Σ cₗ tˡ` (ascending coefficients, nonzero leading one) as the
/// eigenvalues of the companion matrix.
pub fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let mut comp = CMat::zeros(deg, deg);
    for i in 0..deg {
        if i + 1 < deg {
            comp[(i + 1, i)] = Complex64::new(1.0, 0.0);
        }
        comp[(i, deg - 1)] = -coeffs[i] / lead;
    }
    let t = nalgebra::Schur::new(comp).unpack().1;
    (0..deg).map(|i| t[(i, i)]).collect()
}

/// `‖M(e) f‖ / (‖e‖ ‖f‖)`.
fn relative_residual(basis: &[CVec], dims: &BipartiteDims, pv: &ProductVector) -> f64 {
    let m = constraint_matrix(basis, dims, &pv.e);
    (m * &pv.f).norm() / (pv.e.norm() * pv.f.norm())
}

/// Re-solves a near-solution exactly on a line `e(t) = e₀ + t·d` through its
/// first factor.
///
/// Where the constraint matrix drops rank along a multiple component of the
/// first-factor variety, residual minimization only pins `e` to about the
/// square root of the residual. Along the line, `det(R·M(e(t)))` is a
/// polynomial whose roots near `t = 0` cluster with that multiplicity `μ`;
/// the root of its `(μ−1)`-th derivative is simple and is found to full
/// precision, after which `f` is the kernel of `M(e(t*))`. Returns `None`
/// when no cluster sits near `t = 0` or the result does not solve the
/// constraints.
pub fn refine_on_line(basis: &[CVec], dims: &BipartiteDims, pv: &ProductVector) -> Option<ProductVector> {
    let (m, n, k) = (dims.m(), dims.n(), basis.len());
    if k < n {
        return None;
    }
    let e0 = pv.e.normalize();
    let mut d = CVec::from_fn(m, |j, _| weyl_point(j, 11));
    d -= &e0 * (e0.adjoint() * &d)[(0, 0)];
    if d.norm() < 1e-6 {
        return None;
    }
    let d = d.normalize();
    let mix = if k == n {
        CMat::identity(n, n)
    } else {
        CMat::from_fn(n, k, |i, l| weyl_point(i * k + l, 13))
    };
    let det_at = |t: Complex64| (&mix * constraint_matrix(basis, dims, &(&e0 + &d * t))).determinant();

    let points = n + 1;
    let omega = |j: usize| Complex64::from_polar(1.0, TAU * j as f64 / points as f64);
    let values: Vec<Complex64> = (0..points).map(|j| det_at(omega(j))).collect();
    let mut coeffs: Vec<Complex64> = (0..points)
        .map(|l| (0..points).map(|j| values[j] * omega(j * l).conj()).sum::<Complex64>() / points as f64)
        .collect();
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.norm() <= 1e-12 * scale) {
        coeffs.pop();
    }
    let cluster: Vec<Complex64> = poly_roots(&coeffs).into_iter().filter(|r| r.norm() < 1e-3).collect();
    if cluster.is_empty() {
        return None;
    }
    let mut q = coeffs;
    for _ in 1..cluster.len() {
        q = poly_derivative(&q);
    }
    let dq = poly_derivative(&q);
    let mut t = cluster.iter().sum::<Complex64>() / cluster.len() as f64;
    for _ in 0..30 {
        let slope = poly_eval(&dq, t);
        if slope.norm() == 0.0 {
            break;
        }
        let step = poly_eval(&q, t) / slope;
        t -= step;
        if step.norm() < 1e-17 {
            break;
        }
    }
    if !(t.norm() < 1e-3) {
        return None;
    }
    let e = &e0 + &d * t;
    let svd = constraint_matrix(basis, dims, &e).svd(false, true);
    let v_t = svd.v_t?;
    let idx = (0..svd.singular_values.len())
        .min_by(|&a, &b| svd.singular_values[a].total_cmp(&svd.singular_values[b]))?;
    let out = ProductVector::new(e, v_t.row(idx).adjoint());
    (relative_residual(basis, dims, &out) < 1e-12).then_some(out)
}

/// Product vectors of `V^⊥` found by seesaw ascent on `P_{V^⊥}` from
/// `opts.multistarts` starts, each refined onto `V^⊥` by Gauss–Newton and
/// then by [`refine_on_line`] where that applies. Refinements that fail to converge and near-duplicates are dropped.
pub fn family_harvest(v: &Subspace, opts: &CesOptions) -> Result<ProductFamily> {
    let dims = v.dims();
    if v.dim() == 0 {
        return Err(Error::Precondition("subspace must be nonzero".into()));
    }
    let perp = complement(v);
    let mut samples: Vec<FamilySample> = Vec::new();
    if perp.dim() > 0 {
        let seesaw_opts = SeesawOptions { multistarts: opts.multistarts, max_iter: opts.max_iter, seed: opts.seed };
        let runs = seesaw::maximize_all(&perp.projector(), &dims, &seesaw_opts);
        let mut kept: Vec<CVec> = Vec::new();
        for run in runs.iter().filter(|r| r.value > 1.0 - 1e-3) {
            let Some(pv) = polish_orthogonal(v.basis(), &dims, &run.pv) else { continue };
            let pv = refine_on_line(v.basis(), &dims, &pv).unwrap_or(pv).canonical();
            let x = pv.embed().normalize();
            if kept.iter().any(|y| (y.adjoint() * &x)[(0, 0)].norm() > 1.0 - 1e-10) {
                continue;
            }
            kept.push(x);
            let chart = pv.chart();
            let params = pv.e.iter().skip(chart + 1).copied().collect();
            samples.push(FamilySample { params, chart, pv });
        }
    }
    Ok(ProductFamily { dims, samples, certified: certify_ces(v, opts).is_ces })
}

/// Chooses the construction for `V`: kernel sampling when a generic first
/// factor leaves a nonzero kernel (`dim V < n`), seesaw harvesting otherwise.
/// `samples` is the per-chart sample count; harvesting uses
/// `max(8·samples, 256)` starts.
pub fn orthogonal_family(v: &Subspace, samples: usize, ces: &CesOptions) -> Result<ProductFamily> {
    let dims = v.dims();
    if v.dim() < dims.n() {
        if dims.m() == 2 {
            family_2xn(v, &alpha_samples(samples), ces)
        } else {
            family_general(v, &chart_samples(dims.m(), samples), ces)
        }
    } else {
        let opts = CesOptions { multistarts: (8 * samples).max(256), ..*ces };
        let mut fam = family_harvest(v, &opts)?;
        fam.certified = certify_ces(v, ces).is_ces;
        Ok(fam)
    }
}

pub fn span_certificate(fam: &ProductFamily) -> Result<SpanCertificate> {
    span_certificate_with(fam, RANK_TOL)
}

pub fn span_certificate_with(fam: &ProductFamily, tol: f64) -> Result<SpanCertificate> {
    if fam.is_empty() {
        return Err(Error::Precondition("family has no samples".into()));
    }
    Ok(SpanCertificate {
        family_span_dim: numerical_rank(&fam.embedded(), tol),
        pc_span_dim: numerical_rank(&fam.conjugated(), tol),
        sample_count: fam.len(),
        rank_tolerance: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subspace::orthonormalize;
    use crate::tensor::{basis_ket, c, tensor};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn ladder(n: usize) -> Subspace {
        let d = BipartiteDims::new(2, n).unwrap();
        let raw: Vec<CVec> = (1..n)
            .map(|i| (basis_ket(&d, 0, i) - basis_ket(&d, 1, i - 1)) * c(FRAC_1_SQRT_2, 0.0))
            .collect();
        orthonormalize(&raw, d).unwrap()
    }

    #[test]
    fn ladder_kernels_are_moment_curves() {
        let v = ladder(3);
        let alphas = [c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0)];
        let fam = family_2xn(&v, &alphas, &CesOptions::default()).unwrap();
        assert!(fam.certified);
        assert_eq!(fam.len(), alphas.len() + 1);
        for s in fam.samples.iter().take(alphas.len()) {
            let a = s.params[0];
            let want = CVec::from_column_slice(&[c(1.0, 0.0), a, a * a]).normalize();
            let overlap = (want.adjoint() * &s.pv.f)[(0, 0)].norm();
            assert!((overlap - 1.0).abs() < 1e-12, "alpha {a}");
        }
        // α = 0 gives |00⟩
        let first = fam.samples[0].pv.embed();
        assert!((first[0].norm() - 1.0).abs() < 1e-12);
        assert!(fam.max_overlap_with(&v) < ORTHO_TOL);
    }

    #[test]
    fn ladder_span_certificate() {
        let v = ladder(3);
        let fam = family_2xn(&v, &alpha_samples(7), &CesOptions::default()).unwrap();
        let cert = span_certificate(&fam).unwrap();
        assert_eq!((cert.family_span_dim, cert.pc_span_dim), (4, 6));
    }

    #[test]
    fn single_sample_family() {
        let v = ladder(3);
        let mut fam = family_2xn(&v, &[c(0.5, 0.2)], &CesOptions::default()).unwrap();
        fam.samples.truncate(1);
        assert_eq!(span_certificate(&fam).unwrap().family_span_dim, 1);
        fam.samples.clear();
        assert!(span_certificate(&fam).is_err());
    }

    #[test]
    fn family_2xn_preconditions() {
        let d = BipartiteDims::new(3, 3).unwrap();
        let v = orthonormalize(&[basis_ket(&d, 0, 1)], d).unwrap();
        assert!(family_2xn(&v, &alpha_samples(3), &CesOptions::default()).is_err());
        let l = ladder(3);
        assert!(family_2xn(&l, &[c(1.0, 0.0), c(1.0, 0.0)], &CesOptions::default()).is_err());
    }

    #[test]
    fn non_ces_input_is_flagged() {
        let d = BipartiteDims::new(2, 3).unwrap();
        let v = orthonormalize(&[basis_ket(&d, 0, 0)], d).unwrap();
        let fam = family_2xn(&v, &alpha_samples(5), &CesOptions::default()).unwrap();
        assert!(!fam.certified);
        assert!(fam.max_overlap_with(&v) < ORTHO_TOL);
    }

    #[test]
    fn general_family_with_antisymmetric_pair() {
        // span{|01⟩ − |10⟩, |00⟩ + |11⟩} in 3⊗3
        let d = BipartiteDims::new(3, 3).unwrap();
        let raw = [
            basis_ket(&d, 0, 1) - basis_ket(&d, 1, 0),
            basis_ket(&d, 0, 0) + basis_ket(&d, 1, 1),
        ];
        let v = orthonormalize(&raw, d).unwrap();
        let e = chart_samples(3, 25);
        let fam = family_general(&v, &e, &CesOptions::default()).unwrap();
        assert!(fam.max_overlap_with(&v) < ORTHO_TOL);
        // every chart-0 member has the shape (1,α,β) ⊗ (−αR, R, R₁)
        for s in fam.samples.iter().filter(|s| s.chart == 0) {
            let alpha = s.pv.e[1];
            let f = &s.pv.f;
            assert!((f[0] + alpha * f[1]).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_dim_subspace_rejected() {
        let d = BipartiteDims::new(3, 3).unwrap();
        let v = Subspace::from_orthonormal(d, Vec::new());
        assert!(family_general(&v, &chart_samples(3, 4), &CesOptions::default()).is_err());
    }

    #[test]
    fn sample_counts() {
        let d = |m, n| BipartiteDims::new(m, n).unwrap();
        assert_eq!(recommended_sample_count(&d(2, 3), 2), 7);
        assert_eq!(recommended_sample_count(&d(2, 6), 5), 13);
        assert_eq!(recommended_sample_count(&d(3, 3), 2), 25);
    }

    #[test]
    fn alpha_samples_are_distinct_and_off_circle() {
        let a = alpha_samples(40);
        check_distinct(&a).unwrap();
        let radii: Vec<f64> = a.iter().skip(1).map(|z| z.norm()).collect();
        let spread = radii.iter().cloned().fold(0.0, f64::max) - radii.iter().cloned().fold(f64::MAX, f64::min);
        assert!(spread > 0.5);
    }

    #[test]
    fn harvest_finds_orthogonal_products() {
        // V = span{|01⟩+|10⟩, |02⟩+|20⟩, |12⟩+|21⟩}: symmetric-only, contains
        // no product vector, and V^⊥ contains the antisymmetric space plus
        // diagonal products like |00⟩.
        let d = BipartiteDims::new(3, 3).unwrap();
        let raw = [
            basis_ket(&d, 0, 1) + basis_ket(&d, 1, 0),
            basis_ket(&d, 0, 2) + basis_ket(&d, 2, 0),
            basis_ket(&d, 1, 2) + basis_ket(&d, 2, 1),
        ];
        let v = orthonormalize(&raw, d).unwrap();
        let fam = family_harvest(&v, &CesOptions { multistarts: 64, ..Default::default() }).unwrap();
        assert!(!fam.is_empty());
        assert!(fam.max_overlap_with(&v) < ORTHO_TOL);
        let probe = tensor(&fam.samples[0].pv.e, &fam.samples[0].pv.f);
        assert_eq!(probe.len(), 9);
    }

    #[test]
    fn companion_roots() {
        // (t − 2)(t + i)(t − 0.5) = t³ + (i − 2.5)t² + (1 − 2.5i)t + i
        let coeffs = [c(0.0, 1.0), c(1.0, -2.5), c(-2.5, 1.0), c(1.0, 0.0)];
        let mut roots = poly_roots(&coeffs);
        roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let want = [c(0.0, -1.0), c(0.5, 0.0), c(2.0, 0.0)];
        for (r, w) in roots.iter().zip(want) {
            assert!((r - w).norm() < 1e-12, "{r} vs {w}");
        }
    }

    #[test]
    fn line_refinement_resolves_double_component() {
        // det M(e) = −e₀(e₁ + e₂)²: the component e₁ + e₂ = 0 is double
        let d = BipartiteDims::new(3, 3).unwrap();
        let k = |i, j| basis_ket(&d, i, j);
        let raw = vec![k(0, 1) + k(1, 0), k(0, 2) + k(2, 0), k(1, 1) + k(1, 2) * c(2.0, 0.0) + k(2, 2)];
        let v = orthonormalize(&raw, d).unwrap();
        let alpha = c(0.3, -0.7);
        let delta = c(2e-7, 1e-7);
        let e = CVec::from_column_slice(&[c(1.0, 0.0), alpha, -alpha + delta]);
        let f = CVec::from_column_slice(&[c(1.0, 0.0), -alpha, alpha - delta]);
        let rough = ProductVector::new(e, f);
        assert!(relative_residual(v.basis(), &d, &rough) < 1e-12);
        let fine = refine_on_line(v.basis(), &d, &rough).unwrap();
        assert!((fine.e[1] + fine.e[2]).norm() / fine.e.norm() < 1e-12);
        assert!(relative_residual(v.basis(), &d, &fine) < 1e-14);
    }
}
