//! Concrete subspaces, bases and operators used as worked examples.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{ProductFamily, FamilySample};
use crate::subspace::{complement, orthonormalize, Subspace};
use crate::tensor::{basis_ket, c, cvec, projector, rvec, BipartiteDims, CMat, CVec, ProductVector};

fn h2() -> BipartiteDims {
    BipartiteDims::new(3, 3).expect("valid dims")
}

/// `(|0,i⟩ − |1,i−1⟩)/√2` for `i = 1..n−1` in `C^2 ⊗ C^n`.
pub fn ladder_ces(n: usize) -> Result<Subspace> {
    if n < 2 {
        return Err(Error::InvalidDims(2, n));
    }
    let d = BipartiteDims::new(2, n)?;
    let raw: Vec<CVec> = (1..n)
        .map(|i| (basis_ket(&d, 0, i) - basis_ket(&d, 1, i - 1)) * c(FRAC_1_SQRT_2, 0.0))
        .collect();
    orthonormalize(&raw, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct V1Conditions {
    /// `a·b₂ ≠ a₂·b`: no product vector in the span.
    pub ces: bool,
    /// `(a₂ + b)² = 4·a·b₂`.
    pub discriminant: bool,
    pub b2_nonzero: bool,
}

impl V1Conditions {
    pub fn special_form(&self) -> bool {
        self.ces && self.discriminant && self.b2_nonzero
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct V1Params {
    pub a: Complex64,
    pub b: Complex64,
    pub a2: Complex64,
    pub b2: Complex64,
}

impl V1Params {
    pub fn new(a: Complex64, b: Complex64, a2: Complex64, b2: Complex64) -> Self {
        Self { a, b, a2, b2 }
    }

    pub fn real(a: f64, b: f64, a2: f64, b2: f64) -> Self {
        Self::new(c(a, 0.0), c(b, 0.0), c(a2, 0.0), c(b2, 0.0))
    }

    pub fn conditions(&self) -> V1Conditions {
        let tol = 1e-12;
        let lhs = (self.a2 + self.b) * (self.a2 + self.b);
        let rhs = self.a * self.b2 * 4.0;
        V1Conditions {
            ces: (self.a * self.b2 - self.a2 * self.b).norm() > tol,
            discriminant: (lhs - rhs).norm() <= tol * (1.0 + lhs.norm()),
            b2_nonzero: self.b2.norm() > tol,
        }
    }

    /// `λ = −(b + a₂)/(2 b₂)`.
    pub fn lambda(&self) -> Result<Complex64> {
        if self.b2.norm() <= 1e-12 {
            return Err(Error::Precondition("b2 must be nonzero".into()));
        }
        Ok(-(self.b + self.a2) / (self.b2 * 2.0))
    }
}

/// Span of `|01⟩+|10⟩`, `|02⟩+|20⟩` and `|1⟩(a|1⟩+b|2⟩) + |2⟩(a₂|1⟩+b₂|2⟩)`.
pub fn v1_subspace(p: &V1Params) -> Result<(Subspace, V1Conditions)> {
    let cond = p.conditions();
    if !cond.ces {
        return Err(Error::Precondition("a*b2 = a2*b: the span contains a product vector".into()));
    }
    let d = h2();
    let k = |i, j| basis_ket(&d, i, j);
    let raw = vec![
        k(0, 1) + k(1, 0),
        k(0, 2) + k(2, 0),
        k(1, 1) * p.a + k(1, 2) * p.b + k(2, 1) * p.a2 + k(2, 2) * p.b2,
    ];
    Ok((orthonormalize(&raw, d)?, cond))
}

/// The two closed-form product-vector families of `V₁^⊥` at the sampled `α`:
/// `(1, α, λα) ⊗ (1, −α, −λα)` and `(0, 1, α) ⊗ (0, b + b₂α, −a − a₂α)`.
pub fn v1_product_families(p: &V1Params, alphas: &[Complex64]) -> Result<ProductFamily> {
    if !p.conditions().special_form() {
        return Err(Error::Precondition("(a2+b)^2 = 4*a*b2 with b2 != 0 is required".into()));
    }
    let lambda = p.lambda()?;
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let mut samples = Vec::with_capacity(2 * alphas.len());
    for &al in alphas {
        let e = cvec(&[one, al, lambda * al]);
        let f = cvec(&[one, -al, -lambda * al]);
        samples.push(FamilySample { params: vec![al], chart: 0, pv: ProductVector::new(e, f) });
    }
    for &al in alphas {
        let e = cvec(&[zero, one, al]);
        let f = cvec(&[zero, p.b + p.b2 * al, -p.a - p.a2 * al]);
        samples.push(FamilySample { params: vec![al], chart: 1, pv: ProductVector::new(e, f) });
    }
    Ok(ProductFamily { dims: h2(), samples, certified: true })
}

/// Antisymmetric subspace of `C^3 ⊗ C^3` plus `|02⟩ + |20⟩ − |11⟩`.
pub fn v2_subspace() -> Subspace {
    let d = h2();
    let k = |i, j| basis_ket(&d, i, j);
    let raw = vec![
        k(0, 1) - k(1, 0),
        k(0, 2) - k(2, 0),
        k(1, 2) - k(2, 1),
        k(0, 2) + k(2, 0) - k(1, 1),
    ];
    orthonormalize(&raw, d).expect("independent by construction")
}

/// `(1, α, α²/2) ⊗ (1, α, α²/2)`.
pub fn v2_product_family(alphas: &[Complex64]) -> ProductFamily {
    let samples = alphas
        .iter()
        .map(|&al| {
            let x = cvec(&[c(1.0, 0.0), al, al * al * 0.5]);
            FamilySample { params: vec![al], chart: 0, pv: ProductVector::new(x.clone(), x) }
        })
        .collect();
    ProductFamily { dims: h2(), samples, certified: true }
}

/// `h± = ½√(√5 ± 1)`.
pub fn h_plus() -> f64 {
    0.5 * (5f64.sqrt() + 1.0).sqrt()
}

pub fn h_minus() -> f64 {
    0.5 * (5f64.sqrt() - 1.0).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pyramid {
    pub upb: Vec<ProductVector>,
    pub complement: Subspace,
}

/// `φᵢ ∝ cos(2πi/5)|0⟩ + sin(2πi/5)|1⟩ + h|2⟩`, normalized.
pub fn pyramid_phi(i: usize, height: f64) -> CVec {
    let t = TAU * i as f64 / 5.0;
    let norm = 1.0 / (1.0 + height * height).sqrt();
    rvec(&[t.cos(), t.sin(), height]) * c(norm, 0.0)
}

/// The five-element UPB `ψᵢ = φᵢ ⊗ φ_{2i mod 5}` and its orthocomplement.
pub fn pyramid_upb() -> Pyramid {
    pyramid_upb_with(h_plus())
}

/// Same construction with an arbitrary apex height, for perturbation checks.
pub fn pyramid_upb_with(height: f64) -> Pyramid {
    let upb: Vec<ProductVector> = (0..5)
        .map(|i| ProductVector::new(pyramid_phi(i, height), pyramid_phi((2 * i) % 5, height)))
        .collect();
    let span = orthonormalize(&upb.iter().map(|p| p.embed()).collect::<Vec<_>>(), h2())
        .expect("five independent vectors");
    Pyramid { complement: complement(&span), upb }
}

/// Explicit Schmidt-rank-2 basis of the PYRAMID complement, unnormalized, in
/// the order defining `Q(r)`. With `η = 1/(2h₊)` (numerically `h₋`):
/// `η|01⟩ + η|10⟩ + 2h₋²|21⟩`, `−η|01⟩ + η|10⟩ + 2h₋²|12⟩`,
/// `−h₋|00⟩ + 2h₋²|20⟩ + h₋|11⟩`, `h₋|00⟩ − 2h₋²|02⟩ + h₋|11⟩`.
pub fn pyramid_complement_vectors() -> Vec<CVec> {
    let d = h2();
    let k = |i, j| basis_ket(&d, i, j);
    let hm = h_minus();
    let eta = 1.0 / (2.0 * h_plus());
    let s = 2.0 * hm * hm;
    let r = |x: f64| c(x, 0.0);
    vec![
        k(0, 1) * r(eta) + k(1, 0) * r(eta) + k(2, 1) * r(s),
        -k(0, 1) * r(eta) + k(1, 0) * r(eta) + k(1, 2) * r(s),
        -k(0, 0) * r(hm) + k(2, 0) * r(s) + k(1, 1) * r(hm),
        k(0, 0) * r(hm) - k(0, 2) * r(s) + k(1, 1) * r(hm),
    ]
}

/// `Q(r) = r(P₁ + P₂) + ½(1 − 2r)(P₃ + P₄)` for `0 ≤ r ≤ ½`.
pub fn pyramid_q(r: f64) -> Result<CMat> {
    if !(0.0..=0.5).contains(&r) {
        return Err(Error::Precondition(format!("r = {r} outside [0, 1/2]")));
    }
    let p: Vec<CMat> = pyramid_complement_vectors()
        .into_iter()
        .map(|v| projector(&[v.normalize()]))
        .collect();
    let w12 = c(r, 0.0);
    let w34 = c(0.5 * (1.0 - 2.0 * r), 0.0);
    Ok((&p[0] + &p[1]) * w12 + (&p[2] + &p[3]) * w34)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{alpha_samples, span_certificate};
    use crate::subspace::{certify_ces, CesOptions};
    use crate::tensor::{min_eigenvalue, partial_transpose, schmidt};

    fn dot(a: &CVec, b: &CVec) -> Complex64 {
        (a.adjoint() * b)[(0, 0)]
    }

    #[test]
    fn ladder_three() {
        let v = ladder_ces(3).unwrap();
        assert_eq!(v.dim(), 2);
        let d = v.dims();
        let s = c(FRAC_1_SQRT_2, 0.0);
        let want0 = (basis_ket(&d, 0, 1) - basis_ket(&d, 1, 0)) * s;
        let want1 = (basis_ket(&d, 0, 2) - basis_ket(&d, 1, 1)) * s;
        assert!((v.basis()[0].clone() - want0).norm() < 1e-14);
        assert!((v.basis()[1].clone() - want1).norm() < 1e-14);
        assert!(ladder_ces(1).is_err());
        assert!(certify_ces(&ladder_ces(4).unwrap(), &CesOptions::default()).is_ces);
    }

    #[test]
    fn v1_instance() {
        let p = V1Params::real(1.0, 2.0, 0.0, 1.0);
        let (v, cond) = v1_subspace(&p).unwrap();
        assert!(cond.special_form());
        assert_eq!(p.lambda().unwrap(), c(-1.0, 0.0));
        assert_eq!(v.dim(), 3);
        assert!(certify_ces(&v, &CesOptions::default()).is_ces);
        assert!(v1_subspace(&V1Params::real(1.0, 1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn v1_families() {
        let p = V1Params::real(1.0, 2.0, 0.0, 1.0);
        let (v, _) = v1_subspace(&p).unwrap();
        let fam = v1_product_families(&p, &alpha_samples(25)).unwrap();
        let first = &fam.samples[0].pv;
        assert_eq!(first.e, rvec(&[1.0, 0.0, 0.0]));
        assert_eq!(first.f, rvec(&[1.0, 0.0, 0.0]));
        assert!(fam.max_overlap_with(&v) < 1e-9);
        let cert = span_certificate(&fam).unwrap();
        assert_eq!(cert.pc_span_dim, 7);
        // a = 1, b = 2, a₂ = 0, b₂ = 2 breaks the discriminant condition
        assert!(v1_product_families(&V1Params::real(1.0, 2.0, 0.0, 2.0), &[c(0.0, 0.0)]).is_err());
    }

    #[test]
    fn v2_family() {
        let v = v2_subspace();
        assert_eq!(v.dim(), 4);
        let fam = v2_product_family(&alpha_samples(9));
        assert!(fam.max_overlap_with(&v) < 1e-12);
        assert_eq!(span_certificate(&fam).unwrap().pc_span_dim, 9);
    }

    #[test]
    fn pyramid_orthogonality_and_constants() {
        let py = pyramid_upb();
        let n = 2.0 / (5.0 + 5f64.sqrt()).sqrt();
        assert!((pyramid_phi(0, h_plus())[0].re - n).abs() < 1e-15);
        let vs: Vec<CVec> = py.upb.iter().map(|p| p.embed()).collect();
        for i in 0..5 {
            assert!((vs[i].norm() - 1.0).abs() < 1e-14);
            for j in 0..i {
                assert!(dot(&vs[i], &vs[j]).norm() < 1e-12);
            }
        }
        assert_eq!(py.complement.dim(), 4);
        assert!((1.0 / (2.0 * h_plus()) - h_minus()).abs() < 1e-15);
        let wrong = pyramid_upb_with(h_minus());
        let w: Vec<CVec> = wrong.upb.iter().map(|p| p.embed()).collect();
        assert!(dot(&w[0], &w[1]).norm() > 1e-3);
    }

    #[test]
    fn pyramid_explicit_vectors() {
        let py = pyramid_upb();
        let explicit = pyramid_complement_vectors();
        for (i, x) in explicit.iter().enumerate() {
            assert!(py.complement.distance(&x.clone().normalize()) < 1e-12);
            assert_eq!(schmidt(x, &h2()).unwrap().schmidt_rank, 2);
            for y in &explicit[..i] {
                assert!(dot(x, y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn pyramid_q_npt_pattern() {
        let d = h2();
        let mineig = |r: f64| min_eigenvalue(&partial_transpose(&pyramid_q(r).unwrap(), &d).unwrap()).unwrap();
        for r in [0.0, 0.1, 0.4, 0.5] {
            assert!(mineig(r) < -1e-6, "r = {r}");
        }
        assert!(mineig(0.25) >= -1e-10);
        assert!((pyramid_q(0.3).unwrap().trace().re - 1.0).abs() < 1e-14);
        assert!(pyramid_q(0.6).is_err());
        assert!(pyramid_q(-0.1).is_err());
    }
}
