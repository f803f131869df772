//! Seeded random draws. Every stream is a ChaCha8 generator keyed by an
//! explicit `(seed, stream)` pair, so results never depend on thread timing.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::tensor::{CMat, CVec};

pub type SeededRng = ChaCha8Rng;

pub fn rng_for(seed: u64, stream: u64) -> SeededRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn gaussian_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVec {
    CVec::from_fn(len, |_, _| gaussian_complex(rng))
}

/// Uniformly random unit vector.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVec {
    loop {
        let v = gaussian_vector(rng, len);
        let norm = v.norm();
        if norm > 1e-12 {
            return v / Complex64::from(norm);
        }
    }
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Random Hermitian matrix `(G + G†)/2` with Gaussian `G`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMat {
    let g = gaussian_matrix(rng, dim, dim);
    (&g + g.adjoint()) * Complex64::from(0.5)
}

/// Random unitary from the QR factors of a complex Gaussian matrix, with the
/// phases of `R`'s diagonal absorbed so the distribution is Haar.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMat {
    let qr = gaussian_matrix(rng, dim, dim).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            let mut col = q.column_mut(k);
            col *= phase;
        }
    }
    q
}

/// Random PSD operator whose support is exactly the span of `basis`
/// (assumed orthonormal): `B G G† B†` with a Gaussian `G`.
pub fn random_psd_on<R: Rng + ?Sized>(rng: &mut R, basis: &[CVec]) -> CMat {
    let k = basis.len();
    let b = crate::tensor::columns(basis);
    let g = gaussian_matrix(rng, k, k);
    let x = &b * g;
    let q = &x * x.adjoint();
    let tr = q.trace().re;
    q / Complex64::from(tr)
}
