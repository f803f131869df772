//! Alternating eigenvector ascent for `max ⟨e,f|H|e,f⟩` over unit local vectors.
//!
//! With `f` fixed the objective is the quadratic form of the contracted
//! `m × m` operator `(1 ⊗ ⟨f|) H (1 ⊗ |f⟩)`, maximized exactly by its top
//! eigenvector; the same holds for `f` with `e` fixed. Each half-step therefore
//! never decreases the objective.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::random::{random_unit_vector, rng_for};
use crate::tensor::{eigh, BipartiteDims, CMat, CVec, ProductVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeesawOptions {
    pub multistarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for SeesawOptions {
    fn default() -> Self {
        Self { multistarts: 64, max_iter: 2000, seed: 0 }
    }
}

#[derive(Debug, Clone)]
pub struct SeesawRun {
    pub start: usize,
    pub value: f64,
    pub iterations: usize,
    /// Unit-norm local factors.
    pub pv: ProductVector,
}

/// `(1 ⊗ ⟨f|) H (1 ⊗ |f⟩)`.
fn contract_second(h: &CMat, dims: &BipartiteDims, f: &CVec) -> CMat {
    let (m, n) = (dims.m(), dims.n());
    CMat::from_fn(m, m, |j, jp| {
        let mut acc = Complex64::new(0.0, 0.0);
        for l in 0..n {
            let fl = f[l].conj();
            for lp in 0..n {
                acc += fl * h[(j * n + l, jp * n + lp)] * f[lp];
            }
        }
        acc
    })
}

/// `(⟨e| ⊗ 1) H (|e⟩ ⊗ 1)`.
fn contract_first(h: &CMat, dims: &BipartiteDims, e: &CVec) -> CMat {
    let (m, n) = (dims.m(), dims.n());
    CMat::from_fn(n, n, |l, lp| {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let ej = e[j].conj();
            for jp in 0..m {
                acc += ej * h[(j * n + l, jp * n + lp)] * e[jp];
            }
        }
        acc
    })
}

fn top_eigenvector(x: &CMat) -> (f64, CVec) {
    // Contractions of a Hermitian operator are Hermitian up to rounding.
    let sym = crate::tensor::hermitian_part(x);
    let (values, vectors) = eigh(&sym).expect("hermitian by construction");
    let last = values.len() - 1;
    (values[last], vectors.column(last).into_owned())
}

/// One ascent from the given starting `f`.
pub fn ascend(h: &CMat, dims: &BipartiteDims, f0: CVec, max_iter: usize) -> (f64, usize, ProductVector) {
    let mut f = f0;
    let (mut value, mut e) = top_eigenvector(&contract_second(h, dims, &f));
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let (_, f_new) = top_eigenvector(&contract_first(h, dims, &e));
        f = f_new;
        let (v_new, e_new) = top_eigenvector(&contract_second(h, dims, &f));
        e = e_new;
        let gain = v_new - value;
        value = v_new;
        if gain <= 1e-15 * value.abs().max(1.0) {
            break;
        }
    }
    (value, iterations, ProductVector::new(e, f))
}

/// Runs `opts.multistarts` independent ascents; start `k` draws its initial
/// `f` from the stream `(opts.seed, k)`. Results are in start order.
pub fn maximize_all(h: &CMat, dims: &BipartiteDims, opts: &SeesawOptions) -> Vec<SeesawRun> {
    (0..opts.multistarts.max(1))
        .into_par_iter()
        .map(|start| {
            let mut rng = rng_for(opts.seed, start as u64);
            let f0 = random_unit_vector(&mut rng, dims.n());
            let (value, iterations, pv) = ascend(h, dims, f0, opts.max_iter);
            SeesawRun { start, value, iterations, pv }
        })
        .collect()
}

/// Best run over all starts; ties go to the lowest start index.
pub fn maximize(h: &CMat, dims: &BipartiteDims, opts: &SeesawOptions) -> SeesawRun {
    maximize_all(h, dims, opts)
        .into_iter()
        .reduce(|best, run| if run.value > best.value { run } else { best })
        .expect("at least one start")
}
