//! Lanczos with full reorthogonalization for the bottom of a Hermitian
//! spectrum, applied matrix-free.
//!
//! Degeneracy is detected by deflation: after the lowest pair is found, the
//! run is repeated on `H + σ|v₀⟩⟨v₀|`, so a degenerate ground space shows up
//! as a second eigenvalue equal to the first.

use crate::dense::{DenseState, Operator};
use crate::error::Result;
use crate::linalg::{C64, ZERO};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const MAX_ITERS: usize = 400;
const TOL: f64 = 1e-11;

pub struct LowSpectrum {
    pub values: [f64; 2],
    pub vector: DenseState,
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Lowest eigenpair of `apply` by Lanczos with full reorthogonalization.
fn lowest<F: Fn(&[C64]) -> Vec<C64>>(apply: F, start: Vec<C64>) -> (f64, Vec<C64>) {
    let mut basis: Vec<Vec<C64>> = Vec::new();
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let s = norm(&start);
    let mut v: Vec<C64> = start.into_iter().map(|x| x / s).collect();
    let mut last = f64::INFINITY;
    let mut result = (0.0, Vec::new());
    for it in 0..MAX_ITERS {
        let mut w = apply(&v);
        let a = dot(&v, &w).re;
        alpha.push(a);
        basis.push(v.clone());
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for b in &basis {
                let p = dot(b, &w);
                for (x, y) in w.iter_mut().zip(b) {
                    *x -= p * y;
                }
            }
        }
        let bnorm = norm(&w);
        let k = alpha.len();
        let mut t = DMatrix::<f64>::zeros(k, k);
        for i in 0..k {
            t[(i, i)] = alpha[i];
            if i + 1 < k {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let (imin, &theta) = eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap();
        let residual = bnorm * eig.eigenvectors[(k - 1, imin)].abs();
        let done = residual < TOL || bnorm < 1e-13 || (it > 10 && (theta - last).abs() < 1e-14);
        if done || it + 1 == MAX_ITERS {
            let mut vec = vec![ZERO; v.len()];
            for (j, b) in basis.iter().enumerate() {
                let c = eig.eigenvectors[(j, imin)];
                for (x, y) in vec.iter_mut().zip(b) {
                    *x += y * c;
                }
            }
            let nv = norm(&vec);
            result = (theta, vec.into_iter().map(|x| x / nv).collect());
            break;
        }
        last = theta;
        beta.push(bnorm);
        v = w.into_iter().map(|x| x / bnorm).collect();
    }
    result
}

/// The two lowest eigenvalues (with multiplicity) and the lowest eigenvector.
pub fn lowest_two(op: &Operator, n: usize, seed: u64) -> Result<LowSpectrum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = DenseState::random(n, &mut rng)?.into_amplitudes();
    let (e0, v0) = lowest(|x| op.apply(x, n), start.clone());
    let sigma = 2.0 * op.norm_bound() + 1.0;
    let shifted = |x: &[C64]| {
        let mut y = op.apply(x, n);
        let p = dot(&v0, x) * sigma;
        for (a, b) in y.iter_mut().zip(&v0) {
            *a += p * b;
        }
        y
    };
    let start2 = DenseState::random(n, &mut rng)?.into_amplitudes();
    let (e1, _) = lowest(shifted, start2);
    Ok(LowSpectrum { values: [e0, e1], vector: DenseState::from_amplitudes(n, v0)? })
}
