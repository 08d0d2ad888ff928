//! Dense statevectors, matrix-free operator action and the series oracle for
//! `exp(iθH)|ψ⟩`.

use crate::error::{Error, Result};
use crate::linalg::{LocalOp, Mat, C64, I, ONE, ZERO};
use rand::Rng;

/// Largest register the dense engine will allocate.
pub const MAX_DENSE_QUBITS: usize = 24;
/// Largest register for which a full matrix is materialized.
pub const MAX_MATERIALIZED_QUBITS: usize = 14;

/// Relative accuracy targeted by [`evolve_dense`].
pub const SERIES_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<C64>,
}

impl DenseState {
    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n > MAX_DENSE_QUBITS {
            return Err(Error::WidthOverflow { qubits: n, limit: MAX_DENSE_QUBITS });
        }
        let mut amps = vec![ZERO; 1 << n];
        amps[index] = ONE;
        Ok(DenseState { n, amps })
    }

    /// Basis state with the listed qubits set to one.
    pub fn from_ones(n: usize, ones: &[usize]) -> Result<Self> {
        Self::basis(n, ones.iter().fold(0, |acc, q| acc | (1 << q)))
    }

    pub fn from_amplitudes(n: usize, amps: Vec<C64>) -> Result<Self> {
        if n > MAX_DENSE_QUBITS {
            return Err(Error::WidthOverflow { qubits: n, limit: MAX_DENSE_QUBITS });
        }
        if amps.len() != 1 << n {
            return Err(Error::LengthMismatch { expected: 1 << n, got: amps.len() });
        }
        Ok(DenseState { n, amps })
    }

    /// Gaussian random state, normalized.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Result<Self> {
        let mut s = Self::zero(n)?;
        for a in s.amps.iter_mut() {
            *a = C64::new(gauss(rng), gauss(rng));
        }
        s.normalize();
        Ok(s)
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        for a in self.amps.iter_mut() {
            *a /= n;
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &DenseState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn max_deviation(&self, other: &DenseState) -> f64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Applies a local matrix (typically unitary) in place.
    pub fn apply_local(&mut self, op: &LocalOp) {
        apply_local_in_place(&mut self.amps, self.n, &op.support, &op.matrix);
    }

    pub fn apply_matrix(&mut self, support: &[usize], matrix: &Mat) {
        apply_local_in_place(&mut self.amps, self.n, support, matrix);
    }

    /// `⟨ψ|H|ψ⟩` for a Hermitian operator.
    pub fn expectation(&self, op: &Operator) -> f64 {
        let h = op.apply(&self.amps, self.n);
        self.amps.iter().zip(&h).map(|(a, b)| a.conj() * b).sum::<C64>().re
    }

    /// Probability that all listed qubits read one.
    pub fn prob_ones(&self, qubits: &[usize]) -> f64 {
        let mask = qubits.iter().fold(0usize, |m, q| m | (1 << q));
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == mask)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

fn gauss<R: Rng>(rng: &mut R) -> f64 {
    // Box–Muller; only used for test states.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Offsets of the local basis states inside a global index, big-endian over
/// `support`.
fn local_offsets(support: &[usize]) -> Vec<usize> {
    let k = support.len();
    (0..1usize << k)
        .map(|r| {
            (0..k).fold(0, |acc, i| if (r >> (k - 1 - i)) & 1 == 1 { acc | (1 << support[i]) } else { acc })
        })
        .collect()
}

/// Enumerates all global indices with zeros on `support`.
fn bases(n: usize, support: &[usize]) -> impl Iterator<Item = usize> {
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    let count = 1usize << (n - support.len());
    (0..count).map(move |mut b| {
        for &p in &sorted {
            b = ((b >> p) << (p + 1)) | (b & ((1 << p) - 1));
        }
        b
    })
}

fn apply_local_in_place(amps: &mut [C64], n: usize, support: &[usize], m: &Mat) {
    let offs = local_offsets(support);
    let dim = offs.len();
    let mut buf = vec![ZERO; dim];
    for b in bases(n, support) {
        for (j, o) in offs.iter().enumerate() {
            buf[j] = amps[b | o];
        }
        for r in 0..dim {
            let mut acc = ZERO;
            for j in 0..dim {
                acc += m[(r, j)] * buf[j];
            }
            amps[b | offs[r]] = acc;
        }
    }
}

/// Adds `w · op · input` to `out`, using only the non-zero entries of `op`.
fn add_local_action(out: &mut [C64], input: &[C64], n: usize, w: f64, op: &LocalOp, entries: &[(usize, usize, C64)]) {
    let offs = local_offsets(&op.support);
    for b in bases(n, &op.support) {
        for &(r, col, v) in entries {
            out[b | offs[r]] += v * w * input[b | offs[col]];
        }
    }
}

/// A real-weighted sum of local Hermitian terms, applied matrix-free.
#[derive(Debug, Clone, Default)]
pub struct Operator {
    terms: Vec<(f64, LocalOp)>,
    entries: Vec<Vec<(usize, usize, C64)>>,
}

impl Operator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (f64, LocalOp)>) -> Self {
        let mut op = Self::new();
        for (w, t) in terms {
            op.push(w, t);
        }
        op
    }

    pub fn push(&mut self, weight: f64, term: LocalOp) {
        self.entries.push(term.entries());
        self.terms.push((weight, term));
    }

    pub fn terms(&self) -> &[(f64, LocalOp)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `H·input` summed in term order (deterministic).
    pub fn apply(&self, input: &[C64], n: usize) -> Vec<C64> {
        let mut out = vec![ZERO; input.len()];
        for ((w, t), e) in self.terms.iter().zip(&self.entries) {
            add_local_action(&mut out, input, n, *w, t, e);
        }
        out
    }

    /// Upper bound on ‖H‖₂ from per-term row sums.
    pub fn norm_bound(&self) -> f64 {
        self.terms.iter().map(|(w, t)| w.abs() * crate::linalg::row_sum_norm(&t.matrix)).sum()
    }

    /// Full matrix; refused above [`MAX_MATERIALIZED_QUBITS`].
    pub fn to_matrix(&self, n: usize) -> Result<Mat> {
        if n > MAX_MATERIALIZED_QUBITS {
            return Err(Error::WidthOverflow { qubits: n, limit: MAX_MATERIALIZED_QUBITS });
        }
        let dim = 1 << n;
        let mut m = Mat::zeros(dim, dim);
        let mut e = vec![ZERO; dim];
        for col in 0..dim {
            e[col] = ONE;
            let v = self.apply(&e, n);
            for r in 0..dim {
                m[(r, col)] = v[r];
            }
            e[col] = ZERO;
        }
        Ok(m)
    }
}

/// Picks the number of scaling steps and the series degree so that the
/// remainder bound `x^{d+1}/(d+1)! · e^x` per step stays below `tol/steps`.
fn series_plan(x: f64, tol: f64) -> (usize, usize) {
    let steps = x.ceil().max(1.0) as usize;
    let r = x / steps as f64;
    let target = tol / steps as f64;
    let mut term = 1.0;
    let mut d = 0;
    loop {
        d += 1;
        term *= r / d as f64;
        // term = r^d/d!; remainder after degree d is bounded by term·r/(d+1)·e^r
        if term * r / (d + 1) as f64 * r.exp() <= target || r == 0.0 {
            break;
        }
        assert!(d < 200, "series did not converge");
    }
    (steps, d)
}

/// `exp(iθH)|ψ⟩` by a truncated Taylor series with scaling. The degree is
/// chosen up front from the term-norm bound of `H`.
pub fn evolve_dense(state: &DenseState, op: &Operator, theta: f64) -> DenseState {
    let n = state.qubits();
    let x = theta.abs() * op.norm_bound();
    if x == 0.0 {
        return state.clone();
    }
    let (steps, degree) = series_plan(x, SERIES_TOL);
    let tau = theta / steps as f64;
    let mut v = state.amps.clone();
    for _ in 0..steps {
        let mut acc = v.clone();
        let mut term = v;
        for k in 1..=degree {
            let h = op.apply(&term, n);
            let f = I * (tau / k as f64);
            term = h.into_iter().map(|z| z * f).collect();
            for (a, t) in acc.iter_mut().zip(&term) {
                *a += t;
            }
        }
        v = acc;
    }
    DenseState { n, amps: v }
}
