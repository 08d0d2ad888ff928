//! Small dense complex matrices and local operators.
//!
//! Local matrices use the big-endian convention over their support: for a
//! support `(q_0, …, q_{k-1})` the local basis index is `Σ b_i 2^{k-1-i}`, so
//! `|01⟩` on `(q_0, q_1)` means `q_0 = 0, q_1 = 1`. Global state indices are
//! little-endian: qubit `q` is bit `q` of the amplitude index.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(dim: usize) -> Mat {
    Mat::identity(dim, dim)
}

pub fn zeros(dim: usize) -> Mat {
    Mat::zeros(dim, dim)
}

/// Parses a bit string such as `"0110"` into a big-endian local index.
pub fn bits_index(bits: &str) -> usize {
    bits.chars().fold(0, |acc, ch| {
        (acc << 1)
            | match ch {
                '0' => 0,
                '1' => 1,
                _ => panic!("bad bit {ch:?} in {bits:?}"),
            }
    })
}

/// `|ket⟩⟨bra|` on `ket.len()` qubits.
pub fn ketbra(ket: &str, bra: &str) -> Mat {
    assert_eq!(ket.len(), bra.len());
    let mut m = zeros(1 << ket.len());
    m[(bits_index(ket), bits_index(bra))] = ONE;
    m
}

pub fn proj(bits: &str) -> Mat {
    ketbra(bits, bits)
}

pub fn pauli_x() -> Mat {
    Mat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

/// CNOT with the first qubit as control.
pub fn cnot() -> Mat {
    let mut m = zeros(4);
    m[(0, 0)] = ONE;
    m[(1, 1)] = ONE;
    m[(2, 3)] = ONE;
    m[(3, 2)] = ONE;
    m
}

/// √X, so that `sqrt_x()² = X`.
pub fn sqrt_x() -> Mat {
    let a = c(0.5, 0.5);
    let b = c(0.5, -0.5);
    Mat::from_row_slice(2, 2, &[a, b, b, a])
}

/// Controlled version of a single-qubit unitary, control first.
pub fn controlled(u: &Mat) -> Mat {
    assert_eq!(u.nrows(), 2);
    let mut m = identity(4);
    for r in 0..2 {
        for col in 0..2 {
            m[(2 + r, 2 + col)] = u[(r, col)];
        }
    }
    m
}

pub fn ry(angle: f64) -> Mat {
    let (s, co) = (angle / 2.0).sin_cos();
    Mat::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_unitary(m: &Mat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m.adjoint() * m - identity(m.nrows()))) <= tol
}

pub fn is_hermitian(m: &Mat, tol: f64) -> bool {
    m.is_square() && max_abs(&(m - m.adjoint())) <= tol
}

/// Upper bound on the spectral norm of a Hermitian matrix (max row sum).
pub fn row_sum_norm(m: &Mat) -> f64 {
    (0..m.nrows())
        .map(|r| m.row(r).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(iθH)` for a small Hermitian matrix via its eigendecomposition.
pub fn expm_i_hermitian(h: &Mat, theta: f64) -> Mat {
    let n = h.nrows();
    if n == 1 {
        let v = h[(0, 0)].re;
        return Mat::from_element(1, 1, C64::from_polar(1.0, theta * v));
    }
    let eig = h.clone().symmetric_eigen();
    let mut out = zeros(n);
    for k in 0..n {
        let phase = C64::from_polar(1.0, theta * eig.eigenvalues[k]);
        let v = eig.eigenvectors.column(k);
        out += (v * v.adjoint()) * phase;
    }
    out
}

/// Hermitian eigenvalues in ascending order.
pub fn hermitian_eigenvalues(h: &Mat) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// A matrix acting on an ordered tuple of global qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOp {
    pub support: Vec<usize>,
    pub matrix: Mat,
}

impl LocalOp {
    pub fn new(support: Vec<usize>, matrix: Mat) -> Self {
        assert_eq!(matrix.nrows(), 1 << support.len(), "matrix/support size mismatch");
        assert!(matrix.is_square());
        debug_assert!(
            {
                let mut s = support.clone();
                s.sort_unstable();
                s.windows(2).all(|w| w[0] != w[1])
            },
            "repeated qubit in support"
        );
        LocalOp { support, matrix }
    }

    pub fn arity(&self) -> usize {
        self.support.len()
    }

    /// Non-zero entries as `(row, col, value)`.
    pub fn entries(&self) -> Vec<(usize, usize, C64)> {
        let n = self.matrix.nrows();
        let mut out = Vec::new();
        for r in 0..n {
            for col in 0..n {
                let v = self.matrix[(r, col)];
                if v != ZERO {
                    out.push((r, col, v));
                }
            }
        }
        out
    }

    /// The matrix re-expressed on a larger ordered support.
    pub fn embed(&self, support: &[usize]) -> Mat {
        let k = support.len();
        let pos: Vec<usize> = self
            .support
            .iter()
            .map(|q| support.iter().position(|p| p == q).expect("support not contained"))
            .collect();
        let local = |full: usize| -> usize {
            pos.iter().fold(0, |acc, &p| (acc << 1) | ((full >> (k - 1 - p)) & 1))
        };
        let rest_mask: usize = {
            let mut m = (1usize << k) - 1;
            for &p in &pos {
                m &= !(1 << (k - 1 - p));
            }
            m
        };
        let dim = 1 << k;
        let mut out = zeros(dim);
        for r in 0..dim {
            for col in 0..dim {
                if r & rest_mask != col & rest_mask {
                    continue;
                }
                out[(r, col)] = self.matrix[(local(r), local(col))];
            }
        }
        out
    }

    /// Conjugation by X on each support qubit whose flag is set.
    pub fn conjugate_by_x(&self, flip: &[bool]) -> LocalOp {
        let k = self.arity();
        let mask = self
            .support
            .iter()
            .enumerate()
            .filter(|(_, q)| flip[**q])
            .fold(0usize, |m, (i, _)| m | (1 << (k - 1 - i)));
        let dim = 1 << k;
        let mut out = zeros(dim);
        for r in 0..dim {
            for col in 0..dim {
                out[(r, col)] = self.matrix[(r ^ mask, col ^ mask)];
            }
        }
        LocalOp::new(self.support.clone(), out)
    }
}

/// Sorted union of several supports.
pub fn union_support<'a>(ops: impl IntoIterator<Item = &'a LocalOp>) -> Vec<usize> {
    let mut s: Vec<usize> = ops.into_iter().flat_map(|o| o.support.iter().copied()).collect();
    s.sort_unstable();
    s.dedup();
    s
}

/// Matrix of a weighted sum of local operators on their joint support.
pub fn sum_on(ops: &[(f64, &LocalOp)], support: &[usize]) -> Mat {
    let mut m = zeros(1 << support.len());
    for (w, op) in ops {
        m += op.embed(support) * C64::from(*w);
    }
    m
}

/// Frobenius norm of `[A, B]` where `A` and `B` are sums of local terms.
///
/// The commutator is computed exactly on the union of supports, which is
/// enough: identity factors elsewhere do not change it beyond a tensor factor.
pub fn commutator_norm(a: &[(f64, &LocalOp)], b: &[(f64, &LocalOp)]) -> f64 {
    let support = union_support(a.iter().chain(b).map(|(_, o)| *o));
    let ma = sum_on(a, &support);
    let mb = sum_on(b, &support);
    frobenius(&(&ma * &mb - &mb * &ma))
}

pub fn ceil_log2(n: usize) -> u32 {
    if n <= 1 {
        0
    } else {
        usize::BITS - (n - 1).leading_zeros()
    }
}

/// Number of binary digits of `x` (at least one).
pub fn bit_length(x: u64) -> u64 {
    (u64::BITS - x.leading_zeros()).max(1) as u64
}

pub fn popcount(y: u64) -> usize {
    y.count_ones() as usize
}

/// Parses a little-endian proof string such as `"10"` (`y₁ = 1`).
pub fn parse_bits(s: &str) -> Option<u64> {
    if s.len() > 64 {
        return None;
    }
    s.chars().enumerate().try_fold(0u64, |acc, (i, ch)| match ch {
        '0' => Some(acc),
        '1' => Some(acc | (1 << i)),
        _ => None,
    })
}

pub fn format_bits(y: u64, n: usize) -> String {
    (0..n).map(|i| if (y >> i) & 1 == 1 { '1' } else { '0' }).collect()
}
