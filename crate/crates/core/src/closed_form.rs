//! Closed-form exponentials of single generators.
//!
//! VQA generators satisfy `H³ = H` with `H² = Π` a known projector, so
//! `e^{iθH} = cos θ·Π + i sin θ·H + (I − Π)`. The projectors are written out
//! by hand here rather than computed from `H²`. The 3-cyclic QAOA `G_even`
//! gets its own exact form from the eigenvectors of the cycle.

use crate::dense::DenseState;
use crate::error::{Error, Result};
use crate::generator::{Family, Generator};
use crate::linalg::{identity, kron, ketbra, proj, LocalOp, Mat, C64, I, ZERO};
use crate::registers::Mode;

/// `|01⟩⟨01| + |10⟩⟨10|`.
fn hop_projector() -> Mat {
    proj("01") + proj("10")
}

/// The projector `H²` for a VQA generator of the given family and arity.
pub fn vqa_projector(family: Family, arity: usize) -> Result<Mat> {
    Ok(match family {
        Family::F => hop_projector(),
        Family::G => kron(&hop_projector(), &proj("1")),
        Family::P => kron(&identity(2), &proj("11")),
        Family::Q => kron(&identity(1 << (arity - 2)), &hop_projector()),
        f => return Err(Error::NoClosedForm(f.as_str().into())),
    })
}

/// The closed-form unitary `e^{iθΓ}` as a local operator on `Γ`'s support.
/// `frame` is the basis string an instance was conjugated by, if any.
pub fn closed_form_unitary(g: &Generator, theta: f64, frame: Option<&[bool]>) -> Result<LocalOp> {
    match (g.mode, g.family) {
        (Mode::Vqa, f @ (Family::F | Family::G | Family::P | Family::Q)) => {
            let h = g.op();
            let mut pi = LocalOp::new(h.support.clone(), vqa_projector(f, h.arity())?);
            if let Some(x) = frame {
                pi = pi.conjugate_by_x(x);
            }
            let dim = h.matrix.nrows();
            let u = &pi.matrix * C64::from(theta.cos()) + &h.matrix * (I * theta.sin()) + (identity(dim) - &pi.matrix);
            Ok(LocalOp::new(h.support.clone(), u))
        }
        (Mode::Qaoa, Family::G) if g.index.is_multiple_of(2) && frame.is_none() => Ok(LocalOp::new(g.op().support.clone(), g_even_unitary(theta))),
        (_, f) => Err(Error::NoClosedForm(format!("{}{} ({:?})", f.as_str(), g.index, g.mode))),
    }
}

/// `e^{iθG_even}` on `C_j, C_{j+1}, D₁, D₂`.
///
/// On the cycle `a = 1010 → b = 0110 → c = 1001 → a` the generator is
/// `(i/√3)(P − Pᵀ)`, whose eigenvectors are `u_k = (1, ω^k, ω^{2k})/√3` with
/// eigenvalues `(2/√3) sin(2πk/3) ∈ {0, 1, −1}`. The penalty state `0010`
/// picks up `e^{−2iθ}`; everything else is untouched.
pub fn g_even_unitary(theta: f64) -> Mat {
    let cycle = ["1010", "0110", "1001"];
    let mut u = identity(16) - proj("0010") - cycle.iter().map(|b| proj(b)).fold(Mat::zeros(16, 16), |a, b| a + b);
    u += proj("0010") * C64::from_polar(1.0, -2.0 * theta);
    let tau = 2.0 * std::f64::consts::PI / 3.0;
    for k in 0..3 {
        let lambda = 2.0 / 3f64.sqrt() * (tau * k as f64).sin();
        let phase = C64::from_polar(1.0, theta * lambda);
        let v: Vec<C64> = (0..3).map(|p| C64::from_polar(1.0 / 3f64.sqrt(), tau * (k * p) as f64)).collect();
        for (r, rb) in cycle.iter().enumerate() {
            for (col, cb) in cycle.iter().enumerate() {
                u += ketbra(rb, cb) * (phase * v[r] * v[col].conj());
            }
        }
    }
    u.iter_mut().for_each(|x| {
        if x.norm() < 1e-16 {
            *x = ZERO;
        }
    });
    u
}

pub fn evolve_closed_form(state: &DenseState, g: &Generator, theta: f64, frame: Option<&[bool]>) -> Result<DenseState> {
    let u = closed_form_unitary(g, theta, frame)?;
    let mut out = state.clone();
    out.apply_local(&u);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm_i_hermitian, is_unitary, max_abs};
    use crate::qaoa::g_even_matrix;

    #[test]
    fn g_even_matches_exponential() {
        for &theta in &[0.0, 0.3, std::f64::consts::FRAC_PI_3, 2.0, -1.7] {
            let a = g_even_unitary(theta);
            let b = expm_i_hermitian(&g_even_matrix(), theta);
            assert!(is_unitary(&a, 1e-13));
            assert!(max_abs(&(a - b)) < 1e-12);
        }
    }

    #[test]
    fn projectors_are_squares() {
        let h = kron(&crate::vqa::hop(), &proj("1"));
        assert_eq!(max_abs(&(&h * &h - vqa_projector(Family::G, 3).unwrap())), 0.0);
    }
}
