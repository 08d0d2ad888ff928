//! Reference instances shared by tests, benchmarks and the CLI demos.

use crate::circuit::{amplify, preprocess, reference, QmsaInstance};
use crate::qaoa::{build_qaoa, QaoaInstance, QaoaOptions};
use crate::vqa::{build_vqa, VqaInstance};

pub const DELTA: f64 = 0.5;

/// Preprocessed 0-gate core on `n_V = 2`: `L = 3`, `|D| = 4`, `g = 1`, `g′ = 2`.
pub fn vqa_reference() -> VqaInstance {
    let c = preprocess(&reference::empty(2, 1)).expect("valid");
    build_vqa(&QmsaInstance::new(c, 1, 2, 1e-3).expect("valid"), DELTA, Some(4)).expect("valid")
}

/// YES instance: the `y₁` acceptor on two proof bits, `g = 1`, `g′ = 2`, `|D| = 4`.
pub fn vqa_yes() -> VqaInstance {
    let c = preprocess(&reference::y1_acceptor(2)).expect("valid");
    build_vqa(&QmsaInstance::new(c, 1, 2, 1e-3).expect("valid"), DELTA, Some(4)).expect("valid")
}

/// NO instance: the `y₁ ∧ y₂` acceptor, `g = g′ = 1`, `|D| = 4`.
pub fn vqa_no() -> VqaInstance {
    let c = preprocess(&reference::and_acceptor(2)).expect("valid");
    build_vqa(&QmsaInstance::new(c, 1, 1, 1e-3).expect("valid"), DELTA, Some(4)).expect("valid")
}

/// QAOA reference/YES instance: the `y₁` acceptor on one proof bit,
/// preprocessed, amplified with `k = 1`, padded to `L = 4`; `|D| = 4`.
pub fn qaoa_reference_with(options: QaoaOptions) -> QaoaInstance {
    let c = amplify(&preprocess(&reference::y1_acceptor(1)).expect("valid"), 1).expect("valid");
    build_qaoa(&QmsaInstance::new(c, 1, 1, 1e-9).expect("valid"), DELTA, Some(4), options).expect("valid")
}

pub fn qaoa_reference() -> QaoaInstance {
    qaoa_reference_with(QaoaOptions::default())
}

/// NO-type instance for the rounding lemma: every string is accepted with
/// probability `ε_q = 10⁻⁶`; `g = g′ = 0`, `|D| = 2`.
pub fn qaoa_no_type() -> QaoaInstance {
    let eps = 1e-6;
    let c = amplify(&preprocess(&reference::constant_acceptor(1, eps)).expect("valid"), 1).expect("valid");
    build_qaoa(&QmsaInstance::new(c, 0, 0, eps).expect("valid"), DELTA, Some(2), QaoaOptions::default()).expect("valid")
}
