//! Reduction compiler from monotone minimum-satisfying-assignment verifier
//! circuits to minimum-depth variational (VQA) and QAOA instances, with
//! exact simulators and brute-force lemma checkers.

pub mod checker;
pub mod circuit;
pub mod closed_form;
pub mod dense;
pub mod error;
pub mod fixtures;
pub mod generator;
pub mod io;
pub mod lanczos;
pub mod linalg;
pub mod logical;
pub mod prover;
pub mod qaoa;
pub mod registers;
pub mod schedule;
pub mod vqa;

pub use circuit::{amplify, preprocess, Gate, QmsaInstance, VerifierCircuit};
pub use dense::{DenseState, Operator};
pub use error::{Error, Result};
pub use generator::{Family, Generator};
pub use io::Instance;
pub use logical::{LogicalIndex, LogicalState};
pub use prover::HonestPlan;
pub use qaoa::{build_qaoa, Ham, QaoaInstance, QaoaOptions, Semantics};
pub use registers::{Mode, Registers};
pub use schedule::{Engine, Schedule, Step};
pub use vqa::{build_vqa, VqaInstance};
