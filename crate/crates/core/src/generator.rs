//! Labeled local Hermitian generators.

use crate::dense::Operator;
use crate::linalg::{is_hermitian, union_support, LocalOp};
use crate::registers::Mode;
use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    F,
    G,
    P,
    Q,
    H0,
    M,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::F => "F",
            Family::G => "G",
            Family::P => "P",
            Family::Q => "Q",
            Family::H0 => "H0",
            Family::M => "M",
        }
    }
}

/// A generator: family, family-local index and one or more local terms.
///
/// Every generator except `H₀` is a single local term; `H₀` is a sum of
/// 2-local projectors and is stored as such.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    pub family: Family,
    pub index: usize,
    pub mode: Mode,
    pub terms: Vec<LocalOp>,
}

impl Generator {
    pub fn new(family: Family, index: usize, mode: Mode, term: LocalOp) -> Self {
        Generator { family, index, mode, terms: vec![term] }
    }

    pub fn label(&self) -> String {
        match self.family {
            Family::H0 | Family::M => self.family.as_str().to_string(),
            f => format!("{}{}", f.as_str(), self.index),
        }
    }

    /// The single local term; panics for composite generators.
    pub fn op(&self) -> &LocalOp {
        assert_eq!(self.terms.len(), 1, "{} is composite", self.label());
        &self.terms[0]
    }

    pub fn support(&self) -> Vec<usize> {
        union_support(&self.terms)
    }

    /// Largest support among the terms (the locality).
    pub fn locality(&self) -> usize {
        self.terms.iter().map(|t| t.arity()).max().unwrap_or(0)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.iter().all(|t| is_hermitian(&t.matrix, tol))
    }

    pub fn weighted(&self, w: f64) -> Vec<(f64, &LocalOp)> {
        self.terms.iter().map(|t| (w, t)).collect()
    }

    pub fn to_operator(&self, w: f64) -> Operator {
        Operator::from_terms(self.terms.iter().map(|t| (w, t.clone())))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Sum of weighted generators as one operator, in the given order.
pub fn sum_operator<'a>(gens: impl IntoIterator<Item = (f64, &'a Generator)>) -> Operator {
    let mut op = Operator::new();
    for (w, g) in gens {
        for t in &g.terms {
            op.push(w, t.clone());
        }
    }
    op
}
