//! Register layout `A | B | C | D` and unary clock helpers.

use crate::circuit::VerifierCircuit;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Vqa,
    Qaoa,
}

/// Register sizes. Global qubits are `A₁…A_a, B₁…B_b, C₁…C_c, D₁…D_d`;
/// all accessors take 1-based register indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Registers {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
}

impl Registers {
    pub fn total(&self) -> usize {
        self.a + self.b + self.c + self.d
    }

    pub fn qa(&self, i: usize) -> usize {
        debug_assert!((1..=self.a).contains(&i));
        i - 1
    }

    pub fn qb(&self, i: usize) -> usize {
        debug_assert!((1..=self.b).contains(&i));
        self.a + i - 1
    }

    pub fn qc(&self, i: usize) -> usize {
        debug_assert!((1..=self.c).contains(&i), "C_{i} out of range");
        self.a + self.b + i - 1
    }

    pub fn qd(&self, i: usize) -> usize {
        debug_assert!((1..=self.d).contains(&i), "D_{i} out of range");
        self.a + self.b + self.c + i - 1
    }

    pub fn ab(&self) -> usize {
        self.a + self.b
    }

    /// Global index bits of the unary clock configuration `|t̃⟩_C |s̃⟩_D`.
    pub fn clock_mask(&self, t: usize, s: usize) -> usize {
        (1 << self.qc(t)) | (1 << self.qd(s))
    }

    /// Basis string (global order) of `|0,0,t̃,s̃⟩`.
    pub fn clock_string(&self, t: usize, s: usize) -> Vec<bool> {
        let mut v = vec![false; self.total()];
        v[self.qc(t)] = true;
        v[self.qd(s)] = true;
        v
    }
}

/// Maps a circuit qubit to its position inside `AB`: proof qubit `i` is
/// `A_{i+1}`, the output is `B₁`, other ancillas follow in order.
pub fn ab_position(circuit: &VerifierCircuit, q: usize) -> usize {
    if q < circuit.n_proof {
        q
    } else {
        let order = circuit.ancilla_order();
        circuit.n_proof + order.iter().position(|&a| a == q).expect("ancilla")
    }
}

pub fn vqa_registers(circuit: &VerifierCircuit, d: usize) -> Registers {
    Registers { a: circuit.n_proof, b: circuit.n_ancilla, c: circuit.len() + circuit.n_proof + 1, d }
}

pub fn qaoa_registers(circuit: &VerifierCircuit, d: usize) -> Registers {
    Registers { a: circuit.n_proof, b: circuit.n_ancilla, c: circuit.len() + 2 * circuit.n_proof + 1, d }
}

/// `⌈L^{1+δ}⌉`, at least 2.
pub fn default_d_size(l: usize, delta: f64) -> usize {
    ((l as f64).powf(1.0 + delta).ceil() as usize).max(2)
}
