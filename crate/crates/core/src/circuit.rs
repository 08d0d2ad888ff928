//! Verifier circuits: preprocessing into read-only/delayed-output form,
//! parallel amplification with a majority vote, and brute-force acceptance.

use crate::dense::{DenseState, MAX_DENSE_QUBITS};
use crate::error::{Error, Result};
use crate::linalg::{self, ceil_log2, cnot, controlled, is_unitary, max_abs, sqrt_x, Mat};
use serde::{Deserialize, Serialize};

const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub targets: Vec<usize>,
    pub matrix: Mat,
}

impl Gate {
    pub fn new(targets: Vec<usize>, matrix: Mat) -> Self {
        Gate { targets, matrix }
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Gate::new(vec![control, target], cnot())
    }

    pub fn single(q: usize, m: Mat) -> Self {
        Gate::new(vec![q], m)
    }

    pub fn identity(q: usize) -> Self {
        Gate::new(vec![q], linalg::identity(2))
    }

    fn check(&self, index: usize, width: usize) -> Result<()> {
        let bad = |reason: String| Err(Error::InvalidGate { index, reason });
        match self.targets.len() {
            1 | 2 => {}
            k => return bad(format!("{k}-qubit gate; only 1- and 2-qubit gates are allowed")),
        }
        if self.targets.len() == 2 && self.targets[0] == self.targets[1] {
            return bad("repeated target".into());
        }
        if let Some(q) = self.targets.iter().find(|&&q| q >= width) {
            return bad(format!("target {q} outside width {width}"));
        }
        let dim = 1 << self.targets.len();
        if self.matrix.nrows() != dim || self.matrix.ncols() != dim {
            return bad(format!("matrix is {}x{}, expected {dim}x{dim}", self.matrix.nrows(), self.matrix.ncols()));
        }
        if !is_unitary(&self.matrix, UNITARY_TOL) {
            return bad("matrix is not unitary".into());
        }
        Ok(())
    }

    /// Whether the matrix is block-diagonal in the basis of target `pos`.
    fn preserves_basis_of(&self, pos: usize) -> bool {
        let k = self.targets.len();
        let bit = 1 << (k - 1 - pos);
        let dim = 1 << k;
        (0..dim).all(|r| (0..dim).all(|col| (r & bit) == (col & bit) || self.matrix[(r, col)].norm() <= UNITARY_TOL))
    }

    pub fn local_op(&self) -> linalg::LocalOp {
        linalg::LocalOp::new(self.targets.clone(), self.matrix.clone())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssumptionFlags {
    pub read_only_proof: bool,
    pub delayed_output: bool,
    pub amplified: bool,
}

/// Sizes of the circuit before preprocessing: `(L′, n_V′, m_V′)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSizes {
    pub gates: usize,
    pub n_proof: usize,
    pub n_ancilla: usize,
}

/// Record of an amplification step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Amplification {
    pub k: usize,
    /// Gates spent on the majority vote (including the final output CNOT).
    pub majority_gates: usize,
    /// Gate count of the circuit that was repeated.
    pub base_gates: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifierCircuit {
    pub n_proof: usize,
    pub n_ancilla: usize,
    pub gates: Vec<Gate>,
    pub output_qubit: usize,
    pub flags: AssumptionFlags,
    pub source: Option<SourceSizes>,
    pub amplification: Option<Amplification>,
    /// Set when an identity gate was inserted to make `L` even.
    pub padded: bool,
}

impl VerifierCircuit {
    /// Builds and validates a circuit with all assumption flags cleared.
    pub fn new(n_proof: usize, n_ancilla: usize, gates: Vec<Gate>, output_qubit: usize) -> Result<Self> {
        let c = VerifierCircuit {
            n_proof,
            n_ancilla,
            gates,
            output_qubit,
            flags: AssumptionFlags::default(),
            source: None,
            amplification: None,
            padded: false,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn width(&self) -> usize {
        self.n_proof + self.n_ancilla
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_ancilla == 0 {
            return Err(Error::InvalidCircuit("at least one ancilla (the output) is required".into()));
        }
        if self.output_qubit < self.n_proof || self.output_qubit >= self.width() {
            return Err(Error::InvalidCircuit(format!("output qubit {} is not an ancilla", self.output_qubit)));
        }
        for (i, g) in self.gates.iter().enumerate() {
            g.check(i, self.width())?;
        }
        if self.flags.read_only_proof && !self.reads_proof_only() {
            return Err(Error::InvalidCircuit("read_only_proof set but a gate writes the proof register".into()));
        }
        if self.flags.delayed_output && !self.output_is_delayed() {
            return Err(Error::InvalidCircuit("delayed_output set but the output is touched early".into()));
        }
        Ok(())
    }

    /// Every gate touching a proof qubit is block-diagonal in its basis.
    pub fn reads_proof_only(&self) -> bool {
        self.gates.iter().all(|g| {
            g.targets.iter().enumerate().all(|(pos, &q)| q >= self.n_proof || g.preserves_basis_of(pos))
        })
    }

    /// Only the final gate touches the output qubit.
    pub fn output_is_delayed(&self) -> bool {
        let n = self.gates.len();
        self.gates.iter().enumerate().all(|(i, g)| i + 1 == n || !g.targets.contains(&self.output_qubit))
    }

    /// Ancilla qubits with the output first, then the rest ascending. This is
    /// the order of register `B`, so `B₁` is always the output.
    pub fn ancilla_order(&self) -> Vec<usize> {
        std::iter::once(self.output_qubit)
            .chain((self.n_proof..self.width()).filter(|&q| q != self.output_qubit))
            .collect()
    }

    /// Encoding size: `c₀` bits per gate matrix plus two index fields.
    pub fn encoding_size(&self) -> u64 {
        let idx = ceil_log2(self.width()).max(1) as u64;
        self.gates.len() as u64 * (ENCODING_C0 + 2 * idx)
    }
}

/// Bits charged for one local matrix in encoding-size accounting.
pub const ENCODING_C0: u64 = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct QmsaInstance {
    pub circuit: VerifierCircuit,
    pub g: usize,
    pub g_prime: usize,
    pub epsilon_q: f64,
}

impl QmsaInstance {
    pub fn new(circuit: VerifierCircuit, g: usize, g_prime: usize, epsilon_q: f64) -> Result<Self> {
        if g > g_prime || g_prime > circuit.n_proof {
            return Err(Error::InvalidInstance(format!(
                "need 0 <= g <= g' <= n_proof, got g={g}, g'={g_prime}, n_proof={}",
                circuit.n_proof
            )));
        }
        if !(epsilon_q > 0.0 && epsilon_q < 0.5) {
            return Err(Error::InvalidInstance(format!("epsilon_q must lie in (0, 1/2), got {epsilon_q}")));
        }
        Ok(QmsaInstance { circuit, g, g_prime, epsilon_q })
    }
}

/// Establishes the read-only-proof and delayed-output assumptions.
///
/// New ancilla layout: the fresh output first, then the original ancillas,
/// then one copy per proof qubit. The original gates act on the copies.
pub fn preprocess(circuit: &VerifierCircuit) -> Result<VerifierCircuit> {
    circuit.validate()?;
    if circuit.flags.read_only_proof && circuit.flags.delayed_output {
        return Ok(circuit.clone());
    }
    let n = circuit.n_proof;
    let m = circuit.n_ancilla;
    let out = n;
    let remap = |q: usize| if q < n { n + 1 + m + q } else { n + 1 + (q - n) };

    let mut gates: Vec<Gate> = (0..n).map(|i| Gate::cnot(i, remap(i))).collect();
    gates.extend(circuit.gates.iter().map(|g| Gate::new(g.targets.iter().map(|&q| remap(q)).collect(), g.matrix.clone())));
    gates.push(Gate::cnot(remap(circuit.output_qubit), out));

    let c = VerifierCircuit {
        n_proof: n,
        n_ancilla: m + n + 1,
        gates,
        output_qubit: out,
        flags: AssumptionFlags { read_only_proof: true, delayed_output: true, amplified: circuit.flags.amplified },
        source: Some(SourceSizes { gates: circuit.len(), n_proof: n, n_ancilla: m }),
        amplification: None,
        padded: false,
    };
    c.validate()?;
    Ok(c)
}

/// Toffoli as five two-qubit gates (controlled-√X construction). The second
/// control is flipped and restored in the middle.
pub fn toffoli_gates(a: usize, b: usize, t: usize) -> [Gate; 5] {
    let v = sqrt_x();
    let cv = controlled(&v);
    let cvd = controlled(&v.adjoint());
    [
        Gate::new(vec![b, t], cv.clone()),
        Gate::cnot(a, b),
        Gate::new(vec![b, t], cvd),
        Gate::cnot(a, b),
        Gate::new(vec![a, t], cv),
    ]
}

/// Gates used by the majority vote over `k` bits (threshold `(k+1)/2`).
pub fn majority_gate_count(k: usize) -> usize {
    if k <= 1 {
        return 0;
    }
    let t = k.div_ceil(2);
    // first step: one CNOT; later steps: level 1 costs 2 CNOT + 1 Toffoli,
    // higher levels 1 CNOT + 2 Toffoli; final output CNOT.
    1 + (k - 1) * (7 + 11 * (t - 1)) + 1
}

/// Majority vote of `inputs` onto `output` using a unary counter.
///
/// Each input bit gets a fresh thermometer register `w` of `T = (k+1)/2`
/// qubits computed from the previous one `u` as
/// `w_j = u_j ⊕ b·(u_{j-1} ⊕ u_j)` (with `u_0 = 1`), i.e. "count ≥ j".
fn majority_gates(inputs: &[usize], registers: &[Vec<usize>], output: usize) -> Vec<Gate> {
    let k = inputs.len();
    let t = k.div_ceil(2);
    let mut gates = vec![Gate::cnot(inputs[0], registers[0][0])];
    for i in 1..k {
        let (u, w, b) = (&registers[i - 1], &registers[i], inputs[i]);
        for j in 0..t {
            gates.push(Gate::cnot(u[j], w[j]));
            if j == 0 {
                gates.push(Gate::cnot(b, w[0]));
            } else {
                gates.extend(toffoli_gates(b, u[j - 1], w[j]));
            }
            gates.extend(toffoli_gates(b, u[j], w[j]));
        }
    }
    gates.push(Gate::cnot(registers[k - 1][t - 1], output));
    gates
}

/// `k` parallel copies sharing the (read-only) proof register, then a
/// majority vote onto a fresh output.
///
/// Layout: proof, new output, `k` ancilla blocks, `k` counter registers.
pub fn amplify(circuit: &VerifierCircuit, k: usize) -> Result<VerifierCircuit> {
    if k.is_multiple_of(2) {
        return Err(Error::EvenRepetition(k));
    }
    if !(circuit.flags.read_only_proof && circuit.flags.delayed_output) {
        return Err(Error::NotPreprocessed);
    }
    if k == 1 {
        let mut c = circuit.clone();
        c.flags.amplified = true;
        c.amplification = Some(Amplification { k: 1, majority_gates: 0, base_gates: circuit.len() });
        return Ok(c);
    }
    let n = circuit.n_proof;
    let m = circuit.n_ancilla;
    let t = k.div_ceil(2);
    let out = n;
    let block = |b: usize, q: usize| if q < n { q } else { n + 1 + b * m + (q - n) };

    let mut gates = Vec::new();
    for b in 0..k {
        gates.extend(circuit.gates.iter().map(|g| Gate::new(g.targets.iter().map(|&q| block(b, q)).collect(), g.matrix.clone())));
    }
    let counter_base = n + 1 + k * m;
    let registers: Vec<Vec<usize>> = (0..k).map(|r| (0..t).map(|j| counter_base + r * t + j).collect()).collect();
    let inputs: Vec<usize> = (0..k).map(|b| block(b, circuit.output_qubit)).collect();
    let maj = majority_gates(&inputs, &registers, out);
    debug_assert_eq!(maj.len(), majority_gate_count(k));
    let majority = maj.len();
    gates.extend(maj);

    let c = VerifierCircuit {
        n_proof: n,
        n_ancilla: 1 + k * m + k * t,
        gates,
        output_qubit: out,
        flags: AssumptionFlags { read_only_proof: true, delayed_output: true, amplified: true },
        source: circuit.source,
        amplification: Some(Amplification { k, majority_gates: majority, base_gates: circuit.len() }),
        padded: circuit.padded,
    };
    c.validate()?;
    Ok(c)
}

/// Inserts an identity gate before the final gate so that `L` becomes even.
/// The delayed-output property is kept because the output gate stays last.
pub fn pad_to_even(circuit: &VerifierCircuit) -> VerifierCircuit {
    let mut c = circuit.clone();
    if c.len() % 2 == 1 {
        let q = (c.n_proof..c.width()).find(|&q| q != c.output_qubit).unwrap_or(0);
        let at = c.len().saturating_sub(1);
        c.gates.insert(at, Gate::identity(q));
        c.padded = true;
    }
    c
}

/// Runs the circuit on `|y, 0⟩` and returns the final dense state.
pub fn run(circuit: &VerifierCircuit, y: u64) -> Result<DenseState> {
    let w = circuit.width();
    if w > MAX_DENSE_QUBITS {
        return Err(Error::WidthOverflow { qubits: w, limit: MAX_DENSE_QUBITS });
    }
    let mask = if circuit.n_proof == 64 { u64::MAX } else { (1u64 << circuit.n_proof) - 1 };
    let mut s = DenseState::basis(w, (y & mask) as usize)?;
    for g in &circuit.gates {
        s.apply_matrix(&g.targets, &g.matrix);
    }
    Ok(s)
}

/// `⟨y,0|V†|1⟩⟨1|_out V|y,0⟩`.
pub fn accept_probability(circuit: &VerifierCircuit, y: u64) -> Result<f64> {
    Ok(run(circuit, y)?.prob_ones(&[circuit.output_qubit]))
}

/// Smallest Hamming weight among strings accepted with at least `threshold`.
pub fn min_satisfying_weight(qmsa: &QmsaInstance, threshold: f64) -> Result<Option<usize>> {
    let n = qmsa.circuit.n_proof;
    if n > 12 {
        return Err(Error::WidthOverflow { qubits: n, limit: 12 });
    }
    let mut best: Option<usize> = None;
    for y in 0..(1u64 << n) {
        let w = y.count_ones() as usize;
        if best.is_some_and(|b| w >= b) {
            continue;
        }
        if accept_probability(&qmsa.circuit, y)? >= threshold {
            best = Some(w);
        }
    }
    Ok(best)
}

/// `Σ_{j>k/2} C(k,j) p^j (1-p)^{k-j}`.
pub fn majority_probability(p: f64, k: usize) -> f64 {
    let mut total = 0.0;
    let mut binom = 1.0f64;
    for j in 0..=k {
        if j > 0 {
            binom = binom * (k - j + 1) as f64 / j as f64;
        }
        if 2 * j > k {
            total += binom * p.powi(j as i32) * (1.0 - p).powi((k - j) as i32);
        }
    }
    total
}

/// Largest deviation of a gate matrix from unitarity; handy in diagnostics.
pub fn unitarity_defect(g: &Gate) -> f64 {
    max_abs(&(g.matrix.adjoint() * &g.matrix - linalg::identity(g.matrix.nrows())))
}

/// Small circuits used throughout tests, benchmarks and the CLI demos.
pub mod reference {
    use super::*;

    /// No gates: rejects everything.
    pub fn empty(n_proof: usize, n_ancilla: usize) -> VerifierCircuit {
        VerifierCircuit::new(n_proof, n_ancilla, vec![], n_proof).expect("valid")
    }

    /// One CNOT from proof qubit 1 onto the output: accepts iff `y₁ = 1`.
    pub fn y1_acceptor(n_proof: usize) -> VerifierCircuit {
        VerifierCircuit::new(n_proof, 1, vec![Gate::cnot(0, n_proof)], n_proof).expect("valid")
    }

    /// Accepts iff `y₁ = y₂ = 1`, with the Toffoli spelled out in two-qubit
    /// gates (it writes proof qubit 2 temporarily, so preprocessing matters).
    pub fn and_acceptor(n_proof: usize) -> VerifierCircuit {
        assert!(n_proof >= 2);
        VerifierCircuit::new(n_proof, 1, toffoli_gates(0, 1, n_proof).to_vec(), n_proof).expect("valid")
    }

    /// Accepts iff `y₁ ∨ y₂`.
    pub fn or_acceptor(n_proof: usize) -> VerifierCircuit {
        assert!(n_proof >= 2);
        let x = linalg::pauli_x();
        let mut gates = vec![Gate::single(0, x.clone()), Gate::single(1, x.clone())];
        gates.extend(toffoli_gates(0, 1, n_proof));
        gates.extend([Gate::single(0, x.clone()), Gate::single(1, x.clone()), Gate::single(n_proof, x)]);
        VerifierCircuit::new(n_proof, 1, gates, n_proof).expect("valid")
    }

    /// Rotates the output so every string is accepted with probability `p`.
    pub fn constant_acceptor(n_proof: usize, p: f64) -> VerifierCircuit {
        let angle = 2.0 * p.sqrt().asin();
        VerifierCircuit::new(n_proof, 1, vec![Gate::single(n_proof, linalg::ry(angle))], n_proof).expect("valid")
    }

    /// Accepts with probability `p` when `y₁ = 1` and never otherwise.
    pub fn biased_y1_acceptor(n_proof: usize, p: f64) -> VerifierCircuit {
        let angle = 2.0 * p.sqrt().asin();
        let cry = controlled(&linalg::ry(angle));
        VerifierCircuit::new(n_proof, 1, vec![Gate::new(vec![0, n_proof], cry)], n_proof).expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::reference::*;
    use super::*;
    use crate::linalg::pauli_x;

    #[test]
    fn rejects_three_qubit_gate() {
        let g = Gate::new(vec![0, 1, 2], linalg::identity(8));
        assert!(matches!(VerifierCircuit::new(2, 1, vec![g], 2), Err(Error::InvalidGate { .. })));
    }

    #[test]
    fn rejects_non_unitary() {
        let g = Gate::single(0, linalg::proj("1"));
        assert!(VerifierCircuit::new(1, 1, vec![g], 1).is_err());
    }

    #[test]
    fn preprocess_sizes_for_empty_core() {
        let p = preprocess(&empty(2, 1)).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.n_ancilla, 4);
        assert_eq!(p.n_proof, 2);
        assert!(p.flags.read_only_proof && p.flags.delayed_output);
        assert_eq!(p.output_qubit, 2);
    }

    #[test]
    fn preprocess_is_idempotent() {
        let p = preprocess(&y1_acceptor(2)).unwrap();
        assert_eq!(preprocess(&p).unwrap(), p);
    }

    #[test]
    fn y1_acceptor_preprocessed_truth_table() {
        let p = preprocess(&y1_acceptor(2)).unwrap();
        for (s, want) in [("00", 0.0), ("10", 1.0), ("01", 0.0), ("11", 1.0)] {
            let y = linalg::parse_bits(s).unwrap();
            assert!((accept_probability(&p, y).unwrap() - want).abs() < 1e-12, "{s}");
        }
    }

    #[test]
    fn accept_probability_trivial_circuits() {
        let id = empty(2, 1);
        let x = VerifierCircuit::new(2, 1, vec![Gate::single(2, pauli_x())], 2).unwrap();
        for y in 0..4 {
            assert_eq!(accept_probability(&id, y).unwrap(), 0.0);
            assert!((accept_probability(&x, y).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn min_weights() {
        let q = |c| QmsaInstance::new(c, 0, 0, 0.1).unwrap();
        assert_eq!(min_satisfying_weight(&q(y1_acceptor(3)), 2.0 / 3.0).unwrap(), Some(1));
        assert_eq!(min_satisfying_weight(&q(and_acceptor(3)), 2.0 / 3.0).unwrap(), Some(2));
        assert_eq!(min_satisfying_weight(&q(empty(3, 1)), 2.0 / 3.0).unwrap(), None);
    }

    #[test]
    fn amplify_rejects_even_and_raw() {
        let p = preprocess(&y1_acceptor(1)).unwrap();
        assert!(matches!(amplify(&p, 2), Err(Error::EvenRepetition(2))));
        assert!(matches!(amplify(&y1_acceptor(1), 3), Err(Error::NotPreprocessed)));
    }

    #[test]
    fn amplify_k1_keeps_gates() {
        let p = preprocess(&y1_acceptor(1)).unwrap();
        let a = amplify(&p, 1).unwrap();
        assert_eq!(a.gates, p.gates);
        assert!(a.flags.amplified);
    }

    #[test]
    fn majority_of_three_biased() {
        let p = preprocess(&biased_y1_acceptor(1, 0.75)).unwrap();
        let a = amplify(&p, 3).unwrap();
        assert!(a.width() <= 24);
        let got = accept_probability(&a, 1).unwrap();
        assert!((got - 0.84375).abs() < 1e-10, "{got}");
        assert!(accept_probability(&a, 0).unwrap() < 1e-12);
        assert_eq!(a.len(), 3 * p.len() + majority_gate_count(3));
    }

    #[test]
    fn majority_formula() {
        assert!((majority_probability(0.75, 3) - 0.84375).abs() < 1e-15);
        assert!((majority_probability(0.3, 1) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn padding_keeps_delay() {
        let p = preprocess(&y1_acceptor(1)).unwrap();
        assert_eq!(p.len(), 3);
        let e = pad_to_even(&p);
        assert_eq!(e.len(), 4);
        assert!(e.output_is_delayed());
        assert!(e.padded);
    }
}
