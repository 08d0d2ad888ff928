//! Compilation of a QMSA instance into a MIN-QAOA instance: penalized
//! generators, the two commuting groups and `H_b`, `H_c`.

use crate::circuit::{pad_to_even, QmsaInstance, VerifierCircuit};
use crate::dense::{evolve_dense, DenseState, Operator};
use crate::error::{Error, Result};
use crate::generator::{sum_operator, Family, Generator};
use crate::lanczos;
use crate::linalg::{bit_length, identity, kron, ketbra, pauli_x, proj, LocalOp, Mat, C64};
use crate::registers::{default_d_size, qaoa_registers, Mode, Registers};
use crate::vqa::{gate_support, generator_bits, hop, observable_bits, observable_m, q_matrix};

/// How `κ` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KappaRule {
    /// `1/(24(|𝒢₁|+|𝒢₂|))`.
    AllGenerators,
    /// `1/(24|𝒢₂|)`.
    Group2,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QaoaOptions {
    pub kappa: KappaRule,
    /// Keep the `−2|00⟩⟨00|_{C_{2j},D_|D|}` penalty on `P_j`. Turning it off
    /// is a diagnostic variant, not the construction.
    pub p_penalty: bool,
}

impl Default for QaoaOptions {
    fn default() -> Self {
        QaoaOptions { kappa: KappaRule::AllGenerators, p_penalty: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaProvenance {
    pub padded_identity: bool,
    pub d_bumped: bool,
    pub options: QaoaOptions,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaInstance {
    pub registers: Registers,
    /// `G_even, F_odd (≥3), Q_even`.
    pub group1: Vec<Generator>,
    /// `G_odd, F_even, Q_odd, P`.
    pub group2: Vec<Generator>,
    pub h0: Generator,
    pub observable: Generator,
    pub kappa: f64,
    pub epsilon_q: f64,
    pub m: u64,
    pub m_prime: u64,
    pub delta: f64,
    pub d_override: Option<usize>,
    pub ground_state_string: Vec<bool>,
    /// The source problem, with the circuit after evenness padding.
    pub source: QmsaInstance,
    pub provenance: QaoaProvenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ham {
    Hb,
    Hc,
}

impl Ham {
    pub fn label(self) -> &'static str {
        match self {
            Ham::Hb => "Hb",
            Ham::Hc => "Hc",
        }
    }
}

/// Whether `M` is kept in `H_c` (`Ψ`) or dropped (`Ψ′`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Semantics {
    Full,
    DropM,
}

pub fn qaoa_thresholds(g: usize, g_prime: usize, d: usize, c: usize) -> (u64, u64) {
    let (d, c) = (d as u64, c as u64);
    (g as u64 * (2 * d - 2) + c - 1, g_prime as u64 * (2 * d - 4) + c - 1)
}

/// `i/√3 (P − Pᵀ) − 2|0010⟩⟨0010|` on `C_j, C_{j+1}, D₁, D₂`, with
/// `P: 1010 → 0110 → 1001 → 1010`.
pub fn g_even_matrix() -> Mat {
    let cyc = ketbra("0110", "1010") + ketbra("1001", "0110") + ketbra("1010", "1001");
    let w = C64::new(0.0, 1.0 / 3f64.sqrt());
    (&cyc - cyc.transpose()) * w - proj("0010") * C64::from(2.0)
}

pub fn build_qaoa(qmsa: &QmsaInstance, delta: f64, d_override: Option<usize>, options: QaoaOptions) -> Result<QaoaInstance> {
    let raw = &qmsa.circuit;
    if !(raw.flags.read_only_proof && raw.flags.delayed_output) {
        return Err(Error::NotPreprocessed);
    }
    if !raw.flags.amplified {
        return Err(Error::NotAmplified);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInstance(format!("delta must lie in (0, 1), got {delta}")));
    }
    let circuit: VerifierCircuit = pad_to_even(raw);
    let l = circuit.len();
    if l == 0 {
        return Err(Error::InvalidInstance("circuit has no gates".into()));
    }
    let mut d = match d_override {
        Some(d) if d < 2 => return Err(Error::InvalidInstance(format!("|D| override {d} < 2"))),
        Some(d) => d,
        None => default_d_size(l, delta),
    };
    let d_bumped = d % 2 == 1;
    if d_bumped {
        d += 1;
    }
    let r = qaoa_registers(&circuit, d);
    let a = r.a;
    let off = 2 * a;
    let mode = Mode::Qaoa;
    let two = C64::from(2.0);

    let f = |j: usize| {
        let m = hop() - proj("00") * two;
        Generator::new(Family::F, j, mode, LocalOp::new(vec![r.qd(j), r.qd(j + 1)], m))
    };
    let g_odd = |j: usize| {
        let m = kron(&hop(), &proj("1")) - proj("001") * two;
        Generator::new(Family::G, j, mode, LocalOp::new(vec![r.qc(j), r.qc(j + 1), r.qd(1)], m))
    };
    let g_even = |j: usize| Generator::new(Family::G, j, mode, LocalOp::new(vec![r.qc(j), r.qc(j + 1), r.qd(1), r.qd(2)], g_even_matrix()));
    let p = |j: usize| {
        let mut m = kron(&pauli_x(), &proj("11"));
        if options.p_penalty {
            m -= kron(&identity(2), &proj("00")) * two;
        }
        Generator::new(Family::P, j, mode, LocalOp::new(vec![r.qa(j), r.qc(2 * j), r.qd(d)], m))
    };
    let q = |k: usize| {
        let v = &circuit.gates[k - 1].matrix;
        let dim = v.nrows();
        let m = q_matrix(v) - kron(&identity(dim), &proj("00")) * two;
        let mut support = gate_support(&circuit, k);
        support.extend([r.qc(off + k), r.qc(off + k + 1)]);
        Generator::new(Family::Q, k, mode, LocalOp::new(support, m))
    };

    let mut group1 = Vec::new();
    group1.extend((2..=off).step_by(2).map(g_even));
    group1.extend((3..d).step_by(2).map(f));
    group1.extend((2..=l).step_by(2).map(q));
    let mut group2 = Vec::new();
    group2.extend((1..off).step_by(2).map(g_odd));
    group2.extend((2..d - 1).step_by(2).map(f));
    group2.extend((1..l).step_by(2).map(q));
    group2.extend((1..=a).map(p));

    let h0_terms = (1..=r.a).map(|i| r.qa(i)).chain((1..=r.b).map(|i| r.qb(i)));
    let h0 = Generator {
        family: Family::H0,
        index: 0,
        mode,
        terms: h0_terms.map(|q| LocalOp::new(vec![q, r.qc(1)], -proj("01"))).collect(),
    };

    let kappa = match options.kappa {
        KappaRule::AllGenerators => 1.0 / (24.0 * (group1.len() + group2.len()) as f64),
        KappaRule::Group2 => 1.0 / (24.0 * group2.len().max(1) as f64),
        KappaRule::Fixed(k) => k,
    };
    let (m, m_prime) = qaoa_thresholds(qmsa.g, qmsa.g_prime, d, r.c);
    if qmsa.epsilon_q.sqrt() > 1.0 / (48.0 * m_prime as f64) {
        return Err(Error::Threshold(format!(
            "sqrt(epsilon_q) = {:.3e} exceeds 1/(48 m') = {:.3e}",
            qmsa.epsilon_q.sqrt(),
            1.0 / (48.0 * m_prime as f64)
        )));
    }
    let padded_identity = circuit.padded;
    let source = QmsaInstance { circuit, ..qmsa.clone() };
    Ok(QaoaInstance {
        registers: r,
        group1,
        group2,
        h0,
        observable: observable_m(&r, mode),
        kappa,
        epsilon_q: qmsa.epsilon_q,
        m,
        m_prime,
        delta,
        d_override,
        ground_state_string: r.clock_string(1, 1),
        source,
        provenance: QaoaProvenance { padded_identity, d_bumped, options },
    })
}

impl QaoaInstance {
    pub fn circuit(&self) -> &VerifierCircuit {
        &self.source.circuit
    }

    pub fn l(&self) -> usize {
        self.source.circuit.len()
    }

    pub fn generators(&self) -> impl Iterator<Item = &Generator> {
        self.group1.iter().chain(&self.group2).chain(std::iter::once(&self.h0))
    }

    pub fn find(&self, family: Family, index: usize) -> Option<&Generator> {
        self.group1.iter().chain(&self.group2).find(|g| g.family == family && g.index == index)
    }

    /// `Σ𝒢₁ + H₀`.
    pub fn hb(&self) -> Operator {
        sum_operator(self.group1.iter().chain(std::iter::once(&self.h0)).map(|g| (1.0, g)))
    }

    /// `κΣ𝒢₂` (no `M`).
    pub fn hc_cost(&self) -> Operator {
        sum_operator(self.group2.iter().map(|g| (self.kappa, g)))
    }

    /// `κΣ𝒢₂ + M`.
    pub fn hc(&self) -> Operator {
        let mut op = self.hc_cost();
        op.push(1.0, self.observable.op().clone());
        op
    }

    pub fn hamiltonians(&self) -> (Operator, Operator) {
        (self.hb(), self.hc())
    }

    pub fn ground_state(&self) -> Result<DenseState> {
        let ones: Vec<usize> = self.ground_state_string.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        DenseState::from_ones(self.registers.total(), &ones)
    }

    /// Dense `exp(iθH)|ψ⟩`. `M` is diagonal and commutes with `κΣ𝒢₂`, so
    /// `exp(iθH_c) = exp(iθκΣ𝒢₂)·exp(iθM)` and `M` is applied exactly.
    pub fn evolve_dense(&self, state: &DenseState, ham: Ham, theta: f64, semantics: Semantics) -> DenseState {
        match ham {
            Ham::Hb => evolve_dense(state, &self.hb(), theta),
            Ham::Hc => {
                let mut out = evolve_dense(state, &self.hc_cost(), theta);
                if semantics == Semantics::Full {
                    self.apply_exp_m(&mut out, theta);
                }
                out
            }
        }
    }

    fn apply_exp_m(&self, state: &mut DenseState, theta: f64) {
        let r = &self.registers;
        let mask = (1 << r.qb(1)) | (1 << r.qc(r.c));
        let phase = C64::from_polar(1.0, theta);
        for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
            if i & mask != mask {
                *a *= phase;
            }
        }
    }

    /// `N`: one generator-sized record per local term of `H_b` and `H_c`.
    pub fn encoding_size(&self) -> u64 {
        let n = self.registers.total();
        let terms: usize = self.generators().map(|g| g.terms.len()).sum();
        terms as u64 * generator_bits(n) + observable_bits(n) + bit_length(self.m) + bit_length(self.m_prime)
    }
}

/// Term-wise lower bound on `H_b`: every term is minimized by `gs_b`.
pub fn hb_termwise_minimum(instance: &QaoaInstance) -> f64 {
    let n1 = instance.group1.len() as f64;
    -2.0 * n1 - (instance.registers.a + instance.registers.b) as f64
}

/// Ground state of `H_b` and the gap to the next eigenvalue.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub state: DenseState,
    pub energy: f64,
    pub uniqueness_gap: f64,
    /// `|⟨gs_b|v₀⟩|` for the numerically found lowest eigenvector.
    pub overlap: f64,
}

/// Confirms `|0,0,1̃,1̃⟩` is the unique ground state of `H_b`.
pub fn ground_state(instance: &QaoaInstance, seed: u64) -> Result<GroundState> {
    let n = instance.registers.total();
    if n > 16 {
        return Err(Error::WidthOverflow { qubits: n, limit: 16 });
    }
    let hb = instance.hb();
    let gs = instance.ground_state()?;
    let low = lanczos::lowest_two(&hb, n, seed)?;
    let overlap = gs.inner(&low.vector).norm();
    let gap = low.values[1] - low.values[0];
    if gap <= 1e-9 {
        return Err(Error::Degenerate(gap));
    }
    Ok(GroundState { state: gs, energy: low.values[0], uniqueness_gap: gap, overlap })
}

/// `|⟨Ψ|(H_c − M)|Ψ⟩|` and the bound `2κ|𝒢₂|`.
pub fn observable_gap(instance: &QaoaInstance, state: &DenseState) -> (f64, f64) {
    let v = state.expectation(&instance.hc_cost()).abs();
    (v, 2.0 * instance.kappa * instance.group2.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm_i_hermitian, hermitian_eigenvalues, is_hermitian};

    #[test]
    fn threshold_arithmetic() {
        assert_eq!(qaoa_thresholds(1, 2, 4, 10), (15, 17));
        assert_eq!(qaoa_thresholds(0, 0, 4, 7), (6, 6));
    }

    #[test]
    fn g_even_block_spectrum() {
        let g = g_even_matrix();
        assert!(is_hermitian(&g, 1e-15));
        let ev = hermitian_eigenvalues(&g);
        assert!((ev[0] + 2.0).abs() < 1e-12);
        assert!((ev[1] + 1.0).abs() < 1e-12);
        assert!((ev[15] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn g_even_two_thirds_steps_d() {
        let u = expm_i_hermitian(&g_even_matrix(), 2.0 * std::f64::consts::PI / 3.0);
        let (a, b, c) = (0b1010, 0b0110, 0b1001);
        assert!((u[(c, a)].norm() - 1.0).abs() < 1e-12); // (i,1) -> (i,2)
        assert!((u[(b, c)].norm() - 1.0).abs() < 1e-12); // (i,2) -> (i+1,1)
        let u = expm_i_hermitian(&g_even_matrix(), 4.0 * std::f64::consts::PI / 3.0);
        assert!((u[(b, a)].norm() - 1.0).abs() < 1e-12); // (i,1) -> (i+1,1)
    }
}
