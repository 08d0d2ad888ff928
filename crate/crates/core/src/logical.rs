//! The logical computation space: basis vectors
//! `η_{y,t,s} = V_{p(t)}…V₁|y,0⟩_{AB}|t̃⟩_C|s̃⟩_D`, amplitude maps over them,
//! the exact logical transition rules of each generator family, and the
//! dense embedding/projection used to cross-check everything.

use crate::circuit::VerifierCircuit;
use crate::dense::DenseState;
use crate::error::{Error, Result};
use crate::generator::{Family, Generator};
use crate::linalg::{expm_i_hermitian, Mat, C64, ONE, ZERO};
use crate::qaoa::{Ham, QaoaInstance, Semantics};
use crate::registers::{ab_position, Mode, Registers};
use crate::vqa::VqaInstance;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// Amplitudes below this are dropped after each logical evolution.
pub const PRUNE: f64 = 1e-14;

/// `(y, t, s)`: proof string, `C` step `t ∈ [1,|C|]`, `D` step `s ∈ [1,|D|]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LogicalIndex {
    pub y: u64,
    pub t: usize,
    pub s: usize,
}

impl LogicalIndex {
    pub fn new(y: u64, t: usize, s: usize) -> Self {
        LogicalIndex { y, t, s }
    }

    pub fn start() -> Self {
        LogicalIndex { y: 0, t: 1, s: 1 }
    }
}

impl std::fmt::Display for LogicalIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(y={:#b}, t={}, s={})", self.y, self.t, self.s)
    }
}

/// What the logical engine needs to know about a compiled instance.
pub trait Reduction {
    fn mode(&self) -> Mode;
    fn registers(&self) -> &Registers;
    fn circuit(&self) -> &VerifierCircuit;
    /// False once the instance was conjugated into another basis frame.
    fn standard_frame(&self) -> bool;
    fn p_penalty(&self) -> bool {
        true
    }
}

impl Reduction for VqaInstance {
    fn mode(&self) -> Mode {
        Mode::Vqa
    }
    fn registers(&self) -> &Registers {
        &self.registers
    }
    fn circuit(&self) -> &VerifierCircuit {
        &self.source.circuit
    }
    fn standard_frame(&self) -> bool {
        self.frame.is_none()
    }
}

impl Reduction for QaoaInstance {
    fn mode(&self) -> Mode {
        Mode::Qaoa
    }
    fn registers(&self) -> &Registers {
        &self.registers
    }
    fn circuit(&self) -> &VerifierCircuit {
        &self.source.circuit
    }
    fn standard_frame(&self) -> bool {
        true
    }
    fn p_penalty(&self) -> bool {
        self.provenance.options.p_penalty
    }
}

/// Clock offset before the first `Q`: `|A|` (VQA) or `2|A|` (QAOA).
pub fn offset<R: Reduction + ?Sized>(model: &R) -> usize {
    let a = model.registers().a;
    match model.mode() {
        Mode::Vqa => a,
        Mode::Qaoa => 2 * a,
    }
}

/// Number of circuit gates already applied at `C` step `t`.
pub fn prefix_len<R: Reduction + ?Sized>(model: &R, t: usize) -> usize {
    t.saturating_sub(offset(model) + 1)
}

pub fn is_valid<R: Reduction + ?Sized>(model: &R, idx: &LogicalIndex) -> bool {
    let r = model.registers();
    let in_range = (r.a >= 64 || idx.y >> r.a == 0) && (1..=r.c).contains(&idx.t) && (1..=r.d).contains(&idx.s);
    in_range
        && match model.mode() {
            Mode::Vqa => true,
            Mode::Qaoa => idx.s == 1 || (idx.t.is_multiple_of(2) && idx.t <= 2 * r.a),
        }
}

/// Every index of the logical set, in order.
pub fn all_indices<R: Reduction + ?Sized>(model: &R) -> Vec<LogicalIndex> {
    let r = model.registers();
    let mut out = Vec::new();
    for y in 0..(1u64 << r.a) {
        for t in 1..=r.c {
            for s in 1..=r.d {
                let idx = LogicalIndex::new(y, t, s);
                if is_valid(model, &idx) {
                    out.push(idx);
                }
            }
        }
    }
    out
}

/// Column of a generator restricted to the logical space:
/// `Γ|η_idx⟩ = Σ v |η_out⟩`. These are the transition tables of the case
/// analysis, written out independently of the generator matrices.
pub fn column<R: Reduction + ?Sized>(model: &R, g: &Generator, idx: &LogicalIndex) -> Vec<(LogicalIndex, C64)> {
    let r = model.registers();
    let (y, t, s) = (idx.y, idx.t, idx.s);
    let j = g.index;
    let off = offset(model);
    let at = |t: usize, s: usize| LogicalIndex::new(y, t, s);
    let diag = |v: f64| vec![(*idx, C64::from(v))];
    let mut out = Vec::new();
    match (g.mode, g.family) {
        (Mode::Vqa, Family::F) => {
            if s == j {
                out.push((at(t, j + 1), ONE));
            } else if s == j + 1 {
                out.push((at(t, j), ONE));
            }
        }
        (Mode::Vqa, Family::G) => {
            if s == 1 && t == j {
                out.push((at(j + 1, 1), ONE));
            } else if s == 1 && t == j + 1 {
                out.push((at(j, 1), ONE));
            }
        }
        (Mode::Vqa, Family::P) => {
            if t == j && s == r.d {
                out.push((LogicalIndex::new(y ^ (1 << (j - 1)), t, s), ONE));
            }
        }
        (_, Family::Q) => {
            let x = off + j;
            if t == x {
                out.push((at(x + 1, s), ONE));
            } else if t == x + 1 {
                out.push((at(x, s), ONE));
            } else if g.mode == Mode::Qaoa {
                return diag(-2.0);
            }
        }
        (Mode::Qaoa, Family::F) => {
            if s == j {
                out.push((at(t, j + 1), ONE));
            } else if s == j + 1 {
                out.push((at(t, j), ONE));
            } else {
                return diag(-2.0);
            }
        }
        (Mode::Qaoa, Family::G) if j % 2 == 1 => {
            if s == 1 {
                if t == j {
                    out.push((at(j + 1, 1), ONE));
                } else if t == j + 1 {
                    out.push((at(j, 1), ONE));
                } else {
                    return diag(-2.0);
                }
            }
        }
        (Mode::Qaoa, Family::G) => {
            // i/√3 (P − Pᵀ) on the cycle (j,1) → (j+1,1) → (j,2) → (j,1)
            let w = C64::new(0.0, 1.0 / 3f64.sqrt());
            if s == 1 && t == j {
                out.push((at(j + 1, 1), w));
                out.push((at(j, 2), -w));
            } else if s == 1 && t == j + 1 {
                out.push((at(j, 2), w));
                out.push((at(j, 1), -w));
            } else if s == 2 && t == j {
                out.push((at(j, 1), w));
                out.push((at(j + 1, 1), -w));
            } else if s == 1 {
                return diag(-2.0);
            }
        }
        (Mode::Qaoa, Family::P) => {
            if t == 2 * j && s == r.d {
                out.push((LogicalIndex::new(y ^ (1 << (j - 1)), t, s), ONE));
            } else if t != 2 * j && s != r.d && model.p_penalty() {
                return diag(-2.0);
            }
        }
        (Mode::Qaoa, Family::H0) => {
            if t == 1 {
                let zeros = r.a - (y.count_ones() as usize) + r.b;
                return diag(-(zeros as f64));
            }
        }
        (_, Family::M) => panic!("M does not preserve the logical space"),
        (Mode::Vqa, Family::H0) => panic!("H0 is not a VQA generator"),
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LogicalState {
    amps: BTreeMap<LogicalIndex, C64>,
}

impl LogicalState {
    pub fn basis(idx: LogicalIndex) -> Self {
        let mut amps = BTreeMap::new();
        amps.insert(idx, ONE);
        LogicalState { amps }
    }

    pub fn start() -> Self {
        Self::basis(LogicalIndex::start())
    }

    pub fn from_map(amps: BTreeMap<LogicalIndex, C64>) -> Self {
        LogicalState { amps }
    }

    pub fn get(&self, idx: &LogicalIndex) -> C64 {
        self.amps.get(idx).copied().unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LogicalIndex, &C64)> {
        self.amps.iter()
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amps.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn support(&self) -> impl Iterator<Item = &LogicalIndex> {
        self.amps.keys()
    }

    pub fn prune(&mut self) {
        self.amps.retain(|_, a| a.norm() >= PRUNE);
    }

    pub fn max_deviation(&self, other: &LogicalState) -> f64 {
        let keys: BTreeSet<_> = self.amps.keys().chain(other.amps.keys()).collect();
        keys.into_iter().map(|k| (self.get(k) - other.get(k)).norm()).fold(0.0, f64::max)
    }

    /// `|⟨self|other⟩|`.
    pub fn overlap(&self, other: &LogicalState) -> f64 {
        self.amps.iter().map(|(k, a)| a.conj() * other.get(k)).sum::<C64>().norm()
    }
}

/// Which Hamiltonian a logical step applies.
#[derive(Debug, Clone, Copy)]
pub enum LogicalHam<'a> {
    Generator(&'a Generator),
    Qaoa(Ham, Semantics),
}

/// `exp(iθ Σ w_k Γ_k)` on a logical state, block by block. Blocks are the
/// connected components of the restricted operator, so every rotation of
/// the case analysis (2×2, or 3×3 for the cyclic `G`) is exponentiated
/// exactly, diagonal penalties and phases included.
pub fn evolve_terms<R: Reduction + ?Sized>(
    model: &R,
    state: &LogicalState,
    terms: &[(f64, &Generator)],
    theta: f64,
) -> Result<LogicalState> {
    if !model.standard_frame() {
        return Err(Error::InvalidInstance("logical engine needs the standard frame".into()));
    }
    let mut cols: HashMap<LogicalIndex, Vec<(LogicalIndex, C64)>> = HashMap::new();
    let mut col = |idx: &LogicalIndex| -> Vec<(LogicalIndex, C64)> {
        cols.entry(*idx)
            .or_insert_with(|| {
                let mut acc: BTreeMap<LogicalIndex, C64> = BTreeMap::new();
                for (w, g) in terms {
                    for (k, v) in column(model, g, idx) {
                        *acc.entry(k).or_insert(ZERO) += v * *w;
                    }
                }
                acc.into_iter().filter(|(_, v)| *v != ZERO).collect()
            })
            .clone()
    };
    let mut out: BTreeMap<LogicalIndex, C64> = BTreeMap::new();
    let mut done: BTreeSet<LogicalIndex> = BTreeSet::new();
    for (&start, _) in state.iter() {
        if done.contains(&start) {
            continue;
        }
        if !is_valid(model, &start) {
            return Err(Error::InvalidLogicalIndex(start.to_string()));
        }
        // connected component through off-diagonal couplings
        let mut block = vec![start];
        let mut seen: BTreeSet<LogicalIndex> = [start].into();
        let mut q = VecDeque::from([start]);
        while let Some(i) = q.pop_front() {
            for (k, _) in col(&i) {
                if !is_valid(model, &k) {
                    return Err(Error::LeftLogicalSpace(format!("{i} -> {k}")));
                }
                if seen.insert(k) {
                    block.push(k);
                    q.push_back(k);
                }
            }
        }
        block.sort();
        let pos: HashMap<LogicalIndex, usize> = block.iter().enumerate().map(|(p, k)| (*k, p)).collect();
        let n = block.len();
        let mut h = Mat::zeros(n, n);
        for (jc, idx) in block.iter().enumerate() {
            for (k, v) in col(idx) {
                h[(pos[&k], jc)] += v;
            }
        }
        let u = expm_i_hermitian(&h, theta);
        let v: Vec<C64> = block.iter().map(|k| state.get(k)).collect();
        for (ir, k) in block.iter().enumerate() {
            let a: C64 = (0..n).map(|jc| u[(ir, jc)] * v[jc]).sum();
            out.insert(*k, a);
        }
        done.extend(block);
    }
    let mut s = LogicalState::from_map(out);
    s.prune();
    Ok(s)
}

pub fn evolve_logical_vqa(instance: &VqaInstance, state: &LogicalState, g: &Generator, theta: f64) -> Result<LogicalState> {
    evolve_terms(instance, state, &[(1.0, g)], theta)
}

/// QAOA step. With full semantics, `M` acts as the identity below the last
/// clock step (a global `e^{iθ}`); components at `t = |C|` need the dense engine.
pub fn evolve_logical_qaoa(instance: &QaoaInstance, state: &LogicalState, ham: Ham, theta: f64, semantics: Semantics) -> Result<LogicalState> {
    match ham {
        Ham::Hb => {
            let terms: Vec<(f64, &Generator)> = instance.group1.iter().chain(std::iter::once(&instance.h0)).map(|g| (1.0, g)).collect();
            evolve_terms(instance, state, &terms, theta)
        }
        Ham::Hc => {
            let terms: Vec<(f64, &Generator)> = instance.group2.iter().map(|g| (instance.kappa, g)).collect();
            if semantics == Semantics::Full && state.support().any(|k| k.t == instance.registers.c) {
                return Err(Error::NeedsDense);
            }
            let mut out = evolve_terms(instance, state, &terms, theta)?;
            if semantics == Semantics::Full {
                if out.support().any(|k| k.t == instance.registers.c) {
                    return Err(Error::NeedsDense);
                }
                let phase = C64::from_polar(1.0, theta);
                for a in out.amps.values_mut() {
                    *a *= phase;
                }
            }
            Ok(out)
        }
    }
}

/// Dispatches a [`LogicalHam`] for any instance.
pub fn evolve_logical<R: Reduction + ?Sized>(model: &R, state: &LogicalState, ham: LogicalHam<'_>, theta: f64, qaoa: Option<&QaoaInstance>) -> Result<LogicalState> {
    match ham {
        LogicalHam::Generator(g) => evolve_terms(model, state, &[(1.0, g)], theta),
        LogicalHam::Qaoa(h, sem) => evolve_logical_qaoa(qaoa.expect("QAOA instance"), state, h, theta, sem),
    }
}

/// `⟨Ψ|Γ|Ψ⟩` for a logical-space-preserving generator.
pub fn expectation_generator<R: Reduction + ?Sized>(model: &R, state: &LogicalState, g: &Generator) -> f64 {
    let mut total = ZERO;
    for (idx, a) in state.iter() {
        for (k, v) in column(model, g, idx) {
            total += state.get(&k).conj() * v * a;
        }
    }
    total.re
}

/// AB-register states `V_p…V₁|y,0⟩`, indexed `[p][y]`.
pub struct PrefixTable {
    pub ab: usize,
    states: Vec<Vec<Vec<C64>>>,
}

impl PrefixTable {
    pub fn new<R: Reduction + ?Sized>(model: &R) -> Result<Self> {
        let r = model.registers();
        let ab = r.ab();
        if ab > 20 {
            return Err(Error::WidthOverflow { qubits: ab, limit: 20 });
        }
        let circuit = model.circuit();
        let gates: Vec<(Vec<usize>, Mat)> = circuit
            .gates
            .iter()
            .map(|g| (g.targets.iter().map(|&q| ab_position(circuit, q)).collect(), g.matrix.clone()))
            .collect();
        let mut states = Vec::with_capacity(gates.len() + 1);
        let level0: Vec<Vec<C64>> = (0..1usize << r.a)
            .map(|y| {
                let mut v = vec![ZERO; 1 << ab];
                v[y] = ONE;
                v
            })
            .collect();
        states.push(level0);
        for (support, m) in &gates {
            let prev = states.last().unwrap();
            let next = prev
                .iter()
                .map(|v| {
                    let mut s = DenseState::from_amplitudes(ab, v.clone()).expect("width");
                    s.apply_matrix(support, m);
                    s.into_amplitudes()
                })
                .collect();
            states.push(next);
        }
        Ok(PrefixTable { ab, states })
    }

    pub fn get(&self, p: usize, y: u64) -> &[C64] {
        &self.states[p][y as usize]
    }

    pub fn levels(&self) -> usize {
        self.states.len()
    }
}

/// Embeds a logical state as a dense state by applying the `V` prefixes.
pub fn embed<R: Reduction + ?Sized>(model: &R, table: &PrefixTable, state: &LogicalState) -> Result<DenseState> {
    let r = model.registers();
    if r.total() > crate::dense::MAX_DENSE_QUBITS {
        return Err(Error::WidthOverflow { qubits: r.total(), limit: crate::dense::MAX_DENSE_QUBITS });
    }
    let mut amps = vec![ZERO; 1usize << r.total()];
    for (idx, a) in state.iter() {
        let v = table.get(prefix_len(model, idx.t), idx.y);
        let clock = r.clock_mask(idx.t, idx.s);
        for (k, x) in v.iter().enumerate() {
            if *x != ZERO {
                amps[k | clock] += a * x;
            }
        }
    }
    DenseState::from_amplitudes(r.total(), amps)
}

/// Orthogonal projection onto the logical space and the residual norm
/// `‖(I − Π)ψ‖`, computed directly rather than by norm subtraction.
pub fn project_span<R: Reduction + ?Sized>(model: &R, table: &PrefixTable, state: &DenseState) -> (LogicalState, f64) {
    let r = model.registers();
    let ab_mask = (1usize << r.ab()) - 1;
    let mut clocks: HashMap<usize, (usize, usize)> = HashMap::new();
    for t in 1..=r.c {
        for s in 1..=r.d {
            clocks.insert(r.clock_mask(t, s), (t, s));
        }
    }
    let amps = state.amplitudes();
    let mut residual2 = 0.0;
    // amplitude outside any unary clock pair configuration
    for (i, a) in amps.iter().enumerate() {
        if !clocks.contains_key(&(i & !ab_mask)) {
            residual2 += a.norm_sqr();
        }
    }
    let mut out = BTreeMap::new();
    let mut keys: Vec<_> = clocks.iter().map(|(m, ts)| (*ts, *m)).collect();
    keys.sort();
    for ((t, s), mask) in keys {
        let slice: Vec<C64> = (0..=ab_mask).map(|k| amps[k | mask]).collect();
        let mut rest = slice.clone();
        for y in 0..(1u64 << r.a) {
            let idx = LogicalIndex::new(y, t, s);
            if !is_valid(model, &idx) {
                continue;
            }
            let v = table.get(prefix_len(model, t), y);
            let a: C64 = v.iter().zip(&slice).map(|(p, x)| p.conj() * x).sum();
            for (x, p) in rest.iter_mut().zip(v) {
                *x -= a * p;
            }
            if a.norm() >= PRUNE {
                out.insert(idx, a);
            }
        }
        residual2 += rest.iter().map(|x| x.norm_sqr()).sum::<f64>();
    }
    (LogicalState::from_map(out), residual2.sqrt())
}

/// `⟨ψ|M|ψ⟩` for a logical state, exact: the only non-trivial part is the
/// Gram matrix of `|1⟩⟨1|_{B₁}` between fully-run verifier states.
pub fn expectation_m<R: Reduction + ?Sized>(model: &R, table: &PrefixTable, state: &LogicalState) -> f64 {
    let r = model.registers();
    let out_bit = r.a; // B₁ inside AB
    let last = table.levels() - 1;
    let total: f64 = state.iter().map(|(_, a)| a.norm_sqr()).sum();
    let mut by_s: BTreeMap<usize, Vec<(u64, C64)>> = BTreeMap::new();
    for (idx, a) in state.iter() {
        if idx.t == r.c {
            by_s.entry(idx.s).or_default().push((idx.y, *a));
        }
    }
    let mut accepted = 0.0;
    for comps in by_s.values() {
        for (y1, a1) in comps {
            for (y2, a2) in comps {
                let v1 = table.get(last, *y1);
                let v2 = table.get(last, *y2);
                let g: C64 = v1.iter().zip(v2).enumerate().filter(|(k, _)| (k >> out_bit) & 1 == 1).map(|(_, (p, q))| p.conj() * q).sum();
                accepted += (a1.conj() * a2 * g).re;
            }
        }
    }
    total - accepted
}

/// Acceptance probability of each proof string after the full circuit.
pub fn accept_table(table: &PrefixTable, a: usize) -> Vec<f64> {
    let last = table.levels() - 1;
    (0..1u64 << a)
        .map(|y| table.get(last, y).iter().enumerate().filter(|(k, _)| (k >> a) & 1 == 1).map(|(_, p)| p.norm_sqr()).sum())
        .collect()
}

/// `W(y,t,s) = (2|D|−4)HW(y) + t + (−1)^{[y_{⌈t/2⌉}=1]}(s + [s=1] − 2)`.
pub fn w_function(instance: &QaoaInstance, idx: &LogicalIndex) -> Result<i64> {
    if !is_valid(instance, idx) {
        return Err(Error::InvalidLogicalIndex(idx.to_string()));
    }
    let d = instance.registers.d as i64;
    let hw = idx.y.count_ones() as i64;
    let bit = idx.t.div_ceil(2);
    let flipped = bit >= 1 && bit <= instance.registers.a && (idx.y >> (bit - 1)) & 1 == 1;
    let sign = if flipped { -1 } else { 1 };
    let s = idx.s as i64;
    let tail = s + if s == 1 { 1 } else { 0 } - 2;
    Ok((2 * d - 4) * hw + idx.t as i64 + sign * tail)
}

/// Logical neighbours of `idx` over a set of generators (one edge per
/// generator application with a non-trivial transition).
pub fn neighbours<R: Reduction + ?Sized>(model: &R, gens: &[Generator], idx: &LogicalIndex) -> Vec<LogicalIndex> {
    let mut out = BTreeSet::new();
    for g in gens {
        for (k, v) in column(model, g, idx) {
            if k != *idx && v != ZERO {
                out.insert(k);
            }
        }
    }
    out.into_iter().collect()
}

/// Breadth-first distances from `from` in the logical transition graph.
pub fn bfs_distances<R: Reduction + ?Sized>(model: &R, gens: &[Generator], from: LogicalIndex) -> HashMap<LogicalIndex, usize> {
    let mut dist = HashMap::from([(from, 0usize)]);
    let mut q = VecDeque::from([from]);
    while let Some(i) = q.pop_front() {
        let d = dist[&i];
        for k in neighbours(model, gens, &i) {
            if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(k) {
                e.insert(d + 1);
                q.push_back(k);
            }
        }
    }
    dist
}
