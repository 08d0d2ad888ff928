//! Brute-force and graph-search checks of the construction's lemmas, the
//! soundness probe and the approximation-to-decision wrapper.

use crate::circuit::accept_probability;
use crate::dense::DenseState;
use crate::error::{Error, Result};
use crate::generator::{Family, Generator};
use crate::linalg::{commutator_norm, C64, ZERO};
use crate::logical::{self, all_indices, bfs_distances, column, expectation_m, w_function, LogicalIndex, LogicalState, PrefixTable, Reduction};
use crate::prover::{honest_qaoa_schedule, honest_vqa_schedule};
use crate::qaoa::{Ham, QaoaInstance, Semantics};
use crate::schedule::{qaoa_logical_cost, simulate_vqa, Engine, Schedule};
use crate::vqa::VqaInstance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;

pub const SPAN_TOL: f64 = 1e-9;
pub const M_TOL: f64 = 1e-9;

/// Shortest number of generator applications from `(0…0, 1, 1)` to `target`.
pub fn min_gates_to_reach(instance: &VqaInstance, target: LogicalIndex) -> Result<Option<usize>> {
    if !logical::is_valid(instance, &target) {
        return Err(Error::InvalidLogicalIndex(target.to_string()));
    }
    Ok(bfs_distances(instance, &instance.generators, LogicalIndex::start()).get(&target).copied())
}

#[derive(Debug, Clone, Serialize)]
pub struct HwRow {
    pub y: String,
    pub distance: Option<usize>,
    pub formula: usize,
    /// Length of the honest prefix reaching `(y, |A|+1, 1)`.
    pub witness: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct HwReport {
    pub rows: Vec<HwRow>,
    pub passed: bool,
}

/// BFS distance to every `(y, |A|+1, 1)` against `HW(y)(2|D|−1) + |A|`, with
/// the honest plan prefix as the matching upper-bound witness.
pub fn check_hamming_weight_bound(instance: &VqaInstance) -> Result<HwReport> {
    let r = instance.registers;
    let dist = bfs_distances(instance, &instance.generators, LogicalIndex::start());
    let mut rows = Vec::new();
    let mut passed = true;
    for y in 0..(1u64 << r.a) {
        let bits: Vec<bool> = (0..r.a).map(|i| (y >> i) & 1 == 1).collect();
        let target = LogicalIndex::new(y, r.a + 1, 1);
        let formula = y.count_ones() as usize * (2 * r.d - 1) + r.a;
        let plan = honest_vqa_schedule(&bits, instance)?;
        let witness = plan.checkpoints.iter().position(|c| *c == target).map(|p| p + 1).unwrap_or(usize::MAX);
        let distance = dist.get(&target).copied();
        passed &= distance == Some(formula) && witness == formula;
        rows.push(HwRow { y: crate::linalg::format_bits(y, r.a), distance, formula, witness });
    }
    Ok(HwReport { rows, passed })
}

/// Random VQA schedule; at most `max_q` applications of `Q` generators.
pub fn random_vqa_schedule<R: Rng>(instance: &VqaInstance, rng: &mut R, len: usize, max_q: Option<usize>) -> Schedule {
    let non_q: Vec<&Generator> = instance.generators.iter().filter(|g| g.family != Family::Q).collect();
    let mut used = 0;
    let mut s = Schedule::new();
    for _ in 0..len {
        let allow_q = max_q.is_none_or(|m| used < m);
        let g = if allow_q {
            &instance.generators[rng.gen_range(0..instance.generators.len())]
        } else {
            non_q[rng.gen_range(0..non_q.len())]
        };
        if g.family == Family::Q {
            used += 1;
        }
        s.push(g.label(), rng.gen_range(-PI..PI));
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct SpanReport {
    pub trials: usize,
    pub max_residual: f64,
    /// Largest amplitude outside unary `C`/`D` clock configurations.
    pub max_clock_leak: f64,
    /// Largest difference between the closed-form and logical engines.
    pub max_engine_gap: f64,
    pub passed: bool,
}

/// Largest amplitude on basis states whose `C` or `D` register is not unary.
pub fn clock_leak(instance: &VqaInstance, state: &DenseState) -> f64 {
    let r = instance.registers;
    let c_mask: usize = (1..=r.c).fold(0, |m, i| m | (1 << r.qc(i)));
    let d_mask: usize = (1..=r.d).fold(0, |m, i| m | (1 << r.qd(i)));
    let unary = |x: usize| x.count_ones() == 1;
    state.amplitudes().iter().enumerate().filter(|(i, _)| !(unary(i & c_mask) && unary(i & d_mask))).map(|(_, a)| a.norm()).fold(0.0, f64::max)
}

/// Random schedules on the dense closed-form engine stay in the logical span.
pub fn check_span_closure(instance: &VqaInstance, trials: usize, max_len: usize, seed: u64) -> Result<SpanReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table = PrefixTable::new(instance)?;
    let schedules: Vec<Schedule> = (0..trials)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            random_vqa_schedule(instance, &mut rng, len, None)
        })
        .collect();
    let results: Vec<Result<(f64, f64, f64)>> = schedules
        .par_iter()
        .map(|s| {
            let sim = simulate_vqa(instance, s, Engine::Closed)?;
            let dense = match &sim.final_state {
                crate::schedule::FinalState::Dense(d) => d.clone(),
                _ => unreachable!(),
            };
            let leak = clock_leak(instance, &dense);
            let logical = simulate_vqa(instance, s, Engine::Logical)?;
            let (proj, _) = logical::project_span(instance, &table, &dense);
            let gap = match &logical.final_state {
                crate::schedule::FinalState::Logical(l) => l.max_deviation(&proj),
                _ => unreachable!(),
            };
            Ok((sim.final_residual(), leak, gap))
        })
        .collect();
    let mut report = SpanReport { trials, max_residual: 0.0, max_clock_leak: 0.0, max_engine_gap: 0.0, passed: true };
    for r in results {
        let (res, leak, gap) = r?;
        report.max_residual = report.max_residual.max(res);
        report.max_clock_leak = report.max_clock_leak.max(leak);
        report.max_engine_gap = report.max_engine_gap.max(gap);
    }
    report.passed = report.max_residual <= SPAN_TOL && report.max_clock_leak <= 1e-10;
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct FewerReport {
    pub trials: usize,
    pub max_deviation: f64,
    pub dense_checked: usize,
    pub passed: bool,
}

/// Random schedules with fewer than `L` applications of `Q` leave `⟨M⟩ = 1`.
/// Every trial runs on the logical engine; the first `dense_checks` are
/// repeated on the dense closed-form engine.
pub fn check_lemma_fewer_than_l(instance: &VqaInstance, trials: usize, max_len: usize, dense_checks: usize, seed: u64) -> Result<FewerReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = instance.l();
    let schedules: Vec<Schedule> = (0..trials)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            let budget = rng.gen_range(0..l.max(1));
            random_vqa_schedule(instance, &mut rng, len, Some(budget))
        })
        .collect();
    let devs: Vec<Result<f64>> = schedules
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let mut dev = (simulate_vqa(instance, s, Engine::Logical)?.final_expectation() - 1.0).abs();
            if i < dense_checks {
                dev = dev.max((simulate_vqa(instance, s, Engine::Closed)?.final_expectation() - 1.0).abs());
            }
            Ok(dev)
        })
        .collect();
    let mut max_deviation: f64 = 0.0;
    for d in devs {
        max_deviation = max_deviation.max(d?);
    }
    Ok(FewerReport { trials, max_deviation, dense_checked: dense_checks.min(trials), passed: max_deviation <= M_TOL })
}

/// `{0, ±π/3, ±π/2, ±2π/3, π}` plus `extra` seeded random angles in `(−π, π)`.
pub fn default_angle_grid(extra: usize, seed: u64) -> Vec<f64> {
    let mut angles = vec![0.0, PI / 3.0, -PI / 3.0, PI / 2.0, -PI / 2.0, 2.0 * PI / 3.0, -2.0 * PI / 3.0, PI];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    angles.extend((0..extra).map(|_| rng.gen_range(-PI..PI)));
    angles
}

#[derive(Debug, Clone)]
pub struct SoundnessConfig {
    pub angles: Vec<f64>,
    pub max_len: usize,
    pub beam_width: usize,
    /// Cap on evaluated children; exceeding it marks the report truncated.
    pub max_evaluations: usize,
    pub include_honest: bool,
}

impl SoundnessConfig {
    pub fn new(max_len: usize, seed: u64) -> Self {
        SoundnessConfig { angles: default_angle_grid(8, seed), max_len, beam_width: 10_000, max_evaluations: 50_000_000, include_honest: true }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SoundnessReport {
    /// Always `"probe"`: a grid search is a lower-bound probe, not a proof.
    pub kind: &'static str,
    pub min_expectation: f64,
    pub best_schedule: Schedule,
    pub evaluations: usize,
    pub depth_reached: usize,
    pub truncated: bool,
    /// Best value among honest plans (for every witness) cut to `max_len`.
    pub honest_min: Option<f64>,
    /// Dense re-evaluation of the best schedule, when it was run.
    pub dense_check: Option<f64>,
}

#[derive(Clone)]
struct Node {
    path: Vec<(u16, u16)>,
    state: LogicalState,
    score: f64,
    progress: f64,
}

fn state_key(s: &LogicalState) -> Vec<(LogicalIndex, i64, i64)> {
    s.iter().map(|(k, a)| (*k, (a.re * 1e10).round() as i64, (a.im * 1e10).round() as i64)).collect()
}

fn acts_on(model: &dyn Reduction, g: &Generator, s: &LogicalState) -> bool {
    s.support().any(|k| column(model, g, k).iter().any(|(j, v)| j != k && *v != ZERO))
}

/// Generic beam search: `expand(node_state) -> children (move, state)`.
#[allow(clippy::too_many_arguments)]
fn beam_search<E, S>(config: &SoundnessConfig, start: LogicalState, expand: E, score: S) -> (f64, Vec<(u16, u16)>, usize, usize, bool)
where
    E: Fn(&LogicalState, usize) -> Vec<((u16, u16), LogicalState)> + Sync,
    S: Fn(&LogicalState) -> (f64, f64) + Sync,
{
    let (s0, p0) = score(&start);
    let mut frontier = vec![Node { path: vec![], state: start, score: s0, progress: p0 }];
    let (mut best, mut best_path) = (s0, Vec::new());
    let mut evaluations = 0usize;
    let mut depth = 0;
    let mut truncated = false;
    for d in 0..config.max_len {
        let children: Vec<Node> = frontier
            .par_iter()
            .flat_map_iter(|n| {
                expand(&n.state, d).into_iter().map(|(mv, st)| {
                    let (score, progress) = score(&st);
                    let mut path = n.path.clone();
                    path.push(mv);
                    Node { path, state: st, score, progress }
                })
            })
            .collect();
        evaluations += children.len();
        if children.is_empty() {
            break;
        }
        depth = d + 1;
        let mut seen = HashSet::new();
        let mut next: Vec<Node> = Vec::with_capacity(children.len());
        for c in children {
            if seen.insert(state_key(&c.state)) {
                next.push(c);
            }
        }
        next.sort_by(|a, b| a.score.total_cmp(&b.score).then(b.progress.total_cmp(&a.progress)).then(a.path.cmp(&b.path)));
        if let Some(first) = next.first() {
            if first.score < best {
                best = first.score;
                best_path = first.path.clone();
            }
        }
        next.truncate(config.beam_width);
        frontier = next;
        if evaluations > config.max_evaluations {
            truncated = d + 1 < config.max_len;
            break;
        }
    }
    (best, best_path, evaluations, depth, truncated)
}

/// Beam search over VQA schedules of length ≤ `max_len` on the logical
/// engine, minimizing `⟨M⟩`. Ties prefer states further from the start
/// (expected BFS distance), then lexicographic schedule order.
pub fn brute_force_soundness_vqa(instance: &VqaInstance, config: &SoundnessConfig) -> Result<SoundnessReport> {
    let table = PrefixTable::new(instance)?;
    let dist = bfs_distances(instance, &instance.generators, LogicalIndex::start());
    let gens = &instance.generators;
    let angles: Vec<f64> = config.angles.iter().copied().filter(|a| *a != 0.0).collect();
    let expand = |s: &LogicalState, _d: usize| {
        let mut out = Vec::new();
        for (gi, g) in gens.iter().enumerate() {
            if !acts_on(instance, g, s) {
                continue;
            }
            for (ai, &theta) in angles.iter().enumerate() {
                let next = logical::evolve_logical_vqa(instance, s, g, theta).expect("logical step");
                out.push(((gi as u16, ai as u16), next));
            }
        }
        out
    };
    let score = |s: &LogicalState| {
        let progress = s.iter().map(|(k, a)| a.norm_sqr() * *dist.get(k).unwrap_or(&0) as f64).sum();
        (expectation_m(instance, &table, s), progress)
    };
    let (mut best, path, evaluations, depth, truncated) = beam_search(config, LogicalState::start(), expand, score);
    let mut best_schedule = Schedule::new();
    for (gi, ai) in &path {
        best_schedule.push(gens[*gi as usize].label(), angles[*ai as usize]);
    }
    let mut honest_min = None;
    if config.include_honest {
        let r = instance.registers;
        for y in 0..(1u64 << r.a) {
            let bits: Vec<bool> = (0..r.a).map(|i| (y >> i) & 1 == 1).collect();
            let plan = honest_vqa_schedule(&bits, instance)?.schedule.prefix(config.max_len);
            let v = simulate_vqa(instance, &plan, Engine::Logical)?.final_expectation();
            honest_min = Some(honest_min.map_or(v, |h: f64| h.min(v)));
            if v < best {
                best = v;
                best_schedule = plan;
            }
        }
    }
    Ok(SoundnessReport { kind: "probe", min_expectation: best, best_schedule, evaluations, depth_reached: depth, truncated, honest_min, dense_check: None })
}

/// QAOA variant: alternating steps on the `Ψ′` (M-free) logical engine,
/// scored by `⟨H_c⟩`. `H_c` angles are the grid divided by `κ`. The best
/// schedule is re-run densely with full semantics when the instance fits.
pub fn brute_force_soundness_qaoa(instance: &QaoaInstance, config: &SoundnessConfig) -> Result<SoundnessReport> {
    let table = PrefixTable::new(instance)?;
    let all: Vec<Generator> = instance.generators().cloned().collect();
    let dist = bfs_distances(instance, &all, LogicalIndex::start());
    let angles: Vec<f64> = config.angles.iter().copied().filter(|a| *a != 0.0).collect();
    let theta = |h: u16, a: u16| if h == 1 { angles[a as usize] / instance.kappa } else { angles[a as usize] };
    // depth parity decides the Hamiltonian: H_c first (H_b on |gs_b⟩ is a phase)
    let ham_at = |d: usize| if d.is_multiple_of(2) { 1u16 } else { 0u16 };
    let expand = |s: &LogicalState, d: usize| {
        let h = ham_at(d);
        let ham = if h == 1 { Ham::Hc } else { Ham::Hb };
        (0..angles.len() as u16)
            .map(|a| ((h, a), logical::evolve_logical_qaoa(instance, s, ham, theta(h, a), Semantics::DropM).expect("logical step")))
            .collect()
    };
    let score = |s: &LogicalState| {
        let progress = s.iter().map(|(k, a)| a.norm_sqr() * *dist.get(k).unwrap_or(&0) as f64).sum();
        (qaoa_logical_cost(instance, &table, s, Semantics::Full), progress)
    };
    let (mut best, path, evaluations, depth, truncated) = beam_search(config, LogicalState::start(), expand, score);
    let mut best_schedule = Schedule::new();
    for (h, a) in &path {
        best_schedule.push(if *h == 1 { "Hc" } else { "Hb" }, theta(*h, *a));
    }
    let mut honest_min = None;
    if config.include_honest {
        let r = instance.registers;
        for y in 0..(1u64 << r.a) {
            let bits: Vec<bool> = (0..r.a).map(|i| (y >> i) & 1 == 1).collect();
            let plan = honest_qaoa_schedule(&bits, instance)?.schedule.prefix(config.max_len);
            let mut s = LogicalState::start();
            for (h, t) in plan.qaoa_steps()? {
                s = logical::evolve_logical_qaoa(instance, &s, h, t, Semantics::DropM)?;
            }
            let v = qaoa_logical_cost(instance, &table, &s, Semantics::Full);
            honest_min = Some(honest_min.map_or(v, |h: f64| h.min(v)));
            if v < best {
                best = v;
                best_schedule = plan;
            }
        }
    }
    let dense_check = if instance.registers.total() <= 16 {
        let sim = crate::schedule::simulate_qaoa(instance, &best_schedule, Engine::Dense, Semantics::Full)?;
        Some(sim.final_expectation())
    } else {
        None
    };
    Ok(SoundnessReport { kind: "probe", min_expectation: best, best_schedule, evaluations, depth_reached: depth, truncated, honest_min, dense_check })
}

/// Random alternating schedule starting with `H_c`; `H_b` angles uniform in
/// `(−π, π)`, `H_c` angles uniform in `(−π/κ, π/κ)`.
pub fn random_qaoa_schedule<R: Rng>(instance: &QaoaInstance, rng: &mut R, len: usize) -> Schedule {
    let mut s = Schedule::new();
    for i in 0..len {
        if i % 2 == 0 {
            s.push("Hc", rng.gen_range(-PI..PI) / instance.kappa);
        } else {
            s.push("Hb", rng.gen_range(-PI..PI));
        }
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundingReport {
    /// `‖|Ψ_ζ⟩⟨Ψ_ζ| − |Ψ′_ζ⟩⟨Ψ′_ζ|‖_tr` for `ζ = 0…len`.
    pub distances: Vec<f64>,
    /// `4ζ√ε_q`.
    pub bounds: Vec<f64>,
    /// Largest `W` on the support of `Ψ′_ζ` minus `ζ + 1` (must be ≤ 0).
    pub w_excess: i64,
    /// Largest gap between dense and logical `Ψ′`.
    pub engine_gap: f64,
    pub monotone: bool,
    pub passed: bool,
}

/// `2√(1 − |⟨a|b⟩|²)`, via the norm of `b`'s component orthogonal to `a`.
pub fn pure_trace_distance(a: &DenseState, b: &DenseState) -> f64 {
    let ov = a.inner(b);
    let perp: f64 = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| (y - ov * x).norm_sqr()).sum();
    2.0 * perp.sqrt()
}

/// Rounding check along every prefix of `schedule`.
pub fn check_rounding_lemma(instance: &QaoaInstance, schedule: &Schedule) -> Result<RoundingReport> {
    let steps = schedule.qaoa_steps()?;
    let table = PrefixTable::new(instance)?;
    let mut psi = instance.ground_state()?;
    let mut psi_p = psi.clone();
    let mut logical_p = LogicalState::start();
    let sqrt_eps = instance.epsilon_q.sqrt();
    let mut distances = vec![0.0];
    let mut bounds = vec![0.0];
    let max_w = |s: &LogicalState| s.support().map(|k| w_function(instance, k)).collect::<Result<Vec<_>>>().map(|v| v.into_iter().max().unwrap_or(i64::MIN));
    let mut w_excess = max_w(&logical_p)? - 1;
    let mut engine_gap: f64 = 0.0;
    for (zeta, (h, theta)) in steps.iter().enumerate().map(|(i, s)| (i + 1, s)) {
        psi = instance.evolve_dense(&psi, *h, *theta, Semantics::Full);
        psi_p = instance.evolve_dense(&psi_p, *h, *theta, Semantics::DropM);
        logical_p = logical::evolve_logical_qaoa(instance, &logical_p, *h, *theta, Semantics::DropM)?;
        distances.push(pure_trace_distance(&psi, &psi_p));
        bounds.push(4.0 * zeta as f64 * sqrt_eps);
        w_excess = w_excess.max(max_w(&logical_p)? - (zeta as i64 + 1));
        let (proj, residual) = logical::project_span(instance, &table, &psi_p);
        engine_gap = engine_gap.max(proj.max_deviation(&logical_p)).max(residual);
    }
    let monotone = distances.windows(2).all(|w| w[1] >= w[0] - 1e-9);
    let passed = distances.iter().zip(&bounds).all(|(d, b)| d <= b) && w_excess <= 0;
    Ok(RoundingReport { distances, bounds, w_excess, engine_gap, monotone, passed })
}

#[derive(Debug, Clone, Serialize)]
pub struct WStepReport {
    pub pairs_checked: usize,
    pub max_increase: i64,
    /// Same check for the full `H_b` and `H_c` blocks.
    pub max_increase_hamiltonians: i64,
    pub passed: bool,
}

/// Connected component of `idx` under the given weighted generators.
fn block_of(model: &QaoaInstance, terms: &[&Generator], idx: LogicalIndex) -> Vec<LogicalIndex> {
    let mut seen = vec![idx];
    let mut i = 0;
    while i < seen.len() {
        let cur = seen[i];
        for g in terms {
            for (k, v) in column(model, g, &cur) {
                if v != ZERO && !seen.contains(&k) {
                    seen.push(k);
                }
            }
        }
        i += 1;
    }
    seen
}

/// For every generator of `𝒢₁ ∪ 𝒢₂ ∪ {H₀}` and every logical index, the
/// support of `e^{iθΓ}|η⟩` (its block) only reaches `W ≤ W_in + 1`.
pub fn check_w_step(instance: &QaoaInstance) -> Result<WStepReport> {
    let indices = all_indices(instance);
    let gens: Vec<&Generator> = instance.generators().collect();
    let mut max_increase = i64::MIN;
    let mut pairs = 0;
    for idx in &indices {
        let w0 = w_function(instance, idx)?;
        for g in &gens {
            for k in block_of(instance, &[*g], *idx) {
                max_increase = max_increase.max(w_function(instance, &k)? - w0);
            }
            pairs += 1;
        }
    }
    let hb: Vec<&Generator> = instance.group1.iter().chain(std::iter::once(&instance.h0)).collect();
    let hc: Vec<&Generator> = instance.group2.iter().collect();
    let mut max_ham = i64::MIN;
    for idx in &indices {
        let w0 = w_function(instance, idx)?;
        for terms in [&hb, &hc] {
            for k in block_of(instance, terms, *idx) {
                max_ham = max_ham.max(w_function(instance, &k)? - w0);
            }
        }
    }
    Ok(WStepReport { pairs_checked: pairs, max_increase, max_increase_hamiltonians: max_ham, passed: max_increase <= 1 })
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorEntry {
    pub a: String,
    pub b: String,
    pub norm: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutationReport {
    pub group1_max: f64,
    pub group2_m_max: f64,
    pub hc_m: f64,
    /// Non-commuting pairs on the full space.
    pub violations: Vec<CommutatorEntry>,
    /// Largest commutator restricted to the logical space, per group.
    pub group1_logical_max: f64,
    pub group2_logical_max: f64,
    pub passed: bool,
}

pub const COMMUTATOR_TOL: f64 = 1e-12;

fn apply_generator(model: &QaoaInstance, g: &Generator, s: &BTreeMap<LogicalIndex, C64>) -> BTreeMap<LogicalIndex, C64> {
    let mut out = BTreeMap::new();
    for (idx, a) in s {
        for (k, v) in column(model, g, idx) {
            *out.entry(k).or_insert(ZERO) += v * a;
        }
    }
    out
}

/// `max_η ‖[Γ, Γ′]η‖` over logical basis vectors.
pub fn logical_commutator(model: &QaoaInstance, a: &Generator, b: &Generator) -> f64 {
    let mut worst: f64 = 0.0;
    for idx in all_indices(model) {
        let e = BTreeMap::from([(idx, C64::from(1.0))]);
        let ab = apply_generator(model, a, &apply_generator(model, b, &e));
        let ba = apply_generator(model, b, &apply_generator(model, a, &e));
        let keys: HashSet<_> = ab.keys().chain(ba.keys()).collect();
        let n: f64 = keys.into_iter().map(|k| (ab.get(k).copied().unwrap_or(ZERO) - ba.get(k).copied().unwrap_or(ZERO)).norm_sqr()).sum();
        worst = worst.max(n.sqrt());
    }
    worst
}

fn pairwise(gens: &[&Generator], violations: &mut Vec<CommutatorEntry>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            let n = commutator_norm(&gens[i].weighted(1.0), &gens[j].weighted(1.0));
            if n > COMMUTATOR_TOL {
                violations.push(CommutatorEntry { a: gens[i].label(), b: gens[j].label(), norm: n });
            }
            worst = worst.max(n);
        }
    }
    worst
}

/// Full-space commutators within `𝒢₁`, within `𝒢₂ ∪ {M}` and `[H_c, M]`,
/// plus the same within-group check restricted to the logical space.
pub fn check_commutation(instance: &QaoaInstance) -> CommutationReport {
    let mut violations = Vec::new();
    let g1: Vec<&Generator> = instance.group1.iter().collect();
    let mut g2m: Vec<&Generator> = instance.group2.iter().collect();
    g2m.push(&instance.observable);
    let group1_max = pairwise(&g1, &mut violations);
    let group2_m_max = pairwise(&g2m, &mut violations);
    // terms disjoint from M commute with it; M commutes with itself
    let m_support = instance.observable.support();
    let overlapping: Vec<(f64, &crate::linalg::LocalOp)> = instance
        .group2
        .iter()
        .flat_map(|g| g.weighted(instance.kappa))
        .filter(|(_, t)| t.support.iter().any(|q| m_support.contains(q)))
        .collect();
    let hc_m = if overlapping.is_empty() {
        0.0
    } else if crate::linalg::union_support(overlapping.iter().map(|(_, t)| *t).chain(instance.observable.terms.iter())).len() <= 12 {
        commutator_norm(&overlapping, &instance.observable.weighted(1.0))
    } else {
        // triangle-inequality bound when the joint support is too wide
        overlapping.iter().map(|(w, t)| w.abs() * commutator_norm(&[(1.0, *t)], &instance.observable.weighted(1.0))).sum()
    };
    let logical_max = |gs: &[&Generator]| {
        let mut w: f64 = 0.0;
        for i in 0..gs.len() {
            for j in i + 1..gs.len() {
                w = w.max(logical_commutator(instance, gs[i], gs[j]));
            }
        }
        w
    };
    let g2: Vec<&Generator> = instance.group2.iter().collect();
    let group1_logical_max = logical_max(&g1);
    let group2_logical_max = logical_max(&g2);
    let passed = group1_max <= COMMUTATOR_TOL && group2_m_max <= COMMUTATOR_TOL && hc_m <= COMMUTATOR_TOL;
    CommutationReport { group1_max, group2_m_max, hc_m, violations, group1_logical_max, group2_logical_max, passed }
}

/// Minimum depth over proof strings accepted with probability ≥ 2/3: the
/// BFS distance to `(y, |C|, 1)` in the logical transition graph.
pub fn brute_force_m_opt(instance: &VqaInstance) -> Result<Option<u64>> {
    let r = instance.registers;
    let dist = bfs_distances(instance, &instance.generators, LogicalIndex::start());
    let mut best: Option<u64> = None;
    for y in 0..(1u64 << r.a) {
        if accept_probability(instance.circuit(), y)? >= 2.0 / 3.0 {
            if let Some(&d) = dist.get(&LogicalIndex::new(y, r.c, 1)) {
                best = Some(best.map_or(d as u64, |b| b.min(d as u64)));
            }
        }
    }
    Ok(best)
}

/// Accept iff the estimate is at most `m′`; `None` means "no depth works".
pub fn decide_from_estimator<F: Fn(&VqaInstance) -> Option<u64>>(instance: &VqaInstance, estimator: F) -> bool {
    estimator(instance).is_some_and(|m| m <= instance.m_prime)
}

/// Per-index BFS distances, exposed for reports.
pub fn distance_table(instance: &VqaInstance) -> HashMap<LogicalIndex, usize> {
    bfs_distances(instance, &instance.generators, LogicalIndex::start())
}
