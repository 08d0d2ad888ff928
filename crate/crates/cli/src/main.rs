//! `depth-forge`: compile verifier circuits into VQA/QAOA instances, run
//! schedules, replay honest provers and check the lemmas at desk scale.

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use depth_forge::checker::{
    brute_force_soundness_qaoa, brute_force_soundness_vqa, check_hamming_weight_bound, check_lemma_fewer_than_l, check_rounding_lemma,
    check_span_closure, random_qaoa_schedule, RoundingReport, SoundnessConfig, SoundnessReport,
};
use depth_forge::circuit::{amplify, min_satisfying_weight, preprocess, QmsaInstance, VerifierCircuit};
use depth_forge::io::{self, Instance};
use depth_forge::prover::{honest_qaoa_schedule, honest_vqa_schedule};
use depth_forge::qaoa::{build_qaoa, QaoaOptions, Semantics};
use depth_forge::schedule::{simulate_qaoa, simulate_vqa, Engine, Schedule, Simulation};
use depth_forge::vqa::{build_vqa, encoding_size, hardness_ratio, plan_parameters, ratio, PlanInputs};
use depth_forge::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "depth-forge", version, about)]
struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CompileArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    g: usize,
    #[arg(long)]
    gp: usize,
    #[arg(long)]
    delta: f64,
    /// Clock width `|D|`; defaults to `⌈L^{1+δ}⌉`.
    #[arg(long)]
    d_size: Option<usize>,
    /// Soundness error of the verifier (VQA default 1e-3; QAOA default the
    /// largest value the precision condition admits).
    #[arg(long)]
    epsilon_q: Option<f64>,
    #[arg(short = 'o', long)]
    output: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a verifier circuit into a MIN-VQA instance.
    CompileVqa(CompileArgs),
    /// Compile a verifier circuit into a MIN-QAOA instance.
    CompileQaoa {
        #[command(flatten)]
        args: CompileArgs,
        /// Odd repetition count for majority-vote amplification.
        #[arg(long, default_value_t = 1)]
        amplify: usize,
        /// Drop the diagonal penalty of the proof-flip generators.
        #[arg(long)]
        no_p_penalty: bool,
    },
    /// Run a schedule and report the final expectation.
    Simulate {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, default_value = "logical")]
        engine: Engine,
        #[arg(long)]
        emit_trajectory: Option<PathBuf>,
    },
    /// Build and run the honest schedule for a witness.
    Prove {
        #[arg(long)]
        instance: PathBuf,
        /// Little-endian proof string, `y₁` first.
        #[arg(long)]
        witness: String,
        #[arg(long, default_value = "logical")]
        engine: Engine,
        #[arg(long)]
        emit_schedule: Option<PathBuf>,
    },
    /// Run one lemma suite and print a JSON report.
    CheckLemmas {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        suite: Suite,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        max_len: Option<usize>,
    },
    /// Thresholds, hardness ratio, encoding size and the parameter plan.
    Ratio {
        #[arg(long)]
        instance: PathBuf,
        /// Target exponent for the parameter plan.
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Constant of the circuit-size bound in the parameter plan.
        #[arg(long, default_value_t = 8.0)]
        plan_c: f64,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "camelCase")]
enum Suite {
    Span,
    Hw,
    #[value(name = "fewerL")]
    FewerL,
    Rounding,
    Soundness,
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct InputError(anyhow::Error);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for InputError {}

fn input<T>(r: std::result::Result<T, impl Into<anyhow::Error>>) -> anyhow::Result<T> {
    r.map_err(|e| InputError(e.into()).into())
}

fn read(path: &Path) -> anyhow::Result<String> {
    input(std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())))
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<Instance> {
    let text = read(path)?;
    input(io::instance_from_json(&text).with_context(|| path.display().to_string()))
}

fn load_schedule(path: &Path) -> anyhow::Result<Schedule> {
    let text = read(path)?;
    input(io::schedule_from_json(&text).with_context(|| path.display().to_string()))
}

fn load_qmsa(args: &CompileArgs, epsilon_q: f64, k: Option<usize>) -> anyhow::Result<QmsaInstance> {
    let text = read(&args.circuit)?;
    let circuit: VerifierCircuit = input(io::circuit_from_json(&text).with_context(|| args.circuit.display().to_string()))?;
    let mut c = input(preprocess(&circuit))?;
    if let Some(k) = k {
        c = input(amplify(&c, k))?;
    }
    input(QmsaInstance::new(c, args.g, args.gp, epsilon_q))
}

fn compile_vqa(args: &CompileArgs) -> anyhow::Result<()> {
    let q = load_qmsa(args, args.epsilon_q.unwrap_or(1e-3), None)?;
    let v = input(build_vqa(&q, args.delta, args.d_size))?;
    log::info!("compiled VQA instance: {} qubits, {} generators, m = {}, m' = {}", v.registers.total(), v.generators.len(), v.m, v.m_prime);
    write(&args.output, &io::vqa_to_json(&v)?)
}

fn compile_qaoa(args: &CompileArgs, k: usize, p_penalty: bool) -> anyhow::Result<()> {
    let options = QaoaOptions { p_penalty, ..Default::default() };
    let eps = match args.epsilon_q {
        Some(e) => e,
        None => {
            // thresholds do not depend on ε_q; probe them with a tiny value
            let probe = input(build_qaoa(&load_qmsa(args, f64::MIN_POSITIVE, Some(k))?, args.delta, args.d_size, options))?;
            (1.0 / (48.0 * probe.m_prime.max(1) as f64)).powi(2) * (1.0 - 1e-9)
        }
    };
    let q = input(build_qaoa(&load_qmsa(args, eps, Some(k))?, args.delta, args.d_size, options))?;
    log::info!("compiled QAOA instance: {} qubits, kappa = {}, m = {}, m' = {}, epsilon_q = {eps:e}", q.registers.total(), q.kappa, q.m, q.m_prime);
    write(&args.output, &io::qaoa_to_json(&q)?)
}

fn run_schedule(inst: &Instance, s: &Schedule, engine: Engine) -> anyhow::Result<Simulation> {
    Ok(match inst {
        Instance::Vqa(v) => input(simulate_vqa(v, s, engine))?,
        Instance::Qaoa(q) => input(simulate_qaoa(q, s, engine, Semantics::Full))?,
    })
}

fn simulate(instance: &Path, schedule: &Path, engine: Engine, trajectory: Option<&Path>) -> anyhow::Result<()> {
    let inst = load_instance(instance)?;
    let s = load_schedule(schedule)?;
    let sim = run_schedule(&inst, &s, engine)?;
    if let Some(path) = trajectory {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(["step", "expectation", "span-residual"])?;
        for row in &sim.trajectory {
            w.write_record([row.step.to_string(), format!("{:.16e}", row.expectation), format!("{:.16e}", row.span_residual)])?;
        }
        w.flush()?;
    }
    println!("steps: {}", s.len());
    println!("final expectation: {:.16e}", sim.final_expectation());
    println!("span residual: {:.3e}", sim.final_residual());
    Ok(())
}

fn prove(instance: &Path, witness: &str, engine: Engine, emit: Option<&Path>) -> anyhow::Result<bool> {
    let inst = load_instance(instance)?;
    let (plan, m) = match &inst {
        Instance::Vqa(v) => (input(honest_vqa_schedule(&input(io::parse_witness(witness, v.registers.a))?, v))?, v.m),
        Instance::Qaoa(q) => (input(honest_qaoa_schedule(&input(io::parse_witness(witness, q.registers.a))?, q))?, q.m),
    };
    if let Some(path) = emit {
        write(path, &io::schedule_to_json(&plan.schedule)?)?;
    }
    let sim = run_schedule(&inst, &plan.schedule, engine)?;
    let e = sim.final_expectation();
    let len = plan.schedule.len();
    let yes = e <= plan.target_expectation_bound && len as u64 <= m;
    println!("final expectation: {e:.16e}");
    println!("schedule length: {len} (m = {m})");
    println!("verdict: {}", if yes { "YES" } else { "NOT-YES" });
    Ok(yes)
}

#[derive(Serialize)]
struct SuiteReport<T: Serialize> {
    suite: Suite,
    seed: u64,
    passed: bool,
    report: T,
}

#[derive(Serialize)]
struct SoundnessSummary {
    /// Whether some string of weight ≤ g′ is accepted with probability ≥ 2/3.
    yes_instance: bool,
    max_len: usize,
    /// Soundness requires ≥ 2/3 − 1e−6 on NO instances; completeness ≤ 1/3 on YES.
    bound: f64,
    probe: SoundnessReport,
}

#[derive(Serialize)]
struct RoundingSummary {
    trials: usize,
    max_len: usize,
    worst_ratio: f64,
    failures: usize,
    reports: Vec<RoundingReport>,
}

fn emit<T: Serialize>(suite: Suite, seed: u64, passed: bool, report: T) -> anyhow::Result<bool> {
    println!("{}", serde_json::to_string_pretty(&SuiteReport { suite, seed, passed, report })?);
    Ok(passed)
}

fn need_vqa(inst: &Instance, suite: Suite) -> anyhow::Result<&depth_forge::VqaInstance> {
    match inst {
        Instance::Vqa(v) => Ok(v),
        Instance::Qaoa(_) => Err(InputError(anyhow!("suite {suite:?} needs a VQA instance")).into()),
    }
}

fn is_yes(q: &QmsaInstance) -> anyhow::Result<bool> {
    Ok(input(min_satisfying_weight(q, 2.0 / 3.0))?.is_some_and(|w| w <= q.g_prime))
}

fn check_lemmas(instance: &Path, suite: Suite, trials: Option<usize>, max_len: Option<usize>, seed: u64) -> anyhow::Result<bool> {
    let inst = load_instance(instance)?;
    match suite {
        Suite::Span => {
            let r = input(check_span_closure(need_vqa(&inst, suite)?, trials.unwrap_or(200), max_len.unwrap_or(50), seed))?;
            emit(suite, seed, r.passed, r)
        }
        Suite::Hw => {
            let r = input(check_hamming_weight_bound(need_vqa(&inst, suite)?))?;
            emit(suite, seed, r.passed, r)
        }
        Suite::FewerL => {
            let trials = trials.unwrap_or(200);
            let r = input(check_lemma_fewer_than_l(need_vqa(&inst, suite)?, trials, max_len.unwrap_or(50), trials.min(20), seed))?;
            emit(suite, seed, r.passed, r)
        }
        Suite::Soundness => {
            let (yes, m, m_prime) = match &inst {
                Instance::Vqa(v) => (is_yes(&v.source)?, v.m, v.m_prime),
                Instance::Qaoa(q) => (is_yes(&q.source)?, q.m, q.m_prime),
            };
            let max_len = max_len.unwrap_or(if yes { m } else { m_prime } as usize);
            let config = SoundnessConfig::new(max_len, seed);
            let probe = match &inst {
                Instance::Vqa(v) => input(brute_force_soundness_vqa(v, &config))?,
                Instance::Qaoa(q) => input(brute_force_soundness_qaoa(q, &config))?,
            };
            let (bound, passed) = if yes {
                (1.0 / 3.0, probe.min_expectation <= 1.0 / 3.0)
            } else {
                (2.0 / 3.0 - 1e-6, probe.min_expectation >= 2.0 / 3.0 - 1e-6)
            };
            emit(suite, seed, passed, SoundnessSummary { yes_instance: yes, max_len, bound, probe })
        }
        Suite::Rounding => {
            let Instance::Qaoa(q) = &inst else {
                return Err(InputError(anyhow!("suite rounding needs a QAOA instance")).into());
            };
            let trials = trials.unwrap_or(50);
            let max_len = max_len.unwrap_or(20);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut reports = Vec::with_capacity(trials);
            for i in 0..trials {
                let len = if max_len == 0 { 0 } else { 1 + i % max_len };
                reports.push(input(check_rounding_lemma(q, &random_qaoa_schedule(q, &mut rng, len)))?);
            }
            let worst_ratio = reports
                .iter()
                .flat_map(|r| r.distances.iter().zip(&r.bounds).filter(|(_, b)| **b > 0.0).map(|(d, b)| d / b))
                .fold(0.0, f64::max);
            let failures = reports.iter().filter(|r| !r.passed).count();
            emit(suite, seed, failures == 0, RoundingSummary { trials, max_len, worst_ratio, failures, reports })
        }
    }
}

fn ratio_report(instance: &Path, epsilon: f64, plan_c: f64) -> anyhow::Result<()> {
    let inst = load_instance(instance)?;
    let (m, m_prime, n, circuit) = match &inst {
        Instance::Vqa(v) => (v.m, v.m_prime, encoding_size(v), v.circuit()),
        Instance::Qaoa(q) => (q.m, q.m_prime, q.encoding_size(), q.circuit()),
    };
    let r = match &inst {
        Instance::Vqa(v) => input(hardness_ratio(v))?,
        Instance::Qaoa(_) => input(ratio(m, m_prime))?,
    };
    let (l_prime, n_v_prime, m_v_prime) = match circuit.source {
        Some(s) => (s.gates as u64, s.n_proof as u64, s.n_ancilla as u64),
        None => (circuit.len() as u64, circuit.n_proof as u64, circuit.n_ancilla as u64),
    };
    let plan = plan_parameters(&PlanInputs { epsilon, l_prime, n_v_prime, m_v_prime: Some(m_v_prime), c: plan_c });
    println!("m: {m}");
    println!("m': {m_prime}");
    println!("m'/m: {r} ({:.6})", *r.numer() as f64 / *r.denom() as f64);
    println!("N: {n}");
    println!("plan inputs: epsilon = {epsilon}, L' = {l_prime}, n_V' = {n_v_prime}, m_V' = {m_v_prime}, c = {plan_c}");
    match (plan.choice, plan.margin) {
        (Some((ep, dl)), Some(margin)) => println!(
            "plan: feasible, epsilon' = {ep:.6}, delta = {dl:.6}, margin = {margin:.6e} ({} of {} grid points feasible)",
            plan.feasible_points, plan.grid_points
        ),
        _ => println!("plan: infeasible on all {} grid points", plan.grid_points),
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring the thread pool")?;
    }
    match &cli.command {
        Command::CompileVqa(args) => compile_vqa(args).map(|_| true),
        Command::CompileQaoa { args, amplify, no_p_penalty } => compile_qaoa(args, *amplify, !no_p_penalty).map(|_| true),
        Command::Simulate { instance, schedule, engine, emit_trajectory } => simulate(instance, schedule, *engine, emit_trajectory.as_deref()).map(|_| true),
        Command::Prove { instance, witness, engine, emit_schedule } => prove(instance, witness, *engine, emit_schedule.as_deref()),
        Command::CheckLemmas { instance, suite, trials, max_len } => check_lemmas(instance, *suite, *trials, *max_len, cli.seed),
        Command::Ratio { instance, epsilon, plan_c } => ratio_report(instance, *epsilon, *plan_c).map(|_| true),
    }
}

fn main() -> ExitCode {
    let env = env_logger::Env::new().filter_or("DEPTH_FORGE_LOG", "error");
    env_logger::Builder::from_env(env).format_timestamp(None).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let input = e.downcast_ref::<InputError>().is_some() || e.chain().any(|c| c.downcast_ref::<Error>().is_some());
            ExitCode::from(if input { 2 } else { 1 })
        }
    }
}
