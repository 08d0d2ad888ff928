//! JSON file formats for circuits, compiled instances and schedules.
//!
//! Matrices are row-major lists of `[re, im]` pairs written with 17
//! significant digits, so every `f64` survives a round trip bit for bit.

use crate::circuit::{Amplification, AssumptionFlags, Gate, QmsaInstance, SourceSizes, VerifierCircuit};
use crate::error::{Error, Result};
use crate::generator::{Family, Generator};
use crate::linalg::{LocalOp, Mat, C64};
use crate::qaoa::{build_qaoa, KappaRule, QaoaInstance, QaoaOptions, QaoaProvenance};
use crate::registers::{Mode, Registers};
use crate::schedule::Schedule;
use crate::vqa::{build_vqa, conjugate_instance, VqaInstance};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

/// An `f64` written as `d.dddddddddddddddde±x` (17 significant digits).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom(format!("non-finite number {}", self.0)));
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Num)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixFile(pub Vec<[Num; 2]>);

impl MatrixFile {
    pub fn from_mat(m: &Mat) -> Self {
        let mut v = Vec::with_capacity(m.len());
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let x = m[(r, c)];
                v.push([Num(x.re), Num(x.im)]);
            }
        }
        MatrixFile(v)
    }

    pub fn to_mat(&self) -> Result<Mat> {
        let n = self.0.len();
        let dim = (n as f64).sqrt().round() as usize;
        if dim * dim != n || dim == 0 {
            return Err(Error::Parse(format!("matrix has {n} entries, not a square")));
        }
        Ok(Mat::from_fn(dim, dim, |r, c| {
            let [re, im] = self.0[r * dim + c];
            C64::new(re.0, im.0)
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateFile {
    pub targets: Vec<usize>,
    pub matrix: MatrixFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    pub n_proof: usize,
    pub n_ancilla: usize,
    pub output_qubit: usize,
    #[serde(default)]
    pub flags: AssumptionFlags,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<SourceSizes>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplification: Option<Amplification>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub padded: bool,
    pub gates: Vec<GateFile>,
}

impl CircuitFile {
    pub fn from_circuit(c: &VerifierCircuit) -> Self {
        CircuitFile {
            n_proof: c.n_proof,
            n_ancilla: c.n_ancilla,
            output_qubit: c.output_qubit,
            flags: c.flags,
            source: c.source,
            amplification: c.amplification,
            padded: c.padded,
            gates: c.gates.iter().map(|g| GateFile { targets: g.targets.clone(), matrix: MatrixFile::from_mat(&g.matrix) }).collect(),
        }
    }

    /// Rebuilds and validates the circuit. Flags are re-verified: a file
    /// cannot claim an assumption its gates violate.
    pub fn to_circuit(&self) -> Result<VerifierCircuit> {
        let gates = self.gates.iter().map(|g| Ok(Gate::new(g.targets.clone(), g.matrix.to_mat()?))).collect::<Result<Vec<_>>>()?;
        let mut c = VerifierCircuit::new(self.n_proof, self.n_ancilla, gates, self.output_qubit)?;
        if self.flags.read_only_proof && !c.reads_proof_only() {
            return Err(Error::InvalidCircuit("flag read_only_proof set but a gate writes the proof register".into()));
        }
        if self.flags.delayed_output && !c.output_is_delayed() {
            return Err(Error::InvalidCircuit("flag delayed_output set but the output is touched before the last gate".into()));
        }
        c.flags = self.flags;
        c.source = self.source;
        c.amplification = self.amplification;
        c.padded = self.padded;
        Ok(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub support: Vec<usize>,
    pub matrix: MatrixFile,
}

/// A generator. Single-term generators carry `support`/`matrix`; the
/// composite `H0` carries `terms` instead.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorFile {
    pub family: Family,
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<TermFile>>,
}

impl GeneratorFile {
    pub fn from_generator(g: &Generator) -> Self {
        if g.terms.len() == 1 && g.family != Family::H0 {
            let t = &g.terms[0];
            GeneratorFile { family: g.family, index: g.index, support: Some(t.support.clone()), matrix: Some(MatrixFile::from_mat(&t.matrix)), terms: None }
        } else {
            let terms = g.terms.iter().map(|t| TermFile { support: t.support.clone(), matrix: MatrixFile::from_mat(&t.matrix) }).collect();
            GeneratorFile { family: g.family, index: g.index, support: None, matrix: None, terms: Some(terms) }
        }
    }

    pub fn to_generator(&self, mode: Mode, width: usize) -> Result<Generator> {
        let term = |support: &[usize], m: &MatrixFile| -> Result<LocalOp> {
            let m = m.to_mat()?;
            if m.nrows() != 1 << support.len() {
                return Err(Error::Parse(format!("{}{}: matrix does not match support size", self.family.as_str(), self.index)));
            }
            if let Some(q) = support.iter().find(|&&q| q >= width) {
                return Err(Error::Parse(format!("{}{}: qubit {q} outside {width} qubits", self.family.as_str(), self.index)));
            }
            let mut s = support.to_vec();
            s.sort_unstable();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Parse(format!("{}{}: repeated qubit in support", self.family.as_str(), self.index)));
            }
            Ok(LocalOp::new(support.to_vec(), m))
        };
        let terms = match (&self.support, &self.matrix, &self.terms) {
            (Some(s), Some(m), None) => vec![term(s, m)?],
            (None, None, Some(ts)) => ts.iter().map(|t| term(&t.support, &t.matrix)).collect::<Result<_>>()?,
            _ => return Err(Error::Parse(format!("{}{}: give either support+matrix or terms", self.family.as_str(), self.index))),
        };
        let g = Generator { family: self.family, index: self.index, mode, terms };
        if !g.is_hermitian(1e-12) {
            return Err(Error::Parse(format!("{}: matrix is not Hermitian", g.label())));
        }
        Ok(g)
    }
}

fn bits_string(b: &[bool]) -> String {
    b.iter().map(|&x| if x { '1' } else { '0' }).collect()
}

fn parse_bit_string(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Parse(format!("bad bit {other:?} in {s:?}"))),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqaProvenanceFile {
    pub circuit: CircuitFile,
    pub g: usize,
    pub g_prime: usize,
    pub epsilon_q: Num,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_override: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VqaFile {
    pub kind: Mode,
    pub registers: Registers,
    pub generators: Vec<GeneratorFile>,
    pub observable: GeneratorFile,
    pub m: u64,
    pub m_prime: u64,
    pub delta: Num,
    pub provenance: VqaProvenanceFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum KappaRuleFile {
    AllGenerators,
    Group2,
    Fixed(Num),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaoaProvenanceFile {
    /// The circuit after evenness padding.
    pub circuit: CircuitFile,
    pub g: usize,
    pub g_prime: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_override: Option<usize>,
    pub kappa_rule: KappaRuleFile,
    pub p_penalty: bool,
    pub padded_identity: bool,
    pub d_bumped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QaoaFile {
    pub kind: Mode,
    pub registers: Registers,
    pub group1: Vec<GeneratorFile>,
    pub group2: Vec<GeneratorFile>,
    pub h0: GeneratorFile,
    pub observable: GeneratorFile,
    pub kappa: Num,
    pub epsilon_q: Num,
    pub m: u64,
    pub m_prime: u64,
    pub delta: Num,
    pub ground_state_string: String,
    pub provenance: QaoaProvenanceFile,
}

/// Either kind of compiled instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Vqa(VqaInstance),
    Qaoa(QaoaInstance),
}

impl VqaFile {
    pub fn from_instance(i: &VqaInstance) -> Self {
        VqaFile {
            kind: Mode::Vqa,
            registers: i.registers,
            generators: i.generators.iter().map(GeneratorFile::from_generator).collect(),
            observable: GeneratorFile::from_generator(&i.observable),
            m: i.m,
            m_prime: i.m_prime,
            delta: Num(i.delta),
            provenance: VqaProvenanceFile {
                circuit: CircuitFile::from_circuit(&i.source.circuit),
                g: i.source.g,
                g_prime: i.source.g_prime,
                epsilon_q: Num(i.source.epsilon_q),
                d_override: i.d_override,
                frame: i.frame.as_deref().map(bits_string),
            },
        }
    }

    /// The instance exactly as stored (no consistency check).
    pub fn to_instance(&self) -> Result<VqaInstance> {
        let p = &self.provenance;
        let circuit = p.circuit.to_circuit()?;
        let source = QmsaInstance::new(circuit, p.g, p.g_prime, p.epsilon_q.0)?;
        let n = self.registers.total();
        Ok(VqaInstance {
            registers: self.registers,
            generators: self.generators.iter().map(|g| g.to_generator(Mode::Vqa, n)).collect::<Result<_>>()?,
            observable: self.observable.to_generator(Mode::Vqa, n)?,
            m: self.m,
            m_prime: self.m_prime,
            delta: self.delta.0,
            d_override: p.d_override,
            source,
            frame: p.frame.as_deref().map(parse_bit_string).transpose()?,
        })
    }
}

impl QaoaFile {
    pub fn from_instance(i: &QaoaInstance) -> Self {
        let gens = |v: &[Generator]| v.iter().map(GeneratorFile::from_generator).collect();
        let kappa_rule = match i.provenance.options.kappa {
            KappaRule::AllGenerators => KappaRuleFile::AllGenerators,
            KappaRule::Group2 => KappaRuleFile::Group2,
            KappaRule::Fixed(k) => KappaRuleFile::Fixed(Num(k)),
        };
        QaoaFile {
            kind: Mode::Qaoa,
            registers: i.registers,
            group1: gens(&i.group1),
            group2: gens(&i.group2),
            h0: GeneratorFile::from_generator(&i.h0),
            observable: GeneratorFile::from_generator(&i.observable),
            kappa: Num(i.kappa),
            epsilon_q: Num(i.epsilon_q),
            m: i.m,
            m_prime: i.m_prime,
            delta: Num(i.delta),
            ground_state_string: bits_string(&i.ground_state_string),
            provenance: QaoaProvenanceFile {
                circuit: CircuitFile::from_circuit(&i.source.circuit),
                g: i.source.g,
                g_prime: i.source.g_prime,
                d_override: i.d_override,
                kappa_rule,
                p_penalty: i.provenance.options.p_penalty,
                padded_identity: i.provenance.padded_identity,
                d_bumped: i.provenance.d_bumped,
            },
        }
    }

    pub fn to_instance(&self) -> Result<QaoaInstance> {
        let p = &self.provenance;
        let circuit = p.circuit.to_circuit()?;
        let source = QmsaInstance::new(circuit, p.g, p.g_prime, self.epsilon_q.0)?;
        let n = self.registers.total();
        let gens = |v: &[GeneratorFile]| v.iter().map(|g| g.to_generator(Mode::Qaoa, n)).collect::<Result<Vec<_>>>();
        let kappa = match p.kappa_rule {
            KappaRuleFile::AllGenerators => KappaRule::AllGenerators,
            KappaRuleFile::Group2 => KappaRule::Group2,
            KappaRuleFile::Fixed(k) => KappaRule::Fixed(k.0),
        };
        Ok(QaoaInstance {
            registers: self.registers,
            group1: gens(&self.group1)?,
            group2: gens(&self.group2)?,
            h0: self.h0.to_generator(Mode::Qaoa, n)?,
            observable: self.observable.to_generator(Mode::Qaoa, n)?,
            kappa: self.kappa.0,
            epsilon_q: self.epsilon_q.0,
            m: self.m,
            m_prime: self.m_prime,
            delta: self.delta.0,
            d_override: p.d_override,
            ground_state_string: parse_bit_string(&self.ground_state_string)?,
            source,
            provenance: QaoaProvenance { padded_identity: p.padded_identity, d_bumped: p.d_bumped, options: QaoaOptions { kappa, p_penalty: p.p_penalty } },
        })
    }
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    serde_json::to_string_pretty(v).map(|mut s| {
        s.push('\n');
        s
    }).map_err(|e| Error::Parse(e.to_string()))
}

fn parse_json<'a, T: Deserialize<'a>>(text: &'a str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn circuit_to_json(c: &VerifierCircuit) -> Result<String> {
    json(&CircuitFile::from_circuit(c))
}

pub fn circuit_from_json(text: &str) -> Result<VerifierCircuit> {
    parse_json::<CircuitFile>(text, "circuit")?.to_circuit()
}

pub fn vqa_to_json(i: &VqaInstance) -> Result<String> {
    json(&VqaFile::from_instance(i))
}

pub fn qaoa_to_json(i: &QaoaInstance) -> Result<String> {
    json(&QaoaFile::from_instance(i))
}

pub fn instance_to_json(i: &Instance) -> Result<String> {
    match i {
        Instance::Vqa(v) => vqa_to_json(v),
        Instance::Qaoa(q) => qaoa_to_json(q),
    }
}

/// Recompiles a VQA instance from its provenance exactly as `build_vqa` did.
pub fn recompile_vqa(i: &VqaInstance) -> Result<VqaInstance> {
    let mut r = build_vqa(&i.source, i.delta, i.d_override)?;
    if let Some(f) = &i.frame {
        r = conjugate_instance(&r, f)?;
    }
    Ok(r)
}

pub fn recompile_qaoa(i: &QaoaInstance) -> Result<QaoaInstance> {
    build_qaoa(&i.source, i.delta, i.d_override, i.provenance.options)
}

/// Parses an instance of either kind and checks that its stored data is
/// exactly what recompiling its provenance produces.
pub fn instance_from_json(text: &str) -> Result<Instance> {
    #[derive(Deserialize)]
    struct Kind {
        kind: Mode,
    }
    let kind: Kind = serde_json::from_str(text).map_err(|e| Error::Parse(format!("instance: {e}")))?;
    match kind.kind {
        Mode::Vqa => {
            let i = parse_json::<VqaFile>(text, "vqa instance")?.to_instance()?;
            if recompile_vqa(&i)? != i {
                return Err(Error::Parse("vqa instance: stored generators differ from recompiling the provenance circuit".into()));
            }
            Ok(Instance::Vqa(i))
        }
        Mode::Qaoa => {
            let i = parse_json::<QaoaFile>(text, "qaoa instance")?.to_instance()?;
            if recompile_qaoa(&i)? != i {
                return Err(Error::Parse("qaoa instance: stored generators differ from recompiling the provenance circuit".into()));
            }
            Ok(Instance::Qaoa(i))
        }
    }
}

pub fn schedule_to_json(s: &Schedule) -> Result<String> {
    json(s)
}

pub fn schedule_from_json(text: &str) -> Result<Schedule> {
    let s: Schedule = parse_json(text, "schedule")?;
    if let Some((i, st)) = s.steps.iter().enumerate().find(|(_, st)| !st.theta.is_finite()) {
        return Err(Error::Parse(format!("schedule step {i} ({}): non-finite angle", st.id)));
    }
    Ok(s)
}

/// Parses a little-endian witness string of exactly `n` bits.
pub fn parse_witness(s: &str, n: usize) -> Result<Vec<bool>> {
    let bits = parse_bit_string(s)?;
    if bits.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: bits.len() });
    }
    Ok(bits)
}
