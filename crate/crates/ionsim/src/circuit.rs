//! Gate-level circuit IR and its line-oriented text format.
//!
//! One instruction per line, parameters in `name=value` form with exact
//! decimal round-trip, e.g.
//!
//! ```text
//! qubits 2
//! RPHI q0 theta=1.5707963267948966 phi=0
//! MSXX q0 q1 chi=0.7853981633974483
//! CX q0 q1
//! H q0
//! ```
//!
//! Lines starting with `#` are comments.

use std::fmt;

use crate::error::{Error, Result};

/// Gate alphabet: native kinds (RPHI, RZ, MSXX) plus the two non-native
/// kinds the transpiler understands (H, CX) and a no-op barrier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InstructionKind {
    RPhi { theta: f64, phi: f64 },
    RZ { theta: f64 },
    MsXX { chi: f64 },
    H,
    CX,
    Barrier,
}

impl InstructionKind {
    pub fn name(&self) -> &'static str {
        match self {
            InstructionKind::RPhi { .. } => "RPHI",
            InstructionKind::RZ { .. } => "RZ",
            InstructionKind::MsXX { .. } => "MSXX",
            InstructionKind::H => "H",
            InstructionKind::CX => "CX",
            InstructionKind::Barrier => "BARRIER",
        }
    }

    pub fn is_native(&self) -> bool {
        matches!(
            self,
            InstructionKind::RPhi { .. }
                | InstructionKind::RZ { .. }
                | InstructionKind::MsXX { .. }
                | InstructionKind::Barrier
        )
    }

    fn arity(&self) -> usize {
        match self {
            InstructionKind::MsXX { .. } | InstructionKind::CX => 2,
            _ => 1,
        }
    }
}

/// Wall-clock durations of the physical pulses. A pi-pulse takes `dur_1q`
/// and rotation time scales linearly with |theta|; the entangling gate takes
/// `dur_2q`; virtual RZ and barriers are free.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateTimings {
    pub dur_1q: f64,
    pub dur_2q: f64,
}

impl Default for GateTimings {
    fn default() -> Self {
        Self {
            dur_1q: 10e-6,
            dur_2q: 200e-6,
        }
    }
}

impl From<&crate::noise::NoiseSpec> for GateTimings {
    fn from(spec: &crate::noise::NoiseSpec) -> Self {
        Self {
            dur_1q: spec.dur_1q_seconds,
            dur_2q: spec.dur_2q_seconds,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub kind: InstructionKind,
    pub targets: Vec<usize>,
}

impl Instruction {
    pub fn new(kind: InstructionKind, targets: Vec<usize>) -> Result<Self> {
        if kind.arity() != targets.len() && kind != InstructionKind::Barrier {
            return Err(Error::UnsupportedArity(targets.len()));
        }
        if targets.is_empty() || targets.len() > 2 {
            return Err(Error::UnsupportedArity(targets.len()));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return Err(Error::DuplicateTarget(targets[0]));
        }
        Ok(Self { kind, targets })
    }

    pub fn r_phi(target: usize, theta: f64, phi: f64) -> Self {
        Self {
            kind: InstructionKind::RPhi { theta, phi },
            targets: vec![target],
        }
    }

    /// `R_x = R_{phi=0}`.
    pub fn r_x(target: usize, theta: f64) -> Self {
        Self::r_phi(target, theta, 0.0)
    }

    /// `R_y = R_{phi=pi/2}`.
    pub fn r_y(target: usize, theta: f64) -> Self {
        Self::r_phi(target, theta, std::f64::consts::FRAC_PI_2)
    }

    pub fn r_z(target: usize, theta: f64) -> Self {
        Self {
            kind: InstructionKind::RZ { theta },
            targets: vec![target],
        }
    }

    pub fn ms_xx(a: usize, b: usize, chi: f64) -> Self {
        Self {
            kind: InstructionKind::MsXX { chi },
            targets: vec![a, b],
        }
    }

    pub fn h(target: usize) -> Self {
        Self {
            kind: InstructionKind::H,
            targets: vec![target],
        }
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self {
            kind: InstructionKind::CX,
            targets: vec![control, target],
        }
    }

    pub fn barrier(targets: Vec<usize>) -> Self {
        Self {
            kind: InstructionKind::Barrier,
            targets,
        }
    }

    /// Pulse duration in seconds. Zero for the virtual RZ and barriers.
    pub fn duration(&self, timings: &GateTimings) -> f64 {
        match self.kind {
            InstructionKind::RPhi { theta, .. } => {
                theta.abs() / std::f64::consts::PI * timings.dur_1q
            }
            InstructionKind::H => timings.dur_1q / 2.0, // R_y(-pi/2) pulse; RZ is free
            InstructionKind::MsXX { .. } | InstructionKind::CX => timings.dur_2q,
            InstructionKind::RZ { .. } | InstructionKind::Barrier => 0.0,
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind.name())?;
        for t in &self.targets {
            write!(f, " q{t}")?;
        }
        match self.kind {
            InstructionKind::RPhi { theta, phi } => write!(f, " theta={theta} phi={phi}"),
            InstructionKind::RZ { theta } => write!(f, " theta={theta}"),
            InstructionKind::MsXX { chi } => write!(f, " chi={chi}"),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            instructions: Vec::new(),
        }
    }

    pub fn push(&mut self, instruction: Instruction) -> Result<()> {
        for &t in &instruction.targets {
            if t >= self.n_qubits {
                return Err(Error::QubitIndex {
                    index: t,
                    n_qubits: self.n_qubits,
                });
            }
        }
        self.instructions.push(instruction);
        Ok(())
    }

    pub fn extend(&mut self, instructions: impl IntoIterator<Item = Instruction>) -> Result<()> {
        for ins in instructions {
            self.push(ins)?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn is_native(&self) -> bool {
        self.instructions.iter().all(|i| i.kind.is_native())
    }

    pub fn total_duration(&self, timings: &GateTimings) -> f64 {
        self.instructions.iter().map(|i| i.duration(timings)).sum()
    }

    /// Instruction tally keyed by kind name, in a fixed display order.
    pub fn gate_counts(&self) -> Vec<(&'static str, usize)> {
        let mut counts = [("RPHI", 0), ("RZ", 0), ("MSXX", 0), ("H", 0), ("CX", 0), ("BARRIER", 0)];
        for ins in &self.instructions {
            let name = ins.kind.name();
            if let Some(slot) = counts.iter_mut().find(|(k, _)| *k == name) {
                slot.1 += 1;
            }
        }
        counts.into_iter().filter(|&(_, c)| c > 0).collect()
    }

    pub fn count_kind(&self, name: &str) -> usize {
        self.instructions
            .iter()
            .filter(|i| i.kind.name() == name)
            .count()
    }

    /// Serialize to the line-oriented text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("qubits {}\n", self.n_qubits);
        for ins in &self.instructions {
            out.push_str(&ins.to_string());
            out.push('\n');
        }
        out
    }

    /// Parse the text format. Reports the first offending line.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut n_qubits: Option<usize> = None;
        let mut instructions = Vec::new();
        let mut max_target = 0usize;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().expect("non-empty line");
            let rest: Vec<&str> = parts.collect();
            if head.eq_ignore_ascii_case("qubits") {
                let n = rest
                    .first()
                    .ok_or_else(|| parse_err(line_no, "missing qubit count"))?
                    .parse::<usize>()
                    .map_err(|e| parse_err(line_no, &format!("bad qubit count: {e}")))?;
                n_qubits = Some(n);
                continue;
            }
            let (targets, params) = split_targets_params(&rest, line_no)?;
            for &t in &targets {
                max_target = max_target.max(t);
            }
            let kind = match head.to_ascii_uppercase().as_str() {
                "RPHI" => InstructionKind::RPhi {
                    theta: require_param(&params, "theta", line_no)?,
                    phi: require_param(&params, "phi", line_no)?,
                },
                "RZ" => InstructionKind::RZ {
                    theta: require_param(&params, "theta", line_no)?,
                },
                "MSXX" => InstructionKind::MsXX {
                    chi: require_param(&params, "chi", line_no)?,
                },
                "H" => InstructionKind::H,
                "CX" => InstructionKind::CX,
                "BARRIER" => InstructionKind::Barrier,
                other => return Err(parse_err(line_no, &format!("unknown gate `{other}`"))),
            };
            let instruction = Instruction::new(kind, targets)
                .map_err(|e| parse_err(line_no, &e.to_string()))?;
            instructions.push(instruction);
        }
        let n = n_qubits.unwrap_or(0).max(if instructions.is_empty() {
            0
        } else {
            max_target + 1
        });
        if n == 0 {
            return Err(parse_err(0, "empty circuit: no `qubits` header and no instructions"));
        }
        let mut circuit = Circuit::new(n);
        for (i, ins) in instructions.into_iter().enumerate() {
            circuit
                .push(ins)
                .map_err(|e| parse_err(i + 1, &e.to_string()))?;
        }
        Ok(circuit)
    }
}

fn parse_err(line: usize, msg: &str) -> Error {
    Error::Parse {
        line,
        msg: msg.to_string(),
    }
}

type ParsedLine = (Vec<usize>, Vec<(String, f64)>);

fn split_targets_params(tokens: &[&str], line_no: usize) -> Result<ParsedLine> {
    let mut targets = Vec::new();
    let mut params = Vec::new();
    for tok in tokens {
        if let Some(stripped) = tok.strip_prefix('q') {
            if let Ok(idx) = stripped.parse::<usize>() {
                if !params.is_empty() {
                    return Err(parse_err(line_no, "qubit targets must precede parameters"));
                }
                targets.push(idx);
                continue;
            }
        }
        if let Some((name, value)) = tok.split_once('=') {
            let v = value
                .parse::<f64>()
                .map_err(|e| parse_err(line_no, &format!("bad value for `{name}`: {e}")))?;
            if !v.is_finite() {
                return Err(parse_err(line_no, &format!("non-finite value for `{name}`")));
            }
            params.push((name.to_string(), v));
        } else {
            return Err(parse_err(line_no, &format!("unrecognized token `{tok}`")));
        }
    }
    if targets.is_empty() {
        return Err(parse_err(line_no, "instruction names no target qubits"));
    }
    Ok((targets, params))
}

fn require_param(params: &[(String, f64)], name: &str, line_no: usize) -> Result<f64> {
    params
        .iter()
        .find(|(n, _)| n == name)
        .map(|(_, v)| *v)
        .ok_or_else(|| parse_err(line_no, &format!("missing parameter `{name}`")))
}
