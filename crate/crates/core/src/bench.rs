//! Workload generators: the two worked examples, the QFT family, an
//! entangler, a Bell pair with a spectator gap, and seeded random circuits.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::program::FlatProgram;

pub const FIG1_QASM: &str = "OPENQASM 2.0;
include \"qelib1.inc\";
qreg a[2];qreg b[1];
creg c[3];
h a;
measure a[0]->c[0];

cx a[1],b[0];
measure a[1]->c[1];
measure b[0]->c[2];
";

pub const FIG4A_QASM: &str = "OPENQASM 2.0;
include \"qelib1.inc\";
qreg q[16];
creg c[16];
h q[1];
h q[2];
cx q[2], q[3];
h q[2];
h q[6];
cx q[6], q[11];
cx q[1], q[2];
h q[11];
h q[6];
cx q[6], q[11];
cx q[11], q[1];
";

/// The two-register measurement example.
pub fn fig1() -> FlatProgram {
    crate::qasm::load(FIG1_QASM).expect("bundled example parses")
}

/// The eleven-instruction layering example on `q[16]`.
pub fn fig4a() -> FlatProgram {
    crate::qasm::load(FIG4A_QASM).expect("bundled example parses")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum WorkloadKind {
    Fig1,
    Fig4a,
    BellGap,
    Qft,
    Iqft,
    Entangler,
    Random,
}

impl WorkloadKind {
    pub const ALL: [WorkloadKind; 7] = [
        WorkloadKind::Fig1,
        WorkloadKind::Fig4a,
        WorkloadKind::BellGap,
        WorkloadKind::Qft,
        WorkloadKind::Iqft,
        WorkloadKind::Entangler,
        WorkloadKind::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WorkloadKind::Fig1 => "fig1",
            WorkloadKind::Fig4a => "fig4a",
            WorkloadKind::BellGap => "bell_gap",
            WorkloadKind::Qft => "qft",
            WorkloadKind::Iqft => "iqft",
            WorkloadKind::Entangler => "entangler",
            WorkloadKind::Random => "random",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }
}

/// Relative weights of single-qubit gates, two-qubit gates and measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Mix {
    pub single: f64,
    pub two: f64,
    pub measure: f64,
}

impl Default for Mix {
    fn default() -> Self {
        Mix { single: 0.5, two: 0.4, measure: 0.1 }
    }
}

impl Mix {
    pub fn gates_only() -> Self {
        Mix { measure: 0.0, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WorkloadSpec {
    pub kind: WorkloadKind,
    /// Qubits. Ignored by the two fixed examples and by `bell_gap`.
    pub n: usize,
    pub seed: u64,
    /// Spectator instructions between the Bell pair's h and cx.
    pub gap: usize,
    pub mix: Mix,
    /// Instruction count for random circuits.
    pub len: usize,
    /// Let random circuits keep operating on measured qubits.
    pub reuse: bool,
}

impl WorkloadSpec {
    pub fn new(kind: WorkloadKind, n: usize) -> Self {
        WorkloadSpec { kind, n, seed: 0, gap: 4, mix: Mix::default(), len: 40, reuse: false }
    }

    pub fn random(n: usize, len: usize, seed: u64, mix: Mix) -> Self {
        WorkloadSpec { seed, len, mix, ..Self::new(WorkloadKind::Random, n) }
    }

    pub fn label(&self) -> String {
        match self.kind {
            WorkloadKind::Fig1 | WorkloadKind::Fig4a => self.kind.name().into(),
            WorkloadKind::BellGap => format!("bell_gap{}", self.gap),
            WorkloadKind::Random => format!("random{}s{}", self.n, self.seed),
            k => format!("{}{}", k.name(), self.n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("invalid workload spec: {0}")]
    InvalidSpec(String),
}

pub fn generate(ws: &WorkloadSpec) -> Result<FlatProgram, SpecError> {
    let invalid = |m: &str| Err(SpecError::InvalidSpec(m.into()));
    let needs_n = !matches!(ws.kind, WorkloadKind::Fig1 | WorkloadKind::Fig4a | WorkloadKind::BellGap);
    if needs_n && ws.n == 0 {
        return invalid("n must be at least 1");
    }
    match ws.kind {
        WorkloadKind::Fig1 => Ok(fig1()),
        WorkloadKind::Fig4a => Ok(fig4a()),
        WorkloadKind::BellGap => Ok(bell_gap(ws.gap)),
        WorkloadKind::Qft => Ok(qft(ws.n)),
        WorkloadKind::Iqft => Ok(iqft(ws.n)),
        WorkloadKind::Entangler => Ok(entangler(ws.n)),
        WorkloadKind::Random => {
            let w = [ws.mix.single, ws.mix.two, ws.mix.measure];
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return invalid("mix weights must be finite and non-negative");
            }
            let usable = [w[0], if ws.n >= 2 { w[1] } else { 0.0 }, w[2]];
            if ws.len > 0 && usable.iter().all(|x| *x == 0.0) {
                return invalid("mix leaves no operation that fits the qubit count");
            }
            Ok(random(ws.n, ws.len, ws.seed, usable, ws.reuse))
        }
    }
}

fn qft_gates(n: usize) -> Vec<(&'static str, f64, Vec<usize>)> {
    let mut out = Vec::new();
    for j in 0..n {
        out.push(("h", 0.0, alloc::vec![j]));
        for k in j + 1..n {
            out.push(("cu1", PI / libm::pow(2.0, (k - j) as f64), alloc::vec![k, j]));
        }
    }
    out
}

fn from_gates(n: usize, gates: impl Iterator<Item = (&'static str, f64, Vec<usize>)>) -> FlatProgram {
    let mut fp = FlatProgram::with_registers(&[("q", n)], &[]);
    for (op, angle, qs) in gates {
        let params: &[f64] = if op == "h" { &[] } else { core::slice::from_ref(&angle) };
        fp.push(op, params, &qs, &[]);
    }
    fp
}

/// Textbook QFT without the final swaps: `h` and controlled phases.
pub fn qft(n: usize) -> FlatProgram {
    from_gates(n, qft_gates(n).into_iter())
}

/// The QFT reversed gate by gate with every angle negated.
pub fn iqft(n: usize) -> FlatProgram {
    from_gates(n, qft_gates(n).into_iter().rev().map(|(op, a, q)| (op, -a, q)))
}

/// `h` on the first qubit, a cx from it to every other qubit, then
/// measurement of every qubit.
pub fn entangler(n: usize) -> FlatProgram {
    let mut fp = FlatProgram::with_registers(&[("q", n)], &[("c", n)]);
    fp.push("h", &[], &[0], &[]);
    for k in 1..n {
        fp.push("cx", &[], &[0, k], &[]);
    }
    for k in 0..n {
        fp.push("measure", &[], &[k], &[k]);
    }
    fp
}

/// A Bell pair on `q[0]`, `q[1]` whose `h` and `cx` are separated by `gap`
/// dependent gates on the spectator `s[0]`, then both halves measured.
pub fn bell_gap(gap: usize) -> FlatProgram {
    let mut fp = FlatProgram::with_registers(&[("q", 2), ("s", 1)], &[("c", 2)]);
    fp.push("h", &[], &[0], &[]);
    for i in 0..gap {
        fp.push(if i % 2 == 0 { "x" } else { "h" }, &[], &[2], &[]);
    }
    fp.push("cx", &[], &[0, 1], &[]);
    fp.push("measure", &[], &[0], &[0]);
    fp.push("measure", &[], &[1], &[1]);
    fp
}

const ONE_QUBIT: &[(&str, usize)] = &[
    ("h", 0), ("x", 0), ("y", 0), ("z", 0), ("s", 0), ("sdg", 0), ("t", 0), ("tdg", 0),
    ("rx", 1), ("ry", 1), ("rz", 1), ("u3", 3),
];
const TWO_QUBIT: &[(&str, usize)] = &[("cx", 0), ("cz", 0), ("cy", 0), ("swap", 0), ("cu1", 1), ("crz", 1), ("rzz", 1)];

fn random(n: usize, len: usize, seed: u64, weights: [f64; 3], reuse: bool) -> FlatProgram {
    let mut fp = FlatProgram::with_registers(&[("q", n)], &[("c", n)]);
    if len == 0 {
        return fp;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kinds = WeightedIndex::new(weights).expect("validated weights");
    let mut live: Vec<usize> = (0..n).collect();
    while fp.len() < len {
        let pool: Vec<usize> = if reuse { (0..n).collect() } else { live.clone() };
        let kind = kinds.sample(&mut rng);
        if pool.is_empty() || (kind == 1 && pool.len() < 2) {
            if pool.is_empty() || weights[0] == 0.0 && weights[2] == 0.0 {
                break;
            }
            continue;
        }
        let a = pool[rng.gen_range(0..pool.len())];
        match kind {
            0 => {
                let (op, k) = ONE_QUBIT[rng.gen_range(0..ONE_QUBIT.len())];
                let params: Vec<f64> = (0..k).map(|_| rng.gen_range(-PI..PI)).collect();
                fp.push(op, &params, &[a], &[]);
            }
            1 => {
                let mut b = a;
                while b == a {
                    b = pool[rng.gen_range(0..pool.len())];
                }
                let (op, k) = TWO_QUBIT[rng.gen_range(0..TWO_QUBIT.len())];
                let params: Vec<f64> = (0..k).map(|_| rng.gen_range(-PI..PI)).collect();
                fp.push(op, &params, &[a, b], &[]);
            }
            _ => {
                fp.push("measure", &[], &[a], &[a]);
                live.retain(|&q| q != a);
            }
        }
    }
    fp
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::program::Qubit;

    #[test]
    fn fixed_examples() {
        let f = fig4a();
        assert_eq!(f.len(), 11);
        assert_eq!(f.num_qubits(), 16);
        assert_eq!(fig1().len(), 6);
        assert_eq!(fig1().num_clbits(), 3);
    }

    #[test]
    fn qft_sizes() {
        let one = qft(1);
        assert_eq!(one.len(), 1);
        assert_eq!(one.instructions[0].op, "h");
        assert_eq!(iqft(4).len(), 10);
        assert_eq!(iqft(64).len(), 64 + 64 * 63 / 2);
        let ops: Vec<_> = iqft(4).instructions.iter().filter(|i| i.op == "h").map(|i| i.qubits[0]).collect();
        assert_eq!(ops, [Qubit(3), Qubit(2), Qubit(1), Qubit(0)]);
    }

    #[test]
    fn iqft_reverses_qft() {
        for n in 1..=6 {
            let mut both = qft(n);
            both.instructions.extend(iqft(n).instructions);
            both.renumber();
            let identity = FlatProgram::with_registers(&[("q", n)], &[]);
            assert!(oracle::same_unitary(&both, &identity, 1e-9).unwrap());
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let ws = WorkloadSpec::random(6, 50, 42, Mix::default());
        assert_eq!(generate(&ws).unwrap(), generate(&ws).unwrap());
        let other = WorkloadSpec { seed: 43, ..ws.clone() };
        assert_ne!(generate(&ws).unwrap(), generate(&other).unwrap());
    }

    #[test]
    fn random_never_touches_a_measured_qubit() {
        for seed in 0..30 {
            let fp = generate(&WorkloadSpec::random(4, 60, seed, Mix { single: 1.0, two: 1.0, measure: 1.0 })).unwrap();
            let mut dead = [false; 4];
            for i in &fp.instructions {
                assert!(i.qubits.iter().all(|q| !dead[q.0]));
                if i.is_measure() {
                    dead[i.qubits[0].0] = true;
                }
            }
        }
    }

    #[test]
    fn random_with_reuse_fills_length() {
        let ws = WorkloadSpec { reuse: true, ..WorkloadSpec::random(3, 80, 7, Mix { single: 1.0, two: 1.0, measure: 2.0 }) };
        assert_eq!(generate(&ws).unwrap().len(), 80);
    }

    #[test]
    fn invalid_specs() {
        assert!(generate(&WorkloadSpec::new(WorkloadKind::Qft, 0)).is_err());
        let bad = WorkloadSpec::random(3, 10, 0, Mix { single: -1.0, two: 1.0, measure: 0.0 });
        assert!(matches!(generate(&bad), Err(SpecError::InvalidSpec(_))));
        let two_only = WorkloadSpec::random(1, 10, 0, Mix { single: 0.0, two: 1.0, measure: 0.0 });
        assert!(generate(&two_only).is_err());
    }

    #[test]
    fn entangler_and_bell_gap_shapes() {
        let e = entangler(6);
        assert_eq!(e.len(), 1 + 5 + 6);
        let b = bell_gap(3);
        assert_eq!(b.len(), 1 + 3 + 1 + 2);
        assert_eq!(b.instructions[4].op, "cx");
    }

    #[test]
    fn every_kind_round_trips_through_text() {
        for kind in WorkloadKind::ALL {
            let fp = generate(&WorkloadSpec::new(kind, 5)).unwrap();
            let back = crate::qasm::load(&crate::qasm::emit(&fp)).unwrap();
            assert_eq!(back.len(), fp.len());
            for (a, b) in fp.instructions.iter().zip(&back.instructions) {
                assert_eq!((&a.op, &a.qubits, &a.clbits), (&b.op, &b.qubits, &b.clbits));
                assert!(a.params.iter().zip(&b.params).all(|(x, y)| (x - y).abs() <= 1e-11 * x.abs().max(1.0)));
            }
        }
    }
}
