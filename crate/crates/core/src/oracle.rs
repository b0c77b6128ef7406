//! Dense statevector simulator used to check that rewrites preserve meaning.
//!
//! Qubit `k` is bit `k` of the basis-state index. Common gates have built-in
//! matrices; anything else is simulated through its gate definition, so every
//! gate of the standard library and every user gate carried by the program
//! can be run. Measurements are rejected and barriers ignored.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as C;

use crate::program::{FlatProgram, Instruction};
use crate::qasm::ast::GateOp;
use crate::qasm::GateTable;

pub const MAX_QUBITS: usize = 12;
/// Tolerance used by the built-in checks.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("{n} qubits exceed the simulator limit of {max}")]
    TooManyQubits { n: usize, max: usize },
    #[error("no matrix or definition for gate `{name}`")]
    UnknownGate { name: String },
    #[error("instruction {id} is a measurement")]
    MeasurementPresent { id: usize },
    #[error("programs act on {a} and {b} qubits")]
    WidthMismatch { a: usize, b: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateMatrix {
    One([[C; 2]; 2]),
    /// Basis order |first operand, second operand>, first operand high.
    Two([[C; 4]; 4]),
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn phase(theta: f64) -> C {
    C::new(libm::cos(theta), libm::sin(theta))
}

fn u3(theta: f64, phi: f64, lambda: f64) -> [[C; 2]; 2] {
    let (cs, sn) = (libm::cos(theta / 2.0), libm::sin(theta / 2.0));
    [[c(cs, 0.0), -phase(lambda) * sn], [phase(phi) * sn, phase(phi + lambda) * cs]]
}

fn diag(a: C, b: C) -> [[C; 2]; 2] {
    [[a, C::default()], [C::default(), b]]
}

fn one_qubit(name: &str, p: &[f64]) -> Option<[[C; 2]; 2]> {
    let one = c(1.0, 0.0);
    let zero = C::default();
    let h = FRAC_1_SQRT_2;
    Some(match (name, p) {
        ("U" | "u3" | "u", &[t, ph, l]) => u3(t, ph, l),
        ("u2", &[ph, l]) => u3(FRAC_PI_2, ph, l),
        ("u1" | "p", &[l]) => diag(one, phase(l)),
        ("id", []) | ("u0", [_]) => diag(one, one),
        ("x", []) => [[zero, one], [one, zero]],
        ("y", []) => [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]],
        ("z", []) => diag(one, -one),
        ("h", []) => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
        ("s", []) => diag(one, phase(FRAC_PI_2)),
        ("sdg", []) => diag(one, phase(-FRAC_PI_2)),
        ("t", []) => diag(one, phase(FRAC_PI_4)),
        ("tdg", []) => diag(one, phase(-FRAC_PI_4)),
        ("sx", []) => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        ("sxdg", []) => [[c(0.5, -0.5), c(0.5, 0.5)], [c(0.5, 0.5), c(0.5, -0.5)]],
        ("rx", &[t]) => {
            let (cs, sn) = (libm::cos(t / 2.0), libm::sin(t / 2.0));
            [[c(cs, 0.0), c(0.0, -sn)], [c(0.0, -sn), c(cs, 0.0)]]
        }
        ("ry", &[t]) => {
            let (cs, sn) = (libm::cos(t / 2.0), libm::sin(t / 2.0));
            [[c(cs, 0.0), c(-sn, 0.0)], [c(sn, 0.0), c(cs, 0.0)]]
        }
        ("rz", &[t]) => diag(phase(-t / 2.0), phase(t / 2.0)),
        _ => return None,
    })
}

fn controlled(u: [[C; 2]; 2]) -> [[C; 4]; 4] {
    let mut m = [[C::default(); 4]; 4];
    m[0][0] = c(1.0, 0.0);
    m[1][1] = c(1.0, 0.0);
    for r in 0..2 {
        for k in 0..2 {
            m[2 + r][2 + k] = u[r][k];
        }
    }
    m
}

fn two_qubit(name: &str, p: &[f64]) -> Option<[[C; 4]; 4]> {
    let target = match (name, p) {
        ("CX" | "cx", []) => one_qubit("x", &[]),
        ("cy", []) => one_qubit("y", &[]),
        ("cz", []) => one_qubit("z", &[]),
        ("ch", []) => one_qubit("h", &[]),
        ("crx", [t]) => one_qubit("rx", &[*t]),
        ("cry", [t]) => one_qubit("ry", &[*t]),
        ("crz", [t]) => one_qubit("rz", &[*t]),
        ("cu1" | "cp", [l]) => one_qubit("u1", &[*l]),
        ("cu3", [t, ph, l]) => Some(u3(*t, *ph, *l)),
        ("swap", []) => {
            let mut m = [[C::default(); 4]; 4];
            for (r, k) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
                m[r][k] = c(1.0, 0.0);
            }
            return Some(m);
        }
        ("rzz", &[t]) => {
            let mut m = [[C::default(); 4]; 4];
            for (i, s) in [-1.0, 1.0, 1.0, -1.0].into_iter().enumerate() {
                m[i][i] = phase(s * t / 2.0);
            }
            return Some(m);
        }
        _ => None,
    };
    target.map(controlled)
}

/// Built-in matrix for a gate, if there is one.
pub fn gate_matrix(name: &str, params: &[f64]) -> Option<GateMatrix> {
    one_qubit(name, params).map(GateMatrix::One).or_else(|| two_qubit(name, params).map(GateMatrix::Two))
}

/// Names with a built-in matrix, and their parameter counts.
pub const BUILTIN_GATES: &[(&str, usize)] = &[
    ("U", 3), ("u3", 3), ("u", 3), ("u2", 2), ("u1", 1), ("p", 1), ("id", 0), ("u0", 1),
    ("x", 0), ("y", 0), ("z", 0), ("h", 0), ("s", 0), ("sdg", 0), ("t", 0), ("tdg", 0),
    ("sx", 0), ("sxdg", 0), ("rx", 1), ("ry", 1), ("rz", 1),
    ("CX", 0), ("cx", 0), ("cy", 0), ("cz", 0), ("ch", 0), ("crx", 1), ("cry", 1), ("crz", 1),
    ("cu1", 1), ("cp", 1), ("cu3", 3), ("swap", 0), ("rzz", 1),
];

impl GateMatrix {
    pub fn dim(&self) -> usize {
        match self {
            GateMatrix::One(_) => 2,
            GateMatrix::Two(_) => 4,
        }
    }

    pub fn entry(&self, r: usize, k: usize) -> C {
        match self {
            GateMatrix::One(m) => m[r][k],
            GateMatrix::Two(m) => m[r][k],
        }
    }

    /// Largest entry-wise deviation of U†U from the identity.
    pub fn unitarity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                let mut s = C::default();
                for k in 0..d {
                    s += self.entry(k, i).conj() * self.entry(k, j);
                }
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - expect).norm());
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C>,
}

impl StateVector {
    /// |0...0> on `n` qubits.
    pub fn zero(n: usize) -> Result<Self, OracleError> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self, OracleError> {
        if n > MAX_QUBITS {
            return Err(OracleError::TooManyQubits { n, max: MAX_QUBITS });
        }
        let mut amps = vec![C::default(); 1 << n];
        amps[index] = c(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> C {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// |<self|other>|, which is 1 for states equal up to global phase.
    pub fn overlap(&self, other: &StateVector) -> f64 {
        self.inner(other).norm()
    }

    pub fn apply(&mut self, m: &GateMatrix, qubits: &[usize]) {
        match m {
            GateMatrix::One(u) => self.apply_one(u, qubits[0]),
            GateMatrix::Two(u) => self.apply_two(u, qubits[0], qubits[1]),
        }
    }

    fn apply_one(&mut self, u: &[[C; 2]; 2], q: usize) {
        let bit = 1 << q;
        for i in (0..self.amps.len()).filter(|i| i & bit == 0) {
            let (a, b) = (self.amps[i], self.amps[i | bit]);
            self.amps[i] = u[0][0] * a + u[0][1] * b;
            self.amps[i | bit] = u[1][0] * a + u[1][1] * b;
        }
    }

    fn apply_two(&mut self, u: &[[C; 4]; 4], hi: usize, lo: usize) {
        let (bh, bl) = (1 << hi, 1 << lo);
        for i in (0..self.amps.len()).filter(|i| i & (bh | bl) == 0) {
            let idx = [i, i | bl, i | bh, i | bh | bl];
            let v = idx.map(|j| self.amps[j]);
            for (r, &j) in idx.iter().enumerate() {
                self.amps[j] = (0..4).map(|k| u[r][k] * v[k]).sum();
            }
        }
    }
}

/// Runs programs against one gate table.
pub struct Simulator {
    table: GateTable,
}

impl Simulator {
    /// Standard library plus the user gates `fp` carries.
    pub fn for_program(fp: &FlatProgram) -> Self {
        let mut table = GateTable::standard();
        for d in &fp.gate_defs {
            table.insert(d.clone());
        }
        Simulator { table }
    }

    pub fn run(&self, fp: &FlatProgram, state: &mut StateVector) -> Result<(), OracleError> {
        for inst in &fp.instructions {
            self.instruction(inst, state)?;
        }
        Ok(())
    }

    fn instruction(&self, inst: &Instruction, state: &mut StateVector) -> Result<(), OracleError> {
        if inst.is_measure() {
            return Err(OracleError::MeasurementPresent { id: inst.id });
        }
        if inst.is_barrier() {
            return Ok(());
        }
        let qubits: Vec<usize> = inst.qubits.iter().map(|q| q.0).collect();
        self.gate(&inst.op, &inst.params, &qubits, state, 0)
    }

    fn gate(&self, name: &str, params: &[f64], qubits: &[usize], state: &mut StateVector, depth: usize) -> Result<(), OracleError> {
        if let Some(m) = gate_matrix(name, params) {
            if m.dim() == 1 << qubits.len() {
                state.apply(&m, qubits);
                return Ok(());
            }
        }
        let unknown = || OracleError::UnknownGate { name: name.into() };
        let def = self.table.get(name).filter(|d| d.qubits.len() == qubits.len() && depth < 64).ok_or_else(unknown)?;
        let env: Vec<(&str, f64)> = def.params.iter().map(String::as_str).zip(params.iter().copied()).collect();
        let actual = |f: &String| qubits[def.qubits.iter().position(|x| x == f).expect("validated formal")];
        for op in &def.body {
            if let GateOp::Call { name: inner, params: exprs, qubits: formals } = op {
                let values = exprs.iter().map(|e| e.eval(&env)).collect::<Result<Vec<_>, _>>().map_err(|_| unknown())?;
                let mapped: Vec<usize> = formals.iter().map(actual).collect();
                self.gate(inner, &values, &mapped, state, depth + 1)?;
            }
        }
        Ok(())
    }
}

/// Final state of `fp` started from |0...0>.
pub fn simulate(fp: &FlatProgram) -> Result<StateVector, OracleError> {
    let mut s = StateVector::zero(fp.num_qubits())?;
    Simulator::for_program(fp).run(fp, &mut s)?;
    Ok(s)
}

/// Both programs restricted to the qubits either of them touches. Untouched
/// qubits stay in |0> and cannot affect the overlap.
fn restrict_pair(a: &FlatProgram, b: &FlatProgram) -> (FlatProgram, FlatProgram) {
    let mut map = vec![usize::MAX; a.num_qubits()];
    let mut next = 0;
    for inst in a.instructions.iter().chain(&b.instructions).filter(|i| !i.is_barrier()) {
        for q in &inst.qubits {
            if map[q.0] == usize::MAX {
                map[q.0] = next;
                next += 1;
            }
        }
    }
    let restrict = |fp: &FlatProgram| {
        let mut out = FlatProgram::with_registers(&[("q", next)], &[]);
        out.gate_defs = fp.gate_defs.clone();
        for inst in fp.instructions.iter().filter(|i| !i.is_barrier()) {
            let qs: Vec<usize> = inst.qubits.iter().map(|q| map[q.0]).collect();
            let cs: Vec<usize> = inst.clbits.iter().map(|c| c.0).collect();
            out.push(&inst.op, &inst.params, &qs, &cs);
        }
        out
    };
    (restrict(a), restrict(b))
}

/// |<simulate(a)|simulate(b)>|, simulating only the qubits in use.
pub fn fidelity(a: &FlatProgram, b: &FlatProgram) -> Result<f64, OracleError> {
    if a.num_qubits() != b.num_qubits() {
        return Err(OracleError::WidthMismatch { a: a.num_qubits(), b: b.num_qubits() });
    }
    if let Some(m) = a.instructions.iter().chain(&b.instructions).find(|i| i.is_measure()) {
        return Err(OracleError::MeasurementPresent { id: m.id });
    }
    let (ra, rb) = restrict_pair(a, b);
    Ok(simulate(&ra)?.overlap(&simulate(&rb)?))
}

/// Same final state up to global phase, within `tol`.
pub fn equivalent(a: &FlatProgram, b: &FlatProgram, tol: f64) -> Result<bool, OracleError> {
    Ok(fidelity(a, b)? >= 1.0 - tol)
}

/// Columns of the unitary implemented by `fp`: column `j` is the image of
/// basis state `j`.
pub fn unitary(fp: &FlatProgram) -> Result<Vec<StateVector>, OracleError> {
    let n = fp.num_qubits();
    let sim = Simulator::for_program(fp);
    (0..1usize << n.min(MAX_QUBITS + 1))
        .map(|j| {
            let mut s = StateVector::basis(n, j)?;
            sim.run(fp, &mut s)?;
            Ok(s)
        })
        .collect()
}

/// Same unitary up to one global phase, within `tol` per entry.
pub fn same_unitary(a: &FlatProgram, b: &FlatProgram, tol: f64) -> Result<bool, OracleError> {
    if a.num_qubits() != b.num_qubits() {
        return Err(OracleError::WidthMismatch { a: a.num_qubits(), b: b.num_qubits() });
    }
    let (ua, ub) = (unitary(a)?, unitary(b)?);
    let mut ratio: Option<C> = None;
    for (ca, cb) in ua.iter().zip(&ub) {
        for (x, y) in ca.amplitudes().iter().zip(cb.amplitudes()) {
            if ratio.is_none() && x.norm() > 0.5 / (1u64 << a.num_qubits()) as f64 {
                ratio = Some(y / x);
            }
            let r = ratio.unwrap_or(c(1.0, 0.0));
            if (x * r - y).norm() > tol {
                return Ok(false);
            }
        }
    }
    Ok(ratio.is_none_or(|r| (r.norm() - 1.0).abs() <= tol))
}

/// Worst unitarity error over every built-in gate at a few parameter values.
pub fn table_unitarity_error() -> f64 {
    let samples = [0.0, 0.3, -1.7, PI, 2.5];
    let mut worst: f64 = 0.0;
    for &(name, k) in BUILTIN_GATES {
        for (i, &s) in samples.iter().enumerate() {
            let params: Vec<f64> = (0..k).map(|j| s + 0.41 * j as f64 + 0.07 * i as f64).collect();
            let m = gate_matrix(name, &params).expect("listed gate has a matrix");
            worst = worst.max(m.unitarity_error());
        }
    }
    worst
}
