//! Flat (fully expanded) instruction streams.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::qasm::ast::GateDef;

/// Global qubit index: register offset plus element index, in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Qubit(pub usize);

impl Qubit {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

/// Global classical bit index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Clbit(pub usize);

impl Clbit {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Gate,
    Measure,
    Barrier,
}

/// One expanded quantum operation.
///
/// Layer assignment and the visited flag used by the transformer are kept
/// in [`crate::layering::LayeredProgram`], keyed by `id`, so that a flat
/// program stays a plain value.
#[derive(Debug, Clone, PartialEq)]
pub struct Instruction {
    pub id: usize,
    pub op: String,
    pub params: Vec<f64>,
    pub qubits: Vec<Qubit>,
    pub clbits: Vec<Clbit>,
}

impl Instruction {
    pub fn kind(&self) -> OpKind {
        match self.op.as_str() {
            "measure" => OpKind::Measure,
            "barrier" => OpKind::Barrier,
            _ => OpKind::Gate,
        }
    }

    pub fn is_measure(&self) -> bool {
        self.kind() == OpKind::Measure
    }

    pub fn is_barrier(&self) -> bool {
        self.kind() == OpKind::Barrier
    }

    /// Number of qubit operands.
    pub fn arity(&self) -> usize {
        self.qubits.len()
    }

    /// True when the qubit sets intersect.
    pub fn overlaps(&self, other: &Instruction) -> bool {
        self.qubits.iter().any(|q| other.qubits.contains(q))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Register {
    pub name: String,
    pub size: usize,
    /// Global index of element 0.
    pub offset: usize,
}

/// An expanded program: register tables, the user-defined gate definitions
/// still referenced by atomic instructions, and the instruction list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FlatProgram {
    pub qregs: Vec<Register>,
    pub cregs: Vec<Register>,
    pub gate_defs: Vec<GateDef>,
    pub instructions: Vec<Instruction>,
}

impl FlatProgram {
    /// Empty program over the given `(name, size)` register lists.
    pub fn with_registers(qregs: &[(&str, usize)], cregs: &[(&str, usize)]) -> Self {
        fn table(regs: &[(&str, usize)]) -> Vec<Register> {
            let mut offset = 0;
            regs.iter()
                .map(|&(name, size)| {
                    let r = Register { name: name.into(), size, offset };
                    offset += size;
                    r
                })
                .collect()
        }
        FlatProgram {
            qregs: table(qregs),
            cregs: table(cregs),
            gate_defs: Vec::new(),
            instructions: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.qregs.iter().map(|r| r.size).sum()
    }

    pub fn num_clbits(&self) -> usize {
        self.cregs.iter().map(|r| r.size).sum()
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// Append an instruction, assigning the next id.
    pub fn push(&mut self, op: &str, params: &[f64], qubits: &[usize], clbits: &[usize]) {
        let id = self.instructions.len();
        self.instructions.push(Instruction {
            id,
            op: op.into(),
            params: params.to_vec(),
            qubits: qubits.iter().copied().map(Qubit).collect(),
            clbits: clbits.iter().copied().map(Clbit).collect(),
        });
    }

    /// Reassign ids 0..n-1 in list order.
    pub fn renumber(&mut self) {
        for (i, inst) in self.instructions.iter_mut().enumerate() {
            inst.id = i;
        }
    }

    pub fn qubit_name(&self, q: Qubit) -> BitName<'_> {
        locate(&self.qregs, q.0)
    }

    pub fn clbit_name(&self, c: Clbit) -> BitName<'_> {
        locate(&self.cregs, c.0)
    }

    /// Instruction ids touching `q`, in program order.
    pub fn ops_on(&self, q: Qubit) -> impl Iterator<Item = usize> + '_ {
        self.instructions
            .iter()
            .filter(move |i| i.qubits.contains(&q))
            .map(|i| i.id)
    }

    /// For every qubit, the list of instruction positions that touch it.
    pub fn per_qubit_positions(&self) -> Vec<Vec<usize>> {
        let mut out = alloc::vec![Vec::new(); self.num_qubits()];
        for (pos, inst) in self.instructions.iter().enumerate() {
            for q in &inst.qubits {
                out[q.0].push(pos);
            }
        }
        out
    }
}

/// `reg[index]` display helper.
#[derive(Debug, Clone, Copy)]
pub struct BitName<'a> {
    pub register: &'a str,
    pub index: usize,
}

impl fmt::Display for BitName<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.register, self.index)
    }
}

fn locate(regs: &[Register], global: usize) -> BitName<'_> {
    regs.iter()
        .find(|r| global >= r.offset && global < r.offset + r.size)
        .map(|r| BitName { register: &r.name, index: global - r.offset })
        .unwrap_or(BitName { register: "?", index: global })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registers_get_consecutive_offsets() {
        let fp = FlatProgram::with_registers(&[("a", 2), ("b", 1)], &[("c", 3)]);
        assert_eq!(fp.num_qubits(), 3);
        assert_eq!(fp.qregs[1].offset, 2);
        assert_eq!(alloc::format!("{}", fp.qubit_name(Qubit(2))), "b[0]");
        assert_eq!(alloc::format!("{}", fp.clbit_name(Clbit(1))), "c[1]");
    }

    #[test]
    fn overlap_is_set_intersection() {
        let mut fp = FlatProgram::with_registers(&[("q", 4)], &[]);
        fp.push("cx", &[], &[0, 1], &[]);
        fp.push("cx", &[], &[1, 0], &[]);
        fp.push("h", &[], &[2], &[]);
        let [a, b, c] = [&fp.instructions[0], &fp.instructions[1], &fp.instructions[2]];
        assert!(a.overlaps(b));
        assert!(!a.overlaps(c));
    }
}
