//! Layered bundle format.
//!
//! A [`LayeredProgram`] is an array of [`Bundle`]s indexed by layer. Each
//! bundle holds instructions whose qubit sets are pairwise disjoint, and for
//! every qubit the instructions touching it sit on strictly increasing
//! layers in program order. The dependency DAG is implicit in the per-qubit
//! instruction lists.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;
use core::fmt::Write;

use crate::program::{FlatProgram, Instruction, Qubit};

/// A set of mutually parallelizable instructions, referenced by id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bundle {
    members: BTreeSet<usize>,
    /// Layer the bundle was assembled at.
    pub formed_at: usize,
}

impl Bundle {
    pub fn new(formed_at: usize) -> Self {
        Bundle { members: BTreeSet::new(), formed_at }
    }

    /// Member ids in ascending order.
    pub fn ids(&self) -> impl DoubleEndedIterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members.contains(&id)
    }

    pub(crate) fn insert(&mut self, id: usize) {
        self.members.insert(id);
    }

    pub(crate) fn remove(&mut self, id: usize) -> bool {
        self.members.remove(&id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LayerError {
    #[error("instruction {id} is recorded at layer {recorded} but not found there")]
    Misplaced { id: usize, recorded: usize },
    #[error("instruction {id} appears in {count} bundles")]
    Duplicated { id: usize, count: usize },
    #[error("instructions {a} and {b} share a qubit inside layer {layer}")]
    Overlap { layer: usize, a: usize, b: usize },
    #[error("instructions {first} and {second} on qubit {qubit} are out of order (layers {l1}, {l2})")]
    OrderViolation { qubit: usize, first: usize, second: usize, l1: usize, l2: usize },
    #[error("layer {layer} lies below the start cursor {start} but is not empty")]
    BelowStart { layer: usize, start: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayeredProgram {
    program: FlatProgram,
    bundles: Vec<Bundle>,
    start: usize,
    seq: Vec<usize>,
    visited: Vec<bool>,
    qubit_ops: Vec<Vec<usize>>,
}

/// Greedy sequential packing: keep adding instructions to the current
/// bundle while each one is disjoint from the qubits already in it, and
/// close the bundle at the first overlap. A barrier always occupies a layer
/// of its own.
pub fn stratify(fp: &FlatProgram) -> LayeredProgram {
    let mut program = fp.clone();
    program.renumber();
    let n = program.len();
    let nq = program.num_qubits();

    let mut bundles: Vec<Bundle> = Vec::new();
    let mut seq = vec![0; n];
    let mut current = Bundle::new(0);
    let mut used = vec![false; nq];
    let mut touched: Vec<Qubit> = Vec::new();

    fn close(current: &mut Bundle, bundles: &mut Vec<Bundle>, used: &mut [bool], touched: &mut Vec<Qubit>) {
        if !current.is_empty() {
            current.formed_at = bundles.len();
            bundles.push(core::mem::take(current));
        }
        for q in touched.drain(..) {
            used[q.0] = false;
        }
    }

    for inst in &program.instructions {
        if inst.is_barrier() || inst.qubits.iter().any(|q| used[q.0]) {
            close(&mut current, &mut bundles, &mut used, &mut touched);
        }
        seq[inst.id] = bundles.len();
        current.insert(inst.id);
        for &q in &inst.qubits {
            used[q.0] = true;
            touched.push(q);
        }
        if inst.is_barrier() {
            close(&mut current, &mut bundles, &mut used, &mut touched);
        }
    }
    close(&mut current, &mut bundles, &mut used, &mut touched);

    let mut qubit_ops = vec![Vec::new(); nq];
    for inst in &program.instructions {
        for q in &inst.qubits {
            qubit_ops[q.0].push(inst.id);
        }
    }
    LayeredProgram { program, bundles, start: 0, seq, visited: vec![false; n], qubit_ops }
}

/// How [`to_sequence_with`] orders instructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Emission {
    /// Layer by layer from the start cursor; ascending original id within a layer.
    #[default]
    LayerOrder,
    /// Topological order keyed by (layer, id), except that a measurement is
    /// emitted as soon as every earlier operation on its qubit has been, so
    /// that in a sequential reading it does not sit inside other qubits'
    /// lifetimes.
    MeasuresFirst,
}

/// Emit the layered program as a flat program in layer order.
pub fn to_sequence(lp: &LayeredProgram) -> FlatProgram {
    to_sequence_with(lp, Emission::LayerOrder)
}

pub fn to_sequence_with(lp: &LayeredProgram, emission: Emission) -> FlatProgram {
    let order = match emission {
        Emission::LayerOrder => lp.live_layers().flat_map(|(_, b)| b.ids()).collect(),
        Emission::MeasuresFirst => lp.measures_first_order(),
    };
    let mut fp = FlatProgram {
        qregs: lp.program.qregs.clone(),
        cregs: lp.program.cregs.clone(),
        gate_defs: lp.program.gate_defs.clone(),
        instructions: order.into_iter().map(|id: usize| lp.program.instructions[id].clone()).collect(),
    };
    fp.renumber();
    fp
}

impl LayeredProgram {
    /// The underlying program, in original order with ids matching positions.
    pub fn program(&self) -> &FlatProgram {
        &self.program
    }

    pub fn instruction(&self, id: usize) -> &Instruction {
        &self.program.instructions[id]
    }

    pub fn num_qubits(&self) -> usize {
        self.qubit_ops.len()
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.bundles
    }

    pub fn start(&self) -> usize {
        self.start
    }

    /// Absolute layer index of an instruction.
    pub fn layer_of(&self, id: usize) -> usize {
        self.seq[id]
    }

    /// Layer index counted from the start cursor.
    pub fn relative_layer_of(&self, id: usize) -> usize {
        self.seq[id] - self.start
    }

    pub fn is_visited(&self, id: usize) -> bool {
        self.visited[id]
    }

    /// Instruction ids touching `q`, in program order.
    pub fn ops_on(&self, q: Qubit) -> &[usize] {
        &self.qubit_ops[q.0]
    }

    /// Non-empty bundles at or above the start cursor, with their indices.
    pub fn live_layers(&self) -> impl Iterator<Item = (usize, &Bundle)> + '_ {
        self.bundles.iter().enumerate().skip(self.start).filter(|(_, b)| !b.is_empty())
    }

    /// Number of non-empty bundles at or above the start cursor.
    pub fn depth(&self) -> usize {
        self.live_layers().count()
    }

    /// Union of member qubit sets.
    pub fn bundle_qubits(&self, layer: usize) -> Vec<Qubit> {
        self.bundles[layer].ids().flat_map(|id| self.instruction(id).qubits.iter().copied()).collect()
    }

    pub(crate) fn mark_visited(&mut self, id: usize) {
        self.visited[id] = true;
    }

    pub(crate) fn take(&mut self, layer: usize, id: usize) {
        let removed = self.bundles[layer].remove(id);
        debug_assert!(removed, "instruction {} not in layer {}", id, layer);
    }

    pub(crate) fn place(&mut self, layer: usize, id: usize) {
        self.bundles[layer].insert(id);
        self.seq[id] = layer;
    }

    /// Advance the start cursor past leading empty bundles.
    pub(crate) fn compact(&mut self) {
        while self.start < self.bundles.len() && self.bundles[self.start].is_empty() {
            self.start += 1;
        }
    }

    fn measures_first_order(&self) -> Vec<usize> {
        let n = self.program.len();
        let mut pending = vec![0usize; n];
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
        for ops in &self.qubit_ops {
            for w in ops.windows(2) {
                pending[w[1]] += 1;
                succ[w[0]].push(w[1]);
            }
        }
        let key = |id: usize| {
            let class = if self.instruction(id).is_measure() { 0u8 } else { 1 };
            Reverse((class, self.seq[id], id))
        };
        let mut ready: BinaryHeap<_> = (0..n).filter(|&id| pending[id] == 0).map(key).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse((_, _, id))) = ready.pop() {
            order.push(id);
            for &s in &succ[id] {
                pending[s] -= 1;
                if pending[s] == 0 {
                    ready.push(key(s));
                }
            }
        }
        order
    }

    /// Check every structural invariant of the layered format.
    pub fn verify(&self) -> Result<(), LayerError> {
        let mut seen = vec![0usize; self.program.len()];
        for (layer, b) in self.bundles.iter().enumerate() {
            if layer < self.start && !b.is_empty() {
                return Err(LayerError::BelowStart { layer, start: self.start });
            }
            let ids: Vec<usize> = b.ids().collect();
            for (i, &a) in ids.iter().enumerate() {
                seen[a] += 1;
                for &other in &ids[i + 1..] {
                    if self.instruction(a).overlaps(self.instruction(other)) {
                        return Err(LayerError::Overlap { layer, a, b: other });
                    }
                }
            }
        }
        for (id, &count) in seen.iter().enumerate() {
            if count != 1 {
                return Err(LayerError::Duplicated { id, count });
            }
            if !self.bundles[self.seq[id]].contains(id) {
                return Err(LayerError::Misplaced { id, recorded: self.seq[id] });
            }
        }
        for (q, ops) in self.qubit_ops.iter().enumerate() {
            for w in ops.windows(2) {
                let (l1, l2) = (self.seq[w[0]], self.seq[w[1]]);
                if l1 >= l2 {
                    return Err(LayerError::OrderViolation { qubit: q, first: w[0], second: w[1], l1, l2 });
                }
            }
        }
        Ok(())
    }

    /// One line per layer from the start cursor: `L<k>: op(qubits) ...`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (k, b) in self.bundles.iter().enumerate().skip(self.start) {
            let _ = write!(s, "L{}:", k - self.start);
            if b.is_empty() {
                s.push_str(" -");
            }
            for id in b.ids() {
                s.push(' ');
                self.write_token(&mut s, id);
            }
            s.push('\n');
        }
        s
    }

    fn write_token(&self, s: &mut String, id: usize) {
        let inst = self.instruction(id);
        s.push_str(&inst.op);
        s.push('(');
        for (i, q) in inst.qubits.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            let _ = write!(s, "{}", self.program.qubit_name(*q));
        }
        s.push(')');
    }

    /// Graphviz rendering of the dependency DAG: qubit start nodes on rank 0,
    /// one rank per live layer, one edge per direct per-qubit dependency.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph layered {\n  rankdir=TB;\n  node [shape=ellipse];\n");
        s.push_str("  { rank=same;");
        for (q, ops) in self.qubit_ops.iter().enumerate() {
            if !ops.is_empty() {
                let _ = write!(s, " q{} [shape=box,label=\"{}\"];", q, self.program.qubit_name(Qubit(q)));
            }
        }
        s.push_str(" }\n");
        for (_, b) in self.live_layers() {
            s.push_str("  { rank=same;");
            for id in b.ids() {
                let _ = write!(s, " n{} [label=\"{}\"];", id, self.instruction(id).op);
            }
            s.push_str(" }\n");
        }
        for (q, ops) in self.qubit_ops.iter().enumerate() {
            let mut prev: Option<usize> = None;
            for &id in ops {
                match prev {
                    None => {
                        let _ = writeln!(s, "  q{} -> n{};", q, id);
                    }
                    Some(p) => {
                        let _ = writeln!(s, "  n{} -> n{};", p, id);
                    }
                }
                prev = Some(id);
            }
        }
        s.push_str("}\n");
        s
    }
}
