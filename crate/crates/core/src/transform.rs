//! Lifetime-reducing transformation of a layered program.
//!
//! Walking the layers in order, every instruction that takes one of its
//! qubits out of the ground state is *adjusted*: it and every later
//! instruction that transitively shares a qubit with it (up to and including
//! the layer where one of those qubits is measured) are lifted out of their
//! bundles onto a stack, then put back top-down so the last one keeps its
//! layer and the others pack densely beneath it. Instructions only ever move
//! to later layers; leading layers that end up empty are dropped by moving
//! the start cursor.

use alloc::vec;
use alloc::vec::Vec;

use crate::layering::{stratify, to_sequence_with, Emission, LayeredProgram};
use crate::program::{FlatProgram, Instruction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QubitState {
    Ground,
    NotGround,
}

/// True iff every operand of `inst` is in state `s`.
pub fn check_qubits(inst: &Instruction, states: &[QubitState], s: QubitState) -> bool {
    inst.qubits.iter().all(|q| states[q.0] == s)
}

/// Put every operand of `inst` into state `s`.
pub fn set_qubits(inst: &Instruction, states: &mut [QubitState], s: QubitState) {
    for q in &inst.qubits {
        states[q.0] = s;
    }
}

/// Mutable transformation state over one layered program.
#[derive(Debug, Clone)]
pub struct Transformer {
    lp: LayeredProgram,
    states: Vec<QubitState>,
    /// Membership stamps for the qubit set collected by `adjust`.
    mark: Vec<u32>,
    generation: u32,
}

impl Transformer {
    /// Barriers are treated as already visited, so they are never adjusted.
    pub fn new(mut lp: LayeredProgram) -> Self {
        for id in 0..lp.program().len() {
            if lp.instruction(id).is_barrier() {
                lp.mark_visited(id);
            }
        }
        let nq = lp.num_qubits();
        Transformer { lp, states: vec![QubitState::Ground; nq], mark: vec![0; nq], generation: 0 }
    }

    pub fn layered(&self) -> &LayeredProgram {
        &self.lp
    }

    pub fn states(&self) -> &[QubitState] {
        &self.states
    }

    pub fn check_qubits(&self, id: usize, s: QubitState) -> bool {
        check_qubits(self.lp.instruction(id), &self.states, s)
    }

    pub fn set_qubits(&mut self, id: usize, s: QubitState) {
        set_qubits(self.lp.instruction(id), &mut self.states, s)
    }

    fn in_set(&self, id: usize) -> bool {
        self.lp.instruction(id).qubits.iter().any(|q| self.mark[q.0] == self.generation)
    }

    fn add_to_set(&mut self, id: usize) {
        let g = self.generation;
        for q in &self.lp.instruction(id).qubits {
            self.mark[q.0] = g;
        }
    }

    /// Delay `id` together with everything that depends on it.
    ///
    /// Scans the layers above `id`, lifting every instruction that shares a
    /// qubit with the collected set, whether or not it was visited before.
    /// Scanning ends with the layer in which a lifted instruction is a
    /// measurement, just before a layer holding a barrier on a collected
    /// qubit, or at the last layer. The lifted bundles are then re-inserted
    /// from the top of the stack: the top bundle stays where it was formed and
    /// each bundle below it lands one layer lower than the previous one.
    pub fn adjust(&mut self, id: usize) {
        self.lp.mark_visited(id);
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.generation = 1;
        }
        self.add_to_set(id);

        let origin = self.lp.layer_of(id);
        self.lp.take(origin, id);
        let mut stack: Vec<(usize, Vec<usize>)> = vec![(origin, vec![id])];

        let layers = self.lp.bundles().len();
        let mut cur = origin + 1;
        let mut stop = false;
        while cur < layers && !stop {
            let ids: Vec<usize> = self.lp.bundles()[cur].ids().collect();
            if ids.iter().any(|&x| self.lp.instruction(x).is_barrier() && self.in_set(x)) {
                break;
            }
            let mut lifted = Vec::new();
            for x in ids {
                if !self.in_set(x) {
                    continue;
                }
                self.add_to_set(x);
                self.lp.mark_visited(x);
                if self.lp.instruction(x).is_measure() {
                    stop = true;
                    self.set_qubits(x, QubitState::Ground);
                }
                self.lp.take(cur, x);
                lifted.push(x);
            }
            if !lifted.is_empty() {
                stack.push((cur, lifted));
            }
            cur += 1;
        }

        let mut line = stack.last().map(|(formed_at, _)| *formed_at).unwrap_or(origin);
        while let Some((_, ids)) = stack.pop() {
            for x in ids {
                self.lp.place(line, x);
            }
            line = line.wrapping_sub(1);
        }
    }

    /// Run the layer walk once, then drop leading empty layers.
    ///
    /// Qubit states follow the walk: an instruction passed over sets its
    /// qubits out of the ground state, and a measurement returns its qubit to
    /// ground, whether or not the instruction was adjusted.
    pub fn run(mut self) -> LayeredProgram {
        let layers = self.lp.bundles().len();
        for layer in self.lp.start()..layers {
            let ids: Vec<usize> = self.lp.bundles()[layer].ids().collect();
            for id in ids {
                let inst = self.lp.instruction(id);
                if inst.is_barrier() {
                    continue;
                }
                let measure = inst.is_measure();
                if self.lp.is_visited(id) || self.check_qubits(id, QubitState::NotGround) {
                    self.set_qubits(id, QubitState::NotGround);
                } else {
                    self.set_qubits(id, QubitState::NotGround);
                    self.adjust(id);
                }
                if measure {
                    self.set_qubits(id, QubitState::Ground);
                }
            }
        }
        self.lp.compact();
        self.lp
    }
}

/// Delay ground-state-leaving instructions and compact leading empty layers.
pub fn transform(lp: LayeredProgram) -> LayeredProgram {
    Transformer::new(lp).run()
}

/// Full pipeline on an expanded program: stratify, transform, and emit with
/// measurements hoisted ahead of independent gates.
pub fn optimize(fp: &FlatProgram) -> FlatProgram {
    optimize_with(fp, Emission::MeasuresFirst)
}

pub fn optimize_with(fp: &FlatProgram, emission: Emission) -> FlatProgram {
    to_sequence_with(&transform(stratify(fp)), emission)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::fig4a;
    use crate::layering::to_sequence;
    use crate::program::Qubit;
    use alloc::string::String;

    fn tokens(lp: &LayeredProgram) -> Vec<String> {
        lp.dump().lines().map(String::from).collect()
    }

    #[test]
    fn check_and_set_qubit_states() {
        let fp = crate::qasm::load("qreg a[2]; qreg b[1]; cx a[1],b[0]; h a[1];").unwrap();
        let mut states = vec![QubitState::Ground; 3];
        states[1] = QubitState::NotGround;
        let cx = &fp.instructions[0];
        assert!(!check_qubits(cx, &states, QubitState::NotGround));
        let h = &fp.instructions[1];
        set_qubits(h, &mut states, QubitState::NotGround);
        assert!(check_qubits(h, &states, QubitState::NotGround));
        set_qubits(cx, &mut states, QubitState::NotGround);
        let once = states.clone();
        set_qubits(cx, &mut states, QubitState::NotGround);
        assert_eq!(states, once);
        assert_eq!(states, [QubitState::Ground, QubitState::NotGround, QubitState::NotGround]);
    }

    #[test]
    fn adjusting_first_h_lifts_its_dependent_chain() {
        let mut t = Transformer::new(stratify(&fig4a()));
        t.set_qubits(0, QubitState::NotGround);
        t.adjust(0);
        let lp = t.layered();
        lp.verify().unwrap();
        // h q[1], cx q[1],q[2], cx q[11],q[1]
        assert_eq!((lp.layer_of(0), lp.layer_of(6), lp.layer_of(10)), (4, 5, 6));
        for id in [1, 2, 3, 4, 5, 7, 8, 9] {
            assert_eq!(lp.layer_of(id), stratify(&fig4a()).layer_of(id));
        }
    }

    #[test]
    fn second_adjust_empties_the_first_two_layers() {
        let mut t = Transformer::new(stratify(&fig4a()));
        for id in [0, 1] {
            t.set_qubits(id, QubitState::NotGround);
            t.adjust(id);
        }
        let lp = t.layered();
        assert!(lp.bundles()[0].is_empty() && lp.bundles()[1].is_empty());
        assert_eq!(
            tokens(lp),
            [
                "L0: -",
                "L1: -",
                "L2: h(q[2]) h(q[6])",
                "L3: cx(q[2],q[3]) cx(q[6],q[11])",
                "L4: h(q[1]) h(q[2]) h(q[11]) h(q[6])",
                "L5: cx(q[1],q[2]) cx(q[6],q[11])",
                "L6: cx(q[11],q[1])",
            ]
        );
    }

    #[test]
    fn transform_fig4a() {
        let lp = transform(stratify(&fig4a()));
        lp.verify().unwrap();
        assert_eq!(lp.depth(), 5);
        assert_eq!(lp.start(), 2);
        assert_eq!(
            tokens(&lp),
            [
                "L0: h(q[2]) h(q[6])",
                "L1: cx(q[2],q[3]) cx(q[6],q[11])",
                "L2: h(q[1]) h(q[2]) h(q[11]) h(q[6])",
                "L3: cx(q[1],q[2]) cx(q[6],q[11])",
                "L4: cx(q[11],q[1])",
            ]
        );
    }

    #[test]
    fn instruction_without_successors_stays_put() {
        let mut fp = FlatProgram::with_registers(&[("q", 2)], &[]);
        fp.push("h", &[], &[0], &[]);
        fp.push("h", &[], &[1], &[]);
        fp.push("x", &[], &[1], &[]);
        let mut t = Transformer::new(stratify(&fp));
        t.adjust(0);
        assert_eq!(t.layered().layer_of(0), 0);
    }

    #[test]
    fn single_bundle_is_unchanged() {
        let mut fp = FlatProgram::with_registers(&[("q", 3)], &[]);
        for q in 0..3 {
            fp.push("h", &[], &[q], &[]);
        }
        let lp = stratify(&fp);
        let out = transform(lp.clone());
        assert_eq!(tokens(&out), tokens(&lp));
        assert_eq!(to_sequence(&out), fp);
    }

    #[test]
    fn measured_qubit_is_ground_again_for_reuse() {
        // q[0] is measured and then restarted by an h that should be delayed
        // up to the cx it feeds.
        let src = "qreg q[2]; creg c[2]; h q[0]; measure q[0] -> c[0]; h q[0]; x q[1]; x q[1]; x q[1]; cx q[0],q[1];";
        let fp = crate::qasm::load(src).unwrap();
        let lp = transform(stratify(&fp));
        lp.verify().unwrap();
        let restart = 2;
        let cx = 6;
        assert_eq!(lp.layer_of(restart) + 1, lp.layer_of(cx));
    }

    #[test]
    fn barrier_blocks_motion() {
        let src = "qreg q[2]; h q[0]; barrier q; x q[1]; x q[1]; cx q[0],q[1];";
        let fp = crate::qasm::load(src).unwrap();
        let before = stratify(&fp);
        let lp = transform(before.clone());
        lp.verify().unwrap();
        assert_eq!(lp.layer_of(0), before.layer_of(0));
        assert!(lp.layer_of(0) < lp.layer_of(1));
    }

    #[test]
    fn lifetime_example_emits_h_after_first_measure() {
        let fp = crate::qasm::load(
            "qreg a[2];qreg b[1];creg c[3];h a;measure a[0]->c[0];cx a[1],b[0];measure a[1]->c[1];measure b[0]->c[2];",
        )
        .unwrap();
        let out = optimize(&fp);
        let pos = |op: &str, q: usize| {
            out.instructions.iter().position(|i| i.op == op && i.qubits[0] == Qubit(q)).unwrap()
        };
        assert!(pos("h", 1) > pos("measure", 0));
        for q in 0..3 {
            let before: Vec<_> = fp.ops_on(Qubit(q)).map(|i| fp.instructions[i].op.clone()).collect();
            let after: Vec<_> = out.ops_on(Qubit(q)).map(|i| out.instructions[i].op.clone()).collect();
            assert_eq!(before, after);
        }
    }
}
