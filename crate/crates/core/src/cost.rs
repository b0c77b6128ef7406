//! Execution time and qubit lifetime.
//!
//! Durations are integers in units of one single-qubit gate time. A qubit's
//! lifetime is made of segments: a segment opens at the first operation on
//! the qubit while it is in the ground state and closes at the next
//! measurement of it, or at its last operation. Barriers neither open nor
//! close segments.
//!
//! Two timing models are provided. In the layered model every non-empty
//! layer takes as long as its slowest member and a segment lasts from the
//! layer that opens it through the layer that closes it. In the serial model
//! instructions run one after another and a segment lasts from its opening
//! instruction through its closing instruction, inclusive.

use alloc::vec;
use alloc::vec::Vec;

use crate::layering::{stratify, Bundle, LayeredProgram};
use crate::program::{FlatProgram, Instruction, OpKind};
use crate::transform::{optimize, transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CostModel {
    pub single_qubit: u64,
    pub two_qubit: u64,
    pub measure: u64,
    pub barrier: u64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { single_qubit: 1, two_qubit: 2, measure: 15, barrier: 0 }
    }
}

impl CostModel {
    pub fn with_measure(measure: u64) -> Self {
        CostModel { measure, ..Self::default() }
    }

    /// Every field multiplied by `k`.
    pub fn scaled(self, k: u64) -> Self {
        CostModel {
            single_qubit: self.single_qubit * k,
            two_qubit: self.two_qubit * k,
            measure: self.measure * k,
            barrier: self.barrier * k,
        }
    }

    pub fn instruction_cost(&self, inst: &Instruction) -> u64 {
        match inst.kind() {
            OpKind::Measure => self.measure,
            OpKind::Barrier => self.barrier,
            OpKind::Gate if inst.arity() >= 2 => self.two_qubit,
            OpKind::Gate => self.single_qubit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Model {
    #[default]
    Layered,
    Serial,
}

/// What the average lifetime is divided by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum AvgDenominator {
    /// All declared qubits.
    #[default]
    Declared,
    /// Qubits touched by at least one non-barrier instruction.
    Active,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LifetimeReport {
    pub mode: Model,
    pub execution_time: u64,
    pub depth: usize,
    pub per_qubit: Vec<u64>,
    pub longest_lifetime: u64,
    pub average_lifetime: f64,
    pub average_denominator: AvgDenominator,
}

/// Cost of the slowest member; 0 for an empty bundle.
pub fn layer_cost(lp: &LayeredProgram, b: &Bundle, cm: &CostModel) -> u64 {
    b.ids().map(|id| cm.instruction_cost(lp.instruction(id))).max().unwrap_or(0)
}

pub fn execution_time(lp: &LayeredProgram, cm: &CostModel) -> u64 {
    lp.live_layers().map(|(_, b)| layer_cost(lp, b, cm)).sum()
}

/// Sum of instruction costs, every instruction run on its own.
pub fn serial_execution_time(fp: &FlatProgram, cm: &CostModel) -> u64 {
    fp.instructions.iter().map(|i| cm.instruction_cost(i)).sum()
}

/// Lifetime segments of a qubit as (opening, closing) instruction ids.
fn segments(fp: &FlatProgram, ops: impl Iterator<Item = usize>) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut open: Option<(usize, usize)> = None;
    for id in ops {
        let inst = &fp.instructions[id];
        if inst.is_barrier() {
            continue;
        }
        let seg = open.get_or_insert((id, id));
        seg.1 = id;
        if inst.is_measure() {
            out.extend(open.take());
        }
    }
    out.extend(open);
    out
}

/// Cumulative layer costs so that `p[b + 1] - p[a]` covers layers `a..=b`.
fn layer_prefix(lp: &LayeredProgram, cm: &CostModel) -> Vec<u64> {
    let mut p = vec![0; lp.bundles().len() + 1];
    for (i, b) in lp.bundles().iter().enumerate() {
        let c = if i < lp.start() { 0 } else { layer_cost(lp, b, cm) };
        p[i + 1] = p[i] + c;
    }
    p
}

fn layered_with_prefix(lp: &LayeredProgram, q: usize, prefix: &[u64]) -> u64 {
    segments(lp.program(), lp.ops_on(crate::Qubit(q)).iter().copied())
        .into_iter()
        .map(|(a, b)| prefix[lp.layer_of(b) + 1] - prefix[lp.layer_of(a)])
        .sum()
}

pub fn layered_lifetime(lp: &LayeredProgram, q: usize, cm: &CostModel) -> u64 {
    layered_with_prefix(lp, q, &layer_prefix(lp, cm))
}

pub fn serial_lifetime(fp: &FlatProgram, q: usize, cm: &CostModel) -> u64 {
    let mut prefix = vec![0u64; fp.len() + 1];
    for (i, inst) in fp.instructions.iter().enumerate() {
        prefix[i + 1] = prefix[i] + cm.instruction_cost(inst);
    }
    serial_with_prefix(fp, q, &prefix)
}

fn serial_with_prefix(fp: &FlatProgram, q: usize, prefix: &[u64]) -> u64 {
    // Positions rather than ids, in case the list has not been renumbered.
    let positions = fp.instructions.iter().enumerate().filter(|(_, i)| i.qubits.iter().any(|x| x.0 == q));
    segments(fp, positions.map(|(p, _)| p)).into_iter().map(|(a, b)| prefix[b + 1] - prefix[a]).sum()
}

fn active(fp: &FlatProgram) -> Vec<bool> {
    let mut used = vec![false; fp.num_qubits()];
    for inst in fp.instructions.iter().filter(|i| !i.is_barrier()) {
        for q in &inst.qubits {
            used[q.0] = true;
        }
    }
    used
}

fn report(
    fp: &FlatProgram,
    mode: Model,
    execution_time: u64,
    depth: usize,
    per_qubit: Vec<u64>,
    denom: AvgDenominator,
) -> LifetimeReport {
    let count = match denom {
        AvgDenominator::Declared => per_qubit.len(),
        AvgDenominator::Active => active(fp).iter().filter(|&&u| u).count(),
    };
    let total: u64 = per_qubit.iter().sum();
    LifetimeReport {
        mode,
        execution_time,
        depth,
        longest_lifetime: per_qubit.iter().copied().max().unwrap_or(0),
        average_lifetime: if count == 0 { 0.0 } else { total as f64 / count as f64 },
        per_qubit,
        average_denominator: denom,
    }
}

/// Report on an existing layering, without re-stratifying.
pub fn analyze_layered(lp: &LayeredProgram, cm: &CostModel, denom: AvgDenominator) -> LifetimeReport {
    let prefix = layer_prefix(lp, cm);
    let per_qubit = (0..lp.num_qubits()).map(|q| layered_with_prefix(lp, q, &prefix)).collect();
    report(lp.program(), Model::Layered, execution_time(lp, cm), lp.depth(), per_qubit, denom)
}

/// Report on an instruction list. The reported depth is that of the greedy
/// layering in both models.
pub fn analyze(fp: &FlatProgram, cm: &CostModel, model: Model, denom: AvgDenominator) -> LifetimeReport {
    let lp = stratify(fp);
    match model {
        Model::Layered => analyze_layered(&lp, cm, denom),
        Model::Serial => {
            let mut prefix = vec![0u64; fp.len() + 1];
            for (i, inst) in fp.instructions.iter().enumerate() {
                prefix[i + 1] = prefix[i] + cm.instruction_cost(inst);
            }
            let per_qubit = (0..fp.num_qubits()).map(|q| serial_with_prefix(fp, q, &prefix)).collect();
            report(fp, Model::Serial, prefix[fp.len()], lp.depth(), per_qubit, denom)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Comparison {
    pub before: LifetimeReport,
    pub after: LifetimeReport,
}

/// Reports before and after optimization. The layered "after" is measured on
/// the transformed layering itself; the serial one on the emitted sequence.
pub fn compare(fp: &FlatProgram, cm: &CostModel, model: Model, denom: AvgDenominator) -> Comparison {
    let before = analyze(fp, cm, model, denom);
    let after = match model {
        Model::Layered => analyze_layered(&transform(stratify(fp)), cm, denom),
        Model::Serial => analyze(&optimize(fp), cm, model, denom),
    };
    Comparison { before, after }
}

/// Relative reduction from `before` to `after`, as a fraction of `before`.
pub fn reduction(before: f64, after: f64) -> f64 {
    if before == 0.0 {
        0.0
    } else {
        (before - after) / before
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::{fig1, fig4a};
    use crate::layering::stratify;
    use crate::transform::optimize;

    #[test]
    fn homogeneous_and_mixed_layer_costs() {
        let cm = CostModel::default();
        let lp = stratify(&fig4a());
        assert_eq!(layer_cost(&lp, &lp.bundles()[0], &cm), 1);
        assert_eq!(layer_cost(&lp, &lp.bundles()[6], &cm), 2);
        let fp = crate::qasm::load("qreg a[2]; qreg b[1]; creg c[1]; measure a[0] -> c[0]; cx a[1],b[0];").unwrap();
        let lp = stratify(&fp);
        assert_eq!(lp.depth(), 1);
        assert_eq!(layer_cost(&lp, &lp.bundles()[0], &cm), 15);
    }

    #[test]
    fn fig4_layered_numbers() {
        let cm = CostModel::default();
        let before = stratify(&fig4a());
        assert_eq!(execution_time(&before, &cm), 11);
        assert_eq!(layered_lifetime(&before, 1, &cm), 11);
        let after = transform(before);
        assert_eq!(execution_time(&after, &cm), 8);
        assert_eq!(layered_lifetime(&after, 1, &cm), 5);
        assert_eq!(layered_lifetime(&after, 3, &cm), 2);
        assert_eq!(layered_lifetime(&after, 0, &cm), 0);
    }

    #[test]
    fn fig4_report() {
        let r = analyze(&fig4a(), &CostModel::default(), Model::Layered, AvgDenominator::Declared);
        assert_eq!((r.execution_time, r.longest_lifetime, r.depth), (11, 11, 7));
        assert_eq!(r.per_qubit.len(), 16);
        let sum: u64 = r.per_qubit.iter().sum();
        assert!((r.average_lifetime - sum as f64 / 16.0).abs() < 1e-12);
        let active = analyze(&fig4a(), &CostModel::default(), Model::Layered, AvgDenominator::Active);
        assert!((active.average_lifetime - sum as f64 / 5.0).abs() < 1e-12);
    }

    #[test]
    fn fig1_serial_lifetime_is_parametric_in_m() {
        for m in [15, 50] {
            let cm = CostModel::with_measure(m);
            assert_eq!(serial_lifetime(&fig1(), 1, &cm), 3 + 2 * m);
            assert_eq!(serial_lifetime(&optimize(&fig1()), 1, &cm), 3 + m);
        }
    }

    #[test]
    fn lone_measure_costs_m_and_untouched_is_zero() {
        let fp = crate::qasm::load("qreg q[2]; creg c[1]; measure q[0] -> c[0];").unwrap();
        let cm = CostModel::with_measure(20);
        assert_eq!(serial_lifetime(&fp, 0, &cm), 20);
        assert_eq!(serial_lifetime(&fp, 1, &cm), 0);
        assert_eq!(layered_lifetime(&stratify(&fp), 0, &cm), 20);
    }

    #[test]
    fn reuse_after_measure_sums_segments() {
        let fp = crate::qasm::load("qreg q[2]; creg c[1]; h q[0]; measure q[0] -> c[0]; x q[1]; h q[0];").unwrap();
        let cm = CostModel::default();
        // segment one: h + measure; segment two: the final h alone.
        assert_eq!(serial_lifetime(&fp, 0, &cm), 16 + 1);
    }

    #[test]
    fn empty_program_reports_zeros() {
        let fp = FlatProgram::with_registers(&[("q", 3)], &[]);
        for model in [Model::Layered, Model::Serial] {
            let r = analyze(&fp, &CostModel::default(), model, AvgDenominator::Active);
            assert_eq!((r.execution_time, r.longest_lifetime, r.depth), (0, 0, 0));
            assert_eq!(r.average_lifetime, 0.0);
        }
    }

    #[test]
    fn scaling_costs_scales_durations() {
        let base = CostModel::default();
        for model in [Model::Layered, Model::Serial] {
            let a = analyze(&fig4a(), &base, model, AvgDenominator::Declared);
            let b = analyze(&fig4a(), &base.scaled(3), model, AvgDenominator::Declared);
            assert_eq!(b.execution_time, 3 * a.execution_time);
            assert!(a.per_qubit.iter().zip(&b.per_qubit).all(|(x, y)| *y == 3 * x));
        }
    }

    #[test]
    fn compare_fig4() {
        let c = compare(&fig4a(), &CostModel::default(), Model::Layered, AvgDenominator::Declared);
        assert_eq!((c.before.execution_time, c.after.execution_time), (11, 8));
        assert_eq!((c.before.per_qubit[1], c.after.per_qubit[1]), (11, 5));
        // q[11] runs from its first cx to the last one in both layerings.
        assert_eq!((c.before.longest_lifetime, c.after.longest_lifetime), (11, 7));
        assert_eq!((c.before.per_qubit[11], c.after.per_qubit[11]), (7, 7));
    }
}
