//! Qubit-lifetime reduction for flat OpenQASM 2.0 programs.
//!
//! The pipeline is: [`qasm::parse`] and [`qasm::expand`] produce a
//! [`FlatProgram`]; [`layering::stratify`] packs it greedily into bundles of
//! mutually disjoint instructions; [`transform::transform`] delays
//! instructions that pull a qubit out of the ground state until just before
//! they are needed; [`layering::to_sequence`] turns the layers back into a
//! program. [`cost`] measures execution time and per-qubit lifetime under a
//! configurable cost model, and [`oracle`] is a small statevector simulator
//! used to check that rewrites preserve semantics.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod bench;
pub mod cost;
pub mod layering;
pub mod oracle;
pub mod program;
pub mod qasm;
pub mod transform;

pub use cost::{AvgDenominator, CostModel, LifetimeReport, Model};
pub use layering::{stratify, to_sequence, Bundle, Emission, LayeredProgram};
pub use program::{Clbit, FlatProgram, Instruction, OpKind, Qubit, Register};
pub use qasm::QasmError;
pub use transform::{optimize, transform, QubitState};
