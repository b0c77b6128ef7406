//! OpenQASM 2.0 frontend: parse flat-format text, expand gate calls and
//! register broadcasts into a [`FlatProgram`](crate::program::FlatProgram),
//! and emit such programs back to text.
//!
//! Supported statements: `OPENQASM`, `include "qelib1.inc"`, `qreg`, `creg`,
//! `gate`, gate calls (including built-in `U` and `CX`), `measure` and
//! `barrier`. `if`, `reset` and `opaque` are rejected. The standard gate
//! library ([`QELIB1`]) is always in scope, with or without the include line.

pub mod ast;
mod emit;
mod expand;
mod lexer;
mod parser;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub use ast::{Arg, Expr, GateDef, GateOp, Pos, Program, RegDecl, Statement};
pub use emit::{emit, format_angle};
pub use expand::expand;
pub use parser::parse;

/// Standard gate library, parsed on demand. Built-ins `U` and `CX` are
/// primitive and have no definition here.
pub const QELIB1: &str = include_str!("qelib1.inc");

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QasmError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unsupported statement `{stmt}`")]
    Unsupported { pos: Pos, stmt: String },
    #[error("{pos}: undeclared register `{name}`")]
    UndeclaredRegister { pos: Pos, name: String },
    #[error("{pos}: index {index} out of range for register `{name}` of size {size}")]
    IndexOutOfRange { pos: Pos, name: String, index: usize, size: usize },
    #[error("{pos}: `{name}` is already declared")]
    Duplicate { pos: Pos, name: String },
    #[error("{pos}: unknown gate `{name}`")]
    UnknownGate { pos: Pos, name: String },
    #[error("{pos}: `{name}` takes {expected} {what}, found {found}")]
    ArgumentCount { pos: Pos, name: String, what: ArgKind, expected: usize, found: usize },
    #[error("{pos}: `{name}` applied to the same qubit twice")]
    RepeatedOperand { pos: Pos, name: String },
    #[error("{pos}: unknown identifier `{name}`")]
    UnknownIdentifier { pos: Pos, name: String },
    #[error("{pos}: cannot expand `{name}`: {reason}")]
    Expansion { pos: Pos, name: String, reason: String },
    #[error("{pos}: register size mismatch in `{name}`: {detail}")]
    ArityMismatch { pos: Pos, name: String, detail: String },
}

impl QasmError {
    pub fn pos(&self) -> Pos {
        match self {
            QasmError::Syntax { pos, .. }
            | QasmError::Unsupported { pos, .. }
            | QasmError::UndeclaredRegister { pos, .. }
            | QasmError::IndexOutOfRange { pos, .. }
            | QasmError::Duplicate { pos, .. }
            | QasmError::UnknownGate { pos, .. }
            | QasmError::ArgumentCount { pos, .. }
            | QasmError::RepeatedOperand { pos, .. }
            | QasmError::UnknownIdentifier { pos, .. }
            | QasmError::Expansion { pos, .. }
            | QasmError::ArityMismatch { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgKind {
    Parameters,
    Qubits,
}

impl fmt::Display for ArgKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArgKind::Parameters => "parameters",
            ArgKind::Qubits => "qubit operands",
        })
    }
}

/// Gate signatures and bodies visible to a program.
#[derive(Debug, Clone, Default)]
pub struct GateTable {
    defs: Vec<GateDef>,
}

impl GateTable {
    /// The `qelib1.inc` definitions.
    pub fn standard() -> Self {
        parser::parse_library(QELIB1).expect("bundled qelib1.inc parses")
    }

    pub fn get(&self, name: &str) -> Option<&GateDef> {
        self.defs.iter().find(|g| g.name == name)
    }

    /// `(parameter count, qubit count)` for any callable gate, built-ins included.
    pub fn signature(&self, name: &str) -> Option<(usize, usize)> {
        match name {
            "U" => Some((3, 1)),
            "CX" => Some((0, 2)),
            _ => self.get(name).map(|g| (g.params.len(), g.qubits.len())),
        }
    }

    pub fn insert(&mut self, def: GateDef) {
        self.defs.push(def);
    }

    pub fn iter(&self) -> impl Iterator<Item = &GateDef> {
        self.defs.iter()
    }
}

/// Parse and expand in one step.
pub fn load(text: &str) -> Result<crate::program::FlatProgram, QasmError> {
    expand(&parse(text)?)
}
