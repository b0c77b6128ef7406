use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::ast::*;
use super::{GateTable, QasmError};
use crate::program::{Clbit, FlatProgram, Instruction, Qubit, Register};

/// Expand a parsed program into a flat instruction list.
///
/// Gate calls on one or two qubits stay atomic under their own names. Calls
/// with three or more qubit operands are replaced by their bodies, recursively,
/// until every non-barrier instruction has at most two operands. Gates with an
/// empty body produce nothing. Register operands broadcast elementwise.
pub fn expand(p: &Program) -> Result<FlatProgram, QasmError> {
    let mut table = GateTable::standard();
    for def in &p.gate_defs {
        table.insert(def.clone());
    }
    let mut out = FlatProgram {
        qregs: layout(&p.qregs),
        cregs: layout(&p.cregs),
        gate_defs: p.gate_defs.clone(),
        instructions: Vec::new(),
    };
    let mut cx = Expander { table: &table, out: &mut out.instructions };
    for stmt in &p.statements {
        match stmt {
            Statement::Gate { name, params, args, pos } => {
                let values = params
                    .iter()
                    .map(|e| e.eval(&[]).map_err(|n| QasmError::UnknownIdentifier { pos: *pos, name: n }))
                    .collect::<Result<Vec<_>, _>>()?;
                let operands: Vec<Vec<Qubit>> =
                    args.iter().map(|a| resolve(&out.qregs, a).into_iter().map(Qubit).collect()).collect();
                for qubits in broadcast(name, *pos, &operands)? {
                    cx.call(name, &values, &qubits, *pos, 0)?;
                }
            }
            Statement::Measure { qubit, bit, pos } => {
                let qs = resolve(&out.qregs, qubit);
                let cs = resolve(&out.cregs, bit);
                if qs.len() != cs.len() {
                    return Err(QasmError::ArityMismatch {
                        pos: *pos,
                        name: "measure".into(),
                        detail: format!("{} qubits measured into {} bits", qs.len(), cs.len()),
                    });
                }
                for (q, c) in qs.into_iter().zip(cs) {
                    cx.push("measure", &[], &[Qubit(q)], &[Clbit(c)]);
                }
            }
            Statement::Barrier { args, .. } => {
                let mut qubits: Vec<Qubit> = Vec::new();
                for a in args {
                    for q in resolve(&out.qregs, a) {
                        if !qubits.contains(&Qubit(q)) {
                            qubits.push(Qubit(q));
                        }
                    }
                }
                cx.push("barrier", &[], &qubits, &[]);
            }
        }
    }
    Ok(out)
}

fn layout(decls: &[RegDecl]) -> Vec<Register> {
    let mut offset = 0;
    decls
        .iter()
        .map(|d| {
            let r = Register { name: d.name.clone(), size: d.size, offset };
            offset += d.size;
            r
        })
        .collect()
}

fn resolve(regs: &[Register], arg: &Arg) -> Vec<usize> {
    // The parser has already validated names and bounds.
    let reg = regs.iter().find(|r| r.name == arg.name()).expect("validated register");
    match arg {
        Arg::Register { .. } => (reg.offset..reg.offset + reg.size).collect(),
        Arg::Bit { index, .. } => alloc::vec![reg.offset + index],
    }
}

/// Zip register operands positionally; single qubits repeat.
fn broadcast(name: &str, pos: Pos, operands: &[Vec<Qubit>]) -> Result<Vec<Vec<Qubit>>, QasmError> {
    let mut width = 1;
    for o in operands {
        if o.len() > 1 {
            if width > 1 && o.len() != width {
                return Err(QasmError::ArityMismatch {
                    pos,
                    name: name.into(),
                    detail: format!("registers of size {} and {}", width, o.len()),
                });
            }
            width = o.len();
        }
    }
    Ok((0..width)
        .map(|i| operands.iter().map(|o| if o.len() == 1 { o[0] } else { o[i] }).collect())
        .collect())
}

struct Expander<'a> {
    table: &'a GateTable,
    out: &'a mut Vec<Instruction>,
}

const MAX_DEPTH: usize = 64;

impl Expander<'_> {
    fn push(&mut self, op: &str, params: &[f64], qubits: &[Qubit], clbits: &[Clbit]) {
        let id = self.out.len();
        self.out.push(Instruction {
            id,
            op: op.into(),
            params: params.to_vec(),
            qubits: qubits.to_vec(),
            clbits: clbits.to_vec(),
        });
    }

    fn call(
        &mut self,
        name: &str,
        params: &[f64],
        qubits: &[Qubit],
        pos: Pos,
        depth: usize,
    ) -> Result<(), QasmError> {
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(QasmError::RepeatedOperand { pos, name: name.into() });
            }
        }
        let def = self.table.get(name);
        if def.is_some_and(|d| d.body.is_empty()) {
            return Ok(());
        }
        if qubits.len() <= 2 {
            self.push(name, params, qubits, &[]);
            return Ok(());
        }
        let def = def.ok_or_else(|| QasmError::Expansion {
            pos,
            name: name.into(),
            reason: format!("no definition for a {}-qubit gate", qubits.len()),
        })?;
        if depth >= MAX_DEPTH {
            return Err(QasmError::Expansion { pos, name: name.into(), reason: "nesting too deep".into() });
        }
        let env: Vec<(&str, f64)> = def.params.iter().map(String::as_str).zip(params.iter().copied()).collect();
        let actual = |formal: &String| qubits[def.qubits.iter().position(|f| f == formal).expect("validated formal")];
        for op in &def.body {
            match op {
                GateOp::Call { name: inner, params: exprs, qubits: formals } => {
                    let values = exprs
                        .iter()
                        .map(|e| e.eval(&env).map_err(|n| QasmError::UnknownIdentifier { pos, name: n }))
                        .collect::<Result<Vec<_>, _>>()?;
                    let mapped: Vec<Qubit> = formals.iter().map(actual).collect();
                    self.call(inner, &values, &mapped, pos, depth + 1)?;
                }
                GateOp::Barrier { qubits: formals } => {
                    let mapped: Vec<Qubit> = formals.iter().map(actual).collect();
                    self.push("barrier", &[], &mapped, &[]);
                }
            }
        }
        Ok(())
    }
}
