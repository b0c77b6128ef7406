//! Syntax tree for the flat-format OpenQASM 2.0 subset.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// Angle expression.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Pi,
    Param(String),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Evaluate with `env` resolving parameter names.
    pub fn eval(&self, env: &[(&str, f64)]) -> Result<f64, String> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Pi => PI,
            Expr::Param(name) => env
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, v)| *v)
                .ok_or_else(|| name.clone())?,
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(env)?, b.eval(env)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                }
            }
        })
    }

    /// Parameter names referenced by the expression.
    pub fn for_each_param(&self, f: &mut dyn FnMut(&str)) {
        match self {
            Expr::Param(n) => f(n),
            Expr::Neg(e) => e.for_each_param(f),
            Expr::Binary(_, a, b) => {
                a.for_each_param(f);
                b.for_each_param(f);
            }
            Expr::Num(_) | Expr::Pi => {}
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, parent: u8, right: bool) -> fmt::Result {
        match self {
            // `{}` on f64 is the shortest representation that parses back exactly.
            Expr::Num(v) if *v < 0.0 => write!(f, "({})", v),
            Expr::Num(v) => write!(f, "{}", v),
            Expr::Pi => f.write_str("pi"),
            Expr::Param(n) => f.write_str(n),
            Expr::Neg(e) => {
                f.write_str("-")?;
                e.fmt_prec(f, 3, false)
            }
            Expr::Binary(op, a, b) => {
                let p = op.precedence();
                let wrap = p < parent || (right && p == parent);
                if wrap {
                    f.write_str("(")?;
                }
                a.fmt_prec(f, p, false)?;
                write!(f, "{}", op.symbol())?;
                b.fmt_prec(f, p, true)?;
                if wrap {
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0, false)
    }
}

/// Statement inside a gate body; operands are formal names.
#[derive(Debug, Clone, PartialEq)]
pub enum GateOp {
    Call { name: String, params: Vec<Expr>, qubits: Vec<String> },
    Barrier { qubits: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateDef {
    pub name: String,
    pub params: Vec<String>,
    pub qubits: Vec<String>,
    pub body: Vec<GateOp>,
}

impl fmt::Display for GateDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "gate {}", self.name)?;
        if !self.params.is_empty() {
            write!(f, "({})", self.params.join(","))?;
        }
        write!(f, " {} {{", self.qubits.join(","))?;
        for op in &self.body {
            match op {
                GateOp::Call { name, params, qubits } => {
                    write!(f, " {}", name)?;
                    if !params.is_empty() {
                        f.write_str("(")?;
                        for (i, p) in params.iter().enumerate() {
                            if i > 0 {
                                f.write_str(",")?;
                            }
                            write!(f, "{}", p)?;
                        }
                        f.write_str(")")?;
                    }
                    write!(f, " {};", qubits.join(","))?;
                }
                GateOp::Barrier { qubits } => write!(f, " barrier {};", qubits.join(","))?,
            }
        }
        f.write_str(" }")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegDecl {
    pub name: String,
    pub size: usize,
}

/// Operand: a whole register or one element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Arg {
    Register { name: String, pos: Pos },
    Bit { name: String, index: usize, pos: Pos },
}

impl Arg {
    pub fn name(&self) -> &str {
        match self {
            Arg::Register { name, .. } | Arg::Bit { name, .. } => name,
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            Arg::Register { pos, .. } | Arg::Bit { pos, .. } => *pos,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Gate { name: String, params: Vec<Expr>, args: Vec<Arg>, pos: Pos },
    Measure { qubit: Arg, bit: Arg, pos: Pos },
    Barrier { args: Vec<Arg>, pos: Pos },
}

impl Statement {
    pub fn pos(&self) -> Pos {
        match self {
            Statement::Gate { pos, .. }
            | Statement::Measure { pos, .. }
            | Statement::Barrier { pos, .. } => *pos,
        }
    }
}

/// Parsed program. `gate_defs` holds user definitions only; the standard
/// library is resolved separately.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Program {
    pub version: Option<String>,
    pub qregs: Vec<RegDecl>,
    pub cregs: Vec<RegDecl>,
    pub gate_defs: Vec<GateDef>,
    pub statements: Vec<Statement>,
}

impl Program {
    pub fn qreg(&self, name: &str) -> Option<&RegDecl> {
        self.qregs.iter().find(|r| r.name == name)
    }

    pub fn creg(&self, name: &str) -> Option<&RegDecl> {
        self.cregs.iter().find(|r| r.name == name)
    }

    pub fn gate_def(&self, name: &str) -> Option<&GateDef> {
        self.gate_defs.iter().find(|g| g.name == name)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn num(v: f64) -> Box<Expr> {
        Box::new(Expr::Num(v))
    }

    #[test]
    fn display_inserts_needed_parens_only() {
        let e = Expr::Binary(
            BinOp::Div,
            Box::new(Expr::Binary(BinOp::Sub, Box::new(Expr::Param("a".into())), num(1.0))),
            num(2.0),
        );
        assert_eq!(format!("{}", e), "(a-1)/2");
        let e = Expr::Binary(
            BinOp::Sub,
            num(1.0),
            Box::new(Expr::Binary(BinOp::Sub, num(2.0), num(3.0))),
        );
        assert_eq!(format!("{}", e), "1-(2-3)");
        assert_eq!(e.eval(&[]).unwrap(), 2.0);
    }

    #[test]
    fn unknown_param_reports_name() {
        let e = Expr::Param("theta".into());
        assert_eq!(e.eval(&[]), Err(String::from("theta")));
        assert_eq!(e.eval(&[("theta", 0.5)]), Ok(0.5));
    }
}
