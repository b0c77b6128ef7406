use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::{ArgKind, GateTable, QasmError};

/// Parse OpenQASM 2.0 source into a validated [`Program`].
///
/// Register references, bounds, gate names and argument counts are all
/// checked here, so expansion can only fail on broadcast conflicts.
pub fn parse(text: &str) -> Result<Program, QasmError> {
    let mut p = Parser::new(text, GateTable::standard(), false)?;
    p.program()?;
    Ok(p.prog)
}

pub(super) fn parse_library(text: &str) -> Result<GateTable, QasmError> {
    let mut p = Parser::new(text, GateTable::default(), true)?;
    p.program()?;
    let mut table = p.table;
    for def in p.prog.gate_defs {
        table.insert(def);
    }
    Ok(table)
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    /// Gates visible before the program's own definitions.
    table: GateTable,
    library: bool,
    prog: Program,
}

impl Parser {
    fn new(text: &str, table: GateTable, library: bool) -> Result<Self, QasmError> {
        Ok(Parser { toks: tokenize(text)?, at: 0, table, library, prog: Program::default() })
    }

    fn peek(&self) -> &Token {
        &self.toks[self.at]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, QasmError> {
        let t = self.peek();
        let found = match &t.tok {
            Tok::Ident(s) => format!("`{}`", s),
            Tok::Number(_, s) => format!("`{}`", s),
            Tok::Str(s) => format!("\"{}\"", s),
            Tok::Arrow => "`->`".into(),
            Tok::Punct(c) => format!("`{}`", c),
            Tok::Eof => "end of input".into(),
        };
        Err(QasmError::Syntax { pos: t.pos, msg: format!("expected {}, found {}", wanted, found) })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Punct(c) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), QasmError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.unexpected(&format!("`{}`", c))
        }
    }

    fn ident(&mut self) -> Result<(String, Pos), QasmError> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let s = s.clone();
                let pos = self.next().pos;
                Ok((s, pos))
            }
            _ => self.unexpected("identifier"),
        }
    }

    fn uint(&mut self) -> Result<usize, QasmError> {
        match &self.peek().tok {
            Tok::Number(_, s) if s.bytes().all(|b| b.is_ascii_digit()) => {
                let v = s.parse().map_err(|_| QasmError::Syntax {
                    pos: self.peek().pos,
                    msg: "integer too large".into(),
                })?;
                self.next();
                Ok(v)
            }
            _ => self.unexpected("integer"),
        }
    }

    fn gate_known(&self, name: &str) -> Option<(usize, usize)> {
        self.table.signature(name).or_else(|| {
            self.prog.gate_def(name).map(|g| (g.params.len(), g.qubits.len()))
        })
    }

    fn program(&mut self) -> Result<(), QasmError> {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == "OPENQASM") {
            self.next();
            match &self.peek().tok {
                Tok::Number(_, s) => {
                    self.prog.version = Some(s.clone());
                    self.next();
                }
                _ => return self.unexpected("version number"),
            }
            self.expect(';')?;
        }
        while self.peek().tok != Tok::Eof {
            self.statement()?;
        }
        Ok(())
    }

    fn statement(&mut self) -> Result<(), QasmError> {
        let (kw, pos) = self.ident()?;
        match kw.as_str() {
            "include" => {
                let file = match &self.peek().tok {
                    Tok::Str(s) => s.clone(),
                    _ => return self.unexpected("file name"),
                };
                self.next();
                self.expect(';')?;
                if file != "qelib1.inc" {
                    return Err(QasmError::Unsupported { pos, stmt: format!("include \"{}\"", file) });
                }
                Ok(())
            }
            "qreg" | "creg" => self.register(kw == "qreg", pos),
            "gate" => self.gate_def(pos),
            "measure" => {
                let qubit = self.arg(true)?;
                if self.peek().tok != Tok::Arrow {
                    return self.unexpected("`->`");
                }
                self.next();
                let bit = self.arg(false)?;
                self.expect(';')?;
                self.prog.statements.push(Statement::Measure { qubit, bit, pos });
                Ok(())
            }
            "barrier" => {
                let args = self.arg_list()?;
                self.expect(';')?;
                self.prog.statements.push(Statement::Barrier { args, pos });
                Ok(())
            }
            "if" | "reset" | "opaque" => Err(QasmError::Unsupported { pos, stmt: kw }),
            _ => self.gate_call(kw, pos),
        }
    }

    fn register(&mut self, quantum: bool, pos: Pos) -> Result<(), QasmError> {
        let (name, npos) = self.ident()?;
        self.expect('[')?;
        let size = self.uint()?;
        self.expect(']')?;
        self.expect(';')?;
        if size == 0 {
            return Err(QasmError::Syntax { pos, msg: format!("register `{}` has size 0", name) });
        }
        if self.prog.qreg(&name).is_some() || self.prog.creg(&name).is_some() {
            return Err(QasmError::Duplicate { pos: npos, name });
        }
        let decl = RegDecl { name, size };
        if quantum {
            self.prog.qregs.push(decl);
        } else {
            self.prog.cregs.push(decl);
        }
        Ok(())
    }

    fn gate_def(&mut self, pos: Pos) -> Result<(), QasmError> {
        let (name, npos) = self.ident()?;
        if self.gate_known(&name).is_some() {
            return Err(QasmError::Duplicate { pos: npos, name });
        }
        let mut params = Vec::new();
        if self.eat('(')
            && !self.eat(')') {
                loop {
                    params.push(self.ident()?.0);
                    if self.eat(')') {
                        break;
                    }
                    self.expect(',')?;
                }
            }
        let mut qubits = Vec::new();
        loop {
            qubits.push(self.ident()?.0);
            if !self.eat(',') {
                break;
            }
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(QasmError::Duplicate { pos, name: q.clone() });
            }
        }
        self.expect('{')?;
        let mut body = Vec::new();
        while !self.eat('}') {
            let (op, opos) = self.ident()?;
            let scope = |n: &str| qubits.iter().any(|q| q == n);
            if op == "barrier" {
                let mut names = Vec::new();
                loop {
                    let (q, qpos) = self.ident()?;
                    if !scope(&q) {
                        return Err(QasmError::UndeclaredRegister { pos: qpos, name: q });
                    }
                    names.push(q);
                    if !self.eat(',') {
                        break;
                    }
                }
                self.expect(';')?;
                body.push(GateOp::Barrier { qubits: names });
                continue;
            }
            if matches!(op.as_str(), "measure" | "reset" | "if" | "opaque" | "gate") {
                return Err(QasmError::Unsupported { pos: opos, stmt: op });
            }
            let (np, nq) = self
                .gate_known(&op)
                .ok_or_else(|| QasmError::UnknownGate { pos: opos, name: op.clone() })?;
            let args = if self.eat('(') { self.expr_list(Some(&params))? } else { Vec::new() };
            let mut names = Vec::new();
            loop {
                let (q, qpos) = self.ident()?;
                if !scope(&q) {
                    return Err(QasmError::UndeclaredRegister { pos: qpos, name: q });
                }
                names.push(q);
                if !self.eat(',') {
                    break;
                }
            }
            self.expect(';')?;
            check_count(opos, &op, ArgKind::Parameters, np, args.len())?;
            check_count(opos, &op, ArgKind::Qubits, nq, names.len())?;
            for (i, q) in names.iter().enumerate() {
                if names[..i].contains(q) {
                    return Err(QasmError::RepeatedOperand { pos: opos, name: op });
                }
            }
            body.push(GateOp::Call { name: op, params: args, qubits: names });
        }
        self.prog.gate_defs.push(GateDef { name, params, qubits, body });
        Ok(())
    }

    fn gate_call(&mut self, name: String, pos: Pos) -> Result<(), QasmError> {
        if self.library {
            return Err(QasmError::Unsupported { pos, stmt: name });
        }
        let (np, nq) = self
            .gate_known(&name)
            .ok_or_else(|| QasmError::UnknownGate { pos, name: name.clone() })?;
        let params = if self.eat('(') { self.expr_list(None)? } else { Vec::new() };
        let args = self.arg_list()?;
        self.expect(';')?;
        check_count(pos, &name, ArgKind::Parameters, np, params.len())?;
        check_count(pos, &name, ArgKind::Qubits, nq, args.len())?;
        for (i, a) in args.iter().enumerate() {
            if let Arg::Bit { .. } = a {
                if args[..i].contains(a) {
                    return Err(QasmError::RepeatedOperand { pos, name });
                }
            }
        }
        self.prog.statements.push(Statement::Gate { name, params, args, pos });
        Ok(())
    }

    fn arg_list(&mut self) -> Result<Vec<Arg>, QasmError> {
        let mut args = Vec::new();
        loop {
            args.push(self.arg(true)?);
            if !self.eat(',') {
                return Ok(args);
            }
        }
    }

    /// `name` or `name[index]`, checked against the quantum or classical registers.
    fn arg(&mut self, quantum: bool) -> Result<Arg, QasmError> {
        let (name, pos) = self.ident()?;
        let decl = if quantum { self.prog.qreg(&name) } else { self.prog.creg(&name) };
        let size = match decl {
            Some(d) => d.size,
            None => return Err(QasmError::UndeclaredRegister { pos, name }),
        };
        if self.eat('[') {
            let index = self.uint()?;
            self.expect(']')?;
            if index >= size {
                return Err(QasmError::IndexOutOfRange { pos, name, index, size });
            }
            Ok(Arg::Bit { name, index, pos })
        } else {
            Ok(Arg::Register { name, pos })
        }
    }

    /// Comma-separated expressions after an opening `(`, consuming the `)`.
    fn expr_list(&mut self, scope: Option<&[String]>) -> Result<Vec<Expr>, QasmError> {
        let mut out = Vec::new();
        if self.eat(')') {
            return Ok(out);
        }
        loop {
            out.push(self.expr(scope)?);
            if self.eat(')') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn expr(&mut self, scope: Option<&[String]>) -> Result<Expr, QasmError> {
        let mut lhs = self.term(scope)?;
        loop {
            let op = match self.peek().tok {
                Tok::Punct('+') => BinOp::Add,
                Tok::Punct('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.term(scope)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self, scope: Option<&[String]>) -> Result<Expr, QasmError> {
        let mut lhs = self.unary(scope)?;
        loop {
            let op = match self.peek().tok {
                Tok::Punct('*') => BinOp::Mul,
                Tok::Punct('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.next();
            let rhs = self.unary(scope)?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self, scope: Option<&[String]>) -> Result<Expr, QasmError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary(scope)?)));
        }
        if self.eat('+') {
            return self.unary(scope);
        }
        self.atom(scope)
    }

    fn atom(&mut self, scope: Option<&[String]>) -> Result<Expr, QasmError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Number(v, _) => {
                self.next();
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                self.next();
                if name == "pi" {
                    Ok(Expr::Pi)
                } else if scope.is_some_and(|s| s.contains(&name)) {
                    Ok(Expr::Param(name))
                } else {
                    Err(QasmError::UnknownIdentifier { pos: t.pos, name })
                }
            }
            Tok::Punct('(') => {
                self.next();
                let e = self.expr(scope)?;
                self.expect(')')?;
                Ok(e)
            }
            _ => self.unexpected("expression"),
        }
    }
}

fn check_count(
    pos: Pos,
    name: &str,
    what: ArgKind,
    expected: usize,
    found: usize,
) -> Result<(), QasmError> {
    if expected == found {
        Ok(())
    } else {
        Err(QasmError::ArgumentCount { pos, name: name.to_string(), what, expected, found })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = "qreg a[2];qreg b[1];\ncreg c[3];\nh a;\nmeasure a[0]->c[0];\n\n\
                        cx a[1],b[0];\nmeasure a[1]->c[1];\nmeasure b[0]->c[2];\n";

    #[test]
    fn lifetime_example_program_shape() {
        let p = parse(FIG1).unwrap();
        assert_eq!(p.qregs.len(), 2);
        assert_eq!(p.cregs.len(), 1);
        assert_eq!(p.statements.len(), 5);
        assert_eq!(p.version, None);
    }

    #[test]
    fn header_and_single_register() {
        let p = parse("OPENQASM 2.0; qreg q[1];").unwrap();
        assert_eq!(p.version.as_deref(), Some("2.0"));
        assert_eq!(p.qregs, [RegDecl { name: "q".into(), size: 1 }]);
        assert!(p.statements.is_empty());
    }

    #[test]
    fn undeclared_register() {
        let err = parse("h q[0];").unwrap_err();
        assert!(matches!(err, QasmError::UndeclaredRegister { ref name, .. } if name == "q"));
    }

    #[test]
    fn index_out_of_range() {
        let err = parse("qreg q[2];\nx q[2];").unwrap_err();
        assert_eq!(
            err,
            QasmError::IndexOutOfRange {
                pos: Pos { line: 2, col: 3 },
                name: "q".into(),
                index: 2,
                size: 2
            }
        );
    }

    #[test]
    fn control_flow_and_reset_are_rejected() {
        for src in [
            "qreg q[1]; creg c[1]; if(c==1) x q[0];",
            "qreg q[1]; reset q[0];",
            "opaque g a;",
        ] {
            assert!(matches!(parse(src), Err(QasmError::Unsupported { .. })), "{}", src);
        }
    }

    #[test]
    fn duplicate_register_names_across_kinds() {
        assert!(matches!(parse("qreg a[1]; creg a[1];"), Err(QasmError::Duplicate { .. })));
    }

    #[test]
    fn gate_definition_with_params() {
        let src = "include \"qelib1.inc\";\ngate g(theta) a,b { rz(theta/2) a; cx a,b; }\nqreg q[2]; g(pi) q[0],q[1];";
        let p = parse(src).unwrap();
        let g = p.gate_def("g").unwrap();
        assert_eq!(g.params, ["theta"]);
        assert_eq!(g.qubits, ["a", "b"]);
        assert_eq!(g.body.len(), 2);
    }

    #[test]
    fn argument_count_mismatch() {
        let err = parse("qreg q[2]; cx q[0];").unwrap_err();
        assert!(matches!(err, QasmError::ArgumentCount { what: ArgKind::Qubits, expected: 2, found: 1, .. }));
        let err = parse("qreg q[2]; rz q[0];").unwrap_err();
        assert!(matches!(err, QasmError::ArgumentCount { what: ArgKind::Parameters, .. }));
    }

    #[test]
    fn unknown_gate_and_identifier() {
        assert!(matches!(parse("qreg q[1]; foo q[0];"), Err(QasmError::UnknownGate { .. })));
        assert!(matches!(
            parse("qreg q[1]; rz(theta) q[0];"),
            Err(QasmError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse("qreg q[1];\nh q[0]\n").unwrap_err();
        assert_eq!(err.pos(), Pos { line: 3, col: 1 });
    }

    #[test]
    fn other_includes_are_unsupported() {
        assert!(matches!(parse("include \"other.inc\";"), Err(QasmError::Unsupported { .. })));
    }
}
