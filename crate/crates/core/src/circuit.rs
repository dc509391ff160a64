//! Input circuits: single-qubit gates (opaque, by name) and CZ.
//!
//! Two input formats are accepted: a subset of OpenQASM 2.0 and a JSON form
//! `{"num_qubits": n, "gates": [{"kind": "cz"|"1q", "name": ..., "operands": [...]}]}`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Qubit = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Gate {
    OneQubit { name: String, qubit: Qubit },
    Cz(Qubit, Qubit),
}

impl Gate {
    pub fn operands(&self) -> Vec<Qubit> {
        match *self {
            Gate::OneQubit { qubit, .. } => vec![qubit],
            Gate::Cz(a, b) => vec![a, b],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cz(..))
    }

    pub fn acts_on(&self, q: Qubit) -> bool {
        match *self {
            Gate::OneQubit { qubit, .. } => qubit == q,
            Gate::Cz(a, b) => a == q || b == q,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GateRepr {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    operands: Vec<Qubit>,
}

impl Serialize for Gate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = match self {
            Gate::OneQubit { name, qubit } => GateRepr {
                kind: "1q".into(),
                name: Some(name.clone()),
                operands: vec![*qubit],
            },
            Gate::Cz(a, b) => GateRepr {
                kind: "cz".into(),
                name: None,
                operands: vec![*a, *b],
            },
        };
        repr.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Gate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = GateRepr::deserialize(d)?;
        match (repr.kind.as_str(), repr.operands.as_slice()) {
            ("cz", &[a, b]) if a != b => Ok(Gate::Cz(a, b)),
            ("cz", _) => Err(D::Error::custom("cz needs two distinct operands")),
            ("1q", &[q]) => Ok(Gate::OneQubit {
                name: repr.name.unwrap_or_else(|| "u".into()),
                qubit: q,
            }),
            ("1q", _) => Err(D::Error::custom("1q gate needs exactly one operand")),
            (other, _) => Err(D::Error::custom(format!("unknown gate kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Qasm,
    Json,
}

impl Format {
    /// Guess from a file extension; anything but `.json` is treated as QASM.
    pub fn from_path(path: &std::path::Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Qasm,
        }
    }
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn one_qubit(mut self, name: &str, q: Qubit) -> Self {
        self.gates.push(Gate::OneQubit {
            name: name.into(),
            qubit: q,
        });
        self
    }

    pub fn cz(mut self, a: Qubit, b: Qubit) -> Self {
        self.gates.push(Gate::Cz(a, b));
        self
    }

    pub fn two_qubit_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    pub fn validate(&self) -> Result<()> {
        for gate in &self.gates {
            for q in gate.operands() {
                if q >= self.num_qubits {
                    return Err(Error::OperandOutOfRange {
                        operand: q,
                        num_qubits: self.num_qubits,
                    });
                }
            }
            if let Gate::Cz(a, b) = gate {
                if a == b {
                    return Err(Error::Contract(format!("cz on a single qubit {a}")));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialization is infallible")
    }

    /// OpenQASM 2.0 text over a single register `q`.
    pub fn to_qasm(&self) -> String {
        let mut out = format!("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[{}];\n", self.num_qubits);
        for gate in &self.gates {
            match gate {
                Gate::OneQubit { name, qubit } => out.push_str(&format!("{name} q[{qubit}];\n")),
                Gate::Cz(a, b) => out.push_str(&format!("cz q[{a}],q[{b}];\n")),
            }
        }
        out
    }
}

pub fn parse_circuit(text: &str, format: Format) -> Result<Circuit> {
    let circuit = match format {
        Format::Json => serde_json::from_str::<Circuit>(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?,
        Format::Qasm => QasmParser::new(text).parse()?,
    };
    circuit.validate()?;
    Ok(circuit)
}

/// Statements that carry no gate semantics for placement.
const IGNORED_STATEMENTS: &[&str] = &["barrier", "measure", "reset", "creg"];

#[derive(Debug, Clone, PartialEq)]
enum Tok<'a> {
    Ident(&'a str),
    Number(&'a str),
    Str,
    Sym(char),
    Arrow,
}

struct Token<'a> {
    tok: Tok<'a>,
    line: usize,
    column: usize,
}

struct QasmParser<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    end: (usize, usize),
    src: &'a str,
}

impl<'a> QasmParser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            tokens: Vec::new(),
            pos: 0,
            end: (1, 1),
            src,
        }
    }

    fn lex(&mut self) -> Result<()> {
        let bytes = self.src.as_bytes();
        let (mut i, mut line, mut line_start) = (0, 1, 0);
        while i < bytes.len() {
            let column = i - line_start + 1;
            let c = bytes[i] as char;
            if c == '\n' {
                line += 1;
                line_start = i + 1;
                i += 1;
            } else if c.is_ascii_whitespace() {
                i += 1;
            } else if self.src[i..].starts_with("//") {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            } else if self.src[i..].starts_with("->") {
                self.tokens.push(Token { tok: Tok::Arrow, line, column });
                i += 2;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                self.tokens.push(Token { tok: Tok::Ident(&self.src[start..i]), line, column });
            } else if c.is_ascii_digit() || c == '.' {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == b'.'
                        || ((bytes[i] == b'e' || bytes[i] == b'E') && i > start)
                        || ((bytes[i] == b'-' || bytes[i] == b'+')
                            && matches!(bytes[i - 1], b'e' | b'E')))
                {
                    i += 1;
                }
                self.tokens.push(Token { tok: Tok::Number(&self.src[start..i]), line, column });
            } else if c == '"' {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i] != b'"' {
                    i += 1;
                }
                if i >= bytes.len() {
                    return Err(Error::Parse {
                        line,
                        column: start - line_start + 1,
                        message: "unterminated string".into(),
                    });
                }
                i += 1;
                self.tokens.push(Token { tok: Tok::Str, line, column });
            } else if "[](){};,+-*/^=<>".contains(c) {
                self.tokens.push(Token { tok: Tok::Sym(c), line, column });
                i += 1;
            } else {
                return Err(Error::Parse {
                    line,
                    column,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
        self.end = (line, bytes.len() - line_start + 1);
        Ok(())
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self
            .tokens
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.column));
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok<'a>> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok<'a>> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, c: char) -> Result<()> {
        match self.peek() {
            Some(Tok::Sym(s)) if *s == c => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{c}`"))),
        }
    }

    fn ident(&mut self) -> Result<&'a str> {
        match self.peek() {
            Some(&Tok::Ident(s)) => {
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error("expected identifier")),
        }
    }

    fn integer(&mut self) -> Result<usize> {
        match self.peek() {
            Some(&Tok::Number(s)) => {
                let v = s.parse().map_err(|_| self.error(format!("expected integer, found `{s}`")))?;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.error("expected integer")),
        }
    }

    fn skip_statement(&mut self) -> Result<()> {
        while let Some(t) = self.next() {
            if t == Tok::Sym(';') {
                return Ok(());
            }
        }
        self.pos -= 1;
        Err(self.error("missing `;`"))
    }

    /// Skips a balanced `{ ... }` block; the cursor must be on `{`.
    fn skip_block(&mut self) -> Result<()> {
        self.expect_sym('{')?;
        let mut depth = 1;
        while depth > 0 {
            match self.next() {
                Some(Tok::Sym('{')) => depth += 1,
                Some(Tok::Sym('}')) => depth -= 1,
                Some(_) => {}
                None => {
                    self.pos -= 1;
                    return Err(self.error("unterminated gate body"));
                }
            }
        }
        Ok(())
    }

    /// Parses `reg` or `reg[i]` into the list of global qubit indices it denotes.
    fn argument(&mut self, regs: &HashMap<&'a str, (usize, usize)>) -> Result<Vec<Qubit>> {
        let name = self.ident()?;
        let &(offset, size) = regs
            .get(name)
            .ok_or_else(|| self.error(format!("unknown register `{name}`")))?;
        if let Some(Tok::Sym('[')) = self.peek() {
            self.pos += 1;
            let idx = self.integer()?;
            self.expect_sym(']')?;
            if idx >= size {
                return Err(Error::OperandOutOfRange {
                    operand: offset + idx,
                    num_qubits: offset + size,
                });
            }
            Ok(vec![offset + idx])
        } else {
            Ok((offset..offset + size).collect())
        }
    }

    fn parse(mut self) -> Result<Circuit> {
        self.lex()?;
        let mut regs: HashMap<&str, (usize, usize)> = HashMap::new();
        let mut circuit = Circuit::new(0);
        if let Some(Tok::Ident("OPENQASM")) = self.peek() {
            self.skip_statement()?;
        }
        while let Some(tok) = self.peek().cloned() {
            let Tok::Ident(word) = tok else {
                return Err(self.error("expected statement"));
            };
            match word {
                "include" => self.skip_statement()?,
                "qreg" => {
                    self.pos += 1;
                    let name = self.ident()?;
                    self.expect_sym('[')?;
                    let size = self.integer()?;
                    self.expect_sym(']')?;
                    self.expect_sym(';')?;
                    if regs.insert(name, (circuit.num_qubits, size)).is_some() {
                        return Err(self.error(format!("register `{name}` redeclared")));
                    }
                    circuit.num_qubits += size;
                }
                "gate" | "opaque" => {
                    self.pos += 1;
                    while !matches!(self.peek(), Some(Tok::Sym('{' | ';')) | None) {
                        self.pos += 1;
                    }
                    if word == "gate" {
                        self.skip_block()?;
                    } else {
                        self.expect_sym(';')?;
                    }
                }
                w if IGNORED_STATEMENTS.contains(&w) => self.skip_statement()?,
                "if" => return Err(self.error("classically controlled gates are not supported")),
                name => {
                    self.pos += 1;
                    if let Some(Tok::Sym('(')) = self.peek() {
                        let mut depth = 0;
                        loop {
                            match self.next() {
                                Some(Tok::Sym('(')) => depth += 1,
                                Some(Tok::Sym(')')) => {
                                    depth -= 1;
                                    if depth == 0 {
                                        break;
                                    }
                                }
                                Some(Tok::Sym(';')) | None => {
                                    self.pos -= 1;
                                    return Err(self.error("unbalanced parameter list"));
                                }
                                Some(_) => {}
                            }
                        }
                    }
                    let mut args = vec![self.argument(&regs)?];
                    while let Some(Tok::Sym(',')) = self.peek() {
                        self.pos += 1;
                        args.push(self.argument(&regs)?);
                    }
                    self.expect_sym(';')?;
                    self.push_gate(&mut circuit, name, args)?;
                }
            }
        }
        Ok(circuit)
    }

    fn push_gate(&self, circuit: &mut Circuit, name: &str, args: Vec<Vec<Qubit>>) -> Result<()> {
        match (name, args.as_slice()) {
            ("cz", [a, b]) => {
                let n = broadcast_len(a, b).ok_or_else(|| self.error("register size mismatch"))?;
                for i in 0..n {
                    let (qa, qb) = (a[i.min(a.len() - 1)], b[i.min(b.len() - 1)]);
                    if qa == qb {
                        return Err(self.error("cz operands must be distinct"));
                    }
                    circuit.gates.push(Gate::Cz(qa, qb));
                }
                Ok(())
            }
            (_, [qs]) => {
                circuit.gates.extend(qs.iter().map(|&q| Gate::OneQubit {
                    name: name.to_string(),
                    qubit: q,
                }));
                Ok(())
            }
            _ => Err(Error::UnsupportedGate(name.to_string())),
        }
    }
}

fn broadcast_len(a: &[Qubit], b: &[Qubit]) -> Option<usize> {
    match (a.len(), b.len()) {
        (x, y) if x == y => Some(x),
        (1, y) => Some(y),
        (x, 1) => Some(x),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qasm_round_trip() {
        let c = Circuit::new(3).one_qubit("h", 0).cz(0, 2).one_qubit("x", 1);
        assert_eq!(parse_circuit(&c.to_qasm(), Format::Qasm).unwrap(), c);
    }

    #[test]
    fn single_cz() {
        let c = parse_circuit("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\ncz q[0],q[1];\n", Format::Qasm)
            .unwrap();
        assert_eq!(c, Circuit::new(2).cz(0, 1));
    }

    #[test]
    fn rejects_ccx_by_name() {
        let err = parse_circuit("qreg q[3];\nccx q[0],q[1],q[2];", Format::Qasm).unwrap_err();
        assert!(matches!(&err, Error::UnsupportedGate(g) if g == "ccx"), "{err}");
        let err = parse_circuit("qreg q[2];\ncx q[0],q[1];", Format::Qasm).unwrap_err();
        assert!(matches!(&err, Error::UnsupportedGate(g) if g == "cx"), "{err}");
    }

    #[test]
    fn json_chain_keeps_order() {
        let text = r#"{"num_qubits": 3, "gates": [
            {"kind": "1q", "name": "h", "operands": [0]},
            {"kind": "cz", "operands": [0, 1]},
            {"kind": "cz", "operands": [1, 2]}]}"#;
        let c = parse_circuit(text, Format::Json).unwrap();
        assert_eq!(c, Circuit::new(3).one_qubit("h", 0).cz(0, 1).cz(1, 2));
    }

    #[test]
    fn parameters_registers_and_comments() {
        let text = "OPENQASM 2.0;\n// header\nqreg a[2];\nqreg b[1];\ncreg c[3];\n\
                    rz(pi/2) a[1];\nu3(0.1,-2e-3,pi) b[0];\nh a;\ncz a[0], b[0];\nbarrier a;\nmeasure a[0] -> c[0];\n";
        let c = parse_circuit(text, Format::Qasm).unwrap();
        assert_eq!(c.num_qubits, 3);
        assert_eq!(
            c.gates,
            Circuit::new(3)
                .one_qubit("rz", 1)
                .one_qubit("u3", 2)
                .one_qubit("h", 0)
                .one_qubit("h", 1)
                .cz(0, 2)
                .gates
        );
    }

    #[test]
    fn gate_definitions_are_skipped() {
        let text = "qreg q[2];\ngate foo a { h a; }\nfoo q[0];\ncz q[0],q[1];";
        let c = parse_circuit(text, Format::Qasm).unwrap();
        assert_eq!(c, Circuit::new(2).one_qubit("foo", 0).cz(0, 1));
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = parse_circuit("qreg q[2];\ncz q[0] q[1];", Format::Qasm).unwrap_err();
        match err {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 9)),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn out_of_range_operands() {
        let err = parse_circuit("qreg q[2];\ncz q[0],q[2];", Format::Qasm).unwrap_err();
        assert!(matches!(err, Error::OperandOutOfRange { operand: 2, .. }));
        let err = parse_circuit(r#"{"num_qubits": 2, "gates": [{"kind": "cz", "operands": [0, 5]}]}"#, Format::Json)
            .unwrap_err();
        assert!(matches!(err, Error::OperandOutOfRange { operand: 5, .. }));
    }

    #[test]
    fn json_rejects_bad_gates() {
        for text in [
            r#"{"num_qubits": 2, "gates": [{"kind": "cz", "operands": [1, 1]}]}"#,
            r#"{"num_qubits": 2, "gates": [{"kind": "cx", "operands": [0, 1]}]}"#,
            r#"{"num_qubits": 2, "gates": [{"kind": "1q", "operands": [0, 1]}]}"#,
        ] {
            assert!(parse_circuit(text, Format::Json).is_err(), "{text}");
        }
    }
}
