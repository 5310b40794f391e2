//! Text formats for mappings, instances and conjunctive queries.
//!
//! ```text
//! mapping  := "source" "{" decls "}" "target" "{" decls "}"
//!             "st" "{" tgds "}" "t" "{" tgds "}"
//! decls    := { ident "/" nat ";" }
//! tgds     := { atom "->" atom { "," atom } ";" }
//! atom     := ident "(" term { "," term } ")"
//! term     := UpperIdent | lowerIdent | "_" nat
//! fact     := atom "."
//! query    := "q" "(" [vars] ")" ":-" atom { "," atom } "."
//! ```
//!
//! Uppercase-initial words are variables, lowercase- or digit-initial words
//! are constants and `_k` is the labelled null with id `k`. `--` starts a
//! comment running to the end of the line. A dependency body may list
//! several atoms separated by commas; such input parses, and is then
//! rejected by validation as non-LAV with its position.

mod lexer;

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

pub use lexer::Position;
use lexer::{tokenize, Tok, Token};

use crate::model::{
    Atom, ConjunctiveQuery, DependencySet, Fact, Instance, Location, ModelError, NullId, Schema, SchemaMapping, Symbol,
    Term, Tgd, ValidationReport,
};

/// Text to parse, with where it came from for diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceText {
    pub content: String,
    pub origin: String,
}

impl SourceText {
    pub fn inline(content: impl Into<String>) -> Self {
        SourceText {
            content: content.into(),
            origin: "<inline>".into(),
        }
    }

    pub fn from_path(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let path = path.as_ref();
        Ok(SourceText {
            content: std::fs::read_to_string(path)?,
            origin: path.display().to_string(),
        })
    }
}

impl From<&str> for SourceText {
    fn from(s: &str) -> Self {
        SourceText::inline(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub origin: String,
    pub position: Position,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.origin, self.position, self.message)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at {0}")]
    Syntax(Diagnostic),
    #[error("{0}")]
    Semantic(Diagnostic),
    #[error("invalid mapping:\n{}", render(.diagnostics))]
    Invalid {
        diagnostics: Vec<Diagnostic>,
        report: ValidationReport,
    },
}

fn render(ds: &[Diagnostic]) -> String {
    ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

impl ParseError {
    pub fn diagnostics(&self) -> Vec<&Diagnostic> {
        match self {
            ParseError::Syntax(d) | ParseError::Semantic(d) => vec![d],
            ParseError::Invalid { diagnostics, .. } => diagnostics.iter().collect(),
        }
    }
}

struct Parser<'a> {
    origin: &'a str,
    toks: Vec<Token>,
    at: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a SourceText) -> Result<Self, ParseError> {
        let toks = tokenize(&text.content).map_err(|e| {
            ParseError::Syntax(Diagnostic {
                origin: text.origin.clone(),
                position: e.pos,
                message: e.message,
            })
        })?;
        Ok(Parser {
            origin: &text.origin,
            toks,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].tok
    }

    fn pos(&self) -> Position {
        self.toks[self.at].pos
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn diag(&self, position: Position, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            origin: self.origin.to_string(),
            position,
            message: message.into(),
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::Syntax(self.diag(self.pos(), format!("expected {expected}, found {}", self.peek())))
    }

    fn semantic(&self, position: Position, err: impl fmt::Display) -> ParseError {
        ParseError::Semantic(self.diag(position, err.to_string()))
    }

    fn expect(&mut self, tok: Tok) -> Result<Position, ParseError> {
        if *self.peek() == tok {
            Ok(self.next().pos)
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Lower(w) if w == kw => {
                self.next();
                Ok(())
            }
            _ => Err(self.unexpected(&format!("`{kw}`"))),
        }
    }

    fn name(&mut self) -> Result<(Symbol, Position), ParseError> {
        match self.peek().clone() {
            Tok::Lower(w) | Tok::Upper(w) => {
                let pos = self.next().pos;
                Ok((Symbol::from(w), pos))
            }
            _ => Err(self.unexpected("a name")),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        match self.peek().clone() {
            Tok::Lower(w) => {
                self.next();
                Ok(Term::Const(Symbol::from(w)))
            }
            Tok::Upper(w) => {
                self.next();
                Ok(Term::Var(Symbol::from(w)))
            }
            Tok::Null(id) => {
                self.next();
                Ok(Term::Null(NullId(id)))
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    fn atom(&mut self) -> Result<(Atom, Position), ParseError> {
        let (predicate, pos) = self.name()?;
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term()?];
        while *self.peek() == Tok::Comma {
            self.next();
            args.push(self.term()?);
        }
        self.expect(Tok::RParen)?;
        Ok((Atom { predicate, args }, pos))
    }

    fn decls(&mut self) -> Result<Schema, ParseError> {
        let mut schema = Schema::empty();
        self.expect(Tok::LBrace)?;
        while *self.peek() != Tok::RBrace {
            let (name, pos) = self.name()?;
            self.expect(Tok::Slash)?;
            let arity = match self.peek().clone() {
                Tok::Lower(w) if w.bytes().all(|b| b.is_ascii_digit()) => {
                    self.next();
                    w.parse::<usize>()
                        .map_err(|_| self.semantic(pos, format!("arity `{w}` out of range")))?
                }
                _ => return Err(self.unexpected("an arity")),
            };
            self.expect(Tok::Semi)?;
            schema.declare(name, arity).map_err(|e| self.semantic(pos, e))?;
        }
        self.expect(Tok::RBrace)?;
        Ok(schema)
    }

    fn tgds(&mut self) -> Result<Vec<(Tgd, TgdSpans)>, ParseError> {
        let mut out = Vec::new();
        self.expect(Tok::LBrace)?;
        while *self.peek() != Tok::RBrace {
            let start = self.pos();
            let mut body = Vec::new();
            let mut body_pos = Vec::new();
            loop {
                let (a, p) = self.atom()?;
                body.push(a);
                body_pos.push(p);
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.next();
            }
            self.expect(Tok::Arrow)?;
            let mut head = Vec::new();
            let mut head_pos = Vec::new();
            loop {
                let (a, p) = self.atom()?;
                head.push(a);
                head_pos.push(p);
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.next();
            }
            self.expect(Tok::Semi)?;
            out.push((
                Tgd { body, head },
                TgdSpans {
                    start,
                    body: body_pos,
                    head: head_pos,
                },
            ));
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    fn end(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }
}

struct TgdSpans {
    start: Position,
    body: Vec<Position>,
    head: Vec<Position>,
}

/// Parses and validates a mapping.
pub fn parse_mapping(text: &SourceText) -> Result<SchemaMapping, ParseError> {
    let mut p = Parser::new(text)?;
    p.keyword("source")?;
    let source = p.decls()?;
    p.keyword("target")?;
    let target = p.decls()?;
    p.keyword("st")?;
    let (st_tgds, st_spans): (Vec<_>, Vec<_>) = p.tgds()?.into_iter().unzip();
    p.keyword("t")?;
    let (t_tgds, t_spans): (Vec<_>, Vec<_>) = p.tgds()?.into_iter().unzip();
    p.end()?;

    let mapping = SchemaMapping::new(source, target, st_tgds, t_tgds);
    let report = mapping.validate();
    if report.is_valid() {
        return Ok(mapping);
    }
    let diagnostics = report
        .violations
        .iter()
        .map(|v| {
            let position = match &v.location {
                Location::Schemas { .. } => Position { line: 1, column: 1 },
                Location::Dependency { set, index } => spans(*set, &st_spans, &t_spans)[*index].start,
                Location::Atom {
                    set,
                    index,
                    in_body,
                    atom,
                } => {
                    let s = &spans(*set, &st_spans, &t_spans)[*index];
                    if *in_body {
                        s.body[*atom]
                    } else {
                        s.head[*atom]
                    }
                }
            };
            p.diag(position, v.to_string())
        })
        .collect();
    Err(ParseError::Invalid { diagnostics, report })
}

fn spans<'s>(set: DependencySet, st: &'s [TgdSpans], t: &'s [TgdSpans]) -> &'s [TgdSpans] {
    match set {
        DependencySet::SourceToTarget => st,
        DependencySet::Target => t,
    }
}

/// Parses `pred(t1,...,tn).` facts over `schema`; every fact is at level 0.
pub fn parse_instance(text: &SourceText, schema: &Arc<Schema>) -> Result<Instance, ParseError> {
    let mut p = Parser::new(text)?;
    let mut inst = Instance::new(schema.clone());
    while *p.peek() != Tok::Eof {
        let (atom, pos) = p.atom()?;
        p.expect(Tok::Dot)?;
        let fact = match atom.to_fact() {
            Some(f) => f,
            None => {
                return Err(p.semantic(
                    pos,
                    format!("fact `{atom}` contains a variable; facts hold constants and nulls only"),
                ))
            }
        };
        inst.insert(fact).map_err(|e| p.semantic(pos, e))?;
    }
    Ok(inst)
}

/// Parses `q(X1,...) :- atom, ..., atom.` over `schema`.
pub fn parse_query(text: &SourceText, schema: &Schema) -> Result<ConjunctiveQuery, ParseError> {
    let mut p = Parser::new(text)?;
    let start = p.pos();
    p.name()?;
    p.expect(Tok::LParen)?;
    let mut head = Vec::new();
    if *p.peek() != Tok::RParen {
        loop {
            match p.term()? {
                Term::Var(v) => head.push(v),
                other => return Err(p.semantic(start, format!("query head term `{other}` is not a variable"))),
            }
            if *p.peek() != Tok::Comma {
                break;
            }
            p.next();
        }
    }
    p.expect(Tok::RParen)?;
    p.expect(Tok::Turnstile)?;
    let mut body = Vec::new();
    loop {
        let (atom, pos) = p.atom()?;
        if atom.args.iter().any(|t| matches!(t, Term::Null(_))) {
            return Err(p.semantic(pos, "labelled nulls are not allowed in queries"));
        }
        schema
            .check(&atom.predicate, atom.arity())
            .map_err(|e| p.semantic(pos, e))?;
        body.push(atom);
        if *p.peek() != Tok::Comma {
            break;
        }
        p.next();
    }
    p.expect(Tok::Dot)?;
    p.end()?;
    ConjunctiveQuery::new(head, body).map_err(|e| p.semantic(start, e))
}

/// Canonical text of an instance: one fact per line, sorted by predicate,
/// then arguments (constants before nulls, nulls by id).
pub fn serialize_instance(inst: &Instance) -> String {
    inst.to_string()
}

/// Renders a single fact the way [`serialize_instance`] does, without the dot.
pub fn render_fact(f: &Fact) -> String {
    f.to_string()
}

impl From<ModelError> for ParseError {
    fn from(e: ModelError) -> Self {
        ParseError::Semantic(Diagnostic {
            origin: "<model>".into(),
            position: Position { line: 1, column: 1 },
            message: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Value;

    pub(crate) const EXAMPLE_M: &str = "
        source { r1/2; }
        target { r2/2; r3/2; }
        st {
          r1(X,Y) -> r2(Y,Z);
          r1(X,Y) -> r3(Z,Y);
        }
        t { r2(X,Y) -> r3(Z,X); }
    ";

    #[test]
    fn example_mapping_parses() {
        let m = parse_mapping(&EXAMPLE_M.into()).unwrap();
        assert_eq!(m.st_tgds.len(), 2);
        assert_eq!(m.t_tgds.len(), 1);
        assert!(m.validate().is_valid());
    }

    #[test]
    fn empty_dependency_blocks() {
        let m = parse_mapping(&"source { a/1; } target { b/1; } st {} t {}".into()).unwrap();
        assert!(m.st_tgds.is_empty() && m.t_tgds.is_empty());
    }

    #[test]
    fn target_dependency_using_source_predicate() {
        let text = "source { r1/1; } target { r2/2; } st {} t { r2(X,Y) -> r1(Y); }";
        let err = parse_mapping(&text.into()).unwrap_err();
        let ParseError::Invalid { diagnostics, report } = err else {
            panic!("expected a validation error")
        };
        assert_eq!(report.len(), 1);
        assert_eq!(diagnostics[0].position.column, 56);
        assert!(diagnostics[0].message.contains("not in the target schema"));
    }

    #[test]
    fn non_lav_body_is_reported_with_position() {
        let text = "source { r1/2; } target { r2/2; }\nst {\n  r1(X,Y), r1(Y,Z) -> r2(X,Z);\n} t {}";
        let err = parse_mapping(&text.into()).unwrap_err();
        let ds = err.diagnostics();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds[0].position, Position { line: 3, column: 3 });
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_mapping(&"source { r1/2 } target {} st {} t {}".into()).unwrap_err();
        match err {
            ParseError::Syntax(d) => assert_eq!(d.position, Position { line: 1, column: 15 }),
            other => panic!("{other:?}"),
        }
    }

    fn schema(rels: &[(&str, usize)]) -> Arc<Schema> {
        Arc::new(Schema::new(rels.iter().map(|(n, a)| (*n, *a))).unwrap())
    }

    #[test]
    fn single_fact() {
        let s = schema(&[("r1", 2)]);
        let i = parse_instance(&"r1(a,b).".into(), &s).unwrap();
        assert_eq!(i.len(), 1);
        assert!(i.contains(&Fact::new("r1", vec![Value::constant("a"), Value::constant("b")])));
    }

    #[test]
    fn numeric_constant() {
        let s = schema(&[("employee", 3)]);
        let i = parse_instance(&"employee(john,50,toys).".into(), &s).unwrap();
        let f = i.facts().next().unwrap();
        assert_eq!(f.args[1], Value::constant("50"));
    }

    #[test]
    fn nulls_in_facts() {
        let s = schema(&[("r2", 2), ("r3", 2)]);
        let i = parse_instance(&"r2(b,_1). r3(_2,b).".into(), &s).unwrap();
        assert_eq!(i.len(), 2);
        assert_eq!(i.max_null_id(), 2);
    }

    #[test]
    fn instance_errors() {
        let s = schema(&[("r", 2)]);
        assert!(matches!(
            parse_instance(&"q(a,b).".into(), &s),
            Err(ParseError::Semantic(_))
        ));
        assert!(matches!(
            parse_instance(&"r(a).".into(), &s),
            Err(ParseError::Semantic(_))
        ));
        assert!(matches!(
            parse_instance(&"r(a,b)".into(), &s),
            Err(ParseError::Syntax(_))
        ));
        assert!(matches!(
            parse_instance(&"r(a,X).".into(), &s),
            Err(ParseError::Semantic(_))
        ));
    }

    #[test]
    fn queries() {
        let s = schema(&[("person", 2), ("r2", 2), ("r3", 2)]);
        let q = parse_query(&"q(X) :- person(X,Y).".into(), &s).unwrap();
        assert_eq!(q.head().len(), 1);
        assert_eq!(q.body().len(), 1);
        let b = parse_query(&"q() :- r3(Z,X), r2(X,Y).".into(), &s).unwrap();
        assert!(b.is_boolean());
        assert_eq!(b.body().len(), 2);
        let err = parse_query(&"q(W) :- r2(X,Y).".into(), &s).unwrap_err();
        assert!(err.to_string().contains("does not occur"));
        assert!(parse_query(&"q(X) :- nope(X).".into(), &s).is_err());
        assert!(parse_query(&"q(X) :- r2(X).".into(), &s).is_err());
    }

    #[test]
    fn canonical_serialization() {
        let s = schema(&[("r2", 2), ("r3", 2)]);
        let mut i = Instance::new(s.clone());
        i.insert(Fact::new("r3", vec![Value::null(2), Value::constant("b")]))
            .unwrap();
        i.insert(Fact::new("r2", vec![Value::constant("b"), Value::null(1)]))
            .unwrap();
        assert_eq!(serialize_instance(&i), "r2(b,_1).\nr3(_2,b).\n");
        assert_eq!(serialize_instance(&Instance::new(s)), "");
    }

    #[test]
    fn mapping_display_reparses() {
        let m = parse_mapping(&EXAMPLE_M.into()).unwrap();
        let again = parse_mapping(&SourceText::inline(m.to_string())).unwrap();
        assert_eq!(m, again);
    }
}
