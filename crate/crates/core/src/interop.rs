//! Text formats: N-Triples / N-Quads reading and writing, and the
//! `jelly-text` debug rendering of frames.

use std::fmt::Write as _;
use std::io::BufRead;

use thiserror::Error;

use crate::encode::DeltaState;
use crate::messages::{Entry, Frame, Row, WireLiteralKind, WireTerm};
use crate::rdf::{
    escape_literal, write_graph_nt, write_term_nt, BlankNode, GraphName, Iri, Literal, LiteralKind,
    Statement, Term,
};

/// 1-based line and column (in characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParsePosition {
    pub line: usize,
    pub column: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at line {}, column {}: {reason}", position.line, position.column)]
pub struct SyntaxError {
    pub position: ParsePosition,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SerializeError {
    #[error("statement in named graph cannot be written as N-Triples")]
    QuadInTriplesOutput,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TextSyntax {
    NTriples,
    NQuads,
}

struct Cursor<'a> {
    s: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.s[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    fn error_at(&self, byte_pos: usize, reason: impl Into<String>) -> SyntaxError {
        SyntaxError {
            position: ParsePosition { line: self.line, column: self.s[..byte_pos].chars().count() + 1 },
            reason: reason.into(),
        }
    }

    fn error(&self, reason: impl Into<String>) -> SyntaxError {
        self.error_at(self.pos, reason)
    }

    fn hex(&mut self, digits: usize) -> Result<char, SyntaxError> {
        let start = self.pos;
        let mut v = 0u32;
        for _ in 0..digits {
            match self.bump().and_then(|c| c.to_digit(16)) {
                Some(d) => v = v * 16 + d,
                None => return Err(self.error_at(start, "invalid unicode escape")),
            }
        }
        char::from_u32(v).ok_or_else(|| self.error_at(start, "escape is not a valid code point"))
    }

    fn iri(&mut self) -> Result<Iri, SyntaxError> {
        let start = self.pos;
        if !self.eat('<') {
            return Err(self.error("expected '<'"));
        }
        let mut value = String::new();
        loop {
            let at = self.pos;
            match self.bump() {
                None => return Err(self.error("unterminated IRI")),
                Some('>') => break,
                Some('\\') => match self.bump() {
                    Some('u') => value.push(self.hex(4)?),
                    Some('U') => value.push(self.hex(8)?),
                    _ => return Err(self.error_at(at, "invalid escape in IRI")),
                },
                Some(c) if crate::rdf::is_iri_char(c) => value.push(c),
                Some(c) => return Err(self.error_at(at, format!("character {c:?} not allowed in IRI"))),
            }
        }
        if !has_scheme(&value) {
            return Err(self.error_at(start, format!("IRI <{value}> is not absolute")));
        }
        Iri::new(value).map_err(|e| self.error_at(start, e.to_string()))
    }

    fn bnode(&mut self) -> Result<BlankNode, SyntaxError> {
        let start = self.pos;
        if !(self.eat('_') && self.eat(':')) {
            return Err(self.error_at(start, "expected '_:'"));
        }
        let label_start = self.pos;
        match self.peek() {
            Some(c) if c.is_alphanumeric() || c == '_' => {}
            _ => return Err(self.error("invalid blank node label")),
        }
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.') {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        while self.s[label_start..self.pos].ends_with('.') {
            self.pos -= 1;
        }
        BlankNode::new(&self.s[label_start..self.pos]).map_err(|e| self.error_at(start, e.to_string()))
    }

    fn literal(&mut self) -> Result<Literal, SyntaxError> {
        let start = self.pos;
        self.eat('"');
        let mut lexical = String::new();
        loop {
            let at = self.pos;
            match self.bump() {
                None => return Err(self.error("unterminated string literal")),
                Some('"') => break,
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex(4)?,
                        Some('U') => self.hex(8)?,
                        _ => return Err(self.error_at(at, "invalid escape in string")),
                    };
                    lexical.push(c);
                }
                Some(c @ ('\n' | '\r')) => {
                    return Err(self.error_at(at, format!("raw {c:?} not allowed in string")))
                }
                Some(c) => lexical.push(c),
            }
        }
        let kind = if self.eat('@') {
            let tag_start = self.pos;
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() || c == '-' {
                    self.pos += 1;
                } else {
                    break;
                }
            }
            let tag = &self.s[tag_start..self.pos];
            let well_formed = {
                let mut parts = tag.split('-');
                let first = parts.next().unwrap_or("");
                !first.is_empty()
                    && first.bytes().all(|b| b.is_ascii_alphabetic())
                    && parts.all(|p| !p.is_empty())
            };
            if !well_formed {
                return Err(self.error_at(tag_start, format!("invalid language tag {tag:?}")));
            }
            LiteralKind::LangTagged(tag.to_owned())
        } else if self.eat('^') {
            if !self.eat('^') {
                return Err(self.error("expected '^^'"));
            }
            LiteralKind::Datatyped(self.iri()?)
        } else {
            LiteralKind::Simple
        };
        Literal::new(lexical, kind).map_err(|e| self.error_at(start, e.to_string()))
    }

    fn subject(&mut self) -> Result<Term, SyntaxError> {
        match self.peek() {
            Some('<') => self.iri().map(Term::Iri),
            Some('_') => self.bnode().map(Term::BlankNode),
            _ => Err(self.error("expected IRI or blank node as subject")),
        }
    }

    fn object(&mut self) -> Result<Term, SyntaxError> {
        match self.peek() {
            Some('<') => self.iri().map(Term::Iri),
            Some('_') => self.bnode().map(Term::BlankNode),
            Some('"') => self.literal().map(Term::Literal),
            _ => Err(self.error("expected IRI, blank node or literal as object")),
        }
    }
}

fn has_scheme(iri: &str) -> bool {
    let Some(colon) = iri.find(':') else { return false };
    let scheme = &iri[..colon];
    let mut chars = scheme.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

/// Parses one line. Blank and comment-only lines yield `Ok(None)`.
pub fn parse_line(line: &str, line_no: usize, syntax: TextSyntax) -> Result<Option<Statement>, SyntaxError> {
    let mut c = Cursor { s: line.trim_end_matches(['\n', '\r']), pos: 0, line: line_no };
    c.skip_ws();
    if matches!(c.peek(), None | Some('#')) {
        return Ok(None);
    }
    let subject = c.subject()?;
    c.skip_ws();
    if c.peek() != Some('<') {
        return Err(c.error("expected IRI as predicate"));
    }
    let predicate = Term::Iri(c.iri()?);
    c.skip_ws();
    let object = c.object()?;
    c.skip_ws();
    let graph = match (syntax, c.peek()) {
        (TextSyntax::NQuads, Some('<')) => Some(GraphName::NamedIri(c.iri()?)),
        (TextSyntax::NQuads, Some('_')) => Some(GraphName::NamedBlank(c.bnode()?)),
        (TextSyntax::NQuads, Some('"')) => return Err(c.error("literal not allowed as graph name")),
        (TextSyntax::NQuads, _) => Some(GraphName::DefaultGraph),
        (TextSyntax::NTriples, _) => None,
    };
    c.skip_ws();
    if !c.eat('.') {
        return Err(c.error("expected '.' at end of statement"));
    }
    c.skip_ws();
    if !matches!(c.peek(), None | Some('#')) {
        return Err(c.error("unexpected content after '.'"));
    }
    let st = match graph {
        None => Statement::triple(subject, predicate, object),
        Some(g) => Statement::quad(subject, predicate, object, g),
    };
    st.map(Some).map_err(|e| c.error_at(0, e.to_string()))
}

/// Streaming line-by-line parser over any buffered reader.
pub struct StatementReader<R> {
    src: R,
    syntax: TextSyntax,
    line_no: usize,
    buf: String,
    failed: bool,
}

impl<R: BufRead> StatementReader<R> {
    pub fn new(src: R, syntax: TextSyntax) -> Self {
        StatementReader { src, syntax, line_no: 0, buf: String::new(), failed: false }
    }
}

impl<R: BufRead> Iterator for StatementReader<R> {
    type Item = Result<Statement, crate::Error>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        loop {
            self.buf.clear();
            match self.src.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {}
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e.into()));
                }
            }
            self.line_no += 1;
            match parse_line(&self.buf, self.line_no, self.syntax) {
                Ok(Some(st)) => return Some(Ok(st)),
                Ok(None) => continue,
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e.into()));
                }
            }
        }
    }
}

fn parse_str(text: &str, syntax: TextSyntax) -> Result<Vec<Statement>, SyntaxError> {
    let mut out = Vec::new();
    for (i, line) in text.split('\n').enumerate() {
        if let Some(st) = parse_line(line, i + 1, syntax)? {
            out.push(st);
        }
    }
    Ok(out)
}

pub fn parse_nt_str(text: &str) -> Result<Vec<Statement>, SyntaxError> {
    parse_str(text, TextSyntax::NTriples)
}

pub fn parse_nq_str(text: &str) -> Result<Vec<Statement>, SyntaxError> {
    parse_str(text, TextSyntax::NQuads)
}

/// Appends one N-Triples line. Quads in the default graph are written as triples.
pub fn write_statement_nt(out: &mut String, st: &Statement) -> Result<(), SerializeError> {
    if matches!(st.graph(), Some(g) if !g.is_default()) {
        return Err(SerializeError::QuadInTriplesOutput);
    }
    write_spo(out, st);
    out.push_str(" .\n");
    Ok(())
}

/// Appends one N-Quads line.
pub fn write_statement_nq(out: &mut String, st: &Statement) {
    write_spo(out, st);
    if let Some(g) = st.graph().filter(|g| !g.is_default()) {
        out.push(' ');
        write_graph_nt(out, g);
    }
    out.push_str(" .\n");
}

fn write_spo(out: &mut String, st: &Statement) {
    write_term_nt(out, st.subject());
    out.push(' ');
    write_term_nt(out, st.predicate());
    out.push(' ');
    write_term_nt(out, st.object());
}

pub fn serialize_nt<'a>(statements: impl IntoIterator<Item = &'a Statement>) -> Result<String, SerializeError> {
    let mut out = String::new();
    for st in statements {
        write_statement_nt(&mut out, st)?;
    }
    Ok(out)
}

pub fn serialize_nq<'a>(statements: impl IntoIterator<Item = &'a Statement>) -> String {
    let mut out = String::new();
    for st in statements {
        write_statement_nq(&mut out, st);
    }
    out
}

/// Renders frames as `jelly-text`, tracking delta state across frames so
/// that every delta-coded id can be shown next to the id it resolves to
/// (`0⇒3`).
#[derive(Debug, Clone, Default)]
pub struct JellyTextRenderer {
    delta: DeltaState,
}

fn show_id(wire: u32, resolved: u64) -> String {
    if wire as u64 == resolved {
        wire.to_string()
    } else {
        format!("{wire}⇒{resolved}")
    }
}

fn quoted(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    escape_literal(&mut out, s);
    out.push('"');
    out
}

impl JellyTextRenderer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Advances state over `frame` without rendering it.
    pub fn observe(&mut self, frame: &Frame) {
        let mut sink = String::new();
        for row in &frame.rows {
            sink.clear();
            self.row(row, &mut sink);
        }
    }

    pub fn render(&mut self, frame: &Frame, index: usize) -> String {
        let mut out = format!("frame {index} {{\n");
        for row in &frame.rows {
            out.push_str("  ");
            self.row(row, &mut out);
            out.push('\n');
        }
        out.push_str("}\n");
        out
    }

    fn entry(&mut self, table: usize, name: &str, e: &Entry, out: &mut String) {
        let resolved = if e.id == 0 { self.delta.last_set[table] as u64 + 1 } else { e.id as u64 };
        self.delta.last_set[table] = resolved as u32;
        let _ = write!(out, "{name}[{}] = {}", show_id(e.id, resolved), quoted(&e.value));
    }

    fn term(&mut self, t: &WireTerm, out: &mut String) {
        match t {
            WireTerm::Iri { prefix_id, name_id } => {
                let (p, n) = crate::decode::resolve_iri_ids(*prefix_id, *name_id, &self.delta);
                self.delta.last_prefix_id = p as u32;
                self.delta.last_name_id = n as u32;
                let _ = write!(out, "iri({},{})", show_id(*prefix_id, p), show_id(*name_id, n));
            }
            WireTerm::Bnode(label) => {
                let _ = write!(out, "bnode({})", quoted(label));
            }
            WireTerm::Literal(l) => {
                let _ = write!(out, "literal({})", quoted(&l.lexical));
                match &l.kind {
                    WireLiteralKind::Simple => {}
                    WireLiteralKind::Lang(tag) => {
                        let _ = write!(out, "@{tag}");
                    }
                    WireLiteralKind::Datatype(id) => {
                        let _ = write!(out, "^^dt[{id}]");
                    }
                }
            }
            WireTerm::DefaultGraph => out.push_str("default"),
            WireTerm::Absent => out.push_str("<repeat>"),
        }
    }

    fn row(&mut self, row: &Row, out: &mut String) {
        match row {
            Row::Options(o) => {
                self.delta = DeltaState::default();
                out.push_str("options");
                if !o.stream_name.is_empty() {
                    let _ = write!(out, " stream={}", quoted(&o.stream_name));
                }
                let _ = write!(
                    out,
                    " physical={} logical={} name={} prefix={} dt={} version={}",
                    o.physical_type,
                    o.logical_type,
                    o.max_name_table,
                    o.max_prefix_table,
                    o.max_datatype_table,
                    o.version
                );
            }
            Row::Prefix(e) => self.entry(0, "prefix", e, out),
            Row::Name(e) => self.entry(1, "name", e, out),
            Row::Datatype(e) => self.entry(2, "datatype", e, out),
            Row::Triple(t) => {
                out.push_str("triple");
                for (label, term) in [("s", &t.subject), ("p", &t.predicate), ("o", &t.object)] {
                    let _ = write!(out, " {label}=");
                    self.term(term, out);
                }
            }
            Row::Quad(q) => {
                out.push_str("quad");
                for (label, term) in [("s", &q.subject), ("p", &q.predicate), ("o", &q.object), ("g", &q.graph)] {
                    let _ = write!(out, " {label}=");
                    self.term(term, out);
                }
            }
            Row::GraphStart(g) => {
                out.push_str("graph_start g=");
                self.term(g, out);
            }
            Row::GraphEnd => out.push_str("graph_end"),
        }
    }
}

/// Renders a single frame starting from fresh delta state.
pub fn render_jelly_text(frame: &Frame, frame_index: usize) -> String {
    JellyTextRenderer::new().render(frame, frame_index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::messages::{StreamOptions, TripleRow, WireLiteral};
    use crate::rdf::{make_bnode, make_iri, make_literal};

    fn t1() -> Statement {
        Statement::triple(
            make_iri("http://e.org/s").unwrap(),
            make_iri("http://e.org/p").unwrap(),
            make_literal("hello", LiteralKind::Simple).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn ntriples_examples() {
        assert_eq!(parse_nt_str(r#"<http://e.org/s> <http://e.org/p> "hello" ."#).unwrap(), vec![t1()]);
        assert!(parse_nt_str("# comment\n\n   \n").unwrap().is_empty());
        let err = parse_nt_str(r#"<http://e.org/s> <http://e.org/p> "x""#).unwrap_err();
        assert_eq!(err.position.line, 1);
    }

    #[test]
    fn nquads_examples() {
        let q = parse_nq_str("<s:a> <s:p> <s:o> <s:g> .").unwrap();
        assert_eq!(q[0].graph(), Some(&GraphName::NamedIri(Iri::new("s:g").unwrap())));
        let q = parse_nq_str("<s:a> <s:p> <s:o> .").unwrap();
        assert_eq!(q[0].graph(), Some(&GraphName::DefaultGraph));
        let err = parse_nq_str("<s:a> <s:p> <s:o> \"g\" .").unwrap_err();
        assert_eq!(err.position, ParsePosition { line: 1, column: 19 });
    }

    #[test]
    fn escapes_and_labels() {
        let st = parse_nt_str(r#"_:b1.x <http://e/p> "a\tbé\U0001F600\"" ."#).unwrap();
        assert_eq!(st[0].subject(), &make_bnode("b1.x").unwrap());
        assert_eq!(st[0].object(), &make_literal("a\tbé😀\"", LiteralKind::Simple).unwrap());
        let st = parse_nt_str("<http://e/s> <http://e/p> _:o.").unwrap();
        assert_eq!(st[0].object(), &make_bnode("o").unwrap());
        let st = parse_nt_str(r#"<http://e/s> <http://e/p> "x"@en-GB ."#).unwrap();
        assert_eq!(st[0].subject(), &make_iri("http://e/s").unwrap());
        assert!(parse_nt_str("<s> <http://e/p> <http://e/o> .").is_err());
    }

    #[test]
    fn serializer_examples() {
        assert_eq!(
            serialize_nt(&[t1()]).unwrap(),
            "<http://e.org/s> <http://e.org/p> \"hello\" .\n"
        );
        assert_eq!(serialize_nt(&[]).unwrap(), "");
        let q = t1().with_graph(GraphName::NamedIri(Iri::new("http://e.org/g").unwrap()));
        assert_eq!(serialize_nt(&[q.clone()]), Err(SerializeError::QuadInTriplesOutput));
        assert_eq!(
            serialize_nq(&[q]),
            "<http://e.org/s> <http://e.org/p> \"hello\" <http://e.org/g> .\n"
        );
        let d = t1().with_graph(GraphName::DefaultGraph);
        assert_eq!(serialize_nt(&[d.clone()]).unwrap(), serialize_nq(&[d]));
    }

    #[test]
    fn jelly_text_fixture() {
        let frame = Frame::new(vec![
            Row::Options(StreamOptions::flat_triples()),
            Row::Prefix(Entry::new(0, "http://e.org/")),
            Row::Name(Entry::new(0, "s")),
            Row::Name(Entry::new(0, "p")),
            Row::Triple(TripleRow {
                subject: WireTerm::Iri { prefix_id: 1, name_id: 0 },
                predicate: WireTerm::Iri { prefix_id: 0, name_id: 0 },
                object: WireTerm::Literal(WireLiteral { lexical: "hello".into(), kind: WireLiteralKind::Simple }),
            }),
        ]);
        let mut r = JellyTextRenderer::new();
        assert_eq!(
            r.render(&frame, 0),
            "frame 0 {\n\
             \x20 options physical=TRIPLES logical=FLAT_TRIPLES name=1024 prefix=64 dt=32 version=1\n\
             \x20 prefix[0⇒1] = \"http://e.org/\"\n\
             \x20 name[0⇒1] = \"s\"\n\
             \x20 name[0⇒2] = \"p\"\n\
             \x20 triple s=iri(1,0⇒1) p=iri(0⇒1,0⇒2) o=literal(\"hello\")\n\
             }\n"
        );
        let f2 = Frame::new(vec![
            Row::Name(Entry::new(0, "o")),
            Row::Triple(TripleRow {
                subject: WireTerm::Absent,
                predicate: WireTerm::Absent,
                object: WireTerm::Iri { prefix_id: 0, name_id: 0 },
            }),
        ]);
        assert_eq!(
            r.render(&f2, 1),
            "frame 1 {\n  name[0⇒3] = \"o\"\n  triple s=<repeat> p=<repeat> o=iri(0⇒1,0⇒3)\n}\n"
        );
        assert_eq!(render_jelly_text(&Frame::default(), 0), "frame 0 {\n}\n");
        assert_eq!(render_jelly_text(&Frame::new(vec![Row::GraphEnd]), 0), "frame 0 {\n  graph_end\n}\n");
    }
}
