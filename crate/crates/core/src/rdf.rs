//! In-memory RDF data model: terms, statements, graph names and stream events.
//!
//! Every constructor validates its input, so a value of any of these types is
//! always well-formed RDF 1.1 (no generalized positions, no RDF-star).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub const XSD_STRING: &str = "http://www.w3.org/2001/XMLSchema#string";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid IRI {0:?}")]
    InvalidIri(String),
    #[error("invalid blank node label {0:?}")]
    InvalidBlankLabel(String),
    #[error("invalid language tag {0:?}")]
    InvalidLangTag(String),
    #[error("{0} cannot appear in {1} position")]
    InvalidPosition(&'static str, &'static str),
}

/// Returns true if `c` may appear in an IRI.
#[inline]
pub(crate) fn is_iri_char(c: char) -> bool {
    !matches!(c, ' ' | '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') && !c.is_control()
}

/// Checks the character rules shared by full IRIs and their prefix/name fragments.
#[inline]
pub(crate) fn is_iri_fragment(s: &str) -> bool {
    // ASCII fast path; most IRIs never leave it.
    s.bytes().all(|b| b >= 0x80 || is_iri_char(b as char))
        && (s.is_ascii() || s.chars().all(is_iri_char))
}

pub(crate) fn is_blank_label(s: &str) -> bool {
    !s.is_empty()
        && !s.starts_with('.')
        && !s.ends_with('.')
        && s
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

pub(crate) fn is_lang_tag(s: &str) -> bool {
    let mut parts = s.split('-');
    let first = parts.next().unwrap_or("");
    (1..=8).contains(&first.len())
        && first.bytes().all(|b| b.is_ascii_alphabetic())
        && parts.all(|p| (1..=8).contains(&p.len()) && p.bytes().all(|b| b.is_ascii_alphanumeric()))
}

/// An absolute IRI. Clones share the underlying text.
#[derive(Debug, Clone, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Arc<str>);

impl PartialEq for Iri {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, TermError> {
        let value = value.into();
        if value.is_empty() || !is_iri_fragment(&value) {
            return Err(TermError::InvalidIri(value));
        }
        Ok(Iri(value.into()))
    }

    /// Builds an IRI from parts that were each checked with `is_iri_fragment`,
    /// using `scratch` to join them.
    pub(crate) fn from_checked_parts(prefix: &str, name: &str, scratch: &mut String) -> Result<Self, TermError> {
        if prefix.is_empty() && name.is_empty() {
            return Err(TermError::InvalidIri(String::new()));
        }
        scratch.clear();
        scratch.push_str(prefix);
        scratch.push_str(name);
        Ok(Iri(Arc::from(scratch.as_str())))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn into_string(self) -> String {
        self.0.to_string()
    }
}

/// A blank node, identified by its label within one stream.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, TermError> {
        let label = label.into();
        if !is_blank_label(&label) {
            return Err(TermError::InvalidBlankLabel(label));
        }
        Ok(BlankNode(label))
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LiteralKind {
    Simple,
    LangTagged(String),
    Datatyped(Iri),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    kind: LiteralKind,
}

impl Literal {
    /// Validates the tag or datatype. `xsd:string` collapses to [`LiteralKind::Simple`].
    pub fn new(lexical: impl Into<String>, kind: LiteralKind) -> Result<Self, TermError> {
        let kind = match kind {
            LiteralKind::LangTagged(tag) if !is_lang_tag(&tag) => {
                return Err(TermError::InvalidLangTag(tag))
            }
            LiteralKind::Datatyped(dt) if dt.as_str() == XSD_STRING => LiteralKind::Simple,
            k => k,
        };
        Ok(Literal { lexical: lexical.into(), kind })
    }

    pub fn simple(lexical: impl Into<String>) -> Self {
        Literal { lexical: lexical.into(), kind: LiteralKind::Simple }
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn kind(&self) -> &LiteralKind {
        &self.kind
    }

    pub fn language(&self) -> Option<&str> {
        match &self.kind {
            LiteralKind::LangTagged(t) => Some(t),
            _ => None,
        }
    }

    pub fn datatype(&self) -> Option<&Iri> {
        match &self.kind {
            LiteralKind::Datatyped(dt) => Some(dt),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    BlankNode(BlankNode),
    Literal(Literal),
}

impl Term {
    fn kind_name(&self) -> &'static str {
        match self {
            Term::Iri(_) => "IRI",
            Term::BlankNode(_) => "blank node",
            Term::Literal(_) => "literal",
        }
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::BlankNode(_))
    }
}

impl From<Iri> for Term {
    fn from(i: Iri) -> Self {
        Term::Iri(i)
    }
}

impl From<BlankNode> for Term {
    fn from(b: BlankNode) -> Self {
        Term::BlankNode(b)
    }
}

impl From<Literal> for Term {
    fn from(l: Literal) -> Self {
        Term::Literal(l)
    }
}

pub fn make_iri(text: &str) -> Result<Term, TermError> {
    Iri::new(text).map(Term::Iri)
}

pub fn make_bnode(label: &str) -> Result<Term, TermError> {
    BlankNode::new(label).map(Term::BlankNode)
}

pub fn make_literal(lexical: &str, kind: LiteralKind) -> Result<Term, TermError> {
    Literal::new(lexical, kind).map(Term::Literal)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphName {
    DefaultGraph,
    NamedIri(Iri),
    NamedBlank(BlankNode),
}

impl GraphName {
    pub fn from_term(term: Term) -> Result<Self, TermError> {
        match term {
            Term::Iri(i) => Ok(GraphName::NamedIri(i)),
            Term::BlankNode(b) => Ok(GraphName::NamedBlank(b)),
            Term::Literal(_) => Err(TermError::InvalidPosition("literal", "graph")),
        }
    }

    pub fn is_default(&self) -> bool {
        matches!(self, GraphName::DefaultGraph)
    }
}

/// A triple (`graph` is `None`) or a quad.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Statement {
    subject: Term,
    predicate: Term,
    object: Term,
    graph: Option<GraphName>,
}

impl Statement {
    pub fn triple(subject: Term, predicate: Term, object: Term) -> Result<Self, TermError> {
        check_positions(&subject, &predicate)?;
        Ok(Statement { subject, predicate, object, graph: None })
    }

    pub fn quad(
        subject: Term,
        predicate: Term,
        object: Term,
        graph: GraphName,
    ) -> Result<Self, TermError> {
        check_positions(&subject, &predicate)?;
        Ok(Statement { subject, predicate, object, graph: Some(graph) })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn graph(&self) -> Option<&GraphName> {
        self.graph.as_ref()
    }

    pub fn is_quad(&self) -> bool {
        self.graph.is_some()
    }

    /// Same statement as a quad in `graph`.
    pub fn with_graph(self, graph: GraphName) -> Self {
        Statement { graph: Some(graph), ..self }
    }

    /// Drops the graph component.
    pub fn into_triple(self) -> Self {
        Statement { graph: None, ..self }
    }

    pub fn into_parts(self) -> (Term, Term, Term, Option<GraphName>) {
        (self.subject, self.predicate, self.object, self.graph)
    }
}

fn check_positions(subject: &Term, predicate: &Term) -> Result<(), TermError> {
    if let Term::Literal(_) = subject {
        return Err(TermError::InvalidPosition(subject.kind_name(), "subject"));
    }
    if !matches!(predicate, Term::Iri(_)) {
        return Err(TermError::InvalidPosition(predicate.kind_name(), "predicate"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StreamEvent {
    Statement(Statement),
    GraphStart(GraphName),
    GraphEnd,
    /// Marks the end of a group (graph or dataset). Encoders flush on it;
    /// decoders never produce it.
    EndOfGroup,
}

/// Appends the N-Triples token for `term` to `out`.
pub fn write_term_nt(out: &mut String, term: &Term) {
    match term {
        Term::Iri(i) => write_iri_nt(out, i),
        Term::BlankNode(b) => {
            out.push_str("_:");
            out.push_str(b.label());
        }
        Term::Literal(l) => {
            out.push('"');
            escape_literal(out, l.lexical());
            out.push('"');
            match l.kind() {
                LiteralKind::Simple => {}
                LiteralKind::LangTagged(tag) => {
                    out.push('@');
                    out.push_str(tag);
                }
                LiteralKind::Datatyped(dt) => {
                    out.push_str("^^");
                    write_iri_nt(out, dt);
                }
            }
        }
    }
}

pub(crate) fn write_iri_nt(out: &mut String, iri: &Iri) {
    out.push('<');
    out.push_str(iri.as_str());
    out.push('>');
}

pub fn write_graph_nt(out: &mut String, graph: &GraphName) {
    match graph {
        GraphName::DefaultGraph => {}
        GraphName::NamedIri(i) => write_iri_nt(out, i),
        GraphName::NamedBlank(b) => {
            out.push_str("_:");
            out.push_str(b.label());
        }
    }
}

/// Escapes a string for use inside an N-Triples quoted literal.
pub fn escape_literal(out: &mut String, s: &str) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if c.is_ascii_control() => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
}

pub fn render_term_nt(term: &Term) -> String {
    let mut s = String::new();
    write_term_nt(&mut s, term);
    s
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_term_nt(self))
    }
}
