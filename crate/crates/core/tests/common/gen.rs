//! Random event sequences for round-trip testing.

use jelly_core::messages::{LogicalType, PhysicalType, StreamOptions};
use jelly_core::rdf::{BlankNode, GraphName, Iri, Literal, LiteralKind, Statement, StreamEvent, Term};
use rand::seq::SliceRandom;
use rand::Rng;

const NAMESPACES: [&str; 8] = [
    "http://example.org/data/",
    "http://example.org/vocab#",
    "https://schema.org/",
    "http://www.w3.org/1999/02/22-rdf-syntax-ns#",
    "http://xmlns.com/foaf/0.1/",
    "http://dbpedia.org/resource/Category:",
    "urn:isbn:",
    "http://example.org/ünïcode/",
];

const LEXICALS: [&str; 8] = ["hello", "", "multi\nline\ttext", "quote \" and \\ backslash", "ünïcödé ✓", "42", "\u{1F600}", "\u{0}\u{7f}"];
const LANGS: [&str; 5] = ["en", "de-AT", "pl", "zh-Hant-TW", "x-private1"];

/// Picks from `0..n` with a bias towards small values.
fn skewed(rng: &mut impl Rng, n: usize) -> usize {
    ((rng.gen::<f64>().powi(3)) * n as f64) as usize % n
}

fn iri(rng: &mut impl Rng, vocab: usize) -> Iri {
    let ns = NAMESPACES[skewed(rng, NAMESPACES.len())];
    let name = skewed(rng, vocab);
    let text = match rng.gen_range(0..10) {
        0 => format!("{ns}{name}/"),
        1 => format!("urn:x-local:{name}"),
        _ => format!("{ns}item{name}"),
    };
    Iri::new(text).unwrap()
}

fn bnode(rng: &mut impl Rng) -> BlankNode {
    BlankNode::new(format!("b{}", skewed(rng, 50))).unwrap()
}

fn literal(rng: &mut impl Rng, datatypes: usize) -> Literal {
    let lexical = if rng.gen_bool(0.5) {
        LEXICALS.choose(rng).unwrap().to_string()
    } else {
        format!("value {}", skewed(rng, 500))
    };
    let kind = match rng.gen_range(0..4) {
        0 => LiteralKind::Simple,
        1 => LiteralKind::LangTagged(LANGS.choose(rng).unwrap().to_string()),
        2 => LiteralKind::Datatyped(Iri::new("http://www.w3.org/2001/XMLSchema#string").unwrap()),
        _ => LiteralKind::Datatyped(
            Iri::new(format!("http://www.w3.org/2001/XMLSchema#t{}", skewed(rng, datatypes))).unwrap(),
        ),
    };
    Literal::new(lexical, kind).unwrap()
}

fn graph(rng: &mut impl Rng, vocab: usize) -> GraphName {
    match rng.gen_range(0..4) {
        0 => GraphName::DefaultGraph,
        1 => GraphName::NamedBlank(bnode(rng)),
        _ => GraphName::NamedIri(iri(rng, vocab / 10 + 1)),
    }
}

/// Generates `n` statements for a stream of the given physical type, with
/// frequent repeats of the previous statement's terms.
pub fn random_events(rng: &mut impl Rng, physical: PhysicalType, n: usize) -> Vec<StreamEvent> {
    let vocab = rng.gen_range(4..2000);
    let datatypes = rng.gen_range(1..40);
    let mut events = Vec::with_capacity(n + n / 4);
    let mut prev: Option<Statement> = None;
    let mut open = false;
    let mut g = graph(rng, vocab);
    for _ in 0..n {
        if physical == PhysicalType::Graphs && (!open || rng.gen_bool(0.05)) {
            if open {
                events.push(StreamEvent::GraphEnd);
            }
            events.push(StreamEvent::GraphStart(graph(rng, vocab)));
            open = true;
        }
        if physical == PhysicalType::Quads && rng.gen_bool(0.1) {
            g = graph(rng, vocab);
        }
        let st = match &prev {
            Some(p) if rng.gen_bool(0.05) => p.clone(),
            _ => {
                let s = match (&prev, rng.gen_range(0..10)) {
                    (Some(p), 0..=3) => p.subject().clone(),
                    (_, 4) => Term::BlankNode(bnode(rng)),
                    _ => Term::Iri(iri(rng, vocab)),
                };
                let p = match (&prev, rng.gen_range(0..10)) {
                    (Some(p), 0..=2) => p.predicate().clone(),
                    _ => Term::Iri(iri(rng, vocab / 20 + 1)),
                };
                let o = match rng.gen_range(0..10) {
                    0..=3 => Term::Iri(iri(rng, vocab)),
                    4 => Term::BlankNode(bnode(rng)),
                    _ => Term::Literal(literal(rng, datatypes)),
                };
                Statement::triple(s, p, o).unwrap()
            }
        };
        let st = if physical == PhysicalType::Quads { st.into_triple().with_graph(g.clone()) } else { st };
        prev = Some(st.clone());
        events.push(StreamEvent::Statement(st));
    }
    if open && rng.gen_bool(0.9) {
        events.push(StreamEvent::GraphEnd);
    }
    events
}

pub fn random_options(rng: &mut impl Rng) -> StreamOptions {
    let (physical, logical) = *[
        (PhysicalType::Triples, LogicalType::FlatTriples),
        (PhysicalType::Quads, LogicalType::FlatQuads),
        (PhysicalType::Graphs, LogicalType::Datasets),
    ]
    .choose(rng)
    .unwrap();
    StreamOptions::new(physical, logical).with_tables(
        *[8, 16, 64, 1024].choose(rng).unwrap(),
        *[1, 4, 64].choose(rng).unwrap(),
        *[1, 4, 32].choose(rng).unwrap(),
    )
}
