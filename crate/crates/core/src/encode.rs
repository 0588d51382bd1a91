//! Streaming encoder: turns statements and graph markers into frames.
//!
//! The encoder keeps three lookup tables (prefixes, names, datatypes) and
//! emits an entry row the first time a value is needed. Ids inside rows are
//! delta-coded so the common cases serialize as zero, which costs no bytes:
//!
//! * IRI prefix id: 0 = same prefix id as the previous IRI.
//! * IRI name id: 0 = previous IRI's name id + 1.
//! * Entry row id: 0 = previous entry id of that table + 1.
//!
//! A statement position holding the same term as the previous statement is
//! left out of the row entirely.

use std::cell::Cell;
use std::io::Write;


use crate::lookup::LookupTable;
use crate::messages::{
    encode_frame_into, Entry, Frame, PhysicalType, QuadRow, Row, StreamOptions, TripleRow,
    WireLiteral, WireLiteralKind, WireTerm,
};
use crate::rdf::{GraphName, Iri, LiteralKind, Statement, StreamEvent, Term};
use crate::wire::write_delimited_block;
use crate::Error;

pub const DEFAULT_ROWS_PER_FRAME: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("invalid stream options: {0}")]
    InvalidOptions(String),
    #[error("rows per frame must be at least 1")]
    InvalidRowsPerFrame,
    #[error("{got} not allowed in a {physical} stream")]
    PhysicalTypeMismatch { physical: PhysicalType, got: &'static str },
    #[error("graph state error: {0}")]
    GraphStateError(&'static str),
    #[error("encoder already finished")]
    EncoderSealed,
}

thread_local! {
    static SPLIT_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Number of [`split_iri`] calls made on the current thread.
#[doc(hidden)]
pub fn split_iri_calls() -> u64 {
    SPLIT_CALLS.with(Cell::get)
}

/// Splits an IRI after its last `#` or `/`. The delimiter stays with the prefix.
pub fn split_iri(iri: &str) -> (&str, &str) {
    SPLIT_CALLS.with(|c| c.set(c.get() + 1));
    match iri.rfind(['#', '/']) {
        Some(i) => iri.split_at(i + 1),
        None => ("", iri),
    }
}

/// Snapshot of the delta-coding registers, shared in meaning with the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DeltaState {
    pub last_prefix_id: u32,
    pub last_name_id: u32,
    /// Last entry id set in the prefix, name and datatype tables.
    pub last_set: [u32; 3],
}

/// Occupancy of the encoder's lookup tables and repeat registers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EncoderStats {
    pub prefix_entries: usize,
    pub name_entries: usize,
    pub datatype_entries: usize,
    pub registers: usize,
    pub buffered_rows: usize,
}

pub struct Encoder {
    options: StreamOptions,
    rows_per_frame: usize,
    prefixes: LookupTable,
    names: LookupTable,
    datatypes: LookupTable,
    last_prefix_id: u32,
    last_name_id: u32,
    prev: [Option<Term>; 3],
    prev_graph: Option<GraphName>,
    graph_open: bool,
    rows: Vec<Row>,
    sealed: bool,
}

impl Encoder {
    pub fn new(options: StreamOptions, rows_per_frame: usize) -> Result<Self, EncodeError> {
        options.validate().map_err(EncodeError::InvalidOptions)?;
        if rows_per_frame == 0 {
            return Err(EncodeError::InvalidRowsPerFrame);
        }
        let mut rows = Vec::with_capacity(rows_per_frame.min(4096));
        rows.push(Row::Options(options.clone()));
        Ok(Encoder {
            prefixes: LookupTable::new(options.max_prefix_table),
            names: LookupTable::new(options.max_name_table),
            datatypes: LookupTable::new(options.max_datatype_table),
            options,
            rows_per_frame,
            last_prefix_id: 0,
            last_name_id: 0,
            prev: [None, None, None],
            prev_graph: None,
            graph_open: false,
            rows,
            sealed: false,
        })
    }

    pub fn options(&self) -> &StreamOptions {
        &self.options
    }

    pub fn delta_state(&self) -> DeltaState {
        DeltaState {
            last_prefix_id: self.last_prefix_id,
            last_name_id: self.last_name_id,
            last_set: [
                self.prefixes.last_set_id(),
                self.names.last_set_id(),
                self.datatypes.last_set_id(),
            ],
        }
    }

    pub fn stats(&self) -> EncoderStats {
        EncoderStats {
            prefix_entries: self.prefixes.len(),
            name_entries: self.names.len(),
            datatype_entries: self.datatypes.len(),
            registers: self.prev.iter().filter(|t| t.is_some()).count()
                + self.prev_graph.is_some() as usize,
            buffered_rows: self.rows.len(),
        }
    }

    fn check_open(&self) -> Result<(), EncodeError> {
        if self.sealed {
            Err(EncodeError::EncoderSealed)
        } else {
            Ok(())
        }
    }

    fn push_row(&mut self, row: Row, out: &mut Vec<Frame>) {
        self.rows.push(row);
        if self.rows.len() >= self.rows_per_frame {
            out.push(Frame::new(std::mem::take(&mut self.rows)));
        }
    }

    fn iri_wire(&mut self, prefix: &str, name: &str, out: &mut Vec<Frame>) -> WireTerm {
        let (prefix_id, new_prefix) = self.prefixes.get_or_insert(prefix);
        if new_prefix {
            let id = self.prefixes.entry_wire_id(prefix_id);
            self.push_row(Row::Prefix(Entry::new(id, prefix)), out);
        }
        let (name_id, new_name) = self.names.get_or_insert(name);
        if new_name {
            let id = self.names.entry_wire_id(name_id);
            self.push_row(Row::Name(Entry::new(id, name)), out);
        }
        let wire_prefix = if prefix_id == self.last_prefix_id { 0 } else { prefix_id };
        let wire_name = if name_id == self.last_name_id + 1 { 0 } else { name_id };
        self.last_prefix_id = prefix_id;
        self.last_name_id = name_id;
        WireTerm::Iri { prefix_id: wire_prefix, name_id: wire_name }
    }

    fn iri(&mut self, iri: &Iri, whole: bool, out: &mut Vec<Frame>) -> WireTerm {
        if whole {
            self.iri_wire("", iri.as_str(), out)
        } else {
            let (p, n) = split_iri(iri.as_str());
            self.iri_wire(p, n, out)
        }
    }

    fn term(&mut self, term: &Term, whole: bool, out: &mut Vec<Frame>) -> WireTerm {
        match term {
            Term::Iri(i) => self.iri(i, whole, out),
            Term::BlankNode(b) => WireTerm::Bnode(b.label().to_owned()),
            Term::Literal(l) => {
                let kind = match l.kind() {
                    LiteralKind::Simple => WireLiteralKind::Simple,
                    LiteralKind::LangTagged(t) => WireLiteralKind::Lang(t.clone()),
                    LiteralKind::Datatyped(dt) => {
                        let (id, new) = self.datatypes.get_or_insert(dt.as_str());
                        if new {
                            let wire = self.datatypes.entry_wire_id(id);
                            self.push_row(Row::Datatype(Entry::new(wire, dt.as_str())), out);
                        }
                        WireLiteralKind::Datatype(id)
                    }
                };
                WireTerm::Literal(WireLiteral { lexical: l.lexical().to_owned(), kind })
            }
        }
    }

    fn graph_term(&mut self, g: &GraphName, whole: bool, out: &mut Vec<Frame>) -> WireTerm {
        match g {
            GraphName::DefaultGraph => WireTerm::DefaultGraph,
            GraphName::NamedIri(i) => self.iri(i, whole, out),
            GraphName::NamedBlank(b) => WireTerm::Bnode(b.label().to_owned()),
        }
    }

    /// True when the IRIs that must be written for this statement need more
    /// distinct prefixes than the prefix table can hold at once. Such
    /// statements store every IRI whole under the empty prefix so that no
    /// entry emitted for the statement evicts another one it references.
    fn needs_whole_iris(&self, iris: &[Option<&Iri>; 4]) -> bool {
        let cap = self.options.max_prefix_table as usize;
        if iris.iter().flatten().count() <= cap {
            return false;
        }
        let mut distinct: [&str; 4] = [""; 4];
        let mut n = 0;
        for iri in iris.iter().flatten() {
            let (p, _) = split_iri(iri.as_str());
            if !distinct[..n].contains(&p) {
                distinct[n] = p;
                n += 1;
            }
        }
        n > cap
    }

    /// Encodes one statement, returning any frames completed along the way.
    pub fn encode_statement(&mut self, st: &Statement) -> Result<Vec<Frame>, EncodeError> {
        self.check_open()?;
        let physical = self.options.physical_type;
        match (physical, st.is_quad()) {
            (PhysicalType::Quads, true) | (PhysicalType::Triples | PhysicalType::Graphs, false) => {}
            (_, quad) => {
                return Err(EncodeError::PhysicalTypeMismatch {
                    physical,
                    got: if quad { "quad" } else { "triple" },
                })
            }
        }

        let positions = [st.subject(), st.predicate(), st.object()];
        let repeat: [bool; 3] =
            std::array::from_fn(|i| self.prev[i].as_ref() == Some(positions[i]));
        let graph_repeat = st.graph().is_some() && self.prev_graph.as_ref() == st.graph();

        let mut iris: [Option<&Iri>; 4] = [None; 4];
        for (i, t) in positions.iter().enumerate() {
            if let (false, Term::Iri(iri)) = (repeat[i], t) {
                iris[i] = Some(iri);
            }
        }
        if let (false, Some(GraphName::NamedIri(g))) = (graph_repeat, st.graph()) {
            iris[3] = Some(g);
        }
        let whole = self.needs_whole_iris(&iris);

        let mut out = Vec::new();
        let mut wire: [WireTerm; 3] = Default::default();
        for i in 0..3 {
            if !repeat[i] {
                wire[i] = self.term(positions[i], whole, &mut out);
            }
        }
        let [subject, predicate, object] = wire;
        let row = match st.graph() {
            None => Row::Triple(TripleRow { subject, predicate, object }),
            Some(g) => {
                let graph = if graph_repeat { WireTerm::Absent } else { self.graph_term(g, whole, &mut out) };
                Row::Quad(QuadRow { subject, predicate, object, graph })
            }
        };
        self.push_row(row, &mut out);

        for i in 0..3 {
            if !repeat[i] {
                self.prev[i] = Some(positions[i].clone());
            }
        }
        if let (false, Some(g)) = (graph_repeat, st.graph()) {
            self.prev_graph = Some(g.clone());
        }
        Ok(out)
    }

    /// Opens (`Some`) or closes (`None`) a graph in a GRAPHS stream.
    pub fn signal_graph(&mut self, start: Option<&GraphName>) -> Result<Vec<Frame>, EncodeError> {
        self.check_open()?;
        if self.options.physical_type != PhysicalType::Graphs {
            return Err(EncodeError::PhysicalTypeMismatch {
                physical: self.options.physical_type,
                got: if start.is_some() { "graph_start" } else { "graph_end" },
            });
        }
        let mut out = Vec::new();
        match start {
            Some(g) => {
                if self.graph_open {
                    return Err(EncodeError::GraphStateError("graph_start while a graph is open"));
                }
                self.graph_open = true;
                let term = self.graph_term(g, false, &mut out);
                self.push_row(Row::GraphStart(term), &mut out);
            }
            None => {
                if !self.graph_open {
                    return Err(EncodeError::GraphStateError("graph_end without an open graph"));
                }
                self.graph_open = false;
                self.push_row(Row::GraphEnd, &mut out);
            }
        }
        Ok(out)
    }

    pub fn push_event(&mut self, event: &StreamEvent) -> Result<Vec<Frame>, EncodeError> {
        match event {
            StreamEvent::Statement(st) => self.encode_statement(st),
            StreamEvent::GraphStart(g) => self.signal_graph(Some(g)),
            StreamEvent::GraphEnd => self.signal_graph(None),
            StreamEvent::EndOfGroup => Ok(self.flush()?.into_iter().collect()),
        }
    }

    /// Emits the buffered rows as a frame, if there are any.
    pub fn flush(&mut self) -> Result<Option<Frame>, EncodeError> {
        self.check_open()?;
        if self.rows.is_empty() {
            return Ok(None);
        }
        Ok(Some(Frame::new(std::mem::take(&mut self.rows))))
    }

    /// Flushes and seals the encoder.
    pub fn finish(&mut self) -> Result<Option<Frame>, EncodeError> {
        let frame = self.flush()?;
        self.sealed = true;
        Ok(frame)
    }
}

/// Encoder that writes delimited frames to a byte sink.
pub struct JellyWriter<W: Write> {
    encoder: Encoder,
    sink: W,
    buf: Vec<u8>,
    frames_written: usize,
    bytes_written: u64,
}

impl<W: Write> JellyWriter<W> {
    pub fn new(sink: W, options: StreamOptions, rows_per_frame: usize) -> Result<Self, EncodeError> {
        Ok(JellyWriter {
            encoder: Encoder::new(options, rows_per_frame)?,
            sink,
            buf: Vec::new(),
            frames_written: 0,
            bytes_written: 0,
        })
    }

    pub fn encoder(&self) -> &Encoder {
        &self.encoder
    }

    pub fn frames_written(&self) -> usize {
        self.frames_written
    }

    pub fn bytes_written(&self) -> u64 {
        self.bytes_written
    }

    fn write_frames(&mut self, frames: impl IntoIterator<Item = Frame>) -> Result<(), Error> {
        for frame in frames {
            self.buf.clear();
            encode_frame_into(&frame, &mut self.buf)?;
            write_delimited_block(&mut self.sink, &self.buf)?;
            self.frames_written += 1;
            self.bytes_written += (crate::wire::varint_len(self.buf.len() as u64) + self.buf.len()) as u64;
        }
        Ok(())
    }

    pub fn write_statement(&mut self, st: &Statement) -> Result<(), Error> {
        let frames = self.encoder.encode_statement(st)?;
        self.write_frames(frames)
    }

    pub fn write_event(&mut self, event: &StreamEvent) -> Result<(), Error> {
        let frames = self.encoder.push_event(event)?;
        self.write_frames(frames)
    }

    /// Writes out the buffered rows as a frame (a no-op when nothing is buffered).
    pub fn flush_frame(&mut self) -> Result<(), Error> {
        let frame = self.encoder.flush()?;
        self.write_frames(frame)
    }

    pub fn finish(mut self) -> Result<W, Error> {
        let frame = self.encoder.finish()?;
        self.write_frames(frame)?;
        self.sink.flush()?;
        Ok(self.sink)
    }
}

/// Encodes a whole event sequence into an in-memory `.jelly` byte stream.
pub fn encode_events<'a>(
    options: StreamOptions,
    rows_per_frame: usize,
    events: impl IntoIterator<Item = &'a StreamEvent>,
) -> Result<Vec<u8>, Error> {
    let mut w = JellyWriter::new(Vec::new(), options, rows_per_frame)?;
    for ev in events {
        w.write_event(ev)?;
    }
    w.finish()
}
