//! Streaming decoder: mirrors the encoder's tables and registers to turn
//! frames back into [`StreamEvent`]s.

use std::collections::VecDeque;
use std::fmt;
use std::io::Read;


use crate::encode::DeltaState;
use crate::messages::{
    decode_frame, Entry, Frame, MessageError, PhysicalType, Row, StreamOptions, WireLiteralKind,
    WireTerm, FORMAT_VERSION,
};
use crate::rdf::{is_iri_fragment, BlankNode, GraphName, Iri, Literal, LiteralKind, Statement, StreamEvent, Term};
use crate::wire::read_delimited_block;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Table {
    Prefix,
    Name,
    Datatype,
}

impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Table::Prefix => "prefix",
            Table::Name => "name",
            Table::Datatype => "datatype",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeErrorKind {
    #[error("stream does not start with an options row")]
    NoOptionsFirst,
    #[error("options row appears more than once")]
    DuplicateOptions,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u32),
    #[error("invalid stream options: {0}")]
    InvalidOptions(String),
    #[error("{table} table size {declared} exceeds the allowed {limit}")]
    TableTooLarge { table: Table, declared: u32, limit: u32 },
    #[error("{table} id {id} is out of range")]
    IdOutOfRange { table: Table, id: u64 },
    #[error("{table} id {id} was never set")]
    UnsetIdReference { table: Table, id: u32 },
    #[error("{0} repeats a previous term but none exists")]
    RepeatAtStreamStart(&'static str),
    #[error("graph state error: {0}")]
    GraphStateError(&'static str),
    #[error("{row} row not allowed in a {physical} stream")]
    PhysicalTypeMismatch { physical: PhysicalType, row: &'static str },
    #[error("malformed row: {0}")]
    MalformedRow(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("frame {frame}{}: {kind}", row.map(|r| format!(", row {r}")).unwrap_or_default())]
pub struct DecodeError {
    pub kind: DecodeErrorKind,
    pub frame: usize,
    pub row: Option<usize>,
}

/// Upper bounds a consumer is willing to accept for declared table sizes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DecoderLimits {
    pub max_name_table: Option<u32>,
    pub max_prefix_table: Option<u32>,
    pub max_datatype_table: Option<u32>,
}

/// Id-indexed mirror of one encoder table. Slots grow on demand up to `max`.
#[derive(Debug, Clone)]
pub(crate) struct MirrorTable<T> {
    table: Table,
    max: u32,
    slots: Vec<Option<T>>,
    last_set: u32,
}

impl<T> MirrorTable<T> {
    pub(crate) fn new(table: Table) -> Self {
        MirrorTable { table, max: 0, slots: vec![None], last_set: 0 }
    }

    pub(crate) fn reset(&mut self, max: u32) {
        self.max = max;
        self.slots.clear();
        self.slots.push(None);
        self.last_set = 0;
    }

    pub(crate) fn last_set(&self) -> u32 {
        self.last_set
    }

    pub(crate) fn len(&self) -> usize {
        self.slots.iter().filter(|s| s.is_some()).count()
    }

    pub(crate) fn capacity_used(&self) -> usize {
        self.slots.len() - 1
    }

    /// Resolves an entry row id (0 = previous + 1) and stores the value.
    pub(crate) fn set(&mut self, wire_id: u32, value: T) -> Result<u32, DecodeErrorKind> {
        let id = if wire_id == 0 { self.last_set as u64 + 1 } else { wire_id as u64 };
        if id == 0 || id > self.max as u64 {
            return Err(DecodeErrorKind::IdOutOfRange { table: self.table, id });
        }
        let id = id as u32;
        if self.slots.len() <= id as usize {
            self.slots.resize_with(id as usize + 1, || None);
        }
        self.slots[id as usize] = Some(value);
        self.last_set = id;
        Ok(id)
    }

    pub(crate) fn get(&self, id: u64) -> Result<&T, DecodeErrorKind> {
        if id == 0 || id > self.max as u64 {
            return Err(DecodeErrorKind::IdOutOfRange { table: self.table, id });
        }
        self.slots
            .get(id as usize)
            .and_then(Option::as_ref)
            .ok_or(DecodeErrorKind::UnsetIdReference { table: self.table, id: id as u32 })
    }

    pub(crate) fn get_mut(&mut self, id: u64) -> Result<&mut T, DecodeErrorKind> {
        self.get(id)?;
        Ok(self.slots[id as usize].as_mut().unwrap())
    }
}

/// Resolves a delta-coded IRI id pair against the last-used registers.
/// Returns absolute (prefix, name) ids; both are range-checked by the caller's table lookups.
#[inline]
pub(crate) fn resolve_iri_ids(wire_prefix: u32, wire_name: u32, delta: &DeltaState) -> (u64, u64) {
    let p = if wire_prefix == 0 { delta.last_prefix_id as u64 } else { wire_prefix as u64 };
    let n = if wire_name == 0 { delta.last_name_id as u64 + 1 } else { wire_name as u64 };
    (p, n)
}

/// Checks an options row against the format rules and consumer limits.
pub(crate) fn check_options(o: &StreamOptions, limits: &DecoderLimits) -> Result<(), DecodeErrorKind> {
    if o.version != FORMAT_VERSION {
        return Err(DecodeErrorKind::UnsupportedVersion(o.version));
    }
    o.validate().map_err(DecodeErrorKind::InvalidOptions)?;
    for (table, declared, limit) in [
        (Table::Name, o.max_name_table, limits.max_name_table),
        (Table::Prefix, o.max_prefix_table, limits.max_prefix_table),
        (Table::Datatype, o.max_datatype_table, limits.max_datatype_table),
    ] {
        if let Some(limit) = limit {
            if declared > limit {
                return Err(DecodeErrorKind::TableTooLarge { table, declared, limit });
            }
        }
    }
    Ok(())
}

pub struct Decoder {
    limits: DecoderLimits,
    options: Option<StreamOptions>,
    prefixes: MirrorTable<String>,
    names: MirrorTable<String>,
    datatypes: MirrorTable<Iri>,
    delta: DeltaState,
    prev: [Register; 3],
    prev_graph: Option<GraphName>,
    open_graph: Option<GraphName>,
    frame_index: usize,
    /// Generation stamp per prefix id, bumped whenever the slot is set.
    prefix_gen: Vec<u64>,
    next_gen: u64,
    /// Last IRI built per name id, with the prefix id and generation it used.
    iri_cache: Vec<Option<(u64, u64, Iri)>>,
    join: String,
}

impl Default for Decoder {
    fn default() -> Self {
        Self::new(DecoderLimits::default())
    }
}

const POSITION_NAMES: [&str; 3] = ["subject", "predicate", "object"];

/// Last term seen in one statement position.
#[derive(Debug, Clone)]
enum Register {
    Empty,
    Held(Term),
    /// Same as the term at this position of `out[index]` during the current call.
    Emitted(usize),
}

fn position(event: Option<&StreamEvent>, i: usize) -> Option<&Term> {
    match event {
        Some(StreamEvent::Statement(st)) => Some([st.subject(), st.predicate(), st.object()][i]),
        _ => None,
    }
}

impl Decoder {
    pub fn new(limits: DecoderLimits) -> Self {
        Decoder {
            limits,
            options: None,
            prefixes: MirrorTable::new(Table::Prefix),
            names: MirrorTable::new(Table::Name),
            datatypes: MirrorTable::new(Table::Datatype),
            delta: DeltaState::default(),
            prev: [Register::Empty, Register::Empty, Register::Empty],
            prev_graph: None,
            open_graph: None,
            frame_index: 0,
            prefix_gen: Vec::new(),
            next_gen: 0,
            iri_cache: Vec::new(),
            join: String::new(),
        }
    }

    pub fn options(&self) -> Option<&StreamOptions> {
        self.options.as_ref()
    }

    /// Index of the next frame to be decoded.
    pub fn frame_index(&self) -> usize {
        self.frame_index
    }

    pub fn open_graph(&self) -> Option<&GraphName> {
        self.open_graph.as_ref()
    }

    pub fn delta_state(&self) -> DeltaState {
        DeltaState {
            last_set: [self.prefixes.last_set(), self.names.last_set(), self.datatypes.last_set()],
            ..self.delta
        }
    }

    /// Live entries per table (prefix, name, datatype).
    pub fn table_sizes(&self) -> [usize; 3] {
        [self.prefixes.len(), self.names.len(), self.datatypes.len()]
    }

    /// Allocated slots per table; never exceeds the declared maxima.
    pub fn table_slots(&self) -> [usize; 3] {
        [self.prefixes.capacity_used(), self.names.capacity_used(), self.datatypes.capacity_used()]
    }

    /// Decodes one frame, appending its events to `out`.
    pub fn decode_frame_into(&mut self, frame: &Frame, out: &mut Vec<StreamEvent>) -> Result<(), DecodeError> {
        let frame_no = self.frame_index;
        self.frame_index += 1;
        let mut result = Ok(());
        for (i, row) in frame.rows.iter().enumerate() {
            if let Err(kind) = self.apply_row(row.clone(), out) {
                result = Err(DecodeError { kind, frame: frame_no, row: Some(i) });
                break;
            }
        }
        self.settle_registers(out);
        result
    }

    /// Like [`Decoder::decode_frame_into`], but moves strings out of `frame`.
    pub fn decode_owned_frame_into(&mut self, frame: Frame, out: &mut Vec<StreamEvent>) -> Result<(), DecodeError> {
        let frame_no = self.frame_index;
        self.frame_index += 1;
        let mut result = Ok(());
        for (i, row) in frame.rows.into_iter().enumerate() {
            if let Err(kind) = self.apply_row(row, out) {
                result = Err(DecodeError { kind, frame: frame_no, row: Some(i) });
                break;
            }
        }
        self.settle_registers(out);
        result
    }

    /// Copies registers that point into `out` so they outlive it.
    fn settle_registers(&mut self, out: &[StreamEvent]) {
        for (i, reg) in self.prev.iter_mut().enumerate() {
            if let Register::Emitted(j) = *reg {
                *reg = match position(out.get(j), i) {
                    Some(t) => Register::Held(t.clone()),
                    None => Register::Empty,
                };
            }
        }
    }

    pub fn decode_frame_events(&mut self, frame: &Frame) -> Result<Vec<StreamEvent>, DecodeError> {
        let mut out = Vec::new();
        self.decode_frame_into(frame, &mut out)?;
        Ok(out)
    }

    fn apply_row(&mut self, row: Row, out: &mut Vec<StreamEvent>) -> Result<(), DecodeErrorKind> {
        let options = match (&self.options, &row) {
            (None, Row::Options(o)) => {
                check_options(o, &self.limits)?;
                self.prefixes.reset(o.max_prefix_table);
                self.names.reset(o.max_name_table);
                self.datatypes.reset(o.max_datatype_table);
                self.prefix_gen.clear();
                self.iri_cache.clear();
                self.options = Some(o.clone());
                return Ok(());
            }
            (None, _) => return Err(DecodeErrorKind::NoOptionsFirst),
            (Some(_), Row::Options(_)) => return Err(DecodeErrorKind::DuplicateOptions),
            (Some(o), _) => o,
        };
        let physical = options.physical_type;
        match row {
            Row::Options(_) => unreachable!(),
            Row::Prefix(Entry { id, value }) => {
                if !is_iri_fragment(&value) {
                    return Err(DecodeErrorKind::MalformedRow(format!("invalid IRI prefix {value:?}")));
                }
                let id = self.prefixes.set(id, value)? as usize;
                if self.prefix_gen.len() <= id {
                    self.prefix_gen.resize(id + 1, 0);
                }
                self.next_gen += 1;
                self.prefix_gen[id] = self.next_gen;
            }
            Row::Name(Entry { id, value }) => {
                if !is_iri_fragment(&value) {
                    return Err(DecodeErrorKind::MalformedRow(format!("invalid IRI name {value:?}")));
                }
                let id = self.names.set(id, value)? as usize;
                if let Some(slot) = self.iri_cache.get_mut(id) {
                    *slot = None;
                }
            }
            Row::Datatype(Entry { id, value }) => {
                let iri = Iri::new(value).map_err(|e| DecodeErrorKind::MalformedRow(e.to_string()))?;
                self.datatypes.set(id, iri)?;
            }
            Row::Triple(t) => {
                if !matches!(physical, PhysicalType::Triples | PhysicalType::Graphs) {
                    return Err(DecodeErrorKind::PhysicalTypeMismatch { physical, row: "triple" });
                }
                let [s, p, o] = self.resolve_spo([t.subject, t.predicate, t.object], out)?;
                out.push(StreamEvent::Statement(statement(Statement::triple(s, p, o))?));
            }
            Row::Quad(q) => {
                if physical != PhysicalType::Quads {
                    return Err(DecodeErrorKind::PhysicalTypeMismatch { physical, row: "quad" });
                }
                let [s, p, o] = self.resolve_spo([q.subject, q.predicate, q.object], out)?;
                let g = match q.graph {
                    WireTerm::Absent => self
                        .prev_graph
                        .clone()
                        .ok_or(DecodeErrorKind::RepeatAtStreamStart("graph"))?,
                    w => {
                        let g = self.graph_name(w)?;
                        self.prev_graph = Some(g.clone());
                        g
                    }
                };
                out.push(StreamEvent::Statement(statement(Statement::quad(s, p, o, g))?));
            }
            Row::GraphStart(w) => {
                if physical != PhysicalType::Graphs {
                    return Err(DecodeErrorKind::PhysicalTypeMismatch { physical, row: "graph_start" });
                }
                if self.open_graph.is_some() {
                    return Err(DecodeErrorKind::GraphStateError("graph_start while a graph is open"));
                }
                let g = self.graph_name(w)?;
                self.open_graph = Some(g.clone());
                out.push(StreamEvent::GraphStart(g));
            }
            Row::GraphEnd => {
                if physical != PhysicalType::Graphs {
                    return Err(DecodeErrorKind::PhysicalTypeMismatch { physical, row: "graph_end" });
                }
                if self.open_graph.take().is_none() {
                    return Err(DecodeErrorKind::GraphStateError("graph_end without an open graph"));
                }
                out.push(StreamEvent::GraphEnd);
            }
        }
        Ok(())
    }

    /// Resolves s, p, o for a statement about to be pushed onto `out`.
    fn resolve_spo(&mut self, wire: [WireTerm; 3], out: &[StreamEvent]) -> Result<[Term; 3], DecodeErrorKind> {
        let mut terms: [Option<Term>; 3] = [None, None, None];
        for (i, w) in wire.into_iter().enumerate() {
            let t = match w {
                WireTerm::Absent => match &self.prev[i] {
                    Register::Held(t) => Some(t.clone()),
                    Register::Emitted(j) => position(out.get(*j), i).cloned(),
                    Register::Empty => None,
                }
                .ok_or(DecodeErrorKind::RepeatAtStreamStart(POSITION_NAMES[i]))?,
                w => {
                    let t = self.term(w)?;
                    self.prev[i] = Register::Emitted(out.len());
                    t
                }
            };
            terms[i] = Some(t);
        }
        Ok(terms.map(Option::unwrap))
    }

    fn iri(&mut self, wire_prefix: u32, wire_name: u32) -> Result<Iri, DecodeErrorKind> {
        let (p, n) = resolve_iri_ids(wire_prefix, wire_name, &self.delta);
        let prefix = self.prefixes.get(p)?;
        let name = self.names.get(n)?;
        let gen = self.prefix_gen[p as usize];
        let iri = match self.iri_cache.get(n as usize) {
            Some(Some((cp, cg, iri))) if *cp == p && *cg == gen => iri.clone(),
            _ => {
                let iri = Iri::from_checked_parts(prefix, name, &mut self.join)
                    .map_err(|e| DecodeErrorKind::MalformedRow(e.to_string()))?;
                if self.iri_cache.len() <= n as usize {
                    self.iri_cache.resize(n as usize + 1, None);
                }
                self.iri_cache[n as usize] = Some((p, gen, iri.clone()));
                iri
            }
        };
        self.delta.last_prefix_id = p as u32;
        self.delta.last_name_id = n as u32;
        Ok(iri)
    }

    fn term(&mut self, wire: WireTerm) -> Result<Term, DecodeErrorKind> {
        Ok(match wire {
            WireTerm::Iri { prefix_id, name_id } => Term::Iri(self.iri(prefix_id, name_id)?),
            WireTerm::Bnode(label) => Term::BlankNode(bnode(label)?),
            WireTerm::Literal(l) => {
                let kind = match l.kind {
                    WireLiteralKind::Simple => LiteralKind::Simple,
                    WireLiteralKind::Lang(tag) => LiteralKind::LangTagged(tag),
                    WireLiteralKind::Datatype(id) => {
                        LiteralKind::Datatyped(self.datatypes.get(id as u64)?.clone())
                    }
                };
                Term::Literal(
                    Literal::new(l.lexical, kind)
                        .map_err(|e| DecodeErrorKind::MalformedRow(e.to_string()))?,
                )
            }
            WireTerm::DefaultGraph | WireTerm::Absent => {
                return Err(DecodeErrorKind::MalformedRow("unexpected term kind".into()))
            }
        })
    }

    fn graph_name(&mut self, wire: WireTerm) -> Result<GraphName, DecodeErrorKind> {
        Ok(match wire {
            WireTerm::DefaultGraph => GraphName::DefaultGraph,
            WireTerm::Iri { prefix_id, name_id } => GraphName::NamedIri(self.iri(prefix_id, name_id)?),
            WireTerm::Bnode(label) => GraphName::NamedBlank(bnode(label)?),
            _ => return Err(DecodeErrorKind::MalformedRow("invalid graph term".into())),
        })
    }
}

fn bnode(label: String) -> Result<BlankNode, DecodeErrorKind> {
    BlankNode::new(label).map_err(|e| DecodeErrorKind::MalformedRow(e.to_string()))
}

fn statement(r: Result<Statement, crate::rdf::TermError>) -> Result<Statement, DecodeErrorKind> {
    r.map_err(|e| DecodeErrorKind::MalformedRow(e.to_string()))
}

pub(crate) fn frame_error(e: MessageError, frame: usize) -> Error {
    match e {
        MessageError::Wire(w) => Error::Wire(w),
        MessageError::MalformedRow { offset, reason } => Error::Decode(DecodeError {
            kind: DecodeErrorKind::MalformedRow(format!("{reason} (byte {offset})")),
            frame,
            row: None,
        }),
    }
}

/// Reads delimited frames one at a time.
pub struct FrameReader<R> {
    src: R,
    frames: usize,
    bytes: u64,
}

impl<R: Read> FrameReader<R> {
    pub fn new(src: R) -> Self {
        FrameReader { src, frames: 0, bytes: 0 }
    }

    /// Reads the next frame and its size on the wire (length prefix included).
    pub fn next_frame(&mut self) -> Result<Option<(Frame, usize)>, Error> {
        let Some(payload) = read_delimited_block(&mut self.src)? else {
            return Ok(None);
        };
        let size = crate::wire::varint_len(payload.len() as u64) + payload.len();
        let frame = decode_frame(&payload).map_err(|e| frame_error(e, self.frames))?;
        self.frames += 1;
        self.bytes += size as u64;
        Ok(Some((frame, size)))
    }

    /// Like [`next_frame`](Self::next_frame) but returns the raw payload too.
    pub fn next_payload(&mut self) -> Result<Option<Vec<u8>>, Error> {
        let block = read_delimited_block(&mut self.src)?;
        if let Some(p) = &block {
            self.frames += 1;
            self.bytes += (crate::wire::varint_len(p.len() as u64) + p.len()) as u64;
        }
        Ok(block)
    }

    pub fn frames_read(&self) -> usize {
        self.frames
    }

    pub fn bytes_read(&self) -> u64 {
        self.bytes
    }

    pub fn into_inner(self) -> R {
        self.src
    }
}

impl<R: Read> Iterator for FrameReader<R> {
    type Item = Result<Frame, Error>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_frame().map(|o| o.map(|(f, _)| f)).transpose()
    }
}

/// Lazily decodes a `.jelly` byte stream into events, holding at most one
/// frame's worth of events at a time.
pub struct JellyReader<R> {
    frames: FrameReader<R>,
    decoder: Decoder,
    pending: VecDeque<StreamEvent>,
    scratch: Vec<StreamEvent>,
    done: bool,
}

impl<R: Read> JellyReader<R> {
    pub fn new(src: R) -> Self {
        Self::with_limits(src, DecoderLimits::default())
    }

    pub fn with_limits(src: R, limits: DecoderLimits) -> Self {
        JellyReader {
            frames: FrameReader::new(src),
            decoder: Decoder::new(limits),
            pending: VecDeque::new(),
            scratch: Vec::new(),
            done: false,
        }
    }

    pub fn decoder(&self) -> &Decoder {
        &self.decoder
    }

    /// Events decoded from the current frame but not yet returned.
    pub fn pending_events(&self) -> usize {
        self.pending.len()
    }

    pub fn frames_read(&self) -> usize {
        self.frames.frames_read()
    }

    pub fn bytes_read(&self) -> u64 {
        self.frames.bytes_read()
    }

    fn fill(&mut self) -> Result<bool, Error> {
        while self.pending.is_empty() {
            let Some((frame, _)) = self.frames.next_frame()? else {
                if let Some(g) = self.decoder.open_graph() {
                    log::warn!("stream ended with graph {g:?} still open");
                }
                return Ok(false);
            };
            let mut events = std::mem::take(&mut self.scratch);
            self.decoder.decode_owned_frame_into(frame, &mut events)?;
            self.scratch = Vec::from(std::mem::replace(&mut self.pending, VecDeque::from(events)));
        }
        Ok(true)
    }
}

impl<R: Read> Iterator for JellyReader<R> {
    type Item = Result<StreamEvent, Error>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if let Some(ev) = self.pending.pop_front() {
            return Some(Ok(ev));
        }
        match self.fill() {
            Ok(true) => self.pending.pop_front().map(Ok),
            Ok(false) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Decodes a whole in-memory `.jelly` stream.
pub fn decode_events(bytes: &[u8]) -> Result<Vec<StreamEvent>, Error> {
    let mut frames = FrameReader::new(bytes);
    let mut decoder = Decoder::default();
    let mut out = Vec::new();
    while let Some((frame, _)) = frames.next_frame()? {
        decoder.decode_owned_frame_into(frame, &mut out)?;
    }
    if let Some(g) = decoder.open_graph() {
        log::warn!("stream ended with graph {g:?} still open");
    }
    Ok(out)
}
