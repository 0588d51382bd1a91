//! Frame and row schema, and the row-level byte codec.
//!
//! Field numbers (all messages use only varint and length-delimited fields):
//!
//! | message      | fields |
//! |--------------|--------|
//! | Frame        | 1 = row (repeated) |
//! | Row          | 1 options, 2 triple, 3 quad, 4 graph_start, 5 graph_end, 7 name, 8 prefix, 9 datatype |
//! | Options      | 1 stream_name, 2 physical_type, 3 logical_type, 4 max_name_table, 5 max_prefix_table, 6 max_datatype_table, 7 version |
//! | Entry        | 1 id, 2 value |
//! | Triple       | 1 s_iri, 2 s_bnode, 3 p_iri, 4 o_iri, 5 o_bnode, 6 o_literal |
//! | Quad         | as Triple, plus 7 g_iri, 8 g_bnode, 9 g_default |
//! | GraphStart   | 1 g_iri, 2 g_bnode, 3 g_default |
//! | Iri          | 1 prefix_id, 2 name_id |
//! | Literal      | 1 lexical, 2 langtag, 3 datatype_id |
//!
//! Scalar fields equal to their default (0 or empty) are omitted on encode.

use std::fmt;

use thiserror::Error;

use crate::wire::{
    delimited_field_len, encode_varint, varint_field_len, varint_len, write_header,
    write_varint_field, FieldReader, FieldValue, WireError, WireKind,
};

pub const FORMAT_VERSION: u32 = 1;
pub const MIN_NAME_TABLE: u32 = 8;
pub const MIN_PREFIX_TABLE: u32 = 1;
pub const MIN_DATATYPE_TABLE: u32 = 1;
pub const DEFAULT_NAME_TABLE: u32 = 1024;
pub const DEFAULT_PREFIX_TABLE: u32 = 64;
pub const DEFAULT_DATATYPE_TABLE: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MessageError {
    #[error(transparent)]
    Wire(#[from] WireError),
    #[error("malformed row at byte {offset}: {reason}")]
    MalformedRow { offset: usize, reason: String },
}

fn malformed(offset: usize, reason: impl Into<String>) -> MessageError {
    MessageError::MalformedRow { offset, reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PhysicalType {
    #[default]
    Unspecified = 0,
    Triples = 1,
    Quads = 2,
    Graphs = 3,
}

impl PhysicalType {
    pub fn from_code(code: u64) -> Option<Self> {
        Some(match code {
            0 => PhysicalType::Unspecified,
            1 => PhysicalType::Triples,
            2 => PhysicalType::Quads,
            3 => PhysicalType::Graphs,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            PhysicalType::Unspecified => "UNSPECIFIED",
            PhysicalType::Triples => "TRIPLES",
            PhysicalType::Quads => "QUADS",
            PhysicalType::Graphs => "GRAPHS",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [PhysicalType::Unspecified, PhysicalType::Triples, PhysicalType::Quads, PhysicalType::Graphs]
            .into_iter()
            .find(|t| t.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for PhysicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LogicalType {
    #[default]
    Unspecified = 0,
    FlatTriples = 1,
    FlatQuads = 2,
    Graphs = 3,
    Datasets = 4,
}

impl LogicalType {
    pub fn from_code(code: u64) -> Option<Self> {
        Some(match code {
            0 => LogicalType::Unspecified,
            1 => LogicalType::FlatTriples,
            2 => LogicalType::FlatQuads,
            3 => LogicalType::Graphs,
            4 => LogicalType::Datasets,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            LogicalType::Unspecified => "UNSPECIFIED",
            LogicalType::FlatTriples => "FLAT_TRIPLES",
            LogicalType::FlatQuads => "FLAT_QUADS",
            LogicalType::Graphs => "GRAPHS",
            LogicalType::Datasets => "DATASETS",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [
            LogicalType::Unspecified,
            LogicalType::FlatTriples,
            LogicalType::FlatQuads,
            LogicalType::Graphs,
            LogicalType::Datasets,
        ]
        .into_iter()
        .find(|t| t.name().eq_ignore_ascii_case(name))
    }
}

impl fmt::Display for LogicalType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Stream metadata, carried by the first row of every stream.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StreamOptions {
    pub stream_name: String,
    pub physical_type: PhysicalType,
    pub logical_type: LogicalType,
    pub max_name_table: u32,
    pub max_prefix_table: u32,
    pub max_datatype_table: u32,
    pub version: u32,
}

impl StreamOptions {
    pub fn new(physical_type: PhysicalType, logical_type: LogicalType) -> Self {
        StreamOptions {
            stream_name: String::new(),
            physical_type,
            logical_type,
            max_name_table: DEFAULT_NAME_TABLE,
            max_prefix_table: DEFAULT_PREFIX_TABLE,
            max_datatype_table: DEFAULT_DATATYPE_TABLE,
            version: FORMAT_VERSION,
        }
    }

    pub fn flat_triples() -> Self {
        Self::new(PhysicalType::Triples, LogicalType::FlatTriples)
    }

    pub fn flat_quads() -> Self {
        Self::new(PhysicalType::Quads, LogicalType::FlatQuads)
    }

    pub fn with_tables(mut self, name: u32, prefix: u32, datatype: u32) -> Self {
        self.max_name_table = name;
        self.max_prefix_table = prefix;
        self.max_datatype_table = datatype;
        self
    }

    /// Checks table minimums, version and physical/logical compatibility.
    pub fn validate(&self) -> Result<(), String> {
        if self.version != FORMAT_VERSION {
            return Err(format!("unsupported version {}", self.version));
        }
        if self.max_name_table < MIN_NAME_TABLE {
            return Err(format!("max_name_table {} is below {MIN_NAME_TABLE}", self.max_name_table));
        }
        if self.max_prefix_table < MIN_PREFIX_TABLE {
            return Err(format!("max_prefix_table must be at least {MIN_PREFIX_TABLE}"));
        }
        if self.max_datatype_table < MIN_DATATYPE_TABLE {
            return Err(format!("max_datatype_table must be at least {MIN_DATATYPE_TABLE}"));
        }
        use LogicalType as L;
        use PhysicalType as P;
        let compatible = match (self.logical_type, self.physical_type) {
            (_, P::Unspecified) => false,
            (L::Unspecified, _) => true,
            (L::FlatTriples | L::Graphs, p) => matches!(p, P::Triples | P::Graphs),
            (L::FlatQuads | L::Datasets, p) => matches!(p, P::Quads | P::Graphs),
        };
        if !compatible {
            return Err(format!(
                "logical type {} is incompatible with physical type {}",
                self.logical_type, self.physical_type
            ));
        }
        Ok(())
    }
}

impl Default for StreamOptions {
    fn default() -> Self {
        Self::flat_triples()
    }
}

/// A lookup-table entry as written on the wire. `id` 0 means "previous id + 1".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub id: u32,
    pub value: String,
}

impl Entry {
    pub fn new(id: u32, value: impl Into<String>) -> Self {
        Entry { id, value: value.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum WireLiteralKind {
    Simple,
    Lang(String),
    /// Absolute datatype-table id (never delta-coded).
    Datatype(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WireLiteral {
    pub lexical: String,
    pub kind: WireLiteralKind,
}

/// One statement position as written in a row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub enum WireTerm {
    /// Ids of 0 are delta-coded: prefix 0 repeats the last prefix id, name 0 is last name id + 1.
    Iri { prefix_id: u32, name_id: u32 },
    Bnode(String),
    Literal(WireLiteral),
    DefaultGraph,
    /// Repeat of the previous term at this position.
    #[default]
    Absent,
}

impl WireTerm {
    pub fn is_absent(&self) -> bool {
        matches!(self, WireTerm::Absent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TripleRow {
    pub subject: WireTerm,
    pub predicate: WireTerm,
    pub object: WireTerm,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QuadRow {
    pub subject: WireTerm,
    pub predicate: WireTerm,
    pub object: WireTerm,
    pub graph: WireTerm,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Row {
    Options(StreamOptions),
    Triple(TripleRow),
    Quad(QuadRow),
    GraphStart(WireTerm),
    GraphEnd,
    Name(Entry),
    Prefix(Entry),
    Datatype(Entry),
}

impl Row {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Row::Options(_) => "options",
            Row::Triple(_) => "triple",
            Row::Quad(_) => "quad",
            Row::GraphStart(_) => "graph_start",
            Row::GraphEnd => "graph_end",
            Row::Name(_) => "name",
            Row::Prefix(_) => "prefix",
            Row::Datatype(_) => "datatype",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Frame {
    pub rows: Vec<Row>,
}

impl Frame {
    pub fn new(rows: Vec<Row>) -> Self {
        Frame { rows }
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }
}

// ---------------------------------------------------------------------------
// encoding

mod field {
    pub const ROW: u32 = 1;

    pub const ROW_OPTIONS: u32 = 1;
    pub const ROW_TRIPLE: u32 = 2;
    pub const ROW_QUAD: u32 = 3;
    pub const ROW_GRAPH_START: u32 = 4;
    pub const ROW_GRAPH_END: u32 = 5;
    pub const ROW_NAME: u32 = 7;
    pub const ROW_PREFIX: u32 = 8;
    pub const ROW_DATATYPE: u32 = 9;

    pub const S_IRI: u32 = 1;
    pub const S_BNODE: u32 = 2;
    pub const P_IRI: u32 = 3;
    pub const O_IRI: u32 = 4;
    pub const O_BNODE: u32 = 5;
    pub const O_LITERAL: u32 = 6;
    pub const G_IRI: u32 = 7;
    pub const G_BNODE: u32 = 8;
    pub const G_DEFAULT: u32 = 9;

    pub const GS_IRI: u32 = 1;
    pub const GS_BNODE: u32 = 2;
    pub const GS_DEFAULT: u32 = 3;
}

#[derive(Clone, Copy)]
enum Position {
    Subject,
    Predicate,
    Object,
    Graph,
    GraphStart,
}

impl Position {
    fn name(self) -> &'static str {
        match self {
            Position::Subject => "subject",
            Position::Predicate => "predicate",
            Position::Object => "object",
            Position::Graph => "graph",
            Position::GraphStart => "graph_start",
        }
    }

    /// (iri, bnode, literal, default) field numbers; 0 = not allowed here.
    fn fields(self) -> [u32; 4] {
        use field::*;
        match self {
            Position::Subject => [S_IRI, S_BNODE, 0, 0],
            Position::Predicate => [P_IRI, 0, 0, 0],
            Position::Object => [O_IRI, O_BNODE, O_LITERAL, 0],
            Position::Graph => [G_IRI, G_BNODE, 0, G_DEFAULT],
            Position::GraphStart => [GS_IRI, GS_BNODE, 0, GS_DEFAULT],
        }
    }

    fn field_for(self, term: &WireTerm) -> Option<u32> {
        let [iri, bnode, lit, def] = self.fields();
        let f = match term {
            WireTerm::Iri { .. } => iri,
            WireTerm::Bnode(_) => bnode,
            WireTerm::Literal(_) => lit,
            WireTerm::DefaultGraph => def,
            WireTerm::Absent => return None,
        };
        Some(f)
    }
}

fn iri_len(prefix_id: u32, name_id: u32) -> usize {
    let mut n = 0;
    if prefix_id != 0 {
        n += varint_field_len(1, prefix_id as u64);
    }
    if name_id != 0 {
        n += varint_field_len(2, name_id as u64);
    }
    n
}

fn string_field_len(field_number: u32, s: &str) -> usize {
    if s.is_empty() {
        0
    } else {
        delimited_field_len(field_number, s.len())
    }
}

fn literal_len(lit: &WireLiteral) -> usize {
    string_field_len(1, &lit.lexical)
        + match &lit.kind {
            WireLiteralKind::Simple => 0,
            WireLiteralKind::Lang(tag) => string_field_len(2, tag),
            WireLiteralKind::Datatype(id) if *id != 0 => varint_field_len(3, *id as u64),
            WireLiteralKind::Datatype(_) => 0,
        }
}

/// Payload length of a term's message (0 for Absent/DefaultGraph).
fn term_payload_len(term: &WireTerm) -> usize {
    match term {
        WireTerm::Iri { prefix_id, name_id } => iri_len(*prefix_id, *name_id),
        WireTerm::Bnode(label) => label.len(),
        WireTerm::Literal(lit) => literal_len(lit),
        WireTerm::DefaultGraph | WireTerm::Absent => 0,
    }
}

fn term_field_len(pos: Position, term: &WireTerm) -> Result<usize, MessageError> {
    match pos.field_for(term) {
        None => Ok(0),
        Some(0) => Err(malformed(0, format!("term not allowed in {} position", pos.name()))),
        Some(f) => Ok(delimited_field_len(f, term_payload_len(term))),
    }
}

fn write_string_field(field_number: u32, s: &str, out: &mut Vec<u8>) {
    if !s.is_empty() {
        write_header(field_number, WireKind::LengthDelimited, out);
        encode_varint(s.len() as u64, out);
        out.extend_from_slice(s.as_bytes());
    }
}

fn write_term(pos: Position, term: &WireTerm, out: &mut Vec<u8>) {
    // positions were checked by term_field_len
    let Some(f) = pos.field_for(term) else { return };
    write_header(f, WireKind::LengthDelimited, out);
    encode_varint(term_payload_len(term) as u64, out);
    match term {
        WireTerm::Iri { prefix_id, name_id } => {
            if *prefix_id != 0 {
                write_varint_field(1, *prefix_id as u64, out);
            }
            if *name_id != 0 {
                write_varint_field(2, *name_id as u64, out);
            }
        }
        WireTerm::Bnode(label) => out.extend_from_slice(label.as_bytes()),
        WireTerm::Literal(lit) => {
            write_string_field(1, &lit.lexical, out);
            match &lit.kind {
                WireLiteralKind::Simple => {}
                WireLiteralKind::Lang(tag) => write_string_field(2, tag, out),
                WireLiteralKind::Datatype(id) => {
                    if *id != 0 {
                        write_varint_field(3, *id as u64, out)
                    }
                }
            }
        }
        WireTerm::DefaultGraph | WireTerm::Absent => {}
    }
}

fn options_len(o: &StreamOptions) -> usize {
    let v = |f: u32, x: u64| if x == 0 { 0 } else { varint_field_len(f, x) };
    string_field_len(1, &o.stream_name)
        + v(2, o.physical_type as u64)
        + v(3, o.logical_type as u64)
        + v(4, o.max_name_table as u64)
        + v(5, o.max_prefix_table as u64)
        + v(6, o.max_datatype_table as u64)
        + v(7, o.version as u64)
}

fn entry_len(e: &Entry) -> usize {
    (if e.id == 0 { 0 } else { varint_field_len(1, e.id as u64) }) + string_field_len(2, &e.value)
}

/// Returns (row field number, payload length).
fn row_payload_len(row: &Row) -> Result<(u32, usize), MessageError> {
    use field::*;
    Ok(match row {
        Row::Options(o) => (ROW_OPTIONS, options_len(o)),
        Row::Triple(t) => (
            ROW_TRIPLE,
            term_field_len(Position::Subject, &t.subject)?
                + term_field_len(Position::Predicate, &t.predicate)?
                + term_field_len(Position::Object, &t.object)?,
        ),
        Row::Quad(q) => (
            ROW_QUAD,
            term_field_len(Position::Subject, &q.subject)?
                + term_field_len(Position::Predicate, &q.predicate)?
                + term_field_len(Position::Object, &q.object)?
                + term_field_len(Position::Graph, &q.graph)?,
        ),
        Row::GraphStart(g) => {
            if g.is_absent() {
                return Err(malformed(0, "graph_start requires a graph term"));
            }
            (ROW_GRAPH_START, term_field_len(Position::GraphStart, g)?)
        }
        Row::GraphEnd => (ROW_GRAPH_END, 0),
        Row::Name(e) => (ROW_NAME, entry_len(e)),
        Row::Prefix(e) => (ROW_PREFIX, entry_len(e)),
        Row::Datatype(e) => (ROW_DATATYPE, entry_len(e)),
    })
}

/// Size of the row message (the payload inside the frame's row field).
pub fn row_encoded_len(row: &Row) -> Result<usize, MessageError> {
    let (f, len) = row_payload_len(row)?;
    Ok(delimited_field_len(f, len))
}

/// Appends the row message bytes to `out`.
pub fn encode_row_into(row: &Row, out: &mut Vec<u8>) -> Result<(), MessageError> {
    let (f, len) = row_payload_len(row)?;
    write_header(f, WireKind::LengthDelimited, out);
    encode_varint(len as u64, out);
    match row {
        Row::Options(o) => {
            write_string_field(1, &o.stream_name, out);
            for (f, x) in [
                (2, o.physical_type as u64),
                (3, o.logical_type as u64),
                (4, o.max_name_table as u64),
                (5, o.max_prefix_table as u64),
                (6, o.max_datatype_table as u64),
                (7, o.version as u64),
            ] {
                if x != 0 {
                    write_varint_field(f, x, out);
                }
            }
        }
        Row::Triple(t) => {
            write_term(Position::Subject, &t.subject, out);
            write_term(Position::Predicate, &t.predicate, out);
            write_term(Position::Object, &t.object, out);
        }
        Row::Quad(q) => {
            write_term(Position::Subject, &q.subject, out);
            write_term(Position::Predicate, &q.predicate, out);
            write_term(Position::Object, &q.object, out);
            write_term(Position::Graph, &q.graph, out);
        }
        Row::GraphStart(g) => write_term(Position::GraphStart, g, out),
        Row::GraphEnd => {}
        Row::Name(e) | Row::Prefix(e) | Row::Datatype(e) => {
            if e.id != 0 {
                write_varint_field(1, e.id as u64, out);
            }
            write_string_field(2, &e.value, out);
        }
    }
    Ok(())
}

pub fn encode_row(row: &Row) -> Result<Vec<u8>, MessageError> {
    let mut out = Vec::with_capacity(row_encoded_len(row)?);
    encode_row_into(row, &mut out)?;
    Ok(out)
}

/// Appends the frame payload (one field-1 entry per row) to `out`.
pub fn encode_frame_into(frame: &Frame, out: &mut Vec<u8>) -> Result<(), MessageError> {
    for row in &frame.rows {
        let len = row_encoded_len(row)?;
        if len as u64 >= 1 << 32 {
            return Err(WireError::LengthOverflow { len: len as u64, offset: out.len() }.into());
        }
        write_header(field::ROW, WireKind::LengthDelimited, out);
        encode_varint(len as u64, out);
        encode_row_into(row, out)?;
    }
    Ok(())
}

pub fn encode_frame(frame: &Frame) -> Result<Vec<u8>, MessageError> {
    let mut out = Vec::new();
    encode_frame_into(frame, &mut out)?;
    Ok(out)
}

/// Encoded payload size of `frame`.
pub fn frame_encoded_len(frame: &Frame) -> Result<usize, MessageError> {
    frame.rows.iter().try_fold(0, |acc, r| {
        let n = row_encoded_len(r)?;
        Ok(acc + varint_len(((field::ROW as u64) << 3) | 2) + varint_len(n as u64) + n)
    })
}

// ---------------------------------------------------------------------------
// decoding

fn expect_bytes<'a>(v: FieldValue<'a>, at: usize, what: &str) -> Result<&'a [u8], MessageError> {
    match v {
        FieldValue::Bytes(b) => Ok(b),
        FieldValue::Varint(_) => Err(malformed(at, format!("{what} must be length-delimited"))),
    }
}

fn expect_varint(v: FieldValue<'_>, at: usize, what: &str) -> Result<u64, MessageError> {
    match v {
        FieldValue::Varint(x) => Ok(x),
        FieldValue::Bytes(_) => Err(malformed(at, format!("{what} must be a varint"))),
    }
}

fn expect_u32(v: FieldValue<'_>, at: usize, what: &str) -> Result<u32, MessageError> {
    let x = expect_varint(v, at, what)?;
    u32::try_from(x).map_err(|_| malformed(at, format!("{what} {x} out of range")))
}

fn utf8(b: &[u8], at: usize) -> Result<String, MessageError> {
    std::str::from_utf8(b)
        .map(str::to_owned)
        .map_err(|_| malformed(at, "string is not valid UTF-8"))
}

fn decode_iri(b: &[u8], base: usize) -> Result<WireTerm, MessageError> {
    let (mut prefix_id, mut name_id) = (0, 0);
    let mut r = FieldReader::new(b, base);
    while let Some((f, v, at)) = r.next_field()? {
        match f {
            1 => prefix_id = expect_u32(v, at, "prefix_id")?,
            2 => name_id = expect_u32(v, at, "name_id")?,
            _ => {}
        }
    }
    Ok(WireTerm::Iri { prefix_id, name_id })
}

fn decode_literal(b: &[u8], base: usize) -> Result<WireTerm, MessageError> {
    let mut lexical = String::new();
    let mut lang = String::new();
    let mut dt = 0;
    let mut r = FieldReader::new(b, base);
    while let Some((f, v, at)) = r.next_field()? {
        match f {
            1 => lexical = utf8(expect_bytes(v, at, "lexical")?, at)?,
            2 => lang = utf8(expect_bytes(v, at, "langtag")?, at)?,
            3 => dt = expect_u32(v, at, "datatype_id")?,
            _ => {}
        }
    }
    let kind = match (lang.is_empty(), dt) {
        (true, 0) => WireLiteralKind::Simple,
        (false, 0) => WireLiteralKind::Lang(lang),
        (true, id) => WireLiteralKind::Datatype(id),
        (false, _) => return Err(malformed(base, "literal has both langtag and datatype")),
    };
    Ok(WireTerm::Literal(WireLiteral { lexical, kind }))
}

/// Decodes term fields into `slots`, one slot per entry of `positions`.
fn decode_terms(b: &[u8], base: usize, slots: &mut [WireTerm], positions: &[Position]) -> Result<(), MessageError> {
    let mut r = FieldReader::new(b, base);
    while let Some((f, v, at)) = r.next_field()? {
        let found = positions.iter().enumerate().find_map(|(i, p)| {
            p.fields().iter().position(|&pf| pf != 0 && pf == f).map(|k| (i, *p, k))
        });
        let Some((slot, pos, kind)) = found else { continue };
        if !slots[slot].is_absent() {
            return Err(malformed(at, format!("{} set more than once", pos.name())));
        }
        let payload = expect_bytes(v, at, pos.name())?;
        slots[slot] = match kind {
            0 => decode_iri(payload, at)?,
            1 => WireTerm::Bnode(utf8(payload, at)?),
            2 => decode_literal(payload, at)?,
            _ => WireTerm::DefaultGraph,
        };
    }
    Ok(())
}

fn decode_options(b: &[u8], base: usize) -> Result<StreamOptions, MessageError> {
    let mut o = StreamOptions {
        stream_name: String::new(),
        physical_type: PhysicalType::Unspecified,
        logical_type: LogicalType::Unspecified,
        max_name_table: 0,
        max_prefix_table: 0,
        max_datatype_table: 0,
        version: 0,
    };
    let mut r = FieldReader::new(b, base);
    while let Some((f, v, at)) = r.next_field()? {
        match f {
            1 => o.stream_name = utf8(expect_bytes(v, at, "stream_name")?, at)?,
            2 => {
                let c = expect_varint(v, at, "physical_type")?;
                o.physical_type = PhysicalType::from_code(c)
                    .ok_or_else(|| malformed(at, format!("unknown physical type {c}")))?;
            }
            3 => {
                let c = expect_varint(v, at, "logical_type")?;
                o.logical_type = LogicalType::from_code(c)
                    .ok_or_else(|| malformed(at, format!("unknown logical type {c}")))?;
            }
            4 => o.max_name_table = expect_u32(v, at, "max_name_table")?,
            5 => o.max_prefix_table = expect_u32(v, at, "max_prefix_table")?,
            6 => o.max_datatype_table = expect_u32(v, at, "max_datatype_table")?,
            7 => o.version = expect_u32(v, at, "version")?,
            _ => {}
        }
    }
    Ok(o)
}

fn decode_entry(b: &[u8], base: usize) -> Result<Entry, MessageError> {
    let mut e = Entry { id: 0, value: String::new() };
    let mut r = FieldReader::new(b, base);
    while let Some((f, v, at)) = r.next_field()? {
        match f {
            1 => e.id = expect_u32(v, at, "entry id")?,
            2 => e.value = utf8(expect_bytes(v, at, "entry value")?, at)?,
            _ => {}
        }
    }
    Ok(e)
}

/// Decodes one row message. Rows that carry only unknown fields yield `None`.
pub fn decode_row_at(bytes: &[u8], base: usize) -> Result<Option<Row>, MessageError> {
    use field::*;
    let mut row: Option<Row> = None;
    let mut r = FieldReader::new(bytes, base);
    while let Some((f, v, at)) = r.next_field()? {
        let decoded = match f {
            ROW_OPTIONS => Row::Options(decode_options(expect_bytes(v, at, "options")?, at)?),
            ROW_TRIPLE => {
                let mut t = [WireTerm::Absent, WireTerm::Absent, WireTerm::Absent];
                decode_terms(
                    expect_bytes(v, at, "triple")?,
                    at,
                    &mut t,
                    &[Position::Subject, Position::Predicate, Position::Object],
                )?;
                let [subject, predicate, object] = t;
                Row::Triple(TripleRow { subject, predicate, object })
            }
            ROW_QUAD => {
                let mut t = [WireTerm::Absent, WireTerm::Absent, WireTerm::Absent, WireTerm::Absent];
                decode_terms(
                    expect_bytes(v, at, "quad")?,
                    at,
                    &mut t,
                    &[Position::Subject, Position::Predicate, Position::Object, Position::Graph],
                )?;
                let [subject, predicate, object, graph] = t;
                Row::Quad(QuadRow { subject, predicate, object, graph })
            }
            ROW_GRAPH_START => {
                let mut t = [WireTerm::Absent];
                decode_terms(expect_bytes(v, at, "graph_start")?, at, &mut t, &[Position::GraphStart])?;
                let [g] = t;
                if g.is_absent() {
                    return Err(malformed(at, "graph_start without a graph term"));
                }
                Row::GraphStart(g)
            }
            ROW_GRAPH_END => {
                expect_bytes(v, at, "graph_end")?;
                Row::GraphEnd
            }
            ROW_NAME => Row::Name(decode_entry(expect_bytes(v, at, "name entry")?, at)?),
            ROW_PREFIX => Row::Prefix(decode_entry(expect_bytes(v, at, "prefix entry")?, at)?),
            ROW_DATATYPE => Row::Datatype(decode_entry(expect_bytes(v, at, "datatype entry")?, at)?),
            _ => continue,
        };
        if row.is_some() {
            return Err(malformed(at, "row has more than one variant set"));
        }
        row = Some(decoded);
    }
    Ok(row)
}

pub fn decode_row(bytes: &[u8]) -> Result<Option<Row>, MessageError> {
    decode_row_at(bytes, 0)
}

/// Decodes a frame payload. Unknown frame fields and unknown rows are skipped.
pub fn decode_frame(payload: &[u8]) -> Result<Frame, MessageError> {
    let mut rows = Vec::with_capacity(payload.len() / 16);
    let mut r = FieldReader::new(payload, 0);
    while let Some((f, v, at)) = r.next_field()? {
        if f != field::ROW {
            continue;
        }
        if let Some(row) = decode_row_at(expect_bytes(v, at, "row")?, at)? {
            rows.push(row);
        }
    }
    Ok(Frame { rows })
}

/// Walks a frame payload and calls `f` with each row's encoded size (including
/// its field header) and decoded value. Used for per-row byte accounting.
pub fn for_each_row_with_size(
    payload: &[u8],
    mut f: impl FnMut(usize, Row),
) -> Result<(), MessageError> {
    let mut r = FieldReader::new(payload, 0);
    let mut start = 0;
    while let Some((fno, v, at)) = r.next_field()? {
        let end = r.offset();
        if fno == field::ROW {
            if let Some(row) = decode_row_at(expect_bytes(v, at, "row")?, at)? {
                f(end - start, row);
            }
        }
        start = end;
    }
    Ok(())
}
