//! Stream-to-stream recompression that works on ids, not terms.
//!
//! Input rows are resolved against a replica of the input decoder's tables,
//! then every referenced value is looked up in the output tables and the row
//! is rewritten with output ids. Entry rows are written to the output only when
//! a statement needs a value the output table does not already hold. An
//! options row in the input starts a new input stream; its tables replace the
//! previous input's and all repeat registers are cleared.

use std::io::Read;

use crate::decode::{check_options, resolve_iri_ids, DecodeError, DecodeErrorKind, DecoderLimits, FrameReader, MirrorTable, Table};
use crate::encode::{DeltaState, EncodeError};
use crate::lookup::LookupTable;
use crate::messages::{
    Entry, Frame, PhysicalType, QuadRow, Row, StreamOptions, TripleRow, WireLiteral, WireLiteralKind, WireTerm,
};
use crate::rdf::{is_blank_label, is_iri_fragment, is_lang_tag, Iri};
use crate::Error;

#[derive(Debug, Clone)]
struct InSlot {
    value: Box<str>,
    out_id: u32,
    out_gen: u64,
}

impl InSlot {
    fn new(value: &str) -> Self {
        InSlot { value: value.into(), out_id: 0, out_gen: 0 }
    }
}

/// Identity of an output term, used for repeat detection.
#[derive(Debug, Clone, PartialEq, Eq)]
enum OutKey {
    Iri { prefix: (u32, u64), name: (u32, u64) },
    Bnode(Box<str>),
    Literal(Box<str>, LitKey),
    Default,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum LitKey {
    Simple,
    Lang(Box<str>),
    Datatype(u32, u64),
}

/// Output term with absolute ids, before delta coding.
enum OutTerm {
    Iri { prefix: u32, name: u32 },
    Bnode(String),
    Literal(WireLiteral),
    Default,
}

struct Output {
    options: StreamOptions,
    rows_per_frame: usize,
    prefixes: LookupTable,
    names: LookupTable,
    datatypes: LookupTable,
    last_prefix_id: u32,
    last_name_id: u32,
    prev: [Option<OutKey>; 4],
    rows: Vec<Row>,
    frames: Vec<Frame>,
    entries: [usize; 3],
}

impl Output {
    fn push_row(&mut self, row: Row) {
        self.rows.push(row);
        if self.rows.len() >= self.rows_per_frame {
            self.frames.push(Frame::new(std::mem::take(&mut self.rows)));
        }
    }

    fn table(&mut self, t: Table) -> &mut LookupTable {
        match t {
            Table::Prefix => &mut self.prefixes,
            Table::Name => &mut self.names,
            Table::Datatype => &mut self.datatypes,
        }
    }

    /// Returns the output id holding `value`, emitting an entry row if needed.
    fn insert(&mut self, t: Table, value: &str) -> u32 {
        let table = self.table(t);
        let (id, new) = table.get_or_insert(value);
        if new {
            let wire = table.entry_wire_id(id);
            let entry = Entry::new(wire, value);
            let (row, i) = match t {
                Table::Prefix => (Row::Prefix(entry), 0),
                Table::Name => (Row::Name(entry), 1),
                Table::Datatype => (Row::Datatype(entry), 2),
            };
            self.entries[i] += 1;
            self.push_row(row);
        }
        id
    }

    /// Maps an input slot to its output id, reusing the cached mapping while
    /// the output slot has not been reassigned.
    fn map_slot(&mut self, t: Table, slot: &mut InSlot) -> u32 {
        if slot.out_id != 0 {
            let table = self.table(t);
            if table.generation(slot.out_id) == slot.out_gen {
                table.touch(slot.out_id);
                return slot.out_id;
            }
        }
        let id = self.insert(t, &slot.value);
        slot.out_id = id;
        slot.out_gen = self.table(t).generation(id);
        id
    }

    fn key(&self, term: &OutTerm) -> OutKey {
        match term {
            OutTerm::Iri { prefix, name } => OutKey::Iri {
                prefix: (*prefix, self.prefixes.generation(*prefix)),
                name: (*name, self.names.generation(*name)),
            },
            OutTerm::Bnode(b) => OutKey::Bnode(b.as_str().into()),
            OutTerm::Literal(l) => OutKey::Literal(
                l.lexical.as_str().into(),
                match &l.kind {
                    WireLiteralKind::Simple => LitKey::Simple,
                    WireLiteralKind::Lang(t) => LitKey::Lang(t.as_str().into()),
                    WireLiteralKind::Datatype(id) => LitKey::Datatype(*id, self.datatypes.generation(*id)),
                },
            ),
            OutTerm::Default => OutKey::Default,
        }
    }

    fn wire(&mut self, term: OutTerm) -> WireTerm {
        match term {
            OutTerm::Iri { prefix, name } => {
                let wp = if prefix == self.last_prefix_id { 0 } else { prefix };
                let wn = if name == self.last_name_id + 1 { 0 } else { name };
                self.last_prefix_id = prefix;
                self.last_name_id = name;
                WireTerm::Iri { prefix_id: wp, name_id: wn }
            }
            OutTerm::Bnode(b) => WireTerm::Bnode(b),
            OutTerm::Literal(l) => WireTerm::Literal(l),
            OutTerm::Default => WireTerm::DefaultGraph,
        }
    }
}

struct Input {
    options: Option<StreamOptions>,
    prefixes: MirrorTable<InSlot>,
    names: MirrorTable<InSlot>,
    datatypes: MirrorTable<InSlot>,
    delta: DeltaState,
    has_prev: [bool; 4],
    graph_open: bool,
}

/// Merges and recompresses `.jelly` streams.
pub struct Transcoder {
    input: Input,
    out: Output,
    frame_index: usize,
    inputs_seen: usize,
    sealed: bool,
}

const POSITION_NAMES: [&str; 4] = ["subject", "predicate", "object", "graph"];

fn malformed(reason: impl Into<String>) -> DecodeErrorKind {
    DecodeErrorKind::MalformedRow(reason.into())
}

impl Transcoder {
    pub fn new(out_options: StreamOptions, rows_per_frame: usize) -> Result<Self, EncodeError> {
        out_options.validate().map_err(EncodeError::InvalidOptions)?;
        if rows_per_frame == 0 {
            return Err(EncodeError::InvalidRowsPerFrame);
        }
        let out = Output {
            prefixes: LookupTable::new(out_options.max_prefix_table),
            names: LookupTable::new(out_options.max_name_table),
            datatypes: LookupTable::new(out_options.max_datatype_table),
            rows: vec![Row::Options(out_options.clone())],
            options: out_options,
            rows_per_frame,
            last_prefix_id: 0,
            last_name_id: 0,
            prev: Default::default(),
            frames: Vec::new(),
            entries: [0; 3],
        };
        Ok(Transcoder {
            input: Input {
                options: None,
                prefixes: MirrorTable::new(Table::Prefix),
                names: MirrorTable::new(Table::Name),
                datatypes: MirrorTable::new(Table::Datatype),
                delta: DeltaState::default(),
                has_prev: [false; 4],
                graph_open: false,
            },
            out,
            frame_index: 0,
            inputs_seen: 0,
            sealed: false,
        })
    }

    pub fn options(&self) -> &StreamOptions {
        &self.out.options
    }

    /// Number of input streams (options rows) seen so far.
    pub fn inputs_seen(&self) -> usize {
        self.inputs_seen
    }

    /// Entry rows written so far for the prefix, name and datatype tables.
    pub fn entries_emitted(&self) -> [usize; 3] {
        self.out.entries
    }

    /// Processes one input frame and returns the output frames it completed.
    pub fn ingest_frame(&mut self, frame: &Frame) -> Result<Vec<Frame>, Error> {
        if self.sealed {
            return Err(EncodeError::EncoderSealed.into());
        }
        let frame_no = self.frame_index;
        self.frame_index += 1;
        for (i, row) in frame.rows.iter().enumerate() {
            self.row(row)
                .map_err(|kind| DecodeError { kind, frame: frame_no, row: Some(i) })?;
        }
        Ok(std::mem::take(&mut self.out.frames))
    }

    /// Transcodes a byte stream (one or more concatenated inputs), passing
    /// each completed output frame to `emit`.
    pub fn ingest_stream_with<R: Read>(
        &mut self,
        src: R,
        mut emit: impl FnMut(Frame) -> Result<(), Error>,
    ) -> Result<(), Error> {
        let base = self.frame_index;
        let mut reader = FrameReader::new(src);
        loop {
            let next = reader.next_frame().map_err(|e| match e {
                Error::Decode(mut d) => {
                    d.frame += base;
                    Error::Decode(d)
                }
                e => e,
            })?;
            let Some((frame, _)) = next else { break };
            for f in self.ingest_frame(&frame)? {
                emit(f)?;
            }
        }
        Ok(())
    }

    pub fn ingest_stream<R: Read>(&mut self, src: R) -> Result<Vec<Frame>, Error> {
        let mut out = Vec::new();
        self.ingest_stream_with(src, |f| {
            out.push(f);
            Ok(())
        })?;
        Ok(out)
    }

    /// Flushes buffered rows and seals the transcoder.
    pub fn finish(&mut self) -> Result<Option<Frame>, Error> {
        if self.sealed {
            return Err(EncodeError::EncoderSealed.into());
        }
        self.sealed = true;
        if self.input.graph_open {
            log::warn!("input ended with a graph still open");
        }
        if self.out.rows.is_empty() {
            return Ok(None);
        }
        Ok(Some(Frame::new(std::mem::take(&mut self.out.rows))))
    }

    fn start_input(&mut self, o: &StreamOptions) -> Result<(), DecodeErrorKind> {
        check_options(o, &DecoderLimits::default())?;
        let physical = self.out.options.physical_type;
        if o.physical_type != physical {
            return Err(DecodeErrorKind::PhysicalTypeMismatch { physical, row: o.physical_type.name() });
        }
        if self.input.graph_open {
            log::warn!("input {} ended with a graph still open; closing it", self.inputs_seen);
            self.out.push_row(Row::GraphEnd);
        }
        let inp = &mut self.input;
        inp.prefixes.reset(o.max_prefix_table);
        inp.names.reset(o.max_name_table);
        inp.datatypes.reset(o.max_datatype_table);
        inp.delta = DeltaState::default();
        inp.has_prev = [false; 4];
        inp.graph_open = false;
        inp.options = Some(o.clone());
        self.out.prev = Default::default();
        self.inputs_seen += 1;
        Ok(())
    }

    fn row(&mut self, row: &Row) -> Result<(), DecodeErrorKind> {
        if let Row::Options(o) = row {
            return self.start_input(o);
        }
        let Some(options) = &self.input.options else {
            return Err(DecodeErrorKind::NoOptionsFirst);
        };
        let physical = options.physical_type;
        let inp = &mut self.input;
        match row {
            Row::Options(_) => unreachable!(),
            Row::Prefix(Entry { id, value }) => {
                if !is_iri_fragment(value) {
                    return Err(malformed(format!("invalid IRI prefix {value:?}")));
                }
                inp.prefixes.set(*id, InSlot::new(value))?;
            }
            Row::Name(Entry { id, value }) => {
                if !is_iri_fragment(value) {
                    return Err(malformed(format!("invalid IRI name {value:?}")));
                }
                inp.names.set(*id, InSlot::new(value))?;
            }
            Row::Datatype(Entry { id, value }) => {
                Iri::new(value.as_str()).map_err(|e| malformed(e.to_string()))?;
                inp.datatypes.set(*id, InSlot::new(value))?;
            }
            Row::Triple(TripleRow { subject, predicate, object }) => {
                if !matches!(physical, PhysicalType::Triples | PhysicalType::Graphs) {
                    return Err(DecodeErrorKind::PhysicalTypeMismatch { physical, row: "triple" });
                }
                let [s, p, o, _] = self.statement([subject, predicate, object, &WireTerm::Absent], false)?;
                self.out.push_row(Row::Triple(TripleRow { subject: s, predicate: p, object: o }));
            }
            Row::Quad(QuadRow { subject, predicate, object, graph }) => {
                if physical != PhysicalType::Quads {
                    return Err(DecodeErrorKind::PhysicalTypeMismatch { physical, row: "quad" });
                }
                let [s, p, o, g] = self.statement([subject, predicate, object, graph], true)?;
                self.out.push_row(Row::Quad(QuadRow { subject: s, predicate: p, object: o, graph: g }));
            }
            Row::GraphStart(g) => {
                if physical != PhysicalType::Graphs {
                    return Err(DecodeErrorKind::PhysicalTypeMismatch { physical, row: "graph_start" });
                }
                if inp.graph_open {
                    return Err(DecodeErrorKind::GraphStateError("graph_start while a graph is open"));
                }
                if matches!(g, WireTerm::Literal(_) | WireTerm::Absent) {
                    return Err(malformed("invalid graph term"));
                }
                inp.graph_open = true;
                let mut iris = [None; 4];
                self.resolve_iris(&[g], &mut iris)?;
                let term = self.map_term(g, iris[0], false)?;
                let wire = self.out.wire(term);
                self.out.push_row(Row::GraphStart(wire));
            }
            Row::GraphEnd => {
                if physical != PhysicalType::Graphs {
                    return Err(DecodeErrorKind::PhysicalTypeMismatch { physical, row: "graph_end" });
                }
                if !inp.graph_open {
                    return Err(DecodeErrorKind::GraphStateError("graph_end without an open graph"));
                }
                inp.graph_open = false;
                self.out.push_row(Row::GraphEnd);
            }
        }
        Ok(())
    }

    /// Resolves the input delta coding of each IRI, in row order, to absolute
    /// input ids and checks that the ids are set.
    fn resolve_iris(&mut self, terms: &[&WireTerm], iris: &mut [Option<(u64, u64)>; 4]) -> Result<(), DecodeErrorKind> {
        let inp = &mut self.input;
        for (i, t) in terms.iter().enumerate() {
            if let WireTerm::Iri { prefix_id, name_id } = t {
                let (p, n) = resolve_iri_ids(*prefix_id, *name_id, &inp.delta);
                let prefix = inp.prefixes.get(p)?;
                let name = inp.names.get(n)?;
                if prefix.value.is_empty() && name.value.is_empty() {
                    return Err(malformed("empty IRI"));
                }
                inp.delta.last_prefix_id = p as u32;
                inp.delta.last_name_id = n as u32;
                iris[i] = Some((p, n));
            }
        }
        Ok(())
    }

    fn map_term(&mut self, t: &WireTerm, iri: Option<(u64, u64)>, whole: bool) -> Result<OutTerm, DecodeErrorKind> {
        Ok(match t {
            WireTerm::Iri { .. } => {
                let (p, n) = iri.expect("resolved IRI");
                if whole {
                    let mut value = String::from(&*self.input.prefixes.get(p)?.value);
                    value.push_str(&self.input.names.get(n)?.value);
                    let prefix = self.out.insert(Table::Prefix, "");
                    let name = self.out.insert(Table::Name, &value);
                    OutTerm::Iri { prefix, name }
                } else {
                    let prefix = self.out.map_slot(Table::Prefix, self.input.prefixes.get_mut(p)?);
                    let name = self.out.map_slot(Table::Name, self.input.names.get_mut(n)?);
                    OutTerm::Iri { prefix, name }
                }
            }
            WireTerm::Bnode(label) => {
                if !is_blank_label(label) {
                    return Err(malformed(format!("invalid blank node label {label:?}")));
                }
                OutTerm::Bnode(label.clone())
            }
            WireTerm::Literal(l) => {
                let kind = match &l.kind {
                    WireLiteralKind::Simple => WireLiteralKind::Simple,
                    WireLiteralKind::Lang(tag) => {
                        if !is_lang_tag(tag) {
                            return Err(malformed(format!("invalid language tag {tag:?}")));
                        }
                        WireLiteralKind::Lang(tag.clone())
                    }
                    WireLiteralKind::Datatype(id) => {
                        let slot = self.input.datatypes.get_mut(*id as u64)?;
                        WireLiteralKind::Datatype(self.out.map_slot(Table::Datatype, slot))
                    }
                };
                OutTerm::Literal(WireLiteral { lexical: l.lexical.clone(), kind })
            }
            WireTerm::DefaultGraph => OutTerm::Default,
            WireTerm::Absent => unreachable!("absent terms are handled by the caller"),
        })
    }

    /// Rewrites the four positions of a statement row. The graph slot is
    /// ignored when `quad` is false.
    fn statement(&mut self, terms: [&WireTerm; 4], quad: bool) -> Result<[WireTerm; 4], DecodeErrorKind> {
        let n = if quad { 4 } else { 3 };
        for (i, t) in terms[..n].iter().enumerate() {
            if matches!(t, WireTerm::Absent) && !self.input.has_prev[i] {
                return Err(DecodeErrorKind::RepeatAtStreamStart(POSITION_NAMES[i]));
            }
        }
        let mut iris = [None; 4];
        self.resolve_iris(&terms[..n], &mut iris)?;
        let whole = self.needs_whole_iris(&iris);

        let mut mapped: [Option<OutTerm>; 4] = Default::default();
        for i in 0..n {
            if !matches!(terms[i], WireTerm::Absent) {
                mapped[i] = Some(self.map_term(terms[i], iris[i], whole)?);
                self.input.has_prev[i] = true;
            }
        }

        let mut wire: [WireTerm; 4] = Default::default();
        for (i, m) in mapped.into_iter().enumerate() {
            let Some(term) = m else { continue };
            let key = self.out.key(&term);
            if self.out.prev[i].as_ref() != Some(&key) {
                wire[i] = self.out.wire(term);
                self.out.prev[i] = Some(key);
            }
        }
        Ok(wire)
    }

    /// Output-side counterpart of the encoder's prefix overflow rule: if the
    /// statement's IRIs need more distinct prefixes than the output prefix
    /// table holds, they are all written whole under the empty prefix.
    fn needs_whole_iris(&self, iris: &[Option<(u64, u64)>; 4]) -> bool {
        let cap = self.out.options.max_prefix_table as usize;
        if iris.iter().flatten().count() <= cap {
            return false;
        }
        let mut distinct: Vec<&str> = Vec::with_capacity(4);
        for &(p, _) in iris.iter().flatten() {
            let v = &*self.input.prefixes.get(p).expect("resolved prefix").value;
            if !distinct.contains(&v) {
                distinct.push(v);
            }
        }
        distinct.len() > cap
    }
}

/// Transcodes `inputs` in order into a single stream with `out_options`.
pub fn transcode_bytes<'a>(
    inputs: impl IntoIterator<Item = &'a [u8]>,
    out_options: StreamOptions,
    rows_per_frame: usize,
) -> Result<Vec<u8>, Error> {
    let mut t = Transcoder::new(out_options, rows_per_frame)?;
    let mut out = Vec::new();
    let mut write = |f: &Frame| -> Result<(), Error> {
        let payload = crate::messages::encode_frame(f)?;
        crate::wire::write_delimited_block(&mut out, &payload)?;
        Ok(())
    };
    let mut frames = Vec::new();
    for input in inputs {
        t.ingest_stream_with(input, |f| {
            frames.push(f);
            Ok(())
        })?;
    }
    frames.extend(t.finish()?);
    for f in &frames {
        write(f)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encode::{encode_events, split_iri_calls};
    use crate::rdf::{make_bnode, make_iri, make_literal, GraphName, LiteralKind, Statement, StreamEvent, Term};
    use crate::{decode_events, Error};

    fn iri(s: &str) -> Term {
        make_iri(s).unwrap()
    }

    fn sample(tag: &str, n: usize) -> Vec<StreamEvent> {
        (0..n)
            .map(|i| {
                let o = match i % 4 {
                    0 => iri(&format!("http://ex.org/{tag}/o{}", i % 7)),
                    1 => make_literal(&format!("v{i}"), LiteralKind::Simple).unwrap(),
                    2 => make_literal(
                        &i.to_string(),
                        LiteralKind::Datatyped(Iri::new(format!("http://www.w3.org/2001/XMLSchema#t{}", i % 3)).unwrap()),
                    )
                    .unwrap(),
                    _ => make_bnode(&format!("b{}", i % 5)).unwrap(),
                };
                StreamEvent::Statement(
                    Statement::triple(
                        iri(&format!("http://ex.org/{tag}/s{}", i / 3)),
                        iri(&format!("http://other.net/voc#p{}", i % 5)),
                        o,
                    )
                    .unwrap(),
                )
            })
            .collect()
    }

    fn opts(name: u32, prefix: u32, dt: u32) -> StreamOptions {
        StreamOptions::flat_triples().with_tables(name, prefix, dt)
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(matches!(Transcoder::new(opts(1024, 64, 32), 0), Err(EncodeError::InvalidRowsPerFrame)));
        assert!(matches!(Transcoder::new(opts(4, 64, 32), 16), Err(EncodeError::InvalidOptions(_))));
        assert!(Transcoder::new(opts(8192, 64, 32), 16).is_ok());
    }

    #[test]
    fn identity_and_concatenation() {
        let a = sample("a", 300);
        let b = sample("b", 200);
        let ea = encode_events(opts(16, 4, 2), 32, &a).unwrap();
        let eb = encode_events(opts(64, 8, 4), 7, &b).unwrap();
        let same = transcode_bytes([ea.as_slice()], opts(16, 4, 2), 32).unwrap();
        assert_eq!(decode_events(&same).unwrap(), a);
        for out in [opts(8, 1, 1), opts(8192, 64, 32)] {
            let merged = transcode_bytes([ea.as_slice(), eb.as_slice()], out, 50).unwrap();
            let mut expected = a.clone();
            expected.extend(b.iter().cloned());
            assert_eq!(decode_events(&merged).unwrap(), expected);
        }
    }

    #[test]
    fn never_splits_iris() {
        let a = sample("a", 100);
        let ea = encode_events(opts(8, 2, 1), 16, &a).unwrap();
        let before = split_iri_calls();
        transcode_bytes([ea.as_slice()], opts(8, 1, 1), 16).unwrap();
        assert_eq!(split_iri_calls(), before);
    }

    fn entry_rows(bytes: &[u8]) -> [usize; 3] {
        let mut n = [0; 3];
        for f in FrameReader::new(bytes) {
            for r in f.unwrap().rows {
                match r {
                    Row::Prefix(_) => n[0] += 1,
                    Row::Name(_) => n[1] += 1,
                    Row::Datatype(_) => n[2] += 1,
                    _ => {}
                }
            }
        }
        n
    }

    #[test]
    fn no_extra_entries_for_identical_options() {
        let a = sample("a", 500);
        let ea = encode_events(opts(16, 4, 2), 64, &a).unwrap();
        let out = transcode_bytes([ea.as_slice()], opts(16, 4, 2), 64).unwrap();
        let (i, o) = (entry_rows(&ea), entry_rows(&out));
        assert!((0..3).all(|k| o[k] <= i[k]), "{o:?} > {i:?}");
    }

    #[test]
    fn larger_output_table_emits_names_once() {
        let a = sample("a", 2000);
        let ea = encode_events(opts(8, 64, 32), 64, &a).unwrap();
        let out = transcode_bytes([ea.as_slice()], opts(8192, 64, 32), 64).unwrap();
        let mut distinct = std::collections::HashSet::new();
        for ev in &a {
            let StreamEvent::Statement(st) = ev else { continue };
            for t in [st.subject(), st.predicate(), st.object()] {
                if let Term::Iri(i) = t {
                    distinct.insert(crate::encode::split_iri(i.as_str()).1.to_owned());
                }
            }
        }
        assert!(entry_rows(&ea)[1] > distinct.len());
        assert_eq!(entry_rows(&out)[1], distinct.len());
        assert_eq!(decode_events(&out).unwrap(), a);
    }

    #[test]
    fn quads_and_graphs() {
        let g = GraphName::NamedIri(Iri::new("http://g.org/graph/1").unwrap());
        let st = Statement::quad(iri("http://a.org/x/s"), iri("http://b.org/y#p"), iri("http://c.org/o"), g.clone()).unwrap();
        let q = vec![StreamEvent::Statement(st.clone()), StreamEvent::Statement(st.clone().with_graph(GraphName::DefaultGraph))];
        let quad_opts = StreamOptions::flat_quads();
        let eq = encode_events(quad_opts.clone(), 8, &q).unwrap();
        let out = transcode_bytes([eq.as_slice(), eq.as_slice()], quad_opts.clone().with_tables(8, 1, 1), 3).unwrap();
        let mut expected = q.clone();
        expected.extend(q.iter().cloned());
        assert_eq!(decode_events(&out).unwrap(), expected);

        let err = transcode_bytes([eq.as_slice()], StreamOptions::flat_triples(), 8).unwrap_err();
        assert!(matches!(err, Error::Decode(DecodeError { kind: DecodeErrorKind::PhysicalTypeMismatch { .. }, .. })));

        let graphs = StreamOptions::new(PhysicalType::Graphs, crate::messages::LogicalType::Datasets);
        let ev = vec![
            StreamEvent::GraphStart(g),
            StreamEvent::Statement(st.into_triple()),
            StreamEvent::GraphEnd,
        ];
        let eg = encode_events(graphs.clone(), 8, &ev).unwrap();
        let out = transcode_bytes([eg.as_slice()], graphs, 2).unwrap();
        assert_eq!(decode_events(&out).unwrap(), ev);
    }

    #[test]
    fn closes_graph_left_open_by_previous_input() {
        let graphs = StreamOptions::new(PhysicalType::Graphs, crate::messages::LogicalType::Datasets);
        let g = GraphName::NamedIri(Iri::new("http://g.org/1").unwrap());
        let st = Statement::triple(iri("http://a.org/s"), iri("http://a.org/p"), iri("http://a.org/o")).unwrap();
        let open = vec![StreamEvent::GraphStart(g.clone()), StreamEvent::Statement(st.clone())];
        let e = encode_events(graphs.clone(), 8, &open).unwrap();
        let out = transcode_bytes([e.as_slice(), e.as_slice()], graphs, 8).unwrap();
        let mut expected = open.clone();
        expected.push(StreamEvent::GraphEnd);
        expected.extend(open);
        assert_eq!(decode_events(&out).unwrap(), expected);
    }

    #[test]
    fn finish_and_seal() {
        let mut t = Transcoder::new(opts(16, 4, 2), 64).unwrap();
        assert_eq!(t.finish().unwrap().map(|f| f.len()), Some(1));
        assert!(t.finish().is_err());
        assert!(t.ingest_frame(&Frame::default()).is_err());

        let input = encode_events(opts(16, 4, 2), 64, &sample("a", 1)).unwrap();
        let mut t = Transcoder::new(opts(16, 4, 2), 1).unwrap();
        assert!(!t.ingest_stream(input.as_slice()).unwrap().is_empty());
        assert_eq!(t.finish().unwrap(), None);
    }

    #[test]
    fn input_errors() {
        let mut t = Transcoder::new(opts(16, 4, 2), 64).unwrap();
        let e = t.ingest_frame(&Frame::new(vec![Row::GraphEnd])).unwrap_err();
        assert!(matches!(e, Error::Decode(DecodeError { kind: DecodeErrorKind::NoOptionsFirst, frame: 0, row: Some(0) })));
        let mut t = Transcoder::new(opts(16, 4, 2), 64).unwrap();
        let frame = Frame::new(vec![Row::Options(opts(16, 4, 2)), Row::Triple(TripleRow::default())]);
        let e = t.ingest_frame(&frame).unwrap_err();
        assert!(matches!(
            e,
            Error::Decode(DecodeError { kind: DecodeErrorKind::RepeatAtStreamStart("subject"), row: Some(1), .. })
        ));
    }
}
