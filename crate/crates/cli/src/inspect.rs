//! Row statistics for `.jelly` files.

use std::fmt::Write as _;
use std::io::Read;

use jelly_core::{Decoder, Error, FrameReader, Frame, Row, StreamOptions};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub rows: u64,
    pub options_rows: u64,
    pub triples: u64,
    pub quads: u64,
    pub graph_starts: u64,
    pub graph_ends: u64,
    pub name_entries: u64,
    pub prefix_entries: u64,
    pub datatype_entries: u64,
    pub bytes: u64,
}

impl Counts {
    pub fn of_frame(frame: &Frame, size: usize) -> Self {
        let mut c = Counts { rows: frame.rows.len() as u64, bytes: size as u64, ..Counts::default() };
        for row in &frame.rows {
            let field = match row {
                Row::Options(_) => &mut c.options_rows,
                Row::Triple(_) => &mut c.triples,
                Row::Quad(_) => &mut c.quads,
                Row::GraphStart(_) => &mut c.graph_starts,
                Row::GraphEnd => &mut c.graph_ends,
                Row::Name(_) => &mut c.name_entries,
                Row::Prefix(_) => &mut c.prefix_entries,
                Row::Datatype(_) => &mut c.datatype_entries,
            };
            *field += 1;
        }
        c
    }

    pub fn statements(&self) -> u64 {
        self.triples + self.quads
    }

    pub fn add(&mut self, o: &Counts) {
        self.rows += o.rows;
        self.options_rows += o.options_rows;
        self.triples += o.triples;
        self.quads += o.quads;
        self.graph_starts += o.graph_starts;
        self.graph_ends += o.graph_ends;
        self.name_entries += o.name_entries;
        self.prefix_entries += o.prefix_entries;
        self.datatype_entries += o.datatype_entries;
        self.bytes += o.bytes;
    }

    fn write(&self, out: &mut String, prefix: &str) {
        for (k, v) in [
            ("rows", self.rows),
            ("options_rows", self.options_rows),
            ("triples", self.triples),
            ("quads", self.quads),
            ("graph_starts", self.graph_starts),
            ("graph_ends", self.graph_ends),
            ("name_entries", self.name_entries),
            ("prefix_entries", self.prefix_entries),
            ("datatype_entries", self.datatype_entries),
            ("statements", self.statements()),
            ("bytes", self.bytes),
        ] {
            let _ = writeln!(out, "{prefix}{k}: {v}");
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct InspectReport {
    pub options: Option<StreamOptions>,
    pub frames: u64,
    pub totals: Counts,
    pub per_frame: Option<Vec<Counts>>,
}

impl InspectReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        match &self.options {
            Some(o) => {
                let _ = writeln!(out, "options.stream_name: {}", o.stream_name);
                let _ = writeln!(out, "options.physical_type: {}", o.physical_type);
                let _ = writeln!(out, "options.logical_type: {}", o.logical_type);
                let _ = writeln!(out, "options.max_name_table_size: {}", o.max_name_table);
                let _ = writeln!(out, "options.max_prefix_table_size: {}", o.max_prefix_table);
                let _ = writeln!(out, "options.max_datatype_table_size: {}", o.max_datatype_table);
                let _ = writeln!(out, "options.version: {}", o.version);
            }
            None => out.push_str("options: none\n"),
        }
        let _ = writeln!(out, "frames: {}", self.frames);
        self.totals.write(&mut out, "");
        for (i, c) in self.per_frame.iter().flatten().enumerate() {
            c.write(&mut out, &format!("frame.{i}."));
        }
        out
    }
}

/// Reads and fully decodes a stream, counting rows per kind.
pub fn inspect<R: Read>(src: R, per_frame: bool) -> Result<InspectReport, Error> {
    let mut reader = FrameReader::new(src);
    let mut decoder = Decoder::default();
    let mut report = InspectReport { per_frame: per_frame.then(Vec::new), ..Default::default() };
    let mut scratch = Vec::new();
    while let Some((frame, size)) = reader.next_frame()? {
        scratch.clear();
        decoder.decode_frame_into(&frame, &mut scratch)?;
        let counts = Counts::of_frame(&frame, size);
        report.totals.add(&counts);
        report.frames += 1;
        if let Some(v) = &mut report.per_frame {
            v.push(counts);
        }
    }
    report.options = decoder.options().cloned();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use jelly_core::rdf::{make_iri, Statement, StreamEvent};
    use jelly_core::{encode_events, LogicalType, PhysicalType};

    fn sample() -> Vec<u8> {
        let iri = |s: &str| make_iri(&format!("http://e.org/{s}")).unwrap();
        let events: Vec<StreamEvent> = (0..5)
            .map(|i| StreamEvent::Statement(Statement::triple(iri(&format!("s{i}")), iri("p"), iri("o")).unwrap()))
            .collect();
        encode_events(StreamOptions::new(PhysicalType::Triples, LogicalType::FlatTriples), 3, &events).unwrap()
    }

    #[test]
    fn totals_are_sums_of_frames() {
        let bytes = sample();
        let report = inspect(&bytes[..], true).unwrap();
        let frames = report.per_frame.as_ref().unwrap();
        assert_eq!(frames.len() as u64, report.frames);
        let mut sum = Counts::default();
        frames.iter().for_each(|c| sum.add(c));
        assert_eq!(sum, report.totals);
        assert_eq!(report.totals.bytes, bytes.len() as u64);
        assert_eq!(report.totals.triples, 5);
        assert_eq!(report.totals.options_rows, 1);
    }

    #[test]
    fn render_without_per_frame_is_prefix() {
        let bytes = sample();
        let full = inspect(&bytes[..], true).unwrap().render();
        let short = inspect(&bytes[..], false).unwrap().render();
        assert!(full.starts_with(&short));
        assert!(full.contains("frame.0.rows: 3\n"));
        assert!(short.contains("options.physical_type: TRIPLES\n"));
    }

    #[test]
    fn empty_input() {
        let report = inspect(&b""[..], false).unwrap();
        assert_eq!(report.render().lines().next(), Some("options: none"));
        assert!(report.render().contains("frames: 0\n"));
    }
}
