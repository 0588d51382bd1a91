//! Row counter that walks raw frame bytes with only the wire layer, used as an
//! oracle for `inspect`.

use std::collections::BTreeMap;

use jelly_core::wire::{read_delimited_block, FieldReader, FieldValue};

/// Per-frame counts keyed like `inspect` output, e.g. `triples`, `bytes`.
pub fn walk(mut bytes: &[u8]) -> Vec<BTreeMap<&'static str, u64>> {
    let mut frames = Vec::new();
    loop {
        let before = bytes.len();
        let Some(payload) = read_delimited_block(&mut bytes).expect("delimited block") else { break };
        let mut counts = BTreeMap::new();
        counts.insert("bytes", (before - bytes.len()) as u64);
        let mut rows = FieldReader::new(&payload, 0);
        while let Some((1, FieldValue::Bytes(row), _)) = rows.next_field().expect("frame field") {
            *counts.entry("rows").or_insert(0) += 1;
            let mut fields = FieldReader::new(row, 0);
            let key = match fields.next_field().expect("row field").map(|(n, _, _)| n) {
                Some(1) => "options_rows",
                Some(2) => "triples",
                Some(3) => "quads",
                Some(4) => "graph_starts",
                Some(5) => "graph_ends",
                Some(7) => "name_entries",
                Some(8) => "prefix_entries",
                Some(9) => "datatype_entries",
                other => panic!("unexpected row field {other:?}"),
            };
            *counts.entry(key).or_insert(0) += 1;
        }
        let statements = counts.get("triples").copied().unwrap_or(0) + counts.get("quads").copied().unwrap_or(0);
        counts.insert("statements", statements);
        frames.push(counts);
    }
    frames
}
