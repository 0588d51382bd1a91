//! In-memory throughput measurements.

use std::time::Instant;

use jelly_core::interop::write_statement_nq;
use jelly_core::rdf::{Statement, StreamEvent};
use jelly_core::{decode_events, encode_events, Error, StreamOptions};

pub const RUNS: usize = 3;

/// Runs `f` `runs` times and returns the fastest wall time with its result.
pub fn best_of<T>(runs: usize, mut f: impl FnMut() -> Result<T, Error>) -> Result<(f64, T), Error> {
    let mut best: Option<(f64, T)> = None;
    for _ in 0..runs.max(1) {
        let start = Instant::now();
        let value = f()?;
        let secs = start.elapsed().as_secs_f64();
        if best.as_ref().map_or(true, |(b, _)| secs < *b) {
            best = Some((secs, value));
        }
    }
    Ok(best.expect("at least one run"))
}

pub fn encode_best(events: &[StreamEvent], options: &StreamOptions, rows_per_frame: usize) -> Result<(f64, Vec<u8>), Error> {
    best_of(RUNS, || encode_events(options.clone(), rows_per_frame, events))
}

pub fn decode_best(bytes: &[u8]) -> Result<(f64, Vec<StreamEvent>), Error> {
    best_of(RUNS, || decode_events(bytes))
}

/// Millions of statements per second.
pub fn mtps(statements: usize, secs: f64) -> f64 {
    statements as f64 / secs.max(1e-9) / 1e6
}

/// Size in bytes of the N-Triples (or N-Quads) rendering of `statements`.
pub fn ntriples_size<'a>(statements: impl IntoIterator<Item = &'a Statement>) -> usize {
    let mut line = String::new();
    let mut total = 0;
    for st in statements {
        line.clear();
        write_statement_nq(&mut line, st);
        total += line.len();
    }
    total
}

pub fn count_statements(events: &[StreamEvent]) -> usize {
    events.iter().filter(|e| matches!(e, StreamEvent::Statement(_))).count()
}
