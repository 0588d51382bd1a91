//! Loader and runner for the bundled N-Triples syntax cases.

use std::path::{Path, PathBuf};

use jelly_core::interop::{parse_nt_str, serialize_nt, StatementReader, TextSyntax};
use jelly_core::Error;

pub enum Expect {
    /// Canonical N-Triples of the parsed statements.
    Canonical(String),
    /// Syntax error reported on this 1-based line.
    ErrorOnLine(usize),
}

pub struct Case {
    pub name: String,
    pub input: String,
    pub expect: Expect,
}

pub fn suite_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/ntriples-suite.txt")
}

fn block(lines: &[&str]) -> String {
    lines.iter().map(|l| format!("{l}\n")).collect()
}

pub fn load(path: &Path) -> Vec<Case> {
    let text = std::fs::read_to_string(path).expect("suite file");
    let lines: Vec<&str> = text.split('\n').collect();
    let mut cases = Vec::new();
    let mut i = 0;
    let section_end = |from: usize| (from..lines.len()).find(|&k| lines[k].starts_with("%%")).unwrap_or(lines.len());
    while i < lines.len() {
        let header = lines[i];
        if header.is_empty() {
            i += 1;
            continue;
        }
        let words: Vec<&str> = header.trim_start_matches("%% ").split(' ').collect();
        let end = section_end(i + 1);
        let input = block(&lines[i + 1..end]);
        match words[0] {
            "positive" => {
                assert_eq!(lines[end], "%% expected", "case {}", words[1]);
                let end2 = section_end(end + 1);
                let expected: Vec<&str> =
                    lines[end + 1..end2].iter().copied().filter(|l| !l.is_empty()).collect();
                cases.push(Case { name: words[1].into(), input, expect: Expect::Canonical(block(&expected)) });
                i = end2;
            }
            "negative" => {
                let line = words[2].strip_prefix("line=").and_then(|n| n.parse().ok()).expect("line=N");
                let input = input.trim_end_matches('\n').to_string() + "\n";
                cases.push(Case { name: words[1].into(), input, expect: Expect::ErrorOnLine(line) });
                i = end;
            }
            other => panic!("unknown case kind {other}"),
        }
    }
    cases
}

pub fn run(case: &Case) -> Result<(), String> {
    let streamed: Result<Vec<_>, Error> =
        StatementReader::new(case.input.as_bytes(), TextSyntax::NTriples).collect();
    match (&case.expect, parse_nt_str(&case.input)) {
        (Expect::Canonical(expected), Ok(statements)) => {
            let canonical = serialize_nt(&statements).map_err(|e| e.to_string())?;
            if &canonical != expected {
                return Err(format!("got {canonical:?}, expected {expected:?}"));
            }
            if parse_nt_str(expected).map_err(|e| e.to_string())? != statements {
                return Err("canonical form parses to different statements".into());
            }
            match streamed {
                Ok(s) if s == statements => Ok(()),
                _ => Err("streaming parser disagrees".into()),
            }
        }
        (Expect::Canonical(_), Err(e)) => Err(format!("unexpected error: {e}")),
        (Expect::ErrorOnLine(_), Ok(st)) => Err(format!("accepted {} statements", st.len())),
        (Expect::ErrorOnLine(line), Err(e)) => {
            if e.position.line != *line {
                return Err(format!("error on line {}, expected {line}: {e}", e.position.line));
            }
            match streamed {
                Err(Error::Syntax(s)) if s == e => Ok(()),
                other => Err(format!("streaming parser gave {other:?}")),
            }
        }
    }
}
