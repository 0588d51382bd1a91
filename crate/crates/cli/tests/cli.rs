#[path = "common/run.rs"]
mod run;
#[path = "common/walker.rs"]
mod walker;

use std::fs;

use run::{code, data, jelly, path_str, stderr};

const FIXTURE_HEX: &str = "44 0a 0e 0a 0c 10 01 18 01 20 08 28 04 30 04 38 01 0a 11 42 0f 12 0d \
    68 74 74 70 3a 2f 2f 65 2e 6f 72 67 2f 0a 05 3a 03 12 01 73 0a 05 3a 03 12 01 70 \
    0a 11 12 0f 0a 02 08 01 1a 00 32 07 0a 05 68 65 6c 6c 6f \
    0d 0a 05 3a 03 12 01 6f 0a 04 12 02 22 00";

fn hex(s: &str) -> Vec<u8> {
    s.split_whitespace().map(|b| u8::from_str_radix(b, 16).unwrap()).collect()
}

fn fixture(name: &str) -> Vec<u8> {
    fs::read(data(name)).unwrap()
}

#[test]
fn fixture_file_matches_hand_encoding() {
    assert_eq!(fixture("fixture.jelly"), hex(FIXTURE_HEX));
}

#[test]
fn to_jelly_writes_fixture_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.jelly");
    let input = data("fixture.nt");
    let args = [
        "rdf",
        "to-jelly",
        path_str(&input),
        &format!("--to={}", path_str(&out)),
        "--opt.max-name-table-size=8",
        "--opt.max-prefix-table-size=4",
        "--opt.max-datatype-table-size=4",
        "--rows-per-frame=5",
    ];
    let r = jelly(&args, b"");
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert!(r.stdout.is_empty());
    assert_eq!(fs::read(&out).unwrap(), fixture("fixture.jelly"));
}

#[test]
fn to_jelly_reads_stdin_and_writes_stdout() {
    let r = jelly(
        &["rdf", "to-jelly", "--opt.max-name-table-size=8", "--opt.max-prefix-table-size=4", "--opt.max-datatype-table-size=4"],
        &fixture("fixture.nt"),
    );
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let back = jelly(&["rdf", "from-jelly", "--out-format=nt"], &r.stdout);
    assert_eq!(back.stdout, fixture("fixture.nt"));
}

#[test]
fn rows_per_frame_from_environment() {
    let r = std::process::Command::new(env!("CARGO_BIN_EXE_jelly"))
        .args(["rdf", "to-jelly", path_str(&data("fixture.nt"))])
        .args(["--opt.max-name-table-size=8", "--opt.max-prefix-table-size=4", "--opt.max-datatype-table-size=4"])
        .env("JELLY_ROWS_PER_FRAME", "5")
        .output()
        .unwrap();
    assert_eq!(r.stdout, fixture("fixture.jelly"));
}

#[test]
fn to_jelly_syntax_error_names_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.nt");
    fs::write(&bad, "<http://e.org/s> <http://e.org/p> <http://e.org/o> .\n<http://e.org/s> <http://e.org/p> .\n").unwrap();
    let out = dir.path().join("o.jelly");
    let r = jelly(&["rdf", "to-jelly", path_str(&bad), &format!("--to={}", path_str(&out))], b"");
    assert_eq!(code(&r), 3);
    assert!(stderr(&r).contains("line 2"), "{}", stderr(&r));
    assert!(!out.exists());
}

#[test]
fn to_jelly_rejects_turtle_and_bad_flags() {
    let dir = tempfile::tempdir().unwrap();
    let ttl = dir.path().join("in.ttl");
    fs::write(&ttl, "").unwrap();
    let r = jelly(&["rdf", "to-jelly", path_str(&ttl)], b"");
    assert_eq!(code(&r), 2);
    assert!(stderr(&r).contains("nt, nq"), "{}", stderr(&r));
    assert_eq!(code(&jelly(&["rdf", "to-jelly", "--opt.max-name-table-size=4"], b"")), 2);
    assert_eq!(code(&jelly(&["rdf", "to-jelly", "--rows-per-frame=0"], b"")), 2);
    assert_eq!(code(&jelly(&["rdf", "to-jelly", "--physical=lists"], b"")), 2);
    assert_eq!(code(&jelly(&["rdf", "frobnicate"], b"")), 2);
}

#[test]
fn to_jelly_missing_input_file() {
    let r = jelly(&["rdf", "to-jelly", "/nonexistent/in.nt"], b"");
    assert_eq!(code(&r), 3);
}

#[test]
fn from_jelly_nquads_by_default() {
    let r = jelly(&["rdf", "from-jelly", path_str(&data("fixture.jelly"))], b"");
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert_eq!(r.stdout, fixture("fixture.nq"));
}

#[test]
fn from_jelly_format_from_extension() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.nt");
    let r = jelly(&["rdf", "from-jelly", path_str(&data("fixture.jelly")), &format!("--to={}", path_str(&out))], b"");
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert_eq!(fs::read(&out).unwrap(), fixture("fixture.nt"));

    let ttl = dir.path().join("out.ttl");
    let r = jelly(&["rdf", "from-jelly", path_str(&data("fixture.jelly")), &format!("--to={}", path_str(&ttl))], b"");
    assert_eq!(code(&r), 2);
}

#[test]
fn from_jelly_text_golden() {
    let r = jelly(&["rdf", "from-jelly", path_str(&data("fixture.jelly")), "--out-format=jelly-text"], b"");
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert_eq!(String::from_utf8(r.stdout).unwrap(), fs::read_to_string(data("fixture.jelly-text")).unwrap());
}

#[test]
fn from_jelly_take_frames() {
    let text = fs::read_to_string(data("fixture.jelly-text")).unwrap();
    let second = &text[text.find("frame 1 {").unwrap()..];
    let r = jelly(&["rdf", "from-jelly", "--out-format=jelly-text", "--take-frames=1"], &fixture("fixture.jelly"));
    assert_eq!(String::from_utf8(r.stdout).unwrap(), second);

    let r = jelly(&["rdf", "from-jelly", "--out-format=nt", "--take-frames=1.."], &fixture("fixture.jelly"));
    assert_eq!(r.stdout, b"<http://e.org/s> <http://e.org/p> <http://e.org/o> .\n");
    let r = jelly(&["rdf", "from-jelly", "--out-format=nt", "--take-frames=..0"], &fixture("fixture.jelly"));
    assert_eq!(r.stdout, b"<http://e.org/s> <http://e.org/p> \"hello\" .\n");
    let r = jelly(&["rdf", "from-jelly", "--take-frames=7..9"], &fixture("fixture.jelly"));
    assert_eq!((code(&r), r.stdout.len()), (0, 0));
}

#[test]
fn from_jelly_bad_range_and_bad_input() {
    let r = jelly(&["rdf", "from-jelly", "--take-frames=5..3"], &fixture("fixture.jelly"));
    assert_eq!(code(&r), 2);
    let mut truncated = fixture("fixture.jelly");
    truncated.truncate(30);
    let r = jelly(&["rdf", "from-jelly"], &truncated);
    assert_eq!(code(&r), 3);
}

#[test]
fn from_then_to_then_from_is_stable() {
    let to = jelly(&["rdf", "to-jelly", "--in-format=nq"], &fixture("graphs.nq"));
    assert_eq!(code(&to), 0, "{}", stderr(&to));
    let first = jelly(&["rdf", "from-jelly"], &to.stdout);
    let again = jelly(&["rdf", "to-jelly", "--in-format=nq"], &first.stdout);
    let second = jelly(&["rdf", "from-jelly"], &again.stdout);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, fixture("graphs.nq"));
}

#[test]
fn graphs_stream_round_trips() {
    let to = jelly(&["rdf", "to-jelly", "--in-format=nq", "--physical=graphs"], &fixture("graphs.nq"));
    assert_eq!(code(&to), 0, "{}", stderr(&to));
    let back = jelly(&["rdf", "from-jelly"], &to.stdout);
    assert_eq!(back.stdout, fixture("graphs.nq"));
    let nt = jelly(&["rdf", "from-jelly", "--out-format=nt"], &to.stdout);
    assert_eq!(code(&nt), 3);
}

#[test]
fn transcode_golden_from_paths_and_stdin() {
    let input = path_str(&data("fixture.jelly")).to_string();
    let by_path = jelly(&["rdf", "transcode", &input, &input, "--opt.max-name-table-size=8192"], b"");
    assert_eq!(code(&by_path), 0, "{}", stderr(&by_path));
    let mut cat = fixture("fixture.jelly");
    cat.extend(fixture("fixture.jelly"));
    let piped = jelly(&["rdf", "transcode", "--opt.max-name-table-size=8192"], &cat);
    assert_eq!(piped.stdout, by_path.stdout);
    let text = jelly(&["rdf", "from-jelly", "--out-format=jelly-text"], &by_path.stdout);
    assert_eq!(String::from_utf8(text.stdout).unwrap(), fs::read_to_string(data("transcode.jelly-text")).unwrap());
    let nq = jelly(&["rdf", "from-jelly"], &by_path.stdout);
    assert_eq!(nq.stdout, [fixture("fixture.nq"), fixture("fixture.nq")].concat());
}

#[test]
fn transcode_rejects_mixed_physical_types() {
    let dir = tempfile::tempdir().unwrap();
    let quads = dir.path().join("q.jelly");
    let r = jelly(&["rdf", "to-jelly", path_str(&data("graphs.nq")), &format!("--to={}", path_str(&quads))], b"");
    assert_eq!(code(&r), 0);
    let r = jelly(&["rdf", "transcode", path_str(&data("fixture.jelly")), path_str(&quads)], b"");
    assert_eq!(code(&r), 3);
    assert!(stderr(&r).contains("not allowed in a TRIPLES stream"), "{}", stderr(&r));
}

#[test]
fn inspect_golden() {
    let r = jelly(&["rdf", "inspect", path_str(&data("fixture.jelly")), "--per-frame=true"], b"");
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert_eq!(String::from_utf8(r.stdout).unwrap(), fs::read_to_string(data("fixture.inspect")).unwrap());
    let bare = jelly(&["rdf", "inspect", "--per-frame"], &fixture("fixture.jelly"));
    let totals = jelly(&["rdf", "inspect", "--per-frame=false"], &fixture("fixture.jelly"));
    let full = fs::read_to_string(data("fixture.inspect")).unwrap();
    assert_eq!(String::from_utf8(bare.stdout).unwrap(), full);
    let totals = String::from_utf8(totals.stdout).unwrap();
    assert!(full.starts_with(&totals));
    assert!(!totals.contains("frame.0"));
    for line in ["frames: 2", "triples: 2", "name_entries: 3", "prefix_entries: 1"] {
        assert!(totals.lines().any(|l| l == line), "missing {line}");
    }
}

#[test]
fn inspect_empty_input() {
    let r = jelly(&["rdf", "inspect"], b"");
    assert_eq!(code(&r), 0);
    let out = String::from_utf8(r.stdout).unwrap();
    assert!(out.lines().any(|l| l == "frames: 0"), "{out}");
}

#[test]
fn inspect_totals_match_frame_walker() {
    let to = jelly(&["rdf", "to-jelly", "--in-format=nq", "--physical=graphs", "--rows-per-frame=3"], &fixture("graphs.nq"));
    let report = jelly(&["rdf", "inspect", "--per-frame=true"], &to.stdout);
    let text = String::from_utf8(report.stdout).unwrap();
    let oracle = walker::walk(&to.stdout);
    let value = |key: &str| -> u64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key}: ")))
            .unwrap_or_else(|| panic!("no {key}"))
            .parse()
            .unwrap()
    };
    assert_eq!(value("frames"), oracle.len() as u64);
    for key in ["rows", "options_rows", "triples", "quads", "graph_starts", "graph_ends", "name_entries", "prefix_entries", "datatype_entries", "statements", "bytes"] {
        let total: u64 = oracle.iter().map(|f| f.get(key).copied().unwrap_or(0)).sum();
        assert_eq!(value(key), total, "{key}");
        for (i, f) in oracle.iter().enumerate() {
            assert_eq!(value(&format!("frame.{i}.{key}")), f.get(key).copied().unwrap_or(0), "frame {i} {key}");
        }
    }
}

#[test]
fn validate_fixture() {
    let r = jelly(&["rdf", "validate", path_str(&data("fixture.jelly"))], b"");
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    assert!(r.stdout.is_empty());
    let r = jelly(&["rdf", "validate", "--compare-to", path_str(&data("fixture.nt"))], &fixture("fixture.jelly"));
    assert_eq!(code(&r), 0, "{}", stderr(&r));
}

#[test]
fn validate_compare_detects_mutation_and_accepts_renaming() {
    let enc = jelly(&["rdf", "to-jelly", "--in-format=nt"], &fixture("bnodes.nt"));
    assert_eq!(code(&enc), 0);
    let renamed = format!("--compare-to={}", path_str(&data("bnodes-renamed.nt")));
    let r = jelly(&["rdf", "validate", &renamed], &enc.stdout);
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let mutated = format!("--compare-to={}", path_str(&data("bnodes-mutated.nt")));
    let r = jelly(&["rdf", "validate", &mutated], &enc.stdout);
    assert_eq!(code(&r), 1);
    let err = stderr(&r);
    assert!(err.contains("\"43\"") && err.contains("\"42\""), "{err}");
}

#[test]
fn validate_expect_options() {
    let input = path_str(&data("fixture.jelly")).to_string();
    let ok = jelly(&["rdf", "validate", &input, "--expect-options=max-name-table-size=8,physical-type=TRIPLES"], b"");
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    let bad = jelly(&["rdf", "validate", &input, "--expect-options=max-name-table-size=8192"], b"");
    assert_eq!(code(&bad), 1);
    assert!(stderr(&bad).contains("8192"));
    let unknown = jelly(&["rdf", "validate", &input, "--expect-options=colour=blue"], b"");
    assert_eq!(code(&unknown), 2);
}

#[test]
fn validate_undecodable_and_unclosed() {
    let r = jelly(&["rdf", "validate"], &[0x05, 0x0a, 0x03, 0xff, 0xff, 0xff]);
    assert_eq!(code(&r), 3);
    // GRAPHS stream whose final graph_end row has been cut off.
    let to = jelly(&["rdf", "to-jelly", "--in-format=nq", "--physical=graphs", "--rows-per-frame=1"], &fixture("graphs.nq"));
    let mut frames = Vec::new();
    let mut rest = &to.stdout[..];
    while let Some(block) = jelly_core::wire::read_delimited_block(&mut rest).unwrap() {
        frames.push(block);
    }
    let mut cut = Vec::new();
    for block in &frames[..frames.len() - 1] {
        jelly_core::wire::write_delimited_block(&mut cut, block).unwrap();
    }
    let r = jelly(&["rdf", "validate"], &cut);
    assert_eq!(code(&r), 1, "{}", stderr(&r));
}

#[test]
fn bench_modes() {
    let dir = tempfile::tempdir().unwrap();
    let r = jelly(&["rdf", "bench", path_str(&data("bnodes.nt")), "--mode=roundtrip"], b"");
    assert_eq!(code(&r), 0, "{}", stderr(&r));
    let out = String::from_utf8(r.stdout).unwrap();
    let keys: Vec<&str> = out.lines().map(|l| l.split(": ").next().unwrap()).collect();
    assert_eq!(
        keys,
        ["statements", "encode_mtps", "decode_mtps", "roundtrip", "jelly_bytes", "ntriples_bytes", "ratio_vs_ntriples"]
    );
    assert!(out.starts_with("statements: 6\n"));

    let r = jelly(&["rdf", "bench", path_str(&data("fixture.jelly")), "--mode=decode"], b"");
    let out = String::from_utf8(r.stdout).unwrap();
    assert!(out.contains("decode_mtps: ") && out.contains("jelly_bytes: 83\n"), "{out}");
    assert!(out.contains("ntriples_bytes: 97\n"), "{out}");

    let bad = dir.path().join("bad.nt");
    fs::write(&bad, "not rdf\n").unwrap();
    assert_eq!(code(&jelly(&["rdf", "bench", path_str(&bad)], b"")), 3);
    assert_eq!(code(&jelly(&["rdf", "bench", path_str(&bad), "--mode=fast"], b"")), 2);
}
