//! The `jelly` command-line tool: conversion between N-Triples / N-Quads and
//! `.jelly`, transcoding, inspection, validation and benchmarking.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use jelly_core::compare::compare_datasets;
use jelly_core::interop::{
    parse_nq_str, parse_nt_str, write_statement_nq, write_statement_nt, JellyTextRenderer, StatementReader,
    TextSyntax,
};
use jelly_core::messages::{
    encode_frame_into, LogicalType, PhysicalType, DEFAULT_DATATYPE_TABLE, DEFAULT_NAME_TABLE, DEFAULT_PREFIX_TABLE,
};
use jelly_core::rdf::{Statement, StreamEvent};
use jelly_core::wire::write_delimited_block;
use jelly_core::{Decoder, FrameReader, JellyWriter, StreamOptions, Transcoder};
use thiserror::Error;

pub mod bench;
pub mod convert;
pub mod inspect;
pub mod range;

use convert::{EventShaper, StatementFlattener};
use range::FrameRange;

const SUPPORTED_FORMATS: &str = "supported formats: nt, nq, jelly-text (and jelly for binary input)";

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Input(String),
    #[error("broken pipe")]
    BrokenPipe,
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Invalid(_) => 1,
            Failure::Input(_) => 3,
            Failure::BrokenPipe => 0,
        }
    }
}

impl From<jelly_core::Error> for Failure {
    fn from(e: jelly_core::Error) -> Self {
        match e {
            jelly_core::Error::Io(io) => io.into(),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            Failure::BrokenPipe
        } else {
            Failure::Input(e.to_string())
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "jelly", version, about = "Streaming binary RDF toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Top,
}

#[derive(Subcommand, Debug)]
enum Top {
    /// RDF conversion, transcoding, inspection and validation.
    Rdf {
        #[command(subcommand)]
        command: RdfCommand,
    },
}

#[derive(Args, Debug, Clone, Default)]
struct TableArgs {
    /// Name lookup table capacity (at least 8).
    #[arg(long = "opt.max-name-table-size", value_name = "N")]
    name: Option<u32>,
    /// Prefix lookup table capacity (at least 1).
    #[arg(long = "opt.max-prefix-table-size", value_name = "N")]
    prefix: Option<u32>,
    /// Datatype lookup table capacity (at least 1).
    #[arg(long = "opt.max-datatype-table-size", value_name = "N")]
    datatype: Option<u32>,
}

#[derive(Args, Debug, Clone)]
struct FrameArgs {
    /// Rows per output frame.
    #[arg(
        long = "rows-per-frame",
        env = "JELLY_ROWS_PER_FRAME",
        default_value_t = 256,
        value_parser = clap::value_parser!(u64).range(1..)
    )]
    rows_per_frame: u64,
}

#[derive(Subcommand, Debug)]
enum RdfCommand {
    /// Convert N-Triples or N-Quads to .jelly.
    ToJelly {
        /// Input file; stdin when absent or `-`.
        input: Option<PathBuf>,
        /// Output file; stdout when absent.
        #[arg(long)]
        to: Option<PathBuf>,
        /// Input syntax: nt or nq. Defaults to the file extension.
        #[arg(long = "in-format")]
        in_format: Option<String>,
        /// Physical stream type: triples, quads or graphs.
        #[arg(long)]
        physical: Option<String>,
        /// Logical stream type, e.g. flat_triples or datasets.
        #[arg(long)]
        logical: Option<String>,
        #[command(flatten)]
        tables: TableArgs,
        #[command(flatten)]
        frames: FrameArgs,
    },
    /// Convert .jelly to N-Triples, N-Quads or the jelly-text debug view.
    FromJelly {
        input: Option<PathBuf>,
        #[arg(long)]
        to: Option<PathBuf>,
        /// nt, nq or jelly-text. Defaults to the --to extension, else nq.
        #[arg(long = "out-format")]
        out_format: Option<String>,
        /// Frames to output: a..b, a.., ..b or a (0-based, inclusive).
        #[arg(long = "take-frames")]
        take_frames: Option<String>,
    },
    /// Merge and recompress .jelly streams.
    Transcode {
        /// Input files; stdin (possibly several concatenated streams) when absent.
        inputs: Vec<PathBuf>,
        #[arg(long)]
        to: Option<PathBuf>,
        #[command(flatten)]
        tables: TableArgs,
        #[command(flatten)]
        frames: FrameArgs,
    },
    /// Print row statistics and stream options.
    Inspect {
        input: Option<PathBuf>,
        #[arg(long = "per-frame", default_value_t = false, num_args = 0..=1, default_missing_value = "true", action = clap::ArgAction::Set)]
        per_frame: bool,
    },
    /// Decode fully and optionally compare against a reference or expected options.
    Validate {
        input: Option<PathBuf>,
        /// Reference N-Triples / N-Quads file, compared up to blank node renaming.
        #[arg(long = "compare-to")]
        compare_to: Option<PathBuf>,
        /// Comma-separated key=value pairs, e.g. max-name-table-size=8192.
        #[arg(long = "expect-options")]
        expect_options: Option<String>,
    },
    /// Measure encode/decode throughput (best of three runs).
    Bench {
        input: PathBuf,
        #[arg(long, default_value = "encode")]
        mode: String,
        #[arg(long = "in-format")]
        in_format: Option<String>,
        #[command(flatten)]
        tables: TableArgs,
        #[command(flatten)]
        frames: FrameArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Format {
    NTriples,
    NQuads,
    JellyText,
    Jelly,
}

fn parse_format(name: &str) -> Result<Format, Failure> {
    match name.to_ascii_lowercase().as_str() {
        "nt" | "ntriples" | "n-triples" => Ok(Format::NTriples),
        "nq" | "nquads" | "n-quads" => Ok(Format::NQuads),
        "jelly-text" => Ok(Format::JellyText),
        "jelly" => Ok(Format::Jelly),
        other => Err(Failure::Usage(format!("unsupported format {other:?}; {SUPPORTED_FORMATS}"))),
    }
}

fn format_of_path(path: Option<&Path>) -> Result<Option<Format>, Failure> {
    match path.and_then(Path::extension).and_then(|e| e.to_str()) {
        None => Ok(None),
        Some(ext) => parse_format(ext).map(Some),
    }
}

fn is_stdin(path: Option<&Path>) -> bool {
    path.map_or(true, |p| p == Path::new("-"))
}

fn open_input<'a>(path: Option<&Path>, stdin: &'a mut dyn Read) -> Result<Box<dyn Read + 'a>, Failure> {
    match path {
        Some(p) if !is_stdin(Some(p)) => File::open(p)
            .map(|f| Box::new(f) as Box<dyn Read>)
            .map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        _ => Ok(Box::new(stdin)),
    }
}

/// Runs `f` against the output file, or stdout when `path` is absent. A file
/// that was only partly written is removed.
fn with_output(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<(), Failure>,
) -> Result<(), Failure> {
    match path {
        Some(p) if p != Path::new("-") => {
            let file = File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(file);
            let result = f(&mut w).and_then(|()| w.flush().map_err(Failure::from));
            if result.is_err() {
                drop(w);
                let _ = std::fs::remove_file(p);
            }
            result
        }
        _ => {
            let mut w = BufWriter::with_capacity(1 << 16, stdout);
            f(&mut w)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn parse_physical(s: &str) -> Result<PhysicalType, Failure> {
    match PhysicalType::from_name(s) {
        Some(PhysicalType::Unspecified) | None => {
            Err(Failure::Usage(format!("unknown physical type {s:?}; expected triples, quads or graphs")))
        }
        Some(t) => Ok(t),
    }
}

fn parse_logical(s: &str) -> Result<LogicalType, Failure> {
    LogicalType::from_name(s).ok_or_else(|| {
        Failure::Usage(format!(
            "unknown logical type {s:?}; expected flat_triples, flat_quads, graphs, datasets or unspecified"
        ))
    })
}

fn apply_tables(mut o: StreamOptions, t: &TableArgs) -> StreamOptions {
    o.max_name_table = t.name.unwrap_or(o.max_name_table);
    o.max_prefix_table = t.prefix.unwrap_or(o.max_prefix_table);
    o.max_datatype_table = t.datatype.unwrap_or(o.max_datatype_table);
    o
}

fn rdf_syntax(path: Option<&Path>, explicit: Option<&str>) -> Result<TextSyntax, Failure> {
    let format = match explicit {
        Some(f) => Some(parse_format(f)?),
        None => format_of_path(path)?,
    };
    match format {
        None | Some(Format::NTriples) => Ok(TextSyntax::NTriples),
        Some(Format::NQuads) => Ok(TextSyntax::NQuads),
        Some(_) => Err(Failure::Usage(format!("input must be N-Triples or N-Quads; {SUPPORTED_FORMATS}"))),
    }
}

fn encode_options(
    syntax: TextSyntax,
    physical: Option<&str>,
    logical: Option<&str>,
    tables: &TableArgs,
) -> Result<StreamOptions, Failure> {
    let physical = match physical {
        Some(p) => parse_physical(p)?,
        None if syntax == TextSyntax::NQuads => PhysicalType::Quads,
        None => PhysicalType::Triples,
    };
    let logical = match logical {
        Some(l) => parse_logical(l)?,
        None => match (physical, syntax) {
            (PhysicalType::Quads, _) => LogicalType::FlatQuads,
            (PhysicalType::Graphs, TextSyntax::NQuads) => LogicalType::Datasets,
            (PhysicalType::Graphs, TextSyntax::NTriples) => LogicalType::Graphs,
            _ => LogicalType::FlatTriples,
        },
    };
    let base = StreamOptions::new(physical, logical).with_tables(
        DEFAULT_NAME_TABLE,
        DEFAULT_PREFIX_TABLE,
        DEFAULT_DATATYPE_TABLE,
    );
    let options = apply_tables(base, tables);
    options.validate().map_err(Failure::Usage)?;
    Ok(options)
}

fn to_jelly(
    input: Option<&Path>,
    to: Option<&Path>,
    syntax: TextSyntax,
    options: StreamOptions,
    rows_per_frame: usize,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let source = BufReader::with_capacity(1 << 16, open_input(input, stdin)?);
    let physical = options.physical_type;
    with_output(to, stdout, |w| {
        let mut writer = JellyWriter::new(w, options, rows_per_frame).map_err(|e| Failure::Usage(e.to_string()))?;
        let mut shaper = EventShaper::new(physical);
        let mut events = Vec::new();
        for st in StatementReader::new(source, syntax) {
            shaper.push(st?, &mut events).map_err(Failure::Input)?;
            for ev in events.drain(..) {
                writer.write_event(&ev)?;
            }
        }
        shaper.finish(&mut events);
        for ev in events.drain(..) {
            writer.write_event(&ev)?;
        }
        writer.finish()?;
        Ok(())
    })
}

fn from_jelly(
    input: Option<&Path>,
    to: Option<&Path>,
    format: Format,
    range: FrameRange,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let mut frames = FrameReader::new(BufReader::with_capacity(1 << 16, open_input(input, stdin)?));
    let mut decoder = Decoder::default();
    let mut renderer = JellyTextRenderer::new();
    let mut flat = StatementFlattener::default();
    let mut events = Vec::new();
    let mut line = String::new();
    with_output(to, stdout, |w| {
        let mut index = 0;
        while !range.is_past(index) {
            let Some((frame, _)) = frames.next_frame()? else { break };
            events.clear();
            decoder.decode_frame_into(&frame, &mut events).map_err(jelly_core::Error::from)?;
            let selected = range.contains(index);
            if format == Format::JellyText {
                if selected {
                    w.write_all(renderer.render(&frame, index).as_bytes())?;
                } else {
                    renderer.observe(&frame);
                }
            } else {
                for ev in events.drain(..) {
                    let Some(st) = flat.push(ev) else { continue };
                    if selected {
                        line.clear();
                        if format == Format::NTriples {
                            write_statement_nt(&mut line, &st).map_err(|e| Failure::Input(e.to_string()))?;
                        } else {
                            write_statement_nq(&mut line, &st);
                        }
                        w.write_all(line.as_bytes())?;
                    }
                }
            }
            index += 1;
        }
        Ok(())
    })
}

fn transcode(
    inputs: &[PathBuf],
    to: Option<&Path>,
    tables: &TableArgs,
    rows_per_frame: usize,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let mut sources: Vec<Box<dyn Read + '_>> = Vec::new();
    if inputs.is_empty() {
        sources.push(Box::new(BufReader::with_capacity(1 << 16, stdin)));
    } else {
        for p in inputs {
            let f = File::open(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            sources.push(Box::new(BufReader::with_capacity(1 << 16, f)));
        }
    }
    let mut readers: Vec<FrameReader<Box<dyn Read + '_>>> = sources.into_iter().map(FrameReader::new).collect();
    let first = readers[0].next_frame()?.map(|(f, _)| f);
    let Some(first) = first else {
        return Err(Failure::Input("input contains no stream".into()));
    };
    let in_options = match first.rows.first() {
        Some(jelly_core::Row::Options(o)) => o.clone(),
        _ => return Err(Failure::Input("stream does not start with an options row".into())),
    };
    let out_options = apply_tables(in_options, tables);
    let mut transcoder = Transcoder::new(out_options, rows_per_frame).map_err(|e| Failure::Usage(e.to_string()))?;
    with_output(to, stdout, |w| {
        let mut buf = Vec::new();
        let mut emit = |frames: Vec<jelly_core::Frame>, w: &mut dyn Write| -> Result<(), Failure> {
            for f in frames {
                buf.clear();
                encode_frame_into(&f, &mut buf).map_err(jelly_core::Error::from)?;
                write_delimited_block(w, &buf)?;
            }
            Ok(())
        };
        emit(transcoder.ingest_frame(&first)?, w)?;
        for reader in &mut readers {
            while let Some((frame, _)) = reader.next_frame()? {
                emit(transcoder.ingest_frame(&frame)?, w)?;
            }
        }
        emit(transcoder.finish()?.into_iter().collect(), w)?;
        Ok(())
    })
}

fn parse_expected_options(list: &str) -> Result<Vec<(String, String)>, Failure> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|pair| {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Failure::Usage(format!("expected key=value in --expect-options, got {pair:?}")))?;
            Ok((k.trim().to_ascii_lowercase().replace('_', "-"), v.trim().to_string()))
        })
        .collect()
}

fn check_expected_options(o: &StreamOptions, expected: &[(String, String)]) -> Result<Vec<String>, Failure> {
    let mut problems = Vec::new();
    for (key, want) in expected {
        let actual = match key.as_str() {
            "stream-name" => o.stream_name.clone(),
            "physical-type" | "physical" => o.physical_type.name().to_string(),
            "logical-type" | "logical" => o.logical_type.name().to_string(),
            "max-name-table-size" => o.max_name_table.to_string(),
            "max-prefix-table-size" => o.max_prefix_table.to_string(),
            "max-datatype-table-size" => o.max_datatype_table.to_string(),
            "version" => o.version.to_string(),
            other => return Err(Failure::Usage(format!("unknown option key {other:?} in --expect-options"))),
        };
        if !actual.eq_ignore_ascii_case(want) {
            problems.push(format!("option {key}: expected {want}, found {actual}"));
        }
    }
    Ok(problems)
}

fn validate(
    input: Option<&Path>,
    compare_to: Option<&Path>,
    expect_options: Option<&str>,
    stdin: &mut dyn Read,
) -> Result<(), Failure> {
    let expected = expect_options.map(parse_expected_options).transpose()?;
    let reference = match compare_to {
        None => None,
        Some(p) => {
            let syntax = rdf_syntax(Some(p), None)?;
            let text = std::fs::read_to_string(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            let parsed = match syntax {
                TextSyntax::NTriples => parse_nt_str(&text),
                TextSyntax::NQuads => parse_nq_str(&text),
            };
            Some(parsed.map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?)
        }
    };

    let mut frames = FrameReader::new(BufReader::with_capacity(1 << 16, open_input(input, stdin)?));
    let mut decoder = Decoder::default();
    let mut flat = StatementFlattener::default();
    let mut events = Vec::new();
    let mut statements: Vec<Statement> = Vec::new();
    while let Some((frame, _)) = frames.next_frame()? {
        events.clear();
        decoder.decode_frame_into(&frame, &mut events).map_err(jelly_core::Error::from)?;
        if reference.is_some() {
            statements.extend(events.drain(..).filter_map(|e| flat.push(e)));
        }
    }

    let mut problems = Vec::new();
    if let Some(g) = decoder.open_graph() {
        problems.push(format!("stream ends inside graph {g:?}"));
    }
    if let Some(expected) = &expected {
        match decoder.options() {
            Some(o) => problems.extend(check_expected_options(o, expected)?),
            None => problems.push("stream has no options row".into()),
        }
    }
    if let Some(reference) = &reference {
        let report = compare_datasets(&statements, reference).map_err(|e| Failure::Invalid(e.to_string()))?;
        if !report.isomorphic {
            problems.push(report.summary(20));
        }
    }
    if problems.is_empty() {
        log::info!("valid");
        Ok(())
    } else {
        Err(Failure::Invalid(problems.join("\n")))
    }
}

fn run_bench(
    input: &Path,
    mode: &str,
    in_format: Option<&str>,
    tables: &TableArgs,
    rows_per_frame: usize,
    stdout: &mut dyn Write,
) -> Result<(), Failure> {
    let mut out = String::new();
    let parse_input = || -> Result<(StreamOptions, Vec<StreamEvent>, Vec<Statement>), Failure> {
        let syntax = rdf_syntax(Some(input), in_format)?;
        let options = encode_options(syntax, None, None, tables)?;
        let file = File::open(input).map_err(|e| Failure::Input(format!("{}: {e}", input.display())))?;
        let statements = StatementReader::new(BufReader::new(file), syntax).collect::<Result<Vec<_>, _>>()?;
        let mut shaper = EventShaper::new(options.physical_type);
        let mut events = Vec::with_capacity(statements.len());
        for st in &statements {
            shaper.push(st.clone(), &mut events).map_err(Failure::Input)?;
        }
        shaper.finish(&mut events);
        Ok((options, events, statements))
    };
    match mode {
        "encode" | "roundtrip" => {
            let (options, events, statements) = parse_input()?;
            let (enc_secs, bytes) = bench::encode_best(&events, &options, rows_per_frame)?;
            let nt = bench::ntriples_size(&statements);
            out += &format!("statements: {}\n", statements.len());
            out += &format!("encode_mtps: {:.3}\n", bench::mtps(statements.len(), enc_secs));
            if mode == "roundtrip" {
                let (dec_secs, decoded) = bench::decode_best(&bytes)?;
                out += &format!("decode_mtps: {:.3}\n", bench::mtps(statements.len(), dec_secs));
                if decoded != events {
                    stdout.write_all(out.as_bytes())?;
                    return Err(Failure::Invalid("decoded statements differ from the input".into()));
                }
                out += "roundtrip: ok\n";
            }
            out += &format!("jelly_bytes: {}\nntriples_bytes: {nt}\n", bytes.len());
            out += &format!("ratio_vs_ntriples: {:.4}\n", bytes.len() as f64 / nt.max(1) as f64);
        }
        "decode" => {
            let bytes = std::fs::read(input).map_err(|e| Failure::Input(format!("{}: {e}", input.display())))?;
            let (secs, events) = bench::decode_best(&bytes)?;
            let mut flat = StatementFlattener::default();
            let statements: Vec<Statement> = events.into_iter().filter_map(|e| flat.push(e)).collect();
            let nt = bench::ntriples_size(&statements);
            out += &format!("statements: {}\n", statements.len());
            out += &format!("decode_mtps: {:.3}\n", bench::mtps(statements.len(), secs));
            out += &format!("jelly_bytes: {}\nntriples_bytes: {nt}\n", bytes.len());
            out += &format!("ratio_vs_ntriples: {:.4}\n", bytes.len() as f64 / nt.max(1) as f64);
        }
        other => return Err(Failure::Usage(format!("unknown bench mode {other:?}; expected encode, decode or roundtrip"))),
    }
    stdout.write_all(out.as_bytes())?;
    Ok(())
}

fn dispatch(command: RdfCommand, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<(), Failure> {
    match command {
        RdfCommand::ToJelly { input, to, in_format, physical, logical, tables, frames } => {
            let syntax = rdf_syntax(input.as_deref().filter(|p| !is_stdin(Some(p))), in_format.as_deref())?;
            let options = encode_options(syntax, physical.as_deref(), logical.as_deref(), &tables)?;
            to_jelly(input.as_deref(), to.as_deref(), syntax, options, frames.rows_per_frame as usize, stdin, stdout)
        }
        RdfCommand::FromJelly { input, to, out_format, take_frames } => {
            let format = match out_format {
                Some(f) => parse_format(&f)?,
                None => format_of_path(to.as_deref().filter(|p| !is_stdin(Some(p))))?.unwrap_or(Format::NQuads),
            };
            if format == Format::Jelly {
                return Err(Failure::Usage(format!("from-jelly cannot write jelly; {SUPPORTED_FORMATS}")));
            }
            let range = match take_frames {
                Some(r) => r.parse().map_err(Failure::Usage)?,
                None => FrameRange::ALL,
            };
            from_jelly(input.as_deref(), to.as_deref(), format, range, stdin, stdout)
        }
        RdfCommand::Transcode { inputs, to, tables, frames } => {
            transcode(&inputs, to.as_deref(), &tables, frames.rows_per_frame as usize, stdin, stdout)
        }
        RdfCommand::Inspect { input, per_frame } => {
            let src = BufReader::with_capacity(1 << 16, open_input(input.as_deref(), stdin)?);
            let report = inspect::inspect(src, per_frame)?;
            stdout.write_all(report.render().as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
        RdfCommand::Validate { input, compare_to, expect_options } => {
            validate(input.as_deref(), compare_to.as_deref(), expect_options.as_deref(), stdin)
        }
        RdfCommand::Bench { input, mode, in_format, tables, frames } => {
            run_bench(&input, &mode, in_format.as_deref(), &tables, frames.rows_per_frame as usize, stdout)
        }
    }
}

/// Runs the tool with the given arguments (including the program name) and
/// returns the process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let Top::Rdf { command } = cli.command;
    match dispatch(command, stdin, stdout) {
        Ok(()) => 0,
        Err(Failure::BrokenPipe) => 0,
        Err(e) => {
            let kind = match e {
                Failure::Invalid(_) => "validation failed",
                Failure::Usage(_) => "usage error",
                _ => "error",
            };
            eprintln!("{kind}: {e}");
            e.exit_code()
        }
    }
}
