//! Streaming binary codec for RDF triples, quads, graphs and datasets.
//!
//! A `.jelly` stream is a sequence of varint-length-delimited frames. Each
//! frame holds rows: a leading options row, lookup-table entry rows, statement
//! rows and graph boundary rows. IRIs are written as (prefix id, name id)
//! pairs into three bounded lookup tables; ids are delta-coded so that the
//! common cases cost zero bytes, and terms repeated from the previous
//! statement are omitted. Encoder and decoder state is bounded by the table
//! capacities, so streams of any length are processed in constant memory.
//!
//! ```
//! use jelly_core::{decode_events, encode_events, rdf::*, StreamOptions};
//!
//! let st = Statement::triple(
//!     make_iri("http://example.org/s").unwrap(),
//!     make_iri("http://example.org/p").unwrap(),
//!     make_literal("hello", LiteralKind::Simple).unwrap(),
//! ).unwrap();
//! let events = vec![StreamEvent::Statement(st)];
//! let bytes = encode_events(StreamOptions::flat_triples(), 256, &events).unwrap();
//! assert_eq!(decode_events(&bytes).unwrap(), events);
//! ```

use std::io;

use thiserror::Error;

pub mod compare;
pub mod decode;
pub mod encode;
pub mod interop;
pub mod lookup;
pub mod messages;
pub mod rdf;
pub mod transcode;
pub mod wire;

pub use decode::{decode_events, DecodeError, DecodeErrorKind, Decoder, DecoderLimits, FrameReader, JellyReader};
pub use encode::{encode_events, EncodeError, Encoder, JellyWriter, DEFAULT_ROWS_PER_FRAME};
pub use messages::{Frame, LogicalType, PhysicalType, Row, StreamOptions};
pub use transcode::Transcoder;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(io::Error),
    #[error(transparent)]
    Wire(#[from] wire::WireError),
    #[error(transparent)]
    Message(#[from] messages::MessageError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Term(#[from] rdf::TermError),
    #[error(transparent)]
    Syntax(#[from] interop::SyntaxError),
    #[error(transparent)]
    Serialize(#[from] interop::SerializeError),
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        match wire::wire_error_of(&e) {
            Some(w) => Error::Wire(w.clone()),
            None => Error::Io(e),
        }
    }
}
