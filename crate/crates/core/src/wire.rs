//! Varint and tag/length-delimited field codec, plus the delimited-block
//! framing used for files.

use std::io::{self, Read, Write};

use thiserror::Error;

/// Largest frame payload accepted when reading a delimited block.
pub const MAX_BLOCK_LEN: u64 = 1 << 28;
pub const MAX_FIELD_NUMBER: u32 = (1 << 29) - 1;
const MAX_VARINT_LEN: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("truncated input at byte {offset}")]
    TruncatedInput { offset: usize },
    #[error("varint longer than 10 bytes at byte {offset}")]
    OverlongVarint { offset: usize },
    #[error("unknown wire kind {kind} at byte {offset}")]
    UnknownWireKind { kind: u8, offset: usize },
    #[error("length {len} exceeds the allowed maximum at byte {offset}")]
    LengthOverflow { len: u64, offset: usize },
}

impl WireError {
    pub(crate) fn shifted(self, by: usize) -> Self {
        match self {
            WireError::TruncatedInput { offset } => WireError::TruncatedInput { offset: offset + by },
            WireError::OverlongVarint { offset } => WireError::OverlongVarint { offset: offset + by },
            WireError::UnknownWireKind { kind, offset } => {
                WireError::UnknownWireKind { kind, offset: offset + by }
            }
            WireError::LengthOverflow { len, offset } => {
                WireError::LengthOverflow { len, offset: offset + by }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WireKind {
    Varint,
    LengthDelimited,
}

impl WireKind {
    pub fn code(self) -> u8 {
        match self {
            WireKind::Varint => 0,
            WireKind::LengthDelimited => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FieldHeader {
    pub field_number: u32,
    pub kind: WireKind,
}

impl FieldHeader {
    pub fn new(field_number: u32, kind: WireKind) -> Self {
        debug_assert!(field_number >= 1 && field_number <= MAX_FIELD_NUMBER);
        FieldHeader { field_number, kind }
    }

    pub fn key(self) -> u64 {
        ((self.field_number as u64) << 3) | self.kind.code() as u64
    }

    /// Splits a decoded key varint into field number and kind.
    pub fn from_key(key: u64, offset: usize) -> Result<Self, WireError> {
        let kind = match key & 7 {
            0 => WireKind::Varint,
            2 => WireKind::LengthDelimited,
            other => return Err(WireError::UnknownWireKind { kind: other as u8, offset }),
        };
        let field_number = key >> 3;
        if field_number == 0 || field_number > MAX_FIELD_NUMBER as u64 {
            return Err(WireError::UnknownWireKind { kind: (key & 7) as u8, offset });
        }
        Ok(FieldHeader { field_number: field_number as u32, kind })
    }
}

#[inline]
pub fn varint_len(value: u64) -> usize {
    // 1 + floor(bits / 7), with 0 taking one byte
    let bits = 64 - (value | 1).leading_zeros() as usize;
    bits.div_ceil(7)
}

#[inline]
pub fn encode_varint(mut value: u64, out: &mut Vec<u8>) {
    while value >= 0x80 {
        out.push((value as u8 & 0x7F) | 0x80);
        value >>= 7;
    }
    out.push(value as u8);
}

/// Decodes a varint from the front of `bytes`, returning the value and the
/// number of bytes consumed. Non-minimal encodings up to 10 bytes are accepted.
#[inline]
pub fn decode_varint(bytes: &[u8]) -> Result<(u64, usize), WireError> {
    let mut value = 0u64;
    for (i, &b) in bytes.iter().enumerate() {
        if i == MAX_VARINT_LEN {
            return Err(WireError::OverlongVarint { offset: 0 });
        }
        value |= ((b & 0x7F) as u64) << (7 * i);
        if b & 0x80 == 0 {
            return Ok((value, i + 1));
        }
    }
    if bytes.len() >= MAX_VARINT_LEN {
        return Err(WireError::OverlongVarint { offset: 0 });
    }
    Err(WireError::TruncatedInput { offset: bytes.len() })
}

#[inline]
pub fn write_header(field_number: u32, kind: WireKind, out: &mut Vec<u8>) {
    encode_varint(FieldHeader::new(field_number, kind).key(), out);
}

#[inline]
pub fn write_varint_field(field_number: u32, value: u64, out: &mut Vec<u8>) {
    write_header(field_number, WireKind::Varint, out);
    encode_varint(value, out);
}

pub fn write_length_delimited_field(
    field_number: u32,
    payload: &[u8],
    out: &mut Vec<u8>,
) -> Result<(), WireError> {
    if payload.len() as u64 >= 1 << 32 {
        return Err(WireError::LengthOverflow { len: payload.len() as u64, offset: out.len() });
    }
    write_header(field_number, WireKind::LengthDelimited, out);
    encode_varint(payload.len() as u64, out);
    out.extend_from_slice(payload);
    Ok(())
}

/// Encoded size of a length-delimited field with a payload of `len` bytes.
#[inline]
pub fn delimited_field_len(field_number: u32, len: usize) -> usize {
    varint_len(((field_number as u64) << 3) | 2) + varint_len(len as u64) + len
}

#[inline]
pub fn varint_field_len(field_number: u32, value: u64) -> usize {
    varint_len((field_number as u64) << 3) + varint_len(value)
}

/// Skips the value of a field whose header was already consumed.
/// Returns the number of bytes skipped.
pub fn skip_unknown_field(header: FieldHeader, bytes: &[u8]) -> Result<usize, WireError> {
    match header.kind {
        WireKind::Varint => decode_varint(bytes).map(|(_, n)| n),
        WireKind::LengthDelimited => {
            let (len, n) = decode_varint(bytes)?;
            let end = (n as u64).checked_add(len).filter(|&e| e <= bytes.len() as u64);
            match end {
                Some(end) => Ok(end as usize),
                None => Err(WireError::TruncatedInput { offset: bytes.len() }),
            }
        }
    }
}

/// Value of one decoded field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldValue<'a> {
    Varint(u64),
    Bytes(&'a [u8]),
}

/// Cursor over a message payload that yields fields in order.
#[derive(Debug, Clone)]
pub struct FieldReader<'a> {
    buf: &'a [u8],
    pos: usize,
    base: usize,
}

impl<'a> FieldReader<'a> {
    /// `base` is the absolute offset of `buf`, used for error positions.
    pub fn new(buf: &'a [u8], base: usize) -> Self {
        FieldReader { buf, pos: 0, base }
    }

    pub fn offset(&self) -> usize {
        self.base + self.pos
    }

    #[inline]
    fn varint(&mut self) -> Result<u64, WireError> {
        if let Some(&b) = self.buf.get(self.pos) {
            if b < 0x80 {
                self.pos += 1;
                return Ok(b as u64);
            }
        }
        let (v, n) = decode_varint(&self.buf[self.pos..]).map_err(|e| e.shifted(self.offset()))?;
        self.pos += n;
        Ok(v)
    }

    /// Reads the next field; `Ok(None)` at end of buffer.
    /// Returns the field number, the value, and the absolute offset of the value.
    #[inline]
    pub fn next_field(&mut self) -> Result<Option<(u32, FieldValue<'a>, usize)>, WireError> {
        if self.pos >= self.buf.len() {
            return Ok(None);
        }
        let at = self.offset();
        let header = FieldHeader::from_key(self.varint()?, at)?;
        let value_at = self.offset();
        let value = match header.kind {
            WireKind::Varint => FieldValue::Varint(self.varint()?),
            WireKind::LengthDelimited => {
                let len = self.varint()?;
                let remaining = (self.buf.len() - self.pos) as u64;
                if len > remaining {
                    return Err(WireError::TruncatedInput { offset: self.base + self.buf.len() });
                }
                let start = self.pos;
                self.pos += len as usize;
                FieldValue::Bytes(&self.buf[start..self.pos])
            }
        };
        Ok(Some((header.field_number, value, value_at)))
    }
}

/// Reads one varint-length-prefixed block from `src`.
///
/// Returns `Ok(None)` on a clean end of stream (no bytes at a block boundary).
/// The reader is consumed byte-exactly: nothing past the block is requested.
pub fn read_delimited_block<R: Read + ?Sized>(src: &mut R) -> io::Result<Option<Vec<u8>>> {
    let mut len = 0u64;
    let mut byte = [0u8; 1];
    for i in 0..=MAX_VARINT_LEN {
        if i == MAX_VARINT_LEN {
            return Err(invalid(WireError::OverlongVarint { offset: 0 }));
        }
        let n = read_some(src, &mut byte)?;
        if n == 0 {
            if i == 0 {
                return Ok(None);
            }
            return Err(invalid(WireError::TruncatedInput { offset: i }));
        }
        len |= ((byte[0] & 0x7F) as u64) << (7 * i);
        if byte[0] & 0x80 == 0 {
            break;
        }
    }
    if len > MAX_BLOCK_LEN {
        return Err(invalid(WireError::LengthOverflow { len, offset: 0 }));
    }
    let mut payload = vec![0u8; len as usize];
    let mut filled = 0;
    while filled < payload.len() {
        let n = read_some(src, &mut payload[filled..])?;
        if n == 0 {
            return Err(invalid(WireError::TruncatedInput { offset: filled }));
        }
        filled += n;
    }
    Ok(Some(payload))
}

fn read_some<R: Read + ?Sized>(src: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    loop {
        match src.read(buf) {
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            r => return r,
        }
    }
}

/// Writes `payload` as one delimited block.
pub fn write_delimited_block<W: Write + ?Sized>(dst: &mut W, payload: &[u8]) -> io::Result<()> {
    let mut len = Vec::with_capacity(5);
    encode_varint(payload.len() as u64, &mut len);
    dst.write_all(&len)?;
    dst.write_all(payload)
}

fn invalid(e: WireError) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, e)
}

/// Extracts a [`WireError`] carried inside an I/O error, if any.
pub fn wire_error_of(err: &io::Error) -> Option<&WireError> {
    err.get_ref().and_then(|e| e.downcast_ref::<WireError>())
}
