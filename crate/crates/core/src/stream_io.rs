//! Stream serialization.
//!
//! Two interchangeable on-disk forms:
//!
//! * **text**: one stream per line, ASCII `0`/`1`, newline-terminated;
//! * **packed**: per stream, a `SNB1 <len>\n` header followed by
//!   `ceil(len / 8)` payload bytes, first stream bit in the most
//!   significant bit of the first byte, padding bits zero.
//!
//! Both readers report the byte offset at which parsing failed. Readers
//! accept any number of concatenated streams.

use crate::bitstream::BitStream;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StreamFormat {
    Text,
    Packed,
}

impl std::str::FromStr for StreamFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "text" => Ok(StreamFormat::Text),
            "packed" => Ok(StreamFormat::Packed),
            other => Err(format!(
                "unknown stream format {other:?} (expected text or packed)"
            )),
        }
    }
}

pub fn streams_to_text(streams: &[BitStream]) -> String {
    let total: usize = streams.iter().map(|s| s.len() + 1).sum();
    let mut out = String::with_capacity(total);
    for s in streams {
        for bit in s.iter() {
            out.push(if bit { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

pub fn streams_from_text(data: &[u8]) -> Result<Vec<BitStream>> {
    let mut streams = Vec::new();
    let mut line_start = 0;
    let mut bits = Vec::new();
    for (offset, &byte) in data.iter().enumerate() {
        match byte {
            b'0' => bits.push(false),
            b'1' => bits.push(true),
            b'\n' => {
                if bits.is_empty() {
                    return Err(Error::MalformedStream {
                        offset: line_start,
                        reason: "empty line",
                    });
                }
                streams.push(BitStream::from_bits(&bits)?);
                bits.clear();
                line_start = offset + 1;
            }
            _ => {
                return Err(Error::MalformedStream {
                    offset,
                    reason: "expected '0', '1', or newline",
                })
            }
        }
    }
    if !bits.is_empty() {
        // Data ended mid-line; the terminating newline is part of the format.
        return Err(Error::TruncatedStream { offset: data.len() });
    }
    Ok(streams)
}

pub fn streams_to_packed(streams: &[BitStream]) -> Vec<u8> {
    let mut out = Vec::new();
    for s in streams {
        out.extend_from_slice(b"SNB1 ");
        out.extend_from_slice(s.len().to_string().as_bytes());
        out.push(b'\n');
        let mut byte = 0u8;
        for (i, bit) in s.iter().enumerate() {
            if bit {
                byte |= 0x80 >> (i % 8);
            }
            if i % 8 == 7 {
                out.push(byte);
                byte = 0;
            }
        }
        if s.len() % 8 != 0 {
            out.push(byte);
        }
    }
    out
}

pub fn streams_from_packed(data: &[u8]) -> Result<Vec<BitStream>> {
    let mut streams = Vec::new();
    let mut pos = 0;
    while pos < data.len() {
        let block_start = pos;
        if data.len() - pos < 5 {
            return Err(Error::TruncatedStream { offset: data.len() });
        }
        if &data[pos..pos + 5] != b"SNB1 " {
            return Err(Error::MalformedStream {
                offset: block_start,
                reason: "expected \"SNB1 \" magic",
            });
        }
        pos += 5;
        let len_start = pos;
        while pos < data.len() && data[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == len_start {
            return Err(Error::MalformedStream {
                offset: pos,
                reason: "expected decimal stream length",
            });
        }
        if pos == data.len() {
            return Err(Error::TruncatedStream { offset: data.len() });
        }
        if data[pos] != b'\n' {
            return Err(Error::MalformedStream {
                offset: pos,
                reason: "expected newline after stream length",
            });
        }
        let len: usize = std::str::from_utf8(&data[len_start..pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::MalformedStream {
                offset: len_start,
                reason: "stream length does not fit in usize",
            })?;
        if len == 0 {
            return Err(Error::MalformedStream {
                offset: len_start,
                reason: "zero-length stream",
            });
        }
        pos += 1;
        let payload = len.div_ceil(8);
        if data.len() - pos < payload {
            return Err(Error::TruncatedStream { offset: data.len() });
        }
        let bytes = &data[pos..pos + payload];
        if !len.is_multiple_of(8) {
            let pad_mask = (1u8 << (8 - len % 8)) - 1;
            if bytes[payload - 1] & pad_mask != 0 {
                return Err(Error::MalformedStream {
                    offset: pos + payload - 1,
                    reason: "padding bits must be zero",
                });
            }
        }
        streams.push(BitStream::from_fn(len, |i| {
            bytes[i / 8] & (0x80 >> (i % 8)) != 0
        })?);
        pos += payload;
    }
    Ok(streams)
}

pub fn streams_to_bytes(streams: &[BitStream], format: StreamFormat) -> Vec<u8> {
    match format {
        StreamFormat::Text => streams_to_text(streams).into_bytes(),
        StreamFormat::Packed => streams_to_packed(streams),
    }
}

/// Parses either format, recognizing packed data by its magic.
pub fn streams_from_bytes(data: &[u8]) -> Result<Vec<BitStream>> {
    if data.starts_with(b"SNB1 ") {
        streams_from_packed(data)
    } else {
        streams_from_text(data)
    }
}

pub fn read_streams(path: impl AsRef<std::path::Path>) -> Result<Vec<BitStream>> {
    streams_from_bytes(&std::fs::read(path)?)
}

pub fn write_streams(
    path: impl AsRef<std::path::Path>,
    streams: &[BitStream],
    format: StreamFormat,
) -> Result<()> {
    std::fs::write(path, streams_to_bytes(streams, format))?;
    Ok(())
}
