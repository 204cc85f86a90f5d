//! The `.imuv` frame container: a fixed 10-byte header plus raw pixels.
//!
//! Layout (little-endian):
//!
//! | offset | size | field                         |
//! |--------|------|-------------------------------|
//! | 0      | 4    | magic `IMUV`                  |
//! | 4      | 1    | version (currently 1)         |
//! | 5      | 2    | width, u16 LE                 |
//! | 7      | 2    | height, u16 LE                |
//! | 9      | 1    | channel count                 |
//! | 10     | …    | row-major interleaved pixels  |

use super::MovieFrame;
use thiserror::Error;

pub const MAGIC: [u8; 4] = *b"IMUV";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 10;

#[derive(Debug, Error, PartialEq)]
pub enum FrameFileError {
    #[error("bad magic: expected IMUV, found {0:02x?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    UnsupportedVersion(u8),
    #[error("truncated frame file: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("frame file has {extra} trailing bytes")]
    TrailingBytes { extra: usize },
}

/// A frame read back from an `.imuv` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedFrame {
    pub width: u16,
    pub height: u16,
    pub channels: u8,
    pub payload: Vec<u8>,
}

/// Serializes a rendered frame into the container format.
pub fn encode_frame(frame: &MovieFrame) -> Vec<u8> {
    let pixels = frame.pixels();
    let mut out = Vec::with_capacity(HEADER_LEN + pixels.data().len());
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&(pixels.width() as u16).to_le_bytes());
    out.extend_from_slice(&(pixels.height() as u16).to_le_bytes());
    out.push(3);
    out.extend_from_slice(pixels.data());
    out
}

/// Parses a container, validating magic, version, and exact payload length.
pub fn decode_frame(bytes: &[u8]) -> Result<DecodedFrame, FrameFileError> {
    if bytes.len() < HEADER_LEN {
        return Err(FrameFileError::Truncated { expected: HEADER_LEN, found: bytes.len() });
    }
    let magic: [u8; 4] = bytes[0..4].try_into().expect("fixed slice");
    if magic != MAGIC {
        return Err(FrameFileError::BadMagic(magic));
    }
    if bytes[4] != VERSION {
        return Err(FrameFileError::UnsupportedVersion(bytes[4]));
    }
    let width = u16::from_le_bytes([bytes[5], bytes[6]]);
    let height = u16::from_le_bytes([bytes[7], bytes[8]]);
    let channels = bytes[9];
    let expected = HEADER_LEN + width as usize * height as usize * channels as usize;
    match bytes.len().cmp(&expected) {
        std::cmp::Ordering::Less => Err(FrameFileError::Truncated { expected, found: bytes.len() }),
        std::cmp::Ordering::Greater => Err(FrameFileError::TrailingBytes { extra: bytes.len() - expected }),
        std::cmp::Ordering::Equal => {
            Ok(DecodedFrame { width, height, channels, payload: bytes[HEADER_LEN..].to_vec() })
        }
    }
}
