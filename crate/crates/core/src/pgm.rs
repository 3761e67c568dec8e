//! PGM reading (binary P5 and ASCII P2) and writing (P5).

use thiserror::Error;

use crate::image::Image;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PgmError {
    #[error("bad magic number {0:?}, expected P5 or P2")]
    BadMagic(String),
    #[error("header ended before the {0} field")]
    MissingField(&'static str),
    #[error("invalid {field} value {text:?}")]
    InvalidNumber { field: &'static str, text: String },
    #[error("{field} must be positive")]
    ZeroField { field: &'static str },
    #[error("maxval {0} exceeds 255; only 8-bit PGM is supported")]
    MaxvalTooLarge(u32),
    #[error("missing whitespace after maxval")]
    MissingSeparator,
    #[error("truncated pixel data: expected {expected} samples, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("sample {value} at index {index} exceeds maxval {maxval}")]
    SampleOutOfRange { index: usize, value: u32, maxval: u32 },
}

struct Header {
    ascii: bool,
    width: usize,
    height: usize,
    maxval: u32,
    payload_start: usize,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self, field: &'static str) -> Result<&'a [u8], PgmError> {
        self.skip_ws_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(PgmError::MissingField(field));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn number(&mut self, field: &'static str) -> Result<u32, PgmError> {
        let tok = self.token(field)?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| PgmError::InvalidNumber {
                field,
                text: String::from_utf8_lossy(tok).into_owned(),
            })
    }
}

fn parse_header(bytes: &[u8]) -> Result<Header, PgmError> {
    let mut cur = Cursor { bytes, pos: 0 };
    let magic = cur.token("magic").map_err(|_| PgmError::BadMagic(String::new()))?;
    let ascii = match magic {
        b"P5" => false,
        b"P2" => true,
        other => return Err(PgmError::BadMagic(String::from_utf8_lossy(other).into_owned())),
    };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 {
        return Err(PgmError::ZeroField { field: "width" });
    }
    if height == 0 {
        return Err(PgmError::ZeroField { field: "height" });
    }
    if maxval == 0 {
        return Err(PgmError::ZeroField { field: "maxval" });
    }
    if maxval > 255 {
        return Err(PgmError::MaxvalTooLarge(maxval));
    }
    // Exactly one whitespace byte separates the header from a binary payload.
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => {}
        _ if ascii && cur.pos == bytes.len() => {}
        _ => return Err(PgmError::MissingSeparator),
    }
    Ok(Header {
        ascii,
        width: width as usize,
        height: height as usize,
        maxval,
        payload_start: cur.pos + 1,
    })
}

/// Parses a P5 or P2 file into an 8-bit image.
pub fn load_pgm(bytes: &[u8]) -> Result<Image<u8>, PgmError> {
    let header = parse_header(bytes)?;
    let expected = header.width * header.height;
    let payload = bytes.get(header.payload_start..).unwrap_or(&[]);

    let pixels = if header.ascii {
        let mut cur = Cursor { bytes: payload, pos: 0 };
        let mut pixels = Vec::with_capacity(expected);
        for index in 0..expected {
            let value = match cur.number("sample") {
                Ok(v) => v,
                Err(PgmError::MissingField(_)) => return Err(PgmError::Truncated { expected, found: index }),
                Err(e) => return Err(e),
            };
            if value > header.maxval {
                return Err(PgmError::SampleOutOfRange {
                    index,
                    value,
                    maxval: header.maxval,
                });
            }
            pixels.push(value as u8);
        }
        pixels
    } else {
        if payload.len() < expected {
            return Err(PgmError::Truncated {
                expected,
                found: payload.len(),
            });
        }
        let pixels = payload[..expected].to_vec();
        if let Some((index, &v)) = pixels.iter().enumerate().find(|(_, &v)| u32::from(v) > header.maxval) {
            return Err(PgmError::SampleOutOfRange {
                index,
                value: v.into(),
                maxval: header.maxval,
            });
        }
        pixels
    };

    Ok(Image::from_vec(header.width, header.height, pixels).expect("header extents were validated"))
}

/// Serializes an image as binary P5 with maxval 255.
pub fn store_pgm(img: &Image<u8>) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.pixels());
    out
}
