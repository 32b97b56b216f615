//! Bit-exact file codecs: binary PGM images and CSV integer matrices.
//!
//! The PGM writer is canonical (`P5\n<w> <h>\n255\n` followed by the raw
//! payload) so identical images always produce identical bytes. The reader
//! additionally tolerates extra whitespace and `#` comment lines in the
//! header, which it never writes back.

use crate::apps::GrayImage;
use crate::error::{Error, Result};
use crate::systolic::IntMatrix;

/// Parses a binary (P5) PGM file with maxval 255.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::PgmBadMagic);
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // Skip whitespace and comment lines between header tokens.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while let Some(&b) = bytes.get(pos) {
                        pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                Some(b) if b.is_ascii_digit() => break,
                Some(&b) => {
                    return Err(Error::PgmHeader(format!(
                        "unexpected byte 0x{b:02x} at offset {pos}"
                    )))
                }
                None => return Err(Error::PgmHeader("header ends early".into())),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        let token = std::str::from_utf8(&bytes[start..pos]).expect("digits are ASCII");
        *field = token
            .parse()
            .map_err(|_| Error::PgmHeader(format!("bad integer {token:?}")))?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(Error::PgmUnsupportedMaxval(maxval as u32));
    }
    if width == 0 || height == 0 {
        return Err(Error::PgmHeader("zero dimension".into()));
    }
    // Exactly one whitespace byte separates the header from the payload.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::PgmHeader("missing separator before payload".into())),
    }
    let expected = width * height;
    let payload = &bytes[pos..];
    if payload.len() < expected {
        return Err(Error::PgmTruncated {
            expected,
            found: payload.len(),
        });
    }
    GrayImage::new(width, height, payload[..expected].to_vec())
}

/// Serializes an image as a canonical binary PGM.
pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

pub fn read_pgm_file(path: &std::path::Path) -> Result<GrayImage> {
    read_pgm(&std::fs::read(path)?)
}

pub fn write_pgm_file(path: &std::path::Path, img: &GrayImage) -> Result<()> {
    Ok(std::fs::write(path, write_pgm(img))?)
}

/// Parses a rectangular matrix of base-10 integers, one row per line,
/// comma-separated.
pub fn read_csv_matrix(text: &str) -> Result<IntMatrix> {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut width = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (j, token) in line.split(',').enumerate() {
            let token = token.trim();
            row.push(token.parse::<i64>().map_err(|_| Error::CsvBadToken {
                row: i,
                col: j,
                token: token.to_string(),
            })?);
        }
        if let Some(w) = width {
            if row.len() != w {
                return Err(Error::CsvRagged {
                    row: i,
                    expected: w,
                    found: row.len(),
                });
            }
        } else {
            width = Some(row.len());
        }
        rows.push(row);
    }
    IntMatrix::from_rows(&rows)
}

/// Serializes a matrix as CSV: rows newline-terminated, values
/// comma-separated, no trailing comma.
pub fn write_csv_matrix(m: &IntMatrix) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if c > 0 {
                out.push(',');
            }
            out.push_str(&m[(r, c)].to_string());
        }
        out.push('\n');
    }
    out
}

pub fn read_csv_matrix_file(path: &std::path::Path) -> Result<IntMatrix> {
    read_csv_matrix(&std::fs::read_to_string(path)?)
}
