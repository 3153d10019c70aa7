//! File formats: phase images, masks, renders and energy traces.
//!
//! Phase file layout: the ASCII header `S1PHASE <rows> <cols>\n` followed by
//! `rows·cols` little-endian `f64` values in row-major order, each in
//! `[-π, π)`.
//!
//! Masks are binary PGM (`P5`, maxval 255) with 0 for unknown and 255 for
//! known pixels. Renders are binary PGM (gray) or PPM (hue wheel).
//!
//! All writers go through a temporary file in the target directory that is
//! renamed into place.

use std::f64::consts::{PI, TAU};
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::circle::is_canonical;
use crate::error::{Error, Result};
use crate::image::{Mask, PhaseImage};

pub const PHASE_MAGIC: &str = "S1PHASE";

/// Serializes an image into the phase file format.
pub fn encode_phase(x: &PhaseImage) -> Vec<u8> {
    let header = format!("{PHASE_MAGIC} {} {}\n", x.rows(), x.cols());
    let mut out = Vec::with_capacity(header.len() + 8 * x.len());
    out.extend_from_slice(header.as_bytes());
    for v in x.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn parse_dim(token: &str, offset: usize, what: &str) -> Result<usize> {
    let ok = !token.is_empty() && token.bytes().all(|b| b.is_ascii_digit()) && !(token.len() > 1 && token.starts_with('0'));
    match token.parse::<usize>() {
        Ok(n) if ok && n > 0 => Ok(n),
        _ => Err(Error::format(offset, format!("invalid {what} {token:?}"))),
    }
}

/// Parses the phase file format. Values outside `[-π, π)` are rejected.
pub fn decode_phase(bytes: &[u8]) -> Result<PhaseImage> {
    let newline = bytes
        .iter()
        .take(64)
        .position(|b| *b == b'\n')
        .ok_or_else(|| Error::format(0, "missing header line"))?;
    let header = std::str::from_utf8(&bytes[..newline])
        .map_err(|_| Error::format(0, "header is not ASCII"))?;
    let mut parts = header.split(' ');
    if parts.next() != Some(PHASE_MAGIC) {
        return Err(Error::format(0, format!("expected magic {PHASE_MAGIC:?}")));
    }
    let rows_tok = parts.next().unwrap_or("");
    let cols_tok = parts.next().unwrap_or("");
    let rows_at = PHASE_MAGIC.len() + 1;
    let rows = parse_dim(rows_tok, rows_at, "row count")?;
    let cols = parse_dim(cols_tok, rows_at + rows_tok.len() + 1, "column count")?;
    if parts.next().is_some() {
        return Err(Error::format(newline, "trailing header fields"));
    }

    let payload = &bytes[newline + 1..];
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::format(rows_at, "dimensions overflow"))?;
    if payload.len() < expected {
        return Err(Error::format(
            bytes.len(),
            format!("truncated payload: {} of {expected} bytes", payload.len()),
        ));
    }
    if payload.len() > expected {
        return Err(Error::format(
            newline + 1 + expected,
            format!("{} trailing bytes after payload", payload.len() - expected),
        ));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, chunk) in payload.chunks_exact(8).enumerate() {
        let v = f64::from_le_bytes(chunk.try_into().expect("chunk of 8"));
        if !is_canonical(v) {
            return Err(Error::OutOfRange {
                row: i / cols,
                col: i % cols,
                value: v,
            });
        }
        data.push(v);
    }
    PhaseImage::new(rows, cols, data)
}

pub fn read_phase(path: impl AsRef<Path>) -> Result<PhaseImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_phase(&bytes)
}

pub fn write_phase(path: impl AsRef<Path>, x: &PhaseImage) -> Result<()> {
    write_atomic(path.as_ref(), &encode_phase(x))
}

/// Writes `bytes` to a temporary sibling of `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

/// A parsed binary PNM header: magic, width, height, maxval and payload offset.
struct PnmHeader {
    width: usize,
    height: usize,
    maxval: usize,
    data_start: usize,
}

fn parse_pnm_header(bytes: &[u8], magic: &[u8; 2]) -> Result<PnmHeader> {
    if bytes.len() < 2 || &bytes[..2] != magic {
        return Err(Error::format(0, format!("expected magic {:?}", std::str::from_utf8(magic).unwrap_or("?"))));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for (k, field) in fields.iter_mut().enumerate() {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|b| *b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        let name = ["width", "height", "maxval"][k];
        if start == pos {
            return Err(Error::format(start, format!("expected {name}")));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        *field = text
            .parse()
            .map_err(|_| Error::format(start, format!("invalid {name} {text:?}")))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::format(pos, "expected whitespace after header")),
    }
    Ok(PnmHeader {
        width: fields[0],
        height: fields[1],
        maxval: fields[2],
        data_start: pos,
    })
}

/// Parses a mask from a binary PGM: 0 is unknown, 255 is known.
pub fn decode_mask(bytes: &[u8]) -> Result<Mask> {
    let h = parse_pnm_header(bytes, b"P5")?;
    if h.maxval != 255 {
        return Err(Error::format(h.data_start - 1, format!("mask maxval must be 255, got {}", h.maxval)));
    }
    if h.width == 0 || h.height == 0 {
        return Err(Error::format(2, "mask has zero extent"));
    }
    let n = h.width * h.height;
    let payload = &bytes[h.data_start..];
    if payload.len() < n {
        return Err(Error::format(bytes.len(), format!("truncated mask: {} of {n} bytes", payload.len())));
    }
    if payload.len() > n {
        return Err(Error::format(h.data_start + n, "trailing bytes after mask"));
    }
    let mut known = Vec::with_capacity(n);
    for (i, &b) in payload.iter().enumerate() {
        match b {
            0 => known.push(false),
            255 => known.push(true),
            other => {
                return Err(Error::format(
                    h.data_start + i,
                    format!("mask value {other} at pixel ({}, {}) is neither 0 nor 255", i / h.width, i % h.width),
                ))
            }
        }
    }
    Mask::new(h.height, h.width, known)
}

pub fn encode_mask(mask: &Mask) -> Vec<u8> {
    let pixels: Vec<u8> = mask.as_slice().iter().map(|k| if *k { 255 } else { 0 }).collect();
    encode_pnm(b"P5", mask.rows(), mask.cols(), &pixels)
}

pub fn read_mask(path: impl AsRef<Path>) -> Result<Mask> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_mask(&bytes)
}

pub fn write_mask(path: impl AsRef<Path>, mask: &Mask) -> Result<()> {
    write_atomic(path.as_ref(), &encode_mask(mask))
}

fn encode_pnm(magic: &[u8; 2], rows: usize, cols: usize, pixels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(pixels.len() + 20);
    out.extend_from_slice(magic);
    out.extend_from_slice(format!("\n{cols} {rows}\n255\n").as_bytes());
    out.extend_from_slice(pixels);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderStyle {
    /// `[-π, π)` mapped affinely onto 0..=255, binary PGM.
    Gray,
    /// Angle as hue at full saturation and value, binary PPM.
    Hue,
}

fn gray_level(v: f64) -> u8 {
    ((v + PI) / TAU * 256.0).floor().clamp(0.0, 255.0) as u8
}

fn hue_rgb(v: f64) -> [u8; 3] {
    let h = ((v + PI) / TAU).clamp(0.0, 1.0) * 6.0;
    let sector = (h.floor() as usize).min(5);
    let f = h - sector as f64;
    let (r, g, b) = match sector {
        0 => (1.0, f, 0.0),
        1 => (1.0 - f, 1.0, 0.0),
        2 => (0.0, 1.0, f),
        3 => (0.0, 1.0 - f, 1.0),
        4 => (f, 0.0, 1.0),
        _ => (1.0, 0.0, 1.0 - f),
    };
    let q = |c: f64| (c * 255.0).round() as u8;
    [q(r), q(g), q(b)]
}

/// Encodes `x` as a PGM (gray) or PPM (hue) image.
pub fn render(x: &PhaseImage, style: RenderStyle) -> Vec<u8> {
    match style {
        RenderStyle::Gray => {
            let pixels: Vec<u8> = x.as_slice().iter().map(|v| gray_level(*v)).collect();
            encode_pnm(b"P5", x.rows(), x.cols(), &pixels)
        }
        RenderStyle::Hue => {
            let pixels: Vec<u8> = x.as_slice().iter().flat_map(|v| hue_rgb(*v)).collect();
            encode_pnm(b"P6", x.rows(), x.cols(), &pixels)
        }
    }
}

pub fn write_render(path: impl AsRef<Path>, x: &PhaseImage, style: RenderStyle) -> Result<()> {
    write_atomic(path.as_ref(), &render(x, style))
}

/// `sweep,energy` CSV with a header row.
pub fn encode_trace(trace: &[(usize, f64)]) -> String {
    let mut out = String::from("sweep,energy\n");
    for (sweep, energy) in trace {
        out.push_str(&format!("{sweep},{energy:e}\n"));
    }
    out
}

pub fn write_trace(path: impl AsRef<Path>, trace: &[(usize, f64)]) -> Result<()> {
    write_atomic(path.as_ref(), encode_trace(trace).as_bytes())
}
