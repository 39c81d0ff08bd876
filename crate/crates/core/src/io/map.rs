//! Arnold-map renderings: a CSV table and an 8-bit grayscale PGM image.
//!
//! CSV rows follow the map order (`y` outer, `x` inner); `x_value` and
//! `y_value` are SI. `error_flag` is 0 for a computed cell and the error
//! category code for a failed one.
//!
//! PGM: one pixel per cell, `x` left to right, `y` bottom to top (row 0 of
//! the image is the largest `y`). Gray level 0 marks unsynchronized or failed
//! cells; a synchronized cell with SHR `s` gets
//! `1 + round(254 * (log2(clamp(s, 1/8, 8)) + 3) / 6)`, so 1/8 → 1, 1 → 128
//! and 8 → 255.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sweep::{ArnoldMap, CellOutcome};

pub const SHR_SCALE_MIN: f64 = 1.0 / 8.0;
pub const SHR_SCALE_MAX: f64 = 8.0;

pub const PGM_SCALE_DOC: &str =
    "gray 0 = unsynchronized or failed; synchronized: gray = 1 + round(254 * (log2(clamp(shr, 1/8, 8)) + 3) / 6)";

/// One CSV row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapRow {
    pub x_value: f64,
    pub y_value: f64,
    pub m_i: u64,
    pub m_j: u64,
    pub shr_value: f64,
    pub mu_percent: f64,
    pub synchronized: bool,
    pub error_flag: i32,
}

pub fn map_rows(map: &ArnoldMap) -> Vec<MapRow> {
    map.cells
        .iter()
        .map(|c| match &c.outcome {
            CellOutcome::Metrics(m) => MapRow {
                x_value: c.x_value,
                y_value: c.y_value,
                m_i: m.m_i,
                m_j: m.m_j,
                shr_value: m.shr_value,
                mu_percent: m.mu,
                synchronized: m.synchronized,
                error_flag: 0,
            },
            CellOutcome::Failed { code, .. } => MapRow {
                x_value: c.x_value,
                y_value: c.y_value,
                m_i: 0,
                m_j: 0,
                shr_value: 0.0,
                mu_percent: 0.0,
                synchronized: false,
                error_flag: *code,
            },
        })
        .collect()
}

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize);
    Error::parse(line, e.to_string())
}

pub fn format_map_csv(rows: &[MapRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn parse_map_csv(src: &str) -> Result<Vec<MapRow>> {
    csv::Reader::from_reader(src.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<MapRow>, _>>()
        .map_err(csv_err)
}

/// Gray level of a cell under the documented scale.
pub fn gray_level(shr_value: f64, synchronized: bool) -> u8 {
    if !synchronized || !(shr_value > 0.0) {
        return 0;
    }
    let s = shr_value.clamp(SHR_SCALE_MIN, SHR_SCALE_MAX);
    let u = (s.log2() + 3.0) / 6.0;
    1 + (254.0 * u).round() as u8
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub comments: Vec<String>,
    /// Row-major, top row first.
    pub pixels: Vec<u8>,
}

impl Pgm {
    pub fn from_map(map: &ArnoldMap) -> Self {
        let (w, h) = map.steps();
        let rows = map_rows(map);
        let mut pixels = Vec::with_capacity(w * h);
        for iy in (0..h).rev() {
            for ix in 0..w {
                let r = &rows[iy * w + ix];
                pixels.push(gray_level(r.shr_value, r.synchronized));
            }
        }
        Self {
            width: w,
            height: h,
            comments: vec![
                PGM_SCALE_DOC.to_string(),
                "x left to right, y bottom to top".to_string(),
            ],
            pixels,
        }
    }

    /// Pixel of map cell `(ix, iy)`.
    pub fn at_cell(&self, ix: usize, iy: usize) -> u8 {
        self.pixels[(self.height - 1 - iy) * self.width + ix]
    }

    fn header(&self, magic: &str) -> String {
        let mut s = format!("{magic}\n");
        for c in &self.comments {
            let _ = writeln!(s, "# {c}");
        }
        let _ = write!(s, "{} {}\n255\n", self.width, self.height);
        s
    }

    /// Plain (ASCII, `P2`) encoding, one image row per line.
    pub fn to_plain(&self) -> String {
        let mut s = self.header("P2");
        for row in self.pixels.chunks(self.width.max(1)) {
            let line: Vec<String> = row.iter().map(u8::to_string).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    /// Raw (binary, `P5`) encoding.
    pub fn to_raw(&self) -> Vec<u8> {
        let mut v = self.header("P5").into_bytes();
        v.extend_from_slice(&self.pixels);
        v
    }

    /// Parses `P2` or `P5` with maxval 255.
    pub fn parse(bytes: &[u8]) -> Result<Self> {
        let mut pos = 0;
        let mut comments = Vec::new();
        let mut line = 1;
        // header tokens: magic, width, height, maxval
        let mut tokens: Vec<String> = Vec::new();
        while tokens.len() < 4 {
            if pos >= bytes.len() {
                return Err(Error::parse(Some(line), "truncated PGM header"));
            }
            match bytes[pos] {
                b'#' => {
                    let end = bytes[pos..].iter().position(|&b| b == b'\n').map_or(bytes.len(), |k| pos + k);
                    let text = String::from_utf8_lossy(&bytes[pos + 1..end]);
                    comments.push(text.strip_prefix(' ').unwrap_or(&text).to_string());
                    pos = end;
                }
                b'\n' => {
                    line += 1;
                    pos += 1;
                }
                b if b.is_ascii_whitespace() => pos += 1,
                _ => {
                    let end = bytes[pos..]
                        .iter()
                        .position(|b| b.is_ascii_whitespace())
                        .map_or(bytes.len(), |k| pos + k);
                    tokens.push(String::from_utf8_lossy(&bytes[pos..end]).into_owned());
                    pos = end;
                }
            }
        }
        let num = |k: usize| -> Result<usize> {
            tokens[k]
                .parse()
                .map_err(|_| Error::parse(Some(line), format!("bad PGM header field `{}`", tokens[k])))
        };
        let (width, height, maxval) = (num(1)?, num(2)?, num(3)?);
        if maxval != 255 {
            return Err(Error::parse(Some(line), format!("unsupported maxval {maxval}")));
        }
        let n = width * height;
        let pixels = match tokens[0].as_str() {
            "P5" => {
                // exactly one whitespace byte separates maxval from the raster
                let body = bytes.get(pos + 1..).unwrap_or(&[]);
                if body.len() != n {
                    return Err(Error::parse(None, format!("expected {n} raster bytes, found {}", body.len())));
                }
                body.to_vec()
            }
            "P2" => {
                let text = std::str::from_utf8(&bytes[pos..]).map_err(|e| Error::parse(None, e.to_string()))?;
                let mut px = Vec::with_capacity(n);
                for (k, l) in text.lines().enumerate() {
                    for tok in l.split_whitespace() {
                        let v: u8 = tok
                            .parse()
                            .map_err(|_| Error::parse(Some(line + k), format!("bad gray level `{tok}`")))?;
                        px.push(v);
                    }
                }
                if px.len() != n {
                    return Err(Error::parse(None, format!("expected {n} gray levels, found {}", px.len())));
                }
                px
            }
            m => return Err(Error::parse(Some(1), format!("unsupported PGM magic `{m}`"))),
        };
        Ok(Self {
            width,
            height,
            comments,
            pixels,
        })
    }
}

pub fn write_map_csv(path: impl AsRef<Path>, map: &ArnoldMap) -> Result<()> {
    std::fs::write(path, format_map_csv(&map_rows(map))?)?;
    Ok(())
}

pub fn write_map_pgm(path: impl AsRef<Path>, map: &ArnoldMap) -> Result<()> {
    std::fs::write(path, Pgm::from_map(map).to_plain())?;
    Ok(())
}
