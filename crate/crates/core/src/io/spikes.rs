//! Spike-train timestamp files: `#` comment lines, then one timestamp in
//! seconds per line, strictly increasing. Timestamps are written in Rust's
//! shortest round-trip decimal form, so write-then-read is exact.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::simulate::SpikeTrain;

/// Header key naming the oscillator a file belongs to.
const OSC_KEY: &str = "# oscillator ";

pub fn format_spike_train(train: &SpikeTrain, comments: &[String]) -> String {
    let mut out = String::with_capacity(train.len() * 24 + 64);
    let _ = writeln!(out, "{OSC_KEY}{}", train.oscillator_index);
    for c in comments {
        for line in c.lines() {
            let _ = writeln!(out, "# {line}");
        }
    }
    for t in &train.times {
        let _ = writeln!(out, "{t}");
    }
    out
}

/// Parses a timestamp file. The oscillator index comes from the
/// `# oscillator k` header when present, else `default_index`.
pub fn parse_spike_train(src: &str, default_index: usize) -> Result<SpikeTrain> {
    let mut index = default_index;
    let mut times = Vec::new();
    let mut last_line = 0;
    for (n, raw) in src.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some(k) = line.strip_prefix(OSC_KEY.trim_end()).map(str::trim) {
                index = k
                    .parse()
                    .map_err(|_| Error::parse(Some(n + 1), format!("bad oscillator index `{k}`")))?;
            }
            continue;
        }
        let t: f64 = line
            .parse()
            .map_err(|_| Error::parse(Some(n + 1), format!("not a timestamp: `{line}`")))?;
        if !t.is_finite() {
            return Err(Error::parse(Some(n + 1), format!("non-finite timestamp `{line}`")));
        }
        if let Some(&prev) = times.last() {
            if t <= prev {
                return Err(Error::parse(
                    Some(n + 1),
                    format!("timestamp {t} does not exceed previous {prev} (line {last_line})"),
                ));
            }
        }
        times.push(t);
        last_line = n + 1;
    }
    SpikeTrain::new(index, times)
}

pub fn write_spike_train(path: impl AsRef<Path>, train: &SpikeTrain, comments: &[String]) -> Result<()> {
    std::fs::write(path, format_spike_train(train, comments))?;
    Ok(())
}

pub fn read_spike_train(path: impl AsRef<Path>, default_index: usize) -> Result<SpikeTrain> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_spike_train(&src, default_index).map_err(|e| match e {
        Error::Parse { line, msg } => Error::parse(line, format!("{}: {msg}", path.display())),
        other => other,
    })
}
