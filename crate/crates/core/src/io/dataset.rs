//! Training datasets (CSV) and readout weight files (TOML).
//!
//! Dataset columns are `in_0..in_{k-1}`, `feat_0..feat_{m-1}`, `label`, in
//! that order; labels are 0 or 1.

use std::path::Path;

use crate::error::{Error, Result};
use crate::reservoir::{ReadoutNeuron, Sample};

fn csv_err(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize);
    Error::parse(line, e.to_string())
}

pub fn format_dataset(samples: &[Sample]) -> Result<String> {
    let Some(first) = samples.first() else {
        return Err(Error::InsufficientData("empty dataset".into()));
    };
    let (k, m) = (first.inputs.len(), first.features.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (0..k).map(|i| format!("in_{i}")).collect();
    header.extend((0..m).map(|i| format!("feat_{i}")));
    header.push("label".into());
    w.write_record(&header).map_err(csv_err)?;
    for s in samples {
        if s.inputs.len() != k || s.features.len() != m {
            return Err(Error::ArityMismatch {
                expected: k + m,
                got: s.inputs.len() + s.features.len(),
            });
        }
        let mut rec: Vec<String> = s.inputs.iter().chain(&s.features).map(f64::to_string).collect();
        rec.push(s.label.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn parse_dataset(src: &str) -> Result<Vec<Sample>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(src.as_bytes());
    let header = r.headers().map_err(csv_err)?.clone();
    let mut n_in = 0;
    let mut n_feat = 0;
    for (col, name) in header.iter().enumerate() {
        let expect_in = format!("in_{n_in}");
        let expect_feat = format!("feat_{n_feat}");
        if name == expect_in && n_feat == 0 {
            n_in += 1;
        } else if name == expect_feat {
            n_feat += 1;
        } else if name == "label" && col + 1 == header.len() {
        } else {
            return Err(Error::parse(
                Some(1),
                format!("unexpected column `{name}`; expected in_*, feat_*, label"),
            ));
        }
    }
    if header.iter().next_back() != Some("label") {
        return Err(Error::parse(Some(1), "last column must be `label`"));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line() as usize);
        let num = |k: usize| -> Result<f64> {
            rec[k]
                .parse()
                .map_err(|_| Error::parse(line, format!("bad number `{}`", &rec[k])))
        };
        let inputs = (0..n_in).map(num).collect::<Result<Vec<_>>>()?;
        let features = (n_in..n_in + n_feat).map(num).collect::<Result<Vec<_>>>()?;
        let label = match &rec[n_in + n_feat] {
            "0" => 0,
            "1" => 1,
            other => return Err(Error::parse(line, format!("label must be 0 or 1, got `{other}`"))),
        };
        out.push(Sample {
            inputs,
            features,
            label,
        });
    }
    Ok(out)
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<Vec<Sample>> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_dataset(&src)
}

/// A weights file: the readout's fields at top level.
pub fn format_weights(neuron: &ReadoutNeuron, comments: &[String]) -> Result<String> {
    let mut s: String = comments.iter().map(|c| format!("# {c}\n")).collect();
    s.push_str(&toml::to_string(neuron).map_err(|e| Error::Io(e.to_string()))?);
    Ok(s)
}

pub fn parse_weights(src: &str) -> Result<ReadoutNeuron> {
    toml::from_str(src).map_err(|e| {
        let line = e.span().map(|s| src[..s.start].matches('\n').count() + 1);
        Error::parse(line, e.message().trim())
    })
}
