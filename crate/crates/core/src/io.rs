//! State file reading and writing.
//!
//! Two formats: a JSON object `{"eigenvalues": [...], "amplitudes":
//! [[re, im], ...]}` and a CSV table with columns `lambda,re,im`. The
//! extension picks the parser; anything that is not `.csv` is treated as
//! JSON.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::SpectralState;

#[derive(Serialize, Deserialize)]
struct StateFile {
    eigenvalues: Vec<f64>,
    amplitudes: Vec<[f64; 2]>,
}

pub fn load_state(path: &Path) -> Result<SpectralState> {
    let file = File::open(path)?;
    let mut reader = BufReader::new(file);
    if path.extension().and_then(|e| e.to_str()) == Some("csv") {
        state_from_csv(&mut reader)
    } else {
        state_from_json(&mut reader)
    }
}

pub fn state_from_json<R: Read>(reader: &mut R) -> Result<SpectralState> {
    let parsed: StateFile =
        serde_json::from_reader(reader).map_err(|e| Error::MalformedState(e.to_string()))?;
    let amplitudes = parsed
        .amplitudes
        .iter()
        .map(|&[re, im]| Complex64::new(re, im))
        .collect();
    SpectralState::new(parsed.eigenvalues, amplitudes)
}

pub fn state_from_csv<R: Read>(reader: &mut R) -> Result<SpectralState> {
    let mut csv_reader = csv::Reader::from_reader(reader);
    {
        let headers = csv_reader
            .headers()
            .map_err(|e| Error::MalformedState(e.to_string()))?;
        let expected = ["lambda", "re", "im"];
        if headers.len() != 3 || headers.iter().zip(expected).any(|(h, e)| h.trim() != e) {
            return Err(Error::MalformedState(format!(
                "expected header lambda,re,im, got {headers:?}"
            )));
        }
    }
    let mut eigenvalues = Vec::new();
    let mut amplitudes = Vec::new();
    for record in csv_reader.records() {
        let record = record.map_err(|e| Error::MalformedState(e.to_string()))?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .ok_or_else(|| Error::MalformedState("short row".into()))?
                .trim()
                .parse::<f64>()
                .map_err(|e| Error::MalformedState(e.to_string()))
        };
        eigenvalues.push(field(0)?);
        amplitudes.push(Complex64::new(field(1)?, field(2)?));
    }
    SpectralState::new(eigenvalues, amplitudes)
}

pub fn write_state_json<W: Write>(state: &SpectralState, writer: &mut W) -> Result<()> {
    let file = StateFile {
        eigenvalues: state.eigenvalues().to_vec(),
        amplitudes: state.amplitudes().iter().map(|a| [a.re, a.im]).collect(),
    };
    serde_json::to_writer_pretty(&mut *writer, &file)
        .map_err(|e| Error::MalformedState(e.to_string()))?;
    writer.write_all(b"\n")?;
    Ok(())
}

pub fn save_state(state: &SpectralState, path: &Path) -> Result<()> {
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    write_state_json(state, &mut writer)
}
