//! JSON files for matrices and representation directories.
//!
//! A matrix file is `{"rows": m, "cols": n, "data": [[re, im], ...]}` in
//! row-major order. Entries may also be written as strings (`"NaN"`, `"inf"`)
//! so that non-finite values are reported by index instead of as a syntax
//! error.

use std::fs;
use std::path::{Path, PathBuf};

use opball::pontryagin::{PontryaginSignature, Representation};
use opball::{OperatorMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum Entry {
    Number(f64),
    Text(String),
}

impl Entry {
    fn value(&self) -> Option<f64> {
        match self {
            Entry::Number(x) => Some(*x),
            Entry::Text(s) => s.trim().parse().ok(),
        }
    }
}

#[derive(Debug, Deserialize)]
struct RawMatrixFile {
    rows: usize,
    cols: usize,
    data: Vec<[Entry; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl From<&OperatorMatrix> for MatrixFile {
    fn from(m: &OperatorMatrix) -> Self {
        MatrixFile { rows: m.rows(), cols: m.cols(), data: m.to_row_major().iter().map(|z| [z.re, z.im]).collect() }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn json_error(path: &Path, e: serde_json::Error) -> CliError {
    CliError::Parse(format!("{}: line {} column {}: {e}", path.display(), e.line(), e.column()))
}

pub fn parse_matrix(text: &str, path: &Path) -> Result<OperatorMatrix, CliError> {
    let raw: RawMatrixFile = serde_json::from_str(text).map_err(|e| json_error(path, e))?;
    if raw.rows == 0 || raw.cols == 0 {
        return Err(CliError::Shape(format!("{}: empty {}x{} matrix", path.display(), raw.rows, raw.cols)));
    }
    if raw.data.len() != raw.rows * raw.cols {
        return Err(CliError::Shape(format!(
            "{}: field data has {} entries, expected rows*cols = {}",
            path.display(),
            raw.data.len(),
            raw.rows * raw.cols
        )));
    }
    let mut data = Vec::with_capacity(raw.data.len());
    for (k, [re, im]) in raw.data.iter().enumerate() {
        match (re.value(), im.value()) {
            (Some(re), Some(im)) if re.is_finite() && im.is_finite() => data.push(C64::new(re, im)),
            _ => return Err(CliError::Parse(format!("{}: non-finite entry at index {k}", path.display()))),
        }
    }
    Ok(OperatorMatrix::from_row_slice(raw.rows, raw.cols, &data)?)
}

pub fn load_matrix(path: &Path) -> Result<OperatorMatrix, CliError> {
    parse_matrix(&read(path)?, path)
}

pub fn save_matrix(m: &OperatorMatrix, path: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string(&MatrixFile::from(m)).expect("matrix files serialize");
    write(path, &(text + "\n"))
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct SignatureFile {
    n_plus: usize,
    n_minus: usize,
}

fn elem_path(dir: &Path, k: usize) -> PathBuf {
    dir.join(format!("elem_{k}.json"))
}

/// Signature from `--sig` if given, else from `sig.json` in the directory.
pub fn resolve_signature(dir: &Path, flag: Option<(usize, usize)>) -> Result<PontryaginSignature, CliError> {
    let (p, q) = match flag {
        Some(s) => s,
        None => {
            let path = dir.join("sig.json");
            if !path.exists() {
                return Err(CliError::Config(format!("{}: no sig.json; pass --sig P,Q", dir.display())));
            }
            let s: SignatureFile = serde_json::from_str(&read(&path)?).map_err(|e| json_error(&path, e))?;
            (s.n_plus, s.n_minus)
        }
    };
    Ok(PontryaginSignature::new(p, q)?)
}

/// The multiplication table if `table.json` exists.
pub fn load_table(dir: &Path) -> Result<Option<Vec<Vec<usize>>>, CliError> {
    let path = dir.join("table.json");
    if !path.exists() {
        return Ok(None);
    }
    serde_json::from_str(&read(&path)?).map(Some).map_err(|e| json_error(&path, e))
}

/// `elem_0.json, elem_1.json, ...` up to `count`, or until the first gap.
pub fn load_elements(dir: &Path, count: Option<usize>) -> Result<Vec<OperatorMatrix>, CliError> {
    let mut out = Vec::new();
    loop {
        let k = out.len();
        if count == Some(k) {
            break;
        }
        let path = elem_path(dir, k);
        if count.is_none() && !path.exists() {
            break;
        }
        out.push(load_matrix(&path)?);
    }
    if out.is_empty() {
        return Err(CliError::Io(format!("{}: no elem_0.json", dir.display())));
    }
    Ok(out)
}

pub fn load_representation(dir: &Path, sig: Option<(usize, usize)>) -> Result<Representation, CliError> {
    let sig = resolve_signature(dir, sig)?;
    let table = load_table(dir)?
        .ok_or_else(|| CliError::Io(format!("{}: representation needs table.json", dir.display())))?;
    let images = load_elements(dir, Some(table.len()))?;
    Ok(Representation::new(sig, table, images)?)
}

pub fn save_representation(rep: &Representation, dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let sig = rep.signature();
    let sig = SignatureFile { n_plus: sig.n_plus(), n_minus: sig.n_minus() };
    write(&dir.join("sig.json"), &(serde_json::to_string(&sig).expect("serializes") + "\n"))?;
    write(&dir.join("table.json"), &(serde_json::to_string(rep.table()).expect("serializes") + "\n"))?;
    for (k, m) in rep.images().iter().enumerate() {
        save_matrix(m, &elem_path(dir, k))?;
    }
    Ok(())
}
