//! In-memory artifact set, committed in one go with temp file + rename.

use crate::error::CliError;
use dirac_moire::arrayio::FlatArray;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Long-format CSV built row by row. Floats use the shortest round-trip
/// representation, so identical inputs give identical bytes.
#[derive(Clone, Debug)]
pub struct Csv {
    text: String,
    width: usize,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Self {
            text: format!("{}\n", header.join(",")),
            width: header.len(),
        }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        assert_eq!(cells.len(), self.width, "CSV row width");
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            match c {
                Cell::F(v) => write_float(&mut self.text, *v),
                Cell::I(v) => write!(self.text, "{v}").unwrap(),
                Cell::S(v) => self.text.push_str(v),
            }
        }
        self.text.push('\n');
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.text.into_bytes()
    }
}

/// Shortest round-trip form, in exponent notation away from unit scale.
fn write_float(out: &mut String, v: f64) {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        write!(out, "{v}").unwrap();
    } else {
        write!(out, "{v:e}").unwrap();
    }
}

pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::I(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::S(v.to_string())
    }
}

#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { &[$($crate::artifacts::Cell::from($x)),*] };
}

#[derive(Clone, Debug, Serialize)]
pub struct ArtifactEntry {
    pub name: String,
    pub kind: &'static str,
    pub bytes: usize,
}

#[derive(Default)]
pub struct Artifacts {
    files: Vec<(String, &'static str, Vec<u8>)>,
}

impl Artifacts {
    pub fn csv(&mut self, name: &str, csv: Csv) {
        self.files.push((name.to_string(), "csv", csv.into_bytes()));
    }

    pub fn raw(&mut self, name: &str, kind: &'static str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), kind, bytes));
    }

    pub fn array(&mut self, name: &str, a: &FlatArray) {
        self.files.push((name.to_string(), "dmar", a.to_bytes()));
    }

    pub fn entries(&self) -> Vec<ArtifactEntry> {
        self.files
            .iter()
            .map(|(n, k, b)| ArtifactEntry {
                name: n.clone(),
                kind: k,
                bytes: b.len(),
            })
            .collect()
    }

    /// Writes every file and then `manifest`, each via a temp file renamed
    /// into place.
    pub fn commit(self, dir: &Path, manifest: &[u8]) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let mut written = vec![];
        for (name, _, bytes) in self.files.iter().map(|(n, k, b)| (n.as_str(), k, b.as_slice())).chain(std::iter::once((
            "manifest.json",
            &"json",
            manifest,
        ))) {
            let dest = dir.join(name);
            write_atomic(&dest, bytes)?;
            written.push(dest);
        }
        Ok(written)
    }
}

pub fn write_atomic(dest: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = dest.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    std::io::Write::write_all(&mut tmp, bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(dest).map_err(|e| CliError::Io(format!("{}: {}", dest.display(), e.error)))?;
    Ok(())
}
