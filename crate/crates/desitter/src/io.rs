//! Output files: CSV tables, whitespace-separated `.dat` twins for plotting,
//! and a `manifest.json` listing every file with its SHA-256.
//!
//! Every file is written to a temporary name in the target directory and
//! renamed into place, so a reader never sees a partial file.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// Write `bytes` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::validation(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(Error::io(path, e));
    }
    Ok(())
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// A table cell: numbers print in shortest round-trip form.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Num(v) => write!(f, "{v:?}"),
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Comma-separated, header row, LF line endings. Text cells must not
    /// contain commas or line breaks.
    pub fn to_csv(&self) -> String {
        self.render(",", "")
    }

    /// Whitespace-separated with a `#` header line.
    pub fn to_dat(&self) -> String {
        self.render(" ", "# ")
    }

    fn render(&self, sep: &str, comment: &str) -> String {
        let mut out = String::new();
        out.push_str(comment);
        out.push_str(&self.header.join(sep));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            out.push_str(&cells.join(sep));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Collects the files of one run.
#[derive(Debug)]
pub struct OutputSet {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputSet {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.dir.join(name);
        write_atomic(&path, bytes)?;
        self.files.retain(|f| f.name != name);
        self.files.push(FileEntry { name: name.to_string(), sha256: sha256_hex(bytes), bytes: bytes.len() });
        Ok(path)
    }

    /// `stem.csv` and `stem.dat`.
    pub fn write_table(&mut self, stem: &str, table: &Table) -> Result<PathBuf> {
        self.write(&format!("{stem}.dat"), table.to_dat().as_bytes())?;
        self.write(&format!("{stem}.csv"), table.to_csv().as_bytes())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.write(name, s.as_bytes())
    }

    /// Write `manifest.json` listing every file written so far.
    pub fn finish<T: Serialize>(self, header: &T) -> Result<PathBuf> {
        let mut doc = serde_json::to_value(header)?;
        let files = serde_json::to_value(&self.files)?;
        match doc.as_object_mut() {
            Some(map) => {
                map.insert("files".into(), files);
            }
            None => doc = serde_json::json!({ "header": doc, "files": files }),
        }
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        let path = self.dir.join("manifest.json");
        write_atomic(&path, s.as_bytes())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_dialect() {
        let mut t = Table::new(&["x", "u", "id"]);
        t.push(vec![0.1.into(), 1e-20.into(), "E_2".into()]);
        t.push(vec![(-2.0).into(), 3usize.into(), "E_2a".into()]);
        assert_eq!(t.to_csv(), "x,u,id\n0.1,1e-20,E_2\n-2.0,3,E_2a\n");
        assert_eq!(t.to_dat(), "# x u id\n0.1 1e-20 E_2\n-2.0 3 E_2a\n");
    }

    #[test]
    fn numbers_round_trip() {
        for v in [0.1 + 0.2, -1.0 / 3.0, 6.02e23, f64::MIN_POSITIVE] {
            let s = Cell::Num(v).to_string();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn known_digest() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn manifest_lists_every_file() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputSet::create(dir.path()).unwrap();
        let mut t = Table::new(&["a"]);
        t.push(vec![1.0.into()]);
        out.write_table("tab", &t).unwrap();
        out.write_json("s.json", &serde_json::json!({"k": 1})).unwrap();
        let m = out.finish(&serde_json::json!({"version": "x"})).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(m).unwrap()).unwrap();
        let files = doc["files"].as_array().unwrap();
        assert_eq!(files.len(), 3);
        for f in files {
            let bytes = fs::read(dir.path().join(f["name"].as_str().unwrap())).unwrap();
            assert_eq!(f["sha256"], sha256_hex(&bytes));
        }
        let leftovers: Vec<_> = fs::read_dir(dir.path()).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().contains(".tmp")).collect();
        assert!(leftovers.is_empty());
    }
}
