//! Dataset files: CSV tables plus the metadata manifest.
//!
//! Every file is rendered in memory, written to a hidden temporary file in
//! the output directory and renamed into place.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use tsforge_core::{GenerationResult, LabelMatrix, SeriesMatrix};

use crate::manifest::Manifest;

pub const TRAIN_FILE: &str = "train.csv";
pub const TEST_FILE: &str = "test.csv";
pub const LABELS_RICH_FILE: &str = "labels_rich.csv";
pub const LABELS_BINARY_FILE: &str = "labels_binary.csv";
pub const MANIFEST_FILE: &str = "metadata.json";

/// Seventeen significant digits in scientific notation; parses back to the
/// same bits.
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn header(d: usize) -> Vec<String> {
    std::iter::once(String::from("t"))
        .chain((0..d).map(|j| format!("x{j}")))
        .collect()
}

fn render<F>(d: usize, rows: usize, t0: usize, mut cell: F) -> io::Result<Vec<u8>>
where
    F: FnMut(usize, usize) -> String,
{
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header(d))?;
    for r in 0..rows {
        let record = std::iter::once((t0 + r).to_string()).chain((0..d).map(|j| cell(r, j)));
        w.write_record(record)?;
    }
    w.into_inner().map_err(|e| e.into_error())
}

/// CSV rendering of a series block whose first row is global timestep `t0`.
pub fn series_csv(m: &SeriesMatrix, t0: usize) -> io::Result<Vec<u8>> {
    render(m.cols(), m.rows(), t0, |r, j| format_value(m.get(r, j)))
}

/// CSV rendering of labels; `binary` selects the 0/1 view.
pub fn labels_csv(l: &LabelMatrix, t0: usize, binary: bool) -> io::Result<Vec<u8>> {
    render(l.cols(), l.rows(), t0, |r, j| {
        let label = l.get(r, j);
        let code = if binary {
            label.is_abnormal() as u8
        } else {
            label.code()
        };
        code.to_string()
    })
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "path has no file name"))?;
    let tmp = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Manifest serialized as pretty JSON with a trailing newline.
pub fn manifest_json(m: &Manifest) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(m).expect("manifest serializes");
    bytes.push(b'\n');
    bytes
}

/// Writes all dataset files into `out_dir` (created if missing) and returns
/// the manifest path.
pub fn write_dataset(result: &GenerationResult, out_dir: &Path) -> io::Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let t0 = result.train_length;
    write_atomic(&out_dir.join(TRAIN_FILE), &series_csv(&result.train, 0)?)?;
    write_atomic(&out_dir.join(TEST_FILE), &series_csv(&result.test, t0)?)?;
    write_atomic(
        &out_dir.join(LABELS_RICH_FILE),
        &labels_csv(&result.labels, t0, false)?,
    )?;
    write_atomic(
        &out_dir.join(LABELS_BINARY_FILE),
        &labels_csv(&result.labels, t0, true)?,
    )?;
    let manifest = out_dir.join(MANIFEST_FILE);
    write_atomic(&manifest, &manifest_json(&Manifest::from_result(result)))?;
    Ok(manifest)
}

/// Reads a manifest written by [`write_dataset`].
pub fn read_manifest(path: &Path) -> Result<Manifest, ManifestError> {
    let text = fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let m: Manifest = serde_json::from_str(&text).map_err(ManifestError::Json)?;
    if m.schema_version != crate::manifest::SCHEMA_VERSION {
        return Err(ManifestError::Version(m.schema_version));
    }
    Ok(m)
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed manifest: {0}")]
    Json(serde_json::Error),
    #[error("unsupported schema version {0}")]
    Version(u32),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_round_trip_through_text() {
        for v in [0.0, -0.0, 1.0 / 3.0, -2.5e-300, 1e12, f64::MIN_POSITIVE, 0.1 + 0.2] {
            let s = format_value(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(format_value(1.5), "1.5000000000000000e0");
    }

    #[test]
    fn csv_layout() {
        let m = SeriesMatrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]);
        let text = String::from_utf8(series_csv(&m, 7).unwrap()).unwrap();
        assert_eq!(
            text,
            "t,x0,x1\n\
             7,1.0000000000000000e0,2.0000000000000000e0\n\
             8,3.0000000000000000e0,4.0000000000000000e0\n"
        );
    }

    #[test]
    fn atomic_write_leaves_no_temporary() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_atomic(&p, b"x\n").unwrap();
        write_atomic(&p, b"y\n").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"y\n");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
