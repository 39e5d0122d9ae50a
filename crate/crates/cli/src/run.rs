//! Output directory, input hashing and the per-run manifest.

use fenchel::curves::CurveSpec;
use fenchel::fn_map::FnVectorSpec;
use fenchel::pants_surface::{PantsSurface, SurfaceSpec};
use fenchel::{Error, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub cli_version: &'static str,
    pub library_version: &'static str,
    pub args: Vec<String>,
    pub seed: u64,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
}

pub struct Run {
    dir: PathBuf,
    pub manifest: Manifest,
}

fn sha256(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

impl Run {
    pub fn new(dir: PathBuf, args: Vec<String>, seed: u64, tol: f64) -> Self {
        Run {
            dir,
            manifest: Manifest {
                tool: "fenchel",
                cli_version: env!("CARGO_PKG_VERSION"),
                library_version: fenchel::VERSION,
                args,
                seed,
                tol,
                family: None,
                inputs: Vec::new(),
                outputs: Vec::new(),
            },
        }
    }

    /// Reads an input file and records its digest.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.manifest.inputs.push(FileDigest {
            path: path.display().to_string(),
            sha256: sha256(&bytes),
        });
        String::from_utf8(bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
    }

    pub fn surface(&mut self, path: &Path) -> Result<PantsSurface> {
        let text = self.read(path)?;
        SurfaceSpec::from_json(&text)
            .and_then(|s| s.build())
            .map_err(|e| annotate(e, path))
    }

    pub fn curve(&mut self, path: &Path) -> Result<CurveSpec> {
        let text = self.read(path)?;
        CurveSpec::from_json(&text).map_err(|e| annotate(e, path))
    }

    pub fn vector(&mut self, path: &Path) -> Result<FnVectorSpec> {
        let text = self.read(path)?;
        serde_json::from_str(&text).map_err(|e| annotate(e.into(), path))
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::Io(format!("{}: {e}", self.dir.display())))?;
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.manifest.outputs.push(FileDigest {
            path: name.to_string(),
            sha256: sha256(bytes),
        });
        Ok(path)
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let text = serde_json::to_string_pretty(value)? + "\n";
        self.write(name, text.as_bytes())
    }

    pub fn write_csv<T: Serialize>(&mut self, name: &str, header: &[&str], rows: &[T]) -> Result<PathBuf> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(header)?;
        for r in rows {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(format!("csv: {e}")))?;
        self.write(name, &bytes)
    }

    /// Writes `manifest.json`; it lists every file written before it.
    pub fn finish(mut self) -> Result<()> {
        let text = serde_json::to_string_pretty(&self.manifest)? + "\n";
        self.write("manifest.json", text.as_bytes())?;
        Ok(())
    }
}

/// Prefixes an error with the file it came from, keeping its kind.
fn annotate(e: Error, path: &Path) -> Error {
    let p = path.display();
    match e {
        Error::Io(m) => Error::Io(format!("{p}: {m}")),
        Error::InvalidArgument(m) => Error::InvalidArgument(format!("{p}: {m}")),
        Error::BadGraph(m) => Error::BadGraph(format!("{p}: {m}")),
        Error::BadPath(m) => Error::BadPath(format!("{p}: {m}")),
        Error::IndexMismatch(m) => Error::IndexMismatch(format!("{p}: {m}")),
        other => other,
    }
}
