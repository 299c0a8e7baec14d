use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use randturn::GameError;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Args(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Game(e) => e.exit_code(),
            CliError::Io { .. } => 1,
            CliError::Args(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Common header of every report.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T> {
    pub command: String,
    pub version: String,
    pub invocation: Vec<String>,
    pub seed: u64,
    #[serde(flatten)]
    pub body: T,
}

/// Where files go. Without `--out` nothing is written.
#[derive(Debug, Clone, Default)]
pub struct Output {
    pub dir: Option<PathBuf>,
}

impl Output {
    pub fn new(dir: Option<PathBuf>) -> CliResult<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(io_error(d))?;
        }
        Ok(Self { dir })
    }

    pub fn path(&self, name: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(name))
    }

    pub fn write(&self, name: &str, contents: &str) -> CliResult<Option<PathBuf>> {
        let Some(path) = self.path(name) else { return Ok(None) };
        fs::write(&path, contents).map_err(io_error(&path))?;
        Ok(Some(path))
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<Option<PathBuf>> {
        let mut text = serde_json::to_string_pretty(value).expect("report serializes");
        text.push('\n');
        self.write(name, &text)
    }
}

/// Line-buffered writer for JSON-lines files; a no-op without a path.
pub struct LineWriter {
    file: Option<(PathBuf, std::io::BufWriter<fs::File>)>,
}

impl LineWriter {
    pub fn create(path: Option<PathBuf>) -> CliResult<Self> {
        let file = match path {
            Some(p) => {
                let f = fs::File::create(&p).map_err(io_error(&p))?;
                Some((p, std::io::BufWriter::new(f)))
            }
            None => None,
        };
        Ok(Self { file })
    }

    pub fn line(&mut self, text: &str) -> CliResult<()> {
        if let Some((p, w)) = &mut self.file {
            writeln!(w, "{text}").map_err(io_error(p))?;
        }
        Ok(())
    }

    pub fn flush(&mut self) -> CliResult<()> {
        if let Some((p, w)) = &mut self.file {
            w.flush().map_err(io_error(p))?;
        }
        Ok(())
    }
}

/// Fixed-precision float formatting so files compare byte for byte.
pub fn fmt6(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        String::new()
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt6).unwrap_or_default()
}
