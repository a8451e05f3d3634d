use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// or to standard output when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    let Some(path) = path else {
        let mut out = std::io::stdout().lock();
        out.write_all(bytes)?;
        out.flush()?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Runtime(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

pub fn csv<T: Serialize>(rows: &[T]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

pub fn json<T: Serialize + ?Sized>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Runtime(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// One two-column series of a gnuplot data file.
pub struct Block {
    pub label: String,
    pub columns: (&'static str, &'static str),
    pub points: Vec<(f64, f64)>,
}

/// Blocks are separated by blank lines; each opens with comment lines naming
/// the series and its columns.
pub fn gnuplot(blocks: &[Block]) -> Vec<u8> {
    let mut out = String::new();
    for (b, block) in blocks.iter().enumerate() {
        if b > 0 {
            out.push_str("\n\n");
        }
        out.push_str(&format!("# {}\n# {} {}\n", block.label, block.columns.0, block.columns.1));
        for (x, y) in &block.points {
            out.push_str(&format!("{x} {y}\n"));
        }
    }
    out.into_bytes()
}
