use std::fs;
use std::io::Write;
use std::path::PathBuf;

use crate::CliError;

/// A CSV artifact: `#` header lines followed by a plain CSV body.
pub struct Table {
    header: Vec<String>,
    columns: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Shortest representation that round-trips, so bodies are byte-stable.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) { x.to_string() } else { format!("{x:e}") }
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { header: Vec::new(), columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.header.push(line.into());
    }

    pub fn prepend_notes(&mut self, lines: Vec<String>) {
        let rest = std::mem::replace(&mut self.header, lines);
        self.header.extend(rest);
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        for h in &self.header {
            writeln!(out, "# {h}").expect("in-memory write");
        }
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Output(e.to_string()))
    }
}

pub enum Artifact {
    Csv(Table),
    Json(String),
}

/// Write to `<dir>/<name>.{csv,json}`, or to stdout without a directory.
pub fn emit(artifact: &Artifact, name: &str, dir: Option<&PathBuf>) -> Result<(), CliError> {
    let (bytes, ext) = match artifact {
        Artifact::Csv(t) => (t.render()?, "csv"),
        Artifact::Json(s) => (format!("{s}\n").into_bytes(), "json"),
    };
    match dir {
        Some(d) => {
            fs::create_dir_all(d).map_err(|e| CliError::Output(format!("{}: {e}", d.display())))?;
            let path = d.join(format!("{name}.{ext}"));
            fs::write(&path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            std::io::stdout().write_all(&bytes).map_err(|e| CliError::Output(e.to_string()))?;
        }
    }
    Ok(())
}
