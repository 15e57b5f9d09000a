//! CSV tables and the run log.
//!
//! The first line of every CSV is a `#` comment carrying the tool version and
//! the generation time. Everything after it depends only on the scenario and
//! its seeds.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use cocycle_lab::cocycle::LyapunovReport;

use crate::report::{TOOL_NAME, TOOL_VERSION};

/// A CSV table with the standard spectrum columns and optional extras.
#[derive(Debug, Clone)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    /// `parameter, lambda_1..lambda_{2d}, stderr, n` followed by `extra`.
    pub fn spectrum(dim: usize, extra: &[&str]) -> Self {
        let mut header = vec!["parameter".to_string()];
        header.extend((1..=dim).map(|i| format!("lambda_{i}")));
        header.push("stderr".into());
        header.push("n".into());
        header.extend(extra.iter().map(|s| s.to_string()));
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, parameter: &str, r: &LyapunovReport, extra: Vec<String>) {
        let mut row = vec![parameter.to_string()];
        row.extend(r.exponents.iter().map(|x| x.to_string()));
        row.push(r.max_stderr().to_string());
        row.push(r.iterations.to_string());
        row.extend(extra);
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Header and rows, without the comment line.
    pub fn body(&self) -> anyhow::Result<String> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("csv flush failed: {e}"))?;
        Ok(String::from_utf8(bytes)?)
    }

    pub fn write(&self, path: &Path, generated_at: &str) -> anyhow::Result<()> {
        let text = format!("# {TOOL_NAME} {TOOL_VERSION} generated {generated_at}\n{}", self.body()?);
        fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
    }
}

/// The CSV body of a file written by [`Table::write`].
pub fn csv_body(text: &str) -> &str {
    match text.strip_prefix('#') {
        Some(rest) => rest.split_once('\n').map_or("", |(_, body)| body),
        None => text,
    }
}

/// Output directory with a single writer per file.
#[derive(Debug)]
pub struct OutDir {
    root: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(root: &Path) -> anyhow::Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("cannot create {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn table(&mut self, name: &str, t: &Table, generated_at: &str) -> anyhow::Result<()> {
        t.write(&self.path(name), generated_at)?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> anyhow::Result<()> {
        let path = self.path(name);
        let mut f = fs::File::create(&path).with_context(|| format!("cannot write {}", path.display()))?;
        f.write_all(body.as_bytes())?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn written(&self) -> &[String] {
        &self.written
    }
}
