use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use cox_core::format::{g17, to_json_string};
use serde::Serialize;
use serde_json::Value;

/// Output directory that records what was written and finishes with a manifest.
pub struct Outputs {
    dir: PathBuf,
    subcommand: String,
    config: Option<String>,
    written: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    subcommand: &'a str,
    config: Option<&'a str>,
    outputs: &'a [String],
    parameters: &'a Value,
}

impl Outputs {
    pub fn new(dir: &Path, subcommand: &str, config: Option<&Path>) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            subcommand: subcommand.to_string(),
            config: config.map(|p| p.display().to_string()),
            written: Vec::new(),
        })
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        self.written.push(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        self.write_text(name, &to_json_string(value)?)
    }

    pub fn write_csv(&mut self, name: &str, csv: &Csv) -> Result<()> {
        self.write_text(name, &csv.text)
    }

    /// Writes `manifest.json`, echoing the resolved inputs.
    pub fn finish(self, parameters: &Value) -> Result<()> {
        let m = Manifest {
            tool: "cox",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: &self.subcommand,
            config: self.config.as_deref(),
            outputs: &self.written,
            parameters,
        };
        let path = self.dir.join("manifest.json");
        std::fs::write(&path, to_json_string(&m)?).with_context(|| format!("writing {}", path.display()))
    }
}

/// CSV with `%.17g` numbers and LF line endings.
pub struct Csv {
    text: String,
}

pub enum Cell<'a> {
    F(f64),
    U(u64),
    S(&'a str),
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, cells: &[Cell]) {
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            match c {
                Cell::F(x) => self.text.push_str(&g17(*x)),
                Cell::U(n) => write!(self.text, "{n}").expect("writing to a String"),
                Cell::S(s) => self.text.push_str(s),
            }
        }
        self.text.push('\n');
    }

    pub fn floats(&mut self, xs: &[f64]) {
        let cells: Vec<Cell> = xs.iter().map(|&x| Cell::F(x)).collect();
        self.row(&cells);
    }
}
