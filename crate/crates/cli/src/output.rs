//! Deterministic CSV and JSON emission. Numeric cells are printed with 17
//! significant digits so identical runs are byte-identical; every file
//! embeds the resolved config and a format-version marker.

use serde::Serialize;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::config::FORMAT_VERSION;
use crate::AppError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// One numeric cell; integers print without exponent for readability.
#[derive(Clone, Copy, Debug)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    fn write(&self, w: &mut impl Write) -> std::io::Result<()> {
        match self {
            Cell::Int(v) => write!(w, "{v}"),
            Cell::Float(v) => write!(w, "{v:.16e}"),
        }
    }

    fn to_json(self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(v),
            Cell::Float(v) => serde_json::Value::from(v),
        }
    }
}

/// A rectangular numeric table with a fixed header.
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "ragged table row");
        self.rows.push(row);
    }
}

pub struct Writer {
    out_dir: PathBuf,
    format: OutputFormat,
    command: &'static str,
    config_json: serde_json::Value,
}

impl Writer {
    pub fn new<C: Serialize>(
        out_dir: &Path,
        format: OutputFormat,
        command: &'static str,
        config: &C,
    ) -> Result<Self, AppError> {
        fs::create_dir_all(out_dir).map_err(|e| {
            AppError::config_msg(format!("cannot create {}: {e}", out_dir.display()))
        })?;
        Ok(Writer {
            out_dir: out_dir.to_path_buf(),
            format,
            command,
            config_json: serde_json::to_value(config).expect("config serializes"),
        })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out_dir
    }

    /// Write a table as `<stem>.csv` (or `.json` in JSON mode). Returns the
    /// path written.
    pub fn table(&self, stem: &str, table: &Table) -> Result<PathBuf, AppError> {
        match self.format {
            OutputFormat::Csv => {
                let path = self.out_dir.join(format!("{stem}.csv"));
                let file = fs::File::create(&path)
                    .map_err(|e| AppError::io(format!("create {}: {e}", path.display())))?;
                let mut w = BufWriter::new(file);
                (|| -> std::io::Result<()> {
                    writeln!(w, "# command = {}", self.command)?;
                    writeln!(w, "# format_version = {FORMAT_VERSION}")?;
                    writeln!(w, "# config = {}", self.config_json)?;
                    writeln!(w, "{}", table.columns.join(","))?;
                    for row in &table.rows {
                        let mut first = true;
                        for cell in row {
                            if !first {
                                write!(w, ",")?;
                            }
                            first = false;
                            cell.write(&mut w)?;
                        }
                        writeln!(w)?;
                    }
                    w.flush()
                })()
                .map_err(|e| AppError::io(format!("write {}: {e}", path.display())))?;
                Ok(path)
            }
            OutputFormat::Json => {
                let rows: Vec<serde_json::Value> = table
                    .rows
                    .iter()
                    .map(|r| {
                        serde_json::Value::Array(r.iter().map(|c| c.to_json()).collect())
                    })
                    .collect();
                let doc = serde_json::json!({
                    "command": self.command,
                    "format_version": FORMAT_VERSION,
                    "config": self.config_json,
                    "columns": table.columns,
                    "rows": rows,
                });
                let path = self.out_dir.join(format!("{stem}.json"));
                write_json_file(&path, &doc)?;
                Ok(path)
            }
        }
    }

    /// Write a JSON document as `<stem>.json` with metadata wrapped in.
    pub fn json(&self, stem: &str, body: serde_json::Value) -> Result<PathBuf, AppError> {
        let doc = serde_json::json!({
            "command": self.command,
            "format_version": FORMAT_VERSION,
            "config": self.config_json,
            "result": body,
        });
        let path = self.out_dir.join(format!("{stem}.json"));
        write_json_file(&path, &doc)?;
        Ok(path)
    }
}

pub fn write_json_file(path: &Path, doc: &serde_json::Value) -> Result<(), AppError> {
    let text = serde_json::to_string_pretty(doc)
        .map_err(|e| AppError::io(format!("serialize {}: {e}", path.display())))?;
    fs::write(path, text + "\n")
        .map_err(|e| AppError::io(format!("write {}: {e}", path.display())))
}
