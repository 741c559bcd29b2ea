use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Output directory; files land there via write-then-rename.
pub struct Sink {
    dir: PathBuf,
}

impl Sink {
    pub fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir).with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self { dir })
    }

    pub fn write_with(&self, name: &str, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<PathBuf> {
        let target = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)
            .with_context(|| format!("cannot create a temporary file in {}", self.dir.display()))?;
        body(&mut tmp)?;
        tmp.as_file_mut().flush()?;
        tmp.persist(&target)
            .with_context(|| format!("cannot write {}", target.display()))?;
        log::info!("wrote {}", target.display());
        Ok(target)
    }

    pub fn json<T: Serialize>(&self, stem: &str, value: &T) -> Result<PathBuf> {
        self.write_with(&format!("{stem}.json"), |w| {
            serde_json::to_writer_pretty(&mut *w, value)?;
            writeln!(w)?;
            Ok(())
        })
    }

    /// Column-oriented CSV from equally long named columns.
    pub fn columns(&self, stem: &str, columns: &[(&str, Vec<String>)]) -> Result<PathBuf> {
        self.write_with(&format!("{stem}.csv"), |w| {
            let mut out = csv::Writer::from_writer(w);
            out.write_record(columns.iter().map(|c| c.0))?;
            let rows = columns.first().map_or(0, |c| c.1.len());
            for i in 0..rows {
                out.write_record(columns.iter().map(|c| c.1[i].as_str()))?;
            }
            out.flush()?;
            Ok(())
        })
    }

    /// `quantity,value` rows for every numeric scalar of a serialisable record.
    pub fn scalars<T: Serialize>(&self, stem: &str, value: &T) -> Result<PathBuf> {
        let mut rows = Vec::new();
        flatten("", &serde_json::to_value(value)?, &mut rows);
        self.columns(
            stem,
            &[
                ("quantity", rows.iter().map(|r| r.0.clone()).collect()),
                ("value", rows.iter().map(|r| r.1.clone()).collect()),
            ],
        )
    }
}

fn flatten(prefix: &str, v: &serde_json::Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        serde_json::Value::Number(n) => out.push((prefix.to_string(), n.to_string())),
        serde_json::Value::Bool(b) => out.push((prefix.to_string(), b.to_string())),
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                flatten(&key(k), v, out);
            }
        }
        serde_json::Value::Array(items) if items.len() <= 4 => {
            for (i, v) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), v, out);
            }
        }
        _ => {}
    }
}

pub fn strings<T: ToString>(values: &[T]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}
