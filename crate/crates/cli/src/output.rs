use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use serde_json::Value;

/// Where results go and how they are rendered.
pub struct Sink {
    out: Box<dyn Write>,
    pretty: bool,
}

impl Sink {
    pub fn open(path: Option<&Path>, pretty: bool) -> io::Result<Self> {
        let out: Box<dyn Write> = match path {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(BufWriter::new(io::stdout())),
        };
        Ok(Sink { out, pretty })
    }

    /// A stream of flat records: JSON lines, or one aligned table.
    pub fn records(&mut self, rows: &[Value]) -> io::Result<()> {
        if self.pretty {
            return self.table(rows);
        }
        for r in rows {
            writeln!(self.out, "{r}")?;
        }
        Ok(())
    }

    /// A single report document.
    pub fn document(&mut self, doc: &Value) -> io::Result<()> {
        if self.pretty {
            writeln!(self.out, "{}", serde_json::to_string_pretty(doc).expect("json"))
        } else {
            writeln!(self.out, "{doc}")
        }
    }

    fn table(&mut self, rows: &[Value]) -> io::Result<()> {
        let Some(Value::Object(first)) = rows.first() else {
            return Ok(());
        };
        let cols: Vec<&String> = first.keys().collect();
        let cells: Vec<Vec<String>> = rows
            .iter()
            .map(|r| cols.iter().map(|c| cell(&r[c.as_str()])).collect())
            .collect();
        let widths: Vec<usize> = cols
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].chars().count()).chain([c.len()]).max().unwrap_or(0))
            .collect();
        let line = |vals: Vec<&str>| {
            vals.iter()
                .zip(&widths)
                .map(|(v, w)| format!("{v:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        writeln!(self.out, "{}", line(cols.iter().map(|c| c.as_str()).collect()))?;
        for r in &cells {
            writeln!(self.out, "{}", line(r.iter().map(String::as_str).collect()))?;
        }
        Ok(())
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}
