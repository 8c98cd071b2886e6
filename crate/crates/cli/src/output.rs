use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use crate::Global;

pub type CliResult<T> = std::result::Result<T, Box<dyn std::error::Error>>;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Tsv,
    Json,
}

pub struct Sink {
    out: Box<dyn Write>,
    pub format: Format,
    meta: bool,
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

impl Sink {
    pub fn open(global: &Global, default: Format) -> CliResult<Sink> {
        let out: Box<dyn Write> = match &global.output {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Sink {
            out,
            format: global.format.unwrap_or(default),
            meta: !global.no_meta,
        })
    }

    /// Text, CSV and TSV open with a `#` line; JSON carries a `generated_at` field.
    fn meta_line(&mut self) -> CliResult<()> {
        if self.meta {
            writeln!(
                self.out,
                "# cf {} generated_at={}",
                env!("CARGO_PKG_VERSION"),
                timestamp()
            )?;
        }
        Ok(())
    }

    pub fn text(mut self, lines: &str) -> CliResult<()> {
        self.meta_line()?;
        writeln!(self.out, "{lines}")?;
        self.out.flush()?;
        Ok(())
    }

    pub fn json(mut self, schema: &str, body: impl Serialize) -> CliResult<()> {
        let mut value = serde_json::to_value(body)?;
        let Value::Object(fields) = &mut value else {
            return Err("JSON body must be an object".into());
        };
        let mut doc = serde_json::Map::new();
        doc.insert("schema".into(), Value::from(schema));
        if self.meta {
            doc.insert("generated_at".into(), Value::from(timestamp()));
        }
        doc.append(fields);
        serde_json::to_writer_pretty(&mut self.out, &Value::Object(doc))?;
        writeln!(self.out)?;
        self.out.flush()?;
        Ok(())
    }

    /// Delimited rows after optional `#` comment lines.
    pub fn table(
        mut self,
        comments: &[String],
        header: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> CliResult<()> {
        self.meta_line()?;
        for c in comments {
            writeln!(self.out, "# {c}")?;
        }
        let delimiter = if self.format == Format::Tsv {
            b'\t'
        } else {
            b','
        };
        let mut w = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .from_writer(&mut self.out);
        w.write_record(header)?;
        for row in rows {
            w.write_record(&row)?;
        }
        w.flush()?;
        drop(w);
        self.out.flush()?;
        Ok(())
    }
}
