//! Tabular output as CSV (header row, comma separated, LF endings) or as
//! JSON lines with one object per row.

use std::io::Write;

use clap::ValueEnum;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Shortest decimal string that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Num(f64),
    Bool(bool),
}

impl Cell {
    fn csv(self) -> String {
        match self {
            Cell::Num(x) => format_float(x),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(self) -> serde_json::Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(x).map_or(serde_json::Value::Null, serde_json::Value::Number),
            Cell::Bool(b) => serde_json::Value::Bool(b),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, format: Format, writer: W) -> Result<(), CliError> {
        match format {
            Format::Csv => self.write_csv(writer),
            Format::Json => self.write_json_lines(writer),
        }
    }

    fn write_csv<W: Write>(&self, writer: W) -> Result<(), CliError> {
        let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
        csv.write_record(&self.columns)?;
        for row in &self.rows {
            csv.write_record(row.iter().map(|c| c.csv()))?;
        }
        csv.flush()?;
        Ok(())
    }

    fn write_json_lines<W: Write>(&self, mut writer: W) -> Result<(), CliError> {
        for row in &self.rows {
            // keys are emitted in column order, not sorted
            let fields = self
                .columns
                .iter()
                .zip(row)
                .map(|(k, v)| Ok(format!("{}:{}", serde_json::to_string(k)?, serde_json::to_string(&v.json())?)))
                .collect::<Result<Vec<_>, serde_json::Error>>()?;
            writeln!(writer, "{{{}}}", fields.join(","))?;
        }
        writer.flush()?;
        Ok(())
    }
}
