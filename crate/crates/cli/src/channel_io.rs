//! Channel matrices as headerless CSV: one row per input symbol, one
//! column per output symbol.

use std::io::{Read, Write};
use std::path::Path;

use relay_bounds::DiscreteChannel;

use crate::error::CliError;
use crate::output::format_float;

pub fn read_channel<R: Read>(reader: R) -> Result<DiscreteChannel, CliError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut rows = Vec::new();
    for (i, record) in csv.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("channel CSV: {e}")))?;
        let row = record
            .iter()
            .enumerate()
            .map(|(j, field)| {
                field.parse::<f64>().map_err(|_| {
                    CliError::Input(format!("channel CSV row {}, column {}: not a number: {field:?}", i + 1, j + 1))
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    DiscreteChannel::new(rows).map_err(|e| CliError::Input(format!("channel CSV: {e}")))
}

pub fn read_channel_file(path: &Path) -> Result<DiscreteChannel, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    read_channel(file)
}

pub fn write_channel<W: Write>(channel: &DiscreteChannel, writer: W) -> Result<(), CliError> {
    let mut csv = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(writer);
    for row in channel.rows() {
        csv.write_record(row.iter().map(|v| format_float(*v)))?;
    }
    csv.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_whitespace_and_comments() {
        let text = "# bsc\n0.9, 0.1\n 0.1 ,0.9\n";
        let w = read_channel(text.as_bytes()).unwrap();
        assert_eq!(w, DiscreteChannel::bsc(0.1).unwrap());
    }

    #[test]
    fn round_trips_awkward_values() {
        let third = 1.0 / 3.0;
        let w = DiscreteChannel::new(vec![vec![third, third, 1.0 - 2.0 * third], vec![1e-300, 0.5, 0.5 - 1e-300]]).unwrap();
        let mut buf = Vec::new();
        write_channel(&w, &mut buf).unwrap();
        assert_eq!(read_channel(buf.as_slice()).unwrap(), w);
    }

    #[test]
    fn rejects_malformed_rows() {
        for text in ["0.5,0.5\n0.5\n", "0.9,0.2\n0.1,0.9\n", "1.1,-0.1\n0,1\n", "a,b\n0,1\n", "1,0\n"] {
            assert!(matches!(read_channel(text.as_bytes()), Err(CliError::Input(_))), "{text:?}");
        }
    }
}
