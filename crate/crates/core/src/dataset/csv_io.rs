use std::io::Write;
use std::path::Path;

use super::arff::push_tokens;
use super::repair::RepairTable;
use super::{ColumnKind, ColumnSpec, Frame};
use crate::error::{Error, Result};

fn is_missing_token(t: &str) -> bool {
    t.is_empty() || t == "?"
}

/// Parses CSV text with a header row. Column types are inferred: a column is
/// numeric when every present token parses as a number, categorical
/// otherwise (categories sorted). The label column is always categorical.
pub fn parse_csv(text: &str, table: &RepairTable) -> Result<Frame> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if headers.is_empty() {
        return Err(Error::argument("CSV has no header row"));
    }
    let mut records = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        records.push(rec.iter().map(str::to_string).collect::<Vec<_>>());
    }

    let label = table
        .label_names
        .iter()
        .find(|l| headers.contains(l))
        .cloned()
        .unwrap_or_else(|| headers.last().expect("non-empty").clone());

    let mut schema = Vec::with_capacity(headers.len());
    for (j, name) in headers.iter().enumerate() {
        let present = records.iter().map(|r| r[j].as_str()).filter(|t| !is_missing_token(t));
        let numeric = name != &label && present.clone().all(|t| t.parse::<f64>().is_ok());
        if numeric {
            schema.push(ColumnSpec::numeric(name));
        } else {
            let mut cats: Vec<String> = present.map(str::to_string).collect();
            cats.sort();
            cats.dedup();
            if cats.is_empty() {
                return Err(Error::schema(name, "label column has no values"));
            }
            schema.push(ColumnSpec::categorical(name, cats));
        }
    }

    let mut frame = Frame::empty(schema, label)?;
    for (i, rec) in records.iter().enumerate() {
        let fields: Vec<&str> = rec.iter().map(String::as_str).collect();
        push_tokens(&mut frame, &fields, table).map_err(|e| match e {
            Error::Schema { column, message } => Error::Schema {
                column,
                message: format!("{message} (record {})", i + 1),
            },
            other => other,
        })?;
    }
    Ok(frame)
}

/// Writes a header row and one line per row; missing cells are written as
/// `?`, numbers in shortest round-trip form.
pub fn write_csv_to<W: Write>(frame: &Frame, out: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(frame.schema().iter().map(|c| c.name.as_str()))?;
    for i in 0..frame.n_rows() {
        let row: Vec<String> = (0..frame.n_cols())
            .map(|j| match frame.value(i, j) {
                None => "?".to_string(),
                Some(v) => match frame.schema()[j].kind {
                    ColumnKind::Numeric => format!("{v}"),
                    ColumnKind::Categorical => frame.schema()[j].categories[v as usize].clone(),
                },
            })
            .collect();
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_csv(frame: &Frame, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv_to(frame, std::io::BufWriter::new(file))
}

pub fn write_csv_string(frame: &Frame) -> Result<String> {
    let mut buf = Vec::new();
    write_csv_to(frame, &mut buf)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}
