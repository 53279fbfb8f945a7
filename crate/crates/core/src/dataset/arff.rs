//! Reader for the ARFF subset used by the UCI release: `@relation`,
//! `@attribute name {v,...} | numeric | real | integer`, `@data`, `%`
//! comments and `?` for missing values.

use super::repair::RepairTable;
use super::{ColumnKind, ColumnSpec, Frame};
use crate::error::{Error, Result};

fn parse_error(path: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_string(),
        line,
        message: message.into(),
    }
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    for q in ['\'', '"'] {
        if s.len() >= 2 && s.starts_with(q) && s.ends_with(q) {
            return &s[1..s.len() - 1];
        }
    }
    s
}

/// Splits `@attribute <name> <type>` into name and type text.
fn split_attribute(rest: &str) -> Option<(&str, &str)> {
    let rest = rest.trim_start();
    let first = rest.chars().next()?;
    if first == '\'' || first == '"' {
        let end = rest[1..].find(first)? + 1;
        Some((&rest[1..end], rest[end + 1..].trim()))
    } else {
        let end = rest.find(|c: char| c.is_whitespace() || c == '{')?;
        Some((&rest[..end], rest[end..].trim()))
    }
}

fn parse_type(name: &str, ty: &str, path: &str, line: usize) -> Result<ColumnSpec> {
    if let Some(body) = ty.strip_prefix('{') {
        let body = body
            .trim_end()
            .strip_suffix('}')
            .ok_or_else(|| parse_error(path, line, format!("unterminated category list for `{name}`")))?;
        let categories: Vec<String> = body
            .split(',')
            .map(|t| unquote(t).to_string())
            .filter(|t| !t.is_empty())
            .collect();
        if categories.is_empty() {
            return Err(parse_error(path, line, format!("empty category list for `{name}`")));
        }
        return Ok(ColumnSpec::categorical(name, categories));
    }
    match ty.to_ascii_lowercase().as_str() {
        "numeric" | "real" | "integer" => Ok(ColumnSpec::numeric(name)),
        other => Err(parse_error(path, line, format!("unsupported attribute type `{other}` for `{name}`"))),
    }
}

/// Parses ARFF text. `path` is only used in error messages.
///
/// Rows with surplus *empty* fields (a trailing comma, a doubled comma) are
/// repaired by dropping the empty fields; any other width mismatch is a parse
/// error.
pub fn parse_arff(text: &str, path: &str, table: &RepairTable) -> Result<Frame> {
    let mut schema: Vec<ColumnSpec> = Vec::new();
    let mut in_data = false;
    let mut seen_relation = false;
    let mut frame: Option<Frame> = None;

    for (k, raw_line) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        if !in_data {
            let Some(directive) = line.strip_prefix('@') else {
                return Err(parse_error(path, line_no, "expected a directive before @data"));
            };
            let (keyword, rest) = directive.split_at(directive.find(char::is_whitespace).unwrap_or(directive.len()));
            match keyword.to_ascii_lowercase().as_str() {
                "relation" => {
                    if rest.trim().is_empty() {
                        return Err(parse_error(path, line_no, "@relation without a name"));
                    }
                    seen_relation = true;
                }
                "attribute" => {
                    let (name, ty) = split_attribute(rest)
                        .ok_or_else(|| parse_error(path, line_no, "malformed @attribute"))?;
                    if ty.is_empty() {
                        return Err(parse_error(path, line_no, format!("attribute `{name}` has no type")));
                    }
                    schema.push(parse_type(name, ty, path, line_no)?);
                }
                "data" => {
                    if !seen_relation {
                        return Err(parse_error(path, line_no, "@data before @relation"));
                    }
                    if schema.is_empty() {
                        return Err(parse_error(path, line_no, "@data without attributes"));
                    }
                    let label = table
                        .label_names
                        .iter()
                        .find(|l| schema.iter().any(|c| &c.name == *l))
                        .cloned()
                        .unwrap_or_else(|| schema.last().expect("non-empty").name.clone());
                    frame = Some(
                        Frame::empty(schema.clone(), label)
                            .map_err(|e| parse_error(path, line_no, e.to_string()))?,
                    );
                    in_data = true;
                }
                other => {
                    return Err(parse_error(path, line_no, format!("unknown directive `@{other}`")));
                }
            }
            continue;
        }

        let frame = frame.as_mut().expect("set when @data is seen");
        let mut fields: Vec<&str> = raw_line.trim_end_matches(['\r', '\n']).split(',').collect();
        let width = frame.n_cols();
        while fields.len() > width {
            match fields.iter().rposition(|f| f.trim().is_empty()) {
                Some(p) => {
                    fields.remove(p);
                }
                None => break,
            }
        }
        if fields.len() != width {
            return Err(parse_error(
                path,
                line_no,
                format!("row has {} fields, expected {width}", fields.len()),
            ));
        }
        push_tokens(frame, &fields, table).map_err(|e| match e {
            Error::Schema { column, message } => Error::Schema {
                column,
                message: format!("{message} (line {line_no})"),
            },
            other => other,
        })?;
    }

    match frame {
        Some(f) => Ok(f),
        None => Err(parse_error(path, text.lines().count(), "missing @data section")),
    }
}

/// Converts one row of raw tokens into frame cells. Tokens are trimmed; `?`
/// and empty tokens are missing. A categorical token that is not declared
/// but that the repair table can fix is kept as an extra category for
/// [`super::clean`] to merge.
pub(super) fn push_tokens(frame: &mut Frame, fields: &[&str], table: &RepairTable) -> Result<()> {
    let mut values = Vec::with_capacity(fields.len());
    let mut mask = Vec::with_capacity(fields.len());
    for (j, raw) in fields.iter().enumerate() {
        let token = raw.trim();
        if token.is_empty() || token == "?" {
            values.push(0.0);
            mask.push(true);
            continue;
        }
        let spec = &frame.schema()[j];
        match spec.kind {
            ColumnKind::Numeric => match token.parse::<f64>() {
                Ok(v) => {
                    values.push(v);
                    mask.push(false);
                }
                Err(_) => {
                    return Err(Error::schema(&spec.name, format!("non-numeric token `{token}`")));
                }
            },
            ColumnKind::Categorical => {
                let idx = match spec.category_index(token) {
                    Some(i) => i,
                    None if table.is_repairable(&spec.name, token) => {
                        let name = spec.name.clone();
                        let col = frame
                            .schema_mut()
                            .iter_mut()
                            .find(|c| c.name == name)
                            .expect("column exists");
                        col.categories.push(token.to_string());
                        col.categories.len() - 1
                    }
                    None => {
                        return Err(Error::schema(&spec.name, format!("unknown category token `{token}`")));
                    }
                };
                values.push(idx as f64);
                mask.push(false);
            }
        }
    }
    frame.push_raw(&values, &mask)
}
