//! Line-delimited self-describing records.
//!
//! Each record renders as one JSON object whose first key is `"record"`.
//! Field order is the insertion order and reals are always printed with 17
//! significant digits, so equal records render to equal bytes.

use std::fmt;

use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Field {
    Str(String),
    Strs(Vec<String>),
    UInt(u64),
    Int(i64),
    Num(f64),
    Nums(Vec<f64>),
    Bool(bool),
    Null,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecordError {
    #[error("malformed record: {0}")]
    Json(String),
    #[error("record is not a JSON object")]
    NotAnObject,
    #[error("record has no string `record` tag")]
    MissingKind,
    #[error("field `{0}` has an unsupported value type")]
    Unsupported(String),
    #[error("missing field `{0}`")]
    Missing(String),
    #[error("field `{0}` has the wrong type")]
    WrongType(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    kind: String,
    fields: Vec<(String, Field)>,
}

/// Formats a real with 17 significant digits; non-finite values become `null`.
pub fn format_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialise")
}

impl Record {
    pub fn new(kind: &str) -> Self {
        Self { kind: kind.to_string(), fields: Vec::new() }
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn fields(&self) -> &[(String, Field)] {
        &self.fields
    }

    pub fn with(mut self, name: &str, value: Field) -> Self {
        self.fields.push((name.to_string(), value));
        self
    }

    pub fn with_str(self, name: &str, value: &str) -> Self {
        self.with(name, Field::Str(value.to_string()))
    }

    pub fn with_strs<I, S>(self, name: &str, values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.with(name, Field::Strs(values.into_iter().map(Into::into).collect()))
    }

    pub fn with_u64(self, name: &str, value: u64) -> Self {
        self.with(name, Field::UInt(value))
    }

    pub fn with_num(self, name: &str, value: f64) -> Self {
        self.with(name, Field::Num(value))
    }

    pub fn with_nums(self, name: &str, values: impl IntoIterator<Item = f64>) -> Self {
        self.with(name, Field::Nums(values.into_iter().collect()))
    }

    pub fn with_bool(self, name: &str, value: bool) -> Self {
        self.with(name, Field::Bool(value))
    }

    pub fn get(&self, name: &str) -> Option<&Field> {
        self.fields.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn get_str(&self, name: &str) -> Result<&str, RecordError> {
        match self.get(name) {
            Some(Field::Str(s)) => Ok(s),
            Some(_) => Err(RecordError::WrongType(name.to_string())),
            None => Err(RecordError::Missing(name.to_string())),
        }
    }

    pub fn get_num(&self, name: &str) -> Result<f64, RecordError> {
        match self.get(name) {
            Some(Field::Num(x)) => Ok(*x),
            Some(Field::UInt(x)) => Ok(*x as f64),
            Some(Field::Int(x)) => Ok(*x as f64),
            Some(_) => Err(RecordError::WrongType(name.to_string())),
            None => Err(RecordError::Missing(name.to_string())),
        }
    }

    pub fn get_u64(&self, name: &str) -> Result<u64, RecordError> {
        match self.get(name) {
            Some(Field::UInt(x)) => Ok(*x),
            Some(_) => Err(RecordError::WrongType(name.to_string())),
            None => Err(RecordError::Missing(name.to_string())),
        }
    }

    pub fn get_nums(&self, name: &str) -> Result<&[f64], RecordError> {
        match self.get(name) {
            Some(Field::Nums(x)) => Ok(x),
            Some(_) => Err(RecordError::WrongType(name.to_string())),
            None => Err(RecordError::Missing(name.to_string())),
        }
    }

    pub fn render(&self) -> String {
        let mut out = format!("{{\"record\":{}", quote(&self.kind));
        for (name, field) in &self.fields {
            out.push(',');
            out.push_str(&quote(name));
            out.push(':');
            match field {
                Field::Str(s) => out.push_str(&quote(s)),
                Field::Strs(v) => {
                    let items: Vec<String> = v.iter().map(|s| quote(s)).collect();
                    out.push_str(&format!("[{}]", items.join(",")));
                }
                Field::UInt(x) => out.push_str(&x.to_string()),
                Field::Int(x) => out.push_str(&x.to_string()),
                Field::Num(x) => out.push_str(&format_num(*x)),
                Field::Nums(v) => {
                    let items: Vec<String> = v.iter().map(|&x| format_num(x)).collect();
                    out.push_str(&format!("[{}]", items.join(",")));
                }
                Field::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
                Field::Null => out.push_str("null"),
            }
        }
        out.push('}');
        out
    }

    /// Parses one rendered line. Accepts any JSON object whose values are
    /// strings, numbers, booleans, null, or flat arrays of strings/numbers.
    pub fn parse(line: &str) -> Result<Self, RecordError> {
        let value: Value = serde_json::from_str(line).map_err(|e| RecordError::Json(e.to_string()))?;
        let Value::Object(map) = value else {
            return Err(RecordError::NotAnObject);
        };
        let mut kind = None;
        let mut fields = Vec::new();
        for (name, v) in map {
            if name == "record" {
                match v {
                    Value::String(s) => kind = Some(s),
                    _ => return Err(RecordError::MissingKind),
                }
                continue;
            }
            let field = field_from_value(&name, v)?;
            fields.push((name, field));
        }
        let kind = kind.ok_or(RecordError::MissingKind)?;
        Ok(Self { kind, fields })
    }
}

fn field_from_value(name: &str, v: Value) -> Result<Field, RecordError> {
    let unsupported = || RecordError::Unsupported(name.to_string());
    Ok(match v {
        Value::String(s) => Field::Str(s),
        Value::Bool(b) => Field::Bool(b),
        Value::Null => Field::Null,
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                Field::UInt(u)
            } else if let Some(i) = n.as_i64() {
                Field::Int(i)
            } else {
                Field::Num(n.as_f64().ok_or_else(unsupported)?)
            }
        }
        Value::Array(items) => {
            if items.iter().all(Value::is_string) && !items.is_empty() {
                Field::Strs(items.into_iter().map(|s| s.as_str().unwrap().to_string()).collect())
            } else {
                let nums: Option<Vec<f64>> = items.iter().map(Value::as_f64).collect();
                Field::Nums(nums.ok_or_else(unsupported)?)
            }
        }
        Value::Object(_) => return Err(unsupported()),
    })
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Renders records one per line, each terminated by `\n`.
pub fn render_lines(records: &[Record]) -> String {
    records.iter().map(|r| r.render() + "\n").collect()
}
