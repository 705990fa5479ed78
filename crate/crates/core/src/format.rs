//! Line-oriented instance files.
//!
//! ```text
//! # comment
//! LINE <a> <b>
//! MODEL original|prediction      (optional, defaults to prediction)
//! REQ <predicted> <actual> <time>
//! ```
//!
//! Numbers are decimals (`2.5`) or fractions (`5/2`). Serialization writes
//! canonical fractions, so `parse(serialize(x)) == x` holds exactly.

use std::fmt::Write as _;

use thiserror::Error;

use crate::instance::{check_request, Instance, InstanceError, LineSegment, Model, Request};
use crate::scalar::{parse_scalar, Scalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: {source}")]
    Number { line: usize, source: ScalarError },
    #[error("line {line}: {source}")]
    Invalid { line: usize, source: InstanceError },
    #[error("missing LINE header")]
    MissingLine,
    #[error("no REQ lines")]
    NoRequests,
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let mut line_segment: Option<LineSegment> = None;
    let mut model = Model::Prediction;
    let mut requests = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let lineno = index + 1;
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let malformed = |message: String| FormatError::Malformed { line: lineno, message };
        let number = |token: &str| parse_scalar(token).map_err(|source| FormatError::Number { line: lineno, source });
        let fields: Vec<&str> = content.split_whitespace().collect();
        match fields[0] {
            "LINE" => {
                if line_segment.is_some() {
                    return Err(malformed("duplicate LINE header".into()));
                }
                if fields.len() != 3 {
                    return Err(malformed(format!("expected `LINE <a> <b>`, got `{content}`")));
                }
                let segment = LineSegment::new(number(fields[1])?, number(fields[2])?)
                    .map_err(|source| FormatError::Invalid { line: lineno, source })?;
                line_segment = Some(segment);
            }
            "MODEL" => {
                model = match fields.get(1..) {
                    Some(["original"]) => Model::Original,
                    Some(["prediction"]) => Model::Prediction,
                    _ => return Err(malformed(format!("expected `MODEL original|prediction`, got `{content}`"))),
                };
            }
            "REQ" => {
                let Some(segment) = &line_segment else {
                    return Err(malformed("REQ before LINE header".into()));
                };
                if fields.len() != 4 {
                    return Err(malformed(format!("expected `REQ <predicted> <actual> <time>`, got `{content}`")));
                }
                let request = Request::new(requests.len(), number(fields[1])?, number(fields[2])?, number(fields[3])?);
                check_request(segment, &request).map_err(|source| FormatError::Invalid { line: lineno, source })?;
                requests.push(request);
            }
            other => return Err(malformed(format!("unknown directive `{other}`"))),
        }
    }

    let line_segment = line_segment.ok_or(FormatError::MissingLine)?;
    if requests.is_empty() {
        return Err(FormatError::NoRequests);
    }
    Instance::new(line_segment, requests, model).map_err(|source| FormatError::Invalid { line: 0, source })
}

fn render(value: &Scalar) -> String {
    value.to_string()
}

pub fn serialize_instance(instance: &Instance) -> String {
    let mut out = String::new();
    let line = instance.line();
    let _ = writeln!(out, "LINE {} {}", render(line.left()), render(line.right()));
    if instance.model() == Model::Original {
        out.push_str("MODEL original\n");
    }
    for request in instance.requests() {
        let _ = writeln!(
            out,
            "REQ {} {} {}",
            render(&request.predicted),
            render(&request.actual),
            render(&request.arrival)
        );
    }
    out
}
