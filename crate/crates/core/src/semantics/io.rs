//! Line-oriented model files.
//!
//! ```text
//! domain 2
//! concept A: 1
//! role Q: (0,1) (1,1)
//! ind a = 0
//! ```

use std::fmt::Write;

use thiserror::Error;

use super::Model;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("model file line {line}: {message}")]
pub struct ModelFormatError {
    pub line: usize,
    pub message: String,
}

/// Renders `m`; every section and extension is sorted ascending.
pub fn write_model(m: &Model) -> String {
    let mut out = String::new();
    writeln!(out, "domain {}", m.domain_size).unwrap();
    for (name, ext) in &m.concepts {
        write!(out, "concept {name}:").unwrap();
        for e in ext {
            write!(out, " {e}").unwrap();
        }
        out.push('\n');
    }
    for (name, ext) in &m.roles {
        write!(out, "role {name}:").unwrap();
        for (x, y) in ext {
            write!(out, " ({x},{y})").unwrap();
        }
        out.push('\n');
    }
    for (name, e) in &m.individuals {
        writeln!(out, "ind {name} = {e}").unwrap();
    }
    out
}

pub fn parse_model(text: &str) -> Result<Model, ModelFormatError> {
    let mut m: Option<Model> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: &str| ModelFormatError {
            line,
            message: message.to_string(),
        };
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        let (head, rest) = l.split_once(' ').unwrap_or((l, ""));
        if head == "domain" {
            if m.is_some() {
                return Err(err("duplicate domain line"));
            }
            let n = rest.trim().parse().map_err(|_| err("bad domain size"))?;
            m = Some(Model::new(n));
            continue;
        }
        let model = m.as_mut().ok_or_else(|| err("expected `domain n` first"))?;
        match head {
            "concept" => {
                let (name, elems) = rest.split_once(':').ok_or_else(|| err("missing `:`"))?;
                let ext = model.concepts.entry(name.trim().to_string()).or_default();
                for tok in elems.split_whitespace() {
                    ext.insert(tok.parse().map_err(|_| err("bad element"))?);
                }
            }
            "role" => {
                let (name, pairs) = rest.split_once(':').ok_or_else(|| err("missing `:`"))?;
                let ext = model.roles.entry(name.trim().to_string()).or_default();
                for tok in pairs.split_whitespace() {
                    let pair = tok
                        .strip_prefix('(')
                        .and_then(|t| t.strip_suffix(')'))
                        .and_then(|t| t.split_once(','))
                        .ok_or_else(|| err("bad pair"))?;
                    let x = pair.0.trim().parse().map_err(|_| err("bad element"))?;
                    let y = pair.1.trim().parse().map_err(|_| err("bad element"))?;
                    ext.insert((x, y));
                }
            }
            "ind" => {
                let (name, e) = rest.split_once('=').ok_or_else(|| err("missing `=`"))?;
                let e = e.trim().parse().map_err(|_| err("bad element"))?;
                model.individuals.insert(name.trim().to_string(), e);
            }
            _ => return Err(err("unknown line kind")),
        }
    }
    let model = m.ok_or(ModelFormatError {
        line: 0,
        message: "missing `domain n` line".to_string(),
    })?;
    model.validate().map_err(|e| ModelFormatError {
        line: 0,
        message: e.to_string(),
    })?;
    Ok(model)
}
