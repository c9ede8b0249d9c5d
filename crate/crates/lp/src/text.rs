//! Line-based text form of an [`LpProblem`], meant for eyeballing and diffs.
//!
//! ```text
//! sense max
//! vars 2
//! obj 0:1 1:1
//! bound 1 -inf 4
//! row cap <= 1 : 0:1 1:1
//! ```
//!
//! `bound` lines appear only for variables whose bounds differ from
//! `[0, inf)`. Blank lines and lines starting with `#` are ignored. Numbers
//! are written with Rust's shortest round-trip formatting, so
//! `parse(&dump(p))` reproduces `p` exactly (labels have whitespace
//! replaced by `_`).

use std::fmt::Write as _;

use thiserror::Error;

use crate::problem::{LpProblem, RowKind, Sense};

#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

fn terms(out: &mut String, coeffs: impl Iterator<Item = (usize, f64)>) {
    for (j, c) in coeffs {
        let _ = write!(out, " {j}:{}", num(c));
    }
}

pub fn dump(p: &LpProblem) -> String {
    let mut out = String::new();
    let sense = match p.sense {
        Sense::Maximize => "max",
        Sense::Minimize => "min",
    };
    let _ = writeln!(out, "sense {sense}");
    let _ = writeln!(out, "vars {}", p.n_vars());
    out.push_str("obj");
    terms(&mut out, p.objective.iter().copied().enumerate().filter(|&(_, c)| c != 0.0));
    out.push('\n');
    for (j, (&lo, &hi)) in p.lower.iter().zip(&p.upper).enumerate() {
        if lo != 0.0 || hi != f64::INFINITY {
            let _ = writeln!(out, "bound {j} {} {}", num(lo), num(hi));
        }
    }
    for row in &p.rows {
        let label: String = row.label.chars().map(|c| if c.is_whitespace() { '_' } else { c }).collect();
        let label = if label.is_empty() { "_".to_string() } else { label };
        let _ = write!(out, "row {label} {} {} :", row.kind.symbol(), num(row.rhs));
        terms(&mut out, row.coeffs.iter().copied());
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> Result<LpProblem, ParseError> {
    let mut problem: Option<LpProblem> = None;
    let mut sense = Sense::Maximize;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let err = |message: String| ParseError { line: line_no, message };
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut words = line.split_whitespace();
        let head = words.next().unwrap_or_default();
        let parse_f = |s: &str| -> Result<f64, ParseError> {
            match s {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                _ => s.parse().map_err(|_| err(format!("bad number `{s}`"))),
            }
        };
        let parse_term = |s: &str| -> Result<(usize, f64), ParseError> {
            let (j, c) = s.split_once(':').ok_or_else(|| err(format!("bad term `{s}`")))?;
            let j = j.parse().map_err(|_| err(format!("bad index `{j}`")))?;
            Ok((j, parse_f(c)?))
        };
        match head {
            "sense" => {
                sense = match words.next() {
                    Some("max") => Sense::Maximize,
                    Some("min") => Sense::Minimize,
                    other => return Err(err(format!("bad sense {other:?}"))),
                }
            }
            "vars" => {
                let n = words.next().and_then(|w| w.parse().ok()).ok_or_else(|| err("bad variable count".into()))?;
                problem = Some(LpProblem::new(sense, n));
            }
            _ => {
                let p = problem.as_mut().ok_or_else(|| err("`vars` must come first".into()))?;
                match head {
                    "obj" => {
                        for w in words {
                            let (j, c) = parse_term(w)?;
                            *p.objective.get_mut(j).ok_or_else(|| err(format!("index {j} out of range")))? = c;
                        }
                    }
                    "bound" => {
                        let parts: Vec<&str> = words.collect();
                        if parts.len() != 3 {
                            return Err(err("bound needs index, lower, upper".into()));
                        }
                        let j: usize = parts[0].parse().map_err(|_| err("bad index".into()))?;
                        if j >= p.n_vars() {
                            return Err(err(format!("index {j} out of range")));
                        }
                        p.set_bounds(j, parse_f(parts[1])?, parse_f(parts[2])?);
                    }
                    "row" => {
                        let label = words.next().ok_or_else(|| err("missing label".into()))?;
                        let kind = match words.next() {
                            Some("<=") => RowKind::Le,
                            Some("=") => RowKind::Eq,
                            Some(">=") => RowKind::Ge,
                            other => return Err(err(format!("bad relation {other:?}"))),
                        };
                        let rhs = parse_f(words.next().ok_or_else(|| err("missing rhs".into()))?)?;
                        if words.next() != Some(":") {
                            return Err(err("expected `:` before terms".into()));
                        }
                        let coeffs = words.map(parse_term).collect::<Result<Vec<_>, _>>()?;
                        p.add_row(label, coeffs, kind, rhs);
                    }
                    other => return Err(err(format!("unknown directive `{other}`"))),
                }
            }
        }
    }
    problem.ok_or(ParseError { line: 0, message: "no `vars` line".into() })
}
