//! Text formats for answers: solution lines and certificate blocks.
//!
//! ```text
//! x 1 2              # x <vertex> <p/q|inf>, 1-indexed
//! x 2 -7/3
//!
//! cert bicycle       # or `cert neg-unit-gain`
//! c_le 3: 4 5        # <role> <start vertex>: <edge ids>, 1-indexed
//! c_ge 1: 2
//! path 1: 1 3
//! ```

use m2vpi::{Certificate, ExtRational, Graph, Walk};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub message: String,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, FormatError> {
    Err(FormatError { line, message: message.into() })
}

pub fn write_solution(x: &[ExtRational]) -> String {
    x.iter().enumerate().map(|(v, val)| format!("x {} {}\n", v + 1, val)).collect()
}

fn write_walk(role: &str, w: &Walk) -> String {
    let ids: Vec<String> = w.edges().iter().map(|id| (id + 1).to_string()).collect();
    format!("{role} {}: {}\n", w.start() + 1, ids.join(" ")).replace(": \n", ":\n")
}

pub fn write_certificate(cert: &Certificate) -> String {
    let mut out = format!("cert {}\n", cert.kind());
    match cert {
        Certificate::NegUnitGain(c) => out.push_str(&write_walk("cycle", c)),
        Certificate::NegBicycle { c_le, c_ge, path } => {
            out.push_str(&write_walk("c_le", c_le));
            out.push_str(&write_walk("c_ge", c_ge));
            out.push_str(&write_walk("path", path));
        }
    }
    out
}

/// What a solver printed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Solution(Vec<ExtRational>),
    Certificate(Certificate),
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, raw)| (i + 1, raw.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn index(line: usize, tok: &str, limit: usize, what: &str) -> Result<usize, FormatError> {
    match tok.parse::<usize>() {
        Ok(i) if (1..=limit).contains(&i) => Ok(i - 1),
        _ => fail(line, format!("bad {what} `{tok}` (expected 1..={limit})")),
    }
}

/// Reads either answer format against the instance it belongs to.
pub fn parse_answer(g: &Graph, text: &str) -> Result<Answer, FormatError> {
    let mut lines = content_lines(text).peekable();
    let Some(&(first_no, first)) = lines.peek() else {
        return fail(0, "empty answer");
    };
    if let Some(kind) = first.strip_prefix("cert ") {
        lines.next();
        let mut walks: Vec<(String, Walk)> = Vec::new();
        for (no, l) in lines {
            let Some((head, ids)) = l.split_once(':') else {
                return fail(no, "walk line must be `<role> <start>: <edge ids>`");
            };
            let mut head = head.split_whitespace();
            let (Some(role), Some(start), None) = (head.next(), head.next(), head.next()) else {
                return fail(no, "walk line must be `<role> <start>: <edge ids>`");
            };
            let start = index(no, start, g.n(), "vertex")?;
            let edges = ids
                .split_whitespace()
                .map(|t| index(no, t, g.m(), "edge id"))
                .collect::<Result<Vec<_>, _>>()?;
            let walk = Walk::from_edges(g, start, edges).map_err(|e| FormatError { line: no, message: e.to_string() })?;
            walks.push((role.to_string(), walk));
        }
        let mut take = |role: &str| {
            walks
                .iter()
                .position(|(r, _)| r == role)
                .map(|i| walks.remove(i).1)
                .ok_or_else(|| FormatError { line: first_no, message: format!("missing `{role}` walk") })
        };
        let cert = match kind.trim() {
            "neg-unit-gain" => Certificate::NegUnitGain(take("cycle")?),
            "bicycle" => Certificate::NegBicycle { c_le: take("c_le")?, c_ge: take("c_ge")?, path: take("path")? },
            other => return fail(first_no, format!("unknown certificate kind `{other}`")),
        };
        if let Some((role, _)) = walks.first() {
            return fail(first_no, format!("unexpected `{role}` walk"));
        }
        return Ok(Answer::Certificate(cert));
    }
    let mut x: Vec<Option<ExtRational>> = vec![None; g.n()];
    for (no, l) in lines {
        let toks: Vec<&str> = l.split_whitespace().collect();
        let [tag, v, val] = toks[..] else {
            return fail(no, "solution line must be `x <vertex> <value>`");
        };
        if tag != "x" {
            return fail(no, format!("expected `x`, found `{tag}`"));
        }
        let v = index(no, v, g.n(), "vertex")?;
        let val: ExtRational = val.parse().map_err(|e| FormatError { line: no, message: format!("{e}") })?;
        if x[v].replace(val).is_some() {
            return fail(no, format!("vertex {} given twice", v + 1));
        }
    }
    match x.iter().position(Option::is_none) {
        Some(v) => fail(0, format!("no value for vertex {}", v + 1)),
        None => Ok(Answer::Solution(x.into_iter().map(Option::unwrap).collect())),
    }
}
