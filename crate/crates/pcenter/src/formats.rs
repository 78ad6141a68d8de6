//! Text instance formats.
//!
//! OR-Library `pmed` files: a header `n e p` followed by `e` edge lines
//! `u v w` with 1-based vertices. Matrix files: a header `N M p` followed by
//! `N` lines of `M` nonnegative integers. In matrix files everything after a
//! `#` is ignored. Blank lines are ignored in both.

use std::fmt::Write as _;

use pcenter_core::instance::{Distance, Edge, GraphInstance, Instance, InstanceError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    /// 1-based line number; 0 when the error concerns the whole input.
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError { line, message: message.into() }
    }
}

fn content_lines(text: &str, strip_comments: bool) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(move |(idx, line)| {
        let line = if strip_comments { line.split('#').next().unwrap_or("") } else { line };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        (!tokens.is_empty()).then_some((idx + 1, tokens))
    })
}

fn parse_count(line: usize, what: &str, token: &str) -> Result<usize, ParseError> {
    token.parse().map_err(|_| ParseError::new(line, format!("{what} `{token}` is not a nonnegative integer")))
}

fn parse_distance(line: usize, token: &str) -> Result<Distance, ParseError> {
    if token.starts_with('-') {
        return Err(ParseError::new(line, format!("negative weight `{token}`")));
    }
    token.parse().map_err(|_| ParseError::new(line, format!("non-numeric entry `{token}`")))
}

fn header<'a>(
    lines: &mut impl Iterator<Item = (usize, Vec<&'a str>)>,
    names: [&str; 3],
) -> Result<(usize, [usize; 3]), ParseError> {
    let (line, tokens) = lines.next().ok_or_else(|| ParseError::new(0, "empty input"))?;
    if tokens.len() != 3 {
        return Err(ParseError::new(
            line,
            format!(
                "malformed header: expected `{} {} {}`, found {} fields",
                names[0],
                names[1],
                names[2],
                tokens.len()
            ),
        ));
    }
    let mut values = [0; 3];
    for (slot, (name, token)) in values.iter_mut().zip(names.iter().zip(&tokens)) {
        *slot = parse_count(line, name, token)?;
    }
    Ok((line, values))
}

/// Parses an OR-Library `pmed` graph file.
pub fn parse_orlib(text: &str) -> Result<GraphInstance, ParseError> {
    let mut lines = content_lines(text, false);
    let (header_line, [n, e, p]) = header(&mut lines, ["n", "e", "p"])?;
    let mut edges = Vec::with_capacity(e);
    let mut last_line = header_line;
    for (line, tokens) in lines.by_ref().take(e) {
        last_line = line;
        if tokens.len() != 3 {
            return Err(ParseError::new(line, format!("expected `u v w`, found {} fields", tokens.len())));
        }
        let u = parse_count(line, "vertex", tokens[0])?;
        let v = parse_count(line, "vertex", tokens[1])?;
        let weight = parse_distance(line, tokens[2])?;
        if u == 0 || v == 0 || u > n || v > n {
            return Err(ParseError::new(line, format!("vertex index out of range: ({u}, {v}) with {n} vertices")));
        }
        if u == v {
            return Err(ParseError::new(line, format!("self loop on vertex {u}")));
        }
        edges.push(Edge { u, v, weight });
    }
    if edges.len() < e {
        return Err(ParseError::new(last_line, format!("expected {e} edges, found {}", edges.len())));
    }
    if let Some((line, _)) = lines.next() {
        return Err(ParseError::new(line, format!("more than the {e} declared edges")));
    }
    GraphInstance::new(n, edges, p).map_err(|err| ParseError::new(header_line, err.to_string()))
}

/// Parses a distance matrix file.
pub fn parse_matrix(text: &str) -> Result<Instance, ParseError> {
    let mut lines = content_lines(text, true);
    let (header_line, [n, m, p]) = header(&mut lines, ["N", "M", "p"])?;
    let mut distances = Vec::with_capacity(n * m);
    let mut last_line = header_line;
    for (row, (line, tokens)) in lines.by_ref().take(n).enumerate() {
        last_line = line;
        if tokens.len() != m {
            return Err(ParseError::new(line, format!("row {} has {} of {m} expected entries", row + 1, tokens.len())));
        }
        for token in tokens {
            distances.push(parse_distance(line, token)?);
        }
    }
    if distances.len() < n * m {
        let found = distances.len() / m.max(1);
        return Err(ParseError::new(last_line, format!("expected {n} rows, found {found}")));
    }
    if let Some((line, _)) = lines.next() {
        return Err(ParseError::new(line, format!("more than the {n} declared rows")));
    }
    Instance::new(n, m, p, distances).map_err(|err: InstanceError| ParseError::new(header_line, err.to_string()))
}

/// Serializes `inst` in the matrix format read by [`parse_matrix`].
pub fn write_matrix(inst: &Instance) -> String {
    let mut out = format!("{} {} {}\n", inst.n_clients(), inst.n_facilities(), inst.p());
    for row in inst.rows() {
        let mut first = true;
        for d in row {
            if !first {
                out.push(' ');
            }
            first = false;
            write!(out, "{d}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceFormat {
    Orlib,
    Matrix,
}

impl InstanceFormat {
    /// `.txt` files are assumed to be OR-Library graphs, anything else a matrix.
    pub fn guess(path: &std::path::Path) -> InstanceFormat {
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.starts_with("pmed") || path.extension().is_some_and(|e| e == "txt") {
            InstanceFormat::Orlib
        } else {
            InstanceFormat::Matrix
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Graph { path: String, source: InstanceError },
}

/// Reads and parses an instance file, converting graphs to distance matrices.
pub fn load_instance(path: &std::path::Path, format: InstanceFormat) -> Result<Instance, LoadError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io { path: shown.clone(), source })?;
    match format {
        InstanceFormat::Matrix => parse_matrix(&text).map_err(|source| LoadError::Parse { path: shown, source }),
        InstanceFormat::Orlib => {
            let graph = parse_orlib(&text).map_err(|source| LoadError::Parse { path: shown.clone(), source })?;
            pcenter_core::instance::graph_to_instance(&graph).map_err(|source| LoadError::Graph { path: shown, source })
        }
    }
}
