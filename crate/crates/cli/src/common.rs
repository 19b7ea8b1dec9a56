use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::Context;
use cyclescope::graph::io::{read_edge_list, read_matrix_market};
use cyclescope::spectral::{RootTarget, SpectralError};
use cyclescope::Digraph;
use serde_json::Value;

/// Failed commands exit 2 when a solver could not certify an answer and 3
/// on bad input; the split is decided where the error arises.
pub enum Failure {
    Input(anyhow::Error),
    Convergence(anyhow::Error),
}

impl Failure {
    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Input(e) | Failure::Convergence(e) => e,
        }
    }
}

pub fn input(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Input(e.into())
}

pub fn convergence(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Convergence(e.into())
}

/// Files ending in .mtx are Matrix Market; anything else is a
/// whitespace-separated edge list.
pub fn load_graph(path: &Path, drop_self_loops: bool) -> Result<Digraph, Failure> {
    let file = fs::File::open(path)
        .with_context(|| format!("cannot open graph file {}", path.display()))
        .map_err(Failure::Input)?;
    let reader = BufReader::new(file);
    let matrix_market = path
        .extension()
        .is_some_and(|ext| ext.eq_ignore_ascii_case("mtx"));
    let (n, mut edges) = if matrix_market {
        read_matrix_market(reader)
    } else {
        read_edge_list(reader)
    }
    .with_context(|| format!("cannot parse {}", path.display()))
    .map_err(Failure::Input)?;
    if drop_self_loops {
        edges.retain(|&(u, v)| u != v);
    }
    Digraph::from_edge_list(&edges, Some(n))
        .with_context(|| format!("invalid graph in {}", path.display()))
        .map_err(Failure::Input)
}

pub fn parse_target(s: &str) -> Result<RootTarget, Failure> {
    let parse = || -> Option<RootTarget> {
        let (p, q) = s.split_once('/')?;
        let p: u32 = p.trim().parse().ok()?;
        let q: u32 = q.trim().parse().ok()?;
        RootTarget::new(p, q).ok()
    };
    parse().ok_or_else(|| {
        input(anyhow::anyhow!(
            "invalid target {s:?}: expected a reduced fraction p/q such as 1/3"
        ))
    })
}

pub fn parse_dims(s: &str) -> Result<(usize, usize), Failure> {
    let parse = || -> Option<(usize, usize)> {
        let (a, b) = s.split_once(',')?;
        let a = a.trim().parse().ok()?;
        let b = b.trim().parse().ok()?;
        (a != b).then_some((a, b))
    };
    parse().ok_or_else(|| {
        input(anyhow::anyhow!(
            "invalid dims {s:?}: expected two distinct columns such as 3,4"
        ))
    })
}

/// Solver errors split into convergence failures (exit 2) and everything
/// else (exit 3).
pub fn classify_spectral(e: SpectralError) -> Failure {
    match e {
        SpectralError::NoConvergence { .. } | SpectralError::AmbiguousTarget { .. } => {
            convergence(e)
        }
        other => input(other),
    }
}

/// A prefix with a trailing slash is a directory; files go under it named
/// by `stem`.
pub fn effective_prefix(prefix: &str, stem: &str) -> String {
    if prefix.ends_with('/') {
        format!("{prefix}{stem}")
    } else {
        prefix.to_string()
    }
}

pub fn write_text(path: &Path, content: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("cannot create directory {}", parent.display()))
                .map_err(Failure::Input)?;
        }
    }
    fs::write(path, content)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::Input)
}

pub fn write_json(path: &Path, doc: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(doc).map_err(input)?;
    text.push('\n');
    write_text(path, &text)
}

pub fn read_json(path: &Path) -> Result<Value, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(Failure::Input)?;
    serde_json::from_str(&text)
        .with_context(|| format!("invalid JSON in {}", path.display()))
        .map_err(Failure::Input)
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".to_string())
}

pub fn with_suffix(prefix: &str, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{prefix}.{suffix}"))
}
