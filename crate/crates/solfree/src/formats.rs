//! Text formats: residue lists, edge-list graphs, rainbow instances, CSV
//! rows, and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use solfree_core::constructs::{ConstructionReport, SparseGraph};
use solfree_core::denssearch::DensityRow;
use solfree_core::rainbow::{Color, ColoredDigraph, RestrictedSystem};
use solfree_core::residues::ResidueSet;

use crate::AppError;

fn parse_error(source: &str, line: usize, message: impl Into<String>) -> AppError {
    AppError::Parse {
        origin: source.to_string(),
        line,
        message: message.into(),
    }
}

/// Meaningful lines with their 1-based numbers; `#` starts a comment.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

/// Integers separated by commas and/or whitespace.
pub fn parse_integer_list(text: &str, source: &str) -> Result<Vec<i64>, AppError> {
    let mut out = Vec::new();
    for (line, l) in content_lines(text) {
        for tok in l
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let v = tok
                .parse()
                .map_err(|_| parse_error(source, line, format!("not an integer: {tok:?}")))?;
            out.push(v);
        }
    }
    Ok(out)
}

/// Residue set from a list of integers, each reduced modulo `p`.
pub fn parse_residues(text: &str, p: u64, source: &str) -> Result<ResidueSet, AppError> {
    Ok(ResidueSet::from_integers(
        p,
        parse_integer_list(text, source)?,
    ))
}

pub fn format_residues(set: &ResidueSet) -> String {
    let parts: Vec<String> = set.iter().map(|v| v.to_string()).collect();
    parts.join(" ")
}

/// `n` on the first line, then one `u v` edge per line, vertices `1..=n`.
pub fn parse_graph(text: &str, source: &str) -> Result<SparseGraph, AppError> {
    let mut lines = content_lines(text);
    let (line, first) = lines
        .next()
        .ok_or_else(|| parse_error(source, 0, "empty graph file"))?;
    let n: usize = first
        .parse()
        .map_err(|_| parse_error(source, line, "first line must be the vertex count"))?;
    let mut edges = Vec::new();
    for (line, l) in lines {
        let nums: Vec<&str> = l.split_whitespace().collect();
        let [u, v] = nums[..] else {
            return Err(parse_error(source, line, "expected `u v`"));
        };
        let vertex = |t: &str| -> Result<usize, AppError> {
            match t.parse::<usize>() {
                Ok(x) if (1..=n).contains(&x) => Ok(x - 1),
                _ => Err(parse_error(
                    source,
                    line,
                    format!("vertex {t:?} not in 1..={n}"),
                )),
            }
        };
        edges.push((vertex(u)?, vertex(v)?));
    }
    SparseGraph::new(n, edges).map_err(|e| parse_error(source, 0, e.to_string()))
}

pub fn format_graph(g: &SparseGraph) -> String {
    let mut s = format!("{}\n", g.order());
    for &(u, v) in g.edges() {
        s.push_str(&format!("{} {}\n", u + 1, v + 1));
    }
    s
}

/// A rainbow instance file:
///
/// ```text
/// 4          # vertex count
/// ell 1      # optional bound on |f(v)|; defaults to the largest f(v)
/// digraph    # starts D_1; arcs `u v color`, vertices 1..=n
/// 1 2 10
/// digraph    # D_2
/// 2 3 11
/// f 1: 11    # forbidden colours of vertex 1
/// ```
pub fn parse_instance(text: &str, source: &str) -> Result<RestrictedSystem, AppError> {
    let mut lines = content_lines(text);
    let (line, first) = lines
        .next()
        .ok_or_else(|| parse_error(source, 0, "empty instance file"))?;
    let n: usize = first
        .parse()
        .map_err(|_| parse_error(source, line, "first line must be the vertex count"))?;
    let mut bound = None;
    let mut arc_lists: Vec<Vec<(usize, usize, Color)>> = Vec::new();
    let mut forbidden: Vec<Vec<Color>> = vec![Vec::new(); n];
    let vertex = |t: &str, line: usize| -> Result<usize, AppError> {
        match t.trim().parse::<usize>() {
            Ok(x) if (1..=n).contains(&x) => Ok(x - 1),
            _ => Err(parse_error(
                source,
                line,
                format!("vertex {t:?} not in 1..={n}"),
            )),
        }
    };
    for (line, l) in lines {
        if l == "digraph" {
            arc_lists.push(Vec::new());
        } else if let Some(rest) = l.strip_prefix("ell") {
            bound = Some(
                rest.trim()
                    .parse()
                    .map_err(|_| parse_error(source, line, "ell needs an integer"))?,
            );
        } else if let Some(rest) = l.strip_prefix('f') {
            let (v, colors) = rest
                .split_once(':')
                .ok_or_else(|| parse_error(source, line, "expected `f v: c1,c2`"))?;
            let v = vertex(v, line)?;
            for c in colors.split(',').map(str::trim).filter(|c| !c.is_empty()) {
                forbidden[v].push(
                    c.parse()
                        .map_err(|_| parse_error(source, line, format!("bad colour {c:?}")))?,
                );
            }
        } else {
            let list = arc_lists
                .last_mut()
                .ok_or_else(|| parse_error(source, line, "arc before any `digraph` line"))?;
            let parts: Vec<&str> = l.split_whitespace().collect();
            let [u, v, c] = parts[..] else {
                return Err(parse_error(source, line, "expected `u v color`"));
            };
            let c: Color = c
                .parse()
                .map_err(|_| parse_error(source, line, format!("bad colour {c:?}")))?;
            list.push((vertex(u, line)?, vertex(v, line)?, c));
        }
    }
    let digraphs = arc_lists
        .into_iter()
        .enumerate()
        .map(|(i, arcs)| {
            ColoredDigraph::new(n, arcs)
                .map_err(|e| parse_error(source, 0, format!("digraph {}: {e}", i + 1)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let bound = bound.unwrap_or_else(|| forbidden.iter().map(Vec::len).max().unwrap_or(0));
    RestrictedSystem::new(n, digraphs, forbidden, bound)
        .map_err(|e| parse_error(source, 0, e.to_string()))
}

pub const DENSITY_HEADER: [&str; 7] =
    ["eq", "p", "eps", "value", "kind", "alpha_method", "witness"];

/// One CSV record per row; failed rows carry the error in the `kind` column.
pub fn density_record(row: &DensityRow, eq: &str) -> Vec<String> {
    match &row.result {
        Ok(pt) => vec![
            eq.to_string(),
            row.p.to_string(),
            row.eps.to_string(),
            pt.value.to_string(),
            pt.kind.to_string(),
            pt.alpha.method.to_string(),
            format_residues(&pt.witness),
        ],
        Err(e) => vec![
            eq.to_string(),
            row.p.to_string(),
            row.eps.to_string(),
            String::new(),
            format!("failed: {e}"),
            String::new(),
            String::new(),
        ],
    }
}

/// `size` is `|A|`; `checked_size` is the quantity compared with
/// `size_required`, which for some constructions is a part of `A`.
pub const CONSTRUCTION_HEADER: [&str; 13] = [
    "kind",
    "eq",
    "p",
    "eps",
    "size",
    "checked_size",
    "size_required",
    "size_ok",
    "solution_free",
    "check",
    "alpha_lower",
    "alpha_upper",
    "alpha_method",
];

pub fn construction_record(r: &ConstructionReport, eps: &str) -> Vec<String> {
    vec![
        r.kind.to_string(),
        r.equation.to_string(),
        r.p.to_string(),
        eps.to_string(),
        r.set.len().to_string(),
        r.size.actual.to_string(),
        r.size.required.to_string(),
        r.size.ok.to_string(),
        r.solution_free.passed.to_string(),
        r.solution_free.method.to_string(),
        r.alpha.lower.to_string(),
        r.alpha.upper.to_string(),
        r.alpha.method.to_string(),
    ]
}

pub fn csv_bytes<I>(header: &[&str], records: I) -> Result<Vec<u8>, AppError>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| AppError::Domain(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for r in records {
        w.write_record(&r).map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| AppError::Domain(format!("csv: {}", e.error())))
}

/// Writes to a sibling temporary file, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), AppError> {
    let io = |e: std::io::Error| AppError::Io {
        path: path.to_path_buf(),
        source: e,
    };
    let mut tmp_name = path.file_name().unwrap_or_default().to_os_string();
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp: PathBuf = path.with_file_name(tmp_name);
    let mut f = fs::File::create(&tmp).map_err(io)?;
    f.write_all(bytes).map_err(io)?;
    f.sync_all().map_err(io)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io)
}

pub fn read_text(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path).map_err(|e| AppError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// `out.csv` gets `out.provenance.toml` beside it.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("provenance.toml")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_round_trip() {
        let g = parse_graph("5\n1 2\n2 3\n3 4\n4 5\n5 1\n", "t").unwrap();
        assert_eq!(g, SparseGraph::cycle(5));
        assert_eq!(parse_graph(&format_graph(&g), "t").unwrap(), g);
        assert!(parse_graph("3\n1 4\n", "t").is_err());
    }

    #[test]
    fn residue_lists() {
        let s = parse_residues("1, 2 3\n# note\n-1\n", 7, "t").unwrap();
        assert_eq!(s.as_slice(), &[1, 2, 3, 6]);
        assert_eq!(format_residues(&s), "1 2 3 6");
        assert!(parse_residues("1 x", 7, "t").is_err());
    }

    #[test]
    fn instance_parses() {
        let sys = parse_instance("3\nell 1\ndigraph\n1 2 5\n2 3 6\nf 3: 7\n", "t").unwrap();
        assert_eq!(sys.order(), 3);
        assert_eq!(sys.digraphs().len(), 1);
        assert_eq!(sys.forbidden(2), &[7]);
        assert!(parse_instance("3\n1 2 5\n", "t").is_err());
    }
}
