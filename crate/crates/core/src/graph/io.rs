//! Edge list and Matrix Market readers.
//!
//! Both readers return the vertex count and raw edge pairs; policy about
//! self-loops (drop vs. reject) belongs to the caller, so no filtering
//! happens here.

use std::io::BufRead;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

fn parse_err(line: usize, msg: impl Into<String>) -> ReadError {
    ReadError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Reads a whitespace-separated edge list, one `source target` pair per
/// line. Lines starting with `#` and blank lines are skipped. Vertex ids
/// are nonnegative integers; the vertex count is one past the largest id.
pub fn read_edge_list<R: BufRead>(reader: R) -> Result<(usize, Vec<(usize, usize)>), ReadError> {
    let mut edges = Vec::new();
    let mut max_id = None::<usize>;
    for (ix, line) in reader.lines().enumerate() {
        let lineno = ix + 1;
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let mut fields = body.split_whitespace();
        let u = fields
            .next()
            .ok_or_else(|| parse_err(lineno, "missing source vertex"))?;
        let v = fields
            .next()
            .ok_or_else(|| parse_err(lineno, "missing target vertex"))?;
        if fields.next().is_some() {
            return Err(parse_err(lineno, "expected exactly two fields"));
        }
        let u: usize = u
            .parse()
            .map_err(|_| parse_err(lineno, format!("invalid vertex id {u:?}")))?;
        let v: usize = v
            .parse()
            .map_err(|_| parse_err(lineno, format!("invalid vertex id {v:?}")))?;
        max_id = Some(max_id.map_or(u.max(v), |m: usize| m.max(u).max(v)));
        edges.push((u, v));
    }
    Ok((max_id.map_or(0, |m| m + 1), edges))
}

/// Reads a Matrix Market file in coordinate format with the `general`
/// symmetry. Supported fields: `pattern`, `real`, `integer`. Nonzero
/// entries become edges (row index = source); explicit zeros are skipped.
/// The matrix must be square.
pub fn read_matrix_market<R: BufRead>(
    reader: R,
) -> Result<(usize, Vec<(usize, usize)>), ReadError> {
    let mut lines = reader.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(|t| t.to_lowercase()).collect();
    if tokens.len() < 4 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, "not a Matrix Market header"));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, format!("unsupported format {:?}", tokens[2])));
    }
    let field = tokens[3].as_str();
    if !matches!(field, "pattern" | "real" | "integer") {
        return Err(parse_err(1, format!("unsupported field {field:?}")));
    }
    let symmetry = tokens.get(4).map(String::as_str).unwrap_or("general");
    if symmetry != "general" {
        return Err(parse_err(1, format!("unsupported symmetry {symmetry:?}")));
    }
    let values_expected = field != "pattern";

    let mut size: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    for (ix, line) in lines {
        let lineno = ix + 1;
        let line = line?;
        let body = line.trim();
        if body.is_empty() || body.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = body.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(lineno, "size line must be `rows cols nnz`"));
                }
                let rows: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_err(lineno, "invalid row count"))?;
                let cols: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(lineno, "invalid column count"))?;
                let nnz: usize = fields[2]
                    .parse()
                    .map_err(|_| parse_err(lineno, "invalid entry count"))?;
                if rows != cols {
                    return Err(parse_err(
                        lineno,
                        format!("adjacency matrix must be square, got {rows}x{cols}"),
                    ));
                }
                size = Some((rows, cols, nnz));
                edges.reserve(nnz);
            }
            Some((rows, _, _)) => {
                let want = if values_expected { 3 } else { 2 };
                if fields.len() != want {
                    return Err(parse_err(
                        lineno,
                        format!("expected {want} fields, got {}", fields.len()),
                    ));
                }
                let i: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_err(lineno, "invalid row index"))?;
                let j: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(lineno, "invalid column index"))?;
                if i == 0 || j == 0 || i > rows || j > rows {
                    return Err(parse_err(lineno, "index outside 1..=n"));
                }
                if values_expected {
                    let val: f64 = fields[2]
                        .parse()
                        .map_err(|_| parse_err(lineno, "invalid value"))?;
                    if val == 0.0 {
                        continue;
                    }
                }
                edges.push((i - 1, j - 1));
            }
        }
    }
    let (n, _, nnz) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if edges.len() > nnz {
        return Err(parse_err(0, format!("more than {nnz} entries present")));
    }
    Ok((n, edges))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    #[test]
    fn edge_list_with_comments() {
        let text = "# a triangle\n0\t1\n\n1\t2\n2\t0\n";
        let (n, edges) = read_edge_list(Cursor::new(text)).unwrap();
        assert_eq!(n, 3);
        assert_eq!(edges, vec![(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn edge_list_reports_bad_line() {
        let text = "0\t1\nfoo\tbar\n";
        let err = read_edge_list(Cursor::new(text)).unwrap_err();
        assert!(matches!(err, ReadError::Parse { line: 2, .. }));
    }

    #[test]
    fn edge_list_empty_is_zero_vertices() {
        let (n, edges) = read_edge_list(Cursor::new("# nothing\n")).unwrap();
        assert_eq!(n, 0);
        assert!(edges.is_empty());
    }

    #[test]
    fn matrix_market_pattern() {
        let text = "%%MatrixMarket matrix coordinate pattern general\n% comment\n3 3 3\n1 2\n2 3\n3 1\n";
        let (n, edges) = read_matrix_market(Cursor::new(text)).unwrap();
        assert_eq!(n, 3);
        assert_eq!(edges, vec![(0, 1), (1, 2), (2, 0)]);
    }

    #[test]
    fn matrix_market_real_skips_zeros() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 2 1.0\n2 1 0.0\n";
        let (n, edges) = read_matrix_market(Cursor::new(text)).unwrap();
        assert_eq!(n, 2);
        assert_eq!(edges, vec![(0, 1)]);
    }

    #[test]
    fn matrix_market_rejects_rectangular() {
        let text = "%%MatrixMarket matrix coordinate pattern general\n2 3 1\n1 2\n";
        assert!(read_matrix_market(Cursor::new(text)).is_err());
    }

    #[test]
    fn matrix_market_rejects_array_format() {
        let text = "%%MatrixMarket matrix array real general\n2 2\n1.0\n";
        assert!(read_matrix_market(Cursor::new(text)).is_err());
    }

    #[test]
    fn matrix_market_rejects_one_based_violation() {
        let text = "%%MatrixMarket matrix coordinate pattern general\n2 2 1\n0 1\n";
        assert!(read_matrix_market(Cursor::new(text)).is_err());
    }
}
