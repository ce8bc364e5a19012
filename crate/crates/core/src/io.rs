//! Matrix and graph file formats.
//!
//! A matrix file starts with `<r> <m>` followed by `r` rows of `m` integers.
//! An optional `# elements: f1 f2 ...` line names the columns; other `#`
//! text is a comment. A graph file has one `tail head [name]` edge per line.

use crate::chains::GroundSet;
use crate::error::{Error, Result};
use crate::matroid::{GraphEdge, RegularMatroid, TuCheck};

const ELEMENTS_HEADER: &str = "elements:";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixFile {
    pub elements: Option<Vec<String>>,
    pub rows: Vec<Vec<i64>>,
    pub ncols: usize,
}

impl MatrixFile {
    pub fn ground(&self) -> Result<GroundSet> {
        match &self.elements {
            Some(names) => GroundSet::new(names.iter().cloned()),
            None => GroundSet::indexed(self.ncols),
        }
    }

    pub fn matroid(&self, check: TuCheck) -> Result<RegularMatroid> {
        matroid_from_rows(self.ground()?, self.rows.clone(), check)
    }
}

/// Like [`RegularMatroid::from_matrix_with`], but zero rows give the rank-0
/// matroid on `ground`.
pub fn matroid_from_rows(ground: GroundSet, rows: Vec<Vec<i64>>, check: TuCheck) -> Result<RegularMatroid> {
    if rows.is_empty() {
        if ground.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        return Ok(RegularMatroid::from_full_rank(ground, Vec::new()));
    }
    RegularMatroid::from_matrix_with(ground, rows, check)
}

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

pub fn parse_matrix(text: &str) -> Result<MatrixFile> {
    let mut elements = None;
    let mut shape: Option<(usize, usize)> = None;
    let mut rows = Vec::new();
    let mut last_line = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        last_line = line_no;
        if let Some(comment) = raw.trim().strip_prefix('#') {
            if let Some(names) = comment.trim().strip_prefix(ELEMENTS_HEADER) {
                if elements.is_some() {
                    return Err(Error::parse(line_no, "duplicate elements header"));
                }
                elements = Some(names.split_whitespace().map(str::to_string).collect::<Vec<_>>());
            }
            continue;
        }
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let numbers = line
            .split_whitespace()
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::parse(line_no, format!("not an integer: {t}")))
            })
            .collect::<Result<Vec<_>>>()?;
        match shape {
            None => match numbers.as_slice() {
                &[r, m] if r >= 0 && m >= 0 => shape = Some((r as usize, m as usize)),
                _ => return Err(Error::parse(line_no, "expected `<rows> <columns>`")),
            },
            Some((r, m)) => {
                if rows.len() == r {
                    return Err(Error::parse(line_no, format!("more than {r} rows")));
                }
                if numbers.len() != m {
                    return Err(Error::parse(
                        line_no,
                        format!("expected {m} entries, found {}", numbers.len()),
                    ));
                }
                rows.push(numbers);
            }
        }
    }
    let (r, m) = shape.ok_or_else(|| Error::parse(last_line.max(1), "missing `<rows> <columns>` line"))?;
    if rows.len() != r {
        return Err(Error::parse(
            last_line.max(1),
            format!("expected {r} rows, found {}", rows.len()),
        ));
    }
    if let Some(names) = &elements {
        if names.len() != m {
            return Err(Error::parse(
                1,
                format!("{} element names for {m} columns", names.len()),
            ));
        }
    }
    Ok(MatrixFile {
        elements,
        rows,
        ncols: m,
    })
}

pub fn format_matrix(m: &RegularMatroid) -> String {
    let rows = m.matrix().rows();
    let mut out = format!(
        "# {ELEMENTS_HEADER} {}\n{} {}\n",
        m.ground().names().join(" "),
        rows.len(),
        m.len()
    );
    for row in rows {
        out.push_str(&row.iter().map(i64::to_string).collect::<Vec<_>>().join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Vec<GraphEdge>> {
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            [tail, head] => edges.push(GraphEdge::new(*tail, *head, None)),
            [tail, head, name] => edges.push(GraphEdge::new(*tail, *head, Some(name))),
            _ => return Err(Error::parse(i + 1, "expected `tail head [name]`")),
        }
    }
    if edges.is_empty() {
        return Err(Error::parse(1, "no edges"));
    }
    Ok(edges)
}
