//! Reader and writer for the alist sparse binary matrix exchange format.
//!
//! Layout: a `n m` dimensions line (columns then rows), the two maximum
//! degrees, the per-column and per-row degree lists, then the 1-based
//! neighbor lists, each padded with zeros to the maximum degree.

use std::io::{BufRead, Write};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlistError {
    #[error("alist: {0}")]
    Malformed(String),
    #[error("alist: io: {0}")]
    Io(#[from] std::io::Error),
}

/// Sparse binary matrix as read from an alist file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlistMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Per row, the sorted 0-based column indices of its ones.
    pub row_adj: Vec<Vec<u32>>,
}

/// Writes a sparse binary matrix given its per-row column lists.
pub fn write_alist<W: Write>(mut w: W, cols: usize, row_adj: &[Vec<u32>]) -> std::io::Result<()> {
    let rows = row_adj.len();
    let mut col_adj: Vec<Vec<u32>> = vec![Vec::new(); cols];
    for (i, row) in row_adj.iter().enumerate() {
        for &j in row {
            col_adj[j as usize].push(i as u32);
        }
    }
    let max_col = col_adj.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = row_adj.iter().map(Vec::len).max().unwrap_or(0);
    writeln!(w, "{cols} {rows}")?;
    writeln!(w, "{max_col} {max_row}")?;
    let degrees = |lists: &[Vec<u32>]| {
        lists
            .iter()
            .map(|l| l.len().to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    writeln!(w, "{}", degrees(&col_adj))?;
    writeln!(w, "{}", degrees(row_adj))?;
    let write_padded = |w: &mut W, lists: &[Vec<u32>], width: usize| -> std::io::Result<()> {
        for list in lists {
            let mut items: Vec<String> = list.iter().map(|&x| (x + 1).to_string()).collect();
            items.resize(width, "0".to_string());
            writeln!(w, "{}", items.join(" "))?;
        }
        Ok(())
    };
    write_padded(&mut w, &col_adj, max_col)?;
    write_padded(&mut w, row_adj, max_row)?;
    Ok(())
}

/// Parses an alist file, cross-checking the column and row lists.
pub fn read_alist<R: BufRead>(reader: R) -> Result<AlistMatrix, AlistError> {
    let mut tokens = Vec::new();
    for line in reader.lines() {
        let line = line?;
        tokens.extend(
            line.split_whitespace()
                .map(|t| {
                    t.parse::<u64>()
                        .map_err(|_| AlistError::Malformed(format!("bad token {t:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?,
        );
    }
    let mut it = tokens.into_iter();
    let mut next = |what: &str| {
        it.next()
            .ok_or_else(|| AlistError::Malformed(format!("unexpected end of file reading {what}")))
    };
    let cols = next("column count")? as usize;
    let rows = next("row count")? as usize;
    let max_col = next("max column degree")? as usize;
    let max_row = next("max row degree")? as usize;
    let col_deg: Vec<usize> = (0..cols)
        .map(|_| next("column degree").map(|v| v as usize))
        .collect::<Result<_, _>>()?;
    let row_deg: Vec<usize> = (0..rows)
        .map(|_| next("row degree").map(|v| v as usize))
        .collect::<Result<_, _>>()?;
    if col_deg.iter().any(|&d| d > max_col) || row_deg.iter().any(|&d| d > max_row) {
        return Err(AlistError::Malformed("degree exceeds declared maximum".into()));
    }
    let mut col_adj: Vec<Vec<u32>> = Vec::with_capacity(cols);
    for &d in &col_deg {
        let mut list = Vec::with_capacity(d);
        for k in 0..max_col {
            let v = next("column neighbor")?;
            if k < d {
                if v == 0 || v > rows as u64 {
                    return Err(AlistError::Malformed(format!("row index {v} out of range")));
                }
                list.push((v - 1) as u32);
            } else if v != 0 {
                return Err(AlistError::Malformed("nonzero padding".into()));
            }
        }
        col_adj.push(list);
    }
    let mut row_adj: Vec<Vec<u32>> = Vec::with_capacity(rows);
    for &d in &row_deg {
        let mut list = Vec::with_capacity(d);
        for k in 0..max_row {
            let v = next("row neighbor")?;
            if k < d {
                if v == 0 || v > cols as u64 {
                    return Err(AlistError::Malformed(format!("column index {v} out of range")));
                }
                list.push((v - 1) as u32);
            } else if v != 0 {
                return Err(AlistError::Malformed("nonzero padding".into()));
            }
        }
        row_adj.push(list);
    }
    // the two lists must describe the same matrix
    let mut derived: Vec<Vec<u32>> = vec![Vec::new(); rows];
    for (j, list) in col_adj.iter().enumerate() {
        for &i in list {
            derived[i as usize].push(j as u32);
        }
    }
    let mut row_adj_sorted = row_adj;
    for (a, b) in derived.iter_mut().zip(row_adj_sorted.iter_mut()) {
        a.sort_unstable();
        b.sort_unstable();
        if a != b {
            return Err(AlistError::Malformed(
                "row and column neighbor lists disagree".into(),
            ));
        }
    }
    Ok(AlistMatrix {
        rows,
        cols,
        row_adj: row_adj_sorted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_small_matrix() {
        let row_adj = vec![vec![0u32, 1, 2], vec![1, 2, 3, 4], vec![2, 4, 5]];
        let mut buf = Vec::new();
        write_alist(&mut buf, 6, &row_adj).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("6 3\n3 4\n"));
        let back = read_alist(&buf[..]).unwrap();
        assert_eq!(back.cols, 6);
        assert_eq!(back.rows, 3);
        assert_eq!(back.row_adj, row_adj);
    }

    #[test]
    fn exact_layout() {
        let row_adj = vec![vec![0u32, 1], vec![1]];
        let mut buf = Vec::new();
        write_alist(&mut buf, 2, &row_adj).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let expected = "2 2\n2 2\n1 2\n2 1\n1 0\n1 2\n1 2\n2 0\n";
        assert_eq!(text, expected);
    }

    #[test]
    fn rejects_inconsistent_lists() {
        let bad = "2 1\n1 2\n1 1\n2\n1\n1\n1 0\n";
        assert!(read_alist(bad.as_bytes()).is_err());
    }
}
