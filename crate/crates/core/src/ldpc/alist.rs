//! MacKay's alist interchange format for sparse parity-check matrices.
//!
//! ```text
//! n m
//! max_col_weight max_row_weight
//! <n column weights>
//! <m row weights>
//! <n lines: 1-based row indices of each column, 0-padded>
//! <m lines: 1-based column indices of each row, 0-padded>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::LdpcCode;
use crate::{Error, Result};

pub fn to_alist(code: &LdpcCode) -> String {
    let (n, m) = (code.n(), code.checks().len());
    let max_col = code.vars().iter().map(Vec::len).max().unwrap_or(0);
    let max_row = code.checks().iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "{n} {m}");
    let _ = writeln!(out, "{max_col} {max_row}");
    let join = |it: &mut dyn Iterator<Item = usize>| {
        it.map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(out, "{}", join(&mut code.vars().iter().map(Vec::len)));
    let _ = writeln!(out, "{}", join(&mut code.checks().iter().map(Vec::len)));
    for (lists, width) in [(code.vars(), max_col), (code.checks(), max_row)] {
        for list in lists {
            let mut entries: Vec<usize> = list.iter().map(|&i| i + 1).collect();
            entries.resize(width, 0);
            let _ = writeln!(out, "{}", join(&mut entries.into_iter()));
        }
    }
    out
}

pub fn parse_alist(text: &str, source_name: &str) -> Result<LdpcCode> {
    let err = |msg: String| Error::Parse {
        source_name: source_name.to_string(),
        message: msg,
    };
    let mut numbers = text.split_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|e| err(format!("bad integer `{t}`: {e}")))
    });
    let mut next = |what: &str| -> Result<usize> {
        numbers
            .next()
            .ok_or_else(|| err(format!("unexpected end of file reading {what}")))?
    };
    let n = next("n")?;
    let m = next("m")?;
    let max_col = next("max column weight")?;
    let max_row = next("max row weight")?;
    let col_weights = (0..n).map(|_| next("column weights")).collect::<Result<Vec<_>>>()?;
    let row_weights = (0..m).map(|_| next("row weights")).collect::<Result<Vec<_>>>()?;

    let mut col_lists = Vec::with_capacity(n);
    for (c, &w) in col_weights.iter().enumerate() {
        let mut list = Vec::with_capacity(w);
        for slot in 0..max_col {
            let v = next("column lists")?;
            if slot < w {
                if v == 0 || v > m {
                    return Err(err(format!("column {} lists row {v} outside 1..={m}", c + 1)));
                }
                list.push(v - 1);
            }
        }
        col_lists.push(list);
    }
    let mut checks = Vec::with_capacity(m);
    for (r, &w) in row_weights.iter().enumerate() {
        let mut list = Vec::with_capacity(w);
        for slot in 0..max_row {
            let v = next("row lists")?;
            if slot < w {
                if v == 0 || v > n {
                    return Err(err(format!("row {} lists column {v} outside 1..={n}", r + 1)));
                }
                list.push(v - 1);
            }
        }
        checks.push(list);
    }

    // both orientations must describe the same matrix
    let mut from_cols = vec![Vec::new(); m];
    for (c, rows) in col_lists.iter().enumerate() {
        for &r in rows {
            from_cols[r].push(c);
        }
    }
    for (r, (a, b)) in from_cols.iter_mut().zip(checks.iter()).enumerate() {
        a.sort_unstable();
        let mut b = b.clone();
        b.sort_unstable();
        if *a != b {
            return Err(err(format!("row {} disagrees with the column lists", r + 1)));
        }
    }
    LdpcCode::from_checks(n, checks)
}

pub fn write_alist_file(path: &Path, code: &LdpcCode) -> Result<()> {
    std::fs::write(path, to_alist(code)).map_err(|e| Error::io(path, e))
}

pub fn read_alist_file(path: &Path) -> Result<LdpcCode> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_alist(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::build_regular_code;

    #[test]
    fn round_trip_preserves_matrix() {
        let code = build_regular_code(60, 30, 2).unwrap();
        let text = to_alist(&code);
        let back = parse_alist(&text, "mem").unwrap();
        assert_eq!(back.checks(), code.checks());
        assert_eq!(back.info_positions(), code.info_positions());
        assert_eq!(to_alist(&back), text);
    }

    #[test]
    fn header_layout() {
        let code = build_regular_code(8, 4, 2).unwrap();
        let text = to_alist(&code);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "8 4");
        assert_eq!(lines[1], "3 6");
        assert_eq!(lines[2], "3 3 3 3 3 3 3 3");
        assert_eq!(lines[3], "6 6 6 6");
        assert_eq!(lines.len(), 4 + 8 + 4);
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_alist("8 4\n3", "x").is_err());
        // inconsistent orientations
        let bad = "4 2\n1 2\n1 1 1 1\n2 2\n1\n1\n2\n2\n1 3\n2 4\n";
        assert!(parse_alist(bad, "x").is_err());
        assert!(parse_alist("2 1\n1 2\n1 1\nx 1\n", "x").is_err());
    }
}
