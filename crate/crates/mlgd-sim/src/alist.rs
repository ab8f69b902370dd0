//! Non-binary alist files.
//!
//! Layout: `N M q` / `max_col_wt max_row_wt` / the N column weights / the M
//! row weights / N column blocks of "row_index value" pairs (1-based indices,
//! values in 1..q-1) / M row blocks of "col_index value" pairs. Blocks may be
//! exact or padded with "0 0" pairs up to the declared maxima; a 0 index is
//! unambiguous padding because real indices are 1-based. Column and row
//! blocks must describe the same matrix.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use mlgd::{Field, Gf, MatrixError, ParityCheckMatrix};

#[derive(Debug)]
pub enum AlistError {
    Io(io::Error),
    Parse { line: usize, message: String },
}

impl fmt::Display for AlistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlistError::Io(e) => write!(f, "i/o error: {e}"),
            AlistError::Parse { line, message } => write!(f, "line {line}: {message}"),
        }
    }
}

impl std::error::Error for AlistError {}

impl From<io::Error> for AlistError {
    fn from(e: io::Error) -> Self {
        AlistError::Io(e)
    }
}

fn parse_err<T>(line: usize, message: impl Into<String>) -> Result<T, AlistError> {
    Err(AlistError::Parse { line, message: message.into() })
}

/// Whitespace tokens annotated with their 1-based line numbers.
struct Tokens<'a> {
    items: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Tokens<'a> {
        let mut items = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            for tok in line.split_whitespace() {
                items.push((idx + 1, tok));
            }
        }
        Tokens { items, pos: 0 }
    }

    fn last_line(&self) -> usize {
        self.items.last().map_or(1, |&(l, _)| l)
    }

    fn peek(&self) -> Option<(usize, &'a str)> {
        self.items.get(self.pos).copied()
    }

    fn next_u64(&mut self, what: &str) -> Result<(usize, u64), AlistError> {
        match self.items.get(self.pos) {
            None => parse_err(self.last_line(), format!("unexpected end of file, expected {what}")),
            Some(&(line, tok)) => {
                self.pos += 1;
                match tok.parse::<u64>() {
                    Ok(v) => Ok((line, v)),
                    Err(_) => parse_err(line, format!("expected {what}, found {tok:?}")),
                }
            }
        }
    }
}

/// Parses alist text into a matrix.
pub fn parse_alist(text: &str) -> Result<ParityCheckMatrix, AlistError> {
    let mut t = Tokens::new(text);
    let (line_n, n) = t.next_u64("column count N")?;
    let (_, m) = t.next_u64("row count M")?;
    let (line_q, q) = t.next_u64("field order q")?;
    if n == 0 || m == 0 {
        return parse_err(line_n, "dimensions must be positive");
    }
    if q < 2 || !q.is_power_of_two() || q > (1 << 16) {
        return parse_err(line_q, format!("field order {q} is not a power of two in 2..=65536"));
    }
    let r = q.trailing_zeros();
    let field = match Field::new(r) {
        Ok(f) => f,
        Err(e) => return parse_err(line_q, format!("cannot build GF({q}): {e}")),
    };
    let (n, m) = (n as usize, m as usize);

    let (_, max_col) = t.next_u64("maximum column weight")?;
    let (_, max_row) = t.next_u64("maximum row weight")?;

    let mut col_wt = Vec::with_capacity(n);
    for j in 0..n {
        let (line, w) = t.next_u64(&format!("weight of column {}", j + 1))?;
        if w > max_col {
            return parse_err(line, format!("column {} weight {w} exceeds declared maximum {max_col}", j + 1));
        }
        col_wt.push(w as usize);
    }
    let mut row_wt = Vec::with_capacity(m);
    for i in 0..m {
        let (line, w) = t.next_u64(&format!("weight of row {}", i + 1))?;
        if w > max_row {
            return parse_err(line, format!("row {} weight {w} exceeds declared maximum {max_row}", i + 1));
        }
        row_wt.push(w as usize);
    }
    if col_wt.iter().sum::<usize>() != row_wt.iter().sum::<usize>() {
        return parse_err(line_n, "column weights and row weights sum differently");
    }

    let read_block = |t: &mut Tokens,
                      weight: usize,
                      max_weight: u64,
                      index_bound: usize,
                      block_kind: &str,
                      block_no: usize|
     -> Result<Vec<(usize, Gf)>, AlistError> {
        let mut pairs = Vec::with_capacity(weight);
        for k in 0..weight {
            let (line, idx) = t.next_u64("entry index")?;
            if idx == 0 {
                return parse_err(
                    line,
                    format!("{block_kind} {block_no} declares weight {weight} but provides only {k} entries"),
                );
            }
            if idx as usize > index_bound {
                return parse_err(line, format!("index {idx} out of range 1..={index_bound}"));
            }
            let (vline, value) = t.next_u64("entry value")?;
            if value == 0 || value >= q {
                return parse_err(vline, format!("value {value} outside 1..={}", q - 1));
            }
            pairs.push((idx as usize - 1, Gf(value as u16)));
        }
        // optional "0 0" padding up to the declared maximum
        let mut padded = weight as u64;
        while padded < max_weight {
            match t.peek() {
                Some((_, "0")) => {
                    let _ = t.next_u64("padding index")?;
                    let (vline, v) = t.next_u64("padding value")?;
                    if v != 0 {
                        return parse_err(vline, format!("padding entry must be \"0 0\", found value {v}"));
                    }
                    padded += 1;
                }
                _ => break,
            }
        }
        Ok(pairs)
    };

    let mut entries: Vec<(usize, usize, Gf)> = Vec::new();
    for j in 0..n {
        for (i, v) in read_block(&mut t, col_wt[j], max_col, m, "column block", j + 1)? {
            entries.push((i, j, v));
        }
    }
    let mut row_entries: Vec<(usize, usize, Gf)> = Vec::new();
    for i in 0..m {
        for (j, v) in read_block(&mut t, row_wt[i], max_row, n, "row block", i + 1)? {
            row_entries.push((i, j, v));
        }
    }

    let mut a = entries.clone();
    let mut b = row_entries;
    a.sort_unstable_by_key(|&(i, j, _)| (i, j));
    b.sort_unstable_by_key(|&(i, j, _)| (i, j));
    if a != b {
        return parse_err(t.last_line(), "column blocks and row blocks describe different matrices");
    }

    ParityCheckMatrix::from_entries(field, m, n, &entries).map_err(|e| match e {
        MatrixError::DuplicatePosition { row, col } => AlistError::Parse {
            line: t.last_line(),
            message: format!("duplicate entry at row {}, column {}", row + 1, col + 1),
        },
        other => AlistError::Parse { line: t.last_line(), message: other.to_string() },
    })
}

pub fn load_alist(path: impl AsRef<Path>) -> Result<ParityCheckMatrix, AlistError> {
    let text = fs::read_to_string(path)?;
    parse_alist(&text)
}

/// Serializes with exact (unpadded) blocks.
pub fn write_alist(h: &ParityCheckMatrix, mut w: impl Write) -> io::Result<()> {
    let n = h.n_cols();
    let m = h.n_rows();
    writeln!(w, "{} {} {}", n, m, h.field().order())?;
    let col_w: Vec<usize> = (0..n).map(|j| h.col_weight(j)).collect();
    let row_w: Vec<usize> = (0..m).map(|i| h.row_weight(i)).collect();
    writeln!(
        w,
        "{} {}",
        col_w.iter().max().copied().unwrap_or(0),
        row_w.iter().max().copied().unwrap_or(0)
    )?;
    writeln!(w, "{}", join(&col_w))?;
    writeln!(w, "{}", join(&row_w))?;
    for j in 0..n {
        let (rows, vals, _) = h.col(j);
        let pairs: Vec<String> =
            rows.iter().zip(vals).map(|(&i, v)| format!("{} {}", i + 1, v.0)).collect();
        writeln!(w, "{}", pairs.join(" "))?;
    }
    for i in 0..m {
        let (cols, vals) = h.row(i);
        let pairs: Vec<String> =
            cols.iter().zip(vals).map(|(&j, v)| format!("{} {}", j + 1, v.0)).collect();
        writeln!(w, "{}", pairs.join(" "))?;
    }
    Ok(())
}

pub fn save_alist(h: &ParityCheckMatrix, path: impl AsRef<Path>) -> io::Result<()> {
    let mut buf = Vec::new();
    write_alist(h, &mut buf)?;
    fs::write(path, buf)
}

fn join(values: &[usize]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}
