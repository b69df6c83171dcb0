//! Plain-text SPD matrices: a `spd <n>` line, then `n` rows of `n`
//! space-separated values written with 17 significant digits.

use std::fmt::Write as _;

use leukocov_core::linalg::Matrix;
use leukocov_core::SpdMatrix;

/// Appends the text form of `p` to `out`.
pub fn write_spd(out: &mut String, p: &SpdMatrix) {
    let n = p.n();
    writeln!(out, "spd {n}").unwrap();
    for i in 0..n {
        let row: Vec<String> = p.matrix().row(i).iter().map(|v| format_real(*v)).collect();
        writeln!(out, "{}", row.join(" ")).unwrap();
    }
}

pub fn spd_to_string(p: &SpdMatrix) -> String {
    let mut s = String::new();
    write_spd(&mut s, p);
    s
}

/// Scientific notation with 17 significant digits; parses back to the same
/// bits.
pub fn format_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Line cursor shared by the matrix and model parsers.
pub struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    pub fn new(text: &'a str) -> Self {
        Self {
            inner: text.lines().enumerate(),
            last: 0,
        }
    }

    /// Next non-empty line, trimmed.
    pub fn next_line(&mut self) -> Result<&'a str, String> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let t = line.trim();
            if !t.is_empty() {
                return Ok(t);
            }
        }
        Err("unexpected end of file".into())
    }

    pub fn err(&self, msg: impl std::fmt::Display) -> String {
        format!("line {}: {msg}", self.last)
    }

    /// Next line as `<key> <rest>`, requiring `key`; `rest` may be empty.
    pub fn keyed(&mut self, key: &str) -> Result<&'a str, String> {
        let line = self.next_line()?;
        match line.split_once(char::is_whitespace) {
            Some((k, rest)) if k == key => Ok(rest.trim()),
            None if line == key => Ok(""),
            _ => Err(self.err(format_args!("expected `{key}`"))),
        }
    }

    pub fn keyed_parse<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, String> {
        let v = self.keyed(key)?;
        v.parse()
            .map_err(|_| self.err(format_args!("invalid value `{v}` for `{key}`")))
    }

    pub fn reals(&mut self, line: &str, count: usize) -> Result<Vec<f64>, String> {
        let vals = line
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| self.err(format_args!("invalid number `{t}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        if vals.len() != count {
            return Err(self.err(format_args!("expected {count} values, found {}", vals.len())));
        }
        Ok(vals)
    }
}

pub fn read_spd(lines: &mut Lines<'_>) -> Result<SpdMatrix, String> {
    let n: usize = lines.keyed_parse("spd")?;
    if n == 0 {
        return Err(lines.err("matrix dimension must be positive"));
    }
    let mut data = Vec::with_capacity(n * n);
    for _ in 0..n {
        let line = lines.next_line()?;
        data.extend(lines.reals(line, n)?);
    }
    let m = Matrix::from_row_major(n, data).map_err(|e| lines.err(e))?;
    SpdMatrix::new(m).map_err(|e| lines.err(e))
}

pub fn parse_spd(text: &str) -> Result<SpdMatrix, String> {
    read_spd(&mut Lines::new(text))
}
