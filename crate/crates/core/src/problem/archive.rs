//! Plain-text instance archives.
//!
//! ```text
//! tanhwf-instance 1
//! n 3
//! m 2
//! seed 42
//! signal_norm 1
//! x <n values>
//! a <n values>      (m lines, row-major)
//! y <m values>
//! ```
//!
//! Floats use Rust's shortest round-trip formatting, so reading an archive
//! reproduces the instance bit for bit.

use std::io::{BufRead, Write};

use ndarray::{Array1, Array2};

use super::ProblemInstance;
use crate::error::{Error, Result};

const MAGIC: &str = "tanhwf-instance 1";

fn write_row<W: Write>(out: &mut W, tag: &str, values: impl Iterator<Item = f64>) -> Result<()> {
    write!(out, "{tag}")?;
    for v in values {
        write!(out, " {v:?}")?;
    }
    writeln!(out)?;
    Ok(())
}

pub fn write_instance<W: Write>(inst: &ProblemInstance, mut out: W) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "n {}", inst.n())?;
    writeln!(out, "m {}", inst.m())?;
    writeln!(out, "seed {}", inst.seed())?;
    writeln!(out, "signal_norm {:?}", inst.signal_norm())?;
    write_row(&mut out, "x", inst.x().iter().copied())?;
    for row in inst.a().outer_iter() {
        write_row(&mut out, "a", row.iter().copied())?;
    }
    write_row(&mut out, "y", inst.y().iter().copied())?;
    out.flush()?;
    Ok(())
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self) -> Result<String> {
        self.line += 1;
        match self.inner.next() {
            Some(l) => Ok(l?),
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse { line: self.line, msg: msg.into() }
    }

    fn scalar<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let l = self.next_line()?;
        let mut it = l.split_whitespace();
        if it.next() != Some(key) {
            return Err(self.err(format!("expected `{key}`")));
        }
        let v = it.next().ok_or_else(|| self.err(format!("missing value for `{key}`")))?;
        v.parse().map_err(|_| self.err(format!("bad value for `{key}`: {v}")))
    }

    fn row(&mut self, tag: &str, len: usize) -> Result<Vec<f64>> {
        let l = self.next_line()?;
        let mut it = l.split_whitespace();
        if it.next() != Some(tag) {
            return Err(self.err(format!("expected `{tag}` row")));
        }
        let vals = it
            .map(|t| t.parse::<f64>().map_err(|_| self.err(format!("bad number `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != len {
            return Err(self.err(format!("`{tag}` row has {} values, expected {len}", vals.len())));
        }
        Ok(vals)
    }
}

pub fn read_instance<R: BufRead>(input: R) -> Result<ProblemInstance> {
    let mut lines = Lines { inner: input.lines(), line: 0 };
    if lines.next_line()?.trim() != MAGIC {
        return Err(lines.err("not an instance archive"));
    }
    let n: usize = lines.scalar("n")?;
    let m: usize = lines.scalar("m")?;
    let seed: u64 = lines.scalar("seed")?;
    let signal_norm: f64 = lines.scalar("signal_norm")?;
    if n == 0 || m == 0 {
        return Err(lines.err("n and m must be positive"));
    }
    let x = Array1::from(lines.row("x", n)?);
    let mut a = Vec::with_capacity(m * n);
    for _ in 0..m {
        a.extend(lines.row("a", n)?);
    }
    let a = Array2::from_shape_vec((m, n), a).expect("shape checked row by row");
    let y = Array1::from(lines.row("y", m)?);
    ProblemInstance::from_raw(a, x, y, seed, signal_norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::make_instance;
    use proptest::prelude::*;

    #[test]
    fn rejects_truncated_archive() {
        let inst = make_instance(3, 4, 1, 1.0).unwrap();
        let mut buf = Vec::new();
        write_instance(&inst, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let cut: String = text.lines().take(7).map(|l| format!("{l}\n")).collect();
        let err = read_instance(cut.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
        assert!(read_instance("garbage\n".as_bytes()).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn archive_round_trips(n in 1usize..6, m in 1usize..8, seed: u64, norm in 0.01f64..100.0) {
            let inst = make_instance(n, m, seed, norm).unwrap();
            let mut buf = Vec::new();
            write_instance(&inst, &mut buf).unwrap();
            let back = read_instance(buf.as_slice()).unwrap();
            prop_assert_eq!(back, inst);
        }
    }
}
