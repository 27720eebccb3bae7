use std::io::{BufRead, Write};

use super::matrix::SparseHermitianMatrix;
use crate::error::{Error, Result};
use crate::fock::dimension;

/// Writes `# N=<N> m=<m> M=<M>`, a `row,col,imag_value` header and one
/// line per stored entry, 0-based, row-major.
pub fn write_csv<W: Write>(
    h: &SparseHermitianMatrix,
    n_vars: usize,
    cap: usize,
    mut out: W,
) -> Result<()> {
    writeln!(out, "# N={n_vars} m={cap} M={}", h.dim())?;
    writeln!(out, "row,col,imag_value")?;
    for (r, c, v) in h.triplets() {
        writeln!(out, "{r},{c},{v:.16e}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads what [`write_csv`] writes; returns `(N, m, H)`.
pub fn read_csv<R: BufRead>(input: R) -> Result<(usize, usize, SparseHermitianMatrix)> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))??;
    let (n_vars, cap, dim) = parse_header(&header)?;
    let expected = dimension(n_vars, cap)?;
    if expected != dim as u64 {
        return Err(Error::Parse(format!(
            "header says M={dim}, but N={n_vars} m={cap} gives {expected}"
        )));
    }
    let mut triplets = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (k == 0 && line == "row,col,imag_value") {
            continue;
        }
        let bad = || Error::Parse(format!("malformed matrix line {:?}", line));
        let mut parts = line.split(',');
        let r: usize = parts
            .next()
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        let c: usize = parts
            .next()
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        let v: f64 = parts
            .next()
            .ok_or_else(bad)?
            .trim()
            .parse()
            .map_err(|_| bad())?;
        if parts.next().is_some() {
            return Err(bad());
        }
        triplets.push((r, c, v));
    }
    Ok((
        n_vars,
        cap,
        SparseHermitianMatrix::from_triplets(dim, &triplets)?,
    ))
}

fn parse_header(line: &str) -> Result<(usize, usize, usize)> {
    let bad = || {
        Error::Parse(format!(
            "matrix header must be '# N=<N> m=<m> M=<M>', got {line:?}"
        ))
    };
    let rest = line.strip_prefix('#').ok_or_else(bad)?;
    let mut fields = [None; 3];
    for tok in rest.split_whitespace() {
        let (key, val) = tok.split_once('=').ok_or_else(bad)?;
        let slot = match key {
            "N" => 0,
            "m" => 1,
            "M" => 2,
            _ => return Err(bad()),
        };
        fields[slot] = Some(val.parse::<usize>().map_err(|_| bad())?);
    }
    match fields {
        [Some(n), Some(m), Some(dim)] => Ok((n, m, dim)),
        _ => Err(bad()),
    }
}
