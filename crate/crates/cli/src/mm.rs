//! Matrix Market coordinate files.
//!
//! Reads `real` and `integer` matrices in `general`, `symmetric` and
//! `skew-symmetric` storage. Symmetric storage is expanded, duplicate
//! entries are summed and explicitly stored zeros are kept, so the pattern
//! seen by ILU(0) is the one in the file. Writes `coordinate real general`
//! with shortest round-trip float formatting.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use scilu_core::sparse::Zeros;
use scilu_core::CsrMatrix;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

pub fn read_path(path: impl AsRef<Path>) -> Result<CsrMatrix, CliError> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let f = File::open(path).map_err(|e| CliError::io(&name, e))?;
    read(BufReader::new(f), &name)
}

/// Parses a Matrix Market stream; `name` labels error messages.
pub fn read<R: Read>(reader: R, name: &str) -> Result<CsrMatrix, CliError> {
    let err = |line: usize, msg: String| CliError::MatrixMarket {
        path: name.to_string(),
        line,
        msg,
    };
    let mut lines = BufReader::new(reader).lines().enumerate().map(|(k, l)| (k + 1, l));
    let mut next = |what: &str| -> Result<Option<(usize, String)>, CliError> {
        match lines.next() {
            None => Ok(None),
            Some((k, Ok(l))) => Ok(Some((k, l))),
            Some((k, Err(e))) => Err(err(k, format!("reading {what}: {e}"))),
        }
    };

    let (_, header) = next("header")?.ok_or_else(|| err(1, "empty file".into()))?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(err(1, format!("not a Matrix Market matrix header: `{header}`")));
    }
    if tokens[2] != "coordinate" {
        return Err(err(1, format!("only coordinate format is supported, found `{}`", tokens[2])));
    }
    match tokens[3].as_str() {
        "real" | "integer" => {}
        other => return Err(err(1, format!("unsupported field `{other}` (need real or integer)"))),
    }
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(err(1, format!("unsupported symmetry `{other}`"))),
    };

    let (size_line, size) = loop {
        let (k, l) = next("size line")?.ok_or_else(|| err(1, "missing size line".into()))?;
        let t = l.trim();
        if !t.is_empty() && !t.starts_with('%') {
            break (k, t.to_string());
        }
    };
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|s| s.parse().map_err(|_| err(size_line, format!("bad size line `{size}`"))))
        .collect::<Result<_, _>>()?;
    let [nrows, ncols, nnz] = dims[..] else {
        return Err(err(size_line, format!("size line needs three integers, got `{size}`")));
    };
    if symmetry != Symmetry::General && nrows != ncols {
        return Err(err(size_line, "symmetric storage needs a square matrix".into()));
    }

    let mut triplets = Vec::with_capacity(if symmetry == Symmetry::General { nnz } else { 2 * nnz });
    let mut seen = 0;
    while let Some((k, l)) = next("entries")? {
        let t = l.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let mut it = t.split_whitespace();
        let (Some(i), Some(j), Some(v), None) = (it.next(), it.next(), it.next(), it.next()) else {
            return Err(err(k, format!("expected `row col value`, got `{t}`")));
        };
        let i: usize = i.parse().map_err(|_| err(k, format!("bad row index `{i}`")))?;
        let j: usize = j.parse().map_err(|_| err(k, format!("bad column index `{j}`")))?;
        let v: f64 = v.parse().map_err(|_| err(k, format!("bad value `{v}`")))?;
        if i == 0 || j == 0 || i > nrows || j > ncols {
            return Err(err(k, format!("entry ({i}, {j}) outside {nrows}x{ncols}")));
        }
        let (i, j) = (i - 1, j - 1);
        match symmetry {
            Symmetry::General => triplets.push((i, j, v)),
            Symmetry::Symmetric | Symmetry::SkewSymmetric => {
                if j > i {
                    return Err(err(k, "symmetric storage must list the lower triangle".into()));
                }
                triplets.push((i, j, v));
                if i != j {
                    let w = if symmetry == Symmetry::Symmetric { v } else { -v };
                    triplets.push((j, i, w));
                }
            }
        }
        seen += 1;
    }
    if seen != nnz {
        return Err(err(size_line, format!("size line announces {nnz} entries, file has {seen}")));
    }
    Ok(CsrMatrix::from_triplets_with(nrows, ncols, triplets, Zeros::Keep)?)
}

pub fn write<W: Write>(a: &CsrMatrix, out: W) -> std::io::Result<()> {
    let mut w = BufWriter::new(out);
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(w, "{} {} {v:?}", i + 1, j + 1)?;
    }
    w.flush()
}

pub fn write_path(a: &CsrMatrix, path: impl AsRef<Path>) -> Result<(), CliError> {
    let path = path.as_ref();
    let name = path.display().to_string();
    let f = File::create(path).map_err(|e| CliError::io(&name, e))?;
    write(a, f).map_err(|e| CliError::io(name, e))
}
