//! Experiment drivers. Each returns plain data; rendering to CSV, text or
//! JSON is separate so the acceptance tests can inspect results directly.

pub mod analyze;
pub mod bench_trisolve;
pub mod gen;
pub mod schur_solve;
pub mod solve;

/// Formats a float for CSV output: shortest round-trip representation in
/// scientific notation, which keeps files byte-identical across runs.
pub(crate) fn num(v: f64) -> String {
    format!("{v:e}")
}

pub(crate) fn csv<I, R>(header: &[&str], rows: I) -> String
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        let cells: Vec<String> = r.into_iter().map(quote).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Quotes a cell holding a comma, quote or newline.
fn quote(cell: String) -> String {
    if cell.contains([',', '"', '\n']) {
        format!("\"{}\"", cell.replace('"', "\"\""))
    } else {
        cell
    }
}
