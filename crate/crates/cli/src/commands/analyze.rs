//! Factor diagnostics: departure from normality before and after scaling,
//! condition estimates and striping.

use scilu_core::factor::{
    condition_estimate, striping_report, IluFactors, IluParams, IluVariant,
};
use scilu_core::{CsrMatrix, TriangularShape};

use super::{csv, num};
use crate::CliError;

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyzeRow {
    pub matrix: String,
    pub variant: IluVariant,
    pub droptol: f64,
    pub lfill: usize,
    pub nnz_l: usize,
    pub nnz_u: usize,
    pub dep_l: f64,
    pub dep_u: f64,
    /// `dep(D⁻¹U)`.
    pub dep_u_row: f64,
    /// `dep(D_r U D_c)`.
    pub dep_u_rowcol: f64,
    pub cond_l: f64,
    pub cond_u: f64,
    pub striped_cols: usize,
}

pub fn analyze(
    name: &str,
    a: &CsrMatrix,
    params: &IluParams,
    striping_threshold: f64,
) -> Result<AnalyzeRow, CliError> {
    let f = IluFactors::compute(a, params)?;
    let row = f.row_scale_u()?;
    let rowcol = f.row_col_scale_u()?;
    Ok(AnalyzeRow {
        matrix: name.to_string(),
        variant: params.variant,
        droptol: params.droptol,
        lfill: params.lfill,
        nnz_l: f.nnz_l(),
        nnz_u: f.nnz_u(),
        dep_l: f.dep_l(),
        dep_u: f.dep_u(),
        dep_u_row: row.dep_u(),
        dep_u_rowcol: rowcol.dep_u(),
        cond_l: condition_estimate(f.l(), TriangularShape::UnitLower)?,
        cond_u: condition_estimate(f.u(), TriangularShape::Upper)?,
        striped_cols: striping_report(&f, striping_threshold).flagged.len(),
    })
}

pub const HEADER: &[&str] = &[
    "matrix", "variant", "droptol", "lfill", "nnzL", "nnzU", "depL", "depU", "depUrow",
    "depUrowcol", "condL", "condU", "striped_cols",
];

pub fn to_csv(rows: &[AnalyzeRow]) -> String {
    csv(
        HEADER,
        rows.iter().map(|r| {
            vec![
                r.matrix.clone(),
                match r.variant {
                    IluVariant::Ilu0 => "ilu0".into(),
                    IluVariant::Ilut => "ilut".into(),
                },
                num(r.droptol),
                r.lfill.to_string(),
                r.nnz_l.to_string(),
                r.nnz_u.to_string(),
                num(r.dep_l),
                num(r.dep_u),
                num(r.dep_u_row),
                num(r.dep_u_rowcol),
                num(r.cond_l),
                num(r.cond_u),
                r.striped_cols.to_string(),
            ]
        }),
    )
}
