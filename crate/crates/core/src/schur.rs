//! ILUT Schur-complement smoother on a simulated block-row partition.
//!
//! Rows are split into `p` contiguous blocks standing in for parallel ranks.
//! Rows coupled to another block form the interface; the rest are interior.
//! In the permuted ordering (interiors first) the matrix reads
//! `[[B, E], [F, C]]` with `B` block diagonal. One smoothing step solves the
//! interface system `S y = g - F B⁻¹ f`, `S = C - F B⁻¹ E`, with a single
//! GMRES iteration and recovers the interiors by back-substitution.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::factor::{IluFactors, IluParams};
use crate::smoother::{build_ilu, Scaling};
use crate::trisolve::{apply_factors, TriSolveConfig, TriSolveMode};
use crate::vector::{dot, two_norm};
use crate::{CsrMatrix, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchurConfig {
    pub blocks: usize,
    pub ilut: IluParams,
    pub trisolve: TriSolveConfig,
    pub scaling: Scaling,
}

impl Default for SchurConfig {
    fn default() -> Self {
        SchurConfig {
            blocks: 1,
            ilut: IluParams::ilut(1e-3, 20),
            trisolve: TriSolveConfig::richardson(18, 31),
            scaling: Scaling::Row,
        }
    }
}

impl SchurConfig {
    pub fn validate(&self) -> Result<()> {
        if self.blocks == 0 {
            return Err(Error::InvalidParameter("schur.blocks must be >= 1".into()));
        }
        self.ilut.validate()?;
        self.trisolve.validate()?;
        if self.trisolve.mode == TriSolveMode::Richardson && self.scaling == Scaling::None {
            return Err(Error::InvalidParameter(
                "Richardson upper solves need a row or row/col scaled U".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SchurPartition {
    n: usize,
    block_ranges: Vec<Range<usize>>,
    interior: Vec<usize>,
    interface: Vec<usize>,
    /// Positions in `interior` owned by each block.
    block_interior: Vec<Range<usize>>,
    b_blocks: Vec<CsrMatrix>,
    e: CsrMatrix,
    f: CsrMatrix,
    c: CsrMatrix,
    /// `perm[new] = old`: interiors block by block, then the interface.
    perm: Vec<usize>,
}

/// Splits the rows of `a` into `p` contiguous blocks and assembles the
/// interior/interface blocks.
pub fn partition(a: &CsrMatrix, p: usize) -> Result<SchurPartition> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "schur partition",
            nrows: a.nrows(),
            ncols: a.ncols(),
        });
    }
    let n = a.nrows();
    if p == 0 || p > n {
        return Err(Error::InvalidParameter(alloc::format!(
            "block count {p} must lie in 1..={n}"
        )));
    }
    let size = n / p;
    let block_ranges: Vec<Range<usize>> = (0..p)
        .map(|k| k * size..if k + 1 == p { n } else { (k + 1) * size })
        .collect();
    let mut owner = vec![0usize; n];
    for (k, r) in block_ranges.iter().enumerate() {
        owner[r.clone()].fill(k);
    }

    let mut is_interface = vec![false; n];
    for (i, j, _) in a.triplets() {
        if owner[i] != owner[j] {
            is_interface[i] = true;
            is_interface[j] = true;
        }
    }

    let mut interior = Vec::new();
    let mut block_interior = Vec::with_capacity(p);
    for r in &block_ranges {
        let start = interior.len();
        interior.extend(r.clone().filter(|&i| !is_interface[i]));
        block_interior.push(start..interior.len());
    }
    let interface: Vec<usize> = (0..n).filter(|&i| is_interface[i]).collect();

    let mut interior_pos = vec![None; n];
    for (k, &i) in interior.iter().enumerate() {
        interior_pos[i] = Some(k);
    }
    let mut interface_pos = vec![None; n];
    for (k, &i) in interface.iter().enumerate() {
        interface_pos[i] = Some(k);
    }

    let b_blocks = block_interior
        .iter()
        .map(|r| {
            let rows = &interior[r.clone()];
            let local: Vec<Option<usize>> = interior_pos
                .iter()
                .map(|pos| pos.filter(|q| r.contains(q)).map(|q| q - r.start))
                .collect();
            a.extract(rows, &local, rows.len())
        })
        .collect();
    let e = a.extract(&interior, &interface_pos, interface.len());
    let f = a.extract(&interface, &interior_pos, interior.len());
    let c = a.extract(&interface, &interface_pos, interface.len());

    let mut perm = interior.clone();
    perm.extend_from_slice(&interface);
    Ok(SchurPartition {
        n,
        block_ranges,
        interior,
        interface,
        block_interior,
        b_blocks,
        e,
        f,
        c,
        perm,
    })
}

impl SchurPartition {
    pub fn blocks(&self) -> usize {
        self.block_ranges.len()
    }

    pub fn block_ranges(&self) -> &[Range<usize>] {
        &self.block_ranges
    }

    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn interface(&self) -> &[usize] {
        &self.interface
    }

    pub fn b_blocks(&self) -> &[CsrMatrix] {
        &self.b_blocks
    }

    pub fn e(&self) -> &CsrMatrix {
        &self.e
    }

    pub fn f(&self) -> &CsrMatrix {
        &self.f
    }

    pub fn c(&self) -> &CsrMatrix {
        &self.c
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// `[[B, E], [F, C]]` in the permuted ordering.
    pub fn reassemble(&self) -> CsrMatrix {
        let ni = self.interior.len();
        let mut t = Vec::new();
        for (blk, r) in self.b_blocks.iter().zip(&self.block_interior) {
            t.extend(blk.triplets().map(|(i, j, v)| (i + r.start, j + r.start, v)));
        }
        t.extend(self.e.triplets().map(|(i, j, v)| (i, j + ni, v)));
        t.extend(self.f.triplets().map(|(i, j, v)| (i + ni, j, v)));
        t.extend(self.c.triplets().map(|(i, j, v)| (i + ni, j + ni, v)));
        CsrMatrix::from_triplets_with(self.n, self.n, t, crate::sparse::Zeros::Keep)
            .expect("block indices are in range")
    }

    /// `A` with rows and columns reordered by `perm`.
    pub fn permute(&self, a: &CsrMatrix) -> CsrMatrix {
        let mut inv = vec![None; self.n];
        for (new, &old) in self.perm.iter().enumerate() {
            inv[old] = Some(new);
        }
        a.extract(&self.perm, &inv, self.n)
    }
}

/// Partition plus per-block factors, built once per level.
#[derive(Clone, Debug)]
pub struct SchurSmoother {
    part: SchurPartition,
    factors: Vec<IluFactors>,
    trisolve: TriSolveConfig,
}

impl SchurSmoother {
    pub fn build(a: &CsrMatrix, cfg: &SchurConfig) -> Result<Self> {
        cfg.validate()?;
        let part = partition(a, cfg.blocks)?;
        Self::from_partition(part, &cfg.ilut, cfg.scaling, cfg.trisolve)
    }

    pub fn from_partition(
        part: SchurPartition,
        ilu: &IluParams,
        scaling: Scaling,
        trisolve: TriSolveConfig,
    ) -> Result<Self> {
        let factors = part
            .b_blocks
            .iter()
            .filter(|b| b.nrows() > 0)
            .map(|b| build_ilu(b, ilu, scaling))
            .collect::<Result<Vec<_>>>()?;
        log::debug!(
            "schur partition: {} blocks, {} interior, {} interface rows",
            part.blocks(),
            part.interior.len(),
            part.interface.len()
        );
        Ok(SchurSmoother {
            part,
            factors,
            trisolve,
        })
    }

    pub fn partition(&self) -> &SchurPartition {
        &self.part
    }

    /// `B⁻¹ f` through the per-block factors.
    pub fn apply_b_inv(&self, f: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; f.len()];
        let blocks = self.part.block_interior.iter().filter(|r| !r.is_empty());
        for (r, fac) in blocks.zip(&self.factors) {
            let z = apply_factors(fac, &self.trisolve, &f[r.clone()])?;
            out[r.clone()].copy_from_slice(&z);
        }
        Ok(out)
    }

    /// `S v = C v - F B⁻¹ (E v)` without forming `S`.
    pub fn apply_s(&self, v: &[f64]) -> Result<Vec<f64>> {
        let ev = self.part.e.spmv(v)?;
        let w = self.apply_b_inv(&ev)?;
        let fw = self.part.f.spmv(&w)?;
        let mut s = self.part.c.spmv(v)?;
        for (si, fi) in s.iter_mut().zip(&fw) {
            *si -= fi;
        }
        Ok(s)
    }

    /// One GMRES iteration on `S y = g` from `y = 0`.
    pub fn interface_step(&self, g: &[f64]) -> Result<Vec<f64>> {
        let beta = two_norm(g);
        if beta == 0.0 {
            return Ok(vec![0.0; g.len()]);
        }
        let v: Vec<f64> = g.iter().map(|x| x / beta).collect();
        let mut w = self.apply_s(&v)?;
        let h11 = dot(&v, &w);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= h11 * vi;
        }
        let h21 = two_norm(&w);
        let denom = h11 * h11 + h21 * h21;
        if denom == 0.0 {
            log::debug!("schur interface GMRES breakdown, S g = 0; skipping interface update");
            return Ok(vec![0.0; g.len()]);
        }
        let y1 = beta * h11 / denom;
        Ok(v.iter().map(|vi| y1 * vi).collect())
    }

    /// Update `dx` (original ordering) for the residual `r`.
    pub fn correction(&self, r: &[f64]) -> Result<Vec<f64>> {
        let part = &self.part;
        let f: Vec<f64> = part.interior.iter().map(|&i| r[i]).collect();
        let g: Vec<f64> = part.interface.iter().map(|&i| r[i]).collect();
        let y = if part.interface.is_empty() {
            Vec::new()
        } else {
            let h = self.apply_b_inv(&f)?;
            let fh = part.f.spmv(&h)?;
            let gt: Vec<f64> = g.iter().zip(&fh).map(|(gi, fi)| gi - fi).collect();
            self.interface_step(&gt)?
        };
        let mut rhs = f;
        if !y.is_empty() {
            let ey = part.e.spmv(&y)?;
            for (ri, ei) in rhs.iter_mut().zip(&ey) {
                *ri -= ei;
            }
        }
        let xi = self.apply_b_inv(&rhs)?;
        let mut dx = vec![0.0; part.n];
        for (&i, v) in part.interior.iter().zip(&xi) {
            dx[i] = *v;
        }
        for (&i, v) in part.interface.iter().zip(&y) {
            dx[i] = *v;
        }
        Ok(dx)
    }

    /// `x += correction(b - A x)`.
    pub fn apply(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64]) -> Result<()> {
        let r = a.residual(b, x)?;
        let dx = self.correction(&r)?;
        for (xi, d) in x.iter_mut().zip(&dx) {
            *xi += d;
        }
        Ok(())
    }
}

/// One Schur-complement smoothing step with freshly built block factors.
pub fn schur_smooth(
    a: &CsrMatrix,
    part: &SchurPartition,
    b: &[f64],
    x: &mut [f64],
    ilu: &IluParams,
    trisolve: &TriSolveConfig,
) -> Result<()> {
    if a.nrows() != part.n {
        return Err(Error::DimensionMismatch {
            op: "schur_smooth",
            expected: part.n,
            found: a.nrows(),
        });
    }
    let scaling = match trisolve.mode {
        TriSolveMode::Direct => Scaling::None,
        TriSolveMode::Richardson => Scaling::Row,
    };
    SchurSmoother::from_partition(part.clone(), ilu, scaling, *trisolve)?.apply(a, b, x)
}
