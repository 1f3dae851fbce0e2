//! C/F splittings.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Reverse;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::CsrMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PointType {
    Coarse,
    Fine,
}

/// Point classification plus the coarse numbering it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfSplit {
    kind: Vec<PointType>,
    coarse_index: Vec<Option<usize>>,
    n_coarse: usize,
}

impl CfSplit {
    pub fn new(kind: Vec<PointType>) -> Self {
        let mut n_coarse = 0;
        let coarse_index = kind
            .iter()
            .map(|k| {
                (*k == PointType::Coarse).then(|| {
                    n_coarse += 1;
                    n_coarse - 1
                })
            })
            .collect();
        CfSplit {
            kind,
            coarse_index,
            n_coarse,
        }
    }

    pub fn len(&self) -> usize {
        self.kind.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kind.is_empty()
    }

    pub fn n_coarse(&self) -> usize {
        self.n_coarse
    }

    pub fn kind(&self, i: usize) -> PointType {
        self.kind[i]
    }

    pub fn is_coarse(&self, i: usize) -> bool {
        self.kind[i] == PointType::Coarse
    }

    pub fn kinds(&self) -> &[PointType] {
        &self.kind
    }

    /// Coarse-level index of point `i`, if it is a C-point.
    pub fn coarse_index(&self, i: usize) -> Option<usize> {
        self.coarse_index[i]
    }

    pub fn coarse_points(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(|&i| self.is_coarse(i))
    }
}

/// Promotes every F-point without a strong C-neighbour to C. Returns the
/// number of promoted points.
pub fn repair(s: &CsrMatrix, kind: &mut [PointType]) -> usize {
    let mut promoted = 0;
    for i in 0..kind.len() {
        if kind[i] == PointType::Fine && !s.row(i).0.iter().any(|&j| kind[j] == PointType::Coarse) {
            kind[i] = PointType::Coarse;
            promoted += 1;
        }
    }
    if promoted > 0 {
        log::debug!("coarsening repair promoted {promoted} points to C");
    }
    promoted
}

/// Classical Ruge-Stüben first pass.
///
/// The measure of a point is the number of points strongly depending on it;
/// the largest measure becomes C (lowest index on ties), its undecided strong
/// dependents become F, and the neighbours of new F-points gain weight.
pub fn coarsen_rs_greedy(s: &CsrMatrix) -> CfSplit {
    let n = s.nrows();
    let st = s.transpose();
    let mut measure: Vec<usize> = (0..n).map(|i| st.row(i).0.len()).collect();
    let mut kind: Vec<Option<PointType>> = vec![None; n];
    let mut heap: BinaryHeap<(usize, Reverse<usize>)> =
        (0..n).map(|i| (measure[i], Reverse(i))).collect();

    while let Some((m, Reverse(i))) = heap.pop() {
        if kind[i].is_some() || m != measure[i] {
            continue;
        }
        kind[i] = Some(PointType::Coarse);
        for &j in st.row(i).0 {
            if kind[j].is_some() {
                continue;
            }
            kind[j] = Some(PointType::Fine);
            for &k in s.row(j).0 {
                if kind[k].is_none() {
                    measure[k] += 1;
                    heap.push((measure[k], Reverse(k)));
                }
            }
        }
        for &k in s.row(i).0 {
            if kind[k].is_none() && measure[k] > 0 {
                measure[k] -= 1;
                heap.push((measure[k], Reverse(k)));
            }
        }
    }
    let mut kind: Vec<PointType> = kind.into_iter().map(|k| k.expect("every point decided")).collect();
    repair(s, &mut kind);
    CfSplit::new(kind)
}

/// Parallel modified independent set.
///
/// Weights are `|S^T_i|` plus a seeded jitter in `[0, 1)`. Points with no
/// strong couplings at all become C. Each round selects undecided points
/// whose weight beats every undecided neighbour in `S + S^T`, then turns
/// their undecided strong dependents into F.
pub fn coarsen_pmis(s: &CsrMatrix, seed: u64) -> CfSplit {
    let n = s.nrows();
    let st = s.transpose();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let weight: Vec<f64> = (0..n)
        .map(|i| st.row(i).0.len() as f64 + rng.random::<f64>())
        .collect();
    let mut kind: Vec<Option<PointType>> = vec![None; n];
    for i in 0..n {
        if s.row(i).0.is_empty() && st.row(i).0.is_empty() {
            kind[i] = Some(PointType::Coarse);
        }
    }
    let neighbours = |i: usize| s.row(i).0.iter().chain(st.row(i).0).copied();
    let beats = |i: usize, j: usize| weight[i] > weight[j] || (weight[i] == weight[j] && i < j);

    let mut undecided: Vec<usize> = (0..n).filter(|&i| kind[i].is_none()).collect();
    while !undecided.is_empty() {
        let chosen: Vec<usize> = undecided
            .iter()
            .copied()
            .filter(|&i| neighbours(i).all(|j| kind[j].is_some() || j == i || beats(i, j)))
            .collect();
        for &i in &chosen {
            kind[i] = Some(PointType::Coarse);
        }
        for &i in &chosen {
            for &j in st.row(i).0 {
                if kind[j].is_none() {
                    kind[j] = Some(PointType::Fine);
                }
            }
        }
        undecided.retain(|&i| kind[i].is_none());
    }
    let mut kind: Vec<PointType> = kind.into_iter().map(|k| k.expect("every point decided")).collect();
    repair(s, &mut kind);
    CfSplit::new(kind)
}
