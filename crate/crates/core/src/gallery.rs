//! Model problems used as stand-ins for pressure-projection operators.
//!
//! All generators eliminate Dirichlet boundary values, so interior rows sum
//! to zero and rows touching the boundary are strictly diagonally dominant.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::{CsrMatrix, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Problem {
    /// `tridiag(-1, 2, -1)` of order `n`.
    Poisson1d { n: usize },
    /// 5-point Laplacian on an `nx` by `ny` grid, row-major numbering.
    Poisson2d { nx: usize, ny: usize },
    /// `-u_xx - eps u_yy` with the 5-point stencil.
    Anisotropic2d { nx: usize, ny: usize, eps: f64 },
}

impl Problem {
    pub fn matrix(&self) -> Result<CsrMatrix> {
        match *self {
            Problem::Poisson1d { n } => {
                if n == 0 {
                    return Err(Error::InvalidParameter("poisson1d needs n >= 1".into()));
                }
                Ok(stencil_2d(n, 1, 1.0, 0.0))
            }
            Problem::Poisson2d { nx, ny } => {
                if nx == 0 || ny == 0 {
                    return Err(Error::InvalidParameter("poisson2d needs nx, ny >= 1".into()));
                }
                Ok(stencil_2d(nx, ny, 1.0, 1.0))
            }
            Problem::Anisotropic2d { nx, ny, eps } => {
                if nx == 0 || ny == 0 || !(eps > 0.0 && eps.is_finite()) {
                    return Err(Error::InvalidParameter(
                        "anisotropic2d needs nx, ny >= 1 and a finite eps > 0".into(),
                    ));
                }
                Ok(stencil_2d(nx, ny, 1.0, eps))
            }
        }
    }
}

/// `cx` couples x-neighbours, `cy` y-neighbours; `ny == 1` with `cy == 0`
/// degenerates to the 1D operator.
fn stencil_2d(nx: usize, ny: usize, cx: f64, cy: f64) -> CsrMatrix {
    let n = nx * ny;
    let mut t: Vec<(usize, usize, f64)> = Vec::with_capacity(5 * n);
    let diag = 2.0 * cx + 2.0 * cy;
    for y in 0..ny {
        for x in 0..nx {
            let i = y * nx + x;
            if cy != 0.0 && y > 0 {
                t.push((i, i - nx, -cy));
            }
            if x > 0 {
                t.push((i, i - 1, -cx));
            }
            t.push((i, i, diag));
            if x + 1 < nx {
                t.push((i, i + 1, -cx));
            }
            if cy != 0.0 && y + 1 < ny {
                t.push((i, i + nx, -cy));
            }
        }
    }
    CsrMatrix::from_triplets(n, n, t).expect("stencil indices are in range")
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::Poisson1d { n } => write!(f, "poisson1d:{n}"),
            Problem::Poisson2d { nx, ny } => write!(f, "poisson2d:{nx},{ny}"),
            Problem::Anisotropic2d { nx, ny, eps } => write!(f, "anisotropic2d:{nx},{ny},{eps}"),
        }
    }
}

/// Parses `poisson1d:N`, `poisson2d:NX,NY` or `anisotropic2d:NX,NY,EPS`.
impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: String| Error::InvalidParameter(msg);
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| bad(format!("generator spec `{s}` must look like kind:args")))?;
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        let int = |k: usize| -> Result<usize> {
            parts
                .get(k)
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| bad(format!("bad integer argument {k} in `{s}`")))
        };
        let p = match kind.trim() {
            "poisson1d" if parts.len() == 1 => Problem::Poisson1d { n: int(0)? },
            "poisson2d" if parts.len() == 2 => Problem::Poisson2d {
                nx: int(0)?,
                ny: int(1)?,
            },
            "anisotropic2d" if parts.len() == 3 => Problem::Anisotropic2d {
                nx: int(0)?,
                ny: int(1)?,
                eps: parts[2]
                    .parse()
                    .map_err(|_| bad(format!("bad eps in `{s}`")))?,
            },
            _ => return Err(bad(format!("unknown generator spec `{s}`"))),
        };
        Ok(p)
    }
}
