//! Model problems written as Matrix Market files.

use std::path::Path;

use scilu_core::gallery::Problem;

use crate::{mm, CliError};

pub fn gen(spec: &str, out: &Path) -> Result<(), CliError> {
    let p: Problem = spec.parse()?;
    mm::write_path(&p.matrix()?, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poisson1d_three_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.mtx");
        gen("poisson1d:3", &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(
            text,
            "%%MatrixMarket matrix coordinate real general\n3 3 7\n\
             1 1 2.0\n1 2 -1.0\n2 1 -1.0\n2 2 2.0\n2 3 -1.0\n3 2 -1.0\n3 3 2.0\n"
        );
    }

    #[test]
    fn read_back_is_equal() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.mtx");
        gen("anisotropic2d:5,4,0.1", &path).unwrap();
        let want = Problem::Anisotropic2d { nx: 5, ny: 4, eps: 0.1 }.matrix().unwrap();
        assert_eq!(mm::read_path(&path).unwrap(), want);
    }

    #[test]
    fn bad_spec_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        assert!(gen("poisson3d:2", &dir.path().join("x.mtx")).is_err());
    }
}
