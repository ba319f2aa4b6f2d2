//! JSON interchange for matrices, states and cone descriptors.
//!
//! Matrices are arrays of rows, each row an array of `[re, im]` pairs.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qlinalg::{CMatrix, DensityMatrix, HermitianOperator};

pub type MatrixPairs = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_pairs(m: &CMatrix) -> MatrixPairs {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn pairs_to_matrix(rows: &MatrixPairs) -> Result<CMatrix> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("matrix must be a non-empty square array of rows".into()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

/// On-disk state: the matrix plus optional subsystem dimensions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateFile {
    pub matrix: MatrixPairs,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub subsystem_dims: Vec<usize>,
}

impl StateFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        Self {
            matrix: matrix_to_pairs(rho.op().matrix()),
            subsystem_dims: rho.op().subsystem_dims().to_vec(),
        }
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        let op = HermitianOperator::new(pairs_to_matrix(&self.matrix)?, self.subsystem_dims.clone())?;
        DensityMatrix::new(op)
    }
}

/// Accepts either `{"matrix": ..., "subsystem_dims": ...}` or a bare matrix.
pub fn parse_state_json(text: &str) -> Result<DensityMatrix> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    if value.is_array() {
        let rows: MatrixPairs = serde_json::from_value(value)?;
        let op = HermitianOperator::new(pairs_to_matrix(&rows)?, Vec::new())?;
        return DensityMatrix::new(op);
    }
    let file: StateFile = serde_json::from_value(value)?;
    file.to_state()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn pairs_round_trip(entries in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 9)) {
            let m = CMatrix::from_fn(3, 3, |i, j| Complex64::new(entries[3 * i + j].0, entries[3 * i + j].1));
            let back = pairs_to_matrix(&matrix_to_pairs(&m)).unwrap();
            prop_assert_eq!(back, m);
        }
    }

    #[test]
    fn bare_matrix_state() {
        let rho = parse_state_json("[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]").unwrap();
        assert_eq!(rho.dim(), 2);
        assert!(parse_state_json("[[[1.5,0],[0,0]],[[0,0],[0.5,0]]]").is_err());
    }
}
