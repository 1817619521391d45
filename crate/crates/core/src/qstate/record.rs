//! Structured-text state records: `{dims, re, im}`, full row-major matrices.

use serde::{Deserialize, Serialize};

use super::{C64, CMatrix, CVector, DensityMatrix, Dims, PureState};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub dims: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl From<&DensityMatrix> for StateRecord {
    fn from(rho: &DensityMatrix) -> Self {
        let m = rho.matrix();
        let rows = |f: fn(&C64) -> f64| {
            (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| f(&m[(i, j)])).collect())
                .collect()
        };
        Self {
            dims: rho.dims().as_slice().to_vec(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }
}

impl TryFrom<&StateRecord> for DensityMatrix {
    type Error = Error;

    fn try_from(rec: &StateRecord) -> Result<Self> {
        let dims = Dims::new(rec.dims.clone())?;
        let n = dims.total();
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&rec.re) || !shape_ok(&rec.im) {
            return Err(Error::Record(format!("expected {n}x{n} `re` and `im` arrays")));
        }
        let mat = CMatrix::from_fn(n, n, |i, j| C64::new(rec.re[i][j], rec.im[i][j]));
        DensityMatrix::new(mat, dims)
    }
}

impl StateRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state records always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Record(e.to_string()))
    }
}

impl From<DensityMatrix> for StateRecord {
    fn from(rho: DensityMatrix) -> Self {
        Self::from(&rho)
    }
}

impl TryFrom<StateRecord> for DensityMatrix {
    type Error = Error;

    fn try_from(rec: StateRecord) -> Result<Self> {
        Self::try_from(&rec)
    }
}

/// Record for a state vector: `{dims, re, im}` with flat amplitude arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureRecord {
    pub dims: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<PureState> for PureRecord {
    fn from(psi: PureState) -> Self {
        Self {
            dims: psi.dims().as_slice().to_vec(),
            re: psi.amplitudes().iter().map(|z| z.re).collect(),
            im: psi.amplitudes().iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<PureRecord> for PureState {
    type Error = Error;

    fn try_from(rec: PureRecord) -> Result<Self> {
        if rec.re.len() != rec.im.len() {
            return Err(Error::Record("`re` and `im` differ in length".into()));
        }
        let amps = CVector::from_iterator(rec.re.len(), rec.re.iter().zip(&rec.im).map(|(&r, &i)| C64::new(r, i)));
        PureState::new(amps, Dims::new(rec.dims)?)
    }
}
