//! Haar-random states.

use rand::Rng as _;
use rand_distr::StandardNormal;

use super::{hermitize, orthonormalize_columns, C64, CMatrix, CVector, DensityMatrix, Dims, PureState};
use crate::error::{Error, Result};
use crate::seed::{self, Rng};

fn gaussian(rng: &mut Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed pure state drawn from `rng`.
pub fn haar_pure_with(rng: &mut Rng, dims: &Dims) -> PureState {
    loop {
        let v = CVector::from_fn(dims.total(), |_, _| gaussian(rng));
        let n = v.norm();
        if n > 1e-300 {
            return PureState::from_parts(v / C64::new(n, 0.0), dims.clone());
        }
    }
}

/// Haar-distributed pure state, deterministic in `seed`.
pub fn haar_random_pure(dims: &Dims, seed: u64) -> PureState {
    haar_pure_with(&mut seed::rng(seed), dims)
}

/// Haar-distributed `n × n` unitary (QR of a Ginibre matrix with phase fix).
pub fn haar_unitary_with(rng: &mut Rng, n: usize) -> CMatrix {
    loop {
        let g = CMatrix::from_fn(n, n, |_, _| gaussian(rng));
        if let Some(q) = orthonormalize_columns(&g) {
            return q;
        }
    }
}

/// Random state of rank at most `rank`: the marginal of a Haar-random pure
/// state on `dims ⊗ C^rank`.
pub fn random_density_with(rng: &mut Rng, dims: &Dims, rank: usize) -> Result<DensityMatrix> {
    let total = dims.total();
    if rank == 0 || rank > total {
        return Err(Error::RankOutOfRange { rank, max: total });
    }
    let psi = haar_pure_with(rng, &Dims::new(vec![total, rank])?);
    let m = CMatrix::from_fn(total, rank, |i, j| psi.amplitudes()[i * rank + j]);
    let rho = &m * m.adjoint();
    Ok(DensityMatrix::from_parts(hermitize(&rho), dims.clone()))
}

/// Seeded [`random_density_with`].
pub fn random_density(dims: &Dims, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_with(&mut seed::rng(seed), dims, rank)
}
