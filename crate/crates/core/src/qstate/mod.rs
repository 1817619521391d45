//! Dense finite-dimensional quantum states.
//!
//! Subsystems are ordered row-major: the first subsystem is the most
//! significant digit of a flat basis index. States are immutable once built;
//! public constructors validate and reject, they never renormalize.

mod linalg;
mod random;
mod record;

use serde::{Deserialize, Serialize};

pub use linalg::{C64, CMatrix, CVector};
pub(crate) use linalg::{
    frobenius, hermitian_deviation, hermitian_eigenvalues, hermitian_eigh, hermitize,
    isometry_deviation, kron, max_abs_diff, orthonormalize_columns, trace_re, ONE, ZERO,
};
#[cfg(test)]
pub(crate) use linalg::{hermitian_function, matrix_power};
pub use random::{haar_pure_with, haar_random_pure, haar_unitary_with, random_density, random_density_with};
pub use record::{PureRecord, StateRecord};

use crate::error::{Error, Result};

/// Tolerance for Hermiticity, positivity, unit trace and unit norm.
pub const VALIDITY_TOL: f64 = 1e-12;
/// Eigenvalues closer than this are treated as one degenerate cluster.
pub const DEGENERACY_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are treated as zero when counting rank.
pub const RANK_TOL: f64 = 1e-12;

/// Ordered subsystem dimensions.
///
/// Entries are at least 1; a 1-dimensional factor only arises as the trivial
/// ancilla of a rank-1 purification or a single-member flag register.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Dims(Vec<usize>);

impl Dims {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        if dims.is_empty() {
            return Err(Error::InvalidDims("no subsystems".into()));
        }
        if let Some(&d) = dims.iter().find(|&&d| d == 0) {
            return Err(Error::InvalidDims(format!("subsystem dimension {d}")));
        }
        Ok(Self(dims))
    }

    /// `n` subsystems of equal dimension `d`.
    pub fn uniform(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn get(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn concat(&self, other: &Dims) -> Dims {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Dims(v)
    }

    /// Dimensions of the listed subsystems, in the order given.
    pub fn select(&self, idx: &[usize]) -> Dims {
        Dims(idx.iter().map(|&i| self.0[i]).collect())
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.0.len() {
            Err(Error::SubsystemOutOfRange {
                index: i,
                count: self.0.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Flat-index gather map for reordering subsystems.
    ///
    /// `order` lists original subsystem indices in their new order (a
    /// permutation). Entry `k` of the result is the original flat index of the
    /// basis state whose new flat index is `k`.
    pub(crate) fn reorder_map(&self, order: &[usize]) -> Vec<usize> {
        let n = self.0.len();
        debug_assert_eq!(order.len(), n);
        // Stride of each original subsystem in the original flat index.
        let mut stride = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * self.0[i + 1];
        }
        let new_dims: Vec<usize> = order.iter().map(|&i| self.0[i]).collect();
        let total = self.total();
        let mut map = vec![0usize; total];
        let mut digits = vec![0usize; n];
        for slot in map.iter_mut() {
            *slot = order
                .iter()
                .zip(&digits)
                .map(|(&orig, &dig)| dig * stride[orig])
                .sum();
            // increment mixed-radix counter over the new ordering
            for pos in (0..n).rev() {
                digits[pos] += 1;
                if digits[pos] < new_dims[pos] {
                    break;
                }
                digits[pos] = 0;
            }
        }
        map
    }
}

impl TryFrom<Vec<usize>> for Dims {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Dims::new(v)
    }
}

impl From<Dims> for Vec<usize> {
    fn from(d: Dims) -> Self {
        d.0
    }
}

/// A split of the subsystems into two nonempty groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CutRecord", into = "CutRecord")]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct CutRecord {
    n_subsystems: usize,
    left: Vec<usize>,
}

impl From<Bipartition> for CutRecord {
    fn from(c: Bipartition) -> Self {
        Self {
            n_subsystems: c.n_subsystems(),
            left: c.left,
        }
    }
}

impl TryFrom<CutRecord> for Bipartition {
    type Error = Error;
    fn try_from(r: CutRecord) -> Result<Self> {
        Bipartition::new(r.n_subsystems, &r.left)
    }
}

impl Bipartition {
    /// `left` are the subsystems of the first party; the rest form the second.
    pub fn new(n_subsystems: usize, left: &[usize]) -> Result<Self> {
        let mut l = left.to_vec();
        l.sort_unstable();
        l.dedup();
        if l.len() != left.len() {
            return Err(Error::InvalidSelection("repeated subsystem index".into()));
        }
        if let Some(&i) = l.iter().find(|&&i| i >= n_subsystems) {
            return Err(Error::SubsystemOutOfRange {
                index: i,
                count: n_subsystems,
            });
        }
        if l.is_empty() || l.len() == n_subsystems {
            return Err(Error::InvalidSelection("both sides of a cut must be nonempty".into()));
        }
        let right = (0..n_subsystems).filter(|i| !l.contains(i)).collect();
        Ok(Self { left: l, right })
    }

    /// First subsystem against all others.
    pub fn first(n_subsystems: usize) -> Result<Self> {
        Self::new(n_subsystems, &[0])
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    /// The same cut with the parties exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            left: self.right.clone(),
            right: self.left.clone(),
        }
    }

    pub fn n_subsystems(&self) -> usize {
        self.left.len() + self.right.len()
    }

    pub(crate) fn order(&self) -> Vec<usize> {
        self.left.iter().chain(&self.right).copied().collect()
    }
}

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PureRecord", into = "PureRecord")]
pub struct PureState {
    amps: CVector,
    dims: Dims,
}

impl PureState {
    pub fn new(amps: CVector, dims: Dims) -> Result<Self> {
        if amps.len() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                got: amps.len(),
            });
        }
        let n2 = amps.norm_squared();
        if (n2 - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::NotNormalized(n2));
        }
        Ok(Self { amps, dims })
    }

    /// Normalizes `amps`; fails only on a zero vector or a size mismatch.
    pub fn normalized(amps: CVector, dims: Dims) -> Result<Self> {
        let n = amps.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        Self::new(amps / C64::new(n, 0.0), dims)
    }

    pub(crate) fn from_parts(amps: CVector, dims: Dims) -> Self {
        debug_assert_eq!(amps.len(), dims.total());
        Self { amps, dims }
    }

    /// Computational basis state `|digits⟩`.
    pub fn basis(dims: Dims, digits: &[usize]) -> Result<Self> {
        if digits.len() != dims.len() {
            return Err(Error::DimensionMismatch {
                expected: dims.len(),
                got: digits.len(),
            });
        }
        let mut idx = 0;
        for (&d, &k) in dims.as_slice().iter().zip(digits) {
            if k >= d {
                return Err(Error::InvalidSelection(format!("basis digit {k} >= dimension {d}")));
            }
            idx = idx * d + k;
        }
        let mut amps = CVector::zeros(dims.total());
        amps[idx] = ONE;
        Ok(Self { amps, dims })
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    /// Amplitudes arranged as a `left × right` matrix across `cut`.
    pub fn matricize(&self, cut: &Bipartition) -> Result<CMatrix> {
        self.check_cut(cut)?;
        let map = self.dims.reorder_map(&cut.order());
        let rows = self.dims.select(cut.left()).total();
        let cols = self.dims.select(cut.right()).total();
        Ok(CMatrix::from_fn(rows, cols, |i, j| self.amps[map[i * cols + j]]))
    }

    fn check_cut(&self, cut: &Bipartition) -> Result<()> {
        if cut.n_subsystems() != self.dims.len() {
            return Err(Error::InvalidSelection(format!(
                "cut over {} subsystems applied to a {}-party state",
                cut.n_subsystems(),
                self.dims.len()
            )));
        }
        Ok(())
    }

    /// Reduced state on `keep` (sorted order), computed as `M M†`.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = normalize_selection(&self.dims, keep)?;
        if keep.len() == self.dims.len() {
            return Ok(DensityMatrix::from_pure(self));
        }
        let cut = Bipartition::new(self.dims.len(), &keep)?;
        let m = self.matricize(&cut)?;
        let rho = &m * m.adjoint();
        Ok(DensityMatrix::from_parts(hermitize(&rho), self.dims.select(&keep)))
    }

    pub fn inner(&self, other: &PureState) -> C64 {
        self.amps.dotc(&other.amps)
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amps: self.amps.kronecker(&other.amps),
            dims: self.dims.concat(&other.dims),
        }
    }
}

/// A Hermitian, positive semidefinite, unit-trace matrix with subsystem
/// structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateRecord", into = "StateRecord")]
pub struct DensityMatrix {
    mat: CMatrix,
    dims: Dims,
}

impl DensityMatrix {
    /// Validates Hermiticity, positivity and unit trace to `1e-12`.
    pub fn new(mat: CMatrix, dims: Dims) -> Result<Self> {
        if mat.nrows() != dims.total() || mat.ncols() != dims.total() {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                got: mat.nrows().max(mat.ncols()),
            });
        }
        let dev = hermitian_deviation(&mat);
        if dev > VALIDITY_TOL {
            return Err(Error::NotHermitian(dev));
        }
        let tr = trace_re(&mat);
        if (tr - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::InvalidTrace(tr));
        }
        let min = hermitian_eigenvalues(&mat)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min < -VALIDITY_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(Self { mat, dims })
    }

    /// Internal constructor for matrices valid by construction.
    pub(crate) fn from_parts(mat: CMatrix, dims: Dims) -> Self {
        debug_assert_eq!(mat.nrows(), dims.total());
        Self { mat, dims }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let a = psi.amplitudes();
        Self {
            mat: a * a.adjoint(),
            dims: psi.dims().clone(),
        }
    }

    /// `I / total_dim`.
    pub fn maximally_mixed(dims: Dims) -> Self {
        let n = dims.total();
        Self {
            mat: CMatrix::identity(n, n) * C64::new(1.0 / n as f64, 0.0),
            dims,
        }
    }

    /// Diagonal state with the given probabilities (one subsystem).
    pub fn diagonal(p: &Probabilities) -> Self {
        let n = p.len();
        let mut mat = CMatrix::zeros(n, n);
        for (i, &pi) in p.as_slice().iter().enumerate() {
            mat[(i, i)] = C64::new(pi, 0.0);
        }
        Self {
            mat,
            dims: Dims(vec![n]),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &Dims {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Same matrix, new subsystem structure with equal total dimension.
    pub fn with_dims(&self, dims: Dims) -> Result<Self> {
        if dims.total() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dims.total(),
            });
        }
        Ok(Self {
            mat: self.mat.clone(),
            dims,
        })
    }

    /// Eigenvalues, descending, without eigenvectors.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut v = hermitian_eigenvalues(&self.mat);
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        v
    }

    pub fn rank(&self) -> usize {
        self.spectrum().iter().filter(|&&l| l > RANK_TOL).count()
    }

    pub fn is_pure(&self) -> bool {
        self.spectrum()[0] > 1.0 - 1e-10
    }

    /// `tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        let m = &self.mat;
        m.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Reordered subsystems; `order` is a permutation of subsystem indices.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.dims.len()).collect::<Vec<_>>() {
            return Err(Error::InvalidSelection(format!("{order:?} is not a permutation")));
        }
        let map = self.dims.reorder_map(order);
        let n = self.dim();
        let mat = CMatrix::from_fn(n, n, |i, j| self.mat[(map[i], map[j])]);
        Ok(Self {
            mat,
            dims: self.dims.select(order),
        })
    }

    /// Mixture `Σ w_k ρ_k` of states with identical dims (weights unchecked).
    pub(crate) fn mix(parts: &[(f64, &DensityMatrix)]) -> Self {
        let first = parts[0].1;
        let mut mat = CMatrix::zeros(first.dim(), first.dim());
        for &(w, r) in parts {
            mat += &r.mat * C64::new(w, 0.0);
        }
        Self {
            mat,
            dims: first.dims.clone(),
        }
    }
}

/// Keeps sorted, deduplicated, in-range indices; rejects empty selections.
fn normalize_selection(dims: &Dims, keep: &[usize]) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::InvalidSelection("must keep at least one subsystem".into()));
    }
    for &k in keep {
        dims.check_index(k)?;
    }
    let mut k = keep.to_vec();
    k.sort_unstable();
    k.dedup();
    if k.len() != keep.len() {
        return Err(Error::InvalidSelection("repeated subsystem index".into()));
    }
    Ok(k)
}

/// `ρ ⊗ σ` with concatenated dims.
pub fn tensor_product(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix {
        mat: kron(&a.mat, &b.mat),
        dims: a.dims.concat(&b.dims),
    }
}

/// Reduced state on the subsystems in `keep`, kept in ascending order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let keep = normalize_selection(&rho.dims, keep)?;
    if keep.len() == rho.dims.len() {
        return Ok(rho.clone());
    }
    let traced: Vec<usize> = (0..rho.dims.len()).filter(|i| !keep.contains(i)).collect();
    let order: Vec<usize> = keep.iter().chain(&traced).copied().collect();
    let map = rho.dims.reorder_map(&order);
    let k = rho.dims.select(&keep).total();
    let t = rho.dims.select(&traced).total();
    let mut out = CMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let mut acc = ZERO;
            for s in 0..t {
                acc += rho.mat[(map[i * t + s], map[j * t + s])];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix {
        mat: out,
        dims: rho.dims.select(&keep),
    })
}

/// `(I ⊗ ⟨v|) ρ (I ⊗ |v⟩)` for a bipartite `ρ`: the unnormalized left-factor
/// state after the right factor is projected on `v`. Its trace is the outcome
/// probability.
pub fn condition_right(rho: &DensityMatrix, v: &CVector) -> Result<CMatrix> {
    if rho.dims.len() != 2 {
        return Err(Error::InvalidDims(format!("expected a bipartite state, got {:?}", rho.dims)));
    }
    let (da, db) = (rho.dims.get(0), rho.dims.get(1));
    if v.len() != db {
        return Err(Error::DimensionMismatch {
            expected: db,
            got: v.len(),
        });
    }
    // first contract the column index, then the row index
    let mut half = CMatrix::zeros(da * db, da);
    for r in 0..da * db {
        for a in 0..da {
            let mut acc = ZERO;
            for b in 0..db {
                acc += rho.mat[(r, a * db + b)] * v[b];
            }
            half[(r, a)] = acc;
        }
    }
    let mut out = CMatrix::zeros(da, da);
    for a in 0..da {
        for a2 in 0..da {
            let mut acc = ZERO;
            for b in 0..db {
                acc += v[b].conj() * half[(a * db + b, a2)];
            }
            out[(a, a2)] = acc;
        }
    }
    Ok(out)
}

/// Purification on `system ⊗ ancilla`, ancilla dimension equal to the rank.
pub fn purify(rho: &DensityMatrix) -> PureState {
    let eig = eigendecompose(rho);
    let r = eig.rank().max(1);
    let n = rho.dim();
    let mut amps = CVector::zeros(n * r);
    for k in 0..r {
        let s = eig.values[k].max(0.0).sqrt();
        for i in 0..n {
            amps[i * r + k] = eig.vectors[(i, k)] * s;
        }
    }
    let norm = amps.norm();
    amps /= C64::new(norm, 0.0);
    PureState {
        amps,
        dims: rho.dims.concat(&Dims(vec![r])),
    }
}

/// Spectral decomposition with descending eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    vectors: CMatrix,
}

impl EigenDecomposition {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Orthonormal eigenvectors as columns, aligned with [`Self::values`].
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).clone_owned()
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn rank(&self) -> usize {
        self.values.iter().filter(|&&l| l > RANK_TOL).count()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for (k, &l) in self.values.iter().enumerate() {
            let c = self.vectors.column(k);
            out += c * c.adjoint() * C64::new(l, 0.0);
        }
        out
    }

    /// Builds a decomposition from explicit parts after checking orthonormality.
    pub fn from_parts(values: Vec<f64>, vectors: CMatrix) -> Result<Self> {
        if vectors.ncols() != values.len() || vectors.nrows() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: values.len(),
                got: vectors.ncols(),
            });
        }
        let dev = isometry_deviation(&vectors);
        if dev > 1e-10 {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self { values, vectors })
    }
}

/// Deterministic spectral decomposition.
///
/// Within a degenerate cluster (consecutive eigenvalues closer than `1e-10`)
/// the basis is rebuilt by projecting computational basis vectors onto the
/// cluster eigenspace in index order and orthonormalizing. Each eigenvector
/// is then rotated so that its largest-magnitude entry (lowest index on ties)
/// is real positive.
pub fn eigendecompose(rho: &DensityMatrix) -> EigenDecomposition {
    eigendecompose_hermitian(&rho.mat)
}

pub(crate) fn eigendecompose_hermitian(m: &CMatrix) -> EigenDecomposition {
    let (values, mut vectors) = hermitian_eigh(m);
    let n = values.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end - 1] - values[end]).abs() < DEGENERACY_TOL {
            end += 1;
        }
        if end - start > 1 {
            let block = canonical_cluster_basis(&vectors.columns(start, end - start).clone_owned());
            for (k, col) in block.column_iter().enumerate() {
                vectors.set_column(start + k, &col);
            }
        }
        start = end;
    }
    for k in 0..n {
        let mut col = vectors.column(k).clone_owned();
        fix_phase(&mut col);
        vectors.set_column(k, &col);
    }
    EigenDecomposition { values, vectors }
}

fn canonical_cluster_basis(cluster: &CMatrix) -> CMatrix {
    let (n, k) = cluster.shape();
    let proj = cluster * cluster.adjoint();
    let mut chosen: Vec<CVector> = Vec::with_capacity(k);
    for c in 0..n {
        if chosen.len() == k {
            break;
        }
        let mut w: CVector = proj.column(c).clone_owned();
        for _pass in 0..2 {
            for u in &chosen {
                let p = u.dotc(&w);
                w -= u * p;
            }
        }
        let norm = w.norm();
        if norm > 1e-6 {
            chosen.push(w / C64::new(norm, 0.0));
        }
    }
    // Projected basis vectors always span the cluster; this is a guard
    // against pathological rounding only.
    if chosen.len() < k {
        return cluster.clone();
    }
    CMatrix::from_columns(&chosen)
}

fn fix_phase(v: &mut CVector) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let idx = v.iter().position(|z| z.norm() >= max - 1e-12).unwrap_or(0);
    let phase = v[idx].conj() / v[idx].norm();
    *v *= phase;
}

/// Schmidt coefficients (descending, positive) with the matching bases.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    /// Left Schmidt vectors as columns.
    pub left: CMatrix,
    /// Right Schmidt vectors as columns.
    pub right: CMatrix,
}

impl SchmidtDecomposition {
    /// Reassembled amplitudes in the cut's `left ⊗ right` ordering.
    pub fn reassemble(&self) -> CVector {
        let mut out = self.left.column(0).kronecker(&self.right.column(0)) * C64::new(self.coefficients[0], 0.0);
        for k in 1..self.coefficients.len() {
            out += self.left.column(k).kronecker(&self.right.column(k)) * C64::new(self.coefficients[k], 0.0);
        }
        out
    }
}

/// Schmidt decomposition of `psi` across `cut`; coefficients below `1e-12`
/// are dropped.
pub fn schmidt_decompose(psi: &PureState, cut: &Bipartition) -> Result<SchmidtDecomposition> {
    let m = psi.matricize(cut)?;
    let svd = m.svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V†");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| {
        svd.singular_values[j]
            .partial_cmp(&svd.singular_values[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    order.retain(|&i| svd.singular_values[i] > 1e-12);
    let coefficients = order.iter().map(|&i| svd.singular_values[i]).collect();
    let left = CMatrix::from_columns(&order.iter().map(|&i| u.column(i).clone_owned()).collect::<Vec<_>>());
    let right = CMatrix::from_columns(
        &order
            .iter()
            .map(|&i| vt.row(i).transpose().clone_owned())
            .collect::<Vec<_>>(),
    );
    Ok(SchmidtDecomposition {
        coefficients,
        left,
        right,
    })
}

/// Zero-pads every subsystem up to the dimensions in `target`.
///
/// Basis digit `k` of subsystem `i` maps to digit `k` of the enlarged space.
pub fn embed(rho: &DensityMatrix, target: &Dims) -> Result<DensityMatrix> {
    let map = embedding_map(rho.dims(), target)?;
    let n = target.total();
    let mut mat = CMatrix::zeros(n, n);
    for (i, &ti) in map.iter().enumerate() {
        for (j, &tj) in map.iter().enumerate() {
            mat[(ti, tj)] = rho.mat[(i, j)];
        }
    }
    Ok(DensityMatrix {
        mat,
        dims: target.clone(),
    })
}

/// Zero-padding embedding of a pure state.
pub fn embed_pure(psi: &PureState, target: &Dims) -> Result<PureState> {
    let map = embedding_map(psi.dims(), target)?;
    let mut amps = CVector::zeros(target.total());
    for (i, &ti) in map.iter().enumerate() {
        amps[ti] = psi.amps[i];
    }
    Ok(PureState {
        amps,
        dims: target.clone(),
    })
}

fn embedding_map(from: &Dims, to: &Dims) -> Result<Vec<usize>> {
    if from.len() != to.len() {
        return Err(Error::DimensionMismatch {
            expected: to.len(),
            got: from.len(),
        });
    }
    if from.as_slice().iter().zip(to.as_slice()).any(|(a, b)| a > b) {
        return Err(Error::InvalidDims(format!("cannot embed {from:?} into {to:?}")));
    }
    let n = from.len();
    let mut map = Vec::with_capacity(from.total());
    let mut digits = vec![0usize; n];
    for _ in 0..from.total() {
        let mut idx = 0;
        for i in 0..n {
            idx = idx * to.get(i) + digits[i];
        }
        map.push(idx);
        for pos in (0..n).rev() {
            digits[pos] += 1;
            if digits[pos] < from.get(pos) {
                break;
            }
            digits[pos] = 0;
        }
    }
    Ok(map)
}

/// Dims with every subsystem raised to the largest local dimension.
pub fn square_dims(dims: &Dims) -> Dims {
    let d = dims.as_slice().iter().copied().max().unwrap_or(1);
    Dims(vec![d; dims.len()])
}

/// A probability vector: nonnegative entries summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Probabilities(Vec<f64>);

impl Probabilities {
    pub fn new(p: impl Into<Vec<f64>>) -> Result<Self> {
        let p = p.into();
        if p.is_empty() {
            return Err(Error::InvalidProbabilities("empty".into()));
        }
        if let Some(&x) = p.iter().find(|&&x| !(x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidProbabilities(format!("entry {x}")));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::InvalidProbabilities(format!("sum {s}")));
        }
        Ok(Self(p))
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub(crate) fn from_parts(p: Vec<f64>) -> Self {
        Self(p)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for Probabilities {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Probabilities::new(v)
    }
}

impl From<Probabilities> for Vec<f64> {
    fn from(p: Probabilities) -> Self {
        p.0
    }
}

/// Common named states.
pub mod states {
    use super::*;

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell() -> PureState {
        ghz(2)
    }

    /// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
    pub fn ghz(n: usize) -> PureState {
        let dims = Dims(vec![2; n]);
        let mut amps = CVector::zeros(dims.total());
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[0] = s;
        amps[dims.total() - 1] = s;
        PureState { amps, dims }
    }

    /// Equal superposition of the single-excitation states on `n` qubits.
    pub fn w(n: usize) -> PureState {
        let dims = Dims(vec![2; n]);
        let mut amps = CVector::zeros(dims.total());
        let s = C64::new(1.0 / (n as f64).sqrt(), 0.0);
        for k in 0..n {
            amps[1 << k] = s;
        }
        PureState { amps, dims }
    }

    /// `|0…0⟩` on the given dims.
    pub fn zero(dims: Dims) -> PureState {
        let mut amps = CVector::zeros(dims.total());
        amps[0] = ONE;
        PureState { amps, dims }
    }
}
