//! Weyl–Heisenberg operators, the two dephasing channels and the four-party
//! classical-classical-quantum state built from a bipartite `ρ_AB`.
//!
//! Flags `X` and `Y` select the displacement `X^x Z^y` applied to `B`, with
//! `Z` diagonal in the eigenbasis of `ρ_B`. The resulting state is
//! block-diagonal in the flags, so every entropy of it reduces to entropies
//! of `d × d` blocks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::entropy::{q_log_unchecked, tsallis, tsallis_mutual, tsallis_q_difference, EntropicParameter, Ensemble};
use crate::error::{Error, Result};
use crate::qstate::{
    condition_right, eigendecompose, embed, hermitize, isometry_deviation, kron, partial_trace,
    square_dims, trace_re, Bipartition, CMatrix, CVector, DensityMatrix, Dims, EigenDecomposition,
    StateRecord, C64, ONE,
};

/// Flag dimension up to which [`direct_iq`] diagonalizes the assembled state.
pub const ASSEMBLY_LIMIT: usize = 4;

fn root_of_unity(d: usize, k: i64) -> C64 {
    let phase = 2.0 * PI * (k.rem_euclid(d as i64) as f64) / d as f64;
    C64::from_polar(1.0, phase)
}

/// Clock and shift operators over a fixed orthonormal basis `{|e_j⟩}`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeylPair {
    d: usize,
    z: CMatrix,
    x: CMatrix,
    omega: C64,
    basis: CMatrix,
    fourier: CMatrix,
}

impl WeylPair {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// `Σ ω^j |e_j⟩⟨e_j|`.
    pub fn z(&self) -> &CMatrix {
        &self.z
    }

    /// `Σ |e_{j+1}⟩⟨e_j|`.
    pub fn x(&self) -> &CMatrix {
        &self.x
    }

    pub fn omega(&self) -> C64 {
        self.omega
    }

    /// Columns are the reference basis `|e_j⟩`.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    /// `Z^k` for any integer `k`.
    pub fn z_pow(&self, k: i64) -> CMatrix {
        let diag = CVector::from_fn(self.d, |j, _| root_of_unity(self.d, k * j as i64));
        &self.basis * CMatrix::from_diagonal(&diag) * self.basis.adjoint()
    }

    /// `X^k` for any integer `k`.
    pub fn x_pow(&self, k: i64) -> CMatrix {
        let d = self.d;
        let shift = k.rem_euclid(d as i64) as usize;
        let mut perm = CMatrix::zeros(d, d);
        for j in 0..d {
            perm[((j + shift) % d, j)] = ONE;
        }
        &self.basis * perm * self.basis.adjoint()
    }

    /// The displacement `X^x Z^y`.
    pub fn displacement(&self, x: usize, y: usize) -> CMatrix {
        self.x_pow(x as i64) * self.z_pow(y as i64)
    }
}

/// `|ẽ_j⟩ = d^{-1/2} Σ_k ω^{jk} |e_k⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierBasis {
    vectors: CMatrix,
}

impl FourierBasis {
    /// Columns are `|ẽ_j⟩`.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn vector(&self, j: usize) -> CVector {
        self.vectors.column(j).clone_owned()
    }

    pub fn dim(&self) -> usize {
        self.vectors.ncols()
    }
}

/// Weyl pair and Fourier basis over the eigenbasis of `ρ_B`.
pub fn build_weyl(eig: &EigenDecomposition) -> Result<(WeylPair, FourierBasis)> {
    weyl_from_basis(eig.vectors())
}

/// Weyl pair and Fourier basis over the columns of `basis`.
pub fn weyl_from_basis(basis: &CMatrix) -> Result<(WeylPair, FourierBasis)> {
    let d = basis.nrows();
    if basis.ncols() != d || d == 0 {
        return Err(Error::InvalidDims(format!("basis matrix is {}x{}", d, basis.ncols())));
    }
    let dev = isometry_deviation(basis);
    if dev > 1e-10 {
        return Err(Error::NotOrthonormal(dev));
    }
    let dft = CMatrix::from_fn(d, d, |k, j| root_of_unity(d, (j * k) as i64) / (d as f64).sqrt());
    let fourier = basis * dft;
    let mut pair = WeylPair {
        d,
        z: CMatrix::zeros(d, d),
        x: CMatrix::zeros(d, d),
        omega: root_of_unity(d, 1),
        basis: basis.clone(),
        fourier: fourier.clone(),
    };
    pair.z = pair.z_pow(1);
    pair.x = pair.x_pow(1);
    Ok((pair, FourierBasis { vectors: fourier }))
}

fn check_dim(sigma: &DensityMatrix, d: usize) -> Result<()> {
    if sigma.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: sigma.dim(),
        });
    }
    Ok(())
}

fn dephase(sigma: &CMatrix, basis: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(sigma.nrows(), sigma.ncols());
    for k in 0..basis.ncols() {
        let v = basis.column(k);
        let w = v.dotc(&(sigma * v));
        out += (v * v.adjoint()) * w;
    }
    out
}

/// `(M0(σ), M1(σ))`: dephasing in the eigenbasis and in the Fourier basis,
/// computed from the rank-1 projectors.
pub fn dephase_channels(sigma: &DensityMatrix, pair: &WeylPair) -> Result<(DensityMatrix, DensityMatrix)> {
    check_dim(sigma, pair.d)?;
    let m0 = dephase(sigma.matrix(), &pair.basis);
    let m1 = dephase(sigma.matrix(), &pair.fourier);
    Ok((
        DensityMatrix::from_parts(hermitize(&m0), sigma.dims().clone()),
        DensityMatrix::from_parts(hermitize(&m1), sigma.dims().clone()),
    ))
}

/// The same channels as averages over the clock and shift groups,
/// `M0(σ) = d⁻¹ Σ_b Z^b σ Z^{-b}` and `M1(σ) = d⁻¹ Σ_a X^a σ X^{-a}`.
pub fn dephase_channels_twirl(sigma: &DensityMatrix, pair: &WeylPair) -> Result<(DensityMatrix, DensityMatrix)> {
    check_dim(sigma, pair.d)?;
    let d = pair.d;
    let mut m0 = CMatrix::zeros(d, d);
    let mut m1 = CMatrix::zeros(d, d);
    for k in 0..d as i64 {
        let z = pair.z_pow(k);
        let x = pair.x_pow(k);
        m0 += &z * sigma.matrix() * z.adjoint();
        m1 += &x * sigma.matrix() * x.adjoint();
    }
    let scale = C64::new(1.0 / d as f64, 0.0);
    Ok((
        DensityMatrix::from_parts(hermitize(&(m0 * scale)), sigma.dims().clone()),
        DensityMatrix::from_parts(hermitize(&(m1 * scale)), sigma.dims().clone()),
    ))
}

/// How the blocks of a [`CcqState`] were produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CcqForm {
    /// `σ^{xy} = (I ⊗ X^x Z^y) ρ_AB (I ⊗ Z^{-y} X^{-x})`.
    Weyl,
    /// Arbitrary blocks.
    General,
}

/// `Σ_{x,y} d⁻² |x⟩⟨x| ⊗ |y⟩⟨y| ⊗ σ^{xy}_AB` with subsystem order `X, Y, A, B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CcqRecord", into = "CcqRecord")]
pub struct CcqState {
    d: usize,
    form: CcqForm,
    /// Row-major in `(x, y)`.
    blocks: Vec<DensityMatrix>,
}

impl CcqState {
    /// A general-form state from `d²` blocks listed row-major in `(x, y)`.
    pub fn general(blocks: Vec<DensityMatrix>) -> Result<Self> {
        let d = (blocks.len() as f64).sqrt().round() as usize;
        if d == 0 || d * d != blocks.len() {
            return Err(Error::InvalidDims(format!("{} blocks is not a square count", blocks.len())));
        }
        let dims = blocks[0].dims().clone();
        if dims.len() != 2 {
            return Err(Error::InvalidDims(format!("blocks must be bipartite, got {dims:?}")));
        }
        if let Some(bad) = blocks.iter().find(|b| b.dims() != &dims) {
            return Err(Error::DimensionMismatch {
                expected: dims.total(),
                got: bad.dim(),
            });
        }
        Ok(Self {
            d,
            form: CcqForm::General,
            blocks,
        })
    }

    /// Number of values each flag takes.
    pub fn flag_dim(&self) -> usize {
        self.d
    }

    pub fn form(&self) -> CcqForm {
        self.form
    }

    /// Dims of the quantum part `AB`.
    pub fn ab_dims(&self) -> &Dims {
        self.blocks[0].dims()
    }

    /// Dims `(d, d, d_A, d_B)`.
    pub fn dims(&self) -> Dims {
        Dims::new(vec![self.d, self.d]).expect("flag dim positive").concat(self.ab_dims())
    }

    pub fn block(&self, x: usize, y: usize) -> &DensityMatrix {
        &self.blocks[x * self.d + y]
    }

    pub fn blocks(&self) -> &[DensityMatrix] {
        &self.blocks
    }

    fn average(&self, parts: impl Iterator<Item = usize>) -> DensityMatrix {
        let idx: Vec<usize> = parts.collect();
        let w = 1.0 / idx.len() as f64;
        let terms: Vec<(f64, &DensityMatrix)> = idx.iter().map(|&i| (w, &self.blocks[i])).collect();
        DensityMatrix::mix(&terms)
    }

    /// `ρ^x = d⁻¹ Σ_y σ^{xy}`.
    pub fn x_conditional(&self, x: usize) -> DensityMatrix {
        self.average((0..self.d).map(|y| x * self.d + y))
    }

    /// `ρ^y = d⁻¹ Σ_x σ^{xy}`.
    pub fn y_conditional(&self, y: usize) -> DensityMatrix {
        self.average((0..self.d).map(|x| x * self.d + y))
    }

    /// Reduced state on `AB`: the mean of all blocks.
    pub fn omega_ab(&self) -> DensityMatrix {
        self.average(0..self.blocks.len())
    }

    /// Reduced state on `XY`: `I/d²` since every block has unit trace.
    pub fn omega_xy(&self) -> DensityMatrix {
        DensityMatrix::maximally_mixed(Dims::new(vec![self.d, self.d]).expect("flag dim positive"))
    }

    /// Reduced state on `XAB`, block-diagonal in `x`.
    pub fn omega_xab(&self) -> DensityMatrix {
        flagged(&(0..self.d).map(|x| self.x_conditional(x)).collect::<Vec<_>>())
    }

    /// Reduced state on `YAB`, block-diagonal in `y`.
    pub fn omega_yab(&self) -> DensityMatrix {
        flagged(&(0..self.d).map(|y| self.y_conditional(y)).collect::<Vec<_>>())
    }

    /// The full `d² d_A d_B`-dimensional matrix.
    pub fn assemble(&self) -> DensityMatrix {
        let inner = flagged(&self.blocks);
        DensityMatrix::from_parts(inner.matrix().clone(), self.dims())
    }

    /// `(I(XY:AB), I(X:AB), I(Y:AB))` from block spectra via the joint
    /// entropy identity.
    pub fn mutual_entropies(&self, q: EntropicParameter) -> Result<IqTriple> {
        q.require_at_least_one()?;
        let d = self.d as f64;
        let h_d = q_log_unchecked(d, q);
        let h_d2 = q_log_unchecked(d * d, q);
        let s_ab = tsallis(&self.omega_ab(), q);
        let wd = q.weight(1.0 / d);
        let wd2 = q.weight(1.0 / (d * d));
        let s_xyab = wd2 * self.blocks.iter().map(|b| tsallis(b, q)).sum::<f64>() + h_d2;
        let s_xab = wd * (0..self.d).map(|x| tsallis(&self.x_conditional(x), q)).sum::<f64>() + h_d;
        let s_yab = wd * (0..self.d).map(|y| tsallis(&self.y_conditional(y), q)).sum::<f64>() + h_d;
        Ok(IqTriple {
            xy_ab: h_d2 + s_ab - s_xyab,
            x_ab: h_d + s_ab - s_xab,
            y_ab: h_d + s_ab - s_yab,
        })
    }
}

/// `Σ_i n⁻¹ |i⟩⟨i| ⊗ ρ_i` for equally weighted blocks.
fn flagged(blocks: &[DensityMatrix]) -> DensityMatrix {
    let n = blocks.len();
    let k = blocks[0].dim();
    let w = C64::new(1.0 / n as f64, 0.0);
    let mut mat = CMatrix::zeros(n * k, n * k);
    for (i, b) in blocks.iter().enumerate() {
        mat.view_mut((i * k, i * k), (k, k)).copy_from(&(b.matrix() * w));
    }
    let dims = Dims::new(vec![n]).expect("nonempty").concat(blocks[0].dims());
    DensityMatrix::from_parts(mat, dims)
}

#[derive(Serialize, Deserialize)]
struct CcqBlock {
    x: usize,
    y: usize,
    state: StateRecord,
}

#[derive(Serialize, Deserialize)]
struct CcqRecord {
    form: CcqForm,
    blocks: Vec<CcqBlock>,
}

impl From<CcqState> for CcqRecord {
    fn from(s: CcqState) -> Self {
        let d = s.d;
        Self {
            form: s.form,
            blocks: s
                .blocks
                .iter()
                .enumerate()
                .map(|(i, b)| CcqBlock {
                    x: i / d,
                    y: i % d,
                    state: StateRecord::from(b),
                })
                .collect(),
        }
    }
}

impl TryFrom<CcqRecord> for CcqState {
    type Error = Error;

    fn try_from(r: CcqRecord) -> Result<Self> {
        let n = r.blocks.len();
        let d = (n as f64).sqrt().round() as usize;
        if d == 0 || d * d != n {
            return Err(Error::Record(format!("{n} blocks is not a square count")));
        }
        let mut slots: Vec<Option<DensityMatrix>> = vec![None; n];
        for b in &r.blocks {
            if b.x >= d || b.y >= d {
                return Err(Error::Record(format!("block index ({}, {}) out of range", b.x, b.y)));
            }
            let slot = &mut slots[b.x * d + b.y];
            if slot.is_some() {
                return Err(Error::Record(format!("duplicate block ({}, {})", b.x, b.y)));
            }
            *slot = Some(DensityMatrix::try_from(&b.state)?);
        }
        let mut state = CcqState::general(slots.into_iter().map(|s| s.expect("all slots filled")).collect())?;
        state.form = r.form;
        Ok(state)
    }
}

/// Three Tsallis-q mutual entropies of the ccq state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IqTriple {
    pub xy_ab: f64,
    pub x_ab: f64,
    pub y_ab: f64,
}

impl IqTriple {
    /// `I(XY:AB) - I(X:AB) - I(Y:AB)`.
    pub fn subadditivity_gap(&self) -> f64 {
        self.xy_ab - self.x_ab - self.y_ab
    }

    pub fn max_abs_diff(&self, other: &IqTriple) -> f64 {
        (self.xy_ab - other.xy_ab)
            .abs()
            .max((self.x_ab - other.x_ab).abs())
            .max((self.y_ab - other.y_ab).abs())
    }
}

/// `ρ_AB` zero-padded to equal local dimensions.
pub fn square_bipartite(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dims().len() != 2 {
        return Err(Error::InvalidDims(format!("expected a bipartite state, got {:?}", rho.dims())));
    }
    embed(rho, &square_dims(rho.dims()))
}

/// Everything derived from the spectral decomposition of `ρ_B`.
struct Frame {
    rho: DensityMatrix,
    pair: WeylPair,
    fourier: FourierBasis,
}

fn frame(rho_ab: &DensityMatrix) -> Result<Frame> {
    let rho = square_bipartite(rho_ab)?;
    let rho_b = partial_trace(&rho, &[1])?;
    let (pair, fourier) = build_weyl(&eigendecompose(&rho_b))?;
    Ok(Frame { rho, pair, fourier })
}

/// The Weyl-form ccq state of `ρ_AB` (embedded to equal local dims first).
pub fn build_ccq(rho_ab: &DensityMatrix) -> Result<CcqState> {
    let f = frame(rho_ab)?;
    Ok(ccq_from_frame(&f))
}

fn ccq_from_frame(f: &Frame) -> CcqState {
    let d = f.pair.dim();
    let id = CMatrix::identity(d, d);
    let mut blocks = Vec::with_capacity(d * d);
    for x in 0..d {
        for y in 0..d {
            let u = kron(&id, &f.pair.displacement(x, y));
            let m = &u * f.rho.matrix() * u.adjoint();
            blocks.push(DensityMatrix::from_parts(hermitize(&m), f.rho.dims().clone()));
        }
    }
    CcqState {
        d,
        form: CcqForm::Weyl,
        blocks,
    }
}

/// `E0 = {λ_i, σ_A^i}` and `E1 = {1/d, τ_A^j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedEnsembles {
    pub e0: Ensemble,
    pub e1: Ensemble,
}

/// Outcome weights below this get the placeholder state.
const ZERO_WEIGHT: f64 = 1e-14;

/// Ensemble on `A` from measuring `B` in the orthonormal columns of `basis`.
/// Zero-weight outcomes carry `I/d_A`.
pub(crate) fn measured_ensemble(rho: &DensityMatrix, basis: &CMatrix) -> Result<Ensemble> {
    let dims_a = rho.dims().select(&[0]);
    let mut probs = Vec::with_capacity(basis.ncols());
    let mut states = Vec::with_capacity(basis.ncols());
    for k in 0..basis.ncols() {
        let m = condition_right(rho, &basis.column(k).clone_owned())?;
        let p = trace_re(&m);
        if p > ZERO_WEIGHT {
            probs.push(p);
            states.push(DensityMatrix::from_parts(hermitize(&(m / C64::new(p, 0.0))), dims_a.clone()));
        } else {
            probs.push(0.0);
            states.push(DensityMatrix::maximally_mixed(dims_a.clone()));
        }
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(Ensemble::from_parts(probs, states))
}

/// Ensembles on `A` induced by measuring `B` in the eigenbasis of `ρ_B` and
/// in its Fourier basis.
pub fn induced_ensembles(rho_ab: &DensityMatrix) -> Result<InducedEnsembles> {
    let f = frame(rho_ab)?;
    ensembles_from_frame(&f)
}

fn ensembles_from_frame(f: &Frame) -> Result<InducedEnsembles> {
    let e0 = measured_ensemble(&f.rho, f.pair.basis())?;
    let e1 = measured_ensemble(&f.rho, f.fourier.vectors())?;
    Ok(InducedEnsembles { e0, e1 })
}

/// The three mutual entropies of the ccq state from the closed forms in terms
/// of `S_q(ρ_A)`, `S_q(ρ_B)`, `S_q(ρ_AB)`, `χ_q(E0)` and `χ_q(E1)`.
pub fn closed_form_iq(rho_ab: &DensityMatrix, q: EntropicParameter) -> Result<IqTriple> {
    q.require_at_least_one()?;
    let f = frame(rho_ab)?;
    let ens = ensembles_from_frame(&f)?;
    let d = f.pair.dim() as f64;
    let h = q_log_unchecked(d, q);
    let dq = if q.is_limit() { 1.0 } else { d.powf(1.0 - q.value()) };
    let s_a = tsallis(&partial_trace(&f.rho, &[0])?, q);
    let s_b = tsallis(&partial_trace(&f.rho, &[1])?, q);
    let s_ab = tsallis(&f.rho, q);
    Ok(IqTriple {
        xy_ab: h + dq * s_a - dq * dq * s_ab,
        x_ab: h - dq * s_b + dq * tsallis_q_difference(&ens.e0, q),
        y_ab: (1.0 - dq) * h + dq * tsallis_q_difference(&ens.e1, q),
    })
}

/// The three mutual entropies evaluated without the closed forms: on the
/// assembled matrix when `d ≤ 4`, from block spectra otherwise.
pub fn direct_iq(rho_ab: &DensityMatrix, q: EntropicParameter) -> Result<IqTriple> {
    q.require_at_least_one()?;
    let ccq = build_ccq(rho_ab)?;
    if ccq.flag_dim() > ASSEMBLY_LIMIT {
        return ccq.mutual_entropies(q);
    }
    let omega = ccq.assemble();
    let xy_ab = tsallis_mutual(&omega, &Bipartition::new(4, &[0, 1])?, q)?;
    let xab = partial_trace(&omega, &[0, 2, 3])?;
    let yab = partial_trace(&omega, &[1, 2, 3])?;
    let flag_cut = Bipartition::first(3)?;
    Ok(IqTriple {
        xy_ab,
        x_ab: tsallis_mutual(&xab, &flag_cut, q)?,
        y_ab: tsallis_mutual(&yab, &flag_cut, q)?,
    })
}

/// Largest absolute difference between [`closed_form_iq`] and [`direct_iq`].
pub fn verify_closed_forms(rho_ab: &DensityMatrix, q: EntropicParameter) -> Result<f64> {
    Ok(closed_form_iq(rho_ab, q)?.max_abs_diff(&direct_iq(rho_ab, q)?))
}

#[cfg(test)]
mod tests;
