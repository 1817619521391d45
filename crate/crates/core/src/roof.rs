//! Roof extensions of pure-state entanglement functionals.
//!
//! Decompositions of `ρ = Σ λ_i |e_i⟩⟨e_i|` are parametrized by `m × r`
//! isometries `V` through `|φ̃_x⟩ = Σ_i V_{xi} √λ_i |e_i⟩`; rank-1 measurements
//! on a `d`-dimensional factor by `n × d` isometries `W` with
//! `|m_x⟩ = conj(W_{x·})`. Both searches share one multi-start hill climb.
//! Minimizing roofs return upper bounds and maximizing roofs lower bounds,
//! since a finite search can only exhibit feasible points.

use rayon::prelude::*;
use rand::Rng as _;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::ccq::{measured_ensemble, weyl_from_basis};
use crate::entropy::{
    renyi_of_spectrum, tsallis, tsallis_of_spectrum, tsallis_q_difference, EntropicParameter, Ensemble,
};
use crate::error::{Error, Result};
use crate::qstate::{
    condition_right, eigendecompose, haar_unitary_with, hermitian_eigenvalues, isometry_deviation,
    orthonormalize_columns, partial_trace, Bipartition, CMatrix, CVector, DensityMatrix, Dims,
    EigenDecomposition, PureState, C64,
};
use crate::seed::{self, Rng};

/// Members lighter than this are dropped from decompositions.
pub const MIN_WEIGHT: f64 = 1e-12;
/// Tolerance for `Σ M_x = I` and the rank-1 test.
pub const MEASUREMENT_TOL: f64 = 1e-10;
/// Tolerance for decomposition reassembly.
pub const RECONSTRUCTION_TOL: f64 = 1e-9;

/// A pure-state entanglement measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PureFunctional {
    /// `S_q` of either marginal.
    Tsallis(EntropicParameter),
    /// Rényi-α entropy of either marginal.
    Renyi(EntropicParameter),
    /// `4 det ρ_A` with `A` the left side of the cut, which must be a qubit.
    Tangle,
}

impl PureFunctional {
    fn of_spectrum(self, spec: &[f64]) -> f64 {
        match self {
            Self::Tsallis(q) => tsallis_of_spectrum(spec, q),
            Self::Renyi(a) => renyi_of_spectrum(spec, a),
            Self::Tangle => 2.0 * (1.0 - spec.iter().map(|x| x * x).sum::<f64>()),
        }
    }

    fn check(self, dims: &Dims, cut: &Bipartition) -> Result<()> {
        check_cut(dims, cut)?;
        if self == Self::Tangle {
            let da = dims.select(cut.left()).total();
            if da != 2 {
                return Err(Error::NotQubit(da));
            }
        }
        Ok(())
    }

    /// Value on a pure state.
    pub fn evaluate(self, psi: &PureState, cut: &Bipartition) -> Result<f64> {
        self.check(psi.dims(), cut)?;
        let geom = CutGeometry::new(psi.dims(), cut);
        Ok(self.of_spectrum(&geom.spectrum(psi.amplitudes(), 1.0)))
    }
}

fn check_cut(dims: &Dims, cut: &Bipartition) -> Result<()> {
    if cut.n_subsystems() != dims.len() {
        return Err(Error::InvalidSelection(format!(
            "cut over {} subsystems applied to a {}-party state",
            cut.n_subsystems(),
            dims.len()
        )));
    }
    Ok(())
}

/// Index bookkeeping for Schmidt spectra across a fixed cut.
struct CutGeometry {
    map: Vec<usize>,
    rows: usize,
    cols: usize,
}

impl CutGeometry {
    fn new(dims: &Dims, cut: &Bipartition) -> Self {
        Self {
            map: dims.reorder_map(&cut.order()),
            rows: dims.select(cut.left()).total(),
            cols: dims.select(cut.right()).total(),
        }
    }

    /// Marginal spectrum of `v / √norm`, computed on the smaller side.
    fn spectrum(&self, v: &CVector, norm: f64) -> Vec<f64> {
        let m = CMatrix::from_fn(self.rows, self.cols, |i, j| v[self.map[i * self.cols + j]]);
        let g = if self.rows <= self.cols { &m * m.adjoint() } else { m.adjoint() * &m };
        let mut spec = hermitian_eigenvalues(&g);
        spec.iter_mut().for_each(|x| *x /= norm);
        spec
    }
}

/// `T_q(|ψ⟩) = S_q(ρ_A)` across `cut`.
pub fn tsallis_entanglement_pure(psi: &PureState, cut: &Bipartition, q: EntropicParameter) -> Result<f64> {
    PureFunctional::Tsallis(q).evaluate(psi, cut)
}

/// Rényi-α entanglement of a pure state.
pub fn renyi_entanglement_pure(psi: &PureState, cut: &Bipartition, alpha: EntropicParameter) -> Result<f64> {
    PureFunctional::Renyi(alpha).evaluate(psi, cut)
}

/// `τ = 4 det ρ_A`, `A` the left side of `cut`.
pub fn tangle_pure(psi: &PureState, cut: &Bipartition) -> Result<f64> {
    PureFunctional::Tangle.evaluate(psi, cut)
}

/// Weighted pure states reproducing a target state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PureDecomposition {
    members: Vec<(f64, PureState)>,
    target: DensityMatrix,
}

impl PureDecomposition {
    /// Checks the weights and that `Σ p_i |ψ_i⟩⟨ψ_i|` equals `target` to `1e-9`.
    pub fn new(members: Vec<(f64, PureState)>, target: DensityMatrix) -> Result<Self> {
        crate::qstate::Probabilities::new(members.iter().map(|m| m.0).collect::<Vec<_>>())?;
        if let Some((_, bad)) = members.iter().find(|(_, s)| s.dims() != target.dims()) {
            return Err(Error::DimensionMismatch {
                expected: target.dim(),
                got: bad.dims().total(),
            });
        }
        let d = Self { members, target };
        let err = d.reconstruction_error();
        if err > RECONSTRUCTION_TOL {
            return Err(Error::InvalidProbabilities(format!(
                "decomposition misses its target by {err:e}"
            )));
        }
        Ok(d)
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn target(&self) -> &DensityMatrix {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let n = self.target.dim();
        let mut out = CMatrix::zeros(n, n);
        for (p, psi) in &self.members {
            let a = psi.amplitudes();
            out += (a * a.adjoint()) * C64::new(*p, 0.0);
        }
        out
    }

    /// Largest entrywise deviation from the target.
    pub fn reconstruction_error(&self) -> f64 {
        crate::qstate::max_abs_diff(&self.reconstruct(), self.target.matrix())
    }

    /// `Σ p_i f(|ψ_i⟩)`.
    pub fn average(&self, f: PureFunctional, cut: &Bipartition) -> Result<f64> {
        self.weighted(f, cut, |p| p)
    }

    /// The q-expectation `Σ p_i^q f(|ψ_i⟩)`.
    pub fn q_average(&self, f: PureFunctional, cut: &Bipartition, q: EntropicParameter) -> Result<f64> {
        self.weighted(f, cut, |p| q.weight(p))
    }

    fn weighted(&self, f: PureFunctional, cut: &Bipartition, w: impl Fn(f64) -> f64) -> Result<f64> {
        f.check(self.target.dims(), cut)?;
        let geom = CutGeometry::new(self.target.dims(), cut);
        Ok(self
            .members
            .iter()
            .filter(|(p, _)| *p >= MIN_WEIGHT)
            .map(|(p, psi)| w(*p) * f.of_spectrum(&geom.spectrum(psi.amplitudes(), 1.0)))
            .sum())
    }
}

/// Columns `√λ_i |e_i⟩` over the support of `ρ`.
fn weighted_support(eig: &EigenDecomposition) -> CMatrix {
    let r = eig.rank().max(1);
    let mut b = eig.vectors().columns(0, r).clone_owned();
    for i in 0..r {
        b.column_mut(i).scale_mut(eig.values()[i].max(0.0).sqrt());
    }
    b
}

/// The decomposition induced by an `m × r` isometry through
/// `|φ̃_x⟩ = Σ_i V_{xi} √λ_i |e_i⟩`; members lighter than `1e-12` are dropped.
pub fn decomposition_from_isometry(eig: &EigenDecomposition, v: &CMatrix, dims: &Dims) -> Result<PureDecomposition> {
    let r = eig.rank().max(1);
    if eig.dim() != dims.total() {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            got: eig.dim(),
        });
    }
    if v.nrows() < r {
        return Err(Error::CardinalityBelowRank { m: v.nrows(), rank: r });
    }
    if v.ncols() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: v.ncols(),
        });
    }
    let dev = isometry_deviation(v);
    if dev > 1e-10 {
        return Err(Error::NotIsometry(dev));
    }
    let target = DensityMatrix::new(crate::qstate::hermitize(&eig.reconstruct()), dims.clone())?;
    Ok(decomposition_unchecked(&weighted_support(eig), v, target))
}

fn decomposition_unchecked(b: &CMatrix, v: &CMatrix, target: DensityMatrix) -> PureDecomposition {
    let phi = b * v.transpose();
    let mut members = Vec::with_capacity(phi.ncols());
    for x in 0..phi.ncols() {
        let col = phi.column(x).clone_owned();
        let p = col.norm_squared();
        if p >= MIN_WEIGHT {
            let psi = PureState::from_parts(col / C64::new(p.sqrt(), 0.0), target.dims().clone());
            members.push((p, psi));
        }
    }
    let total: f64 = members.iter().map(|m| m.0).sum();
    members.iter_mut().for_each(|m| m.0 /= total);
    PureDecomposition { members, target }
}

/// A POVM `{|m_x⟩⟨m_x|}` of rank-1 elements.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneMeasurement {
    vectors: Vec<CVector>,
}

impl RankOneMeasurement {
    /// From the operators; each must be positive with one nonzero eigenvalue.
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let mut vectors = Vec::with_capacity(operators.len());
        for op in &operators {
            let dev = crate::qstate::hermitian_deviation(op);
            if dev > MEASUREMENT_TOL {
                return Err(Error::NotHermitian(dev));
            }
            let (vals, vecs) = crate::qstate::hermitian_eigh(op);
            if vals.last().copied().unwrap_or(0.0) < -MEASUREMENT_TOL {
                return Err(Error::NotPositive(*vals.last().unwrap()));
            }
            if vals.len() > 1 && vals[1] > MEASUREMENT_TOL {
                return Err(Error::InvalidMeasurement(format!(
                    "element has second eigenvalue {:e}",
                    vals[1]
                )));
            }
            vectors.push(vecs.column(0) * C64::new(vals[0].max(0.0).sqrt(), 0.0));
        }
        Self::from_vectors(vectors)
    }

    /// From the vectors `|m_x⟩`; they must resolve the identity.
    pub fn from_vectors(vectors: Vec<CVector>) -> Result<Self> {
        let d = vectors.first().map(|v| v.len()).ok_or_else(|| {
            Error::InvalidMeasurement("no outcomes".into())
        })?;
        if vectors.iter().any(|v| v.len() != d) {
            return Err(Error::InvalidMeasurement("outcome vectors differ in length".into()));
        }
        let m = Self { vectors };
        let dev = m.completeness_deviation();
        if dev > MEASUREMENT_TOL {
            return Err(Error::InvalidMeasurement(format!("Σ M_x deviates from I by {dev:e}")));
        }
        Ok(m)
    }

    /// From an `n × d` isometry: `|m_x⟩` is the conjugated row `x`.
    pub fn from_isometry(w: &CMatrix) -> Result<Self> {
        let dev = isometry_deviation(w);
        if dev > MEASUREMENT_TOL {
            return Err(Error::NotIsometry(dev));
        }
        Ok(Self {
            vectors: isometry_rows(w),
        })
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn operators(&self) -> Vec<CMatrix> {
        self.vectors.iter().map(|v| v * v.adjoint()).collect()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Dimension of the measured system.
    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    /// `‖Σ M_x − I‖_max`.
    pub fn completeness_deviation(&self) -> f64 {
        let d = self.dim();
        let sum = self.operators().into_iter().fold(CMatrix::zeros(d, d), |a, b| a + b);
        crate::qstate::max_abs_diff(&sum, &CMatrix::identity(d, d))
    }

    fn as_columns(&self) -> CMatrix {
        CMatrix::from_columns(&self.vectors)
    }

    /// Ensemble `{p_x, ρ_A^x}` on `A` after measuring `B` of a bipartite `ρ_AB`.
    pub fn ensemble(&self, rho_ab: &DensityMatrix) -> Result<Ensemble> {
        check_bipartite(rho_ab)?;
        if rho_ab.dims().get(1) != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho_ab.dims().get(1),
                got: self.dim(),
            });
        }
        measured_ensemble(rho_ab, &self.as_columns())
    }

    /// Tsallis-q difference of [`Self::ensemble`].
    pub fn chi_q(&self, rho_ab: &DensityMatrix, q: EntropicParameter) -> Result<f64> {
        Ok(tsallis_q_difference(&self.ensemble(rho_ab)?, q))
    }
}

impl Serialize for RankOneMeasurement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let re: Vec<Vec<f64>> = self.vectors.iter().map(|v| v.iter().map(|z| z.re).collect()).collect();
        let im: Vec<Vec<f64>> = self.vectors.iter().map(|v| v.iter().map(|z| z.im).collect()).collect();
        #[derive(Serialize)]
        struct Rec {
            re: Vec<Vec<f64>>,
            im: Vec<Vec<f64>>,
        }
        Rec { re, im }.serialize(s)
    }
}

fn isometry_rows(w: &CMatrix) -> Vec<CVector> {
    (0..w.nrows()).map(|x| w.row(x).transpose().map(|z| z.conj())).collect()
}

fn check_bipartite(rho: &DensityMatrix) -> Result<()> {
    if rho.dims().len() != 2 {
        return Err(Error::InvalidDims(format!("expected a bipartite state, got {:?}", rho.dims())));
    }
    Ok(())
}

/// Search effort for the roof optimizers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerBudget {
    /// Independent hill climbs.
    pub restarts: usize,
    /// Extra random candidates scored per restart.
    pub samples_per_restart: usize,
    /// Perturbation steps per hill climb.
    pub refine_steps: usize,
    pub seed: u64,
}

impl Default for OptimizerBudget {
    fn default() -> Self {
        Self {
            restarts: 64,
            samples_per_restart: 16,
            refine_steps: 300,
            seed: 0,
        }
    }
}

impl OptimizerBudget {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("budget.restarts must be at least 1".into()));
        }
        Ok(())
    }
}

/// Which side of the true roof value a result lies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundDirection {
    Upper,
    Lower,
}

/// Witness that reproduces a roof value.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    Decomposition {
        decomposition: PureDecomposition,
        cut: Bipartition,
        functional: PureFunctional,
    },
    Measurement {
        measurement: RankOneMeasurement,
        state: DensityMatrix,
        q: EntropicParameter,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RoofResult {
    pub value: f64,
    pub bound_direction: BoundDirection,
    pub certificate: Certificate,
    pub restarts_used: usize,
    pub converged: bool,
    /// True when the value is the exact roof (pure input).
    pub exact: bool,
}

impl RoofResult {
    /// Recomputes the value from the certificate alone.
    pub fn reevaluate(&self) -> Result<f64> {
        match &self.certificate {
            Certificate::Decomposition {
                decomposition,
                cut,
                functional,
            } => decomposition.average(*functional, cut),
            Certificate::Measurement { measurement, state, q } => measurement.chi_q(state, *q),
        }
    }
}

/// Multi-start search over `n × k` isometries with `n` cycling through
/// `sizes` by restart index.
struct Search<'a> {
    k: usize,
    sizes: Vec<usize>,
    maximize: bool,
    eval: &'a (dyn Fn(&CMatrix) -> f64 + Sync),
    fixed: Vec<CMatrix>,
}

struct Found {
    point: CMatrix,
    converged: bool,
}

const STEP_INIT: f64 = 0.3;
const STEP_MAX: f64 = 0.5;
const STEP_MIN: f64 = 1e-6;
const CONVERGENCE_TOL: f64 = 1e-7;

fn gaussian(rng: &mut Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_isometry(rng: &mut Rng, n: usize, k: usize) -> CMatrix {
    haar_unitary_with(rng, n).columns(0, k).clone_owned()
}

impl Search<'_> {
    fn better(&self, a: f64, b: f64) -> bool {
        if self.maximize {
            a > b
        } else {
            a < b
        }
    }

    /// One restart: a hill climb from a fixed start plus independent samples.
    /// Each phase draws from its own stream so longer budgets extend, rather
    /// than reshuffle, the sequence of candidates.
    fn restart(&self, budget: &OptimizerBudget, index: usize) -> (f64, CMatrix) {
        let n = self.sizes[index % self.sizes.len()];
        let k = self.k;
        let mut init = seed::rng(seed::derive2(budget.seed, index as u64, 0));
        let mut point = random_isometry(&mut init, n, k);
        let mut value = (self.eval)(&point);

        let mut walk = seed::rng(seed::derive2(budget.seed, index as u64, 1));
        let mut step = STEP_INIT;
        let scale = 1.0 / (2.0 * n as f64).sqrt();
        for _ in 0..budget.refine_steps {
            let noise = CMatrix::from_fn(n, k, |_, _| gaussian(&mut walk) * (step * scale));
            let Some(cand) = orthonormalize_columns(&(&point + noise)) else {
                continue;
            };
            let v = (self.eval)(&cand);
            if self.better(v, value) {
                point = cand;
                value = v;
                step = (step * 1.5).min(STEP_MAX);
            } else {
                step = (step * 0.9).max(STEP_MIN);
            }
        }

        let mut sampler = seed::rng(seed::derive2(budget.seed, index as u64, 2));
        for _ in 0..budget.samples_per_restart {
            let cand = random_isometry(&mut sampler, n, k);
            let v = (self.eval)(&cand);
            if self.better(v, value) {
                point = cand;
                value = v;
            }
        }
        (value, point)
    }

    fn run(&self, budget: &OptimizerBudget) -> Result<Found> {
        budget.validate()?;
        let outcomes: Vec<(f64, CMatrix)> = (0..budget.restarts)
            .into_par_iter()
            .map(|i| self.restart(budget, i))
            .collect();
        let mut best: Option<(f64, CMatrix)> = None;
        let consider = |v: f64, p: &CMatrix, best: &mut Option<(f64, CMatrix)>| {
            if best.as_ref().is_none_or(|(b, _)| self.better(v, *b)) {
                *best = Some((v, p.clone()));
            }
        };
        for p in &self.fixed {
            consider((self.eval)(p), p, &mut best);
        }
        // converged: the last quarter of restarts changed the best by < 1e-7
        let early = (3 * budget.restarts).div_ceil(4);
        let mut early_best = None;
        for (i, (v, p)) in outcomes.iter().enumerate() {
            if i == early {
                early_best = best.as_ref().map(|b| b.0);
            }
            consider(*v, p, &mut best);
        }
        let (value, point) = best.expect("at least one restart");
        let early_best = early_best.unwrap_or(value);
        Ok(Found {
            point,
            converged: (value - early_best).abs() < CONVERGENCE_TOL,
        })
    }
}

fn roof(
    rho: &DensityMatrix,
    cut: &Bipartition,
    functional: PureFunctional,
    budget: &OptimizerBudget,
    maximize: bool,
) -> Result<RoofResult> {
    functional.check(rho.dims(), cut)?;
    budget.validate()?;
    let direction = if maximize { BoundDirection::Lower } else { BoundDirection::Upper };
    let eig = eigendecompose(rho);
    let r = eig.rank().max(1);
    let b = weighted_support(&eig);
    if rho.is_pure() {
        let v = CMatrix::identity(1, 1);
        let decomposition = decomposition_unchecked(&b.columns(0, 1).clone_owned(), &v, rho.clone());
        let value = decomposition.average(functional, cut)?;
        return Ok(RoofResult {
            value,
            bound_direction: direction,
            certificate: Certificate::Decomposition {
                decomposition,
                cut: cut.clone(),
                functional,
            },
            restarts_used: 0,
            converged: true,
            exact: true,
        });
    }
    let geom = CutGeometry::new(rho.dims(), cut);
    let eval = |v: &CMatrix| {
        let phi = &b * v.transpose();
        let mut total = 0.0;
        for x in 0..phi.ncols() {
            let col = phi.column(x).clone_owned();
            let p = col.norm_squared();
            if p >= MIN_WEIGHT {
                total += p * functional.of_spectrum(&geom.spectrum(&col, p));
            }
        }
        total
    };
    let search = Search {
        k: r,
        sizes: (r..=r * r).collect(),
        maximize,
        eval: &eval,
        fixed: vec![CMatrix::identity(r, r)],
    };
    let found = search.run(budget)?;
    let decomposition = decomposition_unchecked(&b, &found.point, rho.clone());
    // report the certificate's own value so re-evaluation is exact
    let value = decomposition.average(functional, cut)?;
    Ok(RoofResult {
        value,
        bound_direction: direction,
        certificate: Certificate::Decomposition {
            decomposition,
            cut: cut.clone(),
            functional,
        },
        restarts_used: budget.restarts,
        converged: found.converged,
        exact: false,
    })
}

/// Convex roof (minimum average over decompositions); an upper bound.
pub fn convex_roof(
    rho: &DensityMatrix,
    cut: &Bipartition,
    functional: PureFunctional,
    budget: &OptimizerBudget,
) -> Result<RoofResult> {
    roof(rho, cut, functional, budget, false)
}

/// Concave roof (maximum average over decompositions); a lower bound.
pub fn concave_roof(
    rho: &DensityMatrix,
    cut: &Bipartition,
    functional: PureFunctional,
    budget: &OptimizerBudget,
) -> Result<RoofResult> {
    roof(rho, cut, functional, budget, true)
}

/// Eigenbasis and Fourier-basis vectors of `ρ_B`.
fn b_bases(rho_ab: &DensityMatrix) -> Result<(CMatrix, CMatrix)> {
    let rho_b = partial_trace(rho_ab, &[1])?;
    let (pair, fourier) = weyl_from_basis(eigendecompose(&rho_b).vectors())?;
    Ok((pair.basis().clone(), fourier.vectors().clone()))
}

/// The `2d`-outcome measurement `{|e_i⟩⟨e_i|/2, |ẽ_j⟩⟨ẽ_j|/2}` on `B`, with
/// `{|e_i⟩}` the eigenbasis of `ρ_B` and `{|ẽ_j⟩}` its Fourier basis.
pub fn qb_split_measurement(rho_ab: &DensityMatrix) -> Result<RankOneMeasurement> {
    check_bipartite(rho_ab)?;
    let (e, f) = b_bases(rho_ab)?;
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let vectors = e
        .column_iter()
        .chain(f.column_iter())
        .map(|c| c.clone_owned() * h)
        .collect();
    RankOneMeasurement::from_vectors(vectors)
}

/// Upper bound on the one-way unlocalizable q-entanglement
/// `min_M χ_q({p_x, ρ_A^x})` over rank-1 measurements `M` on `B`.
///
/// The eigenbasis, Fourier and split measurements are always among the
/// candidates, so the result never exceeds any of their `χ_q`.
pub fn unlocalizable_q_entanglement(
    rho_ab: &DensityMatrix,
    q: EntropicParameter,
    budget: &OptimizerBudget,
) -> Result<RoofResult> {
    q.require_at_least_one()?;
    check_bipartite(rho_ab)?;
    budget.validate()?;
    let db = rho_ab.dims().get(1);
    let s_a = tsallis(&partial_trace(rho_ab, &[0])?, q);
    let eval = |w: &CMatrix| {
        let mut lost = 0.0;
        for x in 0..w.nrows() {
            let m = w.row(x).transpose().map(|z| z.conj());
            let k = condition_right(rho_ab, &m).expect("dims checked above");
            let p = k.trace().re;
            if p >= MIN_WEIGHT {
                let spec: Vec<f64> = hermitian_eigenvalues(&k).into_iter().map(|l| l / p).collect();
                lost += q.weight(p) * tsallis_of_spectrum(&spec, q);
            }
        }
        s_a - lost
    };
    let (e, f) = b_bases(rho_ab)?;
    let mut split = CMatrix::zeros(2 * db, db);
    split.view_mut((0, 0), (db, db)).copy_from(&e.adjoint());
    split.view_mut((db, 0), (db, db)).copy_from(&f.adjoint());
    split /= C64::new(2f64.sqrt(), 0.0);
    let search = Search {
        k: db,
        sizes: (db..=db * db).collect(),
        maximize: false,
        eval: &eval,
        fixed: vec![e.adjoint(), f.adjoint(), split],
    };
    let found = search.run(budget)?;
    let measurement = RankOneMeasurement {
        vectors: isometry_rows(&found.point),
    };
    let value = measurement.chi_q(rho_ab, q)?;
    Ok(RoofResult {
        value,
        bound_direction: BoundDirection::Upper,
        certificate: Certificate::Measurement {
            measurement,
            state: rho_ab.clone(),
            q,
        },
        restarts_used: budget.restarts,
        converged: found.converged,
        exact: false,
    })
}
