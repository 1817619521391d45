//! Scalar entropic functionals.
//!
//! Everything is in nats. Tsallis and Rényi quantities take an
//! [`EntropicParameter`]; when `|q - 1| < 1e-9` the removable singularity is
//! replaced by the von Neumann / Shannon limit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{
    frobenius, hermitian_eigh, partial_trace, tensor_product, Bipartition, C64,
    CMatrix, DensityMatrix, Dims, Probabilities, RANK_TOL, VALIDITY_TOL,
};

/// Width of the band around `q = 1` evaluated with limit formulas.
pub const LIMIT_BAND: f64 = 1e-9;

/// The order `q` of a Tsallis entropy (also used as the Rényi order `α`).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EntropicParameter(f64);

impl EntropicParameter {
    pub fn new(q: f64) -> Result<Self> {
        if q > 0.0 && q.is_finite() {
            Ok(Self(q))
        } else {
            Err(Error::InvalidParameter(q))
        }
    }

    /// `q = 1`.
    pub const ONE: Self = Self(1.0);

    pub fn value(self) -> f64 {
        self.0
    }

    /// True when the limit formulas are used.
    pub fn is_limit(self) -> bool {
        (self.0 - 1.0).abs() < LIMIT_BAND
    }

    /// Accepts `q >= 1`, including the limit band just below one.
    pub(crate) fn require_at_least_one(self) -> Result<Self> {
        if self.0 >= 1.0 || self.is_limit() {
            Ok(self)
        } else {
            Err(Error::ParameterBelowOne(self.0))
        }
    }

    /// `q^`-power used for q-expectation weights; `p` itself on the limit
    /// branch.
    pub(crate) fn weight(self, p: f64) -> f64 {
        if p <= 0.0 {
            0.0
        } else if self.is_limit() {
            p
        } else {
            p.powf(self.0)
        }
    }
}

impl TryFrom<f64> for EntropicParameter {
    type Error = Error;
    fn try_from(q: f64) -> Result<Self> {
        Self::new(q)
    }
}

impl From<EntropicParameter> for f64 {
    fn from(q: EntropicParameter) -> f64 {
        q.0
    }
}

/// Generalized logarithm `(x^{1-q} - 1)/(1 - q)`, `ln x` in the limit.
pub fn q_log(x: f64, q: EntropicParameter) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::NonPositiveArgument(x));
    }
    Ok(q_log_unchecked(x, q))
}

pub(crate) fn q_log_unchecked(x: f64, q: EntropicParameter) -> f64 {
    if q.is_limit() {
        x.ln()
    } else {
        let e = 1.0 - q.0;
        (x.powf(e) - 1.0) / e
    }
}

/// Spectrum entries at or below this count as zero. Eigensolver noise on a
/// zero eigenvalue is around `1e-16`, which `λ^q` with `q < 1` would inflate
/// to `1e-8` and more.
pub const SPECTRUM_FLOOR: f64 = 1e-14;

/// Tsallis entropy of a list of weights (eigenvalues or probabilities).
///
/// Entries at or below [`SPECTRUM_FLOOR`] contribute nothing.
pub fn tsallis_of_spectrum(spectrum: &[f64], q: EntropicParameter) -> f64 {
    if q.is_limit() {
        return shannon_of_spectrum(spectrum);
    }
    let s: f64 = spectrum.iter().filter(|&&l| l > SPECTRUM_FLOOR).map(|&l| l.powf(q.0)).sum();
    (1.0 - s) / (q.0 - 1.0)
}

/// `-Σ λ ln λ` over entries above [`SPECTRUM_FLOOR`].
pub fn shannon_of_spectrum(spectrum: &[f64]) -> f64 {
    -spectrum
        .iter()
        .filter(|&&l| l > SPECTRUM_FLOOR)
        .map(|&l| l * l.ln())
        .sum::<f64>()
}

/// Rényi entropy `ln(Σ λ^α)/(1 - α)` of a spectrum.
pub fn renyi_of_spectrum(spectrum: &[f64], alpha: EntropicParameter) -> f64 {
    if alpha.is_limit() {
        return shannon_of_spectrum(spectrum);
    }
    let s: f64 = spectrum.iter().filter(|&&l| l > SPECTRUM_FLOOR).map(|&l| l.powf(alpha.0)).sum();
    s.ln() / (1.0 - alpha.0)
}

/// Classical Tsallis entropy `H_q(P)`.
pub fn tsallis_classical(p: &Probabilities, q: EntropicParameter) -> f64 {
    tsallis_of_spectrum(p.as_slice(), q)
}

/// Quantum Tsallis entropy `S_q(ρ) = (1 - tr ρ^q)/(q - 1)`.
pub fn tsallis(rho: &DensityMatrix, q: EntropicParameter) -> f64 {
    tsallis_of_spectrum(&rho.spectrum(), q)
}

/// Von Neumann entropy `-tr ρ ln ρ`.
pub fn von_neumann(rho: &DensityMatrix) -> f64 {
    shannon_of_spectrum(&rho.spectrum())
}

/// Rényi-α entropy.
pub fn renyi_entropy(rho: &DensityMatrix, alpha: EntropicParameter) -> f64 {
    renyi_of_spectrum(&rho.spectrum(), alpha)
}

/// `S_q(ρ⊗σ) - S_q(ρ) - S_q(σ) - (1-q) S_q(ρ) S_q(σ)`; zero up to rounding.
pub fn pseudoadditivity_defect(rho: &DensityMatrix, sigma: &DensityMatrix, q: EntropicParameter) -> f64 {
    let joint = tsallis(&tensor_product(rho, sigma), q);
    let a = tsallis(rho, q);
    let b = tsallis(sigma, q);
    let coupling = if q.is_limit() { 0.0 } else { 1.0 - q.0 };
    joint - a - b - coupling * a * b
}

fn check_same_dims(states: &[DensityMatrix]) -> Result<&Dims> {
    let first = states
        .first()
        .ok_or_else(|| Error::InvalidProbabilities("no states".into()))?;
    for s in states {
        if s.dims() != first.dims() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                got: s.dim(),
            });
        }
    }
    Ok(first.dims())
}

fn check_lengths(p: &Probabilities, n: usize) -> Result<()> {
    if p.len() != n {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: n,
        });
    }
    Ok(())
}

/// Right-hand side `Σ p_i^q S_q(ρ_i) + H_q(P)` shared by both joint-entropy
/// identities.
fn q_expectation_side(p: &Probabilities, states: &[DensityMatrix], q: EntropicParameter) -> f64 {
    p.as_slice()
        .iter()
        .zip(states)
        .map(|(&pi, s)| q.weight(pi) * tsallis(s, q))
        .sum::<f64>()
        + tsallis_classical(p, q)
}

/// Joint entropy identity for flagged mixtures.
///
/// Returns `(S_q(Σ p_i ρ_i ⊗ |i⟩⟨i|), Σ p_i^q S_q(ρ_i) + H_q(P))`, the first
/// computed by diagonalizing the explicit block matrix.
pub fn joint_entropy_flagged(
    p: &Probabilities,
    states: &[DensityMatrix],
    q: EntropicParameter,
) -> Result<(f64, f64)> {
    check_lengths(p, states.len())?;
    let dims = check_same_dims(states)?.clone();
    let flags = Dims::new(vec![states.len()])?;
    let mut mixed: Option<DensityMatrix> = None;
    for (i, (&pi, s)) in p.as_slice().iter().zip(states).enumerate() {
        let mut flag = CMatrix::zeros(states.len(), states.len());
        flag[(i, i)] = C64::new(pi, 0.0);
        let term = tensor_product(s, &DensityMatrix::from_parts(flag, flags.clone()));
        mixed = Some(match mixed {
            None => term,
            Some(acc) => DensityMatrix::from_parts(acc.matrix() + term.matrix(), dims.concat(&flags)),
        });
    }
    let lhs = tsallis(&mixed.expect("at least one state"), q);
    Ok((lhs, q_expectation_side(p, states, q)))
}

/// Joint entropy identity for states with mutually orthogonal supports.
///
/// Returns `(S_q(Σ p_i ρ_i), Σ p_i^q S_q(ρ_i) + H_q(P))`. Supports count as
/// orthogonal when `‖ρ_i ρ_j‖_F ≤ 1e-10` for all `i ≠ j`.
pub fn orthogonal_support_entropy(
    p: &Probabilities,
    states: &[DensityMatrix],
    q: EntropicParameter,
) -> Result<(f64, f64)> {
    check_lengths(p, states.len())?;
    check_same_dims(states)?;
    for i in 0..states.len() {
        for j in (i + 1)..states.len() {
            let overlap = frobenius(&(states[i].matrix() * states[j].matrix()));
            if overlap > 1e-10 {
                return Err(Error::SupportsNotOrthogonal(overlap));
            }
        }
    }
    let parts: Vec<(f64, &DensityMatrix)> = p.as_slice().iter().copied().zip(states).collect();
    let lhs = tsallis(&DensityMatrix::mix(&parts), q);
    Ok((lhs, q_expectation_side(p, states, q)))
}

/// Quantum relative entropy `S(ρ‖σ) = tr ρ ln ρ - tr ρ ln σ` in nats.
///
/// Returns `+∞` when the weight of `ρ` on the kernel of `σ` exceeds `1e-10`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dims() != sigma.dims() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let (mu, f) = hermitian_eigh(sigma.matrix());
    let mut cross = 0.0;
    let mut kernel_weight = 0.0;
    for (k, &m) in mu.iter().enumerate() {
        let col = f.column(k);
        let w = col.dotc(&(rho.matrix() * col)).re;
        if m > RANK_TOL {
            cross += w * m.ln();
        } else {
            kernel_weight += w.max(0.0);
        }
    }
    if kernel_weight > 1e-10 {
        return Ok(f64::INFINITY);
    }
    let value = -von_neumann(rho) - cross;
    // rounding can push an exact zero slightly negative
    Ok(if value < 0.0 && value > -VALIDITY_TOL { 0.0 } else { value })
}

/// A weighted collection of states of identical dims.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble {
    probs: Probabilities,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    pub fn new(entries: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        let (p, states): (Vec<f64>, Vec<DensityMatrix>) = entries.into_iter().unzip();
        let probs = Probabilities::new(p)?;
        check_same_dims(&states)?;
        Ok(Self { probs, states })
    }

    /// Entries produced internally (weights nonnegative and normalized by
    /// construction up to rounding).
    pub(crate) fn from_parts(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Self {
        Self {
            probs: Probabilities::from_parts(probs),
            states,
        }
    }

    pub fn probabilities(&self) -> &Probabilities {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.probs.as_slice().iter().copied().zip(&self.states)
    }

    /// `Σ p_i ρ_i`.
    pub fn average(&self) -> DensityMatrix {
        let parts: Vec<(f64, &DensityMatrix)> = self.iter().collect();
        DensityMatrix::mix(&parts)
    }
}

/// Holevo quantity `S(ρ̄) - Σ p_i S(ρ_i)`.
pub fn holevo_chi(e: &Ensemble) -> f64 {
    von_neumann(&e.average()) - e.iter().map(|(p, s)| p * von_neumann(s)).sum::<f64>()
}

/// Holevo quantity as the average divergence `Σ p_i S(ρ_i ‖ ρ̄)`.
pub fn holevo_chi_relative(e: &Ensemble) -> Result<f64> {
    let avg = e.average();
    let mut total = 0.0;
    for (p, s) in e.iter() {
        if p > 0.0 {
            total += p * relative_entropy(s, &avg)?;
        }
    }
    Ok(total)
}

/// Tsallis-q difference `S_q(ρ̄) - Σ p_i^q S_q(ρ_i)`.
///
/// Nonnegative for `q >= 1`; no sign guarantee below.
pub fn tsallis_q_difference(e: &Ensemble, q: EntropicParameter) -> f64 {
    tsallis(&e.average(), q) - e.iter().map(|(p, s)| q.weight(p) * tsallis(s, q)).sum::<f64>()
}

/// Tsallis-q mutual entropy `S_q(ρ_L) + S_q(ρ_R) - S_q(ρ)` across `cut`.
///
/// Only defined for `q >= 1`.
pub fn tsallis_mutual(rho: &DensityMatrix, cut: &Bipartition, q: EntropicParameter) -> Result<f64> {
    q.require_at_least_one()?;
    if cut.n_subsystems() != rho.dims().len() {
        return Err(Error::InvalidSelection(format!(
            "cut over {} subsystems applied to a {}-party state",
            cut.n_subsystems(),
            rho.dims().len()
        )));
    }
    let left = partial_trace(rho, cut.left())?;
    let right = partial_trace(rho, cut.right())?;
    Ok(tsallis(&left, q) + tsallis(&right, q) - tsallis(rho, q))
}
