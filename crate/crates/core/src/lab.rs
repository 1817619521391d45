//! Monogamy and polygamy checks with one-sided bound accounting.
//!
//! Every check compares a `lesser` side against a `greater` side and reports
//! `gap = greater - lesser`, so a nonnegative gap means the inequality holds
//! on the numbers at hand. Each side carries a [`BoundKind`]: an exact value,
//! or an upper/lower bound on the true quantity. The verdict is
//! [`Verdict::Verified`] only when the lesser side is exact or an upper bound
//! and the greater side exact or a lower bound; [`Verdict::Violated`] needs
//! the opposite kinds. Anything else is [`Verdict::Inconclusive`].

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ccq::{closed_form_iq, induced_ensembles, CcqState};
use crate::entropy::{relative_entropy, tsallis, tsallis_q_difference, EntropicParameter};
use crate::error::{Error, Result};
use crate::qstate::{
    eigendecompose, embed_pure, haar_pure_with, partial_trace, random_density_with, square_dims, Bipartition,
    DensityMatrix, Dims, PureState,
};
use crate::roof::{
    concave_roof, convex_roof, qb_split_measurement, unlocalizable_q_entanglement, OptimizerBudget,
    PureFunctional, RoofResult,
};
use crate::seed;

/// Default tolerance for checks built on exact spectra.
pub const EXACT_TOLERANCE: f64 = 1e-10;
/// Default tolerance for checks that go through a roof optimizer.
pub const ROOF_TOLERANCE: f64 = 1e-6;

/// Number of smallest-gap instances kept by [`scan`].
pub const WORST_CASES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Violated,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Verified => "verified",
            Self::Violated => "violated",
            Self::Inconclusive => "inconclusive",
        }
    }

    /// Violated if any is, verified if all are, inconclusive otherwise.
    pub fn aggregate(verdicts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut out = Verdict::Verified;
        for v in verdicts {
            match v {
                Verdict::Violated => return Verdict::Violated,
                Verdict::Inconclusive => out = Verdict::Inconclusive,
                Verdict::Verified => {}
            }
        }
        out
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How a reported value relates to the quantity it stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Exact,
    /// The true value is at most the reported one.
    Upper,
    /// The true value is at least the reported one.
    Lower,
}

impl BoundKind {
    fn of(r: &RoofResult) -> Self {
        if r.exact {
            Self::Exact
        } else {
            match r.bound_direction {
                crate::roof::BoundDirection::Upper => Self::Upper,
                crate::roof::BoundDirection::Lower => Self::Lower,
            }
        }
    }

    /// Kind of a sum of terms.
    fn sum(kinds: impl IntoIterator<Item = BoundKind>) -> Option<BoundKind> {
        let mut out = BoundKind::Exact;
        for k in kinds {
            out = match (out, k) {
                (a, BoundKind::Exact) => a,
                (BoundKind::Exact, b) => b,
                (a, b) if a == b => a,
                _ => return None,
            };
        }
        Some(out)
    }

    /// Kind of `c - x` for exact `c`.
    fn negated(self) -> BoundKind {
        match self {
            Self::Exact => Self::Exact,
            Self::Upper => Self::Lower,
            Self::Lower => Self::Upper,
        }
    }
}

/// One side of an inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Side {
    pub value: f64,
    pub kind: BoundKind,
    /// How the value was obtained.
    pub source: String,
}

impl Side {
    pub fn exact(value: f64, source: impl Into<String>) -> Self {
        Self {
            value,
            kind: BoundKind::Exact,
            source: source.into(),
        }
    }

    pub fn bound(value: f64, kind: BoundKind, source: impl Into<String>) -> Self {
        Self {
            value,
            kind,
            source: source.into(),
        }
    }
}

/// A named auxiliary number attached to a verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantity {
    pub name: String,
    pub value: f64,
}

fn quantity(name: &str, value: f64) -> Quantity {
    Quantity {
        name: name.to_string(),
        value,
    }
}

/// Outcome of checking `lesser <= greater`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityVerdict {
    pub name: String,
    /// `greater - lesser`.
    pub gap: f64,
    pub verdict: Verdict,
    pub lesser: Side,
    pub greater: Side,
    pub tolerance: f64,
    /// Gaps of side conditions the inequality depends on; nonnegative means
    /// the condition holds. They do not enter the verdict.
    pub conditions: Vec<Quantity>,
    pub details: Vec<Quantity>,
    /// False when some optimizer run behind a bound did not settle.
    pub converged: bool,
}

impl InequalityVerdict {
    /// Compares the two sides under the soundness rule.
    pub fn judge(name: impl Into<String>, lesser: Side, greater: Side, tolerance: f64) -> Self {
        let gap = greater.value - lesser.value;
        let lesser_capped = lesser.kind != BoundKind::Lower;
        let greater_floored = greater.kind != BoundKind::Upper;
        let lesser_floored = lesser.kind != BoundKind::Upper;
        let greater_capped = greater.kind != BoundKind::Lower;
        let verdict = if lesser_capped && greater_floored && gap >= -tolerance {
            Verdict::Verified
        } else if lesser_floored && greater_capped && gap < -tolerance {
            Verdict::Violated
        } else {
            Verdict::Inconclusive
        };
        Self {
            name: name.into(),
            gap,
            verdict,
            lesser,
            greater,
            tolerance,
            conditions: Vec::new(),
            details: Vec::new(),
            converged: true,
        }
    }

    /// True when every recorded condition gap is at least `-tolerance`.
    pub fn conditions_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.value >= -self.tolerance)
    }

    fn with_conditions(mut self, c: Vec<Quantity>) -> Self {
        self.conditions = c;
        self
    }

    fn with_details(mut self, d: Vec<Quantity>) -> Self {
        self.details = d;
        self
    }

    fn with_converged(mut self, c: bool) -> Self {
        self.converged = c;
        self
    }
}

/// `I_q(XY:AB) - I_q(X:AB) - I_q(Y:AB)` for the ccq state of `ρ_AB`, from
/// the closed forms. Nonnegative means the sufficient condition holds.
pub fn subadditivity_gap(rho_ab: &DensityMatrix, q: EntropicParameter) -> Result<f64> {
    Ok(closed_form_iq(rho_ab, q)?.subadditivity_gap())
}

/// [`subadditivity_gap`] as a verdict on `I(X:AB) + I(Y:AB) <= I(XY:AB)`.
pub fn subadditivity_check(rho_ab: &DensityMatrix, q: EntropicParameter, tolerance: f64) -> Result<InequalityVerdict> {
    let t = closed_form_iq(rho_ab, q)?;
    Ok(InequalityVerdict::judge(
        "ccq_subadditivity",
        Side::exact(t.x_ab + t.y_ab, "closed forms"),
        Side::exact(t.xy_ab, "closed forms"),
        tolerance,
    ))
}

/// Subadditivity of quantum mutual information for a general ccq state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralSubadditivity {
    /// `Σ_xy S(σ^{xy} ‖ ρ^y)/d² - Σ_x S(ρ^x ‖ ρ)/d`.
    pub gap: f64,
    /// `Σ_xy S(σ^{xy} ‖ ρ^y)/d²`.
    pub relative_lhs: f64,
    /// `Σ_x S(ρ^x ‖ ρ)/d`.
    pub relative_rhs: f64,
    /// The same gap from the three mutual informations of the blocks.
    pub direct_gap: f64,
}

/// The von Neumann subadditivity gap of a ccq state, rearranged into a
/// comparison of relative entropies. Only `q = 1` is meaningful.
pub fn general_ccq_subadditivity_gap(gamma: &CcqState, q: EntropicParameter) -> Result<GeneralSubadditivity> {
    if !q.is_limit() {
        return Err(Error::ParameterNotOne(q.value()));
    }
    let d = gamma.flag_dim();
    let w = 1.0 / d as f64;
    let rho = gamma.omega_ab();
    let mut lhs = 0.0;
    for y in 0..d {
        let rho_y = gamma.y_conditional(y);
        for x in 0..d {
            lhs += w * w * relative_entropy(gamma.block(x, y), &rho_y)?;
        }
    }
    let mut rhs = 0.0;
    for x in 0..d {
        rhs += w * relative_entropy(&gamma.x_conditional(x), &rho)?;
    }
    let direct_gap = gamma.mutual_entropies(q)?.subadditivity_gap();
    Ok(GeneralSubadditivity {
        gap: lhs - rhs,
        relative_lhs: lhs,
        relative_rhs: rhs,
        direct_gap,
    })
}

/// The two entropy-deficit terms of the polygamy bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiBounds {
    pub xi_b: f64,
    pub xi_c: f64,
    /// Common local dimension after embedding.
    pub d: usize,
}

fn xi_term(d: usize, s: f64, q: EntropicParameter) -> f64 {
    let big = (d as f64).powf(q.value() - 1.0);
    (big - 1.0) / big * ((big - 1.0) / (q.value() - 1.0) - s)
}

fn require_above_one(q: EntropicParameter) -> Result<()> {
    if q.value() > 1.0 && !q.is_limit() {
        Ok(())
    } else {
        Err(Error::ParameterNotAboveOne(q.value()))
    }
}

fn require_three_party(psi: &PureState) -> Result<PureState> {
    if psi.dims().len() != 3 {
        return Err(Error::InvalidDims(format!("expected a three-party state, got {:?}", psi.dims())));
    }
    embed_pure(psi, &square_dims(psi.dims()))
}

/// `Ξ_B` and `Ξ_C` of a three-party pure state at `q > 1`, after padding all
/// parties to the largest local dimension `d`.
pub fn xi_bounds(psi: &PureState, q: EntropicParameter) -> Result<XiBounds> {
    require_above_one(q)?;
    let psi = require_three_party(psi)?;
    let d = psi.dims().get(0);
    let s_b = tsallis(&psi.reduced(&[1])?, q);
    let s_c = tsallis(&psi.reduced(&[2])?, q);
    Ok(XiBounds {
        xi_b: xi_term(d, s_b, q),
        xi_c: xi_term(d, s_c, q),
        d,
    })
}

fn sub_budget(budget: &OptimizerBudget, k: u64) -> OptimizerBudget {
    budget.with_seed(seed::derive(budget.seed, k))
}

fn tsallis_ta(rho: &DensityMatrix, q: EntropicParameter, budget: &OptimizerBudget) -> Result<RoofResult> {
    concave_roof(rho, &Bipartition::first(2)?, PureFunctional::Tsallis(q), budget)
}

/// Polygamy of the Tsallis-q entanglement of assistance for a three-party
/// pure state: `S_q(ρ_A) <= T^a_q(ρ_AB) + T^a_q(ρ_AC)`.
///
/// The left side is exact; the right side sums concave-roof lower bounds.
/// The ccq subadditivity gaps of `ρ_AB` and `ρ_AC` are reported as
/// conditions.
pub fn theorem1_check(
    psi: &PureState,
    q: EntropicParameter,
    budget: &OptimizerBudget,
    tolerance: f64,
) -> Result<InequalityVerdict> {
    q.require_at_least_one()?;
    budget.validate()?;
    if psi.dims().len() != 3 {
        return Err(Error::InvalidDims(format!("expected a three-party state, got {:?}", psi.dims())));
    }
    let rho_ab = psi.reduced(&[0, 1])?;
    let rho_ac = psi.reduced(&[0, 2])?;
    let gap_ab = subadditivity_gap(&rho_ab, q)?;
    let gap_ac = subadditivity_gap(&rho_ac, q)?;
    let lhs = tsallis(&psi.reduced(&[0])?, q);
    let ta_ab = tsallis_ta(&rho_ab, q, &sub_budget(budget, 0))?;
    let ta_ac = tsallis_ta(&rho_ac, q, &sub_budget(budget, 1))?;
    let kind = BoundKind::sum([BoundKind::of(&ta_ab), BoundKind::of(&ta_ac)]).expect("same direction");
    Ok(InequalityVerdict::judge(
        "tsallis_assistance_polygamy",
        Side::exact(lhs, "S_q(rho_A)"),
        Side::bound(ta_ab.value + ta_ac.value, kind, "concave roofs of rho_AB and rho_AC"),
        tolerance,
    )
    .with_conditions(vec![quantity("subadditivity_gap_ab", gap_ab), quantity("subadditivity_gap_ac", gap_ac)])
    .with_details(vec![quantity("assistance_ab", ta_ab.value), quantity("assistance_ac", ta_ac.value)])
    .with_converged(ta_ab.converged && ta_ac.converged))
}

/// Polygamy `T^a_q(ρ_{A1|A2…An}) <= Σ_i T^a_q(ρ_{A1 Ai})` for an `n`-party
/// state, `n >= 3`.
///
/// For pure input the left side is the exact `S_q(ρ_{A1})`. For mixed input
/// `S_q(ρ_{A1})` is still an upper bound on the left side (every
/// decomposition averages to `ρ_{A1}`), and is reported as such.
pub fn polygamy_check_nparty(
    rho: &DensityMatrix,
    q: EntropicParameter,
    budget: &OptimizerBudget,
    tolerance: f64,
) -> Result<InequalityVerdict> {
    q.require_at_least_one()?;
    budget.validate()?;
    let n = rho.dims().len();
    if n < 3 {
        return Err(Error::InvalidDims(format!("expected at least three parties, got {:?}", rho.dims())));
    }
    let s_a = tsallis(&partial_trace(rho, &[0])?, q);
    let lhs = if rho.is_pure() {
        Side::exact(s_a, "S_q(rho_A1) of a pure state")
    } else {
        Side::bound(s_a, BoundKind::Upper, "S_q(rho_A1) by concavity")
    };
    let mut total = 0.0;
    let mut kinds = Vec::new();
    let mut details = Vec::new();
    let mut converged = true;
    for i in 1..n {
        let r = tsallis_ta(&partial_trace(rho, &[0, i])?, q, &sub_budget(budget, i as u64))?;
        total += r.value;
        kinds.push(BoundKind::of(&r));
        converged &= r.converged;
        details.push(quantity(&format!("assistance_1_{}", i + 1), r.value));
    }
    let kind = BoundKind::sum(kinds).expect("same direction");
    Ok(InequalityVerdict::judge(
        "tsallis_assistance_polygamy",
        lhs,
        Side::bound(total, kind, "concave roofs of the A1-Ai marginals"),
        tolerance,
    )
    .with_details(details)
    .with_converged(converged))
}

fn state_vector(rho: &DensityMatrix) -> Result<PureState> {
    PureState::normalized(eigendecompose(rho).vector(0), rho.dims().clone())
}

/// Monogamy `E(ρ_{A1|A2…An}) >= Σ_i E(ρ_{A1 Ai})` on qubits.
///
/// Tsallis needs `2 <= q <= 3`, Rényi `α >= 2`. The right side sums
/// convex-roof upper bounds; the left side is exact for pure input and
/// bounded below by zero otherwise.
pub fn monogamy_check_multiqubit(
    rho: &DensityMatrix,
    measure: PureFunctional,
    budget: &OptimizerBudget,
    tolerance: f64,
) -> Result<InequalityVerdict> {
    budget.validate()?;
    if let Some(&d) = rho.dims().as_slice().iter().find(|&&d| d != 2) {
        return Err(Error::NotQubit(d));
    }
    let n = rho.dims().len();
    if n < 2 {
        return Err(Error::InvalidDims(format!("expected at least two qubits, got {:?}", rho.dims())));
    }
    match measure {
        PureFunctional::Tsallis(q) if !(2.0 - 1e-12..=3.0 + 1e-12).contains(&q.value()) => {
            return Err(Error::ParameterOutOfRange {
                value: q.value(),
                range: "2 <= q <= 3",
            })
        }
        PureFunctional::Renyi(a) if a.value() < 2.0 - 1e-12 => {
            return Err(Error::ParameterOutOfRange {
                value: a.value(),
                range: "alpha >= 2",
            })
        }
        _ => {}
    }
    let lhs = if rho.is_pure() {
        let psi = state_vector(rho)?;
        Side::exact(measure.evaluate(&psi, &Bipartition::first(n)?)?, "pure-state value")
    } else {
        Side::bound(0.0, BoundKind::Lower, "nonnegativity")
    };
    let mut total = 0.0;
    let mut kinds = Vec::new();
    let mut details = Vec::new();
    let mut converged = true;
    for i in 1..n {
        let marginal = partial_trace(rho, &[0, i])?;
        let r = convex_roof(&marginal, &Bipartition::first(2)?, measure, &sub_budget(budget, i as u64))?;
        total += r.value;
        kinds.push(BoundKind::of(&r));
        converged &= r.converged;
        details.push(quantity(&format!("entanglement_1_{}", i + 1), r.value));
    }
    let kind = BoundKind::sum(kinds).expect("same direction");
    Ok(InequalityVerdict::judge(
        "monogamy",
        Side::bound(total, kind, "convex roofs of the A1-Ai marginals"),
        lhs,
        tolerance,
    )
    .with_details(details)
    .with_converged(converged))
}

/// Per-link report of the unlocalizable-entanglement proof chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub q: f64,
    pub d: usize,
    pub subadditivity_gap_ab: f64,
    pub subadditivity_gap_ac: f64,
    pub xi: XiBounds,
    pub links: Vec<InequalityVerdict>,
    pub verdict: Verdict,
}

impl ChainReport {
    pub fn link(&self, name: &str) -> Option<&InequalityVerdict> {
        self.links.iter().find(|l| l.name == name)
    }

    /// True when both subadditivity conditions hold within `tolerance`.
    pub fn conditions_hold(&self, tolerance: f64) -> bool {
        self.subadditivity_gap_ab >= -tolerance && self.subadditivity_gap_ac >= -tolerance
    }
}

struct PairData {
    ue: RoofResult,
    chi0: f64,
    chi1: f64,
    chi_split: f64,
    ta: RoofResult,
}

/// Evaluates each step from the unlocalizable q-entanglement bounds to the
/// conditional polygamy bound `T^a_q(ρ_AB) + T^a_q(ρ_AC) >= S_q(ρ_A) + (Ξ_B + Ξ_C)/2`,
/// for `q > 1`, with all parties padded to a common dimension `d`.
///
/// Links suffixed `_ab` concern `ρ_AB` (partner `C`) and `_ac` the reverse.
/// The upper bound on `uE` and the final two links rely on the
/// subadditivity conditions, whose gaps are attached to them.
pub fn ue_bound_chain(
    psi: &PureState,
    q: EntropicParameter,
    budget: &OptimizerBudget,
    tolerance: f64,
) -> Result<ChainReport> {
    require_above_one(q)?;
    budget.validate()?;
    let psi = require_three_party(psi)?;
    let d = psi.dims().get(0);
    let xi = xi_bounds(&psi, q)?;
    let s_a = tsallis(&psi.reduced(&[0])?, q);
    let s_b = tsallis(&psi.reduced(&[1])?, q);
    let s_c = tsallis(&psi.reduced(&[2])?, q);
    let rho_ab = psi.reduced(&[0, 1])?;
    let rho_ac = psi.reduced(&[0, 2])?;
    let gap_ab = subadditivity_gap(&rho_ab, q)?;
    let gap_ac = subadditivity_gap(&rho_ac, q)?;
    let conditions = vec![quantity("subadditivity_gap_ab", gap_ab), quantity("subadditivity_gap_ac", gap_ac)];

    let pair = |rho: &DensityMatrix, k: u64| -> Result<PairData> {
        let ens = induced_ensembles(rho)?;
        Ok(PairData {
            ue: unlocalizable_q_entanglement(rho, q, &sub_budget(budget, 2 * k))?,
            chi0: tsallis_q_difference(&ens.e0, q),
            chi1: tsallis_q_difference(&ens.e1, q),
            chi_split: qb_split_measurement(rho)?.chi_q(rho, q)?,
            ta: tsallis_ta(rho, q, &sub_budget(budget, 2 * k + 1))?,
        })
    };
    let ab = pair(&rho_ab, 0)?;
    let ac = pair(&rho_ac, 1)?;

    let dq = (d as f64).powf(1.0 - q.value());
    let k = (dq - 1.0).powi(2) / (dq * (1.0 - q.value()));
    let mut links = Vec::new();
    // (name suffix, data for this pair, S of its B-side, S of the pair, partner data)
    for (tag, this, s_own, s_pair, other) in [("ab", &ab, s_b, s_c, &ac), ("ac", &ac, s_c, s_b, &ab)] {
        let ue = Side::bound(this.ue.value, BoundKind::of(&this.ue), "measurement search");
        links.push(
            InequalityVerdict::judge(
                format!("ue_below_basis_average_{tag}"),
                ue.clone(),
                Side::exact(0.5 * (this.chi0 + this.chi1), "eigenbasis and Fourier ensembles"),
                tolerance,
            )
            .with_details(vec![
                quantity("chi_eigenbasis", this.chi0),
                quantity("chi_fourier", this.chi1),
                quantity("chi_split_measurement", this.chi_split),
            ])
            .with_converged(this.ue.converged),
        );
        links.push(
            InequalityVerdict::judge(
                format!("ue_upper_{tag}"),
                ue.clone(),
                Side::exact(0.5 * (s_a + s_own - dq * s_pair + k), "marginal entropies"),
                tolerance,
            )
            .with_conditions(conditions.clone())
            .with_converged(this.ue.converged),
        );
        links.push(
            InequalityVerdict::judge(
                format!("ue_from_assistance_{tag}"),
                Side::bound(
                    s_a - other.ta.value,
                    BoundKind::of(&other.ta).negated(),
                    "S_q(rho_A) minus partner concave roof",
                ),
                ue,
                tolerance,
            )
            .with_converged(this.ue.converged && other.ta.converged),
        );
    }

    let target = s_a + 0.5 * (xi.xi_b + xi.xi_c);
    let ue_kind = BoundKind::sum([BoundKind::of(&ab.ue), BoundKind::of(&ac.ue)]).expect("same direction");
    links.push(
        InequalityVerdict::judge(
            "ue_sum_above_xi",
            Side::exact(target, "S_q(rho_A) + (Xi_B + Xi_C)/2"),
            Side::bound(2.0 * s_a - ab.ue.value - ac.ue.value, ue_kind.negated(), "2 S_q(rho_A) - uE_AB - uE_AC"),
            tolerance,
        )
        .with_conditions(conditions.clone())
        .with_converged(ab.ue.converged && ac.ue.converged),
    );
    let ta_kind = BoundKind::sum([BoundKind::of(&ab.ta), BoundKind::of(&ac.ta)]).expect("same direction");
    links.push(
        InequalityVerdict::judge(
            "assistance_sum_above_xi",
            Side::exact(target, "S_q(rho_A) + (Xi_B + Xi_C)/2"),
            Side::bound(ab.ta.value + ac.ta.value, ta_kind, "concave roofs of rho_AB and rho_AC"),
            tolerance,
        )
        .with_conditions(conditions)
        .with_converged(ab.ta.converged && ac.ta.converged),
    );
    let verdict = Verdict::aggregate(links.iter().map(|l| l.verdict));
    Ok(ChainReport {
        q: q.value(),
        d,
        subadditivity_gap_ab: gap_ab,
        subadditivity_gap_ac: gap_ac,
        xi,
        links,
        verdict,
    })
}

/// Checks available to [`scan`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Subadd,
    GeneralSubadd,
    Xi,
    Theorem1,
    Polygamy,
    Monogamy,
    UeChain,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        Self::Subadd,
        Self::GeneralSubadd,
        Self::Xi,
        Self::Theorem1,
        Self::Polygamy,
        Self::Monogamy,
        Self::UeChain,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Subadd => "subadd",
            Self::GeneralSubadd => "general-subadd",
            Self::Xi => "xi",
            Self::Theorem1 => "theorem1",
            Self::Polygamy => "polygamy",
            Self::Monogamy => "monogamy",
            Self::UeChain => "ue-chain",
        }
    }

    pub fn default_dims(self) -> Vec<usize> {
        match self {
            Self::Subadd | Self::GeneralSubadd => vec![2, 2],
            _ => vec![2, 2, 2],
        }
    }

    pub fn default_q_values(self) -> Vec<f64> {
        match self {
            Self::GeneralSubadd => vec![1.0],
            Self::Xi | Self::UeChain => vec![1.1, 1.5, 2.0, 3.0, 4.0],
            Self::Monogamy => vec![2.0, 2.5, 3.0],
            _ => vec![1.0, 1.1, 1.5, 2.0, 3.0, 4.0],
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Self::Subadd | Self::GeneralSubadd | Self::Xi => EXACT_TOLERANCE,
            _ => ROOF_TOLERANCE,
        }
    }

    fn check_q(self, q: EntropicParameter) -> Result<()> {
        match self {
            Self::GeneralSubadd if !q.is_limit() => Err(Error::ParameterNotOne(q.value())),
            Self::Xi | Self::UeChain => require_above_one(q),
            Self::Monogamy if !(2.0..=3.0).contains(&q.value()) => Err(Error::ParameterOutOfRange {
                value: q.value(),
                range: "2 <= q <= 3",
            }),
            Self::Subadd | Self::Theorem1 | Self::Polygamy => q.require_at_least_one().map(|_| ()),
            _ => Ok(()),
        }
    }

    fn check_dims(self, dims: &[usize]) -> Result<()> {
        let ok = match self {
            Self::Subadd | Self::GeneralSubadd => dims.len() == 2,
            Self::Xi | Self::Theorem1 | Self::UeChain => dims.len() == 3,
            Self::Polygamy => dims.len() >= 3,
            Self::Monogamy => dims.len() >= 2 && dims.iter().all(|&d| d == 2),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "dims {dims:?} do not fit check `{}`",
                self.as_str()
            )))
        }
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownCheck(s.to_string()))
    }
}

/// Parameters of a random scan.
///
/// For `general-subadd` the flag dimension is `dims[0]` and the blocks live
/// on `dims`. Mixed-state checks cycle the sample rank through
/// `1..=total dimension`, so pure states are always among the samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub check: CheckKind,
    pub dims: Vec<usize>,
    pub q_values: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub budget: OptimizerBudget,
    pub tolerance: f64,
}

impl ScanConfig {
    /// Defaults for `check`: its usual dims and q-grid, 100 samples, seed 0.
    pub fn new(check: CheckKind) -> Self {
        Self {
            check,
            dims: check.default_dims(),
            q_values: check.default_q_values(),
            samples: 100,
            seed: 0,
            budget: OptimizerBudget::default(),
            tolerance: check.default_tolerance(),
        }
    }

    pub fn validate(&self) -> Result<Vec<EntropicParameter>> {
        if self.samples == 0 {
            return Err(Error::InvalidConfig("samples must be at least 1".into()));
        }
        if self.q_values.is_empty() {
            return Err(Error::InvalidConfig("q_values must not be empty".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        Dims::new(self.dims.clone())?;
        self.check.check_dims(&self.dims)?;
        self.budget.validate()?;
        self.q_values
            .iter()
            .map(|&q| {
                let q = EntropicParameter::new(q)?;
                self.check.check_q(q)?;
                Ok(q)
            })
            .collect()
    }
}

/// One evaluated instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanItem {
    pub check: CheckKind,
    pub q: f64,
    /// Largest local dimension.
    pub d: usize,
    pub sample_index: usize,
    /// Seed that regenerates the sampled state.
    pub seed: u64,
    pub gap: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictCounts {
    pub verified: usize,
    pub violated: usize,
    pub inconclusive: usize,
}

impl VerdictCounts {
    fn add(&mut self, v: Verdict) {
        match v {
            Verdict::Verified => self.verified += 1,
            Verdict::Violated => self.violated += 1,
            Verdict::Inconclusive => self.inconclusive += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.verified + self.violated + self.inconclusive
    }

    /// Violated if any, else inconclusive if any, else verified.
    pub fn verdict(&self) -> Verdict {
        if self.violated > 0 {
            Verdict::Violated
        } else if self.inconclusive > 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Verified
        }
    }
}

impl FromIterator<Verdict> for VerdictCounts {
    fn from_iter<I: IntoIterator<Item = Verdict>>(iter: I) -> Self {
        let mut c = Self::default();
        for v in iter {
            c.add(v);
        }
        c
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

/// A retained instance with its full state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    pub seed: u64,
    pub sample_index: usize,
    pub q: f64,
    pub gap: f64,
    pub verdict: Verdict,
    pub state: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub check: CheckKind,
    pub params: ScanConfig,
    pub counts: VerdictCounts,
    pub gap_stats: GapStats,
    /// The smallest-gap instances, smallest first.
    pub worst_cases: Vec<WorstCase>,
    /// All instances, q-major then by sample index.
    pub items: Vec<ScanItem>,
}

impl ScanReport {
    pub fn verdict(&self) -> Verdict {
        self.counts.verdict()
    }
}

enum Sample {
    Mixed(DensityMatrix),
    Pure(PureState),
    Ccq(CcqState),
}

impl Sample {
    fn to_json(&self) -> serde_json::Value {
        let v = match self {
            Sample::Mixed(r) => serde_json::to_value(r),
            Sample::Pure(p) => serde_json::to_value(p),
            Sample::Ccq(c) => serde_json::to_value(c),
        };
        v.expect("state records serialize")
    }
}

fn draw(check: CheckKind, dims: &Dims, index: usize, seed: u64) -> Result<Sample> {
    let mut rng = seed::rng(seed);
    let total = dims.total();
    Ok(match check {
        CheckKind::Subadd => Sample::Mixed(random_density_with(&mut rng, dims, 1 + index % total)?),
        CheckKind::GeneralSubadd => {
            let d = dims.get(0);
            let blocks = (0..d * d)
                .map(|k| random_density_with(&mut rng, dims, 1 + (index + k) % total))
                .collect::<Result<Vec<_>>>()?;
            Sample::Ccq(CcqState::general(blocks)?)
        }
        CheckKind::Polygamy => {
            let rank = 1 + index % 2;
            Sample::Mixed(random_density_with(&mut rng, dims, rank.min(total))?)
        }
        _ => Sample::Pure(haar_pure_with(&mut rng, dims)),
    })
}

fn evaluate(cfg: &ScanConfig, sample: &Sample, q: EntropicParameter, budget: &OptimizerBudget) -> Result<(f64, Verdict)> {
    let tol = cfg.tolerance;
    let v = match (cfg.check, sample) {
        (CheckKind::Subadd, Sample::Mixed(r)) => subadditivity_check(r, q, tol)?,
        (CheckKind::GeneralSubadd, Sample::Ccq(g)) => {
            let s = general_ccq_subadditivity_gap(g, q)?;
            InequalityVerdict::judge(
                "relative_entropy_convexity",
                Side::exact(s.relative_rhs, "conditional relative entropies"),
                Side::exact(s.relative_lhs, "block relative entropies"),
                tol,
            )
        }
        (CheckKind::Xi, Sample::Pure(p)) => {
            let xi = xi_bounds(p, q)?;
            InequalityVerdict::judge(
                "xi_nonnegative",
                Side::exact(0.0, "zero"),
                Side::exact(xi.xi_b.min(xi.xi_c), "min(Xi_B, Xi_C)"),
                tol,
            )
        }
        (CheckKind::Theorem1, Sample::Pure(p)) => theorem1_check(p, q, budget, tol)?,
        (CheckKind::Polygamy, Sample::Mixed(r)) => polygamy_check_nparty(r, q, budget, tol)?,
        (CheckKind::Monogamy, Sample::Pure(p)) => {
            monogamy_check_multiqubit(&DensityMatrix::from_pure(p), PureFunctional::Tsallis(q), budget, tol)?
        }
        (CheckKind::UeChain, Sample::Pure(p)) => {
            let chain = ue_bound_chain(p, q, budget, tol)?;
            let last = chain.links.last().expect("chain has links");
            return Ok((last.gap, chain.verdict));
        }
        _ => unreachable!("sample kind follows the check"),
    };
    Ok((v.gap, v.verdict))
}

/// Runs `config.check` on `config.samples` random instances at every q.
///
/// Sample `i` is drawn from `seed::derive(config.seed, i)` and is shared by
/// all q values. Instances run in parallel; the report is assembled in
/// order, so equal configs give identical reports.
pub fn scan(config: &ScanConfig) -> Result<ScanReport> {
    let qs = config.validate()?;
    let dims = Dims::new(config.dims.clone())?;
    let d = config.dims.iter().copied().max().unwrap_or(1);
    let samples: Vec<(u64, Sample)> = (0..config.samples)
        .into_par_iter()
        .map(|i| {
            let s = seed::derive(config.seed, i as u64);
            draw(config.check, &dims, i, s).map(|x| (s, x))
        })
        .collect::<Result<_>>()?;
    let jobs: Vec<(usize, usize)> = (0..qs.len())
        .flat_map(|qi| (0..config.samples).map(move |i| (qi, i)))
        .collect();
    let results: Vec<(f64, Verdict)> = jobs
        .par_iter()
        .map(|&(qi, i)| {
            let budget = config
                .budget
                .with_seed(seed::derive2(config.budget.seed, i as u64, qi as u64));
            evaluate(config, &samples[i].1, qs[qi], &budget)
        })
        .collect::<Result<_>>()?;

    let mut counts = VerdictCounts::default();
    let mut items = Vec::with_capacity(jobs.len());
    let (mut min, mut max, mut sum) = (f64::INFINITY, f64::NEG_INFINITY, 0.0);
    for (&(qi, i), &(gap, verdict)) in jobs.iter().zip(&results) {
        counts.add(verdict);
        min = min.min(gap);
        max = max.max(gap);
        sum += gap;
        items.push(ScanItem {
            check: config.check,
            q: qs[qi].value(),
            d,
            sample_index: i,
            seed: samples[i].0,
            gap,
            verdict,
        });
    }
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| items[a].gap.total_cmp(&items[b].gap).then(a.cmp(&b)));
    let worst_cases = order
        .into_iter()
        .take(WORST_CASES)
        .map(|k| {
            let it = &items[k];
            WorstCase {
                seed: it.seed,
                sample_index: it.sample_index,
                q: it.q,
                gap: it.gap,
                verdict: it.verdict,
                state: samples[it.sample_index].1.to_json(),
            }
        })
        .collect();
    Ok(ScanReport {
        check: config.check,
        params: config.clone(),
        counts,
        gap_stats: GapStats {
            min,
            max,
            mean: sum / items.len() as f64,
        },
        worst_cases,
        items,
    })
}

#[cfg(test)]
mod tests;
