//! Cone-angle thresholds and windows, eta-feasibility certificates and the
//! sufficient criteria for singular pairs.
//!
//! Every verdict produced here is one-sided: a criterion is either
//! certified or left inconclusive. Instability is never asserted from this
//! module; that belongs to [`crate::normalcone`].

use std::cmp::max;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{int, serde_rational, Rational};
use crate::pairmodel::{avg_scalar_s1, PolarisedPair};

/// Caller-supplied positivity constants. Alpha invariants and nef
/// thresholds are inputs; nothing here computes them.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PositivityData {
    #[serde(rename = "alpha_L", with = "serde_rational::option", default)]
    pub alpha_l: Option<Rational>,
    /// `alpha(L_D|_D)`.
    #[serde(rename = "alpha_LD_restricted", with = "serde_rational::option", default)]
    pub alpha_ld_restricted: Option<Rational>,
    /// Nef threshold `lambda`: the largest `t` with `t c_1(L) <= c_1(X)`.
    #[serde(with = "serde_rational::option", default)]
    pub lambda: Option<Rational>,
    /// `Lambda`: the smallest `t` with `c_1(X) <= t c_1(L)`.
    #[serde(rename = "Lambda", with = "serde_rational::option", default)]
    pub lambda_up: Option<Rational>,
    /// A known value of `alpha_beta`; when set it replaces the lower bound.
    #[serde(rename = "alpha_beta", with = "serde_rational::option", default)]
    pub alpha_beta_override: Option<Rational>,
    #[serde(with = "serde_rational::option", default)]
    pub entropy_lower: Option<Rational>,
}

impl PositivityData {
    pub fn validate(&self, pair: &PolarisedPair) -> Result<()> {
        for (name, v) in [
            ("alpha_L", &self.alpha_l),
            ("alpha_LD_restricted", &self.alpha_ld_restricted),
            ("alpha_beta", &self.alpha_beta_override),
        ] {
            if v.as_ref().is_some_and(Signed::is_negative) {
                return Err(Error::InconsistentPositivity(format!("{name} must be >= 0")));
            }
        }
        if let (Some(lo), Some(hi)) = (&self.lambda, &self.lambda_up) {
            if lo > hi {
                return Err(Error::InconsistentPositivity(format!("lambda = {lo} exceeds Lambda = {hi}")));
            }
        }
        if let Some(x) = &pair.proportional_x {
            for (name, v) in [("lambda", &self.lambda), ("Lambda", &self.lambda_up)] {
                if v.as_ref().is_some_and(|v| v != x) {
                    return Err(Error::InconsistentPositivity(format!(
                        "{name} must equal proportional_x = {x} when c_1(X) = x c_1(L)"
                    )));
                }
            }
        }
        // lambda L <= c_1(X) <= Lambda L, intersected with L^{n-1}.
        let slope = avg_scalar_s1(pair) / pair.n();
        if self.lambda.as_ref().is_some_and(|l| l > &slope) {
            return Err(Error::InconsistentPositivity(format!("lambda exceeds S_1/n = {slope}")));
        }
        if self.lambda_up.as_ref().is_some_and(|l| l < &slope) {
            return Err(Error::InconsistentPositivity(format!("Lambda is below S_1/n = {slope}")));
        }
        Ok(())
    }
}

/// Which description of `c_1(X)` produced a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PositivityModel {
    /// `c_1(X) = x c_1(L)` exactly.
    Proportional,
    /// `lambda c_1(L) <= c_1(X) <= Lambda c_1(L)`; sufficient, not sharp.
    Sandwich,
}

impl fmt::Display for PositivityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PositivityModel::Proportional => write!(f, "proportional c1(X) = x c1(L)"),
            PositivityModel::Sandwich => write!(f, "lambda/Lambda sandwich"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NefBounds {
    pub lambda: Rational,
    pub lambda_up: Rational,
    pub model: PositivityModel,
}

/// Resolves `(lambda, Lambda)`, preferring the exact proportional data.
pub fn nef_bounds(pair: &PolarisedPair, pos: &PositivityData) -> Result<NefBounds> {
    pos.validate(pair)?;
    if let Some(x) = &pair.proportional_x {
        return Ok(NefBounds { lambda: x.clone(), lambda_up: x.clone(), model: PositivityModel::Proportional });
    }
    match (&pos.lambda, &pos.lambda_up) {
        (Some(lo), Some(hi)) => Ok(NefBounds {
            lambda: lo.clone(),
            lambda_up: hi.clone(),
            model: if lo == hi { PositivityModel::Proportional } else { PositivityModel::Sandwich },
        }),
        _ => Err(Error::MissingPositivityData("need lambda and Lambda (or proportional_x on the pair)".into())),
    }
}

fn lambda_only(pair: &PolarisedPair, pos: &PositivityData) -> Result<Rational> {
    pos.validate(pair)?;
    pair.proportional_x
        .clone()
        .or_else(|| pos.lambda.clone())
        .ok_or_else(|| Error::MissingPositivityData("need lambda (or proportional_x on the pair)".into()))
}

/// `min{alpha(L), m alpha(L_D|_D)}`.
fn alpha_tilde(pos: &PositivityData, m: u32) -> Result<Rational> {
    match (&pos.alpha_l, &pos.alpha_ld_restricted) {
        (Some(a), Some(ad)) => Ok(a.clone().min(int(m as i64) * ad)),
        _ => Err(Error::MissingAlphaData("need alpha_L and alpha_LD_restricted".into())),
    }
}

/// Lower bound `alpha_beta >= min{m beta, alpha(L), m alpha(L_D|_D)}`,
/// clamped at zero; an explicit `alpha_beta` wins.
pub fn alpha_beta_lower_bound(pos: &PositivityData, m: u32, beta: &Rational) -> Result<Rational> {
    if let Some(a) = &pos.alpha_beta_override {
        return Ok(a.clone());
    }
    let bound = alpha_tilde(pos, m)?.min(int(m as i64) * beta);
    Ok(max(bound, Rational::zero()))
}

/// Critical cone angle
/// `beta_u = min{1, (n+1)/n * min{alpha(L), m alpha(L_D|_D)}/m + 1 - S_1/(mn)}`.
/// Not clamped below; a nonpositive value just yields empty windows.
pub fn beta_u(pair: &PolarisedPair, pos: &PositivityData, m: u32) -> Result<Rational> {
    check_m(m)?;
    let n = pair.n();
    let m_r = int(m as i64);
    let alpha = alpha_tilde(pos, m)?;
    let candidate = (&n + Rational::one()) / &n * alpha / &m_r + Rational::one() - avg_scalar_s1(pair) / (&m_r * &n);
    Ok(candidate.min(Rational::one()))
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        Err(Error::ParameterOutOfRange("m must be >= 1".into()))
    } else {
        Ok(())
    }
}

fn check_angle(beta: &Rational) -> Result<()> {
    if !beta.is_positive() || beta > &Rational::one() {
        Err(Error::ParameterOutOfRange(format!("cone angle beta = {beta} must lie in (0, 1]")))
    } else {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WindowClaim {
    ExistenceCscKCone,
    UniformLogKStable,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AngleWindow {
    #[serde(with = "serde_rational")]
    pub lower: Rational,
    pub lower_inclusive: bool,
    #[serde(with = "serde_rational")]
    pub upper: Rational,
    pub upper_inclusive: bool,
    pub empty: bool,
    pub claim: WindowClaim,
}

impl AngleWindow {
    fn new(lower: Rational, lower_inclusive: bool, upper: Rational, upper_inclusive: bool, claim: WindowClaim) -> Self {
        let empty = lower > upper || (lower == upper && !(lower_inclusive && upper_inclusive));
        AngleWindow { lower, lower_inclusive, upper, upper_inclusive, empty, claim }
    }

    pub fn contains(&self, beta: &Rational) -> bool {
        if self.empty {
            return false;
        }
        let above = if self.lower_inclusive { beta >= &self.lower } else { beta > &self.lower };
        let below = if self.upper_inclusive { beta <= &self.upper } else { beta < &self.upper };
        above && below
    }
}

impl fmt::Display for AngleWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            return write!(f, "empty");
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lower_inclusive { '[' } else { '(' },
            self.lower,
            self.upper,
            if self.upper_inclusive { ']' } else { ')' }
        )
    }
}

/// Uniform log K-stability for `1 - ((n+1)lambda - S_1)/m <= beta < beta_u`,
/// under `S_1 <= mn` and `(n+1) lambda <= S_1 + m`.
pub fn uniform_stability_window(pair: &PolarisedPair, pos: &PositivityData, m: u32) -> Result<AngleWindow> {
    check_m(m)?;
    let n = pair.n();
    let m_r = int(m as i64);
    let s1 = avg_scalar_s1(pair);
    let lambda = lambda_only(pair, pos)?;
    if s1 > &m_r * &n {
        return Err(Error::PreconditionFailed(format!("S_1 <= mn fails: S_1 = {s1} > mn = {}", &m_r * &n)));
    }
    let lhs = (&n + Rational::one()) * &lambda;
    if lhs > &s1 + &m_r {
        return Err(Error::PreconditionFailed(format!(
            "(n+1) lambda <= S_1 + m fails: {lhs} > {}",
            &s1 + &m_r
        )));
    }
    let lower = Rational::one() - (lhs - &s1) / &m_r;
    let upper = beta_u(pair, pos, m)?;
    Ok(AngleWindow::new(lower, true, upper, false, WindowClaim::UniformLogKStable))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExistenceCase {
    /// `m` large relative to the nef thresholds; eta = 0 certificate.
    LargeM,
    /// A fixed `m` with `Lambda <= S_1/n <= lambda + m(1 - beta_u)`.
    GivenM,
}

/// Small-angle windows `(0, upper]` for a cscK cone metric.
///
/// `LargeM` certifies eta = 0 in the three properness conditions, which
/// needs `Lambda - m(1-beta) <= 0` and `S_1 - m(1-beta) - (n-1)lambda <= 0`
/// (boundary equality is absorbed by a small positive eta since
/// `alpha_beta > 0`).
pub fn existence_window(pair: &PolarisedPair, pos: &PositivityData, m: u32, case: ExistenceCase) -> Result<AngleWindow> {
    check_m(m)?;
    let n = pair.n();
    let m_r = int(m as i64);
    let s1 = avg_scalar_s1(pair);
    let nef = nef_bounds(pair, pos)?;
    let upper = match case {
        ExistenceCase::LargeM => {
            if nef.lambda_up >= m_r {
                return Err(Error::PreconditionFailed(format!("Lambda < m fails: Lambda = {} >= m = {m}", nef.lambda_up)));
            }
            let reach = &m_r + (&n - Rational::one()) * &nef.lambda;
            if s1 >= reach {
                return Err(Error::PreconditionFailed(format!(
                    "S_1 < m + (n-1) lambda fails: S_1 = {s1} >= {reach}"
                )));
            }
            let by_lambda_up = Rational::one() - &nef.lambda_up / &m_r;
            let by_third = Rational::one() - (&s1 - (&n - Rational::one()) * &nef.lambda) / &m_r;
            Rational::one().min(by_lambda_up).min(by_third)
        }
        ExistenceCase::GivenM => {
            if s1 > &m_r * &n {
                return Err(Error::PreconditionFailed(format!("S_1 <= mn fails: S_1 = {s1} > mn = {}", &m_r * &n)));
            }
            let bu = beta_u(pair, pos, m)?;
            let slope = &s1 / &n;
            if nef.lambda_up > slope {
                return Err(Error::PreconditionFailed(format!(
                    "Lambda <= S_1/n fails: Lambda = {} > {slope}",
                    nef.lambda_up
                )));
            }
            let cap = &nef.lambda + &m_r * (Rational::one() - &bu);
            if slope > cap {
                return Err(Error::PreconditionFailed(format!(
                    "S_1/n <= lambda + m(1 - beta_u) fails: {slope} > {cap}"
                )));
            }
            bu
        }
    };
    Ok(AngleWindow::new(Rational::zero(), false, upper, true, WindowClaim::ExistenceCscKCone))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VerdictStatus {
    CriterionSatisfied,
    Inconclusive,
    PreconditionFailed,
}

/// Witness attached to a satisfied criterion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Certificate {
    /// A feasible `eta` (midpoint of the feasible interval).
    Eta {
        #[serde(with = "serde_rational")]
        eta: Rational,
        #[serde(with = "serde_rational")]
        lower: Rational,
        lower_inclusive: bool,
        #[serde(with = "serde_rational")]
        upper: Rational,
    },
    /// A strict inequality `lhs > rhs` that was checked exactly.
    Inequality {
        #[serde(with = "serde_rational")]
        lhs: Rational,
        #[serde(with = "serde_rational")]
        rhs: Rational,
    },
    /// The criterion consumes only asserted facts.
    NotNeeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub status: VerdictStatus,
    pub claim: String,
    pub certificate: Option<Certificate>,
    pub violated: Option<String>,
    pub model: Option<PositivityModel>,
    /// Facts the verdict relied on, caller assertions included.
    pub provenance: Vec<String>,
}

impl Verdict {
    fn satisfied(claim: &str, certificate: Certificate, provenance: Vec<String>) -> Self {
        Verdict {
            status: VerdictStatus::CriterionSatisfied,
            claim: claim.to_string(),
            certificate: Some(certificate),
            violated: None,
            model: None,
            provenance,
        }
    }

    fn inconclusive(claim: &str, violated: String, provenance: Vec<String>) -> Self {
        Verdict {
            status: VerdictStatus::Inconclusive,
            claim: claim.to_string(),
            certificate: None,
            violated: Some(violated),
            model: None,
            provenance,
        }
    }

    fn precondition(claim: &str, violated: String, provenance: Vec<String>) -> Self {
        Verdict { status: VerdictStatus::PreconditionFailed, ..Verdict::inconclusive(claim, violated, provenance) }
    }

    fn with_model(mut self, model: PositivityModel) -> Self {
        self.model = Some(model);
        self
    }
}

pub const CLAIM_PROPER: &str = "log K-energy J-coercive: cscK cone metric exists and the pair is uniformly log K-stable";

/// Searches for `eta` with
/// `0 <= eta < (n+1)/n alpha_beta`, `c_1(X,D) < eta c_1(L)` and
/// `(S_beta - eta) c_1(L) < (n-1) c_1(X,D)`,
/// where `c_1(X,D) = c_1(X) - m(1-beta) c_1(L)`. In the sandwich model
/// `Lambda` bounds `c_1(X)` from above and `lambda` from below.
pub fn eta_feasibility(pair: &PolarisedPair, pos: &PositivityData, m: u32, beta: &Rational) -> Result<Verdict> {
    check_m(m)?;
    check_angle(beta)?;
    let nef = nef_bounds(pair, pos)?;
    let alpha_beta = alpha_beta_lower_bound(pos, m, beta)?;
    let n = pair.n();
    let shift = int(m as i64) * (Rational::one() - beta);
    let sbeta = avg_scalar_s1(pair) - &n * &shift;

    let upper = (&n + Rational::one()) / &n * &alpha_beta;
    let from_ii = &nef.lambda_up - &shift;
    let from_iii = &sbeta - (&n - Rational::one()) * (&nef.lambda - &shift);

    let mut lower = Rational::zero();
    let mut lower_inclusive = true;
    let mut binding = "(i) eta >= 0";
    for (bound, label) in [(&from_ii, "(ii) c1(X,D) < eta L"), (&from_iii, "(iii) (S_beta - eta) L < (n-1) c1(X,D)")] {
        if bound > &lower || (bound == &lower && lower_inclusive) {
            lower = bound.clone();
            lower_inclusive = false;
            binding = label;
        }
    }

    let provenance = vec![
        format!("alpha_beta >= {alpha_beta}"),
        format!("S_beta = {sbeta}"),
        format!("lambda = {}, Lambda = {}", nef.lambda, nef.lambda_up),
        format!("eta lower bounds: (ii) {from_ii}, (iii) {from_iii}; upper (i) {upper}"),
    ];
    let verdict = if lower < upper {
        let eta = (&lower + &upper) / int(2);
        Verdict::satisfied(
            CLAIM_PROPER,
            Certificate::Eta { eta, lower, lower_inclusive, upper },
            provenance,
        )
    } else {
        Verdict::inconclusive(
            CLAIM_PROPER,
            format!("{binding}: eta must exceed {lower} but (i) requires eta < {upper}"),
            provenance,
        )
    };
    Ok(verdict.with_model(nef.model))
}

/// Least `m` for which `eta = 0` satisfies the properness conditions at
/// angle `beta`: `Lambda - m(1-beta) < 0` and
/// `S_1 - m(1-beta) - (n-1) lambda < 0`.
pub fn min_multiplicity_eta0(pair: &PolarisedPair, pos: &PositivityData, beta: &Rational) -> Result<u64> {
    if !beta.is_positive() || beta >= &Rational::one() {
        return Err(Error::ParameterOutOfRange(format!("beta = {beta} must lie in (0, 1)")));
    }
    let nef = nef_bounds(pair, pos)?;
    let gap = Rational::one() - beta;
    let t1 = &nef.lambda_up / &gap;
    let t2 = (avg_scalar_s1(pair) - (pair.n() - Rational::one()) * &nef.lambda) / &gap;
    // least integer strictly above t
    let above = |t: &Rational| -> Rational { t.floor() + Rational::one() };
    let m = above(&t1).max(above(&t2)).max(Rational::one());
    Ok(m.to_integer().try_into().expect("multiplicity fits in u64"))
}

pub const CLAIM_ENTROPY: &str = "entropy threshold exceeds the J-threshold bound: cscK cone metric exists and the pair is uniformly log K-stable";

/// `e > max{Lambda, S_beta - (n-1)(lambda - m(1-beta))}` with `e` bounded
/// below by `entropy_lower` or by `(n+1)/n alpha_beta`.
pub fn entropy_threshold_check(pair: &PolarisedPair, pos: &PositivityData, m: u32, beta: &Rational) -> Result<Verdict> {
    check_m(m)?;
    check_angle(beta)?;
    let nef = nef_bounds(pair, pos)?;
    let n = pair.n();
    let shift = int(m as i64) * (Rational::one() - beta);
    let sbeta = avg_scalar_s1(pair) - &n * &shift;
    let (e_lower, source) = match &pos.entropy_lower {
        Some(e) => (e.clone(), "caller-supplied entropy lower bound".to_string()),
        None => {
            let a = alpha_beta_lower_bound(pos, m, beta)?;
            ((&n + Rational::one()) / &n * &a, format!("e >= (n+1)/n alpha_beta with alpha_beta >= {a}"))
        }
    };
    let second = &sbeta - (&n - Rational::one()) * (&nef.lambda - &shift);
    let bound = nef.lambda_up.clone().max(second.clone());
    let provenance = vec![source, format!("J-threshold <= max{{{}, {second}}} = {bound}", nef.lambda_up)];
    let v = if e_lower > bound {
        Verdict::satisfied(CLAIM_ENTROPY, Certificate::Inequality { lhs: e_lower, rhs: bound }, provenance)
    } else {
        Verdict::inconclusive(CLAIM_ENTROPY, format!("entropy lower bound {e_lower} does not exceed {bound}"), provenance)
    };
    Ok(v.with_model(nef.model))
}

/// Hypotheses for the singular-pair criteria. Every boolean is a caller
/// assertion about `(X, (1-beta) Delta)` and is echoed into the verdicts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularCriteriaInput {
    #[serde(rename = "Sbeta", with = "serde_rational")]
    pub sbeta: Rational,
    #[serde(with = "serde_rational")]
    pub alpha_beta: Rational,
    pub n: u32,
    #[serde(default)]
    pub is_lc: bool,
    #[serde(default)]
    pub is_klt: bool,
    #[serde(rename = "is_logCY", default)]
    pub is_log_cy: bool,
    #[serde(with = "serde_rational::option", default)]
    pub bullet1_eta: Option<Rational>,
    /// `eta L + K_X + (1-beta) Delta` ample.
    #[serde(default)]
    pub eta_class_ample: bool,
    /// `-(n-1)(K_X + (1-beta) Delta) - (S_beta - eta) L` ample.
    #[serde(default)]
    pub third_class_ample: bool,
    /// `-S_beta L - (n+1)(K_X + (1-beta) Delta)` nef.
    #[serde(default)]
    pub bullet2_nef: bool,
    /// `c_1(X, Delta) < 0`.
    #[serde(default)]
    pub corollary_neg: bool,
    /// `-S_beta L + n c_1(X, Delta)` nef.
    #[serde(default)]
    pub corollary_nef: bool,
    #[serde(default)]
    pub klt_inv_semistable: bool,
    /// `-K_X - (1-beta) Delta` ample (log Q-Fano).
    #[serde(default)]
    pub klt_inv_ample: bool,
    /// The nef hypothesis of the klt criterion, taken as asserted.
    #[serde(default)]
    pub klt_inv_nef: bool,
}

pub const CLAIM_UNIFORM: &str = "((X,L);Delta) is uniformly log K-stable with angle 2 pi beta";
pub const CLAIM_KLT: &str = "(X,(1-beta)Delta) is Kawamata log terminal";

/// Evaluates every criterion whose distinguishing hypothesis the caller
/// asserted; criteria with nothing asserted are skipped.
pub fn singular_criteria(input: &SingularCriteriaInput) -> Result<Vec<Verdict>> {
    let inp = input;
    if inp.n == 0 {
        return Err(Error::InconsistentAssertions("n must be >= 1".into()));
    }
    if inp.is_klt && !inp.is_lc {
        return Err(Error::InconsistentAssertions("klt implies log canonical; set is_lc".into()));
    }
    if inp.alpha_beta.is_negative() {
        return Err(Error::InconsistentAssertions("alpha_beta must be >= 0".into()));
    }
    if inp.is_log_cy && !inp.sbeta.is_zero() {
        return Err(Error::InconsistentAssertions(format!(
            "K_X + (1-beta)Delta = 0 forces S_beta = 0, got {}",
            inp.sbeta
        )));
    }
    if inp.corollary_neg && !inp.sbeta.is_negative() {
        return Err(Error::InconsistentAssertions(format!("c1(X,Delta) < 0 forces S_beta < 0, got {}", inp.sbeta)));
    }
    if inp.klt_inv_ample && !inp.sbeta.is_positive() {
        return Err(Error::InconsistentAssertions(format!("c1(X,Delta) > 0 forces S_beta > 0, got {}", inp.sbeta)));
    }

    let n = int(inp.n as i64);
    let lc_fact = || format!("asserted: (X,(1-beta)Delta) log canonical = {}", inp.is_lc);
    let mut out = Vec::new();

    if inp.is_log_cy {
        let prov = vec![
            "asserted: K_X + (1-beta)Delta is R-linearly trivial (log Calabi-Yau)".to_string(),
            format!("asserted: (X,(1-beta)Delta) klt = {}", inp.is_klt),
        ];
        out.push(if inp.is_klt {
            Verdict::satisfied(CLAIM_UNIFORM, Certificate::NotNeeded, prov)
        } else {
            Verdict::precondition(CLAIM_UNIFORM, "log Calabi-Yau criterion needs a klt pair".into(), prov)
        });
    }

    if let Some(eta) = &inp.bullet1_eta {
        let upper = (&n + Rational::one()) / &n * &inp.alpha_beta;
        let prov = vec![
            lc_fact(),
            format!("S_beta = {}, alpha_beta = {}, eta = {eta}", inp.sbeta, inp.alpha_beta),
            format!("asserted: eta L + K_X + (1-beta)Delta ample = {}", inp.eta_class_ample),
            format!("asserted: -(n-1)(K_X + (1-beta)Delta) - (S_beta - eta)L ample = {}", inp.third_class_ample),
        ];
        let failure = if !inp.is_lc {
            Some((true, "pair not asserted log canonical".to_string()))
        } else if !inp.sbeta.is_negative() {
            Some((false, format!("S_beta < 0 fails: S_beta = {}", inp.sbeta)))
        } else if eta.is_negative() || eta >= &upper {
            Some((false, format!("0 <= eta < (n+1)/n alpha_beta fails: eta = {eta}, bound {upper}")))
        } else if !inp.eta_class_ample {
            Some((false, "eta L + K_X + (1-beta)Delta not asserted ample".to_string()))
        } else if !inp.third_class_ample {
            Some((false, "-(n-1)(K_X + (1-beta)Delta) - (S_beta - eta)L not asserted ample".to_string()))
        } else {
            None
        };
        out.push(match failure {
            None => Verdict::satisfied(
                CLAIM_UNIFORM,
                Certificate::Eta { eta: eta.clone(), lower: Rational::zero(), lower_inclusive: true, upper },
                prov,
            ),
            Some((true, why)) => Verdict::precondition(CLAIM_UNIFORM, why, prov),
            Some((false, why)) => Verdict::inconclusive(CLAIM_UNIFORM, why, prov),
        });
    }

    if inp.bullet2_nef {
        let rhs = (&n + Rational::one()) * &inp.alpha_beta;
        let prov = vec![
            lc_fact(),
            format!("S_beta = {}, (n+1) alpha_beta = {rhs}", inp.sbeta),
            "asserted: -S_beta L - (n+1)(K_X + (1-beta)Delta) nef".to_string(),
        ];
        out.push(if !inp.is_lc {
            Verdict::precondition(CLAIM_UNIFORM, "pair not asserted log canonical".into(), prov)
        } else if inp.sbeta < rhs {
            Verdict::satisfied(CLAIM_UNIFORM, Certificate::Inequality { lhs: rhs, rhs: inp.sbeta.clone() }, prov)
        } else {
            Verdict::inconclusive(CLAIM_UNIFORM, format!("S_beta < (n+1) alpha_beta fails: {} >= {rhs}", inp.sbeta), prov)
        });
    }

    if inp.corollary_neg || inp.corollary_nef {
        let prov = vec![
            lc_fact(),
            format!("asserted: c1(X,Delta) < 0 = {}", inp.corollary_neg),
            format!("asserted: -S_beta L + n c1(X,Delta) nef = {}", inp.corollary_nef),
        ];
        out.push(if !inp.is_lc {
            Verdict::precondition(CLAIM_UNIFORM, "pair not asserted log canonical".into(), prov)
        } else if inp.corollary_neg && inp.corollary_nef {
            Verdict::satisfied(CLAIM_UNIFORM, Certificate::NotNeeded, prov)
        } else {
            Verdict::inconclusive(CLAIM_UNIFORM, "negativity and nefness must both be asserted".into(), prov)
        });
    }

    if inp.klt_inv_semistable || inp.klt_inv_ample || inp.klt_inv_nef {
        let prov = vec![
            format!("asserted: log K-semistable with angle 2 pi beta = {}", inp.klt_inv_semistable),
            format!("asserted: -K_X - (1-beta)Delta ample = {}", inp.klt_inv_ample),
            format!("asserted: klt-criterion nef hypothesis = {}", inp.klt_inv_nef),
        ];
        out.push(if inp.klt_inv_semistable && inp.klt_inv_ample && inp.klt_inv_nef {
            Verdict::satisfied(CLAIM_KLT, Certificate::NotNeeded, prov)
        } else {
            Verdict::inconclusive(CLAIM_KLT, "semistability, log Q-Fano and nef hypotheses must all be asserted".into(), prov)
        });
    }

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use proptest::prelude::*;

    fn p2() -> PolarisedPair {
        PolarisedPair::new("P2", 2, int(1), int(3), Some(int(3))).unwrap()
    }

    fn p1xp1() -> PolarisedPair {
        PolarisedPair::new("P1xP1", 2, int(2), int(4), Some(int(2))).unwrap()
    }

    fn fano(n: u32) -> PolarisedPair {
        PolarisedPair::new("Fano", n, int(1), int(1), Some(int(1))).unwrap()
    }

    fn p2_alphas() -> PositivityData {
        PositivityData {
            alpha_l: Some(rat(1, 3)),
            alpha_ld_restricted: Some(rat(1, 2)),
            lambda: Some(int(3)),
            lambda_up: Some(int(3)),
            ..Default::default()
        }
    }

    fn with_alpha(a: Rational) -> PositivityData {
        PositivityData { alpha_l: Some(a.clone()), alpha_ld_restricted: Some(a), ..Default::default() }
    }

    #[test]
    fn alpha_beta_examples() {
        assert_eq!(alpha_beta_lower_bound(&p2_alphas(), 4, &rat(5, 16)).unwrap(), rat(1, 3));
        assert_eq!(alpha_beta_lower_bound(&with_alpha(rat(1, 3)), 1, &int(1)).unwrap(), rat(1, 3));
        let over = PositivityData { alpha_beta_override: Some(rat(7, 10)), ..Default::default() };
        assert_eq!(alpha_beta_lower_bound(&over, 3, &rat(1, 2)).unwrap(), rat(7, 10));
        assert!(matches!(
            alpha_beta_lower_bound(&PositivityData::default(), 1, &int(1)),
            Err(Error::MissingAlphaData(_))
        ));
    }

    #[test]
    fn beta_u_examples() {
        assert_eq!(beta_u(&p2(), &p2_alphas(), 4).unwrap(), rat(3, 8));
        assert_eq!(beta_u(&fano(2), &with_alpha(rat(2, 3)), 1).unwrap(), int(1));
        // both alphas zero: only 1 - S_1/(mn) survives
        assert_eq!(beta_u(&p2(), &with_alpha(int(0)), 4).unwrap(), rat(1, 4));
    }

    #[test]
    fn fano_beta_u_matches_kahler_einstein_formula() {
        // min{1, 1 - 1/m + (n+1)/(mn) * alpha} when lambda = Lambda = 1, S_1 = n
        for n in 2..5u32 {
            for m in 1..5u32 {
                for a in [rat(1, 5), rat(1, 2), rat(2, 3), int(1)] {
                    let pos = with_alpha(a.clone());
                    let (nr, mr) = (int(n as i64), int(m as i64));
                    let ad = a.clone().min(&mr * &a);
                    let expect = (int(1) - int(1) / &mr + (&nr + int(1)) / (&mr * &nr) * ad).min(int(1));
                    assert_eq!(beta_u(&fano(n), &pos, m).unwrap(), expect);
                }
            }
        }
    }

    #[test]
    fn uniform_window_examples() {
        let w = uniform_stability_window(&p2(), &p2_alphas(), 4).unwrap();
        assert_eq!((w.lower.clone(), w.upper.clone()), (rat(1, 4), rat(3, 8)));
        assert!(w.lower_inclusive && !w.upper_inclusive && !w.empty);
        assert_eq!(w.to_string(), "[1/4, 3/8)");

        assert!(matches!(
            uniform_stability_window(&p2(), &p2_alphas(), 2),
            Err(Error::PreconditionFailed(_))
        ));

        let f = uniform_stability_window(&fano(2), &with_alpha(rat(2, 3)), 1).unwrap();
        assert_eq!(f.to_string(), "[0, 1)");
    }

    #[test]
    fn existence_window_examples() {
        let w = existence_window(&p2(), &p2_alphas(), 4, ExistenceCase::LargeM).unwrap();
        assert_eq!(w.to_string(), "(0, 1/4]");
        let w = existence_window(&p2(), &p2_alphas(), 4, ExistenceCase::GivenM).unwrap();
        assert_eq!(w.to_string(), "(0, 3/8]");
        assert!(matches!(
            existence_window(&p2(), &p2_alphas(), 3, ExistenceCase::LargeM),
            Err(Error::PreconditionFailed(msg)) if msg.contains("Lambda < m")
        ));
    }

    #[test]
    fn fano_given_m_preconditions_hold_automatically() {
        for n in 2..5u32 {
            for m in 1..6u32 {
                let w = existence_window(&fano(n), &with_alpha(rat(1, 2)), m, ExistenceCase::GivenM);
                assert!(w.is_ok(), "n={n} m={m}: {w:?}");
            }
        }
    }

    #[test]
    fn eta_feasibility_examples() {
        let v = eta_feasibility(&p2(), &p2_alphas(), 4, &rat(5, 16)).unwrap();
        assert_eq!(v.status, VerdictStatus::CriterionSatisfied);
        assert_eq!(
            v.certificate,
            Some(Certificate::Eta { eta: rat(3, 8), lower: rat(1, 4), lower_inclusive: false, upper: rat(1, 2) })
        );
        assert_eq!(v.model, Some(PositivityModel::Proportional));

        // beta = 1/8: both strict bounds are -1/2, so eta ranges over [0, 1/2).
        let v = eta_feasibility(&p2(), &p2_alphas(), 4, &rat(1, 8)).unwrap();
        assert_eq!(
            v.certificate,
            Some(Certificate::Eta { eta: rat(1, 4), lower: int(0), lower_inclusive: true, upper: rat(1, 2) })
        );

        let zero = PositivityData { alpha_beta_override: Some(int(0)), ..p2_alphas() };
        let v = eta_feasibility(&p2(), &zero, 1, &rat(1, 2)).unwrap();
        assert_eq!(v.status, VerdictStatus::Inconclusive);
        assert!(v.violated.is_some());
    }

    #[test]
    fn eta_feasibility_input_errors() {
        assert!(matches!(eta_feasibility(&p2(), &p2_alphas(), 4, &int(0)), Err(Error::ParameterOutOfRange(_))));
        let pair = PolarisedPair::new("q", 2, int(1), int(2), None).unwrap();
        assert!(matches!(
            eta_feasibility(&pair, &with_alpha(int(1)), 4, &rat(1, 2)),
            Err(Error::MissingPositivityData(_))
        ));
    }

    #[test]
    fn sandwich_is_labelled() {
        let pair = PolarisedPair::new("q", 2, int(1), int(3), None).unwrap();
        let pos = PositivityData { lambda: Some(int(2)), lambda_up: Some(int(4)), ..with_alpha(int(1)) };
        let v = eta_feasibility(&pair, &pos, 6, &rat(1, 2)).unwrap();
        assert_eq!(v.model, Some(PositivityModel::Sandwich));
    }

    #[test]
    fn positivity_consistency() {
        let bad = PositivityData { lambda: Some(int(2)), ..p2_alphas() };
        assert!(matches!(nef_bounds(&p2(), &bad), Err(Error::InconsistentPositivity(_))));
        let pair = PolarisedPair::new("q", 2, int(1), int(3), None).unwrap();
        let bad = PositivityData { lambda: Some(int(2)), lambda_up: Some(int(1)), ..Default::default() };
        assert!(nef_bounds(&pair, &bad).is_err());
        let bad = PositivityData { lambda: Some(int(4)), lambda_up: Some(int(5)), ..Default::default() };
        assert!(nef_bounds(&pair, &bad).is_err(), "lambda above S_1/n = 3");
        let bad = PositivityData { lambda: Some(int(1)), lambda_up: Some(int(2)), ..Default::default() };
        assert!(nef_bounds(&pair, &bad).is_err(), "Lambda below S_1/n = 3");
        let neg = PositivityData { alpha_l: Some(int(-1)), ..Default::default() };
        assert!(neg.validate(&pair).is_err());
    }

    #[test]
    fn min_multiplicity_examples() {
        assert_eq!(min_multiplicity_eta0(&p2(), &p2_alphas(), &rat(1, 2)).unwrap(), 7);
        assert_eq!(min_multiplicity_eta0(&p1xp1(), &PositivityData::default(), &rat(1, 2)).unwrap(), 5);
        let a = min_multiplicity_eta0(&p2(), &p2_alphas(), &rat(99, 100)).unwrap();
        let b = min_multiplicity_eta0(&p2(), &p2_alphas(), &rat(999, 1000)).unwrap();
        assert_eq!((a, b), (301, 3001));
        assert!(min_multiplicity_eta0(&p2(), &p2_alphas(), &int(1)).is_err());
    }

    #[test]
    fn eta_zero_certified_at_min_multiplicity() {
        for beta in [rat(1, 10), rat(1, 2), rat(7, 8)] {
            for pair in [p2(), p1xp1()] {
                let m = min_multiplicity_eta0(&pair, &PositivityData::default(), &beta).unwrap() as u32;
                let pos = with_alpha(rat(1, 100));
                let v = eta_feasibility(&pair, &pos, m, &beta).unwrap();
                assert_eq!(v.status, VerdictStatus::CriterionSatisfied);
                match v.certificate {
                    Some(Certificate::Eta { lower, lower_inclusive, .. }) => {
                        assert_eq!(lower, int(0));
                        assert!(lower_inclusive);
                    }
                    other => panic!("{other:?}"),
                }
            }
        }
    }

    #[test]
    fn entropy_examples() {
        let v = entropy_threshold_check(&p2(), &p2_alphas(), 4, &rat(5, 16)).unwrap();
        assert_eq!(v.status, VerdictStatus::Inconclusive);

        let pos = PositivityData { alpha_beta_override: Some(rat(3, 4)), ..Default::default() };
        let v = entropy_threshold_check(&fano(2), &pos, 1, &rat(1, 2)).unwrap();
        assert_eq!(v.status, VerdictStatus::CriterionSatisfied);
        assert_eq!(v.certificate, Some(Certificate::Inequality { lhs: rat(9, 8), rhs: int(1) }));

        let pos = PositivityData { entropy_lower: Some(int(0)), ..p2_alphas() };
        for b in [rat(1, 10), rat(1, 2), int(1)] {
            let v = entropy_threshold_check(&p2(), &pos, 4, &b).unwrap();
            assert_eq!(v.status, VerdictStatus::Inconclusive);
        }
    }

    #[test]
    fn singular_examples() {
        let cy = SingularCriteriaInput { n: 2, is_log_cy: true, is_klt: true, is_lc: true, ..Default::default() };
        let v = singular_criteria(&cy).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].status, VerdictStatus::CriterionSatisfied);
        assert_eq!(v[0].claim, CLAIM_UNIFORM);

        let b2 = SingularCriteriaInput { is_lc: true, sbeta: int(-3), n: 2, bullet2_nef: true, ..Default::default() };
        let v = singular_criteria(&b2).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].status, VerdictStatus::CriterionSatisfied);
        assert_eq!(v[0].certificate, Some(Certificate::Inequality { lhs: int(0), rhs: int(-3) }));

        let kl = SingularCriteriaInput {
            n: 2,
            sbeta: int(1),
            klt_inv_semistable: true,
            klt_inv_ample: true,
            klt_inv_nef: true,
            ..Default::default()
        };
        let v = singular_criteria(&kl).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].claim, CLAIM_KLT);
        assert_eq!(v[0].status, VerdictStatus::CriterionSatisfied);
    }

    #[test]
    fn singular_bullet1_and_corollary() {
        let base = SingularCriteriaInput {
            n: 2,
            is_lc: true,
            sbeta: int(-1),
            alpha_beta: rat(1, 2),
            bullet1_eta: Some(rat(1, 2)),
            eta_class_ample: true,
            third_class_ample: true,
            ..Default::default()
        };
        let v = singular_criteria(&base).unwrap();
        assert_eq!(v[0].status, VerdictStatus::CriterionSatisfied);
        // eta at the (n+1)/n alpha_beta = 3/4 boundary is not allowed
        let edge = SingularCriteriaInput { bullet1_eta: Some(rat(3, 4)), ..base.clone() };
        assert_eq!(singular_criteria(&edge).unwrap()[0].status, VerdictStatus::Inconclusive);
        let not_lc = SingularCriteriaInput { is_lc: false, ..base.clone() };
        assert_eq!(singular_criteria(&not_lc).unwrap()[0].status, VerdictStatus::PreconditionFailed);

        let cor = SingularCriteriaInput { corollary_neg: true, corollary_nef: true, ..base };
        let v = singular_criteria(&cor).unwrap();
        assert_eq!(v.len(), 2);
        assert!(v.iter().all(|v| v.status == VerdictStatus::CriterionSatisfied));
    }

    #[test]
    fn singular_inconsistencies() {
        let klt_no_lc = SingularCriteriaInput { n: 2, is_klt: true, ..Default::default() };
        assert!(matches!(singular_criteria(&klt_no_lc), Err(Error::InconsistentAssertions(_))));
        let cy = SingularCriteriaInput { n: 2, is_log_cy: true, sbeta: int(1), ..Default::default() };
        assert!(singular_criteria(&cy).is_err());
        assert!(singular_criteria(&SingularCriteriaInput::default()).is_err());
        let none = SingularCriteriaInput { n: 3, ..Default::default() };
        assert!(singular_criteria(&none).unwrap().is_empty());
    }

    #[test]
    fn window_coherence_on_p2() {
        let pos = p2_alphas();
        let w = uniform_stability_window(&p2(), &pos, 4).unwrap();
        for k in 0..64 {
            let beta = &w.lower + (&w.upper - &w.lower) * rat(k, 64);
            assert!(w.contains(&beta));
            let v = eta_feasibility(&p2(), &pos, 4, &beta).unwrap();
            assert_eq!(v.status, VerdictStatus::CriterionSatisfied, "beta = {beta}");
        }
        for k in 1..=40 {
            let beta = &w.upper + rat(k, 64);
            if beta > int(1) {
                break;
            }
            let v = eta_feasibility(&p2(), &pos, 4, &beta).unwrap();
            assert_eq!(v.status, VerdictStatus::Inconclusive, "beta = {beta}");
        }
    }

    proptest! {
        #[test]
        fn beta_u_monotone_in_alphas(a in 0i64..40, b in 0i64..40, da in 0i64..10, m in 1u32..8) {
            let lo = PositivityData { alpha_l: Some(rat(a, 10)), alpha_ld_restricted: Some(rat(b, 10)), ..Default::default() };
            let hi_a = PositivityData { alpha_l: Some(rat(a + da, 10)), ..lo.clone() };
            let hi_b = PositivityData { alpha_ld_restricted: Some(rat(b + da, 10)), ..lo.clone() };
            let base = beta_u(&p2(), &lo, m).unwrap();
            prop_assert!(beta_u(&p2(), &hi_a, m).unwrap() >= base);
            prop_assert!(beta_u(&p2(), &hi_b, m).unwrap() >= base);
        }

        #[test]
        fn min_multiplicity_monotone(b1 in 1i64..999, b2 in 1i64..999) {
            let (lo, hi) = (b1.min(b2), b1.max(b2));
            let pos = PositivityData::default();
            let m_lo = min_multiplicity_eta0(&p1xp1(), &pos, &rat(lo, 1000)).unwrap();
            let m_hi = min_multiplicity_eta0(&p1xp1(), &pos, &rat(hi, 1000)).unwrap();
            prop_assert!(m_lo <= m_hi);
        }

        #[test]
        fn windows_within_unit_interval(a in 1i64..60, b in 1i64..60, m in 1u32..12, n in 2u32..5) {
            let pos = PositivityData { alpha_l: Some(rat(a, 20)), alpha_ld_restricted: Some(rat(b, 20)), ..Default::default() };
            let pair = fano(n);
            let windows = [
                uniform_stability_window(&pair, &pos, m),
                existence_window(&pair, &pos, m, ExistenceCase::LargeM),
                existence_window(&pair, &pos, m, ExistenceCase::GivenM),
            ];
            for w in windows.into_iter().flatten() {
                if !w.empty {
                    prop_assert!(w.lower >= int(0));
                    prop_assert!(w.lower <= w.upper);
                    prop_assert!(w.upper <= int(1));
                }
            }
        }
    }
}
