//! Brute-force dimension and weight sums for the normal-cone degeneration,
//! coefficient recovery by exact interpolation, the flatness identity and
//! finite-k `J` statistics.
//!
//! The central fibre splits as
//! `H0(X, L^{(1-c)k}) + sum_{i<ck} t^{ck-i} H0(D, L|_D^{k-i})`, with `t`
//! acting by weight `-1`, so every weight is `<= 0`.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{big, binomial, factorial, int, serde_bigint, serde_rational, Polynomial, Rational};
use crate::normalcone::{coefficients, jna_normal_cone, NormalConeCoefficients};
use crate::pairmodel::{DivisorSpec, PolarisedPair};

/// Something that knows `h_X(k) = dim H0(X, L^k)`.
pub trait DimensionModel {
    /// Smallest `k` at which [`DimensionModel::h_x`] is trusted.
    fn floor(&self) -> u64;

    /// `h_X(k)`; negative `k` gives 0.
    fn h_x(&self, k: i64) -> Result<BigInt>;

    /// Divisor dimensions from the restriction sequence,
    /// `h_D(j) = h_X(j) - h_X(j-1)`.
    fn h_d(&self, j: i64) -> Result<BigInt> {
        Ok(self.h_x(j)? - self.h_x(j - 1)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum HilbertModel {
    /// `h(k) = C(n+k, n)`.
    ProjectiveSpace { n: u32 },
    /// `h(k) = (k+1)^2` for `O(1,1)`.
    ProductP1P1 {},
    /// Polynomial in `k`, coefficients in increasing degree, valid from
    /// `floor` on.
    ExplicitPolynomial {
        #[serde(with = "serde_poly")]
        coeffs: Polynomial,
        floor: u64,
    },
}

mod serde_poly {
    use super::Polynomial;
    use crate::exactnum::{fmt_rational, serde_rational::RawRational};
    use serde::{de::Error as _, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &Polynomial, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(p.coeffs().len()))?;
        for c in p.coeffs() {
            seq.serialize_element(&fmt_rational(c))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Polynomial, D::Error> {
        let raw = Vec::<RawRational>::deserialize(d)?;
        let cs = raw.into_iter().map(|r| r.into_rational().map_err(D::Error::custom)).collect::<Result<_, _>>()?;
        Ok(Polynomial::new(cs))
    }
}

impl HilbertModel {
    pub fn description(&self) -> String {
        match self {
            HilbertModel::ProjectiveSpace { n } => format!("P^{n} with O(1): h(k) = C({n}+k, {n})"),
            HilbertModel::ProductP1P1 {} => "P1 x P1 with O(1,1): h(k) = (k+1)^2".to_string(),
            HilbertModel::ExplicitPolynomial { coeffs, floor } => format!("h(k) = {coeffs} for k >= {floor}"),
        }
    }
}

impl DimensionModel for HilbertModel {
    fn floor(&self) -> u64 {
        match self {
            HilbertModel::ExplicitPolynomial { floor, .. } => *floor,
            _ => 0,
        }
    }

    fn h_x(&self, k: i64) -> Result<BigInt> {
        if k < 0 {
            return Ok(BigInt::zero());
        }
        match self {
            HilbertModel::ProjectiveSpace { n } => Ok(binomial(*n as u64 + k as u64, *n as u64)),
            HilbertModel::ProductP1P1 {} => Ok(BigInt::from(k + 1).pow(2)),
            HilbertModel::ExplicitPolynomial { coeffs, floor } => {
                if (k as u64) < *floor {
                    return Err(Error::BelowValidityFloor(format!("h_X({k}) requested, model valid from k = {floor}")));
                }
                let v = coeffs.eval(&int(k));
                if !v.is_integer() {
                    return Err(Error::NonIntegralDimension(format!("h_X({k}) = {v}")));
                }
                Ok(v.to_integer())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightSample {
    pub k: u64,
    #[serde(with = "serde_bigint")]
    pub d_k: BigInt,
    #[serde(with = "serde_bigint")]
    pub w_k: BigInt,
    #[serde(with = "serde_bigint")]
    pub d_tilde_k: BigInt,
    #[serde(with = "serde_bigint")]
    pub w_tilde_k: BigInt,
    #[serde(with = "serde_rational")]
    pub c: Rational,
    /// `J_k = -w_k / (k d_k)`.
    #[serde(with = "serde_rational")]
    pub j_k: Rational,
}

fn check_c(c: &Rational) -> Result<()> {
    if !c.is_positive() || c >= &Rational::one() {
        Err(Error::ParameterOutOfRange(format!("c = {c} must lie in (0, 1)")))
    } else {
        Ok(())
    }
}

/// `k` is admissible when `ck` is a positive integer and every dimension
/// the decomposition reads lies on the model's validity range.
pub fn admissible(model: &dyn DimensionModel, c: &Rational, k: u64) -> bool {
    let ck = c * int(k as i64);
    ck.is_integer() && ck.is_positive() && (int(k as i64) - ck).to_integer() >= BigInt::from(model.floor())
}

pub fn dims_and_weights(model: &dyn DimensionModel, c: &Rational, k: u64) -> Result<WeightSample> {
    check_c(c)?;
    let ck_r = c * int(k as i64);
    if !ck_r.is_integer() || !ck_r.is_positive() {
        return Err(Error::NonIntegralCK { c: c.to_string(), k });
    }
    if !admissible(model, c, k) {
        return Err(Error::BelowValidityFloor(format!(
            "k = {k}, (1-c)k = {} is below the floor {}",
            int(k as i64) - &ck_r,
            model.floor()
        )));
    }
    let ck = ck_r.to_integer().to_i64().expect("ck fits in i64");
    let k_i = k as i64;
    let mut d = model.h_x(k_i - ck)?;
    let mut w = BigInt::zero();
    for i in 0..ck {
        let hd = model.h_d(k_i - i)?;
        w -= BigInt::from(ck - i) * &hd;
        d += hd;
    }
    let d_tilde = model.h_d(k_i)?;
    let w_tilde = -(BigInt::from(ck) * &d_tilde);
    let j_k = -big(&w) / (int(k_i) * big(&d));
    Ok(WeightSample { k, d_k: d, w_k: w, d_tilde_k: d_tilde, w_tilde_k: w_tilde, c: c.clone(), j_k })
}

/// Admissible `k <= k_max`: multiples of the denominator of `c`.
pub fn admissible_ks(model: &dyn DimensionModel, c: &Rational, k_max: u64) -> Vec<u64> {
    let q = c.denom().to_u64().expect("denominator fits in u64");
    (1..=k_max / q).map(|i| i * q).filter(|&k| admissible(model, c, k)).collect()
}

/// `d_k = h_X(k)` at every admissible `k <= k_max`.
pub fn flatness_check(model: &dyn DimensionModel, c: &Rational, k_max: u64) -> Result<bool> {
    check_c(c)?;
    for k in admissible_ks(model, c, k_max) {
        if dims_and_weights(model, c, k)?.d_k != model.h_x(k as i64)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Recovery {
    pub coefficients: NormalConeCoefficients,
    pub sample_ks: Vec<u64>,
    pub held_out_k: u64,
}

/// First `n+3` admissible `k` for interpolation plus one held out.
pub fn recovery_ks(model: &dyn DimensionModel, c: &Rational, n: u32) -> Vec<u64> {
    let q = c.denom().to_u64().expect("denominator fits in u64");
    let need = n as usize + 4;
    (1..).map(|i| i * q).filter(|&k| admissible(model, c, k)).take(need).collect()
}

fn fit(
    samples: &[WeightSample],
    held: &WeightSample,
    what: &str,
    get: impl Fn(&WeightSample) -> &BigInt,
    degree: usize,
) -> Result<Polynomial> {
    let pts: Vec<_> = samples.iter().map(|s| (int(s.k as i64), big(get(s)))).collect();
    let p = Polynomial::interpolate(&pts)?;
    let at = p.eval(&int(held.k as i64));
    if at != big(get(held)) {
        return Err(Error::DegreeMismatch(format!(
            "{what} interpolant gives {at} at k = {}, direct sum {}",
            held.k,
            get(held)
        )));
    }
    if p.degree() != Some(degree) {
        return Err(Error::DegreeMismatch(format!("{what} has degree {:?}, expected {degree}", p.degree())));
    }
    Ok(p)
}

/// Expansion coefficients read off exact interpolants of the weight sums.
/// The model must reproduce the pair's Riemann-Roch leading terms.
pub fn recover_coefficients(
    model: &dyn DimensionModel,
    c: &Rational,
    pair: &PolarisedPair,
    div: &DivisorSpec,
) -> Result<Recovery> {
    check_c(c)?;
    if div.m != 1 {
        return Err(Error::MultiplicityUnsupported(div.m));
    }
    let n = pair.dimension;
    if n < 2 {
        return Err(Error::DimensionTooSmall(n));
    }
    let ks = recovery_ks(model, c, n);
    let samples = ks.iter().map(|&k| dims_and_weights(model, c, k)).collect::<Result<Vec<_>>>()?;
    let (held, fitted) = samples.split_last().expect("at least n+4 samples");
    let nu = n as usize;

    let hilbert_pts: Vec<_> = fitted.iter().map(|s| Ok((int(s.k as i64), big(&model.h_x(s.k as i64)?)))).collect::<Result<_>>()?;
    let hx = Polynomial::interpolate(&hilbert_pts)?;
    let expect_top = &pair.l_top / big(&factorial(n as u64));
    let expect_next = &pair.cx_l / (int(2) * big(&factorial(n as u64 - 1)));
    if hx.degree() != Some(nu) || hx.coeff(nu) != expect_top || hx.coeff(nu - 1) != expect_next {
        return Err(Error::ModelMismatch(format!(
            "Hilbert polynomial {hx} does not start {expect_top} k^{n} + {expect_next} k^{}",
            n - 1
        )));
    }

    let d = fit(fitted, held, "d_k", |s| &s.d_k, nu)?;
    let w = fit(fitted, held, "w_k", |s| &s.w_k, nu + 1)?;
    let dt = fit(fitted, held, "d~_k", |s| &s.d_tilde_k, nu - 1)?;
    let wt = fit(fitted, held, "w~_k", |s| &s.w_tilde_k, nu)?;
    Ok(Recovery {
        coefficients: NormalConeCoefficients {
            a0: d.coeff(nu),
            a1: d.coeff(nu - 1),
            b0: w.coeff(nu + 1),
            b1: w.coeff(nu),
            a0_tilde: dt.coeff(nu - 1),
            b0_tilde: wt.coeff(nu),
            c: c.clone(),
            n,
        },
        sample_ks: fitted.iter().map(|s| s.k).collect(),
        held_out_k: held.k,
    })
}

pub fn jna_finite_k(model: &dyn DimensionModel, c: &Rational, k: u64) -> Result<Rational> {
    Ok(dims_and_weights(model, c, k)?.j_k)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub pair: String,
    #[serde(with = "serde_rational")]
    pub c: Rational,
    pub samples: Vec<WeightSample>,
    pub recovered: NormalConeCoefficients,
    pub closed_form: NormalConeCoefficients,
    #[serde(rename = "match")]
    pub matches: bool,
    pub flat: bool,
    /// `-b0/a0` from the recovered coefficients.
    #[serde(with = "serde_rational")]
    pub jna_limit: Rational,
    #[serde(with = "serde_rational")]
    pub jna_closed: Rational,
    pub sample_ks: Vec<u64>,
    pub held_out_k: u64,
}

impl OracleReport {
    /// Every exact gate passed.
    pub fn ok(&self) -> bool {
        self.matches && self.flat && self.jna_limit == self.jna_closed
    }
}

/// Full oracle run. `samples` lists the displayed samples for the
/// admissible `k <= k_max`; the caller may compute them in any order.
pub fn oracle_report_with(
    model: &dyn DimensionModel,
    pair: &PolarisedPair,
    div: &DivisorSpec,
    c: &Rational,
    samples: Vec<WeightSample>,
) -> Result<OracleReport> {
    let rec = recover_coefficients(model, c, pair, div)?;
    let closed = coefficients(pair, div, c)?;
    let k_max = samples.iter().map(|s| s.k).max().unwrap_or(0);
    let flat = samples.iter().map(|s| Ok(s.d_k == model.h_x(s.k as i64)?)).collect::<Result<Vec<_>>>()?.into_iter().all(|b| b)
        && flatness_check(model, c, k_max)?;
    Ok(OracleReport {
        pair: pair.name.clone(),
        c: c.clone(),
        samples,
        matches: rec.coefficients == closed,
        flat,
        jna_limit: -&rec.coefficients.b0 / &rec.coefficients.a0,
        jna_closed: jna_normal_cone(pair, div, c)?,
        recovered: rec.coefficients,
        closed_form: closed,
        sample_ks: rec.sample_ks,
        held_out_k: rec.held_out_k,
    })
}

pub fn oracle_report(
    model: &dyn DimensionModel,
    pair: &PolarisedPair,
    div: &DivisorSpec,
    c: &Rational,
    k_max: u64,
) -> Result<OracleReport> {
    let samples = admissible_ks(model, c, k_max)
        .into_iter()
        .map(|k| dims_and_weights(model, c, k))
        .collect::<Result<Vec<_>>>()?;
    oracle_report_with(model, pair, div, c, samples)
}

/// `w_k` for projective space evaluated through Faulhaber sums instead
/// of the term-by-term loop.
fn weight_by_power_sums(model: &HilbertModel, c: &Rational, k: u64) -> Option<BigInt> {
    // For P^n the divisor is P^{n-1}: h_D(j) = C(n-1+j, n-1), a polynomial
    // in j; w_k = -sum_{s=1}^{ck} s h_D(k - ck + s) via Faulhaber.
    let HilbertModel::ProjectiveSpace { n } = model else { return None };
    let ck = (c * int(k as i64)).to_integer().to_i64()?;
    let base = k as i64 - ck;
    let mut hd = Polynomial::constant(Rational::one());
    for t in 1..*n as i64 {
        hd = &hd * &Polynomial::new(vec![int(t), Rational::one()]);
    }
    hd = hd.scale(&big(&factorial(*n as u64 - 1)).recip());
    // s * h_D(base + s) as a polynomial in s
    let summand = &Polynomial::x() * &hd.shift(&int(base));
    let mut total = Rational::zero();
    for (p, coef) in summand.coeffs().iter().enumerate() {
        total += coef * crate::exactnum::power_sum(p, ck as u64);
    }
    debug_assert!(total.is_integer());
    Some(-total.to_integer())
}

/// Cross-checks `w_k` against the power-sum evaluation where one exists.
pub fn weight_cross_check(model: &HilbertModel, c: &Rational, k: u64) -> Result<Option<bool>> {
    let direct = dims_and_weights(model, c, k)?.w_k;
    Ok(weight_by_power_sums(model, c, k).map(|w| w == direct))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::normalcone::{df_closed, df_from_coefficients};

    fn p2m() -> HilbertModel {
        HilbertModel::ProjectiveSpace { n: 2 }
    }

    fn p2() -> PolarisedPair {
        PolarisedPair::new("P2", 2, int(1), int(3), Some(int(3))).unwrap()
    }
    fn p3() -> PolarisedPair {
        PolarisedPair::new("P3", 3, int(1), int(4), Some(int(4))).unwrap()
    }
    fn q() -> PolarisedPair {
        PolarisedPair::new("P1xP1", 2, int(2), int(4), Some(int(2))).unwrap()
    }
    fn h() -> DivisorSpec {
        DivisorSpec::hyperplane()
    }

    struct Corrupted;
    impl DimensionModel for Corrupted {
        fn floor(&self) -> u64 {
            0
        }
        fn h_x(&self, k: i64) -> Result<BigInt> {
            p2m().h_x(k)
        }
        fn h_d(&self, j: i64) -> Result<BigInt> {
            Ok(self.h_x(j)? - self.h_x(j - 2)?)
        }
    }

    fn bi(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn sample_examples() {
        let s = dims_and_weights(&p2m(), &rat(1, 2), 4).unwrap();
        assert_eq!((s.d_k, s.w_k, s.d_tilde_k, s.w_tilde_k), (bi(15), bi(-14), bi(5), bi(-10)));
        let s = dims_and_weights(&p2m(), &rat(1, 2), 2).unwrap();
        assert_eq!((s.d_k, s.w_k), (bi(6), bi(-3)));
        let s = dims_and_weights(&p2m(), &rat(1, 2), 6).unwrap();
        assert_eq!((s.d_k, s.w_k), (bi(28), bi(-38)));
    }

    #[test]
    fn sample_errors() {
        assert!(matches!(dims_and_weights(&p2m(), &rat(1, 2), 3), Err(Error::NonIntegralCK { .. })));
        assert!(matches!(dims_and_weights(&p2m(), &rat(1, 2), 0), Err(Error::NonIntegralCK { .. })));
        let poly = HilbertModel::ExplicitPolynomial { coeffs: Polynomial::new(vec![int(1), rat(3, 2), rat(1, 2)]), floor: 5 };
        assert!(matches!(dims_and_weights(&poly, &rat(1, 2), 4), Err(Error::BelowValidityFloor(_))));
        assert!(dims_and_weights(&poly, &rat(1, 2), 12).is_ok());
        let frac = HilbertModel::ExplicitPolynomial { coeffs: Polynomial::new(vec![int(0), rat(1, 2)]), floor: 0 };
        assert!(matches!(frac.h_x(1), Err(Error::NonIntegralDimension(_))));
    }

    #[test]
    fn flatness() {
        assert!(flatness_check(&p2m(), &rat(1, 2), 60).unwrap());
        assert!(flatness_check(&HilbertModel::ProductP1P1 {}, &rat(1, 3), 60).unwrap());
        assert!(!flatness_check(&Corrupted, &rat(1, 2), 60).unwrap());
    }

    #[test]
    fn recovery_examples() {
        let r = recover_coefficients(&p2m(), &rat(1, 2), &p2(), &h()).unwrap();
        let k = &r.coefficients;
        assert_eq!(
            (&k.b0, &k.b1, &k.a0, &k.a1, &k.a0_tilde, &k.b0_tilde),
            (&rat(-5, 48), &rat(-3, 8), &rat(1, 2), &rat(3, 2), &int(1), &rat(-1, 2))
        );
        assert_eq!(r.sample_ks, vec![2, 4, 6, 8, 10]);
        assert_eq!(r.held_out_k, 12);

        let r = recover_coefficients(&HilbertModel::ProductP1P1 {}, &rat(3, 4), &q(), &h()).unwrap();
        assert_eq!(r.coefficients, coefficients(&q(), &h(), &rat(3, 4)).unwrap());
        assert_eq!(r.sample_ks, vec![4, 8, 12, 16, 20]);

        let r = recover_coefficients(&HilbertModel::ProjectiveSpace { n: 3 }, &rat(1, 2), &p3(), &h()).unwrap();
        let k = &r.coefficients;
        assert_eq!((&k.a0, &k.a0_tilde, &k.b0_tilde), (&rat(1, 6), &rat(1, 2), &rat(-1, 4)));
    }

    #[test]
    fn recovery_rejects_wrong_model() {
        assert!(matches!(
            recover_coefficients(&HilbertModel::ProductP1P1 {}, &rat(1, 2), &p2(), &h()),
            Err(Error::ModelMismatch(_))
        ));
        let explicit = HilbertModel::ExplicitPolynomial {
            coeffs: Polynomial::new(vec![int(1), rat(3, 2), rat(1, 2)]),
            floor: 0,
        };
        assert!(recover_coefficients(&explicit, &rat(1, 2), &p2(), &h()).is_ok());
    }

    #[test]
    fn corrupted_divisor_breaks_oracle_equality() {
        let r = recover_coefficients(&Corrupted, &rat(1, 2), &p2(), &h()).unwrap();
        assert_ne!(r.coefficients, coefficients(&p2(), &h(), &rat(1, 2)).unwrap());
    }

    #[test]
    fn oracle_grid() {
        let models = [(p2(), p2m()), (p3(), HilbertModel::ProjectiveSpace { n: 3 }), (q(), HilbertModel::ProductP1P1 {})];
        for (pair, model) in &models {
            for c in [rat(1, 3), rat(1, 2), rat(2, 3), rat(3, 4)] {
                let r = recover_coefficients(model, &c, pair, &h()).unwrap();
                assert_eq!(r.coefficients, coefficients(pair, &h(), &c).unwrap());
                for b in [int(0), rat(1, 4), rat(1, 2), int(1)] {
                    assert_eq!(df_from_coefficients(&r.coefficients, &b), df_closed(pair, &h(), &c, &b).unwrap().df);
                }
            }
        }
    }

    #[test]
    fn jna_samples() {
        assert_eq!(jna_finite_k(&p2m(), &rat(1, 2), 4).unwrap(), rat(7, 30));
        assert_eq!(jna_finite_k(&p2m(), &rat(1, 2), 10).unwrap(), rat(29, 132));
        let limit = rat(5, 24);
        let gaps: Vec<_> = (1..=30).map(|i| (jna_finite_k(&p2m(), &rat(1, 2), 2 * i).unwrap() - &limit).abs()).collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn weights_nonpositive() {
        for k in (2..=60).step_by(2) {
            let s = dims_and_weights(&HilbertModel::ProductP1P1 {}, &rat(1, 2), k).unwrap();
            assert!(!s.w_k.is_positive() && !s.w_tilde_k.is_positive());
        }
    }

    #[test]
    fn power_sum_weights_agree() {
        for n in 2..5 {
            let m = HilbertModel::ProjectiveSpace { n };
            for k in (3..=45).step_by(3) {
                assert_eq!(weight_cross_check(&m, &rat(2, 3), k).unwrap(), Some(true));
            }
        }
        assert_eq!(weight_cross_check(&HilbertModel::ProductP1P1 {}, &rat(1, 2), 4).unwrap(), None);
    }

    #[test]
    fn report_json_shape() {
        let r = oracle_report(&p2m(), &p2(), &h(), &rat(1, 2), 20).unwrap();
        assert!(r.ok());
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["match"], true);
        assert_eq!(v["samples"][1]["w_k"], "-14");
        assert_eq!(v["recovered"]["b0"], "-5/48");
    }

    #[test]
    fn model_json() {
        let m: HilbertModel = serde_json::from_str(r#"{"kind":"ProjectiveSpace","n":2}"#).unwrap();
        assert_eq!(m, p2m());
        let m: HilbertModel = serde_json::from_str(r#"{"kind":"ExplicitPolynomial","coeffs":["1","3/2","1/2"],"floor":0}"#).unwrap();
        assert_eq!(m.h_x(4).unwrap(), bi(15));
        assert!(serde_json::from_str::<HilbertModel>(r#"{"kind":"ProductP1P1","extra":1}"#).is_err());
    }
}
