//! Polarised pairs reduced to their intersection numbers, and the average
//! scalar curvatures derived from them.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{int, serde_rational, Rational};

/// `(X, L)` through the two intersection numbers `L^n` and
/// `c_1(X) . L^{n-1} = (-K_X) . L^{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolarisedPair {
    pub name: String,
    pub dimension: u32,
    #[serde(rename = "L_top", with = "serde_rational")]
    pub l_top: Rational,
    #[serde(rename = "cX_L", with = "serde_rational")]
    pub cx_l: Rational,
    /// Exact `x` with `c_1(X) = x c_1(L)`, when known (Fano pairs, P^n, ...).
    #[serde(with = "serde_rational::option", default, skip_serializing_if = "Option::is_none")]
    pub proportional_x: Option<Rational>,
}

impl PolarisedPair {
    pub fn new(
        name: impl Into<String>,
        dimension: u32,
        l_top: Rational,
        cx_l: Rational,
        proportional_x: Option<Rational>,
    ) -> Result<Self> {
        let pair = PolarisedPair { name: name.into(), dimension, l_top, cx_l, proportional_x };
        pair.check()?;
        Ok(pair)
    }

    /// Hard invariants. Anything softer is reported by [`validate_pair`].
    pub fn check(&self) -> Result<()> {
        if self.dimension == 0 {
            return Err(Error::InvalidPair("dimension must be >= 1".into()));
        }
        if !self.l_top.is_positive() {
            return Err(Error::InvalidPair(format!("L^n = {} is not positive; L is not ample", self.l_top)));
        }
        if let Some(x) = &self.proportional_x {
            if x * &self.l_top != self.cx_l {
                return Err(Error::InvalidPair(format!(
                    "proportional_x = {x} but cX_L = {} != x * L^n = {}",
                    self.cx_l,
                    x * &self.l_top
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> Rational {
        int(self.dimension as i64)
    }
}

/// `D` in `|mL|`, assumed smooth.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorSpec {
    pub m: u32,
    #[serde(default = "default_true")]
    pub smooth: bool,
}

fn default_true() -> bool {
    true
}

impl DivisorSpec {
    pub fn new(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidPair("divisor multiplicity m must be >= 1".into()));
        }
        Ok(DivisorSpec { m, smooth: true })
    }

    pub fn hyperplane() -> Self {
        DivisorSpec { m: 1, smooth: true }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalarReport {
    #[serde(rename = "S1", with = "serde_rational")]
    pub s1: Rational,
    /// Undefined when `n = 1`.
    #[serde(rename = "SD", with = "serde_rational::option")]
    pub sd: Option<Rational>,
    /// Set when `m > 1`: the divisor average comes from adjunction on
    /// `D in |mL|`, which extends the `m = 1` formula.
    pub sd_derived_extension: bool,
    #[serde(rename = "Sbeta", with = "serde_rational")]
    pub sbeta: Rational,
    #[serde(with = "serde_rational")]
    pub mu: Rational,
    #[serde(with = "serde_rational")]
    pub beta: Rational,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Finding {
    /// `S_1 > n(n+1)`: the numbers cannot come from a polarised manifold.
    ScalarBoundViolated,
    /// `S_1 = n(n+1)`, the extremal value attained by `(P^n, O(1))`.
    ScalarBoundSaturated,
    NotAmple,
}

/// `S_1 = n c_1(X).L^{n-1} / L^n`.
pub fn avg_scalar_s1(pair: &PolarisedPair) -> Rational {
    pair.n() * &pair.cx_l / &pair.l_top
}

/// Average scalar curvature of `D in |mL|` in the class of `L|_D`:
/// `(n-1)(S_1/n - m)`. For `m = 1` this is `(n-1)/n S_1 - (n-1)`.
pub fn avg_scalar_sd(pair: &PolarisedPair, div: &DivisorSpec) -> Result<Rational> {
    if pair.dimension < 2 {
        return Err(Error::DimensionTooSmall(pair.dimension));
    }
    let n = pair.n();
    Ok((&n - Rational::one()) * (avg_scalar_s1(pair) / &n - int(div.m as i64)))
}

/// `S_beta = S_1 - m n (1 - beta)` and the slope `mu = S_beta / n`.
/// `beta` is unrestricted here.
pub fn avg_scalar_sbeta(pair: &PolarisedPair, div: &DivisorSpec, beta: &Rational) -> ScalarReport {
    let n = pair.n();
    let s1 = avg_scalar_s1(pair);
    let m = int(div.m as i64);
    let sbeta = &s1 - &m * &n * (Rational::one() - beta);
    let mu = &sbeta / &n;
    ScalarReport {
        sd: avg_scalar_sd(pair, div).ok(),
        sd_derived_extension: div.m > 1,
        s1,
        sbeta,
        mu,
        beta: beta.clone(),
    }
}

/// Checks the numbers against `S_1 <= n(n+1)` and ampleness of `L`.
pub fn validate_pair(pair: &PolarisedPair) -> Vec<Finding> {
    let mut findings = Vec::new();
    if !pair.l_top.is_positive() {
        findings.push(Finding::NotAmple);
    }
    if pair.l_top.is_zero() {
        return findings;
    }
    let n = pair.n();
    let bound = &n * (&n + Rational::one());
    let s1 = avg_scalar_s1(pair);
    if s1 > bound {
        findings.push(Finding::ScalarBoundViolated);
    } else if s1 == bound {
        findings.push(Finding::ScalarBoundSaturated);
    }
    findings
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use proptest::prelude::*;

    fn pair(n: u32, l: i64, c: i64) -> PolarisedPair {
        PolarisedPair::new("t", n, int(l), int(c), None).unwrap()
    }

    #[test]
    fn s1_examples() {
        assert_eq!(avg_scalar_s1(&pair(2, 1, 3)), int(6));
        assert_eq!(avg_scalar_s1(&pair(2, 2, 4)), int(4));
        assert_eq!(avg_scalar_s1(&pair(3, 1, 4)), int(12));
    }

    #[test]
    fn sd_examples() {
        let h = DivisorSpec::hyperplane();
        assert_eq!(avg_scalar_sd(&pair(2, 1, 3), &h).unwrap(), int(2));
        assert_eq!(avg_scalar_sd(&pair(3, 1, 4), &h).unwrap(), int(6));
        assert_eq!(avg_scalar_sd(&pair(2, 2, 4), &h).unwrap(), int(1));
        assert_eq!(avg_scalar_sd(&pair(1, 1, 2), &h), Err(Error::DimensionTooSmall(1)));
    }

    #[test]
    fn sd_general_m_by_adjunction() {
        // P^2, D a conic (m = 2): D = P^1 with deg L|_D = 2, deg(-K_D) = 2 -> (n-1)*2/2 = 1.
        let d = DivisorSpec::new(2).unwrap();
        assert_eq!(avg_scalar_sd(&pair(2, 1, 3), &d).unwrap(), int(1));
        let rep = avg_scalar_sbeta(&pair(2, 1, 3), &d, &int(1));
        assert!(rep.sd_derived_extension);
    }

    #[test]
    fn sbeta_examples() {
        let p2 = pair(2, 1, 3);
        let r = avg_scalar_sbeta(&p2, &DivisorSpec::new(4).unwrap(), &rat(5, 16));
        assert_eq!(r.sbeta, rat(1, 2));
        assert_eq!(r.mu, rat(1, 4));
        let r = avg_scalar_sbeta(&p2, &DivisorSpec::new(3).unwrap(), &int(1));
        assert_eq!(r.sbeta, r.s1);
        let r = avg_scalar_sbeta(&pair(2, 2, 4), &DivisorSpec::hyperplane(), &rat(1, 2));
        assert_eq!(r.sbeta, int(3));
        assert_eq!(r.mu, rat(3, 2));
    }

    #[test]
    fn validation_findings() {
        assert_eq!(validate_pair(&pair(2, 1, 3)), vec![Finding::ScalarBoundSaturated]);
        assert_eq!(validate_pair(&pair(2, 2, 4)), vec![]);
        assert_eq!(validate_pair(&pair(2, 1, 4)), vec![Finding::ScalarBoundViolated]);
        let mut bad = pair(2, 1, 3);
        bad.l_top = int(-1);
        assert!(validate_pair(&bad).contains(&Finding::NotAmple));
        bad.l_top = int(0);
        assert_eq!(validate_pair(&bad), vec![Finding::NotAmple]);
    }

    #[test]
    fn construction_checks() {
        assert!(PolarisedPair::new("x", 0, int(1), int(1), None).is_err());
        assert!(PolarisedPair::new("x", 2, int(0), int(1), None).is_err());
        assert!(PolarisedPair::new("x", 2, int(2), int(4), Some(int(3))).is_err());
        assert!(PolarisedPair::new("x", 2, int(2), int(4), Some(int(2))).is_ok());
        assert!(DivisorSpec::new(0).is_err());
    }

    proptest! {
        #[test]
        fn sbeta_affine_and_consistent(
            n in 1u32..6, l in 1i64..20, c in -30i64..30, m in 1u32..6,
            b1 in -50i64..50, b2 in -50i64..50,
        ) {
            let p = pair(n, l, c);
            let d = DivisorSpec::new(m).unwrap();
            let (b1, b2) = (rat(b1, 16), rat(b2, 16));
            let r1 = avg_scalar_sbeta(&p, &d, &b1);
            let r2 = avg_scalar_sbeta(&p, &d, &b2);
            prop_assert_eq!(&r2.sbeta - &r1.sbeta, int(m as i64) * int(n as i64) * (&b2 - &b1));
            prop_assert_eq!(&r1.mu * int(n as i64), r1.sbeta.clone());
            prop_assert_eq!(avg_scalar_sbeta(&p, &d, &int(1)).sbeta, avg_scalar_s1(&p));
            if n >= 2 {
                let nn = int(n as i64);
                let expect = (&nn - int(1)) / &nn * avg_scalar_s1(&p) - (&nn - int(1));
                prop_assert_eq!(avg_scalar_sd(&p, &DivisorSpec::hyperplane()).unwrap(), expect);
            }
        }
    }
}
