//! Deformation to the normal cone of `D in |L|` with parameter `c`:
//! expansion coefficients, the log Donaldson-Futaki invariant in closed
//! form and from coefficients, `J^NA`, the destabilizer search and
//! isolation of the critical parameter.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{big, factorial, int, pow, rat, serde_rational, Rational};
use crate::pairmodel::{avg_scalar_sd, DivisorSpec, PolarisedPair};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalConeCoefficients {
    #[serde(with = "serde_rational")]
    pub a0: Rational,
    #[serde(with = "serde_rational")]
    pub a1: Rational,
    #[serde(with = "serde_rational")]
    pub b0: Rational,
    #[serde(with = "serde_rational")]
    pub b1: Rational,
    #[serde(with = "serde_rational")]
    pub a0_tilde: Rational,
    #[serde(with = "serde_rational")]
    pub b0_tilde: Rational,
    #[serde(with = "serde_rational")]
    pub c: Rational,
    pub n: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DFReport {
    #[serde(with = "serde_rational")]
    pub df: Rational,
    #[serde(with = "serde_rational")]
    pub inner_factor: Rational,
    #[serde(with = "serde_rational")]
    pub positive_prefactor: Rational,
    #[serde(with = "serde_rational")]
    pub jna: Rational,
}

/// Checks `m = 1`, `n >= 2` and returns `S_D / (n-1)`.
fn sd_slope(pair: &PolarisedPair, div: &DivisorSpec) -> Result<Rational> {
    if div.m != 1 {
        return Err(Error::MultiplicityUnsupported(div.m));
    }
    let sd = avg_scalar_sd(pair, div)?;
    Ok(sd / (pair.n() - Rational::one()))
}

fn check_c(c: &Rational) -> Result<()> {
    if !c.is_positive() || c >= &Rational::one() {
        Err(Error::ParameterOutOfRange(format!("c = {c} must lie in (0, 1)")))
    } else {
        Ok(())
    }
}

fn a0(pair: &PolarisedPair) -> Rational {
    &pair.l_top / big(&factorial(pair.dimension as u64))
}

/// `(1 - (1-c)^k)`.
fn one_minus_pow(c: &Rational, k: u32) -> Rational {
    Rational::one() - pow(&(Rational::one() - c), k as i32)
}

pub fn coefficients(pair: &PolarisedPair, div: &DivisorSpec, c: &Rational) -> Result<NormalConeCoefficients> {
    let s = sd_slope(pair, div)?;
    check_c(c)?;
    let n = pair.n();
    let a0 = a0(pair);
    let half = &n * &a0 / int(2);
    let a1 = &half * (&s + Rational::one());
    let b0 = (one_minus_pow(c, pair.dimension + 1) / (&n + Rational::one()) - c) * &a0;
    let b1 = &half * (-c + &s * (one_minus_pow(c, pair.dimension) / &n - c));
    Ok(NormalConeCoefficients {
        a0_tilde: &n * &a0,
        b0_tilde: -(c * &n * &a0),
        a0,
        a1,
        b0,
        b1,
        c: c.clone(),
        n: pair.dimension,
    })
}

/// `DF = 2(a1 b0 - a0 b1)/a0 + (1-beta)(a0 b0~ - a0~ b0)/a0`.
pub fn df_from_coefficients(k: &NormalConeCoefficients, beta: &Rational) -> Rational {
    let pure = int(2) * (&k.a1 * &k.b0 - &k.a0 * &k.b1) / &k.a0;
    let log = (Rational::one() - beta) * (&k.a0 * &k.b0_tilde - &k.a0_tilde * &k.b0) / &k.a0;
    pure + log
}

/// `g(c) = 1 - (n+1)/n * (1-(1-c)^n) / (1-(1-c)^(n+1))`, valued in
/// `(-1/n, 0)` on `(0, 1)`.
pub fn g(n: u32, c: &Rational) -> Rational {
    let nr = int(n as i64);
    Rational::one() - (&nr + Rational::one()) / &nr * one_minus_pow(c, n) / one_minus_pow(c, n + 1)
}

pub fn df_closed(pair: &PolarisedPair, div: &DivisorSpec, c: &Rational, beta: &Rational) -> Result<DFReport> {
    let s = sd_slope(pair, div)?;
    check_c(c)?;
    let n = pair.n();
    let prefactor = &n * a0(pair) * one_minus_pow(c, pair.dimension + 1) / (&n + Rational::one());
    let inner = beta + &s * g(pair.dimension, c);
    Ok(DFReport { df: &prefactor * &inner, inner_factor: inner, positive_prefactor: prefactor, jna: jna(pair.dimension, c) })
}

fn jna(n: u32, c: &Rational) -> Rational {
    c - one_minus_pow(c, n + 1) / int(n as i64 + 1)
}

/// `J^NA = c - (1 - (1-c)^(n+1))/(n+1) = -b0/a0`.
pub fn jna_normal_cone(pair: &PolarisedPair, div: &DivisorSpec, c: &Rational) -> Result<Rational> {
    sd_slope(pair, div)?;
    check_c(c)?;
    Ok(jna(pair.dimension, c))
}

/// `S_D / (n(n-1))`: below this angle the family destabilizes.
pub fn instability_threshold(pair: &PolarisedPair, div: &DivisorSpec) -> Result<Rational> {
    Ok(sd_slope(pair, div)? / pair.n())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Destabilizer {
    #[serde(with = "serde_rational")]
    pub c: Rational,
    #[serde(with = "serde_rational")]
    pub df: Rational,
}

fn dyadic(j: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << j)
}

fn not_below(beta: &Rational, thr: &Rational) -> Error {
    Error::NotBelowThreshold { beta: beta.to_string(), threshold: thr.to_string() }
}

/// First `c` on a dyadic schedule with negative DF. The schedule runs
/// `c = 1 - 2^-j` towards 1, or `c = 2^-j` towards 0 when the divisor
/// average is negative and only small `c` destabilize. `tol` is the
/// smallest step `2^-j` tried.
pub fn find_destabilizer(pair: &PolarisedPair, div: &DivisorSpec, beta: &Rational, tol: &Rational) -> Result<Destabilizer> {
    let thr = instability_threshold(pair, div)?;
    if !tol.is_positive() {
        return Err(Error::ParameterOutOfRange("tol must be > 0".into()));
    }
    let towards_one = if beta < &thr {
        true
    } else if beta.is_negative() {
        false
    } else {
        return Err(not_below(beta, &thr));
    };
    let mut j = 1;
    loop {
        let step = dyadic(j);
        if &step < tol {
            return Err(Error::SearchExhausted(format!("no negative DF found with steps down to {tol}")));
        }
        let c = if towards_one { Rational::one() - &step } else { step };
        let rep = df_closed(pair, div, &c, beta)?;
        if rep.df.is_negative() {
            return Ok(Destabilizer { c, df: rep.df });
        }
        j += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
#[allow(clippy::large_enum_variant)]
pub enum CriticalC {
    /// `lo <= c* <= hi`, with the inner factor taking the recorded signs at
    /// the endpoints (or vanishing when `lo = hi`).
    Bracket {
        #[serde(with = "serde_rational")]
        lo: Rational,
        #[serde(with = "serde_rational")]
        hi: Rational,
        #[serde(with = "serde_rational")]
        inner_lo: Rational,
        #[serde(with = "serde_rational")]
        inner_hi: Rational,
    },
    /// `beta <= 0` and the inner factor is negative on all of `(0, 1)`.
    EveryCDestabilizes,
}

/// Isolates the unique zero of the inner factor `beta + S_D/(n-1) g(c)`
/// by exact bisection to width `<= tol`.
pub fn critical_c(pair: &PolarisedPair, div: &DivisorSpec, beta: &Rational, tol: &Rational) -> Result<CriticalC> {
    let s = sd_slope(pair, div)?;
    let thr = instability_threshold(pair, div)?;
    if !tol.is_positive() {
        return Err(Error::ParameterOutOfRange("tol must be > 0".into()));
    }
    // The inner factor is monotone in c with limits beta at 0 and beta - thr at 1.
    if beta >= &thr && !beta.is_negative() {
        return Err(not_below(beta, &thr));
    }
    if !beta.is_positive() && beta <= &thr {
        return Ok(CriticalC::EveryCDestabilizes);
    }
    let n = pair.dimension;
    let inner = |c: &Rational| beta + &s * g(n, c);
    let sign_at_zero = beta.signum();

    let mut j = 1;
    let (mut lo, mut hi) = loop {
        let small = dyadic(j);
        let large = Rational::one() - &small;
        if inner(&small).signum() == sign_at_zero && inner(&large).signum() == -sign_at_zero.clone() {
            break (small, large);
        }
        j += 1;
    };
    let mut first = true;
    while first || &hi - &lo > *tol {
        first = false;
        let mid = (&lo + &hi) / int(2);
        let v = inner(&mid);
        if v.is_zero() {
            return Ok(CriticalC::Bracket { lo: mid.clone(), hi: mid, inner_lo: v.clone(), inner_hi: v });
        }
        if v.signum() == sign_at_zero {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (inner_lo, inner_hi) = (inner(&lo), inner(&hi));
    Ok(CriticalC::Bracket { lo, hi, inner_lo, inner_hi })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CurvePoint {
    #[serde(with = "serde_rational")]
    pub c: Rational,
    #[serde(with = "serde_rational")]
    pub df: Rational,
    #[serde(with = "serde_rational")]
    pub inner_factor: Rational,
    #[serde(with = "serde_rational")]
    pub jna: Rational,
    /// `DF / J^NA`.
    #[serde(with = "serde_rational")]
    pub ratio: Rational,
}

/// Abscissae `c = i/(steps+1)` for `i = 1..=steps`.
pub fn curve_grid(steps: u32) -> Vec<Rational> {
    (1..=steps as i64).map(|i| rat(i, steps as i64 + 1)).collect()
}

pub fn curve_point(pair: &PolarisedPair, div: &DivisorSpec, c: &Rational, beta: &Rational) -> Result<CurvePoint> {
    let r = df_closed(pair, div, c, beta)?;
    Ok(CurvePoint { ratio: &r.df / &r.jna, c: c.clone(), df: r.df, inner_factor: r.inner_factor, jna: r.jna })
}

pub fn df_curve(pair: &PolarisedPair, div: &DivisorSpec, beta: &Rational, steps: u32) -> Result<Vec<CurvePoint>> {
    curve_grid(steps).iter().map(|c| curve_point(pair, div, c, beta)).collect()
}
