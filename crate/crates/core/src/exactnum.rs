//! Exact rational arithmetic, univariate polynomials over the rationals,
//! Newton interpolation and Faulhaber power sums.
//!
//! Nothing in this module (or anywhere on the computation path) touches
//! floating point. Decimal strings are produced by exact rounding of the
//! rational value and exist for display only.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a
/// positive denominator.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `num / den`; panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn big(n: &BigInt) -> Rational {
    Rational::from_integer(n.clone())
}

/// Parses `"p/q"` or a bare integer. Whitespace around the parts is not
/// accepted; a zero denominator is rejected.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let bad = || Error::Parse(format!("not a rational: {s:?} (expected \"p/q\" or an integer)"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let valid = |t: &str| {
        let digits = t.strip_prefix('-').unwrap_or(t);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid(num) || !valid(den) || den.starts_with('-') {
        return Err(bad());
    }
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Renders `"p/q"`, or the bare integer when the denominator is 1.
pub fn fmt_rational(x: &Rational) -> String {
    x.to_string()
}

/// Exactly rounded decimal with `sig` significant digits (round half away
/// from zero). Plain notation for moderate exponents, scientific otherwise.
pub fn to_decimal(x: &Rational, sig: usize) -> String {
    assert!(sig >= 1);
    if x.is_zero() {
        return "0".to_string();
    }
    let neg = x.is_negative();
    let a = x.abs();
    let ten = BigInt::from(10);

    // Find e with 10^e <= a < 10^(e+1).
    let mut e = a.numer().to_string().len() as i64 - a.denom().to_string().len() as i64;
    let pow10 = |k: i64| -> Rational {
        if k >= 0 {
            big(&num_traits::pow(ten.clone(), k as usize))
        } else {
            big(&num_traits::pow(ten.clone(), (-k) as usize)).recip()
        }
    };
    while a < pow10(e) {
        e -= 1;
    }
    while a >= pow10(e + 1) {
        e += 1;
    }

    let scale = sig as i64 - 1 - e;
    let scaled = &a * pow10(scale);
    let half = rat(1, 2);
    let mut digits = (scaled + half).floor().to_integer();
    if digits >= num_traits::pow(ten.clone(), sig) {
        // rounding carried into a new leading digit
        digits = digits.div_floor(&ten);
        e += 1;
    }
    let mut ds = digits.to_string();
    debug_assert_eq!(ds.len(), sig);

    let body = if (-7..15).contains(&e) {
        if e >= 0 {
            let int_len = (e + 1) as usize;
            if int_len >= ds.len() {
                ds.push_str(&"0".repeat(int_len - ds.len()));
                ds
            } else {
                let (i, f) = ds.split_at(int_len);
                trim_fraction(format!("{i}.{f}"))
            }
        } else {
            trim_fraction(format!("0.{}{}", "0".repeat((-e - 1) as usize), ds))
        }
    } else {
        let (i, f) = ds.split_at(1);
        let mant = if f.is_empty() { i.to_string() } else { trim_fraction(format!("{i}.{f}")) };
        format!("{mant}e{e}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn trim_fraction(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}

/// `x^e` for a signed integer exponent. Panics on `0^negative`.
pub fn pow(x: &Rational, e: i32) -> Rational {
    num_traits::Pow::pow(x, e)
}

/// Binomial coefficient `C(n, k)` for nonnegative `n`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Dense univariate polynomial; `coeffs[i]` multiplies `x^i`. Trailing
/// zeros are always stripped, so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Polynomial::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Polynomial::new(vec![Rational::zero(), Rational::one()])
    }

    pub fn from_ints(cs: &[i64]) -> Self {
        Polynomial::new(cs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Coefficient of `x^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(x + a)`.
    pub fn shift(&self, a: &Rational) -> Polynomial {
        let lin = Polynomial::new(vec![a.clone(), Rational::one()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Polynomial::zero(), |acc, c| &(&acc * &lin) + &Polynomial::constant(c.clone()))
    }

    /// The unique polynomial of degree `< points.len()` through `points`,
    /// built from Newton divided differences.
    pub fn interpolate(points: &[(Rational, Rational)]) -> Result<Polynomial, Error> {
        if points.is_empty() {
            return Err(Error::EmptyInterpolation);
        }
        for (i, (xi, _)) in points.iter().enumerate() {
            if points[..i].iter().any(|(xj, _)| xj == xi) {
                return Err(Error::DuplicateAbscissa(fmt_rational(xi)));
            }
        }
        let n = points.len();
        let xs: Vec<&Rational> = points.iter().map(|(x, _)| x).collect();
        let mut table: Vec<Rational> = points.iter().map(|(_, y)| y.clone()).collect();
        // table[i] ends as f[x_0, ..., x_i]
        for level in 1..n {
            for i in (level..n).rev() {
                table[i] = (&table[i] - &table[i - 1]) / (xs[i] - xs[i - level]);
            }
        }
        // Horner on the Newton form.
        let mut acc = Polynomial::constant(table[n - 1].clone());
        for i in (0..n - 1).rev() {
            let factor = Polynomial::new(vec![-xs[i].clone(), Rational::one()]);
            acc = &(&acc * &factor) + &Polynomial::constant(table[i].clone());
        }
        Ok(acc)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{i}")?,
            }
        }
        Ok(())
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

/// Bernoulli numbers `B_0..=B_p` with the `B_1 = +1/2` convention.
fn bernoulli_plus(p: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(p + 1);
    b.push(Rational::one());
    for m in 1..=p {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0 with B_1 = -1/2
        let s = (0..m).fold(Rational::zero(), |acc, j| {
            acc + big(&binomial(m as u64 + 1, j as u64)) * &b[j]
        });
        b.push(-s / int(m as i64 + 1));
    }
    if p >= 1 {
        b[1] = rat(1, 2);
    }
    b
}

/// Faulhaber polynomial `F_p` with `F_p(N) = sum_{i=1}^{N} i^p`.
pub fn faulhaber_polynomial(p: usize) -> Polynomial {
    let b = bernoulli_plus(p);
    let mut coeffs = vec![Rational::zero(); p + 2];
    let inv = rat(1, p as i64 + 1);
    for (j, bj) in b.iter().enumerate() {
        coeffs[p + 1 - j] = big(&binomial(p as u64 + 1, j as u64)) * bj * &inv;
    }
    Polynomial::new(coeffs)
}

/// `sum_{i=1}^{n} i^p` through the closed form.
pub fn power_sum(p: usize, n: u64) -> Rational {
    faulhaber_polynomial(p).eval(&Rational::from_integer(BigInt::from(n)))
}

/// Serde adapters: rationals travel as `"p/q"` strings.
pub mod serde_rational {
    use super::{fmt_rational, parse_rational, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = RawRational::deserialize(d)?;
        raw.into_rational().map_err(D::Error::custom)
    }

    /// Accepts `"p/q"` strings and, for convenience, bare JSON integers.
    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum RawRational {
        Str(String),
        Int(i64),
    }

    impl RawRational {
        pub(crate) fn into_rational(self) -> Result<Rational, String> {
            match self {
                RawRational::Str(s) => parse_rational(&s).map_err(|e| e.to_string()),
                RawRational::Int(i) => Ok(super::int(i)),
            }
        }
    }

    pub mod option {
        use super::RawRational;
        use crate::exactnum::{fmt_rational, Rational};
        use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(x: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(x) => s.serialize_str(&fmt_rational(x)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
            match Option::<RawRational>::deserialize(d)? {
                Some(raw) => raw.into_rational().map(Some).map_err(D::Error::custom),
                None => Ok(None),
            }
        }
    }
}

/// Serde adapter for big integers as decimal strings.
pub mod serde_bigint {
    use num_bigint::BigInt;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn eval_examples() {
        assert_eq!(Polynomial::zero().eval(&int(7)), int(0));
        let tri = Polynomial::new(vec![int(1), rat(3, 2), rat(1, 2)]);
        assert_eq!(tri.eval(&int(3)), int(10));
        assert_eq!(Polynomial::from_ints(&[1, 0, 1]).eval(&int(2)), int(5));
    }

    #[test]
    fn trailing_zeros_stripped() {
        let p = Polynomial::new(vec![int(1), int(0), int(0)]);
        assert_eq!(p.degree(), Some(0));
        assert!(Polynomial::new(vec![int(0)]).is_zero());
        assert_eq!(Polynomial::zero().degree(), None);
    }

    #[test]
    fn interpolation_examples() {
        let one = Polynomial::interpolate(&[(int(0), int(1))]).unwrap();
        assert_eq!(one, Polynomial::constant(int(1)));

        let sq = Polynomial::interpolate(&[(int(0), int(1)), (int(1), int(2)), (int(2), int(5))]).unwrap();
        assert_eq!(sq, Polynomial::from_ints(&[1, 0, 1]));

        let tri = Polynomial::interpolate(&[
            (int(1), int(1)),
            (int(2), int(3)),
            (int(3), int(6)),
            (int(4), int(10)),
        ])
        .unwrap();
        assert_eq!(tri, Polynomial::new(vec![int(0), rat(1, 2), rat(1, 2)]));
    }

    #[test]
    fn interpolation_errors() {
        assert!(matches!(
            Polynomial::interpolate(&[(int(1), int(1)), (int(1), int(2))]),
            Err(Error::DuplicateAbscissa(_))
        ));
        assert!(matches!(Polynomial::interpolate(&[]), Err(Error::EmptyInterpolation)));
    }

    #[test]
    fn power_sum_examples() {
        assert_eq!(power_sum(0, 5), int(5));
        assert_eq!(power_sum(2, 4), int(30));
        assert_eq!(power_sum(3, 10), int(3025));
        assert_eq!(power_sum(4, 0), int(0));
    }

    #[test]
    fn power_sum_matches_loop() {
        for p in 0..=6usize {
            let mut acc = BigInt::zero();
            for n in 0..=200u64 {
                if n > 0 {
                    acc += num_traits::pow(BigInt::from(n), p);
                }
                assert_eq!(power_sum(p, n), big(&acc), "p={p} n={n}");
            }
        }
    }

    #[test]
    fn shift_matches_substitution() {
        let p = Polynomial::from_ints(&[3, -1, 0, 2]);
        let a = rat(-5, 3);
        let q = p.shift(&a);
        for x in [-3i64, 0, 1, 7] {
            assert_eq!(q.eval(&int(x)), p.eval(&(int(x) + &a)));
        }
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-5/48").unwrap(), rat(-5, 48));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(fmt_rational(&rat(-10, 480)), "-1/48");
        assert_eq!(fmt_rational(&int(3)), "3");
        for bad in ["", "1/0", "a", "1/-2", "1.5", " 1", "1/", "/2", "--1"] {
            assert!(parse_rational(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(-1, 48), 12), "-0.0208333333333");
        assert_eq!(to_decimal(&rat(2, 3), 12), "0.666666666667");
        assert_eq!(to_decimal(&int(6), 12), "6");
        assert_eq!(to_decimal(&rat(3, 8), 12), "0.375");
        assert_eq!(to_decimal(&int(0), 12), "0");
        assert_eq!(to_decimal(&rat(9999999, 10000000), 3), "1");
        assert_eq!(to_decimal(&rat(1, 1_000_000_000), 12), "1e-9");
        assert_eq!(to_decimal(&int(123), 2), "120");
    }

    fn arb_rational() -> impl Strategy<Value = Rational> {
        (-1000i64..1000, 1i64..1000).prop_map(|(n, d)| rat(n, d))
    }

    fn canonical(x: &Rational) -> bool {
        x.denom().is_positive() && x.numer().gcd(x.denom()).is_one()
    }

    proptest! {
        #[test]
        fn field_laws(a in arb_rational(), b in arb_rational(), c in arb_rational()) {
            prop_assert_eq!((&a + &b) + &c, &a + (&b + &c));
            prop_assert_eq!(&a * (&b + &c), &a * &b + &a * &c);
            prop_assert!(canonical(&(&a * &b)));
            prop_assert!(canonical(&(&a - &c)));
        }

        #[test]
        fn interpolant_hits_points(ys in proptest::collection::vec(arb_rational(), 1..8)) {
            let pts: Vec<(Rational, Rational)> = ys
                .iter()
                .enumerate()
                .map(|(i, y)| (rat(2 * i as i64 - 3, 3), y.clone()))
                .collect();
            let p = Polynomial::interpolate(&pts).unwrap();
            prop_assert!(p.degree().is_none_or(|d| d < pts.len()));
            for (x, y) in &pts {
                prop_assert_eq!(&p.eval(x), y);
            }
        }

        #[test]
        fn rational_text_round_trip(a in arb_rational()) {
            prop_assert_eq!(parse_rational(&fmt_rational(&a)).unwrap(), a);
        }
    }
}
