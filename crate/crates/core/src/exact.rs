//! Exact arithmetic over the rationals and real quadratic fields ℚ(√d).
//!
//! Every value is a normalized `(a + b√d) / c` with arbitrary-precision
//! integer components. Sign, comparison and floor are decided by integer
//! case analysis only; no floating point enters any predicate. Floats are
//! produced solely by [`FieldElement::to_f64`] for reporting.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Errors from construction, parsing, or arithmetic of exact values.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("cannot parse coefficient text `{0}`")]
    Parse(String),
    #[error("denominator must be nonzero")]
    ZeroDenominator,
    #[error("radicand {0} must be >= 2")]
    RadicandTooSmall(BigInt),
    #[error("radicand {0} is a perfect square")]
    RadicandSquare(BigInt),
    #[error("incompatible fields: sqrt({0}) vs sqrt({1})")]
    MixedFields(BigInt, BigInt),
    #[error("division by zero")]
    DivisionByZero,
    #[error("rotation coefficient {0} is outside (-2, 2)")]
    LambdaOutOfRange(String),
}

/// Whether a value is rational or lives in a proper quadratic extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Rational,
    Quadratic,
}

/// A normalized element `(a + b√d) / c` of ℚ or ℚ(√d).
///
/// Invariants maintained by every constructor and operation:
/// * `c >= 1` and `gcd(a, b, c) = 1`;
/// * `b = 0` if and only if `d` is absent (rational kind);
/// * `d >= 2` and `d` is not a perfect square.
///
/// Two values are numerically equal iff they are field-equal, so the
/// derived `PartialEq`/`Eq`/`Hash` are semantic. Elements of distinct
/// radicands never interact: arithmetic on them is an error (checked
/// variants) or a panic (operators).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: Option<BigInt>,
}

/// Coefficient values fed into the dynamics (λ, η). Same representation
/// and normalization as any field element; the extra (−2, 2) range check
/// for rotation coefficients happens where a λ is actually installed.
pub type ExactCoeff = FieldElement;

/// Floor of √n for n >= 0.
pub(crate) fn isqrt(n: &BigInt) -> BigInt {
    debug_assert!(!n.is_negative());
    n.sqrt()
}

fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

impl FieldElement {
    /// The rational a/c.
    pub fn rational(a: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self, ExactError> {
        let (a, c) = (a.into(), c.into());
        if c.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        Ok(Self::normalized(a, BigInt::zero(), c, None))
    }

    /// The value (a + b√d)/c. Collapses to rational kind when b = 0.
    pub fn quadratic(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self, ExactError> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        if c.is_zero() {
            return Err(ExactError::ZeroDenominator);
        }
        if d < BigInt::from(2) {
            return Err(ExactError::RadicandTooSmall(d));
        }
        if is_perfect_square(&d) {
            return Err(ExactError::RadicandSquare(d));
        }
        Ok(Self::normalized(a, b, c, Some(d)))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Self {
            a: n.into(),
            b: BigInt::zero(),
            c: BigInt::one(),
            d: None,
        }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::normalized(r.numer().clone(), BigInt::zero(), r.denom().clone(), None)
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// Canonicalize: positive denominator, gcd(a, b, c) = 1, drop the
    /// radicand when the √d coefficient vanishes.
    fn normalized(mut a: BigInt, mut b: BigInt, mut c: BigInt, d: Option<BigInt>) -> Self {
        debug_assert!(!c.is_zero());
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        if !g.is_one() {
            a /= &g;
            b /= &g;
            c /= &g;
        }
        let d = if b.is_zero() { None } else { d };
        debug_assert!(d.is_some() || b.is_zero());
        Self { a, b, c, d }
    }

    pub fn kind(&self) -> Kind {
        if self.d.is_some() {
            Kind::Quadratic
        } else {
            Kind::Rational
        }
    }

    pub fn is_rational(&self) -> bool {
        self.d.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.b.is_zero() && self.a == self.c
    }

    /// True when the value is a rational integer.
    pub fn is_integer(&self) -> bool {
        self.b.is_zero() && self.c.is_one()
    }

    /// Components (a, b, c) of the normalized form.
    pub fn parts(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c)
    }

    /// Radicand d, absent for rationals.
    pub fn radicand(&self) -> Option<&BigInt> {
        self.d.as_ref()
    }

    /// The exact rational value, if this element is rational.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.b.is_zero() {
            Some(BigRational::new(self.a.clone(), self.c.clone()))
        } else {
            None
        }
    }

    /// Radicand both operands must live under, or an error when they are
    /// bound to distinct quadratic fields.
    fn join_radicand(&self, rhs: &Self) -> Result<Option<BigInt>, ExactError> {
        match (&self.d, &rhs.d) {
            (Some(p), Some(q)) if p != q => Err(ExactError::MixedFields(p.clone(), q.clone())),
            (Some(p), _) => Ok(Some(p.clone())),
            (None, q) => Ok(q.clone()),
        }
    }

    /// Exact sum; errors on incompatible radicands.
    pub fn checked_add(&self, rhs: &Self) -> Result<Self, ExactError> {
        let d = self.join_radicand(rhs)?;
        let a = &self.a * &rhs.c + &rhs.a * &self.c;
        let b = &self.b * &rhs.c + &rhs.b * &self.c;
        let c = &self.c * &rhs.c;
        Ok(Self::normalized(a, b, c, d))
    }

    pub fn checked_sub(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.checked_add(&(-rhs))
    }

    /// Exact product, using √d·√d = d.
    pub fn checked_mul(&self, rhs: &Self) -> Result<Self, ExactError> {
        let d = self.join_radicand(rhs)?;
        let cross = match &d {
            Some(d) => &self.b * &rhs.b * d,
            None => BigInt::zero(),
        };
        let a = &self.a * &rhs.a + cross;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        let c = &self.c * &rhs.c;
        Ok(Self::normalized(a, b, c, d))
    }

    /// Exact inverse via the conjugate: 1/((a+b√d)/c) = c(a−b√d)/(a²−b²d).
    pub fn inv(&self) -> Result<Self, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        match &self.d {
            None => Ok(Self::normalized(
                self.c.clone(),
                BigInt::zero(),
                self.a.clone(),
                None,
            )),
            Some(d) => {
                // a² − b²d never vanishes for b ≠ 0 since d is not a square.
                let norm = &self.a * &self.a - &self.b * &self.b * d;
                debug_assert!(!norm.is_zero());
                Ok(Self::normalized(
                    &self.c * &self.a,
                    -(&self.c * &self.b),
                    norm,
                    Some(d.clone()),
                ))
            }
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError> {
        self.checked_mul(&rhs.inv()?)
    }

    pub fn square(&self) -> Self {
        self.checked_mul(self).expect("same field")
    }

    /// Exact sign in {−1, 0, +1}, by integer case analysis: when the signs
    /// of a and b√d agree the answer is immediate, otherwise a² is compared
    /// against b²d.
    pub fn sign(&self) -> i32 {
        let sa = sign_of(&self.a);
        if self.b.is_zero() {
            return sa;
        }
        let sb = sign_of(&self.b);
        if sa == sb || sa == 0 {
            return sb;
        }
        if sb == 0 {
            return sa;
        }
        // Opposite nonzero signs: |a| vs |b|√d decides. Equality would force
        // d = (a/b)², impossible for a non-square radicand.
        let d = self.d.as_ref().expect("b != 0 implies quadratic");
        let aa = &self.a * &self.a;
        let bbd = &self.b * &self.b * d;
        match aa.cmp(&bbd) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => unreachable!("a² = b²d contradicts non-square d"),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.sign() < 0
    }

    /// The unique integer m with m <= x < m+1, decided exactly.
    ///
    /// The irrational part b√d is bracketed by an integer square root and
    /// the candidate is then corrected with exact sign tests; the bracket
    /// is within one unit, so at most two corrections occur.
    pub fn floor(&self) -> BigInt {
        match &self.d {
            None => self.a.div_floor(&self.c),
            Some(d) => {
                let t = isqrt(&(&self.b * &self.b * d));
                // b√d lies strictly inside (t, t+1) for b > 0 and
                // (−t−1, −t) for b < 0: the radicand is never a square.
                let lo = if self.b.is_positive() {
                    &self.a + &t
                } else {
                    &self.a - &t - BigInt::one()
                };
                let mut m = lo.div_floor(&self.c);
                // x >= m+1 ⇔ a + b√d − (m+1)c >= 0
                while self.shifted_sign(&(&m + 1)) >= 0 {
                    m += 1;
                }
                while self.shifted_sign(&m) < 0 {
                    m -= 1;
                }
                m
            }
        }
    }

    /// Sign of (self − n) for an integer n.
    fn shifted_sign(&self, n: &BigInt) -> i32 {
        let shifted = Self {
            a: &self.a - n * &self.c,
            b: self.b.clone(),
            c: self.c.clone(),
            d: self.d.clone(),
        };
        shifted.sign()
    }

    /// Fractional part x − ⌊x⌋ ∈ [0, 1).
    pub fn fract(&self) -> Self {
        self - &Self::from_int(self.floor())
    }

    /// Double-precision approximation, for reporting and plotting only.
    pub fn to_f64(&self) -> f64 {
        let a = bigint_to_f64(&self.a);
        let c = bigint_to_f64(&self.c);
        match &self.d {
            None => a / c,
            Some(d) => {
                let b = bigint_to_f64(&self.b);
                (a + b * bigint_to_f64(d).sqrt()) / c
            }
        }
    }
}

fn sign_of(n: &BigInt) -> i32 {
    if n.is_zero() {
        0
    } else if n.is_positive() {
        1
    } else {
        -1
    }
}

fn bigint_to_f64(n: &BigInt) -> f64 {
    n.to_f64().unwrap_or(f64::INFINITY * sign_of(n) as f64)
}

impl PartialOrd for FieldElement {
    /// Exact order within one field; `None` across incompatible radicands.
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let diff = self.checked_sub(other).ok()?;
        Some(diff.sign().cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for &FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                self.$checked(rhs)
                    .expect("operands from incompatible fields")
            }
        }
        impl std::ops::$trait for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl std::ops::$trait<&FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);
binop!(Div, div, checked_div);

impl std::ops::Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement {
            a: -&self.a,
            b: -&self.b,
            c: self.c.clone(),
            d: self.d.clone(),
        }
    }
}

impl std::ops::Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

impl From<i64> for FieldElement {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl From<&BigInt> for FieldElement {
    fn from(n: &BigInt) -> Self {
        Self::from_int(n.clone())
    }
}

/// Canonical coefficient-text rendering: `rat:<a>/<c>` for rationals,
/// `quad:<a>,<b>,<c>,<d>` for quadratic irrationals. Parsing this back
/// reproduces the element bit-exactly.
impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.d {
            None => write!(f, "rat:{}/{}", self.a, self.c),
            Some(d) => write!(f, "quad:{},{},{},{}", self.a, self.b, self.c, d),
        }
    }
}

impl FromStr for FieldElement {
    type Err = ExactError;

    fn from_str(s: &str) -> Result<Self, ExactError> {
        let err = || ExactError::Parse(s.to_string());
        if let Some(body) = s.strip_prefix("rat:") {
            let (a, c) = body.split_once('/').ok_or_else(err)?;
            let a: BigInt = a.parse().map_err(|_| err())?;
            let c: BigInt = parse_posint(c).ok_or_else(err)?;
            return Self::rational(a, c);
        }
        if let Some(body) = s.strip_prefix("quad:") {
            let parts: Vec<&str> = body.split(',').collect();
            if parts.len() != 4 {
                return Err(err());
            }
            let a: BigInt = parts[0].parse().map_err(|_| err())?;
            let b: BigInt = parts[1].parse().map_err(|_| err())?;
            let c: BigInt = parse_posint(parts[2]).ok_or_else(err)?;
            let d: BigInt = parse_posint(parts[3]).ok_or_else(err)?;
            return Self::quadratic(a, b, c, d);
        }
        Err(err())
    }
}

fn parse_posint(s: &str) -> Option<BigInt> {
    if s.is_empty() || s.starts_with('-') || s.starts_with('+') {
        return None;
    }
    let n: BigInt = s.parse().ok()?;
    if n.is_positive() {
        Some(n)
    } else {
        None
    }
}

/// Parse a coefficient in the text grammar (`rat:1/2`, `quad:1,1,2,5`).
pub fn parse_coeff(spec: &str) -> Result<ExactCoeff, ExactError> {
    spec.parse()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(s: &str) -> FieldElement {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_normalize() {
        let half = fe("rat:1/2");
        assert_eq!(half.parts().0, &BigInt::from(1));
        assert_eq!(half.parts().2, &BigInt::from(2));
        assert!(half.is_rational());

        let golden = fe("quad:1,1,2,5");
        assert_eq!(golden.to_string(), "quad:1,1,2,5");

        // gcd normalization
        assert_eq!(fe("quad:2,2,4,5"), golden);
        // vanished radical collapses to rational kind
        assert_eq!(fe("quad:3,0,2,5"), fe("rat:3/2"));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_coeff("quad:1,1,2,4"),
            Err(ExactError::RadicandSquare(_))
        ));
        assert!(matches!(
            parse_coeff("quad:1,1,2,1"),
            Err(ExactError::RadicandTooSmall(_))
        ));
        assert!(parse_coeff("rat:1/0").is_err());
        assert!(parse_coeff("rat:1/-2").is_err());
        assert!(parse_coeff("quad:1,1,0,5").is_err());
        assert!(parse_coeff("nonsense").is_err());
        assert!(parse_coeff("rat:x/2").is_err());
        assert!(parse_coeff("quad:1,1,2").is_err());
    }

    #[test]
    fn add_examples() {
        let golden = fe("quad:1,1,2,5");
        let conj = fe("quad:1,-1,2,5");
        assert_eq!(&golden + &conj, FieldElement::one());
        assert_eq!(&fe("rat:1/2") + &fe("rat:1/3"), fe("rat:5/6"));
        let s2 = fe("quad:0,1,1,2");
        assert!((&s2 + &(-&s2)).is_zero());
    }

    #[test]
    fn mul_examples() {
        let golden = fe("quad:1,1,2,5");
        let conj = fe("quad:1,-1,2,5");
        assert_eq!(&golden * &conj, FieldElement::from_int(-1));
        let s2 = fe("quad:0,1,1,2");
        assert_eq!(&s2 * &s2, FieldElement::from_int(2));
        assert_eq!(golden.square(), fe("quad:3,1,2,5"));
    }

    #[test]
    fn inv_examples() {
        let golden = fe("quad:1,1,2,5");
        assert_eq!(golden.inv().unwrap(), fe("quad:-1,1,2,5"));
        assert_eq!(fe("rat:2/3").inv().unwrap(), fe("rat:3/2"));
        assert_eq!(fe("quad:2,1,1,2").inv().unwrap(), fe("quad:2,-1,2,2"));
        assert!(matches!(
            FieldElement::zero().inv(),
            Err(ExactError::DivisionByZero)
        ));
    }

    #[test]
    fn sign_examples() {
        assert_eq!(fe("rat:0/1").sign(), 0);
        assert_eq!(fe("quad:1,-1,1,2").sign(), -1); // 1 − √2
        assert_eq!(fe("quad:3,-1,2,5").sign(), 1); // (3 − √5)/2
        assert_eq!(fe("quad:-3,1,2,5").sign(), -1);
        assert_eq!(fe("rat:-7/3").sign(), -1);
    }

    #[test]
    fn floor_examples() {
        assert_eq!(fe("rat:-7/2").floor(), BigInt::from(-4));
        assert_eq!(fe("quad:1,2,1,5").floor(), BigInt::from(5)); // 1 + 2√5
        assert_eq!(fe("quad:0,5,1,2").floor(), BigInt::from(7)); // 5√2
        assert_eq!(fe("quad:0,-5,1,2").floor(), BigInt::from(-8));
        assert_eq!(fe("quad:1,1,2,5").floor(), BigInt::from(1)); // golden ratio
        assert_eq!(fe("quad:1,-1,2,5").floor(), BigInt::from(-1));
        assert_eq!(FieldElement::from_int(9).floor(), BigInt::from(9));
    }

    #[test]
    fn mixed_fields_error() {
        let s2 = fe("quad:0,1,1,2");
        let s3 = fe("quad:0,1,1,3");
        assert!(matches!(
            s2.checked_add(&s3),
            Err(ExactError::MixedFields(_, _))
        ));
        // √8 is legal but never unified with √2
        let s8 = fe("quad:0,1,1,8");
        assert!(s2.checked_mul(&s8).is_err());
        // rationals join any field
        assert_eq!(&s2 * &fe("rat:2/1"), fe("quad:0,2,1,2"));
    }

    #[test]
    fn partial_order() {
        let s2 = fe("quad:0,1,1,2");
        let s3 = fe("quad:0,1,1,3");
        assert!(s2 < fe("rat:3/2"));
        assert!(s2 > fe("rat:7/5"));
        assert_eq!(s2.partial_cmp(&s3), None);
    }

    #[test]
    fn display_roundtrip() {
        for s in [
            "rat:1/2",
            "rat:-7/3",
            "rat:0/1",
            "quad:1,1,2,5",
            "quad:0,-3,7,8",
            "quad:-4,1,3,2",
        ] {
            let x = fe(s);
            assert_eq!(x.to_string(), s);
            assert_eq!(fe(&x.to_string()), x);
        }
    }

    #[test]
    fn random_invariants() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(0x5eed_ed01);
        let radicands = [2i64, 3, 5, 6, 7, 8, 10];
        for _ in 0..100_000 {
            let d = radicands[rng.random_range(0..radicands.len())];
            let a = rng.random_range(-1_000_000i64..=1_000_000);
            let b = rng.random_range(-1_000i64..=1_000);
            let c = rng.random_range(1i64..=1_000);
            let x = FieldElement::quadratic(a, b, c, d).unwrap();

            // floor bracket: ⌊x⌋ <= x < ⌊x⌋ + 1, via exact signs
            let m = x.floor();
            let lo = &x - &FieldElement::from_int(m.clone());
            assert!(lo.sign() >= 0, "floor too high for {x}");
            assert!(
                (&lo - &FieldElement::one()).sign() < 0,
                "floor too low for {x}"
            );

            // floor shift: ⌊x + n⌋ = ⌊x⌋ + n
            let n = rng.random_range(-1_000i64..=1_000);
            let shifted = &x + &FieldElement::from_int(n);
            assert_eq!(shifted.floor(), m + BigInt::from(n));

            // multiplicative inverse is exact
            if !x.is_zero() {
                assert!((&x * &x.inv().unwrap()).is_one());
            }

            // float agreement for add/mul within a crude error bound
            let y = FieldElement::quadratic(
                rng.random_range(-1_000_000i64..=1_000_000),
                rng.random_range(-1_000i64..=1_000),
                rng.random_range(1i64..=1_000),
                d,
            )
            .unwrap();
            let sum = &x + &y;
            let prod = &x * &y;
            let scale = x.to_f64().abs() + y.to_f64().abs() + 1.0;
            assert!((sum.to_f64() - (x.to_f64() + y.to_f64())).abs() <= 1e-9 * scale);
            let pscale = (x.to_f64() * y.to_f64()).abs() + 1.0;
            assert!((prod.to_f64() - x.to_f64() * y.to_f64()).abs() <= 1e-9 * pscale);
        }
    }

    #[test]
    fn fract_in_unit_interval() {
        for s in ["quad:1,2,3,7", "rat:-9/4", "quad:-5,-3,4,2"] {
            let x = fe(s);
            let f = x.fract();
            assert!(f.sign() >= 0);
            assert!((&f - &FieldElement::one()).sign() < 0);
            assert_eq!(&x - &f, FieldElement::from_int(x.floor()));
        }
    }
}
