//! The discretized-rotation step map on ℤ², its inverse, and the two
//! reversing involutions.
//!
//! The map is F(x, y) = (y, −⌊x + λy + η⌋). It factors as F = φ∘g where
//! φ swaps coordinates and g(x, y) = (−⌊x + λy + η⌋, y); both are
//! involutions, which is the reversibility the orbit machinery exploits.
//!
//! All predicates are exact. A machine-word fast path (gated by bounds
//! computed at parameter construction) accelerates long iteration; it is
//! bit-equivalent to the big-integer path and cross-checked in tests.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::exact::{ExactCoeff, ExactError, FieldElement};

/// A point of ℤ², both as dynamical state (aₙ, aₙ₊₁) and as the integer
/// coordinate pair of a lattice point. Ordering is lexicographic (x, then
/// y), which is the canonical-representative order used everywhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeState {
    pub x: BigInt,
    pub y: BigInt,
}

impl LatticeState {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        Self {
            x: x.into(),
            y: y.into(),
        }
    }

    /// The coordinate swap (y, x): the involution φ, equally the lattice
    /// reflection Φ in integer coordinates.
    pub fn swapped(&self) -> Self {
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }

    pub fn to_i64_pair(&self) -> Option<(i64, i64)> {
        Some((self.x.to_i64()?, self.y.to_i64()?))
    }
}

impl From<(i64, i64)> for LatticeState {
    fn from((x, y): (i64, i64)) -> Self {
        Self::new(x, y)
    }
}

impl fmt::Display for LatticeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

/// The involution φ(x, y) = (y, x).
pub fn involution_phi(s: &LatticeState) -> LatticeState {
    s.swapped()
}

/// Membership in Fix(φ): states with x = y.
pub fn in_fix_phi(s: &LatticeState) -> bool {
    s.x == s.y
}

/// One traced application of the step map, carrying the exact floor
/// argument and its fractional part μ ∈ [0, 1) (the translation length of
/// the rotated frame).
#[derive(Debug, Clone, PartialEq)]
pub struct StepTrace {
    pub state_before: LatticeState,
    pub state_after: LatticeState,
    pub floor_arg: FieldElement,
    pub mu: FieldElement,
}

/// The system (λ, η) with its derived exact constants and the integer
/// step machinery.
///
/// λ must lie in (−2, 2) exactly, and λ and η must be rational or share
/// one quadratic field. Immutable and freely shareable across threads.
#[derive(Debug, Clone)]
pub struct RotationParams {
    lambda: ExactCoeff,
    eta: ExactCoeff,
    lambda_sq: FieldElement,
    sin_sq_theta: FieldElement,
    kappa: FieldElement,
    theta: f64,
    // λ = (lam_a + lam_b√d)/denom and η = (eta_a + eta_b√d)/denom over the
    // shared denominator, so ⌊u + λy + η⌋ reduces to one quadratic floor.
    denom: BigInt,
    lam_a: BigInt,
    lam_b: BigInt,
    eta_a: BigInt,
    eta_b: BigInt,
    d: Option<BigInt>,
    small: Option<SmallParams>,
}

impl PartialEq for RotationParams {
    fn eq(&self, other: &Self) -> bool {
        self.lambda == other.lambda && self.eta == other.eta
    }
}

impl Eq for RotationParams {}

impl RotationParams {
    /// Build the system, checking −2 < λ < 2 by exact sign tests and the
    /// field compatibility of λ and η.
    pub fn new(lambda: ExactCoeff, eta: ExactCoeff) -> Result<Self, ExactError> {
        let two = FieldElement::from_int(2);
        if !(&lambda + &two).is_positive() || !(&two - &lambda).is_positive() {
            return Err(ExactError::LambdaOutOfRange(lambda.to_string()));
        }
        let lambda_sq = lambda.square();
        let quarter = FieldElement::rational(1, 4).expect("static");
        let sin_sq_theta = &FieldElement::one() - &(&lambda_sq * &quarter);
        debug_assert!(sin_sq_theta.is_positive());
        // errors here if λ and η live under distinct radicands
        let kappa = eta.checked_div(&(&two + &lambda))?;
        let theta = (-lambda.to_f64() / 2.0).acos();

        let (la, lb, lc) = lambda.parts();
        let (ea, eb, ec) = eta.parts();
        let denom = lc.lcm(ec);
        let lscale = &denom / lc;
        let escale = &denom / ec;
        let lam_a = la * &lscale;
        let lam_b = lb * &lscale;
        let eta_a = ea * &escale;
        let eta_b = eb * &escale;
        let d = match (lambda.radicand(), eta.radicand()) {
            (Some(p), _) => Some(p.clone()),
            (None, q) => q.cloned(),
        };

        let small = SmallParams::build(&denom, &lam_a, &lam_b, &eta_a, &eta_b, d.as_ref());

        Ok(Self {
            lambda,
            eta,
            lambda_sq,
            sin_sq_theta,
            kappa,
            theta,
            denom,
            lam_a,
            lam_b,
            eta_a,
            eta_b,
            d,
            small,
        })
    }

    /// Convenience constructor from coefficient text, η defaulting to 0.
    pub fn from_specs(lambda: &str, eta: &str) -> Result<Self, ExactError> {
        Self::new(lambda.parse()?, eta.parse()?)
    }

    pub fn lambda(&self) -> &ExactCoeff {
        &self.lambda
    }

    pub fn eta(&self) -> &ExactCoeff {
        &self.eta
    }

    pub fn lambda_sq(&self) -> &FieldElement {
        &self.lambda_sq
    }

    /// sin²θ = 1 − λ²/4, exactly.
    pub fn sin_sq_theta(&self) -> &FieldElement {
        &self.sin_sq_theta
    }

    /// κ = η/(2 + λ), the shift conjugating the η-dynamics to η = 0.
    pub fn kappa(&self) -> &FieldElement {
        &self.kappa
    }

    /// θ = arccos(−λ/2) ∈ (0, π), double precision, reporting only.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn has_shift(&self) -> bool {
        !self.eta.is_zero()
    }

    /// Exact ⌊u + λy + η⌋: the single nonlinearity everything reduces to.
    pub fn floor_affine(&self, u: &BigInt, y: &BigInt) -> BigInt {
        let a = u * &self.denom + &self.lam_a * y + &self.eta_a;
        let b = &self.lam_b * y + &self.eta_b;
        match &self.d {
            Some(d) if !b.is_zero() => floor_quad_big(&a, &b, &self.denom, d),
            _ => a.div_floor(&self.denom),
        }
    }

    /// One forward step F(x, y) = (y, −⌊x + λy + η⌋).
    pub fn step(&self, s: &LatticeState) -> LatticeState {
        LatticeState {
            x: s.y.clone(),
            y: -self.floor_affine(&s.x, &s.y),
        }
    }

    /// One backward step F⁻¹(x, y) = (−⌊y + λx + η⌋, x).
    pub fn step_back(&self, s: &LatticeState) -> LatticeState {
        LatticeState {
            x: -self.floor_affine(&s.y, &s.x),
            y: s.x.clone(),
        }
    }

    /// The involution g(x, y) = (−⌊x + λy + η⌋, y), so that F = φ∘g.
    pub fn involution_g(&self, s: &LatticeState) -> LatticeState {
        LatticeState {
            x: -self.floor_affine(&s.x, &s.y),
            y: s.y.clone(),
        }
    }

    /// Membership in Fix(g): −η ≤ 2x + λy < 1 − η, i.e. ⌊2x + λy + η⌋ = 0.
    pub fn in_fix_g(&self, s: &LatticeState) -> bool {
        self.floor_affine(&(&s.x + &s.x), &s.y).is_zero()
    }

    /// The three-term inequality −η ≤ c + λb + a < 1 − η; holds exactly
    /// when step((a, b)) = (b, c).
    pub fn three_term_check(&self, a: &BigInt, b: &BigInt, c: &BigInt) -> bool {
        self.floor_affine(&(a + c), b).is_zero()
    }

    /// Step with the exact floor argument and fractional part attached.
    pub fn step_trace(&self, s: &LatticeState) -> StepTrace {
        let lambda_y = self
            .lambda
            .checked_mul(&FieldElement::from(&s.y))
            .expect("integer scalar");
        let floor_arg = &(&FieldElement::from(&s.x) + &lambda_y) + &self.eta;
        let mu = floor_arg.fract();
        StepTrace {
            state_before: s.clone(),
            state_after: self.step(s),
            floor_arg,
            mu,
        }
    }

    /// The quadratic-form value q(x, y) = x² + y² + λxy as an exact field
    /// element. The squared lattice norm is q / sin²θ.
    pub fn q_value(&self, x: &BigInt, y: &BigInt) -> FieldElement {
        let ss = x * x + y * y;
        let xy = x * y;
        let num_a = &ss * &self.denom + &self.lam_a * &xy;
        let num_b = &self.lam_b * &xy;
        fe_from_raw(num_a, num_b, self.denom.clone(), self.d.clone())
    }

    /// q evaluated at the κ-shifted point, up to the additive constant κη:
    /// q(x+κ, y+κ) = q(x, y) + η(x+y) + κη. Comparing these values orders
    /// states by their norm on the lattice the orbit actually lives on.
    pub(crate) fn orbit_q_offset(&self, x: &BigInt, y: &BigInt) -> FieldElement {
        let ss = x * x + y * y;
        let xy = x * y;
        let sum = x + y;
        let num_a = &ss * &self.denom + &self.lam_a * &xy + &self.eta_a * &sum;
        let num_b = &self.lam_b * &xy + &self.eta_b * &sum;
        fe_from_raw(num_a, num_b, self.denom.clone(), self.d.clone())
    }

    /// Classification of whether θ/π is rational, decided by the value of
    /// λ: rational λ qualifies iff λ ∈ {0, ±1}; quadratic λ iff λ² ∈ {2, 3}
    /// or λ² ∓ λ = 1 (the four conjugates of the golden ratio).
    pub fn theta_over_pi_is_rational(&self) -> bool {
        if let Some(r) = self.lambda.to_rational() {
            return r.is_zero() || r.is_one() || (-&r).is_one();
        }
        let sq = self.lambda.square();
        if let Some(q) = sq.to_rational() {
            let two = num_rational::BigRational::from_integer(2.into());
            let three = num_rational::BigRational::from_integer(3.into());
            return q == two || q == three;
        }
        let one = FieldElement::one();
        &sq - &self.lambda == one || &sq + &self.lambda == one
    }

    pub(crate) fn small(&self) -> Option<&SmallParams> {
        self.small.as_ref()
    }

    /// Exact comparison of the (shifted-lattice) norms of two states,
    /// routed through the fast path when the coordinates allow it.
    pub(crate) fn cmp_orbit_norm(&self, s1: (i64, i64), s2: (i64, i64)) -> std::cmp::Ordering {
        if let Some(sp) = &self.small {
            if let Some(ord) = sp.cmp_q(s1, s2) {
                return ord;
            }
        }
        self.cmp_orbit_norm_big(
            &LatticeState::new(s1.0, s1.1),
            &LatticeState::new(s2.0, s2.1),
        )
    }

    pub(crate) fn cmp_orbit_norm_big(
        &self,
        s1: &LatticeState,
        s2: &LatticeState,
    ) -> std::cmp::Ordering {
        let q1 = self.orbit_q_offset(&s1.x, &s1.y);
        let q2 = self.orbit_q_offset(&s2.x, &s2.y);
        q1.partial_cmp(&q2).expect("same field")
    }
}

impl fmt::Display for RotationParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "lambda={} eta={}", self.lambda, self.eta)
    }
}

fn fe_from_raw(a: BigInt, b: BigInt, c: BigInt, d: Option<BigInt>) -> FieldElement {
    match d {
        Some(d) if !b.is_zero() => FieldElement::quadratic(a, b, c, d).expect("validated radicand"),
        _ => FieldElement::rational(a, c).expect("c >= 1"),
    }
}

/// Exact sign of a + b√d over the integers.
pub(crate) fn sign_quad_big(a: &BigInt, b: &BigInt, d: &BigInt) -> i32 {
    let sa = if a.is_zero() {
        0
    } else if a.is_positive() {
        1
    } else {
        -1
    };
    if b.is_zero() {
        return sa;
    }
    let sb = if b.is_positive() { 1 } else { -1 };
    if sa == sb || sa == 0 {
        return sb;
    }
    match (a * a).cmp(&(b * b * d)) {
        std::cmp::Ordering::Greater => sa,
        std::cmp::Ordering::Less => sb,
        std::cmp::Ordering::Equal => unreachable!("a² = b²d contradicts non-square d"),
    }
}

/// Exact ⌊(a + b√d)/c⌋ for c > 0, b ≠ 0, via integer-square-root
/// bracketing of b√d plus at most two sign-test corrections.
pub(crate) fn floor_quad_big(a: &BigInt, b: &BigInt, c: &BigInt, d: &BigInt) -> BigInt {
    let t = (b * b * d).sqrt();
    let lo = if b.is_positive() {
        a + &t
    } else {
        a - &t - BigInt::one()
    };
    let mut m = lo.div_floor(c);
    loop {
        let next = &m + BigInt::one();
        if sign_quad_big(&(a - &next * c), b, d) >= 0 {
            m = next;
        } else {
            break;
        }
    }
    while sign_quad_big(&(a - &m * c), b, d) < 0 {
        m -= 1;
    }
    m
}

/// Machine-word mirror of the step machinery, valid only for coordinates
/// within bounds computed at construction so that every intermediate fits
/// in i128. Outside the bounds callers fall back to the big-integer path.
#[derive(Debug, Clone)]
pub(crate) struct SmallParams {
    denom: i128,
    lam_a: i128,
    lam_b: i128,
    eta_a: i128,
    eta_b: i128,
    d: i128, // 0 when the floor argument is rational
    step_bound: i64,
    cmp_bound: i64,
}

impl SmallParams {
    fn build(
        denom: &BigInt,
        lam_a: &BigInt,
        lam_b: &BigInt,
        eta_a: &BigInt,
        eta_b: &BigInt,
        d: Option<&BigInt>,
    ) -> Option<Self> {
        const COEFF_CAP: i128 = 1 << 20;
        let denom = denom.to_i128()?;
        let lam_a = lam_a.to_i128()?;
        let lam_b = lam_b.to_i128()?;
        let eta_a = eta_a.to_i128()?;
        let eta_b = eta_b.to_i128()?;
        let d = match d {
            Some(d) => d.to_i128()?,
            None => 0,
        };
        for v in [denom, lam_a, lam_b, eta_a, eta_b, d] {
            if v.abs() >= COEFF_CAP {
                return None;
            }
        }

        // |A| = |x·denom + lam_a·y + eta_a| <= M(denom + |lam_a|) + |eta_a|
        // must stay below 2^61; (|lam_b|·M + |eta_b|)²·d below 2^126.
        let m1 = ((1i128 << 61) - eta_a.abs()) / (denom + lam_a.abs() + 1);
        let m2 = if lam_b == 0 {
            i128::MAX
        } else {
            let root = ((1u128 << 126) / (d.max(2) as u128)).sqrt() as i128;
            (root - eta_b.abs()) / lam_b.abs()
        };
        let step_bound = m1.min(m2).min(i64::MAX as i128 / 4) as i64;
        if step_bound < 1 << 16 {
            return None;
        }

        // cmp works on differences of ss = x²+y², p = xy and x+y:
        // |denom·Δss + lam_a·Δp + eta_a·Δ(x+y)| must square inside i128,
        // likewise the √d part with lam_b, eta_b.
        let c1 = (1i128 << 62) / (2 * denom + lam_a.abs() + 2 * eta_a.abs() + 1);
        let c2 = {
            let w = lam_b.abs() + 2 * eta_b.abs();
            if w == 0 {
                i128::MAX
            } else {
                ((1u128 << 126) / (d.max(2) as u128)).sqrt() as i128 / w
            }
        };
        let prod_cap = c1.min(c2) / 2;
        let cmp_bound = (prod_cap.max(4).isqrt() as i64).min(step_bound);
        if cmp_bound < 1 << 10 {
            return None;
        }

        Some(Self {
            denom,
            lam_a,
            lam_b,
            eta_a,
            eta_b,
            d,
            step_bound,
            cmp_bound,
        })
    }

    #[inline]
    fn in_step_range(&self, v: i64) -> bool {
        v.abs() <= self.step_bound
    }

    /// F(x, y) on machine words; None when out of the safe range.
    #[inline]
    pub(crate) fn step(&self, x: i64, y: i64) -> Option<(i64, i64)> {
        let m = self.floor_affine(x, y)?;
        let ny = i64::try_from(-m).ok()?;
        Some((y, ny))
    }

    /// ⌊u + λy + η⌋ on machine words.
    #[inline]
    pub(crate) fn floor_affine(&self, u: i64, y: i64) -> Option<i128> {
        if !self.in_step_range(u) || !self.in_step_range(y) {
            return None;
        }
        let a = u as i128 * self.denom + self.lam_a * y as i128 + self.eta_a;
        let b = self.lam_b * y as i128 + self.eta_b;
        if b == 0 || self.d == 0 {
            return Some(a.div_euclid(self.denom));
        }
        let t = ((b * b * self.d) as u128).isqrt() as i128;
        let lo = if b > 0 { a + t } else { a - t - 1 };
        let mut m = lo.div_euclid(self.denom);
        while sign_quad_i128(a - (m + 1) * self.denom, b, self.d)? >= 0 {
            m += 1;
        }
        while sign_quad_i128(a - m * self.denom, b, self.d)? < 0 {
            m -= 1;
        }
        Some(m)
    }

    /// Compare the shifted-lattice norms of s₁ and s₂ (the κη constant
    /// cancels); None when out of the safe range.
    #[inline]
    pub(crate) fn cmp_q(&self, s1: (i64, i64), s2: (i64, i64)) -> Option<std::cmp::Ordering> {
        for v in [s1.0, s1.1, s2.0, s2.1] {
            if v.abs() > self.cmp_bound {
                return None;
            }
        }
        let ss1 = s1.0 as i128 * s1.0 as i128 + s1.1 as i128 * s1.1 as i128;
        let ss2 = s2.0 as i128 * s2.0 as i128 + s2.1 as i128 * s2.1 as i128;
        let p1 = s1.0 as i128 * s1.1 as i128;
        let p2 = s2.0 as i128 * s2.1 as i128;
        let dsum = (s1.0 as i128 + s1.1 as i128) - (s2.0 as i128 + s2.1 as i128);
        let g1 = self.denom * (ss1 - ss2) + self.lam_a * (p1 - p2) + self.eta_a * dsum;
        let g2 = self.lam_b * (p1 - p2) + self.eta_b * dsum;
        let s = sign_quad_i128(g1, g2, self.d.max(2))?;
        Some(s.cmp(&0))
    }
}

/// Exact sign of a + b√d in i128, None on potential overflow.
#[inline]
fn sign_quad_i128(a: i128, b: i128, d: i128) -> Option<i32> {
    let sa = a.signum() as i32;
    if b == 0 {
        return Some(sa);
    }
    let sb = b.signum() as i32;
    if sa == sb || sa == 0 {
        return Some(sb);
    }
    let aa = a.checked_mul(a)?;
    let bbd = b.checked_mul(b)?.checked_mul(d)?;
    Some(match aa.cmp(&bbd) {
        std::cmp::Ordering::Greater => sa,
        std::cmp::Ordering::Less => sb,
        std::cmp::Ordering::Equal => unreachable!("a² = b²d contradicts non-square d"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: &str, eta: &str) -> RotationParams {
        RotationParams::from_specs(lambda, eta).unwrap()
    }

    fn st(x: i64, y: i64) -> LatticeState {
        LatticeState::new(x, y)
    }

    #[test]
    fn lambda_range_enforced() {
        assert!(RotationParams::from_specs("rat:2/1", "rat:0/1").is_err());
        assert!(RotationParams::from_specs("rat:-2/1", "rat:0/1").is_err());
        assert!(RotationParams::from_specs("rat:199/100", "rat:0/1").is_ok());
        // (1+√5)/2 is fine, √5 itself is not
        assert!(RotationParams::from_specs("quad:1,1,2,5", "rat:0/1").is_ok());
        assert!(RotationParams::from_specs("quad:0,1,1,5", "rat:0/1").is_err());
    }

    #[test]
    fn eta_field_compatibility() {
        // λ in ℚ(√5), η in ℚ(√2): rejected
        assert!(RotationParams::new(
            "quad:1,1,2,5".parse().unwrap(),
            "quad:0,1,1,2".parse().unwrap()
        )
        .is_err());
        // rational η joins any field
        assert!(
            RotationParams::new("quad:1,1,2,5".parse().unwrap(), "rat:1/1".parse().unwrap())
                .is_ok()
        );
    }

    #[test]
    fn derived_constants() {
        let p = params("quad:1,1,2,5", "rat:1/1");
        // κ(2+λ) = η
        let two = FieldElement::from_int(2);
        assert_eq!(&(p.kappa() * &(&two + p.lambda())), p.eta());
        // sin²θ > 0 and θ ∈ (0, π)
        assert!(p.sin_sq_theta().is_positive());
        assert!(p.theta() > 0.0 && p.theta() < std::f64::consts::PI);
        // λ² cached exactly: ((1+√5)/2)² = (3+√5)/2
        assert_eq!(p.lambda_sq(), &"quad:3,1,2,5".parse().unwrap());
    }

    #[test]
    fn step_examples() {
        let p0 = params("rat:0/1", "rat:0/1");
        assert_eq!(p0.step(&st(1, 0)), st(0, -1));

        let p1 = params("rat:1/1", "rat:0/1");
        assert_eq!(p1.step(&st(0, -1)), st(-1, 1));

        let ph = params("rat:1/2", "rat:0/1");
        assert_eq!(ph.step(&st(0, -1)), st(-1, 1));

        let pg = params("quad:1,1,2,5", "rat:1/1");
        assert_eq!(pg.step(&st(-1, 4)), st(4, -6));
        // and at η = 0 the same seed goes elsewhere
        let pg0 = params("quad:1,1,2,5", "rat:0/1");
        assert_eq!(pg0.step(&st(-1, 4)), st(4, -5));
    }

    #[test]
    fn step_back_examples() {
        let p0 = params("rat:0/1", "rat:0/1");
        assert_eq!(p0.step_back(&st(0, -1)), st(1, 0));
        let ph = params("rat:1/2", "rat:0/1");
        assert_eq!(ph.step_back(&st(-1, 1)), st(0, -1));
        let p1 = params("rat:1/1", "rat:0/1");
        assert_eq!(p1.step_back(&st(1, 0)), st(-1, 1));
    }

    #[test]
    fn involution_examples() {
        assert_eq!(involution_phi(&st(3, 5)), st(5, 3));
        assert_eq!(involution_phi(&st(0, 0)), st(0, 0));

        let ph = params("rat:1/2", "rat:0/1");
        assert_eq!(ph.involution_g(&st(0, 1)), st(0, 1));
        let p0 = params("rat:0/1", "rat:0/1");
        assert_eq!(p0.involution_g(&st(1, 0)), st(-1, 0));
    }

    #[test]
    fn fixed_set_examples() {
        assert!(in_fix_phi(&st(4, 4)));
        assert!(!in_fix_phi(&st(4, 5)));
        assert!(in_fix_phi(&st(0, 0)));

        let ph = params("rat:1/2", "rat:0/1");
        assert!(ph.in_fix_g(&st(0, 1)));
        assert!(ph.in_fix_g(&st(0, 0)));
        assert!(!ph.in_fix_g(&st(1, 0)));
    }

    #[test]
    fn three_term_examples() {
        let p1 = params("rat:1/1", "rat:0/1");
        assert!(p1.three_term_check(&1.into(), &0.into(), &(-1).into()));
        assert!(!p1.three_term_check(&1.into(), &0.into(), &0.into()));
        let ph = params("rat:1/2", "rat:0/1");
        assert!(ph.three_term_check(&0.into(), &(-1).into(), &1.into()));
    }

    #[test]
    fn trace_mu_in_unit_interval() {
        let p = params("quad:0,1,1,2", "rat:1/3");
        let mut s = st(3, -2);
        for _ in 0..50 {
            let tr = p.step_trace(&s);
            assert!(tr.mu.sign() >= 0);
            assert!((&tr.mu - &FieldElement::one()).sign() < 0);
            let diff = &tr.floor_arg - &tr.mu;
            assert!(diff.is_integer());
            s = tr.state_after;
        }
    }

    #[test]
    fn theta_classification() {
        for (l, rational) in [
            ("rat:0/1", true),
            ("rat:1/1", true),
            ("rat:-1/1", true),
            ("rat:1/2", false),
            ("rat:3/2", false),
            ("quad:0,1,1,2", true),
            ("quad:0,-1,1,2", true),
            ("quad:0,1,1,3", true),
            ("quad:1,1,2,5", true),
            ("quad:-1,1,2,5", true),
            ("quad:1,-1,2,5", true),
            ("quad:-1,-1,2,5", true),
            ("quad:0,1,2,8", true),  // √8/2 = √2 in a non-reduced radicand
            ("quad:0,1,2,2", false), // √2/2
            ("quad:1,1,4,2", false),
            ("quad:0,1,2,6", false), // √6/2 is out of the rational-angle list
        ] {
            let p = params(l, "rat:0/1");
            assert_eq!(p.theta_over_pi_is_rational(), rational, "lambda {l}");
        }
    }

    #[test]
    fn reversibility_laws_random() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(42);
        let param_set = [
            params("rat:0/1", "rat:0/1"),
            params("rat:1/1", "rat:0/1"),
            params("rat:1/2", "rat:0/1"),
            params("rat:-3/4", "rat:2/3"),
            params("quad:0,1,1,2", "rat:0/1"),
            params("quad:0,-1,1,3", "rat:0/1"),
            params("quad:1,1,2,5", "rat:1/1"),
            params("quad:1,1,2,5", "quad:0,1,3,5"),
            params("quad:0,1,2,2", "rat:-1/2"),
            params("rat:9/5", "rat:7/11"),
        ];
        for p in &param_set {
            for _ in 0..2_000 {
                let s = st(
                    rng.random_range(-1_000_000..=1_000_000),
                    rng.random_range(-1_000_000..=1_000_000),
                );
                let fs = p.step(&s);
                assert_eq!(p.step_back(&fs), s, "bijectivity at {s} for {p}");
                assert_eq!(p.step(&p.step_back(&s)), s);
                // involution laws and the factorization F = φ∘g
                assert_eq!(involution_phi(&involution_phi(&s)), s);
                assert_eq!(p.involution_g(&p.involution_g(&s)), s);
                assert_eq!(involution_phi(&p.involution_g(&s)), fs);
                // conjugate reversibility φF⁻¹ = Fφ
                assert_eq!(
                    involution_phi(&p.step_back(&s)),
                    p.step(&involution_phi(&s))
                );
                // fixed-set membership agrees with the involutions
                assert_eq!(p.in_fix_g(&s), p.involution_g(&s) == s);
                assert_eq!(in_fix_phi(&s), involution_phi(&s) == s);
                // defining inequality of the step
                assert!(p.three_term_check(&s.x, &s.y, &fs.y));
                assert!(!p.three_term_check(&s.x, &s.y, &(&fs.y + BigInt::one())));
            }
        }
    }

    #[test]
    fn fast_path_matches_big_path() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(7);
        for spec in [
            ("rat:1/2", "rat:0/1"),
            ("quad:1,1,2,5", "rat:1/1"),
            ("quad:0,-1,1,3", "rat:0/1"),
            ("quad:0,1,2,2", "quad:1,1,3,2"),
        ] {
            let p = params(spec.0, spec.1);
            let sp = p.small().expect("small coefficients");
            for _ in 0..5_000 {
                let scale = if rng.random_bool(0.5) {
                    1_000
                } else {
                    1_000_000_000
                };
                let x = rng.random_range(-scale..=scale);
                let y = rng.random_range(-scale..=scale);
                if let Some((fx, fy)) = sp.step(x, y) {
                    let big = p.step(&st(x, y));
                    assert_eq!(big, st(fx, fy), "state ({x},{y}) for {p}");
                }
                let a = rng.random_range(-1_000i64..=1_000);
                let b = rng.random_range(-1_000i64..=1_000);
                let clamped = (x.min(1 << 20), y.min(1 << 20));
                if let Some(ord) = sp.cmp_q(clamped, (a, b)) {
                    let big = p.cmp_orbit_norm_big(
                        &LatticeState::new(clamped.0, clamped.1),
                        &LatticeState::new(a, b),
                    );
                    assert_eq!(ord, big);
                }
            }
        }
    }

    #[test]
    fn eta_reversibility_holds() {
        // F(x,y) = (y,z) implies F(z,y) = (y,x), also for η ≠ 0
        let p = params("quad:1,1,2,5", "rat:1/1");
        for (x, y) in [(0i64, 0i64), (-1, 4), (7, -3), (100, 41)] {
            let s = st(x, y);
            let fs = p.step(&s);
            let back = p.step(&LatticeState::new(fs.y.clone(), fs.x.clone()));
            assert_eq!(back, st(y, x));
        }
    }
}
