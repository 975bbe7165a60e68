//! Exact geometry of the rotation lattice in integer coordinates.
//!
//! The lattice 𝓛 has basis (−cscθ, 0) and (cotθ, 1); the squared Euclidean
//! norm of the point with integer coordinates (x, y) is the quadratic form
//!
//! ```text
//! N(x, y) = (x² + y² + λxy) / (1 − λ²/4)
//! ```
//!
//! For η ≠ 0 the lattice shifts by κ(e₁ + e₂) with κ = η/(2 + λ) and the
//! form is evaluated at (x + κ, y + κ). Every predicate here is decided in
//! ℚ(λ) by integer sign tests; floating point appears only in
//! [`embed_real`], which exists for plotting.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::dynamics::{sign_quad_big, LatticeState, RotationParams};
use crate::exact::{isqrt, FieldElement};

/// A trap-region query: squared radius R² (exact rational) and whether the
/// κ-shifted lattice 𝓛′ is meant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrapSpec {
    pub radius_sq: BigRational,
    pub shifted: bool,
}

impl TrapSpec {
    pub fn new(radius_sq: BigRational) -> Self {
        assert!(radius_sq.is_positive(), "radius_sq must be positive");
        Self {
            radius_sq,
            shifted: false,
        }
    }

    pub fn shifted(radius_sq: BigRational) -> Self {
        assert!(radius_sq.is_positive(), "radius_sq must be positive");
        Self {
            radius_sq,
            shifted: true,
        }
    }

    /// The spec matching the parameters: shifted exactly when η ≠ 0.
    pub fn for_params(radius_sq: BigRational, params: &RotationParams) -> Self {
        Self {
            radius_sq,
            shifted: params.has_shift(),
        }
    }

    /// ⌊R⌋, computed exactly from R².
    pub fn floor_radius(&self) -> BigInt {
        isqrt(&self.radius_sq.floor().to_integer())
    }
}

/// The quadratic norm form of the (possibly shifted) lattice.
#[derive(Debug, Clone)]
pub struct NormForm<'a> {
    params: &'a RotationParams,
    shifted: bool,
}

impl<'a> NormForm<'a> {
    pub fn new(params: &'a RotationParams) -> Self {
        Self {
            params,
            shifted: false,
        }
    }

    pub fn shifted(params: &'a RotationParams) -> Self {
        Self {
            params,
            shifted: true,
        }
    }

    /// Exact N(x, y), or N(x + κ, y + κ) on the shifted lattice.
    pub fn eval(&self, s: &LatticeState) -> FieldElement {
        let q = if self.shifted {
            let x = &FieldElement::from(&s.x) + self.params.kappa();
            let y = &FieldElement::from(&s.y) + self.params.kappa();
            let xx = x.square();
            let yy = y.square();
            let xy = &x * &y;
            &(&xx + &yy) + &(self.params.lambda() * &xy)
        } else {
            self.params.q_value(&s.x, &s.y)
        };
        &q / self.params.sin_sq_theta()
    }
}

/// Exact squared lattice norm N(x, y) of a state (unshifted lattice).
pub fn norm_sq(s: &LatticeState, params: &RotationParams) -> FieldElement {
    NormForm::new(params).eval(s)
}

/// The lattice reflection Φ: coordinate swap, norm-preserving.
pub fn reflect_state(s: &LatticeState) -> LatticeState {
    s.swapped()
}

/// Closed-ball membership N(s) ≤ R², decided exactly.
pub fn in_ball(s: &LatticeState, spec: &TrapSpec, params: &RotationParams) -> bool {
    Tester::new(spec, params).in_ball(&s.x, &s.y)
}

/// Trap-region membership: N(s) > R² and the unit segment below s (in the
/// second basis direction) meets the closed ball, with the segment
/// endpoint u = 1 excluded.
pub fn in_trap(s: &LatticeState, spec: &TrapSpec, params: &RotationParams) -> bool {
    Tester::new(spec, params).in_trap(&s.x, &s.y, false)
}

/// Membership in the reflected trap region Φ(T(R)): the unit segment runs
/// along the first basis direction instead. Equals `in_trap` of the
/// swapped state because the form is symmetric.
pub fn in_reflected_trap(s: &LatticeState, spec: &TrapSpec, params: &RotationParams) -> bool {
    let sw = s.swapped();
    Tester::new(spec, params).in_trap(&sw.x, &sw.y, false)
}

/// All lattice states in the trap region, sorted lexicographically.
pub fn trap_states(spec: &TrapSpec, params: &RotationParams) -> Vec<LatticeState> {
    trap_states_with(spec, params, false)
}

fn trap_states_with(
    spec: &TrapSpec,
    params: &RotationParams,
    closed_segment: bool,
) -> Vec<LatticeState> {
    let tester = Tester::new(spec, params);
    let (xmin, xmax) = tester.x_bounds();
    let (ymin, ymax) = tester.y_bounds();
    let ymax = &ymax + 1; // the band extends one unit past the ball
    let xs: Vec<BigInt> = range_inclusive(&xmin, &xmax);
    let mut per_x: Vec<Vec<LatticeState>> = Vec::new();
    xs.par_iter()
        .map(|x| {
            let mut hits = Vec::new();
            let mut y = ymin.clone();
            while y <= ymax {
                if tester.in_trap(x, &y, closed_segment) {
                    hits.push(LatticeState {
                        x: x.clone(),
                        y: y.clone(),
                    });
                }
                y += 1;
            }
            hits
        })
        .collect_into_vec(&mut per_x);
    per_x.into_iter().flatten().collect()
}

/// |𝓛 ∩ T(R)|, by exact enumeration. Equals 2⌊R⌋ + 1 for η = 0.
pub fn trap_count(spec: &TrapSpec, params: &RotationParams) -> u64 {
    trap_states(spec, params).len() as u64
}

/// Trap counts under both segment-endpoint conventions, u ∈ (0, 1) versus
/// u ∈ (0, 1]: they can differ when R is an integer and the segment
/// endpoint lands exactly on the sphere.
pub fn trap_count_conventions(spec: &TrapSpec, params: &RotationParams) -> (u64, u64) {
    (
        trap_states_with(spec, params, false).len() as u64,
        trap_states_with(spec, params, true).len() as u64,
    )
}

/// |𝓛 ∩ T(R)| with the pairs {s, Φ(s)} identified whenever both members
/// lie in the trap; Φ-fixed states count once.
pub fn trap_count_mod_reflection(spec: &TrapSpec, params: &RotationParams) -> u64 {
    let states = trap_states(spec, params);
    states
        .iter()
        .filter(|s| {
            let sw = s.swapped();
            sw < **s || states.binary_search(&sw).is_err()
        })
        .count() as u64
}

/// Double-precision planar coordinates of a lattice state, for plotting:
/// x·(−cscθ, 0) + y·(cotθ, 1), plus the κ-shift on the shifted lattice.
pub fn embed_real(s: &LatticeState, params: &RotationParams, shifted: bool) -> (f64, f64) {
    let sin_theta = params.sin_sq_theta().to_f64().sqrt();
    let cos_theta = -params.lambda().to_f64() / 2.0;
    let kappa = if shifted {
        params.kappa().to_f64()
    } else {
        0.0
    };
    let x = s.x.to_f64().unwrap_or(f64::NAN) + kappa;
    let y = s.y.to_f64().unwrap_or(f64::NAN) + kappa;
    (-x / sin_theta + y * cos_theta / sin_theta, y)
}

/// All lattice states in the exact closed ball, sorted lexicographically.
pub fn ball_states(spec: &TrapSpec, params: &RotationParams) -> Vec<LatticeState> {
    let tester = Tester::new(spec, params);
    let (xmin, xmax) = tester.x_bounds();
    let (ymin, ymax) = tester.y_bounds();
    let xs: Vec<BigInt> = range_inclusive(&xmin, &xmax);
    let mut per_x: Vec<Vec<LatticeState>> = Vec::new();
    xs.par_iter()
        .map(|x| {
            let mut hits = Vec::new();
            let mut y = ymin.clone();
            while y <= ymax {
                if tester.in_ball(x, &y) {
                    hits.push(LatticeState {
                        x: x.clone(),
                        y: y.clone(),
                    });
                }
                y += 1;
            }
            hits
        })
        .collect_into_vec(&mut per_x);
    per_x.into_iter().flatten().collect()
}

fn range_inclusive(lo: &BigInt, hi: &BigInt) -> Vec<BigInt> {
    let mut v = Vec::new();
    let mut x = lo.clone();
    while &x <= hi {
        v.push(x.clone());
        x += 1;
    }
    v
}

/// Exact membership machinery for one (R², params) query, with an i128
/// mirror for the unshifted case. Predicates on the shifted lattice run
/// through field arithmetic.
pub(crate) struct Tester {
    exact: ExactTester,
    small: Option<SmallTester>,
    shifted: Option<ShiftedTester>,
}

impl Tester {
    pub(crate) fn new(spec: &TrapSpec, params: &RotationParams) -> Self {
        let exact = ExactTester::new(&spec.radius_sq, params);
        let shifted = if spec.shifted && params.has_shift() {
            Some(ShiftedTester::new(&spec.radius_sq, params))
        } else {
            None
        };
        let small = if shifted.is_none() {
            SmallTester::build(&exact)
        } else {
            None
        };
        Self {
            exact,
            small,
            shifted,
        }
    }

    /// Inclusive bounds on the integer x-coordinate of any ball or trap
    /// state, from the smallest eigenvalue 1 − |λ|/2 of the form.
    pub(crate) fn x_bounds(&self) -> (BigInt, BigInt) {
        match &self.shifted {
            None => {
                let s = self.exact.coord_bound.clone();
                (-s.clone(), s)
            }
            Some(sh) => {
                let s = FieldElement::from_int(sh.coord_bound.clone());
                let hi = (&s - &sh.kappa).floor();
                let lo = -(&s + &sh.kappa).floor();
                (lo, hi)
            }
        }
    }

    pub(crate) fn y_bounds(&self) -> (BigInt, BigInt) {
        self.x_bounds()
    }

    pub(crate) fn in_ball(&self, x: &BigInt, y: &BigInt) -> bool {
        if let Some(sh) = &self.shifted {
            return sh.q_cmp_r2(x, y, 0, 0) <= 0;
        }
        if let Some(sm) = &self.small {
            if let Some(ans) = sm.q_le(x, y) {
                return ans;
            }
        }
        self.exact.q_cmp(x, y) <= 0
    }

    pub(crate) fn in_ball_i64(&self, x: i64, y: i64) -> Option<bool> {
        if self.shifted.is_some() {
            return None;
        }
        self.small.as_ref()?.q_le_i64(x, y)
    }

    /// The trap predicate. g(u) = N(x, y − u) is a quadratic in u with
    /// vertex u* = y + λx/2 and minimum value x² (shifted: (x+κ)²); the
    /// open segment u ∈ (0, 1) — or half-open u ∈ (0, 1] — meets the
    /// closed ball according to where the vertex falls.
    pub(crate) fn in_trap(&self, x: &BigInt, y: &BigInt, closed_segment: bool) -> bool {
        if self.in_ball(x, y) {
            return false;
        }
        match self.vertex_position(x, y) {
            VertexPos::Below => false,
            VertexPos::Inside => self.min_value_le_r2(x),
            VertexPos::AtOrAbove => {
                let cmp = self.q_cmp_at_y_minus_1(x, y);
                if closed_segment {
                    cmp <= 0
                } else {
                    cmp < 0
                }
            }
        }
    }

    fn vertex_position(&self, x: &BigInt, y: &BigInt) -> VertexPos {
        if let Some(sh) = &self.shifted {
            return sh.vertex_position(x, y);
        }
        if let Some(sm) = &self.small {
            if let Some(v) = sm.vertex_position(x, y) {
                return v;
            }
        }
        self.exact.vertex_position(x, y)
    }

    fn min_value_le_r2(&self, x: &BigInt) -> bool {
        if let Some(sh) = &self.shifted {
            return sh.min_value_le_r2(x);
        }
        // x² ≤ R² over the integers: x²·rd ≤ rn
        x * x * &self.exact.rd <= self.exact.rn
    }

    fn q_cmp_at_y_minus_1(&self, x: &BigInt, y: &BigInt) -> i32 {
        if let Some(sh) = &self.shifted {
            return sh.q_cmp_r2(x, y, 0, -1);
        }
        let y1 = y - 1;
        if let Some(sm) = &self.small {
            if let Some(c) = sm.q_cmp(x, &y1) {
                return c;
            }
        }
        self.exact.q_cmp(x, &y1)
    }
}

enum VertexPos {
    Below,     // u* <= 0
    Inside,    // 0 < u* < 1
    AtOrAbove, // u* >= 1
}

/// Raw-integer tester for the unshifted lattice. The ball condition
/// N(x,y) ≤ R² is rewritten as sign(G1 + G2√d) ≤ 0 with
/// G1 = (C(x²+y²) + lam_a·xy)·TD − TAC and G2 = lam_b·xy·TD − TBC.
struct ExactTester {
    c: BigInt,
    lam_a: BigInt,
    lam_b: BigInt,
    d: BigInt, // dummy 2 when the field is rational (b-parts vanish)
    td: BigInt,
    tac: BigInt,
    tbc: BigInt,
    rn: BigInt,
    rd: BigInt,
    coord_bound: BigInt,
}

impl ExactTester {
    fn new(radius_sq: &BigRational, params: &RotationParams) -> Self {
        let lambda = params.lambda();
        let (la, lb, lc) = lambda.parts();
        let (sa, sb, sc) = params.sin_sq_theta().parts();
        let d = lambda
            .radicand()
            .cloned()
            .unwrap_or_else(|| BigInt::from(2));
        let rn = radius_sq.numer().clone();
        let rd = radius_sq.denom().clone();
        let td = &rd * sc;
        let tac = &rn * sa * lc;
        let tbc = &rn * sb * lc;

        // x² ≤ T/(1 − |λ|/2): with T = R²·sin²θ this gives the provable
        // coordinate bound via one exact floor.
        let t = {
            let r2 = FieldElement::from_rational(radius_sq);
            &r2 * params.sin_sq_theta()
        };
        let half = FieldElement::rational(1, 2).expect("static");
        let abs_lambda = if lambda.is_negative() {
            -lambda
        } else {
            lambda.clone()
        };
        let denom = &FieldElement::one() - &(&half * &abs_lambda);
        let bound_sq = (&t / &denom).floor();
        let coord_bound = isqrt(&bound_sq.max(BigInt::zero()));

        Self {
            c: lc.clone(),
            lam_a: la.clone(),
            lam_b: lb.clone(),
            d,
            td,
            tac,
            tbc,
            rn,
            rd,
            coord_bound,
        }
    }

    /// sign of q(x,y) − R²·sin²θ, i.e. N(x,y) vs R².
    fn q_cmp(&self, x: &BigInt, y: &BigInt) -> i32 {
        let ss = x * x + y * y;
        let xy = x * y;
        let p = &self.c * ss + &self.lam_a * &xy;
        let q = &self.lam_b * &xy;
        sign_quad_big(
            &(p * &self.td - &self.tac),
            &(q * &self.td - &self.tbc),
            &self.d,
        )
    }

    fn vertex_position(&self, x: &BigInt, y: &BigInt) -> VertexPos {
        // u* = y + λx/2 = (2Cy + lam_a·x + lam_b·x√d)/(2C)
        let v1 = BigInt::from(2) * &self.c * y + &self.lam_a * x;
        let v2 = &self.lam_b * x;
        if sign_quad_big(&v1, &v2, &self.d) <= 0 {
            VertexPos::Below
        } else if sign_quad_big(&(&v1 - BigInt::from(2) * &self.c), &v2, &self.d) < 0 {
            VertexPos::Inside
        } else {
            VertexPos::AtOrAbove
        }
    }
}

/// i128 mirror of `ExactTester`, valid for |x|, |y| ≤ bound.
struct SmallTester {
    c: i128,
    lam_a: i128,
    lam_b: i128,
    d: i128,
    td: i128,
    tac: i128,
    tbc: i128,
    rn: i128,
    rd: i128,
    bound: i64,
}

impl SmallTester {
    fn build(e: &ExactTester) -> Option<Self> {
        let c = e.c.to_i128()?;
        let lam_a = e.lam_a.to_i128()?;
        let lam_b = e.lam_b.to_i128()?;
        let d = e.d.to_i128()?;
        let td = e.td.to_i128()?;
        let tac = e.tac.to_i128()?;
        let tbc = e.tbc.to_i128()?;
        let rn = e.rn.to_i128()?;
        let rd = e.rd.to_i128()?;

        // Find the largest M with every intermediate and both squares in
        // the final sign comparison inside i128.
        let mut bound: i64 = 1 << 30;
        loop {
            if bound < 16 {
                return None;
            }
            let m = bound as u128;
            let ok = (|| {
                let ss = (2 * m * m).max(1);
                let p = ss.checked_mul((c + lam_a.abs()) as u128)?.checked_add(1)?;
                let g1 = p.checked_mul(td as u128)?.checked_add(tac.unsigned_abs())?;
                let g2 = (m * m)
                    .checked_mul(lam_b.unsigned_abs())?
                    .checked_mul(td as u128)?
                    .checked_add(tbc.unsigned_abs())?;
                g1.checked_mul(g1)?;
                g2.checked_mul(g2)?.checked_mul(d as u128)?;
                Some(())
            })();
            if ok.is_some() {
                break;
            }
            bound /= 2;
        }
        Some(Self {
            c,
            lam_a,
            lam_b,
            d,
            td,
            tac,
            tbc,
            rn,
            rd,
            bound,
        })
    }

    #[inline]
    fn fits(&self, x: &BigInt, y: &BigInt) -> Option<(i128, i128)> {
        let x = x.to_i64()?;
        let y = y.to_i64()?;
        if x.abs() <= self.bound && y.abs() <= self.bound {
            Some((x as i128, y as i128))
        } else {
            None
        }
    }

    #[inline]
    fn q_cmp_raw(&self, x: i128, y: i128) -> i32 {
        let ss = x * x + y * y;
        let xy = x * y;
        let p = self.c * ss + self.lam_a * xy;
        let q = self.lam_b * xy;
        sign_quad_unchecked(p * self.td - self.tac, q * self.td - self.tbc, self.d)
    }

    fn q_cmp(&self, x: &BigInt, y: &BigInt) -> Option<i32> {
        let (x, y) = self.fits(x, y)?;
        Some(self.q_cmp_raw(x, y))
    }

    fn q_le(&self, x: &BigInt, y: &BigInt) -> Option<bool> {
        Some(self.q_cmp(x, y)? <= 0)
    }

    fn q_le_i64(&self, x: i64, y: i64) -> Option<bool> {
        if x.abs() <= self.bound && y.abs() <= self.bound {
            Some(self.q_cmp_raw(x as i128, y as i128) <= 0)
        } else {
            None
        }
    }

    fn vertex_position(&self, x: &BigInt, y: &BigInt) -> Option<VertexPos> {
        let (x, y) = self.fits(x, y)?;
        let v1 = 2 * self.c * y + self.lam_a * x;
        let v2 = self.lam_b * x;
        Some(if sign_quad_unchecked(v1, v2, self.d) <= 0 {
            VertexPos::Below
        } else if sign_quad_unchecked(v1 - 2 * self.c, v2, self.d) < 0 {
            VertexPos::Inside
        } else {
            VertexPos::AtOrAbove
        })
    }

    #[allow(dead_code)]
    fn min_le_r2(&self, x: i128) -> bool {
        x * x * self.rd <= self.rn
    }
}

/// Sign of a + b√d without overflow checks; callers guarantee bounds.
#[inline]
fn sign_quad_unchecked(a: i128, b: i128, d: i128) -> i32 {
    let sa = a.signum() as i32;
    if b == 0 {
        return sa;
    }
    let sb = b.signum() as i32;
    if sa == sb || sa == 0 {
        return sb;
    }
    match (a * a).cmp(&(b * b * d)) {
        std::cmp::Ordering::Greater => sa,
        std::cmp::Ordering::Less => sb,
        std::cmp::Ordering::Equal => unreachable!("a² = b²d contradicts non-square d"),
    }
}

/// Field-arithmetic tester for the κ-shifted lattice.
struct ShiftedTester {
    kappa: FieldElement,
    lambda: FieldElement,
    r2: FieldElement,
    threshold: FieldElement, // R²·sin²θ
    coord_bound: BigInt,
}

impl ShiftedTester {
    fn new(radius_sq: &BigRational, params: &RotationParams) -> Self {
        let r2 = FieldElement::from_rational(radius_sq);
        let threshold = &r2 * params.sin_sq_theta();
        let half = FieldElement::rational(1, 2).expect("static");
        let lambda = params.lambda().clone();
        let abs_lambda = if lambda.is_negative() {
            -&lambda
        } else {
            lambda.clone()
        };
        let denom = &FieldElement::one() - &(&half * &abs_lambda);
        let bound_sq = (&threshold / &denom).floor();
        let coord_bound = isqrt(&bound_sq.max(BigInt::zero())) + 1;
        Self {
            kappa: params.kappa().clone(),
            lambda,
            r2,
            threshold,
            coord_bound,
        }
    }

    /// sign of q(x+κ+dx, y+κ+dy) − R²·sin²θ.
    fn q_cmp_r2(&self, x: &BigInt, y: &BigInt, dx: i64, dy: i64) -> i32 {
        let xe = &(&FieldElement::from(x) + &self.kappa) + &FieldElement::from_int(dx);
        let ye = &(&FieldElement::from(y) + &self.kappa) + &FieldElement::from_int(dy);
        let q = &(&xe.square() + &ye.square()) + &(&self.lambda * &(&xe * &ye));
        (&q - &self.threshold).sign()
    }

    fn vertex_position(&self, x: &BigInt, y: &BigInt) -> VertexPos {
        let xe = &FieldElement::from(x) + &self.kappa;
        let ye = &FieldElement::from(y) + &self.kappa;
        let half = FieldElement::rational(1, 2).expect("static");
        let vertex = &ye + &(&half * &(&self.lambda * &xe));
        if vertex.sign() <= 0 {
            VertexPos::Below
        } else if (&vertex - &FieldElement::one()).sign() < 0 {
            VertexPos::Inside
        } else {
            VertexPos::AtOrAbove
        }
    }

    fn min_value_le_r2(&self, x: &BigInt) -> bool {
        let xe = &FieldElement::from(x) + &self.kappa;
        (&xe.square() - &self.r2).sign() <= 0
    }
}
