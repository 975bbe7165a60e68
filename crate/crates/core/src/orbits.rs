//! Period detection and time-reversal classification of orbits.
//!
//! Plain detection iterates the step map until the seed returns; for a
//! bijection the first return time is the minimal period. The symmetric
//! detector instead walks forward only until the orbit re-enters Fix(φ) or
//! Fix(g): two symmetry centers force periodicity with a period dividing
//! the center distance, so roughly half a period of stepping suffices.
//!
//! Periodicity of an orbit is open in general; detection is therefore
//! budgeted and `Unresolved` is an ordinary outcome, never an error.

use std::collections::HashSet;

use num_rational::BigRational;
use thiserror::Error;

use crate::dynamics::{in_fix_phi, LatticeState, RotationParams};
use crate::exact::FieldElement;
use crate::geometry::{ball_states, NormForm, TrapSpec};

/// Iteration limits for a single orbit exploration.
#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    pub max_steps: u64,
    /// Abort threshold on the exact squared lattice norm of any visited
    /// state (the shifted-lattice norm when η ≠ 0).
    pub max_norm_sq: Option<BigRational>,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_steps: 10_000_000,
            max_norm_sq: None,
        }
    }
}

impl Budget {
    pub fn with_max_steps(max_steps: u64) -> Self {
        assert!(max_steps >= 1);
        Self {
            max_steps,
            max_norm_sq: None,
        }
    }
}

/// Outcome of a period search.
#[derive(Debug, Clone, PartialEq)]
pub enum OrbitOutcome {
    Periodic {
        /// Minimal period p ≥ 1.
        period: u64,
        /// Lexicographically least state on the orbit.
        canonical: LatticeState,
    },
    Unresolved,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitResult {
    pub outcome: OrbitOutcome,
    pub steps_used: u64,
    /// Largest squared lattice norm seen along the walk.
    pub max_norm_sq_seen: FieldElement,
}

impl OrbitResult {
    pub fn period(&self) -> Option<u64> {
        match &self.outcome {
            OrbitOutcome::Periodic { period, .. } => Some(*period),
            OrbitOutcome::Unresolved => None,
        }
    }

    pub fn canonical(&self) -> Option<&LatticeState> {
        match &self.outcome {
            OrbitOutcome::Periodic { canonical, .. } => Some(canonical),
            OrbitOutcome::Unresolved => None,
        }
    }
}

/// Time-reversal class of a periodic orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymmetryClass {
    Asymmetric,
    PhiSymmetric,
    GSymmetric,
    DoublySymmetric,
}

impl std::fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SymmetryClass::Asymmetric => "asymmetric",
            SymmetryClass::PhiSymmetric => "phi_symmetric",
            SymmetryClass::GSymmetric => "g_symmetric",
            SymmetryClass::DoublySymmetric => "doubly_symmetric",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for SymmetryClass {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "asymmetric" => SymmetryClass::Asymmetric,
            "phi_symmetric" => SymmetryClass::PhiSymmetric,
            "g_symmetric" => SymmetryClass::GSymmetric,
            "doubly_symmetric" => SymmetryClass::DoublySymmetric,
            other => return Err(format!("unknown symmetry class `{other}`")),
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OrbitError {
    #[error("seed {0} lies in neither Fix(phi) nor Fix(g)")]
    SeedNotSymmetric(LatticeState),
    #[error("orbit of {0} unresolved within budget")]
    Unresolved(LatticeState),
    #[error("theta/pi is rational for {0}; no finite period-ball bound applies")]
    ThetaRational(String),
    #[error("period must be >= 1")]
    PeriodTooSmall,
    #[error("period-ball radius for p = {0} overflows double precision")]
    RadiusOverflow(u64),
}

/// A walking head over an orbit: machine words while the coordinates
/// permit, escalating to big integers (and back) transparently.
#[derive(Debug, Clone)]
enum Cursor {
    Small(i64, i64),
    Big(LatticeState),
}

impl Cursor {
    fn start(seed: &LatticeState, params: &RotationParams) -> Self {
        if params.small().is_some() {
            if let Some((x, y)) = seed.to_i64_pair() {
                return Cursor::Small(x, y);
            }
        }
        Cursor::Big(seed.clone())
    }

    fn advance(&mut self, params: &RotationParams) {
        match self {
            Cursor::Small(x, y) => {
                if let Some((nx, ny)) = params.small().and_then(|sp| sp.step(*x, *y)) {
                    *x = nx;
                    *y = ny;
                } else {
                    let big = params.step(&LatticeState::new(*x, *y));
                    *self = Cursor::Big(big);
                }
            }
            Cursor::Big(s) => {
                let next = params.step(s);
                if params.small().is_some() {
                    if let Some((x, y)) = next.to_i64_pair() {
                        // come back down once the excursion allows it
                        if x.abs() < (1 << 40) && y.abs() < (1 << 40) {
                            *self = Cursor::Small(x, y);
                            return;
                        }
                    }
                }
                *self = Cursor::Big(next);
            }
        }
    }

    fn state(&self) -> LatticeState {
        match self {
            Cursor::Small(x, y) => LatticeState::new(*x, *y),
            Cursor::Big(s) => s.clone(),
        }
    }

    fn equals_small(&self, seed: (i64, i64)) -> bool {
        matches!(self, Cursor::Small(x, y) if (*x, *y) == seed)
    }

    fn equals(&self, seed: &LatticeState, seed_small: Option<(i64, i64)>) -> bool {
        match (self, seed_small) {
            (Cursor::Small(..), Some(p)) => self.equals_small(p),
            (Cursor::Small(..), None) => false,
            (Cursor::Big(s), _) => s == seed,
        }
    }

    fn lex_less(&self, other: &Cursor) -> bool {
        match (self, other) {
            (Cursor::Small(x1, y1), Cursor::Small(x2, y2)) => (x1, y1) < (x2, y2),
            _ => self.state() < other.state(),
        }
    }

    fn norm_greater(&self, other: &Cursor, params: &RotationParams) -> bool {
        match (self, other) {
            (Cursor::Small(x1, y1), Cursor::Small(x2, y2)) => {
                params.cmp_orbit_norm((*x1, *y1), (*x2, *y2)) == std::cmp::Ordering::Greater
            }
            _ => {
                params.cmp_orbit_norm_big(&self.state(), &other.state())
                    == std::cmp::Ordering::Greater
            }
        }
    }
}

/// Squared lattice norm of a state on the lattice the orbit lives on
/// (κ-shifted when η ≠ 0).
fn orbit_norm_sq(s: &LatticeState, params: &RotationParams) -> FieldElement {
    if params.has_shift() {
        NormForm::shifted(params).eval(s)
    } else {
        NormForm::new(params).eval(s)
    }
}

pub(crate) struct RawWalk {
    pub period: Option<u64>,
    pub steps_used: u64,
    pub min_state: LatticeState,
    pub max_state: LatticeState,
}

/// Iterate from `seed` until first return or budget exhaustion, tracking
/// the lexicographic minimum and the norm maximum over visited states.
pub(crate) fn walk_detect(
    seed: &LatticeState,
    params: &RotationParams,
    budget: &Budget,
) -> RawWalk {
    let norm_cap = budget.max_norm_sq.as_ref().map(FieldElement::from_rational);
    let seed_small = seed.to_i64_pair();
    let mut cur = Cursor::start(seed, params);
    let mut min = cur.clone();
    let mut max = cur.clone();
    let mut steps: u64 = 0;
    loop {
        cur.advance(params);
        steps += 1;
        if cur.equals(seed, seed_small) {
            return RawWalk {
                period: Some(steps),
                steps_used: steps,
                min_state: min.state(),
                max_state: max.state(),
            };
        }
        if cur.lex_less(&min) {
            min = cur.clone();
        }
        if cur.norm_greater(&max, params) {
            max = cur.clone();
        }
        if let Some(cap) = &norm_cap {
            let n = orbit_norm_sq(&cur.state(), params);
            if (&n - cap).sign() > 0 {
                return RawWalk {
                    period: None,
                    steps_used: steps,
                    min_state: min.state(),
                    max_state: max.state(),
                };
            }
        }
        if steps >= budget.max_steps {
            return RawWalk {
                period: None,
                steps_used: steps,
                min_state: min.state(),
                max_state: max.state(),
            };
        }
    }
}

/// Visit the `period` states of a periodic orbit in step order, starting
/// at `seed`.
pub fn visit_orbit(
    seed: &LatticeState,
    params: &RotationParams,
    period: u64,
    mut f: impl FnMut(&LatticeState),
) {
    let mut cur = Cursor::start(seed, params);
    f(seed);
    for _ in 1..period {
        cur.advance(params);
        f(&cur.state());
    }
}

/// Detect the minimal period of the orbit through `seed` by direct
/// iteration. The first return to the seed is the minimal period because
/// the map is a bijection.
pub fn detect_period(seed: &LatticeState, params: &RotationParams, budget: &Budget) -> OrbitResult {
    let raw = walk_detect(seed, params, budget);
    let max_norm_sq_seen = orbit_norm_sq(&raw.max_state, params);
    match raw.period {
        Some(period) => OrbitResult {
            outcome: OrbitOutcome::Periodic {
                period,
                canonical: raw.min_state,
            },
            steps_used: raw.steps_used,
            max_norm_sq_seen,
        },
        None => OrbitResult {
            outcome: OrbitOutcome::Unresolved,
            steps_used: raw.steps_used,
            max_norm_sq_seen,
        },
    }
}

/// Detect the period of a symmetric orbit by walking forward only until a
/// fixed set is hit again.
///
/// A state in Fix(φ) at step k is a symmetry center 2k+1 of the coordinate
/// sequence; a state in Fix(g) is a center 2k+2. Two centers b₁ ≠ b₂ make
/// the sequence periodic with period dividing |b₂ − b₁|, so the minimal
/// period is recovered as the smallest divisor of that distance at which
/// the orbit actually returns.
pub fn detect_period_symmetric(
    seed: &LatticeState,
    params: &RotationParams,
    budget: &Budget,
) -> Result<OrbitResult, OrbitError> {
    let seed_phi = in_fix_phi(seed);
    let seed_g = params.in_fix_g(seed);
    if !seed_phi && !seed_g {
        return Err(OrbitError::SeedNotSymmetric(seed.clone()));
    }
    let mut b1 = Vec::new();
    if seed_phi {
        b1.push(1u64);
    }
    if seed_g {
        b1.push(2u64);
    }

    // Distance between two known centers; both memberships at once give
    // the distance 1 immediately.
    let mut distance: Option<u64> = if seed_phi && seed_g { Some(1) } else { None };

    let seed_small = seed.to_i64_pair();
    let mut cur = Cursor::start(seed, params);
    let mut steps: u64 = 0;
    if distance.is_none() {
        loop {
            cur.advance(params);
            steps += 1;
            if cur.equals(seed, seed_small) {
                // plain return happened before any second center
                return Ok(finish_symmetric(seed, params, steps, steps));
            }
            let s = cur.state();
            let mut candidates = Vec::new();
            if in_fix_phi(&s) {
                candidates.push(2 * steps + 1);
            }
            if params.in_fix_g(&s) {
                candidates.push(2 * steps + 2);
            }
            if !candidates.is_empty() {
                let mut dist = 0u64;
                for b2 in candidates {
                    for b in &b1 {
                        dist = gcd_u64(dist, b2.abs_diff(*b));
                    }
                }
                distance = Some(dist);
                break;
            }
            if steps >= budget.max_steps {
                return Ok(OrbitResult {
                    outcome: OrbitOutcome::Unresolved,
                    steps_used: steps,
                    max_norm_sq_seen: orbit_norm_sq(&s, params),
                });
            }
        }
    }

    let distance = distance.expect("loop only breaks with a distance");
    // The minimal period is the least divisor of `distance` at which the
    // orbit returns; one verification walk of at most `distance` steps
    // finds it (and computes the orbit statistics on the way).
    let period = smallest_returning_divisor(seed, params, distance);
    Ok(finish_symmetric(seed, params, period, steps + period))
}

fn finish_symmetric(
    seed: &LatticeState,
    params: &RotationParams,
    period: u64,
    steps_used: u64,
) -> OrbitResult {
    let mut min = seed.clone();
    let mut max = seed.clone();
    visit_orbit(seed, params, period, |s| {
        if *s < min {
            min = s.clone();
        }
        if params.cmp_orbit_norm_big(s, &max) == std::cmp::Ordering::Greater {
            max = s.clone();
        }
    });
    OrbitResult {
        outcome: OrbitOutcome::Periodic {
            period,
            canonical: min,
        },
        steps_used,
        max_norm_sq_seen: orbit_norm_sq(&max, params),
    }
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if a == 0 {
        b
    } else {
        gcd_u64(b % a, a)
    }
}

fn divisors_ascending(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut k = 1;
    while k * k <= n {
        if n.is_multiple_of(k) {
            small.push(k);
            if k * k != n {
                large.push(n / k);
            }
        }
        k += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

fn smallest_returning_divisor(seed: &LatticeState, params: &RotationParams, d: u64) -> u64 {
    let divisors = divisors_ascending(d);
    let seed_small = seed.to_i64_pair();
    let mut cur = Cursor::start(seed, params);
    let mut idx = 0;
    for step in 1..=d {
        cur.advance(params);
        while idx < divisors.len() && divisors[idx] < step {
            idx += 1;
        }
        if idx < divisors.len() && divisors[idx] == step && cur.equals(seed, seed_small) {
            return step;
        }
    }
    unreachable!("a doubly symmetric orbit must return within the center distance");
}

/// Classify the time-reversal symmetry of the (periodic) orbit through
/// `seed` by scanning one full period for fixed-set memberships.
pub fn classify_symmetry(
    seed: &LatticeState,
    params: &RotationParams,
    budget: &Budget,
) -> Result<SymmetryClass, OrbitError> {
    let result = detect_period(seed, params, budget);
    let period = result
        .period()
        .ok_or_else(|| OrbitError::Unresolved(seed.clone()))?;
    let mut phi_hits = 0u64;
    let mut g_hits = 0u64;
    visit_orbit(seed, params, period, |s| {
        if in_fix_phi(s) {
            phi_hits += 1;
        }
        if params.in_fix_g(s) {
            g_hits += 1;
        }
    });
    Ok(classify_from_hits(phi_hits, g_hits))
}

pub(crate) fn classify_from_hits(phi_hits: u64, g_hits: u64) -> SymmetryClass {
    match (phi_hits, g_hits) {
        (0, 0) => SymmetryClass::Asymmetric,
        (1, 0) => SymmetryClass::PhiSymmetric,
        (0, 1) => SymmetryClass::GSymmetric,
        // two centers anywhere (including one of each) force double symmetry
        _ => SymmetryClass::DoublySymmetric,
    }
}

/// Radius ρ(p) = p·cscθ / (2|sin(pθ/2)|), inflated by 1 + 10⁻⁹: every
/// orbit of period p lies inside the ball of this radius when θ/π is
/// irrational.
pub fn period_p_ball_radius(pd: u64, params: &RotationParams) -> Result<f64, OrbitError> {
    if pd == 0 {
        return Err(OrbitError::PeriodTooSmall);
    }
    if params.theta_over_pi_is_rational() {
        return Err(OrbitError::ThetaRational(params.lambda().to_string()));
    }
    let csc = 1.0 / params.sin_sq_theta().to_f64().sqrt();
    let denom = 2.0 * ((pd as f64) * params.theta() / 2.0).sin().abs();
    Ok(pd as f64 * csc / denom * (1.0 + 1e-9))
}

/// ρ(p)² rounded up to an exact rational, for exact ball tests.
pub fn period_p_ball_radius_sq(
    pd: u64,
    params: &RotationParams,
) -> Result<BigRational, OrbitError> {
    let rho = period_p_ball_radius(pd, params)?;
    let r = BigRational::from_float(rho).ok_or(OrbitError::RadiusOverflow(pd))?;
    Ok(&r * &r)
}

/// Result of a complete period-p enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodEnumeration {
    pub period: u64,
    pub radius_sq: BigRational,
    /// Canonical representatives of every orbit of exactly this period,
    /// sorted lexicographically.
    pub representatives: Vec<LatticeState>,
    /// Seeds whose orbits did not resolve within budget; completeness is
    /// certified only when this is empty.
    pub unresolved_seeds: Vec<LatticeState>,
}

impl PeriodEnumeration {
    pub fn complete(&self) -> bool {
        self.unresolved_seeds.is_empty()
    }
}

/// Enumerate canonical representatives of all orbits of exact period `pd`
/// by scanning the period-p ball. Complete when no seed exhausts the
/// budget.
pub fn enumerate_orbits_with_period(
    pd: u64,
    params: &RotationParams,
    budget: &Budget,
) -> Result<PeriodEnumeration, OrbitError> {
    let radius_sq = period_p_ball_radius_sq(pd, params)?;
    enumerate_orbits_with_period_in(pd, radius_sq, params, budget)
}

/// As [`enumerate_orbits_with_period`] but scanning a caller-chosen ball,
/// e.g. an inflated control radius.
pub fn enumerate_orbits_with_period_in(
    pd: u64,
    radius_sq: BigRational,
    params: &RotationParams,
    budget: &Budget,
) -> Result<PeriodEnumeration, OrbitError> {
    if pd == 0 {
        return Err(OrbitError::PeriodTooSmall);
    }
    let spec = TrapSpec::for_params(radius_sq.clone(), params);
    let seeds = ball_states(&spec, params);
    let mut visited: HashSet<LatticeState> = HashSet::new();
    let mut reps = std::collections::BTreeSet::new();
    let mut unresolved = Vec::new();
    for seed in seeds {
        if visited.contains(&seed) {
            continue;
        }
        let raw = walk_detect(&seed, params, budget);
        match raw.period {
            Some(period) => {
                visit_orbit(&seed, params, period, |s| {
                    visited.insert(s.clone());
                });
                if period == pd {
                    reps.insert(raw.min_state);
                }
            }
            None => unresolved.push(seed),
        }
    }
    Ok(PeriodEnumeration {
        period: pd,
        radius_sq,
        representatives: reps.into_iter().collect(),
        unresolved_seeds: unresolved,
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
    fn detect_period_examples() {
        let b = Budget::default();
        let p0 = params("rat:0/1", "rat:0/1");
        assert_eq!(detect_period(&st(1, 0), &p0, &b).period(), Some(4));

        let p1 = params("rat:1/1", "rat:0/1");
        assert_eq!(detect_period(&st(1, 0), &p1, &b).period(), Some(3));

        let ph = params("rat:1/2", "rat:0/1");
        let r = detect_period(&st(1, 0), &ph, &b);
        assert_eq!(r.period(), Some(7));
        assert_eq!(r.canonical(), Some(&st(-1, 0)));

        let pg = params("quad:1,1,2,5", "rat:1/1");
        assert_eq!(detect_period(&st(-1, 4), &pg, &b).period(), Some(5));
    }

    #[test]
    fn period_seven_orbit_states() {
        let ph = params("rat:1/2", "rat:0/1");
        let mut states = Vec::new();
        visit_orbit(&st(1, 0), &ph, 7, |s| states.push(s.clone()));
        let expected = [(1, 0), (0, -1), (-1, 1), (1, 1), (1, -1), (-1, 0), (0, 1)];
        assert_eq!(
            states,
            expected.iter().map(|&(x, y)| st(x, y)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn unresolved_on_tiny_budget() {
        let ph = params("rat:1/2", "rat:0/1");
        let r = detect_period(&st(1, 0), &ph, &Budget::with_max_steps(3));
        assert_eq!(r.outcome, OrbitOutcome::Unresolved);
        assert_eq!(r.steps_used, 3);
        assert!(r.max_norm_sq_seen.is_positive());
    }

    #[test]
    fn norm_cap_aborts() {
        let ph = params("rat:1/2", "rat:0/1");
        let b = Budget {
            max_norm_sq: Some(BigRational::new(1.into(), 2.into())),
            ..Budget::default()
        };
        let r = detect_period(&st(1, 0), &ph, &b);
        assert_eq!(r.outcome, OrbitOutcome::Unresolved);
    }

    #[test]
    fn symmetric_detector_examples() {
        let b = Budget::default();
        let ph = params("rat:1/2", "rat:0/1");
        let r = detect_period_symmetric(&st(1, 1), &ph, &b).unwrap();
        assert_eq!(r.period(), Some(7));

        // fixed point: double membership at the seed
        let r = detect_period_symmetric(&st(0, 0), &ph, &b).unwrap();
        assert_eq!(r.period(), Some(1));

        let p0 = params("rat:0/1", "rat:0/1");
        let r = detect_period_symmetric(&st(2, 2), &p0, &b).unwrap();
        assert_eq!(r.period(), Some(4));

        // non-symmetric seed is a precondition violation
        let p1 = params("rat:1/1", "rat:0/1");
        assert!(matches!(
            detect_period_symmetric(&st(1, 0), &p1, &b),
            Err(OrbitError::SeedNotSymmetric(_))
        ));
    }

    #[test]
    fn symmetric_detector_agrees_with_plain() {
        let b = Budget::default();
        for (l, eta) in [
            ("rat:1/2", "rat:0/1"),
            ("quad:0,1,1,2", "rat:0/1"),
            ("quad:1,1,2,5", "rat:0/1"),
            // shifted families: the fixed sets move with eta
            ("rat:1/2", "rat:1/3"),
            ("quad:1,1,2,5", "rat:1/1"),
            ("quad:0,-1,1,3", "rat:-2/5"),
        ] {
            let p = params(l, eta);
            for x in -12i64..=12 {
                for y in -12i64..=12 {
                    let s = st(x, y);
                    if !in_fix_phi(&s) && !p.in_fix_g(&s) {
                        continue;
                    }
                    let plain = detect_period(&s, &p, &b);
                    let sym = detect_period_symmetric(&s, &p, &b).unwrap();
                    assert_eq!(plain.period(), sym.period(), "seed {s} params {p}");
                    assert_eq!(plain.canonical(), sym.canonical(), "seed {s} params {p}");
                }
            }
        }
    }

    #[test]
    fn classification_table() {
        use SymmetryClass::*;
        assert_eq!(classify_from_hits(0, 0), Asymmetric);
        assert_eq!(classify_from_hits(1, 0), PhiSymmetric);
        assert_eq!(classify_from_hits(0, 1), GSymmetric);
        // two centers of any kinds force double symmetry
        assert_eq!(classify_from_hits(1, 1), DoublySymmetric);
        assert_eq!(classify_from_hits(2, 0), DoublySymmetric);
        assert_eq!(classify_from_hits(0, 2), DoublySymmetric);
    }

    #[test]
    fn classification_examples() {
        let b = Budget::default();
        let p1 = params("rat:1/1", "rat:0/1");
        assert_eq!(
            classify_symmetry(&st(1, 0), &p1, &b).unwrap(),
            SymmetryClass::Asymmetric
        );

        let ph = params("rat:1/2", "rat:0/1");
        assert_eq!(
            classify_symmetry(&st(1, 1), &ph, &b).unwrap(),
            SymmetryClass::DoublySymmetric
        );
        assert_eq!(
            classify_symmetry(&st(0, 0), &ph, &b).unwrap(),
            SymmetryClass::DoublySymmetric
        );

        // classification of an unresolved orbit is refused
        let r = classify_symmetry(&st(1, 0), &ph, &Budget::with_max_steps(2));
        assert!(matches!(r, Err(OrbitError::Unresolved(_))));
    }

    #[test]
    fn golden_eta_one_period_five_orbit_is_asymmetric() {
        let pg = params("quad:1,1,2,5", "rat:1/1");
        let b = Budget::default();
        assert_eq!(
            classify_symmetry(&st(-1, 4), &pg, &b).unwrap(),
            SymmetryClass::Asymmetric
        );
        let mut states = Vec::new();
        visit_orbit(&st(-1, 4), &pg, 5, |s| states.push(s.clone()));
        let expected = [(-1, 4), (4, -6), (-6, 5), (5, -3), (-3, -1)];
        assert_eq!(
            states,
            expected.iter().map(|&(x, y)| st(x, y)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn golden_eta_zero_has_asymmetric_orbit_by_search() {
        // the η = 0 counterpart of the period-5 example, re-derived by scan
        let pg = params("quad:1,1,2,5", "rat:0/1");
        let b = Budget::default();
        let mut found = None;
        'outer: for x in -12i64..=12 {
            for y in -12i64..=12 {
                let s = st(x, y);
                if classify_symmetry(&s, &pg, &b).unwrap() == SymmetryClass::Asymmetric {
                    found = Some(s);
                    break 'outer;
                }
            }
        }
        let seed = found.expect("an asymmetric periodic orbit exists at eta = 0");
        let r = detect_period(&seed, &pg, &b);
        assert!(r.period().is_some());
    }

    #[test]
    fn doubly_symmetric_center_distances_divide_period() {
        // shift law: any two symmetry centers of an orbit differ by a
        // multiple of its period.
        let b = Budget::default();
        for spec in ["rat:1/2", "quad:0,1,1,2"] {
            let p = params(spec, "rat:0/1");
            for x in -6i64..=6 {
                for y in -6i64..=6 {
                    let s = st(x, y);
                    let r = detect_period(&s, &p, &b);
                    let period = r.period().unwrap();
                    let mut centers = Vec::new();
                    let mut k = 0u64;
                    visit_orbit(&s, &p, period, |state| {
                        if in_fix_phi(state) {
                            centers.push(2 * k + 1);
                        }
                        if p.in_fix_g(state) {
                            centers.push(2 * k + 2);
                        }
                        k += 1;
                    });
                    for i in 0..centers.len() {
                        for j in i + 1..centers.len() {
                            let diff = centers[j].abs_diff(centers[i]);
                            assert!(
                                diff % period == 0 || diff == 0,
                                "centers {centers:?} period {period} seed {s}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ball_radius_examples() {
        let ph = params("rat:1/2", "rat:0/1");
        let rho7 = period_p_ball_radius(7, &ph).unwrap();
        let theta = ph.theta();
        let expected = 7.0 / theta.sin() / (2.0 * (7.0 * theta / 2.0).sin().abs());
        assert!((rho7 - expected).abs() / expected < 1e-6);

        assert!(period_p_ball_radius(3, &ph).unwrap() > 0.0);

        let p0 = params("rat:0/1", "rat:0/1");
        assert!(matches!(
            period_p_ball_radius(4, &p0),
            Err(OrbitError::ThetaRational(_))
        ));
        assert!(matches!(
            period_p_ball_radius(0, &ph),
            Err(OrbitError::PeriodTooSmall)
        ));
    }

    #[test]
    fn enumerate_fixed_points() {
        let ph = params("rat:1/2", "rat:0/1");
        let b = Budget::default();
        let e = enumerate_orbits_with_period(1, &ph, &b).unwrap();
        assert!(e.complete());
        assert_eq!(e.representatives, vec![st(0, 0)]);
    }

    #[test]
    fn enumerate_period_seven_contains_known_orbit() {
        let ph = params("rat:1/2", "rat:0/1");
        let b = Budget::default();
        let e = enumerate_orbits_with_period(7, &ph, &b).unwrap();
        assert!(e.complete());
        assert!(e.representatives.contains(&st(-1, 0)));
        // minimality: no proper divisor of 7 returns the canonical state
        for rep in &e.representatives {
            let mut s = rep.clone();
            for _ in 0..1 {
                s = ph.step(&s);
            }
            assert_ne!(&s, rep);
        }
    }

    #[test]
    fn enumerate_period_two_cross_checked() {
        let ph = params("rat:1/2", "rat:0/1");
        let b = Budget::default();
        let e = enumerate_orbits_with_period(2, &ph, &b).unwrap();
        let rho_sq = period_p_ball_radius_sq(2, &ph).unwrap();
        let control = enumerate_orbits_with_period_in(
            2,
            &rho_sq * &BigRational::from_integer(4.into()),
            &ph,
            &b,
        )
        .unwrap();
        assert_eq!(e.representatives, control.representatives);
    }

    #[test]
    fn divisor_helper() {
        assert_eq!(divisors_ascending(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors_ascending(7), vec![1, 7]);
        assert_eq!(divisors_ascending(1), vec![1]);
    }

    #[test]
    fn detection_without_machine_word_mirror() {
        // coefficients past the fast-path gates force the big-integer
        // walk throughout; cross-check its floor against the field
        // element oracle and verify a detected period by direct stepping
        for spec in ["rat:1048583/2097169", "quad:1048583,1048583,2097169,5"] {
            let p = params(spec, "rat:0/1");
            assert!(p.small().is_none(), "{spec} unexpectedly fits the mirror");
            for (u, y) in [(0i64, 1i64), (5, -7), (-123, 456)] {
                let lambda_y = p.lambda().checked_mul(&FieldElement::from_int(y)).unwrap();
                let arg = &(&FieldElement::from_int(u) + &lambda_y) + p.eta();
                assert_eq!(p.floor_affine(&u.into(), &y.into()), arg.floor());
            }
            let r = detect_period(&st(1, 0), &p, &Budget::default());
            let period = r.period().expect("small orbit resolves");
            let mut s = st(1, 0);
            for k in 1..=period {
                s = p.step(&s);
                assert_eq!(s == st(1, 0), k == period, "return at step {k}");
            }
        }
    }
}
