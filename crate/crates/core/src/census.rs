//! Whole-region experiments: ball scans with period histograms,
//! symmetric-seed streams, the counting bookkeeping behind the
//! orbit-versus-trap estimates, growth checks and equidistribution
//! statistics.
//!
//! Scans are data-parallel over fixed-size seed chunks and merge into
//! reports keyed by canonical orbit representatives, so the result is
//! byte-identical regardless of thread count or partitioning.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::dynamics::{in_fix_phi, LatticeState, RotationParams};
use crate::exact::{isqrt, FieldElement};
use crate::geometry::{ball_states, trap_count_mod_reflection, trap_states, Tester, TrapSpec};
use crate::orbits::{classify_from_hits, visit_orbit, walk_detect, Budget, SymmetryClass};

/// A scan radius, kept exact. The census works with R²; the exact R is
/// carried along when the caller specified one (ratios like the empirical
/// orbit-count constant stay rational in that case).
#[derive(Debug, Clone, PartialEq)]
pub struct RadiusSpec {
    pub radius_sq: BigRational,
    pub radius: Option<BigRational>,
}

impl RadiusSpec {
    pub fn from_radius(radius: BigRational) -> Self {
        assert!(radius.is_positive(), "radius must be positive");
        Self {
            radius_sq: &radius * &radius,
            radius: Some(radius),
        }
    }

    pub fn from_radius_sq(radius_sq: BigRational) -> Self {
        assert!(radius_sq.is_positive(), "radius_sq must be positive");
        Self {
            radius_sq,
            radius: None,
        }
    }

    /// ⌊R⌋ computed exactly from R².
    pub fn floor_radius(&self) -> BigInt {
        isqrt(&self.radius_sq.floor().to_integer())
    }

    pub fn radius_f64(&self) -> f64 {
        match &self.radius {
            Some(r) => r.to_f64().unwrap_or(f64::NAN),
            None => self.radius_sq.to_f64().unwrap_or(f64::NAN).sqrt(),
        }
    }

    /// The exact radius when given, otherwise an exact rational equal to
    /// the double-precision approximation of √(R²).
    fn radius_rational(&self) -> BigRational {
        match &self.radius {
            Some(r) => r.clone(),
            None => BigRational::from_float(self.radius_f64()).unwrap_or_else(BigRational::one),
        }
    }
}

/// One deduplicated periodic orbit met by a scan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitRecord {
    pub canonical: LatticeState,
    pub period: u64,
    pub class: SymmetryClass,
}

/// A seed whose orbit did not resolve within budget.
#[derive(Debug, Clone, PartialEq)]
pub struct UnresolvedRecord {
    pub seed: LatticeState,
    pub steps_used: u64,
    pub max_norm_sq: FieldElement,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CensusCounts {
    pub fix_phi_seeds: u64,
    pub fix_g_seeds: u64,
    pub trap_points: u64,
    pub trap_points_mod_reflection: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensusBounds {
    pub two_r_cos_half_theta: f64,
    pub r_plus_r_cos_half_theta: f64,
    pub two_floor_r_plus_1: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanMeta {
    pub scanned_states: u64,
    pub max_steps: u64,
}

/// Result of a whole-ball census. Deterministic: equal inputs give equal
/// reports, independent of threading.
#[derive(Debug, Clone, PartialEq)]
pub struct CensusReport {
    pub params: RotationParams,
    pub radius_sq: BigRational,
    /// period → number of distinct orbits of that period.
    pub histogram: BTreeMap<u64, u64>,
    /// Sorted by canonical representative.
    pub orbit_reps: Vec<OrbitRecord>,
    /// Sorted by seed.
    pub unresolved: Vec<UnresolvedRecord>,
    pub counts: CensusCounts,
    pub bounds: CensusBounds,
    /// Distinct periodic orbits divided by R.
    pub empirical_c: BigRational,
    pub meta: ScanMeta,
}

impl CensusReport {
    pub fn distinct_periodic_orbits(&self) -> u64 {
        self.orbit_reps.len() as u64
    }
}

/// Per-chunk accumulation; merging is associative and commutative because
/// everything is keyed canonically.
#[derive(Debug, Default, Clone, PartialEq)]
pub(crate) struct PartialCensus {
    pub reps: BTreeMap<LatticeState, (u64, SymmetryClass)>,
    pub unresolved: BTreeMap<LatticeState, (u64, FieldElement)>,
}

impl PartialCensus {
    pub(crate) fn merge(mut self, other: PartialCensus) -> PartialCensus {
        for (k, v) in other.reps {
            self.reps.insert(k, v);
        }
        for (k, v) in other.unresolved {
            self.unresolved.insert(k, v);
        }
        self
    }
}

const SCAN_CHUNK: usize = 1024;

pub(crate) fn scan_seeds(
    seeds: &[LatticeState],
    spec: &TrapSpec,
    params: &RotationParams,
    budget: &Budget,
) -> PartialCensus {
    let tester = Tester::new(spec, params);
    let mut acc = PartialCensus::default();
    let mut visited: HashSet<LatticeState> = HashSet::new();
    for seed in seeds {
        if visited.contains(seed) {
            continue;
        }
        let raw = walk_detect(seed, params, budget);
        match raw.period {
            Some(period) => {
                let mut phi_hits = 0u64;
                let mut g_hits = 0u64;
                visit_orbit(seed, params, period, |s| {
                    if in_fix_phi(s) {
                        phi_hits += 1;
                    }
                    if params.in_fix_g(s) {
                        g_hits += 1;
                    }
                    let inside = match s.to_i64_pair() {
                        Some((x, y)) => tester
                            .in_ball_i64(x, y)
                            .unwrap_or_else(|| tester.in_ball(&s.x, &s.y)),
                        None => tester.in_ball(&s.x, &s.y),
                    };
                    if inside {
                        visited.insert(s.clone());
                    }
                });
                acc.reps.insert(
                    raw.min_state,
                    (period, classify_from_hits(phi_hits, g_hits)),
                );
            }
            None => {
                let max_norm = orbit_norm(params, &raw.max_state);
                acc.unresolved
                    .insert(seed.clone(), (raw.steps_used, max_norm));
            }
        }
    }
    acc
}

fn orbit_norm(params: &RotationParams, s: &LatticeState) -> FieldElement {
    if params.has_shift() {
        crate::geometry::NormForm::shifted(params).eval(s)
    } else {
        crate::geometry::NormForm::new(params).eval(s)
    }
}

/// Process every lattice state of the exact closed ball: orbits are
/// deduplicated by canonical representative and classified, unresolved
/// seeds are recorded with their statistics, and the counting sections
/// are filled in.
pub fn scan_ball(radius: &RadiusSpec, params: &RotationParams, budget: &Budget) -> CensusReport {
    let spec = TrapSpec::for_params(radius.radius_sq.clone(), params);
    let seeds = ball_states(&spec, params);
    let merged = seeds
        .par_chunks(SCAN_CHUNK)
        .map(|chunk| scan_seeds(chunk, &spec, params, budget))
        .reduce(PartialCensus::default, PartialCensus::merge);
    finalize_report(radius, params, budget, seeds.len() as u64, merged)
}

fn finalize_report(
    radius: &RadiusSpec,
    params: &RotationParams,
    budget: &Budget,
    scanned_states: u64,
    merged: PartialCensus,
) -> CensusReport {
    let spec = TrapSpec::for_params(radius.radius_sq.clone(), params);
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    for (period, _) in merged.reps.values() {
        *histogram.entry(*period).or_insert(0) += 1;
    }
    let orbit_reps: Vec<OrbitRecord> = merged
        .reps
        .into_iter()
        .map(|(canonical, (period, class))| OrbitRecord {
            canonical,
            period,
            class,
        })
        .collect();
    let unresolved: Vec<UnresolvedRecord> = merged
        .unresolved
        .into_iter()
        .map(|(seed, (steps_used, max_norm_sq))| UnresolvedRecord {
            seed,
            steps_used,
            max_norm_sq,
        })
        .collect();

    let seeds = enumerate_symmetric_seeds(&radius.radius_sq, params);
    let counts = CensusCounts {
        fix_phi_seeds: seeds.fix_phi.len() as u64,
        fix_g_seeds: seeds.fix_g.len() as u64,
        trap_points: trap_states(&spec, params).len() as u64,
        trap_points_mod_reflection: trap_count_mod_reflection(&spec, params),
    };

    let r = radius.radius_f64();
    let cos_half = (params.theta() / 2.0).cos();
    let two_floor_r_plus_1 = (BigInt::from(2) * radius.floor_radius() + BigInt::one())
        .to_u64()
        .expect("small count");
    let bounds = CensusBounds {
        two_r_cos_half_theta: 2.0 * r * cos_half,
        r_plus_r_cos_half_theta: r + r * cos_half,
        two_floor_r_plus_1,
    };

    let empirical_c =
        BigRational::from_integer(BigInt::from(orbit_reps.len() as u64)) / radius.radius_rational();

    CensusReport {
        params: params.clone(),
        radius_sq: radius.radius_sq.clone(),
        histogram,
        orbit_reps,
        unresolved,
        counts,
        bounds,
        empirical_c,
        meta: ScanMeta {
            scanned_states,
            max_steps: budget.max_steps,
        },
    }
}

/// The two exact symmetric-seed streams inside the ball: the diagonal
/// states (x, x) and the Fix(g) band states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricSeeds {
    pub fix_phi: Vec<LatticeState>,
    pub fix_g: Vec<LatticeState>,
}

/// Enumerate both symmetric-seed streams exactly.
///
/// The Fix(g) stream uses the band structure: for each y there is at most
/// one x with 2x + λy + η ∈ [0, 1), namely half the unique integer of
/// [−λy−η, −λy−η+1) when that integer is even.
pub fn enumerate_symmetric_seeds(
    radius_sq: &BigRational,
    params: &RotationParams,
) -> SymmetricSeeds {
    let spec = TrapSpec::for_params(radius_sq.clone(), params);
    let tester = Tester::new(&spec, params);
    let (lo, hi) = tester.x_bounds();

    let mut fix_phi = Vec::new();
    let mut x = lo.clone();
    while x <= hi {
        if tester.in_ball(&x, &x) {
            fix_phi.push(LatticeState {
                x: x.clone(),
                y: x.clone(),
            });
        }
        x += 1;
    }

    let mut fix_g = Vec::new();
    let mut y = lo.clone();
    while y <= hi {
        // ceil(−λy−η) = −⌊λy+η⌋, the unique integer of the band interval
        let n = -params.floor_affine(&BigInt::zero(), &y);
        if n.is_even() {
            let x = n / BigInt::from(2);
            debug_assert!(params.in_fix_g(&LatticeState {
                x: x.clone(),
                y: y.clone()
            }));
            if tester.in_ball(&x, &y) {
                fix_g.push(LatticeState { x, y: y.clone() });
            }
        }
        y += 1;
    }
    fix_g.sort();

    SymmetricSeeds { fix_phi, fix_g }
}

/// Closed-form |{(x, x) : N(x, x) ≤ R²}| = 2⌊R·cos(θ/2)⌋ + 1 for η = 0:
/// N(x, x) = 4x²/(2 − λ), so the count is the number of integers with
/// x² ≤ R²(2 − λ)/4, and R²cos²(θ/2) = R²(2 − λ)/4.
pub fn fix_phi_count_closed_form(radius_sq: &BigRational, params: &RotationParams) -> u64 {
    let r2 = FieldElement::from_rational(radius_sq);
    let quarter = FieldElement::rational(1, 4).expect("static");
    let bound = &(&r2 * &(&FieldElement::from_int(2) - params.lambda())) * &quarter;
    let k = isqrt(&bound.floor().max(BigInt::zero()));
    (BigInt::from(2) * k + BigInt::one())
        .to_u64()
        .expect("small count")
}

/// The bookkeeping section: exact symmetric-seed counts against their
/// closed forms, the widened band family, trap counts, and the two sides
/// of the orbit-supply versus trap-capacity comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct BookkeepingReport {
    pub radius_sq: BigRational,
    pub fix_phi_count: u64,
    /// 2⌊R·cos(θ/2)⌋ + 1; present only for η = 0 where it is exact.
    pub fix_phi_closed_form: Option<u64>,
    pub fix_g_count: u64,
    /// fix_g_count − R.
    pub fix_g_residual_vs_r: f64,
    /// Widened band −1 ≤ 2x + λy + η < 1 inside the ball.
    pub band2_count: u64,
    /// Sub-band [−1, 0).
    pub band2_neg_count: u64,
    /// Sub-band [0, 1); equals fix_g_count.
    pub band2_pos_count: u64,
    /// For irrational λ at η = 0 the (x,y) ↔ (−x,−y) symmetry forces
    /// neg = pos − 1 exactly (the origin is the pos-side surplus).
    pub band2_symmetry_exact: Option<bool>,
    pub trap_points: u64,
    pub trap_expected: u64,
    pub trap_points_mod_reflection: u64,
    /// trap_points_mod_reflection − (R + R·cos(θ/2)).
    pub trap_mod_reflection_residual: f64,
    /// Symmetric orbit supply |A| + |B|.
    pub lhs_symmetric_seeds: u64,
    /// Trap capacity up to reflection.
    pub rhs_trap_mod_reflection: u64,
    pub gap: i64,
}

pub fn verify_bookkeeping(radius: &RadiusSpec, params: &RotationParams) -> BookkeepingReport {
    let radius_sq = radius.radius_sq.clone();
    let spec = TrapSpec::for_params(radius_sq.clone(), params);
    let tester = Tester::new(&spec, params);
    let seeds = enumerate_symmetric_seeds(&radius_sq, params);
    let fix_phi_count = seeds.fix_phi.len() as u64;
    let fix_g_count = seeds.fix_g.len() as u64;
    let fix_phi_closed_form = if params.has_shift() {
        None
    } else {
        Some(fix_phi_count_closed_form(&radius_sq, params))
    };

    // widened band: for each y exactly one even integer lies in
    // [−λy−η−1, −λy−η+1), giving one x with 2x+λy+η ∈ [−1, 1)
    let (lo, hi) = tester.x_bounds();
    let mut band2_count = 0u64;
    let mut band2_neg_count = 0u64;
    let mut y = lo.clone();
    while y <= hi {
        let n = -params.floor_affine(&BigInt::zero(), &y);
        let (x, neg) = if n.is_even() {
            (&n / BigInt::from(2), false)
        } else {
            ((&n - BigInt::one()) / BigInt::from(2), true)
        };
        if tester.in_ball(&x, &y) {
            band2_count += 1;
            if neg {
                band2_neg_count += 1;
            }
        }
        y += 1;
    }
    let band2_pos_count = band2_count - band2_neg_count;
    debug_assert_eq!(band2_pos_count, fix_g_count);
    let band2_symmetry_exact = if !params.lambda().is_rational() && !params.has_shift() {
        Some(band2_neg_count == band2_pos_count - 1)
    } else {
        None
    };

    let trap_points = trap_states(&spec, params).len() as u64;
    let trap_expected = (BigInt::from(2) * spec.floor_radius() + BigInt::one())
        .to_u64()
        .expect("small count");
    let trap_points_mod_reflection = trap_count_mod_reflection(&spec, params);

    let r = radius.radius_f64();
    let cos_half = (params.theta() / 2.0).cos();
    let lhs_symmetric_seeds = fix_phi_count + fix_g_count;
    let rhs_trap_mod_reflection = trap_points_mod_reflection;

    BookkeepingReport {
        radius_sq,
        fix_phi_count,
        fix_phi_closed_form,
        fix_g_count,
        fix_g_residual_vs_r: fix_g_count as f64 - r,
        band2_count,
        band2_neg_count,
        band2_pos_count,
        band2_symmetry_exact,
        trap_points,
        trap_expected,
        trap_points_mod_reflection,
        trap_mod_reflection_residual: trap_points_mod_reflection as f64 - (r + r * cos_half),
        lhs_symmetric_seeds,
        rhs_trap_mod_reflection,
        gap: lhs_symmetric_seeds as i64 - rhs_trap_mod_reflection as i64,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthPoint {
    pub radius: BigRational,
    pub orbit_count: u64,
    /// True when some seed exhausted the budget, poisoning the count.
    pub poisoned: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthReport {
    pub points: Vec<GrowthPoint>,
    /// min over radii of orbit_count / R; None when every count is poisoned.
    pub empirical_c: Option<BigRational>,
    pub strictly_increasing: bool,
    /// count(R₂) > count(R₁) whenever R₂ ≥ 2R₁.
    pub doubling_growth: bool,
}

/// Count distinct periodic orbits meeting B(R) for each radius and check
/// the linear-growth expectations.
pub fn orbit_growth_check(
    radii: &[BigRational],
    params: &RotationParams,
    budget: &Budget,
) -> GrowthReport {
    let mut radii = radii.to_vec();
    radii.sort();
    let points: Vec<GrowthPoint> = radii
        .iter()
        .map(|r| {
            let report = scan_ball(&RadiusSpec::from_radius(r.clone()), params, budget);
            GrowthPoint {
                radius: r.clone(),
                orbit_count: report.distinct_periodic_orbits(),
                poisoned: !report.unresolved.is_empty(),
            }
        })
        .collect();

    let empirical_c = points
        .iter()
        .filter(|p| !p.poisoned)
        .map(|p| BigRational::from_integer(BigInt::from(p.orbit_count)) / &p.radius)
        .min();

    let strictly_increasing = points
        .windows(2)
        .all(|w| w[1].orbit_count > w[0].orbit_count);

    let mut doubling_growth = true;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[j].radius >= BigRational::from_integer(2.into()) * &points[i].radius
                && points[j].orbit_count <= points[i].orbit_count
            {
                doubling_growth = false;
            }
        }
    }

    GrowthReport {
        points,
        empirical_c,
        strictly_increasing,
        doubling_growth,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueStats {
    pub q: u64,
    pub class_counts: Vec<u64>,
    pub max_deviation_from_uniform: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquidistReport {
    pub floor_r: BigInt,
    pub sample_size: u64,
    /// Number of Y ∈ [−⌊R⌋, ⌊R⌋] with λY/2 mod 1 meeting
    /// [−η/2, (1−η)/2).
    pub ud_count: u64,
    pub ud_fraction: BigRational,
    /// Per-residue-class counts of (λ/2)Y mod 1, for rational λ.
    pub residue_classes: Option<ResidueStats>,
    /// |{i/q mod 1} ∩ [−η/2, (1−η)/2)| for rational λ/2 = u/q.
    pub interval_cardinality: Option<u64>,
}

/// Exact frequency statistics of the mod-one condition over
/// Y ∈ [−⌊R⌋, ⌊R⌋].
///
/// The membership λY/2 mod 1 ∈ [−η/2, (1−η)/2) mod 1 is equivalent to
/// frac(λY/2 + η/2) < 1/2, i.e. to ⌊λY + η⌋ being even — one exact floor
/// per sample.
pub fn equidist_stats(radius: &BigRational, params: &RotationParams) -> EquidistReport {
    let floor_r = isqrt(&(radius * radius).floor().to_integer());
    let n = floor_r.to_i64().expect("radius fits machine word");
    let sample_size = (2 * n + 1) as u64;

    let mut ud_count = 0u64;
    for y in -n..=n {
        if params
            .floor_affine(&BigInt::zero(), &BigInt::from(y))
            .is_even()
        {
            ud_count += 1;
        }
    }
    let ud_fraction = BigRational::new(BigInt::from(ud_count), BigInt::from(sample_size));

    let half_lambda = params
        .lambda()
        .to_rational()
        .map(|r| r / BigRational::from_integer(2.into()));

    let residue_classes = half_lambda.as_ref().map(|hl| {
        let q = hl.denom().to_u64().expect("small denominator");
        let u = hl.numer();
        let qi = BigInt::from(q);
        let mut class_counts = vec![0u64; q as usize];
        for y in -n..=n {
            let class = (u * BigInt::from(y)).mod_floor(&qi).to_u64().unwrap();
            class_counts[class as usize] += 1;
        }
        let uniform = 1.0 / q as f64;
        let max_deviation_from_uniform = class_counts
            .iter()
            .map(|&c| (c as f64 / sample_size as f64 - uniform).abs())
            .fold(0.0, f64::max);
        ResidueStats {
            q,
            class_counts,
            max_deviation_from_uniform,
        }
    });

    let interval_cardinality = half_lambda.as_ref().map(|hl| {
        let q = hl.denom().to_u64().expect("small denominator");
        let mut count = 0u64;
        for i in 0..q {
            // i/q + η/2 has fractional part < 1/2 ⟺ ⌊2i/q + η⌋ even
            let t = &FieldElement::rational(2 * i as i64, q as i64).expect("q > 0") + params.eta();
            if t.floor().is_even() {
                count += 1;
            }
        }
        count
    });

    EquidistReport {
        floor_r,
        sample_size,
        ud_count,
        ud_fraction,
        residue_classes,
        interval_cardinality,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn params(lambda: &str, eta: &str) -> RotationParams {
        RotationParams::from_specs(lambda, eta).unwrap()
    }

    fn st(x: i64, y: i64) -> LatticeState {
        LatticeState::new(x, y)
    }

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn radius(n: i64, d: i64) -> RadiusSpec {
        RadiusSpec::from_radius(rat(n, d))
    }

    #[test]
    fn quarter_turn_census() {
        let p = params("rat:0/1", "rat:0/1");
        let report = scan_ball(&radius(5, 2), &p, &Budget::default());
        assert_eq!(report.meta.scanned_states, 21);
        assert!(report.unresolved.is_empty());
        let expected: BTreeMap<u64, u64> = [(1, 1), (4, 5)].into_iter().collect();
        assert_eq!(report.histogram, expected);
        assert_eq!(report.distinct_periodic_orbits(), 6);
        // the orbits through (2,1) and (1,2) are each other's reversal
        // images and asymmetric; the other four are doubly symmetric
        let doubly = report
            .orbit_reps
            .iter()
            .filter(|r| r.class == SymmetryClass::DoublySymmetric)
            .count();
        let asym = report
            .orbit_reps
            .iter()
            .filter(|r| r.class == SymmetryClass::Asymmetric)
            .count();
        assert_eq!((doubly, asym), (4, 2));
    }

    #[test]
    fn lambda_one_periods() {
        let p = params("rat:1/1", "rat:0/1");
        let report = scan_ball(&radius(5, 2), &p, &Budget::default());
        assert!(report.unresolved.is_empty());
        assert!(report.histogram.keys().all(|&k| k == 1 || k == 3));
    }

    #[test]
    fn half_lambda_census_has_period_seven() {
        let p = params("rat:1/2", "rat:0/1");
        let report = scan_ball(&radius(21, 2), &p, &Budget::default());
        assert!(report.unresolved.is_empty());
        assert!(report.histogram.contains_key(&7));
        // every ball seed resolved into exactly one rep or unresolved entry
        assert!(report.distinct_periodic_orbits() > 0);
    }

    #[test]
    fn symmetric_seed_streams() {
        let p = params("rat:1/2", "rat:0/1");
        let seeds = enumerate_symmetric_seeds(&rat(9, 1), &p);
        assert_eq!(seeds.fix_phi, vec![st(-1, -1), st(0, 0), st(1, 1)]);
        assert_eq!(
            seeds.fix_phi.len() as u64,
            fix_phi_count_closed_form(&rat(9, 1), &p)
        );
        assert!(seeds.fix_g.contains(&st(0, 1)));
        assert!(seeds.fix_g.contains(&st(0, 0)));
        // every fix_g member satisfies the band condition
        for s in &seeds.fix_g {
            assert!(p.in_fix_g(s));
        }
    }

    #[test]
    fn fix_phi_closed_form_matches_enumeration() {
        for (l, r2) in [
            ("rat:1/2", rat(441, 4)),
            ("quad:0,1,1,2", rat(441, 4)),
            ("quad:1,1,2,5", rat(1089, 4)),
            ("rat:-1/1", rat(100, 1)),
        ] {
            let p = params(l, "rat:0/1");
            let seeds = enumerate_symmetric_seeds(&r2, &p);
            assert_eq!(
                seeds.fix_phi.len() as u64,
                fix_phi_count_closed_form(&r2, &p),
                "lambda {l}"
            );
        }
    }

    #[test]
    fn bookkeeping_sections() {
        let p = params("rat:1/2", "rat:0/1");
        let b = verify_bookkeeping(&radius(201, 2), &p);
        assert_eq!(b.trap_points, 201);
        assert_eq!(b.trap_expected, 201);
        assert_eq!(b.fix_phi_closed_form, Some(b.fix_phi_count));
        assert_eq!(b.band2_pos_count, b.fix_g_count);
        // λ rational: no exact band2 symmetry claim
        assert_eq!(b.band2_symmetry_exact, None);
        assert!(b.gap > 0);

        let pq = params("quad:0,1,1,2", "rat:0/1");
        let b = verify_bookkeeping(&radius(201, 2), &pq);
        assert_eq!(b.band2_symmetry_exact, Some(true));
    }

    #[test]
    fn bookkeeping_gap_grows() {
        let p = params("quad:0,1,1,2", "rat:0/1");
        let gaps: Vec<i64> = [rat(51, 2), rat(101, 2), rat(201, 2)]
            .into_iter()
            .map(|r| verify_bookkeeping(&RadiusSpec::from_radius(r), &p).gap)
            .collect();
        assert!(gaps[0] < gaps[1] && gaps[1] < gaps[2], "{gaps:?}");
    }

    #[test]
    fn growth_quarter_turn() {
        let p = params("rat:0/1", "rat:0/1");
        let report = orbit_growth_check(&[rat(5, 2), rat(11, 2)], &p, &Budget::default());
        assert_eq!(report.points[0].orbit_count, 6);
        assert!(report.points[1].orbit_count >= 12);
        assert!(report.strictly_increasing);
        assert!(report.doubling_growth);
        assert!(report.empirical_c.unwrap() > BigRational::zero());
    }

    #[test]
    fn equidist_lambda_one() {
        let p = params("rat:1/1", "rat:0/1");
        let e = equidist_stats(&rat(100, 1), &p);
        // residues alternate {0, 1/2}; exactly the even Y qualify
        assert_eq!(e.sample_size, 201);
        assert_eq!(e.ud_count, 101);
        let stats = e.residue_classes.unwrap();
        assert_eq!(stats.q, 2);
        assert_eq!(stats.class_counts, vec![101, 100]);
        assert_eq!(e.interval_cardinality, Some(1));
    }

    #[test]
    fn equidist_half_lambda_classes() {
        let p = params("rat:1/2", "rat:0/1");
        let e = equidist_stats(&rat(10_000, 1), &p);
        let stats = e.residue_classes.unwrap();
        assert_eq!(stats.q, 4);
        assert!(stats.max_deviation_from_uniform < 1e-3);
    }

    #[test]
    fn equidist_sqrt2_fraction() {
        let p = params("quad:0,1,1,2", "rat:0/1");
        let e = equidist_stats(&rat(1_000, 1), &p);
        let frac = e.ud_fraction.to_f64().unwrap();
        assert!((frac - 0.5).abs() < 1e-2, "fraction {frac}");
        assert!(e.residue_classes.is_none());
    }

    #[test]
    fn partition_independence() {
        let p = params("rat:1/2", "rat:0/1");
        let spec = TrapSpec::for_params(rat(441, 4), &p);
        let seeds = ball_states(&spec, &p);
        let budget = Budget::default();
        let whole = scan_seeds(&seeds, &spec, &p, &budget);
        // any partition merges to the same result
        for chunk in [1usize, 7, 64, 999] {
            let merged = seeds
                .chunks(chunk)
                .map(|c| scan_seeds(c, &spec, &p, &budget))
                .fold(PartialCensus::default(), PartialCensus::merge);
            assert_eq!(merged, whole, "chunk size {chunk}");
        }
        // merge is commutative on disjoint partitions
        let (left, right) = seeds.split_at(seeds.len() / 2);
        let a = scan_seeds(left, &spec, &p, &budget);
        let b = scan_seeds(right, &spec, &p, &budget);
        assert_eq!(a.clone().merge(b.clone()), b.merge(a));
    }

    #[test]
    fn every_ball_seed_is_attributed() {
        // each seed of the ball resolves to exactly one orbit rep (via its
        // canonical state) or one unresolved entry
        let p = params("rat:1/2", "rat:0/1");
        let r = radius(21, 2);
        let report = scan_ball(&r, &p, &Budget::default());
        let spec = TrapSpec::for_params(r.radius_sq.clone(), &p);
        let reps: BTreeSet<&LatticeState> =
            report.orbit_reps.iter().map(|o| &o.canonical).collect();
        for seed in ball_states(&spec, &p) {
            let detected = crate::orbits::detect_period(&seed, &p, &Budget::default());
            let canonical = detected.canonical().expect("resolves");
            assert!(reps.contains(canonical), "seed {seed} not attributed");
        }
        assert!(report.unresolved.is_empty());
    }

    #[test]
    fn determinism_across_runs_and_threads() {
        let p = params("rat:1/2", "rat:0/1");
        let r = radius(21, 2);
        let budget = Budget::default();
        let a = scan_ball(&r, &p, &budget);
        let b = scan_ball(&r, &p, &budget);
        assert_eq!(a, b);
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(|| scan_ball(&r, &p, &budget));
        assert_eq!(a, single);
    }

    #[test]
    fn shifted_census_golden_eta_one() {
        let p = params("quad:1,1,2,5", "rat:1/1");
        let report = scan_ball(&radius(21, 2), &p, &Budget::default());
        assert!(report.unresolved.is_empty());
        // the known asymmetric period-5 orbit passes through this ball
        assert!(report.histogram.contains_key(&5));
        assert!(report
            .orbit_reps
            .iter()
            .any(|r| r.period == 5 && r.class == SymmetryClass::Asymmetric));
    }

    #[test]
    fn reflection_maps_trap_onto_reflected_trap() {
        use crate::geometry::{in_reflected_trap, in_trap};
        let p = params("rat:1/2", "rat:0/1");
        let spec = TrapSpec::new(rat(121, 4));
        let trap: Vec<LatticeState> = trap_states(&spec, &p);
        // enumerate the reflected trap directly over the scan rectangle
        let mut reflected = Vec::new();
        for x in -15i64..=15 {
            for y in -15i64..=15 {
                if in_reflected_trap(&st(x, y), &spec, &p) {
                    reflected.push(st(x, y));
                }
            }
        }
        let swapped: BTreeSet<LatticeState> = trap.iter().map(|s| s.swapped()).collect();
        assert_eq!(swapped, reflected.into_iter().collect());
        for s in &trap {
            assert!(in_trap(s, &spec, &p));
        }
    }
}
