//! Exact dynamics of discretized planar rotations on ℤ².
//!
//! For a coefficient λ ∈ (−2, 2) and a shift η, the map
//!
//! ```text
//! F(x, y) = (y, −⌊x + λy + η⌋)
//! ```
//!
//! is a bijection of ℤ² that discretizes a Euclidean rotation by
//! θ = arccos(−λ/2). This crate implements the map and its reversing
//! involutions over exact arithmetic (rationals and real quadratic
//! irrationals), detects and classifies periodic orbits, counts lattice
//! points in the associated trap region and symmetric-seed families, and
//! runs whole-region censuses with deterministic, mergeable reports.
//!
//! Modules:
//! * [`exact`] — normalized (a + b√d)/c arithmetic with exact sign,
//!   comparison and floor;
//! * [`dynamics`] — the step map, its inverse, the involutions φ and g,
//!   and the three-term membership tests;
//! * [`orbits`] — period detection (plain and symmetry-accelerated),
//!   symmetry classification, complete per-period enumeration;
//! * [`geometry`] — the lattice norm form, ball/trap membership and exact
//!   lattice counts;
//! * [`census`] — ball scans, symmetric-seed streams, counting
//!   bookkeeping, growth and equidistribution statistics.
//!
//! ```
//! use discrot::dynamics::{LatticeState, RotationParams};
//! use discrot::orbits::{detect_period, Budget, OrbitOutcome};
//!
//! let params = RotationParams::from_specs("rat:1/2", "rat:0/1").unwrap();
//! let result = detect_period(&LatticeState::new(1, 0), &params, &Budget::default());
//! match result.outcome {
//!     OrbitOutcome::Periodic { period, .. } => assert_eq!(period, 7),
//!     OrbitOutcome::Unresolved => unreachable!(),
//! }
//! ```

pub mod census;
pub mod dynamics;
pub mod exact;
pub mod geometry;
pub mod orbits;

pub use num_bigint::BigInt;
pub use num_rational::BigRational;
