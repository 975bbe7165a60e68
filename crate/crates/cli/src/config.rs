//! Parsing and validation of command-line values. Everything is checked
//! before any computation starts; failures exit with code 1.

use anyhow::{anyhow, bail, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;

use discrot::census::RadiusSpec;
use discrot::dynamics::{LatticeState, RotationParams};

/// Exact rational text: `7`, `21/2`, `-3/4`. Decimal-point radii are
/// rejected so that every predicate downstream stays exact.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    if text.contains('.') {
        bail!("`{text}` looks like a float; pass an exact rational such as 21/2");
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| anyhow!("cannot parse `{text}` as a rational"))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| anyhow!("cannot parse `{text}` as a rational"))?;
    if !den.is_positive() {
        bail!("denominator of `{text}` must be positive");
    }
    Ok(BigRational::new(num, den))
}

/// A seed `x,y` of integers.
pub fn parse_seed(text: &str) -> Result<LatticeState> {
    let (x, y) = text
        .split_once(',')
        .ok_or_else(|| anyhow!("seed must be `x,y`, got `{text}`"))?;
    let x: BigInt = x
        .trim()
        .parse()
        .map_err(|_| anyhow!("seed x `{x}` is not an integer"))?;
    let y: BigInt = y
        .trim()
        .parse()
        .map_err(|_| anyhow!("seed y `{y}` is not an integer"))?;
    Ok(LatticeState { x, y })
}

pub fn build_params(lambda: &str, eta: &str) -> Result<RotationParams> {
    let lambda = lambda.parse().map_err(|e| anyhow!("--lambda: {e}"))?;
    let eta = eta.parse().map_err(|e| anyhow!("--eta: {e}"))?;
    RotationParams::new(lambda, eta).map_err(|e| anyhow!("invalid parameters: {e}"))
}

/// Exactly one of `--radius` / `--radius-sq`, both exact rationals.
pub fn build_radius(radius: Option<&str>, radius_sq: Option<&str>) -> Result<RadiusSpec> {
    match (radius, radius_sq) {
        (Some(r), None) => {
            let r = parse_rational(r)?;
            if !r.is_positive() {
                bail!("--radius must be positive");
            }
            Ok(RadiusSpec::from_radius(r))
        }
        (None, Some(r2)) => {
            let r2 = parse_rational(r2)?;
            if !r2.is_positive() {
                bail!("--radius-sq must be positive");
            }
            Ok(RadiusSpec::from_radius_sq(r2))
        }
        (None, None) => bail!("one of --radius or --radius-sq is required"),
        (Some(_), Some(_)) => bail!("--radius and --radius-sq are mutually exclusive"),
    }
}

/// Run `f` on a rayon pool of the requested size (or the default pool).
/// Thread count affects runtime only, never output.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(0) => bail!("--threads must be at least 1"),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| anyhow!("cannot build thread pool: {e}"))?;
            Ok(pool.install(f))
        }
    }
}
