//! `discrot` — discretized-rotation dynamics on the integer lattice.
//!
//! Exit codes: 0 success, 1 configuration error, 2 unresolved orbits or
//! uncertified enumerations (reports are still written in that case).

mod config;
mod report;
mod svg;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use discrot::census::{equidist_stats, orbit_growth_check, scan_ball, verify_bookkeeping};
use discrot::geometry::{trap_count_conventions, trap_count_mod_reflection, TrapSpec};
use discrot::orbits::{
    classify_symmetry, detect_period, enumerate_orbits_with_period, visit_orbit, Budget,
    OrbitOutcome,
};
use num_traits::ToPrimitive;

use config::{build_params, build_radius, parse_rational, parse_seed, with_threads};
use report::{orbit_reps_csv, rational_text, JsonReport};

#[derive(Parser)]
#[command(
    name = "discrot",
    about = "Discretized rotations on Z^2: exact orbit detection, lattice counts, censuses and figures",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ParamArgs {
    /// Rotation coefficient in (-2,2): `rat:<a>/<c>` or `quad:<a>,<b>,<c>,<d>`
    #[arg(long)]
    lambda: String,
    /// Shift coefficient, same grammar
    #[arg(long, default_value = "rat:0/1")]
    eta: String,
}

#[derive(Args)]
struct RadiusArgs {
    /// Exact rational radius R, e.g. `21/2`
    #[arg(long)]
    radius: Option<String>,
    /// Exact rational squared radius R^2
    #[arg(long)]
    radius_sq: Option<String>,
}

#[derive(Args)]
struct BudgetArgs {
    /// Iteration cap per orbit
    #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_steps: u64,
}

#[derive(Args)]
struct ThreadArgs {
    /// Worker threads (default: all cores); changes runtime only, never output
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Detect the period and symmetry class of one orbit
    Orbit {
        #[command(flatten)]
        params: ParamArgs,
        /// Seed state `x,y`
        #[arg(long, allow_hyphen_values = true)]
        seed: String,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Output format
        #[arg(long, default_value = "text")]
        format: Format,
    },
    /// Scan a ball: period histogram, orbit representatives, counts
    Census {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        radius: RadiusArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        threads: ThreadArgs,
        /// Report JSON path
        #[arg(long, default_value = "census.json")]
        out: PathBuf,
        /// Orbit-representative CSV path (default: JSON path with .csv)
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Count lattice points in the trap region
    Trap {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        radius: RadiusArgs,
        #[command(flatten)]
        threads: ThreadArgs,
        /// Output format
        #[arg(long, default_value = "json")]
        format: DataFormat,
    },
    /// Exact counting bookkeeping: seed streams, band families, trap capacity
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        radius: RadiusArgs,
        #[command(flatten)]
        threads: ThreadArgs,
        /// Output format
        #[arg(long, default_value = "json")]
        format: DataFormat,
    },
    /// Enumerate every orbit of one exact period
    EnumeratePeriod {
        #[command(flatten)]
        params: ParamArgs,
        /// The period to enumerate
        #[arg(long)]
        period: u64,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        threads: ThreadArgs,
        /// Output format
        #[arg(long, default_value = "json")]
        format: DataFormat,
    },
    /// Frequency statistics of the mod-one membership condition
    Equidist {
        #[command(flatten)]
        params: ParamArgs,
        /// Exact rational radius R
        #[arg(long)]
        radius: String,
        /// Output format
        #[arg(long, default_value = "json")]
        format: DataFormat,
    },
    /// Render the trap-region figure as SVG
    Plot {
        #[command(flatten)]
        params: ParamArgs,
        #[command(flatten)]
        radius: RadiusArgs,
        /// Output SVG path
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 800)]
        width: u32,
        #[arg(long, default_value_t = 800)]
        height: u32,
    },
    /// Run the growth check over several radii
    Growth {
        #[command(flatten)]
        params: ParamArgs,
        /// Comma-separated exact rational radii, e.g. `51/2,101/2,201/2`
        #[arg(long)]
        radii: String,
        #[command(flatten)]
        budget: BudgetArgs,
        #[command(flatten)]
        threads: ThreadArgs,
        /// Output format
        #[arg(long, default_value = "json")]
        format: DataFormat,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum DataFormat {
    Json,
    Csv,
}

/// Print a JSON document, or flatten it into `key,value` CSV rows.
fn emit(doc: &serde_json::Value, format: DataFormat) -> Result<()> {
    match format {
        DataFormat::Json => println!("{}", serde_json::to_string_pretty(doc)?),
        DataFormat::Csv => {
            let mut rows = Vec::new();
            flatten_json("", doc, &mut rows);
            println!("key,value");
            for (k, v) in rows {
                println!("{},{}", csv_field(&k), csv_field(&v));
            }
        }
    }
    Ok(())
}

fn flatten_json(prefix: &str, value: &serde_json::Value, rows: &mut Vec<(String, String)>) {
    use serde_json::Value::*;
    match value {
        Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_json(&key, v, rows);
            }
        }
        Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_json(&format!("{prefix}[{i}]"), v, rows);
            }
        }
        Null => rows.push((prefix.to_string(), std::string::String::new())),
        String(s) => rows.push((prefix.to_string(), s.clone())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Orbit {
            params,
            seed,
            budget,
            format,
        } => cmd_orbit(&params, &seed, &budget, format),
        Command::Census {
            params,
            radius,
            budget,
            threads,
            out,
            csv,
        } => cmd_census(&params, &radius, &budget, &threads, out, csv),
        Command::Trap {
            params,
            radius,
            threads,
            format,
        } => cmd_trap(&params, &radius, &threads, format),
        Command::Verify {
            params,
            radius,
            threads,
            format,
        } => cmd_verify(&params, &radius, &threads, format),
        Command::EnumeratePeriod {
            params,
            period,
            budget,
            threads,
            format,
        } => cmd_enumerate_period(&params, period, &budget, &threads, format),
        Command::Equidist {
            params,
            radius,
            format,
        } => cmd_equidist(&params, &radius, format),
        Command::Plot {
            params,
            radius,
            out,
            width,
            height,
        } => cmd_plot(&params, &radius, out, width, height),
        Command::Growth {
            params,
            radii,
            budget,
            threads,
            format,
        } => cmd_growth(&params, &radii, &budget, &threads, format),
    }
}

fn cmd_orbit(params: &ParamArgs, seed: &str, budget: &BudgetArgs, format: Format) -> Result<u8> {
    let p = build_params(&params.lambda, &params.eta)?;
    let seed = parse_seed(seed)?;
    let b = Budget::with_max_steps(budget.max_steps);
    let result = detect_period(&seed, &p, &b);
    match &result.outcome {
        OrbitOutcome::Periodic { period, canonical } => {
            let class = classify_symmetry(&seed, &p, &b)
                .expect("periodic orbit classifies")
                .to_string();
            let orbit: Option<Vec<(String, String)>> = if *period <= 1000 {
                let mut states = Vec::new();
                visit_orbit(&seed, &p, *period, |s| {
                    states.push((s.x.to_string(), s.y.to_string()));
                });
                Some(states)
            } else {
                None
            };
            match format {
                Format::Json => {
                    let doc = json!({
                        "period": period,
                        "symmetry_class": class,
                        "canonical": {"x": canonical.x.to_string(), "y": canonical.y.to_string()},
                        "steps_used": result.steps_used,
                        "max_norm_sq": result.max_norm_sq_seen.to_string(),
                        "orbit": orbit.map(|o| o.into_iter()
                            .map(|(x, y)| json!({"x": x, "y": y}))
                            .collect::<Vec<_>>()),
                    });
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
                Format::Text => {
                    println!("period: {period}");
                    println!("class: {class}");
                    println!("canonical: ({},{})", canonical.x, canonical.y);
                    if let Some(states) = orbit {
                        let rendered: Vec<String> =
                            states.iter().map(|(x, y)| format!("({x},{y})")).collect();
                        println!("orbit: {}", rendered.join(" "));
                    }
                }
            }
            Ok(0)
        }
        OrbitOutcome::Unresolved => {
            match format {
                Format::Json => {
                    let doc = json!({
                        "period": null,
                        "outcome": "UNRESOLVED",
                        "steps_used": result.steps_used,
                        "max_norm_sq": result.max_norm_sq_seen.to_string(),
                    });
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
                Format::Text => {
                    println!("UNRESOLVED after {} steps", result.steps_used);
                    println!("max_norm_sq: {}", result.max_norm_sq_seen);
                }
            }
            Ok(2)
        }
    }
}

fn cmd_census(
    params: &ParamArgs,
    radius: &RadiusArgs,
    budget: &BudgetArgs,
    threads: &ThreadArgs,
    out: PathBuf,
    csv: Option<PathBuf>,
) -> Result<u8> {
    let p = build_params(&params.lambda, &params.eta)?;
    let r = build_radius(radius.radius.as_deref(), radius.radius_sq.as_deref())?;
    let b = Budget::with_max_steps(budget.max_steps);
    let started = std::time::Instant::now();
    let report = with_threads(threads.threads, || scan_ball(&r, &p, &b))?;
    let elapsed = started.elapsed();

    let json = JsonReport::from_census(&report);
    let text = json.to_json_string();
    debug_assert!(
        serde_json::from_str::<JsonReport>(&text)
            .ok()
            .and_then(|j| j.to_census().ok())
            .as_ref()
            == Some(&report),
        "serialized report must re-parse to the in-memory census"
    );
    std::fs::write(&out, text).with_context(|| format!("writing {}", out.display()))?;
    let csv_path = csv.unwrap_or_else(|| out.with_extension("csv"));
    std::fs::write(&csv_path, orbit_reps_csv(&report.orbit_reps))
        .with_context(|| format!("writing {}", csv_path.display()))?;

    // timing goes to stderr only: report bytes stay thread- and
    // machine-independent
    eprintln!(
        "census: {} states, {} orbits, {} unresolved in {:.2?} -> {}, {}",
        report.meta.scanned_states,
        report.orbit_reps.len(),
        report.unresolved.len(),
        elapsed,
        out.display(),
        csv_path.display()
    );
    Ok(if report.unresolved.is_empty() { 0 } else { 2 })
}

fn cmd_trap(
    params: &ParamArgs,
    radius: &RadiusArgs,
    threads: &ThreadArgs,
    format: DataFormat,
) -> Result<u8> {
    let p = build_params(&params.lambda, &params.eta)?;
    let r = build_radius(radius.radius.as_deref(), radius.radius_sq.as_deref())?;
    let spec = TrapSpec::for_params(r.radius_sq.clone(), &p);
    let doc = with_threads(threads.threads, || {
        let (half_open, closed) = trap_count_conventions(&spec, &p);
        let expected = 2 * spec.floor_radius().to_u64().expect("floor radius fits u64") + 1;
        json!({
            "lambda": p.lambda().to_string(),
            "eta": p.eta().to_string(),
            "radius_sq": rational_text(&r.radius_sq),
            "trap_points": half_open,
            "trap_points_closed_segment": closed,
            "expected_two_floor_r_plus_1": expected,
            "trap_points_mod_reflection": trap_count_mod_reflection(&spec, &p),
        })
    })?;
    emit(&doc, format)?;
    Ok(0)
}

fn cmd_verify(
    params: &ParamArgs,
    radius: &RadiusArgs,
    threads: &ThreadArgs,
    format: DataFormat,
) -> Result<u8> {
    let p = build_params(&params.lambda, &params.eta)?;
    let r = build_radius(radius.radius.as_deref(), radius.radius_sq.as_deref())?;
    let book = with_threads(threads.threads, || verify_bookkeeping(&r, &p))?;
    let doc = json!({
        "lambda": p.lambda().to_string(),
        "eta": p.eta().to_string(),
        "radius_sq": rational_text(&book.radius_sq),
        "fix_phi_count": book.fix_phi_count,
        "fix_phi_closed_form": book.fix_phi_closed_form,
        "fix_g_count": book.fix_g_count,
        "fix_g_residual_vs_r": book.fix_g_residual_vs_r,
        "band2_count": book.band2_count,
        "band2_neg_count": book.band2_neg_count,
        "band2_pos_count": book.band2_pos_count,
        "band2_symmetry_exact": book.band2_symmetry_exact,
        "trap_points": book.trap_points,
        "trap_expected": book.trap_expected,
        "trap_points_mod_reflection": book.trap_points_mod_reflection,
        "trap_mod_reflection_residual": book.trap_mod_reflection_residual,
        "lhs_symmetric_seeds": book.lhs_symmetric_seeds,
        "rhs_trap_mod_reflection": book.rhs_trap_mod_reflection,
        "gap": book.gap,
    });
    emit(&doc, format)?;
    Ok(0)
}

fn cmd_enumerate_period(
    params: &ParamArgs,
    period: u64,
    budget: &BudgetArgs,
    threads: &ThreadArgs,
    format: DataFormat,
) -> Result<u8> {
    let p = build_params(&params.lambda, &params.eta)?;
    let b = Budget::with_max_steps(budget.max_steps);
    let e = with_threads(threads.threads, || {
        enumerate_orbits_with_period(period, &p, &b)
    })?
    .map_err(|e| anyhow!("{e}"))?;
    let doc = json!({
        "period": e.period,
        "radius_sq": rational_text(&e.radius_sq),
        "representatives": e.representatives.iter()
            .map(|s| json!({"x": s.x.to_string(), "y": s.y.to_string()}))
            .collect::<Vec<_>>(),
        "complete": e.complete(),
        "unresolved_seeds": e.unresolved_seeds.len(),
    });
    emit(&doc, format)?;
    Ok(if e.complete() { 0 } else { 2 })
}

fn cmd_equidist(params: &ParamArgs, radius: &str, format: DataFormat) -> Result<u8> {
    let p = build_params(&params.lambda, &params.eta)?;
    let r = parse_rational(radius)?;
    let e = equidist_stats(&r, &p);
    let doc = json!({
        "lambda": p.lambda().to_string(),
        "eta": p.eta().to_string(),
        "floor_r": e.floor_r.to_string(),
        "sample_size": e.sample_size,
        "ud_count": e.ud_count,
        "ud_fraction": rational_text(&e.ud_fraction),
        "ud_fraction_float": e.ud_fraction.to_f64(),
        "residue_classes": e.residue_classes.as_ref().map(|s| json!({
            "q": s.q,
            "class_counts": s.class_counts,
            "max_deviation_from_uniform": s.max_deviation_from_uniform,
        })),
        "interval_cardinality": e.interval_cardinality,
    });
    emit(&doc, format)?;
    Ok(0)
}

fn cmd_plot(
    params: &ParamArgs,
    radius: &RadiusArgs,
    out: PathBuf,
    width: u32,
    height: u32,
) -> Result<u8> {
    let p = build_params(&params.lambda, &params.eta)?;
    let r = build_radius(radius.radius.as_deref(), radius.radius_sq.as_deref())?;
    if width == 0 || height == 0 {
        anyhow::bail!("--width and --height must be positive");
    }
    let svg = svg::render_plot(&p, &r, width, height);
    std::fs::write(&out, svg).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("plot -> {}", out.display());
    Ok(0)
}

fn cmd_growth(
    params: &ParamArgs,
    radii: &str,
    budget: &BudgetArgs,
    threads: &ThreadArgs,
    format: DataFormat,
) -> Result<u8> {
    let p = build_params(&params.lambda, &params.eta)?;
    let radii: Vec<_> = radii
        .split(',')
        .map(parse_rational)
        .collect::<Result<_>>()?;
    if radii.is_empty() {
        anyhow::bail!("--radii must name at least one radius");
    }
    let b = Budget::with_max_steps(budget.max_steps);
    let report = with_threads(threads.threads, || orbit_growth_check(&radii, &p, &b))?;
    let poisoned = report.points.iter().any(|pt| pt.poisoned);
    let counts: BTreeMap<String, u64> = report
        .points
        .iter()
        .map(|pt| (rational_text(&pt.radius), pt.orbit_count))
        .collect();
    let doc = json!({
        "lambda": p.lambda().to_string(),
        "eta": p.eta().to_string(),
        "orbit_counts": counts,
        "strictly_increasing": report.strictly_increasing,
        "doubling_growth": report.doubling_growth,
        "empirical_c": report.empirical_c.as_ref().map(rational_text),
        "empirical_c_float": report.empirical_c.as_ref().and_then(|c| c.to_f64()),
    });
    emit(&doc, format)?;
    Ok(if poisoned { 2 } else { 0 })
}
