//! SVG rendering of the ball, the trap band, the lattice and its trap
//! points, and the reflection axis.

use std::fmt::Write as _;

use discrot::census::RadiusSpec;
use discrot::dynamics::{LatticeState, RotationParams};
use discrot::geometry::{embed_real, trap_states, TrapSpec};

const ARC_SAMPLES: usize = 128;

/// Render the trap-region picture for the given parameters and radius.
/// The returned document contains exactly `trap_count` markers with
/// `class="trap"`.
pub fn render_plot(
    params: &RotationParams,
    radius: &RadiusSpec,
    width: u32,
    height: u32,
) -> String {
    let r = radius.radius_f64();
    let theta = params.theta();
    let sin_theta = theta.sin();
    let cot_theta = theta.cos() / sin_theta;
    let shifted = params.has_shift();
    let spec = TrapSpec::for_params(radius.radius_sq.clone(), params);

    // plane window [-w, w]^2 mapped onto the pixel viewport
    let w = r + 2.0;
    let scale = f64::from(width.min(height)) / (2.0 * w);
    let cx = f64::from(width) / 2.0;
    let cy = f64::from(height) / 2.0;
    let px = |x: f64, y: f64| (cx + x * scale, cy - y * scale);

    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    )
    .unwrap();
    writeln!(
        out,
        r#"  <rect width="{width}" height="{height}" fill="white"/>"#
    )
    .unwrap();

    // band = swept ball minus ball, shaded with an even-odd path
    let band_vec: (f64, f64) = (cot_theta, 1.0);
    let angle_v = band_vec.1.atan2(band_vec.0);
    let mut path = String::new();
    for i in 0..=ARC_SAMPLES {
        // front arc: outward normals with positive component along the band
        let t = angle_v - std::f64::consts::FRAC_PI_2
            + std::f64::consts::PI * i as f64 / ARC_SAMPLES as f64;
        let (x, y) = (r * t.cos() + band_vec.0, r * t.sin() + band_vec.1);
        let (x, y) = px(x, y);
        let cmd = if i == 0 { 'M' } else { 'L' };
        write!(path, "{cmd}{x:.2} {y:.2} ").unwrap();
    }
    for i in 0..=ARC_SAMPLES {
        // back arc of the unshifted circle
        let t = angle_v
            + std::f64::consts::FRAC_PI_2
            + std::f64::consts::PI * i as f64 / ARC_SAMPLES as f64;
        let (x, y) = px(r * t.cos(), r * t.sin());
        write!(path, "L{x:.2} {y:.2} ").unwrap();
    }
    path.push('Z');
    // subtract the ball via even-odd fill
    let (bx, by) = px(-r, 0.0);
    write!(
        path,
        " M{bx:.2} {by:.2} a{rr:.2} {rr:.2} 0 1 0 {d:.2} 0 a{rr:.2} {rr:.2} 0 1 0 -{d:.2} 0 Z",
        rr = r * scale,
        d = 2.0 * r * scale
    )
    .unwrap();
    writeln!(
        out,
        r##"  <path class="trap-band" d="{path}" fill="#f3c14b" fill-opacity="0.35" fill-rule="evenodd" stroke="none"/>"##
    )
    .unwrap();

    // ball outline
    let (ox, oy) = px(0.0, 0.0);
    writeln!(
        out,
        r##"  <circle class="ball" cx="{ox:.2}" cy="{oy:.2}" r="{:.2}" fill="none" stroke="#555" stroke-width="1"/>"##,
        r * scale
    )
    .unwrap();

    // reflection axis along (-sin(theta/2), cos(theta/2))
    let (ax, ay) = (-(theta / 2.0).sin(), (theta / 2.0).cos());
    let (x1, y1) = px(-w * ax, -w * ay);
    let (x2, y2) = px(w * ax, w * ay);
    writeln!(
        out,
        r##"  <line class="axis" x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="#888" stroke-width="0.8" stroke-dasharray="6 4"/>"##
    )
    .unwrap();

    // lattice points whose embedding lands in the window
    let kappa = if shifted {
        params.kappa().to_f64()
    } else {
        0.0
    };
    let y_lo = (-w - kappa - 1.0).floor() as i64;
    let y_hi = (w - kappa + 1.0).ceil() as i64;
    for y in y_lo..=y_hi {
        // ex = -(x+kappa)/sin + (y+kappa)cot: solve |ex| <= w for x
        let base = (y as f64 + kappa) * theta.cos();
        let x_lo = (base - w * sin_theta - kappa - 1.0).floor() as i64;
        let x_hi = (base + w * sin_theta - kappa + 1.0).ceil() as i64;
        for x in x_lo..=x_hi {
            let (ex, ey) = embed_real(&LatticeState::new(x, y), params, shifted);
            if ex.abs() > w || ey.abs() > w {
                continue;
            }
            let (px_, py_) = px(ex, ey);
            writeln!(
                out,
                r##"  <circle class="lattice" cx="{px_:.2}" cy="{py_:.2}" r="1.5" fill="#3366aa"/>"##
            )
            .unwrap();
        }
    }

    // trap points, highlighted
    for s in trap_states(&spec, params) {
        let (ex, ey) = embed_real(&s, params, shifted);
        let (px_, py_) = px(ex, ey);
        writeln!(
            out,
            r##"  <circle class="trap" cx="{px_:.2}" cy="{py_:.2}" r="3" fill="#cc2222"/>"##
        )
        .unwrap();
    }

    out.push_str("</svg>\n");
    out
}
