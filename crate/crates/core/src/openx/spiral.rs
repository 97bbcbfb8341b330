//! Pose integration along lines and clothoid spirals.

use crate::math::{abs, cos, sin, Vec2};

/// Heading along a primitive whose curvature varies linearly from `k0` to `k1`
/// over `length`, at arc length `u` from its start.
pub fn heading_at(hdg: f64, k0: f64, k1: f64, length: f64, u: f64) -> f64 {
    hdg + k0 * u + (k1 - k0) * u * u / (2.0 * length)
}

pub fn curvature_at(k0: f64, k1: f64, length: f64, u: f64) -> f64 {
    if length > 0.0 {
        k0 + (k1 - k0) * u / length
    } else {
        k0
    }
}

fn simpson(a: f64, b: f64, fa: Vec2, fm: Vec2, fb: Vec2) -> Vec2 {
    (fa + fm * 4.0 + fb) * ((b - a) / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> Vec2>(f: &F, a: f64, b: f64, fa: Vec2, fm: Vec2, fb: Vec2, whole: Vec2, tol: f64, depth: u32) -> Vec2 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || (abs(delta.x) <= 15.0 * tol && abs(delta.y) <= 15.0 * tol) {
        return left + right + delta * (1.0 / 15.0);
    }
    adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + adaptive(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// ∫₀ᵘ (cos θ(v), sin θ(v)) dv by adaptive Simpson quadrature to `tol` per axis.
pub fn integrate_direction(hdg: f64, k0: f64, k1: f64, length: f64, u: f64, tol: f64) -> Vec2 {
    if u <= 0.0 {
        return Vec2::ZERO;
    }
    let f = |v: f64| {
        let th = heading_at(hdg, k0, k1, length, v);
        Vec2::new(cos(th), sin(th))
    };
    let (fa, fm, fb) = (f(0.0), f(0.5 * u), f(u));
    let whole = simpson(0.0, u, fa, fm, fb);
    adaptive(&f, 0.0, u, fa, fm, fb, whole, tol, 40)
}

/// Pose at arc length `u` along a primitive starting at `start` with heading `hdg`.
pub fn pose_at(start: Vec2, hdg: f64, k0: f64, k1: f64, length: f64, u: f64, tol: f64) -> (Vec2, f64) {
    let heading = heading_at(hdg, k0, k1, length, u);
    if k0 == 0.0 && k1 == 0.0 {
        return (start + Vec2::from_heading(hdg) * u, heading);
    }
    (start + integrate_direction(hdg, k0, k1, length, u, tol), heading)
}
