//! Two-body Kepler generator for the space-object tracking application.
//!
//! Produces the normalized state trajectories a surrogate model is trained
//! on: time is measured in orbital periods `T_orb` and lengths in Earth radii
//! `R_e`, so a circular low orbit sits near radius 1. Radius, (unwrapped)
//! polar angle, and the radial/transverse velocity components are available
//! as separate 1-D output channels from the same propagator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::Dataset;

/// Which scalar trajectory to emit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    /// Radial distance `r(t)` in Earth radii.
    Radius,
    /// Unwrapped true anomaly `ν(t)` in radians (grows by 2π per period).
    Angle,
    /// `dr/dt` in Earth radii per orbital period.
    RadialVelocity,
    /// `r·dν/dt` in Earth radii per orbital period.
    TransverseVelocity,
}

/// Orbit shape plus the time intervals whose trajectory values are private.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitParams {
    /// Eccentricity `e ∈ [0, 1)`.
    pub eccentricity: f64,
    /// Semi-major axis in Earth radii (> 1, above the surface).
    pub semi_major_axis: f64,
    /// `[t_lo, t_hi]` intervals in orbital-period units.
    pub private_segments: Vec<(f64, f64)>,
}

impl Default for OrbitParams {
    fn default() -> Self {
        OrbitParams {
            eccentricity: 0.1,
            semi_major_axis: 1.1,
            private_segments: vec![(0.4, 0.6), (1.4, 1.6), (2.4, 2.6)],
        }
    }
}

impl OrbitParams {
    pub fn validate(&self, domain: (f64, f64)) -> Result<()> {
        if !(0.0..1.0).contains(&self.eccentricity) {
            return Err(Error::InvalidInput(format!(
                "eccentricity must lie in [0, 1), got {}",
                self.eccentricity
            )));
        }
        if !(self.semi_major_axis.is_finite() && self.semi_major_axis > 1.0) {
            return Err(Error::InvalidInput(format!(
                "semi-major axis must exceed 1 Earth radius, got {}",
                self.semi_major_axis
            )));
        }
        for &(lo, hi) in &self.private_segments {
            if lo >= hi || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "private segment [{lo}, {hi}] is empty"
                )));
            }
            if lo < domain.0 || hi > domain.1 {
                return Err(Error::InvalidInput(format!(
                    "private segment [{lo}, {hi}] outside sampled domain [{}, {}]",
                    domain.0, domain.1
                )));
            }
        }
        Ok(())
    }
}

const KEPLER_TOL: f64 = 1e-12;
const KEPLER_MAX_ITER: usize = 100;

/// Solve Kepler's equation `M = E − e·sin E` for the eccentric anomaly by
/// Newton iteration. Converges in a handful of steps for `e < 1`.
pub fn solve_kepler(mean_anomaly: f64, eccentricity: f64) -> Result<f64> {
    let mut e_anom = if eccentricity > 0.8 {
        std::f64::consts::PI.copysign(mean_anomaly.max(1.0))
    } else {
        mean_anomaly
    };
    for _ in 0..KEPLER_MAX_ITER {
        let f = e_anom - eccentricity * e_anom.sin() - mean_anomaly;
        let df = 1.0 - eccentricity * e_anom.cos();
        let step = f / df;
        e_anom -= step;
        if step.abs() <= KEPLER_TOL {
            return Ok(e_anom);
        }
    }
    Err(Error::NoConvergence(format!(
        "Kepler iteration exceeded {KEPLER_MAX_ITER} steps at M = {mean_anomaly}"
    )))
}

/// Full normalized state at time `t` (in periods):
/// `(r, ν, dr/dt, r·dν/dt)`.
fn state_at(params: &OrbitParams, t: f64) -> Result<(f64, f64, f64, f64)> {
    let e = params.eccentricity;
    let a = params.semi_major_axis;
    let mean_motion = 2.0 * std::f64::consts::PI; // one revolution per period
    let m = mean_motion * t;
    let big_e = solve_kepler(m, e)?;
    let r = a * (1.0 - e * big_e.cos());
    // continuous true anomaly: ν = E + 2·atan2(β sin E, 1 − β cos E)
    let beta = e / (1.0 + (1.0 - e * e).sqrt());
    let nu = big_e + 2.0 * (beta * big_e.sin()).atan2(1.0 - beta * big_e.cos());
    // Ė = n/(1 − e cos E); dr/dt = a·e·sin E·Ė
    let e_dot = mean_motion / (1.0 - e * big_e.cos());
    let r_dot = a * e * big_e.sin() * e_dot;
    // angular momentum h = n·a²·√(1−e²) ⟹ transverse speed h/r
    let v_t = mean_motion * a * a * (1.0 - e * e).sqrt() / r;
    Ok((r, nu, r_dot, v_t))
}

/// Sample `n` evenly spaced times over `domain` and return the requested
/// channel as a dataset. Fully deterministic.
pub fn generate_channel(
    params: &OrbitParams,
    n: usize,
    domain: (f64, f64),
    channel: Channel,
) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::InvalidInput(
            "need at least two sample points".into(),
        ));
    }
    if domain.0 >= domain.1 || !domain.0.is_finite() || !domain.1.is_finite() {
        return Err(Error::InvalidInput("empty time domain".into()));
    }
    params.validate(domain)?;
    let mut points = Vec::with_capacity(n);
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let t = domain.0 + (domain.1 - domain.0) * k as f64 / (n - 1) as f64;
        let (r, nu, r_dot, v_t) = state_at(params, t)?;
        points.push(vec![t]);
        values.push(match channel {
            Channel::Radius => r,
            Channel::Angle => nu,
            Channel::RadialVelocity => r_dot,
            Channel::TransverseVelocity => v_t,
        });
    }
    Dataset::new(points, values)
}

/// Radius channel (the trajectory used by the main application run).
pub fn generate(params: &OrbitParams, n: usize, domain: (f64, f64)) -> Result<Dataset> {
    generate_channel(params, n, domain, Channel::Radius)
}

/// Evenly spaced probe/sensitive points over each private segment.
pub fn segment_grid(segments: &[(f64, f64)], points_per_segment: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for &(lo, hi) in segments {
        if points_per_segment <= 1 {
            out.push(vec![0.5 * (lo + hi)]);
            continue;
        }
        for k in 0..points_per_segment {
            out.push(vec![
                lo + (hi - lo) * k as f64 / (points_per_segment - 1) as f64,
            ]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circular_orbit_has_constant_radius() {
        let params = OrbitParams {
            eccentricity: 0.0,
            semi_major_axis: 1.3,
            private_segments: vec![],
        };
        let data = generate(&params, 31, (0.0, 3.0)).unwrap();
        for &r in data.values() {
            assert!((r - 1.3).abs() <= 1e-12);
        }
    }

    #[test]
    fn radius_is_periodic_with_period_one() {
        let params = OrbitParams::default();
        for k in 0..20 {
            let t = 0.05 * k as f64;
            let (r1, ..) = state_at(&params, t).unwrap();
            let (r2, ..) = state_at(&params, t + 1.0).unwrap();
            assert!((r1 - r2).abs() <= 1e-10, "t = {t}: {r1} vs {r2}");
        }
    }

    #[test]
    fn radius_extrema_match_closed_forms() {
        let params = OrbitParams::default();
        let data = generate(&params, 61, (0.0, 3.0)).unwrap();
        let a = params.semi_major_axis;
        let e = params.eccentricity;
        let min = data.values().iter().cloned().fold(f64::INFINITY, f64::min);
        let max = data
            .values()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(min >= a * (1.0 - e) - 1e-9);
        assert!(max <= a * (1.0 + e) + 1e-9);
        // sampling at t = 0 starts at periapsis exactly
        assert!((data.values()[0] - a * (1.0 - e)).abs() <= 1e-12);
    }

    #[test]
    fn generation_is_deterministic() {
        let params = OrbitParams::default();
        let a = generate(&params, 61, (0.0, 3.0)).unwrap();
        let b = generate(&params, 61, (0.0, 3.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn angle_unwraps_across_periods() {
        let params = OrbitParams::default();
        let data = generate_channel(&params, 61, (0.0, 3.0), Channel::Angle).unwrap();
        let total = data.values().last().unwrap() - data.values().first().unwrap();
        assert!((total - 6.0 * std::f64::consts::PI).abs() <= 1e-9);
        // strictly increasing
        for w in data.values().windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn velocity_channels_are_consistent() {
        // dr/dt from the propagator matches a central difference of r(t)
        let params = OrbitParams::default();
        let h = 1e-6;
        for &t in &[0.13, 0.4, 0.77] {
            let (_, _, r_dot, _) = state_at(&params, t).unwrap();
            let (r_plus, ..) = state_at(&params, t + h).unwrap();
            let (r_minus, ..) = state_at(&params, t - h).unwrap();
            let fd = (r_plus - r_minus) / (2.0 * h);
            assert!((r_dot - fd).abs() <= 1e-6, "t = {t}: {r_dot} vs {fd}");
        }
        // vis-viva with μ = (2π)²·a³ in normalized units:
        // r_dot² + v_t² = μ·(2/r − 1/a)
        let a = params.semi_major_axis;
        let mu = (2.0 * std::f64::consts::PI).powi(2) * a.powi(3);
        for &t in &[0.1, 0.33, 0.5] {
            let (r, _, r_dot, v_t) = state_at(&params, t).unwrap();
            let speed2 = r_dot * r_dot + v_t * v_t;
            let vis_viva = mu * (2.0 / r - 1.0 / a);
            assert!(
                (speed2 - vis_viva).abs() <= 1e-8 * vis_viva,
                "t = {t}: {speed2} vs {vis_viva}"
            );
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let bad_e = OrbitParams {
            eccentricity: 1.0,
            ..OrbitParams::default()
        };
        assert!(generate(&bad_e, 10, (0.0, 3.0)).is_err());
        let bad_seg = OrbitParams {
            private_segments: vec![(2.5, 4.0)],
            ..OrbitParams::default()
        };
        assert!(generate(&bad_seg, 10, (0.0, 3.0)).is_err());
        assert!(generate(&OrbitParams::default(), 1, (0.0, 3.0)).is_err());
    }

    #[test]
    fn segment_grid_covers_segments() {
        let grid = segment_grid(&[(0.4, 0.6), (1.4, 1.6)], 5);
        assert_eq!(grid.len(), 10);
        assert_eq!(grid[0], vec![0.4]);
        assert_eq!(grid[4], vec![0.6]);
        assert_eq!(grid[5], vec![1.4]);
    }
}
