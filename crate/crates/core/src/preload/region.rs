use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::state::{heading_vector, AircraftState};
use crate::error::{Error, Result};
use crate::geom::{Domain, Point, Triangle, Vec2};

/// Tuning for the view region and the node-selection policy. Angles are in
/// radians here; the on-disk config uses degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreloadConfig {
    /// Default half-angle on each side of the heading.
    pub sigma0: f64,
    /// Look-ahead time in seconds.
    pub delta_t: f64,
    /// Gain applied to `turn_rate * sin(bank)` when widening the view.
    pub eta_gain: f64,
    /// Multiplier on `tan(theta)` in the view-distance rule.
    pub d_gain: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub sigma_floor: f64,
    /// The view half-angles stay at or below `pi/2 - sigma_margin`.
    pub sigma_margin: f64,
    /// Error bound (m) outside interest spots.
    pub base_error: f64,
    /// Error bound (m) inside interest spots.
    pub fine_error: f64,
    pub max_bytes_per_frame: u64,
    /// Viewing distance (m) at which a route-aware planner uses exactly
    /// `base_error`; the bound scales linearly with the closest planned
    /// distance to a node.
    pub lod_reference_agl: f64,
    /// Upper cap on the route-aware bound as a multiple of `base_error`.
    pub lod_max_scale: f64,
    /// Half-width (m) of the corridor around a planned route outside which
    /// nothing is preloaded; 0 disables clipping.
    pub route_corridor: f64,
}

impl Default for PreloadConfig {
    fn default() -> Self {
        Self {
            sigma0: 30f64.to_radians(),
            delta_t: 10.0,
            eta_gain: 5.0,
            d_gain: 0.3,
            theta_min: 5f64.to_radians(),
            theta_max: 85f64.to_radians(),
            sigma_floor: 1f64.to_radians(),
            sigma_margin: 1f64.to_radians(),
            base_error: 8.0,
            fine_error: 1.0,
            max_bytes_per_frame: 64 << 20,
            lod_reference_agl: 250.0,
            lod_max_scale: 16.0,
            route_corridor: 3000.0,
        }
    }
}

impl PreloadConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::invalid(format!("preload config: {what}")))
            }
        };
        check(self.sigma0 > 0.0 && self.sigma0 < FRAC_PI_2, "sigma0 must be in (0, 90) degrees")?;
        check(self.delta_t > 0.0, "delta_t must be positive")?;
        check(self.d_gain >= 0.0, "d_gain must be non-negative")?;
        check(
            self.theta_min > 0.0 && self.theta_min <= self.theta_max && self.theta_max < FRAC_PI_2,
            "theta clamp must satisfy 0 < min <= max < 90 degrees",
        )?;
        check(
            self.sigma_floor > 0.0
                && self.sigma_margin > 0.0
                && self.sigma_floor < FRAC_PI_2 - self.sigma_margin,
            "sigma clamp is empty",
        )?;
        check(self.fine_error >= 0.0, "fine_error must be non-negative")?;
        check(self.fine_error <= self.base_error, "fine_error must not exceed base_error")?;
        check(self.lod_reference_agl > 0.0, "lod_reference_agl must be positive")?;
        check(self.lod_max_scale >= 1.0, "lod_max_scale must be >= 1")?;
        check(self.route_corridor >= 0.0, "route_corridor must be non-negative")?;
        Ok(())
    }
}

/// Ground triangle ahead of the aircraft: apex at the aircraft, extending
/// `distance` along the heading and opening by `sigma_l` / `sigma_r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PreloadRegion {
    pub apex: Point,
    pub heading: f64,
    pub distance: f64,
    pub sigma_l: f64,
    pub sigma_r: f64,
    pub area: f64,
}

impl PreloadRegion {
    pub fn new(apex: Point, heading: f64, distance: f64, sigma_l: f64, sigma_r: f64) -> Self {
        let area = distance * distance * (sigma_l.tan() + sigma_r.tan()) / 2.0;
        Self {
            apex,
            heading,
            distance,
            sigma_l,
            sigma_r,
            area,
        }
    }

    fn left(&self) -> Vec2 {
        let f = heading_vector(self.heading);
        Vec2::new(-f.y, f.x)
    }

    pub fn far_left(&self) -> Point {
        let f = heading_vector(self.heading);
        self.apex + f * self.distance + self.left() * (self.distance * self.sigma_l.tan())
    }

    pub fn far_right(&self) -> Point {
        let f = heading_vector(self.heading);
        self.apex + f * self.distance - self.left() * (self.distance * self.sigma_r.tan())
    }

    pub fn triangle(&self) -> Triangle {
        Triangle([self.apex, self.far_left(), self.far_right()])
    }
}

/// View region for the current state. The view distance is
/// `d_gain * tan(theta_c) * (h + v * delta_t * cos(theta))` with `theta_c`
/// clamped away from the vertical and horizontal, and the half-angles widen
/// toward the side the aircraft is turning to.
pub fn compute_preload_region(state: &AircraftState, cfg: &PreloadConfig) -> PreloadRegion {
    let theta_c = state.theta.clamp(cfg.theta_min, cfg.theta_max);
    let reach = state.altitude + state.speed * cfg.delta_t * state.theta.cos();
    let distance = (cfg.d_gain * theta_c.tan() * reach).max(0.0);

    let widen = cfg.eta_gain * (state.turn_rate * state.bank.sin());
    let hi = FRAC_PI_2 - cfg.sigma_margin;
    let sigma_l = (cfg.sigma0 + widen).clamp(cfg.sigma_floor, hi);
    let sigma_r = (cfg.sigma0 - widen).clamp(cfg.sigma_floor, hi);

    PreloadRegion::new(state.position, state.heading, distance, sigma_l, sigma_r)
}

/// Axis-aligned bounding box of the region's triangle.
pub fn region_to_domain(region: &PreloadRegion) -> Domain {
    region.triangle().bounding_box()
}
