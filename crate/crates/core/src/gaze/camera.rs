//! Projection of screen-space gaze onto the terrain.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::interest::GazeHit;
use super::sample::{GazeEvent, GazeKind};
use crate::geom::Point;
use crate::preload::AircraftState;
use crate::terrain::HeightField;

/// Pinhole display camera riding on the aircraft, looking along the
/// heading. Its pitch is the flight-path elevation `pi/2 - theta` plus the
/// fixed `mount_pitch` (negative looks down).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel {
    pub hfov: f64,
    pub vfov: f64,
    pub mount_pitch: f64,
    /// Rays are abandoned after this many meters.
    pub max_range: f64,
}

impl Default for CameraModel {
    fn default() -> Self {
        Self {
            hfov: 60f64.to_radians(),
            vfov: 40f64.to_radians(),
            mount_pitch: -12f64.to_radians(),
            max_range: 60_000.0,
        }
    }
}

impl CameraModel {
    /// World-space ray through screen point `(u, v)`. The direction is unit
    /// length.
    pub fn ray(&self, state: &AircraftState, u: f64, v: f64) -> (Vector3<f64>, Vector3<f64>) {
        let elev = std::f64::consts::FRAC_PI_2 - state.theta + self.mount_pitch;
        let (sh, ch) = state.heading.sin_cos();
        let (se, ce) = elev.sin_cos();
        let forward = Vector3::new(-sh * ce, ch * ce, se);
        let right = Vector3::new(ch, sh, 0.0);
        let up = right.cross(&forward);
        let x = (2.0 * u - 1.0) * (0.5 * self.hfov).tan();
        let y = (1.0 - 2.0 * v) * (0.5 * self.vfov).tan();
        let origin = Vector3::new(state.position.x, state.position.y, state.altitude);
        (origin, (forward + right * x + up * y).normalize())
    }

    /// Screen coordinates of a world point, if it is in front of the camera.
    pub fn project(&self, state: &AircraftState, p: Vector3<f64>) -> Option<(f64, f64)> {
        let elev = std::f64::consts::FRAC_PI_2 - state.theta + self.mount_pitch;
        let (sh, ch) = state.heading.sin_cos();
        let (se, ce) = elev.sin_cos();
        let forward = Vector3::new(-sh * ce, ch * ce, se);
        let right = Vector3::new(ch, sh, 0.0);
        let up = right.cross(&forward);
        let rel = p - Vector3::new(state.position.x, state.position.y, state.altitude);
        let depth = rel.dot(&forward);
        if depth <= 0.0 {
            return None;
        }
        let x = rel.dot(&right) / depth / (0.5 * self.hfov).tan();
        let y = rel.dot(&up) / depth / (0.5 * self.vfov).tan();
        Some((0.5 * (x + 1.0), 0.5 * (1.0 - y)))
    }
}

/// First intersection of a ray with the height field, found by marching at
/// half-cell steps and refining by bisection. `None` when the ray leaves
/// the field or climbs away from it.
pub fn cast_ray(
    field: &HeightField,
    origin: Vector3<f64>,
    dir: Vector3<f64>,
    max_range: f64,
) -> Option<Point> {
    let lo = field.min_elevation();
    let hi = field.max_elevation();
    if dir.z >= 0.0 && origin.z > hi {
        return None;
    }
    let t_start = if origin.z > hi { (origin.z - hi) / -dir.z } else { 0.0 };
    // pad the far end so rounding cannot leave the last sample a hair above
    // the lowest terrain
    let t_end = if dir.z < 0.0 {
        ((origin.z - lo) / -dir.z * (1.0 + 1e-9) + 1e-6).min(max_range)
    } else {
        max_range
    };
    if t_start > t_end {
        return None;
    }
    let at = |t: f64| origin + dir * t;
    let gap = |t: f64| {
        let p = at(t);
        field.height_at(Point::new(p.x, p.y)).map(|h| p.z - h)
    };

    let horizontal = dir.x.hypot(dir.y).max(1e-9);
    let step = (0.5 * field.cell_size() / horizontal).min((t_end - t_start).max(f64::MIN_POSITIVE));
    let mut prev: Option<(f64, f64)> = None;
    let mut t = t_start;
    loop {
        if let Some(g) = gap(t) {
            if g <= 0.0 {
                let (mut a, mut b) = match prev {
                    Some((pt, _)) => (pt, t),
                    None => return Some(Point::new(at(t).x, at(t).y)),
                };
                for _ in 0..64 {
                    let m = 0.5 * (a + b);
                    match gap(m) {
                        Some(g) if g > 0.0 => a = m,
                        _ => b = m,
                    }
                }
                let p = at(b);
                return Some(Point::new(p.x, p.y));
            }
            prev = Some((t, g));
        } else {
            prev = None;
        }
        if t >= t_end {
            return None;
        }
        t = (t + step).min(t_end);
    }
}

/// Gaze events projected onto the terrain.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RemapOutcome {
    pub hits: Vec<GazeHit>,
    /// Rays that never met the terrain (above the horizon or off the map).
    pub dropped_no_hit: usize,
    /// Events whose midpoint falls outside the flight trace.
    pub dropped_out_of_trace: usize,
}

/// Matches each fixation and pursuit to the aircraft state at the event's
/// midpoint and casts the gaze point onto the terrain. Attention is the
/// event duration; saccades are ignored.
pub fn remap_gaze_to_terrain(
    events: &[GazeEvent],
    flight: &[AircraftState],
    cam: &CameraModel,
    field: &HeightField,
) -> RemapOutcome {
    let mut out = RemapOutcome::default();
    for e in events {
        if e.kind == GazeKind::Saccade {
            continue;
        }
        let Some(state) = AircraftState::sample(flight, e.midpoint()) else {
            out.dropped_out_of_trace += 1;
            continue;
        };
        let (o, d) = cam.ray(&state, e.centroid.0, e.centroid.1);
        match cast_ray(field, o, d, cam.max_range) {
            Some(location) => out.hits.push(GazeHit {
                location,
                attention: e.duration(),
            }),
            None => out.dropped_no_hit += 1,
        }
    }
    out
}
