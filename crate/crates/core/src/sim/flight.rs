//! Deterministic flight kinematics for scenarios.

use crate::error::{Error, Result};
use crate::geom::{wrap_angle, Point, Vec2};
use crate::preload::AircraftState;
use crate::terrain::HeightField;

use super::scenario::{PhaseKind, Scenario};

const GRAVITY: f64 = 9.81;
/// Horizontal acceleration limit when changing speed between phases.
const MAX_ACCEL: f64 = 2.0;
/// Proportional heading gain, 1/s.
const STEER_GAIN: f64 = 0.5;
const CAPTURE_RADIUS: f64 = 300.0;

fn heading_towards(d: Vec2) -> f64 {
    (-d.x).atan2(d.y)
}

struct Track {
    position: Point,
    ground_speed: f64,
    heading: f64,
    turn_rate: f64,
}

/// Horizontal track: steer through the waypoints under a turn-rate limit,
/// then continue straight.
fn horizontal_track(s: &Scenario, times: &[f64]) -> Vec<Track> {
    let wps = s.route_points();
    let omega_max = s.max_turn_rate_deg.to_radians();
    let dt = times.get(1).map_or(0.0, |t1| t1 - times[0]);
    let first_speed = |k| match k {
        PhaseKind::Cruise => s.cruise_speed,
        _ => s.approach_speed,
    };
    let mut pos = wps[0];
    let mut heading = heading_towards(wps[1] - wps[0]);
    let mut speed = first_speed(s.phase_at(0.0));
    let mut next = 1;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        while next < wps.len() {
            let to_wp = wps[next] - pos;
            let leg = wps[next] - wps[next - 1];
            if to_wp.norm() < CAPTURE_RADIUS || to_wp.dot(&leg) < 0.0 {
                next += 1;
            } else {
                break;
            }
        }
        let turn_rate = if next < wps.len() {
            let err = wrap_angle(heading_towards(wps[next] - pos) - heading);
            (STEER_GAIN * err).clamp(-omega_max, omega_max)
        } else {
            0.0
        };
        out.push(Track {
            position: pos,
            ground_speed: speed,
            heading,
            turn_rate,
        });
        let target = first_speed(s.phase_at(t));
        speed += (target - speed).clamp(-MAX_ACCEL * dt, MAX_ACCEL * dt);
        heading = wrap_angle(heading + turn_rate * dt);
        pos += Vec2::new(-heading.sin(), heading.cos()) * speed * dt;
    }
    out
}

/// Samples the scenario's trajectory at `frame_rate` Hz from `t = 0` to
/// `t = duration` inclusive.
///
/// Takeoff climbs from the ground under the first waypoint to the cruise
/// altitude, cruise holds altitude, and landing descends to the ground under
/// the final position. A run that starts in cruise starts
/// at cruise altitude.
pub fn generate_flight(
    s: &Scenario,
    field: &HeightField,
    frame_rate: f64,
) -> Result<Vec<AircraftState>> {
    s.validate()?;
    if !(frame_rate > 0.0) {
        return Err(Error::invalid("frame rate must be positive"));
    }
    let n = (s.duration * frame_rate).round() as usize;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 / frame_rate).collect();
    let track = horizontal_track(s, &times);

    let ground = |p: Point| field.height_at(p).unwrap_or(0.0);
    let start_ground = ground(track[0].position);
    let end_ground = ground(track[n].position);
    let takeoff_first = s.phases[0].kind == PhaseKind::Takeoff;
    if takeoff_first && s.cruise_altitude <= start_ground {
        return Err(Error::invalid(format!(
            "scenario {}: cruise altitude {} is below the departure ground {start_ground:.1}",
            s.name, s.cruise_altitude
        )));
    }

    // Vertical profile: altitude at each phase boundary joined by smoothstep
    // arcs, so the climb starts from a ground roll and levels off into
    // cruise, and the descent ends in a flare.
    let mut knots = vec![(0.0, if takeoff_first { start_ground } else { s.cruise_altitude })];
    for (kind, _, end) in s.phase_spans() {
        let alt = match kind {
            PhaseKind::Takeoff | PhaseKind::Cruise => s.cruise_altitude,
            PhaseKind::Landing => end_ground,
        };
        knots.push((end, alt));
    }
    let vertical = |t: f64| -> (f64, f64) {
        let i = knots
            .windows(2)
            .position(|w| t < w[1].0)
            .unwrap_or(knots.len() - 2);
        let ((t0, a0), (t1, a1)) = (knots[i], knots[i + 1]);
        let span = t1 - t0;
        let x = ((t - t0) / span).clamp(0.0, 1.0);
        let ease = x * x * (3.0 - 2.0 * x);
        let slope = 6.0 * x * (1.0 - x) / span;
        (a0 + (a1 - a0) * ease, (a1 - a0) * slope)
    };

    Ok(times
        .iter()
        .zip(&track)
        .map(|(&t, tr)| {
            let (altitude, climb) = vertical(t);
            let speed = tr.ground_speed.hypot(climb);
            AircraftState {
                position: tr.position,
                altitude: altitude.max(0.0),
                speed,
                heading: tr.heading,
                theta: if climb == 0.0 {
                    std::f64::consts::FRAC_PI_2
                } else {
                    (climb / speed).clamp(-1.0, 1.0).acos()
                },
                turn_rate: tr.turn_rate,
                bank: (tr.ground_speed * tr.turn_rate / GRAVITY).atan(),
                timestamp: t,
            }
        })
        .collect())
}
