use serde::{Deserialize, Serialize};

use crate::geom::{wrap_angle, Point, Vec2};

/// Kinematic state of the aircraft at one instant.
///
/// Heading is measured counter-clockwise from +Y, so a positive turn rate is
/// a left turn and a positive bank lowers the left wing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AircraftState {
    pub position: Point,
    /// Meters above the terrain datum.
    pub altitude: f64,
    /// Meters per second along the flight path.
    pub speed: f64,
    pub heading: f64,
    /// Angle between the velocity vector and the local vertical, in
    /// `[0, pi]`; `pi / 2` is level flight.
    pub theta: f64,
    /// Signed heading rate in radians per second.
    pub turn_rate: f64,
    pub bank: f64,
    pub timestamp: f64,
}

impl AircraftState {
    pub fn level(position: Point, altitude: f64, speed: f64, heading: f64) -> Self {
        Self {
            position,
            altitude,
            speed,
            heading,
            theta: std::f64::consts::FRAC_PI_2,
            turn_rate: 0.0,
            bank: 0.0,
            timestamp: 0.0,
        }
    }

    /// Unit ground-plane vector along the heading.
    pub fn forward(&self) -> Vec2 {
        heading_vector(self.heading)
    }

    pub fn is_valid(&self) -> bool {
        self.altitude >= 0.0
            && self.speed >= 0.0
            && (0.0..=std::f64::consts::PI).contains(&self.theta)
            && self.position.x.is_finite()
            && self.position.y.is_finite()
    }

    /// Linear interpolation between two states; heading takes the short way
    /// round.
    pub fn lerp(a: &Self, b: &Self, t: f64) -> Self {
        let mix = |x: f64, y: f64| x + (y - x) * t;
        Self {
            position: a.position + (b.position - a.position) * t,
            altitude: mix(a.altitude, b.altitude),
            speed: mix(a.speed, b.speed),
            heading: wrap_angle(a.heading + wrap_angle(b.heading - a.heading) * t),
            theta: mix(a.theta, b.theta),
            turn_rate: mix(a.turn_rate, b.turn_rate),
            bank: mix(a.bank, b.bank),
            timestamp: mix(a.timestamp, b.timestamp),
        }
    }

    /// State at time `t` from a trace sorted by timestamp, or `None` when `t`
    /// is outside the trace.
    pub fn sample(trace: &[Self], t: f64) -> Option<Self> {
        let first = trace.first()?;
        let last = trace.last()?;
        if t < first.timestamp || t > last.timestamp {
            return None;
        }
        let k = trace.partition_point(|s| s.timestamp <= t);
        if k == 0 {
            return Some(*first);
        }
        if k >= trace.len() {
            return Some(*last);
        }
        let (a, b) = (&trace[k - 1], &trace[k]);
        let span = b.timestamp - a.timestamp;
        let frac = if span > 0.0 { (t - a.timestamp) / span } else { 0.0 };
        Some(Self::lerp(a, b, frac))
    }
}

pub fn heading_vector(heading: f64) -> Vec2 {
    Vec2::new(-heading.sin(), heading.cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heading_convention() {
        let f = heading_vector(0.0);
        assert_eq!((f.x, f.y), (-0.0, 1.0));
        let w = heading_vector(std::f64::consts::FRAC_PI_2);
        assert!((w.x + 1.0).abs() < 1e-15 && w.y.abs() < 1e-15);
    }

    #[test]
    fn sampling_interpolates() {
        let mut a = AircraftState::level(Point::new(0.0, 0.0), 100.0, 50.0, 3.0);
        let mut b = AircraftState::level(Point::new(10.0, 0.0), 200.0, 50.0, -3.0);
        a.timestamp = 1.0;
        b.timestamp = 2.0;
        let trace = [a, b];
        let m = AircraftState::sample(&trace, 1.5).unwrap();
        assert!((m.position.x - 5.0).abs() < 1e-12);
        assert!((m.altitude - 150.0).abs() < 1e-12);
        // 3.0 -> -3.0 crosses pi, so the midpoint sits near pi
        assert!((m.heading.abs() - std::f64::consts::PI).abs() < 1e-9);
        assert!(AircraftState::sample(&trace, 0.5).is_none());
        assert_eq!(AircraftState::sample(&trace, 2.0).unwrap(), b);
    }
}
