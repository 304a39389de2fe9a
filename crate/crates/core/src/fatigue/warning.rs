use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::eye::FatigueState;
use super::risk::RiskSpot;
use crate::error::{Error, Result};
use crate::preload::AircraftState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlertCause {
    FatigueNearRisk,
    FlightRisk,
}

impl AlertCause {
    pub fn as_str(&self) -> &'static str {
        match self {
            AlertCause::FatigueNearRisk => "fatigue_near_risk",
            AlertCause::FlightRisk => "flight_risk",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlertEvent {
    pub timestamp: f64,
    pub cause: AlertCause,
    pub fatigue_level: f64,
    /// Present exactly when `cause` is `FatigueNearRisk`.
    pub spot: Option<RiskSpot>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WarningConfig {
    pub fatigue_threshold: f64,
    pub risk_threshold: f64,
    /// Minimum seconds between two alerts.
    pub cooldown: f64,
}

impl Default for WarningConfig {
    fn default() -> Self {
        Self {
            fatigue_threshold: 0.5,
            risk_threshold: 0.8,
            cooldown: 10.0,
        }
    }
}

/// Decides, frame by frame, whether to alert the pilot. Must be fed states
/// in time order.
#[derive(Debug, Clone, Default)]
pub struct WarningEvaluator {
    cfg: WarningConfig,
    last_alert: Option<f64>,
}

impl WarningEvaluator {
    pub fn new(cfg: WarningConfig) -> Self {
        Self {
            cfg,
            last_alert: None,
        }
    }

    /// A fatigue alarm needs the aircraft inside some spot's warning range
    /// while the fatigue level is above threshold; it names the nearest such
    /// spot. Otherwise a high flight risk raises a plain risk alert.
    pub fn evaluate(
        &mut self,
        fatigue: &FatigueState,
        state: &AircraftState,
        spots: &[RiskSpot],
        flight_risk: f64,
    ) -> Option<AlertEvent> {
        if let Some(last) = self.last_alert {
            if state.timestamp - last < self.cfg.cooldown {
                return None;
            }
        }
        let alert = if fatigue.level > self.cfg.fatigue_threshold {
            spots
                .iter()
                .map(|s| (s, (s.location - state.position).norm()))
                .filter(|(s, d)| *d <= s.warning_range)
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(s, _)| AlertEvent {
                    timestamp: state.timestamp,
                    cause: AlertCause::FatigueNearRisk,
                    fatigue_level: fatigue.level,
                    spot: Some(*s),
                })
        } else {
            None
        };
        let alert = alert.or_else(|| {
            (flight_risk > self.cfg.risk_threshold).then(|| AlertEvent {
                timestamp: state.timestamp,
                cause: AlertCause::FlightRisk,
                fatigue_level: fatigue.level,
                spot: None,
            })
        });
        if alert.is_some() {
            self.last_alert = Some(state.timestamp);
        }
        alert
    }
}

/// Writes alerts as CSV `t,cause,level,spot_x,spot_y`; spot columns are
/// empty for alerts without a spot.
pub fn write_alert_log(path: &Path, alerts: &[AlertEvent]) -> Result<()> {
    let mut out = String::from("t,cause,level,spot_x,spot_y\n");
    for a in alerts {
        let (x, y) = match a.spot {
            Some(s) => (format!("{:.3}", s.location.x), format!("{:.3}", s.location.y)),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{:.3},{},{:.6},{x},{y}\n",
            a.timestamp,
            a.cause.as_str(),
            a.fatigue_level
        ));
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(out.as_bytes()))
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fatigue::RiskKind;
    use crate::geom::Point;

    fn fatigue(level: f64) -> FatigueState {
        let mut f = FatigueState::default();
        f.level = level;
        f
    }

    fn spot(x: f64, range: f64) -> RiskSpot {
        RiskSpot {
            location: Point::new(x, 0.0),
            kind: RiskKind::Terrain,
            clearance_violation: range / 10.0,
            warning_range: range,
        }
    }

    fn at(t: f64) -> AircraftState {
        let mut s = AircraftState::level(Point::origin(), 1000.0, 100.0, 0.0);
        s.timestamp = t;
        s
    }

    #[test]
    fn quiet_when_nothing_is_wrong() {
        let mut w = WarningEvaluator::default();
        assert!(w.evaluate(&fatigue(0.9), &at(0.0), &[spot(5000.0, 1000.0)], 0.0).is_none());
        assert!(w.evaluate(&fatigue(0.0), &at(0.0), &[], 0.0).is_none());
    }

    #[test]
    fn fatigue_near_spot_names_nearest() {
        let mut w = WarningEvaluator::default();
        let spots = [spot(800.0, 1000.0), spot(300.0, 1000.0), spot(50.0, 10.0)];
        let a = w.evaluate(&fatigue(0.9), &at(1.0), &spots, 0.0).unwrap();
        assert_eq!(a.cause, AlertCause::FatigueNearRisk);
        assert_eq!(a.spot.unwrap().location.x, 300.0);
    }

    #[test]
    fn alert_fatigue_falls_back_to_flight_risk() {
        let mut w = WarningEvaluator::default();
        let a = w.evaluate(&fatigue(0.1), &at(1.0), &[spot(0.0, 1000.0)], 0.9).unwrap();
        assert_eq!(a.cause, AlertCause::FlightRisk);
        assert!(a.spot.is_none());
    }

    #[test]
    fn cooldown_limits_rate() {
        let mut w = WarningEvaluator::default();
        let spots = [spot(0.0, 1000.0)];
        let times: Vec<f64> = (0..300)
            .map(|k| k as f64 * 0.1)
            .filter(|t| w.evaluate(&fatigue(1.0), &at(*t), &spots, 0.0).is_some())
            .collect();
        assert_eq!(times.len(), 3);
        assert!(times.windows(2).all(|p| p[1] - p[0] >= 10.0 - 1e-9));
    }

    #[test]
    fn alert_log_format() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("alerts.csv");
        let alerts = [
            AlertEvent {
                timestamp: 1.5,
                cause: AlertCause::FatigueNearRisk,
                fatigue_level: 0.75,
                spot: Some(spot(20.0, 1000.0)),
            },
            AlertEvent {
                timestamp: 12.0,
                cause: AlertCause::FlightRisk,
                fatigue_level: 0.1,
                spot: None,
            },
        ];
        write_alert_log(&p, &alerts).unwrap();
        assert_eq!(
            std::fs::read_to_string(&p).unwrap(),
            "t,cause,level,spot_x,spot_y\n1.500,fatigue_near_risk,0.750000,20.000,0.000\n12.000,flight_risk,0.100000,,\n"
        );
    }
}
