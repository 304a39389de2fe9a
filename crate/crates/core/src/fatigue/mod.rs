//! Eye-tracking fatigue alert: windowed fatigue scoring over decimated eye
//! frames, terrain risk spots along the route, and the alarm that fires when
//! a tired pilot flies into a spot's warning range.

mod eye;
mod risk;
mod warning;

pub use eye::{decimate, EyeFrame, FatigueConfig, FatigueState, DECIMATION};
pub use risk::{
    detect_risk_spots, hazardous_interest_spots, merge_spots, obstacle_risk_spots, Obstacle,
    RiskConfig, RiskKind, RiskSpot,
};
pub use warning::{write_alert_log, AlertCause, AlertEvent, WarningConfig, WarningEvaluator};
