use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fatigue::Obstacle;
use crate::geom::Point;
use crate::terrain::{hf1, HeightField};

use super::terrain_gen::{generate_terrain, TerrainRecipe};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseKind {
    Takeoff,
    Cruise,
    Landing,
}

impl PhaseKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PhaseKind::Takeoff => "takeoff",
            PhaseKind::Cruise => "cruise",
            PhaseKind::Landing => "landing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Phase {
    pub kind: PhaseKind,
    pub duration: f64,
}

/// Scripted eye closure: within `[start, end]` the eyes are shut for
/// `closure` of every `period` seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FatigueEpisode {
    pub start: f64,
    pub end: f64,
    #[serde(default = "default_closure")]
    pub closure: f64,
    #[serde(default = "default_period")]
    pub period: f64,
}

fn default_closure() -> f64 {
    0.8
}

fn default_period() -> f64 {
    2.0
}

impl FatigueEpisode {
    pub fn contains(&self, t: f64) -> bool {
        (self.start..=self.end).contains(&t)
    }

    /// Whether the eyes are closed at `t` under this script.
    pub fn closed_at(&self, t: f64) -> bool {
        if !self.contains(t) {
            return false;
        }
        // The epsilon keeps samples that land on a cycle boundary on the
        // open side regardless of rounding in `t`.
        let phase = ((t - self.start) / self.period).fract();
        phase < self.closure - 1e-9
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum TerrainSource {
    /// Seeded synthetic relief.
    Generated(TerrainRecipe),
    /// An HF1 file; relative paths resolve against the scenario file.
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub seed: u64,
    pub duration: f64,
    /// Cruise altitude above the terrain datum.
    pub cruise_altitude: f64,
    pub cruise_speed: f64,
    /// Ground-relative speed during takeoff and landing.
    pub approach_speed: f64,
    /// Upper bound on the heading rate while steering between waypoints.
    #[serde(default = "default_max_turn_rate")]
    pub max_turn_rate_deg: f64,
    pub phases: Vec<Phase>,
    pub route: Vec<[f64; 2]>,
    #[serde(default)]
    pub fatigue_script: Vec<FatigueEpisode>,
    #[serde(default)]
    pub incident_script: Vec<f64>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    /// Tracking dropouts per minute, each half a second long.
    #[serde(default)]
    pub gaze_dropout_rate: f64,
    pub terrain: TerrainSource,
}

fn default_max_turn_rate() -> f64 {
    3.0
}

impl Scenario {
    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario always serializes")
    }

    /// Loads and validates a scenario; a relative terrain path is rebased
    /// onto the scenario's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut s = Self::from_toml(&text).map_err(|msg| Error::parse(path, msg))?;
        if let TerrainSource::File { path: p } = &mut s.terrain {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        s.validate()?;
        Ok(s)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml()).map_err(|e| Error::io(path, e))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::invalid(format!("scenario {}: {m}", self.name)));
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad("duration must be positive".into());
        }
        if self.phases.is_empty() || self.phases.iter().any(|p| !(p.duration > 0.0)) {
            return bad("phases must be non-empty with positive durations".into());
        }
        let sum: f64 = self.phases.iter().map(|p| p.duration).sum();
        if (sum - self.duration).abs() > 1e-6 * self.duration.max(1.0) {
            return bad(format!("phase durations sum to {sum}, expected {}", self.duration));
        }
        if self.route.len() < 2 || self.route.iter().flatten().any(|c| !c.is_finite()) {
            return bad("route needs at least two finite waypoints".into());
        }
        if self.route[0] == self.route[1] {
            return bad("first route leg has zero length".into());
        }
        if !(self.cruise_speed > 0.0 && self.approach_speed > 0.0) {
            return bad("speeds must be positive".into());
        }
        if !(self.cruise_altitude >= 0.0) || !(self.max_turn_rate_deg > 0.0) {
            return bad("cruise altitude and turn rate must be non-negative".into());
        }
        let in_span = |t: f64| (0.0..=self.duration).contains(&t);
        for e in &self.fatigue_script {
            if !(in_span(e.start) && in_span(e.end) && e.start < e.end) {
                return bad(format!("fatigue episode [{}, {}] outside the run", e.start, e.end));
            }
            if !(0.0..=1.0).contains(&e.closure) || !(e.period > 0.0) {
                return bad("closure must lie in [0, 1] with a positive period".into());
            }
        }
        if let Some(t) = self.incident_script.iter().find(|t| !in_span(**t)) {
            return bad(format!("incident at {t} s outside the run"));
        }
        if !(self.gaze_dropout_rate >= 0.0) {
            return bad("gaze_dropout_rate must be non-negative".into());
        }
        if let TerrainSource::Generated(r) = &self.terrain {
            r.validate()?;
        }
        Ok(())
    }

    pub fn route_points(&self) -> Vec<Point> {
        self.route.iter().map(|&[x, y]| Point::new(x, y)).collect()
    }

    pub fn terrain_field(&self) -> Result<HeightField> {
        match &self.terrain {
            TerrainSource::Generated(r) => generate_terrain(r, self.seed),
            TerrainSource::File { path } => hf1::read(path),
        }
    }

    /// Phase active at `t`; times past the end belong to the last phase.
    pub fn phase_at(&self, t: f64) -> PhaseKind {
        let mut end = 0.0;
        for p in &self.phases {
            end += p.duration;
            if t < end {
                return p.kind;
            }
        }
        self.phases.last().map(|p| p.kind).unwrap_or(PhaseKind::Cruise)
    }

    /// `(kind, start, end)` for every phase.
    pub fn phase_spans(&self) -> Vec<(PhaseKind, f64, f64)> {
        let mut t = 0.0;
        self.phases
            .iter()
            .map(|p| {
                let span = (p.kind, t, t + p.duration);
                t += p.duration;
                span
            })
            .collect()
    }
}
