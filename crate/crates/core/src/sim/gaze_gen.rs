//! Synthetic pilot gaze: a seeded attention model standing in for recorded
//! eye-tracker traces.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fatigue::RiskSpot;
use crate::gaze::{CameraModel, GazeKind, GazeSample, InterestList};
use crate::geom::Point;
use crate::preload::AircraftState;
use crate::terrain::HeightField;

use super::scenario::Scenario;

/// Eyelid opening reported while a scripted closure holds the eyes shut.
pub const CLOSED_EYE_OPEN: f64 = 0.05;
/// Samples spent between two points during a saccade.
const SACCADE_STEPS: usize = 3;
/// Minimum jump length of a saccade, screen units.
const SACCADE_MIN_JUMP: f64 = 0.15;
const FIXATION_JITTER: f64 = 0.003;
const DROPOUT_SECONDS: f64 = 0.5;
/// Heading rate above which the pilot may track terrain sliding past.
const PURSUIT_TURN_RATE: f64 = 0.01;

/// Generated samples with the generator's own labels, kept as ground truth
/// for classifier checks.
#[derive(Debug, Clone, PartialEq)]
pub struct GazeTrace {
    pub samples: Vec<GazeSample>,
    pub labels: Vec<GazeKind>,
}

#[derive(Debug, Clone)]
pub struct GazeModel {
    pub camera: CameraModel,
    /// Samples per second.
    pub rate: f64,
    /// Probability that a fixation lands on a visible interest or risk spot.
    pub target_bias: f64,
    /// Probability of a pursuit instead of a fixation while turning.
    pub pursuit_bias: f64,
    /// Mixed into the scenario seed so several trips over one scenario see
    /// different gaze.
    pub salt: u64,
}

impl Default for GazeModel {
    fn default() -> Self {
        Self {
            camera: CameraModel::default(),
            rate: 100.0,
            target_bias: 0.6,
            pursuit_bias: 0.4,
            salt: 0,
        }
    }
}

struct Cursor<'a> {
    rate: f64,
    n: usize,
    samples: Vec<GazeSample>,
    labels: Vec<GazeKind>,
    scenario: &'a Scenario,
}

impl Cursor<'_> {
    fn t(&self) -> f64 {
        self.samples.len() as f64 / self.rate
    }

    fn done(&self) -> bool {
        self.samples.len() >= self.n
    }

    fn push(&mut self, u: f64, v: f64, kind: GazeKind) {
        if self.done() {
            return;
        }
        let t = self.t();
        let closed = self.scenario.fatigue_script.iter().any(|e| e.closed_at(t));
        let mut s = GazeSample::new(t, u.clamp(0.0, 1.0), v.clamp(0.0, 1.0));
        if closed {
            s.eye_open = CLOSED_EYE_OPEN;
        }
        self.samples.push(s);
        self.labels.push(kind);
    }
}

impl GazeModel {
    fn random_point(rng: &mut ChaCha8Rng) -> (f64, f64) {
        (rng.gen_range(0.1..0.9), rng.gen_range(0.35..0.95))
    }

    fn visible_targets(
        &self,
        state: &AircraftState,
        field: &HeightField,
        targets: &[Point],
    ) -> Vec<(f64, f64)> {
        targets
            .iter()
            .filter_map(|p| {
                let z = field.height_at(*p)?;
                self.camera.project(state, Vector3::new(p.x, p.y, z))
            })
            .filter(|(u, v)| (0.05..=0.95).contains(u) && (0.05..=0.95).contains(v))
            .collect()
    }

    /// Generates a trace covering `[0, scenario.duration]` at `self.rate`.
    ///
    /// Fixations favour the on-screen projections of interest and risk
    /// spots, saccades jump between fixations, and during turns the pilot
    /// sometimes follows terrain sweeping across the display. Eye closure
    /// follows the scenario's fatigue script; everything else has the eyes
    /// fully open.
    pub fn generate(
        &self,
        scenario: &Scenario,
        flight: &[AircraftState],
        field: &HeightField,
        interests: &InterestList,
        risk_spots: &[RiskSpot],
    ) -> GazeTrace {
        let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed ^ self.salt.rotate_left(17) ^ 0x6a7e);
        let targets: Vec<Point> = interests
            .spots()
            .iter()
            .map(|s| s.location)
            .chain(risk_spots.iter().map(|r| r.location))
            .collect();
        let mut c = Cursor {
            rate: self.rate,
            n: (scenario.duration * self.rate).round() as usize + 1,
            samples: Vec::new(),
            labels: Vec::new(),
            scenario,
        };
        let mut cur = Self::random_point(&mut rng);
        let mut first = true;
        while !c.done() {
            let state = AircraftState::sample(flight, c.t()).or(flight.last().copied());
            let turning = state.is_some_and(|s| s.turn_rate.abs() > PURSUIT_TURN_RATE);
            let pursue = turning && rng.gen_bool(self.pursuit_bias);

            // Pick where the next event starts and jump there.
            let next = if !pursue && rng.gen_bool(self.target_bias) {
                let visible = state
                    .map(|s| self.visible_targets(&s, field, &targets))
                    .unwrap_or_default();
                if visible.is_empty() {
                    Self::random_point(&mut rng)
                } else {
                    visible[rng.gen_range(0..visible.len())]
                }
            } else {
                Self::random_point(&mut rng)
            };
            let next = if ((next.0 - cur.0).powi(2) + (next.1 - cur.1).powi(2)).sqrt() < SACCADE_MIN_JUMP {
                // Too close to tell apart from drift; jump across the display.
                (1.0 - cur.0, if cur.1 < 0.65 { cur.1 + 0.25 } else { cur.1 - 0.25 })
            } else {
                next
            };
            if !first {
                for i in 1..=SACCADE_STEPS {
                    let f = i as f64 / (SACCADE_STEPS + 1) as f64;
                    c.push(cur.0 + (next.0 - cur.0) * f, cur.1 + (next.1 - cur.1) * f, GazeKind::Saccade);
                }
            }
            first = false;

            if pursue {
                let turn = state.map_or(0.0, |s| s.turn_rate);
                let speed = rng.gen_range(0.4..1.0) * turn.signum();
                let steps = (rng.gen_range(0.3..0.6) * self.rate).round() as usize;
                let travel = speed * steps as f64 / self.rate;
                // Start far enough from the edge that the sweep stays on screen.
                let u0 = if travel > 0.0 {
                    next.0.min(0.95 - travel)
                } else {
                    next.0.max(0.05 - travel)
                };
                for i in 0..steps {
                    c.push(u0 + speed * i as f64 / self.rate, next.1, GazeKind::Pursuit);
                }
                cur = (u0 + travel - speed / self.rate, next.1);
            } else {
                let steps = (rng.gen_range(0.2..0.6) * self.rate).round() as usize;
                for _ in 0..steps {
                    let du = rng.gen_range(-FIXATION_JITTER..FIXATION_JITTER);
                    let dv = rng.gen_range(-FIXATION_JITTER..FIXATION_JITTER);
                    c.push(next.0 + du, next.1 + dv, GazeKind::Fixation);
                }
                cur = next;
            }
        }
        let mut samples = c.samples;
        apply_dropouts(&mut samples, scenario.gaze_dropout_rate, self.rate, &mut rng);
        GazeTrace {
            samples,
            labels: c.labels,
        }
    }
}

/// Marks half-second tracking losses, `per_minute` of them on average.
fn apply_dropouts(samples: &mut [GazeSample], per_minute: f64, rate: f64, rng: &mut ChaCha8Rng) {
    if per_minute <= 0.0 {
        return;
    }
    let p = (per_minute / 60.0 / rate).min(1.0);
    let len = (DROPOUT_SECONDS * rate).round() as usize;
    let mut k = 0;
    while k < samples.len() {
        if rng.gen_bool(p) {
            for s in samples.iter_mut().skip(k).take(len) {
                s.valid = false;
            }
            k += len;
        } else {
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fatigue::{decimate, FatigueConfig, FatigueState};
    use crate::sim::flight::generate_flight;
    use crate::sim::presets::{preset, Preset};
    use crate::sim::scenario::FatigueEpisode;

    fn setup(mut s: Scenario) -> (Scenario, HeightField, Vec<AircraftState>) {
        s.duration = 200.0;
        s.phases = vec![crate::sim::scenario::Phase {
            kind: crate::sim::scenario::PhaseKind::Cruise,
            duration: 200.0,
        }];
        s.incident_script.clear();
        s.fatigue_script.clear();
        let field = s.terrain_field().unwrap();
        let flight = generate_flight(&s, &field, 10.0).unwrap();
        (s, field, flight)
    }

    #[test]
    fn no_script_means_open_eyes() {
        let (s, field, flight) = setup(preset(Preset::Standard, 5));
        let g = GazeModel::default().generate(&s, &flight, &field, &InterestList::new(4), &[]);
        assert_eq!(g.samples.len(), 20_001);
        assert_eq!(g.samples.len(), g.labels.len());
        assert!(g.samples.iter().all(|x| x.eye_open == 1.0 && x.valid));
        assert!(g.samples.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn deterministic_per_seed_and_salt() {
        let (s, field, flight) = setup(preset(Preset::Turny, 5));
        let m = GazeModel::default();
        let a = m.generate(&s, &flight, &field, &InterestList::new(4), &[]);
        let b = m.generate(&s, &flight, &field, &InterestList::new(4), &[]);
        assert_eq!(a, b);
        let other = GazeModel { salt: 1, ..GazeModel::default() };
        assert_ne!(a, other.generate(&s, &flight, &field, &InterestList::new(4), &[]));
        assert!(a.labels.contains(&GazeKind::Pursuit));
    }

    #[test]
    fn perclos_tracks_scripted_closure() {
        let (mut s, field, flight) = setup(preset(Preset::Standard, 5));
        s.fatigue_script = vec![FatigueEpisode { start: 100.0, end: 160.0, closure: 0.6, period: 2.0 }];
        let g = GazeModel::default().generate(&s, &flight, &field, &InterestList::new(4), &[]);
        let cfg = FatigueConfig { window: 60.0, ..FatigueConfig::default() };
        let mut f = FatigueState::default();
        for frame in decimate(&g.samples) {
            let t = frame.timestamp;
            f.update(frame, &cfg);
            if (t - 160.0).abs() < 1e-9 {
                break;
            }
        }
        // 601 frames: 30 cycles of 12 closed / 8 open plus the closed frame at 160 s.
        assert!((f.perclos - 0.6).abs() <= 1.0 / 60.0, "perclos {}", f.perclos);
    }

    #[test]
    fn dropouts_mark_invalid_runs() {
        let (mut s, field, flight) = setup(preset(Preset::Standard, 5));
        s.gaze_dropout_rate = 6.0;
        let g = GazeModel::default().generate(&s, &flight, &field, &InterestList::new(4), &[]);
        let lost = g.samples.iter().filter(|x| !x.valid).count();
        assert!(lost > 0 && lost < g.samples.len() / 5);
    }
}
