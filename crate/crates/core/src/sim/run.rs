//! The trace-driven frame loop.

use std::sync::Arc;

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::Result;
use crate::fatigue::{
    decimate, detect_risk_spots, hazardous_interest_spots, merge_spots, obstacle_risk_spots,
    AlertCause, AlertEvent, FatigueState, RiskSpot, WarningEvaluator,
};
use crate::gaze::{classify_gaze, remap_gaze_to_terrain, update_interest_list, InterestList};
use crate::preload::{baseline_set, compute_preload_region, AircraftState, Planner, PreloadCache};
use crate::terrain::{HeightField, TerrainTree};

use super::flight::generate_flight;
use super::gaze_gen::{GazeModel, GazeTrace};
use super::scenario::{PhaseKind, Scenario};

/// Salt of the survey trip that seeds the interest list.
const SURVEY_SALT: u64 = 1;
pub const SURVEY_TRIP: &str = "survey";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameMetrics {
    pub frame: usize,
    pub t: f64,
    pub phase: PhaseKind,
    pub bytes_prediction: u64,
    pub bytes_baseline: u64,
    /// Nodes in this frame's prediction selection.
    pub nodes_loaded: usize,
    pub nodes_baseline: usize,
    pub fatigue_level: f64,
    pub flight_risk: f64,
    pub alerts: usize,
}

/// Byte totals for one flight phase.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PhaseBytes {
    pub frames: usize,
    pub bytes_prediction: u64,
    pub bytes_baseline: u64,
}

impl PhaseBytes {
    pub fn mean_prediction(&self) -> f64 {
        self.bytes_prediction as f64 / self.frames.max(1) as f64
    }

    pub fn mean_baseline(&self) -> f64 {
        self.bytes_baseline as f64 / self.frames.max(1) as f64
    }

    /// Prediction bytes as a fraction of baseline bytes.
    pub fn ratio(&self) -> f64 {
        if self.bytes_baseline == 0 {
            0.0
        } else {
            self.bytes_prediction as f64 / self.bytes_baseline as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioResult {
    pub scenario: String,
    pub seed: u64,
    /// Incidents with an alert inside the reaction window.
    pub detected: usize,
    pub total: usize,
    pub accuracy: f64,
    /// Set when `total == 0` and accuracy is 1 by convention.
    pub accuracy_by_convention: bool,
    /// Fatigue episodes with a fatigue alarm during the episode or its
    /// reaction window.
    pub episodes_alerted: usize,
    pub episodes_total: usize,
    pub fatigue_alerts: usize,
    pub flight_risk_alerts: usize,
    pub frames: usize,
    pub bytes_prediction: u64,
    pub bytes_baseline: u64,
    pub takeoff: PhaseBytes,
    pub cruise: PhaseBytes,
    pub landing: PhaseBytes,
    /// Frames where prediction moved more bytes than the baseline.
    pub dominance_violations: usize,
    pub over_budget_frames: usize,
    pub coarsened_frames: usize,
    pub risk_spots: usize,
    pub interest_spots: usize,
    pub gaze_hits: usize,
    pub gaze_dropped: usize,
}

impl ScenarioResult {
    pub fn phase(&self, kind: PhaseKind) -> &PhaseBytes {
        match kind {
            PhaseKind::Takeoff => &self.takeoff,
            PhaseKind::Cruise => &self.cruise,
            PhaseKind::Landing => &self.landing,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioRun {
    pub result: ScenarioResult,
    pub metrics: Vec<FrameMetrics>,
    pub alerts: Vec<AlertEvent>,
    /// Interest list carried into the next trip.
    pub interests: InterestList,
}

/// Everything about a scenario that does not depend on its fatigue and
/// incident scripts.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub field: Arc<HeightField>,
    pub flight: Vec<AircraftState>,
    /// Interest list in force during the measured trip.
    pub prior: InterestList,
    pub risk_spots: Vec<RiskSpot>,
}

fn gaze_model(cfg: &RunConfig, salt: u64) -> GazeModel {
    GazeModel {
        camera: cfg.camera(),
        rate: cfg.gaze_rate,
        salt,
        ..GazeModel::default()
    }
}

/// Builds terrain and trajectory, derives risk spots, and unless `prior` is
/// given flies an eyes-open survey trip over the same route to seed the
/// interest list.
pub fn prepare(s: &Scenario, cfg: &RunConfig, prior: Option<InterestList>) -> Result<Prepared> {
    s.validate()?;
    cfg.validate()?;
    let field = Arc::new(s.terrain_field()?);
    let flight = generate_flight(s, &field, cfg.frame_rate)?;
    let risk_cfg = cfg.risk();
    let stride = (cfg.frame_rate.round() as usize).max(1);
    let sparse: Vec<AircraftState> = flight.iter().step_by(stride).copied().collect();
    let mut terrain_spots = detect_risk_spots(&field, &sparse, cfg.clearance, &risk_cfg);
    terrain_spots.extend(obstacle_risk_spots(&s.obstacles, &sparse, cfg.clearance, &risk_cfg));

    let prior = match prior {
        Some(list) => list,
        None => {
            let mut survey = s.clone();
            survey.fatigue_script.clear();
            let trace = gaze_model(cfg, SURVEY_SALT).generate(
                &survey,
                &flight,
                &field,
                &InterestList::new(cfg.interest_capacity),
                &terrain_spots,
            );
            let events = classify_gaze(&trace.samples, &cfg.classifier());
            let hits = remap_gaze_to_terrain(&events, &flight, &cfg.camera(), &field).hits;
            update_interest_list(&InterestList::new(cfg.interest_capacity), &hits, SURVEY_TRIP, &cfg.interest())
        }
    };
    let mut spots = terrain_spots;
    spots.extend(hazardous_interest_spots(&field, prior.spots(), &sparse, cfg.clearance, &risk_cfg));
    let risk_spots = merge_spots(spots, risk_cfg.merge_radius);
    Ok(Prepared {
        field,
        flight,
        prior,
        risk_spots,
    })
}

/// Normalized inverse clearance along the next `delta_t` seconds of the
/// current trajectory: 0 at or above `risk_reference_agl`, 1 at or below
/// the terrain.
pub fn flight_risk(field: &HeightField, state: &AircraftState, cfg: &RunConfig) -> f64 {
    let climb = state.speed * state.theta.cos();
    let ground_speed = state.speed * state.theta.sin();
    let min_agl = (0..=4)
        .filter_map(|k| {
            let tau = cfg.delta_t * k as f64 / 4.0;
            let p = state.position + state.forward() * ground_speed * tau;
            field.height_at(p).map(|h| state.altitude + climb * tau - h)
        })
        .fold(f64::INFINITY, f64::min);
    if min_agl.is_infinite() {
        return 0.0;
    }
    (1.0 - min_agl / cfg.risk_reference_agl).clamp(0.0, 1.0)
}

/// Whether the aircraft at `p` is inside some spot's warning range.
pub fn in_warning_range(spots: &[RiskSpot], p: crate::geom::Point) -> bool {
    spots.iter().any(|s| (s.location - p).norm() <= s.warning_range)
}

/// Runs a scenario end to end with a survey-seeded interest list.
pub fn run_scenario(s: &Scenario, cfg: &RunConfig) -> Result<ScenarioRun> {
    let prepared = prepare(s, cfg, None)?;
    run_prepared(s, cfg, &prepared)
}

/// Runs the measured trip: per frame, prediction and baseline preloading
/// through their own caches, fatigue scoring and warning evaluation.
pub fn run_prepared(s: &Scenario, cfg: &RunConfig, p: &Prepared) -> Result<ScenarioRun> {
    s.validate()?;
    let tree = TerrainTree::build(p.field.clone(), cfg.tree_params())?;
    let pcfg = cfg.preload();
    let planner = if cfg.route_aware_lod {
        Planner::with_route(&tree, pcfg, &p.flight)
    } else {
        Planner::new(&tree, pcfg)
    };
    let trace: GazeTrace = gaze_model(cfg, 0).generate(s, &p.flight, &p.field, &p.prior, &p.risk_spots);
    let eye = decimate(&trace.samples);
    let fatigue_cfg = cfg.fatigue();

    let mut prediction = PreloadCache::new(cfg.eviction_frames);
    let mut baseline = PreloadCache::new(cfg.eviction_frames);
    let mut fatigue = FatigueState::default();
    let mut warner = WarningEvaluator::new(cfg.warning());
    let mut metrics = Vec::with_capacity(p.flight.len());
    let mut alerts = Vec::new();
    let (mut over_budget, mut coarsened) = (0, 0);
    let mut next_eye = 0;

    for (frame, state) in p.flight.iter().enumerate() {
        let region = compute_preload_region(state, &pcfg);
        let selection = planner.select(&region, &p.prior);
        let base = baseline_set(&tree, &region);
        let bytes_prediction = prediction.step(&tree, &selection.nodes);
        let bytes_baseline = baseline.step(&tree, &base);
        over_budget += usize::from(selection.over_budget);
        coarsened += usize::from(selection.coarsened > 0);

        while next_eye < eye.len() && eye[next_eye].timestamp <= state.timestamp + 1e-9 {
            fatigue.update(eye[next_eye], &fatigue_cfg);
            next_eye += 1;
        }
        let risk = flight_risk(&p.field, state, cfg);
        let alert = if cfg.suppress_alerts {
            None
        } else {
            warner.evaluate(&fatigue, state, &p.risk_spots, risk)
        };
        metrics.push(FrameMetrics {
            frame,
            t: state.timestamp,
            phase: s.phase_at(state.timestamp),
            bytes_prediction,
            bytes_baseline,
            nodes_loaded: selection.nodes.len(),
            nodes_baseline: base.len(),
            fatigue_level: fatigue.level,
            flight_risk: risk,
            alerts: usize::from(alert.is_some()),
        });
        alerts.extend(alert);
    }

    let events = classify_gaze(&trace.samples, &cfg.classifier());
    let remap = remap_gaze_to_terrain(&events, &p.flight, &cfg.camera(), &p.field);
    let interests = update_interest_list(&p.prior, &remap.hits, &s.name, &cfg.interest());

    let result = summarize(s, cfg, p, &metrics, &alerts, over_budget, coarsened, &remap);
    Ok(ScenarioRun {
        result,
        metrics,
        alerts,
        interests,
    })
}

#[allow(clippy::too_many_arguments)]
fn summarize(
    s: &Scenario,
    cfg: &RunConfig,
    p: &Prepared,
    metrics: &[FrameMetrics],
    alerts: &[AlertEvent],
    over_budget_frames: usize,
    coarsened_frames: usize,
    remap: &crate::gaze::RemapOutcome,
) -> ScenarioResult {
    let w = cfg.reaction_window;
    let detected = s
        .incident_script
        .iter()
        .filter(|&&t| alerts.iter().any(|a| (a.timestamp - t).abs() <= w + 1e-9))
        .count();
    let total = s.incident_script.len();
    let episodes_alerted = s
        .fatigue_script
        .iter()
        .filter(|e| {
            alerts.iter().any(|a| {
                a.cause == AlertCause::FatigueNearRisk
                    && a.timestamp >= e.start
                    && a.timestamp <= e.end + w
            })
        })
        .count();
    let mut phases = [PhaseBytes::default(); 3];
    for m in metrics {
        let slot = &mut phases[m.phase as usize];
        slot.frames += 1;
        slot.bytes_prediction += m.bytes_prediction;
        slot.bytes_baseline += m.bytes_baseline;
    }
    let count = |c: AlertCause| alerts.iter().filter(|a| a.cause == c).count();
    ScenarioResult {
        scenario: s.name.clone(),
        seed: s.seed,
        detected,
        total,
        accuracy: if total == 0 { 1.0 } else { detected as f64 / total as f64 },
        accuracy_by_convention: total == 0,
        episodes_alerted,
        episodes_total: s.fatigue_script.len(),
        fatigue_alerts: count(AlertCause::FatigueNearRisk),
        flight_risk_alerts: count(AlertCause::FlightRisk),
        frames: metrics.len(),
        bytes_prediction: metrics.iter().map(|m| m.bytes_prediction).sum(),
        bytes_baseline: metrics.iter().map(|m| m.bytes_baseline).sum(),
        takeoff: phases[PhaseKind::Takeoff as usize],
        cruise: phases[PhaseKind::Cruise as usize],
        landing: phases[PhaseKind::Landing as usize],
        dominance_violations: metrics
            .iter()
            .filter(|m| m.bytes_prediction > m.bytes_baseline)
            .count(),
        over_budget_frames,
        coarsened_frames,
        risk_spots: p.risk_spots.len(),
        interest_spots: p.prior.len(),
        gaze_hits: remap.hits.len(),
        gaze_dropped: remap.dropped_no_hit + remap.dropped_out_of_trace,
    }
}
