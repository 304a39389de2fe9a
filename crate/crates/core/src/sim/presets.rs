//! Built-in scenario families.

use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::geom::Vec2;

use super::flight::generate_flight;
use super::run::{in_warning_range, prepare};
use super::scenario::{FatigueEpisode, Phase, PhaseKind, Scenario, TerrainSource};
use super::terrain_gen::{Peak, TerrainRecipe};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Takeoff, cruise with gentle turns, landing; no fatigue.
    Standard,
    /// Like standard but zig-zagging through sharp turns.
    Turny,
    /// Ridges beside the route, with deep eye closure around incidents
    /// placed while the aircraft is within warning range of a risk spot.
    FatigueHeavy,
    /// Same terrain as fatigue-heavy, but every closure episode and
    /// incident lies out of warning range.
    FatigueControl,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Standard,
        Preset::Turny,
        Preset::FatigueHeavy,
        Preset::FatigueControl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Standard => "standard",
            Preset::Turny => "turny",
            Preset::FatigueHeavy => "fatigue-heavy",
            Preset::FatigueControl => "fatigue-control",
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset {s:?}"))
    }
}

/// Cruise altitude above the datum. The six-minute desk run compresses a
/// one-hour flight tenfold at unchanged speeds, so heights are scaled like
/// distances to keep climb and descent angles realistic.
const CRUISE_ALTITUDE: f64 = 1500.0;
/// Seconds of closure before an incident; with the default fatigue window
/// the level crosses 0.5 about 3.5 s in.
const LEAD: f64 = 6.0;
const TAIL: f64 = 4.0;
/// Minimum gap between incidents, so each gets its own alert past the
/// cooldown and the fatigue window has drained.
const SPACING: f64 = 30.0;
const MAX_INCIDENTS: usize = 6;

/// Rolling terrain on a 50 m grid covering 51.2 km x 25.6 km.
fn rolling_terrain() -> TerrainRecipe {
    TerrainRecipe {
        width: 1025,
        height: 513,
        cell_size: 50.0,
        base: 100.0,
        relief: 600.0,
        feature_scale: 12_800.0,
        octaves: 7,
        peaks: vec![],
    }
}

fn base_scenario(name: &str, seed: u64, route: Vec<[f64; 2]>) -> Scenario {
    Scenario {
        name: name.to_string(),
        seed,
        duration: 360.0,
        cruise_altitude: CRUISE_ALTITUDE,
        cruise_speed: 120.0,
        approach_speed: 80.0,
        max_turn_rate_deg: 3.0,
        phases: vec![
            Phase { kind: PhaseKind::Takeoff, duration: 60.0 },
            Phase { kind: PhaseKind::Cruise, duration: 240.0 },
            Phase { kind: PhaseKind::Landing, duration: 60.0 },
        ],
        route,
        fatigue_script: vec![],
        incident_script: vec![],
        obstacles: vec![],
        gaze_dropout_rate: 0.0,
        terrain: TerrainSource::Generated(rolling_terrain()),
    }
}

/// Departure with a climbing left turn, a long cruise leg with one gentle
/// turn, and an arrival through right base and final turns.
fn standard_route() -> Vec<[f64; 2]> {
    vec![
        [4_000.0, 4_000.0],
        [6_000.0, 4_000.0],
        [7_500.0, 8_000.0],
        [33_000.0, 12_000.0],
        [35_000.0, 9_000.0],
        [31_000.0, 7_000.0],
    ]
}

/// Builds a preset with default settings.
pub fn preset(p: Preset, seed: u64) -> Scenario {
    build_preset(p, seed, &RunConfig::default()).expect("built-in presets are valid")
}

/// Builds a preset; the fatigue presets place their scripts against the
/// risk spots and warning ranges that `cfg` produces.
pub fn build_preset(p: Preset, seed: u64, cfg: &RunConfig) -> Result<Scenario> {
    match p {
        Preset::Standard => Ok(base_scenario("standard", seed, standard_route())),
        Preset::Turny => Ok(base_scenario(
            "turny",
            seed,
            vec![
                [4_000.0, 4_000.0],
                [6_000.0, 4_000.0],
                [10_000.0, 18_000.0],
                [16_000.0, 6_000.0],
                [22_000.0, 18_000.0],
                [28_000.0, 6_000.0],
                [33_000.0, 14_000.0],
                [35_000.0, 9_000.0],
                [31_000.0, 7_000.0],
            ],
        )),
        Preset::FatigueHeavy | Preset::FatigueControl => {
            let control = p == Preset::FatigueControl;
            let mut s = base_scenario(p.name(), seed, standard_route());
            // Throughput is not measured here, so a 100 m grid keeps the
            // twenty-seed batches quick.
            s.terrain = TerrainSource::Generated(TerrainRecipe {
                width: 513,
                height: 257,
                cell_size: 100.0,
                octaves: 6,
                ..rolling_terrain()
            });
            // controls skip the middle peak so mid-cruise stays clear of
            // every warning range
            let at: &[f64] = if control { &[0.2, 0.7] } else { &[0.2, 0.45, 0.7] };
            add_terrain_peaks(&mut s, at, seed)?;
            script_fatigue(&mut s, cfg, control)?;
            Ok(s)
        }
    }
}

/// Raises a peak beside the cruise track at each fraction of the cruise
/// phase, tall enough to intrude on the clearance band.
fn add_terrain_peaks(s: &mut Scenario, at: &[f64], seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9ea4);
    let field = s.terrain_field()?;
    let flight = generate_flight(s, &field, 1.0)?;
    let (_, c0, c1) = s
        .phase_spans()
        .into_iter()
        .find(|(k, _, _)| *k == PhaseKind::Cruise)
        .ok_or_else(|| Error::invalid("preset needs a cruise phase"))?;
    let TerrainSource::Generated(recipe) = &mut s.terrain else {
        return Ok(());
    };
    for (k, f) in at.iter().enumerate() {
        let t = c0 + f * (c1 - c0);
        let st = &flight[(t.round() as usize).min(flight.len() - 1)];
        let side = if k % 2 == 0 { 1.0 } else { -1.0 };
        let left = Vec2::new(-st.forward().y, st.forward().x);
        let ahead = rng.gen_range(1_000.0..3_000.0);
        let offset = side * rng.gen_range(1_200.0..1_800.0);
        let p = st.position + st.forward() * ahead + left * offset;
        let summit = CRUISE_ALTITUDE - 500.0 + rng.gen_range(200.0..400.0);
        let under = field.height_at(p).unwrap_or(recipe.base);
        recipe.peaks.push(Peak {
            x: p.x,
            y: p.y,
            height: (summit - under).max(0.0),
            radius: 700.0,
        });
    }
    Ok(())
}

/// Places incidents and closure episodes. Regular runs put each incident
/// where the aircraft stays within warning range from `LEAD` seconds before
/// to the end of the reaction window after; controls put them where it
/// stays out of range until the fatigue window has drained, anywhere in the
/// flight.
fn script_fatigue(s: &mut Scenario, cfg: &RunConfig, control: bool) -> Result<()> {
    s.fatigue_script.clear();
    s.incident_script.clear();
    let prepared = prepare(s, cfg, None)?;
    let in_range: Vec<bool> = prepared
        .flight
        .iter()
        .map(|st| in_warning_range(&prepared.risk_spots, st.position))
        .collect();
    let rate = cfg.frame_rate;
    let (before, after) = if control {
        (LEAD + 2.0, TAIL + cfg.fatigue_window + 2.0)
    } else {
        (LEAD, cfg.reaction_window)
    };
    let (_, mut c0, mut c1) = s
        .phase_spans()
        .into_iter()
        .find(|(k, _, _)| *k == PhaseKind::Cruise)
        .ok_or_else(|| Error::invalid("preset needs a cruise phase"))?;
    if control {
        // warning ranges can blanket the whole cruise; a drowsy climb-out or
        // approach away from risk is just as good a control
        (c0, c1) = (0.0, s.duration);
    }

    let holds = |t: f64| {
        let lo = ((t - before) * rate).floor().max(0.0) as usize;
        let hi = (((t + after) * rate).ceil() as usize).min(in_range.len() - 1);
        in_range[lo..=hi].iter().all(|&r| r != control)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed ^ 0xfa71);
    let mut t = c0 + before + rng.gen_range(0.0..5.0);
    while t + after <= c1 && s.incident_script.len() < MAX_INCIDENTS {
        if holds(t) {
            let t_inc = (t * 10.0).round() / 10.0;
            s.incident_script.push(t_inc);
            s.fatigue_script.push(FatigueEpisode {
                start: t_inc - LEAD,
                end: t_inc + TAIL,
                closure: 0.8,
                period: 2.0,
            });
            t += SPACING;
        } else {
            t += 1.0;
        }
    }
    if s.incident_script.is_empty() {
        return Err(Error::invalid(format!(
            "{} seed {}: no interval suits an incident",
            s.name, s.seed
        )));
    }
    Ok(())
}
