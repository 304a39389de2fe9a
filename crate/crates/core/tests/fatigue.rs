mod common;

use common::*;
use gazelod::fatigue::{
    detect_risk_spots, merge_spots, AlertCause, EyeFrame, FatigueConfig, FatigueState, RiskConfig,
    RiskSpot, WarningConfig, WarningEvaluator,
};
use gazelod::geom::Point;
use gazelod::preload::{compute_preload_region, AircraftState};
use gazelod::terrain::HeightField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn inside(tri: [Point; 3], p: Point) -> bool {
    let side = |a: Point, b: Point| (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
    let s = [side(tri[0], tri[1]), side(tri[1], tri[2]), side(tri[2], tri[0])];
    s.iter().all(|v| *v >= 0.0) || s.iter().all(|v| *v <= 0.0)
}

/// Scans every sample against every route state.
fn oracle_spots(field: &HeightField, route: &[AircraftState], clearance: f64, cfg: &RiskConfig) -> Vec<RiskSpot> {
    let (w, h) = (field.width() as i64, field.height() as i64);
    let mut raw = Vec::new();
    for j in 0..h {
        for i in 0..w {
            let c = field.at(i as usize, j as usize);
            let peak = (-1..=1).all(|dj| {
                (-1..=1).all(|di| {
                    let (x, y) = (i + di, j + dj);
                    x < 0 || y < 0 || x >= w || y >= h || field.at(x as usize, y as usize) <= c
                })
            });
            if !peak {
                continue;
            }
            let p = field.world(i as usize, j as usize);
            let worst = route
                .iter()
                .filter(|s| inside(region_triangle(&compute_preload_region(s, &cfg.preload)), p))
                .map(|s| c - (s.altitude - clearance))
                .fold(f64::NEG_INFINITY, f64::max);
            if worst > 0.0 {
                raw.push(RiskSpot {
                    location: p,
                    kind: gazelod::fatigue::RiskKind::Terrain,
                    clearance_violation: worst,
                    warning_range: (cfg.range_multiple * worst).max(cfg.range_floor),
                });
            }
        }
    }
    // greedy: most severe first, drop anything within the merge radius of a kept spot
    raw.sort_by(|a, b| {
        b.clearance_violation
            .total_cmp(&a.clearance_violation)
            .then(a.location.x.total_cmp(&b.location.x))
            .then(a.location.y.total_cmp(&b.location.y))
    });
    let mut kept: Vec<RiskSpot> = Vec::new();
    for s in raw {
        if kept.iter().all(|k| (k.location - s.location).norm() > cfg.merge_radius) {
            kept.push(s);
        }
    }
    kept
}

#[test]
fn risk_spots_match_full_grid_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7157);
    let mut found = 0;
    for case in 0..25 {
        let field = HeightField::from_fn(41, 37, 50.0, Point::new(0.0, 0.0), |_, _| rng.gen_range(0.0..400.0)).unwrap();
        let route: Vec<AircraftState> = (0..rng.gen_range(1..8))
            .map(|_| {
                let mut s = AircraftState::level(
                    Point::new(rng.gen_range(-200.0..2200.0), rng.gen_range(-200.0..2000.0)),
                    rng.gen_range(500.0..1100.0),
                    rng.gen_range(40.0..120.0),
                    rng.gen_range(-3.1..3.1),
                );
                s.turn_rate = rng.gen_range(-0.05..0.05);
                s.bank = rng.gen_range(-0.4..0.4);
                s
            })
            .collect();
        let cfg = RiskConfig {
            merge_radius: rng.gen_range(0.0..300.0),
            ..RiskConfig::default()
        };
        let got = detect_risk_spots(&field, &route, 500.0, &cfg);
        let want = oracle_spots(&field, &route, 500.0, &cfg);
        assert_eq!(got, want, "case {case}");
        found += got.len();
    }
    assert!(found > 20, "oracle never exercised ({found} spots)");
}

#[test]
fn merging_is_idempotent_and_spaced() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cfg = RiskConfig::default();
    let spots: Vec<RiskSpot> = (0..200)
        .map(|_| {
            let v = rng.gen_range(0.0..300.0);
            RiskSpot {
                location: Point::new(rng.gen_range(0.0..10_000.0), rng.gen_range(0.0..10_000.0)),
                kind: gazelod::fatigue::RiskKind::Terrain,
                clearance_violation: v,
                warning_range: (10.0 * v).max(1000.0),
            }
        })
        .collect();
    let once = merge_spots(spots, cfg.merge_radius);
    assert_eq!(merge_spots(once.clone(), cfg.merge_radius), once);
    for (k, a) in once.iter().enumerate() {
        for b in &once[k + 1..] {
            assert!((a.location - b.location).norm() > cfg.merge_radius);
        }
    }
}

/// Alerting rule written out longhand.
struct Reference {
    cfg: WarningConfig,
    last: Option<f64>,
}

impl Reference {
    fn step(&mut self, t: f64, level: f64, p: Point, spots: &[RiskSpot], risk: f64) -> Option<(AlertCause, Option<Point>)> {
        if self.last.is_some_and(|l| t - l < self.cfg.cooldown) {
            return None;
        }
        let mut near: Option<(f64, Point)> = None;
        if level > self.cfg.fatigue_threshold {
            for s in spots {
                let d = (s.location - p).norm();
                if d <= s.warning_range && near.map_or(true, |(bd, _)| d < bd) {
                    near = Some((d, s.location));
                }
            }
        }
        let out = match near {
            Some((_, at)) => Some((AlertCause::FatigueNearRisk, Some(at))),
            None if risk > self.cfg.risk_threshold => Some((AlertCause::FlightRisk, None)),
            None => None,
        };
        if out.is_some() {
            self.last = Some(t);
        }
        out
    }
}

#[test]
fn warning_gating_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut fired = [0usize; 2];
    for _ in 0..200 {
        let cfg = WarningConfig {
            cooldown: rng.gen_range(0.0..15.0),
            ..WarningConfig::default()
        };
        let spots: Vec<RiskSpot> = (0..rng.gen_range(0..5))
            .map(|_| RiskSpot {
                location: Point::new(rng.gen_range(0.0..8000.0), 0.0),
                kind: gazelod::fatigue::RiskKind::Terrain,
                clearance_violation: 100.0,
                warning_range: rng.gen_range(500.0..2500.0),
            })
            .collect();
        let mut real = WarningEvaluator::new(cfg);
        let mut reference = Reference { cfg, last: None };
        for k in 0..400 {
            let t = k as f64 * 0.1;
            let p = Point::new(k as f64 * 20.0, rng.gen_range(-300.0..300.0));
            let mut fatigue = FatigueState::new();
            fatigue.level = rng.gen_range(0.0..1.0);
            let risk = rng.gen_range(0.0..1.0);
            let mut st = AircraftState::level(p, 1000.0, 200.0, -std::f64::consts::FRAC_PI_2);
            st.timestamp = t;
            let got = real.evaluate(&fatigue, &st, &spots, risk);
            let want = reference.step(t, fatigue.level, p, &spots, risk);
            assert_eq!(got.map(|a| (a.cause, a.spot.map(|s| s.location))), want, "t = {t}");
            if let Some(a) = got {
                fired[(a.cause == AlertCause::FlightRisk) as usize] += 1;
                assert_eq!(a.fatigue_level, fatigue.level);
            }
        }
    }
    assert!(fired[0] > 0 && fired[1] > 0, "{fired:?}");
}

#[test]
fn fatigue_level_tracks_the_window() {
    let cfg = FatigueConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut st = FatigueState::new();
    let mut frames: Vec<EyeFrame> = Vec::new();
    for k in 0..3000 {
        let f = EyeFrame {
            timestamp: k as f64 * 0.1,
            eye_open: if rng.gen_bool(0.3) { 0.05 } else { 0.9 },
            valid: true,
        };
        st.update(f, &cfg);
        frames.push(f);
        let kept: Vec<&EyeFrame> = frames.iter().filter(|x| x.timestamp >= f.timestamp - cfg.window).collect();
        assert_eq!(st.window().count(), kept.len());
        let closed = kept.iter().filter(|x| x.eye_open < cfg.closure_threshold).count();
        assert!((st.perclos - closed as f64 / kept.len() as f64).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&st.level));
        assert!(st.level >= cfg.perclos_weight * st.perclos / (cfg.perclos_weight + cfg.closure_weight) - 1e-12);
    }
}

#[test]
fn lost_tracking_holds_then_relocalizes() {
    let cfg = FatigueConfig::default();
    let mut st = FatigueState::new();
    for k in 0..50 {
        let f = EyeFrame { timestamp: k as f64 * 0.1, eye_open: 0.0, valid: true };
        st.update(f, &cfg);
    }
    let before = st.level;
    assert!(before > 0.9);
    for k in 0..cfg.relocalize_after - 1 {
        st.update(EyeFrame { timestamp: 5.0 + k as f64 * 0.1, eye_open: 0.0, valid: false }, &cfg);
        assert_eq!(st.level, before);
        assert!(st.tracking_lost);
    }
    st.update(EyeFrame { timestamp: 6.0, eye_open: 0.0, valid: false }, &cfg);
    assert_eq!(st.level, 0.0);
    assert_eq!(st.relocalizations(), 1);
    assert_eq!(st.window().count(), 0);
}
