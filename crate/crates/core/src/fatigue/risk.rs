//! Terrain and obstacle risk spots along a route.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::gaze::InterestSpot;
use crate::geom::Point;
use crate::preload::{compute_preload_region, AircraftState, PreloadConfig};
use crate::terrain::HeightField;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskKind {
    Terrain,
    Obstacle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskSpot {
    pub location: Point,
    pub kind: RiskKind,
    /// How far the spot rises into the clearance band, meters.
    pub clearance_violation: f64,
    /// Radius around the spot inside which the fatigue alarm is armed.
    pub warning_range: f64,
}

/// A man-made obstacle: a point with an absolute top elevation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Obstacle {
    pub location: Point,
    pub top: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiskConfig {
    /// warning_range = max(range_multiple * violation, range_floor).
    pub range_multiple: f64,
    pub range_floor: f64,
    /// Spots closer than this collapse into the most severe one.
    pub merge_radius: f64,
    /// View region used to decide what terrain each route point can see.
    pub preload: PreloadConfig,
}

impl Default for RiskConfig {
    fn default() -> Self {
        Self {
            range_multiple: 10.0,
            range_floor: 1000.0,
            merge_radius: 1000.0,
            preload: PreloadConfig::default(),
        }
    }
}

impl RiskConfig {
    fn warning_range(&self, violation: f64) -> f64 {
        (self.range_multiple * violation).max(self.range_floor)
    }

    fn spot(&self, location: Point, kind: RiskKind, violation: f64) -> RiskSpot {
        RiskSpot {
            location,
            kind,
            clearance_violation: violation,
            warning_range: self.warning_range(violation),
        }
    }
}

/// Local maxima of the field: samples at least as high as every neighbour.
fn local_maxima(field: &HeightField) -> Vec<bool> {
    let (w, h) = (field.width(), field.height());
    let mut out = vec![false; w * h];
    for j in 0..h {
        for i in 0..w {
            let c = field.at(i, j);
            let mut peak = true;
            'scan: for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || ni < 0 || nj < 0 || ni >= w as i64 || nj >= h as i64 {
                        continue;
                    }
                    if field.at(ni as usize, nj as usize) > c {
                        peak = false;
                        break 'scan;
                    }
                }
            }
            out[j * w + i] = peak;
        }
    }
    out
}

/// Terrain peaks visible from the route that rise above `altitude -
/// clearance` at some route point. Each peak keeps its worst violation;
/// peaks within the merge radius of a more severe one are dropped.
pub fn detect_risk_spots(
    field: &HeightField,
    route: &[AircraftState],
    clearance: f64,
    cfg: &RiskConfig,
) -> Vec<RiskSpot> {
    let peaks = local_maxima(field);
    let top = field.max_elevation();
    let mut worst: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for state in route {
        let floor = state.altitude - clearance;
        if floor >= top {
            continue;
        }
        let tri = compute_preload_region(state, &cfg.preload).triangle();
        let Some(rect) = field.rect_covering(&tri.bounding_box()) else {
            continue;
        };
        for j in rect.j0..=rect.j1 {
            for i in rect.i0..=rect.i1 {
                if !peaks[j * field.width() + i] {
                    continue;
                }
                let h = field.at(i, j);
                if h <= floor || !tri.contains_point(field.world(i, j)) {
                    continue;
                }
                let v = worst.entry((j, i)).or_insert(f64::NEG_INFINITY);
                *v = v.max(h - floor);
            }
        }
    }
    let spots = worst
        .into_iter()
        .map(|((j, i), v)| cfg.spot(field.world(i, j), RiskKind::Terrain, v))
        .collect();
    merge_spots(spots, cfg.merge_radius)
}

/// Obstacles whose top pierces the clearance band while in view.
pub fn obstacle_risk_spots(
    obstacles: &[Obstacle],
    route: &[AircraftState],
    clearance: f64,
    cfg: &RiskConfig,
) -> Vec<RiskSpot> {
    let mut out = Vec::new();
    for o in obstacles {
        let worst = route
            .iter()
            .filter(|s| compute_preload_region(s, &cfg.preload).triangle().contains_point(o.location))
            .map(|s| o.top - (s.altitude - clearance))
            .fold(f64::NEG_INFINITY, f64::max);
        if worst > 0.0 {
            out.push(cfg.spot(o.location, RiskKind::Obstacle, worst));
        }
    }
    out
}

/// Interest spots whose terrain rises into the clearance band of the
/// nearest route point.
pub fn hazardous_interest_spots(
    field: &HeightField,
    interests: &[InterestSpot],
    route: &[AircraftState],
    clearance: f64,
    cfg: &RiskConfig,
) -> Vec<RiskSpot> {
    interests
        .iter()
        .filter_map(|s| {
            let h = field.height_at(s.location)?;
            let nearest = route.iter().min_by(|a, b| {
                (a.position - s.location)
                    .norm()
                    .total_cmp(&(b.position - s.location).norm())
            })?;
            let v = h - (nearest.altitude - clearance);
            (v > 0.0).then(|| cfg.spot(s.location, RiskKind::Terrain, v))
        })
        .collect()
}

/// Keeps the most severe spot of every group closer than `radius`. Order of
/// the result: decreasing violation.
pub fn merge_spots(mut spots: Vec<RiskSpot>, radius: f64) -> Vec<RiskSpot> {
    spots.sort_by(|a, b| {
        b.clearance_violation
            .total_cmp(&a.clearance_violation)
            .then(a.location.x.total_cmp(&b.location.x))
            .then(a.location.y.total_cmp(&b.location.y))
    });
    let mut kept: Vec<RiskSpot> = Vec::new();
    for s in spots {
        if kept.iter().all(|k| (k.location - s.location).norm() > radius) {
            kept.push(s);
        }
    }
    kept
}
