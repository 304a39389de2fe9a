//! Bounded priority list of terrain spots the pilot paid attention to.
//!
//! After each trip the gaze hits are clustered into candidate spots, merged
//! into the previous trip's list, re-sorted and cut back to the top `N`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::sample::csv_error;
use crate::error::{Error, Result};
use crate::geom::Point;

/// A gaze ray's landing point and how long the pilot looked there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GazeHit {
    pub location: Point,
    /// Seconds.
    pub attention: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterestSpot {
    pub location: Point,
    /// Accumulated attention, seconds.
    pub priority: f64,
    pub radius: f64,
    pub trip_id: String,
    /// Generation of the list that last touched this spot.
    pub last_updated: u64,
}

impl InterestSpot {
    pub fn new(location: Point, priority: f64, radius: f64, trip_id: impl Into<String>) -> Self {
        Self {
            location,
            priority,
            radius,
            trip_id: trip_id.into(),
            last_updated: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterestConfig {
    /// Hits and spots closer than this are merged, meters.
    pub merge_radius: f64,
    /// Per-trip priority decay applied to carried-over spots, in (0, 1].
    pub decay: f64,
    /// List capacity `N`.
    pub capacity: usize,
    /// Radius given to newly created spots, meters.
    pub spot_radius: f64,
}

impl Default for InterestConfig {
    fn default() -> Self {
        Self {
            merge_radius: 500.0,
            decay: 0.8,
            capacity: 16,
            spot_radius: 400.0,
        }
    }
}

impl InterestConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::invalid(format!("interest decay must be in (0, 1], got {}", self.decay)));
        }
        if !(self.merge_radius >= 0.0) || !(self.spot_radius > 0.0) {
            return Err(Error::invalid("interest radii must be positive"));
        }
        if self.capacity == 0 {
            return Err(Error::invalid("interest capacity must be at least 1"));
        }
        Ok(())
    }
}

/// Spots sorted by non-increasing priority, at most `capacity` of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterestList {
    spots: Vec<InterestSpot>,
    capacity: usize,
    generation: u64,
}

impl InterestList {
    pub fn new(capacity: usize) -> Self {
        Self {
            spots: Vec::new(),
            capacity,
            generation: 0,
        }
    }

    /// Sorts `spots` by priority and keeps the top `capacity`.
    pub fn from_spots(mut spots: Vec<InterestSpot>, capacity: usize) -> Self {
        sort_and_truncate(&mut spots, capacity);
        Self {
            spots,
            capacity,
            generation: 0,
        }
    }

    pub fn spots(&self) -> &[InterestSpot] {
        &self.spots
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn len(&self) -> usize {
        self.spots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spots.is_empty()
    }

    pub fn total_priority(&self) -> f64 {
        self.spots.iter().map(|s| s.priority).sum()
    }
}

fn sort_and_truncate(spots: &mut Vec<InterestSpot>, capacity: usize) {
    // stable: equal priorities keep their incumbent order
    spots.sort_by(|a, b| b.priority.total_cmp(&a.priority));
    spots.truncate(capacity);
}

/// Index of the spot nearest to `p` within `radius`; earliest wins ties.
fn nearest_within(spots: &[InterestSpot], p: Point, radius: f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (k, s) in spots.iter().enumerate() {
        let d = (s.location - p).norm();
        if d <= radius && best.map_or(true, |(_, bd)| d < bd) {
            best = Some((k, d));
        }
    }
    best.map(|(k, _)| k)
}

/// Produces the next trip's list from the previous one and this trip's
/// gaze hits.
///
/// Carried-over spots decay by `cfg.decay`. Hits are clustered greedily in
/// input order around the first hit of each cluster; each cluster then
/// either reinforces the nearest spot within the merge radius or becomes a
/// new spot. The list may exceed `N` until the final sort-and-truncate.
/// The output capacity is the smaller of `prev.capacity()` and
/// `cfg.capacity`.
pub fn update_interest_list(
    prev: &InterestList,
    hits: &[GazeHit],
    trip_id: &str,
    cfg: &InterestConfig,
) -> InterestList {
    let generation = prev.generation + 1;
    let capacity = prev.capacity.min(cfg.capacity);

    let mut spots: Vec<InterestSpot> = prev
        .spots
        .iter()
        .cloned()
        .map(|mut s| {
            s.priority *= cfg.decay;
            s
        })
        .collect();

    let mut clusters: Vec<(Point, f64)> = Vec::new();
    for h in hits.iter().filter(|h| h.attention > 0.0) {
        match clusters
            .iter_mut()
            .find(|(c, _)| (*c - h.location).norm() <= cfg.merge_radius)
        {
            Some((_, w)) => *w += h.attention,
            None => clusters.push((h.location, h.attention)),
        }
    }

    for (location, weight) in clusters {
        match nearest_within(&spots, location, cfg.merge_radius) {
            Some(k) => {
                spots[k].priority += weight;
                spots[k].last_updated = generation;
                spots[k].trip_id = trip_id.to_string();
            }
            None => spots.push(InterestSpot {
                location,
                priority: weight,
                radius: cfg.spot_radius,
                trip_id: trip_id.to_string(),
                last_updated: generation,
            }),
        }
    }

    sort_and_truncate(&mut spots, capacity);
    InterestList {
        spots,
        capacity,
        generation,
    }
}

#[derive(Serialize, Deserialize)]
struct Row {
    x: f64,
    y: f64,
    priority: f64,
    radius: f64,
    trip_id: String,
}

/// Writes the list as CSV with header `x,y,priority,radius,trip_id`.
pub fn write_interest_table(path: &Path, list: &InterestList) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    if list.is_empty() {
        w.write_record(["x", "y", "priority", "radius", "trip_id"])
            .map_err(|e| csv_error(path, e))?;
    }
    for s in &list.spots {
        w.serialize(Row {
            x: s.location.x,
            y: s.location.y,
            priority: s.priority,
            radius: s.radius,
            trip_id: s.trip_id.clone(),
        })
        .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_interest_table(path: &Path, capacity: usize) -> Result<InterestList> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    let mut spots = Vec::new();
    for row in rdr.deserialize() {
        let r: Row = row.map_err(|e| csv_error(path, e))?;
        if !(r.priority > 0.0 && r.radius > 0.0) {
            return Err(Error::parse(path, "priority and radius must be positive"));
        }
        spots.push(InterestSpot::new(Point::new(r.x, r.y), r.priority, r.radius, r.trip_id));
    }
    Ok(InterestList::from_spots(spots, capacity))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hit(x: f64, y: f64, a: f64) -> GazeHit {
        GazeHit {
            location: Point::new(x, y),
            attention: a,
        }
    }

    fn no_decay(capacity: usize) -> InterestConfig {
        InterestConfig {
            decay: 1.0,
            capacity,
            ..Default::default()
        }
    }

    #[test]
    fn single_hit_creates_spot() {
        let out = update_interest_list(&InterestList::new(16), &[hit(10.0, 20.0, 3.0)], "a", &no_decay(16));
        assert_eq!(out.len(), 1);
        assert_eq!(out.spots()[0].location, Point::new(10.0, 20.0));
        assert_eq!(out.spots()[0].priority, 3.0);
    }

    #[test]
    fn lowest_priority_is_evicted() {
        let prev = InterestList::from_spots(
            vec![
                InterestSpot::new(Point::new(0.0, 0.0), 10.0, 100.0, "a"),
                InterestSpot::new(Point::new(5000.0, 0.0), 5.0, 100.0, "a"),
            ],
            2,
        );
        let out = update_interest_list(&prev, &[hit(0.0, 9000.0, 7.0)], "b", &no_decay(2));
        let got: Vec<_> = out.spots().iter().map(|s| (s.location, s.priority)).collect();
        assert_eq!(got, vec![(Point::new(0.0, 0.0), 10.0), (Point::new(0.0, 9000.0), 7.0)]);
    }

    #[test]
    fn nearby_hits_merge() {
        let hits = [hit(0.0, 0.0, 1.0), hit(100.0, 0.0, 2.0), hit(2000.0, 0.0, 0.5)];
        let out = update_interest_list(&InterestList::new(8), &hits, "a", &no_decay(8));
        assert_eq!(out.len(), 2);
        assert_eq!(out.spots()[0].priority, 3.0);
        let again = update_interest_list(&out, &[hit(50.0, 50.0, 1.0)], "b", &no_decay(8));
        assert_eq!(again.spots()[0].priority, 4.0);
        assert_eq!(again.spots()[0].last_updated, 2);
        assert_eq!(again.spots()[1].last_updated, 1);
    }

    #[test]
    fn empty_update_decays_and_keeps_order() {
        let prev = InterestList::from_spots(
            vec![
                InterestSpot::new(Point::new(0.0, 0.0), 4.0, 100.0, "a"),
                InterestSpot::new(Point::new(3000.0, 0.0), 2.0, 100.0, "a"),
            ],
            4,
        );
        let cfg = InterestConfig {
            decay: 0.5,
            capacity: 4,
            ..Default::default()
        };
        let out = update_interest_list(&prev, &[], "b", &cfg);
        let p: Vec<_> = out.spots().iter().map(|s| s.priority).collect();
        assert_eq!(p, vec![2.0, 1.0]);
    }

    #[test]
    fn table_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("interest.csv");
        let list = InterestList::from_spots(
            vec![
                InterestSpot::new(Point::new(1.5, -2.0), 4.25, 300.0, "route-7"),
                InterestSpot::new(Point::new(10.0, 20.0), 9.0, 250.0, "route-7"),
            ],
            8,
        );
        write_interest_table(&path, &list).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("x,y,priority,radius,trip_id\n10.0,20.0,9.0,250.0,route-7\n"));
        assert_eq!(read_interest_table(&path, 8).unwrap(), list);

        write_interest_table(&path, &InterestList::new(8)).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "x,y,priority,radius,trip_id\n");
        assert!(read_interest_table(&path, 8).unwrap().is_empty());
    }
}
