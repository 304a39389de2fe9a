//! Dispersion-threshold event detection.
//!
//! Fixations are found with the classic I-DT sweep over each run of valid
//! samples. The stretches between fixations are cut by point-to-point
//! velocity: fast runs are saccades, sustained slow runs smooth pursuits.

use serde::{Deserialize, Serialize};

use super::sample::{GazeEvent, GazeKind, GazeSample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifierConfig {
    /// Max `(max u - min u) + (max v - min v)` inside a fixation.
    pub dispersion_max: f64,
    /// Minimum fixation duration, seconds.
    pub min_fixation: f64,
    /// Screen units per second above which movement is a saccade.
    pub saccade_velocity: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            dispersion_max: 0.02,
            min_fixation: 0.1,
            saccade_velocity: 3.0,
        }
    }
}

#[derive(Clone, Copy)]
struct Bounds {
    u0: f64,
    u1: f64,
    v0: f64,
    v1: f64,
}

impl Bounds {
    fn of(s: &GazeSample) -> Self {
        Self {
            u0: s.u,
            u1: s.u,
            v0: s.v,
            v1: s.v,
        }
    }

    fn add(mut self, s: &GazeSample) -> Self {
        self.u0 = self.u0.min(s.u);
        self.u1 = self.u1.max(s.u);
        self.v0 = self.v0.min(s.v);
        self.v1 = self.v1.max(s.v);
        self
    }

    fn dispersion(&self) -> f64 {
        (self.u1 - self.u0) + (self.v1 - self.v0)
    }
}

fn span_bounds(s: &[GazeSample]) -> Bounds {
    s[1..].iter().fold(Bounds::of(&s[0]), |b, x| b.add(x))
}

fn centroid(s: &[GazeSample]) -> (f64, f64) {
    let n = s.len() as f64;
    let (u, v) = s.iter().fold((0.0, 0.0), |(u, v), x| (u + x.u, v + x.v));
    (u / n, v / n)
}

/// Splits `trace` into fixation, saccade and pursuit events. Invalid samples
/// break the trace into independent runs; events never span them.
pub fn classify_gaze(trace: &[GazeSample], cfg: &ClassifierConfig) -> Vec<GazeEvent> {
    let mut events = Vec::new();
    let mut k = 0;
    while k < trace.len() {
        if !trace[k].valid {
            k += 1;
            continue;
        }
        let start = k;
        while k < trace.len() && trace[k].valid {
            k += 1;
        }
        classify_run(trace, start, k, cfg, &mut events);
    }
    events
}

/// Fixation index ranges (inclusive) inside `trace[lo..hi]`.
fn fixations(trace: &[GazeSample], lo: usize, hi: usize, cfg: &ClassifierConfig) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = lo;
    while i < hi {
        // smallest window starting at i that lasts min_fixation
        let Some(j) = (i..hi).find(|&j| trace[j].t - trace[i].t >= cfg.min_fixation) else {
            break;
        };
        let mut b = span_bounds(&trace[i..=j]);
        if b.dispersion() > cfg.dispersion_max {
            i += 1;
            continue;
        }
        let mut end = j;
        while end + 1 < hi {
            let grown = b.add(&trace[end + 1]);
            if grown.dispersion() > cfg.dispersion_max {
                break;
            }
            b = grown;
            end += 1;
        }
        out.push((i, end));
        i = end + 1;
    }
    out
}

fn classify_run(
    trace: &[GazeSample],
    lo: usize,
    hi: usize,
    cfg: &ClassifierConfig,
    events: &mut Vec<GazeEvent>,
) {
    let fix = fixations(trace, lo, hi, cfg);
    let mut gap_from = lo;
    for &(a, b) in &fix {
        if a > gap_from {
            movements(trace, gap_from, a, cfg, events);
        }
        let s = &trace[a..=b];
        events.push(GazeEvent {
            kind: GazeKind::Fixation,
            start: trace[a].t,
            end: trace[b].t,
            centroid: centroid(s),
            dispersion: span_bounds(s).dispersion(),
            first_sample: a,
            last_sample: b,
        });
        gap_from = b;
    }
    if hi - 1 > gap_from {
        movements(trace, gap_from, hi - 1, cfg, events);
    }
}

/// Splits the non-fixation stretch `a..=b` into saccades and pursuits by
/// point-to-point velocity. Slow pieces shorter than `min_fixation` are the
/// ramp-down of a saccade rather than a pursuit and join their neighbours.
fn movements(trace: &[GazeSample], a: usize, b: usize, cfg: &ClassifierConfig, events: &mut Vec<GazeEvent>) {
    let fast: Vec<bool> = (a..b)
        .map(|k| {
            let (p, q) = (&trace[k], &trace[k + 1]);
            (q.u - p.u).hypot(q.v - p.v) / (q.t - p.t) > cfg.saccade_velocity
        })
        .collect();
    // (first sample, last sample, fast) per maximal run of intervals
    let runs = |fast: &[bool]| {
        let mut out: Vec<(usize, usize, bool)> = Vec::new();
        for (k, &f) in fast.iter().enumerate() {
            match out.last_mut() {
                Some(r) if r.2 == f => r.1 = a + k + 1,
                _ => out.push((a + k, a + k + 1, f)),
            }
        }
        out
    };
    let mut fast = fast;
    if fast.iter().any(|f| *f) {
        for (lo, hi, f) in runs(&fast) {
            if !f && trace[hi].t - trace[lo].t < cfg.min_fixation {
                fast[lo - a..hi - a].iter_mut().for_each(|x| *x = true);
            }
        }
    }
    let runs = runs(&fast);
    if runs.is_empty() {
        events.push(movement(trace, a, b, GazeKind::Pursuit));
    }
    for (lo, hi, f) in runs {
        events.push(movement(trace, lo, hi, if f { GazeKind::Saccade } else { GazeKind::Pursuit }));
    }
}

fn movement(trace: &[GazeSample], a: usize, b: usize, kind: GazeKind) -> GazeEvent {
    let s = &trace[a..=b];
    GazeEvent {
        kind,
        start: trace[a].t,
        end: trace[b].t,
        centroid: centroid(s),
        dispersion: span_bounds(s).dispersion(),
        first_sample: a,
        last_sample: b,
    }
}
