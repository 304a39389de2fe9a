use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::gaze::GazeSample;

/// Only every `DECIMATION`-th tracker sample is analysed.
pub const DECIMATION: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EyeFrame {
    pub timestamp: f64,
    pub eye_open: f64,
    pub valid: bool,
}

impl From<&GazeSample> for EyeFrame {
    fn from(s: &GazeSample) -> Self {
        Self {
            timestamp: s.t,
            eye_open: s.eye_open,
            valid: s.valid,
        }
    }
}

/// Samples at indices 0, 10, 20, ...
pub fn decimate(trace: &[GazeSample]) -> Vec<EyeFrame> {
    trace.iter().step_by(DECIMATION).map(EyeFrame::from).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FatigueConfig {
    /// Sliding window length, seconds.
    pub window: f64,
    /// `eye_open` below this counts as closed.
    pub closure_threshold: f64,
    /// Closure episodes within `[blink_min, blink_max]` seconds are blinks.
    pub blink_min: f64,
    pub blink_max: f64,
    pub perclos_weight: f64,
    pub closure_weight: f64,
    /// Consecutive invalid frames before the eyes are relocalized.
    pub relocalize_after: u32,
}

impl Default for FatigueConfig {
    fn default() -> Self {
        Self {
            window: 10.0,
            closure_threshold: 0.2,
            blink_min: 0.1,
            blink_max: 0.4,
            perclos_weight: 0.7,
            closure_weight: 0.3,
            relocalize_after: 5,
        }
    }
}

/// Running fatigue estimate over a time window of eye frames.
///
/// The level is a weighted blend of PERCLOS and the longest closure in the
/// window, normalized by the longest blink: a closure lasting a full blink
/// or more saturates that term.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FatigueState {
    pub level: f64,
    pub perclos: f64,
    pub blink_count: usize,
    pub longest_closure: f64,
    pub tracking_lost: bool,
    window: VecDeque<EyeFrame>,
    invalid_streak: u32,
    relocalizations: u32,
}

impl FatigueState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn window(&self) -> impl Iterator<Item = &EyeFrame> {
        self.window.iter()
    }

    pub fn relocalizations(&self) -> u32 {
        self.relocalizations
    }

    pub fn update(&mut self, frame: EyeFrame, cfg: &FatigueConfig) {
        if !frame.valid {
            // hold the last estimate while the tracker is lost
            self.tracking_lost = true;
            self.invalid_streak += 1;
            if self.invalid_streak >= cfg.relocalize_after {
                self.window.clear();
                self.level = 0.0;
                self.perclos = 0.0;
                self.blink_count = 0;
                self.longest_closure = 0.0;
                self.invalid_streak = 0;
                self.relocalizations += 1;
            }
            return;
        }
        self.tracking_lost = false;
        self.invalid_streak = 0;
        self.window.push_back(frame);
        let cutoff = frame.timestamp - cfg.window;
        while self.window.front().is_some_and(|f| f.timestamp < cutoff) {
            self.window.pop_front();
        }
        self.recompute(cfg);
    }

    fn recompute(&mut self, cfg: &FatigueConfig) {
        let frames: Vec<&EyeFrame> = self.window.iter().collect();
        let n = frames.len();
        let closed: Vec<bool> = frames.iter().map(|f| f.eye_open < cfg.closure_threshold).collect();
        self.perclos = closed.iter().filter(|c| **c).count() as f64 / n as f64;

        // each frame stands for the interval up to the next one
        let span = |k: usize| -> f64 {
            if k + 1 < n {
                frames[k + 1].timestamp - frames[k].timestamp
            } else if n >= 2 {
                frames[n - 1].timestamp - frames[n - 2].timestamp
            } else {
                0.0
            }
        };
        let mut episodes = Vec::new();
        let mut run = 0.0;
        for k in 0..n {
            if closed[k] {
                run += span(k);
            } else if run > 0.0 {
                episodes.push(run);
                run = 0.0;
            }
        }
        if run > 0.0 {
            episodes.push(run);
        }
        let eps = 1e-9;
        self.blink_count = episodes
            .iter()
            .filter(|d| **d >= cfg.blink_min - eps && **d <= cfg.blink_max + eps)
            .count();
        self.longest_closure = episodes.iter().copied().fold(0.0, f64::max);

        let duration_term = (self.longest_closure / cfg.blink_max).min(1.0);
        let wsum = cfg.perclos_weight + cfg.closure_weight;
        let raw = (cfg.perclos_weight * self.perclos + cfg.closure_weight * duration_term) / wsum;
        self.level = raw.clamp(0.0, 1.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(t: f64, open: f64) -> EyeFrame {
        EyeFrame {
            timestamp: t,
            eye_open: open,
            valid: true,
        }
    }

    fn run(pattern: impl Fn(usize) -> f64, n: usize) -> FatigueState {
        let cfg = FatigueConfig::default();
        let mut s = FatigueState::new();
        for k in 0..n {
            s.update(frame(k as f64 * 0.1, pattern(k)), &cfg);
        }
        s
    }

    #[test]
    fn decimation_counts() {
        let trace = |n: usize| -> Vec<GazeSample> { (0..n).map(|k| GazeSample::new(k as f64, 0.5, 0.5)).collect() };
        assert_eq!(decimate(&trace(100)).len(), 10);
        assert_eq!(decimate(&trace(9)).len(), 1);
        assert_eq!(decimate(&trace(10)).len(), 1);
        assert_eq!(decimate(&trace(11)).len(), 2);
        assert_eq!(decimate(&trace(25))[2].timestamp, 20.0);
    }

    #[test]
    fn open_eyes_are_alert() {
        let s = run(|_| 1.0, 200);
        assert_eq!(s.level, 0.0);
        assert_eq!(s.perclos, 0.0);
    }

    #[test]
    fn closed_eyes_are_maximal() {
        let s = run(|_| 0.0, 200);
        assert_eq!(s.perclos, 1.0);
        assert_eq!(s.level, 1.0);
    }

    #[test]
    fn thirty_percent_closure() {
        // 3 closed frames out of every 10: 0.3 s closures every second
        let s = run(|k| if k % 10 < 3 { 0.0 } else { 1.0 }, 300);
        let cfg = FatigueConfig::default();
        let n = s.window().count();
        assert!((100..=101).contains(&n));
        assert!((s.perclos - 0.3).abs() <= 1.0 / n as f64 + 1e-12, "{}", s.perclos);
        // by hand over the frames that remain in the window
        let first = 300 - n;
        let closed = (first..300).filter(|k| k % 10 < 3).count() as f64;
        let perclos = closed / n as f64;
        assert_eq!(s.perclos, perclos);
        // longest closure 0.3 s -> duration term 0.75
        let expected = 0.7 * perclos + 0.3 * (0.3 / 0.4);
        assert!((s.level - expected).abs() < 1e-9);
        assert!((s.longest_closure - 0.3).abs() < 1e-9);
        assert_eq!(s.blink_count, 10);
        assert_eq!(cfg.perclos_weight + cfg.closure_weight, 1.0);
    }

    #[test]
    fn invalid_frames_freeze_then_relocalize() {
        let cfg = FatigueConfig::default();
        let mut s = run(|_| 0.0, 50);
        let frozen = s.level;
        let bad = EyeFrame {
            timestamp: 5.0,
            eye_open: 1.0,
            valid: false,
        };
        for k in 0..4 {
            s.update(EyeFrame { timestamp: 5.0 + k as f64 * 0.1, ..bad }, &cfg);
            assert!(s.tracking_lost);
            assert_eq!(s.level, frozen);
        }
        s.update(EyeFrame { timestamp: 5.4, ..bad }, &cfg);
        assert_eq!(s.level, 0.0);
        assert_eq!(s.window().count(), 0);
        s.update(frame(5.5, 1.0), &cfg);
        assert!(!s.tracking_lost);
        assert_eq!(s.level, 0.0);
        assert_eq!(s.relocalizations(), 1);
    }
}
