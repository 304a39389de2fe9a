//! Run configuration: one flat TOML table shared by every stage. Angles are
//! written in degrees and converted on load; every key is optional and
//! falls back to the defaults in `config/default.toml`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fatigue::{FatigueConfig, RiskConfig, WarningConfig};
use crate::gaze::{CameraModel, ClassifierConfig, InterestConfig};
use crate::preload::PreloadConfig;
use crate::terrain::{SizeModel, TreeParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    // terrain tree
    pub alpha: f64,
    pub max_children: usize,
    pub max_points: usize,
    /// Samples per transferred node; 0 ships every covered sample.
    pub tile_samples: usize,
    pub size_multiplier: f64,

    // preload region and selection
    pub sigma0_deg: f64,
    pub delta_t: f64,
    pub eta_gain: f64,
    pub d_gain: f64,
    pub theta_min_deg: f64,
    pub theta_max_deg: f64,
    pub sigma_floor_deg: f64,
    pub sigma_margin_deg: f64,
    pub base_error: f64,
    pub fine_error: f64,
    pub max_bytes_per_frame: u64,
    pub route_aware_lod: bool,
    pub lod_reference_agl: f64,
    pub lod_max_scale: f64,
    pub route_corridor: f64,
    pub eviction_frames: u64,

    // gaze
    pub dispersion_max: f64,
    pub min_fixation: f64,
    pub saccade_velocity: f64,
    pub camera_hfov_deg: f64,
    pub camera_vfov_deg: f64,
    pub camera_pitch_deg: f64,
    pub interest_merge_radius: f64,
    pub interest_decay: f64,
    pub interest_capacity: usize,
    pub interest_spot_radius: f64,

    // fatigue and warnings
    pub fatigue_window: f64,
    pub closure_threshold: f64,
    pub blink_min: f64,
    pub blink_max: f64,
    pub perclos_weight: f64,
    pub closure_weight: f64,
    pub relocalize_after: u32,
    pub fatigue_threshold: f64,
    pub risk_threshold: f64,
    pub alert_cooldown: f64,
    pub clearance: f64,
    pub warning_range_multiple: f64,
    pub warning_range_floor: f64,
    pub risk_merge_radius: f64,
    /// Height above terrain at which flight risk reaches zero.
    pub risk_reference_agl: f64,
    pub suppress_alerts: bool,

    // harness
    pub frame_rate: f64,
    pub gaze_rate: f64,
    pub reaction_window: f64,
    /// Cruise-phase prediction bytes must stay below this fraction of the
    /// baseline.
    pub cruise_throughput_bound: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let p = PreloadConfig::default();
        let c = ClassifierConfig::default();
        let cam = CameraModel::default();
        let i = InterestConfig::default();
        let f = FatigueConfig::default();
        let w = WarningConfig::default();
        let r = RiskConfig::default();
        Self {
            alpha: 1.0,
            max_children: 4,
            max_points: 16,
            tile_samples: 16,
            size_multiplier: 1.0,

            sigma0_deg: p.sigma0.to_degrees().round(),
            delta_t: p.delta_t,
            eta_gain: p.eta_gain,
            d_gain: p.d_gain,
            theta_min_deg: p.theta_min.to_degrees().round(),
            theta_max_deg: p.theta_max.to_degrees().round(),
            sigma_floor_deg: p.sigma_floor.to_degrees().round(),
            sigma_margin_deg: p.sigma_margin.to_degrees().round(),
            base_error: p.base_error,
            fine_error: p.fine_error,
            max_bytes_per_frame: p.max_bytes_per_frame,
            route_aware_lod: true,
            lod_reference_agl: p.lod_reference_agl,
            lod_max_scale: p.lod_max_scale,
            route_corridor: p.route_corridor,
            eviction_frames: crate::preload::DEFAULT_EVICTION_FRAMES,

            dispersion_max: c.dispersion_max,
            min_fixation: c.min_fixation,
            saccade_velocity: c.saccade_velocity,
            camera_hfov_deg: cam.hfov.to_degrees().round(),
            camera_vfov_deg: cam.vfov.to_degrees().round(),
            camera_pitch_deg: cam.mount_pitch.to_degrees().round(),
            interest_merge_radius: i.merge_radius,
            interest_decay: i.decay,
            interest_capacity: i.capacity,
            interest_spot_radius: i.spot_radius,

            fatigue_window: f.window,
            closure_threshold: f.closure_threshold,
            blink_min: f.blink_min,
            blink_max: f.blink_max,
            perclos_weight: f.perclos_weight,
            closure_weight: f.closure_weight,
            relocalize_after: f.relocalize_after,
            fatigue_threshold: w.fatigue_threshold,
            risk_threshold: w.risk_threshold,
            alert_cooldown: w.cooldown,
            clearance: 500.0,
            warning_range_multiple: r.range_multiple,
            warning_range_floor: r.range_floor,
            risk_merge_radius: r.merge_radius,
            risk_reference_agl: 150.0,
            suppress_alerts: false,

            frame_rate: 10.0,
            gaze_rate: 100.0,
            reaction_window: 5.0,
            cruise_throughput_bound: 0.5,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> std::result::Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|msg| Error::parse(path, msg))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.tree_params().validate()?;
        self.preload().validate()?;
        self.interest().validate()?;
        if !(self.frame_rate > 0.0 && self.gaze_rate >= self.frame_rate) {
            return Err(Error::invalid("gaze_rate must be >= frame_rate > 0"));
        }
        if !(self.reaction_window >= 0.0) {
            return Err(Error::invalid("reaction_window must be non-negative"));
        }
        if !(self.fatigue_window > 0.0) || !(self.blink_max > 0.0) {
            return Err(Error::invalid("fatigue window and blink_max must be positive"));
        }
        if !(self.perclos_weight >= 0.0 && self.closure_weight >= 0.0)
            || self.perclos_weight + self.closure_weight <= 0.0
        {
            return Err(Error::invalid("fatigue weights must be non-negative and not both zero"));
        }
        if !(self.risk_reference_agl > 0.0) {
            return Err(Error::invalid("risk_reference_agl must be positive"));
        }
        Ok(())
    }

    pub fn tree_params(&self) -> TreeParams {
        TreeParams {
            alpha: self.alpha,
            max_children: self.max_children,
            max_points: self.max_points,
            size_model: SizeModel {
                tile_samples: (self.tile_samples > 0).then_some(self.tile_samples),
                multiplier: self.size_multiplier,
                ..SizeModel::default()
            },
        }
    }

    pub fn preload(&self) -> PreloadConfig {
        PreloadConfig {
            sigma0: self.sigma0_deg.to_radians(),
            delta_t: self.delta_t,
            eta_gain: self.eta_gain,
            d_gain: self.d_gain,
            theta_min: self.theta_min_deg.to_radians(),
            theta_max: self.theta_max_deg.to_radians(),
            sigma_floor: self.sigma_floor_deg.to_radians(),
            sigma_margin: self.sigma_margin_deg.to_radians(),
            base_error: self.base_error,
            fine_error: self.fine_error,
            max_bytes_per_frame: self.max_bytes_per_frame,
            lod_reference_agl: self.lod_reference_agl,
            lod_max_scale: self.lod_max_scale,
            route_corridor: self.route_corridor,
        }
    }

    pub fn classifier(&self) -> ClassifierConfig {
        ClassifierConfig {
            dispersion_max: self.dispersion_max,
            min_fixation: self.min_fixation,
            saccade_velocity: self.saccade_velocity,
        }
    }

    pub fn camera(&self) -> CameraModel {
        CameraModel {
            hfov: self.camera_hfov_deg.to_radians(),
            vfov: self.camera_vfov_deg.to_radians(),
            mount_pitch: self.camera_pitch_deg.to_radians(),
            ..CameraModel::default()
        }
    }

    pub fn interest(&self) -> InterestConfig {
        InterestConfig {
            merge_radius: self.interest_merge_radius,
            decay: self.interest_decay,
            capacity: self.interest_capacity,
            spot_radius: self.interest_spot_radius,
        }
    }

    pub fn fatigue(&self) -> FatigueConfig {
        FatigueConfig {
            window: self.fatigue_window,
            closure_threshold: self.closure_threshold,
            blink_min: self.blink_min,
            blink_max: self.blink_max,
            perclos_weight: self.perclos_weight,
            closure_weight: self.closure_weight,
            relocalize_after: self.relocalize_after,
        }
    }

    pub fn warning(&self) -> WarningConfig {
        WarningConfig {
            fatigue_threshold: self.fatigue_threshold,
            risk_threshold: self.risk_threshold,
            cooldown: self.alert_cooldown,
        }
    }

    pub fn risk(&self) -> RiskConfig {
        RiskConfig {
            range_multiple: self.warning_range_multiple,
            range_floor: self.warning_range_floor,
            merge_radius: self.risk_merge_radius,
            preload: self.preload(),
        }
    }
}
