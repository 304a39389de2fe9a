//! Per-frame terrain preloading driven by the aircraft's flight state.

mod cache;
mod region;
mod select;
mod state;

pub use cache::{PreloadCache, DEFAULT_EVICTION_FRAMES};
pub use region::{compute_preload_region, region_to_domain, PreloadConfig, PreloadRegion};
pub use select::{baseline_set, select_preload_set, Planner, Selection};
pub use state::AircraftState;
