//! Gaze-aware terrain level-of-detail preloading for synthetic vision
//! displays.
//!
//! The crate is organised by pipeline stage:
//!
//! - [`terrain`]: height fields and the error-bounded subdivision tree.
//! - [`preload`]: the flight-state view region, per-frame node selection and
//!   transfer accounting between the terrain server and the renderer.
//! - [`gaze`]: eye-movement classification, gaze-to-terrain remapping and the
//!   bounded interest-spot list carried between trips.
//! - [`fatigue`]: windowed fatigue scoring, terrain risk spots and warnings.
//! - [`sim`]: scenario generation, the trace-driven frame loop and reports.
//! - [`config`]: the flat TOML run configuration that feeds all of the above.

pub mod config;
pub mod error;
pub mod fatigue;
pub mod gaze;
pub mod geom;
pub mod preload;
pub mod sim;
pub mod terrain;

pub use error::{Error, Result};
