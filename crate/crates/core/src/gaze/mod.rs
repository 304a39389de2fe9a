//! Eye-movement processing: classification of raw gaze into events,
//! projection of gaze onto the terrain, and the interest-spot list that
//! carries attention from one trip to the next.

mod camera;
mod classify;
mod interest;
pub(crate) mod sample;

pub use camera::{cast_ray, remap_gaze_to_terrain, CameraModel, RemapOutcome};
pub use classify::{classify_gaze, ClassifierConfig};
pub use interest::{
    read_interest_table, update_interest_list, write_interest_table, GazeHit, InterestConfig,
    InterestList, InterestSpot,
};
pub use sample::{read_gz1, write_gz1, GazeEvent, GazeKind, GazeSample};
