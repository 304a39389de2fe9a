//! Scenario generation, the end-to-end frame loop and report output.

mod flight;
mod gaze_gen;
mod presets;
mod report;
mod run;
mod scenario;
mod terrain_gen;

pub use flight::generate_flight;
pub use gaze_gen::{GazeModel, GazeTrace, CLOSED_EYE_OPEN};
pub use presets::{build_preset, preset, Preset};
pub use report::{
    accuracy_percent, emit_report, format_accuracy, read_summary, summarize_run_dir, write_metrics_csv,
    write_summary_csv, Manifest, SummaryRow,
};
pub use run::{
    flight_risk, in_warning_range, prepare, run_prepared, run_scenario, FrameMetrics, PhaseBytes,
    Prepared, ScenarioResult, ScenarioRun, SURVEY_TRIP,
};
pub use scenario::{FatigueEpisode, Phase, PhaseKind, Scenario, TerrainSource};
pub use terrain_gen::{generate_terrain, Peak, TerrainRecipe};
