//! Batch experiments: config files, the run grid, CSV records and plots.

mod config;
mod envelope_verify;
mod heatmap;
mod record;
mod run;

pub use config::{
    load_config, parse_config, preset_text, EigMethod, ExperimentConfig, Job, MeshFamily, Mode, ENVELOPE_CASES,
    PRESETS,
};
pub use envelope_verify::{envelope_verify, write_verify_rows, VerifyRow, VERIFY_COLUMNS};
pub use heatmap::{render_heatmap, HeatmapValue};
pub use record::{read_records, write_records, write_records_file, RunRecord, COLUMNS};
pub use run::{build_case, expand_cases, family_mesh, run_case, run_config, run_config_with, worker_count, Case};
