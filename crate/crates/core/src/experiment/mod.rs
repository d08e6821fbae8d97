//! Declarative experiments: TOML configs, sweeps, and tabular output.

mod config;
mod runner;

pub use config::{
    load_config, parse_config, write_config, ExperimentConfig, ExperimentKind, GeometryKind,
    SweepAxis, SweepCell, SweepParameter,
};
pub use runner::{csv_string, emit_csv, run, run_serial, save_run, RunRecord, Table, Value};
