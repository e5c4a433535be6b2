//! Configuration files, snapshots and tabular output.

mod config;
mod snapshot;
mod timeseries;

pub use config::{config_to_toml, load_config, parse_config};
pub use snapshot::{
    read_snapshot, read_snapshot_from, write_snapshot, write_snapshot_to, SnapshotHeader, FIELD_COUNT, HEADER_LEN,
    MAGIC, VERSION,
};
pub use timeseries::{
    parse_timeseries, read_timeseries, sweep_csv, timeseries_csv, write_json, write_sweep_csv, write_timeseries,
};
