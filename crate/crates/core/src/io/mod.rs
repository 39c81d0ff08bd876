//! Files: configuration, spike trains, map CSV/PGM, datasets, weights and
//! run manifests.

pub mod config;
pub mod dataset;
pub mod manifest;
pub mod map;
pub mod spikes;

pub use config::ConfigFile;
pub use dataset::{format_dataset, format_weights, parse_dataset, parse_weights, read_dataset};
pub use manifest::{sha256_hex, Artifact, RunManifest, MANIFEST_FILE};
pub use map::{format_map_csv, gray_level, map_rows, parse_map_csv, MapRow, Pgm};
pub use spikes::{format_spike_train, parse_spike_train, read_spike_train, write_spike_train};
