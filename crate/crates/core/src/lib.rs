//! Reservoir computing on thermally coupled relaxation oscillators.
//!
//! * [`oscillator`] / [`simulate`]: lumped threshold-switch oscillator model and
//!   its exact event-driven integrator.
//! * [`metrics`]: high-order synchronization value SHR and efficiency μ.
//! * [`sweep`]: Arnold-tongue maps over two swept parameters, parallel and
//!   seed-deterministic.
//! * [`reservoir`]: affine input encoding, SHR features, threshold readout,
//!   perceptron training and the XOR pipeline.
//! * [`io`]: configuration files, spike-train files, map CSV/PGM and run
//!   manifests.

pub mod calibration;
pub mod error;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod oscillator;
pub mod ratio;
pub mod reservoir;
pub mod seed;
pub mod simulate;
pub mod sweep;

pub use error::{Error, Result};
pub use metrics::{compute_shr_mu, detect_synchronous_events, is_synchronized, Epsilon, MetricConfig, SyncMetrics};
pub use oscillator::{own_frequency, CouplingMatrix, ExternalDrive, NetworkConfig, OscillatorParams};
pub use reservoir::{
    activation, encode_inputs, readout_sum, reservoir_feature, run_xor, train_readout, InputEncoding, ReadoutNeuron,
    XorCase,
};
pub use simulate::{simulate, simulate_with, SimOptions, SpikeTrain};
pub use sweep::{arnold_sweep, count_sync_states, find_xor_operating_points, ArnoldMap, SweepSpec};
