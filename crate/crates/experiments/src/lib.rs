//! Experiment runners for variational optimal control of state transfer:
//! configuration, seeding, execution and result records.
//!
//! ```
//! use vqoc_experiments::{run, ExperimentConfig};
//!
//! let cfg = ExperimentConfig::from_toml_str(
//!     "experiment = \"max-fidelity\"\nreplications = 2\n\
//!      [chain]\nqubits = 3\ntrotter_steps = 3\ntime = 2.0\n\
//!      [optimizer]\nbudget = 50\n[metrics]\npairs = 0\n",
//! )
//! .unwrap();
//! let record = run(&cfg).unwrap();
//! assert!(record.value("w1.free-field.gradient-descent").is_some());
//! ```

pub mod config;
pub mod error;
pub mod record;
pub mod runners;
pub mod seed;

pub use config::{ExperimentConfig, ExperimentKind, Overrides};
pub use error::{ExpError, Result};
pub use record::{Cell, ResultRecord, Table};
pub use runners::run;
