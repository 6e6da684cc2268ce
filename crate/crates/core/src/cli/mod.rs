//! Run configuration, output production, figure presets, and the oracle
//! verification suites behind the `vortex-twm` binary.

pub mod config;
pub mod figures;
pub mod manifest;
pub mod run;
pub mod verify;

pub use config::{AnalysisConfig, GridConfig, Product, RadiusChoice, RunConfig};
pub use figures::{reproduce_figure, FigureId};
pub use manifest::{FileEntry, Manifest};
pub use run::{profile, run_config, sweep, FieldMetrics, SweepParam};
pub use verify::{verify, Level, VerifyReport};
