//! Experiment driver: BER sweeps, diversity fits and rate tables.

pub mod ber;
pub mod config;
pub mod diversity;
pub mod table;

pub use ber::{run_ber, wilson_interval, BerCurve, BerPoint, CurveMeta};
pub use config::{
    bits_for_rate, pair_constellations, repetition_power_scale, ExperimentConfig, PairedScheme, PowerPairing, SnrGrid,
};
pub use diversity::{estimate_diversity, DiversityEstimate};
pub use table::{emit_rate_table, symbolic_rows, BoundSeries, ParityClass, RateRow, RateTable, SymbolicRow};
