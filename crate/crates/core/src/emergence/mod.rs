//! Random graph samplers, Janson bounds, density conditions, structural
//! checks on sampled graphs and Monte Carlo threshold scans.

pub mod density;
pub mod janson;
pub mod sampling;
pub mod scan;
pub mod structure;

pub use density::{density_condition, DensityConditionReport, Margin};
pub use janson::{janson_bound, JansonEstimate};
pub use sampling::{sample_gnp, sample_perturbed, trial_rng, PerturbedInstance, SampleMode, SeedSpec};
pub use scan::{rows_to_csv, threshold_scan, wilson_interval, PExpr, ScanConfig, ScanMode, ScanRow};
pub use structure::{verify_structure, StructureReport, StructureViolation};
