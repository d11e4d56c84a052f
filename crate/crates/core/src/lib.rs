//! Program-size statistics for large code bases.
//!
//! The pipeline counts physical lines of code per source file, fits a
//! lognormal model to the resulting size distribution, turns the model into
//! system-size and range-count estimates, and relates size rank to defect
//! concentration through Alberg curves and Weibull fits.

pub mod defects;
pub mod estimate;
pub mod fit;
pub mod ingest;
pub mod loc;
pub mod normal;
pub mod plot;
pub mod report;
pub mod stats;

pub use defects::{alberg_curve, concentration_table, fit_defect_weibull, AlbergCurve};
pub use estimate::{CorpusDefaults, EstimationResult};
pub use fit::{FitQuality, LognormalParams, WeibullParams};
pub use ingest::{Dataset, DefectKind, ProgramRecord};
