//! Topological and geometric feature extraction for 2-D images, with a
//! built-in random-forest classifier and a bootstrap evaluation harness.
//!
//! The pipeline has three stages:
//!
//! 1. [`field`] and [`ingest`] load images into scalar fields (gray plus the
//!    three color channels) and normalize polarity and scale.
//! 2. [`persistence`], [`tda`], [`lkc`], and [`tracking`] turn a field into
//!    structure: superlevel persistence diagrams, diagram amplitudes,
//!    Euler/perimeter/area curves with their summaries, and per-component
//!    geometry tracks. The fixed 64-, 120-, and 184-column feature schemas
//!    live in [`tda`] and [`lkc`].
//! 3. [`forest`], [`metrics`], and [`eval`] classify feature tables under a
//!    seeded bootstrap protocol and report accuracy, F1, precision, and
//!    cross-method agreement.
//!
//! Everything downstream of a seed is deterministic, including across thread
//! counts, and [`verify`] cross-checks the fast sweeps against independent
//! reference implementations on demand.
//!
//! Algorithms are generic over the float width via [`scalar::Real`]; the
//! aliases below pin the common f64 instantiations.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod export;
pub mod field;
pub mod forest;
pub mod ingest;
pub mod lkc;
pub mod metrics;
pub mod persistence;
pub mod scalar;
pub mod synth;
pub mod tda;
pub mod tracking;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Real;

/// f64 scalar field.
pub type Field = field::ScalarField<f64>;
/// f64 four-channel image.
pub type Image = field::MultiChannelImage<f64>;
/// f64 persistence diagram.
pub type Diagram = persistence::PersistenceDiagram<f64>;
/// f64 persistence bar.
pub type Bar = persistence::Bar<f64>;
/// f64 component tracking result.
pub type Tracking = tracking::ComponentTracking<f64>;
/// f64 curve set.
pub type Curves = lkc::LkcCurves<f64>;
/// f64 feature matrix.
pub type Features = eval::FeatureMatrix<f64>;
/// f64 random forest.
pub type Forest = forest::ForestModel<f64>;
/// f64 amplitude configuration.
pub type AmplitudeConfig = tda::AmplitudeConfig<f64>;
/// f64 curve configuration.
pub type LkcConfig = lkc::LkcConfig<f64>;
