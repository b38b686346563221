//! Superpixel-graph saliency detection with dense-subgraph refinement.
//!
//! The pipeline segments an image into superpixels, builds a fully connected
//! region graph whose edge weights combine feature contrast, spatial proximity
//! and region compactness, extracts an intermediate saliency map from the
//! equilibrium distribution of a random walk on that graph, rebuilds a second
//! graph over the intermediate map, sparsifies it by entropy-maximizing edge
//! thresholding, and finally refines the salient set with an approximate
//! densest-k-subgraph search. [`composer::run_pipeline`] ties the stages
//! together; [`eval`] provides the precision/recall/F-measure/MAE harness.

pub mod composer;
pub mod dks;
pub mod error;
pub mod eval;
pub mod features;
pub mod graphs;
pub mod imaging;
pub mod markov;
pub mod slic;

pub use composer::{run_pipeline, PipelineOutput, PipelineParams};
pub use error::Error;
pub use imaging::{LabImage, RasterImage, ScalarMap};
pub use slic::{RegionStats, SuperpixelLabeling};
