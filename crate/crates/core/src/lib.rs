//! Outlier detection and type annotation over a Slim-tree metric index.
//!
//! The pipeline builds a Slim-tree over a [`MetricDataset`], refines the
//! insertion order with the tree's own overall outlier ranking, and then
//! derives four rankings from the refined tree: overall, global, local and
//! collective. The [`datagen`] module produces labeled testbeds and
//! [`eval`] scores rankings against them.

pub mod callout;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod label;
pub mod metric;
pub mod tree;

pub use callout::{c_allout, CallOutConfig, CallOutOutput, OutlierRankings, ScoreTable};
pub use error::{Error, Result};
pub use label::OutlierKind;
pub use metric::{euclidean_distance, MetricDataset};
pub use tree::SlimTree;
