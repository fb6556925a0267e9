//! Crowd analysis from pedestrian trajectories: kinematics, proxemics and
//! socialization, group detection, OCEAN personality, OCC emotions and
//! Hofstede cultural dimensions.

pub mod affect;
pub mod culture;
pub mod format;
pub mod geom;
pub mod grouping;
pub mod kinematics;
pub mod pipeline;
pub mod psyche;
pub mod report;
pub mod scene;
pub mod social;
pub mod synth;
pub mod tracking;

pub use pipeline::{run_pipeline, run_pipeline_with_net, AnalysisConfig, Dimension, Error, OutputKind, VideoSummary};
pub use report::write_outputs;
