//! Online binary classification of imbalanced, drifting data streams.
//!
//! The crate bundles the pieces needed to run the hybrid active-passive
//! learner and its comparison methods end to end:
//!
//! - [`stream`]: Circle, Sine and Sea generators with a concept swap.
//! - [`net`]: the 2-8-1 neural classifier trained with Adam.
//! - [`imbalance`]: class-rate tracking, cost-sensitive weights, oversampling.
//! - [`memory`]: the rebalancing dual queue and the sliding window.
//! - [`detector`]: threshold-based warning/drift detection on 0/1 scores.
//! - [`learner`]: the test-then-train loop tying everything together.
//! - [`eval`]: prequential G-mean with fading factors.
//! - [`experiment`] and [`cli`]: repeated runs, CSV/SVG output.

pub mod cli;
pub mod detector;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod imbalance;
pub mod learner;
pub mod memory;
pub mod net;
pub mod stream;

pub use detector::{DetectionEvent, Detector, DetectorConfig};
pub use error::{Error, Result};
pub use eval::FadedGMean;
pub use experiment::{ExperimentConfig, RepRun, StepStat};
pub use learner::{Learner, LearnerConfig, MethodKind, StepReport};
pub use net::{Network, TrainBatch};
pub use stream::{ConceptKind, ConceptSpec, Example, Stream, StreamConfig};
