//! Deterministic 2D differential-drive navigation environments with tabular
//! temporal-difference learning.
//!
//! A robot with a fixed action set (drive forward, arc left, arc right)
//! moves through a polygonal world, observes it through a coarse
//! five-beam range scan, and earns rewards for making progress without
//! hitting walls. [`agents`] implements Q-Learning and Sarsa over the
//! discretized scan space, [`harness`] runs seeded training sweeps, and
//! [`registry`] holds the built-in worlds plus any loaded from disk.
//!
//! Everything is reproducible: given the same environment, algorithm
//! settings, and seed, a training run produces byte-identical logs and
//! Q-tables on every platform.

pub mod agents;
pub mod environment;
pub mod geometry;
pub mod harness;
pub mod plot;
pub mod registry;
pub mod rng;
pub mod vehicle;

pub use agents::{AgentConfig, Algorithm, QTable};
pub use environment::{Action, DiscreteState, EnvConfig, EnvError, Environment, StepResult};
pub use geometry::{LidarScan, Point2, Segment, WorldMap};
pub use harness::{EpisodeRecord, RunLog, TrainOutput};
pub use registry::{make, Registry};
pub use rng::Rng64;
pub use vehicle::{RobotPose, VelocityCommand};
