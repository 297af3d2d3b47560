//! Episodic navigation environment over a segment world.
//!
//! The robot carries a 5-beam LIDAR spread over a 270-degree field of view.
//! Each step applies one of three fixed velocity commands for a fixed
//! duration, checks for collisions along the way, and returns the
//! discretized scan together with a reward: a bonus for driving forward, a
//! small one for turning, and a large penalty that ends the episode on a
//! crash. There is no step limit here; episode caps belong to the caller.

use std::f64::consts::PI;
use std::fmt;

use thiserror::Error;

use crate::geometry::{
    cast_scan, min_wall_distance, LidarScan, Point2, WorldMap, DEFAULT_COLLISION_THRESHOLD,
};
use crate::vehicle::{integrate, RobotPose, VelocityCommand};

/// Number of beams folded into a discrete state.
pub const STATE_BINS: usize = 5;

/// Clamp margin applied before binning so a max-range reading falls into the
/// top bin instead of one past it.
const RANGE_EPSILON: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("unknown environment id `{id}`; known ids: {}", known.join(", "))]
    UnknownEnv { id: String, known: Vec<String> },
    #[error("invalid environment config: {0}")]
    InvalidConfig(String),
    #[error("episode already terminated; call reset() before stepping again")]
    EpisodeTerminated,
    #[error("malformed state key `{0}`: expected {STATE_BINS} digits")]
    BadStateKey(String),
    #[error(transparent)]
    World(#[from] crate::geometry::WorldError),
}

/// The three discrete commands available to the agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Forward,
    Left,
    Right,
}

impl Action {
    pub const ALL: [Action; 3] = [Action::Forward, Action::Left, Action::Right];

    /// Fixed velocity mapping: Forward drives straight at 0.3 m/s; Left and
    /// Right creep at 0.05 m/s while yawing at +-0.3 rad/s.
    pub fn command(self) -> VelocityCommand {
        let (v, w) = match self {
            Action::Forward => (0.3, 0.0),
            Action::Left => (0.05, 0.3),
            Action::Right => (0.05, -0.3),
        };
        VelocityCommand::new(v, w).expect("fixed action commands are in range")
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Forward => "forward",
            Action::Left => "left",
            Action::Right => "right",
        }
    }

    pub fn from_name(name: &str) -> Option<Action> {
        match name {
            "forward" => Some(Action::Forward),
            "left" => Some(Action::Left),
            "right" => Some(Action::Right),
            _ => None,
        }
    }

    /// Stable index into per-action arrays, in `ALL` order.
    pub fn index(self) -> usize {
        match self {
            Action::Forward => 0,
            Action::Left => 1,
            Action::Right => 2,
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Discretized scan: one bin per beam, in beam order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiscreteState {
    bins: [u8; STATE_BINS],
}

impl DiscreteState {
    /// Bins must be single decimal digits so that keys stay bijective.
    pub fn new(bins: [u8; STATE_BINS]) -> Self {
        assert!(bins.iter().all(|&b| b <= 9), "bins must be decimal digits");
        DiscreteState { bins }
    }

    pub fn bins(&self) -> [u8; STATE_BINS] {
        self.bins
    }

    /// Canonical table key: the bin digits concatenated in beam order.
    pub fn key(&self) -> String {
        self.bins.iter().map(|&b| (b'0' + b) as char).collect()
    }

    pub fn from_key(key: &str) -> Result<Self, EnvError> {
        let digits: Vec<u8> = key
            .chars()
            .map(|c| c.to_digit(10).map(|d| d as u8))
            .collect::<Option<_>>()
            .ok_or_else(|| EnvError::BadStateKey(key.to_string()))?;
        let bins: [u8; STATE_BINS] = digits
            .try_into()
            .map_err(|_| EnvError::BadStateKey(key.to_string()))?;
        Ok(DiscreteState { bins })
    }
}

/// Outcome of a single environment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub observation: DiscreteState,
    pub reward: f64,
    pub done: bool,
}

/// Per-step rewards. `done` is true exactly when the crash reward was paid,
/// so the crash value must differ from the other two.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardScheme {
    pub forward: f64,
    pub turn: f64,
    pub crash: f64,
}

impl Default for RewardScheme {
    fn default() -> Self {
        RewardScheme {
            forward: 5.0,
            turn: 1.0,
            crash: -200.0,
        }
    }
}

/// Full environment configuration. `EnvConfig::new` fills in the standard
/// sensor and stepping parameters; construction of an [`Environment`]
/// validates the combination.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvConfig {
    pub world: WorldMap,
    /// Scan field of view in radians.
    pub fov: f64,
    pub n_beams: usize,
    /// Beam clamp distance in meters.
    pub max_range: f64,
    /// Width of one discretization bin in meters.
    pub bin_width: f64,
    /// Largest bin index; must equal floor((max_range - eps) / bin_width).
    pub max_bin: u8,
    /// Wall-clock seconds a command is applied per step.
    pub action_duration: f64,
    /// Number of equal sub-intervals per step checked for collision.
    pub substeps: u32,
    /// Center-to-wall distance below which the robot has crashed.
    pub collision_threshold: f64,
    pub rewards: RewardScheme,
}

impl EnvConfig {
    pub fn new(world: WorldMap) -> Self {
        EnvConfig {
            world,
            fov: 1.5 * PI,
            n_beams: STATE_BINS,
            max_range: 6.0,
            bin_width: 1.0,
            max_bin: 5,
            action_duration: 0.4,
            substeps: 8,
            collision_threshold: DEFAULT_COLLISION_THRESHOLD,
            rewards: RewardScheme::default(),
        }
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let fail = |msg: String| Err(EnvError::InvalidConfig(msg));
        if self.n_beams != STATE_BINS {
            return fail(format!(
                "n_beams must be {STATE_BINS} (the discrete state width), got {}",
                self.n_beams
            ));
        }
        if !(self.fov > 0.0 && self.fov <= 2.0 * PI) {
            return fail(format!("fov must be in (0, 2*pi], got {}", self.fov));
        }
        if !(self.max_range > 0.0) {
            return fail(format!("max_range must be positive, got {}", self.max_range));
        }
        if !(self.bin_width > 0.0) {
            return fail(format!("bin_width must be positive, got {}", self.bin_width));
        }
        let expected_max_bin = ((self.max_range - RANGE_EPSILON) / self.bin_width).floor();
        if f64::from(self.max_bin) != expected_max_bin {
            return fail(format!(
                "max_bin must be floor((max_range - eps) / bin_width) = {expected_max_bin}, got {}",
                self.max_bin
            ));
        }
        if self.max_bin > 9 {
            return fail(format!(
                "max_bin must be a single digit to keep state keys bijective, got {}",
                self.max_bin
            ));
        }
        if !(self.action_duration > 0.0) {
            return fail(format!(
                "action_duration must be positive, got {}",
                self.action_duration
            ));
        }
        if self.substeps == 0 {
            return fail("substeps must be at least 1".to_string());
        }
        if !(self.collision_threshold > 0.0) {
            return fail(format!(
                "collision_threshold must be positive, got {}",
                self.collision_threshold
            ));
        }
        let r = &self.rewards;
        if r.crash == r.forward || r.crash == r.turn {
            return fail(
                "crash reward must differ from step rewards (done is defined by it)".to_string(),
            );
        }
        let start = self.world.start();
        let clearance = min_wall_distance(&self.world, Point2::new(start.x, start.y));
        if clearance <= self.collision_threshold {
            return fail(format!(
                "start pose clearance {clearance:.4} m does not exceed the collision \
                 threshold {} m",
                self.collision_threshold
            ));
        }
        Ok(())
    }
}

/// Bins each beam range: `floor(clamp(range, 0, max_range - eps) / bin_width)`.
/// A max-range (or farther) reading lands in the top bin; a zero reading in
/// bin 0.
pub fn discretize(scan: &LidarScan, config: &EnvConfig) -> DiscreteState {
    let ranges = scan.ranges();
    assert_eq!(
        ranges.len(),
        STATE_BINS,
        "discretize expects a {STATE_BINS}-beam scan"
    );
    let mut bins = [0u8; STATE_BINS];
    for (bin, &range) in bins.iter_mut().zip(ranges) {
        let clamped = range.clamp(0.0, config.max_range - RANGE_EPSILON);
        *bin = (clamped / config.bin_width).floor() as u8;
    }
    DiscreteState::new(bins)
}

/// Sequential episodic environment. All state transitions go through
/// `reset` and `step`; the instance owns its pose and termination flag.
#[derive(Debug, Clone)]
pub struct Environment {
    config: EnvConfig,
    pose: RobotPose,
    terminated: bool,
    steps: u64,
}

impl Environment {
    pub fn new(config: EnvConfig) -> Result<Self, EnvError> {
        config.validate()?;
        let pose = config.world.start();
        Ok(Environment {
            config,
            pose,
            terminated: false,
            steps: 0,
        })
    }

    /// Puts the robot back at the world start pose and returns the initial
    /// observation. Deterministic: no randomization of any kind.
    pub fn reset(&mut self) -> DiscreteState {
        self.pose = self.config.world.start();
        self.terminated = false;
        self.steps = 0;
        self.observe()
    }

    /// Applies `action` for one step. The command runs for `action_duration`
    /// seconds split into `substeps` equal sub-intervals; after each
    /// sub-interval the pose is collision-checked. A collision freezes the
    /// pose at the offending sub-step and ends the episode with the crash
    /// reward; otherwise the step reward depends only on the action taken.
    ///
    /// Stepping a terminated episode is a contract violation and returns
    /// [`EnvError::EpisodeTerminated`].
    pub fn step(&mut self, action: Action) -> Result<StepResult, EnvError> {
        if self.terminated {
            return Err(EnvError::EpisodeTerminated);
        }
        let cmd = action.command();
        let dt = self.config.action_duration / f64::from(self.config.substeps);
        let mut crashed = false;
        for _ in 0..self.config.substeps {
            self.pose = integrate(self.pose, cmd, dt);
            let clearance =
                min_wall_distance(&self.config.world, Point2::new(self.pose.x, self.pose.y));
            if clearance < self.config.collision_threshold {
                crashed = true;
                break;
            }
        }
        self.steps += 1;
        let observation = self.observe();
        if crashed {
            self.terminated = true;
            Ok(StepResult {
                observation,
                reward: self.config.rewards.crash,
                done: true,
            })
        } else {
            let reward = match action {
                Action::Forward => self.config.rewards.forward,
                Action::Left | Action::Right => self.config.rewards.turn,
            };
            Ok(StepResult {
                observation,
                reward,
                done: false,
            })
        }
    }

    /// Casts and discretizes a scan at the current pose.
    pub fn observe(&self) -> DiscreteState {
        discretize(&self.scan(), &self.config)
    }

    /// Raw scan at the current pose.
    pub fn scan(&self) -> LidarScan {
        cast_scan(
            &self.config.world,
            self.pose,
            self.config.fov,
            self.config.n_beams,
            self.config.max_range,
        )
    }

    pub fn pose(&self) -> RobotPose {
        self.pose
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    /// Steps taken since the last reset.
    pub fn steps_taken(&self) -> u64 {
        self.steps
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }
}
