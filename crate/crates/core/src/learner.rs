//! Online learner: predict, detect drift, respond, then update incrementally.
//!
//! Each method differs only in its passive (incremental) update; the active
//! part (drift detector plus retraining from the warning buffer) is shared
//! and can be switched off to get the purely incremental variant.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::detector::{self, DetectionEvent, Detector, DetectorConfig};
use crate::error::{Error, Result};
use crate::imbalance::{self, ClassRates, CostState, CID_DECAY, COST_REFRESH_PERIOD};
use crate::memory::{DualQueue, SlidingWindow, DEFAULT_BUDGET, DEFAULT_WINDOW};
use crate::net::{Network, TrainBatch};
use crate::stream::Example;

/// Learner randomness draws from its own ChaCha stream.
const LEARNER_RNG_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MethodKind {
    Baseline,
    Sliding,
    AdaptiveCs,
    Oob,
    Areba,
}

impl MethodKind {
    pub const ALL: [MethodKind; 5] = [
        MethodKind::Baseline,
        MethodKind::Sliding,
        MethodKind::AdaptiveCs,
        MethodKind::Oob,
        MethodKind::Areba,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MethodKind::Baseline => "baseline",
            MethodKind::Sliding => "sliding",
            MethodKind::AdaptiveCs => "adaptive_cs",
            MethodKind::Oob => "oob",
            MethodKind::Areba => "areba",
        }
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "baseline" => Ok(MethodKind::Baseline),
            "sliding" => Ok(MethodKind::Sliding),
            "adaptive_cs" | "adaptivecs" => Ok(MethodKind::AdaptiveCs),
            "oob" => Ok(MethodKind::Oob),
            "areba" => Ok(MethodKind::Areba),
            other => Err(Error::InvalidArgument(format!(
                "unknown method `{other}` (expected baseline, sliding, adaptive_cs, oob or areba)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LearnerConfig {
    pub method: MethodKind,
    pub hybrid: bool,
    /// AREBA memory budget `B` (even).
    pub budget: usize,
    /// Sliding window size `W`.
    pub window: usize,
    /// First step at which the detector is consulted.
    pub waiting_time: u64,
    pub detector: DetectorConfig,
    pub passive_epochs: usize,
    pub retrain_epochs: usize,
    pub cid_decay: f64,
    pub cost_refresh_period: u64,
}

impl LearnerConfig {
    pub fn new(method: MethodKind, hybrid: bool) -> Self {
        LearnerConfig {
            method,
            hybrid,
            budget: DEFAULT_BUDGET,
            window: DEFAULT_WINDOW,
            waiting_time: 500,
            detector: DetectorConfig::default(),
            passive_epochs: 1,
            retrain_epochs: 50,
            cid_decay: CID_DECAY,
            cost_refresh_period: COST_REFRESH_PERIOD,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget < 2 || !self.budget.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "budget must be even and at least 2, got {}",
                self.budget
            )));
        }
        if self.window == 0 {
            return Err(Error::InvalidArgument("window must be positive".into()));
        }
        if self.passive_epochs == 0 || self.retrain_epochs == 0 {
            return Err(Error::InvalidArgument("epochs must be positive".into()));
        }
        let d = &self.detector;
        if d.score_window == 0 || d.drift_window == 0 {
            return Err(Error::InvalidArgument(
                "detector windows must be positive".into(),
            ));
        }
        if d.beta_warn >= d.beta_drift || d.beta_warn.is_nan() || d.beta_drift.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "beta_warn ({}) must be below beta_drift ({})",
                d.beta_warn, d.beta_drift
            )));
        }
        if !(self.cid_decay > 0.0 && self.cid_decay < 1.0) {
            return Err(Error::InvalidArgument(
                "CID decay must lie in (0, 1)".into(),
            ));
        }
        Ok(())
    }
}

/// Per-method passive state.
#[derive(Debug, Clone)]
pub enum MethodState {
    Baseline,
    Sliding(SlidingWindow),
    AdaptiveCs { rates: ClassRates, cost: CostState },
    Oob(ClassRates),
    Areba(DualQueue),
}

impl MethodState {
    fn new(config: &LearnerConfig) -> Self {
        match config.method {
            MethodKind::Baseline => MethodState::Baseline,
            MethodKind::Sliding => MethodState::Sliding(SlidingWindow::new(config.window)),
            MethodKind::AdaptiveCs => MethodState::AdaptiveCs {
                rates: ClassRates::new(config.cid_decay),
                cost: CostState::new(config.cost_refresh_period),
            },
            MethodKind::Oob => MethodState::Oob(ClassRates::new(config.cid_decay)),
            MethodKind::Areba => MethodState::Areba(DualQueue::new(config.budget)),
        }
    }

    pub fn kind(&self) -> MethodKind {
        match self {
            MethodState::Baseline => MethodKind::Baseline,
            MethodState::Sliding(_) => MethodKind::Sliding,
            MethodState::AdaptiveCs { .. } => MethodKind::AdaptiveCs,
            MethodState::Oob(_) => MethodKind::Oob,
            MethodState::Areba(_) => MethodKind::Areba,
        }
    }
}

/// What happened while processing one example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub t: u64,
    pub y: u8,
    pub prediction: u8,
    pub probability: f64,
    pub event: DetectionEvent,
    /// Whether the passive branch ran on this step.
    pub updated: bool,
}

#[derive(Debug, Clone)]
pub struct Learner {
    config: LearnerConfig,
    net: Network,
    state: MethodState,
    detector: Option<Detector>,
    t: u64,
    rng: ChaCha8Rng,
}

impl Learner {
    pub fn new(config: LearnerConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(LEARNER_RNG_STREAM);
        let net = Network::init(rng.random());
        Ok(Learner {
            state: MethodState::new(&config),
            detector: config.hybrid.then(|| Detector::new(config.detector)),
            config,
            net,
            t: 1,
            rng,
        })
    }

    pub fn config(&self) -> &LearnerConfig {
        &self.config
    }

    pub fn network(&self) -> &Network {
        &self.net
    }

    pub fn method_state(&self) -> &MethodState {
        &self.state
    }

    pub fn detector(&self) -> Option<&Detector> {
        self.detector.as_ref()
    }

    /// Index of the next step to be processed (starts at 1).
    pub fn t(&self) -> u64 {
        self.t
    }

    /// `(label, probability)`; probability 0.5 counts as positive.
    pub fn predict(&self, x: [f64; 2]) -> (u8, f64) {
        let p = self.net.forward(x);
        (u8::from(p >= 0.5), p)
    }

    /// Test-then-train on one labeled example.
    pub fn step(&mut self, x: [f64; 2], y: u8) -> Result<StepReport> {
        let t = self.t;
        let (prediction, probability) = self.predict(x);
        let ex = Example { x, y, t };

        let mut event = DetectionEvent::None;
        if t >= self.config.waiting_time {
            if let Some(det) = self.detector.as_mut() {
                event = det.step(detector::score(y, prediction), ex, t);
            }
            if event == DetectionEvent::DriftDetected {
                self.drift_response()?;
            }
        }

        let warning = self.detector.as_ref().is_some_and(Detector::warning);
        let updated = t < self.config.waiting_time || !warning;
        if updated {
            self.passive_update(ex)?;
        }
        self.t += 1;
        Ok(StepReport {
            t,
            y,
            prediction,
            probability,
            event,
            updated,
        })
    }

    /// Fresh network trained on the warning buffer; every memory starts over.
    pub fn drift_response(&mut self) -> Result<()> {
        let buffer = self
            .detector
            .as_mut()
            .map(Detector::take_retrain_buffer)
            .unwrap_or_default();
        self.net = Network::init(self.rng.random());
        if !buffer.is_empty() {
            self.net
                .train(&TrainBatch::unit(&buffer), self.config.retrain_epochs)?;
        }
        self.state = MethodState::new(&self.config);
        if let Some(det) = self.detector.as_mut() {
            det.reset();
        }
        Ok(())
    }

    pub fn passive_update(&mut self, ex: Example) -> Result<()> {
        let epochs = self.config.passive_epochs;
        match &mut self.state {
            MethodState::Baseline => {
                self.net
                    .train(&TrainBatch::single(ex.x, ex.y, 1.0)?, epochs)?;
            }
            MethodState::Sliding(window) => {
                window.append(ex);
                self.net
                    .train(&TrainBatch::unit(window.training_set()), epochs)?;
            }
            MethodState::AdaptiveCs { rates, cost } => {
                rates.update(ex.y);
                cost.tick(rates);
                let weight = cost.weight(ex.y);
                self.net
                    .train(&TrainBatch::single(ex.x, ex.y, weight)?, epochs)?;
            }
            MethodState::Oob(rates) => {
                rates.update(ex.y);
                let k = imbalance::oob_multiplicity(rates, ex.y, &mut self.rng);
                if k > 0 {
                    let batch = TrainBatch::single(ex.x, ex.y, 1.0)?;
                    for _ in 0..k {
                        self.net.train(&batch, epochs)?;
                    }
                }
            }
            MethodState::Areba(queues) => {
                queues.append(ex);
                self.net
                    .train(&TrainBatch::unit(queues.training_set()), epochs)?;
            }
        }
        Ok(())
    }
}
