//! Threshold-based drift detector over 0/1 prediction scores.
//!
//! Scores in a sliding window are modelled as Binomial; once the window is
//! full the detector freezes three thresholds around the window accuracy
//! (`mu + sigma * beta_improve`, `mu - sigma * beta_warn`,
//! `mu - sigma * beta_drift`) and compares each new window mean against them.
//! Thresholds are re-frozen on the first fill, on the first refill after a
//! drift, and whenever the model improves.

use std::collections::VecDeque;
use std::fmt;

use crate::stream::Example;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorConfig {
    pub score_window: usize,
    pub drift_window: usize,
    pub beta_improve: f64,
    pub beta_warn: f64,
    pub beta_drift: f64,
    /// Steps a warning may stay raised before it is dropped.
    pub expire_time: u64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            score_window: 500,
            drift_window: 100,
            beta_improve: 2.5,
            beta_warn: 3.0,
            beta_drift: 5.0,
            expire_time: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectionEvent {
    None,
    Improved,
    WarningRaised,
    WarningExpired,
    DriftDetected,
}

impl DetectionEvent {
    pub fn name(self) -> &'static str {
        match self {
            DetectionEvent::None => "none",
            DetectionEvent::Improved => "improved",
            DetectionEvent::WarningRaised => "warning",
            DetectionEvent::WarningExpired => "warning_expired",
            DetectionEvent::DriftDetected => "drift",
        }
    }
}

impl fmt::Display for DetectionEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// 1 for a correct prediction, 0 otherwise.
pub fn score(y: u8, y_hat: u8) -> u8 {
    u8::from(y == y_hat)
}

/// Binomial mean and standard deviation of a window of 0/1 scores.
///
/// Panics on an empty window.
pub fn window_stats<I>(scores: I) -> (f64, f64)
where
    I: IntoIterator<Item = u8>,
{
    let (ones, n) = scores.into_iter().fold((0usize, 0usize), |(ones, n), s| {
        (ones + usize::from(s), n + 1)
    });
    assert!(n > 0, "window statistics need at least one score");
    binomial_stats(ones, n)
}

fn binomial_stats(ones: usize, n: usize) -> (f64, f64) {
    let p = ones as f64 / n as f64;
    (p, (p * (1.0 - p) / n as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub improve: f64,
    pub warn: f64,
    pub drift: f64,
}

pub fn compute_thresholds(mu: f64, sigma: f64, config: &DetectorConfig) -> Thresholds {
    Thresholds {
        improve: mu + sigma * config.beta_improve,
        warn: mu - sigma * config.beta_warn,
        drift: mu - sigma * config.beta_drift,
    }
}

#[derive(Debug, Clone)]
pub struct Detector {
    config: DetectorConfig,
    scores: VecDeque<u8>,
    ones: usize,
    frozen: Option<(f64, f64)>,
    thresholds: Option<Thresholds>,
    warning: bool,
    warn_started_at: u64,
    drift_buffer: VecDeque<Example>,
    retrain_buffer: Vec<Example>,
}

impl Default for Detector {
    fn default() -> Self {
        Detector::new(DetectorConfig::default())
    }
}

impl Detector {
    pub fn new(config: DetectorConfig) -> Self {
        assert!(config.score_window > 0 && config.drift_window > 0);
        Detector {
            config,
            scores: VecDeque::with_capacity(config.score_window + 1),
            ones: 0,
            frozen: None,
            thresholds: None,
            warning: false,
            warn_started_at: 0,
            drift_buffer: VecDeque::with_capacity(config.drift_window + 1),
            retrain_buffer: Vec::new(),
        }
    }

    pub fn config(&self) -> &DetectorConfig {
        &self.config
    }

    pub fn warning(&self) -> bool {
        self.warning
    }

    pub fn thresholds(&self) -> Option<Thresholds> {
        self.thresholds
    }

    /// `(mu, sigma)` captured when the thresholds were last frozen.
    pub fn frozen_stats(&self) -> Option<(f64, f64)> {
        self.frozen
    }

    pub fn scores_len(&self) -> usize {
        self.scores.len()
    }

    /// Step at which the current warning was raised.
    pub fn warn_started_at(&self) -> Option<u64> {
        self.warning.then_some(self.warn_started_at)
    }

    pub fn drift_buffer(&self) -> &VecDeque<Example> {
        &self.drift_buffer
    }

    /// Current window mean, if the window is nonempty.
    pub fn window_mean(&self) -> Option<f64> {
        (!self.scores.is_empty()).then(|| self.ones as f64 / self.scores.len() as f64)
    }

    fn freeze(&mut self) {
        let (mu, sigma) = binomial_stats(self.ones, self.scores.len());
        self.frozen = Some((mu, sigma));
        self.thresholds = Some(compute_thresholds(mu, sigma, &self.config));
    }

    fn clear_warning(&mut self) {
        self.warning = false;
        self.drift_buffer.clear();
    }

    /// Feeds the score of step `t` and the example it was computed on.
    ///
    /// On [`DetectionEvent::DriftDetected`] the detector resets itself; the
    /// examples buffered since the warning are kept for
    /// [`Detector::take_retrain_buffer`].
    pub fn step(&mut self, s: u8, ex: Example, t: u64) -> DetectionEvent {
        self.scores.push_back(s);
        self.ones += usize::from(s);
        if self.scores.len() > self.config.score_window {
            let old = self.scores.pop_front().expect("nonempty");
            self.ones -= usize::from(old);
        }
        if self.scores.len() < self.config.score_window {
            return DetectionEvent::None;
        }
        if self.thresholds.is_none() {
            self.freeze();
        }
        let th = self.thresholds.expect("frozen above");
        let mu = self.ones as f64 / self.scores.len() as f64;

        if mu >= th.improve {
            self.freeze();
            self.clear_warning();
            return DetectionEvent::Improved;
        }

        let mut event = DetectionEvent::None;
        if mu <= th.warn || self.warning {
            if !self.warning {
                self.warning = true;
                self.warn_started_at = t;
            }
            self.drift_buffer.push_back(ex);
            if self.drift_buffer.len() > self.config.drift_window {
                self.drift_buffer.pop_front();
            }
            if t - self.warn_started_at >= self.config.expire_time {
                self.clear_warning();
                event = DetectionEvent::WarningExpired;
            } else {
                event = DetectionEvent::WarningRaised;
            }
        }

        if mu <= th.drift {
            self.retrain_buffer = self.drift_buffer.drain(..).collect();
            self.reset();
            return DetectionEvent::DriftDetected;
        }
        event
    }

    /// Examples buffered at the last drift; empties the stash.
    pub fn take_retrain_buffer(&mut self) -> Vec<Example> {
        std::mem::take(&mut self.retrain_buffer)
    }

    /// Clears scores, warning state and thresholds.
    pub fn reset(&mut self) {
        self.scores.clear();
        self.ones = 0;
        self.clear_warning();
        self.frozen = None;
        self.thresholds = None;
    }
}
