//! Online class-imbalance tracking and the two imbalance remedies built on it:
//! adaptive cost-sensitive weights (CSOGD) and oversampling multiplicities (OOB).

use rand::Rng;
use rand_distr::{Distribution, Poisson};

pub const CID_DECAY: f64 = 0.99;
pub const COST_RATIO_MIN: f64 = 1.0;
pub const COST_RATIO_MAX: f64 = 50.0;
pub const COST_REFRESH_PERIOD: u64 = 250;
pub const OOB_LAMBDA_MIN: f64 = 1.0;
pub const OOB_LAMBDA_MAX: f64 = 100.0;

const INITIAL_GAMMA_P: f64 = 0.95;
const INITIAL_GAMMA_N: f64 = 0.05;

/// Time-decayed class occurrence rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassRates {
    pub w_p: f64,
    pub w_n: f64,
    pub decay: f64,
}

impl Default for ClassRates {
    fn default() -> Self {
        ClassRates::new(CID_DECAY)
    }
}

impl ClassRates {
    pub fn new(decay: f64) -> Self {
        ClassRates {
            w_p: 0.5,
            w_n: 0.5,
            decay,
        }
    }

    pub fn update(&mut self, y: u8) {
        let hit = |k: u8| if y == k { 1.0 - self.decay } else { 0.0 };
        let (dp, dn) = (hit(1), hit(0));
        self.w_p = self.decay * self.w_p + dp;
        self.w_n = self.decay * self.w_n + dn;
    }

    pub fn rate(&self, class: u8) -> f64 {
        if class == 1 {
            self.w_p
        } else {
            self.w_n
        }
    }
}

/// Class-dependent misclassification costs with a periodically refreshed ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostState {
    pub gamma_p: f64,
    pub gamma_n: f64,
    ratio: f64,
    refresh_period: u64,
    steps_since_refresh: u64,
}

impl Default for CostState {
    fn default() -> Self {
        CostState::new(COST_REFRESH_PERIOD)
    }
}

impl CostState {
    pub fn new(refresh_period: u64) -> Self {
        CostState {
            gamma_p: INITIAL_GAMMA_P,
            gamma_n: INITIAL_GAMMA_N,
            ratio: (INITIAL_GAMMA_P / INITIAL_GAMMA_N).clamp(COST_RATIO_MIN, COST_RATIO_MAX),
            refresh_period,
            steps_since_refresh: 0,
        }
    }

    /// Current `gamma_p / gamma_n`, always in `[1, 50]`.
    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    /// Advances the refresh clock by one step; every `refresh_period` steps
    /// the ratio is reset from the observed rates. Returns whether it refreshed.
    pub fn tick(&mut self, rates: &ClassRates) -> bool {
        self.steps_since_refresh += 1;
        if self.steps_since_refresh < self.refresh_period {
            return false;
        }
        self.steps_since_refresh = 0;
        self.refresh(rates);
        true
    }

    pub fn refresh(&mut self, rates: &ClassRates) {
        let raw = if rates.w_p > 0.0 {
            rates.w_n / rates.w_p
        } else {
            f64::INFINITY
        };
        self.ratio = raw.clamp(COST_RATIO_MIN, COST_RATIO_MAX);
        self.gamma_p = self.ratio / (1.0 + self.ratio);
        self.gamma_n = 1.0 / (1.0 + self.ratio);
    }

    /// Loss multiplier for an example of class `y`.
    pub fn weight(&self, y: u8) -> f64 {
        if y == 1 {
            self.ratio
        } else {
            1.0
        }
    }
}

/// Poisson rate for an example of class `y`: the inverse relative frequency
/// of its class, clipped to `[1, 100]`.
pub fn oob_lambda(rates: &ClassRates, y: u8) -> f64 {
    let own = rates.rate(y);
    let other = rates.rate(1 - y);
    let raw = if own > 0.0 {
        other / own
    } else {
        f64::INFINITY
    };
    raw.clamp(OOB_LAMBDA_MIN, OOB_LAMBDA_MAX)
}

/// Number of times an example of class `y` is replayed.
pub fn oob_multiplicity<R: Rng + ?Sized>(rates: &ClassRates, y: u8, rng: &mut R) -> u32 {
    let lambda = oob_lambda(rates, y);
    let poisson = Poisson::new(lambda).expect("lambda is finite and positive");
    poisson.sample(rng) as u32
}
