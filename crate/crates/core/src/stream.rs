//! Synthetic binary streams (Circle, Sine, Sea) with controllable class
//! imbalance and an abrupt concept swap.
//!
//! Every stream lives in the unit square. Labels are generated class-first:
//! the class is drawn as `Bernoulli(minority_rate)` and the point is then
//! rejection-sampled uniformly until it falls in that class's region, so the
//! class prior is exact regardless of region area. After the drift step the
//! concept is swapped (the positive and negative regions trade places) while
//! the class prior stays fixed.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Maximum number of uniform draws spent looking for a point of one class.
pub const MAX_REJECTION_DRAWS: u64 = 1_000_000;

/// Stream used for the example generator; learners use a different one so
/// that equal seeds do not correlate the two.
pub(crate) const STREAM_RNG_STREAM: u64 = 0;

const CIRCLE_CENTER: [f64; 2] = [0.4, 0.5];
const CIRCLE_RADIUS: f64 = 0.2;
const SEA_THRESHOLD: f64 = 7.0;

/// One labeled stream item.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example {
    pub x: [f64; 2],
    pub y: u8,
    /// 1-based step index.
    pub t: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConceptKind {
    Circle,
    Sine,
    Sea,
}

impl ConceptKind {
    pub const ALL: [ConceptKind; 3] = [ConceptKind::Circle, ConceptKind::Sine, ConceptKind::Sea];

    pub fn name(self) -> &'static str {
        match self {
            ConceptKind::Circle => "circle",
            ConceptKind::Sine => "sine",
            ConceptKind::Sea => "sea",
        }
    }
}

impl fmt::Display for ConceptKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConceptKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "circle" => Ok(ConceptKind::Circle),
            "sine" => Ok(ConceptKind::Sine),
            "sea" => Ok(ConceptKind::Sea),
            other => Err(Error::InvalidArgument(format!(
                "unknown dataset `{other}` (expected circle, sine or sea)"
            ))),
        }
    }
}

/// A labeling concept. Only `swapped` ever changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConceptSpec {
    pub kind: ConceptKind,
    pub swapped: bool,
}

impl ConceptSpec {
    pub fn new(kind: ConceptKind) -> Self {
        ConceptSpec {
            kind,
            swapped: false,
        }
    }

    pub fn swapped(self) -> Self {
        ConceptSpec {
            swapped: !self.swapped,
            ..self
        }
    }

    /// Label of a point of the unit square under this concept.
    pub fn label(&self, x: [f64; 2]) -> u8 {
        let base = match self.kind {
            ConceptKind::Circle => {
                let dx = x[0] - CIRCLE_CENTER[0];
                let dy = x[1] - CIRCLE_CENTER[1];
                dx * dx + dy * dy < CIRCLE_RADIUS * CIRCLE_RADIUS
            }
            ConceptKind::Sine => {
                let x1 = 2.0 * PI * x[0];
                let x2 = 2.0 * x[1] - 1.0;
                x2 < x1.sin()
            }
            ConceptKind::Sea => 10.0 * x[0] + 10.0 * x[1] <= SEA_THRESHOLD,
        };
        u8::from(base != self.swapped)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StreamConfig {
    pub kind: ConceptKind,
    /// Target `P(y = 1)`, in `(0, 1]`.
    pub minority_rate: f64,
    pub total_steps: u64,
    /// First step at which the swapped concept is in force; `None` disables drift.
    pub drift_step: Option<u64>,
    pub seed: u64,
}

impl StreamConfig {
    pub fn new(kind: ConceptKind, minority_rate: f64, seed: u64) -> Self {
        StreamConfig {
            kind,
            minority_rate,
            total_steps: 5000,
            drift_step: Some(2501),
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.minority_rate > 0.0 && self.minority_rate <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "minority rate must lie in (0, 1], got {}",
                self.minority_rate
            )));
        }
        if self.total_steps == 0 {
            return Err(Error::InvalidArgument(
                "total steps must be positive".into(),
            ));
        }
        if let Some(d) = self.drift_step {
            if d == 0 || d > self.total_steps {
                return Err(Error::InvalidArgument(format!(
                    "drift step {d} outside 1..={}",
                    self.total_steps
                )));
            }
        }
        Ok(())
    }

    /// The concept in force at step `t`.
    pub fn concept_at(&self, t: u64) -> ConceptSpec {
        let base = ConceptSpec::new(self.kind);
        match self.drift_step {
            Some(d) if t >= d => base.swapped(),
            _ => base,
        }
    }
}

/// Deterministic example generator. Yields `total_steps` examples.
#[derive(Debug, Clone)]
pub struct Stream {
    config: StreamConfig,
    rng: ChaCha8Rng,
    t: u64,
}

impl Stream {
    pub fn new(config: StreamConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(STREAM_RNG_STREAM);
        Ok(Stream { config, rng, t: 0 })
    }

    pub fn config(&self) -> &StreamConfig {
        &self.config
    }

    /// Draws the example for the next step, ignoring `total_steps`.
    pub fn next_example(&mut self) -> Result<Example> {
        self.t += 1;
        let concept = self.config.concept_at(self.t);
        let y = u8::from(self.rng.random_bool(self.config.minority_rate));
        let x = sample_region(&concept, y, &mut self.rng)?;
        Ok(Example { x, y, t: self.t })
    }
}

impl Iterator for Stream {
    type Item = Result<Example>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.t >= self.config.total_steps {
            return None;
        }
        Some(self.next_example())
    }
}

/// Uniform point of the unit square whose label under `concept` is `class`.
pub fn sample_region<R: Rng + ?Sized>(
    concept: &ConceptSpec,
    class: u8,
    rng: &mut R,
) -> Result<[f64; 2]> {
    for _ in 0..MAX_REJECTION_DRAWS {
        let x = [rng.random::<f64>(), rng.random::<f64>()];
        if concept.label(x) == class {
            return Ok(x);
        }
    }
    Err(Error::DegenerateConcept {
        class,
        draws: MAX_REJECTION_DRAWS,
    })
}

/// Writes examples as `t,x1,x2,y` lines with 17 significant digits.
pub fn write_dump<W: Write>(mut out: W, examples: &[Example]) -> std::io::Result<()> {
    for ex in examples {
        writeln!(out, "{},{:.16e},{:.16e},{}", ex.t, ex.x[0], ex.x[1], ex.y)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_labels() {
        let c = ConceptSpec::new(ConceptKind::Circle);
        assert_eq!(c.label([0.4, 0.5]), 1);
        assert_eq!(c.label([0.0, 0.0]), 0);
        assert_eq!(c.swapped().label([0.4, 0.5]), 0);
    }

    #[test]
    fn sea_and_sine_labels() {
        assert_eq!(ConceptSpec::new(ConceptKind::Sea).label([0.2, 0.2]), 1);
        assert_eq!(ConceptSpec::new(ConceptKind::Sea).label([0.35, 0.35]), 1);
        assert_eq!(ConceptSpec::new(ConceptKind::Sea).label([0.5, 0.5]), 0);
        assert_eq!(ConceptSpec::new(ConceptKind::Sine).label([0.25, 0.5]), 1);
        assert_eq!(ConceptSpec::new(ConceptKind::Sine).label([0.75, 0.5]), 0);
    }

    #[test]
    fn circle_area_matches_geometry() {
        let c = ConceptSpec::new(ConceptKind::Circle);
        let n = 100;
        let mut inside = 0;
        for i in 0..n {
            for j in 0..n {
                let x = [(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64];
                inside += c.label(x) as usize;
            }
        }
        let area = inside as f64 / (n * n) as f64;
        let expected = PI * 0.2 * 0.2;
        assert!((area - expected).abs() <= 0.05 * expected, "area {area}");
    }

    #[test]
    fn certain_minority_rate_emits_only_positives() {
        let mut cfg = StreamConfig::new(ConceptKind::Sine, 1.0, 3);
        cfg.total_steps = 200;
        cfg.drift_step = None;
        let stream = Stream::new(cfg).unwrap();
        assert!(stream.map(|e| e.unwrap()).all(|e| e.y == 1));
    }

    #[test]
    fn positive_rate_within_binomial_bound() {
        let mut cfg = StreamConfig::new(ConceptKind::Circle, 0.1, 11);
        cfg.total_steps = 10_000;
        cfg.drift_step = None;
        let pos: usize = Stream::new(cfg)
            .unwrap()
            .map(|e| e.unwrap().y as usize)
            .sum();
        let rate = pos as f64 / 10_000.0;
        assert!(
            (rate - 0.1).abs() <= 3.0 * (0.1f64 * 0.9 / 10_000.0).sqrt(),
            "rate {rate}"
        );
    }

    #[test]
    fn swap_applies_from_drift_step() {
        let cfg = StreamConfig {
            kind: ConceptKind::Circle,
            minority_rate: 0.5,
            total_steps: 400,
            drift_step: Some(201),
            seed: 5,
        };
        for ex in Stream::new(cfg.clone()).unwrap().map(|e| e.unwrap()) {
            let base = ConceptSpec::new(ConceptKind::Circle).label(ex.x);
            if ex.t < 201 {
                assert_eq!(ex.y, base);
            } else {
                assert_eq!(ex.y, 1 - base);
            }
        }
    }

    #[test]
    fn invalid_configs_rejected() {
        let mut cfg = StreamConfig::new(ConceptKind::Sea, 0.0, 1);
        assert!(Stream::new(cfg.clone()).is_err());
        cfg.minority_rate = 0.1;
        cfg.drift_step = Some(0);
        assert!(Stream::new(cfg.clone()).is_err());
        cfg.drift_step = Some(cfg.total_steps + 1);
        assert!(Stream::new(cfg).is_err());
        assert!("moon".parse::<ConceptKind>().is_err());
    }

    #[test]
    fn dump_format() {
        let ex = Example {
            x: [0.5, 0.25],
            y: 1,
            t: 7,
        };
        let mut buf = Vec::new();
        write_dump(&mut buf, &[ex]).unwrap();
        let line = String::from_utf8(buf).unwrap();
        assert_eq!(line, "7,5.0000000000000000e-1,2.5000000000000000e-1,1\n");
        let fields: Vec<&str> = line.trim().split(',').collect();
        assert_eq!(fields[1].parse::<f64>().unwrap(), 0.5);
    }
}
