//! Prequential G-mean with fading factors.

pub const DEFAULT_FADE: f64 = 0.99;

/// Faded per-class recall accumulators.
///
/// Both classes decay every step, so performance on a class that stops
/// appearing fades out as well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadedGMean {
    fade: f64,
    correct: [f64; 2],
    total: [f64; 2],
}

impl Default for FadedGMean {
    fn default() -> Self {
        FadedGMean::new(DEFAULT_FADE)
    }
}

impl FadedGMean {
    pub fn new(fade: f64) -> Self {
        assert!(
            fade > 0.0 && fade <= 1.0,
            "fading factor must lie in (0, 1]"
        );
        FadedGMean {
            fade,
            correct: [0.0; 2],
            total: [0.0; 2],
        }
    }

    pub fn fade(&self) -> f64 {
        self.fade
    }

    /// `(faded_correct, faded_total)` of `class`.
    pub fn accumulators(&self, class: u8) -> (f64, f64) {
        let k = usize::from(class);
        (self.correct[k], self.total[k])
    }

    /// Records one prediction and returns the updated G-mean.
    pub fn update(&mut self, y: u8, y_hat: u8) -> f64 {
        for k in 0..2 {
            self.correct[k] *= self.fade;
            self.total[k] *= self.fade;
        }
        let k = usize::from(y);
        self.total[k] += 1.0;
        if y == y_hat {
            self.correct[k] += 1.0;
        }
        self.gmean()
    }

    pub fn recall(&self) -> Option<f64> {
        (self.total[1] > 0.0).then(|| self.correct[1] / self.total[1])
    }

    pub fn specificity(&self) -> Option<f64> {
        (self.total[0] > 0.0).then(|| self.correct[0] / self.total[0])
    }

    /// `sqrt(recall * specificity)`, or 0 until both classes have been seen.
    pub fn gmean(&self) -> f64 {
        match (self.recall(), self.specificity()) {
            (Some(r), Some(s)) => (r * s).sqrt(),
            _ => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_step_recurrence() {
        let mut m = FadedGMean::new(0.99);
        m.update(1, 1);
        m.update(0, 0);
        let g = m.update(1, 0);
        let (c1, n1) = m.accumulators(1);
        assert!((n1 - 1.9801).abs() < 1e-12);
        assert!((c1 - 0.9801).abs() < 1e-12);
        assert!((m.recall().unwrap() - 0.494975).abs() < 1e-6);
        assert_eq!(m.accumulators(0), (0.99, 0.99));
        assert_eq!(m.specificity(), Some(1.0));
        assert!((g - 0.70354).abs() < 1e-5);
    }

    #[test]
    fn zero_until_both_classes_seen() {
        let mut m = FadedGMean::default();
        for _ in 0..10 {
            assert_eq!(m.update(0, 0), 0.0);
        }
        assert!(m.update(1, 1) > 0.0);
    }

    #[test]
    fn always_negative_predictor_scores_zero() {
        let mut m = FadedGMean::default();
        for t in 0..100 {
            assert_eq!(m.update(u8::from(t % 5 == 0), 0), 0.0);
        }
    }

    #[test]
    fn perfect_predictor_tends_to_one() {
        let mut m = FadedGMean::default();
        let mut prev = 0.0;
        for t in 0..200 {
            let y = u8::from(t % 7 == 0);
            let g = m.update(y, y);
            assert!(g >= prev);
            prev = g;
        }
        assert_eq!(prev, 1.0);
    }

    #[test]
    fn unseen_class_decays_geometrically() {
        let mut m = FadedGMean::new(0.9);
        m.update(1, 1);
        for _ in 0..10 {
            m.update(0, 0);
        }
        assert!((m.accumulators(1).1 - 0.9f64.powi(10)).abs() < 1e-15);
    }
}
