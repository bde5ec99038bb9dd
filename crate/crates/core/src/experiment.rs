//! Repeated prequential runs and their aggregation into CSV and SVG.

use std::fmt::Write as _;
use std::io::Write;

use rayon::prelude::*;

use crate::detector::{DetectionEvent, DetectorConfig};
use crate::error::{Error, Result};
use crate::eval::{FadedGMean, DEFAULT_FADE};
use crate::learner::{Learner, LearnerConfig, MethodKind};
use crate::memory::{DEFAULT_BUDGET, DEFAULT_WINDOW};
use crate::stream::{ConceptKind, Stream, StreamConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: ConceptKind,
    pub minority_rate: f64,
    pub method: MethodKind,
    pub hybrid: bool,
    pub steps: u64,
    pub drift_step: Option<u64>,
    pub reps: usize,
    pub base_seed: u64,
    pub budget: usize,
    pub window: usize,
    pub waiting_time: u64,
    pub detector: DetectorConfig,
    pub fade: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: ConceptKind::Circle,
            minority_rate: 0.1,
            method: MethodKind::Areba,
            hybrid: true,
            steps: 5000,
            drift_step: Some(2501),
            reps: 20,
            base_seed: 0,
            budget: DEFAULT_BUDGET,
            window: DEFAULT_WINDOW,
            waiting_time: 500,
            detector: DetectorConfig::default(),
            fade: DEFAULT_FADE,
        }
    }
}

impl ExperimentConfig {
    pub fn stream_config(&self, rep: usize) -> StreamConfig {
        StreamConfig {
            kind: self.dataset,
            minority_rate: self.minority_rate,
            total_steps: self.steps,
            drift_step: self.drift_step,
            seed: self.rep_seed(rep),
        }
    }

    pub fn learner_config(&self) -> LearnerConfig {
        LearnerConfig {
            budget: self.budget,
            window: self.window,
            waiting_time: self.waiting_time,
            detector: self.detector,
            ..LearnerConfig::new(self.method, self.hybrid)
        }
    }

    /// Seed shared by the stream and the learner of repetition `rep`.
    pub fn rep_seed(&self, rep: usize) -> u64 {
        self.base_seed.wrapping_add(rep as u64)
    }

    pub fn validate(&self) -> Result<()> {
        if self.reps == 0 {
            return Err(Error::InvalidArgument("reps must be at least 1".into()));
        }
        if !(self.fade > 0.0 && self.fade <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "fading factor must lie in (0, 1], got {}",
                self.fade
            )));
        }
        self.stream_config(0).validate()?;
        self.learner_config().validate()
    }
}

/// Per-step G-mean and non-trivial detector events of one repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct RepRun {
    pub gmean: Vec<f64>,
    pub events: Vec<(u64, DetectionEvent)>,
}

pub fn run_rep(config: &ExperimentConfig, rep: usize) -> Result<RepRun> {
    let stream = Stream::new(config.stream_config(rep))?;
    let mut learner = Learner::new(config.learner_config(), config.rep_seed(rep))?;
    let mut metric = FadedGMean::new(config.fade);
    let mut gmean = Vec::with_capacity(config.steps as usize);
    let mut events = Vec::new();
    for ex in stream {
        let ex = ex?;
        let report = learner.step(ex.x, ex.y)?;
        gmean.push(metric.update(ex.y, report.prediction));
        if report.event != DetectionEvent::None {
            events.push((report.t, report.event));
        }
    }
    Ok(RepRun { gmean, events })
}

/// Runs every repetition (in parallel); results are ordered by repetition.
pub fn run_cell(config: &ExperimentConfig) -> Result<Vec<RepRun>> {
    config.validate()?;
    (0..config.reps)
        .into_par_iter()
        .map(|rep| run_rep(config, rep))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStat {
    pub mean: f64,
    /// Sample standard deviation over repetitions divided by `sqrt(reps)`;
    /// zero for a single repetition.
    pub stderr: f64,
}

/// Column-wise mean and standard error of a `reps x steps` matrix.
pub fn aggregate<R: AsRef<[f64]>>(matrix: &[R]) -> Result<Vec<StepStat>> {
    let first = matrix
        .first()
        .ok_or_else(|| Error::InvalidArgument("no repetitions to aggregate".into()))?;
    let steps = first.as_ref().len();
    if steps == 0 {
        return Err(Error::InvalidArgument("repetitions have no steps".into()));
    }
    if matrix.iter().any(|row| row.as_ref().len() != steps) {
        return Err(Error::InvalidArgument(
            "repetitions differ in length".into(),
        ));
    }
    let n = matrix.len() as f64;
    Ok((0..steps)
        .map(|j| {
            let mean = matrix.iter().map(|r| r.as_ref()[j]).sum::<f64>() / n;
            let stderr = if matrix.len() > 1 {
                let ss: f64 = matrix
                    .iter()
                    .map(|r| {
                        let d = r.as_ref()[j] - mean;
                        d * d
                    })
                    .sum();
                (ss / (n - 1.0)).sqrt() / n.sqrt()
            } else {
                0.0
            };
            StepStat { mean, stderr }
        })
        .collect())
}

pub fn gmean_matrix(runs: &[RepRun]) -> Vec<&[f64]> {
    runs.iter().map(|r| r.gmean.as_slice()).collect()
}

/// `step,mean_gmean,stderr` with 1-based steps.
pub fn write_csv<W: Write>(mut out: W, stats: &[StepStat]) -> std::io::Result<()> {
    writeln!(out, "step,mean_gmean,stderr")?;
    for (i, s) in stats.iter().enumerate() {
        writeln!(out, "{},{:?},{:?}", i + 1, s.mean, s.stderr)?;
    }
    Ok(())
}

/// `rep,t,event` lines.
pub fn write_events<W: Write>(mut out: W, runs: &[RepRun]) -> std::io::Result<()> {
    for (rep, run) in runs.iter().enumerate() {
        for (t, event) in &run.events {
            writeln!(out, "{rep},{t},{event}")?;
        }
    }
    Ok(())
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
];

/// Line chart of one or more mean curves with their ±stderr bands.
pub fn render_svg(title: &str, series: &[(&str, &[StepStat])], drift_step: Option<u64>) -> String {
    const W: f64 = 800.0;
    const H: f64 = 420.0;
    const LEFT: f64 = 60.0;
    const RIGHT: f64 = 140.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 50.0;
    let plot_w = W - LEFT - RIGHT;
    let plot_h = H - TOP - BOTTOM;
    let steps = series
        .iter()
        .map(|(_, s)| s.len())
        .max()
        .unwrap_or(1)
        .max(1);
    let sx = |step: f64| LEFT + plot_w * (step - 1.0) / ((steps - 1).max(1) as f64);
    let sy = |v: f64| TOP + plot_h * (1.0 - v.clamp(0.0, 1.0));

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        LEFT + plot_w / 2.0,
        xml_escape(title)
    );
    for i in 0..=5 {
        let v = i as f64 / 5.0;
        let y = sy(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#dddddd"/><text x="{:.2}" y="{:.2}" text-anchor="end">{v:.1}</text>"##,
            LEFT + plot_w,
            LEFT - 6.0,
            y + 4.0
        );
    }
    for i in 0..=5 {
        let step = 1.0 + (steps - 1) as f64 * i as f64 / 5.0;
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            sx(step),
            TOP + plot_h + 18.0,
            step.round() as u64
        );
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">step</text>"#,
        LEFT + plot_w / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">prequential G-mean</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );
    if let Some(d) = drift_step {
        let x = sx(d as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{x:.2}" y1="{TOP}" x2="{x:.2}" y2="{:.2}" stroke="black" stroke-dasharray="6,4"/>"#,
            TOP + plot_h
        );
    }

    for (idx, (name, stats)) in series.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        if stats.is_empty() {
            continue;
        }
        let mut band = String::new();
        for (i, s) in stats.iter().enumerate() {
            let _ = write!(
                band,
                "{:.2},{:.2} ",
                sx((i + 1) as f64),
                sy(s.mean + s.stderr)
            );
        }
        for (i, s) in stats.iter().enumerate().rev() {
            let _ = write!(
                band,
                "{:.2},{:.2} ",
                sx((i + 1) as f64),
                sy(s.mean - s.stderr)
            );
        }
        let _ = writeln!(
            svg,
            r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
            band.trim_end()
        );
        let mut line = String::new();
        for (i, s) in stats.iter().enumerate() {
            let _ = write!(line, "{:.2},{:.2} ", sx((i + 1) as f64), sy(s.mean));
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            line.trim_end()
        );
        let ly = TOP + 16.0 + 18.0 * idx as f64;
        let lx = LEFT + plot_w + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="3"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 20.0,
            lx + 26.0,
            ly + 4.0,
            xml_escape(name)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_matrix_has_zero_stderr() {
        let m = vec![vec![1.0; 4]; 3];
        let stats = aggregate(&m).unwrap();
        assert!(stats.iter().all(|s| s.mean == 1.0 && s.stderr == 0.0));
        let mut buf = Vec::new();
        write_csv(&mut buf, &stats).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("step,mean_gmean,stderr"));
        assert_eq!(text.lines().nth(1), Some("1,1.0,0.0"));
        assert_eq!(text.lines().count(), 5);
    }

    #[test]
    fn two_rep_stderr() {
        let stats = aggregate(&[vec![0.4], vec![0.6]]).unwrap();
        assert!((stats[0].mean - 0.5).abs() < 1e-15);
        assert!((stats[0].stderr - 0.1).abs() < 1e-12);
    }

    #[test]
    fn aggregate_rejects_ragged_or_empty() {
        assert!(aggregate::<Vec<f64>>(&[]).is_err());
        assert!(aggregate(&[vec![0.1, 0.2], vec![0.3]]).is_err());
    }

    #[test]
    fn event_lines() {
        let runs = vec![
            RepRun {
                gmean: vec![],
                events: vec![(600, DetectionEvent::WarningRaised)],
            },
            RepRun {
                gmean: vec![],
                events: vec![(700, DetectionEvent::DriftDetected)],
            },
        ];
        let mut buf = Vec::new();
        write_events(&mut buf, &runs).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "0,600,warning\n1,700,drift\n"
        );
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.reps = 0;
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig {
            budget: 3,
            ..ExperimentConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
