//! Command-line settings, `key=value` config files and result layout.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::experiment::{self, ExperimentConfig, RepRun};
use crate::learner::MethodKind;

#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub experiment: ExperimentConfig,
    /// Root directory; each cell writes to its own subdirectory.
    pub out: PathBuf,
    pub plot: bool,
    pub events_log: bool,
    /// Methods run on identical streams instead of `experiment.method`.
    pub compare: Option<Vec<MethodKind>>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            experiment: ExperimentConfig::default(),
            out: PathBuf::from("results"),
            plot: false,
            events_log: false,
            compare: None,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("bad value `{value}` for `{key}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(Error::InvalidArgument(format!(
            "bad boolean `{value}` for `{key}`"
        ))),
    }
}

pub fn parse_method_list(value: &str) -> Result<Vec<MethodKind>> {
    let value = value.trim();
    if value.eq_ignore_ascii_case("all") {
        return Ok(MethodKind::ALL.to_vec());
    }
    let methods = value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse())
        .collect::<Result<Vec<MethodKind>>>()?;
    if methods.is_empty() {
        return Err(Error::InvalidArgument("empty method list".into()));
    }
    Ok(methods)
}

impl Settings {
    /// Applies one setting; keys match the long CLI flags (`-` or `_`).
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let exp = &mut self.experiment;
        match key.trim().replace('_', "-").as_str() {
            "dataset" => exp.dataset = value.trim().parse()?,
            "imbalance" => exp.minority_rate = parse(key, value)?,
            "method" => exp.method = value.trim().parse()?,
            "hybrid" => exp.hybrid = parse_bool(key, value)?,
            "steps" => exp.steps = parse(key, value)?,
            "drift-step" => {
                exp.drift_step = match value.trim() {
                    "none" | "off" | "0" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "reps" => exp.reps = parse(key, value)?,
            "seed" => exp.base_seed = parse(key, value)?,
            "budget" => exp.budget = parse(key, value)?,
            "window" => exp.window = parse(key, value)?,
            "waiting-time" => exp.waiting_time = parse(key, value)?,
            "expire-time" => exp.detector.expire_time = parse(key, value)?,
            "score-window" => exp.detector.score_window = parse(key, value)?,
            "drift-window" => exp.detector.drift_window = parse(key, value)?,
            "beta-improve" => exp.detector.beta_improve = parse(key, value)?,
            "beta-warn" => exp.detector.beta_warn = parse(key, value)?,
            "beta-drift" => exp.detector.beta_drift = parse(key, value)?,
            "fade" => exp.fade = parse(key, value)?,
            "out" => self.out = PathBuf::from(value.trim()),
            "plot" => self.plot = parse_bool(key, value)?,
            "events-log" => self.events_log = parse_bool(key, value)?,
            "compare" => self.compare = Some(parse_method_list(value)?),
            other => return Err(Error::InvalidArgument(format!("unknown setting `{other}`"))),
        }
        Ok(())
    }

    pub fn apply_all(&mut self, pairs: &BTreeMap<String, String>) -> Result<()> {
        pairs.iter().try_for_each(|(k, v)| self.apply(k, v))
    }

    pub fn methods(&self) -> Vec<MethodKind> {
        self.compare
            .clone()
            .unwrap_or_else(|| vec![self.experiment.method])
    }
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidArgument(format!("line {}: expected key=value", i + 1)))?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
    parse_key_values(&text)
}

fn mode_name(hybrid: bool) -> &'static str {
    if hybrid {
        "hybrid"
    } else {
        "passive"
    }
}

/// `<dataset>_<rate>_<method>_<hybrid|passive>`.
pub fn cell_name(config: &ExperimentConfig) -> String {
    format!(
        "{}_{}_{}_{}",
        config.dataset,
        config.minority_rate,
        config.method,
        mode_name(config.hybrid)
    )
}

/// Result of one method's cell.
#[derive(Debug, Clone)]
pub struct CellOutput {
    pub method: MethodKind,
    pub dir: PathBuf,
    pub runs: Vec<RepRun>,
    pub stats: Vec<experiment::StepStat>,
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(format!("writing {}", path.display()), e))
}

/// Runs each requested method and writes `gmean.csv` (plus `events.log`
/// and `gmean.svg` when enabled) into its cell directory.
pub fn run(settings: &Settings) -> Result<Vec<CellOutput>> {
    let mut outputs = Vec::new();
    for method in settings.methods() {
        let config = ExperimentConfig {
            method,
            ..settings.experiment.clone()
        };
        let runs = experiment::run_cell(&config)?;
        let stats = experiment::aggregate(&experiment::gmean_matrix(&runs))?;
        let dir = settings.out.join(cell_name(&config));
        fs::create_dir_all(&dir)
            .map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;

        let mut csv = Vec::new();
        experiment::write_csv(&mut csv, &stats).expect("writing to memory");
        write_file(&dir.join("gmean.csv"), &csv)?;
        if settings.events_log {
            let mut log = Vec::new();
            experiment::write_events(&mut log, &runs).expect("writing to memory");
            write_file(&dir.join("events.log"), &log)?;
        }
        if settings.plot {
            let svg = experiment::render_svg(
                &cell_name(&config),
                &[(method.name(), &stats)],
                config.drift_step,
            );
            write_file(&dir.join("gmean.svg"), svg.as_bytes())?;
        }
        outputs.push(CellOutput {
            method,
            dir,
            runs,
            stats,
        });
    }

    if settings.plot && outputs.len() > 1 {
        let exp = &settings.experiment;
        let name = format!(
            "{}_{}_compare_{}",
            exp.dataset,
            exp.minority_rate,
            mode_name(exp.hybrid)
        );
        let series: Vec<(&str, &[experiment::StepStat])> = outputs
            .iter()
            .map(|o| (o.method.name(), o.stats.as_slice()))
            .collect();
        let svg = experiment::render_svg(&name, &series, exp.drift_step);
        fs::create_dir_all(&settings.out)
            .map_err(|e| Error::io(format!("creating {}", settings.out.display()), e))?;
        write_file(&settings.out.join(format!("{name}.svg")), svg.as_bytes())?;
    }
    Ok(outputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::ConceptKind;

    #[test]
    fn key_value_file() {
        let text = "# grid\ndataset = sine\nimbalance=0.01\n\nmethod = oob # trailing\nhybrid = false\ncompare = areba,baseline\n";
        let mut s = Settings::default();
        s.apply_all(&parse_key_values(text).unwrap()).unwrap();
        assert_eq!(s.experiment.dataset, ConceptKind::Sine);
        assert_eq!(s.experiment.minority_rate, 0.01);
        assert_eq!(s.experiment.method, MethodKind::Oob);
        assert!(!s.experiment.hybrid);
        assert_eq!(s.methods(), vec![MethodKind::Areba, MethodKind::Baseline]);
    }

    #[test]
    fn bad_settings() {
        let mut s = Settings::default();
        assert!(s.apply("dataset", "spiral").is_err());
        assert!(s.apply("method", "smote").is_err());
        assert!(s.apply("colour", "red").is_err());
        assert!(s.apply("steps", "many").is_err());
        assert!(parse_key_values("just words").is_err());
    }

    #[test]
    fn cell_names() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cell_name(&cfg), "circle_0.1_areba_hybrid");
    }
}
