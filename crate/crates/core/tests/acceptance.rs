//! Acceptance criteria. Each test prints one `[PASS]`/`[FAIL]` line and
//! asserts at the pinned tolerance. Run with `--nocapture` to see the lines.

use hareba::detector::{DetectionEvent, Detector};
use hareba::eval::FadedGMean;
use hareba::experiment::{self, ExperimentConfig};
use hareba::memory::DualQueue;
use hareba::net::{Network, TrainBatch, PARAM_COUNT};
use hareba::stream::{ConceptKind, Example, Stream, StreamConfig};
use hareba::MethodKind;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const STEPS: u64 = 5000;
const DRIFT_STEP: u64 = 2501;
const REPS: usize = 20;
const ORDERING_SLACK: f64 = 0.01;

fn verdict(id: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "[{}] criterion {id}: {name} -- {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn dummy(t: u64) -> Example {
    Example {
        x: [0.5, 0.5],
        y: 0,
        t,
    }
}

fn grid_config(
    dataset: ConceptKind,
    rate: f64,
    method: MethodKind,
    hybrid: bool,
) -> ExperimentConfig {
    ExperimentConfig {
        dataset,
        minority_rate: rate,
        method,
        hybrid,
        steps: STEPS,
        drift_step: Some(DRIFT_STEP),
        reps: REPS,
        base_seed: 0,
        ..ExperimentConfig::default()
    }
}

fn mean_curve(config: &ExperimentConfig) -> Vec<f64> {
    let runs = experiment::run_cell(config).unwrap();
    experiment::aggregate(&experiment::gmean_matrix(&runs))
        .unwrap()
        .into_iter()
        .map(|s| s.mean)
        .collect()
}

#[test]
fn criterion_1_gradient_correctness() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let h = 1e-5;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let net = Network::init(rng.random());
        let n = rng.random_range(1..=16);
        let inputs = (0..n)
            .map(|_| ([rng.random(), rng.random()], u8::from(rng.random_bool(0.3))))
            .collect();
        let weights = (0..n).map(|_| rng.random_range(1.0..19.0)).collect();
        let batch = TrainBatch::new(inputs, weights).unwrap();
        let analytic = net.gradient(&batch);
        for i in 0..PARAM_COUNT {
            let mut plus = *net.params();
            let mut minus = *net.params();
            plus[i] += h;
            minus[i] -= h;
            let numeric = (Network::from_params(plus).batch_loss(&batch)
                - Network::from_params(minus).batch_loss(&batch))
                / (2.0 * h);
            let err = (analytic[i] - numeric).abs();
            let rel = if err <= 1e-6 {
                0.0
            } else {
                err / analytic[i].abs().max(numeric.abs())
            };
            worst = worst.max(rel);
        }
    }
    let pass = worst < 1e-4;
    verdict(
        1,
        "gradient vs central differences",
        pass,
        &format!("max relative error {worst:.3e} (< 1e-4)"),
    );
    assert!(pass);
}

#[test]
fn criterion_2_detector_false_alarms() {
    let mut total = 0usize;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = Detector::default();
        for t in 1..=100_000u64 {
            let s = u8::from(rng.random_bool(0.9));
            if d.step(s, dummy(t), t) == DetectionEvent::DriftDetected {
                total += 1;
            }
        }
    }
    let mean = total as f64 / 20.0;
    let pass = mean <= 1.0;
    verdict(
        2,
        "stationary false-alarm bound",
        pass,
        &format!("{mean:.2} drift alarms per run (<= 1)"),
    );
    assert!(pass);
}

#[test]
fn criterion_3_detector_sensitivity() {
    let switch = 1500u64;
    let mut detected = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let mut d = Detector::default();
        for t in 1..=switch + 500 {
            let p = if t <= switch { 0.95 } else { 0.5 };
            let event = d.step(u8::from(rng.random_bool(p)), dummy(t), t);
            if t > switch && event == DetectionEvent::DriftDetected {
                detected += 1;
                break;
            }
        }
    }
    let pass = detected >= 19;
    verdict(
        3,
        "detector sensitivity",
        pass,
        &format!("{detected}/20 seeds detected within 500 steps (>= 19)"),
    );
    assert!(pass);
}

#[test]
fn criterion_4_areba_balance_fuzz() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut violations = 0usize;
    let mut appends = 0usize;
    for _ in 0..100_000 {
        let budget = 2 * rng.random_range(1..=25);
        let len = rng.random_range(1..=120);
        let p = rng.random::<f64>();
        let mut dq = DualQueue::new(budget);
        for t in 0..len {
            dq.append(Example {
                x: [0.0, 0.0],
                y: u8::from(rng.random_bool(p)),
                t,
            });
            appends += 1;
            let (np, nn) = (dq.positives().len(), dq.negatives().len());
            if np > nn + 1 || nn > np + 1 || np + nn > budget {
                violations += 1;
            }
        }
    }
    let pass = violations == 0;
    verdict(
        4,
        "AREBA balance invariant",
        pass,
        &format!("{violations} violations over {appends} appends"),
    );
    assert!(pass);
}

#[test]
fn criterion_5_prequential_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let len = rng.random_range(1..=300);
        let mut m = FadedGMean::new(1.0);
        let mut confusion = [[0u64; 2]; 2];
        for _ in 0..len {
            let y = u8::from(rng.random_bool(0.3));
            let y_hat = u8::from(rng.random_bool(0.5));
            confusion[usize::from(y)][usize::from(y_hat)] += 1;
            let g = m.update(y, y_hat);
            let pos = confusion[1][0] + confusion[1][1];
            let neg = confusion[0][0] + confusion[0][1];
            let batch = if pos == 0 || neg == 0 {
                0.0
            } else {
                let recall = confusion[1][1] as f64 / pos as f64;
                let specificity = confusion[0][0] as f64 / neg as f64;
                (recall * specificity).sqrt()
            };
            worst = worst.max((g - batch).abs());
        }
    }
    let pass = worst <= 1e-12;
    verdict(
        5,
        "fade=1 prequential equals batch G-mean",
        pass,
        &format!("max deviation {worst:.3e} (<= 1e-12)"),
    );
    assert!(pass);
}

#[test]
fn criterion_6_stream_rate_control() {
    let mut lines = Vec::new();
    let mut pass = true;
    for kind in ConceptKind::ALL {
        for rate in [0.1, 0.01] {
            let config = StreamConfig {
                kind,
                minority_rate: rate,
                total_steps: 20_000,
                drift_step: Some(10_001),
                seed: 6,
            };
            let mut counts = [[0usize; 2]; 2];
            for ex in Stream::new(config).unwrap() {
                let ex = ex.unwrap();
                counts[usize::from(ex.t >= 10_001)][usize::from(ex.y)] += 1;
            }
            for (phase, c) in counts.iter().enumerate() {
                let n = (c[0] + c[1]) as f64;
                let empirical = c[1] as f64 / n;
                let bound = 4.0 * (rate * (1.0 - rate) / n).sqrt();
                let ok = (empirical - rate).abs() <= bound;
                pass &= ok;
                lines.push(format!(
                    "{kind}@{rate} {}: {empirical:.4}{}",
                    if phase == 0 { "pre" } else { "post" },
                    if ok { "" } else { " (out of bound)" }
                ));
            }
        }
    }
    verdict(6, "stream rate control", pass, &lines.join(", "));
    assert!(pass);
}

#[test]
fn criterion_7_hybrid_beats_incremental_after_drift() {
    let mut pass = true;
    let mut lines = Vec::new();
    let window = DRIFT_STEP as usize - 1..DRIFT_STEP as usize - 1 + 500;
    for kind in ConceptKind::ALL {
        let hybrid = mean_curve(&grid_config(kind, 0.1, MethodKind::Areba, true));
        let passive = mean_curve(&grid_config(kind, 0.1, MethodKind::Areba, false));
        let h = hybrid[window.clone()].iter().sum::<f64>() / 500.0;
        let p = passive[window.clone()].iter().sum::<f64>() / 500.0;
        pass &= h > p;
        lines.push(format!("{kind}: hybrid {h:.4} vs incremental {p:.4}"));
    }
    verdict(
        7,
        "hybrid AREBA > incremental AREBA post-drift",
        pass,
        &lines.join(", "),
    );
    assert!(pass);
}

#[test]
fn criterion_8_comparative_ordering() {
    let mut failures = Vec::new();
    for kind in ConceptKind::ALL {
        for rate in [0.1, 0.01] {
            let finals: Vec<(MethodKind, f64)> = MethodKind::ALL
                .iter()
                .map(|&m| {
                    let curve = mean_curve(&grid_config(kind, rate, m, true));
                    (m, *curve.last().unwrap())
                })
                .collect();
            let get = |m: MethodKind| finals.iter().find(|(k, _)| *k == m).unwrap().1;
            let areba = get(MethodKind::Areba);
            let baseline = get(MethodKind::Baseline);
            let summary: Vec<String> = finals.iter().map(|(m, g)| format!("{m}={g:.4}")).collect();
            println!("  {kind}@{rate}: {}", summary.join(" "));
            for &(m, g) in &finals {
                if m != MethodKind::Areba && areba + ORDERING_SLACK < g {
                    failures.push(format!("{kind}@{rate}: areba {areba:.4} < {m} {g:.4}"));
                }
                if m != MethodKind::Baseline && baseline > g + ORDERING_SLACK {
                    failures.push(format!(
                        "{kind}@{rate}: baseline {baseline:.4} > {m} {g:.4}"
                    ));
                }
            }
        }
    }
    let pass = failures.is_empty();
    let detail = if pass {
        "AREBA best and Baseline worst on all six settings (slack 0.01)".to_string()
    } else {
        failures.join("; ")
    };
    verdict(8, "comparative ordering of hybrid methods", pass, &detail);
    assert!(pass, "{detail}");
}

#[test]
fn criterion_9_determinism() {
    let config = ExperimentConfig {
        dataset: ConceptKind::Sine,
        method: MethodKind::Oob,
        steps: 2000,
        drift_step: Some(1001),
        reps: 3,
        base_seed: 77,
        ..ExperimentConfig::default()
    };
    let csv = || {
        let runs = experiment::run_cell(&config).unwrap();
        let stats = experiment::aggregate(&experiment::gmean_matrix(&runs)).unwrap();
        let mut buf = Vec::new();
        experiment::write_csv(&mut buf, &stats).unwrap();
        buf
    };
    let pass = csv() == csv();
    verdict(
        9,
        "byte-identical reruns",
        pass,
        "same config, two runs, CSV bytes compared",
    );
    assert!(pass);
}
