//! Seeded Born-rule sampling of the full SMC chain, used to verify the
//! analytic confidences and totals empirically.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smc::SmcPlan;

/// Master seed and trial count for a simulation run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SeedConfig {
    pub seed: u64,
    pub trials: u64,
}

/// Per-stage tallies.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct StageCounts {
    pub conclusive_correct: u64,
    pub conclusive_wrong: u64,
    pub descended: u64,
}

/// Empirical estimate with its standard error √(p(1−p)/n).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub standard_error: f64,
    pub samples: u64,
}

/// Aggregated simulation outcome. Bit-identical for identical seed+trials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimSummary {
    pub seed: u64,
    pub trials: u64,
    pub stage_counts: Vec<StageCounts>,
    pub inconclusive_count: u64,
    pub stage_confidence: Vec<Estimate>,
    pub p_correct: f64,
    pub p_inconclusive: f64,
    pub p_error: f64,
}

fn estimate(successes: u64, n: u64) -> Estimate {
    if n == 0 {
        return Estimate {
            value: 0.0,
            standard_error: 0.0,
            samples: 0,
        };
    }
    let p = successes as f64 / n as f64;
    Estimate {
        value: p,
        standard_error: (p * (1.0 - p) / n as f64).sqrt(),
        samples: n,
    }
}

/// Per-stage conclusive-outcome distributions P(k|u_j) with inverse-CDF rows.
struct StageTables {
    failure_probability: f64,
    /// cdf[j][k] = cumulative probability of outcome k given success state j.
    cdf: Vec<Vec<f64>>,
}

fn build_tables(plan: &SmcPlan, eps_prob: f64) -> Result<Vec<StageTables>> {
    plan.stages
        .iter()
        .map(|stage| {
            let n = plan.order;
            let mut cdf = Vec::with_capacity(n);
            for j in 0..n {
                let dist = stage.realization.conclusive_measure.outcome_distribution(j)?;
                let total: f64 = dist.iter().sum();
                if (total - 1.0).abs() > eps_prob {
                    return Err(Error::Probability(format!(
                        "stage {} outcome distribution sums to {total}",
                        stage.index
                    )));
                }
                let mut acc = 0.0;
                let row: Vec<f64> = dist
                    .iter()
                    .map(|p| {
                        acc += p / total;
                        acc
                    })
                    .collect();
                cdf.push(row);
            }
            Ok(StageTables {
                failure_probability: stage.failure_probability,
                cdf,
            })
        })
        .collect()
}

fn sample_cdf(cdf: &[f64], u: f64) -> usize {
    cdf.iter()
        .position(|&c| u < c)
        .unwrap_or(cdf.len() - 1)
}

/// Run the seeded simulation. Each trial derives its own ChaCha substream
/// from the master seed, so the summary is independent of evaluation order.
pub fn simulate(plan: &SmcPlan, cfg: &SeedConfig) -> Result<SimSummary> {
    if cfg.trials == 0 {
        return Err(Error::ContractViolation("trials must be >= 1".into()));
    }
    let tables = build_tables(plan, 1e-10)?;
    let n = plan.order as u64;

    let mut stage_counts = vec![StageCounts::default(); plan.stages.len()];
    let mut inconclusive_count = 0u64;

    for trial in 0..cfg.trials {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(trial);
        let j = rng.gen_range(0..n) as usize;

        let mut concluded = false;
        for (s, table) in tables.iter().enumerate() {
            let fail: bool = rng.gen::<f64>() < table.failure_probability;
            if !fail {
                let k = sample_cdf(&table.cdf[j], rng.gen::<f64>());
                if k == j {
                    stage_counts[s].conclusive_correct += 1;
                } else {
                    stage_counts[s].conclusive_wrong += 1;
                }
                concluded = true;
                break;
            }
            if s + 1 < tables.len() {
                stage_counts[s].descended += 1;
            }
        }
        if !concluded {
            inconclusive_count += 1;
        }
    }

    let stage_confidence: Vec<Estimate> = stage_counts
        .iter()
        .map(|c| estimate(c.conclusive_correct, c.conclusive_correct + c.conclusive_wrong))
        .collect();

    let correct: u64 = stage_counts.iter().map(|c| c.conclusive_correct).sum();
    let wrong: u64 = stage_counts.iter().map(|c| c.conclusive_wrong).sum();
    let t = cfg.trials as f64;

    Ok(SimSummary {
        seed: cfg.seed,
        trials: cfg.trials,
        stage_counts,
        inconclusive_count,
        stage_confidence,
        p_correct: correct as f64 / t,
        p_inconclusive: inconclusive_count as f64 / t,
        p_error: wrong as f64 / t,
    })
}

/// One statistic checked against its analytic value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatCheck {
    pub name: String,
    pub analytic: f64,
    pub empirical: f64,
    pub z_score: f64,
    pub pass: bool,
    /// Set when the standard error is degenerate (too few samples).
    pub low_power: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub checks: Vec<StatCheck>,
    pub pass: bool,
    /// Acceptance threshold on |z|.
    pub z_threshold: f64,
}

const Z_THRESHOLD: f64 = 4.0;

fn check(name: &str, analytic: f64, empirical: f64, se: f64, samples: u64) -> StatCheck {
    let low_power = se == 0.0 || samples < 10;
    let z_score = if se > 0.0 {
        (empirical - analytic) / se
    } else if (empirical - analytic).abs() <= f64::EPSILON {
        0.0
    } else {
        f64::INFINITY
    };
    StatCheck {
        name: name.to_string(),
        analytic,
        empirical,
        z_score,
        pass: low_power || z_score.abs() <= Z_THRESHOLD,
        low_power,
    }
}

/// Z-score every empirical statistic against its analytic value from the
/// plan; pass iff |z| <= 4 (degenerate standard errors are reported but
/// marked low-power rather than failed).
pub fn consistency_report(summary: &SimSummary, plan: &SmcPlan) -> ConsistencyReport {
    let mut checks = Vec::new();
    for (s, stage) in plan.stages.iter().enumerate() {
        let est = &summary.stage_confidence[s];
        checks.push(check(
            &format!("stage{}_confidence", stage.index),
            stage.confidence,
            est.value,
            est.standard_error,
            est.samples,
        ));
    }
    let t = summary.trials;
    for (name, analytic, count) in [
        (
            "p_correct",
            plan.p_correct_total,
            (summary.p_correct * t as f64).round() as u64,
        ),
        (
            "p_inconclusive",
            plan.p_inconclusive_total,
            summary.inconclusive_count,
        ),
        (
            "p_error",
            plan.p_error_total,
            (summary.p_error * t as f64).round() as u64,
        ),
    ] {
        let est = estimate(count, t);
        checks.push(check(name, analytic, est.value, est.standard_error, t));
    }
    let pass = checks.iter().all(|c| c.pass);
    ConsistencyReport {
        checks,
        pass,
        z_threshold: Z_THRESHOLD,
    }
}
