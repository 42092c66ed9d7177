//! Sequential maximum-confidence planning: build the stage tree over
//! successive failure subspaces, compute per-stage and total figures of
//! merit, and compare against the minimum-error strategy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Tolerances;
use crate::neumark::{self, FailureSpace, StageRealization};
use crate::povm;
use crate::symmetric::SymmetricSet;

/// One stage of the sequential measurement.
#[derive(Debug, Clone)]
pub struct StageRecord {
    /// 1-based stage index.
    pub index: usize,
    /// Subspace dimension D_s at this stage.
    pub dim: usize,
    /// Multiplicity of the stage's minimal magnitude group.
    pub multiplicity: usize,
    /// Confidence D_s/N for a conclusive outcome at this stage.
    pub confidence: f64,
    /// 1 − D_s·c_min,s² for non-uniform stages, exactly 0 when uniform.
    pub failure_probability: f64,
    pub realization: StageRealization,
}

/// How the stage sequence ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    /// Final stage has uniform coefficients: no inconclusive outcome remains.
    UniformCoefficients,
    /// Failure space after the final stage is one-dimensional.
    OneDimensionalFailure,
}

/// The full sequential plan with its totals.
#[derive(Debug, Clone)]
pub struct SmcPlan {
    pub order: usize,
    pub stages: Vec<StageRecord>,
    pub termination: Termination,
    pub p_correct_total: f64,
    pub p_inconclusive_total: f64,
    pub p_error_total: f64,
}

/// Build the sequential plan for a root set by iterating the MC stage over
/// failure descendants until the coefficients are uniform or the failure
/// space collapses to one dimension.
pub fn plan(set: &SymmetricSet, tol: &Tolerances) -> Result<SmcPlan> {
    let n = set.order() as f64;
    let mut stages = Vec::new();
    let mut current = set.clone();
    let mut reach = 1.0; // probability of reaching the current stage
    let mut p_correct = 0.0;
    let termination;

    loop {
        let index = stages.len() + 1;
        let profile = current.coefficient_profile(tol);
        let uniform = profile.magnitude_groups.len() == 1;
        let dim = current.dim();
        let confidence = dim as f64 / n;
        let failure_probability = if uniform {
            0.0
        } else {
            1.0 - dim as f64 * profile.c_min * profile.c_min
        };
        let realization = neumark::realize_stage(&current, tol)?;
        let descendant = realization.failure_space.clone();

        p_correct += reach * (1.0 - failure_probability) * confidence;
        reach *= failure_probability;

        stages.push(StageRecord {
            index,
            dim,
            multiplicity: profile.multiplicity_d,
            confidence,
            failure_probability,
            realization,
        });

        match descendant {
            FailureSpace::Empty => {
                termination = Termination::UniformCoefficients;
                break;
            }
            FailureSpace::OneDimensional => {
                termination = Termination::OneDimensionalFailure;
                break;
            }
            FailureSpace::Set(next) => current = next,
        }
    }

    let p_inconclusive = match termination {
        Termination::UniformCoefficients => 0.0,
        Termination::OneDimensionalFailure => reach,
    };
    let p_error = (1.0 - p_correct - p_inconclusive).max(0.0);
    if p_correct + p_inconclusive > 1.0 + tol.eps_prob {
        return Err(Error::Probability(format!(
            "totals exceed 1: P_corr {p_correct} + P_? {p_inconclusive}"
        )));
    }

    Ok(SmcPlan {
        order: set.order(),
        stages,
        termination,
        p_correct_total: p_correct,
        p_inconclusive_total: p_inconclusive,
        p_error_total: p_error,
    })
}

/// Direct closed-form total correct probability from the stage records:
/// Σ_s (Π_{t<s} f_t)(1 − f_s)(D_s/N).
pub fn p_correct_closed_form(plan: &SmcPlan) -> f64 {
    let n = plan.order as f64;
    let mut prefix = 1.0;
    let mut total = 0.0;
    for stage in &plan.stages {
        total += prefix * (1.0 - stage.failure_probability) * stage.dim as f64 / n;
        prefix *= stage.failure_probability;
    }
    total
}

/// Side-by-side comparison with the minimum-error strategy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeComparison {
    pub p_correct_smc: f64,
    pub p_correct_me: f64,
    pub stage_confidences: Vec<f64>,
    pub me_confidence: f64,
}

/// Compare the sequential plan against the ME measurement on the same set.
/// The SMC total never exceeds the ME total (up to eps_prob).
pub fn compare_me(set: &SymmetricSet, tol: &Tolerances) -> Result<MeComparison> {
    let p = plan(set, tol)?;
    let (_, me_report) = povm::me_povm(set);
    let me_confidence = me_report.confidence_per_outcome[0];
    let cmp = MeComparison {
        p_correct_smc: p.p_correct_total,
        p_correct_me: me_confidence,
        stage_confidences: p.stages.iter().map(|s| s.confidence).collect(),
        me_confidence,
    };
    if cmp.p_correct_smc > cmp.p_correct_me + tol.eps_prob {
        return Err(Error::Probability(format!(
            "SMC total {} exceeds ME total {}",
            cmp.p_correct_smc, cmp.p_correct_me
        )));
    }
    Ok(cmp)
}

/// One row of the four-state qutrit sweep over (|c0|, |c1|).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub c0_abs: f64,
    pub c1_abs: f64,
    pub mc_stage1_confidence: f64,
    pub mc_stage2_confidence: f64,
    pub me_confidence: f64,
    pub p_fail_stage1: f64,
    pub p_fail_stage2: f64,
    pub p_corr_stage1_only: f64,
    pub p_corr_smc: f64,
    pub p_corr_me: f64,
    pub p_inconclusive_smc: f64,
}

/// Frozen CSV column order for the sweep output.
pub const SWEEP_HEADER: &str = "c0_abs,c1_abs,mc_stage1_confidence,mc_stage2_confidence,\
me_confidence,p_fail_stage1,p_fail_stage2,p_corr_stage1_only,p_corr_smc,p_corr_me,\
p_inconclusive_smc";

/// Result of a sweep: valid rows plus skipped points with diagnostics.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub skipped: Vec<(f64, f64, String)>,
}

fn qutrit_point(c0: f64, c1: f64) -> Result<SymmetricSet> {
    let rem = 1.0 - c0 * c0 - c1 * c1;
    if c0 <= 0.0 || c1 <= 0.0 || rem <= 0.0 {
        return Err(Error::InvalidSet(format!(
            "infeasible grid point (|c0|, |c1|) = ({c0}, {c1})"
        )));
    }
    let c2 = rem.sqrt();
    SymmetricSet::make_root_set(
        4,
        &[
            num_complex::Complex64::new(c0, 0.0),
            num_complex::Complex64::new(c1, 0.0),
            num_complex::Complex64::new(c2, 0.0),
        ],
    )
}

/// Evaluate the closed-form qutrit surfaces over a grid of (|c0|, |c1|)
/// points. Infeasible points are skipped with a diagnostic.
pub fn sweep_qutrit(points: &[(f64, f64)], tol: &Tolerances) -> SweepResult {
    let mut rows = Vec::with_capacity(points.len());
    let mut skipped = Vec::new();
    for &(c0, c1) in points {
        match sweep_point(c0, c1, tol) {
            Ok(row) => rows.push(row),
            Err(e) => skipped.push((c0, c1, e.to_string())),
        }
    }
    SweepResult { rows, skipped }
}

fn sweep_point(c0: f64, c1: f64, tol: &Tolerances) -> Result<SweepRow> {
    let set = qutrit_point(c0, c1)?;
    let p = plan(&set, tol)?;
    let (_, me_report) = povm::me_povm(&set);
    let me_confidence = me_report.confidence_per_outcome[0];

    let f1 = p.stages[0].failure_probability;
    // P'(?) is defined so that P_?^SMC = P(?)·P'(?) on every row: the actual
    // stage-2 failure probability when a second stage exists, 1 when the
    // failure space after stage 1 is one-dimensional, 0 when stage 1 ends
    // with uniform coefficients.
    let f2 = if p.stages.len() >= 2 {
        p.stages[1].failure_probability
    } else {
        match p.termination {
            Termination::UniformCoefficients => 0.0,
            Termination::OneDimensionalFailure => 1.0,
        }
    };
    let p_corr_stage1_only = (1.0 - f1) * p.stages[0].confidence;

    Ok(SweepRow {
        c0_abs: c0,
        c1_abs: c1,
        mc_stage1_confidence: 0.75,
        mc_stage2_confidence: 0.5,
        me_confidence,
        p_fail_stage1: f1,
        p_fail_stage2: f2,
        p_corr_stage1_only,
        p_corr_smc: p.p_correct_total,
        p_corr_me: me_confidence,
        p_inconclusive_smc: p.p_inconclusive_total,
    })
}

/// Format a float with 12 significant digits.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}

/// Render sweep rows as UTF-8 CSV with the frozen header.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 160 + SWEEP_HEADER.len());
    out.push_str(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let cols = [
            r.c0_abs,
            r.c1_abs,
            r.mc_stage1_confidence,
            r.mc_stage2_confidence,
            r.me_confidence,
            r.p_fail_stage1,
            r.p_fail_stage2,
            r.p_corr_stage1_only,
            r.p_corr_smc,
            r.p_corr_me,
            r.p_inconclusive_smc,
        ];
        let line: Vec<String> = cols.iter().map(|&v| sig12(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}
