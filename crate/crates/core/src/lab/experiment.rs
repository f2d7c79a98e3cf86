//! End-to-end trials: generate, validate, select, verify and probe every rejection.

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, FamilyKind};
use super::generate::{generate_family, two_side_domination};
use crate::error::Result;
use crate::geometry::{validate_zygmund, BoxFamily, Measure};
use crate::maximal::{rejected_inclusion_check, InclusionReport};
use crate::selection::{
    product_bound_check, select, verify_selection, Check, CheckTally, SelectionResult, VerificationReport,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Generate,
    Validate,
    Select,
    Verify,
    ProductBound,
    Inclusion,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ProductSummary {
    pub rejections_checked: usize,
    pub pairs_checked: usize,
    pub violations: usize,
    /// Rejections with at least one violating `(r, s)`.
    pub violating_rejections: Vec<usize>,
    /// Prior rectangles dominating the candidate in neither side pair, summed over rejections.
    pub unclassified: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct InclusionSummary {
    pub rejections_checked: usize,
    pub cells_checked: usize,
    pub violating_cells: usize,
    pub violating_measure: f64,
    /// Smallest spanning `max(M₁, M₂)` over rejected cells outside the support.
    pub weakest: Option<f64>,
}

impl InclusionSummary {
    fn from_report(report: &InclusionReport) -> Self {
        InclusionSummary {
            rejections_checked: report.rejected_checked,
            cells_checked: report.cells_checked,
            violating_cells: report.violations.len(),
            violating_measure: report.violating_measure(),
            weakest: report
                .per_rejection
                .iter()
                .filter_map(|c| c.weakest)
                .reduce(f64::min),
        }
    }
}

/// Measurements of one trial that ran every stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub selected: usize,
    pub rejected: usize,
    pub p1_dropped: usize,
    pub union_all: Measure,
    pub union_selected: Measure,
    pub union_rejected: Measure,
    pub measure_ratio: f64,
    pub exp_ratio: f64,
    pub final_integral: f64,
    pub exp_bound: f64,
    pub worst_induction_excess: f64,
    pub verification_passed: bool,
    pub tallies: Vec<CheckTally>,
    pub product: ProductSummary,
    pub inclusion: InclusionSummary,
}

impl TrialOutcome {
    pub fn failed(&self, check: Check) -> usize {
        self.tallies
            .iter()
            .find(|t| t.check == check)
            .map_or(0, |t| t.failed)
    }

    pub fn passed(&self) -> bool {
        self.verification_passed && self.product.violations == 0 && self.inclusion.violating_cells == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TrialStatus {
    Completed(Box<TrialOutcome>),
    Aborted { stage: Stage, error: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// Present unless generation itself failed; enough to replay the trial.
    pub family: Option<BoxFamily>,
    pub status: TrialStatus,
    #[serde(skip)]
    pub selection: Option<SelectionResult>,
    #[serde(skip)]
    pub verification: Option<VerificationReport>,
}

impl TrialRecord {
    pub fn outcome(&self) -> Option<&TrialOutcome> {
        match &self.status {
            TrialStatus::Completed(o) => Some(o),
            TrialStatus::Aborted { .. } => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub count: usize,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub mean: Option<f64>,
    pub median: Option<f64>,
}

impl Distribution {
    pub fn of(values: &[f64]) -> Self {
        if values.is_empty() {
            return Distribution::default();
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            (v[n / 2 - 1] + v[n / 2]) / 2.0
        };
        Distribution {
            count: n,
            min: Some(v[0]),
            max: Some(v[n - 1]),
            mean: Some(v.iter().sum::<f64>() / n as f64),
            median: Some(median),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub completed: usize,
    pub aborted: usize,
    pub passed: usize,
    pub selected: usize,
    pub rejected: usize,
    pub p1_dropped: usize,
    pub measure_ratio: Distribution,
    pub exp_ratio: Distribution,
    pub check_failures: Vec<CheckTally>,
    pub product_violations: usize,
    pub inclusion_violating_cells: usize,
    pub covering_constant: f64,
    pub exp_constant: f64,
}

impl Summary {
    pub fn of(trials: &[TrialRecord]) -> Self {
        let done: Vec<&TrialOutcome> = trials.iter().filter_map(TrialRecord::outcome).collect();
        let check_failures = Check::ALL
            .iter()
            .map(|&check| CheckTally {
                check,
                evaluated: done
                    .iter()
                    .flat_map(|o| &o.tallies)
                    .filter(|t| t.check == check)
                    .map(|t| t.evaluated)
                    .sum(),
                failed: done.iter().map(|o| o.failed(check)).sum(),
            })
            .collect();
        Summary {
            trials: trials.len(),
            completed: done.len(),
            aborted: trials.len() - done.len(),
            passed: done.iter().filter(|o| o.passed()).count(),
            selected: done.iter().map(|o| o.selected).sum(),
            rejected: done.iter().map(|o| o.rejected).sum(),
            p1_dropped: done.iter().map(|o| o.p1_dropped).sum(),
            measure_ratio: Distribution::of(&done.iter().map(|o| o.measure_ratio).collect::<Vec<_>>()),
            exp_ratio: Distribution::of(&done.iter().map(|o| o.exp_ratio).collect::<Vec<_>>()),
            check_failures,
            product_violations: done.iter().map(|o| o.product.violations).sum(),
            inclusion_violating_cells: done.iter().map(|o| o.inclusion.violating_cells).sum(),
            covering_constant: crate::selection::covering_constant(),
            exp_constant: 6.0 * std::f64::consts::E,
        }
    }

    pub fn all_passed(&self) -> bool {
        self.aborted == 0 && self.passed == self.completed
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub config: ExperimentConfig,
    pub summary: Summary,
    pub trials: Vec<TrialRecord>,
}

impl Bundle {
    pub fn empty(config: ExperimentConfig) -> Self {
        Bundle {
            config,
            summary: Summary::of(&[]),
            trials: Vec::new(),
        }
    }
}

fn family_is_valid(cfg: &ExperimentConfig, family: &BoxFamily) -> std::result::Result<(), String> {
    match cfg.family {
        FamilyKind::Zygmund => {
            let report = validate_zygmund(family);
            if report.is_valid() {
                Ok(())
            } else {
                Err(format!("{report:?}"))
            }
        }
        FamilyKind::Adversarial => {
            if two_side_domination(&family.boxes) {
                Ok(())
            } else {
                Err("two-side domination certificate fails".into())
            }
        }
    }
}

/// Runs the stages after generation on a given family.
pub fn run_family(cfg: &ExperimentConfig, trial: usize, family: BoxFamily) -> TrialRecord {
    let mut record = TrialRecord {
        trial,
        family: None,
        status: TrialStatus::Aborted {
            stage: Stage::Validate,
            error: String::new(),
        },
        selection: None,
        verification: None,
    };
    let abort = |stage: Stage, error: String| TrialStatus::Aborted { stage, error };
    if let Err(e) = family_is_valid(cfg, &family) {
        record.status = abort(Stage::Validate, e);
        record.family = Some(family);
        return record;
    }
    let params = &cfg.params;
    let staged = (|| -> std::result::Result<_, (Stage, crate::Error)> {
        let result = select(&family, params).map_err(|e| (Stage::Select, e))?;
        let verification = verify_selection(&result, &family, params).map_err(|e| (Stage::Verify, e))?;
        let mut product = ProductSummary::default();
        for (idx, prior) in result.rejections() {
            let prior: Vec<_> = prior.iter().map(|&i| family.boxes[i]).collect();
            let report =
                product_bound_check(&family.boxes[idx], &prior, params).map_err(|e| (Stage::ProductBound, e))?;
            product.rejections_checked += 1;
            product.pairs_checked += report.pairs_checked;
            product.violations += report.violations.len();
            product.unclassified += report.split.unclassified.len();
            if !report.holds() {
                product.violating_rejections.push(idx);
            }
        }
        let inclusion = rejected_inclusion_check(&result, &family, params).map_err(|e| (Stage::Inclusion, e))?;
        Ok((result, verification, product, inclusion))
    })();
    match staged {
        Err((stage, e)) => record.status = abort(stage, e.to_string()),
        Ok((result, verification, product, inclusion)) => {
            let outcome = TrialOutcome {
                selected: result.selected.len(),
                rejected: result.rejected.len(),
                p1_dropped: result.p1_dropped.len(),
                union_all: verification.union_all,
                union_selected: verification.union_selected,
                union_rejected: verification.union_rejected,
                measure_ratio: result.constants.measure_ratio,
                exp_ratio: result.constants.exp_ratio,
                final_integral: verification.final_integral,
                exp_bound: verification.exp_bound,
                worst_induction_excess: verification.worst_induction_excess,
                verification_passed: verification.passed,
                tallies: verification.tallies.clone(),
                product,
                inclusion: InclusionSummary::from_report(&inclusion),
            };
            record.status = TrialStatus::Completed(Box::new(outcome));
            record.selection = Some(result);
            record.verification = Some(verification);
        }
    }
    record.family = Some(family);
    record
}

pub fn run_trial(cfg: &ExperimentConfig, trial: usize) -> TrialRecord {
    match generate_family(cfg, trial) {
        Ok(family) => run_family(cfg, trial, family),
        Err(e) => TrialRecord {
            trial,
            family: None,
            status: TrialStatus::Aborted {
                stage: Stage::Generate,
                error: e.to_string(),
            },
            selection: None,
            verification: None,
        },
    }
}

/// Runs `trial_count` trials in index order and aggregates them.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Bundle> {
    cfg.validate()?;
    let trials: Vec<TrialRecord> = (0..cfg.trial_count).map(|t| run_trial(cfg, t)).collect();
    Ok(Bundle {
        config: cfg.clone(),
        summary: Summary::of(&trials),
        trials,
    })
}
