//! The exponential sieve and the exact verification of every inequality it is
//! supposed to guarantee.
//!
//! Candidates are ordered by decreasing third side, thinned to a P₁-sparse
//! sequence, then scanned once: a candidate `R` is accepted when the average of
//! `exp(c · Σ_j χ_{R*_j})` over `R` is at most the threshold, the sum running over
//! the dilations of the rectangles accepted so far.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::arith::wide_mul;
use crate::error::{Error, Result};
use crate::geometry::{Axis, Box3, BoxFamily, Measure, CANONICAL_DILATION};
use crate::measure::{
    depth_histogram_with, joint_depth_histogram_with, scan_region, union_measure,
    union_measure_with, DepthHistogram, DepthMethod, JointDepthHistogram,
};

/// Relative slack allowed wherever `e` is evaluated in floating point.
pub const E_TOLERANCE: f64 = 1e-9;

/// Level of the directional maximal functions on rejected rectangles: `√3 − 1`.
pub fn directional_threshold() -> f64 {
    3f64.sqrt() - 1.0
}

/// Weak-type constant of the linewise maximal bound.
pub const WEAK_TYPE_CONSTANT: f64 = 5.0;

/// `(5 / (√3 − 1)) · 6e`: bound on `m(∪ rejected) / m(∪ selected)`.
pub fn rejected_chain_constant() -> f64 {
    WEAK_TYPE_CONSTANT / directional_threshold() * 6.0 * E
}

/// `C* = 1 + 30e / (√3 − 1) ≈ 112.4`: bound on `m(∪ all) / m(∪ selected)`.
pub fn covering_constant() -> f64 {
    1.0 + rejected_chain_constant()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SieveParams {
    pub threshold: f64,
    pub dilation: u32,
    pub c: f64,
}

impl Default for SieveParams {
    fn default() -> Self {
        SieveParams {
            threshold: 3.0,
            dilation: CANONICAL_DILATION,
            c: 1.0,
        }
    }
}

impl SieveParams {
    pub fn is_canonical(&self) -> bool {
        *self == SieveParams::default()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(Error::Parameter(format!("threshold {} must be positive", self.threshold)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Parameter(format!("c = {} must be positive", self.c)));
        }
        if self.dilation == 0 || self.dilation.is_multiple_of(2) {
            return Err(Error::InvalidDilation(self.dilation));
        }
        Ok(())
    }

    /// Per-step increment constant of the running integral: `threshold · e^c`.
    pub fn step_constant(&self) -> f64 {
        self.threshold * self.c.exp()
    }
}

/// Enlistment indices sorted by decreasing third side; ties keep enlistment order.
pub fn order_by_third_side(family: &BoxFamily) -> Vec<usize> {
    let mut order: Vec<usize> = (0..family.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(family.boxes[i].side(Axis::Z)));
    order
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct P1Outcome {
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
}

/// Greedy P₁ thinning: keep `R` iff `2 · m(R ∩ ∪ kept) ≤ m(R)`.
pub fn p1_filter(family: &BoxFamily, order: &[usize]) -> P1Outcome {
    p1_filter_with(family, order, DepthMethod::default())
}

pub fn p1_filter_with(family: &BoxFamily, order: &[usize], method: DepthMethod) -> P1Outcome {
    let mut out = P1Outcome::default();
    let mut kept_boxes: Vec<Box3> = Vec::new();
    for &idx in order {
        let r = family.boxes[idx];
        let overlap = depth_histogram_with(&r, &kept_boxes, method).covered();
        if 2 * overlap <= r.volume() {
            out.kept.push(idx);
            kept_boxes.push(r);
        } else {
            out.dropped.push(idx);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    /// Enlistment index of the candidate.
    pub index: usize,
    /// Tested exponential average over the candidate.
    pub avg: f64,
    pub accepted: bool,
    /// Running integral after this candidate.
    #[serde(rename = "Ik")]
    pub ik: f64,
    /// Exact depth histogram behind `avg`; absent after a JSON round trip.
    #[serde(skip)]
    pub histogram: Option<DepthHistogram>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// `m(∪ all) / m(∪ selected)`, measured against the original family.
    pub measure_ratio: f64,
    /// `I_final / m(∪ selected)`.
    pub exp_ratio: f64,
    /// The constant `6e` that `exp_ratio` is compared against.
    pub bound_6e: f64,
}

/// Exact quantities behind [`Constants`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactTotals {
    pub union_all: Measure,
    pub union_selected: Measure,
    /// Depth histogram of the selected dilations over `∪ selected`.
    pub integral: DepthHistogram,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub selected: Vec<usize>,
    pub rejected: Vec<usize>,
    pub p1_dropped: Vec<usize>,
    pub trace: Vec<TraceEntry>,
    pub constants: Constants,
    #[serde(skip)]
    pub exact: Option<ExactTotals>,
}

impl SelectionResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// For each trace position, the enlistment indices accepted before it.
    pub fn priors(&self) -> Vec<Vec<usize>> {
        let mut acc = Vec::new();
        self.trace
            .iter()
            .map(|t| {
                let before = acc.clone();
                if t.accepted {
                    acc.push(t.index);
                }
                before
            })
            .collect()
    }

    /// Pairs `(rejected index, indices selected before it)` in scan order.
    pub fn rejections(&self) -> Vec<(usize, Vec<usize>)> {
        self.trace
            .iter()
            .zip(self.priors())
            .filter(|(t, _)| !t.accepted)
            .map(|(t, p)| (t.index, p))
            .collect()
    }
}

/// Updates the running integral `I = ∫_{∪ R_j} exp(Σ χ_{R*_j})` when `new` joins.
///
/// Everything that changes lies inside `new_dilated ⊇ new`, so the update scans only
/// that region: cells already in the union move from depth `s` to `s + 1`, cells of
/// `new` outside the union enter at `s + 1`.
pub(crate) fn integral_step(
    integral: &mut DepthHistogram,
    prior: &[Box3],
    prior_dilated: &[Box3],
    new: &Box3,
    new_dilated: &Box3,
    method: DepthMethod,
) {
    let mut fresh = 0;
    scan_region(
        new_dilated,
        &[prior_dilated, prior, std::slice::from_ref(new)],
        method,
        |d, v| {
            let s = d[0] as usize;
            let covered = d[1] > 0;
            let inside = d[2] > 0;
            if covered {
                integral.sub(s, v);
            }
            if covered || inside {
                integral.add(s + 1, v);
            }
            if inside && !covered {
                fresh += v;
            }
        },
    );
    let reference = integral.reference() + fresh;
    integral.set_reference(reference);
}

/// Depth histogram of `Σ χ_{dilated}` over `∪ boxes`, computed in one pass.
pub fn union_integral_histogram(boxes: &[Box3], dilated: &[Box3], method: DepthMethod) -> DepthHistogram {
    let mut h = DepthHistogram::new(Vec::new(), 0);
    let Some(first) = dilated.first() else {
        return h;
    };
    let hull = dilated.iter().chain(boxes).fold(*first, |a, b| a.hull(b));
    let mut reference = 0;
    scan_region(&hull, &[dilated, boxes], method, |d, v| {
        if d[1] > 0 {
            h.add(d[0] as usize, v);
            reference += v;
        }
    });
    h.set_reference(reference);
    h
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SieveOutcome {
    pub selected: Vec<usize>,
    pub rejected: Vec<usize>,
    pub trace: Vec<TraceEntry>,
    pub integral: DepthHistogram,
}

/// Runs the sieve over `candidates` (enlistment indices, already ordered and thinned).
pub fn sieve(family: &BoxFamily, candidates: &[usize], params: &SieveParams) -> Result<SieveOutcome> {
    params.validate()?;
    let mut out = SieveOutcome::default();
    let mut prior: Vec<Box3> = Vec::new();
    let mut prior_dilated: Vec<Box3> = Vec::new();
    for &idx in candidates {
        let tag = |source: Error| Error::Candidate {
            candidate: idx,
            source: Box::new(source),
        };
        let r = family.boxes[idx];
        let h = depth_histogram_with(&r, &prior_dilated, DepthMethod::DifferenceArray);
        let avg = h.exp_average(params.c).map_err(tag)?;
        let accepted = avg <= params.threshold;
        if accepted {
            let r_dilated = r.dilate(params.dilation).map_err(tag)?;
            integral_step(
                &mut out.integral,
                &prior,
                &prior_dilated,
                &r,
                &r_dilated,
                DepthMethod::DifferenceArray,
            );
            prior.push(r);
            prior_dilated.push(r_dilated);
            out.selected.push(idx);
        } else {
            out.rejected.push(idx);
        }
        let ik = out.integral.exp_integral(params.c).map_err(tag)?;
        out.trace.push(TraceEntry {
            index: idx,
            avg,
            accepted,
            ik,
            histogram: Some(h),
        });
    }
    Ok(out)
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        num / den
    }
}

/// Order, P₁-thin and sieve a family; constants are measured against the original family.
pub fn select(family: &BoxFamily, params: &SieveParams) -> Result<SelectionResult> {
    let order = order_by_third_side(family);
    let p1 = p1_filter(family, &order);
    let outcome = sieve(family, &p1.kept, params)?;
    let selected_boxes: Vec<Box3> = outcome.selected.iter().map(|&i| family.boxes[i]).collect();
    let union_all = union_measure(&family.boxes);
    let union_selected = union_measure(&selected_boxes);
    let final_integral = outcome.integral.exp_integral(params.c)?;
    Ok(SelectionResult {
        constants: Constants {
            measure_ratio: ratio(union_all as f64, union_selected as f64),
            exp_ratio: if union_selected == 0 {
                0.0
            } else {
                final_integral / union_selected as f64
            },
            bound_6e: 6.0 * E,
        },
        selected: outcome.selected,
        rejected: outcome.rejected,
        p1_dropped: p1.dropped,
        trace: outcome.trace,
        exact: Some(ExactTotals {
            union_all,
            union_selected,
            integral: outcome.integral,
        }),
    })
}

/// Prior rectangles split by which pair of side lengths dominates the candidate.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSplit {
    /// Positions in `prior` with first and third sides ≥ those of `R`.
    pub class1: Vec<usize>,
    /// Remaining positions with second and third sides ≥ those of `R`.
    pub class2: Vec<usize>,
    pub unclassified: Vec<usize>,
}

pub fn split_classes(r: &Box3, prior: &[Box3]) -> ClassSplit {
    let [rx, ry, rz] = r.sides();
    let mut split = ClassSplit::default();
    for (n, p) in prior.iter().enumerate() {
        let [px, py, pz] = p.sides();
        if px >= rx && pz >= rz {
            split.class1.push(n);
        } else if py >= ry && pz >= rz {
            split.class2.push(n);
        } else {
            split.unclassified.push(n);
        }
    }
    split
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductViolation {
    pub r: usize,
    pub s: usize,
    /// `m_{r,s}`, the joint measure.
    pub joint: Measure,
    /// `m_r` (or `m(R)` when `r = 0`).
    pub first: Measure,
    /// `m_s` (or `m(R)` when `s = 0`).
    pub second: Measure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValues {
    /// `Σ A_{r,s} e^{c(r+s)}` with true proportions, classified priors only.
    pub joint: f64,
    /// `1 + Σ_{r≥1} a_r e^{cr}`.
    pub first_factor: f64,
    /// `1 + Σ_{s≥1} b_s e^{cs}`.
    pub second_factor: f64,
    pub product: f64,
    /// The factors with the true proportions `a_0`, `b_0`.
    pub first_factor_true: f64,
    pub second_factor_true: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductBoundReport {
    pub region_measure: Measure,
    pub split: ClassSplit,
    /// Realized `(r, s)` cells checked.
    pub pairs_checked: usize,
    pub violations: Vec<ProductViolation>,
    pub series: SeriesValues,
    #[serde(skip)]
    pub joint: JointDepthHistogram,
}

impl ProductBoundReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `A_{r,s} ≤ a_r b_s` exactly over `R` for the dilated class-1 and class-2 priors,
/// with `a_0 = b_0 = 1`: `m_{r,s} · m(R) ≤ m_r · m_s` in integers.
pub fn product_bound_check(r: &Box3, prior: &[Box3], params: &SieveParams) -> Result<ProductBoundReport> {
    product_bound_check_with(r, prior, params, DepthMethod::default())
}

pub fn product_bound_check_with(
    r: &Box3,
    prior: &[Box3],
    params: &SieveParams,
    method: DepthMethod,
) -> Result<ProductBoundReport> {
    params.validate()?;
    let split = split_classes(r, prior);
    let dilate = |ids: &[usize]| -> Result<Vec<Box3>> {
        ids.iter().map(|&n| prior[n].dilate(params.dilation)).collect()
    };
    let class1 = dilate(&split.class1)?;
    let class2 = dilate(&split.class2)?;
    let joint = joint_depth_histogram_with(r, &class1, &class2, method);
    let a = joint.first_marginal();
    let b = joint.second_marginal();
    let volume = r.volume();
    let with_convention = |h: &DepthHistogram, k: usize| if k == 0 { volume } else { h.get(k) };

    let mut violations = Vec::new();
    let mut pairs_checked = 0;
    for ((rr, ss), m) in joint.entries() {
        pairs_checked += 1;
        let first = with_convention(&a, rr);
        let second = with_convention(&b, ss);
        if wide_mul(m, volume) > wide_mul(first, second) {
            violations.push(ProductViolation {
                r: rr,
                s: ss,
                joint: m,
                first,
                second,
            });
        }
    }

    let v = volume as f64;
    let weight = |k: usize| (params.c * k as f64).exp();
    let tail = |h: &DepthHistogram| -> f64 {
        h.entries()
            .filter(|&(k, _)| k > 0)
            .map(|(k, m)| m as f64 / v * weight(k))
            .sum()
    };
    let first_factor = 1.0 + tail(&a);
    let second_factor = 1.0 + tail(&b);
    let series = SeriesValues {
        joint: joint
            .entries()
            .map(|((rr, ss), m)| m as f64 / v * weight(rr + ss))
            .sum(),
        first_factor,
        second_factor,
        product: first_factor * second_factor,
        first_factor_true: a.get(0) as f64 / v + tail(&a),
        second_factor_true: b.get(0) as f64 / v + tail(&b),
    };
    Ok(ProductBoundReport {
        region_measure: volume,
        split,
        pairs_checked,
        violations,
        series,
        joint,
    })
}

/// Named inequality families checked by [`verify_selection`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Trace order equals the recomputed ordered, P₁-thinned candidate list.
    Partition,
    /// Recomputed averages reproduce the recorded ones.
    SieveSoundness,
    /// Accepted averages ≤ threshold, rejected > threshold.
    Threshold,
    /// Recorded running integrals reproduce the recomputed ones.
    TraceIntegral,
    /// `I_k ≤ I_{k−1} + 3e · m(R_k)`.
    InductionStep,
    /// `I_k ≤ 3e · Σ_{j≤k} m(R_j)`.
    InductionSum,
    /// Incremental and from-scratch final integrals agree exactly.
    FinalIntegral,
    /// `I_final ≤ 6e · m(∪ selected)`.
    ExpBound,
    /// `2 · m(R_k ∩ ∪_{j<k} R_j) ≤ m(R_k)` on the selected sequence.
    P1Selected,
    /// `m(∪ rejected) ≤ (5/(√3−1)) · 6e · m(∪ selected)`.
    RejectedChain,
    /// `m(∪ all) / m(∪ selected) ≤ C*`.
    CoveringConstant,
}

impl Check {
    pub const ALL: [Check; 11] = [
        Check::Partition,
        Check::SieveSoundness,
        Check::Threshold,
        Check::TraceIntegral,
        Check::InductionStep,
        Check::InductionSum,
        Check::FinalIntegral,
        Check::ExpBound,
        Check::P1Selected,
        Check::RejectedChain,
        Check::CoveringConstant,
    ];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckFailure {
    pub check: Check,
    /// Position in the trace, when the failure belongs to one step.
    pub step: Option<usize>,
    /// Enlistment index involved, if any.
    pub index: Option<usize>,
    pub lhs: f64,
    pub rhs: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckTally {
    pub check: Check,
    pub evaluated: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub canonical_parameters: bool,
    pub tallies: Vec<CheckTally>,
    pub failures: Vec<CheckFailure>,
    pub union_all: Measure,
    pub union_selected: Measure,
    pub union_rejected: Measure,
    pub final_integral: f64,
    pub exp_bound: f64,
    pub measure_ratio: f64,
    pub covering_constant: f64,
    /// Largest `I_k − I_{k−1} − 3e·m(R_k)` relative to the bound; ≤ 0 when the step holds.
    pub worst_induction_excess: f64,
}

impl VerificationReport {
    pub fn tally(&self, check: Check) -> &CheckTally {
        self.tallies
            .iter()
            .find(|t| t.check == check)
            .expect("every check is tallied")
    }

    pub fn failures_of(&self, check: Check) -> impl Iterator<Item = &CheckFailure> {
        self.failures.iter().filter(move |f| f.check == check)
    }
}

struct Recorder {
    tallies: Vec<CheckTally>,
    failures: Vec<CheckFailure>,
}

impl Recorder {
    fn new() -> Self {
        Recorder {
            tallies: Check::ALL
                .iter()
                .map(|&check| CheckTally {
                    check,
                    evaluated: 0,
                    failed: 0,
                })
                .collect(),
            failures: Vec::new(),
        }
    }

    fn record(&mut self, check: Check, ok: bool, failure: impl FnOnce() -> CheckFailure) {
        let t = self
            .tallies
            .iter_mut()
            .find(|t| t.check == check)
            .expect("every check is tallied");
        t.evaluated += 1;
        if !ok {
            t.failed += 1;
            self.failures.push(failure());
        }
    }
}

fn within(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + E_TOLERANCE)
}

fn rel_eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= E_TOLERANCE * a.abs().max(b.abs())
}

/// Recomputes the whole selection from the family with the plane-sweep depth route
/// and checks every inequality of the covering argument.
pub fn verify_selection(
    result: &SelectionResult,
    family: &BoxFamily,
    params: &SieveParams,
) -> Result<VerificationReport> {
    params.validate()?;
    let method = DepthMethod::PlaneSweep;
    let mut rec = Recorder::new();
    let step_constant = params.step_constant();

    let order = order_by_third_side(family);
    let p1 = p1_filter_with(family, &order, method);
    let traced: Vec<usize> = result.trace.iter().map(|t| t.index).collect();
    let accepted: Vec<usize> = result
        .trace
        .iter()
        .filter(|t| t.accepted)
        .map(|t| t.index)
        .collect();
    let declined: Vec<usize> = result
        .trace
        .iter()
        .filter(|t| !t.accepted)
        .map(|t| t.index)
        .collect();
    let partition_ok = traced == p1.kept
        && accepted == result.selected
        && declined == result.rejected
        && p1.dropped == result.p1_dropped;
    rec.record(Check::Partition, partition_ok, || CheckFailure {
        check: Check::Partition,
        step: None,
        index: None,
        lhs: traced.len() as f64,
        rhs: p1.kept.len() as f64,
        detail: "trace does not match the ordered P1-thinned candidates".into(),
    });

    let mut prior: Vec<Box3> = Vec::new();
    let mut prior_dilated: Vec<Box3> = Vec::new();
    let mut integral = DepthHistogram::new(Vec::new(), 0);
    let mut selected_volume: Measure = 0;
    let mut worst_excess = f64::NEG_INFINITY;

    for (step, entry) in result.trace.iter().enumerate() {
        let idx = entry.index;
        let r = *family.boxes.get(idx).ok_or_else(|| {
            Error::Parameter(format!("trace index {idx} outside the family"))
        })?;
        let tag = |source: Error| Error::Candidate {
            candidate: idx,
            source: Box::new(source),
        };
        let h = depth_histogram_with(&r, &prior_dilated, method);
        let avg = h.exp_average(params.c).map_err(tag)?;
        let same_histogram = entry.histogram.as_ref().is_none_or(|rec_h| *rec_h == h);
        rec.record(
            Check::SieveSoundness,
            same_histogram && avg == entry.avg,
            || CheckFailure {
                check: Check::SieveSoundness,
                step: Some(step),
                index: Some(idx),
                lhs: entry.avg,
                rhs: avg,
                detail: "recorded average differs from the recomputed one".into(),
            },
        );
        let ok = if entry.accepted {
            avg <= params.threshold
        } else {
            avg > params.threshold
        };
        rec.record(Check::Threshold, ok, || CheckFailure {
            check: Check::Threshold,
            step: Some(step),
            index: Some(idx),
            lhs: avg,
            rhs: params.threshold,
            detail: format!(
                "{} candidate on the wrong side of the threshold",
                if entry.accepted { "accepted" } else { "rejected" }
            ),
        });

        if entry.accepted {
            let overlap = depth_histogram_with(&r, &prior, method).covered();
            rec.record(Check::P1Selected, 2 * overlap <= r.volume(), || CheckFailure {
                check: Check::P1Selected,
                step: Some(step),
                index: Some(idx),
                lhs: 2.0 * overlap as f64,
                rhs: r.volume() as f64,
                detail: "selected rectangle more than half covered by earlier selections".into(),
            });

            let before = integral.exp_integral(params.c).map_err(tag)?;
            let r_dilated = r.dilate(params.dilation).map_err(tag)?;
            integral_step(&mut integral, &prior, &prior_dilated, &r, &r_dilated, method);
            let after = integral.exp_integral(params.c).map_err(tag)?;
            let bound = before + step_constant * r.volume() as f64;
            worst_excess = worst_excess.max((after - bound) / bound);
            rec.record(Check::InductionStep, within(after, bound), || CheckFailure {
                check: Check::InductionStep,
                step: Some(step),
                index: Some(idx),
                lhs: after,
                rhs: bound,
                detail: format!("I_k exceeds I_(k-1) + {step_constant:.6} m(R_k)"),
            });
            selected_volume += r.volume();
            let sum_bound = step_constant * selected_volume as f64;
            rec.record(Check::InductionSum, within(after, sum_bound), || CheckFailure {
                check: Check::InductionSum,
                step: Some(step),
                index: Some(idx),
                lhs: after,
                rhs: sum_bound,
                detail: "I_k exceeds the summed step bound".into(),
            });
            prior.push(r);
            prior_dilated.push(r_dilated);
        }
        let ik = integral.exp_integral(params.c).map_err(tag)?;
        rec.record(Check::TraceIntegral, rel_eq(ik, entry.ik), || CheckFailure {
            check: Check::TraceIntegral,
            step: Some(step),
            index: Some(idx),
            lhs: entry.ik,
            rhs: ik,
            detail: "recorded running integral differs from the recomputed one".into(),
        });
    }

    let scratch = union_integral_histogram(&prior, &prior_dilated, method);
    rec.record(Check::FinalIntegral, scratch == integral, || CheckFailure {
        check: Check::FinalIntegral,
        step: None,
        index: None,
        lhs: integral.exp_integral(params.c).unwrap_or(f64::NAN),
        rhs: scratch.exp_integral(params.c).unwrap_or(f64::NAN),
        detail: "incremental integral histogram differs from the from-scratch one".into(),
    });

    let union_all = union_measure_with(&family.boxes, method);
    let union_selected = scratch.reference();
    let rejected_boxes: Vec<Box3> = result.rejected.iter().map(|&i| family.boxes[i]).collect();
    let union_rejected = union_measure_with(&rejected_boxes, method);
    let final_integral = scratch.exp_integral(params.c)?;
    let exp_bound = 2.0 * step_constant * union_selected as f64;
    rec.record(Check::ExpBound, within(final_integral, exp_bound), || CheckFailure {
        check: Check::ExpBound,
        step: None,
        index: None,
        lhs: final_integral,
        rhs: exp_bound,
        detail: "final integral exceeds 6e m(union selected)".into(),
    });

    let chain = rejected_chain_constant() * union_selected as f64;
    rec.record(Check::RejectedChain, union_rejected as f64 <= chain, || CheckFailure {
        check: Check::RejectedChain,
        step: None,
        index: None,
        lhs: union_rejected as f64,
        rhs: chain,
        detail: "rejected union exceeds the chained constant".into(),
    });
    let measure_ratio = ratio(union_all as f64, union_selected as f64);
    let c_star = covering_constant();
    rec.record(Check::CoveringConstant, measure_ratio <= c_star, || CheckFailure {
        check: Check::CoveringConstant,
        step: None,
        index: None,
        lhs: measure_ratio,
        rhs: c_star,
        detail: "measure ratio exceeds C*".into(),
    });

    Ok(VerificationReport {
        passed: rec.failures.is_empty(),
        canonical_parameters: params.is_canonical(),
        tallies: rec.tallies,
        failures: rec.failures,
        union_all,
        union_selected,
        union_rejected,
        final_integral,
        exp_bound,
        measure_ratio,
        covering_constant: c_star,
        worst_induction_excess: if worst_excess.is_finite() { worst_excess } else { 0.0 },
    })
}
