//! Exit criteria. Each test prints one `criterion N ...: PASS|FAIL` line.
//!
//! Criteria listed in `KNOWN_RED` are evaluated in full and reported as FAIL; the
//! test then asserts they still fail, so a fix shows up as a test failure too.

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use common::*;
use covering_core::lab::{emit_report, generate_family, run_experiment, ExperimentConfig, FamilyKind};
use covering_core::maximal::{hl_maximal_1d, rejected_inclusion_check, weak_type_check, InclusionReport, ScalarField3};
use covering_core::measure::{depth_histogram, union_measure};
use covering_core::selection::{
    covering_constant, product_bound_check, select, split_classes, verify_selection, Check, ProductBoundReport,
    SelectionResult, SieveParams, VerificationReport,
};
use covering_core::{Axis, Box3, BoxFamily};
use rand::Rng;

/// Criteria whose inequality does not hold on the generated families.
///
/// 3: the dilation of a new box also deepens earlier boxes outside it, so a single
///    step can add more than `3e · m(R_k)`.
/// 5: rejections whose prior dilations cut the box partially break `A_{r,s} ≤ a_r b_s`.
/// 10: inherits both on the two-sides-smaller families.
const KNOWN_RED: &[u32] = &[3, 5, 10];

const SWEEP_SIZES: [usize; 4] = [10, 50, 100, 200];
const SWEEP_TRIALS: usize = 20;
const SWEEP_SEED: u64 = 42;

// Goes to the raw stdout handle, which the test harness does not capture.
fn report(line: std::fmt::Arguments) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{line}").expect("stdout");
}

fn verdict(id: u32, name: &str, passed: bool, detail: String) {
    report(format_args!("criterion {id:>2} {name}: {} | {detail}", if passed { "PASS" } else { "FAIL" }));
    if KNOWN_RED.contains(&id) {
        assert!(!passed, "criterion {id} now passes; remove it from KNOWN_RED");
    } else {
        assert!(passed, "criterion {id} failed: {detail}");
    }
}

struct Run {
    label: String,
    family: BoxFamily,
    result: SelectionResult,
    verification: VerificationReport,
    products: Vec<(usize, Vec<Box3>, ProductBoundReport)>,
    inclusion: InclusionReport,
}

fn run(cfg: &ExperimentConfig, trial: usize) -> Run {
    let family = generate_family(cfg, trial).unwrap();
    let params = cfg.params;
    let result = select(&family, &params).unwrap();
    let verification = verify_selection(&result, &family, &params).unwrap();
    let products = result
        .rejections()
        .into_iter()
        .map(|(idx, prior)| {
            let prior: Vec<Box3> = prior.iter().map(|&i| family.boxes[i]).collect();
            let report = product_bound_check(&family.boxes[idx], &prior, &params).unwrap();
            (idx, prior, report)
        })
        .collect();
    let inclusion = rejected_inclusion_check(&result, &family, &params).unwrap();
    Run {
        label: format!("{:?} n={} trial={trial}", cfg.family, cfg.n_boxes),
        family,
        result,
        verification,
        products,
        inclusion,
    }
}

struct Sweep {
    runs: Vec<Run>,
    elapsed: Duration,
}

fn sweep_of(kind: FamilyKind, sizes: &[usize]) -> Sweep {
    let start = Instant::now();
    let mut runs = Vec::new();
    for &n in sizes {
        let cfg = ExperimentConfig {
            seed: SWEEP_SEED,
            n_boxes: n,
            family: kind,
            trial_count: SWEEP_TRIALS,
            ..Default::default()
        };
        assert!(cfg.params.is_canonical());
        runs.extend((0..SWEEP_TRIALS).map(|t| run(&cfg, t)));
    }
    Sweep {
        runs,
        elapsed: start.elapsed(),
    }
}

fn zygmund() -> &'static Sweep {
    static SWEEP: OnceLock<Sweep> = OnceLock::new();
    SWEEP.get_or_init(|| sweep_of(FamilyKind::Zygmund, &SWEEP_SIZES))
}

fn adversarial() -> &'static Sweep {
    static SWEEP: OnceLock<Sweep> = OnceLock::new();
    SWEEP.get_or_init(|| sweep_of(FamilyKind::Adversarial, &[100]))
}

fn failures(sweep: &Sweep, check: Check) -> (usize, usize) {
    sweep.runs.iter().fold((0, 0), |(f, e), r| {
        let t = r.verification.tally(check);
        (f + t.failed, e + t.evaluated)
    })
}

fn max_of(sweep: &Sweep, f: impl Fn(&Run) -> f64) -> f64 {
    sweep.runs.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
}

/// Every class dilation that meets `r` spans it along both sides its class dominates.
fn clean_intersections(r: &Box3, prior: &[Box3]) -> bool {
    let split = split_classes(r, prior);
    let spans = |ids: &[usize], axis: Axis| {
        ids.iter().all(|&i| {
            let d = prior[i].dilate(3).unwrap();
            d.intersect(r).is_none() || (d.axis(axis).contains(&r.axis(axis)) && d.z.contains(&r.z))
        })
    };
    spans(&split.class1, Axis::X) && spans(&split.class2, Axis::Y)
}

struct SubVerdict {
    passed: bool,
    detail: String,
}

fn exp_bound(sweep: &Sweep) -> SubVerdict {
    let (failed, evaluated) = failures(sweep, Check::ExpBound);
    SubVerdict {
        passed: failed == 0 && evaluated == sweep.runs.len(),
        detail: format!(
            "{failed}/{evaluated} runs exceed 6e; max I/m(U sel) = {:.4} vs 6e = {:.4}; sweep {:.1?}",
            max_of(sweep, |r| r.result.constants.exp_ratio),
            6.0 * std::f64::consts::E,
            sweep.elapsed
        ),
    }
}

fn induction_step(sweep: &Sweep) -> SubVerdict {
    let (failed, evaluated) = failures(sweep, Check::InductionStep);
    let (sum_failed, _) = failures(sweep, Check::InductionSum);
    let runs = sweep
        .runs
        .iter()
        .filter(|r| r.verification.tally(Check::InductionStep).failed > 0)
        .count();
    SubVerdict {
        passed: failed == 0,
        detail: format!(
            "{failed}/{evaluated} acceptance steps exceed I_(k-1) + 3e m(R_k) in {runs}/{} runs; \
             worst excess {:.4} relative; cumulative form fails at {sum_failed} steps",
            sweep.runs.len(),
            max_of(sweep, |r| r.verification.worst_induction_excess),
        ),
    }
}

fn soundness(sweep: &Sweep) -> SubVerdict {
    let (f1, e1) = failures(sweep, Check::SieveSoundness);
    let (f2, _) = failures(sweep, Check::Threshold);
    let (f3, _) = failures(sweep, Check::Partition);
    let (f4, _) = failures(sweep, Check::TraceIntegral);
    SubVerdict {
        passed: f1 + f2 + f3 + f4 == 0,
        detail: format!(
            "{e1} decisions re-derived: {f1} average mismatches, {f2} threshold errors, \
             {f3} order errors, {f4} running-integral mismatches"
        ),
    }
}

fn product_bound(sweep: &Sweep, require_profile: bool) -> SubVerdict {
    let mut rejections = 0;
    let mut pairs = 0;
    let mut violations = 0;
    let mut violating = 0;
    let mut violating_clean = 0;
    let mut clean_total = 0;
    for run in &sweep.runs {
        if require_profile && !covering_core::geometry::validate_zygmund(&run.family).is_valid() {
            continue;
        }
        for (idx, prior, report) in &run.products {
            let r = run.family.boxes[*idx];
            let clean = clean_intersections(&r, prior);
            rejections += 1;
            pairs += report.pairs_checked;
            violations += report.violations.len();
            clean_total += clean as usize;
            if !report.holds() {
                violating += 1;
                violating_clean += clean as usize;
            }
        }
    }
    SubVerdict {
        passed: violations == 0,
        detail: format!(
            "{violations} violating (r,s) over {pairs} pairs; {violating}/{rejections} rejections violate, \
             {violating_clean} of them with clean class intersections ({clean_total} clean rejections)"
        ),
    }
}

fn inclusion(sweep: &Sweep) -> SubVerdict {
    let cells: usize = sweep.runs.iter().map(|r| r.inclusion.cells_checked).sum();
    let bad: usize = sweep.runs.iter().map(|r| r.inclusion.violations.len()).sum();
    let measure = sweep.runs.iter().fold(0.0, |acc, r| acc + r.inclusion.violating_measure());
    let where_: Vec<&str> = sweep
        .runs
        .iter()
        .filter(|r| !r.inclusion.holds())
        .map(|r| r.label.as_str())
        .collect();
    SubVerdict {
        passed: bad == 0,
        detail: format!("{bad}/{cells} rejected cells outside both superlevel sets (measure {measure}) {where_:?}"),
    }
}

fn chain_constant(sweep: &Sweep) -> SubVerdict {
    let (f1, e1) = failures(sweep, Check::RejectedChain);
    let (f2, _) = failures(sweep, Check::CoveringConstant);
    SubVerdict {
        passed: f1 + f2 == 0 && e1 == sweep.runs.len(),
        detail: format!(
            "{f1} runs break m(U rej) <= (5/(sqrt3-1)) 6e m(U sel), {f2} exceed C* = {:.4}; max ratio {:.4}",
            covering_constant(),
            max_of(sweep, |r| r.result.constants.measure_ratio)
        ),
    }
}

fn p1_exact(sweep: &Sweep) -> SubVerdict {
    let (failed, evaluated) = failures(sweep, Check::P1Selected);
    SubVerdict {
        passed: failed == 0,
        detail: format!("{failed}/{evaluated} selected boxes more than half covered by earlier ones"),
    }
}

#[test]
fn criterion_01_measure_engine_matches_raster() {
    let start = Instant::now();
    let mut rng = rng(0x5eed);
    let mut mismatches = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=20);
        let boxes = random_boxes(&mut rng, n, 32);
        let region = random_box(&mut rng, 32);
        if union_measure(&boxes) != raster_union(&boxes) {
            mismatches += 1;
        }
        if depth_histogram(&region, &boxes).measures() != raster_histogram(&region, &boxes) {
            mismatches += 1;
        }
    }
    let elapsed = start.elapsed();
    verdict(
        1,
        "measure engine vs rasterization",
        mismatches == 0 && elapsed < Duration::from_secs(30),
        format!("{mismatches} mismatches over 200 families in {elapsed:.1?} (budget 30 s)"),
    );
}

#[test]
fn criterion_02_exp_bound() {
    let sweep = zygmund();
    let v = exp_bound(sweep);
    verdict(2, "exponential integral bound", v.passed && sweep.elapsed < Duration::from_secs(300), v.detail);
}

#[test]
fn criterion_03_induction_step() {
    let v = induction_step(zygmund());
    verdict(3, "induction step", v.passed, v.detail);
}

#[test]
fn criterion_04_sieve_soundness() {
    let v = soundness(zygmund());
    verdict(4, "sieve soundness", v.passed, v.detail);
}

#[test]
fn criterion_05_product_bound() {
    let v = product_bound(zygmund(), true);
    verdict(5, "class product bound", v.passed, v.detail);
}

#[test]
fn criterion_06_rejected_set_inclusion() {
    let v = inclusion(zygmund());
    verdict(6, "rejected-set inclusion", v.passed, v.detail);
}

#[test]
fn criterion_07_chain_constant() {
    let v = chain_constant(zygmund());
    verdict(7, "chain constant", v.passed, v.detail);
}

#[test]
fn criterion_08_p1_exact() {
    let v = p1_exact(zygmund());
    verdict(8, "half-cover condition", v.passed, v.detail);
}

#[test]
fn criterion_09_maximal_operator() {
    let mut rng = rng(0xf1e1d);
    let mut mismatches = 0;
    let mut weak_checks = 0;
    let mut weak_failures = 0;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let (grid, values) = random_field(&mut rng, 6);
        let f = ScalarField3::integer(grid.clone(), values.clone()).unwrap();
        for axis in Axis::ALL {
            let mf = hl_maximal_1d(&f, axis);
            for n in 0..grid.cell_count() {
                let cell = grid.cell_of(n);
                let (vals, lens) = line_through(&grid, &values, axis, cell);
                if mf.exact(n) != Some(brute_line_maximal(&vals, &lens, cell[axis.index()])) {
                    mismatches += 1;
                }
            }
            for lambda in [0.5, 1.0, 2.0, 4.0] {
                let rep = weak_type_check(&f, axis, lambda, 5.0).unwrap();
                weak_checks += 1;
                weak_failures += (!rep.passed) as usize;
                if rep.integral > 0.0 {
                    worst = worst.max(rep.level_set_measure as f64 * lambda / rep.integral);
                }
            }
        }
    }
    verdict(
        9,
        "maximal operator",
        mismatches == 0 && weak_failures == 0,
        format!(
            "{mismatches} cells differ from brute force over 100 fields; \
             {weak_failures}/{weak_checks} weak-type checks fail; largest lambda m/integral {worst:.4}"
        ),
    );
}

#[test]
fn criterion_10_two_sides_smaller_families() {
    let sweep = adversarial();
    let parts = [
        (2, exp_bound(sweep)),
        (3, induction_step(sweep)),
        (4, soundness(sweep)),
        (5, product_bound(sweep, false)),
        (6, inclusion(sweep)),
        (7, chain_constant(sweep)),
        (8, p1_exact(sweep)),
    ];
    for (id, p) in &parts {
        report(format_args!("    sub-criterion {id}: {} | {}", if p.passed { "PASS" } else { "FAIL" }, p.detail));
    }
    let failed: Vec<u32> = parts.iter().filter(|(_, p)| !p.passed).map(|(id, _)| *id).collect();
    verdict(
        10,
        "two-sides-smaller families",
        failed.is_empty(),
        format!("{} families; failing sub-criteria {failed:?}", sweep.runs.len()),
    );
}

fn read_tree(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn criterion_11_golden_bundle_reproduces() {
    let cfg = ExperimentConfig::golden();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let bundle = run_experiment(&cfg).unwrap();
        emit_report(&bundle, d.path()).unwrap();
    }
    let (a, b) = (read_tree(dirs[0].path()), read_tree(dirs[1].path()));
    let differing = a.iter().zip(&b).filter(|(x, y)| x != y).count() + a.len().abs_diff(b.len());
    let bytes: usize = a.iter().map(|(_, c)| c.len()).sum();
    verdict(
        11,
        "golden bundle reproducibility",
        differing == 0 && !a.is_empty(),
        format!("{} files, {bytes} bytes, {differing} differ", a.len()),
    );
}

#[test]
fn sieve_parameters_are_canonical() {
    assert!(SieveParams::default().is_canonical());
}
