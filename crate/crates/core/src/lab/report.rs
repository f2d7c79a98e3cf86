//! Flat-file output of an experiment bundle.
//!
//! Everything written is a pure function of the bundle, so equal bundles give
//! byte-identical files.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::experiment::{Bundle, Summary, TrialRecord, TrialStatus};
use crate::error::{Error, Result};
use crate::geometry::{Axis, Box3, BoxFamily, Interval};
use crate::selection::{split_classes, Check, SelectionResult};

/// One rectangle of a horizontal section with the depth of each layer over it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionCell {
    pub x: Interval,
    pub y: Interval,
    pub depths: Vec<u32>,
}

/// The plane `x₃ = z` restricted to `region`, cut into the rectangles on which every
/// layer's depth is constant. A box meets the plane when `lo ≤ z < hi`.
pub fn section(region: &Box3, layers: &[&[Box3]], z: i64) -> Vec<SectionCell> {
    let meets = |b: &Box3| b.z.lo() <= z && z < b.z.hi();
    if !meets(region) {
        return Vec::new();
    }
    let clipped: Vec<Vec<Box3>> = layers
        .iter()
        .map(|l| l.iter().filter(|b| meets(b)).filter_map(|b| b.intersect(region)).collect())
        .collect();
    let cuts = |axis: Axis| -> Vec<i64> {
        let iv = region.axis(axis);
        clipped
            .iter()
            .flatten()
            .flat_map(|b| [b.axis(axis).lo(), b.axis(axis).hi()])
            .chain([iv.lo(), iv.hi()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    };
    let (xs, ys) = (cuts(Axis::X), cuts(Axis::Y));
    let mut out = Vec::new();
    for yw in ys.windows(2) {
        for xw in xs.windows(2) {
            let x = Interval::new(xw[0], xw[1]).expect("cuts increase");
            let y = Interval::new(yw[0], yw[1]).expect("cuts increase");
            let depths = clipped
                .iter()
                .map(|l| l.iter().filter(|b| b.x.contains(&x) && b.y.contains(&y)).count() as u32)
                .collect();
            out.push(SectionCell { x, y, depths });
        }
    }
    out
}

/// CSV with columns `x_lo,x_hi,y_lo,y_hi` followed by one column per layer.
pub fn section_csv(cells: &[SectionCell], names: &[&str]) -> String {
    let mut s = String::from("x_lo,x_hi,y_lo,y_hi");
    for n in names {
        s.push(',');
        s.push_str(n);
    }
    s.push('\n');
    for c in cells {
        write!(s, "{},{},{},{}", c.x.lo(), c.x.hi(), c.y.lo(), c.y.hi()).unwrap();
        for d in &c.depths {
            write!(s, ",{d}").unwrap();
        }
        s.push('\n');
    }
    s
}

/// Section of a region through the dilations of its two prior classes, labelled `(r, s)`.
pub fn class_section(region: &Box3, prior: &[Box3], dilation: u32, z: i64) -> Result<Vec<SectionCell>> {
    let split = split_classes(region, prior);
    let dilate = |ids: &[usize]| -> Result<Vec<Box3>> { ids.iter().map(|&i| prior[i].dilate(dilation)).collect() };
    let (c1, c2) = (dilate(&split.class1)?, dilate(&split.class2)?);
    Ok(section(region, &[&c1, &c2], z))
}

/// The middle plane of a box along the third axis.
pub fn mid_plane(b: &Box3) -> i64 {
    b.z.lo() + b.z.len() / 2
}

/// Class section of the `k`-th rejection of a selection through its middle plane.
pub fn rejection_section(
    family: &BoxFamily,
    result: &SelectionResult,
    k: usize,
    dilation: u32,
) -> Result<Option<(usize, Vec<SectionCell>)>> {
    let Some((idx, prior)) = result.rejections().into_iter().nth(k) else {
        return Ok(None);
    };
    let region = family.boxes[idx];
    let prior: Vec<Box3> = prior.iter().map(|&i| family.boxes[i]).collect();
    Ok(Some((idx, class_section(&region, &prior, dilation, mid_plane(&region))?)))
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    config: &'a ExperimentConfig,
    summary: &'a Summary,
    aborted: Vec<AbortedTrial<'a>>,
}

#[derive(Serialize)]
struct AbortedTrial<'a> {
    trial: usize,
    stage: &'a super::experiment::Stage,
    error: &'a str,
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

pub fn trials_csv(trials: &[TrialRecord]) -> String {
    let mut s = String::from(
        "trial,status,selected,rejected,p1_dropped,union_all,union_selected,union_rejected,\
         measure_ratio,exp_ratio,final_integral,exp_bound,worst_induction_excess,\
         induction_failures,check_failures,product_pairs,product_violations,\
         inclusion_cells,inclusion_violations,inclusion_weakest,passed\n",
    );
    for t in trials {
        match &t.status {
            TrialStatus::Completed(o) => {
                let check_failures: usize = o.tallies.iter().map(|c| c.failed).sum();
                writeln!(
                    s,
                    "{},completed,{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    t.trial,
                    o.selected,
                    o.rejected,
                    o.p1_dropped,
                    o.union_all,
                    o.union_selected,
                    o.union_rejected,
                    o.measure_ratio,
                    o.exp_ratio,
                    o.final_integral,
                    o.exp_bound,
                    o.worst_induction_excess,
                    o.failed(Check::InductionStep),
                    check_failures,
                    o.product.pairs_checked,
                    o.product.violations,
                    o.inclusion.cells_checked,
                    o.inclusion.violating_cells,
                    opt(o.inclusion.weakest),
                    o.passed(),
                )
                .unwrap();
            }
            TrialStatus::Aborted { stage, .. } => {
                let stage = serde_json::to_value(stage).expect("stage serializes");
                writeln!(s, "{},aborted:{},,,,,,,,,,,,,,,,,,,false", t.trial, stage.as_str().unwrap_or("")).unwrap();
            }
        }
    }
    s
}

fn write_file(path: &Path, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|source| Error::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    written.push(path.to_path_buf());
    Ok(())
}

/// Writes the bundle under `dir` and returns the files written, in writing order.
///
/// * `summary.json`: configuration, aggregate constants and aborted trials.
/// * `trials.csv`: one row of constants per trial.
/// * `families/trial_NNN.json`: every family, for replay.
/// * `histograms/trial_NNN.csv`: depth histogram of the selected dilations over `∪ selected`.
/// * `section.csv`: class section of the first rejection in the bundle, if any.
pub fn emit_report(bundle: &Bundle, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let aborted = bundle
        .trials
        .iter()
        .filter_map(|t| match &t.status {
            TrialStatus::Aborted { stage, error } => Some(AbortedTrial {
                trial: t.trial,
                stage,
                error,
            }),
            TrialStatus::Completed(_) => None,
        })
        .collect();
    let summary = SummaryFile {
        config: &bundle.config,
        summary: &bundle.summary,
        aborted,
    };
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    write_file(&dir.join("summary.json"), &json, &mut written)?;
    write_file(&dir.join("trials.csv"), &trials_csv(&bundle.trials), &mut written)?;
    for t in &bundle.trials {
        if let Some(family) = &t.family {
            let mut json = family.to_json()?;
            json.push('\n');
            write_file(
                &dir.join("families").join(format!("trial_{:03}.json", t.trial)),
                &json,
                &mut written,
            )?;
        }
        if let Some(exact) = t.selection.as_ref().and_then(|r| r.exact.as_ref()) {
            write_file(
                &dir.join("histograms").join(format!("trial_{:03}.csv", t.trial)),
                &exact.integral.to_csv(),
                &mut written,
            )?;
        }
    }
    let mut section_text = String::from("trial,rejected,");
    let mut cells = None;
    for t in &bundle.trials {
        if let (Some(family), Some(result)) = (&t.family, &t.selection) {
            if let Some((idx, c)) = rejection_section(family, result, 0, bundle.config.params.dilation)? {
                cells = Some((t.trial, idx, c));
                break;
            }
        }
    }
    match cells {
        Some((trial, idx, c)) => {
            let body = section_csv(&c, &["r", "s"]);
            let (head, rows) = body.split_once('\n').expect("header line");
            section_text.push_str(head);
            section_text.push('\n');
            for row in rows.lines() {
                writeln!(section_text, "{trial},{idx},{row}").unwrap();
            }
        }
        None => section_text.push_str("x_lo,x_hi,y_lo,y_hi,r,s\n"),
    }
    write_file(&dir.join("section.csv"), &section_text, &mut written)?;
    Ok(written)
}
