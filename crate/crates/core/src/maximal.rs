//! Directional Hardy–Littlewood maximal operators on piecewise-constant fields.
//!
//! Fields are constant on the cells of a [`Grid3`] and vanish outside its hull.
//! Averages are taken over intervals whose endpoints are grid breakpoints, and the
//! value stored for a cell is the best average over intervals containing the
//! whole cell. That makes every cell value a lower bound for the maximal function
//! at each point of the cell.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::arith::cmp_fractions;
use crate::error::{Error, Result};
use crate::geometry::{Axis, Box3, BoxFamily, Interval, Measure};
use crate::measure::{DepthField, Grid3};
use crate::selection::{directional_threshold, SelectionResult, SieveParams, WEAK_TYPE_CONSTANT};

/// Largest grid side accepted by [`strong_maximal_grid`].
pub const STRONG_GRID_LIMIT: usize = 48;

#[derive(Clone, Debug, PartialEq)]
pub enum FieldValues {
    /// Exact nonnegative integer per cell.
    Integer(Vec<u64>),
    /// `e^{c·depth}` on cells of positive depth, zero on depth-0 cells.
    ExpDepth { depth: Vec<u32>, c: f64 },
}

/// Nonnegative piecewise-constant field on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField3 {
    grid: Grid3,
    values: FieldValues,
}

impl ScalarField3 {
    pub fn integer(grid: Grid3, values: Vec<u64>) -> Result<Self> {
        Self::new(grid, FieldValues::Integer(values))
    }

    pub fn new(grid: Grid3, values: FieldValues) -> Result<Self> {
        let got = match &values {
            FieldValues::Integer(v) => v.len(),
            FieldValues::ExpDepth { depth, c } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(Error::Parameter(format!("c = {c} must be positive")));
                }
                depth.len()
            }
        };
        let expected = grid.cell_count();
        if got != expected {
            return Err(Error::FieldShape { expected, got });
        }
        Ok(ScalarField3 { grid, values })
    }

    /// The exponential of a depth field, supported where the depth is positive.
    pub fn exp_of_depth(field: &DepthField, c: f64) -> Result<Self> {
        Self::new(
            field.grid().clone(),
            FieldValues::ExpDepth {
                depth: field.depths().to_vec(),
                c,
            },
        )
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn values(&self) -> &FieldValues {
        &self.values
    }

    pub fn value(&self, linear: usize) -> f64 {
        match &self.values {
            FieldValues::Integer(v) => v[linear] as f64,
            FieldValues::ExpDepth { depth, c } => exp_weight(depth[linear], *c),
        }
    }

    /// Multiplies an integer field by `t`.
    pub fn scaled(&self, t: u64) -> Option<Self> {
        match &self.values {
            FieldValues::Integer(v) => Some(ScalarField3 {
                grid: self.grid.clone(),
                values: FieldValues::Integer(v.iter().map(|x| x * t).collect()),
            }),
            FieldValues::ExpDepth { .. } => None,
        }
    }

    /// `∫ f` for integer fields.
    pub fn exact_integral(&self) -> Option<Measure> {
        match &self.values {
            FieldValues::Integer(v) => Some(
                v.iter()
                    .enumerate()
                    .map(|(n, &x)| x as Measure * self.grid.cell_volume(self.grid.cell_of(n)))
                    .sum(),
            ),
            FieldValues::ExpDepth { .. } => None,
        }
    }

    /// `∫ f`, accumulated line by line in grid order.
    pub fn integral(&self) -> f64 {
        if let Some(exact) = self.exact_integral() {
            return exact as f64;
        }
        (0..self.grid.cell_count())
            .map(|n| self.value(n) * self.grid.cell_volume(self.grid.cell_of(n)) as f64)
            .sum()
    }
}

fn exp_weight(depth: u32, c: f64) -> f64 {
    if depth == 0 {
        0.0
    } else {
        (c * depth as f64).exp()
    }
}

/// Best average of one cell: `mass / len` over breakpoint interval `[from, to)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineBest<T> {
    pub mass: T,
    pub len: T,
    pub from: usize,
    pub to: usize,
}

/// For each cell of a line, the largest average over breakpoint intervals containing it.
///
/// `masses[i]` is the integral over cell `i`, `lens[i]` its positive length. O(n²).
pub fn line_maximal_exact(masses: &[u128], lens: &[u128]) -> Vec<LineBest<u128>> {
    line_maximal(masses, lens, |a, b| cmp_fractions(a.0, a.1, b.0, b.1))
}

pub fn line_maximal_float(masses: &[f64], lens: &[f64]) -> Vec<LineBest<f64>> {
    line_maximal(masses, lens, |a, b| {
        (a.0 / a.1).partial_cmp(&(b.0 / b.1)).unwrap_or(Ordering::Equal)
    })
}

fn line_maximal<T, C>(masses: &[T], lens: &[T], cmp: C) -> Vec<LineBest<T>>
where
    T: Copy + Default + std::ops::Add<Output = T>,
    C: Fn((T, T), (T, T)) -> Ordering,
{
    let n = masses.len();
    let mut best: Vec<Option<LineBest<T>>> = vec![None; n];
    let better = |cand: &LineBest<T>, cur: &Option<LineBest<T>>| match cur {
        None => true,
        Some(c) => cmp((cand.mass, cand.len), (c.mass, c.len)) == Ordering::Greater,
    };
    let mut spans: Vec<LineBest<T>> = Vec::with_capacity(n);
    for from in 0..n {
        spans.clear();
        let (mut mass, mut len) = (T::default(), T::default());
        for to in from + 1..=n {
            mass = mass + masses[to - 1];
            len = len + lens[to - 1];
            spans.push(LineBest { mass, len, from, to });
        }
        // Suffix maxima: the best interval starting at `from` that ends after cell `i`.
        for k in (0..spans.len().saturating_sub(1)).rev() {
            if cmp(
                (spans[k + 1].mass, spans[k + 1].len),
                (spans[k].mass, spans[k].len),
            ) == Ordering::Greater
            {
                spans[k] = spans[k + 1];
            }
        }
        for (k, cand) in spans.iter().enumerate() {
            let cell = from + k;
            if better(cand, &best[cell]) {
                best[cell] = Some(*cand);
            }
        }
    }
    best.into_iter()
        .map(|b| b.expect("every cell lies in its own interval"))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub enum MaximalValues {
    Exact(Vec<Ratio<u128>>),
    Float(Vec<f64>),
}

/// Uncentered one-dimensional maximal function along `axis`, one value per cell.
#[derive(Clone, Debug, PartialEq)]
pub struct MaximalField {
    grid: Grid3,
    axis: Axis,
    values: MaximalValues,
    /// Breakpoint indices `(from, to)` along `axis` of the maximizing interval.
    witnesses: Vec<(usize, usize)>,
}

impl MaximalField {
    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn values(&self) -> &MaximalValues {
        &self.values
    }

    pub fn value(&self, linear: usize) -> f64 {
        match &self.values {
            MaximalValues::Exact(v) => ratio_to_f64(&v[linear]),
            MaximalValues::Float(v) => v[linear],
        }
    }

    pub fn exact(&self, linear: usize) -> Option<Ratio<u128>> {
        match &self.values {
            MaximalValues::Exact(v) => Some(v[linear]),
            MaximalValues::Float(_) => None,
        }
    }

    pub fn witness(&self, linear: usize) -> (usize, usize) {
        self.witnesses[linear]
    }

    pub fn max_value(&self) -> f64 {
        (0..self.grid.cell_count())
            .map(|n| self.value(n))
            .fold(0.0, f64::max)
    }
}

fn ratio_to_f64(r: &Ratio<u128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Linear indices of every line of cells parallel to `axis`.
fn lines(grid: &Grid3, axis: Axis) -> Vec<Vec<usize>> {
    let shape = grid.shape();
    let (p, q) = axis.others();
    let mut out = Vec::with_capacity(shape[p.index()] * shape[q.index()]);
    for b in 0..shape[q.index()] {
        for a in 0..shape[p.index()] {
            let line = (0..shape[axis.index()])
                .map(|t| {
                    let mut cell = [0; 3];
                    cell[axis.index()] = t;
                    cell[p.index()] = a;
                    cell[q.index()] = b;
                    grid.linear_index(cell)
                })
                .collect();
            out.push(line);
        }
    }
    out
}

/// The uncentered maximal function of `f` along `axis`.
///
/// Integer fields are handled in exact rational arithmetic; exponential fields are
/// summed in floating point from their exact depths.
pub fn hl_maximal_1d(f: &ScalarField3, axis: Axis) -> MaximalField {
    let grid = f.grid().clone();
    let n = grid.cell_count();
    let lens: Vec<i64> = (0..grid.cells(axis)).map(|t| grid.cell_len(axis, t)).collect();
    let mut witnesses = vec![(0, 0); n];
    let values = match f.values() {
        FieldValues::Integer(v) => {
            let mut out = vec![Ratio::new_raw(0u128, 1); n];
            let lens: Vec<u128> = lens.iter().map(|&l| l as u128).collect();
            for line in lines(&grid, axis) {
                let masses: Vec<u128> = line
                    .iter()
                    .zip(&lens)
                    .map(|(&c, &l)| v[c] as u128 * l)
                    .collect();
                for (&c, best) in line.iter().zip(line_maximal_exact(&masses, &lens)) {
                    out[c] = Ratio::new(best.mass, best.len);
                    witnesses[c] = (best.from, best.to);
                }
            }
            MaximalValues::Exact(out)
        }
        FieldValues::ExpDepth { .. } => {
            let mut out = vec![0.0; n];
            let lens: Vec<f64> = lens.iter().map(|&l| l as f64).collect();
            for line in lines(&grid, axis) {
                let masses: Vec<f64> = line.iter().zip(&lens).map(|(&c, &l)| f.value(c) * l).collect();
                for (&c, best) in line.iter().zip(line_maximal_float(&masses, &lens)) {
                    out[c] = best.mass / best.len;
                    witnesses[c] = (best.from, best.to);
                }
            }
            MaximalValues::Float(out)
        }
    };
    MaximalField {
        grid,
        axis,
        values,
        witnesses,
    }
}

/// Measure of `{mf > λ}`.
pub fn level_set_measure(mf: &MaximalField, lambda: f64) -> Measure {
    let g = mf.grid();
    (0..g.cell_count())
        .filter(|&n| mf.value(n) > lambda)
        .map(|n| g.cell_volume(g.cell_of(n)))
        .sum()
}

/// Measure of `{a > λ} ∪ {b > λ}` for two maximal fields on the same grid.
pub fn level_set_measure_union(a: &MaximalField, b: &MaximalField, lambda: f64) -> Result<Measure> {
    if a.grid() != b.grid() {
        return Err(Error::Parameter("maximal fields live on different grids".into()));
    }
    let g = a.grid();
    Ok((0..g.cell_count())
        .filter(|&n| a.value(n) > lambda || b.value(n) > lambda)
        .map(|n| g.cell_volume(g.cell_of(n)))
        .sum())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeReport {
    pub axis: Axis,
    pub lambda: f64,
    pub constant: f64,
    /// `m{M f > λ}`.
    pub level_set_measure: Measure,
    /// `∫ f`.
    pub integral: f64,
    /// `(constant / λ) · ∫ f`.
    pub bound: f64,
    pub passed: bool,
}

/// Checks `m{M_axis f > λ} ≤ (constant / λ) ∫ f`.
pub fn weak_type_check(f: &ScalarField3, axis: Axis, lambda: f64, constant: f64) -> Result<WeakTypeReport> {
    if !(lambda > 0.0 && constant > 0.0) {
        return Err(Error::Parameter("lambda and constant must be positive".into()));
    }
    let mf = hl_maximal_1d(f, axis);
    let level = level_set_measure(&mf, lambda);
    let integral = f.integral();
    let bound = constant / lambda * integral;
    Ok(WeakTypeReport {
        axis,
        lambda,
        constant,
        level_set_measure: level,
        integral,
        bound,
        passed: level as f64 <= bound,
    })
}

/// A rejected cell on which both directional maximal functions stay at or below
/// the level on a set of positive measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionViolation {
    pub index: usize,
    pub cell: Box3,
    /// Range of the first coordinate where `M₁ ≤ level`.
    pub first_gap: (f64, f64),
    /// Range of the second coordinate where `M₂ ≤ level`.
    pub second_gap: (f64, f64),
    /// Measure of the part of the cell outside both superlevel sets.
    pub measure: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RejectedCoverage {
    pub index: usize,
    pub cells: usize,
    /// Cells inside the support of the field, where it already exceeds the level.
    pub pointwise: usize,
    /// Remaining cells covered by `{M₁ > level}` alone.
    pub first: usize,
    /// Remaining cells covered by `{M₂ > level}` alone.
    pub second: usize,
    /// Smallest `max(M₁, M₂)` over intervals spanning a whole non-support cell.
    pub weakest: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub support: ExpSupport,
    pub level: f64,
    pub rejected_checked: usize,
    pub cells_checked: usize,
    pub per_rejection: Vec<RejectedCoverage>,
    pub violations: Vec<InclusionViolation>,
}

impl InclusionReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violating_measure(&self) -> f64 {
        self.violations.iter().fold(0.0, |acc, v| acc + v.measure)
    }
}

fn sorted_points(points: impl IntoIterator<Item = i64>) -> Vec<i64> {
    points.into_iter().collect::<BTreeSet<_>>().into_iter().collect()
}

/// Field support for the inclusion check. The exponential is positive everywhere,
/// so the claim is only meaningful once the field is cut off somewhere.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpSupport {
    /// Zero outside the bounding box of the selected dilations; `e⁰ = 1` inside it.
    Hull,
    /// Zero off the union of the selected dilations.
    #[default]
    Dilations,
    /// Zero off the union of the selected boxes themselves.
    Selected,
}

/// Depth along one line parallel to `axis`, constant between consecutive breaks.
struct LineField {
    breaks: Vec<i64>,
    depth: Vec<u32>,
    inside: Vec<bool>,
}

fn line_field(
    axis: Axis,
    slab: &[Box3],
    support: &[Box3],
    across: (Interval, Interval),
    extra: &[i64],
) -> LineField {
    let (p, q) = axis.others();
    let through = |boxes: &[Box3]| -> Vec<Interval> {
        boxes
            .iter()
            .filter(|b| b.axis(p).contains(&across.0) && b.axis(q).contains(&across.1))
            .map(|b| b.axis(axis))
            .collect()
    };
    let (dil, sup) = (through(slab), through(support));
    let breaks = sorted_points(
        dil.iter()
            .chain(&sup)
            .flat_map(|iv| [iv.lo(), iv.hi()])
            .chain(extra.iter().copied()),
    );
    let count = |ivs: &[Interval]| -> Vec<u32> {
        let mut diff = vec![0i64; breaks.len()];
        for iv in ivs {
            diff[breaks.binary_search(&iv.lo()).expect("endpoint present")] += 1;
            diff[breaks.binary_search(&iv.hi()).expect("endpoint present")] -= 1;
        }
        let mut run = 0;
        diff[..breaks.len() - 1]
            .iter()
            .map(|d| {
                run += d;
                run as u32
            })
            .collect()
    };
    let depth = count(&dil);
    let inside = count(&sup).into_iter().map(|d| d > 0).collect();
    LineField { breaks, depth, inside }
}

/// Where the line maximal function stays `≤ level` inside the zero-valued line cell `t`.
///
/// On such a cell `M(x)` is the largest of three families of averages: intervals
/// spanning the cell, `[s, x]` with `s` a break at or left of it, and `[x, u]` with `u`
/// a break at or right of it. The first is constant in `x`, the second decreasing,
/// the third increasing, so the failure set is a closed interval or empty.
fn line_gap(breaks: &[i64], masses: &[f64], spanning: f64, t: usize, level: f64) -> Option<(f64, f64)> {
    if spanning > level {
        return None;
    }
    let (a, b) = (breaks[t] as f64, breaks[t + 1] as f64);
    let mut lo = a;
    let mut mass = 0.0;
    for s in (0..t).rev() {
        mass += masses[s];
        lo = lo.max(breaks[s] as f64 + mass / level);
    }
    let mut hi = b;
    let mut mass = 0.0;
    for u in t + 1..masses.len() {
        mass += masses[u];
        hi = hi.min(breaks[u + 1] as f64 - mass / level);
    }
    (lo < hi).then_some((lo, hi))
}

/// Checks that every rejected rectangle lies, up to a null set, in
/// `{M₁ exp(Σ χ_{R*_i}) > √3 − 1} ∪ {M₂ exp(Σ χ_{R*_i}) > √3 − 1}`, the sum running
/// over the final selection and the exponential vanishing off its support.
///
/// Each rejected box is cut at every endpoint of a dilation meeting it, so the field
/// along any line through a cell is the same for all points of the cell. The set
/// where a directional maximal function fails is then exact per cell.
pub fn rejected_inclusion_check(
    result: &SelectionResult,
    family: &BoxFamily,
    params: &SieveParams,
) -> Result<InclusionReport> {
    rejected_inclusion_check_with(result, family, params, ExpSupport::default())
}

pub fn rejected_inclusion_check_with(
    result: &SelectionResult,
    family: &BoxFamily,
    params: &SieveParams,
    support: ExpSupport,
) -> Result<InclusionReport> {
    params.validate()?;
    let level = directional_threshold();
    let dilated: Vec<Box3> = result
        .selected
        .iter()
        .map(|&i| family.boxes[i].dilate(params.dilation))
        .collect::<Result<_>>()?;
    let support_boxes: Vec<Box3> = match support {
        ExpSupport::Hull => dilated.iter().copied().reduce(|h, b| h.hull(&b)).into_iter().collect(),
        ExpSupport::Dilations => dilated.clone(),
        ExpSupport::Selected => result.selected.iter().map(|&i| family.boxes[i]).collect(),
    };
    let mut report = InclusionReport {
        support,
        level,
        rejected_checked: 0,
        cells_checked: 0,
        per_rejection: Vec::new(),
        violations: Vec::new(),
    };
    for &idx in &result.rejected {
        let r = family.boxes[idx];
        let slab_of = |boxes: &[Box3], axis: Axis| -> Vec<Box3> {
            let (p, q) = axis.others();
            boxes
                .iter()
                .filter(|d| {
                    d.axis(p).intersect(&r.axis(p)).is_some() && d.axis(q).intersect(&r.axis(q)).is_some()
                })
                .copied()
                .collect()
        };
        let slabs = [Axis::X, Axis::Y].map(|axis| slab_of(&dilated, axis));
        let support_slabs = [Axis::X, Axis::Y].map(|axis| slab_of(&support_boxes, axis));
        let cuts = Axis::ALL.map(|axis| {
            let iv = r.axis(axis);
            sorted_points(
                slabs
                    .iter()
                    .chain(&support_slabs)
                    .flatten()
                    .flat_map(|d| [d.axis(axis).lo(), d.axis(axis).hi()])
                    .filter(|&t| iv.lo() < t && t < iv.hi())
                    .chain([iv.lo(), iv.hi()]),
            )
        });
        let pieces = |axis: Axis| -> Vec<Interval> {
            cuts[axis.index()]
                .windows(2)
                .map(|w| Interval::new(w[0], w[1]).expect("cuts increase"))
                .collect()
        };
        let (xs, ys, zs) = (pieces(Axis::X), pieces(Axis::Y), pieces(Axis::Z));
        let shape = [xs.len(), ys.len(), zs.len()];
        let cell_count = shape.iter().product::<usize>();
        let at = |i: usize, j: usize, k: usize| (k * shape[1] + j) * shape[0] + i;
        let mut pointwise = vec![false; cell_count];
        let mut spanning = [vec![f64::INFINITY; cell_count], vec![f64::INFINITY; cell_count]];
        let mut gaps: [Vec<Option<(f64, f64)>>; 2] = [vec![None; cell_count], vec![None; cell_count]];
        for (dir, axis) in [Axis::X, Axis::Y].into_iter().enumerate() {
            let (along, across_a) = match axis {
                Axis::X => (&xs, &ys),
                _ => (&ys, &xs),
            };
            let extra = &cuts[axis.index()];
            for (k, z) in zs.iter().enumerate() {
                for (a_idx, a) in across_a.iter().enumerate() {
                    let lf = line_field(axis, &slabs[dir], &support_slabs[dir], (*a, *z), extra);
                    let lens: Vec<f64> = lf.breaks.windows(2).map(|w| (w[1] - w[0]) as f64).collect();
                    let masses: Vec<f64> = lf
                        .depth
                        .iter()
                        .zip(&lf.inside)
                        .zip(&lens)
                        .map(|((&d, &inside), &l)| if inside { (params.c * d as f64).exp() * l } else { 0.0 })
                        .collect();
                    let mut best: Option<Vec<LineBest<f64>>> = None;
                    for (t, piece) in along.iter().enumerate() {
                        let cell = match axis {
                            Axis::X => at(t, a_idx, k),
                            _ => at(a_idx, t, k),
                        };
                        // Every slab endpoint inside R is a cut, so a piece is one line cell.
                        let s = lf.breaks.binary_search(&piece.lo()).expect("cut present");
                        debug_assert_eq!(lf.breaks[s + 1], piece.hi());
                        // On the support the field is at least e⁰ = 1, above the level.
                        if lf.inside[s] {
                            pointwise[cell] = true;
                            continue;
                        }
                        let best = best.get_or_insert_with(|| line_maximal_float(&masses, &lens));
                        let value = best[s].mass / best[s].len;
                        spanning[dir][cell] = value;
                        gaps[dir][cell] = line_gap(&lf.breaks, &masses, value, s, level);
                    }
                }
            }
        }
        let mut cov = RejectedCoverage {
            index: idx,
            cells: cell_count,
            pointwise: 0,
            first: 0,
            second: 0,
            weakest: None,
        };
        for (k, z) in zs.iter().enumerate() {
            for (j, y) in ys.iter().enumerate() {
                for (i, x) in xs.iter().enumerate() {
                    let n = at(i, j, k);
                    if pointwise[n] {
                        cov.pointwise += 1;
                        continue;
                    }
                    let top = spanning[0][n].max(spanning[1][n]);
                    cov.weakest = Some(cov.weakest.map_or(top, |w: f64| w.min(top)));
                    match (gaps[0][n], gaps[1][n]) {
                        (None, _) => cov.first += 1,
                        (Some(_), None) => cov.second += 1,
                        (Some(g1), Some(g2)) => {
                            let measure = (g1.1 - g1.0) * (g2.1 - g2.0) * z.len() as f64;
                            report.violations.push(InclusionViolation {
                                index: idx,
                                cell: Box3::new(*x, *y, *z),
                                first_gap: g1,
                                second_gap: g2,
                                measure,
                            });
                        }
                    }
                }
            }
        }
        report.rejected_checked += 1;
        report.cells_checked += cell_count;
        report.per_rejection.push(cov);
    }
    Ok(report)
}

/// Nonnegative integer field on a `rows × cols` grid of unit squares.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Field2 {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<u64>,
}

impl Field2 {
    pub fn new(rows: usize, cols: usize, values: Vec<u64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::FieldShape {
                expected: rows * cols,
                got: values.len(),
            });
        }
        Ok(Field2 { rows, cols, values })
    }

    pub fn at(&self, r: usize, c: usize) -> u64 {
        self.values[r * self.cols + c]
    }
}

/// Strong maximal function: best average over all grid rectangles containing each cell.
///
/// Enumerates every row band, reduces it to a line of column sums and runs the
/// one-dimensional kernel on it, O(g⁴) in total.
pub fn strong_maximal_2d(f: &Field2) -> Result<Vec<Ratio<u128>>> {
    let side = f.rows.max(f.cols);
    if side > STRONG_GRID_LIMIT {
        return Err(Error::GridTooLarge {
            side,
            max: STRONG_GRID_LIMIT,
        });
    }
    let (rows, cols) = (f.rows, f.cols);
    let mut best: Vec<Option<(u128, u128)>> = vec![None; rows * cols];
    let unit = vec![1u128; cols];
    for r0 in 0..rows {
        let mut sums = vec![0u128; cols];
        for r1 in r0 + 1..=rows {
            for (c, s) in sums.iter_mut().enumerate() {
                *s += f.at(r1 - 1, c) as u128;
            }
            let height = (r1 - r0) as u128;
            let line = line_maximal_exact(&sums, &unit);
            for (c, lb) in line.iter().enumerate() {
                let cand = (lb.mass, lb.len * height);
                for r in r0..r1 {
                    let slot = &mut best[r * cols + c];
                    let replace = match slot {
                        None => true,
                        Some(cur) => cmp_fractions(cand.0, cand.1, cur.0, cur.1) == Ordering::Greater,
                    };
                    if replace {
                        *slot = Some(cand);
                    }
                }
            }
        }
    }
    Ok(best
        .into_iter()
        .map(|b| {
            let (m, l) = b.expect("every cell lies in its own rectangle");
            Ratio::new(m, l)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrongMaximalReport {
    pub alpha: f64,
    /// `m{M₂ f > α}`.
    pub superlevel_measure: u64,
    /// `∫ (f/α)(1 + log₊(f/α))`.
    pub orlicz_integral: f64,
    /// `superlevel_measure / orlicz_integral`, an empirical lower bound on `C₂`.
    pub ratio: f64,
}

pub fn orlicz_integral(f: &Field2, alpha: f64) -> f64 {
    f.values
        .iter()
        .map(|&v| {
            let t = v as f64 / alpha;
            t * (1.0 + t.ln().max(0.0))
        })
        .sum()
}

pub fn strong_maximal_grid(f: &Field2, alpha: f64) -> Result<StrongMaximalReport> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Parameter(format!("alpha = {alpha} must be positive")));
    }
    let m = strong_maximal_2d(f)?;
    let superlevel = m.iter().filter(|r| ratio_to_f64(r) > alpha).count() as u64;
    let orlicz = orlicz_integral(f, alpha);
    Ok(StrongMaximalReport {
        alpha,
        superlevel_measure: superlevel,
        orlicz_integral: orlicz,
        ratio: if orlicz > 0.0 {
            superlevel as f64 / orlicz
        } else {
            0.0
        },
    })
}

/// Default constant for [`weak_type_check`].
pub fn default_weak_type_constant() -> f64 {
    WEAK_TYPE_CONSTANT
}
