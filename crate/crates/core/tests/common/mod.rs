//! Test-only oracles. Nothing here goes through coordinate compression or sweeps.

#![allow(dead_code)]

use std::cmp::Ordering;

use covering_core::Box3;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random box with integer corners in `[0, side]³`.
pub fn random_box(rng: &mut ChaCha8Rng, side: i64) -> Box3 {
    let iv = |rng: &mut ChaCha8Rng| {
        let lo = rng.random_range(0..side);
        let hi = rng.random_range(lo + 1..=side);
        [lo, hi]
    };
    let (x, y, z) = (iv(rng), iv(rng), iv(rng));
    Box3::from_bounds(x, y, z).unwrap()
}

pub fn random_boxes(rng: &mut ChaCha8Rng, n: usize, side: i64) -> Vec<Box3> {
    (0..n).map(|_| random_box(rng, side)).collect()
}

/// Unit cells `[i, i+1] × [j, j+1] × [k, k+1]` of a box.
fn unit_cells(b: &Box3) -> impl Iterator<Item = [i64; 3]> + '_ {
    (b.z.lo()..b.z.hi()).flat_map(move |k| {
        (b.y.lo()..b.y.hi()).flat_map(move |j| (b.x.lo()..b.x.hi()).map(move |i| [i, j, k]))
    })
}

fn contains_unit(b: &Box3, [i, j, k]: [i64; 3]) -> bool {
    b.x.lo() <= i && i < b.x.hi() && b.y.lo() <= j && j < b.y.hi() && b.z.lo() <= k && k < b.z.hi()
}

pub fn raster_depth(boxes: &[Box3], cell: [i64; 3]) -> usize {
    boxes.iter().filter(|b| contains_unit(b, cell)).count()
}

pub fn raster_union(boxes: &[Box3]) -> u128 {
    let Some(first) = boxes.first() else { return 0 };
    let hull = boxes.iter().fold(*first, |h, b| h.hull(b));
    unit_cells(&hull).filter(|&c| raster_depth(boxes, c) > 0).count() as u128
}

/// Measure of `region` at each depth, trailing zeros trimmed.
pub fn raster_histogram(region: &Box3, boxes: &[Box3]) -> Vec<u128> {
    let mut h = Vec::new();
    for c in unit_cells(region) {
        let d = raster_depth(boxes, c);
        if h.len() <= d {
            h.resize(d + 1, 0);
        }
        h[d] += 1;
    }
    while h.last() == Some(&0) {
        h.pop();
    }
    h
}

pub fn raster_joint(region: &Box3, a: &[Box3], b: &[Box3]) -> std::collections::BTreeMap<(usize, usize), u128> {
    let mut m = std::collections::BTreeMap::new();
    for c in unit_cells(region) {
        *m.entry((raster_depth(a, c), raster_depth(b, c))).or_insert(0) += 1;
    }
    m
}

/// Best average over every interval `[breaks[a], breaks[b]]` with `a ≤ cell < b`,
/// summing masses afresh for each interval.
pub fn brute_line_maximal(values: &[u64], lens: &[u64], cell: usize) -> Ratio<u128> {
    let mut best: Option<Ratio<u128>> = None;
    for a in 0..=cell {
        for b in cell + 1..=values.len() {
            let mass: u128 = (a..b).map(|t| values[t] as u128 * lens[t] as u128).sum();
            let len: u128 = (a..b).map(|t| lens[t] as u128).sum();
            let avg = Ratio::new(mass, len);
            if best.is_none_or(|m| avg.cmp(&m) == Ordering::Greater) {
                best = Some(avg);
            }
        }
    }
    best.unwrap()
}

/// `M f(x)` along one line for a piecewise-constant `f`, at a point `x` strictly
/// inside a piece: the supremum over every interval `[s, t] ∋ x` with `s, t`
/// breakpoints or `x` itself.
pub fn point_maximal(breaks: &[f64], values: &[f64], x: f64) -> f64 {
    let mut ends: Vec<f64> = breaks.to_vec();
    ends.push(x);
    ends.sort_by(f64::total_cmp);
    let integral = |s: f64, t: f64| -> f64 {
        breaks
            .windows(2)
            .zip(values)
            .map(|(w, v)| (t.min(w[1]) - s.max(w[0])).max(0.0) * v)
            .sum()
    };
    let mut best = 0.0f64;
    for &s in ends.iter().filter(|&&s| s <= x) {
        for &t in ends.iter().filter(|&&t| t >= x) {
            if t > s {
                best = best.max(integral(s, t) / (t - s));
            }
        }
    }
    best
}

/// Random integer field on a grid with 1..=`max_cells` cells per axis and gaps in `1..=4`.
pub fn random_field(rng: &mut ChaCha8Rng, max_cells: usize) -> (covering_core::measure::Grid3, Vec<u64>) {
    let axis = |rng: &mut ChaCha8Rng| -> Vec<i64> {
        let n = rng.random_range(1..=max_cells);
        let mut v = vec![rng.random_range(-4..=4)];
        for _ in 0..n {
            let next = v.last().unwrap() + rng.random_range(1..=4);
            v.push(next);
        }
        v
    };
    let (xs, ys, zs) = (axis(rng), axis(rng), axis(rng));
    let grid = covering_core::measure::Grid3::from_breakpoints(xs, ys, zs).unwrap();
    let values = (0..grid.cell_count())
        .map(|_| if rng.random_bool(0.4) { rng.random_range(1..=12) } else { 0 })
        .collect();
    (grid, values)
}

/// Values and lengths of the line of cells through `cell` along `axis`.
pub fn line_through(
    grid: &covering_core::measure::Grid3,
    values: &[u64],
    axis: covering_core::Axis,
    cell: [usize; 3],
) -> (Vec<u64>, Vec<u64>) {
    let n = grid.cells(axis);
    let mut vals = Vec::with_capacity(n);
    let mut lens = Vec::with_capacity(n);
    for t in 0..n {
        let mut c = cell;
        c[axis.index()] = t;
        vals.push(values[grid.linear_index(c)]);
        lens.push(grid.cell_len(axis, t) as u64);
    }
    (vals, lens)
}
