//! Slab-by-slab depth computation over a compressed grid.
//!
//! Both methods walk the z-slabs in order and hand the caller the depth of every
//! `(x, y)` cell in the current slab, one layer per generating box set. They only
//! differ in how the 2-D depth is maintained, which makes them usable as
//! independent routes for cross-checking.

use super::grid::{Grid3, IndexBox};

/// How depth is maintained between slabs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DepthMethod {
    /// 3-D difference array: corner increments, prefix sums in x and y per slab,
    /// running sum along z.
    #[default]
    DifferenceArray,
    /// Plane sweep: each box entering or leaving the sweep plane adds or removes
    /// one unit over its whole `(x, y)` footprint.
    PlaneSweep,
}

struct Events {
    starts: Vec<Vec<usize>>,
    ends: Vec<Vec<usize>>,
}

impl Events {
    fn new(boxes: &[IndexBox], nz: usize) -> Self {
        let mut starts = vec![Vec::new(); nz + 1];
        let mut ends = vec![Vec::new(); nz + 1];
        for (n, b) in boxes.iter().enumerate() {
            if b.lo.iter().zip(&b.hi).all(|(lo, hi)| lo < hi) {
                starts[b.lo[2]].push(n);
                ends[b.hi[2]].push(n);
            }
        }
        Events { starts, ends }
    }
}

/// Calls `visit(k, depths)` for every slab `k`, where `depths[l][j * nx + i]` is the
/// number of boxes of layer `l` covering cell `(i, j, k)`.
pub(crate) fn sweep_layers<F>(grid: &Grid3, layers: &[Vec<IndexBox>], method: DepthMethod, mut visit: F)
where
    F: FnMut(usize, &[Vec<u32>]),
{
    let [nx, ny, nz] = grid.shape();
    let events: Vec<Events> = layers.iter().map(|l| Events::new(l, nz)).collect();
    let mut depths = vec![vec![0u32; nx * ny]; layers.len()];
    match method {
        DepthMethod::DifferenceArray => {
            let stride = nx + 1;
            let mut diffs = vec![vec![0i64; stride * (ny + 1)]; layers.len()];
            for k in 0..nz {
                for (l, ev) in events.iter().enumerate() {
                    let diff = &mut diffs[l];
                    let mut corner = |b: &IndexBox, sign: i64| {
                        diff[b.lo[1] * stride + b.lo[0]] += sign;
                        diff[b.lo[1] * stride + b.hi[0]] -= sign;
                        diff[b.hi[1] * stride + b.lo[0]] -= sign;
                        diff[b.hi[1] * stride + b.hi[0]] += sign;
                    };
                    for &n in &ev.starts[k] {
                        corner(&layers[l][n], 1);
                    }
                    for &n in &ev.ends[k] {
                        corner(&layers[l][n], -1);
                    }
                    let depth = &mut depths[l];
                    let mut above = vec![0i64; nx];
                    for j in 0..ny {
                        let mut run = 0i64;
                        for i in 0..nx {
                            run += diff[j * stride + i];
                            above[i] += run;
                            depth[j * nx + i] = above[i] as u32;
                        }
                    }
                }
                visit(k, &depths);
            }
        }
        DepthMethod::PlaneSweep => {
            for k in 0..nz {
                for (l, ev) in events.iter().enumerate() {
                    let depth = &mut depths[l];
                    for &n in &ev.ends[k] {
                        let b = &layers[l][n];
                        for j in b.lo[1]..b.hi[1] {
                            for d in &mut depth[j * nx + b.lo[0]..j * nx + b.hi[0]] {
                                *d -= 1;
                            }
                        }
                    }
                    for &n in &ev.starts[k] {
                        let b = &layers[l][n];
                        for j in b.lo[1]..b.hi[1] {
                            for d in &mut depth[j * nx + b.lo[0]..j * nx + b.hi[0]] {
                                *d += 1;
                            }
                        }
                    }
                }
                visit(k, &depths);
            }
        }
    }
}
