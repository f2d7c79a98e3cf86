//! Exact measures of box unions, depth functions and their histograms.

mod grid;
mod histogram;
mod sweep;

pub use grid::{Grid3, IndexBox};
pub use histogram::{exp_integral, DepthHistogram, JointDepthHistogram, EXP_LIMIT};
pub use sweep::DepthMethod;

use crate::error::Result;
use crate::geometry::{Box3, Measure};

pub(crate) use sweep::sweep_layers;

pub fn compress(boxes: &[Box3]) -> Result<Grid3> {
    Grid3::compress(boxes)
}

/// Visits every cell of the compressed grid of `region` with the depth of each
/// layer and the cell volume. Layer boxes are clipped to `region` first.
pub(crate) fn scan_region<F>(region: &Box3, layers: &[&[Box3]], method: DepthMethod, mut visit: F)
where
    F: FnMut(&[u32], Measure),
{
    let clipped: Vec<Vec<Box3>> = layers
        .iter()
        .map(|l| l.iter().filter_map(|b| b.intersect(region)).collect())
        .collect();
    let mut all = vec![*region];
    for l in &clipped {
        all.extend_from_slice(l);
    }
    let grid = Grid3::compress(&all).expect("region is always present");
    let indexed: Vec<Vec<IndexBox>> = clipped
        .iter()
        .map(|l| {
            l.iter()
                .map(|b| grid.locate(b).expect("clipped boxes lie on the grid"))
                .collect()
        })
        .collect();
    let [nx, ny, _] = grid.shape();
    let mut cell_depths = vec![0u32; layers.len()];
    sweep_layers(&grid, &indexed, method, |k, depths| {
        for j in 0..ny {
            for i in 0..nx {
                for (d, layer) in cell_depths.iter_mut().zip(depths) {
                    *d = layer[j * nx + i];
                }
                visit(&cell_depths, grid.cell_volume([i, j, k]));
            }
        }
    });
}

/// Exact measure of the union of `boxes`.
pub fn union_measure(boxes: &[Box3]) -> Measure {
    union_measure_with(boxes, DepthMethod::default())
}

pub fn union_measure_with(boxes: &[Box3], method: DepthMethod) -> Measure {
    let Some(first) = boxes.first() else {
        return 0;
    };
    let hull = boxes.iter().fold(*first, |h, b| h.hull(b));
    let mut total = 0;
    scan_region(&hull, &[boxes], method, |d, v| {
        if d[0] > 0 {
            total += v;
        }
    });
    total
}

/// Measure of `region` at each depth of `Σ_j χ_{generator_j}`.
pub fn depth_histogram(region: &Box3, generators: &[Box3]) -> DepthHistogram {
    depth_histogram_with(region, generators, DepthMethod::default())
}

pub fn depth_histogram_with(region: &Box3, generators: &[Box3], method: DepthMethod) -> DepthHistogram {
    let mut h = DepthHistogram::new(Vec::new(), region.volume());
    scan_region(region, &[generators], method, |d, v| h.add(d[0] as usize, v));
    h
}

/// Measure of `region` at each pair `(depth over class1, depth over class2)`.
pub fn joint_depth_histogram(region: &Box3, class1: &[Box3], class2: &[Box3]) -> JointDepthHistogram {
    joint_depth_histogram_with(region, class1, class2, DepthMethod::default())
}

pub fn joint_depth_histogram_with(
    region: &Box3,
    class1: &[Box3],
    class2: &[Box3],
    method: DepthMethod,
) -> JointDepthHistogram {
    let mut h = JointDepthHistogram::new(region.volume());
    scan_region(region, &[class1, class2], method, |d, v| {
        h.add(d[0] as usize, d[1] as usize, v)
    });
    h
}

/// `Σ_j χ_{box_j}` on every cell of the compressed grid of `boxes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthField {
    grid: Grid3,
    depth: Vec<u32>,
}

impl DepthField {
    /// Depth of `boxes` over the grid compressed from `boxes` alone.
    pub fn build(boxes: &[Box3]) -> Result<DepthField> {
        let grid = Grid3::compress(boxes)?;
        Ok(Self::on_grid(grid, boxes))
    }

    /// Depth over a caller-supplied grid. Boxes must have their endpoints on the grid
    /// or lie entirely outside it; anything else is clipped to the hull first.
    pub fn on_grid(grid: Grid3, boxes: &[Box3]) -> DepthField {
        let hull = grid.hull();
        let indexed: Vec<IndexBox> = boxes
            .iter()
            .filter_map(|b| b.intersect(&hull))
            .map(|b| grid.locate(&b).expect("box endpoints must be grid breakpoints"))
            .collect();
        let [nx, ny, _] = grid.shape();
        let mut depth = vec![0u32; grid.cell_count()];
        sweep_layers(&grid, &[indexed], DepthMethod::default(), |k, d| {
            depth[k * nx * ny..(k + 1) * nx * ny].copy_from_slice(&d[0]);
        });
        DepthField { grid, depth }
    }

    pub fn grid(&self) -> &Grid3 {
        &self.grid
    }

    pub fn depths(&self) -> &[u32] {
        &self.depth
    }

    pub fn depth_at(&self, cell: [usize; 3]) -> u32 {
        self.depth[self.grid.linear_index(cell)]
    }

    /// Histogram over the whole grid hull.
    pub fn histogram(&self) -> DepthHistogram {
        let mut h = DepthHistogram::new(Vec::new(), self.grid.volume());
        for (n, &d) in self.depth.iter().enumerate() {
            h.add(d as usize, self.grid.cell_volume(self.grid.cell_of(n)));
        }
        h
    }

    /// Cells whose depth differs from a direct count of boxes containing them.
    pub fn mismatches(&self, boxes: &[Box3]) -> Vec<[usize; 3]> {
        (0..self.depth.len())
            .map(|n| self.grid.cell_of(n))
            .filter(|&cell| {
                let c = self.grid.cell_box(cell);
                let count = boxes.iter().filter(|b| b.contains(&c)).count() as u32;
                count != self.depth_at(cell)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(lo: i64, hi: i64) -> Box3 {
        Box3::cube(lo, hi).unwrap()
    }

    #[test]
    fn union_of_nothing_is_zero() {
        assert_eq!(union_measure(&[]), 0);
    }

    #[test]
    fn union_of_two_cubes() {
        let boxes = [cube(0, 2), cube(1, 3)];
        assert_eq!(union_measure(&boxes), 15);
        assert_eq!(union_measure_with(&boxes, DepthMethod::PlaneSweep), 15);
    }

    #[test]
    fn histogram_of_two_cubes_in_region() {
        let h = depth_histogram(&cube(0, 3), &[cube(0, 2), cube(1, 3)]);
        assert_eq!(h.measures(), &[12, 14, 1]);
        assert_eq!(h.total(), 27);
        assert_eq!(h.reference(), 27);
    }

    #[test]
    fn disjoint_region_is_all_depth_zero() {
        let h = depth_histogram(&cube(10, 12), &[cube(0, 2), cube(1, 3)]);
        assert_eq!(h.measures(), &[8]);
    }

    #[test]
    fn face_contact_adds_no_depth() {
        let h = depth_histogram(&cube(0, 1), &[cube(1, 2)]);
        assert_eq!(h.measures(), &[1]);
    }

    #[test]
    fn joint_with_empty_second_class_collapses() {
        let region = cube(0, 3);
        let gens = [cube(0, 2), cube(1, 3)];
        let joint = joint_depth_histogram(&region, &gens, &[]);
        let single = depth_histogram(&region, &gens);
        for (k, m) in single.entries() {
            assert_eq!(joint.get(k, 0), m);
        }
        assert_eq!(joint.first_marginal(), single);
        assert_eq!(
            joint.to_csv(),
            "r,s,measure\n0,0,12\n1,0,14\n2,0,1\n"
        );
    }

    #[test]
    fn depth_field_matches_direct_count() {
        let boxes = [cube(0, 2), cube(1, 3), Box3::from_bounds([0, 3], [1, 2], [0, 1]).unwrap()];
        let field = DepthField::build(&boxes).unwrap();
        assert!(field.mismatches(&boxes).is_empty());
        assert_eq!(field.histogram().total(), 27);
    }
}
