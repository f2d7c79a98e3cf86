use crate::error::{Error, Result};
use crate::geometry::{Axis, Box3, Interval, Measure};

/// Coordinate-compressed grid: per axis, the sorted distinct endpoints of a box set.
///
/// Cell `(i, j, k)` is `[xs[i], xs[i+1]] × [ys[j], ys[j+1]] × [zs[k], zs[k+1]]`.
/// Linear cell indices run x-fastest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid3 {
    axes: [Vec<i64>; 3],
}

/// A box expressed as half-open cell-index ranges of a [`Grid3`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexBox {
    pub lo: [usize; 3],
    pub hi: [usize; 3],
}

impl Grid3 {
    /// Grid whose breakpoints are exactly the distinct endpoints of `boxes`.
    pub fn compress(boxes: &[Box3]) -> Result<Grid3> {
        if boxes.is_empty() {
            return Err(Error::EmptyInput);
        }
        let axes = Axis::ALL.map(|axis| {
            let mut v: Vec<i64> = boxes
                .iter()
                .flat_map(|b| {
                    let i = b.axis(axis);
                    [i.lo(), i.hi()]
                })
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        });
        Ok(Grid3 { axes })
    }

    pub fn from_breakpoints(xs: Vec<i64>, ys: Vec<i64>, zs: Vec<i64>) -> Result<Grid3> {
        for v in [&xs, &ys, &zs] {
            if v.len() < 2 {
                return Err(Error::EmptyInput);
            }
            if let Some(w) = v.windows(2).find(|w| w[0] >= w[1]) {
                return Err(Error::InvalidInterval { lo: w[0], hi: w[1] });
            }
        }
        Ok(Grid3 { axes: [xs, ys, zs] })
    }

    pub fn breakpoints(&self, axis: Axis) -> &[i64] {
        &self.axes[axis.index()]
    }

    pub fn cells(&self, axis: Axis) -> usize {
        self.axes[axis.index()].len() - 1
    }

    pub fn shape(&self) -> [usize; 3] {
        Axis::ALL.map(|a| self.cells(a))
    }

    pub fn cell_count(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn cell_len(&self, axis: Axis, i: usize) -> i64 {
        let v = &self.axes[axis.index()];
        v[i + 1] - v[i]
    }

    pub fn cell_volume(&self, [i, j, k]: [usize; 3]) -> Measure {
        self.cell_len(Axis::X, i) as Measure
            * self.cell_len(Axis::Y, j) as Measure
            * self.cell_len(Axis::Z, k) as Measure
    }

    pub fn linear_index(&self, [i, j, k]: [usize; 3]) -> usize {
        let [nx, ny, _] = self.shape();
        (k * ny + j) * nx + i
    }

    pub fn cell_of(&self, linear: usize) -> [usize; 3] {
        let [nx, ny, _] = self.shape();
        [linear % nx, (linear / nx) % ny, linear / (nx * ny)]
    }

    pub fn cell_box(&self, [i, j, k]: [usize; 3]) -> Box3 {
        let iv = |axis: Axis, n: usize| {
            let v = &self.axes[axis.index()];
            Interval::new(v[n], v[n + 1]).expect("breakpoints strictly increase")
        };
        Box3::new(iv(Axis::X, i), iv(Axis::Y, j), iv(Axis::Z, k))
    }

    pub fn hull(&self) -> Box3 {
        let iv = |axis: Axis| {
            let v = &self.axes[axis.index()];
            Interval::new(v[0], v[v.len() - 1]).expect("breakpoints strictly increase")
        };
        Box3::new(iv(Axis::X), iv(Axis::Y), iv(Axis::Z))
    }

    pub fn volume(&self) -> Measure {
        self.hull().volume()
    }

    /// Index of a breakpoint value on `axis`.
    pub fn position(&self, axis: Axis, value: i64) -> Option<usize> {
        self.axes[axis.index()].binary_search(&value).ok()
    }

    /// Cell ranges of a box whose endpoints are all breakpoints of this grid.
    pub fn locate(&self, b: &Box3) -> Option<IndexBox> {
        let mut lo = [0; 3];
        let mut hi = [0; 3];
        for axis in Axis::ALL {
            let iv = b.axis(axis);
            lo[axis.index()] = self.position(axis, iv.lo())?;
            hi[axis.index()] = self.position(axis, iv.hi())?;
        }
        Some(IndexBox { lo, hi })
    }
}

impl IndexBox {
    pub fn contains_cell(&self, cell: [usize; 3]) -> bool {
        (0..3).all(|a| self.lo[a] <= cell[a] && cell[a] < self.hi[a])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cube() {
        let g = Grid3::compress(&[Box3::cube(0, 2).unwrap()]).unwrap();
        for axis in Axis::ALL {
            assert_eq!(g.breakpoints(axis), &[0, 2]);
        }
        assert_eq!(g.cell_count(), 1);
    }

    #[test]
    fn two_overlapping_cubes() {
        let g = Grid3::compress(&[Box3::cube(0, 2).unwrap(), Box3::cube(1, 3).unwrap()]).unwrap();
        for axis in Axis::ALL {
            assert_eq!(g.breakpoints(axis), &[0, 1, 2, 3]);
        }
        assert_eq!(g.cell_count(), 27);
    }

    #[test]
    fn empty_input_rejected() {
        assert!(matches!(Grid3::compress(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn linear_index_round_trips() {
        let g = Grid3::from_breakpoints(vec![0, 1, 2], vec![0, 1, 2, 3], vec![0, 5]).unwrap();
        for n in 0..g.cell_count() {
            assert_eq!(g.linear_index(g.cell_of(n)), n);
        }
    }

    #[test]
    fn breakpoints_must_increase() {
        assert!(Grid3::from_breakpoints(vec![0, 0], vec![0, 1], vec![0, 1]).is_err());
        assert!(Grid3::from_breakpoints(vec![0], vec![0, 1], vec![0, 1]).is_err());
    }
}
