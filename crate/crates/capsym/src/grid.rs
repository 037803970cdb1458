//! Uniform node grids over a box in the cone, and fields sampled on them.
//!
//! Half-space grids cover `[-L, L]^(n-1) x [0, L]` with the wall at
//! `x_n = 0`; full-space grids cover `[-L, L]^n`. Values are stored
//! row-major with the last coordinate slowest, matching the field file
//! format.

use crate::cone::{ConeKind, ConeSpec};
use crate::error::{input_err, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    cone: ConeSpec,
    half_extent: f64,
    spacing: f64,
    steps: usize,
}

impl GridSpec {
    pub fn new(cone: ConeSpec, half_extent: f64, spacing: f64) -> Result<Self> {
        if !(cone.dim == 2 || cone.dim == 3) {
            return input_err(format!("grids support dim 2 or 3, got {}", cone.dim));
        }
        if !(half_extent > 0.0) || !(spacing > 0.0) {
            return input_err("half extent and spacing must be positive");
        }
        let ratio = half_extent / spacing;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-9 * ratio.max(1.0) || steps < 2.0 {
            return input_err(format!(
                "half extent {half_extent} must be an integer multiple (>= 2) of spacing {spacing}"
            ));
        }
        Ok(GridSpec {
            cone,
            half_extent,
            spacing,
            steps: steps as usize,
        })
    }

    pub fn cone(&self) -> ConeSpec {
        self.cone
    }

    pub fn dim(&self) -> usize {
        self.cone.dim
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Node count along `axis`.
    pub fn nodes_along(&self, axis: usize) -> usize {
        let last = self.cone.dim - 1;
        if axis == last && self.cone.kind == ConeKind::HalfSpace {
            self.steps + 1
        } else {
            2 * self.steps + 1
        }
    }

    /// Smallest coordinate along `axis`.
    pub fn axis_origin(&self, axis: usize) -> f64 {
        let last = self.cone.dim - 1;
        if axis == last && self.cone.kind == ConeKind::HalfSpace {
            0.0
        } else {
            -self.half_extent
        }
    }

    pub fn node_count(&self) -> usize {
        (0..self.cone.dim).map(|a| self.nodes_along(a)).product()
    }

    /// Flat index with the last coordinate slowest.
    pub fn index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for axis in (0..self.cone.dim).rev() {
            flat = flat * self.nodes_along(axis) + idx[axis];
        }
        flat
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.axis_origin(axis) + self.spacing * i as f64
    }

    /// Fill `out` with the coordinates of the node at flat index `flat`.
    pub fn node_coords(&self, mut flat: usize, out: &mut [f64]) {
        for axis in 0..self.cone.dim {
            let n = self.nodes_along(axis);
            out[axis] = self.coord(axis, flat % n);
            flat /= n;
        }
    }
}

/// A scalar sampled at every grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return input_err(format!(
                "grid has {} nodes but {} values were supplied",
                grid.node_count(),
                values.len()
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return input_err("field contains a non-finite value");
        }
        Ok(ScalarField { grid, values })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut values = vec![0.0; grid.node_count()];
        let mut x = [0.0; 3];
        for (flat, v) in values.iter_mut().enumerate() {
            grid.node_coords(flat, &mut x[..grid.dim()]);
            *v = f(&x[..grid.dim()]);
        }
        ScalarField::new(grid, values)
    }

    pub fn constant(grid: GridSpec, value: f64) -> Result<Self> {
        ScalarField::new(grid, vec![value; grid.node_count()])
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Minimum over the outer box faces; the wall face of a half-space
    /// grid does not count as outer.
    pub fn min_on_outer_faces(&self) -> f64 {
        let grid = &self.grid;
        let dim = grid.dim();
        let mut m = f64::INFINITY;
        let mut idx = [0usize; 3];
        let counts: Vec<usize> = (0..dim).map(|a| grid.nodes_along(a)).collect();
        let total = grid.node_count();
        for flat in 0..total {
            let mut rest = flat;
            for (axis, c) in counts.iter().enumerate() {
                idx[axis] = rest % c;
                rest /= c;
            }
            let mut outer = false;
            for axis in 0..dim {
                let last_axis = axis == dim - 1;
                let at_low = idx[axis] == 0;
                let at_high = idx[axis] == counts[axis] - 1;
                let low_is_wall = last_axis && grid.cone().kind == ConeKind::HalfSpace;
                if (at_low && !low_is_wall) || at_high {
                    outer = true;
                    break;
                }
            }
            if outer {
                m = m.min(self.values[flat]);
            }
        }
        m
    }
}

/// A region given as a strict sublevel set of a level function inside
/// the cone.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionSpec {
    field: ScalarField,
}

impl RegionSpec {
    /// Builds a region, rejecting level functions whose sublevel set
    /// touches the outer box faces.
    pub fn new(grid: GridSpec, phi: Vec<f64>) -> Result<Self> {
        let field = ScalarField::new(grid, phi)?;
        let edge = field.min_on_outer_faces();
        if edge < 0.0 {
            return Err(Error::Truncation(format!(
                "level function is negative ({edge}) on an outer box face; \
                 the region would be truncated"
            )));
        }
        Ok(RegionSpec { field })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let field = ScalarField::from_fn(grid, f)?;
        RegionSpec::new(grid, field.values().to_vec())
    }

    pub fn grid(&self) -> &GridSpec {
        self.field.grid()
    }

    pub fn phi(&self) -> &[f64] {
        self.field.values()
    }

    pub fn as_field(&self) -> &ScalarField {
        &self.field
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_grid() -> GridSpec {
        GridSpec::new(ConeSpec::half_space(2).unwrap(), 1.0, 0.25).unwrap()
    }

    #[test]
    fn grid_layout_half_space() {
        let g = half_grid();
        assert_eq!(g.nodes_along(0), 9);
        assert_eq!(g.nodes_along(1), 5);
        assert_eq!(g.node_count(), 45);
        assert_eq!(g.coord(0, 0), -1.0);
        assert_eq!(g.coord(1, 0), 0.0);
        assert_eq!(g.index(&[3, 2]), 2 * 9 + 3);
        let mut x = [0.0; 2];
        g.node_coords(2 * 9 + 3, &mut x);
        assert_eq!(x, [-0.25, 0.5]);
    }

    #[test]
    fn grid_rejects_non_integer_ratio() {
        assert!(GridSpec::new(ConeSpec::half_space(2).unwrap(), 1.0, 0.3).is_err());
        assert!(GridSpec::new(ConeSpec::half_space(2).unwrap(), -1.0, 0.25).is_err());
    }

    #[test]
    fn full_space_grid_layout() {
        let g = GridSpec::new(ConeSpec::full_space(2).unwrap(), 1.0, 0.5).unwrap();
        assert_eq!(g.nodes_along(1), 5);
        assert_eq!(g.coord(1, 0), -1.0);
    }

    #[test]
    fn region_rejects_truncated_level_sets() {
        let g = half_grid();
        // disk poking through the right face
        let r = RegionSpec::from_fn(g, |x| ((x[0] - 1.0) * (x[0] - 1.0) + x[1] * x[1]).sqrt() - 0.5);
        assert!(matches!(r, Err(Error::Truncation(_))));
        // well-contained disk is fine even though it touches the wall
        let r = RegionSpec::from_fn(g, |x| (x[0] * x[0] + x[1] * x[1]).sqrt() - 0.5);
        assert!(r.is_ok());
    }

    #[test]
    fn field_rejects_non_finite() {
        let g = half_grid();
        let mut vals = vec![0.0; g.node_count()];
        vals[3] = f64::NAN;
        assert!(ScalarField::new(g, vals).is_err());
    }

    #[test]
    fn outer_face_minimum_skips_the_wall() {
        let g = half_grid();
        // negative only on the wall (away from the corners): not outer
        let f =
            ScalarField::from_fn(g, |x| if x[1] == 0.0 && x[0].abs() < 0.9 { -1.0 } else { 0.0 })
                .unwrap();
        assert_eq!(f.min_on_outer_faces(), 0.0);
        let f = ScalarField::from_fn(g, |x| if x[1] >= 1.0 { -2.0 } else { 0.0 }).unwrap();
        assert_eq!(f.min_on_outer_faces(), -2.0);
    }
}
