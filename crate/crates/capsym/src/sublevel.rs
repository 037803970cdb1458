//! Batched sublevel-set quadrature: volumes `|{u < t}|` and integrals
//! `int_{u<t} w dx` for many thresholds in one grid sweep.
//!
//! Per cell only the thresholds crossing the cell's value range trigger
//! simplex clipping; thresholds above the range receive the precomputed
//! full-cell contribution through a suffix accumulator. Cells are
//! processed in parallel by grid slab with a fixed merge order, so the
//! result does not depend on the thread count.

use crate::error::{input_err, Error, Result};
use crate::geometry::clip;
use crate::grid::ScalarField;
use rayon::prelude::*;

/// `|{u < t}|` for every threshold (ascending).
pub fn sublevel_volumes(u: &ScalarField, thresholds: &[f64]) -> Result<Vec<f64>> {
    sweep(u, thresholds, None)
}

/// `int over {u < t} of w dx` for every threshold (ascending).
pub fn sublevel_integrals(u: &ScalarField, thresholds: &[f64], w: &ScalarField) -> Result<Vec<f64>> {
    if w.grid() != u.grid() {
        return input_err("weight field lives on a different grid");
    }
    sweep(u, thresholds, Some(w))
}

fn sweep(u: &ScalarField, thresholds: &[f64], w: Option<&ScalarField>) -> Result<Vec<f64>> {
    if thresholds.is_empty() {
        return Ok(Vec::new());
    }
    if thresholds.windows(2).any(|p| p[0] > p[1]) {
        return input_err("thresholds must be ascending");
    }
    let t_max = *thresholds.last().unwrap();
    if u.min_on_outer_faces() < t_max {
        return Err(Error::Truncation(format!(
            "sublevel set at threshold {t_max} touches an outer grid face"
        )));
    }
    let grid = u.grid();
    let slabs = grid.nodes_along(grid.dim() - 1) - 1;
    let parts: Vec<(Vec<f64>, Vec<f64>)> = (0..slabs)
        .into_par_iter()
        .map(|slab| match grid.dim() {
            2 => sweep_slab_2d(u, thresholds, w, slab),
            _ => sweep_slab_3d(u, thresholds, w, slab),
        })
        .collect();
    let m = thresholds.len();
    let mut exact = vec![0.0; m];
    let mut full_from = vec![0.0; m + 1];
    for (e, f) in parts {
        for j in 0..m {
            exact[j] += e[j];
            full_from[j] += f[j];
        }
        full_from[m] += f[m];
    }
    let mut acc = 0.0;
    let mut out = vec![0.0; m];
    for j in 0..m {
        acc += full_from[j];
        out[j] = exact[j] + acc;
    }
    Ok(out)
}

fn sweep_slab_2d(
    u: &ScalarField,
    thresholds: &[f64],
    w: Option<&ScalarField>,
    iy: usize,
) -> (Vec<f64>, Vec<f64>) {
    let grid = u.grid();
    let vals = u.values();
    let h = grid.spacing();
    let cell = h * h;
    let nx = grid.nodes_along(0);
    let m = thresholds.len();
    let mut exact = vec![0.0; m];
    let mut full_from = vec![0.0; m + 1];
    for ix in 0..nx - 1 {
        let base = iy * nx + ix;
        let cv = [vals[base], vals[base + 1], vals[base + nx], vals[base + nx + 1]];
        let cmin = cv.iter().cloned().fold(f64::INFINITY, f64::min);
        let cmax = cv.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let j0 = thresholds.partition_point(|&t| t <= cmin);
        let j1 = thresholds.partition_point(|&t| t <= cmax);
        if j1 < m {
            // full-cell contribution for every threshold above the range
            let full = match w {
                None => cell,
                Some(wf) => {
                    let wv = wf.values();
                    let wc = [wv[base], wv[base + 1], wv[base + nx], wv[base + nx + 1]];
                    // integral of the Kuhn interpolant over both triangles
                    cell * ((wc[0] + wc[1] + wc[3]) + (wc[0] + wc[2] + wc[3])) / 6.0
                }
            };
            full_from[j1] += full;
        }
        for (j, &t) in thresholds.iter().enumerate().take(j1).skip(j0) {
            let sv = [cv[0] - t, cv[1] - t, cv[2] - t, cv[3] - t];
            let mut contrib = 0.0;
            for (tri, coords) in super::geometry::TRIS_2D.iter().zip(&super::geometry::TRI_COORDS) {
                let v = [sv[tri[0]], sv[tri[1]], sv[tri[2]]];
                let c = clip::clip_tri(coords, &v);
                if c.area == 0.0 {
                    continue;
                }
                let weight = match w {
                    None => 1.0,
                    Some(wf) => {
                        let wv = wf.values();
                        let wc =
                            [wv[base], wv[base + 1], wv[base + nx], wv[base + nx + 1]];
                        let wt = [wc[tri[0]], wc[tri[1]], wc[tri[2]]];
                        kuhn_interp_2d(coords, &wt, c.centroid)
                    }
                };
                contrib += c.area * weight;
            }
            exact[j] += contrib * cell;
        }
    }
    (exact, full_from)
}

fn sweep_slab_3d(
    u: &ScalarField,
    thresholds: &[f64],
    w: Option<&ScalarField>,
    iz: usize,
) -> (Vec<f64>, Vec<f64>) {
    let grid = u.grid();
    let vals = u.values();
    let h = grid.spacing();
    let cell = h * h * h;
    let nx = grid.nodes_along(0);
    let ny = grid.nodes_along(1);
    let m = thresholds.len();
    let mut exact = vec![0.0; m];
    let mut full_from = vec![0.0; m + 1];
    let tets = super::geometry::kuhn_tets();
    for iy in 0..ny - 1 {
        for ix in 0..nx - 1 {
            let base = (iz * ny + iy) * nx + ix;
            let ids = [
                base,
                base + 1,
                base + nx,
                base + nx + 1,
                base + nx * ny,
                base + nx * ny + 1,
                base + nx * ny + nx,
                base + nx * ny + nx + 1,
            ];
            let mut cv = [0.0; 8];
            for (c, &id) in cv.iter_mut().zip(&ids) {
                *c = vals[id];
            }
            let cmin = cv.iter().cloned().fold(f64::INFINITY, f64::min);
            let cmax = cv.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let j0 = thresholds.partition_point(|&t| t <= cmin);
            let j1 = thresholds.partition_point(|&t| t <= cmax);
            if j1 < m {
                let full = match w {
                    None => cell,
                    Some(wf) => {
                        let wv = wf.values();
                        let mut s = 0.0;
                        for (corners, _, _) in tets.iter() {
                            s += wv[ids[corners[0]]]
                                + wv[ids[corners[1]]]
                                + wv[ids[corners[2]]]
                                + wv[ids[corners[3]]];
                        }
                        cell * s / 24.0
                    }
                };
                full_from[j1] += full;
            }
            for (j, &t) in thresholds.iter().enumerate().take(j1).skip(j0) {
                let mut contrib = 0.0;
                for (corners, coords, _) in tets.iter() {
                    let v = [
                        cv[corners[0]] - t,
                        cv[corners[1]] - t,
                        cv[corners[2]] - t,
                        cv[corners[3]] - t,
                    ];
                    let c = clip::clip_tet(coords, &v);
                    if c.volume == 0.0 {
                        continue;
                    }
                    let weight = match w {
                        None => 1.0,
                        Some(wf) => {
                            let wv = wf.values();
                            let wt = [
                                wv[ids[corners[0]]],
                                wv[ids[corners[1]]],
                                wv[ids[corners[2]]],
                                wv[ids[corners[3]]],
                            ];
                            kuhn_interp_3d(coords, &wt, c.centroid)
                        }
                    };
                    contrib += c.volume * weight;
                }
                exact[j] += contrib * cell;
            }
        }
    }
    (exact, full_from)
}

/// Linear interpolation on a Kuhn triangle given its local coordinates.
fn kuhn_interp_2d(coords: &[[f64; 2]; 3], v: &[f64; 3], p: [f64; 2]) -> f64 {
    // path either (x then y) or (y then x); successive differences
    if coords[1][0] == 1.0 {
        v[0] + (v[1] - v[0]) * p[0] + (v[2] - v[1]) * p[1]
    } else {
        v[0] + (v[1] - v[0]) * p[1] + (v[2] - v[1]) * p[0]
    }
}

fn kuhn_interp_3d(coords: &[[f64; 3]; 4], v: &[f64; 4], p: [f64; 3]) -> f64 {
    // identify the axis permutation from the vertex path
    let mut val = v[0];
    for k in 0..3 {
        let axis = (0..3)
            .find(|&a| coords[k + 1][a] != coords[k][a])
            .expect("degenerate Kuhn tet");
        val += (v[k + 1] - v[k]) * p[axis];
    }
    val
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::ConeSpec;
    use crate::grid::GridSpec;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn volumes_match_single_region_measures() {
        let grid = GridSpec::new(ConeSpec::half_space(2).unwrap(), 1.5, 1.0 / 64.0).unwrap();
        let u = ScalarField::from_fn(grid, |x| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            (r * r - 1.0).min(0.0) / 2.0
        })
        .unwrap();
        let ts = [-0.375, -0.155, -0.02];
        let vols = sublevel_volumes(&u, &ts).unwrap();
        // {u < t} is the half disk of radius sqrt(1 + 2t)
        for (v, t) in vols.iter().zip(&ts) {
            let r2: f64 = 1.0 + 2.0 * t;
            let expect = 0.5 * PI * r2;
            assert!((v - expect).abs() < 3e-3 * expect, "{v} vs {expect} at t={t}");
        }
        assert!(vols.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn integrals_reduce_to_volumes_for_unit_weight() {
        let grid = GridSpec::new(ConeSpec::half_space(2).unwrap(), 1.0, 1.0 / 32.0).unwrap();
        let u = ScalarField::from_fn(grid, |x| {
            ((x[0] * x[0] + x[1] * x[1]).sqrt() - 0.7).min(0.0)
        })
        .unwrap();
        let one = ScalarField::constant(grid, 1.0).unwrap();
        let ts = [-0.5, -0.3, -0.1, -0.01];
        let vols = sublevel_volumes(&u, &ts).unwrap();
        let ints = sublevel_integrals(&u, &ts, &one).unwrap();
        for (a, b) in vols.iter().zip(&ints) {
            assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }

    #[test]
    fn weighted_integral_against_polar_quadrature() {
        // int over half disk r<R of x0^2: pi R^4 / 8
        let grid = GridSpec::new(ConeSpec::half_space(2).unwrap(), 1.5, 1.0 / 64.0).unwrap();
        let u = ScalarField::from_fn(grid, |x| (x[0] * x[0] + x[1] * x[1]).sqrt() - 1.0).unwrap();
        let w = ScalarField::from_fn(grid, |x| x[0] * x[0]).unwrap();
        let ints = sublevel_integrals(&u, &[0.0], &w).unwrap();
        let expect = PI / 8.0;
        assert!((ints[0] - expect).abs() < 5e-3 * expect, "{} vs {expect}", ints[0]);
    }

    #[test]
    fn volumes_3d_half_ball() {
        let grid = GridSpec::new(ConeSpec::half_space(3).unwrap(), 1.25, 1.0 / 16.0).unwrap();
        let u = ScalarField::from_fn(grid, |x| {
            (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt() - 1.0
        })
        .unwrap();
        let vols = sublevel_volumes(&u, &[-0.5, 0.0]).unwrap();
        let expect0 = 2.0 * PI / 3.0 * 0.5_f64.powi(3);
        let expect1 = 2.0 * PI / 3.0;
        assert!((vols[0] - expect0).abs() < 0.02 * expect0, "{} vs {expect0}", vols[0]);
        assert!((vols[1] - expect1).abs() < 0.005 * expect1, "{} vs {expect1}", vols[1]);
    }

    #[test]
    fn truncation_flagged_when_support_reaches_faces() {
        let grid = GridSpec::new(ConeSpec::half_space(2).unwrap(), 1.0, 0.25).unwrap();
        let u = ScalarField::from_fn(grid, |x| x[0] - 10.0).unwrap();
        assert!(matches!(
            sublevel_volumes(&u, &[0.0]),
            Err(Error::Truncation(_))
        ));
    }
}
