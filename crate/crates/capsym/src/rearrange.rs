//! Distribution functions, the increasing rearrangement, and convex /
//! capillary symmetrization of non-positive fields.
//!
//! The rearrangement is the left-continuous generalized inverse of the
//! distribution function `mu(t) = |{u < t}|`; plateaus of `mu` collapse
//! to their lower end. Composing it with `kappa * dual(x)^n` produces the
//! symmetrized field whose sublevel sets are Wulff sectors.

use crate::cone::ConeKind;
use crate::error::{input_err, Result};
use crate::gauge::{wulff_sector_volume, GaugeSpec, VolumeMethod};
use crate::grid::ScalarField;
use crate::sublevel::sublevel_volumes;

/// Default number of thresholds when sampling a distribution function.
pub const DEFAULT_LEVELS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    /// Step function, left-continuous: value `v_i` on `(a_{i-1}, a_i]`.
    LeftConstant,
    /// Piecewise linear through the breakpoints.
    Linear,
}

/// A one-dimensional non-decreasing function stored as breakpoints.
///
/// Evaluation clamps to the first value below the first argument; above
/// the last argument it returns the `tail` value when one is set (the
/// generalized inverse continues as 0 past the total measure) and the
/// last value otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneProfile {
    points: Vec<(f64, f64)>,
    interpolation: Interpolation,
    tail: Option<f64>,
}

impl MonotoneProfile {
    pub fn new(points: Vec<(f64, f64)>, interpolation: Interpolation) -> Result<Self> {
        Self::with_tail(points, interpolation, None)
    }

    pub fn with_tail(
        points: Vec<(f64, f64)>,
        interpolation: Interpolation,
        tail: Option<f64>,
    ) -> Result<Self> {
        if points.is_empty() {
            return input_err("profile needs at least one breakpoint");
        }
        if points.iter().any(|(a, v)| !a.is_finite() || !v.is_finite()) {
            return input_err("profile breakpoints must be finite");
        }
        for w in points.windows(2) {
            if w[0].0 >= w[1].0 {
                return input_err(format!(
                    "profile arguments must increase strictly; {} then {}",
                    w[0].0, w[1].0
                ));
            }
            if w[0].1 > w[1].1 {
                return input_err(format!(
                    "profile values must not decrease; {} then {}",
                    w[0].1, w[1].1
                ));
            }
        }
        Ok(MonotoneProfile {
            points,
            interpolation,
            tail,
        })
    }

    /// Monotonizes noisy values with a running maximum before
    /// construction; for diagnostic profiles measured from grids.
    pub fn from_noisy(mut points: Vec<(f64, f64)>, interpolation: Interpolation) -> Result<Self> {
        let mut running = f64::NEG_INFINITY;
        for p in points.iter_mut() {
            running = running.max(p.1);
            p.1 = running;
        }
        Self::new(points, interpolation)
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn interpolation(&self) -> Interpolation {
        self.interpolation
    }

    pub fn tail(&self) -> Option<f64> {
        self.tail
    }

    pub fn first_arg(&self) -> f64 {
        self.points[0].0
    }

    pub fn last_arg(&self) -> f64 {
        self.points[self.points.len() - 1].0
    }

    pub fn last_value(&self) -> f64 {
        self.points[self.points.len() - 1].1
    }

    pub fn eval(&self, s: f64) -> f64 {
        let pts = &self.points;
        if s <= pts[0].0 {
            return pts[0].1;
        }
        let last = pts.len() - 1;
        if s > pts[last].0 {
            return self.tail.unwrap_or(pts[last].1);
        }
        // first index with argument >= s; i >= 1 here
        let i = pts.partition_point(|p| p.0 < s);
        match self.interpolation {
            Interpolation::LeftConstant => pts[i].1,
            Interpolation::Linear => {
                let (a0, v0) = pts[i - 1];
                let (a1, v1) = pts[i];
                v0 + (v1 - v0) * (s - a0) / (a1 - a0)
            }
        }
    }

    /// Exact integral of the interpolated profile over `[a, b]`,
    /// extensions included.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let pts = &self.points;
        let mut total = 0.0;
        let mut add_piece = |lo: f64, hi: f64, linear: bool| {
            let lo = lo.max(a);
            let hi = hi.min(b);
            if hi <= lo {
                return;
            }
            if linear {
                total += 0.5 * (self.eval(lo) + self.eval(hi)) * (hi - lo);
            } else {
                total += self.eval(0.5 * (lo + hi)) * (hi - lo);
            }
        };
        add_piece(f64::NEG_INFINITY, pts[0].0, false);
        let linear = self.interpolation == Interpolation::Linear;
        for w in pts.windows(2) {
            add_piece(w[0].0, w[1].0, linear);
        }
        add_piece(pts[pts.len() - 1].0, f64::INFINITY, false);
        total
    }
}

/// Distribution function `mu(t) = |{u < t}|` sampled at `levels`
/// thresholds spanning `[min u, 0]`.
pub fn distribution_function(u: &ScalarField, levels: usize) -> Result<MonotoneProfile> {
    if levels < 2 {
        return input_err("need at least 2 levels");
    }
    ensure_nonpositive(u)?;
    let umin = u.min_value();
    if umin >= 0.0 {
        // identically zero field
        return MonotoneProfile::new(vec![(-1.0, 0.0), (0.0, 0.0)], Interpolation::Linear);
    }
    let thresholds: Vec<f64> = (0..levels)
        .map(|k| umin + (0.0 - umin) * k as f64 / (levels - 1) as f64)
        .collect();
    let vols = sublevel_volumes(u, &thresholds)?;
    let points: Vec<(f64, f64)> = thresholds.into_iter().zip(vols).collect();
    MonotoneProfile::new(points, Interpolation::Linear)
}

/// Increasing rearrangement: the left-continuous generalized inverse
/// `u_*(s) = sup { t <= 0 : mu(t) < s }`.
pub fn increasing_rearrangement(mu: &MonotoneProfile) -> Result<MonotoneProfile> {
    let pts = mu.points();
    let scale = pts[pts.len() - 1].1.abs().max(1.0);
    if pts[0].1.abs() > 1e-12 * scale {
        return input_err(format!(
            "distribution must vanish at its lowest threshold, starts at {}",
            pts[0].1
        ));
    }
    let top = pts[pts.len() - 1].0;
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    match mu.interpolation() {
        Interpolation::Linear => {
            // the leading zero plateau keeps its last point: the inverse
            // jumps there as s leaves 0
            let first_val = pts[0].1;
            let mut i0 = 0;
            while i0 + 1 < pts.len() && pts[i0 + 1].1 == first_val {
                i0 += 1;
            }
            out.push((pts[i0].1, pts[i0].0));
            for &(t, m) in &pts[i0 + 1..] {
                // later plateaus keep their first point: left-continuity
                if m > out[out.len() - 1].0 {
                    out.push((m, t));
                }
            }
        }
        Interpolation::LeftConstant => {
            for i in 1..pts.len() {
                if pts[i].1 > pts[i - 1].1 {
                    out.push((pts[i].1, pts[i - 1].0));
                }
            }
            if out.is_empty() {
                out.push((pts[pts.len() - 1].1, top));
            }
        }
    }
    MonotoneProfile::with_tail(out, mu.interpolation(), Some(top))
}

/// Increasing rearrangement of a source field: shorthand for inverting
/// its distribution function.
pub fn rearranged_source(f: &ScalarField, levels: usize) -> Result<MonotoneProfile> {
    increasing_rearrangement(&distribution_function(f, levels)?)
}

/// Exact rearrangement of a constant source `c <= 0` on a domain of the
/// given volume: the step profile equal to `c` on `(0, volume]`.
pub fn rearranged_constant_source(c: f64, volume: f64) -> Result<MonotoneProfile> {
    if c > 0.0 {
        return input_err("source must be non-positive");
    }
    if !(volume > 0.0) {
        return input_err("domain volume must be positive");
    }
    MonotoneProfile::with_tail(vec![(volume, c)], Interpolation::LeftConstant, Some(0.0))
}

/// Convex symmetrization in the grid's cone: the equimeasurable field
/// `u_*(kappa * dual(x)^n)` whose sublevel sets are Wulff sectors.
pub fn convex_symmetrize(
    u: &ScalarField,
    gauge: &GaugeSpec,
    levels: usize,
) -> Result<ScalarField> {
    let grid = *u.grid();
    if gauge.dim() != grid.dim() {
        return input_err(format!(
            "gauge dimension {} differs from grid dimension {}",
            gauge.dim(),
            grid.dim()
        ));
    }
    ensure_nonpositive(u)?;
    let mu = distribution_function(u, levels)?;
    let ustar = increasing_rearrangement(&mu)?;
    let kappa = wulff_sector_volume(gauge, &grid.cone(), VolumeMethod::Analytic)?.kappa;
    let n = grid.dim() as i32;
    let mut values = vec![0.0; grid.node_count()];
    let mut x = [0.0; 3];
    for (flat, v) in values.iter_mut().enumerate() {
        grid.node_coords(flat, &mut x[..grid.dim()]);
        let s = kappa * gauge.dual_unchecked(&x[..grid.dim()]).powi(n);
        *v = ustar.eval(s).min(0.0);
    }
    ScalarField::new(grid, values)
}

/// Capillary Schwarz symmetrization in the half-space: convex
/// symmetrization with the capillary gauge of angle `theta`.
pub fn capillary_symmetrize(u: &ScalarField, theta: f64, levels: usize) -> Result<ScalarField> {
    let grid = u.grid();
    if grid.cone().kind != ConeKind::HalfSpace {
        return input_err("capillary symmetrization requires a half-space grid");
    }
    let gauge = GaugeSpec::capillary(theta, grid.dim())?;
    convex_symmetrize(u, &gauge, levels)
}

fn ensure_nonpositive(u: &ScalarField) -> Result<()> {
    let max = u.max_value();
    if max > 0.0 {
        return input_err(format!(
            "field has positive values (max {max}); rearrangement is defined \
             for non-positive functions"
        ));
    }
    if u.min_on_outer_faces() < 0.0 {
        return input_err("field support reaches the outer grid faces");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::ConeSpec;
    use crate::grid::GridSpec;

    const PI: f64 = std::f64::consts::PI;

    fn grid2(h: f64, l: f64) -> GridSpec {
        GridSpec::new(ConeSpec::half_space(2).unwrap(), l, h).unwrap()
    }

    #[test]
    fn profile_construction_checks() {
        assert!(MonotoneProfile::new(vec![], Interpolation::Linear).is_err());
        assert!(
            MonotoneProfile::new(vec![(0.0, 0.0), (0.0, 1.0)], Interpolation::Linear).is_err()
        );
        assert!(
            MonotoneProfile::new(vec![(0.0, 1.0), (1.0, 0.0)], Interpolation::Linear).is_err()
        );
        let p = MonotoneProfile::from_noisy(
            vec![(0.0, 0.0), (1.0, 0.5), (2.0, 0.4), (3.0, 0.9)],
            Interpolation::Linear,
        )
        .unwrap();
        assert_eq!(p.eval(2.0), 0.5);
    }

    #[test]
    fn step_profile_eval_and_integral() {
        // value -2 on (0, 1], -1 on (1, 3], 0 beyond
        let f = MonotoneProfile::with_tail(
            vec![(1.0, -2.0), (3.0, -1.0)],
            Interpolation::LeftConstant,
            Some(0.0),
        )
        .unwrap();
        assert_eq!(f.eval(0.5), -2.0);
        assert_eq!(f.eval(1.0), -2.0);
        assert_eq!(f.eval(1.5), -1.0);
        assert_eq!(f.eval(3.0), -1.0);
        assert_eq!(f.eval(3.5), 0.0);
        assert!((f.integral(0.0, 3.0) - (-4.0)).abs() < 1e-14);
        assert!((f.integral(0.5, 2.0) - (-2.0)).abs() < 1e-14);
        assert!((f.integral(0.0, 10.0) - (-4.0)).abs() < 1e-14);
    }

    #[test]
    fn indicator_distribution_inverts_to_two_levels() {
        // exact distribution of -1 on a set of volume v
        let v = 0.37;
        let mu = MonotoneProfile::new(
            vec![(-1.0, 0.0), (0.0, v)],
            Interpolation::LeftConstant,
        )
        .unwrap();
        let us = increasing_rearrangement(&mu).unwrap();
        assert_eq!(us.eval(0.1), -1.0);
        assert_eq!(us.eval(v), -1.0);
        assert_eq!(us.eval(v + 1e-12), 0.0);
        assert_eq!(us.eval(2.0 * v), 0.0);
    }

    #[test]
    fn power_law_distribution_inverts_symbolically() {
        // mu(t) = kappa (t+1)^n for u = dual - 1 in the sector
        let n = 2.0;
        let kappa = 0.61;
        let levels = 512;
        let pts: Vec<(f64, f64)> = (0..levels)
            .map(|k| {
                let t = -1.0 + k as f64 / (levels - 1) as f64;
                (t, kappa * (t + 1.0).powf(n))
            })
            .collect();
        let mu = MonotoneProfile::new(pts, Interpolation::Linear).unwrap();
        let us = increasing_rearrangement(&mu).unwrap();
        for k in 1..40 {
            let s = kappa * k as f64 / 40.0;
            let expect = (s / kappa).powf(1.0 / n) - 1.0;
            assert!(
                (us.eval(s) - expect).abs() < 2e-3,
                "s={s}: {} vs {expect}",
                us.eval(s)
            );
        }
    }

    #[test]
    fn distribution_requires_nonpositive_values() {
        let g = grid2(0.25, 1.0);
        let u = ScalarField::from_fn(g, |x| x[0]).unwrap();
        assert!(distribution_function(&u, 8).is_err());
        let zero = ScalarField::constant(g, 0.0).unwrap();
        let mu = distribution_function(&zero, 8).unwrap();
        assert_eq!(mu.eval(-0.5), 0.0);
    }

    #[test]
    fn indicator_field_distribution() {
        let g = grid2(1.0 / 64.0, 1.5);
        let u = ScalarField::from_fn(g, |x| {
            if (x[0] * x[0] + x[1] * x[1]).sqrt() < 1.0 {
                -1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let mu = distribution_function(&u, 64).unwrap();
        // mu(-0.5) should be close to the half-disk area
        assert!((mu.eval(-0.5) - PI / 2.0).abs() < 0.05 * PI / 2.0);
    }

    #[test]
    fn constant_source_rearrangement() {
        let f = rearranged_constant_source(-2.0, 1.5).unwrap();
        assert_eq!(f.eval(0.7), -2.0);
        assert_eq!(f.eval(1.5), -2.0);
        assert_eq!(f.eval(1.6), 0.0);
        assert!((f.integral(0.0, 1.5) + 3.0).abs() < 1e-14);
    }

    #[test]
    fn two_valued_source_rearranges_by_sorting() {
        let g = grid2(1.0 / 64.0, 1.5);
        // f = -2 on r < 0.4, -1 on 0.4 <= r < 0.8, 0 outside
        let f = ScalarField::from_fn(g, |x| {
            let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
            if r < 0.4 {
                -2.0
            } else if r < 0.8 {
                -1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let fs = rearranged_source(&f, 128).unwrap();
        let v1 = 0.5 * PI * 0.4 * 0.4;
        let v2 = 0.5 * PI * 0.8 * 0.8;
        assert!((fs.eval(0.5 * v1) + 2.0).abs() < 0.05);
        assert!((fs.eval(0.6 * v2) + 1.0).abs() < 0.05);
        assert!(fs.eval(1.2 * v2).abs() < 0.05);
    }

    #[test]
    fn symmetrization_is_a_fixed_point_on_symmetric_input() {
        let theta = PI / 3.0;
        let gauge = GaugeSpec::capillary(theta, 2).unwrap();
        let g = grid2(1.0 / 96.0, 1.5);
        let u = ScalarField::from_fn(g, |x| {
            let d = gauge.dual_unchecked(x);
            ((d * d - 1.0) / 2.0).min(0.0)
        })
        .unwrap();
        let us = convex_symmetrize(&u, &gauge, 256).unwrap();
        let mut worst = 0.0f64;
        for (a, b) in u.values().iter().zip(us.values()) {
            worst = worst.max((a - b).abs());
        }
        assert!(worst < 0.02, "fixed point deviation {worst}");
    }

    #[test]
    fn capillary_right_angle_matches_euclidean_convex() {
        let g = grid2(1.0 / 64.0, 1.5);
        let u = ScalarField::from_fn(g, |x| {
            let dx = x[0] - 0.3;
            let r2 = dx * dx + x[1] * x[1];
            if r2 < 0.64 {
                r2 / 2.0 - 0.32
            } else {
                0.0
            }
        })
        .unwrap();
        let a = capillary_symmetrize(&u, PI / 2.0, 128).unwrap();
        let gauge = GaugeSpec::euclidean(2).unwrap();
        let b = convex_symmetrize(&u, &gauge, 128).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn indicator_symmetrizes_to_centered_sector() {
        // -1 on a wall-translated half disk becomes -1 on the centered one
        let g = grid2(1.0 / 96.0, 2.0);
        let u = ScalarField::from_fn(g, |x| {
            let dx = x[0] - 0.5;
            if (dx * dx + x[1] * x[1]).sqrt() < 0.7 {
                -1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let us = capillary_symmetrize(&u, PI / 2.0, 256).unwrap();
        // deep values should be -1 inside radius ~0.7, 0 well outside
        let grid = *us.grid();
        let probe = |x: [f64; 2]| {
            let i = ((x[0] + 2.0) / grid.spacing()).round() as usize;
            let j = (x[1] / grid.spacing()).round() as usize;
            us.values()[grid.index(&[i, j])]
        };
        assert!((probe([0.0, 0.3]) + 1.0).abs() < 0.05);
        assert!((probe([0.55, 0.3]) + 1.0).abs() < 0.05);
        assert!(probe([0.9, 0.3]).abs() < 0.05);
    }

    #[test]
    fn equimeasurability_and_norms() {
        let theta = 2.0 * PI / 3.0;
        let g = grid2(1.0 / 96.0, 1.5);
        let u = ScalarField::from_fn(g, |x| {
            let dx = x[0] - 0.2;
            let r2 = dx * dx + 1.4 * x[1] * x[1];
            let w: f64 = 1.0 - r2 / 0.81;
            if w > 0.0 {
                -w * w * (1.0 + 0.3 * (3.0 * x[0]).sin())
            } else {
                0.0
            }
        })
        .unwrap();
        let us = capillary_symmetrize(&u, theta, 256).unwrap();
        // equimeasurable
        let ts: Vec<f64> = (1..20).rev().map(|k| -1.2 * k as f64 / 20.0).collect();
        let mu_u = sublevel_volumes(&u, &ts).unwrap();
        let mu_s = sublevel_volumes(&us, &ts).unwrap();
        for ((a, b), t) in mu_u.iter().zip(&mu_s).zip(&ts) {
            if *a < 0.02 {
                continue;
            }
            assert!((a - b).abs() <= 0.01 * a, "t={t}: {a} vs {b}");
        }
        // sup and integral norms preserved
        let h2 = g.spacing() * g.spacing();
        let l1 = |f: &ScalarField| f.values().iter().map(|v| v.abs()).sum::<f64>() * h2;
        let l2 = |f: &ScalarField| {
            (f.values().iter().map(|v| v * v).sum::<f64>() * h2).sqrt()
        };
        assert!((u.linf_norm() - us.linf_norm()).abs() <= 0.01 * u.linf_norm());
        assert!((l1(&u) - l1(&us)).abs() <= 0.01 * l1(&u));
        assert!((l2(&u) - l2(&us)).abs() <= 0.01 * l2(&u));
    }

    #[test]
    fn symmetrization_is_idempotent_and_radial() {
        let theta = PI / 3.0;
        let gauge = GaugeSpec::capillary(theta, 2).unwrap();
        let g = grid2(1.0 / 96.0, 1.5);
        let u = ScalarField::from_fn(g, |x| {
            let dx = x[0] + 0.3;
            let r2 = dx * dx + x[1] * x[1];
            let w: f64 = 1.0 - r2 / 0.49;
            if w > 0.0 {
                -w * w
            } else {
                0.0
            }
        })
        .unwrap();
        let once = convex_symmetrize(&u, &gauge, 256).unwrap();
        let twice = convex_symmetrize(&once, &gauge, 256).unwrap();
        let mut worst = 0.0f64;
        for (a, b) in once.values().iter().zip(twice.values()) {
            worst = worst.max((a - b).abs());
        }
        assert!(worst <= 0.02 * once.linf_norm(), "idempotence gap {worst}");
        // value depends on x only through the dual gauge
        let grid = *once.grid();
        let mut x = [0.0; 2];
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        for flat in (0..grid.node_count()).step_by(97) {
            grid.node_coords(flat, &mut x);
            pairs.push((gauge.dual_unchecked(&x), once.values()[flat]));
        }
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        for w in pairs.windows(2) {
            if (w[0].0 - w[1].0).abs() < 1e-3 {
                assert!(
                    (w[0].1 - w[1].1).abs() < 0.02,
                    "radial structure broken at dual {}",
                    w[0].0
                );
            }
        }
    }

    #[test]
    fn hardy_littlewood_inequality() {
        use crate::sublevel::sublevel_integrals;
        let g = grid2(1.0 / 64.0, 1.5);
        let u = ScalarField::from_fn(g, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            let w: f64 = 1.0 - r2;
            if w > 0.0 {
                -w * w
            } else {
                0.0
            }
        })
        .unwrap();
        let f = ScalarField::from_fn(g, |x| {
            let dx = x[0] - 0.4;
            let r2 = dx * dx + x[1] * x[1];
            let w: f64 = 1.0 - r2 / 0.5;
            if w > 0.0 {
                -(0.5 + w)
            } else {
                0.0
            }
        })
        .unwrap();
        let fs = rearranged_source(&f, 256).unwrap();
        let mu = distribution_function(&u, 256).unwrap();
        let neg_f = ScalarField::new(g, f.values().iter().map(|v| -v).collect()).unwrap();
        let ts: Vec<f64> = (1..=20).rev().map(|k| -0.9 * k as f64 / 20.0).collect();
        let lhs = sublevel_integrals(&u, &ts, &neg_f).unwrap();
        for (l, t) in lhs.iter().zip(&ts) {
            let rhs = -fs.integral(0.0, mu.eval(*t));
            assert!(
                *l <= rhs * 1.01 + 1e-9,
                "t={t}: int {{u<t}} (-f) = {l} > {rhs}"
            );
        }
    }
}
