//! Anisotropic Dirichlet energies, the Polya-Szego principle, and the
//! sharp Sobolev inequality with its explicit radial extremal.

use crate::error::{domain_err, input_err, Result};
use crate::gauge::{wulff_sector_volume, GaugeSpec, VolumeMethod};
use crate::grid::ScalarField;
use crate::quadrature::{adaptive_simpson, find_root, gauss_composite};
use crate::rearrange::{convex_symmetrize, distribution_function, MonotoneProfile};
use crate::sublevel::sublevel_integrals;

/// Relative tolerance used when declaring the Polya-Szego inequality
/// satisfied.
pub const POLYA_SZEGO_TOL: f64 = 0.02;

/// Nodal gradient: central differences in the interior, second-order
/// one-sided stencils on the box faces (including the wall).
pub fn gradient_field(u: &ScalarField) -> Vec<[f64; 3]> {
    let grid = u.grid();
    let vals = u.values();
    let dim = grid.dim();
    let h = grid.spacing();
    let mut strides = [0usize; 3];
    let mut counts = [0usize; 3];
    let mut s = 1;
    for axis in 0..dim {
        strides[axis] = s;
        counts[axis] = grid.nodes_along(axis);
        s *= counts[axis];
    }
    let mut out = vec![[0.0; 3]; vals.len()];
    for (flat, g) in out.iter_mut().enumerate() {
        for axis in 0..dim {
            let i = (flat / strides[axis]) % counts[axis];
            let s = strides[axis];
            let d = if i == 0 {
                (-3.0 * vals[flat] + 4.0 * vals[flat + s] - vals[flat + 2 * s]) / (2.0 * h)
            } else if i == counts[axis] - 1 {
                (3.0 * vals[flat] - 4.0 * vals[flat - s] + vals[flat - 2 * s]) / (2.0 * h)
            } else {
                (vals[flat + s] - vals[flat - s]) / (2.0 * h)
            };
            g[axis] = d;
        }
    }
    out
}

/// Trapezoid quadrature weight of a node (product over axes, halved at
/// the ends), times the cell volume.
fn node_weight(grid: &crate::grid::GridSpec, flat: usize) -> f64 {
    let dim = grid.dim();
    let mut w = grid.spacing().powi(dim as i32);
    let mut rest = flat;
    for axis in 0..dim {
        let n = grid.nodes_along(axis);
        let i = rest % n;
        rest /= n;
        if i == 0 || i == n - 1 {
            w *= 0.5;
        }
    }
    w
}

/// `int F(grad u)^p dx` over the grid box.
pub fn anisotropic_dirichlet_energy(u: &ScalarField, gauge: &GaugeSpec, p: f64) -> Result<f64> {
    let grid = u.grid();
    if gauge.dim() != grid.dim() {
        return input_err("gauge and grid dimensions differ");
    }
    if !(p >= 1.0) {
        return input_err(format!("exponent p must be >= 1, got {p}"));
    }
    let grads = gradient_field(u);
    let dim = grid.dim();
    let mut total = 0.0;
    for (flat, g) in grads.iter().enumerate() {
        let f = gauge.eval_unchecked(&g[..dim]);
        total += node_weight(grid, flat) * f.powf(p);
    }
    Ok(total)
}

/// Lq norm with trapezoid node weights.
pub fn lq_norm(u: &ScalarField, q: f64) -> f64 {
    let grid = u.grid();
    let mut total = 0.0;
    for (flat, v) in u.values().iter().enumerate() {
        total += node_weight(grid, flat) * v.abs().powf(q);
    }
    total.powf(1.0 / q)
}

/// Both sides of the Polya-Szego inequality, plus the layer-cake closed
/// form of the symmetrized energy as a cross-check.
#[derive(Debug, Clone, Copy)]
pub struct PolyaSzegoReport {
    /// Energy of the input field.
    pub lhs: f64,
    /// Energy of its convex symmetrization.
    pub rhs: f64,
    /// The same energy from the distribution function alone.
    pub rhs_closed_form: f64,
    pub holds: bool,
    pub tol: f64,
}

pub fn polya_szego_report(
    u: &ScalarField,
    gauge: &GaugeSpec,
    p: f64,
    levels: usize,
) -> Result<PolyaSzegoReport> {
    let lhs = anisotropic_dirichlet_energy(u, gauge, p)?;
    let ustar = convex_symmetrize(u, gauge, levels)?;
    let rhs = anisotropic_dirichlet_energy(&ustar, gauge, p)?;
    let mu = distribution_function(u, levels)?;
    let kappa = wulff_sector_volume(gauge, &u.grid().cone(), VolumeMethod::Analytic)?.kappa;
    let rhs_closed_form = symmetrized_energy_closed_form(&mu, kappa, u.grid().dim(), p);
    let tol = POLYA_SZEGO_TOL;
    Ok(PolyaSzegoReport {
        lhs,
        rhs,
        rhs_closed_form,
        holds: lhs >= rhs - tol * lhs.abs().max(1e-300),
        tol,
    })
}

/// Layer-cake energy of the symmetrized field:
/// `int (mu')^(1-p) (n kappa^(1/n) mu^(1-1/n))^p dt` over the sampled
/// distribution function. Intervals where `mu` is flat carry no mass of
/// the rearranged field and are skipped.
pub fn symmetrized_energy_closed_form(mu: &MonotoneProfile, kappa: f64, n: usize, p: f64) -> f64 {
    let nf = n as f64;
    let c = nf * kappa.powf(1.0 / nf);
    let mut total = 0.0;
    for w in mu.points().windows(2) {
        let dt = w[1].0 - w[0].0;
        let dmu = w[1].1 - w[0].1;
        if dt <= 0.0 || dmu <= 0.0 {
            continue;
        }
        let mid = 0.5 * (w[0].1 + w[1].1);
        if mid <= 0.0 {
            continue;
        }
        let rate = dmu / dt;
        total += rate.powf(1.0 - p) * (c * mid.powf(1.0 - 1.0 / nf)).powf(p) * dt;
    }
    total
}

/// `Psi(t) = int over {u<t} of F^2(grad u)`, sampled on `levels`
/// thresholds.
pub fn energy_profile(u: &ScalarField, gauge: &GaugeSpec, levels: usize) -> Result<MonotoneProfile> {
    use crate::rearrange::Interpolation;
    if levels < 2 {
        return input_err("need at least 2 levels");
    }
    if u.max_value() > 0.0 {
        return input_err("energy profile requires a non-positive field");
    }
    let grid = *u.grid();
    let dim = grid.dim();
    let grads = gradient_field(u);
    let mut q = vec![0.0; grads.len()];
    for (qi, g) in q.iter_mut().zip(&grads) {
        let f = gauge.eval_unchecked(&g[..dim]);
        *qi = f * f;
    }
    let qf = ScalarField::new(grid, q)?;
    let umin = u.min_value();
    if umin >= 0.0 {
        return MonotoneProfile::new(vec![(-1.0, 0.0), (0.0, 0.0)], Interpolation::Linear);
    }
    let thresholds: Vec<f64> = (0..levels)
        .map(|k| umin - umin * k as f64 / (levels - 1) as f64)
        .collect();
    let ints = sublevel_integrals(u, &thresholds, &qf)?;
    MonotoneProfile::from_noisy(
        thresholds.into_iter().zip(ints).collect(),
        Interpolation::Linear,
    )
}

/// The explicit extremal of the sharp Sobolev inequality: its scale
/// `sigma` (fixed by unit Lp* norm) and the optimal constant.
#[derive(Debug, Clone, Copy)]
pub struct SobolevExtremal {
    pub theta: f64,
    pub p: f64,
    pub n: usize,
    pub sigma: f64,
    pub constant: f64,
}

impl SobolevExtremal {
    fn exponents(&self) -> (f64, f64) {
        let q = self.p / (self.p - 1.0);
        let alpha = (self.n as f64 - self.p) / self.p;
        (q, alpha)
    }

    /// Radial profile: the extremal as a function of the dual gauge.
    pub fn eval_radial(&self, rho: f64) -> f64 {
        let (q, alpha) = self.exponents();
        -(self.sigma + rho.powf(q)).powf(-alpha)
    }

    /// Extremal at a point of the half-space.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let gauge = GaugeSpec::capillary(self.theta, self.n)?;
        Ok(self.eval_radial(gauge.dual(x)?))
    }
}

struct RadialSetup {
    n: f64,
    q: f64,
    b: f64,
}

fn radial_setup(theta: f64, p: f64, n: usize) -> Result<RadialSetup> {
    if n < 2 {
        return input_err(format!("dimension must be >= 2, got {n}"));
    }
    if !(p > 1.0 && p < n as f64) {
        return domain_err(format!("Sobolev exponent requires 1 < p < n, got p = {p}"));
    }
    let gauge = GaugeSpec::capillary(theta, n)?;
    let cone = crate::cone::ConeSpec::half_space(n)?;
    let b = wulff_sector_volume(&gauge, &cone, VolumeMethod::Analytic)?.kappa;
    Ok(RadialSetup {
        n: n as f64,
        q: p / (p - 1.0),
        b,
    })
}

/// Integral over `[0, inf)` by adaptive Simpson on dyadic pieces; each
/// piece gets a well-scaled tolerance, and the sum stops once the
/// analytic `tail_bound(r)` is negligible against the running total.
fn dyadic_integral(f: &dyn Fn(f64) -> f64, first: f64, tail_bound: &dyn Fn(f64) -> f64) -> f64 {
    let mut total = adaptive_simpson(f, 0.0, first, 1e-12);
    let mut r = first;
    while tail_bound(r) > 1e-13 * total.abs() && r < 1e14 {
        total += adaptive_simpson(f, r, 2.0 * r, 1e-11);
        r *= 2.0;
    }
    total
}

/// `int_0^inf rho^(n-1) (sigma + rho^q)^(-n) drho`.
fn norm_integral_simpson(s: &RadialSetup, sigma: f64) -> f64 {
    let (n, q) = (s.n, s.q);
    let f = move |rho: f64| rho.powf(n - 1.0) * (sigma + rho.powf(q)).powf(-n);
    let r0 = 8.0 * sigma.powf(1.0 / q).max(1.0);
    dyadic_integral(&f, r0, &|r| r.powf(n - q * n) / (q * n - n))
}

/// `int_0^inf (G')^p rho^(n-1) drho` for the extremal profile.
fn energy_integral_simpson(s: &RadialSetup, p: f64, sigma: f64) -> f64 {
    let (n, q) = (s.n, s.q);
    let m = (n - p) / p * q;
    let f = move |rho: f64| {
        let gp = m * rho.powf(q - 1.0) * (sigma + rho.powf(q)).powf(-(n - p) / p - 1.0);
        gp.powf(p) * rho.powf(n - 1.0)
    };
    let r0 = 8.0 * sigma.powf(1.0 / q).max(1.0);
    dyadic_integral(&f, r0, &|r| {
        m.powf(p) * r.powf(q + n - q * n) / (q * n - q - n)
    })
}

/// Residual of the unit-norm normalization at a given `sigma`:
/// `n * b * I(sigma) - 1`.
pub fn normalization_residual(theta: f64, p: f64, n: usize, sigma: f64) -> Result<f64> {
    let s = radial_setup(theta, p, n)?;
    Ok(s.n * s.b * norm_integral_simpson(&s, sigma) - 1.0)
}

/// Extremal via direct radial quadrature: bracketed bisection plus
/// secant refinement on the normalization residual.
pub fn sobolev_extremal(theta: f64, p: f64, n: usize) -> Result<SobolevExtremal> {
    let s = radial_setup(theta, p, n)?;
    let resid = |sigma: f64| s.n * s.b * norm_integral_simpson(&s, sigma) - 1.0;
    let mut lo = 1e-4;
    while resid(lo) < 0.0 {
        lo *= 0.25;
        if lo < 1e-90 {
            return Err(crate::error::Error::Numeric(
                "failed to bracket sigma from below".into(),
            ));
        }
    }
    let mut hi = 1.0;
    while resid(hi) > 0.0 {
        hi *= 4.0;
        if hi > 1e90 {
            return Err(crate::error::Error::Numeric(
                "failed to bracket sigma from above".into(),
            ));
        }
    }
    let sigma = find_root(&resid, lo, hi, 1e-10)?;
    let energy = s.n * s.b * energy_integral_simpson(&s, p, sigma);
    Ok(SobolevExtremal {
        theta,
        p,
        n,
        sigma,
        constant: energy.powf(-1.0 / p),
    })
}

/// Independent oracle: the same constants via the substitution
/// `rho = sigma^(1/q) y`, composite Gauss-Legendre on a finite core,
/// and an analytic binomial series for the algebraic tail. Used to
/// cross-check `sobolev_extremal`.
pub fn sobolev_extremal_substituted(theta: f64, p: f64, n: usize) -> Result<SobolevExtremal> {
    let s = radial_setup(theta, p, n)?;
    let (n_f, q, b) = (s.n, s.q, s.b);
    // J = int y^(n-1) (1+y^q)^(-n) dy, K = int y^(q+n-1) (1+y^q)^(-n) dy
    let j = scale_free_integral(n_f - 1.0, q, n, 4.0);
    let k = scale_free_integral(q + n_f - 1.0, q, n, 4.0);
    // n b sigma^(n/q - n) J = 1
    let sigma = (n_f * b * j).powf(q / (n_f * (q - 1.0)));
    let m = (n_f - p) / p * q;
    let energy = n_f * b * m.powf(p) * sigma.powf(1.0 + n_f / q - n_f) * k;
    Ok(SobolevExtremal {
        theta,
        p,
        n,
        sigma,
        constant: energy.powf(-1.0 / p),
    })
}

/// `int_0^inf y^a (1+y^q)^(-n) dy`: Gauss-Legendre on `[0, r]` plus the
/// tail expanded as `y^(a-qn) (1+y^-q)^(-n)` in powers of `y^-q`.
fn scale_free_integral(a: f64, q: f64, n: usize, r: f64) -> f64 {
    let n_f = n as f64;
    let core = gauss_composite(
        &|y: f64| y.powf(a) * (1.0 + y.powf(q)).powf(-n_f),
        0.0,
        r,
        64,
        24,
    );
    let mut tail = 0.0;
    let mut coeff = 1.0; // (-1)^k binom(n+k-1, k)
    for k in 0..80 {
        let kf = k as f64;
        if k > 0 {
            coeff *= -(n_f + kf - 1.0) / kf;
        }
        let decay = q * (n_f + kf) - a - 1.0;
        let term = coeff * r.powf(-decay) / decay;
        tail += term;
        if term.abs() < 1e-18 * (core.abs() + tail.abs()) {
            break;
        }
    }
    core + tail
}

/// Sobolev quotient `|u|_{p*} / (int F_theta(grad u)^p)^(1/p)` of a
/// compactly supported non-positive field.
pub fn sobolev_quotient(u: &ScalarField, theta: f64, p: f64) -> Result<f64> {
    let n = u.grid().dim();
    if !(p > 1.0 && p < n as f64) {
        return domain_err(format!("Sobolev exponent requires 1 < p < n, got p = {p}"));
    }
    if u.max_value() > 0.0 {
        return input_err("Sobolev quotient requires a non-positive field");
    }
    if u.min_value() == 0.0 {
        return input_err("Sobolev quotient of the zero field");
    }
    if u.min_on_outer_faces() < 0.0 {
        return input_err("field support reaches the outer grid faces");
    }
    let gauge = GaugeSpec::capillary(theta, n)?;
    let pstar = n as f64 * p / (n as f64 - p);
    let norm = lq_norm(u, pstar);
    let energy = anisotropic_dirichlet_energy(u, &gauge, p)?;
    Ok(norm / energy.powf(1.0 / p))
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
    fn zero_field_has_zero_energy() {
        let g = grid2(0.125, 1.0);
        let u = ScalarField::constant(g, 0.0).unwrap();
        let gauge = GaugeSpec::capillary(PI / 3.0, 2).unwrap();
        assert_eq!(anisotropic_dirichlet_energy(&u, &gauge, 2.0).unwrap(), 0.0);
        let psi = energy_profile(&u, &gauge, 16).unwrap();
        assert_eq!(psi.eval(-0.5), 0.0);
    }

    #[test]
    fn half_disk_dirichlet_energy_polar_oracle() {
        // u = (|x|^2 - 1)/2 on the half disk: int |grad u|^2 = pi/4
        let g = grid2(1.0 / 256.0, 1.5);
        let u = ScalarField::from_fn(g, |x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            ((r2 - 1.0) / 2.0).min(0.0)
        })
        .unwrap();
        let gauge = GaugeSpec::capillary(PI / 2.0, 2).unwrap();
        let e = anisotropic_dirichlet_energy(&u, &gauge, 2.0).unwrap();
        assert!((e - PI / 4.0).abs() <= 0.02 * PI / 4.0, "energy {e}");
    }

    #[test]
    fn energy_is_translation_invariant_along_wall() {
        let g = grid2(1.0 / 128.0, 1.5);
        let bump = |x0: f64| {
            move |x: &[f64]| {
                let dx = x[0] - x0;
                let w: f64 = 1.0 - (dx * dx + x[1] * x[1]) / 0.49;
                if w > 0.0 {
                    -w * w
                } else {
                    0.0
                }
            }
        };
        let gauge = GaugeSpec::capillary(2.0 * PI / 3.0, 2).unwrap();
        let e0 = anisotropic_dirichlet_energy(
            &ScalarField::from_fn(g, bump(0.0)).unwrap(),
            &gauge,
            2.0,
        )
        .unwrap();
        let e1 = anisotropic_dirichlet_energy(
            &ScalarField::from_fn(g, bump(0.31 / 128.0)).unwrap(),
            &gauge,
            2.0,
        )
        .unwrap();
        assert!((e0 - e1).abs() <= 2e-3 * e0);
    }

    #[test]
    fn capillary_energy_identity_two_code_paths() {
        let g = grid2(1.0 / 64.0, 1.0);
        let u = ScalarField::from_fn(g, |x| {
            let w: f64 = 1.0 - (x[0] * x[0] + x[1] * x[1]) / 0.36;
            if w > 0.0 {
                -w * w
            } else {
                0.0
            }
        })
        .unwrap();
        let theta: f64 = 2.0;
        let gauge = GaugeSpec::capillary(theta, 2).unwrap();
        for p in [1.0, 2.0, 3.0] {
            let lib = anisotropic_dirichlet_energy(&u, &gauge, p).unwrap();
            // direct formula, second code path
            let grads = gradient_field(&u);
            let mut direct = 0.0;
            for (flat, gr) in grads.iter().enumerate() {
                let f = (gr[0] * gr[0] + gr[1] * gr[1]).sqrt() - theta.cos() * gr[1];
                direct += node_weight(&g, flat) * f.powf(p);
            }
            assert!(
                (lib - direct).abs() <= 1e-12 * direct.abs().max(1e-300),
                "p={p}: {lib} vs {direct}"
            );
        }
    }

    #[test]
    fn polya_szego_equality_on_radial_input() {
        let theta = PI / 3.0;
        let gauge = GaugeSpec::capillary(theta, 2).unwrap();
        let g = grid2(1.0 / 128.0, 1.5);
        let u = ScalarField::from_fn(g, |x| {
            let d = gauge.dual_unchecked(x);
            ((d * d - 1.0) / 2.0).min(0.0)
        })
        .unwrap();
        for p in [1.0, 2.0] {
            let rep = polya_szego_report(&u, &gauge, p, 256).unwrap();
            assert!(rep.holds, "p={p}");
            assert!(
                (rep.lhs - rep.rhs).abs() <= 0.02 * rep.lhs,
                "p={p}: lhs {} rhs {}",
                rep.lhs,
                rep.rhs
            );
            assert!(
                (rep.rhs_closed_form - rep.rhs).abs() <= 0.03 * rep.rhs,
                "p={p}: closed {} vs rhs {}",
                rep.rhs_closed_form,
                rep.rhs
            );
        }
    }

    #[test]
    fn polya_szego_strict_for_sheared_bump() {
        let gauge = GaugeSpec::capillary(PI / 2.0, 2).unwrap();
        let g = grid2(1.0 / 96.0, 1.5);
        let u = ScalarField::from_fn(g, |x| {
            let dx = x[0] + 0.8 * x[1] - 0.2;
            let w: f64 = 1.0 - (dx * dx / 0.16 + x[1] * x[1] / 0.64);
            if w > 0.0 {
                -w * w
            } else {
                0.0
            }
        })
        .unwrap();
        let rep = polya_szego_report(&u, &gauge, 2.0, 256).unwrap();
        assert!(rep.holds);
        assert!(rep.lhs > 1.05 * rep.rhs, "lhs {} rhs {}", rep.lhs, rep.rhs);
    }

    #[test]
    fn sobolev_sigma_closed_form_family() {
        // for n = 3, p = 2 the normalization gives sigma = (3 pi b / 16)^(2/3)
        for theta in [PI / 3.0, PI / 2.0, 2.0 * PI / 3.0] {
            let ext = sobolev_extremal(theta, 2.0, 3).unwrap();
            let gauge = GaugeSpec::capillary(theta, 3).unwrap();
            let b = wulff_sector_volume(
                &gauge,
                &ConeSpec::half_space(3).unwrap(),
                VolumeMethod::Analytic,
            )
            .unwrap()
            .kappa;
            let expect = (3.0 * PI * b / 16.0).powf(2.0 / 3.0);
            assert!(
                (ext.sigma - expect).abs() <= 1e-6 * expect,
                "theta={theta}: sigma {} vs {expect}",
                ext.sigma
            );
            // U(0) = -sigma^(-(n-p)/p)
            assert!(
                (ext.eval(&[0.0, 0.0, 0.0]).unwrap() + ext.sigma.powf(-0.5)).abs() < 1e-12
            );
        }
        // right angle: C = sqrt(8/(3 pi^2)) sigma^(1/4)
        let ext = sobolev_extremal(PI / 2.0, 2.0, 3).unwrap();
        let c_expect = (8.0 / (3.0 * PI * PI)).sqrt() * ext.sigma.powf(0.25);
        assert!(
            (ext.constant - c_expect).abs() <= 1e-6 * c_expect,
            "C {} vs {c_expect}",
            ext.constant
        );
    }

    #[test]
    fn sobolev_two_schemes_agree() {
        for (theta, p, n) in [(PI / 3.0, 2.0, 3), (2.0 * PI / 3.0, 1.5, 2), (1.0, 2.5, 3)] {
            let a = sobolev_extremal(theta, p, n).unwrap();
            let b = sobolev_extremal_substituted(theta, p, n).unwrap();
            assert!(
                (a.sigma - b.sigma).abs() <= 1e-4 * a.sigma,
                "sigma {} vs {}",
                a.sigma,
                b.sigma
            );
            assert!(
                (a.constant - b.constant).abs() <= 1e-4 * a.constant,
                "C {} vs {}",
                a.constant,
                b.constant
            );
            let r = normalization_residual(theta, p, n, a.sigma).unwrap();
            assert!(r.abs() <= 1e-8, "residual {r}");
        }
        assert!(sobolev_extremal(1.0, 3.0, 3).is_err());
        assert!(sobolev_extremal(1.0, 1.0, 3).is_err());
    }

    #[test]
    fn quotient_scale_invariance_and_suboptimality() {
        let g = grid2(1.0 / 64.0, 1.5);
        let u = ScalarField::from_fn(g, |x| {
            let w: f64 = 1.0 - (x[0] * x[0] + x[1] * x[1]) / 0.81;
            if w > 0.0 {
                -w * w
            } else {
                0.0
            }
        })
        .unwrap();
        let theta = 2.0 * PI / 3.0;
        let p = 1.5;
        let q1 = sobolev_quotient(&u, theta, p).unwrap();
        let scaled =
            ScalarField::new(g, u.values().iter().map(|v| 5.0 * v).collect()).unwrap();
        let q5 = sobolev_quotient(&scaled, theta, p).unwrap();
        assert!((q1 - q5).abs() <= 1e-12 * q1);
        let ext = sobolev_extremal(theta, p, 2).unwrap();
        assert!(q1 < ext.constant, "quotient {q1} vs C {}", ext.constant);
        let zero = ScalarField::constant(g, 0.0).unwrap();
        assert!(sobolev_quotient(&zero, theta, p).is_err());
    }

    #[test]
    fn truncated_extremal_approaches_the_constant() {
        let theta = PI / 2.0;
        let p = 1.5;
        let ext = sobolev_extremal(theta, p, 2).unwrap();
        let gauge = GaugeSpec::capillary(theta, 2).unwrap();
        let rho_cut = 20.0;
        let grid = GridSpec::new(ConeSpec::half_space(2).unwrap(), 24.0, 0.125).unwrap();
        let cut = ext.eval_radial(rho_cut);
        let u = ScalarField::from_fn(grid, |x| {
            let rho = gauge.dual_unchecked(x);
            if rho < rho_cut {
                ext.eval_radial(rho) - cut
            } else {
                0.0
            }
        })
        .unwrap();
        let q = sobolev_quotient(&u, theta, p).unwrap();
        assert!(
            q <= ext.constant * 1.01,
            "quotient {q} above C {}",
            ext.constant
        );
        assert!(
            q >= 0.93 * ext.constant,
            "quotient {q} far below C {}",
            ext.constant
        );
    }

    #[test]
    fn energy_profile_exhausts_total_energy() {
        let gauge = GaugeSpec::capillary(PI / 3.0, 2).unwrap();
        let g = grid2(1.0 / 128.0, 1.5);
        let u = ScalarField::from_fn(g, |x| {
            let d = gauge.dual_unchecked(x);
            ((d * d - 1.0) / 2.0).min(0.0)
        })
        .unwrap();
        let psi = energy_profile(&u, &gauge, 128).unwrap();
        let total = anisotropic_dirichlet_energy(&u, &gauge, 2.0).unwrap();
        let top = psi.last_value();
        assert!(
            (top - total).abs() <= 0.02 * total,
            "Psi(0) = {top} vs total {total}"
        );
    }
}
