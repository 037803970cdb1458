//! The capillary gauge, its dual, and Wulff-sector constants.
//!
//! The gauge measures a vector as its Euclidean length minus `cos(theta)`
//! times its last component. Its unit Wulff ball is the Euclidean unit
//! ball centered at `-cos(theta) * E_n`, which meets the wall `{x_n = 0}`
//! at contact angle `theta`. With `theta = pi/2` everything degenerates to
//! the Euclidean norm and centered balls.

use crate::cone::{ConeKind, ConeSpec};
use crate::error::{domain_err, input_err, Error, Result};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Guard against angles degenerating to 0 or pi.
pub const DEFAULT_THETA_GUARD: f64 = 1e-6;

/// Default sample count for Monte-Carlo volume estimation.
pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;

/// Default seed for Monte-Carlo volume estimation; recorded in reports.
pub const DEFAULT_MC_SEED: u64 = 1729;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaugeKind {
    Euclidean,
    Capillary,
}

/// A gauge on n-dimensional space: Euclidean, or capillary with a
/// contact angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeSpec {
    kind: GaugeKind,
    theta: f64,
    cos_theta: f64,
    dim: usize,
}

impl GaugeSpec {
    /// Euclidean gauge; identical to `capillary(pi/2, dim)` on all
    /// operations.
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim < 2 {
            return input_err(format!("gauge dimension must be >= 2, got {dim}"));
        }
        Ok(GaugeSpec {
            kind: GaugeKind::Euclidean,
            theta: std::f64::consts::FRAC_PI_2,
            cos_theta: 0.0,
            dim,
        })
    }

    /// Capillary gauge with contact angle `theta` in (0, pi).
    pub fn capillary(theta: f64, dim: usize) -> Result<Self> {
        Self::capillary_with_guard(theta, dim, DEFAULT_THETA_GUARD)
    }

    /// Capillary gauge with a caller-chosen guard band around 0 and pi.
    pub fn capillary_with_guard(theta: f64, dim: usize, guard: f64) -> Result<Self> {
        if dim < 2 {
            return input_err(format!("gauge dimension must be >= 2, got {dim}"));
        }
        if !theta.is_finite() || theta <= guard || theta >= std::f64::consts::PI - guard {
            return input_err(format!(
                "contact angle must lie in ({guard:e}, pi - {guard:e}), got {theta}"
            ));
        }
        let mut cos_theta = theta.cos();
        // Snap the representable pi/2 to an exact zero so the capillary
        // gauge at pi/2 and the Euclidean gauge agree bit for bit.
        if cos_theta.abs() < 1e-15 {
            cos_theta = 0.0;
        }
        Ok(GaugeSpec {
            kind: GaugeKind::Capillary,
            theta,
            cos_theta,
            dim,
        })
    }

    pub fn kind(&self) -> GaugeKind {
        self.kind
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn cos_theta(&self) -> f64 {
        self.cos_theta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn check_vector(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.dim {
            return input_err(format!(
                "vector has length {}, gauge dimension is {}",
                xi.len(),
                self.dim
            ));
        }
        if xi.iter().any(|v| !v.is_finite()) {
            return input_err("vector has a non-finite component");
        }
        Ok(())
    }

    /// Gauge value `|xi| - cos(theta) * xi_n`. Zero exactly at the origin.
    pub fn eval(&self, xi: &[f64]) -> Result<f64> {
        self.check_vector(xi)?;
        Ok(self.eval_unchecked(xi))
    }

    pub(crate) fn eval_unchecked(&self, xi: &[f64]) -> f64 {
        let norm = norm(xi);
        norm - self.cos_theta * xi[self.dim - 1]
    }

    /// Gauge gradient `xi/|xi| - cos(theta) * E_n`; undefined at the origin.
    pub fn grad(&self, xi: &[f64]) -> Result<Vec<f64>> {
        self.check_vector(xi)?;
        let norm = norm(xi);
        if norm == 0.0 {
            return domain_err("gauge gradient is undefined at the origin");
        }
        let mut g: Vec<f64> = xi.iter().map(|v| v / norm).collect();
        g[self.dim - 1] -= self.cos_theta;
        Ok(g)
    }

    /// Dual gauge. Equals `|x|^2 / (sqrt(cos^2(theta) x_n^2 +
    /// sin^2(theta) |x|^2) - cos(theta) x_n)`, evaluated in a
    /// cancellation-free arrangement.
    pub fn dual(&self, x: &[f64]) -> Result<f64> {
        self.check_vector(x)?;
        Ok(self.dual_unchecked(x))
    }

    pub(crate) fn dual_unchecked(&self, x: &[f64]) -> f64 {
        let rho2 = dot(x, x);
        if rho2 == 0.0 {
            return 0.0;
        }
        let c = self.cos_theta;
        let s2 = 1.0 - c * c;
        let t = x[self.dim - 1];
        let a = (c * c * t * t + s2 * rho2).sqrt();
        let ct = c * t;
        if ct >= 0.0 {
            // rationalized form: (A + c t) / sin^2(theta)
            (a + ct) / s2
        } else {
            // quotient form is the stable one when c t < 0
            rho2 / (a - ct)
        }
    }

    /// Gradient of the dual gauge; undefined at the origin. Satisfies
    /// `eval(dual_grad(x)) == 1` and `grad(dual_grad(x)) == x / dual(x)`.
    pub fn dual_grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_vector(x)?;
        let rho2 = dot(x, x);
        if rho2 == 0.0 {
            return domain_err("dual gauge gradient is undefined at the origin");
        }
        let c = self.cos_theta;
        let s2 = 1.0 - c * c;
        let t = x[self.dim - 1];
        let a = (c * c * t * t + s2 * rho2).sqrt();
        let ct = c * t;
        // coefficient of E_n: c (A + c t) / (s^2 A), with the sum
        // rationalized when c t < 0
        let coef = if ct >= 0.0 {
            c * (a + ct) / (s2 * a)
        } else {
            c * rho2 / (a * (a - ct))
        };
        let mut g: Vec<f64> = x.iter().map(|v| v / a).collect();
        g[self.dim - 1] += coef;
        Ok(g)
    }

    /// Sampled dual gauge `max <x,z>/F(z)` over points `z` on the unit
    /// sphere. Converges to `dual` from below; kept free of any call into
    /// `dual` so it can serve as an independent oracle.
    pub fn dual_numeric(&self, x: &[f64], samples: usize) -> Result<f64> {
        self.check_vector(x)?;
        if samples < 1000 {
            return input_err(format!("need at least 1000 samples, got {samples}"));
        }
        if dot(x, x) == 0.0 {
            return Ok(0.0);
        }
        let mut best = f64::NEG_INFINITY;
        let mut consider = |z: &[f64]| {
            let f = self.eval_unchecked(z);
            let q = dot(x, z) / f;
            if q > best {
                best = q;
            }
        };
        match self.dim {
            2 => {
                for k in 0..samples {
                    let phi = 2.0 * std::f64::consts::PI * (k as f64) / (samples as f64);
                    consider(&[phi.cos(), phi.sin()]);
                }
            }
            3 => {
                // Fibonacci sphere lattice
                let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
                for k in 0..samples {
                    let t = 1.0 - 2.0 * (k as f64 + 0.5) / (samples as f64);
                    let r = (1.0 - t * t).sqrt();
                    let phi = golden * k as f64;
                    consider(&[r * phi.cos(), r * phi.sin(), t]);
                }
            }
            _ => {
                let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_MC_SEED);
                let mut z = vec![0.0; self.dim];
                for _ in 0..samples {
                    loop {
                        let mut n2 = 0.0;
                        for zi in z.iter_mut() {
                            *zi = standard_normal(&mut rng);
                            n2 += *zi * *zi;
                        }
                        if n2 > 1e-12 {
                            let n = n2.sqrt();
                            for zi in z.iter_mut() {
                                *zi /= n;
                            }
                            break;
                        }
                    }
                    consider(&z);
                }
            }
        }
        Ok(best)
    }
}

/// Constants of a Wulff sector: `kappa` is the unit Wulff ball volume
/// inside the cone (the constant `b_theta` in the half-space) and `omega`
/// the unit Euclidean ball volume inside the cone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorConstants {
    pub kappa: f64,
    pub omega: f64,
    pub dim: usize,
}

/// How to compute Wulff-sector volumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeMethod {
    Analytic,
    MonteCarlo { samples: u64, seed: u64 },
}

impl VolumeMethod {
    pub fn default_monte_carlo() -> Self {
        VolumeMethod::MonteCarlo {
            samples: DEFAULT_MC_SAMPLES,
            seed: DEFAULT_MC_SEED,
        }
    }
}

/// A seeded Monte-Carlo volume estimate with its standard error.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Volume of the unit Euclidean ball in `dim` dimensions.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        0 => 1.0,
        1 => 2.0,
        2 => std::f64::consts::PI,
        n => 2.0 * std::f64::consts::PI / (n as f64) * unit_ball_volume(n - 2),
    }
}

/// Sector constants `kappa` and `omega` for a gauge in a cone.
///
/// The analytic route requires `dim` in {2, 3} or a right contact angle;
/// the Monte-Carlo route samples the bounding box of the Wulff sector
/// with a seeded generator and works in any dimension.
pub fn wulff_sector_volume(
    gauge: &GaugeSpec,
    cone: &ConeSpec,
    method: VolumeMethod,
) -> Result<SectorConstants> {
    if gauge.dim() != cone.dim {
        return input_err(format!(
            "gauge dimension {} differs from cone dimension {}",
            gauge.dim(),
            cone.dim
        ));
    }
    let n = cone.dim;
    let omega = match cone.kind {
        ConeKind::FullSpace => unit_ball_volume(n),
        ConeKind::HalfSpace => 0.5 * unit_ball_volume(n),
    };
    let kappa = match method {
        VolumeMethod::Analytic => analytic_kappa(gauge, cone)?,
        VolumeMethod::MonteCarlo { samples, seed } => {
            monte_carlo_kappa(gauge, cone, samples, seed).value
        }
    };
    Ok(SectorConstants { kappa, omega, dim: n })
}

fn analytic_kappa(gauge: &GaugeSpec, cone: &ConeSpec) -> Result<f64> {
    let n = cone.dim;
    let c = gauge.cos_theta();
    match cone.kind {
        // the whole Wulff ball: a translated unit ball
        ConeKind::FullSpace => Ok(unit_ball_volume(n)),
        ConeKind::HalfSpace => {
            if c == 0.0 {
                return Ok(0.5 * unit_ball_volume(n));
            }
            match n {
                // circular segment above the chord at signed height c
                2 => Ok(gauge.theta() - gauge.theta().sin() * c),
                // spherical cap of height 1 - c
                3 => {
                    let h = 1.0 - c;
                    Ok(std::f64::consts::PI * h * h * (3.0 - h) / 3.0)
                }
                _ => Err(Error::Unsupported(format!(
                    "analytic Wulff sector volume needs dim in {{2,3}} or theta = pi/2, got dim {n}"
                ))),
            }
        }
    }
}

/// Seeded Monte-Carlo estimate of `kappa`; exposed so callers can check
/// agreement with the analytic value against the standard error.
pub fn monte_carlo_kappa(
    gauge: &GaugeSpec,
    cone: &ConeSpec,
    samples: u64,
    seed: u64,
) -> MonteCarloEstimate {
    let n = cone.dim;
    let c = gauge.cos_theta();
    // bounding box of the Wulff sector
    let lateral = match cone.kind {
        ConeKind::HalfSpace if c > 0.0 => (1.0 - c * c).sqrt(),
        _ => 1.0,
    };
    let (z_lo, z_hi) = match cone.kind {
        ConeKind::HalfSpace => (0.0, 1.0 - c),
        ConeKind::FullSpace => (-c - 1.0, -c + 1.0),
    };
    let mut box_vol = z_hi - z_lo;
    for _ in 0..n - 1 {
        box_vol *= 2.0 * lateral;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    let mut x = vec![0.0; n];
    for _ in 0..samples {
        for xi in x.iter_mut().take(n - 1) {
            *xi = rng.gen_range(-lateral..lateral);
        }
        x[n - 1] = rng.gen_range(z_lo..z_hi);
        // inside the Wulff ball: |x + c E_n| < 1
        let mut d2 = 0.0;
        for (i, xi) in x.iter().enumerate() {
            let v = if i == n - 1 { xi + c } else { *xi };
            d2 += v * v;
        }
        if d2 < 1.0 {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    MonteCarloEstimate {
        value: p * box_vol,
        std_err: box_vol * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
        seed,
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    // Box-Muller; only one of the pair is used.
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn eval_closed_forms() {
        let g = GaugeSpec::capillary(PI / 3.0, 2).unwrap();
        assert!(close(g.eval(&[0.0, 1.0]).unwrap(), 0.5, 1e-15));
        assert!(close(g.eval(&[0.0, -1.0]).unwrap(), 1.5, 1e-15));
        let e = GaugeSpec::capillary(PI / 2.0, 2).unwrap();
        assert!(close(e.eval(&[3.0, 4.0]).unwrap(), 5.0, 1e-15));
        assert_eq!(g.eval(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn eval_rejects_bad_input() {
        let g = GaugeSpec::capillary(PI / 3.0, 2).unwrap();
        assert!(matches!(g.eval(&[1.0]), Err(Error::Input(_))));
        assert!(matches!(g.eval(&[f64::NAN, 0.0]), Err(Error::Input(_))));
        assert!(GaugeSpec::capillary(0.0, 2).is_err());
        assert!(GaugeSpec::capillary(PI, 2).is_err());
        assert!(GaugeSpec::capillary(1.0, 1).is_err());
    }

    #[test]
    fn euclidean_matches_right_angle_capillary() {
        let e = GaugeSpec::euclidean(3).unwrap();
        let c = GaugeSpec::capillary(PI / 2.0, 3).unwrap();
        let xs: [[f64; 3]; 3] = [[1.0, 2.0, -0.5], [0.0, 0.0, 3.0], [-1.0, 0.3, 0.0]];
        for x in &xs {
            assert_eq!(e.eval(x).unwrap(), c.eval(x).unwrap());
            assert_eq!(e.dual(x).unwrap(), c.dual(x).unwrap());
        }
    }

    #[test]
    fn grad_closed_forms_and_homogeneity() {
        let g = GaugeSpec::capillary(PI / 3.0, 2).unwrap();
        let gr = g.grad(&[0.0, 1.0]).unwrap();
        assert!(close(gr[0], 0.0, 1e-15) && close(gr[1], 0.5, 1e-15));
        let gr = g.grad(&[1.0, 0.0]).unwrap();
        assert!(close(gr[0], 1.0, 1e-15) && close(gr[1], -0.5, 1e-15));
        let a = g.grad(&[0.4, -0.7]).unwrap();
        let b = g.grad(&[2.8, -4.9]).unwrap();
        for i in 0..2 {
            assert!(close(a[i], b[i], 1e-14));
        }
        assert!(matches!(g.grad(&[0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn dual_closed_forms() {
        let g = GaugeSpec::capillary(PI / 3.0, 2).unwrap();
        assert!(close(g.dual(&[0.0, 1.0]).unwrap(), 2.0, 1e-14));
        assert!(close(g.dual(&[0.0, -1.0]).unwrap(), 2.0 / 3.0, 1e-14));
        assert!(close(g.dual(&[1.0, 0.0]).unwrap(), 2.0 / 3.0_f64.sqrt(), 1e-14));
        let e = GaugeSpec::capillary(PI / 2.0, 2).unwrap();
        assert!(close(e.dual(&[3.0, 4.0]).unwrap(), 5.0, 1e-14));
        assert_eq!(g.dual(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn dual_numeric_is_an_oracle_for_dual() {
        let g = GaugeSpec::capillary(PI / 3.0, 2).unwrap();
        let v = g.dual_numeric(&[1.0, 0.0], 100_000).unwrap();
        assert!(close(v, 2.0 / 3.0_f64.sqrt(), 5e-3));
        let e = GaugeSpec::capillary(PI / 2.0, 2).unwrap();
        assert!(close(e.dual_numeric(&[1.0, 0.0], 100_000).unwrap(), 1.0, 1e-3));
        assert_eq!(g.dual_numeric(&[0.0, 0.0], 100_000).unwrap(), 0.0);

        // sweep random points in 2d and 3d, both oracles must agree
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [2usize, 3] {
            let g = GaugeSpec::capillary(2.0 * PI / 3.0, n).unwrap();
            for _ in 0..20 {
                let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                if norm(&x) < 0.1 {
                    continue;
                }
                let exact = g.dual(&x).unwrap();
                let approx = g.dual_numeric(&x, 20_000).unwrap();
                assert!(
                    approx <= exact + 1e-12 && close(approx, exact, 5e-3 * exact.max(1.0)),
                    "dual mismatch at {x:?}: {exact} vs {approx}"
                );
            }
        }
    }

    #[test]
    fn dual_grad_satisfies_duality_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2usize, 3] {
            for theta in [PI / 4.0, PI / 2.0, 2.0 * PI / 3.0] {
                let g = GaugeSpec::capillary(theta, n).unwrap();
                for _ in 0..200 {
                    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    if norm(&x) < 1e-3 {
                        continue;
                    }
                    let dg = g.dual_grad(&x).unwrap();
                    assert!(close(g.eval(&dg).unwrap(), 1.0, 1e-10));
                    let fg = g.grad(&dg).unwrap();
                    let fo = g.dual(&x).unwrap();
                    for i in 0..n {
                        assert!(close(fg[i], x[i] / fo, 1e-8));
                    }
                }
            }
        }
    }

    #[test]
    fn dual_grad_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let g = GaugeSpec::capillary(PI / 3.0, 3).unwrap();
        for _ in 0..50 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            if norm(&x) < 0.2 {
                continue;
            }
            let dg = g.dual_grad(&x).unwrap();
            let h = 1e-6 * norm(&x).max(1.0);
            for i in 0..3 {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                let fd = (g.dual(&xp).unwrap() - g.dual(&xm).unwrap()) / (2.0 * h);
                assert!(close(dg[i], fd, 1e-6), "component {i} of {x:?}");
            }
        }
        // 0-homogeneity
        let a = g.dual_grad(&[0.3, -0.2, 0.9]).unwrap();
        let b = g.dual_grad(&[0.9, -0.6, 2.7]).unwrap();
        for i in 0..3 {
            assert!(close(a[i], b[i], 1e-13));
        }
        assert!(matches!(g.dual_grad(&[0.0, 0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn gauge_is_one_homogeneous_and_convex() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let g = GaugeSpec::capillary(PI / 4.0, 3).unwrap();
        for _ in 0..500 {
            let xi: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let eta: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let t: f64 = rng.gen_range(0.01..10.0);
            let scaled: Vec<f64> = xi.iter().map(|v| t * v).collect();
            let fe = g.eval(&xi).unwrap();
            assert!(close(g.eval(&scaled).unwrap(), t * fe, 1e-12 * (1.0 + t * fe)));
            assert!(close(g.dual(&scaled).unwrap(), t * g.dual(&xi).unwrap(), 1e-12 * (1.0 + t)));
            let mid: Vec<f64> = xi.iter().zip(&eta).map(|(a, b)| 0.5 * (a + b)).collect();
            let fmid = g.eval(&mid).unwrap();
            assert!(fmid <= 0.5 * (fe + g.eval(&eta).unwrap()) + 1e-12);
        }
    }

    #[test]
    fn wulff_ball_is_offcentered_euclidean_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for theta in [PI / 3.0, PI / 2.0, 2.2] {
            let g = GaugeSpec::capillary(theta, 3).unwrap();
            let c = g.cos_theta();
            for _ in 0..2000 {
                let x: [f64; 3] = [
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                ];
                let r: f64 = rng.gen_range(0.1..2.0);
                let dual_in = g.dual(&x).unwrap() < r;
                let shifted = [x[0], x[1], x[2] + r * c];
                let band = (norm(&shifted) - r).abs() < 1e-10;
                if !band {
                    assert_eq!(dual_in, norm(&shifted) < r, "x={x:?} r={r}");
                }
            }
        }
    }

    #[test]
    fn contact_angle_on_the_wall() {
        for theta in [PI / 3.0, 1.9, 2.7] {
            let g = GaugeSpec::capillary(theta, 2).unwrap();
            let c = g.cos_theta();
            let r = 1.7;
            // boundary point of the Wulff ball on the wall
            let z = [r * (1.0 - c * c).sqrt(), 0.0];
            let recentered = [(z[0]) / r, (z[1] + r * c) / r];
            assert!(close(recentered[1], c, 1e-10));
            assert!(close(norm(&recentered), 1.0, 1e-12));
        }
    }

    #[test]
    fn sector_volume_closed_forms() {
        let cone2 = ConeSpec::half_space(2).unwrap();
        let right = GaugeSpec::capillary(PI / 2.0, 2).unwrap();
        let sc = wulff_sector_volume(&right, &cone2, VolumeMethod::Analytic).unwrap();
        assert!(close(sc.kappa, PI / 2.0, 1e-14));
        assert!(close(sc.kappa, sc.omega, 1e-14));

        let g = GaugeSpec::capillary(PI / 3.0, 2).unwrap();
        let sc = wulff_sector_volume(&g, &cone2, VolumeMethod::Analytic).unwrap();
        let segment = PI / 3.0 - (PI / 3.0).sin() * 0.5;
        assert!(close(sc.kappa, segment, 1e-14));
        assert!(close(sc.kappa, 0.6142, 1e-4));

        let cone3 = ConeSpec::half_space(3).unwrap();
        let g3 = GaugeSpec::capillary(PI / 3.0, 3).unwrap();
        let sc = wulff_sector_volume(&g3, &cone3, VolumeMethod::Analytic).unwrap();
        let h: f64 = 0.5;
        assert!(close(sc.kappa, PI * h * h * (3.0 - h) / 3.0, 1e-14));
        assert!(close(sc.kappa, 0.6545, 1e-4));

        let full = ConeSpec::full_space(3).unwrap();
        let sc = wulff_sector_volume(&g3, &full, VolumeMethod::Analytic).unwrap();
        assert!(close(sc.kappa, 4.0 * PI / 3.0, 1e-14));
    }

    #[test]
    fn monte_carlo_agrees_with_analytic_within_three_sigma() {
        for (theta, n) in [(PI / 3.0, 2usize), (2.0 * PI / 3.0, 3), (PI / 2.0, 3)] {
            let g = GaugeSpec::capillary(theta, n).unwrap();
            let cone = ConeSpec::half_space(n).unwrap();
            let exact = analytic_kappa(&g, &cone).unwrap();
            let est = monte_carlo_kappa(&g, &cone, 200_000, DEFAULT_MC_SEED);
            assert!(
                (est.value - exact).abs() <= 3.0 * est.std_err,
                "theta={theta} n={n}: {} vs {exact} (se {})",
                est.value,
                est.std_err
            );
        }
    }

    #[test]
    fn analytic_unsupported_in_high_dimension() {
        let g = GaugeSpec::capillary(PI / 3.0, 4).unwrap();
        let cone = ConeSpec::half_space(4).unwrap();
        assert!(matches!(
            wulff_sector_volume(&g, &cone, VolumeMethod::Analytic),
            Err(Error::Unsupported(_))
        ));
        // pi/2 stays analytic in any dimension
        let right = GaugeSpec::euclidean(5).unwrap();
        let cone5 = ConeSpec::half_space(5).unwrap();
        let sc = wulff_sector_volume(&right, &cone5, VolumeMethod::Analytic).unwrap();
        assert!(close(sc.kappa, 0.5 * unit_ball_volume(5), 1e-14));
    }

    #[test]
    fn unit_ball_volumes() {
        assert!(close(unit_ball_volume(2), PI, 1e-15));
        assert!(close(unit_ball_volume(3), 4.0 * PI / 3.0, 1e-14));
        assert!(close(unit_ball_volume(4), PI * PI / 2.0, 1e-14));
    }
}
