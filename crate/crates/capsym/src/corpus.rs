//! Seeded corpora of fields, regions, and mixed problems for the
//! verification suite. Everything is a pure function of the seed.

use crate::cone::ConeKind;
use crate::error::Result;
use crate::gauge::GaugeSpec;
use crate::grid::{GridSpec, RegionSpec, ScalarField};
use crate::pde::{MixedBVP, OperatorSpec, SourceTerm};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A smooth, compactly supported, non-positive field: a few quartic
/// bumps under a common envelope.
pub fn smooth_bump_field(grid: GridSpec, seed: u64) -> Result<ScalarField> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    let l = grid.half_extent();
    let r_env = 0.8 * l;
    let bumps: usize = rng.gen_range(1..=3);
    let mut centers = Vec::new();
    for _ in 0..bumps {
        let mut c = [0.0f64; 3];
        for (axis, ci) in c.iter_mut().enumerate().take(dim) {
            *ci = if axis == dim - 1 {
                rng.gen_range(0.0..0.5 * r_env)
            } else {
                rng.gen_range(-0.5 * r_env..0.5 * r_env)
            };
        }
        let radius: f64 = rng.gen_range(0.35 * r_env..0.7 * r_env);
        let amp: f64 = rng.gen_range(0.4..1.2);
        // mild anisotropy per axis
        let mut stretch = [1.0f64; 3];
        for s in stretch.iter_mut().take(dim) {
            *s = rng.gen_range(0.7..1.4);
        }
        centers.push((c, radius, amp, stretch));
    }
    ScalarField::from_fn(grid, |x| {
        let mut envelope_r2 = 0.0;
        for xi in x.iter() {
            envelope_r2 += xi * xi;
        }
        let env: f64 = 1.0 - envelope_r2 / (r_env * r_env);
        if env <= 0.0 {
            return 0.0;
        }
        let mut total = 0.0;
        for (c, radius, amp, stretch) in &centers {
            let mut d2 = 0.0;
            for (axis, xi) in x.iter().enumerate() {
                let d = (xi - c[axis]) * stretch[axis];
                d2 += d * d;
            }
            let w: f64 = 1.0 - d2 / (radius * radius);
            if w > 0.0 {
                total += amp * w * w;
            }
        }
        -total * env * env
    })
}

/// A star-shaped random region. With `wets_wall` the blob is anchored on
/// the wall so both boundary parts are present.
pub fn random_region(grid: GridSpec, seed: u64, wets_wall: bool) -> Result<RegionSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    let l = grid.half_extent();
    let r: f64 = rng.gen_range(0.35 * l..0.55 * l);
    let mut c = [0.0f64; 3];
    for (axis, ci) in c.iter_mut().enumerate().take(dim) {
        if axis == dim - 1 {
            *ci = if wets_wall {
                rng.gen_range(0.0..0.15 * r)
            } else {
                rng.gen_range(1.3 * r..l - 1.3 * r)
            };
        } else {
            *ci = rng.gen_range(-0.2 * l..0.2 * l);
        }
    }
    // star-shaped wobble, bounded away from collapse
    let e1: f64 = rng.gen_range(-0.18..0.18);
    let e2: f64 = rng.gen_range(-0.12..0.12);
    let ph1: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let ph2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    RegionSpec::from_fn(grid, move |x| {
        let mut d = [0.0f64; 3];
        let mut rho2 = 0.0;
        for axis in 0..dim {
            d[axis] = x[axis] - c[axis];
            rho2 += d[axis] * d[axis];
        }
        let rho = rho2.sqrt();
        if rho == 0.0 {
            return -r;
        }
        let ang = d[1].atan2(d[0]);
        let mut w = 1.0 + e1 * (2.0 * ang + ph1).cos() + e2 * (3.0 * ang + ph2).cos();
        if dim == 3 {
            let polar = (d[2] / rho).clamp(-1.0, 1.0);
            w += e2 * polar * (ang + ph2).sin();
        }
        rho * w - r
    })
}

/// A random sector-like mixed problem: wall-anchored region, seeded
/// choice of angle, source, and flux family.
pub fn random_problem(grid: GridSpec, seed: u64) -> Result<MixedBVP> {
    assert_eq!(grid.cone().kind, ConeKind::HalfSpace);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let thetas = [
        std::f64::consts::FRAC_PI_4,
        std::f64::consts::FRAC_PI_2,
        2.0 * std::f64::consts::FRAC_PI_3,
        1.0,
        2.2,
    ];
    let theta = thetas[rng.gen_range(0..thetas.len())];
    let gauge = GaugeSpec::capillary(theta, grid.dim())?;
    let region = random_region(grid, seed.wrapping_mul(31).wrapping_add(7), true)?;
    let source = if rng.gen_bool(0.6) {
        SourceTerm::Constant(-(rng.gen_range(1.0..3.0f64)))
    } else {
        let amp: f64 = rng.gen_range(0.5..2.0);
        let cx: f64 = rng.gen_range(-0.3..0.3);
        SourceTerm::Field(ScalarField::from_fn(grid, |x| {
            let dx = x[0] - cx;
            -amp * (1.0 + 0.5 * (3.0 * dx).sin().abs())
        })?)
    };
    let flux = if rng.gen_bool(0.5) {
        OperatorSpec::GaugeFlux
    } else {
        let scale: f64 = rng.gen_range(0.3..1.5);
        let kx: f64 = rng.gen_range(1.0..3.0);
        OperatorSpec::ScaledGaugeFlux(ScalarField::from_fn(grid, |x| {
            scale * (0.5 + 0.5 * (kx * x[0]).cos().abs() + x[1].abs() * 0.2)
        })?)
    };
    MixedBVP::new(region, source, flux, gauge)
}
