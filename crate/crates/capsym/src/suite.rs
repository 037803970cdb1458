//! The verification battery: every inequality and identity the library
//! implements, run end to end at fixed tolerances on seeded corpora.
//! `run_all` is the reproduction entry point used by both the CLI
//! `suite` command and the acceptance tests.

use crate::cone::ConeSpec;
use crate::corpus::{random_problem, random_region, smooth_bump_field};
use crate::energy::{
    normalization_residual, polya_szego_report, sobolev_extremal,
    sobolev_extremal_substituted, sobolev_quotient,
};
use crate::error::Result;
use crate::gauge::{monte_carlo_kappa, wulff_sector_volume, GaugeSpec, VolumeMethod};
use crate::geometry::{grid_volume, isoperimetric_check, region_measures};
use crate::grid::{GridSpec, RegionSpec, ScalarField};
use crate::pde::{
    explicit_radial_solution, linfty_bound_check, radial_profile_solution, solve_mixed,
    talenti_compare, MixedBVP, OperatorSpec, SolverOptions, SourceTerm,
};
use crate::rearrange::{
    capillary_symmetrize, distribution_function, increasing_rearrangement,
    rearranged_constant_source, rearranged_source,
};
use crate::sublevel::{sublevel_integrals, sublevel_volumes};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const PI: f64 = std::f64::consts::PI;
const ANGLES: [f64; 3] = [PI / 4.0, PI / 2.0, 2.0 * PI / 3.0];

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub details: String,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    /// One line per criterion, `PASS`/`FAIL` first.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            out.push_str(&format!(
                "[{}] criterion {:2} {:28} {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.index,
                c.name,
                c.details
            ));
        }
        out
    }
}

/// Runs every criterion; each prints through the returned report only.
pub fn run_all() -> SuiteReport {
    let runners: Vec<fn() -> Result<CriterionResult>> = vec![
        c1_duality,
        c2_wulff_ball,
        c3_free_energy,
        c4_isoperimetric,
        c5_equimeasurability,
        c6_polya_szego,
        c7_explicit_solution,
        c8_talenti,
        c9_linfty_bound,
        c10_profile_oracle,
        c11_sobolev,
        c12_hardy_littlewood,
    ];
    let criteria = runners
        .into_iter()
        .enumerate()
        .map(|(i, f)| {
            f().unwrap_or_else(|e| CriterionResult {
                index: i + 1,
                name: "internal error",
                passed: false,
                details: format!("criterion failed to run: {e}"),
            })
        })
        .collect();
    SuiteReport { criteria }
}

fn c1_duality() -> Result<CriterionResult> {
    let mut max_f = 0.0f64;
    let mut max_g = 0.0f64;
    for n in [2usize, 3] {
        for (k, &theta) in ANGLES.iter().enumerate() {
            let gauge = GaugeSpec::capillary(theta, n)?;
            let mut rng = ChaCha8Rng::seed_from_u64(100 + (n * 10 + k) as u64);
            let mut done = 0usize;
            while done < 1000 {
                let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let norm2: f64 = x.iter().map(|v| v * v).sum();
                if norm2 < 1e-6 {
                    continue;
                }
                done += 1;
                let dg = gauge.dual_grad(&x)?;
                max_f = max_f.max((gauge.eval(&dg)? - 1.0).abs());
                let fg = gauge.grad(&dg)?;
                let fo = gauge.dual(&x)?;
                let mut dev2 = 0.0;
                for i in 0..n {
                    let d = fg[i] - x[i] / fo;
                    dev2 += d * d;
                }
                max_g = max_g.max(dev2.sqrt());
            }
        }
    }
    let passed = max_f <= 1e-8 && max_g <= 1e-8;
    Ok(CriterionResult {
        index: 1,
        name: "gauge duality identities",
        passed,
        details: format!("max |F(dF°)-1| = {max_f:.2e}, max |dF(dF°)-x/F°| = {max_g:.2e}"),
    })
}

fn c2_wulff_ball() -> Result<CriterionResult> {
    let mut disagreements = 0usize;
    let mut checked = 0usize;
    for n in [2usize, 3] {
        for (k, &theta) in ANGLES.iter().enumerate() {
            let gauge = GaugeSpec::capillary(theta, n)?;
            let c = gauge.cos_theta();
            let mut rng = ChaCha8Rng::seed_from_u64(200 + (n * 10 + k) as u64);
            for _ in 0..100_000 {
                let mut x = [0.0f64; 3];
                for xi in x.iter_mut().take(n) {
                    *xi = rng.gen_range(-2.0..2.0);
                }
                let r: f64 = rng.gen_range(0.1..2.0);
                x[n - 1] += 0.0;
                let mut shifted2 = 0.0;
                for (i, xi) in x.iter().enumerate().take(n) {
                    let v = if i == n - 1 { xi + r * c } else { *xi };
                    shifted2 += v * v;
                }
                let dist = shifted2.sqrt();
                if (dist - r).abs() < 1e-10 {
                    continue;
                }
                checked += 1;
                let by_gauge = gauge.dual(&x[..n])? < r;
                if by_gauge != (dist < r) {
                    disagreements += 1;
                }
            }
        }
    }
    Ok(CriterionResult {
        index: 2,
        name: "Wulff ball = off-center ball",
        passed: disagreements == 0,
        details: format!("{disagreements} disagreements over {checked} samples"),
    })
}

struct GeometryCase {
    region: RegionSpec,
    gauge: GaugeSpec,
}

fn geometry_corpus() -> Result<Vec<GeometryCase>> {
    let grid2 = GridSpec::new(ConeSpec::half_space(2)?, 1.5, 1.0 / 256.0)?;
    let grid3 = GridSpec::new(ConeSpec::half_space(3)?, 1.0, 1.0 / 64.0)?;
    let mut cases = Vec::new();
    for seed in 0..10u64 {
        let theta = ANGLES[seed as usize % 3];
        let wets = seed % 2 == 0;
        cases.push(GeometryCase {
            region: random_region(grid2, seed, wets)?,
            gauge: GaugeSpec::capillary(theta, 2)?,
        });
    }
    for seed in 0..10u64 {
        let theta = ANGLES[(seed as usize + 1) % 3];
        let wets = seed % 2 == 1;
        cases.push(GeometryCase {
            region: random_region(grid3, 100 + seed, wets)?,
            gauge: GaugeSpec::capillary(theta, 3)?,
        });
    }
    Ok(cases)
}

fn c3_free_energy() -> Result<CriterionResult> {
    let cases = geometry_corpus()?;
    let devs: Vec<f64> = cases
        .par_iter()
        .map(|case| {
            let m = region_measures(&case.region, Some(&case.gauge)).unwrap();
            let aniso = m.anisotropic.unwrap();
            let free = m.perimeter - case.gauge.cos_theta() * m.wetting;
            (aniso - free).abs() / aniso.max(free).max(1e-12)
        })
        .collect();
    let worst = devs.iter().cloned().fold(0.0, f64::max);
    Ok(CriterionResult {
        index: 3,
        name: "free-energy identity",
        passed: worst <= 0.02,
        details: format!("worst relative deviation {worst:.4} over {} regions", devs.len()),
    })
}

fn c4_isoperimetric() -> Result<CriterionResult> {
    let cases = geometry_corpus()?;
    let slacks: Vec<(f64, f64)> = cases
        .par_iter()
        .map(|case| {
            let rep = isoperimetric_check(&case.region, &case.gauge).unwrap();
            (rep.slack, rep.bound)
        })
        .collect();
    let corpus_ok = slacks.iter().all(|(s, b)| *s >= -0.02 * b);
    let min_rel = slacks
        .iter()
        .map(|(s, b)| s / b)
        .fold(f64::INFINITY, f64::min);

    // Wulff sectors: equality within tolerance, improving under
    // refinement
    let mut sector_ok = true;
    let mut sector_details = String::new();
    let sector_cases: [(usize, f64, f64, f64, f64); 2] = [
        (2, PI / 3.0, 1.0, 1.5, 1.0 / 256.0),
        (3, 2.0 * PI / 3.0, 0.75, 1.25, 1.0 / 64.0),
    ];
    for (n, theta, r, l, h) in sector_cases {
        let gauge = GaugeSpec::capillary(theta, n)?;
        let mut rels = Vec::new();
        for hh in [h, h / 2.0] {
            let grid = GridSpec::new(ConeSpec::half_space(n)?, l, hh)?;
            let region = RegionSpec::from_fn(grid, |x| gauge.dual_unchecked(x) - r)?;
            let rep = isoperimetric_check(&region, &gauge)?;
            rels.push(rep.slack.abs() / rep.bound);
        }
        let within = rels.iter().all(|&x| x <= 0.02);
        let decreasing = rels[1] <= (0.8 * rels[0]).max(1e-4);
        if !(within && decreasing) {
            sector_ok = false;
        }
        sector_details.push_str(&format!(
            " [n={n}: |slack|/bound {:.2e} -> {:.2e}]",
            rels[0], rels[1]
        ));
    }
    Ok(CriterionResult {
        index: 4,
        name: "isoperimetric inequality",
        passed: corpus_ok && sector_ok,
        details: format!("min slack/bound {min_rel:.4};{sector_details}"),
    })
}

/// Thresholds whose sublevel sets carry between 2 and 98 percent of the
/// support volume; degenerate levels make the relative comparison
/// meaningless.
fn solid_thresholds(u: &ScalarField, count: usize) -> Result<Vec<f64>> {
    let umin = u.min_value();
    let cands: Vec<f64> = (0..3 * count)
        .map(|k| umin * (1.0 - (k as f64 + 0.5) / (3 * count) as f64))
        .collect();
    let mut sorted = cands.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let vols = sublevel_volumes(u, &sorted)?;
    let total = vols[vols.len() - 1];
    let picked: Vec<f64> = sorted
        .iter()
        .zip(&vols)
        .filter(|(_, &v)| v >= 0.02 * total && v <= 0.98 * total)
        .map(|(t, _)| *t)
        .collect();
    let stride = (picked.len() / count).max(1);
    Ok(picked.into_iter().step_by(stride).take(count).collect())
}

fn c5_equimeasurability() -> Result<CriterionResult> {
    let grid = GridSpec::new(ConeSpec::half_space(2)?, 1.5, 1.0 / 128.0)?;
    let cases: Vec<(u64, f64)> = (0..10u64)
        .flat_map(|seed| ANGLES.iter().map(move |&t| (seed, t)))
        .collect();
    let worst: Vec<(f64, usize)> = cases
        .par_iter()
        .map(|&(seed, theta)| {
            let u = smooth_bump_field(grid, 500 + seed).unwrap();
            let us = capillary_symmetrize(&u, theta, 256).unwrap();
            let ts = solid_thresholds(&u, 20).unwrap();
            let vu = sublevel_volumes(&u, &ts).unwrap();
            let vs = sublevel_volumes(&us, &ts).unwrap();
            let mut w = 0.0f64;
            for (a, b) in vu.iter().zip(&vs) {
                w = w.max((a - b).abs() / a);
            }
            (w, ts.len())
        })
        .collect();
    let max_dev = worst.iter().map(|(w, _)| *w).fold(0.0, f64::max);
    let min_levels = worst.iter().map(|(_, l)| *l).min().unwrap_or(0);
    Ok(CriterionResult {
        index: 5,
        name: "capillary equimeasurability",
        passed: max_dev <= 0.01 && min_levels >= 20,
        details: format!(
            "max sublevel-volume deviation {max_dev:.4} over {} cases",
            worst.len()
        ),
    })
}

fn c6_polya_szego() -> Result<CriterionResult> {
    let grid = GridSpec::new(ConeSpec::half_space(2)?, 1.5, 1.0 / 64.0)?;
    let cases: Vec<(u64, f64)> = (0..50u64).map(|s| (s, ANGLES[s as usize % 3])).collect();
    let slacks: Vec<f64> = cases
        .par_iter()
        .flat_map_iter(|&(seed, theta)| {
            let u = smooth_bump_field(grid, 900 + seed).unwrap();
            let gauge = GaugeSpec::capillary(theta, 2).unwrap();
            [1.0, 2.0, 3.0].into_iter().map(move |p| {
                let rep = polya_szego_report(&u, &gauge, p, 256).unwrap();
                (rep.lhs - rep.rhs) / rep.lhs.max(1e-12)
            })
        })
        .collect();
    let min_slack = slacks.iter().cloned().fold(f64::INFINITY, f64::min);
    let random_ok = min_slack >= -0.02;

    // equality within tolerance on anisotropically radial inputs
    let mut eq_worst = 0.0f64;
    for &theta in &ANGLES {
        let gauge = GaugeSpec::capillary(theta, 2)?;
        let u = ScalarField::from_fn(grid, |x| {
            let d = gauge.dual_unchecked(x);
            ((d * d - 1.0) / 2.0).min(0.0)
        })?;
        for p in [1.0, 2.0, 3.0] {
            let rep = polya_szego_report(&u, &gauge, p, 256)?;
            eq_worst = eq_worst.max((rep.lhs - rep.rhs).abs() / rep.lhs);
        }
    }
    Ok(CriterionResult {
        index: 6,
        name: "Polya-Szego principle",
        passed: random_ok && eq_worst <= 0.02,
        details: format!(
            "min slack {min_slack:.4} over {} runs; radial equality gap {eq_worst:.4}",
            slacks.len()
        ),
    })
}

fn c7_explicit_solution() -> Result<CriterionResult> {
    let theta = PI / 3.0;
    let mut errs = Vec::new();
    for h in [1.0 / 64.0, 1.0 / 128.0] {
        let grid = GridSpec::new(ConeSpec::half_space(2)?, 1.25, h)?;
        let gauge = GaugeSpec::capillary(theta, 2)?;
        let region = RegionSpec::from_fn(grid, |x| gauge.dual_unchecked(x) - 1.0)?;
        let problem = MixedBVP::new(
            region,
            SourceTerm::Constant(-2.0),
            OperatorSpec::GaugeFlux,
            gauge,
        )?;
        let out = solve_mixed(&problem, &SolverOptions::default())?;
        let exact = explicit_radial_solution(theta, 1.0, &grid)?;
        let mut err = 0.0f64;
        for (a, b) in out.field.values().iter().zip(exact.values()) {
            err = err.max((a - b).abs());
        }
        errs.push(err);
    }
    // sup norm of the exact solution is 1/2
    let within = errs[0] <= 0.03 * 0.5;
    let improving = errs[1] <= errs[0] / 1.5;
    Ok(CriterionResult {
        index: 7,
        name: "explicit radial solution",
        passed: within && improving,
        details: format!("max error {:.2e} -> {:.2e} under refinement", errs[0], errs[1]),
    })
}

fn talenti_problems() -> Result<Vec<MixedBVP>> {
    let grid2 = GridSpec::new(ConeSpec::half_space(2)?, 1.5, 1.0 / 64.0)?;
    let grid3 = GridSpec::new(ConeSpec::half_space(3)?, 1.25, 1.0 / 16.0)?;
    let mut problems = Vec::new();
    for seed in 0..16u64 {
        problems.push(random_problem(grid2, seed)?);
    }
    // translated sector, exact equality case
    {
        let theta = PI / 3.0;
        let gauge = GaugeSpec::capillary(theta, 2)?;
        let c = gauge.cos_theta();
        let region = RegionSpec::from_fn(grid2, |x| {
            let dx = x[0] - 0.3;
            (dx * dx + (x[1] + 0.8 * c) * (x[1] + 0.8 * c)).sqrt() - 0.8
        })?;
        problems.push(MixedBVP::new(
            region,
            SourceTerm::Constant(-2.0),
            OperatorSpec::GaugeFlux,
            gauge,
        )?);
    }
    // scaled flux on a sector
    {
        let theta = 2.2;
        let gauge = GaugeSpec::capillary(theta, 2)?;
        let region = RegionSpec::from_fn(grid2, |x| gauge.dual_unchecked(x) - 0.7)?;
        let cfield = ScalarField::constant(grid2, 1.0)?;
        problems.push(MixedBVP::new(
            region,
            SourceTerm::Constant(-2.0),
            OperatorSpec::ScaledGaugeFlux(cfield),
            gauge,
        )?);
    }
    for seed in [3u64, 8] {
        problems.push(random_problem(grid3, 300 + seed)?);
    }
    Ok(problems)
}

fn c8_talenti() -> Result<CriterionResult> {
    let problems = talenti_problems()?;
    for p in &problems {
        p.flux
            .check_ellipticity(&p.gauge, p.grid(), 200, 0xe11)?;
    }
    let results: Vec<(usize, f64, f64)> = problems
        .par_iter()
        .map(|p| {
            let rep = talenti_compare(p, &SolverOptions::default(), 256).unwrap();
            (
                rep.violations,
                rep.min_slack / rep.linf_bound.max(1e-12),
                rep.z_profile_mismatch / rep.linf_bound.max(1e-12),
            )
        })
        .collect();
    let violations: usize = results.iter().map(|r| r.0).sum();
    let worst_slack = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let worst_profile = results.iter().map(|r| r.2).fold(0.0f64, f64::max);
    Ok(CriterionResult {
        index: 8,
        name: "Talenti comparison",
        passed: violations == 0 && worst_profile <= 0.03,
        details: format!(
            "{} problems, {violations} violations, min slack/|z| {worst_slack:.4}, \
             profile cross-check {worst_profile:.4}",
            results.len()
        ),
    })
}

fn c9_linfty_bound() -> Result<CriterionResult> {
    let grid = GridSpec::new(ConeSpec::half_space(2)?, 1.5, 1.0 / 64.0)?;
    let mut cases: Vec<(MixedBVP, bool)> = Vec::new();
    for seed in 40..46u64 {
        let theta = ANGLES[seed as usize % 3];
        let gauge = GaugeSpec::capillary(theta, 2)?;
        let region = random_region(grid, seed, true)?;
        cases.push((
            MixedBVP::new(
                region,
                SourceTerm::Constant(-2.0),
                OperatorSpec::GaugeFlux,
                gauge,
            )?,
            false,
        ));
    }
    for (theta, r) in [(PI / 3.0, 1.0), (2.2, 0.7)] {
        let gauge = GaugeSpec::capillary(theta, 2)?;
        let region = RegionSpec::from_fn(grid, |x| gauge.dual_unchecked(x) - r)?;
        cases.push((
            MixedBVP::new(
                region,
                SourceTerm::Constant(-2.0),
                OperatorSpec::GaugeFlux,
                gauge,
            )?,
            true,
        ));
    }
    let reports: Vec<(crate::pde::LinftyReport, bool)> = cases
        .par_iter()
        .map(|(p, sector)| {
            (
                linfty_bound_check(p, &SolverOptions::default()).unwrap(),
                *sector,
            )
        })
        .collect();
    let respected = reports.iter().all(|(r, _)| r.linf <= 1.01 * r.bound);
    let tight = reports
        .iter()
        .filter(|(_, sector)| *sector)
        .all(|(r, _)| r.tight);
    let worst = reports
        .iter()
        .map(|(r, _)| r.linf / r.bound)
        .fold(0.0f64, f64::max);
    Ok(CriterionResult {
        index: 9,
        name: "sup-norm bound",
        passed: respected && tight,
        details: format!(
            "max linf/bound {worst:.4} over {} problems; attained on sectors",
            reports.len()
        ),
    })
}

fn c10_profile_oracle() -> Result<CriterionResult> {
    let theta = 2.0 * PI / 3.0;
    let grid = GridSpec::new(ConeSpec::half_space(2)?, 1.5, 1.0 / 64.0)?;
    let gauge = GaugeSpec::capillary(theta, 2)?;
    let r = 0.9;
    let region = RegionSpec::from_fn(grid, |x| gauge.dual_unchecked(x) - r)?;
    let problem = MixedBVP::new(
        region,
        SourceTerm::Constant(-2.0),
        OperatorSpec::GaugeFlux,
        gauge,
    )?;
    let vol = grid_volume(&problem.region)?;
    let out = solve_mixed(&problem, &SolverOptions::default())?;
    let mut uv = out.field.values().to_vec();
    for v in uv.iter_mut() {
        *v = v.min(0.0);
    }
    let u = ScalarField::new(grid, uv)?;
    let mu = distribution_function(&u, 512)?;
    let u_star = increasing_rearrangement(&mu)?;
    let kappa = wulff_sector_volume(&gauge, &grid.cone(), VolumeMethod::Analytic)?.kappa;
    let f_star = rearranged_constant_source(-2.0, vol)?;
    let z_star = radial_profile_solution(&f_star, vol, 2, kappa)?;
    let mut sup = 0.0f64;
    let mut z_sup = 0.0f64;
    for k in 0..=400 {
        let s = vol * (0.05 + 0.95 * k as f64 / 400.0);
        sup = sup.max((u_star.eval(s) - z_star.eval(s)).abs());
        z_sup = z_sup.max(z_star.eval(s).abs());
    }
    Ok(CriterionResult {
        index: 10,
        name: "radial profile oracle",
        passed: sup <= 0.03 * z_sup,
        details: format!("sup |u_* - z_*| = {sup:.2e} against |z_*| = {z_sup:.2e}"),
    })
}

fn c11_sobolev() -> Result<CriterionResult> {
    let mut worst_sigma = 0.0f64;
    let mut worst_resid = 0.0f64;
    for (n, p) in [(2usize, 1.5), (3usize, 2.0)] {
        for &theta in &ANGLES {
            let a = sobolev_extremal(theta, p, n)?;
            let b = sobolev_extremal_substituted(theta, p, n)?;
            worst_sigma = worst_sigma.max((a.sigma - b.sigma).abs() / a.sigma);
            worst_resid = worst_resid.max(normalization_residual(theta, p, n, a.sigma)?.abs());
        }
    }
    let schemes_ok = worst_sigma <= 1e-4 && worst_resid <= 1e-6;

    // the truncated extremal nearly attains the constant
    let p = 1.5;
    let grid = GridSpec::new(ConeSpec::half_space(2)?, 36.0, 1.0 / 16.0)?;
    let mut worst_attain = f64::INFINITY;
    let mut exceed = 0.0f64;
    for &theta in &ANGLES {
        let ext = sobolev_extremal(theta, p, 2)?;
        let gauge = GaugeSpec::capillary(theta, 2)?;
        let rho_cut = 30.0;
        let cut = ext.eval_radial(rho_cut);
        let u = ScalarField::from_fn(grid, |x| {
            let rho = gauge.dual_unchecked(x);
            if rho < rho_cut {
                ext.eval_radial(rho) - cut
            } else {
                0.0
            }
        })?;
        let q = sobolev_quotient(&u, theta, p)?;
        worst_attain = worst_attain.min(q / ext.constant);
        exceed = exceed.max(q / ext.constant);
    }

    // random compactly supported fields never exceed the constant
    let small = GridSpec::new(ConeSpec::half_space(2)?, 1.5, 1.0 / 64.0)?;
    let quotients: Vec<f64> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let theta = ANGLES[seed as usize % 3];
            let ext = sobolev_extremal(theta, p, 2).unwrap();
            let u = smooth_bump_field(small, 1300 + seed).unwrap();
            sobolev_quotient(&u, theta, p).unwrap() / ext.constant
        })
        .collect();
    let max_quotient = quotients.iter().cloned().fold(0.0, f64::max);
    let passed = schemes_ok
        && worst_attain >= 0.97
        && exceed <= 1.01
        && max_quotient <= 1.01;
    Ok(CriterionResult {
        index: 11,
        name: "sharp Sobolev inequality",
        passed,
        details: format!(
            "sigma schemes within {worst_sigma:.2e}, residual {worst_resid:.2e}, \
             extremal attains {worst_attain:.4} of C, random max {max_quotient:.4}"
        ),
    })
}

fn c12_hardy_littlewood() -> Result<CriterionResult> {
    let grid = GridSpec::new(ConeSpec::half_space(2)?, 1.5, 1.0 / 128.0)?;
    let devs: Vec<f64> = (0..10u64)
        .into_par_iter()
        .map(|seed| {
            let u = smooth_bump_field(grid, 1500 + seed).unwrap();
            let f = smooth_bump_field(grid, 1600 + seed).unwrap();
            let neg_f =
                ScalarField::new(grid, f.values().iter().map(|v| -v).collect()).unwrap();
            let f_star = rearranged_source(&f, 512).unwrap();
            let mu = distribution_function(&u, 512).unwrap();
            let ts = solid_thresholds(&u, 20).unwrap();
            let lhs = sublevel_integrals(&u, &ts, &neg_f).unwrap();
            let mut worst = f64::NEG_INFINITY;
            for (l, t) in lhs.iter().zip(&ts) {
                let rhs = -f_star.integral(0.0, mu.eval(*t));
                worst = worst.max((l - rhs) / rhs.abs().max(1e-12));
            }
            worst
        })
        .collect();
    let worst = devs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(CriterionResult {
        index: 12,
        name: "Hardy-Littlewood step",
        passed: worst <= 0.01,
        details: format!("max (lhs-rhs)/rhs = {worst:.4} over {} pairs", devs.len()),
    })
}

/// Monte-Carlo versus analytic sector constants; used by the CLI gauge
/// command to report both routes.
pub fn sector_constants_cross_check(gauge: &GaugeSpec, cone: &ConeSpec) -> Result<(f64, f64, f64)> {
    let analytic = wulff_sector_volume(gauge, cone, VolumeMethod::Analytic)?;
    let mc = monte_carlo_kappa(
        gauge,
        cone,
        crate::gauge::DEFAULT_MC_SAMPLES,
        crate::gauge::DEFAULT_MC_SEED,
    );
    Ok((analytic.kappa, mc.value, mc.std_err))
}

#[cfg(test)]
mod tests {
    use super::*;

    // the full battery runs in the dedicated acceptance test; here only
    // the cheap plumbing
    #[test]
    fn report_rendering() {
        let rep = SuiteReport {
            criteria: vec![CriterionResult {
                index: 1,
                name: "x",
                passed: true,
                details: "ok".into(),
            }],
        };
        assert!(rep.passed());
        assert!(rep.render().contains("[PASS]"));
    }

    #[test]
    fn solid_thresholds_have_mass() {
        let grid = GridSpec::new(ConeSpec::half_space(2).unwrap(), 1.5, 1.0 / 64.0).unwrap();
        let u = smooth_bump_field(grid, 3).unwrap();
        let ts = solid_thresholds(&u, 20).unwrap();
        assert_eq!(ts.len(), 20);
        let vols = sublevel_volumes(&u, &ts).unwrap();
        let total = sublevel_volumes(&u, &[0.0]).unwrap()[0];
        for v in vols {
            assert!(v >= 0.015 * total && v <= 0.99 * total);
        }
    }
}
