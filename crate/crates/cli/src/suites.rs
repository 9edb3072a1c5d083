//! Named verification suites assembled from the core checks.

use std::f64::consts::{FRAC_PI_3, PI, TAU};
use std::path::Path;

use complab_core::geomlab::{
    area_ratio_monotonicity, bishop_gromov_ratio, corollary_b, matched_radius_grid, radius_grid, root_warp_concavity,
    theorem_c, verify_theorem_a,
};
use complab_core::hinge::{cosine_identity_check, hinge_grid, relative_toponogov, toponogov_check};
use complab_core::matching::{
    counterexample_sinh, hyperbolic_margin_check, hyperbolic_pairs, ratio_monotonicity_curve, verify_matching,
};
use complab_core::modelfn::{ball_volume_with, unit_sphere_measure};
use complab_core::numeric::{limit_at_zero, linspace, logspace, QuadOptions};
use complab_core::realfn::{counterexample_psi, model_difference_check, support_sense_jacobi};
use complab_core::report::CheckBuilder;
use complab_core::{
    Curvature64, Dimension, FunctionSpec64, HSchedule, Hinge64, MatchingProblem64, ModelManifold64, Tolerance,
    VerificationReport,
};

use crate::config::{GridSpec, Suite, SuiteConfig};
use crate::error::{CliError, CliResult};
use crate::family;

const IDENTITY_POINTS: usize = 1000;
const RADIUS_POINTS: usize = 64;
const HINGE_POINTS: usize = 80;
const COUNTEREXAMPLE_POINTS: usize = 512;
const FAMILY_DRAWS: usize = 3;
const HINGES_PER_PAIR: usize = 3;

pub fn run_suite(cfg: &SuiteConfig) -> CliResult<VerificationReport> {
    let mut report = match cfg.suite {
        Suite::All => {
            let mut all = VerificationReport::new("all");
            for s in Suite::members() {
                let sub = SuiteConfig {
                    suite: s,
                    ..cfg.clone()
                };
                all.absorb(s.name(), dispatch(&sub)?);
            }
            all
        }
        _ => dispatch(cfg)?,
    };
    report.suite = cfg.suite.name().into();
    report.config_echo = cfg.echo();
    Ok(report)
}

fn dispatch(cfg: &SuiteConfig) -> CliResult<VerificationReport> {
    match cfg.suite {
        Suite::ModelfnIdentities => modelfn_identities(cfg),
        Suite::Lemma21 => lemma21(cfg),
        Suite::Corollary27 => corollary27(cfg),
        Suite::Counterexamples => counterexamples(cfg),
        Suite::TheoremA => theorem_a(cfg),
        Suite::TheoremC => theorem_c_suite(cfg),
        Suite::CorollaryB => corollary_b_suite(cfg),
        Suite::BishopGromov => bishop_gromov(cfg),
        Suite::Toponogov => toponogov(cfg),
        Suite::RelativeToponogov => relative(cfg),
        Suite::All => unreachable!("handled by run_suite"),
    }
}

fn tolerance(cfg: &SuiteConfig) -> Tolerance {
    Tolerance::uniform(cfg.tol)
}

fn curvature(field: &str, v: f64) -> CliResult<Curvature64> {
    Curvature64::new(v).map_err(|e| CliError::config(field, e.to_string()))
}

fn expand(g: GridSpec) -> Vec<f64> {
    linspace(g.lo, g.hi, g.count)
}

// --- special functions -------------------------------------------------

fn modelfn_identities(cfg: &SuiteConfig) -> CliResult<VerificationReport> {
    let mut report = VerificationReport::new("modelfn-identities");
    let ks = match cfg.k {
        Some(k) => vec![k],
        None => vec![-2.0, -1.0, 0.0, 1.0, 2.0],
    };
    for kv in ks {
        report.absorb(&format!("k={kv}"), identities_for(curvature("k", kv)?));
    }
    report.absorb("volume", volume_oracles()?);
    Ok(report)
}

fn identities_for(k: Curvature64) -> VerificationReport {
    let kv = k.value();
    let top = if kv > 0.0 { k.max_radius() } else { 2.0 };
    let mut pyth = CheckBuilder::new("pythagorean", "modelfn:csn-sn-identity", Tolerance::absolute(1e-12));
    for t in linspace(0.0, top, IDENTITY_POINTS) {
        let (s, c) = (k.sn_raw(t), k.csn_raw(t));
        pyth.compare(t, (c * c + kv * s * s - 1.0).abs(), 0.0, 0.0);
    }
    let h = 1e-4;
    let mut ode = CheckBuilder::new("phi-equation", "modelfn:phi-ode", Tolerance::absolute(1e-6));
    let mut slope = CheckBuilder::new("phi-slope", "modelfn:phi-derivative", Tolerance::absolute(1e-6));
    for t in linspace(0.01 * top, 0.99 * top, IDENTITY_POINTS) {
        let (a, m, b) = (k.phi_raw(t - h), k.phi_raw(t), k.phi_raw(t + h));
        ode.compare(t, ((a + b - 2.0 * m) / (h * h) + kv * m - 1.0).abs(), 0.0, 0.0);
        slope.compare(t, ((b - a) / (2.0 * h) - k.sn_raw(t)).abs(), 0.0, 0.0);
    }
    let mut r = VerificationReport::new("identities");
    for b in [pyth, ode, slope] {
        r.push(b.finish());
    }
    r
}

fn volume_oracles() -> CliResult<VerificationReport> {
    let unit = curvature("k", 1.0)?;
    let q = QuadOptions::precise();
    let tol = Tolerance::absolute(1e-9);
    let mut r = VerificationReport::new("volume");
    let three = Dimension::new(3)?;
    let v3 = ball_volume_with(unit, three, PI, &q)?;
    let mut b = CheckBuilder::new("sphere3-total", "modelfn:ball-volume", tol);
    b.compare(PI, (v3 - 2.0 * PI * PI).abs(), 0.0, 0.0);
    r.push(b.finish());
    r.value("sphere3-total", v3);
    let mut b = CheckBuilder::new("sphere2-cap", "modelfn:ball-volume", tol);
    for t in linspace(0.0, PI, 100) {
        let v = ball_volume_with(unit, Dimension::TWO, t, &q)?;
        b.compare(t, (v - TAU * (1.0 - t.cos())).abs(), 0.0, 0.0);
    }
    r.push(b.finish());
    Ok(r)
}

// --- matching ----------------------------------------------------------

/// How a `--f` argument resolves.
enum Source {
    Model(f64),
    Sinh,
    Psi,
    File(String),
}

fn source(name: &str) -> CliResult<Source> {
    if let Some(arg) = name.strip_prefix("sn:") {
        let v = arg
            .trim()
            .parse::<f64>()
            .map_err(|_| CliError::config("f", format!("`{arg}` is not a curvature")))?;
        return Ok(Source::Model(v));
    }
    Ok(match name {
        "sinh-counterexample" | "sinh" => Source::Sinh,
        "psi-counterexample" | "psi" => Source::Psi,
        path => Source::File(path.to_string()),
    })
}

fn default_k(src: &Source, fallback: f64) -> f64 {
    match src {
        Source::Sinh => -1.0,
        Source::Psi => 1.0,
        _ => fallback,
    }
}

// length of sn_k̄: inside both conjugate radii, at most 3
fn model_end(kbar: f64, k: f64) -> f64 {
    let top = |c: f64| if c > 0.0 { PI / c.sqrt() } else { f64::INFINITY };
    (0.99 * top(kbar)).min(0.999 * top(k)).min(3.0)
}

fn function(src: &Source, k: f64) -> CliResult<FunctionSpec64> {
    Ok(match src {
        Source::Model(kb) => FunctionSpec64::model(curvature("f", *kb)?, model_end(*kb, k))?,
        Source::Sinh => counterexample_sinh(),
        Source::Psi => counterexample_psi(),
        Source::File(p) => {
            let path = Path::new(p);
            if !path.is_file() {
                return Err(CliError::File {
                    path: path.to_path_buf(),
                    source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
                });
            }
            FunctionSpec64::from_csv_path(path)?
        }
    })
}

fn problem(cfg: &SuiteConfig, default_f: &str, fallback_k: f64) -> CliResult<(MatchingProblem64, Source)> {
    let src = source(cfg.f.as_deref().unwrap_or(default_f))?;
    let kv = cfg.k.unwrap_or_else(|| default_k(&src, fallback_k));
    let f = function(&src, kv)?;
    let p = MatchingProblem64::on_domain(f, cfg.m.unwrap_or(1), curvature("k", kv)?)?;
    Ok((p, src))
}

fn matching_grid(cfg: &SuiteConfig, p: &MatchingProblem64) -> Vec<f64> {
    cfg.r_grid.map(expand).unwrap_or_else(|| p.default_grid())
}

fn admissibility_warnings(report: &mut VerificationReport, p: &MatchingProblem64) {
    for c in p.admissibility().failures() {
        report.warn(format!("{} is not admissible: {} fails", p.function().name(), c.name));
    }
}

fn lemma21(cfg: &SuiteConfig) -> CliResult<VerificationReport> {
    let tol = tolerance(cfg);
    let (p, _) = problem(cfg, "sn:2", 1.0)?;
    let mut report = VerificationReport::new("lemma21");
    admissibility_warnings(&mut report, &p);
    report.absorb("", verify_matching(&p, &matching_grid(cfg, &p), tol)?);
    if let Some(seed) = cfg.seed {
        let mut rng = family::rng(seed);
        let k = p.curvature();
        for i in 0..FAMILY_DRAWS {
            let Some(draw) = family::admissible_function(&mut rng, k, Tolerance::default())? else {
                report.warn(format!(
                    "family draw {i}: no admissible function after repeated attempts"
                ));
                continue;
            };
            let q = MatchingProblem64::on_domain(draw.f, p.power(), k)?;
            let scope = format!("family-{i}");
            let mut sub = verify_matching(&q, &q.default_grid(), tol)?;
            sub.value("kbar", draw.kbar);
            sub.value("bend", draw.bend);
            report.absorb(&scope, sub);
        }
    }
    Ok(report)
}

fn corollary27(cfg: &SuiteConfig) -> CliResult<VerificationReport> {
    let tol = tolerance(cfg);
    let (p, src) = problem(cfg, "sn:1", 0.0)?;
    let mut report = VerificationReport::new("corollary27");
    admissibility_warnings(&mut report, &p);
    report.absorb("", ratio_monotonicity_curve(&p, &matching_grid(cfg, &p), tol)?);
    if let Source::Model(kb) = src {
        if p.curvature().value() == -1.0 && kb > -1.0 && kb < 0.0 {
            let radii = logspace(1e-2, 3.0, 32);
            let pairs = hyperbolic_pairs(kb, p.power(), &radii)?;
            report.absorb("hyperbolic", hyperbolic_margin_check(kb, p.power(), &pairs)?);
        }
    }
    Ok(report)
}

fn counterexamples(cfg: &SuiteConfig) -> CliResult<VerificationReport> {
    let tol = tolerance(cfg);
    let mut report = VerificationReport::new("counterexamples");
    report.absorb("psi", psi_counterexample(tol)?);
    report.absorb("sinh", sinh_counterexample(tol)?);
    Ok(report)
}

pub fn psi_counterexample(tol: Tolerance) -> CliResult<VerificationReport> {
    let f = counterexample_psi::<f64>();
    let k = curvature("k", 1.0)?;
    let grid = linspace(0.0, PI, COUNTEREXAMPLE_POINTS + 1);
    let mut report = model_difference_check(&f, k, &grid, tol)?;
    let interior: Vec<f64> = grid[1..grid.len() - 1].to_vec();
    report.absorb(
        "",
        support_sense_jacobi(&f, k, &interior, &HSchedule::second_order(f.span()), tol),
    );
    let slope = report.values["initial-slope"];
    let psi = |t: f64| f.eval(t) - slope * k.sn_raw(t);
    report.value("psi-rise", psi(PI) - psi(0.75 * PI));
    Ok(report)
}

pub fn sinh_counterexample(tol: Tolerance) -> CliResult<VerificationReport> {
    let p = MatchingProblem64::on_domain(counterexample_sinh(), 1, curvature("k", -1.0)?)?;
    let r = p.feasible_radius();
    let grid = linspace(1e-3 * r, 0.9999 * r, COUNTEREXAMPLE_POINTS);
    let mut report = VerificationReport::new("sinh");
    report.absorb("ratios", ratio_monotonicity_curve(&p, &grid, tol)?);
    report.absorb("conclusions", verify_matching(&p, &grid, tol)?);
    let rise = |name: &str| report.check(name).map_or(f64::NAN, |c| c.max_violation);
    let (rx, fx) = (
        rise("ratios/r-over-x-nonincreasing"),
        rise("ratios/fx-ratio-nonincreasing"),
    );
    report.value("max-r-over-x-rise", rx);
    report.value("max-fx-ratio-rise", fx);
    Ok(report)
}

// --- volume comparison -------------------------------------------------

fn is_surface_name(name: &str) -> bool {
    matches!(name, "rp2" | "bump")
}

fn manifold(cfg: &SuiteConfig, default_n: u32) -> CliResult<ModelManifold64> {
    if let Some(path) = &cfg.profile {
        if !path.is_file() {
            return Err(CliError::File {
                path: path.clone(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file"),
            });
        }
        if cfg.n.is_some_and(|n| n != 2) {
            return Err(CliError::config(
                "n",
                "curvature profiles describe surfaces; n must be 2",
            ));
        }
        return Ok(ModelManifold64::from_profile(path, cfg.cut)?);
    }
    if cfg.cut.is_some() {
        return Err(CliError::config("cut", "only applies together with --profile"));
    }
    let name = cfg.model.as_deref().unwrap_or("sphere:1");
    let n = cfg.n.unwrap_or(if is_surface_name(name) { 2 } else { default_n });
    ModelManifold64::named(name, Dimension::new(n)?).map_err(|e| CliError::config("model", e.to_string()))
}

fn comparison(cfg: &SuiteConfig) -> CliResult<Curvature64> {
    curvature("k", cfg.k.unwrap_or(0.0))
}

fn theorem_a(cfg: &SuiteConfig) -> CliResult<VerificationReport> {
    let m = manifold(cfg, 2)?;
    let k = comparison(cfg)?;
    let grid = match (cfg.r, cfg.r_grid) {
        (Some(r), _) => vec![r],
        (None, Some(g)) => expand(g),
        (None, None) => matched_radius_grid(&m, k, RADIUS_POINTS)?,
    };
    Ok(verify_theorem_a(&m, k, &grid, tolerance(cfg))?)
}

fn theorem_c_suite(cfg: &SuiteConfig) -> CliResult<VerificationReport> {
    let m = manifold(cfg, 3)?;
    let k = comparison(cfg)?;
    let grid = match cfg.r_grid {
        Some(g) => expand(g),
        None => matched_radius_grid(&m, k, RADIUS_POINTS)?,
    };
    Ok(theorem_c(&m, k, &grid, tolerance(cfg))?)
}

fn corollary_b_suite(cfg: &SuiteConfig) -> CliResult<VerificationReport> {
    let m = manifold(cfg, 2)?;
    Ok(corollary_b(&m, comparison(cfg)?, cfg.r.unwrap_or(0.8), tolerance(cfg))?)
}

fn bishop_gromov(cfg: &SuiteConfig) -> CliResult<VerificationReport> {
    let m = manifold(cfg, 2)?;
    let k = comparison(cfg)?;
    let tol = tolerance(cfg);
    let grid = match cfg.r_grid {
        Some(g) => expand(g),
        None => radius_grid(&m, k, RADIUS_POINTS),
    };
    let mut report = VerificationReport::new("bishop-gromov");
    report.absorb("volume", bishop_gromov_ratio(&m, k, &grid, tol)?);
    report.absorb("area", area_ratio_monotonicity(&m, k, &grid, tol)?);
    let cut = m.cut();
    let inside: Vec<f64> = grid.iter().copied().filter(|&r| r > 0.0 && r < cut).collect();
    report.absorb("warp", root_warp_concavity(&m, k, &inside, tol)?);
    if cut < m.max_radius() {
        report.absorb("cut", cut_continuity(&m)?);
    }
    Ok(report)
}

/// At a cut radius inside the profile, the boundary area drops to zero and
/// its left limit is the uncut warp.
pub fn cut_continuity(m: &ModelManifold64) -> CliResult<VerificationReport> {
    let ModelManifold64::Surface(s) = m else {
        return Ok(VerificationReport::new("cut"));
    };
    let cut = s.cut();
    let tol = Tolerance::absolute(1e-6);
    let at = m.boundary_area(cut)?;
    let steps: Vec<(f64, f64)> = (0..6)
        .map(|i| {
            let h = 1e-3 * cut * 0.5f64.powi(i);
            Ok((h, m.boundary_area(cut - h)?))
        })
        .collect::<CliResult<_>>()?;
    let left = limit_at_zero(&steps).unwrap_or(f64::NAN);
    let expected = unit_sphere_measure::<f64>(Dimension::TWO) * s.warp().eval(cut);
    let mut report = VerificationReport::new("cut");
    let mut b = CheckBuilder::new("area-vanishes-at-cut", "cut-locus:right-value", tol);
    b.compare(cut, at.abs(), 0.0, 0.0);
    report.push(b.finish());
    let mut b = CheckBuilder::new("area-left-limit", "cut-locus:left-limit", tol);
    b.compare(cut, (left - expected).abs(), 0.0, 0.0);
    report.push(b.finish());
    report.value("area-at-cut", at);
    report.value("area-left-limit", left);
    Ok(report)
}

// --- hinges ------------------------------------------------------------

fn hinge(cfg: &SuiteConfig) -> CliResult<Hinge64> {
    Ok(Hinge64::new(
        cfg.a.unwrap_or(1.0),
        cfg.theta.unwrap_or(FRAC_PI_3),
        cfg.length.unwrap_or(1.5),
        comparison(cfg)?,
        curvature("kbar", cfg.kbar.unwrap_or(1.0))?,
    )?)
}

fn hinge_points(cfg: &SuiteConfig, l: f64) -> Vec<f64> {
    cfg.r_grid.map(expand).unwrap_or_else(|| hinge_grid(l, HINGE_POINTS))
}

const CURVATURES: [f64; 3] = [-1.0, 0.0, 1.0];

fn toponogov(cfg: &SuiteConfig) -> CliResult<VerificationReport> {
    let tol = tolerance(cfg);
    let h = hinge(cfg)?;
    let grid = hinge_points(cfg, h.l);
    let mut report = VerificationReport::new("toponogov");
    report.absorb("", toponogov_check(&h, &grid, tol)?);
    let other = if h.theta > 0.5 { h.theta / 2.0 } else { h.theta + 0.5 };
    report.absorb(
        "identity",
        cosine_identity_check(h.kbar, h.a, h.theta, other, &grid, tol)?,
    );
    if let Some(seed) = cfg.seed {
        let mut rng = family::rng(seed);
        for kb in CURVATURES {
            for kv in CURVATURES {
                for i in 0..HINGES_PER_PAIR {
                    let g = family::hinge(&mut rng, curvature("k", kv)?, curvature("kbar", kb)?)?;
                    let scope = format!("random/kbar={kb}/k={kv}/{i}");
                    report.absorb(&scope, toponogov_check(&g, &hinge_grid(g.l, HINGE_POINTS), tol)?);
                }
            }
        }
    }
    Ok(report)
}

fn relative(cfg: &SuiteConfig) -> CliResult<VerificationReport> {
    let h = hinge(cfg)?;
    let theta_bar = cfg.theta_bar.unwrap_or((h.theta + PI / 6.0).min(PI));
    let grid = hinge_points(cfg, h.l);
    Ok(relative_toponogov(&h, theta_bar, &grid, tolerance(cfg))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use complab_core::Status;

    fn cfg(suite: Suite) -> SuiteConfig {
        SuiteConfig::new(suite)
    }

    #[test]
    fn lemma21_defaults_pass() {
        let r = run_suite(&cfg(Suite::Lemma21)).unwrap();
        assert!(r.passed());
        assert_eq!(r.checks.len(), 5);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn theorem_a_single_radius() {
        let mut c = cfg(Suite::TheoremA);
        c.r = Some(1.0);
        let r = run_suite(&c).unwrap();
        assert!((r.values["rbar"] - PI / 3.0).abs() < 1e-9);
        assert_eq!(r.config_echo["r"], "1.0");
    }

    #[test]
    fn source_parsing() {
        assert!(matches!(source("sn:-0.5").unwrap(), Source::Model(v) if v == -0.5));
        assert!(matches!(source("psi").unwrap(), Source::Psi));
        assert!(source("sn:x").is_err());
        assert!(matches!(
            function(&Source::File("/no/such.csv".into()), 0.0),
            Err(CliError::File { .. })
        ));
    }

    #[test]
    fn bishop_gromov_on_rp2_reports_the_cut() {
        let mut c = cfg(Suite::BishopGromov);
        c.model = Some("rp2".into());
        let r = run_suite(&c).unwrap();
        assert!(r.passed(), "{:?}", r.failures().map(|c| &c.name).collect::<Vec<_>>());
        assert_eq!(r.check("cut/area-left-limit").unwrap().status, Status::Pass);
        assert!((r.values["cut/area-left-limit"] - TAU).abs() < 1e-6);
    }

    #[test]
    fn surfaces_reject_higher_dimension() {
        let mut c = cfg(Suite::TheoremA);
        c.model = Some("bump".into());
        c.n = Some(3);
        assert!(matches!(run_suite(&c), Err(CliError::Config { .. })));
    }
}
