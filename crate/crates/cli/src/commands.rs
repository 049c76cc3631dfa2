use std::f64::consts::{PI, SQRT_2};

use projlog::coarea::{alpha, area_constant, mean_log_kernel, mean_log_kernel_closed, SobolevBound};
use projlog::format::points_to_json;
use projlog::geometry::{geodesic_distance, to_chart};
use projlog::kernels::{chart_identity_residual, kernel_g};
use projlog::measures::{decompose, partition_of_unity, riesz_lp_scan, riesz_refinement, Ball, RieszOptions};
use projlog::monge_ampere::{
    ball_mass_profile, ma_density, ma_total_mass, prop25_expansion_check, BallOptions, TupleSampling,
};
use projlog::potentials::{eval_G, eval_G_eps, psh_lift, sobolev_refinement, sobolev_scan, ChartField, SobolevOptions};
use projlog::refinement::{Refinement, RefinementLevel};
use projlog::sampling::{sample_fs_uniform, subseed};
use projlog::{HomogeneousPoint, C64};

use crate::cli::{BallArgs, RieszArgs, SampleArgs, ScanArgs};
use crate::config::RunConfig;
use crate::report::{num, Artifact, Table};
use crate::CliError;

const DEFAULT_POINTS: usize = 100;

fn chart_of(cfg: &RunConfig, p: &HomogeneousPoint) -> usize {
    cfg.chart.unwrap_or_else(|| p.best_chart())
}

/// Point commands take their dimension from the measure file when one is given.
fn dimension_from_measure(cfg: &mut RunConfig) -> Result<(), CliError> {
    if cfg.measure_path.is_some() {
        cfg.load_measure()?;
    }
    Ok(())
}

pub fn kernel(cfg: &mut RunConfig) -> Result<Artifact, CliError> {
    dimension_from_measure(cfg)?;
    let pts = cfg.load_points(2 * DEFAULT_POINTS)?;
    let mut t = Table::new(["i", "j", "distance", "G", "log_sin_half_distance", "chart", "chart_residual"]);
    for (i, pair) in pts.windows(2).enumerate() {
        let (a, b) = (&pair[0], &pair[1]);
        let d = geodesic_distance(a, b)?;
        let g = kernel_g(a, b)?.value();
        let k = chart_of(cfg, a);
        let res = chart_identity_residual(a, b, k)?;
        t.push(vec![
            i.to_string(),
            (i + 1).to_string(),
            num(d),
            num(g),
            num((d / SQRT_2).sin().ln()),
            k.to_string(),
            num(res),
        ]);
    }
    Ok(Artifact::Csv(t))
}

pub fn potential(cfg: &mut RunConfig) -> Result<Artifact, CliError> {
    let mu = cfg.load_measure()?;
    let pts = cfg.load_points(DEFAULT_POINTS)?;
    let eps = cfg.eps.clone();
    let mut cols = vec!["index".to_string(), "chart".into(), "G_mu".into(), "lift".into()];
    cols.extend(eps.iter().map(|e| format!("G_mu_eps={e}")));
    let mut t = Table::new(cols);
    for (i, p) in pts.iter().enumerate() {
        let k = chart_of(cfg, p);
        let z = to_chart(p, k)?.z;
        let lift = psh_lift(&mu, k)?.value(&z);
        let mut row = vec![i.to_string(), k.to_string(), num(eval_G(&mu, p)?), num(lift)];
        for e in &eps {
            row.push(num(eval_G_eps(&mu, p, *e)?));
        }
        t.push(row);
    }
    Ok(Artifact::Csv(t))
}

pub fn measure(cfg: &mut RunConfig) -> Result<Artifact, CliError> {
    let mu = cfg.load_measure()?;
    let n = mu.dim();
    let mut cols = vec!["row".to_string(), "index".into(), "weight".into()];
    cols.extend((0..=n).map(|j| format!("chi_{j}")));
    let mut t = Table::new(cols);
    for (i, a) in mu.atoms().iter().enumerate() {
        let mut row = vec!["atom".into(), i.to_string(), num(a.weight)];
        row.extend(partition_of_unity(&a.point).into_iter().map(num));
        t.push(row);
    }
    let dec = decompose(&mu);
    for (j, m) in dec.masses.iter().enumerate() {
        let mut row = vec!["chart_mass".into(), j.to_string(), num(*m)];
        row.extend((0..=n).map(|_| String::new()));
        t.push(row);
    }
    t.note(format!("max atom mass: {}", num(mu.max_atom_mass())));
    Ok(Artifact::Csv(t))
}

fn bound_str(b: SobolevBound) -> String {
    match b {
        SobolevBound::Finite(v) => num(v),
        SobolevBound::Infinite => "inf".into(),
    }
}

fn level_rows(t: &mut Table, p: f64, levels: &[RefinementLevel]) {
    for (i, l) in levels.iter().enumerate() {
        let ratio = if i == 0 { String::new() } else { num(l.near_atom / levels[i - 1].near_atom) };
        t.push(vec![
            num(p),
            l.level.to_string(),
            num(l.log_depth),
            num(l.near_atom),
            num(l.near_atom_se),
            num(l.total),
            ratio,
        ]);
    }
}

const LEVEL_COLUMNS: [&str; 7] = ["p", "level", "log_depth", "near_atom", "near_atom_se", "total", "ratio"];

pub fn sobolev(cfg: &mut RunConfig, args: &ScanArgs) -> Result<Artifact, CliError> {
    let mu = cfg.load_measure()?;
    let n = mu.dim() as f64;
    let ps = if args.p.is_empty() { vec![1.0, 2.0 * n - 1.0] } else { args.p.clone() };
    let mut opts = SobolevOptions::new(cfg.seed, cfg.samples.unwrap_or(if args.refine { 4_000 } else { 20_000 }));
    if let Some(h) = cfg.h {
        opts.h = h;
    }
    if args.refine {
        let mut t = Table::new(LEVEL_COLUMNS);
        for p in ps {
            level_rows(&mut t, p, &sobolev_refinement(&mu, p, opts, &Refinement::default())?);
        }
        return Ok(Artifact::Csv(t));
    }
    let mut t = Table::new([
        "p", "estimate", "std_error", "near_atom", "near_atom_se", "bulk", "bulk_se", "log_depth", "analytic_bound",
    ]);
    for p in ps {
        let s = sobolev_scan(&mu, p, opts)?;
        t.push(vec![
            num(p),
            num(s.estimate),
            num(s.std_error),
            num(s.near_atom),
            num(s.near_atom_se),
            num(s.bulk),
            num(s.bulk_se),
            num(s.log_depth),
            bound_str(s.bound),
        ]);
    }
    Ok(Artifact::Csv(t))
}

pub fn riesz(cfg: &mut RunConfig, args: &RieszArgs) -> Result<Artifact, CliError> {
    let mu = cfg.load_measure()?;
    let n = mu.dim();
    let k = cfg.chart.unwrap_or(0);
    let nu = mu.in_chart(k)?;
    let ball = Ball::new(vec![C64::new(0.0, 0.0); n], args.radius)?;
    let ps = if args.scan.p.is_empty() { vec![1.0] } else { args.scan.p.clone() };
    let opts = RieszOptions::new(cfg.seed, cfg.samples.unwrap_or(if args.scan.refine { 4_000 } else { 40_000 }));
    let mut t;
    if args.scan.refine {
        t = Table::new(LEVEL_COLUMNS);
        for p in ps {
            level_rows(&mut t, p, &riesz_refinement(&nu, args.alpha, p, &ball, opts, &Refinement::default())?);
        }
    } else {
        t = Table::new(["p", "estimate", "std_error", "near_atom", "near_atom_se", "bulk", "bulk_se", "log_depth"]);
        for p in ps {
            let s = riesz_lp_scan(&nu, args.alpha, p, &ball, opts)?;
            t.push(vec![
                num(p),
                num(s.estimate),
                num(s.std_error),
                num(s.near_atom),
                num(s.near_atom_se),
                num(s.bulk),
                num(s.bulk_se),
                num(s.log_depth),
            ]);
        }
    }
    t.note(format!("chart: {k}, alpha: {}, ball: |z| < {}", args.alpha, args.radius));
    Ok(Artifact::Csv(t))
}

pub fn ma_density_cmd(cfg: &mut RunConfig) -> Result<Artifact, CliError> {
    let mu = cfg.load_measure()?;
    let pts = cfg.load_points(DEFAULT_POINTS)?;
    let h = cfg.h_or(1e-4);
    // eps = 0 is the unregularized potential
    let eps = cfg.eps_or(&[0.0]);
    let mut t = Table::new(["index", "chart", "eps", "density", "clipped"]);
    for (i, p) in pts.iter().enumerate() {
        let k = chart_of(cfg, p);
        let z = to_chart(p, k)?.z;
        for e in &eps {
            let d = ma_density(&mu, k, &z, h, *e)?;
            t.push(vec![i.to_string(), k.to_string(), num(*e), num(d.density), d.clipped.to_string()]);
        }
    }
    Ok(Artifact::Csv(t))
}

pub fn ma_mass(cfg: &mut RunConfig) -> Result<Artifact, CliError> {
    let mu = cfg.load_measure()?;
    let grid = cfg.grid.unwrap_or(match mu.dim() {
        1 => 256,
        2 => 48,
        _ => 16,
    });
    let h = cfg.h_or(1e-3);
    let mut t = Table::new(["eps", "total_mass", "volume", "negative_clips", "points_per_axis", "charts"]);
    for e in cfg.eps_or(&[0.3]) {
        let r = ma_total_mass(&mu, grid, h, e)?;
        let charts = r.grid.map(|g| g.charts).unwrap_or(0);
        t.push(vec![
            num(e),
            num(r.total_mass),
            num(r.volume),
            r.negative_clips.to_string(),
            grid.to_string(),
            charts.to_string(),
        ]);
    }
    Ok(Artifact::Csv(t))
}

pub fn ball_profile(cfg: &mut RunConfig, args: &BallArgs) -> Result<Artifact, CliError> {
    let mu = cfg.load_measure()?;
    let center = mu.atoms()[0].point.clone();
    let h = cfg.h_or(1e-3);
    let eps = cfg.eps_or(&[0.3, 0.1, 0.03]);
    let opts = BallOptions { seed: cfg.seed, ..BallOptions::default() };
    let reports = ball_mass_profile(&mu, &center, &args.radii, h, &eps, opts)?;
    let mut t = Table::new(["eps", "radius", "mass", "ratio", "excised_singular_mass", "negative_clips"]);
    for r in &reports {
        for b in &r.ball_profile {
            t.push(vec![
                num(r.eps),
                num(b.radius),
                num(b.mass),
                num(b.ratio),
                num(r.excised_singular_mass),
                r.negative_clips.to_string(),
            ]);
        }
    }
    t.note("center: atoms[0]");
    Ok(Artifact::Csv(t))
}

pub fn prop25(cfg: &mut RunConfig) -> Result<Artifact, CliError> {
    let mu = cfg.load_measure()?;
    let k = cfg.chart.unwrap_or(0);
    let nu = mu.in_chart(k)?;
    let pts = cfg.load_points(20)?;
    let h = cfg.h_or(1e-4);
    let sampling = TupleSampling { seed: subseed(cfg.seed, 3), samples: 100_000 };
    let mut t = Table::new(["index", "lhs", "rhs", "residual", "relative_residual", "terms", "sampled_se"]);
    for (i, p) in pts.iter().enumerate() {
        let z = to_chart(p, k)?.z;
        let r = prop25_expansion_check(&nu, &z, h, Some(sampling))?;
        t.push(vec![
            i.to_string(),
            num(r.lhs),
            num(r.rhs),
            num(r.residual),
            num(r.relative_residual()),
            r.terms.to_string(),
            r.sampled_se.map(num).unwrap_or_default(),
        ]);
    }
    t.note(format!("chart: {k}"));
    Ok(Artifact::Csv(t))
}

pub fn constants(cfg: &RunConfig) -> Result<Artifact, CliError> {
    let n = cfg.n;
    let mut t = Table::new([
        "n",
        "c_n",
        "alpha_n",
        "mean_log_kernel_quadrature",
        "mean_log_kernel_closed",
        "diameter",
        "sobolev_critical_p",
    ]);
    t.push(vec![
        n.to_string(),
        num(area_constant(n)),
        num(alpha(n)),
        num(mean_log_kernel(n)?),
        num(mean_log_kernel_closed(n)),
        num(PI / SQRT_2),
        num(2.0 * n as f64),
    ]);
    Ok(Artifact::Csv(t))
}

pub fn sample(cfg: &mut RunConfig, args: &SampleArgs) -> Result<Artifact, CliError> {
    dimension_from_measure(cfg)?;
    let n = cfg.n;
    let pts = sample_fs_uniform(subseed(cfg.seed, 2), cfg.samples.unwrap_or(DEFAULT_POINTS), n);
    if args.json {
        let mut v: serde_json::Value = serde_json::from_str(&points_to_json(n, &pts)).expect("valid json");
        v["meta"] = serde_json::json!({
            "command": "sample",
            "library_version": projlog::VERSION,
            "seed": cfg.seed,
            "samples": pts.len(),
        });
        return Ok(Artifact::Json(serde_json::to_string_pretty(&v).expect("serializable")));
    }
    let mut cols = vec!["index".to_string()];
    for j in 0..=n {
        cols.push(format!("re_{j}"));
        cols.push(format!("im_{j}"));
    }
    let mut t = Table::new(cols);
    for (i, p) in pts.iter().enumerate() {
        let mut row = vec![i.to_string()];
        for c in p.coords() {
            row.push(num(c.re));
            row.push(num(c.im));
        }
        t.push(row);
    }
    Ok(Artifact::Csv(t))
}
