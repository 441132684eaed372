use std::path::Path;

use reslab_core::exponent::{parse_grid, parse_rational, Exponent, Rational};
use reslab_core::measure::{cantor, circle, dirac, interval, random_flat, uniform, RandomFlatParams};
use reslab_core::probe::{restriction_norm, sweep, ExtensionOperator, SweepGrid, SweepOverlay, SweepRow};
use reslab_core::regularity::{
    ahlfors_alpha, billingsley_gamma, default_scales, exponent_identity, fourier_beta, knapp_bound, mockenhaupt_p0,
    theorem_range, RegularityReport,
};
use reslab_core::spectral::{convolve_power_with, density_norm, fourier, FourierMethod};
use reslab_core::verify::{run_suite, Suite, SuiteParams};
use reslab_core::{DiscreteMeasure, Error as CoreError};
use serde::Serialize;

use crate::args::{
    AnalyzeArgs, ConvArgs, ExponentsArgs, Kind, NewArgs, ProbeArgs, ReflectArgs, SuiteArg, SweepArgs, VerifyArgs,
};
use crate::context::Context;
use crate::error::{usage, CliError, CliResult};

fn exponent(flag: &str, s: &str) -> CliResult<Exponent> {
    s.parse().map_err(|e: CoreError| usage(format!("--{flag}: {e}")))
}

fn rational(flag: &str, s: &str) -> CliResult<Rational> {
    parse_rational(s).map_err(|e| usage(format!("--{flag}: {e}")))
}

fn required<T: Copy>(v: Option<T>, flag: &str, kind: &str) -> CliResult<T> {
    v.ok_or_else(|| usage(format!("--{flag} is required for --kind {kind}")))
}

fn describe(mu: &DiscreteMeasure) -> String {
    let g = mu.grid();
    format!("dim = {}, N = {}, atoms = {}", g.dim, g.n, mu.len())
}

pub fn measure_new(ctx: &Context, a: &NewArgs) -> CliResult<()> {
    let n = a.n;
    match a.kind {
        Kind::Interval | Kind::Cantor | Kind::RandomFlat if a.dim != 1 => {
            return Err(usage("this kind is one-dimensional; use --dim 1"));
        }
        Kind::Circle if a.dim != 2 => return Err(usage("--kind circle needs --dim 2")),
        _ => {}
    }
    let mu = match a.kind {
        Kind::Dirac => {
            let index = a.index.clone().unwrap_or_else(|| vec![0; a.dim]);
            dirac(a.dim, required(n, "N", "dirac")?, &index)?
        }
        Kind::Uniform => uniform(a.dim, required(n, "N", "uniform")?)?,
        Kind::Interval => {
            let n = required(n, "N", "interval")?;
            interval(n, a.start.unwrap_or(0), required(a.len, "len", "interval")?)?
        }
        Kind::Cantor => cantor(a.base, &a.digits, required(a.stage, "stage", "cantor")?)?,
        Kind::RandomFlat => {
            let params = RandomFlatParams {
                n: required(n, "N", "random-flat")?,
                m: required(a.m, "m", "random-flat")?,
                seed: ctx.config.seed,
                c: a.c,
                max_retries: a.max_retries,
            };
            random_flat(&params)?
        }
        Kind::Circle => circle(required(n, "N", "circle")?, required(a.radius, "radius", "circle")?)?,
    };
    save_measure(ctx, &mu, &a.out)
}

fn save_measure(ctx: &Context, mu: &DiscreteMeasure, out: &Path) -> CliResult<()> {
    let text = mu.to_json(Some(ctx.config.hash()))?;
    let path = ctx.write(out, text.as_bytes())?;
    println!("wrote {} ({})", path.display(), describe(mu));
    if let Some(cert) = &mu.meta().flatness {
        println!(
            "flatness certificate ratio = {:.4}, max/mean = {:.4}, retries = {}",
            cert.certificate_ratio, cert.flatness_ratio, cert.retries
        );
    }
    Ok(())
}

pub fn measure_reflect(ctx: &Context, a: &ReflectArgs) -> CliResult<()> {
    let mu = ctx.load_measure(&a.measure)?;
    save_measure(ctx, &mu.reflect(), &a.out)
}

#[derive(Serialize)]
struct Analysis<'a> {
    dim: usize,
    #[serde(rename = "N")]
    n: usize,
    constructor: &'a reslab_core::measure::Constructor,
    regularity: RegularityReport,
}

pub fn analyze(ctx: &Context, a: &AnalyzeArgs) -> CliResult<()> {
    if !a.alpha && a.beta.is_none() && !a.gamma {
        return Err(usage("pick at least one of --alpha, --beta K, --gamma"));
    }
    let mu = ctx.load_measure(&a.measure)?;
    let tol = &ctx.config.tolerances;
    let scales = a.scales.clone().unwrap_or_else(|| default_scales(mu.n()));
    let mut rep = RegularityReport::default();
    if a.alpha {
        let est = ahlfors_alpha(&mu, &scales, tol)?;
        println!("alpha_hat = {:.4}{}", est.alpha_hat, unreliable(est.max_mass.unreliable));
        rep.alpha_hat = Some(est.alpha_hat);
        rep.alpha = Some(est);
    }
    if let Some(k) = a.beta {
        let spec = fourier(&mu, k, FourierMethod::Auto)?;
        let est = fourier_beta(&spec, a.annulus_base, tol)?;
        println!(
            "beta_hat = {:.4} (annulus average {:.4}){}",
            est.beta_hat,
            est.beta_hat_average,
            unreliable(est.sup.unreliable)
        );
        rep.beta_hat = Some(est.beta_hat);
        rep.beta = Some(est);
    }
    if a.gamma {
        let est = billingsley_gamma(&mu, &scales, tol)?;
        println!("gamma_hat = {:.4} at {:?}{}", est.gamma_hat, est.center, unreliable(est.at_center.unreliable));
        rep.gamma_hat = Some(est.gamma_hat);
        rep.gamma = Some(est);
    }
    let g = mu.grid();
    let payload = Analysis { dim: g.dim, n: g.n, constructor: &mu.meta().constructor, regularity: rep };
    let path = ctx.write_json(&a.out, &payload)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn unreliable(flag: bool) -> &'static str {
    if flag {
        " [unreliable fit]"
    } else {
        ""
    }
}

pub fn conv(ctx: &Context, a: &ConvArgs) -> CliResult<()> {
    if a.n == 0 {
        return Err(usage("-n must be at least 1"));
    }
    let r = exponent("r", &a.r)?;
    r.require_lebesgue("r")?;
    let mu = ctx.load_measure(&a.measure)?;
    let measures = match &a.resolutions {
        None => vec![mu],
        Some(list) => list
            .iter()
            .map(|&n| mu.meta().constructor.rebuild(mu.dim(), mu.n(), n, mu.meta().seed))
            .collect::<Result<Vec<_>, _>>()?,
    };
    let mut w = csv::Writer::from_writer(ctx.header().csv_comment().into_bytes());
    w.write_record(["N", "n", "r", "density_norm"]).map_err(csv_failure)?;
    for m in &measures {
        let v = density_norm(&convolve_power_with(m, a.n, &ctx.config.tolerances)?, r)?;
        w.write_record([m.n().to_string(), a.n.to_string(), r.key(), v.to_string()]).map_err(csv_failure)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Failure(e.to_string()))?;
    print!("{}", String::from_utf8_lossy(&bytes));
    if let Some(out) = &a.out {
        ctx.write(out, &bytes)?;
    }
    Ok(())
}

fn csv_failure(e: csv::Error) -> CliError {
    CliError::Failure(e.to_string())
}

pub fn exponents(a: &ExponentsArgs) -> CliResult<()> {
    let r = exponent("r", &a.r)?;
    let range = theorem_range(a.n, r)?;
    let q_max = match range.q_divisor() {
        Some(d) if d == Rational::from_integer(1) => "p'".to_string(),
        Some(d) => format!("p'/{d}"),
        None => "inf at p = 1, 0 otherwise".to_string(),
    };
    println!("p_max = {}, q_max(p) = {q_max}", range.p_max);
    if !range.feasible {
        println!("no admissible q at p_max (p'/(n r') < 1)");
    }
    let p = a.p.as_deref().map(|s| exponent("p", s)).transpose()?;
    if let Some(p) = p {
        p.require_lebesgue("p")?;
        let inside = p <= range.p_max;
        println!("q_max({p}) = {}{}", range.q_max(p), if inside { "" } else { " (p above p_max)" });
        if inside && range.q_max(p).is_lebesgue() {
            println!("exponent identity: {}", if exponent_identity(a.n, r, p)? { "holds" } else { "fails" });
        }
    }
    if let Some(d) = a.d {
        match (&a.alpha, &a.beta) {
            (Some(al), Some(be)) => {
                let p0 = mockenhaupt_p0(d, rational("alpha", al)?, rational("beta", be)?)?;
                println!("p0(d = {d}, alpha = {al}, beta = {be}) = {p0}");
            }
            (None, None) => {}
            _ => return Err(usage("--alpha and --beta go together")),
        }
        if let Some(g) = &a.gamma {
            let p = p.ok_or_else(|| usage("--gamma needs --p"))?;
            let bound = knapp_bound(d, rational("gamma", g)?, p)?;
            println!("necessary condition: q <= {bound} at p = {p}");
        }
    } else if a.alpha.is_some() || a.beta.is_some() || a.gamma.is_some() {
        return Err(usage("--alpha, --beta and --gamma need --d"));
    }
    Ok(())
}

pub fn probe(ctx: &Context, a: &ProbeArgs) -> CliResult<()> {
    let p = exponent("p", &a.p)?;
    let q = exponent("q", &a.q)?;
    let mu = ctx.load_measure(&a.measure)?;
    let mut cfg = ctx.config.probe.clone();
    if let Some(v) = a.restarts {
        cfg.restarts = v;
    }
    if let Some(v) = a.iters {
        cfg.max_iters = v;
    }
    if let Some(v) = a.tol {
        cfg.tol = v;
    }
    let op = ExtensionOperator::assemble(&mu, a.x, &ctx.config.budgets)?;
    let res = restriction_norm(&op, p, q, &cfg, None)?;
    println!(
        "norm >= {:.12} at (p, q) = ({p}, {q}), X = {} ({} starts, {})",
        res.norm_lower_bound,
        a.x,
        res.restarts_used,
        if res.converged { "converged" } else { "iteration cap reached" }
    );
    let path = ctx.write_json(&a.out, &res)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn sweep_cmd(ctx: &Context, a: &SweepArgs) -> CliResult<()> {
    let ps = parse_grid(&a.p_grid).map_err(|e| usage(format!("--p-grid: {e}")))?;
    let qs = parse_grid(&a.q_grid).map_err(|e| usage(format!("--q-grid: {e}")))?;
    let r = exponent("r", &a.r)?;
    let mu = ctx.load_measure(&a.measure)?;
    let cfg = &ctx.config;
    let gamma_hat = billingsley_gamma(&mu, &default_scales(mu.n()), &cfg.tolerances)
        .ok()
        .map(|g| g.gamma_hat);
    let overlay = SweepOverlay { theorem: Some(theorem_range(a.n, r)?), gamma_hat };
    let total = ps.len() * qs.len();
    let done = std::sync::atomic::AtomicUsize::new(0);
    let progress = |row: &SweepRow| {
        let k = done.fetch_add(1, std::sync::atomic::Ordering::Relaxed) + 1;
        eprintln!("[{k}/{total}] p = {}, q = {}: slope {:.4} ({})", row.p, row.q, row.slope, row.class.as_str());
    };
    let grid = sweep(&mu, &ps, &qs, &a.x, &cfg.probe, &cfg.tolerances, &cfg.budgets, overlay, Some(&progress))?;
    let bytes = sweep_csv(ctx, &grid)?;
    let path = ctx.write(&a.out, &bytes)?;
    println!("wrote {} ({} cells)", path.display(), grid.rows.len());
    Ok(())
}

fn sweep_csv(ctx: &Context, grid: &SweepGrid) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(ctx.header().csv_comment().into_bytes());
    w.write_record(SweepGrid::csv_header(&grid.x_values)).map_err(csv_failure)?;
    for rec in grid.csv_records() {
        w.write_record(rec).map_err(csv_failure)?;
    }
    w.into_inner().map_err(|e| CliError::Failure(e.to_string()))
}

fn suite_of(s: SuiteArg) -> Suite {
    match s {
        SuiteArg::Hy => Suite::Hy,
        SuiteArg::Chain => Suite::Chain,
        SuiteArg::RegularityTransfer => Suite::RegularityTransfer,
        SuiteArg::FourierSums => Suite::FourierSums,
        SuiteArg::AutocorrelationGrowth => Suite::AutocorrelationGrowth,
        SuiteArg::Knapp => Suite::Knapp,
        SuiteArg::Bilinear => Suite::Bilinear,
        SuiteArg::Expid => Suite::Expid,
    }
}

pub fn verify(ctx: &Context, a: &VerifyArgs) -> CliResult<()> {
    let suite = suite_of(a.suite);
    let mut params = SuiteParams { seed: ctx.config.seed, ..SuiteParams::default() };
    if let Some(v) = a.trials {
        params.trials = v;
    }
    if let Some(v) = a.n {
        params.n = v;
    }
    if let Some(v) = &a.r {
        params.r = exponent("r", v)?;
    }
    params.p = a.p.as_deref().map(|s| exponent("p", s)).transpose()?;
    params.q = a.q.as_deref().map(|s| exponent("q", s)).transpose()?;
    if let Some(v) = &a.epsilons {
        params.epsilons = v.clone();
    }
    params.gamma = a.gamma;
    if let Some(v) = &a.s_values {
        params.s_values = v.clone();
    }
    params.k_values = a.k_values.clone();
    params.scales = a.scales.clone();
    if let Some(v) = a.amplitude {
        params.amplitude = v;
    }
    if let Some(v) = a.hy_n {
        params.hy_n = v;
    }
    let mu = match &a.measure {
        Some(path) => Some(ctx.load_measure(path)?),
        None if suite.needs_measure() => return Err(usage(format!("suite {suite} needs --measure"))),
        None => None,
    };
    let report = run_suite(suite, mu.as_ref(), &params, &ctx.config.tolerances)?;
    let path = ctx.write_json(&a.out, &report)?;
    println!(
        "suite {suite}: {} instances, {} failing -> {}",
        report.instances.len(),
        report.failures,
        if report.passed { "pass" } else { "FAIL" }
    );
    println!("wrote {}", path.display());
    if report.passed {
        Ok(())
    } else {
        Err(CliError::Failure(format!("suite {suite} failed on {} instances", report.failures)))
    }
}
