//! Command-line interface: curvature decomposition, Naveira
//! classification, theorem verification, and critical-scale search on the
//! built-in or user-defined charts.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::collections::BTreeMap;
use std::process::ExitCode;
use twistor_product::catalog::{self, CatalogCheck};
use twistor_product::classify::{
    classify, critical_t_search, verify_theorems, Side, TParam, ToleranceTier,
};
use twistor_product::error::Error;
use twistor_product::report::{apply_config, parse_config_file, Report, RunConfig};
use twistor_product::sample;
use twistor_product::twistor::{MetricParams, Nu};
use twistor_product::{MetricChart, PointGeometry};

#[derive(Parser)]
#[command(
    name = "twistor-product",
    about = "Almost-product geometry on the product twistor bundle of a Riemannian four-manifold chart",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Chart id: flat, round_sphere, round_sphere_reversed, cp2,
    /// cp2_reversed, s2xs2, perturbed_flat, or custom (from --config).
    #[arg(long)]
    chart: Option<String>,
    /// Config file in the key = value format.
    #[arg(long)]
    config: Option<String>,
    /// Chart parameter, repeatable: -p radius=2.0
    #[arg(short = 'p', long = "chart-param", value_parser = parse_kv)]
    params: Vec<(String, f64)>,
    /// Base-point sampling budget.
    #[arg(long)]
    samples: Option<usize>,
    /// Fibre points per base point.
    #[arg(long)]
    kappas: Option<usize>,
    /// Argument tuples per condition.
    #[arg(long)]
    tuples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Verdict tolerance tier: analytic or fd.
    #[arg(long = "tol-tier")]
    tol_tier: Option<String>,
    /// Output path for the JSON report.
    #[arg(long)]
    out: Option<String>,
}

fn parse_kv(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got '{s}'"))?;
    let value = v
        .parse::<f64>()
        .map_err(|_| format!("bad numeric value in '{s}'"))?;
    Ok((k.trim().to_string(), value))
}

#[derive(Subcommand)]
enum Command {
    /// Print the curvature decomposition blocks at sampled points.
    Decompose {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of sample points.
        #[arg(long, default_value_t = 5)]
        points: usize,
    },
    /// Decide the Gil-Medrano conditions and emit Naveira class labels.
    Classify {
        #[command(flatten)]
        common: CommonArgs,
        /// Structure indices to classify (1..4), comma separated.
        #[arg(long, value_delimiter = ',')]
        nu: Vec<u8>,
        #[arg(long)]
        t1: Option<f64>,
        #[arg(long)]
        t2: Option<f64>,
    },
    /// Check every theorem clause over the catalog charts.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Restrict to one clause id (e.g. third-totally-geodesic).
        #[arg(long)]
        clause: Option<String>,
        /// Generic fibre scales to sample.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.37, 1.9])]
        t_grid: Vec<f64>,
    },
    /// Locate the fibre scale making a distribution totally geodesic.
    CriticalT {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        nu: u8,
        /// Distribution side: dist or perp.
        #[arg(long, default_value = "dist")]
        side: String,
        /// Which scale to vary: t1, t2 or equal.
        #[arg(long, default_value = "t1")]
        param: String,
        #[arg(long, default_value_t = 0.05)]
        lo: f64,
        #[arg(long, default_value_t = 4.0)]
        hi: f64,
    },
}

fn load_config(common: &CommonArgs) -> Result<(RunConfig, BTreeMap<String, String>), Error> {
    let mut cfg = RunConfig::default();
    let mut raw = BTreeMap::new();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)?;
        raw = parse_config_file(&text)?;
        apply_config(&raw, &mut cfg)?;
    }
    if let Some(chart) = &common.chart {
        cfg.chart = chart.clone();
    }
    for (k, v) in &common.params {
        cfg.chart_params.insert(k.clone(), *v);
    }
    if let Some(n) = common.samples {
        cfg.base_points = n;
    }
    if let Some(n) = common.kappas {
        cfg.kappas_per_point = n;
    }
    if let Some(n) = common.tuples {
        cfg.tuples = n;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if let Some(tier) = &common.tol_tier {
        cfg.tol_tier = Some(match tier.as_str() {
            "analytic" => ToleranceTier::Analytic,
            "fd" => ToleranceTier::FiniteDiff,
            other => return Err(Error::Config(format!("unknown tol tier '{other}'"))),
        });
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    Ok((cfg, raw))
}

fn resolve_chart(cfg: &RunConfig, raw: &BTreeMap<String, String>) -> Result<MetricChart, Error> {
    if cfg.chart == "custom" {
        return catalog::custom_chart_from_kv(raw);
    }
    catalog::chart_by_id(&cfg.chart, &cfg.chart_params)
}

fn tier_for(cfg: &RunConfig, chart: &MetricChart) -> ToleranceTier {
    cfg.tol_tier.unwrap_or_else(|| ToleranceTier::for_chart(chart))
}

fn emit<T: Serialize>(report: &Report<T>) -> Result<(), Error> {
    if let Some(path) = &report.config.out {
        report.write(path)?;
        eprintln!("report written to {path}");
    }
    Ok(())
}

#[derive(Serialize)]
struct DecomposeRow {
    point: [f64; 4],
    scalar: f64,
    b_norm: f64,
    w_plus_norm: f64,
    w_minus_norm: f64,
    einstein: bool,
    self_dual: bool,
    anti_self_dual: bool,
}

fn cmd_decompose(common: &CommonArgs, points: usize) -> Result<bool, Error> {
    let (mut cfg, raw) = load_config(common)?;
    let chart = resolve_chart(&cfg, &raw)?;
    let tier = tier_for(&cfg, &chart);
    let tol = tier.tol();
    cfg.nus.clear();

    let mut rows = Vec::new();
    println!(
        "{:<44} {:>10} {:>10} {:>10} {:>10}",
        "point", "s", "|B|", "|W+|", "|W-|"
    );
    for x in sample::box_points(&chart.domain, 0.12, points, 1) {
        let geom = PointGeometry::build(&chart, &x)?;
        let dec = &geom.decomposition;
        let row = DecomposeRow {
            point: x,
            scalar: dec.scalar,
            b_norm: dec.b_norm(),
            w_plus_norm: dec.w_plus.norm(),
            w_minus_norm: dec.w_minus.norm(),
            einstein: dec.is_einstein(tol),
            self_dual: dec.is_self_dual(tol),
            anti_self_dual: dec.is_anti_self_dual(tol),
        };
        println!(
            "{:<44} {:>10.6} {:>10.3e} {:>10.3e} {:>10.3e}",
            format!("{:?}", row.point),
            row.scalar,
            row.b_norm,
            row.w_plus_norm,
            row.w_minus_norm
        );
        rows.push(row);
    }
    let einstein = rows.iter().all(|r| r.einstein);
    let sd = rows.iter().all(|r| r.self_dual);
    let asd = rows.iter().all(|r| r.anti_self_dual);
    println!("einstein: {einstein}, self-dual: {sd}, anti-self-dual: {asd}");

    let digest = vec![catalog::measure_chart(&chart, points.min(8))?];
    let report = Report::new("decompose", cfg, tier, digest, rows);
    emit(&report)?;
    Ok(true)
}

fn cmd_classify(common: &CommonArgs, nus: &[u8], t1: Option<f64>, t2: Option<f64>) -> Result<bool, Error> {
    let (mut cfg, raw) = load_config(common)?;
    if !nus.is_empty() {
        cfg.nus = nus.to_vec();
    }
    if let Some(v) = t1 {
        cfg.t1 = v;
    }
    if let Some(v) = t2 {
        cfg.t2 = v;
    }
    let chart = resolve_chart(&cfg, &raw)?;
    let tier = tier_for(&cfg, &chart);
    let t = MetricParams::new(cfg.t1, cfg.t2);
    let sample_cfg = cfg.sample_config();

    let mut results = Vec::new();
    for &n in &cfg.nus {
        let nu = Nu::from_index(n).ok_or_else(|| Error::Config(format!("bad nu {n}")))?;
        let rep = classify(&chart, nu, t, &sample_cfg, tier)?;
        println!(
            "chart {} nu={} t=({}, {}): {}  [{}]",
            rep.chart_id, rep.nu, rep.t1, rep.t2, rep.label, rep.pattern
        );
        results.push(rep);
    }
    let digest = vec![catalog::measure_chart(&chart, 6)?];
    let report = Report::new("classify", cfg, tier, digest, results);
    emit(&report)?;
    Ok(true)
}

fn cmd_verify(common: &CommonArgs, clause: &Option<String>, t_grid: &[f64]) -> Result<bool, Error> {
    let (cfg, _raw) = load_config(common)?;
    let entries: Vec<catalog::CatalogEntry> = match common.chart.as_deref() {
        None | Some("all") => catalog::catalog(),
        Some(id) => catalog::catalog()
            .into_iter()
            .filter(|e| e.chart.id == id)
            .collect(),
    };
    if entries.is_empty() {
        return Err(Error::UnknownChart(
            common.chart.clone().unwrap_or_default(),
        ));
    }

    let mut digest: Vec<CatalogCheck> = Vec::new();
    for entry in &entries {
        digest.push(catalog::verify_entry(entry, 6)?);
    }

    let mut table = verify_theorems(&entries, t_grid, cfg.seed)?;
    if let Some(id) = clause {
        table.rows.retain(|r| &r.id == id);
    }
    let mut all_pass = true;
    for row in &table.rows {
        all_pass &= row.passed;
        println!(
            "[{}] {:<10} {:<22} nu={} residual={:<12.3e} {}",
            if row.passed { "PASS" } else { "FAIL" },
            row.id,
            row.chart,
            row.nu.map(|n| n.to_string()).unwrap_or_else(|| "-".into()),
            row.residual,
            row.description
        );
    }
    println!(
        "{} / {} clauses passed",
        table.rows.iter().filter(|r| r.passed).count(),
        table.rows.len()
    );
    let tier = ToleranceTier::Analytic;
    let report = Report::new("verify", cfg, tier, digest, table.rows.clone());
    emit(&report)?;
    Ok(all_pass)
}

fn cmd_critical_t(
    common: &CommonArgs,
    nu: u8,
    side: &str,
    param: &str,
    lo: f64,
    hi: f64,
) -> Result<bool, Error> {
    let (cfg, raw) = load_config(common)?;
    let chart = resolve_chart(&cfg, &raw)?;
    let nu = Nu::from_index(nu).ok_or_else(|| Error::Config(format!("bad nu {nu}")))?;
    let side = match side {
        "dist" | "d" => Side::Dist,
        "perp" | "dperp" => Side::Perp,
        other => return Err(Error::Config(format!("unknown side '{other}'"))),
    };
    let param = match param {
        "t1" => TParam::T1,
        "t2" => TParam::T2,
        "equal" => TParam::Equal,
        other => return Err(Error::Config(format!("unknown param '{other}'"))),
    };
    let found = critical_t_search(&chart, nu, side, param, (lo, hi), cfg.seed)?;
    println!(
        "critical scale for nu={} ({:?}, {:?}): t* = {:.9}, residual {:.3e}",
        found.nu, found.side, found.param, found.t_star, found.residual_at_t_star
    );
    if let Some(v) = found.six_over_s {
        println!("  6/s       = {v:.9}");
    }
    if let Some(v) = found.three_over_8chi {
        println!("  3/(8*chi) = {v:.9}");
    }
    println!("  matches: {:?}", found.matches);
    let tier = tier_for(&cfg, &chart);
    let digest = vec![catalog::measure_chart(&chart, 6)?];
    let report = Report::new("critical_t", cfg, tier, digest, found);
    emit(&report)?;
    Ok(true)
}

fn run() -> Result<bool, Error> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Decompose { common, points } => cmd_decompose(common, *points),
        Command::Classify { common, nu, t1, t2 } => cmd_classify(common, nu, *t1, *t2),
        Command::Verify {
            common,
            clause,
            t_grid,
        } => cmd_verify(common, clause, t_grid),
        Command::CriticalT {
            common,
            nu,
            side,
            param,
            lo,
            hi,
        } => cmd_critical_t(common, *nu, side, param, *lo, *hi),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_)
                | Error::UnknownChart(_)
                | Error::ExprParse(_)
                | Error::BudgetTooSmall(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
