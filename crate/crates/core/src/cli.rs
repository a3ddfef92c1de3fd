//! Command-line front end. `dispatch` returns the process exit code.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage (bad flags, config, files).

use crate::asymptotics::{q_asym, AsymOptions, Convention, BOUNDARY_MARGIN};
use crate::error::{Error, Result};
use crate::harness::{compare_samples, simulate_rays, CompareOptions};
use crate::pde::{init_field, FieldState, Solver, SolverConfig};
use crate::phase::{check_sign_regions, default_lens_angle, saddle_points, signature_grid, Window};
use crate::scattering::{analyze, GridSpec, InitialDatum, JostOptions, ScatteringData};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::path::{Path, PathBuf};

/// Everything a run depends on. Written next to the outputs as `run.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    /// "tanh", "tanh+gaussian(a,x0,w)" or a CSV path
    pub data: String,
    /// half-width of the window used for the Jost integration
    pub half_width: f64,
    pub out: Option<PathBuf>,
    pub xi: Vec<f64>,
    pub xi_range: Option<String>,
    pub t_range: Option<String>,
    pub convention: Convention,
    pub jost_h: f64,
    pub angular_resolution: usize,
    pub window: [f64; 4],
    pub nx: usize,
    pub ny: usize,
    /// sign-table samples per sector for `signature`, 0 to skip
    pub check_samples: usize,
    pub seed: u64,
    pub fit_window: (f64, f64),
    pub margin: f64,
    pub solver: SolverConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: String::new(),
            data: "tanh+gaussian(0.2,0,2)".into(),
            half_width: 15.0,
            out: None,
            xi: Vec::new(),
            xi_range: None,
            t_range: None,
            convention: Convention::Normalized,
            jost_h: JostOptions::default().h,
            angular_resolution: 200,
            window: [-3.0, 3.0, -2.0, 2.0],
            nx: 120,
            ny: 80,
            check_samples: 0,
            seed: 0,
            fit_window: (20.0, 80.0),
            margin: BOUNDARY_MARGIN,
            solver: SolverConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&s).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Rays from `xi` followed by `xi_range`.
    pub fn rays(&self) -> Result<Vec<f64>> {
        let mut v = self.xi.clone();
        if let Some(r) = &self.xi_range {
            v.extend(parse_range(r)?);
        }
        Ok(v)
    }

    pub fn times(&self) -> Result<Vec<f64>> {
        match &self.t_range {
            Some(r) => parse_range(r),
            None => Ok(Vec::new()),
        }
    }
}

/// "a:b:n" -> n evenly spaced values from a to b inclusive.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let p: Vec<&str> = s.split(':').collect();
    let bad = || Error::Config(format!("range {s:?}: expected a:b:n"));
    if p.len() != 3 {
        return Err(bad());
    }
    let a: f64 = p[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = p[1].trim().parse().map_err(|_| bad())?;
    let n: usize = p[2].trim().parse().map_err(|_| bad())?;
    match n {
        0 => Err(bad()),
        1 => Ok(vec![a]),
        _ => Ok((0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()),
    }
}

/// 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Parser, Debug)]
#[command(name = "dmkdv", version, about = "Defocusing mKdV on a nonzero background: scattering, asymptotics, reference solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Reflection coefficient on the real line and the discrete spectrum
    Scatter(Common),
    /// Saddle points of the phase
    Saddle(Common),
    /// Asymptotic field along rays
    Asym(Common),
    /// Run the reference solver and dump snapshots
    Simulate(Common),
    /// Simulate, sample rays, compare with the asymptotics
    Compare(Common),
    /// Sign table of Im theta on a grid
    Signature(SigArgs),
}

#[derive(Args, Debug, Default)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// preset or CSV path
    #[arg(long)]
    data: Option<String>,
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    xi: Vec<f64>,
    #[arg(long, allow_hyphen_values = true)]
    xi_range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t_range: Option<String>,
    /// key=value, keys: solver, jost_h
    #[arg(long)]
    tol: Vec<String>,
    #[arg(long, value_parser = ["printed", "normalized"])]
    convention: Option<String>,
}

#[derive(Args, Debug)]
struct SigArgs {
    #[command(flatten)]
    common: Common,
    /// re_min,re_max,im_min,im_max
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',', num_args = 1)]
    window: Vec<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    check_samples: Option<usize>,
}

fn merge(name: &str, c: &Common) -> Result<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if !cfg.command.is_empty() && cfg.command != name {
        return Err(Error::Config(format!("config is for `{}`, not `{name}`", cfg.command)));
    }
    cfg.command = name.into();
    if let Some(o) = &c.out {
        cfg.out = Some(o.clone());
    }
    if let Some(d) = &c.data {
        cfg.data = d.clone();
    }
    if !c.xi.is_empty() {
        cfg.xi = c.xi.clone();
        cfg.xi_range = None;
    }
    if let Some(r) = &c.xi_range {
        parse_range(r)?;
        cfg.xi_range = Some(r.clone());
    }
    if let Some(r) = &c.t_range {
        parse_range(r)?;
        cfg.t_range = Some(r.clone());
    }
    if let Some(v) = &c.convention {
        cfg.convention = if v == "printed" { Convention::Printed } else { Convention::Normalized };
    }
    for kv in &c.tol {
        let (k, v) = kv.split_once('=').ok_or_else(|| Error::Config(format!("--tol {kv}: expected key=value")))?;
        let v: f64 = v.parse().map_err(|_| Error::Config(format!("--tol {kv}: bad number")))?;
        match k {
            "solver" => cfg.solver.tol = v,
            "jost_h" => cfg.jost_h = v,
            _ => return Err(Error::Config(format!("--tol: unknown key {k}"))),
        }
    }
    Ok(cfg)
}

/// Parse argv (including the program name) and run. Returns the exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let res = match &cli.cmd {
        Cmd::Scatter(c) => merge("scatter", c).and_then(|cfg| run(&cfg, scatter)),
        Cmd::Saddle(c) => merge("saddle", c).and_then(|cfg| run(&cfg, saddle)),
        Cmd::Asym(c) => merge("asym", c).and_then(|cfg| run(&cfg, asym)),
        Cmd::Simulate(c) => merge("simulate", c).and_then(|cfg| run(&cfg, simulate)),
        Cmd::Compare(c) => merge("compare", c).and_then(|cfg| run(&cfg, compare)),
        Cmd::Signature(s) => merge("signature", &s.common).and_then(|mut cfg| {
            if !s.window.is_empty() {
                cfg.window = s.window.as_slice().try_into().map_err(|_| Error::Config("--window needs four numbers".into()))?;
            }
            cfg.nx = s.nx.unwrap_or(cfg.nx);
            cfg.ny = s.ny.unwrap_or(cfg.ny);
            cfg.check_samples = s.check_samples.unwrap_or(cfg.check_samples);
            run(&cfg, signature)
        }),
    };
    match res {
        Ok(()) => 0,
        Err(e) => {
            let usage = matches!(e, Error::Config(_) | Error::Io(_));
            let kind = format!("{e:?}");
            let kind = kind.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error");
            eprintln!("{}", json!({ "error": kind, "message": e.to_string() }));
            if usage {
                2
            } else {
                1
            }
        }
    }
}

/// A named table: file stem, header, rows.
struct Table {
    name: &'static str,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

type Outcome = (Vec<Table>, serde_json::Value);

fn run(cfg: &RunConfig, f: fn(&RunConfig) -> Result<Outcome>) -> Result<()> {
    let (tables, mut summary) = f(cfg)?;
    summary["command"] = json!(cfg.command);
    match &cfg.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let mut files = Vec::new();
            for t in &tables {
                let p = dir.join(format!("{}.csv", t.name));
                write_csv(&p, t)?;
                files.push(p.display().to_string());
            }
            std::fs::write(dir.join("run.toml"), cfg.to_toml()?)?;
            summary["outputs"] = json!(files);
            std::fs::write(dir.join("summary.json"), serde_json::to_string_pretty(&summary).map_err(|e| Error::Io(e.to_string()))?)?;
        }
        None => {
            let mut w = csv::Writer::from_writer(std::io::stdout());
            if let Some(t) = tables.first() {
                w.write_record(&t.header)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
            }
            w.flush()?;
            eprintln!("{summary}");
        }
    }
    Ok(())
}

fn write_csv(p: &Path, t: &Table) -> Result<()> {
    let mut w = csv::Writer::from_path(p)?;
    w.write_record(&t.header)?;
    for r in &t.rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

fn datum(cfg: &RunConfig) -> Result<InitialDatum> {
    InitialDatum::parse(&cfg.data, cfg.half_width)
}

fn scattering(cfg: &RunConfig) -> Result<ScatteringData> {
    analyze(&datum(cfg)?, &GridSpec::default(), cfg.angular_resolution, JostOptions { h: cfg.jost_h })
}

fn need_rays(cfg: &RunConfig) -> Result<Vec<f64>> {
    let r = cfg.rays()?;
    if r.is_empty() {
        return Err(Error::Config("no rays: pass --xi or --xi-range".into()));
    }
    Ok(r)
}

fn need_times(cfg: &RunConfig) -> Result<Vec<f64>> {
    let t = cfg.times()?;
    if t.is_empty() {
        return Err(Error::Config("no times: pass --t-range".into()));
    }
    Ok(t)
}

fn scatter(cfg: &RunConfig) -> Result<Outcome> {
    let sd = scattering(cfg)?;
    let mut rows = Vec::with_capacity(sd.z_grid.len());
    for (i, &z) in sd.z_grid.iter().enumerate() {
        let (r, a) = (sd.r_values[i], sd.a_values[i]);
        rows.push(vec![fmt(z), fmt(r.re), fmt(r.im), fmt(r.norm()), fmt(a.re), fmt(a.im), "numeric".into()]);
    }
    let spec: Vec<Vec<String>> = sd
        .eta
        .iter()
        .zip(&sd.c)
        .map(|(e, c)| vec![fmt(e.re), fmt(e.im), fmt(c.re), fmt(c.im), "numeric".into()])
        .collect();
    let summary = json!({
        "datum": sd.datum,
        "grid_points": sd.z_grid.len(),
        "max_abs_r": sd.max_abs_r(),
        "eigenvalues": sd.eta.iter().map(|e| [e.re, e.im]).collect::<Vec<_>>(),
        "fixed_zero_residual": sd.fixed_zero.map(|f| f.residual),
    });
    Ok((
        vec![
            Table { name: "scatter", header: vec!["z", "re_r", "im_r", "abs_r", "re_a", "im_a", "provenance"], rows },
            Table { name: "spectrum", header: vec!["re_eta", "im_eta", "re_c", "im_c", "provenance"], rows: spec },
        ],
        summary,
    ))
}

fn saddle(cfg: &RunConfig) -> Result<Outcome> {
    let mut rows = Vec::new();
    let mut regions = Vec::new();
    for xi in need_rays(cfg)? {
        let ctx = saddle_points(xi)?;
        regions.push(json!({ "xi": xi, "region": ctx.region.as_str() }));
        for j in 0..4 {
            let (s, tpp) = (ctx.saddles[j], ctx.theta_pp[j]);
            rows.push(vec![
                fmt(xi),
                ctx.region.as_str().into(),
                (j + 1).to_string(),
                fmt(s.re),
                fmt(s.im),
                fmt(ctx.epsilons[j]),
                fmt(tpp.re),
                fmt(tpp.im),
                "closed_form".into(),
            ]);
        }
    }
    let header = vec!["xi", "region", "j", "re_saddle", "im_saddle", "eps", "re_theta_pp", "im_theta_pp", "provenance"];
    Ok((vec![Table { name: "saddle", header, rows }], json!({ "rays": regions })))
}

fn asym(cfg: &RunConfig) -> Result<Outcome> {
    let sd = scattering(cfg)?;
    let rays = need_rays(cfg)?;
    let times = need_times(cfg)?;
    let solitons = if sd.fixed_zero.is_some() { vec![0.0] } else { Vec::new() };
    let o = AsymOptions { convention: cfg.convention, solitons, margin: Some(cfg.margin) };
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &xi in &rays {
        for &t in &times {
            match q_asym(&sd, xi * t, t, &o) {
                Ok(e) => rows.push(vec![
                    fmt(xi),
                    fmt(t),
                    fmt(e.x),
                    e.region.as_str().into(),
                    fmt(e.q_asym),
                    fmt(e.im_f),
                    format!("{:?}", e.error_order),
                    "asymptotic".into(),
                ]),
                Err(Error::NearBoundary { .. }) => {
                    skipped.push(xi);
                    break;
                }
                Err(e) => return Err(e),
            }
        }
    }
    let header = vec!["xi", "t", "x", "region", "q_asym", "im_f", "error_order", "provenance"];
    let summary = json!({ "datum": sd.datum, "convention": cfg.convention.as_str(), "skipped_near_boundary": skipped });
    Ok((vec![Table { name: "asym", header, rows }], summary))
}

fn simulate(cfg: &RunConfig) -> Result<Outcome> {
    let q0 = datum(cfg)?;
    let times = need_times(cfg)?;
    let mut state: FieldState = init_field(&q0, &cfg.solver)?;
    let mass0 = crate::pde::conserved_quantities(&state);
    let mut solver = Solver::new(cfg.solver.clone())?;
    let mut rows = Vec::new();
    let mut log = Vec::new();
    for &t in &times {
        solver.advance(&mut state, t)?;
        for (x, q) in state.x.iter().zip(&state.q) {
            rows.push(vec![fmt(t), fmt(*x), fmt(*q), "numeric".into()]);
        }
        let qmax = state.q.iter().fold(0.0f64, |m, q| m.max(q.abs()));
        log.push(vec![fmt(t), fmt(crate::pde::conserved_quantities(&state)), fmt(qmax), "numeric".into()]);
    }
    let st = solver.stats;
    let summary = json!({
        "datum": q0.describe(),
        "initial_mass": mass0,
        "accepted": st.accepted,
        "rejected": st.rejected,
        "dt_min": st.dt_min,
        "dt_max": st.dt_max,
    });
    Ok((
        vec![
            Table { name: "field", header: vec!["t", "x", "q", "provenance"], rows },
            Table { name: "log", header: vec!["t", "mass", "max_abs_q", "provenance"], rows: log },
        ],
        summary,
    ))
}

fn compare(cfg: &RunConfig) -> Result<Outcome> {
    let q0 = datum(cfg)?;
    let rays = need_rays(cfg)?;
    let times = need_times(cfg)?;
    let sd = scattering(cfg)?;
    let (samples, _) = simulate_rays(&q0, &cfg.solver, &rays, &times, 10.0)?;
    let opts = CompareOptions { convention: cfg.convention, fit_window: cfg.fit_window, solver_tol: cfg.solver.tol, margin: cfg.margin };
    let rep = compare_samples(&samples, &sd, &opts)?;
    let rows = rep
        .rows
        .iter()
        .map(|r| vec![fmt(r.xi), fmt(r.t), fmt(r.x), fmt(r.q_num), fmt(r.q_asym), fmt(r.abs_err), "numeric|asymptotic".into()])
        .collect();
    let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
    let fits = rep
        .rays
        .iter()
        .map(|s| {
            vec![
                fmt(s.xi),
                s.region.clone(),
                opt(s.slope),
                opt(s.r2),
                s.n_fit.to_string(),
                opt(s.envelope_num),
                opt(s.envelope_asym),
                opt(s.envelope_rel_err),
                "fitted".into(),
            ]
        })
        .collect();
    let summary = json!({ "datum": sd.datum, "convention": cfg.convention.as_str(), "rays": rep.rays });
    Ok((
        vec![
            Table { name: "compare", header: vec!["xi", "t", "x", "q_num", "q_asym", "abs_err", "provenance"], rows },
            Table {
                name: "fits",
                header: vec!["xi", "region", "slope", "r2", "n_fit", "envelope_num", "envelope_asym", "envelope_rel_err", "provenance"],
                rows: fits,
            },
        ],
        summary,
    ))
}

fn signature(cfg: &RunConfig) -> Result<Outcome> {
    let rays = need_rays(cfg)?;
    let [a, b, c, d] = cfg.window;
    let w = Window { re_min: a, re_max: b, im_min: c, im_max: d };
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &xi in &rays {
        for cell in signature_grid(xi, w, cfg.nx, cfg.ny)? {
            let s = cell.sign.map(|s| s.to_string()).unwrap_or_else(|| "0".into());
            rows.push(vec![fmt(xi), fmt(cell.z.re), fmt(cell.z.im), s, "closed_form".into()]);
        }
        if cfg.check_samples > 0 {
            let ctx = saddle_points(xi)?;
            let phi = default_lens_angle(&ctx, &[]);
            let rep = check_sign_regions(xi, phi, cfg.check_samples, &[], cfg.seed)?;
            checks.push(json!({ "xi": xi, "phi": phi, "samples_per_sector": rep.samples_per_sector, "violations": rep.violations.len() }));
        }
    }
    let header = vec!["xi", "re_z", "im_z", "sign_im_theta", "provenance"];
    Ok((vec![Table { name: "signature", header, rows }], json!({ "nx": cfg.nx, "ny": cfg.ny, "sign_checks": checks })))
}
