//! Aligning simulated fields with the asymptotic formulas along rays x = xi t.

use crate::asymptotics::{AsymOptions, Convention, LeftField, BOUNDARY_MARGIN};
use crate::error::{Error, Result};
use crate::pde::{FieldState, Solver, SolverConfig};
use num_complex::Complex64 as C;
use crate::phase::{classify_region, Region};
use crate::scattering::{InitialDatum, ScatteringData};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Least-squares slope of log err against log t over `window`, with r^2.
pub fn fit_decay_slope(series: &[(f64, f64)], window: (f64, f64)) -> Result<(f64, f64)> {
    let pts: Vec<(f64, f64)> = series
        .iter()
        .filter(|(t, _)| *t >= window.0 && *t <= window.1)
        .map(|&(t, e)| (t, e))
        .collect();
    if pts.len() < 5 {
        return Err(Error::Precondition(format!("{} points in the fit window, need 5", pts.len())));
    }
    if let Some(p) = pts.iter().find(|(t, e)| !(*e > 0.0) || !(*t > 0.0)) {
        return Err(Error::Precondition(format!("non-positive value in fit window at t = {}", p.0)));
    }
    let n = pts.len() as f64;
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx <= 0.0 {
        return Err(Error::Precondition("degenerate window: all t equal".into()));
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok((slope, r2))
}

/// Interior local maxima of a sampled series (plateaus count once).
pub fn local_maxima(series: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 1..series.len().saturating_sub(1) {
        let (a, b, c) = (series[i - 1].1, series[i].1, series[i + 1].1);
        if b > a && b >= c {
            out.push(series[i]);
        }
    }
    out
}

/// Largest sample in each consecutive block [t0 + k w, t0 + (k + 1) w).
pub fn block_maxima(series: &[(f64, f64)], width: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    let Some(t0) = series.first().map(|p| p.0) else { return out };
    let mut cur: Option<(i64, (f64, f64))> = None;
    for &p in series {
        let k = ((p.0 - t0) / width).floor() as i64;
        match cur {
            Some((kc, best)) if kc == k => {
                if p.1 > best.1 {
                    cur = Some((k, p));
                }
            }
            Some((_, best)) => {
                out.push(best);
                cur = Some((k, p));
            }
            None => cur = Some((k, p)),
        }
    }
    // a trailing partial block would bias the fit
    if let Some((k, best)) = cur {
        if series.last().unwrap().0 - (t0 + k as f64 * width) >= 0.9 * width {
            out.push(best);
        }
    }
    out
}

fn mean(v: &[(f64, f64)]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().map(|p| p.1).sum::<f64>() / v.len() as f64)
}

/// q_num at x = xi t for one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RaySample {
    pub xi: f64,
    pub t: f64,
    pub x: f64,
    pub q_num: f64,
}

/// Sample a field along rays; every x = xi t must sit at least `margin` inside the grid.
pub fn sample_rays(state: &FieldState, rays: &[f64], margin: f64) -> Result<Vec<RaySample>> {
    let (lo, hi) = (state.x[0], state.x[state.x.len() - 1]);
    rays.iter()
        .map(|&xi| {
            let x = xi * state.t;
            if x < lo + margin || x > hi - margin {
                return Err(Error::Domain(format!("ray xi = {xi} at t = {} leaves the domain (x = {x})", state.t)));
            }
            Ok(RaySample { xi, t: state.t, x, q_num: state.sample(x)? })
        })
        .collect()
}

/// Run the solver through `times` (ascending) and sample the rays at each.
pub fn simulate_rays(q0: &InitialDatum, cfg: &SolverConfig, rays: &[f64], times: &[f64], margin: f64) -> Result<(Vec<RaySample>, FieldState)> {
    let mut state = crate::pde::init_field(q0, cfg)?;
    let mut solver = Solver::new(cfg.clone())?;
    let mut out = Vec::with_capacity(rays.len() * times.len());
    for &t in times {
        solver.advance(&mut state, t)?;
        out.extend(sample_rays(&state, rays, margin)?);
    }
    Ok((out, state))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CompareOptions {
    pub convention: Convention,
    pub fit_window: (f64, f64),
    /// errors at or below 10x this are not fitted
    pub solver_tol: f64,
    pub margin: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions { convention: Convention::Normalized, fit_window: (20.0, 80.0), solver_tol: 1e-8, margin: BOUNDARY_MARGIN }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub xi: f64,
    pub t: f64,
    pub x: f64,
    pub q_num: f64,
    pub q_asym: f64,
    pub abs_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaySummary {
    pub xi: f64,
    pub region: String,
    /// slope of the block-maximum envelope of abs_err in the fit window
    pub slope: Option<f64>,
    pub r2: Option<f64>,
    pub n_fit: usize,
    /// peak average of sqrt(t) |q_num - background|
    pub envelope_num: Option<f64>,
    /// peak average of |f|
    pub envelope_asym: Option<f64>,
    pub envelope_rel_err: Option<f64>,
    pub max_im_f: f64,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub convention: Convention,
    pub fit_window: (f64, f64),
    pub rows: Vec<ComparisonRow>,
    pub rays: Vec<RaySummary>,
}

/// Compare sampled values with q_asym, ray by ray (rays run concurrently).
pub fn compare_samples(samples: &[RaySample], sd: &ScatteringData, opts: &CompareOptions) -> Result<ComparisonReport> {
    let mut rays: Vec<f64> = Vec::new();
    for s in samples {
        if !rays.contains(&s.xi) {
            rays.push(s.xi);
        }
    }
    let per_ray: Vec<Result<Option<(Vec<ComparisonRow>, RaySummary)>>> = rays
        .par_iter()
        .map(|&xi| {
            let region = classify_region(xi, opts.margin);
            let mut pts: Vec<&RaySample> = samples.iter().filter(|s| s.xi == xi).collect();
            pts.sort_by(|a, b| a.t.total_cmp(&b.t));
            let (rows, summary) = match region {
                Region::NearBoundary => return Ok(None),
                Region::LeftField => compare_left(&pts, sd, xi, opts)?,
                Region::RightField => compare_background(&pts, xi, 1.0, Region::RightField.as_str(), opts)?,
                Region::MiddleField => {
                    let solitons = if sd.fixed_zero.is_some() { vec![0.0] } else { Vec::new() };
                    let o = AsymOptions { margin: Some(opts.margin), solitons, ..Default::default() };
                    let mut rows = Vec::new();
                    for p in &pts {
                        let qa = crate::asymptotics::q_asym(sd, p.x, p.t, &o)?.q_asym;
                        rows.push(ComparisonRow { xi, t: p.t, x: p.x, q_num: p.q_num, q_asym: qa, abs_err: (p.q_num - qa).abs() });
                    }
                    let s = summarize(xi, Region::MiddleField.as_str(), 1.0, &rows, None, opts, "middle field: envelope check skipped".into());
                    (rows, s)
                }
            };
            Ok(Some((rows, summary)))
        })
        .collect();
    let mut report = ComparisonReport { convention: opts.convention, fit_window: opts.fit_window, rows: Vec::new(), rays: Vec::new() };
    for (xi, r) in rays.iter().zip(per_ray) {
        match r? {
            Some((rows, s)) => {
                report.rows.extend(rows);
                report.rays.push(s);
            }
            None => report.rays.push(RaySummary {
                xi: *xi,
                region: Region::NearBoundary.as_str().into(),
                slope: None,
                r2: None,
                n_fit: 0,
                envelope_num: None,
                envelope_asym: None,
                envelope_rel_err: None,
                max_im_f: 0.0,
                note: "skipped: ray in the transition zone".into(),
            }),
        }
    }
    Ok(report)
}

fn compare_left(pts: &[&RaySample], sd: &ScatteringData, xi: f64, opts: &CompareOptions) -> Result<(Vec<ComparisonRow>, RaySummary)> {
    let lf = LeftField::new(sd, xi)?;
    let mut rows = Vec::with_capacity(pts.len());
    let mut env_num = Vec::new();
    let mut env_f = Vec::new();
    let mut max_im: f64 = 0.0;
    for p in pts {
        let f = lf.f(p.t, opts.convention)?;
        max_im = max_im.max(f.im.abs() / f.norm().max(1e-12));
        let qa = -1.0 + f.re / p.t.sqrt();
        rows.push(ComparisonRow { xi, t: p.t, x: p.x, q_num: p.q_num, q_asym: qa, abs_err: (p.q_num - qa).abs() });
        if p.t >= opts.fit_window.0 && p.t <= opts.fit_window.1 {
            env_num.push((p.t, p.t.sqrt() * (p.q_num + 1.0).abs()));
            env_f.push((p.t, f.re.abs()));
        }
    }
    // cos(2 t theta(xi_1)) sets the oscillation period in t
    let th = crate::phase::theta(C::new(lf.saddles[0], 0.0), xi)?.re;
    let mut s = summarize(xi, Region::LeftField.as_str(), std::f64::consts::PI / th.abs(), &rows, Some((&env_num, &env_f)), opts, String::new());
    s.max_im_f = max_im;
    Ok((rows, s))
}

fn compare_background(pts: &[&RaySample], xi: f64, bg: f64, region: &str, opts: &CompareOptions) -> Result<(Vec<ComparisonRow>, RaySummary)> {
    let rows: Vec<ComparisonRow> = pts
        .iter()
        .map(|p| ComparisonRow { xi, t: p.t, x: p.x, q_num: p.q_num, q_asym: bg, abs_err: (p.q_num - bg).abs() })
        .collect();
    let s = summarize(xi, region, 1.0, &rows, None, opts, String::new());
    Ok((rows, s))
}

fn summarize(
    xi: f64,
    region: &str,
    period: f64,
    rows: &[ComparisonRow],
    env: Option<(&[(f64, f64)], &[(f64, f64)])>,
    opts: &CompareOptions,
    mut note: String,
) -> RaySummary {
    let floor = 10.0 * opts.solver_tol;
    let (w0, w1) = opts.fit_window;
    let series: Vec<(f64, f64)> = rows.iter().filter(|r| r.t >= w0 && r.t <= w1).map(|r| (r.t, r.abs_err)).collect();
    // oscillating errors cross zero; fit the maximum over each period
    let peaks: Vec<(f64, f64)> = block_maxima(&series, period).into_iter().filter(|p| p.1 > floor).collect();
    let (slope, r2, n_fit) = match fit_decay_slope(&peaks, opts.fit_window) {
        Ok((s, r)) => (Some(s), Some(r), peaks.len()),
        Err(_) => {
            let max = series.iter().map(|p| p.1).fold(0.0, f64::max);
            if note.is_empty() {
                note = format!("no fit window: max abs_err {max:.3e} never exceeds 10x solver tolerance ({floor:.1e}) long enough");
            }
            (None, None, 0)
        }
    };
    let (mut en, mut ea, mut rel) = (None, None, None);
    if let Some((num, f)) = env {
        en = mean(&local_maxima(num));
        ea = mean(&local_maxima(f));
        if let (Some(a), Some(b)) = (en, ea) {
            rel = Some((a - b).abs() / b.max(1e-300));
        }
    }
    RaySummary {
        xi,
        region: region.into(),
        slope,
        r2,
        n_fit,
        envelope_num: en,
        envelope_asym: ea,
        envelope_rel_err: rel,
        max_im_f: 0.0,
        note,
    }
}

/// Sample a sequence of stored fields and compare.
pub fn compare_fields(states: &[FieldState], sd: &ScatteringData, rays: &[f64], opts: &CompareOptions) -> Result<ComparisonReport> {
    let mut samples = Vec::new();
    for s in states {
        samples.extend(sample_rays(s, rays, 10.0)?);
    }
    compare_samples(&samples, sd, opts)
}
