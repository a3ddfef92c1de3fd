//! Reference solver for q_t - 6 q^2 q_x + q_xxx = 0 on [-L, L] with q(+-L) = +-1.
//!
//! Fourth-order central differences in space. In time an additive
//! Runge-Kutta pair ARK3(2)4L[2]SA: dispersion implicit, the rest explicit.

use crate::error::{Error, Result};
use crate::scattering::InitialDatum;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// How the embedded error estimate is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum ErrorNorm {
    #[default]
    Max,
    Rms,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub l: f64,
    pub h: f64,
    /// bound on the embedded local error estimate of each step
    pub tol: f64,
    pub dt_init: f64,
    /// None: the explicit stability limit
    pub dt_max: Option<f64>,
    pub error_norm: ErrorNorm,
    pub scheme: String,
    /// None: 10% of L. Zero disables the layer.
    pub sponge_width: Option<f64>,
    pub sponge_strength: f64,
    /// coefficient eps of the damping term eps h^5 q_xxxxxx
    pub hyperdiffusion: f64,
    /// log cadence in time units (0 = every output time only)
    pub log_every: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            l: 150.0,
            h: 0.05,
            tol: 1e-8,
            dt_init: 1e-3,
            dt_max: None,
            error_norm: ErrorNorm::Max,
            scheme: "ark3(2)4l".into(),
            sponge_width: None,
            sponge_strength: 2.0,
            hyperdiffusion: 0.01,
            log_every: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn n_cells(&self) -> usize {
        (2.0 * self.l / self.h).round() as usize
    }

    pub fn sponge(&self) -> f64 {
        self.sponge_width.unwrap_or(0.1 * self.l)
    }

    /// Checks run before any stepping.
    pub fn validate(&self) -> Result<()> {
        if self.scheme != "ark3(2)4l" {
            return Err(Error::Config(format!("unknown scheme {}", self.scheme)));
        }
        if !(self.l > 0.0 && self.h > 0.0 && self.tol > 0.0 && self.dt_max.unwrap_or(1.0) > 0.0 && self.dt_init > 0.0) {
            return Err(Error::Config("L, h, tol and dt must be positive".into()));
        }
        let n = 2.0 * self.l / self.h;
        if (n - n.round()).abs() > 1e-9 * n || n < 16.0 {
            return Err(Error::Config(format!("2L/h = {n} must be an integer >= 16")));
        }
        if !(self.hyperdiffusion >= 0.0) {
            return Err(Error::Config("hyperdiffusion must be non-negative".into()));
        }
        if self.sponge() < 0.0 || self.sponge() >= self.l {
            return Err(Error::Config("sponge width must lie in [0, L)".into()));
        }
        let lim = self.stability_limit();
        if let Some(d) = self.dt_max.filter(|&d| d > lim) {
            return Err(Error::Config(format!("dt_max {d} above the explicit stability limit {lim:.4}")));
        }
        Ok(())
    }

    /// Explicit part: advection at speed 6 q^2 (|q| <= 1.7 assumed) under the
    /// 5-point stencil, symbol bound 1.372/h, inside the RK stability interval ~2.5.
    pub fn stability_limit(&self) -> f64 {
        2.5 * self.h / (1.372 * 6.0 * 1.7 * 1.7)
    }

    pub fn effective_dt_max(&self) -> f64 {
        self.dt_max.unwrap_or_else(|| self.stability_limit())
    }
}

/// Uniform grid on [-L, L] and the field at time t.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub x: Vec<f64>,
    pub q: Vec<f64>,
    pub t: f64,
}

impl FieldState {
    pub fn h(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    /// Local quartic interpolation of q.
    pub fn sample(&self, x: f64) -> Result<f64> {
        if x < self.x[0] || x > self.x[self.x.len() - 1] {
            return Err(Error::Domain(format!("x = {x} outside the grid")));
        }
        Ok(crate::interp::lagrange(&self.x, &self.q, x, 5))
    }
}

/// The kink profile tanh(x - x0).
pub fn dark_soliton(x: f64, x0: f64) -> f64 {
    (x - x0).tanh()
}

/// The kink as an exact solution of q_t - 6 q^2 q_x + q_xxx = 0: it travels
/// left at speed 2, q = tanh(x - x0 + 2t).
pub fn dark_soliton_at(x: f64, t: f64, x0: f64) -> f64 {
    (x - x0 + 2.0 * t).tanh()
}

pub fn init_field(q0: &InitialDatum, cfg: &SolverConfig) -> Result<FieldState> {
    cfg.validate()?;
    let n = cfg.n_cells();
    let x: Vec<f64> = (0..=n).map(|i| -cfg.l + i as f64 * cfg.h).collect();
    for (xe, want) in [(-cfg.l, -1.0), (cfg.l, 1.0)] {
        let v = q0.eval(xe);
        if (v - want).abs() > 1e-8 {
            return Err(Error::BoundaryMismatch(format!("q0({xe}) = {v}, expected {want}")));
        }
    }
    let mut q: Vec<f64> = x.iter().map(|&x| q0.eval(x)).collect();
    q[0] = -1.0;
    q[n] = 1.0;
    Ok(FieldState { x, q, t: 0.0 })
}

/// mass = int (q^2 - 1) dx. The integrand vanishes at both ends, where the
/// trapezoid rule is accurate well beyond its nominal order.
pub fn conserved_quantities(state: &FieldState) -> f64 {
    let h = state.h();
    let n = state.q.len();
    let mut s = 0.0;
    for (i, q) in state.q.iter().enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        s += w * (q * q - 1.0);
    }
    s * h
}

const D1: [f64; 2] = [8.0 / 12.0, -1.0 / 12.0];
// q_xxx ~ sum_m C3[m] (q_{i+m} - q_{i-m}) / h^3, m = 1..3
const C3: [f64; 3] = [-13.0 / 8.0, 1.0, -1.0 / 8.0];

/// Value at node index i, with ghosts beyond the boundary held at +-1.
#[inline]
fn at(q: &[f64], i: isize) -> f64 {
    let n = q.len() as isize;
    if i < 0 {
        -1.0
    } else if i >= n {
        1.0
    } else {
        q[i as usize]
    }
}

fn d1(q: &[f64], i: usize, h: f64) -> f64 {
    let i = i as isize;
    (D1[0] * (at(q, i + 1) - at(q, i - 1)) + D1[1] * (at(q, i + 2) - at(q, i - 2))) / h
}

fn d3(q: &[f64], i: usize, h: f64) -> f64 {
    let i = i as isize;
    let mut s = 0.0;
    for m in 1..=3 {
        s += C3[m - 1] * (at(q, i + m as isize) - at(q, i - m as isize));
    }
    s / (h * h * h)
}

/// Semidiscrete right-hand side 6 q^2 q_x - q_xxx at interior nodes
/// (zero at the clamped ends), without the sponge.
pub fn semidiscrete_rhs(state: &FieldState) -> Vec<f64> {
    let h = state.h();
    let q = &state.q;
    let n = q.len();
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = 6.0 * q[i] * q[i] * d1(q, i, h) - d3(q, i, h);
    }
    out
}

mod tableau {
    pub const G: f64 = 1767732205903.0 / 4055673282236.0;
    pub const AE: [[f64; 4]; 4] = [
        [0.0, 0.0, 0.0, 0.0],
        [2.0 * G, 0.0, 0.0, 0.0],
        [5535828885825.0 / 10492691773637.0, 788022342437.0 / 10882634858940.0, 0.0, 0.0],
        [6485989280629.0 / 16251701735622.0, -4246266847089.0 / 9704473918619.0, 10755448449292.0 / 10357097424841.0, 0.0],
    ];
    pub const B: [f64; 4] = [1471266399579.0 / 7840856788654.0, -4482444167858.0 / 7529755066697.0, 11266239266428.0 / 11593286722821.0, G];
    pub const AI: [[f64; 4]; 4] = [
        [0.0, 0.0, 0.0, 0.0],
        [G, G, 0.0, 0.0],
        [2746238789719.0 / 10658868560708.0, -640167445237.0 / 6845629431997.0, G, 0.0],
        B,
    ];
    pub const BHAT: [f64; 4] = [
        2756255671327.0 / 12835298489170.0,
        -10771552573575.0 / 22201958757719.0,
        9247589265047.0 / 10645013368117.0,
        2193209047091.0 / 5459859503100.0,
    ];
    #[cfg_attr(not(test), allow(dead_code))]
    pub const C: [f64; 4] = [0.0, 2.0 * G, 3.0 / 5.0, 1.0];
}

/// Implicit operator -D3 + eps h^5 D6 as weights on offsets -3..=3.
fn implicit_stencil(h: f64, eps: f64) -> [f64; 7] {
    const D6: [f64; 7] = [1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0];
    let k = 1.0 / (h * h * h);
    let mut w = [0.0; 7];
    for m in 1..=3 {
        w[3 + m] = -k * C3[m - 1];
        w[3 - m] = k * C3[m - 1];
    }
    for (wi, d) in w.iter_mut().zip(D6) {
        *wi += eps / h * d;
    }
    w
}

/// LU of the banded matrix I - s A on the interior unknowns (half-bandwidth 3),
/// A the implicit stencil. No pivoting: the symmetric part is positive definite.
#[derive(Debug, Clone)]
struct BandLu {
    s: f64,
    // row i holds columns i-3..=i+3
    rows: Vec<[f64; 7]>,
}

impl BandLu {
    fn new(m: usize, s: f64, op: &[f64; 7]) -> Self {
        let mut rows = vec![[0.0; 7]; m];
        for r in rows.iter_mut() {
            for c in 0..7 {
                r[c] = -s * op[c];
            }
            r[3] += 1.0;
        }
        // Doolittle elimination within the band
        for i in 0..m {
            let piv = rows[i][3];
            for d in 1..=3 {
                let r = i + d;
                if r >= m {
                    break;
                }
                let l = rows[r][3 - d] / piv;
                rows[r][3 - d] = l;
                for c in 1..=3 {
                    if 3 - d + c < 7 && i + c < m {
                        let u = rows[i][3 + c];
                        rows[r][3 - d + c] -= l * u;
                    }
                }
            }
        }
        BandLu { s, rows }
    }

    fn solve(&self, b: &mut [f64]) {
        let m = b.len();
        for i in 0..m {
            let mut v = b[i];
            for d in 1..=3 {
                if i >= d {
                    v -= self.rows[i][3 - d] * b[i - d];
                }
            }
            b[i] = v;
        }
        for i in (0..m).rev() {
            let mut v = b[i];
            for c in 1..=3 {
                if i + c < m {
                    v -= self.rows[i][3 + c] * b[i + c];
                }
            }
            b[i] = v / self.rows[i][3];
        }
    }
}

/// Run statistics.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub dt_min: f64,
    pub dt_max: f64,
}

/// Integrator with cached factorization and step size.
#[derive(Debug, Clone)]
pub struct Solver {
    pub cfg: SolverConfig,
    sigma: Vec<f64>,
    op: [f64; 7],
    lu: Option<BandLu>,
    dt: f64,
    pub stats: StepStats,
}

impl Solver {
    pub fn new(cfg: SolverConfig) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.n_cells();
        let w = cfg.sponge();
        let sigma = (0..=n)
            .map(|i| {
                let x = -cfg.l + i as f64 * cfg.h;
                let d = x.abs() - (cfg.l - w);
                if w > 0.0 && d > 0.0 {
                    cfg.sponge_strength * (d / w).powi(2)
                } else {
                    0.0
                }
            })
            .collect();
        let dt = cfg.dt_init.min(cfg.effective_dt_max());
        let op = implicit_stencil(cfg.h, cfg.hyperdiffusion);
        Ok(Solver { cfg, sigma, op, lu: None, dt, stats: StepStats { dt_min: f64::INFINITY, ..Default::default() } })
    }

    fn explicit(&self, q: &[f64], out: &mut [f64]) {
        let h = self.cfg.h;
        let n = q.len();
        let mid = n / 2;
        let (a1, a2) = (D1[0] / h, D1[1] / h);
        let sig = &self.sigma;
        let row = |i: usize, o: &mut f64| {
            let bg = if i < mid { -1.0 } else { 1.0 };
            let d = if i >= 2 && i + 2 < n {
                a1 * (q[i + 1] - q[i - 1]) + a2 * (q[i + 2] - q[i - 2])
            } else {
                d1(q, i, h)
            };
            *o = 6.0 * q[i] * q[i] * d - sig[i] * (q[i] - bg);
        };
        out.par_iter_mut().enumerate().with_min_len(4096).for_each(|(i, o)| {
            if i == 0 || i == n - 1 {
                *o = 0.0;
            } else {
                row(i, o);
            }
        });
    }

    fn implicit(&self, q: &[f64], out: &mut [f64]) {
        let n = q.len();
        let w = &self.op;
        out.par_iter_mut().enumerate().with_min_len(4096).for_each(|(i, o)| {
            *o = if i == 0 || i == n - 1 {
                0.0
            } else if i >= 3 && i + 3 < n {
                (0..7).map(|c| w[c] * q[i + c - 3]).sum()
            } else {
                (0..7).map(|c| w[c] * at(q, i as isize + c as isize - 3)).sum()
            };
        });
    }

    /// Solve (I - s A) y = r on the interior with the clamped ends.
    fn implicit_solve(&mut self, r: &[f64], s: f64, y: &mut [f64]) {
        let n = r.len();
        if self.lu.as_ref().is_none_or(|l| l.s != s) {
            self.lu = Some(BandLu::new(n - 2, s, &self.op));
        }
        // known boundary values move to the right-hand side
        let mut b: Vec<f64> = r[1..n - 1].to_vec();
        let m = b.len();
        let edge: Vec<usize> = (0..m.min(3)).chain(m.saturating_sub(3)..m).collect();
        for idx in edge {
            let i = idx as isize + 1;
            for c in 0..7isize {
                let j = i + c - 3;
                if j <= 0 || j >= n as isize - 1 {
                    b[idx] += s * self.op[c as usize] * if j <= 0 { -1.0 } else { 1.0 };
                }
            }
        }
        self.lu.as_ref().unwrap().solve(&mut b);
        y[0] = -1.0;
        y[n - 1] = 1.0;
        y[1..n - 1].copy_from_slice(&b);
    }

    /// One attempted step; returns the error ratio (<= 1 accepts).
    fn try_step(&mut self, q: &[f64], dt: f64, out: &mut Vec<f64>) -> f64 {
        use tableau::*;
        let n = q.len();
        let mut fe = vec![vec![0.0; n]; 4];
        let mut fi = vec![vec![0.0; n]; 4];
        let mut y = q.to_vec();
        self.explicit(&y, &mut fe[0]);
        self.implicit(&y, &mut fi[0]);
        let s = G * dt;
        for st in 1..4 {
            let mut r = q.to_vec();
            for j in 0..st {
                let (ae, ai) = (AE[st][j] * dt, AI[st][j] * dt);
                for i in 1..n - 1 {
                    r[i] += ae * fe[j][i] + ai * fi[j][i];
                }
            }
            self.implicit_solve(&r, s, &mut y);
            for i in 1..n - 1 {
                fi[st][i] = (y[i] - r[i]) / s;
            }
            self.explicit(&y, &mut fe[st]);
        }
        // the explicit tableau is not stiffly accurate, so assemble with b
        let mut err_max: f64 = 0.0;
        let mut err_sq = 0.0;
        for i in 1..n - 1 {
            let (mut e, mut u) = (0.0, 0.0);
            for k in 0..4 {
                let f = fe[k][i] + fi[k][i];
                e += (B[k] - BHAT[k]) * f;
                u += B[k] * f;
            }
            y[i] = q[i] + dt * u;
            e *= dt;
            err_max = err_max.max(e.abs());
            err_sq += e * e;
        }
        *out = y;
        let e = match self.cfg.error_norm {
            ErrorNorm::Max => err_max,
            ErrorNorm::Rms => (err_sq / (n - 2) as f64).sqrt(),
        };
        e / self.cfg.tol
    }

    /// Advance to `t_target` exactly.
    pub fn advance(&mut self, state: &mut FieldState, t_target: f64) -> Result<()> {
        if t_target < state.t {
            return Err(Error::Precondition(format!("t_target {t_target} < t {}", state.t)));
        }
        let mut next = Vec::new();
        while state.t < t_target {
            let remaining = t_target - state.t;
            let mut dt = self.dt.min(self.cfg.effective_dt_max());
            let last = dt >= remaining * (1.0 - 1e-12);
            if last {
                dt = remaining;
            } else if dt > 0.5 * remaining {
                // avoid a sliver at the end
                dt = 0.5 * remaining;
            }
            if dt < 1e-10 {
                return Err(Error::StepUnderflow { t: state.t });
            }
            let ratio = self.try_step(&state.q, dt, &mut next);
            if !ratio.is_finite() {
                return Err(Error::Instability { t: state.t, msg: "non-finite error estimate".into() });
            }
            let fac = (0.9 * ratio.max(1e-10).powf(-1.0 / 3.0)).clamp(0.2, 2.0);
            if ratio <= 1.0 {
                std::mem::swap(&mut state.q, &mut next);
                state.t = if last { t_target } else { state.t + dt };
                self.stats.accepted += 1;
                self.stats.dt_min = self.stats.dt_min.min(dt);
                self.stats.dt_max = self.stats.dt_max.max(dt);
                if !last {
                    self.dt = dt * fac;
                }
                let qm = state.q.iter().fold(0.0f64, |m, v| m.max(v.abs()));
                if !(qm < 1e3) {
                    return Err(Error::Instability { t: state.t, msg: format!("max|q| = {qm}") });
                }
            } else {
                self.stats.rejected += 1;
                self.dt = dt * fac.min(0.9);
            }
        }
        Ok(())
    }
}

/// Advance a copy of `state` to `t_target`.
pub fn step_to(state: &FieldState, t_target: f64, cfg: &SolverConfig) -> Result<FieldState> {
    let mut s = state.clone();
    Solver::new(cfg.clone())?.advance(&mut s, t_target)?;
    Ok(s)
}
