//! Long-time formulas: nu, the scalar factor delta, the boundary phase beta,
//! parabolic-cylinder constants and the amplitude f of the left field.

use crate::error::{Error, Result};
use crate::phase::{classify_region, saddle_points, theta_unchecked, Region, I};
use crate::quad;
use crate::scattering::ScatteringData;
use crate::special::gamma;
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

/// Margin in xi around |xi| = 6 treated as the transition zone.
pub const BOUNDARY_MARGIN: f64 = 0.25;
const SINGULAR_NU: f64 = 1e-12;

/// nu(z) = -log(1 - |r(z)|^2) / (2 pi) with r interpolated on the grid.
pub fn nu_at(sd: &ScatteringData, z: f64) -> Result<f64> {
    let r2 = sd.r_at(z).norm_sqr();
    if r2 >= 1.0 - SINGULAR_NU {
        return Err(Error::SingularNu { z, r2 });
    }
    Ok(-(1.0 - r2).ln() / (2.0 * PI))
}

/// nu as a density, through the Wronskian route near +-1; never fails.
fn nu_density(sd: &ScatteringData, s: f64) -> f64 {
    -sd.log_one_minus_r2(s) / (2.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaVariant {
    /// integral over Gamma with the -1/(2s) term
    LeftGamma,
    /// integral over the whole real line
    RightSigma,
}

/// delta for one velocity. The contour is stored as finite pieces: nu vanishes
/// outside the tabulated range of r.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaFunction {
    pub variant: DeltaVariant,
    pub xi: f64,
    pub pieces: Vec<(f64, f64)>,
    pub tol: f64,
    /// saddles xi_1..xi_4 (left variant only)
    pub saddles: Option<[f64; 4]>,
}

impl DeltaFunction {
    pub fn left(sd: &ScatteringData, xi: f64) -> Result<Self> {
        let ctx = saddle_points(xi)?;
        if ctx.region != Region::LeftField {
            return Err(Error::Precondition(format!("left-field delta needs xi < -6, got {xi}")));
        }
        let s = [ctx.real_saddle(1), ctx.real_saddle(2), ctx.real_saddle(3), ctx.real_saddle(4)];
        let (lo, hi) = sd.z_range();
        let mut pieces = Vec::new();
        for (a, b) in [(-hi, s[3]), (s[2], -lo), (lo, s[1]), (s[0], hi)] {
            if b > a {
                pieces.push((a, b));
            }
        }
        Ok(DeltaFunction { variant: DeltaVariant::LeftGamma, xi, pieces, tol: 1e-11, saddles: Some(s) })
    }

    pub fn right(sd: &ScatteringData, xi: f64) -> Self {
        let (lo, hi) = sd.z_range();
        DeltaFunction { variant: DeltaVariant::RightSigma, xi, pieces: vec![(-hi, -lo), (lo, hi)], tol: 1e-11, saddles: None }
    }

    /// True if s lies on the (open) contour.
    pub fn on_contour(&self, s: f64) -> bool {
        match self.variant {
            DeltaVariant::RightSigma => s != 0.0,
            DeltaVariant::LeftGamma => {
                let x = self.saddles.unwrap();
                s != 0.0 && (s < x[3] || (s > x[2] && s < x[1]) || s > x[0])
            }
        }
    }

    fn dist_to_contour(&self, z: C) -> f64 {
        let x = z.re;
        let d_real = match self.variant {
            DeltaVariant::RightSigma => 0.0,
            DeltaVariant::LeftGamma => {
                let s = self.saddles.unwrap();
                if self.on_contour(x) || x == 0.0 {
                    0.0
                } else {
                    [s[0], s[1], s[2], s[3]].iter().map(|v| (x - v).abs()).fold(f64::INFINITY, f64::min)
                }
            }
        };
        d_real.hypot(z.im)
    }
}

/// Sorted breakpoints for a Cauchy integral with the kernel peak near `x0`.
fn breakpoints(a: f64, b: f64, extra: &[f64]) -> Vec<f64> {
    let mut v = vec![a, b];
    v.extend(extra.iter().copied().filter(|&p| p > a && p < b));
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// The Cauchy part I(z) = int nu(s) [1/(s - z) - w(s)] ds, where w = 1/(2s) for
/// the left variant and 0 for the right one. A constant nu(x0) is subtracted
/// over a window around x0 = Re z and added back in closed form.
fn cauchy(df: &DeltaFunction, sd: &ScatteringData, z: C) -> Result<C> {
    let half = df.variant == DeltaVariant::LeftGamma;
    // nearest contour point to Re z
    let mut best: Option<(usize, f64)> = None;
    for (k, &(a, b)) in df.pieces.iter().enumerate() {
        let x0 = z.re.clamp(a, b);
        if best.is_none_or(|(_, d)| (x0 - z.re).abs() < d) {
            best = Some((k, x0));
        }
    }
    let (k0, x0) = match best {
        Some((k, _)) => (k, z.re.clamp(df.pieces[k].0, df.pieces[k].1)),
        None => return Ok(C::new(0.0, 0.0)),
    };
    let d = (x0 - z.re).hypot(z.im);
    let subtract = d < 0.5;
    let (pa, pb) = df.pieces[k0];
    let w = 0.25_f64.min(0.5 * x0.abs().max(1e-3));
    let (wa, wb) = ((x0 - w).max(pa), (x0 + w).min(pb));
    let nu0 = if subtract { nu_density(sd, x0) } else { 0.0 };
    let scale = z.im.abs().max(1e-12);
    let mut total = C::new(0.0, 0.0);
    for (k, &(a, b)) in df.pieces.iter().enumerate() {
        let local = subtract && k == k0;
        let f = |s: f64| {
            let mut n = nu_density(sd, s);
            if local && s >= wa && s <= wb {
                n -= nu0;
            }
            let mut v = C::new(n, 0.0) / (s - z);
            if half {
                v -= nu_density(sd, s) / (2.0 * s);
            }
            v
        };
        let mut extra = vec![-1.0, 1.0, z.re, x0];
        for m in [1.0, 10.0, 100.0] {
            extra.push(x0 - m * scale);
            extra.push(x0 + m * scale);
        }
        if local {
            extra.push(wa);
            extra.push(wb);
        }
        let br = breakpoints(a, b, &extra);
        let (v, _) = quad::integrate(f, &br, df.tol, df.tol, 200_000)?;
        total += v;
    }
    if subtract {
        total += nu0 * ((wb - z).ln() - (wa - z).ln());
    }
    Ok(total)
}

/// log delta(z), computed from the Cauchy integral directly (no branch choice).
pub fn log_delta(df: &DeltaFunction, sd: &ScatteringData, z: C) -> Result<C> {
    // z = 0 is a regular point of the left variant: the kernel is 1/(2s) there
    let origin = z == C::new(0.0, 0.0) && df.variant == DeltaVariant::LeftGamma;
    if !origin && df.dist_to_contour(z) < 1e-6 {
        return Err(Error::Precondition(format!("z = {z} within 1e-6 of the contour")));
    }
    Ok(-I * cauchy(df, sd, z)?)
}

pub fn delta_eval(df: &DeltaFunction, sd: &ScatteringData, z: C) -> Result<C> {
    Ok(log_delta(df, sd, z)?.exp())
}

/// One rung of the jump check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRung {
    pub eps: f64,
    pub ratio: C,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpReport {
    pub z0: f64,
    pub rungs: Vec<JumpRung>,
    pub extrapolated: C,
    /// |extrapolated ratio - 1|
    pub defect: f64,
}

/// delta_-(z0) / (delta_+(z0) (1 - |r(z0)|^2)) from off-axis values, extrapolated to eps -> 0.
/// The ladder must be geometric with a common ratio.
pub fn delta_jump_check(df: &DeltaFunction, sd: &ScatteringData, z0: f64, eps_ladder: &[f64]) -> Result<JumpReport> {
    if !df.on_contour(z0) {
        return Err(Error::Precondition(format!("z0 = {z0} is not on the contour")));
    }
    if eps_ladder.len() < 2 {
        return Err(Error::Precondition("need at least two eps values".into()));
    }
    let one_m = 1.0 - sd.r_at(z0).norm_sqr();
    let mut rungs = Vec::new();
    for &e in eps_ladder {
        // both sides sit at distance e; the proximity guard is for the caller's z
        let lp = -I * cauchy(df, sd, C::new(z0, e))?;
        let lm = -I * cauchy(df, sd, C::new(z0, -e))?;
        rungs.push(JumpRung { eps: e, ratio: (lm - lp).exp() / one_m });
    }
    let n = rungs.len();
    let q = eps_ladder[n - 2] / eps_ladder[n - 1];
    let (r1, r2) = (rungs[n - 2].ratio, rungs[n - 1].ratio);
    let extrapolated = (q * r2 - r1) / (q - 1.0);
    if !extrapolated.re.is_finite() {
        return Err(Error::NonConvergence("jump extrapolation".into()));
    }
    Ok(JumpReport { z0, rungs, extrapolated, defect: (extrapolated - 1.0).norm() })
}

/// beta(xi_j): the limit of -i log delta(z) - eps_j nu(xi_j) log(z - xi_j) as z -> xi_j.
/// Evaluated in closed form after subtracting nu(xi_j) near the endpoint; the
/// result is complex in general (its imaginary part is -pi nu for j = 1, 3).
pub fn beta_phase(df: &DeltaFunction, sd: &ScatteringData, j: usize) -> Result<C> {
    let s = df.saddles.ok_or_else(|| Error::Precondition("beta needs the left-field delta".into()))?;
    if !(1..=4).contains(&j) {
        return Err(Error::Precondition(format!("saddle index {j}")));
    }
    let xj = s[j - 1];
    let nu = nu_density(sd, xj);
    // piece ending at xi_j and the window width
    let k0 = df
        .pieces
        .iter()
        .position(|&(a, b)| a == xj || b == xj)
        .ok_or_else(|| Error::Precondition("saddle is not an endpoint of the contour".into()))?;
    let (pa, pb) = df.pieces[k0];
    let w = 0.25_f64.min(0.5 * (pb - pa));
    let (wa, wb) = if pa == xj { (pa, pa + w) } else { (pb - w, pb) };
    let mut total = C::new(0.0, 0.0);
    for (k, &(a, b)) in df.pieces.iter().enumerate() {
        let local = k == k0;
        let f = |x: f64| {
            let n = nu_density(sd, x);
            let mut v = if local && x >= wa && x <= wb {
                if x == xj {
                    0.0
                } else {
                    (n - nu) / (x - xj)
                }
            } else {
                n / (x - xj)
            };
            v -= n / (2.0 * x);
            C::new(v, 0.0)
        };
        let br = breakpoints(a, b, &[wa, wb, xj, -1.0, 1.0]);
        let (v, _) = quad::integrate(f, &br, 1e-12, 1e-12, 200_000)?;
        total += v;
    }
    Ok(-total + local_endpoint_term(nu, w, pa == xj))
}

/// lim_{rho -> 0} [-nu int_window ds/(s - z) - eps nu log(z - xi_j)] with z = xi_j + i rho.
/// Windows to the right of xi_j belong to eps = 1, to the left to eps = -1.
fn local_endpoint_term(nu: f64, w: f64, window_right: bool) -> C {
    if window_right {
        // -nu (log w - log rho + i pi/2) - nu (log rho + i pi/2)
        C::new(-nu * w.ln(), -PI * nu)
    } else {
        // -nu (log rho - log w + i pi/2) + nu (log rho + i pi/2)
        C::new(nu * w.ln(), 0.0)
    }
}

/// Branch convention for the j = 1, 3 parabolic-cylinder constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// printed closed form with a real boundary phase (Re beta)
    Printed,
    /// printed closed form with the complex boundary phase; |beta_12|^2 = nu
    #[default]
    Normalized,
}

impl Convention {
    pub fn as_str(&self) -> &'static str {
        match self {
            Convention::Printed => "printed",
            Convention::Normalized => "normalized",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleCoefficients {
    pub j: usize,
    pub xi_j: C,
    pub eps: f64,
    pub nu_j: f64,
    /// complex in general; see `beta_phase`
    pub beta_phase: C,
    pub theta_pp: f64,
    pub beta12: C,
    pub beta21: C,
}

/// Everything about one left-field ray that does not depend on t.
#[derive(Debug, Clone, PartialEq)]
pub struct LeftField {
    pub xi: f64,
    pub saddles: [f64; 4],
    pub theta_pp: [f64; 4],
    pub nu: [f64; 4],
    pub beta: [C; 4],
    pub r: [C; 4],
}

const EPS: [f64; 4] = [1.0, -1.0, 1.0, -1.0];

impl LeftField {
    pub fn new(sd: &ScatteringData, xi: f64) -> Result<Self> {
        if classify_region(xi, BOUNDARY_MARGIN) != Region::LeftField {
            return Err(Error::Precondition(format!("xi = {xi} is not in the left field")));
        }
        let ctx = saddle_points(xi)?;
        let df = DeltaFunction::left(sd, xi)?;
        let mut out = LeftField { xi, saddles: [0.0; 4], theta_pp: [0.0; 4], nu: [0.0; 4], beta: [C::new(0.0, 0.0); 4], r: [C::new(0.0, 0.0); 4] };
        for j in 1..=4 {
            let x = ctx.real_saddle(j);
            out.saddles[j - 1] = x;
            out.theta_pp[j - 1] = ctx.theta_pp[j - 1].re;
            if 2.0 * EPS[j - 1] * out.theta_pp[j - 1] <= 0.0 {
                return Err(Error::Domain(format!("2 eps_j theta'' <= 0 at j = {j}")));
            }
            out.nu[j - 1] = nu_at(sd, x)?;
            out.beta[j - 1] = beta_phase(&df, sd, j)?;
            out.r[j - 1] = sd.r_at(x);
        }
        Ok(out)
    }

    /// Constants at saddle j (1-based) and time t.
    pub fn coefficients(&self, t: f64, j: usize, conv: Convention) -> Result<SaddleCoefficients> {
        if !(t > 0.0) {
            return Err(Error::Precondition("t must be positive".into()));
        }
        let k = j - 1;
        let (x, eps, nu, tpp) = (self.saddles[k], EPS[k], self.nu[k], self.theta_pp[k]);
        let beta = match (conv, j % 2) {
            (Convention::Printed, 1) => C::new(self.beta[k].re, 0.0),
            _ => self.beta[k],
        };
        let zero = C::new(0.0, 0.0);
        if nu == 0.0 || self.r[k] == zero {
            return Ok(SaddleCoefficients { j, xi_j: C::new(x, 0.0), eps, nu_j: nu, beta_phase: beta, theta_pp: tpp, beta12: zero, beta21: zero });
        }
        let tt = t * theta_unchecked(C::new(x, 0.0), self.xi).re;
        let r_xi = self.r[k] * (2.0 * I * beta - 2.0 * I * tt).exp() * (-I * eps * nu * (2.0 * t * eps * tpp).ln()).exp();
        let s2p = (2.0 * PI).sqrt();
        let beta12 = if j % 2 == 1 {
            s2p * C::from_polar(1.0, -5.0 * PI / 4.0) * (1.5 * PI * nu).exp() / (r_xi * gamma(C::new(0.0, nu)))
        } else {
            s2p * C::from_polar(1.0, PI / 4.0) * (-0.5 * PI * nu).exp() / (r_xi * gamma(C::new(0.0, -nu)))
        };
        let beta21 = nu / beta12;
        Ok(SaddleCoefficients { j, xi_j: C::new(x, 0.0), eps, nu_j: nu, beta_phase: beta, theta_pp: tpp, beta12, beta21 })
    }

    /// f at time t, complex; the real part is the amplitude.
    pub fn f(&self, t: f64, conv: Convention) -> Result<C> {
        let mut f = C::new(0.0, 0.0);
        for j in 1..=4 {
            let c = self.coefficients(t, j, conv)?;
            let x = c.xi_j.re;
            let x2 = 1.0 / (x * x);
            f += c.eps / (2.0 * c.eps * c.theta_pp).sqrt() / (1.0 - x2) * (c.beta12 - x2 * c.beta21);
        }
        Ok(f)
    }
}

pub fn pc_constants(sd: &ScatteringData, xi: f64, t: f64, j: usize, conv: Convention) -> Result<SaddleCoefficients> {
    if !(1..=4).contains(&j) {
        return Err(Error::Precondition(format!("saddle index {j}")));
    }
    LeftField::new(sd, xi)?.coefficients(t, j, conv)
}

/// (Re f, Im f) for the left field.
pub fn f_left(sd: &ScatteringData, xi: f64, t: f64, conv: Convention) -> Result<(f64, f64)> {
    let f = LeftField::new(sd, xi)?.f(t, conv)?;
    Ok((f.re, f.im))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ErrorOrder {
    TMinus34,
    TMinus1,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AsymOptions {
    pub convention: Convention,
    /// dark solitons tanh(x - x0 + 2t) in the middle field, by initial centre x0
    pub solitons: Vec<f64>,
    pub margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticEvaluation {
    pub x: f64,
    pub t: f64,
    pub xi: f64,
    pub region: Region,
    pub q_asym: f64,
    pub im_f: f64,
    pub error_order: ErrorOrder,
}

pub fn q_asym(sd: &ScatteringData, x: f64, t: f64, opts: &AsymOptions) -> Result<AsymptoticEvaluation> {
    if !(t > 0.0) {
        return Err(Error::Precondition("t must be positive".into()));
    }
    let xi = x / t;
    let region = classify_region(xi, opts.margin.unwrap_or(BOUNDARY_MARGIN));
    let (q, im_f, order) = match region {
        Region::NearBoundary => return Err(Error::NearBoundary { xi }),
        Region::RightField => (1.0, 0.0, ErrorOrder::TMinus1),
        Region::LeftField => {
            let f = LeftField::new(sd, xi)?.f(t, opts.convention)?;
            (-1.0 + f.re / t.sqrt(), f.im, ErrorOrder::TMinus34)
        }
        Region::MiddleField => {
            let q = opts.solitons.iter().fold(-1.0, |q, &x0| q + (x - x0 + 2.0 * t).tanh() + 1.0);
            (q, 0.0, ErrorOrder::TMinus1)
        }
    };
    Ok(AsymptoticEvaluation { x, t, xi, region, q_asym: q, im_f, error_order: order })
}
