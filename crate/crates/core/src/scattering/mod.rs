//! Direct scattering: Jost columns, a, b, r, discrete spectrum, norming
//! constants, trace-formula reconstruction and time evolution.

pub mod datum;
pub mod jost;

pub use datum::{DatumKind, InitialDatum};
pub use jost::{integrate_jost, jost_path, Column, JostOptions, Side};

use crate::error::{Error, Result};
use crate::interp::lagrange;
use crate::phase::{theta_unchecked, UniformizedPoint, I};
use crate::quad;
use jost::det;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

type C = Complex64;

/// Radius around +-1 inside which a and b are not tabulated.
pub const POLE_EXCLUSION: f64 = 1e-3;

/// a, b and r at one spectral point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coeffs {
    pub z: C,
    pub a: C,
    /// only for real z
    pub b: Option<C>,
    /// Wronskian det(mu_{+,1}, mu_{-,2}) = a (1 - z^-2), finite at +-1
    pub wronskian: C,
    pub r: Option<C>,
    /// |z -+ 1| below the pole exclusion radius
    pub near_pole: bool,
    /// relative change of the Wronskian between x = 0 and x = 1
    pub match_defect: f64,
}

/// Scattering coefficients by Wronskians at x = 0 (checked again at x = 1).
pub fn scattering_coeffs(q0: &InitialDatum, z: C, opts: JostOptions) -> Result<Coeffs> {
    let p = UniformizedPoint::new(z)?;
    if z.im < 0.0 {
        return Err(Error::Precondition(format!("a is analytic in the upper half plane, z = {z}")));
    }
    let xs = [0.0, 1.0];
    let p1 = jost_path(q0, z, Side::Plus, Column::First, &xs, opts)?;
    let m2 = jost_path(q0, z, Side::Minus, Column::Second, &xs, opts)?;
    let w0 = det(&p1[0], &m2[0]);
    let w1 = det(&p1[1], &m2[1]);
    let match_defect = (w0 - w1).norm() / w0.norm().max(1e-300);
    let denom = 1.0 - 1.0 / (z * z);
    let near_pole = (z - 1.0).norm() < 0.99 * POLE_EXCLUSION || (z + 1.0).norm() < 0.99 * POLE_EXCLUSION;
    let a = w0 / denom;
    let (b, r) = if z.im == 0.0 {
        let m1 = jost_path(q0, z, Side::Minus, Column::First, &xs[..1], opts)?;
        // the x-dependence of the b Wronskian is e^{2 i lambda x}; x = 0 here
        let bw = det(&m1[0], &p1[0]) * (2.0 * I * p.lambda * xs[0]).exp();
        (Some(bw / denom), Some(bw / w0))
    } else {
        (None, None)
    };
    Ok(Coeffs { z, a, b, wronskian: w0, r, near_pole, match_defect })
}

/// Grid layout for tabulating r on the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub z_min: f64,
    pub z_max: f64,
    /// spacing in ln|z|
    pub du: f64,
    /// number of geometric levels around +-1
    pub refine_levels: usize,
    pub exclusion: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { z_min: 0.02, z_max: 50.0, du: 0.005, refine_levels: 8, exclusion: POLE_EXCLUSION }
    }
}

impl GridSpec {
    /// Sorted grid, symmetric under z -> -z and z -> 1/z.
    pub fn build(&self) -> Vec<f64> {
        let umax = self.z_max.ln();
        let n = (umax / self.du).round() as i64;
        let ue = (1.0 + self.exclusion).ln();
        let mut pos: Vec<f64> = Vec::new();
        for i in -n..=n {
            let u = i as f64 * self.du;
            if u.abs() >= ue {
                pos.push(u.exp());
            }
        }
        let umin = self.z_min.ln();
        pos.retain(|&z| z.ln() >= umin - 1e-12);
        for m in 0..self.refine_levels {
            let d = self.exclusion * 2f64.powi(m as i32);
            pos.push(1.0 + d);
            pos.push(1.0 / (1.0 + d));
        }
        pos.sort_by(f64::total_cmp);
        pos.dedup_by(|a, b| (*a - *b).abs() < 1e-12 * a.abs());
        let mut all: Vec<f64> = pos.iter().rev().map(|z| -z).collect();
        all.extend(pos);
        all
    }
}

/// One sign of the real line, interpolated in u = ln|z|.
#[derive(Debug, Clone, Default)]
struct HalfLine {
    u: Vec<f64>,
    r: Vec<C>,
    log_abs_w: Vec<f64>,
    log_1mr2: Vec<f64>,
    /// |r| -> 1 at the edge +-1, interpolate through the Wronskian
    singular_edge: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedZero {
    pub eta: C,
    pub residual: f64,
}

/// Tabulated scattering data.
#[derive(Debug, Clone)]
pub struct ScatteringData {
    pub datum: String,
    pub z_grid: Vec<f64>,
    pub r_values: Vec<C>,
    pub a_values: Vec<C>,
    pub b_values: Vec<C>,
    pub wronskian: Vec<C>,
    pub eta: Vec<C>,
    pub c: Vec<C>,
    /// zero of a at z = i, present for every real datum by symmetry
    pub fixed_zero: Option<FixedZero>,
    neg: HalfLine,
    pos: HalfLine,
}

impl ScatteringData {
    pub fn from_parts(
        datum: String,
        z_grid: Vec<f64>,
        r_values: Vec<C>,
        a_values: Vec<C>,
        b_values: Vec<C>,
        wronskian: Vec<C>,
    ) -> Self {
        let mut sd = ScatteringData {
            datum,
            z_grid,
            r_values,
            a_values,
            b_values,
            wronskian,
            eta: vec![],
            c: vec![],
            fixed_zero: None,
            neg: HalfLine::default(),
            pos: HalfLine::default(),
        };
        sd.index();
        sd
    }

    fn index(&mut self) {
        let (mut neg, mut pos) = (HalfLine::default(), HalfLine::default());
        for i in 0..self.z_grid.len() {
            let z = self.z_grid[i];
            let h = if z < 0.0 { &mut neg } else { &mut pos };
            h.u.push(z.abs().ln());
            h.r.push(self.r_values[i]);
            h.log_abs_w.push(self.wronskian[i].norm().ln());
            h.log_1mr2.push((1.0 - self.r_values[i].norm_sqr()).max(1e-300).ln());
        }
        neg.u.reverse();
        neg.r.reverse();
        neg.log_abs_w.reverse();
        neg.log_1mr2.reverse();
        for h in [&mut neg, &mut pos] {
            let k = h.u.iter().enumerate().min_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).map(|k| k.0);
            h.singular_edge = k.is_some_and(|k| h.r[k].norm() > 0.99);
        }
        self.neg = neg;
        self.pos = pos;
    }

    /// Identically reflectionless data on the default grid with a = 1.
    pub fn trivial() -> Self {
        let g = GridSpec::default().build();
        let n = g.len();
        let w = g.iter().map(|&z| C::new(1.0 - 1.0 / (z * z), 0.0)).collect();
        Self::from_parts("trivial".into(), g, vec![C::new(0.0, 0.0); n], vec![C::new(1.0, 0.0); n], vec![C::new(0.0, 0.0); n], w)
    }

    /// Same grid with r multiplied by s; a and the Wronskian are rescaled so
    /// that |a|^2 - |b|^2 = 1 still holds.
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        for i in 0..out.z_grid.len() {
            let z = out.z_grid[i];
            let r = self.r_values[i] * s;
            let am = 1.0 / (1.0 - r.norm_sqr()).sqrt();
            let a = if self.a_values[i].norm() > 0.0 { self.a_values[i] / self.a_values[i].norm() * am } else { C::new(am, 0.0) };
            out.r_values[i] = r;
            out.a_values[i] = a;
            out.b_values[i] = r * a;
            out.wronskian[i] = a * (1.0 - 1.0 / (z * z));
        }
        out.datum = format!("{} (r scaled by {s})", self.datum);
        out.index();
        out
    }

    pub fn z_range(&self) -> (f64, f64) {
        let u = &self.pos.u;
        (u[0].exp(), u[u.len() - 1].exp())
    }

    fn half(&self, s: f64) -> &HalfLine {
        if s < 0.0 {
            &self.neg
        } else {
            &self.pos
        }
    }

    fn inside(&self, s: f64) -> bool {
        let h = self.half(s);
        let u = s.abs().ln();
        !h.u.is_empty() && u >= h.u[0] && u <= h.u[h.u.len() - 1]
    }

    /// r at real s by local quartic interpolation; zero outside the table.
    pub fn r_at(&self, s: f64) -> C {
        if s == 0.0 || !self.inside(s) {
            return C::new(0.0, 0.0);
        }
        let h = self.half(s);
        lagrange(&h.u, &h.r, s.abs().ln(), 5)
    }

    /// log(1 - |r(s)|^2) = -2 log|a(s)|, built from the Wronskian so that it
    /// stays accurate next to s = +-1 where |r| -> 1.
    pub fn log_one_minus_r2(&self, s: f64) -> f64 {
        if s == 0.0 || !self.inside(s) {
            return 0.0;
        }
        let h = self.half(s);
        let u = s.abs().ln();
        if !h.singular_edge {
            return lagrange(&h.u, &h.log_1mr2, u, 5);
        }
        let lw = lagrange(&h.u, &h.log_abs_w, u, 5);
        2.0 * (1.0 - 1.0 / (s * s)).abs().ln() - 2.0 * lw
    }

    pub fn max_abs_r(&self) -> f64 {
        self.r_values.iter().map(|r| r.norm()).fold(0.0, f64::max)
    }
}

/// Tabulate a, b, r on `grid` (points within the exclusion radius of +-1 are rejected).
pub fn reflection_grid(q0: &InitialDatum, grid: &[f64], opts: JostOptions) -> Result<ScatteringData> {
    if grid.contains(&0.0) {
        return Err(Error::Precondition("grid contains z = 0".into()));
    }
    let rows: Vec<Coeffs> = grid
        .par_iter()
        .map(|&z| scattering_coeffs(q0, C::new(z, 0.0), opts))
        .collect::<Result<_>>()?;
    if let Some(c) = rows.iter().find(|c| c.near_pole) {
        return Err(Error::Precondition(format!("grid point {} inside the pole exclusion", c.z.re)));
    }
    Ok(ScatteringData::from_parts(
        q0.describe(),
        grid.to_vec(),
        rows.iter().map(|c| c.r.unwrap()).collect(),
        rows.iter().map(|c| c.a).collect(),
        rows.iter().map(|c| c.b.unwrap()).collect(),
        rows.iter().map(|c| c.wronskian).collect(),
    ))
}

/// a on the upper unit circle at angle psi.
fn a_on_circle(q0: &InitialDatum, psi: f64, opts: JostOptions) -> Result<C> {
    Ok(scattering_coeffs(q0, C::from_polar(1.0, psi), opts)?.a)
}

/// Result of the circle scan.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eta: Vec<C>,
    /// zeros within 1e-6 of i or +-1, excluded from `eta`
    pub degenerate: Vec<C>,
}

/// Zeros of a on the upper unit circle. a is purely imaginary there
/// (a = -conj a on |z| = 1), so sign changes of Im a bracket every simple zero.
pub fn discrete_spectrum(q0: &InitialDatum, angular_resolution: usize, opts: JostOptions) -> Result<Spectrum> {
    let n = angular_resolution.max(8);
    // half-integer offsets keep pi/2 off the scan grid
    let psis: Vec<f64> = (0..n).map(|k| PI * (k as f64 + 0.5) / n as f64).collect();
    let vals: Vec<f64> = psis
        .par_iter()
        .map(|&p| a_on_circle(q0, p, opts).map(|a| a.im))
        .collect::<Result<_>>()?;
    let mut eta = Vec::new();
    let mut degenerate = Vec::new();
    for k in 0..n - 1 {
        if psis[k] >= PI / 2.0 + 1e-12 {
            break;
        }
        if vals[k] == 0.0 || vals[k].signum() != vals[k + 1].signum() {
            let (mut lo, mut hi) = (psis[k], psis[k + 1]);
            let mut flo = vals[k];
            while hi - lo > 1e-11 {
                let mid = 0.5 * (lo + hi);
                let fm = a_on_circle(q0, mid, opts)?.im;
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            let psi = 0.5 * (lo + hi);
            let z = C::from_polar(1.0, psi);
            if (psi - PI / 2.0).abs() < 1e-6 || psi < 1e-6 {
                degenerate.push(z);
            } else {
                eta.push(z);
            }
        }
    }
    let mirrors: Vec<C> = eta.iter().map(|e| -e.conj()).collect();
    eta.extend(mirrors);
    Ok(Spectrum { eta, degenerate })
}

/// Norming constant at a simple zero, with the least-squares residual of the
/// proportionality mu_{+,1}(x) = b e^{-2 i lambda x} mu_{-,2}(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormingConstant {
    pub eta: C,
    pub b: C,
    pub a_prime: C,
    pub c: C,
    pub residual: f64,
}

pub fn norming_constant(q0: &InitialDatum, eta: C, opts: JostOptions) -> Result<NormingConstant> {
    let p = UniformizedPoint::new(eta)?;
    let xs = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let u = jost_path(q0, eta, Side::Plus, Column::First, &xs, opts)?;
    let v = jost_path(q0, eta, Side::Minus, Column::Second, &xs, opts)?;
    let (mut num, mut den) = (C::new(0.0, 0.0), 0.0);
    let mut vv = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        let e = (-2.0 * I * p.lambda * x).exp();
        for c in 0..2 {
            let w = e * v[i][c];
            num += w.conj() * u[i][c];
            den += w.norm_sqr();
            vv.push((w, u[i][c]));
        }
    }
    let b = num / den;
    let (mut res, mut nu) = (0.0, 0.0);
    for (w, uu) in vv {
        res += (uu - b * w).norm_sqr();
        nu += uu.norm_sqr();
    }
    let residual = (res / nu).sqrt();
    if residual > 1e-6 {
        return Err(Error::IllConditioned(format!("proportionality residual {residual:.2e} at eta = {eta}")));
    }
    let h = 1e-6;
    let (ep, em) = (eta * C::from_polar(1.0, h), eta * C::from_polar(1.0, -h));
    let ap = scattering_coeffs(q0, ep, opts)?.a;
    let am = scattering_coeffs(q0, em, opts)?.a;
    let a_prime = (ap - am) / (ep - em);
    Ok(NormingConstant { eta, b, a_prime, c: b / a_prime, residual })
}

pub fn norming_constants(q0: &InitialDatum, eta: &[C], opts: JostOptions) -> Result<Vec<NormingConstant>> {
    eta.iter().map(|&e| norming_constant(q0, e, opts)).collect()
}

/// Full pipeline: grid, spectrum, norming constants and the fixed zero at i.
pub fn analyze(q0: &InitialDatum, grid: &GridSpec, angular_resolution: usize, opts: JostOptions) -> Result<ScatteringData> {
    let mut sd = reflection_grid(q0, &grid.build(), opts)?;
    let spec = discrete_spectrum(q0, angular_resolution, opts)?;
    let nc = norming_constants(q0, &spec.eta, opts)?;
    sd.eta = spec.eta;
    sd.c = nc.iter().map(|n| n.c).collect();
    let ai = scattering_coeffs(q0, I, opts)?.a;
    if ai.norm() < 1e-6 {
        sd.fixed_zero = Some(FixedZero { eta: I, residual: ai.norm() });
    }
    Ok(sd)
}

/// a(z) in the upper half plane from r and the discrete spectrum.
pub fn trace_reconstruct_a(sd: &ScatteringData, z: C) -> Result<C> {
    if !(z.im > 0.0) {
        return Err(Error::Precondition(format!("trace formula needs Im z > 0, z = {z}")));
    }
    let mut prod = C::new(1.0, 0.0);
    let zeros = sd.eta.iter().copied().chain(sd.fixed_zero.map(|f| f.eta));
    for e in zeros {
        prod *= (z - e) / (z - e.conj());
    }
    let (lo, hi) = sd.z_range();
    let f = |s: f64| C::new(sd.log_one_minus_r2(s), 0.0) / (s - z);
    let mut breaks = vec![-hi, -1.0, -lo];
    let mut right = vec![lo, 1.0, hi];
    // split near Re z to follow the Cauchy kernel peak
    for b in [z.re - z.im, z.re, z.re + z.im] {
        if b.abs() > lo && b.abs() < hi {
            if b < 0.0 {
                breaks.push(b)
            } else {
                right.push(b)
            }
        }
    }
    breaks.sort_by(f64::total_cmp);
    right.sort_by(f64::total_cmp);
    let (v1, _) = quad::integrate(f, &breaks, 1e-11, 1e-11, 20_000)?;
    let (v2, _) = quad::integrate(f, &right, 1e-11, 1e-11, 20_000)?;
    let integral = v1 + v2;
    Ok(prod * (-(integral) / (2.0 * PI * I)).exp())
}

/// Scattering data at time t; the evolution enters through theta.
#[derive(Debug, Clone)]
pub struct EvolvedData<'a> {
    pub base: &'a ScatteringData,
    pub t: f64,
}

pub fn evolve_data(sd: &ScatteringData, t: f64) -> Result<EvolvedData<'_>> {
    if !(t >= 0.0) {
        return Err(Error::Precondition("t must be non-negative".into()));
    }
    Ok(EvolvedData { base: sd, t })
}

impl EvolvedData<'_> {
    /// t theta(z) at x: lambda (x + (4 k^2 + 2) t).
    fn t_theta(&self, z: C, x: f64) -> C {
        if self.t > 0.0 {
            self.t * theta_unchecked(z, x / self.t)
        } else {
            let p = 0.5 * (z - 1.0 / z);
            p * x
        }
    }

    /// Jump entry r(z) e^{-2 i t theta(z)} at (x, t).
    pub fn jump_entry(&self, z: f64, x: f64) -> C {
        let zc = C::new(z, 0.0);
        self.base.r_at(z) * (-2.0 * I * self.t_theta(zc, x)).exp()
    }

    /// r(t, z): the x-independent part of the evolution.
    pub fn r_at(&self, z: f64) -> C {
        self.jump_entry(z, 0.0)
    }

    /// Jump matrix [[1 - |r|^2, -conj(r) e^{2 i t theta}], [r e^{-2 i t theta}, 1]].
    pub fn jump_matrix(&self, z: f64, x: f64) -> [[C; 2]; 2] {
        let e = self.jump_entry(z, x);
        [[C::new(1.0 - e.norm_sqr(), 0.0), -e.conj()], [e, C::new(1.0, 0.0)]]
    }

    /// c_n e^{-2 i t theta(eta_n)} at x.
    pub fn residue_factor(&self, n: usize, x: f64) -> C {
        let e = self.base.eta[n];
        self.base.c[n] * (-2.0 * I * self.t_theta(e, x)).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn datum() -> InitialDatum {
        InitialDatum::tanh_gaussian(0.3, 0.0, 2.0, 15.0).unwrap()
    }

    #[test]
    fn tanh_is_reflectionless() {
        let q0 = InitialDatum::tanh(15.0);
        for z in [-3.0, -0.4, 0.2, 0.8, 1.5, 6.0] {
            let c = scattering_coeffs(&q0, C::new(z, 0.0), JostOptions::default()).unwrap();
            assert!(c.r.unwrap().norm() < 1e-8, "z={z} r={}", c.r.unwrap());
            // a = (z - i)/(z + i)
            let want = (C::new(z, 0.0) - I) / (C::new(z, 0.0) + I);
            assert!((c.a - want).norm() < 1e-8);
        }
    }

    #[test]
    fn unitarity_and_symmetry() {
        let q0 = datum();
        let o = JostOptions::default();
        for z in [0.1, 0.37, 0.8, 1.3, 2.0, 5.0] {
            let c = scattering_coeffs(&q0, C::new(z, 0.0), o).unwrap();
            let u = c.a.norm_sqr() - c.b.unwrap().norm_sqr();
            assert!((u - 1.0).abs() < 1e-8, "z={z} u={u}");
            assert!(c.match_defect < 1e-8);
            let m = scattering_coeffs(&q0, C::new(-z, 0.0), o).unwrap();
            let i = scattering_coeffs(&q0, C::new(1.0 / z, 0.0), o).unwrap();
            assert!((m.r.unwrap() - c.r.unwrap().conj()).norm() < 1e-8);
            assert!((i.r.unwrap() + c.r.unwrap().conj()).norm() < 1e-8);
        }
    }

    #[test]
    fn a_symmetries_off_axis() {
        let q0 = datum();
        let o = JostOptions::default();
        for z in [C::new(0.4, 0.3), C::new(-1.2, 0.8), C::new(2.0, 0.5)] {
            let a = scattering_coeffs(&q0, z, o).unwrap().a;
            let am = scattering_coeffs(&q0, -z.conj(), o).unwrap().a;
            let ai = scattering_coeffs(&q0, 1.0 / z.conj(), o).unwrap().a;
            assert!((am - a.conj()).norm() < 1e-8);
            assert!((ai + a.conj()).norm() < 1e-8);
        }
    }

    #[test]
    fn edge_values_of_r() {
        let q0 = datum();
        let o = JostOptions::default();
        let r1 = scattering_coeffs(&q0, C::new(1.0, 0.0), o).unwrap().r.unwrap();
        let rm = scattering_coeffs(&q0, C::new(-1.0, 0.0), o).unwrap().r.unwrap();
        assert!((r1 + I).norm() < 1e-6, "{r1}");
        assert!((rm - I).norm() < 1e-6, "{rm}");
    }

    #[test]
    fn a_limits_at_infinity_and_zero() {
        let q0 = datum();
        let o = JostOptions::default();
        let m = q0.mass();
        let want = I * m;
        let z = C::new(0.0, 200.0);
        let a = scattering_coeffs(&q0, z, o).unwrap().a;
        assert!(((a - 1.0) * z - want).norm() < 2e-2 * want.norm(), "{}", (a - 1.0) * z);
        let z = C::new(0.0, 1.0 / 200.0);
        let a = scattering_coeffs(&q0, z, o).unwrap().a;
        assert!(((a + 1.0) / z - want).norm() < 2e-2 * want.norm(), "{}", (a + 1.0) / z);
    }

    #[test]
    fn spectrum_and_norming() {
        let q0 = datum();
        let o = JostOptions::default();
        let sp = discrete_spectrum(&q0, 200, o).unwrap();
        assert!(!sp.eta.is_empty());
        for e in &sp.eta {
            assert!((e.norm() - 1.0).abs() < 1e-14 && e.im > 0.0);
            assert!(scattering_coeffs(&q0, *e, o).unwrap().a.norm() < 1e-8);
            assert!(sp.eta.iter().any(|m| (*m + e.conj()).norm() < 1e-12));
        }
        let nc = norming_constants(&q0, &sp.eta, o).unwrap();
        let n = nc[0];
        let p = UniformizedPoint::new(n.eta).unwrap();
        // residue identity at points not used in the fit
        for x in [-0.5, 0.7, 3.0] {
            let u = integrate_jost(&q0, n.eta, Side::Plus, Column::First, x, o).unwrap();
            let v = integrate_jost(&q0, n.eta, Side::Minus, Column::Second, x, o).unwrap();
            let e = n.c * (-2.0 * I * p.lambda * x).exp();
            for k in 0..2 {
                assert!((u[k] / n.a_prime - e * v[k]).norm() < 1e-6 * (u[k] / n.a_prime).norm().max(1e-3));
            }
        }
        // small perturbation of the datum
        let q1 = InitialDatum::tanh_gaussian(0.3 + 1e-6, 0.0, 2.0, 15.0).unwrap();
        let sp1 = discrete_spectrum(&q1, 200, o).unwrap();
        let c1 = norming_constant(&q1, sp1.eta[0], o).unwrap().c;
        assert!((c1 - n.c).norm() < 1e-3 * n.c.norm().max(1.0));
        assert!(norming_constants(&q0, &[], o).unwrap().is_empty());
    }

    #[test]
    fn tanh_spectrum_reports_i() {
        let q0 = InitialDatum::tanh(15.0);
        let sp = discrete_spectrum(&q0, 101, JostOptions::default()).unwrap();
        assert!(sp.eta.is_empty());
        let ai = scattering_coeffs(&q0, I, JostOptions::default()).unwrap().a;
        assert!(ai.norm() < 1e-10);
    }

    #[test]
    fn grid_layout() {
        let g = GridSpec::default().build();
        assert!(g.iter().all(|&z| z.abs().ln().abs() >= (1.0 + POLE_EXCLUSION).ln() - 1e-15 && z != 0.0));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        for &x in &[0.517_638, 1.931_852] {
            assert!(g.iter().filter(|&&z| (z - x).abs() < 0.1).count() >= 8);
        }
    }

    #[test]
    fn trivial_trace_is_one() {
        let sd = ScatteringData::trivial();
        let a = trace_reconstruct_a(&sd, C::new(0.3, 0.4)).unwrap();
        assert!((a - 1.0).norm() < 1e-12, "{a}");
    }

    #[test]
    fn evolution_is_a_phase() {
        let sd = ScatteringData::trivial().scaled(0.5);
        let sd = {
            let mut s = sd;
            for r in s.r_values.iter_mut() {
                *r = C::new(0.3, 0.1);
            }
            ScatteringData::from_parts(s.datum.clone(), s.z_grid.clone(), s.r_values.clone(), s.a_values.clone(), s.b_values.clone(), s.wronskian.clone())
        };
        let e0 = evolve_data(&sd, 0.0).unwrap();
        let e = evolve_data(&sd, 7.5).unwrap();
        for z in [-2.0, 0.3, 1.7] {
            assert!((e0.r_at(z) - sd.r_at(z)).norm() < 1e-15);
            assert!((e.r_at(z).norm() - sd.r_at(z).norm()).abs() < 1e-14);
            let v = e.jump_matrix(z, 3.0);
            let d = v[0][0] * v[1][1] - v[0][1] * v[1][0];
            assert!((d - 1.0).norm() < 1e-14);
        }
    }
}
