//! Phase function, saddle points, velocity sectors and signature tables.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default merge tolerance on |xi^2 - 36|.
pub const MERGE_TOL: f64 = 1e-8;

/// A point of the uniformized spectral plane with its lambda and k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformizedPoint {
    pub z: Complex64,
    pub lambda: Complex64,
    pub k: Complex64,
}

impl UniformizedPoint {
    pub fn new(z: Complex64) -> Result<Self> {
        nonzero(z)?;
        let zi = 1.0 / z;
        Ok(UniformizedPoint { z, lambda: 0.5 * (z - zi), k: 0.5 * (z + zi) })
    }
}

fn nonzero(z: Complex64) -> Result<()> {
    if z.norm() == 0.0 {
        Err(Error::Domain("z = 0".into()))
    } else {
        Ok(())
    }
}

/// theta(z) = (z - 1/z)/2 * [xi + 2 + (z + 1/z)^2].
pub fn theta(z: Complex64, xi: f64) -> Result<Complex64> {
    nonzero(z)?;
    Ok(theta_unchecked(z, xi))
}

#[inline]
pub(crate) fn theta_unchecked(z: Complex64, xi: f64) -> Complex64 {
    let zi = 1.0 / z;
    let s = z + zi;
    0.5 * (z - zi) * (xi + 2.0 + s * s)
}

/// (theta', theta'').
pub fn theta_derivatives(z: Complex64, xi: f64) -> Result<(Complex64, Complex64)> {
    nonzero(z)?;
    let z2 = z * z;
    let zi2 = 1.0 / z2;
    let c = xi + 3.0;
    let t1 = 1.5 * z2 + 0.5 * c * zi2 + 1.5 * zi2 * zi2 + 0.5 * c;
    let zi = 1.0 / z;
    let zi3 = zi * zi2;
    let t2 = 3.0 * z - c * zi3 - 6.0 * zi3 * zi2;
    Ok((t1, t2))
}

/// Closed-form imaginary part of theta.
pub fn im_theta_closed(z: Complex64, xi: f64) -> Result<f64> {
    nonzero(z)?;
    let c = xi + 3.0;
    let m2 = z.norm_sqr();
    let zb = z.conj();
    Ok(0.5 * c * z.im - 0.5 * c / m2 * zb.im + 0.5 * (z * z * z).im
        - 0.5 / (m2 * m2 * m2) * (zb * zb * zb).im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    LeftField,
    MiddleField,
    RightField,
    NearBoundary,
}

impl Region {
    pub fn as_str(&self) -> &'static str {
        match self {
            Region::LeftField => "left",
            Region::MiddleField => "middle",
            Region::RightField => "right",
            Region::NearBoundary => "near_boundary",
        }
    }
}

pub fn classify_region(xi: f64, margin: f64) -> Region {
    if xi < -6.0 - margin {
        Region::LeftField
    } else if xi.abs() < 6.0 - margin {
        Region::MiddleField
    } else if xi > 6.0 + margin {
        Region::RightField
    } else {
        Region::NearBoundary
    }
}

/// Velocity together with the four moving saddles.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseContext {
    pub xi: f64,
    pub region: Region,
    pub saddles: [Complex64; 4],
    pub fixed_saddles: [Complex64; 2],
    pub epsilons: [f64; 4],
    pub theta_pp: [Complex64; 4],
}

impl PhaseContext {
    /// Real saddle j (1-based) in the left field.
    pub fn real_saddle(&self, j: usize) -> f64 {
        self.saddles[j - 1].re
    }
}

/// The four roots of 3z^4 + xi z^2 + 3 = 0 in the subscript convention,
/// with theta'' at each. The region is classified with zero margin.
pub fn saddle_points(xi: f64) -> Result<PhaseContext> {
    saddle_points_tol(xi, MERGE_TOL)
}

pub fn saddle_points_tol(xi: f64, merge_tol: f64) -> Result<PhaseContext> {
    if !xi.is_finite() {
        return Err(Error::Domain("xi not finite".into()));
    }
    let disc = xi * xi - 36.0;
    if disc.abs() < merge_tol {
        return Err(Error::NearBoundary { xi });
    }
    let (s, region) = if xi < -6.0 {
        let sq = disc.sqrt();
        let x1 = (-(xi - sq) / 6.0).sqrt();
        let x2 = (-(xi + sq) / 6.0).sqrt();
        let c = |v: f64| Complex64::new(v, 0.0);
        ([c(x1), c(x2), c(-x2), c(-x1)], Region::LeftField)
    } else if xi > 6.0 {
        let sq = disc.sqrt();
        let y1 = ((xi + sq) / 6.0).sqrt();
        let y2 = ((xi - sq) / 6.0).sqrt();
        let c = |v: f64| Complex64::new(0.0, v);
        ([c(y1), c(y2), c(-y2), c(-y1)], Region::RightField)
    } else {
        let sq = (-disc).sqrt();
        let wp = Complex64::new(-xi / 6.0, sq / 6.0);
        let wm = wp.conj();
        let (a, b) = (wp.sqrt(), wm.sqrt());
        ([a, b, -b, -a], Region::MiddleField)
    };
    let mut tpp = [Complex64::new(0.0, 0.0); 4];
    for j in 0..4 {
        tpp[j] = theta_derivatives(s[j], xi)?.1;
    }
    Ok(PhaseContext {
        xi,
        region,
        saddles: s,
        fixed_saddles: [I, -I],
        epsilons: [1.0, -1.0, 1.0, -1.0],
        theta_pp: tpp,
    })
}

/// Durand-Kerner roots of 3z^4 + xi z^2 + 3, used to cross-check the closed forms.
pub fn saddle_roots_numeric(xi: f64) -> [Complex64; 4] {
    let p = |z: Complex64| z * z * (z * z + xi / 3.0) + 1.0;
    let mut r = [
        Complex64::new(0.4, 0.9),
        Complex64::new(0.4, 0.9).powu(2),
        Complex64::new(0.4, 0.9).powu(3),
        Complex64::new(0.4, 0.9).powu(4),
    ];
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..4 {
            let mut d = Complex64::new(1.0, 0.0);
            for j in 0..4 {
                if i != j {
                    d *= r[i] - r[j];
                }
            }
            let step = p(r[i]) / d;
            r[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-16 {
            break;
        }
    }
    // Newton polish on the quartic itself
    for z in r.iter_mut() {
        for _ in 0..3 {
            let f = p(*z);
            let df = 4.0 * *z * *z * *z + 2.0 * xi / 3.0 * *z;
            if df.norm() > 0.0 {
                *z -= f / df;
            }
        }
    }
    r
}

/// Signature cell value: +1, -1, 0 on the axis, None at z = 0.
pub fn im_theta_sign(z: Complex64, xi: f64) -> Option<i8> {
    if z.norm() == 0.0 {
        return None;
    }
    if z.im == 0.0 {
        return Some(0);
    }
    let v = theta_unchecked(z, xi).im;
    Some(if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignatureCell {
    pub z: Complex64,
    pub sign: Option<i8>,
}

/// Sign of Im theta at cell centres of an nx-by-ny grid, row-major in y.
pub fn signature_grid(xi: f64, w: Window, nx: usize, ny: usize) -> Result<Vec<SignatureCell>> {
    if nx == 0 || ny == 0 || !(w.re_max > w.re_min) || !(w.im_max > w.im_min) {
        return Err(Error::Precondition("empty signature window".into()));
    }
    let dx = (w.re_max - w.re_min) / nx as f64;
    let dy = (w.im_max - w.im_min) / ny as f64;
    Ok((0..nx * ny)
        .into_par_iter()
        .map(|c| {
            let (iy, ix) = (c / nx, c % nx);
            let z = Complex64::new(w.re_min + (ix as f64 + 0.5) * dx, w.im_min + (iy as f64 + 0.5) * dy);
            SignatureCell { z, sign: im_theta_sign(z, xi) }
        })
        .collect())
}

/// One lens sector: a wedge at `vertex` between the real axis and a ray at
/// angle `dir`, truncated at `re_limit` (segments) or at radius `r_max` (rays).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sector {
    pub name: &'static str,
    pub vertex: f64,
    /// direction of the bounding line Sigma_jk
    pub dir: f64,
    /// direction of the real-axis side (0 or pi)
    pub axis: f64,
    /// bound on |Re z - vertex| for segment sectors
    pub half_width: Option<f64>,
    /// expected sign of Im theta
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LensGeometry {
    pub xi: f64,
    pub phi: f64,
    pub upsilon: f64,
    pub d: f64,
    pub d_tilde: f64,
    pub sectors: Vec<Sector>,
}

/// Largest admissible lens angle: the cone from xi_2, xi_3 must avoid the
/// discrete spectrum and the angle may not exceed pi/4.
pub fn lens_angle_bound(ctx: &PhaseContext, spectrum: &[Complex64]) -> f64 {
    let mut theta0 = PI / 2.0;
    for &eta in spectrum {
        for j in [2usize, 3] {
            let dx = (eta.re - ctx.real_saddle(j)).abs();
            let a = eta.im.abs().atan2(dx);
            theta0 = theta0.min(a);
        }
    }
    theta0.min(PI / 4.0)
}

/// Default lens angle: min(pi/24, feasibility bound) with a small safety factor.
pub fn default_lens_angle(ctx: &PhaseContext, spectrum: &[Complex64]) -> f64 {
    (PI / 24.0).min(0.9 * lens_angle_bound(ctx, spectrum))
}

pub fn lens_geometry(xi: f64, phi: f64, spectrum: &[Complex64]) -> Result<LensGeometry> {
    let ctx = saddle_points(xi)?;
    if ctx.region != Region::LeftField {
        return Err(Error::Precondition(format!("lens sectors need xi < -6, got {xi}")));
    }
    let ups = lens_angle_bound(&ctx, spectrum);
    if !(phi > 0.0 && phi < ups) {
        return Err(Error::LensInfeasible { phi, bound: ups });
    }
    let (x1, x2) = (ctx.real_saddle(1), ctx.real_saddle(2));
    let d = x2 / (2.0 * phi.cos());
    let d_tilde = (x1 - x2) / (2.0 * phi.cos());
    debug_assert!(d < x2 / (2.0 * ups.cos()) && d_tilde < (x1 - x2) / (2.0 * ups.cos()));
    let h0 = x2 / 2.0;
    let h1 = (x1 - x2) / 2.0;
    let mut s = Vec::new();
    let mut push = |name, vertex, dir: f64, half_width, sign| {
        let axis = if dir.cos() > 0.0 { 0.0 } else { PI };
        s.push(Sector { name, vertex, dir, axis, half_width, sign });
    };
    // near zero
    push("O0+1", 0.0, phi, Some(h0), 1);
    push("O0+2", 0.0, -phi, Some(h0), -1);
    push("O0-1", 0.0, PI - phi, Some(h0), 1);
    push("O0-2", 0.0, -(PI - phi), Some(h0), -1);
    for j in 1..=4usize {
        let v = ctx.real_saddle(j);
        let jf = j as f64;
        let sgn = |k: i32| if k % 2 == 0 { 1.0 } else { -1.0 };
        let a12 = (jf - 1.0) * PI + sgn(j as i32 - 1) * phi;
        let a34 = jf * PI + sgn(j as i32) * phi;
        let (hw12, hw34) = match j {
            1 | 4 => (None, Some(h1)),
            _ => (Some(h0), Some(h1)),
        };
        // Props: j = 2,3: k = 1,3 positive; j = 1,4: k = 1,3 positive
        let names: [&'static str; 4] = match j {
            1 => ["O11", "O12", "O13", "O14"],
            2 => ["O21", "O22", "O23", "O24"],
            3 => ["O31", "O32", "O33", "O34"],
            _ => ["O41", "O42", "O43", "O44"],
        };
        push(names[0], v, a12, hw12, 1);
        push(names[1], v, -a12, hw12, -1);
        push(names[2], v, -a34, hw34, 1);
        push(names[3], v, a34, hw34, -1);
    }
    Ok(LensGeometry { xi, phi, upsilon: ups, d, d_tilde, sectors: s })
}

fn wrap(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

impl Sector {
    /// Random interior point; rays are sampled log-uniformly in radius up to r_max.
    fn sample(&self, rng: &mut ChaCha8Rng, phi: f64, r_max: f64) -> Complex64 {
        let dir = wrap(self.dir);
        let offset = wrap(dir - self.axis);
        loop {
            let u: f64 = rng.gen_range(1e-6..1.0);
            let psi = self.axis + offset * u;
            let rho = match self.half_width {
                Some(hw) => {
                    let rmax = hw / psi.cos().abs();
                    rmax * rng.gen_range(1e-9f64..1.0).sqrt()
                }
                None => {
                    let lo = 1e-6f64.ln();
                    (lo + (r_max.ln() - lo) * rng.gen::<f64>()).exp()
                }
            };
            let z = Complex64::new(self.vertex, 0.0) + Complex64::from_polar(rho, psi);
            if z.im != 0.0 && z.norm() > 0.0 {
                let _ = phi;
                return z;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub sector: &'static str,
    pub z: Complex64,
    pub im_theta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignReport {
    pub geometry: LensGeometry,
    pub samples_per_sector: usize,
    pub violations: Vec<Violation>,
}

/// Sample every lens sector and report points whose Im theta has the wrong sign.
pub fn check_sign_regions(
    xi: f64,
    phi: f64,
    n_samples: usize,
    spectrum: &[Complex64],
    seed: u64,
) -> Result<SignReport> {
    let g = lens_geometry(xi, phi, spectrum)?;
    let r_max = 50.0 * g.d_tilde.max(1.0);
    let violations: Vec<Violation> = g
        .sectors
        .par_iter()
        .enumerate()
        .flat_map_iter(|(i, s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(i as u64));
            let mut out = Vec::new();
            for _ in 0..n_samples {
                let z = s.sample(&mut rng, phi, r_max);
                let v = theta_unchecked(z, xi).im;
                if (v > 0.0 && s.sign < 0) || (v < 0.0 && s.sign > 0) || v == 0.0 {
                    out.push(Violation { sector: s.name, z, im_theta: v });
                }
            }
            out
        })
        .collect();
    Ok(SignReport { geometry: g, samples_per_sector: n_samples, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn theta_examples() {
        assert!(theta(c(1.0, 0.0), -3.7).unwrap().norm() < 1e-15);
        assert!((theta(I, -12.0).unwrap() - c(0.0, -10.0)).norm() < 1e-14);
        assert!((theta(c(2.0, 0.0), -12.0).unwrap() - c(-2.8125, 0.0)).norm() < 1e-14);
        assert!(theta(c(0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn lambda_k_form() {
        let p = UniformizedPoint::new(c(0.7, -1.3)).unwrap();
        assert!((p.lambda * p.lambda - (p.k * p.k - 1.0)).norm() < 1e-14);
        let xi = -9.5;
        let alt = p.lambda * (xi + 4.0 * p.k * p.k + 2.0);
        assert!((alt - theta(p.z, xi).unwrap()).norm() < 1e-13);
    }

    #[test]
    fn second_derivative_matches_differences() {
        for &(z, xi) in &[(c(1.3, 0.2), -12.0), (c(-0.4, 0.9), 3.0), (c(2.0, 0.0), -8.0)] {
            let h = 1e-4;
            let (t1, t2) = theta_derivatives(z, xi).unwrap();
            let f = |w| theta(w, xi).unwrap();
            let d1 = (f(z + h) - f(z - h)) / (2.0 * h);
            let d2 = (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
            assert!((d1 - t1).norm() / t1.norm() < 1e-6);
            assert!((d2 - t2).norm() / t2.norm() < 1e-6);
        }
    }

    #[test]
    fn saddle_examples() {
        let p = saddle_points(-12.0).unwrap();
        let s = (2.0 + 3f64.sqrt()).sqrt();
        assert!((p.saddles[0].re - s).abs() < 1e-14);
        assert!((p.saddles[0].re - 1.931_851_7).abs() < 1e-7);
        assert!((p.saddles[1].re - 0.517_638_1).abs() < 1e-7);
        assert!((p.theta_pp[0].re - 6.82).abs() < 0.01, "{}", p.theta_pp[0]);
        let q = saddle_points(12.0).unwrap();
        assert!((q.saddles[0] - c(0.0, 1.931_851_7)).norm() < 1e-7);
        assert!((q.saddles[0] * q.saddles[1] + 1.0).norm() < 1e-12);
        assert!(matches!(saddle_points(-6.0), Err(Error::NearBoundary { .. })));
        for z in [I, -I] {
            assert!(theta_derivatives(z, -12.0).unwrap().0.norm() < 1e-12);
        }
    }

    #[test]
    fn coalescence_at_minus_six() {
        for d in [1e-6, 1e-4] {
            let p = saddle_points(-6.0 - d).unwrap();
            for s in p.saddles {
                assert!((s.norm() - 1.0).abs() < 0.1);
            }
        }
    }

    #[test]
    fn closed_forms_match_numeric_roots() {
        for &xi in &[-19.0, -12.0, -6.7, -2.0, 0.5, 7.0, 15.0] {
            let p = saddle_points(xi).unwrap();
            let mut num = saddle_roots_numeric(xi).to_vec();
            for s in p.saddles {
                let (k, d) = num
                    .iter()
                    .enumerate()
                    .map(|(k, r)| (k, (r - s).norm()))
                    .min_by(|a, b| a.1.total_cmp(&b.1))
                    .unwrap();
                assert!(d < 1e-10, "xi={xi} s={s} d={d}");
                num.remove(k);
            }
        }
    }

    #[test]
    fn regions() {
        assert_eq!(classify_region(-10.0, 0.1), Region::LeftField);
        assert_eq!(classify_region(0.0, 0.1), Region::MiddleField);
        assert_eq!(classify_region(6.05, 0.1), Region::NearBoundary);
        assert_eq!(classify_region(7.0, 0.1), Region::RightField);
    }

    #[test]
    fn signature_examples() {
        let w = Window { re_min: -3.0, re_max: 3.0, im_min: -2.0, im_max: 2.0 };
        let g = signature_grid(-12.0, w, 30, 20).unwrap();
        assert_eq!(g.len(), 600);
        // upper unit circle has Im theta < 0 in the left field
        for k in 1..50 {
            let psi = PI * k as f64 / 50.0;
            assert_eq!(im_theta_sign(Complex64::from_polar(1.0, psi), -12.0), Some(-1));
        }
        assert_eq!(im_theta_sign(c(0.3, 0.0), -12.0), Some(0));
        assert_eq!(im_theta_sign(c(0.0, 0.0), -12.0), None);
        let p = saddle_points(12.0).unwrap();
        let y = 0.5 * p.saddles[1].im;
        let direct = theta(c(0.0, y), 12.0).unwrap().im;
        assert_eq!(im_theta_sign(c(0.0, y), 12.0), Some(direct.signum() as i8));
    }

    #[test]
    fn sign_regions_clean() {
        for xi in [-8.0, -12.0] {
            let r = check_sign_regions(xi, PI / 24.0, 2000, &[I], 7).unwrap();
            assert!(r.violations.is_empty(), "{:?}", &r.violations[..r.violations.len().min(5)]);
        }
    }

    #[test]
    fn sign_regions_infeasible() {
        assert!(matches!(
            check_sign_regions(-8.0, PI / 3.0, 10, &[I], 1),
            Err(Error::LensInfeasible { .. })
        ));
    }

    proptest! {
        #[test]
        fn phase_symmetries(re in -4.0f64..4.0, im in -4.0f64..4.0, xi in -20.0f64..20.0) {
            let z = c(re, im);
            prop_assume!(z.norm() > 1e-2);
            let t = theta(z, xi).unwrap();
            let tol = 1e-12 * (1.0 + t.norm());
            prop_assert!((theta(-z, xi).unwrap() + t).norm() < tol);
            prop_assert!((theta(1.0 / z, xi).unwrap() + t).norm() < tol);
            let closed = im_theta_closed(z, xi).unwrap();
            prop_assert!((closed - t.im).abs() < tol);
        }

        #[test]
        fn left_saddle_invariants(xi in -20.0f64..-6.5) {
            let p = saddle_points(xi).unwrap();
            let s: Vec<f64> = p.saddles.iter().map(|z| z.re).collect();
            prop_assert!(s[3] < -1.0 && -1.0 < s[2] && s[2] < 0.0 && 0.0 < s[1] && s[1] < 1.0 && 1.0 < s[0]);
            prop_assert!((s[0] * s[1] - 1.0).abs() < 1e-12);
            for j in 0..4 {
                prop_assert!(theta_derivatives(p.saddles[j], xi).unwrap().0.norm() < 1e-10);
                prop_assert!(p.epsilons[j] * p.theta_pp[j].re > 0.0);
            }
        }
    }
}
