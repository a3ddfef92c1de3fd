//! Modified Jost columns by a fourth-order Magnus integrator.
//!
//! mu_x = i k sigma3 mu + Q mu - i lambda mu sigma3, started at x = +-L
//! from the columns of E_+-(z). The 2x2 exponentials are evaluated in closed
//! form, so the scheme stays accurate when |z| is large.

use super::datum::InitialDatum;
use crate::error::{Error, Result};
use crate::phase::{UniformizedPoint, I};
use num_complex::Complex64;

type C = Complex64;
type V2 = [C; 2];
type M2 = [[C; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Column {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JostOptions {
    /// target step in x
    pub h: f64,
}

impl Default for JostOptions {
    fn default() -> Self {
        JostOptions { h: 0.01 }
    }
}

/// Column of E_+-(z) = [[1, +-i/z], [-+i/z, 1]].
pub fn background_column(z: C, side: Side, col: Column) -> V2 {
    let s = if side == Side::Plus { 1.0 } else { -1.0 };
    let iz = I / z;
    match col {
        Column::First => [C::new(1.0, 0.0), -s * iz],
        Column::Second => [s * iz, C::new(1.0, 0.0)],
    }
}

/// exp of a traceless 2x2 matrix.
fn expm_traceless(n: &M2) -> M2 {
    let s2 = n[0][0] * n[0][0] + n[0][1] * n[1][0];
    let s = s2.sqrt();
    let (ch, sh) = if s.norm() < 1e-4 {
        // series in s^2
        let ch = 1.0 + s2 / 2.0 + s2 * s2 / 24.0 + s2 * s2 * s2 / 720.0;
        let sh = 1.0 + s2 / 6.0 + s2 * s2 / 120.0 + s2 * s2 * s2 / 5040.0;
        (ch, sh)
    } else {
        (s.cosh(), s.sinh() / s)
    };
    [[ch + sh * n[0][0], sh * n[0][1]], [sh * n[1][0], ch + sh * n[1][1]]]
}

fn analytic_ok(z: C, side: Side, col: Column) -> bool {
    match (side, col) {
        (Side::Plus, Column::First) | (Side::Minus, Column::Second) => z.im >= 0.0,
        _ => z.im <= 0.0,
    }
}

/// Integrate one modified Jost column and return its value at each x in `xs`.
pub fn jost_path(
    q0: &InitialDatum,
    z: C,
    side: Side,
    col: Column,
    xs: &[f64],
    opts: JostOptions,
) -> Result<Vec<V2>> {
    let p = UniformizedPoint::new(z)?;
    if !analytic_ok(z, side, col) {
        return Err(Error::Precondition(format!(
            "column {col:?} of mu_{side:?} is not bounded at z = {z}"
        )));
    }
    let l = q0.half_width;
    let x0 = if side == Side::Plus { l } else { -l };
    let dir = if side == Side::Plus { -1.0 } else { 1.0 };
    // visit requested points in integration order
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| (dir * xs[a]).total_cmp(&(dir * xs[b])));
    let scalar = if col == Column::First { -I * p.lambda } else { I * p.lambda };
    let ik = I * p.k;
    let c1 = 0.5 - 3f64.sqrt() / 6.0;
    let c2 = 0.5 + 3f64.sqrt() / 6.0;
    let kc = 3f64.sqrt() / 12.0;
    let mut y = background_column(z, side, col);
    let mut x = x0;
    let mut out = vec![[C::new(0.0, 0.0); 2]; xs.len()];
    for &i in &order {
        let target = xs[i];
        if dir * (target - x) <= 0.0 {
            // beyond the start: exact background
            out[i] = if dir * (target - x0) <= 0.0 { background_column(z, side, col) } else { y };
            continue;
        }
        let span = target - x;
        let n = (span.abs() / opts.h).ceil().max(1.0) as usize;
        let h = span / n as f64;
        for s in 0..n {
            let xa = x + s as f64 * h;
            let q1 = q0.eval(xa + c1 * h);
            let q2 = q0.eval(xa + c2 * h);
            // commutator [A2, A1] of A = [[ik, q], [q, -ik]]
            let dq = q2 - q1;
            let comm01 = 2.0 * ik * (-dq);
            let comm10 = 2.0 * ik * dq;
            let hs = 0.5 * h;
            let kh2 = kc * h * h;
            let nmat = [
                [hs * 2.0 * ik, C::new(hs * (q1 + q2), 0.0) + kh2 * comm01],
                [C::new(hs * (q1 + q2), 0.0) + kh2 * comm10, -hs * 2.0 * ik],
            ];
            let e = expm_traceless(&nmat);
            let f = (scalar * h).exp();
            y = [f * (e[0][0] * y[0] + e[0][1] * y[1]), f * (e[1][0] * y[0] + e[1][1] * y[1])];
        }
        x = target;
        if !(y[0].norm() + y[1].norm()).is_finite() || y[0].norm() + y[1].norm() > 1e12 {
            return Err(Error::NonConvergence(format!("Jost column blew up at z = {z}")));
        }
        out[i] = y;
    }
    Ok(out)
}

/// Single-point convenience wrapper.
pub fn integrate_jost(
    q0: &InitialDatum,
    z: C,
    side: Side,
    col: Column,
    x: f64,
    opts: JostOptions,
) -> Result<V2> {
    Ok(jost_path(q0, z, side, col, &[x], opts)?[0])
}

pub fn det(u: &V2, v: &V2) -> C {
    u[0] * v[1] - u[1] * v[0]
}
