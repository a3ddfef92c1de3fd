//! Local polynomial interpolation on sorted, possibly nonuniform nodes.

use num_complex::Complex64;

/// Index of the first node of the `m`-point stencil around `x`.
fn stencil_start(xs: &[f64], x: f64, m: usize) -> usize {
    let n = xs.len();
    let i = xs.partition_point(|&v| v < x);
    let half = m / 2;
    let lo = i.saturating_sub(half);
    lo.min(n.saturating_sub(m))
}

/// Lagrange interpolation through the `m` nodes nearest `x`.
pub fn lagrange<T>(xs: &[f64], ys: &[T], x: f64, m: usize) -> T
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    let m = m.min(xs.len());
    let s = stencil_start(xs, x, m);
    let mut acc: Option<T> = None;
    for i in s..s + m {
        let mut w = 1.0;
        for j in s..s + m {
            if j != i {
                w *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        let term = ys[i] * w;
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    acc.expect("empty stencil")
}

/// Derivative of the local `m`-point interpolant at `x`.
pub fn lagrange_deriv(xs: &[f64], ys: &[f64], x: f64, m: usize) -> f64 {
    let m = m.min(xs.len());
    let s = stencil_start(xs, x, m);
    let mut acc = 0.0;
    for i in s..s + m {
        let mut denom = 1.0;
        for j in s..s + m {
            if j != i {
                denom *= xs[i] - xs[j];
            }
        }
        let mut num = 0.0;
        for k in s..s + m {
            if k == i {
                continue;
            }
            let mut p = 1.0;
            for j in s..s + m {
                if j != i && j != k {
                    p *= x - xs[j];
                }
            }
            num += p;
        }
        acc += ys[i] * num / denom;
    }
    acc
}

/// Complex convenience wrapper used by the scattering grids.
pub fn lagrange_c(xs: &[f64], ys: &[Complex64], x: f64, m: usize) -> Complex64 {
    lagrange(xs, ys, x, m)
}

/// Piecewise cubic Hermite interpolant with slopes from the local
/// five-point interpolant; fourth order and C1 on nonuniform nodes.
#[derive(Debug, Clone)]
pub struct Hermite {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl Hermite {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Self {
        let ds = xs.iter().map(|&x| lagrange_deriv(&xs, &ys, x, 5)).collect();
        Hermite { xs, ys, ds }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        let i = self.xs.partition_point(|&v| v <= x).clamp(1, n - 1) - 1;
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.ys[i] + h10 * h * self.ds[i] + h01 * self.ys[i + 1] + h11 * h * self.ds[i + 1]
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.xs, &self.ys)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quartic_exact_on_quartics() {
        let xs: Vec<f64> = (0..12).map(|i| (i as f64 * 0.37).powf(1.3)).collect();
        let p = |x: f64| 1.0 - 2.0 * x + 0.5 * x.powi(3) - 0.1 * x.powi(4);
        let ys: Vec<f64> = xs.iter().map(|&x| p(x)).collect();
        for &x in &[0.05, 1.1, 2.7, 4.0] {
            assert!((lagrange(&xs, &ys, x, 5) - p(x)).abs() < 1e-10);
        }
    }

    #[test]
    fn hermite_fourth_order() {
        let err = |n: usize| {
            let xs: Vec<f64> = (0..=n).map(|i| -3.0 + 6.0 * i as f64 / n as f64).collect();
            let ys = xs.iter().map(|x| x.tanh()).collect();
            let h = Hermite::new(xs, ys);
            (0..997)
                .map(|k| {
                    let x = -2.9 + 5.8 * k as f64 / 996.0;
                    (h.eval(x) - x.tanh()).abs()
                })
                .fold(0.0, f64::max)
        };
        let order = (err(60) / err(120)).log2();
        assert!(order > 3.5, "order {order}");
    }
}
