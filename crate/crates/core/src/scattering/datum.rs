use crate::error::{Error, Result};
use crate::interp::Hermite;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Tail tolerance for |q0(+-L) -+ 1|.
pub const TAIL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DatumKind {
    TanhPreset,
    /// tanh(x) + amplitude * exp(-((x - center)/width)^2)
    TanhPlusGaussian { amplitude: f64, center: f64, width: f64 },
    Sampled { x: Vec<f64>, q: Vec<f64> },
}

/// Real initial datum with q0 -> -1 on the left and +1 on the right.
#[derive(Debug, Clone)]
pub struct InitialDatum {
    pub kind: DatumKind,
    pub half_width: f64,
    interp: Option<Hermite>,
}

impl InitialDatum {
    pub fn tanh(half_width: f64) -> Self {
        InitialDatum { kind: DatumKind::TanhPreset, half_width, interp: None }
    }

    pub fn tanh_gaussian(amplitude: f64, center: f64, width: f64, half_width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::Precondition("gaussian width must be positive".into()));
        }
        let d = InitialDatum {
            kind: DatumKind::TanhPlusGaussian { amplitude, center, width },
            half_width,
            interp: None,
        };
        d.check_tails()?;
        Ok(d)
    }

    pub fn sampled(x: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if x.len() != q.len() || x.len() < 6 {
            return Err(Error::Precondition("sampled datum needs >= 6 matching samples".into()));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Precondition("sample grid must be strictly increasing".into()));
        }
        let half_width = (-x[0]).min(x[x.len() - 1]);
        if !(half_width > 0.0) {
            return Err(Error::Precondition("sample grid must straddle x = 0".into()));
        }
        let h = Hermite::new(x.clone(), q.clone());
        let d = InitialDatum { kind: DatumKind::Sampled { x, q }, half_width, interp: Some(h) };
        d.check_tails()?;
        Ok(d)
    }

    /// Two-column CSV with header x,q0.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rd = csv::Reader::from_path(path)?;
        let (mut x, mut q) = (Vec::new(), Vec::new());
        for rec in rd.records() {
            let rec = rec?;
            let p = |i: usize| -> Result<f64> {
                rec.get(i)
                    .ok_or_else(|| Error::Io("short csv row".into()))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Io(e.to_string()))
            };
            x.push(p(0)?);
            q.push(p(1)?);
        }
        Self::sampled(x, q)
    }

    pub fn check_tails(&self) -> Result<()> {
        let l = self.half_width;
        let (ql, qr) = (self.eval(-l), self.eval(l));
        if (ql + 1.0).abs() > TAIL_TOL || (qr - 1.0).abs() > TAIL_TOL {
            return Err(Error::BoundaryMismatch(format!(
                "q0(-L) = {ql}, q0(L) = {qr} at L = {l}"
            )));
        }
        Ok(())
    }

    pub fn with_half_width(mut self, l: f64) -> Result<Self> {
        self.half_width = l;
        self.check_tails()?;
        Ok(self)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            DatumKind::TanhPreset => x.tanh(),
            DatumKind::TanhPlusGaussian { amplitude, center, width } => {
                let u = (x - center) / width;
                x.tanh() + amplitude * (-u * u).exp()
            }
            DatumKind::Sampled { .. } => {
                let h = self.interp.as_ref().expect("sampled datum without interpolant");
                let (a, b) = h.domain();
                if x <= a {
                    -1.0
                } else if x >= b {
                    1.0
                } else {
                    h.eval(x)
                }
            }
        }
    }

    /// int (q0^2 - 1) dx over [-L, L] by composite Simpson.
    pub fn mass(&self) -> f64 {
        let n = 20_000;
        let l = self.half_width;
        let h = 2.0 * l / n as f64;
        let f = |x: f64| {
            let q = self.eval(x);
            q * q - 1.0
        };
        let mut s = f(-l) + f(l);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(-l + i as f64 * h);
        }
        s * h / 3.0
    }

    pub fn describe(&self) -> String {
        match &self.kind {
            DatumKind::TanhPreset => "tanh".into(),
            DatumKind::TanhPlusGaussian { amplitude, center, width } => {
                format!("tanh+gaussian({amplitude},{center},{width})")
            }
            DatumKind::Sampled { x, .. } => format!("sampled({} points)", x.len()),
        }
    }

    /// Parse "tanh" or "tanh+gaussian(a,x0,w)"; anything else is read as a CSV path.
    pub fn parse(spec: &str, half_width: f64) -> Result<Self> {
        let s = spec.trim();
        if s == "tanh" {
            return Ok(Self::tanh(half_width));
        }
        if let Some(rest) = s.strip_prefix("tanh+gaussian(").and_then(|r| r.strip_suffix(')')) {
            let v: Vec<f64> = rest
                .split(',')
                .map(|p| p.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("bad preset {s}: {e}")))?;
            if v.len() != 3 {
                return Err(Error::Config(format!("preset {s} needs three numbers")));
            }
            return Self::tanh_gaussian(v[0], v[1], v[2], half_width);
        }
        Self::from_csv(Path::new(s))
    }
}
