use super::modulus::integrate_adaptive;
use crate::error::{Error, Result};

/// Radial profile ξ(s), s ≥ 0, of a convolution kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `(1 + s)^-p`.
    Power(f64),
    /// `1` on `[0, 1]`, `0` beyond.
    Indicator,
    /// `q^s`, `0 < q < 1`.
    Geometric(f64),
    /// `values[i]` on `[radii[i], radii[i+1])`, the last value extending to
    /// infinity. `radii[0] = 0`.
    Table { radii: Vec<f64>, values: Vec<f64> },
}

impl Profile {
    /// Parses `power:p`, `indicator`, `geometric:q` or
    /// `table:s0:v0,s1:v1,...`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let (head, arg) = text.split_once(':').map_or((text, None), |(h, a)| (h, Some(a)));
        let num = |a: Option<&str>| -> Result<f64> {
            a.and_then(|s| s.trim().parse::<f64>().ok()).ok_or_else(|| Error::UnknownPreset(text.to_string()))
        };
        let p = match head {
            "power" => Profile::Power(num(arg)?),
            "indicator" if arg.is_none() => Profile::Indicator,
            "geometric" => Profile::Geometric(num(arg)?),
            "table" => {
                let mut radii = Vec::new();
                let mut values = Vec::new();
                for pair in arg.unwrap_or("").split(',') {
                    let (s, v) = pair.split_once(':').ok_or_else(|| Error::UnknownPreset(text.to_string()))?;
                    radii.push(num(Some(s))?);
                    values.push(num(Some(v))?);
                }
                Profile::Table { radii, values }
            }
            _ => return Err(Error::UnknownPreset(text.to_string())),
        };
        p.check()?;
        Ok(p)
    }

    pub fn name(&self) -> String {
        match self {
            Profile::Power(p) => format!("power:{p}"),
            Profile::Indicator => "indicator".into(),
            Profile::Geometric(q) => format!("geometric:{q}"),
            Profile::Table { .. } => "table".into(),
        }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Profile::Power(p) => (1.0 + s).powf(-p),
            Profile::Indicator => {
                if s <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::Geometric(q) => q.powf(s),
            Profile::Table { radii, values } => {
                let k = radii.partition_point(|&r| r <= s);
                values[k.max(1) - 1]
            }
        }
    }

    /// Nonnegative, finite, non-increasing, positive at 1.
    pub fn check(&self) -> Result<()> {
        match self {
            Profile::Power(p) if !(p.is_finite() && *p > 0.0) => Err(Error::ProfileNotMonotone(0.0)),
            Profile::Geometric(q) if !(*q > 0.0 && *q < 1.0) => Err(Error::ProfileNotMonotone(0.0)),
            Profile::Table { radii, values } => {
                if radii.is_empty() || radii.len() != values.len() || radii[0] != 0.0 {
                    return Err(Error::ProfileInvalid);
                }
                if radii.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::ProfileInvalid);
                }
                if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                    return Err(Error::ProfileInvalid);
                }
                if let Some(i) = (1..values.len()).find(|&i| values[i] > values[i - 1]) {
                    return Err(Error::ProfileNotMonotone(radii[i]));
                }
                if self.eval(1.0) <= 0.0 {
                    return Err(Error::ProfileInvalid);
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Dyadic-shell pieces of `J(ξ) = ∫ ξ(|x|) log(2 + |x|) dx` over `R^d`:
    /// the unit ball first, then the shells `2^k ≤ |x| < 2^{k+1}`.
    pub fn j_shells(&self, d: usize, shells: usize) -> Vec<f64> {
        let surface = if d == 1 { 2.0 } else { 2.0 * std::f64::consts::PI };
        let g = |s: f64| surface * self.eval(s) * (2.0 + s).log2() * s.powi(d as i32 - 1);
        let mut out = Vec::with_capacity(shells + 1);
        out.push(self.piecewise(&g, 0.0, 1.0));
        for k in 0..shells {
            out.push(self.piecewise(&g, 2f64.powi(k as i32), 2f64.powi(k as i32 + 1)));
        }
        out
    }

    /// J(ξ), or `None` when the shell contributions stop decaying within
    /// 2^60 or the estimated remainder is not negligible.
    pub fn j_integral(&self, d: usize) -> Option<f64> {
        let shells = self.j_shells(d, 60);
        let total: f64 = shells.iter().sum();
        let (last, prev) = (shells[shells.len() - 1], shells[shells.len() - 2]);
        if last == 0.0 {
            return Some(total);
        }
        let r = last / prev;
        if !(r < 1.0) {
            return None;
        }
        let rest = last * r / (1.0 - r);
        (rest <= 1e-3 * total).then_some(total)
    }

    fn piecewise<F: Fn(f64) -> f64>(&self, g: &F, a: f64, b: f64) -> f64 {
        // split at the profile's jumps so the quadrature stays on smooth pieces
        let mut cuts = vec![a];
        match self {
            Profile::Indicator if a < 1.0 && 1.0 < b => cuts.push(1.0),
            Profile::Table { radii, .. } => cuts.extend(radii.iter().copied().filter(|&r| a < r && r < b)),
            _ => {}
        }
        cuts.push(b);
        cuts.windows(2)
            .map(|w| {
                let (lo, hi) = (w[0], w[1]);
                // evaluate just inside the piece so left-closed jumps are respected
                let eps = (hi - lo) * 1e-12;
                integrate_adaptive(g, lo + eps, hi - eps, 1e-10 * (hi - lo).max(1.0))
            })
            .sum()
    }
}

/// Weight sequence `α_0, α_1, …` of a dyadic weighted kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum AlphaPreset {
    /// `(1, 0, 0, …)`.
    Indicator,
    /// `q^k`.
    Geometric(f64),
    /// `(k + 1)^-p`.
    Power(f64),
    Table(Vec<f64>),
}

impl AlphaPreset {
    /// Parses `indicator`, `geometric:q`, `power:p` or a comma list.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::UnknownPreset(text.to_string());
        if text == "indicator" {
            return Ok(AlphaPreset::Indicator);
        }
        if let Some(q) = text.strip_prefix("geometric:") {
            return Ok(AlphaPreset::Geometric(q.trim().parse().map_err(|_| bad())?));
        }
        if let Some(p) = text.strip_prefix("power:") {
            return Ok(AlphaPreset::Power(p.trim().parse().map_err(|_| bad())?));
        }
        let values: std::result::Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
        values.map(AlphaPreset::Table).map_err(|_| bad())
    }

    /// First `len` terms; a short table is padded with zeros.
    pub fn terms(&self, len: usize) -> Vec<f64> {
        (0..len)
            .map(|k| match self {
                AlphaPreset::Indicator => {
                    if k == 0 {
                        1.0
                    } else {
                        0.0
                    }
                }
                AlphaPreset::Geometric(q) => q.powi(k as i32),
                AlphaPreset::Power(p) => ((k + 1) as f64).powf(-p),
                AlphaPreset::Table(t) => t.get(k).copied().unwrap_or(0.0),
            })
            .collect()
    }
}
