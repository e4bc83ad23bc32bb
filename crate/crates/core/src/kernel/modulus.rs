use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Value of the log-weighted integral `1 + ∫_1^∞ ω(t) log2(1+t) dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IOmega<S> {
    Finite(S),
    /// The tail does not converge over the representable range.
    Divergent,
}

impl<S: Scalar> IOmega<S> {
    pub fn finite(self) -> Option<S> {
        match self {
            IOmega::Finite(v) => Some(v),
            IOmega::Divergent => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, IOmega::Finite(_))
    }
}

/// Non-increasing envelope `ω: [1, ∞) → [0, 1]` with `ω(1) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Modulus<S> {
    /// `values[k]` on `[breaks[k], breaks[k+1])`, zero from the last break
    /// on. `breaks[0] = 1`. With a single break this is the trivial envelope
    /// that vanishes right after 1.
    Step { breaks: Vec<S>, values: Vec<S> },
    /// `t^-p`.
    Power(S),
    /// `1 / log2(1 + t)`.
    InvLog,
}

/// `∫ log2(1+t) dt`.
fn log_antiderivative(t: f64) -> f64 {
    ((1.0 + t) * t.ln_1p() - t) / std::f64::consts::LN_2
}

impl<S: Scalar> Modulus<S> {
    pub fn trivial() -> Self {
        Modulus::Step { breaks: vec![S::one()], values: Vec::new() }
    }

    pub fn step(breaks: Vec<S>, values: Vec<S>) -> Result<Self> {
        if breaks.len() != values.len() + 1 {
            return Err(Error::LengthMismatch { expected: values.len() + 1, got: breaks.len() });
        }
        if breaks[0] != S::one() {
            return Err(Error::ProfileInvalid);
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(Error::ProfileInvalid);
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= S::zero() && *v <= S::one())) {
            return Err(Error::ProfileInvalid);
        }
        if let Some(&v0) = values.first() {
            if v0 != S::one() {
                return Err(Error::ProfileInvalid);
            }
        }
        if let Some(k) = (1..values.len()).find(|&k| values[k] > values[k - 1]) {
            return Err(Error::ProfileNotMonotone(breaks[k].as_f64()));
        }
        Ok(Modulus::Step { breaks, values })
    }

    pub fn power(p: S) -> Result<Self> {
        if !(p > S::zero() && p.is_finite()) {
            return Err(Error::ProfileNotMonotone(p.as_f64()));
        }
        Ok(Modulus::Power(p))
    }

    pub fn eval(&self, t: S) -> S {
        if t <= S::one() {
            return S::one();
        }
        match self {
            Modulus::Step { breaks, values } => {
                let k = breaks.partition_point(|&b| b <= t);
                if k == 0 || k > values.len() {
                    S::zero()
                } else {
                    values[k - 1]
                }
            }
            Modulus::Power(p) => t.powf(-*p),
            Modulus::InvLog => S::one() / t.log2_1p(),
        }
    }

    /// Point past which ω vanishes, if any.
    pub fn support_end(&self) -> Option<S> {
        match self {
            Modulus::Step { breaks, .. } => breaks.last().copied(),
            _ => None,
        }
    }

    /// `ω(2t) ≤ c0 ω(t)` and `ω(t) ≤ c0' ω(2t)` on the grid `t = 2^{j/4}`
    /// up to `t_max`. `c0'` is `None` when ω vanishes at some `2t` while
    /// `ω(t) > 0`.
    pub fn comparability(&self, t_max: S) -> (S, Option<S>) {
        let mut c0 = S::zero();
        let mut c0_rev = Some(S::zero());
        let mut j = 0;
        loop {
            let t = S::lit(2f64.powf(j as f64 / 4.0));
            if t > t_max {
                break;
            }
            let (a, b) = (self.eval(t), self.eval(t * S::lit(2.0)));
            if a > S::zero() {
                c0 = c0.max(b / a);
                c0_rev = match c0_rev {
                    Some(c) if b > S::zero() => Some(c.max(a / b)),
                    _ => None,
                };
            }
            j += 1;
        }
        (c0, c0_rev)
    }

    pub fn i_omega(&self) -> IOmega<S> {
        match self {
            Modulus::Step { breaks, values } => {
                let mut acc = 1.0;
                for (k, &v) in values.iter().enumerate() {
                    let (a, b) = (breaks[k].as_f64(), breaks[k + 1].as_f64());
                    acc += v.as_f64() * (log_antiderivative(b) - log_antiderivative(a));
                }
                IOmega::Finite(S::lit(acc))
            }
            Modulus::Power(p) => power_i_omega(p.as_f64()).map_or(IOmega::Divergent, |v| IOmega::Finite(S::lit(v))),
            Modulus::InvLog => IOmega::Divergent,
        }
    }
}

/// Free-function form of [`Modulus::i_omega`].
pub fn i_omega<S: Scalar>(m: &Modulus<S>) -> IOmega<S> {
    m.i_omega()
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, eps: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        left + right + delta / 15.0
    } else {
        simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) + simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
    }
}

/// Adaptive Simpson of `∫_a^b f`.
pub(crate) fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, eps: f64) -> f64 {
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, eps, 40)
}

/// `1 + ∫_1^∞ t^-p log2(1+t) dt` to about 1e-10: quadrature over dyadic
/// pieces until the analytic bound on the remaining tail is negligible.
fn power_i_omega(p: f64) -> Option<f64> {
    if p <= 1.0 {
        return None;
    }
    let f = |t: f64| t.powf(-p) * t.ln_1p() / std::f64::consts::LN_2;
    // ∫_T^∞ t^-p (1 + log2 t) dt bounds the tail from above
    let tail = |t: f64| {
        let q = p - 1.0;
        t.powf(-q) / q + t.powf(-q) * (t.ln() / q + 1.0 / (q * q)) / std::f64::consts::LN_2
    };
    let mut acc = 0.0;
    for k in 0..4096 {
        let (a, b) = (2f64.powi(k), 2f64.powi(k + 1));
        if !b.is_finite() {
            return None;
        }
        acc += integrate_adaptive(f, a, b, 1e-13 * (1.0 + acc));
        let rest = tail(b);
        if rest < 1e-11 * (1.0 + acc) {
            // the tail lies in [0, rest]; take the midpoint
            return Some(1.0 + acc + 0.5 * rest);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_envelope_has_unit_integral() {
        let m = Modulus::<f64>::trivial();
        assert_eq!(m.i_omega(), IOmega::Finite(1.0));
        assert_eq!(m.eval(1.0), 1.0);
        assert_eq!(m.eval(1.5), 0.0);
    }

    #[test]
    fn inverse_square_integral() {
        // ∫_1^∞ ln(1+t)/t² dt = 2 ln 2, so the value is 3.
        let v = Modulus::<f64>::power(2.0).unwrap().i_omega().finite().unwrap();
        assert!((v - 3.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn power_against_quadrature_of_substituted_integral() {
        // substitute t = e^u, integrate on a long finite range
        for p in [1.5, 3.0, 4.5] {
            let v = Modulus::<f64>::power(p).unwrap().i_omega().finite().unwrap();
            let g = |u: f64| (-(p - 1.0) * u).exp() * u.exp().ln_1p() / std::f64::consts::LN_2;
            let oracle = 1.0 + integrate_adaptive(g, 0.0, 200.0, 1e-13);
            assert!((v - oracle).abs() < 1e-6 * oracle, "p={p}: {v} vs {oracle}");
        }
    }

    #[test]
    fn divergent_cases() {
        assert_eq!(Modulus::<f64>::InvLog.i_omega(), IOmega::Divergent);
        assert_eq!(Modulus::<f64>::power(1.0).unwrap().i_omega(), IOmega::Divergent);
    }

    #[test]
    fn step_integral_is_exact() {
        let m = Modulus::step(vec![1.0, 3.0, 7.0], vec![1.0, 0.5]).unwrap();
        let expect = 1.0 + (log_antiderivative(3.0) - log_antiderivative(1.0)) + 0.5 * (log_antiderivative(7.0) - log_antiderivative(3.0));
        assert_eq!(m.i_omega(), IOmega::Finite(expect));
        assert_eq!(m.eval(2.9), 1.0);
        assert_eq!(m.eval(3.0), 0.5);
        assert_eq!(m.eval(7.0), 0.0);
    }

    #[test]
    fn step_rejects_bad_input() {
        assert!(Modulus::step(vec![1.0, 2.0, 3.0], vec![1.0, 1.5]).is_err());
        assert!(matches!(Modulus::step(vec![1.0, 2.0, 3.0], vec![0.5, 0.6]), Err(_)));
        assert!(matches!(Modulus::step(vec![1.0, 2.0, 3.0], vec![1.0, 0.6]), Ok(_)));
        assert!(matches!(Modulus::step(vec![1.0, 2.0, 4.0], vec![1.0, 1.0]), Ok(_)));
        assert!(matches!(Modulus::step(vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 0.2, 0.3]), Err(Error::ProfileNotMonotone(_))));
    }

    #[test]
    fn comparability_constants() {
        let (c0, rev) = Modulus::<f64>::power(2.0).unwrap().comparability(1024.0);
        assert!((c0 - 0.25).abs() < 1e-12);
        assert!((rev.unwrap() - 4.0).abs() < 1e-12);
        let (c0, rev) = Modulus::<f64>::trivial().comparability(16.0);
        assert_eq!((c0, rev), (0.0, None));
        let m = Modulus::step(vec![1.0, 2.0, 4.0], vec![1.0, 0.5]).unwrap();
        assert_eq!(m.comparability(16.0).1, None);
    }
}
