//! Averages, sharp functions, α-oscillations and the BMO/BLO family of
//! norms over a ball-basis.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::basis::{Ball, BallBasis, BallId};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{fmt_sig, PointSet, ScalarField};

/// Largest set handled by the exhaustive-subset oracles.
pub const MAX_EXHAUSTIVE_POINTS: usize = 20;

fn members_min_max<S: Scalar>(f: &ScalarField<S>, e: &PointSet) -> (S, S) {
    e.iter().fold((S::infinity(), S::neg_infinity()), |(lo, hi), x| {
        let v = f.value(x);
        (lo.min(v), hi.max(v))
    })
}

fn mean_over<S: Scalar>(f: &ScalarField<S>, e: &PointSet, mu: S) -> S {
    let (lo, hi) = members_min_max(f, e);
    if lo == hi {
        // exact for constant restrictions
        return lo;
    }
    let w = f.space().weights();
    e.iter().map(|x| f.value(x) * w[x]).sum::<S>() / mu
}

/// `f_B = ∫_B f dμ / μ(B)`.
pub fn avg<S: Scalar>(f: &ScalarField<S>, ball: &Ball<S>) -> S {
    mean_over(f, ball.members(), ball.measure())
}

/// `⟨f - f_B⟩_B`, the mean absolute deviation about the average.
pub fn sharp<S: Scalar>(f: &ScalarField<S>, ball: &Ball<S>) -> S {
    let m = avg(f, ball);
    let (lo, hi) = members_min_max(f, ball.members());
    if lo == hi {
        return S::zero();
    }
    let w = f.space().weights();
    ball.members().iter().map(|x| (f.value(x) - m).abs() * w[x]).sum::<S>() / ball.measure()
}

/// `⟨f - INF_B f⟩_B` with the signed minimum.
pub fn lower_mean<S: Scalar>(f: &ScalarField<S>, ball: &Ball<S>) -> S {
    let (lo, _) = members_min_max(f, ball.members());
    (avg(f, ball) - lo).max(S::zero())
}

fn starred<S: Scalar>(b: &BallBasis<S>, id: BallId, g: impl Fn(&Ball<S>) -> S) -> (S, BallId) {
    let mut best = (S::neg_infinity(), id);
    for a in b.superballs(id) {
        let v = g(b.ball(a));
        if v > best.0 {
            best = (v, a);
        }
    }
    best
}

/// `max f_A` over the balls A ⊇ B (B included), with the first ball
/// attaining it.
pub fn starred_avg<S: Scalar>(f: &ScalarField<S>, b: &BallBasis<S>, id: BallId) -> (S, BallId) {
    starred(b, id, |a| avg(f, a))
}

/// `max ⟨f⟩_{#,A}` over the balls A ⊇ B (B included).
pub fn starred_sharp<S: Scalar>(f: &ScalarField<S>, b: &BallBasis<S>, id: BallId) -> (S, BallId) {
    starred(b, id, |a| sharp(f, a))
}

/// Starred sharp function of every ball at once.
pub fn starred_sharp_all<S: Scalar>(f: &ScalarField<S>, b: &BallBasis<S>) -> Vec<S> {
    let s: Vec<S> = b.balls().par_iter().map(|a| sharp(f, a)).collect();
    b.max_over_superballs(&s)
}

/// `(sup_E f, inf_E f, sup - inf)`.
pub fn osc_set<S: Scalar>(f: &ScalarField<S>, e: &PointSet) -> Result<(S, S, S)> {
    if e.is_empty() {
        return Err(Error::EmptySet);
    }
    e.check_range(f.len())?;
    let (lo, hi) = members_min_max(f, e);
    Ok((hi, lo, hi - lo))
}

/// One α-oscillation query: a set (normally a ball), a field and α ∈ (0,1).
#[derive(Debug, Clone, Copy)]
pub struct OscillationQuery<'a, S> {
    pub members: &'a PointSet,
    pub alpha: S,
    pub field: &'a ScalarField<S>,
}

impl<'a, S: Scalar> OscillationQuery<'a, S> {
    pub fn new(field: &'a ScalarField<S>, members: &'a PointSet, alpha: S) -> Result<Self> {
        if !(alpha > S::zero() && alpha < S::one()) {
            return Err(Error::InvalidAlpha(alpha.as_f64()));
        }
        if members.is_empty() {
            return Err(Error::EmptySet);
        }
        members.check_range(field.len())?;
        Ok(Self { members, alpha, field })
    }

    pub fn on_ball(field: &'a ScalarField<S>, ball: &'a Ball<S>, alpha: S) -> Result<Self> {
        Self::new(field, ball.members(), alpha)
    }

    /// Values sorted ascending with their weights, prefix sums of the
    /// weights, and the threshold `α μ`.
    fn sorted(&self) -> (Vec<S>, Vec<S>, S) {
        let w = self.field.space().weights();
        let mut pts: Vec<(S, S)> = self.members.iter().map(|x| (self.field.value(x), w[x])).collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite field"));
        let mut pre = Vec::with_capacity(pts.len() + 1);
        let mut acc = S::zero();
        pre.push(acc);
        for p in &pts {
            acc += p.1;
            pre.push(acc);
        }
        let total = self.field.space().measure_unchecked(self.members.as_slice());
        (pts.into_iter().map(|p| p.0).collect(), pre, self.alpha * total)
    }
}

/// `OSC_{B,α}(f)`: the shortest value interval `[a,b]` with
/// `μ{x ∈ B: f(x) ∈ [a,b]} > α μ(B)`, found by a sliding window over the
/// sorted values.
pub fn osc_alpha<S: Scalar>(q: &OscillationQuery<'_, S>) -> S {
    let (v, pre, t) = q.sorted();
    let m = v.len();
    let mut best = v[m - 1] - v[0];
    let mut j = 0;
    for i in 0..m {
        j = j.max(i);
        while j < m && !(pre[j + 1] - pre[i] > t) {
            j += 1;
        }
        if j == m {
            break;
        }
        best = best.min(v[j] - v[i]);
    }
    best
}

/// `LOSC_{B,α}(f)`: smallest `v - min_B f` with `μ{x ∈ B: f(x) ≤ v} > α μ(B)`.
pub fn losc_alpha<S: Scalar>(q: &OscillationQuery<'_, S>) -> S {
    let (v, pre, t) = q.sorted();
    let j = (0..v.len()).find(|&j| pre[j + 1] > t).unwrap_or(v.len() - 1);
    v[j] - v[0]
}

fn exhaustive<S: Scalar>(q: &OscillationQuery<'_, S>, lower: bool) -> Result<S> {
    let pts: Vec<usize> = q.members.iter().collect();
    if pts.len() > MAX_EXHAUSTIVE_POINTS {
        return Err(Error::LengthMismatch { expected: MAX_EXHAUSTIVE_POINTS, got: pts.len() });
    }
    let w = q.field.space().weights();
    let total = q.field.space().measure_unchecked(q.members.as_slice());
    let t = q.alpha * total;
    let inf_b = pts.iter().map(|&x| q.field.value(x)).fold(S::infinity(), |a, b| a.min(b));
    let mut best = S::infinity();
    for mask in 1u32..(1u32 << pts.len()) {
        let mut mu = S::zero();
        let (mut lo, mut hi) = (S::infinity(), S::neg_infinity());
        for (k, &x) in pts.iter().enumerate() {
            if mask >> k & 1 == 1 {
                mu += w[x];
                let v = q.field.value(x);
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if mu > t && (!lower || lo == inf_b) {
            best = best.min(hi - lo);
        }
    }
    Ok(best)
}

/// `OSC_{B,α}` by minimizing over every subset E ⊆ B with `μ(E) > α μ(B)`.
pub fn osc_alpha_exhaustive<S: Scalar>(q: &OscillationQuery<'_, S>) -> Result<S> {
    exhaustive(q, false)
}

/// `LOSC_{B,α}` by minimizing over every subset E ⊆ B with `μ(E) > α μ(B)`
/// and `inf_E f = inf_B f`.
pub fn losc_alpha_exhaustive<S: Scalar>(q: &OscillationQuery<'_, S>) -> Result<S> {
    exhaustive(q, true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormKind {
    Bmo,
    Blo,
    BmoAlpha,
    BloAlpha,
}

impl NormKind {
    pub const ALL: [NormKind; 4] = [NormKind::Bmo, NormKind::Blo, NormKind::BmoAlpha, NormKind::BloAlpha];

    pub fn name(self) -> &'static str {
        match self {
            NormKind::Bmo => "BMO",
            NormKind::Blo => "BLO",
            NormKind::BmoAlpha => "BMO_alpha",
            NormKind::BloAlpha => "BLO_alpha",
        }
    }

    pub fn needs_alpha(self) -> bool {
        matches!(self, NormKind::BmoAlpha | NormKind::BloAlpha)
    }
}

impl std::str::FromStr for NormKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bmo" => Ok(NormKind::Bmo),
            "blo" => Ok(NormKind::Blo),
            "bmo_alpha" | "bmo-alpha" => Ok(NormKind::BmoAlpha),
            "blo_alpha" | "blo-alpha" => Ok(NormKind::BloAlpha),
            _ => Err(Error::Parse(format!("unknown norm `{s}`"))),
        }
    }
}

/// A norm as the max of a per-ball functional.
#[derive(Debug, Clone)]
pub struct NormReport<S> {
    pub kind: NormKind,
    pub alpha: Option<S>,
    pub value: S,
    /// Smallest ball id attaining the value.
    pub witness: BallId,
    pub per_ball: Option<Vec<S>>,
}

/// Per-ball value of the functional behind `kind`.
pub fn ball_functional<S: Scalar>(f: &ScalarField<S>, ball: &Ball<S>, kind: NormKind, alpha: Option<S>) -> Result<S> {
    Ok(match kind {
        NormKind::Bmo => sharp(f, ball),
        NormKind::Blo => lower_mean(f, ball),
        NormKind::BmoAlpha => osc_alpha(&OscillationQuery::on_ball(f, ball, alpha.ok_or(Error::MissingAlpha)?)?),
        NormKind::BloAlpha => losc_alpha(&OscillationQuery::on_ball(f, ball, alpha.ok_or(Error::MissingAlpha)?)?),
    })
}

/// Exact max over the enumerated balls of the functional behind `kind`.
pub fn norm<S: Scalar>(f: &ScalarField<S>, b: &BallBasis<S>, kind: NormKind, alpha: Option<S>) -> Result<NormReport<S>> {
    if f.len() != b.space().len() {
        return Err(Error::SpaceMismatch);
    }
    if kind.needs_alpha() {
        let a = alpha.ok_or(Error::MissingAlpha)?;
        if !(a > S::zero() && a < S::one()) {
            return Err(Error::InvalidAlpha(a.as_f64()));
        }
    }
    let per: Vec<S> = b.balls().par_iter().map(|a| ball_functional(f, a, kind, alpha)).collect::<Result<_>>()?;
    let mut value = S::neg_infinity();
    let mut witness = BallId(0);
    for (i, &v) in per.iter().enumerate() {
        if v > value {
            value = v;
            witness = BallId(i as u32);
        }
    }
    Ok(NormReport { kind, alpha: kind.needs_alpha().then_some(alpha).flatten(), value, witness, per_ball: Some(per) })
}

/// One checked inequality `lhs ≤ rhs`.
#[derive(Debug, Clone)]
pub struct InequalityRow<S> {
    pub name: &'static str,
    pub lhs: S,
    pub rhs: S,
}

impl<S: Scalar> InequalityRow<S> {
    pub fn slack(&self) -> S {
        self.rhs - self.lhs
    }

    /// Holds up to rounding at the scale of the operands.
    pub fn holds(&self) -> bool {
        let tol = S::lit(1e-12).max(S::epsilon() * S::lit(64.0)) * (S::one() + self.lhs.abs().max(self.rhs.abs()));
        self.lhs <= self.rhs + tol
    }
}

#[derive(Debug, Clone)]
pub struct ElementaryReport<S> {
    pub alpha: S,
    pub bmo: S,
    pub blo: S,
    pub bmo_alpha: S,
    pub blo_alpha: S,
    pub sup_norm: S,
    pub rows: Vec<InequalityRow<S>>,
}

impl<S: Scalar> ElementaryReport<S> {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds())
    }

    /// CSV with columns `inequality,lhs,rhs,slack,status`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["inequality", "lhs", "rhs", "slack", "status"])?;
        for r in &self.rows {
            w.write_record([
                r.name.to_string(),
                fmt_sig(r.lhs),
                fmt_sig(r.rhs),
                fmt_sig(r.slack()),
                if r.holds() { "pass" } else { "fail" }.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl<S: Scalar> fmt::Display for ElementaryReport<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{:<32} {} <= {} (slack {})", r.name, fmt_sig(r.lhs), fmt_sig(r.rhs), fmt_sig(r.slack()))?;
        }
        Ok(())
    }
}

/// The elementary relations between the four norms and the sup norm.
pub fn elementary_norm_inequalities<S: Scalar>(f: &ScalarField<S>, b: &BallBasis<S>, alpha: S) -> Result<ElementaryReport<S>> {
    let bmo = norm(f, b, NormKind::Bmo, None)?.value;
    let blo = norm(f, b, NormKind::Blo, None)?.value;
    let bmo_alpha = norm(f, b, NormKind::BmoAlpha, Some(alpha))?.value;
    let blo_alpha = norm(f, b, NormKind::BloAlpha, Some(alpha))?.value;
    let sup_norm = f.sup_norm();
    let two = S::lit(2.0);
    let k = two / (S::one() - alpha);
    let rows = vec![
        InequalityRow { name: "bmo_alpha <= blo_alpha", lhs: bmo_alpha, rhs: blo_alpha },
        InequalityRow { name: "bmo <= 2 blo", lhs: bmo, rhs: two * blo },
        InequalityRow { name: "bmo_alpha <= 2/(1-alpha) bmo", lhs: bmo_alpha, rhs: k * bmo },
        InequalityRow { name: "blo_alpha <= 2/(1-alpha) blo", lhs: blo_alpha, rhs: k * blo },
        InequalityRow { name: "blo <= 2 sup|f|", lhs: blo, rhs: two * sup_norm },
    ];
    Ok(ElementaryReport { alpha, bmo, blo, bmo_alpha, blo_alpha, sup_norm, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::dyadic_basis;
    use crate::space::MeasureSpace;
    use std::sync::Arc;

    fn uniform_field(v: Vec<f64>) -> ScalarField<f64> {
        let n = v.len();
        ScalarField::new(Arc::new(MeasureSpace::uniform(n, 1.0).unwrap()), v).unwrap()
    }

    #[test]
    fn averages_and_sharp() {
        let b = dyadic_basis::<f64>(2).unwrap();
        let f = ScalarField::new(b.space().clone(), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let root = b.ball(BallId(0));
        assert_eq!(avg(&f, root), 2.5);
        assert_eq!(sharp(&f, root), 1.0);
        let half = ScalarField::new(b.space().clone(), vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(sharp(&half, root), 0.5);
        let c = ScalarField::constant(b.space().clone(), 0.1);
        assert!(b.balls().iter().all(|a| sharp(&c, a) == 0.0 && avg(&c, a) == 0.1));
    }

    #[test]
    fn starred_sharp_scans_superballs() {
        let b = dyadic_basis::<f64>(2).unwrap();
        let f = ScalarField::new(b.space().clone(), vec![1.0, 1.0, 0.0, 0.0]).unwrap();
        let quarter = b.balls().iter().find(|a| a.members().as_slice() == [0]).unwrap().id();
        assert_eq!(starred_sharp(&f, &b, quarter), (0.5, BallId(0)));
        assert_eq!(starred_sharp(&f, &b, BallId(0)).0, sharp(&f, b.ball(BallId(0))));
        let all = starred_sharp_all(&f, &b);
        for a in b.balls() {
            assert_eq!(all[a.id().index()], starred_sharp(&f, &b, a.id()).0);
        }
    }

    #[test]
    fn set_oscillation() {
        let f = uniform_field(vec![0.0, 5.0, 5.0]);
        assert_eq!(osc_set(&f, &PointSet::full(3)).unwrap(), (5.0, 0.0, 5.0));
        assert_eq!(osc_set(&f, &PointSet::new([1])).unwrap().2, 0.0);
        assert!(matches!(osc_set(&f, &PointSet::empty()), Err(Error::EmptySet)));
    }

    #[test]
    fn alpha_oscillation_examples() {
        let all = PointSet::full(4);
        let f = uniform_field(vec![0.0, 1.0, 2.0, 5.0]);
        let q = OscillationQuery::new(&f, &all, 0.5).unwrap();
        assert_eq!(osc_alpha(&q), 2.0);
        assert_eq!(losc_alpha(&q), 2.0);
        let g = uniform_field(vec![0.0, 10.0, 11.0, 12.0]);
        let q = OscillationQuery::new(&g, &all, 0.5).unwrap();
        assert_eq!(osc_alpha(&q), 2.0);
        assert_eq!(losc_alpha(&q), 11.0);
        assert_eq!(osc_alpha_exhaustive(&q).unwrap(), 2.0);
        assert_eq!(losc_alpha_exhaustive(&q).unwrap(), 11.0);
        // a heavy atom alone exceeds a small α-fraction
        let q = OscillationQuery::new(&g, &all, 0.01).unwrap();
        assert_eq!(osc_alpha(&q), 0.0);
        assert!(matches!(OscillationQuery::new(&g, &all, 1.0), Err(Error::InvalidAlpha(_))));
    }

    #[test]
    fn strict_threshold_excludes_ties() {
        // two of four points carry exactly half the mass: not enough
        let all = PointSet::full(4);
        let f = uniform_field(vec![0.0, 0.0, 7.0, 9.0]);
        let q = OscillationQuery::new(&f, &all, 0.5).unwrap();
        assert_eq!(osc_alpha(&q), 7.0);
    }

    #[test]
    fn dyadic_indicator_norms() {
        let b = dyadic_basis::<f64>(3).unwrap();
        let f = ScalarField::from_fn(b.space().clone(), |x| if x < 4 { 1.0 } else { 0.0 }).unwrap();
        let bmo = norm(&f, &b, NormKind::Bmo, None).unwrap();
        assert_eq!((bmo.value, bmo.witness), (0.5, BallId(0)));
        let blo = norm(&f, &b, NormKind::Blo, None).unwrap();
        assert_eq!((blo.value, blo.witness), (0.5, BallId(0)));
        assert!(matches!(norm(&f, &b, NormKind::BmoAlpha, None), Err(Error::MissingAlpha)));
        let c = ScalarField::constant(b.space().clone(), 3.0);
        for k in NormKind::ALL {
            assert_eq!(norm(&c, &b, k, Some(0.75)).unwrap().value, 0.0);
        }
        let r = elementary_norm_inequalities(&f, &b, 0.75).unwrap();
        assert!(r.holds(), "{r}");
        assert_eq!(r.rows.len(), 5);
    }
}
