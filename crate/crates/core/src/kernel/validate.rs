use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use super::{IOmega, KernelStructure};
use crate::basis::{BallBasis, BallId, Witness};
use crate::scalar::Scalar;
use crate::space::fmt_sig;

/// Mass residual above which a kernel is reported as not normalized.
pub const MASS_TOLERANCE: f64 = 1e-10;

/// Outcome of [`validate_kernels`].
#[derive(Debug, Clone)]
pub struct KernelReport<S> {
    pub kernels: String,
    pub basis: String,
    /// Balls carrying a kernel.
    pub n_kernels: usize,
    /// `max |∫ φ_B dμ - 1|` and the ball attaining it.
    pub mass_residual: S,
    pub mass_witness: Option<BallId>,
    /// First negative or non-finite density.
    pub negative: Option<Witness>,
    /// Measured `min_{y ∈ B} φ_B(y) μ(B)`.
    pub c1: S,
    pub c1_witness: Option<Witness>,
    /// Measured `max_y φ_B(y) μ(B) / ω(d(y,B)/μ(B))`; `None` when some
    /// density is positive where ω vanishes.
    pub c2: Option<S>,
    pub c2_witness: Option<Witness>,
    pub declared_c1: Option<S>,
    pub declared_c2: Option<S>,
    pub i_omega: IOmega<S>,
    /// `ω(2t) ≤ c0 ω(t)` and `ω(t) ≤ c0' ω(2t)` on the sampled range.
    pub c0: S,
    pub c0_rev: Option<S>,
}

impl<S: Scalar> KernelReport<S> {
    pub fn normalized(&self) -> bool {
        let tol = MASS_TOLERANCE.max(64.0 * S::epsilon().as_f64());
        self.mass_residual.as_f64() < tol && self.negative.is_none()
    }

    /// Declared constants, if any, are no better than the measured ones.
    pub fn declared_consistent(&self) -> bool {
        let tol = S::lit(1e-9);
        let lower = self.declared_c1.is_none_or(|d| d <= self.c1 * (S::one() + tol));
        let upper = match (self.declared_c2, self.c2) {
            (None, _) => true,
            (Some(d), Some(m)) => m <= d * (S::one() + tol),
            (Some(_), None) => false,
        };
        lower && upper
    }

    pub fn passed(&self) -> bool {
        self.normalized() && self.c1 > S::zero() && self.c2.is_some() && self.declared_consistent()
    }

    fn rows(&self) -> Vec<[String; 4]> {
        let opt = |v: Option<S>| v.map(fmt_sig).unwrap_or_default();
        let wit = |w: Option<Witness>| w.map(|w| w.to_string()).unwrap_or_default();
        let status = |b: bool| if b { "pass" } else { "fail" }.to_string();
        vec![
            [
                "mass".into(),
                status(self.normalized()),
                fmt_sig(self.mass_residual),
                self.mass_witness.map(|b| format!("ball {b}")).unwrap_or_default(),
            ],
            ["nonnegative".into(), status(self.negative.is_none()), String::new(), wit(self.negative)],
            ["c1".into(), status(self.c1 > S::zero()), fmt_sig(self.c1), wit(self.c1_witness)],
            [
                "c2".into(),
                status(self.c2.is_some()),
                self.c2.map(fmt_sig).unwrap_or_else(|| "inf".into()),
                wit(self.c2_witness),
            ],
            ["declared".into(), status(self.declared_consistent()), String::new(), String::new()],
            ["declared_c1".into(), String::new(), opt(self.declared_c1), String::new()],
            ["declared_c2".into(), String::new(), opt(self.declared_c2), String::new()],
            [
                "I_omega".into(),
                String::new(),
                self.i_omega.finite().map(fmt_sig).unwrap_or_else(|| "inf".into()),
                String::new(),
            ],
            ["c0".into(), String::new(), fmt_sig(self.c0), String::new()],
            ["c0_rev".into(), String::new(), self.c0_rev.map(fmt_sig).unwrap_or_else(|| "inf".into()), String::new()],
        ]
    }

    /// CSV with columns `quantity,status,value,witness`.
    pub fn write_csv<W: Write>(&self, writer: W) -> crate::Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["quantity", "status", "value", "witness"])?;
        for r in self.rows() {
            w.write_record(&r)?;
        }
        w.flush()?;
        Ok(())
    }
}

impl<S: Scalar> fmt::Display for KernelReport<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kernels {} on {} ({} kernels)", self.kernels, self.basis, self.n_kernels)?;
        for [q, s, v, w] in self.rows() {
            writeln!(f, "  {q:<12} {s:<5} {v:<20} {w}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
struct BallStats<S> {
    id: BallId,
    residual: S,
    negative: Option<usize>,
    c1: (S, usize),
    /// `None` value means infinite at the given point.
    c2: (Option<S>, usize),
}

fn ball_stats<S: Scalar>(ks: &KernelStructure<S>, b: &BallBasis<S>, id: BallId) -> Option<BallStats<S>> {
    let dense = ks.dense(b, id)?;
    let ball = b.ball(id);
    let mu = ball.measure();
    let space = b.space();
    let mass: S = dense.iter().zip(space.weights()).map(|(&v, &w)| v * w).sum();
    let negative = dense.iter().position(|v| !(v.is_finite() && *v >= S::zero()));
    let mut c1 = (S::infinity(), 0);
    for y in ball.members().iter() {
        let v = dense[y] * mu;
        if v < c1.0 {
            c1 = (v, y);
        }
    }
    let d = b.d_row(id);
    let mut c2: (Option<S>, usize) = (Some(S::zero()), 0);
    for (y, &v) in dense.iter().enumerate() {
        if v <= S::zero() {
            continue;
        }
        let env = match d[y] {
            Some(dy) => ks.omega.eval(dy / mu),
            None => S::zero(),
        };
        if env <= S::zero() {
            c2 = (None, y);
            break;
        }
        let r = v * mu / env;
        if c2.0.is_some_and(|c| r > c) {
            c2 = (Some(r), y);
        }
    }
    Some(BallStats { id, residual: (mass - S::one()).abs(), negative, c1, c2 })
}

/// Checks every kernel of `ks` against `b`: unit mass, nonnegativity, the
/// lower bound `c1 𝕀_B / μ(B) ≤ φ_B` and the envelope bound
/// `φ_B ≤ (c2/μ(B)) ω(d(·,B)/μ(B))`, reporting the best constants.
pub fn validate_kernels<S: Scalar>(ks: &KernelStructure<S>, b: &BallBasis<S>) -> KernelReport<S> {
    let stats: Vec<Option<BallStats<S>>> = (0..b.len() as u32).into_par_iter().map(|i| ball_stats(ks, b, BallId(i))).collect();
    let mut n_kernels = 0;
    let mut mass_residual = S::zero();
    let mut mass_witness = None;
    let mut negative = None;
    let mut c1 = S::infinity();
    let mut c1_witness = None;
    let mut c2 = Some(S::zero());
    let mut c2_witness = None;
    for s in stats.into_iter().flatten() {
        n_kernels += 1;
        if s.residual > mass_residual || mass_witness.is_none() {
            mass_residual = mass_residual.max(s.residual);
            mass_witness = Some(s.id);
        }
        if negative.is_none() {
            negative = s.negative.map(|y| Witness::PointBall(y, s.id));
        }
        if s.c1.0 < c1 {
            c1 = s.c1.0;
            c1_witness = Some(Witness::PointBall(s.c1.1, s.id));
        }
        match (c2, s.c2.0) {
            (Some(_), None) => {
                c2 = None;
                c2_witness = Some(Witness::PointBall(s.c2.1, s.id));
            }
            (Some(c), Some(v)) if v > c => {
                c2 = Some(v);
                c2_witness = Some(Witness::PointBall(s.c2.1, s.id));
            }
            _ => {}
        }
    }
    if n_kernels == 0 {
        c1 = S::zero();
    }
    let t_max = b.space().total_measure() / b.balls().iter().map(|a| a.measure()).fold(S::infinity(), |m, v| m.min(v));
    let (c0, c0_rev) = ks.omega.comparability(t_max);
    KernelReport {
        kernels: ks.name().to_string(),
        basis: b.name().to_string(),
        n_kernels,
        mass_residual,
        mass_witness,
        negative,
        c1,
        c1_witness,
        c2,
        c2_witness,
        declared_c1: ks.declared_c1,
        declared_c2: ks.declared_c2,
        i_omega: ks.i_omega,
        c0,
        c0_rev,
    }
}
