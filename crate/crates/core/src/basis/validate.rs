use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use super::cover::exhaustion_inner;
use super::{approx_le, uncentered_structure, BallBasis, BallId, BasisConstants, Family};
use crate::scalar::Scalar;
use crate::space::fmt_sig;

/// Counterexample attached to a failed check, or the pair attaining a
/// measured constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    Ball(BallId),
    /// `(B, A)`.
    Balls(BallId, BallId),
    Point(usize),
    Points(usize, usize),
    PointBall(usize, BallId),
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Ball(b) => write!(f, "ball {b}"),
            Witness::Balls(b, a) => write!(f, "balls {b} {a}"),
            Witness::Point(x) => write!(f, "point {x}"),
            Witness::Points(x, y) => write!(f, "points {x} {y}"),
            Witness::PointBall(x, b) => write!(f, "point {x} ball {b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub pass: bool,
    pub witness: Option<Witness>,
}

impl AxiomCheck {
    fn new(name: &'static str, witness: Option<Witness>) -> Self {
        Self { name, pass: witness.is_none(), witness }
    }
}

/// Outcome of [`validate_axioms`].
#[derive(Debug, Clone)]
pub struct AxiomReport<S> {
    pub basis: String,
    pub n_points: usize,
    pub n_balls: usize,
    pub b1: AxiomCheck,
    pub b2: AxiomCheck,
    /// Witness is `(B, A)`: A meets B, μ(A) ≤ 2μ(B), A ⊄ hull(B).
    pub b4: AxiomCheck,
    pub g1: AxiomCheck,
    pub g2: AxiomCheck,
    /// Witness is a ball with hull ≠ X and no superball of 2 to η times its measure.
    pub doubling: AxiomCheck,
    /// Passes when θ > 0.
    pub regular: AxiomCheck,
    /// K of the supplied hull map.
    pub hull_constant: S,
    /// Smallest K any hull map could achieve: max over B of the smallest
    /// ball containing every A with A ∩ B ≠ ∅, μ(A) ≤ 2μ(B). `None` when some
    /// such union fits in no ball.
    pub min_hull_constant: Option<S>,
    pub eta_doubling: Option<S>,
    pub theta: S,
    pub theta_witness: Option<Witness>,
    pub eta_bs: Option<S>,
    /// Largest step ratio over exhaustion sequences; only computed when B4 holds.
    pub beta: Option<S>,
}

impl<S: Scalar> AxiomReport<S> {
    /// B1, B2, B4 and the basis-structure conditions G1, G2.
    pub fn passed(&self) -> bool {
        self.b1.pass && self.b2.pass && self.b4.pass && self.g1.pass && self.g2.pass
    }

    pub fn checks(&self) -> [&AxiomCheck; 7] {
        [&self.b1, &self.b2, &self.b4, &self.g1, &self.g2, &self.doubling, &self.regular]
    }

    /// Measured constants in the basis' own format.
    pub fn constants(&self) -> BasisConstants<S> {
        BasisConstants {
            hull_constant: self.hull_constant,
            eta_doubling: self.eta_doubling,
            theta: Some(self.theta),
            eta_bs: self.eta_bs,
            beta: self.beta,
        }
    }

    fn rows(&self) -> Vec<[String; 4]> {
        let opt = |v: Option<S>| v.map(fmt_sig).unwrap_or_default();
        let mut rows: Vec<[String; 4]> = self
            .checks()
            .iter()
            .map(|c| {
                [
                    c.name.to_string(),
                    if c.pass { "pass" } else { "fail" }.to_string(),
                    String::new(),
                    c.witness.map(|w| w.to_string()).unwrap_or_default(),
                ]
            })
            .collect();
        let wit = |w: Option<Witness>| w.map(|w| w.to_string()).unwrap_or_default();
        rows.push(["K".into(), String::new(), fmt_sig(self.hull_constant), String::new()]);
        rows.push(["K_min".into(), String::new(), opt(self.min_hull_constant), String::new()]);
        rows.push(["eta_doubling".into(), String::new(), opt(self.eta_doubling), String::new()]);
        rows.push(["theta".into(), String::new(), fmt_sig(self.theta), wit(self.theta_witness)]);
        rows.push(["eta_bs".into(), String::new(), opt(self.eta_bs), String::new()]);
        rows.push(["beta".into(), String::new(), opt(self.beta), String::new()]);
        rows
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

impl<S: Scalar> fmt::Display for AxiomReport<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "basis {} ({} points, {} balls)", self.basis, self.n_points, self.n_balls)?;
        for [name, status, value, witness] in self.rows() {
            let mut line = format!("  {name:<13}");
            for part in [status, value, witness] {
                if !part.is_empty() {
                    line.push(' ');
                    line.push_str(&part);
                }
            }
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

struct BallScan<S> {
    b4: Option<BallId>,
    k_min: Option<S>,
    doubling: Option<Option<S>>,
    theta: Option<(S, BallId)>,
}

/// Exhaustive check of the axioms and measurement of the basis constants.
/// Pair scans run in parallel; every reduction is folded in ball-id order so
/// the report does not depend on the schedule.
pub fn validate_axioms<S: Scalar>(b: &BallBasis<S>) -> AxiomReport<S> {
    let n_points = b.space().len();
    let n_balls = b.len();
    let bits = b.bits();
    let weights = b.space().weights();
    let uniform = b.space().uniform_weight();
    let measure: Vec<S> = b.balls().iter().map(|a| a.measure()).collect();
    let mut sorted: Vec<BallId> = (0..n_balls as u32).map(BallId).collect();
    sorted.sort_by(|&x, &y| measure[x.index()].partial_cmp(&measure[y.index()]).expect("finite").then(x.cmp(&y)));
    let sorted_measure: Vec<S> = sorted.iter().map(|a| measure[a.index()]).collect();
    let two = S::lit(2.0);

    let b1 = AxiomCheck::new(
        "B1",
        b.balls().iter().find(|a| !(a.measure() > S::zero() && a.measure().is_finite())).map(|a| Witness::Ball(a.id())),
    );

    let containing = uncentered_structure(n_points, b.balls());
    let b2_witness = if b.whole().is_some() {
        None
    } else {
        (0..n_points)
            .into_par_iter()
            .map(|x| {
                let mut u = fixedbitset::FixedBitSet::with_capacity(n_points);
                for &a in &containing[x] {
                    u.union_with(bits.row(a));
                }
                u.zeroes().next().map(|y| Witness::Points(x, y))
            })
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .next()
    };
    let b2 = AxiomCheck::new("B2", b2_witness);

    let scans: Vec<BallScan<S>> = (0..n_balls as u32)
        .into_par_iter()
        .map(|i| {
            let id = BallId(i);
            let mu = measure[id.index()];
            let h = b.hull(id);
            let small_end = sorted_measure.partition_point(|&m| approx_le(m, two * mu));
            let mut union = bits.row(id).clone();
            let mut b4 = None;
            for &a in &sorted[..small_end] {
                if bits.intersects(a, id) {
                    if b4.is_none() && !bits.is_subset(a, h) {
                        b4 = Some(a);
                    }
                    union.union_with(bits.row(a));
                }
            }
            let large_start = sorted_measure.partition_point(|&m| !approx_le(mu, m));
            let k_min = sorted[large_start..]
                .iter()
                .find(|&&a| union.is_subset(bits.row(a)))
                .map(|&a| measure[a.index()] / mu);
            let doubling = (b.hull_ball(id).len() < n_points).then(|| {
                let start = sorted_measure.partition_point(|&m| !approx_le(two * mu, m));
                sorted[start..].iter().find(|&&a| bits.is_subset(id, a)).map(|&a| measure[a.index()] / mu)
            });
            let hm = measure[h.index()];
            let mut theta: Option<(S, BallId)> = None;
            for &a in &sorted[large_start..] {
                if bits.intersects(a, id) {
                    let r = bits.inter_measure(h, a, weights, uniform) / hm;
                    if theta.is_none_or(|(t, _)| r < t) {
                        theta = Some((r, a));
                    }
                }
            }
            BallScan { b4, k_min, doubling, theta }
        })
        .collect();

    let mut b4_witness = None;
    let mut min_hull_constant = Some(S::zero());
    let mut doubling_witness = None;
    let mut eta_doubling: Option<S> = None;
    let mut theta = S::one();
    let mut theta_witness = None;
    for (i, s) in scans.iter().enumerate() {
        let id = BallId(i as u32);
        if b4_witness.is_none() {
            b4_witness = s.b4.map(|a| Witness::Balls(id, a));
        }
        min_hull_constant = match (min_hull_constant, s.k_min) {
            (Some(m), Some(k)) => Some(m.max(k)),
            _ => None,
        };
        match s.doubling {
            Some(Some(r)) => eta_doubling = Some(eta_doubling.map_or(r, |e| e.max(r))),
            Some(None) if doubling_witness.is_none() => doubling_witness = Some(Witness::Ball(id)),
            _ => {}
        }
        if let Some((t, a)) = s.theta {
            if t < theta || theta_witness.is_none() {
                theta = t;
                theta_witness = Some(Witness::Balls(id, a));
            }
        }
    }
    let b4 = AxiomCheck::new("B4", b4_witness);
    let doubling = AxiomCheck::new("doubling", doubling_witness);
    if doubling_witness.is_some() {
        eta_doubling = None;
    }
    let regular = AxiomCheck::new("regular", (theta <= S::zero()).then_some(theta_witness).flatten());

    let per_point: Vec<(Option<Witness>, Option<Witness>, Option<S>)> = (0..n_points)
        .into_par_iter()
        .map(|x| {
            let fam = b.per_point(x);
            let g1 = fam.iter().find(|&&a| !b.ball(a).contains(x)).map(|&a| Witness::PointBall(x, a));
            let mut by_measure: Vec<BallId> = fam.to_vec();
            by_measure.sort_by(|&p, &q| measure[p.index()].partial_cmp(&measure[q.index()]).expect("finite").then(p.cmp(&q)));
            let mut worst = S::one();
            let mut g2 = None;
            for &a in &containing[x] {
                if fam.binary_search(&a).is_ok() {
                    continue;
                }
                let mu = measure[a.index()];
                let found = by_measure
                    .iter()
                    .filter(|&&c| approx_le(mu, measure[c.index()]))
                    .find(|&&c| bits.is_subset(a, c));
                match found {
                    Some(&c) => worst = worst.max(measure[c.index()] / mu),
                    None => {
                        g2 = Some(Witness::PointBall(x, a));
                        break;
                    }
                }
            }
            (g1, g2, Some(worst))
        })
        .collect();
    let g1 = AxiomCheck::new("G1", per_point.iter().find_map(|p| p.0));
    let g2 = AxiomCheck::new("G2", per_point.iter().find_map(|p| p.1));
    let eta_bs = if g2.pass { per_point.iter().filter_map(|p| p.2).reduce(|a, c| a.max(c)) } else { None };

    let beta = if b4.pass { measure_beta(b) } else { None };

    AxiomReport {
        basis: b.name().to_string(),
        n_points,
        n_balls,
        b1,
        b2,
        b4,
        g1,
        g2,
        doubling,
        regular,
        hull_constant: b.constants().hull_constant,
        min_hull_constant,
        eta_doubling,
        theta,
        theta_witness,
        eta_bs,
        beta,
    }
}

/// β: the largest growth ratio of exhaustion sequences. Grid bases are
/// translation invariant, so only balls centered at the origin are used as
/// seeds there; other families seed from every ball.
fn measure_beta<S: Scalar>(b: &BallBasis<S>) -> Option<S> {
    let seeds: Vec<BallId> = match &b.family {
        Family::Grid(g) => {
            let mut s: Vec<BallId> = (1..=g.r_max()).map(|r| g.id(0, r)).collect();
            s.dedup();
            s
        }
        _ => (0..b.len() as u32).map(BallId).collect(),
    };
    seeds
        .par_iter()
        .map(|&s| exhaustion_inner(b, s, false).ok().and_then(|e| e.max_ratio))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .reduce(|a, c| a.max(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{dyadic_basis, grid_torus_basis, martingale_basis, BallShape, GridSpec, PartitionTree};

    #[test]
    fn dyadic_constants() {
        let b = dyadic_basis::<f64>(4).unwrap();
        let r = validate_axioms(&b);
        assert!(r.passed(), "{r}");
        assert_eq!(r.hull_constant, 2.0);
        assert_eq!(r.min_hull_constant, Some(2.0));
        assert_eq!(r.eta_doubling, Some(2.0));
        assert!(r.theta >= 0.5);
        assert_eq!(r.eta_bs, Some(1.0));
        assert_eq!(r.beta, Some(2.0));
    }

    #[test]
    fn grid_passes() {
        for spec in [
            GridSpec::new(1, 16, BallShape::Cube),
            GridSpec::new(1, 16, BallShape::Cube).centered(),
            GridSpec::new(2, 8, BallShape::Cube),
            GridSpec::new(2, 8, BallShape::Ball),
        ] {
            let b = grid_torus_basis::<f64>(spec).unwrap();
            let r = validate_axioms(&b);
            assert!(r.passed(), "{r}");
            assert!(r.regular.pass);
            assert!(r.hull_constant <= 25.0 + 1e-12);
        }
    }

    #[test]
    fn identity_hull_fails_with_witness() {
        let b = grid_torus_basis::<f64>(GridSpec::new(1, 16, BallShape::Cube)).unwrap();
        let ident: Vec<BallId> = (0..b.len() as u32).map(BallId).collect();
        let r = validate_axioms(&b.with_hulls(ident).unwrap());
        assert!(!r.b4.pass);
        let Some(Witness::Balls(x, a)) = r.b4.witness else { panic!("no witness") };
        assert!(b.bits().intersects(x, a));
        assert!(b.ball(a).measure() <= 2.0 * b.ball(x).measure());
        assert!(!b.bits().is_subset(a, x));
        assert_eq!(r.beta, None);
    }

    #[test]
    fn random_trees_pass() {
        for seed in 0..3 {
            let b = martingale_basis(&PartitionTree::<f64>::random(40, seed).unwrap()).unwrap();
            let r = validate_axioms(&b);
            assert!(r.passed(), "{r}");
        }
    }

    #[test]
    fn csv_report_has_all_rows() {
        let b = dyadic_basis::<f64>(2).unwrap();
        let mut buf = Vec::new();
        validate_axioms(&b).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 14);
        assert!(text.contains("K,,2,"));
    }
}
