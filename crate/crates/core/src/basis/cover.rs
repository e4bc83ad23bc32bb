use super::{BallBasis, BallId};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::PointSet;

/// Increasing balls `G_1 ⊂ G_2 ⊂ …` with `hull(G_k) ⊆ G_{k+1}`.
#[derive(Debug, Clone)]
pub struct ExhaustionSequence<S> {
    pub balls: Vec<BallId>,
    /// Smallest and largest observed `μ(G_{k+1}) / μ(G_k)`; `None` for a
    /// single-ball sequence.
    pub min_ratio: Option<S>,
    pub max_ratio: Option<S>,
    /// Ratio of the final step when it is capped by the whole space, i.e.
    /// no ball of twice the measure exists. Not part of `min_ratio`.
    pub capped_ratio: Option<S>,
    /// Whether the last ball is the whole space.
    pub reaches_whole: bool,
}

/// Exhaustion sequence from `seed`. Each step takes the smallest ball of
/// measure at least `2 μ(G_k)` that contains `hull(G_k)` (smallest id on
/// ties), or the whole space when no ball is large enough. Every step
/// certifies the hull axiom for the current ball.
pub fn exhaustion<S: Scalar>(b: &BallBasis<S>, seed: BallId) -> Result<ExhaustionSequence<S>> {
    b.get(seed)?;
    exhaustion_inner(b, seed, true)
}

pub(crate) fn exhaustion_inner<S: Scalar>(b: &BallBasis<S>, seed: BallId, check: bool) -> Result<ExhaustionSequence<S>> {
    let n_points = b.space().len();
    let mut seq = vec![seed];
    let mut min_ratio: Option<S> = None;
    let mut max_ratio: Option<S> = None;
    let mut capped_ratio: Option<S> = None;
    let mut cur = seed;
    while b.ball(cur).len() < n_points {
        if check {
            check_hull_axiom(b, cur)?;
        }
        let mu = b.ball(cur).measure();
        let target = S::lit(2.0) * mu;
        let hull = b.hull(cur);
        let candidates = b.superballs(hull);
        let doubled = candidates
            .iter()
            .copied()
            .filter(|&a| b.ball(a).measure() >= target && a != cur)
            .min_by(|&x, &y| b.ball(x).measure().partial_cmp(&b.ball(y).measure()).expect("finite").then(x.cmp(&y)));
        let capped = doubled.is_none();
        let pick = doubled
            .or(b.whole())
            .or_else(|| {
                candidates
                    .iter()
                    .copied()
                    .filter(|&a| b.ball(a).len() > b.ball(cur).len())
                    .max_by(|&x, &y| b.ball(x).measure().partial_cmp(&b.ball(y).measure()).expect("finite").then(y.cmp(&x)))
            });
        let Some(next) = pick else { break };
        if next == cur {
            break;
        }
        let r = b.ball(next).measure() / mu;
        if capped {
            capped_ratio = Some(r);
            seq.push(next);
            cur = next;
            break;
        }
        min_ratio = Some(min_ratio.map_or(r, |m| m.min(r)));
        max_ratio = Some(max_ratio.map_or(r, |m| m.max(r)));
        seq.push(next);
        cur = next;
    }
    let reaches_whole = b.ball(cur).len() == n_points;
    Ok(ExhaustionSequence { balls: seq, min_ratio, max_ratio, capped_ratio, reaches_whole })
}

/// Hull axiom at one ball: every ball meeting it with at most twice its
/// measure lies inside its hull.
fn check_hull_axiom<S: Scalar>(b: &BallBasis<S>, id: BallId) -> Result<()> {
    let bits = b.bits();
    let limit = S::lit(2.0) * b.ball(id).measure();
    let h = b.hull(id);
    for a in b.balls() {
        if super::approx_le(a.measure(), limit) && bits.meets_outside(a.id(), id, h) {
            return Err(Error::HullAxiomViolated { ball: id.index(), inner: a.id().index() });
        }
    }
    Ok(())
}

/// Disjoint subfamily of `cover` whose hulls cover `e`. Repeatedly selects
/// the largest candidate disjoint from every ball selected so far, smallest
/// id first among equal measures; output is in selection order.
pub fn greedy_cover<S: Scalar>(b: &BallBasis<S>, e: &PointSet, cover: &[BallId]) -> Result<Vec<BallId>> {
    e.check_range(b.space().len())?;
    for &c in cover {
        b.get(c)?;
    }
    if let Some(x) = e.iter().find(|&x| !cover.iter().any(|&c| b.ball(c).contains(x))) {
        return Err(Error::CoverDoesNotCover(x));
    }
    let mut order: Vec<BallId> = cover.to_vec();
    order.sort_by(|&x, &y| b.ball(y).measure().partial_cmp(&b.ball(x).measure()).expect("finite").then(x.cmp(&y)));
    order.dedup();
    let bits = b.bits();
    let mut chosen: Vec<BallId> = Vec::new();
    // candidates are visited by decreasing measure, so the first disjoint one
    // at every step is the largest still available
    for c in order {
        if chosen.iter().all(|&s| !bits.intersects(s, c)) {
            chosen.push(c);
        }
    }
    Ok(chosen)
}
