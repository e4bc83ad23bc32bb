use std::sync::Arc;

use super::{make_ball, BallBasis, BallId, BallLabel, Family, Layout, StructureMode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{MeasureSpace, PointSet};

/// Deepest dyadic level accepted by [`dyadic_basis`].
pub const MAX_DYADIC_LEVELS: u32 = 24;

/// Id of the dyadic interval `[index 2^-level, (index+1) 2^-level)`.
#[inline]
pub(crate) fn dyadic_id(level: u32, index: u32) -> BallId {
    BallId((1u32 << level) - 1 + index)
}

/// Dyadic intervals of levels `0..=levels` on `2^levels` equal cells of `[0,1)`.
///
/// Ids are level-major: `[0,1)` is ball 0, its children are 1 and 2, and so
/// on. The hull of every interval is its parent; `[0,1)` is its own hull.
/// 𝓑(x) is the chain of intervals containing x.
pub fn dyadic_basis<S: Scalar>(levels: u32) -> Result<BallBasis<S>> {
    if levels > MAX_DYADIC_LEVELS {
        return Err(Error::LevelsTooLarge(levels));
    }
    let n = 1usize << levels;
    let coords = (0..n).map(|j| S::from_count(j) / S::from_count(n)).collect();
    let space = Arc::new(MeasureSpace::uniform(n, S::one())?.with_coords(1, coords)?);
    let total = (1usize << (levels + 1)) - 1;
    let mut balls = Vec::with_capacity(total);
    let mut hull = Vec::with_capacity(total);
    let mut parent = Vec::with_capacity(total);
    for level in 0..=levels {
        let width = 1u32 << (levels - level);
        for index in 0..(1u32 << level) {
            let id = dyadic_id(level, index);
            let start = index * width;
            let members = PointSet::from_sorted((start..start + width).collect());
            balls.push(make_ball(
                &space,
                id,
                members,
                BallLabel::Dyadic { level, index },
                Some(Layout::Interval { start, len: width }),
            ));
            let p = (level > 0).then(|| dyadic_id(level - 1, index / 2));
            parent.push(p);
            hull.push(p.unwrap_or(id));
        }
    }
    let per_point = (0..n as u32)
        .map(|x| (0..=levels).map(|k| dyadic_id(k, x >> (levels - k))).collect())
        .collect();
    let mut basis = BallBasis::assemble(
        format!("dyadic-L{levels}"),
        space,
        balls,
        hull,
        parent,
        Some(per_point),
        StructureMode::Uncentered,
        Family::Dyadic { levels },
    );
    let two = S::lit(2.0);
    let (eta, theta) = if levels == 0 { (None, Some(S::one())) } else { (Some(two), Some(S::lit(0.5))) };
    basis.set_known_constants(eta, theta, Some(S::one()), Some(two));
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id_of(b: &BallBasis<f64>, members: &[u32]) -> BallId {
        b.balls().iter().find(|a| a.members().as_slice() == members).unwrap().id()
    }

    #[test]
    fn ball_counts_and_hulls() {
        let b = dyadic_basis::<f64>(2).unwrap();
        assert_eq!(b.len(), 7);
        let quarter = id_of(&b, &[0]);
        assert_eq!(b.hull_ball(quarter).members().as_slice(), &[0, 1]);
        assert_eq!(b.hull(BallId(0)), BallId(0));
        assert_eq!(b.constants().hull_constant, 2.0);
        assert_eq!(b.whole(), Some(BallId(0)));
        for k in 0..=2 {
            let count = b.balls().iter().filter(|a| matches!(a.label(), BallLabel::Dyadic { level, .. } if level == k)).count();
            assert_eq!(count, 1 << k);
        }
    }

    #[test]
    fn per_point_is_the_containing_chain() {
        let b = dyadic_basis::<f64>(3).unwrap();
        for x in 0..8 {
            let chain = b.per_point(x);
            assert_eq!(chain.len(), 4);
            let expect: Vec<BallId> = b.balls().iter().filter(|a| a.contains(x)).map(|a| a.id()).collect();
            assert_eq!(chain, expect.as_slice());
        }
    }

    #[test]
    fn rejects_excessive_depth() {
        assert!(matches!(dyadic_basis::<f64>(25), Err(Error::LevelsTooLarge(25))));
    }

    #[test]
    fn single_level() {
        let b = dyadic_basis::<f64>(0).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.hull(BallId(0)), BallId(0));
    }
}
