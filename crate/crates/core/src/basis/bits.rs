use fixedbitset::FixedBitSet;

use super::{Ball, BallId};
use crate::scalar::Scalar;

/// Membership bitsets for every ball, used by the pair scans.
#[derive(Debug)]
pub(crate) struct BitIndex {
    rows: Vec<FixedBitSet>,
}

impl BitIndex {
    pub(crate) fn new<S: Scalar>(n_points: usize, balls: &[Ball<S>]) -> Self {
        let rows = balls
            .iter()
            .map(|b| {
                let mut s = FixedBitSet::with_capacity(n_points);
                for x in b.members().iter() {
                    s.insert(x);
                }
                s
            })
            .collect();
        Self { rows }
    }

    #[inline]
    pub(crate) fn row(&self, id: BallId) -> &FixedBitSet {
        &self.rows[id.index()]
    }

    /// `a ⊆ b`.
    #[inline]
    pub(crate) fn is_subset(&self, a: BallId, b: BallId) -> bool {
        self.rows[a.index()].is_subset(&self.rows[b.index()])
    }

    #[inline]
    pub(crate) fn intersects(&self, a: BallId, b: BallId) -> bool {
        !self.rows[a.index()].is_disjoint(&self.rows[b.index()])
    }

    /// True when `a` meets `b` but is not contained in `h`, in one pass.
    #[inline]
    pub(crate) fn meets_outside(&self, a: BallId, b: BallId, h: BallId) -> bool {
        let (a, b, h) = (self.rows[a.index()].as_slice(), self.rows[b.index()].as_slice(), self.rows[h.index()].as_slice());
        let mut meets = false;
        let mut outside = false;
        for ((&wa, &wb), &wh) in a.iter().zip(b).zip(h) {
            meets |= wa & wb != 0;
            outside |= wa & !wh != 0;
        }
        meets && outside
    }

    /// μ(a ∩ b). `uniform` short-circuits to a popcount.
    pub(crate) fn inter_measure<S: Scalar>(&self, a: BallId, b: BallId, weights: &[S], uniform: Option<S>) -> S {
        let (ra, rb) = (&self.rows[a.index()], &self.rows[b.index()]);
        match uniform {
            Some(w) => w * S::from_count(ra.intersection_count(rb)),
            None => {
                let mut acc = S::zero();
                for x in ra.intersection(rb) {
                    acc += weights[x];
                }
                acc
            }
        }
    }

    /// For each ball, every ball strictly containing it.
    pub(crate) fn strict_supersets<S: Scalar>(&self, balls: &[Ball<S>]) -> Vec<Vec<BallId>> {
        balls
            .iter()
            .map(|b| {
                balls
                    .iter()
                    .filter(|a| a.id() != b.id() && a.len() > b.len() && self.is_subset(b.id(), a.id()))
                    .map(|a| a.id())
                    .collect()
            })
            .collect()
    }
}
