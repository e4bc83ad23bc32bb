use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{approx_le, make_ball, Ball, BallBasis, BallId, BallLabel, Family, StructureMode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{MeasureSpace, PointSet};

/// Nested partitions of a weighted space. `levels[k][x]` is the block label
/// of point `x` at level `k`; each level must refine the one before it and
/// the last level must consist of singletons.
#[derive(Debug, Clone)]
pub struct PartitionTree<S> {
    pub space: Arc<MeasureSpace<S>>,
    pub levels: Vec<Vec<usize>>,
}

impl<S: Scalar> PartitionTree<S> {
    pub fn new(space: Arc<MeasureSpace<S>>, levels: Vec<Vec<usize>>) -> Result<Self> {
        let n = space.len();
        if levels.is_empty() {
            return Err(Error::LeavesNotSingletons);
        }
        for lvl in &levels {
            if lvl.len() != n {
                return Err(Error::LengthMismatch { expected: n, got: lvl.len() });
            }
        }
        for k in 1..levels.len() {
            let mut up: HashMap<usize, usize> = HashMap::new();
            for x in 0..n {
                let p = *up.entry(levels[k][x]).or_insert(levels[k - 1][x]);
                if p != levels[k - 1][x] {
                    return Err(Error::NonNestedPartition { level: k, parent: k - 1 });
                }
            }
        }
        let last = levels.last().expect("non-empty");
        let mut seen = HashMap::new();
        for (x, &l) in last.iter().enumerate() {
            if seen.insert(l, x).is_some() {
                return Err(Error::LeavesNotSingletons);
            }
        }
        Ok(Self { space, levels })
    }

    /// Random tree on `n` points with random weights in `[1, 4]`: the root is
    /// the whole space and every block splits into two or three contiguous
    /// pieces until only singletons remain.
    pub fn random(n: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights: Vec<S> = (0..n).map(|_| S::lit(rng.gen_range(1.0..4.0))).collect();
        let space = Arc::new(MeasureSpace::new(weights)?);
        let mut blocks = vec![(0usize, n)];
        let mut levels = vec![vec![0; n]];
        while blocks.iter().any(|&(a, b)| b - a > 1) {
            let mut next = Vec::new();
            for &(a, b) in &blocks {
                let len = b - a;
                if len == 1 {
                    next.push((a, b));
                    continue;
                }
                let pieces = if len >= 3 { rng.gen_range(2..=3) } else { 2 };
                let mut cuts: Vec<usize> = Vec::new();
                while cuts.len() < pieces - 1 {
                    let c = rng.gen_range(a + 1..b);
                    if !cuts.contains(&c) {
                        cuts.push(c);
                    }
                }
                cuts.sort_unstable();
                let mut lo = a;
                for c in cuts.into_iter().chain([b]) {
                    next.push((lo, c));
                    lo = c;
                }
            }
            let mut lvl = vec![0; n];
            for (label, &(a, b)) in next.iter().enumerate() {
                lvl[a..b].iter_mut().for_each(|l| *l = label);
            }
            levels.push(lvl);
            blocks = next;
        }
        Self::new(space, levels)
    }
}

/// Every block of every level as a ball. A block equal to its parent as a
/// set is kept once. The hull of a block is its highest ancestor whose
/// measure is at most twice its own.
pub fn martingale_basis<S: Scalar>(tree: &PartitionTree<S>) -> Result<BallBasis<S>> {
    let space = tree.space.clone();
    let n = space.len();
    let mut balls: Vec<Ball<S>> = Vec::new();
    let mut parent: Vec<Option<BallId>> = Vec::new();
    // ball id of each point's current block
    let mut current: Vec<Option<BallId>> = vec![None; n];
    for (k, lvl) in tree.levels.iter().enumerate() {
        let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for (x, &l) in lvl.iter().enumerate() {
            let i = *slot.entry(l).or_insert_with(|| {
                groups.push((l, Vec::new()));
                groups.len() - 1
            });
            groups[i].1.push(x);
        }
        let mut next = current.clone();
        for (_, pts) in groups {
            let up = current[pts[0]];
            if let Some(p) = up {
                if balls[p.index()].len() == pts.len() {
                    continue;
                }
            }
            let id = BallId(balls.len() as u32);
            let members = PointSet::new(pts.iter().copied());
            balls.push(make_ball(&space, id, members, BallLabel::Block { level: k as u32 }, None));
            parent.push(up);
            for &x in &pts {
                next[x] = Some(id);
            }
        }
        current = next;
    }
    let hull = balls
        .iter()
        .map(|b| {
            let limit = S::lit(2.0) * b.measure();
            let mut h = b.id();
            while let Some(p) = parent[h.index()] {
                if approx_le(balls[p.index()].measure(), limit) {
                    h = p;
                } else {
                    break;
                }
            }
            h
        })
        .collect();
    let per_point = (0..n)
        .map(|x| {
            let mut chain = Vec::new();
            let mut cur = current[x];
            while let Some(c) = cur {
                chain.push(c);
                cur = parent[c.index()];
            }
            chain.sort_unstable();
            chain
        })
        .collect();
    let mut basis = BallBasis::assemble(
        format!("martingale-n{n}"),
        space,
        balls,
        hull,
        parent,
        Some(per_point),
        StructureMode::Uncentered,
        Family::Tree,
    );
    basis.set_known_constants(None, None, Some(S::one()), None);
    Ok(basis)
}
