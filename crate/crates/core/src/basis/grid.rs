use std::collections::HashMap;
use std::sync::Arc;

use super::{make_ball, Ball, BallBasis, BallId, BallLabel, Family, Layout, StructureMode};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{MeasureSpace, PointSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallShape {
    /// Sup-norm balls (intervals in d = 1, squares in d = 2).
    Cube,
    /// Euclidean balls in the torus metric.
    Ball,
}

/// Parameters of a periodic grid basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    pub d: usize,
    pub n: usize,
    pub shape: BallShape,
    pub mode: StructureMode,
}

impl GridSpec {
    pub fn new(d: usize, n: usize, shape: BallShape) -> Self {
        Self { d, n, shape, mode: StructureMode::Uncentered }
    }

    pub fn centered(mut self) -> Self {
        self.mode = StructureMode::Centered;
        self
    }

    pub fn points(&self) -> usize {
        self.n.pow(self.d as u32)
    }
}

/// Index from (center, radius) to the canonical ball id. Balls that coincide
/// as sets (e.g. every ball covering the whole torus) share one id, the first
/// in center-major enumeration order.
#[derive(Debug, Clone)]
pub(crate) struct GridGeometry {
    spec: GridSpec,
    r_max: u32,
    index: Vec<BallId>,
}

impl GridGeometry {
    pub(crate) fn spec(&self) -> GridSpec {
        self.spec
    }

    pub(crate) fn r_max(&self) -> u32 {
        self.r_max
    }

    #[inline]
    pub(crate) fn id(&self, center: usize, radius: u32) -> BallId {
        let r = radius.clamp(1, self.r_max);
        self.index[center * self.r_max as usize + (r - 1) as usize]
    }

    pub(crate) fn point(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &c| acc * self.spec.n + c)
    }

    pub(crate) fn coords(&self, x: usize) -> [usize; 2] {
        let n = self.spec.n;
        if self.spec.d == 1 {
            [x, 0]
        } else {
            [x / n, x % n]
        }
    }

    /// Signed cyclic offset of `b` from `a` along one axis, in `(-n/2, n/2]`.
    pub(crate) fn offset(&self, a: usize, b: usize) -> i64 {
        let n = self.spec.n as i64;
        let mut d = (b as i64 - a as i64).rem_euclid(n);
        if d > n / 2 {
            d -= n;
        }
        d
    }

    pub(crate) fn cyc_dist(&self, a: usize, b: usize) -> usize {
        self.offset(a, b).unsigned_abs() as usize
    }

    pub(crate) fn centered_structure(&self) -> Vec<Vec<BallId>> {
        (0..self.spec.points())
            .map(|x| {
                let mut v: Vec<BallId> = (1..=self.r_max).map(|r| self.id(x, r)).collect();
                v.sort_unstable();
                v.dedup();
                v
            })
            .collect()
    }

    /// Links (c, r) -> (c + δ, r + 1), δ ∈ {-1, 0, 1}^d. For cubes on the
    /// torus their closure from a ball is exactly its set of superballs.
    pub(crate) fn cube_up_links(&self) -> Vec<Vec<BallId>> {
        let n = self.spec.n;
        let n_balls = self.index.iter().map(|b| b.index() + 1).max().unwrap_or(0);
        let mut links = vec![Vec::new(); n_balls];
        let mut done = vec![false; n_balls];
        for x in 0..self.spec.points() {
            for r in 1..=self.r_max {
                let id = self.id(x, r);
                if done[id.index()] || r == self.r_max {
                    done[id.index()] = true;
                    continue;
                }
                done[id.index()] = true;
                let [a, b] = self.coords(x);
                let mut out = Vec::new();
                let shifts: &[i64] = &[-1, 0, 1];
                for &da in shifts {
                    for &db in if self.spec.d == 2 { shifts } else { &[0] } {
                        let ca = (a as i64 + da).rem_euclid(n as i64) as usize;
                        let cb = (b as i64 + db).rem_euclid(n as i64) as usize;
                        let c = if self.spec.d == 1 { ca } else { self.point(&[ca, cb]) };
                        let up = self.id(c, r + 1);
                        if up != id {
                            out.push(up);
                        }
                    }
                }
                out.sort_unstable();
                out.dedup();
                links[id.index()] = out;
            }
        }
        links
    }

    /// Closed-form d(x, B) for cube bases with uniform weight `w`.
    pub(crate) fn cube_d_of<S: Scalar>(&self, x: usize, label: BallLabel, w: S) -> S {
        let n = self.spec.n;
        let BallLabel::Grid { center, radius } = label else {
            unreachable!("grid balls carry grid labels")
        };
        let r = radius as usize;
        let full = w * S::from_count(self.spec.points());
        if 2 * r + 1 >= n {
            return full;
        }
        let cx = self.coords(x);
        let cc = self.coords(center as usize);
        let mut need = r;
        for axis in 0..self.spec.d {
            let delta = self.cyc_dist(cx[axis], cc[axis]);
            if delta > r {
                need = need.max((delta + r).div_ceil(2));
            }
        }
        if 2 * need + 1 >= n {
            full
        } else {
            w * S::from_count((2 * need + 1).pow(self.spec.d as u32))
        }
    }
}

/// Cubes or Euclidean balls of every integer radius around every point of the
/// periodic grid `(Z/n)^d`, `d ∈ {1, 2}`, with uniform weights `n^-d`.
///
/// Cube radii run over `1..=n/2`; Euclidean radii run up to the first radius
/// whose ball is the whole torus. The hull of `B(x, r)` is `B(x, min(5r, r_max))`.
pub fn grid_torus_basis<S: Scalar>(spec: GridSpec) -> Result<BallBasis<S>> {
    let GridSpec { d, n, shape, mode } = spec;
    if d != 1 && d != 2 {
        return Err(Error::InvalidDimension(d));
    }
    if n < 4 {
        return Err(Error::GridTooSmall(n));
    }
    let n_points = spec.points();
    let half = n / 2;
    let r_max = match shape {
        BallShape::Cube => half as u32,
        BallShape::Ball => ((d * half * half) as f64).sqrt().ceil() as u32,
    };
    let coords: Vec<S> = (0..n_points)
        .flat_map(|x| if d == 1 { vec![S::from_count(x)] } else { vec![S::from_count(x / n), S::from_count(x % n)] })
        .collect();
    let space = Arc::new(MeasureSpace::uniform(n_points, S::one())?.with_coords(d, coords)?);

    let mut geo = GridGeometry { spec, r_max, index: Vec::with_capacity(n_points * r_max as usize) };
    let mut balls: Vec<Ball<S>> = Vec::new();
    let mut by_set: HashMap<PointSet, BallId> = HashMap::new();
    for c in 0..n_points {
        for r in 1..=r_max {
            let (members, layout) = grid_members(&geo, c, r);
            let id = match by_set.get(&members) {
                Some(&id) => id,
                None => {
                    let id = BallId(balls.len() as u32);
                    by_set.insert(members.clone(), id);
                    balls.push(make_ball(&space, id, members, BallLabel::Grid { center: c as u32, radius: r }, Some(layout)));
                    id
                }
            };
            geo.index.push(id);
        }
    }
    let hull = balls
        .iter()
        .map(|b| {
            let BallLabel::Grid { center, radius } = b.label else { unreachable!() };
            geo.id(center as usize, (5 * radius).min(r_max))
        })
        .collect();
    let per_point = match mode {
        StructureMode::Centered => Some(geo.centered_structure()),
        StructureMode::Uncentered => None,
    };
    let shape_name = match shape {
        BallShape::Cube => "cube",
        BallShape::Ball => "ball",
    };
    let mode_name = match mode {
        StructureMode::Centered => "centered",
        StructureMode::Uncentered => "uncentered",
    };
    let n_balls = balls.len();
    Ok(BallBasis::assemble(
        format!("grid-d{d}-n{n}-{shape_name}-{mode_name}"),
        space,
        balls,
        hull,
        vec![None; n_balls],
        per_point,
        mode,
        Family::Grid(geo),
    ))
}

fn grid_members(geo: &GridGeometry, c: usize, r: u32) -> (PointSet, Layout) {
    let GridSpec { d, n, shape, .. } = geo.spec;
    let r = r as usize;
    let n_points = geo.spec.points();
    match shape {
        BallShape::Cube if 2 * r + 1 >= n => (PointSet::full(n_points), Layout::Interval { start: 0, len: n_points as u32 }),
        BallShape::Cube => {
            let len = 2 * r + 1;
            let [a, b] = geo.coords(c);
            let a0 = (a + n - r) % n;
            let b0 = (b + n - r) % n;
            if d == 1 {
                let set = PointSet::new((0..len).map(|k| (a0 + k) % n));
                (set, Layout::Interval { start: a0 as u32, len: len as u32 })
            } else {
                let set = PointSet::new((0..len).flat_map(|i| (0..len).map(move |j| ((a0 + i) % n) * n + (b0 + j) % n)));
                (set, Layout::Rect { a0: a0 as u32, b0: b0 as u32, len: len as u32 })
            }
        }
        BallShape::Ball => {
            let cc = geo.coords(c);
            let set = PointSet::new((0..n_points).filter(|&y| {
                let cy = geo.coords(y);
                let dist2: usize = (0..d).map(|k| geo.cyc_dist(cc[k], cy[k]).pow(2)).sum();
                dist2 <= r * r
            }));
            let layout = if set.len() == n_points {
                Layout::Interval { start: 0, len: n_points as u32 }
            } else {
                Layout::Scattered
            };
            (set, layout)
        }
    }
}
