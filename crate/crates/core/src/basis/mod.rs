//! Ball-bases on finite spaces: the ball family, hull map, per-point
//! basis-structure, and the operations that only depend on those.
//!
//! Three concrete families ship with the crate:
//! * [`dyadic_basis`]: dyadic intervals of `[0,1)`, hull = parent.
//! * [`grid_torus_basis`]: cubes or Euclidean balls on the periodic grid
//!   `(Z/n)^d`, hull = five-fold dilation.
//! * [`martingale_basis`]: the blocks of a nested partition of an arbitrary
//!   weighted space, hull = largest ancestor of at most twice the mass.
//!
//! Hull maps are supplied in closed form by each constructor and certified by
//! [`validate_axioms`].

mod bits;
mod cover;
mod dyadic;
mod grid;
mod prefix;
mod tree;
mod validate;

use std::collections::{HashMap, VecDeque};
use std::io::Write;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::{fmt_sig, MeasureSpace, PointSet};

pub(crate) use bits::BitIndex;
pub use cover::{exhaustion, greedy_cover, ExhaustionSequence};
pub use dyadic::{dyadic_basis, MAX_DYADIC_LEVELS};
pub(crate) use grid::GridGeometry;
pub use grid::{grid_torus_basis, BallShape, GridSpec};
pub use prefix::BallSums;
pub use tree::{martingale_basis, PartitionTree};
pub use validate::{validate_axioms, AxiomCheck, AxiomReport, Witness};

/// Stable identifier of a ball: its position in the basis enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BallId(pub u32);

impl BallId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for BallId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Geometric description of where a ball came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallLabel {
    Dyadic { level: u32, index: u32 },
    Grid { center: u32, radius: u32 },
    Block { level: u32 },
    Custom,
}

/// Layout of a ball's members used for O(1) sums via prefix tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Layout {
    /// `len` consecutive indices starting at `start`, wrapping modulo the
    /// number of points.
    Interval { start: u32, len: u32 },
    /// Cyclic rectangle on an `n x n` grid (row-major, index = a * n + b).
    Rect { a0: u32, b0: u32, len: u32 },
    Scattered,
}

/// A ball: a set of points of positive, finite measure.
#[derive(Debug, Clone)]
pub struct Ball<S> {
    id: BallId,
    members: PointSet,
    measure: S,
    label: BallLabel,
    layout: Layout,
}

impl<S: Scalar> Ball<S> {
    pub fn id(&self) -> BallId {
        self.id
    }

    pub fn members(&self) -> &PointSet {
        &self.members
    }

    pub fn measure(&self) -> S {
        self.measure
    }

    pub fn label(&self) -> BallLabel {
        self.label
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        if let Layout::Interval { start, len } = self.layout {
            if x >= start as usize && x < (start + len) as usize {
                return true;
            }
        }
        self.members.contains(x)
    }
}

/// Which balls make up the per-point family 𝓑(x).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureMode {
    /// Balls centered at x (grid bases only).
    Centered,
    /// Every ball containing x.
    Uncentered,
}

/// Constants attached to a basis. `hull_constant` is exact for the supplied
/// hull map; the others are filled in when known in closed form and otherwise
/// measured by [`validate_axioms`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisConstants<S> {
    /// K: max μ(B*)/μ(B).
    pub hull_constant: S,
    /// η of the doubling condition.
    pub eta_doubling: Option<S>,
    /// θ of the regularity condition.
    pub theta: Option<S>,
    /// η of the basis-structure comparability condition.
    pub eta_bs: Option<S>,
    /// β, the growth bound of exhaustion sequences.
    pub beta: Option<S>,
}

#[derive(Debug, Clone)]
pub(crate) enum Family {
    Dyadic { levels: u32 },
    Grid(grid::GridGeometry),
    Tree,
    Custom,
}

/// A finite ball-basis together with its hull map and basis-structure.
#[derive(Debug)]
pub struct BallBasis<S> {
    name: String,
    space: Arc<MeasureSpace<S>>,
    balls: Vec<Ball<S>>,
    hull: Vec<BallId>,
    parent: Vec<Option<BallId>>,
    per_point: Vec<Vec<BallId>>,
    mode: StructureMode,
    family: Family,
    constants: BasisConstants<S>,
    whole: Option<BallId>,
    up_links: OnceLock<Vec<Vec<BallId>>>,
    bits: OnceLock<BitIndex>,
}

pub(crate) fn approx_le<S: Scalar>(a: S, b: S) -> bool {
    a <= b + S::lit(1e-12) * b.abs()
}

impl<S: Scalar> BallBasis<S> {
    /// Assembles a basis from explicit member sets and a hull map. Member
    /// sets must be distinct and non-empty. The basis-structure is the
    /// uncentered one (every ball containing the point).
    pub fn from_parts(
        name: impl Into<String>,
        space: Arc<MeasureSpace<S>>,
        sets: Vec<PointSet>,
        hull: Vec<BallId>,
    ) -> Result<Self> {
        let n = sets.len();
        if hull.len() != n {
            return Err(Error::HullLength { expected: n, got: hull.len() });
        }
        let mut seen = HashMap::new();
        let mut balls = Vec::with_capacity(n);
        for (i, set) in sets.into_iter().enumerate() {
            set.check_range(space.len())?;
            if set.is_empty() {
                return Err(Error::DegenerateBall(i));
            }
            if seen.insert(set.clone(), i).is_some() {
                return Err(Error::Parse(format!("ball {i} duplicates an earlier ball")));
            }
            balls.push(make_ball(&space, BallId(i as u32), set, BallLabel::Custom, None));
        }
        if let Some(h) = hull.iter().find(|h| h.index() >= n) {
            return Err(Error::UnknownBall(h.index()));
        }
        Ok(Self::assemble(name.into(), space, balls, hull, vec![None; n], None, StructureMode::Uncentered, Family::Custom))
    }

    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        name: String,
        space: Arc<MeasureSpace<S>>,
        balls: Vec<Ball<S>>,
        hull: Vec<BallId>,
        parent: Vec<Option<BallId>>,
        per_point: Option<Vec<Vec<BallId>>>,
        mode: StructureMode,
        family: Family,
    ) -> Self {
        let n_points = space.len();
        let whole = balls.iter().find(|b| b.len() == n_points).map(|b| b.id);
        let hull_constant = balls
            .iter()
            .map(|b| balls[hull[b.id.index()].index()].measure / b.measure)
            .fold(S::zero(), |m, r| m.max(r));
        let per_point = per_point.unwrap_or_else(|| uncentered_structure(n_points, &balls));
        Self {
            name,
            space,
            balls,
            hull,
            parent,
            per_point,
            mode,
            family,
            constants: BasisConstants { hull_constant, eta_doubling: None, theta: None, eta_bs: None, beta: None },
            whole,
            up_links: OnceLock::new(),
            bits: OnceLock::new(),
        }
    }

    /// Returns a copy of this basis with a different hull map. Useful for
    /// exercising the validators on deliberately broken bases.
    pub fn with_hulls(&self, hull: Vec<BallId>) -> Result<Self> {
        if hull.len() != self.balls.len() {
            return Err(Error::HullLength { expected: self.balls.len(), got: hull.len() });
        }
        if let Some(h) = hull.iter().find(|h| h.index() >= self.balls.len()) {
            return Err(Error::UnknownBall(h.index()));
        }
        Ok(Self::assemble(
            format!("{}+custom-hull", self.name),
            self.space.clone(),
            self.balls.clone(),
            hull,
            self.parent.clone(),
            Some(self.per_point.clone()),
            self.mode,
            self.family.clone(),
        ))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &Arc<MeasureSpace<S>> {
        &self.space
    }

    pub fn balls(&self) -> &[Ball<S>] {
        &self.balls
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    #[inline]
    pub fn ball(&self, id: BallId) -> &Ball<S> {
        &self.balls[id.index()]
    }

    pub fn get(&self, id: BallId) -> Result<&Ball<S>> {
        self.balls.get(id.index()).ok_or(Error::UnknownBall(id.index()))
    }

    #[inline]
    pub fn hull(&self, id: BallId) -> BallId {
        self.hull[id.index()]
    }

    pub fn hull_ball(&self, id: BallId) -> &Ball<S> {
        self.ball(self.hull(id))
    }

    /// 𝓑(x).
    pub fn per_point(&self, x: usize) -> &[BallId] {
        &self.per_point[x]
    }

    pub fn structure(&self) -> &[Vec<BallId>] {
        &self.per_point
    }

    pub fn mode(&self) -> StructureMode {
        self.mode
    }

    pub fn constants(&self) -> BasisConstants<S> {
        self.constants
    }

    /// The ball equal to the whole space, if the family contains one.
    pub fn whole(&self) -> Option<BallId> {
        self.whole
    }

    /// Parent in the tree order for dyadic and martingale bases.
    pub fn parent(&self, id: BallId) -> Option<BallId> {
        self.parent[id.index()]
    }

    pub fn is_dyadic(&self) -> bool {
        matches!(self.family, Family::Dyadic { .. })
    }

    pub fn dyadic_levels(&self) -> Option<u32> {
        match self.family {
            Family::Dyadic { levels } => Some(levels),
            _ => None,
        }
    }

    pub fn grid_spec(&self) -> Option<GridSpec> {
        match &self.family {
            Family::Grid(g) => Some(g.spec()),
            _ => None,
        }
    }

    pub(crate) fn grid_geometry(&self) -> Option<&grid::GridGeometry> {
        match &self.family {
            Family::Grid(g) => Some(g),
            _ => None,
        }
    }

    fn is_tree(&self) -> bool {
        matches!(self.family, Family::Dyadic { .. } | Family::Tree)
    }

    /// The same balls with the other basis-structure. Only grid bases
    /// distinguish centered from uncentered families.
    pub fn with_mode(&self, mode: StructureMode) -> Result<Self> {
        let per_point = match (&self.family, mode) {
            (Family::Grid(g), StructureMode::Centered) => g.centered_structure(),
            (_, StructureMode::Centered) => return Err(Error::WrongBasis("grid")),
            (_, StructureMode::Uncentered) => uncentered_structure(self.space.len(), &self.balls),
        };
        let mut out = Self::assemble(
            self.name.clone(),
            self.space.clone(),
            self.balls.clone(),
            self.hull.clone(),
            self.parent.clone(),
            Some(per_point),
            mode,
            self.family.clone(),
        );
        out.constants = self.constants;
        out.constants.eta_bs = None;
        Ok(out)
    }

    pub(crate) fn set_known_constants(&mut self, eta_doubling: Option<S>, theta: Option<S>, eta_bs: Option<S>, beta: Option<S>) {
        self.constants.eta_doubling = eta_doubling;
        self.constants.theta = theta;
        self.constants.eta_bs = eta_bs;
        self.constants.beta = beta;
    }

    pub(crate) fn bits(&self) -> &BitIndex {
        self.bits.get_or_init(|| BitIndex::new(self.space.len(), &self.balls))
    }

    /// Links whose reflexive-transitive closure from a ball is exactly the
    /// set of balls containing it.
    pub(crate) fn up_links(&self) -> &[Vec<BallId>] {
        self.up_links.get_or_init(|| match &self.family {
            Family::Dyadic { .. } | Family::Tree => self.parent.iter().map(|p| p.iter().copied().collect()).collect(),
            Family::Grid(g) if g.spec().shape == BallShape::Cube => g.cube_up_links(),
            _ => self.bits().strict_supersets(&self.balls),
        })
    }

    /// Every ball containing `id`, including itself, in ascending id order.
    pub fn superballs(&self, id: BallId) -> Vec<BallId> {
        let links = self.up_links();
        let mut seen = vec![false; self.balls.len()];
        let mut queue = VecDeque::from([id]);
        seen[id.index()] = true;
        let mut out = Vec::new();
        while let Some(b) = queue.pop_front() {
            out.push(b);
            for &u in &links[b.index()] {
                if !seen[u.index()] {
                    seen[u.index()] = true;
                    queue.push_back(u);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// For each ball, max of `values` over the ball and all balls containing
    /// it, computed by one pass over the containment links in order of
    /// decreasing measure.
    pub fn max_over_superballs(&self, values: &[S]) -> Vec<S> {
        let links = self.up_links();
        let mut order: Vec<usize> = (0..self.balls.len()).collect();
        order.sort_by(|&a, &b| {
            self.balls[b].measure.partial_cmp(&self.balls[a].measure).expect("finite").then(a.cmp(&b))
        });
        let mut out = values.to_vec();
        for b in order {
            let mut best = out[b];
            for &u in &links[b] {
                best = best.max(out[u.index()]);
            }
            out[b] = best;
        }
        out
    }

    /// d(x, B): smallest measure of a ball containing B ∪ {x}. `None` when
    /// no such ball exists.
    pub fn d_of(&self, x: usize, id: BallId) -> Option<S> {
        let b = self.ball(id);
        if self.is_tree() {
            let mut cur = Some(id);
            while let Some(c) = cur {
                if self.ball(c).contains(x) {
                    return Some(self.ball(c).measure);
                }
                cur = self.parent[c.index()];
            }
            return None;
        }
        if let Family::Grid(g) = &self.family {
            if g.spec().shape == BallShape::Cube {
                let w = self.space.uniform_weight().expect("grid spaces are uniform");
                return Some(g.cube_d_of(x, b.label, w));
            }
        }
        self.d_of_scan(x, id)
    }

    /// `d(y, B)` for every point y at once.
    pub fn d_row(&self, id: BallId) -> Vec<Option<S>> {
        let n = self.space.len();
        let fast = self.is_tree() || matches!(&self.family, Family::Grid(g) if g.spec().shape == BallShape::Cube);
        if fast {
            return (0..n).map(|y| self.d_of(y, id)).collect();
        }
        let mut sup = self.superballs(id);
        sup.sort_by(|&a, &b| self.ball(a).measure.partial_cmp(&self.ball(b).measure).expect("finite").then(a.cmp(&b)));
        let mut out = vec![None; n];
        let mut filled = 0;
        for a in sup {
            let a = self.ball(a);
            for y in a.members.iter() {
                if out[y].is_none() {
                    out[y] = Some(a.measure);
                    filled += 1;
                }
            }
            if filled == n {
                break;
            }
        }
        out
    }

    /// d(x, B) by scanning every ball.
    pub fn d_of_scan(&self, x: usize, id: BallId) -> Option<S> {
        let b = self.ball(id);
        let bits = self.bits();
        self.balls
            .iter()
            .filter(|a| a.measure >= b.measure && a.contains(x) && bits.is_subset(id, a.id))
            .map(|a| a.measure)
            .fold(None, |m: Option<S>, v| Some(m.map_or(v, |m| m.min(v))))
    }

    /// Basis description as CSV: `id,kind,level,center,radius,size,measure,hull`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["id", "kind", "level", "center", "radius", "size", "measure", "hull"])?;
        for b in &self.balls {
            let (kind, level, center, radius) = match b.label {
                BallLabel::Dyadic { level, index } => ("dyadic", level.to_string(), index.to_string(), String::new()),
                BallLabel::Grid { center, radius } => ("grid", String::new(), center.to_string(), radius.to_string()),
                BallLabel::Block { level } => ("block", level.to_string(), String::new(), String::new()),
                BallLabel::Custom => ("custom", String::new(), String::new(), String::new()),
            };
            w.write_record([
                b.id.to_string(),
                kind.to_string(),
                level,
                center,
                radius,
                b.len().to_string(),
                fmt_sig(b.measure),
                self.hull(b.id).to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub(crate) fn make_ball<S: Scalar>(
    space: &MeasureSpace<S>,
    id: BallId,
    members: PointSet,
    label: BallLabel,
    layout: Option<Layout>,
) -> Ball<S> {
    let measure = space.measure_unchecked(members.as_slice());
    let layout = layout.unwrap_or_else(|| {
        let m = members.as_slice();
        match (m.first(), m.last()) {
            (Some(&lo), Some(&hi)) if (hi - lo) as usize + 1 == m.len() => Layout::Interval { start: lo, len: m.len() as u32 },
            _ => Layout::Scattered,
        }
    });
    Ball { id, members, measure, label, layout }
}

fn uncentered_structure<S: Scalar>(n_points: usize, balls: &[Ball<S>]) -> Vec<Vec<BallId>> {
    let mut out = vec![Vec::new(); n_points];
    for b in balls {
        for x in b.members.iter() {
            out[x].push(b.id);
        }
    }
    out
}
