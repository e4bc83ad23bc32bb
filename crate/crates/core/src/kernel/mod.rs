//! Kernel-structures `{φ_B}`: one nonnegative density per ball with unit
//! mass, bounded below by a multiple of `𝕀_B/μ(B)` and above by a
//! modulus-of-continuity envelope in `d(x,B)/μ(B)`.

mod modulus;
mod profile;
mod validate;

use std::io::Write;

use crate::basis::{BallBasis, BallId, BallLabel, BallShape, BallSums, GridGeometry};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use modulus::{i_omega, IOmega, Modulus};
pub use profile::{AlphaPreset, Profile};
pub use validate::{validate_kernels, KernelReport};

/// Geometric step grid used to sample derived envelopes.
const ENVELOPE_STEPS_PER_OCTAVE: f64 = 4.0;
/// Normalized densities below this are dropped.
const SPARSE_THRESHOLD: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub enum KernelFamily {
    Indicator,
    Convolution(Profile),
    DyadicWeighted { alpha: Vec<f64>, j_alpha: f64 },
    Fejer { degrees: Vec<usize> },
    Custom,
}

#[derive(Debug, Clone)]
enum Rows<S> {
    Indicator,
    /// Dyadic weighted kernels, evaluated through the ancestor chain.
    Chain { alpha: Vec<S>, norm: Vec<S> },
    /// Translation-invariant kernels on a grid: one table per slot, indexed by
    /// the offset of the point from the ball's center.
    Circulant { tables: Vec<Vec<S>>, slot_of_ball: Vec<Option<u32>> },
    Sparse(Vec<Option<Vec<(u32, S)>>>),
}

/// Kernels for the balls of one basis.
#[derive(Debug, Clone)]
pub struct KernelStructure<S> {
    name: String,
    family: KernelFamily,
    rows: Rows<S>,
    omega: Modulus<S>,
    declared_c1: Option<S>,
    declared_c2: Option<S>,
    i_omega: IOmega<S>,
    n_balls: usize,
    structure: Option<Vec<Vec<BallId>>>,
}

impl<S: Scalar> KernelStructure<S> {
    /// Kernels given explicitly as sparse density rows, used as-is (no
    /// renormalization). `None` marks a ball without a kernel.
    pub fn from_rows(
        name: impl Into<String>,
        b: &BallBasis<S>,
        rows: Vec<Option<Vec<(usize, S)>>>,
        omega: Modulus<S>,
    ) -> Result<Self> {
        if rows.len() != b.len() {
            return Err(Error::LengthMismatch { expected: b.len(), got: rows.len() });
        }
        let n = b.space().len();
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            out.push(match row {
                None => None,
                Some(mut r) => {
                    r.sort_by_key(|e| e.0);
                    for &(y, v) in &r {
                        if y >= n {
                            return Err(Error::IndexOutOfRange { index: y, len: n });
                        }
                        if !(v.is_finite() && v >= S::zero()) {
                            return Err(Error::ProfileInvalid);
                        }
                    }
                    Some(r.into_iter().map(|(y, v)| (y as u32, v)).collect())
                }
            });
        }
        let i_omega = omega.i_omega();
        Ok(Self {
            name: name.into(),
            family: KernelFamily::Custom,
            rows: Rows::Sparse(out),
            omega,
            declared_c1: None,
            declared_c2: None,
            i_omega,
            n_balls: b.len(),
            structure: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn modulus(&self) -> &Modulus<S> {
        &self.omega
    }

    pub fn declared_c1(&self) -> Option<S> {
        self.declared_c1
    }

    pub fn declared_c2(&self) -> Option<S> {
        self.declared_c2
    }

    pub fn i_omega(&self) -> IOmega<S> {
        self.i_omega
    }

    /// Basis-structure the family is designed for, when it differs from the
    /// basis' own (Fejér kernels exist only on a few radii).
    pub fn preferred_structure(&self) -> Option<&[Vec<BallId>]> {
        self.structure.as_deref()
    }

    pub fn has_kernel(&self, id: BallId) -> bool {
        match &self.rows {
            Rows::Indicator | Rows::Chain { .. } => id.index() < self.n_balls,
            Rows::Circulant { slot_of_ball, .. } => slot_of_ball.get(id.index()).is_some_and(|s| s.is_some()),
            Rows::Sparse(r) => r.get(id.index()).is_some_and(|s| s.is_some()),
        }
    }

    fn check_basis(&self, b: &BallBasis<S>) {
        assert_eq!(b.len(), self.n_balls, "kernel structure used with a different basis");
    }

    /// Density of φ_B at every point, or `None` when B has no kernel.
    pub fn dense(&self, b: &BallBasis<S>, id: BallId) -> Option<Vec<S>> {
        self.check_basis(b);
        if !self.has_kernel(id) {
            return None;
        }
        let n = b.space().len();
        let ball = b.ball(id);
        let mut out = vec![S::zero(); n];
        match &self.rows {
            Rows::Indicator => {
                let v = S::one() / ball.measure();
                for x in ball.members().iter() {
                    out[x] = v;
                }
            }
            Rows::Chain { alpha, norm } => {
                let levels = b.dyadic_levels().expect("chain kernels live on dyadic bases");
                let BallLabel::Dyadic { level, index } = ball.label() else { unreachable!() };
                // ancestors I_level, ..., I_0
                let mut chain = vec![id];
                while let Some(p) = b.parent(*chain.last().expect("nonempty")) {
                    chain.push(p);
                }
                chain.reverse();
                // prefix[k]: density on points whose deepest common ancestor has level k
                let mut prefix = Vec::with_capacity(level as usize + 1);
                let mut acc = S::zero();
                for (k, &a) in chain.iter().enumerate() {
                    acc += alpha[level as usize - k] / b.ball(a).measure();
                    prefix.push(acc / norm[level as usize]);
                }
                for (y, o) in out.iter_mut().enumerate() {
                    let cell = (y >> (levels - level)) as u32;
                    let diff = cell ^ index;
                    let common = if diff == 0 { level } else { level - (32 - diff.leading_zeros()) };
                    *o = prefix[common as usize];
                }
            }
            Rows::Circulant { tables, slot_of_ball } => {
                let g = b.grid_geometry().expect("circulant kernels live on grid bases");
                let table = &tables[slot_of_ball[id.index()].expect("checked") as usize];
                let BallLabel::Grid { center, .. } = ball.label() else { unreachable!() };
                for (y, o) in out.iter_mut().enumerate() {
                    *o = table[offset_index(g, center as usize, y)];
                }
            }
            Rows::Sparse(rows) => {
                for &(y, v) in rows[id.index()].as_ref().expect("checked") {
                    out[y as usize] = v;
                }
            }
        }
        Some(out)
    }

    /// Nonzero entries `(point, density)` of φ_B in point order.
    pub fn row(&self, b: &BallBasis<S>, id: BallId) -> Option<Vec<(usize, S)>> {
        self.dense(b, id).map(|d| d.into_iter().enumerate().filter(|e| e.1 > S::zero()).collect())
    }

    /// `∫ |f| φ_B dμ` for every ball, `None` where no kernel exists.
    /// `abs_values` must already be nonnegative.
    pub fn averages(&self, b: &BallBasis<S>, abs_values: &[S]) -> Vec<Option<S>> {
        self.check_basis(b);
        match &self.rows {
            Rows::Indicator => {
                let sums = BallSums::new(b, abs_values);
                (0..b.len()).map(|i| Some(sums.average(BallId(i as u32)))).collect()
            }
            Rows::Chain { alpha, norm } => {
                let sums = BallSums::new(b, abs_values);
                let avg: Vec<S> = (0..b.len()).map(|i| sums.average(BallId(i as u32))).collect();
                b.balls()
                    .iter()
                    .map(|ball| {
                        let BallLabel::Dyadic { level, .. } = ball.label() else { unreachable!() };
                        let mut acc = S::zero();
                        let mut cur = Some(ball.id());
                        let mut k = level;
                        while let Some(c) = cur {
                            acc += alpha[(level - k) as usize] * avg[c.index()];
                            cur = b.parent(c);
                            k = k.saturating_sub(1);
                        }
                        Some(acc / norm[level as usize])
                    })
                    .collect()
            }
            Rows::Circulant { tables, slot_of_ball } => {
                let g = b.grid_geometry().expect("circulant kernels live on grid bases");
                let weighted: Vec<S> = abs_values.iter().zip(b.space().weights()).map(|(&v, &w)| v * w).collect();
                b.balls()
                    .iter()
                    .map(|ball| {
                        let slot = slot_of_ball[ball.id().index()]?;
                        let BallLabel::Grid { center, .. } = ball.label() else { unreachable!() };
                        Some(circulant_average(g, &tables[slot as usize], center as usize, &weighted))
                    })
                    .collect()
            }
            Rows::Sparse(rows) => rows
                .iter()
                .map(|r| {
                    r.as_ref().map(|r| r.iter().map(|&(y, v)| abs_values[y as usize] * v * b.space().weight(y as usize)).sum())
                })
                .collect(),
        }
    }

    /// Kernel table for every enumerated radius when this is a convolution
    /// structure: `tables[r - 1]` is φ_{B(0, r)} indexed by offset.
    pub(crate) fn radius_tables(&self) -> Option<&[Vec<S>]> {
        match (&self.family, &self.rows) {
            (KernelFamily::Convolution(_), Rows::Circulant { tables, .. }) => Some(tables),
            _ => None,
        }
    }

    /// CSV with columns `ball,point,weight` listing every nonzero density.
    pub fn write_csv<W: Write>(&self, b: &BallBasis<S>, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["ball", "point", "weight"])?;
        for i in 0..b.len() {
            if let Some(row) = self.row(b, BallId(i as u32)) {
                for (y, v) in row {
                    w.write_record([i.to_string(), y.to_string(), crate::space::fmt_sig(v)])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

/// Offset of `y` from `c` on the torus, as an index into a circulant table.
#[inline]
pub(crate) fn offset_index(g: &GridGeometry, c: usize, y: usize) -> usize {
    let n = g.spec().n;
    let [ca, cb] = g.coords(c);
    let [ya, yb] = g.coords(y);
    if g.spec().d == 1 {
        (ya + n - ca) % n
    } else {
        ((ya + n - ca) % n) * n + (yb + n - cb) % n
    }
}

/// `Σ_y weighted[y] table[y - c]`, summed in point order.
pub(crate) fn circulant_average<S: Scalar>(g: &GridGeometry, table: &[S], c: usize, weighted: &[S]) -> S {
    let n = g.spec().n;
    let mut acc = S::zero();
    if g.spec().d == 1 {
        for (y, &v) in weighted.iter().enumerate() {
            acc += v * table[(y + n - c) % n];
        }
    } else {
        let [ca, cb] = g.coords(c);
        for a in 0..n {
            let row = ((a + n - ca) % n) * n;
            for b in 0..n {
                acc += weighted[a * n + b] * table[row + (b + n - cb) % n];
            }
        }
    }
    acc
}

/// Rescales to unit mass against uniform weight `w`, drops negligible
/// entries, and rescales again.
fn normalize<S: Scalar>(table: &mut [S], w: S) {
    for _ in 0..2 {
        let mass: S = table.iter().map(|&v| v * w).sum();
        for v in table.iter_mut() {
            *v /= mass;
            if *v < S::lit(SPARSE_THRESHOLD) {
                *v = S::zero();
            }
        }
    }
}

/// Step envelope sampling `f` at the left end of each piece of the grid
/// `2^{k/4}`, ending past `t_max`.
fn sampled_envelope<S: Scalar>(f: impl Fn(f64) -> f64, t_max: f64) -> Result<Modulus<S>> {
    let mut breaks = vec![S::one()];
    let mut values = Vec::new();
    let mut k = 0;
    let mut prev = 1.0f64;
    loop {
        let t = 2f64.powf(k as f64 / ENVELOPE_STEPS_PER_OCTAVE);
        if t > t_max {
            break;
        }
        let v = if k == 0 { 1.0 } else { f(t).min(prev) };
        prev = v;
        values.push(S::lit(v));
        k += 1;
        breaks.push(S::lit(2f64.powf(k as f64 / ENVELOPE_STEPS_PER_OCTAVE)));
    }
    Modulus::step(breaks, values)
}

/// φ_B = 𝕀_B / μ(B), with the trivial envelope and `c1 = c2 = 1`.
pub fn indicator_kernels<S: Scalar>(b: &BallBasis<S>) -> KernelStructure<S> {
    let omega = Modulus::trivial();
    KernelStructure {
        name: "indicator".into(),
        family: KernelFamily::Indicator,
        rows: Rows::Indicator,
        i_omega: omega.i_omega(),
        omega,
        declared_c1: Some(S::one()),
        declared_c2: Some(S::one()),
        n_balls: b.len(),
        structure: None,
    }
}

/// φ_{B(c,r)}(y) ∝ ξ(|y - c| / r) on a grid basis, with `|·|` the basis'
/// own torus metric (sup-norm for cubes, Euclidean for balls), renormalized
/// to unit mass. The envelope is ξ(t^{1/d}) / ξ(1) sampled as a step
/// function up to the largest ratio `μ(X) / μ(B)` that occurs.
pub fn convolution_kernels<S: Scalar>(b: &BallBasis<S>, xi: &Profile) -> Result<KernelStructure<S>> {
    let g = b.grid_geometry().ok_or(Error::WrongBasis("grid"))?;
    xi.check()?;
    let spec = g.spec();
    if xi.j_integral(spec.d).is_none() {
        return Err(Error::DivergentProfile);
    }
    let n_points = spec.points();
    let w = b.space().uniform_weight().expect("grid spaces are uniform");
    let dist: Vec<f64> = (0..n_points)
        .map(|o| {
            let c = g.coords(o);
            let axes: Vec<f64> = (0..spec.d).map(|k| g.cyc_dist(0, c[k]) as f64).collect();
            match spec.shape {
                BallShape::Cube => axes.iter().fold(0.0, |m: f64, &a| m.max(a)),
                BallShape::Ball => axes.iter().map(|a| a * a).sum::<f64>().sqrt(),
            }
        })
        .collect();
    let tables: Vec<Vec<S>> = (1..=g.r_max())
        .map(|r| {
            let mut t: Vec<S> = dist.iter().map(|&s| S::lit(xi.eval(s / r as f64))).collect();
            normalize(&mut t, w);
            t
        })
        .collect();
    let slot_of_ball = b
        .balls()
        .iter()
        .map(|ball| match ball.label() {
            BallLabel::Grid { radius, .. } => Some(radius - 1),
            _ => None,
        })
        .collect();
    let xi1 = xi.eval(1.0);
    let d = spec.d as f64;
    let t_max = (b.space().total_measure() / min_measure(b)).as_f64();
    let omega = sampled_envelope(|t| xi.eval(t.powf(1.0 / d)) / xi1, t_max)?;
    Ok(KernelStructure {
        name: format!("convolution-{}", xi.name()),
        family: KernelFamily::Convolution(xi.clone()),
        rows: Rows::Circulant { tables, slot_of_ball },
        i_omega: omega.i_omega(),
        omega,
        declared_c1: None,
        declared_c2: None,
        n_balls: b.len(),
        structure: None,
    })
}

fn min_measure<S: Scalar>(b: &BallBasis<S>) -> S {
    b.balls().iter().map(|a| a.measure()).fold(S::infinity(), |m, v| m.min(v))
}

/// Dyadic weighted kernels `φ_I = Σ_k α_{n-k} 𝕀_{I_k}/|I_k| / Σ_{j≤n} α_j` for
/// I of level n with ancestors `I_k`. `alpha` must have at least `L + 1`
/// terms (extra terms are ignored) and `α_0 > 0`.
///
/// The envelope is `ω = Σ_k (Σ_{j≥k} α_j 2^{-j}) 𝕀_{[2^k, 2^{k+1})}` divided by
/// its value at 1. Declared constants: `c1 = α_0 / Σ_j α_j`,
/// `c2 = (Σ_j α_j 2^{-j}) / α_0`.
pub fn dyadic_weighted_kernels<S: Scalar>(b: &BallBasis<S>, alpha: &[f64]) -> Result<KernelStructure<S>> {
    let levels = b.dyadic_levels().ok_or(Error::WrongBasis("dyadic"))? as usize;
    if alpha.len() < levels + 1 {
        return Err(Error::LengthMismatch { expected: levels + 1, got: alpha.len() });
    }
    let alpha = &alpha[..=levels];
    if alpha.iter().any(|a| !(a.is_finite() && *a >= 0.0)) || !(alpha[0] > 0.0) {
        return Err(Error::InvalidWeightSequence);
    }
    let mut norm = Vec::with_capacity(levels + 1);
    let mut acc = 0.0;
    for &a in alpha {
        acc += a;
        norm.push(S::lit(acc));
    }
    // tails Σ_{j≥k} α_j 2^{-j}
    let mut tails = vec![0.0; levels + 1];
    let mut t = 0.0;
    for k in (0..=levels).rev() {
        t += alpha[k] * 2f64.powi(-(k as i32));
        tails[k] = t;
    }
    let whole = tails[0];
    let breaks: Vec<S> = (0..=levels + 1).map(|k| S::lit(2f64.powi(k as i32))).collect();
    let mut values: Vec<S> = tails.iter().map(|&v| S::lit(v / whole)).collect();
    values[0] = S::one();
    let omega = Modulus::step(breaks, values)?;
    let j_alpha = alpha.iter().enumerate().map(|(k, a)| (k + 1) as f64 * a).sum();
    Ok(KernelStructure {
        name: "dyadic-weighted".into(),
        family: KernelFamily::DyadicWeighted { alpha: alpha.to_vec(), j_alpha },
        rows: Rows::Chain { alpha: alpha.iter().map(|&a| S::lit(a)).collect(), norm },
        i_omega: omega.i_omega(),
        omega,
        declared_c1: Some(S::lit(alpha[0] / acc)),
        declared_c2: Some(S::lit(whole / alpha[0])),
        n_balls: b.len(),
        structure: None,
    })
}

/// `(1/(m+1)) (sin(π(m+1)k/n) / sin(πk/n))^2`, the discrete Fejér kernel.
pub fn fejer_value(m: usize, n: usize, k: usize) -> f64 {
    let k = k % n;
    if k == 0 {
        return (m + 1) as f64;
    }
    let x = std::f64::consts::PI * k as f64 / n as f64;
    let r = ((m + 1) as f64 * x).sin() / x.sin();
    r * r / (m + 1) as f64
}

/// Fejér kernels on the circle grid `Z/n`. Degree m is attached to the arcs
/// of radius `max(1, ⌊n / (2(m+1))⌋)` at every center; degree 0 gives the
/// uniform kernel on the whole circle. The envelope samples `4 / (1+t)^2`.
pub fn fejer_kernels<S: Scalar>(b: &BallBasis<S>, degrees: &[usize]) -> Result<KernelStructure<S>> {
    let g = b.grid_geometry().ok_or(Error::WrongBasis("grid"))?;
    let spec = g.spec();
    if spec.d != 1 || spec.shape != BallShape::Cube {
        return Err(Error::WrongBasis("one-dimensional cube grid"));
    }
    let n = spec.n;
    let mut degrees = degrees.to_vec();
    degrees.sort_unstable();
    degrees.dedup();
    if degrees.is_empty() {
        return Err(Error::DegreeIncompatible { degree: 0, n });
    }
    let w = b.space().uniform_weight().expect("grid spaces are uniform");
    let mut tables = Vec::with_capacity(degrees.len());
    let mut radii: Vec<u32> = Vec::with_capacity(degrees.len());
    for &m in &degrees {
        if m > n / 2 {
            return Err(Error::DegreeIncompatible { degree: m, n });
        }
        let r = if m == 0 { g.r_max() } else { ((n / (2 * (m + 1))).max(1)) as u32 };
        if radii.contains(&r) {
            return Err(Error::DegreeIncompatible { degree: m, n });
        }
        radii.push(r);
        let mut t: Vec<S> = (0..n).map(|k| S::lit(fejer_value(m, n, k))).collect();
        normalize(&mut t, w);
        tables.push(t);
    }
    let mut slot_of_ball = vec![None; b.len()];
    let mut structure = vec![Vec::new(); n];
    for (x, fam) in structure.iter_mut().enumerate() {
        for (slot, &r) in radii.iter().enumerate() {
            let id = g.id(x, r);
            slot_of_ball[id.index()] = Some(slot as u32);
            fam.push(id);
        }
        fam.sort_unstable();
        fam.dedup();
    }
    let t_max = (b.space().total_measure() / min_measure(b)).as_f64();
    let omega = sampled_envelope(|t| 4.0 / ((1.0 + t) * (1.0 + t)), t_max)?;
    Ok(KernelStructure {
        name: format!("fejer-{}", degrees.iter().map(|m| m.to_string()).collect::<Vec<_>>().join("-")),
        family: KernelFamily::Fejer { degrees },
        rows: Rows::Circulant { tables, slot_of_ball },
        i_omega: omega.i_omega(),
        omega,
        declared_c1: None,
        declared_c2: None,
        n_balls: b.len(),
        structure: Some(structure),
    })
}

/// A kernel-structure together with a basis-structure: the data of a
/// maximal operator.
#[derive(Debug, Clone)]
pub struct KBCouple<'a, S> {
    basis: &'a BallBasis<S>,
    kernels: &'a KernelStructure<S>,
    structure: Vec<Vec<BallId>>,
}

impl<'a, S: Scalar> KBCouple<'a, S> {
    /// Uses the kernels' preferred basis-structure when they have one, the
    /// basis' own otherwise.
    pub fn new(basis: &'a BallBasis<S>, kernels: &'a KernelStructure<S>) -> Result<Self> {
        let structure = kernels.preferred_structure().map(|s| s.to_vec()).unwrap_or_else(|| basis.structure().to_vec());
        Self::with_structure(basis, kernels, structure)
    }

    pub fn with_structure(basis: &'a BallBasis<S>, kernels: &'a KernelStructure<S>, structure: Vec<Vec<BallId>>) -> Result<Self> {
        if kernels.n_balls != basis.len() {
            return Err(Error::SpaceMismatch);
        }
        if structure.len() != basis.space().len() {
            return Err(Error::LengthMismatch { expected: basis.space().len(), got: structure.len() });
        }
        for fam in &structure {
            for &id in fam {
                basis.get(id)?;
                if !kernels.has_kernel(id) {
                    return Err(Error::MissingKernel(id.index()));
                }
            }
        }
        Ok(Self { basis, kernels, structure })
    }

    pub fn basis(&self) -> &'a BallBasis<S> {
        self.basis
    }

    pub fn kernels(&self) -> &'a KernelStructure<S> {
        self.kernels
    }

    pub fn structure(&self) -> &[Vec<BallId>] {
        &self.structure
    }
}
