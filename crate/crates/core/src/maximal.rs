//! Maximal operators evaluated exactly over the enumerated ball families.

use rayon::prelude::*;

use crate::basis::{BallBasis, BallId, StructureMode};
use crate::error::{Error, Result};
use crate::kernel::{circulant_average, KBCouple, KernelFamily, KernelStructure};
use crate::scalar::Scalar;
use crate::space::ScalarField;

/// A maximal function with, per point, the first ball attaining the max.
#[derive(Debug, Clone)]
pub struct MaximalResult<S> {
    pub values: ScalarField<S>,
    pub argmax: Vec<BallId>,
}

impl<S: Scalar> MaximalResult<S> {
    /// CSV with columns `point,value,argmax`.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["point", "value", "argmax"])?;
        for (x, (&v, a)) in self.values.values().iter().zip(&self.argmax).enumerate() {
            w.write_record([x.to_string(), crate::space::fmt_sig(v), a.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Running best per point; ties go to the smaller ball id.
struct Best<S> {
    value: Vec<S>,
    arg: Vec<Option<BallId>>,
}

impl<S: Scalar> Best<S> {
    fn new(n: usize) -> Self {
        Self { value: vec![S::neg_infinity(); n], arg: vec![None; n] }
    }

    #[inline]
    fn offer(&mut self, x: usize, v: S, id: BallId) {
        let better = match self.arg[x] {
            None => true,
            Some(a) => v > self.value[x] || (v == self.value[x] && id < a),
        };
        if better {
            self.value[x] = v;
            self.arg[x] = Some(id);
        }
    }

    /// Finishes the result. For constant `|f|` every unit-mass average is
    /// that constant, so the exact value is used instead of the rounded sums.
    fn finish(self, f: &ScalarField<S>) -> Result<MaximalResult<S>> {
        let abs = f.values().iter().map(|v| v.abs());
        let (lo, hi) = abs.fold((S::infinity(), S::zero()), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let mut value = self.value;
        if lo == hi {
            value.iter_mut().for_each(|v| *v = lo);
        }
        let argmax = self.arg.into_iter().map(|a| a.ok_or(Error::EmptySet)).collect::<Result<Vec<_>>>()?;
        Ok(MaximalResult { values: ScalarField::new(f.space().clone(), value)?, argmax })
    }
}

fn check_space<S: Scalar>(f: &ScalarField<S>, b: &BallBasis<S>) -> Result<()> {
    if f.space().len() != b.space().len() || f.space().weights() != b.space().weights() {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

fn abs_values<S: Scalar>(f: &ScalarField<S>) -> Vec<S> {
    f.values().iter().map(|v| v.abs()).collect()
}

/// `Mf(x) = max ⟨|f|⟩_B` over every enumerated ball B containing x.
pub fn standard_maximal<S: Scalar>(f: &ScalarField<S>, b: &BallBasis<S>) -> Result<MaximalResult<S>> {
    check_space(f, b)?;
    let sums = crate::basis::BallSums::new(b, &abs_values(f));
    let avg = sums.averages();
    let mut best = Best::new(b.space().len());
    for ball in b.balls() {
        let v = avg[ball.id().index()];
        for x in ball.members().iter() {
            best.offer(x, v, ball.id());
        }
    }
    best.finish(f)
}

/// `M_𝓖 f(x) = max_{B ∈ 𝓑(x)} ∫ |f| φ_B dμ`.
pub fn kb_maximal<S: Scalar>(f: &ScalarField<S>, g: &KBCouple<'_, S>) -> Result<MaximalResult<S>> {
    let b = g.basis();
    check_space(f, b)?;
    let avg = g.kernels().averages(b, &abs_values(f));
    let mut best = Best::new(b.space().len());
    for (x, fam) in g.structure().iter().enumerate() {
        for &id in fam {
            let v = avg[id.index()].ok_or(Error::MissingKernel(id.index()))?;
            best.offer(x, v, id);
        }
    }
    best.finish(f)
}

/// Convolution maximal function on a grid. Every (center, radius) pair
/// carries its own kernel, also when several pairs share the same ball.
/// Centered mode maximizes over the radii at x; uncentered mode over every
/// pair whose ball contains x. The argmax is the id of the pair's ball.
pub fn convolution_maximal<S: Scalar>(
    f: &ScalarField<S>,
    ks: &KernelStructure<S>,
    b: &BallBasis<S>,
    mode: StructureMode,
) -> Result<MaximalResult<S>> {
    check_space(f, b)?;
    let g = b.grid_geometry().ok_or(Error::WrongBasis("grid"))?;
    let tables = ks.radius_tables().ok_or(Error::WrongBasis("grid with convolution kernels"))?;
    let n = b.space().len();
    let weighted: Vec<S> = f.values().iter().zip(b.space().weights()).map(|(v, &w)| v.abs() * w).collect();
    let per_center: Vec<Vec<S>> = (0..n)
        .into_par_iter()
        .map(|c| tables.iter().map(|t| circulant_average(g, t, c, &weighted)).collect())
        .collect();
    let mut best = Best::new(n);
    for (c, avgs) in per_center.iter().enumerate() {
        for (slot, &v) in avgs.iter().enumerate() {
            let id = g.id(c, slot as u32 + 1);
            match mode {
                StructureMode::Centered => best.offer(c, v, id),
                StructureMode::Uncentered => {
                    for x in b.ball(id).members().iter() {
                        best.offer(x, v, id);
                    }
                }
            }
        }
    }
    best.finish(f)
}

/// Sup of the dyadic weighted kernel averages over the chain of dyadic
/// intervals containing each point.
pub fn dyadic_weighted_maximal<S: Scalar>(f: &ScalarField<S>, ks: &KernelStructure<S>, b: &BallBasis<S>) -> Result<MaximalResult<S>> {
    if !b.is_dyadic() || !matches!(ks.family(), KernelFamily::DyadicWeighted { .. }) {
        return Err(Error::WrongBasis("dyadic with weighted kernels"));
    }
    let chain = b.with_mode(StructureMode::Uncentered)?;
    let couple = KBCouple::with_structure(b, ks, chain.structure().to_vec())?;
    kb_maximal(f, &couple)
}

/// Sup over the shipped degrees of the Fejér averages of |f| at each point.
pub fn fejer_maximal<S: Scalar>(f: &ScalarField<S>, ks: &KernelStructure<S>, b: &BallBasis<S>) -> Result<MaximalResult<S>> {
    if !matches!(ks.family(), KernelFamily::Fejer { .. }) {
        return Err(Error::WrongBasis("grid with Fejér kernels"));
    }
    kb_maximal(f, &KBCouple::new(b, ks)?)
}
