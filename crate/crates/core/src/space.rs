//! Finite discrete measure spaces, point sets and scalar fields.
//!
//! Everything downstream is built on these three types. Every point carries a
//! strictly positive mass, so "almost everywhere" statements reduce to
//! statements about every point and outer measure coincides with measure.

use std::io::{Read, Write};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{ordered_sum, Scalar};

/// A finite set of points with strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace<S> {
    weights: Vec<S>,
    total: S,
    coord_dim: usize,
    coords: Vec<S>,
    uniform: Option<S>,
}

impl<S: Scalar> MeasureSpace<S> {
    pub fn new(weights: Vec<S>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w > S::zero()) {
                return Err(Error::InvalidWeight { index, weight: w.as_f64() });
            }
        }
        let total = ordered_sum(weights.iter().copied());
        let first = weights[0];
        let uniform = weights.iter().all(|&w| w == first).then_some(first);
        Ok(Self { weights, total, coord_dim: 0, coords: Vec::new(), uniform })
    }

    /// `n` points of mass `total / n` each.
    pub fn uniform(n: usize, total: S) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptySpace);
        }
        Self::new(vec![total / S::from_count(n); n])
    }

    /// Attaches a geometric label of dimension `dim` to every point
    /// (`coords.len() == dim * len()`, point-major).
    pub fn with_coords(mut self, dim: usize, coords: Vec<S>) -> Result<Self> {
        if coords.len() != dim * self.len() {
            return Err(Error::LengthMismatch { expected: dim * self.len(), got: coords.len() });
        }
        self.coord_dim = dim;
        self.coords = coords;
        Ok(self)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn weight(&self, x: usize) -> S {
        self.weights[x]
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// μ(X).
    pub fn total_measure(&self) -> S {
        self.total
    }

    /// The common weight when all points have equal mass.
    pub fn uniform_weight(&self) -> Option<S> {
        self.uniform
    }

    pub fn coord_dim(&self) -> usize {
        self.coord_dim
    }

    pub fn coords(&self, x: usize) -> &[S] {
        &self.coords[x * self.coord_dim..(x + 1) * self.coord_dim]
    }

    pub fn measure(&self, e: &PointSet) -> Result<S> {
        e.check_range(self.len())?;
        Ok(self.measure_unchecked(e.as_slice()))
    }

    /// Measure of a list of in-range member indices.
    #[inline]
    pub fn measure_unchecked(&self, members: &[u32]) -> S {
        match self.uniform {
            Some(w) => w * S::from_count(members.len()),
            None => ordered_sum(members.iter().map(|&x| self.weights[x as usize])),
        }
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.len())
    }
}

/// A subset of point indices, stored sorted and without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PointSet {
    members: Vec<u32>,
}

impl PointSet {
    pub fn new<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut members: Vec<u32> = indices.into_iter().map(|i| i as u32).collect();
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    /// Builds a set whose members are already sorted and unique.
    pub(crate) fn from_sorted(members: Vec<u32>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Self { members }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn full(n: usize) -> Self {
        Self { members: (0..n as u32).collect() }
    }

    pub fn range(start: usize, end: usize) -> Self {
        Self { members: (start as u32..end as u32).collect() }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[u32] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().map(|&x| x as usize)
    }

    #[inline]
    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&(x as u32)).is_ok()
    }

    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        if self.len() > other.len() {
            return false;
        }
        let mut it = other.members.iter();
        'outer: for &x in &self.members {
            for &y in it.by_ref() {
                if y == x {
                    continue 'outer;
                }
                if y > x {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn intersects(&self, other: &PointSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.members.len() && j < other.members.len() {
            match self.members[i].cmp(&other.members[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.members);
        out.extend_from_slice(&other.members);
        out.sort_unstable();
        out.dedup();
        PointSet { members: out }
    }

    pub fn with_point(&self, x: usize) -> PointSet {
        let mut s = self.clone();
        if let Err(pos) = s.members.binary_search(&(x as u32)) {
            s.members.insert(pos, x as u32);
        }
        s
    }

    pub(crate) fn check_range(&self, n: usize) -> Result<()> {
        match self.members.last() {
            Some(&m) if m as usize >= n => Err(Error::IndexOutOfRange { index: m as usize, len: n }),
            _ => Ok(()),
        }
    }
}

/// A finite real value at every point of a space.
#[derive(Debug, Clone)]
pub struct ScalarField<S> {
    space: Arc<MeasureSpace<S>>,
    values: Vec<S>,
}

impl<S: Scalar> ScalarField<S> {
    pub fn new(space: Arc<MeasureSpace<S>>, values: Vec<S>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch { expected: space.len(), got: values.len() });
        }
        if let Some((index, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index, value: v.as_f64() });
        }
        Ok(Self { space, values })
    }

    pub fn constant(space: Arc<MeasureSpace<S>>, c: S) -> Self {
        let n = space.len();
        Self { space, values: vec![c; n] }
    }

    pub fn from_fn(space: Arc<MeasureSpace<S>>, f: impl FnMut(usize) -> S) -> Result<Self> {
        let values = (0..space.len()).map(f).collect();
        Self::new(space, values)
    }

    pub fn space(&self) -> &Arc<MeasureSpace<S>> {
        &self.space
    }

    #[inline]
    pub fn values(&self) -> &[S] {
        &self.values
    }

    #[inline]
    pub fn value(&self, x: usize) -> S {
        self.values[x]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_space(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) || *self.space == *other.space
    }

    pub fn abs(&self) -> Self {
        self.map(|v| v.abs())
    }

    pub fn map(&self, f: impl Fn(S) -> S) -> Self {
        Self { space: self.space.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scaled(&self, c: S) -> Self {
        self.map(|v| v * c)
    }

    pub fn shifted(&self, c: S) -> Self {
        self.map(|v| v + c)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !self.same_space(other) {
            return Err(Error::SpaceMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| a + b).collect();
        Ok(Self { space: self.space.clone(), values })
    }

    /// Largest absolute value.
    pub fn sup_norm(&self) -> S {
        self.values.iter().fold(S::zero(), |m, v| m.max(v.abs()))
    }

    /// CSV export: `index,weight,value[,coord...]` with a header row.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let dim = self.space.coord_dim();
        let mut header = vec!["index".to_string(), "weight".into(), "value".into()];
        header.extend((0..dim).map(|k| format!("coord{k}")));
        w.write_record(&header)?;
        for (x, &v) in self.values.iter().enumerate() {
            let mut row = vec![x.to_string(), fmt_sig(self.space.weight(x)), fmt_sig(v)];
            row.extend(self.space.coords(x).iter().map(|&c| fmt_sig(c)));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a field written by [`ScalarField::write_csv`] onto an existing
    /// space. Weights in the file must match the space.
    pub fn read_csv<R: Read>(space: Arc<MeasureSpace<S>>, reader: R) -> Result<Self> {
        let table = FieldTable::<S>::read(reader)?;
        table.into_field(space)
    }
}

/// Raw contents of a field CSV before it is bound to a space.
#[derive(Debug, Clone)]
pub struct FieldTable<S> {
    pub weights: Vec<S>,
    pub values: Vec<S>,
    pub coords: Vec<Vec<S>>,
}

impl<S: Scalar> FieldTable<S> {
    pub fn read<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut rows: Vec<(usize, S, S, Vec<S>)> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.is_empty() || rec.get(0).is_some_and(|s| s.is_empty() || s.starts_with('#')) {
                continue;
            }
            if line == 0 && rec.get(0).is_some_and(|s| s.parse::<usize>().is_err()) {
                continue;
            }
            if rec.len() < 3 {
                return Err(Error::Parse(format!("row {}: expected index,weight,value", line + 1)));
            }
            let num = |k: usize| -> Result<S> {
                let s = rec.get(k).unwrap_or_default();
                s.parse::<f64>()
                    .map(S::lit)
                    .map_err(|_| Error::Parse(format!("row {}: `{s}` is not a number", line + 1)))
            };
            let index = rec[0]
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("row {}: bad index `{}`", line + 1, &rec[0])))?;
            let coords = (3..rec.len()).map(num).collect::<Result<Vec<_>>>()?;
            rows.push((index, num(1)?, num(2)?, coords));
        }
        rows.sort_by_key(|r| r.0);
        for (k, r) in rows.iter().enumerate() {
            if r.0 != k {
                return Err(Error::Parse(format!("indices must be 0..n-1 without gaps (missing {k})")));
            }
        }
        let mut out = Self { weights: Vec::new(), values: Vec::new(), coords: Vec::new() };
        for (_, w, v, c) in rows {
            out.weights.push(w);
            out.values.push(v);
            out.coords.push(c);
        }
        Ok(out)
    }

    /// Builds a fresh space from the weights column.
    pub fn space(&self) -> Result<MeasureSpace<S>> {
        MeasureSpace::new(self.weights.clone())
    }

    pub fn into_field(self, space: Arc<MeasureSpace<S>>) -> Result<ScalarField<S>> {
        if self.weights.len() != space.len() {
            return Err(Error::LengthMismatch { expected: space.len(), got: self.weights.len() });
        }
        let tol = S::lit(1e-9);
        for (x, &w) in self.weights.iter().enumerate() {
            let expect = space.weight(x);
            if (w - expect).abs() > tol * expect {
                return Err(Error::InvalidWeight { index: x, weight: w.as_f64() });
            }
        }
        ScalarField::new(space, self.values)
    }
}

/// Formats a scalar with 12 significant digits, `.` as decimal separator.
pub fn fmt_sig<S: Scalar>(v: S) -> String {
    fmt_sig_f64(v.as_f64())
}

pub fn fmt_sig_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if v.is_nan() {
        return "nan".to_string();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{:.11e}", v);
    let (mantissa, exp) = s.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, v);
        trim_zeros(&fixed)
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// μ(e).
pub fn measure<S: Scalar>(s: &MeasureSpace<S>, e: &PointSet) -> Result<S> {
    s.measure(e)
}

/// ∫_e f dμ.
pub fn integrate<S: Scalar>(f: &ScalarField<S>, e: &PointSet) -> Result<S> {
    e.check_range(f.len())?;
    let sp = f.space();
    Ok(ordered_sum(e.iter().map(|x| f.value(x) * sp.weight(x))))
}

/// Step representation of λ_f(t) = μ{x ∈ e : |f(x)| > t}.
///
/// `jumps` holds the distinct positive values of |f| in increasing order with
/// the mass sitting at each one. λ_f is constant on `[v_{k-1}, v_k)` with value
/// equal to the mass at or above `v_k`.
#[derive(Debug, Clone)]
pub struct Distribution<S> {
    jumps: Vec<(S, S)>,
    tail: Vec<S>,
}

impl<S: Scalar> Distribution<S> {
    pub fn of(f: &ScalarField<S>, e: &PointSet) -> Result<Self> {
        e.check_range(f.len())?;
        let sp = f.space();
        let mut pts: Vec<(S, S)> =
            e.iter().map(|x| (f.value(x).abs(), sp.weight(x))).filter(|&(v, _)| v > S::zero()).collect();
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite values"));
        let mut jumps: Vec<(S, S)> = Vec::new();
        for (v, w) in pts {
            match jumps.last_mut() {
                Some(last) if last.0 == v => last.1 += w,
                _ => jumps.push((v, w)),
            }
        }
        let mut tail = vec![S::zero(); jumps.len() + 1];
        for k in (0..jumps.len()).rev() {
            tail[k] = tail[k + 1] + jumps[k].1;
        }
        Ok(Self { jumps, tail })
    }

    /// Distinct positive values of |f| with their masses.
    pub fn jumps(&self) -> &[(S, S)] {
        &self.jumps
    }

    /// λ(t) for t ≥ 0.
    pub fn eval(&self, t: S) -> S {
        let k = self.jumps.partition_point(|&(v, _)| v <= t);
        self.tail[k]
    }

    /// Mass at or above the k-th jump value.
    pub fn mass_from(&self, k: usize) -> S {
        self.tail[k]
    }

    /// (p ∫_0^∞ t^{p-1} λ(t) dt)^{1/p}, integrated exactly step by step.
    pub fn lp_norm(&self, p: S) -> S {
        let mut acc = S::zero();
        let mut prev = S::zero();
        for (k, &(v, _)) in self.jumps.iter().enumerate() {
            acc += self.tail[k] * (v.powf(p) - prev.powf(p));
            prev = v;
        }
        acc.powf(p.recip())
    }

    /// sup_{t>0} t λ(t)^{1/p}; attained as t increases to a jump value.
    pub fn weak_lp_norm(&self, p: S) -> S {
        let inv = p.recip();
        self.jumps.iter().enumerate().fold(S::zero(), |m, (k, &(v, _))| m.max(v * self.tail[k].powf(inv)))
    }
}

/// μ{x ∈ e : |f(x)| > t}.
pub fn distribution<S: Scalar>(f: &ScalarField<S>, t: S, e: &PointSet) -> Result<S> {
    e.check_range(f.len())?;
    let sp = f.space();
    Ok(ordered_sum(e.iter().filter(|&x| f.value(x).abs() > t).map(|x| sp.weight(x))))
}

fn check_exponent<S: Scalar>(p: S) -> Result<()> {
    if p >= S::one() && p.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p.as_f64()))
    }
}

/// ‖f‖_{L^p(e)} by direct weighted summation.
///
/// Debug builds cross-check the value against the distribution-function
/// integral of [`lp_norm_via_distribution`].
pub fn lp_norm<S: Scalar>(f: &ScalarField<S>, p: S, e: &PointSet) -> Result<S> {
    check_exponent(p)?;
    e.check_range(f.len())?;
    let sp = f.space();
    let direct = ordered_sum(e.iter().map(|x| f.value(x).abs().powf(p) * sp.weight(x))).powf(p.recip());
    #[cfg(debug_assertions)]
    {
        let other = Distribution::of(f, e)?.lp_norm(p);
        let tol = S::lit(1e-10).max(S::epsilon() * S::lit(1e3));
        debug_assert!(
            (direct - other).abs() <= tol * direct.abs().max(S::min_positive_value()),
            "L^p self-check failed: {direct} vs {other}"
        );
    }
    Ok(direct)
}

/// ‖f‖_{L^p(e)} through the layer-cake formula on the step function λ_f.
pub fn lp_norm_via_distribution<S: Scalar>(f: &ScalarField<S>, p: S, e: &PointSet) -> Result<S> {
    check_exponent(p)?;
    Ok(Distribution::of(f, e)?.lp_norm(p))
}

/// ‖f‖_{L^{p,∞}(X)}.
pub fn weak_lp_norm<S: Scalar>(f: &ScalarField<S>, p: S) -> Result<S> {
    check_exponent(p)?;
    Ok(Distribution::of(f, &f.space().full_set())?.weak_lp_norm(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(w: &[f64]) -> Arc<MeasureSpace<f64>> {
        Arc::new(MeasureSpace::new(w.to_vec()).unwrap())
    }

    fn field(w: &[f64], v: &[f64]) -> ScalarField<f64> {
        ScalarField::new(space(w), v.to_vec()).unwrap()
    }

    #[test]
    fn measure_examples() {
        let s = MeasureSpace::<f64>::uniform(4, 1.0).unwrap();
        assert_eq!(s.measure(&PointSet::new([0, 1])).unwrap(), 0.5);
        assert_eq!(s.measure(&PointSet::empty()).unwrap(), 0.0);
        let s = MeasureSpace::new(vec![0.1f64, 0.2, 0.7]).unwrap();
        assert!((s.measure(&PointSet::new([1, 2])).unwrap() - 0.9).abs() < 1e-15);
        assert!(matches!(s.measure(&PointSet::new([3])), Err(Error::IndexOutOfRange { index: 3, .. })));
    }

    #[test]
    fn rejects_bad_spaces_and_fields() {
        assert!(matches!(MeasureSpace::<f64>::new(vec![]), Err(Error::EmptySpace)));
        assert!(MeasureSpace::new(vec![1.0, 0.0]).is_err());
        assert!(MeasureSpace::new(vec![1.0, f64::INFINITY]).is_err());
        let sp = space(&[0.5, 0.5]);
        assert!(ScalarField::new(sp.clone(), vec![1.0, f64::NAN]).is_err());
        assert!(ScalarField::new(sp, vec![1.0]).is_err());
    }

    #[test]
    fn integrate_examples() {
        let f = field(&[0.25; 4], &[1.0; 4]);
        assert_eq!(integrate(&f, &PointSet::full(4)).unwrap(), 1.0);
        let f = field(&[0.25; 4], &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(integrate(&f, &PointSet::full(4)).unwrap(), 2.5);
        assert_eq!(integrate(&f, &PointSet::empty()).unwrap(), 0.0);
    }

    #[test]
    fn distribution_examples() {
        let f = field(&[0.25; 4], &[0.0, 1.0, 2.0, 3.0]);
        let all = PointSet::full(4);
        assert_eq!(distribution(&f, 1.5, &all).unwrap(), 0.5);
        assert_eq!(distribution(&f, 3.0, &all).unwrap(), 0.0);
        let g = field(&[0.25; 4], &[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(distribution(&g, 0.0, &all).unwrap(), 1.0);
    }

    #[test]
    fn distribution_is_right_continuous_and_non_increasing() {
        let f = field(&[0.1, 0.2, 0.3, 0.4], &[-2.0, 1.0, 2.0, 0.5]);
        let all = PointSet::full(4);
        let d = Distribution::of(&f, &all).unwrap();
        let mut ts = vec![0.0];
        for &(v, _) in d.jumps() {
            ts.extend([v - 1e-9, v, v + 1e-9]);
        }
        ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut prev = f64::INFINITY;
        for t in ts {
            let direct = distribution(&f, t, &all).unwrap();
            assert!((d.eval(t) - direct).abs() < 1e-15, "t={t}");
            assert!(direct <= prev);
            prev = direct;
        }
        for &(v, _) in d.jumps() {
            assert_eq!(d.eval(v), d.eval(v + 1e-12));
        }
    }

    #[test]
    fn lp_examples() {
        let f = field(&[0.25; 4], &[3.0, 0.0, 0.0, 0.0]);
        let all = PointSet::full(4);
        assert!((lp_norm(&f, 1.0, &all).unwrap() - 0.75).abs() < 1e-15);
        let c = field(&[0.2; 5], &[1.5; 5]);
        let e = PointSet::new([0, 1, 2]);
        let expect = 1.5 * 0.6f64.powf(1.0 / 3.0);
        assert!((lp_norm(&c, 3.0, &e).unwrap() - expect).abs() < 1e-14);
        let g = field(&[0.5, 0.5], &[1.0, 2.0]);
        let two = PointSet::full(2);
        assert!((lp_norm(&g, 2.0, &two).unwrap() - 2.5f64.sqrt()).abs() < 1e-15);
        assert!((lp_norm_via_distribution(&g, 2.0, &two).unwrap() - 2.5f64.sqrt()).abs() < 1e-15);
        assert!(matches!(lp_norm(&g, 0.5, &two), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn weak_lp_examples() {
        let f = field(&[0.25; 4], &[3.0, 0.0, 0.0, 0.0]);
        assert!((weak_lp_norm(&f, 1.0).unwrap() - 0.75).abs() < 1e-15);
        let z = field(&[0.25; 4], &[0.0; 4]);
        assert_eq!(weak_lp_norm(&z, 1.0).unwrap(), 0.0);
        let o = field(&[0.25; 4], &[1.0; 4]);
        assert_eq!(weak_lp_norm(&o, 1.0).unwrap(), 1.0);
        assert!(weak_lp_norm(&o, 0.9).is_err());
    }

    #[test]
    fn csv_round_trip_keeps_values() {
        let sp = Arc::new(MeasureSpace::new(vec![0.25, 0.75]).unwrap().with_coords(1, vec![0.0, 0.5]).unwrap());
        let f = ScalarField::new(sp.clone(), vec![-1.25, 3.0e-8]).unwrap();
        let mut buf = Vec::new();
        f.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("index,weight,value,coord0\n0,0.25,-1.25,0\n"), "{text}");
        let back = ScalarField::read_csv(sp, buf.as_slice()).unwrap();
        assert_eq!(back.values(), f.values());
        let wrong = Arc::new(MeasureSpace::new(vec![0.5, 0.5]).unwrap());
        assert!(ScalarField::read_csv(wrong, buf.as_slice()).is_err());
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig_f64(0.1 + 0.2), "0.3");
        assert_eq!(fmt_sig_f64(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig_f64(123456.0), "123456");
        assert_eq!(fmt_sig_f64(1.5e-9), "1.5e-9");
        assert_eq!(fmt_sig_f64(2.0e15), "2e15");
        assert_eq!(fmt_sig_f64(-0.5), "-0.5");
    }

    #[test]
    fn point_set_relations() {
        let a = PointSet::new([3, 1, 1]);
        let b = PointSet::new([1, 2, 3]);
        assert_eq!(a.as_slice(), &[1, 3]);
        assert!(a.is_subset_of(&b));
        assert!(!b.is_subset_of(&a));
        assert!(a.intersects(&b));
        assert!(!a.intersects(&PointSet::new([0, 2])));
        assert_eq!(a.union(&PointSet::new([0])).as_slice(), &[0, 1, 3]);
        assert!(a.with_point(2).is_subset_of(&b));
    }

    #[test]
    fn works_in_single_precision() {
        let sp = Arc::new(MeasureSpace::<f32>::uniform(4, 1.0).unwrap());
        let f = ScalarField::new(sp, vec![1.0f32, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(integrate(&f, &PointSet::full(4)).unwrap(), 2.5f32);
    }
}
