use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::BallBasis;
use crate::error::Result;
use crate::space::ScalarField;

/// A named test field with the generator and seed that produced it.
#[derive(Debug, Clone)]
pub struct CorpusField {
    pub name: String,
    pub descriptor: String,
    pub seed: u64,
    pub field: ScalarField<f64>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub fields: Vec<CorpusField>,
}

impl Corpus {
    pub fn get(&self, name: &str) -> Option<&CorpusField> {
        self.fields.iter().find(|f| f.name == name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.fields.iter().map(|f| f.name.as_str()).collect()
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    /// Keeps only the listed fields, in corpus order.
    pub fn only(&self, names: &[&str]) -> Corpus {
        Corpus { fields: self.fields.iter().filter(|f| names.contains(&f.name.as_str())).cloned().collect() }
    }
}

/// How points of a basis sit in space, for the geometric generators.
enum Placement {
    /// Cell `[x/N, (x+1)/N)` of `[0,1)`.
    Line(usize),
    /// Torus `(Z/n)^d`.
    Torus { d: usize, n: usize },
}

fn placement(b: &BallBasis<f64>) -> Placement {
    match b.grid_spec() {
        Some(s) => Placement::Torus { d: s.d, n: s.n },
        None => Placement::Line(b.space().len()),
    }
}

/// `(F(hi) - F(lo)) / (hi - lo)` with `F(u) = u - u ln u`: the mean of
/// `ln(1/u)` over `[lo, hi]`, `0 ≤ lo < hi`.
fn mean_log_inverse(lo: f64, hi: f64) -> f64 {
    let f = |u: f64| if u == 0.0 { 0.0 } else { u - u * u.ln() };
    (f(hi) - f(lo)) / (hi - lo)
}

/// Torus coordinates `[a, b]` of point x and the axis distances to 0.
fn torus_axes(x: usize, d: usize, n: usize) -> Vec<usize> {
    let c = if d == 1 { vec![x] } else { vec![x / n, x % n] };
    c.into_iter().map(|a| a.min(n - a)).collect()
}

fn first_coord(p: &Placement, x: usize) -> f64 {
    match *p {
        Placement::Line(n) => (x as f64 + 0.5) / n as f64,
        Placement::Torus { d, n } => {
            let a = if d == 1 { x } else { x / n };
            a as f64 / n as f64
        }
    }
}

fn log_singularity(p: &Placement, x: usize) -> f64 {
    match *p {
        Placement::Line(n) => mean_log_inverse(x as f64 / n as f64, (x + 1) as f64 / n as f64),
        Placement::Torus { d: 1, n } => {
            // cell of width 1/n centered at distance k/n from the origin
            let k = torus_axes(x, 1, n)[0] as f64;
            let h = 0.5 / n as f64;
            let c = k / n as f64;
            if k == 0.0 {
                mean_log_inverse(0.0, h)
            } else {
                mean_log_inverse(c - h, c + h)
            }
        }
        Placement::Torus { d, n } => {
            let r = torus_axes(x, d, n).iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt();
            (n as f64 / r.max(0.5)).ln()
        }
    }
}

/// Dyadic martingale with ±1 increments: at each level the sign of the
/// Haar function of the parent interval is flipped by a fair coin.
fn martingale(levels: u32, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = 1usize << levels;
    let mut out = vec![0.0; n];
    for k in 0..levels {
        let cells = 1usize << k;
        let signs: Vec<f64> = (0..cells).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        for (x, o) in out.iter_mut().enumerate() {
            let shift = levels - k;
            let cell = x >> shift;
            let left = (x >> (shift - 1)) & 1 == 0;
            *o += signs[cell] * if left { 1.0 } else { -1.0 };
        }
    }
    out
}

/// The standard corpus on the points of `b`: a constant, the indicator of
/// the lower half, a logarithmic singularity at the origin, a sawtooth,
/// seeded uniform noise and, on dyadic bases, a random dyadic martingale
/// with ±1 increments. Every field is the discretization of a fixed
/// function, so norms stay comparable across resolutions.
pub fn corpus_standard(b: &BallBasis<f64>, seed: u64) -> Result<Corpus> {
    let space = b.space().clone();
    let n = space.len();
    let p = placement(b);
    let mut fields = Vec::new();
    let mut push = |name: &str, descriptor: String, seed: u64, values: Vec<f64>| -> Result<()> {
        fields.push(CorpusField {
            name: name.to_string(),
            descriptor,
            seed,
            field: ScalarField::new(space.clone(), values)?,
        });
        Ok(())
    };
    push("constant", "constant:1".into(), 0, vec![1.0; n])?;
    push("half-indicator", "indicator:first-coordinate<1/2".into(), 0, (0..n).map(|x| if first_coord(&p, x) < 0.5 { 1.0 } else { 0.0 }).collect())?;
    push("log-singularity", "log(1/|x|)".into(), 0, (0..n).map(|x| log_singularity(&p, x)).collect())?;
    push("sawtooth", "frac(4 x1)".into(), 0, (0..n).map(|x| (4.0 * first_coord(&p, x)).fract()).collect())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    push("noise", "uniform[-1,1]".into(), seed, (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect())?;
    if let Some(levels) = b.dyadic_levels() {
        if levels > 0 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(1);
            push("martingale", "dyadic martingale, +-1 increments".into(), seed, martingale(levels, &mut rng))?;
        }
    }
    Ok(Corpus { fields })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{dyadic_basis, grid_torus_basis, BallShape, GridSpec};

    #[test]
    fn deterministic_under_seed() {
        let b = dyadic_basis::<f64>(5).unwrap();
        let a = corpus_standard(&b, 7).unwrap();
        let c = corpus_standard(&b, 7).unwrap();
        let d = corpus_standard(&b, 8).unwrap();
        assert_eq!(a.len(), 6);
        for (x, y) in a.fields.iter().zip(&c.fields) {
            assert_eq!(x.field.values(), y.field.values());
        }
        assert_ne!(a.get("noise").unwrap().field.values(), d.get("noise").unwrap().field.values());
    }

    #[test]
    fn martingale_increments_are_unit() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = martingale(4, &mut rng);
        // mean zero, and every value has the parity of the depth
        assert!(v.iter().sum::<f64>().abs() < 1e-12);
        assert!(v.iter().all(|x| (x.abs() as i64) % 2 == 0));
    }

    #[test]
    fn log_field_cell_averages() {
        let b = dyadic_basis::<f64>(3).unwrap();
        let c = corpus_standard(&b, 0).unwrap();
        let f = &c.get("log-singularity").unwrap().field;
        // the cell averages integrate to ∫_0^1 ln(1/u) du = 1
        let total: f64 = f.values().iter().map(|v| v / 8.0).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let g = grid_torus_basis::<f64>(GridSpec::new(1, 16, BallShape::Cube)).unwrap();
        let c = corpus_standard(&g, 0).unwrap();
        let f = &c.get("log-singularity").unwrap().field;
        // symmetric about the origin, largest at it
        assert_eq!(f.value(3), f.value(13));
        assert!(f.value(0) > f.value(1));
    }
}
