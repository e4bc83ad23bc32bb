use super::{BallBasis, BallId, Layout};
use crate::scalar::Scalar;

/// Integrals of one field over every ball of a basis.
///
/// Interval balls (cyclic or not) are answered from a running prefix sum and
/// square balls on a 2-d grid from a summed-area table, both in O(1). Any
/// other ball falls back to a direct sum over its members.
#[derive(Debug)]
pub struct BallSums<'a, S> {
    basis: &'a BallBasis<S>,
    weighted: Vec<S>,
    line: Vec<S>,
    plane: Option<(usize, Vec<S>)>,
}

impl<'a, S: Scalar> BallSums<'a, S> {
    /// `values` are per-point field values; they are weighted internally.
    pub fn new(basis: &'a BallBasis<S>, values: &[S]) -> Self {
        let space = basis.space();
        let weighted: Vec<S> = values.iter().zip(space.weights()).map(|(&v, &w)| v * w).collect();
        let mut line = Vec::with_capacity(weighted.len() + 1);
        let mut acc = S::zero();
        line.push(acc);
        for &v in &weighted {
            acc += v;
            line.push(acc);
        }
        let plane = basis.grid_spec().filter(|g| g.d == 2).map(|g| {
            let n = g.n;
            let stride = n + 1;
            let mut t = vec![S::zero(); stride * stride];
            for a in 0..n {
                let mut row = S::zero();
                for b in 0..n {
                    row += weighted[a * n + b];
                    t[(a + 1) * stride + b + 1] = t[a * stride + b + 1] + row;
                }
            }
            (n, t)
        });
        Self { basis, weighted, line, plane }
    }

    pub fn sum(&self, id: BallId) -> S {
        let ball = self.basis.ball(id);
        match ball.layout {
            Layout::Interval { start, len } => self.interval(start as usize, len as usize),
            Layout::Rect { a0, b0, len } if self.plane.is_some() => self.rect(a0 as usize, b0 as usize, len as usize),
            _ => ball.members().iter().map(|x| self.weighted[x]).sum(),
        }
    }

    pub fn average(&self, id: BallId) -> S {
        self.sum(id) / self.basis.ball(id).measure()
    }

    /// Integrals over every ball, in id order.
    pub fn all(&self) -> Vec<S> {
        (0..self.basis.len()).map(|i| self.sum(BallId(i as u32))).collect()
    }

    /// Averages over every ball, in id order.
    pub fn averages(&self) -> Vec<S> {
        (0..self.basis.len()).map(|i| self.average(BallId(i as u32))).collect()
    }

    fn interval(&self, start: usize, len: usize) -> S {
        let n = self.weighted.len();
        let end = start + len;
        if end <= n {
            self.line[end] - self.line[start]
        } else {
            (self.line[n] - self.line[start]) + self.line[end - n]
        }
    }

    fn rect(&self, a0: usize, b0: usize, len: usize) -> S {
        let (n, _) = self.plane.as_ref().expect("checked by caller");
        let n = *n;
        let split = |s: usize| -> [(usize, usize); 2] {
            if s + len <= n {
                [(s, s + len), (0, 0)]
            } else {
                [(s, n), (0, s + len - n)]
            }
        };
        let mut acc = S::zero();
        for (alo, ahi) in split(a0) {
            for (blo, bhi) in split(b0) {
                if ahi > alo && bhi > blo {
                    acc += self.block(alo, ahi, blo, bhi);
                }
            }
        }
        acc
    }

    fn block(&self, alo: usize, ahi: usize, blo: usize, bhi: usize) -> S {
        let (n, t) = self.plane.as_ref().expect("plane table");
        let s = n + 1;
        t[ahi * s + bhi] - t[alo * s + bhi] - t[ahi * s + blo] + t[alo * s + blo]
    }
}
