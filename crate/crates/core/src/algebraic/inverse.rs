//! An explicitly maintained matrix inverse over `Fp`.
//!
//! Every update is a rank-one change `M += a bᵀ`, handled with the
//! Sherman–Morrison formula in `O(N²)`.

use rand::Rng;

use super::field::Fp;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseState {
    n: usize,
    m: Vec<Fp>,
    inv: Vec<Fp>,
    generation: u64,
}

impl InverseState {
    pub fn identity(n: usize) -> Self {
        let mut m = vec![Fp::ZERO; n * n];
        for i in 0..n {
            m[i * n + i] = Fp::ONE;
        }
        InverseState { n, inv: m.clone(), m, generation: 0 }
    }

    /// Inverts `m` (row-major, `n × n`) by Gauss–Jordan elimination.
    pub fn from_matrix(n: usize, m: Vec<Fp>) -> Result<Self> {
        assert_eq!(m.len(), n * n);
        let inv = invert(n, &m).ok_or(Error::SingularMatrix)?;
        Ok(InverseState { n, m, inv, generation: 0 })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn matrix(&self, i: usize, j: usize) -> Fp {
        self.m[i * self.n + j]
    }

    pub fn inverse(&self, i: usize, j: usize) -> Fp {
        self.inv[i * self.n + j]
    }

    /// `M[u][v] += delta`.
    pub fn rank1_update(&mut self, u: usize, v: usize, delta: Fp) -> Result<()> {
        let n = self.n;
        let mut a = vec![Fp::ZERO; n];
        let mut b = vec![Fp::ZERO; n];
        a[u] = delta;
        b[v] = Fp::ONE;
        self.apply(&a, &b)
    }

    /// Replaces row `u` of `M` by `row`.
    pub fn row_update(&mut self, u: usize, row: &[Fp]) -> Result<()> {
        let n = self.n;
        let mut a = vec![Fp::ZERO; n];
        a[u] = Fp::ONE;
        let b: Vec<Fp> = (0..n).map(|j| row[j] - self.matrix(u, j)).collect();
        self.apply(&a, &b)
    }

    /// Replaces column `v` of `M` by `col`.
    pub fn column_update(&mut self, v: usize, col: &[Fp]) -> Result<()> {
        let n = self.n;
        let a: Vec<Fp> = (0..n).map(|i| col[i] - self.matrix(i, v)).collect();
        let mut b = vec![Fp::ZERO; n];
        b[v] = Fp::ONE;
        self.apply(&a, &b)
    }

    /// `M += a bᵀ`. Leaves the state untouched if the result is singular.
    fn apply(&mut self, a: &[Fp], b: &[Fp]) -> Result<()> {
        let n = self.n;
        // x = Minv a, yᵀ = bᵀ Minv
        let nz_a: Vec<usize> = (0..n).filter(|&k| !a[k].is_zero()).collect();
        let nz_b: Vec<usize> = (0..n).filter(|&k| !b[k].is_zero()).collect();
        let mut x = vec![Fp::ZERO; n];
        for (i, xi) in x.iter_mut().enumerate() {
            for &k in &nz_a {
                *xi += self.inv[i * n + k] * a[k];
            }
        }
        let mut y = vec![Fp::ZERO; n];
        for &k in &nz_b {
            for (j, yj) in y.iter_mut().enumerate() {
                *yj += b[k] * self.inv[k * n + j];
            }
        }
        let mut denom = Fp::ONE;
        for &k in &nz_b {
            denom += b[k] * x[k];
        }
        let scale = denom.inv().ok_or(Error::SingularMatrix)?;
        for i in 0..n {
            let f = x[i] * scale;
            if f.is_zero() {
                continue;
            }
            let row = &mut self.inv[i * n..(i + 1) * n];
            for (r, &yj) in row.iter_mut().zip(&y) {
                *r -= f * yj;
            }
        }
        for &i in &nz_a {
            for &j in &nz_b {
                self.m[i * n + j] += a[i] * b[j];
            }
        }
        self.generation += 1;
        Ok(())
    }

    /// Checks `M (Minv v) = v` for `probes` random vectors.
    pub fn probe<R: Rng + ?Sized>(&self, rng: &mut R, probes: usize) -> bool {
        let n = self.n;
        (0..probes).all(|_| {
            let v: Vec<Fp> = (0..n).map(|_| Fp::random(rng)).collect();
            let w = mat_vec(n, &self.inv, &v);
            mat_vec(n, &self.m, &w) == v
        })
    }

    /// Checks `M Minv = I` entry by entry.
    pub fn is_exact(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| {
            (0..n).all(|j| {
                let mut s = Fp::ZERO;
                for k in 0..n {
                    s += self.m[i * n + k] * self.inv[k * n + j];
                }
                s == if i == j { Fp::ONE } else { Fp::ZERO }
            })
        })
    }
}

fn mat_vec(n: usize, m: &[Fp], v: &[Fp]) -> Vec<Fp> {
    (0..n)
        .map(|i| {
            let mut s = Fp::ZERO;
            for (a, &b) in m[i * n..(i + 1) * n].iter().zip(v) {
                s += *a * b;
            }
            s
        })
        .collect()
}

/// Gauss–Jordan inverse, `None` if singular.
pub fn invert(n: usize, m: &[Fp]) -> Option<Vec<Fp>> {
    let mut a = m.to_vec();
    let mut inv = vec![Fp::ZERO; n * n];
    for i in 0..n {
        inv[i * n + i] = Fp::ONE;
    }
    for c in 0..n {
        let piv = (c..n).find(|&r| !a[r * n + c].is_zero())?;
        if piv != c {
            for j in 0..n {
                a.swap(piv * n + j, c * n + j);
                inv.swap(piv * n + j, c * n + j);
            }
        }
        let s = a[c * n + c].inv().expect("nonzero pivot");
        for j in 0..n {
            a[c * n + j] = a[c * n + j] * s;
            inv[c * n + j] = inv[c * n + j] * s;
        }
        for r in 0..n {
            let f = a[r * n + c];
            if r == c || f.is_zero() {
                continue;
            }
            for j in 0..n {
                let (pa, pi) = (a[c * n + j], inv[c * n + j]);
                a[r * n + j] -= f * pa;
                inv[r * n + j] -= f * pi;
            }
        }
    }
    Some(inv)
}
