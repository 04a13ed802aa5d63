//! Dense complex linear algebra for the tiny systems this crate assembles
//! (boundary-condition solves are 6x6, node-response solves 2x2, local
//! propagators at most 4x4). Direct elimination with partial pivoting wins at
//! these sizes; no external solver is worth the dependency.

use num_complex::Complex64 as C64;

/// Square complex matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CMat {
    pub n: usize,
    pub a: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![C64::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), n);
            m.a[i * n..(i + 1) * n].copy_from_slice(r);
        }
        m
    }

    /// Max column sum of absolute values.
    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == C64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    #[cfg(test)]
    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.n;
        (0..n)
            .map(|i| (0..n).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn scale(&mut self, s: C64) {
        for v in &mut self.a {
            *v *= s;
        }
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.a[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.a[i * self.n + j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum LinalgError {
    /// Pivot collapsed to zero; the system has no unique solution.
    Singular,
}

/// LU factorization with partial pivoting, kept for repeated solves.
pub(crate) struct LuFactors {
    lu: CMat,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn factor(m: &CMat) -> Result<Self, LinalgError> {
        let n = m.n;
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let (piv, pmag) = (col..n)
                .map(|r| (r, lu[(r, col)].norm()))
                .max_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            if pmag == 0.0 {
                return Err(LinalgError::Singular);
            }
            if piv != col {
                for j in 0..n {
                    lu.a.swap(col * n + j, piv * n + j);
                }
                perm.swap(col, piv);
            }
            let d = lu[(col, col)];
            for r in col + 1..n {
                let factor = lu[(r, col)] / d;
                lu[(r, col)] = factor;
                for j in col + 1..n {
                    let sub = factor * lu[(col, j)];
                    lu[(r, j)] -= sub;
                }
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let n = self.lu.n;
        let mut x: Vec<C64> = self.perm.iter().map(|&p| b[p]).collect();
        // forward substitution; L carries a unit diagonal
        for i in 1..n {
            for j in 0..i {
                let sub = self.lu[(i, j)] * x[j];
                x[i] -= sub;
            }
        }
        // back substitution with U
        for i in (0..n).rev() {
            for j in i + 1..n {
                let sub = self.lu[(i, j)] * x[j];
                x[i] -= sub;
            }
            x[i] /= self.lu[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> CMat {
        let n = self.lu.n;
        let mut inv = CMat::zeros(n);
        let mut e = vec![C64::ZERO; n];
        for j in 0..n {
            e[j] = C64::ONE;
            let col = self.solve(&e);
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
            e[j] = C64::ZERO;
        }
        inv
    }
}

/// Solve `A x = b` and return the solution together with the 1-norm condition
/// estimate `||A||_1 ||A^-1||_1`.
pub(crate) fn solve_with_cond(a: &CMat, b: &[C64]) -> Result<(Vec<C64>, f64), LinalgError> {
    let lu = LuFactors::factor(a)?;
    let x = lu.solve(b);
    let cond = a.norm_one() * lu.inverse().norm_one();
    Ok((x, cond))
}

/// `exp(scale * H)` by scaling-and-squaring with a Taylor series. Intended for
/// the small generator blocks of the split-step propagator, where
/// `|scale| * ||H||` is modest.
pub(crate) fn expm(h: &CMat, scale: C64) -> CMat {
    let mut m = h.clone();
    m.scale(scale);
    let norm = m.norm_one();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    m.scale(C64::new((0.5f64).powi(squarings as i32), 0.0));

    let mut result = CMat::identity(h.n);
    let mut term = CMat::identity(h.n);
    for k in 1..=24 {
        term = term.matmul(&m);
        term.scale(C64::new(1.0 / k as f64, 0.0));
        for (r, t) in result.a.iter_mut().zip(&term.a) {
            *r += t;
        }
        if term.norm_one() < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.matmul(&result);
    }
    result
}
