//! Small square matrices of Laurent polynomials.

use crate::laurent::LaurentPoly;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    n: usize,
    entries: Vec<LaurentPoly>, // row-major
}

impl PolyMatrix {
    pub fn zero(n: usize) -> Self {
        PolyMatrix { n, entries: vec![LaurentPoly::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = PolyMatrix::zero(n);
        for i in 0..n {
            m.set(i, i, LaurentPoly::one());
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    /// Zero-based indexing.
    pub fn get(&self, row: usize, col: usize) -> &LaurentPoly {
        &self.entries[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: LaurentPoly) {
        self.entries[row * self.n + col] = value;
    }

    pub fn mul(&self, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.n, other.n);
        let mut out = PolyMatrix::zero(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..self.n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, cur);
                }
            }
        }
        out
    }

    /// Row vector times matrix; used for truncated series iteration.
    pub fn row_mul(&self, row: &[LaurentPoly]) -> Vec<LaurentPoly> {
        assert_eq!(row.len(), self.n);
        let mut out = vec![LaurentPoly::zero(); self.n];
        for (i, x) in row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for j in 0..self.n {
                let b = self.get(i, j);
                if !b.is_zero() {
                    out[j] = out[j].add(&x.mul(b));
                }
            }
        }
        out
    }

    /// Laplace expansion along the first row; sizes stay small (<= r+1).
    pub fn determinant(&self) -> LaurentPoly {
        match self.n {
            0 => LaurentPoly::one(),
            1 => self.get(0, 0).clone(),
            _ => {
                let mut det = LaurentPoly::zero();
                for col in 0..self.n {
                    let a = self.get(0, col);
                    if a.is_zero() {
                        continue;
                    }
                    let mut minor = PolyMatrix::zero(self.n - 1);
                    for i in 1..self.n {
                        let mut jj = 0;
                        for j in 0..self.n {
                            if j == col {
                                continue;
                            }
                            minor.set(i - 1, jj, self.get(i, j).clone());
                            jj += 1;
                        }
                    }
                    let cof = a.mul(&minor.determinant());
                    det = if col % 2 == 0 { det.add(&cof) } else { det.sub(&cof) };
                }
                det
            }
        }
    }

    /// Dodgson condensation: iterated 2x2 condensation with exact division
    /// by the interior of the previous stage. On matrices of octahedron
    /// first-layer values every connected minor is itself a T value, so the
    /// intermediates stay collapsed instead of growing like the cofactor
    /// expansion. Falls back to Laplace when a division fails.
    pub fn condensed_determinant(&self) -> LaurentPoly {
        if self.n <= 2 {
            return self.determinant();
        }
        let mut prev: Vec<Vec<LaurentPoly>> = Vec::new();
        let mut cur: Vec<Vec<LaurentPoly>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        for _ in 2..=self.n {
            let m = cur.len() - 1;
            let mut next = vec![vec![LaurentPoly::zero(); m]; m];
            for i in 0..m {
                for j in 0..m {
                    let cross = cur[i][j]
                        .mul(&cur[i + 1][j + 1])
                        .sub(&cur[i][j + 1].mul(&cur[i + 1][j]));
                    next[i][j] = if prev.is_empty() {
                        cross
                    } else {
                        match cross.exact_div(&prev[i + 1][j + 1]) {
                            Ok(q) => q,
                            Err(_) => return self.determinant(),
                        }
                    };
                }
            }
            prev = cur;
            cur = next;
        }
        cur.remove(0).remove(0)
    }
}
