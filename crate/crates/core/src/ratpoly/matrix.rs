use super::bivariate::BivariatePoly;
use super::scalar::Scalar;

/// Square matrix over `BivariatePoly`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMatrix<S> {
    n: usize,
    entries: Vec<BivariatePoly<S>>,
}

impl<S: Scalar> PolyMatrix<S> {
    /// Builds a matrix from rows. Panics when the rows are not square.
    pub fn from_rows(rows: Vec<Vec<BivariatePoly<S>>>) -> Self {
        let n = rows.len();
        assert!(
            rows.iter().all(|r| r.len() == n),
            "polynomial matrix must be square"
        );
        Self {
            n,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            entries: vec![BivariatePoly::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, BivariatePoly::constant(S::one()));
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> &BivariatePoly<S> {
        &self.entries[row * self.n + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: BivariatePoly<S>) {
        self.entries[row * self.n + col] = value;
    }

    /// The matrix with `row` and `col` removed.
    pub fn minor(&self, row: usize, col: usize) -> Self {
        let n = self.n - 1;
        let mut entries = Vec::with_capacity(n * n);
        for r in (0..self.n).filter(|&r| r != row) {
            for c in (0..self.n).filter(|&c| c != col) {
                entries.push(self.get(r, c).clone());
            }
        }
        Self { n, entries }
    }

    /// Signed cofactor `(-1)^(row+col) det(minor(row, col))`.
    pub fn cofactor(&self, row: usize, col: usize) -> BivariatePoly<S> {
        let d = self.minor(row, col).det();
        if (row + col) % 2 == 0 {
            d
        } else {
            -d
        }
    }

    /// Exact determinant by Laplace expansion memoized over column subsets.
    ///
    /// Only ring operations are used (no division), so exact coefficients
    /// never leave the polynomial ring. Cost is `O(n 2^n)` polynomial
    /// products; sparse rows skip zero entries. A `0x0` matrix has
    /// determinant 1.
    pub fn det(&self) -> BivariatePoly<S> {
        let n = self.n;
        if n == 0 {
            return BivariatePoly::constant(S::one());
        }
        assert!(n < 24, "subset expansion limited to n < 24");
        // partial[mask] = signed sum over injective maps rows 0..popcount(mask) -> mask
        let mut partial: Vec<Option<BivariatePoly<S>>> = vec![None; 1 << n];
        partial[0] = Some(BivariatePoly::constant(S::one()));
        for mask in 0usize..(1 << n) {
            let Some(acc) = partial[mask].take() else {
                continue;
            };
            let row = mask.count_ones() as usize;
            if row == n {
                partial[mask] = Some(acc);
                continue;
            }
            for col in 0..n {
                if mask & (1 << col) != 0 {
                    continue;
                }
                let entry = self.get(row, col);
                if entry.is_zero() {
                    continue;
                }
                // inversions added by placing `col` after the columns already used
                let inversions = (mask >> (col + 1)).count_ones();
                let mut term = &acc * entry;
                if inversions % 2 == 1 {
                    term = -term;
                }
                let slot = &mut partial[mask | (1 << col)];
                *slot = Some(match slot.take() {
                    Some(prev) => &prev + &term,
                    None => term,
                });
            }
        }
        partial[(1 << n) - 1].take().unwrap_or_default()
    }

    /// Substitutes `(x, y)` into every entry.
    pub fn eval(&self, x: &S, y: &S) -> Vec<Vec<S>> {
        (0..self.n)
            .map(|r| (0..self.n).map(|c| self.get(r, c).eval(x, y)).collect())
            .collect()
    }

    pub fn cast<T: Scalar>(&self) -> PolyMatrix<T> {
        PolyMatrix {
            n: self.n,
            entries: self.entries.iter().map(|e| e.cast()).collect(),
        }
    }
}

/// Determinant of a scalar matrix by Gaussian elimination with partial
/// pivoting (largest magnitude).
pub fn scalar_det<S: Scalar>(mut a: Vec<Vec<S>>) -> S {
    let n = a.len();
    let mut det = S::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if a[pivot][col].is_zero() {
            return S::zero();
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col].clone();
        det = det * p.clone();
        for r in col + 1..n {
            let f = a[r][col].clone() / p.clone();
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let v = a[col][c].clone() * f.clone();
                a[r][c] = a[r][c].clone() - v;
            }
        }
    }
    det
}
