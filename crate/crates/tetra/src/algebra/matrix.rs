use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::rat::Rat;

/// Dense matrix over the rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> QMatrix {
        QMatrix { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> QMatrix {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rat::one());
        }
        m
    }

    /// Builds from rows; all rows must have length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<Vec<Rat>>) -> QMatrix {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged row");
            data.extend(r);
        }
        QMatrix { rows: n, cols, data }
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> QMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        QMatrix::from_rows(cols, rows.iter().map(|r| r.iter().map(|&v| Rat::from(v)).collect()).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rat {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rat) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rat] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Rat> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c).clone());
            }
        }
        t
    }

    pub fn mul(&self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, o.rows);
        let mut m = QMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = m.get(i, j) + a * b;
                        m.set(i, j, v);
                    }
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).filter(|(a, b)| !a.is_zero() && !b.is_zero()).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Rat::is_zero)
    }

    /// Clears denominators row by row, giving an integer matrix with the same
    /// row space.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|r| {
                let row = self.row(r);
                let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
                row.iter().map(|v| v.numer() * (&l / v.denom())).collect()
            })
            .collect()
    }

    /// Fraction-free (Bareiss) forward elimination. Returns the echelon form
    /// and the pivot columns; the echelon rows below `pivots.len()` are zero.
    fn bareiss(&self) -> (Vec<Vec<BigInt>>, Vec<usize>) {
        let mut m = self.integer_rows();
        let mut prev = BigInt::one();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !m[i][c].is_zero()) else {
                continue;
            };
            m.swap(p, r);
            let (top, rest) = m.split_at_mut(r + 1);
            let piv_row = &top[r];
            let piv = &piv_row[c];
            for row in rest.iter_mut() {
                if row[c].is_zero() {
                    // Still scale by piv/prev to keep the Bareiss invariant.
                    for v in row[c + 1..self.cols].iter_mut() {
                        if !v.is_zero() {
                            *v = &*v * piv / &prev;
                        }
                    }
                    continue;
                }
                let lead = row[c].clone();
                for j in c + 1..self.cols {
                    let v = &row[j] * piv - &lead * &piv_row[j];
                    row[j] = if v.is_zero() { v } else { v / &prev };
                }
                row[c] = BigInt::zero();
            }
            prev = m[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    /// Exact rank and a basis of the right kernel.
    pub fn rank_and_kernel(&self) -> (usize, Vec<Vec<Rat>>) {
        let (m, pivots) = self.bareiss();
        let rank = pivots.len();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut kernel = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![Rat::zero(); self.cols];
            v[free] = Rat::one();
            for (i, &p) in pivots.iter().enumerate().rev() {
                let mut s = Rat::zero();
                for j in p + 1..self.cols {
                    if !m[i][j].is_zero() && !v[j].is_zero() {
                        s += Rat::from(m[i][j].clone()) * &v[j];
                    }
                }
                v[p] = -s / Rat::from(m[i][p].clone());
            }
            kernel.push(v);
        }
        (rank, kernel)
    }

    pub fn rank(&self) -> usize {
        self.bareiss().1.len()
    }

    /// Rank by ordinary rational elimination with column pivoting: each row
    /// in turn picks its first nonzero entry among the unused columns. Kept
    /// as an independent cross-check of the Bareiss path.
    pub fn rank_column_pivoting(&self) -> usize {
        let mut m: Vec<Vec<Rat>> = (0..self.rows).map(|r| self.row(r).to_vec()).collect();
        let mut used = vec![false; self.cols];
        let mut rank = 0;
        for r in 0..self.rows {
            let Some(c) = (0..self.cols).find(|&c| !used[c] && !m[r][c].is_zero()) else {
                continue;
            };
            used[c] = true;
            rank += 1;
            let piv = m[r][c].clone();
            let prow = m[r].clone();
            for row in m.iter_mut().skip(r + 1) {
                if row[c].is_zero() {
                    continue;
                }
                let f = &row[c] / &piv;
                for (x, p) in row.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
        }
        rank
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Rat::one();
        }
        // Gaussian elimination with row swaps, tracking the sign.
        let mut m: Vec<Vec<Rat>> = (0..n).map(|r| self.row(r).to_vec()).collect();
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                m.swap(p, c);
                det = -det;
            }
            let piv = m[c][c].clone();
            det *= &piv;
            let prow = m[c].clone();
            for row in m.iter_mut().skip(c + 1) {
                if row[c].is_zero() {
                    continue;
                }
                let f = &row[c] / &piv;
                for j in c..n {
                    if !prow[j].is_zero() {
                        row[j] -= &f * &prow[j];
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut m: Vec<Vec<Rat>> = (0..n)
            .map(|r| {
                let mut row = self.row(r).to_vec();
                row.extend((0..n).map(|j| if j == r { Rat::one() } else { Rat::zero() }));
                row
            })
            .collect();
        for c in 0..n {
            let p = (c..n).find(|&i| !m[i][c].is_zero())?;
            m.swap(p, c);
            let inv = m[c][c].recip();
            for v in m[c].iter_mut() {
                *v *= &inv;
            }
            let prow = m[c].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i == c || row[c].is_zero() {
                    continue;
                }
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *x -= &f * p;
                    }
                }
            }
        }
        Some(QMatrix::from_rows(n, m.into_iter().map(|r| r[n..].to_vec()).collect()))
    }

    /// Submatrix on the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> QMatrix {
        QMatrix::from_rows(
            cols.len(),
            rows.iter().map(|&r| cols.iter().map(|&c| self.get(r, c).clone()).collect()).collect(),
        )
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let cells: Vec<String> = self.row(r).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat::{q, qi};

    #[test]
    fn identity_rank() {
        let (r, k) = QMatrix::identity(3).rank_and_kernel();
        assert_eq!(r, 3);
        assert!(k.is_empty());
    }

    #[test]
    fn zero_matrix_kernel() {
        let (r, k) = QMatrix::zeros(2, 5).rank_and_kernel();
        assert_eq!(r, 0);
        assert_eq!(k.len(), 5);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = QMatrix::from_i64(&[vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![0, 1, -1, 2]]);
        let (r, k) = m.rank_and_kernel();
        assert_eq!(r, 2);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(m.mul_vec(v).iter().all(Rat::is_zero));
        }
        assert_eq!(m.rank_column_pivoting(), 2);
    }

    #[test]
    fn rank_with_skipped_columns() {
        let m = QMatrix::from_i64(&[vec![0, 2, 1, 0], vec![0, 4, 2, 1], vec![0, 0, 0, 3], vec![0, 6, 3, 5]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(m.rank_column_pivoting(), 2);
    }

    #[test]
    fn det_and_inverse() {
        let m = QMatrix::from_rows(2, vec![vec![q(1, 2), qi(3)], vec![qi(-1), qi(4)]]);
        assert_eq!(m.det(), qi(5));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(2));
        assert!(QMatrix::from_i64(&[vec![1, 2], vec![2, 4]]).inverse().is_none());
    }
}
