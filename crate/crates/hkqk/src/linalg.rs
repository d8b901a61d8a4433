//! Dense exact linear algebra over any `Scalar`.

use crate::forms::Matrix;
use crate::rational::Rational;
use crate::relations::Relations;
use crate::scalar::Scalar;

pub fn identity<C: Scalar>(n: usize) -> Matrix<C> {
    (0..n).map(|i| (0..n).map(|j| if i == j { C::one() } else { C::zero() }).collect()).collect()
}

pub fn transpose<C: Scalar>(m: &Matrix<C>) -> Matrix<C> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul<C: Scalar>(a: &Matrix<C>, b: &Matrix<C>) -> Matrix<C> {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = vec![vec![C::zero(); m]; n];
    for i in 0..n {
        for j in 0..m {
            let parts: Vec<C> = (0..k).filter(|l| !a[i][*l].is_zero() && !b[*l][j].is_zero()).map(|l| a[i][l].times(&b[l][j])).collect();
            out[i][j] = C::sum_all(&parts);
        }
    }
    out
}

pub fn mat_vec<C: Scalar>(a: &Matrix<C>, v: &[C]) -> Vec<C> {
    a.iter()
        .map(|row| {
            let parts: Vec<C> = row.iter().zip(v).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x.times(y)).collect();
            C::sum_all(&parts)
        })
        .collect()
}

pub fn mat_add<C: Scalar>(a: &Matrix<C>, b: &Matrix<C>) -> Matrix<C> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.plus(y)).collect()).collect()
}

pub fn mat_sub<C: Scalar>(a: &Matrix<C>, b: &Matrix<C>) -> Matrix<C> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.minus(y)).collect()).collect()
}

pub fn mat_scale<C: Scalar>(a: &Matrix<C>, f: &C) -> Matrix<C> {
    a.iter().map(|r| r.iter().map(|x| x.times(f)).collect()).collect()
}

pub fn mat_neg<C: Scalar>(a: &Matrix<C>) -> Matrix<C> {
    a.iter().map(|r| r.iter().map(|x| x.negate()).collect()).collect()
}

pub fn mat_reduce<C: Scalar>(a: &Matrix<C>, rel: &Relations) -> Matrix<C> {
    a.iter().map(|r| r.iter().map(|x| x.reduce(rel)).collect()).collect()
}

/// Positions of nonzero entries after reduction.
pub fn nonzero_entries<C: Scalar>(a: &Matrix<C>, rel: &Relations) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, r) in a.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            if !x.reduce(rel).is_zero() {
                out.push((i, j));
            }
        }
    }
    out
}

/// Reduced row echelon form.
pub struct Rref<C> {
    pub rows: Matrix<C>,
    pub pivots: Vec<usize>,
}

impl<C: Scalar> Rref<C> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Gauss-Jordan elimination restricted to the first `ncols` columns
/// (the remaining columns are carried along, e.g. a right-hand side).
pub fn rref_cols<C: Scalar>(mut m: Matrix<C>, ncols: usize, rel: &Relations) -> Rref<C> {
    let nrows = m.len();
    let width = if nrows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let mut best: Option<(usize, usize)> = None;
        for (i, row) in m.iter().enumerate().skip(r) {
            if !row[col].is_zero() {
                let c = row[col].complexity();
                if best.map_or(true, |(_, bc)| c < bc) {
                    best = Some((i, c));
                }
            }
        }
        let Some((p, _)) = best else { continue };
        m.swap(r, p);
        let inv = m[r][col].recip().expect("nonzero pivot is invertible");
        for j in col..width {
            if !m[r][j].is_zero() {
                m[r][j] = m[r][j].times(&inv).reduce(rel);
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for j in col..width {
                if pivot_row[j].is_zero() {
                    continue;
                }
                row[j] = row[j].minus(&f.times(&pivot_row[j])).reduce(rel);
            }
        }
        pivots.push(col);
        r += 1;
    }
    Rref { rows: m, pivots }
}

pub fn rref<C: Scalar>(m: Matrix<C>, rel: &Relations) -> Rref<C> {
    let n = if m.is_empty() { 0 } else { m[0].len() };
    rref_cols(m, n, rel)
}

pub fn rank<C: Scalar>(m: &Matrix<C>, rel: &Relations) -> usize {
    rref(m.clone(), rel).rank()
}

pub fn inverse<C: Scalar>(m: &Matrix<C>, rel: &Relations) -> Option<Matrix<C>> {
    let n = m.len();
    let aug: Matrix<C> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { C::one() } else { C::zero() }));
            r
        })
        .collect();
    let red = rref_cols(aug, n, rel);
    if red.rank() < n {
        return None;
    }
    Some(red.rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solution set of `A x = b`.
#[derive(Debug, Clone)]
pub struct LinearSolution<C> {
    pub particular: Vec<C>,
    pub nullspace: Vec<Vec<C>>,
    pub pivots: Vec<usize>,
}

/// Ranks of the coefficient and augmented matrices of an inconsistent system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankDefect {
    pub rank: usize,
    pub augmented_rank: usize,
    pub equations: usize,
    pub unknowns: usize,
}

impl std::fmt::Display for RankDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "rank {} < augmented rank {} ({} equations, {} unknowns)",
            self.rank, self.augmented_rank, self.equations, self.unknowns
        )
    }
}

pub fn solve<C: Scalar>(a: &Matrix<C>, b: &[C], rel: &Relations) -> Result<LinearSolution<C>, RankDefect> {
    let nrows = a.len();
    let n = if nrows == 0 { 0 } else { a[0].len() };
    let aug: Matrix<C> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let red = rref_cols(aug, n, rel);
    let rank = red.rank();
    let inconsistent = red.rows.iter().skip(rank).any(|r| !r[n].is_zero());
    if inconsistent {
        return Err(RankDefect { rank, augmented_rank: rank + 1, equations: nrows, unknowns: n });
    }
    let mut particular = vec![C::zero(); n];
    for (r, &p) in red.pivots.iter().enumerate() {
        particular[p] = red.rows[r][n].clone();
    }
    let free: Vec<usize> = (0..n).filter(|j| !red.pivots.contains(j)).collect();
    let nullspace = free
        .iter()
        .map(|&f| {
            let mut v = vec![C::zero(); n];
            v[f] = C::one();
            for (r, &p) in red.pivots.iter().enumerate() {
                v[p] = red.rows[r][f].negate();
            }
            v
        })
        .collect();
    Ok(LinearSolution { particular, nullspace, pivots: red.pivots })
}

/// Inertia `(plus, minus, zero)` of a symmetric rational matrix by
/// congruence diagonalization with exact pivoting.
pub fn inertia(m: &Matrix<Rational>) -> (usize, usize, usize) {
    let n = m.len();
    let mut a = m.clone();
    let (mut plus, mut minus) = (0, 0);
    let mut k = 0;
    while k < n {
        let diag = (k..n).find(|&i| !a[i][i].is_zero());
        let piv = match diag {
            Some(i) => i,
            None => {
                let off = (k..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero());
                let Some((i, j)) = off else { break };
                // row_i += row_j and col_i += col_j makes a[i][i] = 2 a[i][j]
                for c in 0..n {
                    let v = &a[i][c] + &a[j][c];
                    a[i][c] = v;
                }
                for r in 0..n {
                    let v = &a[r][i] + &a[r][j];
                    a[r][i] = v;
                }
                i
            }
        };
        a.swap(k, piv);
        for row in a.iter_mut() {
            row.swap(k, piv);
        }
        let p = a[k][k].clone();
        if p.is_negative() {
            minus += 1;
        } else {
            plus += 1;
        }
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for j in k..n {
                let v = &a[i][j] - &(&f * &a[k][j]);
                a[i][j] = v;
            }
        }
        for j in (k + 1)..n {
            a[k][j] = Rational::zero();
        }
        k += 1;
    }
    (plus, minus, n - plus - minus)
}

pub fn determinant(m: &Matrix<Rational>) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Rational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else { return Rational::zero() };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let piv = a[k][k].clone();
        det = &det * &piv;
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &piv;
            for j in k..n {
                let v = &a[i][j] - &(&f * &a[k][j]);
                a[i][j] = v;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from_int(n)
    }

    #[test]
    fn inertia_of_hyperbolic_plane() {
        let m = vec![vec![q(0), q(1)], vec![q(1), q(0)]];
        assert_eq!(inertia(&m), (1, 1, 0));
        let d = vec![vec![q(2), q(0), q(0)], vec![q(0), q(0), q(0)], vec![q(0), q(0), q(-3)]];
        assert_eq!(inertia(&d), (1, 1, 1));
    }

    #[test]
    fn inverse_and_solve() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(1)]];
        let inv = inverse(&m, &Relations::none()).unwrap();
        assert_eq!(mat_mul(&m, &inv), identity::<Rational>(2));
        let s = solve(&m, &[q(3), q(2)], &Relations::none()).unwrap();
        assert_eq!(s.particular, vec![q(1), q(1)]);
        let sing = vec![vec![q(1), q(1)], vec![q(1), q(1)]];
        let err = solve(&sing, &[q(1), q(2)], &Relations::none()).unwrap_err();
        assert_eq!((err.rank, err.augmented_rank), (1, 2));
        assert_eq!(determinant(&m), q(1));
    }
}
