//! Dense exact linear algebra over a [`Field`]. Matrices are row-major `Vec<Vec<F>>`.

use crate::error::{Error, Result};
use crate::scalar::Field;

pub type Matrix<F> = Vec<Vec<F>>;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(m: &mut Matrix<F>) -> Result<Vec<usize>> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].try_inv()?;
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = m[r][j].clone();
                    m[i][j] = m[i][j].clone() - f.clone() * v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(pivots)
}

pub fn rank<F: Field>(m: &Matrix<F>) -> Result<usize> {
    let mut w = m.clone();
    Ok(rref(&mut w)?.len())
}

/// Basis of the right null space {x : m·x = 0}, one vector per free column.
pub fn nullspace<F: Field>(m: &Matrix<F>, cols: usize) -> Result<Vec<Vec<F>>> {
    let mut w = m.clone();
    let pivots = rref(&mut w)?;
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::zero(); cols];
        v[free] = F::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -w[row][free].clone();
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Solves the square or overdetermined system m·x = b; `None` if inconsistent.
/// For underdetermined systems the free variables are set to zero.
pub fn solve<F: Field>(m: &Matrix<F>, b: &[F]) -> Result<Option<Vec<F>>> {
    let cols = m.first().map_or(0, |r| r.len());
    if m.len() != b.len() {
        return Err(Error::Internal("solve: row count mismatch".into()));
    }
    let mut aug: Matrix<F> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug)?;
    if pivots.contains(&cols) {
        return Ok(None);
    }
    let mut x = vec![F::zero(); cols];
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[row][cols].clone();
    }
    Ok(Some(x))
}

pub fn det<F: Field>(m: &Matrix<F>) -> Result<F> {
    let n = m.len();
    let mut w = m.clone();
    let mut d = F::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !w[i][c].is_zero()) else {
            return Ok(F::zero());
        };
        if p != c {
            w.swap(p, c);
            d = -d;
        }
        d = d * w[c][c].clone();
        let inv = w[c][c].try_inv()?;
        for i in c + 1..n {
            if w[i][c].is_zero() {
                continue;
            }
            let f = w[i][c].clone() * inv.clone();
            for j in c..n {
                let v = w[c][j].clone();
                w[i][j] = w[i][j].clone() - f.clone() * v;
            }
        }
    }
    Ok(d)
}

pub fn mat_mul<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(F::zero(), |acc, k| acc + row[k].clone() * b[k][j].clone())
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec<F: Field>(a: &Matrix<F>, v: &[F]) -> Vec<F> {
    a.iter()
        .map(|row| row.iter().zip(v).fold(F::zero(), |acc, (x, y)| acc + x.clone() * y.clone()))
        .collect()
}

pub fn identity<F: Field>(n: usize) -> Matrix<F> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { F::one() } else { F::zero() }).collect())
        .collect()
}

/// All k-element subsets of 0..n in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64) -> BigRational {
        BigRational::from_i64(n)
    }

    #[test]
    fn determinant_and_solve() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        assert_eq!(det(&m).unwrap(), q(5));
        let x = solve(&m, &[q(3), q(4)]).unwrap().unwrap();
        assert_eq!(mat_vec(&m, &x), vec![q(3), q(4)]);
        let sing = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(solve(&sing, &[q(1), q(0)]).unwrap(), None);
    }

    #[test]
    fn nullspace_basis() {
        let m = vec![vec![q(1), q(1), q(0)]];
        let ns = nullspace(&m, 3).unwrap();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert_eq!(mat_vec(&m, &v), vec![q(0)]);
        }
    }

    #[test]
    fn subset_order() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(subsets(2, 0), vec![Vec::<usize>::new()]);
    }
}
