//! Dense exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{QVector, Rational};

/// Row-major rational matrix.
pub type Matrix = Vec<QVector>;

fn check_lengths(vectors: &[QVector]) -> Result<usize> {
    let n = vectors.first().map_or(0, QVector::len);
    for v in vectors {
        v.check_len(n)?;
    }
    Ok(n)
}

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[QVector]) -> (Vec<QVector>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.iter().map(|r| r.coords().to_vec()).collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let t = &f * &m[r][j];
                    m[i][j] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m.into_iter().map(QVector::new).collect(), pivots)
}

/// Rank of the matrix whose rows are `vectors`.
pub fn span_rank(vectors: &[QVector]) -> Result<usize> {
    check_lengths(vectors)?;
    Ok(rref(vectors).1.len())
}

/// Basis of `{x : row . x = 0 for every row}` in dimension `n`.
pub fn nullspace(rows: &[QVector], n: usize) -> Vec<QVector> {
    let (r, pivots) = rref(rows);
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = QVector::unit(n, free).into_inner();
        for (row, &p) in r.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(QVector::new(v));
    }
    basis
}

/// Canonical representative of `v` modulo the row space of an rref basis:
/// the coordinates at the basis pivots are cleared.
pub fn reduce_mod(v: &QVector, basis: &[QVector], pivots: &[usize]) -> QVector {
    let mut out = v.clone();
    for (row, &p) in basis.iter().zip(pivots) {
        let c = out[p].clone();
        if !c.is_zero() {
            out = out.add_scaled(&-c, row);
        }
    }
    out
}

/// Solves `A x = b` for square `A`. Returns `None` when `A` is singular.
pub fn solve(a: &[QVector], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.coords().to_vec();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for x in m[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..=n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

pub fn determinant(a: &[QVector]) -> Rational {
    let n = a.len();
    let mut m: Vec<Vec<Rational>> = a.iter().map(|r| r.coords().to_vec()).collect();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            m.swap(c, p);
            det = -det;
        }
        det *= &m[c][c];
        for i in c + 1..n {
            if !m[i][c].is_zero() {
                let f = &m[i][c] / &m[c][c];
                for j in c..n {
                    let t = &f * &m[c][j];
                    m[i][j] -= t;
                }
            }
        }
    }
    det
}

/// Determinants of the leading `k x k` blocks, `k = 1..=n`.
pub fn leading_principal_minors(a: &[QVector]) -> Vec<Rational> {
    (1..=a.len())
        .map(|k| {
            let block: Vec<QVector> = a[..k]
                .iter()
                .map(|r| QVector::new(r.coords()[..k].to_vec()))
                .collect();
            determinant(&block)
        })
        .collect()
}

/// Sylvester's criterion for negative definiteness: the `k`-th leading minor
/// has sign `(-1)^k`.
pub fn is_negative_definite(a: &[QVector]) -> bool {
    leading_principal_minors(a).iter().enumerate().all(|(i, d)| {
        if i % 2 == 0 {
            *d < Rational::zero()
        } else {
            *d > Rational::zero()
        }
    })
}

/// `v^T M w`
pub fn bilinear(m: &[QVector], v: &QVector, w: &QVector) -> Rational {
    m.iter()
        .zip(v.iter())
        .fold(Rational::zero(), |acc, (row, vi)| acc + vi * row.dot(w))
}

pub fn matches_shape(m: &[QVector], rows: usize, cols: usize) -> Result<()> {
    if m.len() != rows {
        return Err(Error::DimensionMismatch { expected: rows, found: m.len() });
    }
    for r in m {
        r.check_len(cols)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn v(xs: &[i64]) -> QVector {
        QVector::from_ints(xs)
    }

    #[test]
    fn span_rank_examples() {
        assert_eq!(span_rank(&[v(&[1, 0]), v(&[0, 1])]).unwrap(), 2);
        assert_eq!(span_rank(&[v(&[1, 2]), v(&[2, 4])]).unwrap(), 1);
        assert_eq!(span_rank(&[]).unwrap(), 0);
        assert!(matches!(
            span_rank(&[v(&[1, 2]), v(&[1])]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn nullspace_is_orthogonal() {
        let rows = [v(&[1, 1, 0]), v(&[0, 1, 1])];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        for r in &rows {
            assert!(r.dot(&ns[0]).is_zero());
        }
    }

    #[test]
    fn solve_and_det() {
        let a = [v(&[2, 1]), v(&[1, 3])];
        let x = solve(&a, &[int(3), int(5)]).unwrap();
        assert_eq!(x, vec![crate::rational::rat(4, 5), crate::rational::rat(7, 5)]);
        assert_eq!(determinant(&a), int(5));
        assert!(solve(&[v(&[1, 2]), v(&[2, 4])], &[int(1), int(1)]).is_none());
    }

    #[test]
    fn sylvester() {
        assert!(is_negative_definite(&[v(&[-1, 0]), v(&[0, -1])]));
        assert!(!is_negative_definite(&[v(&[-1, 1]), v(&[1, -1])]));
        assert!(!is_negative_definite(&[v(&[1])]));
    }
}
