//! Dense linear algebra over the rationals. Matrices are row vectors of `Rat`.

use num_traits::{One, Zero};

use crate::rat::Rat;

pub type QVec = Vec<Rat>;
pub type QMat = Vec<QVec>;

/// Reduced row echelon form and pivot columns.
#[allow(clippy::needless_range_loop)]
pub fn rref(a: &[QVec]) -> (QMat, Vec<usize>) {
    let mut m: QMat = a.to_vec();
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = &m[r][j] * &f;
                    m[i][j] -= v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (m, pivots)
}

pub fn rank(a: &[QVec]) -> usize {
    rref(a).1.len()
}

/// Rank of a set of vectors.
pub fn rank_of(vectors: &[&QVec]) -> usize {
    let rows: QMat = vectors.iter().map(|v| (*v).clone()).collect();
    rank(&rows)
}

#[allow(clippy::needless_range_loop)]
pub fn det(a: &[QVec]) -> Rat {
    let n = a.len();
    let mut m: QMat = a.to_vec();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else { return Rat::zero() };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        let inv = m[c][c].recip();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let v = &m[c][j] * &f;
                m[i][j] -= v;
            }
        }
    }
    d
}

/// Some `x` with `a x = b`, or `None` if inconsistent.
pub fn solve(a: &[QVec], b: &[Rat]) -> Option<QVec> {
    let cols = a.first().map_or(0, Vec::len);
    let aug: QMat = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (m, pivots) = rref(&aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Rat::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = m[i][cols].clone();
    }
    Some(x)
}

pub fn inverse(a: &[QVec]) -> Option<QMat> {
    let n = a.len();
    let aug: QMat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    let (m, pivots) = rref(&aug);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Basis of `{x : a x = 0}`.
pub fn nullspace(a: &[QVec], cols: usize) -> QMat {
    if a.is_empty() {
        return (0..cols)
            .map(|i| (0..cols).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
            .collect();
    }
    let (m, pivots) = rref(a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rat::zero(); cols];
            x[f] = Rat::one();
            for (i, &p) in pivots.iter().enumerate() {
                x[p] = -m[i][f].clone();
            }
            x
        })
        .collect()
}

pub fn transpose(a: &[QVec]) -> QMat {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_vec(a: &[QVec], x: &[Rat]) -> QVec {
    a.iter().map(|r| crate::rat::dot(r, x)).collect()
}

pub fn mat_mul(a: &[QVec], b: &[QVec]) -> QMat {
    let bt = transpose(b);
    a.iter().map(|r| bt.iter().map(|c| crate::rat::dot(r, c)).collect()).collect()
}

/// Coefficients `c` with `v = sum c_i basis_i`, if `v` lies in the span.
pub fn coordinates(basis: &[QVec], v: &[Rat]) -> Option<QVec> {
    if basis.is_empty() {
        return v.iter().all(Zero::is_zero).then(Vec::new);
    }
    solve(&transpose(basis), v)
}

/// A basis (subset of rows) of the row span, chosen greedily in order.
pub fn independent_subset(vectors: &[QVec]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    let mut rows: QMat = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        rows.push(v.clone());
        if rank(&rows) > chosen.len() {
            chosen.push(i);
        } else {
            rows.pop();
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn q(rows: &[&[i64]]) -> QMat {
        rows.iter().map(|r| r.iter().map(|&x| rat_int(x)).collect()).collect()
    }

    #[test]
    fn det_and_inverse() {
        let a = q(&[&[1, 1], &[0, 2]]);
        assert_eq!(det(&a), rat_int(2));
        let inv = inverse(&a).unwrap();
        assert_eq!(inv, vec![vec![rat_int(1), rat(-1, 2)], vec![rat_int(0), rat(1, 2)]]);
        assert!(inverse(&q(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn solve_inconsistent() {
        let a = q(&[&[1, 1], &[1, 1]]);
        assert!(solve(&a, &[rat_int(1), rat_int(2)]).is_none());
        assert!(solve(&a, &[rat_int(2), rat_int(2)]).is_some());
    }

    #[test]
    fn nullspace_dims() {
        let a = q(&[&[1, 1, -1, -1]]);
        let n = nullspace(&a, 4);
        assert_eq!(n.len(), 3);
        for v in &n {
            assert!(mat_vec(&a, v).iter().all(Zero::is_zero));
        }
    }
}
