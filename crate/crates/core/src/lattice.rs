//! Integer matrices, Smith normal form, cokernels and fractional parts.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rat::{ceil, floor, from_int, int, Int, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Int>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Int::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Int::one());
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect(), cols)
    }

    /// `cols` is only consulted when `rows` is empty.
    pub fn from_rows(rows: Vec<Vec<Int>>, cols: usize) -> Self {
        let cols = rows.first().map_or(cols, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        IntMatrix { rows: rows.len(), cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(columns: &[Vec<Int>], rows: usize) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Int {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Int) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Int] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Int> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Int>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn to_rat_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).iter().map(from_int).collect()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(Int::zero(), |acc, (a, b)| acc + a * b))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Determinant by fraction-free elimination (square matrices only).
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols);
        crate::linalg::det(&self.to_rat_rows()).to_integer()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &Int) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + k * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &Int) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + k * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -self.get(i, j);
            self.set(i, j, v);
        }
    }
}

/// `u * a * v == s` with `u`, `v` unimodular and `s` in Smith form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Nonzero diagonal entries, in order.
    pub fn invariant_factors(&self) -> Vec<Int> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s.get(i, i).clone())
            .take_while(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> Snf {
    let (m, n) = (a.rows(), a.cols());
    let mut s = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);

    for t in 0..m.min(n) {
        loop {
            // smallest nonzero |entry| in the trailing block, row-major scan
            let mut best: Option<(usize, usize)> = None;
            for i in t..m {
                for j in t..n {
                    let x = s.get(i, j);
                    if x.is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Snf { u, s, v };
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            let p = s.get(t, t).clone();
            for i in t + 1..m {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = -(s.get(i, t) / &p);
                s.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !s.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = -(s.get(t, j) / &p);
                s.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !s.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s.get(i, j).is_multiple_of(&p)));
            match offender {
                Some(i) => {
                    let one = Int::one();
                    s.add_row(t, i, &one);
                    u.add_row(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    Snf { u, s, v }
}

/// Basis of the integer kernel of `a`, as columns.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    let cols: Vec<Vec<Int>> = (r..a.cols()).map(|j| snf.v.column(j)).collect();
    IntMatrix::from_columns(&cols, a.cols())
}

/// Finitely generated abelian group `Z^free ⊕ ⊕ Z/d_i` with a projection from `Z^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FgAbGroup {
    pub free_rank: usize,
    pub torsion: Vec<Int>,
    /// Rows: free coordinates first, then one row per torsion factor.
    pub projection: IntMatrix,
}

impl FgAbGroup {
    pub fn ambient_rank(&self) -> usize {
        self.projection.cols()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Image of an ambient vector, torsion coordinates reduced to `[0, d)`.
    pub fn project(&self, x: &[Int]) -> Vec<Int> {
        let mut y = self.projection.mul_vec(x);
        for (k, d) in self.torsion.iter().enumerate() {
            y[self.free_rank + k] = y[self.free_rank + k].mod_floor(d);
        }
        y
    }

    /// Images `b_i` of the standard basis vectors.
    pub fn generator_images(&self) -> Vec<Vec<Int>> {
        let m = self.ambient_rank();
        (0..m)
            .map(|i| {
                let mut e = vec![Int::zero(); m];
                e[i] = Int::one();
                self.project(&e)
            })
            .collect()
    }

    /// Free part of the images, used as ray coordinates.
    pub fn free_images(&self) -> Vec<Vec<Int>> {
        self.generator_images().into_iter().map(|b| b[..self.free_rank].to_vec()).collect()
    }
}

/// Cokernel of `a: Z^r -> Z^m` (an `m x r` matrix).
pub fn cokernel_with_projection(a: &IntMatrix) -> FgAbGroup {
    let m = a.rows();
    let snf = smith_normal_form(a);
    let factors = snf.invariant_factors();
    let rank = factors.len();
    let mut rows = Vec::new();
    for i in rank..m {
        rows.push(snf.u.row(i).to_vec());
    }
    let mut torsion = Vec::new();
    for (i, d) in factors.iter().enumerate() {
        if !d.is_one() {
            torsion.push(d.clone());
            rows.push(snf.u.row(i).to_vec());
        }
    }
    FgAbGroup { free_rank: m - rank, torsion, projection: IntMatrix::from_rows(rows, m) }
}

/// Characters `D_i` of `ker(beta)`: row `i` is the restriction of `e_i^*` to a basis of the kernel.
pub fn dual_characters(n: &FgAbGroup, rank: usize) -> Result<IntMatrix> {
    let m = n.ambient_rank();
    let t = n.torsion.len();
    // kernel of x -> (P_free x, P_tor x mod d) is the projection of ker [[P_free, 0], [P_tor, diag d]]
    let mut big = IntMatrix::zeros(n.free_rank + t, m + t);
    for i in 0..n.free_rank + t {
        for j in 0..m {
            big.set(i, j, n.projection.get(i, j).clone());
        }
    }
    for (k, d) in n.torsion.iter().enumerate() {
        big.set(n.free_rank + k, m + k, d.clone());
    }
    let ker = integer_kernel(&big);
    if ker.cols() != rank {
        return Err(Error::RankMismatch { expected: rank, found: ker.cols() });
    }
    let mut out = IntMatrix::zeros(m, rank);
    for i in 0..m {
        for j in 0..rank {
            out.set(i, j, ker.get(i, j).clone());
        }
    }
    Ok(out)
}

/// Unimodular `g` with `from * g == to`, if the column lattices agree.
pub fn change_of_basis(from: &IntMatrix, to: &IntMatrix) -> Option<IntMatrix> {
    let (m, r) = (from.rows(), from.cols());
    if to.rows() != m || to.cols() != r {
        return None;
    }
    let a = from.to_rat_rows();
    let mut cols = Vec::with_capacity(r);
    for j in 0..r {
        let b: Vec<Rat> = to.column(j).iter().map(from_int).collect();
        let x = crate::linalg::solve(&a, &b)?;
        if !x.iter().all(crate::rat::is_integer) {
            return None;
        }
        cols.push(x.iter().map(|q| q.to_integer()).collect::<Vec<_>>());
    }
    let g = IntMatrix::from_columns(&cols, r);
    if g.det().abs().is_one() && &from.mul(&g) == to {
        Some(g)
    } else {
        None
    }
}

/// `(ceil(x), x - floor(x))`.
pub fn frac_ceil_parts(x: &Rat) -> (Int, Rat) {
    (ceil(x), x - from_int(&floor(x)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn check_snf(a: &IntMatrix) -> Snf {
        let snf = smith_normal_form(a);
        assert_eq!(snf.u.mul(a).mul(&snf.v), snf.s);
        assert!(snf.u.det().abs().is_one());
        assert!(snf.v.det().abs().is_one());
        snf
    }

    #[test]
    fn snf_zero() {
        let a = IntMatrix::from_i64(&[vec![0]]);
        let snf = check_snf(&a);
        assert_eq!(snf.s, a);
        assert_eq!(snf.u, IntMatrix::identity(1));
        assert_eq!(snf.v, IntMatrix::identity(1));
    }

    #[test]
    fn snf_diag_3_1() {
        let snf = check_snf(&IntMatrix::from_i64(&[vec![3, 0], vec![0, 1]]));
        assert_eq!(snf.s, IntMatrix::from_i64(&[vec![1, 0], vec![0, 3]]));
    }

    #[test]
    fn snf_flop_column() {
        let snf = check_snf(&IntMatrix::from_i64(&[vec![1], vec![1], vec![-1], vec![-1]]));
        assert_eq!(snf.s, IntMatrix::from_i64(&[vec![1], vec![0], vec![0], vec![0]]));
    }

    #[test]
    fn cokernel_examples() {
        let n = cokernel_with_projection(&IntMatrix::from_i64(&[vec![3], vec![0]]));
        assert_eq!((n.free_rank, n.torsion.clone()), (1, vec![int(3)]));
        let n = cokernel_with_projection(&IntMatrix::from_i64(&[vec![1], vec![1], vec![-1], vec![-1]]));
        assert_eq!((n.free_rank, n.torsion.len()), (3, 0));
        let n = cokernel_with_projection(&IntMatrix::identity(2));
        assert!(n.is_trivial());
    }

    #[test]
    fn beta_kills_image() {
        let a = IntMatrix::from_i64(&[vec![1, 0], vec![-1, 0], vec![0, 1], vec![1, 1], vec![-1, 1]]);
        let n = cokernel_with_projection(&a);
        for j in 0..a.cols() {
            assert!(n.project(&a.column(j)).iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn dual_round_trip_flop_and_c3z3() {
        for d in [vec![1, 1, -1, -1], vec![1, 1, 1, -3]] {
            let a = IntMatrix::from_i64(&d.iter().map(|&x| vec![x]).collect::<Vec<_>>());
            let n = cokernel_with_projection(&a);
            let back = dual_characters(&n, 1).unwrap();
            assert!(change_of_basis(&back, &a).is_some());
        }
    }

    #[test]
    fn dual_of_identity_is_trivial() {
        let n = cokernel_with_projection(&IntMatrix::zeros(3, 0));
        let d = dual_characters(&n, 0).unwrap();
        assert_eq!((d.rows(), d.cols()), (3, 0));
        assert!(matches!(dual_characters(&n, 1), Err(Error::RankMismatch { .. })));
    }

    #[test]
    fn frac_ceil_examples() {
        assert_eq!(frac_ceil_parts(&rat(-1, 3)), (int(0), rat(2, 3)));
        assert_eq!(frac_ceil_parts(&rat(2, 1)), (int(2), rat(0, 1)));
        assert_eq!(frac_ceil_parts(&rat(7, 3)), (int(3), rat(1, 3)));
    }
}
