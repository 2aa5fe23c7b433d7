//! Exact H-descriptions of rational polyhedral cones.
//!
//! Facets are found by enumerating rank-deficient subsets of generators, which is
//! plenty for the handful of generators that occur here.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::linalg::{coordinates, independent_subset, nullspace, solve, QMat, QVec};
use crate::rat::{dot, from_int, primitive, Rat};

/// A point `v_0 + eps v_1 + eps^2 v_2 + ...` for infinitesimal `eps > 0`.
pub type LexPoint = Vec<QVec>;

/// `cone(generators)` described by its linear span and inner facet normals.
#[derive(Clone, Debug)]
pub struct ConeH {
    pub ambient: usize,
    /// Basis of the linear span, chosen among the generators.
    pub span: QMat,
    /// Ambient functionals, nonnegative on the cone, one per facet.
    pub facets: QMat,
}

impl ConeH {
    pub fn from_generators(gens: &[QVec], ambient: usize) -> ConeH {
        let gens: Vec<QVec> = gens.iter().filter(|g| !g.iter().all(Zero::is_zero)).cloned().collect();
        let basis_idx = independent_subset(&gens);
        let span: QMat = basis_idx.iter().map(|&i| gens[i].clone()).collect();
        let k = span.len();
        if k == 0 {
            return ConeH { ambient, span, facets: Vec::new() };
        }
        let coords: Vec<QVec> = gens.iter().map(|g| coordinates(&span, g).expect("in span")).collect();
        let mut normals: Vec<QVec> = Vec::new();
        for subset in subsets(gens.len(), k - 1) {
            let rows: QMat = subset.iter().map(|&i| coords[i].clone()).collect();
            let ns = nullspace(&rows, k);
            if ns.len() != 1 {
                continue;
            }
            let mut n = ns.into_iter().next().unwrap();
            let signs: Vec<Ordering> = coords.iter().map(|c| dot(&n, c).cmp(&Rat::zero())).collect();
            if signs.iter().all(|s| *s != Ordering::Less) {
            } else if signs.iter().all(|s| *s != Ordering::Greater) {
                n = n.into_iter().map(|x| -x).collect();
            } else {
                continue;
            }
            let n: QVec = primitive(&n).iter().map(from_int).collect();
            if !normals.contains(&n) {
                normals.push(n);
            }
        }
        // lift span-coordinate functionals to ambient ones
        let facets = normals
            .iter()
            .map(|n| {
                let h = solve(&span, n).expect("span basis is independent");
                primitive(&h).iter().map(from_int).collect()
            })
            .collect();
        ConeH { ambient, span, facets }
    }

    pub fn dim(&self) -> usize {
        self.span.len()
    }

    pub fn in_span(&self, x: &[Rat]) -> bool {
        coordinates(&self.span, x).is_some()
    }

    pub fn contains_closed(&self, x: &[Rat]) -> bool {
        self.in_span(x) && self.facets.iter().all(|h| !dot(h, x).is_negative())
    }

    pub fn contains_relint(&self, x: &[Rat]) -> bool {
        self.in_span(x) && self.facets.iter().all(|h| dot(h, x).is_positive())
    }

    pub fn contains_relint_lex(&self, x: &LexPoint) -> bool {
        x.iter().all(|v| self.in_span(v)) && self.facets.iter().all(|h| lex_sign(h, x) == Ordering::Greater)
    }

    /// Generators of the dual cone `{h : h . g >= 0}`.
    pub fn dual_generators(&self) -> QMat {
        let mut out = self.facets.clone();
        for b in nullspace(&self.span, self.ambient) {
            let b: QVec = primitive(&b).iter().map(from_int).collect();
            out.push(b.iter().map(|x| -x).collect());
            out.push(b);
        }
        out
    }
}

pub fn lex_sign(h: &[Rat], x: &LexPoint) -> Ordering {
    for v in x {
        let s = dot(h, v);
        match s.cmp(&Rat::zero()) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Drops functionals that are nonnegative combinations of the others.
pub fn irredundant(normals: &[QVec], ambient: usize) -> QMat {
    let mut uniq: QMat = Vec::new();
    for n in normals {
        let p: QVec = primitive(n).iter().map(from_int).collect();
        if !p.iter().all(Zero::is_zero) && !uniq.contains(&p) {
            uniq.push(p);
        }
    }
    let mut keep = Vec::new();
    for i in 0..uniq.len() {
        let others: QMat = uniq.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| v.clone()).collect();
        if !ConeH::from_generators(&others, ambient).contains_closed(&uniq[i]) {
            keep.push(uniq[i].clone());
        }
    }
    keep
}

/// Extreme rays of the pointed cone `{x : n . x >= 0 for all n}`.
pub fn extreme_rays(normals: &[QVec], ambient: usize) -> QMat {
    ConeH::from_generators(normals, ambient).facets
}

/// All `k`-element subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
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
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_int;

    fn v(x: &[i64]) -> QVec {
        x.iter().map(|&a| rat_int(a)).collect()
    }

    #[test]
    fn facets_of_plane_cone() {
        let c = ConeH::from_generators(&[v(&[1, 0]), v(&[1, 2])], 2);
        let mut f = c.facets.clone();
        f.sort();
        let mut want = vec![v(&[0, 1]), v(&[2, -1])];
        want.sort();
        assert_eq!(f, want);
        assert!(c.contains_relint(&v(&[2, 1])));
        assert!(!c.contains_relint(&v(&[1, 0])));
        assert!(c.contains_closed(&v(&[1, 0])));
    }

    #[test]
    fn half_line_and_full_line() {
        let c = ConeH::from_generators(&[v(&[1])], 1);
        assert_eq!(c.facets, vec![v(&[1])]);
        let c = ConeH::from_generators(&[v(&[1]), v(&[-1])], 1);
        assert!(c.facets.is_empty());
        assert!(c.contains_relint(&v(&[0])));
    }

    #[test]
    fn lower_dimensional_relint() {
        let c = ConeH::from_generators(&[v(&[1, 0]), v(&[2, 0])], 2);
        assert!(c.contains_relint(&v(&[3, 0])));
        assert!(!c.contains_relint(&v(&[3, 1])));
        assert!(!c.contains_relint(&v(&[0, 0])));
    }

    #[test]
    fn lex_membership() {
        let c = ConeH::from_generators(&[v(&[1, 0]), v(&[0, 1])], 2);
        assert!(c.contains_relint_lex(&vec![v(&[1, 0]), v(&[0, 1])]));
        assert!(!c.contains_relint_lex(&vec![v(&[1, 0]), v(&[0, -1])]));
    }

    #[test]
    fn redundancy_removal() {
        let keep = irredundant(&[v(&[1, 0]), v(&[0, 1]), v(&[1, 1]), v(&[2, 0])], 2);
        assert_eq!(keep.len(), 2);
    }

    #[test]
    fn subset_counts() {
        assert_eq!(subsets(5, 2).len(), 10);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
        assert!(subsets(2, 3).is_empty());
    }
}
