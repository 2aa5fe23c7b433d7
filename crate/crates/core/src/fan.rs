//! Cones, simplicial fans, star subdivisions and the blow-up GIT data.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::git::{GitData, WallData};
use crate::lattice::{smith_normal_form, IntMatrix};
use crate::linalg::{rank, QMat, QVec};
use crate::polyhedral::{ConeH, LexPoint};
use crate::rat::{from_int, int, primitive, Int, Rat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub generators: Vec<Vec<Int>>,
    pub ambient: usize,
}

impl Cone {
    pub fn new(generators: Vec<Vec<i64>>, ambient: usize) -> Cone {
        Cone { generators: generators.into_iter().map(|g| g.into_iter().map(int).collect()).collect(), ambient }
    }

    fn rat_generators(&self) -> QMat {
        self.generators.iter().map(|g| g.iter().map(from_int).collect()).collect()
    }

    fn h(&self) -> ConeH {
        ConeH::from_generators(&self.rat_generators(), self.ambient)
    }

    /// Primitive generators of the extreme rays, in input order.
    pub fn minimal_generators(&self) -> Vec<Vec<Int>> {
        let mut prims: Vec<Vec<Int>> = Vec::new();
        for g in self.rat_generators() {
            let p = primitive(&g);
            if !p.iter().all(Zero::is_zero) && !prims.contains(&p) {
                prims.push(p);
            }
        }
        let as_rat = |v: &Vec<Int>| -> QVec { v.iter().map(from_int).collect() };
        (0..prims.len())
            .filter(|&i| {
                let others: QMat = prims.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, v)| as_rat(v)).collect();
                !ConeH::from_generators(&others, self.ambient).contains_closed(&as_rat(&prims[i]))
            })
            .map(|i| prims[i].clone())
            .collect()
    }

    pub fn is_strongly_convex(&self) -> bool {
        let h = self.h();
        // a cone contains a line iff its dual is not full-dimensional
        let dual = ConeH::from_generators(&h.dual_generators(), self.ambient);
        dual.dim() == self.ambient
    }

    pub fn is_simplicial(&self) -> bool {
        let gens = self.minimal_generators();
        let rows: QMat = gens.iter().map(|g| g.iter().map(from_int).collect()).collect();
        rows.is_empty() || rank(&rows) == rows.len()
    }

    pub fn is_smooth(&self) -> bool {
        if !self.is_simplicial() {
            return false;
        }
        let gens = self.minimal_generators();
        if gens.is_empty() {
            return true;
        }
        let m = IntMatrix::from_rows(gens, self.ambient);
        smith_normal_form(&m).invariant_factors().iter().all(One::is_one)
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.h().contains_closed(x)
    }
}

/// Dual cone, generated by primitive integer vectors.
pub fn dual_cone(sigma: &Cone) -> Cone {
    let gens = sigma.h().dual_generators();
    Cone { generators: gens.iter().map(|g| primitive(g)).collect(), ambient: sigma.ambient }
}

/// A simplicial fan stored by its maximal cones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fan {
    pub ambient: usize,
    pub rays: Vec<Vec<Int>>,
    pub cones: Vec<Vec<usize>>,
}

impl Fan {
    pub fn cone(&self, idx: &[usize]) -> Cone {
        Cone { generators: idx.iter().map(|&i| self.rays[i].clone()).collect(), ambient: self.ambient }
    }

    /// All faces, including the zero cone, as sorted ray index sets.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for c in &self.cones {
            for mask in 0u64..(1u64 << c.len()) {
                let f: Vec<usize> = (0..c.len()).filter(|k| mask >> k & 1 == 1).map(|k| c[k]).collect();
                let mut f = f;
                f.sort_unstable();
                if !out.contains(&f) {
                    out.push(f);
                }
            }
        }
        out.sort();
        out
    }

    /// Every cone of `self` lies in a cone of `coarse`.
    pub fn refines(&self, coarse: &Fan) -> bool {
        self.cones.iter().all(|c| {
            coarse.cones.iter().any(|d| {
                let big = coarse.cone(d);
                c.iter().all(|&i| big.contains(&self.rays[i].iter().map(from_int).collect::<QVec>()))
            })
        })
    }

    /// Whether `x` lies in some cone.
    pub fn support_contains(&self, x: &[Rat]) -> bool {
        self.cones.iter().any(|c| self.cone(c).contains(x))
    }
}

/// Star subdivision along the cone spanned by the rays `tau`.
pub fn star_subdivision(fan: &Fan, tau: &[usize]) -> Result<Fan> {
    let mut tau = tau.to_vec();
    tau.sort_unstable();
    tau.dedup();
    if tau.len() <= 1 {
        return Ok(fan.clone());
    }
    if !fan.cones.iter().any(|c| tau.iter().all(|t| c.contains(t))) {
        return Err(Error::InvalidFan(format!("{:?} is not a cone of the fan", tau)));
    }
    for c in fan.cones.iter().filter(|c| tau.iter().all(|t| c.contains(t))) {
        if !fan.cone(c).is_smooth() {
            return Err(Error::NonSmoothStar(format!("cone {:?}", c)));
        }
    }
    let mut u = vec![Int::zero(); fan.ambient];
    for &t in &tau {
        for (a, b) in u.iter_mut().zip(&fan.rays[t]) {
            *a += b;
        }
    }
    let mut rays = fan.rays.clone();
    let new = rays.len();
    rays.push(u);
    let mut cones = Vec::new();
    for c in &fan.cones {
        if !tau.iter().all(|t| c.contains(t)) {
            cones.push(c.clone());
            continue;
        }
        for &rho in &tau {
            let mut nc: Vec<usize> = c.iter().copied().filter(|&i| i != rho).collect();
            nc.push(new);
            cones.push(nc);
        }
    }
    Ok(Fan { ambient: fan.ambient, rays, cones })
}

/// Characters and lexicographic stability parameter of the common blow-up.
pub fn blowup_git(git: &GitData, wall: &WallData) -> Result<(GitData, LexPoint)> {
    let r = git.r;
    let mut d: Vec<Vec<Int>> = Vec::with_capacity(git.m + 1);
    for j in 0..git.m {
        let mut row = git.d[j].clone();
        row.push(if wall.de[j] > 0 { int(-wall.de[j]) } else { Int::zero() });
        d.push(row);
    }
    let mut last = vec![Int::zero(); r + 1];
    last[r] = Int::one();
    d.push(last);
    let mut big_lambda = git.big_lambda.clone();
    big_lambda.push(vec![Rat::zero(); git.h2_rank]);
    let tilde = GitData::with_base(d, big_lambda, git.h2_rank)?;
    let mut w0 = wall.omega0.clone();
    w0.push(Rat::zero());
    let mut eps = vec![Rat::zero(); r + 1];
    eps[r] = -Rat::one();
    Ok((tilde, vec![w0, eps]))
}
