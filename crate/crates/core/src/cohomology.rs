//! Equivariant cohomology in the localization representation.
//!
//! Classes are recorded by their restrictions to torus-fixed data. The restrictions
//! of `U_j` and `theta(p)` are linear forms in the equivariant parameters `lambda_j`
//! and the base classes `h_a`, with `mu_j = lambda_j + Lambda_j . h`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::git::{Anticone, GitData, Side, WallCrossing};
use crate::lattice::FgAbGroup;
use crate::linalg::{coordinates, QMat, QVec};
use crate::rat::{fmt as rfmt, to_f64, Rat};

/// `sum a_j lambda_j + sum b_a h_a` with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearForm {
    pub lambda: QVec,
    pub h: QVec,
}

impl LinearForm {
    pub fn zero(m: usize, k: usize) -> Self {
        LinearForm { lambda: vec![Rat::zero(); m], h: vec![Rat::zero(); k] }
    }

    pub fn lambda(m: usize, k: usize, j: usize) -> Self {
        let mut f = Self::zero(m, k);
        f.lambda[j] = Rat::from_integer(1.into());
        f
    }

    /// `mu_j = lambda_j + Lambda_j . h`.
    pub fn mu(git: &GitData, j: usize) -> Self {
        let mut f = Self::lambda(git.m, git.h2_rank, j);
        f.h = git.big_lambda[j].clone();
        f
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.iter().all(Zero::is_zero) && self.h.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        LinearForm { lambda: self.lambda.iter().map(|x| x * c).collect(), h: self.h.iter().map(|x| x * c).collect() }
    }

    pub fn eval(&self, lambda: &[Complex64], h: &[Complex64]) -> Complex64 {
        let mut s = Complex64::zero();
        for (a, x) in self.lambda.iter().zip(lambda) {
            if !a.is_zero() {
                s += x * to_f64(a);
            }
        }
        for (a, x) in self.h.iter().zip(h) {
            if !a.is_zero() {
                s += x * to_f64(a);
            }
        }
        s
    }

    pub fn eval_rat(&self, lambda: &[Rat], h: &[Rat]) -> Rat {
        crate::rat::dot(&self.lambda, lambda) + crate::rat::dot(&self.h, h)
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;
    fn add(self, o: &LinearForm) -> LinearForm {
        LinearForm {
            lambda: self.lambda.iter().zip(&o.lambda).map(|(a, b)| a + b).collect(),
            h: self.h.iter().zip(&o.h).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;
    fn sub(self, o: &LinearForm) -> LinearForm {
        self + &(-o)
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        LinearForm { lambda: self.lambda.iter().map(|a| -a).collect(), h: self.h.iter().map(|a| -a).collect() }
    }
}

impl Mul<&Rat> for &LinearForm {
    type Output = LinearForm;
    fn mul(self, c: &Rat) -> LinearForm {
        self.scale(c)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        let names = self
            .lambda
            .iter()
            .enumerate()
            .map(|(j, a)| (a, format!("l{}", j + 1)))
            .chain(self.h.iter().enumerate().map(|(j, a)| (a, format!("h{}", j + 1))));
        for (a, name) in names {
            if a.is_zero() {
                continue;
            }
            let s = rfmt(a);
            terms.push(match s.as_str() {
                "1" => name,
                "-1" => format!("-{name}"),
                _ => format!("{s}*{name}"),
            });
        }
        if terms.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", terms.join(" + ").replace("+ -", "- "))
        }
    }
}

/// Coefficients `c_i` (indexed like `delta`) with `p = sum c_i D_i`.
pub fn expand_in(git: &GitData, delta: &Anticone, p: &[Rat]) -> Result<QVec> {
    let basis: QMat = delta.indices.iter().map(|&i| git.character(i)).collect();
    coordinates(&basis, p).ok_or_else(|| Error::SingularRestriction(delta.labels()))
}

/// `theta(p)` restricted to `delta`: `-sum c_i mu_i`.
pub fn theta_at(git: &GitData, delta: &Anticone, p: &[Rat]) -> Result<LinearForm> {
    let c = expand_in(git, delta, p)?;
    let mut out = LinearForm::zero(git.m, git.h2_rank);
    for (ci, &i) in c.iter().zip(&delta.indices) {
        out = &out - &LinearForm::mu(git, i).scale(ci);
    }
    Ok(out)
}

/// `U_j` restricted to `delta`: `mu_j + theta(D_j)(delta)`.
pub fn u_at(git: &GitData, delta: &Anticone, j: usize) -> Result<LinearForm> {
    if delta.contains(j) {
        return Ok(LinearForm::zero(git.m, git.h2_rank));
    }
    Ok(&LinearForm::mu(git, j) + &theta_at(git, delta, &git.character(j))?)
}

/// Restrictions `U_j(delta)` and `theta(D_1 + ... + D_m)(delta)` at every minimal anticone.
#[derive(Clone, Debug)]
pub struct RestrictionTable {
    /// `u[a][j]` for minimal anticone `a`.
    pub u: Vec<Vec<LinearForm>>,
    /// `rho[a] = theta(sum D)(delta_a)`.
    pub rho: Vec<LinearForm>,
    /// `theta(p_i)(delta_a)` for the chosen coordinate basis.
    pub theta_basis: Vec<Vec<LinearForm>>,
}

impl RestrictionTable {
    pub fn new(git: &GitData, minimal: &[Anticone], basis: &[QVec]) -> Result<RestrictionTable> {
        let mut u = Vec::new();
        let mut rho = Vec::new();
        let mut theta_basis = Vec::new();
        for delta in minimal {
            u.push((0..git.m).map(|j| u_at(git, delta, j)).collect::<Result<Vec<_>>>()?);
            rho.push(theta_at(git, delta, &git.sum_characters())?);
            theta_basis.push(basis.iter().map(|p| theta_at(git, delta, p)).collect::<Result<Vec<_>>>()?);
        }
        Ok(RestrictionTable { u, rho, theta_basis })
    }
}

/// `c_0 = lambda_1 + ... + lambda_m`.
pub fn c0(git: &GitData) -> LinearForm {
    let mut f = LinearForm::zero(git.m, git.h2_rank);
    for x in f.lambda.iter_mut() {
        *x = Rat::from_integer(1.into());
    }
    f
}

/// Degrees of `y_i` with `sum deg(y_i) p_i = 2 sum D_i`.
pub fn y_degrees(git: &GitData, basis: &[QVec]) -> Result<QVec> {
    let two_sum: QVec = git.sum_characters().iter().map(|x| x * Rat::from_integer(2.into())).collect();
    coordinates(basis, &two_sum).ok_or_else(|| Error::Validation {
        field: "basis".into(),
        message: "sum of characters is not in the span of the basis".into(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DivLemmaCheck {
    pub plus: Vec<usize>,
    pub minus: Vec<usize>,
    pub j: Option<usize>,
    pub lhs: LinearForm,
    pub rhs: LinearForm,
    pub pass: bool,
}

/// Checks `U_j(d+) = U_j(d-) + (D_j.e / D_{j-}.e) U_{j-}(d+)` and the analogue for `theta(p)`.
pub fn verify_div_lemma(wc: &WallCrossing, extra_p: &[QVec]) -> Result<Vec<DivLemmaCheck>> {
    let git = &wc.git;
    let e = wc.wall.e_rat();
    let mut out = Vec::new();
    for pair in &wc.pairs {
        let dp = &wc.plus.minimal[pair.plus];
        let dm = &wc.minus.minimal[pair.minus];
        let djm = Rat::from_integer(wc.wall.de[pair.j_minus].into());
        let ujm = u_at(git, dp, pair.j_minus)?;
        for j in 0..git.m {
            let ratio = Rat::from_integer(wc.wall.de[j].into()) / &djm;
            let lhs = u_at(git, dp, j)?;
            let rhs = &u_at(git, dm, j)? + &ujm.scale(&ratio);
            let pass = lhs == rhs;
            out.push(DivLemmaCheck { plus: dp.labels(), minus: dm.labels(), j: Some(j), lhs, rhs, pass });
        }
        let standard: Vec<QVec> = (0..git.r)
            .map(|i| (0..git.r).map(|k| Rat::from_integer(((i == k) as i64).into())).collect())
            .collect();
        for p in standard.iter().chain(extra_p) {
            let ratio = crate::rat::dot(p, &e) / &djm;
            let lhs = theta_at(git, dp, p)?;
            let rhs = &theta_at(git, dm, p)? + &ujm.scale(&ratio);
            let pass = lhs == rhs;
            out.push(DivLemmaCheck { plus: dp.labels(), minus: dm.labels(), j: None, lhs, rhs, pass });
        }
    }
    Ok(out)
}

/// Generators of the linear and monomial ideals of the cohomology presentation.
#[derive(Clone, Debug, PartialEq)]
pub struct Presentation {
    /// Linear relations `sum_i <chi, b_i> u_i` for `chi` running over a basis of the free dual.
    pub linear: Vec<Vec<i64>>,
    /// Monomials `prod_{i not in I} u_i` for maximal non-anticones `I`, as index sets.
    pub monomial: Vec<Vec<usize>>,
    /// Indices forced to vanish by the monomial ideal.
    pub vanishing: Vec<usize>,
}

pub fn ring_presentation(git: &GitData, side: &Side, n: &FgAbGroup) -> Presentation {
    let rays = n.free_images();
    let linear: Vec<Vec<i64>> =
        (0..n.free_rank).map(|k| rays.iter().map(|b| crate::rat::to_i64(&b[k])).collect()).collect();
    let m = git.m;
    let is_anticone = |mask: u64| {
        let idx: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).collect();
        side.anticones.iter().any(|a| a.indices == idx)
    };
    let non: Vec<u64> = (0..(1u64 << m)).filter(|&mask| !is_anticone(mask)).collect();
    let maximal: Vec<u64> = non.iter().copied().filter(|&a| !non.iter().any(|&b| b != a && b & a == a)).collect();
    let mut monomial: Vec<Vec<usize>> =
        maximal.iter().map(|&mask| (0..m).filter(|j| mask >> j & 1 == 0).collect()).collect();
    monomial.sort();
    let vanishing = monomial.iter().filter(|g| g.len() == 1).map(|g| g[0]).collect();
    Presentation { linear, monomial, vanishing }
}
