//! Truncated polynomials in `z`, `y` and a set of formal symbols with exact
//! rational coefficients.
//!
//! The cohomological degree `cdeg` counts factors of `lambda_j` and `h_a`. It is
//! additive and non-negative, so truncating by `cdeg` is compatible with products.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::cohomology::LinearForm;
use crate::linalg::QVec;
use crate::rat::{fmt as rfmt, Rat};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    Lambda(usize),
    H(usize),
    LogY(usize),
    LogZ,
    TwoPiI,
    EulerGamma,
    Zeta(usize),
    /// `Gamma(1 - q)` for `0 < q < 1`.
    GammaConst(Rat),
    /// `psi^(k)(1 - q)`.
    Polygamma(usize, Rat),
}

impl Sym {
    fn cdeg(&self) -> i32 {
        matches!(self, Sym::Lambda(_) | Sym::H(_)) as i32
    }
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sym::Lambda(j) => write!(f, "l{}", j + 1),
            Sym::H(a) => write!(f, "h{}", a + 1),
            Sym::LogY(i) => write!(f, "logy{}", i + 1),
            Sym::LogZ => write!(f, "logz"),
            Sym::TwoPiI => write!(f, "(2pi i)"),
            Sym::EulerGamma => write!(f, "gamma"),
            Sym::Zeta(k) => write!(f, "zeta({k})"),
            Sym::GammaConst(q) => write!(f, "Gamma(1-{})", rfmt(q)),
            Sym::Polygamma(k, q) => write!(f, "psi{}(1-{})", k, rfmt(q)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub z: Rat,
    pub y: QVec,
    pub syms: BTreeMap<Sym, i32>,
}

impl Mono {
    pub fn one(y_dim: usize) -> Mono {
        Mono { z: Rat::zero(), y: vec![Rat::zero(); y_dim], syms: BTreeMap::new() }
    }

    pub fn cdeg(&self) -> i32 {
        self.syms.iter().map(|(s, e)| s.cdeg() * e).sum()
    }

    pub fn hdeg(&self) -> i32 {
        self.syms.iter().filter(|(s, _)| matches!(s, Sym::H(_))).map(|(_, e)| e).sum()
    }

    fn mul(&self, o: &Mono) -> Mono {
        let mut syms = self.syms.clone();
        for (s, e) in &o.syms {
            let v = syms.entry(s.clone()).or_insert(0);
            *v += e;
            if *v == 0 {
                syms.remove(s);
            }
        }
        Mono { z: &self.z + &o.z, y: self.y.iter().zip(&o.y).map(|(a, b)| a + b).collect(), syms }
    }
}

/// Truncation: keep monomials with `cdeg <= max_cdeg` and `hdeg < h_order`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Trunc {
    pub max_cdeg: i32,
    pub h_order: i32,
}

impl Trunc {
    fn keeps(&self, m: &Mono) -> bool {
        m.cdeg() <= self.max_cdeg && m.hdeg() < self.h_order
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub y_dim: usize,
    pub terms: BTreeMap<Mono, Rat>,
}

impl Poly {
    pub fn zero(y_dim: usize) -> Poly {
        Poly { y_dim, terms: BTreeMap::new() }
    }

    pub fn constant(y_dim: usize, c: Rat) -> Poly {
        let mut p = Poly::zero(y_dim);
        if !c.is_zero() {
            p.terms.insert(Mono::one(y_dim), c);
        }
        p
    }

    pub fn one(y_dim: usize) -> Poly {
        Poly::constant(y_dim, Rat::one())
    }

    pub fn monomial(y_dim: usize, m: Mono, c: Rat) -> Poly {
        let mut p = Poly::zero(y_dim);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn sym(y_dim: usize, s: Sym, e: i32) -> Poly {
        let mut m = Mono::one(y_dim);
        if e != 0 {
            m.syms.insert(s, e);
        }
        Poly::monomial(y_dim, m, Rat::one())
    }

    pub fn z_pow(y_dim: usize, z: Rat) -> Poly {
        let mut m = Mono::one(y_dim);
        m.z = z;
        Poly::monomial(y_dim, m, Rat::one())
    }

    pub fn y_pow(y: QVec) -> Poly {
        let y_dim = y.len();
        let mut m = Mono::one(y_dim);
        m.y = y;
        Poly::monomial(y_dim, m, Rat::one())
    }

    /// `sum a_j lambda_j + sum b_a h_a`.
    pub fn linear(y_dim: usize, f: &LinearForm) -> Poly {
        let mut p = Poly::zero(y_dim);
        for (j, a) in f.lambda.iter().enumerate() {
            p.add_term(Mono { syms: [(Sym::Lambda(j), 1)].into(), ..Mono::one(y_dim) }, a.clone());
        }
        for (k, b) in f.h.iter().enumerate() {
            p.add_term(Mono { syms: [(Sym::H(k), 1)].into(), ..Mono::one(y_dim) }, b.clone());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: Rat) {
        if c.is_zero() {
            return;
        }
        let v = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *v += c;
        if v.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut p = self.clone();
        for (m, c) in &o.terms {
            p.add_term(m.clone(), c.clone());
        }
        p
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        let mut p = Poly::zero(self.y_dim);
        for (m, v) in &self.terms {
            p.add_term(m.clone(), v * c);
        }
        p
    }

    pub fn mul(&self, o: &Poly, t: &Trunc) -> Poly {
        let mut p = Poly::zero(self.y_dim);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let m = m1.mul(m2);
                if t.keeps(&m) {
                    p.add_term(m, c1 * c2);
                }
            }
        }
        p
    }

    pub fn truncate(&self, t: &Trunc) -> Poly {
        Poly { y_dim: self.y_dim, terms: self.terms.iter().filter(|(m, _)| t.keeps(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// `exp(self)`; every term must have positive `cdeg`.
    pub fn exp(&self, t: &Trunc) -> Poly {
        assert!(self.terms.keys().all(|m| m.cdeg() > 0), "exp needs a nilpotent argument");
        let mut out = Poly::one(self.y_dim);
        let mut power = Poly::one(self.y_dim);
        for n in 1.. {
            power = power.mul(self, t).scale(&Rat::new(1.into(), n.into()));
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        out
    }

    /// `sum_n c^n x^n` truncated, for `1 / (1 - c x)`.
    pub fn geometric(&self, t: &Trunc) -> Poly {
        assert!(self.terms.keys().all(|m| m.cdeg() > 0), "geometric needs a nilpotent argument");
        let mut out = Poly::one(self.y_dim);
        let mut power = Poly::one(self.y_dim);
        loop {
            power = power.mul(self, t);
            if power.is_zero() {
                return out;
            }
            out = out.add(&power);
        }
    }

    /// Maps every monomial `m` to `f(m)`, multiplying coefficients.
    pub fn map_monomials(&self, f: impl Fn(&Mono) -> (Mono, Rat)) -> Poly {
        let mut p = Poly::zero(self.y_dim);
        for (m, c) in &self.terms {
            let (m2, k) = f(m);
            p.add_term(m2, c * k);
        }
        p
    }

    /// Substitutes polynomials for a symbol of exponent 1; other exponents are rejected.
    pub fn substitute(&self, s: &Sym, by: &Poly, t: &Trunc) -> Poly {
        let mut out = Poly::zero(self.y_dim);
        for (m, c) in &self.terms {
            match m.syms.get(s) {
                None => out.add_term(m.clone(), c.clone()),
                Some(&e) => {
                    assert!(e > 0, "substitution needs a non-negative exponent");
                    let mut rest = m.clone();
                    rest.syms.remove(s);
                    let mut term = Poly::monomial(self.y_dim, rest, c.clone());
                    for _ in 0..e {
                        term = term.mul(by, t);
                    }
                    out = out.add(&term);
                }
            }
        }
        out
    }

    pub fn filter(&self, keep: impl Fn(&Mono) -> bool) -> Poly {
        Poly { y_dim: self.y_dim, terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (m, c) in &self.terms {
            let mut factors = Vec::new();
            let bare = m.syms.is_empty() && m.z.is_zero() && m.y.iter().all(Zero::is_zero);
            if bare || !(c.is_one() || (-c).is_one()) {
                factors.push(rfmt(c));
            } else if !c.is_one() {
                factors.push("-".into());
            }
            if !m.z.is_zero() {
                factors.push(format!("z^{}", rfmt(&m.z)));
            }
            for (i, e) in m.y.iter().enumerate() {
                if !e.is_zero() {
                    factors.push(format!("y{}^{}", i + 1, rfmt(e)));
                }
            }
            for (s, e) in &m.syms {
                factors.push(if *e == 1 { s.to_string() } else { format!("{s}^{e}") });
            }
            parts.push(factors.join("*").replacen("-*", "-", 1));
        }
        let s = parts.join(" + ").replace("+ -", "- ");
        write!(f, "{s}")
    }
}

/// Taylor series of `Gamma(1 + x - q)` for `q` in `[0, 1)`, or its inverse.
pub fn gamma_series(x: &Poly, q: &Rat, inverse: bool, t: &Trunc) -> Poly {
    let y_dim = x.y_dim;
    let sign = if inverse { -Rat::one() } else { Rat::one() };
    let mut log = Poly::zero(y_dim);
    let mut power = Poly::one(y_dim);
    let mut fact = Rat::one();
    for k in 1..=t.max_cdeg.max(0) as usize {
        power = power.mul(x, t);
        if power.is_zero() {
            break;
        }
        fact *= Rat::from_integer(k.into());
        let coeff = if q.is_zero() {
            // log Gamma(1+x) = -gamma x + sum_{k>=2} zeta(k) (-x)^k / k
            let c = Rat::new(if k % 2 == 0 { 1.into() } else { (-1).into() }, k.into());
            let s = if k == 1 { Sym::EulerGamma } else { Sym::Zeta(k) };
            let c = if k == 1 { -Rat::one() } else { c };
            Poly::sym(y_dim, s, 1).scale(&c)
        } else {
            Poly::sym(y_dim, Sym::Polygamma(k - 1, q.clone()), 1).scale(&(Rat::one() / &fact))
        };
        log = log.add(&power.mul(&coeff, t));
    }
    let series = log.scale(&sign).exp(t);
    if q.is_zero() {
        series
    } else {
        series.mul(&Poly::sym(y_dim, Sym::GammaConst(q.clone()), if inverse { -1 } else { 1 }), t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(j: usize) -> Poly {
        Poly::sym(0, Sym::Lambda(j), 1)
    }

    #[test]
    fn exp_of_nilpotent() {
        let t = Trunc { max_cdeg: 2, h_order: 9 };
        let e = lam(0).exp(&t);
        // 1 + l1 + l1^2/2
        assert_eq!(e.len(), 3);
        let sq = Mono { syms: [(Sym::Lambda(0), 2)].into(), ..Mono::one(0) };
        assert_eq!(e.terms[&sq], Rat::new(1.into(), 2.into()));
    }

    #[test]
    fn gamma_times_inverse_is_one() {
        let t = Trunc { max_cdeg: 4, h_order: 9 };
        let x = lam(0).add(&lam(1).scale(&Rat::from_integer((-2).into())));
        for q in [Rat::zero(), Rat::new(1.into(), 3.into())] {
            let g = gamma_series(&x, &q, false, &t);
            let gi = gamma_series(&x, &q, true, &t);
            assert_eq!(g.mul(&gi, &t), Poly::one(0));
        }
    }

    #[test]
    fn nilpotent_gamma_first_order() {
        // Gamma(1 + x) = 1 - gamma x when x^2 = 0
        let t = Trunc { max_cdeg: 1, h_order: 9 };
        let g = gamma_series(&lam(0), &Rat::zero(), false, &t);
        let expected = Poly::one(0).sub(&lam(0).mul(&Poly::sym(0, Sym::EulerGamma, 1), &t));
        assert_eq!(g, expected);
    }

    #[test]
    fn substitution_and_geometric() {
        let t = Trunc { max_cdeg: 3, h_order: 9 };
        let g = lam(0).geometric(&t);
        assert_eq!(g.len(), 4);
        let s = g.substitute(&Sym::Lambda(0), &lam(1), &t);
        assert_eq!(s, lam(1).geometric(&t));
    }
}
