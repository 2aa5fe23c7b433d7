//! Exact arithmetic in cyclotomic fields, with elements written as rational
//! combinations of roots of unity `e^{2 pi i q}`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::rat::{frac, to_f64, Rat};

/// `sum_q c_q e^{2 pi i q}` with phases `q` in `[0, 1)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cyclo {
    terms: BTreeMap<Rat, Rat>,
}

impl Cyclo {
    pub fn zero() -> Cyclo {
        Cyclo::default()
    }

    pub fn rational(c: Rat) -> Cyclo {
        Cyclo::root(c, Rat::zero())
    }

    /// `c e^{2 pi i q}`.
    pub fn root(c: Rat, q: Rat) -> Cyclo {
        let mut out = Cyclo::zero();
        out.add_term(frac(&q), c);
        out
    }

    fn add_term(&mut self, q: Rat, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(q.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&q);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Rat, &Rat)> {
        self.terms.iter()
    }

    pub fn add(&self, o: &Cyclo) -> Cyclo {
        let mut out = self.clone();
        for (q, c) in &o.terms {
            out.add_term(q.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Cyclo {
        self.scale(&-Rat::one())
    }

    pub fn sub(&self, o: &Cyclo) -> Cyclo {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &Rat) -> Cyclo {
        let mut out = Cyclo::zero();
        for (q, x) in &self.terms {
            out.add_term(q.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, o: &Cyclo) -> Cyclo {
        let mut out = Cyclo::zero();
        for (q1, c1) in &self.terms {
            for (q2, c2) in &o.terms {
                out.add_term(frac(&(q1 + q2)), c1 * c2);
            }
        }
        out
    }

    /// Smallest `n` with every phase in `(1/n) Z`.
    pub fn order(&self) -> u64 {
        self.terms.keys().fold(1u64, |acc, q| acc.lcm(&q.denom().try_into().expect("phase denominator fits in u64")))
    }

    /// Coordinates in the power basis `1, z, ..., z^{phi(n)-1}` of `Q[z]/Phi_n`.
    pub fn reduced(&self) -> (u64, Vec<Rat>) {
        let n = self.order();
        let mut poly = vec![Rat::zero(); n as usize];
        for (q, c) in &self.terms {
            let k: u64 = (q * Rat::from_integer(n.into())).to_integer().try_into().expect("phase index");
            poly[k as usize] += c;
        }
        let phi = cyclotomic_polynomial(n);
        (n, poly_rem(poly, &phi))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.reduced().1.iter().all(Zero::is_zero)
    }

    pub fn eval(&self) -> Complex64 {
        self.terms
            .iter()
            .map(|(q, c)| Complex64::from_polar(to_f64(c), 2.0 * std::f64::consts::PI * to_f64(q)))
            .sum()
    }
}

/// Integer coefficients of `Phi_n`, lowest degree first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<i64> {
    assert!(n >= 1);
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in (1..n).filter(|d| n.is_multiple_of(*d)) {
        p = int_div_exact(&p, &cyclotomic_polynomial(d));
    }
    p
}

fn int_div_exact(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    assert_eq!(b[db], 1, "monic divisor");
    let mut q = vec![0i64; a.len() - db];
    for k in (0..q.len()).rev() {
        let c = rem[k + db];
        q[k] = c;
        for (i, bi) in b.iter().enumerate() {
            rem[k + i] -= c * bi;
        }
    }
    debug_assert!(rem.iter().all(|x| *x == 0));
    q
}

fn poly_rem(mut a: Vec<Rat>, b: &[i64]) -> Vec<Rat> {
    let db = b.len() - 1;
    for k in (db..a.len()).rev() {
        let c = a[k].clone();
        if c.is_zero() {
            continue;
        }
        for (i, bi) in b.iter().enumerate() {
            a[k - db + i] -= &c * Rat::from_integer((*bi).into());
        }
    }
    a.truncate(db);
    a
}

/// `(1/l) sum_{zeta in mu_l} zeta^n`.
pub fn root_average(l: u64, n: i64) -> Cyclo {
    let mut out = Cyclo::zero();
    for k in 0..l as i64 {
        out = out.add(&Cyclo::root(Rat::new(1.into(), (l as i64).into()), Rat::new((k * n).into(), (l as i64).into())));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn cube_roots_sum_to_zero() {
        let s = Cyclo::rational(rat_int(1)).add(&Cyclo::root(rat_int(1), rat(1, 3))).add(&Cyclo::root(rat_int(1), rat(2, 3)));
        assert!(!s.terms.is_empty());
        assert!(s.is_zero());
        assert!(!Cyclo::root(rat_int(1), rat(1, 3)).is_zero());
    }

    #[test]
    fn root_averaging_detects_divisibility() {
        for l in 1..=12u64 {
            for n in -40..=40i64 {
                let avg = root_average(l, n);
                let expected = if n % l as i64 == 0 { Cyclo::rational(rat_int(1)) } else { Cyclo::zero() };
                assert!(avg.sub(&expected).is_zero(), "l = {l}, n = {n}");
            }
        }
    }

    #[test]
    fn product_matches_numeric() {
        let a = Cyclo::root(rat(2, 3), rat(1, 5)).add(&Cyclo::rational(rat(-1, 2)));
        let b = Cyclo::root(rat_int(3), rat(3, 4));
        assert!((a.mul(&b).eval() - a.eval() * b.eval()).norm() < 1e-14);
    }
}
