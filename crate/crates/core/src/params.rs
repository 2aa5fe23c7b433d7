//! Numeric equivariant parameters and their seeded draws.

use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohomology::LinearForm;
use crate::rat::{rat, to_f64, Rat};

/// Rational values for `lambda_1..lambda_m` and the base classes `h_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivParams {
    pub lambda: Vec<Rat>,
    pub h: Vec<Rat>,
}

impl EquivParams {
    pub fn new(lambda: Vec<Rat>, h: Vec<Rat>) -> EquivParams {
        EquivParams { lambda, h }
    }

    pub fn lambda_c(&self) -> Vec<Complex64> {
        self.lambda.iter().map(|x| Complex64::new(to_f64(x), 0.0)).collect()
    }

    pub fn h_c(&self) -> Vec<Complex64> {
        self.h.iter().map(|x| Complex64::new(to_f64(x), 0.0)).collect()
    }

    pub fn eval(&self, f: &LinearForm) -> Complex64 {
        f.eval(&self.lambda_c(), &self.h_c())
    }

    pub fn eval_rat(&self, f: &LinearForm) -> Rat {
        f.eval_rat(&self.lambda, &self.h)
    }
}

/// Seeded source of parameter draws: ChaCha8, values `k/1000` with `|k| <= 1000`.
pub struct Draws {
    rng: ChaCha8Rng,
}

impl Draws {
    pub fn new(seed: u64) -> Draws {
        Draws { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn value(&mut self) -> Rat {
        rat(self.rng.gen_range(-1000..=1000), 1000)
    }

    /// Draws until every form in `forms` stays at least `gap` away from zero.
    pub fn generic(&mut self, m: usize, h2: usize, forms: &[LinearForm], gap: f64) -> EquivParams {
        loop {
            let p = EquivParams { lambda: (0..m).map(|_| self.value()).collect(), h: (0..h2).map(|_| self.value()).collect() };
            if forms.iter().all(|f| to_f64(&p.eval_rat(f)).abs() >= gap) {
                return p;
            }
        }
    }

    /// A draw with the base classes set to zero.
    pub fn generic_without_base(&mut self, m: usize, h2: usize, forms: &[LinearForm], gap: f64) -> EquivParams {
        loop {
            let mut p = self.generic(m, h2, &[], 0.0);
            p.h = vec![Rat::zero(); h2];
            if forms.iter().all(|f| to_f64(&p.eval_rat(f)).abs() >= gap) {
                return p;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_reproducible() {
        let a = Draws::new(7).generic(4, 0, &[], 0.0);
        let b = Draws::new(7).generic(4, 0, &[], 0.0);
        assert_eq!(a, b);
        assert!(a.lambda.iter().all(|x| to_f64(x).abs() <= 1.0));
    }

    #[test]
    fn redraw_avoids_small_forms() {
        let f = LinearForm::lambda(2, 0, 0);
        let p = Draws::new(1).generic(2, 0, std::slice::from_ref(&f), 0.5);
        assert!(to_f64(&p.eval_rat(&f)).abs() >= 0.5);
    }
}
