//! I- and H-functions at torus-fixed data.
//!
//! Numeric restrictions of `H` are summed in log space. The formal comparison
//! of `z^{-1} I` with the dressed `H` works monomial by monomial in
//! [`Poly`], one lattice point `d` at a time.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::cohomology::{c0, theta_at, u_at, y_degrees, LinearForm};
use crate::error::{Error, Result};
use crate::gamma::ln_gamma;
use crate::git::{normalize_class, Anticone, GitData, Side};
use crate::linalg::{inverse, mat_vec, QMat, QVec};
use crate::params::EquivParams;
use crate::rat::{ceil, dot, frac, is_integer, rat_int, to_f64, Rat};
use crate::symbolic::{gamma_series, Poly, Sym, Trunc};

pub fn two_pi_i() -> Complex64 {
    Complex64::new(0.0, 2.0 * PI)
}

fn unit(r: usize, k: usize) -> QVec {
    (0..r).map(|i| rat_int((i == k) as i64)).collect()
}

fn all_ints(v: &[Rat]) -> bool {
    v.iter().all(is_integer)
}

/// Points `d` of the coset `f + Z^r` with `sum_i |p_i . d| <= max_weight`, where `p` is
/// a basis of a lattice containing the dual of the coset's lattice.
pub fn coset_points(basis: &[QVec], f: &[Rat], max_weight: u32) -> Vec<QVec> {
    let r = basis.len();
    let pinv = inverse(basis).expect("basis has full rank");
    let mut out = Vec::new();
    let mut c = vec![0i64; r];
    fn rec(i: usize, left: i64, c: &mut Vec<i64>, pinv: &QMat, f: &[Rat], out: &mut Vec<QVec>) {
        if i == c.len() {
            let cv: QVec = c.iter().map(|&x| rat_int(x)).collect();
            let d = mat_vec(pinv, &cv);
            let diff: QVec = d.iter().zip(f).map(|(a, b)| a - b).collect();
            if all_ints(&diff) {
                out.push(d);
            }
            return;
        }
        for v in -left..=left {
            c[i] = v;
            rec(i + 1, left - v.abs(), c, pinv, f, out);
        }
        c[i] = 0;
    }
    rec(0, max_weight as i64, &mut c, &pinv, f, &mut out);
    out
}

/// `l = sum_i log(y_i) p_i`, so that `y^d = exp(l . d)`.
pub fn ell_from_log_y(basis: &[QVec], log_y: &[Complex64]) -> Vec<Complex64> {
    let r = basis[0].len();
    (0..r).map(|k| basis.iter().zip(log_y).map(|(p, ly)| ly * to_f64(&p[k])).sum()).collect()
}

pub fn pair_c(ell: &[Complex64], d: &[Rat]) -> Complex64 {
    ell.iter().zip(d).map(|(a, b)| a * to_f64(b)).sum()
}

/// `sigma(delta) = theta(l)(delta) + c_0` as a numeric value.
pub fn sigma_at(git: &GitData, delta: &Anticone, params: &EquivParams, ell: &[Complex64]) -> Result<Complex64> {
    let mut s = params.eval(&c0(git));
    for (k, lk) in ell.iter().enumerate() {
        s += lk * params.eval(&theta_at(git, delta, &unit(git.r, k))?);
    }
    Ok(s)
}

/// Numeric data at one fixed datum `(delta, f)`.
#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub delta: Anticone,
    pub f: QVec,
    /// `U_j(delta)`.
    pub u: Vec<Complex64>,
    pub sigma: Complex64,
}

impl FixedPoint {
    pub fn new(git: &GitData, delta: &Anticone, f: &[Rat], params: &EquivParams, ell: &[Complex64]) -> Result<FixedPoint> {
        let u = (0..git.m).map(|j| Ok(params.eval(&u_at(git, delta, j)?))).collect::<Result<Vec<_>>>()?;
        Ok(FixedPoint { delta: delta.clone(), f: f.to_vec(), u, sigma: sigma_at(git, delta, params, ell)? })
    }
}

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn lambda_dot(git: &GitData, j: usize, big_d: &[Rat]) -> Rat {
    if big_d.is_empty() {
        Rat::zero()
    } else {
        dot(&git.big_lambda[j], big_d)
    }
}

/// One summand of `i*_{(delta,f)} H^D` at lattice point `d`.
pub fn h_term(git: &GitData, fp: &FixedPoint, d: &[Rat], big_d: &[Rat], ell: &[Complex64]) -> Complex64 {
    let tpi = two_pi_i();
    let mut log = pair_c(ell, d) + fp.sigma / tpi;
    for j in 0..git.m {
        let shift = git.pair(j, d) + lambda_dot(git, j, big_d);
        let arg = if fp.delta.contains(j) {
            Complex64::new(1.0 + to_f64(&shift), 0.0)
        } else {
            fp.u[j] / tpi + 1.0 + to_f64(&shift)
        };
        if is_pole(arg) {
            return Complex64::zero();
        }
        log -= ln_gamma(arg);
    }
    log.exp()
}

/// How far to sum the fixed-point restriction.
#[derive(Clone, Debug)]
pub enum Summation {
    /// All shells `sum_{j in delta} (D_j . d + Lambda_j D) <= n`.
    Truncated(u32),
    /// Until the shells drop below `tol` relative to the sum. `|exp(l . direction)|` must
    /// stay below `radius`.
    Full { direction: QVec, radius: f64, tol: f64 },
}

#[derive(Clone, Debug)]
pub struct RestrictedSum {
    pub value: Complex64,
    pub shells: usize,
    pub terms: usize,
    /// Estimated size of the omitted tail.
    pub tail: f64,
}

fn compositions(k: usize, total: i64, out: &mut Vec<Vec<i64>>, cur: &mut Vec<i64>) {
    if cur.len() + 1 == k {
        cur.push(total);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for v in 0..=total {
        cur.push(v);
        compositions(k, total - v, out, cur);
        cur.pop();
    }
}

/// Points of `delta^vee` in the coset of `f` with `sum_{j in delta} n_j = shell`.
pub fn shell_points(git: &GitData, delta: &Anticone, f: &[Rat], big_d: &[Rat], shell: i64) -> Vec<QVec> {
    let rows: QMat = delta.indices.iter().map(|&j| git.character(j)).collect();
    let minv = inverse(&rows).expect("minimal anticone characters are independent");
    let mut ns = Vec::new();
    compositions(delta.indices.len(), shell, &mut ns, &mut Vec::new());
    let mut out = Vec::new();
    for n in ns {
        let rhs: QVec =
            delta.indices.iter().zip(&n).map(|(&j, &nj)| rat_int(nj) - lambda_dot(git, j, big_d)).collect();
        let d = mat_vec(&minv, &rhs);
        let diff: QVec = d.iter().zip(f).map(|(a, b)| a - b).collect();
        if all_ints(&diff) {
            out.push(d);
        }
    }
    out
}

pub fn restrict_h(
    git: &GitData,
    fp: &FixedPoint,
    big_d: &[Rat],
    ell: &[Complex64],
    mode: &Summation,
) -> Result<RestrictedSum> {
    let mut value = Complex64::zero();
    let mut terms = 0;
    match mode {
        Summation::Truncated(n) => {
            let mut last = 0.0;
            for s in 0..=*n as i64 {
                let mut shell = Complex64::zero();
                for d in shell_points(git, &fp.delta, &fp.f, big_d, s) {
                    shell += h_term(git, fp, &d, big_d, ell);
                    terms += 1;
                }
                value += shell;
                last = shell.norm();
            }
            Ok(RestrictedSum { value, shells: *n as usize + 1, terms, tail: last })
        }
        Summation::Full { direction, radius, tol } => {
            let x = pair_c(ell, direction).exp().norm();
            if x >= *radius {
                return Err(Error::OutsideConvergence { value: x, radius: *radius });
            }
            let q = x / radius;
            let mut small = 0;
            let max_shells = 200_000;
            for s in 0..max_shells {
                let mut shell = Complex64::zero();
                for d in shell_points(git, &fp.delta, &fp.f, big_d, s as i64) {
                    shell += h_term(git, fp, &d, big_d, ell);
                    terms += 1;
                }
                value += shell;
                let mag = shell.norm();
                if mag <= tol * value.norm().max(1e-300) {
                    small += 1;
                } else {
                    small = 0;
                }
                if small >= 6 && s > 8 {
                    return Ok(RestrictedSum { value, shells: s + 1, terms, tail: mag * q / (1.0 - q) });
                }
            }
            Err(Error::SlowConvergence(format!("|y^e| / radius = {q:.6} after {max_shells} shells")))
        }
    }
}

/// Numeric H-function: per class `f`, the coefficients of `y^d` at every fixed point
/// `(delta, f)`, without the prefactor `exp(sigma(delta)/2 pi i)`.
#[derive(Clone, Debug)]
pub struct HSeries {
    pub big_d: QVec,
    pub components: Vec<HComponent>,
}

#[derive(Clone, Debug)]
pub struct HComponent {
    pub class: usize,
    pub terms: Vec<HTerm>,
}

#[derive(Clone, Debug)]
pub struct HTerm {
    pub d: QVec,
    /// `(minimal anticone index, coefficient)`.
    pub values: Vec<(usize, Complex64)>,
}

pub fn h_function(git: &GitData, side: &Side, basis: &[QVec], params: &EquivParams, big_d: &[Rat], max_weight: u32) -> Result<HSeries> {
    let zero_ell = vec![Complex64::zero(); git.r];
    let mut components = Vec::new();
    for (c, class) in side.classes.iter().enumerate() {
        let points: Vec<usize> = side.fixed.iter().filter(|(_, cc)| *cc == c).map(|(a, _)| *a).collect();
        let fps = points
            .iter()
            .map(|&a| Ok((a, FixedPoint::new(git, &side.minimal[a], &class.f, params, &zero_ell)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut terms = Vec::new();
        for d in coset_points(basis, &class.f, max_weight) {
            let values: Vec<(usize, Complex64)> = fps
                .iter()
                .map(|(a, fp)| {
                    let mut fp = fp.clone();
                    fp.sigma = Complex64::zero();
                    (*a, h_term(git, &fp, &d, big_d, &zero_ell))
                })
                .collect();
            terms.push(HTerm { d, values });
        }
        components.push(HComponent { class: c, terms });
    }
    Ok(HSeries { big_d: big_d.to_vec(), components })
}

/// Truncation window for the formal comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub y_degree: u32,
    pub z_low: i32,
    pub z_high: i32,
}

fn sigma_poly(git: &GitData, delta: &Anticone, basis: &[QVec]) -> Result<Poly> {
    let y_dim = basis.len();
    let mut s = Poly::linear(y_dim, &c0(git));
    let t = Trunc { max_cdeg: 1, h_order: 1 };
    for (i, p) in basis.iter().enumerate() {
        let th = Poly::linear(y_dim, &theta_at(git, delta, p)?);
        s = s.add(&th.mul(&Poly::sym(y_dim, Sym::LogY(i), 1), &t));
    }
    Ok(s)
}

fn in_window(w: &Window, z: &Rat) -> bool {
    *z >= rat_int(w.z_low as i64) && *z <= rat_int(w.z_high as i64)
}

/// `1 / (a + x)` for a rational `a != 0` and nilpotent `x`.
fn inv_shift(x: &Poly, a: &Rat, t: &Trunc) -> Poly {
    let inv = Rat::one() / a;
    x.scale(&-&inv).geometric(t).scale(&inv)
}

/// The factor of the I-function for one `j`: `prod_{a<=0} (U + a z) / prod_{a<=x} (U + a z)`.
fn i_factor(u: &Poly, x: &Rat, t: &Trunc) -> Poly {
    let y_dim = u.y_dim;
    let mut out = Poly::one(y_dim);
    if !x.is_negative() {
        let mut a = x.clone();
        let zinv = Poly::z_pow(y_dim, -Rat::one());
        while a.is_positive() {
            // 1/(U + a z) = (1/(a z)) sum (-U/(a z))^n
            let f = inv_shift(&u.mul(&zinv, t), &a, t).mul(&zinv, t);
            out = out.mul(&f, t);
            a -= Rat::one();
        }
    } else {
        let mut a = x + Rat::one();
        while !a.is_positive() {
            let f = u.add(&Poly::z_pow(y_dim, Rat::one()).scale(&a));
            out = out.mul(&f, t);
            a += Rat::one();
        }
    }
    out
}

/// `1 / Gamma(1 + x + s)` for nilpotent `x` and rational `s`.
fn rgamma_poly(x: &Poly, s: &Rat, t: &Trunc) -> Poly {
    let q = frac(&-s);
    let n = ceil(s);
    let mut out = gamma_series(x, &q, true, t);
    if !n.is_negative() {
        let mut k = Rat::one();
        while k <= Rat::from_integer(n.clone()) {
            out = out.mul(&inv_shift(x, &(&k - &q), t), t);
            k += Rat::one();
        }
    } else {
        let mut k = Rat::from_integer(n) + Rat::one();
        while !k.is_positive() {
            let f = x.add(&Poly::constant(x.y_dim, &k - &q));
            out = out.mul(&f, t);
            k += Rat::one();
        }
    }
    out
}

fn cdeg_budget(git: &GitData, d: &[Rat], w: &Window) -> i32 {
    let s: i64 = (0..git.m).map(|j| crate::rat::to_i64(&ceil(&git.pair(j, d)))).sum();
    (-s - w.z_low as i64) as i32
}

/// `z^{-1} i*_{(delta,g)} I` at a point base, truncated to the window.
pub fn i_restriction(git: &GitData, delta: &Anticone, g: &[Rat], basis: &[QVec], w: &Window) -> Result<Poly> {
    let y_dim = basis.len();
    let neg: QVec = g.iter().map(|x| -x).collect();
    let sigma = sigma_poly(git, delta, basis)?;
    let us: Vec<Poly> = (0..git.m).map(|j| Ok(Poly::linear(y_dim, &u_at(git, delta, j)?))).collect::<Result<_>>()?;
    let mut acc = Poly::zero(y_dim);
    for d in coset_points(basis, &normalize_class(&neg), w.y_degree) {
        let top = cdeg_budget(git, &d, w);
        if top < 0 {
            continue;
        }
        let t = Trunc { max_cdeg: top, h_order: 1 };
        let mut term = Poly::y_pow(basis.iter().map(|p| dot(p, &d)).collect());
        for (j, u) in us.iter().enumerate() {
            term = term.mul(&i_factor(u, &git.pair(j, &d), &t), &t);
            if term.is_zero() {
                break;
            }
        }
        if term.is_zero() {
            continue;
        }
        let e = sigma.mul(&Poly::z_pow(y_dim, -Rat::one()), &t).exp(&t);
        acc = acc.add(&term.mul(&e, &t));
    }
    Ok(acc.filter(|m| in_window(w, &m.z)))
}

/// The dressed H-function at `(delta, g)`: the right-hand side of the I/H relation.
pub fn dressed_h_restriction(
    git: &GitData,
    delta: &Anticone,
    g: &[Rat],
    basis: &[QVec],
    rho: &LinearForm,
    w: &Window,
) -> Result<Poly> {
    let y_dim = basis.len();
    let deg = y_degrees(git, basis)?;
    let age = (0..git.m).fold(Rat::zero(), |acc, j| acc + frac(&git.pair(j, g)));
    let neg: QVec = g.iter().map(|x| -x).collect();
    let sigma = sigma_poly(git, delta, basis)?;
    let inv_tpi = Poly::sym(y_dim, Sym::TwoPiI, -1);
    let us: Vec<Poly> = (0..git.m).map(|j| Ok(Poly::linear(y_dim, &u_at(git, delta, j)?))).collect::<Result<_>>()?;
    let half = Rat::new(1.into(), 2.into());
    let mut acc = Poly::zero(y_dim);
    for d in coset_points(basis, &normalize_class(&neg), w.y_degree) {
        let top = cdeg_budget(git, &d, w);
        if top < 0 {
            continue;
        }
        let t = Trunc { max_cdeg: top, h_order: 1 };
        // H at (delta, [d]) for this d
        let mut h = Poly::y_pow(basis.iter().map(|p| dot(p, &d)).collect());
        for (j, u) in us.iter().enumerate() {
            h = h.mul(&rgamma_poly(&u.mul(&inv_tpi, &t), &git.pair(j, &d), &t), &t);
            if h.is_zero() {
                break;
            }
        }
        if h.is_zero() {
            continue;
        }
        h = h.mul(&sigma.mul(&inv_tpi, &t).exp(&t), &t);
        // y -> z^{-deg(y)/2} y
        for (i, di) in deg.iter().enumerate() {
            let by = Poly::sym(y_dim, Sym::LogY(i), 1).sub(&Poly::sym(y_dim, Sym::LogZ, 1).scale(&(di * &half)));
            h = h.substitute(&Sym::LogY(i), &by, &t);
        }
        h = h.map_monomials(|m| {
            let mut m = m.clone();
            for (di, yi) in deg.iter().zip(&m.y) {
                m.z -= di * yi * &half;
            }
            (m, Rat::one())
        });
        // (2 pi i)^{deg_0 / 2}
        h = h.map_monomials(|m| {
            let mut m = m.clone();
            let c = m.cdeg();
            if c != 0 {
                let e = m.syms.entry(Sym::TwoPiI).or_insert(0);
                *e += c;
                if *e == 0 {
                    m.syms.remove(&Sym::TwoPiI);
                }
            }
            (m, Rat::one())
        });
        // Gamma class of the component [-d]
        for (j, u) in us.iter().enumerate() {
            h = h.mul(&gamma_series(u, &frac(&-git.pair(j, &d)), false, &t), &t);
        }
        h = h.mul(&Poly::linear(y_dim, rho).mul(&Poly::sym(y_dim, Sym::LogZ, 1), &t).exp(&t), &t);
        // z^{-deg/2}
        h = h.map_monomials(|m| {
            let mut m = m.clone();
            m.z -= Rat::from_integer(m.cdeg().into()) + &age;
            (m, Rat::one())
        });
        acc = acc.add(&h);
    }
    Ok(acc.filter(|m| in_window(w, &m.z)))
}

#[derive(Clone, Debug)]
pub struct IhCheck {
    pub delta: Vec<usize>,
    pub class: QVec,
    pub lhs_terms: usize,
    pub rhs_terms: usize,
    /// A few surviving terms of `lhs - rhs`.
    pub residual: Vec<String>,
    pub pass: bool,
}

/// Compares `z^{-1} I` with the dressed H-function at every fixed datum of one side.
///
/// `rho_shift` is added to `rho(delta)`; a nonzero shift is a negative control.
pub fn verify_i_h_relation(
    git: &GitData,
    side: &Side,
    basis: &[QVec],
    w: &Window,
    rho_shift: Option<&LinearForm>,
) -> Result<Vec<IhCheck>> {
    if git.has_base() {
        return Err(Error::Validation {
            field: "base".into(),
            message: "the I/H comparison is implemented for a point base".into(),
        });
    }
    let mut out = Vec::new();
    for &(a, c) in &side.fixed {
        let delta = &side.minimal[a];
        let g = &side.classes[c].f;
        let mut rho = theta_at(git, delta, &git.sum_characters())?;
        if let Some(s) = rho_shift {
            rho = &rho + s;
        }
        let lhs = i_restriction(git, delta, g, basis, w)?;
        let rhs = dressed_h_restriction(git, delta, g, basis, &rho, w)?;
        let diff = lhs.sub(&rhs);
        let residual = diff.terms.iter().take(3).map(|(m, c)| Poly::monomial(diff.y_dim, m.clone(), c.clone()).to_string()).collect();
        out.push(IhCheck {
            delta: delta.labels(),
            class: g.clone(),
            lhs_terms: lhs.len(),
            rhs_terms: rhs.len(),
            residual,
            pass: diff.is_zero(),
        });
    }
    Ok(out)
}

/// `z^{-1} I` restricted to every fixed datum of one side.
#[derive(Clone, Debug)]
pub struct ISeries {
    pub basis: QMat,
    pub window: Window,
    pub components: Vec<IComponent>,
}

#[derive(Clone, Debug)]
pub struct IComponent {
    pub delta: Anticone,
    pub class: usize,
    pub series: Poly,
}

pub fn i_function(git: &GitData, side: &Side, basis: &[QVec], w: &Window) -> Result<ISeries> {
    if git.has_base() {
        return Err(Error::Validation { field: "base".into(), message: "the formal I-function is implemented for a point base".into() });
    }
    let components = side
        .fixed
        .iter()
        .map(|&(a, c)| {
            Ok(IComponent {
                delta: side.minimal[a].clone(),
                class: c,
                series: i_restriction(git, &side.minimal[a], &side.classes[c].f, basis, w)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ISeries { basis: basis.to_vec(), window: *w, components })
}

/// Degree of a monomial of `z^{-1} I` in component of age `age`.
pub fn monomial_degree(m: &crate::symbolic::Mono, deg_y: &[Rat], age: &Rat) -> Rat {
    let two = rat_int(2);
    &two * &m.z + dot(deg_y, &m.y) + &two * Rat::from_integer(m.cdeg().into()) + &two * age
}
