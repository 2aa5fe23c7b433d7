//! Mellin-Barnes continuation of fixed-point restrictions across a crepant wall.
//!
//! For a slice `d_+` of `delta_+^vee` the `k`-sum of the restriction equals
//! `K * sum_k Res_{s=k} F` with
//!
//! `F(s) = Gamma(s) Gamma(1-s) prod_{D_j.e<0} Gamma(-(a_j + s D_j.e)) / prod_{D_j.e>=0} Gamma(1 + a_j + s D_j.e) X^s`,
//!
//! `a_j = U_j(delta_+)/2 pi i + D_j.d_+ + Lambda_j D`, `X = e^{-pi i w} (y^+)^e` and
//! `K = prod_{D_j.e<0} sin(-pi a_j)/pi`. The integral `I = -(1/2 pi i) int_C F ds`
//! equals the right residue sum inside the conifold radius and minus the left
//! residue sum outside it.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::cohomology::{theta_at, u_at, LinearForm};
use crate::error::{Error, Result};
use crate::gamma::{gamma, ln_gamma, ln_sin_pi, rgamma};
use crate::git::{class_index, normalize_class, Anticone, ClassPair, GitData, WallCrossing, WallData};
use crate::linalg::{inverse, mat_vec, QMat, QVec};
use crate::params::{Draws, EquivParams};
use crate::quadrature::{integrate, Estimate};
use crate::rat::{dot, fmt as rfmt, is_integer, rat_int, to_f64, Rat};
use crate::series::{pair_c, restrict_h, two_pi_i, FixedPoint, Summation};

/// `prod_{D_j.e != 0} (D_j.e)^{D_j.e}`.
pub fn conifold_point(wall: &WallData) -> Rat {
    assert!(wall.de.iter().any(|&x| x != 0), "a wall direction pairs nontrivially with some character");
    wall.de.iter().filter(|&&x| x != 0).fold(Rat::from_integer(1.into()), |acc, &x| acc * crate::rat::pow(&rat_int(x), x))
}

#[derive(Clone, Debug)]
pub struct MbIntegrand {
    pub a: Vec<Complex64>,
    pub de: Vec<i64>,
    /// Principal `log X`.
    pub ln_x: Complex64,
    /// `|c|`.
    pub radius: f64,
}

fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

impl MbIntegrand {
    /// `log_y` is `log (y^+)^e` on the chosen branch; its imaginary part must lie within `pi` of `w pi`.
    pub fn new(a: Vec<Complex64>, de: Vec<i64>, log_y: Complex64, w: i64, radius: f64) -> Result<MbIntegrand> {
        let ln_x = log_y - Complex64::new(0.0, PI * w as f64);
        if ln_x.im.abs() >= PI {
            return Err(Error::Domain(format!("|arg (y^+)^e - w pi| = {:.6} is not below pi", ln_x.im.abs())));
        }
        Ok(MbIntegrand { a, de, ln_x, radius })
    }

    /// `|(y^+)^e|`.
    pub fn modulus(&self) -> f64 {
        self.ln_x.re.exp()
    }

    /// `log` of the Gamma ratio, skipping the numerator factor `skip`; `None` at a zero.
    fn ln_ratio(&self, s: Complex64, skip: Option<usize>) -> Option<Complex64> {
        let mut acc = Complex64::zero();
        for (j, (&de, a)) in self.de.iter().zip(&self.a).enumerate() {
            if de < 0 {
                if Some(j) != skip {
                    acc += ln_gamma(-(a + s * de as f64));
                }
            } else {
                let z = a + s * de as f64 + 1.0;
                if is_pole(z) {
                    return None;
                }
                acc -= ln_gamma(z);
            }
        }
        Some(acc)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        match self.ln_ratio(s, None) {
            None => Complex64::zero(),
            Some(r) => (Complex64::new(PI.ln(), 0.0) - ln_sin_pi(s) + r + s * self.ln_x).exp(),
        }
    }

    /// `K = prod_{D_j.e<0} sin(-pi a_j) / pi`.
    pub fn prefactor(&self) -> Complex64 {
        self.de
            .iter()
            .zip(&self.a)
            .filter(|(de, _)| **de < 0)
            .map(|(_, a)| (-a * PI).sin() / PI)
            .product()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoleFamily {
    pub j: usize,
    pub l: i64,
    /// The pole with `n = 0`; the family continues at `first - n / l`.
    pub first: Complex64,
}

/// The left pole families; the right family is `s = 0, 1, 2, ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoleLayout {
    pub left: Vec<PoleFamily>,
    /// Poles at `s = -1 - n` whose residues vanish.
    pub vanishing_right: bool,
}

pub fn classify_poles(ig: &MbIntegrand, gap: f64) -> Result<PoleLayout> {
    let mut left = Vec::new();
    for (j, (&de, a)) in ig.de.iter().zip(&ig.a).enumerate() {
        if de < 0 {
            let l = -de;
            let first = a / l as f64;
            if first.im.abs() < gap {
                return Err(Error::NonGenericParameters(format!("pole family of j = {} meets the real axis", j + 1)));
            }
            left.push(PoleFamily { j, l, first });
        }
    }
    for (x, p) in left.iter().enumerate() {
        for q in &left[x + 1..] {
            if (p.first.im - q.first.im).abs() < gap {
                return Err(Error::NonGenericParameters(format!(
                    "pole families of j = {} and j = {} collide",
                    p.j + 1,
                    q.j + 1
                )));
            }
        }
    }
    // 1/Gamma(1 + a_j + s D_j.e) vanishes at s = -1 - n for j_+ when a_{j_+} is a small integer
    let vanishing_right = (-3..0).all(|n| ig.eval(Complex64::new(n as f64, 0.0)).norm() == 0.0);
    Ok(PoleLayout { left, vanishing_right })
}

/// The contour: `Re s = right` for `|Im s| >= eta`, joined through a notch reaching `Re s = left`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContourSpec {
    pub right: f64,
    pub left: f64,
    pub eta: f64,
    pub height: f64,
}

impl ContourSpec {
    pub fn for_layout(ig: &MbIntegrand, layout: &PoleLayout) -> ContourSpec {
        let max_re = layout.left.iter().map(|f| f.first.re).fold(0.0f64, f64::max);
        let eta = layout.left.iter().map(|f| f.first.im.abs()).fold(0.5f64, f64::min) / 2.0;
        let angle = PI - ig.ln_x.im.abs();
        ContourSpec { right: max_re + 0.5, left: -0.5, eta, height: (40.0 / angle).clamp(10.0, 200.0) }
    }

    fn segments(&self) -> Vec<(Complex64, Complex64)> {
        let c = |x: f64, y: f64| Complex64::new(x, y);
        vec![
            (c(self.right, -self.height), c(self.right, -self.eta)),
            (c(self.right, -self.eta), c(self.left, -self.eta)),
            (c(self.left, -self.eta), c(self.left, self.eta)),
            (c(self.left, self.eta), c(self.right, self.eta)),
            (c(self.right, self.eta), c(self.right, self.height)),
        ]
    }
}

/// `-(1/2 pi i) int_C F ds` by adaptive Gauss-Kronrod on each piece of the contour.
pub fn mb_integral(ig: &MbIntegrand, contour: &ContourSpec, tol: f64) -> Result<Estimate> {
    let segs = contour.segments();
    let run = |tol_abs: f64, pieces: usize| -> Estimate {
        let mut total = Estimate { value: Complex64::zero(), error: 0.0, evaluations: 0 };
        for (a, b) in &segs {
            let (a, b) = (*a, *b);
            let est = integrate(|t| ig.eval(a + (b - a) * t) * (b - a), 0.0, 1.0, tol_abs / segs.len() as f64, pieces);
            total.value += est.value;
            total.error += est.error;
            total.evaluations += est.evaluations;
        }
        total
    };
    // tighten the absolute target until it is relative to the integral itself
    let mut pass = run(1e-6 * run(1e-3, 200).value.norm().max(1e-300), 4000);
    let mut evaluations = pass.evaluations;
    for _ in 0..3 {
        if pass.error <= tol * pass.value.norm() {
            break;
        }
        pass = run(0.25 * tol * pass.value.norm().max(1e-300), 20000);
        evaluations += pass.evaluations;
    }
    let est = Estimate { value: pass.value * (-1.0 / two_pi_i()), error: pass.error / (2.0 * PI), evaluations };
    if est.error > tol * est.value.norm().max(1e-300) {
        return Err(Error::QuadratureFailure { estimate: est.error / est.value.norm().max(1e-300), target: tol });
    }
    Ok(est)
}

#[derive(Clone, Debug)]
pub struct ResidueSum {
    pub value: Complex64,
    pub terms: usize,
    pub tail: f64,
}

fn radius_ratio(ig: &MbIntegrand, inside: bool) -> Result<f64> {
    let q = ig.modulus() / ig.radius;
    if (q - 1.0).abs() < 1e-3 {
        return Err(Error::SlowConvergence(format!("|y^e| / |c| = {q:.6} is on the conifold circle")));
    }
    if inside != (q < 1.0) {
        return Err(Error::OutsideConvergence { value: ig.modulus(), radius: ig.radius });
    }
    Ok(q)
}

const MAX_TERMS: usize = 200_000;

/// `sum_{k>=0} Res_{s=k} F`, valid for `|y^e| < |c|`.
pub fn right_residue_sum(ig: &MbIntegrand, tol: f64) -> Result<ResidueSum> {
    let q = radius_ratio(ig, true)?;
    let mut value = Complex64::zero();
    let mut small = 0;
    for k in 0..MAX_TERMS {
        let s = Complex64::new(k as f64, 0.0);
        let term = match ig.ln_ratio(s, None) {
            None => Complex64::zero(),
            Some(r) => (r + s * ig.ln_x).exp() * if k % 2 == 0 { 1.0 } else { -1.0 },
        };
        value += term;
        small = if term.norm() <= tol * value.norm() { small + 1 } else { 0 };
        if small >= 6 && k > 8 {
            return Ok(ResidueSum { value, terms: k + 1, tail: term.norm() * q / (1.0 - q) });
        }
    }
    Err(Error::SlowConvergence(format!("right residues after {MAX_TERMS} terms")))
}

/// Residue of `F` at `s = (a_j - n)/l_j`.
pub fn left_residue(ig: &MbIntegrand, j: usize, n: u64) -> Complex64 {
    let l = -ig.de[j] as f64;
    let s = (ig.a[j] - n as f64) / l;
    match ig.ln_ratio(s, Some(j)) {
        None => Complex64::zero(),
        Some(r) => {
            let ln_fact = ln_gamma(Complex64::new(n as f64 + 1.0, 0.0));
            let v = Complex64::new(PI.ln() - l.ln(), 0.0) - ln_sin_pi(s) - ln_fact + r + s * ig.ln_x;
            v.exp() * if n.is_multiple_of(2) { 1.0 } else { -1.0 }
        }
    }
}

/// `sum` of the residues of `F` at all left poles, valid for `|y^e| > |c|`.
pub fn left_residue_sum(ig: &MbIntegrand, tol: f64) -> Result<ResidueSum> {
    let q = radius_ratio(ig, false)?;
    let mut value = Complex64::zero();
    let mut terms = 0;
    let mut tail = 0.0;
    for (j, &de) in ig.de.iter().enumerate() {
        if de >= 0 {
            continue;
        }
        let l = -de as usize;
        let ratio = q.powf(-1.0 / l as f64);
        let mut family = Complex64::zero();
        let mut small = 0;
        let mut done = false;
        for n in 0..MAX_TERMS as u64 {
            let term = left_residue(ig, j, n);
            family += term;
            terms += 1;
            small = if term.norm() <= tol * family.norm() { small + 1 } else { 0 };
            if small >= 6 * l && n > 8 * l as u64 {
                tail += term.norm() * ratio / (1.0 - ratio);
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::SlowConvergence(format!("left residues of j = {} after {MAX_TERMS} terms", j + 1)));
        }
        value += family;
    }
    Ok(ResidueSum { value, terms, tail })
}

/// Closed-form connection coefficient for one aligned pair `f_- = f_+ + alpha e`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionFormula {
    pub w: i64,
    /// `D_{j_-} . e`.
    pub de_minus: i64,
    /// `U_{j_-}(delta_+)` and the offset `D_{j_-} . (f_+ - f_-)`.
    pub main: (LinearForm, Rat),
    /// For `j != j_-` with `D_j.e < 0`: numerator `(U_j(delta_+), D_j.f_+)`, denominator `(U_j(delta_-), D_j.f_-)`.
    pub sines: Vec<((LinearForm, Rat), (LinearForm, Rat))>,
}

impl ConnectionFormula {
    pub fn new(git: &GitData, wall: &WallData, dp: &Anticone, dm: &Anticone, j_minus: usize, f_plus: &[Rat], f_minus: &[Rat]) -> Result<ConnectionFormula> {
        let diff: QVec = f_plus.iter().zip(f_minus).map(|(a, b)| a - b).collect();
        let main = (u_at(git, dp, j_minus)?, git.pair(j_minus, &diff));
        let mut sines = Vec::new();
        for j in (0..git.m).filter(|&j| wall.de[j] < 0 && j != j_minus) {
            sines.push(((u_at(git, dp, j)?, git.pair(j, f_plus)), (u_at(git, dm, j)?, git.pair(j, f_minus))));
        }
        Ok(ConnectionFormula { w: wall.w, de_minus: wall.de[j_minus], main, sines })
    }

    pub fn from_pair(wc: &WallCrossing, cp: &ClassPair) -> Result<ConnectionFormula> {
        let dp = &wc.plus.minimal[cp.pair.plus];
        let dm = &wc.minus.minimal[cp.pair.minus];
        Self::new(&wc.git, &wc.wall, dp, dm, cp.pair.j_minus, &wc.plus.classes[cp.class_plus].f, &cp.f_minus)
    }

    /// Evaluates with `w` replaced by `w_override` when given.
    pub fn eval(&self, params: &EquivParams, w_override: Option<i64>) -> Complex64 {
        let tpi = two_pi_i();
        let arg = |(u, off): &(LinearForm, Rat)| params.eval(u) / tpi + to_f64(off);
        let w = w_override.unwrap_or(self.w) as f64;
        let l = -self.de_minus as f64;
        let a = arg(&self.main);
        let mut c = (Complex64::new(0.0, PI * w / self.de_minus as f64) * a).exp() * (a * PI).sin() / (l * (a * PI / l).sin());
        for (num, den) in &self.sines {
            c *= (arg(num) * PI).sin() / (arg(den) * PI).sin();
        }
        c
    }
}

impl fmt::Display for ConnectionFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arg = |(u, off): &(LinearForm, Rat)| {
            if off.is_zero() {
                format!("({u})/(2 pi i)")
            } else {
                format!("({u})/(2 pi i) + {}", rfmt(off))
            }
        };
        let a = arg(&self.main);
        let l = -self.de_minus;
        write!(f, "exp(pi i {}/({}) A) sin(pi A) / ({} sin(pi A/{}))", self.w, self.de_minus, l, l)?;
        for (num, den) in &self.sines {
            write!(f, " * sin(pi [{}]) / sin(pi [{}])", arg(num), arg(den))?;
        }
        write!(f, " where A = {a}")
    }
}

/// `a_j = U_j(delta_+)/2 pi i + D_j.d_+ + Lambda_j D` for all `j`.
pub fn slice_parameters(git: &GitData, u: &[Complex64], d: &[Rat], big_d: &[Rat]) -> Vec<Complex64> {
    (0..git.m)
        .map(|j| {
            let shift = git.pair(j, d) + if big_d.is_empty() { Rat::zero() } else { dot(&git.big_lambda[j], big_d) };
            u[j] / two_pi_i() + to_f64(&shift)
        })
        .collect()
}

/// `y^e` samples: modulus and the offset of `arg (y^+)^e` from `w pi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YSample {
    pub modulus: f64,
    pub phase: f64,
}

impl YSample {
    pub fn new(modulus: f64) -> YSample {
        YSample { modulus, phase: 0.0 }
    }

    pub fn log_y(&self, w: i64) -> Complex64 {
        Complex64::new(self.modulus.ln(), PI * w as f64 + self.phase)
    }
}

/// `l` with `l . e = log (y^+)^e` and the given logarithms along the wall basis.
pub fn sample_ell(wc: &WallCrossing, log_y: Complex64, wall_logs: &[Complex64]) -> Vec<Complex64> {
    let e = wc.wall.e_rat();
    let ee = to_f64(&dot(&e, &e));
    let mut ell: Vec<Complex64> = e.iter().map(|x| log_y * to_f64(x) / ee).collect();
    for (i, p) in wc.basis_plus.p.iter().take(wc.git.r - 1).enumerate() {
        let c = wall_logs.get(i).copied().unwrap_or(Complex64::new(0.5f64.ln(), 0.0));
        for (x, pk) in ell.iter_mut().zip(p) {
            *x += c * to_f64(pk);
        }
    }
    ell
}

/// Slices `d_+` of `delta_+^vee` in the class `f_+`: `0 <= D_{j_+}.d_+ + Lambda D < D_{j_+}.e`, and
/// the other indices of `delta_+` with total at most `wall_shell`.
pub fn plus_slices(git: &GitData, wall: &WallData, delta: &Anticone, j_plus: usize, f: &[Rat], big_d: &[Rat], wall_shell: u32) -> Vec<QVec> {
    let rows: QMat = delta.indices.iter().map(|&j| git.character(j)).collect();
    let minv = inverse(&rows).expect("independent characters");
    let ld = |j: usize| if big_d.is_empty() { Rat::zero() } else { dot(&git.big_lambda[j], big_d) };
    let others: Vec<usize> = delta.indices.iter().copied().filter(|&j| j != j_plus).collect();
    let mut out = Vec::new();
    let mut wall_ns = vec![Vec::new()];
    for _ in &others {
        wall_ns = wall_ns
            .into_iter()
            .flat_map(|v: Vec<i64>| {
                let used: i64 = v.iter().sum();
                (0..=(wall_shell as i64 - used)).map(move |x| {
                    let mut v = v.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    for wn in wall_ns {
        for nj in 0..wall.de[j_plus] {
            let rhs: QVec = delta
                .indices
                .iter()
                .map(|&j| {
                    let n = if j == j_plus { nj } else { wn[others.iter().position(|&o| o == j).unwrap()] };
                    rat_int(n) - ld(j)
                })
                .collect();
            let d = mat_vec(&minv, &rhs);
            if d.iter().zip(f).all(|(a, b)| is_integer(&(a - b))) {
                out.push(d);
            }
        }
    }
    out
}

/// One slice of the continued restriction and its matching minus-side terms.
#[derive(Clone, Debug)]
pub struct SliceCheck {
    pub d_plus: QVec,
    /// `exp(l.d_+ + sigma_+/2 pi i) K`.
    pub prefactor: Complex64,
    /// `prefactor * I` from the contour integral, when requested.
    pub mb: Option<Complex64>,
    pub mb_error: Option<f64>,
    /// `-prefactor * (left residue sum)`.
    pub residue: Complex64,
    /// `sum_t C_t exp(l.d_- + sigma_-/2 pi i) sum_k ...`.
    pub minus_side: Complex64,
    pub deviation: f64,
}

#[derive(Clone, Debug)]
pub struct ContinuationOptions {
    pub quad_tol: f64,
    pub series_tol: f64,
    pub w_override: Option<i64>,
    pub wall_shell: u32,
    pub quadrature: bool,
    pub gap: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        ContinuationOptions { quad_tol: 1e-9, series_tol: 1e-16, w_override: None, wall_shell: 1, quadrature: true, gap: 1e-4 }
    }
}

/// `sum_{k>=0} e^{-kL} / prod_j Gamma(1 + U_j(delta_-)/2 pi i + D_j.d_- - k D_j.e + Lambda_j D)`.
pub fn minus_slice_series(git: &GitData, wall: &WallData, fp: &FixedPoint, d: &[Rat], big_d: &[Rat], log_y: Complex64, tol: f64) -> Result<Complex64> {
    let a = slice_parameters(git, &fp.u, d, big_d);
    let mut value = Complex64::zero();
    let mut small = 0;
    for k in 0..MAX_TERMS {
        let mut ln = -log_y * k as f64;
        let mut zero = false;
        for (j, aj) in a.iter().enumerate() {
            let z = aj + 1.0 - (k as i64 * wall.de[j]) as f64;
            if is_pole(z) {
                zero = true;
                break;
            }
            ln -= ln_gamma(z);
        }
        let term = if zero { Complex64::zero() } else { ln.exp() };
        value += term;
        small = if term.norm() <= tol * value.norm() { small + 1 } else { 0 };
        if small >= 6 && k > 8 {
            return Ok(value);
        }
    }
    Err(Error::SlowConvergence("minus-side slice series".into()))
}

/// Checks one slice: the continued `k`-series against the matching minus-side series.
#[allow(clippy::too_many_arguments)]
pub fn slice_check(
    wc: &WallCrossing,
    params: &EquivParams,
    a: usize,
    j_plus: usize,
    d_plus: &[Rat],
    big_d: &[Rat],
    ell: &[Complex64],
    opts: &ContinuationOptions,
) -> Result<SliceCheck> {
    let git = &wc.git;
    let wall = &wc.wall;
    let dp = &wc.plus.minimal[a];
    let fp = FixedPoint::new(git, dp, d_plus, params, ell)?;
    let log_y = pair_c(ell, &wall.e_rat());
    let ig = MbIntegrand::new(slice_parameters(git, &fp.u, d_plus, big_d), wall.de.clone(), log_y, wall.w, to_f64(&wall.conifold).abs())?;
    let layout = classify_poles(&ig, opts.gap)?;
    let prefactor = (pair_c(ell, d_plus) + fp.sigma / two_pi_i()).exp() * ig.prefactor();
    let left = left_residue_sum(&ig, opts.series_tol)?;
    let residue = -prefactor * left.value;
    let (mb, mb_error) = if opts.quadrature {
        let est = mb_integral(&ig, &ContourSpec::for_layout(&ig, &layout), opts.quad_tol)?;
        (Some(prefactor * est.value), Some(est.error * prefactor.norm()))
    } else {
        (None, None)
    };
    // minus side: for each j_- in J_-, d_- = d_+ + alpha_t e with 0 <= D_{j_-}.d_- + Lambda D < l
    let e = wall.e_rat();
    let others: Vec<usize> = dp.indices.iter().copied().filter(|&j| j != j_plus).collect();
    let mut minus_side = Complex64::zero();
    for &j_minus in &wall.j_minus {
        let l = -wall.de[j_minus];
        let ld = if big_d.is_empty() { Rat::zero() } else { dot(&git.big_lambda[j_minus], big_d) };
        let djd = git.pair(j_minus, d_plus);
        let mut dm_idx = others.clone();
        dm_idx.push(j_minus);
        let dm = Anticone::new(dm_idx);
        let b = wc.minus.minimal.iter().position(|x| *x == dm).ok_or_else(|| Error::NotPaired(format!("{:?}", dm.labels())))?;
        let t0 = crate::rat::to_i64(&crate::rat::ceil(&-&ld));
        for t in t0..t0 + l {
            let alpha = (&djd - rat_int(t)) / rat_int(l);
            let d_minus: QVec = d_plus.iter().zip(&e).map(|(x, y)| x + &alpha * y).collect();
            if class_index(&wc.minus.classes, &d_minus).is_none() {
                return Err(Error::NotPaired(format!("slice class {:?} is not a K/L class", d_minus)));
            }
            let formula = ConnectionFormula::new(git, wall, dp, &wc.minus.minimal[b], j_minus, d_plus, &d_minus)?;
            let c = formula.eval(params, opts.w_override);
            let fm = FixedPoint::new(git, &wc.minus.minimal[b], &d_minus, params, ell)?;
            let series = minus_slice_series(git, wall, &fm, &d_minus, big_d, log_y, opts.series_tol)?;
            minus_side += c * (pair_c(ell, &d_minus) + fm.sigma / two_pi_i()).exp() * series;
        }
    }
    let scale = minus_side.norm().max(1.0);
    let mut deviation = (residue - minus_side).norm() / scale;
    if let Some(v) = mb {
        deviation = deviation.max((v - minus_side).norm() / scale);
    }
    Ok(SliceCheck { d_plus: d_plus.to_vec(), prefactor, mb, mb_error, residue, minus_side, deviation })
}

/// Gauss `2F1(a, b; c; z)` by its series, `|z| < 1`.
pub fn hyp2f1_series(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> Complex64 {
    assert!(z.norm() < 1.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for n in 0..100_000 {
        let nf = n as f64;
        term *= (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        sum += term;
        if term.norm() < 1e-18 * sum.norm() && n > 4 {
            break;
        }
    }
    sum
}

/// `2F1(a, b; c; z)` for `|z| > 1` from the `1/z` connection formula, with
/// `ln_mz = log(-z)` principal.
pub fn hyp2f1_outside(a: Complex64, b: Complex64, c: Complex64, ln_mz: Complex64) -> Complex64 {
    let zinv = (-ln_mz).exp() * -1.0;
    let t1 = gamma(c) * gamma(b - a) / (gamma(b) * gamma(c - a)) * (-a * ln_mz).exp() * hyp2f1_series(a, a - c + 1.0, a - b + 1.0, zinv);
    let t2 = gamma(c) * gamma(a - b) / (gamma(a) * gamma(c - b)) * (-b * ln_mz).exp() * hyp2f1_series(b, b - c + 1.0, b - a + 1.0, zinv);
    t1 + t2
}

/// The restriction at `delta_+ = {j_+}` for walls with `D.e = (1, 1, -1, -1)` up to order:
/// `exp(sigma/2 pi i) 2F1(-u_3, -u_4; 1 + u_1; Y) / (Gamma(1+u_1) Gamma(1+u_3) Gamma(1+u_4))`.
pub fn conifold_hypergeometric(wc: &WallCrossing, params: &EquivParams, a: usize, sample: &YSample) -> Result<Complex64> {
    let wall = &wc.wall;
    if wc.git.r != 1 || wall.de.iter().any(|x| x.abs() != 1) || wall.j_plus.len() != 2 || wall.j_minus.len() != 2 {
        return Err(Error::Validation { field: "characters".into(), message: "the 2F1 form needs a rank-one wall with D.e = +-1 on four characters".into() });
    }
    let delta = &wc.plus.minimal[a];
    let jp = delta.indices[0];
    let other = *wall.j_plus.iter().find(|&&j| j != jp).unwrap();
    let log_y = sample.log_y(wall.w);
    let ell = sample_ell(wc, log_y, &[]);
    let fp = FixedPoint::new(&wc.git, delta, &[Rat::zero()], params, &ell)?;
    let u: Vec<Complex64> = fp.u.iter().map(|x| x / two_pi_i()).collect();
    let (a1, b1, c1) = (-u[wall.j_minus[0]], -u[wall.j_minus[1]], u[other] + 1.0);
    let f = if sample.modulus < 1.0 {
        hyp2f1_series(a1, b1, c1, log_y.exp())
    } else {
        hyp2f1_outside(a1, b1, c1, log_y - Complex64::new(0.0, PI * wall.w as f64))
    };
    let pre = rgamma(c1) * rgamma(1.0 - a1) * rgamma(1.0 - b1);
    Ok((fp.sigma / two_pi_i()).exp() * pre * f)
}

#[derive(Clone, Debug, PartialEq)]
pub enum UhEntry {
    One,
    /// Index into `WallCrossing::class_pairs`.
    Coefficient(usize),
}

/// `U_H` over fixed data: rows on the `+` side, columns on the `-` side.
#[derive(Clone, Debug)]
pub struct TransformUH {
    pub rows: Vec<(usize, usize)>,
    pub cols: Vec<(usize, usize)>,
    /// `(row, column, entry)`.
    pub entries: Vec<(usize, usize, UhEntry)>,
}

pub fn build_u_h(wc: &WallCrossing) -> TransformUH {
    let rows = wc.plus.fixed.clone();
    let cols = wc.minus.fixed.clone();
    let mut entries = Vec::new();
    let common = wc.common();
    for (r, &(a, c)) in rows.iter().enumerate() {
        if let Some(&(_, b)) = common.iter().find(|(x, _)| *x == a) {
            let cm = class_index(&wc.minus.classes, &wc.plus.classes[c].f).expect("common fixed data share classes");
            let col = cols.iter().position(|&x| x == (b, cm)).expect("common fixed datum on the - side");
            entries.push((r, col, UhEntry::One));
            continue;
        }
        for (k, cp) in wc.class_pairs.iter().enumerate() {
            if cp.pair.plus == a && cp.class_plus == c {
                let col = cols.iter().position(|&x| x == (cp.pair.minus, cp.class_minus)).expect("paired fixed datum");
                entries.push((r, col, UhEntry::Coefficient(k)));
            }
        }
    }
    TransformUH { rows, cols, entries }
}

impl TransformUH {
    pub fn apply(&self, v: &[Complex64], coeff: &dyn Fn(usize) -> Complex64) -> Vec<Complex64> {
        let mut out = vec![Complex64::zero(); self.rows.len()];
        for (r, c, e) in &self.entries {
            let x = match e {
                UhEntry::One => Complex64::new(1.0, 0.0),
                UhEntry::Coefficient(k) => coeff(*k),
            };
            out[*r] += x * v[*c];
        }
        out
    }

    pub fn dense(&self, coeff: &dyn Fn(usize) -> Complex64) -> Vec<Vec<Complex64>> {
        let mut m = vec![vec![Complex64::zero(); self.cols.len()]; self.rows.len()];
        for (r, c, e) in &self.entries {
            m[*r][*c] = match e {
                UhEntry::One => Complex64::new(1.0, 0.0),
                UhEntry::Coefficient(k) => coeff(*k),
            };
        }
        m
    }
}

/// Theta-commutation for one wall class `p`: at every nonzero entry the two diagonal
/// values `theta_+(p)(delta_+)` and `theta_-(p)(delta_-)` agree exactly.
#[derive(Clone, Debug)]
pub struct ThetaCheck {
    pub p: QVec,
    pub entries: usize,
    pub mismatches: usize,
}

pub fn theta_commutation(wc: &WallCrossing, uh: &TransformUH) -> Result<Vec<ThetaCheck>> {
    let mut out = Vec::new();
    for p in wc.basis_plus.p.iter().take(wc.git.r - 1) {
        let mut mismatches = 0;
        for (r, c, _) in &uh.entries {
            let tp = theta_at(&wc.git, &wc.plus.minimal[uh.rows[*r].0], p)?;
            let tm = theta_at(&wc.git, &wc.minus.minimal[uh.cols[*c].0], p)?;
            if tp != tm {
                mismatches += 1;
            }
        }
        out.push(ThetaCheck { p: p.clone(), entries: uh.entries.len(), mismatches });
    }
    Ok(out)
}

/// Forms that must stay away from zero for the poles to be simple and `C` finite.
pub fn genericity_forms(wc: &WallCrossing) -> Result<Vec<LinearForm>> {
    let git = &wc.git;
    let mut forms = Vec::new();
    for side in [&wc.plus, &wc.minus] {
        for delta in &side.minimal {
            for j in (0..git.m).filter(|j| !delta.contains(*j)) {
                forms.push(u_at(git, delta, j)?);
            }
        }
    }
    for delta in &wc.plus.minimal {
        for (x, &i) in wc.wall.j_minus.iter().enumerate() {
            for &j in &wc.wall.j_minus[x + 1..] {
                let ui = u_at(git, delta, i)?.scale(&Rat::new(1.into(), (-wc.wall.de[i]).into()));
                let uj = u_at(git, delta, j)?.scale(&Rat::new(1.into(), (-wc.wall.de[j]).into()));
                forms.push(&ui - &uj);
            }
        }
    }
    forms.retain(|f| !f.is_zero());
    Ok(forms)
}

/// Seeded generic parameters: every genericity form is at least `2 pi 1e-4` away from zero.
pub fn generic_params(wc: &WallCrossing, draws: &mut Draws) -> Result<EquivParams> {
    let forms = genericity_forms(wc)?;
    Ok(draws.generic_without_base(wc.git.m, wc.git.h2_rank, &forms, 2.0 * PI * 1e-4))
}

/// One `(delta_+, f_+)` row of the theorem at one sample, for rank-one walls.
#[derive(Clone, Debug)]
pub struct TheoremRow {
    pub delta_plus: Vec<usize>,
    pub class_plus: QVec,
    pub sample: YSample,
    pub mb: Option<Complex64>,
    pub residue: Complex64,
    pub rhs: Complex64,
    pub pairs: usize,
    pub deviation: f64,
}

pub fn theorem_row(wc: &WallCrossing, params: &EquivParams, a: usize, c: usize, sample: &YSample, opts: &ContinuationOptions) -> Result<TheoremRow> {
    if wc.git.r != 1 {
        return Err(Error::Validation { field: "rank".into(), message: "full restrictions are summed for rank-one walls only".into() });
    }
    let git = &wc.git;
    let wall = &wc.wall;
    let log_y = sample.log_y(wall.w);
    let ell = sample_ell(wc, log_y, &[]);
    let delta = &wc.plus.minimal[a];
    let f = &wc.plus.classes[c].f;
    let jp = delta.indices[0];
    let mut mb = opts.quadrature.then(Complex64::zero);
    let mut residue = Complex64::zero();
    let big_d: QVec = Vec::new();
    for d_plus in plus_slices(git, wall, delta, jp, f, &big_d, 0) {
        let fp = FixedPoint::new(git, delta, &d_plus, params, &ell)?;
        let ig = MbIntegrand::new(slice_parameters(git, &fp.u, &d_plus, &big_d), wall.de.clone(), log_y, wall.w, to_f64(&wall.conifold).abs())?;
        let layout = classify_poles(&ig, opts.gap)?;
        let pre = (pair_c(&ell, &d_plus) + fp.sigma / two_pi_i()).exp() * ig.prefactor();
        residue -= pre * left_residue_sum(&ig, opts.series_tol)?.value;
        if let Some(v) = mb.as_mut() {
            *v += pre * mb_integral(&ig, &ContourSpec::for_layout(&ig, &layout), opts.quad_tol)?.value;
        }
    }
    let mut rhs = Complex64::zero();
    let pairs = wc.pairs_of(a, c);
    let radius = 1.0 / to_f64(&wall.conifold).abs();
    let minus_dir: QVec = wall.e_rat().iter().map(|x| -x).collect();
    for cp in &pairs {
        let coeff = ConnectionFormula::from_pair(wc, cp)?.eval(params, opts.w_override);
        let dm = &wc.minus.minimal[cp.pair.minus];
        let fm = FixedPoint::new(git, dm, &wc.minus.classes[cp.class_minus].f, params, &ell)?;
        let mode = Summation::Full { direction: minus_dir.clone(), radius, tol: opts.series_tol };
        rhs += coeff * restrict_h(git, &fm, &big_d, &ell, &mode)?.value;
    }
    let scale = rhs.norm().max(1.0);
    let mut deviation = (residue - rhs).norm() / scale;
    if let Some(v) = mb {
        deviation = deviation.max((v - rhs).norm() / scale);
    }
    Ok(TheoremRow { delta_plus: delta.labels(), class_plus: f.clone(), sample: *sample, mb, residue, rhs, pairs: pairs.len(), deviation })
}

/// Inside the radius: contour integral, right residues and the direct sum of the restriction.
#[derive(Clone, Debug)]
pub struct InsideRow {
    pub delta_plus: Vec<usize>,
    pub class_plus: QVec,
    pub sample: YSample,
    pub mb: Complex64,
    pub residue: Complex64,
    pub direct: Complex64,
    pub deviation: f64,
}

pub fn inside_row(wc: &WallCrossing, params: &EquivParams, a: usize, c: usize, sample: &YSample, opts: &ContinuationOptions) -> Result<InsideRow> {
    if wc.git.r != 1 {
        return Err(Error::Validation { field: "rank".into(), message: "full restrictions are summed for rank-one walls only".into() });
    }
    let git = &wc.git;
    let wall = &wc.wall;
    let log_y = sample.log_y(wall.w);
    let ell = sample_ell(wc, log_y, &[]);
    let delta = &wc.plus.minimal[a];
    let f = &wc.plus.classes[c].f;
    let big_d: QVec = Vec::new();
    let mut mb = Complex64::zero();
    let mut residue = Complex64::zero();
    for d_plus in plus_slices(git, wall, delta, delta.indices[0], f, &big_d, 0) {
        let fp = FixedPoint::new(git, delta, &d_plus, params, &ell)?;
        let ig = MbIntegrand::new(slice_parameters(git, &fp.u, &d_plus, &big_d), wall.de.clone(), log_y, wall.w, to_f64(&wall.conifold).abs())?;
        let layout = classify_poles(&ig, opts.gap)?;
        let pre = (pair_c(&ell, &d_plus) + fp.sigma / two_pi_i()).exp() * ig.prefactor();
        residue += pre * right_residue_sum(&ig, opts.series_tol)?.value;
        mb += pre * mb_integral(&ig, &ContourSpec::for_layout(&ig, &layout), opts.quad_tol)?.value;
    }
    let fp = FixedPoint::new(git, delta, f, params, &ell)?;
    let mode = Summation::Full { direction: wall.e_rat(), radius: to_f64(&wall.conifold).abs(), tol: opts.series_tol };
    let direct = restrict_h(git, &fp, &big_d, &ell, &mode)?.value;
    let scale = direct.norm().max(1.0);
    let deviation = ((mb - direct).norm().max((residue - direct).norm())) / scale;
    Ok(InsideRow { delta_plus: delta.labels(), class_plus: f.clone(), sample: *sample, mb, residue, direct, deviation })
}

/// Rows `(delta_+, f_+)` with `delta_+` not shared by the two sides.
pub fn crossing_rows(wc: &WallCrossing) -> Vec<(usize, usize)> {
    let common: Vec<usize> = wc.common().iter().map(|(a, _)| *a).collect();
    wc.plus.fixed.iter().copied().filter(|(a, _)| !common.contains(a)).collect()
}

/// `f_+ - f_-` class bookkeeping used by reports.
pub fn aligned_difference(cp: &ClassPair, f_plus: &[Rat]) -> QVec {
    normalize_class(&f_plus.iter().zip(&cp.f_minus).map(|(a, b)| a - b).collect::<QVec>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn flop() -> WallCrossing {
        let git = GitData::new(vec![vec![1], vec![1], vec![-1], vec![-1]]).unwrap();
        WallCrossing::new(git, &[rat_int(1)], &[rat_int(-1)]).unwrap()
    }

    fn c3z3() -> WallCrossing {
        let git = GitData::new(vec![vec![1], vec![1], vec![1], vec![-3]]).unwrap();
        WallCrossing::new(git, &[rat_int(1)], &[rat_int(-1)]).unwrap()
    }

    fn params(wc: &WallCrossing, seed: u64) -> EquivParams {
        generic_params(wc, &mut Draws::new(seed)).unwrap()
    }

    #[test]
    fn conifold_values() {
        assert_eq!(conifold_point(&flop().wall), rat_int(1));
        assert_eq!(conifold_point(&c3z3().wall), rat(-1, 27));
    }

    #[test]
    fn flop_pole_layout() {
        let wc = flop();
        let p = params(&wc, 3);
        let fp = FixedPoint::new(&wc.git, &wc.plus.minimal[1], &[rat_int(0)], &p, &[Complex64::zero()]).unwrap();
        let ig = MbIntegrand::new(slice_parameters(&wc.git, &fp.u, &[rat_int(0)], &[]), wc.wall.de.clone(), Complex64::new(0.0, PI), 1, 1.0).unwrap();
        let layout = classify_poles(&ig, 1e-4).unwrap();
        assert_eq!(layout.left.iter().map(|f| f.j).collect::<Vec<_>>(), vec![2, 3]);
        assert!(layout.vanishing_right);
        // zero parameters put every family on the real axis
        let zero = EquivParams::new(vec![Rat::zero(); 4], vec![]);
        let fp0 = FixedPoint::new(&wc.git, &wc.plus.minimal[1], &[rat_int(0)], &zero, &[Complex64::zero()]).unwrap();
        let ig0 = MbIntegrand::new(slice_parameters(&wc.git, &fp0.u, &[rat_int(0)], &[]), wc.wall.de.clone(), Complex64::new(0.0, PI), 1, 1.0).unwrap();
        assert!(matches!(classify_poles(&ig0, 1e-4), Err(Error::NonGenericParameters(_))));
    }

    #[test]
    fn domain_edge_is_rejected() {
        let s = YSample { modulus: 2.0, phase: PI };
        assert!(matches!(MbIntegrand::new(vec![], vec![], s.log_y(1), 1, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn flop_coefficient_instance() {
        // delta_+ = {2}, delta_- = {3}: C = e^{-pi i u} sin(pi v)/sin(pi v')
        let wc = flop();
        let p = params(&wc, 5);
        let cp = wc.class_pairs.iter().find(|cp| wc.plus.minimal[cp.pair.plus].labels() == vec![2] && wc.minus.minimal[cp.pair.minus].labels() == vec![3]).unwrap();
        let c = ConnectionFormula::from_pair(&wc, cp).unwrap().eval(&p, None);
        let l = p.lambda_c();
        let tpi = two_pi_i();
        let u = (l[1] + l[2]) / tpi;
        let v = (l[1] + l[3]) / tpi;
        let v2 = (l[3] - l[2]) / tpi;
        let expected = (-u * Complex64::new(0.0, PI)).exp() * (v * PI).sin() / (v2 * PI).sin();
        assert!((c - expected).norm() < 1e-12, "{c} {expected}");
    }

    #[test]
    fn flop_theorem_outside() {
        let wc = flop();
        let p = params(&wc, 11);
        let opts = ContinuationOptions::default();
        for &(a, c) in &crossing_rows(&wc) {
            for m in [1.5, 2.0, 4.0] {
                let row = theorem_row(&wc, &p, a, c, &YSample::new(m), &opts).unwrap();
                assert!(row.deviation < 1e-8, "{row:?}");
                let hyp = conifold_hypergeometric(&wc, &p, a, &YSample::new(m)).unwrap();
                assert!((hyp - row.rhs).norm() < 1e-8 * row.rhs.norm().max(1.0));
            }
        }
    }

    #[test]
    fn flipped_w_breaks_the_match() {
        let wc = flop();
        let p = params(&wc, 11);
        let opts = ContinuationOptions { w_override: Some(-wc.wall.w), quadrature: false, ..Default::default() };
        let row = theorem_row(&wc, &p, 0, 0, &YSample::new(2.0), &opts).unwrap();
        assert!(row.deviation > 1e-3);
    }

    #[test]
    fn inside_radius_agrees() {
        for wc in [flop(), c3z3()] {
            let p = params(&wc, 2);
            let radius = to_f64(&wc.wall.conifold).abs();
            for &(a, c) in &crossing_rows(&wc) {
                for t in [0.25, 0.5] {
                    let row = inside_row(&wc, &p, a, c, &YSample::new(t * radius), &ContinuationOptions::default()).unwrap();
                    assert!(row.deviation < 1e-9, "{row:?}");
                }
            }
        }
    }

    #[test]
    fn c3z3_theorem_outside() {
        let wc = c3z3();
        let p = params(&wc, 4);
        let opts = ContinuationOptions::default();
        for &(a, c) in &crossing_rows(&wc) {
            let row = theorem_row(&wc, &p, a, c, &YSample::new(2.0 / 27.0), &opts).unwrap();
            assert_eq!(row.pairs, 3);
            assert!(row.deviation < 1e-8, "{row:?}");
        }
    }

    #[test]
    fn coefficient_is_representative_independent() {
        let wc = c3z3();
        let p = params(&wc, 9);
        let e = wc.wall.e_rat();
        for cp in &wc.class_pairs {
            let dp = &wc.plus.minimal[cp.pair.plus];
            let dm = &wc.minus.minimal[cp.pair.minus];
            let fp = &wc.plus.classes[cp.class_plus].f;
            let base = ConnectionFormula::new(&wc.git, &wc.wall, dp, dm, cp.pair.j_minus, fp, &cp.f_minus).unwrap().eval(&p, None);
            let shifted_minus: QVec = cp.f_minus.iter().zip(&e).map(|(a, b)| a + b * rat_int(2)).collect();
            let both_plus: QVec = fp.iter().map(|x| x + rat_int(1)).collect();
            let both_minus: QVec = cp.f_minus.iter().map(|x| x + rat_int(1)).collect();
            for (f1, f2) in [(fp.clone(), shifted_minus), (both_plus, both_minus)] {
                let other = ConnectionFormula::new(&wc.git, &wc.wall, dp, dm, cp.pair.j_minus, &f1, &f2).unwrap().eval(&p, None);
                assert!((base - other).norm() < 1e-10 * base.norm().max(1.0));
            }
        }
    }

    fn rank2() -> WallCrossing {
        let git = GitData::new(vec![vec![1, 0], vec![1, 0], vec![1, 0], vec![-3, 1], vec![0, 1]]).unwrap();
        WallCrossing::new(git, &[rat_int(2), rat_int(1)], &[rat_int(-1), rat_int(1)]).unwrap()
    }

    #[test]
    fn rank2_theta_commutes_and_slices_match() {
        let wc = rank2();
        let uh = build_u_h(&wc);
        assert!(uh.entries.iter().any(|(_, _, e)| *e == UhEntry::One));
        let checks = theta_commutation(&wc, &uh).unwrap();
        assert_eq!(checks.len(), 1);
        assert!(checks.iter().all(|c| c.entries > 0 && c.mismatches == 0));
        let p = params(&wc, 6);
        let log_y = YSample::new(2.0 / 27.0).log_y(wc.wall.w);
        let ell = sample_ell(&wc, log_y, &[]);
        let opts = ContinuationOptions::default();
        let mut n = 0;
        for pair in &wc.pairs {
            let dp = &wc.plus.minimal[pair.plus];
            for &(_, c) in wc.plus.fixed.iter().filter(|(a, _)| *a == pair.plus) {
                for d in plus_slices(&wc.git, &wc.wall, dp, pair.j_plus, &wc.plus.classes[c].f, &[], 1) {
                    let chk = slice_check(&wc, &p, pair.plus, pair.j_plus, &d, &[], &ell, &opts).unwrap();
                    assert!(chk.deviation < 1e-8, "{chk:?}");
                    n += 1;
                }
            }
        }
        assert!(n >= 6);
    }

    #[test]
    fn base_degree_leaves_the_identity_intact() {
        let d: Vec<Vec<crate::rat::Int>> = [1, 1, -1, -1].iter().map(|&x| vec![crate::rat::int(x)]).collect();
        let lam = vec![vec![rat_int(1)], vec![rat_int(0)], vec![rat_int(0)], vec![rat_int(-1)]];
        let git = GitData::with_base(d, lam, 1).unwrap();
        let wc = WallCrossing::new(git, &[rat_int(1)], &[rat_int(-1)]).unwrap();
        let forms = genericity_forms(&wc).unwrap();
        let p = Draws::new(8).generic(4, 1, &forms, 2.0 * PI * 1e-4);
        let ell = sample_ell(&wc, YSample::new(3.0).log_y(wc.wall.w), &[]);
        let opts = ContinuationOptions::default();
        for big_d in [vec![rat_int(0)], vec![rat_int(1)], vec![rat_int(3)]] {
            for pair in &wc.pairs {
                let dp = &wc.plus.minimal[pair.plus];
                for d in plus_slices(&wc.git, &wc.wall, dp, pair.j_plus, &[rat_int(0)], &big_d, 0) {
                    let chk = slice_check(&wc, &p, pair.plus, pair.j_plus, &d, &big_d, &ell, &opts).unwrap();
                    assert!(chk.deviation < 1e-8, "{big_d:?} {chk:?}");
                }
            }
        }
    }

    #[test]
    fn flop_u_h_structure() {
        let wc = flop();
        let uh = build_u_h(&wc);
        assert_eq!((uh.rows.len(), uh.cols.len()), (2, 2));
        assert_eq!(uh.entries.len(), 4);
        let zero = uh.apply(&[Complex64::zero(); 2], &|_| Complex64::new(3.0, 1.0));
        assert!(zero.iter().all(|x| x.norm() == 0.0));
    }
}
