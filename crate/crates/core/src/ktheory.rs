//! Localized equivariant K-theory across a crepant wall.
//!
//! Classes are Laurent polynomials in `L(p)`, `S_i = R_i^{-1}` and a formal root `t`
//! with `t^l = R_{j_-}`. They are compared through the orbifold Chern character at
//! torus-fixed data, where every generator restricts to a root of unity times the
//! exponential of a linear form in the equivariant parameters.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::cohomology::{theta_at, u_at, LinearForm};
use crate::continuation::{build_u_h, ConnectionFormula};
use crate::cyclotomic::Cyclo;
use crate::error::{Error, Result};
use crate::fan::blowup_git;
use crate::git::{anticones, minimal_anticones, Anticone, GitData, WallCrossing, WallData};
use crate::lattice::{smith_normal_form, IntMatrix};
use crate::linalg::{inverse, QVec};
use crate::params::EquivParams;
use crate::rat::{dot, fmt as rfmt, from_int, is_integer, rat_int, to_i64, Rat};

/// The formal root `t`, `t^l = R_{j_-}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RootSpec {
    pub j_minus: usize,
    pub l: i64,
}

/// `L(p) prod_i S_i^{s_i} t^t`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KMono {
    pub p: QVec,
    pub s: Vec<i64>,
    pub t: i64,
}

/// A Laurent polynomial with rational coefficients in the generators of one side.
#[derive(Clone, Debug, PartialEq)]
pub struct KExpr {
    pub r: usize,
    pub m: usize,
    pub terms: BTreeMap<KMono, Rat>,
    pub root: Option<RootSpec>,
    /// `(1/l) sum_t` is applied on evaluation.
    pub averaged: bool,
}

impl KExpr {
    pub fn zero(r: usize, m: usize) -> KExpr {
        KExpr { r, m, terms: BTreeMap::new(), root: None, averaged: false }
    }

    pub fn monomial(r: usize, m: usize, mono: KMono, c: Rat) -> KExpr {
        let mut out = KExpr::zero(r, m);
        out.add_term(mono, c);
        out
    }

    pub fn one(r: usize, m: usize) -> KExpr {
        KExpr::monomial(r, m, KMono { p: vec![Rat::zero(); r], s: vec![0; m], t: 0 }, Rat::one())
    }

    pub fn line(r: usize, m: usize, p: &[Rat]) -> KExpr {
        KExpr::monomial(r, m, KMono { p: p.to_vec(), s: vec![0; m], t: 0 }, Rat::one())
    }

    /// `S_i^k`.
    pub fn s_pow(r: usize, m: usize, i: usize, k: i64) -> KExpr {
        let mut s = vec![0; m];
        s[i] = k;
        KExpr::monomial(r, m, KMono { p: vec![Rat::zero(); r], s, t: 0 }, Rat::one())
    }

    pub fn t_pow(r: usize, m: usize, root: RootSpec, n: i64) -> KExpr {
        let mut out = KExpr::monomial(r, m, KMono { p: vec![Rat::zero(); r], s: vec![0; m], t: n }, Rat::one());
        out.root = Some(root);
        out
    }

    /// `1 - S_i`.
    pub fn one_minus_s(r: usize, m: usize, i: usize) -> KExpr {
        KExpr::one(r, m).sub(&KExpr::s_pow(r, m, i, 1)).expect("same generators")
    }

    fn add_term(&mut self, mono: KMono, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(mono.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&mono);
        }
    }

    fn join_root(&self, o: &KExpr) -> Result<Option<RootSpec>> {
        match (self.root, o.root) {
            (Some(a), Some(b)) if a != b => Err(Error::IndexMismatch(format!("roots of R_{} and R_{}", a.j_minus + 1, b.j_minus + 1))),
            (a, b) => Ok(a.or(b)),
        }
    }

    pub fn add(&self, o: &KExpr) -> Result<KExpr> {
        let mut out = self.clone();
        out.root = self.join_root(o)?;
        out.averaged |= o.averaged;
        for (k, c) in &o.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, o: &KExpr) -> Result<KExpr> {
        self.add(&o.scale(&-Rat::one()))
    }

    pub fn scale(&self, c: &Rat) -> KExpr {
        let mut out = KExpr { terms: BTreeMap::new(), ..self.clone() };
        for (k, x) in &self.terms {
            out.add_term(k.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, o: &KExpr) -> Result<KExpr> {
        let mut out = KExpr::zero(self.r, self.m);
        out.root = self.join_root(o)?;
        out.averaged = self.averaged || o.averaged;
        for (a, ca) in &self.terms {
            for (b, cb) in &o.terms {
                let mono = KMono {
                    p: a.p.iter().zip(&b.p).map(|(x, y)| x + y).collect(),
                    s: a.s.iter().zip(&b.s).map(|(x, y)| x + y).collect(),
                    t: a.t + b.t,
                };
                out.add_term(mono, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn product(r: usize, m: usize, factors: &[KExpr]) -> Result<KExpr> {
        factors.iter().try_fold(KExpr::one(r, m), |acc, f| acc.mul(f))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Resolves `(1/l) sum_t t^n = [l | n] R_{j_-}^{n/l}`.
    pub fn average_roots(&self) -> KExpr {
        let Some(root) = self.root.filter(|_| self.averaged) else {
            return self.clone();
        };
        let mut out = KExpr::zero(self.r, self.m);
        for (mono, c) in &self.terms {
            if mono.t % root.l != 0 {
                continue;
            }
            let mut k = mono.clone();
            k.s[root.j_minus] -= mono.t / root.l;
            k.t = 0;
            out.add_term(k, c.clone());
        }
        out
    }
}

impl fmt::Display for KExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        if let (Some(root), true) = (self.root, self.averaged) {
            write!(f, "(1/{}) sum_{{t^{} = R{}}} [", root.l, root.l, root.j_minus + 1)?;
        }
        for (k, (mono, c)) in self.terms.iter().enumerate() {
            let mut factors = Vec::new();
            if mono.p.iter().any(|x| !x.is_zero()) {
                factors.push(format!("L({})", mono.p.iter().map(rfmt).collect::<Vec<_>>().join(",")));
            }
            for (i, &e) in mono.s.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("S{}", i + 1)),
                    _ => factors.push(format!("S{}^{}", i + 1, e)),
                }
            }
            match mono.t {
                0 => {}
                1 => factors.push("t".into()),
                e => factors.push(format!("t^{e}")),
            }
            let neg = *c < Rat::zero();
            let mag = if neg { -c } else { c.clone() };
            let sep = match (k, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            let body = if factors.is_empty() {
                rfmt(&mag)
            } else if mag.is_one() {
                factors.join(" ")
            } else {
                format!("{} {}", rfmt(&mag), factors.join(" "))
            };
            write!(f, "{sep}{body}")?;
        }
        if self.root.is_some() && self.averaged {
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// `sum_k c_k exp(form_k)` with cyclotomic coefficients; exponentials of distinct
/// forms are independent, so the zero test is exact.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KValue {
    pub terms: Vec<(LinearForm, Cyclo)>,
}

impl KValue {
    pub fn term(form: LinearForm, c: Cyclo) -> KValue {
        let mut v = KValue::default();
        v.add_term(form, c);
        v
    }

    fn add_term(&mut self, form: LinearForm, c: Cyclo) {
        if let Some(pos) = self.terms.iter().position(|(f, _)| *f == form) {
            self.terms[pos].1 = self.terms[pos].1.add(&c);
        } else {
            self.terms.push((form, c));
        }
    }

    pub fn add(&self, o: &KValue) -> KValue {
        let mut out = self.clone();
        for (f, c) in &o.terms {
            out.add_term(f.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &KValue) -> KValue {
        let mut out = self.clone();
        for (f, c) in &o.terms {
            out.add_term(f.clone(), c.neg());
        }
        out
    }

    pub fn mul(&self, o: &KValue) -> KValue {
        let mut out = KValue::default();
        for (f1, c1) in &self.terms {
            for (f2, c2) in &o.terms {
                out.add_term(f1 + f2, c1.mul(c2));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_zero())
    }

    pub fn eval(&self, params: &EquivParams) -> Complex64 {
        let lam = params.lambda_c();
        let h = params.h_c();
        self.terms.iter().map(|(f, c)| c.eval() * f.eval(&lam, &h).exp()).sum()
    }
}

/// Restriction data of one fixed point: `U_j(delta)` for all `j`.
struct PointData<'a> {
    git: &'a GitData,
    delta: &'a Anticone,
    f: &'a [Rat],
    u: Vec<LinearForm>,
}

impl<'a> PointData<'a> {
    fn new(git: &'a GitData, delta: &'a Anticone, f: &'a [Rat]) -> Result<Self> {
        let u = (0..git.m).map(|j| u_at(git, delta, j)).collect::<Result<Vec<_>>>()?;
        Ok(PointData { git, delta, f, u })
    }

    /// `ch~` of one monomial with `t` resolved by the phase `alpha` (`ch~ t = e^{2 pi i alpha} e^{U_{j_-}/l}`).
    fn mono(&self, mono: &KMono, c: &Rat, root: Option<(RootSpec, &Rat)>) -> Result<KValue> {
        let git = self.git;
        let mut phase = dot(&mono.p, self.f);
        let mut form = theta_at(git, self.delta, &mono.p)?;
        for (i, &s) in mono.s.iter().enumerate() {
            if s != 0 {
                phase -= rat_int(s) * git.pair(i, self.f);
                form = &form - &self.u[i].scale(&rat_int(s));
            }
        }
        if mono.t != 0 {
            let (spec, alpha) = root.ok_or_else(|| Error::UnresolvedRoot("t has no pairing rule at this fixed datum".into()))?;
            phase += rat_int(mono.t) * alpha;
            form = &form + &self.u[spec.j_minus].scale(&Rat::new(mono.t.into(), spec.l.into()));
        }
        Ok(KValue::term(form, Cyclo::root(c.clone(), phase)))
    }

    /// `alpha_tau = (D_{j_-}.f - tau)/l`.
    fn alpha(&self, spec: RootSpec, tau: i64) -> Rat {
        (self.git.pair(spec.j_minus, self.f) - rat_int(tau)) / rat_int(spec.l)
    }

    fn expr_at(&self, x: &KExpr, tau: Option<i64>) -> Result<KValue> {
        let alpha = match (x.root, tau) {
            (Some(spec), Some(tau)) => Some((spec, self.alpha(spec, tau))),
            _ => None,
        };
        let mut out = KValue::default();
        for (mono, c) in &x.terms {
            out = out.add(&self.mono(mono, c, alpha.as_ref().map(|(s, a)| (*s, a)))?);
        }
        Ok(out)
    }
}

/// `ch~(x)` restricted to `(delta, f)`.
pub fn orbifold_chern(git: &GitData, x: &KExpr, delta: &Anticone, f: &[Rat]) -> Result<KValue> {
    let pd = PointData::new(git, delta, f)?;
    match (x.root, x.averaged) {
        (Some(spec), true) => {
            let mut out = KValue::default();
            for tau in 0..spec.l {
                out = out.add(&pd.expr_at(x, Some(tau))?);
            }
            let inv_l = Cyclo::rational(Rat::new(1.into(), spec.l.into()));
            Ok(KValue { terms: out.terms.into_iter().map(|(f, c)| (f, c.mul(&inv_l))).collect() })
        }
        _ => pd.expr_at(x, None),
    }
}

/// `ch~(x)` with `t` fixed by `alpha_tau`, without averaging.
pub fn orbifold_chern_at_root(git: &GitData, x: &KExpr, delta: &Anticone, f: &[Rat], tau: i64) -> Result<KValue> {
    PointData::new(git, delta, f)?.expr_at(x, Some(tau))
}

/// `ch~(x)` at every fixed datum of one side.
pub fn localized_values(wc: &WallCrossing, plus: bool, x: &KExpr) -> Result<Vec<KValue>> {
    let side = wc.side(plus);
    side.fixed.iter().map(|&(a, c)| orbifold_chern(&wc.git, x, &side.minimal[a], &side.classes[c].f)).collect()
}

/// Lifts of the characters of `G_delta`: `p = c V^{-1}` with `0 <= c_k < s_k`, from `U M V = S`.
pub fn lifts(git: &GitData, delta: &Anticone) -> Vec<QVec> {
    let m = IntMatrix::from_rows(delta.indices.iter().map(|&j| git.d[j].clone()).collect(), git.r);
    let snf = smith_normal_form(&m);
    let v_inv = inverse(&snf.v.to_rat_rows()).expect("unimodular");
    let s: Vec<i64> = (0..git.r).map(|i| to_i64(snf.s.get(i, i)).abs()).collect();
    let mut out = Vec::new();
    let mut c = vec![0i64; git.r];
    loop {
        let p: QVec = (0..git.r).map(|k| (0..git.r).fold(Rat::zero(), |acc, i| acc + rat_int(c[i]) * &v_inv[i][k])).collect();
        out.push(p);
        let mut i = 0;
        while i < git.r {
            c[i] += 1;
            if c[i] < s[i] {
                break;
            }
            c[i] = 0;
            i += 1;
        }
        if i == git.r {
            break;
        }
    }
    out.sort();
    out
}

/// `e_{delta, rho} = L(rho^) prod_{i not in delta} (1 - S_i)`.
pub fn basis_element(git: &GitData, delta: &Anticone, lift: &[Rat]) -> KExpr {
    let (r, m) = (git.r, git.m);
    let mut x = KExpr::line(r, m, lift);
    for i in (0..m).filter(|i| !delta.contains(*i)) {
        x = x.mul(&KExpr::one_minus_s(r, m, i)).expect("no roots");
    }
    x
}

/// A character `L(p, n)` of the blow-up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlowupCharacter {
    pub p: QVec,
    pub n: Rat,
}

/// `f_-^* L_-(p) = L(p, 0)` and `f_+^* L_+(p) = L(p, -p.e)`.
pub fn pullback_character(wall: &WallData, p: &[Rat], plus: bool) -> BlowupCharacter {
    let n = if plus { -dot(p, &wall.e_rat()) } else { Rat::zero() };
    BlowupCharacter { p: p.to_vec(), n }
}

/// Exponent of `R~_{m+1}` in the pullback of `R_i`: `k_i` from the `-` side, `l_i` from the `+` side.
pub fn pullback_r_exponent(wall: &WallData, i: usize, plus: bool) -> i64 {
    if plus {
        wall.l[i]
    } else {
        wall.k[i]
    }
}

/// Pulls a class of one side back to the blow-up (`r + 1` coordinates, `m + 1` characters).
pub fn pullbacks_to_blowup(wall: &WallData, x: &KExpr, plus: bool) -> Result<KExpr> {
    if x.root.is_some() {
        return Err(Error::UnresolvedRoot("formal roots do not pull back".into()));
    }
    let (r, m) = (x.r, x.m);
    let mut out = KExpr::zero(r + 1, m + 1);
    for (mono, c) in &x.terms {
        let ch = pullback_character(wall, &mono.p, plus);
        let mut p = ch.p;
        p.push(ch.n);
        let mut s = mono.s.clone();
        let extra: i64 = mono.s.iter().enumerate().map(|(i, &e)| e * pullback_r_exponent(wall, i, plus)).sum();
        s.push(extra);
        out.add_term(KMono { p, s, t: 0 }, c.clone());
    }
    Ok(out)
}

/// `(f_+)_* (i_delta~)_* L(p, n) q(R~) = (1/l) sum_t L_+(p) t^{p.e + n} q(t^{-l_1} R_1, ..., t)`.
/// With `root = None` the blow-up is an isomorphism near the fixed point and `t = 1`.
pub fn pushpull_eval(wall: &WallData, x: &KExpr, root: Option<RootSpec>) -> Result<KExpr> {
    let (r, m) = (x.r - 1, x.m - 1);
    let e = wall.e_rat();
    let mut out = KExpr::zero(r, m);
    out.root = root;
    out.averaged = root.is_some();
    for (mono, c) in &x.terms {
        let p: QVec = mono.p[..r].to_vec();
        let shift = dot(&p, &e) + &mono.p[r];
        if !is_integer(&shift) {
            return Err(Error::IndexMismatch(format!("p.e + n = {} is not an integer", rfmt(&shift))));
        }
        // S~_i -> t^{l_i} S_i, S~_{m+1} -> t^{-1}
        let mut t = shift.to_integer().try_into().map_err(|_| Error::IndexMismatch("exponent overflow".into()))?;
        for i in 0..m {
            t += mono.s[i] * wall.l[i];
        }
        t -= mono.s[m];
        let t = if root.is_some() { t } else { 0 };
        out.add_term(KMono { p, s: mono.s[..m].to_vec(), t }, c.clone());
    }
    Ok(out)
}

/// The image of `e_{delta_-, rho}` on the `+` side.
#[derive(Clone, Debug)]
pub struct FmImage {
    pub delta_minus: usize,
    pub lift: QVec,
    pub common: bool,
    pub expr: KExpr,
}

/// `j_-` of a minimal anticone not shared with the `+` side.
pub fn negative_index(wall: &WallData, delta: &Anticone) -> Result<usize> {
    let neg: Vec<usize> = delta.indices.iter().copied().filter(|&j| wall.de[j] < 0).collect();
    match neg.as_slice() {
        [j] => Ok(*j),
        _ => Err(Error::IndexMismatch(format!("{:?} has {} indices with D.e < 0", delta.labels(), neg.len()))),
    }
}

pub fn fm_transform(wc: &WallCrossing, b: usize, lift: &[Rat]) -> Result<FmImage> {
    let git = &wc.git;
    let wall = &wc.wall;
    let (r, m) = (git.r, git.m);
    let delta = &wc.minus.minimal[b];
    let common = wc.plus.minimal.contains(delta);
    let e = basis_element(git, delta, lift);
    let expr = if common {
        pushpull_eval(wall, &pullbacks_to_blowup(wall, &e, false)?, None)?
    } else {
        let jm = negative_index(wall, delta)?;
        let l = -wall.de[jm];
        let root = RootSpec { j_minus: jm, l };
        let pe = dot(lift, &wall.e_rat());
        let mut factors = vec![KExpr::line(r, m, lift), KExpr::t_pow(r, m, root, to_i64(&pe.to_integer()))];
        // (1 - S_{j_-}) / (1 - t^{-1}) = sum_{a < l} t^{-a}
        let mut geo = KExpr::zero(r, m);
        for a in 0..l {
            geo = geo.add(&KExpr::t_pow(r, m, root, -a))?;
        }
        factors.push(geo);
        for i in (0..m).filter(|i| !delta.contains(*i)) {
            factors.push(KExpr::one(r, m).sub(&KExpr::t_pow(r, m, root, -wall.k[i]).mul(&KExpr::s_pow(r, m, i, 1))?)?);
        }
        let mut x = KExpr::product(r, m, &factors)?;
        x.averaged = true;
        x
    };
    Ok(FmImage { delta_minus: b, lift: lift.to_vec(), common, expr })
}

/// `L_+(rho^) t^{rho^.e} prod_{i not in delta_-} (1 - S_i t^{-D_i.e})`, the part of the image
/// that matches `e_{delta_-, rho}` under `f_- = f_+ + alpha e`.
pub fn matched_part(wc: &WallCrossing, b: usize, lift: &[Rat]) -> Result<KExpr> {
    let git = &wc.git;
    let wall = &wc.wall;
    let (r, m) = (git.r, git.m);
    let delta = &wc.minus.minimal[b];
    let jm = negative_index(wall, delta)?;
    let root = RootSpec { j_minus: jm, l: -wall.de[jm] };
    let pe = to_i64(&dot(lift, &wall.e_rat()).to_integer());
    let mut factors = vec![KExpr::line(r, m, lift), KExpr::t_pow(r, m, root, pe)];
    for i in (0..m).filter(|i| !delta.contains(*i)) {
        factors.push(KExpr::one(r, m).sub(&KExpr::t_pow(r, m, root, -wall.de[i]).mul(&KExpr::s_pow(r, m, i, 1))?)?);
    }
    KExpr::product(r, m, &factors)
}

/// Per basis element: the diagram deviation and the sub-checks.
#[derive(Clone, Debug)]
pub struct FmRow {
    pub delta_minus: Vec<usize>,
    pub lift: QVec,
    pub common: bool,
    pub image: String,
    /// `max |ch~ FM(e) - U_H ch~(e)|` over `+` fixed data.
    pub deviation: f64,
    /// Restrictions off the adjacent fixed data are exactly zero.
    pub support_exact: bool,
    pub support_max: f64,
    /// The matched part restricts to `ch~(e)` at the paired datum, exactly.
    pub matched_exact: Option<bool>,
    /// `max |prefactor - C|` over paired data.
    pub prefactor_max: Option<f64>,
    /// `FM(e) = e` as classes, and the blow-up restriction agrees.
    pub fixed_part: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct FmReport {
    pub rows: Vec<FmRow>,
    pub max_deviation: f64,
}

/// `C` override for negative controls: `(class pair index, shift)`.
pub type Perturbation = Option<(usize, f64)>;

pub fn verify_fm_diagram(wc: &WallCrossing, params: &EquivParams, perturb: Perturbation) -> Result<FmReport> {
    let git = &wc.git;
    let wall = &wc.wall;
    let uh = build_u_h(wc);
    let coeffs: Vec<Complex64> = wc
        .class_pairs
        .iter()
        .enumerate()
        .map(|(k, cp)| {
            let c = ConnectionFormula::from_pair(wc, cp)?.eval(params, None);
            Ok(match perturb {
                Some((j, d)) if j == k => c + d,
                _ => c,
            })
        })
        .collect::<Result<_>>()?;
    let blow = blowup_git(git, wall)?;
    let blow_min = minimal_anticones(&blow.0, &anticones(&blow.0, &blow.1)?)?;
    let mut blow_params = params.clone();
    blow_params.lambda.push(Rat::zero());
    let mut rows = Vec::new();
    for (b, delta) in wc.minus.minimal.iter().enumerate() {
        for lift in lifts(git, delta) {
            let e = basis_element(git, delta, &lift);
            let minus_vals: Vec<Complex64> = localized_values(wc, false, &e)?.iter().map(|v| v.eval(params)).collect();
            let rhs = uh.apply(&minus_vals, &|k| coeffs[k]);
            let fm = fm_transform(wc, b, &lift)?;
            let lhs_exact = localized_values(wc, true, &fm.expr)?;
            let mut deviation = 0.0f64;
            let mut support_exact = true;
            let mut support_max = 0.0f64;
            for (row, &(a, _)) in wc.plus.fixed.iter().enumerate() {
                let v = lhs_exact[row].eval(params);
                deviation = deviation.max((v - rhs[row]).norm());
                let adjacent = wc.plus.minimal[a] == *delta || wc.pairs.iter().any(|p| p.plus == a && p.minus == b);
                if !adjacent {
                    support_exact &= lhs_exact[row].is_zero();
                    support_max = support_max.max(v.norm());
                }
            }
            let (mut matched_exact, mut prefactor_max, mut fixed_part) = (None, None, None);
            if fm.common {
                let same = fm.expr.sub(&e)?.is_zero();
                // restriction of f_-^* e at delta~ = delta + {m+1} against e on the + side
                let pulled = pullbacks_to_blowup(wall, &e, false)?;
                let mut dt = delta.indices.clone();
                dt.push(git.m);
                let dt = Anticone::new(dt);
                let mut agree = blow_min.contains(&dt);
                for &(a, c) in wc.plus.fixed.iter().filter(|(a, _)| wc.plus.minimal[*a] == *delta) {
                    let f = &wc.plus.classes[c].f;
                    let mut ft = f.clone();
                    ft.push(Rat::zero());
                    let up = orbifold_chern(&blow.0, &pulled, &dt, &ft)?.eval(&blow_params);
                    let down = orbifold_chern(git, &e, &wc.plus.minimal[a], f)?.eval(params);
                    agree &= (up - down).norm() <= 1e-12 * down.norm().max(1.0);
                }
                fixed_part = Some(same && agree);
            } else {
                let jm = negative_index(wall, delta)?;
                let l = -wall.de[jm];
                let matched = matched_part(wc, b, &lift)?;
                let mut exact = true;
                let mut pmax = 0.0f64;
                for pair in wc.pairs.iter().filter(|p| p.minus == b) {
                    let dp = &wc.plus.minimal[pair.plus];
                    for &(_, c) in wc.plus.fixed.iter().filter(|(a, _)| *a == pair.plus) {
                        let fp = &wc.plus.classes[c].f;
                        let pd = PointData::new(git, dp, fp)?;
                        for tau in 0..l {
                            let spec = RootSpec { j_minus: jm, l };
                            let alpha = pd.alpha(spec, tau);
                            let fm_: QVec = fp.iter().zip(wall.e_rat()).map(|(x, y)| x + &alpha * y).collect();
                            let q = pd.expr_at(&matched, Some(tau))?;
                            let target = orbifold_chern(git, &e, delta, &fm_)?;
                            exact &= q.sub(&target).is_zero();
                            let pre = prefactor_value(wc, &pd, spec, tau, params)?;
                            let c = ConnectionFormula::new(git, wall, dp, delta, jm, fp, &fm_)?.eval(params, None);
                            pmax = pmax.max((pre - c).norm());
                        }
                    }
                }
                matched_exact = Some(exact);
                prefactor_max = Some(pmax);
            }
            rows.push(FmRow {
                delta_minus: delta.labels(),
                lift: lift.clone(),
                common: fm.common,
                image: fm.expr.average_roots().to_string(),
                deviation,
                support_exact,
                support_max,
                matched_exact,
                prefactor_max,
                fixed_part,
            });
        }
    }
    let max_deviation = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(FmReport { rows, max_deviation })
}

/// `(1/l) (sum_{a<l} t^{-a}) prod_{D_i.e<0, i != j_-} (1 - S_i) / (1 - S_i t^{l_i})` at one root.
fn prefactor_value(wc: &WallCrossing, pd: &PointData, spec: RootSpec, tau: i64, params: &EquivParams) -> Result<Complex64> {
    let (r, m) = (wc.git.r, wc.git.m);
    let val = |x: &KExpr| -> Result<Complex64> { Ok(pd.expr_at(x, Some(tau))?.eval(params)) };
    let mut geo = Complex64::zero();
    for a in 0..spec.l {
        geo += val(&KExpr::t_pow(r, m, spec, -a))?;
    }
    let mut out = geo / spec.l as f64;
    for i in (0..m).filter(|&i| wc.wall.de[i] < 0 && i != spec.j_minus) {
        let s = val(&KExpr::s_pow(r, m, i, 1))?;
        let t = val(&KExpr::t_pow(r, m, spec, wc.wall.l[i]))?;
        out *= (Complex64::new(1.0, 0.0) - s) / (Complex64::new(1.0, 0.0) - s * t);
    }
    Ok(out)
}

/// Characters `L(D~_i)` of the blow-up agree with the pullback rule.
pub fn pullback_consistent(git: &GitData, wall: &WallData) -> Result<bool> {
    let (tilde, _) = blowup_git(git, wall)?;
    Ok((0..git.m).all(|i| {
        let mut expected: QVec = git.character(i);
        // f_-^* R_i = R~_i R~_{m+1}^{k_i}: L(D_i, 0) = L(D~_i) + k_i (0, 1)
        expected.push(Rat::zero());
        let mut got: QVec = tilde.d[i].iter().map(from_int).collect();
        got[git.r] += rat_int(pullback_r_exponent(wall, i, false));
        let minus_ok = got == expected;
        let plus = pullback_character(wall, &git.character(i), true);
        let mut got: QVec = tilde.d[i].iter().map(from_int).collect();
        got[git.r] += rat_int(pullback_r_exponent(wall, i, true));
        let mut expected = plus.p;
        expected.push(plus.n);
        minus_ok && got == expected
    }))
}
