//! GIT data, anticones, chambers, walls, twisted sectors and adapted wall coordinates.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{cokernel_with_projection, dual_characters, integer_kernel, smith_normal_form, FgAbGroup, IntMatrix};
use crate::linalg::{coordinates, inverse, rank, QMat, QVec};
use crate::polyhedral::{extreme_rays, irredundant, ConeH, LexPoint};
use crate::rat::{ceil, dot, frac, from_int, int, is_integer, lcm_denominators, pow, primitive, Int, Rat};

#[derive(Clone, Debug, PartialEq)]
pub struct GitData {
    pub r: usize,
    pub m: usize,
    /// `m` characters of length `r`.
    pub d: Vec<Vec<Int>>,
    /// Base-class degrees `Lambda_j`, each of length `h2_rank` (zero when the base is a point).
    pub big_lambda: Vec<Vec<Rat>>,
    pub h2_rank: usize,
}

impl GitData {
    pub fn new(d: Vec<Vec<i64>>) -> Result<GitData> {
        Self::with_base(d.into_iter().map(|r| r.into_iter().map(int).collect()).collect(), Vec::new(), 0)
    }

    pub fn with_base(d: Vec<Vec<Int>>, big_lambda: Vec<Vec<Rat>>, h2_rank: usize) -> Result<GitData> {
        let m = d.len();
        let r = d.first().map_or(0, Vec::len);
        if m == 0 || r == 0 {
            return Err(Error::Validation { field: "characters".into(), message: "empty character list".into() });
        }
        if d.iter().any(|row| row.len() != r) {
            return Err(Error::Validation { field: "characters".into(), message: "ragged character list".into() });
        }
        let big_lambda = if big_lambda.is_empty() { vec![Vec::new(); m] } else { big_lambda };
        if big_lambda.len() != m || big_lambda.iter().any(|l| l.len() != h2_rank) {
            return Err(Error::Validation { field: "base.Lambda".into(), message: "expected m vectors of length H2_rank".into() });
        }
        let git = GitData { r, m, d, big_lambda, h2_rank };
        if rank(&git.d_rat()) != r {
            return Err(Error::Validation { field: "characters".into(), message: "characters do not have full rank".into() });
        }
        Ok(git)
    }

    pub fn character(&self, j: usize) -> QVec {
        self.d[j].iter().map(from_int).collect()
    }

    pub fn d_rat(&self) -> QMat {
        (0..self.m).map(|j| self.character(j)).collect()
    }

    pub fn d_matrix(&self) -> IntMatrix {
        IntMatrix::from_rows(self.d.clone(), self.r)
    }

    /// `D_j . v` for `v` in `L (x) Q`.
    pub fn pair(&self, j: usize, v: &[Rat]) -> Rat {
        dot(&self.character(j), v)
    }

    pub fn pair_int(&self, j: usize, v: &[Int]) -> Int {
        self.d[j].iter().zip(v).fold(Int::zero(), |acc, (a, b)| acc + a * b)
    }

    pub fn sum_characters(&self) -> QVec {
        let mut s = vec![Rat::zero(); self.r];
        for j in 0..self.m {
            for (k, x) in self.character(j).into_iter().enumerate() {
                s[k] += x;
            }
        }
        s
    }

    pub fn has_base(&self) -> bool {
        self.h2_rank > 0
    }
}

/// A subset of `[m]` (0-based) whose characters positively span the stability parameter.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Anticone {
    pub indices: Vec<usize>,
}

impl Anticone {
    pub fn new(mut indices: Vec<usize>) -> Anticone {
        indices.sort_unstable();
        indices.dedup();
        Anticone { indices }
    }

    pub fn contains(&self, j: usize) -> bool {
        self.indices.binary_search(&j).is_ok()
    }

    pub fn is_subset(&self, other: &Anticone) -> bool {
        self.indices.iter().all(|j| other.contains(*j))
    }

    /// 1-based labels, as printed in reports.
    pub fn labels(&self) -> Vec<usize> {
        self.indices.iter().map(|j| j + 1).collect()
    }
}

pub fn point(omega: &[Rat]) -> LexPoint {
    vec![omega.to_vec()]
}

pub fn anticones(git: &GitData, omega: &LexPoint) -> Result<Vec<Anticone>> {
    if omega.iter().all(|v| v.iter().all(Zero::is_zero)) {
        return Err(Error::DegenerateStability("stability parameter is zero".into()));
    }
    let chars = git.d_rat();
    let mut out = Vec::new();
    for mask in 1u64..(1u64 << git.m) {
        let idx: Vec<usize> = (0..git.m).filter(|j| mask >> j & 1 == 1).collect();
        let gens: QMat = idx.iter().map(|&j| chars[j].clone()).collect();
        let cone = ConeH::from_generators(&gens, git.r);
        if !cone.contains_relint_lex(omega) {
            continue;
        }
        if cone.dim() != git.r {
            return Err(Error::DegenerateStability(format!(
                "anticone {:?} does not span; the parameter lies on a wall",
                idx.iter().map(|j| j + 1).collect::<Vec<_>>()
            )));
        }
        out.push(Anticone::new(idx));
    }
    if !out.iter().any(|a| a.indices.len() == git.m) {
        return Err(Error::DegenerateStability("the parameter is outside the cone spanned by all characters".into()));
    }
    out.sort();
    Ok(out)
}

pub fn minimal_anticones(git: &GitData, all: &[Anticone]) -> Result<Vec<Anticone>> {
    let mut out: Vec<Anticone> =
        all.iter().filter(|a| !all.iter().any(|b| b != *a && b.is_subset(a))).cloned().collect();
    out.sort();
    for a in &out {
        let rows: QMat = a.indices.iter().map(|&j| git.character(j)).collect();
        if a.indices.len() != git.r || rank(&rows) != git.r {
            return Err(Error::DegenerateStability(format!("minimal anticone {:?} is not simplicial", a.labels())));
        }
    }
    Ok(out)
}

pub fn s_set(m: usize, all: &[Anticone]) -> Vec<usize> {
    (0..m)
        .filter(|&i| {
            let rest = Anticone::new((0..m).filter(|&j| j != i).collect());
            !all.contains(&rest)
        })
        .collect()
}

/// An open chamber as the interior of `{x : n . x >= 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Chamber {
    /// Irredundant inner facet normals, vectors in `L (x) Q`.
    pub normals: QMat,
    /// Extreme rays of the closure.
    pub rays: QMat,
}

impl Chamber {
    pub fn contains(&self, x: &[Rat]) -> bool {
        self.normals.iter().all(|n| dot(n, x).is_positive())
    }
}

pub fn chamber(git: &GitData, minimal: &[Anticone]) -> Chamber {
    let mut normals = Vec::new();
    for a in minimal {
        let gens: QMat = a.indices.iter().map(|&j| git.character(j)).collect();
        normals.extend(ConeH::from_generators(&gens, git.r).facets);
    }
    let mut normals = irredundant(&normals, git.r);
    normals.sort();
    let mut rays = extreme_rays(&normals, git.r);
    rays.sort();
    Chamber { normals, rays }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WallData {
    /// Integer basis of the wall hyperplane in `L^vee`.
    pub w_basis: Vec<Vec<Int>>,
    pub e: Vec<Int>,
    pub j_plus: Vec<usize>,
    pub j_minus: Vec<usize>,
    pub j_wall: Vec<usize>,
    /// `D_j . e` for every j.
    pub de: Vec<i64>,
    pub k: Vec<i64>,
    pub l: Vec<i64>,
    pub w: i64,
    pub conifold: Rat,
    /// Relative interior point of the wall face of the closed `+` chamber.
    pub omega0: QVec,
}

impl WallData {
    pub fn e_rat(&self) -> QVec {
        self.e.iter().map(from_int).collect()
    }

    pub fn in_wall(&self, p: &[Rat]) -> bool {
        dot(p, &self.e_rat()).is_zero()
    }
}

pub fn wall_between(git: &GitData, plus: &Chamber, minus: &Chamber) -> Result<WallData> {
    let n = plus
        .normals
        .iter()
        .find(|n| {
            let neg: QVec = n.iter().map(|x| -x).collect();
            minus.normals.contains(&neg)
        })
        .ok_or_else(|| Error::NotAdjacent("no facet of the + chamber is opposite a facet of the - chamber".into()))?;
    let e = primitive(n);
    let e_rat: QVec = e.iter().map(from_int).collect();
    let de: Vec<i64> = (0..git.m).map(|j| crate::rat::to_i64(&git.pair_int(j, &e))).collect();
    let total: i64 = de.iter().sum();
    if total != 0 {
        return Err(Error::NotCrepant(total.to_string()));
    }
    let j_plus: Vec<usize> = (0..git.m).filter(|&j| de[j] > 0).collect();
    let j_minus: Vec<usize> = (0..git.m).filter(|&j| de[j] < 0).collect();
    let j_wall: Vec<usize> = (0..git.m).filter(|&j| de[j] == 0).collect();
    let k: Vec<i64> = de.iter().map(|&x| x.max(0)).collect();
    let l: Vec<i64> = de.iter().map(|&x| (-x).max(0)).collect();
    let w_minus = -1 - j_minus.iter().map(|&j| de[j]).sum::<i64>();
    let w_plus = -1 + j_plus.iter().map(|&j| de[j]).sum::<i64>();
    debug_assert_eq!(w_minus, w_plus);
    let mut conifold = Rat::one();
    for &x in de.iter().filter(|&&x| x != 0) {
        conifold *= pow(&crate::rat::rat_int(x), x);
    }
    let w_basis = {
        let row = IntMatrix::from_rows(vec![e.clone()], git.r);
        let ker = integer_kernel(&row);
        (0..ker.cols()).map(|j| ker.column(j)).collect()
    };
    let mut omega0 = vec![Rat::zero(); git.r];
    for ray in plus.rays.iter().filter(|ray| dot(ray, &e_rat).is_zero()) {
        for (a, b) in omega0.iter_mut().zip(ray) {
            *a += b;
        }
    }
    Ok(WallData { w_basis, e, j_plus, j_minus, j_wall, de, k, l, w: w_minus, conifold, omega0 })
}

/// A class of `K/L` with its age and sector data.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct KClass {
    /// Representative with coordinates in `[0,1)`.
    pub f: QVec,
    pub age: Rat,
    pub i_f: Vec<usize>,
    pub box_element: Vec<Int>,
}

pub fn normalize_class(f: &[Rat]) -> QVec {
    f.iter().map(frac).collect()
}

pub fn k_classes(git: &GitData, minimal: &[Anticone], n: &FgAbGroup) -> Vec<KClass> {
    let mut reps: BTreeSet<QVec> = BTreeSet::new();
    for a in minimal {
        let m = IntMatrix::from_rows(a.indices.iter().map(|&j| git.d[j].clone()).collect(), git.r);
        let snf = smith_normal_form(&m);
        let s: Vec<Int> = (0..git.r).map(|i| snf.s.get(i, i).clone()).collect();
        let mut t = vec![Int::zero(); git.r];
        loop {
            let g: QVec = t.iter().zip(&s).map(|(ti, si)| Rat::new(ti.clone(), si.clone())).collect();
            let f: QVec = (0..git.r)
                .map(|i| (0..git.r).fold(Rat::zero(), |acc, k| acc + from_int(snf.v.get(i, k)) * &g[k]))
                .collect();
            reps.insert(normalize_class(&f));
            // odometer over t_i in [0, s_i)
            let mut i = 0;
            while i < git.r {
                t[i] += 1;
                if t[i] < s[i] {
                    break;
                }
                t[i] = Int::zero();
                i += 1;
            }
            if i == git.r {
                break;
            }
        }
    }
    reps.into_iter().map(|f| class_data(git, f, n)).collect()
}

pub fn class_data(git: &GitData, f: QVec, n: &FgAbGroup) -> KClass {
    let pairings: Vec<Rat> = (0..git.m).map(|j| git.pair(j, &f)).collect();
    let i_f: Vec<usize> = (0..git.m).filter(|&j| is_integer(&pairings[j])).collect();
    let age = pairings.iter().fold(Rat::zero(), |acc, x| acc + frac(x));
    let c: Vec<Int> = pairings.iter().map(|x| ceil(&-x)).collect();
    let box_element = n.project(&c);
    KClass { f, age, i_f, box_element }
}

/// `(delta, f)` pairs indexing torus-fixed sectors.
pub fn fixed_data(git: &GitData, minimal: &[Anticone], classes: &[KClass]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (a, delta) in minimal.iter().enumerate() {
        for (c, class) in classes.iter().enumerate() {
            if delta.indices.iter().all(|&j| is_integer(&git.pair(j, &class.f))) {
                out.push((a, c));
            }
        }
    }
    out
}

pub fn class_index(classes: &[KClass], f: &[Rat]) -> Option<usize> {
    let key = normalize_class(f);
    classes.iter().position(|c| c.f == key)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedStackyFan {
    pub n: FgAbGroup,
    /// Full images `b_i` (free coordinates, then torsion).
    pub b: Vec<Vec<Int>>,
    /// Free parts of `b_i`, the ray generators.
    pub rays: Vec<Vec<Int>>,
    /// Maximal cones as index sets of rays.
    pub cones: Vec<Vec<usize>>,
    pub s: Vec<usize>,
}

pub fn to_stacky_fan(git: &GitData, all: &[Anticone], minimal: &[Anticone]) -> Result<ExtendedStackyFan> {
    let n = cokernel_with_projection(&git.d_matrix());
    let b = n.generator_images();
    let rays = n.free_images();
    let s = s_set(git.m, all);
    let mut cones: Vec<Vec<usize>> = minimal
        .iter()
        .map(|a| (0..git.m).filter(|j| !a.contains(*j)).collect())
        .collect();
    cones.sort();
    for cone in &cones {
        let rows: QMat = cone.iter().map(|&i| rays[i].iter().map(from_int).collect()).collect();
        if !rows.is_empty() && rank(&rows) != rows.len() {
            return Err(Error::InvalidFan(format!("cone {:?} is not simplicial", cone)));
        }
    }
    let used: BTreeSet<usize> = cones.iter().flatten().copied().collect();
    for i in (0..git.m).filter(|i| !s.contains(i)) {
        if !used.contains(&i) {
            return Err(Error::InvalidFan(format!("ray {} lies in no cone", i + 1)));
        }
        for j in (0..git.m).filter(|j| *j > i && !s.contains(j)) {
            if same_ray(&rays[i], &rays[j]) {
                return Err(Error::InvalidFan(format!("rays {} and {} coincide", i + 1, j + 1)));
            }
        }
    }
    Ok(ExtendedStackyFan { n, b, rays, cones, s })
}

fn same_ray(a: &[Int], b: &[Int]) -> bool {
    let qa: QVec = a.iter().map(from_int).collect();
    let qb: QVec = b.iter().map(from_int).collect();
    !qa.iter().all(Zero::is_zero) && primitive(&qa) == primitive(&qb)
}

/// Recovers characters and a stability parameter from an extended stacky fan.
pub fn from_stacky_fan(esf: &ExtendedStackyFan) -> Result<(GitData, QVec)> {
    let m = esf.n.ambient_rank();
    let r = m - esf.n.free_rank;
    let d = dual_characters(&esf.n, r)?;
    let git = GitData::with_base(d.to_rows(), Vec::new(), 0)?;
    let minimal: Vec<Anticone> =
        esf.cones.iter().map(|c| Anticone::new((0..m).filter(|j| !c.contains(j)).collect())).collect();
    let ch = chamber(&git, &minimal);
    let mut omega = vec![Rat::zero(); r];
    for ray in &ch.rays {
        for (a, b) in omega.iter_mut().zip(ray) {
            *a += b;
        }
    }
    if !ch.contains(&omega) {
        return Err(Error::InvalidFan("the cones do not come from a chamber".into()));
    }
    Ok((git, omega))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedBasis {
    /// `p_1, ..., p_r` in `L^vee (x) Q`; the first `r-1` lie on the wall.
    pub p: QMat,
    pub sign: i8,
}

impl AdaptedBasis {
    /// Exponents `p_i . d` of `y^d`.
    pub fn exponents(&self, d: &[Rat]) -> QVec {
        self.p.iter().map(|p| dot(p, d)).collect()
    }

    /// Log-coordinates `l_i` with `L = sum l_i p_i`.
    pub fn log_coordinates(&self, big_l: &[Rat]) -> QVec {
        coordinates(&self.p, big_l).expect("adapted basis spans")
    }
}

/// Basis of the dual of the lattice spanned by `Z^r` and the given fractional vectors.
fn dual_overlattice(r: usize, extra: &[QVec]) -> QMat {
    let mut gens: QMat = (0..r)
        .map(|i| (0..r).map(|k| if i == k { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    gens.extend(extra.iter().cloned());
    let l = lcm_denominators(gens.iter().flatten());
    let lq = from_int(&l);
    let cols: Vec<Vec<Int>> = gens.iter().map(|g| g.iter().map(|x| (x * &lq).to_integer()).collect()).collect();
    let g = IntMatrix::from_columns(&cols, r);
    let snf = smith_normal_form(&g);
    let uinv = inverse(&snf.u.to_rat_rows()).expect("unimodular");
    // basis vectors as columns: uinv[:, j] * s_j / l
    let basis_cols: QMat = (0..r)
        .map(|j| (0..r).map(|i| &uinv[i][j] * from_int(snf.s.get(j, j)) / &lq).collect())
        .collect();
    let b = crate::linalg::transpose(&basis_cols);
    inverse(&b).expect("full rank overlattice")
}

fn adapted_from_dual(q: &QMat, e: &[Rat]) -> (QMat, QVec) {
    let r = q.len();
    let a: QVec = q.iter().map(|qi| dot(qi, e)).collect();
    let ai = primitive(&a);
    let row = IntMatrix::from_rows(vec![ai], r);
    let snf = smith_normal_form(&row);
    let combo = |j: usize| -> QVec {
        (0..q[0].len())
            .map(|k| (0..r).fold(Rat::zero(), |acc, i| acc + from_int(snf.v.get(i, j)) * &q[i][k]))
            .collect()
    };
    let wall: QMat = (1..r).map(combo).collect();
    (wall, combo(0))
}

pub fn adapted_coordinates(
    wall: &WallData,
    r: usize,
    classes_plus: &[KClass],
    classes_minus: &[KClass],
) -> Result<(AdaptedBasis, AdaptedBasis)> {
    let e = wall.e_rat();
    let fp: QMat = classes_plus.iter().map(|c| c.f.clone()).collect();
    let fm: QMat = classes_minus.iter().map(|c| c.f.clone()).collect();
    let (wall_p, off_p) = adapted_from_dual(&dual_overlattice(r, &fp), &e);
    let (wall_m, off_m) = adapted_from_dual(&dual_overlattice(r, &fm), &e);
    // both sides must induce the same lattice on the wall
    for (a, b) in [(&wall_p, &wall_m), (&wall_m, &wall_p)] {
        for v in a.iter() {
            match coordinates(b, v) {
                Some(c) if c.iter().all(is_integer) => {}
                _ => {
                    return Err(Error::NotAdjacent(
                        "the two sides induce different lattices on the wall".into(),
                    ))
                }
            }
        }
    }
    let fix_sign = |v: QVec, s: i8| -> QVec {
        let pe = dot(&v, &e);
        if (pe.is_positive() && s > 0) || (pe.is_negative() && s < 0) {
            v
        } else {
            v.into_iter().map(|x| -x).collect()
        }
    };
    let mut plus = wall_p.clone();
    plus.push(fix_sign(off_p, 1));
    let mut minus = wall_p;
    minus.push(fix_sign(off_m, -1));
    Ok((AdaptedBasis { p: plus, sign: 1 }, AdaptedBasis { p: minus, sign: -1 }))
}

/// `delta_+ | delta_-` with the distinguished indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnticonePair {
    pub plus: usize,
    pub minus: usize,
    pub j_plus: usize,
    pub j_minus: usize,
}

/// `(delta_+, f_+) | (delta_-, f_-)` with the aligned representative `f_- = f_+ + alpha e`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassPair {
    pub pair: AnticonePair,
    pub class_plus: usize,
    pub class_minus: usize,
    pub alpha: Rat,
    pub f_minus: QVec,
}

pub fn pair_anticones(git: &GitData, wall: &WallData, min_plus: &[Anticone], min_minus: &[Anticone]) -> Vec<AnticonePair> {
    let mut out = Vec::new();
    for (a, dp) in min_plus.iter().enumerate() {
        for (b, dm) in min_minus.iter().enumerate() {
            let common: Vec<usize> = dp.indices.iter().copied().filter(|j| dm.contains(*j)).collect();
            if common.len() + 1 != git.r || !common.iter().all(|&j| wall.de[j] == 0) {
                continue;
            }
            let jp = *dp.indices.iter().find(|j| !common.contains(j)).unwrap();
            let jm = *dm.indices.iter().find(|j| !common.contains(j)).unwrap();
            if wall.de[jp] > 0 && wall.de[jm] < 0 {
                out.push(AnticonePair { plus: a, minus: b, j_plus: jp, j_minus: jm });
            }
        }
    }
    out
}

pub fn pair_classes(
    git: &GitData,
    wall: &WallData,
    pairs: &[AnticonePair],
    fixed_plus: &[(usize, usize)],
    classes_plus: &[KClass],
    classes_minus: &[KClass],
) -> Vec<ClassPair> {
    let e = wall.e_rat();
    let mut out = Vec::new();
    for pair in pairs {
        let l = -wall.de[pair.j_minus];
        for &(_, c) in fixed_plus.iter().filter(|(a, _)| *a == pair.plus) {
            let fp = &classes_plus[c].f;
            let djf = git.pair(pair.j_minus, fp);
            for t in 0..l {
                let alpha = (&djf - crate::rat::rat_int(t)) / crate::rat::rat_int(l);
                let f_minus: QVec = fp.iter().zip(&e).map(|(x, y)| x + &alpha * y).collect();
                let class_minus = class_index(classes_minus, &f_minus).expect("paired class exists on the - side");
                out.push(ClassPair { pair: pair.clone(), class_plus: c, class_minus, alpha, f_minus });
            }
        }
    }
    out
}

/// Everything computed from one stability parameter.
#[derive(Clone, Debug)]
pub struct Side {
    pub omega: QVec,
    pub anticones: Vec<Anticone>,
    pub minimal: Vec<Anticone>,
    pub chamber: Chamber,
    pub classes: Vec<KClass>,
    /// `(minimal anticone index, class index)`.
    pub fixed: Vec<(usize, usize)>,
}

impl Side {
    pub fn new(git: &GitData, omega: &[Rat], n: &FgAbGroup) -> Result<Side> {
        let anticones = anticones(git, &point(omega))?;
        let minimal = minimal_anticones(git, &anticones)?;
        let chamber = chamber(git, &minimal);
        let classes = k_classes(git, &minimal, n);
        let fixed = fixed_data(git, &minimal, &classes);
        Ok(Side { omega: omega.to_vec(), anticones, minimal, chamber, classes, fixed })
    }

    /// Class index of `inv(f) = -f`.
    pub fn inverse_class(&self, c: usize) -> usize {
        let neg: QVec = self.classes[c].f.iter().map(|x| -x).collect();
        class_index(&self.classes, &neg).expect("K/L is closed under negation")
    }

    /// Basis of the dual of the lattice generated by `L` and the class representatives.
    pub fn dual_basis(&self, r: usize) -> QMat {
        let fs: QMat = self.classes.iter().map(|c| c.f.clone()).collect();
        dual_overlattice(r, &fs)
    }
}

/// A crepant wall crossing with both sides and their pairing.
#[derive(Clone, Debug)]
pub struct WallCrossing {
    pub git: GitData,
    pub n: FgAbGroup,
    pub plus: Side,
    pub minus: Side,
    pub wall: WallData,
    pub basis_plus: AdaptedBasis,
    pub basis_minus: AdaptedBasis,
    pub pairs: Vec<AnticonePair>,
    pub class_pairs: Vec<ClassPair>,
}

impl WallCrossing {
    pub fn new(git: GitData, omega_plus: &[Rat], omega_minus: &[Rat]) -> Result<WallCrossing> {
        let n = cokernel_with_projection(&git.d_matrix());
        let plus = Side::new(&git, omega_plus, &n)?;
        let minus = Side::new(&git, omega_minus, &n)?;
        let wall = wall_between(&git, &plus.chamber, &minus.chamber)?;
        let (basis_plus, basis_minus) = adapted_coordinates(&wall, git.r, &plus.classes, &minus.classes)?;
        let pairs = pair_anticones(&git, &wall, &plus.minimal, &minus.minimal);
        let class_pairs = pair_classes(&git, &wall, &pairs, &plus.fixed, &plus.classes, &minus.classes);
        Ok(WallCrossing { git, n, plus, minus, wall, basis_plus, basis_minus, pairs, class_pairs })
    }

    pub fn side(&self, plus: bool) -> &Side {
        if plus {
            &self.plus
        } else {
            &self.minus
        }
    }

    pub fn basis(&self, plus: bool) -> &AdaptedBasis {
        if plus {
            &self.basis_plus
        } else {
            &self.basis_minus
        }
    }

    /// Minimal anticones shared by both sides, as `(plus index, minus index)`.
    pub fn common(&self) -> Vec<(usize, usize)> {
        self.plus
            .minimal
            .iter()
            .enumerate()
            .filter_map(|(a, d)| self.minus.minimal.iter().position(|x| x == d).map(|b| (a, b)))
            .collect()
    }

    /// Class pairs whose `+` datum is `(delta_+, f_+)`.
    pub fn pairs_of(&self, a: usize, c: usize) -> Vec<&ClassPair> {
        self.class_pairs.iter().filter(|p| p.pair.plus == a && p.class_plus == c).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    fn setup(d: Vec<Vec<i64>>, omega: &[i64]) -> (GitData, Vec<Anticone>, Vec<Anticone>) {
        let git = GitData::new(d).unwrap();
        let w: QVec = omega.iter().map(|&x| rat_int(x)).collect();
        let all = anticones(&git, &point(&w)).unwrap();
        let min = minimal_anticones(&git, &all).unwrap();
        (git, all, min)
    }

    fn labels(a: &[Anticone]) -> Vec<Vec<usize>> {
        a.iter().map(Anticone::labels).collect()
    }

    #[test]
    fn p1_anticones() {
        let (_, all, min) = setup(vec![vec![1], vec![1]], &[1]);
        assert_eq!(labels(&all), vec![vec![1], vec![1, 2], vec![2]]);
        assert_eq!(labels(&min), vec![vec![1], vec![2]]);
        assert!(s_set(2, &all).is_empty());
    }

    #[test]
    fn flop_anticones() {
        let (_, all, min) = setup(vec![vec![1], vec![1], vec![-1], vec![-1]], &[1]);
        assert_eq!(all.len(), 12);
        assert!(all.iter().all(|a| a.contains(0) || a.contains(1)));
        assert_eq!(labels(&min), vec![vec![1], vec![2]]);
        let (_, all_m, min_m) = setup(vec![vec![1], vec![1], vec![-1], vec![-1]], &[-1]);
        assert_eq!(labels(&min_m), vec![vec![3], vec![4]]);
        assert!(s_set(4, &all).is_empty() && s_set(4, &all_m).is_empty());
    }

    #[test]
    fn zero_parameter_is_degenerate() {
        let git = GitData::new(vec![vec![1], vec![1]]).unwrap();
        assert!(matches!(anticones(&git, &point(&[rat_int(0)])), Err(Error::DegenerateStability(_))));
    }

    #[test]
    fn gerbe_s_set() {
        let (_, all, _) = setup(vec![vec![2]], &[1]);
        assert_eq!(s_set(1, &all), vec![0]);
    }

    #[test]
    fn flop_wall() {
        let git = GitData::new(vec![vec![1], vec![1], vec![-1], vec![-1]]).unwrap();
        let (_, _, mp) = setup(git.d.iter().map(|r| r.iter().map(crate::rat::to_i64).collect()).collect(), &[1]);
        let (_, _, mm) = setup(git.d.iter().map(|r| r.iter().map(crate::rat::to_i64).collect()).collect(), &[-1]);
        let cp = chamber(&git, &mp);
        let cm = chamber(&git, &mm);
        assert_eq!(cp.normals, vec![vec![rat_int(1)]]);
        assert_eq!(cm.normals, vec![vec![rat_int(-1)]]);
        let w = wall_between(&git, &cp, &cm).unwrap();
        assert_eq!(w.e, vec![int(1)]);
        assert_eq!(w.w, 1);
        assert_eq!(w.k, vec![1, 1, 0, 0]);
        assert_eq!(w.conifold, rat_int(1));
    }

    #[test]
    fn c3z3_wall_and_classes() {
        let d = vec![vec![1], vec![1], vec![1], vec![-3]];
        let (git, _, mp) = setup(d.clone(), &[1]);
        let (_, _, mm) = setup(d, &[-1]);
        let w = wall_between(&git, &chamber(&git, &mp), &chamber(&git, &mm)).unwrap();
        assert_eq!((w.e.clone(), w.w, w.conifold.clone()), (vec![int(1)], 2, rat(-1, 27)));
        let n = cokernel_with_projection(&git.d_matrix());
        let cm = k_classes(&git, &mm, &n);
        let fs: Vec<QVec> = cm.iter().map(|c| c.f.clone()).collect();
        assert_eq!(fs, vec![vec![rat_int(0)], vec![rat(1, 3)], vec![rat(2, 3)]]);
        let ages: Vec<Rat> = cm.iter().map(|c| c.age.clone()).collect();
        assert_eq!(ages, vec![rat_int(0), rat_int(1), rat_int(2)]);
        let cp = k_classes(&git, &mp, &n);
        assert_eq!(cp.len(), 1);
        let (bp, bm) = adapted_coordinates(&w, 1, &cp, &cm).unwrap();
        assert_eq!(bp.p, vec![vec![rat_int(1)]]);
        assert_eq!(bm.p, vec![vec![rat_int(-3)]]);
    }

    #[test]
    fn non_crepant_wall() {
        let d = vec![vec![1], vec![1], vec![-1], vec![-2]];
        let (git, _, mp) = setup(d.clone(), &[1]);
        let (_, _, mm) = setup(d, &[-1]);
        assert!(matches!(
            wall_between(&git, &chamber(&git, &mp), &chamber(&git, &mm)),
            Err(Error::NotCrepant(_))
        ));
    }

    #[test]
    fn flop_pairs() {
        let d = vec![vec![1], vec![1], vec![-1], vec![-1]];
        let (git, _, mp) = setup(d.clone(), &[1]);
        let (_, _, mm) = setup(d, &[-1]);
        let w = wall_between(&git, &chamber(&git, &mp), &chamber(&git, &mm)).unwrap();
        let pairs = pair_anticones(&git, &w, &mp, &mm);
        let got: Vec<(Vec<usize>, Vec<usize>)> =
            pairs.iter().map(|p| (mp[p.plus].labels(), mm[p.minus].labels())).collect();
        assert_eq!(
            got,
            vec![(vec![1], vec![3]), (vec![1], vec![4]), (vec![2], vec![3]), (vec![2], vec![4])]
        );
    }
}
