use num_complex::Complex64;
use num_traits::{One, Zero};
use proptest::prelude::*;

use toricwall::cohomology::{theta_at, verify_div_lemma, y_degrees};
use toricwall::continuation::{generic_params, ConnectionFormula};
use toricwall::fan::{star_subdivision, Fan};
use toricwall::gamma::gamma;
use toricwall::git::{from_stacky_fan, s_set, to_stacky_fan, GitData, Side, WallCrossing};
use toricwall::io::{example, ProblemFile};
use toricwall::ktheory::{orbifold_chern, KExpr, KMono};
use toricwall::lattice::{cokernel_with_projection, smith_normal_form, IntMatrix};
use toricwall::params::Draws;
use toricwall::rat::{floor, frac, from_int, int, is_integer, rat, rat_int, Rat};

fn int_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-9i64..=9, c), r))
}

/// Rank-one crepant walls: characters with both signs summing to zero.
fn crepant_rank_one() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(prop_oneof![1i64..=3, -3i64..=-1], 3..=5)
        .prop_filter("crepant with both signs", |v| v.iter().sum::<i64>() == 0 && v.iter().any(|x| *x > 0) && v.iter().any(|x| *x < 0))
}

fn rank_one_wall(d: &[i64]) -> WallCrossing {
    let git = GitData::new(d.iter().map(|&x| vec![x]).collect()).unwrap();
    WallCrossing::new(git, &[rat_int(1)], &[rat_int(-1)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smith_form_is_a_factorization(rows in int_matrix()) {
        let a = IntMatrix::from_i64(&rows);
        let snf = smith_normal_form(&a);
        prop_assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.s.clone());
        let d = snf.invariant_factors();
        for w in d.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        let coker = cokernel_with_projection(&a);
        let torsion: Vec<_> = d.iter().filter(|x| !x.is_one()).cloned().map(|x| if x < int(0) { -x } else { x }).collect();
        prop_assert_eq!(coker.torsion, torsion);
    }

    #[test]
    fn fractional_part_splits(n in -10_000i64..10_000, d in 1i64..500) {
        let x = rat(n, d);
        let f = frac(&x);
        prop_assert!(f >= Rat::zero() && f < Rat::one());
        prop_assert_eq!(from_int(&floor(&x)) + f, x);
    }

    #[test]
    fn rank_one_wall_invariants(d in crepant_rank_one()) {
        let wc = rank_one_wall(&d);
        prop_assert_eq!(wc.wall.de.iter().sum::<i64>(), 0);
        let wp = -1 + wc.wall.j_plus.iter().map(|&j| wc.wall.de[j]).sum::<i64>();
        let wm = -1 - wc.wall.j_minus.iter().map(|&j| wc.wall.de[j]).sum::<i64>();
        prop_assert_eq!(wp, wc.wall.w);
        prop_assert_eq!(wm, wc.wall.w);
        for side in [&wc.plus, &wc.minus] {
            let s = s_set(wc.git.m, &side.anticones);
            for a in &side.anticones {
                prop_assert!(s.iter().all(|j| a.contains(*j)));
            }
            for delta in &side.minimal {
                prop_assert_eq!(delta.indices.len(), wc.git.r);
            }
            for (c, k) in side.classes.iter().enumerate() {
                let inv = &side.classes[side.inverse_class(c)];
                let fractional = (0..wc.git.m).filter(|&j| !is_integer(&wc.git.pair(j, &k.f))).count();
                prop_assert_eq!(&k.age + &inv.age, rat_int(fractional as i64));
            }
        }
    }

    #[test]
    fn restriction_lemma_holds_with_base_degrees(d in crepant_rank_one(), lam in prop::collection::vec(-2i64..=2, 5)) {
        let git = GitData::new(d.iter().map(|&x| vec![x]).collect()).unwrap();
        let big: Vec<Vec<Rat>> = (0..git.m).map(|j| vec![rat_int(lam[j])]).collect();
        let git = GitData::with_base(git.d.clone(), big, 1).unwrap();
        let wc = WallCrossing::new(git, &[rat_int(1)], &[rat_int(-1)]).unwrap();
        let checks = verify_div_lemma(&wc, &[]).unwrap();
        prop_assert!(!checks.is_empty());
        prop_assert!(checks.iter().all(|c| c.pass));
    }

    #[test]
    fn fan_round_trip_preserves_anticones(d in crepant_rank_one()) {
        let wc = rank_one_wall(&d);
        for side in [&wc.plus, &wc.minus] {
            let esf = to_stacky_fan(&wc.git, &side.anticones, &side.minimal).unwrap();
            let (g2, w2) = from_stacky_fan(&esf).unwrap();
            let back = Side::new(&g2, &w2, &cokernel_with_projection(&g2.d_matrix())).unwrap();
            prop_assert_eq!(&back.anticones, &side.anticones);
        }
    }

    #[test]
    fn theta_is_linear(d in crepant_rank_one(), p in -5i64..5, q in -5i64..5) {
        let wc = rank_one_wall(&d);
        for delta in wc.plus.minimal.iter().chain(&wc.minus.minimal) {
            let a = theta_at(&wc.git, delta, &[rat_int(p)]).unwrap();
            let b = theta_at(&wc.git, delta, &[rat_int(q)]).unwrap();
            let ab = theta_at(&wc.git, delta, &[rat_int(p + q)]).unwrap();
            prop_assert_eq!(&a + &b, ab);
            // sum_j D_j . e theta(D_j) = theta(sum_j (D_j . e) D_j) at every point
            let mut lhs = theta_at(&wc.git, delta, &[Rat::zero()]).unwrap();
            let mut total = Rat::zero();
            for j in 0..wc.git.m {
                let dj = wc.git.character(j);
                lhs = &lhs + &theta_at(&wc.git, delta, &dj).unwrap().scale(&rat_int(wc.wall.de[j]));
                total += &dj[0] * rat_int(wc.wall.de[j]);
            }
            prop_assert_eq!(lhs, theta_at(&wc.git, delta, &[total]).unwrap());
        }
    }

    #[test]
    fn grading_solves_exactly(d in crepant_rank_one()) {
        let wc = rank_one_wall(&d);
        for plus in [true, false] {
            let basis = &wc.basis(plus).p;
            let deg = y_degrees(&wc.git, basis).unwrap();
            let mut sum = vec![Rat::zero(); wc.git.r];
            for (dk, p) in deg.iter().zip(basis) {
                for (s, x) in sum.iter_mut().zip(p) {
                    *s += dk * x;
                }
            }
            let two_d: Vec<Rat> = wc.git.sum_characters().iter().map(|x| x * rat_int(2)).collect();
            prop_assert_eq!(sum, two_d);
        }
    }

    #[test]
    fn gamma_reflection(x in -0.9f64..0.9) {
        prop_assume!(x.abs() > 1e-6);
        let lhs = gamma(Complex64::new(1.0 + x, 0.0)) * gamma(Complex64::new(1.0 - x, 0.0));
        let rhs = std::f64::consts::PI * x / (std::f64::consts::PI * x).sin();
        prop_assert!((lhs.re - rhs).abs() < 1e-10 && lhs.im.abs() < 1e-12);
    }

    #[test]
    fn coefficient_ignores_integer_shifts_of_the_pair(seed in 0u64..500, k in -3i64..=3) {
        let wc = example("c3z3").unwrap().wall_crossing().unwrap();
        let params = generic_params(&wc, &mut Draws::new(seed)).unwrap();
        let e = wc.wall.e_rat();
        for cp in &wc.class_pairs {
            let fp = &wc.plus.classes[cp.class_plus].f;
            let shifted: Vec<Rat> = cp.f_minus.iter().zip(&e).map(|(x, y)| x + rat_int(k) * y).collect();
            let dp = &wc.plus.minimal[cp.pair.plus];
            let dm = &wc.minus.minimal[cp.pair.minus];
            let base = ConnectionFormula::new(&wc.git, &wc.wall, dp, dm, cp.pair.j_minus, fp, &cp.f_minus).unwrap().eval(&params, None);
            let moved = ConnectionFormula::new(&wc.git, &wc.wall, dp, dm, cp.pair.j_minus, fp, &shifted).unwrap().eval(&params, None);
            prop_assert!((base - moved).norm() <= 1e-10 * base.norm().max(1.0), "{} vs {}", base, moved);
        }
    }

    #[test]
    fn chern_character_is_multiplicative(
        a in prop::collection::vec((-2i64..=2, 0i64..=2, 0i64..=2, -3i64..=3), 1..4),
        b in prop::collection::vec((-2i64..=2, 0i64..=2, 0i64..=2, -3i64..=3), 1..4),
    ) {
        let wc = example("c3z3").unwrap().wall_crossing().unwrap();
        let (r, m) = (wc.git.r, wc.git.m);
        let build = |terms: &[(i64, i64, i64, i64)]| {
            let mut x = KExpr::zero(r, m);
            for &(p, s0, s3, c) in terms {
                let mono = KMono { p: vec![rat_int(p)], s: vec![s0, 0, 0, s3], t: 0 };
                x = x.add(&KExpr::monomial(r, m, mono, rat_int(c))).unwrap();
            }
            x
        };
        let (x, y) = (build(&a), build(&b));
        let xy = x.mul(&y).unwrap();
        for side in [&wc.plus, &wc.minus] {
            for &(d, c) in &side.fixed {
                let f = &side.classes[c].f;
                let delta = &side.minimal[d];
                let lhs = orbifold_chern(&wc.git, &xy, delta, f).unwrap();
                let rhs = orbifold_chern(&wc.git, &x, delta, f).unwrap().mul(&orbifold_chern(&wc.git, &y, delta, f).unwrap());
                prop_assert!(lhs.sub(&rhs).is_zero());
            }
        }
    }

    #[test]
    fn explicit_lambda_round_trips(vals in prop::collection::vec((-50i64..50, 1i64..20), 4), seed in any::<u64>()) {
        let lambda: Vec<String> = vals.iter().map(|(n, d)| format!("\"{n}/{d}\"")).collect();
        let text = format!(
            r#"{{"schema": 1, "rank": 1, "characters": [[1], [1], [-1], [-1]], "omega_plus": [1], "omega_minus": [-1], "lambda": [{}], "seed": {seed}}}"#,
            lambda.join(", ")
        );
        let p = ProblemFile::parse_str(&text).unwrap();
        prop_assert_eq!(ProblemFile::from_value(&p.to_value()).unwrap(), p);
    }
}

#[test]
fn star_subdivision_refines() {
    let fan = Fan {
        ambient: 3,
        rays: vec![vec![int(1), int(0), int(0)], vec![int(0), int(1), int(0)], vec![int(0), int(0), int(1)]],
        cones: vec![vec![0, 1, 2]],
    };
    for tau in [vec![0, 1], vec![0, 1, 2]] {
        let star = star_subdivision(&fan, &tau).unwrap();
        assert!(star.refines(&fan));
        assert_eq!(star.cones.len(), tau.len());
    }
}

#[test]
fn explicit_lambda_must_be_generic() {
    let text = r#"{"rank": 1, "characters": [[1], [1], [-1], [-1]], "omega_plus": [1], "omega_minus": [-1], "lambda": [0, 0, 0, 0]}"#;
    let p = ProblemFile::parse_str(text).unwrap();
    let r = toricwall::io::dispatch("coeffs", &p, &Default::default());
    assert_eq!(r.error.unwrap().code, "non_generic_parameters");
}
