//! Acceptance run: one pass/fail line per criterion, nonzero exit on any failure.

use std::time::Instant;

use num_traits::{Signed, Zero};
use toricwall::cohomology::{verify_div_lemma, LinearForm};
use toricwall::continuation::{
    build_u_h, conifold_hypergeometric, crossing_rows, generic_params, inside_row, theorem_row, theta_commutation,
    ContinuationOptions, YSample,
};
use toricwall::fan::{star_subdivision, Fan};
use toricwall::git::{from_stacky_fan, to_stacky_fan, Side, WallCrossing};
use toricwall::io::example;
use toricwall::ktheory::verify_fm_diagram;
use toricwall::lattice::cokernel_with_projection;
use toricwall::params::Draws;
use toricwall::rat::{int, rat, rat_int, to_f64};
use toricwall::series::{verify_i_h_relation, Window};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn wc(name: &str) -> WallCrossing {
    example(name).and_then(|p| p.wall_crossing()).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err(e: toricwall::Error) -> String {
    format!("[{}] {e}", e.code())
}

/// FM/ch compatibility over 20 draws on the flop and the (1,1,1,-3) wall.
fn fm_compatibility() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut rows = 0;
    for name in ["flop", "c3z3"] {
        let w = wc(name);
        let mut draws = Draws::new(2024);
        for _ in 0..20 {
            let p = generic_params(&w, &mut draws).map_err(err)?;
            let rep = verify_fm_diagram(&w, &p, None).map_err(err)?;
            worst = worst.max(rep.max_deviation);
            rows += rep.rows.len();
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst < 1e-9, format!("max deviation {worst:.3e} >= 1e-9"))?;
    ensure(secs < 10.0, format!("runtime {secs:.1} s >= 10 s"))?;
    Ok(format!("max deviation {worst:.3e} over {rows} rows, {secs:.2} s"))
}

/// Continuation of the flop restrictions at |y^e| = 1.5, 2, 4 with the 2F1 cross-check.
fn continuation() -> Outcome {
    let start = Instant::now();
    let w = wc("flop");
    let opts = ContinuationOptions::default();
    let (mut worst, mut worst_f) = (0.0f64, 0.0f64);
    let mut n = 0;
    let mut draws = Draws::new(7);
    for _ in 0..3 {
        let p = generic_params(&w, &mut draws).map_err(err)?;
        for (a, c) in crossing_rows(&w) {
            for y in [1.5, 2.0, 4.0] {
                let s = YSample::new(y);
                let row = theorem_row(&w, &p, a, c, &s, &opts).map_err(err)?;
                ensure(row.mb.is_some(), "contour integral missing")?;
                worst = worst.max(row.deviation);
                let f = conifold_hypergeometric(&w, &p, a, &s).map_err(err)?;
                worst_f = worst_f.max((f - row.rhs).norm() / row.rhs.norm().max(1.0));
                n += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst < 1e-6, format!("continuation deviation {worst:.3e}"))?;
    ensure(worst_f < 1e-6, format!("2F1 deviation {worst_f:.3e}"))?;
    ensure(secs < 60.0, format!("runtime {secs:.1} s"))?;
    Ok(format!("{n} rows, Mellin-Barnes {worst:.3e}, 2F1 {worst_f:.3e}, {secs:.2} s"))
}

/// Inside the radius the integral, the right residues and the direct sum agree.
fn inside() -> Outcome {
    let opts = ContinuationOptions::default();
    let mut worst = 0.0f64;
    let mut n = 0;
    for name in ["flop", "c3z3"] {
        let w = wc(name);
        let p = generic_params(&w, &mut Draws::new(11)).map_err(err)?;
        let cn = to_f64(&w.wall.conifold).abs();
        for (a, c) in crossing_rows(&w) {
            for t in [0.25, 0.5] {
                let row = inside_row(&w, &p, a, c, &YSample::new(t * cn), &opts).map_err(err)?;
                worst = worst.max(row.deviation);
                n += 1;
            }
        }
    }
    ensure(worst < 1e-8, format!("deviation {worst:.3e}"))?;
    Ok(format!("{n} rows, max deviation {worst:.3e}"))
}

/// Exact restriction identities across the wall.
fn restriction_lemma() -> Outcome {
    let mut total = 0;
    for name in ["flop", "c3z3", "rank2"] {
        let w = wc(name);
        if name == "rank2" {
            ensure(!w.common().is_empty(), "rank-2 example has no common minimal anticone")?;
        }
        let checks = verify_div_lemma(&w, &w.basis_plus.p).map_err(err)?;
        ensure(!checks.is_empty(), format!("{name}: nothing checked"))?;
        if let Some(bad) = checks.iter().find(|c| !c.pass) {
            return Err(format!("{name}: {} != {}", bad.lhs, bad.rhs));
        }
        total += checks.len();
    }
    Ok(format!("{total} exact identities"))
}

fn window() -> Window {
    Window { y_degree: 2, z_low: -2, z_high: 1 }
}

/// Formal I/H comparison on P^1 and on both sides of the flop.
fn i_h_relation() -> Outcome {
    let mut rows = 0;
    let mut terms = 0;
    let p1 = example("p1").map_err(err)?;
    let (git, side) = p1.side_plus().map_err(err)?;
    let mut cases = vec![(git.clone(), side.clone(), side.dual_basis(1))];
    let f = wc("flop");
    for plus in [true, false] {
        cases.push((f.git.clone(), f.side(plus).clone(), f.basis(plus).p.clone()));
    }
    for (git, side, basis) in &cases {
        for c in verify_i_h_relation(git, side, basis, &window(), None).map_err(err)? {
            ensure(c.pass, format!("anticone {:?}: {:?}", c.delta, c.residual))?;
            rows += 1;
            terms += c.lhs_terms;
        }
    }
    ensure(terms > 0, "empty comparison")?;
    Ok(format!("{rows} fixed data, {terms} coefficients equal"))
}

/// Conifold points, weights, box ages, fan round trips and the blow-up of the plane.
fn ground_truths() -> Outcome {
    let f = wc("flop");
    ensure(f.wall.conifold == rat_int(1), "flop conifold")?;
    ensure(f.wall.w == 1, "flop w")?;
    ensure(f.wall.j_minus.iter().all(|&j| f.wall.l[j] == 1), "flop l")?;
    let c = wc("c3z3");
    ensure(c.wall.conifold.abs() == rat(1, 27), "c3z3 |conifold|")?;
    ensure(c.wall.w == 2, "c3z3 w")?;
    ensure(c.wall.l[c.wall.j_minus[0]] == 3, "c3z3 l")?;
    let mut ages: Vec<_> = c.minus.classes.iter().map(|k| k.age.clone()).collect();
    ages.sort();
    ensure(ages == vec![rat_int(0), rat_int(1), rat_int(2)], format!("ages {ages:?}"))?;
    let mut trips = 0;
    for name in ["p1", "flop", "c3z3", "gerbe", "rank2"] {
        let p = example(name).map_err(err)?;
        let git = p.git().map_err(err)?;
        let n = cokernel_with_projection(&git.d_matrix());
        for omega in std::iter::once(&p.omega_plus).chain(p.omega_minus.as_ref()) {
            let side = Side::new(&git, omega, &n).map_err(err)?;
            let esf = to_stacky_fan(&git, &side.anticones, &side.minimal).map_err(err)?;
            let (g2, w2) = from_stacky_fan(&esf).map_err(err)?;
            let back = Side::new(&g2, &w2, &cokernel_with_projection(&g2.d_matrix())).map_err(err)?;
            let esf2 = to_stacky_fan(&g2, &back.anticones, &back.minimal).map_err(err)?;
            ensure(back.minimal == side.minimal && esf2.cones == esf.cones && esf2.s == esf.s, format!("{name}: round trip"))?;
            trips += 1;
        }
    }
    let plane = Fan { ambient: 2, rays: vec![vec![int(1), int(0)], vec![int(0), int(1)]], cones: vec![vec![0, 1]] };
    let star = star_subdivision(&plane, &[0, 1]).map_err(err)?;
    ensure(star.rays.last() == Some(&vec![int(1), int(1)]), "star subdivision ray")?;
    Ok(format!("wall data exact, ages {{0, 1, 2}}, {trips} fan round trips, new ray (1, 1)"))
}

/// FM fixes the common basis elements of the rank-2 wall and is supported on adjacent data.
fn fixed_part() -> Outcome {
    let w = wc("rank2");
    let p = generic_params(&w, &mut Draws::new(5)).map_err(err)?;
    let rep = verify_fm_diagram(&w, &p, None).map_err(err)?;
    let common: Vec<_> = rep.rows.iter().filter(|r| r.common).collect();
    ensure(!common.is_empty(), "no common minimal anticones")?;
    ensure(common.iter().all(|r| r.fixed_part == Some(true)), "FM moves a common basis element")?;
    let mut support = 0.0f64;
    for name in ["flop", "c3z3", "rank2", "flop_over_p1"] {
        let w = wc(name);
        let p = generic_params(&w, &mut Draws::new(5)).map_err(err)?;
        for r in verify_fm_diagram(&w, &p, None).map_err(err)?.rows {
            ensure(r.support_exact, format!("{name}: support off adjacent data"))?;
            support = support.max(r.support_max);
        }
    }
    ensure(support < 1e-12, format!("support {support:.3e}"))?;
    Ok(format!("{} common elements fixed exactly, off-adjacent support {support:.1e}", common.len()))
}

fn theta() -> Outcome {
    let w = wc("rank2");
    let uh = build_u_h(&w);
    let checks = theta_commutation(&w, &uh).map_err(err)?;
    ensure(checks.len() == w.git.r - 1, "wall basis size")?;
    for c in &checks {
        ensure(c.entries > 0, "no entries compared")?;
        ensure(c.mismatches == 0, format!("{} mismatches", c.mismatches))?;
    }
    Ok(format!("{} wall class, {} entries exact", checks.len(), checks[0].entries))
}

/// Shifting w, rho or one connection coefficient by a unit must be detected.
fn negative_controls() -> Outcome {
    let f = wc("flop");
    let p = generic_params(&f, &mut Draws::new(7)).map_err(err)?;
    // C entry -> FM/ch diagram
    let bad = verify_fm_diagram(&f, &p, Some((0, 1.0))).map_err(err)?;
    ensure(bad.max_deviation > 1e-9, "perturbed C not detected")?;
    // w -> continuation
    let opts = ContinuationOptions { w_override: Some(f.wall.w + 1), ..ContinuationOptions::default() };
    let (a, c) = crossing_rows(&f)[0];
    let row = theorem_row(&f, &p, a, c, &YSample::new(2.0), &opts).map_err(err)?;
    ensure(row.deviation > 1e-6, "perturbed w not detected")?;
    // rho -> I/H
    let mut shift = LinearForm::zero(f.git.m, 0);
    shift.lambda[0] = rat_int(1);
    let checks = verify_i_h_relation(&f.git, &f.plus, &f.basis_plus.p, &window(), Some(&shift)).map_err(err)?;
    ensure(checks.iter().any(|c| !c.pass), "perturbed rho not detected")?;
    ensure(!shift.is_zero() && !bad.max_deviation.is_zero(), "controls are trivial")?;
    Ok(format!("C: {:.2e}, w: {:.2e}, rho: {} of {} rows fail", bad.max_deviation, row.deviation, checks.iter().filter(|c| !c.pass).count(), checks.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("FM/ch compatibility", fm_compatibility),
        ("H-function continuation", continuation),
        ("inside-radius consistency", inside),
        ("restriction lemma", restriction_lemma),
        ("I/H relation", i_h_relation),
        ("combinatorial ground truths", ground_truths),
        ("FM fixed part and support", fixed_part),
        ("theta commutation", theta),
        ("negative controls", negative_controls),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let res = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match res {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
