//! The ten acceptance criteria, one test each. With `--nocapture` every
//! test also prints a one-line summary of what it covered.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use num_traits::{One, Zero};
use serde_json::Value;
use strictmod::{load_module, run, LoadedModule};
use strictmod_core::divisible::{build_tower_n1, embed_into_divisible, verify_divisible};
use strictmod_core::hopf::{build_residue_algebra, functor_l_roundtrip};
use strictmod_core::modcat::{baer_difference, certify, mu_lambda, validate_module, ModuleHom, ShortExactSequence};
use strictmod_core::points::{
    build_equations, min_pairwise_gap, points_match_character, solve_points, suggest_tame_tower, tame_character,
    PointSet,
};
use strictmod_core::ramif::{max_break, prop7_step, theorem5_bound, theorem5_check};
use strictmod_core::sh::{applicable_flavors, e1_agreement, sh, ShFlavor};
use strictmod_core::{BaseData, Error, Series, SeriesMatrix, SigmaModule, Q};

struct Fixture {
    name: String,
    path: PathBuf,
    m: LoadedModule,
    expect: Value,
    tags: Vec<String>,
}

impl Fixture {
    fn tagged(&self, t: &str) -> bool {
        self.tags.iter().any(|x| x == t)
    }

    fn valid(&self) -> bool {
        self.expect["valid"].as_bool().unwrap_or(false)
    }

    fn module(&self) -> SigmaModule {
        validate_module(&self.m.base, self.m.c.clone(), self.m.d.clone()).unwrap()
    }

    fn q_pow_rank(&self) -> u64 {
        self.m.base.q().saturating_pow(self.m.c.rows() as u32)
    }
}

fn fixtures(prec: Option<i64>) -> Vec<Fixture> {
    let dir = PathBuf::from("tests/fixtures");
    let mut paths: Vec<PathBuf> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let m = load_module(&path, prec).unwrap();
            let expect = m.file.expect.clone().unwrap_or(Value::Null);
            let tags = m.file.tags.clone().unwrap_or_default();
            Fixture { name: path.file_stem().unwrap().to_string_lossy().into_owned(), path, m, expect, tags }
        })
        .collect()
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], ok: String) -> Outcome {
    if failures.is_empty() {
        Outcome { pass: true, detail: ok }
    } else {
        Outcome { pass: false, detail: format!("{} failure(s): {}", failures.len(), failures.join("; ")) }
    }
}

/// Solve in the smallest tame tower that carries every point.
fn solve(m: &SigmaModule, prec: i64) -> Result<PointSet, Error> {
    let sys = build_equations(m)?;
    let mut last = None;
    for n in 1..=m.rank().max(1) {
        match solve_points(&sys, &suggest_tame_tower(m.base().q(), n as u32), prec) {
            Err(e @ Error::TowerInsufficient { .. }) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one tower tried"))
}

fn criterion1(fx: &[Fixture]) -> Outcome {
    let start = Instant::now();
    let mut fails = Vec::new();
    for f in fx {
        let cert = certify(&f.m.base, &f.m.c, &f.m.d).unwrap();
        let violation = cert.first_violation().map(|v| format!("{v:?}"));
        let want_valid = f.valid();
        let want_violation = f.expect["violation"].as_str().map(str::to_string);
        if cert.is_valid() != want_valid || violation != want_violation {
            fails.push(format!("{}: got {violation:?}", f.name));
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    let ranks: std::collections::BTreeSet<usize> = fx.iter().map(|f| f.m.c.rows()).collect();
    let qs: std::collections::BTreeSet<u64> = fx.iter().map(|f| f.m.base.q()).collect();
    let es: std::collections::BTreeSet<i64> = fx.iter().map(|f| f.m.base.e()).collect();
    if fx.len() < 30 {
        fails.push(format!("only {} fixtures", fx.len()));
    }
    if ranks != [1, 2, 3].into() || qs != [2, 3, 4].into() || es != [1, 2, 3].into() {
        fails.push(format!("coverage ranks {ranks:?}, q {qs:?}, e {es:?}"));
    }
    let strict_fail = fx.iter().filter(|f| f.name.starts_with("mu_pi") && f.expect["violation"] == "Strictness").count();
    if strict_fail == 0 {
        fails.push("no mu_{pi^(e+1)} strictness failure in the corpus".into());
    }
    if elapsed >= 1.0 {
        fails.push(format!("took {elapsed:.2} s"));
    }
    outcome(&fails, format!("{} fixtures match, {strict_fail} mu_(pi^(e+1)) rejections, {elapsed:.3} s", fx.len()))
}

fn criterion2(fx: &[Fixture]) -> Outcome {
    let start = Instant::now();
    let mut fails = Vec::new();
    let mut n = 0;
    for f in fx.iter().filter(|f| f.valid() && f.q_pow_rank() <= 64) {
        n += 1;
        let m = f.module();
        match functor_l_roundtrip(&m, 64) {
            Ok(rt) => {
                let want = m.rank() * f.m.base.n0() as usize;
                if !rt.holds() || rt.kernel_dim != want {
                    fails.push(format!("{}: kernel {} vs {want}", f.name, rt.kernel_dim));
                }
            }
            Err(e) => fails.push(format!("{}: {e}", f.name)),
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 30.0 {
        fails.push(format!("took {elapsed:.2} s"));
    }
    outcome(&fails, format!("{n} modules round-trip, kernel dimension n N0 each, {elapsed:.2} s"))
}

fn criterion3(fx: &[Fixture]) -> Outcome {
    let mut fails = Vec::new();
    let mut n = 0;
    for f in fx.iter().filter(|f| f.valid() && f.q_pow_rank() <= 64) {
        let alg = build_residue_algebra(&f.module(), 64).unwrap();
        n += 1;
        if !(alg.check_coassociative() && alg.check_multiplicative() && alg.check_counit()) {
            fails.push(f.name.clone());
        }
    }
    outcome(&fails, format!("coassociativity, multiplicativity, counit on {n} algebras"))
}

/// Criterion 4 also collects the solves reused by criteria 5 and 8.
struct Solved {
    name: String,
    m: SigmaModule,
    pts: PointSet,
}

fn criterion4(fx: &[Fixture], solved: &mut Vec<Solved>) -> Outcome {
    let mut fails = Vec::new();
    let mut cyclic = 0;
    let mut wild = Vec::new();
    for f in fx.iter().filter(|f| f.valid()) {
        let m = f.module();
        let prec = f.m.base.prec();
        // h N = rank: h coordinates on each of the N levels.
        let expected = m.base().q().pow(m.rank() as u32);
        let pts = match solve(&m, prec) {
            Ok(p) => p,
            Err(Error::TowerInsufficient { .. }) if f.tagged("wild") => {
                wild.push(f.name.clone());
                continue;
            }
            Err(e) => {
                fails.push(format!("{}: {e}", f.name));
                continue;
            }
        };
        if pts.points.len() as u64 != expected || pts.expected != expected {
            fails.push(format!("{}: {} points, expected {expected}", f.name, pts.points.len()));
        }
        if f.tagged("cyclic") && m.rank() <= 3 {
            cyclic += 1;
            let ch = tame_character(&m).unwrap();
            let e = m.base().e();
            if !ch.digits.iter().all(|&a| (0..=e).contains(&a)) {
                fails.push(format!("{}: digits {:?}", f.name, ch.digits));
            }
            let sys = build_equations(&m).unwrap();
            let tp = solve_points(&sys, &suggest_tame_tower(m.base().q(), ch.level), prec).unwrap();
            if !points_match_character(&tp, &ch, m.base().q()) || !tp.galois_stable(&sys).unwrap() {
                fails.push(format!("{}: point shape or Galois action", f.name));
            }
            if m.rank() == 1 && tp.points.len() as u64 != m.base().q() {
                fails.push(format!("{}: {} points", f.name, tp.points.len()));
            }
        }
        solved.push(Solved { name: f.name.clone(), m, pts });
    }
    outcome(
        &fails,
        format!(
            "{} solves with q^(hN) points, {cyclic} cyclic characters; wild (tame tower too small, skipped): {wild:?}",
            solved.len()
        ),
    )
}

fn criterion5(solved: &[Solved]) -> Outcome {
    let mut fails = Vec::new();
    let mut n = 0;
    let mut equal = 0;
    for s in solved.iter().filter(|s| s.pts.points.len() >= 2) {
        n += 1;
        let gap = min_pairwise_gap(&s.pts).unwrap();
        let (e, q) = (s.m.base().e(), s.m.base().q() as i64);
        let bound = Q::new(e, q - 1);
        if gap > bound {
            fails.push(format!("{}: gap {gap} > {bound}", s.name));
        }
        if s.name.starts_with("mu_pi1_") && e == 1 {
            if gap == bound {
                equal += 1;
            } else {
                fails.push(format!("{}: gap {gap} != {bound}", s.name));
            }
        }
    }
    if equal == 0 {
        fails.push("no mu_pi with e = 1 solved".into());
    }
    outcome(&fails, format!("gap <= e/(q-1) on {n} point sets, equality on {equal} mu_pi (e = 1)"))
}

fn criterion6(fx40: &[Fixture]) -> Outcome {
    let start = Instant::now();
    let mut fails = Vec::new();
    let mut towers = 0;
    for f in fx40.iter().filter(|f| f.valid() && f.m.c.rows() <= 2 && f.tagged("killed")) {
        let m = f.module();
        for levels in 1..=4 {
            match build_tower_n1(&m, levels) {
                Ok((t, _)) => {
                    towers += 1;
                    if !t.levels.iter().all(|l| l.certificate().is_valid()) {
                        fails.push(format!("{} ({levels} levels): a level fails validation", f.name));
                    }
                    let rep = verify_divisible(&t);
                    if !rep.holds() {
                        fails.push(format!("{} ({levels} levels): {:?}", f.name, rep.first_failure().map(|c| &c.name)));
                    }
                }
                Err(e) => fails.push(format!("{} ({levels} levels): {e}", f.name)),
            }
        }
    }
    let jordan = fx40.iter().find(|f| f.name == "jordan_q2_e1").expect("Jordan fixture");
    let m = jordan.module();
    match embed_into_divisible(&m, m.nilpotency_index()) {
        Ok(emb) if emb.pure.holds && emb.report.holds() && emb.map.matrix().rows() == 2 => {}
        Ok(emb) => fails.push(format!("Jordan embedding: pure {}, tower {}", emb.pure.holds, emb.report.holds())),
        Err(e) => fails.push(format!("Jordan embedding: {e}")),
    }
    let elapsed = start.elapsed().as_secs_f64();
    if elapsed >= 10.0 {
        fails.push(format!("took {elapsed:.2} s"));
    }
    outcome(&fails, format!("{towers} towers verified, Jordan rank 2 N = 2 embeds purely, {elapsed:.2} s"))
}

/// Extension of `mu_{pi^a}` by `mu_1` with middle `C = [[1, 0], [x, pi^a]]`.
fn extension(base: &BaseData, a: i64, x: &[(i64, u32)]) -> ShortExactSequence {
    let prec = base.prec();
    let f = base.field();
    let left = mu_lambda(base, &Series::one(prec)).unwrap();
    let right = mu_lambda(base, &Series::pi_pow(a, prec)).unwrap();
    let xs = Series::from_terms(f, x, prec).unwrap();
    let c = SeriesMatrix::from_vec(2, 2, vec![Series::one(prec), Series::zero(prec), xs, Series::pi_pow(a, prec)]);
    let mid = validate_module(base, c, SeriesMatrix::zeros(2, 2, prec)).unwrap();
    let i = SeriesMatrix::from_vec(1, 2, vec![Series::one(prec), Series::zero(prec)]);
    let j = SeriesMatrix::from_vec(2, 1, vec![Series::zero(prec), Series::one(prec)]);
    ShortExactSequence::new(ModuleHom::new(&left, &mid, i).unwrap(), ModuleHom::new(&mid, &right, j).unwrap()).unwrap()
}

fn criterion7() -> Outcome {
    let mut fails = Vec::new();
    let mut n = 0;
    let mut nonsplit = 0;
    for (p, n0, e) in [(2, 1, 1), (3, 1, 1), (2, 2, 1), (2, 1, 2), (3, 1, 2)] {
        let base = BaseData::simple(p, n0, e, 10).unwrap();
        let xs: [&[(i64, u32)]; 3] = [&[(0, 1)], &[(1, 1)], &[(0, 1), (1, 1)]];
        for a in 1..=e {
            for x in xs {
                let eps = extension(&base, a, x);
                n += 1;
                let split = ShortExactSequence::split(eps.left(), eps.right()).unwrap();
                let tag = format!("p={p} N0={n0} e={e} a={a} x={x:?}");
                if !eps.is_split().unwrap() {
                    nonsplit += 1;
                }
                if !baer_difference(&eps, &eps).unwrap().is_split().unwrap() {
                    fails.push(format!("{tag}: eps - eps does not split"));
                }
                if !baer_difference(&eps, &split).unwrap().is_equivalent(&eps).unwrap() {
                    fails.push(format!("{tag}: eps - split is not eps"));
                }
            }
        }
    }
    if n < 10 {
        fails.push(format!("only {n} extensions"));
    }
    outcome(&fails, format!("{n} extensions ({nonsplit} non-split): eps - eps splits, eps - split = eps"))
}

fn criterion8(solved: &[Solved]) -> Outcome {
    let mut fails = Vec::new();
    let mut grid = 0;
    for e in 1..=4i64 {
        for n in 1..=4i64 {
            for q in [2i64, 3, 4, 5, 7, 8, 9] {
                grid += 1;
                let want = Q::from_integer(e * n) + Q::new(e, q - 1) - Q::one();
                if theorem5_bound(e, n, q) != want {
                    fails.push(format!("bound({e},{n},{q})"));
                }
            }
        }
    }
    let mut breaks = 0;
    for s in solved {
        let b = max_break(&s.pts.field.tower.herbrand(s.m.base().p()).unwrap());
        let n = s.m.nilpotency_index().max(1) as i64;
        breaks += 1;
        if !theorem5_check(s.m.base().e(), n, s.m.base().q() as i64, b).unwrap().holds {
            fails.push(format!("{}: break {b}", s.name));
        }
    }
    let mut steps = 0;
    for vn in 1..=24i64 {
        for vd in 1..=4i64 {
            for an in 1..=12i64 {
                for ad in [1i64, 2, 3] {
                    let (v, alpha) = (Q::new(vn, vd), Q::new(an, ad));
                    if alpha <= Q::zero() || v <= alpha {
                        continue;
                    }
                    for qp in [2i64, 3, 4, 9] {
                        steps += 1;
                        if prop7_step(v, alpha, qp).unwrap() >= v {
                            fails.push(format!("prop7({v}, {alpha}, {qp})"));
                        }
                    }
                }
            }
        }
    }
    outcome(&fails, format!("{grid} bound values exact, {breaks} tower breaks within bound, {steps} contraction steps"))
}

fn criterion9(fx: &[Fixture]) -> Outcome {
    let mut fails = Vec::new();
    let (mut objects, mut agree) = (0, 0);
    for f in fx.iter().filter(|f| f.valid()) {
        let m = f.module();
        let flavors = applicable_flavors(&m);
        for &fl in &flavors {
            objects += 1;
            match sh(&m, fl) {
                Ok(o) if o.axioms().spanning => {}
                Ok(_) => fails.push(format!("{} {}: spanning", f.name, fl.name())),
                Err(e) => fails.push(format!("{} {}: {e}", f.name, fl.name())),
            }
        }
        if flavors.contains(&ShFlavor::E1) && flavors.contains(&ShFlavor::General) {
            let a = sh(&m, ShFlavor::E1).unwrap();
            let b = sh(&m, ShFlavor::General).unwrap();
            if e1_agreement(&a, &b, m.base()) {
                agree += 1;
            } else {
                fails.push(format!("{}: e1/general disagree", f.name));
            }
        }
    }
    outcome(&fails, format!("spanning axiom on {objects} objects, e = 1 agreement on {agree} modules"))
}

fn cli(args: &[&str]) -> String {
    let mut v = vec!["strictmod"];
    v.extend_from_slice(args);
    run(v).stdout
}

fn series_agree(a: &Series, b: &Series) -> bool {
    let pr = a.prec().min(b.prec());
    a.truncate(pr) == b.truncate(pr)
}

fn criterion10(fx: &[Fixture], fx2: &[Fixture]) -> Outcome {
    let mut fails = Vec::new();
    let mut reports = 0;
    for f in fx {
        let path = f.path.to_string_lossy().into_owned();
        for cmd in ["validate", "roundtrip", "points", "sh"] {
            reports += 1;
            if cli(&[cmd, &path]) != cli(&[cmd, &path]) {
                fails.push(format!("{cmd} {}: reports differ", f.name));
            }
        }
    }
    let mut compared = 0;
    for (a, b) in fx.iter().zip(fx2) {
        let ca = certify(&a.m.base, &a.m.c, &a.m.d).unwrap();
        let cb = certify(&b.m.base, &b.m.c, &b.m.d).unwrap();
        if ca.first_violation() != cb.first_violation() {
            fails.push(format!("{}: verdict changed at doubled precision", a.name));
        }
        if ca.det_kind == strictmod_core::matrix::DetKind::Nonzero && !series_agree(&ca.det, &cb.det) {
            fails.push(format!("{}: det digits changed", a.name));
        }
        if let (Some(ba), Some(bb)) = (&ca.b, &cb.b) {
            if ca.strict.holds && !ba.entries().iter().zip(bb.entries()).all(|(x, y)| series_agree(x, y)) {
                fails.push(format!("{}: B digits changed", a.name));
            }
        }
        if !a.valid() || a.tagged("wild") {
            continue;
        }
        let (ma, mb) = (a.module(), b.module());
        match (solve(&ma, a.m.base.prec()), solve(&mb, b.m.base.prec())) {
            (Ok(pa), Ok(pb)) => {
                compared += 1;
                let pr = pa.prec.min(pb.prec);
                let key = |ps: &PointSet| {
                    let mut v: Vec<Vec<Series>> =
                        ps.points.iter().map(|p| p.coords.iter().map(|s| s.truncate(pr)).collect()).collect();
                    v.sort_by_key(|c| c.iter().map(|s| s.terms().collect::<Vec<_>>()).collect::<Vec<_>>());
                    v
                };
                if key(&pa) != key(&pb) {
                    fails.push(format!("{}: points changed at doubled precision", a.name));
                }
            }
            (x, y) => fails.push(format!("{}: solve {:?} / {:?}", a.name, x.err(), y.err())),
        }
    }
    outcome(&fails, format!("{reports} reports byte-identical; certificates of {} fixtures and {compared} point sets stable at doubled precision", fx.len()))
}

fn solved_corpus() -> Vec<Solved> {
    let mut solved = Vec::new();
    criterion4(&fixtures(None), &mut solved);
    solved
}

fn doubled() -> Vec<Fixture> {
    fixtures(None)
        .into_iter()
        .map(|f| {
            let p = f.m.base.prec();
            Fixture { m: load_module(&f.path, Some(2 * p)).unwrap(), ..f }
        })
        .collect()
}

fn report(n: usize, name: &str, o: Outcome) {
    println!("criterion {n:>2} {}: {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    assert!(o.pass, "criterion {n} failed: {}", o.detail);
}

#[test]
fn criterion_01_validation_verdicts() {
    report(1, "validation verdicts", criterion1(&fixtures(None)));
}

#[test]
fn criterion_02_round_trip() {
    report(2, "round trip", criterion2(&fixtures(None)));
}

#[test]
fn criterion_03_hopf_axioms() {
    report(3, "Hopf axioms", criterion3(&fixtures(None)));
}

#[test]
fn criterion_04_characters_and_point_counts() {
    let mut solved = Vec::new();
    report(4, "tame characters and point counts", criterion4(&fixtures(None), &mut solved));
}

#[test]
fn criterion_05_separation() {
    report(5, "separation of points", criterion5(&solved_corpus()));
}

#[test]
fn criterion_06_divisible_towers() {
    report(6, "divisible towers and embedding", criterion6(&fixtures(Some(40))));
}

#[test]
fn criterion_07_ext_group_laws() {
    report(7, "Ext group laws", criterion7());
}

#[test]
fn criterion_08_ramification_bound() {
    report(8, "ramification bound", criterion8(&solved_corpus()));
}

#[test]
fn criterion_09_sh_axioms() {
    report(9, "SH axioms", criterion9(&fixtures(None)));
}

#[test]
fn criterion_10_determinism_and_precision() {
    report(10, "determinism and precision", criterion10(&fixtures(None), &doubled()));
}
