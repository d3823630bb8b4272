//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Reference values come from the oracles below, which
//! work on raw ±1 vectors and do not go through the library's scenario code.

use std::collections::BTreeSet;
use std::process::Command;

use ksctx::enumeration::{contextuality_count, enumerate_assignments, functional_value, is_noncontextual};
use ksctx::ks::{self, enumerate_two_valued_states, Hypergraph};
use ksctx::metrics::{fraction_closed_form, ks_fraction_statement, min_contextual_fraction};
use ksctx::polytope::{
    context_triple, correlation_vertices, facets_from_vertices, maximize_functional, vertices_from_facets,
};
use ksctx::rational::{fmt_decimal, int, ratio, sqrt_lower, Rational};
use ksctx::simulate::{empirical_functional, generate_stream};
use ksctx::{Assignment, HalfSpace, RationalVector, Scenario, StreamSpec};
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn lib<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

// Variable order a_b, a_b', a'_b, a'_b', b_a, b_a', b'_a, b'_a'.
fn oracle_vectors() -> Vec<[i64; 8]> {
    (0u32..256)
        .map(|i| std::array::from_fn(|j| if i >> (7 - j) & 1 == 1 { 1 } else { -1 }))
        .collect()
}

fn oracle_value(x: &[i64; 8]) -> i64 {
    x[0] * x[4] + x[1] * x[6] + x[2] * x[5] - x[3] * x[7]
}

fn oracle_noncontextual(x: &[i64; 8]) -> bool {
    x[0] == x[1] && x[2] == x[3] && x[4] == x[5] && x[6] == x[7]
}

fn oracle_flips(x: &[i64; 8]) -> usize {
    [(0, 1), (2, 3), (4, 5), (6, 7)].iter().filter(|&&(i, j)| x[i] != x[j]).count()
}

/// Minimal contextual weight: optimum sits on a vertex of the 2-row LP, so
/// one or two columns suffice.
fn oracle_fraction(lambda: &Rational) -> Option<Rational> {
    let cols: BTreeSet<(i64, bool)> =
        oracle_vectors().iter().map(|x| (oracle_value(x), !oracle_noncontextual(x))).collect();
    let cost = |c: bool| if c { int(1) } else { int(0) };
    let mut best: Option<Rational> = None;
    for &(f, c) in &cols {
        if int(f) == *lambda && best.as_ref().is_none_or(|b| cost(c) < *b) {
            best = Some(cost(c));
        }
        for &(g, d) in &cols {
            if int(f) < *lambda && *lambda < int(g) {
                let w = (lambda - int(f)) / int(g - f);
                let v = (int(1) - &w) * cost(c) + w * cost(d);
                if best.as_ref().is_none_or(|b| v < *b) {
                    best = Some(v);
                }
            }
        }
    }
    best
}

fn oracle_state_count(hg: &Hypergraph) -> usize {
    let n = hg.atoms().len();
    (0u64..1 << n)
        .filter(|bits| {
            hg.contexts().iter().all(|c| c.iter().filter(|&&a| bits >> a & 1 == 1).count() == 1)
        })
        .count()
}

fn enumeration_counts() -> Check {
    let s = Scenario::builtin_chsh();
    let all = lib(enumerate_assignments(&s))?;
    let nc = all.iter().filter(|a| is_noncontextual(&s, a)).count();
    let oracle_nc = oracle_vectors().iter().filter(|x| oracle_noncontextual(x)).count();
    ensure!(all.len() == 256, "assignments={}", all.len());
    ensure!(nc == 16 && oracle_nc == 16, "noncontextual={nc} oracle={oracle_nc}");
    Ok(())
}

fn bounds() -> Check {
    let s = Scenario::builtin_chsh();
    let classical = lib(maximize_functional(&s, true))?;
    let algebraic = lib(maximize_functional(&s, false))?;
    let vs = oracle_vectors();
    let oc = vs.iter().filter(|x| oracle_noncontextual(x)).map(oracle_value).max();
    let oa = vs.iter().map(oracle_value).max();
    ensure!(classical == 2 && oc == Some(2), "classical={classical} oracle={oc:?}");
    ensure!(algebraic == 4 && oa == Some(4), "algebraic={algebraic} oracle={oa:?}");
    Ok(())
}

fn maximal_violation_rows() -> Check {
    let s = Scenario::builtin_chsh();
    let row1 = lib(Assignment::new(vec![1, 1, 1, 1, 1, 1, 1, -1]))?;
    let rows = [row1.clone(), row1.negated(), Assignment::constant(8, 1), Assignment::constant(8, -1)];
    let expected = [(4, 1), (4, 1), (2, 0), (2, 0)];
    for (i, (a, (f, c))) in rows.iter().zip(expected).enumerate() {
        let got = (lib(functional_value(&s, a))?, contextuality_count(&s, a));
        let raw: [i64; 8] = std::array::from_fn(|j| i64::from(a.values()[j]));
        ensure!(got == (f, c), "row {} gave {got:?}", i + 1);
        ensure!((oracle_value(&raw), oracle_flips(&raw)) == (f, c), "oracle disagrees on row {}", i + 1);
    }
    Ok(())
}

fn single_context() -> Result<Scenario, String> {
    lib(Scenario::parse("observable left a\nobservable right b\ncontext a b\n"))
}

fn single_context_facets() -> Check {
    let s = single_context()?;
    let verts = lib(correlation_vertices(&s, &context_triple(&s, 0)))?;
    let facets = lib(facets_from_vertices(&verts))?;
    // -1 <= s1 x + s2 y + s1 s2 z for each sign pair
    let mut expected = Vec::new();
    for s1 in [1i64, -1] {
        for s2 in [1i64, -1] {
            expected.push(HalfSpace::from_ints(&[-s1, -s2, -s1 * s2], 1));
        }
    }
    expected.sort();
    ensure!(facets == expected, "facets {facets:?}");
    let joint: BTreeSet<Rational> = facets
        .iter()
        .map(|f| f.offset() / &f.normal().components()[2])
        .collect();
    ensure!(joint == BTreeSet::from([int(-1), int(1)]), "reduced bounds {joint:?}");
    let origin = |z: i64| RationalVector::from_ints(&[0, 0, z]);
    ensure!(facets.iter().all(|f| f.contains(&origin(1)) && f.contains(&origin(-1))), "joint ±1 excluded");
    ensure!(!facets.iter().all(|f| f.contains(&origin(2))), "joint 2 admitted");
    Ok(())
}

fn cube() -> Vec<HalfSpace> {
    let mut out = Vec::new();
    for i in 0..3 {
        for sgn in [1, -1] {
            let mut n = [0i64; 3];
            n[i] = sgn;
            out.push(HalfSpace::from_ints(&n, 1));
        }
    }
    out.sort();
    out
}

fn minkowski_weyl() -> Check {
    let s = single_context()?;
    let verts = lib(correlation_vertices(&s, &context_triple(&s, 0)))?;
    let facets = lib(facets_from_vertices(&verts))?;
    ensure!(lib(vertices_from_facets(&facets))? == verts, "single context V-H-V");
    ensure!(lib(facets_from_vertices(&lib(vertices_from_facets(&facets))?))? == facets, "single context H-V-H");

    let c = cube();
    let cube_verts = lib(vertices_from_facets(&c))?;
    let mut corners = Vec::new();
    for i in 0..8 {
        corners.push(RationalVector::from_ints(&std::array::from_fn::<i64, 3, _>(|j| {
            if i >> (2 - j) & 1 == 1 { 1 } else { -1 }
        })));
    }
    let a: BTreeSet<_> = cube_verts.iter().cloned().collect();
    let b: BTreeSet<_> = corners.iter().cloned().collect();
    ensure!(a == b, "cube vertices {cube_verts:?}");
    ensure!(lib(facets_from_vertices(&cube_verts))? == c, "cube H-V-H");
    ensure!(lib(vertices_from_facets(&lib(facets_from_vertices(&corners))?))?.len() == 8, "cube V-H-V");
    Ok(())
}

fn contextuality_fraction() -> Check {
    let s = Scenario::builtin_chsh();
    for (n, d) in [(2, 1), (9, 4), (5, 2), (11, 4), (3, 1), (707, 250), (7, 2), (4, 1)] {
        let lambda = ratio(n, d);
        let got = lib(min_contextual_fraction(&s, &lambda))?.min_contextual_fraction;
        let oracle = oracle_fraction(&lambda).ok_or("oracle infeasible")?;
        let closed = (&lambda - int(2)) / int(2);
        ensure!(got == oracle && got == closed, "lambda={n}/{d}: lp={got} oracle={oracle}");
        ensure!(got == fraction_closed_form(&lambda), "closed form helper at {n}/{d}");
    }
    let f = lib(min_contextual_fraction(&s, &ratio(707, 250)))?.min_contextual_fraction;
    ensure!(fmt_decimal(&f, 3) == "0.414", "decimal {}", fmt_decimal(&f, 3));
    let lo = sqrt_lower(2, 30);
    let hi = &lo + ratio(1, 1_000_000_000_000_000) * ratio(1, 1_000_000_000_000_000);
    for root in [lo, hi] {
        let err = (ratio(707, 250) - &root * int(2)) / int(2);
        let err = if err < int(0) { -err } else { err };
        ensure!(err <= ratio(3, 10_000), "approximation error {err}");
        let gap = &f - (&root - int(1));
        let gap = if gap < int(0) { -gap } else { gap };
        ensure!(gap <= ratio(3, 10_000), "distance to sqrt2-1 {gap}");
    }
    Ok(())
}

fn forty_nineteen_stream() -> Check {
    let s = Scenario::builtin_chsh();
    for seed in [0u64, 1, 7, 42, 1_477_776_061_723_855_037, u64::MAX] {
        let st = lib(generate_stream(&s, StreamSpec { n_total: 40, n_contextual: 19, seed }))?;
        let raw_sum: i64 = st
            .entries
            .iter()
            .map(|a| oracle_value(&std::array::from_fn(|j| i64::from(a.values()[j]))))
            .sum();
        let v = lib(empirical_functional(&s, &st))?;
        ensure!(v == ratio(59, 20) && ratio(raw_sum, 40) == v, "seed {seed}: {v}");
        ensure!(fmt_decimal(&v, 12) == "2.95", "decimal {}", fmt_decimal(&v, 12));
    }
    Ok(())
}

fn determinism_property() -> Check {
    let s = Scenario::builtin_chsh();
    let all = lib(enumerate_assignments(&s))?;
    let mut values = BTreeSet::new();
    for a in &all {
        let v = lib(functional_value(&s, a))?;
        values.insert(v);
        if is_noncontextual(&s, a) {
            ensure!(v == 2 || v == -2, "noncontextual {a:?} gives {v}");
        }
    }
    ensure!(values == BTreeSet::from([-4, -2, 0, 2, 4]), "value set {values:?}");
    Ok(())
}

fn random_hypergraph(rng: &mut SplitMix64, offset: usize) -> (Vec<String>, Vec<Vec<usize>>) {
    let atoms = 2 + (rng.next_u64() % 5) as usize;
    let contexts = 1 + (rng.next_u64() % 4) as usize;
    let names = (0..atoms).map(|i| format!("x{}", i + offset)).collect();
    let mut out = Vec::new();
    for _ in 0..contexts {
        let c: Vec<usize> = (0..atoms).filter(|_| rng.next_u64().is_multiple_of(2)).collect();
        if c.len() >= 2 {
            out.push(c);
        }
    }
    (names, out)
}

fn ks_checks() -> Check {
    let cabello = lib(Hypergraph::parse(ks::fixtures::CABELLO18))?;
    let states = lib(enumerate_two_valued_states(&cabello, None))?;
    ensure!(states.exhaustive && states.states.is_empty(), "KS fixture has {} states", states.states.len());
    ensure!(oracle_state_count(&cabello) == 0, "naive oracle found states on KS fixture");
    let st = ks_fraction_statement(0);
    ensure!(st.fraction == int(1) && !st.undetermined, "statement {st:?}");

    let pentagon = lib(Hypergraph::parse(ks::fixtures::PENTAGON))?;
    let states = lib(enumerate_two_valued_states(&pentagon, None))?;
    let naive = oracle_state_count(&pentagon);
    ensure!(naive > 0 && states.states.len() == naive, "pentagon {} vs oracle {naive}", states.states.len());

    let mut rng = SplitMix64::seed_from_u64(20);
    for _ in 0..200 {
        let (na, ca) = random_hypergraph(&mut rng, 0);
        let (nb, cb) = random_hypergraph(&mut rng, na.len());
        let shift = na.len();
        let g1 = lib(Hypergraph::new(na.clone(), ca.clone()))?;
        let g2 = lib(Hypergraph::new(nb.clone(), cb.clone()))?;
        let joined = lib(Hypergraph::new(
            na.into_iter().chain(nb).collect(),
            ca.into_iter().chain(cb.into_iter().map(|c| c.into_iter().map(|a| a + shift).collect())).collect(),
        ))?;
        let count = |g: &Hypergraph| lib(enumerate_two_valued_states(g, None)).map(|e| e.states.len());
        let (c1, c2, c12) = (count(&g1)?, count(&g2)?, count(&joined)?);
        ensure!(c12 == c1 * c2, "product law {c12} != {c1}*{c2}");
        ensure!(c1 == oracle_state_count(&g1), "oracle mismatch on random hypergraph");
    }
    Ok(())
}

fn run_binary(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_ksctx"))
        .args(args)
        .env_remove("KSCTX_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    ensure!(out.status.success(), "{args:?} exited with {}", out.status);
    Ok(out.stdout)
}

fn cli_determinism() -> Check {
    for args in [
        &["report"][..],
        &["report", "--seed", "99"],
        &["simulate", "--n", "40", "--k", "19", "--seed", "7"],
        &["simulate", "--n", "100", "--lambda", "707/250", "--seed", "3"],
    ] {
        let first = run_binary(args)?;
        let second = run_binary(args)?;
        ensure!(!first.is_empty() && first == second, "{args:?} differs between runs");
    }
    let sim = String::from_utf8(run_binary(&["simulate", "--n", "40", "--k", "19", "--seed", "7"])?)
        .map_err(|e| e.to_string())?;
    ensure!(sim.lines().last() == Some("empirical=2.95"), "simulate tail {:?}", sim.lines().last());
    Ok(())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("enumeration counts (256 assignments, 16 noncontextual)", enumeration_counts),
        ("bounds (classical 2, algebraic 4)", bounds),
        ("maximal-violation fixtures (values 4,4,2,2; counts 1,1,0,0)", maximal_violation_rows),
        ("single-context facets and joint bounds", single_context_facets),
        ("Minkowski-Weyl roundtrips", minkowski_weyl),
        ("contextuality fraction (lambda-2)/2 and sqrt2-1 bound", contextuality_fraction),
        ("stream N=40 k=19 gives 59/20 for every seed", forty_nineteen_stream),
        ("noncontextual determinism value sets", determinism_property),
        ("Kochen-Specker fixtures and product law", ks_checks),
        ("report/simulate reproducible across runs", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(()) => println!("PASS [{:>2}] {name}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
