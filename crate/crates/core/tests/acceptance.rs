//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::path::PathBuf;
use std::time::{Duration, Instant};

use common::*;
use num_traits::Zero;

use corrpoly::capacity::{check_exactness, cylinder_additivity_check, find_convexity_violation};
use corrpoly::independence::restricted_dimension;
use corrpoly::info::certify_local_max_mi;
use corrpoly::polytope::dimension_formula;
use corrpoly::preferences::{ceu_value, check_subspace_independence_axiom, meu_value};
use corrpoly::rational::{int, ratio, Rational};
use corrpoly::scenario::{Document, PriorSpec};
use corrpoly::scenarios::{
    climate_from_scenario, evaluate, finance_from_scenario, insurance_from_scenario, run_finance, run_insurance,
    sweep_document, InsuranceVerdict,
};
use corrpoly::space::embed_cylinder;
use corrpoly::{Act, Capacity, Collection, CorrelationSet, Event, IndexSet, JointDistribution, Marginal, PriorSet, ProductSpace};

type Check = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn uniform_2x2() -> CorrelationSet {
    let s = ProductSpace::new(vec![2, 2]).unwrap();
    CorrelationSet::new(&s, &[Marginal::uniform(0, 2), Marginal::uniform(1, 2)]).unwrap()
}

fn e<T, E: std::fmt::Debug>(r: std::result::Result<T, E>) -> std::result::Result<T, String> {
    r.map_err(|x| format!("{x:?}"))
}

fn dimension_formula_family() -> Check {
    let mut g = rng(1001);
    let mut count = 0;
    for sizes in shapes(3, 4) {
        for _ in 0..3 {
            let cs = random_cs(&mut g, &sizes);
            let d = e(cs.dimension())?;
            let n: usize = sizes.iter().product();
            let formula = n - 1 - sizes.iter().map(|k| k - 1).sum::<usize>();
            ensure!(d.rank_dim == formula && d.dim == formula, "{sizes:?}: rank {} vs formula {formula}", d.rank_dim);
            ensure!(dimension_formula(&sizes) == formula, "{sizes:?}: closed form");
            count += 1;
        }
    }
    Ok(format!("{count} instances"))
}

fn cube_example() -> Check {
    let mut g = rng(1002);
    let mut instances = vec![{
        let s = ProductSpace::new(vec![2, 2, 2]).unwrap();
        CorrelationSet::new(&s, &(0..3).map(|i| Marginal::uniform(i, 2)).collect::<Vec<_>>()).unwrap()
    }];
    for _ in 0..3 {
        instances.push(random_cs(&mut g, &[2, 2, 2]));
    }
    let c = |t: &str| Collection::parse(t).unwrap();
    for cs in &instances {
        ensure!(e(cs.dimension())?.dim == 4, "dim 𝒫");
        let d12 = e(restricted_dimension(cs, &[c("{1},{2}")]))?;
        let d1_23 = e(restricted_dimension(cs, &[c("{1},{2,3}")]))?;
        let both = e(restricted_dimension(cs, &[c("{1},{2}"), c("{1},{3}")]))?;
        ensure!((d12, d1_23, both) == (3, 1, 2), "got ({d12}, {d1_23}, {both})");
    }
    Ok("dims 4, 3, 1, 2".into())
}

fn extreme_point_triangle() -> Check {
    let mut g = rng(1003);
    let step = ratio(1, 64);
    let (mut instances, mut vertices, mut rejected) = (0, 0, 0);
    for sizes in shapes_up_to(12) {
        for draw in 0..5 {
            let cs = random_cs(&mut g, &sizes);
            let vs = e(cs.vertices())?.to_vec();
            let mut ours: Vec<Vec<Rational>> = vs.iter().map(|v| v.weights().to_vec()).collect();
            ours.sort();
            ensure!(ours == brute_force_vertices(&cs), "{sizes:?} draw {draw}: vertex sets differ");
            for (k, v) in vs.iter().enumerate() {
                ensure!(e(cs.is_maximally_zero(v))?, "{sizes:?}: vertex {k} not maximally zero");
                let cert = e(certify_local_max_mi(&cs, v, 8, &step, k as u64))?;
                ensure!(cert.is_local_max, "{sizes:?}: vertex {k} not certified (max increase {})", cert.max_observed_increase);
                vertices += 1;
            }
            let mut non_vertices = Vec::new();
            if vs.len() > 1 {
                non_vertices.push(cs.independent_product().clone());
                for k in 0..vs.len() {
                    non_vertices.push(vs[k].mix(&vs[(k + 1) % vs.len()], &ratio(1, 2)));
                }
            }
            for (k, p) in non_vertices.iter().enumerate() {
                ensure!(!e(cs.is_maximally_zero(p))?, "{sizes:?}: non-vertex {k} maximally zero");
                let cert = e(certify_local_max_mi(&cs, p, 8, &step, k as u64))?;
                ensure!(!cert.is_local_max, "{sizes:?}: non-vertex {k} certified");
                rejected += 1;
            }
            instances += 1;
        }
    }
    Ok(format!("{instances} instances, {vertices} vertices certified, {rejected} non-vertices rejected"))
}

fn exact_capacity() -> Check {
    let mut g = rng(1004);
    let mut applied = 0;
    for sizes in [vec![2, 2], vec![2, 3], vec![2, 2, 2]] {
        for cs in [random_cs(&mut g, &sizes), random_cs(&mut g, &sizes)] {
            let report = e(check_exactness(&cs, 4))?;
            ensure!(report.holds && report.exhaustive, "{sizes:?}: exactness failed on {:?}", report.failure);
            let space = cs.space();
            for mask in 0u64..(1 << space.total_size()) {
                let ev = Event::from_mask(space.clone(), mask);
                for i in 0..space.arity() {
                    let set = IndexSet::singleton(i);
                    let sub = space.subspace(&set).unwrap();
                    for m in 1u64..(1 << sub.total_size()) {
                        let ei = Event::from_mask(sub.clone(), m);
                        if e(embed_cylinder(&ei, &set, space))?.is_subset(&ev) {
                            ensure!(e(cylinder_additivity_check(&cs, &ev, i, &ei))?, "{sizes:?}: additivity");
                            applied += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("core = 𝒫 on 2x2, 2x3, 2x2x2; {applied} cylinder identities"))
}

fn non_convexity_witness() -> Check {
    let cs = uniform_2x2();
    let cap = e(Capacity::from_correlation_set(&cs))?;
    let s = cs.space().clone();
    let ev = e(Event::from_flat(s.clone(), [0, 1]))?;
    let f = e(Event::from_flat(s, [0, 2]))?;
    let lhs = e(cap.value(&ev.union(&f)))? + e(cap.value(&ev.intersection(&f)))?;
    let rhs = e(cap.value(&ev))? + e(cap.value(&f))?;
    ensure!(lhs == ratio(1, 2) && rhs == int(1), "got {lhs} vs {rhs}");
    let w = e(find_convexity_violation(&cap, 0, 100))?;
    ensure!(w.is_some(), "search found no witness");
    Ok("υ(E∪F)+υ(E∩F) = 1/2 < 1 = υ(E)+υ(F)".into())
}

fn meu_ceu_divergence() -> Check {
    let cs = uniform_2x2();
    let prior = e(PriorSet::from_correlation_set(&cs))?;
    let act = |v: [i64; 4]| Act::new(cs.space().clone(), v.iter().map(|&x| int(x)).collect()).unwrap();
    let (f, g) = (act([4, 3, 2, 1]), act([5, 3, 2, 0]));
    let (mf, mg) = (e(meu_value(&prior, &f))?.0, e(meu_value(&prior, &g))?.0);
    let (cf, cg) = (e(ceu_value(&cs, &f))?, e(ceu_value(&cs, &g))?);
    ensure!(mf == ratio(5, 2) && mg == ratio(5, 2), "MEU {mf}, {mg}");
    ensure!(cf == int(2) && cg == ratio(3, 2), "CEU {cf}, {cg}");
    Ok("MEU 5/2 = 5/2, CEU 2 > 3/2".into())
}

fn subspace_independence() -> Check {
    let mut g = rng(1007);
    let shapes: [&[usize]; 5] = [&[2, 2], &[2, 3], &[3, 3], &[2, 2, 2], &[2, 4]];
    let cs = random_cs(&mut g, &[2, 2, 2]);
    let ind = PriorSet::singleton(cs.independent_product().clone());
    let report = e(check_subspace_independence_axiom(&ind, cs.marginals(), 10_000, 77))?;
    ensure!(report.holds && report.counterexample.is_none(), "p_ind rejected");
    let mut rejected = 0;
    while rejected < 20 {
        let sizes = shapes[rejected % shapes.len()];
        let cs = random_cs(&mut g, sizes);
        let p = random_member(&cs, &mut g);
        if &p == cs.independent_product() {
            continue;
        }
        let vertices = if rejected % 2 == 0 { vec![p] } else { vec![cs.independent_product().clone(), p] };
        let prior = e(PriorSet::new(cs.space(), vertices))?;
        let r = e(check_subspace_independence_axiom(&prior, cs.marginals(), 1000, rejected as u64))?;
        ensure!(!r.holds, "{sizes:?}: perturbed prior accepted");
        let ce = r.counterexample.ok_or(format!("{sizes:?}: no counterexample"))?;
        ensure!(
            ce.unconditioned.0.cmp(&ce.unconditioned.1) != ce.conditioned.0.cmp(&ce.conditioned.1),
            "counterexample does not flip the ranking"
        );
        rejected += 1;
    }
    Ok(format!("{{p_ind}} passes {} trials; 20/20 perturbations rejected", report.trials))
}

fn finance_fixture() -> Check {
    let scn = e(corrpoly::scenario::load_scenario(fixture("finance.scn")))?;
    let r = e(finance_from_scenario(&scn))?;
    ensure!(r.averaged == vec![int(6), int(0), int(0), int(-3)], "averaged {:?}", r.averaged);
    ensure!(e(run_finance(&ratio(1, 6), None))?.expected_return.is_zero(), "nonzero at a = 1/6");
    let doc = e(Document::read(fixture("finance.scn")))?;
    let rows = e(sweep_document(&doc))?;
    let mut points = 0;
    for row in rows.iter().filter(|r| r.act == "gold") {
        let a = row.param.clone().unwrap();
        let v = row.value.exact().unwrap();
        ensure!(*v == int(3) * &a - ratio(1, 2), "a = {a}: {v}");
        points += 1;
    }
    ensure!(points == 5, "grid has {points} points");
    let mut worst: f64 = 0.0;
    for k in 1..=8 {
        let a = ratio(k, 24);
        for rho in [-2.0, -0.5, 0.0, 0.25, 0.5, 0.9, 1.0, 1.5] {
            let c = e(run_finance(&a, Some(rho)))?.crra.unwrap();
            let (formula, direct) = (c.threshold_formula.unwrap(), c.threshold_direct.unwrap());
            worst = worst.max((formula - direct).abs());
            ensure!((formula - direct).abs() <= 1e-9, "a = {a}: {formula} vs {direct}");
            ensure!(c.buy == (rho <= formula), "a = {a}, ρ = {rho}: verdict");
        }
    }
    Ok(format!("averaged (6,0,0,-3); 3a-1/2 on 5 grid points; max threshold gap {worst:.1e}"))
}

fn insurance_fixture() -> Check {
    let scn = e(corrpoly::scenario::load_scenario(fixture("insurance.scn")))?;
    let v = scn.param("v").unwrap().clone();
    let x = scn.param("x").unwrap().clone();
    let p = scn.belief("insurer").unwrap().clone();
    let same = e(run_insurance(&v, &x, &p, &p))?;
    ensure!(same.verdict == InsuranceVerdict::UniquePrice, "p = p̂ verdict {}", same.verdict);
    ensure!(same.interval == Some((same.insurer_price.clone(), same.insurer_price.clone())), "interval");
    ensure!(same.profit == Some(int(0)), "profit {:?}", same.profit);
    ensure!(e(insurance_from_scenario(&scn))?.verdict == InsuranceVerdict::PositiveProfit, "fixture verdict");

    let bf = p.weights()[0].clone();
    let mut flips = 0;
    for k in 0..=10 {
        let sh = ratio(k, 100);
        let doc = e(Document::read(fixture("insurance.scn")))?;
        let scn = e(doc.instantiate_with(&[("sh".into(), sh.clone())]))?;
        let r = e(run_insurance(&v, &x, &p, scn.belief("insuree").unwrap()))?;
        let expected = match bf.cmp(&sh) {
            std::cmp::Ordering::Greater => InsuranceVerdict::PositiveProfit,
            std::cmp::Ordering::Equal => InsuranceVerdict::UniquePrice,
            std::cmp::Ordering::Less => InsuranceVerdict::MarketFailure,
        };
        ensure!(r.verdict == expected, "p̂(B,F) = {sh}: {} expected {}", r.verdict, expected);
        flips += 1;
    }
    Ok(format!("degenerate at p = p̂ with zero profit; verdicts exact on {flips} grid points"))
}

fn climate_fixture() -> Check {
    let doc = e(Document::read(fixture("climate.scn")))?;
    let base = e(doc.instantiate())?;
    let mut specs = Vec::new();
    for prior in [PriorSpec::Full, PriorSpec::Independent] {
        let mut d = doc.clone();
        d.prior = prior;
        specs.push(e(d.instantiate())?);
    }
    let mut g = rng(1010);
    let cs = base.correlation_set().clone();
    for k in 1..=3 {
        let mut s = base.clone();
        let members: Vec<JointDistribution> = (0..k).map(|_| random_member(&cs, &mut g)).collect();
        s.prior = e(PriorSet::new(&s.space, members))?;
        s.vertex_names = (1..=s.prior.len()).map(|j| format!("v{j}")).collect();
        specs.push(s);
    }
    let reference = e(climate_from_scenario(&base))?;
    for s in &specs {
        let rows = e(climate_from_scenario(s))?;
        ensure!(rows[0].value == reference[0].value && rows[1].value == reference[1].value, "BAU/Mitigation moved");
    }
    let ce: Vec<Rational> = e(sweep_document(&doc))?
        .into_iter()
        .filter(|r| r.act == "engineering")
        .map(|r| r.value.exact().unwrap().clone())
        .collect();
    ensure!(ce.len() == 5, "chain length {}", ce.len());
    ensure!(ce.windows(2).all(|w| w[1] <= w[0]), "V(CE) increased: {ce:?}");
    ensure!(e(evaluate(&base))? == reference, "generic evaluation differs");
    let shown: Vec<String> = ce.iter().map(|v| v.to_string()).collect();
    Ok(format!("BAU/Mitigation fixed across {} specs; V(CE) along chain: {}", specs.len() + 1, shown.join(" ≥ ")))
}

fn main() {
    let criteria: [(usize, &str, Duration, fn() -> Check); 10] = [
        (1, "dimension formula", Duration::from_secs(5), dimension_formula_family),
        (2, "cube example", Duration::from_secs(1), cube_example),
        (3, "extreme-point triangle", Duration::from_secs(60), extreme_point_triangle),
        (4, "exact capacity", Duration::from_secs(30), exact_capacity),
        (5, "non-convexity witness", Duration::from_secs(5), non_convexity_witness),
        (6, "MEU/CEU divergence", Duration::from_secs(5), meu_ceu_divergence),
        (7, "subspace independence", Duration::from_secs(60), subspace_independence),
        (8, "finance fixture", Duration::from_secs(30), finance_fixture),
        (9, "insurance fixture", Duration::from_secs(30), insurance_fixture),
        (10, "climate fixture", Duration::from_secs(30), climate_fixture),
    ];
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS {id:>2} {name} ({elapsed:.2?}): {detail}"),
            Err(why) => {
                failures += 1;
                println!("FAIL {id:>2} {name} ({elapsed:.2?}): {why}");
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
