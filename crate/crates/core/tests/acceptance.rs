//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test --test acceptance`. The (4,2,2) classification is
//! skipped unless `--slow` is passed after `--` or `LO_SLOW=1` is set; it
//! takes about a minute in release builds.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use lo_core::behavior::uniform_box;
use lo_core::boxes::{
    default_tolerance, fig4_family, lo_threshold, pr_box, tensor_power, AffineFamily,
};
use lo_core::classify::{classify, classify_scenario, CanonicalForm, Classifier};
use lo_core::cliques::enumerate_maximal_cliques;
use lo_core::dgp::{gyni_instance, DgpInstance};
use lo_core::fixtures;
use lo_core::graph::OrthogonalityGraph;
use lo_core::inequality::gyni;
use lo_core::nspolytope::ns_max;
use lo_core::rational::{rat, to_f64, Rational};
use lo_core::scenario::Scenario;
use lo_core::symmetry::{all_symmetries, apply_symmetry};
use lo_core::witness::violation_witness;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn sc(n: usize, m: usize, d: usize) -> Scenario {
    Scenario::new(n, m, d).unwrap()
}

fn gyni_ns_maximum() -> Outcome {
    let v = ns_max(&gyni(3).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    check(v == rat(4, 3), format!("ns_max = {v}, expected 4/3"))?;
    Ok(format!("ns_max(GYNI3) = {v}"))
}

fn pr_squared_violation() -> Outcome {
    let pr2 = tensor_power(&pr_box(), 2).unwrap();
    let v = fixtures::five_event().unwrap().evaluate(&pr2).unwrap();
    check(v == rat(5, 4), format!("value {v}, expected 5/4"))?;
    Ok(format!("five-event value on PR⊗PR = {v}"))
}

fn pr_squared_cliques() -> Outcome {
    let pr2 = tensor_power(&pr_box(), 2).unwrap();
    let full = OrthogonalityGraph::build(pr2.scenario()).unwrap();
    let sub = full.support_subgraph(&pr2).unwrap();
    check(
        sub.order() == 64,
        format!("support has {} vertices", sub.order()),
    )?;
    let found = enumerate_maximal_cliques(sub.bits(), 5, None);
    check(!found.truncated, "enumeration truncated")?;
    check(!found.cliques.is_empty(), "no clique of size ≥ 5")?;
    let sizes: Vec<usize> = found.cliques.iter().map(|c| c.len()).collect();
    check(sizes.iter().all(|&s| s == 5), format!("sizes {sizes:?}"))?;
    check(
        found.cliques.iter().all(|c| c.is_maximal_in(sub.bits())),
        "non-maximal clique emitted",
    )?;
    Ok(format!(
        "{} maximal cliques of size ≥ 5, all of size 5",
        found.cliques.len()
    ))
}

fn noisy_threshold() -> Outcome {
    let ten = fixtures::ten_event().unwrap();
    let t = lo_threshold(&AffineFamily::noisy_pr(), &ten, 2, &default_tolerance())
        .map_err(|e| e.to_string())?;
    check(
        t.width() <= rat(1, 10_000),
        format!("bracket width {}", t.width()),
    )?;
    let (lo, hi) = (to_f64(&t.lower), to_f64(&t.upper));
    check(
        (lo - 0.72).abs() <= 0.01 && (hi - 0.72).abs() <= 0.01,
        format!("bracket [{lo}, {hi}]"),
    )?;
    Ok(format!("q* in [{lo:.6}, {hi:.6}]"))
}

fn bipartite_lo_equals_ns() -> Outcome {
    let cliques = common::maximal_clique_inequalities(sc(2, 2, 2));
    check(
        cliques.len() == 12,
        format!("{} maximal cliques in (2,2,2)", cliques.len()),
    )?;
    check(
        cliques.iter().all(|c| c.len() == 4),
        "clique size other than 4",
    )?;
    for c in &cliques {
        let v = ns_max(c).unwrap();
        check(
            v == Rational::one(),
            format!("ns_max {v} for {}", c.to_text()),
        )?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut boxes = 0;
    for s in [sc(2, 2, 2), sc(2, 3, 2)] {
        let ineqs = common::maximal_clique_inequalities(s);
        for _ in 0..1000 {
            let b = common::random_ns_vertex(s, &mut rng);
            check(b.is_no_signaling(), "LP vertex signals")?;
            if let Some(i) = ineqs.iter().find(|i| i.is_violated_by(&b).unwrap()) {
                return Err(format!("NS box violates {}", i.to_text()));
            }
            boxes += 1;
        }
    }
    Ok(format!(
        "12 cliques with ns_max 1; {boxes} random NS vertices satisfy every clique"
    ))
}

fn tripartite_classification() -> Outcome {
    let s = sc(3, 2, 2);
    let ineqs = common::maximal_clique_inequalities(s);
    let count = ineqs.len();
    let result = classify(ineqs, s, CanonicalForm::LocalSignature).map_err(|e| e.to_string())?;
    check(
        result.nontrivial_count() == 1,
        format!("{} nontrivial classes", result.nontrivial_count()),
    )?;
    let class = result.nontrivial().next().unwrap();
    let g = gyni(3).unwrap();
    let equivalent = all_symmetries(s)
        .iter()
        .any(|op| apply_symmetry(op, &g).unwrap() == class.representative);
    check(equivalent, "representative is not a relabeling of GYNI(3)")?;
    let key = Classifier::new(s, CanonicalForm::LocalSignature)
        .unwrap()
        .canonical_key(&g)
        .unwrap();
    check(key == class.key, "GYNI(3) has a different canonical key")?;
    Ok(format!(
        "{count} maximal cliques, {} classes, 1 nontrivial (ns_max {}), representative ≅ GYNI(3)",
        result.classes.len(),
        class.ns_max
    ))
}

fn four_party_classification() -> Outcome {
    let result =
        classify_scenario(sc(4, 2, 2), CanonicalForm::LocalSignature).map_err(|e| e.to_string())?;
    let total: u64 = result.classes.iter().map(|c| c.inequality_count).sum();
    let detail = format!(
        "{} classes in total, {} nontrivial, {} trivial ({} maximal cliques, {} through event 0)",
        result.classes.len(),
        result.nontrivial_count(),
        result.trivial_count(),
        total,
        result.inputs
    );
    check(result.nontrivial_count() == 35, detail.clone())?;
    Ok(format!("{detail}; 35 matches the nontrivial count"))
}

fn dgp_correspondence() -> Outcome {
    let s = sc(2, 2, 2);
    let outcomes: Vec<Vec<usize>> = (0..4).map(|k| vec![k >> 1, k & 1]).collect();
    let mut instances = 0;
    let mut difficult = 0;
    for mask in 1u32..16 {
        let set: Vec<Vec<usize>> = (0..4)
            .filter(|k| mask >> k & 1 == 1)
            .map(|k| outcomes[k].clone())
            .collect();
        if set.len() < 2 {
            continue;
        }
        for code in 0..4usize.pow(set.len() as u32) {
            let entries = set
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    let x = code / 4usize.pow(i as u32) % 4;
                    (a.clone(), vec![x >> 1, x & 1])
                })
                .collect();
            let inst = DgpInstance::new(s, entries).unwrap();
            let blind = Rational::new(1.into(), inst.size().into());
            let value = inst.classical_value().unwrap();
            if inst.is_maximally_difficult() != (value == blind) {
                return Err(format!("mismatch on {:?}: value {value}", inst.entries()));
            }
            difficult += inst.is_maximally_difficult() as usize;
            instances += 1;
        }
    }
    let v = gyni_instance(3).unwrap().classical_value().unwrap();
    check(v == rat(1, 4), format!("GYNI(3) classical value {v}"))?;
    Ok(format!(
        "{instances} instances ({difficult} maximally difficult) agree; GYNI(3) classical value {v}"
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..100 {
        let n = 1 + trial % 20;
        let density = [0.2, 0.5, 0.8][trial % 3];
        let g = common::random_graph(n, density, &mut rng);
        let mut fast = enumerate_maximal_cliques(&g, 1, None).cliques;
        fast.sort();
        let naive = common::naive_maximal_cliques(&g);
        if fast != naive {
            return Err(format!(
                "trial {trial}: {} vs {} cliques",
                fast.len(),
                naive.len()
            ));
        }
    }
    Ok("100 random graphs (1 to 20 vertices) agree".into())
}

fn local_mixtures_satisfy_lo() -> Outcome {
    let s = sc(3, 2, 2);
    let ineqs = common::maximal_clique_inequalities(s);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..100 {
        let b = common::random_local_mixture(s, &mut rng);
        if let Some(i) = ineqs.iter().find(|i| i.is_violated_by(&b).unwrap()) {
            return Err(format!("local box violates {}", i.to_text()));
        }
    }
    Ok(format!(
        "100 local mixtures satisfy all {} maximal-clique inequalities",
        ineqs.len()
    ))
}

fn mixture_family_check() -> Outcome {
    let five = fixtures::five_event().unwrap();
    let pr_like = tensor_power(&fig4_family(&rat(1, 1), &rat(0, 1)).unwrap(), 2).unwrap();
    check(
        five.is_violated_by(&pr_like).unwrap(),
        "fig4(1,0)⊗2 does not violate",
    )?;
    let noise = tensor_power(&fig4_family(&rat(0, 1), &rat(0, 1)).unwrap(), 2).unwrap();
    check(
        noise == uniform_box(sc(4, 2, 2)),
        "fig4(0,0)⊗2 is not uniform",
    )?;
    let full = OrthogonalityGraph::build(sc(4, 2, 2)).unwrap();
    check(
        violation_witness(&noise, &full).unwrap().is_none(),
        "fig4(0,0)⊗2 violates some inequality",
    )?;
    Ok("fig4(1,0)⊗2 violates the five-event inequality; fig4(0,0)⊗2 violates none".into())
}

/// Number, name, check, and whether it is gated as slow.
type Criterion = (u32, &'static str, fn() -> Outcome, bool);

fn main() -> ExitCode {
    let slow =
        std::env::args().any(|a| a == "--slow") || std::env::var("LO_SLOW").is_ok_and(|v| v == "1");
    let criteria: Vec<Criterion> = vec![
        (1, "GYNI NS maximum", gyni_ns_maximum, false),
        (2, "PR² violation", pr_squared_violation, false),
        (3, "PR² clique discovery", pr_squared_cliques, false),
        (4, "noisy threshold", noisy_threshold, false),
        (5, "bipartite LO¹ = NS", bipartite_lo_equals_ns, false),
        (
            6,
            "(3,2,2) classification",
            tripartite_classification,
            false,
        ),
        (7, "(4,2,2) classification", four_party_classification, true),
        (8, "DGP correspondence", dgp_correspondence, false),
        (9, "oracle equivalence", oracle_equivalence, false),
        (
            10,
            "local mixtures satisfy LO",
            local_mixtures_satisfy_lo,
            false,
        ),
        (11, "PR/local/noise mixture", mixture_family_check, false),
    ];
    let mut failed = 0;
    for (id, name, run, is_slow) in criteria {
        if is_slow && !slow {
            println!("criterion {id:>2} SKIP  {name}: slow, pass --slow or set LO_SLOW=1");
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id:>2} PASS  {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>2} FAIL  {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
