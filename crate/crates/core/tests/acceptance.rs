//! End-to-end acceptance checks. Runs as a plain binary so each criterion
//! prints one PASS or FAIL line regardless of output capture.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{brute_hausdorff, brute_vpd, cells, dijkstra_phi_sym, metric, predicate};
use proptest::test_runner::{Config, TestCaseError, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symshape::gridworld::{Action, ACTION_COUNT};
use symshape::harness::{fixture, fixture_file, run_experiment, ResultRow};
use symshape::learner::evaluate;
use symshape::predicate::{hausdorff, vpd};
use symshape::product::{acceptance_probability_exact, expected_return, value_iteration};
use symshape::{
    parse_automaton, Domain, Metric, Policy, ProductMDP, RewardConfig, RewardModel,
    RewardStrategy, SymbolicAutomaton, Valuation,
};

type Outcome = Result<String, String>;

fn fixture_product(name: &str) -> (ProductMDP, RewardConfig, usize) {
    let cfg = fixture(name).unwrap().config;
    let p = cfg.product().unwrap();
    let rcfg = cfg.reward_config(&p).unwrap();
    (p, rcfg, cfg.learner.horizon)
}

fn random_policy(states: usize, rng: &mut ChaCha8Rng) -> Policy {
    Policy::Stochastic(
        (0..states)
            .map(|_| {
                let mut w = [0.0; ACTION_COUNT];
                for x in w.iter_mut() {
                    *x = if rng.gen_bool(0.3) { 0.0 } else { rng.gen::<f64>() };
                }
                w[rng.gen_range(0..ACTION_COUNT)] += 0.1;
                let total: f64 = w.iter().sum();
                w.map(|x| x / total)
            })
            .collect(),
    )
}

fn sparse_return_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for name in ["recurrence", "reach"] {
        let (p, rcfg, n) = fixture_product(name);
        let model = RewardModel::new(&p, RewardStrategy::Sparse, rcfg).unwrap();
        for _ in 0..50 {
            let pol = random_policy(p.state_count(), &mut rng);
            let v = expected_return(&p, &pol, &model, n);
            let pr = acceptance_probability_exact(&p, &pol, n);
            worst = worst.max((v - rcfg.d_max * pr).abs());
        }
    }
    let msg = format!("max |V - d_max * Pr| = {worst:.2e} over 100 policies");
    if worst <= 1e-9 { Ok(msg) } else { Err(msg) }
}

fn policy_invariance() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for name in ["reach", "recurrence"] {
        let (p, rcfg, n) = fixture_product(name);
        let sparse = RewardModel::new(&p, RewardStrategy::Sparse, rcfg).unwrap();
        let shaped = RewardModel::new(&p, RewardStrategy::SymbolicShaped, rcfg).unwrap();
        let p_star = value_iteration(&p, &sparse, n).initial_value(&p) / rcfg.d_max;
        let got = acceptance_probability_exact(&p, &value_iteration(&p, &shaped, n).policy, n);
        ok &= (got - p_star).abs() <= 1e-9;
        parts.push(format!("{name}: p* = {p_star:.12}, shaped = {got:.12}"));
    }
    let msg = parts.join("; ");
    if ok { Ok(msg) } else { Err(msg) }
}

fn automaton(file: &str) -> SymbolicAutomaton {
    parse_automaton(fixture_file(file).unwrap()).unwrap()
}

fn eta_case_studies() -> Outcome {
    let reach = automaton("bounded_reach.aut");
    let branch = automaton("branching.aut");
    let eta = |a: &SymbolicAutomaton, q: &str| a.compute_eta().get(a.location(q).unwrap());
    let counters: Vec<_> = ["q0", "q1", "q2", "q3"].iter().map(|q| eta(&reach, q)).collect();
    let branching: Vec<_> = ["q0", "q1", "q2"].iter().map(|q| eta(&branch, q)).collect();
    let msg = format!("bounded reach q0..q3 = {counters:?}; branching q0, q1, q2 = {branching:?}");
    if counters.iter().all(|&e| e == Some(1)) && branching == [Some(2), Some(2), Some(1)] {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn lavaei_degenerate() -> Outcome {
    let reach = automaton("bounded_reach.aut");
    let lp = reach.compute_lavaei(&reach.compute_eta(), 1.0);
    let counters: Vec<_> = ["q0", "q1", "q2", "q3"].iter().map(|q| reach.location(q).unwrap()).collect();
    let mut nonzero = 0;
    let mut checked = 0;
    for t in reach.transitions() {
        if counters.contains(&t.from) && counters.contains(&t.to) {
            checked += 1;
            if lp.reward(t.from, t.to) != 0.0 {
                nonzero += 1;
            }
        }
    }
    let msg = format!("{checked} counter transitions, {nonzero} with nonzero reward");
    if nonzero == 0 && checked > 0 { Ok(msg) } else { Err(msg) }
}

fn curve(rows: &[ResultRow], s: RewardStrategy) -> Vec<&ResultRow> {
    rows.iter().filter(|r| r.strategy == s).collect()
}

fn first_reaching(rows: &[ResultRow], s: RewardStrategy, level: f64) -> Option<usize> {
    curve(rows, s).iter().find(|r| r.estimate >= level).map(|r| r.epoch)
}

fn final_estimate(rows: &[ResultRow], s: RewardStrategy) -> f64 {
    curve(rows, s).last().map_or(f64::NAN, |r| r.estimate)
}

fn learn(name: &str) -> Vec<ResultRow> {
    run_experiment(&fixture(name).unwrap().config).unwrap()
}

fn show(epoch: Option<usize>) -> String {
    epoch.map_or("never".into(), |e| e.to_string())
}

fn reach_ordering() -> Outcome {
    use RewardStrategy::*;
    let rows = learn("reach");
    let sym = first_reaching(&rows, SymbolicShaped, 0.9);
    let sparse = first_reaching(&rows, Sparse, 0.9);
    let lav = first_reaching(&rows, LavaeiShaped, 0.9);
    let top = first_reaching(&rows, SymbolicShaped, 0.95);
    let earlier = |other: Option<usize>| match (sym, other) {
        (Some(a), Some(b)) => a < b,
        (Some(_), None) => true,
        _ => false,
    };
    let msg = format!(
        "first >= 0.9 at symbolic {}, sparse {}, lavaei {}; symbolic >= 0.95 at {}",
        show(sym),
        show(sparse),
        show(lav),
        show(top)
    );
    if earlier(sparse) && earlier(lav) && top.is_some() { Ok(msg) } else { Err(msg) }
}

fn sequential_separation() -> Outcome {
    use RewardStrategy::*;
    let rows = learn("sequential");
    let (sym, sparse, lav) = (
        final_estimate(&rows, SymbolicShaped),
        final_estimate(&rows, Sparse),
        final_estimate(&rows, LavaeiShaped),
    );
    let epoch = curve(&rows, SymbolicShaped).last().map_or(0, |r| r.epoch);
    let msg = format!("at {epoch} episodes: symbolic {sym:.2}, sparse {sparse:.2}, lavaei {lav:.2}");
    if epoch >= 50_000 && sym >= 0.9 && sparse <= 0.1 && lav <= 0.1 { Ok(msg) } else { Err(msg) }
}

fn branching_ordering() -> Outcome {
    use RewardStrategy::*;
    let rows = learn("branching");
    let (sym, sparse, lav) = (
        final_estimate(&rows, SymbolicShaped),
        final_estimate(&rows, Sparse),
        final_estimate(&rows, LavaeiShaped),
    );
    let msg = format!("final symbolic {sym:.2}, sparse {sparse:.2}, lavaei {lav:.2}");
    if sym >= sparse && sparse - lav >= 0.3 && lav <= 0.2 { Ok(msg) } else { Err(msg) }
}

fn oracle_equivalence() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 300,
        failure_persistence: None,
        ..Config::default()
    });
    let distances = runner.run(
        &(predicate(9), predicate(9), 1i64..=10, 1i64..=10, metric()),
        |(a, b, w, h, m)| {
            let dom = Domain::grid(w as usize, h as usize);
            for (x, y) in cells(w, h) {
                let v = Valuation::new([x, y]);
                if vpd(&v, &a, &dom, m).unwrap() != brute_vpd(&a, (x, y), w, h, m) {
                    return Err(TestCaseError::fail(format!("vpd at ({x}, {y})")));
                }
            }
            if hausdorff(&a, &b, &dom, m).unwrap() != brute_hausdorff(&a, &b, w, h, m) {
                return Err(TestCaseError::fail("hausdorff"));
            }
            Ok(())
        },
    );
    if let Err(e) = distances {
        return Err(format!("distance oracle: {e}"));
    }

    let mut shipped = vec![
        automaton("bounded_reach.aut"),
        automaton("sequential.aut"),
        automaton("branching.aut"),
    ];
    shipped.push(fixture_product("recurrence").0.spec().clone());
    for aut in &shipped {
        for m in [Metric::Manhattan, Metric::Euclidean, Metric::Chebyshev] {
            if aut.compute_phi_sym(m).unwrap().as_slice() != &dijkstra_phi_sym(aut, m)[..] {
                return Err(format!("subtask progress differs under {m}"));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let episodes = 20_000;
    for name in ["reach", "recurrence"] {
        let (p, rcfg, n) = fixture_product(name);
        let model = RewardModel::new(&p, RewardStrategy::Sparse, rcfg).unwrap();
        let policies = [
            Policy::uniform(p.state_count()),
            random_policy(p.state_count(), &mut rng),
            value_iteration(&p, &model, n).policy,
        ];
        for pol in &policies {
            let exact = acceptance_probability_exact(&p, pol, n);
            let est = evaluate(&p, pol, episodes, n, &mut rng) as f64 / episodes as f64;
            let sigma = (exact * (1.0 - exact) / episodes as f64).sqrt();
            let z = if sigma > 0.0 { (est - exact).abs() / sigma } else if est == exact { 0.0 } else { f64::INFINITY };
            worst = worst.max(z);
        }
    }
    let msg = format!("300 random distance cases exact; subtask progress exact; Monte Carlo worst {worst:.2} sigma");
    if worst <= 3.0 { Ok(msg) } else { Err(msg) }
}

fn telescoping() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    let names = ["reach", "recurrence", "sequential", "branching"];
    for name in names {
        let (p, rcfg, n) = fixture_product(name);
        let sparse = RewardModel::new(&p, RewardStrategy::Sparse, rcfg).unwrap();
        let shaped = RewardModel::new(&p, RewardStrategy::SymbolicShaped, rcfg).unwrap();
        let phi = shaped.potential().unwrap();
        for _ in 0..250 {
            let mut s = p.initial_state();
            let (mut rs, mut rh) = (0.0, 0.0);
            for _ in 0..n {
                let s2 = p.step(s, Action::ALL[rng.gen_range(0..ACTION_COUNT)], &mut rng);
                rs += sparse.reward(s, s2);
                rh += shaped.reward(s, s2);
                s = s2;
            }
            worst = worst.max((rh - rs - (phi.get(p.initial_state()) - phi.get(s))).abs());
        }
    }
    let msg = format!("1000 episodes, max deviation {worst:.2e}");
    if worst <= 1e-9 { Ok(msg) } else { Err(msg) }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("sparse return equals d_max times acceptance", sparse_return_identity),
        ("shaped optimum keeps optimal acceptance", policy_invariance),
        ("progress levels of the case studies", eta_case_studies),
        ("counter-based potential gives zero reward on bounded reach", lavaei_degenerate),
        ("reach task ordering", reach_ordering),
        ("sequential task separation", sequential_separation),
        ("branching task ordering", branching_ordering),
        ("oracle equivalence", oracle_equivalence),
        ("telescoping returns", telescoping),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail}) [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({detail}) [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
