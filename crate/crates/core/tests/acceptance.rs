//! Acceptance gate: every criterion prints one PASS/FAIL line; any failure
//! makes the binary exit non-zero.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use amin_core::bat::{self, TargetSubsetReliability};
use amin_core::model::{n_all, AminNetwork, NodeSubset, StateDistribution, StateLabel};
use amin_core::oracle::{self, DEFAULT_BUDGET};
use amin_core::spread::{self, StateVector};
use amin_core::ugfm::{self, UgfPolynomial, UgfmError, DEFAULT_TERM_CAP};
use amin_core::workbench::{gen_random_amin, gen_semi_complete, RandomAminConfig};

const R_TOL: f64 = 1e-6;
const ENGINE_TOL: f64 = 1e-12;
const UNITY_TOL: f64 = 1e-9;
const EXHAUSTIVE_LIMIT: u128 = 1_000_000;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn example4() -> (AminNetwork, StateDistribution) {
    let net = AminNetwork::new(4, [(1, 2), (1, 3), (2, 3), (2, 4), (3, 4)], &[4]).unwrap();
    let dist = StateDistribution::uniform(&net);
    (net, dist)
}

fn odometer_feasible(net: &AminNetwork, required: NodeSubset) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    bat::enumerate_odometer(net, required, |x, _, ok| {
        if ok {
            out.insert(x.coordinates(net));
        }
    });
    out
}

fn frontier_feasible(
    net: &AminNetwork,
    dist: &StateDistribution,
    required: NodeSubset,
) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    bat::enumerate_frontier_dfs(net, dist, required, |v| {
        out.insert(v.to_flexible().to_state_vector(net).coordinates(net));
    });
    out
}

/// Every label vector over the full range of every transmitting node.
fn for_each_label_vector(net: &AminNetwork, mut f: impl FnMut(&StateVector)) {
    let nodes = net.transmitting().to_vec();
    let mut x = StateVector::zero(net);
    'outer: loop {
        f(&x);
        for &i in &nodes {
            let next = x.get(i).0 + 1;
            if next as usize <= net.state_count(i) {
                x.set(i, StateLabel(next));
                continue 'outer;
            }
            x.set(i, StateLabel::Z);
        }
        break;
    }
}

/// The 100 seeded instances shared by criteria 4, 5 and 7.
fn random_instances() -> Vec<(u64, AminNetwork, StateDistribution)> {
    (1..=100u64)
        .map(|seed| {
            let cfg = RandomAminConfig {
                nodes: 2 + (seed as usize % 6),
                arc_probability: 0.3 + 0.7 * ((seed * 37) % 100) as f64 / 100.0,
                seed,
                dirichlet: true,
            };
            let (net, dist) = gen_random_amin(&cfg);
            (seed, net, dist)
        })
        .collect()
}

fn sink_targets(net: &AminNetwork) -> AminNetwork {
    let sinks: Vec<usize> = (2..=net.node_count())
        .filter(|&i| net.out_degree(i) == 0)
        .collect();
    net.with_targets(&sinks).unwrap()
}

fn criterion_1() -> Outcome {
    let (net, dist) = example4();
    let t = NodeSubset::singleton(4);
    let start = Instant::now();
    let b = bat::reliability_one_to_sink(&net, &dist, 4);
    let d = bat::reliability_frontier(&net, &dist, t);
    let u = ugfm::reliability_ugfm(&net, &dist, DEFAULT_TERM_CAP).map_err(|e| e.to_string())?;
    let o = oracle::brute_force_reliability(&net, &dist, t, DEFAULT_BUDGET)
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    for (name, r) in [
        ("bat", b.reliability),
        ("dfs", d.reliability),
        ("ugfm", u.reliability(t)),
        ("oracle", o),
    ] {
        ensure(r == 0.468750, || format!("{name} returned {r}"))?;
    }
    ensure(
        b.counters.feasible == 11 && d.counters.feasible == 11,
        || {
            format!(
                "feasible counts {} / {}",
                b.counters.feasible, d.counters.feasible
            )
        },
    )?;
    let expected: BTreeSet<Vec<u32>> = [
        [2, 3, 0],
        [4, 3, 1],
        [2, 4, 1],
        [4, 4, 1],
        [3, 0, 2],
        [4, 1, 2],
        [2, 2, 2],
        [4, 2, 2],
        [4, 3, 2],
        [2, 4, 2],
        [4, 4, 2],
    ]
    .into_iter()
    .map(|v| v.to_vec())
    .collect();
    let found = odometer_feasible(&net, t);
    ensure(found == expected, || format!("feasible vectors {found:?}"))?;
    ensure(elapsed < Duration::from_millis(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "R = 0.468750 from all four engines, 11 vectors, {elapsed:?}"
    ))
}

fn criterion_2() -> Outcome {
    let rows = [
        (5, 2295u128, 388u64, 0.821289, 2025u64),
        (6, 75735, 11164, 0.884979, 71145),
        (7, 4_922_775, 667_396, 0.928662, 4_771_305),
    ];
    let mut t7 = Duration::ZERO;
    for (n, all, feasible, r, visited) in rows {
        let (net, dist) = gen_semi_complete(n);
        let out = bat::reliability_one_to_sink(&net, &dist, n);
        ensure(n_all(&net) == all, || {
            format!("n={n}: N_all {}", n_all(&net))
        })?;
        ensure(out.counters.feasible == feasible, || {
            format!("n={n}: N {}", out.counters.feasible)
        })?;
        ensure((out.reliability - r).abs() <= R_TOL, || {
            format!("n={n}: R {}", out.reliability)
        })?;
        ensure(out.counters.visited == visited, || {
            format!("n={n}: visited {}", out.counters.visited)
        })?;
        if n == 7 {
            t7 = out.counters.elapsed;
        }
    }
    ensure(t7 < Duration::from_secs(5), || {
        format!("n=7 BAT took {t7:?}")
    })?;
    Ok(format!("rows n=5,6,7 exact; BAT n=7 in {t7:?}"))
}

fn criterion_3() -> Outcome {
    for n in 5..=7 {
        let (net, dist) = gen_semi_complete(n);
        ugfm::reliability_ugfm(&net, &dist, DEFAULT_TERM_CAP)
            .map_err(|e| format!("n={n}: ugfm failed: {e}"))?;
    }
    let (net, dist) = gen_semi_complete(8);
    let burst = match ugfm::reliability_ugfm(&net, &dist, DEFAULT_TERM_CAP) {
        Err(e @ UgfmError::TermCapExceeded { .. }) => e.to_string(),
        other => return Err(format!("n=8: expected cap failure, got {other:?}")),
    };
    let out = bat::reliability_to_targets(
        &net,
        &dist,
        NodeSubset::singleton(8),
        bat::threads_from_env(),
    );
    ensure(out.counters.feasible == 81_974_044, || {
        format!("n=8: N {}", out.counters.feasible)
    })?;
    ensure((out.reliability - 0.957076).abs() <= R_TOL, || {
        format!("n=8: R {}", out.reliability)
    })?;
    Ok(format!(
        "UGFM n<=7 ok, n=8 {burst}; BAT n=8 R = {:.6}, N = {} in {:?}",
        out.reliability, out.counters.feasible, out.counters.elapsed
    ))
}

fn criterion_4(instances: &[(u64, AminNetwork, StateDistribution)]) -> Outcome {
    let mut counted = 0;
    for (seed, net, dist) in instances {
        let t = NodeSubset::singleton(net.node_count());
        let b = bat::reliability_one_to_sink(net, dist, net.node_count());
        let o = oracle::brute_force_reliability(net, dist, t, DEFAULT_BUDGET)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        let u = ugfm::reliability_ugfm(net, dist, u64::MAX)
            .map_err(|e| format!("seed {seed}: {e}"))?
            .reliability(t);
        ensure((b.reliability - o).abs() <= ENGINE_TOL, || {
            format!("seed {seed}: bat {} vs oracle {o}", b.reliability)
        })?;
        ensure((u - b.reliability).abs() <= ENGINE_TOL, || {
            format!("seed {seed}: ugfm {u} vs bat {}", b.reliability)
        })?;
        if n_all(net) <= EXHAUSTIVE_LIMIT {
            let c = oracle::brute_force_feasible_count(net, t, DEFAULT_BUDGET)
                .map_err(|e| format!("seed {seed}: {e}"))?;
            ensure(c == b.counters.feasible, || {
                format!(
                    "seed {seed}: oracle count {c} vs bat {}",
                    b.counters.feasible
                )
            })?;
            counted += 1;
        }
    }
    Ok(format!(
        "{} instances agree to 1e-12; feasible counts match on {counted}",
        instances.len()
    ))
}

fn criterion_5(instances: &[(u64, AminNetwork, StateDistribution)]) -> Outcome {
    let mut checked = 0;
    let mut cases: Vec<(String, AminNetwork, StateDistribution)> = Vec::new();
    let (net, dist) = example4();
    cases.push(("example4".into(), net, dist));
    for n in 2..=6 {
        let (net, dist) = gen_semi_complete(n);
        cases.push((format!("semi{n}"), net, dist));
    }
    for (seed, net, dist) in instances {
        cases.push((format!("seed {seed}"), net.clone(), dist.clone()));
        cases.push((
            format!("seed {seed} sinks"),
            sink_targets(net),
            dist.clone(),
        ));
    }
    for (name, net, dist) in &cases {
        if n_all(net) > EXHAUSTIVE_LIMIT {
            continue;
        }
        let mut mass = amin_core::sum::Accumulator::new();
        for_each_label_vector(net, |x| {
            if spread::propagate(net, x).consistent {
                mass.add(spread::probability(net, dist, x));
            }
        });
        ensure((mass.value() - 1.0).abs() <= UNITY_TOL, || {
            format!("{name}: consistent mass {}", mass.value())
        })?;
        let buckets: TargetSubsetReliability = bat::reliability_by_target_subset(net, dist);
        ensure((buckets.total() - 1.0).abs() <= UNITY_TOL, || {
            format!("{name}: bucket mass {}", buckets.total())
        })?;
        checked += 1;
    }
    Ok(format!("{checked} instances sum to 1 within 1e-9"))
}

fn criterion_6() -> Outcome {
    let (net, dist) = example4();
    let set = |v: &[usize]| NodeSubset::from_nodes(v.iter().copied());
    let u1 = UgfPolynomial::initial(&net, &dist, DEFAULT_TERM_CAP).map_err(|e| e.to_string())?;
    let u2 = u1.compose(&net, &dist, 2).map_err(|e| e.to_string())?;
    let shape: Vec<(NodeSubset, u64)> = u2
        .terms()
        .iter()
        .map(|t| (t.exponent, t.multiplicity))
        .collect();
    let want = vec![(set(&[3]), 4), (set(&[4]), 1), (set(&[3, 4]), 3)];
    ensure(shape == want, || format!("U(2) = {shape:?}"))?;
    let out = ugfm::reliability_ugfm(&net, &dist, DEFAULT_TERM_CAP).map_err(|e| e.to_string())?;
    let c = out
        .polynomial
        .term(set(&[4]))
        .map(|t| t.coefficient)
        .ok_or("no z^{4} term")?;
    ensure(c == 15.0 / 32.0, || format!("coefficient of z^{{4}} = {c}"))?;
    Ok("U(2) exponents {3},{4},{3,4} from 4/1/3 products; z^{4} = 15/32".into())
}

fn criterion_7(instances: &[(u64, AminNetwork, StateDistribution)]) -> Outcome {
    let mut cases: Vec<(String, AminNetwork, StateDistribution)> = Vec::new();
    let (net, dist) = example4();
    cases.push(("example4".into(), net, dist));
    let flex = AminNetwork::new(5, [(1, 2), (1, 3), (2, 3), (2, 5), (3, 4)], &[4, 5]).unwrap();
    let flex_dist = StateDistribution::uniform(&flex);
    cases.push(("flexible example".into(), flex, flex_dist));
    for n in 2..=6 {
        let (net, dist) = gen_semi_complete(n);
        cases.push((format!("semi{n}"), net, dist));
    }
    for (seed, net, dist) in instances {
        cases.push((format!("seed {seed}"), net.clone(), dist.clone()));
    }
    for (name, net, dist) in &cases {
        let required = net.targets();
        let a = odometer_feasible(net, required);
        let b = frontier_feasible(net, dist, required);
        ensure(a == b, || {
            format!(
                "{name}: odometer {} vs frontier {} vectors",
                a.len(),
                b.len()
            )
        })?;
        let r1 = bat::reliability_to_targets(net, dist, required, 1).reliability;
        let r2 = bat::reliability_to_targets(net, dist, required, 1).reliability;
        let d1 = bat::reliability_frontier(net, dist, required).reliability;
        let d2 = bat::reliability_frontier(net, dist, required).reliability;
        ensure(
            r1.to_bits() == r2.to_bits() && d1.to_bits() == d2.to_bits(),
            || format!("{name}: repeated runs differ"),
        )?;
        ensure((r1 - d1).abs() <= ENGINE_TOL, || {
            format!("{name}: odometer {r1} vs frontier {d1}")
        })?;
        if let (Ok(u1), Ok(u2)) = (
            ugfm::reliability_ugfm(net, dist, u64::MAX),
            ugfm::reliability_ugfm(net, dist, u64::MAX),
        ) {
            ensure(
                u1.reliability(required).to_bits() == u2.reliability(required).to_bits(),
                || format!("{name}: repeated UGFM runs differ"),
            )?;
        }
    }
    Ok(format!(
        "{} instances: identical feasible sets, bit-identical reruns",
        cases.len()
    ))
}

fn main() {
    let instances = random_instances();
    let criteria: Vec<Criterion> = vec![
        ("AC1 worked example", Box::new(criterion_1)),
        ("AC2 semi-complete rows n=5..7", Box::new(criterion_2)),
        ("AC3 UGFM cap failure, BAT n=8", Box::new(criterion_3)),
        (
            "AC4 oracle equivalence",
            Box::new(|| criterion_4(&instances)),
        ),
        (
            "AC5 partition of unity",
            Box::new(|| criterion_5(&instances)),
        ),
        ("AC6 UGFM algebra checkpoint", Box::new(criterion_6)),
        (
            "AC7 engine equivalence, determinism",
            Box::new(|| criterion_7(&instances)),
        ),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        match run() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
