//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rulingset::classify::classify_nodes;
use rulingset::harness::clique::{round_bound, tight_rounds};
use rulingset::harness::stream::{expected_passes, MemoryStream};
use rulingset::mis::{greedy_mis, luby_mis, random_order};
use rulingset::ruling::{main_iteration, sample_vsamp, Diagnostic};
use rulingset::verify::{
    check_bad_inc_lower, check_final_residual_size, check_gsamp_size, check_good_coverage_rate,
    check_residual_purity, check_setaside_size, label_stability, mis_oracle_check, Status,
};
use rulingset::{
    generate, parallel_two_ruling_set, run_congested_clique, run_streaming, verify_ruling_set, two_hop_covered,
    AlgoConfig, Graph, GeneratorSpec, NodeSet, RngStream, RulingSetResult,
};

// Pinned tolerances.
const C1_RUNS: u64 = 1000;
const C1_TIME_LIMIT_SECS: f64 = 600.0;
const C3_MAX_WORDS_PER_NODE: f64 = 16.0;
const C3_SEEDS: u64 = 20;
const C4_BUDGET_K: f64 = 8.0;
const C4_SEEDS: u64 = 100;
const C4_MAX_VIOLATION_RATE: f64 = 0.01;
const C5_SEEDS: u64 = 100;
const C5_BUDGET_K: f64 = 8.0;
const C5_MEAN_GSAMP_PER_NODE: f64 = 2.0;
const C7_DEGREE: usize = 256;
const C7_GAMMA: f64 = 2.0;
const C7_MIN_NODE_TRIALS: u64 = 100_000;
const C8_LOG_FACTOR: f64 = 8.0;
const C9_GRAPHS: u64 = 200;
const C9_MAX_N: usize = 50;
const C10_SEEDS: u64 = 100;
const C11_PAIRS: u64 = 50;

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn spec(s: &str, seed: u64) -> GeneratorSpec {
    s.parse::<GeneratorSpec>().unwrap().with_seed(seed)
}

fn gen(s: &str, seed: u64) -> Graph {
    generate(&spec(s, seed)).unwrap()
}

/// Generator strings for every family at size `n`.
fn corpus_family(idx: u64, n: usize) -> String {
    match idx % 8 {
        0 => format!("erdos-renyi:n={n},avg=8"),
        1 => format!("erdos-renyi:n={n},avg=16"),
        2 => format!("d-regular:n={n},d=8"),
        3 => format!("d-regular:n={n},d=16"),
        4 => format!("power-law:n={n},exponent=2.5,min_deg=2"),
        5 => format!("bad-bipartite:n={n},hubs=16,k=16"),
        6 => format!("matching:n={n}"),
        _ => format!("star-forest:n={n},leaves=8"),
    }
}

fn no_gather_budget_violation(r: &RulingSetResult) -> bool {
    !r.diagnostics.iter().any(|d| matches!(d, Diagnostic::GatherBudget { .. }))
}

/// Criteria 1, 6, 8 and the label cross-check share one corpus.
fn corpus_criteria() -> Vec<Outcome> {
    let start = Instant::now();
    let mut invalid = Vec::new();
    let mut inc_violations = 0u64;
    let mut inc_checked_graphs = 0u64;
    let mut luby_excess = Vec::new();
    let mut max_ratio = 0.0f64;
    let mut flips = 0usize;
    let mut near = 0usize;
    let mut families = BTreeSet::new();
    for idx in 0..C1_RUNS {
        let n = 1usize << (8 + (idx / 8) % 9);
        let family = corpus_family(idx, n);
        families.insert(family.split(':').next().unwrap().to_string());
        let g = gen(&family, idx);
        let cfg = AlgoConfig::default().with_seed(idx);
        let r = parallel_two_ruling_set(&g, &cfg).unwrap();
        if !verify_ruling_set(&g, &r.ruling, 2).valid {
            invalid.push(format!("{family} seed {idx}"));
        }
        let cls = classify_nodes(&g, cfg.gamma);
        let inc = check_bad_inc_lower(&g, &cls, cfg.gamma, cfg.d_min);
        inc_violations += inc.measured as u64;
        inc_checked_graphs += (inc.status != Status::Vacuous) as u64;
        let limit = C8_LOG_FACTOR * (n as f64).log2();
        let iters = r.max_luby_iterations() as f64;
        max_ratio = max_ratio.max(iters / (n as f64).log2());
        if iters > limit {
            luby_excess.push(format!("{family} seed {idx}: {iters}"));
        }
        let st = label_stability(&g, &cls, cfg.gamma);
        flips += st.flipped.len();
        near += st.near_threshold.len();
    }
    let secs = start.elapsed().as_secs_f64();
    vec![
        Outcome {
            id: 1,
            name: "validity",
            pass: invalid.is_empty() && secs <= C1_TIME_LIMIT_SECS,
            detail: format!(
                "{C1_RUNS} runs over {} families, n = 2^8..2^16, {} invalid {:?}, {secs:.1}s (limit {C1_TIME_LIMIT_SECS}s)",
                families.len(),
                invalid.len(),
                invalid.iter().take(5).collect::<Vec<_>>()
            ),
        },
        Outcome {
            id: 6,
            name: "bad-neighbor lower bound",
            pass: inc_violations == 0,
            detail: format!(
                "{inc_violations} violations over {C1_RUNS} graphs ({inc_checked_graphs} with bad nodes of degree >= d_min)"
            ),
        },
        Outcome {
            id: 8,
            name: "luby iterations",
            pass: luby_excess.is_empty(),
            detail: format!(
                "max iterations / log2 n = {max_ratio:.3} (limit {C8_LOG_FACTOR}), {} runs over",
                luby_excess.len()
            ),
        },
        Outcome {
            id: 0,
            name: "label cross-check",
            pass: flips == 0,
            detail: format!(
                "{flips} labels flip under ascending/descending float summation; {near} nodes within 1e-9 of the threshold"
            ),
        },
    ]
}

const SWEEP: [usize; 4] = [1 << 10, 1 << 12, 1 << 14, 1 << 16];

/// Criteria 2 and 3 share the streaming sweep.
fn stream_criteria() -> Vec<Outcome> {
    // family -> n -> set of (passes, reduction steps)
    let mut seen: BTreeMap<&str, BTreeMap<usize, BTreeSet<(u64, usize)>>> = BTreeMap::new();
    let mut formula_misses = 0u64;
    let mut worst_words = 0.0f64;
    let mut memory_diags = 0usize;
    let families = [
        ("bad-bipartite", "hubs=16,k=16"),
        ("matching", ""),
        ("erdos-renyi", "avg=16"),
    ];
    for &n in &SWEEP {
        for (family, params) in families {
            for seed in 0..C3_SEEDS {
                let g = gen(&format!("{family}:n={n},{params}"), seed);
                let cfg = AlgoConfig::default().with_seed(seed);
                let (r, acc) = run_streaming(&mut MemoryStream::new(&g), &cfg).unwrap();
                let i = r.reduction.len();
                formula_misses += (acc.passes != expected_passes(i)) as u64;
                seen.entry(family).or_default().entry(n).or_default().insert((acc.passes, i));
                worst_words = worst_words.max(acc.peak_words as f64 / n as f64);
                memory_diags += r
                    .diagnostics
                    .iter()
                    .filter(|d| matches!(d, Diagnostic::MemoryBudget { .. }))
                    .count();
            }
        }
    }
    let mut parts = Vec::new();
    let mut constant_ok = true;
    for (family, by_n) in &seen {
        let all: BTreeSet<u64> = by_n.values().flatten().map(|p| p.0).collect();
        let steps: BTreeSet<usize> = by_n.values().flatten().map(|p| p.1).collect();
        if steps.len() == 1 {
            // schedule length does not depend on n: pass counts must be identical
            constant_ok &= all.len() == 1;
            parts.push(format!("{family}: {:?} passes at every n (i = {:?})", all, steps));
        } else {
            let per_n: Vec<String> = by_n
                .iter()
                .map(|(n, s)| format!("n={n}: {:?}", s.iter().collect::<Vec<_>>()))
                .collect();
            parts.push(format!("{family}: schedule length varies with n, (passes, i) = {}", per_n.join(" ")));
        }
    }
    vec![
        Outcome {
            id: 2,
            name: "pass constancy",
            pass: constant_ok && formula_misses == 0,
            detail: format!(
                "{}; {formula_misses} runs off the 28+5i schedule",
                parts.join("; ")
            ),
        },
        Outcome {
            id: 3,
            name: "memory linearity",
            pass: worst_words <= C3_MAX_WORDS_PER_NODE && memory_diags == 0,
            detail: format!(
                "max peak_words/n = {worst_words:.2} (limit {C3_MAX_WORDS_PER_NODE}) over {} runs, {memory_diags} memory diagnostics",
                SWEEP.len() as u64 * families.len() as u64 * C3_SEEDS
            ),
        },
    ]
}

fn clique_criterion() -> Outcome {
    let sizes = [1usize << 10, 1 << 12, 1 << 14];
    let mut violations = 0u64;
    let mut runs = 0u64;
    let mut off_bound = 0u64;
    let mut off_tight = 0u64;
    let mut bip_rounds = BTreeSet::new();
    let mut er_rounds: BTreeMap<usize, BTreeSet<(u64, usize)>> = BTreeMap::new();
    for &n in &sizes {
        for seed in 0..C4_SEEDS {
            let g = gen(&format!("erdos-renyi:n={n},avg=16"), seed);
            let cfg = AlgoConfig::default().with_seed(seed);
            let (r, acc) = run_congested_clique(&g, &cfg).unwrap();
            runs += 1;
            let i = r.reduction.len();
            er_rounds.entry(n).or_default().insert((acc.rounds, i));
            if !no_gather_budget_violation(&r) {
                violations += 1;
                continue;
            }
            off_bound += (acc.rounds > round_bound(C4_BUDGET_K, i, n)) as u64;
            if r.max_gather_edges() < n as u64 {
                off_tight += (acc.rounds != tight_rounds(i)) as u64;
            }
        }
        for seed in 0..10 {
            let g = gen(&format!("bad-bipartite:n={n},hubs=16,k=16"), seed);
            let cfg = AlgoConfig::default().with_seed(seed);
            let (r, acc) = run_congested_clique(&g, &cfg).unwrap();
            if no_gather_budget_violation(&r) {
                bip_rounds.insert((acc.rounds, r.reduction.len()));
                off_bound += (acc.rounds > round_bound(C4_BUDGET_K, r.reduction.len(), n)) as u64;
                if r.max_gather_edges() < n as u64 {
                    off_tight += (acc.rounds != tight_rounds(r.reduction.len())) as u64;
                }
            }
        }
    }
    let rate = violations as f64 / runs as f64;
    let er: Vec<String> = er_rounds
        .iter()
        .map(|(n, s)| format!("n={n}: {:?}", s.iter().collect::<Vec<_>>()))
        .collect();
    Outcome {
        id: 4,
        name: "round constancy",
        pass: bip_rounds.len() == 1 && off_bound == 0 && off_tight == 0 && rate <= C4_MAX_VIOLATION_RATE,
        detail: format!(
            "bad-bipartite (rounds, i) = {:?} across n = 2^10..2^14; erdos-renyi (rounds, i) {}; \
             {off_tight} runs off R(i) = 33+6i, {off_bound} above R(8, i); gather budget violations {violations}/{runs} ({:.2}%, limit {:.0}%)",
            bip_rounds,
            er.join(" "),
            100.0 * rate,
            100.0 * C4_MAX_VIOLATION_RATE
        ),
    }
}

fn budget_criterion() -> Outcome {
    let n = 1usize << 12;
    let configs = [
        format!("erdos-renyi:n={n},avg=16"),
        format!("power-law:n={n},exponent=2.5,min_deg=2"),
        format!("bad-bipartite:n={n},hubs=16,k=16"),
        format!("d-regular:n={n},d=64"),
    ];
    let mut worst_pipeline = 0.0f64;
    let mut worst_main = 0.0f64;
    let mut fails = Vec::new();
    for family in &configs {
        for seed in 0..C5_SEEDS {
            let g = gen(family, seed);
            let cfg = AlgoConfig::default().with_seed(seed);
            let r = parallel_two_ruling_set(&g, &cfg).unwrap();
            worst_pipeline = worst_pipeline.max(r.max_gather_edges() as f64 / n as f64);
            let fin = check_final_residual_size(&r.trace, n, g.edge_count(), C5_BUDGET_K, seed);
            if fin.status == Status::Fail {
                fails.push(format!("{family} seed {seed} final"));
            }
            // one main iteration on the whole graph exercises the sampled and set-aside subgraphs at full size
            let m = main_iteration(&g, &cfg).unwrap();
            for rep in [
                check_gsamp_size(&g, &m.detail.vsamp, C5_BUDGET_K, seed),
                check_setaside_size(&g, &m.detail.vstar, C5_BUDGET_K, seed),
            ] {
                worst_main = worst_main.max(rep.measured / n as f64);
                if rep.status == Status::Fail {
                    fails.push(format!("{family} seed {seed} {}", rep.lemma));
                }
            }
        }
    }
    // mean sampled-subgraph size on a 64-regular graph
    let reg_n = 1usize << 14;
    let mut total = 0.0;
    for seed in 0..C5_SEEDS {
        let g = gen(&format!("d-regular:n={reg_n},d=64"), seed);
        let vsamp = sample_vsamp(&g, &RngStream::new(seed, 0)).unwrap();
        total += check_gsamp_size(&g, &vsamp, C5_BUDGET_K, seed).measured;
    }
    let mean = total / C5_SEEDS as f64 / reg_n as f64;
    Outcome {
        id: 5,
        name: "subgraph budgets",
        pass: fails.is_empty()
            && worst_pipeline <= C5_BUDGET_K
            && worst_main <= C5_BUDGET_K
            && mean <= C5_MEAN_GSAMP_PER_NODE,
        detail: format!(
            "max pipeline gather = {worst_pipeline:.3}n, max single-iteration G_samp/G[V*] = {worst_main:.3}n (limit {C5_BUDGET_K}n), \
             {} failing reports; mean |E(G_samp)| on 64-regular n=2^14 = {mean:.3}n (limit {C5_MEAN_GSAMP_PER_NODE}n)",
            fails.len()
        ),
    }
}

fn coverage_rate_criterion() -> Outcome {
    let n = 1024;
    let g = gen(&format!("d-regular:n={n},d={C7_DEGREE}"), 7);
    let cls = classify_nodes(&g, C7_GAMMA);
    let good = (0..n).filter(|&u| cls.is_good(u)).count() as u64;
    let trials = C7_MIN_NODE_TRIALS.div_ceil(good.max(1));
    let reports = check_good_coverage_rate(&g, &cls, C7_GAMMA, 2, trials, 7, |t| {
        sample_vsamp(&g, &RngStream::new(7, 1000 + t)).unwrap()
    });
    let rep = reports.iter().find(|r| r.d == Some(C7_DEGREE as u64));
    match rep {
        Some(r) => Outcome {
            id: 7,
            name: "good-coverage rate",
            pass: r.status != Status::Fail,
            detail: format!(
                "d={C7_DEGREE}, gamma={C7_GAMMA}: {} good nodes x {trials} trials, rate {:.3e} <= bound {:.3e} (1/{} + Wilson)",
                good,
                r.measured,
                r.bound,
                C7_DEGREE
            ),
        },
        None => Outcome {
            id: 7,
            name: "good-coverage rate",
            pass: false,
            detail: format!("no good nodes of degree {C7_DEGREE}"),
        },
    }
}

fn oracle_criterion() -> Outcome {
    let mut failures = 0u64;
    for idx in 0..C9_GRAPHS {
        let n = 1 + (idx as usize * 7919) % C9_MAX_N;
        let p = [0.05, 0.1, 0.2, 0.4][idx as usize % 4];
        let g = generate(&GeneratorSpec::new(rulingset::Family::ErdosRenyi { p }, n, idx)).unwrap();
        let stream = RngStream::new(idx, 99);
        let phase_one = NodeSet::from_nodes(n, (0..n).filter(|&u| stream.coin(0, u as u64, 0.3)));
        let luby = luby_mis(&g, &phase_one, &stream.child(1));
        let labels: Vec<usize> = (0..n).collect();
        let greedy = greedy_mis(&g, &random_order(&stream.child(2), &labels));
        failures += !mis_oracle_check(&g, &luby.mis) as u64;
        failures += !mis_oracle_check(&g, &greedy) as u64;
    }
    Outcome {
        id: 9,
        name: "MIS oracle equivalence",
        pass: failures == 0,
        detail: format!("{C9_GRAPHS} graphs with n <= {C9_MAX_N}, luby and greedy: {failures} failures"),
    }
}

fn purity_criterion() -> Outcome {
    let n = 1usize << 12;
    let mut offenders = 0.0;
    let mut statuses: BTreeMap<String, BTreeMap<&'static str, u64>> = BTreeMap::new();
    for family in [format!("erdos-renyi:n={n},avg=16"), format!("bad-bipartite:n={n},hubs=16,k=16")] {
        for seed in 0..C10_SEEDS {
            let g = gen(&family, seed);
            let cfg = AlgoConfig::default().with_seed(seed);
            let cls = classify_nodes(&g, cfg.gamma);
            let m = main_iteration(&g, &cfg).unwrap();
            let rep = check_residual_purity(&g, &m.covered, &cls, cfg.c_setaside, seed);
            offenders += rep.measured;
            let key = match rep.status {
                Status::Pass => "pass",
                Status::Fail => "fail",
                Status::Vacuous => "vacuous",
            };
            *statuses
                .entry(family.split(':').next().unwrap().to_string())
                .or_default()
                .entry(key)
                .or_default() += 1;
            // the same property inside the pipeline's main iterations
            let r = parallel_two_ruling_set(&g, &cfg).unwrap();
            for run in &r.runs {
                let sub = rulingset::induced_subgraph(&g, &run.members);
                let sub_cls = classify_nodes(&sub.graph, cfg.gamma);
                let covered = two_hop_covered(&sub.graph, &sub.localize(&run.additions));
                offenders += check_residual_purity(&sub.graph, &covered, &sub_cls, cfg.c_setaside, seed).measured;
            }
        }
    }
    Outcome {
        id: 10,
        name: "residual purity",
        pass: offenders == 0.0,
        detail: format!("{offenders} offending nodes; single-iteration statuses {statuses:?}"),
    }
}

fn model_independence_criterion() -> Outcome {
    let mut mismatches = Vec::new();
    for idx in 0..C11_PAIRS {
        let n = 1usize << (8 + idx % 5);
        let family = corpus_family(idx, n);
        let g = gen(&family, idx);
        let cfg = AlgoConfig::default().with_seed(idx);
        let direct = parallel_two_ruling_set(&g, &cfg).unwrap();
        let (streamed, _) = run_streaming(&mut MemoryStream::shuffled(&g, idx + 1), &cfg).unwrap();
        let (clique, _) = run_congested_clique(&g, &cfg).unwrap();
        let same = |r: &RulingSetResult| {
            r.ruling == direct.ruling && r.coverage_witness == direct.coverage_witness && r.runs == direct.runs
        };
        if !same(&streamed) || !same(&clique) {
            mismatches.push(format!("{family} seed {idx}"));
        }
    }
    Outcome {
        id: 11,
        name: "model independence",
        pass: mismatches.is_empty(),
        detail: format!("{C11_PAIRS} (graph, seed) pairs, {} mismatches {:?}", mismatches.len(), mismatches),
    }
}

fn main() {
    let start = Instant::now();
    let mut outcomes = Vec::new();
    let timed = |name: &str, f: &dyn Fn() -> Vec<Outcome>| {
        let t = Instant::now();
        let out = f();
        eprintln!("  {name} took {:.1}s", t.elapsed().as_secs_f64());
        out
    };
    outcomes.extend(timed("corpus", &corpus_criteria));
    outcomes.extend(timed("stream sweep", &stream_criteria));
    outcomes.extend(timed("clique", &|| vec![clique_criterion()]));
    outcomes.extend(timed("budgets", &|| vec![budget_criterion()]));
    outcomes.extend(timed("coverage rate", &|| vec![coverage_rate_criterion()]));
    outcomes.extend(timed("oracle", &|| vec![oracle_criterion()]));
    outcomes.extend(timed("purity", &|| vec![purity_criterion()]));
    outcomes.extend(timed("model independence", &|| vec![model_independence_criterion()]));
    // numbered criteria first, supplementary checks last
    outcomes.sort_by_key(|o| if o.id == 0 { u32::MAX } else { o.id });
    for o in &outcomes {
        let tag = if o.pass { "PASS" } else { "FAIL" };
        let label = if o.id == 0 { "check".to_string() } else { format!("criterion {:>2}", o.id) };
        println!("[{tag}] {label} {}: {}", o.name, o.detail);
    }
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    println!(
        "acceptance: {} of {} lines passed in {:.1}s",
        outcomes.len() - failed,
        outcomes.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
