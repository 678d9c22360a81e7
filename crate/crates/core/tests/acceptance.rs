//! Acceptance suite. Every test prints one `PASS` or `FAIL` line to the real
//! stderr (bypassing output capture) and then asserts.

use std::io::Write;
use std::sync::{Mutex, MutexGuard};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use steiner_core::branch::{balance, heuristic_decompose, per_edge_bound, BranchDecomposition};
use steiner_core::dp::{
    build_regions, contract_alpha, dp_solve, unit_length_reduce, AllConfigs, ClusterTable, DpOptions, DpParameters,
};
use steiner_core::graph::length;
use steiner_core::io::{generate_grid_instance, generate_planar_instance, to_f64, Instance, LengthDist};
use steiner_core::oracle::{
    augment_to_simple, brute_force_opt, connected_graphs, opt_by_subsets, report, OracleLimits,
};
use steiner_core::pc::{cluster, decompose_instance, depth_bound, gw_steiner_forest};
use steiner_core::pipeline::{ledger_bound, run_ptas, Mode, PipelineConfig};
use steiner_core::priority::trace::{all_costs, apply, random_op};
use steiner_core::priority::{Category, CategoryQueue, NaiveQueue};
use steiner_core::{Demand, EdgeId, Graph, Length, VertexId};

// timed criteria run one at a time
static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(id: &str, name: &str, violations: &[String], detail: &str) {
    let status = if violations.is_empty() { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr().lock(), "[acceptance] criterion {id} {name}: {status} ({detail})");
    assert!(violations.is_empty(), "criterion {id}: {} violations, first: {}", violations.len(), violations[0]);
}

fn opt(inst: &Instance) -> Length {
    brute_force_opt(&inst.graph, &inst.demands, OracleLimits::default()).expect("oracle within limits").opt
}

fn half() -> Length {
    Length::new(1, 2)
}

#[test]
fn criterion_01_priority_structure_equivalence() {
    let _serial = serial();
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut finds = 0usize;
    for (seed, (rows, cols)) in [(10, 10), (16, 20), (20, 25)].into_iter().enumerate() {
        let seed = seed as u64;
        let inst = generate_planar_instance(rows, cols, 0, 0.5, LengthDist::Uniform(20), seed).unwrap();
        let n = inst.graph.num_vertices();
        assert!(n <= 500);
        let edges: Vec<_> = inst.graph.edges().map(|e| (e.u, e.v, e.len)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let cats: Vec<Category> = (0..n).map(|_| rng.gen_range(0..2)).collect();
        let mut fast = CategoryQueue::new(cats.clone(), 2, &edges);
        let mut naive = NaiveQueue::new(cats, 2, &edges);
        for step in 0..10_000 {
            let op = random_op(&naive, &mut rng);
            let (a, b) = (apply(&mut fast, &op), apply(&mut naive, &op));
            if matches!(op, steiner_core::priority::trace::Op::FindMin(_)) {
                finds += 1;
            }
            if a != b {
                bad.push(format!("n={n} step {step} {op:?}: {a:?} vs {b:?}"));
                break;
            }
            if let Err(m) = fast.check_invariants() {
                bad.push(format!("n={n} step {step}: {m}"));
                break;
            }
            if step % 50 == 0 && all_costs(&mut fast) != all_costs(&mut naive) {
                bad.push(format!("n={n} step {step}: costs differ"));
                break;
            }
        }
    }
    let t = start.elapsed();
    if t > Duration::from_secs(30) {
        bad.push(format!("took {t:?}"));
    }
    verdict(
        "1",
        "priority structure matches naive simulator",
        &bad,
        &format!("3 traces x 10000 ops, {finds} find_min, {t:.2?}"),
    );
}

#[test]
fn criterion_02_pc_clustering_bounds() {
    let _serial = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut bad = Vec::new();
    let runs = 1000;
    for seed in 0..runs {
        let (r, c) = [(3, 4), (4, 5), (5, 6), (6, 8)][seed as usize % 4];
        let inst = generate_planar_instance(r, c, 0, 0.4, LengthDist::Uniform(9), seed).unwrap();
        let g = &inst.graph;
        let p = [0.2, 0.5, 0.9][seed as usize % 3];
        let phi: Vec<Length> = (0..g.num_vertices())
            .map(|_| if rng.gen_bool(p) { length(rng.gen_range(1..20)) } else { length(0) })
            .collect();
        let (delta_f, delta) = [(0.25, Length::new(1, 4)), (0.5, half()), (1.0, length(1))][seed as usize % 3];
        let cl = cluster(g, &phi, delta);
        let total: Length = phi.iter().copied().sum();
        if g.length_of(&cl.f2) > length(2) * (length(1) + delta) * total {
            bad.push(format!("seed {seed}: len(F2) too long"));
        }
        let depth = cl.forest.depth();
        if let Some(b) = depth_bound(&phi, delta_f) {
            if depth as f64 > b + 1e-9 {
                bad.push(format!("seed {seed}: depth {depth} > {b}"));
            }
        }
        if let Err(m) = cl.forest.check_components(g, &cl.f2) {
            bad.push(format!("seed {seed}: {m}"));
        }
        if cl.forest.multiplicity.iter().any(|&m| m > depth + 1) {
            bad.push(format!("seed {seed}: edge multiplicity above depth + 1"));
        }
    }
    verdict("2", "clustering length, depth and multiplicity bounds", &bad, &format!("{runs} instances"));
}

#[test]
fn criterion_03_decomposition_quality() {
    let _serial = serial();
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for seed in 0..50 {
        let k = 1 + seed as usize % 3;
        let inst = generate_grid_instance(5, 5, k, LengthDist::Uniform(6), seed).unwrap();
        let whole = opt(&inst);
        let dec = decompose_instance(&inst.graph, &inst.demands, half(), Length::new(1, 4)).unwrap();
        let mut sum = Length::from_integer(0);
        for p in dec.parts.iter().filter(|p| !p.demands.is_empty()) {
            sum += brute_force_opt(&p.graph(&inst.graph), &p.demands, OracleLimits::default())
                .expect("part within limits")
                .opt;
        }
        worst = worst.max(to_f64(sum) / to_f64(whole));
        if sum > (length(1) + half()) * whole {
            bad.push(format!("seed {seed}: {sum} > 1.5 * {whole}"));
        }
    }
    let t = start.elapsed();
    if t > Duration::from_secs(300) {
        bad.push(format!("took {t:?}"));
    }
    verdict("3", "sum of part optima within (1+eps) OPT", &bad, &format!("50 seeds, worst ratio {worst:.4}, {t:.2?}"));
}

#[test]
fn criterion_04_balance_guarantees() {
    let _serial = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = Vec::new();
    let mut count = 0;
    let sizes = [(2, 2), (3, 4), (5, 5), (6, 8), (8, 10), (9, 12)];
    for seed in 0..520u64 {
        let (r, c) = sizes[seed as usize % sizes.len()];
        let g = generate_planar_instance(r, c, 0, 0.3, LengthDist::Constant(1), seed).unwrap().graph;
        let m = g.num_edges();
        assert!(m <= 256);
        let input =
            if seed % 5 == 0 { heuristic_decompose(&g) } else { BranchDecomposition::random(&g.edge_ids(), &mut rng) };
        let (out, _) = balance(&input);
        count += 1;
        if out.validate(&g).is_err() || out.edges() != input.edges() {
            bad.push(format!("seed {seed}: output is not a decomposition of the same edges"));
            continue;
        }
        let (wi, wo) = (input.width(&g), out.width(&g));
        if wo > 2 * wi {
            bad.push(format!("seed {seed}: width {wi} -> {wo}"));
        }
        let per = out.clusters_per_edge().into_iter().map(|(_, c)| c).max().unwrap_or(0);
        if per as f64 > per_edge_bound(m) {
            bad.push(format!("seed {seed}: {per} clusters per edge with m = {m}"));
        }
    }
    verdict("4", "balanced width and clusters per edge", &bad, &format!("{count} decompositions, m <= 256"));
}

/// Unit-length graph with a balanced edgelet decomposition.
fn unit_corpus(seed: u64) -> (Graph, BranchDecomposition, Vec<Demand>) {
    let (r, c) = [(3, 3), (3, 4), (4, 4), (4, 5)][seed as usize % 4];
    let dist = if seed.is_multiple_of(2) { LengthDist::Constant(1) } else { LengthDist::Uniform(4) };
    let inst = generate_planar_instance(r, c, 1 + seed as usize % 3, 0.3, dist, seed).unwrap();
    let bd = balance(&heuristic_decompose(&inst.graph)).0;
    let unit = unit_length_reduce(&inst.graph, &inst.demands, half(), length(1));
    let ubd = unit.expand_decomposition(&bd);
    (unit.graph, ubd, unit.demands)
}

#[test]
fn criterion_05_contraction_and_region_bounds() {
    let _serial = serial();
    let mut bad = Vec::new();
    let mut passes = 0;
    for seed in 0..40u64 {
        let (g, bd, demands) = unit_corpus(seed);
        let ct = ClusterTable::build(&g, &bd, &demands);
        let w = bd.width(&g);
        let derived = DpParameters::for_epsilon(half(), length(1), w, g.num_edges());
        let coarse = [(length(1), half()), (length(2), length(1)), (Length::new(3, 2), length(3))];
        for (alpha, beta) in std::iter::once((derived.alpha, derived.beta)).chain(coarse) {
            passes += 1;
            let layers = contract_alpha(&g, &bd, alpha);
            let cover = build_regions(&g, &bd, &ct, &layers, beta);
            let tag = format!("seed {seed} alpha {alpha} beta {beta}");
            if let Err(e) = layers.check_growth(&g, &bd) {
                bad.push(format!("{tag}: growth {e:?}"));
            }
            if !layers.check_total(&g) {
                bad.push(format!("{tag}: total radius {} above len/alpha", layers.total_radius()));
            }
            if let Err(e) = cover.check_covering() {
                bad.push(format!("{tag}: covering {e:?}"));
            }
            if let Err(e) = cover.check_cardinality(&ct, alpha) {
                bad.push(format!("{tag}: cardinality {e:?}"));
            }
        }
    }
    verdict("5", "growth, total radius, covering and cardinality", &bad, &format!("{passes} passes"));
}

#[test]
fn criterion_06_dp_exactness_exhaustive() {
    let _serial = serial();
    let start = Instant::now();
    let mut bad = Vec::new();
    let mut instances = 0usize;
    let graphs = connected_graphs(7);
    for sg in &graphs {
        let g = sg.to_graph();
        let bd = heuristic_decompose(&g);
        let pairs: Vec<Demand> = (0..sg.n as u32)
            .flat_map(|a| (a + 1..sg.n as u32).map(move |b| Demand::new(VertexId(a), VertexId(b)).unwrap()))
            .collect();
        let mut sets: Vec<Vec<Demand>> = vec![vec![]];
        for i in 0..pairs.len() {
            sets.push(vec![pairs[i]]);
            for j in i + 1..pairs.len() {
                sets.push(vec![pairs[i], pairs[j]]);
                for k in j + 1..pairs.len() {
                    sets.push(vec![pairs[i], pairs[j], pairs[k]]);
                }
            }
        }
        for ds in sets {
            instances += 1;
            let want = opt_by_subsets(&g, &ds).unwrap().opt;
            match dp_solve(&g, &bd, &ds, &mut AllConfigs, DpOptions::default()) {
                Ok(t) if t.cost == want && g.is_feasible(&t.reconstruct(&bd), &ds) => {}
                Ok(t) => bad.push(format!("{sg:?} {ds:?}: dp {} vs opt {want}", t.cost)),
                Err(e) => bad.push(format!("{sg:?} {ds:?}: {e}")),
            }
        }
    }
    let t = start.elapsed();
    if t > Duration::from_secs(120) {
        bad.push(format!("took {t:?}"));
    }
    verdict(
        "6",
        "unrestricted dynamic program equals OPT",
        &bad,
        &format!("{} graphs, {instances} instances, {t:.2?}", graphs.len()),
    );
}

fn grid_corpus() -> Vec<Instance> {
    (0..30)
        .map(|seed| generate_grid_instance(4, 4, 1 + seed as usize % 4, LengthDist::Constant(1), seed).unwrap())
        .collect()
}

#[test]
fn criterion_07_dp_only_quality() {
    let _serial = serial();
    let mut bad = Vec::new();
    let mut worst_gap = Length::from_integer(0);
    for (seed, inst) in grid_corpus().iter().enumerate() {
        let r = run_ptas(&inst.graph, &inst.demands, &PipelineConfig::new(Mode::DpOnly, half())).unwrap();
        let o = opt(inst);
        let bound = o + half() * inst.graph.total_length();
        worst_gap = worst_gap.max(r.total_length - o);
        if !r.feasible || r.total_length > bound {
            bad.push(format!("seed {seed}: {} vs OPT {o}, bound {bound}", r.total_length));
        }
    }
    verdict("7", "dp-only length within OPT + eps len(G)", &bad, &format!("30 seeds, largest excess {worst_gap}"));
}

#[test]
fn criterion_08_augmentation_construction() {
    let _serial = serial();
    let mut bad = Vec::new();
    let mut grown = 0usize;
    for (seed, inst) in grid_corpus().iter().enumerate() {
        let g = &inst.graph;
        let f = brute_force_opt(g, &inst.demands, OracleLimits::default()).unwrap().edges;
        let unit = unit_length_reduce(g, &inst.demands, half(), length(1));
        let bd = unit.expand_decomposition(&balance(&heuristic_decompose(g)).0);
        let ug = &unit.graph;
        // every input edge has the same length, so the subdivided optimum stays optimal
        let fu: Vec<EdgeId> = f.iter().flat_map(|e| unit.chains[e].iter().copied()).collect();
        let params = DpParameters::for_epsilon(half(), length(1), bd.width(ug), ug.num_edges());
        let ct = ClusterTable::build(ug, &bd, &unit.demands);
        let layers = contract_alpha(ug, &bd, params.alpha);
        let cover = build_regions(ug, &bd, &ct, &layers, params.beta);
        let aug = augment_to_simple(ug, &bd, &unit.demands, &fu, &ct, &layers, &cover, &params);
        grown += aug.f_prime.len() - fu.len();
        if !fu.iter().all(|e| aug.f_prime.contains(e)) || !ug.is_feasible(&aug.f_prime, &unit.demands) {
            bad.push(format!("seed {seed}: augmentation dropped edges or feasibility"));
        }
        if !aug.not_simple.is_empty() {
            bad.push(format!("seed {seed}: not simple at {:?}", aug.not_simple));
        }
        if !aug.first_step_failures.is_empty() || !aug.second_step_failures.is_empty() {
            bad.push(format!("seed {seed}: step checks {:?} {:?}", aug.first_step_failures, aug.second_step_failures));
        }
        if !aug.length_ok(ug) {
            bad.push(format!("seed {seed}: len(F') {} above {}", ug.length_of(&aug.f_prime), aug.bound));
        }
    }
    verdict("8", "augmented optimum is simple and short", &bad, &format!("30 seeds, {grown} edgelets added"));
}

fn desk_corpus() -> Vec<Instance> {
    (0..100u64)
        .map(|seed| {
            let k = 1 + seed as usize % 4;
            match seed % 4 {
                0 => generate_grid_instance(3, 4, k, LengthDist::Uniform(9), seed),
                1 => generate_grid_instance(4, 4, k, LengthDist::Constant(1), seed),
                2 => generate_planar_instance(3, 4, k, 0.4, LengthDist::Uniform(5), seed),
                _ => generate_planar_instance(4, 5, k, 0.2, LengthDist::Uniform(12), seed),
            }
            .unwrap()
        })
        .collect()
}

#[test]
fn criterion_09_gw_ratio() {
    let _serial = serial();
    let mut bad = Vec::new();
    let mut worst: f64 = 1.0;
    for (seed, inst) in desk_corpus().iter().enumerate() {
        let r = gw_steiner_forest(&inst.graph, &inst.demands).unwrap();
        let o = opt(inst);
        let len = inst.graph.length_of(&r.forest);
        worst = worst.max(to_f64(len) / to_f64(o).max(f64::MIN_POSITIVE));
        if !inst.graph.is_feasible(&r.forest, &inst.demands) || len > length(2) * o {
            bad.push(format!("seed {seed}: {len} vs OPT {o}"));
        }
    }
    verdict("9", "primal-dual forest within twice OPT", &bad, &format!("100 instances, worst ratio {worst:.4}"));
}

#[test]
fn criterion_10_end_to_end() {
    let _serial = serial();
    let mut bad = Vec::new();
    let mut ratios = Vec::new();
    let mut table = String::new();
    for (seed, inst) in desk_corpus().iter().enumerate().step_by(2) {
        let o = brute_force_opt(&inst.graph, &inst.demands, OracleLimits::default()).unwrap();
        let mut runs = Vec::new();
        for (mode, eps) in
            [(Mode::Exact, half()), (Mode::Gw, half()), (Mode::Ptas, half()), (Mode::Ptas, Length::new(1, 4))]
        {
            let r = run_ptas(&inst.graph, &inst.demands, &PipelineConfig::new(mode, eps)).unwrap().with_oracle(o.opt);
            if !r.feasible {
                bad.push(format!("seed {seed}: {mode} infeasible"));
            }
            if mode == Mode::Ptas {
                ratios.push(r.ratio.unwrap());
                if let Some(b) = ledger_bound(&r, o.opt) {
                    if to_f64(r.total_length) > b + 1e-9 {
                        bad.push(format!("seed {seed}: ptas {} above ledger bound {b}", r.total_length));
                    }
                }
            }
            runs.push(r);
        }
        let rep = report(&inst.name, &runs, Some(&o));
        if rep.rows.len() != runs.len() || rep.row("gw").is_none() || rep.row("ptas").is_none() {
            bad.push(format!("seed {seed}: incomplete report"));
        }
        if seed < 4 {
            table.push_str(&rep.to_string());
        }
    }
    let _ = write!(std::io::stderr().lock(), "{table}");
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let max = ratios.iter().copied().fold(1.0, f64::max);
    verdict(
        "10",
        "ptas always feasible, ratios reported",
        &bad,
        &format!("{} runs, mean ratio {mean:.4}, max {max:.4}", ratios.len()),
    );
}

fn best_time(f: impl Fn()) -> f64 {
    (0..3)
        .map(|_| {
            let t = Instant::now();
            f();
            t.elapsed().as_secs_f64()
        })
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn smoke_near_linear_scaling() {
    let _serial = serial();
    let mut bad = Vec::new();
    let mut detail = Vec::new();
    let seeds = 1..=3u64;
    for (s, mode) in [(79, Mode::Gw), (158, Mode::Gw), (79, Mode::PcCluster), (158, Mode::PcCluster)] {
        let cfg = PipelineConfig::new(mode, half());
        let run = |inst: &Instance| {
            let r = run_ptas(&inst.graph, &inst.demands, &cfg).unwrap();
            assert!(r.feasible);
        };
        let (mut a, mut b) = (0.0, 0.0);
        let mut n = (0, 0);
        for seed in seeds.clone() {
            let small = generate_grid_instance(s, s, s / 4, LengthDist::Uniform(100), seed).unwrap();
            let large = generate_grid_instance(2 * s, 2 * s, s, LengthDist::Uniform(100), seed).unwrap();
            n = (small.graph.num_vertices(), large.graph.num_vertices());
            a += best_time(|| run(&small));
            b += best_time(|| run(&large));
        }
        let growth = b / a;
        detail.push(format!("{mode} n={}->{}: x{growth:.2}", n.0, n.1));
        if growth >= 6.0 {
            bad.push(format!("{mode} at n={}: time grew x{growth:.2}", n.1));
        }
    }
    verdict("smoke", "n to 4n time growth below 6x", &bad, &detail.join(", "));
}
