//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::{BTreeMap, VecDeque};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use hybridmbt::appspec::{Action, AppSpec, Effect, Trigger, WidgetKind, WindowKind};
use hybridmbt::crawler::{plan, run_strategy, AbstractState, CrawlConfig, FsmModel, ModelMetadata, Strategy, Transition};
use hybridmbt::event_tracking::{track_events, EventEntry};
use hybridmbt::fixtures;
use hybridmbt::mutation::{generate_mutants, mutation_score, per_operator_score, run_mutation, select_mutants, MutationOperator};
use hybridmbt::pipeline::{compare, run_pipeline, PipelineConfig};
use hybridmbt::runtime::{AppStatus, UiEvent, WidgetView};
use hybridmbt::static_analysis::{EdgeKind, EventLabel, Wtg, WtgEdge, WtgNode};
use hybridmbt::testgen::{generate_tests, run_suite, Criterion, RunOptions};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn c1_fixture_completeness() -> Outcome {
    let spec = fixtures::open_manager();
    let config = PipelineConfig {
        crawl: CrawlConfig::new(0, 2000),
        ..Default::default()
    };
    let start = Instant::now();
    let out = run_pipeline(&spec, &config).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let r = &out.crawl_report;
    ensure(spec.windows.len() == 13, format!("fixture has {} windows", spec.windows.len()))?;
    ensure(r.discovered_windows == 13, format!("{} windows discovered", r.discovered_windows))?;
    ensure(r.coverage >= 0.95, format!("coverage {:.3}", r.coverage))?;
    ensure(r.fired <= 2000, format!("{} fires", r.fired))?;
    ensure(elapsed < 5.0, format!("{elapsed:.2}s"))?;
    Ok(format!(
        "13/13 windows, coverage {:.3}, {} fires, {:.2}s",
        r.coverage, r.fired, elapsed
    ))
}

fn c2_hybrid_dominance() -> Outcome {
    let seeds: Vec<u64> = (0..10).collect();
    let mut notes = Vec::new();
    for spec in fixtures::all() {
        let table = compare(&spec, &[Strategy::Hybrid, Strategy::Random], &seeds, 10_000).map_err(|e| e.to_string())?;
        let h = table.row(Strategy::Hybrid).unwrap().mean_coverage;
        let r = table.row(Strategy::Random).unwrap().mean_coverage;
        ensure(h >= r, format!("{}: hybrid {h:.3} < random {r:.3}", spec.name))?;
        notes.push(format!("{} {h:.3}>={r:.3}", spec.name));
    }
    let spec = fixtures::open_manager();
    for seed in seeds {
        let (model, _) = run_strategy(&spec, Strategy::Random, &CrawlConfig::new(seed, 10_000)).map_err(|e| e.to_string())?;
        let w = model.windows();
        ensure(
            !w.contains("folder_ops") && !w.contains("file_ops"),
            format!("random seed {seed} reached a long-click dialog"),
        )?;
    }
    Ok(format!("{}; long-click dialogs found by random in 0/10 seeds", notes.join(", ")))
}

fn c3_score_arithmetic() -> Outcome {
    let checks = [
        (mutation_score(290, 335), 0.866),
        (mutation_score(370, 370), 1.000),
        (per_operator_score(113, 370), 0.305),
        (per_operator_score(111, 187), 0.594),
    ];
    for (got, want) in checks {
        let got = got.map_err(|e| e.to_string())?;
        ensure(close(got, want, 0.0005), format!("got {got}, want {want}"))?;
    }
    // unrounded values also fall within the tolerance
    ensure(close(290.0 / 335.0, 0.866, 0.0005), "290/335 off")?;
    ensure(close(113.0 / 370.0, 0.305, 0.0005), "113/370 off")?;
    ensure(close(111.0 / 187.0, 0.594, 0.0005), "111/187 off")?;
    Ok("0.866, 1.000, 0.305, 0.594".into())
}

fn c4_column_sums() -> Outcome {
    use MutationOperator::*;
    let rows: [(&str, usize, [usize; 6], [f64; 6]); 2] = [
        ("TippyTipper", 370, [113, 0, 8, 83, 109, 57], [0.305, 0.000, 0.022, 0.224, 0.295, 0.154]),
        ("ToDoManager", 187, [111, 0, 1, 0, 51, 24], [0.594, 0.000, 0.005, 0.000, 0.273, 0.128]),
    ];
    let ops = [ICR, NOI, LCR, AOR, ROR, RVR];
    for (app, selected, counts, scores) in rows {
        let by_op: BTreeMap<MutationOperator, usize> = ops.iter().copied().zip(counts).collect();
        let sum: usize = by_op.values().sum();
        ensure(sum == selected, format!("{app}: column sum {sum} != {selected}"))?;
        for (op, want) in ops.iter().zip(scores) {
            let got = per_operator_score(by_op[op], selected).map_err(|e| e.to_string())?;
            ensure(close(got, want, 0.0005), format!("{app} {op}: {got} != {want}"))?;
        }
        let total: f64 = scores.iter().sum();
        ensure(close(total, 1.0, 0.003), format!("{app}: per-operator scores sum to {total}"))?;
    }
    // the same identity holds for a live report
    let spec = fixtures::calculator();
    let (model, _) = run_strategy(&spec, Strategy::Hybrid, &CrawlConfig::default()).map_err(|e| e.to_string())?;
    let suite = generate_tests(&model, Criterion::AllEdges).map_err(|e| e.to_string())?;
    let mutants = generate_mutants(&spec);
    let selection = select_mutants(&mutants, 12, 0);
    let report = run_mutation(&spec, &suite, &mutants, &selection, 0).map_err(|e| e.to_string())?;
    let live: usize = report.selected_per_operator.values().sum();
    ensure(live == report.selected, format!("live report sums to {live}, selected {}", report.selected))?;
    Ok("370 = 113+0+8+83+109+57, 187 = 111+0+1+0+51+24".into())
}

fn c5_equivalent_mutant() -> Outcome {
    let mut scores = Vec::new();
    for (spec, expect_survivor) in [
        (fixtures::calculator_equivalent(), Some("(* count 1) -> (/ count 1)")),
        (fixtures::calculator(), None),
    ] {
        let (model, _) = run_strategy(&spec, Strategy::Hybrid, &CrawlConfig::default()).map_err(|e| e.to_string())?;
        let suite = generate_tests(&model, Criterion::AllEdges).map_err(|e| e.to_string())?;
        let mutants = generate_mutants(&spec);
        let all: Vec<usize> = (0..mutants.len()).collect();
        let report = run_mutation(&spec, &suite, &mutants, &all, 0).map_err(|e| e.to_string())?;
        let survivors: Vec<&str> = report
            .survivors
            .iter()
            .map(|id| mutants.iter().find(|m| &m.id == id).map_or("?", |m| m.replacement.as_str()))
            .collect();
        match expect_survivor {
            Some(s) => {
                ensure(report.final_ms < 1.0, format!("{}: score {}", spec.name, report.final_ms))?;
                ensure(survivors == [s], format!("{}: survivors {survivors:?}", spec.name))?;
            }
            None => {
                ensure(report.final_ms == 1.0, format!("{}: score {}", spec.name, report.final_ms))?;
            }
        }
        scores.push(format!("{} {:.3}", spec.name, report.final_ms));
    }
    Ok(scores.join(", "))
}

fn labeled_wtg(nodes: usize, edges: &[(usize, usize)], labels: &[u32]) -> Wtg {
    Wtg {
        nodes: (0..nodes)
            .map(|i| WtgNode {
                window: format!("n{i}"),
                kind: WindowKind::Activity,
            })
            .collect(),
        edges: edges
            .iter()
            .zip(labels)
            .enumerate()
            .map(|(i, (&(source, target), &sequence))| WtgEdge {
                source,
                target,
                event: EventLabel {
                    widget: format!("w{i}"),
                    widget_kind: WidgetKind::Button,
                    widget_order: i,
                    trigger: Trigger::Click,
                    trigger_method: "onClick".into(),
                },
                sequence,
                kind: if source == target { EdgeKind::SelfLoop } else { EdgeKind::Open },
            })
            .collect(),
        root: 0,
    }
}

/// Independent oracle: edges whose source is reachable from the root,
/// sorted by label.
fn tracking_oracle(wtg: &Wtg) -> Vec<(String, u32)> {
    let mut reached = vec![false; wtg.nodes.len()];
    reached[wtg.root] = true;
    let mut changed = true;
    while changed {
        changed = false;
        for e in &wtg.edges {
            if reached[e.source] && !reached[e.target] {
                reached[e.target] = true;
                changed = true;
            }
        }
    }
    let mut out: Vec<(String, u32)> = wtg
        .edges
        .iter()
        .filter(|e| reached[e.source])
        .map(|e| (e.event.widget.clone(), e.sequence))
        .collect();
    out.sort_by_key(|(_, s)| *s);
    out
}

fn check_tracking(nodes: usize, edges: &[(usize, usize)], labels: &[u32]) -> Result<(), String> {
    let wtg = labeled_wtg(nodes, edges, labels);
    let got: Vec<(String, u32)> = track_events(&wtg)
        .map_err(|e| e.to_string())?
        .entries
        .into_iter()
        .map(|e| (e.widget, e.sequence))
        .collect();
    ensure(
        got == tracking_oracle(&wtg),
        format!("disagreement on {nodes} nodes, edges {edges:?}, labels {labels:?}"),
    )
}

fn permutations(n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut items: Vec<u32> = (1..=n as u32).collect();
    fn go(k: usize, items: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if k == items.len() {
            out.push(items.clone());
            return;
        }
        for i in k..items.len() {
            items.swap(k, i);
            go(k + 1, items, out);
            items.swap(k, i);
        }
    }
    go(0, &mut items, &mut out);
    out
}

fn c6_tracking_oracle() -> Outcome {
    let mut graphs = 0usize;
    // Every edge set on up to four nodes with at most eight edges. All label
    // permutations for up to four edges, otherwise ascending, descending and
    // three seeded shuffles.
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for nodes in 1..=4usize {
        let pairs: Vec<(usize, usize)> = (0..nodes).flat_map(|s| (0..nodes).map(move |t| (s, t))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            if mask.count_ones() > 8 {
                continue;
            }
            let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect();
            let m = edges.len();
            let labelings: Vec<Vec<u32>> = if m <= 4 {
                permutations(m)
            } else {
                let asc: Vec<u32> = (1..=m as u32).collect();
                let mut list = vec![asc.clone(), asc.iter().rev().copied().collect()];
                for _ in 0..3 {
                    let mut p = asc.clone();
                    for i in (1..m).rev() {
                        p.swap(i, rng.gen_range(0..=i));
                    }
                    list.push(p);
                }
                list
            };
            for labels in labelings {
                check_tracking(nodes, &edges, &labels)?;
                graphs += 1;
            }
        }
    }
    // Seeded samples on five and six nodes.
    for _ in 0..20_000 {
        let nodes = rng.gen_range(5..=6);
        let m = rng.gen_range(0..=8);
        let edges: Vec<(usize, usize)> = (0..m).map(|_| (rng.gen_range(0..nodes), rng.gen_range(0..nodes))).collect();
        let mut labels: Vec<u32> = (1..=m as u32).collect();
        for i in (1..m).rev() {
            labels.swap(i, rng.gen_range(0..=i));
        }
        check_tracking(nodes, &edges, &labels)?;
        graphs += 1;
    }
    Ok(format!("{graphs} labeled graphs, 100% agreement"))
}

fn random_model(rng: &mut ChaCha8Rng) -> FsmModel {
    let n = rng.gen_range(1..=12);
    let m = rng.gen_range(0..=3 * n);
    let states = (0..n)
        .map(|i| AbstractState {
            window: format!("s{i}"),
            widget_signature: vec![WidgetView {
                id: format!("mark{i}"),
                triggers: vec![Trigger::Click],
            }],
            env_digest: BTreeMap::new(),
            status: AppStatus::Running,
        })
        .collect();
    let transitions = (0..m)
        .map(|i| {
            let (source, target) = (rng.gen_range(0..n), rng.gen_range(0..n));
            Transition {
                source,
                target,
                event: EventEntry::new(&format!("s{source}"), &format!("b{i}"), WidgetKind::Button, Trigger::Click, "onClick", 0),
                input: None,
            }
        })
        .collect();
    FsmModel {
        app: "random".into(),
        states,
        initial: 0,
        transitions,
        metadata: ModelMetadata {
            spec_digest: String::new(),
            strategy: Strategy::Hybrid,
            seed: 0,
            budget: 1,
            fired: 0,
            replayed: 0,
            relaunches: 0,
            complete: true,
        },
    }
}

fn bfs_distance(model: &FsmModel, from: usize, to: usize) -> Option<usize> {
    let mut dist = vec![None; model.states.len()];
    dist[from] = Some(0);
    let mut queue = VecDeque::from([from]);
    while let Some(s) = queue.pop_front() {
        for t in model.transitions.iter().filter(|t| t.source == s) {
            if dist[t.target].is_none() {
                dist[t.target] = Some(dist[s].unwrap() + 1);
                queue.push_back(t.target);
            }
        }
    }
    dist[to]
}

fn c7_replay_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut queries = 0usize;
    for k in 0..100 {
        let model = random_model(&mut rng);
        let n = model.states.len();
        for from in 0..n {
            for to in 0..n {
                let event = UiEvent::new(format!("mark{to}"), Trigger::Click);
                let path = plan(&model, from, &event);
                let want = bfs_distance(&model, from, to);
                ensure(
                    path.as_ref().map(Vec::len) == want,
                    format!("model {k}: {from}->{to} planned {:?}, bfs {want:?}", path.as_ref().map(Vec::len)),
                )?;
                if let Some(p) = path {
                    let mut at = from;
                    for &t in &p {
                        ensure(model.transitions[t].source == at, format!("model {k}: broken path"))?;
                        at = model.transitions[t].target;
                    }
                    ensure(at == to, format!("model {k}: path ends at {at}, not {to}"))?;
                }
                queries += 1;
            }
        }
    }
    Ok(format!("100 models, {queries} queries, 100% agreement"))
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

fn c8_complexity() -> Outcome {
    let depths = [5usize, 10, 20, 50];
    let mut hybrid = Vec::new();
    let mut dfs = Vec::new();
    for &n in &depths {
        let spec = fixtures::chain(n);
        let config = CrawlConfig::new(0, 1_000_000);
        let (model, report) = run_strategy(&spec, Strategy::Hybrid, &config).map_err(|e| e.to_string())?;
        let deepest = UiEvent::new(format!("refresh_{n}"), Trigger::Click);
        let path = plan(&model, model.initial, &deepest).ok_or(format!("depth {n} unreachable"))?;
        ensure(path.len() == n, format!("depth {n}: replay length {}", path.len()))?;
        let (dmodel, dreport) = run_strategy(&spec, Strategy::Dfs, &config).map_err(|e| e.to_string())?;
        ensure(dmodel.windows().len() == n + 1, format!("dfs missed windows at depth {n}"))?;
        hybrid.push(report.fired as f64);
        dfs.push(dreport.fired as f64);
    }
    let xs: Vec<f64> = depths.iter().map(|&n| n as f64).collect();
    let (hs, ds) = (slope(&xs, &hybrid), slope(&xs, &dfs));
    ensure(hs < 1.5, format!("hybrid slope {hs:.2}"))?;
    ensure(ds >= 1.8, format!("dfs slope {ds:.2}"))?;
    for (&n, &f) in depths.iter().zip(&dfs) {
        ensure(f >= (n * n) as f64, format!("dfs fires {f} below {n}^2"))?;
    }
    Ok(format!(
        "replay length = depth; hybrid fires {hybrid:?} slope {hs:.2}, dfs fires {dfs:?} slope {ds:.2}"
    ))
}

fn c9_determinism() -> Outcome {
    let mut checked = 0usize;
    for spec in [fixtures::open_manager(), fixtures::calculator()] {
        let config = PipelineConfig {
            crawl: CrawlConfig::new(11, 5000),
            mutate: true,
            mutant_budget: Some(20),
            ..Default::default()
        };
        let a = run_pipeline(&spec, &config).map_err(|e| e.to_string())?;
        let b = run_pipeline(&spec, &config).map_err(|e| e.to_string())?;
        for name in ["wtg.dot", "events.json", "model.json", "suite.json", "mutation_report.json"] {
            ensure(a.files[name] == b.files[name], format!("{}: {name} differs", spec.name))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} artifacts byte-identical across two runs"))
}

/// Replaces the actions of the handler behind the first non-system
/// transition so that it terminates the app instead.
fn divergent_variant(spec: &AppSpec, model: &FsmModel) -> Option<AppSpec> {
    let mut variant = spec.clone();
    for t in &model.transitions {
        let handler = variant
            .windows
            .iter_mut()
            .flat_map(|w| w.widgets.iter_mut())
            .filter(|w| w.id == t.event.widget)
            .flat_map(|w| w.handlers.iter_mut())
            .find(|h| h.trigger == t.event.trigger);
        if let Some(h) = handler {
            if h.actions.iter().any(|a| matches!(a.effect, Effect::TerminateApp)) {
                continue;
            }
            h.actions = vec![Action {
                id: "diverge".into(),
                effect: Effect::TerminateApp,
            }];
            return Some(variant);
        }
    }
    None
}

fn c10_suite_soundness() -> Outcome {
    let mut notes = Vec::new();
    for spec in fixtures::all() {
        let (model, _) = run_strategy(&spec, Strategy::Hybrid, &CrawlConfig::default()).map_err(|e| e.to_string())?;
        let suite = generate_tests(&model, Criterion::AllEdges).map_err(|e| e.to_string())?;
        let own = run_suite(&spec, &suite, 0, RunOptions::default()).map_err(|e| e.to_string())?;
        ensure(
            own.failed == 0 && own.crashed == 0,
            format!("{}: {} failed, {} crashed on its own spec", spec.name, own.failed, own.crashed),
        )?;
        let variant = divergent_variant(&spec, &model).ok_or(format!("{}: no transition to alter", spec.name))?;
        let other = run_suite(&variant, &suite, 0, RunOptions { allow_digest_mismatch: true }).map_err(|e| e.to_string())?;
        ensure(other.failed + other.crashed >= 1, format!("{}: variant not detected", spec.name))?;
        notes.push(format!("{} {}/{} pass, variant fails {}", spec.name, own.passed, own.cases.len(), other.failed));
    }
    Ok(notes.join("; "))
}

fn main() {
    let criteria: [Check; 10] = [
        ("fixture completeness", c1_fixture_completeness),
        ("hybrid dominance", c2_hybrid_dominance),
        ("mutation score arithmetic", c3_score_arithmetic),
        ("column-sum identity", c4_column_sums),
        ("equivalent mutant", c5_equivalent_mutant),
        ("event tracking oracle", c6_tracking_oracle),
        ("shortest replay oracle", c7_replay_oracle),
        ("replay complexity", c8_complexity),
        ("determinism", c9_determinism),
        ("suite soundness", c10_suite_soundness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
