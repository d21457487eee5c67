//! Spec-level mutants, stratified selection and mutation scoring.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::appspec::{Action, AppSpec, BinaryOp, Effect, Expr, UnaryOp};
use crate::testgen::{run_suite, ExecutionResult, RunError, RunOptions, TestSuite};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MutationOperator {
    /// Inline constant replacement.
    ICR,
    /// Negation of a variable reference.
    NOI,
    /// `&&` and `||` swapped.
    LCR,
    /// Arithmetic operator replacement.
    AOR,
    /// Relational operator replacement.
    ROR,
    /// Handler result replaced by none.
    RVR,
}

impl MutationOperator {
    pub const ALL: [MutationOperator; 6] = [
        MutationOperator::ICR,
        MutationOperator::NOI,
        MutationOperator::LCR,
        MutationOperator::AOR,
        MutationOperator::ROR,
        MutationOperator::RVR,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MutationOperator::ICR => "ICR",
            MutationOperator::NOI => "NOI",
            MutationOperator::LCR => "LCR",
            MutationOperator::AOR => "AOR",
            MutationOperator::ROR => "ROR",
            MutationOperator::RVR => "RVR",
        }
    }
}

impl fmt::Display for MutationOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mutant {
    pub id: String,
    pub operator: MutationOperator,
    /// `guard:<widget>:<trigger>@<node>`, `visible_if:<widget>@<node>`,
    /// `action:<id>@<node>` or `action:<id>` for result replacement.
    pub locus: String,
    pub replacement: String,
    #[serde(skip)]
    pub mutated_spec: AppSpec,
}

/// Where an edit applies: the k-th expression in document order, or an
/// action's effect.
#[derive(Debug, Clone)]
enum Edit {
    Node { site: usize, node: usize, with: Expr },
    Effect { action: String, with: Effect },
}

struct Candidate {
    operator: MutationOperator,
    locus: String,
    replacement: String,
    edit: Edit,
}

/// Enumerates every mutant in document order. Within one locus, operators
/// follow [`MutationOperator::ALL`].
pub fn generate_mutants(spec: &AppSpec) -> Vec<Mutant> {
    let mut candidates = Vec::new();
    let mut site = 0usize;
    for window in &spec.windows {
        for action in &window.lifecycle {
            action_candidates(action, &mut site, &mut candidates);
        }
        for widget in &window.widgets {
            if let Some(e) = &widget.visible_if {
                expr_candidates(e, &format!("visible_if:{}", widget.id), site, &mut candidates);
                site += 1;
            }
            for h in &widget.handlers {
                if let Some(g) = &h.guard {
                    expr_candidates(g, &format!("guard:{}:{}", widget.id, h.trigger), site, &mut candidates);
                    site += 1;
                }
                for action in &h.actions {
                    action_candidates(action, &mut site, &mut candidates);
                }
            }
        }
    }
    candidates
        .into_iter()
        .enumerate()
        .map(|(i, c)| Mutant {
            id: format!("{}-{}", c.operator, i + 1),
            operator: c.operator,
            locus: c.locus,
            replacement: c.replacement,
            mutated_spec: apply(spec, &c.edit),
        })
        .collect()
}

fn action_candidates(action: &Action, site: &mut usize, out: &mut Vec<Candidate>) {
    let label = format!("action:{}", action.id);
    match &action.effect {
        Effect::Assign { value, .. } => {
            expr_candidates(value, &label, *site, out);
            *site += 1;
        }
        Effect::ReturnValue { value: Some(value) } => {
            expr_candidates(value, &label, *site, out);
            *site += 1;
            out.push(Candidate {
                operator: MutationOperator::RVR,
                locus: label,
                replacement: format!("return {value} -> return none"),
                edit: Edit::Effect {
                    action: action.id.clone(),
                    with: Effect::ReturnValue { value: None },
                },
            });
        }
        Effect::OpenWindow { window } => out.push(Candidate {
            operator: MutationOperator::RVR,
            locus: label,
            replacement: format!("open {window} -> return none"),
            edit: Edit::Effect {
                action: action.id.clone(),
                with: Effect::ReturnValue { value: None },
            },
        }),
        _ => {}
    }
}

fn expr_candidates(expr: &Expr, label: &str, site: usize, out: &mut Vec<Candidate>) {
    let mut index = 0usize;
    visit(expr, false, &mut index, &mut |node, at, parent_is_neg| {
        let mut push = |operator, with: Expr| {
            out.push(Candidate {
                operator,
                locus: format!("{label}@{at}"),
                replacement: format!("{node} -> {with}"),
                edit: Edit::Node { site, node: at, with },
            })
        };
        match node {
            Expr::Const(c) => {
                let mut seen = vec![*c];
                for v in [0, 1, -1, c.wrapping_add(1)] {
                    if !seen.contains(&v) {
                        seen.push(v);
                        push(MutationOperator::ICR, Expr::Const(v));
                    }
                }
            }
            Expr::Var(_) if !parent_is_neg => push(MutationOperator::NOI, Expr::unary(UnaryOp::Neg, node.clone())),
            Expr::Unary(UnaryOp::Neg, inner) if matches!(**inner, Expr::Var(_)) => {
                push(MutationOperator::NOI, (**inner).clone())
            }
            Expr::Binary(op, l, r) => {
                let (operator, family): (MutationOperator, &[BinaryOp]) = if op.is_logical() {
                    (MutationOperator::LCR, &BinaryOp::LOGICAL)
                } else if op.is_arithmetic() {
                    (MutationOperator::AOR, &BinaryOp::ARITHMETIC)
                } else {
                    (MutationOperator::ROR, &BinaryOp::RELATIONAL)
                };
                for &alt in family.iter().filter(|&&o| o != *op) {
                    push(operator, Expr::binary(alt, (**l).clone(), (**r).clone()));
                }
            }
            _ => {}
        }
    });
}

/// Pre-order walk passing each node, its index and whether its parent is an
/// arithmetic negation.
fn visit(expr: &Expr, parent_is_neg: bool, index: &mut usize, f: &mut dyn FnMut(&Expr, usize, bool)) {
    let at = *index;
    *index += 1;
    f(expr, at, parent_is_neg);
    match expr {
        Expr::Const(_) | Expr::Var(_) => {}
        Expr::Unary(op, inner) => visit(inner, *op == UnaryOp::Neg, index, f),
        Expr::Binary(_, l, r) => {
            visit(l, false, index, f);
            visit(r, false, index, f);
        }
    }
}

fn apply(spec: &AppSpec, edit: &Edit) -> AppSpec {
    let mut out = spec.clone();
    match edit {
        Edit::Node { site, node, with } => {
            let mut k = 0usize;
            for_each_expr_mut(&mut out, &mut |e| {
                if k == *site {
                    *e = e.replace_node(*node, with.clone());
                }
                k += 1;
            });
        }
        Edit::Effect { action, with } => {
            for w in &mut out.windows {
                let actions = w
                    .lifecycle
                    .iter_mut()
                    .chain(w.widgets.iter_mut().flat_map(|d| d.handlers.iter_mut().flat_map(|h| h.actions.iter_mut())));
                for a in actions {
                    if &a.id == action {
                        a.effect = with.clone();
                    }
                }
            }
        }
    }
    out
}

/// Visits expressions in the same document order as [`generate_mutants`].
fn for_each_expr_mut(spec: &mut AppSpec, f: &mut dyn FnMut(&mut Expr)) {
    fn action(a: &mut Action, f: &mut dyn FnMut(&mut Expr)) {
        match &mut a.effect {
            Effect::Assign { value, .. } => f(value),
            Effect::ReturnValue { value: Some(value) } => f(value),
            _ => {}
        }
    }
    for w in &mut spec.windows {
        for a in &mut w.lifecycle {
            action(a, f);
        }
        for d in &mut w.widgets {
            if let Some(e) = &mut d.visible_if {
                f(e);
            }
            for h in &mut d.handlers {
                if let Some(g) = &mut h.guard {
                    f(g);
                }
                for a in &mut h.actions {
                    action(a, f);
                }
            }
        }
    }
}

/// Stratified selection of `budget` mutants, proportional to per-operator
/// counts with largest-remainder rounding. Every non-empty stratum gets at
/// least one mutant when the budget allows. Returns indices into
/// `mutants`, ascending.
pub fn select_mutants(mutants: &[Mutant], budget: usize, seed: u64) -> Vec<usize> {
    if budget >= mutants.len() {
        return (0..mutants.len()).collect();
    }
    let strata: Vec<Vec<usize>> = MutationOperator::ALL
        .iter()
        .map(|op| (0..mutants.len()).filter(|&i| mutants[i].operator == *op).collect())
        .collect();
    let sizes: Vec<usize> = strata.iter().map(Vec::len).collect();
    let quotas = allocate(&sizes, budget);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked: Vec<usize> = Vec::with_capacity(budget);
    for (stratum, quota) in strata.iter().zip(quotas) {
        let mut chosen: Vec<usize> = rand::seq::index::sample(&mut rng, stratum.len(), quota)
            .into_iter()
            .map(|i| stratum[i])
            .collect();
        chosen.sort_unstable();
        picked.extend(chosen);
    }
    picked.sort_unstable();
    picked
}

/// Largest-remainder apportionment of `budget` over `sizes`, with a floor
/// of one per non-empty stratum when `budget` covers them all.
pub fn allocate(sizes: &[usize], budget: usize) -> Vec<usize> {
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return vec![0; sizes.len()];
    }
    let budget = budget.min(total);
    let mut quotas: Vec<usize> = sizes.iter().map(|&n| n * budget / total).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    // Remainders compared as exact fractions over `total`.
    order.sort_by_key(|&i| std::cmp::Reverse((sizes[i] * budget) % total));
    let mut left = budget - quotas.iter().sum::<usize>();
    for &i in &order {
        if left == 0 {
            break;
        }
        if quotas[i] < sizes[i] {
            quotas[i] += 1;
            left -= 1;
        }
    }
    let non_empty = sizes.iter().filter(|&&n| n > 0).count();
    if budget >= non_empty {
        for i in 0..sizes.len() {
            if sizes[i] > 0 && quotas[i] == 0 {
                let donor = (0..sizes.len())
                    .filter(|&j| quotas[j] > 1)
                    .max_by_key(|&j| (quotas[j], std::cmp::Reverse(j)))
                    .expect("some stratum holds more than one");
                quotas[donor] -= 1;
                quotas[i] = 1;
            }
        }
    }
    quotas
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScoreError {
    #[error("mutation score is undefined for zero selected mutants")]
    NothingSelected,
}

fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// `killed / selected`, rounded to three decimals.
pub fn mutation_score(killed: usize, selected: usize) -> Result<f64, ScoreError> {
    if selected == 0 {
        return Err(ScoreError::NothingSelected);
    }
    Ok(round3(killed as f64 / selected as f64))
}

/// Share of all selected mutants killed by one operator's mutants.
pub fn per_operator_score(killed_by_op: usize, selected_total: usize) -> Result<f64, ScoreError> {
    mutation_score(killed_by_op, selected_total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutantOutcome {
    pub id: String,
    pub operator: MutationOperator,
    pub locus: String,
    pub replacement: String,
    pub killed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutationReport {
    pub app: String,
    pub seed: u64,
    pub total: usize,
    pub generated: BTreeMap<MutationOperator, usize>,
    pub selected: usize,
    pub selected_per_operator: BTreeMap<MutationOperator, usize>,
    pub killed: usize,
    pub killed_per_operator: BTreeMap<MutationOperator, usize>,
    pub survivors: Vec<String>,
    pub per_operator_score: BTreeMap<MutationOperator, f64>,
    pub final_ms: f64,
    pub mutants: Vec<MutantOutcome>,
}

impl MutationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Error)]
pub enum MutationError {
    #[error(transparent)]
    Run(#[from] RunError),
    #[error("suite does not pass on the original spec ({failed} failed, {crashed} crashed)")]
    BaselineFails { failed: usize, crashed: usize },
    #[error(transparent)]
    Score(#[from] ScoreError),
}

/// Runs `suite` against each selected mutant. A mutant is killed when any
/// case's verdict or trace digest differs from the run on `spec`.
pub fn run_mutation(
    spec: &AppSpec,
    suite: &TestSuite,
    mutants: &[Mutant],
    selection: &[usize],
    seed: u64,
) -> Result<MutationReport, MutationError> {
    let baseline = run_suite(spec, suite, seed, RunOptions::default())?;
    if !baseline.all_passed() {
        return Err(MutationError::BaselineFails {
            failed: baseline.failed,
            crashed: baseline.crashed,
        });
    }
    if selection.is_empty() {
        return Err(ScoreError::NothingSelected.into());
    }
    let options = RunOptions {
        allow_digest_mismatch: true,
    };
    let kills: Vec<bool> = selection
        .par_iter()
        .map(|&i| {
            let result = run_suite(&mutants[i].mutated_spec, suite, seed, options).expect("mismatch allowed");
            diverges(&baseline, &result)
        })
        .collect();

    let count_by = |pred: &dyn Fn(usize, usize) -> bool| -> BTreeMap<MutationOperator, usize> {
        let mut m: BTreeMap<MutationOperator, usize> = MutationOperator::ALL.iter().map(|&op| (op, 0)).collect();
        for (pos, &i) in selection.iter().enumerate() {
            if pred(pos, i) {
                *m.get_mut(&mutants[i].operator).expect("all operators present") += 1;
            }
        }
        m
    };
    let mut generated: BTreeMap<MutationOperator, usize> = MutationOperator::ALL.iter().map(|&op| (op, 0)).collect();
    for m in mutants {
        *generated.get_mut(&m.operator).expect("all operators present") += 1;
    }
    let selected_per_operator = count_by(&|_, _| true);
    let killed_per_operator = count_by(&|pos, _| kills[pos]);
    let killed = kills.iter().filter(|&&k| k).count();
    let selected = selection.len();
    let per_operator_score = killed_per_operator
        .iter()
        .map(|(&op, &k)| Ok((op, per_operator_score(k, selected)?)))
        .collect::<Result<_, ScoreError>>()?;
    let outcomes: Vec<MutantOutcome> = selection
        .iter()
        .zip(&kills)
        .map(|(&i, &killed)| MutantOutcome {
            id: mutants[i].id.clone(),
            operator: mutants[i].operator,
            locus: mutants[i].locus.clone(),
            replacement: mutants[i].replacement.clone(),
            killed,
        })
        .collect();
    Ok(MutationReport {
        app: spec.name.clone(),
        seed,
        total: mutants.len(),
        generated,
        selected,
        selected_per_operator,
        killed,
        killed_per_operator,
        survivors: outcomes.iter().filter(|o| !o.killed).map(|o| o.id.clone()).collect(),
        per_operator_score,
        final_ms: mutation_score(killed, selected)?,
        mutants: outcomes,
    })
}

fn diverges(baseline: &ExecutionResult, mutant: &ExecutionResult) -> bool {
    baseline
        .cases
        .iter()
        .zip(&mutant.cases)
        .any(|(b, m)| b.verdict != m.verdict || b.trace_digest != m.trace_digest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::appspec::{parse_app_spec, validate};
    use crate::crawler::{run_strategy, CrawlConfig, Strategy};
    use crate::fixtures;
    use crate::testgen::{generate_tests, Criterion};

    fn one_expr(expr: &str) -> AppSpec {
        parse_app_spec(&format!(
            r#"{{"format": 1, "name": "t", "entry_window": "m",
                "variables": [{{"name": "a", "initial": 0}}, {{"name": "b", "initial": 0}}],
                "windows": [{{"id": "m", "kind": "activity", "widgets": [
                    {{"id": "w", "widget_kind": "button", "visible_if": "{expr}",
                      "handlers": [{{"trigger": "click", "trigger_method": "onW", "actions": []}}]}}]}}]}}"#
        ))
        .unwrap()
    }

    fn ops(ms: &[Mutant]) -> Vec<MutationOperator> {
        ms.iter().map(|m| m.operator).collect()
    }

    #[test]
    fn relational_expression_gives_five_ror_mutants_and_two_noi() {
        let ms = generate_mutants(&one_expr("(< a b)"));
        let ror: Vec<&Mutant> = ms.iter().filter(|m| m.operator == MutationOperator::ROR).collect();
        assert_eq!(ror.len(), 5);
        assert_eq!(ms.iter().filter(|m| m.operator == MutationOperator::NOI).count(), 2);
        assert_eq!(ror[0].replacement, "(< a b) -> (<= a b)");
        assert_eq!(ror[0].locus, "visible_if:w@0");
    }

    #[test]
    fn no_expressions_no_mutants() {
        let spec = fixtures::chain(0);
        assert!(generate_mutants(&spec).is_empty());
    }

    #[test]
    fn constant_replacements_skip_duplicates() {
        let reps = |c: &str| -> Vec<String> {
            generate_mutants(&one_expr(&format!("(== a {c})")))
                .into_iter()
                .filter(|m| m.operator == MutationOperator::ICR)
                .map(|m| m.replacement)
                .collect()
        };
        assert_eq!(reps("5"), vec!["5 -> 0", "5 -> 1", "5 -> -1", "5 -> 6"]);
        assert_eq!(reps("0"), vec!["0 -> 1", "0 -> -1"]);
        assert_eq!(reps("-1"), vec!["-1 -> 0", "-1 -> 1"]);
    }

    #[test]
    fn negated_variable_is_unwrapped_once() {
        let ms = generate_mutants(&one_expr("(> (- a) 2)"));
        let noi: Vec<&str> = ms
            .iter()
            .filter(|m| m.operator == MutationOperator::NOI)
            .map(|m| m.replacement.as_str())
            .collect();
        assert_eq!(noi, vec!["(- a) -> a"]);
    }

    #[test]
    fn logical_connector_swap() {
        let ms = generate_mutants(&one_expr("(&& (< a 1) (> b 2))"));
        let lcr: Vec<&Mutant> = ms.iter().filter(|m| m.operator == MutationOperator::LCR).collect();
        assert_eq!(lcr.len(), 1);
        assert_eq!(lcr[0].mutated_spec.windows[0].widgets[0].visible_if.as_ref().unwrap().to_string(), "(|| (< a 1) (> b 2))");
    }

    #[test]
    fn every_fixture_mutant_validates_and_differs_in_one_place() {
        for spec in fixtures::all() {
            let original = expressions_and_effects(&spec);
            for m in generate_mutants(&spec) {
                let errors: Vec<_> = validate(&m.mutated_spec).into_iter().filter(|d| d.is_error()).collect();
                assert!(errors.is_empty(), "{} {:?}", m.id, errors);
                let mutated = expressions_and_effects(&m.mutated_spec);
                assert_eq!(mutated.len(), original.len());
                let diffs = original.iter().zip(&mutated).filter(|(a, b)| a != b).count();
                assert_eq!(diffs, 1, "{}", m.id);
            }
        }
    }

    fn expressions_and_effects(spec: &AppSpec) -> Vec<String> {
        let mut out = Vec::new();
        for w in &spec.windows {
            for a in w.actions() {
                out.push(serde_json::to_string(&a.effect).unwrap());
            }
            for d in &w.widgets {
                out.push(format!("{:?}", d.visible_if));
                for h in &d.handlers {
                    out.push(format!("{:?}", h.guard));
                }
            }
        }
        out
    }

    #[test]
    fn enumeration_is_in_document_order() {
        let ms = generate_mutants(&fixtures::calculator());
        let first_locus: Vec<&str> = ms.iter().map(|m| m.locus.split('@').next().unwrap()).collect();
        let mut dedup = first_locus.clone();
        dedup.dedup();
        assert_eq!(dedup, vec!["action:inc", "action:double", "action:peek"]);
        assert_eq!(ops(&ms[..4]), vec![MutationOperator::AOR; 4]);
    }

    #[test]
    fn allocation_is_proportional() {
        assert_eq!(allocate(&[80, 20], 10), vec![8, 2]);
        assert_eq!(allocate(&[98, 1, 1], 3), vec![1, 1, 1]);
        assert_eq!(allocate(&[0, 5], 2), vec![0, 2]);
        assert_eq!(allocate(&[3, 3, 3], 2), vec![1, 1, 0]);
    }

    #[test]
    fn selection_sums_to_budget() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1000 {
            let sizes: Vec<usize> = (0..6).map(|_| rng.gen_range(0..40)).collect();
            let total: usize = sizes.iter().sum();
            if total == 0 {
                continue;
            }
            let budget = rng.gen_range(1..=total);
            let q = allocate(&sizes, budget);
            assert_eq!(q.iter().sum::<usize>(), budget, "{sizes:?} {budget}");
            assert!(q.iter().zip(&sizes).all(|(a, n)| a <= n));
        }
    }

    #[test]
    fn selection_is_seeded_and_identity_at_full_budget() {
        let spec = fixtures::open_manager();
        let ms = generate_mutants(&spec);
        assert_eq!(select_mutants(&ms, ms.len(), 1), (0..ms.len()).collect::<Vec<_>>());
        let a = select_mutants(&ms, 20, 4);
        assert_eq!(a, select_mutants(&ms, 20, 4));
        assert_eq!(a.len(), 20);
        assert_ne!(a, select_mutants(&ms, 20, 5));
    }

    #[test]
    fn score_arithmetic() {
        assert_eq!(mutation_score(290, 335), Ok(0.866));
        assert_eq!(mutation_score(370, 370), Ok(1.0));
        assert_eq!(mutation_score(0, 10), Ok(0.0));
        assert_eq!(per_operator_score(113, 370), Ok(0.305));
        assert_eq!(mutation_score(1, 0), Err(ScoreError::NothingSelected));
    }

    fn suite_for(spec: &AppSpec) -> TestSuite {
        let (m, _) = run_strategy(spec, Strategy::Hybrid, &CrawlConfig::default()).unwrap();
        generate_tests(&m, Criterion::AllEdges).unwrap()
    }

    #[test]
    fn calculator_mutants_are_all_killed() {
        let spec = fixtures::calculator();
        let ms = generate_mutants(&spec);
        let all: Vec<usize> = (0..ms.len()).collect();
        let report = run_mutation(&spec, &suite_for(&spec), &ms, &all, 0).unwrap();
        assert_eq!(report.total, 27);
        assert_eq!(report.final_ms, 1.0);
        assert!(report.survivors.is_empty());
        let sum: f64 = report.per_operator_score.values().sum();
        assert!((sum - 1.0).abs() <= 0.003);
    }

    #[test]
    fn equivalent_mutant_survives() {
        let spec = fixtures::calculator_equivalent();
        let ms = generate_mutants(&spec);
        let all: Vec<usize> = (0..ms.len()).collect();
        let report = run_mutation(&spec, &suite_for(&spec), &ms, &all, 0).unwrap();
        assert_eq!(report.selected, 17);
        assert_eq!(report.survivors.len(), 1);
        let survivor = ms.iter().find(|m| m.id == report.survivors[0]).unwrap();
        assert_eq!(survivor.replacement, "(* count 1) -> (/ count 1)");
        assert!(report.final_ms < 1.0);
    }

    #[test]
    fn empty_suite_kills_nothing() {
        let spec = fixtures::calculator();
        let mut suite = suite_for(&spec);
        suite.cases.clear();
        let ms = generate_mutants(&spec);
        let report = run_mutation(&spec, &suite, &ms, &[0, 1, 2], 0).unwrap();
        assert_eq!(report.killed, 0);
        assert_eq!(report.final_ms, 0.0);
    }

    #[test]
    fn failing_baseline_is_refused() {
        let spec = fixtures::calculator();
        let mut suite = suite_for(&spec);
        suite.cases[0].steps[0].expect_window = "elsewhere".into();
        let ms = generate_mutants(&spec);
        assert!(matches!(
            run_mutation(&spec, &suite, &ms, &[0], 0),
            Err(MutationError::BaselineFails { .. })
        ));
    }
}
