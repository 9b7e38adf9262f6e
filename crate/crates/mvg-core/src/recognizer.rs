//! Extended CKY recognition for {}-LIGs.
//!
//! Chart cells are indexed by spans between token positions, including the
//! empty spans on the diagonal; items pair a nonterminal with a bounded
//! tuple of index counts. The grammar is brought into extended two form
//! internally, so every production is an epsilon or terminal seed, a unary
//! hop within a cell, or a binary combination of two adjacent spans. Cells
//! are saturated span by span; the diagonal cells make epsilon and unary
//! productions fit the CKY scheme.
//!
//! Per-symbol counts are capped (by default at the input length, per the
//! linear restriction). A derivation whose counts stay within the cap is
//! always found; if any candidate item ever exceeded the cap the result
//! records it, so a rejection with no cap hit is a definitive non-membership
//! answer.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::compile::{
    compile, counts_add, counts_leq, counts_sub, counts_zero, CSymbol, Counts,
};
use crate::derivation::{apply_step, StepApplication};
use crate::mslig::{
    validate_mslig, Item, MsligGrammar, MsligProduction, SententialForm, ValidationReport,
};
use crate::multiset::IndexMultiset;
use crate::normal_forms::to_etf;

/// A chart entry: a nonterminal plus the index multiset its subderivation
/// carries over the span.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ChartItem {
    pub nonterminal: String,
    pub counts: IndexMultiset,
}

/// Recognition limits.
#[derive(Clone, Copy, Debug, Default)]
pub struct RecognizerConfig {
    /// Per-symbol count cap for chart items; `None` means max(n, 1).
    /// Candidate items above the cap are dropped and reported via
    /// [`Recognition::cap_hit`].
    pub index_cap: Option<u32>,
    /// Abort once this many item combinations have been attempted.
    pub op_budget: Option<u64>,
}

#[derive(Debug, Error)]
pub enum RecognizeError {
    #[error("grammar does not validate:\n{0}")]
    InvalidGrammar(ValidationReport),
    #[error("unknown token {0:?}")]
    UnknownToken(String),
    #[error("operation budget exhausted after {0} operations")]
    BudgetExceeded(u64),
}

/// Combine two adjacent chart items through a binary production: the
/// production's left-hand multiset plus whatever each child carries beyond
/// its pushed share. `None` when a push is not covered, a child symbol does
/// not match, or a resulting count exceeds `cap`.
pub fn combine_binary(
    left: &ChartItem,
    right: &ChartItem,
    production: &MsligProduction,
    cap: u32,
) -> Option<ChartItem> {
    let [Item::Nonterminal(b1, s1), Item::Nonterminal(b2, s2)] = production.rhs.as_slice()
    else {
        return None;
    };
    if left.nonterminal != *b1 || right.nonterminal != *b2 {
        return None;
    }
    let u = left.counts.minus(s1).ok()?;
    let v = right.counts.minus(s2).ok()?;
    let t = u.plus(&v).plus(&production.lhs_indices);
    if t.entries().any(|(_, c)| c > cap) {
        return None;
    }
    Some(ChartItem {
        nonterminal: production.lhs.clone(),
        counts: t,
    })
}

struct UnaryRule {
    pop: Counts,
    push: Counts,
    lhs: u32,
    prod: usize,
}

struct BinaryRule {
    pop: Counts,
    b1: u32,
    push1: Counts,
    b2: u32,
    push2: Counts,
    lhs: u32,
    prod: usize,
}

struct Rules {
    eps: Vec<(u32, usize)>,
    term: HashMap<u32, Vec<(u32, usize)>>,
    unary_by_child: Vec<Vec<UnaryRule>>,
    binary: Vec<BinaryRule>,
    by_left: Vec<Vec<usize>>,
    by_right: Vec<Vec<usize>>,
}

/// A reusable recognizer for one grammar: validation, the internal ETF
/// conversion, and rule classification happen once. The grammar and name
/// tables are shared with every [`Recognition`], so a run allocates only
/// its chart.
pub struct Recognizer {
    etf: Arc<MsligGrammar>,
    nt_names: Arc<Vec<String>>,
    index_names: Arc<Vec<String>>,
    t_id: HashMap<String, u32>,
    start: u32,
    width: usize,
    rules: Rules,
}

impl Recognizer {
    pub fn new(g: &MsligGrammar) -> Result<Recognizer, RecognizeError> {
        let report = validate_mslig(g);
        if !report.is_ok() {
            return Err(RecognizeError::InvalidGrammar(report));
        }
        let etf = to_etf(g);
        let cg = compile(&etf);
        let nt_count = cg.nonterminals.len();
        let mut rules = Rules {
            eps: Vec::new(),
            term: HashMap::new(),
            unary_by_child: (0..nt_count).map(|_| Vec::new()).collect(),
            binary: Vec::new(),
            by_left: vec![Vec::new(); nt_count],
            by_right: vec![Vec::new(); nt_count],
        };
        for (pi, p) in cg.productions.iter().enumerate() {
            match p.rhs.as_slice() {
                [] => rules.eps.push((p.lhs, pi)),
                [CSymbol::T(t)] => rules.term.entry(*t).or_default().push((p.lhs, pi)),
                [CSymbol::N(b, push)] => rules.unary_by_child[*b as usize].push(UnaryRule {
                    pop: p.pop.clone(),
                    push: push.clone(),
                    lhs: p.lhs,
                    prod: pi,
                }),
                [CSymbol::N(b1, s1), CSymbol::N(b2, s2)] => {
                    rules.by_left[*b1 as usize].push(rules.binary.len());
                    rules.by_right[*b2 as usize].push(rules.binary.len());
                    rules.binary.push(BinaryRule {
                        pop: p.pop.clone(),
                        b1: *b1,
                        push1: s1.clone(),
                        b2: *b2,
                        push2: s2.clone(),
                        lhs: p.lhs,
                        prod: pi,
                    });
                }
                _ => unreachable!("the internal grammar is in extended two form"),
            }
        }
        Ok(Recognizer {
            etf: Arc::new(etf),
            nt_names: Arc::new(cg.nonterminals.clone()),
            index_names: Arc::new(cg.indices.clone()),
            t_id: cg.t_id.clone(),
            start: cg.start,
            width: cg.width(),
            rules,
        })
    }

    /// The equivalent grammar the chart actually runs on; extracted
    /// derivation witnesses replay over this grammar.
    pub fn grammar(&self) -> &MsligGrammar {
        &self.etf
    }

    pub fn recognize(
        &self,
        tokens: &[String],
        cfg: &RecognizerConfig,
    ) -> Result<Recognition, RecognizeError> {
        let n = tokens.len();
        // Counts fit u16 with headroom for one addition.
        let cap = cfg
            .index_cap
            .unwrap_or(n.max(1) as u32)
            .clamp(1, 16_384);
        let mut token_ids = Vec::with_capacity(n);
        for t in tokens {
            match self.t_id.get(t) {
                Some(&id) => token_ids.push(id),
                None => return Err(RecognizeError::UnknownToken(t.clone())),
            }
        }

        let nt_count = self.nt_names.len();
        let idx = |i: usize, j: usize| i * (n + 1) + j;
        let mut cells: Vec<Cell> = (0..(n + 1) * (n + 1)).map(|_| Cell::new(nt_count)).collect();
        let mut cap_hit = false;
        let mut budget = OpBudget {
            ops: 0,
            limit: cfg.op_budget,
        };

        for len in 0..=n {
            for i in 0..=(n - len) {
                let j = i + len;
                let mut cell = std::mem::take(&mut cells[idx(i, j)]);
                match len {
                    0 => {
                        for &(lhs, prod) in &self.rules.eps {
                            cell.add(lhs, counts_zero(self.width), Back::Leaf { prod }, cap, &mut cap_hit);
                        }
                    }
                    1 => {
                        if let Some(seeds) = self.rules.term.get(&token_ids[i]) {
                            for &(lhs, prod) in seeds {
                                cell.add(lhs, counts_zero(self.width), Back::Leaf { prod }, cap, &mut cap_hit);
                            }
                        }
                    }
                    _ => {}
                }
                // Proper splits: both halves strictly shorter, already done.
                for k in (i + 1)..j {
                    let left_cell = &cells[idx(i, k)];
                    let right_cell = &cells[idx(k, j)];
                    for (li, (nt, u)) in left_cell.items.iter().enumerate() {
                        for &rid in &self.rules.by_left[*nt as usize] {
                            let rule = &self.rules.binary[rid];
                            for &ri in &right_cell.by_nt[rule.b2 as usize] {
                                budget.spend()?;
                                let v = &right_cell.items[ri].1;
                                if let Some(t) = combine_counts(u, v, rule) {
                                    cell.add(
                                        rule.lhs,
                                        t,
                                        Back::Binary { prod: rule.prod, split: k, left: li, right: ri },
                                        cap,
                                        &mut cap_hit,
                                    );
                                }
                            }
                        }
                    }
                }
                // Saturate: unary rules and binary rules with an empty-span
                // side. New items are appended and processed in turn.
                let mut cursor = 0;
                while cursor < cell.items.len() {
                    let (nt, counts) = cell.items[cursor].clone();
                    for rule in &self.rules.unary_by_child[nt as usize] {
                        budget.spend()?;
                        if counts_leq(&rule.push, &counts) {
                            let t = counts_add(&counts_sub(&counts, &rule.push), &rule.pop);
                            cell.add(
                                rule.lhs,
                                t,
                                Back::Unary { prod: rule.prod, child: cursor },
                                cap,
                                &mut cap_hit,
                            );
                        }
                    }
                    for &rid in &self.rules.by_left[nt as usize] {
                        let rule = &self.rules.binary[rid];
                        // The right sibling derives the empty span at j.
                        if len == 0 {
                            // Partners live in this very cell; snapshot since
                            // add() appends.
                            let partners = cell.by_nt[rule.b2 as usize].clone();
                            for ri in partners {
                                budget.spend()?;
                                let v = cell.items[ri].1.clone();
                                if let Some(t) = combine_counts(&counts, &v, rule) {
                                    cell.add(
                                        rule.lhs,
                                        t,
                                        Back::Binary { prod: rule.prod, split: j, left: cursor, right: ri },
                                        cap,
                                        &mut cap_hit,
                                    );
                                }
                            }
                        } else {
                            let diag = &cells[idx(j, j)];
                            for &ri in &diag.by_nt[rule.b2 as usize] {
                                budget.spend()?;
                                if let Some(t) = combine_counts(&counts, &diag.items[ri].1, rule) {
                                    cell.add(
                                        rule.lhs,
                                        t,
                                        Back::Binary { prod: rule.prod, split: j, left: cursor, right: ri },
                                        cap,
                                        &mut cap_hit,
                                    );
                                }
                            }
                        }
                    }
                    for &rid in &self.rules.by_right[nt as usize] {
                        let rule = &self.rules.binary[rid];
                        // The left sibling derives the empty span at i.
                        if len == 0 {
                            let partners = cell.by_nt[rule.b1 as usize].clone();
                            for li in partners {
                                budget.spend()?;
                                let u = cell.items[li].1.clone();
                                if let Some(t) = combine_counts(&u, &counts, rule) {
                                    cell.add(
                                        rule.lhs,
                                        t,
                                        Back::Binary { prod: rule.prod, split: i, left: li, right: cursor },
                                        cap,
                                        &mut cap_hit,
                                    );
                                }
                            }
                        } else {
                            let diag = &cells[idx(i, i)];
                            for &li in &diag.by_nt[rule.b1 as usize] {
                                budget.spend()?;
                                if let Some(t) = combine_counts(&diag.items[li].1, &counts, rule) {
                                    cell.add(
                                        rule.lhs,
                                        t,
                                        Back::Binary { prod: rule.prod, split: i, left: li, right: cursor },
                                        cap,
                                        &mut cap_hit,
                                    );
                                }
                            }
                        }
                    }
                    cursor += 1;
                }
                cells[idx(i, j)] = cell;
            }
        }

        let accept_item = cells[idx(0, n)].find(self.start, &counts_zero(self.width));
        Ok(Recognition {
            accepted: accept_item.is_some(),
            cap_hit,
            ops: budget.ops,
            n,
            etf: Arc::clone(&self.etf),
            nt_names: Arc::clone(&self.nt_names),
            index_names: Arc::clone(&self.index_names),
            cells,
            accept_item,
        })
    }
}

/// One-shot convenience wrapper around [`Recognizer`].
pub fn recognize(
    g: &MsligGrammar,
    tokens: &[String],
    cfg: &RecognizerConfig,
) -> Result<Recognition, RecognizeError> {
    Recognizer::new(g)?.recognize(tokens, cfg)
}

fn combine_counts(u: &Counts, v: &Counts, rule: &BinaryRule) -> Option<Counts> {
    if !counts_leq(&rule.push1, u) || !counts_leq(&rule.push2, v) {
        return None;
    }
    Some(counts_add(
        &counts_add(&counts_sub(u, &rule.push1), &counts_sub(v, &rule.push2)),
        &rule.pop,
    ))
}

struct OpBudget {
    ops: u64,
    limit: Option<u64>,
}

impl OpBudget {
    fn spend(&mut self) -> Result<(), RecognizeError> {
        self.ops += 1;
        match self.limit {
            Some(limit) if self.ops > limit => Err(RecognizeError::BudgetExceeded(self.ops)),
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
enum Back {
    /// Epsilon or terminal seed.
    Leaf { prod: usize },
    Unary { prod: usize, child: usize },
    Binary {
        prod: usize,
        split: usize,
        left: usize,
        right: usize,
    },
}

#[derive(Default)]
struct Cell {
    items: Vec<(u32, Counts)>,
    back: Vec<Back>,
    by_nt: Vec<Vec<usize>>,
}

impl Cell {
    fn new(nt_count: usize) -> Cell {
        Cell {
            by_nt: vec![Vec::new(); nt_count],
            ..Cell::default()
        }
    }

    /// Cells stay small, so duplicate detection scans the per-nonterminal
    /// bucket instead of hashing.
    fn add(&mut self, nt: u32, counts: Counts, back: Back, cap: u32, cap_hit: &mut bool) {
        if counts.iter().any(|&c| c as u32 > cap) {
            *cap_hit = true;
            return;
        }
        let bucket = &mut self.by_nt[nt as usize];
        if bucket.iter().any(|&id| self.items[id].1 == counts) {
            return;
        }
        let id = self.items.len();
        bucket.push(id);
        self.items.push((nt, counts));
        self.back.push(back);
    }

    fn find(&self, nt: u32, counts: &Counts) -> Option<usize> {
        self.by_nt
            .get(nt as usize)?
            .iter()
            .copied()
            .find(|&id| self.items[id].1 == *counts)
    }
}

/// The outcome of one recognition run, with chart access and derivation
/// extraction.
pub struct Recognition {
    /// Whether the top cell contains the start symbol with zero counts.
    pub accepted: bool,
    /// Whether any candidate item was dropped for exceeding the cap. A
    /// rejection with `cap_hit == false` is definitive.
    pub cap_hit: bool,
    /// Item combinations attempted (the recognizer's work measure).
    pub ops: u64,
    n: usize,
    etf: Arc<MsligGrammar>,
    nt_names: Arc<Vec<String>>,
    index_names: Arc<Vec<String>>,
    cells: Vec<Cell>,
    accept_item: Option<usize>,
}

impl Recognition {
    /// Input length in tokens.
    pub fn input_len(&self) -> usize {
        self.n
    }

    /// The grammar that derivation witnesses replay over.
    pub fn grammar(&self) -> &MsligGrammar {
        &self.etf
    }

    /// The saturated items of the span from position `i` to `j`, sorted.
    pub fn cell(&self, i: usize, j: usize) -> Vec<ChartItem> {
        assert!(i <= j && j <= self.n, "span ({i}, {j}) out of range");
        let mut out: Vec<ChartItem> = self.cells[self.idx(i, j)]
            .items
            .iter()
            .map(|(nt, counts)| ChartItem {
                nonterminal: self.nt_names[*nt as usize].clone(),
                counts: self.multiset(counts),
            })
            .collect();
        out.sort();
        out
    }

    /// A derivation of the input over [`grammar`](Self::grammar), rebuilt
    /// from back-pointers; `None` iff the input was rejected. Replaying the
    /// steps through [`apply_step`] reproduces the input.
    pub fn witness(&self) -> Option<Vec<StepApplication>> {
        let root = self.accept_item?;
        let mut steps = Vec::new();
        let mut form = SententialForm::start_of(&self.etf);
        self.emit(0, self.n, root, 0, &mut form, &mut steps);
        debug_assert!(form.is_terminal());
        Some(steps)
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i * (self.n + 1) + j
    }

    fn multiset(&self, counts: &Counts) -> IndexMultiset {
        IndexMultiset::from_counts(
            self.index_names
                .iter()
                .zip(counts.iter())
                .map(|(name, &c)| (name.clone(), c as u32)),
        )
    }

    fn emit(
        &self,
        i: usize,
        j: usize,
        item: usize,
        pos: usize,
        form: &mut SententialForm,
        steps: &mut Vec<StepApplication>,
    ) {
        let cell = &self.cells[self.idx(i, j)];
        let back = cell.back[item].clone();
        let apply = |steps: &mut Vec<StepApplication>,
                     form: &mut SententialForm,
                     prod: usize,
                     distribution: Vec<IndexMultiset>| {
            let step = StepApplication {
                form: form.clone(),
                position: pos,
                production: prod,
                distribution,
            };
            *form = apply_step(&self.etf, &step).expect("chart-derived steps replay");
            steps.push(step);
        };
        match back {
            Back::Leaf { prod } => apply(steps, form, prod, Vec::new()),
            Back::Unary { prod, child } => {
                let push = self.rhs_push(prod, 0);
                let share = self
                    .multiset(&cell.items[child].1)
                    .minus(&push)
                    .expect("chart arithmetic is consistent");
                apply(steps, form, prod, vec![share]);
                self.emit(i, j, child, pos, form, steps);
            }
            Back::Binary {
                prod,
                split,
                left,
                right,
            } => {
                let u = &self.cells[self.idx(i, split)].items[left].1;
                let v = &self.cells[self.idx(split, j)].items[right].1;
                let d1 = self
                    .multiset(u)
                    .minus(&self.rhs_push(prod, 0))
                    .expect("chart arithmetic is consistent");
                let d2 = self
                    .multiset(v)
                    .minus(&self.rhs_push(prod, 1))
                    .expect("chart arithmetic is consistent");
                apply(steps, form, prod, vec![d1, d2]);
                // Expand the right half first so the left child's position
                // stays valid.
                self.emit(split, j, right, pos + 1, form, steps);
                self.emit(i, split, left, pos, form, steps);
            }
        }
    }

    fn rhs_push(&self, prod: usize, occurrence: usize) -> IndexMultiset {
        match &self.etf.productions[prod].rhs[occurrence] {
            Item::Nonterminal(_, s) => s.clone(),
            Item::Terminal(_) => IndexMultiset::empty(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn letters(s: &str) -> Vec<String> {
        s.chars().map(|c| c.to_string()).collect()
    }

    fn run(g: &MsligGrammar, tokens: &[String]) -> Recognition {
        recognize(g, tokens, &RecognizerConfig::default()).unwrap()
    }

    #[test]
    fn count5_members_accepted() {
        let g = samples::count5();
        for n in 0..=3 {
            let w = ["a", "b", "c", "d", "e"].map(|l| l.repeat(n)).concat();
            let rec = run(&g, &letters(&w));
            assert!(rec.accepted, "a^{n}..e^{n} must be accepted");
            assert!(!rec.cap_hit);
        }
    }

    #[test]
    fn count5_non_members_rejected_definitively() {
        let g = samples::count5();
        for w in ["a", "abcd", "abcde".repeat(2).as_str(), "aabbccdde", "edcba", "aabccddee"] {
            let rec = run(&g, &letters(w));
            assert!(!rec.accepted, "{w:?} is not in COUNT-5");
            assert!(!rec.cap_hit, "rejection of {w:?} must be cap-independent");
        }
    }

    #[test]
    fn empty_input_follows_the_language() {
        assert!(run(&samples::count5(), &[]).accepted);
        assert!(run(&samples::anbn(), &[]).accepted);
        let no_eps = MsligGrammar::new(
            ["S"],
            ["a"],
            Vec::<String>::new(),
            vec![MsligProduction::new(
                "S",
                IndexMultiset::empty(),
                vec![Item::terminal("a")],
            )],
            "S",
        );
        assert!(!run(&no_eps, &[]).accepted);
        assert!(run(&no_eps, &letters("a")).accepted);
    }

    #[test]
    fn unknown_token_is_an_error() {
        let err = recognize(&samples::count5(), &letters("ax"), &RecognizerConfig::default());
        assert!(matches!(err, Err(RecognizeError::UnknownToken(t)) if t == "x"));
    }

    #[test]
    fn op_budget_aborts() {
        let cfg = RecognizerConfig {
            index_cap: None,
            op_budget: Some(3),
        };
        let err = recognize(&samples::count5(), &letters("abcde"), &cfg);
        assert!(matches!(err, Err(RecognizeError::BudgetExceeded(_))));
    }

    #[test]
    fn tight_cap_is_reported() {
        let g = samples::count5();
        let cfg = RecognizerConfig {
            index_cap: Some(1),
            op_budget: None,
        };
        let rec = recognize(&g, &letters("aabbccddee"), &cfg).unwrap();
        assert!(!rec.accepted, "counts of two exceed a cap of one");
        assert!(rec.cap_hit, "the drop must be visible");
        let rec = recognize(&g, &letters("abcde"), &cfg).unwrap();
        assert!(rec.accepted, "one of each index fits the cap");
    }

    #[test]
    fn chart_cells_carry_span_multisets() {
        let g = samples::anbn();
        let rec = run(&g, &letters("ab"));
        assert!(rec.accepted);
        let t02 = rec.cell(0, 2);
        assert!(t02.contains(&ChartItem {
            nonterminal: "T".into(),
            counts: IndexMultiset::from_symbols(["f"]),
        }));
        assert!(t02.contains(&ChartItem {
            nonterminal: "S".into(),
            counts: IndexMultiset::empty(),
        }));
        // Diagonal cells hold the nullable nonterminals.
        assert!(rec.cell(1, 1).contains(&ChartItem {
            nonterminal: "T".into(),
            counts: IndexMultiset::empty(),
        }));
    }

    #[test]
    fn witness_replays_to_the_input() {
        let g = samples::count5();
        for w in ["", "abcde", "aabbccddee"] {
            let tokens = letters(w);
            let rec = run(&g, &tokens);
            assert!(rec.accepted);
            let steps = rec.witness().unwrap();
            let mut form = SententialForm::start_of(rec.grammar());
            for step in &steps {
                assert_eq!(step.form, form, "steps chain");
                form = apply_step(rec.grammar(), step).unwrap();
            }
            assert_eq!(form.terminals().as_deref(), Some(&tokens[..]));
        }
        assert!(run(&g, &letters("abc")).witness().is_none());
    }

    #[test]
    fn combine_binary_arithmetic() {
        let ms = |pairs: &[(&str, u32)]| {
            IndexMultiset::from_counts(pairs.iter().map(|&(s, c)| (s, c)))
        };
        let item = |nt: &str, counts: IndexMultiset| ChartItem {
            nonterminal: nt.into(),
            counts,
        };
        let prod = |s: IndexMultiset, s1: IndexMultiset, s2: IndexMultiset| {
            MsligProduction::new(
                "A",
                s,
                vec![Item::nonterminal("B", s1), Item::nonterminal("C", s2)],
            )
        };
        // Exact consumption of a pushed index.
        let p = prod(IndexMultiset::empty(), ms(&[("f", 1)]), IndexMultiset::empty());
        let out = combine_binary(&item("B", ms(&[("f", 1)])), &item("C", ms(&[])), &p, 8);
        assert_eq!(out, Some(item("A", IndexMultiset::empty())));
        // Push not covered by the child.
        assert_eq!(combine_binary(&item("B", ms(&[])), &item("C", ms(&[])), &p, 8), None);
        // General arithmetic.
        let p = prod(ms(&[("h", 1)]), ms(&[("f", 1)]), IndexMultiset::empty());
        let out = combine_binary(
            &item("B", ms(&[("f", 2)])),
            &item("C", ms(&[("g", 1)])),
            &p,
            8,
        );
        assert_eq!(out, Some(item("A", ms(&[("f", 1), ("g", 1), ("h", 1)]))));
        // Wrong child symbol.
        assert_eq!(combine_binary(&item("X", ms(&[])), &item("C", ms(&[])), &p, 8), None);
        // Cap exceeded.
        let p0 = prod(IndexMultiset::empty(), IndexMultiset::empty(), IndexMultiset::empty());
        assert_eq!(
            combine_binary(&item("B", ms(&[("f", 9)])), &item("C", ms(&[])), &p0, 8),
            None
        );
    }
}
