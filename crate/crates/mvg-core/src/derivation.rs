//! Derivation steps and bounded exhaustive enumeration for {}-LIGs.
//!
//! A step rewrites one nonterminal occurrence `A t` with a production
//! `A s -> v0 B1 s1 ... Bn sn vn`: the production's `s` is removed from `t`,
//! the remainder is split by an explicit distribution over the right-hand
//! nonterminals, and each `Bi` receives its share plus `si`.
//!
//! Rewriting never lets occurrences interact: once an occurrence exists, its
//! derivations depend only on its own nonterminal and carried multiset, and
//! the form's language is the in-order concatenation of the occurrences'
//! languages. Enumeration exploits this by memoizing, per occurrence state
//! `(nonterminal, multiset)`, the derivable strings with their fewest steps,
//! closing the table under a monotone fixpoint, and assembling whole-form
//! languages as budget-bounded concatenation products. Witnesses come out as
//! shortest leftmost derivations (every derivable string has one).

use std::collections::btree_map::Entry as BEntry;
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::ops::Range;

use thiserror::Error;

use crate::compile::{
    self, counts_add, counts_leq, counts_sub, counts_total, CSymbol, CompiledMslig, Counts,
};
use crate::mslig::{Item, MsligGrammar, SententialForm, ValidationReport};
use crate::multiset::IndexMultiset;

/// Bounds for exhaustive search.
///
/// The yield bound is exact: forms that provably cannot finish within
/// `max_yield` terminals are cut without loss. The step and index bounds
/// are approximations; when either fires, the result may be incomplete and
/// the statistics say so.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Maximum terminal yield of enumerated strings.
    pub max_yield: usize,
    /// Maximum derivation length (steps from the start form).
    pub max_steps: usize,
    /// Maximum total index count a sentential form may carry.
    pub max_total_indices: usize,
}

impl SearchBounds {
    pub fn new(max_yield: usize, max_steps: usize, max_total_indices: usize) -> Self {
        SearchBounds {
            max_yield,
            max_steps,
            max_total_indices,
        }
    }
}

/// One derivation step: which occurrence is rewritten, by which production,
/// and how the remaining indices are distributed over the right-hand
/// nonterminals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepApplication {
    /// The form the step applies to.
    pub form: SententialForm,
    /// Index of the rewritten item within `form.items`.
    pub position: usize,
    /// Index into the grammar's production list.
    pub production: usize,
    /// Share of the remaining indices for each right-hand nonterminal
    /// occurrence, in order. Must sum to the occurrence's multiset minus the
    /// production's left-hand multiset.
    pub distribution: Vec<IndexMultiset>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("position {position} out of range for form of length {len}")]
    PositionOutOfRange { position: usize, len: usize },
    #[error("item at position {position} is {found}, not nonterminal {expected}")]
    LhsMismatch {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("production needs {missing} from the occurrence's index multiset")]
    NotSubMultiset { missing: String },
    #[error("bad distribution: {0}")]
    BadDistribution(String),
    #[error("production index {0} out of range")]
    NoSuchProduction(usize),
}

/// Apply one derivation step. Returns the successor form.
pub fn apply_step(g: &MsligGrammar, step: &StepApplication) -> Result<SententialForm, StepError> {
    let p = g
        .productions
        .get(step.production)
        .ok_or(StepError::NoSuchProduction(step.production))?;
    let item = step
        .form
        .items
        .get(step.position)
        .ok_or(StepError::PositionOutOfRange {
            position: step.position,
            len: step.form.items.len(),
        })?;
    let (name, carried) = match item {
        Item::Nonterminal(n, m) => (n, m),
        Item::Terminal(t) => {
            return Err(StepError::LhsMismatch {
                position: step.position,
                expected: p.lhs.clone(),
                found: format!("terminal '{t}'"),
            })
        }
    };
    if *name != p.lhs {
        return Err(StepError::LhsMismatch {
            position: step.position,
            expected: p.lhs.clone(),
            found: name.clone(),
        });
    }
    let remainder = carried
        .minus(&p.lhs_indices)
        .map_err(|e| StepError::NotSubMultiset {
            missing: e.to_string(),
        })?;
    if step.distribution.len() != p.rhs_nonterminal_count() {
        return Err(StepError::BadDistribution(format!(
            "{} shares for {} right-hand nonterminals",
            step.distribution.len(),
            p.rhs_nonterminal_count()
        )));
    }
    let sum = step
        .distribution
        .iter()
        .fold(IndexMultiset::empty(), |acc, m| acc.plus(m));
    if sum != remainder {
        return Err(StepError::BadDistribution(format!(
            "shares sum to {sum:?} but the occurrence leaves {remainder:?}"
        )));
    }
    let mut items = Vec::with_capacity(step.form.items.len() + p.rhs.len());
    items.extend_from_slice(&step.form.items[..step.position]);
    let mut share = step.distribution.iter();
    for rhs_item in &p.rhs {
        match rhs_item {
            Item::Terminal(t) => items.push(Item::Terminal(t.clone())),
            Item::Nonterminal(n, pushes) => {
                let share = share.next().expect("length checked above");
                items.push(Item::Nonterminal(n.clone(), share.plus(pushes)));
            }
        }
    }
    items.extend_from_slice(&step.form.items[step.position + 1..]);
    Ok(SententialForm::new(items))
}

/// All single-step rewrites of the leftmost nonterminal whose results stay
/// within the bounds (terminal count at most `max_yield`, total indices at
/// most `max_total_indices`). Each result carries the step that produced it.
pub fn successors(
    g: &MsligGrammar,
    form: &SententialForm,
    bounds: &SearchBounds,
) -> Vec<(StepApplication, SententialForm)> {
    let mut out = Vec::new();
    let Some(position) = form.leftmost_nonterminal() else {
        return out;
    };
    let Item::Nonterminal(name, carried) = &form.items[position] else {
        unreachable!()
    };
    for (pi, p) in g.productions_for(name) {
        let Ok(remainder) = carried.minus(&p.lhs_indices) else {
            continue;
        };
        let Ok(distributions) = remainder.distributions(p.rhs_nonterminal_count()) else {
            continue;
        };
        for distribution in distributions {
            let step = StepApplication {
                form: form.clone(),
                position,
                production: pi,
                distribution,
            };
            let next = apply_step(g, &step).expect("constructed step is valid");
            if next.terminal_count() > bounds.max_yield {
                continue;
            }
            if next.total_indices() as usize > bounds.max_total_indices {
                continue;
            }
            out.push((step, next));
        }
    }
    out
}

/// Exploration statistics. `cut_yield` counts exact cuts (occurrences that
/// provably cannot finish within the yield bound); `cut_steps` and
/// `cut_indices` count approximating cuts. The result is exactly
/// `L(G)` restricted to the yield bound iff no approximating cut fired.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Distinct memoized occurrence states.
    pub forms_visited: usize,
    /// Fixpoint evaluation passes over occurrence states.
    pub expansions: usize,
    pub cut_yield: usize,
    pub cut_steps: usize,
    pub cut_indices: usize,
}

impl SearchStats {
    /// True iff no approximating bound fired, so the string set is exactly
    /// the language restricted to the yield bound.
    pub fn exhausted(&self) -> bool {
        self.cut_steps == 0 && self.cut_indices == 0
    }
}

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error("grammar does not validate:\n{0}")]
    InvalidGrammar(ValidationReport),
    #[error("form references symbols missing from the grammar")]
    InvalidForm,
}

/// Minimal step counts for the strings (as interned token ids) derivable
/// from one occurrence state. Keys order by length first so concatenation
/// products can range-limit candidates by the remaining budget.
type StringSteps = BTreeMap<(u16, Box<[u32]>), u32>;

/// One memoized occurrence state `(nonterminal, carried multiset)`.
struct OccState {
    nt: u32,
    counts: Counts,
    /// Largest yield budget any requesting context grants this state. The
    /// sibling lower bounds of each context cap what an occurrence can ever
    /// contribute, so strings beyond the cap can never reach a full string.
    cap: u32,
    strings: StringSteps,
    /// States whose equation reads this one; re-queued when this one
    /// improves.
    dependents: Vec<usize>,
    queued: bool,
}

/// Result of a bounded exhaustive enumeration: the set of terminal strings
/// found, statistics, and on demand a replayable derivation witness per
/// string.
pub struct MsligEnumeration {
    pub strings: BTreeSet<Vec<String>>,
    pub stats: SearchStats,
    root: SententialForm,
    croot: Vec<CSymbol>,
    /// Memoized state per root nonterminal occurrence, in order.
    root_states: Vec<usize>,
    keys: HashMap<(u32, Counts), usize>,
    states: Vec<OccState>,
}

type Split = (usize, Range<usize>, u32);

impl MsligEnumeration {
    /// A shortest leftmost derivation of `tokens` from the search's start
    /// form, if `tokens` was found. Replaying the steps through
    /// [`apply_step`] reproduces exactly this string.
    pub fn witness(&self, g: &MsligGrammar, tokens: &[String]) -> Option<Vec<StepApplication>> {
        if !self.strings.contains(tokens) {
            return None;
        }
        let cg = compile::compile(g);
        let w: Vec<u32> = tokens
            .iter()
            .map(|t| cg.t_id.get(t).copied())
            .collect::<Option<_>>()?;
        let plan = self.cheapest_split(&w)?;
        let mut steps = Vec::new();
        let mut form = self.root.clone();
        for (state, range, cost) in plan {
            let tree = self.rebuild(&cg, state, &w[range], cost)?;
            emit_leftmost(g, &cg, &tree, &mut form, &mut steps).ok()?;
        }
        debug_assert_eq!(form.terminals().as_deref(), Some(tokens));
        Some(steps)
    }

    /// Cheapest way to split `w` over the root form: terminals must match
    /// literally, each occurrence consumes one of its memoized strings.
    fn cheapest_split(&self, w: &[u32]) -> Option<Vec<Split>> {
        let mut best: Option<(u64, Vec<Split>)> = None;
        let mut chosen = Vec::new();
        self.split_rec(w, 0, 0, 0, 0, &mut chosen, &mut best);
        best.map(|(_, plan)| plan)
    }

    #[allow(clippy::too_many_arguments)]
    fn split_rec(
        &self,
        w: &[u32],
        pos: usize,
        j: usize,
        nt_idx: usize,
        cost: u64,
        chosen: &mut Vec<Split>,
        best: &mut Option<(u64, Vec<Split>)>,
    ) {
        if best.as_ref().is_some_and(|(b, _)| cost >= *b) {
            return;
        }
        if j == self.croot.len() {
            if pos == w.len() {
                *best = Some((cost, chosen.clone()));
            }
            return;
        }
        match &self.croot[j] {
            CSymbol::T(t) => {
                if w.get(pos) == Some(t) {
                    self.split_rec(w, pos + 1, j + 1, nt_idx, cost, chosen, best);
                }
            }
            CSymbol::N(..) => {
                let id = self.root_states[nt_idx];
                let limit = (w.len() - pos) as u16;
                for ((len, cand), &st) in prefix_range(&self.states[id].strings, limit) {
                    let end = pos + *len as usize;
                    if w[pos..end] != **cand {
                        continue;
                    }
                    chosen.push((id, pos..end, st));
                    self.split_rec(w, end, j + 1, nt_idx + 1, cost + st as u64, chosen, best);
                    chosen.pop();
                }
            }
        }
    }

    /// Reconstruct one application deriving `w` from `state` in exactly
    /// `cost` steps, recursing into the children. The table is a least
    /// fixpoint, so some production, distribution and split must account for
    /// the recorded minimum.
    fn rebuild(
        &self,
        cg: &CompiledMslig,
        state: usize,
        w: &[u32],
        cost: u32,
    ) -> Option<WitnessNode> {
        let s = &self.states[state];
        let child_target = cost.checked_sub(1)?;
        for &pi in &cg.by_lhs[s.nt as usize] {
            let p = &cg.productions[pi];
            if !counts_leq(&p.pop, &s.counts) {
                continue;
            }
            let remainder = counts_sub(&s.counts, &p.pop);
            'dist: for dist in compile::viable_distributions(cg, &remainder, &p.rhs_nts) {
                let mut child_states = Vec::with_capacity(p.rhs_nts.len());
                let mut share = dist.iter();
                for sym in &p.rhs {
                    if let CSymbol::N(n, pushes) = sym {
                        let t = counts_add(share.next().expect("one share per nonterminal"), pushes);
                        match self.keys.get(&(*n, t)) {
                            Some(&id) => child_states.push(id),
                            None => continue 'dist,
                        }
                    }
                }
                let mut parts = Vec::new();
                if !self.exact_split(&p.rhs, &child_states, w, 0, 0, 0, child_target, &mut parts)
                {
                    continue;
                }
                let mut children = Vec::with_capacity(child_states.len());
                for (&cs, (range, st)) in child_states.iter().zip(&parts) {
                    children.push(self.rebuild(cg, cs, &w[range.clone()], *st)?);
                }
                return Some(WitnessNode {
                    production: pi,
                    shares: dist,
                    children,
                });
            }
        }
        None
    }

    /// First in-order split of `w` across `rhs` whose child step counts sum
    /// to exactly `target`.
    #[allow(clippy::too_many_arguments)]
    fn exact_split(
        &self,
        rhs: &[CSymbol],
        child_states: &[usize],
        w: &[u32],
        pos: usize,
        j: usize,
        nt_idx: usize,
        target: u32,
        out: &mut Vec<(Range<usize>, u32)>,
    ) -> bool {
        if j == rhs.len() {
            return pos == w.len() && target == 0;
        }
        match &rhs[j] {
            CSymbol::T(t) => {
                w.get(pos) == Some(t)
                    && self.exact_split(rhs, child_states, w, pos + 1, j + 1, nt_idx, target, out)
            }
            CSymbol::N(..) => {
                let set = &self.states[child_states[nt_idx]].strings;
                let limit = (w.len() - pos) as u16;
                for ((len, cand), &st) in prefix_range(set, limit) {
                    let end = pos + *len as usize;
                    if st > target || w[pos..end] != **cand {
                        continue;
                    }
                    out.push((pos..end, st));
                    if self.exact_split(
                        rhs,
                        child_states,
                        w,
                        end,
                        j + 1,
                        nt_idx + 1,
                        target - st,
                        out,
                    ) {
                        return true;
                    }
                    out.pop();
                }
                false
            }
        }
    }
}

/// All memoized strings of length at most `limit`.
fn prefix_range(
    set: &StringSteps,
    limit: u16,
) -> std::collections::btree_map::Range<'_, (u16, Box<[u32]>), u32> {
    set.range(..(limit.saturating_add(1), Box::<[u32]>::default()))
}

/// One reconstructed application: enough to emit a leftmost step.
struct WitnessNode {
    production: usize,
    /// Remainder share per right-hand nonterminal, in order.
    shares: Vec<Counts>,
    children: Vec<WitnessNode>,
}

/// Emit `tree`'s applications in leftmost order, evolving `form`. Under the
/// leftmost discipline the rewritten occurrence is always the form's
/// leftmost nonterminal.
fn emit_leftmost(
    g: &MsligGrammar,
    cg: &CompiledMslig,
    tree: &WitnessNode,
    form: &mut SententialForm,
    steps: &mut Vec<StepApplication>,
) -> Result<(), StepError> {
    let position = form
        .leftmost_nonterminal()
        .expect("a reconstructed application rewrites an occurrence");
    let step = StepApplication {
        form: form.clone(),
        position,
        production: tree.production,
        distribution: tree.shares.iter().map(|c| cg.multiset_of(c)).collect(),
    };
    *form = apply_step(g, &step)?;
    steps.push(step);
    for child in &tree.children {
        emit_leftmost(g, cg, child, form, steps)?;
    }
    Ok(())
}

/// Bounded exhaustive enumeration of `L(g)` from the start form.
pub fn enumerate_mslig(
    g: &MsligGrammar,
    bounds: &SearchBounds,
) -> Result<MsligEnumeration, EnumerateError> {
    enumerate_from(g, &SententialForm::start_of(g), bounds)
}

/// Bounded exhaustive enumeration of the terminal strings derivable from an
/// arbitrary sentential form.
pub fn enumerate_from(
    g: &MsligGrammar,
    start: &SententialForm,
    bounds: &SearchBounds,
) -> Result<MsligEnumeration, EnumerateError> {
    let report = crate::mslig::validate_mslig(g);
    if !report.is_ok() {
        return Err(EnumerateError::InvalidGrammar(report));
    }
    let cg = compile::compile(g);
    let croot = compact(&cg, start).ok_or(EnumerateError::InvalidForm)?;

    let mut eng = Engine {
        cg: &cg,
        bounds: *bounds,
        keys: HashMap::new(),
        states: Vec::new(),
        worklist: VecDeque::new(),
        stats: SearchStats::default(),
    };
    let mut root_states = Vec::new();
    let mut lbs = Vec::new();
    let base_terms = croot.iter().filter(|s| matches!(s, CSymbol::T(_))).count() as u64;
    let mut alive = true;
    let budget = (bounds.max_yield as u64).checked_sub(base_terms).unwrap_or_else(|| {
        eng.stats.cut_yield += 1;
        alive = false;
        0
    });
    let mut roots: Vec<(u32, &Counts, u64)> = Vec::new();
    if alive {
        for sym in &croot {
            if let CSymbol::N(n, t) = sym {
                match eng.admit(*n, t, budget) {
                    Some(lb) => roots.push((*n, t, lb)),
                    None => {
                        alive = false;
                        break;
                    }
                }
            }
        }
    }
    if alive {
        let total_lb: u64 = roots.iter().map(|&(_, _, lb)| lb).sum();
        if total_lb > budget {
            eng.stats.cut_yield += 1;
            alive = false;
        } else {
            for (n, t, lb) in roots {
                root_states.push(eng.state_of(n, t, (budget - (total_lb - lb)) as u32));
                lbs.push(lb);
            }
        }
    }

    let mut strings = BTreeSet::new();
    if alive {
        eng.run();
        let suffix = suffix_bounds(&croot, &lbs);
        let mut found: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut prefix = Vec::new();
        concat_products(
            &eng.states,
            &croot,
            &root_states,
            &suffix,
            bounds.max_yield,
            &mut prefix,
            0,
            0,
            0,
            &mut found,
        );
        for (w, steps) in found {
            if steps as usize <= bounds.max_steps {
                strings.insert(
                    w.iter()
                        .map(|&t| cg.terminals[t as usize].clone())
                        .collect(),
                );
            } else {
                eng.stats.cut_steps += 1;
            }
        }
    }
    eng.stats.forms_visited = eng.states.len();
    Ok(MsligEnumeration {
        strings,
        stats: eng.stats,
        root: start.clone(),
        croot,
        root_states,
        keys: eng.keys,
        states: eng.states,
    })
}

struct Engine<'g> {
    cg: &'g CompiledMslig,
    bounds: SearchBounds,
    keys: HashMap<(u32, Counts), usize>,
    states: Vec<OccState>,
    worklist: VecDeque<usize>,
    stats: SearchStats,
}

impl Engine<'_> {
    /// Admissibility of an occurrence state under a context budget: the
    /// yield lower bound is an exact cut, the index cap an approximating
    /// one. Returns the bound.
    fn admit(&mut self, nt: u32, counts: &Counts, cap: u64) -> Option<u64> {
        match self.cg.occurrence_lower_bound(nt, counts) {
            Some(lb) if lb <= cap => {
                if counts_total(counts) as usize > self.bounds.max_total_indices {
                    self.stats.cut_indices += 1;
                    None
                } else {
                    Some(lb)
                }
            }
            _ => {
                self.stats.cut_yield += 1;
                None
            }
        }
    }

    fn state_of(&mut self, nt: u32, counts: &Counts, cap: u32) -> usize {
        match self.keys.entry((nt, counts.clone())) {
            Entry::Occupied(o) => {
                let id = *o.get();
                let s = &mut self.states[id];
                if s.cap < cap {
                    s.cap = cap;
                    if !s.queued {
                        s.queued = true;
                        self.worklist.push_back(id);
                    }
                }
                id
            }
            Entry::Vacant(slot) => {
                let id = self.states.len();
                slot.insert(id);
                self.states.push(OccState {
                    nt,
                    counts: counts.clone(),
                    cap,
                    strings: BTreeMap::new(),
                    dependents: Vec::new(),
                    queued: true,
                });
                self.worklist.push_back(id);
                id
            }
        }
    }

    /// Chaotic iteration to the least fixpoint: re-evaluate states until no
    /// entry gains a string or lowers a step count.
    fn run(&mut self) {
        while let Some(e) = self.worklist.pop_front() {
            self.states[e].queued = false;
            self.stats.expansions += 1;
            self.eval(e);
        }
    }

    /// One pass: recompute the state's equation against the current table
    /// and merge improvements.
    fn eval(&mut self, e: usize) {
        let cg = self.cg;
        let (nt, counts, cap) = {
            let s = &self.states[e];
            (s.nt, s.counts.clone(), s.cap)
        };
        let mut found: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut reads: Vec<usize> = Vec::new();
        for &pi in &cg.by_lhs[nt as usize] {
            let p = &cg.productions[pi];
            if !counts_leq(&p.pop, &counts) {
                continue;
            }
            if p.rhs_terminals as u64 > cap as u64 {
                self.stats.cut_yield += 1;
                continue;
            }
            let child_budget = cap as u64 - p.rhs_terminals as u64;
            let remainder = counts_sub(&counts, &p.pop);
            'dist: for dist in compile::viable_distributions(cg, &remainder, &p.rhs_nts) {
                let mut child_counts: Vec<Counts> = Vec::with_capacity(p.rhs_nts.len());
                let mut lbs: Vec<u64> = Vec::with_capacity(p.rhs_nts.len());
                {
                    let mut share = dist.iter();
                    for sym in &p.rhs {
                        if let CSymbol::N(n, pushes) = sym {
                            let t = counts_add(
                                share.next().expect("one share per nonterminal"),
                                pushes,
                            );
                            match self.admit(*n, &t, child_budget) {
                                Some(lb) => {
                                    child_counts.push(t);
                                    lbs.push(lb);
                                }
                                None => continue 'dist,
                            }
                        }
                    }
                }
                let total_lb: u64 = lbs.iter().sum();
                if total_lb > child_budget {
                    self.stats.cut_yield += 1;
                    continue;
                }
                // Sibling lower bounds cap what each child can contribute.
                let ids: Vec<usize> = p
                    .rhs_nts
                    .iter()
                    .zip(&child_counts)
                    .zip(&lbs)
                    .map(|((&n, t), lb)| {
                        self.state_of(n, t, (child_budget - (total_lb - lb)) as u32)
                    })
                    .collect();
                reads.extend_from_slice(&ids);
                let suffix = suffix_bounds(&p.rhs, &lbs);
                let mut prefix = Vec::new();
                concat_products(
                    &self.states,
                    &p.rhs,
                    &ids,
                    &suffix,
                    cap as usize,
                    &mut prefix,
                    1,
                    0,
                    0,
                    &mut found,
                );
            }
        }
        let mut changed = false;
        {
            let s = &mut self.states[e];
            for (w, steps) in found {
                match s.strings.entry((w.len() as u16, w.into_boxed_slice())) {
                    BEntry::Vacant(slot) => {
                        slot.insert(steps);
                        changed = true;
                    }
                    BEntry::Occupied(mut slot) => {
                        if *slot.get() > steps {
                            *slot.get_mut() = steps;
                            changed = true;
                        }
                    }
                }
            }
        }
        for c in reads {
            if !self.states[c].dependents.contains(&e) {
                self.states[c].dependents.push(e);
            }
        }
        if changed {
            for i in 0..self.states[e].dependents.len() {
                let d = self.states[e].dependents[i];
                if !self.states[d].queued {
                    self.states[d].queued = true;
                    self.worklist.push_back(d);
                }
            }
        }
    }
}

/// `out[j]` = terminal-yield lower bound of `rhs[j..]`; `lbs` aligns with
/// the nonterminal occurrences in order.
fn suffix_bounds(rhs: &[CSymbol], lbs: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; rhs.len() + 1];
    let mut nt_idx = lbs.len();
    for j in (0..rhs.len()).rev() {
        out[j] = out[j + 1]
            + match &rhs[j] {
                CSymbol::T(_) => 1,
                CSymbol::N(..) => {
                    nt_idx -= 1;
                    lbs[nt_idx]
                }
            };
    }
    out
}

/// Enumerate the in-order concatenations `v0 w1 v1 ... wn vn` that fit the
/// yield budget, pairing each with its accumulated step count. The suffix
/// bounds keep the recursion output-sized: a candidate is only explored
/// while the remaining occurrences can still finish inside the budget.
#[allow(clippy::too_many_arguments)]
fn concat_products(
    states: &[OccState],
    rhs: &[CSymbol],
    ids: &[usize],
    suffix_lb: &[u64],
    budget: usize,
    prefix: &mut Vec<u32>,
    steps: u32,
    j: usize,
    nt_idx: usize,
    out: &mut HashMap<Vec<u32>, u32>,
) {
    if j == rhs.len() {
        match out.get_mut(prefix.as_slice()) {
            Some(best) => *best = (*best).min(steps),
            None => {
                out.insert(prefix.clone(), steps);
            }
        }
        return;
    }
    match &rhs[j] {
        CSymbol::T(t) => {
            prefix.push(*t);
            concat_products(
                states,
                rhs,
                ids,
                suffix_lb,
                budget,
                prefix,
                steps,
                j + 1,
                nt_idx,
                out,
            );
            prefix.pop();
        }
        CSymbol::N(..) => {
            let slack = (budget - prefix.len()) as u64;
            let Some(room) = slack.checked_sub(suffix_lb[j + 1]) else {
                return;
            };
            let limit = room.min(u16::MAX as u64 - 1) as u16;
            for ((len, w), &st) in prefix_range(&states[ids[nt_idx]].strings, limit) {
                let _ = len;
                prefix.extend_from_slice(w);
                concat_products(
                    states,
                    rhs,
                    ids,
                    suffix_lb,
                    budget,
                    prefix,
                    steps + st,
                    j + 1,
                    nt_idx + 1,
                    out,
                );
                prefix.truncate(prefix.len() - w.len());
            }
        }
    }
}

fn compact(cg: &CompiledMslig, form: &SententialForm) -> Option<Vec<CSymbol>> {
    form.items
        .iter()
        .map(|item| match item {
            Item::Terminal(t) => cg.t_id.get(t).map(|&id| CSymbol::T(id)),
            Item::Nonterminal(n, m) => {
                if m.entries().any(|(sym, _)| !cg.ix_id.contains_key(sym)) {
                    return None;
                }
                cg.nt_id.get(n).map(|&id| CSymbol::N(id, cg.counts_of(m)))
            }
        })
        .collect()
}

/// Aggregate counts of a complete derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DerivationMetrics {
    pub steps: usize,
    /// Total indices pushed across all steps.
    pub indices_added: u64,
    /// Number of steps using an epsilon production.
    pub epsilon_steps: usize,
    pub yield_length: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MetricsError {
    #[error("invalid derivation: {0}")]
    InvalidDerivation(String),
}

/// Validate a step sequence as a derivation from the start form to a
/// terminal string, and compute its metrics.
pub fn derivation_metrics(
    g: &MsligGrammar,
    steps: &[StepApplication],
) -> Result<DerivationMetrics, MetricsError> {
    let start = SententialForm::start_of(g);
    if steps.is_empty() {
        return Err(MetricsError::InvalidDerivation(
            "empty step sequence".into(),
        ));
    }
    if steps[0].form != start {
        return Err(MetricsError::InvalidDerivation(format!(
            "derivation must start at {start:?}"
        )));
    }
    let mut indices_added = 0u64;
    let mut epsilon_steps = 0usize;
    let mut current = start;
    for (i, step) in steps.iter().enumerate() {
        if step.form != current {
            return Err(MetricsError::InvalidDerivation(format!(
                "step {} applies to {:?} but the derivation is at {:?}",
                i + 1,
                step.form,
                current
            )));
        }
        let p = g
            .productions
            .get(step.production)
            .ok_or_else(|| MetricsError::InvalidDerivation(format!("step {}: no such production", i + 1)))?;
        indices_added += p.indices_added() as u64;
        if p.is_epsilon() {
            epsilon_steps += 1;
        }
        current = apply_step(g, step)
            .map_err(|e| MetricsError::InvalidDerivation(format!("step {}: {e}", i + 1)))?;
    }
    if !current.is_terminal() {
        return Err(MetricsError::InvalidDerivation(format!(
            "derivation ends at nonterminal form {current:?}"
        )));
    }
    Ok(DerivationMetrics {
        steps: steps.len(),
        indices_added,
        epsilon_steps,
        yield_length: current.terminal_count(),
    })
}

/// An exact nonnegative rational coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rational {
    num: u64,
    den: u64,
}

impl Rational {
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Panics if `den` is zero.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Rational { num, den }
    }

    pub fn from_integer(n: u64) -> Self {
        Rational { num: n, den: 1 }
    }

    /// `value <= self * scale`, exactly.
    fn bounds(self, value: u64, scale: u64) -> bool {
        (value as u128) * (self.den as u128) <= (self.num as u128) * (scale as u128)
    }
}

/// The linear-restriction predicate: indices added and epsilon steps are
/// each linearly bounded by the yield length.
pub fn check_linear_restriction(
    metrics: &DerivationMetrics,
    c_indices: Rational,
    c_epsilon: Rational,
) -> bool {
    c_indices.bounds(metrics.indices_added, metrics.yield_length as u64)
        && c_epsilon.bounds(metrics.epsilon_steps as u64, metrics.yield_length as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn ms(pairs: &[(&str, u32)]) -> IndexMultiset {
        IndexMultiset::from_counts(pairs.iter().map(|&(s, n)| (s, n)))
    }

    fn pumped_s(n: u32) -> SententialForm {
        SententialForm::new(vec![Item::nonterminal(
            "S",
            ms(&[("s_a", n), ("s_b", n), ("s_c", n), ("s_d", n), ("s_e", n)]),
        )])
    }

    #[test]
    fn apply_pump_doubles_counts() {
        let g = samples::count5();
        let step = StepApplication {
            form: pumped_s(1),
            position: 0,
            production: 0,
            distribution: vec![ms(&[
                ("s_a", 1),
                ("s_b", 1),
                ("s_c", 1),
                ("s_d", 1),
                ("s_e", 1),
            ])],
        };
        assert_eq!(apply_step(&g, &step).unwrap(), pumped_s(2));
    }

    #[test]
    fn apply_epsilon_requires_empty_remainder() {
        let g = samples::count5();
        let step = StepApplication {
            form: SententialForm::new(vec![Item::nonterminal("A", ms(&[("s_a", 1)]))]),
            position: 0,
            production: 3,
            distribution: vec![],
        };
        assert!(matches!(
            apply_step(&g, &step),
            Err(StepError::BadDistribution(_))
        ));
    }

    #[test]
    fn apply_rejects_wrong_lhs_and_missing_pop() {
        let g = samples::count5();
        let step = StepApplication {
            form: SententialForm::new(vec![Item::plain("A")]),
            position: 0,
            production: 0,
            distribution: vec![IndexMultiset::empty()],
        };
        assert!(matches!(apply_step(&g, &step), Err(StepError::LhsMismatch { .. })));

        let step = StepApplication {
            form: SententialForm::new(vec![Item::plain("A")]),
            position: 0,
            production: 2,
            distribution: vec![IndexMultiset::empty()],
        };
        assert!(matches!(apply_step(&g, &step), Err(StepError::NotSubMultiset { .. })));
    }

    #[test]
    fn successors_of_start() {
        let g = samples::count5();
        let bounds = SearchBounds::new(10, 100, 20);
        let succ = successors(&g, &SententialForm::start_of(&g), &bounds);
        let forms: BTreeSet<SententialForm> = succ.into_iter().map(|(_, f)| f).collect();
        let expected: BTreeSet<SententialForm> = [
            pumped_s(1),
            SententialForm::new(vec![
                Item::plain("A"),
                Item::plain("B"),
                Item::plain("C"),
                Item::plain("D"),
                Item::plain("E"),
            ]),
        ]
        .into_iter()
        .collect();
        assert_eq!(forms, expected);
    }

    #[test]
    fn successors_respect_leftmost_restriction() {
        let g = samples::count5();
        let bounds = SearchBounds::new(10, 100, 20);
        let form = SententialForm::new(vec![Item::plain("A"), Item::plain("B")]);
        for (step, _) in successors(&g, &form, &bounds) {
            assert_eq!(step.position, 0);
        }
    }

    #[test]
    fn successors_of_indexed_a() {
        let g = samples::count5();
        let bounds = SearchBounds::new(10, 100, 20);
        let form = SententialForm::new(vec![Item::nonterminal("A", ms(&[("s_a", 1)]))]);
        let succ = successors(&g, &form, &bounds);
        assert_eq!(succ.len(), 1);
        assert_eq!(
            succ[0].1,
            SententialForm::new(vec![Item::plain("A"), Item::terminal("a")])
        );
    }

    #[test]
    fn index_totals_are_conserved_per_step() {
        let g = samples::count5();
        let bounds = SearchBounds::new(10, 100, 25);
        let form = pumped_s(1);
        for (step, next) in successors(&g, &form, &bounds) {
            let p = &g.productions[step.production];
            let expected = form.total_indices() - p.lhs_indices.total() + p.indices_added();
            assert_eq!(next.total_indices(), expected);
        }
    }

    fn string(s: &str) -> Vec<String> {
        if s.is_empty() {
            Vec::new()
        } else {
            s.chars().map(|c| c.to_string()).collect()
        }
    }

    #[test]
    fn count5_enumeration_small() {
        let g = samples::count5();
        let out = enumerate_mslig(&g, &SearchBounds::new(5, 60, 11)).unwrap();
        let expected: BTreeSet<Vec<String>> =
            [string(""), string("abcde")].into_iter().collect();
        assert_eq!(out.strings, expected);
        assert_eq!(out.stats.cut_steps, 0);
    }

    #[test]
    fn count5_enumeration_to_three_pumps() {
        let g = samples::count5();
        let out = enumerate_mslig(&g, &SearchBounds::new(15, 120, 21)).unwrap();
        let expected: BTreeSet<Vec<String>> = [
            string(""),
            string("abcde"),
            string("aabbccddee"),
            string("aaabbbcccdddeee"),
        ]
        .into_iter()
        .collect();
        assert_eq!(out.strings, expected);
    }

    #[test]
    fn enumeration_with_yield_zero() {
        let g = samples::count5();
        let out = enumerate_mslig(&g, &SearchBounds::new(0, 30, 6)).unwrap();
        let expected: BTreeSet<Vec<String>> = [string("")].into_iter().collect();
        assert_eq!(out.strings, expected);
    }

    #[test]
    fn witness_replays_to_its_string() {
        let g = samples::count5();
        let out = enumerate_mslig(&g, &SearchBounds::new(10, 100, 16)).unwrap();
        let target = string("aabbccddee");
        let steps = out.witness(&g, &target).unwrap();
        let metrics = derivation_metrics(&g, &steps).unwrap();
        assert_eq!(metrics.yield_length, 10);
        assert_eq!(metrics.indices_added, 10);
        assert_eq!(metrics.epsilon_steps, 5);
    }

    #[test]
    fn metrics_of_three_pump_derivation() {
        let g = samples::count5();
        let out = enumerate_mslig(&g, &SearchBounds::new(15, 120, 21)).unwrap();
        let steps = out.witness(&g, &string("aaabbbcccdddeee")).unwrap();
        let metrics = derivation_metrics(&g, &steps).unwrap();
        assert_eq!(metrics.indices_added, 15);
        assert_eq!(metrics.epsilon_steps, 5);
        assert_eq!(metrics.yield_length, 15);
        assert_eq!(metrics.steps, 24);
    }

    #[test]
    fn metrics_reject_broken_chains() {
        let g = samples::count5();
        let out = enumerate_mslig(&g, &SearchBounds::new(5, 60, 11)).unwrap();
        let mut steps = out.witness(&g, &string("abcde")).unwrap();
        steps.remove(1);
        assert!(derivation_metrics(&g, &steps).is_err());
    }

    #[test]
    fn linear_restriction_boundaries() {
        let m = DerivationMetrics {
            steps: 24,
            indices_added: 15,
            epsilon_steps: 5,
            yield_length: 15,
        };
        assert!(check_linear_restriction(&m, Rational::ONE, Rational::ONE));
        let zero_yield = DerivationMetrics {
            steps: 2,
            indices_added: 1,
            epsilon_steps: 0,
            yield_length: 0,
        };
        assert!(!check_linear_restriction(&zero_yield, Rational::ONE, Rational::ONE));
        let eps_only = DerivationMetrics {
            steps: 1,
            indices_added: 0,
            epsilon_steps: 1,
            yield_length: 0,
        };
        assert!(!check_linear_restriction(&eps_only, Rational::ONE, Rational::ONE));
        let empty = DerivationMetrics {
            steps: 1,
            indices_added: 0,
            epsilon_steps: 0,
            yield_length: 0,
        };
        assert!(check_linear_restriction(&empty, Rational::ONE, Rational::ONE));
        assert!(check_linear_restriction(&m, Rational::new(1, 1), Rational::new(1, 3)));
        assert!(!check_linear_restriction(&m, Rational::new(14, 15), Rational::ONE));
    }

    #[test]
    fn anbn_enumeration() {
        let g = samples::anbn();
        let out = enumerate_mslig(&g, &SearchBounds::new(6, 60, 10)).unwrap();
        let expected: BTreeSet<Vec<String>> = [
            string(""),
            string("ab"),
            string("aabb"),
            string("aaabbb"),
        ]
        .into_iter()
        .collect();
        assert_eq!(out.strings, expected);
    }

    #[test]
    fn enumerate_from_arbitrary_form() {
        let g = samples::count5();
        let form = SententialForm::new(vec![Item::nonterminal("A", ms(&[("s_a", 2)]))]);
        let out = enumerate_from(&g, &form, &SearchBounds::new(5, 30, 10)).unwrap();
        let expected: BTreeSet<Vec<String>> = [string("aa")].into_iter().collect();
        assert_eq!(out.strings, expected);
    }
}
