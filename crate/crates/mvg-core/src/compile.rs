//! Internal compiled form of a {}-LIG: symbols interned to dense ids, index
//! multisets as fixed-width count vectors, plus two cheap static analyses
//! used to prune searches.
//!
//! The public API stays string-based; this layer only backs the enumerator
//! and the recognizer.

use std::collections::HashMap;

use smallvec::{smallvec, SmallVec};

use crate::mslig::{Item, MsligGrammar};
use crate::multiset::IndexMultiset;

/// Dense per-index-symbol counts, one slot per declared index symbol.
pub(crate) type Counts = SmallVec<[u16; 8]>;

pub(crate) fn counts_zero(width: usize) -> Counts {
    smallvec![0; width]
}

pub(crate) fn counts_total(c: &Counts) -> u32 {
    c.iter().map(|&n| n as u32).sum()
}

pub(crate) fn counts_leq(a: &Counts, b: &Counts) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x <= y)
}

pub(crate) fn counts_add(a: &Counts, b: &Counts) -> Counts {
    a.iter().zip(b.iter()).map(|(x, y)| x + y).collect()
}

/// Pointwise difference; requires `b` contained in `a`.
pub(crate) fn counts_sub(a: &Counts, b: &Counts) -> Counts {
    a.iter().zip(b.iter()).map(|(x, y)| x - y).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum CSymbol {
    T(u32),
    N(u32, Counts),
}

pub(crate) struct CProduction {
    pub lhs: u32,
    /// The multiset removed from the rewritten occurrence.
    pub pop: Counts,
    pub rhs: Vec<CSymbol>,
    /// Ids of the nonterminal occurrences, in order.
    pub rhs_nts: Vec<u32>,
    pub rhs_terminals: usize,
}

pub(crate) struct CompiledMslig {
    pub nonterminals: Vec<String>,
    pub terminals: Vec<String>,
    pub indices: Vec<String>,
    pub nt_id: HashMap<String, u32>,
    pub t_id: HashMap<String, u32>,
    pub ix_id: HashMap<String, u32>,
    pub productions: Vec<CProduction>,
    pub by_lhs: Vec<Vec<usize>>,
    pub start: u32,
    /// Minimum terminal yield per nonterminal, ignoring indices.
    /// `None` means the nonterminal derives no terminal string at all.
    pub min_yield: Vec<Option<u64>>,
    /// `dischargeable[nt][ix]`: whether an occurrence of index `ix` sitting
    /// on `nt` can ever be removed by some derivation below it. Indices on
    /// an occurrence where this is false can never be consumed, so such
    /// forms are dead.
    pub dischargeable: Vec<Vec<bool>>,
    /// Per index: the largest count a single production pops, and the
    /// minimum right-hand terminal count among its popping productions.
    /// `(0, 0)` for indices nothing pops.
    pub pop_power: Vec<(u16, u64)>,
    /// Per index: the minimum of rhs_terminals / total(pop) over popping
    /// productions, as a (num, den) rational; `(0, 1)` for indices nothing
    /// pops. Credits an application's terminals to the index units it
    /// consumes, so contributions stay additive across indices.
    pub pop_density: Vec<(u64, u64)>,
}

impl CompiledMslig {
    pub fn width(&self) -> usize {
        self.indices.len()
    }

    pub fn counts_of(&self, m: &IndexMultiset) -> Counts {
        let mut c = counts_zero(self.width());
        for (sym, n) in m.entries() {
            c[self.ix_id[sym] as usize] = n as u16;
        }
        c
    }

    pub fn multiset_of(&self, c: &Counts) -> IndexMultiset {
        IndexMultiset::from_counts(
            c.iter()
                .enumerate()
                .filter(|(_, &n)| n > 0)
                .map(|(i, &n)| (self.indices[i].clone(), n as u32)),
        )
    }

    /// Lower bound on the terminal yield of an occurrence of `nt` carrying
    /// `counts`; `None` if the occurrence can never finish (unproductive
    /// nonterminal, or a carried index nothing below it pops). Every carried
    /// index must be consumed by popping applications inside the
    /// occurrence's subderivation, and distinct applications materialize
    /// disjoint right-hand terminals, so both the per-index application
    /// count and the credited density are sound alongside `min_yield`.
    pub fn occurrence_lower_bound(&self, nt: u32, counts: &Counts) -> Option<u64> {
        let mut best = self.min_yield[nt as usize]?;
        let mut credited = 0u64;
        for (ix, &cnt) in counts.iter().enumerate() {
            if cnt == 0 {
                continue;
            }
            if !self.dischargeable[nt as usize][ix] {
                return None;
            }
            let (max_pop, min_terms) = self.pop_power[ix];
            let applications = (cnt as u64).div_ceil(max_pop as u64);
            best = best.max(applications * min_terms);
            let (num, den) = self.pop_density[ix];
            credited += cnt as u64 * num / den;
        }
        Some(best.max(credited))
    }
}

/// Compile a structurally valid grammar. Callers must have run validation;
/// undeclared symbols here would panic on map lookup.
pub(crate) fn compile(g: &MsligGrammar) -> CompiledMslig {
    let nonterminals: Vec<String> = g.nonterminals.iter().cloned().collect();
    let terminals: Vec<String> = g.terminals.iter().cloned().collect();
    let indices: Vec<String> = g.indices.iter().cloned().collect();
    let nt_id: HashMap<String, u32> = nonterminals
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i as u32))
        .collect();
    let t_id: HashMap<String, u32> = terminals
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i as u32))
        .collect();
    let ix_id: HashMap<String, u32> = indices
        .iter()
        .enumerate()
        .map(|(i, s)| (s.clone(), i as u32))
        .collect();
    let width = indices.len();

    let counts_of = |m: &IndexMultiset| -> Counts {
        let mut c = counts_zero(width);
        for (sym, n) in m.entries() {
            c[ix_id[sym] as usize] = n as u16;
        }
        c
    };

    let mut productions = Vec::with_capacity(g.productions.len());
    let mut by_lhs = vec![Vec::new(); nonterminals.len()];
    for (pi, p) in g.productions.iter().enumerate() {
        let lhs = nt_id[&p.lhs];
        let rhs: Vec<CSymbol> = p
            .rhs
            .iter()
            .map(|item| match item {
                Item::Terminal(t) => CSymbol::T(t_id[t]),
                Item::Nonterminal(n, m) => CSymbol::N(nt_id[n], counts_of(m)),
            })
            .collect();
        let rhs_nts: Vec<u32> = rhs
            .iter()
            .filter_map(|s| match s {
                CSymbol::N(id, _) => Some(*id),
                CSymbol::T(_) => None,
            })
            .collect();
        let rhs_terminals = rhs.len() - rhs_nts.len();
        by_lhs[lhs as usize].push(pi);
        productions.push(CProduction {
            lhs,
            pop: counts_of(&p.lhs_indices),
            rhs,
            rhs_nts,
            rhs_terminals,
        });
    }

    let min_yield = compute_min_yield(nonterminals.len(), &productions);
    let dischargeable = compute_dischargeable(nonterminals.len(), width, &productions);

    let mut pop_power = vec![(0u16, 0u64); width];
    let mut pop_density = vec![(0u64, 1u64); width];
    for p in &productions {
        let pop_total = counts_total(&p.pop) as u64;
        for ix in 0..width {
            if p.pop[ix] == 0 {
                continue;
            }
            let terms = p.rhs_terminals as u64;
            let (max_pop, min_terms) = &mut pop_power[ix];
            if *max_pop == 0 {
                *max_pop = p.pop[ix];
                *min_terms = terms;
                pop_density[ix] = (terms, pop_total);
            } else {
                *max_pop = (*max_pop).max(p.pop[ix]);
                *min_terms = (*min_terms).min(terms);
                let (num, den) = pop_density[ix];
                if terms * den < num * pop_total {
                    pop_density[ix] = (terms, pop_total);
                }
            }
        }
    }

    CompiledMslig {
        nonterminals,
        terminals,
        indices,
        nt_id,
        t_id,
        ix_id,
        productions,
        by_lhs,
        start: 0,
        min_yield,
        dischargeable,
        pop_power,
        pop_density,
    }
    .with_start(g)
}

impl CompiledMslig {
    fn with_start(mut self, g: &MsligGrammar) -> Self {
        self.start = self.nt_id[&g.start];
        self
    }
}

/// Fixpoint for the index-blind minimum yield of each nonterminal.
fn compute_min_yield(nts: usize, productions: &[CProduction]) -> Vec<Option<u64>> {
    let mut min_yield: Vec<Option<u64>> = vec![None; nts];
    loop {
        let mut changed = false;
        for p in productions {
            let mut total = p.rhs_terminals as u64;
            let mut ok = true;
            for &nt in &p.rhs_nts {
                match min_yield[nt as usize] {
                    Some(m) => total += m,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                let slot = &mut min_yield[p.lhs as usize];
                if slot.is_none() || slot.unwrap() > total {
                    *slot = Some(total);
                    changed = true;
                }
            }
        }
        if !changed {
            return min_yield;
        }
    }
}

/// Fixpoint for dischargeability: index `f` can be consumed below `X` iff
/// some production of `X` pops `f` or has a nonterminal child below which
/// `f` can be consumed (free distribution can route `f` to any child).
fn compute_dischargeable(nts: usize, width: usize, productions: &[CProduction]) -> Vec<Vec<bool>> {
    let mut ok = vec![vec![false; width]; nts];
    loop {
        let mut changed = false;
        for p in productions {
            #[allow(clippy::needless_range_loop)] // `ok` is read for other rows too
            for ix in 0..width {
                if ok[p.lhs as usize][ix] {
                    continue;
                }
                let direct = p.pop[ix] > 0;
                let via_child = p.rhs_nts.iter().any(|&nt| ok[nt as usize][ix]);
                if direct || via_child {
                    ok[p.lhs as usize][ix] = true;
                    changed = true;
                }
            }
        }
        if !changed {
            return ok;
        }
    }
}

/// Enumerate the ways of distributing `rem` over `children`, restricted to
/// routings where every index lands on a child that can discharge it. Each
/// result pairs, per child, the share it receives (shares sum to `rem`).
/// Returns an empty list when some index has no viable child.
pub(crate) fn viable_distributions(
    g: &CompiledMslig,
    rem: &Counts,
    children: &[u32],
) -> Vec<Vec<Counts>> {
    let width = rem.len();
    let mut result = vec![vec![counts_zero(width); children.len()]];
    for ix in 0..width {
        let m = rem[ix];
        if m == 0 {
            continue;
        }
        let allowed: Vec<usize> = children
            .iter()
            .enumerate()
            .filter(|(_, &nt)| g.dischargeable[nt as usize][ix])
            .map(|(pos, _)| pos)
            .collect();
        if allowed.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(result.len());
        let splits = compositions_u16(m, allowed.len());
        for base in &result {
            for split in &splits {
                let mut dist = base.clone();
                for (slot, &share) in allowed.iter().zip(split.iter()) {
                    dist[*slot][ix] = share;
                }
                next.push(dist);
            }
        }
        result = next;
    }
    result
}

fn compositions_u16(total: u16, n: usize) -> Vec<Vec<u16>> {
    let mut out = Vec::new();
    let mut current = vec![0u16; n];
    fn rec(remaining: u16, pos: usize, current: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if pos == current.len() - 1 {
            current[pos] = remaining;
            out.push(current.clone());
            return;
        }
        for k in 0..=remaining {
            current[pos] = k;
            rec(remaining - k, pos + 1, current, out);
        }
    }
    rec(total, 0, &mut current, &mut out);
    out
}
