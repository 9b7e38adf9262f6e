//! Normal forms for {}-LIGs: the restricted index normal form (RINF), in
//! which every production either ignores indices or moves exactly one, and
//! the extended two form (ETF), in which right-hand sides are at most binary.
//!
//! Both transformations are deterministic: index elements are moved in
//! sorted order, and fresh nonterminals are named after the position of the
//! production they come from (under the reserved "@" prefix, so they cannot
//! collide with user names). Productions already in the target form pass
//! through untouched, which makes both transforms idempotent.

use std::collections::{BTreeMap, BTreeSet};

use crate::mslig::{Item, MsligGrammar, MsligProduction, RESERVED_PREFIX};
use crate::multiset::IndexMultiset;

fn rinf_production(p: &MsligProduction) -> bool {
    // Type 1: no index activity at all; any mix of terminals and bare
    // nonterminals (free distribution of an empty remainder is trivial).
    let type1 = p.lhs_indices.is_empty()
        && p.rhs.iter().all(|item| match item {
            Item::Terminal(_) => true,
            Item::Nonterminal(_, s) => s.is_empty(),
        });
    if type1 {
        return true;
    }
    let [Item::Nonterminal(_, s)] = p.rhs.as_slice() else {
        return false;
    };
    // Type 2: A -> Bf. Type 3: Af -> B.
    (p.lhs_indices.is_empty() && s.total() == 1)
        || (p.lhs_indices.total() == 1 && s.is_empty())
}

/// True iff every production is index-free, pushes exactly one index onto a
/// lone right-hand nonterminal, or pops exactly one index.
pub fn is_rinf(g: &MsligGrammar) -> bool {
    g.productions.iter().all(rinf_production)
}

fn etf_production(p: &MsligProduction) -> bool {
    match p.rhs.as_slice() {
        [] | [Item::Terminal(_)] => p.lhs_indices.is_empty(),
        [Item::Nonterminal(..)] => true,
        [a, b] => !a.is_terminal() && !b.is_terminal(),
        _ => false,
    }
}

/// True iff every production is binary over nonterminals, unary, or a bare
/// terminal/epsilon production (arbitrary index multisets are allowed on the
/// binary and unary shapes).
pub fn is_etf(g: &MsligGrammar) -> bool {
    g.productions.iter().all(etf_production)
}

/// Shared pre-terminal pool: one fresh nonterminal per terminal symbol that
/// gets lifted out of a right-hand side, plus its single production.
struct Preterminals {
    ordinal: BTreeMap<String, usize>,
    used: BTreeSet<String>,
}

impl Preterminals {
    fn new(g: &MsligGrammar) -> Self {
        Preterminals {
            ordinal: g
                .terminals
                .iter()
                .enumerate()
                .map(|(k, t)| (t.clone(), k))
                .collect(),
            used: BTreeSet::new(),
        }
    }

    fn name(&mut self, terminal: &str) -> String {
        self.used.insert(terminal.to_string());
        preterminal_name(self.ordinal[terminal], terminal)
    }

    fn productions(&self) -> Vec<MsligProduction> {
        self.used
            .iter()
            .map(|t| {
                MsligProduction::new(
                    preterminal_name(self.ordinal[t], t),
                    IndexMultiset::empty(),
                    vec![Item::terminal(t)],
                )
            })
            .collect()
    }
}

fn preterminal_name(k: usize, terminal: &str) -> String {
    let sanitized: String = terminal
        .chars()
        .take(12)
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    format!("{RESERVED_PREFIX}t{k}.{sanitized}")
}

/// Emit `lhs {e1} -> pop1, pop1 {e2} -> pop2, ...` for the sorted elements
/// of `pops`; returns the nonterminal the chain ends at (`lhs` if empty).
fn pop_chain(
    lhs: &str,
    pops: &IndexMultiset,
    i: usize,
    out: &mut Vec<MsligProduction>,
) -> String {
    let mut current = lhs.to_string();
    for (j, sym) in pops.expanded().iter().enumerate() {
        let next = format!("{RESERVED_PREFIX}p{i}.pop{}", j + 1);
        out.push(MsligProduction::new(
            current,
            IndexMultiset::from_symbols([*sym]),
            vec![Item::plain(next.clone())],
        ));
        current = next;
    }
    current
}

/// Pop chain whose final step lands on `target` directly (for productions
/// that are nothing but pops into a single nonterminal).
fn pop_chain_into(
    lhs: &str,
    pops: &IndexMultiset,
    target: &str,
    i: usize,
    out: &mut Vec<MsligProduction>,
) {
    let expanded = pops.expanded();
    let mut current = lhs.to_string();
    for (j, sym) in expanded.iter().enumerate() {
        let next = if j + 1 == expanded.len() {
            target.to_string()
        } else {
            format!("{RESERVED_PREFIX}p{i}.pop{}", j + 1)
        };
        out.push(MsligProduction::new(
            current,
            IndexMultiset::from_symbols([*sym]),
            vec![Item::plain(next.clone())],
        ));
        current = next;
    }
}

/// Emit `head -> x1 {f1}, x1 -> x2 {f2}, ..., x(k-1) -> target {fk}` for the
/// sorted elements of `pushes`.
fn push_chain(
    head: &str,
    pushes: &IndexMultiset,
    target: &str,
    i: usize,
    occ: usize,
    out: &mut Vec<MsligProduction>,
) {
    let expanded = pushes.expanded();
    let mut current = head.to_string();
    for (j, sym) in expanded.iter().enumerate() {
        let next = if j + 1 == expanded.len() {
            target.to_string()
        } else {
            format!("{RESERVED_PREFIX}p{i}.push{occ}.{}", j + 1)
        };
        out.push(MsligProduction::new(
            current,
            IndexMultiset::empty(),
            vec![Item::nonterminal(
                next.clone(),
                IndexMultiset::from_symbols([*sym]),
            )],
        ));
        current = next;
    }
}

fn rebuild(g: &MsligGrammar, productions: Vec<MsligProduction>) -> MsligGrammar {
    let mut nonterminals = g.nonterminals.clone();
    for p in &productions {
        nonterminals.insert(p.lhs.clone());
        for item in &p.rhs {
            if let Item::Nonterminal(n, _) = item {
                nonterminals.insert(n.clone());
            }
        }
    }
    MsligGrammar::new(
        nonterminals,
        g.terminals.clone(),
        g.indices.clone(),
        productions,
        g.start.clone(),
    )
}

/// Transform to RINF. Each offending production becomes a chain that pops
/// its left-hand elements one at a time, one index-free core production
/// (with terminals lifted to shared pre-terminals), and per-occurrence
/// chains that push each right-hand multiset one element at a time. The
/// core is skipped when it would be a bare unary hop.
pub fn to_rinf(g: &MsligGrammar) -> MsligGrammar {
    let mut out = Vec::new();
    let mut pre = Preterminals::new(g);
    for (i, p) in g.productions.iter().enumerate() {
        if rinf_production(p) {
            out.push(p.clone());
            continue;
        }
        if let [Item::Nonterminal(b, s1)] = p.rhs.as_slice() {
            // Lone nonterminal: fuse the chains instead of emitting a core.
            if s1.is_empty() {
                pop_chain_into(&p.lhs, &p.lhs_indices, b, i, &mut out);
            } else {
                let head = pop_chain(&p.lhs, &p.lhs_indices, i, &mut out);
                push_chain(&head, s1, b, i, 1, &mut out);
            }
            continue;
        }
        let head = pop_chain(&p.lhs, &p.lhs_indices, i, &mut out);
        let mut core_rhs = Vec::with_capacity(p.rhs.len());
        let mut chains = Vec::new();
        let mut occ = 0;
        for item in &p.rhs {
            match item {
                Item::Terminal(t) => core_rhs.push(Item::plain(pre.name(t))),
                Item::Nonterminal(b, s) => {
                    occ += 1;
                    if s.is_empty() {
                        core_rhs.push(Item::plain(b.clone()));
                    } else {
                        let base = format!("{RESERVED_PREFIX}p{i}.s{occ}");
                        core_rhs.push(Item::plain(base.clone()));
                        chains.push((base, s, b, occ));
                    }
                }
            }
        }
        out.push(MsligProduction::new(head, IndexMultiset::empty(), core_rhs));
        for (base, s, b, occ) in chains {
            push_chain(&base, s, b, i, occ, &mut out);
        }
    }
    out.extend(pre.productions());
    rebuild(g, out)
}

/// Transform to ETF. Terminals in offending productions are lifted to
/// shared pre-terminals; right-hand sides longer than two are
/// right-binarized through fresh spine nonterminals that carry and push
/// nothing, so the iterated binary distribution composes to the original
/// n-way free distribution. An indexed epsilon production becomes a unary
/// hop to a fresh nonterminal whose sole production is epsilon.
pub fn to_etf(g: &MsligGrammar) -> MsligGrammar {
    let mut out = Vec::new();
    let mut pre = Preterminals::new(g);
    for (i, p) in g.productions.iter().enumerate() {
        if etf_production(p) {
            out.push(p.clone());
            continue;
        }
        let items: Vec<Item> = p
            .rhs
            .iter()
            .map(|item| match item {
                Item::Terminal(t) => Item::plain(pre.name(t)),
                nt => nt.clone(),
            })
            .collect();
        match items.len() {
            0 => {
                let z = format!("{RESERVED_PREFIX}p{i}.eps");
                out.push(MsligProduction::new(
                    p.lhs.clone(),
                    p.lhs_indices.clone(),
                    vec![Item::plain(z.clone())],
                ));
                out.push(MsligProduction::new(z, IndexMultiset::empty(), vec![]));
            }
            1 | 2 => out.push(MsligProduction::new(
                p.lhs.clone(),
                p.lhs_indices.clone(),
                items,
            )),
            n => {
                let mut lhs = p.lhs.clone();
                let mut lhs_indices = p.lhs_indices.clone();
                for (k, item) in items.iter().enumerate().take(n - 2) {
                    let spine = format!("{RESERVED_PREFIX}p{i}.c{}", k + 1);
                    out.push(MsligProduction::new(
                        lhs,
                        lhs_indices,
                        vec![item.clone(), Item::plain(spine.clone())],
                    ));
                    lhs = spine;
                    lhs_indices = IndexMultiset::empty();
                }
                out.push(MsligProduction::new(
                    lhs,
                    lhs_indices,
                    vec![items[n - 2].clone(), items[n - 1].clone()],
                ));
            }
        }
    }
    out.extend(pre.productions());
    rebuild(g, out)
}
