//! The multiset-valued linear index grammar ({}-LIG) data model.
//!
//! A grammar is a 5-tuple (V_N, V_T, V_I, P, S). Every production rewrites a
//! nonterminal carrying an index multiset: `A s -> v0 B1 s1 v1 ... Bn sn vn`.
//! Applying it to an occurrence `A t` requires `s` to be contained in `t`;
//! the remainder `t - s` is distributed freely among the right-hand
//! nonterminals, and each `Bi` additionally receives `si`.

use std::collections::BTreeSet;
use std::fmt;

use crate::multiset::IndexMultiset;

/// One symbol of a production right-hand side or of a sentential form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Item {
    Terminal(String),
    /// A nonterminal together with its index multiset. In a production this
    /// is the multiset the production adds; in a sentential form it is the
    /// multiset the occurrence currently carries.
    Nonterminal(String, IndexMultiset),
}

impl Item {
    pub fn terminal(name: impl Into<String>) -> Self {
        Item::Terminal(name.into())
    }

    pub fn nonterminal(name: impl Into<String>, indices: IndexMultiset) -> Self {
        Item::Nonterminal(name.into(), indices)
    }

    pub fn plain(name: impl Into<String>) -> Self {
        Item::Nonterminal(name.into(), IndexMultiset::empty())
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, Item::Terminal(_))
    }
}

impl fmt::Debug for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Terminal(t) => write!(f, "'{t}'"),
            Item::Nonterminal(n, m) if m.is_empty() => write!(f, "{n}"),
            Item::Nonterminal(n, m) => write!(f, "{n}{m:?}"),
        }
    }
}

/// A production `lhs lhs_indices -> rhs`.
#[derive(Clone, PartialEq, Eq)]
pub struct MsligProduction {
    pub lhs: String,
    /// The multiset removed from the rewritten occurrence.
    pub lhs_indices: IndexMultiset,
    pub rhs: Vec<Item>,
}

impl MsligProduction {
    pub fn new(lhs: impl Into<String>, lhs_indices: IndexMultiset, rhs: Vec<Item>) -> Self {
        MsligProduction {
            lhs: lhs.into(),
            lhs_indices,
            rhs,
        }
    }

    /// Number of nonterminal occurrences on the right-hand side.
    pub fn rhs_nonterminal_count(&self) -> usize {
        self.rhs.iter().filter(|i| !i.is_terminal()).count()
    }

    /// Number of terminal occurrences on the right-hand side.
    pub fn rhs_terminal_count(&self) -> usize {
        self.rhs.iter().filter(|i| i.is_terminal()).count()
    }

    /// Total indices this production adds across all right-hand occurrences.
    pub fn indices_added(&self) -> u32 {
        self.rhs
            .iter()
            .map(|i| match i {
                Item::Terminal(_) => 0,
                Item::Nonterminal(_, m) => m.total(),
            })
            .sum()
    }

    pub fn is_epsilon(&self) -> bool {
        self.rhs.is_empty()
    }
}

impl fmt::Debug for MsligProduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lhs_indices.is_empty() {
            write!(f, "{} ->", self.lhs)?;
        } else {
            write!(f, "{}{:?} ->", self.lhs, self.lhs_indices)?;
        }
        for item in &self.rhs {
            write!(f, " {item:?}")?;
        }
        Ok(())
    }
}

/// A {}-LIG.
#[derive(Clone, PartialEq, Eq)]
pub struct MsligGrammar {
    pub nonterminals: BTreeSet<String>,
    pub terminals: BTreeSet<String>,
    pub indices: BTreeSet<String>,
    pub productions: Vec<MsligProduction>,
    pub start: String,
}

impl MsligGrammar {
    pub fn new(
        nonterminals: impl IntoIterator<Item = impl Into<String>>,
        terminals: impl IntoIterator<Item = impl Into<String>>,
        indices: impl IntoIterator<Item = impl Into<String>>,
        productions: Vec<MsligProduction>,
        start: impl Into<String>,
    ) -> Self {
        MsligGrammar {
            nonterminals: nonterminals.into_iter().map(Into::into).collect(),
            terminals: terminals.into_iter().map(Into::into).collect(),
            indices: indices.into_iter().map(Into::into).collect(),
            productions,
            start: start.into(),
        }
    }

    /// Productions with the given left-hand nonterminal, with their indices
    /// into `self.productions`.
    pub fn productions_for<'a>(
        &'a self,
        lhs: &'a str,
    ) -> impl Iterator<Item = (usize, &'a MsligProduction)> + 'a {
        self.productions
            .iter()
            .enumerate()
            .filter(move |(_, p)| p.lhs == lhs)
    }
}

impl fmt::Debug for MsligGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "start: {}", self.start)?;
        for p in &self.productions {
            writeln!(f, "  {p:?}")?;
        }
        Ok(())
    }
}

/// A sentential form: a sequence of terminals and index-carrying
/// nonterminal occurrences.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SententialForm {
    pub items: Vec<Item>,
}

impl SententialForm {
    pub fn new(items: Vec<Item>) -> Self {
        SententialForm { items }
    }

    /// The start form `[S {}]` of a grammar.
    pub fn start_of(g: &MsligGrammar) -> Self {
        SententialForm {
            items: vec![Item::plain(g.start.clone())],
        }
    }

    /// Position of the leftmost nonterminal item, if any.
    pub fn leftmost_nonterminal(&self) -> Option<usize> {
        self.items.iter().position(|i| !i.is_terminal())
    }

    pub fn is_terminal(&self) -> bool {
        self.items.iter().all(Item::is_terminal)
    }

    pub fn terminal_count(&self) -> usize {
        self.items.iter().filter(|i| i.is_terminal()).count()
    }

    /// Sum of all index counts across nonterminal occurrences.
    pub fn total_indices(&self) -> u32 {
        self.items
            .iter()
            .map(|i| match i {
                Item::Terminal(_) => 0,
                Item::Nonterminal(_, m) => m.total(),
            })
            .sum()
    }

    /// The terminal string, if the form is fully terminal.
    pub fn terminals(&self) -> Option<Vec<String>> {
        self.items
            .iter()
            .map(|i| match i {
                Item::Terminal(t) => Some(t.clone()),
                Item::Nonterminal(..) => None,
            })
            .collect()
    }
}

impl fmt::Debug for SententialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.items.is_empty() {
            return write!(f, "ε");
        }
        let mut first = true;
        for item in &self.items {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            write!(f, "{item:?}")?;
        }
        Ok(())
    }
}

/// A validation problem, with a human-readable location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub(crate) fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            location: location.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{}: {}", v.location, v.message)?;
        }
        Ok(())
    }
}

/// Prefix reserved for nonterminals introduced by the normal form and
/// conversion constructions. Rejected in user-supplied grammars.
pub const RESERVED_PREFIX: &str = "@";

/// Structural validation: declaredness of every symbol, alphabet
/// disjointness, start symbol membership.
pub fn validate_mslig(g: &MsligGrammar) -> ValidationReport {
    let mut report = ValidationReport::default();
    if !g.nonterminals.contains(&g.start) {
        report.push("start", format!("start symbol {} is not a declared nonterminal", g.start));
    }
    check_disjoint(&mut report, &g.nonterminals, &g.terminals, "nonterminal", "terminal");
    check_disjoint(&mut report, &g.nonterminals, &g.indices, "nonterminal", "index");
    check_disjoint(&mut report, &g.terminals, &g.indices, "terminal", "index");
    for (i, p) in g.productions.iter().enumerate() {
        let loc = format!("production {}", i + 1);
        if !g.nonterminals.contains(&p.lhs) {
            report.push(&loc, format!("undeclared nonterminal {} on left-hand side", p.lhs));
        }
        check_indices(&mut report, g, &loc, &p.lhs_indices);
        for item in &p.rhs {
            match item {
                Item::Terminal(t) => {
                    if !g.terminals.contains(t) {
                        report.push(&loc, format!("undeclared terminal {t}"));
                    }
                }
                Item::Nonterminal(n, m) => {
                    if !g.nonterminals.contains(n) {
                        report.push(&loc, format!("undeclared nonterminal {n}"));
                    }
                    check_indices(&mut report, g, &loc, m);
                }
            }
        }
    }
    report
}

/// Validation for user-supplied grammars: structural checks plus rejection
/// of the reserved fresh-name prefix.
pub fn validate_mslig_user(g: &MsligGrammar) -> ValidationReport {
    let mut report = validate_mslig(g);
    for n in &g.nonterminals {
        if n.starts_with(RESERVED_PREFIX) {
            report.push(
                "nonterminals",
                format!("name {n} uses the reserved prefix {RESERVED_PREFIX}"),
            );
        }
    }
    report
}

fn check_indices(
    report: &mut ValidationReport,
    g: &MsligGrammar,
    loc: &str,
    m: &IndexMultiset,
) {
    for (sym, _) in m.entries() {
        if !g.indices.contains(sym) {
            report.push(loc, format!("undeclared index symbol {sym}"));
        }
    }
}

fn check_disjoint(
    report: &mut ValidationReport,
    a: &BTreeSet<String>,
    b: &BTreeSet<String>,
    what_a: &str,
    what_b: &str,
) {
    for name in a.intersection(b) {
        report.push(
            "alphabets",
            format!("{name} is declared both as a {what_a} and as a {what_b}"),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn count5_validates_cleanly() {
        let g = samples::count5();
        assert!(validate_mslig(&g).is_ok());
        assert!(validate_mslig_user(&g).is_ok());
        assert_eq!(g.productions.len(), 12);
    }

    #[test]
    fn undeclared_index_is_one_violation() {
        let mut g = samples::count5();
        g.productions[0].rhs = vec![Item::nonterminal(
            "S",
            IndexMultiset::from_symbols(["sx"]),
        )];
        let report = validate_mslig(&g);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].message.contains("sx"));
        assert_eq!(report.violations[0].location, "production 1");
    }

    #[test]
    fn undeclared_start_is_one_violation() {
        let mut g = samples::count5();
        g.start = "Z".into();
        let report = validate_mslig(&g);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].message.contains('Z'));
    }

    #[test]
    fn alphabet_overlap_is_reported() {
        let mut g = samples::count5();
        g.terminals.insert("S".into());
        let report = validate_mslig(&g);
        assert!(!report.is_ok());
        assert!(report.violations[0].message.contains('S'));
    }

    #[test]
    fn reserved_prefix_rejected_only_for_user_grammars() {
        let mut g = samples::count5();
        g.nonterminals.insert("@p1.c1".into());
        assert!(validate_mslig(&g).is_ok());
        assert!(!validate_mslig_user(&g).is_ok());
    }

    #[test]
    fn leftmost_nonterminal_skips_terminals() {
        let form = SententialForm::new(vec![
            Item::terminal("a"),
            Item::plain("A"),
            Item::plain("B"),
        ]);
        assert_eq!(form.leftmost_nonterminal(), Some(1));
        assert_eq!(form.terminal_count(), 1);
        assert!(!form.is_terminal());
    }
}
