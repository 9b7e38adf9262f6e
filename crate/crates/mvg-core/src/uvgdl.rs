//! Unordered vector grammars with dominance links (UVG-DL).
//!
//! A UVG-DL groups context-free productions into vectors. A derivation may
//! interleave productions freely, but the multiset of productions used must
//! be a sum of whole vectors, and within each vector instance the dominance
//! links must hold: the designated right-hand occurrence of the source
//! production must dominate the node contributed by the target production.

mod semantics;
mod tree;

pub use semantics::{
    check_dominance, check_dominance_with, check_vector_cover, enumerate_uvgdl, infer_assignment,
    infer_assignment_with, pending_obligations, yield_of, CoverVerdict, CoverViolation,
    DominancePolicy, DominanceVerdict, LinkViolation, PendingObligations, UvgdlBounds,
    UvgdlEnumerateError, UvgdlEnumeration, UvgdlSearchStats, VectorAssignment,
};
pub use tree::{DerivationTree, NodeId, TreeError, TreeNode, TreeSpec};

use std::collections::BTreeSet;
use std::fmt;

use crate::mslig::{ValidationReport, RESERVED_PREFIX};

/// A right-hand-side symbol of a vector production (no index multisets).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VectorSymbol {
    Terminal(String),
    Nonterminal(String),
}

impl VectorSymbol {
    pub fn terminal(name: impl Into<String>) -> Self {
        VectorSymbol::Terminal(name.into())
    }

    pub fn nonterminal(name: impl Into<String>) -> Self {
        VectorSymbol::Nonterminal(name.into())
    }

    pub fn is_terminal(&self) -> bool {
        matches!(self, VectorSymbol::Terminal(_))
    }
}

impl fmt::Debug for VectorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VectorSymbol::Terminal(t) => write!(f, "'{t}'"),
            VectorSymbol::Nonterminal(n) => write!(f, "{n}"),
        }
    }
}

/// A labelled context-free production inside a vector.
#[derive(Clone, PartialEq, Eq)]
pub struct UvgdlProduction {
    pub label: String,
    pub lhs: String,
    pub rhs: Vec<VectorSymbol>,
}

impl UvgdlProduction {
    pub fn new(
        label: impl Into<String>,
        lhs: impl Into<String>,
        rhs: Vec<VectorSymbol>,
    ) -> Self {
        UvgdlProduction {
            label: label.into(),
            lhs: lhs.into(),
            rhs,
        }
    }

    pub fn rhs_terminal_count(&self) -> usize {
        self.rhs.iter().filter(|s| s.is_terminal()).count()
    }
}

impl fmt::Debug for UvgdlProduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} ->", self.label, self.lhs)?;
        for s in &self.rhs {
            write!(f, " {s:?}")?;
        }
        Ok(())
    }
}

/// A dominance link within one vector. The source addresses a right-hand
/// occurrence of `source_label` by its 1-based position over all right-hand
/// symbols; that position must hold a nonterminal. The target is the node
/// contributed by `target_label` of the same vector instance.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DominanceLink {
    pub source_label: String,
    pub source_pos: usize,
    pub target_label: String,
}

impl DominanceLink {
    pub fn new(
        source_label: impl Into<String>,
        source_pos: usize,
        target_label: impl Into<String>,
    ) -> Self {
        DominanceLink {
            source_label: source_label.into(),
            source_pos,
            target_label: target_label.into(),
        }
    }
}

impl fmt::Display for DominanceLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{} > {}", self.source_label, self.source_pos, self.target_label)
    }
}

/// A vector: a set of productions used as a whole, plus dominance links.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vector {
    pub name: String,
    pub productions: Vec<UvgdlProduction>,
    pub links: BTreeSet<DominanceLink>,
}

impl Vector {
    pub fn new(
        name: impl Into<String>,
        productions: Vec<UvgdlProduction>,
        links: impl IntoIterator<Item = DominanceLink>,
    ) -> Self {
        Vector {
            name: name.into(),
            productions,
            links: links.into_iter().collect(),
        }
    }

    pub fn production(&self, label: &str) -> Option<&UvgdlProduction> {
        self.productions.iter().find(|p| p.label == label)
    }
}

/// A UVG-DL grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UvgdlGrammar {
    pub nonterminals: BTreeSet<String>,
    pub terminals: BTreeSet<String>,
    pub vectors: Vec<Vector>,
    pub start: String,
}

impl UvgdlGrammar {
    pub fn new(
        nonterminals: impl IntoIterator<Item = impl Into<String>>,
        terminals: impl IntoIterator<Item = impl Into<String>>,
        vectors: Vec<Vector>,
        start: impl Into<String>,
    ) -> Self {
        UvgdlGrammar {
            nonterminals: nonterminals.into_iter().map(Into::into).collect(),
            terminals: terminals.into_iter().map(Into::into).collect(),
            vectors,
            start: start.into(),
        }
    }

    pub fn vector(&self, name: &str) -> Option<&Vector> {
        self.vectors.iter().find(|v| v.name == name)
    }

    /// Total number of dominance links across all vectors.
    pub fn link_count(&self) -> usize {
        self.vectors.iter().map(|v| v.links.len()).sum()
    }
}

/// True iff every vector contains at least one terminal symbol.
pub fn is_lexicalized(g: &UvgdlGrammar) -> bool {
    g.vectors
        .iter()
        .all(|v| v.productions.iter().any(|p| p.rhs_terminal_count() > 0))
}

/// Structural validation: declaredness, disjointness, unique labels, and
/// well-formed links (existing labels, position in range, nonterminal at the
/// source position).
pub fn validate_uvgdl(g: &UvgdlGrammar) -> ValidationReport {
    let mut report = ValidationReport::default();
    if !g.nonterminals.contains(&g.start) {
        report.push("start", format!("start symbol {} is not a declared nonterminal", g.start));
    }
    for name in g.nonterminals.intersection(&g.terminals) {
        report.push(
            "alphabets",
            format!("{name} is declared both as a nonterminal and as a terminal"),
        );
    }
    let mut seen_vectors = BTreeSet::new();
    for v in &g.vectors {
        let vloc = format!("vector {}", v.name);
        if !seen_vectors.insert(&v.name) {
            report.push(&vloc, "duplicate vector name");
        }
        let mut labels = BTreeSet::new();
        for p in &v.productions {
            let loc = format!("{vloc}, production {}", p.label);
            if !labels.insert(&p.label) {
                report.push(&loc, "duplicate production label");
            }
            if !g.nonterminals.contains(&p.lhs) {
                report.push(&loc, format!("undeclared nonterminal {} on left-hand side", p.lhs));
            }
            for s in &p.rhs {
                match s {
                    VectorSymbol::Terminal(t) => {
                        if !g.terminals.contains(t) {
                            report.push(&loc, format!("undeclared terminal {t}"));
                        }
                    }
                    VectorSymbol::Nonterminal(n) => {
                        if !g.nonterminals.contains(n) {
                            report.push(&loc, format!("undeclared nonterminal {n}"));
                        }
                    }
                }
            }
        }
        for link in &v.links {
            let loc = format!("{vloc}, link {link}");
            match v.production(&link.source_label) {
                None => report.push(&loc, format!("unknown source label {}", link.source_label)),
                Some(p) => {
                    if link.source_pos == 0 || link.source_pos > p.rhs.len() {
                        report.push(
                            &loc,
                            format!(
                                "source position {} out of range (right-hand side has {} symbols)",
                                link.source_pos,
                                p.rhs.len()
                            ),
                        );
                    } else if p.rhs[link.source_pos - 1].is_terminal() {
                        report.push(
                            &loc,
                            format!("source position {} addresses a terminal", link.source_pos),
                        );
                    }
                }
            }
            if v.production(&link.target_label).is_none() {
                report.push(&loc, format!("unknown target label {}", link.target_label));
            }
        }
    }
    report
}

/// Validation for user-supplied grammars: structural checks plus rejection
/// of the reserved fresh-name prefix.
pub fn validate_uvgdl_user(g: &UvgdlGrammar) -> ValidationReport {
    let mut report = validate_uvgdl(g);
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

/// Per-vector connectivity of the link graph. A vector with two or more
/// productions whose links do not connect them is legal, but the conversion
/// to a {}-LIG cannot tie its parts together, so the lint surfaces it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConnectivityReport {
    /// Names of vectors with at least two productions whose link graph is
    /// disconnected.
    pub disconnected: Vec<String>,
}

impl ConnectivityReport {
    pub fn is_clean(&self) -> bool {
        self.disconnected.is_empty()
    }
}

/// Check each vector's productions-and-links graph for connectivity.
pub fn connectivity_lint(g: &UvgdlGrammar) -> ConnectivityReport {
    let mut report = ConnectivityReport::default();
    for v in &g.vectors {
        let n = v.productions.len();
        if n < 2 {
            continue;
        }
        let index_of = |label: &str| v.productions.iter().position(|p| p.label == label);
        let mut component: Vec<usize> = (0..n).collect();
        fn find(component: &mut [usize], mut i: usize) -> usize {
            while component[i] != i {
                component[i] = component[component[i]];
                i = component[i];
            }
            i
        }
        for link in &v.links {
            if let (Some(a), Some(b)) = (index_of(&link.source_label), index_of(&link.target_label))
            {
                let (ra, rb) = (find(&mut component, a), find(&mut component, b));
                component[ra] = rb;
            }
        }
        let root = find(&mut component, 0);
        if (1..n).any(|i| find(&mut component, i) != root) {
            report.disconnected.push(v.name.clone());
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    #[test]
    fn scrambling_grammar_validates() {
        let g = samples::scrambling_g2();
        assert!(validate_uvgdl(&g).is_ok());
        assert_eq!(g.vectors.len(), 7);
        assert_eq!(g.link_count(), 5);
    }

    #[test]
    fn scrambling_grammar_is_lexicalized() {
        assert!(is_lexicalized(&samples::scrambling_g2()));
    }

    #[test]
    fn unlexicalized_vector_detected() {
        let mut g = samples::scrambling_g2();
        g.vectors.push(Vector::new(
            "v8",
            vec![UvgdlProduction::new("q1", "VP", vec![VectorSymbol::nonterminal("VP")])],
            [],
        ));
        assert!(!is_lexicalized(&g));
    }

    #[test]
    fn link_to_unknown_label_is_violation() {
        let mut g = samples::scrambling_g2();
        g.vectors[2]
            .links
            .insert(DominanceLink::new("q1", 2, "q9"));
        let report = validate_uvgdl(&g);
        assert_eq!(report.violations.len(), 1);
        assert!(report.violations[0].message.contains("q9"));
    }

    #[test]
    fn link_source_position_must_be_nonterminal() {
        let mut g = samples::scrambling_g2();
        g.vectors[0]
            .links
            .insert(DominanceLink::new("q1", 1, "q1"));
        let report = validate_uvgdl(&g);
        assert!(report
            .violations
            .iter()
            .any(|v| v.message.contains("terminal")));
    }

    #[test]
    fn link_source_position_out_of_range() {
        let mut g = samples::scrambling_g2();
        g.vectors[0]
            .links
            .insert(DominanceLink::new("q1", 3, "q1"));
        let report = validate_uvgdl(&g);
        assert!(report.violations.iter().any(|v| v.message.contains("out of range")));
    }

    #[test]
    fn connectivity_lint_flags_unlinked_pair() {
        let mut g = samples::scrambling_g2();
        g.vectors.push(Vector::new(
            "v8",
            vec![
                UvgdlProduction::new("q1", "VP", vec![VectorSymbol::terminal("verspricht")]),
                UvgdlProduction::new("q2", "VP", vec![VectorSymbol::terminal("verspricht")]),
            ],
            [],
        ));
        let report = connectivity_lint(&g);
        assert_eq!(report.disconnected, vec!["v8".to_string()]);
        assert!(connectivity_lint(&samples::scrambling_g2()).is_clean());
    }
}
