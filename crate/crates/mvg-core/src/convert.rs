//! The two weak-equivalence constructions between UVG-DLs and {}-LIGs.
//!
//! Forward: each dominance link becomes an index symbol. A production's
//! left-hand multiset collects the links that target it (the obligations it
//! discharges), and each right-hand nonterminal occurrence pushes the links
//! sourced at that occurrence (the obligations it creates). Free index
//! distribution then mirrors dominance: an obligation may be discharged
//! anywhere below the occurrence that created it.
//!
//! Backward, defined on RINF input only: type-1 productions become singleton
//! vectors, and every (push, pop) pair over the same index symbol becomes a
//! two-production vector whose dominance link ties the pushed occurrence to
//! the popping production. Compose with `to_rinf` for general grammars.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::mslig::{validate_mslig, Item, MsligGrammar, MsligProduction, ValidationReport};
use crate::multiset::IndexMultiset;
use crate::normal_forms::is_rinf;
use crate::uvgdl::{
    connectivity_lint, validate_uvgdl, ConnectivityReport, DominanceLink, UvgdlGrammar,
    UvgdlProduction, Vector, VectorSymbol,
};

/// The index symbol standing for one dominance link: vector ordinal, source
/// production ordinal, and target production ordinal, all 1-based. Parallel
/// links between the same production pair (from different right-hand
/// positions) are separated by the occurrence ordinal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LinkSymbol {
    pub vector: usize,
    pub source: usize,
    pub target: usize,
    pub occurrence: usize,
}

impl LinkSymbol {
    pub fn name(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for LinkSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l_{{{},{},{}}}", self.vector, self.source, self.target)?;
        if self.occurrence > 1 {
            write!(f, "#{}", self.occurrence)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ConvertError {
    #[error("grammar does not validate:\n{0}")]
    InvalidGrammar(ValidationReport),
    #[error("grammar is not in restricted index normal form")]
    NotRinf,
}

/// A converted {}-LIG, with per-production provenance and the connectivity
/// lint of the source grammar.
pub struct MsligConversion {
    pub grammar: MsligGrammar,
    /// Source of each output production, as `vector:label`.
    pub provenance: Vec<String>,
    /// For a disconnected vector the construction cannot tie the parts
    /// together, so partial use becomes derivable; a clean lint means the
    /// conversion is language-faithful.
    pub lint: ConnectivityReport,
}

/// Convert a UVG-DL into a {}-LIG over one index symbol per dominance link.
/// Nonterminals, terminals, and the start symbol carry over unchanged.
pub fn uvgdl_to_mslig(g: &UvgdlGrammar) -> Result<MsligConversion, ConvertError> {
    let report = validate_uvgdl(g);
    if !report.is_ok() {
        return Err(ConvertError::InvalidGrammar(report));
    }
    let mut indices: Vec<String> = Vec::new();
    let mut productions = Vec::new();
    let mut provenance = Vec::new();
    for (vi, v) in g.vectors.iter().enumerate() {
        let ordinal = |label: &str| {
            v.productions
                .iter()
                .position(|p| p.label == label)
                .expect("links are validated")
                + 1
        };
        let mut parallel: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut symbol_of: BTreeMap<DominanceLink, String> = BTreeMap::new();
        for link in &v.links {
            let (source, target) = (ordinal(&link.source_label), ordinal(&link.target_label));
            let occurrence = parallel
                .entry((source, target))
                .and_modify(|o| *o += 1)
                .or_insert(1);
            let symbol = LinkSymbol {
                vector: vi + 1,
                source,
                target,
                occurrence: *occurrence,
            };
            symbol_of.insert(link.clone(), symbol.name());
        }
        indices.extend(symbol_of.values().cloned());
        for p in &v.productions {
            let lhs_indices = IndexMultiset::from_symbols(
                v.links
                    .iter()
                    .filter(|l| l.target_label == p.label)
                    .map(|l| symbol_of[l].clone()),
            );
            let rhs = p
                .rhs
                .iter()
                .enumerate()
                .map(|(pos0, sym)| match sym {
                    VectorSymbol::Terminal(t) => Item::terminal(t.clone()),
                    VectorSymbol::Nonterminal(n) => Item::nonterminal(
                        n.clone(),
                        IndexMultiset::from_symbols(
                            v.links
                                .iter()
                                .filter(|l| {
                                    l.source_label == p.label && l.source_pos == pos0 + 1
                                })
                                .map(|l| symbol_of[l].clone()),
                        ),
                    ),
                })
                .collect();
            productions.push(MsligProduction::new(p.lhs.clone(), lhs_indices, rhs));
            provenance.push(format!("{}:{}", v.name, p.label));
        }
    }
    let grammar = MsligGrammar::new(
        g.nonterminals.iter().cloned(),
        g.terminals.iter().cloned(),
        indices,
        productions,
        g.start.clone(),
    );
    debug_assert!(validate_mslig(&grammar).is_ok());
    Ok(MsligConversion {
        grammar,
        provenance,
        lint: connectivity_lint(g),
    })
}

/// A converted UVG-DL, with the 1-based source production ordinals of each
/// output vector.
pub struct UvgdlConversion {
    pub grammar: UvgdlGrammar,
    pub provenance: Vec<Vec<usize>>,
}

/// Convert a {}-LIG in restricted index normal form into a UVG-DL: singleton
/// vectors for type-1 productions, and one linked two-production vector per
/// (type-2, type-3) pair over the same index symbol. A push with no matching
/// pop (or vice versa) can never finish a derivation, so it contributes no
/// vector.
pub fn mslig_to_uvgdl(g: &MsligGrammar) -> Result<UvgdlConversion, ConvertError> {
    let report = validate_mslig(g);
    if !report.is_ok() {
        return Err(ConvertError::InvalidGrammar(report));
    }
    if !is_rinf(g) {
        return Err(ConvertError::NotRinf);
    }
    let mut vectors = Vec::new();
    let mut provenance = Vec::new();
    for (i, p) in g.productions.iter().enumerate() {
        match classify(p) {
            Rinf::Type1 => {
                let rhs = p
                    .rhs
                    .iter()
                    .map(|item| match item {
                        Item::Terminal(t) => VectorSymbol::terminal(t.clone()),
                        Item::Nonterminal(n, _) => VectorSymbol::nonterminal(n.clone()),
                    })
                    .collect();
                vectors.push(Vector::new(
                    format!("p{}", i + 1),
                    vec![UvgdlProduction::new("p1", p.lhs.clone(), rhs)],
                    [],
                ));
                provenance.push(vec![i + 1]);
            }
            Rinf::Type2(f, b) => {
                for (k, q) in g.productions.iter().enumerate() {
                    let Rinf::Type3(f2, d) = classify(q) else {
                        continue;
                    };
                    if f2 != f {
                        continue;
                    }
                    vectors.push(Vector::new(
                        format!("p{}.p{}", i + 1, k + 1),
                        vec![
                            UvgdlProduction::new(
                                "p1",
                                p.lhs.clone(),
                                vec![VectorSymbol::nonterminal(b)],
                            ),
                            UvgdlProduction::new(
                                "p2",
                                q.lhs.clone(),
                                vec![VectorSymbol::nonterminal(d)],
                            ),
                        ],
                        [DominanceLink::new("p1", 1, "p2")],
                    ));
                    provenance.push(vec![i + 1, k + 1]);
                }
            }
            Rinf::Type3(..) => {}
        }
    }
    let grammar = UvgdlGrammar::new(
        g.nonterminals.iter().cloned(),
        g.terminals.iter().cloned(),
        vectors,
        g.start.clone(),
    );
    debug_assert!(validate_uvgdl(&grammar).is_ok());
    Ok(UvgdlConversion {
        grammar,
        provenance,
    })
}

enum Rinf<'a> {
    Type1,
    /// Pushes the index onto the child: `A -> B f`.
    Type2(&'a str, &'a str),
    /// Pops the index from the occurrence: `A f -> B`.
    Type3(&'a str, &'a str),
}

fn classify(p: &MsligProduction) -> Rinf<'_> {
    let plain_rhs = p.rhs.iter().all(|item| match item {
        Item::Terminal(_) => true,
        Item::Nonterminal(_, m) => m.is_empty(),
    });
    if p.lhs_indices.is_empty() && plain_rhs {
        return Rinf::Type1;
    }
    let [Item::Nonterminal(b, s)] = p.rhs.as_slice() else {
        unreachable!("caller checked is_rinf");
    };
    if p.lhs_indices.is_empty() {
        let (f, _) = s.entries().next().expect("type-2 pushes one index");
        Rinf::Type2(f, b)
    } else {
        let (f, _) = p.lhs_indices.entries().next().expect("type-3 pops one index");
        Rinf::Type3(f, b)
    }
}
