//! Ready-made example grammars used in documentation, tests, and benches.
//!
//! The same grammars ship as files under `grammars/` at the repository root;
//! the file corpus and these constructors are asserted equal in the CLI
//! crate's tests.

use crate::mslig::{Item, MsligGrammar, MsligProduction};
use crate::multiset::IndexMultiset;
use crate::uvgdl::{DominanceLink, UvgdlGrammar, UvgdlProduction, Vector, VectorSymbol};

/// The COUNT-5 grammar for `{ a^n b^n c^n d^n e^n : n >= 0 }`.
///
/// The start production pumps one index of each of the five kinds; the
/// distribution semantics then forces each letter's nonterminal to receive
/// exactly the indices it can discharge.
pub fn count5() -> MsligGrammar {
    let ix = |s: &str| IndexMultiset::from_symbols([s]);
    let mut productions = vec![
        MsligProduction::new(
            "S",
            IndexMultiset::empty(),
            vec![Item::nonterminal(
                "S",
                IndexMultiset::from_symbols(["s_a", "s_b", "s_c", "s_d", "s_e"]),
            )],
        ),
        MsligProduction::new(
            "S",
            IndexMultiset::empty(),
            vec![
                Item::plain("A"),
                Item::plain("B"),
                Item::plain("C"),
                Item::plain("D"),
                Item::plain("E"),
            ],
        ),
    ];
    for (nt, idx, t) in [
        ("A", "s_a", "a"),
        ("B", "s_b", "b"),
        ("C", "s_c", "c"),
        ("D", "s_d", "d"),
        ("E", "s_e", "e"),
    ] {
        productions.push(MsligProduction::new(
            nt,
            ix(idx),
            vec![Item::plain(nt), Item::terminal(t)],
        ));
        productions.push(MsligProduction::new(nt, IndexMultiset::empty(), vec![]));
    }
    MsligGrammar::new(
        ["S", "A", "B", "C", "D", "E"],
        ["a", "b", "c", "d", "e"],
        ["s_a", "s_b", "s_c", "s_d", "s_e"],
        productions,
        "S",
    )
}

/// Direct membership predicate for COUNT-5.
pub fn is_count5(tokens: &[String]) -> bool {
    if !tokens.len().is_multiple_of(5) {
        return false;
    }
    let n = tokens.len() / 5;
    for (block, letter) in ["a", "b", "c", "d", "e"].iter().enumerate() {
        if !tokens[block * n..(block + 1) * n].iter().all(|t| t == letter) {
            return false;
        }
    }
    true
}

/// A UVG-DL for German scrambling: a matrix verb with nominative and dative
/// arguments, a control verb, and an embedded transitive infinitive.
/// Yields clauses like
/// `daß der Meister niemandem den Kühlschrank zu reparieren zu versuchen verspricht`
/// together with their licensed scramblings.
pub fn scrambling_g2() -> UvgdlGrammar {
    let nt = VectorSymbol::nonterminal;
    let t = VectorSymbol::terminal;
    let vectors = vec![
        Vector::new(
            "v1",
            vec![UvgdlProduction::new("q1", "S'", vec![t("daß"), nt("VP")])],
            [],
        ),
        Vector::new(
            "v2",
            vec![
                UvgdlProduction::new("q1", "VP", vec![nt("NP_nom"), nt("VP")]),
                UvgdlProduction::new("q2", "VP", vec![nt("NP_dat"), nt("VP")]),
                UvgdlProduction::new("q3", "VP", vec![nt("VP"), nt("VP")]),
                UvgdlProduction::new("q4", "VP", vec![t("verspricht")]),
            ],
            [
                DominanceLink::new("q1", 2, "q4"),
                DominanceLink::new("q2", 2, "q4"),
                DominanceLink::new("q3", 2, "q4"),
            ],
        ),
        Vector::new(
            "v3",
            vec![
                UvgdlProduction::new("q1", "VP", vec![nt("VP"), nt("VP")]),
                UvgdlProduction::new("q2", "VP", vec![t("zu versuchen")]),
            ],
            [DominanceLink::new("q1", 2, "q2")],
        ),
        Vector::new(
            "v4",
            vec![
                UvgdlProduction::new("q1", "VP", vec![nt("NP_acc"), nt("VP")]),
                UvgdlProduction::new("q2", "VP", vec![t("zu reparieren")]),
            ],
            [DominanceLink::new("q1", 2, "q2")],
        ),
        Vector::new(
            "v5",
            vec![UvgdlProduction::new("q1", "NP_nom", vec![t("der Meister")])],
            [],
        ),
        Vector::new(
            "v6",
            vec![UvgdlProduction::new("q1", "NP_dat", vec![t("niemandem")])],
            [],
        ),
        Vector::new(
            "v7",
            vec![UvgdlProduction::new("q1", "NP_acc", vec![t("den Kühlschrank")])],
            [],
        ),
    ];
    UvgdlGrammar::new(
        ["S'", "VP", "NP_nom", "NP_dat", "NP_acc"],
        [
            "daß",
            "verspricht",
            "zu versuchen",
            "zu reparieren",
            "der Meister",
            "niemandem",
            "den Kühlschrank",
        ],
        vectors,
        "S'",
    )
}

/// `{ a^n b^n : n >= 0 }` with a single counting index.
pub fn anbn() -> MsligGrammar {
    MsligGrammar::new(
        ["S", "T"],
        ["a", "b"],
        ["f"],
        vec![
            MsligProduction::new(
                "S",
                IndexMultiset::empty(),
                vec![Item::nonterminal("S", IndexMultiset::from_symbols(["f"]))],
            ),
            MsligProduction::new("S", IndexMultiset::empty(), vec![Item::plain("T")]),
            MsligProduction::new(
                "T",
                IndexMultiset::from_symbols(["f"]),
                vec![Item::terminal("a"), Item::plain("T"), Item::terminal("b")],
            ),
            MsligProduction::new("T", IndexMultiset::empty(), vec![]),
        ],
        "S",
    )
}

/// `{ a^n : n >= 0 }` by way of epsilon productions and unary index moves.
pub fn eps_unary() -> MsligGrammar {
    MsligGrammar::new(
        ["S", "T", "U"],
        ["a"],
        ["f"],
        vec![
            MsligProduction::new(
                "S",
                IndexMultiset::empty(),
                vec![Item::nonterminal("S", IndexMultiset::from_symbols(["f"]))],
            ),
            MsligProduction::new("S", IndexMultiset::empty(), vec![Item::plain("T")]),
            MsligProduction::new(
                "T",
                IndexMultiset::from_symbols(["f"]),
                vec![Item::plain("U")],
            ),
            MsligProduction::new(
                "U",
                IndexMultiset::empty(),
                vec![Item::terminal("a"), Item::plain("T")],
            ),
            MsligProduction::new("T", IndexMultiset::empty(), vec![]),
        ],
        "S",
    )
}

/// A plain context-free `{ a^n b^n }` without any indices.
pub fn pure_cfg() -> MsligGrammar {
    MsligGrammar::new(
        ["S"],
        ["a", "b"],
        Vec::<String>::new(),
        vec![
            MsligProduction::new(
                "S",
                IndexMultiset::empty(),
                vec![Item::terminal("a"), Item::plain("S"), Item::terminal("b")],
            ),
            MsligProduction::new("S", IndexMultiset::empty(), vec![]),
        ],
        "S",
    )
}

/// `{ a^n b^m }` where the counts travel through two different index symbols
/// and the free distribution must route each symbol to the right branch.
pub fn mixed() -> MsligGrammar {
    MsligGrammar::new(
        ["S", "U", "A", "B"],
        ["a", "b"],
        ["f", "g"],
        vec![
            MsligProduction::new(
                "S",
                IndexMultiset::empty(),
                vec![Item::nonterminal("S", IndexMultiset::from_symbols(["f"]))],
            ),
            MsligProduction::new("S", IndexMultiset::empty(), vec![Item::plain("U")]),
            MsligProduction::new(
                "U",
                IndexMultiset::empty(),
                vec![Item::nonterminal("U", IndexMultiset::from_symbols(["g"]))],
            ),
            MsligProduction::new(
                "U",
                IndexMultiset::empty(),
                vec![Item::plain("A"), Item::plain("B")],
            ),
            MsligProduction::new(
                "A",
                IndexMultiset::from_symbols(["f"]),
                vec![Item::terminal("a"), Item::plain("A")],
            ),
            MsligProduction::new("A", IndexMultiset::empty(), vec![]),
            MsligProduction::new(
                "B",
                IndexMultiset::from_symbols(["g"]),
                vec![Item::terminal("b"), Item::plain("B")],
            ),
            MsligProduction::new("B", IndexMultiset::empty(), vec![]),
        ],
        "S",
    )
}

/// The {}-LIG sample corpus: COUNT-5 plus the small handcrafted grammars.
pub fn mslig_corpus() -> Vec<(&'static str, MsligGrammar)> {
    vec![
        ("count5", count5()),
        ("anbn", anbn()),
        ("eps_unary", eps_unary()),
        ("pure_cfg", pure_cfg()),
        ("mixed", mixed()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mslig::validate_mslig_user;
    use crate::uvgdl::validate_uvgdl_user;

    #[test]
    fn corpus_validates() {
        for (name, g) in mslig_corpus() {
            assert!(validate_mslig_user(&g).is_ok(), "{name} does not validate");
        }
        assert!(validate_uvgdl_user(&scrambling_g2()).is_ok());
    }

    #[test]
    fn count5_predicate() {
        let s = |s: &str| s.chars().map(|c| c.to_string()).collect::<Vec<_>>();
        assert!(is_count5(&s("")));
        assert!(is_count5(&s("abcde")));
        assert!(is_count5(&s("aabbccddee")));
        assert!(!is_count5(&s("abcd")));
        assert!(!is_count5(&s("abcdee")));
        assert!(!is_count5(&s("edcba")));
    }
}
