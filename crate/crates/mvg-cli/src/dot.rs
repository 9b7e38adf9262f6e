//! DOT export for derivation trees and recognizer charts.
//!
//! Tree edges are solid; each dominance-link obligation of a used vector
//! instance is drawn as a dashed edge from the constrained child slot to the
//! node that discharges it. Node names follow node-id order, so output is
//! deterministic.

use std::fmt::Write;

use mvg_core::recognizer::Recognition;
use mvg_core::uvgdl::{DerivationTree, TreeNode, UvgdlGrammar, VectorAssignment};

use crate::format::multiset_suffix;

fn quoted(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' | '\\' => {
                out.push('\\');
                out.push(c);
            }
            '\n' => out.push_str("\\n"),
            _ => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Render a checked derivation tree. Dashed edges require the assignment
/// used for checking, since obligations are per vector instance.
pub fn export_dot_tree(g: &UvgdlGrammar, tree: &DerivationTree, asg: &VectorAssignment) -> String {
    let mut out = String::from("digraph derivation {\n");
    for id in tree.ids() {
        match tree.node(id) {
            TreeNode::Internal {
                vector,
                label,
                symbol,
                ..
            } => {
                let instance = asg
                    .instance_of(id)
                    .map(|i| format!("#{i}"))
                    .unwrap_or_default();
                let _ = writeln!(
                    out,
                    "  n{} [label={}];",
                    id.0,
                    quoted(&format!("{symbol}\n{vector}:{label}{instance}"))
                );
            }
            TreeNode::Leaf { terminal, .. } => {
                let _ = writeln!(out, "  n{} [label={} shape=box];", id.0, quoted(terminal));
            }
        }
    }
    for id in tree.ids() {
        for child in tree.children(id) {
            let _ = writeln!(out, "  n{} -> n{};", id.0, child.0);
        }
    }
    for id in tree.ids() {
        let TreeNode::Internal { vector, label, .. } = tree.node(id) else {
            continue;
        };
        let Some(instance) = asg.instance_of(id) else {
            continue;
        };
        let Some(v) = g.vector(vector) else { continue };
        for link in &v.links {
            if link.source_label != *label {
                continue;
            }
            let source = tree.children(id)[link.source_pos - 1];
            let target = tree.ids().find(|&other| {
                asg.instance_of(other) == Some(instance)
                    && matches!(
                        tree.node(other),
                        TreeNode::Internal { vector: v2, label: l2, .. }
                            if v2 == vector && l2 == &link.target_label
                    )
            });
            if let Some(target) = target {
                let _ = writeln!(out, "  n{} -> n{} [style=dashed];", source.0, target.0);
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Render the full chart: one cluster per span `(i, j)`, one node per item.
pub fn export_dot_chart(rec: &Recognition) -> String {
    let n = rec.input_len();
    let mut out = String::from("digraph chart {\n");
    for i in 0..=n {
        for j in i..=n {
            let _ = writeln!(out, "  subgraph cluster_{i}_{j} {{");
            let _ = writeln!(out, "    label={};", quoted(&format!("{i},{j}")));
            for (k, item) in rec.cell(i, j).iter().enumerate() {
                let _ = writeln!(
                    out,
                    "    c{i}_{j}_{k} [label={} shape=plaintext];",
                    quoted(&format!(
                        "{}{}",
                        item.nonterminal,
                        multiset_suffix(&item.counts)
                    ))
                );
            }
            out.push_str("  }\n");
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use mvg_core::recognizer::{recognize, RecognizerConfig};
    use mvg_core::samples;
    use mvg_core::uvgdl::TreeSpec;

    #[test]
    fn single_node_tree() {
        let g = samples::scrambling_g2();
        let tree = DerivationTree::assemble_fragment(&g, &TreeSpec::instance("v5", "q1", 1))
            .unwrap();
        let asg = VectorAssignment::from_declared(&tree).unwrap();
        let dot = export_dot_tree(&g, &tree, &asg);
        // one production node, one implied terminal leaf, no dashed edges
        assert_eq!(dot.matches("[label=").count(), 2);
        assert_eq!(dot.matches("[style=dashed]").count(), 0);
    }

    #[test]
    fn chart_cluster_count() {
        let g = samples::anbn();
        let tokens = vec!["a".to_string(), "b".to_string()];
        let rec = recognize(&g, &tokens, &RecognizerConfig::default()).unwrap();
        let dot = export_dot_chart(&rec);
        assert_eq!(dot.matches("subgraph cluster_").count(), 6);
        assert!(rec.accepted);
    }
}
