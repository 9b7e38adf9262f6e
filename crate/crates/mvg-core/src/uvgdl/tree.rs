//! Derivation trees for UVG-DL grammars.
//!
//! A derivation tree is an ordinary context-free derivation tree over the
//! grammar's productions; which vector instance each node belongs to is
//! recorded (or inferred) separately. [`TreeSpec`] is the construction
//! syntax: it names a production per internal node and lists subtrees for
//! the nonterminal right-hand positions only. Terminal leaves are implied
//! by the production and inserted automatically.

use std::fmt;

use thiserror::Error;

use crate::uvgdl::{UvgdlGrammar, VectorSymbol};

/// Index of a node within its [`DerivationTree`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// One node of an assembled derivation tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeNode {
    /// An application of production `label` from vector `vector`; the node's
    /// symbol is the production's left-hand nonterminal. `declared_instance`
    /// is an optional user-supplied grouping of nodes into vector instances.
    Internal {
        vector: String,
        label: String,
        symbol: String,
        declared_instance: Option<u32>,
        children: Vec<NodeId>,
        parent: Option<NodeId>,
    },
    /// A terminal leaf contributed by its parent's production.
    Leaf {
        terminal: String,
        parent: Option<NodeId>,
    },
}

impl TreeNode {
    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    pub fn parent(&self) -> Option<NodeId> {
        match self {
            TreeNode::Internal { parent, .. } | TreeNode::Leaf { parent, .. } => *parent,
        }
    }
}

/// Construction syntax for derivation trees. Children correspond to the
/// nonterminal right-hand positions of the named production, in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeSpec {
    pub vector: String,
    pub label: String,
    /// Optional declared vector-instance id, shared by all nodes meant to
    /// come from the same instance of the vector.
    pub instance: Option<u32>,
    pub children: Vec<TreeSpec>,
}

impl TreeSpec {
    pub fn node(vector: impl Into<String>, label: impl Into<String>) -> Self {
        TreeSpec {
            vector: vector.into(),
            label: label.into(),
            instance: None,
            children: Vec::new(),
        }
    }

    pub fn instance(
        vector: impl Into<String>,
        label: impl Into<String>,
        instance: u32,
    ) -> Self {
        TreeSpec {
            vector: vector.into(),
            label: label.into(),
            instance: Some(instance),
            children: Vec::new(),
        }
    }

    pub fn with_children(mut self, children: Vec<TreeSpec>) -> Self {
        self.children = children;
        self
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("unknown vector {0}")]
    UnknownVector(String),
    #[error("vector {vector} has no production labelled {label}")]
    UnknownLabel { vector: String, label: String },
    #[error("{vector}:{label} has {expected} nonterminal positions, spec supplies {found} children")]
    ArityMismatch {
        vector: String,
        label: String,
        expected: usize,
        found: usize,
    },
    #[error("position {position} of {vector}:{label} is {expected}, child derives {found}")]
    SymbolMismatch {
        vector: String,
        label: String,
        position: usize,
        expected: String,
        found: String,
    },
    #[error("root derives {found}, start symbol is {expected}")]
    RootMismatch { expected: String, found: String },
}

/// An assembled, structurally checked derivation tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationTree {
    nodes: Vec<TreeNode>,
    root: NodeId,
}

impl DerivationTree {
    /// Build and check a tree against a grammar: every node must name an
    /// existing production, supply one subtree per nonterminal position
    /// deriving exactly that nonterminal, and the root must derive the start
    /// symbol.
    pub fn assemble(g: &UvgdlGrammar, spec: &TreeSpec) -> Result<DerivationTree, TreeError> {
        let tree = Self::assemble_fragment(g, spec)?;
        let TreeNode::Internal { symbol, .. } = tree.node(tree.root) else {
            unreachable!("root is built from a production")
        };
        if *symbol != g.start {
            return Err(TreeError::RootMismatch {
                expected: g.start.clone(),
                found: symbol.clone(),
            });
        }
        Ok(tree)
    }

    /// Like [`assemble`](Self::assemble) but without the start-symbol check,
    /// for partial derivations rooted at an arbitrary nonterminal.
    pub fn assemble_fragment(g: &UvgdlGrammar, spec: &TreeSpec) -> Result<DerivationTree, TreeError> {
        let mut nodes = Vec::new();
        let root = build(g, spec, None, &mut nodes)?;
        Ok(DerivationTree { nodes, root })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &TreeNode {
        &self.nodes[id.0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// All node ids in construction (preorder) order.
    pub fn ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.nodes.len()).map(NodeId)
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        match self.node(id) {
            TreeNode::Internal { children, .. } => children,
            TreeNode::Leaf { .. } => &[],
        }
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.node(id).parent()
    }

    /// True iff `a` is a proper ancestor of `b`.
    pub fn is_proper_ancestor(&self, a: NodeId, b: NodeId) -> bool {
        let mut cursor = self.parent(b);
        while let Some(n) = cursor {
            if n == a {
                return true;
            }
            cursor = self.parent(n);
        }
        false
    }

    /// Terminal leaves, left to right.
    pub fn terminal_yield(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_yield(self.root, &mut out);
        out
    }

    fn collect_yield(&self, id: NodeId, out: &mut Vec<String>) {
        match self.node(id) {
            TreeNode::Leaf { terminal, .. } => out.push(terminal.clone()),
            TreeNode::Internal { children, .. } => {
                for &c in children {
                    self.collect_yield(c, out);
                }
            }
        }
    }

    /// Human-readable position of a node: the production labels from the
    /// root down, with 1-based child positions.
    pub fn path(&self, id: NodeId) -> String {
        let mut segments = Vec::new();
        let mut cursor = id;
        while let Some(parent) = self.parent(cursor) {
            let pos = self
                .children(parent)
                .iter()
                .position(|&c| c == cursor)
                .expect("child lists are consistent")
                + 1;
            segments.push(pos.to_string());
            cursor = parent;
        }
        segments.reverse();
        let name = match self.node(id) {
            TreeNode::Internal { vector, label, .. } => format!("{vector}:{label}"),
            TreeNode::Leaf { terminal, .. } => format!("'{terminal}'"),
        };
        if segments.is_empty() {
            format!("{name} (root)")
        } else {
            format!("{name} (root.{})", segments.join("."))
        }
    }

    /// The spec that reconstructs this tree.
    pub fn to_spec(&self) -> TreeSpec {
        self.spec_of(self.root)
    }

    fn spec_of(&self, id: NodeId) -> TreeSpec {
        let TreeNode::Internal {
            vector,
            label,
            declared_instance,
            children,
            ..
        } = self.node(id)
        else {
            unreachable!("spec_of is only called on internal nodes")
        };
        TreeSpec {
            vector: vector.clone(),
            label: label.clone(),
            instance: *declared_instance,
            children: children
                .iter()
                .filter(|&&c| !self.node(c).is_leaf())
                .map(|&c| self.spec_of(c))
                .collect(),
        }
    }
}

fn build(
    g: &UvgdlGrammar,
    spec: &TreeSpec,
    parent: Option<NodeId>,
    nodes: &mut Vec<TreeNode>,
) -> Result<NodeId, TreeError> {
    let vector = g
        .vector(&spec.vector)
        .ok_or_else(|| TreeError::UnknownVector(spec.vector.clone()))?;
    let production = vector
        .production(&spec.label)
        .ok_or_else(|| TreeError::UnknownLabel {
            vector: spec.vector.clone(),
            label: spec.label.clone(),
        })?;
    let nt_positions = production.rhs.len() - production.rhs_terminal_count();
    if nt_positions != spec.children.len() {
        return Err(TreeError::ArityMismatch {
            vector: spec.vector.clone(),
            label: spec.label.clone(),
            expected: nt_positions,
            found: spec.children.len(),
        });
    }

    let id = NodeId(nodes.len());
    nodes.push(TreeNode::Internal {
        vector: spec.vector.clone(),
        label: spec.label.clone(),
        symbol: production.lhs.clone(),
        declared_instance: spec.instance,
        children: Vec::new(),
        parent,
    });

    let mut children = Vec::with_capacity(production.rhs.len());
    let mut child_specs = spec.children.iter();
    for (pos, symbol) in production.rhs.iter().enumerate() {
        match symbol {
            VectorSymbol::Terminal(t) => {
                let leaf = NodeId(nodes.len());
                nodes.push(TreeNode::Leaf {
                    terminal: t.clone(),
                    parent: Some(id),
                });
                children.push(leaf);
            }
            VectorSymbol::Nonterminal(n) => {
                let child_spec = child_specs.next().expect("arity checked above");
                let child_lhs = g
                    .vector(&child_spec.vector)
                    .ok_or_else(|| TreeError::UnknownVector(child_spec.vector.clone()))?
                    .production(&child_spec.label)
                    .ok_or_else(|| TreeError::UnknownLabel {
                        vector: child_spec.vector.clone(),
                        label: child_spec.label.clone(),
                    })?
                    .lhs
                    .clone();
                if child_lhs != *n {
                    return Err(TreeError::SymbolMismatch {
                        vector: spec.vector.clone(),
                        label: spec.label.clone(),
                        position: pos + 1,
                        expected: n.clone(),
                        found: child_lhs,
                    });
                }
                children.push(build(g, child_spec, Some(id), nodes)?);
            }
        }
    }
    let TreeNode::Internal {
        children: slot, ..
    } = &mut nodes[id.0]
    else {
        unreachable!()
    };
    *slot = children;
    Ok(id)
}
