//! Derivation validity for UVG-DL: vector cover, dominance checking,
//! instance inference, and a bounded exhaustive enumerator.
//!
//! A derivation tree is valid iff (1) the multiset of productions used is a
//! sum of whole vectors, witnessed by an assignment of nodes to vector
//! instances, and (2) within each instance every dominance link holds: the
//! child at the link's source position dominates the node contributed by the
//! target production. Dominance is reflexive by default (the child may
//! itself be the target node); [`DominancePolicy::Proper`] switches to
//! strict ancestry.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use smallvec::SmallVec;
use thiserror::Error;

use crate::mslig::ValidationReport;
use crate::uvgdl::tree::{DerivationTree, NodeId, TreeNode, TreeSpec};
use crate::uvgdl::{validate_uvgdl, DominanceLink, UvgdlGrammar, VectorSymbol};

/// Whether a link's source child may itself be the target node.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DominancePolicy {
    /// Dominance includes the node itself (ancestor-or-self).
    #[default]
    Reflexive,
    /// Dominance requires proper ancestry.
    Proper,
}

/// The terminal string a derivation tree derives.
pub fn yield_of(tree: &DerivationTree) -> Vec<String> {
    tree.terminal_yield()
}

/// An assignment of internal nodes to vector instances. Instance ids are
/// scoped per vector: two nodes belong to the same instance iff they carry
/// the same vector name and the same id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VectorAssignment {
    instance_of: BTreeMap<NodeId, u32>,
}

impl VectorAssignment {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (NodeId, u32)>) -> Self {
        VectorAssignment {
            instance_of: pairs.into_iter().collect(),
        }
    }

    /// Read the declared instance ids off the tree. Errors with the path of
    /// the first node that declares none.
    pub fn from_declared(tree: &DerivationTree) -> Result<Self, String> {
        let mut instance_of = BTreeMap::new();
        for id in tree.ids() {
            match tree.node(id) {
                TreeNode::Leaf { .. } => {}
                TreeNode::Internal {
                    declared_instance, ..
                } => match declared_instance {
                    Some(k) => {
                        instance_of.insert(id, *k);
                    }
                    None => {
                        return Err(format!("{} declares no vector instance", tree.path(id)))
                    }
                },
            }
        }
        Ok(VectorAssignment { instance_of })
    }

    pub fn instance_of(&self, node: NodeId) -> Option<u32> {
        self.instance_of.get(&node).copied()
    }

    /// Nodes grouped by (vector, instance), each as (production label, node).
    fn groups(&self, tree: &DerivationTree) -> BTreeMap<(String, u32), Vec<(String, NodeId)>> {
        let mut groups: BTreeMap<(String, u32), Vec<(String, NodeId)>> = BTreeMap::new();
        for id in tree.ids() {
            if let TreeNode::Internal { vector, label, .. } = tree.node(id) {
                if let Some(k) = self.instance_of(id) {
                    groups
                        .entry((vector.clone(), k))
                        .or_default()
                        .push((label.clone(), id));
                }
            }
        }
        groups
    }
}

/// A vector-cover defect.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverViolation {
    pub vector: String,
    /// `None` for nodes outside any instance.
    pub instance: Option<u32>,
    pub message: String,
}

impl fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.instance {
            Some(k) => write!(f, "vector {} instance {}: {}", self.vector, k, self.message),
            None => write!(f, "vector {}: {}", self.vector, self.message),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverVerdict {
    Valid,
    Invalid(Vec<CoverViolation>),
}

impl CoverVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, CoverVerdict::Valid)
    }
}

/// Check that the assignment covers every node and that each instance uses
/// each production of its vector exactly once.
pub fn check_vector_cover(
    g: &UvgdlGrammar,
    tree: &DerivationTree,
    assignment: &VectorAssignment,
) -> CoverVerdict {
    let mut violations = Vec::new();
    for id in tree.ids() {
        if let TreeNode::Internal { vector, .. } = tree.node(id) {
            if assignment.instance_of(id).is_none() {
                violations.push(CoverViolation {
                    vector: vector.clone(),
                    instance: None,
                    message: format!("{} is assigned to no instance", tree.path(id)),
                });
            }
        }
    }
    for ((vname, k), members) in assignment.groups(tree) {
        let Some(vector) = g.vector(&vname) else {
            violations.push(CoverViolation {
                vector: vname.clone(),
                instance: Some(k),
                message: "unknown vector".into(),
            });
            continue;
        };
        for p in &vector.productions {
            let used = members.iter().filter(|(l, _)| *l == p.label).count();
            if used != 1 {
                violations.push(CoverViolation {
                    vector: vname.clone(),
                    instance: Some(k),
                    message: format!("production {} used {used} times, expected once", p.label),
                });
            }
        }
    }
    if violations.is_empty() {
        CoverVerdict::Valid
    } else {
        CoverVerdict::Invalid(violations)
    }
}

/// A violated (or uncheckable) dominance link.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkViolation {
    pub vector: String,
    pub instance: u32,
    pub link: DominanceLink,
    pub message: String,
}

impl fmt::Display for LinkViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "vector {} instance {}, link {}: {}",
            self.vector, self.instance, self.link, self.message
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DominanceVerdict {
    Valid,
    Invalid(Vec<LinkViolation>),
}

impl DominanceVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, DominanceVerdict::Valid)
    }
}

fn dominates(tree: &DerivationTree, upper: NodeId, lower: NodeId, policy: DominancePolicy) -> bool {
    (policy == DominancePolicy::Reflexive && upper == lower)
        || tree.is_proper_ancestor(upper, lower)
}

/// Check every dominance link of every instance under the default
/// (reflexive) policy.
pub fn check_dominance(
    g: &UvgdlGrammar,
    tree: &DerivationTree,
    assignment: &VectorAssignment,
) -> DominanceVerdict {
    check_dominance_with(g, tree, assignment, DominancePolicy::default())
}

/// Check every dominance link of every instance: the child at the link's
/// source position must dominate the node contributed by the target
/// production of the same instance.
pub fn check_dominance_with(
    g: &UvgdlGrammar,
    tree: &DerivationTree,
    assignment: &VectorAssignment,
    policy: DominancePolicy,
) -> DominanceVerdict {
    let mut violations = Vec::new();
    for ((vname, k), members) in assignment.groups(tree) {
        let Some(vector) = g.vector(&vname) else {
            continue; // reported by check_vector_cover
        };
        let node_of = |label: &str| {
            members
                .iter()
                .find(|(l, _)| l == label)
                .map(|&(_, id)| id)
        };
        for link in &vector.links {
            let violation = |message: String| LinkViolation {
                vector: vname.clone(),
                instance: k,
                link: link.clone(),
                message,
            };
            let Some(source) = node_of(&link.source_label) else {
                violations.push(violation(format!(
                    "source production {} missing from the instance",
                    link.source_label
                )));
                continue;
            };
            let Some(target) = node_of(&link.target_label) else {
                violations.push(violation(format!(
                    "target production {} missing from the instance",
                    link.target_label
                )));
                continue;
            };
            let child = tree.children(source)[link.source_pos - 1];
            if !dominates(tree, child, target, policy) {
                violations.push(violation(format!(
                    "{} does not dominate {}",
                    tree.path(child),
                    tree.path(target)
                )));
            }
        }
    }
    if violations.is_empty() {
        DominanceVerdict::Valid
    } else {
        DominanceVerdict::Invalid(violations)
    }
}

/// Dominance-link obligations of an assigned tree that are not discharged:
/// links whose source production is placed but whose target production is
/// missing from the instance. Empty for any tree passing the cover check.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PendingObligations {
    pub pending: Vec<(String, u32, DominanceLink)>,
}

impl PendingObligations {
    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }
}

/// Collect undischarged link obligations, per instance.
pub fn pending_obligations(
    g: &UvgdlGrammar,
    tree: &DerivationTree,
    assignment: &VectorAssignment,
) -> PendingObligations {
    let mut out = PendingObligations::default();
    for ((vname, k), members) in assignment.groups(tree) {
        let Some(vector) = g.vector(&vname) else {
            continue;
        };
        let has = |label: &str| members.iter().any(|(l, _)| l == label);
        for link in &vector.links {
            if has(&link.source_label) && !has(&link.target_label) {
                out.pending.push((vname.clone(), k, link.clone()));
            }
        }
    }
    out
}

/// Infer a vector assignment making the tree valid, under the default
/// (reflexive) policy. `None` iff no grouping of the used productions into
/// whole vector instances satisfies all dominance links.
pub fn infer_assignment(g: &UvgdlGrammar, tree: &DerivationTree) -> Option<VectorAssignment> {
    infer_assignment_with(g, tree, DominancePolicy::default())
}

/// Infer a vector assignment under the given policy. Declared instance ids
/// on the tree are ignored; the result numbers instances per vector from 0.
pub fn infer_assignment_with(
    g: &UvgdlGrammar,
    tree: &DerivationTree,
    policy: DominancePolicy,
) -> Option<VectorAssignment> {
    let mut result: BTreeMap<NodeId, u32> = BTreeMap::new();
    for vector in &g.vectors {
        let label_idx: HashMap<&str, usize> = vector
            .productions
            .iter()
            .enumerate()
            .map(|(i, p)| (p.label.as_str(), i))
            .collect();
        let mut per_label: Vec<Vec<NodeId>> = vec![Vec::new(); vector.productions.len()];
        for id in tree.ids() {
            if let TreeNode::Internal {
                vector: vname,
                label,
                ..
            } = tree.node(id)
            {
                if *vname == vector.name {
                    let &i = label_idx.get(label.as_str())?;
                    per_label[i].push(id);
                }
            }
        }
        if per_label.is_empty() {
            continue;
        }
        let k = per_label[0].len();
        if per_label.iter().any(|nodes| nodes.len() != k) {
            return None; // production counts differ, not a sum of whole vectors
        }
        if k == 0 {
            continue;
        }

        // Process the most constrained labels first; the first label's nodes
        // pin the instance numbering (instances are interchangeable).
        let degree = |label_i: usize| {
            vector
                .links
                .iter()
                .filter(|l| {
                    label_idx[l.source_label.as_str()] == label_i
                        || label_idx[l.target_label.as_str()] == label_i
                })
                .count()
        };
        let mut order: Vec<usize> = (0..vector.productions.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(degree(i)));

        // assigned[label][instance] = node, filled label by label.
        let mut assigned: Vec<Vec<Option<NodeId>>> =
            vec![vec![None; k]; vector.productions.len()];
        for (inst, &node) in per_label[order[0]].iter().enumerate() {
            // Only self-links are checkable here; they fail for every node
            // alike, so failing one dooms all permutations.
            if !links_hold(
                tree, policy, vector, &label_idx, &assigned, order[0], inst, node,
            ) {
                return None;
            }
            assigned[order[0]][inst] = Some(node);
        }
        let ok = assign_labels(
            tree,
            policy,
            vector,
            &label_idx,
            &per_label,
            &order,
            1,
            &mut assigned,
        );
        if !ok {
            return None;
        }
        for nodes in &assigned {
            for (inst, node) in nodes.iter().enumerate() {
                result.insert(node.expect("search assigned every node"), inst as u32);
            }
        }
    }
    // Nodes naming a vector the grammar lacks can never be covered.
    if tree
        .ids()
        .any(|id| !tree.node(id).is_leaf() && !result.contains_key(&id))
    {
        return None;
    }
    Some(VectorAssignment {
        instance_of: result,
    })
}

/// Backtracking over per-label permutations. `assigned` holds the partial
/// assignment; labels `order[..depth]` are complete.
#[allow(clippy::too_many_arguments)]
fn assign_labels(
    tree: &DerivationTree,
    policy: DominancePolicy,
    vector: &crate::uvgdl::Vector,
    label_idx: &HashMap<&str, usize>,
    per_label: &[Vec<NodeId>],
    order: &[usize],
    depth: usize,
    assigned: &mut Vec<Vec<Option<NodeId>>>,
) -> bool {
    if depth == order.len() {
        return true;
    }
    let label_i = order[depth];
    let k = per_label[label_i].len();
    let mut used = vec![false; k];
    place_nodes(
        tree, policy, vector, label_idx, per_label, order, depth, label_i, 0, &mut used, assigned,
    )
}

/// Assign node `next` of label `label_i` to each free instance in turn.
#[allow(clippy::too_many_arguments)]
fn place_nodes(
    tree: &DerivationTree,
    policy: DominancePolicy,
    vector: &crate::uvgdl::Vector,
    label_idx: &HashMap<&str, usize>,
    per_label: &[Vec<NodeId>],
    order: &[usize],
    depth: usize,
    label_i: usize,
    next: usize,
    used: &mut Vec<bool>,
    assigned: &mut Vec<Vec<Option<NodeId>>>,
) -> bool {
    let nodes = &per_label[label_i];
    if next == nodes.len() {
        return assign_labels(
            tree,
            policy,
            vector,
            label_idx,
            per_label,
            order,
            depth + 1,
            assigned,
        );
    }
    let node = nodes[next];
    for inst in 0..nodes.len() {
        if used[inst] {
            continue;
        }
        if !links_hold(tree, policy, vector, label_idx, assigned, label_i, inst, node) {
            continue;
        }
        used[inst] = true;
        assigned[label_i][inst] = Some(node);
        if place_nodes(
            tree, policy, vector, label_idx, per_label, order, depth, label_i,
            next + 1, used, assigned,
        ) {
            return true;
        }
        assigned[label_i][inst] = None;
        used[inst] = false;
    }
    false
}

/// Check all links touching `label_i` whose other endpoint is already
/// assigned for instance `inst`, with `node` playing `label_i`.
#[allow(clippy::too_many_arguments)]
fn links_hold(
    tree: &DerivationTree,
    policy: DominancePolicy,
    vector: &crate::uvgdl::Vector,
    label_idx: &HashMap<&str, usize>,
    assigned: &[Vec<Option<NodeId>>],
    label_i: usize,
    inst: usize,
    node: NodeId,
) -> bool {
    for link in &vector.links {
        let src = label_idx[link.source_label.as_str()];
        let tgt = label_idx[link.target_label.as_str()];
        let (source, target) = if src == label_i && tgt == label_i {
            (Some(node), Some(node))
        } else if src == label_i {
            (Some(node), assigned[tgt][inst])
        } else if tgt == label_i {
            (assigned[src][inst], Some(node))
        } else {
            continue;
        };
        if let (Some(source), Some(target)) = (source, target) {
            let child = tree.children(source)[link.source_pos - 1];
            if !dominates(tree, child, target, policy) {
                return false;
            }
        }
    }
    true
}

/// Bounds for UVG-DL enumeration. The yield bound is exact; the production
/// bound (total internal nodes of a tree) is an approximating cutoff that
/// guards against unbounded non-emitting recursion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UvgdlBounds {
    pub max_yield: usize,
    pub max_productions: usize,
}

impl UvgdlBounds {
    pub fn new(max_yield: usize, max_productions: usize) -> Self {
        UvgdlBounds {
            max_yield,
            max_productions,
        }
    }
}

/// Enumeration statistics. All cuts except `cut_productions` are exact, so
/// the string set is exactly the language restricted to the yield bound iff
/// `cut_productions == 0`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UvgdlSearchStats {
    pub expansions: u64,
    pub completions: u64,
    /// Completed trees whose production multiset was not a sum of whole
    /// vectors.
    pub incomplete_covers: u64,
    pub cut_yield: u64,
    pub cut_productions: u64,
    /// Branches killed by dominance: target placed before its source,
    /// target outside the source child's subtree, or a subtree closing with
    /// an obligation undischarged.
    pub dead_links: u64,
}

impl UvgdlSearchStats {
    pub fn exhausted(&self) -> bool {
        self.cut_productions == 0
    }
}

/// Result of bounded UVG-DL enumeration: every derivable string within the
/// bounds, plus one witness derivation tree per string.
pub struct UvgdlEnumeration {
    pub strings: BTreeSet<Vec<String>>,
    pub stats: UvgdlSearchStats,
    witnesses: BTreeMap<Vec<String>, TreeSpec>,
}

impl UvgdlEnumeration {
    /// A valid derivation tree (with instance ids declared) yielding
    /// `tokens`, if the string was found.
    pub fn witness(&self, tokens: &[String]) -> Option<&TreeSpec> {
        self.witnesses.get(tokens)
    }
}

#[derive(Debug, Error)]
pub enum UvgdlEnumerateError {
    #[error("grammar does not validate:\n{0}")]
    InvalidGrammar(ValidationReport),
    #[error("vector {0} has more than 64 productions")]
    VectorTooLarge(String),
}

/// Exhaustively enumerate `L(g)` up to the bounds, under reflexive
/// dominance. Instances are tracked during construction, so every reported
/// string has a fully valid derivation tree.
pub fn enumerate_uvgdl(
    g: &UvgdlGrammar,
    bounds: &UvgdlBounds,
) -> Result<UvgdlEnumeration, UvgdlEnumerateError> {
    let report = validate_uvgdl(g);
    if !report.is_ok() {
        return Err(UvgdlEnumerateError::InvalidGrammar(report));
    }
    for v in &g.vectors {
        if v.productions.len() > 64 {
            return Err(UvgdlEnumerateError::VectorTooLarge(v.name.clone()));
        }
    }
    let cg = CGrammar::compile(g);
    let mut out = UvgdlEnumeration {
        strings: BTreeSet::new(),
        stats: UvgdlSearchStats::default(),
        witnesses: BTreeMap::new(),
    };

    let Some(initial_phi) = cg.min_yield[cg.start as usize] else {
        return Ok(out); // start symbol derives nothing
    };
    if initial_phi > bounds.max_yield as u64 {
        out.stats.cut_yield += 1;
        return Ok(out);
    }
    let mut state = SState {
        nodes: Vec::new(),
        tasks: vec![STask::Expand {
            parent: NO_NODE,
            pos: 0,
            symbol: cg.start,
        }],
        instances: Vec::new(),
        open: vec![SmallVec::new(); cg.vectors.len()],
        phi: initial_phi,
        productions_used: 0,
    };
    dfs(&cg, bounds, &mut out, &mut state);
    Ok(out)
}

// Compiled grammar for the enumerator.

struct CProd {
    label: String,
    rhs: Vec<CSym>,
    /// Extra yield this production commits an instance to, beyond the
    /// minimum already counted for the slot it fills:
    /// terminals + sum of child minimum yields - min_yield(lhs). Always
    /// nonnegative; `None` if some child is unproductive.
    w: Option<u64>,
}

#[derive(Clone, Copy)]
enum CSym {
    T(u32),
    N(u32),
}

struct CLink {
    src: usize,
    /// 0-based right-hand position of the source occurrence.
    pos: u16,
    tgt: usize,
}

struct CVector {
    prods: Vec<CProd>,
    links: Vec<CLink>,
    full_mask: u64,
    /// Sum of all production `w`s: the potential increase from opening a
    /// fresh instance. `None` if any production is unusable.
    w_total: Option<u64>,
    /// The production all links of this vector target, when there is one
    /// and it sources no link itself. Placing it is then a pure discharge,
    /// which admits a canonical choice among open instances.
    single_target: Option<u32>,
}

struct CGrammar {
    terminals: Vec<String>,
    vectors: Vec<CVector>,
    vector_names: Vec<String>,
    /// Productions applicable per nonterminal id: (vector, production).
    candidates: Vec<Vec<(u32, u32)>>,
    min_yield: Vec<Option<u64>>,
    start: u32,
}

impl CGrammar {
    fn compile(g: &UvgdlGrammar) -> CGrammar {
        let nt_names: Vec<&String> = g.nonterminals.iter().collect();
        let nt_id: HashMap<&str, u32> = nt_names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i as u32))
            .collect();
        let term_names: Vec<&String> = g.terminals.iter().collect();
        let t_id: HashMap<&str, u32> = term_names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i as u32))
            .collect();

        // Index-blind minimum yield per nonterminal, over all productions.
        let mut min_yield: Vec<Option<u64>> = vec![None; nt_names.len()];
        loop {
            let mut changed = false;
            for v in &g.vectors {
                for p in &v.productions {
                    let mut total = p.rhs_terminal_count() as u64;
                    let mut ok = true;
                    for s in &p.rhs {
                        if let VectorSymbol::Nonterminal(n) = s {
                            match min_yield[nt_id[n.as_str()] as usize] {
                                Some(m) => total += m,
                                None => {
                                    ok = false;
                                    break;
                                }
                            }
                        }
                    }
                    if ok {
                        let slot = &mut min_yield[nt_id[p.lhs.as_str()] as usize];
                        if slot.is_none() || slot.unwrap() > total {
                            *slot = Some(total);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }

        let mut vectors = Vec::with_capacity(g.vectors.len());
        let mut vector_names = Vec::with_capacity(g.vectors.len());
        let mut candidates: Vec<Vec<(u32, u32)>> = vec![Vec::new(); nt_names.len()];
        for (vi, v) in g.vectors.iter().enumerate() {
            let label_idx: HashMap<&str, usize> = v
                .productions
                .iter()
                .enumerate()
                .map(|(i, p)| (p.label.as_str(), i))
                .collect();
            let mut prods = Vec::with_capacity(v.productions.len());
            for (pi, p) in v.productions.iter().enumerate() {
                let rhs: Vec<CSym> = p
                    .rhs
                    .iter()
                    .map(|s| match s {
                        VectorSymbol::Terminal(t) => CSym::T(t_id[t.as_str()]),
                        VectorSymbol::Nonterminal(n) => CSym::N(nt_id[n.as_str()]),
                    })
                    .collect();
                let w = (|| {
                    let mut cost = p.rhs_terminal_count() as u64;
                    for s in &rhs {
                        if let CSym::N(n) = s {
                            cost += min_yield[*n as usize]?;
                        }
                    }
                    let own = min_yield[nt_id[p.lhs.as_str()] as usize]?;
                    Some(cost - own)
                })();
                candidates[nt_id[p.lhs.as_str()] as usize].push((vi as u32, pi as u32));
                prods.push(CProd {
                    label: p.label.clone(),
                    rhs,
                    w,
                });
            }
            let links: Vec<CLink> = v
                .links
                .iter()
                .map(|l| CLink {
                    src: label_idx[l.source_label.as_str()],
                    pos: (l.source_pos - 1) as u16,
                    tgt: label_idx[l.target_label.as_str()],
                })
                .collect();
            let w_total = prods.iter().try_fold(0u64, |acc, p| Some(acc + p.w?));
            let full_mask = if prods.len() == 64 {
                u64::MAX
            } else {
                (1u64 << prods.len()) - 1
            };
            let single_target = match links.first() {
                Some(first)
                    if links.iter().all(|l| l.tgt == first.tgt)
                        && links.iter().all(|l| l.src != first.tgt) =>
                {
                    Some(first.tgt as u32)
                }
                _ => None,
            };
            vectors.push(CVector {
                prods,
                links,
                full_mask,
                w_total,
                single_target,
            });
            vector_names.push(v.name.clone());
        }
        CGrammar {
            terminals: term_names.into_iter().cloned().collect(),
            vectors,
            vector_names,
            candidates,
            min_yield,
            start: nt_id[g.start.as_str()],
        }
    }
}

// Search state. The search clones the state per choice, which keeps
// backtracking trivially correct; trees within the bounds are small.

const NO_NODE: u32 = u32::MAX;

#[derive(Clone, Copy, PartialEq, Eq)]
enum LinkState {
    /// Source production not yet placed.
    Inactive,
    /// Source placed at this node; target must land in the subtree under
    /// the source's child at the link position.
    Pending { source: u32 },
    Satisfied,
}

struct SInst {
    vector: u32,
    /// 1-based ordinal among instances of the same vector, for witnesses.
    ordinal: u32,
    /// Bitmask of production indices still to be placed.
    remaining: u64,
    /// Node per production index; NO_NODE if unplaced.
    placed: SmallVec<[u32; 6]>,
    links: SmallVec<[LinkState; 4]>,
}

#[derive(Clone, Copy)]
enum SChild {
    Terminal(u32),
    Open,
    Node(u32),
}

struct SNode {
    vector: u32,
    prod: u32,
    inst: u32,
    parent: Option<(u32, u16)>,
    depth: u16,
    children: SmallVec<[SChild; 4]>,
    /// Link obligations scoped at this node: when its subtree closes, they
    /// must be satisfied.
    carried: SmallVec<[(u32, u8); 2]>,
}

#[derive(Clone, Copy)]
enum STask {
    Expand { parent: u32, pos: u16, symbol: u32 },
    Close(u32),
}

struct SState {
    nodes: Vec<SNode>,
    tasks: Vec<STask>,
    instances: Vec<SInst>,
    /// Incomplete instance ids per vector.
    open: Vec<SmallVec<[u32; 4]>>,
    /// Lower bound on the final yield; never decreases.
    phi: u64,
    productions_used: usize,
}

enum Placement {
    Join(u32),
    Fresh,
}

/// Everything one placement changed, for exact rollback. Undos nest like
/// the recursion, so plain reverse-order restoration is enough.
struct Undo {
    phi: u64,
    vi: u32,
    pi: u32,
    inst_id: u32,
    fresh: bool,
    /// Where the open list held the instance when completion removed it.
    closed_slot: Option<usize>,
    /// (link index, state before the transition), in transition order.
    link_changes: SmallVec<[(u8, LinkState); 4]>,
    parent_link: Option<(u32, u16)>,
    tasks_pushed: usize,
}

fn dfs(cg: &CGrammar, bounds: &UvgdlBounds, out: &mut UvgdlEnumeration, state: &mut SState) {
    // Tasks this frame consumed, restored on the way out.
    let mut popped: SmallVec<[STask; 8]> = SmallVec::new();
    loop {
        match state.tasks.pop() {
            None => {
                out.stats.completions += 1;
                if state.instances.iter().any(|i| i.remaining != 0) {
                    out.stats.incomplete_covers += 1;
                } else {
                    let mut tokens = Vec::new();
                    collect_tokens(cg, &state.nodes, 0, &mut tokens);
                    debug_assert_eq!(tokens.len() as u64, state.phi);
                    if !out.strings.contains(&tokens) {
                        let spec = spec_of(cg, state, 0);
                        out.witnesses.insert(tokens.clone(), spec);
                        out.strings.insert(tokens);
                    }
                }
                break;
            }
            Some(task @ STask::Close(n)) => {
                popped.push(task);
                let violated = state.nodes[n as usize].carried.iter().any(|&(inst, link)| {
                    state.instances[inst as usize].links[link as usize] != LinkState::Satisfied
                });
                if violated {
                    out.stats.dead_links += 1;
                    break;
                }
            }
            Some(task @ STask::Expand {
                parent,
                pos,
                symbol,
            }) => {
                popped.push(task);
                out.stats.expansions += 1;
                for &(vi, pi) in &cg.candidates[symbol as usize] {
                    // A pure-discharge production (the shared target of all
                    // the vector's links) admits a canonical instance: the
                    // compatible scopes are nested, and swapping target
                    // nodes turns any completion through an outer instance
                    // into one through the innermost, with the same yield.
                    if cg.vectors[vi as usize].single_target == Some(pi) {
                        if let Some(inst) = innermost_discharge(cg, state, parent, pos, vi, pi)
                        {
                            explore(cg, bounds, out, state, parent, pos, vi, pi, Placement::Join(inst));
                        }
                        continue;
                    }
                    // Joining two instances in identical states explores
                    // isomorphic subtrees; keep the first of each signature.
                    let candidates: SmallVec<[u32; 8]> =
                        state.open[vi as usize].iter().copied().collect();
                    let mut seen: SmallVec<[(u64, SmallVec<[LinkState; 4]>); 4]> = SmallVec::new();
                    for inst in candidates {
                        let i = &state.instances[inst as usize];
                        if i.remaining & (1 << pi) == 0 {
                            continue;
                        }
                        let sig = (i.remaining, i.links.clone());
                        if seen.contains(&sig) {
                            continue;
                        }
                        seen.push(sig);
                        explore(cg, bounds, out, state, parent, pos, vi, pi, Placement::Join(inst));
                    }
                    explore(cg, bounds, out, state, parent, pos, vi, pi, Placement::Fresh);
                }
                break;
            }
        }
    }
    while let Some(task) = popped.pop() {
        state.tasks.push(task);
    }
}

/// Attempt one placement; on success recurse under it and roll it back.
#[allow(clippy::too_many_arguments)]
fn explore(
    cg: &CGrammar,
    bounds: &UvgdlBounds,
    out: &mut UvgdlEnumeration,
    state: &mut SState,
    parent: u32,
    pos: u16,
    vi: u32,
    pi: u32,
    how: Placement,
) {
    if let Some(undo) = apply_place(cg, bounds, out, state, parent, pos, vi, pi, how) {
        dfs(cg, bounds, out, state);
        revert(state, undo);
    }
}

/// Apply one placement choice in place, unless a bound or a dominance
/// condition kills it. All checks run before the first mutation.
#[allow(clippy::too_many_arguments)]
fn apply_place(
    cg: &CGrammar,
    bounds: &UvgdlBounds,
    out: &mut UvgdlEnumeration,
    state: &mut SState,
    parent: u32,
    pos: u16,
    vi: u32,
    pi: u32,
    how: Placement,
) -> Option<Undo> {
    let vector = &cg.vectors[vi as usize];
    let prod = &vector.prods[pi as usize];

    if state.productions_used + 1 > bounds.max_productions {
        out.stats.cut_productions += 1;
        return None;
    }
    // Yield lower bound: joins keep it constant (the production's committed
    // cost was already counted when its instance opened), fresh instances
    // add the whole vector's committed cost.
    let phi = match how {
        Placement::Join(_) => state.phi,
        Placement::Fresh => {
            let Some(w_total) = vector.w_total else {
                out.stats.cut_yield += 1;
                return None;
            };
            state.phi + w_total
        }
    };
    if phi > bounds.max_yield as u64 {
        out.stats.cut_yield += 1;
        return None;
    }

    // Dominance conditions. The new node's ancestry is `parent`'s plus one
    // edge.
    let links = match how {
        Placement::Join(i) => Some(&state.instances[i as usize].links),
        Placement::Fresh => None,
    };
    let link_state = |li: usize| links.map_or(LinkState::Inactive, |l| l[li]);
    for (li, link) in vector.links.iter().enumerate() {
        if link.tgt == pi as usize {
            match link_state(li) {
                LinkState::Inactive => {
                    // Target placed before its source: the source's child
                    // subtree cannot reach back to an existing node.
                    out.stats.dead_links += 1;
                    return None;
                }
                LinkState::Pending { source } => {
                    if !attaches_under(&state.nodes, parent, pos, source, link.pos) {
                        out.stats.dead_links += 1;
                        return None;
                    }
                }
                LinkState::Satisfied => unreachable!("each label is placed once per instance"),
            }
        }
        if link.src == pi as usize && link_state(li) == LinkState::Inactive {
            // This link is about to pend, confining its target to the
            // subtree below the new node's child at link.pos. The same
            // target is already confined by every same-target pending link,
            // and an existing scope can never end up inside a new node's
            // subtree, so the new scope must nest inside each of them.
            for (lj, other) in vector.links.iter().enumerate() {
                if lj == li || other.tgt != link.tgt {
                    continue;
                }
                match link_state(lj) {
                    LinkState::Pending { source } => {
                        if !attaches_under(&state.nodes, parent, pos, source, other.pos) {
                            out.stats.dead_links += 1;
                            return None;
                        }
                    }
                    // Both links pend from this very node at different
                    // positions: disjoint scopes for one target node.
                    LinkState::Inactive
                        if other.src == pi as usize && other.pos != link.pos =>
                    {
                        out.stats.dead_links += 1;
                        return None;
                    }
                    _ => {}
                }
            }
        }
    }

    let mut undo = Undo {
        phi: state.phi,
        vi,
        pi,
        inst_id: 0,
        fresh: matches!(how, Placement::Fresh),
        closed_slot: None,
        link_changes: SmallVec::new(),
        parent_link: None,
        tasks_pushed: 0,
    };
    state.phi = phi;
    state.productions_used += 1;
    let node_id = state.nodes.len() as u32;

    let inst_id = match how {
        Placement::Join(i) => i,
        Placement::Fresh => {
            let id = state.instances.len() as u32;
            let ordinal = state
                .instances
                .iter()
                .filter(|i| i.vector == vi)
                .count() as u32
                + 1;
            state.instances.push(SInst {
                vector: vi,
                ordinal,
                remaining: vector.full_mask,
                placed: SmallVec::from_elem(NO_NODE, vector.prods.len()),
                links: SmallVec::from_elem(LinkState::Inactive, vector.links.len()),
            });
            state.open[vi as usize].push(id);
            id
        }
    };
    undo.inst_id = inst_id;
    {
        let inst = &mut state.instances[inst_id as usize];
        inst.remaining &= !(1 << pi);
        inst.placed[pi as usize] = node_id;
        if inst.remaining == 0 {
            let slot = state.open[vi as usize]
                .iter()
                .position(|&i| i == inst_id)
                .expect("open instance is listed");
            state.open[vi as usize].swap_remove(slot);
            undo.closed_slot = Some(slot);
        }
    }

    let parent_link = (parent != NO_NODE).then_some((parent, pos));
    undo.parent_link = parent_link;
    state.nodes.push(SNode {
        vector: vi,
        prod: pi,
        inst: inst_id,
        parent: parent_link,
        depth: match parent_link {
            Some((p, _)) => state.nodes[p as usize].depth + 1,
            None => 0,
        },
        children: prod
            .rhs
            .iter()
            .map(|s| match s {
                CSym::T(t) => SChild::Terminal(*t),
                CSym::N(_) => SChild::Open,
            })
            .collect(),
        carried: SmallVec::new(),
    });
    if let Some((p, pos)) = parent_link {
        state.nodes[p as usize].children[pos as usize] = SChild::Node(node_id);
    }

    // Obligations whose scope slot this node fills.
    if parent_link.is_some() {
        let mut carried: SmallVec<[(u32, u8); 2]> = SmallVec::new();
        for (ii, inst) in state.instances.iter().enumerate() {
            for (li, ls) in inst.links.iter().enumerate() {
                if let LinkState::Pending { source } = ls {
                    let link = &cg.vectors[inst.vector as usize].links[li];
                    if parent_link == Some((*source, link.pos)) {
                        carried.push((ii as u32, li as u8));
                    }
                }
            }
        }
        state.nodes[node_id as usize].carried = carried;
    }

    // Link-state transitions; the checks above already vetted them.
    for (li, link) in vector.links.iter().enumerate() {
        let inst = &mut state.instances[inst_id as usize];
        if link.tgt == pi as usize {
            undo.link_changes.push((li as u8, inst.links[li]));
            inst.links[li] = LinkState::Satisfied;
        } else if link.src == pi as usize && inst.links[li] == LinkState::Inactive {
            undo.link_changes.push((li as u8, inst.links[li]));
            inst.links[li] = LinkState::Pending { source: node_id };
        }
    }

    // Close marker first so it pops after all child subtrees; children in
    // reverse so the leftmost pops first.
    state.tasks.push(STask::Close(node_id));
    undo.tasks_pushed = 1;
    for (pos, sym) in prod.rhs.iter().enumerate().rev() {
        if let CSym::N(n) = sym {
            state.tasks.push(STask::Expand {
                parent: node_id,
                pos: pos as u16,
                symbol: *n,
            });
            undo.tasks_pushed += 1;
        }
    }
    Some(undo)
}

fn revert(state: &mut SState, undo: Undo) {
    state
        .tasks
        .truncate(state.tasks.len() - undo.tasks_pushed);
    {
        let inst = &mut state.instances[undo.inst_id as usize];
        for &(li, prev) in undo.link_changes.iter().rev() {
            inst.links[li as usize] = prev;
        }
    }
    if let Some(slot) = undo.closed_slot {
        let open = &mut state.open[undo.vi as usize];
        if slot == open.len() {
            open.push(undo.inst_id);
        } else {
            let moved = open[slot];
            open[slot] = undo.inst_id;
            open.push(moved);
        }
    }
    {
        let inst = &mut state.instances[undo.inst_id as usize];
        inst.remaining |= 1 << undo.pi;
        inst.placed[undo.pi as usize] = NO_NODE;
    }
    if undo.fresh {
        let last = state.open[undo.vi as usize].pop();
        debug_assert_eq!(last, Some(undo.inst_id));
        state.instances.pop();
    }
    if let Some((p, pos)) = undo.parent_link {
        state.nodes[p as usize].children[pos as usize] = SChild::Open;
    }
    state.nodes.pop();
    state.phi = undo.phi;
    state.productions_used -= 1;
}

/// True iff `node` lies within the subtree rooted at `source`'s child at
/// `pos` (including that child itself: reflexive dominance).
fn under(nodes: &[SNode], mut node: u32, source: u32, pos: u16) -> bool {
    loop {
        let Some((p, ppos)) = nodes[node as usize].parent else {
            return false;
        };
        if p == source {
            return ppos == pos;
        }
        node = p;
    }
}

/// `under`, for a node about to be attached at `parent`/`pos` but not yet
/// pushed into the arena.
fn attaches_under(nodes: &[SNode], parent: u32, pos: u16, source: u32, link_pos: u16) -> bool {
    if parent == NO_NODE {
        return false;
    }
    if parent == source {
        return pos == link_pos;
    }
    under(nodes, parent, source, link_pos)
}

/// The canonical open instance for a pure-discharge production: all links
/// Pending and scoping the slot, effective scope innermost. Compatible
/// scopes all contain the slot, so they are totally ordered by containment
/// (deeper source = inner scope); if any completion discharges an outer
/// instance here, its target placement for the innermost one lies inside the
/// innermost scope, hence inside the outer one too, and swapping the two
/// target nodes gives a completion that discharges the innermost instance
/// here instead. Induction over the remaining placements then makes the
/// innermost choice complete for the language.
fn innermost_discharge(
    cg: &CGrammar,
    state: &SState,
    parent: u32,
    pos: u16,
    vi: u32,
    pi: u32,
) -> Option<u32> {
    let vector = &cg.vectors[vi as usize];
    let mut best: Option<(u16, u32)> = None;
    'insts: for &inst in &state.open[vi as usize] {
        let i = &state.instances[inst as usize];
        if i.remaining & (1 << pi) == 0 {
            continue;
        }
        let mut scope_depth = 0u16;
        for (li, link) in vector.links.iter().enumerate() {
            let LinkState::Pending { source } = i.links[li] else {
                continue 'insts;
            };
            if !attaches_under(&state.nodes, parent, pos, source, link.pos) {
                continue 'insts;
            }
            scope_depth = scope_depth.max(state.nodes[source as usize].depth);
        }
        if best.is_none_or(|(d, _)| scope_depth > d) {
            best = Some((scope_depth, inst));
        }
    }
    best.map(|(_, inst)| inst)
}

fn collect_tokens(cg: &CGrammar, nodes: &[SNode], id: u32, out: &mut Vec<String>) {
    for child in &nodes[id as usize].children {
        match child {
            SChild::Terminal(t) => out.push(cg.terminals[*t as usize].clone()),
            SChild::Node(n) => collect_tokens(cg, nodes, *n, out),
            SChild::Open => unreachable!("completion states have no open slots"),
        }
    }
}

fn spec_of(cg: &CGrammar, state: &SState, id: u32) -> TreeSpec {
    let node = &state.nodes[id as usize];
    let vector = &cg.vector_names[node.vector as usize];
    let label = &cg.vectors[node.vector as usize].prods[node.prod as usize].label;
    let ordinal = state.instances[node.inst as usize].ordinal;
    TreeSpec::instance(vector.clone(), label.clone(), ordinal).with_children(
        node.children
            .iter()
            .filter_map(|c| match c {
                SChild::Node(n) => Some(spec_of(cg, state, *n)),
                SChild::Terminal(_) => None,
                SChild::Open => unreachable!("completion states have no open slots"),
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn tokens(parts: &[&str]) -> Vec<String> {
        parts.iter().map(|s| s.to_string()).collect()
    }

    /// The sample derivation tree: canonical argument order, verb cluster
    /// right-branching, all three vector instances interleaved.
    fn sample_spec() -> TreeSpec {
        let leaf = |v: &str, q: &str| TreeSpec::instance(v, q, 1);
        TreeSpec::instance("v1", "q1", 1).with_children(vec![TreeSpec::instance("v2", "q1", 1)
            .with_children(vec![
                leaf("v5", "q1"),
                TreeSpec::instance("v2", "q2", 1).with_children(vec![
                    leaf("v6", "q1"),
                    TreeSpec::instance("v4", "q1", 1).with_children(vec![
                        leaf("v7", "q1"),
                        TreeSpec::instance("v3", "q1", 1).with_children(vec![
                            leaf("v4", "q2"),
                            TreeSpec::instance("v2", "q3", 1).with_children(vec![
                                leaf("v3", "q2"),
                                leaf("v2", "q4"),
                            ]),
                        ]),
                    ]),
                ]),
            ])])
    }

    /// v4's verb hung outside the subtree of v4:q1's VP child: the verb
    /// cluster element escapes the region its dominance link confines it to.
    fn v4_escape_spec() -> TreeSpec {
        let leaf = |v: &str, q: &str| TreeSpec::instance(v, q, 1);
        TreeSpec::instance("v1", "q1", 1).with_children(vec![TreeSpec::instance("v3", "q1", 1)
            .with_children(vec![
                leaf("v4", "q2"),
                TreeSpec::instance("v4", "q1", 1).with_children(vec![
                    leaf("v7", "q1"),
                    TreeSpec::instance("v2", "q1", 1).with_children(vec![
                        leaf("v5", "q1"),
                        TreeSpec::instance("v2", "q2", 1).with_children(vec![
                            leaf("v6", "q1"),
                            TreeSpec::instance("v2", "q3", 1).with_children(vec![
                                leaf("v3", "q2"),
                                leaf("v2", "q4"),
                            ]),
                        ]),
                    ]),
                ]),
            ])])
    }

    const SAMPLE_YIELD: [&str; 7] = [
        "daß",
        "der Meister",
        "niemandem",
        "den Kühlschrank",
        "zu reparieren",
        "zu versuchen",
        "verspricht",
    ];

    #[test]
    fn sample_tree_is_valid_under_reflexive_dominance() {
        let g = samples::scrambling_g2();
        let tree = DerivationTree::assemble(&g, &sample_spec()).unwrap();
        assert_eq!(yield_of(&tree), tokens(&SAMPLE_YIELD));
        let asg = VectorAssignment::from_declared(&tree).unwrap();
        assert!(check_vector_cover(&g, &tree, &asg).is_valid());
        assert!(check_dominance(&g, &tree, &asg).is_valid());
        assert!(pending_obligations(&g, &tree, &asg).is_empty());
    }

    #[test]
    fn sample_tree_needs_reflexivity() {
        let g = samples::scrambling_g2();
        let tree = DerivationTree::assemble(&g, &sample_spec()).unwrap();
        let asg = VectorAssignment::from_declared(&tree).unwrap();
        let verdict = check_dominance_with(&g, &tree, &asg, DominancePolicy::Proper);
        let DominanceVerdict::Invalid(violations) = verdict else {
            panic!("proper dominance must reject the sample tree");
        };
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].vector, "v2");
        assert_eq!(violations[0].link, DominanceLink::new("q3", 2, "q4"));
    }

    #[test]
    fn escaped_verb_violates_v4_link() {
        let g = samples::scrambling_g2();
        let tree = DerivationTree::assemble(&g, &v4_escape_spec()).unwrap();
        let asg = VectorAssignment::from_declared(&tree).unwrap();
        assert!(check_vector_cover(&g, &tree, &asg).is_valid());
        let DominanceVerdict::Invalid(violations) = check_dominance(&g, &tree, &asg) else {
            panic!("escape tree must be rejected");
        };
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].vector, "v4");
        assert_eq!(violations[0].link, DominanceLink::new("q1", 2, "q2"));
        assert!(infer_assignment(&g, &tree).is_none());
    }

    #[test]
    fn inference_recovers_the_sample_assignment() {
        let g = samples::scrambling_g2();
        let mut spec = sample_spec();
        fn erase(s: &mut TreeSpec) {
            s.instance = None;
            s.children.iter_mut().for_each(erase);
        }
        erase(&mut spec);
        let tree = DerivationTree::assemble(&g, &spec).unwrap();
        let asg = infer_assignment(&g, &tree).expect("the sample grouping exists");
        assert!(check_vector_cover(&g, &tree, &asg).is_valid());
        assert!(check_dominance(&g, &tree, &asg).is_valid());
    }

    #[test]
    fn fragment_yield() {
        let g = samples::scrambling_g2();
        let tree = DerivationTree::assemble_fragment(&g, &TreeSpec::node("v5", "q1")).unwrap();
        assert_eq!(yield_of(&tree), tokens(&["der Meister"]));
    }

    #[test]
    fn missing_declaration_is_reported_with_path() {
        let g = samples::scrambling_g2();
        let mut spec = sample_spec();
        spec.children[0].instance = None;
        let tree = DerivationTree::assemble(&g, &spec).unwrap();
        let err = VectorAssignment::from_declared(&tree).unwrap_err();
        assert!(err.contains("v2:q1"));
    }

    #[test]
    fn incomplete_instance_fails_cover_with_pending_obligations() {
        let g = samples::scrambling_g2();
        let spec = TreeSpec::instance("v1", "q1", 1)
            .with_children(vec![TreeSpec::instance("v2", "q4", 1)]);
        let tree = DerivationTree::assemble(&g, &spec).unwrap();
        let asg = VectorAssignment::from_declared(&tree).unwrap();
        let CoverVerdict::Invalid(violations) = check_vector_cover(&g, &tree, &asg) else {
            panic!("missing q1..q3 must fail the cover check");
        };
        assert_eq!(violations.len(), 3);
        // The verb is placed but none of its sources are, so nothing is
        // pending; flip the direction to see obligations.
        let spec = TreeSpec::instance("v1", "q1", 1).with_children(vec![TreeSpec::instance(
            "v2", "q1", 1,
        )
        .with_children(vec![
            TreeSpec::instance("v5", "q1", 1),
            TreeSpec::instance("v4", "q1", 1).with_children(vec![
                TreeSpec::instance("v7", "q1", 1),
                TreeSpec::instance("v4", "q2", 1),
            ]),
        ])]);
        let tree = DerivationTree::assemble(&g, &spec).unwrap();
        let asg = VectorAssignment::from_declared(&tree).unwrap();
        let pending = pending_obligations(&g, &tree, &asg);
        assert_eq!(pending.pending.len(), 1);
        assert_eq!(pending.pending[0].0, "v2");
        assert_eq!(pending.pending[0].2, DominanceLink::new("q1", 2, "q4"));
    }

    #[test]
    fn enumeration_up_to_six_tokens() {
        let g = samples::scrambling_g2();
        let out = enumerate_uvgdl(&g, &UvgdlBounds::new(6, 24)).unwrap();
        assert!(out.stats.exhausted());
        // The matrix verb's vector is optional: the shortest string uses
        // only v1, v4, and v7.
        let minimal = tokens(&["daß", "den Kühlschrank", "zu reparieren"]);
        assert!(out.strings.contains(&minimal));
        let canonical = tokens(&[
            "daß",
            "der Meister",
            "niemandem",
            "den Kühlschrank",
            "zu reparieren",
            "verspricht",
        ]);
        assert!(out.strings.contains(&canonical));
        let count = |s: &[String], t: &str| s.iter().filter(|x| *x == t).count();
        for s in &out.strings {
            assert_eq!(s[0], "daß");
            // One v4 instance always; v2 brings both its arguments and the
            // matrix verb; lengths are 3 + 3a + b.
            let a = count(s, "verspricht");
            let b = count(s, "zu versuchen");
            assert_eq!(s.len(), 3 + 3 * a + b, "unexpected shape: {s:?}");
            assert_eq!(count(s, "der Meister"), a);
            assert_eq!(count(s, "niemandem"), a);
            assert_eq!(count(s, "den Kühlschrank"), 1);
            assert_eq!(count(s, "zu reparieren"), 1);
            let ks = s.iter().position(|t| t == "den Kühlschrank").unwrap();
            let zr = s.iter().position(|t| t == "zu reparieren").unwrap();
            assert!(ks < zr, "accusative must precede its verb: {s:?}");
        }
    }

    #[test]
    fn enumeration_at_seven_tokens_contains_the_sample_yield() {
        let g = samples::scrambling_g2();
        let out = enumerate_uvgdl(&g, &UvgdlBounds::new(7, 28)).unwrap();
        assert!(out.stats.exhausted());
        let sample = tokens(&SAMPLE_YIELD);
        assert!(out.strings.contains(&sample));
        let escape_yield = tokens(&[
            "daß",
            "zu reparieren",
            "den Kühlschrank",
            "der Meister",
            "niemandem",
            "zu versuchen",
            "verspricht",
        ]);
        assert!(!out.strings.contains(&escape_yield));
        for s in out.strings.iter().filter(|s| s.len() == 7) {
            let ks = s.iter().position(|t| t == "den Kühlschrank").unwrap();
            let zr = s.iter().position(|t| t == "zu reparieren").unwrap();
            assert!(ks < zr);
        }
    }

    #[test]
    fn enumeration_witnesses_check_out() {
        let g = samples::scrambling_g2();
        let out = enumerate_uvgdl(&g, &UvgdlBounds::new(7, 28)).unwrap();
        let sample = tokens(&SAMPLE_YIELD);
        let spec = out.witness(&sample).unwrap();
        let tree = DerivationTree::assemble(&g, spec).unwrap();
        assert_eq!(yield_of(&tree), sample);
        let asg = VectorAssignment::from_declared(&tree).unwrap();
        assert!(check_vector_cover(&g, &tree, &asg).is_valid());
        assert!(check_dominance(&g, &tree, &asg).is_valid());
    }

    #[test]
    fn enumeration_without_the_accusative_vector_is_empty() {
        let mut g = samples::scrambling_g2();
        g.vectors.retain(|v| v.name != "v7");
        let out = enumerate_uvgdl(&g, &UvgdlBounds::new(8, 32)).unwrap();
        assert!(out.strings.is_empty());
    }
}
