//! Spines: directed trees labeled by a partition of the vertex set.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::blocks::{BuildingSet, OpenSubtree};
use crate::error::{Error, Result};
use crate::fan;
use crate::tree::SignedTree;
use crate::vset::{sort_canonical, VSet};

/// A directed tree whose node labels partition the standard vertices.
///
/// Nodes are kept sorted by the smallest vertex of their label and arcs are
/// sorted, so structurally equal spines compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Spine {
    labels: Vec<VSet>,
    arcs: Vec<(usize, usize)>,
}

impl fmt::Debug for Spine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Spine{{labels: {:?}, arcs: {:?}}}", self.labels, self.arcs)
    }
}

impl Spine {
    /// Build from labels and arcs (node indices into `labels`), then canonicalize.
    pub fn new(labels: Vec<VSet>, arcs: Vec<(usize, usize)>) -> Spine {
        let mut idx: Vec<usize> = (0..labels.len()).collect();
        idx.sort_by_key(|&i| labels[i].first().unwrap_or(usize::MAX));
        let mut pos = vec![0; labels.len()];
        for (new, &old) in idx.iter().enumerate() {
            pos[old] = new;
        }
        let mut arcs: Vec<(usize, usize)> = arcs.into_iter().map(|(a, b)| (pos[a], pos[b])).collect();
        arcs.sort_unstable();
        Spine {
            labels: idx.iter().map(|&i| labels[i]).collect(),
            arcs,
        }
    }

    /// The one-node spine labeled by `all`.
    pub fn single(all: VSet) -> Spine {
        Spine {
            labels: vec![all],
            arcs: Vec::new(),
        }
    }

    /// Maximal spine whose nodes are the given vertices, arcs given by vertex pairs.
    pub fn from_vertex_arcs(vertices: VSet, arcs: &[(usize, usize)]) -> Spine {
        let vs: Vec<usize> = vertices.iter().collect();
        let node = |v: usize| vs.iter().position(|&x| x == v).expect("vertex is a node");
        Spine::new(
            vs.iter().map(|&v| VSet::singleton(v)).collect(),
            arcs.iter().map(|&(a, b)| (node(a), node(b))).collect(),
        )
    }

    pub fn labels(&self) -> &[VSet] {
        &self.labels
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn is_maximal(&self) -> bool {
        self.labels.iter().all(|l| l.len() == 1)
    }

    pub fn ground(&self) -> VSet {
        self.labels.iter().fold(VSet::EMPTY, |a, &l| a.union(l))
    }

    /// Node whose label contains `v`.
    pub fn node_of(&self, v: usize) -> Option<usize> {
        self.labels.iter().position(|l| l.contains(v))
    }

    pub fn in_arcs(&self, node: usize) -> Vec<usize> {
        (0..self.arcs.len()).filter(|&a| self.arcs[a].1 == node).collect()
    }

    pub fn out_arcs(&self, node: usize) -> Vec<usize> {
        (0..self.arcs.len()).filter(|&a| self.arcs[a].0 == node).collect()
    }

    fn neighbors(&self) -> Vec<Vec<(usize, usize)>> {
        let mut nb = vec![Vec::new(); self.labels.len()];
        for (i, &(a, b)) in self.arcs.iter().enumerate() {
            nb[a].push((b, i));
            nb[b].push((a, i));
        }
        nb
    }

    /// Nodes reachable from `start` in the underlying tree without using arc `skip`.
    fn side(&self, nb: &[Vec<(usize, usize)>], start: usize, skip: usize) -> Vec<usize> {
        let mut seen = vec![false; self.labels.len()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut out = vec![start];
        while let Some(x) = stack.pop() {
            for &(y, a) in &nb[x] {
                if a != skip && !seen[y] {
                    seen[y] = true;
                    out.push(y);
                    stack.push(y);
                }
            }
        }
        out
    }

    /// `(sc(r), sk(r))` for each arc, in arc order.
    pub fn sides(&self) -> Vec<(VSet, VSet)> {
        let nb = self.neighbors();
        let all = self.ground();
        self.arcs
            .iter()
            .enumerate()
            .map(|(i, &(t, _))| {
                let sc = self
                    .side(&nb, t, i)
                    .into_iter()
                    .fold(VSet::EMPTY, |acc, x| acc.union(self.labels[x]));
                (sc, all.minus(sc))
            })
            .collect()
    }

    /// Source sets in canonical order; this is the nested-set key of the spine.
    pub fn key(&self) -> Vec<VSet> {
        let mut v: Vec<VSet> = self.sides().into_iter().map(|(s, _)| s).collect();
        sort_canonical(&mut v);
        v
    }

    /// Index of the arc with the given source set.
    pub fn arc_with_source(&self, sc: VSet) -> Option<usize> {
        self.sides().iter().position(|&(s, _)| s == sc)
    }

    fn is_tree(&self) -> bool {
        let k = self.labels.len();
        if self.arcs.len() + 1 != k {
            return false;
        }
        if self.arcs.iter().any(|&(a, b)| a >= k || b >= k || a == b) {
            return false;
        }
        let nb = self.neighbors();
        self.side(&nb, 0, usize::MAX).len() == k
    }

    /// Node sets `desc[x]` of nodes reachable from `x` along arcs, `x` included.
    pub fn descendants(&self) -> Vec<Vec<bool>> {
        let k = self.labels.len();
        let mut out = vec![vec![false; k]; k];
        for (x, row) in out.iter_mut().enumerate() {
            row[x] = true;
            let mut stack = vec![x];
            while let Some(y) = stack.pop() {
                for &(a, b) in &self.arcs {
                    if a == y && !row[b] {
                        row[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        out
    }
}

/// First violated spine condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpineViolation {
    EmptyLabel(usize),
    LabelsNotPartition,
    NotATree,
    /// Incoming source sets at `node` are not in distinct components of `T ∖ U⁻`.
    Incoming { node: usize },
    /// Outgoing sink sets at `node` are not in distinct components of `T ∖ U⁺`.
    Outgoing { node: usize },
}

impl fmt::Display for SpineViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpineViolation::EmptyLabel(n) => write!(f, "node {} has an empty label", n),
            SpineViolation::LabelsNotPartition => write!(f, "labels do not partition the vertex set"),
            SpineViolation::NotATree => write!(f, "arcs do not form a tree on the nodes"),
            SpineViolation::Incoming { node } => write!(f, "incoming arcs at node {} are not separated", node),
            SpineViolation::Outgoing { node } => write!(f, "outgoing arcs at node {} are not separated", node),
        }
    }
}

/// Component index of every vertex in `T ∖ deleted` (`usize::MAX` on deleted vertices).
fn component_ids(tree: &SignedTree, deleted: VSet) -> Vec<usize> {
    let mut ids = vec![usize::MAX; tree.n()];
    for (i, c) in tree.components(deleted).iter().enumerate() {
        for v in c.vertices.iter() {
            ids[v] = i;
        }
    }
    ids
}

/// The single component containing all of `s`, if any.
fn single_component(ids: &[usize], s: VSet) -> Option<usize> {
    let c = ids[s.first()?];
    (c != usize::MAX && s.iter().all(|v| ids[v] == c)).then_some(c)
}

fn separated(ids: &[usize], sets: &[VSet]) -> bool {
    let mut seen = HashSet::new();
    sets.iter()
        .all(|&s| single_component(ids, s).is_some_and(|c| seen.insert(c)))
}

pub fn validate_spine(tree: &SignedTree, spine: &Spine) -> std::result::Result<(), SpineViolation> {
    let mut union = VSet::EMPTY;
    for (i, &l) in spine.labels.iter().enumerate() {
        if l.is_empty() {
            return Err(SpineViolation::EmptyLabel(i));
        }
        if !union.is_disjoint(l) {
            return Err(SpineViolation::LabelsNotPartition);
        }
        union = union.union(l);
    }
    if union != tree.standard() {
        return Err(SpineViolation::LabelsNotPartition);
    }
    if !spine.is_tree() {
        return Err(SpineViolation::NotATree);
    }
    let sides = spine.sides();
    for (node, &u) in spine.labels.iter().enumerate() {
        let ins: Vec<VSet> = spine.in_arcs(node).iter().map(|&a| sides[a].0).collect();
        if !separated(&component_ids(tree, u.inter(tree.negatives())), &ins) {
            return Err(SpineViolation::Incoming { node });
        }
        let outs: Vec<VSet> = spine.out_arcs(node).iter().map(|&a| sides[a].1).collect();
        if !separated(&component_ids(tree, u.inter(tree.positives())), &outs) {
            return Err(SpineViolation::Outgoing { node });
        }
    }
    Ok(())
}

fn require_valid(tree: &SignedTree, spine: &Spine) -> Result<()> {
    validate_spine(tree, spine).map_err(|v| Error::InvalidSpine(v.to_string()))
}

/// `N(S)`: the source sets of all arcs, in canonical order.
pub fn source_sets(tree: &SignedTree, spine: &Spine) -> Result<Vec<VSet>> {
    require_valid(tree, spine)?;
    Ok(spine.key())
}

/// The unique spine whose source sets are `nested`.
///
/// Computed as the spine of the level-set preposet of `Σ_{B∈N} 1_B`, larger
/// values first.
pub fn spine_of_nested_set(tree: &SignedTree, nested: &[VSet]) -> Result<Spine> {
    let bs = BuildingSet::new(tree);
    spine_of_nested_set_in(tree, &bs, nested)
}

pub(crate) fn spine_of_nested_set_in(tree: &SignedTree, bs: &BuildingSet, nested: &[VSet]) -> Result<Spine> {
    if let Some(b) = nested.iter().find(|&&b| !bs.is_relevant(b)) {
        return Err(Error::NotNested(format!("{{{}}} is not a relevant block", tree.key(*b))));
    }
    if !bs.is_nested(nested) {
        return Err(Error::NotNested("blocks are not pairwise compatible".into()));
    }
    let std = tree.standard_list();
    let count = |v: usize| nested.iter().filter(|b| b.contains(v)).count();
    let mut levels: Vec<usize> = std.iter().map(|&v| count(v)).collect();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    levels.dedup();
    let parts: Vec<VSet> = levels
        .iter()
        .map(|&c| std.iter().copied().filter(|&v| count(v) == c).collect())
        .collect();
    let spine = fan::kappa_extended_sets(tree, &parts)?;
    let mut want = nested.to_vec();
    sort_canonical(&mut want);
    if spine.key() != want {
        return Err(Error::VerificationFailure(
            "spine source sets differ from the nested set".into(),
        ));
    }
    Ok(spine)
}

/// Merge the two endpoints of an arc.
pub fn contract_arc(spine: &Spine, arc: usize) -> Result<Spine> {
    let &(t, h) = spine
        .arcs
        .get(arc)
        .ok_or_else(|| Error::UnknownArc(arc.to_string()))?;
    let mut labels = spine.labels.clone();
    labels[t] = labels[t].union(labels[h]);
    let remap = |x: usize| {
        let x = if x == h { t } else { x };
        if x > h {
            x - 1
        } else {
            x
        }
    };
    labels.remove(h);
    let arcs = spine
        .arcs
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != arc)
        .map(|(_, &(a, b))| (remap(a), remap(b)))
        .collect();
    Ok(Spine::new(labels, arcs))
}

/// Split `{u}` off the label of `node`: a negative `u` is pulled below the
/// rest with the incoming arcs coming from components of `T ∖ U⁻` next to `u`;
/// a positive `u` is pushed above with the matching outgoing arcs.
pub fn split_node(tree: &SignedTree, spine: &Spine, node: usize, u: usize) -> Result<Spine> {
    let label = *spine
        .labels
        .get(node)
        .ok_or_else(|| Error::InvalidSpine(format!("no node {}", node)))?;
    if label.len() < 2 {
        return Err(Error::SingletonLabel);
    }
    if !label.contains(u) {
        let name = if u < tree.n() { tree.id(u).to_string() } else { u.to_string() };
        return Err(Error::VertexNotInLabel(name));
    }
    let sides = spine.sides();
    let negative = tree.is_negative(u);
    let deleted = if negative {
        label.inter(tree.negatives())
    } else {
        label.inter(tree.positives())
    };
    let near = |s: VSet| {
        let c = tree.component_of(deleted, s.first().unwrap());
        tree.neighborhood(c).contains(u)
    };
    let mut labels = spine.labels.clone();
    labels[node] = label.without(u);
    labels.push(VSet::singleton(u));
    let new = labels.len() - 1;
    let mut arcs = spine.arcs.clone();
    for (i, arc) in arcs.iter_mut().enumerate() {
        if negative && arc.1 == node && near(sides[i].0) {
            arc.1 = new;
        }
        if !negative && arc.0 == node && near(sides[i].1) {
            arc.0 = new;
        }
    }
    arcs.push(if negative { (new, node) } else { (node, new) });
    let out = Spine::new(labels, arcs);
    require_valid(tree, &out)?;
    Ok(out)
}

/// Flip an arc `u → v` of a maximal spine.
pub fn flip_arc(tree: &SignedTree, spine: &Spine, arc: usize) -> Result<Spine> {
    if !spine.is_maximal() {
        return Err(Error::NotMaximal);
    }
    let &(un, vn) = spine
        .arcs
        .get(arc)
        .ok_or_else(|| Error::UnknownArc(arc.to_string()))?;
    let u = spine.labels[un].first().unwrap();
    let v = spine.labels[vn].first().unwrap();
    let sides = spine.sides();
    let toward_v = tree.component_of(VSet::singleton(u).inter(tree.negatives()), v);
    let toward_u = tree.component_of(VSet::singleton(v).inter(tree.positives()), u);
    let i = spine
        .in_arcs(un)
        .into_iter()
        .find(|&a| sides[a].0.is_subset(toward_v));
    let o = spine
        .out_arcs(vn)
        .into_iter()
        .find(|&a| sides[a].1.is_subset(toward_u));
    let mut arcs = spine.arcs.clone();
    arcs[arc] = (vn, un);
    if let Some(i) = i {
        arcs[i].1 = vn;
    }
    if let Some(o) = o {
        arcs[o].0 = un;
    }
    Ok(Spine::new(spine.labels.clone(), arcs))
}

/// All maximal spines, by flip-graph search from the spine of the canonical
/// order; sorted by nested-set key.
pub fn enumerate_maximal_spines(tree: &SignedTree) -> Vec<Spine> {
    let seed = fan::kappa_indices(tree, &tree.standard_list());
    let mut seen: HashSet<Spine> = HashSet::from([seed.clone()]);
    let mut queue = VecDeque::from([seed]);
    while let Some(s) = queue.pop_front() {
        for a in 0..s.arcs.len() {
            let f = flip_arc(tree, &s, a).expect("maximal spine flips");
            if seen.insert(f.clone()) {
                queue.push_back(f);
            }
        }
    }
    let mut keyed: Vec<(Vec<VSet>, Spine)> = seen.into_iter().map(|s| (s.key(), s)).collect();
    keyed.sort_by(|a, b| cmp_keys(&a.0, &b.0));
    keyed.into_iter().map(|(_, s)| s).collect()
}

/// Lexicographic comparison of canonical families.
pub fn cmp_keys(a: &[VSet], b: &[VSet]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let c = x.canonical_cmp(y);
        if c.is_ne() {
            return c;
        }
    }
    a.len().cmp(&b.len())
}

/// Required degrees and blossom counts of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeBlossoms {
    pub required_in: usize,
    pub required_out: usize,
    pub in_blossoms: usize,
    pub out_blossoms: usize,
}

pub fn blossom_counts(tree: &SignedTree, spine: &Spine) -> Result<Vec<NodeBlossoms>> {
    require_valid(tree, spine)?;
    Ok((0..spine.node_count())
        .map(|x| {
            let u = spine.labels[x];
            let required_in = tree.components(u.inter(tree.negatives())).len();
            let required_out = tree.components(u.inter(tree.positives())).len();
            NodeBlossoms {
                required_in,
                required_out,
                in_blossoms: required_in - spine.in_arcs(x).len(),
                out_blossoms: required_out - spine.out_arcs(x).len(),
            }
        })
        .collect())
}

/// A directed cut given by its source-side nodes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProperCut {
    pub source_nodes: Vec<bool>,
}

impl ProperCut {
    pub fn new(spine: &Spine, source_nodes: Vec<bool>) -> Result<ProperCut> {
        if source_nodes.len() != spine.node_count() {
            return Err(Error::ImproperCut("wrong number of nodes".into()));
        }
        if spine.arcs.iter().any(|&(a, b)| !source_nodes[a] && source_nodes[b]) {
            return Err(Error::ImproperCut("an arc goes from the sink side to the source side".into()));
        }
        Ok(ProperCut { source_nodes })
    }

    /// `sc(Γ)`, the union of source-side labels.
    pub fn source_set(&self, spine: &Spine) -> VSet {
        (0..spine.node_count())
            .filter(|&x| self.source_nodes[x])
            .fold(VSet::EMPTY, |a, x| a.union(spine.labels[x]))
    }

    /// Arcs crossing the cut.
    pub fn crossing(&self, spine: &Spine) -> Vec<usize> {
        (0..spine.arcs.len())
            .filter(|&i| {
                let (a, b) = spine.arcs[i];
                self.source_nodes[a] && !self.source_nodes[b]
            })
            .collect()
    }
}

/// Components of `T ∖ (sc(Γ)⁺ ∪ sk(Γ)⁻)`.
pub fn cut_subtrees(tree: &SignedTree, spine: &Spine, cut: &ProperCut) -> Result<Vec<OpenSubtree>> {
    let cut = ProperCut::new(spine, cut.source_nodes.clone())?;
    let sc = cut.source_set(spine);
    let sk = tree.standard().minus(sc);
    let deleted = sc.inter(tree.positives()).union(sk.inter(tree.negatives()));
    Ok(tree
        .components(deleted)
        .iter()
        .map(|c| OpenSubtree {
            interior: c.vertices,
            boundary: tree.boundary(c),
        })
        .collect())
}

/// Orient each tree edge along the directed spine path between its endpoints.
pub fn tree_orientation_of_spine(tree: &SignedTree, spine: &Spine) -> Result<Vec<(usize, usize)>> {
    if !spine.is_maximal() {
        return Err(Error::NotMaximal);
    }
    if tree.has_phantoms() {
        return Err(Error::PreconditionViolated("tree orientations need a tree without phantoms".into()));
    }
    let desc = spine.descendants();
    tree.edges()
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (spine.node_of(a).unwrap(), spine.node_of(b).unwrap());
            if desc[x][y] {
                Ok((a, b))
            } else if desc[y][x] {
                Ok((b, a))
            } else {
                Err(Error::NoOrientedPath(tree.id(a).to_string(), tree.id(b).to_string()))
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpineNodeFile {
    pub id: usize,
    pub label: Vec<String>,
}

/// On-disk spine document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpineFile {
    pub nodes: Vec<SpineNodeFile>,
    pub arcs: Vec<(usize, usize)>,
}

pub fn to_file(tree: &SignedTree, spine: &Spine) -> SpineFile {
    SpineFile {
        nodes: spine
            .labels
            .iter()
            .enumerate()
            .map(|(id, &l)| SpineNodeFile { id, label: tree.labels(l) })
            .collect(),
        arcs: spine.arcs.clone(),
    }
}

pub fn from_file(tree: &SignedTree, f: &SpineFile) -> Result<Spine> {
    let mut index = HashMap::new();
    let mut labels = Vec::new();
    for (i, n) in f.nodes.iter().enumerate() {
        if index.insert(n.id, i).is_some() {
            return Err(Error::InvalidSpine(format!("duplicate node id {}", n.id)));
        }
        labels.push(tree.set_of(&n.label)?);
    }
    let arcs = f
        .arcs
        .iter()
        .map(|&(a, b)| match (index.get(&a), index.get(&b)) {
            (Some(&x), Some(&y)) => Ok((x, y)),
            _ => Err(Error::InvalidSpine(format!("arc {}->{} names an unknown node", a, b))),
        })
        .collect::<Result<Vec<_>>>()?;
    let s = Spine::new(labels, arcs);
    require_valid(tree, &s)?;
    Ok(s)
}

/// Graphviz rendering with node labels.
pub fn to_dot(tree: &SignedTree, spine: &Spine) -> String {
    let mut out = String::from("digraph spine {\n");
    for (i, &l) in spine.labels.iter().enumerate() {
        out.push_str(&format!("  n{} [label=\"{}\"];\n", i, tree.key(l)));
    }
    for &(a, b) in &spine.arcs {
        out.push_str(&format!("  n{} -> n{};\n", a, b));
    }
    out.push_str("}\n");
    out
}
