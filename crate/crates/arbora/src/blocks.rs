//! Building blocks, signed tubes, open subtrees and compatibility.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::tree::{Component, SignedTree};
use crate::vset::{sort_canonical, VSet};

/// Outcome of the two convexity tests.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockVerdict {
    Block,
    /// A negative vertex `witness` lies between members `a` and `b`.
    NotNegativeConvex { a: usize, b: usize, witness: usize },
    /// A positive member `witness` lies between non-members `a` and `b`.
    ComplementNotPositiveConvex { a: usize, b: usize, witness: usize },
}

impl BlockVerdict {
    pub fn is_block(self) -> bool {
        self == BlockVerdict::Block
    }
}

fn verdict(tree: &SignedTree, set: VSet) -> BlockVerdict {
    let neg = tree.negatives();
    let pos = tree.positives();
    let members: Vec<usize> = set.iter().collect();
    for (i, &a) in members.iter().enumerate() {
        for &b in &members[i + 1..] {
            let bad = tree.between(a, b).inter(neg).minus(set);
            if let Some(w) = bad.first() {
                return BlockVerdict::NotNegativeConvex { a, b, witness: w };
            }
        }
    }
    let rest: Vec<usize> = tree.standard().minus(set).iter().collect();
    for (i, &a) in rest.iter().enumerate() {
        for &b in &rest[i + 1..] {
            let bad = tree.between(a, b).inter(pos).inter(set);
            if let Some(w) = bad.first() {
                return BlockVerdict::ComplementNotPositiveConvex { a, b, witness: w };
            }
        }
    }
    BlockVerdict::Block
}

/// Check both convexity conditions for a set of standard vertices.
pub fn is_building_block(tree: &SignedTree, set: VSet) -> Result<BlockVerdict> {
    if let Some(v) = set.minus(tree.standard()).first() {
        return Err(Error::UnknownVertex(tree.id(v).0.clone()));
    }
    Ok(verdict(tree, set))
}

pub fn is_block(tree: &SignedTree, set: VSet) -> bool {
    set.is_subset(tree.standard()) && verdict(tree, set).is_block()
}

pub fn is_relevant(tree: &SignedTree, set: VSet) -> bool {
    !set.is_empty() && set != tree.standard() && is_block(tree, set)
}

pub(crate) fn require_relevant(tree: &SignedTree, set: VSet) -> Result<()> {
    match is_building_block(tree, set)? {
        BlockVerdict::Block if set.is_empty() || set == tree.standard() => Err(Error::IrrelevantBlock),
        BlockVerdict::Block => Ok(()),
        v => Err(Error::NotABuildingBlock(describe(tree, set, v))),
    }
}

fn describe(tree: &SignedTree, set: VSet, v: BlockVerdict) -> String {
    let id = |x: usize| tree.id(x).to_string();
    match v {
        BlockVerdict::Block => format!("{{{}}} is a block", tree.key(set)),
        BlockVerdict::NotNegativeConvex { a, b, witness } => format!(
            "{{{}}} is not negative convex: {} lies between {} and {}",
            tree.key(set),
            id(witness),
            id(a),
            id(b)
        ),
        BlockVerdict::ComplementNotPositiveConvex { a, b, witness } => format!(
            "complement of {{{}}} is not positive convex: {} lies between {} and {}",
            tree.key(set),
            id(witness),
            id(a),
            id(b)
        ),
    }
}

/// All relevant blocks in canonical order (size, then lexicographic).
pub fn enumerate_blocks(tree: &SignedTree) -> Vec<VSet> {
    let all = tree.standard();
    let mut out: Vec<VSet> = all
        .subsets()
        .filter(|&s| !s.is_empty() && s != all && verdict(tree, s).is_block())
        .collect();
    sort_canonical(&mut out);
    out
}

/// The relevant blocks of a tree with constant-time membership.
#[derive(Clone, Debug)]
pub struct BuildingSet {
    pub blocks: Vec<VSet>,
    lookup: HashSet<VSet>,
    all: VSet,
}

impl BuildingSet {
    pub fn new(tree: &SignedTree) -> BuildingSet {
        let blocks = enumerate_blocks(tree);
        let lookup = blocks.iter().copied().collect();
        BuildingSet {
            blocks,
            lookup,
            all: tree.standard(),
        }
    }

    pub fn ground(&self) -> VSet {
        self.all
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_relevant(&self, s: VSet) -> bool {
        self.lookup.contains(&s)
    }

    /// Membership in the full building set, `∅` and `V` included.
    pub fn contains(&self, s: VSet) -> bool {
        s.is_empty() || s == self.all || self.lookup.contains(&s)
    }

    pub fn compatibility(&self, a: VSet, b: VSet) -> Compatibility {
        if a.is_subset(b) {
            Compatibility::NegNested
        } else if b.is_subset(a) {
            Compatibility::PosNested
        } else if a.is_disjoint(b) && !self.contains(a.union(b)) {
            Compatibility::NegDisjoint
        } else if a.union(b) == self.all && !self.contains(a.inter(b)) {
            Compatibility::PosDisjoint
        } else {
            Compatibility::Incompatible
        }
    }

    pub fn compatible(&self, a: VSet, b: VSet) -> bool {
        self.compatibility(a, b) != Compatibility::Incompatible
    }

    /// Whether a family of relevant blocks is pairwise compatible.
    pub fn is_nested(&self, family: &[VSet]) -> bool {
        family.iter().all(|&b| self.is_relevant(b))
            && family
                .iter()
                .enumerate()
                .all(|(i, &a)| family[i + 1..].iter().all(|&b| a != b && self.compatible(a, b)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Compatibility {
    NegNested,
    PosNested,
    NegDisjoint,
    PosDisjoint,
    Incompatible,
}

pub fn compatibility(tree: &SignedTree, a: VSet, b: VSet) -> Result<Compatibility> {
    require_relevant(tree, a)?;
    require_relevant(tree, b)?;
    if a == b {
        return Err(Error::PreconditionViolated("blocks must be distinct".into()));
    }
    let in_b = |s: VSet| s.is_empty() || s == tree.standard() || is_block(tree, s);
    Ok(if a.is_subset(b) {
        Compatibility::NegNested
    } else if b.is_subset(a) {
        Compatibility::PosNested
    } else if a.is_disjoint(b) && !in_b(a.union(b)) {
        Compatibility::NegDisjoint
    } else if a.union(b) == tree.standard() && !in_b(a.inter(b)) {
        Compatibility::PosDisjoint
    } else {
        Compatibility::Incompatible
    })
}

/// A pair of open subtrees, given by vertex sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedTube {
    pub w_minus: VSet,
    pub w_plus: VSet,
}

/// Interior and boundary of an open subtree; an empty interior is an open edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OpenSubtree {
    pub interior: VSet,
    pub boundary: VSet,
}

pub fn tube_of_block(tree: &SignedTree, block: VSet) -> Result<SignedTube> {
    require_relevant(tree, block)?;
    let rest = tree.standard().minus(block);
    let w_minus = tree.component_of(tree.negatives().minus(block), block.first().unwrap());
    let w_plus = tree.component_of(tree.positives().inter(block), rest.first().unwrap());
    debug_assert!(block.is_subset(w_minus) && rest.is_subset(w_plus));
    Ok(SignedTube { w_minus, w_plus })
}

fn validate_tube(tree: &SignedTree, t: &SignedTube) -> Result<()> {
    let bad = |m: &str| Err(Error::InvalidTube(m.to_string()));
    if !tree.is_connected(t.w_minus) || !tree.is_connected(t.w_plus) {
        return bad("tube parts must be nonempty connected vertex sets");
    }
    let dm = tree.neighborhood(t.w_minus).minus(t.w_minus);
    let dp = tree.neighborhood(t.w_plus).minus(t.w_plus);
    if !dm.is_subset(tree.negatives().inter(t.w_plus)) {
        return bad("boundary of W- must be negative and inside W+");
    }
    if !dp.is_subset(tree.positives().inter(t.w_minus)) {
        return bad("boundary of W+ must be positive and inside W-");
    }
    if !tree.standard().is_subset(t.w_minus.union(t.w_plus)) {
        return bad("W- and W+ must cover the vertex set");
    }
    Ok(())
}

/// `b(W) = (V⁻ ∩ W⁻) ∪ (V⁺ ∖ W⁺)`.
pub fn block_of_tube(tree: &SignedTree, tube: &SignedTube) -> Result<VSet> {
    validate_tube(tree, tube)?;
    Ok(tree
        .negatives()
        .inter(tube.w_minus)
        .union(tree.positives().minus(tube.w_plus)))
}

/// `z(W) = W⁻ ∩ W⁺` with boundary `∂W⁻ ∪ ∂W⁺`.
pub fn subtree_of_tube(tree: &SignedTree, tube: &SignedTube) -> Result<OpenSubtree> {
    validate_tube(tree, tube)?;
    let dm = tree.neighborhood(tube.w_minus).minus(tube.w_minus);
    let dp = tree.neighborhood(tube.w_plus).minus(tube.w_plus);
    Ok(OpenSubtree {
        interior: tube.w_minus.inter(tube.w_plus),
        boundary: dm.union(dp),
    })
}

/// The block of a component of `T ∖ D`: extend it across the positive part of
/// its boundary to get `W⁻` and across the negative part to get `W⁺`.
pub fn block_of_component(tree: &SignedTree, c: &Component) -> VSet {
    let bd = tree.boundary(c);
    let grow = |cut: VSet| -> VSet {
        match c.open_edge {
            None => tree.component_of(cut, c.vertices.first().expect("nonempty component")),
            Some((a, b)) => {
                if !cut.contains(a) {
                    tree.component_of(cut, a)
                } else if !cut.contains(b) {
                    tree.component_of(cut, b)
                } else {
                    VSet::EMPTY
                }
            }
        }
    };
    let w_minus = grow(bd.inter(tree.negatives()));
    let w_plus = grow(bd.inter(tree.positives()));
    tree.negatives()
        .inter(w_minus)
        .union(tree.positives().minus(w_plus))
}

/// The two sides of an edge, in canonical order.
pub fn edge_blocks(tree: &SignedTree, u: usize, v: usize) -> Result<(VSet, VSet)> {
    if u >= tree.n() || v >= tree.n() || !tree.is_edge(u, v) {
        let name = |x: usize| tree.ids().get(x).map(|i| i.to_string()).unwrap_or_else(|| x.to_string());
        return Err(Error::UnknownEdge(name(u), name(v)));
    }
    let a = tree.component_of(VSet::singleton(v), u).inter(tree.standard());
    let b = tree.standard().minus(a);
    if a.is_empty() || b.is_empty() {
        return Err(Error::IrrelevantBlock);
    }
    Ok(if a.canonical_cmp(&b).is_le() { (a, b) } else { (b, a) })
}
