//! Named test trees and exhaustive small-tree corpora.

use std::collections::BTreeSet;

use crate::tree::{build_tree, Sign, SignedTree, VertexSpec};
use crate::vset::VSet;

fn make(signs: &str, edges: &[(usize, usize)]) -> SignedTree {
    let vs = signs
        .chars()
        .enumerate()
        .map(|(i, c)| VertexSpec {
            id: (i + 1).to_string().into(),
            sign: if c == '+' { Sign::Positive } else { Sign::Negative },
            phantom: c == '*',
        })
        .collect();
    let es = edges
        .iter()
        .map(|&(a, b)| (a.to_string().into(), b.to_string().into()))
        .collect();
    build_tree(vs, es).expect("corpus tree is valid")
}

/// Tree on vertices `1..=signs.len()` with the given sign string (`-`, `+`, `*` for phantom).
pub fn from_signs(signs: &str, edges: &[(usize, usize)]) -> SignedTree {
    make(signs, edges)
}

pub fn tripod_neg() -> SignedTree {
    make("----", &[(2, 1), (2, 3), (2, 4)])
}

pub fn tripod_pos() -> SignedTree {
    make("-+--", &[(2, 1), (2, 3), (2, 4)])
}

pub fn path4_neg() -> SignedTree {
    path_neg(4)
}

pub fn path_neg(n: usize) -> SignedTree {
    let edges: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
    make(&"-".repeat(n), &edges)
}

pub fn p3mix() -> SignedTree {
    make("-+-", &[(1, 2), (2, 3)])
}

const HTREE_EDGES: [(usize, usize); 5] = [(3, 4), (3, 1), (3, 2), (4, 5), (4, 6)];

pub fn htree_eq() -> SignedTree {
    make("------", &HTREE_EDGES)
}

pub fn htree_diff() -> SignedTree {
    make("---+--", &HTREE_EDGES)
}

/// The tripod with every edge subdivided once.
pub fn spider7() -> SignedTree {
    make("-------", &[(1, 2), (2, 3), (1, 4), (4, 5), (1, 6), (6, 7)])
}

/// Named trees as `(name, tree)`.
pub fn named() -> Vec<(&'static str, SignedTree)> {
    vec![
        ("TRIPOD_NEG", tripod_neg()),
        ("TRIPOD_POS", tripod_pos()),
        ("PATH4_NEG", path4_neg()),
        ("P3MIX", p3mix()),
        ("HTREE_EQ", htree_eq()),
        ("HTREE_DIFF", htree_diff()),
        ("SPIDER7", spider7()),
    ]
}

/// Canonical string of an unrooted tree on `0..n` (rooted at its center).
pub fn canonical_form(n: usize, edges: &[(usize, usize)]) -> String {
    labeled_canonical_form(n, edges, &vec!['.'; n])
}

/// Canonical string of a vertex-labeled unrooted tree on `0..n`.
pub fn labeled_canonical_form(n: usize, edges: &[(usize, usize)], labels: &[char]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            for &w in &adj[v] {
                deg[w] -= 1;
                if deg[w] == 1 {
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    fn encode(v: usize, parent: usize, adj: &[Vec<usize>], labels: &[char]) -> String {
        let mut kids: Vec<String> = adj[v]
            .iter()
            .filter(|&&w| w != parent)
            .map(|&w| encode(w, v, adj, labels))
            .collect();
        kids.sort();
        format!("{}({})", labels[v], kids.concat())
    }
    layer.iter().map(|&c| encode(c, usize::MAX, &adj, labels)).min().unwrap_or_default()
}

/// One representative edge list (on `0..n`) per isomorphism class of trees with `n` vertices.
pub fn unlabeled_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n <= 1 {
        return vec![Vec::new()];
    }
    if n == 2 {
        return vec![vec![(0, 1)]];
    }
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut seq = vec![0usize; n - 2];
    loop {
        let edges = prufer_decode(n, &seq);
        if seen.insert(canonical_form(n, &edges)) {
            out.push(edges);
        }
        let mut i = 0;
        loop {
            if i == seq.len() {
                return out;
            }
            seq[i] += 1;
            if seq[i] < n {
                break;
            }
            seq[i] = 0;
            i += 1;
        }
    }
}

fn prufer_decode(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("leaf exists");
        edges.push((leaf.min(x), leaf.max(x)));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let last: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((last[0], last[1]));
    edges
}

/// Every signature of `base` (an unsigned shape).
pub fn all_signatures(base: &SignedTree) -> Vec<SignedTree> {
    let std = base.standard();
    std.subsets().map(|neg| base.with_signs(std.minus(neg))).collect()
}

/// Every signature of every tree shape with `1 ..= max_nu` vertices.
pub fn all_signed_trees(max_nu: usize) -> Vec<SignedTree> {
    let mut out = Vec::new();
    for n in 1..=max_nu {
        for edges in unlabeled_trees(n) {
            let shifted: Vec<(usize, usize)> = edges.iter().map(|&(a, b)| (a + 1, b + 1)).collect();
            let base = make(&"-".repeat(n), &shifted);
            out.extend(all_signatures(&base));
        }
    }
    out
}

/// Whether the tree is a path (all degrees at most 2).
pub fn is_path(tree: &SignedTree) -> bool {
    (0..tree.n()).all(|v| tree.degree(v) <= 2)
}

/// Leaves of the tree (degree at most one).
pub fn leaves(tree: &SignedTree) -> VSet {
    (0..tree.n()).filter(|&v| tree.degree(v) <= 1).collect()
}
