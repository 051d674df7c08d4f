//! The signed nested complex: faces, facets, f-vectors, links and the
//! pseudo-manifold property.

use std::collections::HashMap;

use crate::blocks::{self, BuildingSet};
use crate::error::Result;
use crate::spine;
use crate::tree::{phantom_split, SignedTree};
use crate::vset::{sort_canonical, VSet};

/// A pairwise compatible family of relevant blocks, in canonical order.
pub type NestedSet = Vec<VSet>;

struct Compat {
    words: usize,
    rows: Vec<Vec<u64>>,
}

impl Compat {
    fn new(bs: &BuildingSet) -> Compat {
        let m = bs.len();
        let words = m.div_ceil(64).max(1);
        let mut rows = vec![vec![0u64; words]; m];
        for i in 0..m {
            for j in 0..m {
                if i != j && bs.compatible(bs.blocks[i], bs.blocks[j]) {
                    rows[i][j / 64] |= 1 << (j % 64);
                }
            }
        }
        Compat { words, rows }
    }

    /// Candidates above `i` compatible with `i` and already in `cand`.
    fn narrow(&self, cand: &[u64], i: usize) -> Vec<u64> {
        (0..self.words)
            .map(|w| {
                let above = if w < i / 64 {
                    0
                } else if w == i / 64 {
                    u64::MAX.checked_shl((i % 64 + 1) as u32).unwrap_or(0)
                } else {
                    u64::MAX
                };
                cand[w] & self.rows[i][w] & above
            })
            .collect()
    }
}

fn ones(bits: &[u64]) -> impl Iterator<Item = usize> + '_ {
    bits.iter().enumerate().flat_map(|(w, &x)| {
        let mut x = x;
        std::iter::from_fn(move || {
            if x == 0 {
                return None;
            }
            let b = x.trailing_zeros() as usize;
            x &= x - 1;
            Some(w * 64 + b)
        })
    })
}

fn cliques(bs: &BuildingSet, visit: &mut dyn FnMut(&[usize])) {
    let c = Compat::new(bs);
    let m = bs.len();
    let mut all = vec![0u64; c.words];
    for i in 0..m {
        all[i / 64] |= 1 << (i % 64);
    }
    fn rec(c: &Compat, cand: &[u64], cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        visit(cur);
        for i in ones(cand).collect::<Vec<_>>() {
            cur.push(i);
            let next = c.narrow(cand, i);
            rec(c, &next, cur, visit);
            cur.pop();
        }
    }
    rec(&c, &all, &mut Vec::new(), visit);
}

/// Every nested set, the empty one included, by clique enumeration.
pub fn all_faces(bs: &BuildingSet) -> Vec<NestedSet> {
    let mut out = Vec::new();
    cliques(bs, &mut |idx| {
        let mut f: Vec<VSet> = idx.iter().map(|&i| bs.blocks[i]).collect();
        sort_canonical(&mut f);
        out.push(f);
    });
    out
}

/// Face counts by cardinality, from clique enumeration.
pub fn clique_f_vector(bs: &BuildingSet) -> Vec<u64> {
    let mut f = vec![0u64; 1];
    cliques(bs, &mut |idx| {
        if f.len() <= idx.len() {
            f.resize(idx.len() + 1, 0);
        }
        f[idx.len()] += 1;
    });
    f
}

/// Facets (`max_only`) via the flip graph, or all faces via clique enumeration.
pub fn enumerate_nested_sets(tree: &SignedTree, max_only: bool) -> Vec<NestedSet> {
    if max_only {
        spine::enumerate_maximal_spines(tree).iter().map(|s| s.key()).collect()
    } else {
        let mut faces = all_faces(&BuildingSet::new(tree));
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| spine::cmp_keys(a, b)));
        faces
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexStats {
    /// Face counts by cardinality `0 ..= ν-1`.
    pub f_complex: Vec<u64>,
    /// Sorted numbers of facets containing each block.
    pub incidence_profile: Vec<usize>,
}

pub fn complex_stats(tree: &SignedTree) -> ComplexStats {
    let bs = BuildingSet::new(tree);
    let mut f = clique_f_vector(&bs);
    f.resize(tree.nu().max(1), 0);
    let facets = enumerate_nested_sets(tree, true);
    ComplexStats {
        f_complex: f,
        incidence_profile: incidence_profile(&bs, &facets),
    }
}

pub fn incidence_profile(bs: &BuildingSet, facets: &[NestedSet]) -> Vec<usize> {
    let mut count: HashMap<VSet, usize> = bs.blocks.iter().map(|&b| (b, 0)).collect();
    for f in facets {
        for b in f {
            *count.get_mut(b).expect("facet blocks are relevant") += 1;
        }
    }
    let mut v: Vec<usize> = count.into_values().collect();
    v.sort_unstable();
    v
}

/// The two phantom trees whose complexes join to the link of `block`.
pub fn link_split(tree: &SignedTree, block: VSet) -> Result<(SignedTree, SignedTree)> {
    phantom_split(tree, block)
}

/// f-vector of the link of a block, by enumeration inside the complex.
pub fn link_f_vector(tree: &SignedTree, block: VSet) -> Result<Vec<u64>> {
    blocks::require_relevant(tree, block)?;
    let bs = BuildingSet::new(tree);
    let mut f = vec![0u64; 1];
    for face in all_faces(&bs) {
        if face.contains(&block) {
            let k = face.len() - 1;
            if f.len() <= k {
                f.resize(k + 1, 0);
            }
            f[k] += 1;
        }
    }
    Ok(f)
}

/// f-vector of a join: the convolution of the factors.
pub fn join_f_vector(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `Ok` if every ridge lies in exactly two facets, otherwise the first bad ridge.
pub fn is_pseudomanifold(tree: &SignedTree) -> std::result::Result<(), NestedSet> {
    let facets = enumerate_nested_sets(tree, true);
    let mut ridges: HashMap<Vec<VSet>, usize> = HashMap::new();
    let mut order = Vec::new();
    for f in &facets {
        for skip in 0..f.len() {
            let r: Vec<VSet> = f.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &b)| b).collect();
            let e = ridges.entry(r.clone()).or_insert(0);
            if *e == 0 {
                order.push(r);
            }
            *e += 1;
        }
    }
    match order.into_iter().find(|r| ridges[r] != 2) {
        Some(r) => Err(r),
        None => Ok(()),
    }
}

/// Euler characteristic of the complex as a topological space:
/// `Σ_{k≥1} (-1)^(k-1) f_k`.
pub fn euler_characteristic(f: &[u64]) -> i64 {
    f.iter()
        .enumerate()
        .skip(1)
        .map(|(k, &x)| if k % 2 == 1 { x as i64 } else { -(x as i64) })
        .sum()
}
