//! The spine fan: the surjection from linear orders to maximal spines, its
//! extension to ordered partitions, fibers and congruence.

use std::collections::{HashMap, HashSet};

use itertools::Itertools;
use num_rational::Ratio;
use rayon::prelude::*;

use crate::blocks::block_of_component;
use crate::error::{check_bound, Error, Result};
use crate::spine::{self, Spine};
use crate::tree::SignedTree;
use crate::vset::VSet;

/// Parse a comma-separated order of standard vertex ids.
pub fn parse_order(tree: &SignedTree, text: &str) -> Result<Vec<usize>> {
    let ids: Vec<&str> = text.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    let order = ids
        .iter()
        .map(|id| tree.standard_index(id).map_err(|_| Error::InvalidOrder(format!("unknown vertex {}", id))))
        .collect::<Result<Vec<_>>>()?;
    validate_order(tree, &order)?;
    Ok(order)
}

/// Check that `order` lists every standard vertex exactly once.
pub fn validate_order(tree: &SignedTree, order: &[usize]) -> Result<()> {
    let mut seen = VSet::EMPTY;
    for &v in order {
        if v >= tree.n() || tree.is_phantom(v) {
            return Err(Error::InvalidOrder(format!("{} is not a standard vertex", v)));
        }
        if seen.contains(v) {
            return Err(Error::InvalidOrder(format!("{} repeated", tree.id(v))));
        }
        seen.insert(v);
    }
    if seen != tree.standard() {
        return Err(Error::InvalidOrder("not every vertex is listed".into()));
    }
    Ok(())
}

pub fn validate_partition(tree: &SignedTree, parts: &[VSet]) -> Result<()> {
    let mut seen = VSet::EMPTY;
    for &p in parts {
        if p.is_empty() {
            return Err(Error::InvalidPartition("empty block".into()));
        }
        if !p.is_subset(tree.standard()) {
            return Err(Error::InvalidPartition("block contains a non-standard vertex".into()));
        }
        if !seen.is_disjoint(p) {
            return Err(Error::InvalidPartition("blocks overlap".into()));
        }
        seen = seen.union(p);
    }
    if seen != tree.standard() {
        return Err(Error::InvalidPartition("blocks do not cover the vertex set".into()));
    }
    Ok(())
}

/// Relevant blocks of the components of `T ∖ (rest⁻ ∪ prefix⁺)`.
fn live_blocks(tree: &SignedTree, prefix: VSet) -> Vec<VSet> {
    let rest = tree.standard().minus(prefix);
    let deleted = rest.inter(tree.negatives()).union(prefix.inter(tree.positives()));
    tree.components(deleted)
        .iter()
        .map(|c| block_of_component(tree, c))
        .filter(|&b| !b.is_empty() && b != tree.standard())
        .collect()
}

/// The sweep: an arc is born when its component appears and dies when it vanishes.
pub(crate) fn kappa_indices(tree: &SignedTree, order: &[usize]) -> Spine {
    let mut prefix = VSet::EMPTY;
    let mut prev: HashSet<VSet> = live_blocks(tree, prefix).into_iter().collect();
    debug_assert!(prev.is_empty());
    let mut tail: HashMap<VSet, usize> = HashMap::new();
    let mut arcs = Vec::with_capacity(order.len().saturating_sub(1));
    for &v in order {
        prefix.insert(v);
        let cur: HashSet<VSet> = live_blocks(tree, prefix).into_iter().collect();
        for b in prev.difference(&cur) {
            arcs.push((tail[b], v));
        }
        for &b in cur.difference(&prev) {
            tail.insert(b, v);
        }
        prev = cur;
    }
    Spine::from_vertex_arcs(tree.standard(), &arcs)
}

/// The maximal spine of which `order` is a linear extension.
pub fn kappa(tree: &SignedTree, order: &[usize]) -> Result<Spine> {
    validate_order(tree, order)?;
    Ok(kappa_indices(tree, order))
}

/// The spine whose cone contains the braid cone of an ordered partition:
/// the sweep of any linear extension with arcs inside a block contracted.
pub fn kappa_extended_sets(tree: &SignedTree, parts: &[VSet]) -> Result<Spine> {
    validate_partition(tree, parts)?;
    let order: Vec<usize> = parts.iter().flat_map(|p| p.iter()).collect();
    let fine = kappa_indices(tree, &order);
    let block_of = |v: usize| parts.iter().position(|p| p.contains(v)).unwrap();
    let labels = fine.labels();
    let mut cur = fine.clone();
    loop {
        let inner = cur.arcs().iter().position(|&(a, b)| {
            let (x, y) = (cur.labels()[a].first().unwrap(), cur.labels()[b].first().unwrap());
            block_of(x) == block_of(y)
        });
        match inner {
            Some(a) => cur = spine::contract_arc(&cur, a)?,
            None => break,
        }
    }
    debug_assert_eq!(labels.len(), order.len());
    Ok(cur)
}

/// Linear extensions of a maximal spine, in lexicographic order.
pub fn fiber(tree: &SignedTree, spine: &Spine) -> Result<Vec<Vec<usize>>> {
    if !spine.is_maximal() || spine.ground() != tree.standard() {
        return Err(Error::NotMaximal);
    }
    Ok(linear_extensions(spine))
}

pub(crate) fn linear_extensions(spine: &Spine) -> Vec<Vec<usize>> {
    let k = spine.node_count();
    let vertex: Vec<usize> = spine.labels().iter().map(|l| l.first().unwrap()).collect();
    let mut indeg = vec![0usize; k];
    let mut succ = vec![Vec::new(); k];
    for &(a, b) in spine.arcs() {
        indeg[b] += 1;
        succ[a].push(b);
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(
        indeg: &mut Vec<usize>,
        succ: &[Vec<usize>],
        used: &mut Vec<bool>,
        cur: &mut Vec<usize>,
        vertex: &[usize],
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == indeg.len() {
            out.push(cur.iter().map(|&x| vertex[x]).collect());
            return;
        }
        for x in 0..indeg.len() {
            if used[x] || indeg[x] != 0 {
                continue;
            }
            used[x] = true;
            cur.push(x);
            for &y in &succ[x] {
                indeg[y] -= 1;
            }
            rec(indeg, succ, used, cur, vertex, out);
            for &y in &succ[x] {
                indeg[y] += 1;
            }
            cur.pop();
            used[x] = false;
        }
    }
    let mut used = vec![false; k];
    rec(&mut indeg, &succ, &mut used, &mut cur, &vertex, &mut out);
    out
}

/// Whether two orders differing by one adjacent transposition have the same
/// spine, decided by a witness between the swapped vertices.
pub fn adjacent_congruent(tree: &SignedTree, a: &[usize], b: &[usize]) -> Result<bool> {
    validate_order(tree, a)?;
    validate_order(tree, b)?;
    let diff: Vec<usize> = (0..a.len()).filter(|&i| a[i] != b[i]).collect();
    if diff.len() != 2 || diff[1] != diff[0] + 1 || a[diff[0]] != b[diff[1]] || a[diff[1]] != b[diff[0]] {
        return Err(Error::NotAdjacent);
    }
    let k = diff[0];
    let (u, v) = (a[k], a[k + 1]);
    let pos = positions(tree, a);
    Ok(tree.between(u, v).inter(tree.standard()).iter().any(|w| {
        (tree.is_negative(w) && pos[w] > k + 1) || (tree.is_positive(w) && pos[w] < k)
    }))
}

/// `pos[v]` = position of vertex `v` in `order` (phantoms get `usize::MAX`).
pub fn positions(tree: &SignedTree, order: &[usize]) -> Vec<usize> {
    let mut pos = vec![usize::MAX; tree.n()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    pos
}

/// Orient every tree edge from its earlier endpoint to its later one.
pub fn orientation_of_order(tree: &SignedTree, order: &[usize]) -> Result<Vec<(usize, usize)>> {
    validate_order(tree, order)?;
    if tree.has_phantoms() {
        return Err(Error::PreconditionViolated("tree orientations need a tree without phantoms".into()));
    }
    let pos = positions(tree, order);
    Ok(tree
        .edges()
        .iter()
        .map(|&(a, b)| if pos[a] < pos[b] { (a, b) } else { (b, a) })
        .collect())
}

/// All orders of the standard vertices, lexicographic in vertex index.
pub fn all_orders(tree: &SignedTree) -> Vec<Vec<usize>> {
    let std = tree.standard_list();
    let k = std.len();
    std.into_iter().permutations(k).collect()
}

/// Outcome of [`fan_cover_check`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FanCertificate {
    pub cones: usize,
    pub orders: usize,
    pub fiber_sizes: Vec<usize>,
}

fn rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<Ratio<i64>>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| Ratio::from_integer(x)).collect())
        .collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != Ratio::from_integer(0)) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] != Ratio::from_integer(0) {
                let f = m[i][c] / m[r][c];
                for j in c..cols {
                    let d = m[r][j] * f;
                    m[i][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

/// Certify that the spine cones tile the braid fan: fibers partition all
/// orders, flips cross the right wall, and each cone is simplicial with the
/// source-set indicator vectors as rays.
pub fn fan_cover_check(tree: &SignedTree, max_nu: usize) -> Result<FanCertificate> {
    check_bound("fan cover check", tree.nu(), max_nu)?;
    let fail = |m: String| Err(Error::VerificationFailure(m));
    let spines = spine::enumerate_maximal_spines(tree);
    let index: HashMap<&Spine, usize> = spines.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let orders = all_orders(tree);
    let order_index: HashMap<&[usize], usize> = orders.iter().enumerate().map(|(i, o)| (o.as_slice(), i)).collect();
    let mut owner = vec![usize::MAX; orders.len()];
    let mut fiber_sizes = Vec::with_capacity(spines.len());
    let mut reps = Vec::with_capacity(spines.len());
    for (si, s) in spines.iter().enumerate() {
        let f = linear_extensions(s);
        if f.is_empty() {
            return fail(format!("empty fiber for spine {:?}", s));
        }
        for o in &f {
            let oi = order_index[o.as_slice()];
            if owner[oi] != usize::MAX {
                return fail(format!("order {:?} lies in two fibers", o));
            }
            owner[oi] = si;
        }
        fiber_sizes.push(f.len());
        reps.push(f[0].clone());
    }
    if let Some(oi) = owner.iter().position(|&o| o == usize::MAX) {
        return fail(format!("order {:?} lies in no fiber", orders[oi]));
    }
    let nu = tree.nu();
    let std = tree.standard_list();
    let sides: Vec<Vec<(VSet, VSet)>> = spines.iter().map(Spine::sides).collect();
    let bad = orders.par_iter().enumerate().find_map_any(|(oi, o)| {
        let s = kappa_indices(tree, o);
        if index.get(&s) != Some(&owner[oi]) {
            return Some(format!("kappa of {:?} is not the spine owning it", o));
        }
        // y decreases along the order; it must be Σ λ_r 1_sc(r) + c·1 with λ > 0
        let pos = positions(tree, o);
        let y = |v: usize| (nu - pos[v]) as i64;
        let mut resid: Vec<i64> = vec![0; tree.n()];
        for &v in &std {
            resid[v] = y(v);
        }
        for (r, &(a, b)) in s.arcs().iter().enumerate() {
            let (t, h) = (s.labels()[a].first().unwrap(), s.labels()[b].first().unwrap());
            let lambda = y(t) - y(h);
            if lambda <= 0 {
                return Some(format!("order {:?} is not interior to its cone", o));
            }
            for v in sides[owner[oi]][r].0.iter() {
                resid[v] -= lambda;
            }
        }
        let c = resid[std[0]];
        (!std.iter().all(|&v| resid[v] == c)).then(|| format!("order {:?} is not in the span of its rays", o))
    });
    if let Some(w) = bad {
        return fail(w);
    }
    for (si, s) in spines.iter().enumerate() {
        let mut rows: Vec<Vec<i64>> = sides[si]
            .iter()
            .map(|&(sc, _)| std.iter().map(|&v| sc.contains(v) as i64).collect())
            .collect();
        rows.push(vec![1; nu]);
        if rank(&rows) != nu {
            return fail(format!("cone of {:?} is not simplicial", s));
        }
        for (a, &(un, vn)) in s.arcs().iter().enumerate() {
            let (u, v) = (s.labels()[un].first().unwrap(), s.labels()[vn].first().unwrap());
            let f = spine::flip_arc(tree, s, a)?;
            let fi = index[&f];
            let p = positions(tree, &reps[si]);
            let q = positions(tree, &reps[fi]);
            if !(p[u] < p[v] && q[v] < q[u]) {
                return fail(format!("flip of {}->{} does not cross x_u = x_v", tree.id(u), tree.id(v)));
            }
        }
    }
    Ok(FanCertificate {
        cones: spines.len(),
        orders: orders.len(),
        fiber_sizes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::spine::{tree_orientation_of_spine, validate_spine};

    fn ord(t: &SignedTree, s: &str) -> Vec<usize> {
        parse_order(t, s).unwrap()
    }

    fn maximal(t: &SignedTree, arcs: &[(&str, &str)]) -> Spine {
        let a: Vec<(usize, usize)> = arcs
            .iter()
            .map(|&(x, y)| (t.index(x).unwrap(), t.index(y).unwrap()))
            .collect();
        Spine::from_vertex_arcs(t.standard(), &a)
    }

    #[test]
    fn kappa_examples() {
        let t = corpus::tripod_neg();
        assert_eq!(
            kappa(&t, &ord(&t, "1,2,3,4")).unwrap(),
            maximal(&t, &[("1", "2"), ("2", "3"), ("3", "4")])
        );
        assert_eq!(
            kappa(&t, &ord(&t, "1,3,4,2")).unwrap(),
            maximal(&t, &[("1", "2"), ("3", "2"), ("4", "2")])
        );
        assert_eq!(
            kappa(&t, &ord(&t, "1,3,2,4")).unwrap(),
            maximal(&t, &[("1", "2"), ("3", "2"), ("2", "4")])
        );
        assert!(matches!(parse_order(&t, "1,2,3"), Err(Error::InvalidOrder(_))));
        assert!(matches!(parse_order(&t, "1,2,3,3"), Err(Error::InvalidOrder(_))));
    }

    #[test]
    fn kappa_output_is_valid_and_extends_the_order() {
        for t in corpus::all_signed_trees(5) {
            for o in all_orders(&t) {
                let s = kappa(&t, &o).unwrap();
                assert!(validate_spine(&t, &s).is_ok(), "{:?} {:?}", t, o);
                let pos = positions(&t, &o);
                for &(a, b) in s.arcs() {
                    let (x, y) = (s.labels()[a].first().unwrap(), s.labels()[b].first().unwrap());
                    assert!(pos[x] < pos[y]);
                }
            }
        }
    }

    #[test]
    fn kappa_works_on_phantom_trees() {
        let t = corpus::spider7().with_phantoms(VSet::from_indices([0, 3]));
        for o in all_orders(&t) {
            let s = kappa(&t, &o).unwrap();
            assert!(validate_spine(&t, &s).is_ok());
        }
    }

    #[test]
    fn extended_examples() {
        let t = corpus::tripod_neg();
        let one = kappa_extended_sets(&t, &[t.standard()]).unwrap();
        assert_eq!(one, Spine::single(t.standard()));
        let s = kappa_extended_sets(&t, &[t.set_of(&["1", "3"]).unwrap(), t.set_of(&["2", "4"]).unwrap()]).unwrap();
        let nested = [t.set_of(&["1"]).unwrap(), t.set_of(&["3"]).unwrap()];
        assert_eq!(s, spine::spine_of_nested_set(&t, &nested).unwrap());
        let p = corpus::tripod_pos();
        let s = kappa_extended_sets(&p, &[p.set_of(&["2"]).unwrap(), p.set_of(&["1", "3", "4"]).unwrap()]).unwrap();
        assert_eq!(s.node_count(), 4);
        let src = s.node_of(1).unwrap();
        assert_eq!(s.out_arcs(src).len(), 3);
        assert!(matches!(
            kappa_extended_sets(&t, &[t.set_of(&["1", "3"]).unwrap()]),
            Err(Error::InvalidPartition(_))
        ));
    }

    #[test]
    fn extended_agrees_with_kappa_and_coarsens() {
        for t in corpus::all_signed_trees(4) {
            for o in all_orders(&t) {
                let fine: Vec<VSet> = o.iter().map(|&v| VSet::singleton(v)).collect();
                let s = kappa_extended_sets(&t, &fine).unwrap();
                assert_eq!(s, kappa(&t, &o).unwrap());
                // merge consecutive pairs of blocks
                for cut in 0..o.len().saturating_sub(1) {
                    let mut coarse = fine.clone();
                    let merged = coarse[cut].union(coarse[cut + 1]);
                    coarse.splice(cut..cut + 2, [merged]);
                    let c = kappa_extended_sets(&t, &coarse).unwrap();
                    assert!(validate_spine(&t, &c).is_ok());
                    assert!(c.key().iter().all(|b| s.key().contains(b)));
                }
            }
        }
    }

    #[test]
    fn fiber_examples() {
        let t = corpus::tripod_neg();
        let path = maximal(&t, &[("1", "2"), ("2", "3"), ("3", "4")]);
        assert_eq!(fiber(&t, &path).unwrap(), vec![ord(&t, "1,2,3,4")]);
        let star = maximal(&t, &[("1", "2"), ("3", "2"), ("4", "2")]);
        let f = fiber(&t, &star).unwrap();
        assert_eq!(f.len(), 6);
        assert!(f.iter().all(|o| o[3] == 1));
        let total: usize = spine::enumerate_maximal_spines(&t)
            .iter()
            .map(|s| fiber(&t, s).unwrap().len())
            .sum();
        assert_eq!(total, 24);
        assert_eq!(fiber(&t, &Spine::single(t.standard())), Err(Error::NotMaximal));
    }

    #[test]
    fn adjacent_congruence_examples() {
        let p = corpus::path4_neg();
        assert!(!adjacent_congruent(&p, &ord(&p, "2,1,3,4"), &ord(&p, "2,3,1,4")).unwrap());
        let t = corpus::tripod_neg();
        assert!(adjacent_congruent(&t, &ord(&t, "1,3,2,4"), &ord(&t, "3,1,2,4")).unwrap());
        assert_eq!(
            adjacent_congruent(&t, &ord(&t, "1,3,2,4"), &ord(&t, "2,3,1,4")),
            Err(Error::NotAdjacent)
        );
    }

    #[test]
    fn witness_rule_agrees_with_kappa() {
        for t in corpus::all_signed_trees(5) {
            for o in all_orders(&t) {
                let k = kappa(&t, &o).unwrap();
                for i in 0..o.len().saturating_sub(1) {
                    let mut q = o.clone();
                    q.swap(i, i + 1);
                    let same = kappa(&t, &q).unwrap() == k;
                    assert_eq!(adjacent_congruent(&t, &o, &q).unwrap(), same, "{:?} {:?}", t, o);
                }
            }
        }
    }

    #[test]
    fn fibers_are_connected_by_adjacent_transpositions() {
        for t in [corpus::tripod_pos(), corpus::htree_diff(), corpus::p3mix()] {
            for s in spine::enumerate_maximal_spines(&t) {
                let f = fiber(&t, &s).unwrap();
                let members: HashSet<Vec<usize>> = f.iter().cloned().collect();
                let mut seen = HashSet::from([f[0].clone()]);
                let mut stack = vec![f[0].clone()];
                while let Some(o) = stack.pop() {
                    for i in 0..o.len() - 1 {
                        let mut q = o.clone();
                        q.swap(i, i + 1);
                        if adjacent_congruent(&t, &o, &q).unwrap() && seen.insert(q.clone()) {
                            assert!(members.contains(&q));
                            stack.push(q);
                        }
                    }
                }
                assert_eq!(seen.len(), f.len());
            }
        }
    }

    #[test]
    fn orientation_examples() {
        let p = corpus::path4_neg();
        assert_eq!(orientation_of_order(&p, &ord(&p, "1,2,3,4")).unwrap(), vec![(0, 1), (1, 2), (2, 3)]);
        let t = corpus::tripod_neg();
        let o = orientation_of_order(&t, &ord(&t, "1,3,4,2")).unwrap();
        assert!(o.iter().all(|&(_, b)| b == 1));
    }

    #[test]
    fn lambda_of_kappa_is_mu() {
        for t in corpus::all_signed_trees(5) {
            for o in all_orders(&t) {
                let s = kappa(&t, &o).unwrap();
                assert_eq!(tree_orientation_of_spine(&t, &s).unwrap(), orientation_of_order(&t, &o).unwrap());
            }
        }
    }

    /// Insert `order` reversed into a binary search tree; arcs child -> parent.
    fn bst_arcs(order: &[usize]) -> Vec<(usize, usize)> {
        let mut left = HashMap::new();
        let mut right = HashMap::new();
        let mut arcs = Vec::new();
        let mut it = order.iter().rev();
        let root = *it.next().unwrap();
        for &x in it {
            let mut cur = root;
            loop {
                let side = if x < cur { &mut left } else { &mut right };
                match side.get(&cur) {
                    Some(&next) => cur = next,
                    None => {
                        side.insert(cur, x);
                        arcs.push((x, cur));
                        break;
                    }
                }
            }
        }
        arcs
    }

    #[test]
    fn negative_path_gives_binary_search_trees() {
        for n in 1..=6 {
            let p = corpus::path_neg(n);
            for o in all_orders(&p) {
                let expect = Spine::from_vertex_arcs(p.standard(), &bst_arcs(&o));
                assert_eq!(kappa(&p, &o).unwrap(), expect);
            }
        }
    }

    #[test]
    fn fan_cover_examples() {
        let c = fan_cover_check(&corpus::tripod_neg(), 8).unwrap();
        assert_eq!(c.cones, 16);
        assert_eq!(c.fiber_sizes.iter().sum::<usize>(), 24);
        assert!(fan_cover_check(&corpus::tripod_pos(), 8).is_ok());
        assert_eq!(fan_cover_check(&corpus::path4_neg(), 8).unwrap().cones, 14);
        assert!(matches!(
            fan_cover_check(&corpus::spider7(), 6),
            Err(Error::BoundExceeded { .. })
        ));
    }
}
