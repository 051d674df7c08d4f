//! Vertex and facet descriptions of the signed tree associahedron, its
//! realization certificate, and the permutahedron and parallelotope around it.

use std::collections::HashMap;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::blocks::{self, BuildingSet};
use crate::error::{check_bound, Error, Result};
use crate::spine::{self, validate_spine, Spine};
use crate::tree::{boundary_neighbors, signed_isomorphism, IsoMode, SignedTree};
use crate::vset::VSet;

/// Integer coordinates indexed by vertex; phantom entries stay zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LatticePoint(pub Vec<i64>);

impl LatticePoint {
    pub fn get(&self, v: usize) -> i64 {
        self.0[v]
    }

    pub fn sum_over(&self, s: VSet) -> i64 {
        s.iter().map(|v| self.0[v]).sum()
    }

    /// Coordinates of the standard vertices in canonical order.
    pub fn standard_coords(&self, tree: &SignedTree) -> Vec<i64> {
        tree.standard().iter().map(|v| self.0[v]).collect()
    }
}

/// `Σ_{u ∈ support} x_u ≥ rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HalfSpace {
    pub support: VSet,
    pub rhs: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    Pass,
    Fail(String),
}

impl Certificate {
    pub fn is_pass(&self) -> bool {
        *self == Certificate::Pass
    }

    pub fn label(&self) -> &'static str {
        match self {
            Certificate::Pass => "PASS",
            Certificate::Fail(_) => "FAIL",
        }
    }
}

#[derive(Clone, Debug)]
pub struct PolytopeDescription {
    pub vertices: Vec<(Spine, LatticePoint)>,
    pub facets: Vec<(VSet, HalfSpace)>,
    pub certificate: Certificate,
}

pub fn binom2(k: usize) -> i64 {
    (k * (k + 1) / 2) as i64
}

/// `a(S)`: for each vertex, the number of spine paths through it that avoid
/// its distinguished arc (complemented to `ν+1` on positive vertices).
pub fn vertex_point(tree: &SignedTree, spine: &Spine) -> Result<LatticePoint> {
    if !spine.is_maximal() {
        return Err(Error::NotMaximal);
    }
    let sides = spine.sides();
    let nu = tree.nu() as i64;
    let mut coords = vec![0i64; tree.n()];
    for (x, label) in spine.labels().iter().enumerate() {
        let v = label.first().unwrap();
        let ins = spine.in_arcs(x);
        let outs = spine.out_arcs(x);
        let negative = tree.is_negative(v);
        let special = if negative { &outs } else { &ins };
        if special.len() > 1 {
            return Err(Error::InvalidSpine(format!("vertex {} has two distinguished arcs", tree.id(v))));
        }
        let branches = ins
            .iter()
            .filter(|a| !special.contains(a))
            .map(|&a| sides[a].0.len() as i64)
            .chain(outs.iter().filter(|a| !special.contains(a)).map(|&a| sides[a].1.len() as i64));
        let (mut s, mut sq) = (0i64, 0i64);
        for b in branches {
            s += b;
            sq += b * b;
        }
        let count = 1 + s + (s * s - sq) / 2;
        coords[v] = if negative { count } else { nu + 1 - count };
    }
    Ok(LatticePoint(coords))
}

/// `p(σ)`: the `i`-th vertex of the order gets coordinate `i`.
pub fn perm_point(tree: &SignedTree, order: &[usize]) -> LatticePoint {
    let mut coords = vec![0i64; tree.n()];
    for (i, &v) in order.iter().enumerate() {
        coords[v] = i as i64 + 1;
    }
    LatticePoint(coords)
}

pub fn realize_polytope(tree: &SignedTree, max_nu: usize) -> Result<PolytopeDescription> {
    check_bound("polytope realization", tree.nu(), max_nu)?;
    let spines = spine::enumerate_maximal_spines(tree);
    let points = spines
        .iter()
        .map(|s| vertex_point(tree, s))
        .collect::<Result<Vec<_>>>()?;
    let bs = BuildingSet::new(tree);
    let certificate = verify_points(tree, &bs, &spines, &points);
    Ok(PolytopeDescription {
        vertices: spines.into_iter().zip(points).collect(),
        facets: bs
            .blocks
            .iter()
            .map(|&b| (b, HalfSpace { support: b, rhs: binom2(b.len()) }))
            .collect(),
        certificate,
    })
}

/// Check the vertex data against the facet data: total sum, tightness on the
/// spine's own blocks, strictness elsewhere, and flip directions.
pub fn verify_realization(tree: &SignedTree) -> Certificate {
    let spines = spine::enumerate_maximal_spines(tree);
    let points = match spines.iter().map(|s| vertex_point(tree, s)).collect::<Result<Vec<_>>>() {
        Ok(p) => p,
        Err(e) => return Certificate::Fail(e.to_string()),
    };
    verify_points(tree, &BuildingSet::new(tree), &spines, &points)
}

fn verify_points(tree: &SignedTree, bs: &BuildingSet, spines: &[Spine], points: &[LatticePoint]) -> Certificate {
    let index: HashMap<&Spine, usize> = spines.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let total = binom2(tree.nu());
    let failure = (0..spines.len()).into_par_iter().find_map_first(|i| {
        let s = &spines[i];
        let p = &points[i];
        if p.sum_over(tree.standard()) != total {
            return Some(format!("spine {}: coordinates do not sum to {}", i, total));
        }
        let key = s.key();
        for &b in &bs.blocks {
            let lhs = p.sum_over(b);
            let rhs = binom2(b.len());
            let tight = key.contains(&b);
            if tight && lhs != rhs {
                return Some(format!("spine {}: block {{{}}} is not tight", i, tree.key(b)));
            }
            if !tight && lhs <= rhs {
                return Some(format!("spine {}: block {{{}}} is not strict", i, tree.key(b)));
            }
        }
        for (a, &(un, vn)) in s.arcs().iter().enumerate() {
            let u = s.labels()[un].first().unwrap();
            let v = s.labels()[vn].first().unwrap();
            let f = match spine::flip_arc(tree, s, a) {
                Ok(f) => f,
                Err(e) => return Some(e.to_string()),
            };
            let Some(&j) = index.get(&f) else {
                return Some(format!("spine {}: flip of arc {} is not a known spine", i, a));
            };
            let d: Vec<i64> = (0..tree.n()).map(|w| points[j].0[w] - p.0[w]).collect();
            let k = d[u];
            let ok = k > 0 && d[v] == -k && (0..tree.n()).all(|w| w == u || w == v || d[w] == 0);
            if !ok {
                return Some(format!(
                    "spine {}: flip of {}->{} does not move along e_u - e_v",
                    i,
                    tree.id(u),
                    tree.id(v)
                ));
            }
        }
        None
    });
    match failure {
        Some(w) => Certificate::Fail(w),
        None => Certificate::Pass,
    }
}

/// Pairs of complementary relevant blocks, smaller block first.
pub fn parallel_facets(tree: &SignedTree) -> Vec<(VSet, VSet)> {
    let bs = BuildingSet::new(tree);
    let all = tree.standard();
    bs.blocks
        .iter()
        .filter(|&&b| bs.is_relevant(all.minus(b)) && b.canonical_cmp(&all.minus(b)).is_lt())
        .map(|&b| (b, all.minus(b)))
        .collect()
}

/// The parallelotope `Para(T)` as a deformed permutahedron: one segment per
/// edge, weighted by the number of tree paths through the edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Para {
    pub nu: usize,
    /// `(a, b, π(a−b))` per edge.
    pub edges: Vec<(usize, usize, i64)>,
}

impl Para {
    /// Right-hand side `z_U = |U|(ν+1)/2 − Σ_{cut edges} π/2`.
    pub fn z(&self, u: VSet) -> Ratio<i64> {
        let base = Ratio::new((u.len() * (self.nu + 1)) as i64, 2);
        let cut: i64 = self
            .edges
            .iter()
            .filter(|&&(a, b, _)| u.contains(a) != u.contains(b))
            .map(|&(_, _, p)| p)
            .sum();
        base - Ratio::new(cut, 2)
    }

    /// Minkowski coefficient: `(ν+1)/2 − Σ_{e∋u} π/2` on singletons, `π(e)` on edges.
    pub fn y(&self, s: VSet) -> Ratio<i64> {
        match s.len() {
            1 => {
                let u = s.first().unwrap();
                let around: i64 = self
                    .edges
                    .iter()
                    .filter(|&&(a, b, _)| a == u || b == u)
                    .map(|&(_, _, p)| p)
                    .sum();
                Ratio::new(self.nu as i64 + 1, 2) - Ratio::new(around, 2)
            }
            2 => self
                .edges
                .iter()
                .find(|&&(a, b, _)| s == VSet::from_indices([a, b]))
                .map_or(Ratio::from_integer(0), |&(_, _, p)| Ratio::from_integer(p)),
            _ => Ratio::from_integer(0),
        }
    }
}

pub fn para_summands(tree: &SignedTree) -> Result<Para> {
    if tree.has_phantoms() {
        return Err(Error::PreconditionViolated("parallelotope needs a tree without phantoms".into()));
    }
    let edges = tree
        .edges()
        .iter()
        .map(|&(a, b)| {
            let side = tree.component_of(VSet::singleton(b), a).len() as i64;
            (a, b, side * (tree.nu() as i64 - side))
        })
        .collect();
    Ok(Para { nu: tree.nu(), edges })
}

/// Tree orientations in which negative vertices have outdegree at most one and
/// positive vertices indegree at most one, as maximal spines.
pub fn common_vertices_para(tree: &SignedTree) -> Result<Vec<Spine>> {
    if tree.has_phantoms() {
        return Err(Error::PreconditionViolated("orientations need a tree without phantoms".into()));
    }
    let edges = tree.edges();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << edges.len()) {
        let arcs: Vec<(usize, usize)> = edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| if mask >> i & 1 == 0 { (a, b) } else { (b, a) })
            .collect();
        let ok = tree.standard().iter().all(|v| {
            let outdeg = arcs.iter().filter(|&&(a, _)| a == v).count();
            let indeg = arcs.iter().filter(|&&(_, b)| b == v).count();
            if tree.is_negative(v) {
                outdeg <= 1
            } else {
                indeg <= 1
            }
        });
        if ok {
            let s = Spine::from_vertex_arcs(tree.standard(), &arcs);
            validate_spine(tree, &s)
                .map_err(|v| Error::VerificationFailure(format!("orientation is not a spine: {}", v)))?;
            out.push(s);
        }
    }
    out.sort_by(|a, b| spine::cmp_keys(&a.key(), &b.key()));
    Ok(out)
}

/// Directed-path spines with their unique linear extension, found by growing
/// chains of blocks one vertex at a time.
pub fn singleton_spines(tree: &SignedTree) -> Vec<(Spine, Vec<usize>)> {
    let mut out = Vec::new();
    let mut order = Vec::new();
    fn grow(tree: &SignedTree, prefix: VSet, order: &mut Vec<usize>, out: &mut Vec<(Spine, Vec<usize>)>) {
        let rest = tree.standard().minus(prefix);
        if rest.len() <= 1 {
            order.extend(rest.iter());
            let arcs: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
            out.push((Spine::from_vertex_arcs(tree.standard(), &arcs), order.clone()));
            order.truncate(order.len() - rest.len());
            return;
        }
        for v in rest.iter() {
            if blocks::is_block(tree, prefix.with(v)) {
                order.push(v);
                grow(tree, prefix.with(v), order, out);
                order.pop();
            }
        }
    }
    grow(tree, VSet::EMPTY, &mut order, &mut out);
    out
}

/// Singleton count by the rooted phantom-tree recursion.
pub fn singleton_count_by_recursion(tree: &SignedTree) -> u64 {
    fn rooted(tree: &SignedTree, root: usize) -> u64 {
        if tree.nu() == 1 {
            return 1;
        }
        let next = tree.with_phantoms(VSet::singleton(root));
        boundary_neighbors(tree, root)
            .expect("root is standard")
            .iter()
            .map(|v| rooted(&next, v))
            .sum()
    }
    if tree.nu() == 1 {
        return 1;
    }
    tree.standard()
        .iter()
        .filter(|&r| blocks::is_relevant(tree, VSet::singleton(r)))
        .map(|r| rooted(tree, r))
        .sum()
}

/// The recursion, checked against direct enumeration.
pub fn singleton_count_recursive(tree: &SignedTree) -> Result<u64> {
    let recursive = singleton_count_by_recursion(tree);
    let direct = singleton_spines(tree).len() as u64;
    if recursive != direct {
        return Err(Error::RecursionMismatch { recursive, direct });
    }
    Ok(recursive)
}

/// Spines that are vertices of the permutahedron, the associahedron and the
/// parallelotope at once.
pub fn common_vertices_all(tree: &SignedTree) -> Result<Vec<Spine>> {
    let singles: Vec<Spine> = singleton_spines(tree).into_iter().map(|(s, _)| s).collect();
    Ok(common_vertices_para(tree)?
        .into_iter()
        .filter(|s| singles.contains(s))
        .collect())
}

/// Average of all vertex points, per standard vertex.
pub fn barycenter(tree: &SignedTree) -> Result<Vec<Ratio<i64>>> {
    let spines = spine::enumerate_maximal_spines(tree);
    let mut sum = vec![0i64; tree.n()];
    for s in &spines {
        let p = vertex_point(tree, s)?;
        for (acc, x) in sum.iter_mut().zip(&p.0) {
            *acc += x;
        }
    }
    let k = spines.len() as i64;
    Ok(tree.standard().iter().map(|v| Ratio::new(sum[v], k)).collect())
}

/// Isomorphic or anti-isomorphic up to the signs of leaves.
pub fn isometric(a: &SignedTree, b: &SignedTree) -> bool {
    signed_isomorphism(a, b, IsoMode::UpToLeafSigns).is_some()
        || signed_isomorphism(a, b, IsoMode::AntiUpToLeafSigns).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::fan;
    use crate::tree::{transform, Transform};

    fn maximal(t: &SignedTree, arcs: &[(&str, &str)]) -> Spine {
        let a: Vec<(usize, usize)> = arcs
            .iter()
            .map(|&(x, y)| (t.index(x).unwrap(), t.index(y).unwrap()))
            .collect();
        Spine::from_vertex_arcs(t.standard(), &a)
    }

    /// Paths counted one by one: every pair of nodes spans a unique path.
    fn brute_vertex_point(t: &SignedTree, s: &Spine) -> Vec<i64> {
        let k = s.node_count();
        let sides = s.sides();
        let nu = t.nu() as i64;
        let mut out = vec![0i64; t.n()];
        for x in 0..k {
            let v = s.labels()[x].first().unwrap();
            let special: Vec<usize> = if t.is_negative(v) { s.out_arcs(x) } else { s.in_arcs(x) };
            let mut count = 0;
            for a in 0..k {
                for b in a..k {
                    let path = node_path(s, a, b);
                    let through = path.contains(&x);
                    let uses = special.iter().any(|&r| {
                        let (p, q) = s.arcs()[r];
                        path.windows(2).any(|w| (w[0] == p && w[1] == q) || (w[0] == q && w[1] == p))
                    });
                    if through && !uses {
                        count += 1;
                    }
                }
            }
            let _ = &sides;
            out[v] = if t.is_negative(v) { count } else { nu + 1 - count };
        }
        out
    }

    fn node_path(s: &Spine, a: usize, b: usize) -> Vec<usize> {
        let k = s.node_count();
        let mut prev = vec![usize::MAX; k];
        prev[a] = a;
        let mut queue = std::collections::VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            for &(p, q) in s.arcs() {
                for (from, to) in [(p, q), (q, p)] {
                    if from == x && prev[to] == usize::MAX {
                        prev[to] = x;
                        queue.push_back(to);
                    }
                }
            }
        }
        let mut path = vec![b];
        while *path.last().unwrap() != a {
            path.push(prev[*path.last().unwrap()]);
        }
        path
    }

    #[test]
    fn vertex_point_examples() {
        let t = corpus::tripod_neg();
        let p = vertex_point(&t, &maximal(&t, &[("1", "2"), ("2", "3"), ("3", "4")])).unwrap();
        assert_eq!(p.standard_coords(&t), vec![1, 2, 3, 4]);
        let s = maximal(&t, &[("1", "2"), ("3", "2"), ("4", "2")]);
        assert_eq!(vertex_point(&t, &s).unwrap().standard_coords(&t), vec![1, 7, 1, 1]);
        let f = maximal(&t, &[("3", "2"), ("4", "2"), ("2", "1")]);
        assert_eq!(vertex_point(&t, &f).unwrap().standard_coords(&t), vec![4, 4, 1, 1]);
        assert_eq!(vertex_point(&t, &Spine::single(t.standard())), Err(Error::NotMaximal));
    }

    #[test]
    fn path_counting_matches_brute_force() {
        for t in corpus::all_signed_trees(5).into_iter().chain([corpus::htree_diff()]) {
            for s in spine::enumerate_maximal_spines(&t) {
                assert_eq!(vertex_point(&t, &s).unwrap().0, brute_vertex_point(&t, &s));
            }
        }
    }

    #[test]
    fn two_vertex_tree_spines() {
        for signs in ["--", "-+", "+-", "++"] {
            let t = corpus::from_signs(signs, &[(1, 2)]);
            let pts: Vec<Vec<i64>> = spine::enumerate_maximal_spines(&t)
                .iter()
                .map(|s| vertex_point(&t, s).unwrap().standard_coords(&t))
                .collect();
            assert_eq!(pts.len(), 2);
            assert!(pts.contains(&vec![1, 2]) && pts.contains(&vec![2, 1]));
        }
    }

    #[test]
    fn perm_point_examples() {
        let t = corpus::tripod_neg();
        assert_eq!(perm_point(&t, &[0, 1, 2, 3]).standard_coords(&t), vec![1, 2, 3, 4]);
        assert_eq!(perm_point(&t, &[3, 2, 1, 0]).standard_coords(&t), vec![4, 3, 2, 1]);
        assert_eq!(perm_point(&t, &[2, 0, 3, 1]).sum_over(t.standard()), 10);
    }

    #[test]
    fn realization_examples() {
        let m = realize_polytope(&corpus::p3mix(), 10).unwrap();
        assert_eq!((m.vertices.len(), m.facets.len()), (5, 5));
        let t = realize_polytope(&corpus::tripod_neg(), 10).unwrap();
        assert_eq!((t.vertices.len(), t.facets.len()), (16, 10));
        assert!(t.certificate.is_pass());
        let p = realize_polytope(&corpus::path4_neg(), 10).unwrap();
        assert_eq!((p.vertices.len(), p.facets.len()), (14, 9));
        assert!(verify_realization(&corpus::tripod_pos()).is_pass());
        assert!(verify_realization(&corpus::htree_diff()).is_pass());
        assert!(matches!(realize_polytope(&corpus::spider7(), 6), Err(Error::BoundExceeded { .. })));
    }

    #[test]
    fn realization_on_phantom_trees() {
        let t = corpus::spider7().with_phantoms(VSet::from_indices([0]));
        assert!(verify_realization(&t).is_pass());
        let t = corpus::htree_diff().with_phantoms(VSet::from_indices([2, 4]));
        assert!(verify_realization(&t).is_pass());
    }

    #[test]
    fn parallel_facet_examples() {
        let t = corpus::tripod_neg();
        let got: Vec<(Vec<String>, Vec<String>)> = parallel_facets(&t)
            .into_iter()
            .map(|(a, b)| (t.labels(a), t.labels(b)))
            .collect();
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(
            got,
            vec![
                (s(&["1"]), s(&["2", "3", "4"])),
                (s(&["3"]), s(&["1", "2", "4"])),
                (s(&["4"]), s(&["1", "2", "3"])),
            ]
        );
        assert_eq!(parallel_facets(&corpus::path4_neg()).len(), 3);
        for t in corpus::all_signatures(&corpus::htree_eq()) {
            assert_eq!(parallel_facets(&t).len(), 5);
        }
    }

    #[test]
    fn para_examples() {
        let t = corpus::tripod_neg();
        let p = para_summands(&t).unwrap();
        assert!(p.edges.iter().all(|&(_, _, w)| w == 3));
        let q = para_summands(&corpus::path4_neg()).unwrap();
        assert_eq!(q.edges.iter().map(|e| e.2).collect::<Vec<_>>(), vec![3, 4, 3]);
        for t in [corpus::tripod_neg(), corpus::htree_eq(), corpus::spider7()] {
            let p = para_summands(&t).unwrap();
            for &(a, b, _) in t.edges().iter().map(|e| (e.0, e.1, 0)).collect::<Vec<_>>().iter() {
                let (x, y) = blocks::edge_blocks(&t, a, b).unwrap();
                assert_eq!(p.z(x), Ratio::from_integer(binom2(x.len())));
                assert_eq!(p.z(y), Ratio::from_integer(binom2(y.len())));
            }
        }
    }

    #[test]
    fn para_coefficients_invert_right_hand_sides() {
        for t in [corpus::tripod_pos(), corpus::htree_diff(), corpus::path_neg(5)] {
            let p = para_summands(&t).unwrap();
            for u in t.standard().subsets() {
                let total: Ratio<i64> = u.subsets().map(|w| p.y(w)).sum();
                assert_eq!(total, p.z(u));
            }
        }
    }

    #[test]
    fn sandwich() {
        for t in corpus::all_signed_trees(5) {
            let bs = BuildingSet::new(&t);
            let para = para_summands(&t).unwrap();
            for o in fan::all_orders(&t) {
                let p = perm_point(&t, &o);
                assert!(bs.blocks.iter().all(|&b| p.sum_over(b) >= binom2(b.len())));
            }
            for s in spine::enumerate_maximal_spines(&t) {
                let a = vertex_point(&t, &s).unwrap();
                for u in t.standard().subsets().filter(|u| !u.is_empty()) {
                    assert!(Ratio::from_integer(a.sum_over(u)) >= para.z(u));
                }
            }
        }
    }

    #[test]
    fn common_vertex_examples() {
        assert_eq!(common_vertices_para(&corpus::tripod_neg()).unwrap().len(), 4);
        assert_eq!(common_vertices_para(&corpus::path4_neg()).unwrap().len(), 4);
        for t in corpus::all_signed_trees(5) {
            let spines = common_vertices_para(&t).unwrap();
            let para = para_summands(&t).unwrap();
            for s in &spines {
                // a(S) is the parallelotope vertex picking each edge's head
                let a = vertex_point(&t, s).unwrap();
                let mut expect: Vec<Ratio<i64>> =
                    (0..t.n()).map(|v| para.y(VSet::singleton(v))).collect();
                for &(x, y) in s.arcs() {
                    let head = s.labels()[y].first().unwrap();
                    let tail = s.labels()[x].first().unwrap();
                    let w = para.y(VSet::from_indices([head, tail]));
                    expect[head] += w;
                }
                let got: Vec<Ratio<i64>> = a.0.iter().map(|&x| Ratio::from_integer(x)).collect();
                assert_eq!(got, expect, "{:?}", t);
            }
            if t.positives().is_empty() {
                assert_eq!(spines.len(), t.nu());
            }
            let all = common_vertices_all(&t).unwrap().len();
            let expect = if t.nu() == 1 { 1 } else if corpus::is_path(&t) { 2 } else { 0 };
            assert_eq!(all, expect, "{:?}", t);
        }
    }

    #[test]
    fn singleton_examples() {
        for n in 1..=6 {
            assert_eq!(singleton_spines(&corpus::path_neg(n)).len(), 1 << (n - 1));
        }
        assert_eq!(singleton_spines(&corpus::tripod_neg()).len(), 12);
        let m = corpus::p3mix();
        let orders: Vec<Vec<String>> = singleton_spines(&m)
            .into_iter()
            .map(|(_, o)| o.iter().map(|&v| m.id(v).to_string()).collect())
            .collect();
        assert_eq!(orders.len(), 4);
        for o in [["1", "2", "3"], ["3", "2", "1"], ["1", "3", "2"], ["3", "1", "2"]] {
            assert!(orders.contains(&o.iter().map(|s| s.to_string()).collect()));
        }
    }

    #[test]
    fn singletons_are_exactly_the_singleton_fibers() {
        for t in corpus::all_signed_trees(5) {
            let singles = singleton_spines(&t);
            let by_fiber: Vec<Spine> = spine::enumerate_maximal_spines(&t)
                .into_iter()
                .filter(|s| fan::fiber(&t, s).unwrap().len() == 1)
                .collect();
            assert_eq!(singles.len(), by_fiber.len());
            for (s, o) in &singles {
                assert!(validate_spine(&t, s).is_ok());
                assert!(by_fiber.contains(s));
                assert_eq!(fan::kappa(&t, o).unwrap(), *s);
                assert_eq!(vertex_point(&t, s).unwrap(), perm_point(&t, o));
            }
        }
    }

    #[test]
    fn recursion_matches_enumeration() {
        assert_eq!(singleton_count_recursive(&corpus::p3mix()).unwrap(), 4);
        assert_eq!(singleton_count_recursive(&corpus::path_neg(3)).unwrap(), 4);
        assert_eq!(singleton_count_recursive(&corpus::path_neg(1)).unwrap(), 1);
        for t in corpus::all_signed_trees(6) {
            assert!(singleton_count_recursive(&t).is_ok(), "{:?}", t);
        }
    }

    #[test]
    fn every_block_lies_on_a_singleton() {
        for t in corpus::all_signed_trees(6).into_iter().chain(corpus::named().into_iter().map(|x| x.1)) {
            let keys: Vec<Vec<VSet>> = singleton_spines(&t).into_iter().map(|(s, _)| s.key()).collect();
            for b in BuildingSet::new(&t).blocks {
                assert!(keys.iter().any(|k| k.contains(&b)), "{:?} {:?}", t, b);
            }
        }
    }

    #[test]
    fn barycenter_examples() {
        let r = |n: i64| Ratio::new(n, 16);
        assert_eq!(barycenter(&corpus::tripod_neg()).unwrap(), vec![r(41), r(37), r(41), r(41)]);
        assert_eq!(barycenter(&corpus::tripod_pos()).unwrap(), vec![r(39), r(43), r(39), r(39)]);
        for n in 1..=6 {
            let b = barycenter(&corpus::path_neg(n)).unwrap();
            assert!(b.iter().all(|&x| x == Ratio::new(n as i64 + 1, 2)));
        }
    }

    #[test]
    fn isometry_examples() {
        let t = corpus::tripod_neg();
        let leaf = transform(&t, &Transform::FlipLeafSign("1".into())).unwrap();
        assert!(isometric(&t, &leaf));
        assert!(isometric(&t, &corpus::tripod_pos()));
        let mid = corpus::from_signs("--+--", &[(1, 2), (2, 3), (3, 4), (4, 5)]);
        assert!(!isometric(&corpus::path_neg(5), &mid));
        assert!(!isometric(&t, &corpus::path4_neg()));
        for t in corpus::all_signed_trees(5) {
            let f = transform(&t, &Transform::FlipAllSigns).unwrap();
            assert!(isometric(&t, &f));
        }
    }

    #[test]
    fn isometric_trees_have_congruent_vertex_sets() {
        // isometric trees have equal sorted multisets of vertex points, up to the central symmetry
        let shapes = [corpus::tripod_neg(), corpus::path4_neg()];
        for base in shapes {
            let sigs = corpus::all_signatures(&base);
            for a in &sigs {
                for b in &sigs {
                    if !isometric(a, b) {
                        continue;
                    }
                    let pa = sorted_points(a);
                    let pb = sorted_points(b);
                    let nu1 = a.nu() as i64 + 1;
                    let mut mirrored: Vec<Vec<i64>> =
                        pb.iter().map(|p| p.iter().map(|&x| nu1 - x).collect()).collect();
                    mirrored.sort();
                    assert!(multiset_up_to_relabel(&pa, &pb) || multiset_up_to_relabel(&pa, &mirrored));
                }
            }
        }
    }

    #[test]
    fn tripods_are_central_reflections() {
        let reflected: Vec<Vec<i64>> = {
            let mut v: Vec<Vec<i64>> = sorted_points(&corpus::tripod_pos())
                .into_iter()
                .map(|p| p.into_iter().map(|x| 5 - x).collect())
                .collect();
            v.sort();
            v
        };
        assert_eq!(sorted_points(&corpus::tripod_neg()), reflected);
    }

    fn sorted_points(t: &SignedTree) -> Vec<Vec<i64>> {
        let mut v: Vec<Vec<i64>> = spine::enumerate_maximal_spines(t)
            .iter()
            .map(|s| vertex_point(t, s).unwrap().standard_coords(t))
            .collect();
        v.sort();
        v
    }

    fn multiset_up_to_relabel(a: &[Vec<i64>], b: &[Vec<i64>]) -> bool {
        use itertools::Itertools;
        let n = a[0].len();
        (0..n).permutations(n).any(|perm| {
            let mut c: Vec<Vec<i64>> = b.iter().map(|p| perm.iter().map(|&i| p[i]).collect()).collect();
            c.sort();
            c == a
        })
    }

    #[test]
    fn building_set_reconstructs_the_tree_up_to_leaf_signs() {
        for t in corpus::all_signed_trees(6).into_iter().filter(|t| t.nu() >= 2) {
            let all = t.standard();
            let splits: Vec<VSet> = parallel_facets(&t).into_iter().map(|(a, _)| a).collect();
            let separates = |u: usize, v: usize| splits.iter().filter(|s| s.contains(u) != s.contains(v)).count();
            let mut edges = Vec::new();
            for u in all.iter() {
                for v in all.iter().filter(|&v| v > u) {
                    if separates(u, v) == 1 {
                        edges.push((u, v));
                    }
                }
            }
            assert_eq!(edges, t.edges().to_vec());
            for v in all.iter().filter(|&v| t.degree(v) >= 2) {
                let nb = t.neighbors(v);
                let branch = |w: usize| t.component_of(VSet::singleton(v), w);
                let x = branch(nb[0]).union(branch(nb[1]));
                assert_eq!(!blocks::is_block(&t, x), t.is_negative(v));
            }
        }
    }
}
