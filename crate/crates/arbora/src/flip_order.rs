//! Weak order on linear orders, increasing flips between maximal spines,
//! h-vectors, and whether the spine fibers form an order congruence.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use crate::error::{check_bound, Error, Result};
use crate::fan;
use crate::geometry::{perm_point, vertex_point};
use crate::spine::{self, Spine};
use crate::tree::SignedTree;

/// Pairs of vertices whose relative order differs from the base.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InversionSet {
    /// `(u, v)` with `u` before `v` in the base and after it in the order.
    pub pairs: Vec<(usize, usize)>,
    mask: u64,
}

impl InversionSet {
    pub fn new(tree: &SignedTree, base: &[usize], order: &[usize]) -> Result<InversionSet> {
        fan::validate_order(tree, base)?;
        fan::validate_order(tree, order)?;
        let rank = base_rank(tree, base);
        let mask = inversion_mask(&rank, order);
        let mut pairs = Vec::new();
        for (i, &u) in base.iter().enumerate() {
            for &v in &base[i + 1..] {
                if mask >> pair_bit(rank[u], rank[v]) & 1 == 1 {
                    pairs.push((u, v));
                }
            }
        }
        Ok(InversionSet { pairs, mask })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_subset(&self, other: &InversionSet) -> bool {
        self.mask & !other.mask == 0
    }
}

fn base_rank(tree: &SignedTree, base: &[usize]) -> Vec<usize> {
    let mut rank = vec![usize::MAX; tree.n()];
    for (i, &v) in base.iter().enumerate() {
        rank[v] = i;
    }
    rank
}

fn pair_bit(i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    b * (b - 1) / 2 + a
}

fn inversion_mask(rank: &[usize], order: &[usize]) -> u64 {
    let mut mask = 0u64;
    for (i, &u) in order.iter().enumerate() {
        for &v in &order[i + 1..] {
            if rank[u] > rank[v] {
                mask |= 1 << pair_bit(rank[u], rank[v]);
            }
        }
    }
    mask
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeakOrdering {
    Below,
    Above,
    Equal,
    Incomparable,
}

impl WeakOrdering {
    pub fn symbol(self) -> &'static str {
        match self {
            WeakOrdering::Below => "<=",
            WeakOrdering::Above => ">=",
            WeakOrdering::Equal => "=",
            WeakOrdering::Incomparable => "incomparable",
        }
    }
}

pub fn weak_compare(tree: &SignedTree, base: &[usize], a: &[usize], b: &[usize]) -> Result<WeakOrdering> {
    let ia = InversionSet::new(tree, base, a)?;
    let ib = InversionSet::new(tree, base, b)?;
    Ok(match (ia.is_subset(&ib), ib.is_subset(&ia)) {
        (true, true) => WeakOrdering::Equal,
        (true, false) => WeakOrdering::Below,
        (false, true) => WeakOrdering::Above,
        (false, false) => WeakOrdering::Incomparable,
    })
}

/// Maximal spines with flips oriented from `u→v` to `v→u` when `u` precedes `v`.
#[derive(Clone, Debug)]
pub struct IncreasingFlipDigraph {
    pub spines: Vec<Spine>,
    pub arcs: Vec<(usize, usize)>,
    pub source: usize,
    pub sink: usize,
}

pub fn increasing_flip_digraph(tree: &SignedTree, base: &[usize]) -> Result<IncreasingFlipDigraph> {
    fan::validate_order(tree, base)?;
    let rank = base_rank(tree, base);
    let spines = spine::enumerate_maximal_spines(tree);
    let index: HashMap<&Spine, usize> = spines.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let per_spine: Vec<Vec<(usize, usize)>> = spines
        .par_iter()
        .enumerate()
        .map(|(i, s)| -> Result<Vec<(usize, usize)>> {
            let mut out = Vec::new();
            for (a, &(x, y)) in s.arcs().iter().enumerate() {
                let u = s.labels()[x].first().unwrap();
                let v = s.labels()[y].first().unwrap();
                if rank[u] < rank[v] {
                    let f = spine::flip_arc(tree, s, a)?;
                    let j = *index
                        .get(&f)
                        .ok_or_else(|| Error::VerificationFailure("flip leaves the spine set".into()))?;
                    out.push((i, j));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut arcs: Vec<(usize, usize)> = per_spine.into_iter().flatten().collect();
    arcs.sort_unstable();

    let k = spines.len();
    let mut indeg = vec![0usize; k];
    let mut outdeg = vec![0usize; k];
    let mut succ = vec![Vec::new(); k];
    for &(a, b) in &arcs {
        indeg[b] += 1;
        outdeg[a] += 1;
        succ[a].push(b);
    }
    let mut queue: VecDeque<usize> = (0..k).filter(|&i| indeg[i] == 0).collect();
    let mut left = indeg.clone();
    let mut seen = 0;
    while let Some(x) = queue.pop_front() {
        seen += 1;
        for &y in &succ[x] {
            left[y] -= 1;
            if left[y] == 0 {
                queue.push_back(y);
            }
        }
    }
    if seen != k {
        return Err(Error::VerificationFailure("increasing flip graph has a cycle".into()));
    }
    let sources: Vec<usize> = (0..k).filter(|&i| indeg[i] == 0).collect();
    let sinks: Vec<usize> = (0..k).filter(|&i| outdeg[i] == 0).collect();
    if sources.len() != 1 || sinks.len() != 1 {
        return Err(Error::VerificationFailure(format!(
            "{} sources and {} sinks in the increasing flip graph",
            sources.len(),
            sinks.len()
        )));
    }
    let reversed: Vec<usize> = base.iter().rev().copied().collect();
    if spines[sources[0]] != fan::kappa(tree, base)? || spines[sinks[0]] != fan::kappa(tree, &reversed)? {
        return Err(Error::VerificationFailure("extremal spines differ from the sweeps of the base".into()));
    }
    Ok(IncreasingFlipDigraph {
        spines,
        arcs,
        source: sources[0],
        sink: sinks[0],
    })
}

/// Orientation by the linear functional `p(reversed base) − p(base)` on
/// vertex points, arc by arc.
pub fn functional_orientation(tree: &SignedTree, spines: &[Spine], base: &[usize]) -> Result<Vec<(usize, usize)>> {
    let reversed: Vec<usize> = base.iter().rev().copied().collect();
    let lo = perm_point(tree, base);
    let hi = perm_point(tree, &reversed);
    let g: Vec<i64> = hi.0.iter().zip(&lo.0).map(|(a, b)| a - b).collect();
    let index: HashMap<&Spine, usize> = spines.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let value = |s: &Spine| -> Result<i64> {
        let p = vertex_point(tree, s)?;
        Ok(p.0.iter().zip(&g).map(|(a, b)| a * b).sum())
    };
    let mut arcs = Vec::new();
    for (i, s) in spines.iter().enumerate() {
        let here = value(s)?;
        for a in 0..s.arcs().len() {
            let f = spine::flip_arc(tree, s, a)?;
            let j = index[&f];
            if value(&f)? > here {
                arcs.push((i, j));
            }
        }
    }
    arcs.sort_unstable();
    arcs.dedup();
    Ok(arcs)
}

pub fn flipgraph_dot(tree: &SignedTree, g: &IncreasingFlipDigraph) -> String {
    let mut out = String::from("digraph flips {\n");
    for (i, s) in g.spines.iter().enumerate() {
        let label: Vec<String> = s
            .arcs()
            .iter()
            .map(|&(a, b)| {
                format!(
                    "{}>{}",
                    tree.key(s.labels()[a]),
                    tree.key(s.labels()[b])
                )
            })
            .collect();
        out.push_str(&format!("  s{} [label=\"{}\"];\n", i, label.join(" ")));
    }
    for &(a, b) in &g.arcs {
        out.push_str(&format!("  s{} -> s{};\n", a, b));
    }
    out.push_str("}\n");
    out
}

/// `h_ℓ` = number of maximal spines with `ℓ` arcs pointing forward in the base.
pub fn h_vector(tree: &SignedTree, base: &[usize]) -> Result<Vec<u64>> {
    fan::validate_order(tree, base)?;
    let rank = base_rank(tree, base);
    let mut h = vec![0u64; tree.nu()];
    for s in spine::enumerate_maximal_spines(tree) {
        let forward = s
            .arcs()
            .iter()
            .filter(|&&(a, b)| rank[s.labels()[a].first().unwrap()] < rank[s.labels()[b].first().unwrap()])
            .count();
        h[forward] += 1;
    }
    Ok(h)
}

/// Face numbers of the polytope from its h-vector: `f_k = Σ_ℓ C(ℓ,k) h_ℓ`.
pub fn f_from_h(h: &[u64]) -> Vec<u64> {
    (0..h.len())
        .map(|k| (k..h.len()).map(|l| binomial(l as u64, k as u64) * h[l]).sum())
        .collect()
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Every linear order with the spine it sweeps to, shared across base orders.
pub struct OrderTable {
    pub orders: Vec<Vec<usize>>,
    pub fiber_of: Vec<usize>,
    pub spines: Vec<Spine>,
    index: HashMap<Vec<usize>, usize>,
}

impl OrderTable {
    pub fn new(tree: &SignedTree, max_nu: usize) -> Result<OrderTable> {
        check_bound("congruence diagnostics", tree.nu(), max_nu)?;
        let orders = fan::all_orders(tree);
        let swept: Vec<Spine> = orders.par_iter().map(|o| fan::kappa(tree, o)).collect::<Result<_>>()?;
        let mut spines: Vec<Spine> = Vec::new();
        let mut ids: HashMap<Spine, usize> = HashMap::new();
        let mut fiber_of = Vec::with_capacity(orders.len());
        for s in swept {
            let next = ids.len();
            let id = *ids.entry(s.clone()).or_insert_with(|| {
                spines.push(s);
                next
            });
            fiber_of.push(id);
        }
        let index = orders.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
        Ok(OrderTable {
            orders,
            fiber_of,
            spines,
            index,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiberDefect {
    NoUniqueMinimum,
    NoUniqueMaximum,
    /// An order between the fiber's extremes that sweeps elsewhere.
    Gap { order: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberWitness {
    pub spine: Spine,
    pub defect: FiberDefect,
}

/// A covering pair `lower ⋖ upper` whose projections are not comparable in order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectionWitness {
    pub lower: Vec<usize>,
    pub upper: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub base: Vec<usize>,
    pub fiber_witness: Option<FiberWitness>,
    pub down_witness: Option<ProjectionWitness>,
    pub up_witness: Option<ProjectionWitness>,
}

impl CongruenceReport {
    pub fn fibers_are_intervals(&self) -> bool {
        self.fiber_witness.is_none()
    }

    pub fn is_congruence(&self) -> bool {
        self.fiber_witness.is_none() && self.down_witness.is_none() && self.up_witness.is_none()
    }
}

pub fn congruence_diagnostics(tree: &SignedTree, base: &[usize], max_nu: usize) -> Result<CongruenceReport> {
    fan::validate_order(tree, base)?;
    let table = OrderTable::new(tree, max_nu)?;
    Ok(diagnose(tree, &table, base))
}

/// Diagnostics for every base order, in lexicographic order of the bases.
pub fn congruence_diagnostics_all(tree: &SignedTree, max_nu: usize) -> Result<Vec<CongruenceReport>> {
    let table = OrderTable::new(tree, max_nu)?;
    Ok(table.orders.par_iter().map(|b| diagnose(tree, &table, b)).collect())
}

pub fn diagnose(tree: &SignedTree, table: &OrderTable, base: &[usize]) -> CongruenceReport {
    let rank = base_rank(tree, base);
    let masks: Vec<u64> = table.orders.iter().map(|o| inversion_mask(&rank, o)).collect();
    let mut members = vec![Vec::new(); table.spines.len()];
    for (i, &f) in table.fiber_of.iter().enumerate() {
        members[f].push(i);
    }
    let extreme = |fiber: &[usize], below: bool| -> Option<usize> {
        fiber.iter().copied().find(|&c| {
            fiber.iter().all(|&o| {
                if below {
                    masks[c] & !masks[o] == 0
                } else {
                    masks[o] & !masks[c] == 0
                }
            })
        })
    };
    let mins: Vec<Option<usize>> = members.iter().map(|f| extreme(f, true)).collect();
    let maxs: Vec<Option<usize>> = members.iter().map(|f| extreme(f, false)).collect();

    let covers = |i: usize| -> Vec<usize> {
        let o = &table.orders[i];
        (0..o.len().saturating_sub(1))
            .filter(|&k| rank[o[k]] < rank[o[k + 1]])
            .map(|k| {
                let mut t = o.clone();
                t.swap(k, k + 1);
                table.index[&t]
            })
            .collect()
    };

    let mut fiber_witness = None;
    for (f, fiber) in members.iter().enumerate() {
        let defect = match (mins[f], maxs[f]) {
            (None, _) => Some(FiberDefect::NoUniqueMinimum),
            (_, None) => Some(FiberDefect::NoUniqueMaximum),
            (Some(m), Some(top)) => {
                let mut seen = vec![false; table.orders.len()];
                let mut queue = VecDeque::from([m]);
                seen[m] = true;
                let mut gap = None;
                while let Some(x) = queue.pop_front() {
                    if table.fiber_of[x] != f {
                        gap = Some(FiberDefect::Gap {
                            order: table.orders[x].clone(),
                        });
                        break;
                    }
                    for y in covers(x) {
                        if !seen[y] && masks[y] & !masks[top] == 0 {
                            seen[y] = true;
                            queue.push_back(y);
                        }
                    }
                }
                gap
            }
        };
        if let Some(defect) = defect {
            fiber_witness = Some(FiberWitness {
                spine: table.spines[f].clone(),
                defect,
            });
            break;
        }
        debug_assert!(!fiber.is_empty());
    }

    let projection_witness = |proj: &[Option<usize>]| -> Option<ProjectionWitness> {
        for i in 0..table.orders.len() {
            for j in covers(i) {
                let ok = match (proj[table.fiber_of[i]], proj[table.fiber_of[j]]) {
                    (Some(a), Some(b)) => masks[a] & !masks[b] == 0,
                    _ => false,
                };
                if !ok {
                    return Some(ProjectionWitness {
                        lower: table.orders[i].clone(),
                        upper: table.orders[j].clone(),
                    });
                }
            }
        }
        None
    };
    CongruenceReport {
        base: base.to_vec(),
        fiber_witness,
        down_witness: projection_witness(&mins),
        up_witness: projection_witness(&maxs),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex;
    use crate::corpus;

    fn order(t: &SignedTree, s: &str) -> Vec<usize> {
        fan::parse_order(t, s).unwrap()
    }

    #[test]
    fn weak_compare_examples() {
        let t = corpus::path_neg(3);
        let base = order(&t, "1,2,3");
        let top = order(&t, "3,2,1");
        assert_eq!(weak_compare(&t, &base, &base, &top).unwrap(), WeakOrdering::Below);
        assert_eq!(weak_compare(&t, &base, &top, &base).unwrap(), WeakOrdering::Above);
        assert_eq!(weak_compare(&t, &base, &top, &top).unwrap(), WeakOrdering::Equal);
        let a = order(&t, "2,1,3");
        let b = order(&t, "1,3,2");
        assert_eq!(weak_compare(&t, &base, &a, &b).unwrap(), WeakOrdering::Incomparable);
        let inv = InversionSet::new(&t, &base, &a).unwrap();
        assert_eq!(inv.pairs, vec![(0, 1)]);
        assert!(weak_compare(&t, &base, &a, &[0, 1]).is_err());
    }

    /// Containment of inversion sets agrees with reachability by covering swaps.
    #[test]
    fn weak_order_is_swap_reachability() {
        let t = corpus::path_neg(4);
        let base = order(&t, "2,4,1,3");
        let orders = fan::all_orders(&t);
        let rank = base_rank(&t, &base);
        for a in &orders {
            let mut reach = vec![a.clone()];
            let mut i = 0;
            while i < reach.len() {
                let o = reach[i].clone();
                for k in 0..o.len() - 1 {
                    if rank[o[k]] < rank[o[k + 1]] {
                        let mut n = o.clone();
                        n.swap(k, k + 1);
                        if !reach.contains(&n) {
                            reach.push(n);
                        }
                    }
                }
                i += 1;
            }
            for b in &orders {
                let cmp = weak_compare(&t, &base, a, b).unwrap();
                let below = matches!(cmp, WeakOrdering::Below | WeakOrdering::Equal);
                assert_eq!(below, reach.contains(b));
            }
        }
    }

    #[test]
    fn tamari_on_the_path() {
        let t = corpus::path4_neg();
        let base = order(&t, "1,2,3,4");
        let g = increasing_flip_digraph(&t, &base).unwrap();
        assert_eq!(g.spines.len(), 14);
        assert_eq!(g.arcs.len(), 21);
        let path = Spine::from_vertex_arcs(t.standard(), &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(g.spines[g.source], path);
    }

    #[test]
    fn flip_digraph_agrees_with_vertex_points() {
        for t in corpus::all_signed_trees(5).into_iter().chain([corpus::htree_diff()]) {
            let mut base = t.standard_list();
            base.reverse();
            let g = increasing_flip_digraph(&t, &base).unwrap();
            assert_eq!(functional_orientation(&t, &g.spines, &base).unwrap(), g.arcs);
        }
    }

    #[test]
    fn reversing_the_base_reverses_every_arc() {
        let t = corpus::tripod_neg();
        for base in fan::all_orders(&t) {
            let g = increasing_flip_digraph(&t, &base).unwrap();
            let rev: Vec<usize> = base.iter().rev().copied().collect();
            let r = increasing_flip_digraph(&t, &rev).unwrap();
            let mut flipped: Vec<(usize, usize)> = r.arcs.iter().map(|&(a, b)| (b, a)).collect();
            flipped.sort_unstable();
            assert_eq!(flipped, g.arcs);
            assert_eq!((g.source, g.sink), (r.sink, r.source));
        }
    }

    #[test]
    fn h_vector_examples() {
        let t = corpus::path4_neg();
        assert_eq!(h_vector(&t, &order(&t, "1,2,3,4")).unwrap(), vec![1, 6, 6, 1]);
        let t = corpus::tripod_neg();
        let h = h_vector(&t, &order(&t, "1,2,3,4")).unwrap();
        assert_eq!(h.iter().sum::<u64>(), 16);
        assert_eq!(h.iter().rev().copied().collect::<Vec<_>>(), h);
        let one = corpus::path_neg(1);
        assert_eq!(h_vector(&one, &[0]).unwrap(), vec![1]);
    }

    #[test]
    fn h_vector_properties() {
        for t in corpus::all_signed_trees(5) {
            let f = complex::complex_stats(&t).f_complex;
            let nu = t.nu();
            let mut first: Option<Vec<u64>> = None;
            for base in fan::all_orders(&t) {
                let h = h_vector(&t, &base).unwrap();
                assert_eq!(h.iter().rev().copied().collect::<Vec<_>>(), h);
                let fp = f_from_h(&h);
                for k in 0..nu {
                    assert_eq!(fp[k], f[nu - 1 - k]);
                }
                match &first {
                    None => first = Some(h),
                    Some(h0) => assert_eq!(&h, h0),
                }
            }
        }
    }

    #[test]
    fn narayana_on_paths() {
        for n in 1..=7usize {
            let t = corpus::path_neg(n);
            let h = h_vector(&t, &t.standard_list()).unwrap();
            let nar: Vec<u64> = (1..=n as u64)
                .map(|l| binomial(n as u64, l) * binomial(n as u64, l - 1) / n as u64)
                .collect();
            assert_eq!(h, nar);
        }
    }

    #[test]
    fn sylvester_congruence_on_the_path() {
        let t = corpus::path4_neg();
        let r = congruence_diagnostics(&t, &order(&t, "1,2,3,4"), 8).unwrap();
        assert!(r.is_congruence(), "{:?}", r);
    }

    #[test]
    fn tripod_is_never_a_congruence() {
        let t = corpus::tripod_neg();
        let reports = congruence_diagnostics_all(&t, 8).unwrap();
        assert_eq!(reports.len(), 24);
        assert!(reports.iter().all(|r| !r.is_congruence()));
    }

    #[test]
    fn bound_is_enforced() {
        let t = corpus::spider7();
        assert!(matches!(
            congruence_diagnostics(&t, &t.standard_list(), 6),
            Err(Error::BoundExceeded { .. })
        ));
    }

    /// Brute-force interval check: compare every order against the fiber extremes.
    #[test]
    fn interval_test_matches_brute_force() {
        for t in corpus::all_signed_trees(4) {
            let table = OrderTable::new(&t, 8).unwrap();
            for base in &table.orders {
                let r = diagnose(&t, &table, base);
                let brute = (0..table.spines.len()).all(|f| {
                    let fiber: Vec<&Vec<usize>> =
                        (0..table.orders.len()).filter(|&i| table.fiber_of[i] == f).map(|i| &table.orders[i]).collect();
                    let below = |a: &Vec<usize>, b: &Vec<usize>| {
                        matches!(
                            weak_compare(&t, base, a, b).unwrap(),
                            WeakOrdering::Below | WeakOrdering::Equal
                        )
                    };
                    let m = fiber.iter().find(|&&c| fiber.iter().all(|o| below(c, o)));
                    let top = fiber.iter().find(|&&c| fiber.iter().all(|o| below(o, c)));
                    match (m, top) {
                        (Some(m), Some(top)) => table
                            .orders
                            .iter()
                            .filter(|o| below(m, o) && below(o, top))
                            .all(|o| fiber.contains(&o)),
                        _ => false,
                    }
                });
                assert_eq!(r.fibers_are_intervals(), brute);
            }
        }
    }
}
