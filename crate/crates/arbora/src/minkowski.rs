//! Tight right-hand sides for arbitrary vertex subsets and the Minkowski
//! decomposition of the associahedron into simplices.

use std::collections::HashMap;

use num_rational::Ratio;
use rayon::prelude::*;

use crate::error::{check_bound, Error, Result};
use crate::fan;
use crate::geometry::binom2;
use crate::spine::Spine;
use crate::tree::SignedTree;
use crate::vset::{sort_canonical, VSet};

fn require_subset(tree: &SignedTree, u: VSet) -> Result<()> {
    if u.is_empty() {
        return Err(Error::PreconditionViolated("subset must be nonempty".into()));
    }
    if !u.is_subset(tree.standard()) {
        return Err(Error::PreconditionViolated("subset contains non-standard vertices".into()));
    }
    Ok(())
}

/// The spine of the cone containing the ordered partition `(U, V∖U)`: every
/// node is a source inside `U` or a sink outside it.
pub fn two_level_spine(tree: &SignedTree, u: VSet) -> Result<Spine> {
    let all = tree.standard();
    if u.is_empty() || u == all {
        return Ok(Spine::single(all));
    }
    require_subset(tree, u)?;
    let rest = all.minus(u);
    let s = fan::kappa_extended_sets(tree, &[u, rest])?;
    let mut sources: Vec<VSet> = s.labels().iter().copied().filter(|l| l.is_subset(u)).collect();
    sort_canonical(&mut sources);
    let mut expected: Vec<VSet> = tree
        .components(rest.inter(tree.negatives()))
        .iter()
        .map(|c| c.vertices.inter(u))
        .filter(|x| !x.is_empty())
        .collect();
    sort_canonical(&mut expected);
    if sources != expected {
        return Err(Error::VerificationFailure(format!(
            "two-level spine of {{{}}} has unexpected sources",
            tree.key(u)
        )));
    }
    Ok(s)
}

/// `z_U = min_S Σ_{u∈U} a(S)_u`, read off the two-level spine of `U`.
pub fn tight_rhs(tree: &SignedTree, u: VSet) -> Result<i64> {
    require_subset(tree, u)?;
    let s = two_level_spine(tree, u)?;
    if s.node_count() == 1 {
        return Ok(binom2(tree.nu()));
    }
    let arcs: i64 = s.sides().iter().map(|&(sc, _)| binom2(sc.len())).sum();
    let excess: i64 = (0..s.node_count())
        .filter(|&x| s.labels()[x].is_subset(u))
        .map(|x| s.in_arcs(x).len() as i64 + s.out_arcs(x).len() as i64 - 1)
        .sum();
    Ok(arcs - binom2(tree.nu()) * excess)
}

/// A vertex set spanning a tree path `[p, q]` that holds every negative
/// vertex of the path and possibly some of its positive ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NegativePath {
    pub members: VSet,
    pub endpoints: (usize, usize),
}

pub fn negative_path(tree: &SignedTree, members: VSet) -> Result<NegativePath> {
    if members.is_empty() || !members.is_subset(tree.standard()) {
        return Err(Error::InvalidPath("not a nonempty set of standard vertices".into()));
    }
    let mut found = None;
    for p in members.iter() {
        for q in members.iter().filter(|&q| q >= p) {
            if members.is_subset(tree.path_set(p, q)) {
                found = Some((p, q));
            }
        }
    }
    let Some((p, q)) = found else {
        return Err(Error::InvalidPath(format!("{{{}}} does not lie on a path", tree.key(members))));
    };
    let path = tree.path_set(p, q);
    if !path.is_subset(tree.standard()) || !path.inter(tree.negatives()).is_subset(members) {
        return Err(Error::InvalidPath(format!(
            "{{{}}} misses a negative vertex of its path",
            tree.key(members)
        )));
    }
    Ok(NegativePath {
        members,
        endpoints: (p, q),
    })
}

pub fn negative_paths(tree: &SignedTree) -> Vec<NegativePath> {
    let mut out = Vec::new();
    for p in tree.standard().iter() {
        for q in tree.standard().iter().filter(|&q| q >= p) {
            let path = tree.path_set(p, q);
            if !path.is_subset(tree.standard()) {
                continue;
            }
            let forced = path.inter(tree.negatives()).with(p).with(q);
            let optional = path.minus(forced);
            for extra in optional.subsets() {
                out.push(NegativePath {
                    members: forced.union(extra),
                    endpoints: (p, q),
                });
            }
        }
    }
    out.sort_by(|a, b| a.members.canonical_cmp(&b.members));
    out
}

fn branch_size(tree: &SignedTree, x: usize, toward: usize) -> i64 {
    tree.component_of(VSet::singleton(x), toward).inter(tree.standard()).len() as i64
}

/// `Ω(P)`; half-integral only on some positive singletons.
pub fn path_weight(tree: &SignedTree, path: &NegativePath) -> Result<Ratio<i64>> {
    let checked = negative_path(tree, path.members)?;
    let (p, q) = checked.endpoints;
    let nu = tree.nu() as i64;
    if p != q {
        let omega = |x: usize, y: usize| {
            if tree.is_negative(x) {
                -1
            } else {
                nu - branch_size(tree, x, y)
            }
        };
        let sign = if path.members.inter(tree.positives()).len().is_multiple_of(2) { 1 } else { -1 };
        return Ok(Ratio::from_integer(sign * omega(p, q) * omega(q, p)));
    }
    if tree.is_negative(p) {
        return Ok(Ratio::from_integer(1));
    }
    let twice: i64 = tree
        .neighbors(p)
        .iter()
        .map(|&w| {
            let c = branch_size(tree, p, w);
            (nu - c) * (c + 1)
        })
        .sum();
    Ok(Ratio::new(-twice, 2))
}

/// `z` and `y` over all nonempty subsets, in canonical subset order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientTable {
    pub subsets: Vec<VSet>,
    pub z: Vec<i64>,
    pub y: Vec<i64>,
    index: HashMap<VSet, usize>,
}

impl CoefficientTable {
    pub fn z_of(&self, u: VSet) -> Option<i64> {
        self.index.get(&u).map(|&i| self.z[i])
    }

    pub fn y_of(&self, u: VSet) -> Option<i64> {
        self.index.get(&u).map(|&i| self.y[i])
    }
}

fn nonempty_subsets(tree: &SignedTree) -> Vec<VSet> {
    let mut v: Vec<VSet> = tree.standard().subsets().filter(|s| !s.is_empty()).collect();
    sort_canonical(&mut v);
    v
}

fn require_plain(tree: &SignedTree) -> Result<()> {
    if tree.has_phantoms() {
        return Err(Error::PreconditionViolated(
            "Minkowski coefficients need a tree without phantoms".into(),
        ));
    }
    Ok(())
}

fn closed_form(tree: &SignedTree, u: VSet) -> Result<i64> {
    let Ok(path) = negative_path(tree, u) else {
        return Ok(0);
    };
    let omega = path_weight(tree, &path)?;
    let y = if u.len() == 1 && tree.is_positive(path.endpoints.0) {
        omega + Ratio::new(tree.nu() as i64 * tree.degree(path.endpoints.0) as i64, 2) + 1
    } else {
        omega
    };
    if !y.is_integer() {
        return Err(Error::VerificationFailure(format!(
            "coefficient of {{{}}} is not integral",
            tree.key(u)
        )));
    }
    Ok(y.to_integer())
}

fn moebius(subsets: &[VSet], z: &[i64]) -> HashMap<VSet, i64> {
    let zmap: HashMap<VSet, i64> = subsets.iter().copied().zip(z.iter().copied()).collect();
    subsets
        .par_iter()
        .map(|&v| {
            let y = v
                .subsets()
                .filter(|w| !w.is_empty())
                .map(|w| {
                    let sign = if v.minus(w).len() % 2 == 0 { 1 } else { -1 };
                    sign * zmap[&w]
                })
                .sum();
            (v, y)
        })
        .collect()
}

/// Closed-form coefficients, checked subset by subset against inclusion–exclusion.
pub fn minkowski_coefficients(tree: &SignedTree, max_nu: usize) -> Result<CoefficientTable> {
    check_bound("Minkowski coefficients", tree.nu(), max_nu)?;
    require_plain(tree)?;
    let subsets = nonempty_subsets(tree);
    let z = subsets.par_iter().map(|&u| tight_rhs(tree, u)).collect::<Result<Vec<_>>>()?;
    let y = subsets.par_iter().map(|&u| closed_form(tree, u)).collect::<Result<Vec<_>>>()?;
    let oracle = moebius(&subsets, &z);
    for (u, &closed) in subsets.iter().zip(&y) {
        if oracle[u] != closed {
            return Err(Error::InversionMismatch {
                subset: tree.key(*u),
                closed,
                oracle: oracle[u],
            });
        }
    }
    let index = subsets.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    Ok(CoefficientTable { subsets, z, y, index })
}

/// `y_V = Σ_{U⊆V} (−1)^{|V∖U|} z_U` from the tight right-hand sides.
pub fn moebius_oracle(tree: &SignedTree, max_nu: usize) -> Result<Vec<(VSet, i64)>> {
    check_bound("Moebius inversion", tree.nu(), max_nu)?;
    let subsets = nonempty_subsets(tree);
    let z = subsets.par_iter().map(|&u| tight_rhs(tree, u)).collect::<Result<Vec<_>>>()?;
    let y = moebius(&subsets, &z);
    Ok(subsets.iter().map(|u| (*u, y[u])).collect())
}

/// First pair violating `z_U + z_W ≤ z_{U∪W} + z_{U∩W}` (with `z_∅ = 0`).
pub fn supermodularity_witness(table: &CoefficientTable) -> Option<(VSet, VSet)> {
    let z = |s: VSet| if s.is_empty() { 0 } else { table.z_of(s).unwrap() };
    for &a in &table.subsets {
        for &b in &table.subsets {
            if z(a) + z(b) > z(a.union(b)) + z(a.inter(b)) {
                return Some((a, b));
            }
        }
    }
    None
}
