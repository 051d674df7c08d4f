//! Signed trees with optional phantom vertices.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::blocks;
use crate::error::{Error, Result};
use crate::vset::{VSet, MAX_VERTICES};

/// Vertex identifier. Numeric ids compare numerically, others lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub String);

impl VertexId {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_string())
    }
}

impl From<String> for VertexId {
    fn from(s: String) -> Self {
        VertexId(s)
    }
}

impl Ord for VertexId {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.0.parse::<u64>(), other.0.parse::<u64>()) {
            (Ok(a), Ok(b)) => a.cmp(&b).then_with(|| self.0.cmp(&other.0)),
            (Ok(_), Err(_)) => Ordering::Less,
            (Err(_), Ok(_)) => Ordering::Greater,
            _ => self.0.cmp(&other.0),
        }
    }
}

impl PartialOrd for VertexId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Sign {
    #[serde(rename = "-")]
    #[default]
    Negative,
    #[serde(rename = "+")]
    Positive,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Negative => '-',
            Sign::Positive => '+',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSpec {
    pub id: VertexId,
    #[serde(default)]
    pub sign: Sign,
    #[serde(default)]
    pub phantom: bool,
}

/// On-disk tree document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeFile {
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<(VertexId, VertexId)>,
}

/// A connected component of `T ∖ D`: either a vertex set or an open edge
/// whose two endpoints both lie in `D`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Component {
    pub vertices: VSet,
    pub open_edge: Option<(usize, usize)>,
}

#[derive(Clone)]
pub struct SignedTree {
    ids: Vec<VertexId>,
    signs: Vec<Sign>,
    phantom: Vec<bool>,
    adj: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
    standard: VSet,
    neg: VSet,
    pos: VSet,
    paths: Vec<VSet>,
}

impl PartialEq for SignedTree {
    fn eq(&self, o: &Self) -> bool {
        self.ids == o.ids && self.signs == o.signs && self.phantom == o.phantom && self.edges == o.edges
    }
}

impl Eq for SignedTree {}

impl fmt::Debug for SignedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = (0..self.n())
            .map(|v| {
                if self.phantom[v] {
                    format!("{}*", self.ids[v])
                } else {
                    format!("{}{}", self.ids[v], self.signs[v].symbol())
                }
            })
            .collect();
        let es: Vec<String> = self
            .edges
            .iter()
            .map(|&(a, b)| format!("{}-{}", self.ids[a], self.ids[b]))
            .collect();
        write!(f, "SignedTree[{} | {}]", vs.join(" "), es.join(" "))
    }
}

/// Validate and build a tree. Vertices are stored in canonical id order.
pub fn build_tree(vertices: Vec<VertexSpec>, edges: Vec<(VertexId, VertexId)>) -> Result<SignedTree> {
    if vertices.is_empty() {
        return Err(Error::Empty);
    }
    if vertices.len() > MAX_VERTICES {
        return Err(Error::BoundExceeded {
            what: "tree size",
            limit: MAX_VERTICES,
            nu: vertices.len(),
        });
    }
    let mut vertices = vertices;
    vertices.sort_by(|a, b| a.id.cmp(&b.id));
    for w in vertices.windows(2) {
        if w[0].id == w[1].id {
            return Err(Error::DuplicateId(w[0].id.0.clone()));
        }
    }
    if vertices.iter().all(|v| v.phantom) {
        return Err(Error::Empty);
    }
    let n = vertices.len();
    let index: BTreeMap<&VertexId, usize> = vertices.iter().enumerate().map(|(i, v)| (&v.id, i)).collect();
    let mut es = Vec::with_capacity(edges.len());
    for (a, b) in &edges {
        let ia = *index.get(a).ok_or_else(|| Error::UnknownVertex(a.0.clone()))?;
        let ib = *index.get(b).ok_or_else(|| Error::UnknownVertex(b.0.clone()))?;
        if ia == ib {
            return Err(Error::NotATree(format!("loop at {}", a)));
        }
        es.push((ia.min(ib), ia.max(ib)));
    }
    es.sort_unstable();
    if es.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::NotATree("repeated edge".into()));
    }
    if es.len() != n - 1 {
        return Err(Error::NotATree(format!("{} edges on {} vertices", es.len(), n)));
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &es {
        adj[a].push(b);
        adj[b].push(a);
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    let signs: Vec<Sign> = vertices
        .iter()
        .map(|v| if v.phantom { Sign::Negative } else { v.sign })
        .collect();
    let phantom: Vec<bool> = vertices.iter().map(|v| v.phantom).collect();
    let mut t = SignedTree {
        ids: vertices.into_iter().map(|v| v.id).collect(),
        signs,
        phantom,
        adj,
        edges: es,
        standard: VSet::EMPTY,
        neg: VSet::EMPTY,
        pos: VSet::EMPTY,
        paths: Vec::new(),
    };
    if t.component_of(VSet::EMPTY, 0).len() != n {
        return Err(Error::NotATree("disconnected".into()));
    }
    t.refresh();
    Ok(t)
}

impl SignedTree {
    /// Terse constructor: `("1", '-')` for a standard vertex, `('*')` sign for a phantom.
    pub fn from_spec(vertices: &[(&str, char)], edges: &[(&str, &str)]) -> Result<SignedTree> {
        let vs = vertices
            .iter()
            .map(|&(id, s)| VertexSpec {
                id: id.into(),
                sign: if s == '+' { Sign::Positive } else { Sign::Negative },
                phantom: s == '*',
            })
            .collect();
        let es = edges.iter().map(|&(a, b)| (a.into(), b.into())).collect();
        build_tree(vs, es)
    }

    pub fn from_file(f: TreeFile) -> Result<SignedTree> {
        build_tree(f.vertices, f.edges)
    }

    pub fn from_json(s: &str) -> Result<SignedTree> {
        let f: TreeFile = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_file(f)
    }

    pub fn to_file(&self) -> TreeFile {
        TreeFile {
            vertices: (0..self.n())
                .map(|v| VertexSpec {
                    id: self.ids[v].clone(),
                    sign: self.signs[v],
                    phantom: self.phantom[v],
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| (self.ids[a].clone(), self.ids[b].clone()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("tree serializes")
    }

    fn refresh(&mut self) {
        let n = self.n();
        self.standard = (0..n).filter(|&v| !self.phantom[v]).collect();
        self.neg = self.standard.iter().filter(|&v| self.signs[v] == Sign::Negative).collect();
        self.pos = self.standard.minus(self.neg);
        let mut paths = vec![VSet::EMPTY; n * n];
        for s in 0..n {
            let mut parent = vec![usize::MAX; n];
            parent[s] = s;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let here = if u == s { VSet::singleton(s) } else { paths[s * n + parent[u]].with(u) };
                paths[s * n + u] = here;
                for &w in &self.adj[u] {
                    if parent[w] == usize::MAX {
                        parent[w] = u;
                        queue.push_back(w);
                    }
                }
            }
        }
        self.paths = paths;
    }

    /// Total number of vertices, phantoms included.
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    /// Number of standard vertices.
    pub fn nu(&self) -> usize {
        self.standard.len()
    }

    pub fn id(&self, v: usize) -> &VertexId {
        &self.ids[v]
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn sign(&self, v: usize) -> Sign {
        self.signs[v]
    }

    pub fn is_phantom(&self, v: usize) -> bool {
        self.phantom[v]
    }

    pub fn is_negative(&self, v: usize) -> bool {
        self.neg.contains(v)
    }

    pub fn is_positive(&self, v: usize) -> bool {
        self.pos.contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges as index pairs `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn standard(&self) -> VSet {
        self.standard
    }

    /// Negative standard vertices.
    pub fn negatives(&self) -> VSet {
        self.neg
    }

    /// Positive standard vertices.
    pub fn positives(&self) -> VSet {
        self.pos
    }

    pub fn has_phantoms(&self) -> bool {
        self.phantom.iter().any(|&p| p)
    }

    pub fn all_vertices(&self) -> VSet {
        VSet::full(self.n())
    }

    pub fn index(&self, id: &str) -> Result<usize> {
        self.ids
            .binary_search_by(|x| x.cmp(&VertexId(id.to_string())))
            .map_err(|_| Error::UnknownVertex(id.to_string()))
    }

    pub fn standard_index(&self, id: &str) -> Result<usize> {
        let v = self.index(id)?;
        if self.phantom[v] {
            return Err(Error::PreconditionViolated(format!("{} is a phantom vertex", id)));
        }
        Ok(v)
    }

    /// Set of standard vertices with the given ids.
    pub fn set_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<VSet> {
        ids.iter().map(|s| self.standard_index(s.as_ref())).collect()
    }

    pub fn labels(&self, s: VSet) -> Vec<String> {
        s.iter().map(|v| self.ids[v].0.clone()).collect()
    }

    /// Comma-joined ids, e.g. `"1,2,4"`.
    pub fn key(&self, s: VSet) -> String {
        self.labels(s).join(",")
    }

    /// Vertices on the tree path from `u` to `v`, both included.
    pub fn path_set(&self, u: usize, v: usize) -> VSet {
        self.paths[u * self.n() + v]
    }

    /// Vertices strictly between `u` and `v`.
    pub fn between(&self, u: usize, v: usize) -> VSet {
        self.path_set(u, v).without(u).without(v)
    }

    /// The vertex sequence of the path from `u` to `v`.
    pub fn path(&self, u: usize, v: usize) -> Vec<usize> {
        let set = self.path_set(u, v);
        let mut out = vec![u];
        let mut cur = u;
        while cur != v {
            cur = *self.adj[cur]
                .iter()
                .find(|&&w| set.contains(w) && !out.contains(&w))
                .expect("path continues");
            out.push(cur);
        }
        out
    }

    pub fn is_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(&v)
    }

    /// Vertex set of the component of `T ∖ deleted` containing `start`.
    pub fn component_of(&self, deleted: VSet, start: usize) -> VSet {
        if deleted.contains(start) {
            return VSet::EMPTY;
        }
        let mut seen = VSet::singleton(start);
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !deleted.contains(w) && !seen.contains(w) {
                    seen.insert(w);
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Components of `T ∖ deleted`: vertex components by smallest vertex,
    /// then one open edge per edge with both endpoints deleted.
    pub fn components(&self, deleted: VSet) -> Vec<Component> {
        let mut out = Vec::new();
        let mut rest = self.all_vertices().minus(deleted);
        while let Some(s) = rest.first() {
            let c = self.component_of(deleted, s);
            rest = rest.minus(c);
            out.push(Component {
                vertices: c,
                open_edge: None,
            });
        }
        for &(a, b) in &self.edges {
            if deleted.contains(a) && deleted.contains(b) {
                out.push(Component {
                    vertices: VSet::EMPTY,
                    open_edge: Some((a, b)),
                });
            }
        }
        out
    }

    /// Deleted vertices adjacent to a component.
    pub fn boundary(&self, c: &Component) -> VSet {
        match c.open_edge {
            Some((a, b)) => VSet::from_indices([a, b]),
            None => self.neighborhood(c.vertices).minus(c.vertices),
        }
    }

    /// `s` together with all neighbors of its members.
    pub fn neighborhood(&self, s: VSet) -> VSet {
        s.iter().fold(s, |acc, v| self.adj[v].iter().fold(acc, |a, &w| a.with(w)))
    }

    pub fn is_connected(&self, s: VSet) -> bool {
        match s.first() {
            None => false,
            Some(v) => self.component_of(self.all_vertices().minus(s), v) == s,
        }
    }

    /// Copy of the tree with the given vertices turned into phantoms.
    pub fn with_phantoms(&self, s: VSet) -> SignedTree {
        let mut t = self.clone();
        for v in s.iter() {
            t.phantom[v] = true;
            t.signs[v] = Sign::Negative;
        }
        t.refresh();
        t
    }

    /// Copy of the tree with new signs on standard vertices.
    pub fn with_signs(&self, negative: VSet) -> SignedTree {
        let mut t = self.clone();
        for v in self.standard.iter() {
            t.signs[v] = if negative.contains(v) { Sign::Negative } else { Sign::Positive };
        }
        t.refresh();
        t
    }

    /// Standard vertices in canonical order.
    pub fn standard_list(&self) -> Vec<usize> {
        self.standard.iter().collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Transform {
    FlipAllSigns,
    Relabel(BTreeMap<VertexId, VertexId>),
    FlipLeafSign(VertexId),
    SwitchAdjacent(VertexId, VertexId),
}

/// Apply one of the complex-preserving operations.
pub fn transform(tree: &SignedTree, op: &Transform) -> Result<SignedTree> {
    let pre = |m: String| Err(Error::PreconditionViolated(m));
    match op {
        Transform::FlipAllSigns => Ok(tree.with_signs(tree.positives())),
        Transform::FlipLeafSign(id) => {
            let v = tree.standard_index(id.as_str())?;
            if tree.degree(v) != 1 {
                return pre(format!("{} is not a leaf", id));
            }
            let mut t = tree.clone();
            t.signs[v] = t.signs[v].flip();
            t.refresh();
            Ok(t)
        }
        Transform::SwitchAdjacent(a, b) => {
            let u = tree.standard_index(a.as_str())?;
            let v = tree.standard_index(b.as_str())?;
            if !tree.is_edge(u, v) {
                return pre(format!("{} and {} are not adjacent", a, b));
            }
            if tree.degree(u) > 2 || tree.degree(v) > 2 {
                return pre("both vertices need degree at most 2".into());
            }
            if tree.sign(u) == tree.sign(v) {
                return pre("signs are equal; use Relabel".into());
            }
            let mut t = tree.clone();
            t.signs.swap(u, v);
            t.refresh();
            Ok(t)
        }
        Transform::Relabel(map) => {
            let mut seen = HashSet::new();
            for k in map.keys() {
                tree.index(k.as_str())?;
            }
            let mut f = tree.to_file();
            for v in &mut f.vertices {
                if let Some(new) = map.get(&v.id) {
                    v.id = new.clone();
                }
                if !seen.insert(v.id.clone()) {
                    return pre(format!("relabeling is not injective at {}", v.id));
                }
            }
            for (a, b) in &mut f.edges {
                if let Some(new) = map.get(a) {
                    *a = new.clone();
                }
                if let Some(new) = map.get(b) {
                    *b = new.clone();
                }
            }
            SignedTree::from_file(f)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsoMode {
    Exact,
    Anti,
    UpToLeafSigns,
    AntiUpToLeafSigns,
}

/// Find a bijection `A → B` preserving edges, phantom flags and the sign
/// condition of `mode`.
pub fn signed_isomorphism(a: &SignedTree, b: &SignedTree, mode: IsoMode) -> Option<BTreeMap<VertexId, VertexId>> {
    let n = a.n();
    if n != b.n() || a.nu() != b.nu() {
        return None;
    }
    let sign_ok = |u: usize, w: usize| -> bool {
        if a.phantom[u] != b.phantom[w] || a.degree(u) != b.degree(w) {
            return false;
        }
        if a.phantom[u] {
            return true;
        }
        let leaf = a.degree(u) <= 1;
        match mode {
            IsoMode::Exact => a.signs[u] == b.signs[w],
            IsoMode::Anti => a.signs[u] != b.signs[w],
            IsoMode::UpToLeafSigns => leaf || a.signs[u] == b.signs[w],
            IsoMode::AntiUpToLeafSigns => leaf || a.signs[u] != b.signs[w],
        }
    };
    let to_map = |img: &[usize]| -> BTreeMap<VertexId, VertexId> {
        (0..n).map(|u| (a.ids[u].clone(), b.ids[img[u]].clone())).collect()
    };
    if a.ids == b.ids && a.edges == b.edges && (0..n).all(|u| sign_ok(u, u)) {
        return Some(to_map(&(0..n).collect::<Vec<_>>()));
    }
    // BFS order of A so that every vertex after the first has a mapped parent.
    let mut order = vec![0usize];
    let mut parent = vec![usize::MAX; n];
    let mut seen = VSet::singleton(0);
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        for &w in &a.adj[u] {
            if !seen.contains(w) {
                seen.insert(w);
                parent[w] = u;
                order.push(w);
            }
        }
        i += 1;
    }
    let mut img = vec![usize::MAX; n];
    let mut used = VSet::EMPTY;

    fn search(
        k: usize,
        order: &[usize],
        parent: &[usize],
        img: &mut Vec<usize>,
        used: &mut VSet,
        b: &SignedTree,
        ok: &dyn Fn(usize, usize) -> bool,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let u = order[k];
        let candidates: Vec<usize> = if k == 0 {
            (0..b.n()).collect()
        } else {
            b.adj[img[parent[u]]].clone()
        };
        for w in candidates {
            if used.contains(w) || !ok(u, w) {
                continue;
            }
            img[u] = w;
            used.insert(w);
            if search(k + 1, order, parent, img, used, b, ok) {
                return true;
            }
            *used = used.without(w);
        }
        img[u] = usize::MAX;
        false
    }

    if search(0, &order, &parent, &mut img, &mut used, b, &sign_ok) {
        Some(to_map(&img))
    } else {
        None
    }
}

/// Phantomize the complement of a relevant block, and the block itself.
pub fn phantom_split(tree: &SignedTree, block: VSet) -> Result<(SignedTree, SignedTree)> {
    blocks::require_relevant(tree, block)?;
    Ok((
        tree.with_phantoms(tree.standard().minus(block)),
        tree.with_phantoms(block),
    ))
}

/// Discrete model of the boundary of the thickened tree: a bottom and a top
/// copy of `T`, glued along columns at the leaves.
#[derive(Clone, Debug)]
pub struct BoundaryGraph {
    adj: Vec<Vec<usize>>,
}

pub const BOTTOM: usize = 0;
pub const TOP: usize = 1;

impl BoundaryGraph {
    pub fn new(tree: &SignedTree) -> BoundaryGraph {
        let n = tree.n();
        let mut adj = vec![Vec::new(); 2 * n];
        for &(u, v) in tree.edges() {
            for side in [BOTTOM, TOP] {
                adj[2 * u + side].push(2 * v + side);
                adj[2 * v + side].push(2 * u + side);
            }
        }
        for v in 0..n {
            if tree.degree(v) <= 1 {
                adj[2 * v].push(2 * v + 1);
                adj[2 * v + 1].push(2 * v);
            }
        }
        BoundaryGraph { adj }
    }

    pub fn node(v: usize, side: usize) -> usize {
        2 * v + side
    }

    pub fn lift(tree: &SignedTree, v: usize) -> usize {
        if tree.is_positive(v) {
            2 * v + TOP
        } else {
            2 * v + BOTTOM
        }
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Standard vertices whose lift is reachable from the lift of `root`
    /// through nodes that are not lifts of standard vertices.
    pub fn reachable_lifts(&self, tree: &SignedTree, root: usize) -> VSet {
        let is_lift = |x: usize| !tree.is_phantom(x / 2) && BoundaryGraph::lift(tree, x / 2) == x;
        let start = BoundaryGraph::lift(tree, root);
        let mut seen = vec![false; self.adj.len()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut found = VSet::EMPTY;
        while let Some(x) = stack.pop() {
            for &y in &self.adj[x] {
                if seen[y] {
                    continue;
                }
                seen[y] = true;
                if is_lift(y) {
                    found.insert(y / 2);
                } else {
                    stack.push(y);
                }
            }
        }
        found
    }
}

/// Neighbors of the root on the boundary of the thickened tree, i.e. the
/// standard vertices that can follow the root in a singleton order.
///
/// The boundary walk proposes candidates; a candidate `v` is kept when
/// `{root, v}` is a building block of the tree.
pub fn boundary_neighbors(tree: &SignedTree, root: usize) -> Result<VSet> {
    if tree.is_phantom(root) {
        return Err(Error::RootIsPhantom(tree.id(root).0.clone()));
    }
    let walk = BoundaryGraph::new(tree).reachable_lifts(tree, root);
    Ok(walk
        .iter()
        .filter(|&v| blocks::is_block(tree, VSet::from_indices([root, v])))
        .collect())
}
