//! Maximal clique enumeration (Bron–Kerbosch with Tomita pivoting) and
//! greedy clique completion.

use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::bitset::{BitGraph, BitSet};
use crate::error::{LoError, Result};
use crate::graph::{vertex_lookup, OrthogonalityGraph};

/// A clique as a sorted list of vertex indices of its source graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clique {
    vertices: Vec<usize>,
}

impl Clique {
    /// Sorts and dedups; does not check adjacency.
    pub fn new(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        Clique { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn is_clique_of(&self, g: &BitGraph) -> bool {
        g.is_clique(&self.vertices)
    }

    pub fn is_maximal_in(&self, g: &BitGraph) -> bool {
        self.is_clique_of(g) && common_neighbors(g, &self.vertices).is_empty()
    }

    /// Canonical event indices of the members.
    pub fn event_ids(&self, g: &OrthogonalityGraph) -> Vec<usize> {
        self.vertices.iter().map(|&v| g.event_id(v)).collect()
    }
}

/// Vertices adjacent to every member (all vertices when `vertices` is empty).
pub fn common_neighbors(g: &BitGraph, vertices: &[usize]) -> BitSet {
    let mut common = BitSet::full(g.order());
    for &v in vertices {
        common.intersect_with(g.neighbors(v));
    }
    common
}

/// Result of a bounded enumeration.
#[derive(Debug, Clone, Default)]
pub struct CliqueEnumeration {
    pub cliques: Vec<Clique>,
    /// Set when `limit` stopped the search early.
    pub truncated: bool,
}

/// A pending Bron–Kerbosch call `(R, P, X)`.
#[derive(Debug, Clone)]
pub struct Branch {
    pub clique: Vec<usize>,
    pub candidates: BitSet,
    pub excluded: BitSet,
}

impl Branch {
    /// The root call over the whole graph.
    pub fn root(g: &BitGraph) -> Self {
        Branch {
            clique: Vec::new(),
            candidates: BitSet::full(g.order()),
            excluded: BitSet::new(g.order()),
        }
    }

    /// All maximal cliques that contain `v`.
    pub fn containing(g: &BitGraph, v: usize) -> Self {
        Branch {
            clique: vec![v],
            candidates: g.neighbors(v).clone(),
            excluded: BitSet::new(g.order()),
        }
    }

    /// Top-level split along a degeneracy ordering: vertex `vᵢ` gets its
    /// later neighbors as candidates and earlier ones as excluded.
    pub fn degeneracy_split(g: &BitGraph) -> Vec<Branch> {
        let order = degeneracy_order(g);
        let mut earlier = BitSet::new(g.order());
        let mut later = BitSet::full(g.order());
        let mut out = Vec::with_capacity(order.len());
        for v in order {
            later.remove(v);
            out.push(Branch {
                clique: vec![v],
                candidates: g.neighbors(v).intersection(&later),
                excluded: g.neighbors(v).intersection(&earlier),
            });
            earlier.insert(v);
        }
        out
    }

    fn is_leaf(&self) -> bool {
        self.candidates.is_empty() && self.excluded.is_empty()
    }

    fn is_prunable(&self, min_size: usize) -> bool {
        self.clique.len() + self.candidates.count() < min_size
    }

    /// One pivoted Bron–Kerbosch step: the recursive calls this branch makes.
    pub fn children(&self, g: &BitGraph) -> Vec<Branch> {
        if self.is_leaf() || self.candidates.is_empty() {
            return Vec::new();
        }
        let pivot = choose_pivot(g, &self.candidates, &self.excluded);
        let mut p = self.candidates.clone();
        let mut x = self.excluded.clone();
        let mut out = Vec::new();
        for v in self.candidates.difference(g.neighbors(pivot)).iter() {
            let mut clique = self.clique.clone();
            clique.push(v);
            out.push(Branch {
                clique,
                candidates: p.intersection(g.neighbors(v)),
                excluded: x.intersection(g.neighbors(v)),
            });
            p.remove(v);
            x.insert(v);
        }
        out
    }
}

/// Smallest-last ordering (repeatedly remove a minimum-degree vertex).
pub fn degeneracy_order(g: &BitGraph) -> Vec<usize> {
    let n = g.order();
    let mut alive = BitSet::full(n);
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = alive
            .iter()
            .min_by_key(|&v| (degree[v], v))
            .expect("alive vertex");
        alive.remove(v);
        for u in g.neighbors(v).intersection(&alive).iter() {
            degree[u] -= 1;
        }
        order.push(v);
    }
    order
}

/// Tomita rule: the vertex of `P ∪ X` with most neighbors in `P`.
fn choose_pivot(g: &BitGraph, p: &BitSet, x: &BitSet) -> usize {
    let mut best = (0usize, usize::MAX);
    for u in p.iter().chain(x.iter()) {
        let score = p.intersection_count(g.neighbors(u));
        if best.1 == usize::MAX || score > best.0 {
            best = (score, u);
        }
    }
    best.1
}

fn expand<F>(
    g: &BitGraph,
    r: &mut Vec<usize>,
    mut p: BitSet,
    mut x: BitSet,
    min_size: usize,
    visit: &mut F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if p.is_empty() {
        if x.is_empty() && r.len() >= min_size {
            return visit(r);
        }
        return ControlFlow::Continue(());
    }
    if r.len() + p.count() < min_size {
        return ControlFlow::Continue(());
    }
    let pivot = choose_pivot(g, &p, &x);
    let moves = p.difference(g.neighbors(pivot));
    for v in moves.iter() {
        let nv = g.neighbors(v);
        r.push(v);
        let flow = expand(
            g,
            r,
            p.intersection(nv),
            x.intersection(nv),
            min_size,
            visit,
        );
        r.pop();
        flow?;
        p.remove(v);
        x.insert(v);
        if r.len() + p.count() < min_size {
            break;
        }
    }
    ControlFlow::Continue(())
}

/// Runs Bron–Kerbosch from `branch`, calling `visit` with each maximal
/// clique of size at least `min_size` (vertices in discovery order).
pub fn expand_branch<F>(
    g: &BitGraph,
    branch: &Branch,
    min_size: usize,
    mut visit: F,
) -> ControlFlow<()>
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if branch.is_prunable(min_size) {
        return ControlFlow::Continue(());
    }
    let mut r = branch.clique.clone();
    expand(
        g,
        &mut r,
        branch.candidates.clone(),
        branch.excluded.clone(),
        min_size,
        &mut visit,
    )
}

/// Streams every maximal clique of size at least `min_size` to `visit`.
/// Returns `false` if `visit` stopped the enumeration.
pub fn visit_maximal_cliques<F>(g: &BitGraph, min_size: usize, mut visit: F) -> bool
where
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if g.order() == 0 {
        return true;
    }
    for branch in Branch::degeneracy_split(g) {
        if expand_branch(g, &branch, min_size, &mut visit).is_break() {
            return false;
        }
    }
    true
}

/// Collects maximal cliques, stopping after `limit` of them.
pub fn enumerate_maximal_cliques(
    g: &BitGraph,
    min_size: usize,
    limit: Option<usize>,
) -> CliqueEnumeration {
    let mut cliques = Vec::new();
    let completed = visit_maximal_cliques(g, min_size, |c| {
        if limit.is_some_and(|l| cliques.len() >= l) {
            return ControlFlow::Break(());
        }
        cliques.push(Clique::new(c.to_vec()));
        ControlFlow::Continue(())
    });
    CliqueEnumeration {
        cliques,
        truncated: !completed,
    }
}

/// Splits `roots` into at least `target` independent branches (or until no
/// branch can be split further). Leaves that are already maximal cliques
/// are kept as branches with empty `P` and `X`.
pub fn split_branches(
    g: &BitGraph,
    roots: Vec<Branch>,
    target: usize,
    min_size: usize,
) -> Vec<Branch> {
    let mut current = roots;
    for _ in 0..4 {
        if current.len() >= target {
            break;
        }
        let mut next = Vec::new();
        let mut grew = false;
        for b in current {
            if b.is_prunable(min_size) {
                continue;
            }
            if b.candidates.is_empty() {
                next.push(b);
            } else {
                grew = true;
                next.extend(b.children(g));
            }
        }
        current = next;
        if !grew {
            break;
        }
    }
    current
}

/// Parallel enumeration below `roots`; `visit` runs on worker threads in
/// no particular order.
pub fn par_visit_branches<F>(g: &BitGraph, roots: Vec<Branch>, min_size: usize, visit: F)
where
    F: Fn(&[usize]) + Sync + Send,
{
    let target = rayon::current_num_threads() * 16;
    let branches = split_branches(g, roots, target, min_size);
    branches.par_iter().for_each(|b| {
        let _ = expand_branch(g, b, min_size, |c| {
            visit(c);
            ControlFlow::Continue(())
        });
    });
}

/// Parallel bounded enumeration. Output order is unspecified.
pub fn par_enumerate_maximal_cliques(
    g: &BitGraph,
    min_size: usize,
    limit: Option<usize>,
) -> CliqueEnumeration {
    if g.order() == 0 {
        return CliqueEnumeration::default();
    }
    let found = Mutex::new(Vec::new());
    let count = AtomicUsize::new(0);
    let truncated = AtomicBool::new(false);
    let target = rayon::current_num_threads() * 16;
    let branches = split_branches(g, Branch::degeneracy_split(g), target, min_size);
    branches.par_iter().for_each(|b| {
        if truncated.load(Ordering::Relaxed) {
            return;
        }
        let mut local = Vec::new();
        let _ = expand_branch(g, b, min_size, |c| {
            if let Some(l) = limit {
                if count.fetch_add(1, Ordering::Relaxed) >= l {
                    truncated.store(true, Ordering::Relaxed);
                    return ControlFlow::Break(());
                }
            }
            local.push(Clique::new(c.to_vec()));
            ControlFlow::Continue(())
        });
        found.lock().expect("clique sink").extend(local);
    });
    CliqueEnumeration {
        cliques: found.into_inner().expect("clique sink"),
        truncated: truncated.into_inner(),
    }
}

/// Greedily extends `seed` to a maximal clique, adding the lowest-index
/// admissible vertex first.
pub fn complete_to_maximal(g: &BitGraph, seed: &Clique) -> Result<Clique> {
    if !seed.is_clique_of(g) {
        return Err(LoError::NotAClique(format!("{:?}", seed.vertices())));
    }
    let mut members = seed.vertices.clone();
    let mut admissible = common_neighbors(g, &members);
    while let Some(v) = admissible.first() {
        members.push(v);
        admissible.intersect_with(g.neighbors(v));
    }
    Ok(Clique::new(members))
}

/// Re-identifies a clique of `sub` in `full` by event labels.
pub fn lift_clique(
    sub: &OrthogonalityGraph,
    full: &OrthogonalityGraph,
    clique: &Clique,
) -> Result<Clique> {
    sub.scenario().ensure_same(&full.scenario())?;
    let lookup = vertex_lookup(full);
    let mut out = Vec::with_capacity(clique.len());
    for &v in clique.vertices() {
        if v >= sub.order() {
            return Err(LoError::InvalidVertex(v));
        }
        let id = sub.event_id(v);
        out.push(
            *lookup
                .get(&id)
                .ok_or_else(|| LoError::NotAClique(format!("event {} absent", sub.event(v))))?,
        );
    }
    Ok(Clique::new(out))
}
