//! Random dependency graphs with community structure.
//!
//! Variables are split into communities. Inside a community some variables
//! are exogenous (no incoming edge) and the rest read from community members,
//! with the undirected structure kept connected. Optional bridge links then
//! join distinct communities.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::expr::Expr;
use crate::params::{GenerationParams, ParamError};

/// Directed dependency `src -> dst`: the equation of `dst` reads `src`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub propagates: bool,
}

impl Edge {
    pub fn new(src: usize, dst: usize) -> Self {
        Edge {
            src,
            dst,
            propagates: false,
        }
    }

    pub fn is_self_loop(&self) -> bool {
        self.src == self.dst
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DependencyGraph {
    d: usize,
    communities: Vec<Vec<usize>>,
    edges: Vec<Edge>,
}

impl DependencyGraph {
    /// Builds a graph, sorting communities and edges into canonical order.
    /// No invariant is checked here, see [`validate_graph`].
    pub fn new(d: usize, mut communities: Vec<Vec<usize>>, mut edges: Vec<Edge>) -> Self {
        for c in &mut communities {
            c.sort_unstable();
        }
        communities.sort();
        edges.sort_by_key(|e| (e.src, e.dst));
        DependencyGraph {
            d,
            communities,
            edges,
        }
    }

    /// Graph implied by a system of equations: one edge per referenced
    /// variable, communities are the weakly connected components.
    pub fn from_equations(equations: &[Expr]) -> Self {
        let d = equations.len();
        let mut edges = Vec::new();
        for (dst, eq) in equations.iter().enumerate() {
            for src in eq.required_lags().into_keys() {
                edges.push(Edge::new(src, dst));
            }
        }
        let mut uf = UnionFind::new(d);
        for e in &edges {
            uf.union(e.src, e.dst);
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; d];
        for v in 0..d {
            let root = uf.find(v);
            if slot[root] == usize::MAX {
                slot[root] = groups.len();
                groups.push(Vec::new());
            }
            groups[slot[root]].push(v);
        }
        DependencyGraph::new(d, groups, edges)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn communities(&self) -> &[Vec<usize>] {
        &self.communities
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edges_mut(&mut self) -> &mut [Edge] {
        &mut self.edges
    }

    pub fn edge(&self, src: usize, dst: usize) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&(src, dst), |e| (e.src, e.dst))
            .ok()
            .map(|i| &self.edges[i])
    }

    /// Sorted parent set of `v`.
    pub fn parents(&self, v: usize) -> Vec<usize> {
        let mut p: Vec<usize> = self
            .edges
            .iter()
            .filter(|e| e.dst == v)
            .map(|e| e.src)
            .collect();
        p.sort_unstable();
        p
    }

    pub fn indegree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.dst == v).count()
    }

    pub fn is_exogenous(&self, v: usize) -> bool {
        self.indegree(v) == 0
    }

    pub fn exogenous(&self) -> Vec<usize> {
        (0..self.d).filter(|&v| self.is_exogenous(v)).collect()
    }

    pub fn community_of(&self, v: usize) -> Option<usize> {
        self.communities.iter().position(|c| c.contains(&v))
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("infeasible graph parameters: {0}")]
    Infeasible(String),
}

/// Communities plus the variables held back for bridge links.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommunityAssignment {
    pub groups: Vec<Vec<usize>>,
    pub held_out: Vec<usize>,
}

/// Splits `vars` into `k` nonempty groups, holding up to `max_held_out`
/// variables aside (never so many that a group would be empty).
pub fn assign_communities<R: Rng + ?Sized>(
    vars: &[usize],
    k: usize,
    max_held_out: usize,
    rng: &mut R,
) -> Result<CommunityAssignment, GraphError> {
    if k == 0 || k > vars.len() {
        return Err(GraphError::Infeasible(alloc::format!(
            "cannot split {} variables into {k} nonempty communities",
            vars.len()
        )));
    }
    let mut order = vars.to_vec();
    order.shuffle(rng);
    let held = rng.random_range(0..=max_held_out.min(vars.len() - k));
    let (held_out, rest) = order.split_at(held);
    let mut groups = vec![Vec::new(); k];
    for (i, &v) in rest.iter().enumerate() {
        let g = if i < k { i } else { rng.random_range(0..k) };
        groups[g].push(v);
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    let mut held_out = held_out.to_vec();
    held_out.sort_unstable();
    Ok(CommunityAssignment { groups, held_out })
}

/// Largest exogenous count for which `n` nodes can still be connected when
/// each endogenous node accepts at most `max_indegree` parents, with `spare`
/// parent slots left over where possible.
fn max_exogenous(n: usize, max_indegree: usize, spare: usize) -> usize {
    (1..n)
        .rev()
        .find(|&e| n - 1 + spare <= (n - e) * max_indegree)
        .unwrap_or(1)
}

/// Splits a community into exogenous and endogenous variables. A singleton
/// community is entirely exogenous; otherwise both sides are nonempty and the
/// exogenous side is small enough for the community to stay connected under
/// the indegree cap.
pub fn pick_exogenous<R: Rng + ?Sized>(
    community: &[usize],
    max_indegree: usize,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    split_exogenous(community, max_indegree, 0, rng)
}

fn split_exogenous<R: Rng + ?Sized>(
    community: &[usize],
    max_indegree: usize,
    spare: usize,
    rng: &mut R,
) -> (Vec<usize>, Vec<usize>) {
    let n = community.len();
    if n <= 1 {
        return (community.to_vec(), Vec::new());
    }
    let count = rng.random_range(1..=max_exogenous(n, max_indegree.max(1), spare));
    let mut order = community.to_vec();
    order.shuffle(rng);
    let (exo, endo) = order.split_at(count);
    let (mut exo, mut endo) = (exo.to_vec(), endo.to_vec());
    exo.sort_unstable();
    endo.sort_unstable();
    (exo, endo)
}

/// Spanning edges of one community: a random tree over the endogenous nodes
/// plus one edge out of every exogenous node.
fn spanning_edges<R: Rng + ?Sized>(
    exo: &[usize],
    endo: &[usize],
    max_indegree: usize,
    indegree: &mut [usize],
    rng: &mut R,
) -> Vec<Edge> {
    let mut edges = Vec::new();
    if endo.is_empty() {
        return edges;
    }
    let mut order = endo.to_vec();
    order.shuffle(rng);
    for i in 1..order.len() {
        let src = order[rng.random_range(0..i)];
        indegree[order[i]] += 1;
        edges.push(Edge::new(src, order[i]));
    }
    for &x in exo {
        let open: Vec<usize> = endo
            .iter()
            .copied()
            .filter(|&v| indegree[v] < max_indegree)
            .collect();
        let dst = *open
            .choose(rng)
            .expect("exogenous count keeps spanning capacity");
        indegree[dst] += 1;
        edges.push(Edge::new(x, dst));
    }
    edges
}

/// Adds random admissible intra-community edges until the community holds
/// `target` of them or no admissible pair is left.
fn extra_edges<R: Rng + ?Sized>(
    exo: &[usize],
    endo: &[usize],
    max_indegree: usize,
    target: usize,
    indegree: &mut [usize],
    edges: &mut Vec<Edge>,
    rng: &mut R,
) {
    let inside = |e: &Edge| endo.contains(&e.dst) && (endo.contains(&e.src) || exo.contains(&e.src));
    let mut count = edges.iter().filter(|e| inside(e)).count();
    let mut pairs: Vec<(usize, usize)> = exo
        .iter()
        .chain(endo)
        .flat_map(|&s| endo.iter().map(move |&t| (s, t)))
        .collect();
    pairs.sort_unstable();
    pairs.shuffle(rng);
    for (src, dst) in pairs {
        if count >= target {
            break;
        }
        if indegree[dst] < max_indegree && !edges.iter().any(|e| e.src == src && e.dst == dst) {
            indegree[dst] += 1;
            edges.push(Edge::new(src, dst));
            count += 1;
        }
    }
}

/// Attempts at a full graph before reporting infeasible bridge links.
const GRAPH_ATTEMPTS: usize = 16;

/// Draws a dependency graph for `params`.
///
/// Each community gets a spanning structure, then the inter-community links
/// are placed, then extra intra-community edges up to a target drawn in
/// `[|c|, |endo(c)| * max_indegree]` (capped at what the in-degree cap still
/// admits).
pub fn generate_graph<R: Rng + ?Sized>(
    params: &GenerationParams,
    rng: &mut R,
) -> Result<DependencyGraph, GraphError> {
    params.validate()?;
    let mut last = None;
    for _ in 0..GRAPH_ATTEMPTS {
        match try_generate_graph(params, rng) {
            Ok(g) => return Ok(g),
            Err(e) => last = Some(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

fn try_generate_graph<R: Rng + ?Sized>(
    params: &GenerationParams,
    rng: &mut R,
) -> Result<DependencyGraph, GraphError> {
    let d = params.d;
    let cap = params.max_indegree;
    let links = if params.link_communities {
        params.nb_links
    } else {
        0
    };
    let vars: Vec<usize> = (0..d).collect();
    let CommunityAssignment {
        mut groups,
        held_out,
    } = assign_communities(&vars, params.num_communities, links, rng)?;

    // Held-out variables join the community they will bridge into.
    let mut bridge_candidate = vec![false; d];
    for &h in &held_out {
        let g = rng.random_range(0..groups.len());
        groups[g].push(h);
        groups[g].sort_unstable();
        bridge_candidate[h] = true;
    }

    let mut indegree = vec![0usize; d];
    let mut exogenous = vec![false; d];
    let mut edges = Vec::new();
    let mut splits = Vec::with_capacity(groups.len());
    for c in &groups {
        let (exo, endo) = split_exogenous(c, cap, links, rng);
        for &x in &exo {
            exogenous[x] = true;
        }
        edges.extend(spanning_edges(&exo, &endo, cap, &mut indegree, rng));
        splits.push((exo, endo));
    }

    let community: Vec<usize> = {
        let mut m = vec![0; d];
        for (i, c) in groups.iter().enumerate() {
            for &v in c {
                m[v] = i;
            }
        }
        m
    };
    for _ in 0..links {
        let edge = pick_bridge(&groups, &community, &exogenous, &indegree, &edges, &bridge_candidate, cap, rng)
            .ok_or_else(|| {
                GraphError::Infeasible(String::from(
                    "no admissible pair left for an inter-community link",
                ))
            })?;
        indegree[edge.dst] += 1;
        bridge_candidate[edge.src] = false;
        bridge_candidate[edge.dst] = false;
        edges.push(edge);
    }

    for (exo, endo) in &splits {
        if endo.is_empty() {
            continue;
        }
        let n = exo.len() + endo.len();
        let hi = endo.len() * cap.min(n);
        let target = rng.random_range(n.min(hi)..=hi);
        extra_edges(exo, endo, cap, target, &mut indegree, &mut edges, rng);
    }

    Ok(DependencyGraph::new(d, groups, edges))
}

#[allow(clippy::too_many_arguments)]
fn pick_bridge<R: Rng + ?Sized>(
    groups: &[Vec<usize>],
    community: &[usize],
    exogenous: &[bool],
    indegree: &[usize],
    edges: &[Edge],
    preferred: &[bool],
    cap: usize,
    rng: &mut R,
) -> Option<Edge> {
    let exists = |s: usize, t: usize| edges.iter().any(|e| e.src == s && e.dst == t);
    let open_dst = |v: usize| !exogenous[v] && indegree[v] < cap;
    let prefer = |pool: Vec<usize>| -> Vec<usize> {
        let p: Vec<usize> = pool.iter().copied().filter(|&v| preferred[v]).collect();
        if p.is_empty() {
            pool
        } else {
            p
        }
    };
    let k = groups.len();
    for _ in 0..100 {
        let c1 = rng.random_range(0..k);
        let c2 = (c1 + rng.random_range(1..k)) % k;
        let dsts = prefer(groups[c2].iter().copied().filter(|&v| open_dst(v)).collect());
        let Some(&dst) = dsts.choose(rng) else {
            continue;
        };
        let srcs = prefer(groups[c1].clone());
        let &src = srcs.choose(rng)?;
        if !exists(src, dst) {
            return Some(Edge::new(src, dst));
        }
    }
    // Dense corner: enumerate everything still admissible.
    let mut all = Vec::new();
    for (src, &cs) in community.iter().enumerate() {
        for (dst, &cd) in community.iter().enumerate() {
            if cs != cd && open_dst(dst) && !exists(src, dst) {
                all.push(Edge::new(src, dst));
            }
        }
    }
    all.choose(rng).copied()
}

/// A broken [`DependencyGraph`] invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphViolation {
    EndpointOutOfRange { src: usize, dst: usize },
    DuplicateEdge { src: usize, dst: usize },
    IndegreeExceeded { var: usize, indegree: usize },
    /// A variable is missing from the communities or listed more than once.
    NotAPartition { var: usize },
    EmptyCommunity { community: usize },
    NoExogenous { community: usize },
    CommunityDisconnected { community: usize },
    CrossCommunityEdge { src: usize, dst: usize },
}

/// Lists every violated invariant; empty when the graph is valid.
pub fn validate_graph(g: &DependencyGraph, params: &GenerationParams) -> Vec<GraphViolation> {
    let d = g.d();
    let mut out = Vec::new();

    let mut seen = vec![0usize; d];
    let mut owner = vec![usize::MAX; d];
    for (ci, c) in g.communities().iter().enumerate() {
        if c.is_empty() {
            out.push(GraphViolation::EmptyCommunity { community: ci });
        }
        for &v in c {
            if v < d {
                seen[v] += 1;
                owner[v] = ci;
            } else {
                out.push(GraphViolation::NotAPartition { var: v });
            }
        }
    }
    for (v, &n) in seen.iter().enumerate() {
        if n != 1 {
            out.push(GraphViolation::NotAPartition { var: v });
        }
    }

    let mut indegree = vec![0usize; d];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for e in g.edges() {
        if e.src >= d || e.dst >= d {
            out.push(GraphViolation::EndpointOutOfRange {
                src: e.src,
                dst: e.dst,
            });
            continue;
        }
        indegree[e.dst] += 1;
        pairs.push((e.src, e.dst));
        if !params.link_communities && owner[e.src] != owner[e.dst] {
            out.push(GraphViolation::CrossCommunityEdge {
                src: e.src,
                dst: e.dst,
            });
        }
    }
    pairs.sort_unstable();
    for w in pairs.windows(2) {
        if w[0] == w[1] {
            out.push(GraphViolation::DuplicateEdge {
                src: w[0].0,
                dst: w[0].1,
            });
        }
    }
    for (v, &n) in indegree.iter().enumerate() {
        if n > params.max_indegree {
            out.push(GraphViolation::IndegreeExceeded { var: v, indegree: n });
        }
    }

    for (ci, c) in g.communities().iter().enumerate() {
        let members: Vec<usize> = c.iter().copied().filter(|&v| v < d).collect();
        if members.is_empty() {
            continue;
        }
        if !members.iter().any(|&v| indegree[v] == 0) {
            out.push(GraphViolation::NoExogenous { community: ci });
        }
        let mut uf = UnionFind::new(d);
        for e in g.edges() {
            if e.src < d && e.dst < d && owner[e.src] == ci && owner[e.dst] == ci {
                uf.union(e.src, e.dst);
            }
        }
        let root = uf.find(members[0]);
        if members.iter().any(|&v| uf.find(v) != root) {
            out.push(GraphViolation::CommunityDisconnected { community: ci });
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}
