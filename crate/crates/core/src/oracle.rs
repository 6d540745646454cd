//! Exhaustive reference evaluators: Holant sums, Eulerian orientation
//! statistics, the Tutte polynomial, #CSP sums and matchgate signatures.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::instance::{PlanarInstance, RotationMap};
use crate::scalar::Scalar;

pub const DEFAULT_EDGE_CAP: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} has size {size}, above the cap {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },
    #[error("vertex v{0} does not have degree 4")]
    NotFourRegular(usize),
}

/// Edge cap for brute-force Holant sums, overridable by `SIXV_ORACLE_CAP`.
pub fn edge_cap() -> usize {
    std::env::var("SIXV_ORACLE_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_EDGE_CAP)
}

/// Vertex-by-vertex search state: the value of each half-edge once fixed.
struct Search<'a> {
    map: &'a RotationMap,
    tables: Vec<Vec<Scalar>>,
    order: Vec<usize>,
}

impl Search<'_> {
    fn new<'a>(map: &'a RotationMap, tables: Vec<Vec<Scalar>>) -> Search<'a> {
        // BFS order so that most half-edges of a vertex are fixed on arrival
        let nv = map.num_vertices();
        let mut seen = vec![false; nv];
        let mut order = Vec::with_capacity(nv);
        for s in 0..nv {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                order.push(v);
                for &h in map.rotation(v) {
                    let w = map.vertex_of(map.pair(h));
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        Search { map, tables, order }
    }

    /// Nonzero table entries at `v` compatible with the fixed half-edges.
    fn choices(&self, v: usize, val: &[i8]) -> Vec<usize> {
        let rot = self.map.rotation(v);
        let d = rot.len();
        let (mut mask, mut want) = (0usize, 0usize);
        for (k, &h) in rot.iter().enumerate() {
            if val[h] >= 0 {
                let bit = 1 << (d - 1 - k);
                mask |= bit;
                if val[h] == 1 {
                    want |= bit;
                }
            }
        }
        // a loop at v needs opposite values on its two ends
        let loops: Vec<(usize, usize)> = rot
            .iter()
            .enumerate()
            .filter(|&(_, &h)| self.map.vertex_of(self.map.pair(h)) == v)
            .map(|(k, &h)| (1 << (d - 1 - k), 1 << (d - 1 - self.map.position(self.map.pair(h)))))
            .collect();
        (0..1usize << d)
            .filter(|&idx| {
                idx & mask == want
                    && loops.iter().all(|&(p, q)| (idx & p == 0) != (idx & q == 0))
                    && !self.tables[v][idx].is_zero()
            })
            .collect()
    }

    fn apply(&self, v: usize, idx: usize, val: &mut [i8]) -> Vec<usize> {
        let rot = self.map.rotation(v);
        let d = rot.len();
        let mut set = Vec::new();
        for (k, &h) in rot.iter().enumerate() {
            let bit = ((idx >> (d - 1 - k)) & 1) as i8;
            if val[h] < 0 {
                val[h] = bit;
                set.push(h);
            }
            let p = self.map.pair(h);
            if val[p] < 0 {
                val[p] = 1 - bit;
                set.push(p);
            }
        }
        set
    }

    fn rec(&self, depth: usize, val: &mut [i8], visit: &mut dyn FnMut(&[i8])) {
        if depth == self.order.len() {
            visit(val);
            return;
        }
        let v = self.order[depth];
        for idx in self.choices(v, val) {
            let set = self.apply(v, idx, val);
            self.rec(depth + 1, val, visit);
            for h in set {
                val[h] = -1;
            }
        }
    }

    fn sum(&self, depth: usize, val: &mut [i8]) -> Scalar {
        if depth == self.order.len() {
            return Scalar::one();
        }
        let v = self.order[depth];
        let mut acc = Scalar::zero();
        for idx in self.choices(v, val) {
            let set = self.apply(v, idx, val);
            let rest = self.sum(depth + 1, val);
            if !rest.is_zero() {
                acc += &(&self.tables[v][idx] * &rest);
            }
            for h in set {
                val[h] = -1;
            }
        }
        acc
    }

    /// Splits the first `split` levels into independent branches.
    fn branches(&self, split: usize) -> Vec<(Scalar, Vec<i8>)> {
        let mut out = Vec::new();
        let mut val = vec![-1i8; self.map.num_half_edges()];
        self.collect(0, split.min(self.order.len()), Scalar::one(), &mut val, &mut out);
        out
    }

    fn collect(
        &self,
        depth: usize,
        stop: usize,
        w: Scalar,
        val: &mut [i8],
        out: &mut Vec<(Scalar, Vec<i8>)>,
    ) {
        if depth == stop {
            out.push((w, val.to_vec()));
            return;
        }
        let v = self.order[depth];
        for idx in self.choices(v, val) {
            let set = self.apply(v, idx, val);
            self.collect(depth + 1, stop, &w * &self.tables[v][idx], val, out);
            for h in set {
                val[h] = -1;
            }
        }
    }
}

/// Exact Holant sum by backtracking over nonzero local patterns.
pub fn holant_brute(inst: &PlanarInstance) -> Result<Scalar, OracleError> {
    holant_brute_jobs(inst, 1)
}

/// As [`holant_brute`], splitting the search over `jobs` workers.
pub fn holant_brute_jobs(inst: &PlanarInstance, jobs: usize) -> Result<Scalar, OracleError> {
    holant_brute_capped(inst, edge_cap(), jobs)
}

/// As [`holant_brute_jobs`] with an explicit edge cap. Instances whose
/// supports force most edges (compiled reductions) stay cheap well above
/// the default cap.
pub fn holant_brute_capped(
    inst: &PlanarInstance,
    cap: usize,
    jobs: usize,
) -> Result<Scalar, OracleError> {
    if inst.num_edges() > cap {
        return Err(OracleError::CapExceeded {
            what: "instance edge count",
            size: inst.num_edges(),
            cap,
        });
    }
    let search = Search::new(&inst.map, inst.tables());
    if jobs <= 1 {
        let mut val = vec![-1i8; inst.map.num_half_edges()];
        return Ok(search.sum(0, &mut val));
    }
    let branches = search.branches(2);
    let depth = 2.min(search.order.len());
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .expect("thread pool");
    Ok(pool.install(|| {
        branches
            .into_par_iter()
            .map(|(w, mut val)| &w * &search.sum(depth, &mut val))
            .reduce(Scalar::zero, |a, b| a + b)
    }))
}

/// Eulerian orientation count and the histogram of saddle counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OrientationStats {
    pub count: u64,
    pub saddles: BTreeMap<usize, u64>,
}

impl OrientationStats {
    /// `sum_O base^beta(O)`.
    pub fn weighted_sum(&self, base: &Scalar) -> Scalar {
        self.saddles
            .iter()
            .map(|(&k, &n)| &base.pow(k as u64) * &Scalar::from_i64(n as i64))
            .sum()
    }
}

const SADDLE_A: usize = 0b0101;
const SADDLE_B: usize = 0b1010;

pub fn eulerian_stats(map: &RotationMap) -> Result<OrientationStats, OracleError> {
    if let Some(v) = (0..map.num_vertices()).find(|&v| map.degree(v) != 4) {
        return Err(OracleError::NotFourRegular(v));
    }
    let cap = edge_cap();
    if map.num_edges() > cap {
        return Err(OracleError::CapExceeded {
            what: "map edge count",
            size: map.num_edges(),
            cap,
        });
    }
    let ice: Vec<Scalar> = (0..16)
        .map(|i: usize| Scalar::from_i64((i.count_ones() == 2) as i64))
        .collect();
    let search = Search::new(map, vec![ice; map.num_vertices()]);
    let mut stats = OrientationStats::default();
    let mut val = vec![-1i8; map.num_half_edges()];
    search.rec(0, &mut val, &mut |val| {
        let beta = (0..map.num_vertices())
            .filter(|&v| {
                let idx = map
                    .rotation(v)
                    .iter()
                    .fold(0usize, |acc, &h| (acc << 1) | val[h] as usize);
                idx == SADDLE_A || idx == SADDLE_B
            })
            .count();
        stats.count += 1;
        *stats.saddles.entry(beta).or_insert(0) += 1;
    });
    Ok(stats)
}

/// An abstract multigraph for the Tutte polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn from_map(map: &RotationMap) -> Graph {
        Graph {
            n: map.num_vertices(),
            edges: map
                .edges()
                .into_iter()
                .map(|(h, g)| (map.vertex_of(h), map.vertex_of(g)))
                .collect(),
        }
    }

    fn components_without(&self, skip: usize) -> usize {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        let mut comps = self.n;
        for (i, &(u, v)) in self.edges.iter().enumerate() {
            if i == skip {
                continue;
            }
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru] = rv;
                comps -= 1;
            }
        }
        comps
    }
}

pub const TUTTE_EDGE_CAP: usize = 18;

/// Tutte polynomial at `(x, y)` by deletion and contraction.
pub fn tutte(g: &Graph, x: &Scalar, y: &Scalar) -> Result<Scalar, OracleError> {
    if g.edges.len() > TUTTE_EDGE_CAP {
        return Err(OracleError::CapExceeded {
            what: "graph edge count",
            size: g.edges.len(),
            cap: TUTTE_EDGE_CAP,
        });
    }
    Ok(tutte_rec(g, x, y))
}

fn tutte_rec(g: &Graph, x: &Scalar, y: &Scalar) -> Scalar {
    let Some(&(u, v)) = g.edges.last() else {
        return Scalar::one();
    };
    let last = g.edges.len() - 1;
    let mut deleted = g.clone();
    deleted.edges.pop();
    if u == v {
        return y * &tutte_rec(&deleted, x, y);
    }
    let contracted = Graph {
        n: g.n,
        edges: deleted
            .edges
            .iter()
            .map(|&(p, q)| {
                let r = |t: usize| if t == v { u } else { t };
                (r(p), r(q))
            })
            .collect(),
    };
    if g.components_without(last) > g.components_without(usize::MAX) {
        return x * &tutte_rec(&contracted, x, y);
    }
    tutte_rec(&deleted, x, y) + tutte_rec(&contracted, x, y)
}

/// A constraint applied to a tuple of variables; the first variable is the
/// high bit of the table index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Constraint {
    pub vars: Vec<usize>,
    pub table: Vec<Scalar>,
}

impl Constraint {
    pub fn new(vars: Vec<usize>, table: Vec<Scalar>) -> Constraint {
        assert_eq!(table.len(), 1 << vars.len(), "table size must match arity");
        Constraint { vars, table }
    }

    pub fn value(&self, assignment: u64) -> &Scalar {
        let idx = self
            .vars
            .iter()
            .fold(0usize, |acc, &v| (acc << 1) | ((assignment >> v) & 1) as usize);
        &self.table[idx]
    }
}

pub const CSP_VAR_CAP: usize = 20;

/// `sum_{x in {0,1}^n} prod_c c(x)`; variable `k` is bit `k` of `x`.
pub fn csp_brute(n: usize, constraints: &[Constraint]) -> Result<Scalar, OracleError> {
    if n > CSP_VAR_CAP {
        return Err(OracleError::CapExceeded {
            what: "variable count",
            size: n,
            cap: CSP_VAR_CAP,
        });
    }
    let mut total = Scalar::zero();
    'outer: for x in 0u64..1 << n {
        let mut acc = Scalar::one();
        for c in constraints {
            let v = c.value(x);
            if v.is_zero() {
                continue 'outer;
            }
            acc *= v;
        }
        total += &acc;
    }
    Ok(total)
}

/// Weighted multigraph used for perfect-matching sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, Scalar)>,
}

pub const MATCHING_VERTEX_CAP: usize = 28;

/// Sum over perfect matchings of the product of edge weights, restricted to
/// the vertices in `alive`.
pub fn perfect_matching_sum(g: &WeightedGraph, alive: &[bool]) -> Scalar {
    let mut adj: Vec<Vec<(usize, &Scalar)>> = vec![Vec::new(); g.n];
    for (u, v, w) in &g.edges {
        if u != v && !w.is_zero() {
            adj[*u].push((*v, w));
            adj[*v].push((*u, w));
        }
    }
    let mut free = alive.to_vec();
    fn rec(adj: &[Vec<(usize, &Scalar)>], free: &mut [bool]) -> Scalar {
        let Some(u) = free.iter().position(|&f| f) else {
            return Scalar::one();
        };
        free[u] = false;
        let mut acc = Scalar::zero();
        for &(v, w) in &adj[u] {
            if free[v] {
                free[v] = false;
                let rest = rec(adj, free);
                if !rest.is_zero() {
                    acc += &(w * &rest);
                }
                free[v] = true;
            }
        }
        free[u] = true;
        acc
    }
    rec(&adj, &mut free)
}

/// Matchgate signature: the entry at `S` sums perfect matchings of the graph
/// with the externals flagged 1 in `S` removed. External `k` is bit
/// `len-1-k` of the index.
pub fn matching_signature(
    g: &WeightedGraph,
    externals: &[usize],
) -> Result<Vec<Scalar>, OracleError> {
    if g.n > MATCHING_VERTEX_CAP {
        return Err(OracleError::CapExceeded {
            what: "gadget vertex count",
            size: g.n,
            cap: MATCHING_VERTEX_CAP,
        });
    }
    let k = externals.len();
    Ok((0..1usize << k)
        .map(|s| {
            let mut alive = vec![true; g.n];
            for (i, &e) in externals.iter().enumerate() {
                if s >> (k - 1 - i) & 1 == 1 {
                    alive[e] = false;
                }
            }
            perfect_matching_sum(g, &alive)
        })
        .collect())
}
