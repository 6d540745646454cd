//! Matchgate evaluation: gadget synthesis, Kasteleyn orientations and
//! Pfaffians.
//!
//! A vertex signature in the matchgate class is realized by a small planar
//! weighted graph whose perfect matching sums, with the external vertices
//! flagged 1 deleted, reproduce the signature. Identifying the externals of
//! two gadgets enforces disequality on the shared edge, so replacing every
//! vertex by its gadget and gluing along edges turns the Holant sum into a
//! single perfect matching sum over a planar graph.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use petgraph::algo::maximum_matching;
use petgraph::graph::{NodeIndex, UnGraph};
use primal_check::miller_rabin;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{InstanceError, PlanarInstance, RotationMap, angle_cmp};
use crate::membership::{is_matchgate, is_matchgate_general, is_matchgate_hat};
use crate::oracle::{OracleError, WeightedGraph, matching_signature};
use crate::scalar::{Rational, Scalar};
use crate::signature::{GeneralSignature4, Signature, SixVertexSignature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchgateError {
    #[error("matrix is not skew-symmetric at ({0}, {1})")]
    NotSkew(usize, usize),
    #[error("signature {0} is not a matchgate signature")]
    NotMatchgate(String),
    #[error("signature {0} is not in the Hadamard image of the matchgate class")]
    NotMatchgateHat(String),
    #[error("gadget for {0} does not reproduce its signature")]
    Synthesis(String),
    #[error("vertex v{0} is not of degree 4")]
    NotFourRegular(usize),
    #[error("Kasteleyn orientation failed: {0}")]
    Kasteleyn(String),
    #[error("assembled graph is not planar")]
    NotPlanar,
    #[error("graph is disconnected")]
    Disconnected,
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

// ---------------------------------------------------------------------------
// Pfaffians

fn check_skew(a: &[Vec<Scalar>]) -> Result<(), MatchgateError> {
    let n = a.len();
    for i in 0..n {
        if a[i].len() != n || !a[i][i].is_zero() {
            return Err(MatchgateError::NotSkew(i, i));
        }
        for j in i + 1..n {
            if a[i][j] != -&a[j][i] {
                return Err(MatchgateError::NotSkew(i, j));
            }
        }
    }
    Ok(())
}

/// Exact Pfaffian by skew elimination. Only rows touched by the pivot pair
/// are updated, so sparse banded inputs stay cheap.
pub fn pfaffian(a: &[Vec<Scalar>]) -> Result<Scalar, MatchgateError> {
    check_skew(a)?;
    let n = a.len();
    if n % 2 == 1 {
        return Ok(Scalar::zero());
    }
    let mut m: Vec<Vec<Scalar>> = a.to_vec();
    let mut pf = Scalar::one();
    for k in (0..n).step_by(2) {
        let Some(j) = (k + 1..n).find(|&j| !m[k][j].is_zero()) else {
            return Ok(Scalar::zero());
        };
        if j != k + 1 {
            m.swap(k + 1, j);
            for row in m.iter_mut() {
                row.swap(k + 1, j);
            }
            pf = -pf;
        }
        let piv = m[k][k + 1].clone();
        pf *= &piv;
        let inv = piv.inv().expect("nonzero pivot");
        let support: Vec<usize> = (k + 2..n)
            .filter(|&i| !m[k][i].is_zero() || !m[k + 1][i].is_zero())
            .collect();
        let u: Vec<Scalar> = support.iter().map(|&i| m[k][i].clone()).collect();
        let v: Vec<Scalar> = support.iter().map(|&i| m[k + 1][i].clone()).collect();
        for (x, &i) in support.iter().enumerate() {
            for (y, &j) in support.iter().enumerate().skip(x + 1) {
                let d = &(&(&v[x] * &u[y]) - &(&u[x] * &v[y])) * &inv;
                if d.is_zero() {
                    continue;
                }
                let new = &m[i][j] + &d;
                m[j][i] = -&new;
                m[i][j] = new;
            }
        }
    }
    Ok(pf)
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Pfaffian over `F_p` of a dense row-major skew matrix.
fn pfaffian_mod_p(m: &mut [u64], n: usize, p: u64) -> u64 {
    if n % 2 == 1 {
        return 0;
    }
    let neg = |x: u64| if x == 0 { 0 } else { p - x };
    let mut pf = 1u64;
    let mut u = Vec::new();
    let mut v = Vec::new();
    let mut support = Vec::new();
    for k in (0..n).step_by(2) {
        let Some(j) = (k + 1..n).find(|&j| m[k * n + j] != 0) else {
            return 0;
        };
        if j != k + 1 {
            for c in 0..n {
                m.swap((k + 1) * n + c, j * n + c);
            }
            for r in 0..n {
                m.swap(r * n + k + 1, r * n + j);
            }
            pf = neg(pf);
        }
        let piv = m[k * n + k + 1];
        pf = mul_mod(pf, piv, p);
        let inv = pow_mod(piv, p - 2, p);
        support.clear();
        u.clear();
        v.clear();
        for i in k + 2..n {
            let (a, b) = (m[k * n + i], m[(k + 1) * n + i]);
            if a != 0 || b != 0 {
                support.push(i);
                u.push(a);
                v.push(mul_mod(b, inv, p));
            }
        }
        for x in 0..support.len() {
            let i = support[x];
            for y in x + 1..support.len() {
                let j = support[y];
                let t1 = mul_mod(v[x], u[y], p);
                let t2 = mul_mod(u[x], v[y], p);
                let d = (t1 + p - t2) % p;
                if d == 0 {
                    continue;
                }
                let new = (m[i * n + j] + d) % p;
                m[i * n + j] = new;
                m[j * n + i] = neg(new);
            }
        }
    }
    pf
}

/// Primes `p = 1 (mod 8)` just below `2^62`, so that `F_p` holds the
/// primitive eighth roots of unity.
fn primes() -> impl Iterator<Item = u64> {
    let start = (1u64 << 62) - ((1u64 << 62) % 8) + 1 - 8;
    (0..).map(move |k| start - 8 * k).filter(|&p| miller_rabin(p))
}

fn eighth_root(p: u64) -> u64 {
    (2..)
        .map(|g| pow_mod(g, (p - 1) / 8, p))
        .find(|&r| pow_mod(r, 4, p) == p - 1)
        .unwrap()
}

fn big_mod(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().unwrap()
}

/// Sparse skew matrix over the field, upper triangle only.
#[derive(Clone, Debug, Default)]
pub struct SkewMatrix {
    pub n: usize,
    pub upper: BTreeMap<(usize, usize), Scalar>,
}

impl SkewMatrix {
    pub fn new(n: usize) -> Self {
        SkewMatrix { n, upper: BTreeMap::new() }
    }

    /// Adds `w` at `(i, j)` and `-w` at `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, w: &Scalar) {
        assert_ne!(i, j);
        let (key, w) = if i < j { ((i, j), w.clone()) } else { ((j, i), -w) };
        let e = self.upper.entry(key).or_insert_with(Scalar::zero);
        *e += &w;
    }

    pub fn dense(&self) -> Vec<Vec<Scalar>> {
        let mut a = vec![vec![Scalar::zero(); self.n]; self.n];
        for (&(i, j), w) in &self.upper {
            a[i][j] = w.clone();
            a[j][i] = -w;
        }
        a
    }

    pub fn pfaffian_exact(&self) -> Scalar {
        pfaffian(&self.dense()).expect("skew by construction")
    }

    /// Pfaffian through reductions modulo primes `p = 1 (mod 8)`: each of the
    /// four embeddings `w -> r^{1,3,5,7}` gives one value, the coefficients
    /// are recovered by the inverse transform, and primes are added until a
    /// Hadamard bound is cleared.
    pub fn pfaffian_modular(&self) -> Scalar {
        let n = self.n;
        if n % 2 == 1 {
            return Scalar::zero();
        }
        if n == 0 {
            return Scalar::one();
        }
        // common denominator
        let mut den = BigInt::one();
        for w in self.upper.values() {
            let (_, d) = w.int_parts();
            den = den.lcm(&d);
        }
        let entries: Vec<(usize, usize, [BigInt; 4])> = self
            .upper
            .iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(&(i, j), w)| {
                let (c, d) = w.int_parts();
                let s = &den / &d;
                (i, j, c.map(|x| x * &s))
            })
            .collect();
        let bound_bits = hadamard_bits(n, &entries) + 8.0;
        let mut modulus = BigInt::one();
        let mut acc: [BigInt; 4] = Default::default();
        for p in primes() {
            let r = eighth_root(p);
            let roots: Vec<u64> = [1, 3, 5, 7].iter().map(|&e| pow_mod(r, e, p)).collect();
            let reduced: Vec<(usize, usize, [u64; 4])> = entries
                .iter()
                .map(|(i, j, c)| (*i, *j, [0, 1, 2, 3].map(|k| big_mod(&c[k], p))))
                .collect();
            let mut vals = [0u64; 4];
            let mut m = vec![0u64; n * n];
            for (slot, &rj) in vals.iter_mut().zip(&roots) {
                m.iter_mut().for_each(|x| *x = 0);
                let pw = [1, rj, mul_mod(rj, rj, p), pow_mod(rj, 3, p)];
                for (i, j, c) in &reduced {
                    let x = (0..4).fold(0u64, |s, k| (s + mul_mod(c[k], pw[k], p)) % p);
                    m[i * n + j] = x;
                    m[j * n + i] = if x == 0 { 0 } else { p - x };
                }
                *slot = pfaffian_mod_p(&mut m, n, p);
            }
            // c_k = (1/4) sum_j vals_j r_j^{-k}
            let inv4 = pow_mod(4, p - 2, p);
            let coeffs: [u64; 4] = [0, 1, 2, 3].map(|k| {
                let s = (0..4).fold(0u64, |s, j| {
                    let rinv = pow_mod(roots[j], p - 2, p);
                    (s + mul_mod(vals[j], pow_mod(rinv, k as u64, p), p)) % p
                });
                mul_mod(s, inv4, p)
            });
            // incremental CRT
            let pb = BigInt::from(p);
            let minv = BigInt::from(pow_mod(big_mod(&modulus, p), p - 2, p));
            for k in 0..4 {
                let diff = (BigInt::from(coeffs[k]) - &acc[k]).mod_floor(&pb);
                let t = (diff * &minv).mod_floor(&pb);
                acc[k] = &acc[k] + &modulus * t;
            }
            modulus *= &pb;
            if modulus.bits() as f64 > bound_bits + 1.0 {
                break;
            }
        }
        let half = &modulus >> 1;
        let coeffs: [Rational; 4] = acc.map(|c| {
            let c = if c > half { c - &modulus } else { c };
            Rational::from_integer(c)
        });
        let scaled = Scalar::from_coeffs(&coeffs);
        let denom = Scalar::from_rational(&Rational::from_integer(den.pow(n as u32 / 2)));
        scaled.checked_div(&denom).expect("nonzero denominator")
    }
}

/// log2 of a bound on every coefficient of the Pfaffian of an integral
/// matrix: the maximum over complex embeddings of the square root of the
/// Hadamard bound.
fn hadamard_bits(n: usize, entries: &[(usize, usize, [BigInt; 4])]) -> f64 {
    let mut best: f64 = 0.0;
    for j in [1.0f64, 3.0, 5.0, 7.0] {
        let mut norms = vec![0.0f64; n];
        for (a, b, c) in entries {
            let (mut re, mut im) = (0.0, 0.0);
            for (k, ck) in c.iter().enumerate() {
                let t = std::f64::consts::FRAC_PI_4 * j * k as f64;
                let v = big_to_f64(ck);
                re += v * t.cos();
                im += v * t.sin();
            }
            let sq = re * re + im * im + 1e-9;
            norms[*a] += sq;
            norms[*b] += sq;
        }
        if norms.iter().any(|&x| x == 0.0) {
            return 0.0;
        }
        // per-row l2 norms, halved for the square root of the determinant bound
        let bits: f64 = norms.iter().map(|x| 0.25 * x.log2()).sum();
        best = best.max(bits * (1.0 + 1e-9));
    }
    best
}

fn big_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        let b = x.bits() as i32;
        let s = if x.is_negative() { -1.0 } else { 1.0 };
        s * 2f64.powi(b)
    })
}

// ---------------------------------------------------------------------------
// Plane graphs and Kasteleyn orientations

/// A weighted plane graph: `weights[e]` belongs to the `e`-th pair in
/// `map.edges()` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedPlaneGraph {
    pub map: RotationMap,
    pub weights: Vec<Scalar>,
    pub externals: Vec<usize>,
}

impl WeightedPlaneGraph {
    pub fn to_weighted_graph(&self) -> WeightedGraph {
        let edges = self
            .map
            .edges()
            .iter()
            .zip(&self.weights)
            .map(|(&(h, g), w)| (self.map.vertex_of(h), self.map.vertex_of(g), w.clone()))
            .collect();
        WeightedGraph {
            n: self.map.num_vertices(),
            edges,
        }
    }

    /// Matchgate signature by enumeration.
    pub fn signature(&self) -> Result<Vec<Scalar>, OracleError> {
        matching_signature(&self.to_weighted_graph(), &self.externals)
    }

    /// Weighted perfect matching sum of the whole graph by FKT.
    pub fn perfect_matching_sum(&self, seed: u64) -> Result<Scalar, MatchgateError> {
        plane_matching_sum(&self.map, &self.weights, seed, Solver::Auto)
    }
}

/// Direction bit per edge in `map.edges()` order: `true` means from the
/// vertex of the lower half-edge to the vertex of the higher one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KasteleynOrientation {
    pub forward: Vec<bool>,
}

fn edge_index(map: &RotationMap) -> Vec<usize> {
    let mut idx = vec![0; map.num_half_edges()];
    for (e, &(h, g)) in map.edges().iter().enumerate() {
        idx[h] = e;
        idx[g] = e;
    }
    idx
}

/// Number of half-edges of `face` whose edge points along the traversal.
fn clockwise_count(face: &[usize], edges: &[(usize, usize)], eidx: &[usize], fw: &[bool]) -> usize {
    face.iter()
        .filter(|&&h| {
            let e = eidx[h];
            fw[e] == (edges[e].0 == h)
        })
        .count()
}

/// Spanning tree edges oriented at random, then the remaining edges fixed
/// face by face from the leaves of the dual tree towards the outer face.
/// The seed picks the tree root, the outer face and the tree directions.
pub fn kasteleyn_orient(map: &RotationMap, seed: u64) -> Result<KasteleynOrientation, MatchgateError> {
    let nv = map.num_vertices();
    let edges = map.edges();
    let ne = edges.len();
    if nv == 0 {
        return Ok(KasteleynOrientation { forward: vec![] });
    }
    if !map.is_connected() {
        return Err(MatchgateError::Disconnected);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eidx = edge_index(map);
    let mut fw = vec![false; ne];
    let mut set = vec![false; ne];
    let root = rng.gen_range(0..nv);
    let mut seen = vec![false; nv];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        for &h in map.rotation(u) {
            let w = map.vertex_of(map.pair(h));
            if !seen[w] {
                seen[w] = true;
                let e = eidx[h];
                set[e] = true;
                fw[e] = rng.gen_bool(0.5);
                queue.push_back(w);
            }
        }
    }
    let faces = map.faces();
    let mut face_of = vec![0; map.num_half_edges()];
    for (f, face) in faces.iter().enumerate() {
        for &h in face {
            face_of[h] = f;
        }
    }
    let outer = rng.gen_range(0..faces.len());
    let mut open: Vec<usize> = faces
        .iter()
        .map(|face| face.iter().filter(|&&h| !set[eidx[h]]).count())
        .collect();
    let mut ready: Vec<usize> = (0..faces.len())
        .filter(|&f| f != outer && open[f] == 1)
        .collect();
    while let Some(f) = ready.pop() {
        if open[f] != 1 {
            continue;
        }
        let h = *faces[f].iter().find(|&&h| !set[eidx[h]]).unwrap();
        let e = eidx[h];
        set[e] = true;
        // orient so that the face ends with an odd count
        fw[e] = true;
        let c = clockwise_count(&faces[f], &edges, &eidx, &fw);
        if c % 2 == 0 {
            fw[e] = false;
        }
        open[f] = 0;
        let other = face_of[map.pair(h)];
        if other != f {
            open[other] -= 1;
            if other != outer && open[other] == 1 {
                ready.push(other);
            }
        }
    }
    if set.iter().any(|s| !s) {
        return Err(MatchgateError::Kasteleyn("edges left unoriented".into()));
    }
    for (f, face) in faces.iter().enumerate() {
        if f != outer && clockwise_count(face, &edges, &eidx, &fw) % 2 == 0 {
            return Err(MatchgateError::Kasteleyn(format!("face {f} has even clockwise count")));
        }
    }
    Ok(KasteleynOrientation { forward: fw })
}

/// Reverse Cuthill-McKee order: `order[new] = old`.
fn bandwidth_order(n: usize, adj: &[Vec<usize>]) -> Vec<usize> {
    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| adj[v].len());
    for &s in &by_degree {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            order.push(u);
            let mut next: Vec<usize> = adj[u].iter().copied().filter(|&w| !seen[w]).collect();
            next.sort_by_key(|&w| adj[w].len());
            next.dedup();
            for w in next {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
    }
    order.reverse();
    order
}

fn permutation_sign(seq: &[usize]) -> bool {
    // true for odd
    let mut seen = vec![false; seq.len()];
    let mut odd = false;
    for s in 0..seq.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut i = s;
        while !seen[i] {
            seen[i] = true;
            i = seq[i];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Solver {
    Exact,
    Modular,
    Auto,
}

/// Pfaffian sizes up to this use exact elimination under `Solver::Auto`.
pub const EXACT_PFAFFIAN_LIMIT: usize = 64;

/// Weighted perfect matching sum of a plane graph (self-loops ignored).
pub fn plane_matching_sum(
    map: &RotationMap,
    weights: &[Scalar],
    seed: u64,
    solver: Solver,
) -> Result<Scalar, MatchgateError> {
    let n = map.num_vertices();
    if n == 0 {
        return Ok(Scalar::one());
    }
    if n % 2 == 1 {
        return Ok(Scalar::zero());
    }
    let orient = kasteleyn_orient(map, seed)?;
    let edges = map.edges();
    let mut adj = vec![Vec::new(); n];
    for &(h, g) in &edges {
        let (u, v) = (map.vertex_of(h), map.vertex_of(g));
        if u != v {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    let order = bandwidth_order(n, &adj);
    let mut pos = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        pos[old] = new;
    }
    let mut k = SkewMatrix::new(n);
    // orientation sign of the unit matrix per vertex pair
    let mut unit: BTreeMap<(usize, usize), Option<bool>> = BTreeMap::new();
    let mut g: UnGraph<(), ()> = UnGraph::with_capacity(n, edges.len());
    for _ in 0..n {
        g.add_node(());
    }
    for (e, &(h, hg)) in edges.iter().enumerate() {
        let (mut u, mut v) = (pos[map.vertex_of(h)], pos[map.vertex_of(hg)]);
        if u == v {
            continue;
        }
        if !orient.forward[e] {
            std::mem::swap(&mut u, &mut v);
        }
        k.add(u, v, &weights[e]);
        let key = (u.min(v), u.max(v));
        let positive = u < v;
        // parallel edges may disagree only where no perfect matching uses them
        match unit.get(&key) {
            Some(&Some(prev)) if prev != positive => {
                unit.insert(key, None);
            }
            Some(_) => {}
            None => {
                unit.insert(key, Some(positive));
                g.add_edge(NodeIndex::new(u), NodeIndex::new(v), ());
            }
        }
    }
    let m = maximum_matching(&g);
    if !m.is_perfect() {
        return Ok(Scalar::zero());
    }
    let mut seq = Vec::with_capacity(n);
    let mut negative = false;
    for (a, b) in m.edges() {
        let (i, j) = (a.index().min(b.index()), a.index().max(b.index()));
        seq.push(i);
        seq.push(j);
        match unit[&(i, j)] {
            Some(positive) => negative ^= !positive,
            None => return Err(MatchgateError::Kasteleyn("parallel edges disagree".into())),
        }
    }
    negative ^= permutation_sign(&seq);
    let solver = match solver {
        Solver::Auto if n <= EXACT_PFAFFIAN_LIMIT => Solver::Exact,
        Solver::Auto => Solver::Modular,
        s => s,
    };
    let pf = match solver {
        Solver::Exact => k.pfaffian_exact(),
        _ => k.pfaffian_modular(),
    };
    Ok(if negative { -pf } else { pf })
}

// ---------------------------------------------------------------------------
// Gadgets

/// A plane gadget with its four externals and, per external, the incident
/// half-edges in ccw order starting just after the outer face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gadget {
    pub graph: WeightedPlaneGraph,
    pub ports: Vec<Vec<usize>>,
}

impl Gadget {
    fn from_layout(
        points: &[(i64, i64)],
        edges: &[(usize, usize, Scalar)],
        externals: [usize; 4],
    ) -> Gadget {
        let plain: Vec<(usize, usize)> = edges.iter().map(|&(u, v, _)| (u, v)).collect();
        let map = RotationMap::from_points(points, &plain);
        let weights = edges.iter().map(|e| e.2.clone()).collect();
        let cx: i64 = externals.iter().map(|&e| points[e].0).sum::<i64>();
        let cy: i64 = externals.iter().map(|&e| points[e].1).sum::<i64>();
        let ports = externals
            .iter()
            .map(|&x| {
                let out = (4 * points[x].0 - cx, 4 * points[x].1 - cy);
                let dir = |h: usize| {
                    let w = map.vertex_of(map.pair(h));
                    let d = (points[w].0 - points[x].0, points[w].1 - points[x].1);
                    // direction in a frame whose x-axis is the outward vector
                    (out.0 * d.0 + out.1 * d.1, out.0 * d.1 - out.1 * d.0)
                };
                let mut hs = map.rotation(x).to_vec();
                hs.sort_by(|&p, &q| angle_cmp(dir(p), dir(q)));
                hs
            })
            .collect();
        Gadget {
            graph: WeightedPlaneGraph {
                map,
                weights,
                externals: externals.to_vec(),
            },
            ports,
        }
    }

    pub fn signature(&self) -> Result<Vec<Scalar>, OracleError> {
        self.graph.signature()
    }
}

const SQUARE: [(i64, i64); 4] = [(0, 0), (10, 0), (10, 10), (0, 10)];

fn pendant_point(k: usize) -> (i64, i64) {
    let (x, y) = SQUARE[k];
    (2 * x - 5, 2 * y - 5)
}

/// Adds a unit pendant edge at each external selected by `flip`
/// (external `k` is bit `3-k`); the pendant vertex becomes the new
/// external. The signature becomes `sigma -> old(sigma ^ flip)`.
fn with_flips(
    mut points: Vec<(i64, i64)>,
    mut edges: Vec<(usize, usize, Scalar)>,
    mut externals: [usize; 4],
    flip: usize,
) -> Gadget {
    for k in 0..4 {
        if flip >> (3 - k) & 1 == 1 {
            let p = points.len();
            points.push(pendant_point(k));
            edges.push((externals[k], p, Scalar::one()));
            externals[k] = p;
        }
    }
    Gadget::from_layout(&points, &edges, externals)
}

/// Wheel on the square with a hub; valid when `c != 0`. Spokes to 2, 3, 4
/// carry a, c, b; rims (1,2) and (4,1) carry y/c and x/c; the rest are 0.
/// External 1 is flipped.
fn wheel(f: &SixVertexSignature) -> Gadget {
    let zero = Scalar::zero;
    let cinv = f.c.inv().expect("c != 0");
    let mut points = SQUARE.to_vec();
    points.push((5, 5));
    let h = 4;
    let edges = vec![
        (h, 0, zero()),
        (h, 1, f.a.clone()),
        (h, 2, f.c.clone()),
        (h, 3, f.b.clone()),
        (0, 1, &f.y * &cinv),
        (1, 2, zero()),
        (2, 3, zero()),
        (3, 0, &f.x * &cinv),
    ];
    with_flips(points, edges, [0, 1, 2, 3], 0b1000)
}

/// Two inner vertices `u ~ {1,2,3}`, `v ~ {3,4,1}` joined by an edge, plus
/// the square rim; realizes any even-parity matchgate `g` with
/// `g(1111) != 0`.
fn uv_layout(g: &GeneralSignature4) -> (Vec<(i64, i64)>, Vec<(usize, usize, Scalar)>) {
    let v = &g.v;
    let e = v[0b1111].clone();
    let einv = e.inv().expect("g(1111) != 0");
    let mut points = SQUARE.to_vec();
    points.push((6, 3));
    points.push((4, 7));
    let (u, w) = (4, 5);
    let edges = vec![
        (u, w, e),
        (u, 0, v[0b0101].clone()),
        (u, 1, v[0b1010].clone()),
        (w, 2, Scalar::one()),
        (w, 3, Scalar::one()),
        (0, 1, &v[0b0011] * &einv),
        (1, 2, &(&v[0b1001] - &v[0b1010]) * &einv),
        (2, 3, &v[0b1100] * &einv),
        (3, 0, &(&v[0b0110] - &v[0b0101]) * &einv),
    ];
    (points, edges)
}

/// Gadget for an arbitrary arity-4 matchgate signature: flip the externals
/// so that a support point lands on `1111`, then use the two-vertex gadget.
pub fn synthesize_general(g: &GeneralSignature4) -> Result<Gadget, MatchgateError> {
    if !is_matchgate_general(g) {
        return Err(MatchgateError::NotMatchgate(g.to_string()));
    }
    let gadget = match g.v.iter().position(|s| !s.is_zero()) {
        // a hub with zero spokes: every pattern leaves an odd vertex set or zero weights
        None => {
            let mut points = SQUARE.to_vec();
            points.push((5, 5));
            let edges = (0..4).map(|k| (4, k, Scalar::zero())).collect();
            with_flips(points, edges, [0, 1, 2, 3], 0)
        }
        Some(s) => {
            let flip = s ^ 0b1111;
            let (points, edges) = uv_layout(&g.flip(flip));
            with_flips(points, edges, [0, 1, 2, 3], flip)
        }
    };
    verify(&gadget, &g.v, || g.to_string())?;
    Ok(gadget)
}

fn verify(gadget: &Gadget, target: &[Scalar], name: impl Fn() -> String) -> Result<(), MatchgateError> {
    if gadget.signature()? != target {
        return Err(MatchgateError::Synthesis(name()));
    }
    Ok(())
}

/// Gadget for a six-vertex matchgate signature, with the scalar relating
/// its matching signature to `f` (always 1 for these templates).
pub fn synthesize(f: &SixVertexSignature) -> Result<(Gadget, Scalar), MatchgateError> {
    if !is_matchgate(f) {
        return Err(MatchgateError::NotMatchgate(f.to_string()));
    }
    let gadget = if !f.c.is_zero() {
        wheel(f)
    } else if !f.z.is_zero() {
        // one quarter turn brings z into the c slot; the externals shift by one
        let r = wheel(&f.rotate(1));
        let ext = &r.graph.externals;
        let mut g = r.clone();
        g.graph.externals = vec![ext[3], ext[0], ext[1], ext[2]];
        g.ports = vec![r.ports[3].clone(), r.ports[0].clone(), r.ports[1].clone(), r.ports[2].clone()];
        g
    } else {
        return Ok((synthesize_general(&f.to_general())?, Scalar::one()));
    };
    verify(&gadget, &f.to_general().v, || f.to_string())?;
    Ok((gadget, Scalar::one()))
}

// ---------------------------------------------------------------------------
// Assembly

enum Join {
    /// Externals of the two ends are identified (disequality).
    Glue,
    /// Externals are joined by an edge of the given weight.
    Edge(Scalar),
}

/// Composite plane graph: every vertex replaced by its gadget.
fn assemble(inst_map: &RotationMap, gadgets: &[&Gadget], join: Join) -> Result<(RotationMap, Vec<Scalar>), MatchgateError> {
    let nv = inst_map.num_vertices();
    let mut next = 0usize;
    let mut fresh = || {
        next += 1;
        next - 1
    };
    // global id of each instance half-edge's port
    let mut port_vertex = vec![usize::MAX; inst_map.num_half_edges()];
    let mut connectors = Vec::new();
    match join {
        Join::Glue => {
            for (h, g) in inst_map.edges() {
                let x = fresh();
                port_vertex[h] = x;
                port_vertex[g] = x;
            }
        }
        Join::Edge(_) => {
            for (h, g) in inst_map.edges() {
                port_vertex[h] = fresh();
                port_vertex[g] = fresh();
                connectors.push((h, g));
            }
        }
    }
    // local vertex -> global vertex, per instance vertex
    let mut local: Vec<Vec<usize>> = Vec::with_capacity(nv);
    for v in 0..nv {
        let gd = gadgets[v];
        let mut ids = vec![usize::MAX; gd.graph.map.num_vertices()];
        for (k, &x) in gd.graph.externals.iter().enumerate() {
            ids[x] = port_vertex[inst_map.rotation(v)[k]];
        }
        for id in ids.iter_mut() {
            if *id == usize::MAX {
                *id = fresh();
            }
        }
        local.push(ids);
    }
    let total = next;
    let mut edge_ends: Vec<(usize, usize)> = Vec::new();
    let mut weights = Vec::new();
    // global half-edge of each local half-edge, per instance vertex
    let mut ghe: Vec<Vec<Option<usize>>> = Vec::with_capacity(nv);
    for v in 0..nv {
        let gd = &gadgets[v].graph;
        let mut map_he = vec![None; gd.map.num_half_edges()];
        for (i, &(h, g)) in gd.map.edges().iter().enumerate() {
            let (a, b) = (local[v][gd.map.vertex_of(h)], local[v][gd.map.vertex_of(g)]);
            if a == b {
                continue;
            }
            let e = edge_ends.len();
            edge_ends.push((a, b));
            weights.push(gd.weights[i].clone());
            map_he[h] = Some(2 * e);
            map_he[g] = Some(2 * e + 1);
        }
        ghe.push(map_he);
    }
    let mut rot: Vec<Vec<usize>> = vec![Vec::new(); total];
    for v in 0..nv {
        let gd = &gadgets[v].graph;
        let ext: Vec<usize> = gd.externals.clone();
        for x in 0..gd.map.num_vertices() {
            if ext.contains(&x) {
                continue;
            }
            rot[local[v][x]] = gd.map.rotation(x).iter().filter_map(|&h| ghe[v][h]).collect();
        }
    }
    // ports: append each side's block in instance half-edge order
    for h in 0..inst_map.num_half_edges() {
        let v = inst_map.vertex_of(h);
        let k = inst_map.position(h);
        let block: Vec<usize> = gadgets[v].ports[k].iter().filter_map(|&lh| ghe[v][lh]).collect();
        let x = port_vertex[h];
        rot[x].extend(block);
    }
    if let Join::Edge(w) = &join {
        for (h, g) in connectors {
            let e = edge_ends.len();
            edge_ends.push((port_vertex[h], port_vertex[g]));
            weights.push(w.clone());
            rot[port_vertex[h]].push(2 * e);
            rot[port_vertex[g]].push(2 * e + 1);
        }
    }
    let pair = (0..2 * edge_ends.len()).map(|h| h ^ 1).collect();
    let map = RotationMap::new(rot, pair)?;
    if map.check_planar().is_err() {
        return Err(MatchgateError::NotPlanar);
    }
    Ok((map, weights))
}

fn check_quartic(inst: &PlanarInstance) -> Result<(), MatchgateError> {
    match (0..inst.map.num_vertices()).find(|&v| inst.map.degree(v) != 4) {
        Some(v) => Err(MatchgateError::NotFourRegular(v)),
        None => Ok(()),
    }
}

/// Holant value through matchgates, for instances whose labels are all
/// matchgate signatures.
pub fn fkt_eval(inst: &PlanarInstance) -> Result<Scalar, MatchgateError> {
    fkt_eval_with(inst, 0, Solver::Auto)
}

pub fn fkt_eval_with(inst: &PlanarInstance, seed: u64, solver: Solver) -> Result<Scalar, MatchgateError> {
    check_quartic(inst)?;
    let mut built = Vec::with_capacity(inst.signatures.len());
    let mut scale = Vec::with_capacity(inst.signatures.len());
    for (_, sig) in &inst.signatures {
        let (g, s) = match sig {
            Signature::Six(f) => synthesize(f)?,
            Signature::Quad(q) => (synthesize_general(q)?, Scalar::one()),
            other => return Err(MatchgateError::NotMatchgate(other.to_string())),
        };
        built.push(g);
        scale.push(s);
    }
    let gadgets: Vec<&Gadget> = inst.labels.iter().map(|&l| &built[l]).collect();
    let (map, weights) = assemble(&inst.map, &gadgets, Join::Glue)?;
    let pm = plane_matching_sum(&map, &weights, seed, solver)?;
    let norm: Scalar = inst.labels.iter().map(|&l| scale[l].clone()).product();
    Ok(pm.checked_div(&norm).expect("nonzero synthesis scalar"))
}

/// Holant value after the Hadamard basis change: each vertex carries
/// `H^{(x)4} f / 4` and each edge becomes `[1, 0, 0, -1]`, realized by a
/// single edge of weight -1 between the two gadgets.
pub fn fkt_eval_hat(inst: &PlanarInstance) -> Result<Scalar, MatchgateError> {
    fkt_eval_hat_with(inst, 0, Solver::Auto)
}

pub fn fkt_eval_hat_with(inst: &PlanarInstance, seed: u64, solver: Solver) -> Result<Scalar, MatchgateError> {
    check_quartic(inst)?;
    let quarter = Scalar::from_ratio(1, 4);
    let mut built = Vec::with_capacity(inst.signatures.len());
    for (_, sig) in &inst.signatures {
        let g = match sig {
            Signature::Six(f) if is_matchgate_hat(f) => f.to_general(),
            Signature::Quad(q) if is_matchgate_general(&q.hadamard_image()) => q.clone(),
            other => return Err(MatchgateError::NotMatchgateHat(other.to_string())),
        };
        built.push(synthesize_general(&g.hadamard_image().scale(&quarter))?);
    }
    let gadgets: Vec<&Gadget> = inst.labels.iter().map(|&l| &built[l]).collect();
    let (map, weights) = assemble(&inst.map, &gadgets, Join::Edge(-Scalar::one()))?;
    plane_matching_sum(&map, &weights, seed, solver)
}
