//! Planar instances as rotation systems.
//!
//! Half-edges are numbered `0..2m`. Each vertex lists its half-edges in
//! counterclockwise order and `pair` is the edge involution. In a Holant
//! instance every edge carries `!=2`; the value of a half-edge is 1 when the
//! edge points away from its vertex, so nonzero terms of a six-vertex
//! instance are exactly the Eulerian orientations.
//!
//! With this convention the physical arrow types map onto the six entries as
//! follows, reading the ccw half-edges `x1..x4` of a vertex: `a` has `x3, x4`
//! outgoing, `b` has `x2, x3`, `c` has `x2, x4`, `x` has `x1, x2`, `y` has
//! `x1, x4` and `z` has `x1, x3`. The saddle patterns are `c` and `z`.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::Scalar;
use crate::signature::{Signature, SignatureError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("half-edge pairing is not a fixed-point-free involution at h{0}")]
    MalformedInvolution(usize),
    #[error("half-edge h{0} does not appear exactly once in the vertex table")]
    Coverage(usize),
    #[error("component has V - E + F = {v} - {e} + {f} = {chi}, not 2")]
    NonPlanar { v: usize, e: usize, f: usize, chi: i64 },
    #[error("vertex v{vertex} has degree {degree} but its signature has arity {arity}")]
    ArityMismatch { vertex: usize, degree: usize, arity: usize },
    #[error("graph is not connected")]
    Disconnected,
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown signature `{0}`")]
    UnknownSignature(String),
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

/// A combinatorial map; loops and parallel edges are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationMap {
    rot: Vec<Vec<usize>>,
    pair: Vec<usize>,
    vertex_of: Vec<usize>,
    pos: Vec<usize>,
}

impl RotationMap {
    /// Validates the involution and the vertex table. Planarity is checked
    /// separately by [`RotationMap::check_planar`].
    pub fn new(rot: Vec<Vec<usize>>, pair: Vec<usize>) -> Result<Self, InstanceError> {
        let n = pair.len();
        for (h, &p) in pair.iter().enumerate() {
            if p >= n || p == h || pair[p] != h {
                return Err(InstanceError::MalformedInvolution(h));
            }
        }
        let mut vertex_of = vec![usize::MAX; n];
        let mut pos = vec![0; n];
        for (v, list) in rot.iter().enumerate() {
            for (i, &h) in list.iter().enumerate() {
                if h >= n || vertex_of[h] != usize::MAX {
                    return Err(InstanceError::Coverage(h.min(n.saturating_sub(1))));
                }
                vertex_of[h] = v;
                pos[h] = i;
            }
        }
        if let Some(h) = vertex_of.iter().position(|&v| v == usize::MAX) {
            return Err(InstanceError::Coverage(h));
        }
        Ok(RotationMap {
            rot,
            pair,
            vertex_of,
            pos,
        })
    }

    /// Builds a map from an edge list and per-vertex ccw neighbour order
    /// given as edge ids; `edges[e] = (u, v)` uses half-edges `2e` at `u`
    /// and `2e+1` at `v`.
    pub fn from_edge_rotations(
        edges: &[(usize, usize)],
        order: &[Vec<(usize, bool)>],
    ) -> Result<Self, InstanceError> {
        let rot = order
            .iter()
            .map(|l| l.iter().map(|&(e, tail)| 2 * e + usize::from(!tail)).collect())
            .collect();
        let pair = (0..2 * edges.len()).map(|h| h ^ 1).collect();
        RotationMap::new(rot, pair)
    }

    /// Straight-line embedding: rotations come from sorting neighbours by
    /// angle around integer points. Loops and multi-edges are not expressible.
    pub fn from_points(points: &[(i64, i64)], edges: &[(usize, usize)]) -> Self {
        let mut order: Vec<Vec<(usize, bool)>> = vec![Vec::new(); points.len()];
        for (e, &(u, v)) in edges.iter().enumerate() {
            assert_ne!(u, v, "straight-line embeddings have no loops");
            order[u].push((e, true));
            order[v].push((e, false));
        }
        for (u, list) in order.iter_mut().enumerate() {
            let dir = |&(e, tail): &(usize, bool)| {
                let (a, b) = edges[e];
                let w = if tail { b } else { a };
                (points[w].0 - points[u].0, points[w].1 - points[u].1)
            };
            list.sort_by(|p, q| angle_cmp(dir(p), dir(q)));
        }
        RotationMap::from_edge_rotations(edges, &order).expect("valid by construction")
    }

    pub fn num_vertices(&self) -> usize {
        self.rot.len()
    }

    pub fn num_half_edges(&self) -> usize {
        self.pair.len()
    }

    pub fn num_edges(&self) -> usize {
        self.pair.len() / 2
    }

    pub fn rotation(&self, v: usize) -> &[usize] {
        &self.rot[v]
    }

    pub fn rotations(&self) -> &[Vec<usize>] {
        &self.rot
    }

    pub fn pair(&self, h: usize) -> usize {
        self.pair[h]
    }

    pub fn pairs(&self) -> &[usize] {
        &self.pair
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rot[v].len()
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.vertex_of[h]
    }

    /// Position of `h` inside its vertex's rotation list.
    pub fn position(&self, h: usize) -> usize {
        self.pos[h]
    }

    /// Counterclockwise successor of `h` around its vertex.
    pub fn next_ccw(&self, h: usize) -> usize {
        let l = &self.rot[self.vertex_of[h]];
        l[(self.pos[h] + 1) % l.len()]
    }

    pub fn prev_ccw(&self, h: usize) -> usize {
        let l = &self.rot[self.vertex_of[h]];
        l[(self.pos[h] + l.len() - 1) % l.len()]
    }

    /// Edges as `(h, pair(h))` with `h < pair(h)`, sorted by `h`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.pair.len())
            .filter(|&h| h < self.pair[h])
            .map(|h| (h, self.pair[h]))
            .collect()
    }

    /// Face boundaries as orbits of `h -> next_ccw(pair(h))`.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let n = self.pair.len();
        let mut seen = vec![false; n];
        let mut faces = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut face = Vec::new();
            let mut h = s;
            while !seen[h] {
                seen[h] = true;
                face.push(h);
                h = self.next_ccw(self.pair[h]);
            }
            faces.push(face);
        }
        faces
    }

    /// Connected components as vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let nv = self.rot.len();
        let mut comp = vec![usize::MAX; nv];
        let mut out = Vec::new();
        for s in 0..nv {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            let mut members = Vec::new();
            comp[s] = id;
            while let Some(v) = stack.pop() {
                members.push(v);
                for &h in &self.rot[v] {
                    let w = self.vertex_of[self.pair[h]];
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Verifies `V - E + F = 2` on every connected component.
    pub fn check_planar(&self) -> Result<(), InstanceError> {
        let faces = self.faces();
        let comps = self.components();
        let mut comp_of = vec![0; self.rot.len()];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                comp_of[v] = i;
            }
        }
        let mut v = vec![0usize; comps.len()];
        let mut e = vec![0usize; comps.len()];
        let mut f = vec![0usize; comps.len()];
        for (i, c) in comps.iter().enumerate() {
            v[i] = c.len();
            let hs: usize = c.iter().map(|&x| self.rot[x].len()).sum();
            e[i] = hs / 2;
            if hs == 0 {
                f[i] = 1;
            }
        }
        for face in &faces {
            f[comp_of[self.vertex_of[face[0]]]] += 1;
        }
        for i in 0..comps.len() {
            let chi = v[i] as i64 - e[i] as i64 + f[i] as i64;
            if chi != 2 {
                return Err(InstanceError::NonPlanar {
                    v: v[i],
                    e: e[i],
                    f: f[i],
                    chi,
                });
            }
        }
        Ok(())
    }

    /// Renames half-edge `h` to `perm[h]`.
    pub fn relabel(&self, perm: &[usize]) -> RotationMap {
        let rot = self
            .rot
            .iter()
            .map(|l| l.iter().map(|&h| perm[h]).collect())
            .collect();
        let mut pair = vec![0; self.pair.len()];
        for h in 0..self.pair.len() {
            pair[perm[h]] = perm[self.pair[h]];
        }
        RotationMap::new(rot, pair).expect("relabeling preserves validity")
    }

    /// Medial graph: one vertex per edge, one edge per face corner. The
    /// medial vertex of edge `k` (half-edges `h < h'`) has ccw half-edges
    /// `[P(h'), S(h), P(h), S(h')]` where `S(g) = 2g` and `P(g) = 2g+1`, and
    /// `S(g)` is paired with `P(next_ccw(g))`.
    pub fn medial(&self) -> Result<RotationMap, InstanceError> {
        if !self.is_connected() {
            return Err(InstanceError::Disconnected);
        }
        let n = self.pair.len();
        let s = |g: usize| 2 * g;
        let p = |g: usize| 2 * g + 1;
        let mut pair = vec![0; 2 * n];
        for g in 0..n {
            let t = self.next_ccw(g);
            pair[s(g)] = p(t);
            pair[p(t)] = s(g);
        }
        let rot = self
            .edges()
            .into_iter()
            .map(|(h, h2)| vec![p(h2), s(h), p(h), s(h2)])
            .collect();
        let m = RotationMap::new(rot, pair)?;
        debug_assert!(m.check_planar().is_ok());
        Ok(m)
    }

    /// Renumbers half-edges in vertex order so that vertex `v`'s list is a
    /// contiguous ascending run.
    pub fn canonical(&self) -> RotationMap {
        let mut perm = vec![0; self.pair.len()];
        let mut k = 0;
        for l in &self.rot {
            for &h in l {
                perm[h] = k;
                k += 1;
            }
        }
        self.relabel(&perm)
    }
}

/// Orders direction vectors counterclockwise starting from the positive x axis.
pub(crate) fn angle_cmp(p: (i64, i64), q: (i64, i64)) -> std::cmp::Ordering {
    let half = |(x, y): (i64, i64)| if y > 0 || (y == 0 && x > 0) { 0 } else { 1 };
    half(p)
        .cmp(&half(q))
        .then_with(|| (q.0 * p.1).cmp(&(p.0 * q.1)))
}

/// A planar Holant(`!=2` | labels) instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarInstance {
    pub map: RotationMap,
    pub signatures: Vec<(String, Signature)>,
    pub labels: Vec<usize>,
}

impl PlanarInstance {
    pub fn new(
        map: RotationMap,
        signatures: Vec<(String, Signature)>,
        labels: Vec<usize>,
    ) -> Result<Self, InstanceError> {
        map.check_planar()?;
        assert_eq!(labels.len(), map.num_vertices(), "one label per vertex");
        for (v, &l) in labels.iter().enumerate() {
            let arity = signatures[l].1.arity();
            if arity != map.degree(v) {
                return Err(InstanceError::ArityMismatch {
                    vertex: v,
                    degree: map.degree(v),
                    arity,
                });
            }
        }
        Ok(PlanarInstance {
            map,
            signatures,
            labels,
        })
    }

    /// Every vertex labelled by `sig` under the name `f`.
    pub fn uniform(map: RotationMap, sig: Signature) -> Result<Self, InstanceError> {
        let n = map.num_vertices();
        PlanarInstance::new(map, vec![("f".to_string(), sig)], vec![0; n])
    }

    pub fn num_edges(&self) -> usize {
        self.map.num_edges()
    }

    pub fn signature_of(&self, v: usize) -> &Signature {
        &self.signatures[self.labels[v]].1
    }

    /// Value tables per vertex, first rotation slot as the high bit.
    pub fn tables(&self) -> Vec<Vec<Scalar>> {
        let cache: Vec<Vec<Scalar>> = self.signatures.iter().map(|(_, s)| s.table()).collect();
        self.labels.iter().map(|&l| cache[l].clone()).collect()
    }

    /// Same map with every signature replaced by `sig`.
    pub fn with_signature(&self, sig: Signature) -> Result<Self, InstanceError> {
        PlanarInstance::uniform(self.map.clone(), sig)
    }

    pub fn relabel(&self, perm: &[usize]) -> PlanarInstance {
        PlanarInstance {
            map: self.map.relabel(perm),
            signatures: self.signatures.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn serialize(&self) -> String {
        let mut s = String::from("sixvertex-instance v1\nsignatures\n");
        for (name, sig) in &self.signatures {
            let _ = writeln!(s, "{name} = {sig}");
        }
        s.push_str("vertices\n");
        for v in 0..self.map.num_vertices() {
            let hs: Vec<String> = self.map.rotation(v).iter().map(|h| format!("h{h}")).collect();
            let _ = writeln!(
                s,
                "v{v}: {} : {}",
                self.signatures[self.labels[v]].0,
                hs.join(" ")
            );
        }
        s.push_str("edges\n");
        for (h, g) in self.map.edges() {
            let _ = writeln!(s, "h{h} - h{g}");
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        let syntax = |line: usize, msg: &str| InstanceError::Syntax {
            line,
            msg: msg.to_string(),
        };
        let half = |line: usize, t: &str| -> Result<usize, InstanceError> {
            t.strip_prefix('h')
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| syntax(line, &format!("bad half-edge `{t}`")))
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        match lines.next() {
            Some((_, "sixvertex-instance v1")) => {}
            Some((n, _)) => return Err(syntax(n, "expected header `sixvertex-instance v1`")),
            None => return Err(syntax(0, "empty input")),
        }
        let mut section = "";
        let mut signatures: Vec<(String, Signature)> = Vec::new();
        let mut names: HashMap<String, usize> = HashMap::new();
        let mut verts: Vec<(usize, usize, Vec<usize>)> = Vec::new();
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (n, l) in lines {
            if matches!(l, "signatures" | "vertices" | "edges") {
                section = l;
                continue;
            }
            match section {
                "signatures" => {
                    let (name, lit) = l
                        .split_once('=')
                        .ok_or_else(|| syntax(n, "expected `name = literal`"))?;
                    let name = name.trim().to_string();
                    let sig = Signature::parse(lit)?;
                    if names.insert(name.clone(), signatures.len()).is_some() {
                        return Err(syntax(n, "duplicate signature name"));
                    }
                    signatures.push((name, sig));
                }
                "vertices" => {
                    let mut parts = l.split(':');
                    let (Some(v), Some(name), Some(hs), None) =
                        (parts.next(), parts.next(), parts.next(), parts.next())
                    else {
                        return Err(syntax(n, "expected `v<k>: <sig> : h.. h..`"));
                    };
                    let v: usize = v
                        .trim()
                        .strip_prefix('v')
                        .and_then(|d| d.parse().ok())
                        .ok_or_else(|| syntax(n, "bad vertex id"))?;
                    let name = name.trim();
                    let label = *names
                        .get(name)
                        .ok_or_else(|| InstanceError::UnknownSignature(name.to_string()))?;
                    let hs = hs
                        .split_whitespace()
                        .map(|t| half(n, t))
                        .collect::<Result<Vec<_>, _>>()?;
                    verts.push((v, label, hs));
                }
                "edges" => {
                    let (p, q) = l
                        .split_once('-')
                        .ok_or_else(|| syntax(n, "expected `h<i> - h<j>`"))?;
                    edges.push((half(n, p.trim())?, half(n, q.trim())?));
                }
                _ => return Err(syntax(n, "content outside a section")),
            }
        }
        verts.sort_by_key(|t| t.0);
        if verts.iter().enumerate().any(|(i, t)| t.0 != i) {
            return Err(syntax(0, "vertex ids must be v0..v(n-1)"));
        }
        let nh = 2 * edges.len();
        let mut pair = vec![usize::MAX; nh];
        for &(p, q) in &edges {
            if p >= nh || q >= nh || pair[p] != usize::MAX || pair[q] != usize::MAX {
                return Err(InstanceError::MalformedInvolution(p.max(q).min(nh.max(1) - 1)));
            }
            pair[p] = q;
            pair[q] = p;
        }
        let labels = verts.iter().map(|t| t.1).collect();
        let rot = verts.into_iter().map(|t| t.2).collect();
        let map = RotationMap::new(rot, pair)?;
        PlanarInstance::new(map, signatures, labels)
    }
}

fn cycle_graph(n: usize) -> RotationMap {
    assert!(n >= 1);
    if n == 1 {
        return RotationMap::new(vec![vec![0, 1]], vec![1, 0]).unwrap();
    }
    let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    let order = (0..n)
        .map(|i| vec![(i, true), ((i + n - 1) % n, false)])
        .collect::<Vec<_>>();
    RotationMap::from_edge_rotations(&edges, &order).unwrap()
}

/// Medial of the cycle `C_n`: the doubled `n`-cycle.
pub fn cycle_medial(n: usize) -> RotationMap {
    cycle_graph(n).medial().unwrap()
}

/// The `n x m` grid graph drawn with straight lines.
pub fn grid_graph(n: usize, m: usize) -> RotationMap {
    let id = |i: usize, j: usize| i * m + j;
    let mut pts = Vec::new();
    for i in 0..n {
        for j in 0..m {
            pts.push((j as i64, i as i64));
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..m {
            if j + 1 < m {
                edges.push((id(i, j), id(i, j + 1)));
            }
            if i + 1 < n {
                edges.push((id(i, j), id(i + 1, j)));
            }
        }
    }
    RotationMap::from_points(&pts, &edges)
}

/// A 4-regular patch: the medial of the `n x m` grid graph.
pub fn grid_patch(n: usize, m: usize) -> RotationMap {
    grid_graph(n, m).medial().unwrap()
}

/// Random connected plane multigraph with `n_edges` edges, grown by adding
/// pendant vertices and chords inside faces (loops and parallel edges
/// included).
pub fn random_plane_graph(n_edges: usize, seed: u64) -> RotationMap {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rot: Vec<Vec<usize>> = vec![vec![0], vec![1]];
    let mut pair: Vec<usize> = vec![1, 0];
    if n_edges == 0 {
        return RotationMap::new(vec![Vec::new()], Vec::new()).unwrap();
    }
    while pair.len() / 2 < n_edges {
        let map = RotationMap::new(rot.clone(), pair.clone()).unwrap();
        let faces = map.faces();
        let h0 = pair.len();
        let (a, b) = (h0, h0 + 1);
        pair.push(b);
        pair.push(a);
        // a corner is identified by the half-edge after which we insert
        let insert_after = |rot: &mut Vec<Vec<usize>>, g: usize, new: usize| {
            let v = rot.iter().position(|l| l.contains(&g)).unwrap();
            let i = rot[v].iter().position(|&x| x == g).unwrap();
            rot[v].insert(i + 1, new);
        };
        if rng.gen_bool(0.35) {
            let g = rng.gen_range(0..h0);
            insert_after(&mut rot, g, a);
            rot.push(vec![b]);
        } else {
            let face = faces.choose(&mut rng).unwrap();
            // corner after pair(h) sits on the face traced through h
            let g1 = map.pair(face[rng.gen_range(0..face.len())]);
            let g2 = map.pair(face[rng.gen_range(0..face.len())]);
            insert_after(&mut rot, g1, a);
            if g1 == g2 {
                insert_after(&mut rot, a, b);
            } else {
                insert_after(&mut rot, g2, b);
            }
        }
    }
    let map = RotationMap::new(rot, pair).unwrap();
    debug_assert!(map.check_planar().is_ok());
    map
}

pub fn medial_of_random_plane_graph(n_edges: usize, seed: u64) -> RotationMap {
    random_plane_graph(n_edges, seed).medial().unwrap()
}
