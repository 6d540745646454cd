//! Evaluation of planar instances whose signatures have a zero inner pair.
//!
//! Such signatures force the two half-edges opposite each other at a vertex
//! to take different values, so the edge set splits into circuits (follow
//! an edge into a vertex, leave by the opposite half-edge) and the whole
//! assignment is fixed by one bit per circuit. The instance then becomes a
//! #CSP over circuit variables with one binary table per pair of circuits
//! that cross and one unary table per circuit that crosses itself.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cspsolve::{CspError, affine_eval, product_eval};
use crate::membership::{affine_witness, product_witness};
use crate::instance::{PlanarInstance, RotationMap};
use crate::oracle::{CSP_VAR_CAP, Constraint, OracleError, csp_brute};
use crate::scalar::Scalar;
use crate::signature::{BinarySignature, Signature, SixVertexSignature};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LoopError {
    #[error("vertex v{0} does not have degree 4")]
    NotFourRegular(usize),
    #[error("vertex v{0} carries a signature whose inner pair (c, z) is not zero")]
    InnerPairNonzero(usize),
    #[error("table {what} disagrees between direct evaluation and exponent profile")]
    ProfileMismatch { what: String },
    #[error("entry/exit imbalance between circuits {i} and {j}: {entries} entries, {exits} exits")]
    Unbalanced { i: usize, j: usize, entries: usize, exits: usize },
    #[error("induced tables are neither product type nor affine and {0} circuits exceed the brute-force cap")]
    Intractable(usize),
    #[error(transparent)]
    Csp(#[from] CspError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// A circuit listed by the half-edges through which it enters vertices.
/// Its leader is `ins[0]`; the circuit variable is the value of the leader.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    pub ins: Vec<usize>,
}

impl Circuit {
    pub fn leader(&self) -> usize {
        self.ins[0]
    }
}

/// How the circuits meet at one vertex. `form` is the ccw offset of the
/// local `x1` from the vertex's first half-edge, i.e. the quarter turns of
/// the signature as seen in local coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexRecord {
    Intersection { i: usize, j: usize, entry: bool, form: usize },
    SelfIntersection { i: usize, form: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitDecomposition {
    pub circuits: Vec<Circuit>,
    pub records: Vec<VertexRecord>,
    /// Circuit of each half-edge and whether it is an entering half-edge.
    pub circuit_of: Vec<usize>,
    pub is_in: Vec<bool>,
}

/// Counts of rotated forms among the records of one circuit pair or one
/// circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentProfile {
    /// `k[r]`: entry vertices with form `r`; `l[r]`: exit vertices with form
    /// `r + 1 (mod 4)`.
    Pair { k: [u32; 4], l: [u32; 4] },
    Single { m: [u32; 4] },
}

fn opposite(map: &RotationMap, h: usize) -> usize {
    let v = map.vertex_of(h);
    map.rotation(v)[(map.position(h) + 2) % 4]
}

/// Traces circuits; the leader of each circuit is its lowest half-edge.
pub fn decompose_map(map: &RotationMap) -> Result<CircuitDecomposition, LoopError> {
    decompose_map_with(map, |c: &[usize]| c[0])
}

/// As [`decompose_map`], but the leader (taken as an entering half-edge) of
/// each circuit is drawn at random among all its half-edges.
pub fn decompose_map_seeded(
    map: &RotationMap,
    seed: u64,
) -> Result<CircuitDecomposition, LoopError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    decompose_map_with(map, |c: &[usize]| *c.choose(&mut rng).unwrap())
}

fn decompose_map_with(
    map: &RotationMap,
    mut pick: impl FnMut(&[usize]) -> usize,
) -> Result<CircuitDecomposition, LoopError> {
    if let Some(v) = (0..map.num_vertices()).find(|&v| map.degree(v) != 4) {
        return Err(LoopError::NotFourRegular(v));
    }
    let n = map.num_half_edges();
    let mut circuit_of = vec![usize::MAX; n];
    let mut is_in = vec![false; n];
    let mut circuits = Vec::new();
    let trace = |start: usize| -> Vec<usize> {
        let mut ins = Vec::new();
        let mut h = start;
        loop {
            ins.push(h);
            h = map.pair(opposite(map, h));
            if h == start {
                return ins;
            }
        }
    };
    for s in 0..n {
        if circuit_of[s] != usize::MAX {
            continue;
        }
        let ins = trace(s);
        let mut all: Vec<usize> = ins.iter().flat_map(|&h| [h, opposite(map, h)]).collect();
        all.sort_unstable();
        let ins = trace(pick(&all));
        let id = circuits.len();
        for &h in &ins {
            circuit_of[h] = id;
            circuit_of[opposite(map, h)] = id;
            is_in[h] = true;
        }
        circuits.push(Circuit { ins });
    }
    let mut records = Vec::with_capacity(map.num_vertices());
    for v in 0..map.num_vertices() {
        let rot = map.rotation(v);
        let ins: Vec<usize> = (0..4).filter(|&p| is_in[rot[p]]).collect();
        debug_assert_eq!(ins.len(), 2);
        let (c0, c1) = (circuit_of[rot[ins[0]]], circuit_of[rot[ins[1]]]);
        if c0 == c1 {
            // entering half-edges are adjacent; x1 is the one followed ccw by the other
            let form = if (ins[0] + 1) % 4 == ins[1] { ins[0] } else { ins[1] };
            records.push(VertexRecord::SelfIntersection { i: c0, form });
        } else {
            let (i, j) = (c0.min(c1), c0.max(c1));
            let p = if c0 == i { ins[0] } else { ins[1] };
            let q = if c0 == i { ins[1] } else { ins[0] };
            records.push(VertexRecord::Intersection {
                i,
                j,
                entry: (p + 1) % 4 == q,
                form: p,
            });
        }
    }
    Ok(CircuitDecomposition {
        circuits,
        records,
        circuit_of,
        is_in,
    })
}

fn check_labels(inst: &PlanarInstance) -> Result<(), LoopError> {
    for v in 0..inst.map.num_vertices() {
        let t = inst.signature_of(v).table();
        if t.len() != 16 {
            return Err(LoopError::NotFourRegular(v));
        }
        // support must lie in x1 != x3 and x2 != x4
        for (idx, val) in t.iter().enumerate() {
            let ok = (idx >> 3 & 1) != (idx >> 1 & 1) && (idx >> 2 & 1) != (idx & 1);
            if !ok && !val.is_zero() {
                return Err(LoopError::InnerPairNonzero(v));
            }
        }
    }
    Ok(())
}

pub fn decompose(inst: &PlanarInstance) -> Result<CircuitDecomposition, LoopError> {
    check_labels(inst)?;
    decompose_map(&inst.map)
}

/// Variables are circuits; `pairs[(i, j)]` is indexed by `(b_i, b_j)` with
/// `b_i` as the high bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedCSP {
    pub k: usize,
    pub pairs: BTreeMap<(usize, usize), BinarySignature>,
    pub singles: BTreeMap<usize, [Scalar; 2]>,
}

impl InducedCSP {
    pub fn constraints(&self) -> Vec<Constraint> {
        let mut out: Vec<Constraint> = self
            .pairs
            .iter()
            .map(|(&(i, j), g)| Constraint::new(vec![i, j], g.g.to_vec()))
            .collect();
        out.extend(
            self.singles
                .iter()
                .map(|(&i, h)| Constraint::new(vec![i], h.to_vec())),
        );
        out
    }
}

/// Value at `v` when each circuit variable is fixed by `bits`.
fn vertex_value(
    inst: &PlanarInstance,
    tables: &[Vec<Scalar>],
    dec: &CircuitDecomposition,
    v: usize,
    bits: impl Fn(usize) -> usize,
) -> Scalar {
    let idx = inst.map.rotation(v).iter().fold(0usize, |acc, &h| {
        let b = bits(dec.circuit_of[h]);
        (acc << 1) | if dec.is_in[h] { b } else { 1 - b }
    });
    tables[v][idx].clone()
}

/// Tables built by direct evaluation along the circuits.
pub fn induced_csp_direct(inst: &PlanarInstance, dec: &CircuitDecomposition) -> InducedCSP {
    let tables = inst.tables();
    let one = || [Scalar::one(), Scalar::one(), Scalar::one(), Scalar::one()];
    let mut pairs: BTreeMap<(usize, usize), [Scalar; 4]> = BTreeMap::new();
    let mut singles: BTreeMap<usize, [Scalar; 2]> = BTreeMap::new();
    for (v, rec) in dec.records.iter().enumerate() {
        match *rec {
            VertexRecord::Intersection { i, j, .. } => {
                let t = pairs.entry((i, j)).or_insert_with(one);
                for (s, slot) in t.iter_mut().enumerate() {
                    let val = vertex_value(inst, &tables, dec, v, |c| {
                        if c == i { s >> 1 } else { s & 1 }
                    });
                    *slot *= &val;
                }
            }
            VertexRecord::SelfIntersection { i, .. } => {
                let t = singles
                    .entry(i)
                    .or_insert_with(|| [Scalar::one(), Scalar::one()]);
                for (b, slot) in t.iter_mut().enumerate() {
                    *slot *= &vertex_value(inst, &tables, dec, v, |_| b);
                }
            }
        }
    }
    InducedCSP {
        k: dec.circuits.len(),
        pairs: pairs
            .into_iter()
            .map(|(key, g)| (key, BinarySignature { g }))
            .collect(),
        singles,
    }
}

pub fn profiles(
    dec: &CircuitDecomposition,
) -> (
    BTreeMap<(usize, usize), ExponentProfile>,
    BTreeMap<usize, ExponentProfile>,
) {
    let mut pairs = BTreeMap::new();
    let mut singles = BTreeMap::new();
    for rec in &dec.records {
        match *rec {
            VertexRecord::Intersection { i, j, entry, form } => {
                let p = pairs
                    .entry((i, j))
                    .or_insert(ExponentProfile::Pair { k: [0; 4], l: [0; 4] });
                if let ExponentProfile::Pair { k, l } = p {
                    if entry {
                        k[form] += 1;
                    } else {
                        l[(form + 3) % 4] += 1;
                    }
                }
            }
            VertexRecord::SelfIntersection { i, form } => {
                let p = singles.entry(i).or_insert(ExponentProfile::Single { m: [0; 4] });
                if let ExponentProfile::Single { m } = p {
                    m[form] += 1;
                }
            }
        }
    }
    (pairs, singles)
}

fn mono(f: &SixVertexSignature, e: [u32; 4]) -> Scalar {
    // exponents of (a, y, x, b)
    [&f.a, &f.y, &f.x, &f.b]
        .iter()
        .zip(e)
        .map(|(s, k)| s.pow(k as u64))
        .product()
}

impl ExponentProfile {
    /// The closed-form binary or unary table for a signature of the form
    /// `c = z = 0`.
    pub fn table(&self, f: &SixVertexSignature) -> Vec<Scalar> {
        match *self {
            ExponentProfile::Pair { k, l } => vec![
                mono(f, [k[0] + l[0], k[1] + l[1], k[2] + l[2], k[3] + l[3]]),
                mono(f, [k[1] + l[3], k[2] + l[0], k[3] + l[1], k[0] + l[2]]),
                mono(f, [k[3] + l[1], k[0] + l[2], k[1] + l[3], k[2] + l[0]]),
                mono(f, [k[2] + l[2], k[3] + l[3], k[0] + l[0], k[1] + l[1]]),
            ],
            ExponentProfile::Single { m } => vec![
                mono(f, [m[0], m[1], m[2], m[3]]),
                mono(f, [m[2], m[3], m[0], m[1]]),
            ],
        }
    }

    pub fn balanced(&self) -> bool {
        match self {
            ExponentProfile::Pair { k, l } => k.iter().sum::<u32>() == l.iter().sum::<u32>(),
            ExponentProfile::Single { .. } => true,
        }
    }
}

fn uniform_six(inst: &PlanarInstance) -> Option<SixVertexSignature> {
    let first = inst.labels.first()?;
    if inst.labels.iter().any(|l| l != first) {
        return None;
    }
    match &inst.signatures[*first].1 {
        Signature::Six(f) => Some(f.clone()),
        Signature::Quad(q) => q.to_six(),
        _ => None,
    }
}

/// Direct tables, cross-checked against the exponent profiles whenever the
/// instance carries a single six-vertex signature.
pub fn induced_csp(
    inst: &PlanarInstance,
    dec: &CircuitDecomposition,
) -> Result<InducedCSP, LoopError> {
    let csp = induced_csp_direct(inst, dec);
    if let Some(f) = uniform_six(inst) {
        let (pp, sp) = profiles(dec);
        for (key, p) in &pp {
            if csp.pairs[key].g.to_vec() != p.table(&f) {
                return Err(LoopError::ProfileMismatch {
                    what: format!("g_{{{},{}}}", key.0, key.1),
                });
            }
        }
        for (key, p) in &sp {
            if csp.singles[key].to_vec() != p.table(&f) {
                return Err(LoopError::ProfileMismatch {
                    what: format!("h_{key}"),
                });
            }
        }
    }
    Ok(csp)
}

/// Per-pair entry/exit counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuditReport {
    pub circuits: usize,
    pub self_intersections: usize,
    pub pairs: BTreeMap<(usize, usize), (usize, usize)>,
}

impl AuditReport {
    pub fn balanced(&self) -> bool {
        self.pairs.values().all(|(a, b)| a == b)
    }
}

pub fn entry_exit_audit(dec: &CircuitDecomposition) -> Result<AuditReport, LoopError> {
    let mut pairs: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
    let mut selfs = 0;
    for rec in &dec.records {
        match *rec {
            VertexRecord::Intersection { i, j, entry, .. } => {
                let e = pairs.entry((i, j)).or_default();
                if entry {
                    e.0 += 1;
                } else {
                    e.1 += 1;
                }
            }
            VertexRecord::SelfIntersection { .. } => selfs += 1,
        }
    }
    let report = AuditReport {
        circuits: dec.circuits.len(),
        self_intersections: selfs,
        pairs,
    };
    if let Some((&(i, j), &(entries, exits))) = report.pairs.iter().find(|(_, (a, b))| a != b) {
        return Err(LoopError::Unbalanced { i, j, entries, exits });
    }
    Ok(report)
}

/// Which solver handled the induced #CSP.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CspRoute {
    Product,
    Affine,
    Brute,
}

pub fn solve_induced(csp: &InducedCSP) -> Result<(Scalar, CspRoute), LoopError> {
    let cs = csp.constraints();
    if cs.iter().all(|c| product_witness(&c.table).is_some()) {
        return Ok((product_eval(csp.k, &cs)?, CspRoute::Product));
    }
    if cs.iter().all(|c| affine_witness(&c.table).is_some()) {
        return Ok((affine_eval(csp.k, &cs)?, CspRoute::Affine));
    }
    if csp.k <= CSP_VAR_CAP {
        return Ok((csp_brute(csp.k, &cs)?, CspRoute::Brute));
    }
    Err(LoopError::Intractable(csp.k))
}

/// Holant value of an instance whose labels all have a zero inner pair.
pub fn evaluate(inst: &PlanarInstance) -> Result<Scalar, LoopError> {
    let dec = decompose(inst)?;
    entry_exit_audit(&dec)?;
    let csp = induced_csp(inst, &dec)?;
    Ok(solve_induced(&csp)?.0)
}

/// Convenience: the signature at every vertex of `inst`'s map replaced by `f`.
pub fn evaluate_with(inst: &PlanarInstance, f: &SixVertexSignature) -> Result<Scalar, LoopError> {
    let inst = inst
        .with_signature(Signature::Six(f.clone()))
        .expect("same map, arity 4");
    evaluate(&inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::cycle_medial;
    use crate::oracle::holant_brute;

    fn inst(map: RotationMap, s: &str) -> PlanarInstance {
        PlanarInstance::uniform(map, Signature::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn two_loops_self_intersect_once() {
        let m = RotationMap::new(vec![vec![0, 1, 2, 3]], vec![1, 0, 3, 2]).unwrap();
        let i = inst(m, "2,3,0,5,7,0");
        let dec = decompose(&i).unwrap();
        assert_eq!(dec.circuits.len(), 1);
        assert!(matches!(dec.records[0], VertexRecord::SelfIntersection { i: 0, .. }));
        let csp = induced_csp(&i, &dec).unwrap();
        let h = &csp.singles[&0];
        // one of the four rotated forms: h = [a, x] up to rotation
        let (a, y, x, b) = (2, 7, 5, 3);
        let forms = [[a, x], [y, b], [x, a], [b, y]].map(|p| p.map(Scalar::from_i64));
        assert!(forms.iter().any(|f| f == h));
        assert_eq!(evaluate(&i).unwrap(), holant_brute(&i).unwrap());
    }

    #[test]
    fn profile_tables_match_named_signatures() {
        let f = SixVertexSignature::from_i64([2, 3, 0, 5, 7, 0]);
        let g1 = ExponentProfile::Pair { k: [1, 0, 0, 0], l: [1, 0, 0, 0] }.table(&f);
        assert_eq!(g1, [4, 21, 21, 25].map(Scalar::from_i64).to_vec());
        let g2 = ExponentProfile::Pair { k: [1, 0, 0, 0], l: [0, 0, 1, 0] }.table(&f);
        assert_eq!(g2, [10, 9, 49, 10].map(Scalar::from_i64).to_vec());
        let h = ExponentProfile::Single { m: [1, 0, 0, 0] }.table(&f);
        assert_eq!(h, [2, 5].map(Scalar::from_i64).to_vec());
    }

    #[test]
    fn doubled_triangle_matches_oracle() {
        let i = inst(cycle_medial(3), "1,2,0,-1,3,0");
        let dec = decompose(&i).unwrap();
        assert!(entry_exit_audit(&dec).unwrap().balanced());
        assert_eq!(evaluate(&i).unwrap(), holant_brute(&i).unwrap());
    }

    #[test]
    fn nonzero_inner_pair_is_rejected() {
        let i = inst(cycle_medial(3), "1,1,1,1,1,1");
        assert_eq!(evaluate(&i), Err(LoopError::InnerPairNonzero(0)));
    }
}
