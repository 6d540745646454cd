//! Executable reductions and interpolations between planar Holant problems
//! and counting CSPs. Each construction is meant to be checked against the
//! exhaustive oracles, which stand in for the oracle queries of a Turing
//! reduction.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::instance::{
    medial_of_random_plane_graph, random_plane_graph, InstanceError, PlanarInstance, RotationMap,
};
use crate::linalg::Mat;
use crate::oracle::{self, Constraint, OracleError};
use crate::scalar::{Scalar, ScalarError};
use crate::signature::{
    chi1, chi2, n_matrix, BinarySignature, GeneralSignature4, Signature, SixVertexSignature,
};

/// Occurrence cap for interpolation: `m + 1` oracle queries are made.
pub const MAX_OCCURRENCES: usize = 3;
/// Default search box `|j|, |k| <= B` for multiplicative relations.
pub const LATTICE_BOUND: i64 = 16;
/// Edge cap for compiled instances. Their supports pin every curve to two
/// states, so the backtracking oracle stays fast far above the usual cap.
pub const COMPILED_EDGE_CAP: usize = 400;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("ratio {0} is zero or a root of unity, so the interpolation nodes collide")]
    RootOfUnity(Scalar),
    #[error("signature outside the required family: {0}")]
    Family(String),
    #[error("{found} occurrences of the target exceed the cap {cap}")]
    TooManyOccurrences { found: usize, cap: usize },
    #[error("inner matrix is singular")]
    SingularInner,
    #[error("eigenvalues of the inner matrix lie outside Q(zeta_8)")]
    EigenvaluesOutsideField,
    #[error("interpolation system is singular")]
    SingularSystem,
    #[error("alpha and beta are both roots of unity: the relation lattice has rank 2")]
    RankTwoLattice,
    #[error("target fails phi^s psi^t = 1 on the lattice basis ({0}, {1})")]
    TargetOffLattice(i64, i64),
    #[error("phi^j psi^k is not constant on a class of equal alpha^j beta^k")]
    TargetNotConstant,
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("no rotation realises {0}")]
    NoPlacement(String),
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

type Result<T> = std::result::Result<T, ReductionError>;

/// Direct oracle value of an instance.
pub fn direct(inst: &PlanarInstance, jobs: usize) -> Result<Scalar> {
    Ok(oracle::holant_brute_jobs(inst, jobs)?)
}

/// Vertices whose signature table equals `target`.
pub fn occurrences(inst: &PlanarInstance, target: &Signature) -> Vec<usize> {
    let table = target.table();
    (0..inst.labels.len())
        .filter(|&v| {
            let s = inst.signature_of(v);
            s.arity() == target.arity() && s.table() == table
        })
        .collect()
}

fn capped_occurrences(inst: &PlanarInstance, target: &Signature) -> Result<Vec<usize>> {
    let occ = occurrences(inst, target);
    if occ.len() > MAX_OCCURRENCES {
        return Err(ReductionError::TooManyOccurrences {
            found: occ.len(),
            cap: MAX_OCCURRENCES,
        });
    }
    Ok(occ)
}

/// Relabels `vertices` with a fresh signature.
pub fn substitute(
    inst: &PlanarInstance,
    vertices: &[usize],
    name: &str,
    sig: Signature,
) -> PlanarInstance {
    let mut out = inst.clone();
    out.signatures.push((name.to_string(), sig));
    let id = out.signatures.len() - 1;
    for &v in vertices {
        out.labels[v] = id;
    }
    out
}

/// `M(f) (N M(f))^(copies - 1)`: copies of `f` in a row, each joined to the
/// next by a double disequality.
pub fn chain(f: &GeneralSignature4, copies: usize) -> GeneralSignature4 {
    assert!(copies >= 1, "a chain needs at least one copy");
    let m = f.matrix();
    let step = n_matrix().mul(&m);
    GeneralSignature4::from_matrix(&m.mul(&step.pow(copies as u64 - 1)))
}

/// A gadget of 4-ary vertices joined by `!=2` edges with four dangling
/// half-edges. Half-edge `4v + k` is variable `x_{k+1}` of vertex `v`.
#[derive(Clone, Debug)]
pub struct Gadget {
    pub vertices: Vec<GeneralSignature4>,
    pub internal: Vec<(usize, usize)>,
    pub externals: [usize; 4],
}

impl Gadget {
    /// The physical chain: copy `t`'s `x4` meets copy `t+1`'s `x1` and its
    /// `x3` meets `x2`.
    pub fn chain(f: &GeneralSignature4, copies: usize) -> Gadget {
        assert!(copies >= 1);
        let internal = (0..copies - 1)
            .flat_map(|t| [(4 * t + 3, 4 * t + 4), (4 * t + 2, 4 * t + 5)])
            .collect();
        let last = 4 * (copies - 1);
        Gadget {
            vertices: vec![f.clone(); copies],
            internal,
            externals: [0, 1, last + 2, last + 3],
        }
    }

    /// Signature by enumerating every internal edge assignment.
    pub fn evaluate(&self) -> GeneralSignature4 {
        let nh = 4 * self.vertices.len();
        let mut out = GeneralSignature4::zero();
        let mut val = vec![0usize; nh];
        for (input, slot) in out.v.iter_mut().enumerate() {
            for (k, &h) in self.externals.iter().enumerate() {
                val[h] = (input >> (3 - k)) & 1;
            }
            let mut acc = Scalar::zero();
            'assign: for bits in 0u64..1 << self.internal.len() {
                for (e, &(p, q)) in self.internal.iter().enumerate() {
                    let b = ((bits >> e) & 1) as usize;
                    val[p] = b;
                    val[q] = 1 - b;
                }
                let mut prod = Scalar::one();
                for (v, f) in self.vertices.iter().enumerate() {
                    let idx = (0..4).fold(0, |i, k| (i << 1) | val[4 * v + k]);
                    if f.v[idx].is_zero() {
                        continue 'assign;
                    }
                    prod *= &f.v[idx];
                }
                acc += &prod;
            }
            *slot = acc;
        }
        out
    }
}

/// The Square gadget: four copies on a square cycle, each sending a
/// diagonal through a fifth copy in the middle.
pub fn square_gadget(f: &SixVertexSignature) -> GeneralSignature4 {
    // abstract slots at v_i: ext, square-next, centre, square-prev
    let (ext, next, centre, prev) = (0, 1, 2, 3);
    let g = f.to_general();
    // values at input (0,0,1,1) with the square in state 0: ext = x_i,
    // centre = 1 - x_i, square-prev = 0, square-next = 1
    let input = [0usize, 0, 1, 1];
    let mut vertices = Vec::with_capacity(5);
    let mut slot_of = vec![[0usize; 4]; 4];
    for i in 0..4 {
        let vals = [input[i], 1, 1 - input[i], 0];
        let shift = (0..4)
            .find(|&r| {
                let idx = (0..4).fold(0, |acc, k| (acc << 1) | vals[(r + k) % 4]);
                idx == crate::signature::IDX_A
            })
            .expect("some rotation reads the a entry");
        // variable k sits on abstract slot (shift + k) % 4
        for k in 0..4 {
            slot_of[i][(shift + k) % 4] = 4 * i + k;
        }
        vertices.push(g.clone());
    }
    vertices.push(g);
    let mut internal = Vec::with_capacity(8);
    for i in 0..4 {
        internal.push((slot_of[i][next], slot_of[(i + 1) % 4][prev]));
        internal.push((slot_of[i][centre], 16 + i));
    }
    Gadget {
        vertices,
        internal,
        externals: [0, 1, 2, 3].map(|i| slot_of[i][ext]),
    }
    .evaluate()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Chi {
    One,
    Two,
}

impl Chi {
    pub fn signature(self) -> SixVertexSignature {
        match self {
            Chi::One => chi1(),
            Chi::Two => chi2(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Chi::One => "chi1",
            Chi::Two => "chi2",
        }
    }
}

/// One interpolation: queries, the linear system and what it recovers.
#[derive(Clone, Debug)]
pub struct InterpolationRun {
    pub target: Signature,
    pub occurrences: Vec<usize>,
    /// Normalised oracle answers, one per row of `system`.
    pub queries: Vec<Scalar>,
    pub system: Mat,
    pub coefficients: Vec<Scalar>,
    pub recovered: Scalar,
}

impl InterpolationRun {
    pub fn m(&self) -> usize {
        self.occurrences.len()
    }
}

/// Rows `[w_r^0, .., w_r^(n-1)]`.
fn power_rows(row_nodes: &[Scalar], n: usize) -> Mat {
    let mut m = Mat::zeros(row_nodes.len(), n);
    for (r, w) in row_nodes.iter().enumerate() {
        for j in 0..n {
            m[(r, j)] = w.pow(j as u64);
        }
    }
    m
}

fn solve(system: &Mat, rhs: &[Scalar]) -> Result<Vec<Scalar>> {
    system.solve(rhs).ok_or(ReductionError::SingularSystem)
}

fn check_ratio(r: &Scalar) -> Result<()> {
    if r.is_zero() || r.is_root_of_unity().is_some() {
        return Err(ReductionError::RootOfUnity(r.clone()));
    }
    Ok(())
}

/// Recovers the Holant value of `inst`, which uses `chi`, from instances in
/// which every `chi` is replaced by a chain of `2s+1` copies of
/// `f = (a, b, 0, +-a, b, 0)`.
pub fn interpolate_chi(
    inst: &PlanarInstance,
    f: &SixVertexSignature,
    which: Chi,
    jobs: usize,
) -> Result<InterpolationRun> {
    let sign = match which {
        Chi::One => f.a.clone(),
        Chi::Two => -&f.a,
    };
    if f.a.is_zero() || !f.c.is_zero() || !f.z.is_zero() || f.b != f.y || f.x != sign {
        return Err(ReductionError::Family(format!(
            "{which:?} needs f = (a, b, 0, {}a, b, 0) with a != 0, got {f}",
            if which == Chi::One { "" } else { "-" }
        )));
    }
    let r = f.b.checked_div(&f.a)?;
    check_ratio(&r)?;
    let target = Signature::Six(which.signature());
    let occ = capped_occurrences(inst, &target)?;
    let m = occ.len();
    let g = f.to_general();
    let mut nodes = Vec::with_capacity(m + 1);
    let mut queries = Vec::with_capacity(m + 1);
    for s in 0..=m as u64 {
        let n = 2 * s + 1;
        let sub = substitute(inst, &occ, "chain", Signature::Quad(chain(&g, n as usize)));
        let h = direct(&sub, jobs)?;
        queries.push(h.checked_div(&f.a.pow(n * m as u64))?);
        nodes.push(r.pow(n));
    }
    let system = power_rows(&nodes, m + 1);
    let coefficients = solve(&system, &queries)?;
    let recovered = coefficients.iter().cloned().sum();
    Ok(InterpolationRun {
        target,
        occurrences: occ,
        queries,
        system,
        coefficients,
        recovered,
    })
}

fn antidiagonal(g: &BinarySignature) -> Result<(Scalar, Scalar)> {
    if !g.g[0].is_zero() || !g.g[3].is_zero() || g.g[1].is_zero() {
        return Err(ReductionError::Family(format!(
            "binary signature must be (0, p, q, 0) with p != 0, got {g}"
        )));
    }
    Ok((g.g[1].clone(), g.g[2].checked_div(&g.g[1])?))
}

/// Recovers the value of `inst` with binary `target = p'(0, 1, t', 0)` from
/// chains of `g = p(0, 1, t, 0)` linked through `!=2`.
pub fn interpolate_binary(
    inst: &PlanarInstance,
    target: &BinarySignature,
    g: &BinarySignature,
    jobs: usize,
) -> Result<InterpolationRun> {
    let (p, t) = antidiagonal(g)?;
    let (p_target, t_target) = antidiagonal(target)?;
    check_ratio(&t)?;
    let target_sig = Signature::Binary(target.clone());
    let occ = capped_occurrences(inst, &target_sig)?;
    let m = occ.len();
    let mut nodes = Vec::with_capacity(m + 1);
    let mut queries = Vec::with_capacity(m + 1);
    let mut gs = g.clone();
    for s in 1..=m as u64 + 1 {
        if s > 1 {
            gs = gs.chain_neq(g);
        }
        let sub = substitute(inst, &occ, "chain", Signature::Binary(gs.clone()));
        queries.push(direct(&sub, jobs)?.checked_div(&p.pow(s * m as u64))?);
        nodes.push(t.pow(s));
    }
    let system = power_rows(&nodes, m + 1);
    let coefficients = solve(&system, &queries)?;
    let recovered = coefficients
        .iter()
        .enumerate()
        .map(|(j, a)| a * &t_target.pow(j as u64))
        .sum::<Scalar>()
        * p_target.pow(m as u64);
    Ok(InterpolationRun {
        target: target_sig,
        occurrences: occ,
        queries,
        system,
        coefficients,
        recovered,
    })
}

/// How the inner matrix `K = [[z, y], [b, c]]` of a zero-outer `f` was
/// diagonalised.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JordanCase {
    /// `K^n` is the scalar `lambda_n` times the identity.
    DirectPower { n: u32, lambda_n: Scalar },
    /// Eigenvalues `lambda1`, `lambda1 * rho` with `rho` of infinite order.
    Distinct { lambda1: Scalar, rho: Scalar },
    /// A single eigenvalue with a nontrivial Jordan block.
    Defective { lambda: Scalar },
}

#[derive(Clone, Debug)]
pub struct JordanRun {
    pub case: JordanCase,
    pub run: InterpolationRun,
}

/// The target of [`jordan_interp`]: inner block `[[0, 1], [1, 0]]`.
pub fn jordan_target() -> SixVertexSignature {
    SixVertexSignature::from_i64([0, 0, 1, 0, 0, 1])
}

fn jordan_case(f: &SixVertexSignature) -> Result<JordanCase> {
    let k = Mat::from_rows(vec![
        vec![f.z.clone(), f.y.clone()],
        vec![f.b.clone(), f.c.clone()],
    ]);
    let tr = &f.z + &f.c;
    let det = k.det();
    let half = Scalar::from_ratio(1, 2);
    let disc = &tr * &tr - Scalar::from_i64(4) * &det;
    if disc.is_zero() {
        let lambda = &tr * &half;
        if k == Mat::identity(2).scale(&lambda) {
            return Ok(JordanCase::DirectPower {
                n: 1,
                lambda_n: lambda,
            });
        }
        return Ok(JordanCase::Defective { lambda });
    }
    let root = disc.sqrt().ok_or(ReductionError::EigenvaluesOutsideField)?;
    let lambda1 = (&tr + &root) * &half;
    let lambda2 = (&tr - &root) * &half;
    let rho = lambda2.checked_div(&lambda1)?;
    match rho.is_root_of_unity() {
        Some(n) => {
            let lambda_n = lambda1.pow(n as u64);
            debug_assert_eq!(k.pow(n as u64), Mat::identity(2).scale(&lambda_n));
            Ok(JordanCase::DirectPower { n, lambda_n })
        }
        None => Ok(JordanCase::Distinct { lambda1, rho }),
    }
}

/// Recovers the value of `inst` with [`jordan_target`] substituted, from
/// chains of a zero-outer `f` with invertible inner matrix.
pub fn jordan_interp(
    inst: &PlanarInstance,
    f: &SixVertexSignature,
    jobs: usize,
) -> Result<JordanRun> {
    if !f.a.is_zero() || !f.x.is_zero() {
        return Err(ReductionError::Family(format!("need a = x = 0, got {f}")));
    }
    if (&f.b * &f.y - &f.c * &f.z).is_zero() {
        return Err(ReductionError::SingularInner);
    }
    let case = jordan_case(f)?;
    let target = Signature::Six(jordan_target());
    let occ = capped_occurrences(inst, &target)?;
    let m = occ.len() as u64;
    let g = f.to_general();
    let query = |s: u64| -> Result<Scalar> {
        let sub = substitute(inst, &occ, "chain", Signature::Quad(chain(&g, s as usize)));
        direct(&sub, jobs)
    };
    let run = match &case {
        JordanCase::DirectPower { n, lambda_n } => {
            let h = query(*n as u64)?.checked_div(&lambda_n.pow(m))?;
            InterpolationRun {
                target,
                occurrences: occ,
                queries: vec![h.clone()],
                system: Mat::identity(1),
                coefficients: vec![h.clone()],
                recovered: h,
            }
        }
        JordanCase::Distinct { lambda1, rho } => {
            let mut queries = Vec::new();
            let mut nodes = Vec::new();
            for s in 1..=m + 1 {
                queries.push(query(s)?.checked_div(&lambda1.pow(s * m))?);
                nodes.push(rho.pow(s));
            }
            let system = power_rows(&nodes, m as usize + 1);
            let coefficients = solve(&system, &queries)?;
            let recovered = coefficients.iter().cloned().sum();
            InterpolationRun {
                target,
                occurrences: occ,
                queries,
                system,
                coefficients,
                recovered,
            }
        }
        JordanCase::Defective { lambda } => {
            let mut queries = Vec::new();
            let mut nodes = Vec::new();
            let inv = lambda.inv()?;
            for s in 1..=m + 1 {
                queries.push(query(s)?.checked_div(&lambda.pow(s * m))?);
                nodes.push(Scalar::from_i64(s as i64) * &inv);
            }
            let system = power_rows(&nodes, m as usize + 1);
            let coefficients = solve(&system, &queries)?;
            let recovered = coefficients[0].clone();
            InterpolationRun {
                target,
                occurrences: occ,
                queries,
                system,
                coefficients,
                recovered,
            }
        }
    };
    Ok(JordanRun { case, run })
}

/// The relation lattice `{(j, k) : alpha^j beta^k = 1}` as found by a
/// bounded search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    pub alpha: Scalar,
    pub beta: Scalar,
    /// Generator `(s, t)` with `t >= 0` (and `s > 0` when `t = 0`); `None`
    /// when no relation lies in the search box.
    pub basis: Option<(i64, i64)>,
    pub bound: i64,
}

fn normalize(v: (i64, i64)) -> (i64, i64) {
    let (j, k) = v;
    if k < 0 || (k == 0 && j < 0) {
        (-j, -k)
    } else {
        (j, k)
    }
}

pub fn find_lattice(alpha: &Scalar, beta: &Scalar, bound: i64) -> Result<LatticeSpec> {
    if alpha.is_zero() || beta.is_zero() {
        return Err(ReductionError::Precondition(
            "alpha and beta must be nonzero".into(),
        ));
    }
    if alpha.is_root_of_unity().is_some() && beta.is_root_of_unity().is_some() {
        return Err(ReductionError::RankTwoLattice);
    }
    let powers = |s: &Scalar| -> Result<Vec<Scalar>> {
        (-bound..=bound)
            .map(|e| s.powi(e).map_err(ReductionError::from))
            .collect()
    };
    let (pa, pb) = (powers(alpha)?, powers(beta)?);
    let mut found = Vec::new();
    for j in -bound..=bound {
        for k in -bound..=bound {
            if (j, k) != (0, 0) && (&pa[(j + bound) as usize] * &pb[(k + bound) as usize]).is_one()
            {
                found.push((j, k));
            }
        }
    }
    let basis = found
        .iter()
        .map(|&v| normalize(v))
        .min_by_key(|&(j, k)| (j.abs() + k.abs(), j, k));
    if let Some((s, t)) = basis {
        if found.iter().any(|&(j, k)| j * t != k * s) {
            return Err(ReductionError::RankTwoLattice);
        }
    }
    Ok(LatticeSpec {
        alpha: alpha.clone(),
        beta: beta.clone(),
        basis,
        bound,
    })
}

/// Pairs `(j, k)` with `j + k <= m`, grouped by the exact value of
/// `alpha^j beta^k`.
pub fn lattice_groups(spec: &LatticeSpec, m: usize) -> Vec<(Scalar, Vec<(usize, usize)>)> {
    let mut groups: Vec<(Scalar, Vec<(usize, usize)>)> = Vec::new();
    for j in 0..=m {
        for k in 0..=m - j {
            let v = spec.alpha.pow(j as u64) * spec.beta.pow(k as u64);
            match groups.iter_mut().find(|(w, _)| *w == v) {
                Some((_, members)) => members.push((j, k)),
                None => groups.push((v, vec![(j, k)])),
            }
        }
    }
    groups
}

/// From `N_l = sum x_{j,k} (alpha^j beta^k)^l` for `l = 1, 2, ..` computes
/// `sum x_{j,k} phi^j psi^k`. Returns the value and the group sums.
pub fn lattice_solve(
    spec: &LatticeSpec,
    m: usize,
    queries: &[Scalar],
    phi: &Scalar,
    psi: &Scalar,
) -> Result<(Scalar, Vec<Scalar>)> {
    if let Some((s, t)) = spec.basis {
        let on = phi
            .powi(s)
            .and_then(|p| Ok(p * psi.powi(t)?))
            .map(|v| v.is_one())
            .unwrap_or(false);
        if !on {
            return Err(ReductionError::TargetOffLattice(s, t));
        }
    }
    let groups = lattice_groups(spec, m);
    if queries.len() < groups.len() {
        return Err(ReductionError::Precondition(format!(
            "{} queries given, {} needed",
            queries.len(),
            groups.len()
        )));
    }
    let nodes: Vec<Scalar> = groups.iter().map(|(v, _)| v.clone()).collect();
    let sums = crate::linalg::solve_power_system(&nodes, 1, &queries[..groups.len()])
        .ok_or(ReductionError::SingularSystem)?;
    let mut total = Scalar::zero();
    for ((_, members), sum) in groups.iter().zip(&sums) {
        let weight = |&(j, k): &(usize, usize)| phi.pow(j as u64) * psi.pow(k as u64);
        let w = weight(&members[0]);
        if members.iter().any(|p| weight(p) != w) {
            return Err(ReductionError::TargetNotConstant);
        }
        total += &(w * sum);
    }
    Ok((total, sums))
}

#[derive(Clone, Debug)]
pub struct LatticeRun {
    pub spec: LatticeSpec,
    pub run: InterpolationRun,
}

fn symmetric_family(f: &SixVertexSignature) -> Result<()> {
    if !f.a.is_one() || !f.x.is_one() || f.b != f.y || f.c != f.z {
        return Err(ReductionError::Family(format!(
            "need f = (1, b, c, 1, b, c), got {f}"
        )));
    }
    Ok(())
}

/// Recovers the value of `inst` with `target = (1, b', c', 1, b', c')` from
/// chains of `f = (1, b, c, 1, b, c)`: the eigenvalues `c +- b` of the
/// inner block are interpolated to `c' +- b'` along their relation lattice.
pub fn lattice_interp(
    inst: &PlanarInstance,
    target: &SixVertexSignature,
    f: &SixVertexSignature,
    bound: i64,
    jobs: usize,
) -> Result<LatticeRun> {
    symmetric_family(f)?;
    symmetric_family(target)?;
    let alpha = &f.c + &f.b;
    let beta = &f.c - &f.b;
    let phi = &target.c + &target.b;
    let psi = &target.c - &target.b;
    let spec = find_lattice(&alpha, &beta, bound)?;
    let target_sig = Signature::Six(target.clone());
    let occ = capped_occurrences(inst, &target_sig)?;
    let m = occ.len();
    let groups = lattice_groups(&spec, m);
    let g = f.to_general();
    let mut queries = Vec::with_capacity(groups.len());
    for l in 1..=groups.len() {
        let sub = substitute(inst, &occ, "chain", Signature::Quad(chain(&g, l)));
        queries.push(direct(&sub, jobs)?);
    }
    let (recovered, coefficients) = lattice_solve(&spec, m, &queries, &phi, &psi)?;
    let mut system = Mat::zeros(groups.len(), groups.len());
    for r in 0..groups.len() {
        for (c, (v, _)) in groups.iter().enumerate() {
            system[(r, c)] = v.pow(r as u64 + 1);
        }
    }
    Ok(LatticeRun {
        spec,
        run: InterpolationRun {
            target: target_sig,
            occurrences: occ,
            queries,
            system,
            coefficients,
            recovered,
        },
    })
}

/// A compiled instance and the constant it is scaled by: free variables of
/// the source contribute a factor 2 each.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub instance: PlanarInstance,
    pub factor: Scalar,
}

impl Compiled {
    pub fn evaluate(&self, jobs: usize) -> Result<Scalar> {
        let h = oracle::holant_brute_capped(&self.instance, COMPILED_EDGE_CAP, jobs)?;
        Ok(&self.factor * &h)
    }
}

fn empty_instance() -> PlanarInstance {
    PlanarInstance {
        map: RotationMap::new(Vec::new(), Vec::new()).expect("empty map"),
        signatures: Vec::new(),
        labels: Vec::new(),
    }
}

/// `f~(x1, x3)` with matrix `M_In(f) [[0, 1], [1, 0]] = [[c, b], [y, z]]`.
pub fn f_tilde_in(f: &SixVertexSignature) -> BinarySignature {
    BinarySignature::new(f.c.clone(), f.b.clone(), f.y.clone(), f.z.clone())
}

/// A planar #CSP whose binary constraints run along the edges of a plane
/// multigraph on the variables.
#[derive(Clone, Debug)]
pub struct PlanarCsp {
    pub graph: RotationMap,
    /// Per edge, `(first, label)`: the half-edge at the first argument and
    /// the index of the signature whose `f~_In` is applied.
    pub binary: Vec<(usize, usize)>,
    /// `(variable, label)`: `f~_In(w, w)`.
    pub unary: Vec<(usize, usize)>,
    pub signatures: Vec<SixVertexSignature>,
}

impl PlanarCsp {
    pub fn num_vars(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn constraints(&self) -> Vec<Constraint> {
        let mut out = Vec::new();
        for &(first, label) in &self.binary {
            let u = self.graph.vertex_of(first);
            let v = self.graph.vertex_of(self.graph.pair(first));
            out.push(Constraint::new(
                vec![u, v],
                f_tilde_in(&self.signatures[label]).g.to_vec(),
            ));
        }
        for &(w, label) in &self.unary {
            let t = f_tilde_in(&self.signatures[label]);
            out.push(Constraint::new(vec![w], vec![t.g[0].clone(), t.g[3].clone()]));
        }
        out
    }

    pub fn brute(&self) -> Result<Scalar> {
        Ok(oracle::csp_brute(self.num_vars(), &self.constraints())?)
    }

    /// Random constraint graph with `n_edges` edges plus `isolated` extra
    /// variables; each signature has a zero outer pair.
    pub fn random(
        n_edges: usize,
        isolated: usize,
        n_unary: usize,
        signatures: Vec<SixVertexSignature>,
        seed: u64,
    ) -> PlanarCsp {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_plane_graph(n_edges, rng.gen());
        let mut rot = g.rotations().to_vec();
        rot.extend(std::iter::repeat_with(Vec::new).take(isolated));
        let graph = RotationMap::new(rot, g.pairs().to_vec()).expect("extended map");
        let binary = graph
            .edges()
            .into_iter()
            .map(|(h, h2)| {
                let first = if rng.gen_bool(0.5) { h } else { h2 };
                (first, rng.gen_range(0..signatures.len()))
            })
            .collect();
        let nv = graph.num_vertices();
        let unary = (0..n_unary)
            .map(|_| (rng.gen_range(0..nv), rng.gen_range(0..signatures.len())))
            .collect();
        PlanarCsp {
            graph,
            binary,
            unary,
            signatures,
        }
    }
}

/// Compiles a planar #CSP over `f~_In` constraints into a planar
/// `Holant(!=2 | f)` instance: each variable becomes a cycle that touches
/// one vertex per incident constraint.
pub fn compile_plcsp(csp: &PlanarCsp) -> Result<Compiled> {
    let g = &csp.graph;
    g.check_planar()?;
    for f in &csp.signatures {
        if !f.a.is_zero() || !f.x.is_zero() {
            return Err(ReductionError::Family(format!("need a = x = 0, got {f}")));
        }
    }
    let mut seen = vec![false; g.num_half_edges()];
    for &(first, label) in &csp.binary {
        let e = first.min(g.pair(first));
        if first >= seen.len() || seen[e] || label >= csp.signatures.len() {
            return Err(ReductionError::Precondition(format!(
                "bad binary constraint at half-edge {first}"
            )));
        }
        seen[e] = true;
    }
    if csp.binary.len() != g.num_edges() {
        return Err(ReductionError::Precondition(
            "every edge needs exactly one constraint".into(),
        ));
    }
    let nv = g.num_vertices();
    if csp
        .unary
        .iter()
        .any(|&(w, l)| w >= nv || l >= csp.signatures.len())
    {
        return Err(ReductionError::Precondition("bad unary constraint".into()));
    }

    // half-edge h of the constraint graph yields S(h) = 2h and P(h) = 2h+1
    let s = |h: usize| 2 * h;
    let p = |h: usize| 2 * h + 1;
    let base = 2 * g.num_half_edges();
    let mut rot = Vec::new();
    let mut labels = Vec::new();
    for &(first, label) in &csp.binary {
        let second = g.pair(first);
        rot.push(vec![s(first), p(first), s(second), p(second)]);
        labels.push(label);
    }
    let mut pair = vec![usize::MAX; base + 4 * csp.unary.len()];
    let mut unary_of = vec![Vec::new(); nv];
    for (k, &(w, label)) in csp.unary.iter().enumerate() {
        let b = base + 4 * k;
        // [loop-a, prev, next, loop-b]
        rot.push(vec![b, b + 1, b + 2, b + 3]);
        labels.push(label);
        pair[b] = b + 3;
        pair[b + 3] = b;
        unary_of[w].push(b);
    }
    let mut factor = Scalar::one();
    for u in 0..nv {
        let mut items: Vec<(usize, usize)> = g.rotation(u).iter().map(|&h| (p(h), s(h))).collect();
        items.extend(unary_of[u].iter().map(|&b| (b + 1, b + 2)));
        if items.is_empty() {
            factor = factor * Scalar::from_i64(2);
            continue;
        }
        for t in 0..items.len() {
            let next = items[t].1;
            let prev = items[(t + 1) % items.len()].0;
            pair[next] = prev;
            pair[prev] = next;
        }
    }
    let map = RotationMap::new(rot, pair)?;
    let signatures = csp
        .signatures
        .iter()
        .enumerate()
        .map(|(i, f)| (format!("f{i}"), Signature::Six(f.clone())))
        .collect();
    let instance = if labels.is_empty() {
        empty_instance()
    } else {
        PlanarInstance::new(map, signatures, labels)?
    };
    Ok(Compiled { instance, factor })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum InnerKind {
    G1,
    G2,
}

/// Tables `[g(0,0), g(0,1), g(1,0), g(1,1)]` of `g1 = [[a^2, by], [by, x^2]]`
/// and `g2 = [[ax, b^2], [y^2, ax]]`.
pub fn inner_kind_table(f: &SixVertexSignature, kind: InnerKind) -> [Scalar; 4] {
    let (a, b, x, y) = (&f.a, &f.b, &f.x, &f.y);
    match kind {
        InnerKind::G1 => [a * a, b * y, b * y, x * x],
        InnerKind::G2 => [a * x, b * b, y * y, a * x],
    }
}

/// A #CSP over `g1` and `g2` of a fixed `f`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InnerCsp {
    pub n: usize,
    /// `(u, v, kind)` applies `g_kind(x_u, x_v)`; `u == v` is allowed.
    pub constraints: Vec<(usize, usize, InnerKind)>,
}

impl InnerCsp {
    pub fn to_constraints(&self, f: &SixVertexSignature) -> Vec<Constraint> {
        self.constraints
            .iter()
            .map(|&(u, v, kind)| {
                let t = inner_kind_table(f, kind);
                if u == v {
                    Constraint::new(vec![u], vec![t[0].clone(), t[3].clone()])
                } else {
                    Constraint::new(vec![u, v], t.to_vec())
                }
            })
            .collect()
    }

    pub fn brute(&self, f: &SixVertexSignature) -> Result<Scalar> {
        Ok(oracle::csp_brute(self.n, &self.to_constraints(f))?)
    }

    pub fn random(n: usize, count: usize, diagonal: f64, seed: u64) -> InnerCsp {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let constraints = (0..count)
            .map(|_| {
                let u = rng.gen_range(0..n);
                let v = if n == 1 || rng.gen_bool(diagonal) {
                    u
                } else {
                    let mut v = rng.gen_range(0..n - 1);
                    if v >= u {
                        v += 1;
                    }
                    v
                };
                let kind = if rng.gen_bool(0.5) {
                    InnerKind::G1
                } else {
                    InnerKind::G2
                };
                (u, v, kind)
            })
            .collect();
        InnerCsp { n, constraints }
    }
}

/// Value of `f` rotated by `q` quarter turns at a vertex whose slots read
/// `vals` in rotation order.
fn placed_value(f: &SixVertexSignature, q: usize, vals: [usize; 4]) -> Scalar {
    let idx = vals.iter().fold(0, |acc, &v| (acc << 1) | v);
    f.rotate(q).to_general().v[idx].clone()
}

/// Slots at a crossing, `[A fwd, B fwd, A back, B back]`: outgoing
/// half-edges carry `1 - u`, incoming ones `u`.
fn crossing_value(f: &SixVertexSignature, q: usize, ua: usize, ub: usize) -> Scalar {
    placed_value(f, q, [1 - ua, 1 - ub, ua, ub])
}

/// Slots at a self-loop vertex, `[fwd, loop out, loop in, back]`.
fn loop_value(f: &SixVertexSignature, q: usize, w: usize) -> Scalar {
    placed_value(f, q, [1 - w, 1 - w, w, w])
}

/// Quarter turns for the two crossings of a double crossing between curves
/// `i` (A of the first) and `j` (A of the second) so that their product is
/// `target(u_i, u_j)`.
fn crossing_pair(
    f: &SixVertexSignature,
    target: &dyn Fn(usize, usize) -> Scalar,
) -> Option<(usize, usize)> {
    (0..16).map(|q| (q / 4, q % 4)).find(|&(q1, q2)| {
        (0..4).all(|u| {
            let (ui, uj) = (u >> 1, u & 1);
            crossing_value(f, q1, ui, uj) * crossing_value(f, q2, uj, ui) == target(ui, uj)
        })
    })
}

fn loop_pair(f: &SixVertexSignature, target: [Scalar; 2]) -> Option<(usize, usize)> {
    (0..16).map(|q| (q / 4, q % 4)).find(|&(q1, q2)| {
        (0..2).all(|w| loop_value(f, q1, w) * loop_value(f, q2, w) == target[w])
    })
}

enum Event {
    Crossing { a: usize, b: usize, chi: bool, q: usize },
    Loop { w: usize, q: usize },
}

/// Compiles a #CSP over `g1`, `g2` into a planar `Holant(!=2 | f, chi)`
/// instance. Variables become concentric circles; a circle is pulled inward
/// across its neighbours to cross circle `i` twice per constraint, and the
/// extra crossings on the way carry `chi`. Diagonal constraints become
/// pairs of self-loops.
pub fn compile_csp_inner(csp: &InnerCsp, f: &SixVertexSignature, pad: Chi) -> Result<Compiled> {
    let sq = |s: &Scalar| s * s;
    if !f.c.is_zero() || !f.z.is_zero() {
        return Err(ReductionError::Family(format!("need c = z = 0, got {f}")));
    }
    if f.a.is_zero() || sq(&f.a) != sq(&f.x) || f.b.is_zero() || sq(&f.b) != sq(&f.y) {
        return Err(ReductionError::Precondition(format!(
            "need a^2 = x^2 != 0 and b^2 = y^2 != 0, got {f}"
        )));
    }
    if f.b.checked_div(&f.a)?.pow(8).is_one() {
        return Err(ReductionError::Precondition("(b/a)^8 = 1".into()));
    }
    if csp.constraints.iter().any(|&(u, v, _)| u >= csp.n || v >= csp.n) {
        return Err(ReductionError::Precondition("variable out of range".into()));
    }

    // Placements are matched on a symbolic f with distinct prime entries, so
    // they hold for every f.
    let sym = SixVertexSignature::from_i64([2, 3, 5, 7, 11, 13]);
    let mut pairs = BTreeMap::new();
    let mut loops = BTreeMap::new();
    for kind in [InnerKind::G1, InnerKind::G2] {
        let t = inner_kind_table(&sym, kind);
        for forward in [true, false] {
            // forward: the constraint's first argument is curve i
            let target = |ui: usize, uj: usize| {
                if forward {
                    t[(ui << 1) | uj].clone()
                } else {
                    t[(uj << 1) | ui].clone()
                }
            };
            let found = crossing_pair(&sym, &target)
                .ok_or_else(|| ReductionError::NoPlacement(format!("{kind:?}")))?;
            pairs.insert((kind, forward), found);
        }
        let found = loop_pair(&sym, [t[0].clone(), t[3].clone()])
            .ok_or_else(|| ReductionError::NoPlacement(format!("{kind:?} diagonal")))?;
        loops.insert(kind, found);
    }
    let chi = pad.signature();
    let pad_pair = crossing_pair(&chi, &|_, _| Scalar::one())
        .ok_or_else(|| ReductionError::NoPlacement(pad.name().into()))?;

    let mut events = Vec::new();
    let mut per_pair: BTreeMap<(usize, usize), Vec<(InnerKind, bool)>> = BTreeMap::new();
    for &(u, v, kind) in &csp.constraints {
        if u == v {
            let (q1, q2) = loops[&kind];
            events.push(Event::Loop { w: u, q: q1 });
            events.push(Event::Loop { w: u, q: q2 });
        } else {
            per_pair
                .entry((u.min(v), u.max(v)))
                .or_default()
                .push((kind, u < v));
        }
    }
    for (&(i, j), list) in &per_pair {
        for p in (i + 1..j).rev() {
            events.push(Event::Crossing { a: p, b: j, chi: true, q: pad_pair.0 });
        }
        for &(kind, forward) in list {
            let (q1, q2) = pairs[&(kind, forward)];
            events.push(Event::Crossing { a: i, b: j, chi: false, q: q1 });
            events.push(Event::Crossing { a: j, b: i, chi: false, q: q2 });
        }
        for p in i + 1..j {
            events.push(Event::Crossing { a: j, b: p, chi: true, q: pad_pair.1 });
        }
    }

    let mut sig_ids: BTreeMap<(bool, usize), usize> = BTreeMap::new();
    let mut signatures = Vec::new();
    let mut labels = Vec::with_capacity(events.len());
    let mut rot = Vec::with_capacity(events.len());
    let mut pair = vec![usize::MAX; 4 * events.len()];
    // per curve: (outgoing, incoming) half-edges in order of travel
    let mut travel: Vec<Vec<(usize, usize)>> = vec![Vec::new(); csp.n];
    for (v, e) in events.iter().enumerate() {
        let h = 4 * v;
        rot.push(vec![h, h + 1, h + 2, h + 3]);
        let (is_chi, q) = match *e {
            Event::Crossing { a, b, chi, q } => {
                travel[a].push((h, h + 2));
                travel[b].push((h + 1, h + 3));
                (chi, q)
            }
            Event::Loop { w, q } => {
                travel[w].push((h, h + 3));
                pair[h + 1] = h + 2;
                pair[h + 2] = h + 1;
                (false, q)
            }
        };
        let id = *sig_ids.entry((is_chi, q)).or_insert_with(|| {
            let (name, base) = if is_chi {
                (pad.name(), chi.clone())
            } else {
                ("f", f.clone())
            };
            let name = if q == 0 {
                name.to_string()
            } else {
                format!("{name}.r{q}")
            };
            signatures.push((name, Signature::Six(base.rotate(q))));
            signatures.len() - 1
        });
        labels.push(id);
    }
    let mut factor = Scalar::one();
    for curve in &travel {
        if curve.is_empty() {
            factor = factor * Scalar::from_i64(2);
        }
        for t in 0..curve.len() {
            let out = curve[t].0;
            let back = curve[(t + 1) % curve.len()].1;
            pair[out] = back;
            pair[back] = out;
        }
    }
    let instance = if events.is_empty() {
        empty_instance()
    } else {
        PlanarInstance::new(RotationMap::new(rot, pair)?, signatures, labels)?
    };
    Ok(Compiled { instance, factor })
}

const SMALL: [i64; 6] = [-3, -2, -1, 1, 2, 3];

/// Six-vertex signature with small nonzero integer entries.
pub fn random_small_six(rng: &mut impl Rng) -> SixVertexSignature {
    SixVertexSignature::from_i64([(); 6].map(|_| *SMALL.choose(rng).unwrap()))
}

/// Random 4-regular plane instance on `vertices` vertices: `m` of them carry
/// `target` and the rest small random six-vertex signatures.
pub fn substitution_fixture(
    vertices: usize,
    m: usize,
    target: &Signature,
    seed: u64,
) -> PlanarInstance {
    assert!(m <= vertices && target.arity() == 4);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let map = medial_of_random_plane_graph(vertices, rng.gen());
    let mut signatures: Vec<(String, Signature)> = vec![("t".into(), target.clone())];
    let mut labels = vec![0; vertices];
    let mut order: Vec<usize> = (0..vertices).collect();
    order.shuffle(&mut rng);
    for &v in &order[m..] {
        signatures.push((format!("s{v}"), Signature::Six(random_small_six(&mut rng))));
        labels[v] = signatures.len() - 1;
    }
    PlanarInstance::new(map, signatures, labels).expect("medial maps are planar")
}

/// Random instance in which `m` edges of a 4-regular map are subdivided by
/// binary vertices carrying `target`.
pub fn binary_fixture(
    vertices: usize,
    m: usize,
    target: &BinarySignature,
    seed: u64,
) -> PlanarInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let map = medial_of_random_plane_graph(vertices, rng.gen());
    let mut rot = map.rotations().to_vec();
    let mut pair = map.pairs().to_vec();
    let mut edges = map.edges();
    assert!(m <= edges.len());
    edges.shuffle(&mut rng);
    for &(h, h2) in &edges[..m] {
        let (p, q) = (pair.len(), pair.len() + 1);
        pair.extend([h, h2]);
        pair[h] = p;
        pair[h2] = q;
        rot.push(vec![p, q]);
    }
    let map = RotationMap::new(rot, pair).expect("subdivision");
    let mut signatures: Vec<(String, Signature)> =
        vec![("t".into(), Signature::Binary(target.clone()))];
    let mut labels = Vec::new();
    for v in 0..vertices {
        signatures.push((format!("s{v}"), Signature::Six(random_small_six(&mut rng))));
        labels.push(v + 1);
    }
    labels.extend(std::iter::repeat(0).take(m));
    PlanarInstance::new(map, signatures, labels).expect("subdivision keeps planarity")
}
