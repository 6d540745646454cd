//! Polynomial-time #CSP evaluation for affine constraints (quadratic Gauss
//! sums over `Z_4`) and product-type constraints (parity union-find).

use thiserror::Error;

use crate::instance::PlanarInstance;
use crate::membership::{AffineWitness, affine_witness, product_witness};
use crate::oracle::Constraint;
use crate::scalar::Scalar;
use crate::signature::{IDX_A, IDX_B, IDX_C, IDX_X, IDX_Y, IDX_Z, Signature, SixVertexSignature, var_bit};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CspError {
    #[error("constraint {0} is not affine")]
    NotAffine(usize),
    #[error("constraint {0} is not of product type")]
    NotProduct(usize),
    #[error("vertex v{0} does not carry a six-vertex signature with a zero in each pair")]
    NotZeroPair(usize),
    #[error("pinned slots carry both values; the zero-pair count does not apply")]
    MixedPins,
}

/// Dense GF(2) row over `n` variables plus a right-hand side.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Row {
    bits: Vec<u64>,
    rhs: bool,
}

impl Row {
    fn zero(n: usize) -> Row {
        Row {
            bits: vec![0; n.div_ceil(64)],
            rhs: false,
        }
    }

    fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    fn flip(&mut self, i: usize) {
        self.bits[i / 64] ^= 1 << (i % 64);
    }

    fn xor(&mut self, other: &Row) {
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a ^= b;
        }
        self.rhs ^= other.rhs;
    }

    fn ones(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (w, &word) in self.bits.iter().enumerate() {
            let mut x = word;
            while x != 0 {
                let t = x.trailing_zeros() as usize;
                out.push(w * 64 + t);
                x &= x - 1;
            }
        }
        out
    }
}

/// `prefactor * sum_{x : linear} i^{Q(x)}` with
/// `Q = constant + sum lin_k x_k + 2 sum_{cross} x_i x_j (mod 4)`.
/// Cross coefficients are stored as bits, so they are even by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineAggregate {
    pub n: usize,
    pub prefactor: Scalar,
    linear: Vec<Row>,
    pub constant: u8,
    pub lin: Vec<u8>,
    cross: Vec<Row>,
}

impl AffineAggregate {
    pub fn new(n: usize) -> AffineAggregate {
        AffineAggregate {
            n,
            prefactor: Scalar::one(),
            linear: Vec::new(),
            constant: 0,
            lin: vec![0; n],
            cross: vec![Row::zero(n); n],
        }
    }

    pub fn cross(&self, i: usize, j: usize) -> bool {
        self.cross[i].get(j)
    }

    fn add_const(&mut self, c: u8) {
        self.constant = (self.constant + c) % 4;
    }

    fn add_lin(&mut self, i: usize, c: u8) {
        self.lin[i] = (self.lin[i] + c) % 4;
    }

    /// Adds `2 x_i x_j`; on the diagonal this is `2 x_i`.
    fn add_cross(&mut self, i: usize, j: usize) {
        if i == j {
            self.add_lin(i, 2);
        } else {
            self.cross[i].flip(j);
            self.cross[j].flip(i);
        }
    }

    /// Folds one affine witness applied to `vars` into the aggregate.
    pub fn absorb(&mut self, w: &AffineWitness, vars: &[usize]) {
        self.prefactor *= &w.lambda;
        for e in &w.linear {
            let mut row = Row::zero(self.n);
            for (k, &v) in vars.iter().enumerate() {
                if e.mask >> k & 1 == 1 {
                    row.flip(v);
                }
            }
            row.rhs = e.rhs == 1;
            self.linear.push(row);
        }
        for (k, &c) in w.lin.iter().enumerate() {
            self.add_lin(vars[k], c);
        }
        for &(i, j) in &w.cross {
            self.add_cross(vars[i], vars[j]);
        }
    }

    pub fn q_value(&self, x: &[bool]) -> u8 {
        let mut q = self.constant as u32;
        for i in 0..self.n {
            if !x[i] {
                continue;
            }
            q += self.lin[i] as u32;
            for j in i + 1..self.n {
                if x[j] && self.cross[i].get(j) {
                    q += 2;
                }
            }
        }
        (q % 4) as u8
    }

    /// Brute-force value, for checking.
    pub fn brute(&self) -> Scalar {
        let mut total = Scalar::zero();
        for code in 0u64..1 << self.n {
            let x: Vec<bool> = (0..self.n).map(|i| code >> i & 1 == 1).collect();
            let ok = self.linear.iter().all(|r| {
                r.ones().iter().fold(false, |acc, &i| acc ^ x[i]) == r.rhs
            });
            if ok {
                total += &Scalar::zeta(2 * self.q_value(&x) as i64);
            }
        }
        &total * &self.prefactor
    }

    /// Substitutes `x_p = rhs xor sum_{j in row} x_j` (the row must not
    /// contain `p`) into the quadratic form, removing `p`.
    fn substitute(&mut self, p: usize, row: &Row) {
        let terms = row.ones();
        let c = row.rhs;
        let lp = self.lin[p];
        self.lin[p] = 0;
        let partners = self.cross[p].ones();
        for &j in &partners {
            self.cross[p].flip(j);
            self.cross[j].flip(p);
        }
        // l * (c xor y_1 xor ... ) = l (sum y) - 2l sum_{s<t} y_s y_t
        if c {
            self.add_const(lp);
        }
        for &t in &terms {
            self.add_lin(t, lp);
        }
        if lp % 2 == 1 {
            if c {
                for &t in &terms {
                    self.add_lin(t, 2);
                }
            }
            for (a, &s) in terms.iter().enumerate() {
                for &t in &terms[a + 1..] {
                    self.add_cross(s, t);
                }
            }
        }
        // 2 x_p x_j = 2 (c + sum y) x_j mod 4
        for &j in &partners {
            if c {
                self.add_lin(j, 2);
            }
            for &t in &terms {
                self.add_cross(t, j);
            }
        }
    }

    /// Exact value: Gaussian elimination of the linear part, then the
    /// Gauss-sum recursion over the remaining variables in `order`.
    pub fn evaluate_with_order(mut self, order: &[usize]) -> Scalar {
        if self.prefactor.is_zero() {
            return Scalar::zero();
        }
        let mut alive = vec![true; self.n];
        let rows = std::mem::take(&mut self.linear);
        if !self.eliminate_rows(rows, &mut alive) {
            return Scalar::zero();
        }
        let mut factor = self.prefactor.clone();
        for &k in order {
            if !alive[k] {
                continue;
            }
            alive[k] = false;
            let l = self.lin[k];
            let nbrs = self.cross[k].ones();
            for &j in &nbrs {
                self.cross[k].flip(j);
                self.cross[j].flip(k);
            }
            self.lin[k] = 0;
            if l % 2 == 0 {
                // 1 + (-1)^{l/2 + S}: factor 2 and the condition S = l/2
                factor = &factor * &Scalar::from_i64(2);
                let mut row = Row::zero(self.n);
                for &j in &nbrs {
                    row.flip(j);
                }
                row.rhs = l == 2;
                if !self.eliminate_rows(vec![row], &mut alive) {
                    return Scalar::zero();
                }
            } else {
                // 1 + i^l (-1)^S = (1 + i^l) i^{-l S}
                factor = &factor * &(Scalar::one() + Scalar::zeta(2 * l as i64));
                let m = (4 - l) % 4;
                for &j in &nbrs {
                    self.add_lin(j, m);
                }
                for (a, &s) in nbrs.iter().enumerate() {
                    for &t in &nbrs[a + 1..] {
                        self.add_cross(s, t);
                    }
                }
            }
        }
        &factor * &Scalar::zeta(2 * self.constant as i64)
    }

    pub fn evaluate(self) -> Scalar {
        let order: Vec<usize> = (0..self.n).collect();
        self.evaluate_with_order(&order)
    }

    /// Solves `rows` against the live variables, substituting each pivot
    /// away. Returns `false` on an inconsistent system.
    fn eliminate_rows(&mut self, mut rows: Vec<Row>, alive: &mut [bool]) -> bool {
        while let Some(mut r) = rows.pop() {
            let ones = r.ones();
            let Some(&p) = ones.first() else {
                if r.rhs {
                    return false;
                }
                continue;
            };
            r.flip(p);
            for other in rows.iter_mut() {
                if other.get(p) {
                    other.flip(p);
                    other.xor(&r);
                }
            }
            self.substitute(p, &r);
            alive[p] = false;
        }
        true
    }
}

fn build_affine(n: usize, constraints: &[Constraint]) -> Result<AffineAggregate, CspError> {
    let mut agg = AffineAggregate::new(n);
    for (i, c) in constraints.iter().enumerate() {
        let w = affine_witness(&c.table).ok_or(CspError::NotAffine(i))?;
        agg.absorb(&w, &c.vars);
    }
    Ok(agg)
}

/// `sum_x prod_c c(x)` for affine constraints on `n` variables.
pub fn affine_eval(n: usize, constraints: &[Constraint]) -> Result<Scalar, CspError> {
    Ok(build_affine(n, constraints)?.evaluate())
}

/// As [`affine_eval`] with an explicit variable elimination order.
pub fn affine_eval_ordered(
    n: usize,
    constraints: &[Constraint],
    order: &[usize],
) -> Result<Scalar, CspError> {
    Ok(build_affine(n, constraints)?.evaluate_with_order(order))
}

/// Explicit `(lambda, linear, Q)` form of a unary or binary affine table.
pub fn affine_normal_form(table: &[Scalar]) -> Result<AffineWitness, CspError> {
    affine_witness(table).ok_or(CspError::NotAffine(0))
}

/// `Holant(!=2 | F)` as a #CSP with one variable per half-edge: each vertex
/// contributes its table over its rotation and each edge a disequality.
pub fn holant_csp(inst: &PlanarInstance) -> (usize, Vec<Constraint>) {
    let map = &inst.map;
    let neq = vec![Scalar::zero(), Scalar::one(), Scalar::one(), Scalar::zero()];
    let mut out: Vec<Constraint> = (0..map.num_vertices())
        .map(|v| Constraint::new(map.rotation(v).to_vec(), inst.signature_of(v).table()))
        .collect();
    out.extend(
        map.edges()
            .into_iter()
            .map(|(h, g)| Constraint::new(vec![h, g], neq.clone())),
    );
    (map.num_half_edges(), out)
}

/// `sum_x prod_c c(x)` for product-type constraints on `n` variables.
pub fn product_eval(n: usize, constraints: &[Constraint]) -> Result<Scalar, CspError> {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut parity = vec![0u8; n];
    fn find(parent: &mut [usize], parity: &mut [u8], x: usize) -> (usize, u8) {
        let mut path = Vec::new();
        let mut r = x;
        while parent[r] != r {
            path.push(r);
            r = parent[r];
        }
        // compress, accumulating parities from the root down
        let mut acc = 0u8;
        for &v in path.iter().rev() {
            acc ^= parity[v];
            parity[v] = acc;
            parent[v] = r;
        }
        (r, if x == r { 0 } else { parity[x] })
    }
    let mut unaries: Vec<(usize, [Scalar; 2])> = Vec::new();
    for (i, c) in constraints.iter().enumerate() {
        let w = product_witness(&c.table).ok_or(CspError::NotProduct(i))?;
        for (b, block) in w.blocks.iter().enumerate() {
            let rep = c.vars[block[0].0];
            for &(v, o) in &block[1..] {
                let (ra, pa) = find(&mut parent, &mut parity, rep);
                let (rb, pb) = find(&mut parent, &mut parity, c.vars[v]);
                if ra == rb {
                    if pa ^ pb != o {
                        return Ok(Scalar::zero());
                    }
                } else {
                    parent[rb] = ra;
                    parity[rb] = pa ^ pb ^ o;
                }
            }
            unaries.push((rep, w.unaries[b].clone()));
        }
    }
    let mut per_root: Vec<[Scalar; 2]> = vec![[Scalar::one(), Scalar::one()]; n];
    for (v, u) in unaries {
        let (r, p) = find(&mut parent, &mut parity, v);
        for t in 0..2 {
            per_root[r][t] *= &u[t ^ p as usize];
        }
    }
    let mut total = Scalar::one();
    for v in 0..n {
        if find(&mut parent, &mut parity, v).0 == v {
            total *= &(&per_root[v][0] + &per_root[v][1]);
        }
    }
    Ok(total)
}

/// For `f` with a zero in each pair, one nonzero pattern is kept from each
/// pair; the three kept patterns agree on one slot. Returns that slot and
/// its value.
pub fn pinned_slot(f: &SixVertexSignature) -> Option<(usize, usize)> {
    let pick = |p: usize, q: usize| match (f.entry(p).is_zero(), f.entry(q).is_zero()) {
        (false, false) => None,
        (false, true) | (true, true) => Some(p),
        (true, false) => Some(q),
    };
    let reps = [pick(IDX_A, IDX_X)?, pick(IDX_B, IDX_Y)?, pick(IDX_C, IDX_Z)?];
    (0..4).find_map(|k| {
        let bit = var_bit(k + 1);
        let d = reps[0] & bit;
        reps.iter().all(|&r| r & bit == d).then_some((k, (d != 0) as usize))
    })
}

/// Holant value when every vertex carries a zero-in-each-pair signature and
/// all pinned slots hold the same value `d`.
///
/// The partner of a pinned half-edge is forced to `1 - d`. Every other edge
/// must be "picked" by exactly one endpoint (the endpoint where it carries
/// `d`) and every vertex picks exactly one slot besides its pin. So each
/// component of the free-edge graph must be unicyclic: trees are forced and
/// the cycle has two directions.
pub fn zero_pair_eval(inst: &PlanarInstance) -> Result<Scalar, CspError> {
    let map = &inst.map;
    let nv = map.num_vertices();
    let mut pins = Vec::with_capacity(nv);
    for v in 0..nv {
        let f = match inst.signature_of(v) {
            Signature::Six(f) => f,
            _ => return Err(CspError::NotZeroPair(v)),
        };
        let pin = pinned_slot(f).ok_or(CspError::NotZeroPair(v))?;
        pins.push((pin, f));
    }
    if pins.windows(2).any(|w| w[0].0.1 != w[1].0.1) {
        return Err(CspError::MixedPins);
    }
    let pinned = |h: usize| map.position(h) == pins[map.vertex_of(h)].0.0;
    let weight = |h: usize| {
        let ((k, d), f) = pins[map.vertex_of(h)];
        let s = map.position(h);
        let idx = (0..4).fold(0, |acc, j| {
            let bit = if j == k || j == s { d } else { 1 - d };
            acc | (bit * var_bit(j + 1))
        });
        f.entry(idx)
    };
    let mut alive = vec![false; map.num_half_edges()];
    let mut deg = vec![0usize; nv];
    for (h, g) in map.edges() {
        match (pinned(h), pinned(g)) {
            (true, true) => return Ok(Scalar::zero()),
            (false, false) => {
                alive[h] = true;
                alive[g] = true;
                deg[map.vertex_of(h)] += 1;
                deg[map.vertex_of(g)] += 1;
            }
            _ => {}
        }
    }
    let free = |v: usize, alive: &[bool]| -> Vec<usize> {
        map.rotation(v).iter().copied().filter(|&h| alive[h]).collect()
    };
    let mut total = Scalar::one();
    let mut done = vec![false; nv];
    let mut stack: Vec<usize> = (0..nv).filter(|&v| deg[v] <= 1).collect();
    while let Some(v) = stack.pop() {
        if done[v] {
            continue;
        }
        if deg[v] == 0 {
            return Ok(Scalar::zero());
        }
        let h = free(v, &alive)[0];
        let g = map.pair(h);
        total *= &weight(h);
        alive[h] = false;
        alive[g] = false;
        done[v] = true;
        let u = map.vertex_of(g);
        deg[u] -= 1;
        if deg[u] <= 1 {
            stack.push(u);
        }
    }
    for v0 in 0..nv {
        if done[v0] {
            continue;
        }
        if deg[v0] != 2 {
            // every remaining vertex has degree >= 2, so this component has
            // more edges than vertices
            return Ok(Scalar::zero());
        }
        let start = free(v0, &alive);
        let mut sum = Scalar::zero();
        for &h0 in &start {
            let mut prod = Scalar::one();
            let mut h = h0;
            loop {
                prod *= &weight(h);
                let g = map.pair(h);
                let u = map.vertex_of(g);
                if u == v0 {
                    break;
                }
                let next = free(u, &alive);
                if next.len() != 2 {
                    return Ok(Scalar::zero());
                }
                h = if next[0] == g { next[1] } else { next[0] };
            }
            sum += &prod;
        }
        // mark the cycle
        let mut h = start[0];
        loop {
            let u = map.vertex_of(map.pair(h));
            done[map.vertex_of(h)] = true;
            if u == v0 {
                break;
            }
            let next = free(u, &alive);
            h = if next[0] == map.pair(h) { next[1] } else { next[0] };
        }
        total *= &sum;
    }
    Ok(total)
}
