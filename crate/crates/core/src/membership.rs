//! Membership tests for the tractable classes: product type, affine,
//! matchgate, Hadamard-transformed matchgate, and the non-singular redundant
//! property.
//!
//! Tables have length `2^n` (`n <= 4`) with the first variable as the high
//! bit. Every witness can rebuild its table and is checked against it before
//! being returned.

use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::signature::{GeneralSignature4, Parity, SixVertexSignature, parity_of};

/// A linear equation `sum_{i in mask} x_i = rhs (mod 2)`, bit `i` of `mask`
/// standing for variable `i` (0-based, first variable = bit 0).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Parity2 {
    pub mask: u32,
    pub rhs: u8,
}

/// `lambda * chi_{AX=0} * i^{Q(X)}` with
/// `Q(X) = sum_k lin[k] x_k + sum_{i<j} 2 cross(i,j) x_i x_j (mod 4)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineWitness {
    pub arity: usize,
    pub lambda: Scalar,
    pub linear: Vec<Parity2>,
    pub lin: Vec<u8>,
    /// Pairs `(i, j)`, `i < j`, whose cross coefficient is 2.
    pub cross: Vec<(usize, usize)>,
}

/// Bit of variable `k` (0-based) inside a table index of an `n`-ary function.
pub fn table_bit(n: usize, k: usize) -> usize {
    1 << (n - 1 - k)
}

fn assignment(n: usize, idx: usize) -> u32 {
    // variable k -> bit k
    (0..n).fold(0u32, |acc, k| {
        if idx & table_bit(n, k) != 0 {
            acc | (1 << k)
        } else {
            acc
        }
    })
}

impl AffineWitness {
    pub fn q_value(&self, xs: u32) -> u8 {
        let mut q = 0u32;
        for (k, c) in self.lin.iter().enumerate() {
            if xs >> k & 1 == 1 {
                q += *c as u32;
            }
        }
        for &(i, j) in &self.cross {
            if xs >> i & 1 == 1 && xs >> j & 1 == 1 {
                q += 2;
            }
        }
        (q % 4) as u8
    }

    pub fn satisfies(&self, xs: u32) -> bool {
        self.linear
            .iter()
            .all(|e| ((xs & e.mask).count_ones() % 2) as u8 == e.rhs)
    }

    pub fn reconstruct(&self) -> Vec<Scalar> {
        let n = self.arity;
        (0..1usize << n)
            .map(|idx| {
                let xs = assignment(n, idx);
                if self.lambda.is_zero() || !self.satisfies(xs) {
                    Scalar::zero()
                } else {
                    self.lambda.mul_zeta(2 * self.q_value(xs) as i64)
                }
            })
            .collect()
    }
}

/// Product-type decomposition: blocks of variables tied by `=`/`!=` to the
/// block representative, and one unary per block on the representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductWitness {
    pub arity: usize,
    /// Each block lists `(variable, offset)` with `x_var = x_rep xor offset`;
    /// the first entry is the representative with offset 0.
    pub blocks: Vec<Vec<(usize, u8)>>,
    pub unaries: Vec<[Scalar; 2]>,
}

impl ProductWitness {
    pub fn reconstruct(&self) -> Vec<Scalar> {
        let n = self.arity;
        (0..1usize << n)
            .map(|idx| {
                let xs = assignment(n, idx);
                let mut acc = Scalar::one();
                for (b, block) in self.blocks.iter().enumerate() {
                    let rep = (xs >> block[0].0 & 1) as u8;
                    if block.iter().any(|&(v, o)| (xs >> v & 1) as u8 != rep ^ o) {
                        return Scalar::zero();
                    }
                    acc *= &self.unaries[b][rep as usize];
                }
                acc
            })
            .collect()
    }
}

fn arity_of(table: &[Scalar]) -> usize {
    let n = table.len().trailing_zeros() as usize;
    assert_eq!(1 << n, table.len(), "table length must be a power of two");
    assert!(n <= 4, "arity above 4 is not supported");
    n
}

/// Basis of `{m : m . v = 0 for all v in span}` over GF(2).
fn orthogonal_complement(n: usize, span: &[u32]) -> Vec<u32> {
    let full = (1u32 << n) - 1;
    let mut basis: Vec<u32> = Vec::new();
    for m in 1..=full {
        if span.iter().all(|v| (m & v).count_ones() % 2 == 0) {
            // keep m if independent of the current basis
            let mut r = m;
            for b in &basis {
                let top = 31 - b.leading_zeros();
                if r >> top & 1 == 1 {
                    r ^= b;
                }
            }
            if r != 0 {
                basis.push(r);
                basis.sort_unstable_by(|a, b| b.cmp(a));
                // keep reduced: distinct leading bits
                let mut reduced: Vec<u32> = Vec::new();
                for mut v in basis.drain(..) {
                    for u in &reduced {
                        let top = 31 - u.leading_zeros();
                        if v >> top & 1 == 1 {
                            v ^= u;
                        }
                    }
                    if v != 0 {
                        reduced.push(v);
                        reduced.sort_unstable_by(|a, b| b.cmp(a));
                    }
                }
                basis = reduced;
            }
        }
    }
    basis
}

/// Affine membership of an arbitrary table of arity at most 4.
pub fn affine_witness(table: &[Scalar]) -> Option<AffineWitness> {
    let n = arity_of(table);
    let support: Vec<u32> = (0..table.len())
        .filter(|&i| !table[i].is_zero())
        .map(|i| assignment(n, i))
        .collect();
    let by_assignment = |xs: u32| -> &Scalar {
        let idx = (0..n).fold(0usize, |acc, k| {
            if xs >> k & 1 == 1 {
                acc | table_bit(n, k)
            } else {
                acc
            }
        });
        &table[idx]
    };
    if support.is_empty() {
        return Some(AffineWitness {
            arity: n,
            lambda: Scalar::zero(),
            linear: Vec::new(),
            lin: vec![0; n],
            cross: Vec::new(),
        });
    }
    if !support.len().is_power_of_two() {
        return None;
    }
    let in_support = |v: u32| support.contains(&v);
    for &p in &support {
        for &q in &support {
            for &r in &support {
                if !in_support(p ^ q ^ r) {
                    return None;
                }
            }
        }
    }
    let p0 = support[0];
    let f0 = by_assignment(p0).clone();
    let f0_inv = f0.inv().expect("support point is nonzero");
    let mut expo = Vec::with_capacity(support.len());
    for &s in &support {
        let ratio = by_assignment(s) * &f0_inv;
        match ratio.zeta_exponent() {
            Some(k) if k % 2 == 0 => expo.push((s, (k / 2) as u8)),
            _ => return None,
        }
    }
    let span: Vec<u32> = support.iter().map(|s| s ^ p0).collect();
    let linear: Vec<Parity2> = orthogonal_complement(n, &span)
        .into_iter()
        .map(|mask| Parity2 {
            mask,
            rhs: ((mask & p0).count_ones() % 2) as u8,
        })
        .collect();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let n_lin = 1u32 << (2 * n);
    let n_cross = 1u32 << pairs.len();
    for lin_code in 0..n_lin {
        let lin: Vec<u8> = (0..n).map(|k| ((lin_code >> (2 * k)) & 3) as u8).collect();
        for cross_code in 0..n_cross {
            let cross: Vec<(usize, usize)> = pairs
                .iter()
                .enumerate()
                .filter(|(t, _)| cross_code >> t & 1 == 1)
                .map(|(_, p)| *p)
                .collect();
            let w = AffineWitness {
                arity: n,
                lambda: Scalar::zero(),
                linear: linear.clone(),
                lin: lin.clone(),
                cross,
            };
            let q0 = w.q_value(p0);
            if expo
                .iter()
                .all(|&(s, e)| (w.q_value(s) + 4 - q0) % 4 == e)
            {
                let lambda = f0.mul_zeta(-2 * q0 as i64);
                let w = AffineWitness { lambda, ..w };
                debug_assert_eq!(w.reconstruct(), table);
                return (w.reconstruct() == table).then_some(w);
            }
        }
    }
    None
}

pub fn is_affine(f: &GeneralSignature4) -> Option<AffineWitness> {
    affine_witness(&f.v)
}

fn set_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let first = items[0];
    let mut out = Vec::new();
    for part in set_partitions(&items[1..]) {
        for i in 0..part.len() {
            let mut p = part.clone();
            p[i].insert(0, first);
            out.push(p);
        }
        let mut p = part;
        p.insert(0, vec![first]);
        out.push(p);
    }
    out
}

/// Product-type membership of an arbitrary table of arity at most 4.
pub fn product_witness(table: &[Scalar]) -> Option<ProductWitness> {
    let n = arity_of(table);
    let vars: Vec<usize> = (0..n).collect();
    if table.iter().all(|v| v.is_zero()) {
        return Some(ProductWitness {
            arity: n,
            blocks: vars.iter().map(|&v| vec![(v, 0)]).collect(),
            unaries: (0..n)
                .map(|k| {
                    if k == 0 {
                        [Scalar::zero(), Scalar::zero()]
                    } else {
                        [Scalar::one(), Scalar::one()]
                    }
                })
                .collect(),
        });
    }
    let value = |xs: u32| -> &Scalar {
        let idx = (0..n).fold(0usize, |acc, k| {
            if xs >> k & 1 == 1 {
                acc | table_bit(n, k)
            } else {
                acc
            }
        });
        &table[idx]
    };
    for partition in set_partitions(&vars) {
        let extra: usize = partition.iter().map(|b| b.len() - 1).sum();
        for signs in 0u32..1 << extra {
            let mut blocks: Vec<Vec<(usize, u8)>> = Vec::new();
            let mut t = 0;
            for b in &partition {
                let mut blk = vec![(b[0], 0u8)];
                for &v in &b[1..] {
                    blk.push((v, (signs >> t & 1) as u8));
                    t += 1;
                }
                blocks.push(blk);
            }
            let k = blocks.len();
            let expand = |r: u32| -> u32 {
                let mut xs = 0u32;
                for (bi, blk) in blocks.iter().enumerate() {
                    let bit = (r >> bi & 1) as u8;
                    for &(v, o) in blk {
                        if bit ^ o == 1 {
                            xs |= 1 << v;
                        }
                    }
                }
                xs
            };
            // support must sit inside the relation
            let mut inside = 0usize;
            for r in 0u32..1 << k {
                if !value(expand(r)).is_zero() {
                    inside += 1;
                }
            }
            let total = table.iter().filter(|v| !v.is_zero()).count();
            if inside != total {
                continue;
            }
            let Some(p) = (0u32..1 << k).find(|&r| !value(expand(r)).is_zero()) else {
                continue;
            };
            let tp = value(expand(p)).clone();
            let with_block = |bi: usize, v: u32| -> u32 { (p & !(1 << bi)) | (v << bi) };
            let mut unaries: Vec<[Scalar; 2]> = (0..k)
                .map(|bi| [0, 1].map(|v| value(expand(with_block(bi, v))).clone()))
                .collect();
            let scale = tp.pow(k as u64 - 1).inv().expect("nonzero");
            unaries[0] = unaries[0].clone().map(|u| &u * &scale);
            let w = ProductWitness {
                arity: n,
                blocks: blocks.clone(),
                unaries,
            };
            if w.reconstruct() == table {
                return Some(w);
            }
        }
    }
    None
}

pub fn is_product(f: &GeneralSignature4) -> Option<ProductWitness> {
    product_witness(&f.v)
}

/// Criterion `det M_Out = det M_In`, i.e. `-ax = by - cz`.
pub fn is_matchgate(f: &SixVertexSignature) -> bool {
    let (din, dout) = f.inner_outer_dets();
    din == dout
}

/// Matchgate test for any table of arity at most 4. Arity at most 3 needs
/// only a parity condition. At arity 4 an odd-parity table is first composed
/// with `!=2` on its first variable, which preserves membership.
pub fn is_matchgate_table(table: &[Scalar]) -> bool {
    let n = arity_of(table);
    let parity = parity_of(table);
    if n <= 3 {
        return parity != Parity::Mixed;
    }
    let f = GeneralSignature4::from_values(table.to_vec()).unwrap();
    let g = match parity {
        Parity::Zero => return true,
        Parity::Mixed => return false,
        Parity::Even => f,
        Parity::Odd => f.flip(0b1000),
    };
    let v = &g.v;
    let out = &(&v[0b0000] * &v[0b1111]) - &(&v[0b0011] * &v[0b1100]);
    let inn = &(&v[0b0110] * &v[0b1001]) - &(&v[0b0101] * &v[0b1010]);
    out == inn
}

pub fn is_matchgate_general(f: &GeneralSignature4) -> bool {
    is_matchgate_table(&f.v)
}

/// Membership in the Hadamard image class: `f^ = H^{(x)4} f` is a matchgate.
pub fn is_matchgate_hat(f: &SixVertexSignature) -> bool {
    is_matchgate_general(&f.to_general().hadamard_image())
}

pub fn is_matchgate_hat_general(f: &GeneralSignature4) -> bool {
    is_matchgate_general(&f.hadamard_image())
}

/// Some rotation view has identical middle rows and middle columns and a
/// nonsingular 3x3 matrix on rows/columns `{00, 01, 11}`.
pub fn is_nonsingular_redundant(f: &GeneralSignature4) -> bool {
    (0..4).any(|r| {
        let m = f.rotate(r).matrix();
        if m.row(1) != m.row(2) {
            return false;
        }
        if (0..4).any(|i| m[(i, 1)] != m[(i, 2)]) {
            return false;
        }
        let keep = [0, 1, 3];
        let sub = Mat::from_rows(
            keep.iter()
                .map(|&i| keep.iter().map(|&j| m[(i, j)].clone()).collect())
                .collect(),
        );
        !sub.det().is_zero()
    })
}
