//! Six-vertex and general arity-4 signatures, their matrix views, rotations
//! and the gadget algebra built from the double disequality `N`.
//!
//! Bit strings are indexed with `x1` as the most significant bit, so the
//! entry `f_{x1 x2 x3 x4}` lives at `x1<<3 | x2<<2 | x3<<1 | x4`. The standard
//! matrix view is `M_{x1x2,x4x3}(f)`: rows are `(x1,x2)`, columns `(x4,x3)`.

use crate::linalg::Mat;
use crate::scalar::{Scalar, ScalarError};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("expected {expected} entries, found {found}")]
    Length { expected: usize, found: usize },
    #[error("unknown signature kind `{0}`")]
    Kind(String),
    #[error("variables {0:?} are not cyclically adjacent")]
    NotAdjacent((usize, usize)),
}

pub const IDX_A: usize = 0b0011;
pub const IDX_B: usize = 0b0110;
pub const IDX_C: usize = 0b0101;
pub const IDX_X: usize = 0b1100;
pub const IDX_Y: usize = 0b1001;
pub const IDX_Z: usize = 0b1010;

/// The six support patterns in the order `a, b, c, x, y, z`.
pub const SIX_PATTERNS: [usize; 6] = [IDX_A, IDX_B, IDX_C, IDX_X, IDX_Y, IDX_Z];

/// Bit of variable `x_k` (1-based) inside a 4-bit index.
pub fn var_bit(k: usize) -> usize {
    1 << (4 - k)
}

/// Row index `(x1,x2)` and column index `(x4,x3)` of the standard view.
pub fn matrix_position(idx: usize) -> (usize, usize) {
    let row = idx >> 2;
    let col = ((idx & 1) << 1) | ((idx >> 1) & 1);
    (row, col)
}

fn index_from_position(row: usize, col: usize) -> usize {
    (row << 2) | ((col & 1) << 1) | (col >> 1)
}

/// Signature of the six-vertex model, `M(f) = [[0,0,0,a],[0,b,c,0],[0,z,y,0],[x,0,0,0]]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SixVertexSignature {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub x: Scalar,
    pub y: Scalar,
    pub z: Scalar,
}

impl SixVertexSignature {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, x: Scalar, y: Scalar, z: Scalar) -> Self {
        SixVertexSignature { a, b, c, x, y, z }
    }

    pub fn from_i64(v: [i64; 6]) -> Self {
        Self::from_values(v.map(Scalar::from_i64))
    }

    /// Values in the order `a, b, c, x, y, z`.
    pub fn from_values(v: [Scalar; 6]) -> Self {
        let [a, b, c, x, y, z] = v;
        SixVertexSignature { a, b, c, x, y, z }
    }

    pub fn values(&self) -> [Scalar; 6] {
        [
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.x.clone(),
            self.y.clone(),
            self.z.clone(),
        ]
    }

    pub fn zero() -> Self {
        Self::from_i64([0; 6])
    }

    pub fn is_zero(&self) -> bool {
        self.values().iter().all(|v| v.is_zero())
    }

    pub fn entry(&self, idx: usize) -> Scalar {
        match idx {
            IDX_A => self.a.clone(),
            IDX_B => self.b.clone(),
            IDX_C => self.c.clone(),
            IDX_X => self.x.clone(),
            IDX_Y => self.y.clone(),
            IDX_Z => self.z.clone(),
            _ => Scalar::zero(),
        }
    }

    pub fn to_general(&self) -> GeneralSignature4 {
        let mut v: [Scalar; 16] = Default::default();
        for idx in SIX_PATTERNS {
            v[idx] = self.entry(idx);
        }
        GeneralSignature4 { v }
    }

    pub fn matrix(&self) -> Mat {
        self.to_general().matrix()
    }

    /// One quarter turn sends `(a,b,c,x,y,z)` to `(y,a,z,b,x,c)`.
    pub fn rotate(&self, quarter_turns: usize) -> Self {
        let mut f = self.clone();
        for _ in 0..quarter_turns % 4 {
            f = SixVertexSignature {
                a: f.y.clone(),
                b: f.a.clone(),
                c: f.z.clone(),
                x: f.b.clone(),
                y: f.x.clone(),
                z: f.c.clone(),
            };
        }
        f
    }

    /// Multiplies the entries with `x_var = 1` by `t`.
    pub fn scale_on(&self, var: usize, t: &Scalar) -> Self {
        assert!((1..=4).contains(&var), "variable index out of range");
        let bit = var_bit(var);
        let mut vals = self.values();
        for (k, idx) in SIX_PATTERNS.iter().enumerate() {
            if idx & bit != 0 {
                vals[k] = &vals[k] * t;
            }
        }
        Self::from_values(vals)
    }

    pub fn scale(&self, t: &Scalar) -> Self {
        Self::from_values(self.values().map(|v| &v * t))
    }

    /// `(det M_In, det M_Out) = (by - cz, -ax)`.
    pub fn inner_outer_dets(&self) -> (Scalar, Scalar) {
        (
            &(&self.b * &self.y) - &(&self.c * &self.z),
            -(&self.a * &self.x),
        )
    }

    /// Inner matrix `[[b, c], [z, y]]`.
    pub fn inner_matrix(&self) -> Mat {
        Mat::from_rows(vec![
            vec![self.b.clone(), self.c.clone()],
            vec![self.z.clone(), self.y.clone()],
        ])
    }

    /// Outer matrix `[[0, a], [x, 0]]`.
    pub fn outer_matrix(&self) -> Mat {
        Mat::from_rows(vec![
            vec![Scalar::zero(), self.a.clone()],
            vec![self.x.clone(), Scalar::zero()],
        ])
    }

    /// Parses the comma list `a,b,c,x,y,z`.
    pub fn parse(s: &str) -> Result<Self, SignatureError> {
        let v = parse_scalars(s)?;
        if v.len() != 6 {
            return Err(SignatureError::Length {
                expected: 6,
                found: v.len(),
            });
        }
        Ok(Self::from_values(v.try_into().unwrap()))
    }
}

impl fmt::Display for SixVertexSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.values().iter().map(|s| s.to_string()).collect();
        write!(f, "{}", v.join(","))
    }
}

pub fn parse_scalars(s: &str) -> Result<Vec<Scalar>, SignatureError> {
    s.split(',')
        .map(|t| t.trim().parse::<Scalar>().map_err(SignatureError::from))
        .collect()
}

/// Arbitrary function `{0,1}^4 -> Q(zeta_8)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct GeneralSignature4 {
    pub v: [Scalar; 16],
}

/// Parity structure of a signature's support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Zero,
    Even,
    Odd,
    Mixed,
}

pub fn parity_of(values: &[Scalar]) -> Parity {
    let mut even = false;
    let mut odd = false;
    for (i, v) in values.iter().enumerate() {
        if !v.is_zero() {
            if i.count_ones() % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
    }
    match (even, odd) {
        (false, false) => Parity::Zero,
        (true, false) => Parity::Even,
        (false, true) => Parity::Odd,
        (true, true) => Parity::Mixed,
    }
}

/// Unnormalized Hadamard transform `f^(y) = sum_x (-1)^<x,y> f(x)` of a table
/// of length `2^n`.
pub fn hadamard_table(values: &[Scalar]) -> Vec<Scalar> {
    let n = values.len();
    (0..n)
        .map(|y| {
            let mut acc = Scalar::zero();
            for (x, v) in values.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                if (x & y).count_ones() % 2 == 0 {
                    acc += v;
                } else {
                    acc -= v;
                }
            }
            acc
        })
        .collect()
}

impl GeneralSignature4 {
    pub fn from_values(v: Vec<Scalar>) -> Result<Self, SignatureError> {
        let n = v.len();
        let v: [Scalar; 16] = v.try_into().map_err(|_| SignatureError::Length {
            expected: 16,
            found: n,
        })?;
        Ok(GeneralSignature4 { v })
    }

    pub fn from_i64(v: [i64; 16]) -> Self {
        GeneralSignature4 {
            v: v.map(Scalar::from_i64),
        }
    }

    pub fn zero() -> Self {
        GeneralSignature4::default()
    }

    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|s| s.is_zero())
    }

    pub fn matrix(&self) -> Mat {
        let mut m = Mat::zeros(4, 4);
        for idx in 0..16 {
            let (r, c) = matrix_position(idx);
            m[(r, c)] = self.v[idx].clone();
        }
        m
    }

    /// Reads a standard-view matrix `M_{x1x2,x4x3}` back into a signature.
    pub fn from_matrix(m: &Mat) -> Self {
        assert_eq!((m.rows, m.cols), (4, 4));
        let mut v: [Scalar; 16] = Default::default();
        for r in 0..4 {
            for c in 0..4 {
                v[index_from_position(r, c)] = m[(r, c)].clone();
            }
        }
        GeneralSignature4 { v }
    }

    /// `f^{pi/2}(y1,y2,y3,y4) = f(y4,y1,y2,y3)`, applied `quarter_turns` times.
    pub fn rotate(&self, quarter_turns: usize) -> Self {
        let mut cur = self.clone();
        for _ in 0..quarter_turns % 4 {
            let mut v: [Scalar; 16] = Default::default();
            for (y, slot) in v.iter_mut().enumerate() {
                // y = y1 y2 y3 y4; source index x = (y4, y1, y2, y3)
                let x = ((y & 1) << 3) | (y >> 1);
                *slot = cur.v[x].clone();
            }
            cur = GeneralSignature4 { v };
        }
        cur
    }

    /// `g(x) = f(x xor mask)`: composes the variables in `mask` with `!=2`.
    pub fn flip(&self, mask: usize) -> Self {
        let mut v: [Scalar; 16] = Default::default();
        for (x, slot) in v.iter_mut().enumerate() {
            *slot = self.v[x ^ mask].clone();
        }
        GeneralSignature4 { v }
    }

    pub fn scale(&self, t: &Scalar) -> Self {
        GeneralSignature4 {
            v: self.v.clone().map(|s| &s * t),
        }
    }

    pub fn parity(&self) -> Parity {
        parity_of(&self.v)
    }

    /// Down-cast when the support lies inside the six weight-2 patterns.
    pub fn to_six(&self) -> Option<SixVertexSignature> {
        for (idx, v) in self.v.iter().enumerate() {
            if !SIX_PATTERNS.contains(&idx) && !v.is_zero() {
                return None;
            }
        }
        Some(SixVertexSignature::from_values(
            SIX_PATTERNS.map(|i| self.v[i].clone()),
        ))
    }

    pub fn hadamard_image(&self) -> Self {
        GeneralSignature4::from_values(hadamard_table(&self.v)).unwrap()
    }

    pub fn parse(s: &str) -> Result<Self, SignatureError> {
        GeneralSignature4::from_values(parse_scalars(s)?)
    }
}

impl fmt::Display for GeneralSignature4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.v.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", v.join(","))
    }
}

/// Binary signature with `M_{x1,x2}(g) = [[g00, g01], [g10, g11]]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct BinarySignature {
    pub g: [Scalar; 4],
}

impl BinarySignature {
    pub fn new(g00: Scalar, g01: Scalar, g10: Scalar, g11: Scalar) -> Self {
        BinarySignature {
            g: [g00, g01, g10, g11],
        }
    }

    pub fn from_i64(v: [i64; 4]) -> Self {
        BinarySignature {
            g: v.map(Scalar::from_i64),
        }
    }

    /// Binary disequality `(0, 1, 1, 0)`.
    pub fn neq() -> Self {
        Self::from_i64([0, 1, 1, 0])
    }

    pub fn eq() -> Self {
        Self::from_i64([1, 0, 0, 1])
    }

    pub fn get(&self, u: usize, v: usize) -> &Scalar {
        &self.g[(u << 1) | v]
    }

    pub fn matrix(&self) -> Mat {
        Mat::from_rows(vec![
            vec![self.g[0].clone(), self.g[1].clone()],
            vec![self.g[2].clone(), self.g[3].clone()],
        ])
    }

    pub fn from_matrix(m: &Mat) -> Self {
        BinarySignature::new(
            m[(0, 0)].clone(),
            m[(0, 1)].clone(),
            m[(1, 0)].clone(),
            m[(1, 1)].clone(),
        )
    }

    /// Connects the second variable of `self` to the first of `other`
    /// through `!=2`: `M(self) N2 M(other)`.
    pub fn chain_neq(&self, other: &BinarySignature) -> Self {
        let n2 = Mat::from_i64(&[&[0, 1], &[1, 0]]);
        BinarySignature::from_matrix(&self.matrix().mul(&n2).mul(&other.matrix()))
    }

    pub fn swap_args(&self) -> Self {
        BinarySignature::new(
            self.g[0].clone(),
            self.g[2].clone(),
            self.g[1].clone(),
            self.g[3].clone(),
        )
    }

    pub fn hadamard_image(&self) -> Self {
        let t = hadamard_table(&self.g);
        BinarySignature::new(t[0].clone(), t[1].clone(), t[2].clone(), t[3].clone())
    }

    pub fn scale(&self, t: &Scalar) -> Self {
        BinarySignature {
            g: self.g.clone().map(|s| &s * t),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.g.iter().all(|s| s.is_zero())
    }
}

impl fmt::Display for BinarySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.g.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", v.join(","))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UnarySignature {
    pub u: [Scalar; 2],
}

impl UnarySignature {
    pub fn new(u0: Scalar, u1: Scalar) -> Self {
        UnarySignature { u: [u0, u1] }
    }

    pub fn from_i64(v: [i64; 2]) -> Self {
        UnarySignature {
            u: v.map(Scalar::from_i64),
        }
    }
}

impl fmt::Display for UnarySignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.u[0], self.u[1])
    }
}

/// A vertex label of any supported arity.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Signature {
    Unary(UnarySignature),
    Binary(BinarySignature),
    Six(SixVertexSignature),
    Quad(GeneralSignature4),
}

impl Signature {
    pub fn arity(&self) -> usize {
        match self {
            Signature::Unary(_) => 1,
            Signature::Binary(_) => 2,
            Signature::Six(_) | Signature::Quad(_) => 4,
        }
    }

    /// Full value table indexed with the first variable as the high bit.
    pub fn table(&self) -> Vec<Scalar> {
        match self {
            Signature::Unary(u) => u.u.to_vec(),
            Signature::Binary(b) => b.g.to_vec(),
            Signature::Six(s) => s.to_general().v.to_vec(),
            Signature::Quad(q) => q.v.to_vec(),
        }
    }

    /// Literal forms: `six a,b,c,x,y,z`, `quad v0,..,v15`, `binary g00,g01,g10,g11`,
    /// `unary u0,u1`, or a bare six-entry list.
    pub fn parse(s: &str) -> Result<Self, SignatureError> {
        let s = s.trim();
        let (kind, body) = match s.split_once(char::is_whitespace) {
            Some((k, b)) if ["six", "quad", "binary", "unary"].contains(&k) => (k, b),
            _ => ("six", s),
        };
        let v = parse_scalars(body)?;
        let want = match kind {
            "six" => 6,
            "quad" => 16,
            "binary" => 4,
            "unary" => 2,
            k => return Err(SignatureError::Kind(k.to_string())),
        };
        if v.len() != want {
            return Err(SignatureError::Length {
                expected: want,
                found: v.len(),
            });
        }
        Ok(match kind {
            "six" => Signature::Six(SixVertexSignature::from_values(v.try_into().unwrap())),
            "quad" => Signature::Quad(GeneralSignature4::from_values(v)?),
            "binary" => Signature::Binary(BinarySignature {
                g: v.try_into().unwrap(),
            }),
            _ => Signature::Unary(UnarySignature {
                u: v.try_into().unwrap(),
            }),
        })
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Signature::Unary(u) => write!(f, "unary {u}"),
            Signature::Binary(b) => write!(f, "binary {b}"),
            Signature::Six(s) => write!(f, "six {s}"),
            Signature::Quad(q) => write!(f, "quad {q}"),
        }
    }
}

/// `N = (!=2) (x) (!=2)`, the 4x4 reversal matrix.
pub fn n_matrix() -> Mat {
    Mat::from_i64(&[&[0, 0, 0, 1], &[0, 0, 1, 0], &[0, 1, 0, 0], &[1, 0, 0, 0]])
}

/// `H = [[1, 1], [1, -1]]`.
pub fn h_matrix() -> Mat {
    Mat::from_i64(&[&[1, 1], &[1, -1]])
}

/// `chi_1`: `a = b = x = y = 1`, `c = z = 0`.
pub fn chi1() -> SixVertexSignature {
    SixVertexSignature::from_i64([1, 1, 0, 1, 1, 0])
}

/// `chi_2`: `a = b = y = 1`, `x = -1`, `c = z = 0`.
pub fn chi2() -> SixVertexSignature {
    SixVertexSignature::from_i64([1, 1, 0, -1, 1, 0])
}

/// `M_view1(f1) N M_view2(f2)`, where a view is the standard matrix of a
/// rotation by that many quarter turns.
pub fn compose_n(
    f1: &GeneralSignature4,
    f2: &GeneralSignature4,
    view1: usize,
    view2: usize,
) -> GeneralSignature4 {
    let m = f1
        .rotate(view1)
        .matrix()
        .mul(&n_matrix())
        .mul(&f2.rotate(view2).matrix());
    GeneralSignature4::from_matrix(&m)
}

fn adjacent(p: usize, q: usize) -> bool {
    let d = (p + 4 - q) % 4;
    (1..=4).contains(&p) && (1..=4).contains(&q) && (d == 1 || d == 3)
}

fn contract_binary(
    f: &GeneralSignature4,
    g: &BinarySignature,
    sites: (usize, usize),
    through_neq: bool,
) -> Result<BinarySignature, SignatureError> {
    if !adjacent(sites.0, sites.1) {
        return Err(SignatureError::NotAdjacent(sites));
    }
    let keep = remaining_pair(sites);
    let mut out: [Scalar; 4] = Default::default();
    for u in 0..2 {
        for v in 0..2 {
            let mut acc = Scalar::zero();
            for s in 0..2 {
                for t in 0..2 {
                    let mut idx = 0;
                    if u == 1 {
                        idx |= var_bit(keep.0);
                    }
                    if v == 1 {
                        idx |= var_bit(keep.1);
                    }
                    if s == 1 {
                        idx |= var_bit(sites.0);
                    }
                    if t == 1 {
                        idx |= var_bit(sites.1);
                    }
                    let (gs, gt) = if through_neq { (1 - s, 1 - t) } else { (s, t) };
                    let fv = &f.v[idx];
                    if !fv.is_zero() {
                        acc += &(fv * g.get(gs, gt));
                    }
                }
            }
            out[(u << 1) | v] = acc;
        }
    }
    Ok(BinarySignature { g: out })
}

/// The two variables left after contracting `sites`, ordered so that the
/// contraction of `(x4, x3)` keeps `(x1, x2)` and that of `(x1, x2)` keeps
/// `(x4, x3)`: the matrix identities `M(f) N g` and `(g^T N M(f))^T`.
pub fn remaining_pair(sites: (usize, usize)) -> (usize, usize) {
    let next = |k: usize| k % 4 + 1;
    let prev = |k: usize| (k + 2) % 4 + 1;
    if next(sites.0) == sites.1 {
        (prev(sites.0), prev(prev(sites.0)))
    } else {
        (next(sites.0), next(next(sites.0)))
    }
}

/// Connects variables `sites = (x_p, x_q)` of `f` to the first and second
/// variables of `g`, both through `!=2`.
pub fn attach_binary(
    f: &GeneralSignature4,
    g: &BinarySignature,
    sites: (usize, usize),
) -> Result<BinarySignature, SignatureError> {
    contract_binary(f, g, sites, true)
}

/// As [`attach_binary`] but with plain (equality) connections.
pub fn attach_binary_direct(
    f: &GeneralSignature4,
    g: &BinarySignature,
    sites: (usize, usize),
) -> Result<BinarySignature, SignatureError> {
    contract_binary(f, g, sites, false)
}

#[cfg(test)]
mod tests {
    use super::*;

    // distinct primes stand in for symbolic a, b, c, x, y, z
    fn sym() -> SixVertexSignature {
        SixVertexSignature::from_i64([2, 3, 5, 7, 11, 13])
    }

    #[test]
    fn quarter_turn_matches_view() {
        let f = sym();
        let r = f.rotate(1);
        assert_eq!(r, SixVertexSignature::from_i64([11, 2, 13, 3, 7, 5]));
        assert_eq!(f.rotate(2), SixVertexSignature::from_i64([7, 11, 5, 2, 3, 13]));
        assert_eq!(f.rotate(4), f);
        assert_eq!(f.to_general().rotate(1), r.to_general());
    }

    #[test]
    fn three_quarter_turn_matrix() {
        let f = sym();
        let m = f.rotate(3).matrix();
        let want = Mat::from_i64(&[&[0, 0, 0, 3], &[0, 7, 13, 0], &[0, 5, 2, 0], &[11, 0, 0, 0]]);
        assert_eq!(m, want);
    }

    #[test]
    fn standard_matrix_layout() {
        let f = sym();
        let want = Mat::from_i64(&[&[0, 0, 0, 2], &[0, 3, 5, 0], &[0, 13, 11, 0], &[7, 0, 0, 0]]);
        assert_eq!(f.matrix(), want);
        assert_eq!(GeneralSignature4::from_matrix(&want), f.to_general());
    }

    #[test]
    fn scaling_rows() {
        let f = sym();
        let t = Scalar::from_i64(10);
        assert_eq!(f.scale_on(1, &t), SixVertexSignature::from_i64([2, 3, 5, 70, 110, 130]));
        assert_eq!(f.scale_on(4, &t), SixVertexSignature::from_i64([20, 3, 50, 7, 110, 13]));
        assert_eq!(f.scale_on(2, &Scalar::one()), f);
    }

    #[test]
    fn disequality_attachments() {
        let f = sym().to_general();
        let g1 = attach_binary(&f, &BinarySignature::neq(), (4, 3)).unwrap();
        assert_eq!(g1, BinarySignature::from_i64([0, 3 + 5, 13 + 11, 0]));
        let g2 = attach_binary(&f, &BinarySignature::neq(), (1, 2)).unwrap();
        assert_eq!(g2, BinarySignature::from_i64([0, 3 + 13, 5 + 11, 0]));
        let zero = BinarySignature::from_i64([0; 4]);
        assert!(attach_binary(&f, &zero, (4, 3)).unwrap().is_zero());
        assert!(attach_binary(&f, &zero, (1, 3)).is_err());
    }

    #[test]
    fn chain_of_three_diagonal_inner() {
        let b = Scalar::from_i64(3);
        let f = SixVertexSignature::new(
            Scalar::one(),
            b.clone(),
            Scalar::zero(),
            Scalar::one(),
            b.clone(),
            Scalar::zero(),
        )
        .to_general();
        let two = compose_n(&f, &f, 0, 0);
        let three = compose_n(&two, &f, 0, 0).to_six().unwrap();
        assert_eq!(three.b, b.pow(3));
        assert_eq!(three.y, b.pow(3));
        assert!(three.c.is_zero() && three.z.is_zero());
    }

    #[test]
    fn hadamard_of_disequality() {
        let h = BinarySignature::neq().hadamard_image();
        assert_eq!(h, BinarySignature::from_i64([2, 0, 0, -2]));
    }

    #[test]
    fn hadamard_involution() {
        let f = GeneralSignature4::from_i64([1, 0, 2, 0, -1, 3, 0, 0, 4, 0, 0, 5, 0, 6, 0, 7]);
        assert_eq!(f.hadamard_image().hadamard_image(), f.scale(&Scalar::from_i64(16)));
    }

    #[test]
    fn dets() {
        let ice = SixVertexSignature::from_i64([1; 6]);
        assert_eq!(ice.inner_outer_dets(), (Scalar::zero(), Scalar::from_i64(-1)));
        let f = SixVertexSignature::from_i64([1, 1, 2, 1, 1, 1]);
        assert_eq!(f.inner_outer_dets(), (Scalar::from_i64(-1), Scalar::from_i64(-1)));
    }

    #[test]
    fn literal_parsing() {
        let s = Signature::parse("six 1,1,2,1,1,1").unwrap();
        assert_eq!(s, Signature::Six(SixVertexSignature::from_i64([1, 1, 2, 1, 1, 1])));
        assert_eq!(Signature::parse(&s.to_string()).unwrap(), s);
        assert!(Signature::parse("binary 1,2,3").is_err());
        assert!(Signature::parse("triple 1,2").is_err());
    }
}
