//! Exact arithmetic in the eighth cyclotomic field Q(w) = Q[w]/(w^4 + 1).
//!
//! An element is stored as `(n0 + n1 w + n2 w^2 + n3 w^3) / d` with a single
//! positive common denominator. Values whose parts fit in `i64` stay on an
//! allocation-free fast path; everything else falls back to `BigInt`. The
//! representation is canonical (lowest terms, small whenever it fits), so
//! structural equality is field equality.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;
use thiserror::Error;

/// Arbitrary-precision rational, the coefficient type of [`Scalar`].
pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not in the real subfield Q(sqrt 2)")]
    NotReal,
    #[error("cannot parse scalar literal `{0}`: {1}")]
    Parse(String, String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Repr {
    Small { n: [i64; 4], d: i64 },
    Big { n: [BigInt; 4], d: BigInt },
}

/// Element of Q(zeta_8).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

const LIMIT: i128 = i64::MAX as i128;

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn fits(v: i128) -> bool {
    v.abs() <= LIMIT
}

impl Scalar {
    fn small_from_i128(n: [i128; 4], d: i128) -> Scalar {
        debug_assert!(d != 0);
        let (mut n, mut d) = (n, d);
        if d < 0 {
            for v in n.iter_mut() {
                *v = -*v;
            }
            d = -d;
        }
        if n.iter().all(|v| *v == 0) {
            return Scalar::zero();
        }
        let mut g = d as u128;
        for v in &n {
            g = gcd_u128(g, v.unsigned_abs());
            if g == 1 {
                break;
            }
        }
        if g > 1 {
            let g = g as i128;
            for v in n.iter_mut() {
                *v /= g;
            }
            d /= g;
        }
        if fits(d) && n.iter().all(|v| fits(*v)) {
            Scalar(Repr::Small {
                n: [n[0] as i64, n[1] as i64, n[2] as i64, n[3] as i64],
                d: d as i64,
            })
        } else {
            Scalar(Repr::Big {
                n: [n[0].into(), n[1].into(), n[2].into(), n[3].into()],
                d: d.into(),
            })
        }
    }

    fn from_big(n: [BigInt; 4], d: BigInt) -> Scalar {
        debug_assert!(!d.is_zero());
        let (mut n, mut d) = (n, d);
        if d.is_negative() {
            for v in n.iter_mut() {
                *v = -std::mem::take(v);
            }
            d = -d;
        }
        if n.iter().all(|v| v.is_zero()) {
            return Scalar::zero();
        }
        let mut g = d.clone();
        for v in &n {
            if g.is_one() {
                break;
            }
            g = g.gcd(v);
        }
        if !g.is_one() {
            for v in n.iter_mut() {
                *v = &*v / &g;
            }
            d = &d / &g;
        }
        if let (Some(dd), Some(n0), Some(n1), Some(n2), Some(n3)) = (
            d.to_i64(),
            n[0].to_i64(),
            n[1].to_i64(),
            n[2].to_i64(),
            n[3].to_i64(),
        ) {
            if [dd, n0, n1, n2, n3].iter().all(|v| *v != i64::MIN) {
                return Scalar(Repr::Small {
                    n: [n0, n1, n2, n3],
                    d: dd,
                });
            }
        }
        Scalar(Repr::Big { n, d })
    }

    fn big_parts(&self) -> ([BigInt; 4], BigInt) {
        match &self.0 {
            Repr::Small { n, d } => (
                [n[0].into(), n[1].into(), n[2].into(), n[3].into()],
                (*d).into(),
            ),
            Repr::Big { n, d } => (n.clone(), d.clone()),
        }
    }

    pub fn zero() -> Scalar {
        Scalar(Repr::Small { n: [0; 4], d: 1 })
    }

    pub fn one() -> Scalar {
        Scalar::from_i64(1)
    }

    pub fn from_i64(v: i64) -> Scalar {
        Scalar::small_from_i128([v as i128, 0, 0, 0], 1)
    }

    /// `num / den`; panics if `den == 0`.
    pub fn from_ratio(num: i64, den: i64) -> Scalar {
        assert!(den != 0, "zero denominator");
        Scalar::small_from_i128([num as i128, 0, 0, 0], den as i128)
    }

    pub fn from_rational(r: &Rational) -> Scalar {
        Scalar::from_big(
            [r.numer().clone(), BigInt::zero(), BigInt::zero(), BigInt::zero()],
            r.denom().clone(),
        )
    }

    pub fn from_coeffs(c: &[Rational; 4]) -> Scalar {
        let mut d = BigInt::one();
        for r in c {
            d = d.lcm(r.denom());
        }
        let n = [0, 1, 2, 3].map(|k| c[k].numer() * (&d / c[k].denom()));
        Scalar::from_big(n, d)
    }

    /// Integer coefficients `(n0 + n1 w + n2 w^2 + n3 w^3) / d`.
    pub fn from_int_coeffs(n: [i64; 4], d: i64) -> Scalar {
        assert!(d != 0, "zero denominator");
        Scalar::small_from_i128(n.map(|v| v as i128), d as i128)
    }

    /// `w^k` with `w = exp(i pi / 4)`.
    pub fn zeta(k: i64) -> Scalar {
        let k = k.rem_euclid(8) as usize;
        let mut n = [0i64; 4];
        n[k % 4] = if k >= 4 { -1 } else { 1 };
        Scalar(Repr::Small { n, d: 1 })
    }

    pub fn i() -> Scalar {
        Scalar::zeta(2)
    }

    pub fn sqrt2() -> Scalar {
        Scalar::from_int_coeffs([0, 1, 0, -1], 1)
    }

    pub fn coeff(&self, k: usize) -> Rational {
        match &self.0 {
            Repr::Small { n, d } => Rational::new(n[k].into(), (*d).into()),
            Repr::Big { n, d } => Rational::new(n[k].clone(), d.clone()),
        }
    }

    pub fn coeffs(&self) -> [Rational; 4] {
        [0, 1, 2, 3].map(|k| self.coeff(k))
    }

    /// Integer numerators and the common positive denominator.
    pub fn int_parts(&self) -> ([BigInt; 4], BigInt) {
        self.big_parts()
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Small { n, .. } if n.iter().all(|v| *v == 0))
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Small { n: [1, 0, 0, 0], d: 1 })
    }

    pub fn is_rational(&self) -> bool {
        match &self.0 {
            Repr::Small { n, .. } => n[1] == 0 && n[2] == 0 && n[3] == 0,
            Repr::Big { n, .. } => n[1..].iter().all(|v| v.is_zero()),
        }
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coeff(0))
    }

    /// Multiplication by `w^k`, a signed rotation of the coefficients.
    pub fn mul_zeta(&self, k: i64) -> Scalar {
        let k = k.rem_euclid(8) as usize;
        if k == 0 {
            return self.clone();
        }
        match &self.0 {
            Repr::Small { n, d } => {
                let mut out = [0i128; 4];
                for (i, v) in n.iter().enumerate() {
                    let j = i + k;
                    let sign: i128 = if (j / 4) % 2 == 1 { -1 } else { 1 };
                    out[j % 4] = sign * (*v as i128);
                }
                Scalar::small_from_i128(out, *d as i128)
            }
            Repr::Big { n, d } => {
                let mut out: [BigInt; 4] = Default::default();
                for (i, v) in n.iter().enumerate() {
                    let j = i + k;
                    out[j % 4] = if (j / 4) % 2 == 1 { -v } else { v.clone() };
                }
                Scalar::from_big(out, d.clone())
            }
        }
    }

    /// Complex conjugation, `w -> w^7 = -w^3`.
    pub fn conjugate(&self) -> Scalar {
        match &self.0 {
            Repr::Small { n, d } => Scalar::small_from_i128(
                [
                    n[0] as i128,
                    -(n[3] as i128),
                    -(n[2] as i128),
                    -(n[1] as i128),
                ],
                *d as i128,
            ),
            Repr::Big { n, d } => Scalar::from_big(
                [n[0].clone(), -&n[3], -&n[2], -&n[1]],
                d.clone(),
            ),
        }
    }

    /// `|s|^2 = s * conj(s)`, an element of Q(sqrt 2).
    pub fn norm_sq(&self) -> Scalar {
        self * &self.conjugate()
    }

    /// Writes a real element as `p + q sqrt 2`.
    pub fn real_parts(&self) -> Option<(Rational, Rational)> {
        let c = self.coeffs();
        if c[2].is_zero() && c[1] == -c[3].clone() {
            Some((c[0].clone(), c[1].clone()))
        } else {
            None
        }
    }

    /// Exact sign of an element of the real subfield.
    pub fn real_subfield_sign(&self) -> Result<Ordering, ScalarError> {
        let (p, q) = self.real_parts().ok_or(ScalarError::NotReal)?;
        let zero = Rational::zero();
        let sp = p.cmp(&zero);
        let sq = q.cmp(&zero);
        if sq == Ordering::Equal {
            return Ok(sp);
        }
        if sp == Ordering::Equal || sp == sq {
            return Ok(sq);
        }
        let p2 = &p * &p;
        let q2 = &q * &q * Rational::from_integer(2.into());
        Ok(match p2.cmp(&q2) {
            Ordering::Greater => sp,
            Ordering::Less => sq,
            Ordering::Equal => Ordering::Equal,
        })
    }

    /// Exponent `k` in `0..8` with `self = w^k`, if any.
    pub fn zeta_exponent(&self) -> Option<u32> {
        match &self.0 {
            Repr::Small { n, d: 1 } => {
                let nz: Vec<usize> = (0..4).filter(|&k| n[k] != 0).collect();
                if nz.len() != 1 {
                    return None;
                }
                let k = nz[0];
                match n[k] {
                    1 => Some(k as u32),
                    -1 => Some(k as u32 + 4),
                    _ => None,
                }
            }
            _ => None,
        }
    }

    /// Multiplicative order when `self` is a root of unity. The roots of
    /// unity of Q(zeta_8) are exactly the eight powers of `w`.
    pub fn is_root_of_unity(&self) -> Option<u32> {
        self.zeta_exponent().map(|k| 8 / gcd_u128(k as u128, 8) as u32)
    }

    pub fn inv(&self) -> Result<Scalar, ScalarError> {
        if self.is_zero() {
            return Err(ScalarError::DivisionByZero);
        }
        if self.is_rational() {
            let (n, d) = self.big_parts();
            return Ok(Scalar::from_big(
                [d, BigInt::zero(), BigInt::zero(), BigInt::zero()],
                n[0].clone(),
            ));
        }
        // s * conj(s) = p + q sqrt2; multiply by p - q sqrt2 to land in Q.
        let c = self.conjugate();
        let r = self * &c;
        let (p, q) = r.real_parts().expect("norm is real");
        let galois = &Scalar::from_rational(&p) - &(&Scalar::from_rational(&q) * &Scalar::sqrt2());
        let rat = (&r * &galois).as_rational().expect("norm to Q");
        let inv_rat = Scalar::from_rational(&rat.recip());
        Ok(&(&c * &galois) * &inv_rat)
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar, ScalarError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: u64) -> Scalar {
        let mut base = self.clone();
        let mut acc = Scalar::one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn powi(&self, e: i64) -> Result<Scalar, ScalarError> {
        if e >= 0 {
            Ok(self.pow(e as u64))
        } else {
            Ok(self.inv()?.pow(e.unsigned_abs()))
        }
    }

    /// A square root inside the field, if there is one. Integral candidates
    /// are read off the four complex embeddings and confirmed exactly, so an
    /// input too tall for double precision may be reported as a non-square.
    pub fn sqrt(&self) -> Option<Scalar> {
        if self.is_zero() {
            return Some(Scalar::zero());
        }
        // d^2 * s is integral, so its roots lie in Z[w]
        let (n, d) = self.big_parts();
        let target = Scalar::from_big(n.clone().map(|v| v * &d), BigInt::one());
        let ints: Vec<f64> = target
            .big_parts()
            .0
            .iter()
            .map(|v| v.to_f64())
            .collect::<Option<_>>()?;
        let cis = |t: f64| (t.cos(), t.sin());
        let mul = |p: (f64, f64), q: (f64, f64)| (p.0 * q.0 - p.1 * q.1, p.0 * q.1 + p.1 * q.0);
        let step = std::f64::consts::FRAC_PI_4;
        let roots: Vec<(f64, f64)> = [1usize, 3, 5, 7]
            .iter()
            .map(|&k| {
                let z = (0..4).fold((0.0, 0.0), |acc, j| {
                    let t = cis(step * (j * k) as f64);
                    (acc.0 + ints[j] * t.0, acc.1 + ints[j] * t.1)
                });
                let r = z.0.hypot(z.1).sqrt();
                let th = z.1.atan2(z.0) / 2.0;
                (r * th.cos(), r * th.sin())
            })
            .collect();
        for signs in 0..8u32 {
            let w: Vec<(f64, f64)> = roots
                .iter()
                .enumerate()
                .map(|(i, r)| if i > 0 && signs >> (i - 1) & 1 == 1 { (-r.0, -r.1) } else { *r })
                .collect();
            let mut c = [0i64; 4];
            let mut ok = true;
            for (j, cj) in c.iter_mut().enumerate() {
                let s = [1usize, 3, 5, 7].iter().zip(&w).fold((0.0, 0.0), |acc, (&k, wk)| {
                    let p = mul(*wk, cis(-step * (j * k) as f64));
                    (acc.0 + p.0, acc.1 + p.1)
                });
                let v = (s.0 / 4.0).round();
                if !v.is_finite() || v.abs() > 1e15 {
                    ok = false;
                    break;
                }
                *cj = v as i64;
            }
            if !ok {
                continue;
            }
            let cand = Scalar::from_int_coeffs(c, 1);
            if &cand * &cand == target {
                return Some(Scalar::from_big(c.map(BigInt::from), d));
            }
        }
        None
    }

    /// Floating-point approximation for display only.
    pub fn to_complex(&self) -> (f64, f64) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let c: Vec<f64> = self
            .coeffs()
            .iter()
            .map(|r| r.to_f64().unwrap_or(f64::NAN))
            .collect();
        (c[0] + h * (c[1] - c[3]), c[2] + h * (c[1] + c[3]))
    }

    /// Bit length of the largest numerator or denominator.
    pub fn height_bits(&self) -> u64 {
        match &self.0 {
            Repr::Small { n, d } => n
                .iter()
                .chain(std::iter::once(d))
                .map(|v| 64 - v.unsigned_abs().leading_zeros() as u64)
                .max()
                .unwrap_or(0),
            Repr::Big { n, d } => n
                .iter()
                .chain(std::iter::once(d))
                .map(|v| v.bits())
                .max()
                .unwrap_or(0),
        }
    }
}

fn mul_small(a: &[i64; 4], b: &[i64; 4]) -> Option<[i128; 4]> {
    let mut out = [0i128; 4];
    for i in 0..4 {
        if a[i] == 0 {
            continue;
        }
        for j in 0..4 {
            if b[j] == 0 {
                continue;
            }
            let p = (a[i] as i128).checked_mul(b[j] as i128)?;
            let k = i + j;
            if k >= 4 {
                out[k - 4] = out[k - 4].checked_sub(p)?;
            } else {
                out[k] = out[k].checked_add(p)?;
            }
        }
    }
    Some(out)
}

fn mul_big(a: &[BigInt; 4], b: &[BigInt; 4]) -> [BigInt; 4] {
    let mut out: [BigInt; 4] = Default::default();
    for i in 0..4 {
        if a[i].is_zero() {
            continue;
        }
        for j in 0..4 {
            if b[j].is_zero() {
                continue;
            }
            let p = &a[i] * &b[j];
            let k = i + j;
            if k >= 4 {
                out[k - 4] -= p;
            } else {
                out[k] += p;
            }
        }
    }
    out
}

fn add_impl(x: &Scalar, y: &Scalar, negate_y: bool) -> Scalar {
    if y.is_zero() {
        return x.clone();
    }
    if x.is_zero() {
        return if negate_y { -y } else { y.clone() };
    }
    let s: i128 = if negate_y { -1 } else { 1 };
    if let (Repr::Small { n: a, d: da }, Repr::Small { n: b, d: db }) = (&x.0, &y.0) {
        let (da, db) = (*da as i128, *db as i128);
        if da == db {
            let out = [0, 1, 2, 3].map(|k| a[k] as i128 + s * b[k] as i128);
            return Scalar::small_from_i128(out, da);
        }
        if let Some(d) = da.checked_mul(db) {
            let mut out = [0i128; 4];
            let mut ok = true;
            for k in 0..4 {
                match (a[k] as i128)
                    .checked_mul(db)
                    .zip((b[k] as i128).checked_mul(da))
                    .and_then(|(p, q)| p.checked_add(s * q))
                {
                    Some(v) => out[k] = v,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                return Scalar::small_from_i128(out, d);
            }
        }
    }
    let (a, da) = x.big_parts();
    let (b, db) = y.big_parts();
    let out = [0, 1, 2, 3].map(|k| {
        let t = &b[k] * &da;
        if negate_y {
            &a[k] * &db - t
        } else {
            &a[k] * &db + t
        }
    });
    Scalar::from_big(out, da * db)
}

fn mul_impl(x: &Scalar, y: &Scalar) -> Scalar {
    if x.is_zero() || y.is_zero() {
        return Scalar::zero();
    }
    if let (Repr::Small { n: a, d: da }, Repr::Small { n: b, d: db }) = (&x.0, &y.0) {
        if let Some(out) = mul_small(a, b) {
            return Scalar::small_from_i128(out, *da as i128 * *db as i128);
        }
    }
    let (a, da) = x.big_parts();
    let (b, db) = y.big_parts();
    Scalar::from_big(mul_big(&a, &b), da * db)
}

impl Add<&Scalar> for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        add_impl(self, rhs, false)
    }
}
impl Sub<&Scalar> for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        add_impl(self, rhs, true)
    }
}
impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        mul_impl(self, rhs)
    }
}
impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Small { n, d } => Scalar::small_from_i128(n.map(|v| -(v as i128)), *d as i128),
            Repr::Big { n, d } => Scalar::from_big(n.clone().map(|v| -v), d.clone()),
        }
    }
}
impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}
impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}
impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| a + b)
    }
}
impl std::iter::Product for Scalar {
    fn product<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::one(), |a, b| a * b)
    }
}

impl From<i64> for Scalar {
    fn from(v: i64) -> Scalar {
        Scalar::from_i64(v)
    }
}

impl Default for Scalar {
    fn default() -> Scalar {
        Scalar::zero()
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    /// Prints in the literal grammar, e.g. `1/2 + 3*w^1 + -1*w^3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k == 0 {
                parts.push(fmt_rational(c));
            } else {
                parts.push(format!("{}*w^{}", fmt_rational(c), k));
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self)
    }
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty number".into());
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| format!("bad integer `{n}`"))?;
        let d: BigInt = d.trim().parse().map_err(|_| format!("bad integer `{d}`"))?;
        if !d.is_positive() {
            return Err("denominator must be positive".into());
        }
        Ok(Rational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| format!("bad integer `{s}`"))?;
        Ok(Rational::from_integer(n))
    }
}

fn parse_term(t: &str) -> Result<Scalar, String> {
    let t = t.trim();
    if let Some(rest) = t.strip_prefix('-') {
        return Ok(-parse_term(rest)?);
    }
    if t == "i" {
        return Ok(Scalar::i());
    }
    if t == "w" {
        return Ok(Scalar::zeta(1));
    }
    let (coef, unit) = match t.split_once('*') {
        Some((c, u)) => (Some(c.trim()), Some(u.trim())),
        None if t.starts_with('w') || t.starts_with('i') => (None, Some(t)),
        None => (Some(t), None),
    };
    let c = match coef {
        Some(c) => Scalar::from_rational(&parse_rational(c)?),
        None => Scalar::one(),
    };
    let u = match unit {
        None => Scalar::one(),
        Some("i") => Scalar::i(),
        Some("w") => Scalar::zeta(1),
        Some(u) => {
            let e = u
                .strip_prefix("w^")
                .ok_or_else(|| format!("expected `w^k`, found `{u}`"))?;
            let e: i64 = e.trim().parse().map_err(|_| format!("bad exponent `{e}`"))?;
            Scalar::zeta(e)
        }
    };
    Ok(&c * &u)
}

impl FromStr for Scalar {
    type Err = ScalarError;

    /// `term := rational | rational "*" "w" "^" int | "i" | "-" term`,
    /// `expr := term ("+" term)*`. A binary `-` is also accepted.
    fn from_str(s: &str) -> Result<Scalar, ScalarError> {
        let err = |m: String| ScalarError::Parse(s.to_string(), m);
        let src = s.trim();
        if src.is_empty() {
            return Err(err("empty literal".into()));
        }
        let mut terms: Vec<String> = Vec::new();
        let mut cur = String::new();
        let mut prev_sig: Option<char> = None;
        for ch in src.chars() {
            match ch {
                '+' => {
                    terms.push(std::mem::take(&mut cur));
                }
                '-' if matches!(prev_sig, Some(p) if p.is_ascii_alphanumeric()) => {
                    terms.push(std::mem::take(&mut cur));
                    cur.push('-');
                }
                _ => cur.push(ch),
            }
            if !ch.is_whitespace() {
                prev_sig = Some(ch);
            }
        }
        terms.push(cur);
        let mut acc = Scalar::zero();
        for t in terms {
            if t.trim().is_empty() {
                return Err(err("empty term".into()));
            }
            acc += &parse_term(&t).map_err(err)?;
        }
        Ok(acc)
    }
}
