//! Möbius transformations over Q(zeta_8): the maps a six-vertex signature
//! induces on binary signatures, unit-circle detection and group order.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::signature::SixVertexSignature;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MobiusError {
    #[error("determinant ad - bc vanishes")]
    Singular,
}

/// A point of the Riemann sphere.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Point {
    Finite(Scalar),
    Infinity,
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(s) => write!(f, "{s}"),
            Point::Infinity => write!(f, "inf"),
        }
    }
}

/// `z -> (a z + b) / (c z + d)` with `ad - bc != 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MobiusTransform {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
}

impl MobiusTransform {
    pub fn new(a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> Result<Self, MobiusError> {
        let m = MobiusTransform { a, b, c, d };
        if m.det().is_zero() {
            return Err(MobiusError::Singular);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        MobiusTransform {
            a: Scalar::one(),
            b: Scalar::zero(),
            c: Scalar::zero(),
            d: Scalar::one(),
        }
    }

    pub fn det(&self) -> Scalar {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn trace(&self) -> Scalar {
        &self.a + &self.d
    }

    pub fn matrix(&self) -> Mat {
        Mat::from_rows(vec![
            vec![self.a.clone(), self.b.clone()],
            vec![self.c.clone(), self.d.clone()],
        ])
    }

    fn from_matrix(m: &Mat) -> Self {
        MobiusTransform {
            a: m[(0, 0)].clone(),
            b: m[(0, 1)].clone(),
            c: m[(1, 0)].clone(),
            d: m[(1, 1)].clone(),
        }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &MobiusTransform) -> Self {
        MobiusTransform::from_matrix(&self.matrix().mul(&other.matrix()))
    }

    pub fn pow(&self, n: u64) -> Self {
        MobiusTransform::from_matrix(&self.matrix().pow(n))
    }

    /// Equal as maps, i.e. the matrices are proportional.
    pub fn same_map(&self, other: &MobiusTransform) -> bool {
        let (p, q) = (
            [&self.a, &self.b, &self.c, &self.d],
            [&other.a, &other.b, &other.c, &other.d],
        );
        (0..4).all(|i| (i + 1..4).all(|j| p[i] * q[j] == p[j] * q[i]))
    }

    pub fn is_identity(&self) -> bool {
        self.same_map(&MobiusTransform::identity())
    }

    pub fn apply(&self, p: &Point) -> Point {
        match p {
            Point::Infinity if self.c.is_zero() => Point::Infinity,
            Point::Infinity => Point::Finite(self.a.checked_div(&self.c).unwrap()),
            Point::Finite(z) => {
                let den = &self.c * z + &self.d;
                if den.is_zero() {
                    return Point::Infinity;
                }
                Point::Finite((&self.a * z + &self.b).checked_div(&den).unwrap())
            }
        }
    }

    pub fn apply_finite(&self, z: &Scalar) -> Point {
        self.apply(&Point::Finite(z.clone()))
    }
}

impl fmt::Display for MobiusTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(({})*z + ({})) / (({})*z + ({}))",
            self.a, self.b, self.c, self.d
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Inner,
    Cross,
}

/// Inner map `(z + y t) / (b + c t)` or cross map `(c + x t) / (a + z t)`.
pub fn from_signature(f: &SixVertexSignature, which: Which) -> Result<MobiusTransform, MobiusError> {
    match which {
        Which::Inner => MobiusTransform::new(f.y.clone(), f.z.clone(), f.c.clone(), f.b.clone()),
        Which::Cross => MobiusTransform::new(f.x.clone(), f.c.clone(), f.z.clone(), f.a.clone()),
    }
}

/// Normal forms of circle-preserving maps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CircleForm {
    /// `u (z + alpha) / (1 + conj(alpha) z)` with `|u| = 1`, `|alpha| != 1`.
    Blaschke { alpha: Scalar, u: Scalar },
    /// `u / z` with `|u| = 1`.
    Inversion { u: Scalar },
}

fn on_circle(p: &Point) -> bool {
    matches!(p, Point::Finite(z) if z.norm_sq().is_one())
}

/// Detects whether `phi` maps the unit circle onto itself from the images
/// of `1`, `-1` and `i`, then reads off the normal form.
pub fn unit_circle_form(phi: &MobiusTransform) -> Option<CircleForm> {
    let samples = [Scalar::one(), Scalar::from_i64(-1), Scalar::i()];
    if !samples.iter().all(|s| on_circle(&phi.apply_finite(s))) {
        return None;
    }
    let form = if phi.d.is_zero() {
        CircleForm::Inversion {
            u: phi.b.checked_div(&phi.c).ok()?,
        }
    } else {
        CircleForm::Blaschke {
            alpha: phi.c.checked_div(&phi.d).ok()?.conjugate(),
            u: phi.a.checked_div(&phi.d).ok()?,
        }
    };
    // reading the form back must give the same map
    let back = circle_form_map(&form);
    back.same_map(phi).then_some(form)
}

pub fn circle_form_map(form: &CircleForm) -> MobiusTransform {
    match form {
        CircleForm::Blaschke { alpha, u } => MobiusTransform {
            a: u.clone(),
            b: u * alpha,
            c: alpha.conjugate(),
            d: Scalar::one(),
        },
        CircleForm::Inversion { u } => MobiusTransform {
            a: Scalar::zero(),
            b: u.clone(),
            c: Scalar::one(),
            d: Scalar::zero(),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InfiniteKind {
    /// Rotation by an angle that is not a rational multiple of pi within
    /// reach of the field.
    Elliptic,
    Parabolic,
    Loxodromic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    Finite(u32),
    Infinite(InfiniteKind),
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(n) => write!(f, "{n}"),
            Order::Infinite(k) => write!(f, "infinite ({k:?})"),
        }
    }
}

/// Order of `phi` in PGL(2). With eigenvalue ratio `rho`,
/// `tr^2 / det = 2 + rho + 1/rho`; a map of finite order `n` has this
/// invariant equal to `2 + 2 cos(2 pi / n)`, which lies in the field only for
/// `n` in 1, 2, 3, 4, 6, 8.
pub fn order(phi: &MobiusTransform) -> Order {
    if phi.is_identity() {
        return Order::Finite(1);
    }
    let tau = (phi.trace() * phi.trace())
        .checked_div(&phi.det())
        .expect("nonsingular");
    let r2 = Scalar::sqrt2();
    let candidates = [
        (Scalar::zero(), 2),
        (Scalar::one(), 3),
        (Scalar::from_i64(2), 4),
        (Scalar::from_i64(3), 6),
        (Scalar::from_i64(2) + &r2, 8),
        (Scalar::from_i64(2) - &r2, 8),
    ];
    if let Some((_, n)) = candidates.iter().find(|(t, _)| *t == tau) {
        return Order::Finite(*n);
    }
    if tau == Scalar::from_i64(4) {
        return Order::Infinite(InfiniteKind::Parabolic);
    }
    let elliptic = matches!(tau.real_subfield_sign(), Ok(Ordering::Greater))
        && matches!(
            (&tau - &Scalar::from_i64(4)).real_subfield_sign(),
            Ok(Ordering::Less)
        );
    Order::Infinite(if elliptic {
        InfiniteKind::Elliptic
    } else {
        InfiniteKind::Loxodromic
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    /// `phi^k(t0)` for `k = 1..=count`.
    pub values: Vec<Point>,
    /// Smallest `p` with `phi^(k+p)(t0) = phi^k(t0)` seen among the values.
    pub period: Option<usize>,
    /// First `k` with `phi^k(t0) = inf`.
    pub pole_at: Option<usize>,
}

pub fn iterate_distinct(phi: &MobiusTransform, t0: &Point, count: usize) -> Orbit {
    let mut seen = vec![t0.clone()];
    let mut period = None;
    let mut pole_at = None;
    for k in 1..=count {
        let next = phi.apply(&seen[k - 1]);
        if next == Point::Infinity && pole_at.is_none() {
            pole_at = Some(k);
        }
        if period.is_none() {
            if let Some(i) = seen.iter().position(|p| *p == next) {
                period = Some(k - i);
            }
        }
        seen.push(next);
    }
    seen.remove(0);
    Orbit {
        values: seen,
        period,
        pole_at,
    }
}
