#![allow(dead_code)]

use rand::Rng;
use sixvertex::scalar::Scalar;
use sixvertex::signature::SixVertexSignature;

/// Small element of the field: a few Gaussian-integer-like coefficients.
pub fn small_scalar(rng: &mut impl Rng) -> Scalar {
    let mut s = Scalar::zero();
    for k in 0..4 {
        if rng.gen_bool(0.4) {
            s = s + Scalar::zeta(k) * Scalar::from_i64(rng.gen_range(-2..=2));
        }
    }
    s
}

pub fn small_nonzero(rng: &mut impl Rng) -> Scalar {
    loop {
        let s = small_scalar(rng);
        if !s.is_zero() {
            return s;
        }
    }
}

/// Random signature with c = z = 0 and (ax)^2 = (by)^2.
pub fn random_c4i(rng: &mut impl Rng) -> SixVertexSignature {
    let zero = Scalar::zero();
    match rng.gen_range(0..4) {
        // degenerate support
        0 => {
            let (a, b) = (small_scalar(rng), small_scalar(rng));
            SixVertexSignature::new(a, b, zero.clone(), zero.clone(), zero.clone(), zero)
        }
        1 => {
            let (a, y) = (small_scalar(rng), small_scalar(rng));
            SixVertexSignature::new(a, zero.clone(), zero.clone(), zero.clone(), y, zero)
        }
        _ => {
            let (a, x, b) = (small_nonzero(rng), small_nonzero(rng), small_nonzero(rng));
            let eps = if rng.gen_bool(0.5) { Scalar::one() } else { -Scalar::one() };
            let y = eps * &a * &x * b.inv().unwrap();
            SixVertexSignature::new(a, b, zero.clone(), x, y, zero)
        }
    }
}

/// Random signature of the form a(1, w^beta, 0, i^alpha, w^gamma, 0), beta = gamma mod 2.
pub fn random_c4ii(rng: &mut impl Rng) -> SixVertexSignature {
    let a = small_nonzero(rng);
    let alpha = rng.gen_range(0..4) * 2;
    let beta = rng.gen_range(0..8);
    let gamma = (beta + 2 * rng.gen_range(0..4)) % 8;
    let zero = Scalar::zero();
    SixVertexSignature::new(
        a.clone(),
        &a * Scalar::zeta(beta),
        zero.clone(),
        &a * Scalar::zeta(alpha),
        &a * Scalar::zeta(gamma),
        zero,
    )
}

/// Random member of the matchgate class: `a x = c z - b y`.
pub fn random_matchgate(rng: &mut impl Rng) -> SixVertexSignature {
    let zero = Scalar::zero();
    let (a, b, x, y) = (small_scalar(rng), small_scalar(rng), small_scalar(rng), small_scalar(rng));
    if rng.gen_bool(0.75) {
        let c = small_nonzero(rng);
        let z = (&a * &x + &b * &y) * c.inv().unwrap();
        let f = SixVertexSignature::new(a, b, c, x, y, z);
        if rng.gen_bool(0.5) { f.rotate(1) } else { f }
    } else {
        // zero inner pair forces a x = -b y
        let b = small_nonzero(rng);
        let y = -(&a * &x) * b.inv().unwrap();
        SixVertexSignature::new(a, b, zero.clone(), x, y, zero)
    }
}

/// Random member of the Hadamard image of the matchgate class: one outer
/// pair zero, the other outer pair and the inner pair related by the same
/// sign.
pub fn random_matchgate_hat(rng: &mut impl Rng) -> SixVertexSignature {
    let zero = Scalar::zero();
    let eps = if rng.gen_bool(0.5) { Scalar::one() } else { -Scalar::one() };
    let (p, q) = (small_scalar(rng), small_scalar(rng));
    let f = SixVertexSignature::new(zero.clone(), &eps * &p, &eps * &q, zero, p, q);
    f.rotate(rng.gen_range(0..4))
}
