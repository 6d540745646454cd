//! The complexity trichotomy for planar six-vertex models and the four-way
//! case split used by its proof.

use std::fmt;

use crate::membership::{is_affine, is_matchgate, is_matchgate_hat, is_product};
use crate::signature::SixVertexSignature;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlanarClass {
    PTimeAll,
    PTimePlanarOnly,
    SharpPHardPlanar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GeneralClass {
    PTime,
    SharpPHard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaseTag {
    I,
    II,
    III,
    IV,
}

/// Exponents of `x = a i^alpha`, `b = a w^beta`, `y = a w^gamma`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct C4iiWitness {
    pub alpha: u32,
    pub beta: u32,
    pub gamma: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Condition {
    C1P,
    C1A,
    C2ZeroPairs,
    C3M,
    C3Mhat,
    C4i,
    C4ii(C4iiWitness),
}

impl Condition {
    pub fn name(&self) -> &'static str {
        match self {
            Condition::C1P => "C1_P",
            Condition::C1A => "C1_A",
            Condition::C2ZeroPairs => "C2_zero_pairs",
            Condition::C3M => "C3_M",
            Condition::C3Mhat => "C3_Mhat",
            Condition::C4i => "C4i",
            Condition::C4ii(_) => "C4ii",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub planar_class: PlanarClass,
    pub general_class: GeneralClass,
    pub witnesses: Vec<Condition>,
    pub case_tag: CaseTag,
}

impl Verdict {
    pub fn has(&self, name: &str) -> bool {
        self.witnesses.iter().any(|c| c.name() == name)
    }

    pub fn c4ii(&self) -> Option<C4iiWitness> {
        self.witnesses.iter().find_map(|c| match c {
            Condition::C4ii(w) => Some(*w),
            _ => None,
        })
    }

    /// Line-oriented `key=value` rendering.
    pub fn to_kv(&self) -> String {
        let names: Vec<&str> = self.witnesses.iter().map(|c| c.name()).collect();
        let mut s = format!(
            "planar_class={:?}\ngeneral_class={:?}\ncase={:?}\nwitnesses={}\n",
            self.planar_class,
            self.general_class,
            self.case_tag,
            names.join(",")
        );
        if let Some(w) = self.c4ii() {
            s.push_str(&format!(
                "c4ii_alpha={}\nc4ii_beta={}\nc4ii_gamma={}\n",
                w.alpha, w.beta, w.gamma
            ));
        }
        s
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}; case {:?}", self.planar_class, self.case_tag)
    }
}

fn zero_in_each_pair(f: &SixVertexSignature) -> bool {
    (f.a.is_zero() || f.x.is_zero())
        && (f.b.is_zero() || f.y.is_zero())
        && (f.c.is_zero() || f.z.is_zero())
}

fn c4ii(f: &SixVertexSignature) -> Option<C4iiWitness> {
    if f.a.is_zero() {
        // a = 0 forces x = b = y = 0, already covered by the zero-pair condition
        return None;
    }
    let inv = f.a.inv().ok()?;
    let alpha = (&f.x * &inv).zeta_exponent()?;
    let beta = (&f.b * &inv).zeta_exponent()?;
    let gamma = (&f.y * &inv).zeta_exponent()?;
    (alpha % 2 == 0 && beta % 2 == gamma % 2).then_some(C4iiWitness {
        alpha: alpha / 2,
        beta,
        gamma,
    })
}

pub fn case_of(f: &SixVertexSignature) -> CaseTag {
    let pairs = [(&f.a, &f.x), (&f.b, &f.y), (&f.c, &f.z)];
    let zeros: Vec<usize> = pairs
        .iter()
        .map(|(p, q)| p.is_zero() as usize + q.is_zero() as usize)
        .collect();
    let n: usize = zeros.iter().sum();
    if zeros.iter().all(|&k| k == 1) {
        CaseTag::I
    } else if zeros.contains(&2) {
        CaseTag::II
    } else if n == 2 || (n == 1 && zeros[2] == 0) {
        CaseTag::III
    } else {
        CaseTag::IV
    }
}

pub fn classify(f: &SixVertexSignature) -> Verdict {
    let g = f.to_general();
    let mut w = Vec::new();
    if is_product(&g).is_some() {
        w.push(Condition::C1P);
    }
    if is_affine(&g).is_some() {
        w.push(Condition::C1A);
    }
    if zero_in_each_pair(f) {
        w.push(Condition::C2ZeroPairs);
    }
    if is_matchgate(f) {
        w.push(Condition::C3M);
    }
    if is_matchgate_hat(f) {
        w.push(Condition::C3Mhat);
    }
    if f.c.is_zero() && f.z.is_zero() {
        let ax = &f.a * &f.x;
        let by = &f.b * &f.y;
        if &ax * &ax == &by * &by {
            w.push(Condition::C4i);
        }
        if let Some(wit) = c4ii(f) {
            w.push(Condition::C4ii(wit));
        }
    }
    let general = w
        .iter()
        .any(|c| matches!(c, Condition::C1P | Condition::C1A | Condition::C2ZeroPairs));
    let planar_class = if general {
        PlanarClass::PTimeAll
    } else if w.is_empty() {
        PlanarClass::SharpPHardPlanar
    } else {
        PlanarClass::PTimePlanarOnly
    };
    Verdict {
        planar_class,
        general_class: if general {
            GeneralClass::PTime
        } else {
            GeneralClass::SharpPHard
        },
        witnesses: w,
        case_tag: case_of(f),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn six(v: [i64; 6]) -> SixVertexSignature {
        SixVertexSignature::from_i64(v)
    }

    #[test]
    fn ice_and_tutte_points_are_hard() {
        let v = classify(&six([1; 6]));
        assert_eq!(v.planar_class, PlanarClass::SharpPHardPlanar);
        assert_eq!(v.case_tag, CaseTag::IV);
        assert!(v.witnesses.is_empty());
        let t = classify(&six([1, 1, 2, 1, 1, 2]));
        assert_eq!(t.planar_class, PlanarClass::SharpPHardPlanar);
    }

    #[test]
    fn zeta_point_is_planar_only() {
        let w = Scalar::zeta(1);
        let f = SixVertexSignature::new(
            Scalar::one(),
            w.clone(),
            Scalar::zero(),
            Scalar::one(),
            w,
            Scalar::zero(),
        );
        let v = classify(&f);
        assert_eq!(v.planar_class, PlanarClass::PTimePlanarOnly);
        assert_eq!(v.general_class, GeneralClass::SharpPHard);
        assert_eq!(v.c4ii(), Some(C4iiWitness { alpha: 0, beta: 1, gamma: 1 }));
        assert!(!v.has("C1_P") && !v.has("C1_A") && !v.has("C3_M") && !v.has("C3_Mhat"));
    }

    #[test]
    fn zero_signature_is_easy() {
        let v = classify(&six([0; 6]));
        assert_eq!(v.planar_class, PlanarClass::PTimeAll);
        assert!(v.has("C2_zero_pairs"));
    }

    #[test]
    fn case_tags() {
        assert_eq!(case_of(&six([1, 0, 2, 0, 3, 0])), CaseTag::I);
        assert_eq!(case_of(&six([0, 2, 3, 0, 5, 7])), CaseTag::II);
        assert_eq!(case_of(&six([1, 2, 0, 3, 5, 7])), CaseTag::IV);
        assert_eq!(case_of(&six([0, 2, 3, 5, 5, 7])), CaseTag::III);
        assert_eq!(case_of(&six([0, 2, 3, 5, 0, 7])), CaseTag::III);
        assert_eq!(case_of(&six([0, 2, 0, 5, 3, 7])), CaseTag::III);
        assert_eq!(case_of(&six([1; 6])), CaseTag::IV);
    }

    #[test]
    fn matchgate_point_is_planar_only() {
        let v = classify(&six([1, 1, 2, 1, 1, 1]));
        assert!(v.has("C3_M"));
        assert_eq!(v.planar_class, PlanarClass::PTimePlanarOnly);
    }
}
