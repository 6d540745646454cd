mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sixvertex::instance::{PlanarInstance, cycle_medial, grid_patch, medial_of_random_plane_graph};
use sixvertex::linalg::Mat;
use sixvertex::matchgate::{Solver, fkt_eval, fkt_eval_hat, fkt_eval_with, pfaffian, synthesize};
use sixvertex::membership::{is_matchgate, is_matchgate_hat};
use sixvertex::oracle::holant_brute;
use sixvertex::scalar::Scalar;
use sixvertex::signature::Signature;

fn instance(rng: &mut impl Rng, seed: u64, f: Signature) -> PlanarInstance {
    let map = match rng.gen_range(0..6) {
        0 => cycle_medial(rng.gen_range(1..=6)),
        _ => medial_of_random_plane_graph(rng.gen_range(1..=9), seed),
    };
    PlanarInstance::uniform(map, f).unwrap()
}

#[test]
fn gadgets_reproduce_random_matchgates() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..500 {
        let f = common::random_matchgate(&mut rng);
        assert!(is_matchgate(&f));
        let (g, k) = synthesize(&f).unwrap();
        let want: Vec<Scalar> = f.to_general().v.iter().map(|v| v * &k).collect();
        assert_eq!(g.signature().unwrap(), want);
    }
}

#[test]
fn fkt_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for t in 0..80 {
        let f = common::random_matchgate(&mut rng);
        let inst = instance(&mut rng, t, Signature::Six(f.clone()));
        assert_eq!(fkt_eval(&inst).unwrap(), holant_brute(&inst).unwrap(), "{f}");
    }
}

#[test]
fn fkt_hat_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for t in 0..60 {
        let f = common::random_matchgate_hat(&mut rng);
        assert!(is_matchgate_hat(&f), "{f}");
        let inst = instance(&mut rng, 500 + t, Signature::Six(f.clone()));
        assert_eq!(fkt_eval_hat(&inst).unwrap(), holant_brute(&inst).unwrap(), "{f}");
    }
}

#[test]
fn exact_and_modular_pfaffians_agree_through_fkt() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for t in 0..10 {
        let f = common::random_matchgate(&mut rng);
        let inst = instance(&mut rng, 900 + t, Signature::Six(f));
        let a = fkt_eval_with(&inst, t, Solver::Exact).unwrap();
        let b = fkt_eval_with(&inst, t + 1, Solver::Modular).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn pfaffian_squares_to_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    for n in (2..=12).step_by(2) {
        for _ in 0..3 {
            let mut a = vec![vec![Scalar::zero(); n]; n];
            for i in 0..n {
                for j in i + 1..n {
                    let w = common::small_scalar(&mut rng);
                    a[j][i] = -&w;
                    a[i][j] = w;
                }
            }
            let pf = pfaffian(&a).unwrap();
            assert_eq!(&pf * &pf, Mat::from_rows(a).det());
        }
    }
}

#[test]
fn grid_scale_instance_agrees_across_orientations() {
    let f = Signature::parse("1,1,2,1,1,1").unwrap();
    let inst = PlanarInstance::uniform(grid_patch(6, 6), f).unwrap();
    let a = fkt_eval_with(&inst, 0, Solver::Auto).unwrap();
    let b = fkt_eval_with(&inst, 7, Solver::Auto).unwrap();
    assert_eq!(a, b);
}

#[test]
fn empty_and_rejected_inputs() {
    let ice = Signature::parse("1,1,1,1,1,1").unwrap();
    let inst = PlanarInstance::uniform(cycle_medial(3), ice).unwrap();
    assert!(fkt_eval(&inst).is_err());
    assert!(fkt_eval_hat(&inst).is_err());
}
