mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sixvertex::classify::classify;
use sixvertex::instance::{PlanarInstance, medial_of_random_plane_graph};
use sixvertex::loopspace::{
    CspRoute, decompose, decompose_map_seeded, entry_exit_audit, evaluate, induced_csp,
    induced_csp_direct, solve_induced,
};
use sixvertex::oracle::holant_brute;
use sixvertex::signature::{Signature, SixVertexSignature};

fn instance(n_edges: usize, seed: u64, f: &SixVertexSignature) -> PlanarInstance {
    let map = medial_of_random_plane_graph(n_edges, seed);
    PlanarInstance::uniform(map, Signature::Six(f.clone())).unwrap()
}

#[test]
fn c4i_matches_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for t in 0..60 {
        let f = common::random_c4i(&mut rng);
        assert!(classify(&f).has("C4i"), "{f:?}");
        let inst = instance(rng.gen_range(1..=10), t, &f);
        assert_eq!(evaluate(&inst).unwrap(), holant_brute(&inst).unwrap(), "{f:?}");
    }
}

#[test]
fn c4ii_matches_oracle_and_uses_affine_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for t in 0..60 {
        let f = common::random_c4ii(&mut rng);
        assert!(classify(&f).has("C4ii"), "{f:?}");
        let inst = instance(rng.gen_range(1..=10), 1000 + t, &f);
        let dec = decompose(&inst).unwrap();
        let csp = induced_csp(&inst, &dec).unwrap();
        let (v, route) = solve_induced(&csp).unwrap();
        assert_ne!(route, CspRoute::Brute);
        assert_eq!(v, holant_brute(&inst).unwrap(), "{f:?}");
    }
}

#[test]
fn generic_zero_inner_pair_matches_oracle_by_brute_route() {
    // tables need not be tractable, but the reduction itself is exact
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for t in 0..30 {
        let f = SixVertexSignature::from_i64([
            rng.gen_range(-3..=3),
            rng.gen_range(-3..=3),
            0,
            rng.gen_range(-3..=3),
            rng.gen_range(-3..=3),
            0,
        ]);
        let inst = instance(rng.gen_range(1..=9), 2000 + t, &f);
        assert_eq!(evaluate(&inst).unwrap(), holant_brute(&inst).unwrap(), "{f:?}");
    }
}

#[test]
fn leader_choice_changes_nothing_in_the_value() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for t in 0..30 {
        let f = common::random_c4ii(&mut rng);
        let inst = instance(rng.gen_range(2..=10), 3000 + t, &f);
        let base = evaluate(&inst).unwrap();
        for s in 0..3 {
            let dec = decompose_map_seeded(&inst.map, s).unwrap();
            assert!(entry_exit_audit(&dec).unwrap().balanced());
            // the profile path must agree with direct tables for any leader choice
            let csp = induced_csp(&inst, &dec).unwrap();
            assert_eq!(csp, induced_csp_direct(&inst, &dec));
            assert_eq!(solve_induced(&csp).unwrap().0, base);
        }
    }
}

#[test]
fn balance_holds_on_larger_medials() {
    for seed in 0..100 {
        let map = medial_of_random_plane_graph(40, seed);
        let dec = sixvertex::loopspace::decompose_map(&map).unwrap();
        let audit = entry_exit_audit(&dec).unwrap();
        assert!(audit.balanced());
        let n_in: usize = dec.circuits.iter().map(|c| c.ins.len()).sum();
        assert_eq!(n_in, map.num_edges());
    }
}

#[test]
fn large_instance_runs_polynomially() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let f = common::random_c4ii(&mut rng);
    let inst = instance(150, 7, &f);
    evaluate(&inst).unwrap();
}
