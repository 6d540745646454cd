use proptest::prelude::*;
use sixvertex::cspsolve::{CspError, pinned_slot, zero_pair_eval};
use sixvertex::instance::{PlanarInstance, RotationMap, cycle_medial, medial_of_random_plane_graph};
use sixvertex::oracle::holant_brute;
use sixvertex::signature::{Signature, SixVertexSignature};

/// Entries `(a, b, c, x, y, z)`; `keep[i]` selects which entry of pair `i`
/// survives (0 first, 1 second, 2 neither).
fn zero_pair_sig(keep: [u8; 3], vals: [i64; 3]) -> SixVertexSignature {
    let mut v = [0i64; 6];
    for i in 0..3 {
        match keep[i] {
            0 => v[i] = vals[i],
            1 => v[i + 3] = vals[i],
            _ => {}
        }
    }
    SixVertexSignature::from_i64(v)
}

fn map_strategy() -> impl Strategy<Value = RotationMap> {
    prop_oneof![
        (1usize..=7, any::<u64>()).prop_map(|(n, s)| medial_of_random_plane_graph(n, s)),
        (1usize..=5).prop_map(cycle_medial),
    ]
}

#[test]
fn pinned_slot_examples() {
    // x, y, z all have x1 = 1
    assert_eq!(pinned_slot(&zero_pair_sig([1, 1, 1], [1, 1, 1])), Some((0, 1)));
    // a, b, c all have x1 = 0
    assert_eq!(pinned_slot(&zero_pair_sig([0, 0, 0], [1, 1, 1])), Some((0, 0)));
    assert_eq!(pinned_slot(&SixVertexSignature::from_i64([1; 6])), None);
}

#[test]
fn single_vertex_loops() {
    // one vertex, two non-crossing loops: slots (0,1) and (2,3) paired
    let map = RotationMap::new(vec![vec![0, 1, 2, 3]], vec![1, 0, 3, 2]).unwrap();
    for keep in [[0, 1, 2], [1, 1, 1], [0, 0, 0], [2, 1, 0]] {
        let f = zero_pair_sig(keep, [2, 3, 5]);
        let inst = PlanarInstance::uniform(map.clone(), Signature::Six(f)).unwrap();
        assert_eq!(zero_pair_eval(&inst).unwrap(), holant_brute(&inst).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn uniform_matches_brute(
        map in map_strategy(),
        keep in prop::array::uniform3(0u8..3),
        vals in prop::array::uniform3(-3i64..=3),
    ) {
        let f = zero_pair_sig(keep, vals);
        let inst = PlanarInstance::uniform(map, Signature::Six(f)).unwrap();
        prop_assert_eq!(zero_pair_eval(&inst).unwrap(), holant_brute(&inst).unwrap());
    }

    #[test]
    fn mixed_labels_with_equal_pins(
        map in map_strategy(),
        keeps in prop::collection::vec(prop::array::uniform3(0u8..3), 8),
        vals in prop::collection::vec(prop::array::uniform3(1i64..=4), 8),
    ) {
        let nv = map.num_vertices();
        let sigs: Vec<(String, Signature)> = (0..nv)
            .map(|v| (format!("f{v}"), Signature::Six(zero_pair_sig(keeps[v % 8], vals[v % 8]))))
            .collect();
        let inst = PlanarInstance::new(map, sigs, (0..nv).collect()).unwrap();
        match zero_pair_eval(&inst) {
            Ok(v) => prop_assert_eq!(v, holant_brute(&inst).unwrap()),
            Err(e) => prop_assert_eq!(e, CspError::MixedPins),
        }
    }
}
