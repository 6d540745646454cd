use proptest::prelude::*;
use sixvertex::cspsolve::{affine_eval, affine_eval_ordered, product_eval};
use sixvertex::membership::{AffineWitness, Parity2, ProductWitness};
use sixvertex::oracle::{Constraint, csp_brute};
use sixvertex::scalar::Scalar;

fn affine_table() -> impl Strategy<Value = Vec<Scalar>> + Clone {
    (1usize..=3)
        .prop_flat_map(|k| {
            (
                Just(k),
                0i64..8,
                prop::collection::vec((1u32..(1 << k), 0u8..2), 0..2),
                prop::collection::vec(0u8..4, k),
                prop::collection::vec(any::<bool>(), 3),
            )
        })
        .prop_map(|(k, lam, eqs, lin, cross)| {
            let pairs: Vec<(usize, usize)> = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .collect();
            AffineWitness {
                arity: k,
                lambda: Scalar::zeta(lam) * Scalar::from_i64(1 + lam % 3),
                linear: eqs.into_iter().map(|(mask, rhs)| Parity2 { mask, rhs }).collect(),
                lin,
                cross: pairs
                    .into_iter()
                    .zip(cross)
                    .filter(|(_, c)| *c)
                    .map(|(p, _)| p)
                    .collect(),
            }
            .reconstruct()
        })
}

fn product_table() -> impl Strategy<Value = Vec<Scalar>> + Clone {
    (1usize..=3, any::<u64>(), prop::collection::vec(-2i64..4, 6)).prop_map(|(k, bits, u)| {
        // random chain blocks: variable v joins the previous block when its bit is set
        let mut blocks: Vec<Vec<(usize, u8)>> = vec![vec![(0, 0)]];
        for v in 1..k {
            if bits >> (2 * v) & 1 == 1 {
                blocks.last_mut().unwrap().push((v, (bits >> (2 * v + 1) & 1) as u8));
            } else {
                blocks.push(vec![(v, 0)]);
            }
        }
        let unaries = (0..blocks.len())
            .map(|b| [Scalar::from_i64(u[2 * b]), Scalar::from_i64(u[2 * b + 1])])
            .collect();
        ProductWitness {
            arity: k,
            blocks,
            unaries,
        }
        .reconstruct()
    })
}

fn instances(
    table: impl Strategy<Value = Vec<Scalar>> + Clone,
) -> impl Strategy<Value = (usize, Vec<Constraint>)> {
    (1usize..=8).prop_flat_map(move |n| {
        let c = (table.clone(), prop::collection::vec(0..n, 3)).prop_map(|(t, vs)| {
            let k = t.len().trailing_zeros() as usize;
            Constraint::new(vs[..k].to_vec(), t)
        });
        (Just(n), prop::collection::vec(c, 0..7))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn affine_eval_matches_brute((n, cs) in instances(affine_table())) {
        prop_assert_eq!(affine_eval(n, &cs).unwrap(), csp_brute(n, &cs).unwrap());
    }

    #[test]
    fn elimination_order_is_irrelevant((n, cs) in instances(affine_table()), seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            order.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(affine_eval_ordered(n, &cs, &order).unwrap(), affine_eval(n, &cs).unwrap());
    }

    #[test]
    fn product_eval_matches_brute((n, cs) in instances(product_table())) {
        prop_assert_eq!(product_eval(n, &cs).unwrap(), csp_brute(n, &cs).unwrap());
    }
}
