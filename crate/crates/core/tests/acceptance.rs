//! End-to-end acceptance suite. Each test checks one criterion and prints a
//! single `PASS`/`FAIL` line to the real stdout (past the test harness
//! capture), then asserts.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sixvertex::classify::{PlanarClass, classify};
use sixvertex::cspsolve::{affine_eval, product_eval};
use sixvertex::instance::{
    PlanarInstance, RotationMap, cycle_medial, medial_of_random_plane_graph, random_plane_graph,
};
use sixvertex::loopspace::{decompose, entry_exit_audit, evaluate};
use sixvertex::matchgate::{Solver, fkt_eval, fkt_eval_hat, fkt_eval_with};
use sixvertex::membership::{
    AffineWitness, Parity2, ProductWitness, affine_witness, is_matchgate_hat, product_witness,
};
use sixvertex::mobius::{MobiusTransform, Order, Point, iterate_distinct, order, unit_circle_form};
use sixvertex::oracle::{Constraint, Graph, csp_brute, holant_brute, tutte};
use sixvertex::reductions::{
    Chi, InnerCsp, LATTICE_BOUND, PlanarCsp, binary_fixture, compile_csp_inner, compile_plcsp,
    direct, interpolate_binary, interpolate_chi, jordan_interp, jordan_target, lattice_interp,
    square_gadget, substitution_fixture,
};
use sixvertex::scalar::Scalar;
use sixvertex::signature::{BinarySignature, Signature, SixVertexSignature};

fn report(k: usize, name: &str, ok: bool, detail: &str) {
    let line = format!(
        "{} criterion {k} ({name}): {detail}\n",
        if ok { "PASS" } else { "FAIL" }
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
}

fn s(v: i64) -> Scalar {
    Scalar::from_i64(v)
}

fn six(v: [i64; 6]) -> SixVertexSignature {
    SixVertexSignature::from_i64(v)
}

/// Runs `body` and reports its summary line or first failure.
fn criterion(k: usize, name: &str, body: impl FnOnce() -> Result<String, String>) {
    let res = std::panic::catch_unwind(std::panic::AssertUnwindSafe(body));
    let (ok, detail) = match res {
        Ok(Ok(d)) => (true, d),
        Ok(Err(e)) => (false, e),
        Err(p) => (
            false,
            p.downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()),
        ),
    };
    report(k, name, ok, &detail);
    assert!(ok, "criterion {k} ({name}) failed: {detail}");
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

// ---------------------------------------------------------------------------
// 1. Tutte identity

fn fixed_graphs() -> Vec<(&'static str, RotationMap)> {
    vec![
        (
            "triangle",
            RotationMap::from_points(&[(0, 0), (2, 0), (0, 2)], &[(0, 1), (1, 2), (2, 0)]),
        ),
        ("bridge", RotationMap::new(vec![vec![0], vec![1]], vec![1, 0]).unwrap()),
        ("loop", RotationMap::new(vec![vec![0, 1]], vec![1, 0]).unwrap()),
        (
            "two nested loops",
            RotationMap::new(vec![vec![0, 1, 2, 3]], vec![3, 2, 1, 0]).unwrap(),
        ),
        (
            "digon",
            RotationMap::new(vec![vec![0, 2], vec![3, 1]], vec![1, 0, 3, 2]).unwrap(),
        ),
        (
            "path of three edges",
            RotationMap::from_points(&[(0, 0), (1, 0), (2, 0), (3, 0)], &[(0, 1), (1, 2), (2, 3)]),
        ),
        (
            "square with diagonal",
            RotationMap::from_points(
                &[(0, 0), (2, 0), (2, 2), (0, 2)],
                &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)],
            ),
        ),
        (
            "K4",
            RotationMap::from_points(
                &[(0, 0), (4, 0), (0, 4), (1, 1)],
                &[(0, 1), (1, 2), (2, 0), (0, 3), (1, 3), (2, 3)],
            ),
        ),
    ]
}

#[test]
fn criterion_1_tutte_identity() {
    criterion(1, "Tutte identity", || {
        let start = Instant::now();
        let f = Signature::Six(six([1, 1, 2, 1, 1, 2]));
        let mut graphs = fixed_graphs();
        for n in 1..=8 {
            for seed in 0..3 {
                graphs.push(("random", random_plane_graph(n, 100 * n as u64 + seed)));
            }
        }
        let (mut loops, mut multi, mut bridges) = (0, 0, 0);
        let mut triangle = None;
        for (name, g) in &graphs {
            ensure!(g.is_connected() && g.num_edges() <= 8, "{name}: bad test graph");
            let gr = Graph::from_map(g);
            loops += gr.edges.iter().any(|(u, v)| u == v) as usize;
            let mut es: Vec<(usize, usize)> =
                gr.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
            es.sort();
            multi += es.windows(2).any(|w| w[0] == w[1]) as usize;
            bridges += (g.num_edges() + 1 == g.num_vertices()) as usize;
            let inst = PlanarInstance::uniform(g.medial().unwrap(), f.clone()).unwrap();
            let z = holant_brute(&inst).map_err(|e| e.to_string())?;
            let t = tutte(&gr, &s(3), &s(3)).map_err(|e| e.to_string())?;
            ensure!(z == s(2) * &t, "{name}: holant {z} != 2 T(3,3) = {}", s(2) * t);
            if *name == "triangle" {
                triangle = Some(z);
            }
        }
        let elapsed = start.elapsed();
        ensure!(triangle == Some(s(30)), "C3 gave {triangle:?}, expected 30");
        ensure!(loops > 0 && multi > 0 && bridges > 0, "graph families not covered");
        ensure!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
        Ok(format!(
            "{} graphs ({loops} with loops, {multi} multigraphs, {bridges} trees), C3 = 30, {:.2}s",
            graphs.len(),
            elapsed.as_secs_f64()
        ))
    });
}

// ---------------------------------------------------------------------------
// 2. Loop-space equivalence

#[test]
fn criterion_2_loopspace_equivalence() {
    criterion(2, "loop-space equivalence", || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pairs = 240;
        for t in 0..pairs {
            let f = if t % 2 == 0 {
                common::random_c4i(&mut rng)
            } else {
                common::random_c4ii(&mut rng)
            };
            let v = classify(&f);
            ensure!(v.has("C4i") || v.has("C4ii"), "{f} is not C4");
            let map = medial_of_random_plane_graph(rng.gen_range(1..=10), rng.gen());
            ensure!(map.num_edges() <= 20, "instance too large");
            let inst = PlanarInstance::uniform(map, Signature::Six(f.clone())).unwrap();
            let dec = decompose(&inst).map_err(|e| e.to_string())?;
            let audit = entry_exit_audit(&dec).map_err(|e| e.to_string())?;
            ensure!(audit.balanced(), "unbalanced decomposition for {f}");
            let got = evaluate(&inst).map_err(|e| e.to_string())?;
            let want = holant_brute(&inst).map_err(|e| e.to_string())?;
            ensure!(got == want, "{f}: loopspace {got} != brute {want}");
        }
        Ok(format!("{pairs} pairs exact, entry/exit balanced on all"))
    });
}

// ---------------------------------------------------------------------------
// 3. FKT equivalence

fn small_instance(rng: &mut impl Rng, f: &SixVertexSignature) -> PlanarInstance {
    let map = match rng.gen_range(0..5) {
        0 => cycle_medial(rng.gen_range(1..=6)),
        _ => medial_of_random_plane_graph(rng.gen_range(1..=9), rng.gen()),
    };
    PlanarInstance::uniform(map, Signature::Six(f.clone())).unwrap()
}

#[test]
fn criterion_3_fkt_equivalence() {
    criterion(3, "FKT equivalence", || {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let f = common::random_matchgate(&mut rng);
            let inst = small_instance(&mut rng, &f);
            ensure!(inst.num_edges() <= 18, "instance too large");
            let got = fkt_eval(&inst).map_err(|e| e.to_string())?;
            let want = holant_brute(&inst).map_err(|e| e.to_string())?;
            ensure!(got == want, "M {f}: fkt {got} != brute {want}");
        }
        for _ in 0..50 {
            let f = common::random_matchgate_hat(&mut rng);
            let inst = small_instance(&mut rng, &f);
            let got = fkt_eval_hat(&inst).map_err(|e| e.to_string())?;
            let want = holant_brute(&inst).map_err(|e| e.to_string())?;
            ensure!(got == want, "M^ {f}: fkt {got} != brute {want}");
        }
        let big = PlanarInstance::uniform(
            medial_of_random_plane_graph(100, 33),
            Signature::Six(six([1, 1, 2, 1, 1, 1])),
        )
        .unwrap();
        let start = Instant::now();
        let a = fkt_eval_with(&big, 0, Solver::Auto).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let b = fkt_eval_with(&big, 1, Solver::Auto).map_err(|e| e.to_string())?;
        ensure!(a == b, "orientations disagree on the large instance");
        ensure!(elapsed < Duration::from_secs(10), "large instance took {elapsed:?}");
        Ok(format!(
            "100 M + 50 M^ exact; {}-edge instance in {:.2}s, two orientations agree",
            big.num_edges(),
            elapsed.as_secs_f64()
        ))
    });
}

// ---------------------------------------------------------------------------
// 4. Membership soundness

fn random_product(rng: &mut impl Rng) -> ProductWitness {
    let mut blocks: Vec<Vec<(usize, u8)>> = Vec::new();
    let mut order: Vec<usize> = (0..4).collect();
    order.shuffle(rng);
    for v in order {
        let k = rng.gen_range(0..=blocks.len());
        if k == blocks.len() {
            blocks.push(vec![(v, 0)]);
        } else {
            blocks[k].push((v, rng.gen_range(0..2)));
        }
    }
    let unaries = blocks
        .iter()
        .map(|_| [common::small_scalar(rng), common::small_scalar(rng)])
        .collect();
    ProductWitness { arity: 4, blocks, unaries }
}

fn random_affine(rng: &mut impl Rng) -> AffineWitness {
    let pairs: Vec<(usize, usize)> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
    AffineWitness {
        arity: 4,
        lambda: common::small_nonzero(rng),
        linear: (0..rng.gen_range(0..3))
            .map(|_| Parity2 { mask: rng.gen_range(1..16), rhs: rng.gen_range(0..2) })
            .collect(),
        lin: (0..4).map(|_| rng.gen_range(0..4)).collect(),
        cross: pairs.into_iter().filter(|_| rng.gen_bool(0.4)).collect(),
    }
}

#[test]
fn criterion_4_membership_soundness() {
    criterion(4, "membership soundness", || {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut n = 0;
        while n < 500 {
            let table = random_product(&mut rng).reconstruct();
            if table.iter().all(Scalar::is_zero) {
                continue;
            }
            let w = product_witness(&table).ok_or("constructed product rejected")?;
            ensure!(w.reconstruct() == table, "product witness does not reconstruct");
            n += 1;
        }
        let mut n = 0;
        while n < 500 {
            let table = random_affine(&mut rng).reconstruct();
            if table.iter().all(Scalar::is_zero) {
                continue;
            }
            let w = affine_witness(&table).ok_or("constructed affine function rejected")?;
            ensure!(w.reconstruct() == table, "affine witness does not reconstruct");
            n += 1;
        }
        // a = x = 0: in the Hadamard matchgate class iff b = ey and c = ez
        let vals = [-2i64, -1, 0, 1, 2];
        let mut fixtures = 0;
        for &b in &vals {
            for &c in &vals {
                for &y in &vals {
                    for &z in &vals {
                        let f = six([0, b, c, 0, y, z]);
                        let want = (b == y && c == z) || (b == -y && c == -z);
                        ensure!(is_matchgate_hat(&f) == want, "{f}: expected {want}");
                        fixtures += 1;
                    }
                }
            }
        }
        // c = z = 0 with abxy != 0 is never in the Hadamard matchgate class
        for _ in 0..200 {
            let (a, b, x, y) = (
                common::small_nonzero(&mut rng),
                common::small_nonzero(&mut rng),
                common::small_nonzero(&mut rng),
                common::small_nonzero(&mut rng),
            );
            let f = SixVertexSignature::new(a, b, s(0), x, y, s(0));
            ensure!(!is_matchgate_hat(&f), "{f} accepted");
            fixtures += 1;
        }
        Ok(format!("500 P + 500 A members reconstructed; {fixtures} characterisation fixtures hold"))
    });
}

// ---------------------------------------------------------------------------
// 5. Classifier fixtures and invariance

fn random_signature(rng: &mut impl Rng) -> SixVertexSignature {
    match rng.gen_range(0..6) {
        0 => common::random_c4i(rng),
        1 => common::random_c4ii(rng),
        2 => common::random_matchgate(rng),
        3 => common::random_matchgate_hat(rng),
        _ => SixVertexSignature::from_values([(); 6].map(|_| {
            if rng.gen_bool(0.3) {
                Scalar::zero()
            } else {
                common::small_scalar(rng)
            }
        })),
    }
}

#[test]
fn criterion_5_classifier() {
    criterion(5, "classifier fixtures", || {
        for f in [six([1; 6]), six([1, 1, 2, 1, 1, 2])] {
            let v = classify(&f);
            ensure!(v.planar_class == PlanarClass::SharpPHardPlanar, "{f}: {v}");
        }
        let w = Scalar::zeta(1);
        let f = SixVertexSignature::new(s(1), w.clone(), s(0), s(1), w, s(0));
        let v = classify(&f);
        ensure!(
            v.planar_class == PlanarClass::PTimePlanarOnly && v.has("C4ii"),
            "zeta point: {v}"
        );
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..30 {
            let map = medial_of_random_plane_graph(rng.gen_range(1..=10), rng.gen());
            let inst = PlanarInstance::uniform(map, Signature::Six(f.clone())).unwrap();
            let got = evaluate(&inst).map_err(|e| e.to_string())?;
            let want = holant_brute(&inst).map_err(|e| e.to_string())?;
            ensure!(got == want, "zeta point: loopspace {got} != brute {want}");
        }
        for _ in 0..1000 {
            let f = random_signature(&mut rng);
            let v = classify(&f);
            let key = (v.planar_class, v.general_class);
            for r in 1..4 {
                let u = classify(&f.rotate(r));
                ensure!((u.planar_class, u.general_class) == key, "{f} rotated {r}: {u} vs {v}");
            }
            let t = common::small_nonzero(&mut rng);
            let u = classify(&f.scale(&t));
            ensure!((u.planar_class, u.general_class) == key, "{f} scaled by {t}: {u} vs {v}");
        }
        Ok("fixtures classified; zeta point matches oracle on 30 instances; \
            1000 signatures rotation- and scaling-invariant"
            .into())
    });
}

// ---------------------------------------------------------------------------
// 6. Interpolation harnesses

#[test]
fn criterion_6_interpolation() {
    criterion(6, "interpolation harnesses", || {
        let mut runs = 0;
        for m in 0..=3 {
            for seed in 0..2u64 {
                let seed = 10 * m as u64 + seed;
                for (which, f) in [(Chi::One, six([2, 3, 0, 2, 3, 0])), (Chi::Two, six([1, 2, 0, -1, 2, 0]))] {
                    let inst = substitution_fixture(8, m, &Signature::Six(which.signature()), seed);
                    ensure!(inst.num_edges() <= 16, "instance too large");
                    let run = interpolate_chi(&inst, &f, which, 1).map_err(|e| e.to_string())?;
                    let d = direct(&inst, 1).map_err(|e| e.to_string())?;
                    ensure!(run.recovered == d, "{} m={m}: {} != {d}", which.name(), run.recovered);
                    runs += 1;
                }

                let g = BinarySignature::from_i64([0, 1, 3, 0]);
                let target = BinarySignature::from_i64([0, 2, -5, 0]);
                let inst = binary_fixture(6, m, &target, seed);
                ensure!(inst.num_edges() <= 16, "instance too large");
                let run = interpolate_binary(&inst, &target, &g, 1).map_err(|e| e.to_string())?;
                let d = direct(&inst, 1).map_err(|e| e.to_string())?;
                ensure!(run.recovered == d, "binary m={m}: {} != {d}", run.recovered);
                runs += 1;

                for f in [six([0, 0, 1, 0, 0, 2]), six([0, 0, 3, 0, 1, 3]), six([0, 0, 2, 0, 0, 2])] {
                    let inst = substitution_fixture(8, m, &Signature::Six(jordan_target()), seed);
                    let run = jordan_interp(&inst, &f, 1).map_err(|e| e.to_string())?;
                    let d = direct(&inst, 1).map_err(|e| e.to_string())?;
                    ensure!(run.run.recovered == d, "jordan {f} m={m}: {} != {d}", run.run.recovered);
                    runs += 1;
                }

                let f = six([1, 4, 3, 1, 4, 3]);
                let target = six([1, 3, 2, 1, 3, 2]);
                let inst = substitution_fixture(8, m, &Signature::Six(target.clone()), seed);
                let run = lattice_interp(&inst, &target, &f, LATTICE_BOUND, 1)
                    .map_err(|e| e.to_string())?;
                let d = direct(&inst, 1).map_err(|e| e.to_string())?;
                ensure!(run.run.recovered == d, "lattice m={m}: {} != {d}", run.run.recovered);
                runs += 1;
            }
        }
        for b in 1..=10i64 {
            let g = square_gadget(&six([1, b, 0, 1, b, 0])).to_six().ok_or("support")?;
            let (outer, inner) = (s(1 + b.pow(4)), s(2 * b.pow(3)));
            ensure!(
                g == SixVertexSignature::new(outer.clone(), inner.clone(), s(0), outer.clone(), inner.clone(), s(0)),
                "square b={b}: {g}"
            );
            let g = square_gadget(&six([1, b, 0, -1, b, 0])).to_six().ok_or("support")?;
            ensure!(
                g == SixVertexSignature::new(outer.clone(), inner.clone(), s(0), -outer, inner, s(0)),
                "signed square b={b}: {g}"
            );
        }
        Ok(format!("{runs} recoveries equal direct substitution (m <= 3); square gadget for b = 1..10"))
    });
}

// ---------------------------------------------------------------------------
// 7. Reduction compilers

#[test]
fn criterion_7_compilers() {
    criterion(7, "reduction compilers", || {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let zero_outer = |rng: &mut ChaCha8Rng| loop {
            let v = [(); 4].map(|_| rng.gen_range(-3i64..=3));
            if v.iter().any(|&t| t != 0) {
                return six([0, v[0], v[1], 0, v[2], v[3]]);
            }
        };
        for seed in 0..60u64 {
            let sigs = (0..2).map(|_| zero_outer(&mut rng)).collect();
            let csp = PlanarCsp::random(
                rng.gen_range(0..=7),
                rng.gen_range(0..=1),
                rng.gen_range(0..=2),
                sigs,
                seed,
            );
            let c = compile_plcsp(&csp).map_err(|e| e.to_string())?;
            let got = c.evaluate(1).map_err(|e| e.to_string())?;
            let want = csp.brute().map_err(|e| e.to_string())?;
            ensure!(got == want, "plcsp seed {seed}: {got} != {want}");
        }
        let fs = [
            six([1, 2, 0, 1, 2, 0]),
            six([1, 2, 0, -1, -2, 0]),
            six([2, -3, 0, -2, 3, 0]),
            SixVertexSignature::new(s(1), s(2) * Scalar::i(), s(0), s(1), s(-2) * Scalar::i(), s(0)),
        ];
        for seed in 0..60u64 {
            let f = &fs[seed as usize % fs.len()];
            let csp = InnerCsp::random(1 + seed as usize % 4, seed as usize % 5, 0.2, seed);
            let want = csp.brute(f).map_err(|e| e.to_string())?;
            let pad = if seed % 2 == 0 { Chi::One } else { Chi::Two };
            let c = compile_csp_inner(&csp, f, pad).map_err(|e| e.to_string())?;
            let got = c.evaluate(1).map_err(|e| e.to_string())?;
            ensure!(got == want, "csp seed {seed}: {got} != {want}");
        }
        Ok("60 planar #CSP and 60 inner #CSP fixtures evaluate to their sources".into())
    });
}

// ---------------------------------------------------------------------------
// 8. Gauss sums and propagation

fn random_csp(
    rng: &mut impl Rng,
    table: impl Fn(&mut dyn FnMut() -> u64, usize) -> Vec<Scalar>,
) -> (usize, Vec<Constraint>) {
    let n = rng.gen_range(1..=12);
    let count = rng.gen_range(0..=10);
    let mut cs = Vec::new();
    for _ in 0..count {
        let k = rng.gen_range(1..=3);
        let vars = (0..k).map(|_| rng.gen_range(0..n)).collect();
        let mut draw = || rng.gen::<u64>();
        cs.push(Constraint::new(vars, table(&mut draw, k)));
    }
    (n, cs)
}

#[test]
fn criterion_8_gauss_and_propagation() {
    criterion(8, "affine and product #CSP", || {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for t in 0..500 {
            let (n, cs) = random_csp(&mut rng, |draw, k| {
                let mut r = ChaCha8Rng::seed_from_u64(draw());
                let pairs: Vec<(usize, usize)> =
                    (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
                AffineWitness {
                    arity: k,
                    lambda: Scalar::zeta(r.gen_range(0..8)) * s(r.gen_range(1..=3)),
                    linear: (0..r.gen_range(0..2))
                        .map(|_| Parity2 { mask: r.gen_range(1..(1 << k)), rhs: r.gen_range(0..2) })
                        .collect(),
                    lin: (0..k).map(|_| r.gen_range(0..4)).collect(),
                    cross: pairs.into_iter().filter(|_| r.gen_bool(0.5)).collect(),
                }
                .reconstruct()
            });
            let got = affine_eval(n, &cs).map_err(|e| e.to_string())?;
            let want = csp_brute(n, &cs).map_err(|e| e.to_string())?;
            ensure!(got == want, "affine instance {t}: {got} != {want}");
        }
        for t in 0..500 {
            let (n, cs) = random_csp(&mut rng, |draw, k| {
                let mut r = ChaCha8Rng::seed_from_u64(draw());
                let mut blocks: Vec<Vec<(usize, u8)>> = vec![vec![(0, 0)]];
                for v in 1..k {
                    if r.gen_bool(0.5) {
                        blocks.last_mut().unwrap().push((v, r.gen_range(0..2)));
                    } else {
                        blocks.push(vec![(v, 0)]);
                    }
                }
                let unaries = blocks
                    .iter()
                    .map(|_| [common::small_scalar(&mut r), common::small_scalar(&mut r)])
                    .collect();
                ProductWitness { arity: k, blocks, unaries }.reconstruct()
            });
            let got = product_eval(n, &cs).map_err(|e| e.to_string())?;
            let want = csp_brute(n, &cs).map_err(|e| e.to_string())?;
            ensure!(got == want, "product instance {t}: {got} != {want}");
        }
        Ok("500 affine + 500 product instances (n <= 12) equal brute force".into())
    });
}

// ---------------------------------------------------------------------------
// 9. Mobius maps

/// Rational points of the unit circle plus the eighth roots of unity.
fn circle_samples() -> Vec<Scalar> {
    let mut out: Vec<Scalar> = (0..8).map(Scalar::zeta).collect();
    for (p, q) in [(1, 2), (1, 3), (2, 3), (3, 2), (1, 5), (4, 3), (5, 7), (-2, 5), (-1, 4), (7, 3), (3, 8), (-5, 2)] {
        // (1 - t^2 + 2 t i) / (1 + t^2) with t = p / q
        let t = Scalar::from_ratio(p, q);
        let den = &Scalar::one() + &(&t * &t);
        let num = &(&Scalar::one() - &(&t * &t)) + &(s(2) * &t * Scalar::i());
        out.push(num.checked_div(&den).unwrap());
    }
    out
}

fn random_map(rng: &mut impl Rng) -> Option<MobiusTransform> {
    let unit = |rng: &mut dyn rand::RngCore| Scalar::zeta(rng.gen_range(0..8));
    match rng.gen_range(0..4) {
        0 => {
            // u (z + alpha) / (1 + conj(alpha) z)
            let alpha = common::small_scalar(rng);
            let u = unit(rng);
            MobiusTransform::new(u.clone(), &u * &alpha, alpha.conjugate(), Scalar::one()).ok()
        }
        1 => MobiusTransform::new(Scalar::zero(), unit(rng), Scalar::one(), Scalar::zero()).ok(),
        _ => MobiusTransform::new(
            common::small_scalar(rng),
            common::small_scalar(rng),
            common::small_scalar(rng),
            common::small_scalar(rng),
        )
        .ok(),
    }
}

#[test]
fn criterion_9_mobius() {
    criterion(9, "Mobius maps", || {
        let half = Scalar::from_ratio(1, 2);
        let phi = MobiusTransform::new(Scalar::one(), half.clone(), half, Scalar::one()).unwrap();
        let orbit = iterate_distinct(&phi, &Point::Finite(Scalar::i()), 50);
        let mut vals = orbit.values.clone();
        vals.sort_by_key(|p| p.to_string());
        vals.dedup();
        ensure!(vals.len() == 50 && orbit.period.is_none(), "iterates repeat");
        let iz = MobiusTransform::new(Scalar::i(), Scalar::zero(), Scalar::zero(), Scalar::one()).unwrap();
        ensure!(order(&iz) == Order::Finite(4), "iz has order {}", order(&iz));

        let samples = circle_samples();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (mut maps, mut preserving) = (0, 0);
        while maps < 200 {
            let Some(phi) = random_map(&mut rng) else { continue };
            let sampled = samples.iter().all(|z| match phi.apply_finite(z) {
                Point::Finite(w) => w.norm_sq().is_one(),
                Point::Infinity => false,
            });
            let detected = unit_circle_form(&phi).is_some();
            ensure!(sampled == detected, "{phi}: sampling {sampled}, detection {detected}");
            preserving += detected as usize;
            maps += 1;
        }
        Ok(format!(
            "50 distinct iterates from i; iz has order 4; 200 maps ({preserving} circle-preserving) agree with sampling"
        ))
    });
}
