use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};

use sixvertex::cli::run;

fn sixv(args: &[&str]) -> (u8, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sixv").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn temp_path(tag: &str) -> PathBuf {
    static N: AtomicUsize = AtomicUsize::new(0);
    let k = N.fetch_add(1, Ordering::Relaxed);
    std::env::temp_dir().join(format!("sixv-{}-{tag}-{k}.inst", std::process::id()))
}

fn kv<'a>(out: &'a str, key: &str) -> Option<&'a str> {
    out.lines().find_map(|l| l.strip_prefix(key)?.strip_prefix('='))
}

fn triangle_file() -> PathBuf {
    let p = temp_path("triangle");
    let (code, _, err) = sixv(&["medial", "--cycle", "3", "--out", p.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    p
}

#[test]
fn classify_ice_point() {
    let (code, out, _) = sixv(&["classify", "1,1,1,1,1,1"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next(), Some("SharpPHardPlanar; case IV"));
    assert_eq!(kv(&out, "planar_class"), Some("SharpPHardPlanar"));
    let (_, out, _) = sixv(&["classify", "--sig", "1,w,0,1,w,0"]);
    assert_eq!(kv(&out, "witnesses"), Some("C4ii"));
}

#[test]
fn tutte_point_on_doubled_triangle() {
    let p = triangle_file();
    let (code, out, _) = sixv(&["eval", "--instance", p.to_str().unwrap(), "--method", "brute"]);
    assert_eq!(code, 0);
    assert_eq!(kv(&out, "value"), Some("30"));
}

#[test]
fn fkt_on_doubled_triangle_verifies() {
    let p = triangle_file();
    let (code, out, err) = sixv(&[
        "eval", "--instance", p.to_str().unwrap(), "--sig", "1,1,2,1,1,1", "--method", "fkt",
        "--verify",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(kv(&out, "verify"), Some("match"));
    assert_eq!(kv(&out, "value"), kv(&out, "brute"));
}

#[test]
fn loopspace_rejects_ice_with_explanation() {
    let p = triangle_file();
    let (code, _, err) = sixv(&[
        "eval", "--instance", p.to_str().unwrap(), "--sig", "1,1,1,1,1,1", "--method", "loopspace",
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("c = z = 0"), "{err}");
    assert!(err.contains("c = 1, z = 1"), "{err}");
}

#[test]
fn fkt_rejects_non_matchgate() {
    let p = triangle_file();
    let (code, _, err) =
        sixv(&["eval", "--instance", p.to_str().unwrap(), "--sig", "1,1,1,1,1,1", "--method", "fkt"]);
    assert_eq!(code, 2);
    assert!(err.contains("not a matchgate"), "{err}");
}

#[test]
fn auto_dispatch_never_mismatches() {
    let sigs = [
        "1,1,1,1,1,1",
        "2,3,5,0,0,0",
        "1,1,2,1,1,1",
        "1,w,0,1,w,0",
        "1,w,0,1,-w,0",
        "1,i,0,1,-i,0",
        "0,1,1,0,1,-1",
        "1,0,1,1,0,-1",
        "2,0,1,2,0,1",
        "0,1,1,0,1,1",
        "1,2,0,1,2,0",
    ];
    let mut routes = BTreeSet::new();
    for seed in 0..6u64 {
        let p = temp_path("auto");
        let size = (2 + seed % 5).to_string();
        let (code, _, _) = sixv(&[
            "gen", "--size", &size, "--seed", &seed.to_string(), "--out", p.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        for s in sigs {
            let (code, out, err) =
                sixv(&["eval", "--instance", p.to_str().unwrap(), "--sig", s, "--verify"]);
            assert_eq!(code, 0, "{s}: {err}");
            assert_ne!(kv(&out, "verify"), Some("mismatch"));
            routes.insert(kv(&out, "method").unwrap().to_string());
        }
        // per-vertex random signatures
        let (code, _, _) = sixv(&[
            "gen", "--size", &size, "--seed", &seed.to_string(), "--mixed", "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let (code, _, err) = sixv(&["eval", "--instance", p.to_str().unwrap(), "--verify"]);
        assert_eq!(code, 0, "{err}");
    }
    for r in ["brute", "product", "affine", "zero-pair", "fkt", "fkt-hat", "loopspace"] {
        assert!(routes.contains(r), "route {r} never chosen: {routes:?}");
    }
}

#[test]
fn usage_and_validation_codes() {
    assert_eq!(sixv(&["frobnicate"]).0, 1);
    assert_eq!(sixv(&["eval"]).0, 1);
    assert_eq!(sixv(&["--jobs", "0", "classify", "1,1,1,1,1,1"]).0, 1);
    assert_eq!(sixv(&["--help"]).0, 0);
    assert_eq!(sixv(&["classify"]).0, 1);
    assert_eq!(sixv(&["classify", "1,1,1"]).0, 2);
    assert_eq!(sixv(&["classify", "1,1,1,1,1,q"]).0, 2);
    assert_eq!(sixv(&["eval", "--instance", "/nonexistent/x.inst"]).0, 2);
    assert_eq!(sixv(&["sweep", "--p", "b", "--q", "b"]).0, 2);
    assert_eq!(sixv(&["harness", "chi", "--vertices", "2", "--m", "3"]).0, 2);
    let p = temp_path("bad");
    std::fs::write(&p, "sixvertex-instance v1\nsignatures\nf = six 1,1,1,1,1,1\nvertices\nv0: g : h0 h1 h2 h3\nedges\nh0 - h1\nh2 - h3\n").unwrap();
    let (code, _, err) = sixv(&["eval", "--instance", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("unknown signature"), "{err}");
}

#[test]
fn harnesses_report_matches() {
    for h in ["chi", "binary", "jordan", "lattice", "square"] {
        let (code, out, err) = sixv(&["harness", h, "--seed", "4"]);
        assert_eq!(code, 0, "{h}: {err}");
        assert_eq!(kv(&out, "match"), Some("true"), "{h}");
    }
    let (code, out, _) = sixv(&["harness", "chi", "--sig", "1,3,0,-1,3,0", "--m", "1"]);
    assert_eq!(code, 0);
    assert_eq!(kv(&out, "pad"), Some("chi2"));
    let (code, _, err) = sixv(&["harness", "jordan", "--sig", "0,3,0,0,1,0"]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn compile_round_trips() {
    for from in ["plcsp", "csp"] {
        for seed in ["0", "1", "2"] {
            let p = temp_path(from);
            let (code, out, err) = sixv(&[
                "compile", "--from", from, "--size", "3", "--seed", seed, "--verify", "--out",
                p.to_str().unwrap(),
            ]);
            assert_eq!(code, 0, "{from} {seed}: {err}");
            assert_eq!(
                kv(&out, "# compiled_value"),
                kv(&out, "source_value"),
                "{from} {seed}"
            );
            let (code, _, _) = sixv(&["audit-loops", "--instance", p.to_str().unwrap()]);
            assert_eq!(code, 0);
        }
    }
}

#[test]
fn audit_reports_balance() {
    let p = temp_path("audit");
    sixv(&["gen", "--size", "6", "--seed", "9", "--sig", "1,2,0,1,2,0", "--out", p.to_str().unwrap()]);
    let (code, out, _) = sixv(&["audit-loops", "--instance", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(kv(&out, "balanced"), Some("true"));
    assert!(kv(&out, "circuits").is_some());
}

#[test]
fn mobius_diagnostics() {
    let (code, out, _) = sixv(&["mobius", "--map", "w^2,0,0,1"]);
    assert_eq!(code, 0);
    assert_eq!(kv(&out, "phi_order"), Some("4"));
    let (_, out, _) = sixv(&["mobius", "--map", "1,1/2,1/2,1", "--iterate", "50"]);
    assert_eq!(kv(&out, "phi_period"), Some("none"));
    assert!(kv(&out, "phi_iterate50").is_some());
    let (code, out, _) = sixv(&["mobius", "--from-signature", "1,2,0,1,3,0"]);
    assert_eq!(code, 0);
    assert!(kv(&out, "inner_map").is_some() && kv(&out, "cross_order").is_some());
    assert_eq!(sixv(&["mobius", "--map", "1,1,1,1"]).0, 2);
}

#[test]
fn sweep_grid_shape() {
    let (code, out, _) = sixv(&["sweep", "--values", "-1,0,1", "--p", "c", "--q", "z"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 1 + 9);
    assert!(lines[0].starts_with("c\tz\t"));
    assert!(lines.iter().skip(1).all(|l| l.split('\t').count() == 6));
}

#[test]
fn generation_is_deterministic() {
    let a = sixv(&["gen", "--size", "7", "--seed", "11", "--mixed"]).1;
    let b = sixv(&["gen", "--size", "7", "--seed", "11", "--mixed"]).1;
    assert_eq!(a, b);
    assert_ne!(a, sixv(&["gen", "--size", "7", "--seed", "12", "--mixed"]).1);
}

#[test]
fn medial_from_graph_file() {
    let g = temp_path("graph");
    // a triangle: three vertices of degree 2
    std::fs::write(
        &g,
        "plane-graph v1\nvertices\nv0: h0 h5\nv1: h2 h1\nv2: h4 h3\nedges\nh0 - h1\nh2 - h3\nh4 - h5\n",
    )
    .unwrap();
    let p = temp_path("medial");
    let (code, _, err) =
        sixv(&["medial", "--graph", g.to_str().unwrap(), "--out", p.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let (_, out, _) = sixv(&["eval", "--instance", p.to_str().unwrap(), "--method", "brute"]);
    assert_eq!(kv(&out, "value"), Some("30"));
    assert_eq!(sixv(&["medial", "--cycle", "3", "--grid", "2x2"]).0, 1);
}

#[test]
fn binary_honours_oracle_cap_and_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_sixv");
    let p = triangle_file();
    let out = Command::new(bin)
        .args(["eval", "--instance", p.to_str().unwrap(), "--method", "brute"])
        .env("SIXV_ORACLE_CAP", "3")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(bin)
        .args(["--jobs", "3", "eval", "--instance", p.to_str().unwrap(), "--method", "brute"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("value=30"));
    let out = Command::new(bin).arg("nope").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
