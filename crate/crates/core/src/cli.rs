//! The `sixv` command-line surface. Every command writes line-oriented
//! `key=value` output (or an instance file) and maps failures to exit codes:
//! 0 ok, 1 usage, 2 validation, 3 internal invariant violation.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classify::{Verdict, classify};
use crate::cspsolve::{affine_eval, holant_csp, pinned_slot, product_eval, zero_pair_eval};
use crate::instance::{
    PlanarInstance, RotationMap, cycle_medial, grid_graph, grid_patch,
    medial_of_random_plane_graph, random_plane_graph,
};
use crate::loopspace;
use crate::matchgate::{Solver, fkt_eval_hat_with, fkt_eval_with};
use crate::membership::{affine_witness, is_matchgate, is_matchgate_hat, product_witness};
use crate::mobius::{
    CircleForm, MobiusTransform, Point, Which, from_signature, iterate_distinct, order,
    unit_circle_form,
};
use crate::oracle::{edge_cap, holant_brute_jobs};
use crate::reductions::{
    self, Chi, InnerCsp, LATTICE_BOUND, PlanarCsp, compile_csp_inner, compile_plcsp,
    interpolate_binary, interpolate_chi, jordan_interp, jordan_target, lattice_interp,
    random_small_six, square_gadget, substitution_fixture,
};
use crate::scalar::Scalar;
use crate::signature::{Signature, SixVertexSignature, parse_scalars};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Invariant(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Invariant(_) => 3,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "sixv",
    version,
    about = "Classify six-vertex signatures and evaluate planar partition functions exactly"
)]
pub struct Cli {
    /// Worker threads for brute-force sums.
    #[arg(long, global = true, default_value_t = 1, value_parser = parse_jobs)]
    pub jobs: usize,
    /// Seed for generators and randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_jobs(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("`{s}` is not a positive integer")),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a signature `a,b,c,x,y,z`.
    Classify {
        #[arg(value_name = "SIG", allow_hyphen_values = true)]
        positional: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        sig: Option<String>,
    },
    /// Evaluate the partition function of an instance file.
    Eval(EvalArgs),
    /// Emit a generated 4-regular plane instance.
    Gen(GenArgs),
    /// Emit the medial instance of a plane graph.
    Medial(MedialArgs),
    /// Compile a random #CSP fixture into a six-vertex instance.
    Compile(CompileArgs),
    /// Run an interpolation or gadget harness on a random fixture.
    Harness(HarnessArgs),
    /// Dump the circuit decomposition and its entry/exit counts.
    AuditLoops {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Mobius maps induced by a signature, or given directly.
    Mobius(MobiusArgs),
    /// Grid of verdicts over a two-parameter slice.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Brute,
    Loopspace,
    Fkt,
    FktHat,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Replace every vertex signature by this one.
    #[arg(long, allow_hyphen_values = true)]
    pub sig: Option<String>,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Cross-check against brute force when the instance is within the cap.
    #[arg(long)]
    pub verify: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    /// Medial of a random plane multigraph with `size` edges.
    Random,
    /// Doubled `size`-cycle.
    Cycle,
    /// Medial of the `size x width` grid graph.
    Patch,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value_t = GenKind::Random)]
    pub kind: GenKind,
    #[arg(long, default_value_t = 4)]
    pub size: usize,
    #[arg(long)]
    pub width: Option<usize>,
    #[arg(long, allow_hyphen_values = true, default_value = "1,1,1,1,1,1")]
    pub sig: String,
    /// Label each vertex with its own random small signature instead.
    #[arg(long)]
    pub mixed: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct GraphSource {
    /// Plane graph file (`plane-graph v1`).
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[arg(long)]
    pub cycle: Option<usize>,
    /// `NxM` grid graph.
    #[arg(long)]
    pub grid: Option<String>,
    /// Random plane multigraph with this many edges.
    #[arg(long)]
    pub random: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MedialArgs {
    #[command(flatten)]
    pub source: GraphSource,
    #[arg(long, allow_hyphen_values = true, default_value = "1,1,2,1,1,2")]
    pub sig: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CompileFrom {
    Plcsp,
    Csp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Pad {
    Chi1,
    Chi2,
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    #[arg(long, value_enum)]
    pub from: CompileFrom,
    /// Edges of the constraint graph (plcsp) or variables (csp).
    #[arg(long, default_value_t = 4)]
    pub size: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub sig: Option<String>,
    #[arg(long, value_enum, default_value_t = Pad::Chi1)]
    pub pad: Pad,
    /// Evaluate the compiled instance and compare with the source.
    #[arg(long)]
    pub verify: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HarnessKind {
    Chi,
    Binary,
    Jordan,
    Lattice,
    Square,
}

#[derive(Debug, Args)]
pub struct HarnessArgs {
    #[arg(value_enum)]
    pub which: HarnessKind,
    #[arg(long, default_value_t = 5)]
    pub vertices: usize,
    /// Occurrences of the target signature.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    /// The signature whose chains are queried.
    #[arg(long, allow_hyphen_values = true)]
    pub sig: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub target: Option<String>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct MobiusSource {
    #[arg(long, allow_hyphen_values = true)]
    pub from_signature: Option<String>,
    /// Coefficients `a,b,c,d` of `(a z + b) / (c z + d)`.
    #[arg(long, allow_hyphen_values = true)]
    pub map: Option<String>,
}

#[derive(Debug, Args)]
pub struct MobiusArgs {
    #[command(flatten)]
    pub source: MobiusSource,
    /// Number of iterates to compute from `--start`.
    #[arg(long)]
    pub iterate: Option<usize>,
    #[arg(long, allow_hyphen_values = true, default_value = "i")]
    pub start: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Param {
    A,
    B,
    C,
    X,
    Y,
    Z,
}

impl Param {
    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, allow_hyphen_values = true, default_value = "1,1,0,1,1,0")]
    pub base: String,
    #[arg(long, value_enum, default_value_t = Param::B)]
    pub p: Param,
    #[arg(long, value_enum, default_value_t = Param::Y)]
    pub q: Param,
    /// Values taken by both parameters.
    #[arg(long, allow_hyphen_values = true, default_value = "-2,-1,0,1,2")]
    pub values: String,
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                1
            } else {
                let _ = out.write_all(text.as_bytes());
                0
            };
        }
    };
    let mut buf = String::new();
    let res = execute(&cli, &mut buf);
    let _ = out.write_all(buf.as_bytes());
    match res {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

pub fn execute(cli: &Cli, out: &mut String) -> Result<()> {
    match &cli.command {
        Command::Classify { positional, sig } => {
            let s = match (positional, sig) {
                (Some(s), None) | (None, Some(s)) => s,
                (Some(_), Some(_)) => {
                    return Err(CliError::Usage("give the signature once".into()));
                }
                (None, None) => return Err(CliError::Usage("missing signature".into())),
            };
            cmd_classify(&parse_six(s)?, out);
            Ok(())
        }
        Command::Eval(a) => cmd_eval(a, cli.seed, cli.jobs, out),
        Command::Gen(a) => cmd_gen(a, cli.seed, out),
        Command::Medial(a) => cmd_medial(a, cli.seed, out),
        Command::Compile(a) => cmd_compile(a, cli.seed, cli.jobs, out),
        Command::Harness(a) => cmd_harness(a, cli.seed, cli.jobs, out),
        Command::AuditLoops { instance } => cmd_audit(&read_instance(instance)?, out),
        Command::Mobius(a) => cmd_mobius(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
    }
}

fn parse_six(s: &str) -> Result<SixVertexSignature> {
    match Signature::parse(s).map_err(invalid)? {
        Signature::Six(f) => Ok(f),
        other => Err(invalid(format!("expected a six-vertex signature, got `{other}`"))),
    }
}

fn read_instance(path: &Path) -> Result<PlanarInstance> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    PlanarInstance::parse(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn emit_file(out: &mut String, path: &Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => {
            fs::write(p, text).map_err(|e| invalid(format!("cannot write {}: {e}", p.display())))?;
            let _ = writeln!(out, "wrote={}", p.display());
        }
        None => out.push_str(text),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// classify

fn cmd_classify(f: &SixVertexSignature, out: &mut String) {
    let v = classify(f);
    let _ = writeln!(out, "{v}");
    let _ = writeln!(out, "signature={f}");
    out.push_str(&v.to_kv());
}

/// Why `f` admits no loop-space evaluation, or `None` if it does.
pub fn loopspace_obstruction(f: &SixVertexSignature) -> Option<String> {
    let v = classify(f);
    if v.has("C4i") || v.has("C4ii") {
        return None;
    }
    Some(if !f.c.is_zero() || !f.z.is_zero() {
        format!(
            "signature {f} is {}; the loop-space method needs c = z = 0 but c = {}, z = {}",
            v, f.c, f.z
        )
    } else {
        format!(
            "signature {f} is {}; it has c = z = 0 but neither a^2 x^2 = b^2 y^2 \
             nor the zeta_8 exponent condition on (x, b, y) / a holds",
            v
        )
    })
}

// ---------------------------------------------------------------------------
// eval

/// Algorithm that produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Brute,
    Product,
    Affine,
    ZeroPair,
    Fkt,
    FktHat,
    Loopspace,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Brute => "brute",
            Route::Product => "product",
            Route::Affine => "affine",
            Route::ZeroPair => "zero-pair",
            Route::Fkt => "fkt",
            Route::FktHat => "fkt-hat",
            Route::Loopspace => "loopspace",
        }
    }
}

fn six_labels(inst: &PlanarInstance) -> Option<Vec<&SixVertexSignature>> {
    (0..inst.map.num_vertices())
        .map(|v| match inst.signature_of(v) {
            Signature::Six(f) => Some(f),
            _ => None,
        })
        .collect()
}

/// Picks the evaluator for `inst` from the verdicts of its signatures: the
/// edge-variable #CSP when every table is of product type or affine, the
/// zero-pair count, FKT for matchgate or Hadamard-matchgate signatures and
/// the loop space for C4 signatures. Anything else goes to brute force.
pub fn auto_route(inst: &PlanarInstance) -> Route {
    let (_, cs) = holant_csp(inst);
    if cs.iter().all(|c| product_witness(&c.table).is_some()) {
        return Route::Product;
    }
    if cs.iter().all(|c| affine_witness(&c.table).is_some()) {
        return Route::Affine;
    }
    let Some(sixes) = six_labels(inst) else {
        return Route::Brute;
    };
    let pins: Option<Vec<(usize, usize)>> = sixes.iter().map(|f| pinned_slot(f)).collect();
    if pins.is_some_and(|p| p.windows(2).all(|w| w[0].1 == w[1].1)) {
        return Route::ZeroPair;
    }
    if sixes.iter().all(|f| is_matchgate(f)) {
        return Route::Fkt;
    }
    if sixes.iter().all(|f| is_matchgate_hat(f)) {
        return Route::FktHat;
    }
    if sixes.iter().all(|f| loopspace_obstruction(f).is_none()) {
        return Route::Loopspace;
    }
    Route::Brute
}

pub fn evaluate_route(
    inst: &PlanarInstance,
    route: Route,
    seed: u64,
    jobs: usize,
) -> Result<Scalar> {
    match route {
        Route::Brute => holant_brute_jobs(inst, jobs).map_err(|e| {
            invalid(format!(
                "{e}; no polynomial-time evaluator applies to this instance"
            ))
        }),
        Route::Product => {
            let (n, cs) = holant_csp(inst);
            product_eval(n, &cs).map_err(invalid)
        }
        Route::Affine => {
            let (n, cs) = holant_csp(inst);
            affine_eval(n, &cs).map_err(invalid)
        }
        Route::ZeroPair => zero_pair_eval(inst).map_err(invalid),
        Route::Fkt => fkt_eval_with(inst, seed, Solver::Auto).map_err(invalid),
        Route::FktHat => fkt_eval_hat_with(inst, seed, Solver::Auto).map_err(invalid),
        Route::Loopspace => {
            for v in 0..inst.map.num_vertices() {
                match inst.signature_of(v) {
                    Signature::Six(f) => {
                        if let Some(why) = loopspace_obstruction(f) {
                            return Err(invalid(format!("vertex v{v}: {why}")));
                        }
                    }
                    other => {
                        return Err(invalid(format!(
                            "vertex v{v} carries `{other}`, not a six-vertex signature"
                        )));
                    }
                }
            }
            loopspace::evaluate(inst).map_err(invalid)
        }
    }
}

fn cmd_eval(a: &EvalArgs, seed: u64, jobs: usize, out: &mut String) -> Result<()> {
    let mut inst = read_instance(&a.instance)?;
    if let Some(s) = &a.sig {
        inst = inst
            .with_signature(Signature::parse(s).map_err(invalid)?)
            .map_err(invalid)?;
    }
    let route = match a.method {
        Method::Auto => auto_route(&inst),
        Method::Brute => Route::Brute,
        Method::Loopspace => Route::Loopspace,
        Method::Fkt => Route::Fkt,
        Method::FktHat => Route::FktHat,
    };
    let value = evaluate_route(&inst, route, seed, jobs)?;
    let _ = writeln!(out, "vertices={}", inst.map.num_vertices());
    let _ = writeln!(out, "edges={}", inst.num_edges());
    let _ = writeln!(out, "method={}", route.name());
    let _ = writeln!(out, "value={value}");
    if a.verify {
        if inst.num_edges() > edge_cap() || route == Route::Brute {
            let _ = writeln!(out, "verify=skipped");
            return Ok(());
        }
        let brute = holant_brute_jobs(&inst, jobs).map_err(invalid)?;
        let _ = writeln!(out, "brute={brute}");
        if brute != value {
            let _ = writeln!(out, "verify=mismatch");
            return Err(CliError::Invariant(format!(
                "{} gave {value} but brute force gave {brute}",
                route.name()
            )));
        }
        let _ = writeln!(out, "verify=match");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// gen, medial

fn cmd_gen(a: &GenArgs, seed: u64, out: &mut String) -> Result<()> {
    if a.size == 0 {
        return Err(invalid("--size must be positive"));
    }
    let map = match a.kind {
        GenKind::Random => medial_of_random_plane_graph(a.size, seed),
        GenKind::Cycle => cycle_medial(a.size),
        GenKind::Patch => {
            let w = a.width.unwrap_or(a.size);
            if w == 0 || a.size * w < 2 {
                return Err(invalid("the grid needs at least one edge"));
            }
            grid_patch(a.size, w)
        }
    };
    let inst = if a.mixed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = map.num_vertices();
        let sigs = (0..n)
            .map(|v| (format!("f{v}"), Signature::Six(random_small_six(&mut rng))))
            .collect();
        PlanarInstance::new(map, sigs, (0..n).collect())
    } else {
        PlanarInstance::uniform(map, Signature::parse(&a.sig).map_err(invalid)?)
    }
    .map_err(invalid)?;
    emit_file(out, &a.out, &inst.serialize())
}

/// Reads a plane graph: header `plane-graph v1`, a `vertices` section with
/// lines `v<k>: h<i> h<j> ...` (ccw) and an `edges` section with lines
/// `h<i> - h<j>`.
pub fn parse_plane_graph(text: &str) -> Result<RotationMap> {
    let syntax = |n: usize, msg: &str| invalid(format!("line {n}: {msg}"));
    let half = |n: usize, t: &str| -> Result<usize> {
        t.trim()
            .strip_prefix('h')
            .and_then(|d| d.parse().ok())
            .ok_or_else(|| syntax(n, &format!("bad half-edge `{t}`")))
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    match lines.next() {
        Some((_, "plane-graph v1")) => {}
        _ => return Err(syntax(1, "expected header `plane-graph v1`")),
    }
    let mut section = "";
    let mut verts: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (n, l) in lines {
        if l == "vertices" || l == "edges" {
            section = l;
            continue;
        }
        match section {
            "vertices" => {
                let (v, hs) = l.split_once(':').ok_or_else(|| syntax(n, "expected `v<k>: ...`"))?;
                let v = v
                    .trim()
                    .strip_prefix('v')
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| syntax(n, "bad vertex id"))?;
                let hs = hs
                    .split_whitespace()
                    .map(|t| half(n, t))
                    .collect::<Result<Vec<_>>>()?;
                verts.push((v, hs));
            }
            "edges" => {
                let (p, q) = l.split_once('-').ok_or_else(|| syntax(n, "expected `h<i> - h<j>`"))?;
                edges.push((half(n, p)?, half(n, q)?));
            }
            _ => return Err(syntax(n, "content outside a section")),
        }
    }
    verts.sort_by_key(|t| t.0);
    if verts.iter().enumerate().any(|(i, t)| t.0 != i) {
        return Err(invalid("vertex ids must be v0..v(n-1)"));
    }
    let nh = 2 * edges.len();
    let mut pair = vec![usize::MAX; nh];
    for &(p, q) in &edges {
        if p >= nh || q >= nh || pair[p] != usize::MAX || pair[q] != usize::MAX {
            return Err(invalid(format!("edge h{p} - h{q} is malformed")));
        }
        pair[p] = q;
        pair[q] = p;
    }
    let map = RotationMap::new(verts.into_iter().map(|t| t.1).collect(), pair).map_err(invalid)?;
    map.check_planar().map_err(invalid)?;
    Ok(map)
}

fn cmd_medial(a: &MedialArgs, seed: u64, out: &mut String) -> Result<()> {
    let s = &a.source;
    let g = if let Some(p) = &s.graph {
        let text = fs::read_to_string(p)
            .map_err(|e| invalid(format!("cannot read {}: {e}", p.display())))?;
        parse_plane_graph(&text)?
    } else if let Some(n) = s.cycle {
        if n == 0 {
            return Err(invalid("--cycle must be positive"));
        }
        return emit_file(
            out,
            &a.out,
            &PlanarInstance::uniform(cycle_medial(n), Signature::parse(&a.sig).map_err(invalid)?)
                .map_err(invalid)?
                .serialize(),
        );
    } else if let Some(spec) = &s.grid {
        let (n, m) = spec
            .split_once('x')
            .and_then(|(n, m)| Some((n.trim().parse().ok()?, m.trim().parse().ok()?)))
            .ok_or_else(|| invalid(format!("--grid expects NxM, got `{spec}`")))?;
        if n == 0 || m == 0 || n * m < 2 {
            return Err(invalid("the grid needs at least one edge"));
        }
        grid_graph(n, m)
    } else if let Some(e) = s.random {
        if e == 0 {
            return Err(invalid("--random must be positive"));
        }
        random_plane_graph(e, seed)
    } else {
        return Err(CliError::Usage("no graph source".into()));
    };
    if g.num_edges() == 0 {
        return Err(invalid("the graph has no edges"));
    }
    let m = g.medial().map_err(invalid)?;
    let inst = PlanarInstance::uniform(m, Signature::parse(&a.sig).map_err(invalid)?)
        .map_err(invalid)?;
    emit_file(out, &a.out, &inst.serialize())
}

// ---------------------------------------------------------------------------
// compile

fn cmd_compile(a: &CompileArgs, seed: u64, jobs: usize, out: &mut String) -> Result<()> {
    let (compiled, source) = match a.from {
        CompileFrom::Plcsp => {
            let f = parse_six(a.sig.as_deref().unwrap_or("0,1,2,0,3,1"))?;
            let csp = PlanarCsp::random(a.size, 1, 1, vec![f], seed);
            let compiled = compile_plcsp(&csp).map_err(invalid)?;
            (compiled, csp.brute().map_err(invalid)?)
        }
        CompileFrom::Csp => {
            let f = parse_six(a.sig.as_deref().unwrap_or("1,2,0,1,2,0"))?;
            if a.size == 0 {
                return Err(invalid("--size must be positive"));
            }
            let csp = InnerCsp::random(a.size, a.size, 0.2, seed);
            let pad = match a.pad {
                Pad::Chi1 => Chi::One,
                Pad::Chi2 => Chi::Two,
            };
            let compiled = compile_csp_inner(&csp, &f, pad).map_err(invalid)?;
            (compiled, csp.brute(&f).map_err(invalid)?)
        }
    };
    let header = format!(
        "# factor={}\n# source_value={}\n",
        compiled.factor, source
    );
    let text = format!("{header}{}", compiled.instance.serialize());
    if a.out.is_some() {
        emit_file(out, &a.out, &text)?;
        let _ = writeln!(out, "factor={}", compiled.factor);
        let _ = writeln!(out, "source_value={source}");
        let _ = writeln!(out, "edges={}", compiled.instance.num_edges());
    } else {
        out.push_str(&text);
    }
    if a.verify {
        let got = compiled.evaluate(jobs).map_err(invalid)?;
        let _ = writeln!(out, "# compiled_value={got}");
        if got != source {
            return Err(CliError::Invariant(format!(
                "compiled instance evaluates to {got}, source to {source}"
            )));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// harness

fn cmd_harness(a: &HarnessArgs, seed: u64, jobs: usize, out: &mut String) -> Result<()> {
    if a.m > a.vertices || a.vertices == 0 {
        return Err(invalid("need 0 <= m <= vertices and vertices >= 1"));
    }
    let six_or = |s: &Option<String>, d: &str| parse_six(s.as_deref().unwrap_or(d));
    let (recovered, direct, m) = match a.which {
        HarnessKind::Square => return harness_square(&six_or(&a.sig, "1,2,0,1,2,0")?, out),
        HarnessKind::Chi => {
            let f = six_or(&a.sig, "2,3,0,2,3,0")?;
            let which = if f.x == -f.a.clone() && !f.a.is_zero() {
                Chi::Two
            } else {
                Chi::One
            };
            let _ = writeln!(out, "pad={}", which.name());
            let inst = substitution_fixture(a.vertices, a.m, &Signature::Six(which.signature()), seed);
            let run = interpolate_chi(&inst, &f, which, jobs).map_err(invalid)?;
            let m = run.m();
            (run.recovered, reductions::direct(&inst, jobs).map_err(invalid)?, m)
        }
        HarnessKind::Binary => {
            let parse_bin = |s: &Option<String>, d: &str| -> Result<_> {
                match Signature::parse(s.as_deref().unwrap_or(d)).map_err(invalid)? {
                    Signature::Binary(g) => Ok(g),
                    other => Err(invalid(format!("expected a binary signature, got `{other}`"))),
                }
            };
            let g = parse_bin(&a.sig, "binary 0,1,2,0")?;
            let target = parse_bin(&a.target, "binary 0,1,5,0")?;
            let inst = reductions::binary_fixture(a.vertices, a.m, &target, seed);
            let run = interpolate_binary(&inst, &target, &g, jobs).map_err(invalid)?;
            let m = run.m();
            (run.recovered, reductions::direct(&inst, jobs).map_err(invalid)?, m)
        }
        HarnessKind::Jordan => {
            let f = six_or(&a.sig, "0,0,1,0,0,2")?;
            let inst = substitution_fixture(a.vertices, a.m, &Signature::Six(jordan_target()), seed);
            let run = jordan_interp(&inst, &f, jobs).map_err(invalid)?;
            let _ = writeln!(out, "jordan_case={:?}", run.case);
            let m = run.run.m();
            (run.run.recovered, reductions::direct(&inst, jobs).map_err(invalid)?, m)
        }
        HarnessKind::Lattice => {
            let f = six_or(&a.sig, "1,4,3,1,4,3")?;
            let target = six_or(&a.target, "1,3,2,1,3,2")?;
            let inst = substitution_fixture(a.vertices, a.m, &Signature::Six(target.clone()), seed);
            let run = lattice_interp(&inst, &target, &f, LATTICE_BOUND, jobs).map_err(invalid)?;
            match run.spec.basis {
                Some((j, k)) => {
                    let _ = writeln!(out, "lattice_basis={j},{k}");
                }
                None => {
                    let _ = writeln!(out, "lattice_basis=none");
                }
            }
            let m = run.run.m();
            (run.run.recovered, reductions::direct(&inst, jobs).map_err(invalid)?, m)
        }
    };
    let _ = writeln!(out, "occurrences={m}");
    let _ = writeln!(out, "recovered={recovered}");
    let _ = writeln!(out, "direct={direct}");
    let ok = recovered == direct;
    let _ = writeln!(out, "match={ok}");
    if !ok {
        return Err(CliError::Invariant("recovered value differs from direct substitution".into()));
    }
    Ok(())
}

fn harness_square(f: &SixVertexSignature, out: &mut String) -> Result<()> {
    let g = square_gadget(f);
    let _ = writeln!(out, "input={f}");
    match g.to_six() {
        Some(s) => {
            let _ = writeln!(out, "gadget={s}");
        }
        None => {
            let _ = writeln!(out, "gadget=quad {g}");
        }
    }
    // closed form for (1, b, 0, +-1, b, 0)
    let one = Scalar::one();
    let family = f.a.is_one()
        && f.c.is_zero()
        && f.z.is_zero()
        && f.b == f.y
        && (f.x.is_one() || f.x == -one.clone());
    if family {
        let outer = &one + &f.b.pow(4);
        let inner = Scalar::from_i64(2) * f.b.pow(3);
        let want = SixVertexSignature::new(
            outer.clone(),
            inner.clone(),
            Scalar::zero(),
            &f.x * &outer,
            inner,
            Scalar::zero(),
        );
        let ok = g.to_six().as_ref() == Some(&want);
        let _ = writeln!(out, "expected={want}");
        let _ = writeln!(out, "match={ok}");
        if !ok {
            return Err(CliError::Invariant("square gadget disagrees with 1+b^4, 2b^3".into()));
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// audit-loops, mobius, sweep

fn cmd_audit(inst: &PlanarInstance, out: &mut String) -> Result<()> {
    let dec = loopspace::decompose_map(&inst.map).map_err(invalid)?;
    for (i, c) in dec.circuits.iter().enumerate() {
        let ins: Vec<String> = c.ins.iter().map(|h| format!("h{h}")).collect();
        let _ = writeln!(out, "circuit{i}={}", ins.join(" "));
    }
    for (v, r) in dec.records.iter().enumerate() {
        let _ = writeln!(out, "vertex{v}={r:?}");
    }
    let report = loopspace::entry_exit_audit(&dec).map_err(|e| CliError::Invariant(e.to_string()))?;
    let _ = writeln!(out, "circuits={}", report.circuits);
    let _ = writeln!(out, "self_intersections={}", report.self_intersections);
    for (&(i, j), &(k, l)) in &report.pairs {
        let _ = writeln!(out, "pair{i}_{j}=entries:{k} exits:{l}");
    }
    let _ = writeln!(out, "balanced={}", report.balanced());
    if let Some(sixes) = six_labels(inst) {
        if sixes.iter().all(|f| f.c.is_zero() && f.z.is_zero()) {
            let csp = loopspace::induced_csp(inst, &dec).map_err(invalid)?;
            for (&(i, j), g) in &csp.pairs {
                let _ = writeln!(out, "table{i}_{j}={g}");
            }
            for (&i, h) in &csp.singles {
                let _ = writeln!(out, "table{i}={},{}", h[0], h[1]);
            }
        }
    }
    Ok(())
}

fn describe_map(out: &mut String, key: &str, phi: &MobiusTransform, a: &MobiusArgs) -> Result<()> {
    let _ = writeln!(out, "{key}_map={phi}");
    let _ = writeln!(out, "{key}_det={}", phi.det());
    match unit_circle_form(phi) {
        Some(CircleForm::Blaschke { alpha, u }) => {
            let _ = writeln!(out, "{key}_circle_form=blaschke alpha={alpha} u={u}");
        }
        Some(CircleForm::Inversion { u }) => {
            let _ = writeln!(out, "{key}_circle_form=inversion u={u}");
        }
        None => {
            let _ = writeln!(out, "{key}_circle_form=none");
        }
    }
    let _ = writeln!(out, "{key}_order={}", order(phi));
    if let Some(count) = a.iterate {
        let t0 = if a.start.trim() == "inf" {
            Point::Infinity
        } else {
            Point::Finite(a.start.trim().parse::<Scalar>().map_err(invalid)?)
        };
        let orbit = iterate_distinct(phi, &t0, count);
        for (k, p) in orbit.values.iter().enumerate() {
            let _ = writeln!(out, "{key}_iterate{}={p}", k + 1);
        }
        let _ = writeln!(
            out,
            "{key}_period={}",
            orbit.period.map_or("none".to_string(), |p| p.to_string())
        );
        let _ = writeln!(
            out,
            "{key}_pole_at={}",
            orbit.pole_at.map_or("none".to_string(), |p| p.to_string())
        );
    }
    Ok(())
}

fn cmd_mobius(a: &MobiusArgs, out: &mut String) -> Result<()> {
    if let Some(s) = &a.source.from_signature {
        let f = parse_six(s)?;
        let _ = writeln!(out, "signature={f}");
        for (key, which) in [("inner", Which::Inner), ("cross", Which::Cross)] {
            match from_signature(&f, which) {
                Ok(phi) => describe_map(out, key, &phi, a)?,
                Err(e) => {
                    let _ = writeln!(out, "{key}_map=none ({e})");
                }
            }
        }
        return Ok(());
    }
    let coeffs = parse_scalars(a.source.map.as_deref().unwrap_or_default()).map_err(invalid)?;
    let [p, q, r, s]: [Scalar; 4] = coeffs
        .try_into()
        .map_err(|_| invalid("--map expects four coefficients a,b,c,d"))?;
    let phi = MobiusTransform::new(p, q, r, s).map_err(invalid)?;
    describe_map(out, "phi", &phi, a)
}

fn witness_names(v: &Verdict) -> String {
    if v.witnesses.is_empty() {
        "-".to_string()
    } else {
        v.witnesses.iter().map(|c| c.name()).collect::<Vec<_>>().join(",")
    }
}

fn cmd_sweep(a: &SweepArgs, out: &mut String) -> Result<()> {
    if a.p == a.q {
        return Err(invalid("--p and --q must differ"));
    }
    let base = parse_six(&a.base)?;
    let values = parse_scalars(&a.values).map_err(invalid)?;
    let name = |p: Param| format!("{p:?}").to_lowercase();
    let _ = writeln!(out, "{}\t{}\tplanar_class\tgeneral_class\tcase\twitnesses", name(a.p), name(a.q));
    for vp in &values {
        for vq in &values {
            let mut e = base.values();
            e[a.p.index()] = vp.clone();
            e[a.q.index()] = vq.clone();
            let v = classify(&SixVertexSignature::from_values(e));
            let _ = writeln!(
                out,
                "{vp}\t{vq}\t{:?}\t{:?}\t{:?}\t{}",
                v.planar_class,
                v.general_class,
                v.case_tag,
                witness_names(&v)
            );
        }
    }
    Ok(())
}
