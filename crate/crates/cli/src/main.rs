//! Command-line front end: build or load a triangulated surface, run the
//! torus-matrix pipeline, and emit machine-readable verification reports.

use std::io::Write;
use std::path::PathBuf;
use std::sync::Mutex;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use skein_tori::amatrix::{
    p_matrices, reduced_blocks, reduced_matrices, verify_block_lemmas_seeded, AMatrices,
    BlockReport, ReducedMatrices,
};
use skein_tori::center::{
    center_lattice, center_lattice_reduced, quotient_checks, quotient_checks_reduced, rank_report,
    root_params, CenterReport, QuotientCheck, RootParams,
};
use skein_tori::matrix::IntMat;
use skein_tori::surface::{
    annulus, attach_triangles, build_mu, genus_one_boundary, load_triangulation, polygon,
    InteriorChoice, Surface, Triangulation,
};
use skein_tori::zlattice::{skew_normal_form, snf_invariants, PivotRule};

#[derive(Parser)]
#[command(name = "skein-tori", version, about = "Quantum-torus matrices, centers and PI-degree data for triangulated punctured bordered surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline for one case and emit a report.
    Analyze(AnalyzeArgs),
    /// Run a parameter grid and emit one row per case.
    Batch(BatchArgs),
    /// Run the verification battery over the builtin surface zoo.
    Verify(VerifyArgs),
    /// Antisymmetric normal form of a matrix read from a file.
    Skewnf(SkewArgs),
    /// Dump the torus matrices of a case.
    EmitMatrices(EmitArgs),
}

#[derive(Args)]
struct SurfaceArgs {
    /// Builtin surface: polygon:K, annulus:R1,R2 or genus:G,R.
    #[arg(long)]
    builtin: Option<String>,
    /// Triangulation spec file (JSON, schema 1).
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    #[arg(long)]
    n: u32,
    /// Order of the square of the quantum parameter.
    #[arg(long)]
    order: u64,
    /// Use the special boundary-ear triangulation and the reduced matrices.
    #[arg(long)]
    reduced: bool,
    /// Seed for sampled checks on large instances.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BatchArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    /// Comma-separated list of n values.
    #[arg(long, default_value = "2,3")]
    n: String,
    /// Orders: comma-separated values and A..B ranges.
    #[arg(long, default_value = "2..12")]
    order: String,
    #[arg(long)]
    reduced: bool,
    /// Seed for sampled checks on large instances.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Smaller grid for a quick pass.
    #[arg(long)]
    quick: bool,
}

#[derive(Args)]
struct SkewArgs {
    /// File with one row of decimal integers per line ('#' lines ignored).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EmitArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    #[arg(long)]
    n: u32,
    #[arg(long)]
    reduced: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Batch(args) => batch(args),
        Command::Verify(args) => verify(args),
        Command::Skewnf(args) => skewnf(args),
        Command::EmitMatrices(args) => emit_matrices(args),
    }
}

// ---------------------------------------------------------------------------
// Surface selection
// ---------------------------------------------------------------------------

fn parse_builtin(spec: &str) -> anyhow::Result<Triangulation> {
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| anyhow!("builtin must look like polygon:K, annulus:R1,R2 or genus:G,R"))?;
    let nums: Vec<usize> = rest
        .split(',')
        .map(|x| x.trim().parse::<usize>().context("bad number in builtin"))
        .collect::<anyhow::Result<_>>()?;
    let tri = match (kind, nums.as_slice()) {
        ("polygon", [k]) => polygon(*k),
        ("annulus", [r1, r2]) => annulus(*r1, *r2),
        ("genus", [g, r]) => genus_one_boundary(*g, *r),
        _ => bail!("unknown builtin {spec}"),
    };
    tri.map_err(|e| anyhow!("{e}"))
}

fn load_surface(args: &SurfaceArgs) -> anyhow::Result<Triangulation> {
    match (&args.builtin, &args.spec) {
        (Some(b), None) => parse_builtin(b),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read {}", path.display()))?;
            load_triangulation(&text).map_err(|e| anyhow!("{e}"))
        }
        _ => bail!("exactly one of --builtin or --spec is required"),
    }
}

fn write_out(output: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            if !text.ends_with('\n') {
                stdout.write_all(b"\n")?;
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct AnalyzeReport {
    schema: u32,
    command: &'static str,
    surface: Surface,
    n: u32,
    order: u64,
    reduced: bool,
    params: RootParams,
    blocks: BlockReport,
    center: CenterReport,
    quotients: Vec<QuotientCheck>,
    pass: bool,
}

struct Prepared {
    tri: Triangulation,
    ext: Option<(skein_tori::surface::ExtendedTriangulation, AMatrices)>,
    red: Option<(skein_tori::surface::MuTriangulation, ReducedMatrices)>,
}

fn prepare(tri: Triangulation, n: u32, reduced: bool) -> anyhow::Result<Prepared> {
    if reduced {
        let mu =
            build_mu(tri.surface(), InteriorChoice::Fan).map_err(|e| anyhow!("{e}"))?;
        let rm = reduced_matrices(&mu, n).map_err(|e| anyhow!("{e}"))?;
        Ok(Prepared { tri, ext: None, red: Some((mu, rm)) })
    } else {
        let ext = attach_triangles(&tri).map_err(|e| anyhow!("{e}"))?;
        let am = p_matrices(&ext, n).map_err(|e| anyhow!("{e}"))?;
        Ok(Prepared { tri, ext: Some((ext, am)), red: None })
    }
}

fn analyze_case(
    prep: &Prepared,
    n: u32,
    order: u64,
    reduced: bool,
    seed: u64,
) -> anyhow::Result<AnalyzeReport> {
    let params = root_params(n, order).map_err(|e| anyhow!("{e}"))?;
    let (blocks, center, quotients, surface);
    if reduced {
        let (mu, rm) = prep.red.as_ref().unwrap();
        surface = mu.tri.surface().clone();
        blocks = reduced_blocks(mu, rm).map_err(|e| anyhow!("{e}"))?;
        let cl = center_lattice_reduced(mu, rm, &params).map_err(|e| anyhow!("{e}"))?;
        center = rank_report(&surface, &rm.bar.pbar, &params, true, &cl)
            .map_err(|e| anyhow!("{e}"))?;
        quotients = quotient_checks_reduced(mu, rm, &params).map_err(|e| anyhow!("{e}"))?;
    } else {
        let (ext, am) = prep.ext.as_ref().unwrap();
        surface = prep.tri.surface().clone();
        blocks = verify_block_lemmas_seeded(ext, am, seed).map_err(|e| anyhow!("{e}"))?;
        let cl = center_lattice(ext, am, &params).map_err(|e| anyhow!("{e}"))?;
        center =
            rank_report(&surface, &am.p, &params, false, &cl).map_err(|e| anyhow!("{e}"))?;
        quotients = quotient_checks(ext, am, &params).map_err(|e| anyhow!("{e}"))?;
    }
    let pass = blocks.all_pass()
        && center.rank_equal_ab
        && center.rank_equal_c.unwrap_or(true)
        && center.z_equal.unwrap_or(true)
        && center.center_equal.unwrap_or(true)
        && quotients.iter().all(|q| q.pass.unwrap_or(true));
    Ok(AnalyzeReport {
        schema: 1,
        command: "analyze",
        surface,
        n,
        order,
        reduced,
        params,
        blocks,
        center,
        quotients,
        pass,
    })
}

fn analyze(args: AnalyzeArgs) -> anyhow::Result<i32> {
    let tri = load_surface(&args.surface)?;
    let prep = prepare(tri, args.n, args.reduced)?;
    let report = analyze_case(&prep, args.n, args.order, args.reduced, args.seed)?;
    let text = serde_json::to_string_pretty(&report)?;
    write_out(&args.output, &text)?;
    Ok(if report.pass { 0 } else { 1 })
}

// ---------------------------------------------------------------------------
// batch
// ---------------------------------------------------------------------------

fn parse_list(text: &str) -> anyhow::Result<Vec<u64>> {
    let mut out = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.parse().context("bad range start")?;
            let b: u64 = b.parse().context("bad range end")?;
            out.extend(a..=b);
        } else {
            out.push(part.parse().context("bad list entry")?);
        }
    }
    Ok(out)
}

#[derive(Serialize, Clone)]
struct BatchRow {
    surface: String,
    n: u32,
    order: u64,
    reduced: bool,
    case: String,
    rank_kernel: String,
    rank_skew: String,
    rank_closed: Option<String>,
    rank_equal_ab: bool,
    rank_equal_closed: Option<bool>,
    center_equal: Option<bool>,
    z_equal: Option<bool>,
    blocks_pass: bool,
    error: Option<String>,
}

fn batch(args: BatchArgs) -> anyhow::Result<i32> {
    let ns: Vec<u32> = parse_list(&args.n)?.into_iter().map(|x| x as u32).collect();
    let orders = parse_list(&args.order)?;
    if ns.len() * orders.len() > 10_000 {
        bail!("grid too large (more than 10000 cases)");
    }
    let tri = load_surface(&args.surface)?;
    let surface_name = args
        .surface
        .builtin
        .clone()
        .unwrap_or_else(|| format!("spec:{}", args.surface.spec.as_ref().unwrap().display()));

    // One prepared pipeline per n, rows over (n, order).
    let mut rows: Vec<BatchRow> = Vec::new();
    for &n in &ns {
        let prep = prepare(tri.clone(), n, args.reduced)?;
        let jobs: Vec<u64> = orders.clone();
        let results: Mutex<Vec<(usize, BatchRow)>> = Mutex::new(Vec::new());
        let next = std::sync::atomic::AtomicUsize::new(0);
        let workers = thread_count().min(jobs.len().max(1));
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let idx = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    if idx >= jobs.len() {
                        break;
                    }
                    let order = jobs[idx];
                    let row = match analyze_case(&prep, n, order, args.reduced, args.seed) {
                        Ok(rep) => BatchRow {
                            surface: surface_name.clone(),
                            n,
                            order,
                            reduced: args.reduced,
                            case: rep.params.case.as_str().to_string(),
                            rank_kernel: rep.center.rank_kernel.clone(),
                            rank_skew: rep.center.rank_skew.clone(),
                            rank_closed: rep.center.rank_closed.clone(),
                            rank_equal_ab: rep.center.rank_equal_ab,
                            rank_equal_closed: rep.center.rank_equal_c,
                            center_equal: rep.center.center_equal,
                            z_equal: rep.center.z_equal,
                            blocks_pass: rep.blocks.all_pass(),
                            error: None,
                        },
                        Err(e) => BatchRow {
                            surface: surface_name.clone(),
                            n,
                            order,
                            reduced: args.reduced,
                            case: String::new(),
                            rank_kernel: String::new(),
                            rank_skew: String::new(),
                            rank_closed: None,
                            rank_equal_ab: false,
                            rank_equal_closed: None,
                            center_equal: None,
                            z_equal: None,
                            blocks_pass: false,
                            error: Some(e.to_string()),
                        },
                    };
                    results.lock().unwrap().push((idx, row));
                });
            }
        });
        let mut batch_rows = results.into_inner().unwrap();
        batch_rows.sort_by_key(|(i, _)| *i);
        rows.extend(batch_rows.into_iter().map(|(_, r)| r));
    }

    let ok = rows.iter().all(|r| {
        r.error.is_none()
            && r.rank_equal_ab
            && r.rank_equal_closed.unwrap_or(true)
            && r.center_equal.unwrap_or(true)
            && r.z_equal.unwrap_or(true)
            && r.blocks_pass
    });
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&serde_json::json!({
            "schema": 1,
            "command": "batch",
            "rows": rows,
        }))?,
        Format::Csv => {
            let mut s = String::from(
                "surface,n,order,reduced,case,rank_kernel,rank_skew,rank_closed,rank_equal_ab,rank_equal_closed,center_equal,z_equal,blocks_pass,error\n",
            );
            for r in &rows {
                let opt_b = |x: Option<bool>| x.map(|v| v.to_string()).unwrap_or_default();
                s.push_str(&format!(
                    "{},{},{},{},\"{}\",{},{},{},{},{},{},{},{},{}\n",
                    r.surface,
                    r.n,
                    r.order,
                    r.reduced,
                    r.case,
                    r.rank_kernel,
                    r.rank_skew,
                    r.rank_closed.clone().unwrap_or_default(),
                    r.rank_equal_ab,
                    opt_b(r.rank_equal_closed),
                    opt_b(r.center_equal),
                    opt_b(r.z_equal),
                    r.blocks_pass,
                    r.error.clone().unwrap_or_default(),
                ));
            }
            s
        }
    };
    write_out(&args.output, &text)?;
    Ok(if ok { 0 } else { 1 })
}

fn thread_count() -> usize {
    std::env::var("SKEIN_TORI_THREADS")
        .ok()
        .and_then(|x| x.parse::<usize>().ok())
        .filter(|&x| x >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism().map(|x| x.get()).unwrap_or(1)
        })
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn verify(args: VerifyArgs) -> anyhow::Result<i32> {
    let mut zoo: Vec<(String, Triangulation)> = Vec::new();
    for k in 3..=6 {
        zoo.push((format!("polygon:{k}"), polygon(k).map_err(|e| anyhow!("{e}"))?));
    }
    let annuli: &[(usize, usize)] =
        if args.quick { &[(1, 1), (2, 2)] } else { &[(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)] };
    for &(r1, r2) in annuli {
        zoo.push((format!("annulus:{r1},{r2}"), annulus(r1, r2).map_err(|e| anyhow!("{e}"))?));
    }
    for r in 1..=2 {
        zoo.push((format!("genus:1,{r}"), genus_one_boundary(1, r).map_err(|e| anyhow!("{e}"))?));
    }
    let ns: Vec<u32> = if args.quick { vec![2] } else { vec![2, 3] };
    let orders: Vec<u64> = if args.quick { vec![2, 4, 6] } else { (2..=12).collect() };
    let mut failures = 0u32;
    for (name, tri) in &zoo {
        for &n in &ns {
            for reduced in [false, true] {
                let prep = prepare(tri.clone(), n, reduced)?;
                for &order in &orders {
                    let rep = analyze_case(&prep, n, order, reduced, 0)?;
                    let status = if rep.pass { "pass" } else { "FAIL" };
                    if !rep.pass {
                        failures += 1;
                    }
                    println!(
                        "{status} {name} n={n} order={order}{}: case {}",
                        if reduced { " reduced" } else { "" },
                        rep.params.case.as_str()
                    );
                }
            }
        }
    }
    if failures > 0 {
        eprintln!("{failures} case(s) failed");
        return Ok(1);
    }
    println!("all cases pass");
    Ok(0)
}

// ---------------------------------------------------------------------------
// skewnf
// ---------------------------------------------------------------------------

fn skewnf(args: SkewArgs) -> anyhow::Result<i32> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("cannot read {}", args.input.display()))?;
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Vec<i64> = line
            .split_whitespace()
            .map(|x| x.parse::<i64>().context("bad matrix entry"))
            .collect::<anyhow::Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("empty matrix");
    }
    let p = IntMat::from_rows(&rows);
    let dec = skew_normal_form(&p, PivotRule::MinAbs).map_err(|e| anyhow!("{e}"))?;
    let smith = snf_invariants(&p);
    let out = serde_json::json!({
        "schema": 1,
        "command": "skewnf",
        "size": p.nrows(),
        "h": dec.h.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "zeros": dec.zeros,
        "transform_det": dec.x.det().to_string(),
        "transform": (0..dec.x.nrows())
            .map(|i| dec.x.row(i).iter().map(|v| v.to_string()).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
        "smith_invariants": smith.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
        "verified": dec.x.transpose().mul(&p).mul(&dec.x) == dec.normal_form(),
    });
    write_out(&args.output, &serde_json::to_string_pretty(&out)?)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// emit-matrices
// ---------------------------------------------------------------------------

fn emit_matrices(args: EmitArgs) -> anyhow::Result<i32> {
    let tri = load_surface(&args.surface)?;
    let mut out = String::new();
    if args.reduced {
        let mu = build_mu(tri.surface(), InteriorChoice::Fan).map_err(|e| anyhow!("{e}"))?;
        let rm = reduced_matrices(&mu, args.n).map_err(|e| anyhow!("{e}"))?;
        let labels: Vec<String> =
            rm.sets.vbar.iter().map(|&v| rm.sets.table.label(v)).collect();
        out.push_str(&rm.bar.qbar.dump("qbar", &labels, &labels));
        out.push_str(&rm.bar.hbar.dump("hbar", &labels, &labels));
        out.push_str(&rm.bar.kbar.dump("kbar", &labels, &labels));
        out.push_str(&rm.bar.pbar.dump("pbar", &labels, &labels));
        out.push_str(&rm.bar.kqbar.dump("kbar_qbar", &labels, &labels));
    } else {
        let ext = attach_triangles(&tri).map_err(|e| anyhow!("{e}"))?;
        let am = p_matrices(&ext, args.n).map_err(|e| anyhow!("{e}"))?;
        let lab = |ids: &[usize]| -> Vec<String> {
            ids.iter().map(|&v| am.sets.table.label(v)).collect()
        };
        let vbar = lab(&am.sets.vbar);
        let vx = lab(&am.sets.v_x);
        let va = lab(&am.sets.v_a);
        out.push_str(&am.qbar_star.dump("qbar_ext", &vbar, &vbar));
        out.push_str(&am.hbar_star.dump("hbar_ext", &vbar, &vbar));
        out.push_str(&am.kbar_star.dump("kbar_ext", &vbar, &vbar));
        out.push_str(&am.q.dump("q", &vx, &vx));
        out.push_str(&am.h.dump("h", &vx, &va));
        out.push_str(&am.k.dump("k", &va, &vx));
        out.push_str(&am.kq.dump("kq", &va, &vx));
        out.push_str(&am.p.dump("p", &va, &va));
    }
    write_out(&args.output, &out)?;
    Ok(0)
}
