use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use friezes::bci::{bci_lattice, check_bijection, check_isomorphism, order_ideals, poset_dot, poset_q};
use friezes::expansion::{
    laurent_of_bracelet, laurent_of_value, BraceletEngine, Engine, ExpandOptions, ExpansionError,
};
use friezes::frieze::{
    chebyshev_apply, complement_differences, frieze_quiddity, integer_frieze, laurent_frieze, laurent_growth,
    parse_quiddity, specialize_grid, verify_arithmetic, verify_diamond, verify_n_arithmetic, verify_progression,
    FriezeError, FriezeGrid, Report,
};
use friezes::laurent::LaurentPoly;
use friezes::surface::{ArcSpec, ArcValue, Side, Surface, Triangulation};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Parser)]
#[command(name = "friezes", version, about = "Friezes and Laurent expansions from triangulated surfaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print a frieze window.
    #[command(subcommand)]
    Frieze(FriezeCmd),
    /// Expand an arc or a bracelet as a Laurent polynomial.
    #[command(subcommand)]
    Expand(ExpandCmd),
    /// Run an identity check; exits 1 on failure.
    Verify(VerifyArgs),
    /// Export the lattice of BCI tuples of an arc.
    Lattice {
        #[command(flatten)]
        arc: ArcArgs,
        #[arg(long, value_enum, default_value_t = LatticeOut::Dot)]
        out: LatticeOut,
    },
    /// Export the polygon cover of an arc.
    Cover {
        #[command(flatten)]
        arc: ArcArgs,
        #[arg(long, value_enum, default_value_t = CoverOut::Json)]
        out: CoverOut,
    },
}

#[derive(Subcommand)]
enum FriezeCmd {
    /// Integer frieze from a quiddity sequence.
    Integer {
        #[arg(long)]
        quiddity: String,
        #[arg(long)]
        rows: usize,
        /// Window width; defaults to the period.
        #[arg(long)]
        cols: Option<usize>,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        first: i64,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
    /// Laurent frieze of a triangulated surface.
    Laurent {
        #[arg(long)]
        triangulation: PathBuf,
        #[arg(long, value_enum, default_value_t = Boundary::Outer)]
        boundary: Boundary,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        cols: usize,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        first: i64,
        #[arg(long)]
        keep_boundary: bool,
        /// Print the frieze with every variable set to 1.
        #[arg(long)]
        specialize: bool,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
    },
}

#[derive(Subcommand)]
enum ExpandCmd {
    /// Expansion of the generalized arc from `--from` to `--to` at `--level`.
    Arc {
        #[command(flatten)]
        arc: ArcArgs,
        #[arg(long, value_enum, default_value_t = EngineArg::Matching)]
        engine: EngineArg,
        #[arg(long)]
        keep_boundary: bool,
        #[arg(long, value_enum, default_value_t = TextOut::Text)]
        format: TextOut,
    },
    /// Expansion of the k-bracelet.
    Bracelet {
        #[arg(long)]
        triangulation: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t = BraceletArg::Band)]
        engine: BraceletArg,
        #[arg(long, value_enum, default_value_t = TextOut::Text)]
        format: TextOut,
    },
}

#[derive(Args)]
struct ArcArgs {
    #[arg(long)]
    triangulation: PathBuf,
    #[arg(long)]
    from: i64,
    #[arg(long)]
    to: i64,
    #[arg(long, default_value_t = 1)]
    level: u32,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    check: Check,
    #[arg(long)]
    triangulation: PathBuf,
    #[arg(long)]
    from: Option<i64>,
    #[arg(long)]
    to: Option<i64>,
    #[arg(long)]
    level: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Seed for the sampled part of randomized suites.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sampled arcs in randomized suites.
    #[arg(long, default_value_t = 16)]
    samples: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Check {
    Diamond,
    Progression,
    Growth,
    ComplementDiff,
    Arithmetic,
    Bijection,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Tsv,
    Json,
    Latex,
}

#[derive(Clone, Copy, ValueEnum)]
enum TextOut {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Boundary {
    Outer,
    Inner,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Matching,
    Tpath,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum BraceletArg {
    Band,
    Chebyshev,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeOut {
    Dot,
    Json,
    PosetDot,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoverOut {
    Json,
}

enum Failure {
    Input(String),
    Check(String),
}

impl From<FriezeError> for Failure {
    fn from(e: FriezeError) -> Self {
        match e {
            FriezeError::Expansion(ExpansionError::Disagree(m)) => Failure::Check(m),
            e => Failure::Input(e.to_string()),
        }
    }
}

impl From<ExpansionError> for Failure {
    fn from(e: ExpansionError) -> Self {
        FriezeError::from(e).into()
    }
}

impl From<friezes::surface::SurfaceError> for Failure {
    fn from(e: friezes::surface::SurfaceError) -> Self {
        Failure::Input(e.to_string())
    }
}

type Out = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Check(text)) => {
            print!("{text}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Cmd) -> Out {
    match cmd {
        Cmd::Frieze(FriezeCmd::Integer { quiddity, rows, cols, first, format }) => {
            let q = parse_quiddity(&quiddity)?;
            let g = integer_frieze(&q, rows, first, cols.unwrap_or(q.len()))?;
            Ok(render(&g, format))
        }
        Cmd::Frieze(FriezeCmd::Laurent { triangulation, boundary, rows, cols, first, keep_boundary, specialize, format }) => {
            let t = load(&triangulation)?;
            let opts = ExpandOptions { engine: Engine::Matching, keep_boundary };
            let g = laurent_frieze(&t, side(boundary), rows, first, cols, opts)?;
            Ok(if specialize { render(&specialize_grid(&g), format) } else { render(&g, format) })
        }
        Cmd::Expand(ExpandCmd::Arc { arc, engine, keep_boundary, format }) => {
            let t = load(&arc.triangulation)?;
            let spec = ArcSpec::new(arc.from, arc.to, arc.level, t.n())?;
            let engine = match engine {
                EngineArg::Matching => Engine::Matching,
                EngineArg::Tpath => Engine::TPath,
                EngineArg::Both => Engine::Both,
            };
            let p = laurent_of_value(&t, spec.value(t.n()), ExpandOptions { engine, keep_boundary })?;
            let note = (engine == Engine::Both).then_some("matching and T-path engines agree");
            Ok(expansion_output(&p, Some(spec.value(t.n())), note, format))
        }
        Cmd::Expand(ExpandCmd::Bracelet { triangulation, k, engine, format }) => {
            let t = load(&triangulation)?;
            let engine = match engine {
                BraceletArg::Band => BraceletEngine::Band,
                BraceletArg::Chebyshev => BraceletEngine::Chebyshev,
                BraceletArg::Both => BraceletEngine::Both,
            };
            let p = laurent_of_bracelet(&t, k, engine)?;
            let note = (engine == BraceletEngine::Both).then_some("band graph and Chebyshev agree");
            Ok(expansion_output(&p, None, note, format))
        }
        Cmd::Verify(args) => verify(args),
        Cmd::Lattice { arc, out } => {
            let (t, s, e) = arc_lift(&arc)?;
            let cover = t.polygon_cover(s, e)?;
            let lattice = bci_lattice(&cover);
            let arrows = poset_q(&cover);
            let d = cover.diagonals.len();
            Ok(match out {
                LatticeOut::Dot => lattice.to_dot(&cover),
                LatticeOut::PosetDot => poset_dot(d, &arrows),
                LatticeOut::Json => {
                    let doc = serde_json::json!({
                        "lattice": lattice.to_json(&cover),
                        "poset": {
                            "elements": d,
                            "arrows": arrows,
                            "order_ideals": order_ideals(d, &arrows).len(),
                        },
                        "isomorphic": check_isomorphism(&cover, &lattice).is_ok(),
                    });
                    pretty(&doc)
                }
            })
        }
        Cmd::Cover { arc, out: CoverOut::Json } => {
            let (t, s, e) = arc_lift(&arc)?;
            let cover = t.polygon_cover(s, e)?;
            let mut doc = serde_json::to_value(&cover).map_err(|e| Failure::Input(e.to_string()))?;
            doc["labels"] = serde_json::json!(cover.edges.iter().map(|&(_, _, v)| t.label(v)).collect::<Vec<_>>());
            Ok(pretty(&doc))
        }
    }
}

fn load(path: &Path) -> Result<Triangulation, Failure> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    Triangulation::from_json(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn side(b: Boundary) -> Side {
    match b {
        Boundary::Outer => Side::Outer,
        Boundary::Inner => Side::Inner,
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn render<V: friezes::frieze::Entry>(g: &FriezeGrid<V>, format: Format) -> String {
    match format {
        Format::Tsv => g.to_tsv(),
        Format::Json => pretty(&g.to_json()),
        Format::Latex => g.to_latex(),
    }
}

fn expansion_output(p: &LaurentPoly, v: Option<ArcValue>, note: Option<&str>, format: TextOut) -> String {
    match format {
        TextOut::Text => {
            let mut s = format!("{}\n", p.canonical_text());
            if let Some(n) = note {
                s.push_str(&format!("# {n}\n"));
            }
            s
        }
        TextOut::Json => {
            let mut doc = serde_json::json!({
                "text": p.canonical_text(),
                "laurent": p.to_json(),
                "specialized": p.specialize_all().to_string(),
                "note": note,
            });
            if let Some(ArcValue::Lift(s, t)) = v {
                doc["lift"] = serde_json::json!([s, t]);
            }
            pretty(&doc)
        }
    }
}

fn arc_lift(arc: &ArcArgs) -> Result<(Triangulation, i64, i64), Failure> {
    let t = load(&arc.triangulation)?;
    let spec = ArcSpec::new(arc.from, arc.to, arc.level, t.n())?;
    match spec.value(t.n()) {
        ArcValue::Lift(s, e) => Ok((t, s, e)),
        _ => Err(Failure::Input("the arc is empty".into())),
    }
}

/// Endpoint pairs from the flags, or every pair in the first period.
fn pairs(args: &VerifyArgs, n: i64) -> Result<Vec<(i64, i64)>, Failure> {
    match (args.from, args.to) {
        (Some(i), Some(j)) => Ok(vec![(i, j)]),
        (None, None) => Ok((1..=n).flat_map(|i| (1..=n).map(move |j| (i, j))).collect()),
        _ => Err(Failure::Input("--from and --to go together".into())),
    }
}

fn sides(t: &Triangulation) -> Vec<Side> {
    match t.surface() {
        Surface::Annulus { .. } => vec![Side::Outer, Side::Inner],
        _ => vec![Side::Outer],
    }
}

fn verify(args: VerifyArgs) -> Out {
    let t = load(&args.triangulation)?;
    let n = t.n();
    let opts = ExpandOptions::default();
    let mut report = Report::new(match args.check {
        Check::Diamond => "diamond",
        Check::Progression => "progression",
        Check::Growth => "growth",
        Check::ComplementDiff => "complement-diff",
        Check::Arithmetic => "arithmetic",
        Check::Bijection => "bijection",
    });
    match args.check {
        Check::Diamond => {
            for sd in sides(&t) {
                let period = match sd {
                    Side::Outer => n,
                    Side::Inner => t.reflected()?.n(),
                } as usize;
                let cap = if t.is_polygon() { period } else { usize::MAX };
                let rows = args.rows.unwrap_or(3 * period).min(cap);
                let cols = args.cols.unwrap_or(2 * period);
                let g = laurent_frieze(&t, sd, rows, 1, cols, opts)?;
                report.merge(verify_diamond(&g));
                let int_rows = if t.is_polygon() { rows.min(period - 1) } else { rows };
                let ints = integer_frieze(&frieze_quiddity(&t, sd)?, int_rows, 1, cols)?;
                let spec = specialize_grid(&g);
                let mut sp = Report::new("specialization");
                for (k, v) in &ints.entries {
                    let w = spec.entries.get(k);
                    sp.checked += 1;
                    if w != Some(v) {
                        sp.failures.push(format!("F{k:?}: integer {v}, specialized {w:?}"));
                    }
                }
                report.merge(sp);
            }
        }
        Check::Progression => {
            need_bracelets(&t)?;
            let ks: Vec<u32> = args.level.map_or((2..=4).collect(), |k| vec![k]);
            for (i, j) in pairs(&args, n)? {
                for &k in &ks {
                    let ms: Vec<u32> = args.m.map_or((1..k).collect(), |m| vec![m]);
                    for m in ms {
                        report.merge(verify_progression(&t, i, j, k, m, opts)?);
                    }
                }
            }
        }
        Check::Growth => {
            need_bracelets(&t)?;
            let kmax = args.level.unwrap_or(3);
            for sd in sides(&t) {
                let s = laurent_growth(&t, kmax as usize, sd, opts)?;
                let mut r = Report::new(match sd {
                    Side::Outer => "outer growth",
                    Side::Inner => "inner growth",
                });
                let s1 = s[1].specialize_all();
                for k in 1..=kmax {
                    let brac = laurent_of_bracelet(&t, k, BraceletEngine::Both)?;
                    let sk = &s[k as usize];
                    r.checked += 2;
                    if *sk != brac {
                        r.failures.push(format!("s_{k}: {} != {}", sk.canonical_text(), brac.canonical_text()));
                    }
                    if sk.specialize_all() != chebyshev_apply(k, &s1) {
                        r.failures.push(format!("s_{k} = {} but T_{k}(s_1) = {}", sk.specialize_all(), chebyshev_apply(k, &s1)));
                    }
                }
                report.merge(r);
            }
        }
        Check::ComplementDiff => {
            need_bracelets(&t)?;
            let kmax = args.level.unwrap_or(3);
            let disk = matches!(t.surface(), Surface::PuncturedDisk { .. });
            for (i, j) in pairs(&args, n)? {
                let c = complement_differences(&t, i, j, kmax, opts)?;
                if disk {
                    let mut r = Report::new("constant differences");
                    for (k, ck) in c.c.iter().enumerate() {
                        r.checked += 1;
                        if *ck != c.c[0] {
                            r.failures.push(format!("c_{} != c_1 for ({i},{j})", k + 1));
                        }
                    }
                    report.merge(r);
                }
                report.merge(c.report);
            }
        }
        Check::Arithmetic => {
            let kmax = args.level.unwrap_or(4);
            for (i, j) in pairs(&args, n)? {
                report.merge(verify_arithmetic(&t, i, j, kmax, opts)?);
            }
            let rows = (kmax as usize + 1) * n as usize;
            let g = integer_frieze(&frieze_quiddity(&t, Side::Outer)?, rows, 1, n as usize)?;
            report.merge(verify_n_arithmetic(&g, kmax as usize));
        }
        Check::Bijection => {
            let mut arcs = vec![];
            match (args.from, args.to) {
                (Some(i), Some(j)) => {
                    if let ArcValue::Lift(s, e) = ArcSpec::new(i, j, args.level.unwrap_or(1), n)?.value(n) {
                        arcs.push((s, e));
                    }
                }
                _ => {
                    arcs = short_lifts(&t, 8)?;
                    let mut rng = StdRng::seed_from_u64(args.seed);
                    let longest = if t.is_polygon() { n - 1 } else { 4 * n };
                    for _ in 0..args.samples {
                        let s = rng.gen_range(1..=n);
                        let len = rng.gen_range(2..=longest.max(2));
                        if t.crossing(s, s + len)?.diagonals.len() <= 12 {
                            arcs.push((s, s + len));
                        }
                    }
                }
            }
            for (s, e) in arcs {
                let cover = t.polygon_cover(s, e)?;
                report.checked += 1;
                if let Err(msg) = check_bijection(&cover) {
                    report.failures.push(format!("({s},{e}): {msg}"));
                }
            }
        }
    }
    let mut text = format!(
        "{} {}: {} checks, {} failures\n",
        if report.ok() { "PASS" } else { "FAIL" },
        report.name,
        report.checked,
        report.failures.len()
    );
    for f in &report.failures {
        text.push_str(&format!("  {f}\n"));
    }
    if report.ok() {
        Ok(text)
    } else {
        Err(Failure::Check(text))
    }
}

fn need_bracelets(t: &Triangulation) -> Result<(), Failure> {
    if t.is_polygon() {
        return Err(Failure::Input("this check needs a punctured disk or an annulus".into()));
    }
    Ok(())
}

fn short_lifts(t: &Triangulation, max: usize) -> Result<Vec<(i64, i64)>, Failure> {
    let n = t.n();
    let mut out = vec![];
    for s in 1..=n {
        for len in 2..=4 * n {
            if t.is_polygon() && len >= n {
                break;
            }
            if t.crossing(s, s + len)?.diagonals.len() <= max {
                out.push((s, s + len));
            }
        }
    }
    Ok(out)
}
