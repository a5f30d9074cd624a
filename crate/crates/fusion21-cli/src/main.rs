use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fusion21::config::SuiteConfig;
use fusion21::elliptic::{bracket, h_func, BracketKind, BracketShape};
use fusion21::face_weights::{face_tensor, w22bar_table_csv, FaceModel};
use fusion21::identity_suite::run_suite;
use fusion21::intertwiners::{l_op_explicit, l_op_sum};
use fusion21::ope_algebra::{ope_table, PairTag};
use fusion21::spectra;
use fusion21::vertex_weights::{r18v, r21v, r8v, s21v};
use fusion21::{Error, ModelParams, WeightTensor};

#[derive(Parser)]
#[command(
    name = "fusion21",
    version,
    about = "Fused eight-vertex weights, vertex-face identities, characters and free-field OPEs"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a single object at a parameter point.
    Eval(EvalArgs),
    /// Run the identity suite and write JSON and CSV reports.
    Check(CheckArgs),
    /// Path-space series against products or string functions, as CSV.
    Characters(CharArgs),
    /// OPE prefactor coefficients for one operator pair, as CSV.
    Ope(OpeArgs),
    /// Dump weight tables as CSV.
    Dump(DumpArgs),
}

#[derive(Args, Clone, Copy)]
struct Point {
    /// Nome x in (0,1); conflicts with --eps.
    #[arg(long, conflicts_with = "eps")]
    x: Option<f64>,
    /// epsilon > 0 with x = exp(-epsilon).
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 4.5)]
    r: f64,
}

impl Point {
    fn params(&self) -> Result<ModelParams, Error> {
        match (self.x, self.eps) {
            (_, Some(e)) => ModelParams::from_epsilon(e, self.r),
            (Some(x), None) => ModelParams::from_x(x, self.r),
            (None, None) => ModelParams::from_x(0.3, self.r),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalKind {
    Theta,
    Bracket,
    R8,
    R18,
    R21,
    W,
    W22,
    #[value(name = "L")]
    L,
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Square,
    Curly,
    Dsquare,
    Dcurly,
}

#[derive(Args)]
struct EvalArgs {
    kind: EvalKind,
    #[command(flatten)]
    point: Point,
    /// Spectral parameter (u0 for L).
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    u: f64,
    /// Theta index 1..4 (h_j with modulus --t, default 2r).
    #[arg(long, default_value_t = 1)]
    j: u8,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, value_enum, default_value = "square")]
    shape: Shape,
    /// Modulus shift for brackets: 0 (r), 1 (r-1), 2 (r-2).
    #[arg(long, default_value_t = 0)]
    shift: u8,
    /// Base height for face weights, or k',k'2,k,k2 for L.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    k: Vec<f64>,
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct CheckArgs {
    /// JSON config; defaults apply when omitted.
    config: Option<PathBuf>,
    /// Only run checks whose id starts with this prefix (repeatable).
    #[arg(long)]
    only: Vec<String>,
    /// Skip checks whose id starts with this prefix (repeatable).
    #[arg(long)]
    exclude: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Print the effective config as JSON and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct CharArgs {
    #[arg(long, default_value_t = 0)]
    i: u8,
    /// With --k, compare the face path space at (l, k) with its string function.
    #[arg(long, requires = "k")]
    l: Option<i64>,
    #[arg(long, requires = "l")]
    k: Option<i64>,
    #[arg(long, default_value_t = 12)]
    emax: usize,
}

#[derive(Args)]
struct OpeArgs {
    #[arg(long)]
    pair: String,
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[command(flatten)]
    point: Point,
}

#[derive(Clone, Copy, ValueEnum)]
enum DumpModel {
    R8,
    R18,
    R21,
    S21,
    W,
    W22,
    W22pp,
    /// Unnormalized fused face table.
    W22bar,
}

#[derive(Args)]
struct DumpArgs {
    model: DumpModel,
    #[command(flatten)]
    point: Point,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    u: f64,
    #[arg(long, default_value_t = 2.3, allow_hyphen_values = true)]
    k: f64,
}

macro_rules! outln {
    ($o:expr, $($t:tt)*) => {{
        let _ = writeln!($o, $($t)*);
    }};
}

/// Write buffered output; a closed pipe downstream is not an error.
fn flush(o: &str) {
    let _ = std::io::stdout().lock().write_all(o.as_bytes());
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(2)
}

fn print_tensor(o: &mut String, t: &WeightTensor, csv: bool) {
    if csv {
        o.push_str(&t.to_csv());
        return;
    }
    outln!(o, "{} at u = {}", t.model.name(), t.u);
    for (idx, v) in t.entries() {
        if v != 0.0 || t.is_structural(&idx) {
            outln!(o, "  {idx:?}  {v:.15e}");
        }
    }
}

fn cmd_eval(o: &mut String, a: &EvalArgs) -> Result<(), Error> {
    let p = a.point.params()?;
    let scalar = |o: &mut String, name: &str, v: f64| {
        if a.csv {
            outln!(o, "kind,u,value\n{name},{},{v:.17e}", a.u);
        } else {
            outln!(o, "{name}({}) = {v:.15e}", a.u);
        }
    };
    let base = || a.k.first().copied().ok_or_else(|| Error::Usage("--k is required".into()));
    match a.kind {
        EvalKind::Theta => scalar(o, &format!("h{}", a.j), h_func(a.j, a.t.unwrap_or(2.0 * p.r), a.u, &p)?),
        EvalKind::Bracket => {
            let shape = match a.shape {
                Shape::Square => BracketShape::Square,
                Shape::Curly => BracketShape::Curly,
                Shape::Dsquare => BracketShape::DSquare,
                Shape::Dcurly => BracketShape::DCurly,
            };
            scalar(o, "bracket", bracket(a.u, BracketKind::new(shape, a.shift)?, &p))
        }
        EvalKind::R8 => print_tensor(o, &r8v(a.u, &p)?, a.csv),
        EvalKind::R18 => print_tensor(o, &r18v(a.u, &p)?, a.csv),
        EvalKind::R21 => print_tensor(o, &r21v(a.u, &p)?, a.csv),
        EvalKind::W => print_tensor(o, &face_tensor(FaceModel::Sos, base()?, a.u, &p)?, a.csv),
        EvalKind::W22 => print_tensor(o, &face_tensor(FaceModel::W22, base()?, a.u, &p)?, a.csv),
        EvalKind::L => {
            let [kp, kp2, k, k2] = a.k[..] else {
                return Err(Error::Usage("L needs --k k',k'2,k,k2".into()));
            };
            let sum = l_op_sum(kp, kp2, k, k2, a.u, &p)?;
            let closed = l_op_explicit(kp, kp2, k, k2, a.u, &p)?;
            if a.csv {
                outln!(o, "kind,u0,sum,closed\nL,{},{sum:.17e},{closed:.17e}", a.u);
            } else {
                outln!(o, "L(u0={}) contraction = {sum:.15e}, closed form = {closed:.15e}", a.u);
            }
        }
    }
    Ok(())
}

fn cmd_check(o: &mut String, a: &CheckArgs) -> Result<bool, Error> {
    let mut cfg = match &a.config {
        Some(path) => SuiteConfig::load(path)?,
        None => SuiteConfig::default(),
    };
    cfg.only.extend(a.only.iter().cloned());
    cfg.exclude.extend(a.exclude.iter().cloned());
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.print_config {
        outln!(o, "{}", cfg.to_json());
        return Ok(true);
    }
    let report = run_suite(&cfg)?;
    let dir = cfg.out_dir();
    let io = |e: std::io::Error| Error::Config(format!("cannot write to {}: {e}", dir.display()));
    std::fs::create_dir_all(&dir).map_err(io)?;
    std::fs::write(dir.join(&cfg.output.json), report.to_json()).map_err(io)?;
    std::fs::write(dir.join(&cfg.output.csv), report.to_csv()).map_err(io)?;
    let h = &report.header;
    outln!(
        o,
        "# x={} r={} epsilon={} rel_tol={:e} e_max={} n={} seed={}",
        h.x,
        h.r,
        h.epsilon,
        h.rel_tol,
        h.e_max,
        h.n,
        h.seed
    );
    for (id, n, fails, worst, gating) in report.summary() {
        let status = match (fails, gating) {
            (0, _) => "PASS",
            (_, true) => "FAIL",
            (_, false) => "INFO",
        };
        outln!(o, "{status} {id:<40} {:>4}/{n:<4} worst {worst:.3e}", n - fails);
    }
    outln!(o, "reports written to {}", dir.display());
    Ok(report.all_gating_pass)
}

fn cmd_characters(o: &mut String, a: &CharArgs) -> Result<(), Error> {
    outln!(o, "degree,enumeration,product,match");
    let (enumerated, product) = match (a.l, a.k) {
        (Some(l), Some(k)) => {
            let cmp = spectra::compare_face_with_string(a.i, l, k, a.emax)?;
            let face = spectra::face_partition_series(a.i, l, k, a.emax)?;
            let sf = spectra::string_function_series(a.i, cmp.string_j, a.emax)?;
            let shift = |s: &fusion21::series::IntSeries, off: usize| -> Vec<i64> {
                (0..=cmp.degrees).map(|d| s.coeff(d + off)).collect()
            };
            (shift(&face, cmp.path_offset), shift(&sf.series, cmp.string_offset))
        }
        _ => {
            let e = spectra::vertex_partition_series(a.i, a.emax)?;
            let p = spectra::character_product(a.i, a.emax)?;
            ((0..=a.emax).map(|d| e.coeff(d)).collect(), (0..=a.emax).map(|d| p.coeff(d)).collect())
        }
    };
    for (d, (e, p)) in enumerated.iter().zip(&product).enumerate() {
        outln!(o, "{d},{e},{p},{}", e == p);
    }
    Ok(())
}

fn cmd_ope(o: &mut String, a: &OpeArgs) -> Result<(), Error> {
    let pair: PairTag = a.pair.parse()?;
    let p = a.point.params()?;
    outln!(o, "degree,log_derived,log_printed,series_closed,series_printed,residual");
    for (d, ld, lp, sc, sp) in ope_table(pair, a.n, &p)? {
        let scale = ld.abs().max(lp.abs());
        let res = if scale == 0.0 { 0.0 } else { (ld - lp).abs() / scale };
        outln!(o, "{d},{ld:.17e},{lp:.17e},{sc:.17e},{sp:.17e},{res:.3e}");
    }
    Ok(())
}

fn cmd_dump(o: &mut String, a: &DumpArgs) -> Result<(), Error> {
    let p = a.point.params()?;
    let t = match a.model {
        DumpModel::R8 => r8v(a.u, &p)?,
        DumpModel::R18 => r18v(a.u, &p)?,
        DumpModel::R21 => r21v(a.u, &p)?,
        DumpModel::S21 => s21v(a.u, &p)?,
        DumpModel::W => face_tensor(FaceModel::Sos, a.k, a.u, &p)?,
        DumpModel::W22 => face_tensor(FaceModel::W22, a.k, a.u, &p)?,
        DumpModel::W22pp => face_tensor(FaceModel::W22pp, a.k, a.u, &p)?,
        DumpModel::W22bar => {
            o.push_str(&w22bar_table_csv(a.k, a.u, &p)?);
            return Ok(());
        }
    };
    o.push_str(&t.to_csv());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut o = String::new();
    let result = match &cli.cmd {
        Cmd::Eval(a) => cmd_eval(&mut o, a).map(|_| true),
        Cmd::Characters(a) => cmd_characters(&mut o, a).map(|_| true),
        Cmd::Ope(a) => cmd_ope(&mut o, a).map(|_| true),
        Cmd::Dump(a) => cmd_dump(&mut o, a).map(|_| true),
        Cmd::Check(a) => cmd_check(&mut o, a),
    };
    flush(&o);
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => fail(&e),
    }
}
