//! Command-line driver: argument parsing, dispatch and output.
//!
//! Exit status is 0 on success, 1 for invalid input and 2 for degraded
//! numerics; failures print `ERROR:<code>:<message>` on standard error.

pub mod bspec;

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hbspace::approx::{approximate_with, ApproxConfig, DEFAULT_MAX_OUTER};
use hbspace::blaschke::{floor_constants, blaschke_floor, uniform_separation, BlaschkeSpec};
use hbspace::experiments::{
    blowup_exact_curve, blowup_exponent, contrast_radii, default_sarason_radii, divergence_curves,
    radii_from_exponents, sarason_contrast, sarason_monotonicity_check, toeplitz_approx_curve,
    Curve, BlowupData,
};
use hbspace::io::{format_csv, format_pair, parse_coefficients, pair_to_sectioned, write_atomic, Sectioned};
use hbspace::spaces::{cauchy_kernel, make_hb_element_with_tolerance, HbElement, Pair};
use hbspace::{Complex64, TruncatedSeries};
use thiserror::Error;

pub use bspec::parse_bspec;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] hbspace::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Usage(_) => "usage",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "hbspace", version, about = "Numerics in de Branges-Rovnyak spaces H(b) for non-extreme b")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build the pair (b, a) and phi = b/a.
    Pair(PairCmd),
    /// H(b) norm of f.
    Norm(ElementCmd),
    /// The function f+ with T_{conj a} f+ = T_{conj b} f.
    Fplus(ElementCmd),
    /// Closed-form blow-up curve of (f_r)+(0) and its fitted exponent.
    Blowup(BlowupCmd),
    /// Norms of partial sums and Cesaro means, and coefficient partial sums.
    Diverge(DivergeCmd),
    /// Dilation monotonicity on random polynomials, optionally with the kernel contrast.
    Sarason(SarasonCmd),
    /// Polynomial approximation with a 6-epsilon certificate.
    Approx(ApproxCmd),
    /// The curve n -> ||T_{conj h_n} f - f|| in H(b).
    ToeplitzApprox(ToeplitzCmd),
    /// Minima of |B(r w_n)| between consecutive zeros.
    #[command(name = "lemma-bp", alias = "blaschke-floor")]
    Floor(FloorCmd),
}

#[derive(Debug, Args)]
struct Output {
    /// Output file, written atomically.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit reports as JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct PairArgs {
    /// Symbol expression, e.g. `b0 * blaschke:geometric:base=4,count=6 ^2`.
    #[arg(long, default_value = "b0")]
    b: String,
    /// Truncation degree N.
    #[arg(long, default_value_t = 1024)]
    degree: usize,
    /// Boundary grid size M, a power of two with M >= 4(N+1).
    #[arg(long, default_value_t = 8192)]
    grid: usize,
}

impl PairArgs {
    fn build(&self) -> CliResult<Pair> {
        let symbol = parse_bspec(&self.b)?;
        Ok(Pair::from_symbol(&symbol, self.degree, self.grid)?)
    }
}

#[derive(Debug, Args)]
struct PairCmd {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ElementArgs {
    /// Coefficient file, or `kernel:w` for the Cauchy kernel at the pair degree.
    #[arg(long)]
    f: String,
    /// Relative residual tolerance for f+.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

impl ElementArgs {
    fn build(&self, pair: &Pair) -> CliResult<HbElement> {
        let f = read_function(&self.f, pair.degree())?;
        Ok(make_hb_element_with_tolerance(&f, pair, self.tol)?)
    }
}

#[derive(Debug, Args)]
struct ElementCmd {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    element: ElementArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct BlowupCmd {
    /// Number of kernel terms in f.
    #[arg(long, default_value_t = 30)]
    terms: usize,
    /// Radii r = 1 - 4^-k for k in the inclusive range `lo..hi`.
    #[arg(long, default_value = "3..10")]
    r_exponents: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct DivergeCmd {
    /// Coefficient file or `kernel:w`; without it, f is the kernel sum
    /// with weights 2^-n at the zeros 1 - 4^-n and b = b0 B^2.
    #[arg(long)]
    f: Option<String>,
    /// Number of zeros when f is omitted.
    #[arg(long, default_value_t = 6)]
    zeros: usize,
    /// Symbol expression, used only with --f.
    #[arg(long, default_value = "b0")]
    b: String,
    #[arg(long, default_value_t = 4096)]
    degree: usize,
    /// Grid size; defaults to the smallest admissible for the degree.
    #[arg(long)]
    grid: Option<usize>,
    /// Largest partial-sum index.
    #[arg(long, default_value_t = 2048)]
    n_max: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct SarasonCmd {
    #[command(flatten)]
    pair: PairArgs,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Degree of the random polynomials.
    #[arg(long, default_value_t = 64)]
    poly_degree: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also maximize the ratio over kernel combinations for b0 B^2 with
    /// this many zeros 1 - 4^-n.
    #[arg(long)]
    contrast: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ApproxCmd {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    element: ElementArgs,
    #[arg(long)]
    epsilon: f64,
    /// Largest outer index n tried by the doubling search.
    #[arg(long, default_value_t = DEFAULT_MAX_OUTER)]
    max_outer: u64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ToeplitzCmd {
    #[command(flatten)]
    pair: PairArgs,
    #[command(flatten)]
    element: ElementArgs,
    /// Comma-separated outer indices.
    #[arg(long, value_delimiter = ',', default_value = "1,2,4,8,16,32,64,128,256")]
    n_values: Vec<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct FloorCmd {
    /// Zeros are 1 - base^-n.
    #[arg(long, default_value_t = 4.0)]
    base: f64,
    #[arg(long, default_value_t = 8)]
    count: usize,
    /// Samples of r per gap.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[command(flatten)]
    output: Output,
}

fn read_function(spec: &str, degree: usize) -> CliResult<TruncatedSeries> {
    if let Some(w) = spec.strip_prefix("kernel:") {
        let w: f64 = w
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("`{w}` is not a real number")))?;
        return Ok(cauchy_kernel(Complex64::new(w, 0.0), degree)?);
    }
    let text = fs::read_to_string(spec).map_err(hbspace::Error::from)?;
    Ok(parse_coefficients(&text)?)
}

/// `lo..hi`, inclusive.
fn parse_range(s: &str) -> CliResult<std::ops::RangeInclusive<u32>> {
    let bad = || CliError::Usage(format!("`{s}` is not a range `lo..hi`"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
    if lo == 0 || hi < lo {
        return Err(bad());
    }
    Ok(lo..=hi)
}

/// Where a command's results go: the report to standard output, the main
/// artifact to `--out` when given.
struct Emitter<'a> {
    output: &'a Output,
    stdout: String,
}

impl<'a> Emitter<'a> {
    fn new(output: &'a Output) -> Self {
        Emitter {
            output,
            stdout: String::new(),
        }
    }

    fn report(&mut self, s: &Sectioned) {
        if self.output.json {
            self.stdout.push_str(&format!("{:#}\n", s.to_json()));
        } else {
            self.stdout.push_str(&s.to_text());
        }
    }

    /// Writes the artifact to `--out`, or appends it to standard output.
    fn artifact(&mut self, text: &str) -> CliResult<()> {
        match &self.output.out {
            Some(path) => Ok(write_atomic(path, text)?),
            None => {
                self.stdout.push_str(text);
                Ok(())
            }
        }
    }
}

fn pair_scalars(s: &mut Sectioned, pair: &Pair) {
    s.scalar("degree", pair.degree())
        .scalar("grid_size", pair.grid_size())
        .number("identity_defect", pair.identity_defect())
        .number("product_defect", pair.product_defect());
}

fn element_scalars(s: &mut Sectioned, e: &HbElement) {
    s.number("hb_norm_sq", e.hb_norm_sq)
        .number("hb_norm", e.hb_norm())
        .number("h2_norm_sq", e.f.norm_h2_sq())
        .number("fplus_norm_sq", e.fplus.norm_h2_sq())
        .number("residual", e.residual)
        .number("path_discrepancy", e.path_discrepancy);
}

fn cmd_pair(c: &PairCmd) -> CliResult<String> {
    let pair = c.pair.build()?;
    let mut em = Emitter::new(&c.output);
    if c.output.json {
        em.artifact(&format!("{:#}\n", pair_to_sectioned(&pair).to_json()))?;
    } else {
        em.artifact(&format_pair(&pair))?;
    }
    if c.output.out.is_some() {
        let mut s = Sectioned::default();
        pair_scalars(&mut s, &pair);
        em.report(&s);
    }
    Ok(em.stdout)
}

fn cmd_element(c: &ElementCmd, with_fplus: bool) -> CliResult<String> {
    let pair = c.pair.build()?;
    let e = c.element.build(&pair)?;
    let mut s = Sectioned::default();
    pair_scalars(&mut s, &pair);
    element_scalars(&mut s, &e);
    let mut em = Emitter::new(&c.output);
    if with_fplus {
        let mut block = Sectioned::default();
        block.block("fplus", &e.fplus);
        if c.output.out.is_some() {
            em.report(&s);
            em.artifact(&block.to_text())?;
        } else {
            s.block("fplus", &e.fplus);
            em.report(&s);
        }
    } else {
        em.report(&s);
        if let Some(path) = &c.output.out {
            write_atomic(path, &em.stdout)?;
        }
    }
    Ok(em.stdout)
}

/// CSV goes to `--out`, or to standard output unless JSON was requested.
fn curve_artifact(em: &mut Emitter, curves: &[&Curve]) -> CliResult<()> {
    if em.output.out.is_some() || !em.output.json {
        em.artifact(&format_csv(curves))?;
    }
    Ok(())
}

fn curve_block(s: &mut Sectioned, c: &Curve) {
    let xy: Vec<Complex64> = c.x.iter().zip(&c.y).map(|(&x, &y)| Complex64::new(x, y)).collect();
    s.block(&c.label, &TruncatedSeries::new(xy).expect("curves are nonempty and finite"));
}

fn cmd_blowup(c: &BlowupCmd) -> CliResult<String> {
    let radii = radii_from_exponents(parse_range(&c.r_exponents)?);
    let curve = blowup_exact_curve(c.terms, &radii)?;
    let slope = blowup_exponent(&curve)?;
    let mut s = Sectioned::default();
    s.scalar("terms", c.terms).number("slope", slope);
    let mut em = Emitter::new(&c.output);
    if c.output.json {
        curve_block(&mut s, &curve);
    }
    em.report(&s);
    curve_artifact(&mut em, &[&curve])?;
    Ok(em.stdout)
}

fn cmd_diverge(c: &DivergeCmd) -> CliResult<String> {
    let grid = c.grid.unwrap_or_else(|| hbspace::series::min_grid_size(c.degree));
    let mut s = Sectioned::default();
    let (pair, f) = match &c.f {
        Some(spec) => {
            let pair = Pair::from_symbol(&parse_bspec(&c.b)?, c.degree, grid)?;
            let f = read_function(spec, c.degree)?;
            (pair, f)
        }
        None => {
            let data = BlowupData::new(c.zeros)?;
            let pair = data.pair(c.degree, grid)?;
            let exact = data.combination().hb_norm_sq(&|d| data.phi(d)).sqrt();
            s.scalar("zeros", c.zeros).number("hb_norm_exact", exact);
            (pair, data.kernel_sum(c.degree))
        }
    };
    let e = make_hb_element_with_tolerance(&f, &pair, 1e-8)?;
    let (partial, cesaro, sums) = divergence_curves(&pair, &f, c.n_max)?;
    pair_scalars(&mut s, &pair);
    s.number("hb_norm", e.hb_norm())
        .number("max_partial_sum_norm", partial.max_y())
        .number("max_cesaro_norm", cesaro.max_y())
        .number("max_coefficient_partial_sum", sums.max_y());
    let mut em = Emitter::new(&c.output);
    if c.output.json {
        for curve in [&partial, &cesaro, &sums] {
            curve_block(&mut s, curve);
        }
    }
    em.report(&s);
    curve_artifact(&mut em, &[&partial, &cesaro, &sums])?;
    Ok(em.stdout)
}

fn cmd_sarason(c: &SarasonCmd) -> CliResult<String> {
    let pair = c.pair.build()?;
    let rep = sarason_monotonicity_check(&pair, c.trials, c.poly_degree, &default_sarason_radii(), c.seed)?;
    let mut s = Sectioned::default();
    pair_scalars(&mut s, &pair);
    s.scalar("seed", rep.seed)
        .scalar("trials", rep.trials)
        .scalar("poly_degree", rep.degree)
        .number("max_ratio", rep.max_ratio)
        .scalar("worst_trial", rep.worst_trial)
        .number("worst_r", rep.worst_r)
        .scalar("violations", rep.violations);
    if let Some(zeros) = c.contrast {
        let con = sarason_contrast(&BlowupData::new(zeros)?, &contrast_radii())?;
        s.scalar("contrast_zeros", con.zeros)
            .number("contrast_max_ratio", con.max_ratio)
            .number("contrast_r", con.r_at_max)
            .block("contrast_witness", &TruncatedSeries::from_real(&con.witness)?);
    }
    let mut em = Emitter::new(&c.output);
    em.report(&s);
    if let Some(path) = &c.output.out {
        write_atomic(path, &em.stdout)?;
    }
    Ok(em.stdout)
}

fn cmd_approx(c: &ApproxCmd) -> CliResult<String> {
    let pair = c.pair.build()?;
    let e = c.element.build(&pair)?;
    let config = ApproxConfig {
        max_outer: c.max_outer,
    };
    let r = approximate_with(&e, &pair, c.epsilon, &config)?;
    let mut s = Sectioned::default();
    pair_scalars(&mut s, &pair);
    s.number("epsilon", r.epsilon)
        .scalar("n_outer", r.n_outer)
        .number("achieved_error", r.achieved_error)
        .number("certified_bound", r.certified_bound())
        .number("f_tail", r.budget_terms.f_tail)
        .number("fplus_tail", r.budget_terms.fplus_tail)
        .number("polynomial_term", r.budget_terms.polynomial)
        .number("h_over_a", r.h_over_a)
        .scalar("g1_degree", r.g1_degree)
        .scalar("g2_degree", r.g2_degree)
        .number("g1_sup", r.g1_sup)
        .number("g2_sup", r.g2_sup)
        .scalar("p_degree", r.p.degree())
        .scalar("q_degree", r.q.degree())
        .block("q", &r.q);
    let mut em = Emitter::new(&c.output);
    em.report(&s);
    if let Some(path) = &c.output.out {
        write_atomic(path, &em.stdout)?;
    }
    Ok(em.stdout)
}

fn cmd_toeplitz(c: &ToeplitzCmd) -> CliResult<String> {
    let pair = c.pair.build()?;
    let e = c.element.build(&pair)?;
    let mut ns = c.n_values.clone();
    ns.sort_unstable();
    ns.dedup();
    if ns.first() == Some(&0) {
        return Err(CliError::Usage("outer indices must be positive".into()));
    }
    let curve = toeplitz_approx_curve(&pair, &e, &ns)?;
    let mut s = Sectioned::default();
    pair_scalars(&mut s, &pair);
    s.number("final_error", curve.y[curve.y.len() - 1]);
    let mut em = Emitter::new(&c.output);
    if c.output.json {
        curve_block(&mut s, &curve);
    }
    em.report(&s);
    curve_artifact(&mut em, &[&curve])?;
    Ok(em.stdout)
}

fn cmd_floor(c: &FloorCmd) -> CliResult<String> {
    let spec = BlaschkeSpec::geometric(c.base, c.count, 1)?;
    let floors = blaschke_floor(&spec, c.samples);
    let mut s = Sectioned::default();
    s.number("base", c.base)
        .scalar("count", c.count)
        .scalar("samples", c.samples)
        .number("uniform_separation", uniform_separation(&spec));
    if let Some(bounds) = spec.ratio_bounds() {
        s.number("ratio_alpha", bounds.alpha)
            .number("ratio_beta", bounds.beta)
            .scalar("ratio_admissible", bounds.is_admissible());
    }
    if let Some(k) = floor_constants(&spec) {
        s.number("analytic_floor", k.product());
    }
    let min = floors.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    s.number("measured_floor", min);
    let mut em = Emitter::new(&c.output);
    if floors.is_empty() {
        em.report(&s);
        return Ok(em.stdout);
    }
    let x = floors.iter().map(|p| p.0 as f64).collect();
    let y = floors.iter().map(|p| p.1).collect();
    let curve = Curve::new(x, y, "min_modulus")?;
    if c.output.json {
        curve_block(&mut s, &curve);
    }
    em.report(&s);
    curve_artifact(&mut em, &[&curve])?;
    Ok(em.stdout)
}

fn dispatch(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Pair(c) => cmd_pair(c),
        Command::Norm(c) => cmd_element(c, false),
        Command::Fplus(c) => cmd_element(c, true),
        Command::Blowup(c) => cmd_blowup(c),
        Command::Diverge(c) => cmd_diverge(c),
        Command::Sarason(c) => cmd_sarason(c),
        Command::Approx(c) => cmd_approx(c),
        Command::ToeplitzApprox(c) => cmd_toeplitz(c),
        Command::Floor(c) => cmd_floor(c),
    }
}

/// Runs one command; standard output and error are written here and the
/// exit status returned.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("ERROR:usage:{first}");
            eprint!("{}", e.render());
            return 1;
        }
    };
    match dispatch(&cli) {
        Ok(out) => {
            print!("{out}");
            0
        }
        Err(e) => {
            eprintln!("ERROR:{}:{e}", e.code());
            e.exit_code()
        }
    }
}
