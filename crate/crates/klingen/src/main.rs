//! Command-line front end: verification scenarios, coefficient tables,
//! L-values and coset listings. The library does the work; this binary
//! parses flags, selects scenarios and writes reports.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use klingen::evaluator::{KlingenEvaluator, LSeriesCutoffs, TruncationParams, UpperHalfPoint};
use klingen::report::{
    reports_to_json, verify_cor13, verify_cor14, verify_para_properties, verify_pointwise,
    VerificationReport, TOL_COR13, TOL_COR14, TOL_PARA, TOL_POINTWISE,
};
use klingen::{
    coset_reps, dirichlet_l_exact, dirichlet_l_numeric, eigenform, ingest_coefficients,
    lambda_set, rankin_naive, sym2_l, theta_coeffs, HalfIntMatrix,
};

#[derive(Debug, Parser)]
#[command(name = "klingen", about = "Klingen Eisenstein pullback identities at desk scale")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a verification scenario and report pass/fail.
    Verify {
        #[command(subcommand)]
        scenario: Scenario,
    },
    /// Print coefficient tables.
    Coeff {
        #[command(subcommand)]
        table: CoeffTable,
    },
    /// Evaluate a single L-value with its tail bound.
    Lvalue {
        #[command(subcommand)]
        kind: LValueKind,
    },
    /// Print coset representatives of Gamma_infty \ Gamma_0^2(N) as
    /// whitespace-separated integer quadruples `a b c d`.
    Cosets {
        #[arg(long, default_value_t = 1)]
        level: u32,
        #[arg(long, default_value_t = 5)]
        coset_height: i64,
    },
}

#[derive(Debug, Args)]
struct CommonOpts {
    /// Half-integral weight knob: the elliptic weight k.
    #[arg(long, default_value_t = 12)]
    weight: u64,
    #[arg(long)]
    coset_height: Option<i64>,
    #[arg(long)]
    cd_bound: Option<i64>,
    #[arg(long)]
    fourier_cutoff: Option<u32>,
    #[arg(long)]
    qexp_order: Option<usize>,
    /// DFT grid size for Fourier extraction.
    #[arg(long)]
    grid: Option<usize>,
    /// Rankin partial-sum cutoff.
    #[arg(long, default_value_t = 100_000)]
    cutoff: usize,
    #[arg(long, default_value_t = 1_000)]
    sym2_cutoff: usize,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write the report(s) as a JSON array.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write coefficient tables as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Coefficient file for level-N forms (see README for the format).
    #[arg(long)]
    coeff_file: Option<PathBuf>,
    /// Accepted for interface stability; every computation here is
    /// deterministic, so the seed is unused.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to the rayon global pool).
    #[arg(long)]
    threads: Option<usize>,
}

impl CommonOpts {
    fn params(&self) -> TruncationParams {
        let mut p = TruncationParams::default();
        if let Some(v) = self.coset_height {
            p.coset_height = v;
        }
        if let Some(v) = self.cd_bound {
            p.cd_bound = v;
        }
        if let Some(v) = self.fourier_cutoff {
            p.fourier_cutoff = v;
        }
        if let Some(v) = self.qexp_order {
            p.qexp_order = v;
        }
        if let Some(v) = self.grid {
            p.grid_size = v;
        }
        p
    }
}

#[derive(Debug, Subcommand)]
enum Scenario {
    /// Pointwise pullback identity (level 1).
    Pointwise {
        #[command(flatten)]
        common: CommonOpts,
        /// Point `x,y`. Defaults to three standard points when omitted.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        tau1: Option<UpperHalfPoint>,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        tau2: Option<UpperHalfPoint>,
    },
    /// Critical L-value identity at (1,1).
    Cor13 {
        #[command(flatten)]
        common: CommonOpts,
        /// Fixed height of the extraction grid.
        #[arg(long, default_value_t = 1.2)]
        y: f64,
    },
    /// Coefficient identity at coprime (n1, n2).
    Cor14 {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        n1: u32,
        #[arg(long)]
        n2: u32,
        #[arg(long, default_value_t = 1.2)]
        y: f64,
    },
    /// Paramodular pullback properties (N = 1 coincidence, invariance).
    Para {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 1)]
        level: u32,
    },
}

#[derive(Debug, Subcommand)]
enum CoeffTable {
    /// Klingen Fourier coefficients A(T, f) over Lambda(n1, n2).
    Klingen {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 1)]
        n1: u64,
        #[arg(long, default_value_t = 1)]
        n2: u64,
    },
    /// q-expansion of the built-in eigenform of the given weight.
    Eigenform {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 16)]
        order: usize,
    },
    /// Theta coefficients of the form (n1, b, n2).
    Theta {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 1)]
        n1: i64,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        b: i64,
        #[arg(long, default_value_t = 1)]
        n2: i64,
        #[arg(long, default_value_t = 16)]
        order: usize,
    },
}

#[derive(Debug, Subcommand)]
enum LValueKind {
    /// Dirichlet L-value: exact closed form and numeric partial sum.
    Dirichlet {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = -4, allow_negative_numbers = true)]
        disc: i64,
        #[arg(long, default_value_t = 11)]
        s_value: u32,
    },
    /// Rankin convolution of the weight-k eigenform with a theta series.
    Rankin {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long, default_value_t = 1)]
        n1: i64,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        b: i64,
        #[arg(long, default_value_t = 1)]
        n2: i64,
        /// Twist: sums a(n) b_T(v^2 n) n^{-s}.
        #[arg(long, default_value_t = 1)]
        v: u64,
    },
    /// Symmetric square L-value at s = 2k - 2.
    Sym2 {
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn parse_point(s: &str) -> Result<UpperHalfPoint, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected `x,y`, got {s:?}"))?;
    let x: f64 = x.trim().parse().map_err(|e| format!("bad x: {e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("bad y: {e}"))?;
    UpperHalfPoint::new(x, y).map_err(|e| e.to_string())
}

fn default_points() -> Vec<(UpperHalfPoint, UpperHalfPoint)> {
    let p = |x: f64, y: f64| UpperHalfPoint::new(x, y).unwrap();
    vec![
        (p(0.0, 1.2), p(0.0, 1.2)),
        (p(0.3, 1.1), p(0.0, 1.5)),
        (p(0.7, 1.3), p(-0.2, 1.2)),
    ]
}

fn print_reports(reports: &[VerificationReport], json: Option<&PathBuf>) -> klingen::Result<bool> {
    for r in reports {
        println!(
            "[{}] {}: lhs={:+.12e}{:+.12e}i rhs={:+.12e}{:+.12e}i rel_err={:.3e} tol={:.1e}",
            if r.pass { "PASS" } else { "FAIL" },
            r.claim,
            r.lhs.re,
            r.lhs.im,
            r.rhs.re,
            r.rhs.im,
            r.rel_err,
            r.tolerance,
        );
    }
    if let Some(path) = json {
        std::fs::write(path, reports_to_json(reports))?;
    }
    Ok(reports.iter().all(|r| r.pass))
}

fn write_csv(path: &PathBuf, header: &str, rows: &[(String, String)]) -> klingen::Result<()> {
    let mut out = String::from(header);
    out.push('\n');
    for (a, b) in rows {
        out.push_str(&format!("{a},{b}\n"));
    }
    std::fs::write(path, out)?;
    Ok(())
}

fn run() -> klingen::Result<bool> {
    let cli = Cli::parse();
    match cli.cmd {
        Command::Verify { scenario } => run_verify(scenario),
        Command::Coeff { table } => run_coeff(table).map(|_| true),
        Command::Lvalue { kind } => run_lvalue(kind).map(|_| true),
        Command::Cosets { level, coset_height } => {
            for rep in coset_reps(level, coset_height) {
                let (a, b, c, d) = rep.matrix.entries_i64().expect("small entries");
                println!("{a} {b} {c} {d}");
            }
            Ok(true)
        }
    }
}

fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .expect("thread pool")
            .install(job),
        None => job(),
    }
}

fn run_verify(scenario: Scenario) -> klingen::Result<bool> {
    match scenario {
        Scenario::Pointwise { common, tau1, tau2 } => {
            let params = common.params();
            params.validate()?;
            let tol = common.tolerance.unwrap_or(TOL_POINTWISE);
            let points = match (tau1, tau2) {
                (Some(a), Some(b)) => vec![(a, b)],
                (None, None) => default_points(),
                _ => return Err(klingen::Error::InvalidArgument("give both --tau1 and --tau2".into())),
            };
            let cutoffs = LSeriesCutoffs::default();
            let reports = in_pool(common.threads, || {
                verify_pointwise(common.weight, &points, &params, cutoffs, tol)
            })?;
            print_reports(&reports, common.json.as_ref())
        }
        Scenario::Cor13 { common, y } => {
            let params = common.params();
            params.validate()?;
            let tol = common.tolerance.unwrap_or(TOL_COR13);
            let report = in_pool(common.threads, || {
                verify_cor13(common.weight, &params, common.cutoff, common.sym2_cutoff, y, tol)
            })?;
            print_reports(&[report], common.json.as_ref())
        }
        Scenario::Cor14 { common, n1, n2, y } => {
            let mut params = common.params();
            if common.grid.is_none() {
                params.grid_size = 16;
            }
            params.validate()?;
            let tol = common.tolerance.unwrap_or(TOL_COR14);
            let report = in_pool(common.threads, || {
                verify_cor14(
                    common.weight,
                    n1,
                    n2,
                    &params,
                    common.cutoff,
                    common.sym2_cutoff,
                    y,
                    tol,
                )
            })?;
            print_reports(&[report], common.json.as_ref())
        }
        Scenario::Para { common, level } => {
            let mut params = common.params();
            if common.coset_height.is_none() && level > 1 {
                // invariance moves points close to the real line; deepen the
                // windows accordingly
                params.coset_height = 80;
            }
            params.validate()?;
            let tol = common.tolerance.unwrap_or(TOL_PARA);
            let ingested = match &common.coeff_file {
                Some(path) => Some(ingest_coefficients(path)?.1),
                None => None,
            };
            let report = in_pool(common.threads, || {
                verify_para_properties(common.weight, level, ingested.as_ref(), &params, tol)
            })?;
            print_reports(&[report], common.json.as_ref())
        }
    }
}

fn run_coeff(table: CoeffTable) -> klingen::Result<()> {
    match table {
        CoeffTable::Klingen { common, n1, n2 } => {
            let f = eigenform(common.weight, common.params().qexp_order)?;
            let cutoffs = LSeriesCutoffs { rankin: common.cutoff.min(100_000), sym2: common.sym2_cutoff };
            let mut ev = in_pool(common.threads, || KlingenEvaluator::new(&f, cutoffs))?;
            let mut rows = Vec::new();
            for t in lambda_set(n1, n2) {
                let a = ev.coeff(&t)?;
                println!(
                    "A([[{}, {}/2], [{}/2, {}]]) = {:+.12e}  (bound {:.2e})",
                    t.n1, t.b, t.b, t.n2, a.val, a.err
                );
                rows.push((format!("{} {} {}", t.n1, t.b, t.n2), format!("{:e}", a.val)));
            }
            if let Some(path) = &common.csv {
                write_csv(path, "n1 b n2,A", &rows)?;
            }
            Ok(())
        }
        CoeffTable::Eigenform { common, order } => {
            let f = eigenform(common.weight, order)?;
            let mut rows = Vec::new();
            for n in 1..order {
                println!("a({n}) = {}", f.coeff(n));
                rows.push((n.to_string(), f.coeff(n).to_string()));
            }
            if let Some(path) = &common.csv {
                write_csv(path, "n,a(n)", &rows)?;
            }
            Ok(())
        }
        CoeffTable::Theta { common, n1, b, n2, order } => {
            let t = HalfIntMatrix::new(n1, b, n2);
            let coeffs = theta_coeffs(&t, order)?;
            let mut rows = Vec::new();
            for (n, c) in coeffs.iter().enumerate() {
                println!("b({n}) = {c}");
                rows.push((n.to_string(), c.to_string()));
            }
            if let Some(path) = &common.csv {
                write_csv(path, "n,b(n)", &rows)?;
            }
            Ok(())
        }
    }
}

fn run_lvalue(kind: LValueKind) -> klingen::Result<()> {
    match kind {
        LValueKind::Dirichlet { common, disc, s_value } => {
            let exact = dirichlet_l_exact(disc, s_value)?;
            println!(
                "L({s_value}, chi_{disc}) = {} * pi^{} * sqrt({})  =  {:.15e}",
                exact.coeff, exact.pi_power, exact.radical, exact.to_f64()
            );
            if s_value > 1 {
                let numeric = dirichlet_l_numeric(disc, s_value as f64, common.cutoff);
                println!(
                    "numeric (cutoff {}): {:.15e}  tail bound {:.2e}  |diff| {:.2e}",
                    numeric.cutoff,
                    numeric.value,
                    numeric.tail_bound,
                    (numeric.value - exact.to_f64()).abs()
                );
            } else {
                println!("numeric partial sum skipped: the series only converges for s > 1");
            }
            Ok(())
        }
        LValueKind::Rankin { common, n1, b, n2, v } => {
            let k = common.weight;
            let t = HalfIntMatrix::new(n1, b, n2);
            let cutoff = common.cutoff;
            let (a, theta) = in_pool(common.threads, || -> klingen::Result<_> {
                let a = klingen::eigenform_coeffs_f64(k, cutoff)?;
                let th = theta_coeffs(&t, (v * v) as usize * cutoff + 1)?;
                Ok((a, th))
            })?;
            let lv = rankin_naive(
                &a,
                &theta,
                klingen::quadforms::theta_envelope(&t),
                k as f64 - 1.0,
                v,
                k,
                cutoff,
            )?;
            println!(
                "L({}, f_k={k} (x)' theta_({n1},{b},{n2})^({v})) = {:.15e}  tail bound {:.2e}",
                k - 1,
                lv.value,
                lv.tail_bound
            );
            Ok(())
        }
        LValueKind::Sym2 { common } => {
            let k = common.weight;
            let a = in_pool(common.threads, || klingen::eigenform_coeffs_f64(k, common.cutoff))?;
            let lv = sym2_l(&a, k, 2.0 * k as f64 - 2.0, common.sym2_cutoff)?;
            println!(
                "L({}, Sym^2 f_k={k}) = {:.15e}  tail bound {:.2e}",
                2 * k - 2,
                lv.value,
                lv.tail_bound
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
