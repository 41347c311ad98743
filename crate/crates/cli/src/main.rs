//! `flatspec`: command-line front end.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on a usage
//! error, 3 on a numeric failure.

mod parse;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use flatspec::flatfn::{corpus, Evaluator, FunctionExpr, Grid};
use flatspec::multipliers::{
    multiplier_spectrum_probe, power_multiplier_spectrum, ProbeVerdict, SpectrumWitness,
};
use flatspec::operators::{ApplyOptions, Family, OperatorSpec};
use flatspec::resolvents::{residual_quadrature, shifted_operator, ResolventRecipe};
use flatspec::spectra::{classify, spectrum_table, waelbroeck_sweep, Rect, Verdict};
use flatspec::suites::{self, VerifyConfig};
use flatspec::{bell, Error};

const CSV_VERSION: &str = "# flatspec-csv v1";
const THREADS_VAR: &str = "FLATSPEC_THREADS";

#[derive(Parser, Debug)]
#[command(name = "flatspec", version, about = "Operators on flat smooth functions on [0, 1]")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the partial Bell polynomial B_{j,i}, one monomial per line.
    Bell {
        j: usize,
        i: usize,
    },
    /// Apply an operator to a corpus function; CSV `x,re,im`.
    Apply {
        /// `d`, `v`, `mult:p`, `cesaro`, `mv:p`, `vm:p`, `md:p`, `dm:p`, `schwartzd`, `schwartzi`.
        #[arg(long, value_parser = parse::operator, allow_hyphen_values = true)]
        op: OperatorSpec,
        /// Corpus function name.
        #[arg(long)]
        f: String,
        /// Points in (0, 1] as `x1,x2,…` or `a:b:n` [default: 0.1:1:10].
        #[arg(long, value_parser = parse::points, allow_hyphen_values = true)]
        x: Option<Grid>,
        /// Evaluate every Volterra integral by quadrature.
        #[arg(long)]
        quadrature_only: bool,
    },
    /// Resolvent R(λ, T) g with the pointwise residual; CSV `x,re,im,residual`.
    Resolve {
        #[arg(long, value_parser = parse::family, allow_hyphen_values = true)]
        op: Family,
        /// `re,im`.
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        lambda: Complex64,
        #[arg(long)]
        g: String,
        /// Points in (0, 1] [default: 0.05,0.1,0.2,0.3,0.5,0.7,1].
        #[arg(long, value_parser = parse::points, allow_hyphen_values = true)]
        x: Option<Grid>,
    },
    /// Spectral verdict for λ as one JSON line.
    Classify {
        /// A family (`mv:-2`, …) or `mult` with `--p`, or `mult:p`.
        #[arg(long, allow_hyphen_values = true)]
        op: String,
        /// Exponent of the multiplier `x^p`.
        #[arg(long, allow_hyphen_values = true)]
        p: Option<f64>,
        #[arg(long, value_parser = parse::complex, allow_hyphen_values = true)]
        lambda: Complex64,
    },
    /// Resolvent seminorm sweep over a λ lattice; CSV `re_lambda,im_lambda,status,profile_n`.
    Sweep {
        #[arg(long, value_parser = parse::family, allow_hyphen_values = true)]
        op: Family,
        /// Real parts `a:b:n`.
        #[arg(long, value_parser = parse::range, allow_hyphen_values = true)]
        re: parse::Range,
        /// Imaginary parts `a:b:m`.
        #[arg(long, value_parser = parse::range, allow_hyphen_values = true)]
        im: parse::Range,
        #[arg(long)]
        f: String,
        /// Seminorm index.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Output file [default: stdout].
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run property suites and print a pass/fail table.
    Verify {
        /// One of bell, flatfn, multipliers, operators, resolvents, spectra, seqspace, all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Override the per-property sample counts.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Derivative jets of a corpus function; CSV `x,j,re,im`.
    Eval {
        #[arg(long)]
        f: String,
        #[arg(long, value_parser = parse::points, allow_hyphen_values = true)]
        x: Option<Grid>,
        /// Highest derivative order.
        #[arg(long, default_value_t = 0)]
        jet: usize,
    },
}

enum Failure {
    Usage(String),
    Numeric(String),
    Verification,
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Precondition(_) => Failure::Usage(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn json_complex(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

fn configure_threads() -> Outcome {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn default_points() -> Grid {
    Grid::uniform(10).expect("valid grid")
}

fn run_bell(out: &mut dyn Write, j: usize, i: usize) -> Outcome {
    write!(out, "{}", bell::bell_polynomial(j, i)?)?;
    Ok(())
}

fn run_apply(out: &mut dyn Write, op: &OperatorSpec, f: &str, x: Option<Grid>, quad: bool) -> Outcome {
    let f = corpus::lookup(f)?;
    let grid = x.unwrap_or_else(default_points);
    let opts = if quad {
        ApplyOptions::quadrature_only()
    } else {
        ApplyOptions::default()
    };
    let tf = flatspec::operators::apply_with(op, &f, opts)?;
    let ev = Evaluator::default();
    let rows = grid
        .points()
        .iter()
        .map(|&x| ev.eval(&tf, x).map(|v| (x, v)))
        .collect::<flatspec::Result<Vec<_>>>()?;
    writeln!(out, "{CSV_VERSION}")?;
    writeln!(out, "x,re,im")?;
    for (x, v) in rows {
        writeln!(out, "{},{},{}", num(x), num(v.re), num(v.im))?;
    }
    Ok(())
}

fn run_resolve(out: &mut dyn Write, family: Family, lambda: Complex64, g: &str, x: Option<Grid>) -> Outcome {
    let g = corpus::lookup(g)?;
    let grid = x.unwrap_or_else(Grid::residual_grid);
    let recipe = ResolventRecipe::new(family, lambda)?;
    let rg = recipe.apply(&g)?;
    let lhs = shifted_operator(&recipe.operator(), lambda, &rg, ApplyOptions::quadrature_only())?;
    let ev = Evaluator::new(residual_quadrature());
    let mut rows = Vec::with_capacity(grid.len());
    for &x in grid.points() {
        let v = ev.eval(&rg, x)?;
        let gx = ev.eval(&g, x)?;
        let r = (ev.eval(&lhs, x)? - gx).norm() / (1.0 + gx.norm());
        rows.push((x, v, r));
    }
    writeln!(out, "{CSV_VERSION}")?;
    writeln!(out, "x,re,im,residual")?;
    for (x, v, r) in rows {
        writeln!(out, "{},{},{},{}", num(x), num(v.re), num(v.im), num(r))?;
    }
    Ok(())
}

fn multiplier_json(p: f64, lambda: Complex64) -> Result<Value, Failure> {
    if !p.is_finite() {
        return Err(Failure::Usage("--p must be finite".into()));
    }
    let (sigma, sigma_star) = power_multiplier_spectrum(p);
    let probe = multiplier_spectrum_probe(&FunctionExpr::power(p), lambda)?;
    let mut v = json!({
        "op": "mult",
        "p": num(p),
        "lambda": json_complex(lambda),
        "sigma": sigma.to_string(),
        "sigma_star": sigma_star.to_string(),
    });
    let m = v.as_object_mut().expect("object");
    match probe {
        ProbeVerdict::InSpectrum(SpectrumWitness::Attained { x, distance }) => {
            m.insert("verdict".into(), json!("InSpectrum"));
            m.insert("witness".into(), json!({ "attained_at": num(x), "distance": num(distance) }));
        }
        ProbeVerdict::InSpectrum(SpectrumWitness::Divergent { smallest_tail }) => {
            m.insert("verdict".into(), json!("InSpectrum"));
            m.insert("witness".into(), json!({ "smallest_tail": num(smallest_tail) }));
        }
        ProbeVerdict::InResolvent(n) => {
            m.insert("verdict".into(), json!("InResolvent"));
            m.insert("witness".into(), json!({ "bounding_exponent": n }));
        }
        ProbeVerdict::Unknown => {
            m.insert("verdict".into(), json!("Unknown"));
        }
    }
    Ok(v)
}

fn family_json(family: Family, lambda: Complex64) -> Result<Value, Failure> {
    let table = spectrum_table(&family);
    let c = classify(family, lambda)?;
    let mut v = json!({
        "op": family.to_string(),
        "lambda": json_complex(lambda),
        "verdict": c.verdict.name(),
        "sigma": table.sigma.to_string(),
        "sigma_p": table.sigma_p.to_string(),
        "sigma_star": table.sigma_star.to_string(),
    });
    let m = v.as_object_mut().expect("object");
    match &c.verdict {
        Verdict::PointSpectrum(f) => {
            m.insert("eigenfunction".into(), json!(f.to_string()));
        }
        Verdict::ResolventSet(r) => {
            m.insert("recipe".into(), json!(r.route_name()));
        }
        Verdict::WaelbroeckOnly => {}
    }
    Ok(v)
}

fn run_classify(out: &mut dyn Write, op: &str, p: Option<f64>, lambda: Complex64) -> Outcome {
    let t = op.trim().to_ascii_lowercase();
    let v = if t == "mult" {
        let p = p.ok_or_else(|| Failure::Usage("--op mult needs --p".into()))?;
        multiplier_json(p, lambda)?
    } else if let Some(rest) = t.strip_prefix("mult:") {
        if p.is_some() {
            return Err(Failure::Usage("give the exponent either in --op or in --p".into()));
        }
        let p = rest
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("bad exponent in {op:?}")))?;
        multiplier_json(p, lambda)?
    } else {
        if p.is_some() {
            return Err(Failure::Usage("--p applies to --op mult only".into()));
        }
        family_json(parse::family(&t).map_err(Failure::Usage)?, lambda)?
    };
    writeln!(out, "{v}")?;
    Ok(())
}

fn run_sweep(
    out: &mut dyn Write,
    family: Family,
    re: parse::Range,
    im: parse::Range,
    f: &str,
    n: usize,
    path: Option<PathBuf>,
) -> Outcome {
    let f = corpus::lookup(f)?;
    let rect = Rect {
        re: (re.a, re.b),
        im: (im.a, im.b),
    };
    let result = waelbroeck_sweep(family, rect, re.n, im.n, &f, n);
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            result.write_csv(&mut w)?;
            w.flush()?;
        }
        None => result.write_csv(out)?,
    }
    Ok(())
}

fn run_verify(out: &mut dyn Write, suite: &str, seed: u64, trials: Option<usize>) -> Outcome {
    if suite != "all" && !suites::SUITES.contains(&suite) {
        return Err(Failure::Usage(format!(
            "unknown suite {suite:?}; expected one of {} or all",
            suites::SUITES.join(", ")
        )));
    }
    if trials == Some(0) {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    let rows = suites::run(suite, &VerifyConfig { seed, trials })?;
    let width = rows.iter().map(|r| r.property.chars().count()).max().unwrap_or(0);
    writeln!(out, "seed {seed}")?;
    for r in &rows {
        let pad = width - r.property.chars().count();
        writeln!(
            out,
            "{:<11} {}{}  {}  {}",
            r.suite,
            r.property,
            " ".repeat(pad),
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        )?;
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    writeln!(out, "{} passed, {} failed", rows.len() - failed, failed)?;
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run_eval(out: &mut dyn Write, f: &str, x: Option<Grid>, jet: usize) -> Outcome {
    let f = corpus::lookup(f)?;
    let grid = x.unwrap_or_else(default_points);
    let ev = Evaluator::default();
    let jets = grid
        .points()
        .iter()
        .map(|&x| ev.jet(&f, x, jet).map(|j| (x, j)))
        .collect::<flatspec::Result<Vec<_>>>()?;
    writeln!(out, "{CSV_VERSION}")?;
    writeln!(out, "x,j,re,im")?;
    for (x, js) in jets {
        for (j, v) in js.iter().enumerate() {
            writeln!(out, "{},{},{},{}", num(x), j, num(v.re), num(v.im))?;
        }
    }
    Ok(())
}

fn run(cli: Cli, out: &mut dyn Write) -> Outcome {
    configure_threads()?;
    match cli.command {
        Command::Bell { j, i } => run_bell(out, j, i),
        Command::Apply { op, f, x, quadrature_only } => run_apply(out, &op, &f, x, quadrature_only),
        Command::Resolve { op, lambda, g, x } => run_resolve(out, op, lambda, &g, x),
        Command::Classify { op, p, lambda } => run_classify(out, &op, p, lambda),
        Command::Sweep { op, re, im, f, n, out: path } => run_sweep(out, op, re, im, &f, n, path),
        Command::Verify { suite, seed, trials } => run_verify(out, &suite, seed, trials),
        Command::Eval { f, x, jet } => run_eval(out, &f, x, jet),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli, &mut out);
    let flushed = out.flush();
    match result.and(flushed.map_err(Failure::Io)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(Failure::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
