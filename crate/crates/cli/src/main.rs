use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use logklab::exactnum::{parse_rational, to_decimal, Rational};
use logklab::normalcone::{self, CriticalC, CurvePoint};
use logklab::pairfile::{self, LoadedPair};
use logklab::pairmodel::{self, DivisorSpec, Finding};
use logklab::report::{render_rows, ReportRow, DECIMAL_DIGITS};
use logklab::thresholds::{self, AngleWindow, Certificate, ExistenceCase, SingularCriteriaInput, Verdict, VerdictStatus};
use logklab::weightoracle::{self, DimensionModel};
use logklab::Error;
use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

const EXIT_OK: u8 = 0;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_CROSSCHECK: u8 = 4;

#[derive(Parser)]
#[command(name = "logklab", version, about = "Exact log K-stability calculations for polarised pairs")]
struct Cli {
    /// Emit JSON instead of aligned text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone, Default)]
struct PosArgs {
    #[arg(long = "alpha-L", value_parser = rational)]
    alpha_l: Option<Rational>,
    #[arg(long = "alpha-LD", value_parser = rational)]
    alpha_ld: Option<Rational>,
    #[arg(long = "alpha-beta", value_parser = rational)]
    alpha_beta: Option<Rational>,
    #[arg(long = "lambda", value_parser = rational)]
    lambda: Option<Rational>,
    #[arg(long = "Lambda", value_parser = rational)]
    lambda_up: Option<Rational>,
    #[arg(long = "entropy-lower", value_parser = rational)]
    entropy_lower: Option<Rational>,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowCase {
    Large,
    Given,
    Uniform,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Validation findings, S1, SD and the instability threshold.
    Info { pair: String },
    /// Average scalar curvatures at a cone angle.
    Scalar {
        pair: String,
        #[arg(long, value_parser = rational)]
        beta: Rational,
        #[arg(long)]
        m: Option<u32>,
    },
    /// beta_u, alpha_beta lower bounds and the eta = 0 multiplicity.
    Thresholds {
        pair: String,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, value_parser = rational)]
        beta: Option<Rational>,
        #[command(flatten)]
        pos: PosArgs,
    },
    /// Certified cone-angle window.
    Window {
        pair: String,
        #[arg(long)]
        m: u32,
        #[arg(long, value_enum)]
        case: WindowCase,
        #[command(flatten)]
        pos: PosArgs,
    },
    /// eta-feasibility verdict.
    Eta {
        pair: String,
        #[arg(long)]
        m: u32,
        #[arg(long, value_parser = rational)]
        beta: Rational,
        #[command(flatten)]
        pos: PosArgs,
    },
    /// Entropy threshold comparison.
    Entropy {
        pair: String,
        #[arg(long)]
        m: u32,
        #[arg(long, value_parser = rational)]
        beta: Rational,
        #[command(flatten)]
        pos: PosArgs,
    },
    /// DF of the normal-cone degeneration by both formulas.
    Df {
        pair: String,
        #[arg(long, value_parser = rational)]
        c: Rational,
        #[arg(long, value_parser = rational)]
        beta: Rational,
    },
    /// DF, inner factor and J^NA on the grid c = i/(steps+1).
    DfCurve {
        pair: String,
        #[arg(long, value_parser = rational)]
        beta: Rational,
        #[arg(long)]
        steps: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: CurveFormat,
    },
    /// A parameter c with negative DF.
    Destabilize {
        pair: String,
        #[arg(long, value_parser = rational)]
        beta: Rational,
        #[arg(long, value_parser = rational)]
        tol: Option<Rational>,
    },
    /// Isolating interval for the zero of the inner factor.
    CriticalC {
        pair: String,
        #[arg(long, value_parser = rational)]
        beta: Rational,
        #[arg(long, value_parser = rational)]
        tol: Rational,
    },
    /// Brute-force weight sums against the closed forms (JSON).
    Oracle {
        pair: String,
        #[arg(long, value_parser = rational)]
        c: Rational,
        #[arg(long, default_value_t = 60)]
        kmax: u64,
    },
    /// Singular-pair criteria from a JSON document of assertions.
    Criteria {
        #[arg(long)]
        file: String,
    },
    /// Builtin pairs.
    Catalog {
        #[command(subcommand)]
        action: CatalogCmd,
    },
}

#[derive(Subcommand)]
enum CatalogCmd {
    List,
    Show { name: String },
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::PreconditionFailed(_) | Error::NotBelowThreshold { .. } | Error::SearchExhausted(_) => EXIT_INCONCLUSIVE,
            Error::DegreeMismatch(_) => EXIT_CROSSCHECK,
            _ => EXIT_INPUT,
        };
        Failure { code, message: e.to_string() }
    }
}

type Outcome = Result<(String, u8), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok((out, code)) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn threads() -> usize {
    std::env::var("LOGKLAB_THREADS").ok().and_then(|v| v.parse().ok()).filter(|&n| n >= 1).unwrap_or(1)
}

fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads()).build().expect("thread pool");
    pool.install(|| items.par_iter().map(f).collect())
}

fn load(spec: &str, m: Option<u32>, pos: Option<&PosArgs>) -> Result<LoadedPair, Failure> {
    let mut lp = pairfile::resolve(spec)?;
    if let Some(m) = m {
        lp.divisor = DivisorSpec::new(m)?;
    }
    if let Some(p) = pos {
        let q = &mut lp.positivity;
        let over = |slot: &mut Option<Rational>, v: &Option<Rational>| {
            if v.is_some() {
                *slot = v.clone();
            }
        };
        over(&mut q.alpha_l, &p.alpha_l);
        over(&mut q.alpha_ld_restricted, &p.alpha_ld);
        over(&mut q.alpha_beta_override, &p.alpha_beta);
        over(&mut q.lambda, &p.lambda);
        over(&mut q.lambda_up, &p.lambda_up);
        over(&mut q.entropy_lower, &p.entropy_lower);
        lp.positivity.validate(&lp.pair)?;
    }
    Ok(lp)
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Outcome {
    match &cli.cmd {
        Cmd::Info { pair } => info(cli, pair),
        Cmd::Scalar { pair, beta, m } => scalar(cli, pair, beta, *m),
        Cmd::Thresholds { pair, m, beta, pos } => thresholds_cmd(cli, pair, *m, beta.as_ref(), pos),
        Cmd::Window { pair, m, case, pos } => window(cli, pair, *m, *case, pos),
        Cmd::Eta { pair, m, beta, pos } => {
            let lp = load(pair, Some(*m), Some(pos))?;
            verdict_out(cli, &thresholds::eta_feasibility(&lp.pair, &lp.positivity, *m, beta)?)
        }
        Cmd::Entropy { pair, m, beta, pos } => {
            let lp = load(pair, Some(*m), Some(pos))?;
            verdict_out(cli, &thresholds::entropy_threshold_check(&lp.pair, &lp.positivity, *m, beta)?)
        }
        Cmd::Df { pair, c, beta } => df(cli, pair, c, beta),
        Cmd::DfCurve { pair, beta, steps, format } => df_curve(pair, beta, *steps, *format),
        Cmd::Destabilize { pair, beta, tol } => destabilize(cli, pair, beta, tol.as_ref()),
        Cmd::CriticalC { pair, beta, tol } => critical(cli, pair, beta, tol),
        Cmd::Oracle { pair, c, kmax } => oracle(pair, c, *kmax),
        Cmd::Criteria { file } => criteria(cli, file),
        Cmd::Catalog { action } => catalog(cli, action),
    }
}

fn info(cli: &Cli, spec: &str) -> Outcome {
    let lp = load(spec, None, None)?;
    let findings = pairmodel::validate_pair(&lp.pair);
    let s1 = pairmodel::avg_scalar_s1(&lp.pair);
    let sd = pairmodel::avg_scalar_sd(&lp.pair, &lp.divisor).ok();
    let thr = normalcone::instability_threshold(&lp.pair, &lp.divisor).ok();
    if cli.json {
        #[derive(Serialize)]
        struct Info<'a> {
            pair: pairfile::PairFile,
            findings: &'a [Finding],
            #[serde(rename = "S1")]
            s1: String,
            #[serde(rename = "SD")]
            sd: Option<String>,
            instability_threshold: Option<String>,
        }
        return Ok((
            json(&Info {
                pair: lp.to_file(),
                findings: &findings,
                s1: s1.to_string(),
                sd: sd.as_ref().map(ToString::to_string),
                instability_threshold: thr.as_ref().map(ToString::to_string),
            }),
            EXIT_OK,
        ));
    }
    let mut out = format!("pair: {} (n = {}, m = {})\n", lp.pair.name, lp.pair.dimension, lp.divisor.m);
    let mut rows = vec![ReportRow::new("S1", &s1, "n c1(X).L^(n-1) / L^n")];
    if let Some(sd) = &sd {
        rows.push(ReportRow::new("SD", sd, "(n-1)(S1/n - m)"));
    }
    if let Some(t) = &thr {
        rows.push(ReportRow::new("instability threshold", t, "SD/(n(n-1)), unstable below"));
    }
    out.push_str(&render_rows(&rows));
    for f in &findings {
        let text = match f {
            Finding::ScalarBoundSaturated => "S1 = n(n+1): extremal value, attained by (P^n, O(1))",
            Finding::ScalarBoundViolated => "S1 > n(n+1): not realised by a polarised manifold",
            Finding::NotAmple => "L^n <= 0: L is not ample",
        };
        out.push_str(&format!("finding: {text}\n"));
    }
    Ok((out, EXIT_OK))
}

fn scalar(cli: &Cli, spec: &str, beta: &Rational, m: Option<u32>) -> Outcome {
    let lp = load(spec, m, None)?;
    let r = pairmodel::avg_scalar_sbeta(&lp.pair, &lp.divisor, beta);
    if cli.json {
        return Ok((json(&r), EXIT_OK));
    }
    let mut rows = vec![ReportRow::new("S1", &r.s1, "")];
    if let Some(sd) = &r.sd {
        let note = if r.sd_derived_extension { "adjunction on D in |mL|" } else { "" };
        rows.push(ReportRow::new("SD", sd, note));
    }
    rows.push(ReportRow::new("Sbeta", &r.sbeta, "S1 - mn(1-beta)"));
    rows.push(ReportRow::new("mu", &r.mu, "Sbeta/n"));
    Ok((render_rows(&rows), EXIT_OK))
}

fn thresholds_cmd(cli: &Cli, spec: &str, m: Option<u32>, beta: Option<&Rational>, pos: &PosArgs) -> Outcome {
    let lp = load(spec, m, Some(pos))?;
    let m = lp.divisor.m;
    let bu = thresholds::beta_u(&lp.pair, &lp.positivity, m)?;
    let samples: Vec<Rational> = ["1/4", "1/2", "3/4", "1"].iter().map(|s| parse_rational(s).expect("literal")).collect();
    let bounds = samples
        .iter()
        .map(|b| thresholds::alpha_beta_lower_bound(&lp.positivity, m, b).map(|a| (b.clone(), a)))
        .collect::<Result<Vec<_>, _>>()?;
    let m_eta0 = match beta {
        Some(b) => Some(thresholds::min_multiplicity_eta0(&lp.pair, &lp.positivity, b)?),
        None => None,
    };
    if cli.json {
        #[derive(Serialize)]
        struct Out {
            m: u32,
            beta_u: String,
            alpha_beta_lower: Vec<(String, String)>,
            min_multiplicity_eta0: Option<u64>,
        }
        return Ok((
            json(&Out {
                m,
                beta_u: bu.to_string(),
                alpha_beta_lower: bounds.iter().map(|(b, a)| (b.to_string(), a.to_string())).collect(),
                min_multiplicity_eta0: m_eta0,
            }),
            EXIT_OK,
        ));
    }
    let mut rows = vec![ReportRow::new("beta_u", &bu, format!("critical cone angle, m = {m}"))];
    for (b, a) in &bounds {
        rows.push(ReportRow::new(format!("alpha_beta >= (beta = {b})"), a, "min{m beta, alpha(L), m alpha(L_D|D)}"));
    }
    let mut out = render_rows(&rows);
    if let (Some(b), Some(k)) = (beta, m_eta0) {
        out.push_str(&format!("least m with eta = 0 at beta = {b}: {k}\n"));
    }
    Ok((out, EXIT_OK))
}

fn window_text(w: &AngleWindow) -> String {
    let claim = match w.claim {
        thresholds::WindowClaim::ExistenceCscKCone => "cscK cone metric exists",
        thresholds::WindowClaim::UniformLogKStable => "uniformly log K-stable",
    };
    format!("window: {w}\nclaim: {claim}\n")
}

fn window(cli: &Cli, spec: &str, m: u32, case: WindowCase, pos: &PosArgs) -> Outcome {
    let lp = load(spec, Some(m), Some(pos))?;
    let w = match case {
        WindowCase::Uniform => thresholds::uniform_stability_window(&lp.pair, &lp.positivity, m),
        WindowCase::Large => thresholds::existence_window(&lp.pair, &lp.positivity, m, ExistenceCase::LargeM),
        WindowCase::Given => thresholds::existence_window(&lp.pair, &lp.positivity, m, ExistenceCase::GivenM),
    }?;
    let code = if w.empty { EXIT_INCONCLUSIVE } else { EXIT_OK };
    if cli.json {
        return Ok((json(&w), code));
    }
    Ok((window_text(&w), code))
}

fn status_code(v: &Verdict) -> u8 {
    match v.status {
        VerdictStatus::CriterionSatisfied => EXIT_OK,
        _ => EXIT_INCONCLUSIVE,
    }
}

fn verdict_text(v: &Verdict) -> String {
    let mut out = format!("status: {:?}\nclaim: {}\n", v.status, v.claim);
    if let Some(model) = &v.model {
        out.push_str(&format!("model: {model}\n"));
    }
    match &v.certificate {
        Some(Certificate::Eta { eta, lower, lower_inclusive, upper }) => {
            let open = if *lower_inclusive { '[' } else { '(' };
            out.push_str(&format!("certificate: eta = {eta} in {open}{lower}, {upper})\n"));
        }
        Some(Certificate::Inequality { lhs, rhs }) => out.push_str(&format!("certificate: {lhs} > {rhs}\n")),
        Some(Certificate::NotNeeded) => out.push_str("certificate: not needed (asserted facts only)\n"),
        None => {}
    }
    if let Some(why) = &v.violated {
        out.push_str(&format!("violated: {why}\n"));
    }
    for p in &v.provenance {
        out.push_str(&format!("uses: {p}\n"));
    }
    out
}

fn verdict_out(cli: &Cli, v: &Verdict) -> Outcome {
    let text = if cli.json { json(v) } else { verdict_text(v) };
    Ok((text, status_code(v)))
}

fn df(cli: &Cli, spec: &str, c: &Rational, beta: &Rational) -> Outcome {
    let lp = load(spec, None, None)?;
    let rep = normalcone::df_closed(&lp.pair, &lp.divisor, c, beta)?;
    let coeffs = normalcone::coefficients(&lp.pair, &lp.divisor, c)?;
    let via = normalcone::df_from_coefficients(&coeffs, beta);
    let agree = via == rep.df;
    let code = if agree { EXIT_OK } else { EXIT_CROSSCHECK };
    if cli.json {
        #[derive(Serialize)]
        struct Out<'a> {
            closed: &'a normalcone::DFReport,
            coefficients: &'a normalcone::NormalConeCoefficients,
            df_from_coefficients: String,
            paths_agree: bool,
        }
        let text = json(&Out { closed: &rep, coefficients: &coeffs, df_from_coefficients: via.to_string(), paths_agree: agree });
        return Ok((text, code));
    }
    let rows = vec![
        ReportRow::new("a0", &coeffs.a0, "L^n/n!"),
        ReportRow::new("a1", &coeffs.a1, ""),
        ReportRow::new("b0", &coeffs.b0, ""),
        ReportRow::new("b1", &coeffs.b1, ""),
        ReportRow::new("a0~", &coeffs.a0_tilde, "n a0"),
        ReportRow::new("b0~", &coeffs.b0_tilde, "-c n a0"),
        ReportRow::new("DF (closed form)", &rep.df, "prefactor x inner factor"),
        ReportRow::new("DF (coefficients)", &via, "2(a1b0-a0b1)/a0 + (1-beta)(a0b0~-a0~b0)/a0"),
        ReportRow::new("inner factor", &rep.inner_factor, "beta + SD/(n-1) g(c)"),
        ReportRow::new("prefactor", &rep.positive_prefactor, "n a0 (1-(1-c)^(n+1))/(n+1)"),
        ReportRow::new("J^NA", &rep.jna, "c - (1-(1-c)^(n+1))/(n+1)"),
    ];
    let mut out = render_rows(&rows);
    out.push_str(if agree { "paths agree: true\n" } else { "paths agree: FALSE\n" });
    Ok((out, code))
}

fn df_curve(spec: &str, beta: &Rational, steps: u32, format: CurveFormat) -> Outcome {
    if steps == 0 {
        return Err(Failure { code: EXIT_INPUT, message: "--steps must be >= 1".into() });
    }
    let lp = load(spec, None, None)?;
    let grid = normalcone::curve_grid(steps);
    let pts = par_map(&grid, |c| normalcone::curve_point(&lp.pair, &lp.divisor, c, beta))
        .into_iter()
        .collect::<Result<Vec<CurvePoint>, _>>()?;
    let out = match format {
        CurveFormat::Json => json(&pts),
        CurveFormat::Csv => {
            let mut s = String::from("c,df,inner_factor,jna,ratio,c_decimal,df_decimal,inner_factor_decimal,jna_decimal,ratio_decimal\n");
            for p in &pts {
                let vals = [&p.c, &p.df, &p.inner_factor, &p.jna, &p.ratio];
                let exact: Vec<String> = vals.iter().map(|v| v.to_string()).collect();
                let dec: Vec<String> = vals.iter().map(|v| to_decimal(v, DECIMAL_DIGITS)).collect();
                s.push_str(&format!("{},{}\n", exact.join(","), dec.join(",")));
            }
            s
        }
    };
    Ok((out, EXIT_OK))
}

fn destabilize(cli: &Cli, spec: &str, beta: &Rational, tol: Option<&Rational>) -> Outcome {
    let lp = load(spec, None, None)?;
    let tol = tol.cloned().unwrap_or_else(|| Rational::new(BigInt::one(), BigInt::one() << 64));
    let d = normalcone::find_destabilizer(&lp.pair, &lp.divisor, beta, &tol)?;
    if cli.json {
        return Ok((json(&d), EXIT_OK));
    }
    let rows = vec![ReportRow::new("c", &d.c, "dyadic search"), ReportRow::new("DF", &d.df, "negative: log K-unstable")];
    Ok((render_rows(&rows), EXIT_OK))
}

fn critical(cli: &Cli, spec: &str, beta: &Rational, tol: &Rational) -> Outcome {
    let lp = load(spec, None, None)?;
    let r = normalcone::critical_c(&lp.pair, &lp.divisor, beta, tol)?;
    if cli.json {
        return Ok((json(&r), EXIT_OK));
    }
    let out = match &r {
        CriticalC::EveryCDestabilizes => "every c in (0, 1) gives DF < 0\n".to_string(),
        CriticalC::Bracket { lo, hi, inner_lo, inner_hi } => render_rows(&[
            ReportRow::new("lo", lo, ""),
            ReportRow::new("hi", hi, ""),
            ReportRow::new("inner factor at lo", inner_lo, ""),
            ReportRow::new("inner factor at hi", inner_hi, ""),
        ]),
    };
    Ok((out, EXIT_OK))
}

fn oracle(spec: &str, c: &Rational, kmax: u64) -> Outcome {
    let lp = load(spec, None, None)?;
    let model = lp.hilbert.clone().ok_or_else(|| Failure {
        code: EXIT_INPUT,
        message: format!("{} has no Hilbert model; add a \"hilbert\" block", lp.pair.name),
    })?;
    let model_ref: &dyn DimensionModel = &model;
    let ks = weightoracle::admissible_ks(model_ref, c, kmax);
    let samples = par_map(&ks, |&k| weightoracle::dims_and_weights(&model, c, k))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let rep = weightoracle::oracle_report_with(model_ref, &lp.pair, &lp.divisor, c, samples)?;
    let code = if rep.ok() { EXIT_OK } else { EXIT_CROSSCHECK };
    Ok((json(&rep), code))
}

fn criteria(cli: &Cli, file: &str) -> Outcome {
    let text = std::fs::read_to_string(file).map_err(|e| Failure { code: EXIT_INPUT, message: format!("{file}: {e}") })?;
    let input: SingularCriteriaInput =
        serde_json::from_str(&text).map_err(|e| Failure { code: EXIT_INPUT, message: format!("{file}: {e}") })?;
    let verdicts = thresholds::singular_criteria(&input)?;
    let code = if verdicts.iter().any(|v| v.status == VerdictStatus::CriterionSatisfied) { EXIT_OK } else { EXIT_INCONCLUSIVE };
    if cli.json {
        return Ok((json(&verdicts), code));
    }
    if verdicts.is_empty() {
        return Ok(("no criterion applies to the asserted facts\n".into(), code));
    }
    let blocks: Vec<String> = verdicts.iter().map(verdict_text).collect();
    Ok((blocks.join("\n"), code))
}

fn catalog(cli: &Cli, action: &CatalogCmd) -> Outcome {
    match action {
        CatalogCmd::List => {
            if cli.json {
                return Ok((json(&pairfile::CATALOG_NAMES), EXIT_OK));
            }
            let mut out = String::new();
            for lp in pairfile::catalog_all() {
                out.push_str(&format!(
                    "{}{}  n = {}  L^n = {}  c1(X).L^(n-1) = {}\n",
                    pairfile::CATALOG_PREFIX,
                    lp.pair.name,
                    lp.pair.dimension,
                    lp.pair.l_top,
                    lp.pair.cx_l
                ));
            }
            Ok((out, EXIT_OK))
        }
        CatalogCmd::Show { name } => {
            let name = name.strip_prefix(pairfile::CATALOG_PREFIX).unwrap_or(name);
            let lp = pairfile::catalog(name).ok_or_else(|| Failure {
                code: EXIT_INPUT,
                message: format!("unknown catalog entry {name:?}; known: {}", pairfile::CATALOG_NAMES.join(", ")),
            })?;
            Ok((json(&lp.to_file()), EXIT_OK))
        }
    }
}
