//! `bohr-cert`: certification reports, constant tables, scans and sampling
//! summaries on top of `bohr-core`.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use bohr_core::certify::{certify_theorem, Certificate, CertifyOptions, Overrides, Verdict};
use bohr_core::constants::{remark_consistency, RemarkEquation, SharpConstants, DEFAULT_ROOT_TOL};
use bohr_core::functionals::{envelope, proof_function};
use bohr_core::lemma::bombieri_sup;
use bohr_core::radius::bohr_radius_with_grid;
use bohr_core::sampler::{run_suite, Family, SuiteConfig, SLACK_TOL};
use bohr_core::series::DEFAULT_ORDER;
use bohr_core::{FunctionalKind, FunctionalSpec, ProofFunctionKind};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const EXIT_USAGE: i32 = 3;
pub const THREADS_ENV: &str = "BOHR_CERT_THREADS";

const DEFAULT_GRID: usize = 10_000;
const DEFAULT_RADIUS_TOL: f64 = 1e-9;
const MAX_WITNESSES: usize = 20;
const LAMBDA_SENSITIVITY: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(name = "bohr-cert", version, about = "Certify sharp Bohr-type inequalities")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Emit the report as JSON instead of a table.
    #[arg(long, global = true)]
    pub json: bool,
    /// Accuracy of the reported constants, or bisection tolerance (radius).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Grid points: 1/step of the certificate grids (verify) or |a_0| grid (radius).
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Base seed of the sampler.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sharp constants and remark residuals.
    Constants,
    /// Replay the proof of a theorem.
    Verify {
        /// 1, 2, 3, A, B1, B2 or classical.
        #[arg(long)]
        theorem: String,
        /// λ for theorems 1 and 2.
        #[arg(long)]
        lambda_override: Option<f64>,
        /// Area weight for theorem A, p for theorem 3.
        #[arg(long)]
        weight_override: Option<f64>,
    },
    /// Bohr radius of a functional by bisection.
    Radius {
        #[arg(long)]
        functional: String,
    },
    /// Tabulate a proof function to CSV.
    Scan {
        #[arg(long)]
        function: ScanFunction,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        step: f64,
        /// Output path; `-` writes the CSV to stdout.
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Randomized property trials.
    Sample {
        /// Functional id or `all`.
        #[arg(long)]
        functional: String,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        /// Fixed degree; cycles through 0..=5 when absent.
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, value_enum, default_value_t = FamilyArg::Blaschke)]
        family: FamilyArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScanFunction {
    Phi1,
    Psi1,
    Phi2,
    Psi2,
    Envelope1,
    Envelope2,
    Envelope3,
    Bombieri,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Blaschke,
    Polynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportWitness {
    pub source: String,
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub verdict: Verdict,
    pub constants: BTreeMap<String, f64>,
    pub certificates: Vec<Certificate>,
    pub witnesses: Vec<ReportWitness>,
    pub min_slack: Option<f64>,
    pub elapsed_ms: u64,
}

impl Report {
    fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            params: BTreeMap::new(),
            verdict: Verdict::Verified,
            constants: BTreeMap::new(),
            certificates: Vec::new(),
            witnesses: Vec::new(),
            min_slack: None,
            elapsed_ms: 0,
        }
    }

    fn param(&mut self, key: &str, value: impl Serialize) {
        self.params
            .insert(key.to_string(), serde_json::to_value(value).expect("serializable"));
    }

    fn constant(&mut self, key: &str, value: f64) {
        self.constants.insert(key.to_string(), sig12(value));
    }

    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command     {}", self.command);
        let _ = writeln!(s, "verdict     {}", verdict_name(self.verdict));
        for (k, v) in &self.params {
            let _ = writeln!(s, "param       {k:<22} {v}");
        }
        if !self.constants.is_empty() {
            let _ = writeln!(s, "\n{:<24} {:>22} {:>14}", "constant", "value", "rounded");
            for (k, v) in &self.constants {
                let _ = writeln!(s, "{k:<24} {:>22} {:>14}", fmt_sig12(*v), rounded(k, *v));
            }
        }
        if !self.certificates.is_empty() {
            let _ = writeln!(s, "\n{:<28} {:<13} {:>16} {:>16}", "certificate", "verdict", "min", "max");
            for c in &self.certificates {
                let _ = writeln!(
                    s,
                    "{:<28} {:<13} {:>16.9e} {:>16.9e}",
                    c.target,
                    verdict_name(c.verdict),
                    c.min_value,
                    c.max_value
                );
            }
        }
        if !self.witnesses.is_empty() {
            let _ = writeln!(s, "\n{:<36} {:>20} {:>20}", "witness", "t", "value");
            for w in &self.witnesses {
                let _ = writeln!(s, "{:<36} {:>20.12} {:>20.12e}", w.source, w.t, w.value);
            }
        }
        if let Some(m) = self.min_slack {
            let _ = writeln!(s, "\nmin_slack   {m:.6e}");
        }
        let _ = writeln!(s, "elapsed_ms  {}", self.elapsed_ms);
        s
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Verified => "verified",
        Verdict::Violated => "violated",
        Verdict::Inconclusive => "inconclusive",
    }
}

/// Rounds to 12 significant digits.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn fmt_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = 11 - x.abs().log10().floor() as i32;
    if (0..=20).contains(&digits) {
        format!("{x:.*}", digits as usize)
    } else {
        format!("{x:.11e}")
    }
}

// The precision in which the constants are usually quoted.
fn rounded(name: &str, x: f64) -> String {
    if name.starts_with("lambda") {
        format!("{x:.4}")
    } else if name.contains("residual") {
        format!("{x:.1e}")
    } else {
        format!("{x:.6}")
    }
}

/// Outcome of one invocation: exit code plus the bytes for stdout/stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn usage(msg: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            stdout: String::new(),
            stderr: msg.into(),
        }
    }
}

type CmdResult<T> = std::result::Result<T, String>;

fn core_err(e: bohr_core::Error) -> String {
    e.to_string()
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome::usage(text),
            };
        }
    };
    match execute(&cli) {
        Ok(out) => out,
        Err(msg) => Outcome::usage(format!("error: {msg}\n")),
    }
}

fn emit(report: Report, common: &Common) -> Outcome {
    let stdout = if common.json {
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    } else {
        report.render_table()
    };
    Outcome {
        code: report.verdict.exit_code(),
        stdout,
        stderr: String::new(),
    }
}

fn execute(cli: &Cli) -> CmdResult<Outcome> {
    let start = Instant::now();
    let c = &cli.common;
    if let Some(tol) = c.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(format!("--tol must be positive, got {tol}"));
        }
    }
    if c.grid == Some(0) {
        return Err("--grid must be positive".into());
    }
    let mut report = match &cli.command {
        Command::Constants => cmd_constants(c)?,
        Command::Verify {
            theorem,
            lambda_override,
            weight_override,
        } => cmd_verify(c, theorem, *lambda_override, *weight_override)?,
        Command::Radius { functional } => cmd_radius(c, functional)?,
        Command::Scan {
            function,
            from,
            to,
            step,
            out,
        } => {
            let csv = scan_csv(*function, *from, *to, *step)?;
            if out.as_os_str() == "-" {
                return Ok(Outcome {
                    code: 0,
                    stdout: csv.text,
                    stderr: String::new(),
                });
            }
            std::fs::File::create(out)
                .and_then(|mut f| f.write_all(csv.text.as_bytes()))
                .map_err(|e| format!("cannot write {}: {e}", out.display()))?;
            let mut r = Report::new("scan");
            r.param("function", format!("{function:?}").to_lowercase());
            r.param("from", from);
            r.param("to", to);
            r.param("step", step);
            r.param("out", out.display().to_string());
            r.param("rows", csv.rows);
            r.constant("min_value", csv.min.1);
            r.constant("argmin_t", csv.min.0);
            r.constant("max_value", csv.max.1);
            r.constant("argmax_t", csv.max.0);
            r
        }
        Command::Sample {
            functional,
            trials,
            degree,
            family,
        } => cmd_sample(c, functional, *trials, *degree, *family)?,
    };
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(emit(report, c))
}

fn cmd_constants(c: &Common) -> CmdResult<Report> {
    let tol = c.tol.unwrap_or(DEFAULT_ROOT_TOL);
    // |dλ/da| is about 480 at both roots, so the roots get three more digits
    // than the tolerance asked for the reported values.
    let root_tol = (tol * LAMBDA_SENSITIVITY).max(1e-18);
    let k = SharpConstants::compute(root_tol).map_err(core_err)?;
    let mut r = Report::new("constants");
    r.param("tol", tol);
    r.param("root_tol", root_tol);
    r.constant("a1", k.a1.value);
    r.constant("lambda1", k.lambda1);
    r.constant("a2", k.a2.value);
    r.constant("lambda2", k.lambda2);
    r.constant("r0", k.r0);
    r.constant("p", k.p);
    let res1 = remark_consistency(RemarkEquation::Thm1Quintic);
    let res2 = remark_consistency(RemarkEquation::Thm2Quartic);
    r.constant("remark1_residual", res1);
    r.constant("remark2_residual", res2);
    r.param("a1_bracket", k.a1.bracket);
    r.param("a2_bracket", k.a2.bracket);
    let unique = k.a1.sign_change_count == 1 && k.a2.sign_change_count == 1;
    r.verdict = if unique && res1 < 1e-10 && res2 < 1e-10 {
        Verdict::Verified
    } else {
        Verdict::Inconclusive
    };
    Ok(r)
}

pub fn parse_theorem(id: &str) -> Option<FunctionalKind> {
    match id.to_ascii_lowercase().as_str() {
        "1" | "thm1" => Some(FunctionalKind::Thm1),
        "2" | "thm2" => Some(FunctionalKind::Thm2),
        "3" | "thm3" => Some(FunctionalKind::Thm3),
        "a" | "thma" => Some(FunctionalKind::ThmA),
        "b1" | "thmb1" => Some(FunctionalKind::ThmB1),
        "b2" | "thmb2" => Some(FunctionalKind::ThmB2),
        "classical" => Some(FunctionalKind::Classical),
        _ => None,
    }
}

fn cmd_verify(
    c: &Common,
    theorem: &str,
    lambda: Option<f64>,
    weight: Option<f64>,
) -> CmdResult<Report> {
    let kind = parse_theorem(theorem).ok_or_else(|| format!("unknown theorem '{theorem}'"))?;
    let grid = c.grid.unwrap_or(DEFAULT_GRID);
    let opts = CertifyOptions {
        grid_step: 1.0 / grid as f64,
    };
    let overrides = Overrides { lambda, weight };
    let t = certify_theorem(kind, &overrides, &opts).map_err(core_err)?;
    let mut r = Report::new("verify");
    r.param("theorem", kind.id());
    r.param("grid", grid);
    r.param("grid_step", opts.grid_step);
    if let Some(l) = lambda {
        r.param("lambda_override", l);
    }
    if let Some(w) = weight {
        r.param("weight_override", w);
    }
    r.constant("radius", t.radius);
    match kind {
        FunctionalKind::Thm1 | FunctionalKind::Thm2 => r.constant("lambda", t.spec.lambda),
        FunctionalKind::ThmA => r.constant("area_weight", t.spec.area_weight),
        FunctionalKind::Thm3 => r.constant("p", t.spec.p_weight),
        _ => {}
    }
    for cert in &t.certificates {
        let include = cert.verdict != Verdict::Verified
            || cert.target.ends_with("/sharpness")
            || cert.target.ends_with("/extremal_equality");
        if include {
            for w in &cert.witnesses {
                r.witnesses.push(ReportWitness {
                    source: cert.target.clone(),
                    t: w.t,
                    value: w.value,
                });
            }
        }
    }
    r.verdict = t.verdict;
    r.certificates = t.certificates;
    Ok(r)
}

fn parse_functional(id: &str) -> CmdResult<FunctionalKind> {
    FunctionalKind::from_id(id).ok_or_else(|| {
        let ids: Vec<&str> = FunctionalKind::ALL.iter().map(|k| k.id()).collect();
        format!("unknown functional '{id}' (expected one of {})", ids.join(", "))
    })
}

fn cmd_radius(c: &Common, functional: &str) -> CmdResult<Report> {
    let kind = parse_functional(functional)?;
    let tol = c.tol.unwrap_or(DEFAULT_RADIUS_TOL);
    let grid = c.grid.unwrap_or(DEFAULT_GRID);
    let res = bohr_radius_with_grid(&FunctionalSpec::sharp(kind), tol, grid).map_err(core_err)?;
    let mut r = Report::new("radius");
    r.param("functional", kind.id());
    r.param("tol", tol);
    r.param("grid", grid);
    r.param("iterations", res.iterations);
    r.param("saturated", res.saturated);
    r.constant("radius", res.radius);
    r.constant("bracket_lo", res.bracket.0);
    r.constant("bracket_hi", res.bracket.1);
    r.constant("worst_param", res.worst_param);
    r.constant("expected_radius", kind.radius());
    Ok(r)
}

fn cmd_sample(
    c: &Common,
    functional: &str,
    trials: usize,
    degree: Option<usize>,
    family: FamilyArg,
) -> CmdResult<Report> {
    if trials == 0 {
        return Err("--trials must be at least 1".into());
    }
    let specs: Vec<FunctionalSpec> = if functional.eq_ignore_ascii_case("all") {
        FunctionalKind::ALL.iter().map(|&k| FunctionalSpec::sharp(k)).collect()
    } else {
        vec![FunctionalSpec::sharp(parse_functional(functional)?)]
    };
    let seed = c.seed.unwrap_or(0);
    let cfg = SuiteConfig {
        trials,
        degree,
        seed,
        family: match family {
            FamilyArg::Blaschke => Family::Blaschke,
            FamilyArg::Polynomial => Family::Polynomial,
        },
        order: DEFAULT_ORDER,
    };
    let suite = run_suite(&specs, &cfg).map_err(core_err)?;
    let mut r = Report::new("sample");
    r.param("functional", functional.to_ascii_lowercase());
    r.param("trials", trials);
    r.param("degree", degree);
    r.param("seed", seed);
    r.param("family", format!("{family:?}").to_lowercase());
    for k in &suite.per_kind {
        r.param(&format!("histogram/{}", k.kind.id()), k.histogram);
        r.constant(&format!("min_slack/{}", k.kind.id()), k.min_slack);
        r.witnesses.push(ReportWitness {
            source: format!("{} worst: trial {} degree {}", k.kind.id(), k.witness.trial, k.witness.degree),
            t: k.r,
            value: k.min_slack,
        });
    }
    for v in suite.violations.iter().take(MAX_WITNESSES) {
        r.witnesses.push(ReportWitness {
            source: format!("{} violation: trial {} degree {}", v.kind.id(), v.trial, v.degree),
            t: v.kind.radius(),
            value: v.slack,
        });
    }
    r.min_slack = Some(suite.min_slack);
    r.verdict = if suite.min_slack < SLACK_TOL {
        Verdict::Violated
    } else {
        Verdict::Verified
    };
    Ok(r)
}

pub struct Scan {
    pub text: String,
    pub rows: usize,
    pub min: (f64, f64),
    pub max: (f64, f64),
}

/// Grid from `from` in steps of `step`, with `to` appended unless the last
/// node already hits it.
pub fn scan_nodes(from: f64, to: f64, step: f64) -> CmdResult<Vec<f64>> {
    if !(from.is_finite() && to.is_finite() && step.is_finite()) || step <= 0.0 || from > to {
        return Err(format!("invalid scan range from {from} to {to} step {step}"));
    }
    let n = ((to - from) / step * (1.0 + 1e-12)).floor() as usize;
    if n > 10_000_000 {
        return Err("scan grid too large".into());
    }
    let mut nodes: Vec<f64> = (0..=n).map(|i| from + i as f64 * step).filter(|&t| t <= to).collect();
    if nodes.last().is_none_or(|&t| to - t > 1e-9 * step) {
        nodes.push(to);
    }
    Ok(nodes)
}

fn scan_value(f: ScanFunction, t: f64) -> CmdResult<f64> {
    let consts = bohr_core::constants::sharp_constants();
    let third = 1.0 / 3.0;
    let v = match f {
        ScanFunction::Phi1 => proof_function(ProofFunctionKind::Phi1, t, consts.lambda1),
        ScanFunction::Psi1 => proof_function(ProofFunctionKind::Psi1, t, consts.lambda1),
        ScanFunction::Phi2 => proof_function(ProofFunctionKind::Phi2, t, consts.lambda2),
        ScanFunction::Psi2 => proof_function(ProofFunctionKind::Psi2, t, consts.lambda2),
        ScanFunction::Envelope1 => envelope(&FunctionalSpec::sharp(FunctionalKind::Thm1), t, third),
        ScanFunction::Envelope2 => envelope(&FunctionalSpec::sharp(FunctionalKind::Thm2), t, third),
        ScanFunction::Envelope3 => envelope(&FunctionalSpec::sharp(FunctionalKind::Thm3), t, consts.r0),
        ScanFunction::Bombieri => bombieri_sup(t),
    };
    v.map_err(core_err)
}

pub fn scan_csv(f: ScanFunction, from: f64, to: f64, step: f64) -> CmdResult<Scan> {
    use rayon::prelude::*;
    let nodes = scan_nodes(from, to, step)?;
    let values = nodes
        .par_iter()
        .map(|&t| scan_value(f, t))
        .collect::<CmdResult<Vec<f64>>>()?;
    let mut text = String::with_capacity(nodes.len() * 48);
    text.push_str("t,value\n");
    let mut min = (f64::NAN, f64::INFINITY);
    let mut max = (f64::NAN, f64::NEG_INFINITY);
    for (&t, &v) in nodes.iter().zip(&values) {
        let _ = writeln!(text, "{t:.16e},{v:.16e}");
        if v < min.1 {
            min = (t, v);
        }
        if v > max.1 {
            max = (t, v);
        }
    }
    Ok(Scan {
        text,
        rows: nodes.len(),
        min,
        max,
    })
}

/// Applies `BOHR_CERT_THREADS` to the global pool.
pub fn configure_threads(value: Option<String>) -> CmdResult<()> {
    let Some(v) = value else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{v}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_grid_counts() {
        assert_eq!(scan_nodes(0.3333, 1.0, 0.001).unwrap().len(), 668);
        let n = scan_nodes(0.0, 1.0, 0.25).unwrap();
        assert_eq!(n, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!(scan_nodes(1.0, 0.0, 0.1).is_err());
        assert!(scan_nodes(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn sig12_rounding() {
        assert_eq!(sig12(0.567283936817405), 0.567283936817);
        assert_eq!(sig12(18.609549031341185), 18.6095490313);
        assert_eq!(fmt_sig12(0.567283936817), "0.567283936817");
        assert_eq!(fmt_sig12(18.6095490313), "18.6095490313");
    }

    #[test]
    fn theorem_ids() {
        assert_eq!(parse_theorem("A"), Some(FunctionalKind::ThmA));
        assert_eq!(parse_theorem("b1"), Some(FunctionalKind::ThmB1));
        assert_eq!(parse_theorem("classical"), Some(FunctionalKind::Classical));
        assert_eq!(parse_theorem("4"), None);
    }

    #[test]
    fn threads_env_validation() {
        assert!(configure_threads(Some("zero".into())).is_err());
        assert!(configure_threads(Some("0".into())).is_err());
        assert!(configure_threads(None).is_ok());
    }
}
