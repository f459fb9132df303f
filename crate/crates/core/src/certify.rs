//! Machine-checked versions of the case analyses in the proofs.
//!
//! Sign claims are checked on a floating-point grid with Lipschitz or
//! second-order Taylor margins computed from coefficient majorants; cofactor
//! claims are checked exactly with Sturm sequences. No directed rounding is
//! used, so the rigor level is "binary64 grid plus explicit margins".

use num::rational::BigRational;
use num::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::{exact, ratio, sharp_constants, sqrt5_minus_2, RealPolynomial};
use crate::error::{check_domain, Error, Result};
use crate::functionals::{
    branch_at, envelope_dr, envelope_on_branch, envelope_unchecked, limit_slope, phi_coefficients,
    proof_function, psi_derivative, psi_second_derivative_bound, small_branch_lipschitz,
    thm3_coefficients, thm3_delta_unchecked, upper_deficit, FunctionalKind, FunctionalSpec,
    ProofFunctionKind, AREA_WEIGHT,
};
use crate::lemma::{area_bound, TailBranch};
use crate::numeric::{derivative_coeffs, derivative_majorant, grid_nodes, horner};
use crate::radius::{family_worst, grid_max, DEFAULT_GRID, GRID_TOP};

/// Default grid step of the sign certificates.
pub const DEFAULT_GRID_STEP: f64 = 1e-4;
/// Radius of the exclusion window around a double root.
pub const WINDOW_RADIUS: f64 = 1e-3;
/// Minimal centered second difference inside a window.
pub const SECOND_DIFFERENCE_THRESHOLD: f64 = 10.0;
/// Perturbation used by the sharpness certificates.
pub const SHARPNESS_STEP: f64 = 0.01;

const VIOLATION_REL: f64 = 1e-9;
const WINDOW_CENTER_REL: f64 = 1e-6;
const EXCESS_TOL: f64 = 1e-12;
const FACTOR_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Verified,
    Violated,
    Inconclusive,
}

impl Verdict {
    /// Violated dominates Inconclusive, which dominates Verified.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Violated, _) | (_, Violated) => Violated,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Verified,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Verified => 0,
            Verdict::Violated => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExclusionWindow {
    pub center: f64,
    pub radius: f64,
}

/// A checked claim about one target function on one interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub target: String,
    pub interval: (f64, f64),
    pub grid_step: f64,
    pub derivative_bound: f64,
    pub min_value: f64,
    pub max_value: f64,
    pub exclusion_windows: Vec<ExclusionWindow>,
    pub verdict: Verdict,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl Certificate {
    fn new(target: impl Into<String>, interval: (f64, f64)) -> Self {
        Self {
            target: target.into(),
            interval,
            grid_step: 0.0,
            derivative_bound: 0.0,
            min_value: f64::NAN,
            max_value: f64::NAN,
            exclusion_windows: Vec::new(),
            verdict: Verdict::Inconclusive,
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    pub grid_step: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            grid_step: DEFAULT_GRID_STEP,
        }
    }
}

impl CertifyOptions {
    fn validate(&self) -> Result<()> {
        check_domain(
            "grid_step",
            self.grid_step,
            self.grid_step > 0.0 && self.grid_step <= 0.01,
            "(0, 0.01]",
        )
    }
}

fn eval_nodes(f: impl Fn(f64) -> f64 + Sync, nodes: &[f64]) -> Vec<f64> {
    nodes.par_iter().map(|&t| f(t)).collect()
}

fn min_max(values: &[f64]) -> (usize, f64, f64) {
    let mut arg = 0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v < lo {
            lo = v;
            arg = i;
        }
        hi = hi.max(v);
    }
    (arg, lo, hi)
}

/// Φ >= 0 on [1/3, 1] with a double root at `root`.
///
/// Outside the window around `root` every grid cell must pass either the
/// first-order test min(Φ(t_i), Φ(t_{i+1})) − K1 h/2 >= 0 or the midpoint
/// test Φ(m) − |Φ'(m)| h/2 − K2 h²/8 >= 0. Inside the window Φ'' >= m > 0,
/// so Φ >= Φ(c) − Φ'(c)²/(2m) there.
pub fn certify_nonneg(
    kind: ProofFunctionKind,
    lambda: f64,
    root: f64,
    opts: &CertifyOptions,
) -> Result<Certificate> {
    opts.validate()?;
    let coeffs = phi_coefficients(kind, lambda)
        .ok_or_else(|| Error::Precondition(format!("{} is not a Phi function", kind.id())))?;
    let (lo, hi) = (1.0 / 3.0, 1.0);
    check_domain("root", root, root > lo && root < hi, "(1/3, 1)")?;
    check_domain("lambda", lambda, lambda >= 0.0, "[0, inf)")?;

    let d1 = derivative_coeffs(&coeffs, 1);
    let d2 = derivative_coeffs(&coeffs, 2);
    let k1 = derivative_majorant(&coeffs, 1);
    let k2 = derivative_majorant(&coeffs, 2);
    let k3 = derivative_majorant(&coeffs, 3);
    let scale: f64 = coeffs.iter().map(|c| c.abs()).sum();

    let (nodes, h) = grid_nodes(lo, hi, opts.grid_step);
    let values = eval_nodes(|t| horner(&coeffs, t), &nodes);
    let (arg, min_v, max_v) = min_max(&values);

    let mut cert = Certificate::new(format!("{} >= 0", kind.id()), (lo, hi));
    cert.grid_step = h;
    cert.derivative_bound = k1;
    cert.min_value = min_v;
    cert.max_value = max_v;
    cert.note(format!(
        "lambda = {lambda}; derivative majorants on [0,1]: |phi'| <= {k1:.6e}, |phi''| <= {k2:.6e}, |phi'''| <= {k3:.6e}"
    ));

    if min_v < -VIOLATION_REL * scale {
        cert.verdict = Verdict::Violated;
        cert.witnesses.push(Witness {
            t: nodes[arg],
            value: min_v,
        });
        return Ok(cert);
    }

    let window = ExclusionWindow {
        center: root,
        radius: WINDOW_RADIUS,
    };
    let (w_lo, w_hi) = (root - WINDOW_RADIUS, root + WINDOW_RADIUS);
    cert.exclusion_windows.push(window);

    let failed_cells: Vec<usize> = (0..nodes.len() - 1)
        .into_par_iter()
        .filter(|&i| {
            let (a, b) = (nodes[i], nodes[i + 1]);
            if a >= w_lo && b <= w_hi {
                return false;
            }
            if values[i].min(values[i + 1]) - k1 * h / 2.0 >= 0.0 {
                return false;
            }
            let m = 0.5 * (a + b);
            let lower = horner(&coeffs, m) - horner(&d1, m).abs() * h / 2.0 - k2 * h * h / 8.0;
            lower < 0.0
        })
        .collect();

    // window: convexity and a near-zero center
    let center = horner(&coeffs, root);
    let slope = horner(&d1, root);
    let second_diff = (horner(&coeffs, root + WINDOW_RADIUS) - 2.0 * center
        + horner(&coeffs, root - WINDOW_RADIUS))
        / (WINDOW_RADIUS * WINDOW_RADIUS);
    let curvature_floor = horner(&d2, root) - k3 * WINDOW_RADIUS;
    let window_lower = if curvature_floor > 0.0 {
        center - slope * slope / (2.0 * curvature_floor)
    } else {
        f64::NEG_INFINITY
    };
    cert.note(format!(
        "window at {root}: phi(c) = {center:.3e}, phi'(c) = {slope:.3e}, second difference = {second_diff:.6}, phi'' >= {curvature_floor:.6}, lower bound {window_lower:.3e}"
    ));
    cert.witnesses.push(Witness { t: lo, value: values[0] });
    cert.witnesses.push(Witness {
        t: root,
        value: center,
    });
    cert.witnesses.push(Witness {
        t: hi,
        value: *values.last().unwrap(),
    });
    cert.min_value = cert.min_value.min(window_lower);

    let window_ok = center.abs() <= WINDOW_CENTER_REL * scale
        && second_diff >= SECOND_DIFFERENCE_THRESHOLD
        && curvature_floor > 0.0
        && window_lower >= -VIOLATION_REL * scale;
    if !window_ok && window_lower < -VIOLATION_REL * scale && curvature_floor > 0.0 {
        cert.verdict = Verdict::Violated;
        cert.witnesses.push(Witness {
            t: root - slope / curvature_floor,
            value: window_lower,
        });
        return Ok(cert);
    }
    if !failed_cells.is_empty() {
        cert.note(format!(
            "{} grid cells failed both margin tests; first at t = {}",
            failed_cells.len(),
            nodes[failed_cells[0]]
        ));
    }
    cert.verdict = if window_ok && failed_cells.is_empty() {
        Verdict::Verified
    } else {
        Verdict::Inconclusive
    };
    Ok(cert)
}

/// Ψ' > 0 on [0, 1/3] and max Ψ = Ψ(1/3) <= `max_target`.
pub fn certify_monotone_increasing(
    kind: ProofFunctionKind,
    lambda: f64,
    max_target: f64,
    opts: &CertifyOptions,
) -> Result<Certificate> {
    opts.validate()?;
    if kind.is_phi() {
        return Err(Error::Precondition(format!("{} is not a Psi function", kind.id())));
    }
    check_domain("lambda", lambda, lambda >= 0.0, "[0, inf)")?;
    let (lo, hi) = (0.0, 1.0 / 3.0);
    let k = psi_second_derivative_bound(kind, hi, lambda);
    let (nodes, h) = grid_nodes(lo, hi, opts.grid_step);
    let slopes = eval_nodes(|t| psi_derivative(kind, t, lambda).unwrap(), &nodes);
    let values = eval_nodes(|t| proof_function(kind, t, lambda).unwrap(), &nodes);
    let (slope_arg, min_slope, _) = min_max(&slopes);
    let (_, _, max_v) = min_max(&values);
    let max_arg = values.iter().position(|&v| v == max_v).unwrap();

    let mut cert = Certificate::new(format!("{} increasing, max <= {max_target}", kind.id()), (lo, hi));
    cert.grid_step = h;
    cert.derivative_bound = k;
    cert.min_value = min_slope;
    cert.max_value = max_v;
    cert.note(format!(
        "lambda = {lambda}; min_value is the minimal derivative on the grid, derivative_bound bounds |psi''|"
    ));
    cert.witnesses.push(Witness {
        t: nodes[max_arg],
        value: max_v,
    });

    let mut violated = false;
    if min_slope < 0.0 {
        violated = true;
        cert.note("derivative negative at a grid node: not increasing");
        cert.witnesses.push(Witness {
            t: nodes[slope_arg],
            value: min_slope,
        });
    }
    if max_v > max_target {
        violated = true;
        cert.note(format!("maximum {max_v} exceeds the target {max_target}"));
    }
    if violated {
        cert.verdict = Verdict::Violated;
        return Ok(cert);
    }
    let cells_ok = slopes
        .windows(2)
        .all(|w| w[0].min(w[1]) - k * h / 2.0 > 0.0);
    cert.verdict = if cells_ok {
        Verdict::Verified
    } else {
        Verdict::Inconclusive
    };
    Ok(cert)
}

/// Envelope on the small branch (a < r) stays <= 1 at radius r, checked with
/// a Lipschitz bound in a.
pub fn certify_lower_branch(spec: &FunctionalSpec, r: f64, opts: &CertifyOptions) -> Result<Certificate> {
    opts.validate()?;
    let l = small_branch_lipschitz(spec, r);
    let (nodes, h) = grid_nodes(0.0, r, opts.grid_step);
    let values = eval_nodes(
        |a| envelope_on_branch(spec, a, r, TailBranch::Small),
        &nodes,
    );
    let (_, min_v, max_v) = min_max(&values);
    let arg = values.iter().position(|&v| v == max_v).unwrap();
    let mut cert = Certificate::new(format!("{} lower branch <= 1", spec.kind.id()), (0.0, r));
    cert.grid_step = h;
    cert.derivative_bound = l;
    cert.min_value = min_v;
    cert.max_value = max_v;
    cert.witnesses.push(Witness {
        t: nodes[arg],
        value: max_v,
    });
    cert.verdict = if max_v > 1.0 + EXCESS_TOL {
        Verdict::Violated
    } else if values.windows(2).all(|w| w[0].max(w[1]) + l * h / 2.0 <= 1.0) {
        Verdict::Verified
    } else {
        Verdict::Inconclusive
    };
    Ok(cert)
}

/// Exact check that a polynomial cofactor is positive on [lo, 1): no root in
/// the open interval (Sturm) and positive at lo. A root at t = 1 is allowed.
pub fn certify_cofactor_positive(
    target: &str,
    cofactor: &RealPolynomial,
    lo: f64,
) -> Result<Certificate> {
    let lo_q = exact(lo)?;
    let one = BigRational::from_integer(1.into());
    let count = cofactor.count_roots(&lo_q, &one);
    let at_lo = cofactor.eval_exact(&lo_q);
    let at_one = cofactor.eval_exact(&one);
    let mut cert = Certificate::new(target.to_string(), (lo, 1.0));
    cert.min_value = crate::constants::RealPolynomial::eval(cofactor, lo).min(cofactor.eval(1.0));
    cert.max_value = cofactor.eval(lo).max(cofactor.eval(1.0));
    cert.witnesses.push(Witness {
        t: lo,
        value: cofactor.eval(lo),
    });
    cert.witnesses.push(Witness {
        t: 1.0,
        value: cofactor.eval(1.0),
    });
    cert.note(format!(
        "Sturm count of cofactor roots in ({lo}, 1): {count}; exact sign at lo: {}; exact value at 1 is {}",
        if at_lo.is_positive() { "+" } else if at_lo.is_zero() { "0" } else { "-" },
        if at_one.is_zero() { "zero".to_string() } else if at_one.is_positive() { "positive".to_string() } else { "negative".to_string() },
    ));
    cert.verdict = if count == 0 && at_lo.is_positive() && !at_one.is_negative() {
        Verdict::Verified
    } else {
        Verdict::Inconclusive
    };
    Ok(cert)
}

/// Sign checks of −9 + 4√5, −47 + 21√5 and −161 + 72√5.
pub fn thm3_coefficient_certificate() -> Certificate {
    let c = thm3_coefficients();
    let mut cert = Certificate::new("thm3 quadratic coefficients < 0", (0.0, 1.0));
    for (i, &v) in c.iter().enumerate() {
        cert.witnesses.push(Witness { t: i as f64, value: v });
    }
    cert.min_value = c.iter().cloned().fold(f64::INFINITY, f64::min);
    cert.max_value = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    cert.note("witness t = index of the coefficient (constant, a, a^2); values computed as -1/(9+4√5), -4/(47+21√5), -1/(161+72√5)");
    cert.note("all three negative and a >= 0 imply the quadratic factor is <= 0 on [0, 1]");
    cert.verdict = if cert.max_value < 0.0 {
        Verdict::Verified
    } else {
        Verdict::Violated
    };
    cert
}

/// Overrides of the constants of a theorem.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    /// λ for Theorems 1 and 2.
    pub lambda: Option<f64>,
    /// Area weight for Theorem A (16/9) and Theorem 3 (p).
    pub weight: Option<f64>,
}

/// Bundle of the five sub-certificates of one theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub theorem: FunctionalKind,
    pub spec: FunctionalSpec,
    pub radius: f64,
    pub certificates: Vec<Certificate>,
    pub verdict: Verdict,
}

impl TheoremReport {
    pub fn certificate(&self, suffix: &str) -> Option<&Certificate> {
        self.certificates
            .iter()
            .find(|c| c.target.ends_with(suffix) || c.target.contains(&format!("/{suffix}")))
    }
}

fn spec_with_overrides(kind: FunctionalKind, o: &Overrides) -> Result<FunctionalSpec> {
    let base = FunctionalSpec::sharp(kind);
    if o.lambda.is_some() && !matches!(kind, FunctionalKind::Thm1 | FunctionalKind::Thm2) {
        return Err(Error::Precondition(format!("{kind} has no lambda to override")));
    }
    if o.weight.is_some() && !matches!(kind, FunctionalKind::ThmA | FunctionalKind::Thm3) {
        return Err(Error::Precondition(format!("{kind} has no weight to override")));
    }
    Ok(match kind {
        FunctionalKind::Thm1 => FunctionalSpec::thm1(o.lambda.unwrap_or(base.lambda))?,
        FunctionalKind::Thm2 => FunctionalSpec::thm2(o.lambda.unwrap_or(base.lambda))?,
        FunctionalKind::ThmA => FunctionalSpec::thm_a(o.weight.unwrap_or(base.area_weight))?,
        FunctionalKind::Thm3 => FunctionalSpec::thm3(o.weight.unwrap_or(base.p_weight))?,
        _ => base,
    })
}

fn prefixed(kind: FunctionalKind, part: &str, mut cert: Certificate) -> Certificate {
    cert.notes.insert(0, format!("claim: {}", cert.target));
    cert.target = format!("{}/{part}", kind.id());
    cert
}

/// (i) the envelope is nondecreasing in r, so checking the radius suffices.
fn radius_reduction(spec: &FunctionalSpec, radius: f64) -> Certificate {
    const N: usize = 201;
    let mut min_dr = f64::INFINITY;
    let mut at = (0.0, 0.0);
    let mut jump: f64 = 0.0;
    for i in 0..N {
        let a = i as f64 / (N - 1) as f64 * GRID_TOP;
        for j in 1..N {
            let r = radius * j as f64 / (N - 1) as f64;
            let d = envelope_dr(spec, a, r, branch_at(a, r));
            if d < min_dr {
                min_dr = d;
                at = (a, r);
            }
        }
        if a > 0.0 && a <= radius {
            let small = envelope_on_branch(spec, a, a, TailBranch::Small);
            let large = envelope_on_branch(spec, a, a, TailBranch::Large);
            jump = jump.max((small - large).abs());
        }
    }
    let mut cert = Certificate::new("envelope nondecreasing in r", (0.0, radius));
    cert.grid_step = radius / (N - 1) as f64;
    cert.min_value = min_dr;
    cert.max_value = jump;
    cert.witnesses.push(Witness {
        t: at.0,
        value: min_dr,
    });
    cert.note(format!(
        "min of d(envelope)/dr over a {N}x{N} grid at (a, r) = ({:.4}, {:.4}); each term of the derivative is nonnegative for nonnegative weights",
        at.0, at.1
    ));
    cert.note(format!("max branch jump at a = r: {jump:.3e} (max_value)"));
    cert.verdict = if min_dr >= 0.0 && jump <= 1e-12 {
        Verdict::Verified
    } else {
        Verdict::Violated
    };
    cert
}

fn factorization_gap(spec: &FunctionalSpec, radius: f64, step: f64) -> f64 {
    let (nodes, _) = grid_nodes(radius, 1.0, step);
    nodes
        .iter()
        .map(|&t| {
            let direct = 1.0 - envelope_on_branch(spec, t, radius, TailBranch::Large);
            (direct - upper_deficit(spec, t)).abs()
        })
        .fold(0.0, f64::max)
}

fn cofactor_polynomial(spec: &FunctionalSpec) -> Result<RealPolynomial> {
    match spec.kind {
        FunctionalKind::Classical => RealPolynomial::from_integers(&[2]),
        FunctionalKind::ThmB2 => RealPolynomial::from_integers(&[15, 16, 1]),
        FunctionalKind::ThmB1 => {
            let r = sqrt5_minus_2();
            RealPolynomial::from_f64(&[2.0 + r, r])
        }
        FunctionalKind::ThmA => {
            let w = if spec.area_weight == AREA_WEIGHT {
                ratio(16, 9)
            } else {
                exact(spec.area_weight)?
            };
            let n = |k: i64| BigRational::from_integer(k.into());
            RealPolynomial::new(vec![
                n(54) - n(9) * &w,
                n(18) - n(18) * &w,
                n(-6) - n(9) * &w,
                n(-2),
            ])
        }
        _ => Err(Error::Precondition(format!("no polynomial cofactor for {}", spec.kind))),
    }
}

/// Largest excess of the functional over 1 on the large branch at the
/// kind's radius, found on a grid with refinement; computed from the
/// factored deficit.
fn upper_branch_excess(spec: &FunctionalSpec, radius: f64, step: f64) -> Witness {
    let n = (((1.0 - radius) / step).ceil() as usize + 1).max(2);
    let (t, value) = grid_max(|t| -upper_deficit(spec, t), radius, 1.0, n, true);
    Witness { t, value }
}

/// (ii) the case |a_0| >= r.
fn upper_branch(spec: &FunctionalSpec, radius: f64, opts: &CertifyOptions) -> Result<Certificate> {
    let kind = spec.kind;
    let gap = factorization_gap(spec, radius, 1e-3);
    let mut cert = match kind {
        FunctionalKind::Thm1 | FunctionalKind::Thm2 => {
            let c = sharp_constants();
            let (pk, root) = if kind == FunctionalKind::Thm1 {
                (ProofFunctionKind::Phi1, c.a1.value)
            } else {
                (ProofFunctionKind::Phi2, c.a2.value)
            };
            certify_nonneg(pk, spec.lambda, root, opts)?
        }
        FunctionalKind::Thm3 => {
            let mut cert = thm3_coefficient_certificate();
            let eps = spec.p_weight - sharp_constants().p;
            let w = upper_branch_excess(spec, radius, opts.grid_step);
            cert.note(format!(
                "p - 2(sqrt5 - 1) = {eps:.6e}; max of the factored delta on [{radius:.6}, 1]: {:.6e} at a = {:.6}",
                w.value, w.t
            ));
            if eps > 0.0 || w.value > EXCESS_TOL {
                if w.value > EXCESS_TOL {
                    cert.witnesses.push(w);
                    cert.verdict = Verdict::Violated;
                } else {
                    cert.verdict = Verdict::Inconclusive;
                }
            }
            cert
        }
        _ => {
            let poly = cofactor_polynomial(spec)?;
            let mut cert = certify_cofactor_positive("deficit cofactor > 0", &poly, radius)?;
            if cert.verdict != Verdict::Verified {
                let w = upper_branch_excess(spec, radius, opts.grid_step);
                if w.value > EXCESS_TOL {
                    cert.witnesses.push(w);
                    cert.verdict = Verdict::Violated;
                }
            }
            cert
        }
    };
    cert.note(format!(
        "factored deficit agrees with 1 - envelope to {gap:.3e} on [{radius:.6}, 1]"
    ));
    if gap > FACTOR_TOL && cert.verdict == Verdict::Verified {
        cert.verdict = Verdict::Inconclusive;
    }
    Ok(prefixed(kind, "upper_branch", cert))
}

/// (iii) the case |a_0| < r.
fn lower_branch(spec: &FunctionalSpec, radius: f64, opts: &CertifyOptions) -> Result<Certificate> {
    let cert = match spec.kind {
        FunctionalKind::Thm1 => {
            certify_monotone_increasing(ProofFunctionKind::Psi1, spec.lambda, 1.0, opts)?
        }
        FunctionalKind::Thm2 => {
            certify_monotone_increasing(ProofFunctionKind::Psi2, spec.lambda, 1.0, opts)?
        }
        _ => certify_lower_branch(spec, radius, opts)?,
    };
    Ok(prefixed(spec.kind, "lower_branch", cert))
}

fn extremal_point(kind: FunctionalKind) -> Option<f64> {
    let c = sharp_constants();
    match kind {
        FunctionalKind::Thm1 => Some(c.a1.value),
        FunctionalKind::Thm2 => Some(c.a2.value),
        _ => None,
    }
}

fn equality_tolerance(kind: FunctionalKind) -> f64 {
    match kind {
        FunctionalKind::Thm2 => 1e-5,
        _ => 1e-6,
    }
}

/// (iv) equality for the Moebius extremal (or in the limit a → 1).
fn extremal_equality(spec: &FunctionalSpec, radius: f64) -> Certificate {
    let tol = equality_tolerance(spec.kind);
    let mut cert = Certificate::new("equality attained by the extremal function", (0.0, 1.0));
    match extremal_point(spec.kind) {
        Some(a) => {
            let v = envelope_unchecked(spec, a, radius);
            cert.witnesses.push(Witness { t: a, value: v });
            cert.min_value = v;
            cert.max_value = v;
            cert.note(format!("envelope at a = {a} equals the functional of (a - z)/(1 - a z); tolerance {tol:e}"));
            cert.verdict = if (v - 1.0).abs() <= tol {
                Verdict::Verified
            } else {
                cert.note(if v > 1.0 {
                    "value above 1: the inequality fails at the extremal function"
                } else {
                    "value below 1: equality is not attained, the constant is not sharp"
                });
                Verdict::Violated
            };
        }
        None => {
            let a = GRID_TOP;
            let v = envelope_unchecked(spec, a, radius);
            let limit = envelope_unchecked(spec, 1.0, radius);
            let slope = limit_slope(spec.kind, radius);
            cert.witnesses.push(Witness { t: a, value: v });
            cert.witnesses.push(Witness { t: 1.0, value: limit });
            cert.min_value = v.min(limit);
            cert.max_value = v.max(limit);
            cert.note(format!(
                "equality in the limit a -> 1; first-order coefficient of 1 - envelope at the radius: {slope:.3e}"
            ));
            cert.verdict = if (limit - 1.0).abs() <= tol && (v - 1.0).abs() <= tol && slope.abs() <= 1e-12 {
                Verdict::Verified
            } else {
                Verdict::Violated
            };
        }
    }
    prefixed(spec.kind, "extremal_equality", cert)
}

/// (v) increasing the sharp constant by 0.01 breaks the inequality.
fn sharpness(spec: &FunctionalSpec, radius: f64, opts: &CertifyOptions) -> Result<Certificate> {
    let kind = spec.kind;
    let mut cert = Certificate::new("constant cannot be improved", (radius, 1.0));
    let witness = match kind {
        FunctionalKind::Thm1 | FunctionalKind::Thm2 => {
            let perturbed = if kind == FunctionalKind::Thm1 {
                FunctionalSpec::thm1(spec.lambda + SHARPNESS_STEP)?
            } else {
                FunctionalSpec::thm2(spec.lambda + SHARPNESS_STEP)?
            };
            cert.note(format!("lambda -> {}", perturbed.lambda));
            let a = extremal_point(kind).unwrap();
            let at_extremal = Witness {
                t: a,
                value: -upper_deficit(&perturbed, a),
            };
            if at_extremal.value > EXCESS_TOL {
                at_extremal
            } else {
                upper_branch_excess(&perturbed, radius, opts.grid_step)
            }
        }
        FunctionalKind::ThmA => {
            let perturbed = FunctionalSpec::thm_a(spec.area_weight + SHARPNESS_STEP)?;
            cert.note(format!("area weight -> {}", perturbed.area_weight));
            upper_branch_excess(&perturbed, radius, opts.grid_step)
        }
        FunctionalKind::Thm3 => {
            let eps = spec.p_weight + SHARPNESS_STEP - sharp_constants().p;
            cert.note(format!("p -> {}", spec.p_weight + SHARPNESS_STEP));
            let n = ((1.0 - radius) / opts.grid_step).ceil() as usize + 1;
            let (t, value) = grid_max(|a| thm3_delta_unchecked(a, eps), radius, 1.0, n, true);
            Witness { t, value }
        }
        _ => {
            let r = radius + SHARPNESS_STEP;
            cert.interval = (0.0, 1.0);
            cert.note(format!("radius -> {r}"));
            let fw = family_worst(spec, r, DEFAULT_GRID, true)?;
            Witness {
                t: fw.argmax_a,
                value: fw.sup_value - 1.0,
            }
        }
    };
    cert.note("witness value = functional - 1 for the perturbed constant (excess)");
    cert.witnesses.push(witness);
    cert.min_value = witness.value;
    cert.max_value = witness.value;
    cert.verdict = if witness.value > EXCESS_TOL {
        Verdict::Verified
    } else {
        Verdict::Violated
    };
    Ok(prefixed(kind, "sharpness", cert))
}

/// Replays the proof of one theorem: radius reduction, both branches of the
/// case split, extremal equality and sharpness.
pub fn certify_theorem(
    kind: FunctionalKind,
    overrides: &Overrides,
    opts: &CertifyOptions,
) -> Result<TheoremReport> {
    opts.validate()?;
    let spec = spec_with_overrides(kind, overrides)?;
    let radius = kind.radius();
    let certificates = vec![
        prefixed(kind, "radius_reduction", radius_reduction(&spec, radius)),
        upper_branch(&spec, radius, opts)?,
        lower_branch(&spec, radius, opts)?,
        extremal_equality(&spec, radius),
        sharpness(&spec, radius, opts)?,
    ];
    let verdict = certificates
        .iter()
        .fold(Verdict::Verified, |v, c| v.combine(c.verdict));
    Ok(TheoremReport {
        theorem: kind,
        spec,
        radius,
        certificates,
        verdict,
    })
}

/// Demonstration that no strictly positive term F(S_r) can be added to the
/// Theorem 1 functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Remark2Witness {
    pub function_id: String,
    pub a: f64,
    pub r: f64,
    /// S_r/π of the extremal function.
    pub area_ratio: f64,
    /// Theorem 1 functional of the extremal function (= 1).
    pub functional_value: f64,
    /// F(S_r) with S_r = π · area_ratio.
    pub excess: f64,
}

pub fn remark2_witness(
    function_id: &str,
    f: impl Fn(f64) -> f64,
    probe_values: &[f64],
) -> Result<Remark2Witness> {
    if f(0.0) < 0.0 || f(0.0).is_nan() {
        return Err(Error::Precondition(format!("{function_id}: F(0) must be >= 0")));
    }
    if probe_values.is_empty() {
        return Err(Error::Precondition("no probe values".into()));
    }
    for &t in probe_values {
        if t > 0.0 && (f(t).is_nan() || f(t) <= 0.0) {
            return Err(Error::Precondition(format!(
                "{function_id}: F({t}) = {} is not strictly positive",
                f(t)
            )));
        }
    }
    let c = sharp_constants();
    let a = c.a1.value;
    let r = 1.0 / 3.0;
    let area_ratio = area_bound(a, r);
    let spec = FunctionalSpec::sharp(FunctionalKind::Thm1);
    let excess = f(std::f64::consts::PI * area_ratio);
    if excess.is_nan() || excess <= 0.0 {
        return Err(Error::Precondition(format!(
            "{function_id}: F(S_r) = {excess} is not strictly positive"
        )));
    }
    Ok(Remark2Witness {
        function_id: function_id.to_string(),
        a,
        r,
        area_ratio,
        functional_value: envelope_unchecked(&spec, a, r),
        excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> CertifyOptions {
        CertifyOptions::default()
    }

    #[test]
    fn phi1_verified() {
        let c = sharp_constants();
        let cert = certify_nonneg(ProofFunctionKind::Phi1, c.lambda1, c.a1.value, &opts()).unwrap();
        assert_eq!(cert.verdict, Verdict::Verified, "{cert:#?}");
        assert!((cert.witnesses[0].value - 476.10).abs() < 0.1);
        assert!((cert.witnesses[2].value - 4096.0).abs() < 1e-9);
        assert_eq!(cert.exclusion_windows.len(), 1);
    }

    #[test]
    fn phi1_violated_for_larger_lambda() {
        let c = sharp_constants();
        let cert = certify_nonneg(ProofFunctionKind::Phi1, c.lambda1 + 0.5, c.a1.value, &opts()).unwrap();
        assert_eq!(cert.verdict, Verdict::Violated);
        let w = cert.witnesses[0];
        assert!((w.t - c.a1.value).abs() < 0.01, "{w:?}");
        assert!(w.value < 0.0);
    }

    #[test]
    fn phi2_verified() {
        let c = sharp_constants();
        let cert = certify_nonneg(ProofFunctionKind::Phi2, c.lambda2, c.a2.value, &opts()).unwrap();
        assert_eq!(cert.verdict, Verdict::Verified, "{cert:#?}");
        assert!((cert.witnesses[0].value - 210.58).abs() < 0.1);
        assert!((cert.witnesses[2].value - 1920.0).abs() < 1e-9);
    }

    #[test]
    fn nonneg_rejects_psi_and_bad_root() {
        assert!(certify_nonneg(ProofFunctionKind::Psi1, 1.0, 0.5, &opts()).is_err());
        assert!(certify_nonneg(ProofFunctionKind::Phi1, 1.0, 0.2, &opts()).is_err());
    }

    #[test]
    fn psi_certificates() {
        let c = sharp_constants();
        let p1 = certify_monotone_increasing(ProofFunctionKind::Psi1, c.lambda1, 0.98, &opts()).unwrap();
        assert_eq!(p1.verdict, Verdict::Verified, "{p1:#?}");
        assert!((p1.max_value - 0.977404).abs() < 1e-6);
        let p2 = certify_monotone_increasing(ProofFunctionKind::Psi2, c.lambda2, 0.987, &opts()).unwrap();
        assert_eq!(p2.verdict, Verdict::Verified, "{p2:#?}");
        assert!((p2.max_value - 0.986671).abs() < 1e-5);
        let big = certify_monotone_increasing(ProofFunctionKind::Psi1, 100.0, 1.0, &opts()).unwrap();
        assert_eq!(big.verdict, Verdict::Violated);
        assert!(big.max_value > 1.0);
    }

    #[test]
    fn verified_nonneg_survives_finer_resampling() {
        let c = sharp_constants();
        let coeffs = phi_coefficients(ProofFunctionKind::Phi1, c.lambda1).unwrap();
        let scale: f64 = coeffs.iter().map(|x| x.abs()).sum();
        let (nodes, _) = grid_nodes(1.0 / 3.0, 1.0, 1e-5);
        let min = nodes.iter().map(|&t| horner(&coeffs, t)).fold(f64::INFINITY, f64::min);
        assert!(min >= -1e-12 * scale, "{min}");
    }

    #[test]
    fn theorem_certificates() {
        for kind in FunctionalKind::ALL {
            let report = certify_theorem(kind, &Overrides::default(), &opts()).unwrap();
            assert_eq!(report.certificates.len(), 5);
            for c in &report.certificates {
                assert_eq!(c.verdict, Verdict::Verified, "{kind}: {c:#?}");
            }
            assert_eq!(report.verdict, Verdict::Verified);
        }
    }

    #[test]
    fn thm1_sharpness_excess() {
        let report = certify_theorem(FunctionalKind::Thm1, &Overrides::default(), &opts()).unwrap();
        let w = report.certificate("sharpness").unwrap().witnesses[0];
        assert!((w.t - 0.567284).abs() < 1e-6);
        assert!((w.value - 3.02e-5).abs() < 1e-7, "{w:?}");
        let eq = report.certificate("extremal_equality").unwrap().witnesses[0];
        assert!((eq.value - 1.0).abs() < 1e-6);
    }

    #[test]
    fn thm1_lambda_override_is_violated() {
        let o = Overrides {
            lambda: Some(18.62),
            weight: None,
        };
        let report = certify_theorem(FunctionalKind::Thm1, &o, &opts()).unwrap();
        assert_eq!(report.verdict, Verdict::Violated);
        let upper = report.certificate("upper_branch").unwrap();
        assert_eq!(upper.verdict, Verdict::Violated);
        assert!((upper.witnesses[0].t - 0.567284).abs() < 0.01);
    }

    #[test]
    fn weight_overrides() {
        let thm_a = certify_theorem(
            FunctionalKind::ThmA,
            &Overrides { lambda: None, weight: Some(AREA_WEIGHT + 0.01) },
            &opts(),
        )
        .unwrap();
        assert_eq!(thm_a.verdict, Verdict::Violated);
        let thm3 = certify_theorem(
            FunctionalKind::Thm3,
            &Overrides { lambda: None, weight: Some(sharp_constants().p + 0.01) },
            &opts(),
        )
        .unwrap();
        assert_eq!(thm3.certificate("upper_branch").unwrap().verdict, Verdict::Violated);
        assert!(certify_theorem(
            FunctionalKind::Classical,
            &Overrides { lambda: Some(1.0), weight: None },
            &opts()
        )
        .is_err());
    }

    #[test]
    fn thm3_coefficients_are_negative() {
        let cert = thm3_coefficient_certificate();
        assert_eq!(cert.verdict, Verdict::Verified);
        let v: Vec<f64> = cert.witnesses.iter().map(|w| w.value).collect();
        assert!((v[0] + 0.055728).abs() < 1e-6);
        assert!((v[1] + 0.042572).abs() < 1e-6);
    }

    #[test]
    fn certificates_are_deterministic() {
        let a = certify_theorem(FunctionalKind::Thm2, &Overrides::default(), &opts()).unwrap();
        let b = certify_theorem(FunctionalKind::Thm2, &Overrides::default(), &opts()).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }

    #[test]
    fn remark2() {
        let w = remark2_witness("t", |t| t, &[0.1, 1.0]).unwrap();
        assert!(w.excess > 0.0);
        assert!((w.area_ratio - 0.054965).abs() < 1e-6);
        assert!((w.functional_value - 1.0).abs() < 1e-9);
        let w2 = remark2_witness("t^2", |t| t * t, &[0.5]).unwrap();
        assert!(w2.excess > 0.0);
        assert!(remark2_witness("zero", |_| 0.0, &[0.5]).is_err());
    }

    #[test]
    fn verdict_combination() {
        use Verdict::*;
        assert_eq!(Verified.combine(Inconclusive), Inconclusive);
        assert_eq!(Inconclusive.combine(Violated), Violated);
        assert_eq!(Verified.combine(Verified), Verified);
        assert_eq!(Violated.exit_code(), 1);
    }
}
