//! Bohr-type functionals, their worst-case envelopes over all self-maps with
//! a given |a_0|, and the auxiliary functions of the proofs.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{sharp_constants, sqrt5_minus_2};
use crate::error::{check_domain, Error, Result};
use crate::lemma::{area_bound, schwarz_pick_bound, tail_large, tail_small, TailBranch};
use crate::numeric::horner;
use crate::series::{PowerSeries, Truncated, AREA_LEMMA_MAX_RADIUS};

/// Weight of the linear area term in Theorem A and Theorems 1–2.
pub const AREA_WEIGHT: f64 = 16.0 / 9.0;

/// Points on |z| = r used for the direct maximum of |f|.
pub const CIRCLE_POINTS: usize = 4096;

const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctionalKind {
    #[serde(rename = "classical")]
    Classical,
    #[serde(rename = "thmA")]
    ThmA,
    #[serde(rename = "thmB1")]
    ThmB1,
    #[serde(rename = "thmB2")]
    ThmB2,
    #[serde(rename = "thm1")]
    Thm1,
    #[serde(rename = "thm2")]
    Thm2,
    #[serde(rename = "thm3")]
    Thm3,
}

/// First term of a functional: |a_0|, max |f| or max |f|² on |z| = r.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeadingTerm {
    Identity,
    Modulus,
    ModulusSquared,
}

impl FunctionalKind {
    pub const ALL: [FunctionalKind; 7] = [
        Self::Classical,
        Self::ThmA,
        Self::ThmB1,
        Self::ThmB2,
        Self::Thm1,
        Self::Thm2,
        Self::Thm3,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Self::Classical => "classical",
            Self::ThmA => "thmA",
            Self::ThmB1 => "thmB1",
            Self::ThmB2 => "thmB2",
            Self::Thm1 => "thm1",
            Self::Thm2 => "thm2",
            Self::Thm3 => "thm3",
        }
    }

    /// Parses the ids of [`FunctionalKind::id`] (case-insensitive).
    pub fn from_id(s: &str) -> Option<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id().eq_ignore_ascii_case(s))
    }

    /// Sharp radius of the inequality.
    pub fn radius(self) -> f64 {
        match self {
            Self::ThmB1 | Self::Thm3 => sqrt5_minus_2(),
            _ => 1.0 / 3.0,
        }
    }

    pub fn leading(self) -> LeadingTerm {
        match self {
            Self::Classical | Self::ThmA | Self::Thm1 => LeadingTerm::Identity,
            Self::ThmB1 | Self::Thm3 => LeadingTerm::Modulus,
            Self::ThmB2 | Self::Thm2 => LeadingTerm::ModulusSquared,
        }
    }
}

impl std::fmt::Display for FunctionalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// A functional together with its weights. Unused weights are zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSpec {
    pub kind: FunctionalKind,
    pub lambda: f64,
    pub p_weight: f64,
    pub area_weight: f64,
}

impl FunctionalSpec {
    fn build(kind: FunctionalKind, lambda: f64, p_weight: f64, area_weight: f64) -> Result<Self> {
        for (name, v) in [
            ("lambda", lambda),
            ("p_weight", p_weight),
            ("area_weight", area_weight),
        ] {
            check_domain(name, v, v >= 0.0, "[0, inf)")?;
        }
        Ok(Self {
            kind,
            lambda,
            p_weight,
            area_weight,
        })
    }

    pub fn classical() -> Self {
        Self::build(FunctionalKind::Classical, 0.0, 0.0, 0.0).unwrap()
    }

    pub fn thm_a(area_weight: f64) -> Result<Self> {
        Self::build(FunctionalKind::ThmA, 0.0, 0.0, area_weight)
    }

    pub fn thm_b1() -> Self {
        Self::build(FunctionalKind::ThmB1, 0.0, 0.0, 0.0).unwrap()
    }

    pub fn thm_b2() -> Self {
        Self::build(FunctionalKind::ThmB2, 0.0, 0.0, 0.0).unwrap()
    }

    pub fn thm1(lambda: f64) -> Result<Self> {
        Self::build(FunctionalKind::Thm1, lambda, 0.0, AREA_WEIGHT)
    }

    pub fn thm2(lambda: f64) -> Result<Self> {
        Self::build(FunctionalKind::Thm2, lambda, 0.0, AREA_WEIGHT)
    }

    pub fn thm3(p_weight: f64) -> Result<Self> {
        Self::build(FunctionalKind::Thm3, 0.0, p_weight, 0.0)
    }

    /// The functional with the sharp constants of its theorem.
    pub fn sharp(kind: FunctionalKind) -> Self {
        let c = sharp_constants();
        match kind {
            FunctionalKind::Classical => Self::classical(),
            FunctionalKind::ThmA => Self::thm_a(AREA_WEIGHT).unwrap(),
            FunctionalKind::ThmB1 => Self::thm_b1(),
            FunctionalKind::ThmB2 => Self::thm_b2(),
            FunctionalKind::Thm1 => Self::thm1(c.lambda1).unwrap(),
            FunctionalKind::Thm2 => Self::thm2(c.lambda2).unwrap(),
            FunctionalKind::Thm3 => Self::thm3(c.p).unwrap(),
        }
    }

    /// Coefficient of the linear S_r/π term.
    pub fn linear_area_weight(&self) -> f64 {
        match self.kind {
            FunctionalKind::Thm3 => self.p_weight,
            FunctionalKind::ThmA | FunctionalKind::Thm1 | FunctionalKind::Thm2 => self.area_weight,
            _ => 0.0,
        }
    }

    /// Coefficient of (S_r/π)².
    pub fn quadratic_area_weight(&self) -> f64 {
        match self.kind {
            FunctionalKind::Thm1 | FunctionalKind::Thm2 => self.lambda,
            _ => 0.0,
        }
    }

    fn combine(&self, lead: f64, tail: f64, area: f64) -> f64 {
        let lead = match self.kind.leading() {
            LeadingTerm::ModulusSquared => lead * lead,
            _ => lead,
        };
        lead + tail + self.linear_area_weight() * area + self.quadratic_area_weight() * area * area
    }
}

fn check_functional_radius(r: f64) -> Result<()> {
    check_domain(
        "r",
        r,
        (0.0..=AREA_LEMMA_MAX_RADIUS + SLACK).contains(&r),
        "[0, 1/sqrt(2)]",
    )
}

/// Radial quantities of one series at one radius, shared by all functionals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalInputs {
    pub r: f64,
    pub a0_abs: f64,
    /// Σ_{k>=1} |a_k| r^k
    pub tail: Truncated,
    /// S_r/π
    pub area: Truncated,
    /// max |f| over the boundary grid of |z| = r
    pub circle_max: Truncated,
}

impl FunctionalInputs {
    pub fn measure(s: &PowerSeries, r: f64) -> Result<Self> {
        check_functional_radius(r)?;
        Ok(Self {
            r,
            a0_abs: s.coeffs()[0].norm(),
            tail: s.tail_sum(r)?,
            area: s.area_ratio(r)?,
            circle_max: s.circle_max_modulus(r, CIRCLE_POINTS)?,
        })
    }

    /// Upper estimate of the functional: every truncated quantity is
    /// replaced by value + tail bound.
    pub fn evaluate(&self, spec: &FunctionalSpec) -> f64 {
        let lead = match spec.kind.leading() {
            LeadingTerm::Identity => self.a0_abs,
            _ => self.circle_max.upper(),
        };
        spec.combine(lead, self.tail.upper(), self.area.upper())
    }
}

/// Value of the functional for the series at radius r (upper estimate).
pub fn eval_functional(spec: &FunctionalSpec, s: &PowerSeries, r: f64) -> Result<f64> {
    Ok(FunctionalInputs::measure(s, r)?.evaluate(spec))
}

/// The proofs' worst case over all self-maps with |a_0| = a0_abs, using the
/// Lemma 3 branch selected by a0_abs >= r.
pub fn envelope(spec: &FunctionalSpec, a0_abs: f64, r: f64) -> Result<f64> {
    check_domain("a0_abs", a0_abs, (0.0..=1.0).contains(&a0_abs), "[0, 1]")?;
    check_functional_radius(r)?;
    Ok(envelope_unchecked(spec, a0_abs, r))
}

pub(crate) fn branch_at(a: f64, r: f64) -> TailBranch {
    if a >= r {
        TailBranch::Large
    } else {
        TailBranch::Small
    }
}

pub(crate) fn envelope_unchecked(spec: &FunctionalSpec, a: f64, r: f64) -> f64 {
    envelope_on_branch(spec, a, r, branch_at(a, r))
}

pub(crate) fn envelope_on_branch(spec: &FunctionalSpec, a: f64, r: f64, branch: TailBranch) -> f64 {
    let lead = match spec.kind.leading() {
        LeadingTerm::Identity => a,
        _ => schwarz_pick_bound(a, r),
    };
    let tail = match branch {
        TailBranch::Large => tail_large(a, r),
        TailBranch::Small => tail_small(a, r),
    };
    spec.combine(lead, tail, area_bound(a, r))
}

/// ∂/∂r of the envelope on a fixed branch. Every term is nonnegative for
/// nonnegative weights.
pub(crate) fn envelope_dr(spec: &FunctionalSpec, a: f64, r: f64, branch: TailBranch) -> f64 {
    let a2 = a * a;
    let lead = match spec.kind.leading() {
        LeadingTerm::Identity => 0.0,
        LeadingTerm::Modulus => (1.0 - a2) / (1.0 + r * a).powi(2),
        LeadingTerm::ModulusSquared => {
            2.0 * schwarz_pick_bound(a, r) * (1.0 - a2) / (1.0 + r * a).powi(2)
        }
    };
    let tail = match branch {
        TailBranch::Large => (1.0 - a2) / (1.0 - r * a).powi(2),
        TailBranch::Small => (1.0 - a2).sqrt() / (1.0 - r * r).powf(1.5),
    };
    let q = 1.0 - a2 * r * r;
    let ds = (1.0 - a2).powi(2) * 2.0 * r * (1.0 + a2 * r * r) / q.powi(3);
    let s = area_bound(a, r);
    lead + tail + spec.linear_area_weight() * ds + 2.0 * spec.quadratic_area_weight() * s * ds
}

/// Bound on |∂/∂a| of the small-branch envelope for a in [0, r].
pub(crate) fn small_branch_lipschitz(spec: &FunctionalSpec, r: f64) -> f64 {
    let lead = match spec.kind.leading() {
        LeadingTerm::Identity | LeadingTerm::Modulus => 1.0,
        LeadingTerm::ModulusSquared => 2.0,
    };
    let r2 = r * r;
    let tail = r2 / (1.0 - r2);
    let ds = 4.0 * r2 * r * (1.0 - r2) / (1.0 - r2 * r2).powi(2);
    lead + tail + spec.linear_area_weight() * ds + 2.0 * spec.quadratic_area_weight() * r2 * ds
}

/// c in env(1 − ε, r) = 1 − c ε + O(ε²); the area terms are O(ε²).
pub fn limit_slope(kind: FunctionalKind, r: f64) -> f64 {
    let tail = 2.0 * r / (1.0 - r);
    let lead = match kind.leading() {
        LeadingTerm::Identity => 1.0,
        LeadingTerm::Modulus => (1.0 - r) / (1.0 + r),
        LeadingTerm::ModulusSquared => 2.0 * (1.0 - r) / (1.0 + r),
    };
    lead - tail
}

/// 1 − envelope on the large branch at the kind's own radius, in factored
/// form so that it stays accurate as a → 1.
pub fn upper_deficit(spec: &FunctionalSpec, t: f64) -> f64 {
    let u = 1.0 - t;
    let d = 9.0 - t * t;
    let w = spec.linear_area_weight();
    let lambda = spec.quadratic_area_weight();
    match spec.kind {
        FunctionalKind::Classical => 2.0 * u * u / (3.0 - t),
        FunctionalKind::ThmA | FunctionalKind::Thm1 => {
            let c = horner(&thm_a_cofactor(w), t);
            u * u * (c * d * d - 81.0 * lambda * u * u * (1.0 + t).powi(4)) / d.powi(4)
        }
        FunctionalKind::ThmB1 => {
            let r = sqrt5_minus_2();
            r * u * u * (2.0 + r + r * t) / (1.0 - r * r * t * t)
        }
        FunctionalKind::ThmB2 | FunctionalKind::Thm2 => {
            let c = (15.0 + t) * (3.0 - t) - 9.0 * w * (1.0 + t);
            u * u * (1.0 + t) * (c * d * d - 81.0 * lambda * u * u * (1.0 + t).powi(3)) / d.powi(4)
        }
        FunctionalKind::Thm3 => -thm3_delta_unchecked(t, spec.p_weight - sharp_constants().p),
    }
}

/// C_w with 1 − env = (1 − t)² C_w(t)/(9 − t²)² for Theorem A at r = 1/3.
pub fn thm_a_cofactor(w: f64) -> [f64; 4] {
    [54.0 - 9.0 * w, 18.0 - 18.0 * w, -6.0 - 9.0 * w, -2.0]
}

/// −9 + 4√5, −47 + 21√5, −161 + 72√5 without cancellation.
pub fn thm3_coefficients() -> [f64; 3] {
    let s = 5f64.sqrt();
    [
        -1.0 / (9.0 + 4.0 * s),
        -4.0 / (47.0 + 21.0 * s),
        -1.0 / (161.0 + 72.0 * s),
    ]
}

/// Functional value minus 1 for f(z) = (z + a)/(1 + a z) at z = r = √5 − 2
/// with area weight 2(√5 − 1) + eps, from the factored expression.
pub fn thm3_delta(a: f64, eps: f64) -> Result<f64> {
    check_domain("a", a, (0.0..=1.0).contains(&a), "[0, 1]")?;
    check_domain("eps", eps, eps >= 0.0, "[0, inf)")?;
    Ok(thm3_delta_unchecked(a, eps))
}

pub(crate) fn thm3_delta_unchecked(a: f64, eps: f64) -> f64 {
    let [c0, c1, c2] = thm3_coefficients();
    let q = 7.0 * c0 + 4.0 * c1 * a + c2 * a * a;
    // 4√5 − 9 = c0; 9 − 4√5 = −c0 = r0²
    let den = c0 * a * a + 1.0;
    let u = 1.0 - a;
    (u * u * u * q + eps * (-c0) * (1.0 - a * a).powi(2)) / (den * den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofFunctionKind {
    Phi1,
    Psi1,
    Phi2,
    Psi2,
}

impl ProofFunctionKind {
    pub fn is_phi(self) -> bool {
        matches!(self, Self::Phi1 | Self::Phi2)
    }

    pub fn id(self) -> &'static str {
        match self {
            Self::Phi1 => "phi1",
            Self::Psi1 => "psi1",
            Self::Phi2 => "phi2",
            Self::Psi2 => "psi2",
        }
    }
}

pub const PHI1_BASE: [i64; 7] = [3078, 1944, -522, -432, 2, 24, 2];
pub const PHI1_BLOCK: [i64; 6] = [-81, -243, -162, 162, 243, 81];
pub const PHI2_BASE: [i64; 6] = [2349, 81, -522, -18, 29, 1];
pub const PHI2_BLOCK: [i64; 5] = [-81, -162, 0, 162, 81];

fn as_f64(c: &[i64]) -> Vec<f64> {
    c.iter().map(|&x| x as f64).collect()
}

/// Integer base polynomial and λ-block of Φ, ascending degree.
pub fn phi_parts(kind: ProofFunctionKind) -> Option<(&'static [i64], &'static [i64])> {
    match kind {
        ProofFunctionKind::Phi1 => Some((&PHI1_BASE, &PHI1_BLOCK)),
        ProofFunctionKind::Phi2 => Some((&PHI2_BASE, &PHI2_BLOCK)),
        _ => None,
    }
}

/// Coefficients of Φ = base + λ·block as one f64 polynomial.
pub fn phi_coefficients(kind: ProofFunctionKind, lambda: f64) -> Option<Vec<f64>> {
    let (base, block) = phi_parts(kind)?;
    let mut c = as_f64(base);
    for (i, b) in block.iter().enumerate() {
        c[i] += lambda * *b as f64;
    }
    Some(c)
}

/// Ψ = lead(t) + √(1 − t²)/√8 + 16 u² + 81 λ u⁴ with u = (1 − t²)/(9 − t²).
fn psi_base(kind: ProofFunctionKind, t: f64) -> f64 {
    let lead = match kind {
        ProofFunctionKind::Psi2 => ((1.0 + 3.0 * t) / (3.0 + t)).powi(2),
        _ => t,
    };
    let u = (1.0 - t * t) / (9.0 - t * t);
    lead + (1.0 - t * t).sqrt() / 8f64.sqrt() + 16.0 * u * u
}

fn psi_block(t: f64) -> f64 {
    let u = (1.0 - t * t) / (9.0 - t * t);
    81.0 * u.powi(4)
}

/// (λ-free part, λ-coefficient, (scale of the first, scale of the second)).
/// For Φ the scales are Horner majorants Σ |c_i| t^i.
pub(crate) fn proof_function_parts(kind: ProofFunctionKind, t: f64) -> (f64, f64, (f64, f64)) {
    match phi_parts(kind) {
        Some((base, block)) => {
            let base = as_f64(base);
            let block = as_f64(block);
            let abs = |c: &[f64]| c.iter().rev().fold(0.0, |acc, x| acc * t.abs() + x.abs());
            (
                horner(&base, t),
                horner(&block, t),
                (abs(&base), abs(&block)),
            )
        }
        None => {
            let (b, k) = (psi_base(kind, t), psi_block(t));
            (b, k, (b.abs(), k.abs()))
        }
    }
}

/// Φ or Ψ at t with the given λ. The integer parts are evaluated before the
/// multiplication by λ, so Φ(1) is exact.
pub fn proof_function(kind: ProofFunctionKind, t: f64, lambda: f64) -> Result<f64> {
    check_domain("t", t, (0.0..=1.0).contains(&t), "[0, 1]")?;
    let (base, block, _) = proof_function_parts(kind, t);
    Ok(base + lambda * block)
}

/// dΨ/dt.
pub fn psi_derivative(kind: ProofFunctionKind, t: f64, lambda: f64) -> Result<f64> {
    if kind.is_phi() {
        return Err(Error::Precondition(format!("{} is not a Psi function", kind.id())));
    }
    check_domain("t", t, (0.0..1.0).contains(&t), "[0, 1)")?;
    let lead = match kind {
        ProofFunctionKind::Psi2 => {
            let g = (1.0 + 3.0 * t) / (3.0 + t);
            2.0 * g * 8.0 / (3.0 + t).powi(2)
        }
        _ => 1.0,
    };
    let d = 9.0 - t * t;
    let u = (1.0 - t * t) / d;
    let du = -16.0 * t / (d * d);
    let sqrt_term = -t / (8f64.sqrt() * (1.0 - t * t).sqrt());
    Ok(lead + sqrt_term + 32.0 * u * du + 324.0 * lambda * u.powi(3) * du)
}

/// Bound on |Ψ''| over [0, hi], hi < 1, assembled from termwise bounds.
pub(crate) fn psi_second_derivative_bound(kind: ProofFunctionKind, hi: f64, lambda: f64) -> f64 {
    let lead = match kind {
        ProofFunctionKind::Psi2 => {
            // g = (1+3t)/(3+t): g <= g(hi), |g'| <= 8/9, |g''| <= 16/27
            let g = (1.0 + 3.0 * hi) / (3.0 + hi);
            2.0 * (64.0 / 81.0) + 2.0 * g * (16.0 / 27.0)
        }
        _ => 0.0,
    };
    let h2 = 1.0 / (8f64.sqrt() * (1.0 - hi * hi).powf(1.5));
    let d = 9.0 - hi * hi;
    let u = 1.0 / 9.0;
    let du = 16.0 * hi / (d * d);
    let ddu = 16.0 * (9.0 + 3.0 * hi * hi) / d.powi(3);
    let quad = 32.0 * (du * du + u * ddu);
    let quart = 324.0 * lambda.abs() * (3.0 * u * u * du * du + u.powi(3) * ddu);
    lead + h2 + quad + quart
}

/// The envelope of a theorem at its radius as a function of |a_0|, for
/// plotting and scans.
pub fn envelope_at_radius(spec: &FunctionalSpec, a0_abs: f64) -> Result<f64> {
    envelope(spec, a0_abs, spec.kind.radius())
}

/// Max of |f(r e^{iθ})| through [`PowerSeries::circle_max_modulus`] with the
/// standard grid.
pub fn circle_sup(s: &PowerSeries, r: f64) -> Result<Truncated> {
    s.circle_max_modulus(r, CIRCLE_POINTS)
}

/// Value of f at z = r e^{iθ}; used in tests against the grid maximum.
pub fn point_value(s: &PowerSeries, r: f64, theta: f64) -> Result<Complex64> {
    s.eval(Complex64::from_polar(r, theta))
}
