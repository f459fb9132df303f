//! Closed-form right-hand sides of the coefficient, area and Schwarz–Pick
//! bounds for self-maps of the disk, plus Bombieri's supremum of the Bohr sum.

use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Result};
use crate::series::AREA_LEMMA_MAX_RADIUS;

const SLACK: f64 = 1e-12;

/// Parameters of the coefficient-tail bounds: `a_abs` is the modulus of the
/// leading coefficient of the lacunary block, `p` its gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundParams {
    a_abs: f64,
    r: f64,
    p: u32,
}

impl TailBoundParams {
    pub fn new(a_abs: f64, r: f64, p: u32) -> Result<Self> {
        check_domain("a_abs", a_abs, (0.0..=1.0).contains(&a_abs), "[0, 1]")?;
        check_domain("r", r, (0.0..1.0).contains(&r), "[0, 1)")?;
        check_domain("p", p as f64, p >= 1, "p >= 1")?;
        Ok(Self { a_abs, r, p })
    }

    pub fn a_abs(&self) -> f64 {
        self.a_abs
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    fn r_pow(&self) -> f64 {
        self.r.powi(self.p as i32)
    }
}

/// Bound on Σ_{k>=1} |b_k|² r^{pk}: r^p (1 − a²)² / (1 − a² r^p).
pub fn lemma_a_rhs(params: &TailBoundParams) -> f64 {
    let a2 = params.a_abs * params.a_abs;
    let rp = params.r_pow();
    // r < 1 keeps the denominator positive; a = 1 gives exactly 0.
    rp * (1.0 - a2).powi(2) / (1.0 - a2 * rp)
}

/// Bound on S_r/π: r² (1 − a²)² / (1 − a² r²)², valid for r <= 1/√2.
pub fn lemma_b_rhs(a_abs: f64, r: f64) -> Result<f64> {
    check_domain("a_abs", a_abs, (0.0..=1.0).contains(&a_abs), "[0, 1]")?;
    check_domain(
        "r",
        r,
        (0.0..=AREA_LEMMA_MAX_RADIUS + SLACK).contains(&r),
        "[0, 1/sqrt(2)]",
    )?;
    Ok(area_bound(a_abs, r))
}

pub(crate) fn area_bound(a: f64, r: f64) -> f64 {
    let a2 = a * a;
    r * r * (1.0 - a2).powi(2) / (1.0 - a2 * r * r).powi(2)
}

/// Which of the two tail estimates applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailBranch {
    /// a >= r^p: r^p (1 − a²)/(1 − r^p a).
    Large,
    /// a < r^p: r^p √(1 − a²)/√(1 − r^{2p}).
    Small,
}

pub fn tail_branch(params: &TailBoundParams) -> TailBranch {
    if params.a_abs >= params.r_pow() {
        TailBranch::Large
    } else {
        TailBranch::Small
    }
}

/// Bound on Σ_{k>=1} |a_{pk+m}| r^{pk} in terms of a = |a_m|.
///
/// The branch switches at a = r^p, which is where the optimizing choice
/// ρ = a^{−1/p} in the Cauchy–Schwarz step stops being admissible.
pub fn coeff_tail_bound(params: &TailBoundParams) -> f64 {
    let a = params.a_abs;
    let rp = params.r_pow();
    match tail_branch(params) {
        TailBranch::Large => rp * (1.0 - a * a) / (1.0 - rp * a),
        TailBranch::Small => rp * (1.0 - a * a).sqrt() / (1.0 - rp * rp).sqrt(),
    }
}

pub(crate) fn tail_large(a: f64, r: f64) -> f64 {
    r * (1.0 - a * a) / (1.0 - r * a)
}

pub(crate) fn tail_small(a: f64, r: f64) -> f64 {
    r * (1.0 - a * a).sqrt() / (1.0 - r * r).sqrt()
}

/// Schwarz–Pick bound on |f(z)| for |z| <= r: (r + |a_0|)/(1 + r |a_0|).
pub fn schwarz_pick_bound(a0_abs: f64, r: f64) -> f64 {
    (r + a0_abs) / (1.0 + r * a0_abs)
}

/// Bombieri's sup of the Bohr sum over all self-maps, (3 − √(8(1 − r²)))/r,
/// valid for 1/3 <= r <= 1/√2.
pub fn bombieri_sup(r: f64) -> Result<f64> {
    check_domain(
        "r",
        r,
        (1.0 / 3.0 - SLACK..=AREA_LEMMA_MAX_RADIUS + SLACK).contains(&r),
        "[1/3, 1/sqrt(2)]",
    )?;
    Ok((3.0 - (8.0 * (1.0 - r * r)).sqrt()) / r)
}
