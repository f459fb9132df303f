//! Bohr-type radii: the largest r for which the worst case of a functional
//! over all self-maps stays at most 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Error, Result};
use crate::functionals::{envelope_unchecked, limit_slope, FunctionalSpec};
use crate::lemma::bombieri_sup;
use crate::series::AREA_LEMMA_MAX_RADIUS;

/// Default number of points of the |a_0| grid.
pub const DEFAULT_GRID: usize = 10_000;

/// Upper end of the |a_0| grid; the limit a → 1 is handled analytically.
pub const GRID_TOP: f64 = 1.0 - 1e-6;

const LOWER_END: f64 = 0.05;
const VALUE_TOL: f64 = 1e-12;
const SLOPE_TOL: f64 = 1e-13;
const GOLDEN_ITERS: usize = 80;

/// Worst case of the envelope over |a_0| at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyWorst {
    pub r: f64,
    /// Max over the grid on [0, 1 − 1e−6] (refined if requested).
    pub sup_value: f64,
    pub argmax_a: f64,
    /// Value of the envelope in the limit a → 1 (always 1).
    pub limit_value: f64,
    /// c in env(1 − ε) = 1 − c ε; negative means values above 1 near a = 1.
    pub limit_slope: f64,
}

impl FamilyWorst {
    /// Whether the functional exceeds 1 somewhere in the family.
    pub fn exceeds(&self) -> bool {
        self.sup_value > 1.0 + VALUE_TOL || self.limit_slope < -SLOPE_TOL
    }

    /// Supremum including the a → 1 limit.
    pub fn sup_with_limit(&self) -> f64 {
        self.sup_value.max(self.limit_value)
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_ITERS {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes `f` over a grid of `[lo, hi]` with golden-section refinement
/// around the best node. Returns (argmax, max).
pub(crate) fn grid_max(f: impl Fn(f64) -> f64 + Sync, lo: f64, hi: f64, grid: usize, refine: bool) -> (f64, f64) {
    let n = grid.max(2);
    let step = (hi - lo) / (n - 1) as f64;
    let node = |j: usize| if j == n - 1 { hi } else { lo + j as f64 * step };
    let (best_j, best) = (0..n)
        .into_par_iter()
        .map(|j| (j, f(node(j))))
        .reduce(
            || (0, f64::NEG_INFINITY),
            |x, y| if y.1 > x.1 || (y.1 == x.1 && y.0 < x.0) { y } else { x },
        );
    let mut out = (node(best_j), best);
    if refine {
        let a = node(best_j.saturating_sub(1));
        let b = node((best_j + 1).min(n - 1));
        let (x, v) = golden_max(&f, a, b);
        if v > out.1 {
            out = (x, v);
        }
    }
    out
}

/// Maximizes the closed-form envelope of `spec` over |a_0| in [0, 1 − 1e−6].
pub fn family_worst(spec: &FunctionalSpec, r: f64, grid: usize, refine: bool) -> Result<FamilyWorst> {
    check_domain(
        "r",
        r,
        (0.0..=AREA_LEMMA_MAX_RADIUS + 1e-12).contains(&r),
        "[0, 1/sqrt(2)]",
    )?;
    let (argmax_a, sup_value) = grid_max(|a| envelope_unchecked(spec, a, r), 0.0, GRID_TOP, grid, refine);
    Ok(FamilyWorst {
        r,
        sup_value,
        argmax_a,
        limit_value: 1.0,
        limit_slope: limit_slope(spec.kind, r),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadiusStep {
    pub r: f64,
    pub sup_value: f64,
    pub limit_slope: f64,
    pub exceeds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusResult {
    pub radius: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// Argmax of the envelope at the lower bracket end.
    pub worst_param: f64,
    /// The predicate held on the whole search interval; `radius` is its
    /// upper end.
    pub saturated: bool,
    pub trace: Vec<RadiusStep>,
}

/// [`bohr_radius_with_grid`] with the default grid.
pub fn bohr_radius(spec: &FunctionalSpec, tol: f64) -> Result<RadiusResult> {
    bohr_radius_with_grid(spec, tol, DEFAULT_GRID)
}

/// Bisects r over [0.05, 1/√2] on "the family worst case stays <= 1".
pub fn bohr_radius_with_grid(spec: &FunctionalSpec, tol: f64, grid: usize) -> Result<RadiusResult> {
    check_domain("tol", tol, tol >= 1e-12, "[1e-12, inf)")?;
    let mut trace = Vec::new();
    let mut probe = |r: f64| -> Result<FamilyWorst> {
        let fw = family_worst(spec, r, grid, true)?;
        trace.push(RadiusStep {
            r,
            sup_value: fw.sup_value,
            limit_slope: fw.limit_slope,
            exceeds: fw.exceeds(),
        });
        Ok(fw)
    };

    let (mut lo, mut hi) = (LOWER_END, AREA_LEMMA_MAX_RADIUS);
    let at_lo = probe(lo)?;
    if at_lo.exceeds() {
        return Err(Error::ExceedsAtLowerEnd(lo));
    }
    let at_hi = probe(hi)?;
    if !at_hi.exceeds() {
        return Ok(RadiusResult {
            radius: hi,
            bracket: (hi, hi),
            iterations: 0,
            worst_param: at_hi.argmax_a,
            saturated: true,
            trace,
        });
    }
    let mut worst_param = at_lo.argmax_a;
    let mut iterations = 0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fw = probe(mid)?;
        if fw.exceeds() {
            hi = mid;
        } else {
            lo = mid;
            worst_param = fw.argmax_a;
        }
        iterations += 1;
    }
    Ok(RadiusResult {
        radius: 0.5 * (lo + hi),
        bracket: (lo, hi),
        iterations,
        worst_param,
        saturated: false,
        trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BombieriRow {
    pub r: f64,
    pub bombieri_sup: f64,
    /// Sup of the classical envelope (equal to the Moebius family sup).
    pub family_sup: f64,
    pub argmax_a: f64,
    pub within: bool,
}

/// Classical family sup against Bombieri's formula on [1/3, 1/√2].
pub fn bombieri_compare(r_grid: &[f64]) -> Result<Vec<BombieriRow>> {
    let spec = FunctionalSpec::classical();
    r_grid
        .iter()
        .map(|&r| {
            let b = bombieri_sup(r)?;
            let fw = family_worst(&spec, r, DEFAULT_GRID, true)?;
            let family_sup = fw.sup_with_limit();
            Ok(BombieriRow {
                r,
                bombieri_sup: b,
                family_sup,
                argmax_a: if fw.sup_value >= fw.limit_value { fw.argmax_a } else { 1.0 },
                within: family_sup <= b + 1e-9,
            })
        })
        .collect()
}
