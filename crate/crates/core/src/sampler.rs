//! Random bounded analytic functions for probing the inequalities away from
//! the extremal family: finite Blaschke products and sup-normalized
//! polynomials.

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Error, Result};
use crate::functionals::{FunctionalInputs, FunctionalKind, FunctionalSpec};
use crate::series::{PowerSeries, DEFAULT_ORDER};

/// Largest supported Blaschke degree.
pub const MAX_DEGREE: usize = 16;
/// Zeros are drawn from the disk of this radius.
pub const ZERO_RADIUS: f64 = 0.95;
/// Minimal truncation order of [`BlaschkeProduct::to_series`].
pub const MIN_ORDER: usize = 32;
/// Random polynomials are scaled to this fraction of the unit ball.
pub const POLY_DEFLATION: f64 = 0.98;
/// Trials with slack below this count as violations.
pub const SLACK_TOL: f64 = -1e-9;

const MAX_ZERO_MODULUS: f64 = 1.0 - 1e-9;
const BOUNDARY_GRID: usize = 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlaschkeProduct {
    zeros: Vec<Complex64>,
    rotation: Complex64,
}

impl BlaschkeProduct {
    pub fn new(zeros: Vec<Complex64>, rotation: Complex64) -> Result<Self> {
        for z in &zeros {
            check_domain("|zero|", z.norm(), z.norm() <= MAX_ZERO_MODULUS, "[0, 1 - 1e-9]")?;
        }
        check_domain(
            "|rotation|",
            rotation.norm(),
            (rotation.norm() - 1.0).abs() <= 1e-12,
            "1 +- 1e-12",
        )?;
        Ok(Self { zeros, rotation })
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn rotation(&self) -> Complex64 {
        self.rotation
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// B(z) = rotation · Π (z − w)/(1 − w̄ z).
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.zeros
            .iter()
            .fold(self.rotation, |acc, &w| acc * (z - w) / (Complex64::new(1.0, 0.0) - w.conj() * z))
    }

    /// First `n` Taylor coefficients. Exact when every zero is at the
    /// origin, otherwise a truncation with sup bound 1.
    pub fn to_series(&self, n: usize) -> Result<PowerSeries> {
        if n < MIN_ORDER {
            return Err(Error::Precondition(format!("order {n} below {MIN_ORDER}")));
        }
        let mut h = vec![Complex64::new(0.0, 0.0); n];
        h[0] = self.rotation;
        for &w in &self.zeros {
            // (z − w)/(1 − w̄ z) · h: g_k = w̄ g_{k−1} + h_{k−1} − w h_k
            let wc = w.conj();
            let mut g = vec![Complex64::new(0.0, 0.0); n];
            g[0] = -w * h[0];
            for k in 1..n {
                g[k] = wc * g[k - 1] + h[k - 1] - w * h[k];
            }
            h = g;
        }
        if self.zeros.iter().all(|w| w.norm() == 0.0) {
            let d = self.zeros.len() + 1;
            h.truncate(d.max(1));
            PowerSeries::polynomial(h)
        } else {
            PowerSeries::truncated(h, 1.0)
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random::<f64>() * std::f64::consts::TAU)
}

fn random_in_disk(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let rho = radius * rng.random::<f64>().sqrt();
    Complex64::from_polar(rho, rng.random::<f64>() * std::f64::consts::TAU)
}

fn blaschke_from_rng(degree: usize, rng: &mut ChaCha8Rng) -> BlaschkeProduct {
    let zeros = (0..degree).map(|_| random_in_disk(rng, ZERO_RADIUS)).collect();
    let rotation = random_unit(rng);
    BlaschkeProduct { zeros, rotation }
}

/// Zeros uniform on the disk of radius 0.95, rotation uniform on the circle.
pub fn random_blaschke(degree: usize, seed: u64) -> Result<BlaschkeProduct> {
    check_degree(degree)?;
    Ok(blaschke_from_rng(degree, &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn check_degree(degree: usize) -> Result<()> {
    if degree > MAX_DEGREE {
        return Err(Error::Domain {
            name: "degree",
            value: degree as f64,
            domain: "0..=16",
        });
    }
    Ok(())
}

fn polynomial_from_rng(degree: usize, rng: &mut ChaCha8Rng) -> Result<PowerSeries> {
    let raw: Vec<Complex64> = (0..=degree).map(|_| random_in_disk(rng, 1.0)).collect();
    let probe = PowerSeries::truncated(raw.clone(), 1.0)?;
    let sup = probe.sup_norm_estimate(BOUNDARY_GRID);
    let scale = if sup > 0.0 { POLY_DEFLATION / sup } else { 0.0 };
    PowerSeries::polynomial(raw.into_iter().map(|c| c * scale).collect())
}

/// Polynomial with coefficients uniform on the unit disk, rescaled so its
/// estimated sup norm on the disk is 0.98.
pub fn random_polynomial(degree: usize, seed: u64) -> Result<PowerSeries> {
    check_degree(degree)?;
    polynomial_from_rng(degree, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// 1 − (upper estimate of the functional); nonnegative when the inequality
/// holds for `s` at radius `r`.
pub fn property_trial(spec: &FunctionalSpec, s: &PowerSeries, r: f64) -> Result<f64> {
    check_domain("r", r, r >= 0.0 && r <= spec.kind.radius() + 1e-12, "[0, radius of the functional]")?;
    Ok(1.0 - FunctionalInputs::measure(s, r)?.evaluate(spec))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Blaschke,
    Polynomial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub trials: usize,
    /// Degree of every trial, or `None` to cycle through 0..=5.
    pub degree: Option<usize>,
    pub seed: u64,
    pub family: Family,
    pub order: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            degree: None,
            seed: 0,
            family: Family::Blaschke,
            order: DEFAULT_ORDER,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialWitness {
    pub trial: usize,
    pub degree: usize,
    pub kind: FunctionalKind,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KindSummary {
    pub kind: FunctionalKind,
    pub r: f64,
    pub min_slack: f64,
    pub witness: TrialWitness,
    /// Counts of slack in [0, 0.1), [0.1, 0.2), ..., [0.9, 1]; index 0 also
    /// holds negative slack.
    pub histogram: [usize; 10],
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub trials: usize,
    pub seed: u64,
    pub min_slack: f64,
    pub per_kind: Vec<KindSummary>,
    pub violations: Vec<TrialWitness>,
}

fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Runs `trials` seeded trials of every spec at its radius. Each trial owns
/// its generator, derived from (seed, trial index), so the outcome does not
/// depend on the thread count.
pub fn run_suite(specs: &[FunctionalSpec], cfg: &SuiteConfig) -> Result<SuiteReport> {
    if cfg.trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    if specs.is_empty() {
        return Err(Error::Empty);
    }
    if let Some(d) = cfg.degree {
        check_degree(d)?;
    }
    if cfg.order < MIN_ORDER {
        return Err(Error::Precondition(format!("order {} below {MIN_ORDER}", cfg.order)));
    }
    let mut radii: Vec<f64> = specs.iter().map(|s| s.kind.radius()).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup();

    let rows: Vec<(usize, Vec<f64>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| -> Result<(usize, Vec<f64>)> {
            let degree = cfg.degree.unwrap_or(i % 6);
            let mut rng = trial_rng(cfg.seed, i);
            let series = match cfg.family {
                Family::Blaschke => blaschke_from_rng(degree, &mut rng).to_series(cfg.order)?,
                Family::Polynomial => polynomial_from_rng(degree, &mut rng)?,
            };
            let inputs = radii
                .iter()
                .map(|&r| FunctionalInputs::measure(&series, r))
                .collect::<Result<Vec<_>>>()?;
            let slacks = specs
                .iter()
                .map(|s| {
                    let j = radii.iter().position(|&r| r == s.kind.radius()).unwrap();
                    1.0 - inputs[j].evaluate(s)
                })
                .collect();
            Ok((degree, slacks))
        })
        .collect::<Result<_>>()?;

    let mut per_kind = Vec::with_capacity(specs.len());
    let mut violations = Vec::new();
    for (j, spec) in specs.iter().enumerate() {
        let mut histogram = [0usize; 10];
        let mut witness = TrialWitness {
            trial: 0,
            degree: rows[0].0,
            kind: spec.kind,
            slack: f64::INFINITY,
        };
        let mut count = 0;
        for (i, (degree, slacks)) in rows.iter().enumerate() {
            let s = slacks[j];
            histogram[((s * 10.0).floor().max(0.0) as usize).min(9)] += 1;
            if s < witness.slack {
                witness = TrialWitness {
                    trial: i,
                    degree: *degree,
                    kind: spec.kind,
                    slack: s,
                };
            }
            if s < SLACK_TOL {
                count += 1;
                violations.push(TrialWitness {
                    trial: i,
                    degree: *degree,
                    kind: spec.kind,
                    slack: s,
                });
            }
        }
        per_kind.push(KindSummary {
            kind: spec.kind,
            r: spec.kind.radius(),
            min_slack: witness.slack,
            witness,
            histogram,
            violations: count,
        });
    }
    let min_slack = per_kind.iter().map(|k| k.min_slack).fold(f64::INFINITY, f64::min);
    Ok(SuiteReport {
        trials: cfg.trials,
        seed: cfg.seed,
        min_slack,
        per_kind,
        violations,
    })
}

/// The sharp spec of every functional.
pub fn all_sharp_specs() -> Vec<FunctionalSpec> {
    FunctionalKind::ALL.iter().map(|&k| FunctionalSpec::sharp(k)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::MoebiusFunction;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn degree_zero_is_rotation() {
        let b = random_blaschke(0, 5).unwrap();
        let s = b.to_series(32).unwrap();
        assert!(s.is_exact());
        assert_eq!(s.coeffs(), &[b.rotation()]);
        assert!((b.rotation().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn double_zero_at_origin_is_z_squared() {
        let b = BlaschkeProduct::new(vec![c(0.0, 0.0); 2], c(1.0, 0.0)).unwrap();
        let s = b.to_series(64).unwrap();
        assert!(s.is_exact());
        assert_eq!(s.coeffs(), &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    }

    #[test]
    fn degree_one_matches_moebius() {
        for a in [0.1, 0.5, 0.567284, 0.9] {
            let b = BlaschkeProduct::new(vec![c(a, 0.0)], c(1.0, 0.0)).unwrap();
            let s = b.to_series(128).unwrap();
            let m = MoebiusFunction::new(a).unwrap().coefficients(128);
            for (x, y) in s.coeffs().iter().zip(m.coeffs()) {
                assert!((x + y).norm() < 1e-12, "{a}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn recurrence_matches_evaluation() {
        let b = random_blaschke(4, 11).unwrap();
        let s = b.to_series(512).unwrap();
        for z in [c(0.3, 0.1), c(-0.2, 0.5), c(0.0, -0.6)] {
            assert!((s.eval(z).unwrap() - b.eval(z)).norm() < 1e-12);
        }
    }

    #[test]
    fn seeded_blaschke_is_reproducible() {
        let a = random_blaschke(3, 42).unwrap();
        let b = random_blaschke(3, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_blaschke(3, 43).unwrap());
        assert!(a.zeros().iter().all(|z| z.norm() <= ZERO_RADIUS));
        assert!(random_blaschke(17, 0).is_err());
    }

    #[test]
    fn random_polynomial_in_ball() {
        for seed in 0..20 {
            let p = random_polynomial(5, seed).unwrap();
            let sup = p.sup_norm_report(4096);
            assert!(sup.value <= POLY_DEFLATION + 1e-6, "{sup:?}");
            assert!(sup.value >= POLY_DEFLATION - 1e-3);
        }
    }

    #[test]
    fn trial_examples() {
        let t1 = FunctionalSpec::sharp(FunctionalKind::Thm1);
        let z2 = PowerSeries::from_real(&[0.0, 0.0, 1.0]).unwrap();
        let lambda = t1.lambda;
        let area = 2.0 / 81.0;
        let want = 1.0 - (1.0 / 9.0 + 16.0 / 9.0 * area + lambda * area * area);
        let got = property_trial(&t1, &z2, 1.0 / 3.0).unwrap();
        assert!((got - want).abs() < 1e-14);
        assert!((got - 0.83364).abs() < 1e-4);

        let a1 = crate::constants::sharp_constants().a1.value;
        let m = MoebiusFunction::new(a1).unwrap().coefficients(DEFAULT_ORDER);
        assert!(property_trial(&t1, &m, 1.0 / 3.0).unwrap().abs() < 1e-6);

        let zero = PowerSeries::from_real(&[0.0]).unwrap();
        for spec in all_sharp_specs() {
            assert_eq!(property_trial(&spec, &zero, spec.kind.radius()).unwrap(), 1.0);
        }
        assert!(property_trial(&t1, &z2, 0.4).is_err());
    }

    #[test]
    fn small_suite() {
        let cfg = SuiteConfig {
            trials: 300,
            ..SuiteConfig::default()
        };
        let report = run_suite(&all_sharp_specs(), &cfg).unwrap();
        assert!(report.min_slack >= SLACK_TOL, "{report:?}");
        assert!(report.violations.is_empty());
        for k in &report.per_kind {
            assert_eq!(k.histogram.iter().sum::<usize>(), 300);
        }
        let again = run_suite(&all_sharp_specs(), &cfg).unwrap();
        assert_eq!(report, again);
    }

    #[test]
    fn polynomial_suite() {
        let cfg = SuiteConfig {
            trials: 200,
            family: Family::Polynomial,
            ..SuiteConfig::default()
        };
        let report = run_suite(&all_sharp_specs(), &cfg).unwrap();
        assert!(report.min_slack >= SLACK_TOL, "{report:?}");
    }
}
