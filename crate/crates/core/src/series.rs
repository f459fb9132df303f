//! Truncated power series of analytic self-maps of the unit disk.
//!
//! A [`PowerSeries`] is either an exact polynomial (every coefficient beyond
//! the stored order is zero) or a truncation of an infinite expansion whose
//! omitted coefficients are only known to satisfy `|a_k| <= sup_bound`.
//! Every radial quantity is returned together with a rigorous bound on the
//! contribution of the omitted tail.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Error, Result};
use crate::numeric::compensated_sum;

/// Default truncation order for expansions of infinite series.
pub const DEFAULT_ORDER: usize = 512;

/// Relative slack tolerated on `|a_k| <= sup_bound` before rejecting.
pub const MODULUS_SLACK: f64 = 1e-12;

/// Largest radius at which the area bound of the lemmas is valid.
pub const AREA_LEMMA_MAX_RADIUS: f64 = std::f64::consts::FRAC_1_SQRT_2;

const RADIUS_SLACK: f64 = 1e-12;

/// A truncated value and a bound on what the omitted tail may add to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncated {
    pub value: f64,
    pub tail_bound: f64,
}

impl Truncated {
    pub fn upper(&self) -> f64 {
        self.value + self.tail_bound
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
    sup_bound: f64,
    exact: bool,
}

impl PowerSeries {
    /// An exact polynomial of a self-map of the disk (`sup_bound = 1`).
    pub fn polynomial(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::build(coeffs, 1.0, true)
    }

    /// Real-coefficient convenience wrapper around [`PowerSeries::polynomial`].
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::polynomial(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// The first `coeffs.len()` coefficients of an infinite expansion whose
    /// function is bounded by `sup_bound` on the disk.
    pub fn truncated(coeffs: Vec<Complex64>, sup_bound: f64) -> Result<Self> {
        Self::build(coeffs, sup_bound, false)
    }

    fn build(mut coeffs: Vec<Complex64>, sup_bound: f64, exact: bool) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Empty);
        }
        check_domain("sup_bound", sup_bound, sup_bound > 0.0, "(0, inf)")?;
        for (index, c) in coeffs.iter_mut().enumerate() {
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(Error::NonFinite(index));
            }
            let modulus = c.norm();
            if modulus > sup_bound * (1.0 + MODULUS_SLACK) {
                return Err(Error::CoefficientTooLarge {
                    index,
                    modulus,
                    bound: sup_bound,
                });
            }
            if modulus > sup_bound {
                *c *= sup_bound / modulus;
            }
        }
        Ok(Self {
            coeffs,
            sup_bound,
            exact,
        })
    }

    /// Highest retained index N.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    /// `true` when the stored coefficients are the whole function.
    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Truncated value Σ_{k<=N} a_k z^k, no tail correction.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        let m = z.norm();
        check_domain("|z|", m, m <= 1.0 + RADIUS_SLACK, "[0, 1]")?;
        Ok(self
            .coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c))
    }

    /// Bound on Σ_{k>N} |a_k| r^k.
    fn linear_tail(&self, r: f64) -> f64 {
        if self.exact || r == 0.0 {
            0.0
        } else {
            self.sup_bound * r.powi(self.coeffs.len() as i32) / (1.0 - r)
        }
    }

    /// Bohr sum Σ |a_k| r^k.
    pub fn bohr_sum(&self, r: f64) -> Result<Truncated> {
        check_radius(r)?;
        let head = self.coeffs[0].norm();
        let tail = self.tail_sum(r)?;
        Ok(Truncated {
            value: compensated_sum([head, tail.value]),
            tail_bound: tail.tail_bound,
        })
    }

    /// Σ_{k>=1} |a_k| r^k, the Bohr sum without its constant term.
    pub fn tail_sum(&self, r: f64) -> Result<Truncated> {
        check_radius(r)?;
        let value = compensated_sum(
            self.coeffs
                .iter()
                .skip(1)
                .scan(1.0, |pow, c| {
                    *pow *= r;
                    Some(c.norm() * *pow)
                }),
        );
        Ok(Truncated {
            value,
            tail_bound: self.linear_tail(r),
        })
    }

    /// Normalized area S_r/π = Σ k |a_k|² r^{2k} of the image of |z| < r.
    pub fn area_ratio(&self, r: f64) -> Result<Truncated> {
        check_radius(r)?;
        let x = r * r;
        let value = compensated_sum(self.coeffs.iter().enumerate().skip(1).scan(
            1.0,
            |pow, (k, c)| {
                *pow *= x;
                Some(k as f64 * c.norm_sqr() * *pow)
            },
        ));
        // Σ_{k>=M} k x^k = x^M (M - (M-1) x) / (1-x)^2 with M = N + 1.
        let tail_bound = if self.exact || r == 0.0 {
            0.0
        } else {
            let m = self.coeffs.len() as f64;
            self.sup_bound.powi(2) * x.powf(m) * (m - (m - 1.0) * x) / (1.0 - x).powi(2)
        };
        Ok(Truncated { value, tail_bound })
    }

    /// Σ_{k>=1} |a_k|² ρ^k.
    pub fn square_sum(&self, rho: f64) -> Result<Truncated> {
        check_radius(rho)?;
        let value = compensated_sum(self.coeffs.iter().skip(1).scan(1.0, |pow, c| {
            *pow *= rho;
            Some(c.norm_sqr() * *pow)
        }));
        let tail_bound = if self.exact || rho == 0.0 {
            0.0
        } else {
            self.sup_bound.powi(2) * rho.powi(self.coeffs.len() as i32) / (1.0 - rho)
        };
        Ok(Truncated { value, tail_bound })
    }

    /// Maximum of |f| over `points` equispaced points of the circle |z| = r.
    ///
    /// Terms whose total weight Σ |a_k| r^k falls below 1e-17 are skipped;
    /// their exact contribution is moved into the tail bound together with
    /// the truncation tail.
    pub fn circle_max_modulus(&self, r: f64, points: usize) -> Result<Truncated> {
        check_radius(r)?;
        if points == 0 {
            return Err(Error::Precondition("circle grid needs at least one point".into()));
        }
        let weights: Vec<f64> = self
            .coeffs
            .iter()
            .scan(1.0, |pow, c| {
                let w = c.norm() * *pow;
                *pow *= r;
                Some(w)
            })
            .collect();
        let mut cut = self.coeffs.len();
        let mut dropped = 0.0;
        while cut > 1 && dropped + weights[cut - 1] <= 1e-17 {
            dropped += weights[cut - 1];
            cut -= 1;
        }
        let scaled: Vec<Complex64> = self.coeffs[..cut]
            .iter()
            .scan(1.0, |pow, &c| {
                let out = c * *pow;
                *pow *= r;
                Some(out)
            })
            .collect();

        // Horner in structure-of-arrays form: the inner loop runs over the
        // grid points so it vectorizes.
        let step = std::f64::consts::TAU / points as f64;
        let (cos, sin): (Vec<f64>, Vec<f64>) = (0..points)
            .map(|j| {
                let (s, c) = (j as f64 * step).sin_cos();
                (c, s)
            })
            .unzip();
        let last = scaled[cut - 1];
        let mut re = vec![last.re; points];
        let mut im = vec![last.im; points];
        for c in scaled[..cut - 1].iter().rev() {
            for j in 0..points {
                let (x, y) = (re[j], im[j]);
                re[j] = x * cos[j] - y * sin[j] + c.re;
                im[j] = x * sin[j] + y * cos[j] + c.im;
            }
        }
        let max_sq = re
            .iter()
            .zip(&im)
            .map(|(x, y)| x * x + y * y)
            .fold(0.0_f64, f64::max);
        Ok(Truncated {
            value: max_sq.sqrt(),
            tail_bound: dropped + self.linear_tail(r),
        })
    }

    /// Estimate of sup |f| on the unit circle; see [`SupNormEstimate`].
    pub fn sup_norm_estimate(&self, boundary_grid: usize) -> f64 {
        self.sup_norm_report(boundary_grid).value
    }

    /// Grid maximum of |f| at radius 1 − 1e−9 plus a second-order grid
    /// margin. The grid is refined (doubling, up to 2^16 points) until the
    /// margin drops below 1e−7. The truncation tail is not included.
    pub fn sup_norm_report(&self, boundary_grid: usize) -> SupNormEstimate {
        const RHO: f64 = 1.0 - 1e-9;
        const TARGET_MARGIN: f64 = 1e-7;
        const MAX_POINTS: usize = 1 << 16;

        // g(θ) = |f(ρ e^{iθ})|², |g''| <= 2 (S0 S2 + S1²) with S_j = Σ k^j |a_k| ρ^k.
        let mut s = [0.0_f64; 3];
        let mut pow = 1.0;
        for (k, c) in self.coeffs.iter().enumerate() {
            let w = c.norm() * pow;
            let kf = k as f64;
            s[0] += w;
            s[1] += kf * w;
            s[2] += kf * kf * w;
            pow *= RHO;
        }
        let curvature = 2.0 * (s[0] * s[2] + s[1] * s[1]);

        let mut points = boundary_grid.max(64);
        loop {
            let grid_max_sq = self
                .circle_max_modulus(RHO, points)
                .map(|t| t.value * t.value)
                .unwrap_or(0.0);
            let h = std::f64::consts::TAU / points as f64;
            let margin_sq = curvature * h * h / 8.0;
            let grid_max = grid_max_sq.sqrt();
            let value = (grid_max_sq + margin_sq).sqrt();
            if value - grid_max <= TARGET_MARGIN || points >= MAX_POINTS {
                return SupNormEstimate {
                    value,
                    grid_max,
                    margin: value - grid_max,
                    points,
                };
            }
            points *= 2;
        }
    }
}

/// Result of [`PowerSeries::sup_norm_report`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupNormEstimate {
    pub value: f64,
    pub grid_max: f64,
    pub margin: f64,
    pub points: usize,
}

fn check_radius(r: f64) -> Result<()> {
    check_domain("r", r, (0.0..1.0).contains(&r), "[0, 1)")
}

/// Disk automorphism f(z) = (a − z)/(1 − a z) with real parameter a in [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoebiusFunction {
    a: f64,
}

impl MoebiusFunction {
    pub fn new(a: f64) -> Result<Self> {
        check_domain("a", a, (0.0..1.0).contains(&a), "[0, 1)")?;
        Ok(Self { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn value(&self, z: Complex64) -> Complex64 {
        (self.a - z) / (1.0 - self.a * z)
    }

    /// a − (1 − a²) Σ_{k>=1} a^{k−1} z^k truncated at order `n`.
    pub fn coefficients(&self, n: usize) -> PowerSeries {
        let a = self.a;
        let mut coeffs = Vec::with_capacity(n + 1);
        coeffs.push(Complex64::new(a, 0.0));
        let mut c = -(1.0 - a * a);
        for _ in 1..=n {
            coeffs.push(Complex64::new(c, 0.0));
            c *= a;
        }
        PowerSeries::truncated(coeffs, 1.0).expect("Moebius coefficients are bounded by 1")
    }

    /// Closed-form Bohr sum a + (1 − a²) r/(1 − a r).
    pub fn bohr_sum(&self, r: f64) -> Result<f64> {
        check_radius(r)?;
        let a = self.a;
        Ok(a + (1.0 - a * a) * r / (1.0 - a * r))
    }

    /// Closed-form area ratio (1 − a²)² r²/(1 − a² r²)².
    pub fn area_ratio(&self, r: f64) -> Result<f64> {
        check_domain(
            "r",
            r,
            (0.0..=AREA_LEMMA_MAX_RADIUS + RADIUS_SLACK).contains(&r),
            "[0, 1/sqrt(2)]",
        )?;
        let a2 = self.a * self.a;
        Ok((1.0 - a2).powi(2) * r * r / (1.0 - a2 * r * r).powi(2))
    }
}
