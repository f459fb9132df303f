//! Exact polynomial layer for the sharp constants.
//!
//! The extremal parameters are roots of integer polynomials. Uniqueness of
//! each root in its interval is certified with a Sturm sequence over exact
//! rationals and the root is then bracketed by exact dyadic bisection, so
//! the sign of the polynomial at every bracket end is known exactly.

use std::sync::OnceLock;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{check_domain, Error, Result};
use crate::numeric::horner;

/// ψ(t) = −405 + 473t + 402t² + 38t³ + 3t⁴ + t⁵; its root in (0,1) is the
/// extremal parameter of the squared-area inequality with |a_0|.
pub const PSI: [i64; 6] = [-405, 473, 402, 38, 3, 1];

/// −513 + 910t + 80t² + 2t³ + t⁴; root in (0,1) for the |f(z)|² variant.
pub const THM2_QUARTIC: [i64; 5] = [-513, 910, 80, 2, 1];

/// Minimal-degree equation satisfied by λ of the |a_0| variant.
pub const LAMBDA1_QUINTIC: [i64; 6] = [
    285_212_672,
    6_268_596_224,
    37_178_714_880,
    87_178_893_840,
    97_745_285_925,
    -5_509_980_288,
];

/// Equation satisfied by λ of the |f(z)|² variant.
pub const LAMBDA2_QUARTIC: [i64; 5] = [
    575_930_368,
    4_437_874_624,
    11_353_360_788,
    10_868_034_060,
    -703_096_443,
];

/// Default bisection tolerance for the certified constants.
pub const DEFAULT_ROOT_TOL: f64 = 1e-15;

/// Polynomial with exact rational coefficients, ascending degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealPolynomial {
    coeffs: Vec<BigRational>,
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact rational value of a finite f64.
pub fn exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or(Error::Domain {
        name: "x",
        value: x,
        domain: "finite",
    })
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn trim(mut c: Vec<BigRational>) -> Vec<BigRational> {
    while c.last().is_some_and(Zero::is_zero) {
        c.pop();
    }
    c
}

fn eval_vec(c: &[BigRational], x: &BigRational) -> BigRational {
    c.iter()
        .rev()
        .fold(BigRational::zero(), |acc, ci| acc * x + ci)
}

/// Remainder of a / b (b nonzero, trimmed).
fn rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let q = r.last().unwrap() / lead;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &q * bi;
        }
        r.pop();
        r = trim(r);
    }
    r
}

impl RealPolynomial {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self> {
        let coeffs = trim(coeffs);
        if coeffs.is_empty() {
            return Err(Error::ZeroPolynomial);
        }
        Ok(Self { coeffs })
    }

    pub fn from_integers(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| rat(c)).collect())
    }

    /// Exact rational coefficients taken from binary64 values.
    pub fn from_f64(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| exact(c)).collect::<Result<_>>()?)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(to_f64).collect()
    }

    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        eval_vec(&self.coeffs, x)
    }

    /// Horner evaluation in binary64.
    pub fn eval(&self, x: f64) -> f64 {
        horner(&self.coeffs_f64(), x)
    }

    pub fn derivative(&self) -> Option<Self> {
        let d: Vec<BigRational> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * rat(i as i64))
            .collect();
        Self::new(d).ok()
    }

    /// Sturm chain p, p', −rem(p, p'), …
    pub fn sturm_sequence(&self) -> Vec<RealPolynomial> {
        let mut chain = vec![self.coeffs.clone()];
        if let Some(d) = self.derivative() {
            chain.push(d.coeffs);
            loop {
                let n = chain.len();
                let r = rem(&chain[n - 2], &chain[n - 1]);
                if r.is_empty() {
                    break;
                }
                chain.push(r.into_iter().map(|c| -c).collect());
            }
        }
        chain.into_iter().map(|coeffs| RealPolynomial { coeffs }).collect()
    }

    fn sign_variations(chain: &[RealPolynomial], x: &BigRational) -> usize {
        let signs: Vec<bool> = chain
            .iter()
            .map(|p| p.eval_exact(x))
            .filter(|v| !v.is_zero())
            .map(|v| v.is_positive())
            .collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Divides out every factor (x − a) for which a is a root.
    fn deflate_at(&self, a: &BigRational) -> Option<RealPolynomial> {
        let mut c = self.coeffs.clone();
        while eval_vec(&c, a).is_zero() {
            if c.len() == 1 {
                return None;
            }
            // synthetic division
            let n = c.len() - 1;
            let mut q = vec![BigRational::zero(); n];
            let mut carry = BigRational::zero();
            for i in (0..n).rev() {
                carry = &c[i + 1] + &carry * a;
                q[i] = carry.clone();
            }
            c = q;
        }
        Some(RealPolynomial { coeffs: c })
    }

    /// Number of distinct real roots in the open interval (lo, hi).
    pub fn count_roots(&self, lo: &BigRational, hi: &BigRational) -> usize {
        if lo >= hi {
            return 0;
        }
        let Some(p) = self.deflate_at(lo).and_then(|p| p.deflate_at(hi)) else {
            return 0;
        };
        if p.degree() == 0 {
            return 0;
        }
        let chain = p.sturm_sequence();
        Self::sign_variations(&chain, lo) - Self::sign_variations(&chain, hi)
    }

    /// Certifies that the polynomial has exactly one root in (lo, hi) and
    /// brackets it to width <= tol by exact bisection.
    pub fn isolate_unique_root(&self, interval: (f64, f64), tol: f64) -> Result<RootResult> {
        let (lo_f, hi_f) = interval;
        if lo_f.is_nan() || hi_f.is_nan() || lo_f >= hi_f {
            return Err(Error::Precondition(format!(
                "empty interval ({lo_f}, {hi_f})"
            )));
        }
        check_domain("tol", tol, tol > 0.0, "(0, inf)")?;
        let mut lo = exact(lo_f)?;
        let mut hi = exact(hi_f)?;
        let count = self.count_roots(&lo, &hi);
        match count {
            0 => return Err(Error::NoRoot { lo: lo_f, hi: hi_f }),
            1 => {}
            _ => {
                return Err(Error::UniquenessFailed {
                    count,
                    lo: lo_f,
                    hi: hi_f,
                })
            }
        }
        let sign_lo = self.eval_exact(&lo);
        let sign_hi = self.eval_exact(&hi);
        if sign_lo.is_zero() || sign_hi.is_zero() || sign_lo.is_positive() == sign_hi.is_positive()
        {
            return Err(Error::NoSignChange { lo: lo_f, hi: hi_f });
        }
        let lo_positive = sign_lo.is_positive();
        let width = exact(tol)?;
        let two = rat(2);
        while &hi - &lo > width {
            let mid = (&lo + &hi) / &two;
            let v = self.eval_exact(&mid);
            if v.is_zero() {
                lo = mid.clone();
                hi = mid;
                break;
            }
            if v.is_positive() == lo_positive {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mid = (&lo + &hi) / &two;
        Ok(RootResult {
            value: to_f64(&mid),
            bracket: (to_f64(&lo), to_f64(&hi)),
            sign_change_count: count,
        })
    }
}

/// A certified root: `sign_change_count` is the Sturm count of distinct
/// roots in the search interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootResult {
    pub value: f64,
    pub bracket: (f64, f64),
    pub sign_change_count: usize,
}

pub fn psi_polynomial() -> RealPolynomial {
    RealPolynomial::from_integers(&PSI).expect("nonzero")
}

pub fn thm2_quartic() -> RealPolynomial {
    RealPolynomial::from_integers(&THM2_QUARTIC).expect("nonzero")
}

const LAMBDA1_NUMERATOR: [f64; 6] = [486.0, -261.0, -324.0, 2.0, 30.0, 3.0];
const LAMBDA2_NUMERATOR: [f64; 5] = [-81.0, 1044.0, 54.0, -116.0, -5.0];

/// λ(a) = 4(486 − 261a − 324a² + 2a³ + 30a⁴ + 3a⁵)/(81(1+a)³(3−5a)), a in [0, 3/5).
pub fn lambda_thm1(a: f64) -> Result<f64> {
    check_domain("a", a, (0.0..0.6).contains(&a), "[0, 3/5)")?;
    Ok(4.0 * horner(&LAMBDA1_NUMERATOR, a) / (81.0 * (1.0 + a).powi(3) * (3.0 - 5.0 * a)))
}

/// λ(a) = (−81 + 1044a + 54a² − 116a³ − 5a⁴)/(162(a+1)²(2a−1)), a in (1/2, 1].
pub fn lambda_thm2(a: f64) -> Result<f64> {
    check_domain("a", a, a > 0.5 && a <= 1.0, "(1/2, 1]")?;
    Ok(horner(&LAMBDA2_NUMERATOR, a) / (162.0 * (a + 1.0).powi(2) * (2.0 * a - 1.0)))
}

/// Certified sharp constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharpConstants {
    pub a1: RootResult,
    pub lambda1: f64,
    pub a2: RootResult,
    pub lambda2: f64,
    /// √5 − 2
    pub r0: f64,
    /// 2(√5 − 1)
    pub p: f64,
}

impl SharpConstants {
    pub fn compute(tol: f64) -> Result<Self> {
        let a1 = psi_polynomial().isolate_unique_root((0.0, 1.0), tol)?;
        let a2 = thm2_quartic().isolate_unique_root((0.0, 1.0), tol)?;
        Ok(Self {
            lambda1: lambda_thm1(a1.value)?,
            lambda2: lambda_thm2(a2.value)?,
            a1,
            a2,
            r0: sqrt5_minus_2(),
            p: 2.0 * (5f64.sqrt() - 1.0),
        })
    }
}

/// √5 − 2 computed as 1/(√5 + 2) to avoid cancellation.
pub fn sqrt5_minus_2() -> f64 {
    1.0 / (5f64.sqrt() + 2.0)
}

/// Constants at [`DEFAULT_ROOT_TOL`], computed once.
pub fn sharp_constants() -> &'static SharpConstants {
    static CELL: OnceLock<SharpConstants> = OnceLock::new();
    CELL.get_or_init(|| SharpConstants::compute(DEFAULT_ROOT_TOL).expect("certified roots"))
}

/// The algebraic equations quoted for the two λ values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemarkEquation {
    Thm1Quintic,
    Thm2Quartic,
}

impl RemarkEquation {
    pub fn coefficients(self) -> &'static [i64] {
        match self {
            Self::Thm1Quintic => &LAMBDA1_QUINTIC,
            Self::Thm2Quartic => &LAMBDA2_QUARTIC,
        }
    }

    pub fn polynomial(self) -> RealPolynomial {
        RealPolynomial::from_integers(self.coefficients()).expect("nonzero")
    }

    fn lambda(self) -> f64 {
        match self {
            Self::Thm1Quintic => sharp_constants().lambda1,
            Self::Thm2Quartic => sharp_constants().lambda2,
        }
    }
}

/// |P(λ)| / Σ |c_i| λ^i for the named equation at a given λ.
pub fn remark_residual_at(which: RemarkEquation, lambda: f64) -> f64 {
    let c: Vec<f64> = which.coefficients().iter().map(|&c| c as f64).collect();
    let scale: f64 = c
        .iter()
        .enumerate()
        .map(|(i, ci)| ci.abs() * lambda.abs().powi(i as i32))
        .sum();
    horner(&c, lambda).abs() / scale
}

/// Residual of the root → λ pipeline in the named equation.
pub fn remark_consistency(which: RemarkEquation) -> f64 {
    remark_residual_at(which, which.lambda())
}

/// Which factorization of Φ at the extremal point to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProofIdentity {
    /// Φ₁(a) = 2(a² − 9)/(3 − 5a) ψ(a)
    Thm1,
    /// Φ₂(a) = (9 − a²)/(2(2a − 1)) · (−513 + 910a + 80a² + 2a³ + a⁴)
    Thm2,
}

/// Outcome of [`identity_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub which: ProofIdentity,
    /// Max relative discrepancy over the samples with λ = λ(t) at each t.
    pub max_relative_discrepancy: f64,
    /// Scaled |Φ(a)| at the certified root (both sides vanish there).
    pub at_root: f64,
    /// Max relative discrepancy when λ is frozen at its value at the root.
    /// Large: the factorization is not an identity for fixed λ.
    pub fixed_lambda_discrepancy: f64,
    pub samples: usize,
}

const IDENTITY_SAMPLES: usize = 64;

/// Evaluates both sides of the factorization of Φ at 64 points of the
/// domain of λ(·). With λ replaced by its closed form λ(t) the relation is
/// an identity in t; with λ frozen it only holds at the root.
pub fn identity_check(which: ProofIdentity) -> IdentityCheck {
    use crate::functionals::{proof_function_parts, ProofFunctionKind};

    let consts = sharp_constants();
    let (kind, root, lambda_root, lo, hi) = match which {
        ProofIdentity::Thm1 => (
            ProofFunctionKind::Phi1,
            consts.a1.value,
            consts.lambda1,
            0.02,
            0.58,
        ),
        ProofIdentity::Thm2 => (
            ProofFunctionKind::Phi2,
            consts.a2.value,
            consts.lambda2,
            0.52,
            0.98,
        ),
    };
    let rhs = |t: f64| match which {
        ProofIdentity::Thm1 => 2.0 * (t * t - 9.0) / (3.0 - 5.0 * t) * psi_polynomial().eval(t),
        ProofIdentity::Thm2 => (9.0 - t * t) / (2.0 * (2.0 * t - 1.0)) * thm2_quartic().eval(t),
    };
    let lambda_at = |t: f64| match which {
        ProofIdentity::Thm1 => lambda_thm1(t),
        ProofIdentity::Thm2 => lambda_thm2(t),
    };
    let discrepancy = |t: f64, lambda: f64| {
        let (base, block, scale) = proof_function_parts(kind, t);
        let lhs = base + lambda * block;
        let r = rhs(t);
        (lhs - r).abs() / (scale.0 + lambda.abs() * scale.1).max(r.abs())
    };

    let ts: Vec<f64> = (0..IDENTITY_SAMPLES)
        .map(|i| lo + (hi - lo) * i as f64 / (IDENTITY_SAMPLES - 1) as f64)
        .chain(std::iter::once(root))
        .collect();
    let max_relative_discrepancy = ts
        .iter()
        .map(|&t| discrepancy(t, lambda_at(t).expect("inside domain")))
        .fold(0.0, f64::max);
    let fixed_lambda_discrepancy = ts
        .iter()
        .map(|&t| discrepancy(t, lambda_root))
        .fold(0.0, f64::max);
    let (base, block, scale) = proof_function_parts(kind, root);
    let at_root = (base + lambda_root * block).abs() / (scale.0 + lambda_root * scale.1);

    IdentityCheck {
        which,
        max_relative_discrepancy,
        at_root,
        fixed_lambda_discrepancy,
        samples: IDENTITY_SAMPLES,
    }
}

/// Positive root of the λ equation, isolated independently of the λ(a)
/// closed form.
pub fn remark_positive_root(which: RemarkEquation, interval: (f64, f64), tol: f64) -> Result<RootResult> {
    which.polynomial().isolate_unique_root(interval, tol)
}

/// Convenience for tests and callers holding small rationals.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
