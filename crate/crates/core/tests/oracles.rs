// Independent recomputations of the published and derived numbers, written
// against plain f64 formulas rather than the library internals.

use bohr_core::constants::{sharp_constants, sqrt5_minus_2};
use bohr_core::functionals::{
    envelope, proof_function, thm3_coefficients, thm3_delta, upper_deficit, AREA_WEIGHT,
};
use bohr_core::lemma::{bombieri_sup, lemma_a_rhs, lemma_b_rhs, TailBoundParams};
use bohr_core::radius::bohr_radius;
use bohr_core::series::{MoebiusFunction, DEFAULT_ORDER};
use bohr_core::{FunctionalKind, FunctionalSpec, ProofFunctionKind};

fn tail(a: f64, r: f64) -> f64 {
    r * (1.0 - a * a) / (1.0 - r * a)
}

fn area(a: f64, r: f64) -> f64 {
    r * r * (1.0 - a * a).powi(2) / (1.0 - a * a * r * r).powi(2)
}

fn pick(a: f64, r: f64) -> f64 {
    (r + a) / (1.0 + r * a)
}

fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

// λ(a) is the largest quadratic weight for which the upper-branch value at
// |a_0| = a stays <= 1; the sharp λ is its minimum over a.
#[test]
fn lambda1_as_minimum_of_admissible_weights() {
    let r = 1.0 / 3.0;
    let lam = |a: f64| {
        let s = area(a, r);
        (1.0 - a - tail(a, r) - AREA_WEIGHT * s) / (s * s)
    };
    let (a, l) = golden_min(lam, 0.4, 0.7);
    let c = sharp_constants();
    assert!((a - c.a1.value).abs() < 1e-7, "{a}");
    assert!((l - c.lambda1).abs() < 1e-9 * l, "{l}");
    assert!((a - 0.567284).abs() < 5e-7);
    assert!((l - 18.6095).abs() < 5e-5);
}

#[test]
fn lambda2_as_minimum_of_admissible_weights() {
    let r = 1.0 / 3.0;
    let lam = |a: f64| {
        let s = area(a, r);
        (1.0 - pick(a, r).powi(2) - tail(a, r) - AREA_WEIGHT * s) / (s * s)
    };
    let (a, l) = golden_min(lam, 0.4, 0.7);
    let c = sharp_constants();
    assert!((a - c.a2.value).abs() < 1e-7, "{a}");
    assert!((l - c.lambda2).abs() < 1e-9 * l, "{l}");
    assert!((a - 0.537869).abs() < 5e-7);
    assert!((l - 16.4618).abs() < 5e-5);
}

#[test]
fn thm3_from_plain_formula() {
    let r0 = 5f64.sqrt() - 2.0;
    let p0 = 2.0 * (5f64.sqrt() - 1.0);
    assert!((sqrt5_minus_2() - r0).abs() < 1e-15);
    assert!((sharp_constants().p - p0).abs() < 1e-15);
    for &(a, eps) in &[(0.9, 0.0), (0.9, 0.5), (0.5, 0.1), (0.3, 0.0), (0.99, 1.0)] {
        let direct = pick(a, r0) + tail(a, r0) + (p0 + eps) * area(a, r0) - 1.0;
        let lib = thm3_delta(a, eps).unwrap();
        assert!((direct - lib).abs() < 1e-13, "{a} {eps}: {direct} vs {lib}");
    }
    assert!((thm3_delta(0.9, 0.5).unwrap() - 0.000504).abs() < 1e-5);
    assert!((thm3_delta(0.9, 0.0).unwrap() + 0.000598704).abs() < 1e-9);
    let s5 = 5f64.sqrt();
    let c = thm3_coefficients();
    for (got, want) in c.iter().zip([-9.0 + 4.0 * s5, -47.0 + 21.0 * s5, -161.0 + 72.0 * s5]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn deficits_match_direct_evaluation() {
    for kind in FunctionalKind::ALL {
        let spec = FunctionalSpec::sharp(kind);
        let r = kind.radius();
        let w = spec.linear_area_weight();
        let l = spec.quadratic_area_weight();
        for i in 0..=20 {
            let t = r + (1.0 - r) * i as f64 / 20.0;
            let lead = match kind {
                FunctionalKind::Classical | FunctionalKind::ThmA | FunctionalKind::Thm1 => t,
                FunctionalKind::ThmB1 | FunctionalKind::Thm3 => pick(t, r),
                FunctionalKind::ThmB2 | FunctionalKind::Thm2 => pick(t, r).powi(2),
            };
            let s = area(t, r);
            let direct = 1.0 - (lead + tail(t, r) + w * s + l * s * s);
            assert!(
                (upper_deficit(&spec, t) - direct).abs() < 1e-13,
                "{kind} t={t}"
            );
            let env = envelope(&spec, t, r).unwrap();
            assert!((1.0 - env - direct).abs() < 1e-13);
        }
    }
}

#[test]
fn moebius_closed_form_coefficients() {
    let a: f64 = 0.6;
    let s = MoebiusFunction::new(a).unwrap().coefficients(64);
    assert!((s.coeffs()[0].re - a).abs() < 1e-15);
    for k in 1..64 {
        let want = -(1.0 - a * a) * a.powi(k as i32 - 1);
        assert!((s.coeffs()[k].re - want).abs() < 1e-15);
    }
}

#[test]
fn lemma_equality_for_moebius() {
    let rs: [f64; 5] = [0.1, 0.2, 1.0 / 3.0, 0.5, 0.7];
    let as_: [f64; 4] = [0.0, 0.3, 0.567, 0.9];
    for &r in &rs {
        for &a in &as_ {
            let s = MoebiusFunction::new(a).unwrap().coefficients(DEFAULT_ORDER);
            let direct_a: f64 = (1..200).map(|k| ((1.0 - a * a) * a.powi(k - 1)).powi(2) * r.powi(k)).sum();
            let p = TailBoundParams::new(a, r, 1).unwrap();
            assert!((lemma_a_rhs(&p) - direct_a).abs() < 1e-12);
            assert!((s.square_sum(r).unwrap().value - direct_a).abs() < 1e-12);
            let direct_b: f64 = (1..400)
                .map(|k| k as f64 * ((1.0 - a * a) * a.powi(k - 1)).powi(2) * r.powi(2 * k))
                .sum();
            assert!((lemma_b_rhs(a, r).unwrap() - direct_b).abs() < 1e-12);
        }
    }
}

#[test]
fn bombieri_endpoints_and_mid() {
    assert!((bombieri_sup(1.0 / 3.0).unwrap() - 1.0).abs() < 1e-12);
    assert!((bombieri_sup(0.5f64.sqrt()).unwrap() - 2f64.sqrt()).abs() < 1e-12);
    // r = 1/2: (3 − √6)·2
    assert!((bombieri_sup(0.5).unwrap() - 2.0 * (3.0 - 6f64.sqrt())).abs() < 1e-12);
}

#[test]
fn phi_endpoint_values() {
    let c = sharp_constants();
    let third = 1.0 / 3.0;
    let v1 = proof_function(ProofFunctionKind::Phi1, third, c.lambda1).unwrap();
    let v2 = proof_function(ProofFunctionKind::Phi2, third, c.lambda2).unwrap();
    assert!((v1 - 476.0965).abs() < 1e-3, "{v1}");
    assert!((v2 - 210.5875).abs() < 1e-3, "{v2}");
    assert!((proof_function(ProofFunctionKind::Psi1, third, c.lambda1).unwrap() - 0.977404).abs() < 1e-6);
    assert!((proof_function(ProofFunctionKind::Psi2, third, c.lambda2).unwrap() - 0.9866738).abs() < 1e-6);
}

#[test]
fn classical_radius_is_one_third() {
    let res = bohr_radius(&FunctionalSpec::classical(), 1e-8).unwrap();
    assert!((res.radius - 1.0 / 3.0).abs() < 1e-7);
}
