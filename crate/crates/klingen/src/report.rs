//! Verification scenarios and machine-readable reports.
//!
//! Each `verify_*` function runs one identity check and returns a
//! [`VerificationReport`]; serialization is stable-ordered so identical
//! inputs produce byte-identical JSON apart from the `runtime_ms` field.

use std::time::Instant;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::arith::{divisor_sum, gcd_i64, zeta_neg_odd, Rational};
use crate::evaluator::{
    eval_klingen_diag_with, eval_pullback_rhs, eval_pullback_rhs_para, extract_af,
    klingen_prefactor, KlingenEvaluator, LSeriesCutoffs, TruncationParams, UpperHalfPoint,
};
use crate::lfunctions::{divisors, phi_scalar, rankin_naive, sym2_l, ExactReal};
use crate::qseries::{eigenform, eigenform_coeffs_f64, newform_level2_weight8, QSeries};
use crate::quadforms::{disc_split, lambda_set, reduce_singular, theta_coeffs, theta_envelope};
use crate::{Error, Result};

/// Complex number in a serialization-friendly shape.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue { re: z.re, im: z.im }
    }
}

/// Result of one identity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: u32,
    pub claim: String,
    pub lhs: ComplexValue,
    pub rhs: ComplexValue,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub truncation: TruncationParams,
    pub conventions: Vec<String>,
    pub runtime_ms: u128,
}

pub const SCHEMA_VERSION: u32 = 1;

/// Default tolerances: pointwise pullback, the (1,1) identity, the general
/// coefficient identity. Chosen with an order-of-magnitude margin over the
/// stacked tail and aliasing estimates.
pub const TOL_POINTWISE: f64 = 1e-6;
pub const TOL_COR13: f64 = 1e-5;
pub const TOL_COR14: f64 = 1e-4;
pub const TOL_PARA: f64 = 1e-6;

fn base_conventions() -> Vec<String> {
    vec![
        "sym2 normalization: zeta(2s-2k+2) sum a(n^2) n^-s".into(),
        "rankin convolution: sum a(n) b_T(v^2 n) n^-s".into(),
        "singular T: A(T,f) = a(content T)".into(),
        "coupled sum over positive coprime (c,d) with prefactor 2".into(),
        "character chi_{-det 2T} evaluated mod the fundamental discriminant -Delta(T)".into(),
    ]
}

fn finish(
    claim: String,
    lhs: Complex64,
    rhs: Complex64,
    tolerance: f64,
    truncation: TruncationParams,
    mut conventions: Vec<String>,
    started: Instant,
) -> VerificationReport {
    let abs_err = (lhs - rhs).norm();
    let scale = lhs.norm().max(rhs.norm());
    // relative error, falling back to absolute for near-zero targets
    let rel_err = if scale > 1e-100 { abs_err / scale } else { abs_err };
    conventions.shrink_to_fit();
    VerificationReport {
        schema: SCHEMA_VERSION,
        claim,
        lhs: lhs.into(),
        rhs: rhs.into(),
        abs_err,
        rel_err,
        tolerance,
        pass: rel_err <= tolerance,
        truncation,
        conventions,
        runtime_ms: started.elapsed().as_millis(),
    }
}

/// Pointwise check: Klingen diagonal expansion against the pullback
/// right-hand side at each given point (level 1).
pub fn verify_pointwise(
    k: u64,
    points: &[(UpperHalfPoint, UpperHalfPoint)],
    params: &TruncationParams,
    cutoffs: LSeriesCutoffs,
    tolerance: f64,
) -> Result<Vec<VerificationReport>> {
    let f = eigenform(k, params.qexp_order)?;
    let mut ev = KlingenEvaluator::new(&f, cutoffs)?;
    let mut out = Vec::with_capacity(points.len());
    for &(t1, t2) in points {
        let started = Instant::now();
        let (lhs, _) = eval_klingen_diag_with(&mut ev, t1, t2, params)?;
        let (rhs, _) = eval_pullback_rhs(&f, 1, t1, t2, params)?;
        out.push(finish(
            format!("pointwise pullback k={k} tau1={t1} tau2={t2}"),
            lhs,
            rhs,
            tolerance,
            *params,
            base_conventions(),
            started,
        ));
    }
    Ok(out)
}

/// The critical-value identity at `(n1, n2) = (1, 1)`:
/// `4/zeta(1-k) + A_f(1,1)` against
/// `2 + C [2^{2k-3} L(k-1,chi_-4) R_1 + 2*3^{k-3/2} L(k-1,chi_-3) R_2] / L(2k-2, Sym^2 f)`.
pub fn verify_cor13(
    k: u64,
    params: &TruncationParams,
    rankin_cutoff: usize,
    sym2_cutoff: usize,
    y: f64,
    tolerance: f64,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let f = eigenform(k, params.qexp_order)?;
    let (af, _) = extract_af(&f, 1, 1, y, y, params)?;
    let four_over_zeta = (Rational::from(num_bigint::BigInt::from(4)) / zeta_neg_odd(k)?)
        .to_f64()
        .unwrap();
    let lhs = four_over_zeta + af;

    let a = eigenform_coeffs_f64(k, rankin_cutoff)?;
    let sym2 = sym2_l(&a, k, 2.0 * k as f64 - 2.0, sym2_cutoff)?;
    let mut rhs = 2.0;
    // the two nonsingular classes in Lambda(1,1): diag(1,1) and b = +-1
    for (delta, mult, theta_t) in [
        (4u64, 1.0f64, crate::quadforms::HalfIntMatrix::new(1, 0, 1)),
        (3, 2.0, crate::quadforms::HalfIntMatrix::new(1, 1, 1)),
    ] {
        let b = theta_coeffs(&theta_t, rankin_cutoff + 1)?;
        let r = rankin_naive(
            &a,
            &b,
            theta_envelope(&theta_t),
            k as f64 - 1.0,
            1,
            k,
            rankin_cutoff,
        )?;
        rhs += mult * klingen_prefactor(k, delta)?.to_f64() * r.value / sym2.value;
    }

    Ok(finish(
        format!("critical L-value identity at (1,1), k={k} (grid {}, y={y})", params.grid_size),
        Complex64::new(lhs, 0.0),
        Complex64::new(rhs, 0.0),
        tolerance,
        *params,
        base_conventions(),
        started,
    ))
}

/// The coefficient identity for coprime `(n1, n2)`: the L-value side over
/// `Lambda(n1, n2)` against the pullback side
/// `C (2/zeta(1-k) [a(n1) sigma(n2) + a(n2) sigma(n1)] + A_f(n1, n2))`.
pub fn verify_cor14(
    k: u64,
    n1: u32,
    n2: u32,
    params: &TruncationParams,
    rankin_cutoff: usize,
    sym2_cutoff: usize,
    y: f64,
    tolerance: f64,
) -> Result<VerificationReport> {
    if gcd_i64(n1 as i64, n2 as i64) != 1 {
        return Err(Error::arg(format!("({n1}, {n2}) must be coprime")));
    }
    let started = Instant::now();
    let f = eigenform(k, params.qexp_order)?;
    let a = eigenform_coeffs_f64(k, rankin_cutoff)?;
    let sym2 = sym2_l(&a, k, 2.0 * k as f64 - 2.0, sym2_cutoff)?;
    let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
    // C = (2k-2)! / ((2pi)^{k-1} (k-1)!)
    let mut c_norm = 1.0f64;
    for j in k..=(2 * k - 2) {
        c_norm *= j as f64;
    }
    c_norm /= std::f64::consts::TAU.powi(k as i32 - 1);

    let mut lhs = 0.0f64;
    let mut singular = 0.0f64;
    for t in lambda_set(n1 as u64, n2 as u64) {
        if t.det2t() == 0 {
            singular += a[reduce_singular(&t)? as usize];
            continue;
        }
        let split = disc_split(&t)?;
        let ell = crate::lfunctions::dirichlet_l_exact(-(split.delta_t as i64), k as u32 - 1)?;
        let mut vsum = 0.0f64;
        let theta = theta_coeffs(&t, (split.f_t * split.f_t) as usize * rankin_cutoff + 1)?;
        for v in divisors(split.f_t) {
            let scalar = phi_scalar(&split, v, k)?.to_f64().unwrap();
            let r = rankin_naive(
                &a,
                &theta,
                theta_envelope(&t),
                k as f64 - 1.0,
                v,
                k,
                rankin_cutoff,
            )?;
            vsum += scalar * r.value;
        }
        lhs += sign
            * ExactReal::half_power(split.delta_t, k as u32 - 2).to_f64()
            * ell.to_f64()
            * vsum
            / sym2.value;
    }
    lhs += c_norm * singular;

    let (af, _) = extract_af(&f, n1, n2, y, y, params)?;
    let two_over_zeta =
        (Rational::from(num_bigint::BigInt::from(2)) / zeta_neg_odd(k)?).to_f64().unwrap();
    let degenerate = two_over_zeta
        * (a[n1 as usize] * divisor_sum(k as u32 - 1, n2 as u64).to_f64().unwrap()
            + a[n2 as usize] * divisor_sum(k as u32 - 1, n1 as u64).to_f64().unwrap());
    let rhs = c_norm * (degenerate + af);

    Ok(finish(
        format!("coefficient identity k={k} (n1,n2)=({n1},{n2}) grid {}", params.grid_size),
        Complex64::new(lhs, 0.0),
        Complex64::new(rhs, 0.0),
        tolerance,
        *params,
        base_conventions(),
        started,
    ))
}

/// Classical properties of the paramodular pullback: at `N = 1` bitwise
/// coincidence with the Siegel sum; for `N > 1` weight-(k,k) invariance
/// under generators of `Gamma_0^2(N^2) x Gamma_0^2(N^2)`.
///
/// For `N = 2` the built-in level-2 weight-8 eta-product newform is used
/// unless a coefficient file was ingested by the caller.
pub fn verify_para_properties(
    k: u64,
    n: u32,
    f_ingested: Option<&QSeries>,
    params: &TruncationParams,
    tolerance: f64,
) -> Result<VerificationReport> {
    let started = Instant::now();
    let mut conventions = base_conventions();
    if let Some(fi) = f_ingested {
        conventions.push("deligne-shape coefficient envelope assumed for ingested file".into());
        if fi.level() != n {
            return Err(Error::arg(format!(
                "ingested form has level {}, requested N = {n}",
                fi.level()
            )));
        }
    }

    if n == 1 {
        let f = eigenform(k, params.qexp_order)?;
        let t1 = UpperHalfPoint::new(0.3, 1.1)?;
        let t2 = UpperHalfPoint::new(-0.2, 1.4)?;
        let (siegel, es) = eval_pullback_rhs(&f, 1, t1, t2, params)?;
        let (para, ep) = eval_pullback_rhs_para(&f, 1, t1, t2, params)?;
        let bit_identical = siegel.re.to_bits() == para.re.to_bits()
            && siegel.im.to_bits() == para.im.to_bits()
            && es.to_bits() == ep.to_bits();
        conventions.push(format!("N=1 bitwise coincidence: {bit_identical}"));
        let mut report = finish(
            format!("paramodular/Siegel coincidence at N=1, k={k}"),
            siegel,
            para,
            tolerance,
            *params,
            conventions,
            started,
        );
        report.pass = report.pass && bit_identical;
        return Ok(report);
    }

    let built_in;
    let f = match f_ingested {
        Some(fi) => fi,
        None => {
            if n != 2 || k != 8 {
                return Err(Error::arg(format!(
                    "no built-in level-{n} weight-{k} newform; supply a coefficient file"
                )));
            }
            built_in = newform_level2_weight8(params.qexp_order);
            &built_in
        }
    };
    // dyadic test point so the shifted coset windows reproduce summands
    // exactly under tau -> tau + 1
    let t1 = UpperHalfPoint::new(-0.25, 0.5)?;
    let t2 = UpperHalfPoint::new(-0.25, 0.5)?;
    let (base, _) = eval_pullback_rhs_para(f, n, t1, t2, params)?;

    // periodicity in the first variable
    let t1_shift = UpperHalfPoint::new(t1.x + 1.0, t1.y)?;
    let (shifted, _) = eval_pullback_rhs_para(f, n, t1_shift, t2, params)?;
    let periodicity_err = (shifted - base).norm() / base.norm();

    // nontrivial generator of Gamma_0^2(N^2) acting on the second variable:
    // g = [[1, 0], [N^2, 1]]; weight-(k,k) covariance
    let nn = (n * n) as f64;
    let tau2 = t2.complex();
    let j = tau2 * nn + 1.0;
    let g_tau2 = tau2 / j;
    let t2_moved = UpperHalfPoint::new(g_tau2.re, g_tau2.im)?;
    let (moved, _) = eval_pullback_rhs_para(f, n, t1, t2_moved, params)?;
    let covariant = moved * j.powi(-(k as i32));
    let generator_err = (covariant - base).norm() / base.norm();

    let rel = periodicity_err.max(generator_err);
    conventions.push(format!("periodicity rel err {periodicity_err:.3e}"));
    conventions.push(format!("Gamma_0^2({}) generator rel err {generator_err:.3e}", n * n));
    let mut report = finish(
        format!("paramodular invariance N={n}, k={k}"),
        base,
        covariant,
        tolerance,
        *params,
        conventions,
        started,
    );
    report.abs_err = rel * base.norm();
    report.rel_err = rel;
    report.pass = rel <= tolerance;
    Ok(report)
}

/// Serialize reports as a stable JSON array.
pub fn reports_to_json(reports: &[VerificationReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}
