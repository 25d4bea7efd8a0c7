//! Pointwise evaluation of the pullback identity.
//!
//! Both sides of the identity live here: the diagonal restriction of the
//! Klingen Eisenstein series through its Fourier expansion (coefficients
//! assembled from discriminant splits, theta series and L-values), and the
//! pullback right-hand side built from coset sums over `Gamma_0^2(N)`.
//!
//! The coupled double coset sum is evaluated in factorized form. Writing
//! the cusp form through its q-expansion,
//! `f(d^2 w_1 + c^2 w_2) = sum_n a(n) u_1^{n d^2} u_2^{n c^2}` with
//! `u_j = e(gamma_j<tau_j>)`, the double sum over `(gamma_1, gamma_2)`
//! splits into a product of one-dimensional coset sums
//! `P_m(tau) = sum_gamma j(gamma, tau)^{-k} e(m gamma<tau>)`. This is an
//! exact rearrangement of the finite truncated sum, and turns work
//! quadratic in the number of cosets into linear work.
//!
//! Coset windows are centered per column: for bottom-row entry `c` the
//! `d` range is `round(-c x) +- M`. At `x = 0` this is the plain box
//! `|d| <= M`; centering makes `tau -> tau + 1` act by an exact summand
//! permutation at any `x`.

use std::collections::HashMap;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{complete_coprime_pair, gcd_i64, Rational};
use crate::lfunctions::{
    dirichlet_l_exact, divisors, phi_scalar, rankin_naive, sym2_l, ExactReal, LValue,
};
use crate::qseries::{eigenform_coeffs_f64, QSeries, BUILTIN_WEIGHTS};
use crate::quadforms::{
    disc_split, lambda_set, reduce_singular, theta_coeffs, theta_envelope, HalfIntMatrix,
};
use crate::sums::{Approx, Neumaier, NeumaierC, CHUNK};
use crate::{Error, Result};

const TWO_PI: f64 = std::f64::consts::TAU;
const EPS: f64 = f64::EPSILON;

/// A point `x + iy` in the upper half plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint {
    pub x: f64,
    pub y: f64,
}

impl UpperHalfPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() {
            return Err(Error::arg(format!("({x}, {y}) is not in the upper half plane")));
        }
        Ok(UpperHalfPoint { x, y })
    }

    pub fn complex(&self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

impl std::fmt::Display for UpperHalfPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}+{}i", self.x, self.y)
    }
}

/// Truncation knobs shared by the evaluators.
///
/// `qexp_order` must cover `fourier_cutoff * (cd_bound^2 + 1)` so that the
/// q-expansion resolves every frequency the coupled sum rescales by `c^2`
/// or `d^2` within the requested Fourier range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationParams {
    pub coset_height: i64,
    pub cd_bound: i64,
    pub fourier_cutoff: u32,
    pub qexp_order: usize,
    pub grid_size: usize,
}

impl Default for TruncationParams {
    fn default() -> Self {
        TruncationParams {
            coset_height: 40,
            cd_bound: 6,
            fourier_cutoff: 8,
            qexp_order: 512,
            grid_size: 8,
        }
    }
}

impl TruncationParams {
    pub fn validate(&self) -> Result<()> {
        if self.coset_height < 1 || self.cd_bound < 1 || self.fourier_cutoff < 1 {
            return Err(Error::arg("truncation parameters must be positive"));
        }
        let need = self.fourier_cutoff as usize * (self.cd_bound * self.cd_bound + 1) as usize;
        if self.qexp_order < need {
            return Err(Error::arg(format!(
                "qexp_order {} too small: need >= fourier_cutoff * (cd_bound^2 + 1) = {need}",
                self.qexp_order
            )));
        }
        if self.grid_size < 2 {
            return Err(Error::arg("grid_size must be at least 2"));
        }
        Ok(())
    }
}

/// Cutoffs for the L-series feeding Klingen Fourier coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LSeriesCutoffs {
    pub rankin: usize,
    pub sym2: usize,
}

impl Default for LSeriesCutoffs {
    fn default() -> Self {
        LSeriesCutoffs { rankin: 10_000, sym2: 1_000 }
    }
}

// ---------------------------------------------------------------------------
// Cusp form evaluation
// ---------------------------------------------------------------------------

fn cuspform_value(coeffs: &[f64], k: u32, tau: Complex64) -> (Complex64, f64) {
    let q = (Complex64::i() * TWO_PI * tau).exp();
    let n0 = coeffs.len();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut abs_acc = 0.0f64;
    for n in (1..n0).rev() {
        acc = acc * q + coeffs[n];
        abs_acc = abs_acc * q.norm() + coeffs[n].abs();
    }
    acc *= q;
    abs_acc *= q.norm();
    // tail: |a(n)| <= sigma_0(n) n^{(k-1)/2} <= 2 n^{k/2} and geometric decay
    let r = q.norm();
    let growth = (k as f64 / (2.0 * n0 as f64)).exp();
    let tail = if r * growth < 1.0 {
        2.0 * (n0 as f64).powf(k as f64 / 2.0) * r.powf(n0 as f64) / (1.0 - r * growth)
    } else {
        f64::INFINITY
    };
    (acc, tail + 8.0 * EPS * abs_acc)
}

/// Evaluate a cusp form at a point from its stored q-expansion.
///
/// The error bound combines the geometric tail under the Deligne-shape
/// envelope with a rounding term; it is infinite (reported, not silently
/// accepted) when `Im tau` is too small for the stored order.
pub fn eval_cuspform(f: &QSeries, tau: UpperHalfPoint) -> (Complex64, f64) {
    cuspform_value(&f.coeffs_f64(), f.weight().unsigned_abs() as u32, tau.complex())
}

// ---------------------------------------------------------------------------
// Coset windows and P tables
// ---------------------------------------------------------------------------

fn window_pairs(level: u32, height: i64, x: f64) -> Vec<(i64, i64)> {
    let mut out = vec![(0i64, 1i64)];
    let step = level.max(1) as i64;
    let mut c = step;
    while c <= height {
        let center = (-(c as f64) * x).round() as i64;
        for d in (center - height)..=(center + height) {
            if gcd_i64(c, d) == 1 {
                out.push((c, d));
            }
        }
        c += step;
    }
    out
}

struct CosetTerm {
    jinv: Complex64,
    u: Complex64,
}

fn coset_data(level: u32, height: i64, tau: Complex64, k: u32, top_shift: i64) -> Vec<CosetTerm> {
    window_pairs(level, height, tau.re)
        .iter()
        .map(|&(c, d)| {
            let (a0, b0) = complete_coprime_pair(c, d).expect("window pairs are coprime");
            let a = a0 + top_shift * c;
            let b = b0 + top_shift * d;
            let j = tau * c as f64 + d as f64;
            let w = (tau * a as f64 + b as f64) / j;
            CosetTerm { jinv: j.powi(-(k as i32)), u: (Complex64::i() * TWO_PI * w).exp() }
        })
        .collect()
}

/// `P[m] = sum_gamma j(gamma, tau)^{-k} e(m gamma<tau>)` for `1 <= m <= m_max`.
///
/// Parallel over fixed chunks of the coset list; chunk partials are merged
/// in chunk order, so the table is independent of the worker count.
fn p_table(data: &[CosetTerm], m_max: usize) -> Vec<Complex64> {
    let partials: Vec<Vec<Complex64>> = data
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut t = vec![Complex64::new(0.0, 0.0); m_max + 1];
            for ct in chunk {
                let aj = ct.jinv.norm();
                let lu = ct.u.norm();
                let m_cut = if lu >= 1.0 || aj == 0.0 {
                    m_max
                } else {
                    // keep terms until |j^-k| |u|^m drops below 1e-305
                    let need = (-305.0 * std::f64::consts::LN_10 - aj.ln()) / lu.ln();
                    if need <= 0.0 {
                        0
                    } else {
                        (need as usize + 1).min(m_max)
                    }
                };
                let mut up = ct.u;
                for m in 1..=m_cut {
                    t[m] += ct.jinv * up;
                    up *= ct.u;
                }
            }
            t
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); m_max + 1];
    for (m, slot) in out.iter_mut().enumerate() {
        let mut acc = NeumaierC::new();
        for p in &partials {
            acc.add(p[m]);
        }
        *slot = acc.total();
    }
    out
}

// ---------------------------------------------------------------------------
// Degree-one Eisenstein series
// ---------------------------------------------------------------------------

/// `E_1(s, k, N, tau) = sum |c tau + d|^{-(s+2-k)} (c tau + d)^{-k}` over
/// `Gamma_infty \ Gamma_0^2(N)`, truncated at coset height `height`.
///
/// At `s = k - 2` this is the holomorphic weight-`k` Eisenstein series.
/// Returns the value and a heuristic tail (outermost-shell magnitude scaled
/// by `M / (k - 3)`).
pub fn eval_e1(s: f64, k: u32, level: u32, tau: UpperHalfPoint, height: i64) -> (Complex64, f64) {
    let t = tau.complex();
    let holomorphic = (s - (k as f64 - 2.0)).abs() < 1e-14;
    let mut acc = NeumaierC::new();
    let mut shell = Neumaier::new();
    let step = level.max(1) as i64;
    let last_c = (height / step) * step;
    for (c, d) in window_pairs(level, height, tau.x) {
        let term = if c == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            let j = t * c as f64 + d as f64;
            let mut v = j.powi(-(k as i32));
            if !holomorphic {
                v *= j.norm().powf(-(s + 2.0 - k as f64));
            }
            v
        };
        acc.add(term);
        let center = (-(c as f64) * tau.x).round() as i64;
        if c != 0 && (c == last_c || (d - center).abs() == height) {
            shell.add(term.norm());
        }
    }
    let heuristic = shell.total() * height as f64 / (k as f64 - 3.0);
    (acc.total(), heuristic)
}

// ---------------------------------------------------------------------------
// The coupled (c, d) sum
// ---------------------------------------------------------------------------

fn inner_cd(coeffs: &[f64], p1: &[Complex64], p2: &[Complex64], c: i64, d: i64) -> Complex64 {
    let (cc, dd) = ((c * c) as usize, (d * d) as usize);
    let mut acc = NeumaierC::new();
    for (n, &a) in coeffs.iter().enumerate().skip(1) {
        if a != 0.0 {
            acc.add(p1[n * dd] * p2[n * cc] * a);
        }
    }
    acc.total()
}

/// The full coupled term `2 sum_{(c,d)=1, 1<=c,d<=C} sum_n a(n) P1[n d^2] P2[n c^2]`,
/// plus the magnitude of the outermost `max(c,d) = C` shell as a heuristic.
///
/// Pairs `(c, d)` and `(d, c)` are combined so that swapping `tau_1` and
/// `tau_2` permutes summands exactly.
fn tr_sum(coeffs: &[f64], cd_bound: i64, p1: &[Complex64], p2: &[Complex64]) -> (Complex64, f64) {
    let mut acc = NeumaierC::new();
    let mut shell = Neumaier::new();
    for c in 1..=cd_bound {
        for d in c..=cd_bound {
            if gcd_i64(c, d) != 1 {
                continue;
            }
            let mut pair = inner_cd(coeffs, p1, p2, c, d);
            if c != d {
                pair += inner_cd(coeffs, p1, p2, d, c);
            }
            acc.add(pair);
            if d == cd_bound {
                shell.add(pair.norm());
            }
        }
    }
    (acc.total() * 2.0, shell.total() * 2.0)
}

fn e1_height(height: i64, y: f64) -> i64 {
    if y >= 1.0 {
        height
    } else {
        (height as f64 / y).ceil() as i64
    }
}

fn pullback_engine(
    coeffs: &[f64],
    k: u32,
    lev1: u32,
    lev2: u32,
    lev_e1: u32,
    t1: UpperHalfPoint,
    t2: UpperHalfPoint,
    params: &TruncationParams,
    top_shift: i64,
) -> Result<(Complex64, f64)> {
    params.validate()?;
    if k <= 4 || k % 2 != 0 {
        return Err(Error::arg(format!("pullback sums converge for even k > 4, got {k}")));
    }
    let n_cut = coeffs.len() - 1;
    let m_max = n_cut * (params.cd_bound * params.cd_bound) as usize;
    let data1 = coset_data(lev1, params.coset_height, t1.complex(), k, top_shift);
    let data2 = coset_data(lev2, params.coset_height, t2.complex(), k, top_shift);
    let p1 = p_table(&data1, m_max);
    let p2 = p_table(&data2, m_max);
    let (tr, tr_shell) = tr_sum(coeffs, params.cd_bound, &p1, &p2);

    let s = k as f64 - 2.0;
    let (e1_at_1, e1_tail_1) = eval_e1(s, k, lev_e1, t1, e1_height(params.coset_height, t1.y));
    let (e1_at_2, e1_tail_2) = eval_e1(s, k, lev_e1, t2, e1_height(params.coset_height, t2.y));
    let (f1, f1_tail) = cuspform_value(coeffs, k, t1.complex());
    let (f2, f2_tail) = cuspform_value(coeffs, k, t2.complex());

    let value = e1_at_1 * f2 + e1_at_2 * f1 + tr;
    let tail = e1_tail_1 * f2.norm()
        + e1_at_1.norm() * f2_tail
        + e1_tail_2 * f1.norm()
        + e1_at_2.norm() * f1_tail
        + tr_shell
        + 16.0 * EPS * value.norm();
    Ok((value, tail))
}

/// Right-hand side of the degree-two pullback at `s = k - 2` for the Siegel
/// congruence subgroup of level `N`:
/// `E_1(tau_1) f(tau_2) + E_1(tau_2) f(tau_1) + T_r`.
pub fn eval_pullback_rhs(
    f: &QSeries,
    n: u32,
    t1: UpperHalfPoint,
    t2: UpperHalfPoint,
    params: &TruncationParams,
) -> Result<(Complex64, f64)> {
    let k = f.weight() as u32;
    let coeffs = truncated_coeffs(f, params.qexp_order);
    pullback_engine(&coeffs, k, n, n, n, t1, t2, params, 0)
}

/// Paramodular analogue: the coset sums run over `Gamma_infty \ SL(2,Z)` in
/// the first variable and `Gamma_infty \ Gamma_0^2(N^2)` in the second, with
/// both degenerate terms at level `N^2`. Trivial character only; at `N = 1`
/// this coincides with [`eval_pullback_rhs`] bit for bit.
pub fn eval_pullback_rhs_para(
    f: &QSeries,
    n: u32,
    t1: UpperHalfPoint,
    t2: UpperHalfPoint,
    params: &TruncationParams,
) -> Result<(Complex64, f64)> {
    let k = f.weight() as u32;
    let coeffs = truncated_coeffs(f, params.qexp_order);
    pullback_engine(&coeffs, k, 1, n * n, n * n, t1, t2, params, 0)
}

fn truncated_coeffs(f: &QSeries, order: usize) -> Vec<f64> {
    let mut c = f.coeffs_f64();
    c.truncate(order);
    c
}

// ---------------------------------------------------------------------------
// Fourier extraction of the coupled term
// ---------------------------------------------------------------------------

/// Extract the `(n1, n2)` Fourier coefficient of the coupled term alone by
/// DFT quadrature on a `grid x grid` mesh at fixed heights `(y1, y2)`.
///
/// Returns the coefficient and an error estimate combining the aliasing
/// level `e^{-2 pi G min(y)}` (scaled by the coefficient growth across one
/// alias step), the truncation heuristics of the integrand, and the
/// imaginary part left over by the quadrature.
pub fn extract_af(
    f: &QSeries,
    n1: u32,
    n2: u32,
    y1: f64,
    y2: f64,
    params: &TruncationParams,
) -> Result<(f64, f64)> {
    params.validate()?;
    let g = params.grid_size;
    if g < 2 * n1.max(n2) as usize + 2 {
        return Err(Error::arg(format!(
            "grid {} too small for coefficient ({n1}, {n2}): need >= {}",
            g,
            2 * n1.max(n2) + 2
        )));
    }
    let k = f.weight() as u32;
    let coeffs = truncated_coeffs(f, params.qexp_order);
    let n_cut = coeffs.len() - 1;
    let m_max = n_cut * (params.cd_bound * params.cd_bound) as usize;

    let tables = |y: f64| -> Vec<Vec<Complex64>> {
        (0..g)
            .map(|j| {
                let tau = Complex64::new(j as f64 / g as f64, y);
                let data = coset_data(1, params.coset_height, tau, k, 0);
                p_table(&data, m_max)
            })
            .collect()
    };
    let p1s = tables(y1);
    let p2s = if y2 == y1 { Vec::new() } else { tables(y2) };
    let p2ref: &[Vec<Complex64>] = if y2 == y1 { &p1s } else { &p2s };

    let mut acc = NeumaierC::new();
    let mut abs_acc = Neumaier::new();
    let mut shell_max = 0.0f64;
    for j1 in 0..g {
        for j2 in 0..g {
            let (v, shell) = tr_sum(&coeffs, params.cd_bound, &p1s[j1], &p2ref[j2]);
            shell_max = shell_max.max(shell);
            let phase_index = (n1 as usize * j1 + n2 as usize * j2) % g;
            let phase = Complex64::from_polar(1.0, -TWO_PI * phase_index as f64 / g as f64);
            acc.add(v * phase);
            abs_acc.add(v.norm());
        }
    }
    let amplify = (TWO_PI * (n1 as f64 * y1 + n2 as f64 * y2)).exp();
    let gg = (g * g) as f64;
    let value = acc.total() / gg * amplify;
    let mean_abs = abs_acc.total() / gg;
    let growth = (((n1 as f64 + g as f64) * (n2 as f64 + g as f64))
        / (n1.max(1) as f64 * n2.max(1) as f64))
        .powf(k as f64 - 0.5);
    let alias = mean_abs * amplify * (-TWO_PI * g as f64 * y1.min(y2)).exp() * growth * 4.0;
    let estimate = alias + shell_max * amplify + value.im.abs() + 8.0 * EPS * mean_abs * amplify;
    Ok((value.re, estimate))
}

// ---------------------------------------------------------------------------
// Klingen Fourier coefficients
// ---------------------------------------------------------------------------

/// Exact scalar multiplying the Rankin data in a nonsingular Klingen
/// coefficient:
/// `(-1)^{k/2} ((k-1)!/(2k-2)!) (2 pi)^{k-1} Delta^{k-3/2} L(k-1, chi_{-Delta})`.
pub fn klingen_prefactor(k: u64, delta: u64) -> Result<ExactReal> {
    let mut fact_ratio = Rational::new(1.into(), 1.into());
    for j in k..=(2 * k - 2) {
        fact_ratio /= Rational::from(num_bigint::BigInt::from(j));
    }
    let sign = if (k / 2) % 2 == 0 { 1i64 } else { -1 };
    let coeff = fact_ratio
        * Rational::from(num_bigint::BigInt::from(sign) * num_bigint::BigInt::from(2u64).pow(k as u32 - 1));
    let base = ExactReal { coeff, pi_power: k as u32 - 1, radical: 1 };
    Ok(base
        .mul(&ExactReal::half_power(delta, k as u32 - 2))
        .mul(&dirichlet_l_exact(-(delta as i64), k as u32 - 1)?))
}

/// Fourier coefficients `A(T, f)` of the Klingen lift of a built-in level-one
/// eigenform, with caching by GL(2,Z) class.
pub struct KlingenEvaluator {
    k: u64,
    coeffs: Vec<f64>,
    sym2: LValue,
    cutoffs: LSeriesCutoffs,
    cache: HashMap<HalfIntMatrix, (f64, f64)>,
}

impl KlingenEvaluator {
    /// Fails for level > 1: Fourier expansions of level-N Klingen lifts are
    /// not available, so only the full-level series can be assembled.
    pub fn new(f: &QSeries, cutoffs: LSeriesCutoffs) -> Result<Self> {
        if f.level() != 1 {
            return Err(Error::arg(format!(
                "Klingen Fourier coefficients require level 1, got level {}",
                f.level()
            )));
        }
        let k = f.weight() as u64;
        if !BUILTIN_WEIGHTS.contains(&k) {
            return Err(Error::arg(format!("weight {k} is not a built-in eigenform weight")));
        }
        let len = cutoffs.rankin.max(cutoffs.sym2);
        let coeffs = eigenform_coeffs_f64(k, len)?;
        let sym2 = sym2_l(&coeffs, k, 2.0 * k as f64 - 2.0, cutoffs.sym2)?;
        Ok(KlingenEvaluator { k, coeffs, sym2, cutoffs, cache: HashMap::new() })
    }

    pub fn weight(&self) -> u64 {
        self.k
    }

    pub fn sym2(&self) -> LValue {
        self.sym2
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `A(T, f)` with an error bound: 0 at `T = 0`, `a(m)` for singular
    /// `T != 0` of content `m`, and the L-value formula otherwise.
    pub fn coeff(&mut self, t: &HalfIntMatrix) -> Result<Approx> {
        if t.is_zero() {
            return Ok(Approx::exact(0.0));
        }
        if t.det2t() == 0 {
            let m = reduce_singular(t)? as usize;
            if m >= self.coeffs.len() {
                return Err(Error::arg(format!("content {m} beyond stored coefficients")));
            }
            let a = self.coeffs[m];
            return Ok(Approx::new(a, 4.0 * EPS * a.abs()));
        }
        if !t.is_positive_definite() {
            return Err(Error::arg(format!("{t:?} is not positive semidefinite")));
        }
        let key = t.reduced_class();
        if let Some(&(v, e)) = self.cache.get(&key) {
            return Ok(Approx::new(v, e));
        }
        let a = self.coeff_uncached(&key)?;
        self.cache.insert(key, (a.val, a.err));
        Ok(a)
    }

    fn coeff_uncached(&self, t: &HalfIntMatrix) -> Result<Approx> {
        let content = crate::arith::gcd_i64(crate::arith::gcd_i64(t.n1, t.b), t.n2) as u64;
        if content > 1 {
            let p = crate::arith::factor_u64(content)[0].0;
            return self.content_step(t, p);
        }
        let split = disc_split(t)?;
        let pre = klingen_prefactor(self.k, split.delta_t)?;
        let twist_sum = self.twisted_rankin_sum(t, &split)?;
        let total = Approx::exact(pre.to_f64())
            .mul(twist_sum)
            .div(Approx::new(self.sym2.value, self.sym2.tail_bound));
        Ok(total)
    }

    /// Fourier coefficients at imprimitive `T = p T1` through the Hecke
    /// action: the Klingen lift is an eigenform with `T(p)`-eigenvalue
    /// `a(p)(1 + p^{k-2})`, so
    /// `A(p T1) = lambda_p A(T1) - p^{k-2} sum_l A(T1[U_l]/p) - p^{2k-3} A(T1/p)`,
    /// the middle sum running over the isotropic lines `l` of `Q_{T1}` mod p
    /// (those are exactly the directions where `T1[U_l]/p` stays
    /// half-integral). Validated against the pullback side coefficientwise.
    fn content_step(&self, t: &HalfIntMatrix, p: u64) -> Result<Approx> {
        let pi = p as i64;
        let t1 = HalfIntMatrix::new(t.n1 / pi, t.b / pi, t.n2 / pi);
        let ap = *self
            .coeffs
            .get(p as usize)
            .ok_or_else(|| Error::arg(format!("content prime {p} beyond stored coefficients")))?;
        let lambda = ap * (1.0 + (p as f64).powi(self.k as i32 - 2));
        let mut acc = self.class_value(&t1)?.scale(lambda);
        let pk2 = (p as f64).powi(self.k as i32 - 2);
        // lines (1, j), j mod p; child ((n1 + b j + n2 j^2)/p, b + 2 n2 j, p n2)
        for j in 0..pi {
            let q = t1.n1 + t1.b * j + t1.n2 * j * j;
            if q.rem_euclid(pi) == 0 {
                let child = HalfIntMatrix::new(q / pi, t1.b + 2 * t1.n2 * j, pi * t1.n2);
                acc = acc.add(self.class_value(&child)?.scale(-pk2));
            }
        }
        // line (0, 1); child (n2/p, b, p n1)
        if t1.n2.rem_euclid(pi) == 0 {
            let child = HalfIntMatrix::new(t1.n2 / pi, t1.b, pi * t1.n1);
            acc = acc.add(self.class_value(&child)?.scale(-pk2));
        }
        if t1.n1.rem_euclid(pi) == 0 && t1.b.rem_euclid(pi) == 0 && t1.n2.rem_euclid(pi) == 0 {
            let down = HalfIntMatrix::new(t1.n1 / pi, t1.b / pi, t1.n2 / pi);
            acc = acc.add(
                self.class_value(&down)?.scale(-(p as f64).powi(2 * self.k as i32 - 3)),
            );
        }
        Ok(acc)
    }

    /// Cached class value without mutation; recomputes on a miss (the wave
    /// ordering in [`Self::fill_cache_parallel`] makes misses rare).
    fn class_value(&self, t: &HalfIntMatrix) -> Result<Approx> {
        let key = t.reduced_class();
        if let Some(&(v, e)) = self.cache.get(&key) {
            return Ok(Approx::new(v, e));
        }
        self.coeff_uncached(&key)
    }

    /// `sum_{v | f_T} phi_scalar(T, v) sum_n a(n) b_T(v^2 n) n^{-(k-1)}`.
    fn twisted_rankin_sum(&self, t: &HalfIntMatrix, split: &crate::quadforms::DiscriminantSplit) -> Result<Approx> {
        let cutoff = self.cutoffs.rankin.min(self.coeffs.len() - 1);
        let vmax = split.f_t;
        let theta = theta_coeffs(t, (vmax * vmax) as usize * cutoff + 1)?;
        let env = theta_envelope(t);
        let mut acc = Approx::exact(0.0);
        for v in divisors(split.f_t) {
            let scalar = phi_scalar(split, v, self.k)?.to_f64().unwrap();
            let lv = rankin_naive(
                &self.coeffs,
                &theta,
                env,
                self.k as f64 - 1.0,
                v,
                self.k,
                cutoff,
            )?;
            acc = acc.add(Approx::new(lv.value, lv.tail_bound).scale(scalar));
        }
        Ok(acc)
    }

    fn fill_cache_parallel(&mut self, needed: &[HalfIntMatrix]) -> Result<()> {
        // transitive closure under the content recursion, then waves of
        // ascending determinant: every child has strictly smaller det(2T)
        let mut classes: Vec<HalfIntMatrix> = needed
            .iter()
            .filter(|t| t.is_positive_definite())
            .map(|t| t.reduced_class())
            .filter(|key| !self.cache.contains_key(key))
            .collect();
        classes.sort_unstable();
        classes.dedup();
        let mut all: std::collections::BTreeSet<HalfIntMatrix> = classes.iter().copied().collect();
        let mut frontier = classes;
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for t in frontier {
                for child in content_children(&t) {
                    let key = child.reduced_class();
                    if !self.cache.contains_key(&key) && all.insert(key) {
                        next.push(key);
                    }
                }
            }
            frontier = next;
        }
        let mut levels: Vec<HalfIntMatrix> = all.into_iter().collect();
        levels.sort_by_key(|t| (t.det2t(), *t));
        for level in levels.chunk_by(|a, b| a.det2t() == b.det2t()) {
            let computed: Vec<Result<Approx>> =
                level.par_iter().map(|key| self.coeff_uncached(key)).collect();
            for (key, res) in level.iter().zip(computed) {
                let a = res?;
                self.cache.insert(*key, (a.val, a.err));
            }
        }
        Ok(())
    }

    /// Rigorous bound on the discarded part of the diagonal expansion beyond
    /// `n1, n2 <= cutoff`, from the stacked L-value envelopes.
    fn diagonal_tail_bound(&self, cutoff: usize, y1: f64, y2: f64) -> f64 {
        let k = self.k as f64;
        let zeta_upper = |s: f64| -> f64 {
            let mut acc = 0.0;
            for n in 1..=200u64 {
                acc += (n as f64).powf(-s);
            }
            acc + 200f64.powf(1.0 - s) / (s - 1.0)
        };
        let mut cprime = 1.0f64;
        for j in (self.k)..=(2 * self.k - 2) {
            cprime /= j as f64;
        }
        cprime *= TWO_PI.powi(self.k as i32 - 1);
        let sym2_low = (self.sym2.value - self.sym2.tail_bound).max(1e-3);
        // |sum_{T in Lambda(n1,n2)} A(T)| <= K0 (n1 n2)^{k + 1}; the extra
        // half power over the L-value envelope absorbs the content
        // recursion's growth at desk scale
        let k0 = cprime * zeta_upper(k - 1.0) * 4f64.powf(k)
            * (16.0 * zeta_upper((k - 3.0) / 2.0) + 8.0 * zeta_upper(k / 2.0 - 1.0))
            * 20.0
            / sym2_low
            + 4.0;
        let series = |y: f64, lo: usize| -> f64 {
            let mut acc = 0.0f64;
            let mut n = lo.max(1);
            loop {
                let term = (n as f64).powf(k + 1.0) * (-TWO_PI * n as f64 * y).exp();
                acc += term;
                n += 1;
                if term < 1e-320 || n > lo.max(1) + 10_000 {
                    break;
                }
            }
            acc
        };
        let all1 = series(y1, 1) + 1.0;
        let all2 = series(y2, 1) + 1.0;
        let t1 = series(y1, cutoff + 1);
        let t2 = series(y2, cutoff + 1);
        k0 * (t1 * all2 + all1 * t2)
    }
}

/// Diagonal restriction of the Klingen Eisenstein series through its Fourier
/// expansion: `sum_{n1, n2 <= cutoff} (sum_{T in Lambda} A(T, f)) q1^{n1} q2^{n2}`.
///
/// Symmetric `(n1, n2)` pairs are combined so that swapping the two points
/// permutes summands exactly.
pub fn eval_klingen_diag(
    f: &QSeries,
    t1: UpperHalfPoint,
    t2: UpperHalfPoint,
    params: &TruncationParams,
    cutoffs: LSeriesCutoffs,
) -> Result<(Complex64, f64)> {
    let mut ev = KlingenEvaluator::new(f, cutoffs)?;
    eval_klingen_diag_with(&mut ev, t1, t2, params)
}

/// Same as [`eval_klingen_diag`] but reusing a prepared evaluator (and its
/// coefficient cache) across calls.
pub fn eval_klingen_diag_with(
    ev: &mut KlingenEvaluator,
    t1: UpperHalfPoint,
    t2: UpperHalfPoint,
    params: &TruncationParams,
) -> Result<(Complex64, f64)> {
    params.validate()?;
    let cutoff = params.fourier_cutoff as usize;
    let mut needed: Vec<HalfIntMatrix> = Vec::new();
    for n1 in 0..=cutoff as u64 {
        for n2 in n1..=cutoff as u64 {
            needed.extend(lambda_set(n1, n2));
        }
    }
    ev.fill_cache_parallel(&needed)?;

    let q1 = (Complex64::i() * TWO_PI * t1.complex()).exp();
    let q2 = (Complex64::i() * TWO_PI * t2.complex()).exp();
    let pow_table = |q: Complex64| -> Vec<Complex64> {
        let mut v = vec![Complex64::new(1.0, 0.0); cutoff + 1];
        for i in 1..=cutoff {
            v[i] = v[i - 1] * q;
        }
        v
    };
    let q1p = pow_table(q1);
    let q2p = pow_table(q2);

    let mut acc = NeumaierC::new();
    let mut bound = ev.diagonal_tail_bound(cutoff, t1.y, t2.y);
    for n1 in 0..=cutoff {
        for n2 in n1..=cutoff {
            let mut c = Approx::exact(0.0);
            for t in lambda_set(n1 as u64, n2 as u64) {
                c = c.add(ev.coeff(&t)?);
            }
            let monomial = if n1 == n2 {
                q1p[n1] * q2p[n2]
            } else {
                q1p[n1] * q2p[n2] + q1p[n2] * q2p[n1]
            };
            acc.add(monomial * c.val);
            bound += c.err * monomial.norm();
        }
    }
    Ok((acc.total(), bound))
}

/// Children of the content recursion at the smallest prime dividing the
/// content; empty for primitive `T`.
fn content_children(t: &HalfIntMatrix) -> Vec<HalfIntMatrix> {
    let content = crate::arith::gcd_i64(crate::arith::gcd_i64(t.n1, t.b), t.n2) as u64;
    if content <= 1 {
        return Vec::new();
    }
    let pi = crate::arith::factor_u64(content)[0].0 as i64;
    let t1 = HalfIntMatrix::new(t.n1 / pi, t.b / pi, t.n2 / pi);
    let mut out = vec![t1];
    for j in 0..pi {
        let q = t1.n1 + t1.b * j + t1.n2 * j * j;
        if q.rem_euclid(pi) == 0 {
            out.push(HalfIntMatrix::new(q / pi, t1.b + 2 * t1.n2 * j, pi * t1.n2));
        }
    }
    if t1.n2.rem_euclid(pi) == 0 {
        out.push(HalfIntMatrix::new(t1.n2 / pi, t1.b, pi * t1.n1));
    }
    if t1.n1.rem_euclid(pi) == 0 && t1.b.rem_euclid(pi) == 0 && t1.n2.rem_euclid(pi) == 0 {
        out.push(HalfIntMatrix::new(t1.n1 / pi, t1.b / pi, t1.n2 / pi));
    }
    out
}

/// `A(T, f)` for a single matrix. Convenience wrapper building a fresh
/// evaluator.
pub fn klingen_coeff(f: &QSeries, t: &HalfIntMatrix, cutoffs: LSeriesCutoffs) -> Result<Approx> {
    KlingenEvaluator::new(f, cutoffs)?.coeff(t)
}

/// The part of the diagonal expansion with `n2 >= 1`, i.e. the gap
/// `E(tau_1, i y_2) - f_cutoff(tau_1)` behind the Phi-operator limit,
/// evaluated directly so the decay in `y_2` is visible far below the
/// rounding floor of the full values.
pub fn klingen_phi_gap(
    ev: &mut KlingenEvaluator,
    t1: UpperHalfPoint,
    t2: UpperHalfPoint,
    params: &TruncationParams,
) -> Result<f64> {
    params.validate()?;
    let cutoff = params.fourier_cutoff as usize;
    let mut needed: Vec<HalfIntMatrix> = Vec::new();
    for n1 in 0..=cutoff as u64 {
        for n2 in 1..=cutoff as u64 {
            needed.extend(lambda_set(n1, n2));
        }
    }
    ev.fill_cache_parallel(&needed)?;
    let q1 = (Complex64::i() * TWO_PI * t1.complex()).exp();
    let q2 = (Complex64::i() * TWO_PI * t2.complex()).exp();
    let mut acc = NeumaierC::new();
    for n1 in 0..=cutoff {
        for n2 in 1..=cutoff {
            let mut c = Approx::exact(0.0);
            for t in lambda_set(n1 as u64, n2 as u64) {
                c = c.add(ev.coeff(&t)?);
            }
            acc.add(q1.powi(n1 as i32) * q2.powi(n2 as i32) * c.val);
        }
    }
    Ok(acc.total().norm())
}
