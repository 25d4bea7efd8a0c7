//! Critical L-values with explicit tail bounds.
//!
//! Four engines feed the verification identities: exact Dirichlet L-values
//! through the functional equation and generalized Bernoulli numbers,
//! numeric Dirichlet partial sums, naive Rankin convolutions against theta
//! coefficients (optionally `v^2`-twisted), and the symmetric square in the
//! Shimura normalization `zeta(2s-2k+2) sum a(n^2) n^{-s}`.
//!
//! Every partial sum is accumulated with compensated summation in ascending
//! index order; every `tail_bound` covers both the analytic tail (under the
//! documented coefficient envelopes) and the floating-point rounding of the
//! partial sum itself.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::arith::{
    factor_u64, generalized_bernoulli, is_fundamental_discriminant, squarefree_split,
    DirichletKronecker, Rational,
};
use crate::sums::Neumaier;
use crate::{Error, Result};

/// A numeric value with a bound on the distance to the untruncated series.
#[derive(Debug, Clone, Copy)]
pub struct LValue {
    pub value: f64,
    pub tail_bound: f64,
    pub cutoff: usize,
}

const EPS: f64 = f64::EPSILON;

/// Exactly `coeff * pi^pi_power * sqrt(radical)` with `radical` squarefree.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactReal {
    pub coeff: Rational,
    pub pi_power: u32,
    pub radical: u64,
}

impl ExactReal {
    pub fn rational(coeff: Rational) -> Self {
        ExactReal { coeff, pi_power: 0, radical: 1 }
    }

    pub fn one() -> Self {
        ExactReal::rational(Rational::one())
    }

    /// `base^{int_pow} * sqrt(base)`, with the square part of the radical
    /// folded into the rational factor. Represents half-integral powers like
    /// `Delta^{k - 3/2}`.
    pub fn half_power(base: u64, int_pow: u32) -> Self {
        let (s, q) = squarefree_split(base);
        ExactReal {
            coeff: Rational::from(BigInt::from(base).pow(int_pow) * BigInt::from(s)),
            pi_power: 0,
            radical: q,
        }
    }

    pub fn mul(&self, other: &ExactReal) -> ExactReal {
        let (s, q) = squarefree_split(self.radical * other.radical);
        ExactReal {
            coeff: &self.coeff * &other.coeff * Rational::from(BigInt::from(s)),
            pi_power: self.pi_power + other.pi_power,
            radical: q,
        }
    }

    pub fn scale(&self, r: &Rational) -> ExactReal {
        ExactReal { coeff: &self.coeff * r, pi_power: self.pi_power, radical: self.radical }
    }

    pub fn to_f64(&self) -> f64 {
        let c = self.coeff.to_f64().unwrap_or_else(|| {
            let bits = 200usize;
            let scaled: BigInt = (self.coeff.numer() << bits) / self.coeff.denom();
            scaled.to_f64().unwrap() * 2f64.powi(-(bits as i32))
        });
        c * std::f64::consts::PI.powi(self.pi_power as i32) * (self.radical as f64).sqrt()
    }
}

/// Exact `L(s, chi_D)` for a negative fundamental discriminant `D` and odd
/// `s >= 1`, via the functional equation:
/// `L(s, chi) = (-1)^{(s+1)/2} 2^{s-1} pi^s B_{s,chi} sqrt(|D|) / (s! |D|^s)`.
pub fn dirichlet_l_exact(d: i64, s: u32) -> Result<ExactReal> {
    if d >= 0 || !is_fundamental_discriminant(d) {
        return Err(Error::arg(format!("{d} is not a negative fundamental discriminant")));
    }
    if s % 2 == 0 || s == 0 {
        return Err(Error::arg(format!(
            "parity mismatch: chi_{d} is odd, so the closed form needs odd s, got {s}"
        )));
    }
    let chi = DirichletKronecker::new(d)?;
    let b = generalized_bernoulli(&chi, s as u64);
    let da = d.unsigned_abs();
    let mut fact = BigInt::one();
    for j in 2..=s {
        fact *= BigInt::from(j);
    }
    let sign = if (s + 1) / 2 % 2 == 0 { 1 } else { -1 };
    let coeff = Rational::from(BigInt::from(sign) * BigInt::from(2u64).pow(s - 1))
        / Rational::from(fact * BigInt::from(da).pow(s))
        * b;
    Ok(ExactReal { coeff, pi_power: s, radical: 1 }.mul(&ExactReal::half_power(da, 0)))
}

/// Partial sum `sum_{n <= cutoff} chi_D(n) n^{-s}` for `s > 1`.
///
/// The tail bound `|D| cutoff^{-s}` comes from Abel summation against the
/// period-`|D|` cancellation of the character, plus a rounding term.
pub fn dirichlet_l_numeric(d: i64, s: f64, cutoff: usize) -> LValue {
    assert!(s > 1.0, "absolute convergence needs s > 1");
    let chi = DirichletKronecker::new(d).expect("valid discriminant");
    let period = chi.period() as usize;
    let mut table = vec![0i32; period];
    for (r, slot) in table.iter_mut().enumerate() {
        *slot = chi.eval(r as i64);
    }
    let mut sum = Neumaier::new();
    let mut abs_sum = Neumaier::new();
    for n in 1..=cutoff {
        let c = table[n % period];
        if c == 0 {
            continue;
        }
        let term = c as f64 * (n as f64).powf(-s);
        sum.add(term);
        abs_sum.add(term.abs());
    }
    let tail = d.unsigned_abs() as f64 * (cutoff as f64).powf(-s);
    LValue { value: sum.total(), tail_bound: tail + 8.0 * EPS * abs_sum.total(), cutoff }
}

/// Tail `sum_{n > x} n^{-alpha} <= x^{1-alpha} / (alpha - 1)`, infinite when
/// the comparison integral diverges.
fn power_tail(x: f64, alpha: f64) -> f64 {
    if alpha <= 1.0 {
        f64::INFINITY
    } else {
        x.powf(1.0 - alpha) / (alpha - 1.0)
    }
}

/// Naive (`v^2`-twisted) Rankin convolution
/// `sum_{n <= cutoff} a(n) b(v^2 n) n^{-s}`.
///
/// `b_env` is the theta envelope constant: `|b(m)| <= b_env sqrt(m) + 4`
/// (see [`crate::quadforms::theta_envelope`]). The tail bound additionally
/// assumes the Deligne-shape envelope `|a(n)| <= sigma_0(n) n^{(k-1)/2}`.
pub fn rankin_naive(
    a: &[f64],
    b: &[i64],
    b_env: f64,
    s: f64,
    v: u64,
    k: u64,
    cutoff: usize,
) -> Result<LValue> {
    if s <= (k - 1) as f64 / 2.0 + 1.5 {
        return Err(Error::arg(format!(
            "rankin series needs s > (k-1)/2 + 3/2 for absolute convergence, got s={s}, k={k}"
        )));
    }
    let vv = (v * v) as usize;
    if a.len() <= cutoff || b.len() <= vv * cutoff {
        return Err(Error::arg(format!(
            "insufficient coefficient data: need a up to {cutoff} (have {}) and b up to {} (have {})",
            a.len().saturating_sub(1),
            vv * cutoff,
            b.len().saturating_sub(1)
        )));
    }
    let mut sum = Neumaier::new();
    let mut abs_sum = Neumaier::new();
    for n in 1..=cutoff {
        let term = a[n] * b[vv * n] as f64 * (n as f64).powf(-s);
        sum.add(term);
        abs_sum.add(term.abs());
    }
    // sigma_0(n) <= 2 sqrt(n); |b(v^2 n)| <= b_env v sqrt(n) + 4
    let x = cutoff as f64;
    let half = (k - 1) as f64 / 2.0;
    let tail = 2.0 * b_env * v as f64 * power_tail(x, s - half - 1.0)
        + 8.0 * power_tail(x, s - half - 0.5);
    Ok(LValue { value: sum.total(), tail_bound: tail + 8.0 * EPS * abs_sum.total(), cutoff })
}

fn zeta_partial(s: f64, cutoff: usize) -> LValue {
    let mut sum = Neumaier::new();
    for n in 1..=cutoff {
        sum.add((n as f64).powf(-s));
    }
    let v = sum.total();
    LValue { value: v, tail_bound: power_tail(cutoff as f64, s) + 8.0 * EPS * v, cutoff }
}

/// Symmetric square L-value in the Shimura normalization
/// `zeta(2s - 2k + 2) sum_{n <= cutoff} a(n^2) n^{-s}`.
///
/// `a` must hold eigenform coefficients up to at least `cutoff`. Stored
/// values `a(n^2)` are read directly; past the end of the slice they are
/// filled in by Hecke multiplicativity from prime data, so only linear
/// (not quadratic) coefficient ranges are required.
pub fn sym2_l(a: &[f64], k: u64, s: f64, cutoff: usize) -> Result<LValue> {
    if s <= k as f64 + 1.0 {
        return Err(Error::arg(format!(
            "sym2 series needs s > k + 1 for absolute convergence, got s={s}, k={k}"
        )));
    }
    if a.len() <= cutoff {
        return Err(Error::arg(format!(
            "insufficient coefficient data: need a up to {cutoff}, have {}",
            a.len().saturating_sub(1)
        )));
    }
    let a_sq = |n: usize| -> f64 {
        if n * n < a.len() {
            return a[n * n];
        }
        // a(n^2) multiplicatively from a(p^{2e})
        let mut acc = 1.0f64;
        for (p, e) in factor_u64(n as u64) {
            let pk1 = (p as f64).powi(k as i32 - 1);
            let (mut prev, mut cur) = (1.0f64, a[p as usize]);
            for _ in 1..2 * e {
                let next = a[p as usize] * cur - pk1 * prev;
                prev = cur;
                cur = next;
            }
            acc *= cur;
        }
        acc
    };
    let mut sum = Neumaier::new();
    let mut abs_sum = Neumaier::new();
    for n in 1..=cutoff {
        let term = a_sq(n) * (n as f64).powf(-s);
        sum.add(term);
        abs_sum.add(term.abs());
    }
    let dirichlet_part = sum.total();
    // |a(n^2)| <= sigma_0(n^2) n^{k-1} <= 4 n^k
    let series_tail =
        power_tail(cutoff as f64, s - k as f64) * 4.0 + 8.0 * EPS * abs_sum.total();
    let zeta = zeta_partial(2.0 * s - 2.0 * k as f64 + 2.0, cutoff);
    let value = zeta.value * dirichlet_part;
    let tail_bound = zeta.value.abs() * series_tail
        + dirichlet_part.abs() * zeta.tail_bound
        + series_tail * zeta.tail_bound
        + 4.0 * EPS * value.abs();
    Ok(LValue { value, tail_bound, cutoff })
}

/// Exact scalar of the twisted theta `phi_{T,v}`:
/// `(f_T / v)^{2k-3} prod_{p | f_T/v} (1 - p^{1-k} chi_{-Delta(T)}(p))`.
pub fn phi_scalar(split: &crate::quadforms::DiscriminantSplit, v: u64, k: u64) -> Result<Rational> {
    if v == 0 || split.f_t % v != 0 {
        return Err(Error::arg(format!("v = {v} does not divide f_T = {}", split.f_t)));
    }
    let m = split.f_t / v;
    let chi = DirichletKronecker::new(-(split.delta_t as i64))?;
    let mut acc = Rational::from(BigInt::from(m).pow(2 * k as u32 - 3));
    for (p, _) in factor_u64(m) {
        let c = chi.eval(p as i64);
        if c == 0 {
            continue;
        }
        let pk = Rational::from(BigInt::from(p).pow(k as u32 - 1));
        let factor = Rational::one() - Rational::from(BigInt::from(c)) / pk;
        acc *= factor;
    }
    Ok(acc)
}

/// All positive divisors of `n`, ascending.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}
