//! Exact truncated q-expansions and the elliptic modular forms the
//! pullback identities consume.
//!
//! A [`QSeries`] stores rational coefficients for `q^0 .. q^{order-1}`
//! together with weight and level metadata. Arithmetic truncates to the
//! shorter operand; it never pads.

use std::path::Path;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{zeta_neg_odd, Rational};
use crate::{Error, Result};

/// Truncated power series in `q` with exact rational coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct QSeries {
    coeffs: Vec<Rational>,
    weight: i64,
    level: u32,
}

impl QSeries {
    pub fn new(coeffs: Vec<Rational>, weight: i64, level: u32) -> Self {
        assert!(!coeffs.is_empty(), "a QSeries stores at least the constant term");
        assert!(level >= 1);
        QSeries { coeffs, weight, level }
    }

    pub fn zero(order: usize, weight: i64, level: u32) -> Self {
        QSeries::new(vec![Rational::zero(); order], weight, level)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Coefficient of `q^n` (zero beyond the stored order).
    pub fn coeff(&self, n: usize) -> Rational {
        self.coeffs.get(n).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational_to_f64).collect()
    }

    pub fn truncated(&self, order: usize) -> QSeries {
        let order = order.min(self.coeffs.len());
        QSeries::new(self.coeffs[..order].to_vec(), self.weight, self.level)
    }

    /// Sum, truncated to the shorter operand. Weights survive only when they
    /// agree; a mixed-weight sum is marked with weight 0.
    pub fn add(&self, other: &QSeries) -> QSeries {
        let order = self.order().min(other.order());
        let coeffs = (0..order).map(|n| &self.coeffs[n] + &other.coeffs[n]).collect();
        let weight = if self.weight == other.weight { self.weight } else { 0 };
        QSeries::new(coeffs, weight, self.level.lcm(&other.level))
    }

    /// Cauchy product, truncated to the shorter operand; weights add and
    /// levels combine by lcm.
    pub fn mul(&self, other: &QSeries) -> QSeries {
        let order = self.order().min(other.order());
        let coeffs = if self.is_integral() && other.is_integral() {
            // integer fast path: skips per-term gcd reduction
            let a: Vec<BigInt> = self.coeffs[..order].iter().map(|c| c.numer().clone()).collect();
            let b: Vec<BigInt> = other.coeffs[..order].iter().map(|c| c.numer().clone()).collect();
            let mut out = vec![BigInt::zero(); order];
            for (i, ai) in a.iter().enumerate() {
                if ai.is_zero() {
                    continue;
                }
                for (j, bj) in b.iter().take(order - i).enumerate() {
                    out[i + j] += ai * bj;
                }
            }
            out.into_iter().map(Rational::from).collect()
        } else {
            let mut out = vec![Rational::zero(); order];
            for i in 0..order {
                if self.coeffs[i].is_zero() {
                    continue;
                }
                for j in 0..order - i {
                    if !other.coeffs[j].is_zero() {
                        out[i + j] += &self.coeffs[i] * &other.coeffs[j];
                    }
                }
            }
            out
        };
        QSeries::new(coeffs, self.weight + other.weight, self.level.lcm(&other.level))
    }

    pub fn pow(&self, e: u32) -> QSeries {
        let mut acc = QSeries::new(
            {
                let mut v = vec![Rational::zero(); self.order()];
                v[0] = Rational::one();
                v
            },
            0,
            self.level,
        );
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn scale(&self, s: &Rational) -> QSeries {
        QSeries::new(self.coeffs.iter().map(|c| c * s).collect(), self.weight, self.level)
    }

    fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.denom().is_one())
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back for magnitudes outside f64 range of numer/denom
        let bits = 200usize;
        let scaled: BigInt = (r.numer() << bits) / r.denom();
        scaled.to_f64().unwrap() * 2f64.powi(-(bits as i32))
    })
}

/// Generalized pentagonal exponents `j(3j-1)/2 <= max_exp` with signs,
/// i.e. the expansion of `prod (1 - q^n)`.
fn pentagonal_terms(max_exp: usize) -> Vec<(usize, i32)> {
    let mut terms = vec![(0usize, 1i32)];
    let mut j = 1i64;
    loop {
        let g1 = j * (3 * j - 1) / 2;
        let g2 = j * (3 * j + 1) / 2;
        let sign = if j % 2 == 0 { 1 } else { -1 };
        let mut pushed = false;
        if g1 as usize <= max_exp {
            terms.push((g1 as usize, sign));
            pushed = true;
        }
        if g2 as usize <= max_exp {
            terms.push((g2 as usize, sign));
            pushed = true;
        }
        if !pushed {
            break;
        }
        j += 1;
    }
    terms.sort_unstable();
    terms
}

/// Normalized Eisenstein series `E_k = 1 + (2/zeta(1-k)) sum sigma_{k-1}(m) q^m`.
pub fn eisenstein_qexp(k: u64, order: usize) -> Result<QSeries> {
    if k < 4 || k % 2 != 0 {
        return Err(Error::arg(format!("Eisenstein weight must be even and >= 4, got {k}")));
    }
    let c = Rational::from(BigInt::from(2)) / zeta_neg_odd(k)?;
    let mut sigma = vec![BigInt::zero(); order];
    for d in 1..order {
        let dp = BigInt::from(d).pow(k as u32 - 1);
        let mut m = d;
        while m < order {
            sigma[m] += &dp;
            m += d;
        }
    }
    let mut coeffs = vec![Rational::one(); 1];
    coeffs.extend((1..order).map(|m| &c * Rational::from(sigma[m].clone())));
    Ok(QSeries::new(coeffs, k as i64, 1))
}

/// `Delta = q prod_{n>=1} (1-q^n)^24`, expanded exactly.
///
/// Orders below 2 cannot hold the leading `q`; callers validate first.
pub fn delta_qexp(order: usize) -> QSeries {
    assert!(order >= 2, "delta_qexp needs order >= 2");
    let inner = order - 1;
    let euler = pentagonal_terms(inner.saturating_sub(1));
    let mut cur = vec![BigInt::zero(); inner];
    cur[0] = BigInt::one();
    for _ in 0..24 {
        let mut next = vec![BigInt::zero(); inner];
        for (g, s) in &euler {
            for i in 0..inner - g {
                if cur[i].is_zero() {
                    continue;
                }
                if *s > 0 {
                    next[i + g] += &cur[i];
                } else {
                    next[i + g] -= &cur[i];
                }
            }
        }
        cur = next;
    }
    let mut coeffs = vec![Rational::zero(); order];
    for (n, c) in cur.into_iter().enumerate() {
        coeffs[n + 1] = Rational::from(c);
    }
    QSeries::new(coeffs, 12, 1)
}

/// Weights with one-dimensional spaces of level-one cusp forms; for these
/// the normalized eigenform is `Delta * E_{k-12}` and stays rational.
pub const BUILTIN_WEIGHTS: [u64; 6] = [12, 16, 18, 20, 22, 26];

/// The normalized cuspidal eigenform of weight `k`, level one.
pub fn eigenform(k: u64, order: usize) -> Result<QSeries> {
    if order < 2 {
        return Err(Error::arg(format!("eigenform order must be at least 2, got {order}")));
    }
    if !BUILTIN_WEIGHTS.contains(&k) {
        return Err(Error::arg(format!(
            "no built-in eigenform of weight {k}; one-dimensional weights are {BUILTIN_WEIGHTS:?}"
        )));
    }
    let delta = delta_qexp(order);
    if k == 12 {
        return Ok(delta);
    }
    let e = eisenstein_qexp(k - 12, order)?;
    Ok(delta.mul(&e))
}

/// The normalized newform of weight 8 and level 2, as the eta product
/// `(eta(z) eta(2z))^8 = q prod (1-q^n)^8 (1-q^{2n})^8`. This is the unique
/// newform in its space and the stock level-2 input for the paramodular
/// checks.
pub fn newform_level2_weight8(order: usize) -> QSeries {
    assert!(order >= 2);
    let inner = order - 1;
    let mut cur = vec![BigInt::zero(); inner];
    cur[0] = BigInt::one();
    for step in [1usize, 2] {
        let euler = pentagonal_terms(inner.saturating_sub(1));
        for _ in 0..8 {
            let mut next = vec![BigInt::zero(); inner];
            for (g, s) in &euler {
                let g = g * step;
                if g >= inner {
                    continue;
                }
                for i in 0..inner - g {
                    if cur[i].is_zero() {
                        continue;
                    }
                    if *s > 0 {
                        next[i + g] += &cur[i];
                    } else {
                        next[i + g] -= &cur[i];
                    }
                }
            }
            cur = next;
        }
    }
    let mut coeffs = vec![Rational::zero(); order];
    for (n, c) in cur.into_iter().enumerate() {
        coeffs[n + 1] = Rational::from(c);
    }
    QSeries::new(coeffs, 8, 2)
}

/// Apply the Hecke operator `T_p`: `(T_p f)(n) = a(pn) + p^{k-1} a(n/p)`.
///
/// The weight is taken from the series metadata. Fails when the stored
/// order cannot support `target_order` output coefficients.
pub fn hecke_apply(f: &QSeries, p: u64, target_order: usize) -> Result<QSeries> {
    if f.order() < (target_order - 1) * p as usize + 1 {
        return Err(Error::arg(format!(
            "need order >= {} to apply T_{p} up to order {target_order}, have {}",
            (target_order - 1) * p as usize + 1,
            f.order()
        )));
    }
    let pk = Rational::from(BigInt::from(p).pow(f.weight() as u32 - 1));
    let coeffs = (0..target_order)
        .map(|n| {
            let mut c = f.coeff(n * p as usize);
            if n as u64 % p == 0 {
                c += &pk * f.coeff(n / p as usize);
            }
            c
        })
        .collect();
    Ok(QSeries::new(coeffs, f.weight(), f.level()))
}

/// Where an eigenform's coefficients came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenformSource {
    BuiltIn,
    IngestedFile,
}

/// Declared weight, level and provenance of a coefficient list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EigenformSpec {
    pub weight: u64,
    pub level: u32,
    pub source: EigenformSource,
}

/// Parse a coefficient file.
///
/// Format (whitespace separated, `#` starts a comment):
///
/// ```text
/// weight 8 level 2 order 64 character trivial
/// 1 1
/// 2 -8
/// ...
/// ```
///
/// with one line `n a(n)` for each `n = 1..order` consecutively;
/// coefficients may be integers or `p/q` rationals.
pub fn parse_coefficients(text: &str) -> Result<(EigenformSpec, QSeries)> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| Error::format("empty coefficient file"))?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 8
        || tok[0] != "weight"
        || tok[2] != "level"
        || tok[4] != "order"
        || tok[6] != "character"
    {
        return Err(Error::format(format!(
            "bad header {header:?}; expected `weight k level N order M character trivial`"
        )));
    }
    if tok[7] != "trivial" {
        return Err(Error::format("only trivial character coefficient files are supported"));
    }
    let weight: u64 = tok[1].parse().map_err(|_| Error::format("bad weight"))?;
    let level: u32 = tok[3].parse().map_err(|_| Error::format("bad level"))?;
    let order: usize = tok[5].parse().map_err(|_| Error::format("bad order"))?;
    if weight % 2 != 0 || level == 0 || order == 0 {
        return Err(Error::format("header values out of range"));
    }

    let mut coeffs = vec![Rational::zero(); order + 1];
    let mut expect = 1usize;
    for line in lines {
        let mut it = line.split_whitespace();
        let n: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(format!("bad index on line {line:?}")))?;
        let val = it
            .next()
            .ok_or_else(|| Error::format(format!("missing coefficient on line {line:?}")))?;
        if it.next().is_some() {
            return Err(Error::format(format!("trailing tokens on line {line:?}")));
        }
        if n != expect {
            return Err(Error::format(format!("coefficient index gap: expected {expect}, got {n}")));
        }
        if n > order {
            return Err(Error::format(format!("index {n} beyond declared order {order}")));
        }
        coeffs[n] = parse_rational(val)?;
        expect += 1;
    }
    if expect != order + 1 {
        return Err(Error::format(format!(
            "missing coefficients: declared order {order}, got {}",
            expect - 1
        )));
    }
    if !coeffs[1].is_one() {
        return Err(Error::format(format!("not normalized: a(1) = {} (need 1)", coeffs[1])));
    }
    let spec = EigenformSpec { weight, level, source: EigenformSource::IngestedFile };
    Ok((spec, QSeries::new(coeffs, weight as i64, level)))
}

fn parse_rational(s: &str) -> Result<Rational> {
    let parse_int = |t: &str| -> Result<BigInt> {
        t.parse::<BigInt>().map_err(|_| Error::format(format!("bad integer {t:?}")))
    };
    match s.split_once('/') {
        Some((p, q)) => {
            let den = parse_int(q)?;
            if den.is_zero() {
                return Err(Error::format("zero denominator"));
            }
            Ok(Rational::new(parse_int(p)?, den))
        }
        None => Ok(Rational::from(parse_int(s)?)),
    }
}

/// Read a coefficient file from disk. See [`parse_coefficients`].
pub fn ingest_coefficients(path: &Path) -> Result<(EigenformSpec, QSeries)> {
    parse_coefficients(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Long coefficient tables in f64, for the tails of L-series partial sums.
// ---------------------------------------------------------------------------

/// `tau(n)` for `n <= len` in f64, via 24 sparse Euler-product passes.
fn tau_f64(len: usize) -> Vec<f64> {
    let euler = pentagonal_terms(len.saturating_sub(1));
    let mut cur = vec![0.0f64; len];
    cur[0] = 1.0;
    for _ in 0..24 {
        let mut next = vec![0.0f64; len];
        use rayon::prelude::*;
        next.par_iter_mut().enumerate().for_each(|(n, out)| {
            let mut acc = 0.0;
            for &(g, s) in &euler {
                if g > n {
                    break;
                }
                acc += s as f64 * cur[n - g];
            }
            *out = acc;
        });
        cur = next;
    }
    let mut tau = vec![0.0f64; len + 1];
    tau[1..].copy_from_slice(&cur[..len]);
    tau
}

/// Coefficients `a(1)..a(len)` of the built-in eigenform of weight `k`, as
/// f64 (index 0 is zero). Exact up to rounding in the accumulation; used
/// for the deep tails of Rankin and symmetric-square partial sums.
pub fn eigenform_coeffs_f64(k: u64, len: usize) -> Result<Vec<f64>> {
    if !BUILTIN_WEIGHTS.contains(&k) {
        return Err(Error::arg(format!("no built-in eigenform of weight {k}")));
    }
    let tau = tau_f64(len);
    if k == 12 {
        return Ok(tau);
    }
    let m = k - 12;
    let c = rational_to_f64(&(Rational::from(BigInt::from(2)) / zeta_neg_odd(m)?));
    let mut e = vec![0.0f64; len + 1];
    e[0] = 1.0;
    for d in 1..=len {
        let dp = (d as f64).powi(m as i32 - 1);
        let mut i = d;
        while i <= len {
            e[i] += dp;
            i += d;
        }
    }
    for x in e[1..].iter_mut() {
        *x *= c;
    }
    use rayon::prelude::*;
    let a: Vec<f64> = (0..=len)
        .into_par_iter()
        .map(|n| {
            let mut acc = crate::sums::Neumaier::new();
            for m in 1..=n {
                acc.add(tau[m] * e[n - m]);
            }
            acc.total()
        })
        .collect();
    Ok(a)
}
