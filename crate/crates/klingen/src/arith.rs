//! Exact rational arithmetic and elementary number theory.
//!
//! Everything here is exact: Bernoulli numbers, special zeta values,
//! Kronecker symbols, generalized Bernoulli numbers and the deterministic
//! completion of coprime pairs to unimodular matrices. No floating point.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// Exact rational number, always stored in lowest terms with positive
/// denominator (enforced by `num_rational`).
pub type Rational = num_rational::BigRational;

pub(crate) fn rat_i64(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Binomial coefficient C(n, k) as an exact integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 0..k {
        num *= BigInt::from(n - j);
        den *= BigInt::from(j + 1);
    }
    num / den
}

/// Bernoulli numbers `B_0..B_n` with the convention `B_1 = -1/2`.
pub fn bernoulli_upto(n: u64) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n as usize + 1);
    b.push(Rational::one());
    for m in 1..=n {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rational::zero();
        for (j, bj) in b.iter().enumerate() {
            acc += Rational::from(binomial(m + 1, j as u64)) * bj;
        }
        b.push(-acc / Rational::from(BigInt::from(m + 1)));
    }
    b
}

/// The Bernoulli number `B_n`, convention `B_1 = -1/2`.
pub fn bernoulli(n: u64) -> Rational {
    if n > 1 && n % 2 == 1 {
        return Rational::zero();
    }
    bernoulli_upto(n).pop().unwrap()
}

/// Exact `zeta(1 - k) = -B_k / k` for even `k >= 2`.
pub fn zeta_neg_odd(k: u64) -> Result<Rational> {
    if k < 2 || k % 2 != 0 {
        return Err(Error::arg(format!("zeta(1-k) requires even k >= 2, got k={k}")));
    }
    Ok(-bernoulli(k) / Rational::from(BigInt::from(k)))
}

/// Divisor power sum `sigma_k(n) = sum_{d | n} d^k`.
pub fn divisor_sum(k: u32, n: u64) -> BigInt {
    assert!(n >= 1, "divisor_sum needs n >= 1");
    let mut acc = BigInt::zero();
    let mut d = 1u64;
    while d * d <= n {
        if n % d == 0 {
            acc += BigInt::from(d).pow(k);
            let e = n / d;
            if e != d {
                acc += BigInt::from(e).pow(k);
            }
        }
        d += 1;
    }
    acc
}

fn two_symbol(n: i64) -> i32 {
    // (2/n) = (n/2) for odd n
    match n.rem_euclid(8) {
        1 | 7 => 1,
        _ => -1,
    }
}

/// Kronecker symbol `(a/b)`, totally multiplicative in both arguments.
pub fn kronecker(mut a: i64, mut b: i64) -> i32 {
    if b == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    if a % 2 == 0 && b % 2 == 0 {
        return 0;
    }
    let mut v = 0u32;
    while b % 2 == 0 {
        b /= 2;
        v += 1;
    }
    let mut k = if v % 2 == 0 { 1 } else { two_symbol(a) };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        // invariant: b odd and positive
        if a == 0 {
            return if b > 1 { 0 } else { k };
        }
        v = 0;
        while a % 2 == 0 {
            a /= 2;
            v += 1;
        }
        if v % 2 == 1 {
            k *= two_symbol(b);
        }
        // reciprocity; `& 2` reads "congruent to 3 mod 4" in two's complement
        if (a & b & 2) != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

/// Real quadratic character attached to a discriminant `D` (so `D = 0, 1 mod 4`),
/// evaluated through the Kronecker symbol `(D/n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirichletKronecker {
    disc: i64,
}

impl DirichletKronecker {
    pub fn new(disc: i64) -> Result<Self> {
        if disc == 0 || disc.rem_euclid(4) > 1 {
            return Err(Error::arg(format!("{disc} is not a discriminant (need 0 or 1 mod 4)")));
        }
        Ok(DirichletKronecker { disc })
    }

    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    /// Modulus of the character.
    pub fn period(&self) -> u64 {
        self.disc.unsigned_abs()
    }

    pub fn eval(&self, n: i64) -> i32 {
        kronecker(self.disc, n)
    }

    /// `chi(-1)`: -1 exactly when the discriminant is negative.
    pub fn sign(&self) -> i32 {
        if self.disc < 0 {
            -1
        } else {
            1
        }
    }
}

/// Extended gcd: returns `(g, u, v)` with `u*x + v*y = g >= 0`.
pub fn ext_gcd(x: i64, y: i64) -> (i64, i64, i64) {
    let (mut old_r, mut r) = (x as i128, y as i128);
    let (mut old_u, mut u) = (1i128, 0i128);
    let (mut old_v, mut v) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_u, u) = (u, old_u - q * u);
        (old_v, v) = (v, old_v - q * v);
    }
    if old_r < 0 {
        (old_r, old_u, old_v) = (-old_r, -old_u, -old_v);
    }
    (old_r as i64, old_u as i64, old_v as i64)
}

/// Complete a coprime pair `(c, d)` to `(a, b)` with `a*d - b*c = 1`.
///
/// The solution set is `(a + tc, b + td)`; we return the unique solution
/// with `0 <= a < |c|` when `c != 0`, and `(d, 0)` when `c = 0`. This fixes
/// coset representatives reproducibly across runs.
pub fn complete_coprime_pair(c: i64, d: i64) -> Result<(i64, i64)> {
    if gcd_i64(c, d) != 1 {
        return Err(Error::arg(format!("({c}, {d}) is not coprime")));
    }
    if c == 0 {
        // d = +-1; (a, b) = (d, 0) gives a*d = d^2 = 1
        return Ok((d, 0));
    }
    let (_, u, _) = ext_gcd(d, c); // u*d + v*c = 1
    let a = u.rem_euclid(c.abs());
    let b = ((a as i128 * d as i128 - 1) / c as i128) as i64;
    debug_assert_eq!(a as i128 * d as i128 - b as i128 * c as i128, 1);
    Ok((a, b))
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.unsigned_abs().gcd(&b.unsigned_abs()) as i64
}

/// Bernoulli polynomial `B_n(x) = sum_j C(n,j) B_j x^{n-j}` at a rational point.
pub fn bernoulli_poly(n: u64, x: &Rational) -> Rational {
    let b = bernoulli_upto(n);
    let mut acc = Rational::zero();
    let mut xpow = Rational::one();
    // iterate j = n down to 0 so xpow tracks x^{n-j}
    for j in (0..=n).rev() {
        acc += Rational::from(binomial(n, j)) * &b[j as usize] * &xpow;
        xpow *= x;
    }
    acc
}

/// Generalized Bernoulli number
/// `B_{n,chi} = |D|^{n-1} sum_{a=1}^{|D|} chi(a) B_n(a/|D|)`.
pub fn generalized_bernoulli(chi: &DirichletKronecker, n: u64) -> Rational {
    assert!(n >= 1, "generalized_bernoulli needs n >= 1");
    let f = chi.period();
    let mut acc = Rational::zero();
    for a in 1..=f {
        let ca = chi.eval(a as i64);
        if ca == 0 {
            continue;
        }
        let term = bernoulli_poly(n, &rat_i64(a as i64, f as i64));
        if ca > 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Rational::from(BigInt::from(f)).pow(n as i32 - 1) * acc
}

// ---------------------------------------------------------------------------
// Factorization (trial division plus Pollard rho, desk scale)
// ---------------------------------------------------------------------------

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u64) -> u64 {
    // Brent's cycle detection; deterministic seed schedule
    for c in 1..64u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!("pollard rho failed on {n}")
}

/// Prime factorization `n = prod p_i^{e_i}`, ascending primes.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    }
    let mut stack = vec![n];
    let mut rest: Vec<u64> = Vec::new();
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime_u64(m) {
            rest.push(m);
        } else {
            let d = pollard_rho(m);
            stack.push(d);
            stack.push(m / d);
        }
    }
    rest.sort_unstable();
    let mut i = 0;
    while i < rest.len() {
        let p = rest[i];
        let mut e = 0;
        while i < rest.len() && rest[i] == p {
            e += 1;
            i += 1;
        }
        out.push((p, e));
    }
    out.sort_unstable();
    out
}

/// Whether `d` is a fundamental discriminant: `d = 1 mod 4` squarefree, or
/// `d = 4m` with `m = 2, 3 mod 4` squarefree (and `d = 1` by convention).
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 {
        return false;
    }
    if d.rem_euclid(4) == 1 {
        return squarefree_split(d.unsigned_abs()).0 == 1;
    }
    if d % 4 == 0 {
        let m = d / 4;
        let r = m.rem_euclid(4);
        return (r == 2 || r == 3) && squarefree_split(m.unsigned_abs()).0 == 1;
    }
    false
}

/// Write `n = s^2 * q` with `q` squarefree; returns `(s, q)`.
pub fn squarefree_split(n: u64) -> (u64, u64) {
    let mut s = 1u64;
    let mut q = 1u64;
    for (p, e) in factor_u64(n) {
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            q *= p;
        }
    }
    (s, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), Rational::one());
        assert_eq!(bernoulli(1), rat_i64(-1, 2));
        assert_eq!(bernoulli(3), Rational::zero());
        assert_eq!(bernoulli(12), rat_i64(-691, 2730));
    }

    #[test]
    fn zeta_special_values() {
        assert_eq!(zeta_neg_odd(2).unwrap(), rat_i64(-1, 12));
        assert_eq!(zeta_neg_odd(4).unwrap(), rat_i64(1, 120));
        assert_eq!(zeta_neg_odd(12).unwrap(), rat_i64(691, 32760));
        assert!(zeta_neg_odd(3).is_err());
        assert!(zeta_neg_odd(0).is_err());
    }

    #[test]
    fn zeta_matches_bernoulli_up_to_40() {
        for k in (2..=40u64).step_by(2) {
            let z = zeta_neg_odd(k).unwrap();
            assert_eq!(z * Rational::from(BigInt::from(k)), -bernoulli(k));
        }
    }

    #[test]
    fn divisor_sums() {
        assert_eq!(divisor_sum(11, 1), BigInt::from(1));
        assert_eq!(divisor_sum(11, 2), BigInt::from(2049));
        assert_eq!(divisor_sum(1, 6), BigInt::from(12));
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-4, 2), 0);
        assert_eq!(kronecker(-4, 3), -1);
        assert_eq!(kronecker(-3, 2), -1);
        // brute-force residue oracle for odd primes
        for (d, p) in [(-4i64, 3u64), (-4, 5), (-4, 7), (-3, 5), (-3, 7), (-8, 3), (-8, 5)] {
            let target = d.rem_euclid(p as i64) as u64;
            let is_residue = (1..p).any(|x| (x * x) % p == target);
            let expect = if target == 0 {
                0
            } else if is_residue {
                1
            } else {
                -1
            };
            assert_eq!(kronecker(d, p as i64), expect, "({d}/{p})");
        }
    }

    #[test]
    fn kronecker_period() {
        for d in [-3i64, -4, -7, -8, -20] {
            let m = d.unsigned_abs() as i64;
            for n in 1..200 {
                assert_eq!(kronecker(d, n), kronecker(d, n + m));
            }
        }
    }

    #[test]
    fn completion_examples() {
        assert_eq!(complete_coprime_pair(0, 1).unwrap(), (1, 0));
        assert_eq!(complete_coprime_pair(1, 0).unwrap(), (0, -1));
        // normalized 0 <= a < |c|
        assert_eq!(complete_coprime_pair(1, 2).unwrap(), (0, -1));
        assert_eq!(complete_coprime_pair(-1, 0).unwrap(), (0, 1));
        assert!(complete_coprime_pair(2, 4).is_err());
    }

    #[test]
    fn generalized_bernoulli_values() {
        let chi4 = DirichletKronecker::new(-4).unwrap();
        let chi3 = DirichletKronecker::new(-3).unwrap();
        assert_eq!(generalized_bernoulli(&chi4, 1), rat_i64(-1, 2));
        assert_eq!(generalized_bernoulli(&chi4, 2), Rational::zero());
        assert_eq!(generalized_bernoulli(&chi3, 1), rat_i64(-1, 3));
        // frozen from the Euler-number identity B_{11,chi_{-4}} = -11 E_10 / 2
        assert_eq!(generalized_bernoulli(&chi4, 11), rat_i64(555731, 2));
    }

    #[test]
    fn generalized_bernoulli_parity_vanishing() {
        for d in [-3i64, -4, -7, -8] {
            let chi = DirichletKronecker::new(d).unwrap();
            for n in 1..=20u64 {
                let vanish = if n % 2 == 0 { chi.sign() == -1 } else { chi.sign() == 1 };
                let b = generalized_bernoulli(&chi, n);
                if vanish {
                    assert!(b.is_zero(), "B_{{{n},chi_{d}}} = {b} should vanish");
                }
            }
        }
    }

    #[test]
    fn factorization() {
        assert_eq!(factor_u64(600), vec![(2, 3), (3, 1), (5, 2)]);
        assert_eq!(squarefree_split(16), (4, 1));
        assert_eq!(squarefree_split(12), (2, 3));
        assert!(is_prime_u64(1_000_000_007));
        let big = 1_000_003u64 * 998_857;
        assert_eq!(factor_u64(big), vec![(998_857, 1), (1_000_003, 1)]);
    }

    proptest! {
        #[test]
        fn kronecker_multiplicative(d in prop::sample::select(vec![-3i64, -4, -7, -8, -11, -15, -20]),
                                    m in -60i64..60, n in -60i64..60) {
            prop_assert_eq!(kronecker(d, m * n), kronecker(d, m) * kronecker(d, n));
        }

        #[test]
        fn completion_is_unimodular(c in -200i64..200, d in -200i64..200) {
            prop_assume!(gcd_i64(c, d) == 1);
            let (a, b) = complete_coprime_pair(c, d).unwrap();
            prop_assert_eq!(a * d - b * c, 1);
            if c != 0 {
                prop_assert!(0 <= a && a < c.abs());
            }
        }
    }
}
