//! Exact linear algebra for `SL(2,Z)`, `Sp(4)`, congruence and paramodular
//! subgroups, coset representatives, and the `H_{1,1}` embedding.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{complete_coprime_pair, gcd_i64, Rational};
use crate::{Error, Result};

/// Exact integer 2x2 matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2Z {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
    pub d: BigInt,
}

impl Mat2Z {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        Mat2Z { a, b, c, d }
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2Z::new(BigInt::from(a), BigInt::from(b), BigInt::from(c), BigInt::from(d))
    }

    pub fn identity() -> Self {
        Mat2Z::from_i64(1, 0, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn mul(&self, o: &Mat2Z) -> Mat2Z {
        Mat2Z::new(
            &self.a * &o.a + &self.b * &o.c,
            &self.a * &o.b + &self.b * &o.d,
            &self.c * &o.a + &self.d * &o.c,
            &self.c * &o.b + &self.d * &o.d,
        )
    }

    pub fn entries_i64(&self) -> Option<(i64, i64, i64, i64)> {
        Some((self.a.to_i64()?, self.b.to_i64()?, self.c.to_i64()?, self.d.to_i64()?))
    }

    /// Membership in the Hecke congruence subgroup `Gamma_0^2(N)`.
    pub fn in_gamma0(&self, n: u32) -> bool {
        self.det().is_one() && (&self.c % BigInt::from(n)).is_zero()
    }

    /// Moebius action and automorphy factor: `(g<tau>, c tau + d)`.
    ///
    /// The imaginary part is computed through `det(g) Im(tau) / |j|^2`
    /// rather than by complex division; the naive route cancels
    /// catastrophically for matrices with large entries.
    pub fn moebius(&self, tau: Complex64) -> (Complex64, Complex64) {
        let (a, b, c, d) = (
            self.a.to_f64().unwrap(),
            self.b.to_f64().unwrap(),
            self.c.to_f64().unwrap(),
            self.d.to_f64().unwrap(),
        );
        let det = self.det().to_f64().unwrap();
        let j = c * tau + d;
        let jn = j.norm_sqr();
        let re = ((a * tau.re + b) * (c * tau.re + d) + a * c * tau.im * tau.im) / jn;
        let im = det * tau.im / jn;
        (Complex64::new(re, im), j)
    }
}

/// Moebius action of `g` on the upper half plane; returns `(g<tau>, j(g, tau))`.
pub fn moebius(g: &Mat2Z, tau: Complex64) -> (Complex64, Complex64) {
    g.moebius(tau)
}

/// Exact 4x4 matrix with rational entries (rational entries are needed for
/// paramodular membership tests, where one slot carries denominator `N`).
#[derive(Debug, Clone, PartialEq)]
pub struct SpRep {
    m: [[Rational; 4]; 4],
}

fn rat(v: i64) -> Rational {
    Rational::from(BigInt::from(v))
}

impl SpRep {
    pub fn from_rows(rows: [[Rational; 4]; 4]) -> Self {
        SpRep { m: rows }
    }

    pub fn from_i64(rows: [[i64; 4]; 4]) -> Self {
        SpRep { m: rows.map(|r| r.map(rat)) }
    }

    pub fn identity() -> Self {
        let mut m = SpRep::zero();
        for i in 0..4 {
            m.m[i][i] = Rational::one();
        }
        m
    }

    pub fn zero() -> Self {
        SpRep { m: std::array::from_fn(|_| std::array::from_fn(|_| Rational::zero())) }
    }

    pub fn entry(&self, i: usize, j: usize) -> &Rational {
        &self.m[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.m[i][j] = v;
    }

    pub fn mul(&self, o: &SpRep) -> SpRep {
        let mut out = SpRep::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Rational::zero();
                for k in 0..4 {
                    acc += &self.m[i][k] * &o.m[k][j];
                }
                out.m[i][j] = acc;
            }
        }
        out
    }

    pub fn transpose(&self) -> SpRep {
        let mut out = SpRep::zero();
        for i in 0..4 {
            for j in 0..4 {
                out.m[i][j] = self.m[j][i].clone();
            }
        }
        out
    }

    /// The standard alternating form `J = [[0, I], [-I, 0]]`.
    pub fn j_form() -> SpRep {
        SpRep::from_i64([[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]])
    }

    /// Similitude factor `lambda` with `g^t J g = lambda J`, if `g` is in
    /// `GSp(4, Q)`.
    pub fn similitude(&self) -> Option<Rational> {
        let j = SpRep::j_form();
        let gjg = self.transpose().mul(&j).mul(self);
        let lambda = gjg.m[0][2].clone();
        let mut expect = j;
        for row in expect.m.iter_mut() {
            for e in row.iter_mut() {
                *e *= &lambda;
            }
        }
        if gjg == expect && !lambda.is_zero() {
            Some(lambda)
        } else {
            None
        }
    }

    pub fn is_integral(&self) -> bool {
        self.m.iter().flatten().all(|e| e.denom().is_one())
    }

    pub fn is_member(&self, group: Group4) -> bool {
        match group {
            Group4::Sp4Z => {
                self.is_integral() && self.similitude().map_or(false, |l| l.is_one())
            }
            Group4::Gamma0Siegel(n) => {
                if !self.is_member(Group4::Sp4Z) {
                    return false;
                }
                let m = BigInt::from(n);
                [(2, 0), (2, 1), (3, 0), (3, 1)]
                    .iter()
                    .all(|&(i, j)| (self.m[i][j].numer() % &m).is_zero())
            }
            Group4::ParamodularK(n) => {
                if self.similitude().map_or(true, |l| !l.is_one()) {
                    return false;
                }
                let n = BigInt::from(n);
                let int = |r: &Rational| r.denom().is_one();
                let in_nz = |r: &Rational| int(r) && (r.numer() % &n).is_zero();
                let in_inv_nz = |r: &Rational| (r * Rational::from(n.clone())).denom().is_one();
                int(&self.m[0][0])
                    && in_nz(&self.m[0][1])
                    && int(&self.m[0][2])
                    && int(&self.m[0][3])
                    && int(&self.m[1][0])
                    && int(&self.m[1][1])
                    && int(&self.m[1][2])
                    && in_inv_nz(&self.m[1][3])
                    && int(&self.m[2][0])
                    && in_nz(&self.m[2][1])
                    && int(&self.m[2][2])
                    && int(&self.m[2][3])
                    && in_nz(&self.m[3][0])
                    && in_nz(&self.m[3][1])
                    && in_nz(&self.m[3][2])
                    && int(&self.m[3][3])
            }
        }
    }
}

/// The subgroups of `Sp(4)` we test membership for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group4 {
    Sp4Z,
    /// Siegel congruence subgroup: lower-left 2x2 block vanishes mod N.
    Gamma0Siegel(u32),
    /// Paramodular group of level N.
    ParamodularK(u32),
}

/// The lattice-shifting matrix `L_N` relating paramodular Klingen lifts of
/// level `N` to `K(N^2)`.
pub fn l_matrix(n: u32) -> SpRep {
    let n = n as i64;
    SpRep::from_i64([[1, n, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, -n, 1]])
}

/// Representatives `{1, s1, r}` of the double cosets
/// `Q(Q) \ GSp(4, Q) / H_{1,1}(Q)`.
pub fn double_coset_reps() -> [SpRep; 3] {
    let s1 = SpRep::from_i64([[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]);
    let r = SpRep::from_i64([[1, 0, 0, 0], [1, 1, 0, 0], [0, 0, 1, -1], [0, 0, 0, 1]]);
    [SpRep::identity(), s1, r]
}

/// The block matrix `eps_{c,d} = diag([[d, -c], [-b, a]], [[a, b], [c, d]])`
/// with `(a, b)` the deterministic completion of `(c, d)`.
pub fn epsilon_cd(c: i64, d: i64) -> Result<SpRep> {
    let (a, b) = complete_coprime_pair(c, d)?;
    Ok(SpRep::from_i64([
        [d, -c, 0, 0],
        [-b, a, 0, 0],
        [0, 0, a, b],
        [0, 0, c, d],
    ]))
}

/// One representative of a coset in `Gamma_infty \ Gamma_0^2(N)`, keyed by
/// its bottom row `(c, d)` normalized up to simultaneous sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetRep {
    pub matrix: Mat2Z,
    pub c: i64,
    pub d: i64,
}

/// Representatives of `Gamma_infty \ Gamma_0^2(N)` with bottom rows in the
/// box `0 <= c <= M`, `|d| <= M` (and the cusp representative `(0, 1)`),
/// ordered by `(c, d)`.
pub fn coset_reps(n: u32, height: i64) -> Vec<CosetRep> {
    let mut out = Vec::new();
    out.push(CosetRep { matrix: Mat2Z::identity(), c: 0, d: 1 });
    let mut c = n as i64;
    while c <= height {
        for d in -height..=height {
            if gcd_i64(c, d) == 1 {
                let (a, b) = complete_coprime_pair(c, d).unwrap();
                out.push(CosetRep { matrix: Mat2Z::from_i64(a, b, c, d), c, d });
            }
        }
        c += n as i64;
    }
    out
}

/// Embed `(g1, g2)` with equal determinants into `GSp(4)`:
/// `[[a1, 0, -b1, 0], [0, a2, 0, b2], [-c1, 0, d1, 0], [0, c2, 0, d2]]`.
pub fn embed_h11(g1: &Mat2Z, g2: &Mat2Z) -> Result<SpRep> {
    if g1.det() != g2.det() {
        return Err(Error::arg(format!(
            "H_{{1,1}} needs equal similitudes, got {} and {}",
            g1.det(),
            g2.det()
        )));
    }
    let r = |x: &BigInt| Rational::from(x.clone());
    let mut m = SpRep::zero();
    m.set(0, 0, r(&g1.a));
    m.set(0, 2, -r(&g1.b));
    m.set(1, 1, r(&g2.a));
    m.set(1, 3, r(&g2.b));
    m.set(2, 0, -r(&g1.c));
    m.set(2, 2, r(&g1.d));
    m.set(3, 1, r(&g2.c));
    m.set(3, 3, r(&g2.d));
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j_and_double_coset_reps_are_symplectic() {
        assert!(SpRep::j_form().is_member(Group4::Sp4Z));
        let [one, s1, r] = double_coset_reps();
        for g in [&one, &s1, &r] {
            assert_eq!(g.similitude().unwrap(), Rational::one());
            assert!(g.is_member(Group4::Sp4Z));
        }
        // s1^2 = 1
        assert_eq!(s1.mul(&s1), SpRep::identity());
        // r is unipotent: (r - 1)^2 = 0
        let mut rm1 = r.clone();
        for i in 0..4 {
            let e = rm1.entry(i, i) - Rational::one();
            rm1.set(i, i, e);
        }
        assert_eq!(rm1.mul(&rm1), SpRep::zero());
    }

    #[test]
    fn siegel_congruence_membership() {
        // gamma0^4(2) member: embed a level-2 SL2 element diagonally
        let g = Mat2Z::from_i64(1, 0, 2, 1);
        let e = embed_h11(&g, &g).unwrap();
        assert!(e.is_member(Group4::Gamma0Siegel(2)));
        // lower-left vanishes mod 2 but not symplectic
        let bad = SpRep::from_i64([[1, 0, 0, 0], [0, 1, 0, 0], [2, 0, 1, 0], [0, 2, 1, 1]]);
        assert!(!bad.is_member(Group4::Gamma0Siegel(2)));
    }

    #[test]
    fn l_matrix_properties() {
        let l1 = l_matrix(1);
        assert_eq!(l1.entry(0, 1), &Rational::one());
        assert_eq!(l1.entry(3, 2), &-Rational::one());
        for n in [1u32, 2, 3, 5] {
            let l = l_matrix(n);
            assert_eq!(l.similitude().unwrap(), Rational::one());
        }
        // L_N sits in K(N^2) exactly for N = 1 (the (0,1) entry is N, not N^2)
        assert!(l_matrix(1).is_member(Group4::ParamodularK(1)));
        assert!(!l_matrix(2).is_member(Group4::ParamodularK(4)));
    }

    #[test]
    fn paramodular_membership() {
        let n = 3u32;
        // a typical K(N) element with the N^{-1} slot populated
        let mut g = SpRep::identity();
        g.set(1, 3, Rational::new(BigInt::from(1), BigInt::from(n)));
        // make it symplectic: transvection in the (2, 4) plane
        assert_eq!(g.similitude().unwrap(), Rational::one());
        assert!(g.is_member(Group4::ParamodularK(n)));
        assert!(!g.is_member(Group4::Sp4Z));
        // integral matrices violating the N | . pattern are rejected
        let mut h = SpRep::identity();
        h.set(0, 1, Rational::one());
        h.set(3, 2, -Rational::one());
        assert_eq!(h.similitude().unwrap(), Rational::one());
        assert!(!h.is_member(Group4::ParamodularK(n)));
    }

    #[test]
    fn epsilon_examples() {
        let e10 = epsilon_cd(1, 0).unwrap();
        assert_eq!(
            e10,
            SpRep::from_i64([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
        );
        let e12 = epsilon_cd(1, 2).unwrap();
        assert_eq!(
            e12,
            SpRep::from_i64([[2, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 2]])
        );
        assert!(epsilon_cd(2, 4).is_err());
    }

    #[test]
    fn epsilon_symplectic_for_all_small_pairs() {
        for c in -20i64..=20 {
            for d in -20i64..=20 {
                if gcd_i64(c, d) != 1 {
                    continue;
                }
                let e = epsilon_cd(c, d).unwrap();
                assert!(e.is_member(Group4::Sp4Z), "eps({c},{d})");
                // lower-left block zero, bottom row (c, d)
                assert_eq!(e.entry(3, 2), &rat(c));
                assert_eq!(e.entry(3, 3), &rat(d));
                assert!(e.entry(2, 0).is_zero() && e.entry(2, 1).is_zero());
                assert!(e.entry(3, 0).is_zero() && e.entry(3, 1).is_zero());
            }
        }
    }

    #[test]
    fn coset_reps_small() {
        let reps = coset_reps(1, 1);
        let keys: Vec<(i64, i64)> = reps.iter().map(|r| (r.c, r.d)).collect();
        assert_eq!(keys, vec![(0, 1), (1, -1), (1, 0), (1, 1)]);

        let reps2 = coset_reps(2, 2);
        let keys2: Vec<(i64, i64)> = reps2.iter().map(|r| (r.c, r.d)).collect();
        assert_eq!(keys2, vec![(0, 1), (2, -1), (2, 1)]);

        for r in coset_reps(2, 6) {
            assert!(r.matrix.in_gamma0(2));
        }
    }

    #[test]
    fn coset_reps_nested_and_distinct() {
        let small = coset_reps(1, 3);
        let large = coset_reps(1, 7);
        for r in &small {
            assert!(large.contains(r));
        }
        // no two reps differ by +-(1 m; 0 1): normalized keys are distinct
        let mut keys: Vec<(i64, i64)> = small.iter().map(|r| (r.c, r.d)).collect();
        keys.sort_unstable();
        keys.dedup();
        assert_eq!(keys.len(), small.len());
        // bijection onto normalized coprime pairs with max(|c|, |d|) <= 3
        let mut expected = vec![(0i64, 1i64)];
        for c in 1..=3i64 {
            for d in -3..=3i64 {
                if gcd_i64(c, d) == 1 {
                    expected.push((c, d));
                }
            }
        }
        expected.sort_unstable();
        assert_eq!(keys, expected);
    }

    #[test]
    fn embedding_properties() {
        let id = Mat2Z::identity();
        assert_eq!(embed_h11(&id, &id).unwrap(), SpRep::identity());
        let s = Mat2Z::from_i64(0, 1, -1, 0);
        let e = embed_h11(&s, &id).unwrap();
        assert_eq!(e.similitude().unwrap(), Rational::one());
        let mut rng = crate::testrng::SplitMix(7);
        for _ in 0..20 {
            let g = random_sl2(&mut rng);
            let e = embed_h11(&g, &g).unwrap();
            assert!(e.is_member(Group4::Sp4Z));
        }
        assert!(embed_h11(&Mat2Z::from_i64(2, 0, 0, 1), &id).is_err());
    }

    pub(crate) fn random_sl2(rng: &mut crate::testrng::SplitMix) -> Mat2Z {
        let mut g = Mat2Z::identity();
        for _ in 0..5 {
            let m = rng.in_range(-3, 3);
            let e = if rng.next() % 2 == 0 {
                Mat2Z::from_i64(1, m, 0, 1)
            } else {
                Mat2Z::from_i64(1, 0, m, 1)
            };
            g = g.mul(&e);
        }
        g
    }

    #[test]
    fn moebius_examples_and_cocycle() {
        let tau = Complex64::new(0.3, 1.7);
        let (w, j) = Mat2Z::identity().moebius(tau);
        assert_eq!(w, tau);
        assert_eq!(j, Complex64::new(1.0, 0.0));

        let s = Mat2Z::from_i64(0, 1, -1, 0);
        let (w, j) = s.moebius(Complex64::new(0.0, 1.0));
        assert!((w - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((j - Complex64::new(0.0, -1.0)).norm() < 1e-15);

        let mut rng = crate::testrng::SplitMix(42);
        for _ in 0..50 {
            let g = random_sl2(&mut rng);
            let h = random_sl2(&mut rng);
            let (htau, jh) = h.moebius(tau);
            let (_, jg) = g.moebius(htau);
            let (_, jgh) = g.mul(&h).moebius(tau);
            assert!((jgh - jg * jh).norm() <= 1e-12 * jgh.norm(), "cocycle");
            // Im g<tau> = Im tau / |j|^2
            let (gt, j) = g.moebius(tau);
            let expect = tau.im / j.norm_sqr();
            assert!((gt.im - expect).abs() <= 4.0 * f64::EPSILON * expect.abs());
        }
    }
}
