//! Half-integral binary quadratic forms.
//!
//! A matrix `T = [[n1, b/2], [b/2, n2]]` is stored as the integer triple
//! `(n1, b, n2)`; the attached form is `Q(x, y) = n1 x^2 + b xy + n2 y^2`
//! with `det(2T) = 4 n1 n2 - b^2`. This module enumerates the index sets
//! `Lambda(n1, n2)`, splits `det(2T)` into a square times a fundamental
//! discriminant, reduces singular matrices, and counts theta-series
//! representation numbers by exact lattice enumeration.

use num_traits::Signed;

use crate::arith::squarefree_split;
use crate::symplectic::Mat2Z;
use crate::{Error, Result};

/// Half-integral symmetric matrix `[[n1, b/2], [b/2, n2]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfIntMatrix {
    pub n1: i64,
    pub b: i64,
    pub n2: i64,
}

impl HalfIntMatrix {
    pub fn new(n1: i64, b: i64, n2: i64) -> Self {
        HalfIntMatrix { n1, b, n2 }
    }

    pub fn diag(n1: i64, n2: i64) -> Self {
        HalfIntMatrix { n1, b: 0, n2 }
    }

    /// `det(2T) = 4 n1 n2 - b^2`.
    pub fn det2t(&self) -> i64 {
        4 * self.n1 * self.n2 - self.b * self.b
    }

    pub fn is_zero(&self) -> bool {
        self.n1 == 0 && self.b == 0 && self.n2 == 0
    }

    pub fn is_positive_definite(&self) -> bool {
        self.n1 > 0 && self.det2t() > 0
    }

    /// Value of the attached quadratic form.
    pub fn eval(&self, x: i64, y: i64) -> i64 {
        self.n1 * x * x + self.b * x * y + self.n2 * y * y
    }

    /// Representative of the GL(2,Z)-equivalence class with
    /// `0 <= b <= n1 <= n2`, for positive definite `T`. Used as a cache key:
    /// Fourier coefficients of degree-two forms only depend on this class.
    pub fn reduced_class(&self) -> HalfIntMatrix {
        assert!(self.is_positive_definite());
        let (mut a, mut b, mut c) = (self.n1, self.b, self.n2);
        loop {
            // shift b into (-a, a]
            let r = b.rem_euclid(2 * a);
            let shift = if r > a { r - 2 * a } else { r };
            let t = (b - shift) / (2 * a);
            // replace (a, b, c) by the translate x -> x - t y
            c += t * t * a - t * b;
            b = shift;
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
            } else {
                break;
            }
        }
        HalfIntMatrix { n1: a, b: b.abs(), n2: c }
    }
}

/// Discriminant split `det(2T) = f_T^2 * Delta(T)` with `-Delta(T)` a
/// fundamental discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscriminantSplit {
    pub f_t: u64,
    pub delta_t: u64,
}

/// All `T` in `Lambda(n1, n2)`, i.e. `b` with `b^2 <= 4 n1 n2`, ascending.
pub fn lambda_set(n1: u64, n2: u64) -> Vec<HalfIntMatrix> {
    let four = 4i64 * n1 as i64 * n2 as i64;
    let mut bmax = (four as f64).sqrt() as i64;
    while bmax * bmax > four {
        bmax -= 1;
    }
    while (bmax + 1) * (bmax + 1) <= four {
        bmax += 1;
    }
    (-bmax..=bmax).map(|b| HalfIntMatrix::new(n1 as i64, b, n2 as i64)).collect()
}

/// Split a positive `det(2T)` value as `f^2 * Delta` with `-Delta` fundamental.
pub fn disc_split_det(det: i64) -> Result<DiscriminantSplit> {
    if det <= 0 {
        return Err(Error::arg(format!("disc_split needs det(2T) > 0, got {det}")));
    }
    if det % 4 == 1 || det % 4 == 2 {
        return Err(Error::arg(format!("{det} is not of the form 4 n1 n2 - b^2")));
    }
    let (s, q) = squarefree_split(det as u64);
    if q % 4 == 3 {
        Ok(DiscriminantSplit { f_t: s, delta_t: q })
    } else {
        // -q = 1 or 2 mod 4: the fundamental discriminant is -4q, and s is even
        debug_assert_eq!(s % 2, 0);
        Ok(DiscriminantSplit { f_t: s / 2, delta_t: 4 * q })
    }
}

/// Discriminant split of a nonsingular `T`.
pub fn disc_split(t: &HalfIntMatrix) -> Result<DiscriminantSplit> {
    disc_split_det(t.det2t())
}

/// Content `m` of a singular `T`, so that `T` is unimodularly equivalent to
/// `diag(m, 0)`. A singular positive semidefinite form is `m` times the
/// square of a primitive linear form, hence `m = gcd(n1, b, n2)`.
pub fn reduce_singular(t: &HalfIntMatrix) -> Result<u64> {
    if t.det2t() != 0 {
        return Err(Error::arg(format!("reduce_singular needs det(2T) = 0, got {}", t.det2t())));
    }
    Ok(crate::arith::gcd_i64(crate::arith::gcd_i64(t.n1, t.b), t.n2) as u64)
}

/// Representation numbers `b_T(0..order-1)` of a positive definite `T`, by
/// exact enumeration of lattice points in the ellipse `Q <= order - 1`.
pub fn theta_coeffs(t: &HalfIntMatrix, order: usize) -> Result<Vec<i64>> {
    if !t.is_positive_definite() {
        return Err(Error::arg(format!("theta_coeffs needs positive definite T, got {t:?}")));
    }
    let mut counts = vec![0i64; order];
    if order == 0 {
        return Ok(counts);
    }
    let nmax = (order - 1) as i64;
    let det = t.det2t();
    // Q(x, y) >= det/(4 n2) x^2, so |x| <= sqrt(4 n2 nmax / det); pad by one
    // and check exactly.
    let xmax = ((4 * t.n2 * nmax) as f64 / det as f64).sqrt() as i64 + 1;
    for x in -xmax..=xmax {
        // n2 y^2 + b x y + (n1 x^2 - nmax) <= 0
        let disc = 4 * t.n2 * nmax - det * x * x;
        if disc < 0 {
            continue;
        }
        let half_width = (disc as f64).sqrt();
        let center = -(t.b * x) as f64;
        let mut ylo = ((center - half_width) / (2 * t.n2) as f64).floor() as i64 - 1;
        let mut yhi = ((center + half_width) / (2 * t.n2) as f64).ceil() as i64 + 1;
        while t.eval(x, ylo) > nmax {
            ylo += 1;
            if ylo > yhi {
                break;
            }
        }
        while yhi >= ylo && t.eval(x, yhi) > nmax {
            yhi -= 1;
        }
        for y in ylo..=yhi {
            let v = t.eval(x, y);
            debug_assert!(v >= 0);
            if v <= nmax {
                counts[v as usize] += 1;
            }
        }
    }
    Ok(counts)
}

/// Envelope constant `C_T` with `b_T(m) <= C_T sqrt(m) + 4`, read off the
/// enumeration window: at most `2 sqrt(4 max(n1,n2) m / det(2T)) + 1` values
/// of one coordinate, and at most two of the other for each.
pub fn theta_envelope(t: &HalfIntMatrix) -> f64 {
    assert!(t.is_positive_definite());
    8.0 * (t.n1.max(t.n2) as f64 / t.det2t() as f64).sqrt()
}

/// `U^t T U` for unimodular `U`; the off-diagonal stays integral because the
/// form is integer valued.
pub fn unimodular_transform(t: &HalfIntMatrix, u: &Mat2Z) -> Result<HalfIntMatrix> {
    let det = u.det();
    if !(det.abs() == num_bigint::BigInt::from(1)) {
        return Err(Error::arg(format!("transform matrix must have det +-1, got {det}")));
    }
    let (a, b, c, d) = u
        .entries_i64()
        .ok_or_else(|| Error::arg("transform entries exceed i64 range"))?;
    // columns u1 = (a, c), u2 = (b, d): n1' = Q(u1), n2' = Q(u2),
    // b' = bilinear form of the pair
    let n1 = t.eval(a, c);
    let n2 = t.eval(b, d);
    let bp = 2 * t.n1 * a * b + t.b * (a * d + b * c) + 2 * t.n2 * c * d;
    Ok(HalfIntMatrix::new(n1, bp, n2))
}
