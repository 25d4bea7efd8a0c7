//! Compensated summation and deterministic parallel reduction.
//!
//! Every truncated series in this crate is accumulated with Neumaier's
//! variant of Kahan summation, in a fixed ascending index order. Parallel
//! sums partition the index range into fixed-size chunks, sum each chunk
//! sequentially, and merge chunk results in chunk order, so results are
//! bit-identical for any worker count.

use num_complex::Complex64;
use rayon::prelude::*;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bp = s - a;
    let e = (a - (s - bp)) + (b - bp);
    (s, e)
}

/// Neumaier compensated accumulator for `f64`.
#[derive(Debug, Default, Clone, Copy)]
pub struct Neumaier {
    s: f64,
    c: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Neumaier::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.s, x);
        self.s = s;
        self.c += e;
    }

    pub fn total(&self) -> f64 {
        self.s + self.c
    }
}

/// Componentwise compensated accumulator for complex sums.
#[derive(Debug, Default, Clone, Copy)]
pub struct NeumaierC {
    re: Neumaier,
    im: Neumaier,
}

impl NeumaierC {
    pub fn new() -> Self {
        NeumaierC::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

/// Fixed chunk length for deterministic parallel reductions. Chunk
/// boundaries depend only on the index range, never on the thread count.
pub const CHUNK: usize = 1024;

/// Compensated sum of `f(i)` over `lo..hi`, parallel over fixed chunks.
pub fn par_sum_f64<F>(lo: usize, hi: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync,
{
    if hi <= lo {
        return 0.0;
    }
    let ranges: Vec<(usize, usize)> = (lo..hi)
        .step_by(CHUNK)
        .map(|s| (s, (s + CHUNK).min(hi)))
        .collect();
    let partials: Vec<f64> = ranges
        .par_iter()
        .map(|&(s, e)| {
            let mut acc = Neumaier::new();
            for i in s..e {
                acc.add(f(i));
            }
            acc.total()
        })
        .collect();
    let mut acc = Neumaier::new();
    for p in partials {
        acc.add(p);
    }
    acc.total()
}

/// Complex analogue of [`par_sum_f64`].
pub fn par_sum_c64<F>(lo: usize, hi: usize, f: F) -> Complex64
where
    F: Fn(usize) -> Complex64 + Sync,
{
    if hi <= lo {
        return Complex64::new(0.0, 0.0);
    }
    let ranges: Vec<(usize, usize)> = (lo..hi)
        .step_by(CHUNK)
        .map(|s| (s, (s + CHUNK).min(hi)))
        .collect();
    let partials: Vec<Complex64> = ranges
        .par_iter()
        .map(|&(s, e)| {
            let mut acc = NeumaierC::new();
            for i in s..e {
                acc.add(f(i));
            }
            acc.total()
        })
        .collect();
    let mut acc = NeumaierC::new();
    for p in partials {
        acc.add(p);
    }
    acc.total()
}

/// A value with an absolute error bound, propagated through products and
/// quotients of tail-bounded quantities.
#[derive(Debug, Clone, Copy)]
pub struct Approx {
    pub val: f64,
    pub err: f64,
}

impl Approx {
    pub fn exact(val: f64) -> Self {
        Approx { val, err: 0.0 }
    }

    pub fn new(val: f64, err: f64) -> Self {
        Approx { val, err }
    }

    pub fn add(self, o: Approx) -> Approx {
        Approx { val: self.val + o.val, err: self.err + o.err + f64::EPSILON * (self.val + o.val).abs() }
    }

    pub fn mul(self, o: Approx) -> Approx {
        let err = self.val.abs() * o.err + o.val.abs() * self.err + self.err * o.err;
        Approx { val: self.val * o.val, err: err + f64::EPSILON * (self.val * o.val).abs() }
    }

    pub fn scale(self, c: f64) -> Approx {
        Approx { val: c * self.val, err: c.abs() * self.err }
    }

    pub fn div(self, o: Approx) -> Approx {
        let denom_low = o.val.abs() - o.err;
        if denom_low <= 0.0 {
            return Approx { val: self.val / o.val, err: f64::INFINITY };
        }
        let val = self.val / o.val;
        let err = (self.err + val.abs() * o.err) / denom_low + f64::EPSILON * val.abs();
        Approx { val, err }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_is_protected() {
        let mut acc = Neumaier::new();
        for x in [1e16, 1.0, -1e16, 1.0] {
            acc.add(x);
        }
        assert_eq!(acc.total(), 2.0);
    }

    #[test]
    fn parallel_sum_matches_sequential_bitwise() {
        let f = |i: usize| ((i as f64) * 0.37).sin() / ((i + 1) as f64);
        let seq = {
            // same chunking, forced onto one thread
            let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            pool.install(|| par_sum_f64(0, 100_000, f))
        };
        let par = {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(8).build().unwrap();
            pool.install(|| par_sum_f64(0, 100_000, f))
        };
        assert_eq!(seq.to_bits(), par.to_bits());
    }
}
