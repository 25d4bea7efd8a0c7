//! Fourier coefficients A(T, f) of the Klingen lift.
//!
//! Shows the three branches: zero matrix, singular matrices (where the
//! coefficient is an elliptic one), and definite matrices (the L-value
//! formula), including an imprimitive class handled by the Hecke content
//! recursion.
//!
//! ```bash
//! cargo run --release --example klingen_coefficients
//! ```

use klingen::evaluator::{KlingenEvaluator, LSeriesCutoffs};
use klingen::qseries::delta_qexp;
use klingen::quadforms::{lambda_set, HalfIntMatrix};

fn main() {
    let f = delta_qexp(512);
    let mut ev = KlingenEvaluator::new(&f, LSeriesCutoffs::default()).unwrap();

    println!("A(T, Delta) over Lambda(1,1)  [the five matrices behind the (1,1) identity]:");
    for t in lambda_set(1, 1) {
        let a = ev.coeff(&t).unwrap();
        println!("  ({}, {:+}, {})  det(2T) = {}:  A = {:+.12e}  (bound {:.1e})", t.n1, t.b, t.n2, t.det2t(), a.val, a.err);
    }

    println!("\nsingular matrices reduce to elliptic coefficients:");
    for t in [HalfIntMatrix::diag(1, 0), HalfIntMatrix::new(1, 2, 1), HalfIntMatrix::diag(3, 0)] {
        let a = ev.coeff(&t).unwrap();
        println!("  ({}, {:+}, {}):  A = {}  (= a(content))", t.n1, t.b, t.n2, a.val);
    }

    println!("\nan imprimitive class: T = 2 * diag(1,1), via the Hecke recursion");
    let d11 = ev.coeff(&HalfIntMatrix::diag(1, 1)).unwrap();
    let d22 = ev.coeff(&HalfIntMatrix::diag(2, 2)).unwrap();
    let lambda2 = -24.0 * (1.0 + 2f64.powi(10)); // a(2) (1 + 2^{k-2})
    println!("  A(diag(1,1))  = {:+.12e}", d11.val);
    println!("  A(diag(2,2))  = {:+.12e}", d22.val);
    println!("  lambda_2 A(diag(1,1)) - 2^10 A(diag(1,1)) = {:+.12e}", (lambda2 - 1024.0) * d11.val);
    assert!((d22.val - (lambda2 - 1024.0) * d11.val).abs() < 1e-6 * d22.val.abs());
}
