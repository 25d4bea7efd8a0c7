//! The critical L-value identity at Fourier index (1,1):
//!
//! `4/zeta(1-k) + A_f(1,1)` equals
//! `2 + C [ 2^{2k-3} L(k-1,chi_-4) L(k-1,f(x)theta_1)
//!        + 2*3^{k-3/2} L(k-1,chi_-3) L(k-1,f(x)theta_2) ] / L(2k-2,Sym^2 f)`
//!
//! with `C = (-1)^{k/2} (k-1)! (2pi)^{k-1} / (2k-2)!`. Every ingredient is
//! printed along the way.
//!
//! ```bash
//! cargo run --release --example critical_lvalue_identity
//! ```

use klingen::evaluator::{extract_af, TruncationParams};
use klingen::lfunctions::{dirichlet_l_exact, rankin_naive, sym2_l};
use klingen::qseries::{eigenform, eigenform_coeffs_f64};
use klingen::quadforms::{theta_coeffs, theta_envelope, HalfIntMatrix};
use klingen::report::verify_cor13;

fn main() {
    let k = 12u64;
    let cutoff = 100_000;
    let a = eigenform_coeffs_f64(k, cutoff).unwrap();

    let l4 = dirichlet_l_exact(-4, k as u32 - 1).unwrap();
    let l3 = dirichlet_l_exact(-3, k as u32 - 1).unwrap();
    println!("L({}, chi_-4) = {} pi^{}            ~ {:.12}", k - 1, l4.coeff, l4.pi_power, l4.to_f64());
    println!("L({}, chi_-3) = {} pi^{} sqrt({})  ~ {:.12}", k - 1, l3.coeff, l3.pi_power, l3.radical, l3.to_f64());

    for (name, t) in [("theta_1", HalfIntMatrix::new(1, 0, 1)), ("theta_2", HalfIntMatrix::new(1, 1, 1))] {
        let b = theta_coeffs(&t, cutoff + 1).unwrap();
        let r = rankin_naive(&a, &b, theta_envelope(&t), k as f64 - 1.0, 1, k, cutoff).unwrap();
        println!("L({}, f (x) {name})  ~ {:.12}   (tail {:.1e})", k - 1, r.value, r.tail_bound);
    }
    let s = sym2_l(&a, k, 2.0 * k as f64 - 2.0, 1_000).unwrap();
    println!("L({}, Sym^2 f)     ~ {:.12}   (tail {:.1e})", 2 * k - 2, s.value, s.tail_bound);

    let params = TruncationParams { grid_size: 8, ..Default::default() };
    let f = eigenform(k, params.qexp_order).unwrap();
    let (af, est) = extract_af(&f, 1, 1, 1.2, 1.2, &params).unwrap();
    println!("A_f(1,1)           ~ {af:.12}   (estimate {est:.1e})");
    println!();

    let report = verify_cor13(k, &params, cutoff, 1_000, 1.2, 1e-5).unwrap();
    println!("lhs = {:.15e}", report.lhs.re);
    println!("rhs = {:.15e}", report.rhs.re);
    println!("rel_err = {:.3e}  (tolerance {:.0e})  pass = {}", report.rel_err, report.tolerance, report.pass);
    assert!(report.pass);
}
