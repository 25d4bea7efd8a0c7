//! Exact q-expansions: Eisenstein series, Delta, the built-in eigenforms,
//! and Hecke operators acting on them.
//!
//! ```bash
//! cargo run --example qexpansions
//! ```

use klingen::arith::divisor_sum;
use klingen::qseries::{delta_qexp, eigenform, eisenstein_qexp, hecke_apply, BUILTIN_WEIGHTS};
use num_bigint::BigInt;
use num_integer::Integer;

fn main() {
    let e4 = eisenstein_qexp(4, 6).unwrap();
    let e12 = eisenstein_qexp(12, 6).unwrap();
    println!("E_4  = {:?}", e4.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>());
    println!("E_12 = {:?}", e12.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>());

    let delta = delta_qexp(16);
    println!("\ntau(n) for n <= 15:");
    println!("  {:?}", delta.coeffs()[1..].iter().map(|c| c.to_string()).collect::<Vec<_>>());

    println!("\nnormalized eigenforms a(2), a(3) by weight:");
    for k in BUILTIN_WEIGHTS {
        let f = eigenform(k, 4).unwrap();
        println!("  k = {k}: a(2) = {:>8}, a(3) = {:>10}", f.coeff(2).to_string(), f.coeff(3).to_string());
    }

    // Delta is a T_2 eigenform with eigenvalue tau(2) = -24
    let t2 = hecke_apply(&delta, 2, 8).unwrap();
    println!("\n(T_2 Delta)(n) / Delta(n) for n = 1..7:");
    let ratios: Vec<String> = (1..8).map(|n| (t2.coeff(n) / delta.coeff(n)).to_string()).collect();
    println!("  {ratios:?}");

    // Ramanujan: tau(n) = sigma_11(n) mod 691
    let d200 = delta_qexp(201);
    let m = BigInt::from(691);
    let ok = (1..=200u64)
        .all(|n| d200.coeff(n as usize).numer().mod_floor(&m) == divisor_sum(11, n).mod_floor(&m));
    println!("\ntau(n) = sigma_11(n) mod 691 for n <= 200: {ok}");
}
