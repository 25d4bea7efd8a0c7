//! The three L-value engines and their tail bounds.
//!
//! ```bash
//! cargo run --release --example lvalues
//! ```

use klingen::lfunctions::{dirichlet_l_exact, dirichlet_l_numeric, phi_scalar, rankin_naive, sym2_l};
use klingen::qseries::eigenform_coeffs_f64;
use klingen::quadforms::{disc_split, theta_coeffs, theta_envelope, HalfIntMatrix};

fn main() {
    println!("exact Dirichlet L-values (functional equation + generalized Bernoulli):");
    for (d, s) in [(-4i64, 1u32), (-4, 11), (-3, 11), (-8, 7)] {
        let l = dirichlet_l_exact(d, s).unwrap();
        println!("  L({s}, chi_{d}) = {} pi^{} sqrt({})  ~ {:.15}", l.coeff, l.pi_power, l.radical, l.to_f64());
    }

    println!("\nexact against the partial sum:");
    for (d, s) in [(-4i64, 11u32), (-3, 7)] {
        let exact = dirichlet_l_exact(d, s).unwrap().to_f64();
        let num = dirichlet_l_numeric(d, s as f64, 100_000);
        println!(
            "  D={d} s={s}: partial {:.15}  |diff| {:.1e}  tail bound {:.1e}",
            num.value,
            (num.value - exact).abs(),
            num.tail_bound
        );
    }

    let k = 12u64;
    let a = eigenform_coeffs_f64(k, 100_000).unwrap();

    println!("\nRankin convolutions against theta series at s = k-1:");
    for t in [HalfIntMatrix::new(1, 0, 1), HalfIntMatrix::new(1, 1, 1), HalfIntMatrix::new(1, 0, 3)] {
        let b = theta_coeffs(&t, 100_001).unwrap();
        let r = rankin_naive(&a, &b, theta_envelope(&t), k as f64 - 1.0, 1, k, 100_000).unwrap();
        println!("  T = ({},{},{}): {:.15}  (tail {:.1e})", t.n1, t.b, t.n2, r.value, r.tail_bound);
    }

    println!("\nv^2-twist scalars for T = diag(1,3) (det 12 = 2^2 * 3):");
    let split = disc_split(&HalfIntMatrix::new(1, 0, 3)).unwrap();
    for v in [1u64, 2] {
        println!("  phi scalar at v = {v}: {}", phi_scalar(&split, v, k).unwrap());
    }

    let s2 = sym2_l(&a, k, 2.0 * k as f64 - 2.0, 1_000).unwrap();
    println!("\nSym^2 at s = 2k-2: {:.15}  (tail {:.1e})", s2.value, s2.tail_bound);
}
