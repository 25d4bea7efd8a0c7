//! The coefficient identity for coprime (n1, n2): the L-value sum over
//! `Lambda(n1, n2)` against the pullback data
//! `C (2/zeta(1-k) [a(n1) sigma_{k-1}(n2) + a(n2) sigma_{k-1}(n1)] + A_f(n1, n2))`.
//!
//! ```bash
//! cargo run --release --example coefficient_identity
//! ```

use klingen::evaluator::TruncationParams;
use klingen::quadforms::{disc_split, lambda_set};
use klingen::report::verify_cor14;

fn main() {
    let k = 12;
    for (n1, n2) in [(1u32, 2u32), (2, 3)] {
        println!("Lambda({n1},{n2}):");
        for t in lambda_set(n1 as u64, n2 as u64) {
            match disc_split(&t) {
                Ok(s) => println!(
                    "  T = ({}, {}, {}): det(2T) = {} = {}^2 * {}",
                    t.n1,
                    t.b,
                    t.n2,
                    t.det2t(),
                    s.f_t,
                    s.delta_t
                ),
                Err(_) => println!("  T = ({}, {}, {}): singular", t.n1, t.b, t.n2),
            }
        }
        let params = TruncationParams { grid_size: 16, ..Default::default() };
        let report = verify_cor14(k, n1, n2, &params, 100_000, 1_000, 1.2, 1e-4).unwrap();
        println!("  lhs = {:+.15e}", report.lhs.re);
        println!("  rhs = {:+.15e}", report.rhs.re);
        println!("  rel_err = {:.3e}  pass = {}", report.rel_err, report.pass);
        assert!(report.pass);
        println!();
    }
}
