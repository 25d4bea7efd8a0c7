//! Binary quadratic forms: index sets, discriminant splits, singular
//! reduction and theta representation numbers.
//!
//! ```bash
//! cargo run --example theta_forms
//! ```

use klingen::quadforms::{
    disc_split, lambda_set, reduce_singular, theta_coeffs, unimodular_transform, HalfIntMatrix,
};
use klingen::symplectic::Mat2Z;

fn main() {
    println!("Lambda(2,3) with discriminant data:");
    for t in lambda_set(2, 3) {
        let det = t.det2t();
        match disc_split(&t) {
            Ok(s) => println!("  b = {:+}: det(2T) = {det:>2} = {}^2 * {}", t.b, s.f_t, s.delta_t),
            Err(_) => {
                println!("  b = {:+}: det(2T) = {det:>2}, content {}", t.b, reduce_singular(&t).unwrap())
            }
        }
    }

    println!("\ntheta series of the square and hexagonal lattices:");
    let t1 = HalfIntMatrix::new(1, 0, 1);
    let t2 = HalfIntMatrix::new(1, 1, 1);
    println!("  theta_1: {:?}", theta_coeffs(&t1, 13).unwrap());
    println!("  theta_2: {:?}", theta_coeffs(&t2, 13).unwrap());

    // two-squares: b(n) = 4 (d_1(n) - d_3(n))
    let b = theta_coeffs(&t1, 26).unwrap();
    let classical: Vec<i64> = (0..26)
        .map(|n| {
            if n == 0 {
                1
            } else {
                4 * (1..=n).filter(|d| n % d == 0).map(|d| match d % 4 {
                    1 => 1,
                    3 => -1,
                    _ => 0,
                }).sum::<i64>()
            }
        })
        .collect();
    println!("  matches 4(d_1 - d_3): {}", b == classical);

    println!("\nunimodular invariance:");
    let u = Mat2Z::from_i64(2, 1, 1, 1);
    let t = HalfIntMatrix::new(1, 0, 3);
    let tu = unimodular_transform(&t, &u).unwrap();
    println!("  T = ({},{},{}) ~ U^t T U = ({},{},{})", t.n1, t.b, t.n2, tu.n1, tu.b, tu.n2);
    println!("  dets {} = {}", t.det2t(), tu.det2t());
    println!("  theta coefficients equal: {}", theta_coeffs(&t, 40).unwrap() == theta_coeffs(&tu, 40).unwrap());
    println!("  common reduced class: {:?}", t.reduced_class());
}
