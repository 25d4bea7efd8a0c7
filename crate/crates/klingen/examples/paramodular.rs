//! Paramodular pullback checks: exact coincidence with the Siegel sum at
//! N = 1, and weight-(k,k) invariance of the level-2 sum, fed by a
//! coefficient file written and re-ingested on the fly.
//!
//! ```bash
//! cargo run --release --example paramodular
//! ```

use klingen::evaluator::TruncationParams;
use klingen::qseries::{ingest_coefficients, newform_level2_weight8};
use klingen::report::verify_para_properties;

fn main() {
    // N = 1: the paramodular and Siegel sums are the same object
    let params = TruncationParams::default();
    let r1 = verify_para_properties(12, 1, None, &params, 1e-6).unwrap();
    println!("[{}] {}", if r1.pass { "PASS" } else { "FAIL" }, r1.claim);
    for line in &r1.conventions {
        if line.contains("coincidence") {
            println!("    {line}");
        }
    }

    // N = 2: write the eta-product newform to the documented file format,
    // ingest it back, and run the invariance checks on the ingested copy
    let f = newform_level2_weight8(512);
    let mut text = String::from("# (eta(z) eta(2z))^8, the weight-8 level-2 newform\n");
    text.push_str("weight 8 level 2 order 511 character trivial\n");
    for n in 1..512 {
        text.push_str(&format!("{n} {}\n", f.coeff(n)));
    }
    let dir = std::env::temp_dir().join("klingen-paramodular-example");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("newform-8-2.txt");
    std::fs::write(&path, text).unwrap();
    let (spec, ingested) = ingest_coefficients(&path).unwrap();
    println!("\ningested {} (weight {}, level {}, {} coefficients)", path.display(), spec.weight, spec.level, ingested.order() - 1);
    assert_eq!(ingested.coeffs(), f.coeffs());

    let params2 = TruncationParams { coset_height: 80, ..params };
    let r2 = verify_para_properties(8, 2, Some(&ingested), &params2, 1e-6).unwrap();
    println!("[{}] {}", if r2.pass { "PASS" } else { "FAIL" }, r2.claim);
    for line in &r2.conventions {
        if line.contains("rel err") {
            println!("    {line}");
        }
    }
    assert!(r1.pass && r2.pass);
}
