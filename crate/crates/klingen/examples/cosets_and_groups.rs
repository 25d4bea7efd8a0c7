//! Exact group data for Sp(4): double-coset representatives, the block
//! matrices eps_{c,d}, paramodular membership, the lattice-shift matrix
//! L_N and the H_{1,1} embedding.
//!
//! ```bash
//! cargo run --example cosets_and_groups
//! ```

use klingen::symplectic::{
    coset_reps, double_coset_reps, embed_h11, epsilon_cd, l_matrix, Group4, Mat2Z,
};

fn main() {
    let [one, s1, r] = double_coset_reps();
    println!("double coset representatives (similitude, Sp4Z membership):");
    for (name, g) in [("1", &one), ("s1", &s1), ("r", &r)] {
        println!("  {name}: similitude {}, in Sp(4,Z): {}", g.similitude().unwrap(), g.is_member(Group4::Sp4Z));
    }

    println!("\neps_(c,d) for small coprime pairs (always symplectic):");
    for (c, d) in [(1i64, 0i64), (1, 2), (2, 3), (3, -5)] {
        let e = epsilon_cd(c, d).unwrap();
        let row = |i: usize| {
            (0..4).map(|j| e.entry(i, j).to_string()).collect::<Vec<_>>().join(" ")
        };
        println!("  ({c},{d}): rows [{} | {} | {} | {}]  Sp4Z: {}", row(0), row(1), row(2), row(3), e.is_member(Group4::Sp4Z));
    }

    println!("\ncoset representatives of Gamma_infty \\ Gamma_0^2(2), height 3:");
    for rep in coset_reps(2, 3) {
        let (a, b, c, d) = rep.matrix.entries_i64().unwrap();
        println!("  {a:>2} {b:>2} {c:>2} {d:>2}");
    }

    println!("\nL_N and paramodular membership:");
    for n in [1u32, 2, 3] {
        let l = l_matrix(n);
        println!(
            "  L_{n}: similitude {}; in K({}) = {}",
            l.similitude().unwrap(),
            n * n,
            l.is_member(Group4::ParamodularK(n * n))
        );
    }

    println!("\nH_(1,1) embedding of (S, S):");
    let s = Mat2Z::from_i64(0, 1, -1, 0);
    let e = embed_h11(&s, &s).unwrap();
    println!("  in Sp(4,Z): {}", e.is_member(Group4::Sp4Z));
    println!("  in Gamma_0^4(2) for level-2 diagonal pairs: {}", {
        let g = Mat2Z::from_i64(1, 0, 2, 1);
        embed_h11(&g, &g).unwrap().is_member(Group4::Gamma0Siegel(2))
    });
}
