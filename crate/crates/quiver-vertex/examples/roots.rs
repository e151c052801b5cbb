//! Real roots, the extremal word and the dual tangent character of the A3
//! catalog theory.

use quiver_vertex::catalog;
use quiver_vertex::kacmoody::{
    dim_identity_check, dual_tangent_character, extremal_word, positive_real_roots, quiver_variety_dim,
};

fn main() {
    let t = catalog::a3_theory();
    let ctx = t.weight_context();
    let roots: Vec<String> = positive_real_roots(&ctx.cartan, 3)
        .iter()
        .map(|r| r.display())
        .collect();
    println!("positive roots: {}", roots.join(", "));

    let r = extremal_word(&ctx);
    println!("word {:?}, in orbit: {}", r.word, r.in_orbit);
    for (a, p) in &r.roots {
        println!("  {}: (α, μ) = {p}", a.display());
    }
    println!(
        "dim = {}, identity holds: {}",
        quiver_variety_dim(&ctx),
        dim_identity_check(&ctx)
    );

    let terms = dual_tangent_character(&ctx).unwrap();
    let shown: Vec<String> = terms.iter().map(|t| t.display()).collect();
    println!("tangent character ({} terms): {}", terms.len(), shown.join(" + "));
}
