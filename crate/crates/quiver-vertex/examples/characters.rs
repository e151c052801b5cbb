//! Graded character series and convolution tangent characters.

use quiver_vertex::catalog;
use quiver_vertex::kacmoody::{convolution_tangent_character, gt_character};

fn main() {
    let t = catalog::a3_theory();
    println!("A3: {}", gt_character(&t.weight_context(), 3).unwrap());
    let t = catalog::gr22_point().theory;
    println!("Gr(2,2): {}", gt_character(&t.weight_context(), 3).unwrap());

    let a3 = catalog::a3_theory();
    let comps = vec![(vec![1, 0, 0], vec![1, 1, 0]), (vec![0, 0, 1], vec![0, 1, 1])];
    let terms = convolution_tangent_character(&a3.cartan(), &comps).unwrap();
    let shown: Vec<String> = terms.iter().map(|t| t.display()).collect();
    println!("convolution ({} terms): {}", terms.len(), shown.join(" + "));
}
