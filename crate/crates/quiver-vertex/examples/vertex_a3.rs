//! The normalized A3 vertex against its four-factor product.

use quiver_vertex::catalog::{self, phi_over};
use quiver_vertex::scalar::SamplePoint;
use quiver_vertex::verify::compare_series;
use quiver_vertex::vertex::{vertex, VertexOptions};

fn main() {
    let p = catalog::a3_point();
    let order = 4;
    for seed in 1..=3 {
        let s = SamplePoint::new(seed, &p.framing_vars());
        let v = vertex(&p, &VertexOptions::new(order).normalized(true), &s).unwrap();
        let rhs = phi_over(&catalog::a3_product(), 3, order, &s).unwrap();
        let bad = compare_series(&v, &rhs, seed);
        println!("seed {seed}: {} terms, {} mismatches", v.len(), bad.len());
        if seed == 1 {
            println!("{v}");
        }
    }
}
