//! Twisted vertices of T*Gr(1,2) and T*Gr(2,3) against the shifted untwisted
//! vertex.

use quiver_vertex::catalog;
use quiver_vertex::scalar::SamplePoint;
use quiver_vertex::verify::twisted_vs_shift_check;
use quiver_vertex::vertex::{vertex, Twist, VertexOptions};

fn main() {
    let p = catalog::gr12_point();
    let mut sigma = Twist::zero(&p.theory);
    sigma.0[0][0] = 1;
    let s = SamplePoint::new(4, &p.framing_vars());
    let v = vertex(&p, &VertexOptions::new(3).twist(sigma.clone()), &s).unwrap();
    println!("twisted Gr(1,2) vertex: {v}");
    println!("{}", twisted_vs_shift_check(&p, &sigma, 4, &[1, 2]).summary());

    let p = catalog::gr23_point();
    let mut sigma = Twist::zero(&p.theory);
    sigma.0[0][2] = 1;
    println!("{}", twisted_vs_shift_check(&p, &sigma, 4, &[1, 2]).summary());
}
