//! Slant sum of A3 and T*Gr(2,2) at the vertex of weight 2, on theories and
//! on fixed points.

use quiver_vertex::catalog;
use quiver_vertex::fixed::slant_sum_fixed_point;
use quiver_vertex::io;
use quiver_vertex::theory::{msver_exponents, slant_sum};

fn main() {
    let inst = catalog::d4_instance();
    let t = slant_sum(&inst.spec).unwrap();
    println!("vertices {:?}", t.labels());
    println!("arrows {:?}", t.arrows());
    println!("v = {:?}, w = {:?}, a = {:?}", t.v(), t.w(), msver_exponents(&t));

    let p = slant_sum_fixed_point(&inst.spec, &inst.p1, &inst.chamber, &inst.p2).unwrap();
    for (label, chars) in t.labels().iter().zip(&p.chars) {
        let shown: Vec<String> = chars.iter().map(|m| m.to_string()).collect();
        println!("  V_{label} = {{{}}}", shown.join(", "));
    }
    println!("{}", serde_json::to_string(&io::point_to_value(&p)).unwrap());
}
