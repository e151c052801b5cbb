//! Two slant sums onto D7 and the sixteen-factor product of the result.

use quiver_vertex::catalog::{self, phi_over};
use quiver_vertex::scalar::SamplePoint;
use quiver_vertex::verify::{check_factorization, compare_series, FactorizationVariant};
use quiver_vertex::vertex::{vertex, DescendantShift, VertexOptions};

fn main() {
    let order = 3;
    let (first, second) = catalog::d7_double_instances().unwrap();
    for inst in [&first, &second] {
        let r = check_factorization(
            inst,
            FactorizationVariant::General,
            order,
            &[1],
            DescendantShift::Inverse,
            true,
        );
        println!("{}", r.summary());
    }
    let p = second.sum_point().unwrap();
    let s = SamplePoint::new(1, &p.framing_vars());
    let v = vertex(&p, &VertexOptions::new(order).normalized(true), &s).unwrap();
    let rhs = phi_over(&catalog::d7_double_product(), p.theory.n(), order, &s).unwrap();
    println!(
        "direct vs product: {} mismatches",
        compare_series(&v, &rhs, 1).len()
    );
}
