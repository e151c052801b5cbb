//! Factorization of slant-sum vertices: D4 in general, and the q = ħ form
//! on the gr22-m2 catalog entry.

use quiver_vertex::catalog;
use quiver_vertex::verify::{
    check_branching, check_factorization, factorization_premises, FactorizationVariant,
};
use quiver_vertex::vertex::DescendantShift;

fn main() {
    let d4 = catalog::d4_instance();
    println!(
        "{}",
        check_branching(&d4, 4, &[1], DescendantShift::Inverse).summary()
    );
    for normalized in [false, true] {
        let r = check_factorization(
            &d4,
            FactorizationVariant::General,
            4,
            &[1, 2],
            DescendantShift::Inverse,
            normalized,
        );
        println!("normalized {normalized}: {}", r.summary());
    }

    let m2 = catalog::gr22_m2_instance();
    for v in [FactorizationVariant::General, FactorizationVariant::QEqualsHbar] {
        println!(
            "gr22-m2 {v:?} premises failing: {:?}",
            factorization_premises(&m2, v)
        );
    }
    let r = check_factorization(
        &m2,
        FactorizationVariant::QEqualsHbar,
        3,
        &[1, 2],
        DescendantShift::Inverse,
        false,
    );
    println!("{}", r.summary());
}
