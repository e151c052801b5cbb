//! Vertex factorization over positive real roots for the zero-dimensional
//! catalog entries, in both forms.

use quiver_vertex::catalog;
use quiver_vertex::verify::{check_zero_dim_conjecture, ConjectureForm};

fn main() {
    for name in ["a3", "gr22", "d4", "d7"] {
        let p = catalog::builtin_point(name).unwrap();
        for form in [ConjectureForm::Primary, ConjectureForm::Dual] {
            let r = check_zero_dim_conjecture(&p, 4, &[1, 2], form);
            println!("{name} {form:?}: {}", r.summary());
        }
    }
}
