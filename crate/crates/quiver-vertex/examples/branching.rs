//! Branching of the full-flag vertex: T*Fl(n) as T*Gr(n-1,n) slant-summed
//! with T*Fl(n-1).

use quiver_vertex::verify::check_ruijsenaars;

fn main() {
    for (n, order) in [(2, 5), (3, 4)] {
        println!("{}", check_ruijsenaars(n, order, &[1, 2]).summary());
    }
}
