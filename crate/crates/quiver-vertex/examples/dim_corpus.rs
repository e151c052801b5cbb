//! Dimension identity and tangent term counts on a generated corpus.

use quiver_vertex::verify::{check_dim_corpus, generate_corpus};

fn main() {
    for inst in generate_corpus(3, 7) {
        println!(
            "arrows {:?}, w {:?}, v {:?}, word {:?}",
            inst.arrows, inst.w, inst.v, inst.word
        );
    }
    println!("{}", check_dim_corpus(50, 7).summary());
}
