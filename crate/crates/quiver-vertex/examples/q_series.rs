//! Pochhammer symbols and `Φ(um)/Φ(m)` expansions at a sample point.

use quiver_vertex::scalar::{format_rational, pochhammer, rat, Monomial, SamplePoint, Scalar};
use quiver_vertex::series::phi_ratio_series;

fn main() {
    let q = rat(2, 3);
    let x = Scalar::new(rat(5, 7));
    for k in [-2, 0, 1, 3] {
        println!("(5/7; 2/3)_{k} = {}", pochhammer(&x, k, &q));
    }

    let s = SamplePoint::new(1, &[]);
    println!(
        "q = {}, ħ = {}",
        format_rational(s.q()),
        format_rational(s.hbar())
    );
    let m = &Monomial::kappa() * &Monomial::z(0);
    let series = phi_ratio_series(&Monomial::hbar(), &m, 1, 4, &s).unwrap();
    println!("Φ(ħκz)/Φ(κz) = {series}");
}
