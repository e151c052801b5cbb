//! Built-in theories, fixed points and closed-form products.
//!
//! Kähler variables are written 1-based here (`z1` is `Monomial::z(0)`).

use crate::error::{Error, Result};
use crate::fixed::{builder_tstar_grassmannian, zero_dim_point, Chamber, FixedPointData};
use crate::scalar::{Monomial, SamplePoint};
use crate::series::{phi_product, TruncatedSeries};
use crate::theory::{slant_sum, QuiverGaugeTheory, SlantSumSpec};
use crate::verify::{flag_instance, SlantSumInstance};

/// Names accepted by [`builtin_point`].
pub const BUILTINS: &[&str] = &[
    "a3",
    "gr22",
    "gr12",
    "gr23",
    "d4",
    "d7",
    "d7-double",
    "flag3",
    "gr22-m2",
];

/// `κ^k z_{i₁} z_{i₂} ⋯` with 1-based indices (repeat an index for powers).
pub fn km(k: i64, zs: &[usize]) -> Monomial {
    let mut m = Monomial::kappa().pow(k);
    for &i in zs {
        m = &m * &Monomial::z(i - 1);
    }
    m
}

/// `∏_m Φ(ħ m)/Φ(m)`.
pub fn phi_over(ms: &[Monomial], nvars: usize, order: u32, sample: &SamplePoint) -> Result<TruncatedSeries> {
    let factors: Vec<(Monomial, Monomial)> = ms.iter().map(|m| (Monomial::hbar(), m.clone())).collect();
    phi_product(&factors, nvars, order, sample)
}

pub fn a3_theory() -> QuiverGaugeTheory {
    QuiverGaugeTheory::simple(&[(1, 2), (2, 3)], &[1, 2, 1], &[0, 1, 0]).expect("a3")
}

pub fn a3_point() -> FixedPointData {
    zero_dim_point(&a3_theory()).expect("a3 point")
}

/// `κ z2, z1 z2, κ² z2 z3, κ z1 z2 z3`.
pub fn a3_product() -> Vec<Monomial> {
    vec![km(1, &[2]), km(0, &[1, 2]), km(2, &[2, 3]), km(1, &[1, 2, 3])]
}

/// `T*Gr(2,2)`: one vertex with `v = w = 2`.
pub fn gr22_point() -> FixedPointData {
    builder_tstar_grassmannian(2, 2, &[1, 2]).expect("gr22")
}

/// `κ² z, κ z`.
pub fn gr22_product() -> Vec<Monomial> {
    vec![km(2, &[1]), km(1, &[1])]
}

pub fn gr12_point() -> FixedPointData {
    builder_tstar_grassmannian(1, 2, &[1]).expect("gr12")
}

pub fn gr23_point() -> FixedPointData {
    builder_tstar_grassmannian(2, 3, &[1, 2]).expect("gr23")
}

/// `A3 #_{2,1} T*Gr(2,2)`, a `D4` theory.
pub fn d4_instance() -> SlantSumInstance {
    let spec = SlantSumSpec::by_labels(a3_theory(), "2", gr22_point().theory, "1").expect("d4 spec");
    SlantSumInstance::new(spec, a3_point(), Chamber::identity(2), gr22_point())
}

/// The `D4` product as composed from its constituents: every `A3` factor
/// with `z2 ↦ z2 z4`, times the `T*Gr(2,2)` factors in `z4`.
pub fn d4_product() -> Vec<Monomial> {
    vec![
        km(1, &[2, 4]),
        km(0, &[1, 2, 4]),
        km(2, &[2, 3, 4]),
        km(1, &[1, 2, 3, 4]),
        km(2, &[4]),
        km(1, &[4]),
    ]
}

/// The `D4` product with one more `κ` on each factor from `A3`.
pub fn d4_product_shifted() -> Vec<Monomial> {
    vec![
        km(2, &[2, 4]),
        km(1, &[1, 2, 4]),
        km(3, &[2, 3, 4]),
        km(2, &[1, 2, 3, 4]),
        km(2, &[4]),
        km(1, &[4]),
    ]
}

/// `D7` with arrows `1→2→3→4→5`, `5→6`, `5→7`, `v = (1,1,1,2,3,2,2)` and
/// one framing at vertex 7.
pub fn d7_theory() -> QuiverGaugeTheory {
    QuiverGaugeTheory::simple(
        &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (5, 7)],
        &[1, 1, 1, 2, 3, 2, 2],
        &[0, 0, 0, 0, 0, 0, 1],
    )
    .expect("d7")
}

pub fn d7_point() -> FixedPointData {
    zero_dim_point(&d7_theory()).expect("d7 point")
}

/// The twelve factors of the `D7` vertex.
pub fn d7_product() -> Vec<Monomial> {
    vec![
        km(0, &[1]),
        km(2, &[6]),
        km(0, &[1, 2]),
        km(1, &[5, 6]),
        km(0, &[4, 5, 6]),
        km(3, &[5, 6, 7]),
        km(2, &[4, 5, 6, 7]),
        km(1, &[4, 5, 5, 6, 7]),
        km(-1, &[1, 2, 3, 4, 5, 6]),
        km(1, &[1, 2, 3, 4, 5, 6, 7]),
        km(0, &[1, 2, 3, 4, 5, 5, 6, 7]),
        km(-1, &[1, 2, 3, 4, 4, 5, 5, 6, 7]),
    ]
}

/// The sixteen factors of `(D7 #_{6} T*Gr(2,2)) #_{7} T*Gr(2,2)`, with
/// `z8`, `z9` for the two added vertices.
pub fn d7_double_product() -> Vec<Monomial> {
    vec![
        km(0, &[1]),
        km(2, &[6, 8]),
        km(0, &[1, 2]),
        km(1, &[5, 6, 8]),
        km(0, &[4, 5, 6, 8]),
        km(3, &[5, 6, 7, 8, 9]),
        km(2, &[4, 5, 6, 7, 8, 9]),
        km(1, &[4, 5, 5, 6, 7, 8, 9]),
        km(-1, &[1, 2, 3, 4, 5, 6, 8]),
        km(1, &[1, 2, 3, 4, 5, 6, 7, 8, 9]),
        km(0, &[1, 2, 3, 4, 5, 5, 6, 7, 8, 9]),
        km(-1, &[1, 2, 3, 4, 4, 5, 5, 6, 7, 8, 9]),
        km(1, &[8]),
        km(2, &[8]),
        km(1, &[9]),
        km(2, &[9]),
    ]
}

/// The two slant sums building the double `D7` theory: first at the
/// unframed spin vertex 6, then at the framed spin vertex 7.
pub fn d7_double_instances() -> Result<(SlantSumInstance, SlantSumInstance)> {
    let gr = gr22_point();
    let spec1 = SlantSumSpec::by_labels(d7_theory(), "6", gr.theory.clone(), "1")?;
    let inst1 = SlantSumInstance::new(spec1, d7_point(), Chamber::identity(2), gr.clone());
    let p1 = inst1.sum_point()?;
    let spec2 = SlantSumSpec::by_labels(p1.theory.clone(), "1.7", gr.theory.clone(), "1")?;
    let inst2 = SlantSumInstance::new(spec2, p1, Chamber::identity(2), gr);
    Ok((inst1, inst2))
}

/// `T*Fl(3) = T*Gr(2,3) # T*Gr(1,2)` at the identity point.
pub fn flag3_instance() -> SlantSumInstance {
    flag_instance(3).expect("flag3")
}

/// `T*Gr(2,2) #_{1,s} M` with `M` the chain `s → u`, `v = (2,1)`,
/// `w = (2,1)`, at the point `𝒱_s = {a_{s,1}, a_{s,2}}`, `𝒱_u = {a_{u,1}}`.
/// Its second tangent space depends on the `s` framing, so only the `q = ħ`
/// factorization applies.
pub fn gr22_m2_instance() -> SlantSumInstance {
    let t2 = QuiverGaugeTheory::new(
        vec!["s".into(), "u".into()],
        vec![(0, 1)],
        vec![2, 1],
        vec![2, 1],
        vec![1, 1],
    )
    .expect("m2");
    let a = |v: &str, k| Monomial::a(crate::scalar::FramingVar::new(v, k));
    let p2 =
        FixedPointData::new(t2.clone(), vec![vec![a("s", 1), a("s", 2)], vec![a("u", 1)]]).expect("m2 point");
    let spec = SlantSumSpec::by_labels(gr22_point().theory, "1", t2, "s").expect("gr22-m2 spec");
    SlantSumInstance::new(spec, gr22_point(), Chamber::identity(2), p2)
}

/// A fixed point by builtin name. Slant sums give their sum point.
pub fn builtin_point(name: &str) -> Result<FixedPointData> {
    match name {
        "a3" => Ok(a3_point()),
        "gr22" => Ok(gr22_point()),
        "gr12" => Ok(gr12_point()),
        "gr23" => Ok(gr23_point()),
        "d4" => d4_instance().sum_point(),
        "d7" => Ok(d7_point()),
        "d7-double" => d7_double_instances()?.1.sum_point(),
        "flag3" => flag3_instance().sum_point(),
        "gr22-m2" => gr22_m2_instance().sum_point(),
        _ => Err(Error::Usage(format!(
            "unknown builtin `{name}` (known: {})",
            BUILTINS.join(", ")
        ))),
    }
}

pub fn builtin_theory(name: &str) -> Result<QuiverGaugeTheory> {
    match name {
        "d4" => slant_sum(&d4_instance().spec),
        _ => builtin_point(name).map(|p| p.theory),
    }
}

/// The slant-sum instance behind a builtin, when it has one.
pub fn builtin_instance(name: &str) -> Result<SlantSumInstance> {
    match name {
        "d4" => Ok(d4_instance()),
        "d7-double" => Ok(d7_double_instances()?.1),
        "flag3" => Ok(flag3_instance()),
        "gr22-m2" => Ok(gr22_m2_instance()),
        _ => Err(Error::Usage(format!("`{name}` is not a slant sum"))),
    }
}

/// The closed-form product of a builtin zero-dimensional theory.
pub fn builtin_product(name: &str) -> Option<Vec<Monomial>> {
    match name {
        "a3" => Some(a3_product()),
        "gr22" => Some(gr22_product()),
        "d4" => Some(d4_product()),
        "d7" => Some(d7_product()),
        "d7-double" => Some(d7_double_product()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed::validate_fixed_point;
    use crate::scalar::FramingVar;

    #[test]
    fn builtins_validate() {
        for name in BUILTINS {
            let p = builtin_point(name).unwrap();
            assert!(validate_fixed_point(&p).passed(), "{name}");
        }
    }

    #[test]
    fn a3_point_characters() {
        let p = a3_point();
        let a = Monomial::a(FramingVar::new("2", 1));
        let ah = &a * &Monomial::hbar();
        assert_eq!(p.chars[0], vec![ah.clone()]);
        let mut mid = p.chars[1].clone();
        mid.sort();
        let mut want = vec![a.clone(), ah];
        want.sort();
        assert_eq!(mid, want);
        assert_eq!(p.chars[2], vec![a]);
    }

    #[test]
    fn double_theory_shape() {
        let t = builtin_theory("d7-double").unwrap();
        assert_eq!(t.n(), 9);
        assert_eq!(t.v(), &[1, 1, 1, 2, 3, 2, 2, 2, 2]);
        assert_eq!(t.dim(), 0);
        assert_eq!(d7_double_product().len(), 16);
        assert_eq!(d7_product().len(), 12);
    }

    #[test]
    fn unknown_builtin() {
        assert!(builtin_point("e8").is_err());
    }

    #[test]
    fn d4_needs_the_limit_rule() {
        use crate::vertex::{vertex, Regularization, VertexOptions};
        let p = builtin_point("d4").unwrap();
        let s = SamplePoint::new(2, &p.framing_vars());
        let rhs = phi_over(&d4_product(), 4, 3, &s).unwrap();
        let opts = VertexOptions::new(3).normalized(true);
        let limit = vertex(&p, &opts.clone().regularization(Regularization::Limit), &s).unwrap();
        assert_eq!(limit, rhs);
        let exact = vertex(&p, &opts.regularization(Regularization::Exact), &s).unwrap();
        assert_ne!(exact, rhs);
    }
}
