//! Property suites shared by the `properties` tests and the acceptance run.

#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use quiver_vertex::catalog;
use quiver_vertex::fixed::FixedPointData;
use quiver_vertex::scalar::{pochhammer, rat, Monomial, SamplePoint, Scalar};
use quiver_vertex::series::{phi_ratio_series, TruncatedSeries};
use quiver_vertex::theory::msver_exponents;
use quiver_vertex::vertex::{vertex, LocalizationData, Localizer, VertexOptions};

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn nonzero_rational() -> impl Strategy<Value = quiver_vertex::Rational> {
    (1i64..30, 1i64..30, any::<bool>()).prop_map(|(n, d, neg)| rat(if neg { -n } else { n }, d))
}

/// `q` away from roots of unity.
fn base() -> impl Strategy<Value = quiver_vertex::Rational> {
    nonzero_rational().prop_filter("|q| ≠ 1", |q| q.numer().magnitude() != q.denom().magnitude())
}

fn series(nvars: usize, order: u32) -> impl Strategy<Value = TruncatedSeries> {
    prop::collection::vec((prop::collection::vec(0u32..=order, nvars), -6i64..7), 0..8).prop_map(
        move |terms| {
            let mut s = TruncatedSeries::zero(nvars, order);
            for (e, c) in terms {
                if e.iter().sum::<u32>() <= order {
                    s.add_term(e, Scalar::int(c));
                }
            }
            s
        },
    )
}

/// `(x)_{k+m} = (x)_k (x q^k)_m`.
pub fn pochhammer_cocycle(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(
            &(nonzero_rational(), base(), -6i64..=6, -6i64..=6),
            |(x, q, k, m)| {
                let x = Scalar::new(x);
                let lhs = pochhammer(&x, k + m, &q);
                let shifted = &x * &Scalar::new(q.clone()).pow(k);
                let rhs = &pochhammer(&x, k, &q) * &pochhammer(&shifted, m, &q);
                prop_assume!(!lhs.pole && !rhs.pole);
                prop_assert_eq!(lhs, rhs);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

fn small_unit() -> impl Strategy<Value = Monomial> {
    (-2i64..=2, -2i64..=2).prop_map(|(i, j)| &Monomial::q().pow(i) * &Monomial::hbar().pow(j))
}

/// `Φ(um)/Φ(m) · Φ(u'um)/Φ(um) = Φ(u'um)/Φ(m)`, and `Φ(q^k m)/Φ(m)` against
/// a product of geometric series.
pub fn q_binomial(cases: u32) -> Result<(), String> {
    let strat = (
        small_unit(),
        small_unit(),
        -2i64..=2,
        1usize..=2,
        0u64..1000,
        1i64..=4,
    );
    runner(cases)
        .run(&strat, |(u, u2, kap, zi, seed, k)| {
            let s = SamplePoint::new(seed, &[]);
            let order = 6;
            let m = &Monomial::kappa().pow(kap) * &Monomial::z(zi - 1);
            let um = &u * &m;
            let f = |a: &Monomial, b: &Monomial| {
                phi_ratio_series(a, b, 2, order, &s).map_err(|e| TestCaseError::fail(e.to_string()))
            };
            let lhs = f(&u, &m)?.mul(&f(&u2, &um)?);
            let rhs = f(&(&u * &u2), &m)?;
            prop_assert_eq!(lhs, rhs);

            let qk = Monomial::q().pow(k);
            let direct = f(&qk, &m)?;
            let mut geo = TruncatedSeries::one(2, order);
            for j in 0..k {
                let mj = &Monomial::q().pow(j) * &m;
                let c = s
                    .eval(&mj.without_z())
                    .map_err(|e| TestCaseError::fail(e.to_string()))?;
                let term = TruncatedSeries::monomial(2, order, mj.z_exponents(2).unwrap(), c);
                geo = geo.mul(&term.geometric().unwrap());
            }
            prop_assert_eq!(direct, geo);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub fn ring_laws(cases: u32) -> Result<(), String> {
    let strat = (series(2, 4), series(2, 4), series(2, 4));
    runner(cases)
        .run(&strat, |(a, b, c)| {
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            prop_assert_eq!(a.add(&b), b.add(&a));
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&TruncatedSeries::one(2, 4)), a.clone());
            prop_assert!(a.sub(&a).is_empty());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("pool")
        .install(f)
}

/// One thread and several threads give identical series.
pub fn parallel_determinism(cases: u32) -> Result<(), String> {
    let points = [catalog::a3_point(), catalog::gr22_point(), catalog::gr23_point()];
    runner(cases)
        .run(
            &(0usize..points.len(), 0u64..10_000, 1usize..=8),
            |(i, seed, threads)| {
                let p = &points[i];
                let s = SamplePoint::new(seed, &p.framing_vars());
                let opts = VertexOptions::new(4).normalized(true);
                let one =
                    in_pool(1, || vertex(p, &opts, &s)).map_err(|e| TestCaseError::fail(e.to_string()))?;
                let many = in_pool(threads, || vertex(p, &opts, &s))
                    .map_err(|e| TestCaseError::fail(e.to_string()))?;
                prop_assert_eq!(one, many);
                Ok(())
            },
        )
        .map_err(|e| e.to_string())
}

/// `Σ a_i deg(δ)_i = Σ_w m(w) d(w)` on random degree tuples.
pub fn degree_sum_identity(p: &FixedPointData, cases: u32) -> Result<(), String> {
    let a = msver_exponents(&p.theory);
    let data = LocalizationData::from_point(p);
    let s = SamplePoint::new(1, &p.framing_vars());
    let loc = Localizer::new(&data, &s, 64).map_err(|e| e.to_string())?;
    let v = p.theory.v().to_vec();
    let nslots: usize = v.iter().map(|&x| x as usize).sum();
    let nf: usize = p.theory.w().iter().map(|&x| x as usize).sum();
    runner(cases)
        .run(&prop::collection::vec(0i64..=6, nslots), |flat| {
            let mut deg = Vec::new();
            let mut pos = 0;
            for &k in &v {
                deg.push(flat[pos..pos + k as usize].iter().sum::<i64>());
                pos += k as usize;
            }
            let lhs: i64 = a.iter().zip(&deg).map(|(x, d)| x * d).sum();
            prop_assert_eq!(lhs, loc.weight_degree_sum(&flat, &vec![0; nf]));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// The bare vertex at `q = ħ` does not see the framing values.
pub fn q_equals_hbar_framing_independence(p: &FixedPointData, cases: u32) -> Result<(), String> {
    let vars = p.framing_vars();
    runner(cases)
        .run(&(0u64..10_000, 0u64..10_000), |(seed, other)| {
            let s = SamplePoint::q_equals_hbar(seed, &vars);
            let t = s.reseed_framing(other);
            let opts = VertexOptions::new(3);
            let a = vertex(p, &opts, &s).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let b = vertex(p, &opts, &t).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(a, b);
            Ok(())
        })
        .map_err(|e| e.to_string())
}
