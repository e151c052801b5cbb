//! Torus fixed points as tautological characters, and their slant sum.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::kacmoody::extremal_word;
use crate::scalar::{FramingVar, Monomial};
use crate::theory::{slant_sum, QuiverGaugeTheory, SlantSumSpec, FIRST_PREFIX, SECOND_PREFIX};
use crate::vertex::polarization;

/// Characters of the tautological bundles `𝒱_i` at a fixed point, one
/// monomial per Chern root. Framing characters are `a_{i,1}, …, a_{i,w_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointData {
    pub theory: QuiverGaugeTheory,
    pub chars: Vec<Vec<Monomial>>,
}

impl FixedPointData {
    pub fn new(theory: QuiverGaugeTheory, chars: Vec<Vec<Monomial>>) -> Result<Self> {
        if chars.len() != theory.n() {
            return Err(Error::Invalid("one character list per vertex required".into()));
        }
        for (i, c) in chars.iter().enumerate() {
            if c.len() != theory.v()[i] as usize {
                return Err(Error::Invalid(format!(
                    "vertex {} has {} characters but v = {}",
                    theory.label(i),
                    c.len(),
                    theory.v()[i]
                )));
            }
        }
        Ok(FixedPointData { theory, chars })
    }

    /// Prefix every vertex label and framing variable.
    pub fn prefixed(&self, prefix: &str) -> Self {
        FixedPointData {
            theory: self.theory.prefixed(prefix),
            chars: self
                .chars
                .iter()
                .map(|c| c.iter().map(|m| m.prefix_framing(prefix)).collect())
                .collect(),
        }
    }

    pub fn framing_vars(&self) -> Vec<FramingVar> {
        self.theory.framing_vars()
    }

    /// Framing characters `a_{i,j}` as monomials.
    pub fn framing_chars(&self) -> Vec<Vec<Monomial>> {
        default_framing(&self.theory)
    }

    pub fn is_split(&self, i: usize) -> bool {
        is_split(self, i)
    }
}

pub fn default_framing(t: &QuiverGaugeTheory) -> Vec<Vec<Monomial>> {
    (0..t.n())
        .map(|i| (1..=t.w()[i]).map(|j| Monomial::a(t.framing_var(i, j))).collect())
        .collect()
}

/// True iff the characters at vertex `i` are pairwise distinct.
pub fn is_split(p: &FixedPointData, i: usize) -> bool {
    let mut c = p.chars[i].clone();
    c.sort();
    c.windows(2).all(|w| w[0] != w[1])
}

/// Outcome of the structural checks on a fixed point.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Shape checks: list lengths, and for positive stability each character is
/// `ħ^k a` with `k ≥ 0` and `a` a declared framing variable.
pub fn validate_fixed_point(p: &FixedPointData) -> ValidationReport {
    let t = &p.theory;
    let declared: Vec<FramingVar> = t.framing_vars();
    let mut issues = Vec::new();
    for i in 0..t.n() {
        let label = t.label(i);
        if p.chars[i].len() != t.v()[i] as usize {
            issues.push(format!(
                "vertex {label}: {} characters, v = {}",
                p.chars[i].len(),
                t.v()[i]
            ));
        }
        for m in &p.chars[i] {
            if m.has_z() || m.q_exp2() != 0 {
                issues.push(format!("vertex {label}: `{m}` carries q or z"));
            }
            if m.is_negative() {
                issues.push(format!("vertex {label}: `{m}` has a sign"));
            }
            if m.hbar_exp2() % 2 != 0 {
                issues.push(format!("vertex {label}: `{m}` has a half-integer ħ power"));
            }
            if t.theta()[i] > 0 && m.hbar_exp2() < 0 {
                issues.push(format!(
                    "vertex {label}: `{m}` has negative ħ exponent under θ > 0"
                ));
            }
            let a = m.framing();
            if a.len() != 1 || a.values().next() != Some(&1) {
                issues.push(format!(
                    "vertex {label}: `{m}` must have degree +1 in a single framing variable"
                ));
            } else if let Some(v) = a.keys().next() {
                if !declared.contains(v) {
                    issues.push(format!("vertex {label}: `{m}` uses undeclared {v}"));
                }
            }
        }
    }
    ValidationReport { issues }
}

/// A total order on the weights at the splitting vertex: `order[k]` is the
/// position in `𝒱_{⋆₁}` of the `k`-th smallest weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chamber {
    pub order: Vec<usize>,
}

impl Chamber {
    pub fn identity(n: usize) -> Self {
        Chamber {
            order: (0..n).collect(),
        }
    }

    pub fn new(order: Vec<usize>) -> Result<Self> {
        let mut s = order.clone();
        s.sort();
        if s != (0..order.len()).collect::<Vec<_>>() {
            return Err(Error::Invalid(format!("{order:?} is not a permutation")));
        }
        Ok(Chamber { order })
    }
}

/// The chamber-ordered weights `w_1 < … < w_n` of `𝒱_{⋆₁}` (labels of
/// the first theory already prefixed).
pub fn chamber_weights(spec: &SlantSumSpec, p1: &FixedPointData, chamber: &Chamber) -> Result<Vec<Monomial>> {
    let star = spec.star1;
    if !is_split(p1, star) {
        return Err(Error::NotSplit(p1.theory.label(star).to_string()));
    }
    let c = &p1.chars[star];
    if chamber.order.len() != c.len() {
        return Err(Error::Invalid(format!(
            "chamber has {} entries but v[⋆₁] = {}",
            chamber.order.len(),
            c.len()
        )));
    }
    Ok(chamber
        .order
        .iter()
        .map(|&k| c[k].prefix_framing(FIRST_PREFIX))
        .collect())
}

/// The ι-substitution on a monomial of the second theory:
/// `a_{⋆₂,k} ↦ w_k`, other framing variables prefixed `2.`.
pub fn iota_second(spec: &SlantSumSpec, weights: &[Monomial], m: &Monomial) -> Monomial {
    let star_label = spec.second.label(spec.star2).to_string();
    m.map_framing(|v| {
        if v.vertex == star_label {
            weights[(v.slot - 1) as usize].clone()
        } else {
            Monomial::a(v.prefixed(SECOND_PREFIX))
        }
    })
}

/// The fixed point `p₁ # p₂` of the slant sum.
pub fn slant_sum_fixed_point(
    spec: &SlantSumSpec,
    p1: &FixedPointData,
    chamber: &Chamber,
    p2: &FixedPointData,
) -> Result<FixedPointData> {
    if p1.theory != spec.first || p2.theory != spec.second {
        return Err(Error::Invalid(
            "fixed points do not belong to the slant-sum constituents".into(),
        ));
    }
    if !(p2.theory.theta().iter().all(|&s| s == 1) || p2.theory.theta().iter().all(|&s| s == -1)) {
        return Err(Error::Invalid("second theory needs uniform stability".into()));
    }
    let weights = chamber_weights(spec, p1, chamber)?;
    let sum = slant_sum(spec)?;
    let mut chars: Vec<Vec<Monomial>> = p1.prefixed(FIRST_PREFIX).chars;
    for c in &p2.chars {
        chars.push(c.iter().map(|m| iota_second(spec, &weights, m)).collect());
    }
    FixedPointData::new(sum, chars)
}

/// Is the multiset of characters invariant under every permutation of `vars`?
pub fn is_symmetric_in(chars: &[Vec<Monomial>], vars: &[FramingVar]) -> bool {
    let sorted = |c: &[Monomial]| {
        let mut c = c.to_vec();
        c.sort();
        c
    };
    for a in 0..vars.len() {
        for b in a + 1..vars.len() {
            let swap = |v: &FramingVar| {
                if *v == vars[a] {
                    Monomial::a(vars[b].clone())
                } else if *v == vars[b] {
                    Monomial::a(vars[a].clone())
                } else {
                    Monomial::a(v.clone())
                }
            };
            for c in chars {
                let swapped: Vec<Monomial> = c.iter().map(|m| m.map_framing(swap)).collect();
                if sorted(&swapped) != sorted(c) {
                    return false;
                }
            }
        }
    }
    true
}

/// `T = T^{1/2} + ħ^{-1} (T^{1/2})^∨` as a signed multiset of weights.
pub fn tangent_character(p: &FixedPointData) -> BTreeMap<Monomial, i64> {
    let mut out: BTreeMap<Monomial, i64> = BTreeMap::new();
    let hinv = Monomial::hbar().inv();
    for (value, mult) in polarization(&p.theory, &p.chars, &p.framing_chars()) {
        *out.entry(value.clone()).or_insert(0) += mult;
        *out.entry(&hinv * &value.inv()).or_insert(0) += mult;
    }
    out.retain(|_, m| *m != 0);
    out
}

/// `T*Gr(k, n)` as a single vertex `"1"` with `𝒱 = Σ_{j∈subset} a_{1,j}`.
pub fn builder_tstar_grassmannian(k: u32, n: u32, subset: &[u32]) -> Result<FixedPointData> {
    let t = QuiverGaugeTheory::simple(&[], &[k], &[n])?;
    let mut s = subset.to_vec();
    s.sort();
    s.dedup();
    if s.len() != k as usize || s.iter().any(|&j| j == 0 || j > n) {
        return Err(Error::Invalid(format!(
            "{subset:?} is not a {k}-subset of 1..{n}"
        )));
    }
    let chars = vec![s.iter().map(|&j| Monomial::a(t.framing_var(0, j))).collect()];
    FixedPointData::new(t, chars)
}

/// The full flag theory `X_n`: vertices `1..n-1`, arrows `i+1 → i`,
/// `v = (1, …, n-1)`, framing `n` at vertex `n-1`. The point has
/// `𝒱_i = a_{word[0]} + … + a_{word[i-1]}`.
pub fn flag_theory(n: u32) -> Result<QuiverGaugeTheory> {
    if n < 2 {
        return Err(Error::Invalid("flag theory needs n ≥ 2".into()));
    }
    let m = (n - 1) as usize;
    let arrows: Vec<(usize, usize)> = (1..m).map(|i| (i + 1, i)).collect();
    let v: Vec<u32> = (1..n).collect();
    let mut w = vec![0; m];
    w[m - 1] = n;
    QuiverGaugeTheory::simple(&arrows, &v, &w)
}

pub fn builder_tstar_flag(n: u32, word: &[u32]) -> Result<FixedPointData> {
    let t = flag_theory(n)?;
    let mut s = word.to_vec();
    s.sort();
    if s != (1..=n).collect::<Vec<_>>() {
        return Err(Error::Invalid(format!("{word:?} is not a permutation of 1..{n}")));
    }
    let m = (n - 1) as usize;
    let chars = (1..=m)
        .map(|i| {
            word[..i]
                .iter()
                .map(|&j| Monomial::a(t.framing_var(m - 1, j)))
                .collect()
        })
        .collect();
    FixedPointData::new(t, chars)
}

/// The unique fixed point of a zero-dimensional theory.
///
/// Start from the empty point at `λ` and apply reflection functors along the
/// lowering word `λ → μ`. At vertex `i` the new character is
/// `E_i - ħ 𝒱_i`, where `E_i = W_i + Σ_{h(e)=i} 𝒱_{t(e)} + ħ Σ_{t(e)=i} 𝒱_{h(e)}`.
/// The result is checked to have vanishing tangent character.
pub fn zero_dim_point(t: &QuiverGaugeTheory) -> Result<FixedPointData> {
    let ctx = t.weight_context();
    let report = extremal_word(&ctx);
    if !report.in_orbit {
        return Err(Error::Invalid("theory is not zero dimensional".into()));
    }
    let hbar = Monomial::hbar();
    let framing = default_framing(t);
    let mut chars: Vec<Vec<Monomial>> = vec![Vec::new(); t.n()];
    for &i in report.word.iter().rev() {
        let mut e: Vec<Monomial> = framing[i].clone();
        for &(tail, head) in t.arrows() {
            if head == i {
                e.extend(chars[tail].iter().cloned());
            }
            if tail == i {
                e.extend(chars[head].iter().map(|m| &hbar * m));
            }
        }
        for m in &chars[i] {
            let shifted = &hbar * m;
            let pos = e.iter().position(|x| *x == shifted).ok_or_else(|| {
                Error::Invalid(format!(
                    "reflection at vertex {} cannot remove {shifted}",
                    t.label(i)
                ))
            })?;
            e.remove(pos);
        }
        e.sort();
        chars[i] = e;
    }
    let p = FixedPointData::new(t.clone(), chars)?;
    let tangent = tangent_character(&p);
    if !tangent.is_empty() {
        return Err(Error::Invalid(format!(
            "constructed point has nonzero tangent character ({} weights)",
            tangent.len()
        )));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(label: &str, slot: u32) -> Monomial {
        Monomial::a(FramingVar::new(label, slot))
    }

    fn a3() -> QuiverGaugeTheory {
        QuiverGaugeTheory::simple(&[(1, 2), (2, 3)], &[1, 2, 1], &[0, 1, 0]).unwrap()
    }

    #[test]
    fn a3_point_from_reflections() {
        let p = zero_dim_point(&a3()).unwrap();
        let x = a("2", 1);
        let xh = &x * &Monomial::hbar();
        assert_eq!(p.chars[0], vec![xh.clone()]);
        let mut v2 = vec![x.clone(), xh];
        v2.sort();
        assert_eq!(p.chars[1], v2);
        assert_eq!(p.chars[2], vec![x]);
        assert!(validate_fixed_point(&p).passed());
        assert!(is_split(&p, 1));
    }

    #[test]
    fn flag_point() {
        let p = builder_tstar_flag(3, &[1, 2, 3]).unwrap();
        assert_eq!(p.chars[0], vec![a("2", 1)]);
        assert_eq!(p.chars[1], vec![a("2", 1), a("2", 2)]);
        assert!(validate_fixed_point(&p).passed());
        assert!(builder_tstar_flag(3, &[1, 1, 3]).is_err());
    }

    #[test]
    fn grassmannian_point() {
        let p = builder_tstar_grassmannian(2, 2, &[1, 2]).unwrap();
        assert_eq!(p.chars[0], vec![a("1", 1), a("1", 2)]);
        assert!(is_split(&p, 0));
        assert!(tangent_character(&p).is_empty());
        assert!(builder_tstar_grassmannian(2, 3, &[1]).is_err());
        let q = builder_tstar_grassmannian(1, 2, &[1]).unwrap();
        assert_eq!(tangent_character(&q).values().map(|m| m.abs()).sum::<i64>(), 2);
    }

    #[test]
    fn validation_failures() {
        let t = QuiverGaugeTheory::simple(&[], &[1], &[1]).unwrap();
        let bad = FixedPointData::new(t.clone(), vec![vec![&a("1", 1) * &Monomial::hbar().inv()]]).unwrap();
        assert!(!validate_fixed_point(&bad).passed());
        let bad = FixedPointData::new(t, vec![vec![a("1", 1).pow(2)]]).unwrap();
        let r = validate_fixed_point(&bad);
        assert!(r.issues[0].contains("degree +1"));
    }

    #[test]
    fn repeated_weight_is_not_split() {
        let t = QuiverGaugeTheory::simple(&[], &[2], &[1]).unwrap();
        let p = FixedPointData::new(t, vec![vec![a("1", 1), a("1", 1)]]).unwrap();
        assert!(!is_split(&p, 0));
    }

    #[test]
    fn flag_slant_sum_point() {
        // X_3 = Y_2 # X_2
        let y = builder_tstar_grassmannian(2, 3, &[1, 2]).unwrap();
        let x = builder_tstar_flag(2, &[1, 2]).unwrap();
        let spec = SlantSumSpec::new(y.theory.clone(), 0, x.theory.clone(), 0).unwrap();
        let p = slant_sum_fixed_point(&spec, &y, &Chamber::identity(2), &x).unwrap();
        assert_eq!(p.chars[0], vec![a("1.1", 1), a("1.1", 2)]);
        assert_eq!(p.chars[1], vec![a("1.1", 1)]);
        // the other chamber picks the other weight
        let p2 = slant_sum_fixed_point(&spec, &y, &Chamber::new(vec![1, 0]).unwrap(), &x).unwrap();
        assert_eq!(p2.chars[1], vec![a("1.1", 2)]);
    }

    #[test]
    fn symmetry_detection() {
        let v = [FramingVar::new("1", 1), FramingVar::new("1", 2)];
        assert!(is_symmetric_in(&[vec![a("1", 1), a("1", 2)]], &v));
        assert!(!is_symmetric_in(&[vec![a("1", 1)]], &v));
    }
}
