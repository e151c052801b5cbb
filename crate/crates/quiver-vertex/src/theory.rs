//! Quiver gauge theories and the slant sum.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::kacmoody::{quiver_variety_dim, CartanData, WeightContext};
use crate::scalar::FramingVar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuiverGaugeTheory {
    labels: Vec<String>,
    arrows: Vec<(usize, usize)>,
    v: Vec<u32>,
    w: Vec<u32>,
    /// Per-vertex stability sign.
    theta: Vec<i8>,
}

impl QuiverGaugeTheory {
    pub fn new(
        labels: Vec<String>,
        arrows: Vec<(usize, usize)>,
        v: Vec<u32>,
        w: Vec<u32>,
        theta: Vec<i8>,
    ) -> Result<Self> {
        let n = labels.len();
        if v.len() != n || w.len() != n || theta.len() != n {
            return Err(Error::Invalid(
                "v, w, theta must have one entry per vertex".into(),
            ));
        }
        let unique: BTreeSet<&String> = labels.iter().collect();
        if unique.len() != n {
            return Err(Error::Invalid("vertex labels must be unique".into()));
        }
        for &(t, h) in &arrows {
            if t >= n || h >= n {
                return Err(Error::Invalid(format!("arrow ({t},{h}) out of range")));
            }
            if t == h {
                return Err(Error::Invalid(format!("loop at vertex {}", labels[t])));
            }
        }
        if theta.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::Invalid("stability signs must be ±1".into()));
        }
        Ok(QuiverGaugeTheory {
            labels,
            arrows,
            v,
            w,
            theta,
        })
    }

    /// Positive stability, labels `"1"`, `"2"`, ...; arrows by 1-based labels.
    pub fn simple(arrows: &[(usize, usize)], v: &[u32], w: &[u32]) -> Result<Self> {
        let n = v.len();
        Self::new(
            (1..=n).map(|i| i.to_string()).collect(),
            arrows.iter().map(|&(t, h)| (t - 1, h - 1)).collect(),
            v.to_vec(),
            w.to_vec(),
            vec![1; n],
        )
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    pub fn v(&self) -> &[u32] {
        &self.v
    }

    pub fn w(&self) -> &[u32] {
        &self.w
    }

    pub fn theta(&self) -> &[i8] {
        &self.theta
    }

    pub fn index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Invalid(format!("no vertex `{label}`")))
    }

    pub fn is_positive(&self) -> bool {
        self.theta.iter().all(|&s| s == 1)
    }

    pub fn cartan(&self) -> CartanData {
        CartanData::from_arrows(self.n(), &self.arrows).expect("validated quiver")
    }

    pub fn weight_context(&self) -> WeightContext {
        WeightContext::new(
            self.cartan(),
            self.v.iter().map(|&x| x as i64).collect(),
            self.w.iter().map(|&x| x as i64).collect(),
        )
    }

    pub fn dim(&self) -> i64 {
        quiver_variety_dim(&self.weight_context())
    }

    pub fn framing_var(&self, i: usize, slot: u32) -> FramingVar {
        FramingVar::new(self.labels[i].clone(), slot)
    }

    pub fn framing_vars(&self) -> Vec<FramingVar> {
        let mut out = Vec::new();
        for i in 0..self.n() {
            for j in 1..=self.w[i] {
                out.push(self.framing_var(i, j));
            }
        }
        out
    }

    pub fn prefixed(&self, prefix: &str) -> Self {
        QuiverGaugeTheory {
            labels: self.labels.iter().map(|l| format!("{prefix}{l}")).collect(),
            ..self.clone()
        }
    }

    /// Same quiver under a new list of labels.
    pub fn relabeled(&self, labels: Vec<String>) -> Result<Self> {
        Self::new(
            labels,
            self.arrows.clone(),
            self.v.clone(),
            self.w.clone(),
            self.theta.clone(),
        )
    }
}

/// Two theories and compatible vertices `⋆₁`, `⋆₂`.
#[derive(Clone, Debug)]
pub struct SlantSumSpec {
    pub first: QuiverGaugeTheory,
    pub star1: usize,
    pub second: QuiverGaugeTheory,
    pub star2: usize,
}

impl SlantSumSpec {
    pub fn new(
        first: QuiverGaugeTheory,
        star1: usize,
        second: QuiverGaugeTheory,
        star2: usize,
    ) -> Result<Self> {
        if star1 >= first.n() || star2 >= second.n() {
            return Err(Error::Invalid("slant-sum vertex out of range".into()));
        }
        let spec = SlantSumSpec {
            first,
            star1,
            second,
            star2,
        };
        spec.check()?;
        Ok(spec)
    }

    pub fn by_labels(
        first: QuiverGaugeTheory,
        star1: &str,
        second: QuiverGaugeTheory,
        star2: &str,
    ) -> Result<Self> {
        let (s1, s2) = (first.index(star1)?, second.index(star2)?);
        Self::new(first, s1, second, s2)
    }

    fn check(&self) -> Result<()> {
        let v1 = self.first.v[self.star1];
        let w2 = self.second.w[self.star2];
        if v1 != w2 {
            return Err(Error::Incompatible {
                star1: self.first.labels[self.star1].clone(),
                v1,
                star2: self.second.labels[self.star2].clone(),
                w2,
            });
        }
        Ok(())
    }

    /// Index of a vertex of the second theory inside the sum.
    pub fn second_index(&self, j: usize) -> usize {
        self.first.n() + j
    }
}

pub const FIRST_PREFIX: &str = "1.";
pub const SECOND_PREFIX: &str = "2.";

/// Disjoint union plus one arrow `⋆₁ → ⋆₂`, with `w_{⋆₂}` set to zero.
/// Vertices of the first theory come first, labels prefixed `1.` and `2.`.
pub fn slant_sum(spec: &SlantSumSpec) -> Result<QuiverGaugeTheory> {
    spec.check()?;
    let (a, b) = (&spec.first, &spec.second);
    let n1 = a.n();
    let mut labels: Vec<String> = a.labels.iter().map(|l| format!("{FIRST_PREFIX}{l}")).collect();
    labels.extend(b.labels.iter().map(|l| format!("{SECOND_PREFIX}{l}")));
    let mut arrows = a.arrows.clone();
    arrows.extend(b.arrows.iter().map(|&(t, h)| (t + n1, h + n1)));
    arrows.push((spec.star1, spec.star2 + n1));
    let mut v = a.v.clone();
    v.extend(&b.v);
    let mut w = a.w.clone();
    w.extend(&b.w);
    w[n1 + spec.star2] = 0;
    let mut theta = a.theta.clone();
    theta.extend(&b.theta);
    QuiverGaugeTheory::new(labels, arrows, v, w, theta)
}

/// `dim M = dim M⁽¹⁾ + dim M⁽²⁾`.
pub fn dim_additivity_check(spec: &SlantSumSpec) -> Result<bool> {
    let sum = slant_sum(spec)?;
    Ok(sum.dim() == spec.first.dim() + spec.second.dim())
}

/// `a_i = Σ_{h(e)=i} v_{t(e)} - Σ_{t(e)=i} v_{h(e)} + w_i`.
pub fn msver_exponents(t: &QuiverGaugeTheory) -> Vec<i64> {
    let mut a: Vec<i64> = t.w.iter().map(|&x| x as i64).collect();
    for &(tail, head) in &t.arrows {
        a[head] += t.v[tail] as i64;
        a[tail] -= t.v[head] as i64;
    }
    a
}

/// `b_i = v_i - Σ_{t(e)=i} v_{h(e)}`, so that `e^{α_i} = z_i (q/ħ)^{b_i}`.
pub fn kahler_root_exponents(t: &QuiverGaugeTheory) -> Vec<i64> {
    let mut b: Vec<i64> = t.v.iter().map(|&x| x as i64).collect();
    for &(tail, head) in &t.arrows {
        b[tail] -= t.v[head] as i64;
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;

    pub fn a3() -> QuiverGaugeTheory {
        QuiverGaugeTheory::simple(&[(1, 2), (2, 3)], &[1, 2, 1], &[0, 1, 0]).unwrap()
    }

    fn gr(k: u32, n: u32) -> QuiverGaugeTheory {
        QuiverGaugeTheory::simple(&[], &[k], &[n]).unwrap()
    }

    #[test]
    fn rejects_loops_and_duplicates() {
        assert!(QuiverGaugeTheory::simple(&[(1, 1)], &[1], &[1]).is_err());
        let e = QuiverGaugeTheory::new(
            vec!["x".into(), "x".into()],
            vec![],
            vec![0, 0],
            vec![0, 0],
            vec![1, 1],
        );
        assert!(e.is_err());
    }

    #[test]
    fn d4_sum() {
        let spec = SlantSumSpec::by_labels(a3(), "2", gr(2, 2), "1").unwrap();
        let d4 = slant_sum(&spec).unwrap();
        assert_eq!(d4.v(), &[1, 2, 1, 2]);
        assert_eq!(d4.w(), &[0, 1, 0, 0]);
        assert_eq!(d4.arrows(), &[(0, 1), (1, 2), (1, 3)]);
        assert_eq!(d4.labels(), &["1.1", "1.2", "1.3", "2.1"]);
        assert!(dim_additivity_check(&spec).unwrap());
        assert_eq!(d4.dim(), 0);
    }

    #[test]
    fn incompatible_sum_cites_values() {
        let e = SlantSumSpec::by_labels(a3(), "1", gr(2, 2), "1").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("= 1") && msg.contains("= 2"), "{msg}");
    }

    #[test]
    fn flag_dimension_additivity() {
        // X_3 = Y_2 # X_2
        let y2 = gr(2, 3);
        let x2 = gr(1, 2);
        let spec = SlantSumSpec::new(y2.clone(), 0, x2.clone(), 0).unwrap();
        let x3 = slant_sum(&spec).unwrap();
        assert_eq!(x3.dim(), 6);
        assert_eq!(y2.dim(), 4);
        assert_eq!(x2.dim(), 2);
        assert!(dim_additivity_check(&spec).unwrap());
    }

    #[test]
    fn normalization_exponents() {
        assert_eq!(msver_exponents(&a3()), vec![-2, 1, 2]);
        assert_eq!(kahler_root_exponents(&a3()), vec![-1, 1, 1]);
        assert_eq!(msver_exponents(&gr(3, 5)), vec![5]);
        assert_eq!(kahler_root_exponents(&gr(2, 2)), vec![2]);
        let zero = QuiverGaugeTheory::simple(&[(1, 2)], &[0, 0], &[1, 0]).unwrap();
        assert_eq!(kahler_root_exponents(&zero), vec![0, 0]);
    }

    #[test]
    fn counts_are_additive() {
        let spec = SlantSumSpec::by_labels(a3(), "2", gr(2, 2), "1").unwrap();
        let s = slant_sum(&spec).unwrap();
        assert_eq!(s.arrows().len(), a3().arrows().len() + 1);
        let total_w: u32 = s.w().iter().sum();
        assert_eq!(total_w, 1);
    }
}
