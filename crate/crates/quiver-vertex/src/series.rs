//! Multivariate power series in the Kähler variables, truncated by total degree.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::{format_rational, Monomial, SamplePoint, Scalar};

/// `Σ c_e z^e` over exponent vectors `e` with `|e| ≤ order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    nvars: usize,
    order: u32,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl TruncatedSeries {
    pub fn zero(nvars: usize, order: u32) -> Self {
        TruncatedSeries {
            nvars,
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(nvars: usize, order: u32) -> Self {
        Self::monomial(nvars, order, vec![0; nvars], Scalar::one())
    }

    pub fn monomial(nvars: usize, order: u32, exps: Vec<u32>, coef: Scalar) -> Self {
        let mut s = Self::zero(nvars, order);
        s.add_term(exps, coef);
        s
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_pole(&self) -> bool {
        self.terms.values().any(|c| c.pole)
    }

    pub fn coeff(&self, exps: &[u32]) -> Scalar {
        self.terms.get(exps).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Scalar> {
        &self.terms
    }

    /// Terms sorted by total degree, then lexicographically.
    pub fn sorted_terms(&self) -> Vec<(&Vec<u32>, &Scalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| degree(a.0).cmp(&degree(b.0)).then_with(|| a.0.cmp(b.0)));
        v
    }

    pub fn support(&self) -> Vec<Vec<u32>> {
        self.terms.keys().cloned().collect()
    }

    /// Adds `coef · z^exps`; silently ignored beyond the order.
    pub fn add_term(&mut self, exps: Vec<u32>, coef: Scalar) {
        assert_eq!(exps.len(), self.nvars, "exponent vector length");
        if degree(&exps) > self.order {
            return;
        }
        if coef.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(c) => {
                *c = &*c + &coef;
                if c.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, coef);
            }
        }
    }

    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        TruncatedSeries {
            nvars: self.nvars,
            order,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| degree(e) <= order)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "series in different variable sets");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = self.truncate(other.order);
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::int(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let mut out = Self::zero(self.nvars, self.order);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let order = self.order.min(other.order);
        let mut out = Self::zero(self.nvars, order);
        for (e1, c1) in &self.terms {
            let d1 = degree(e1);
            if d1 > order {
                continue;
            }
            for (e2, c2) in &other.terms {
                if d1 + degree(e2) > order {
                    continue;
                }
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars, self.order);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// `1/(1 - m)` for a series `m` without constant term.
    pub fn geometric(&self) -> Result<Self> {
        if self.terms.contains_key(&vec![0; self.nvars]) {
            return Err(Error::NonTruncating(
                "geometric series of a term with constant part".into(),
            ));
        }
        let mut out = Self::one(self.nvars, self.order);
        let mut p = Self::one(self.nvars, self.order);
        for _ in 0..self.order {
            p = p.mul(self);
            out = out.add(&p);
        }
        Ok(out)
    }

    /// Move variable `i` to position `map[i]` in a series over `nvars` variables.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Self {
        assert_eq!(map.len(), self.nvars);
        let mut out = Self::zero(nvars, self.order);
        for (e, c) in &self.terms {
            let mut f = vec![0u32; nvars];
            for (i, &x) in e.iter().enumerate() {
                f[map[i]] += x;
            }
            out.add_term(f, c.clone());
        }
        out
    }

    /// Replace `z_j` by the monomial `m`, whose non-Kähler part is evaluated
    /// at `sample`. Returns the new series and whether any term was pushed
    /// beyond the order and dropped.
    pub fn substitute_kahler(&self, j: usize, m: &Monomial, sample: &SamplePoint) -> Result<(Self, bool)> {
        if m.z_degree() < 1 {
            return Err(Error::Usage(format!(
                "substituting z{} by `{m}` would lower the z-degree to zero",
                j + 1
            )));
        }
        let mz = m.z_exponents(self.nvars)?;
        let c = sample.eval(&m.without_z())?;
        let mut out = Self::zero(self.nvars, self.order);
        let mut dropped = false;
        for (e, v) in &self.terms {
            let k = e[j];
            let mut f = e.clone();
            f[j] = 0;
            for (x, y) in f.iter_mut().zip(&mz) {
                *x += k * y;
            }
            if degree(&f) > self.order {
                dropped = true;
                continue;
            }
            out.add_term(f, v * &c.pow(k as i64));
        }
        Ok((out, dropped))
    }

    /// Text form with coefficients as exact rationals.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return format!("0 + O(z^{})", self.order + 1);
        }
        let mut parts = Vec::new();
        for (e, c) in self.sorted_terms() {
            let coef = if c.pole {
                "pole".to_string()
            } else {
                format_rational(&c.value)
            };
            let mono = Monomial::z_vec(e);
            if mono.is_one() {
                parts.push(coef);
            } else {
                parts.push(format!("({coef})·{mono}"));
            }
        }
        format!("{} + O(z^{})", parts.join(" + "), self.order + 1)
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `Φ(u·m)/Φ(m) = Σ_k m^k (u;q)_k/(q;q)_k`, truncated at `order`.
pub fn phi_ratio_series(
    u: &Monomial,
    m: &Monomial,
    nvars: usize,
    order: u32,
    sample: &SamplePoint,
) -> Result<TruncatedSeries> {
    if u.has_z() {
        return Err(Error::Usage(format!("`{u}` must not involve Kähler variables")));
    }
    let step = m.z_degree();
    if step <= 0 {
        return Err(Error::NonTruncating(format!(
            "`{m}` has no positive Kähler degree"
        )));
    }
    let mz = m.z_exponents(nvars)?;
    let mc = sample.eval(&m.without_z())?;
    let uv = sample.eval(u)?;
    let q = Scalar::new(sample.q().clone());
    let mut out = TruncatedSeries::one(nvars, order);
    let mut coef = Scalar::one();
    let mut qk = Scalar::one();
    let mut uqk = uv.clone();
    let mut k = 1u32;
    while (k as i64) * step <= order as i64 {
        // (u)_k/(q)_k = (u)_{k-1}/(q)_{k-1} · (1 - u q^{k-1})/(1 - q^k)
        qk = &qk * &q;
        coef = &(&coef * &mc) * &(&(Scalar::one() - uqk.clone()) / &(Scalar::one() - qk.clone()));
        uqk = &uqk * &q;
        if coef.value.is_zero() && !coef.pole {
            break;
        }
        out.add_term(mz.iter().map(|x| x * k).collect(), coef.clone());
        k += 1;
    }
    Ok(out)
}

/// `∏ Φ(ħ m)/Φ(m)` over a list of monomials.
pub fn phi_product(
    factors: &[(Monomial, Monomial)],
    nvars: usize,
    order: u32,
    sample: &SamplePoint,
) -> Result<TruncatedSeries> {
    let mut out = TruncatedSeries::one(nvars, order);
    for (u, m) in factors {
        out = out.mul(&phi_ratio_series(u, m, nvars, order, sample)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, FramingVar};

    fn sample() -> SamplePoint {
        SamplePoint::new(3, &[FramingVar::new("1", 1)])
    }

    #[test]
    fn phi_q_is_geometric() {
        let s = sample();
        let lhs = phi_ratio_series(&Monomial::q(), &Monomial::z(0), 1, 6, &s).unwrap();
        let mut rhs = TruncatedSeries::zero(1, 6);
        for k in 0..=6 {
            rhs.add_term(vec![k], Scalar::one());
        }
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn phi_unit_is_one() {
        let s = sample();
        let lhs = phi_ratio_series(&Monomial::one(), &Monomial::z(0), 1, 6, &s).unwrap();
        assert_eq!(lhs, TruncatedSeries::one(1, 6));
    }

    #[test]
    fn phi_requires_kahler_degree() {
        let s = sample();
        assert!(phi_ratio_series(&Monomial::hbar(), &Monomial::kappa(), 1, 3, &s).is_err());
    }

    #[test]
    fn first_coefficient_of_phi_ratio() {
        let s = sample();
        let m = &Monomial::kappa() * &Monomial::z(1);
        let f = phi_ratio_series(&Monomial::hbar(), &m, 3, 4, &s).unwrap();
        // (1-ħ)/(1-q) · κ
        let q = Scalar::new(s.q().clone());
        let h = Scalar::new(s.hbar().clone());
        let expect = &(&(Scalar::one() - h.clone()) / &(Scalar::one() - q.clone())) * &(&q / &h);
        assert_eq!(f.coeff(&[0, 1, 0]), expect);
        assert_eq!(f.coeff(&[0, 0, 0]), Scalar::one());
        assert_eq!(f.len(), 5);
    }

    #[test]
    fn identity_substitution() {
        let s = sample();
        let f = phi_ratio_series(&Monomial::hbar(), &Monomial::z(1), 2, 5, &s).unwrap();
        let (g, dropped) = f.substitute_kahler(1, &Monomial::z(1), &s).unwrap();
        assert_eq!(f, g);
        assert!(!dropped);
    }

    #[test]
    fn substitution_matches_reexpansion() {
        let s = sample();
        let n = 4;
        let base = &Monomial::kappa() * &Monomial::z(1);
        let f = phi_ratio_series(&(&Monomial::hbar() * &Monomial::kappa()), &base, n, 6, &s).unwrap();
        let shifted = &base * &Monomial::z(3);
        let g = phi_ratio_series(&(&Monomial::hbar() * &Monomial::kappa()), &shifted, n, 6, &s).unwrap();
        let (h, dropped) = f
            .substitute_kahler(1, &(&Monomial::z(1) * &Monomial::z(3)), &s)
            .unwrap();
        assert_eq!(g, h);
        assert!(dropped);
    }

    #[test]
    fn substitution_rejects_degree_zero() {
        let s = sample();
        let f = TruncatedSeries::one(1, 2);
        assert!(f.substitute_kahler(0, &Monomial::hbar(), &s).is_err());
    }

    #[test]
    fn geometric_inverse() {
        let mut m = TruncatedSeries::zero(2, 5);
        m.add_term(vec![1, 0], Scalar::new(rat(2, 3)));
        m.add_term(vec![0, 2], Scalar::new(rat(-1, 7)));
        let one_minus = TruncatedSeries::one(2, 5).sub(&m);
        assert_eq!(one_minus.mul(&m.geometric().unwrap()), TruncatedSeries::one(2, 5));
    }

    #[test]
    fn canonical_text_order() {
        let mut s = TruncatedSeries::zero(2, 3);
        s.add_term(vec![0, 2], Scalar::int(1));
        s.add_term(vec![1, 0], Scalar::int(2));
        s.add_term(vec![0, 0], Scalar::int(3));
        assert_eq!(s.to_text(), "3 + (2)·z1 + (1)·z2^2 + O(z^4)");
    }
}
