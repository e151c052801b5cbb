//! Vertex functions by equivariant localization.
//!
//! A fixed quasimap is a tuple `δ_{i,k} ≥ 0`, one entry per Chern root. Its
//! contribution is a product over the weights `w` of the polarization
//!
//! ```text
//!   [ (-q ħ^{-1/2})^{d(w)} (ħ v_w)_{d(w)} / (q v_w)_{d(w)} ]^{m(w)}
//! ```
//!
//! with `d(w)` the pairing of the weight's degree covector with `δ` (and with
//! the twist `σ` on framing slots).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fixed::{default_framing, FixedPointData};
use crate::scalar::{pochhammer, FramingVar, Monomial, Rational, SamplePoint, Scalar};
use crate::series::TruncatedSeries;
use crate::theory::{msver_exponents, QuiverGaugeTheory};

/// A Chern-root slot `(vertex, k)` or a framing slot `(vertex, j)`, 0-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Chern(usize, usize),
    Framing(usize, usize),
}

/// One weight of the polarization with covector `+plus - minus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightEntry {
    pub value: Monomial,
    pub plus: Slot,
    pub minus: Slot,
    pub mult: i64,
}

impl WeightEntry {
    pub fn covector(&self) -> Vec<(Slot, i64)> {
        if self.plus == self.minus {
            Vec::new()
        } else {
            vec![(self.plus, 1), (self.minus, -1)]
        }
    }
}

/// Chern roots and framing characters to localize at. Values may carry
/// powers of `q` (as after the substitution `a ↦ a q^σ`).
#[derive(Clone, Debug)]
pub struct LocalizationData {
    pub theory: QuiverGaugeTheory,
    pub chern: Vec<Vec<Monomial>>,
    pub framing: Vec<Vec<Monomial>>,
    /// Used by [`Regularization::Limit`]; `None` means [`Deformation::by_character`]
    /// without framings.
    pub deform: Option<Deformation>,
}

impl LocalizationData {
    pub fn from_point(p: &FixedPointData) -> Self {
        LocalizationData {
            theory: p.theory.clone(),
            chern: p.chars.clone(),
            framing: default_framing(&p.theory),
            deform: None,
        }
    }
}

/// Exponents `c` of the deformation `x ↦ x (1+ε)^c`, per Chern root and
/// per framing slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deformation {
    pub chern: Vec<Vec<i64>>,
    pub framing: Vec<Vec<i64>>,
}

impl Deformation {
    /// Equal characters get equal exponents: the `g`-th distinct Chern
    /// character (in order of appearance) gets `c = g² + g + 1`, with
    /// framing characters `include_framing` or fixed at `0`.
    pub fn by_character(chern: &[Vec<Monomial>], framing: &[Vec<Monomial>], include_framing: bool) -> Self {
        Deformation::by_table(&character_table(chern), chern, framing, include_framing)
    }

    /// As [`Deformation::by_character`] with the `g`-th entry of `table`
    /// getting `c = g² + g + 1` and characters outside it `0`.
    pub fn by_table(
        table: &[Monomial],
        chern: &[Vec<Monomial>],
        framing: &[Vec<Monomial>],
        include_framing: bool,
    ) -> Self {
        let c_of = |m: &Monomial| {
            table
                .iter()
                .position(|x| x == m)
                .map(|g| {
                    let g = g as i64;
                    g * g + g + 1
                })
                .unwrap_or(0)
        };
        let chern = chern.iter().map(|r| r.iter().map(c_of).collect()).collect();
        let framing = framing
            .iter()
            .map(|r| {
                r.iter()
                    .map(|m| if include_framing { c_of(m) } else { 0 })
                    .collect()
            })
            .collect();
        Deformation { chern, framing }
    }
}

/// Distinct characters in order of appearance.
pub fn character_table(chern: &[Vec<Monomial>]) -> Vec<Monomial> {
    let mut seen: Vec<Monomial> = Vec::new();
    for m in chern.iter().flatten() {
        if !seen.contains(m) {
            seen.push(m.clone());
        }
    }
    seen
}

/// How terms with coinciding weights are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Regularization {
    /// A vanishing factor on top kills the term; one below is a pole.
    Exact,
    /// Deform the Chern roots along a [`Deformation`], expand each term as
    /// a Laurent series in `ε` and keep the `ε⁰` part of the sum.
    #[default]
    Limit,
}

/// `Σ_e Hom(𝒱_t, 𝒱_h) + Σ_i Hom(𝒲_i, 𝒱_i) - Σ_i Hom(𝒱_i, 𝒱_i)`.
pub fn weight_table_from(
    t: &QuiverGaugeTheory,
    chern: &[Vec<Monomial>],
    framing: &[Vec<Monomial>],
) -> Vec<WeightEntry> {
    let mut out = Vec::new();
    for &(tail, head) in t.arrows() {
        for (k, xt) in chern[tail].iter().enumerate() {
            for (l, xh) in chern[head].iter().enumerate() {
                out.push(WeightEntry {
                    value: xh / xt,
                    plus: Slot::Chern(head, l),
                    minus: Slot::Chern(tail, k),
                    mult: 1,
                });
            }
        }
    }
    for i in 0..t.n() {
        for (k, x) in chern[i].iter().enumerate() {
            for (j, a) in framing[i].iter().enumerate() {
                out.push(WeightEntry {
                    value: x / a,
                    plus: Slot::Chern(i, k),
                    minus: Slot::Framing(i, j),
                    mult: 1,
                });
            }
        }
    }
    for (i, roots) in chern.iter().enumerate().take(t.n()) {
        for (k, xk) in roots.iter().enumerate() {
            for (l, xl) in roots.iter().enumerate() {
                out.push(WeightEntry {
                    value: xk / xl,
                    plus: Slot::Chern(i, k),
                    minus: Slot::Chern(i, l),
                    mult: -1,
                });
            }
        }
    }
    out
}

pub fn weight_table(p: &FixedPointData) -> Vec<WeightEntry> {
    weight_table_from(&p.theory, &p.chars, &default_framing(&p.theory))
}

/// The polarization as `(weight, multiplicity)` pairs.
pub fn polarization(
    t: &QuiverGaugeTheory,
    chern: &[Vec<Monomial>],
    framing: &[Vec<Monomial>],
) -> Vec<(Monomial, i64)> {
    weight_table_from(t, chern, framing)
        .into_iter()
        .map(|e| (e.value, e.mult))
        .collect()
}

/// Per-vertex lists of nonnegative degrees, one per Chern root.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DegreeTuple(pub Vec<Vec<i64>>);

impl DegreeTuple {
    pub fn zero(t: &QuiverGaugeTheory) -> Self {
        DegreeTuple(t.v().iter().map(|&v| vec![0; v as usize]).collect())
    }

    pub fn flat(&self) -> Vec<i64> {
        self.0.iter().flatten().copied().collect()
    }

    pub fn from_flat(t: &QuiverGaugeTheory, flat: &[i64]) -> Self {
        let mut out = Vec::new();
        let mut pos = 0;
        for &v in t.v() {
            out.push(flat[pos..pos + v as usize].to_vec());
            pos += v as usize;
        }
        DegreeTuple(out)
    }

    /// `deg(δ)_i = Σ_k δ_{i,k}`.
    pub fn degree(&self) -> Vec<i64> {
        self.0.iter().map(|d| d.iter().sum()).collect()
    }
}

/// Shift per framing slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Twist(pub Vec<Vec<i64>>);

impl Twist {
    pub fn zero(t: &QuiverGaugeTheory) -> Self {
        Twist(t.w().iter().map(|&w| vec![0; w as usize]).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|&x| x == 0)
    }

    /// The shift of a framing variable of `t`.
    pub fn of(&self, t: &QuiverGaugeTheory, v: &FramingVar) -> Result<i64> {
        let i = t.index(&v.vertex)?;
        self.0[i]
            .get((v.slot - 1) as usize)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("no framing slot {v}")))
    }

    /// The σ-degree of a monomial: `Σ e_v σ_v` over its framing variables.
    pub fn degree_of(&self, t: &QuiverGaugeTheory, m: &Monomial) -> Result<i64> {
        let mut s = 0;
        for (v, e) in m.framing() {
            s += e * self.of(t, v)?;
        }
        Ok(s)
    }
}

/// Direction of the `q`-shift of Chern roots in descendant insertions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DescendantShift {
    /// `x ↦ x q^{-δ}`.
    #[default]
    Inverse,
    /// `x ↦ x q^{δ}`.
    Forward,
}

/// Per-vertex symmetric Laurent polynomials in the Chern roots.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Descendant {
    terms: BTreeMap<usize, BTreeMap<Vec<i64>, Rational>>,
}

impl Descendant {
    pub fn one() -> Self {
        Descendant::default()
    }

    pub fn is_one(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiply in a polynomial at vertex `i`, given as `(coefficient,
    /// exponent per Chern root)` terms. Fails unless symmetric.
    pub fn with_vertex(mut self, i: usize, terms: &[(Rational, Vec<i64>)]) -> Result<Self> {
        let mut poly: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
        let width = terms.first().map(|t| t.1.len()).unwrap_or(0);
        for (c, e) in terms {
            if e.len() != width {
                return Err(Error::Invalid("descendant terms of unequal width".into()));
            }
            *poly.entry(e.clone()).or_insert_with(Rational::zero) += c;
        }
        poly.retain(|_, c| !c.is_zero());
        for k in 0..width.saturating_sub(1) {
            let swapped: BTreeMap<Vec<i64>, Rational> = poly
                .iter()
                .map(|(e, c)| {
                    let mut e = e.clone();
                    e.swap(k, k + 1);
                    (e, c.clone())
                })
                .collect();
            if swapped != poly {
                return Err(Error::Invalid(format!(
                    "descendant at vertex {i} is not symmetric"
                )));
            }
        }
        let merged = match self.terms.remove(&i) {
            None => poly,
            Some(old) => {
                let mut out: BTreeMap<Vec<i64>, Rational> = BTreeMap::new();
                for (e1, c1) in &old {
                    for (e2, c2) in &poly {
                        let e: Vec<i64> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                        *out.entry(e).or_insert_with(Rational::zero) += c1 * c2;
                    }
                }
                out.retain(|_, c| !c.is_zero());
                out
            }
        };
        self.terms.insert(i, merged);
        Ok(self)
    }

    /// Relocate vertex `i` to `map(i)`.
    pub fn reindexed(&self, map: impl Fn(usize) -> usize) -> Self {
        Descendant {
            terms: self.terms.iter().map(|(i, p)| (map(*i), p.clone())).collect(),
        }
    }

    /// Combine insertions living on different vertices.
    pub fn merged(&self, other: &Descendant) -> Self {
        let mut out = self.clone();
        for (i, p) in &other.terms {
            out.terms.insert(*i, p.clone());
        }
        out
    }

    pub fn vertices(&self) -> impl Iterator<Item = (&usize, &BTreeMap<Vec<i64>, Rational>)> {
        self.terms.iter()
    }

    /// Is the insertion a single monomial at each vertex?
    pub fn monomial_exponents(&self) -> Option<BTreeMap<usize, Vec<i64>>> {
        let mut out = BTreeMap::new();
        for (i, p) in &self.terms {
            if p.len() != 1 {
                return None;
            }
            let (e, c) = p.iter().next().unwrap();
            if !c.is_one() {
                return None;
            }
            out.insert(*i, e.clone());
        }
        Some(out)
    }

    fn evaluate(
        &self,
        x: &[Vec<Rational>],
        delta: &[Vec<i64>],
        q: &Rational,
        shift: DescendantShift,
    ) -> Rational {
        let mut total = Rational::one();
        for (&i, poly) in &self.terms {
            let mut s = Rational::zero();
            for (e, c) in poly {
                let mut t = c.clone();
                for (k, &ek) in e.iter().enumerate() {
                    let d = match shift {
                        DescendantShift::Inverse => -delta[i][k],
                        DescendantShift::Forward => delta[i][k],
                    };
                    t *= pow_r(&x[i][k], ek) * pow_r(q, d * ek);
                }
                s += t;
            }
            total *= s;
        }
        total
    }
}

impl Descendant {
    /// [`Descendant::evaluate`] with `x_{i,k} ↦ x_{i,k} (1+ε)^{c_{i,k}}`,
    /// expanded to `depth`.
    fn evaluate_series(
        &self,
        x: &[Vec<Rational>],
        c: &[Vec<i64>],
        delta: &[Vec<i64>],
        q: &Rational,
        shift: DescendantShift,
        depth: usize,
    ) -> Vec<Rational> {
        let mut total = unit_series(depth);
        for (&i, poly) in &self.terms {
            let mut s = vec![Rational::zero(); depth + 1];
            for (e, coef) in poly {
                let mut t = coef.clone();
                let mut k_total = 0i64;
                for (k, &ek) in e.iter().enumerate() {
                    let d = match shift {
                        DescendantShift::Inverse => -delta[i][k],
                        DescendantShift::Forward => delta[i][k],
                    };
                    t *= pow_r(&x[i][k], ek) * pow_r(q, d * ek);
                    k_total += ek * c[i][k];
                }
                for (sj, pj) in s.iter_mut().zip(power_series(k_total, depth)) {
                    *sj += &t * pj;
                }
            }
            total = series_mul(&total, &s);
        }
        total
    }
}

fn pow_r(x: &Rational, e: i64) -> Rational {
    use num_traits::Pow;
    if e >= 0 {
        Pow::pow(x, e as u64)
    } else {
        Pow::pow(&x.recip(), (-e) as u64)
    }
}

#[derive(Clone, Debug)]
pub struct VertexOptions {
    pub order: u32,
    pub normalized: bool,
    pub twist: Option<Twist>,
    pub descendant: Descendant,
    pub shift: DescendantShift,
    pub regularization: Regularization,
}

impl VertexOptions {
    pub fn new(order: u32) -> Self {
        VertexOptions {
            order,
            normalized: false,
            twist: None,
            descendant: Descendant::one(),
            shift: DescendantShift::Inverse,
            regularization: Regularization::default(),
        }
    }

    pub fn normalized(mut self, yes: bool) -> Self {
        self.normalized = yes;
        self
    }

    pub fn twist(mut self, t: Twist) -> Self {
        self.twist = Some(t);
        self
    }

    pub fn descendant(mut self, d: Descendant) -> Self {
        self.descendant = d;
        self
    }

    pub fn shift(mut self, s: DescendantShift) -> Self {
        self.shift = s;
        self
    }

    pub fn regularization(mut self, r: Regularization) -> Self {
        self.regularization = r;
        self
    }
}

/// Outcome of a single localization term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Zero,
    Pole,
    Value(Rational),
    /// Entry `j` is the coefficient of `ε^{-j}`.
    Laurent(Vec<Rational>),
}

#[derive(Clone, Copy, Debug)]
enum SlotIndex {
    Chern(usize),
    Framing(usize),
}

/// `1 - x q^i` for `i ∈ [-r, r]`, as unreduced numerator/denominator pairs.
struct FactorTable {
    r: i64,
    vals: Vec<(BigInt, BigInt)>,
}

impl FactorTable {
    fn new(x: &Rational, qpows: &[Rational], r: i64) -> Self {
        let vals = qpows
            .iter()
            .map(|qi| {
                let v = Rational::one() - x * qi;
                (v.numer().clone(), v.denom().clone())
            })
            .collect();
        FactorTable { r, vals }
    }

    fn get(&self, i: i64) -> &(BigInt, BigInt) {
        &self.vals[(i + self.r) as usize]
    }
}

struct Prepared {
    mult: i64,
    /// Deformation exponent of the weight.
    c: i64,
    plus: SlotIndex,
    minus: SlotIndex,
    /// `ħ v` and `q v` as exact powers of `q`, when they are.
    x_qpow: Option<i64>,
    y_qpow: Option<i64>,
    /// Numerically `ħ v = q v` at the sample (only when `q = ħ`).
    same: bool,
    x: FactorTable,
    y: FactorTable,
}

/// Localization data evaluated at a sample point, ready for term sums.
pub struct Localizer {
    theory: QuiverGaugeTheory,
    nslots: usize,
    framing_offsets: Vec<usize>,
    entries: Vec<Prepared>,
    chern_values: Vec<Vec<Rational>>,
    chern_c: Vec<Vec<i64>>,
    q: Rational,
    r: i64,
    sample: SamplePoint,
    msver: Vec<i64>,
}

fn offsets(counts: &[u32]) -> Vec<usize> {
    let mut out = Vec::with_capacity(counts.len());
    let mut acc = 0;
    for &c in counts {
        out.push(acc);
        acc += c as usize;
    }
    out
}

/// Range of indices `i` in the factor list of `(·)_d`: `0..d` for `d > 0`
/// and `d..=-1` for `d < 0`.
fn factor_range(d: i64) -> std::ops::Range<i64> {
    if d >= 0 {
        0..d
    } else {
        d..0
    }
}

fn zero_in(qpow: Option<i64>, d: i64) -> bool {
    match qpow {
        Some(k) => factor_range(d).contains(&-k),
        None => false,
    }
}

impl Localizer {
    /// `r` bounds `|d(w)|` over all terms to be evaluated.
    pub fn new(data: &LocalizationData, sample: &SamplePoint, r: i64) -> Result<Self> {
        let t = &data.theory;
        let table = weight_table_from(t, &data.chern, &data.framing);
        let offs = offsets(t.v());
        let foffs = offsets(t.w());
        let nslots: usize = t.v().iter().map(|&v| v as usize).sum();
        let q = sample.q().clone();
        let qinv = q.recip();
        let qpows: Vec<Rational> = (-r..=r)
            .map(|i| if i >= 0 { pow_r(&q, i) } else { pow_r(&qinv, -i) })
            .collect();
        let hbar = Monomial::hbar();
        let qm = Monomial::q();
        let idx = |s: Slot| match s {
            Slot::Chern(i, k) => SlotIndex::Chern(offs[i] + k),
            Slot::Framing(i, j) => SlotIndex::Framing(foffs[i] + j),
        };
        let deform = data
            .deform
            .clone()
            .unwrap_or_else(|| Deformation::by_character(&data.chern, &data.framing, false));
        let cval = |s: Slot| match s {
            Slot::Chern(i, k) => deform.chern[i][k],
            Slot::Framing(i, j) => deform.framing[i][j],
        };
        let mut entries = Vec::with_capacity(table.len());
        for e in &table {
            let xm = &hbar * &e.value;
            let ym = &qm * &e.value;
            let x = sample.eval(&xm)?.value;
            let y = sample.eval(&ym)?.value;
            entries.push(Prepared {
                mult: e.mult,
                c: cval(e.plus) - cval(e.minus),
                plus: idx(e.plus),
                minus: idx(e.minus),
                x_qpow: xm.q_power(),
                y_qpow: ym.q_power(),
                same: x == y,
                x: FactorTable::new(&x, &qpows, r),
                y: FactorTable::new(&y, &qpows, r),
            });
        }
        let chern_values = data
            .chern
            .iter()
            .map(|c| c.iter().map(|m| sample.eval(m).map(|s| s.value)).collect())
            .collect::<Result<Vec<Vec<Rational>>>>()?;
        Ok(Localizer {
            theory: t.clone(),
            nslots,
            framing_offsets: foffs,
            entries,
            chern_values,
            chern_c: deform.chern,
            q,
            r,
            sample: sample.clone(),
            msver: msver_exponents(t),
        })
    }

    pub fn nslots(&self) -> usize {
        self.nslots
    }

    /// The twist as a flat vector over framing slots.
    pub fn flat_twist(&self, sigma: Option<&Twist>) -> Vec<i64> {
        let total: usize = self.theory.w().iter().map(|&w| w as usize).sum();
        let mut out = vec![0; total];
        if let Some(s) = sigma {
            for (i, row) in s.0.iter().enumerate() {
                for (j, &x) in row.iter().enumerate() {
                    out[self.framing_offsets[i] + j] = x;
                }
            }
        }
        out
    }

    fn degrees(&self, delta: &[i64], sigma: &[i64]) -> Vec<i64> {
        let val = |s: SlotIndex| match s {
            SlotIndex::Chern(k) => delta[k],
            SlotIndex::Framing(j) => sigma[j],
        };
        self.entries.iter().map(|e| val(e.plus) - val(e.minus)).collect()
    }

    /// `∏_w [(-qħ^{-1/2})^{d} (ħv)_d/(qv)_d]^{m}` for one degree tuple.
    pub fn term(&self, delta: &[i64], sigma: &[i64], reg: Regularization) -> Result<Term> {
        // at q = ħ only the exact rule is available
        match reg {
            Regularization::Limit if !self.sample.q_equals_hbar => self.term_limit(delta, sigma),
            _ => self.term_exact(delta, sigma),
        }
    }

    fn prefactor(&self, weight_sum: i64) -> Result<Rational> {
        let pref = Monomial::from_parts(2, -1, Default::default(), Default::default(), true);
        Ok(self.sample.eval(&pref.pow(weight_sum))?.value)
    }

    fn term_limit(&self, delta: &[i64], sigma: &[i64]) -> Result<Term> {
        let ds = self.degrees(delta, sigma);
        let mut valuation = 0i64;
        let mut weight_sum = 0i64;
        let mut pole = false;
        for (e, &d) in self.entries.iter().zip(&ds) {
            weight_sum += e.mult * d;
            if d == 0 || e.same {
                continue;
            }
            if d.abs() > self.r {
                return Err(Error::Usage(format!(
                    "degree {d} beyond the prepared range {}",
                    self.r
                )));
            }
            let (top, bottom) = self.sides(e, d);
            for i in factor_range(d) {
                if top.get(i).0.is_zero() {
                    if e.c == 0 {
                        return Ok(Term::Zero);
                    }
                    valuation += 1;
                }
                if bottom.get(i).0.is_zero() {
                    if e.c == 0 {
                        pole = true;
                    }
                    valuation -= 1;
                }
            }
        }
        if pole {
            return Ok(Term::Pole);
        }
        if valuation > 0 {
            return Ok(Term::Zero);
        }
        let pref = self.prefactor(weight_sum)?;
        if valuation == 0 {
            let mut num = BigInt::one();
            let mut den = BigInt::one();
            for (e, &d) in self.entries.iter().zip(&ds) {
                if d == 0 || e.same {
                    continue;
                }
                let (top, bottom) = self.sides(e, d);
                for i in factor_range(d) {
                    let (tn, td) = top.get(i);
                    let (bn, bd) = bottom.get(i);
                    // a vanishing factor is ε times -c to leading order
                    if tn.is_zero() {
                        num *= -e.c;
                    } else {
                        num *= tn;
                        den *= td;
                    }
                    if bn.is_zero() {
                        den *= -e.c;
                    } else {
                        num *= bd;
                        den *= bn;
                    }
                }
            }
            let v = Rational::new(num, den) * pref;
            return Ok(if v.is_zero() { Term::Zero } else { Term::Value(v) });
        }
        let depth = (-valuation) as usize;
        let mut num = unit_series(depth);
        let mut den = unit_series(depth);
        for (e, &d) in self.entries.iter().zip(&ds) {
            if d == 0 || e.same {
                continue;
            }
            let (top, bottom) = self.sides(e, d);
            for i in factor_range(d) {
                num = series_mul(&num, &factor_series(top.get(i), e.c, depth));
                den = series_mul(&den, &factor_series(bottom.get(i), e.c, depth));
            }
        }
        let quot = series_mul(&num, &series_inv(&den));
        // ε^{-depth} · quot: entry j is the coefficient of ε^{depth - j} in quot
        let out: Vec<Rational> = (0..=depth).map(|j| &quot[depth - j] * &pref).collect();
        Ok(Term::Laurent(out))
    }

    /// The factor tables on top and at the bottom of `(ħv)_d/(qv)_d` raised
    /// to the weight's multiplicity.
    fn sides<'a>(&self, e: &'a Prepared, d: i64) -> (&'a FactorTable, &'a FactorTable) {
        let (top, bottom) = if d > 0 { (&e.x, &e.y) } else { (&e.y, &e.x) };
        if e.mult > 0 {
            (top, bottom)
        } else {
            (bottom, top)
        }
    }

    fn term_exact(&self, delta: &[i64], sigma: &[i64]) -> Result<Term> {
        let ds = self.degrees(delta, sigma);
        let mut pole = false;
        for (e, &d) in self.entries.iter().zip(&ds) {
            if d == 0 {
                continue;
            }
            if d.abs() > self.r {
                return Err(Error::Usage(format!(
                    "degree {d} beyond the prepared range {}",
                    self.r
                )));
            }
            // (x)_d/(y)_d: for d > 0 the x-factors are on top; for d < 0 the
            // y-factors are, since (x)_d = 1/∏(1 - x q^{-i}).
            let (top, bottom) = if d > 0 {
                (e.x_qpow, e.y_qpow)
            } else {
                (e.y_qpow, e.x_qpow)
            };
            let (top, bottom) = if e.mult > 0 { (top, bottom) } else { (bottom, top) };
            if zero_in(top, d) {
                return Ok(Term::Zero);
            }
            if zero_in(bottom, d) {
                pole = true;
            }
        }
        if pole {
            return Ok(Term::Pole);
        }
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        let mut weight_sum = 0i64;
        for (e, &d) in self.entries.iter().zip(&ds) {
            weight_sum += e.mult * d;
            if d == 0 || e.same {
                continue;
            }
            let (top, bottom) = if d > 0 { (&e.x, &e.y) } else { (&e.y, &e.x) };
            let (top, bottom) = if e.mult > 0 { (top, bottom) } else { (bottom, top) };
            for i in factor_range(d) {
                let (tn, td) = top.get(i);
                let (bn, bd) = bottom.get(i);
                if tn.is_zero() {
                    return Ok(Term::Zero);
                }
                if bn.is_zero() {
                    return Ok(Term::Pole);
                }
                num *= tn * bd;
                den *= td * bn;
            }
        }
        let pref = Monomial::from_parts(2, -1, Default::default(), Default::default(), true);
        let v = Rational::new(num, den) * self.sample.eval(&pref.pow(weight_sum))?.value;
        if v.is_zero() {
            return Ok(Term::Zero);
        }
        Ok(Term::Value(v))
    }

    /// A term times the descendant evaluated at the shifted Chern roots.
    pub fn term_with(
        &self,
        delta: &[i64],
        sigma: &[i64],
        tau: &Descendant,
        shift: DescendantShift,
        reg: Regularization,
    ) -> Result<Term> {
        let t = self.term(delta, sigma, reg)?;
        if tau.is_one() {
            return Ok(t);
        }
        let d = DegreeTuple::from_flat(&self.theory, delta);
        Ok(match t {
            Term::Value(v) => {
                let v = v * tau.evaluate(&self.chern_values, &d.0, &self.q, shift);
                if v.is_zero() {
                    Term::Zero
                } else {
                    Term::Value(v)
                }
            }
            Term::Laurent(l) => {
                let depth = l.len() - 1;
                let s = tau.evaluate_series(&self.chern_values, &self.chern_c, &d.0, &self.q, shift, depth);
                let out = (0..=depth)
                    .map(|j| (0..=depth - j).map(|m| &l[j + m] * &s[m]).sum())
                    .collect();
                Term::Laurent(out)
            }
            other => other,
        })
    }

    /// Total `Σ_w m(w) d(w)` for a degree tuple.
    pub fn weight_degree_sum(&self, delta: &[i64], sigma: &[i64]) -> i64 {
        self.degrees(delta, sigma)
            .iter()
            .zip(&self.entries)
            .map(|(d, e)| d * e.mult)
            .sum()
    }

    /// The vertex series.
    pub fn vertex(&self, opts: &VertexOptions) -> Result<TruncatedSeries> {
        let t = &self.theory;
        if !t.is_positive() {
            return Err(Error::Usage("vertex functions need positive stability".into()));
        }
        let sigma = self.flat_twist(opts.twist.as_ref());
        let tuples = degree_tuples(self.nslots, opts.order);
        type Contribution = Option<(Vec<u32>, Vec<Rational>)>;
        let results: Vec<Result<Contribution>> = tuples
            .par_iter()
            .map(|flat| {
                let term = self.term_with(flat, &sigma, &opts.descendant, opts.shift, opts.regularization)?;
                let mut l = match term {
                    Term::Zero => return Ok(None),
                    Term::Pole => return Err(Error::Pole(flat.clone())),
                    Term::Value(v) => vec![v],
                    Term::Laurent(l) => l,
                };
                let deg = DegreeTuple::from_flat(t, flat).degree();
                if opts.normalized {
                    let k: i64 = deg.iter().zip(&self.msver).map(|(d, a)| d * a).sum();
                    let n = Monomial::from_parts(0, -1, Default::default(), Default::default(), true);
                    let f = self.sample.eval(&n.pow(k))?.value;
                    for c in &mut l {
                        *c *= &f;
                    }
                }
                Ok(Some((deg.iter().map(|&d| d as u32).collect(), l)))
            })
            .collect();
        let mut acc = LaurentSum::default();
        for r in results {
            if let Some((e, l)) = r? {
                acc.add(e, &l);
            }
        }
        acc.finish(t.n(), opts.order)
    }
}

/// Laurent coefficients in `ε` summed per exponent of `z`.
#[derive(Default)]
pub(crate) struct LaurentSum {
    terms: BTreeMap<Vec<u32>, Vec<Rational>>,
}

impl LaurentSum {
    /// `l[j]` is the coefficient of `ε^{-j}`.
    pub(crate) fn add(&mut self, e: Vec<u32>, l: &[Rational]) {
        let slot = self.terms.entry(e).or_default();
        if slot.len() < l.len() {
            slot.resize(l.len(), Rational::zero());
        }
        for (s, c) in slot.iter_mut().zip(l) {
            *s += c;
        }
    }

    /// The `ε⁰` parts; an uncancelled negative power is reported as a pole.
    pub(crate) fn finish(self, nvars: usize, order: u32) -> Result<TruncatedSeries> {
        let mut out = TruncatedSeries::zero(nvars, order);
        for (e, l) in self.terms {
            if l.iter().skip(1).any(|c| !c.is_zero()) {
                return Err(Error::NonTruncating(format!(
                    "poles in the regularization parameter do not cancel at z^{e:?}"
                )));
            }
            if let Some(c) = l.into_iter().next() {
                out.add_term(e, Scalar::new(c));
            }
        }
        Ok(out)
    }
}

fn unit_series(depth: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); depth + 1];
    v[0] = Rational::one();
    v
}

/// Generalized binomial coefficient `C(c, j)`.
fn binom(c: i64, j: usize) -> Rational {
    let mut out = Rational::one();
    for t in 0..j as i64 {
        out = out * Rational::from_integer(BigInt::from(c - t)) / Rational::from_integer(BigInt::from(t + 1));
    }
    out
}

/// `(1+ε)^c` to `depth`.
fn power_series(c: i64, depth: usize) -> Vec<Rational> {
    (0..=depth).map(|j| binom(c, j)).collect()
}

/// `1 - u (1+ε)^c` from `1 - u = n/d`, divided by `ε` when it vanishes at `ε = 0`.
fn factor_series(f0: &(BigInt, BigInt), c: i64, depth: usize) -> Vec<Rational> {
    if f0.0.is_zero() {
        return (0..=depth).map(|j| -binom(c, j + 1)).collect();
    }
    let f = Rational::new(f0.0.clone(), f0.1.clone());
    let u = Rational::one() - &f;
    let mut out: Vec<Rational> = (0..=depth).map(|j| -(&u * binom(c, j))).collect();
    out[0] = f;
    out
}

fn series_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().min(b.len());
    (0..n).map(|k| (0..=k).map(|i| &a[i] * &b[k - i]).sum()).collect()
}

fn series_inv(a: &[Rational]) -> Vec<Rational> {
    let inv0 = a[0].recip();
    let mut out = vec![inv0.clone()];
    for k in 1..a.len() {
        let s: Rational = (1..=k).map(|i| &a[i] * &out[k - i]).sum();
        out.push(-(s * &inv0));
    }
    out
}

/// All nonnegative vectors of length `n` with entry sum at most `order`,
/// in lexicographic order.
pub fn degree_tuples(n: usize, order: u32) -> Vec<Vec<i64>> {
    fn rec(i: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for x in 0..=left {
            cur[i] = x;
            rec(i + 1, left - x, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    rec(0, order as i64, &mut cur, &mut out);
    out
}

fn range_for(order: u32, sigma: Option<&Twist>) -> i64 {
    let s = sigma
        .map(|t| t.0.iter().flatten().map(|x| x.abs()).max().unwrap_or(0))
        .unwrap_or(0);
    order as i64 + s + 1
}

/// The coefficient of one degree tuple, as a [`Scalar`] (pole flag set on
/// an unremovable zero denominator).
pub fn term_coefficient(
    p: &FixedPointData,
    delta: &DegreeTuple,
    sigma: &Twist,
    sample: &SamplePoint,
) -> Result<Scalar> {
    let flat = delta.flat();
    let total: i64 = flat.iter().sum();
    let r = range_for(total.max(0) as u32, Some(sigma));
    let loc = Localizer::new(&LocalizationData::from_point(p), sample, r)?;
    let s = loc.flat_twist(Some(sigma));
    Ok(match loc.term(&flat, &s, Regularization::Exact)? {
        Term::Zero => Scalar::zero(),
        Term::Pole | Term::Laurent(_) => Scalar::pole(),
        Term::Value(v) => Scalar::new(v),
    })
}

/// Vertex of a fixed point.
pub fn vertex(p: &FixedPointData, opts: &VertexOptions, sample: &SamplePoint) -> Result<TruncatedSeries> {
    vertex_from(&LocalizationData::from_point(p), opts, sample)
}

pub fn vertex_from(
    data: &LocalizationData,
    opts: &VertexOptions,
    sample: &SamplePoint,
) -> Result<TruncatedSeries> {
    let r = range_for(opts.order, opts.twist.as_ref());
    Localizer::new(data, sample, r)?.vertex(opts)
}

/// The right side of the twisted/untwisted relation: substitute
/// `a ↦ a q^σ`, multiply by `∏_w [(ħv)_{s}/(qv)_{s}]^{m}` and
/// `(-qħ^{-1/2})^{Σ m s}`, and shift by `z^{S}` with `S_i = Σ_k s_{i,k}`.
/// Here `s` is the σ-degree of each Chern root and weight.
pub fn twist_shift_rhs(
    p: &FixedPointData,
    sigma: &Twist,
    order: u32,
    sample: &SamplePoint,
) -> Result<TruncatedSeries> {
    let t = &p.theory;
    let mut s_chern = Vec::new();
    for c in &p.chars {
        let mut row = Vec::new();
        for m in c {
            let s = sigma.degree_of(t, m)?;
            if s < 0 {
                return Err(Error::Usage("negative σ-degrees are not supported".into()));
            }
            row.push(s);
        }
        s_chern.push(row);
    }
    let shifted_chern: Vec<Vec<Monomial>> = p
        .chars
        .iter()
        .zip(&s_chern)
        .map(|(c, s)| c.iter().zip(s).map(|(m, &k)| m * &Monomial::q().pow(k)).collect())
        .collect();
    let framing = default_framing(t);
    let shifted_framing: Vec<Vec<Monomial>> = framing
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, a)| a * &Monomial::q().pow(sigma.0[i][j]))
                .collect()
        })
        .collect();
    let shift: Vec<i64> = s_chern.iter().map(|r| r.iter().sum()).collect();
    let total: i64 = shift.iter().sum();
    if total > order as i64 {
        return Ok(TruncatedSeries::zero(t.n(), order));
    }
    let inner_order = order - total as u32;
    let data = LocalizationData {
        theory: t.clone(),
        chern: shifted_chern,
        framing: shifted_framing,
        deform: None,
    };
    let inner = vertex_from(&data, &VertexOptions::new(inner_order), sample)?;

    let table = weight_table(p);
    let sval = |s: Slot| match s {
        Slot::Chern(i, k) => s_chern[i][k],
        Slot::Framing(i, j) => sigma.0[i][j],
    };
    let q = sample.q().clone();
    let mut factor = Scalar::one();
    let mut weight_sum = 0i64;
    for e in &table {
        let s = sval(e.plus) - sval(e.minus);
        if s == 0 {
            continue;
        }
        weight_sum += e.mult * s;
        let hv = sample.eval(&(&Monomial::hbar() * &e.value))?;
        let qv = sample.eval(&(&Monomial::q() * &e.value))?;
        let ratio = &pochhammer(&hv, s, &q) / &pochhammer(&qv, s, &q);
        factor = &factor * &ratio.pow(e.mult);
    }
    let pref = Monomial::from_parts(2, -1, Default::default(), Default::default(), true);
    factor = &factor * &sample.eval(&pref.pow(weight_sum))?;
    if factor.pole {
        return Err(Error::Pole(shift));
    }
    let mut out = TruncatedSeries::zero(t.n(), order);
    for (e, c) in inner.terms() {
        let f: Vec<u32> = e.iter().zip(&shift).map(|(a, b)| a + *b as u32).collect();
        out.add_term(f, c * &factor);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed::{builder_tstar_grassmannian, zero_dim_point};
    use crate::scalar::{int, rat};

    fn a3_point() -> FixedPointData {
        let t = QuiverGaugeTheory::simple(&[(1, 2), (2, 3)], &[1, 2, 1], &[0, 1, 0]).unwrap();
        zero_dim_point(&t).unwrap()
    }

    #[test]
    fn empty_table_for_zero_rank() {
        let t = QuiverGaugeTheory::simple(&[(1, 2)], &[0, 0], &[1, 1]).unwrap();
        let p = FixedPointData::new(t, vec![vec![], vec![]]).unwrap();
        assert!(weight_table(&p).is_empty());
    }

    #[test]
    fn a3_table_shape() {
        let p = a3_point();
        let t = weight_table(&p);
        // 2 + 2 arrow weights, 2 framing weights, 1 + 4 + 1 diagonal weights
        assert_eq!(t.len(), 12);
        assert_eq!(t.iter().filter(|e| e.mult < 0).count(), 6);
        let trivial: Vec<_> = t.iter().filter(|e| e.plus == e.minus).collect();
        assert_eq!(trivial.len(), 4);
        assert!(trivial
            .iter()
            .all(|e| e.value.is_one() && e.covector().is_empty()));
    }

    #[test]
    fn zero_degree_gives_one() {
        let p = a3_point();
        let s = SamplePoint::new(1, &p.framing_vars());
        let c = term_coefficient(&p, &DegreeTuple::zero(&p.theory), &Twist::zero(&p.theory), &s).unwrap();
        assert_eq!(c, Scalar::one());
    }

    #[test]
    fn a3_vanishing_outside_constraints() {
        let p = a3_point();
        let s = SamplePoint::new(1, &p.framing_vars());
        // chars sorted: 𝒱_2 = {a, aħ}; d_{2,1} is the slot of a
        let d = DegreeTuple(vec![vec![0], vec![1, 1], vec![1]]);
        let c = term_coefficient(&p, &d, &Twist::zero(&p.theory), &s).unwrap();
        assert!(c.is_zero());
    }

    #[test]
    fn grassmannian_term_matches_closed_form() {
        // T*Gr(1,2), 𝒱 = a1, δ = (1): one framing weight a1/a2 of degree 1,
        // the weight a1/a1 of degree 1, and the diagonal of degree 0.
        let p = builder_tstar_grassmannian(1, 2, &[1]).unwrap();
        let s = SamplePoint::new(4, &p.framing_vars());
        let c = term_coefficient(&p, &DegreeTuple(vec![vec![1]]), &Twist::zero(&p.theory), &s).unwrap();
        let q = s.q().clone();
        let h = s.hbar().clone();
        let a1 = s.framing_values()[&FramingVar::new("1", 1)].clone();
        let a2 = s.framing_values()[&FramingVar::new("1", 2)].clone();
        let x = &a1 / &a2;
        let one = Rational::one();
        let expect = (&one - &h) / (&one - &q) * (&one - &h * &x) / (&one - &q * &x) * (&q * &q / &h);
        assert_eq!(c.value, expect);
    }

    #[test]
    fn degree_tuple_counts() {
        assert_eq!(degree_tuples(4, 6).len(), 210);
        assert_eq!(degree_tuples(16, 4).len(), 4845);
        assert_eq!(degree_tuples(0, 3), vec![Vec::<i64>::new()]);
    }

    #[test]
    fn descendant_symmetry_is_enforced() {
        let bad = Descendant::one().with_vertex(0, &[(int(1), vec![1, 0])]);
        assert!(bad.is_err());
        let good = Descendant::one()
            .with_vertex(0, &[(int(1), vec![1, 0]), (int(1), vec![0, 1])])
            .unwrap();
        assert!(good.monomial_exponents().is_none());
    }

    #[test]
    fn constant_term_is_one() {
        let p = builder_tstar_grassmannian(1, 3, &[2]).unwrap();
        let s = SamplePoint::new(2, &p.framing_vars());
        let v = vertex(&p, &VertexOptions::new(3), &s).unwrap();
        assert_eq!(v.coeff(&[0]), Scalar::one());
    }

    #[test]
    fn series_inverse() {
        let a = vec![int(2), int(3), int(-1), rat(1, 2)];
        let p = series_mul(&a, &series_inv(&a));
        assert_eq!(p, unit_series(3));
    }

    #[test]
    fn vanishing_factor_divides_by_eps() {
        // 1 - (1+ε)^3 = -3ε - 3ε² - ε³
        let f = factor_series(&(BigInt::zero(), BigInt::one()), 3, 3);
        assert_eq!(f, vec![int(-3), int(-3), int(-1), int(0)]);
        assert_eq!(power_series(-1, 3), vec![int(1), int(-1), int(1), int(-1)]);
    }

    #[test]
    fn uncancelled_poles_are_reported() {
        let mut acc = LaurentSum::default();
        acc.add(vec![1], &[int(1), int(2)]);
        assert!(acc.finish(1, 2).is_err());
        let mut acc = LaurentSum::default();
        acc.add(vec![1], &[int(1), int(2)]);
        acc.add(vec![1], &[int(1), int(-2)]);
        assert_eq!(acc.finish(1, 2).unwrap().coeff(&[1]), Scalar::new(int(2)));
    }

    #[test]
    fn regularizations_agree_at_isolated_points() {
        let p = builder_tstar_grassmannian(1, 2, &[1]).unwrap();
        let s = SamplePoint::new(3, &p.framing_vars());
        let e = vertex(
            &p,
            &VertexOptions::new(4).regularization(Regularization::Exact),
            &s,
        )
        .unwrap();
        let l = vertex(
            &p,
            &VertexOptions::new(4).regularization(Regularization::Limit),
            &s,
        )
        .unwrap();
        assert_eq!(e, l);
    }

    #[test]
    fn equal_characters_share_exponents() {
        let p = a3_point();
        let d = Deformation::by_character(&p.chars, &default_framing(&p.theory), false);
        // 𝒱_1 = {aħ}, 𝒱_2 = {a, aħ}, 𝒱_3 = {a}
        let aq = d.chern[0][0];
        let k = p.chars[1].iter().position(|m| *m == p.chars[0][0]).unwrap();
        assert_eq!(d.chern[1][k], aq);
        assert_ne!(d.chern[1][1 - k], aq);
        assert_eq!(d.chern[2][0], d.chern[1][1 - k]);
        assert_eq!(d.framing, vec![vec![], vec![0], vec![]]);
    }
}
