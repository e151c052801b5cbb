//! Roots, Weyl words and pairings for the Kac-Moody algebra of a loopless quiver.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::series::TruncatedSeries;

/// Symmetric generalized Cartan matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CartanData {
    pub matrix: Vec<Vec<i64>>,
}

impl CartanData {
    /// `C_ii = 2`, `C_ij = -#{arrows between i and j}`.
    pub fn from_arrows(n: usize, arrows: &[(usize, usize)]) -> Result<Self> {
        let mut matrix = vec![vec![0i64; n]; n];
        for (i, row) in matrix.iter_mut().enumerate() {
            row[i] = 2;
        }
        for &(t, h) in arrows {
            if t == h {
                return Err(Error::Invalid(format!("loop at vertex {t}")));
            }
            if t >= n || h >= n {
                return Err(Error::Invalid(format!("arrow ({t},{h}) out of range")));
            }
            matrix[t][h] -= 1;
            matrix[h][t] -= 1;
        }
        Ok(CartanData { matrix })
    }

    pub fn rank(&self) -> usize {
        self.matrix.len()
    }

    /// `(α, β) = αᵀ C β`.
    pub fn form(&self, a: &RootVec, b: &RootVec) -> i64 {
        let n = self.rank();
        let mut s = 0;
        for i in 0..n {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..n {
                s += a.0[i] * self.matrix[i][j] * b.0[j];
            }
        }
        s
    }

    /// `(α, α_i)`.
    pub fn with_simple(&self, a: &RootVec, i: usize) -> i64 {
        (0..self.rank()).map(|j| a.0[j] * self.matrix[j][i]).sum()
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).map(|(c, x)| c * x).sum())
            .collect()
    }
}

/// `α = Σ n_i α_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootVec(pub Vec<i64>);

impl RootVec {
    pub fn simple(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        RootVec(v)
    }

    pub fn height(&self) -> i64 {
        self.0.iter().sum()
    }

    pub fn is_positive(&self) -> bool {
        self.0.iter().all(|&x| x >= 0) && self.0.iter().any(|&x| x > 0)
    }

    pub fn neg(&self) -> Self {
        RootVec(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        RootVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Renders as `α1+2α2`, `-α3`, ...
    pub fn display(&self) -> String {
        let mut s = String::new();
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if c < 0 {
                s.push('-');
            } else if !s.is_empty() {
                s.push('+');
            }
            if c.abs() != 1 {
                s.push_str(&c.abs().to_string());
            }
            s.push_str(&format!("α{}", i + 1));
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

/// `s_i(α) = α - (α, α_i) α_i`.
pub fn reflect(c: &CartanData, a: &RootVec, i: usize) -> RootVec {
    let p = c.with_simple(a, i);
    let mut out = a.clone();
    out.0[i] -= p;
    out
}

/// Positive real roots of height at most `h`, by breadth-first search over
/// reflections of simple roots. Every positive real root of height `k > 1`
/// is a reflection of one of height `< k`, so pruning at `h` loses nothing.
pub fn positive_real_roots(c: &CartanData, h: i64) -> BTreeSet<RootVec> {
    let n = c.rank();
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    if h < 1 {
        return seen;
    }
    for i in 0..n {
        let r = RootVec::simple(n, i);
        seen.insert(r.clone());
        queue.push_back(r);
    }
    while let Some(r) = queue.pop_front() {
        for i in 0..n {
            let s = reflect(c, &r, i);
            if s.is_positive() && s.height() <= h && !seen.contains(&s) {
                seen.insert(s.clone());
                queue.push_back(s);
            }
        }
    }
    seen
}

/// `λ = Σ w_i ϖ_i` and `μ = λ - Σ v_i α_i` over a Cartan matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightContext {
    pub cartan: CartanData,
    pub v: Vec<i64>,
    pub w: Vec<i64>,
}

impl WeightContext {
    pub fn new(cartan: CartanData, v: Vec<i64>, w: Vec<i64>) -> Self {
        assert_eq!(cartan.rank(), v.len());
        assert_eq!(cartan.rank(), w.len());
        WeightContext { cartan, v, w }
    }

    /// `p_i = (α_i, μ) = w_i - (C v)_i`.
    pub fn mu_pairings(&self) -> Vec<i64> {
        let cv = self.cartan.apply(&self.v);
        self.w.iter().zip(cv).map(|(w, x)| w - x).collect()
    }

    pub fn pairing(&self, a: &RootVec) -> i64 {
        self.mu_pairings().iter().zip(&a.0).map(|(p, n)| p * n).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootReport {
    /// Positive real roots with `(α, μ) < 0`, with that pairing.
    pub roots: Vec<(RootVec, i64)>,
    /// Raising word from `μ` to `λ`, 0-based vertex indices.
    pub word: Vec<usize>,
    pub in_orbit: bool,
    /// Set when the roots come from a height-capped enumeration.
    pub truncated: bool,
}

/// Greedy raising from `μ` to `λ`.
///
/// Each step adds a positive multiple of `α_i` to `ν`, so `Σ v` strictly
/// drops and the loop ends within `Σ v` steps. If `ν` becomes dominant
/// before reaching `λ` (or overshoots it), `μ` is not in `Wλ`.
pub fn extremal_word(ctx: &WeightContext) -> RootReport {
    let c = &ctx.cartan;
    let n = c.rank();
    let mut rest = ctx.v.clone();
    let mut word = Vec::new();
    let cap: i64 = ctx.v.iter().sum();
    let mut in_orbit = false;
    for _ in 0..=cap {
        if rest.iter().all(|&x| x == 0) {
            in_orbit = true;
            break;
        }
        if rest.iter().any(|&x| x < 0) {
            break;
        }
        let cv = c.apply(&rest);
        let pair: Vec<i64> = (0..n).map(|i| ctx.w[i] - cv[i]).collect();
        match (0..n).find(|&i| pair[i] < 0) {
            Some(i) => {
                rest[i] += pair[i];
                word.push(i);
            }
            None => break,
        }
    }
    if !in_orbit {
        let cap_h = (2 * cap).max(4);
        let roots = positive_real_roots(c, cap_h)
            .into_iter()
            .filter_map(|a| {
                let p = ctx.pairing(&a);
                (p < 0).then_some((a, p))
            })
            .collect();
        return RootReport {
            roots,
            word,
            in_orbit: false,
            truncated: true,
        };
    }
    let mut roots = Vec::with_capacity(word.len());
    for t in 0..word.len() {
        let mut b = RootVec::simple(n, word[t]);
        for &i in word[..t].iter().rev() {
            b = reflect(c, &b, i);
        }
        let p = ctx.pairing(&b);
        roots.push((b, p));
    }
    RootReport {
        roots,
        word,
        in_orbit: true,
        truncated: false,
    }
}

/// `Σ |(α, μ)| = Σ v_i` over the report.
pub fn dim_identity_check(ctx: &WeightContext) -> bool {
    let r = extremal_word(ctx);
    let lhs: i64 = r.roots.iter().map(|(_, p)| -p).sum();
    r.in_orbit && lhs == ctx.v.iter().sum::<i64>()
}

/// `Σ v_i (2 w_i - (C v)_i)`.
pub fn quiver_variety_dim(ctx: &WeightContext) -> i64 {
    let cv = ctx.cartan.apply(&ctx.v);
    (0..ctx.v.len()).map(|i| ctx.v[i] * (2 * ctx.w[i] - cv[i])).sum()
}

/// One term `ħ^k e^{root}` of a character.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CharacterTerm {
    pub hbar: i64,
    pub root: RootVec,
}

impl CharacterTerm {
    pub fn display(&self) -> String {
        format!("ħ^{}·e^({})", self.hbar, self.root.display())
    }
}

fn require_orbit(ctx: &WeightContext, what: &str) -> Result<RootReport> {
    let r = extremal_word(ctx);
    if !r.in_orbit {
        return Err(Error::Invalid(format!("{what}: μ is not in the Weyl orbit of λ")));
    }
    Ok(r)
}

/// Terms `ħ^{1-i} e^{α} + ħ^{i} e^{-α}` for negative roots `α` and
/// `1 ≤ i ≤ ⟨α,μ⟩`.
pub fn dual_tangent_character(ctx: &WeightContext) -> Result<Vec<CharacterTerm>> {
    let r = require_orbit(ctx, "tangent character")?;
    Ok(tangent_terms(&r, |_| 0))
}

fn tangent_terms(r: &RootReport, shift: impl Fn(&RootVec) -> i64) -> Vec<CharacterTerm> {
    let mut out = Vec::new();
    for (beta, p) in &r.roots {
        let alpha = beta.neg();
        let m = -p;
        let s = shift(&alpha);
        for i in 1..=m {
            out.push(CharacterTerm {
                hbar: 1 - i - s,
                root: alpha.clone(),
            });
            out.push(CharacterTerm {
                hbar: i + s,
                root: beta.clone(),
            });
        }
    }
    out
}

/// `∏ (1 - e^{α})^{-⟨α,μ⟩}` over negative roots, as a series in
/// `y_i = e^{-α_i}`.
pub fn gt_character(ctx: &WeightContext, order: u32) -> Result<TruncatedSeries> {
    let r = require_orbit(ctx, "graded character")?;
    let n = ctx.cartan.rank();
    let mut out = TruncatedSeries::one(n, order);
    for (beta, p) in &r.roots {
        let e: Vec<u32> = beta.0.iter().map(|&x| x as u32).collect();
        let g = TruncatedSeries::monomial(n, order, e, Scalar::one()).geometric()?;
        out = out.mul(&g.pow((-p) as u32));
    }
    Ok(out)
}

/// The cumulative-shift tangent character of a decomposition
/// `λ = Σ λ_k`, `μ = Σ μ_k`, each component given by its `(w_k, v_k)`.
pub fn convolution_tangent_character(
    cartan: &CartanData,
    components: &[(Vec<i64>, Vec<i64>)],
) -> Result<Vec<CharacterTerm>> {
    let mut out = Vec::new();
    let mut earlier: Vec<WeightContext> = Vec::new();
    for (k, (w, v)) in components.iter().enumerate() {
        let ctx = WeightContext::new(cartan.clone(), v.clone(), w.clone());
        let r = extremal_word(&ctx);
        if !r.in_orbit {
            return Err(Error::Invalid(format!(
                "component {} is not in the Weyl orbit of its λ",
                k + 1
            )));
        }
        out.extend(tangent_terms(&r, |alpha| {
            earlier.iter().map(|c| c.pairing(alpha)).sum()
        }));
        earlier.push(ctx);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a_n(n: usize) -> CartanData {
        let arrows: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        CartanData::from_arrows(n, &arrows).unwrap()
    }

    fn d4() -> CartanData {
        CartanData::from_arrows(4, &[(0, 1), (1, 2), (1, 3)]).unwrap()
    }

    /// Independent test for real positive roots: descend by reflections
    /// that lower the height; real roots reach a simple root.
    fn is_real_by_descent(c: &CartanData, a: &RootVec) -> bool {
        let mut a = a.clone();
        loop {
            if !a.is_positive() {
                return false;
            }
            if a.height() == 1 {
                return true;
            }
            match (0..c.rank()).find(|&i| c.with_simple(&a, i) > 0) {
                Some(i) => a = reflect(c, &a, i),
                None => return false,
            }
        }
    }

    fn brute_force_roots(c: &CartanData, h: i64) -> BTreeSet<RootVec> {
        let n = c.rank();
        let mut out = BTreeSet::new();
        let mut cur = vec![0i64; n];
        fn rec(
            c: &CartanData,
            i: usize,
            left: i64,
            cur: &mut Vec<i64>,
            out: &mut BTreeSet<RootVec>,
            descend: &dyn Fn(&CartanData, &RootVec) -> bool,
        ) {
            if i == cur.len() {
                let r = RootVec(cur.clone());
                if r.is_positive() && descend(c, &r) {
                    out.insert(r);
                }
                return;
            }
            for x in 0..=left {
                cur[i] = x;
                rec(c, i + 1, left - x, cur, out, descend);
            }
            cur[i] = 0;
        }
        rec(c, 0, h, &mut cur, &mut out, &is_real_by_descent);
        let _ = n;
        out
    }

    #[test]
    fn reflections() {
        let c = a_n(2);
        assert_eq!(reflect(&c, &RootVec(vec![1, 0]), 1), RootVec(vec![1, 1]));
        assert_eq!(reflect(&c, &RootVec(vec![1, 0]), 0), RootVec(vec![-1, 0]));
    }

    #[test]
    fn root_counts_match_brute_force() {
        assert_eq!(positive_real_roots(&a_n(2), 2).len(), 3);
        assert_eq!(positive_real_roots(&a_n(3), 3).len(), 6);
        assert_eq!(positive_real_roots(&d4(), 5).len(), 12);
        for (c, h) in [(a_n(3), 3), (d4(), 5), (a_n(4), 4)] {
            assert_eq!(positive_real_roots(&c, h), brute_force_roots(&c, h));
        }
        // a hyperbolic case: triangle with a doubled edge
        let c = CartanData::from_arrows(3, &[(0, 1), (1, 2), (2, 0), (0, 1)]).unwrap();
        assert_eq!(positive_real_roots(&c, 7), brute_force_roots(&c, 7));
    }

    #[test]
    fn a3_example_roots() {
        let ctx = WeightContext::new(a_n(3), vec![1, 2, 1], vec![0, 1, 0]);
        let r = extremal_word(&ctx);
        assert!(r.in_orbit);
        let got: BTreeSet<_> = r.roots.iter().cloned().collect();
        let want: BTreeSet<_> = [
            (RootVec(vec![0, 1, 0]), -1),
            (RootVec(vec![1, 1, 0]), -1),
            (RootVec(vec![0, 1, 1]), -1),
            (RootVec(vec![1, 1, 1]), -1),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
        assert!(dim_identity_check(&ctx));
        assert_eq!(quiver_variety_dim(&ctx), 0);
    }

    #[test]
    fn d4_example_roots() {
        let ctx = WeightContext::new(d4(), vec![1, 2, 1, 2], vec![0, 1, 0, 0]);
        let r = extremal_word(&ctx);
        assert!(r.in_orbit);
        let twos: Vec<_> = r.roots.iter().filter(|(_, p)| *p == -2).collect();
        assert_eq!(twos, vec![&(RootVec(vec![0, 0, 0, 1]), -2)]);
        assert_eq!(r.roots.iter().filter(|(_, p)| *p == -1).count(), 4);
        assert!(dim_identity_check(&ctx));
    }

    #[test]
    fn trivial_word() {
        let ctx = WeightContext::new(a_n(2), vec![0, 0], vec![1, 0]);
        let r = extremal_word(&ctx);
        assert!(r.in_orbit && r.word.is_empty() && r.roots.is_empty());
        assert!(dual_tangent_character(&ctx).unwrap().is_empty());
        assert_eq!(gt_character(&ctx, 3).unwrap(), TruncatedSeries::one(2, 3));
    }

    #[test]
    fn not_in_orbit() {
        // T*P^1 is two dimensional, so μ is not extremal
        let ctx = WeightContext::new(a_n(1), vec![1], vec![2]);
        let r = extremal_word(&ctx);
        assert!(!r.in_orbit);
        assert!(r.truncated);
    }

    #[test]
    fn dimensions() {
        for (k, n) in [(1, 2), (2, 4), (1, 3), (3, 5)] {
            let ctx = WeightContext::new(a_n(1), vec![k], vec![n]);
            assert_eq!(quiver_variety_dim(&ctx), 2 * k * (n - k));
        }
        let ctx = WeightContext::new(a_n(2), vec![1, 2], vec![0, 3]);
        assert_eq!(quiver_variety_dim(&ctx), 6);
    }

    #[test]
    fn a1_tangent_and_gt() {
        let ctx = WeightContext::new(a_n(1), vec![1], vec![1]);
        let t = dual_tangent_character(&ctx).unwrap();
        assert_eq!(
            t,
            vec![
                CharacterTerm {
                    hbar: 0,
                    root: RootVec(vec![-1])
                },
                CharacterTerm {
                    hbar: 1,
                    root: RootVec(vec![1])
                },
            ]
        );
        let g = gt_character(&ctx, 5).unwrap();
        for k in 0..=5 {
            assert_eq!(g.coeff(&[k]), Scalar::one());
        }
    }

    #[test]
    fn convolution_two_components() {
        // λ_1 = λ_2 = ϖ on A_1; μ_1 = ϖ (v = 0), μ_2 = -ϖ (v = 1).
        // ⟨-α, μ_1⟩ = -1 shifts the ħ exponents of the second component.
        let c = a_n(1);
        let t = convolution_tangent_character(&c, &[(vec![1], vec![0]), (vec![1], vec![1])]).unwrap();
        assert_eq!(
            t,
            vec![
                CharacterTerm {
                    hbar: 1,
                    root: RootVec(vec![-1])
                },
                CharacterTerm {
                    hbar: 0,
                    root: RootVec(vec![1])
                },
            ]
        );
        let single = convolution_tangent_character(&c, &[(vec![1], vec![1])]).unwrap();
        let ctx = WeightContext::new(c, vec![1], vec![1]);
        assert_eq!(single, dual_tangent_character(&ctx).unwrap());
    }

    #[test]
    fn convolution_rejects_bad_component() {
        let c = a_n(1);
        let e = convolution_tangent_character(&c, &[(vec![1], vec![0]), (vec![2], vec![1])]);
        assert!(e.unwrap_err().to_string().contains("component 2"));
    }
}
