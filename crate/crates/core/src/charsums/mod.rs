//! Character sums over sign-restricted sets, the interval ladder, the Ramaré
//! decomposition and the mean-value checks.

mod bounds;
mod ladder;
mod ramare;

pub use bounds::*;
pub use ladder::*;
pub use ramare::*;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{
    factorize, is_prime, mertens_product, IntegerInterval, PrimeSieve, ProductMode,
};
use crate::error::{domain, Result};
use crate::group::{CosetSpec, DirichletCharacter, UnitGroup};
use crate::multfunc::{rough, MultiplicativeFunction, Sign};

/// Comparison of a computed moment against the shape of its bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumReport {
    pub lemma: String,
    pub lhs: f64,
    pub rhs_shape: f64,
    pub ratio: f64,
    /// True only when the bound has an explicit constant and was checked.
    pub asserted: bool,
    pub holds: Option<bool>,
}

impl SumReport {
    pub fn shape(lemma: &str, lhs: f64, rhs_shape: f64) -> Self {
        SumReport {
            lemma: lemma.into(),
            lhs,
            rhs_shape,
            ratio: lhs / rhs_shape,
            asserted: false,
            holds: None,
        }
    }

    pub fn checked(lemma: &str, lhs: f64, rhs: f64, tol: f64) -> Self {
        SumReport {
            lemma: lemma.into(),
            lhs,
            rhs_shape: rhs,
            ratio: lhs / rhs,
            asserted: true,
            holds: Some(lhs <= rhs * (1.0 + tol) + tol),
        }
    }
}

/// Accumulates weights per unit class; non-units are dropped since every χ vanishes there.
pub fn class_histogram(
    g: &UnitGroup,
    items: impl IntoIterator<Item = (u64, Complex64)>,
) -> Vec<Complex64> {
    let mut hist = vec![Complex64::new(0.0, 0.0); g.units().len()];
    for (n, w) in items {
        if let Some(i) = g.index_of(n % g.q) {
            hist[i] += w;
        }
    }
    hist
}

/// Σ_c hist(c) conj χ(c) for one character.
pub fn sum_conj(g: &UnitGroup, chi: &DirichletCharacter, hist: &[Complex64]) -> Complex64 {
    let m = g.exponent();
    hist.iter()
        .enumerate()
        .filter(|(_, w)| w.re != 0.0 || w.im != 0.0)
        .map(|(i, &w)| {
            let k = chi.exponent_at_index(g, i);
            w * g.root((m - k) % m)
        })
        .sum()
}

/// Σ_c hist(c) conj χ(c) for every character, in character-index order.
pub fn sums_conj_all(g: &UnitGroup, hist: &[Complex64]) -> Vec<Complex64> {
    (0..g.character_count())
        .map(|c| sum_conj(g, &g.character(c), hist))
        .collect()
}

/// (1/norm) Σ_{n in set} conj χ(n) for every character.
pub fn normalized_sums(g: &UnitGroup, set: &[u64], norm: f64) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    let hist = class_histogram(g, set.iter().map(|&n| (n, one)));
    sums_conj_all(g, &hist)
        .into_iter()
        .map(|s| s / norm)
        .collect()
}

/// f^Δ restricted to [I]_q, tabulated with its Fourier transform.
#[derive(Debug, Clone)]
pub struct IntervalFunction {
    pub q: u64,
    pub interval: IntegerInterval,
    pub normalizer: f64,
    /// (n, f(n)) for n ∈ [I]_q with f(n) ≠ 0.
    pub support: Vec<(u64, f64)>,
    /// |[I]_q|.
    pub unit_count: u64,
    /// |{n ∈ [I]_q : n is z-rough}|.
    pub rough_count: u64,
}

impl IntervalFunction {
    pub fn value(&self, n: u64) -> f64 {
        match self.support.binary_search_by_key(&n, |&(m, _)| m) {
            Ok(i) => self.support[i].1,
            Err(_) => 0.0,
        }
    }

    /// Class histogram h(c) = Σ_{n ≡ c} f(n).
    pub fn histogram(&self, g: &UnitGroup) -> Vec<Complex64> {
        class_histogram(
            g,
            self.support
                .iter()
                .map(|&(n, v)| (n, Complex64::new(v, 0.0))),
        )
    }

    /// F(χ) = E_{n∈[I]_q} f(n) conj χ(n) for every character.
    pub fn hat(&self, g: &UnitGroup) -> Vec<Complex64> {
        let hist = self.histogram(g);
        sums_conj_all(g, &hist)
            .into_iter()
            .map(|s| s / self.unit_count as f64)
            .collect()
    }

    pub fn hat_at(&self, g: &UnitGroup, chi: &DirichletCharacter) -> Complex64 {
        sum_conj(g, chi, &self.histogram(g)) / self.unit_count as f64
    }
}

/// f^Δ(n) = Π_{p<z, p∤q}(1 − 1/p)^{-1} · 1[sgn h(n) = Δ] · 1[n is z-rough] on [I]_q.
pub fn f_delta(
    h: &MultiplicativeFunction,
    q: u64,
    z: f64,
    interval: &IntegerInterval,
    delta: Sign,
    sieve: Option<&PrimeSieve>,
) -> Result<IntervalFunction> {
    let normalizer = mertens_product(z, q, ProductMode::Inverse);
    let mut support = Vec::new();
    let mut unit_count = 0u64;
    let mut rough_count = 0u64;
    for n in interval.iter() {
        if crate::arith::gcd(n, q) != 1 {
            continue;
        }
        unit_count += 1;
        if !rough(sieve, n, z) {
            continue;
        }
        rough_count += 1;
        let v = h.eval(n)?;
        if v != 0.0 && (v > 0.0) == (delta == Sign::Plus) {
            support.push((n, normalizer));
        }
    }
    if unit_count == 0 {
        return domain(format!(
            "no units mod {q} in ({}, {}]",
            interval.lo, interval.hi
        ));
    }
    Ok(IntervalFunction {
        q,
        interval: *interval,
        normalizer,
        support,
        unit_count,
        rough_count,
    })
}

fn sign_matches(h: &MultiplicativeFunction, n: u64, delta: Sign) -> Result<bool> {
    let v = h.eval(n)?;
    Ok(v != 0.0 && (v > 0.0) == (delta == Sign::Plus))
}

fn in_coset(g: &UnitGroup, coset: Option<&CosetSpec>, n: u64) -> bool {
    match coset {
        Some(c) => c.contains(g, n % g.q),
        None => g.is_unit(n % g.q),
    }
}

/// 𝒬_B^Δ: primes p ∈ (lo, hi] in B with sgn h(p) = Δ.
pub fn prime_set(
    h: &MultiplicativeFunction,
    g: &UnitGroup,
    coset: Option<&CosetSpec>,
    delta: Sign,
    lo: f64,
    hi: f64,
) -> Result<Vec<u64>> {
    let iv = IntegerInterval::new(lo, hi)?;
    let mut out = Vec::new();
    for p in iv.iter() {
        if is_prime(p) && in_coset(g, coset, p) && sign_matches(h, p, delta)? {
            out.push(p);
        }
    }
    Ok(out)
}

/// 𝒰_{B,v}^Δ: square-free u ∈ I in B with sgn h(u) = Δ.
pub fn unit_set(
    h: &MultiplicativeFunction,
    g: &UnitGroup,
    coset: Option<&CosetSpec>,
    delta: Sign,
    interval: &IntegerInterval,
) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for u in interval.iter() {
        if !in_coset(g, coset, u) {
            continue;
        }
        let f = factorize(u)?;
        if f.is_squarefree() && sign_matches(h, u, delta)? {
            out.push(u);
        }
    }
    Ok(out)
}

/// ℳ_{B,v}^Δ: square-free m ∈ I in 𝒮 ∩ B with sgn h(m) = Δ and no prime factor below `rough_bound`.
pub fn m_set(
    h: &MultiplicativeFunction,
    g: &UnitGroup,
    coset: Option<&CosetSpec>,
    delta: Sign,
    interval: &IntegerInterval,
    ladder: &LadderSpec,
    rough_bound: f64,
) -> Result<Vec<u64>> {
    let mut out = Vec::new();
    for m in interval.iter() {
        if !in_coset(g, coset, m) {
            continue;
        }
        let f = factorize(m)?;
        if f.is_squarefree()
            && f.primes().all(|p| p as f64 >= rough_bound)
            && ladder.contains_factorization(&f)
            && sign_matches(h, m, delta)?
        {
            out.push(m);
        }
    }
    Ok(out)
}

/// Q_B^Δ(χ) = (1/Q1) Σ_{p∈𝒬} conj χ(p), for every character.
pub fn prime_sum_q(
    h: &MultiplicativeFunction,
    g: &UnitGroup,
    coset: Option<&CosetSpec>,
    delta: Sign,
    p1: f64,
    q1: f64,
) -> Result<Vec<Complex64>> {
    Ok(normalized_sums(
        g,
        &prime_set(h, g, coset, delta, p1, q1)?,
        q1,
    ))
}

/// U_{B,v}^Δ(χ) = (1/(U e^v)) Σ_{u∈𝒰} conj χ(u), over I_U(v) = (U e^{v−1}, U e^v].
pub fn unit_sum_u(
    h: &MultiplicativeFunction,
    g: &UnitGroup,
    coset: Option<&CosetSpec>,
    delta: Sign,
    u: f64,
    v: i64,
) -> Result<Vec<Complex64>> {
    let iv = IntegerInterval::e_adic(u, v);
    Ok(normalized_sums(
        g,
        &unit_set(h, g, coset, delta, &iv)?,
        iv.hi,
    ))
}

/// M_{B,v}^Δ(χ) = (1/(M e^v)) Σ_{m∈ℳ} conj χ(m), over I_M(v) = (M e^{v−1}, M e^v].
#[allow(clippy::too_many_arguments)]
pub fn m_sum(
    h: &MultiplicativeFunction,
    g: &UnitGroup,
    coset: Option<&CosetSpec>,
    delta: Sign,
    m: f64,
    v: i64,
    ladder: &LadderSpec,
    rough_bound: f64,
) -> Result<Vec<Complex64>> {
    let iv = IntegerInterval::e_adic(m, v);
    Ok(normalized_sums(
        g,
        &m_set(h, g, coset, delta, &iv, ladder, rough_bound)?,
        iv.hi,
    ))
}
