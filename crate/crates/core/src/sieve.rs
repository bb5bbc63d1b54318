//! Fundamental-lemma sieve weights (combinatorial beta sieve), the majorant ν,
//! and rough-number counts in cosets of index-2 subgroups.

use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd, primes_below, IntegerInterval, PrimeSieve};
use crate::error::{precondition, Error, Result};
use crate::group::{CosetSpec, UnitGroup};
use crate::multfunc::{rough, Sign};

pub const MAX_SUPPORT: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SieveWeights {
    pub z: f64,
    pub level: f64,
    pub kappa: f64,
    pub sign: Sign,
    /// (d, λ_d) sorted by d; λ_d = μ(d) on the support.
    pub weights: Vec<(u64, i8)>,
}

impl SieveWeights {
    pub fn beta(&self) -> f64 {
        9.0 * self.kappa + 1.0
    }

    pub fn s(&self) -> f64 {
        self.level.ln() / self.z.ln()
    }

    pub fn get(&self, d: u64) -> i8 {
        match self.weights.binary_search_by_key(&d, |&(x, _)| x) {
            Ok(i) => self.weights[i].1,
            Err(_) => 0,
        }
    }

    /// Σ_{d | n} λ_d.
    pub fn divisor_sum(&self, n: u64) -> i64 {
        let f = factorize(n).expect("n >= 1");
        let small: Vec<u64> = f.primes().filter(|&p| (p as f64) < self.z).collect();
        let mut total = 0i64;
        for mask in 0u64..(1 << small.len()) {
            let mut d = 1u64;
            let mut ok = true;
            for (i, &p) in small.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    d = match d.checked_mul(p) {
                        Some(v) if (v as f64) <= self.level => v,
                        _ => {
                            ok = false;
                            break;
                        }
                    };
                }
            }
            if ok {
                total += self.get(d) as i64;
            }
        }
        total
    }

    /// Σ_{d|n} λ_d for every n ≤ limit.
    pub fn divisor_sums_up_to(&self, limit: u64) -> Vec<i64> {
        let mut acc = vec![0i64; limit as usize + 1];
        for &(d, l) in &self.weights {
            if d > limit {
                break;
            }
            let mut m = d;
            while m <= limit {
                acc[m as usize] += l as i64;
                m += d;
            }
        }
        acc
    }
}

fn checked_pow_le(base: u64, exp: f64, factor: u64, bound: f64) -> bool {
    // factor · base^exp < bound, in logs with a tiny tolerance toward exclusion
    (factor as f64).ln() + exp * (base as f64).ln() < bound.ln() - 1e-12
}

/// Rosser-type weights with β = 9κ+1. A prefix p₁ > … > p_m (descending primes)
/// is kept if it passes the test at every step whose parity matches the sign
/// (odd for +, even for −). The test accepts when p₁⋯p_m·p_m^β < D, or when every
/// extension by smaller primes stays ≤ D (the subtree is then the exact sieve).
pub fn build_beta_sieve(z: f64, level: f64, kappa: f64) -> Result<(SieveWeights, SieveWeights)> {
    if z < 2.0 || level < 2.0 {
        return precondition("need z >= 2 and D >= 2");
    }
    if kappa < 1.0 {
        return precondition("need kappa >= 1");
    }
    if level < z {
        return precondition("need D >= z so the lower weights stay supported on d <= D");
    }
    let beta = 9.0 * kappa + 1.0;
    let mut primes = primes_below(z);
    primes.reverse();
    // prefix products of primes below each p: P(p) for p = primes[i] is the product of primes[i+1..]
    let mut below_log = vec![0.0f64; primes.len() + 1];
    for i in (0..primes.len()).rev() {
        below_log[i] = below_log[i + 1] + (primes[i] as f64).ln();
    }
    let mut out = Vec::new();
    for sign in [Sign::Plus, Sign::Minus] {
        let parity = if sign == Sign::Plus { 1 } else { 0 };
        let mut weights: Vec<(u64, i8)> = vec![(1, 1)];
        // (d, next index, length, exact-subtree flag)
        let mut stack: Vec<(u64, usize, usize, bool)> = vec![(1, 0, 0, false)];
        while let Some((d, start, len, exact)) = stack.pop() {
            for i in start..primes.len() {
                let p = primes[i];
                let nd = match d.checked_mul(p) {
                    Some(v) if (v as f64) <= level => v,
                    _ => continue,
                };
                let m = len + 1;
                let mut child_exact = exact;
                if !exact && m % 2 == parity {
                    let tail = (nd as f64).ln() + below_log[i + 1];
                    if tail <= level.ln() + 1e-12 {
                        child_exact = true;
                    } else if !checked_pow_le(p, beta, nd, level) {
                        continue;
                    }
                }
                weights.push((nd, if m % 2 == 0 { 1 } else { -1 }));
                if weights.len() > MAX_SUPPORT {
                    return Err(Error::Resource(format!(
                        "more than {MAX_SUPPORT} sieve weights"
                    )));
                }
                stack.push((nd, i + 1, m, child_exact));
            }
        }
        weights.sort_unstable();
        out.push(SieveWeights {
            z,
            level,
            kappa,
            sign,
            weights,
        });
    }
    let minus = out.pop().expect("two");
    let plus = out.pop().expect("two");
    Ok((plus, minus))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
    pub limit: u64,
    pub checked: u64,
    pub violations: Vec<u64>,
}

/// Σ_{d|n}λ⁻_d ≤ 1_{(n,P(z))=1} ≤ Σ_{d|n}λ⁺_d for all n ≤ limit.
pub fn sandwich_check(plus: &SieveWeights, minus: &SieveWeights, limit: u64) -> SandwichReport {
    let up = plus.divisor_sums_up_to(limit);
    let lo = minus.divisor_sums_up_to(limit);
    let sieve = PrimeSieve::new(limit.max(2));
    let mut violations = Vec::new();
    for n in 1..=limit {
        let ind = rough(Some(&sieve), n, plus.z) as i64;
        if lo[n as usize] > ind || ind > up[n as usize] {
            violations.push(n);
        }
    }
    SandwichReport {
        limit,
        checked: limit,
        violations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyReport {
    pub upper: f64,
    pub lower: f64,
    pub reference: f64,
    pub s: f64,
    pub k: f64,
    pub factor: f64,
    pub upper_ok: bool,
    pub lower_ok: bool,
}

/// Σλ_d^± g(d) against ∏_{p<z}(1 − g(p)) with the factor e^{9κ−s}K^{10}.
pub fn sieve_accuracy(
    plus: &SieveWeights,
    minus: &SieveWeights,
    g: impl Fn(u64) -> f64,
    k: f64,
) -> Result<AccuracyReport> {
    let s = plus.s();
    if s < plus.beta() - 1e-12 {
        return precondition(format!("s = {s:.4} below 9κ+1 = {}", plus.beta()));
    }
    let eval = |w: &SieveWeights| -> f64 {
        w.weights
            .iter()
            .map(|&(d, l)| {
                let f = factorize(d).expect("d >= 1");
                l as f64 * f.primes().map(&g).product::<f64>()
            })
            .sum()
    };
    let upper = eval(plus);
    let lower = eval(minus);
    let reference: f64 = primes_below(plus.z)
        .into_iter()
        .map(|p| 1.0 - g(p))
        .product();
    let factor = (9.0 * plus.kappa - s).exp() * k.powi(10);
    let tol = 1e-12 * reference.abs().max(1e-300);
    Ok(AccuracyReport {
        upper,
        lower,
        reference,
        s,
        k,
        factor,
        upper_ok: upper + tol >= reference && upper <= (1.0 + factor) * reference + tol,
        lower_ok: lower <= reference + tol && lower >= (1.0 - factor) * reference - tol,
    })
}

/// Smallest K for which ∏_{w ≤ p < z₁}(1 − g(p))^{-1} ≤ K (log z₁/log w)^κ over a
/// grid of w, z₁ ∈ [2, limit] (endpoints at primes and just above them).
pub fn empirical_k(g: impl Fn(u64) -> f64, kappa: f64, limit: u64) -> f64 {
    let primes = crate::arith::primes_up_to(limit);
    let mut points: Vec<f64> = vec![2.0];
    for &p in &primes {
        points.push(p as f64);
        points.push(p as f64 * (1.0 + 1e-9));
    }
    points.sort_by(f64::total_cmp);
    let mut best = 1.0f64;
    for (i, &w) in points.iter().enumerate() {
        let mut prod = 1.0;
        let mut pi = primes.partition_point(|&p| (p as f64) < w);
        for &z1 in &points[i..] {
            while pi < primes.len() && (primes[pi] as f64) < z1 {
                prod /= 1.0 - g(primes[pi]);
                pi += 1;
            }
            let shape = (z1.ln() / w.ln()).powf(kappa);
            best = best.max(prod / shape);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoughCoset {
    pub count: u64,
    pub total: u64,
    pub ratio: f64,
    pub target: f64,
    pub meets_target: bool,
}

/// |{n ≤ R : n ∈ bH, (n, P(z)) = 1}|, compared with (1/2 − ε) of the rough units.
pub fn rough_count_in_coset(
    r_cap: u64,
    g: &UnitGroup,
    coset: Option<&CosetSpec>,
    z: f64,
    epsilon: f64,
) -> Result<RoughCoset> {
    if let Some(c) = coset {
        if gcd(c.b % g.q, g.q) != 1 {
            return precondition("coset representative is not a unit");
        }
    }
    let sieve = PrimeSieve::new(r_cap.max(2));
    let mut count = 0u64;
    let mut total = 0u64;
    for n in 1..=r_cap {
        if !g.is_unit(n) || !rough(Some(&sieve), n, z) {
            continue;
        }
        total += 1;
        if coset.is_none_or(|c| c.contains(g, n)) {
            count += 1;
        }
    }
    let ratio = if total > 0 {
        count as f64 / total as f64
    } else {
        0.0
    };
    let target = match coset {
        Some(c) if c.index() == 2 => 0.5 - epsilon,
        _ => 1.0 - epsilon,
    };
    Ok(RoughCoset {
        count,
        total,
        ratio,
        target,
        meets_target: ratio >= target,
    })
}

/// ν(n) = ∏_{p<z, p∤q}(1 − 1/p)^{-1} · Σ_{d|n, d≤D} λ⁺_d · 1_{[I]_q}(n).
#[derive(Debug, Clone)]
pub struct Majorant {
    pub weights: SieveWeights,
    pub q: u64,
    pub interval: IntegerInterval,
    pub normalizer: f64,
}

impl Majorant {
    pub fn new(weights: SieveWeights, q: u64, interval: IntegerInterval) -> Self {
        let normalizer =
            crate::arith::mertens_product(weights.z, q, crate::arith::ProductMode::Inverse);
        Majorant {
            weights,
            q,
            interval,
            normalizer,
        }
    }

    pub fn eval(&self, n: u64) -> f64 {
        if !self.interval.contains(n) || gcd(n, self.q) != 1 {
            return 0.0;
        }
        self.normalizer * self.weights.divisor_sum(n) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_sifting_limit() {
        let (p, m) = build_beta_sieve(2.0, 10.0, 1.0).unwrap();
        assert_eq!(p.weights, vec![(1, 1)]);
        assert_eq!(m.weights, vec![(1, 1)]);
        assert!(sandwich_check(&p, &m, 1000).violations.is_empty());
    }

    #[test]
    fn single_prime() {
        let (p, m) = build_beta_sieve(3.0, 10.0, 1.0).unwrap();
        assert_eq!(p.weights, vec![(1, 1), (2, -1)]);
        assert_eq!(m.weights, vec![(1, 1), (2, -1)]);
    }

    #[test]
    fn sandwich_z30() {
        let (p, m) = build_beta_sieve(30.0, 1000.0, 1.0).unwrap();
        assert!(p.weights.iter().all(|&(d, l)| d <= 1000 && l.abs() <= 1));
        assert!(m.weights.iter().all(|&(d, l)| d <= 1000 && l.abs() <= 1));
        let r = sandwich_check(&p, &m, 100_000);
        assert!(
            r.violations.is_empty(),
            "{:?}",
            &r.violations[..r.violations.len().min(10)]
        );
    }

    #[test]
    fn exact_sieve_when_primorial_fits() {
        // P(10) = 210 ≤ D: both sides equal Legendre's sieve
        let (p, m) = build_beta_sieve(10.0, 1e12, 1.0).unwrap();
        assert_eq!(p.weights.len(), 16);
        assert_eq!(p.weights, m.weights);
        for &(d, l) in &p.weights {
            assert_eq!(l as i32, crate::arith::mobius(d));
        }
    }

    #[test]
    fn accuracy_examples() {
        let (p, m) = build_beta_sieve(10.0, 1e12, 1.0).unwrap();
        let r = sieve_accuracy(&p, &m, |_| 0.0, 1.0).unwrap();
        assert_eq!((r.upper, r.lower, r.reference), (1.0, 1.0, 1.0));
        let k = empirical_k(|p| 1.0 / p as f64, 1.0, 2000);
        let r = sieve_accuracy(&p, &m, |p| 1.0 / p as f64, k).unwrap();
        assert!(r.upper_ok && r.lower_ok);
        let r =
            sieve_accuracy(&p, &m, |p| if 6 % p == 0 { 0.0 } else { 1.0 / p as f64 }, k).unwrap();
        assert!(r.upper_ok && r.lower_ok);
        let (p, m) = build_beta_sieve(10.0, 1e5, 1.0).unwrap();
        assert!(matches!(
            sieve_accuracy(&p, &m, |_| 0.0, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn empirical_k_mertens() {
        // the supremum for g = 1/p is attained just above w = z₁ = 2
        let k = empirical_k(|p| 1.0 / p as f64, 1.0, 500);
        assert!((k - 2.0).abs() < 1e-6, "{k}");
    }

    #[test]
    fn rough_coset_examples() {
        let g = UnitGroup::new(5).unwrap();
        let h = &g.index2_subgroups()[0];
        let c = h.with_rep(2);
        assert_eq!(
            rough_count_in_coset(20, &g, Some(&c), 2.0, 0.1)
                .unwrap()
                .count,
            8
        );
        let a = rough_count_in_coset(200, &g, Some(h), 7.0, 0.1).unwrap();
        let b = rough_count_in_coset(200, &g, Some(&c), 7.0, 0.1).unwrap();
        let all = rough_count_in_coset(200, &g, None, 7.0, 0.1).unwrap();
        assert_eq!(a.count + b.count, all.count);
        assert_eq!(
            rough_count_in_coset(20, &g, Some(h), 50.0, 0.1)
                .unwrap()
                .count,
            1
        );
        assert_eq!(
            rough_count_in_coset(20, &g, Some(&c), 50.0, 0.1)
                .unwrap()
                .count,
            0
        );
    }

    #[test]
    fn majorant_support() {
        let (p, _) = build_beta_sieve(5.0, 5f64.powi(10), 1.0).unwrap();
        let nu = Majorant::new(p, 7, IntegerInterval::below(100.0));
        assert_eq!(nu.eval(10), 0.0);
        assert_eq!(nu.eval(49), 0.0);
        for n in 37..=100u64 {
            if gcd(n, 7) == 1 && crate::arith::is_rough(n, 5.0) {
                assert!(nu.eval(n) >= nu.normalizer - 1e-12);
            }
            assert!(nu.eval(n) >= 0.0);
        }
    }
}
