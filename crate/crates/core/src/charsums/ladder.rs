use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::normalized_sums;
use crate::arith::{factorize, is_prime, Factorization, IntegerInterval};
use crate::error::{domain, precondition, Result};
use crate::group::{CosetSpec, UnitGroup};
use crate::multfunc::{MultiplicativeFunction, Sign};

/// One interval (P_j, Q_j] of the ladder with its bucket resolution H_j.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderInterval {
    pub j: usize,
    pub lo: f64,
    pub hi: f64,
    pub h: f64,
}

impl LadderInterval {
    pub fn contains(&self, p: u64) -> bool {
        (p as f64) > self.lo && (p as f64) <= self.hi
    }

    /// w with e^{(w−1)/H} < p ≤ e^{w/H}.
    pub fn bucket(&self, p: u64) -> i64 {
        (self.h * (p as f64).ln()).ceil() as i64
    }

    /// ℐ_j = {w : H log P ≤ w ≤ ⌈H log Q⌉}.
    pub fn bucket_range(&self) -> (i64, i64) {
        (
            (self.h * self.lo.ln()).ceil() as i64,
            (self.h * self.hi.ln()).ceil() as i64,
        )
    }

    pub fn primes(&self) -> Vec<u64> {
        IntegerInterval {
            lo: self.lo,
            hi: self.hi,
        }
        .iter()
        .filter(|&p| is_prime(p))
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderSpec {
    pub q1: f64,
    /// Largest ladder index; values below 2 mean the ladder is empty.
    pub j_max: usize,
    pub intervals: Vec<LadderInterval>,
    pub overridden: bool,
}

/// H_j = j⁴ Q1^{1/40}.
pub fn bucket_resolution(j: usize, q1: f64) -> f64 {
    (j as f64).powi(4) * q1.powf(1.0 / 40.0)
}

/// (log P_j, log Q_j) = (j^{4j}(log Q1)^j, 100 j^{4j+2}(log Q1)^j).
pub fn ladder_logs(j: usize, q1: f64) -> (f64, f64) {
    let jf = j as f64;
    let l = q1.ln();
    let log_p = (4.0 * jf * jf.ln() + jf * l.ln()).exp();
    let log_q = 100.0 * (((4 * j + 2) as f64) * jf.ln() + jf * l.ln()).exp();
    (log_p, log_q)
}

/// Builds the ladder for (Q1, q), or takes explicit intervals labelled j = 2, 3, ….
pub fn ladder_build(q1: f64, q: u64, overrides: Option<&[(f64, f64)]>) -> Result<LadderSpec> {
    if !(q1 >= 3.0) {
        return precondition(format!("Q1 = {q1} must be at least 3"));
    }
    if let Some(list) = overrides {
        let mut intervals = Vec::with_capacity(list.len());
        let mut prev = f64::NEG_INFINITY;
        for (i, &(lo, hi)) in list.iter().enumerate() {
            if !(lo < hi) || lo < prev {
                return domain(format!(
                    "override intervals must be increasing and disjoint, got ({lo}, {hi}]"
                ));
            }
            prev = hi;
            let j = i + 2;
            intervals.push(LadderInterval {
                j,
                lo,
                hi,
                h: bucket_resolution(j, q1),
            });
        }
        let j_max = if intervals.is_empty() {
            1
        } else {
            intervals.len() + 1
        };
        return Ok(LadderSpec {
            q1,
            j_max,
            intervals,
            overridden: true,
        });
    }
    let cap = (q as f64).ln().max(0.0).sqrt();
    let mut intervals = Vec::new();
    let mut j = 2;
    loop {
        let (lp, lq) = ladder_logs(j, q1);
        if !(lq <= cap) {
            break;
        }
        intervals.push(LadderInterval {
            j,
            lo: lp.exp(),
            hi: lq.exp(),
            h: bucket_resolution(j, q1),
        });
        j += 1;
    }
    Ok(LadderSpec {
        q1,
        j_max: j - 1,
        intervals,
        overridden: false,
    })
}

impl LadderSpec {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn interval(&self, j: usize) -> Option<&LadderInterval> {
        self.intervals.iter().find(|iv| iv.j == j)
    }

    /// Replaces H_j for one interval.
    pub fn with_resolution(mut self, j: usize, h: f64) -> Self {
        for iv in &mut self.intervals {
            if iv.j == j {
                iv.h = h;
            }
        }
        self
    }

    /// n ∈ 𝒮: a prime factor in every interval.
    pub fn contains_factorization(&self, f: &Factorization) -> bool {
        self.intervals
            .iter()
            .all(|iv| f.primes().any(|p| iv.contains(p)))
    }

    /// n ∈ 𝒮_j: a prime factor in every interval except the j-th.
    pub fn contains_except(&self, f: &Factorization, j: usize) -> bool {
        self.intervals
            .iter()
            .filter(|iv| iv.j != j)
            .all(|iv| f.primes().any(|p| iv.contains(p)))
    }

    pub fn in_s(&self, n: u64) -> Result<bool> {
        if self.is_empty() {
            return Ok(true);
        }
        Ok(self.contains_factorization(&factorize(n)?))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacterPartition {
    /// classes[k] holds the character indices of 𝒳_{k+1}.
    pub classes: Vec<Vec<usize>>,
    pub residual: Vec<usize>,
    pub h_j: Vec<f64>,
    pub alpha_j: Vec<f64>,
    pub eta: f64,
}

impl CharacterPartition {
    pub fn total(&self) -> usize {
        self.classes.iter().map(Vec::len).sum::<usize>() + self.residual.len()
    }

    /// Class label (1-based) of a character, or `None` for 𝒴.
    pub fn class_of(&self, chi: usize) -> Option<usize> {
        self.classes
            .iter()
            .position(|c| c.contains(&chi))
            .map(|k| k + 1)
    }
}

/// α_j = 1/40 − η(1 + 1/(2j)).
pub fn alpha(j: usize, eta: f64) -> f64 {
    1.0 / 40.0 - eta * (1.0 + 1.0 / (2.0 * j as f64))
}

/// Q_{j,B,w}^Δ(χ) for every character, keyed by the buckets w that contain a qualifying prime.
pub fn bucketed_prime_sums(
    h: &MultiplicativeFunction,
    g: &UnitGroup,
    coset: &CosetSpec,
    delta: Sign,
    iv: &LadderInterval,
) -> Result<BTreeMap<i64, Vec<Complex64>>> {
    let mut buckets: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
    for p in iv.primes() {
        if !coset.contains(g, p % g.q) {
            continue;
        }
        let v = h.at_prime(p);
        if v != 0.0 && (v > 0.0) == (delta == Sign::Plus) {
            buckets.entry(iv.bucket(p)).or_default().push(p);
        }
    }
    Ok(buckets
        .into_iter()
        .map(|(w, ps)| (w, normalized_sums(g, &ps, (w as f64 / iv.h).exp())))
        .collect())
}

/// Splits the characters into 𝒳_1, …, 𝒳_J and 𝒴 by the smallness of prime sums.
///
/// 𝒳_1 uses |Q_{bH}^Δ(χ)| ≤ Q1^{−α_1} over (P1, Q1]; 𝒳_j for j ≥ 2 uses
/// |Q_{j,bH,w}^Δ(χ)| ≤ e^{−α_j w/H_j} for all w ∈ ℐ_j.
pub fn partition_characters(
    g: &UnitGroup,
    ladder: &LadderSpec,
    subgroup: &CosetSpec,
    h: &MultiplicativeFunction,
    eta: f64,
) -> Result<CharacterPartition> {
    if !(eta > 0.0 && eta <= 1.0 / 80.0) {
        return precondition(format!("eta = {eta} must lie in (0, 1/80]"));
    }
    let n = g.character_count();
    let reps = subgroup.coset_reps(g);
    let q1 = ladder.q1;
    let p1 = q1 / std::f64::consts::E;

    let mut small = vec![vec![true; n]; ladder.intervals.len() + 1];
    let a1 = alpha(1, eta);
    for &b in &reps {
        let coset = subgroup.with_rep(b);
        for delta in Sign::BOTH {
            let s = super::prime_sum_q(h, g, Some(&coset), delta, p1, q1)?;
            for (c, z) in s.iter().enumerate() {
                if z.norm() > q1.powf(-a1) {
                    small[0][c] = false;
                }
            }
        }
    }
    let mut h_j = vec![bucket_resolution(1, q1)];
    let mut alpha_j = vec![a1];
    for (k, iv) in ladder.intervals.iter().enumerate() {
        let aj = alpha(iv.j, eta);
        h_j.push(iv.h);
        alpha_j.push(aj);
        for &b in &reps {
            let coset = subgroup.with_rep(b);
            for delta in Sign::BOTH {
                for (w, s) in bucketed_prime_sums(h, g, &coset, delta, iv)? {
                    let bound = (-aj * w as f64 / iv.h).exp();
                    for (c, z) in s.iter().enumerate() {
                        if z.norm() > bound {
                            small[k + 1][c] = false;
                        }
                    }
                }
            }
        }
    }
    let mut classes = vec![Vec::new(); small.len()];
    let mut residual = Vec::new();
    for c in 0..n {
        match small.iter().position(|row| row[c]) {
            Some(k) => classes[k].push(c),
            None => residual.push(c),
        }
    }
    Ok(CharacterPartition {
        classes,
        residual,
        h_j,
        alpha_j,
        eta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_membership() {
        let l = ladder_build(10.0, 1000, Some(&[(10.0, 100.0)])).unwrap();
        assert!(l.in_s(77).unwrap());
        assert!(!l.in_s(8).unwrap());
        assert!(ladder_build(2.0, 1000, None).is_err());
    }

    #[test]
    fn desk_ladder_is_empty() {
        let l = ladder_build(10.0, 1_000_000, None).unwrap();
        assert!(l.is_empty());
        assert!(l.j_max < 2);
        assert!((1..200).all(|n| l.in_s(n).unwrap()));
        // log Q_2 = 100·2^10·(log Q1)^2 dwarfs any sqrt(log q) we can reach.
        let (lp, lq) = ladder_logs(2, 10.0);
        assert!((lp - 256.0 * 10f64.ln().powi(2)).abs() < 1e-9);
        assert!((lq - 100.0 * 1024.0 * 10f64.ln().powi(2)).abs() < 1e-6);
    }

    #[test]
    fn buckets_cover_interval() {
        let iv = LadderInterval {
            j: 2,
            lo: 3.0,
            hi: 40.0,
            h: 5.0,
        };
        let (lo, hi) = iv.bucket_range();
        for p in iv.primes() {
            let w = iv.bucket(p);
            assert!(w >= lo && w <= hi);
            let pf = p as f64;
            assert!(
                ((w - 1) as f64 / 5.0).exp() < pf && pf <= (w as f64 / 5.0).exp() * (1.0 + 1e-12)
            );
        }
    }

    #[test]
    fn partition_sizes_sum_to_phi() {
        let g = UnitGroup::new(101).unwrap();
        let h = MultiplicativeFunction::liouville();
        let full = g.full_coset();
        let ladder = ladder_build(20.0, 101, Some(&[(20.0, 60.0), (60.0, 200.0)])).unwrap();
        let part = partition_characters(&g, &ladder, &full, &h, 1.0 / 160.0).unwrap();
        assert_eq!(part.total(), 100);
        assert_eq!(part.classes.len(), 3);
        // at this scale Q1^{-α_1} ≈ 0.95 exceeds |𝒬|/Q1 = 0.2, so even χ₀ is small
        assert_eq!(part.class_of(0), Some(1));
        let mut all: Vec<usize> = part.classes.concat();
        all.extend(&part.residual);
        all.sort();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }
}
