//! Integer arithmetic: factorization, Möbius and Liouville, rough numbers,
//! unit counts in intervals, B(q), Mertens products and pair counts.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub const MAX_N: u64 = (1u64 << 63) - 1;

/// Relative guard band used when an interval endpoint is numerically an integer.
pub const ENDPOINT_GUARD: f64 = 1e-9;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin, exact for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Brent's variant of Pollard rho; `n` must be odd and composite.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut r, mut q) = (2u64, 2u64, 1u64, 1u64, 1u64);
        let mut ys = 2u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn from_factors(mut factors: Vec<(u64, u32)>) -> Self {
        factors.sort_unstable();
        let mut merged: Vec<(u64, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some((lp, le)) if *lp == p => *le += e,
                _ => merged.push((p, e)),
            }
        }
        let n = merged.iter().fold(1u64, |acc, &(p, e)| acc * p.pow(e));
        Factorization { n, factors: merged }
    }

    pub fn omega(&self) -> usize {
        self.factors.len()
    }

    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn radical(&self) -> u64 {
        self.primes().product()
    }

    pub fn mobius(&self) -> i32 {
        if !self.is_squarefree() {
            0
        } else if self.omega().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    pub fn liouville(&self) -> i32 {
        if self.big_omega().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// τ_k(n), the k-fold divisor function.
    pub fn tau_k(&self, k: u32) -> u64 {
        // tau_k(p^e) = C(e + k - 1, k - 1)
        self.factors
            .iter()
            .map(|&(_, e)| {
                let mut c = 1u64;
                for i in 1..k as u64 {
                    c = c * (e as u64 + i) / i;
                }
                c
            })
            .product()
    }

    /// Number of distinct prime factors in (lo, hi].
    pub fn omega_in(&self, lo: f64, hi: f64) -> usize {
        self.primes()
            .filter(|&p| (p as f64) > lo && (p as f64) <= hi)
            .count()
    }

    pub fn divisors(&self) -> Vec<u64> {
        let mut out = vec![1u64];
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    out.push(out[i] * pk);
                }
            }
        }
        out.sort_unstable();
        out
    }
}

pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return domain("cannot factor 0");
    }
    if n > MAX_N {
        return domain(format!("{n} exceeds 2^63-1"));
    }
    let mut m = n;
    let mut factors = Vec::new();
    for p in [2u64, 3, 5] {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    }
    // wheel mod 30 up to 2^12
    const STEPS: [u64; 8] = [4, 2, 4, 2, 4, 6, 2, 6];
    let mut p = 7u64;
    let mut i = 0;
    while p <= 4096 && p * p <= m {
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += STEPS[i];
        i = (i + 1) % 8;
    }
    let mut stack = vec![m];
    while let Some(x) = stack.pop() {
        if x == 1 {
            continue;
        }
        if is_prime(x) {
            factors.push((x, 1));
        } else {
            let d = pollard_brent(x);
            stack.push(d);
            stack.push(x / d);
        }
    }
    Ok(Factorization::from_factors(factors))
}

pub fn mobius(n: u64) -> i32 {
    factorize(n).map(|f| f.mobius()).unwrap_or(0)
}

pub fn liouville(n: u64) -> i32 {
    factorize(n).map(|f| f.liouville()).unwrap_or(1)
}

pub fn is_squarefree(n: u64) -> bool {
    factorize(n).map(|f| f.is_squarefree()).unwrap_or(false)
}

/// True iff (n, P(z)) = 1 with P(z) the product of primes below z.
pub fn is_rough(n: u64, z: f64) -> bool {
    if n <= 1 {
        return true;
    }
    let m = n;
    let mut p = 2u64;
    while (p as f64) < z {
        if m.is_multiple_of(p) {
            return false;
        }
        if p * p > m {
            // m has no factor below p, so m itself is prime (or 1)
            return m == 1 || (m as f64) >= z;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

pub fn euler_phi(n: u64) -> u64 {
    let f = factorize(n.max(1)).expect("n >= 1");
    f.factors
        .iter()
        .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1))
}

/// Sieve of Eratosthenes returning all primes ≤ n.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                comp[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes strictly below the real bound `z`.
pub fn primes_below(z: f64) -> Vec<u64> {
    if z <= 2.0 {
        return Vec::new();
    }
    let top = z.ceil() as u64;
    primes_up_to(top)
        .into_iter()
        .filter(|&p| (p as f64) < z)
        .collect()
}

/// Smallest-prime-factor table for fast repeated factorization.
#[derive(Debug, Clone)]
pub struct PrimeSieve {
    spf: Vec<u32>,
}

impl PrimeSieve {
    pub fn new(limit: u64) -> Self {
        let limit = limit.max(1) as usize;
        let mut spf = vec![0u32; limit + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=limit {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                let ip = i * p as usize;
                if p > si || ip > limit {
                    break;
                }
                spf[ip] = p;
            }
        }
        PrimeSieve { spf }
    }

    /// Rebuilds a sieve from a stored table, rejecting any table that is not the true one.
    ///
    /// Every entry must be a prime divisor no larger than the smallest prime factor of the
    /// cofactor, and no multiple of a prime p ≤ √limit may carry an entry above p.
    pub fn from_spf_table(spf: Vec<u32>) -> Result<Self> {
        if spf.len() < 2 || spf[0] != 0 || spf[1] != 0 {
            return domain("table must start with two zero entries");
        }
        let limit = spf.len() - 1;
        for n in 2..=limit {
            let p = spf[n] as usize;
            if p < 2 || p > n || n % p != 0 || spf[p] as usize != p {
                return domain(format!("bad entry at {n}"));
            }
            let m = n / p;
            if m > 1 && (spf[m] as usize) < p {
                return domain(format!("entry at {n} is not the smallest prime factor"));
            }
        }
        let mut p = 2usize;
        while p * p <= limit {
            if spf[p] as usize == p && (p * p..=limit).step_by(p).any(|m| spf[m] as usize > p) {
                return domain(format!("a multiple of {p} claims a larger prime factor"));
            }
            p += 1;
        }
        Ok(PrimeSieve { spf })
    }

    pub fn spf_table(&self) -> &[u32] {
        &self.spf
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    #[inline]
    pub fn spf(&self, n: u64) -> u64 {
        self.spf[n as usize] as u64
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] as u64 == n
    }

    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 {
            return domain("cannot factor 0");
        }
        if n > self.limit() {
            return factorize(n);
        }
        let mut m = n;
        let mut factors: Vec<(u64, u32)> = Vec::new();
        while m > 1 {
            let p = self.spf(m);
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        Ok(Factorization { n, factors })
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..self.spf.len())
            .filter(move |&i| self.spf[i] as usize == i)
            .map(|i| i as u64)
    }
}

fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() <= ENDPOINT_GUARD * r.abs().max(1.0) {
        r
    } else {
        x
    }
}

/// Positive integers n with lo < n ≤ hi.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegerInterval {
    pub lo: f64,
    pub hi: f64,
}

impl IntegerInterval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
            return domain(format!("bad interval ({lo}, {hi}]"));
        }
        Ok(IntegerInterval { lo, hi })
    }

    /// I_y(k) = (e^{k-1} y, e^k y].
    pub fn e_adic(y: f64, k: i64) -> Self {
        let hi = y * (k as f64).exp();
        IntegerInterval {
            lo: hi / std::f64::consts::E,
            hi,
        }
    }

    /// (N/e, N].
    pub fn below(n: f64) -> Self {
        IntegerInterval {
            lo: n / std::f64::consts::E,
            hi: n,
        }
    }

    pub fn first(&self) -> u64 {
        let lo = snap(self.lo);
        if lo < 0.0 {
            1
        } else {
            lo.floor() as u64 + 1
        }
    }

    pub fn last(&self) -> u64 {
        let hi = snap(self.hi);
        if hi < 1.0 {
            0
        } else {
            hi.floor() as u64
        }
    }

    pub fn contains(&self, n: u64) -> bool {
        n >= self.first() && n <= self.last()
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<u64> {
        self.first()..=self.last()
    }

    pub fn count(&self) -> u64 {
        (self.last() + 1).saturating_sub(self.first())
    }

    /// Real length of the positive part.
    pub fn length(&self) -> f64 {
        (snap(self.hi) - snap(self.lo).max(0.0)).max(0.0)
    }

    /// Number of multiples of d in the interval.
    pub fn multiples(&self, d: u64) -> u64 {
        let last = self.last();
        let first = self.first();
        if last < first {
            return 0;
        }
        last / d - (first - 1) / d
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitCount {
    pub exact: u64,
    pub main: f64,
    pub error: f64,
}

/// |[I]_q| by Möbius inversion over divisors of rad(q).
pub fn count_units_in_interval(interval: &IntegerInterval, q: u64) -> UnitCount {
    let q = q.max(1);
    let f = factorize(q).expect("q >= 1");
    let primes: Vec<u64> = f.primes().collect();
    let mut exact: i64 = 0;
    for mask in 0u32..(1 << primes.len()) {
        let mut d = 1u64;
        for (i, &p) in primes.iter().enumerate() {
            if mask >> i & 1 == 1 {
                d *= p;
            }
        }
        let c = interval.multiples(d) as i64;
        if mask.count_ones() % 2 == 0 {
            exact += c;
        } else {
            exact -= c;
        }
    }
    let phi = euler_phi(q) as f64;
    let main = interval.length() * phi / q as f64;
    UnitCount {
        exact: exact as u64,
        main,
        error: exact as f64 - main,
    }
}

/// Root of z / (10 ln z) = c on the increasing branch z > e.
fn threshold_root(c: f64) -> f64 {
    let g = |z: f64| z / (10.0 * z.ln()) - c;
    let mut lo = std::f64::consts::E;
    let mut hi = 64.0f64;
    while g(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Minimal B ≥ 2 with #{p ≤ z : p | q} ≤ z/(10 log z) for every real z ≥ B.
pub fn b_of_q(q: u64) -> f64 {
    let f = factorize(q.max(1)).expect("q >= 1");
    let primes: Vec<u64> = f.primes().collect();
    let mut best = 2.0f64;
    // On [p_i, p_{i+1}) the count is i; the threshold curve is below 1 on [2, e],
    // so the last violating z in that segment is the root on the increasing branch.
    for (i, &p) in primes.iter().enumerate() {
        let root = threshold_root((i + 1) as f64);
        if (p as f64) < root {
            best = best.max(root);
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProductMode {
    Direct,
    Inverse,
}

/// ∏_{p<z, p∤q} (1 − 1/p), or its inverse.
pub fn mertens_product(z: f64, q: u64, mode: ProductMode) -> f64 {
    let mut num = 1.0f64;
    for p in primes_below(z) {
        if !q.is_multiple_of(p) {
            num *= 1.0 - 1.0 / p as f64;
        }
    }
    match mode {
        ProductMode::Direct => num,
        ProductMode::Inverse => 1.0 / num,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairCount {
    pub count: u64,
    pub shape: f64,
    pub ratio: f64,
}

/// #{(k, l) : 1 ≤ k ≤ K, 1 ≤ l ≤ L, kl ≡ a (mod q)}.
pub fn count_pairs_in_class(k_max: u64, l_max: u64, a: u64, q: u64) -> Result<PairCount> {
    let q = q.max(1);
    if gcd(a % q, q) != 1 && q > 1 {
        return domain(format!("gcd({a}, {q}) != 1"));
    }
    let mut count = 0u64;
    for k in 1..=k_max {
        if gcd(k, q) != 1 {
            continue;
        }
        let inv = inv_mod(k % q, q).expect("unit");
        let r = mul_mod(a % q, inv, q);
        let r = if r == 0 { q } else { r };
        if r <= l_max {
            count += (l_max - r) / q + 1;
        }
    }
    let phi = euler_phi(q) as f64;
    let qf = q as f64;
    let shape = phi / qf * (k_max as f64 * l_max as f64) / qf + qf.sqrt();
    Ok(PairCount {
        count,
        shape,
        ratio: count as f64 / shape,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spf_table_round_trip_and_tamper() {
        let s = PrimeSieve::new(5000);
        let back = PrimeSieve::from_spf_table(s.spf_table().to_vec()).unwrap();
        assert_eq!(back.spf_table(), s.spf_table());
        // a composite marked prime, a wrong divisor and a non-minimal divisor
        for (i, v) in [(91usize, 91u32), (12, 5), (15, 5)] {
            let mut t = s.spf_table().to_vec();
            t[i] = v;
            assert!(
                PrimeSieve::from_spf_table(t).is_err(),
                "tampered entry at {i}"
            );
        }
    }

    fn trial_factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2;
        while p * p <= n {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            if e > 0 {
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn factor_examples() {
        assert!(factorize(1).unwrap().factors.is_empty());
        assert_eq!(factorize(12).unwrap().factors, vec![(2, 2), (3, 1)]);
        assert_eq!(factorize(9991).unwrap().factors, trial_factor(9991));
        assert_eq!(factorize(9991).unwrap().factors, vec![(97, 1), (103, 1)]);
        assert!(factorize(0).is_err());
    }

    #[test]
    fn factor_large() {
        let n = 4_294_967_291u64 * 2_147_483_647;
        assert_eq!(
            factorize(n).unwrap().factors,
            vec![(2_147_483_647, 1), (4_294_967_291, 1)]
        );
        let f = factorize(MAX_N).unwrap();
        assert_eq!(
            f.factors.iter().fold(1u64, |a, &(p, e)| a * p.pow(e)),
            MAX_N
        );
        assert!(f.primes().all(is_prime));
    }

    #[test]
    fn factor_matches_trial_division() {
        for n in 1..5000u64 {
            assert_eq!(factorize(n).unwrap().factors, trial_factor(n), "n={n}");
        }
        let sieve = PrimeSieve::new(5000);
        for n in 1..=5000u64 {
            assert_eq!(sieve.factorize(n).unwrap(), factorize(n).unwrap());
        }
    }

    #[test]
    fn mobius_liouville_examples() {
        assert_eq!((mobius(1), liouville(1)), (1, 1));
        assert_eq!((mobius(12), liouville(12)), (0, -1));
        assert_eq!((mobius(14), liouville(14)), (1, 1));
        assert!(is_squarefree(14) && !is_squarefree(12));
    }

    #[test]
    fn mobius_sum_over_divisors() {
        let sieve = PrimeSieve::new(100_000);
        let mut mu = vec![0i32; 100_001];
        for n in 1..=100_000u64 {
            mu[n as usize] = sieve.factorize(n).unwrap().mobius();
        }
        let mut acc = vec![0i32; 100_001];
        for d in 1..=100_000usize {
            if mu[d] != 0 {
                for m in (d..=100_000).step_by(d) {
                    acc[m] += mu[d];
                }
            }
        }
        assert_eq!(acc[1], 1);
        assert!(acc[2..].iter().all(|&x| x == 0));
    }

    #[test]
    fn rough_examples() {
        assert!(is_rough(1, 100.0));
        assert!(is_rough(35, 5.0));
        assert!(!is_rough(6, 5.0));
        assert!(is_rough(6, 2.0));
        for n in 1..2000u64 {
            for z in [0.0, 2.0, 2.5, 3.0, 7.0, 30.0, 50.5] {
                let brute = trial_factor(n).iter().all(|&(p, _)| p as f64 >= z);
                assert_eq!(is_rough(n, z), brute, "n={n} z={z}");
            }
        }
    }

    #[test]
    fn interval_units() {
        let c = count_units_in_interval(&IntegerInterval::new(0.0, 10.0).unwrap(), 4);
        assert_eq!(c.exact, 5);
        assert!((c.main - 5.0).abs() < 1e-12);
        assert_eq!(
            count_units_in_interval(&IntegerInterval::new(0.0, 1.0).unwrap(), 30).exact,
            1
        );
        let i = IntegerInterval::new(10.0, 100.0).unwrap();
        let brute = (11..=100u64).filter(|&n| gcd(n, 6) == 1).count() as u64;
        assert_eq!(count_units_in_interval(&i, 6).exact, brute);
    }

    #[test]
    fn interval_guard_band() {
        let i = IntegerInterval::below(100f64.powf(0.5) * (1.0 + 1e-13));
        assert_eq!(i.last(), 10);
        let j = IntegerInterval::new(3.0 * (1.0 + 1e-13), 5.0).unwrap();
        assert_eq!(j.first(), 4);
        let k = IntegerInterval::e_adic(10.0, 1);
        assert_eq!((k.first(), k.last()), (11, 27));
    }

    #[test]
    fn b_of_q_examples() {
        assert_eq!(b_of_q(1), 2.0);
        let b2 = b_of_q(2);
        assert!((b2 - 35.7715).abs() < 1e-4, "{b2}");
        assert!((b2 - 10.0 * b2.ln()).abs() < 1e-8);
        // a prime above the threshold does not trigger any violation
        assert_eq!(b_of_q(101), 2.0);
    }

    #[test]
    fn b_of_q_brute_scan() {
        // scan z on a fine grid and compare the last violation with B(q)
        for q in [2u64, 6, 30, 210, 97 * 2, 1155] {
            let ps = primes_up_to(q);
            let b = b_of_q(q);
            let mut last_violation = 0.0f64;
            let mut z = 2.0;
            while z < 2000.0 {
                let c = ps.iter().filter(|&&p| q % p == 0 && p as f64 <= z).count() as f64;
                if c > z / (10.0 * z.ln()) {
                    last_violation = z;
                }
                z += 0.001;
            }
            if last_violation == 0.0 {
                assert_eq!(b, 2.0);
            } else {
                assert!(
                    b >= last_violation && b - last_violation < 0.002,
                    "q={q} b={b} lv={last_violation}"
                );
            }
        }
    }

    // B(q) ≤ 20 log q fails for small q with a small prime factor; frozen from a full scan.
    #[test]
    fn b_of_q_against_twenty_log_q() {
        let mut fails = 0;
        let mut worst = (0.0f64, 0u64);
        for q in 2..=10_000u64 {
            let ratio = b_of_q(q) / (q as f64).ln();
            if ratio > 20.0 {
                fails += 1;
                let spf = factorize(q).unwrap().factors[0].0;
                assert!(spf < 37, "q = {q}");
            }
            if ratio > worst.0 {
                worst = (ratio, q);
            }
        }
        assert_eq!(fails, 1490);
        assert_eq!(worst.1, 2);
        assert!((worst.0 - 51.607).abs() < 1e-3, "{}", worst.0);
    }

    #[test]
    fn mertens_examples() {
        assert_eq!(mertens_product(2.0, 1, ProductMode::Inverse), 1.0);
        assert!((mertens_product(5.0, 1, ProductMode::Inverse) - 3.0).abs() < 1e-12);
        assert!((mertens_product(5.0, 3, ProductMode::Inverse) - 2.0).abs() < 1e-12);
        assert!((mertens_product(5.0, 1, ProductMode::Direct) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn pair_counts() {
        assert_eq!(count_pairs_in_class(5, 5, 1, 5).unwrap().count, 4);
        assert_eq!(count_pairs_in_class(0, 5, 1, 5).unwrap().count, 0);
        let brute = (1..=7u64)
            .flat_map(|k| (1..=7u64).map(move |l| k * l))
            .filter(|x| x % 7 == 1)
            .count();
        assert_eq!(
            count_pairs_in_class(7, 7, 1, 7).unwrap().count as usize,
            brute
        );
        assert!(count_pairs_in_class(3, 3, 2, 4).is_err());
        for q in 1..30u64 {
            for a in 0..q {
                if gcd(a, q) != 1 {
                    continue;
                }
                let brute = (1..=23u64)
                    .flat_map(|k| (1..=17u64).map(move |l| k * l))
                    .filter(|x| x % q == a % q)
                    .count() as u64;
                assert_eq!(count_pairs_in_class(23, 17, a, q).unwrap().count, brute);
            }
        }
    }

    #[test]
    fn tau_and_divisors() {
        let f = factorize(360).unwrap();
        assert_eq!(f.tau_k(2), 24);
        assert_eq!(f.divisors().len(), 24);
        assert_eq!(f.tau_k(1), 1);
        // tau_3(p) = 3, tau_3(p^2) = 6
        assert_eq!(factorize(4).unwrap().tau_k(3), 6);
    }
}
