use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{class_histogram, sum_conj, sums_conj_all, SumReport};
use crate::arith::{gcd, is_prime, is_rough, IntegerInterval};
use crate::error::{domain, precondition, Result};
use crate::group::{DirichletCharacter, UnitGroup};

/// Relative slack allowed on asserted inequalities.
pub const BOUND_TOL: f64 = 1e-9;

fn check_support(coeffs: &[(u64, Complex64)], n_max: u64) -> Result<()> {
    if let Some(&(n, _)) = coeffs.iter().find(|&&(n, _)| n == 0 || n > n_max) {
        return domain(format!("coefficient at n = {n} lies outside [1, {n_max}]"));
    }
    Ok(())
}

/// Σ_χ |Σ a_n χ(n)|² restricted to `chars` (all characters if `None`).
fn second_moment(g: &UnitGroup, coeffs: &[(u64, Complex64)], chars: Option<&[usize]>) -> f64 {
    let hist = class_histogram(g, coeffs.iter().copied());
    match chars {
        None => sums_conj_all(g, &hist).iter().map(|z| z.norm_sqr()).sum(),
        Some(cs) => cs
            .iter()
            .map(|&c| sum_conj(g, &g.character(c), &hist).norm_sqr())
            .sum(),
    }
}

fn unit_mass(g: &UnitGroup, coeffs: &[(u64, Complex64)]) -> f64 {
    coeffs
        .iter()
        .filter(|&&(n, _)| gcd(n, g.q) == 1)
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// (1/φ(q)) Σ_χ |Σ_{n≤N} a_n χ(n)|² ≤ (1 + N/q) Σ_{(n,q)=1} |a_n|², asserted.
pub fn mvt_check(g: &UnitGroup, coeffs: &[(u64, Complex64)], n_max: u64) -> Result<SumReport> {
    check_support(coeffs, n_max)?;
    let lhs = second_moment(g, coeffs, None) / g.phi as f64;
    let rhs = (1.0 + n_max as f64 / g.q as f64) * unit_mass(g, coeffs);
    Ok(SumReport::checked("mean-value", lhs, rhs, BOUND_TOL))
}

/// Σ_{χ∈𝒳} |Σ a_n χ(n)|² against (N/log q + N^{2/3} q^{1/9+2ε} |𝒳|) Σ |a_n|².
pub fn halasz_montgomery_report(
    g: &UnitGroup,
    coeffs: &[(u64, Complex64)],
    chars: &[usize],
    n_max: u64,
    epsilon: f64,
) -> Result<SumReport> {
    check_support(coeffs, n_max)?;
    let z = (g.q as f64).powf(epsilon);
    if let Some(&(n, _)) = coeffs.iter().find(|&&(n, _)| !is_rough(n, z)) {
        return precondition(format!("coefficient at n = {n} is not q^ε-rough"));
    }
    let lhs = second_moment(g, coeffs, Some(chars));
    let nf = n_max as f64;
    let qf = g.q as f64;
    let mass: f64 = coeffs.iter().map(|(_, a)| a.norm_sqr()).sum();
    let shape = (nf / qf.ln()
        + nf.powf(2.0 / 3.0) * qf.powf(1.0 / 9.0 + 2.0 * epsilon) * chars.len() as f64)
        * mass;
    Ok(SumReport::shape("halasz-montgomery", lhs, shape))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LargeValues {
    pub count: usize,
    pub threshold: f64,
    pub shape: f64,
    pub ratio: f64,
    pub primes: usize,
}

/// Number of χ with |Σ_{P/e<p≤P} a_p χ(p)| ≥ P^{1−α}, against P^{2α} q^{2α+1/C}.
pub fn large_values_census(
    g: &UnitGroup,
    a: impl Fn(u64) -> Complex64,
    p: f64,
    alpha: f64,
    c: f64,
) -> Result<LargeValues> {
    if !(p >= 2.0) {
        return precondition(format!("P = {p} must be at least 2"));
    }
    if !(0.0..=0.5).contains(&alpha) || !(c >= 1.0) {
        return domain(format!(
            "need α ∈ [0, 1/2] and C ≥ 1, got α = {alpha}, C = {c}"
        ));
    }
    let mut items = Vec::new();
    for n in IntegerInterval::below(p).iter().filter(|&n| is_prime(n)) {
        let v = a(n);
        if v.norm() > 1.0 + 1e-12 {
            return precondition(format!("|a_p| > 1 at p = {n}"));
        }
        items.push((n, v.conj()));
    }
    // Σ a_p χ(p) = conj(Σ conj a_p conj χ(p)), so magnitudes agree.
    let sums = sums_conj_all(g, &class_histogram(g, items.iter().copied()));
    let threshold = p.powf(1.0 - alpha);
    let count = sums
        .iter()
        .filter(|z| z.norm() >= threshold * (1.0 - 1e-12))
        .count();
    let shape = p.powf(2.0 * alpha) * (g.q as f64).powf(2.0 * alpha + 1.0 / c);
    Ok(LargeValues {
        count,
        threshold,
        shape,
        ratio: count as f64 / shape,
        primes: items.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PvReport {
    /// |Σ_{M<n≤M+N} χ(n)|.
    pub window_sum: f64,
    /// max_{N'≤N} |Σ_{M<n≤M+N'} χ(n)|.
    pub max_partial: f64,
    pub pv_bound: f64,
    pub report: SumReport,
    /// (r, N^{1−1/r} q^{(r+1)/(4r²)}) for r = 1, 2, 3.
    pub burgess: Vec<(u32, f64)>,
}

fn pv_bound(q: u64) -> f64 {
    (q as f64).sqrt() * (q as f64).ln()
}

/// Window sum of a non-principal χ, asserted against √q log q; Burgess shapes reported.
pub fn pv_burgess_check(
    g: &UnitGroup,
    chi: &DirichletCharacter,
    m: u64,
    n: u64,
) -> Result<PvReport> {
    if chi.is_principal() {
        return domain("Pólya–Vinogradov needs a non-principal character");
    }
    let vals = chi.values(g);
    let q = g.q;
    let mut s = Complex64::new(0.0, 0.0);
    let mut best = 0.0f64;
    // sums over full periods vanish, so only n mod q matters past the first q terms
    let len = if n > q { n % q + q } else { n };
    let skip = n - len;
    for k in (m + skip + 1)..=(m + n) {
        if let Some(i) = g.index_of(k % q) {
            s += vals[i];
        }
        best = best.max(s.norm());
    }
    let bound = pv_bound(q);
    let nf = n.max(1) as f64;
    let qf = q as f64;
    let burgess = (1..=3u32)
        .map(|r| {
            let rf = r as f64;
            (
                r,
                nf.powf(1.0 - 1.0 / rf) * qf.powf((rf + 1.0) / (4.0 * rf * rf)),
            )
        })
        .collect();
    Ok(PvReport {
        window_sum: s.norm(),
        max_partial: best,
        pv_bound: bound,
        report: SumReport::checked("polya-vinogradov", best, bound, BOUND_TOL),
        burgess,
    })
}

/// max over all windows (M, M+N] of |Σ χ(n)| for one non-principal χ.
///
/// Every window sum is S(j) − S(i) for prefix sums S over a single period.
pub fn max_window_sum(g: &UnitGroup, chi: &DirichletCharacter) -> Result<f64> {
    if chi.is_principal() {
        return domain("window sums of the principal character grow with N");
    }
    let vals = chi.values(g);
    let mut prefix = Vec::with_capacity(g.q as usize);
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..g.q {
        if let Some(i) = g.index_of(k) {
            s += vals[i];
        }
        prefix.push(s);
    }
    let mut best = 0.0f64;
    for (i, a) in prefix.iter().enumerate() {
        for b in &prefix[i + 1..] {
            best = best.max((b - a).norm_sqr());
        }
        best = best.max(a.norm_sqr());
    }
    Ok(best.sqrt())
}

/// Largest window sum over every non-principal character, with the √q log q bound.
pub fn pv_exhaustive(g: &UnitGroup) -> Result<SumReport> {
    let mut best = 0.0f64;
    for chi in g.characters().iter().filter(|c| !c.is_principal()) {
        best = best.max(max_window_sum(g, chi)?);
    }
    Ok(SumReport::checked(
        "polya-vinogradov",
        best,
        pv_bound(g.q),
        BOUND_TOL,
    ))
}

/// (1/φ) Σ_χ |Q(χ)|^{2ℓ} |A(χ)|² with Q over primes in [Y1, 2Y1] and A over [X/Y2, 2X/Y2].
pub fn amplify_report(
    g: &UnitGroup,
    c: impl Fn(u64) -> Complex64,
    a: impl Fn(u64) -> Complex64,
    x: f64,
    y1: f64,
    y2: f64,
) -> Result<SumReport> {
    if !(x >= y2 && y2 >= y1 && y1 >= 2.0) {
        return precondition(format!(
            "need X ≥ Y2 ≥ Y1 ≥ 2, got X = {x}, Y2 = {y2}, Y1 = {y1}"
        ));
    }
    let ell = (y2.ln() / y1.ln()).ceil() as i32;
    let prime_items: Vec<(u64, Complex64)> = ((y1.ceil() as u64)..=((2.0 * y1).floor() as u64))
        .filter(|&p| is_prime(p))
        .map(|p| (p, c(p).conj()))
        .collect();
    let lo = (x / y2).ceil() as u64;
    let hi = (2.0 * x / y2).floor() as u64;
    let a_items: Vec<(u64, Complex64)> = (lo.max(1)..=hi).map(|n| (n, a(n).conj())).collect();
    if prime_items
        .iter()
        .chain(&a_items)
        .any(|(_, v)| v.norm() > 1.0 + 1e-12)
    {
        return precondition("coefficients must be 1-bounded");
    }
    let qs = sums_conj_all(g, &class_histogram(g, prime_items));
    let as_ = sums_conj_all(g, &class_histogram(g, a_items));
    let lhs = qs
        .iter()
        .zip(&as_)
        .map(|(q, a)| q.norm_sqr().powi(ell) * a.norm_sqr())
        .sum::<f64>()
        / g.phi as f64;
    let t = x * y1 * 2f64.powi(ell);
    let fact: f64 = (1..=(ell + 1)).map(|k| k as f64).product();
    let shape = g.phi as f64 / g.q as f64 * (1.0 + t / g.q as f64) * t * fact * fact;
    let mut r = SumReport::shape("amplification", lhs, shape);
    r.lemma = format!("amplification[l={ell}]");
    Ok(r)
}

/// (1/φ) Σ_χ |Σ_{p²m≤N, P<p≤Q} α(p,m) conj χ(p²m)|² against (φ/q)(N + N²/q)/P.
pub fn square_contribution(
    g: &UnitGroup,
    alpha: impl Fn(u64, u64) -> Complex64,
    n: u64,
    p_lo: f64,
    p_hi: f64,
) -> Result<SumReport> {
    if !(p_hi >= p_lo && p_lo >= 1.0) || (n as f64) < p_hi.powi(4) {
        return precondition(format!(
            "need Q ≥ P ≥ 1 and N ≥ Q⁴, got P = {p_lo}, Q = {p_hi}, N = {n}"
        ));
    }
    let mut items = Vec::new();
    for p in (IntegerInterval { lo: p_lo, hi: p_hi })
        .iter()
        .filter(|&p| is_prime(p))
    {
        let p2 = p * p;
        for m in 1..=(n / p2) {
            items.push((p2 * m, alpha(p, m)));
        }
    }
    let lhs = second_moment(g, &items, None) / g.phi as f64;
    let nf = n as f64;
    let shape = g.phi as f64 / g.q as f64 * (nf + nf * nf / g.q as f64) / p_lo;
    Ok(SumReport::shape("square-contribution", lhs, shape))
}

/// 𝓘 = ⋃_{|k|≤2K+1} (M e^{k−1/H}, M e^k].
pub fn short_interval_union(m: f64, k: u32, h: f64) -> Vec<IntegerInterval> {
    let k = 2 * k as i64 + 1;
    (-k..=k)
        .map(|i| IntegerInterval {
            lo: m * (i as f64 - 1.0 / h).exp(),
            hi: m * (i as f64).exp(),
        })
        .collect()
}

/// (1/φ) Σ_χ |Σ_{ℓm≤N, m∈𝓘, ℓ q^ε-rough} α(ℓ,m) conj χ(ℓm)|² against (φ/q)(N + N²/q)/H.
pub fn short_interval_contribution(
    g: &UnitGroup,
    alpha: impl Fn(u64, u64) -> Complex64,
    n: u64,
    m: f64,
    k: u32,
    h: f64,
    epsilon: f64,
) -> Result<SumReport> {
    if !(h >= 1.0 && m >= 1.0) || (n as f64) < m.powi(4) {
        return precondition(format!(
            "need H, M ≥ 1 and N ≥ M⁴, got H = {h}, M = {m}, N = {n}"
        ));
    }
    let z = (g.q as f64).powf(epsilon);
    let mut ms: Vec<u64> = short_interval_union(m, k, h)
        .iter()
        .flat_map(|iv| iv.iter())
        .collect();
    ms.sort_unstable();
    ms.dedup();
    let mut items = Vec::new();
    for &mm in &ms {
        for l in 1..=(n / mm) {
            if is_rough(l, z) {
                items.push((l * mm, alpha(l, mm)));
            }
        }
    }
    let lhs = second_moment(g, &items, None) / g.phi as f64;
    let nf = n as f64;
    let shape = g.phi as f64 / g.q as f64 * (nf + nf * nf / g.q as f64) / h;
    Ok(SumReport::shape("short-intervals", lhs, shape))
}
