use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{class_histogram, sums_conj_all, LadderInterval, LadderSpec, SumReport};
use crate::arith::{factorize, IntegerInterval};
use crate::error::{precondition, Result};
use crate::group::{CosetSpec, UnitGroup};
use crate::multfunc::{MultiplicativeFunction, Sign};

/// Tolerance for the decomposition identity.
pub const IDENTITY_TOL: f64 = 1e-12;

/// Inputs of the decomposition of M_{bH,v}^Δ along the j-th ladder interval.
#[derive(Debug, Clone)]
pub struct RamareConfig<'a> {
    pub h: &'a MultiplicativeFunction,
    /// The coset bH.
    pub coset: CosetSpec,
    pub delta: Sign,
    pub m: f64,
    pub v: i64,
    pub j: usize,
    pub ladder: &'a LadderSpec,
    /// Roughness bound: admissible integers have no prime factor below it.
    pub p1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RamareTerms {
    pub m: Complex64,
    pub m_tilde: Complex64,
    pub e1: Complex64,
    pub e2: Complex64,
    pub residual: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RamareReport {
    pub terms: Vec<RamareTerms>,
    pub max_residual: f64,
    pub max_coefficient: f64,
    /// Buckets w with at least one prime.
    pub buckets: usize,
    pub m_count: usize,
    pub e1_support: usize,
    pub e2_support: usize,
    /// E2 coefficients found off the two edge windows; zero when the bookkeeping is right.
    pub e2_off_window: usize,
    pub report: SumReport,
}

struct Admissible {
    label: u64,
    sign: Sign,
    omega_j: usize,
}

struct Ctx<'a> {
    g: &'a UnitGroup,
    cfg: &'a RamareConfig<'a>,
    iv: LadderInterval,
    period: u64,
}

impl Ctx<'_> {
    fn label(&self, a: u64) -> Option<u64> {
        self.cfg.coset.psi.exponent_at(self.g, a % self.g.q)
    }

    fn target(&self) -> u64 {
        self.label(self.cfg.coset.b)
            .expect("coset representative is a unit")
    }

    fn combine(&self, a: u64, b: u64) -> u64 {
        (a + b) % self.period
    }

    /// Conditions on the cofactor m: unit, square-free, in 𝒮_j, P1-rough, h(m) ≠ 0.
    fn admissible(&self, m: u64) -> Result<Option<Admissible>> {
        let Some(label) = self.label(m) else {
            return Ok(None);
        };
        let f = factorize(m)?;
        if !f.is_squarefree()
            || !f.primes().all(|p| p as f64 >= self.cfg.p1)
            || !self.cfg.ladder.contains_except(&f, self.cfg.j)
        {
            return Ok(None);
        }
        let hv = self.cfg.h.eval(m)?;
        if hv == 0.0 {
            return Ok(None);
        }
        let sign = if hv > 0.0 { Sign::Plus } else { Sign::Minus };
        let omega_j = f.primes().filter(|&p| self.iv.contains(p)).count();
        Ok(Some(Admissible {
            label,
            sign,
            omega_j,
        }))
    }

    fn prime_sign(&self, p: u64) -> Option<Sign> {
        let v = self.cfg.h.at_prime(p);
        if v == 0.0 {
            None
        } else if v > 0.0 {
            Some(Sign::Plus)
        } else {
            Some(Sign::Minus)
        }
    }

    /// Main cofactor window (M e^{v−w/H−1}, M e^{v−w/H}] for bucket w.
    fn window(&self, w: i64) -> IntegerInterval {
        IntegerInterval::e_adic(self.cfg.m * (-(w as f64) / self.iv.h).exp(), self.cfg.v)
    }

    fn outer(&self) -> IntegerInterval {
        IntegerInterval::e_adic(self.cfg.m, self.cfg.v)
    }
}

/// Decomposes M_{bH,v}^Δ(χ) = M̃ + E1 + E2 by marking one prime from (P_j, Q_j] with
/// weight 1/(ω(m; P_j, Q_j) + 1), and checks the identity for every character.
pub fn ramare_decompose(g: &UnitGroup, cfg: &RamareConfig) -> Result<RamareReport> {
    let Some(&iv) = cfg.ladder.interval(cfg.j) else {
        return precondition(format!("ladder has no interval j = {}", cfg.j));
    };
    let primes = iv.primes();
    if let Some(&p) = primes.first() {
        if (p as f64) < cfg.p1 {
            return precondition(format!(
                "prime {p} of interval j = {} lies below P1 = {}",
                cfg.j, cfg.p1
            ));
        }
    }
    let ctx = Ctx {
        g,
        cfg,
        iv,
        period: g.exponent().max(1),
    };
    let target = ctx.target();
    let outer = ctx.outer();
    let norm = outer.hi;
    let one = Complex64::new(1.0, 0.0);

    // Direct sum over n.
    let mut direct = Vec::new();
    for n in outer.iter() {
        if !cfg.coset.contains(g, n % g.q) {
            continue;
        }
        let f = factorize(n)?;
        if f.is_squarefree()
            && f.primes().all(|p| p as f64 >= cfg.p1)
            && cfg.ladder.contains_factorization(&f)
            && super::sign_matches(cfg.h, n, cfg.delta)?
        {
            direct.push(n);
        }
    }
    let m_vals: Vec<Complex64> =
        sums_conj_all(g, &class_histogram(g, direct.iter().map(|&n| (n, one))))
            .into_iter()
            .map(|s| s / norm)
            .collect();

    // Main term: Σ_{Δ1Δ2=Δ} Σ_{b1b2H=bH} Σ_w Q_{j,b1H,w}^{Δ1} R_{j,b2H,v,w}^{Δ2}.
    let mut buckets: BTreeMap<(i64, u64, Sign), Vec<u64>> = BTreeMap::new();
    for &p in &primes {
        if let (Some(l), Some(s)) = (ctx.label(p), ctx.prime_sign(p)) {
            buckets.entry((iv.bucket(p), l, s)).or_default().push(p);
        }
    }
    let nchar = g.character_count();
    let mut m_tilde = vec![Complex64::new(0.0, 0.0); nchar];
    let mut cofactor_cache: BTreeMap<i64, Vec<(u64, Admissible)>> = BTreeMap::new();
    for (&(w, l1, s1), ps) in &buckets {
        let qn = (w as f64 / iv.h).exp();
        let qv = sums_conj_all(g, &class_histogram(g, ps.iter().map(|&p| (p, one))));
        if let std::collections::btree_map::Entry::Vacant(e) = cofactor_cache.entry(w) {
            let win = ctx.window(w);
            let mut items = Vec::new();
            for m in win.iter() {
                if let Some(a) = ctx.admissible(m)? {
                    items.push((m, a));
                }
            }
            e.insert(items);
        }
        let win = ctx.window(w);
        let l2 = (target + ctx.period - l1) % ctx.period;
        let s2 = cfg.delta * s1;
        let items = cofactor_cache[&w]
            .iter()
            .filter(|(_, a)| a.label == l2 && a.sign == s2)
            .map(|(m, a)| (*m, one / (a.omega_j as f64 + 1.0)));
        let rv = sums_conj_all(g, &class_histogram(g, items));
        let rn = win.hi;
        for c in 0..nchar {
            m_tilde[c] += (qv[c] / qn) * (rv[c] / rn);
        }
    }

    let admissible_pair = |p: u64, a: &Admissible| -> bool {
        match (ctx.label(p), ctx.prime_sign(p)) {
            (Some(lp), Some(sp)) => ctx.combine(lp, a.label) == target && sp * a.sign == cfg.delta,
            _ => false,
        }
    };

    // E1: pairs with p | m, written at n = p² m'.
    let mut d1: BTreeMap<u64, f64> = BTreeMap::new();
    for &p in &primes {
        let p2 = p.saturating_mul(p);
        if p2 > outer.last() {
            break;
        }
        for mp in (outer.first().div_ceil(p2))..=(outer.last() / p2) {
            let m = p * mp;
            if let Some(a) = ctx.admissible(m)? {
                if admissible_pair(p, &a) {
                    *d1.entry(p2 * mp).or_default() -= 1.0 / (a.omega_j as f64 + 1.0);
                }
            }
        }
    }

    // E2: boundary mismatch between m ∈ I_{M/p}(v) and the bucket window.
    let lo_win = IntegerInterval {
        lo: cfg.m * ((cfg.v - 1) as f64 - 1.0 / iv.h).exp(),
        hi: outer.lo,
    };
    let hi_win = IntegerInterval {
        lo: cfg.m * (cfg.v as f64 - 1.0 / iv.h).exp(),
        hi: outer.hi,
    };
    let scan = IntegerInterval {
        lo: lo_win.lo * (1.0 - 1e-9),
        hi: outer.hi,
    };
    let mut d2: BTreeMap<u64, f64> = BTreeMap::new();
    for n in scan.iter() {
        if ctx.label(n).is_none() {
            continue;
        }
        let f = factorize(n)?;
        let mut d = 0.0;
        for p in f.primes().filter(|&p| iv.contains(p)) {
            let m = n / p;
            let Some(a) = ctx.admissible(m)? else {
                continue;
            };
            if !admissible_pair(p, &a) {
                continue;
            }
            let step1 = outer.contains(n) as i32 as f64;
            let main = ctx.window(iv.bucket(p)).contains(m) as i32 as f64;
            d += (step1 - main) / (a.omega_j as f64 + 1.0);
        }
        if d != 0.0 {
            d2.insert(n, d);
        }
    }
    let e2_off_window = d2
        .keys()
        .filter(|&&n| !lo_win.contains(n) && !hi_win.contains(n))
        .count();

    let to_sums = |d: &BTreeMap<u64, f64>| -> Vec<Complex64> {
        let hist = class_histogram(g, d.iter().map(|(&n, &c)| (n, Complex64::new(c, 0.0))));
        sums_conj_all(g, &hist)
            .into_iter()
            .map(|s| s / norm)
            .collect()
    };
    let e1 = to_sums(&d1);
    let e2 = to_sums(&d2);

    let terms: Vec<RamareTerms> = (0..nchar)
        .map(|c| RamareTerms {
            m: m_vals[c],
            m_tilde: m_tilde[c],
            e1: e1[c],
            e2: e2[c],
            residual: (m_vals[c] - m_tilde[c] - e1[c] - e2[c]).norm(),
        })
        .collect();
    let max_residual = terms.iter().map(|t| t.residual).fold(0.0, f64::max);
    let max_coefficient = d1
        .values()
        .chain(d2.values())
        .map(|d| d.abs())
        .fold(0.0, f64::max);
    let report = SumReport::checked("ramare-identity", max_residual, IDENTITY_TOL, 0.0);
    Ok(RamareReport {
        terms,
        max_residual,
        max_coefficient,
        buckets: buckets.len(),
        m_count: direct.len(),
        e1_support: d1.len(),
        e2_support: d2.len(),
        e2_off_window,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::charsums::ladder_build;

    fn run(q: u64, ladder: &[(f64, f64)], m: f64, v: i64, delta: Sign, j: usize) -> RamareReport {
        let g = UnitGroup::new(q).unwrap();
        let h = MultiplicativeFunction::liouville();
        let ladder = ladder_build(10.0, q, Some(ladder)).unwrap();
        let cfg = RamareConfig {
            h: &h,
            coset: g.full_coset(),
            delta,
            m,
            v,
            j,
            ladder: &ladder,
            p1: 2.0,
        };
        ramare_decompose(&g, &cfg).unwrap()
    }

    #[test]
    fn identity_q35() {
        let r = run(35, &[(10.0, 40.0)], 2000.0, 0, Sign::Plus, 2);
        assert_eq!(r.terms.len(), 24);
        assert!(r.max_residual <= IDENTITY_TOL, "{}", r.max_residual);
        assert!(r.max_coefficient <= 1.0);
        assert_eq!(r.e2_off_window, 0);
        assert!(r.m_count > 0 && r.e1_support > 0 && r.e2_support > 0);
    }

    #[test]
    fn identity_q101_two_intervals() {
        for delta in Sign::BOTH {
            for j in [2, 3] {
                let r = run(101, &[(3.0, 10.0), (10.0, 40.0)], 5000.0, 1, delta, j);
                assert!(
                    r.max_residual <= IDENTITY_TOL,
                    "j={j} {delta}: {}",
                    r.max_residual
                );
                assert!(r.max_coefficient <= 1.0);
                assert_eq!(r.e2_off_window, 0);
            }
        }
    }

    #[test]
    fn identity_on_index_two_coset() {
        let g = UnitGroup::new(101).unwrap();
        let h = MultiplicativeFunction::liouville();
        let ladder = ladder_build(10.0, 101, Some(&[(3.0, 10.0), (10.0, 40.0)])).unwrap();
        let h2 = g.index2_subgroups().remove(0);
        for b in h2.coset_reps(&g) {
            let cfg = RamareConfig {
                h: &h,
                coset: h2.with_rep(b),
                delta: Sign::Minus,
                m: 3000.0,
                v: 0,
                j: 2,
                ladder: &ladder,
                p1: 2.0,
            };
            let r = ramare_decompose(&g, &cfg).unwrap();
            assert!(r.max_residual <= IDENTITY_TOL);
        }
    }

    #[test]
    fn empty_m_gives_zero_terms() {
        let r = run(35, &[(10.0, 40.0)], 1.0, 0, Sign::Plus, 2);
        assert_eq!(r.m_count, 0);
        assert!(r
            .terms
            .iter()
            .all(|t| t.m.norm() == 0.0 && t.residual <= IDENTITY_TOL));
    }

    #[test]
    fn rough_bound_must_sit_below_interval() {
        let g = UnitGroup::new(35).unwrap();
        let h = MultiplicativeFunction::liouville();
        let ladder = ladder_build(10.0, 35, Some(&[(10.0, 40.0)])).unwrap();
        let cfg = RamareConfig {
            h: &h,
            coset: g.full_coset(),
            delta: Sign::Plus,
            m: 100.0,
            v: 0,
            j: 2,
            ladder: &ladder,
            p1: 13.0,
        };
        assert!(ramare_decompose(&g, &cfg).is_err());
    }
}
