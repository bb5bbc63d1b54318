//! End-to-end reproductions: sign sets, R(h; q), the S and T counts and the case driver.

mod cases;
mod st;

pub use cases::*;
pub use st::*;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::arith::{IntegerInterval, PrimeSieve};
use crate::charsums::{ladder_build, LadderSpec};
use crate::error::{precondition, Result};
use crate::group::UnitGroup;
use crate::multfunc::{MultiplicativeFunction, SignTable};

/// Relative tolerance for the R²M = q and RU = q relations.
pub const RELATION_TOL: f64 = 1e-9;

/// Desk-scale instantiation of every parameter, with the asymptotic formulas as defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub q: u64,
    pub epsilon: f64,
    pub q1: f64,
    pub p1: f64,
    /// K = ⌊ε² log q⌋.
    pub k: i64,
    pub r: f64,
    pub u: f64,
    pub m: f64,
    pub z: f64,
    /// Spectral threshold of the dense models, log^{-1/4} q.
    pub delta: f64,
    pub ladder: LadderSpec,
    pub easy_mode: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Relations {
    pub r2m_over_q: f64,
    pub ru_over_q: f64,
    pub holds: bool,
}

impl ParamSet {
    /// Defaults: Q1 = max(q^ε, 3), z = q^{√ε}; R = q^{1/2} in easy mode, else q^{1/2−ε/4}; U = q/R, M = q/R².
    pub fn new(q: u64, epsilon: f64, easy_mode: bool) -> Result<Self> {
        if q < 3 {
            return precondition(format!("q = {q} must be at least 3"));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return precondition(format!("ε = {epsilon} must lie in (0, 1)"));
        }
        let qf = q as f64;
        let lq = qf.ln();
        let q1 = qf.powf(epsilon).max(3.0);
        let r = if easy_mode {
            qf.sqrt()
        } else {
            qf.powf(0.5 - epsilon / 4.0)
        };
        Ok(ParamSet {
            q,
            epsilon,
            q1,
            p1: q1 / std::f64::consts::E,
            k: (epsilon * epsilon * lq).floor() as i64,
            r,
            u: qf / r,
            m: qf / (r * r),
            z: qf.powf(epsilon.sqrt()),
            delta: lq.powf(-0.25),
            ladder: ladder_build(q1, q, None)?,
            easy_mode,
        })
    }

    /// Replaces Q1 (and P1 = Q1/e), rebuilding the default ladder.
    pub fn with_q1(mut self, q1: f64) -> Result<Self> {
        let overrides: Option<Vec<(f64, f64)>> = self.ladder.overridden.then(|| {
            self.ladder
                .intervals
                .iter()
                .map(|iv| (iv.lo, iv.hi))
                .collect()
        });
        self.ladder = ladder_build(q1, self.q, overrides.as_deref())?;
        self.q1 = q1;
        self.p1 = q1 / std::f64::consts::E;
        Ok(self)
    }

    pub fn with_ladder(mut self, intervals: &[(f64, f64)]) -> Result<Self> {
        self.ladder = ladder_build(self.q1, self.q, Some(intervals))?;
        Ok(self)
    }

    /// Sets R and derives U = q/R and M = q/R².
    pub fn with_r(mut self, r: f64) -> Self {
        let qf = self.q as f64;
        self.r = r;
        self.u = qf / r;
        self.m = qf / (r * r);
        self
    }

    pub fn relations(&self) -> Relations {
        let qf = self.q as f64;
        let r2m_over_q = self.r * self.r * self.m / qf;
        let ru_over_q = self.r * self.u / qf;
        let holds =
            (r2m_over_q - 1.0).abs() <= RELATION_TOL && (ru_over_q - 1.0).abs() <= RELATION_TOL;
        Relations {
            r2m_over_q,
            ru_over_q,
            holds,
        }
    }

    /// I = (R/e, R] in easy mode, I_R(k) = (e^{k−1}R, e^k R] otherwise.
    pub fn r_interval(&self, k: i64) -> IntegerInterval {
        if self.easy_mode {
            IntegerInterval::e_adic(self.r, 0)
        } else {
            IntegerInterval::e_adic(self.r, k)
        }
    }

    pub fn k_range(&self) -> Vec<i64> {
        if self.easy_mode {
            vec![0]
        } else {
            (-self.k..=self.k).collect()
        }
    }
}

/// Least square-free representatives of each sign in one class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub plus: Option<u64>,
    pub minus: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RFunctionResult {
    pub q: u64,
    pub h: String,
    pub cap: u64,
    #[serde(rename = "R")]
    pub r_value: Option<u64>,
    /// Keyed by residue a ∈ Z_q^×.
    pub witnesses: BTreeMap<u64, Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ESets {
    pub x: u64,
    pub plus: Vec<u64>,
    pub minus: Vec<u64>,
}

struct Scan {
    first: Vec<[Option<u64>; 2]>,
    /// Largest n that was needed to fill every slot, if all were filled.
    complete_at: Option<u64>,
}

fn scan_signs(table: &SignTable, g: &UnitGroup, limit: u64, stop_when_full: bool) -> Scan {
    let mut first = vec![[None, None]; g.phi as usize];
    let mut missing = 2 * g.phi as usize;
    let mut complete_at = None;
    for n in 1..=limit {
        let s = table.get(n);
        if s == 0 {
            continue;
        }
        let Some(i) = g.index_of(n) else { continue };
        let slot = &mut first[i][(s < 0) as usize];
        if slot.is_none() {
            *slot = Some(n);
            missing -= 1;
            if missing == 0 {
                complete_at = Some(n);
                if stop_when_full {
                    break;
                }
            }
        }
    }
    Scan { first, complete_at }
}

fn small_sieve(limit: u64) -> PrimeSieve {
    PrimeSieve::new(limit.max(2))
}

/// E_h^±(x): classes containing a square-free n ≤ x with sgn h(n) = ±.
pub fn e_sets(h: &MultiplicativeFunction, q: u64, x: u64) -> Result<ESets> {
    e_sets_with(h, q, x, &small_sieve(x))
}

pub fn e_sets_with(
    h: &MultiplicativeFunction,
    q: u64,
    x: u64,
    sieve: &PrimeSieve,
) -> Result<ESets> {
    let g = UnitGroup::new(q)?;
    if sieve.limit() < x {
        return precondition(format!("sieve limit {} below x = {x}", sieve.limit()));
    }
    let table = SignTable::build(h, x, sieve);
    let scan = scan_signs(&table, &g, x, false);
    let pick = |s: usize| -> Vec<u64> {
        g.units()
            .iter()
            .zip(&scan.first)
            .filter(|(_, w)| w[s].is_some())
            .map(|(&a, _)| a)
            .collect()
    };
    Ok(ESets {
        x,
        plus: pick(0),
        minus: pick(1),
    })
}

/// R(h; q) by an exhaustive scan up to `cap`.
pub fn r_of_h_q(h: &MultiplicativeFunction, q: u64, cap: u64) -> Result<RFunctionResult> {
    r_of_h_q_with(h, q, cap, &small_sieve(cap))
}

pub fn r_of_h_q_with(
    h: &MultiplicativeFunction,
    q: u64,
    cap: u64,
    sieve: &PrimeSieve,
) -> Result<RFunctionResult> {
    if cap < 1 {
        return precondition("cap must be at least 1");
    }
    if sieve.limit() < cap {
        return precondition(format!("sieve limit {} below cap = {cap}", sieve.limit()));
    }
    let g = UnitGroup::new(q)?;
    let table = SignTable::build(h, cap, sieve);
    let scan = scan_signs(&table, &g, cap, true);
    let witnesses = g
        .units()
        .iter()
        .zip(&scan.first)
        .map(|(&a, w)| {
            (
                a,
                Witness {
                    plus: w[0],
                    minus: w[1],
                },
            )
        })
        .collect();
    Ok(RFunctionResult {
        q,
        h: h.name.clone(),
        cap,
        r_value: scan.complete_at,
        witnesses,
    })
}

/// Independent re-check of a scan result by trial factorization.
pub fn verify_witnesses(h: &MultiplicativeFunction, res: &RFunctionResult) -> Result<bool> {
    use crate::arith::factorize;
    let q = res.q;
    let g = UnitGroup::new(q)?;
    let sign_of = |n: u64| -> Result<Option<bool>> {
        let f = factorize(n)?;
        if !f.is_squarefree() {
            return Ok(None);
        }
        let v = h.eval(n)?;
        Ok(if v == 0.0 { None } else { Some(v > 0.0) })
    };
    let mut max_needed = 0;
    for (&a, w) in &res.witnesses {
        for (want_plus, slot) in [(true, w.plus), (false, w.minus)] {
            let Some(n) = slot else {
                if res.r_value.is_some() {
                    return Ok(false);
                }
                continue;
            };
            if n % q.max(1) != a % q.max(1) || sign_of(n)? != Some(want_plus) {
                return Ok(false);
            }
            // minimality: no smaller square-free member of the class has this sign
            let mut m = if q == 1 { 1 } else { a.max(1) };
            while m < n {
                if g.is_unit(m) && sign_of(m)? == Some(want_plus) {
                    return Ok(false);
                }
                m += q;
            }
            max_needed = max_needed.max(n);
        }
    }
    Ok(match res.r_value {
        Some(r) => r == max_needed,
        None => true,
    })
}
