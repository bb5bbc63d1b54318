//! The counting functions S (over integers) and T (over the group), and their comparison.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_squarefree, IntegerInterval, PrimeSieve};
use crate::charsums::{
    class_histogram, f_delta, m_set, prime_set, sums_conj_all, unit_set, IntervalFunction,
    SumReport,
};
use crate::densemodel::build_dense_model;
use crate::error::{domain, precondition, resource, Result};
use crate::group::{convolve_group, fourier_inverse, CosetSpec, UnitGroup};
use crate::multfunc::{MultiplicativeFunction, Sign};

use super::ParamSet;

/// Default cap on tuple visits for direct enumeration.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// One convolution factor: weighted integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Factor {
    pub label: String,
    pub items: Vec<(u64, f64)>,
}

impl Factor {
    fn indicator(label: &str, set: Vec<u64>) -> Self {
        Factor {
            label: label.into(),
            items: set.into_iter().map(|n| (n, 1.0)).collect(),
        }
    }

    fn from_function(label: &str, f: &IntervalFunction) -> Self {
        Factor {
            label: label.into(),
            items: f.support.clone(),
        }
    }

    fn histogram(&self, g: &UnitGroup) -> Vec<Complex64> {
        class_histogram(
            g,
            self.items.iter().map(|&(n, w)| (n, Complex64::new(w, 0.0))),
        )
    }

    fn real_histogram(&self, g: &UnitGroup) -> Vec<f64> {
        self.histogram(g).iter().map(|z| z.re).collect()
    }
}

/// Key of a dense model: (k, Δ).
pub type ModelKey = (i64, Sign);

/// One k̄-summand of S and T.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct STerm {
    pub k: [i64; 3],
    pub models: [ModelKey; 3],
    /// f_{k1}, f_{k2}, f_{k3} followed by the set indicators (𝒬, 𝒰 and, in general, ℳ).
    pub factors: Vec<Factor>,
    pub s_norm: f64,
    pub t_norm: f64,
}

impl STerm {
    pub fn visits(&self) -> f64 {
        self.factors.iter().map(|f| f.items.len() as f64).product()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Easy,
    General,
}

/// Every finite set and function entering S and T for one configuration.
#[derive(Debug, Clone)]
pub struct SInstance {
    pub variant: Variant,
    pub params: ParamSet,
    pub terms: Vec<STerm>,
    pub functions: BTreeMap<ModelKey, IntervalFunction>,
    /// Dense-model values g_k^Δ on the units; filled by `build_models` or by the caller.
    pub models: BTreeMap<ModelKey, Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct EasyConfig {
    pub b2: Option<CosetSpec>,
    pub b3: Option<CosetSpec>,
    pub deltas: [Sign; 3],
    /// Range of u; defaults to u ≤ R.
    pub u_interval: Option<IntegerInterval>,
}

#[derive(Debug, Clone)]
pub struct GeneralConfig {
    pub b4: Option<CosetSpec>,
    pub b5: Option<CosetSpec>,
    pub b6: Option<CosetSpec>,
    pub deltas: [Sign; 6],
    pub ks: Vec<[i64; 3]>,
}

fn function_for(
    h: &MultiplicativeFunction,
    p: &ParamSet,
    key: ModelKey,
    sieve: Option<&PrimeSieve>,
    cache: &mut BTreeMap<ModelKey, IntervalFunction>,
) -> Result<IntervalFunction> {
    if let Some(f) = cache.get(&key) {
        return Ok(f.clone());
    }
    let f = f_delta(h, p.q, p.z, &p.r_interval(key.0), key.1, sieve)?;
    cache.insert(key, f.clone());
    Ok(f)
}

impl SInstance {
    /// n = r1 r2 r3 · p · u with r_i ∈ [I]_q z-rough, p ∈ 𝒬_{B2}, u ∈ 𝒰_{B3}; S = |[I]_q|³ Q1 R, T = φ³ Q1 R.
    pub fn easy(
        h: &MultiplicativeFunction,
        g: &UnitGroup,
        params: &ParamSet,
        cfg: &EasyConfig,
        sieve: Option<&PrimeSieve>,
    ) -> Result<Self> {
        if !params.easy_mode {
            return precondition("easy variant needs easy_mode parameters");
        }
        let mut functions = BTreeMap::new();
        let key = (0, cfg.deltas[0]);
        let f = function_for(h, params, key, sieve, &mut functions)?;
        let primes = prime_set(
            h,
            g,
            cfg.b2.as_ref(),
            cfg.deltas[1],
            params.q1 / std::f64::consts::E,
            params.q1,
        )?;
        let u_iv = cfg.u_interval.unwrap_or(IntegerInterval::below(params.r));
        let units = unit_set(h, g, cfg.b3.as_ref(), cfg.deltas[2], &u_iv)?;
        let ff = Factor::from_function("f", &f);
        let uc = f.unit_count as f64;
        let phi = g.phi as f64;
        let term = STerm {
            k: [0, 0, 0],
            models: [key; 3],
            factors: vec![
                ff.clone(),
                ff.clone(),
                ff,
                Factor::indicator("Q", primes),
                Factor::indicator("U", units),
            ],
            s_norm: uc.powi(3) * params.q1 * params.r,
            t_norm: phi.powi(3) * params.q1 * params.r,
        };
        Ok(SInstance {
            variant: Variant::Easy,
            params: params.clone(),
            terms: vec![term],
            functions,
            models: BTreeMap::new(),
        })
    }

    /// n = r1 r2 r3 · p1 · u · m summed over k̄ ∈ 𝒦 with the per-k̄ normalizers S_k̄ and T_k̄.
    pub fn general(
        h: &MultiplicativeFunction,
        g: &UnitGroup,
        params: &ParamSet,
        cfg: &GeneralConfig,
        sieve: Option<&PrimeSieve>,
    ) -> Result<Self> {
        if params.easy_mode {
            return precondition("general variant needs general parameters");
        }
        let kk = params.k;
        if let Some(k) = cfg.ks.iter().find(|k| k.iter().any(|&x| x.abs() > kk)) {
            return precondition(format!("k̄ = {k:?} outside [−{kk}, {kk}]³"));
        }
        let d = cfg.deltas;
        let phi = g.phi as f64;
        let primes = prime_set(h, g, cfg.b4.as_ref(), d[3], params.p1, params.q1)?;
        let mut functions = BTreeMap::new();
        let mut u_cache: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
        let mut m_cache: BTreeMap<i64, Vec<u64>> = BTreeMap::new();
        let mut terms = Vec::new();
        for &k in &cfg.ks {
            let keys = [(k[0], d[0]), (k[1], d[1]), (k[2], d[2])];
            let mut factors = Vec::with_capacity(6);
            let mut s_norm = 1.0;
            for (i, &key) in keys.iter().enumerate() {
                let f = function_for(h, params, key, sieve, &mut functions)?;
                s_norm *= f.unit_count as f64;
                factors.push(Factor::from_function(&format!("f{}", i + 1), &f));
            }
            let vu = -k[0];
            let vm = -k[1] - k[2];
            if let std::collections::btree_map::Entry::Vacant(e) = u_cache.entry(vu) {
                let iv = IntegerInterval::e_adic(params.u, vu);
                e.insert(unit_set(h, g, cfg.b5.as_ref(), d[4], &iv)?);
            }
            if let std::collections::btree_map::Entry::Vacant(e) = m_cache.entry(vm) {
                let iv = IntegerInterval::e_adic(params.m, vm);
                e.insert(m_set(
                    h,
                    g,
                    cfg.b6.as_ref(),
                    d[5],
                    &iv,
                    &params.ladder,
                    params.q1,
                )?);
            }
            factors.push(Factor::indicator("Q", primes.clone()));
            factors.push(Factor::indicator("U", u_cache[&vu].clone()));
            factors.push(Factor::indicator("M", m_cache[&vm].clone()));
            let tail = params.q1 * params.u * (vu as f64).exp() * params.m * (vm as f64).exp();
            terms.push(STerm {
                k,
                models: keys,
                factors,
                s_norm: s_norm * tail,
                t_norm: phi.powi(3) * tail,
            });
        }
        Ok(SInstance {
            variant: Variant::General,
            params: params.clone(),
            terms,
            functions,
            models: BTreeMap::new(),
        })
    }

    /// Dense models g_k^Δ at the parameter δ for every function in use.
    pub fn build_models(&mut self, g: &UnitGroup) -> Result<()> {
        for (key, f) in &self.functions {
            let m = build_dense_model(
                g,
                f,
                self.params.delta,
                &format!("f[k={},{:?}]", key.0, key.1),
            )?;
            self.models.insert(*key, m.values);
        }
        Ok(())
    }

    pub fn visits(&self) -> f64 {
        self.terms.iter().map(|t| t.visits()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Method {
    Direct { visits: u64 },
    Characters,
    MonteCarlo { samples: u64, seed: u64 },
}

/// S(a) for every unit a (unit-index order), with the non-square-free part when enumerated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SValues {
    pub method: Method,
    pub values: Vec<f64>,
    pub loss: Option<Vec<f64>>,
    pub stderr: Option<Vec<f64>>,
}

impl SValues {
    pub fn at(&self, g: &UnitGroup, a: u64) -> Result<f64> {
        match g.index_of(a) {
            Some(i) => Ok(self.values[i]),
            None => domain(format!("{a} is not a unit mod {}", g.q)),
        }
    }
}

struct Prepared {
    idx: Vec<Vec<(usize, u64, f64, bool)>>,
}

fn prepare(g: &UnitGroup, term: &STerm) -> Prepared {
    let idx = term
        .factors
        .iter()
        .map(|f| {
            f.items
                .iter()
                .filter_map(|&(n, w)| g.index_of(n).map(|i| (i, n, w, is_squarefree(n))))
                .collect()
        })
        .collect();
    Prepared { idx }
}

#[allow(clippy::too_many_arguments)]
fn enumerate(
    g: &UnitGroup,
    p: &Prepared,
    depth: usize,
    class: usize,
    weight: f64,
    sqfree: bool,
    chosen: &mut Vec<u64>,
    total: &mut [f64],
    loss: &mut [f64],
) {
    if depth == p.idx.len() {
        total[class] += weight;
        if !sqfree {
            loss[class] += weight;
        }
        return;
    }
    for &(i, n, w, sf) in &p.idx[depth] {
        let still = sqfree && sf && chosen.iter().all(|&m| gcd(m, n) == 1);
        chosen.push(n);
        enumerate(
            g,
            p,
            depth + 1,
            g.mul_index(class, i),
            weight * w,
            still,
            chosen,
            total,
            loss,
        );
        chosen.pop();
    }
}

fn identity_index(g: &UnitGroup) -> usize {
    g.index_of(1).expect("1 is a unit")
}

/// Direct enumeration of every tuple; resource error above the budget.
pub fn s_direct(g: &UnitGroup, inst: &SInstance, budget: u64) -> Result<SValues> {
    let visits = inst.visits();
    if visits > budget as f64 {
        return resource(format!(
            "{visits:.3e} tuple visits exceed the budget of {budget}"
        ));
    }
    let n = g.phi as usize;
    let mut values = vec![0.0; n];
    let mut loss = vec![0.0; n];
    for term in &inst.terms {
        let p = prepare(g, term);
        let mut t = vec![0.0; n];
        let mut l = vec![0.0; n];
        enumerate(
            g,
            &p,
            0,
            identity_index(g),
            1.0,
            true,
            &mut Vec::new(),
            &mut t,
            &mut l,
        );
        for i in 0..n {
            values[i] += t[i] / term.s_norm;
            loss[i] += l[i] / term.s_norm;
        }
    }
    Ok(SValues {
        method: Method::Direct {
            visits: visits as u64,
        },
        values,
        loss: Some(loss),
        stderr: None,
    })
}

/// S(a) = Σ_k̄ (1/(S_k̄ φ)) Σ_χ χ(a) Π_i Σ_n w_i(n) conj χ(n).
pub fn s_characters(g: &UnitGroup, inst: &SInstance) -> Result<SValues> {
    let n = g.phi as usize;
    let phi = g.phi as f64;
    let mut values = vec![0.0; n];
    for term in &inst.terms {
        let mut coeffs = vec![Complex64::new(1.0 / (phi * term.s_norm), 0.0); g.character_count()];
        for f in &term.factors {
            for (c, s) in coeffs.iter_mut().zip(sums_conj_all(g, &f.histogram(g))) {
                *c *= s;
            }
        }
        for (v, z) in values.iter_mut().zip(fourier_inverse(g, &coeffs)?) {
            *v += z.re;
        }
    }
    Ok(SValues {
        method: Method::Characters,
        values,
        loss: None,
        stderr: None,
    })
}

/// Uniform tuple sampling; each term's estimate carries its standard error.
pub fn s_monte_carlo(g: &UnitGroup, inst: &SInstance, samples: u64, seed: u64) -> Result<SValues> {
    if samples == 0 {
        return precondition("Monte Carlo needs at least one sample");
    }
    let n = g.phi as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = vec![0.0; n];
    let mut var = vec![0.0; n];
    let id = identity_index(g);
    for term in &inst.terms {
        let p = prepare(g, term);
        if p.idx.iter().any(|f| f.is_empty()) {
            continue;
        }
        let scale: f64 = p.idx.iter().map(|f| f.len() as f64).product::<f64>() / term.s_norm;
        let mut sum = vec![0.0; n];
        let mut sum2 = vec![0.0; n];
        for _ in 0..samples {
            let mut class = id;
            let mut w = scale;
            for f in &p.idx {
                let (i, _, wi, _) = f[rng.random_range(0..f.len())];
                class = g.mul_index(class, i);
                w *= wi;
            }
            sum[class] += w;
            sum2[class] += w * w;
        }
        let s = samples as f64;
        for i in 0..n {
            let mean = sum[i] / s;
            values[i] += mean;
            var[i] += (sum2[i] / s - mean * mean).max(0.0) / s;
        }
    }
    let stderr = var.into_iter().map(f64::sqrt).collect();
    Ok(SValues {
        method: Method::MonteCarlo { samples, seed },
        values,
        loss: None,
        stderr: Some(stderr),
    })
}

/// Direct when within budget, otherwise sampled.
pub fn s_evaluate(
    g: &UnitGroup,
    inst: &SInstance,
    budget: u64,
    samples: u64,
    seed: u64,
) -> Result<SValues> {
    if inst.visits() <= budget as f64 {
        s_direct(g, inst, budget)
    } else {
        s_monte_carlo(g, inst, samples, seed)
    }
}

/// T(a) = Σ_k̄ (1/T_k̄)(g_{k1} ∗ g_{k2} ∗ g_{k3} ∗ 1[𝒬] ∗ 1[𝒰] (∗ 1[ℳ]))(a).
pub fn t_values(g: &UnitGroup, inst: &SInstance) -> Result<Vec<f64>> {
    let n = g.phi as usize;
    let mut out = vec![0.0; n];
    for term in &inst.terms {
        let mut acc: Option<Vec<f64>> = None;
        for key in &term.models {
            let Some(v) = inst.models.get(key) else {
                return precondition(format!("no dense model for k = {}, {:?}", key.0, key.1));
            };
            acc = Some(match acc {
                None => v.clone(),
                Some(a) => convolve_group(g, &a, v),
            });
        }
        let mut acc = acc.expect("three models");
        for f in &term.factors[3..] {
            acc = convolve_group(g, &acc, &f.real_histogram(g));
        }
        for (o, v) in out.iter_mut().zip(acc) {
            *o += v / term.t_norm;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualRoute {
    pub direct: Vec<f64>,
    pub characters: Vec<f64>,
    pub max_relative: f64,
}

/// Largest |direct − characters| / max(|direct|, tiny) over all classes.
pub fn s_dual_route(g: &UnitGroup, inst: &SInstance, budget: u64) -> Result<DualRoute> {
    let d = s_direct(g, inst, budget)?;
    let c = s_characters(g, inst)?;
    let scale = d.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let max_relative = d
        .values
        .iter()
        .zip(&c.values)
        .map(|(x, y)| {
            if scale == 0.0 {
                (x - y).abs()
            } else {
                (x - y).abs() / scale
            }
        })
        .fold(0.0, f64::max);
    Ok(DualRoute {
        direct: d.values,
        characters: c.values,
        max_relative,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub a: u64,
    pub loss: f64,
    pub s_value: f64,
    /// The quantity the loss must be o(·) of.
    pub target: f64,
    pub ratio: f64,
    pub within_s: bool,
}

fn loss_target(g: &UnitGroup, inst: &SInstance) -> f64 {
    let p = &inst.params;
    let qf = p.q as f64;
    match inst.variant {
        Variant::Easy => 1.0 / qf.powf(1.0 + p.epsilon / 2.0),
        Variant::General => {
            let lq = qf.ln();
            (g.phi as f64 / qf) * lq.powi(3) / (qf * p.q1.powf(0.01) * p.q1.ln().powi(2))
        }
    }
}

/// Exact contribution of tuples with non-square-free product to S(a).
pub fn nonsquarefree_loss(
    g: &UnitGroup,
    inst: &SInstance,
    a: u64,
    budget: u64,
) -> Result<LossReport> {
    let s = s_direct(g, inst, budget)?;
    let Some(i) = g.index_of(a) else {
        return domain(format!("{a} is not a unit mod {}", g.q));
    };
    let loss = s.loss.as_ref().expect("direct route records the loss")[i];
    let target = loss_target(g, inst);
    Ok(LossReport {
        a,
        loss,
        s_value: s.values[i],
        target,
        ratio: loss / target,
        within_s: loss <= s.values[i],
    })
}

/// q's part built from primes below Q1, and its ratio to its totient.
fn smooth_part_ratio(q: u64, q1: f64) -> f64 {
    let mut r = 1.0;
    for p in crate::arith::primes_below(q1) {
        if q.is_multiple_of(p) {
            r *= p as f64 / (p as f64 - 1.0);
        }
    }
    r
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StReport {
    pub a: u64,
    pub s: f64,
    pub t: f64,
    pub abs_diff: f64,
    pub max_abs_diff: f64,
    pub argmax: u64,
    pub report: SumReport,
}

/// |S − T| against the comparison bound's shape (implied constant unknown, so report only).
pub fn st_compare(g: &UnitGroup, inst: &SInstance, s: &SValues, a: u64) -> Result<StReport> {
    let t = t_values(g, inst)?;
    let Some(i) = g.index_of(a) else {
        return domain(format!("{a} is not a unit mod {}", g.q));
    };
    let p = &inst.params;
    let qf = p.q as f64;
    let lq = qf.ln();
    let phi = g.phi as f64;
    let (lemma, shape) = match inst.variant {
        Variant::Easy => {
            let u = inst.terms[0].factors[4].items.len() as f64;
            (
                "st-comparison-easy",
                1.0 / qf.powf(1.0 + p.epsilon / 50.0) + u / (phi * lq.powf(1.25) * p.r),
            )
        }
        Variant::General => {
            let mut seen = std::collections::BTreeSet::new();
            let mut u_sum = 0.0;
            for term in &inst.terms {
                if seen.insert(term.k[0]) {
                    u_sum += term.factors[4].items.len() as f64 / ((-term.k[0]) as f64).exp() / p.u;
                }
            }
            let first = p.q1.powf(-1.0 / 90.0) / qf * (phi / qf) * lq.powi(3);
            let second =
                lq.powf(1.75) / (qf * p.q1.ln().powi(2)) * smooth_part_ratio(p.q, p.q1) * u_sum;
            ("st-comparison-general", first + second)
        }
    };
    let diffs: Vec<f64> = s
        .values
        .iter()
        .zip(&t)
        .map(|(x, y)| (x - y).abs())
        .collect();
    let (arg, &max_abs_diff) = diffs
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("nonempty group");
    Ok(StReport {
        a,
        s: s.values[i],
        t: t[i],
        abs_diff: diffs[i],
        max_abs_diff,
        argmax: g.unit(arg),
        report: SumReport::shape(lemma, max_abs_diff, shape),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_easy(q: u64, r: f64, q1: f64, z: f64) -> (UnitGroup, ParamSet) {
        let g = UnitGroup::new(q).unwrap();
        let mut p = ParamSet::new(q, 0.3, true)
            .unwrap()
            .with_q1(q1)
            .unwrap()
            .with_r(r);
        p.z = z;
        (g, p)
    }

    fn easy_cfg(d: [Sign; 3]) -> EasyConfig {
        EasyConfig {
            b2: None,
            b3: None,
            deltas: d,
            u_interval: None,
        }
    }

    #[test]
    fn empty_prime_set_gives_zero() {
        let (g, p) = toy_easy(35, 60.0, 20.0, 3.0);
        let h = MultiplicativeFunction::liouville();
        // every prime in (20/e, 20] has λ(p) = −1, so 𝒬⁺ is empty
        let mut inst = SInstance::easy(&h, &g, &p, &easy_cfg([Sign::Plus; 3]), None).unwrap();
        assert!(inst.terms[0].factors[3].items.is_empty());
        let s = s_direct(&g, &inst, DEFAULT_BUDGET).unwrap();
        assert!(s.values.iter().all(|&v| v == 0.0));
        inst.build_models(&g).unwrap();
        assert!(t_values(&g, &inst).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dual_route_easy_q35() {
        let (g, p) = toy_easy(35, 60.0, 20.0, 3.0);
        let h = MultiplicativeFunction::liouville();
        for d in [
            [Sign::Plus, Sign::Minus, Sign::Plus],
            [Sign::Minus, Sign::Minus, Sign::Minus],
        ] {
            let inst = SInstance::easy(&h, &g, &p, &easy_cfg(d), None).unwrap();
            let r = s_dual_route(&g, &inst, DEFAULT_BUDGET).unwrap();
            assert!(r.direct.iter().any(|&v| v > 0.0));
            assert!(r.max_relative < 1e-9, "{}", r.max_relative);
        }
    }

    #[test]
    fn t_with_constant_models_is_flat() {
        let (g, p) = toy_easy(35, 60.0, 20.0, 3.0);
        let h = MultiplicativeFunction::liouville();
        let mut inst = SInstance::easy(
            &h,
            &g,
            &p,
            &easy_cfg([Sign::Plus, Sign::Minus, Sign::Plus]),
            None,
        )
        .unwrap();
        let key = inst.terms[0].models[0];
        inst.models.insert(key, vec![1.0; g.phi as usize]);
        let t = t_values(&g, &inst).unwrap();
        let nq = inst.terms[0].factors[3].items.len() as f64;
        let nu = inst.terms[0].factors[4].items.len() as f64;
        let closed = nq * nu / (p.q1 * p.r * g.phi as f64);
        assert!(closed > 0.0 && t.iter().all(|&v| (v - closed).abs() < 1e-12 * closed));
    }

    #[test]
    fn loss_is_part_of_s_and_vanishes_when_forced() {
        let (g, p) = toy_easy(35, 60.0, 20.0, 3.0);
        let h = MultiplicativeFunction::liouville();
        let inst = SInstance::easy(
            &h,
            &g,
            &p,
            &easy_cfg([Sign::Plus, Sign::Minus, Sign::Plus]),
            None,
        )
        .unwrap();
        let s = s_direct(&g, &inst, DEFAULT_BUDGET).unwrap();
        let loss = s.loss.as_ref().unwrap();
        assert!(loss.iter().zip(&s.values).all(|(l, v)| *l <= *v + 1e-15));
        assert!(loss.iter().any(|&l| l > 0.0));
        // a single factor of pairwise coprime primes cannot produce squares
        let mut one = inst.clone();
        one.terms[0].factors = vec![Factor::indicator("Q", vec![11, 13, 17, 19])];
        let s1 = s_direct(&g, &one, DEFAULT_BUDGET).unwrap();
        assert!(s1.loss.unwrap().iter().all(|&l| l == 0.0));
        let rep = nonsquarefree_loss(&g, &inst, 1, DEFAULT_BUDGET).unwrap();
        assert!(rep.within_s);
    }

    // Oracle for the loss: brute-force product and trial factorization.
    #[test]
    fn loss_matches_factorization_oracle() {
        let (g, p) = toy_easy(35, 40.0, 20.0, 3.0);
        let h = MultiplicativeFunction::liouville();
        let inst = SInstance::easy(
            &h,
            &g,
            &p,
            &easy_cfg([Sign::Plus, Sign::Minus, Sign::Plus]),
            None,
        )
        .unwrap();
        let s = s_direct(&g, &inst, DEFAULT_BUDGET).unwrap();
        let fs = &inst.terms[0].factors;
        let mut loss = vec![0.0; g.phi as usize];
        for a in &fs[0].items {
            for b in &fs[1].items {
                for c in &fs[2].items {
                    for d in &fs[3].items {
                        for e in &fs[4].items {
                            let n = a.0 * b.0 * c.0 * d.0 * e.0;
                            if !is_squarefree(n) {
                                loss[g.index_of(n).unwrap()] +=
                                    a.1 * b.1 * c.1 / inst.terms[0].s_norm;
                            }
                        }
                    }
                }
            }
        }
        for (x, y) in loss.iter().zip(s.loss.as_ref().unwrap()) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300));
        }
    }

    #[test]
    fn budget_and_monte_carlo() {
        let (g, p) = toy_easy(35, 60.0, 20.0, 3.0);
        let h = MultiplicativeFunction::liouville();
        let inst = SInstance::easy(
            &h,
            &g,
            &p,
            &easy_cfg([Sign::Plus, Sign::Minus, Sign::Minus]),
            None,
        )
        .unwrap();
        assert!(matches!(
            s_direct(&g, &inst, 10),
            Err(crate::Error::Resource(_))
        ));
        let exact = s_direct(&g, &inst, DEFAULT_BUDGET).unwrap();
        let mc = s_evaluate(&g, &inst, 10, 200_000, 7).unwrap();
        assert!(matches!(mc.method, Method::MonteCarlo { .. }));
        let se = mc.stderr.as_ref().unwrap();
        for i in 0..exact.values.len() {
            assert!((mc.values[i] - exact.values[i]).abs() <= 6.0 * se[i] + 1e-15);
        }
        let again = s_monte_carlo(&g, &inst, 200_000, 7).unwrap();
        assert_eq!(again.values, mc.values);
    }

    fn toy_general(q: u64) -> (UnitGroup, ParamSet) {
        let g = UnitGroup::new(q).unwrap();
        let mut p = ParamSet::new(q, 0.3, false)
            .unwrap()
            .with_q1(20.0)
            .unwrap()
            .with_ladder(&[(20.0, 40.0)])
            .unwrap();
        p.k = 1;
        p.r = 60.0;
        p.u = 40.0;
        p.m = 65.0;
        p.z = 3.0;
        (g, p)
    }

    #[test]
    fn dual_route_general() {
        for q in [35, 101] {
            let (g, p) = toy_general(q);
            let h = MultiplicativeFunction::liouville();
            let cfg = GeneralConfig {
                b4: None,
                b5: None,
                b6: None,
                deltas: [
                    Sign::Plus,
                    Sign::Minus,
                    Sign::Plus,
                    Sign::Minus,
                    Sign::Plus,
                    Sign::Minus,
                ],
                ks: vec![[0, 0, 0], [1, -1, 1], [0, 1, 0]],
            };
            let inst = SInstance::general(&h, &g, &p, &cfg, None).unwrap();
            assert!(inst.terms.iter().all(|t| !t.factors[5].items.is_empty()));
            let r = s_dual_route(&g, &inst, DEFAULT_BUDGET).unwrap();
            assert!(r.direct.iter().any(|&v| v > 0.0));
            assert!(r.max_relative < 1e-9, "q={q}: {}", r.max_relative);
        }
    }

    #[test]
    fn general_rejects_k_outside_range() {
        let (g, mut p) = toy_general(35);
        p.k = 0;
        let cfg = GeneralConfig {
            b4: None,
            b5: None,
            b6: None,
            deltas: [Sign::Plus; 6],
            ks: vec![[1, 0, 0]],
        };
        let h = MultiplicativeFunction::liouville();
        assert!(SInstance::general(&h, &g, &p, &cfg, None).is_err());
        let empty = GeneralConfig { ks: vec![], ..cfg };
        let inst = SInstance::general(&h, &g, &p, &empty, None).unwrap();
        assert!(s_direct(&g, &inst, DEFAULT_BUDGET)
            .unwrap()
            .values
            .iter()
            .all(|&v| v == 0.0));
    }

    // k̄ = 0 with M ∈ [1, e) leaves m = 1 only, so the general count collapses to the easy one.
    #[test]
    fn general_reduces_to_easy() {
        let q = 101;
        let g = UnitGroup::new(q).unwrap();
        let h = MultiplicativeFunction::liouville();
        let mut gp = ParamSet::new(q, 0.3, false)
            .unwrap()
            .with_q1(20.0)
            .unwrap()
            .with_r(60.0);
        gp.u = 60.0;
        gp.m = 1.0;
        gp.z = 3.0;
        let mut ep = ParamSet::new(q, 0.3, true)
            .unwrap()
            .with_q1(20.0)
            .unwrap()
            .with_r(60.0);
        ep.z = 3.0;
        let d = [Sign::Minus, Sign::Plus, Sign::Minus];
        let gcfg = GeneralConfig {
            b4: None,
            b5: None,
            b6: None,
            deltas: [d[0], d[0], d[0], d[1], d[2], Sign::Plus],
            ks: vec![[0, 0, 0]],
        };
        let ecfg = EasyConfig {
            u_interval: Some(IntegerInterval::e_adic(60.0, 0)),
            ..easy_cfg(d)
        };
        let a = s_direct(
            &g,
            &SInstance::general(&h, &g, &gp, &gcfg, None).unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        let b = s_direct(
            &g,
            &SInstance::easy(&h, &g, &ep, &ecfg, None).unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-12 * y.abs().max(1e-300));
        }
    }

    #[test]
    fn st_compare_reports_finite_ratio() {
        let (g, p) = toy_easy(101, 60.0, 20.0, 3.0);
        let h = MultiplicativeFunction::liouville();
        let mut inst = SInstance::easy(
            &h,
            &g,
            &p,
            &easy_cfg([Sign::Plus, Sign::Plus, Sign::Minus]),
            None,
        )
        .unwrap();
        inst.build_models(&g).unwrap();
        let s = s_direct(&g, &inst, DEFAULT_BUDGET).unwrap();
        let rep = st_compare(&g, &inst, &s, 1).unwrap();
        assert!(rep.report.ratio.is_finite() && !rep.report.asserted);
        assert!(rep.max_abs_diff >= rep.abs_diff);
    }
}
