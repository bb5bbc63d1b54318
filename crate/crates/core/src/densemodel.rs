//! Dense models by spectral truncation and the level sets they induce.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::charsums::IntervalFunction;
use crate::error::{domain, Result};
use crate::group::{fourier_forward, fourier_inverse, CosetSpec, UnitGroup};

/// Slack for the properties that hold by construction.
pub const MODEL_TOL: f64 = 1e-12;

/// g(a) = Σ_{χ∈Λ} F(χ)χ(a) with Λ = {χ₀} ∪ {χ : |F(χ)| ≥ δ}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseModel {
    pub q: u64,
    pub delta: f64,
    pub source: String,
    /// Character indices of Λ, ascending; always starts with 0.
    pub spectrum: Vec<usize>,
    /// g at each unit, in unit-index order.
    pub values: Vec<f64>,
    pub f_hat: Vec<Complex64>,
    /// Transform of g recomputed from its values.
    pub g_hat: Vec<Complex64>,
}

impl DenseModel {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn value_at(&self, g: &UnitGroup, a: u64) -> Option<f64> {
        g.index_of(a % g.q).map(|i| self.values[i])
    }

    pub fn dump(&self, g: &UnitGroup) -> ModelDump {
        ModelDump {
            q: self.q,
            delta: self.delta,
            spectrum: self.spectrum.iter().map(|&c| g.character(c).dual).collect(),
            g: g.units()
                .iter()
                .zip(&self.values)
                .map(|(&a, &v)| (a, v))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDump {
    pub q: u64,
    pub delta: f64,
    pub spectrum: Vec<Vec<u64>>,
    pub g: Vec<(u64, f64)>,
}

/// Truncates the transform of f to its large part.
pub fn build_dense_model(
    g: &UnitGroup,
    f: &IntervalFunction,
    delta: f64,
    source: &str,
) -> Result<DenseModel> {
    if f.q != g.q {
        return domain(format!("function lives mod {}, group mod {}", f.q, g.q));
    }
    build_from_transform(g, f.hat(g), delta, source)
}

pub fn build_from_transform(
    g: &UnitGroup,
    f_hat: Vec<Complex64>,
    delta: f64,
    source: &str,
) -> Result<DenseModel> {
    if !(delta > 0.0) {
        return domain(format!("δ = {delta} must be positive"));
    }
    if f_hat.len() != g.character_count() {
        return domain("transform length does not match the character group");
    }
    let spectrum: Vec<usize> = (0..f_hat.len())
        .filter(|&c| c == 0 || f_hat[c].norm() >= delta)
        .collect();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); f_hat.len()];
    for &c in &spectrum {
        coeffs[c] = f_hat[c];
    }
    let values: Vec<f64> = fourier_inverse(g, &coeffs)?.iter().map(|z| z.re).collect();
    let g_hat = fourier_forward(
        g,
        &values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect::<Vec<_>>(),
    )?;
    Ok(DenseModel {
        q: g.q,
        delta,
        source: source.into(),
        spectrum,
        values,
        f_hat,
        g_hat,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosetSlack {
    pub psi: Vec<u64>,
    pub b: u64,
    pub f_mass: f64,
    pub g_mass: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorantReport {
    pub dominates: bool,
    pub mean: f64,
    pub mean_ok: bool,
    pub max_nonprincipal: f64,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub count: usize,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub g_min: f64,
    pub g_max: f64,
    pub range_bound: f64,
    /// Reported only: truncation does not force 0 ≤ g ≤ 1 + η.
    pub range_ok: bool,
    pub transfer_error: f64,
    pub transfer_ok: bool,
    pub domination_ok: bool,
    pub mean_error: f64,
    pub mean_ok: bool,
    pub cosets: Vec<CosetSlack>,
    pub max_coset_slack: f64,
    /// Agreement with F on Λ and vanishing off Λ.
    pub spectrum_error: f64,
}

impl ModelReport {
    /// The properties guaranteed by the construction.
    pub fn asserted_ok(&self) -> bool {
        self.transfer_ok && self.domination_ok && self.mean_ok && self.spectrum_error <= MODEL_TOL
    }
}

/// Checks range, spectrum transfer, domination, mean and coset mass of the model against f.
pub fn verify_model(
    g: &UnitGroup,
    model: &DenseModel,
    f: &IntervalFunction,
    eta: f64,
) -> Result<ModelReport> {
    if f.q != g.q || model.q != g.q {
        return domain("model, function and group moduli differ");
    }
    let fh = f.hat(g);
    let gh = &model.g_hat;
    let delta = model.delta;
    let mut transfer_error = 0.0f64;
    let mut domination_ok = true;
    let mut spectrum_error = 0.0f64;
    for c in 0..fh.len() {
        let d = (fh[c] - gh[c]).norm();
        transfer_error = transfer_error.max(d);
        let a = fh[c].norm();
        if gh[c].norm() > a + MODEL_TOL || d > a + MODEL_TOL {
            domination_ok = false;
        }
        let expect = if model.spectrum.binary_search(&c).is_ok() {
            fh[c]
        } else {
            Complex64::new(0.0, 0.0)
        };
        spectrum_error = spectrum_error.max((gh[c] - expect).norm());
    }
    let f_mean = fh[0].re;
    let mean_error = (model.mean() - f_mean).abs();
    let g_min = model.values.iter().copied().fold(f64::INFINITY, f64::min);
    let g_max = model
        .values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let range_bound = 1.0 + eta;

    let mut cosets = Vec::new();
    for h in g.index2_subgroups() {
        for b in h.coset_reps(g) {
            cosets.push(coset_slack(g, model, f, &h.with_rep(b)));
        }
    }
    let max_coset_slack = cosets.iter().map(|c| c.slack).fold(0.0, f64::max);
    Ok(ModelReport {
        g_min,
        g_max,
        range_bound,
        range_ok: g_min >= 0.0 && g_max <= range_bound,
        transfer_error,
        transfer_ok: transfer_error <= delta + MODEL_TOL,
        domination_ok,
        mean_error,
        mean_ok: mean_error <= MODEL_TOL,
        cosets,
        max_coset_slack,
        spectrum_error,
    })
}

/// |E_n f 1_{bH} − E_a g 1_{bH}|.
pub fn coset_slack(
    g: &UnitGroup,
    model: &DenseModel,
    f: &IntervalFunction,
    coset: &CosetSpec,
) -> CosetSlack {
    let f_mass = f
        .support
        .iter()
        .filter(|&&(n, _)| coset.contains(g, n % g.q))
        .map(|(_, v)| v)
        .sum::<f64>()
        / f.unit_count as f64;
    let mask = coset.mask(g);
    let g_mass = model
        .values
        .iter()
        .zip(&mask)
        .filter(|(_, &m)| m)
        .map(|(v, _)| v)
        .sum::<f64>()
        / model.values.len() as f64;
    CosetSlack {
        psi: coset.psi.dual.clone(),
        b: coset.b,
        f_mass,
        g_mass,
        slack: (f_mass - g_mass).abs(),
    }
}

/// Majorant hypothesis: f ≤ ν, |E ν − 1| ≤ η and the largest non-principal |E ν conj χ| against q^{−ε}.
pub fn majorant_report(
    g: &UnitGroup,
    f: &IntervalFunction,
    nu: impl Fn(u64) -> f64,
    eta: f64,
    epsilon: f64,
) -> Result<MajorantReport> {
    let mut items = Vec::new();
    let mut dominates = true;
    for n in f.interval.iter().filter(|&n| g.is_unit(n % g.q)) {
        let v = nu(n);
        if f.value(n) > v + MODEL_TOL {
            dominates = false;
        }
        items.push((n, Complex64::new(v, 0.0)));
    }
    let nu_fn = IntervalFunction {
        q: g.q,
        interval: f.interval,
        normalizer: 1.0,
        support: items.iter().map(|&(n, v)| (n, v.re)).collect(),
        unit_count: f.unit_count,
        rough_count: f.rough_count,
    };
    let hat = nu_fn.hat(g);
    let mean = hat[0].re;
    let max_nonprincipal = hat.iter().skip(1).map(|z| z.norm()).fold(0.0, f64::max);
    Ok(MajorantReport {
        dominates,
        mean,
        mean_ok: (mean - 1.0).abs() <= eta,
        max_nonprincipal,
        target: (g.q as f64).powf(-epsilon),
    })
}

/// Large-spectrum count: |{χ : |F(χ)| ≥ δ}| against C δ^{−r}.
pub fn census_report(f_hat: &[Complex64], delta: f64, c: f64, r: f64) -> CensusReport {
    let count = f_hat.iter().filter(|z| z.norm() >= delta).count();
    let bound = c * delta.powf(-r);
    CensusReport {
        count,
        bound,
        holds: count as f64 <= bound,
    }
}

/// A^Δ = {a : g^Δ(a) ≥ ε²}, with the |g^Δ(a)| ≥ ε² variant alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedLevelSets {
    pub epsilon: f64,
    pub plus: Vec<u64>,
    pub minus: Vec<u64>,
    pub abs_plus: Vec<u64>,
    pub abs_minus: Vec<u64>,
}

pub fn level_sets(
    g: &UnitGroup,
    plus: &DenseModel,
    minus: &DenseModel,
    epsilon: f64,
) -> Result<SignedLevelSets> {
    if plus.q != g.q || minus.q != g.q || plus.delta != minus.delta {
        return domain("both models must be built mod q with the same δ");
    }
    let t = epsilon * epsilon;
    let pick = |m: &DenseModel, abs: bool| -> Vec<u64> {
        g.units()
            .iter()
            .zip(&m.values)
            .filter(|(_, &v)| if abs { v.abs() >= t } else { v >= t })
            .map(|(&a, _)| a)
            .collect()
    };
    Ok(SignedLevelSets {
        epsilon,
        plus: pick(plus, false),
        minus: pick(minus, false),
        abs_plus: pick(plus, true),
        abs_minus: pick(minus, true),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosetCoverage {
    pub psi: Vec<u64>,
    pub b: u64,
    pub sign: crate::multfunc::Sign,
    pub size: usize,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct APropReport {
    pub total: usize,
    pub total_bound: f64,
    pub total_holds: bool,
    pub cosets: Vec<CosetCoverage>,
}

/// Measures |A⁺| + |A⁻| ≥ (1 − ε)φ and the coset lower bounds for every H of index ≤ 2.
pub fn aprop_check(
    g: &UnitGroup,
    sets: &SignedLevelSets,
    f_plus: &IntervalFunction,
    f_minus: &IntervalFunction,
) -> Result<APropReport> {
    use crate::multfunc::Sign;
    let eps = sets.epsilon;
    let phi = g.phi as f64;
    let total = sets.plus.len() + sets.minus.len();
    let total_bound = (1.0 - eps) * phi;
    let rough = f_plus.rough_count.max(1) as f64;
    let mut subgroups = vec![g.full_coset()];
    subgroups.extend(g.index2_subgroups());
    let mut cosets = Vec::new();
    for h in subgroups {
        for b in h.coset_reps(g) {
            let c = h.with_rep(b);
            for (sign, set, f) in [
                (Sign::Plus, &sets.plus, f_plus),
                (Sign::Minus, &sets.minus, f_minus),
            ] {
                let hits = f
                    .support
                    .iter()
                    .filter(|&&(n, _)| c.contains(g, n % g.q))
                    .count() as f64;
                let size = set.iter().filter(|&&a| c.contains(g, a)).count();
                let bound = (hits / rough - eps) * phi;
                cosets.push(CosetCoverage {
                    psi: c.psi.dual.clone(),
                    b,
                    sign,
                    size,
                    bound,
                    holds: size as f64 >= bound,
                });
            }
        }
    }
    Ok(APropReport {
        total,
        total_bound,
        total_holds: total as f64 >= total_bound,
        cosets,
    })
}
