use std::sync::Arc;

use linnik_core::arith::{factorize, IntegerInterval};
use linnik_core::charsums::{
    amplify_report, f_delta, halasz_montgomery_report, ladder_build, large_values_census,
    mvt_check, pv_burgess_check, pv_exhaustive, ramare_decompose, RamareConfig,
};
use linnik_core::densemodel::{build_dense_model, verify_model};
use linnik_core::group::{DirichletCharacter, UnitGroup};
use linnik_core::multfunc::{
    l_of_q, pretend_sum, pretentious_distance, MultiplicativeFunction, Sign,
};
use linnik_core::pipeline::{
    r_of_h_q_with, s_characters, s_direct, s_evaluate, s_monte_carlo, st_compare, theorem_audit,
    verify_witnesses, EasyConfig, GeneralConfig, ParamSet, SInstance,
};
use linnik_core::setcomb::{kneser_check, reverify_triple, triple_conv_classify, UnitSet};
use linnik_core::sieve::{
    build_beta_sieve, empirical_k, rough_count_in_coset, sandwich_check, sieve_accuracy,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cache::Cache;
use crate::config::SCHEMA;
use crate::{CharsumKind, Cli, CliError, Command, Density, Format, ParamArgs, SMethod, Variant};

type Out = Result<String, CliError>;

fn input<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Input(msg.into()))
}

/// The body's fields plus schema, lemma tag and the resolved parameters.
fn report(lemma: &str, params: Option<&ParamSet>, body: impl Serialize) -> Out {
    let v = serde_json::to_value(body).map_err(|e| CliError::Input(e.to_string()))?;
    let mut map = match v {
        Value::Object(m) => m,
        other => {
            let mut m = serde_json::Map::new();
            m.insert("result".into(), other);
            m
        }
    };
    map.insert("schema".into(), json!(SCHEMA));
    map.insert("lemma".into(), json!(lemma));
    map.insert(
        "params".into(),
        serde_json::to_value(params).unwrap_or(Value::Null),
    );
    let mut s =
        serde_json::to_string(&Value::Object(map)).map_err(|e| CliError::Input(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn default_params(q: u64) -> Option<ParamSet> {
    ParamSet::new(q, 0.1, true).ok()
}

fn parse_pairs(s: &str) -> Result<Vec<(f64, f64)>, CliError> {
    s.split(',')
        .map(|p| {
            let (a, b) = p
                .split_once(':')
                .ok_or_else(|| CliError::Input(format!("expected lo:hi, got {p:?}")))?;
            let lo = a
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("bad number {a:?}")))?;
            let hi = b
                .trim()
                .parse()
                .map_err(|_| CliError::Input(format!("bad number {b:?}")))?;
            Ok((lo, hi))
        })
        .collect()
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Input(format!("bad list entry {t:?}")))
        })
        .collect()
}

fn parse_sign(s: &str) -> Result<Sign, CliError> {
    match s {
        "+" | "plus" | "1" => Ok(Sign::Plus),
        "-" | "minus" | "-1" => Ok(Sign::Minus),
        _ => input(format!("sign must be + or -, got {s:?}")),
    }
}

fn parse_signs<const N: usize>(s: &str) -> Result<[Sign; N], CliError> {
    let v: Vec<Sign> = s
        .chars()
        .map(|c| parse_sign(&c.to_string()))
        .collect::<Result<_, _>>()?;
    v.try_into()
        .map_err(|_| CliError::Input(format!("expected {N} signs, got {s:?}")))
}

fn resolve_params(q: u64, a: &ParamArgs) -> Result<ParamSet, CliError> {
    let mut p = ParamSet::new(q, a.epsilon, !a.general)?;
    if let Some(q1) = a.q1 {
        p = p.with_q1(q1)?;
    }
    if let Some(l) = &a.ladder {
        p = p.with_ladder(&parse_pairs(l)?)?;
    }
    if let Some(r) = a.r {
        p = p.with_r(r);
    }
    if let Some(u) = a.u {
        p.u = u;
    }
    if let Some(m) = a.m {
        p.m = m;
    }
    if let Some(z) = a.z {
        p.z = z;
    }
    if let Some(k) = a.k {
        p.k = k;
    }
    if let Some(d) = a.delta {
        p.delta = d;
    }
    Ok(p)
}

fn real_character(g: &UnitGroup, spec: &str) -> Result<DirichletCharacter, CliError> {
    if spec == "principal" {
        return Ok(g.principal());
    }
    if let Some(d) = spec.strip_prefix("dual:") {
        let dual: Vec<u64> = parse_list(d)?;
        if dual.len() != g.rank() {
            return input(format!("dual vector needs {} entries", g.rank()));
        }
        let chi = g.character(g.character_index(&dual));
        if !chi.is_real() {
            return input(format!("{spec} is not a real character"));
        }
        return Ok(chi);
    }
    let k: usize = spec
        .parse()
        .map_err(|_| CliError::Input(format!("bad character spec {spec:?}")))?;
    let reals = g.real_characters();
    reals
        .get(k)
        .cloned()
        .ok_or_else(|| CliError::Input(format!("only {} real characters mod {}", reals.len(), g.q)))
}

fn function(
    spec: &str,
    q: Option<u64>,
    cache: &mut Cache,
) -> Result<MultiplicativeFunction, CliError> {
    match spec {
        "liouville" | "lambda" => Ok(MultiplicativeFunction::liouville()),
        "mobius" | "mu" => Ok(MultiplicativeFunction::mobius()),
        "one" => Ok(MultiplicativeFunction::one()),
        s => {
            let Some(k) = s.strip_prefix("chi:") else {
                return input(format!(
                    "unknown function {s:?}; use liouville, mobius, one or chi:<k>"
                ));
            };
            let Some(q) = q else {
                return input("chi:<k> needs --q");
            };
            let g = cache.group(q)?;
            let chi = real_character(&g, k)?;
            Ok(MultiplicativeFunction::from_real_character(g, chi)?)
        }
    }
}

fn coset(
    g: &UnitGroup,
    subgroup: Option<usize>,
    b: u64,
) -> Result<Option<linnik_core::group::CosetSpec>, CliError> {
    let Some(i) = subgroup else { return Ok(None) };
    let subs = g.index2_subgroups();
    let h = subs.get(i).ok_or_else(|| {
        CliError::Input(format!("only {} index-2 subgroups mod {}", subs.len(), g.q))
    })?;
    Ok(Some(h.with_rep(b % g.q)))
}

fn unit_set(g: &UnitGroup, s: &str) -> Result<UnitSet, CliError> {
    Ok(UnitSet::from_residues(g, &parse_list::<u64>(s)?)?)
}

pub fn dispatch(cli: &Cli, cache: &mut Cache) -> Out {
    let batch = matches!(cli.command, Command::Batch { .. });
    if cli.format == Some(Format::Csv) && !batch {
        return input("csv output is only available for batch");
    }
    let seed = cli.seed;
    match &cli.command {
        Command::Factor { n } => {
            let f = factorize(*n)?;
            report(
                "factorization",
                None,
                json!({"n": n, "factors": f.factors, "squarefree": f.is_squarefree()}),
            )
        }
        Command::Rfunc { h, q, cap } => {
            let hf = function(h, Some(*q), cache)?;
            let sieve = cache.sieve(*cap)?;
            let res = r_of_h_q_with(&hf, *q, *cap, &sieve)?;
            let verified = verify_witnesses(&hf, &res)?;
            let mut v = serde_json::to_value(&res).map_err(|e| CliError::Input(e.to_string()))?;
            v["verified"] = json!(verified);
            report("r-function", default_params(*q).as_ref(), v)
        }
        Command::Esets { h, q, x } => {
            let hf = function(h, Some(*q), cache)?;
            let sieve = cache.sieve(*x)?;
            let e = linnik_core::pipeline::e_sets_with(&hf, *q, *x, &sieve)?;
            report("sign-classes", default_params(*q).as_ref(), e)
        }
        Command::Pretend { h, q, cutoff, chi } => {
            let hf = function(h, Some(*q), cache)?;
            let g = cache.group(*q)?;
            let c = real_character(&g, chi)?;
            let sum = pretend_sum(&hf, &g, &c, *cutoff)?;
            let body = json!({"q": q, "h": hf.name, "chi": c.dual, "cutoff": cutoff, "sum": sum});
            report("pretend-sum", default_params(*q).as_ref(), body)
        }
        Command::Distance { f, g, x, r, q } => {
            let ff = function(f, *q, cache)?;
            let gf = function(g, *q, cache)?;
            let d = pretentious_distance(&ff, &gf, *x, *r);
            let body = json!({"f": ff.name, "g": gf.name, "x": x, "r": r, "distance": d.distance, "squared": d.squared});
            report(
                "pretentious-distance",
                q.and_then(default_params).as_ref(),
                body,
            )
        }
        Command::Lofq { q, cutoff } => {
            let rep = l_of_q(*q, cutoff.unwrap_or(*q))?;
            report("l-of-q", default_params(*q).as_ref(), rep)
        }
        Command::Sieve {
            z,
            level,
            kappa,
            check,
            density,
            big_k,
        } => {
            let (plus, minus) = build_beta_sieve(*z, *level, *kappa)?;
            let sandwich = sandwich_check(&plus, &minus, *check);
            let accuracy = match density {
                None => None,
                Some(d) => {
                    let g: fn(u64) -> f64 = match d {
                        Density::Zero => |_| 0.0,
                        Density::Inverse => |p| 1.0 / p as f64,
                        Density::InverseOff6 => |p| if 6 % p == 0 { 0.0 } else { 1.0 / p as f64 },
                    };
                    let k = big_k.unwrap_or_else(|| empirical_k(g, *kappa, 2000));
                    Some(sieve_accuracy(&plus, &minus, g, k)?)
                }
            };
            let body = json!({
                "z": z, "level": level, "kappa": kappa, "s": plus.s(), "beta": plus.beta(),
                "support_plus": plus.weights.len(), "support_minus": minus.weights.len(),
                "sandwich": sandwich, "accuracy": accuracy,
            });
            report("fundamental-lemma", None, body)
        }
        Command::Rough {
            q,
            rcap,
            z,
            epsilon,
            subgroup,
            b,
        } => {
            let g = cache.group(*q)?;
            let c = coset(&g, *subgroup, *b)?;
            let r = rough_count_in_coset(*rcap, &g, c.as_ref(), *z, *epsilon)?;
            report("rough-in-coset", default_params(*q).as_ref(), r)
        }
        Command::Densemodel {
            h,
            q,
            sign,
            interval_r,
            eta,
            dump,
            params,
        } => {
            let p = resolve_params(*q, params)?;
            let hf = function(h, Some(*q), cache)?;
            let g = cache.group(*q)?;
            let iv = IntegerInterval::e_adic(interval_r.unwrap_or(p.r), 0);
            let f = f_delta(&hf, *q, p.z, &iv, parse_sign(sign)?, None)?;
            let model = build_dense_model(&g, &f, p.delta, &hf.name)?;
            let rep = verify_model(&g, &model, &f, *eta)?;
            let mut body = json!({
                "interval": iv, "support": f.support.len(), "unit_count": f.unit_count,
                "spectrum": model.spectrum, "mean": model.mean(), "report": rep,
            });
            if *dump {
                body["model"] = serde_json::to_value(model.dump(&g)).unwrap_or(Value::Null);
            }
            report("dense-model", Some(&p), body)
        }
        Command::Kneser { q, a, b } => {
            let g = cache.group(*q)?;
            let (sa, sb) = (unit_set(&g, a)?, unit_set(&g, b)?);
            let r = kneser_check(&g, &sa, &sb)?;
            let mut v = serde_json::to_value(&r).map_err(|e| CliError::Input(e.to_string()))?;
            v["holds"] = json!(r.holds());
            report("kneser", default_params(*q).as_ref(), v)
        }
        Command::Triple {
            q,
            a,
            b,
            c,
            epsilon,
        } => {
            let g = cache.group(*q)?;
            let sets = [unit_set(&g, a)?, unit_set(&g, b)?, unit_set(&g, c)?];
            let refs = [&sets[0], &sets[1], &sets[2]];
            let out = triple_conv_classify(&g, refs, *epsilon)?;
            let verified = reverify_triple(&g, refs, *epsilon, &out);
            let mut v = serde_json::to_value(&out).map_err(|e| CliError::Input(e.to_string()))?;
            v["reverified"] = json!(verified);
            report("triple-convolution", default_params(*q).as_ref(), v)
        }
        Command::Charsum {
            kind,
            q,
            n,
            start,
            chi,
            epsilon,
            alpha,
            big_p,
            big_c,
            x,
            y1,
            y2,
        } => {
            let g = cache.group(*q)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n_max = n.unwrap_or(*q);
            let pick = |i: usize| -> Result<DirichletCharacter, CliError> {
                if i >= g.character_count() {
                    return input(format!("character index {i} out of range"));
                }
                Ok(g.character(i))
            };
            let (lemma, body) = match kind {
                CharsumKind::Mvt => {
                    let coeffs: Vec<(u64, Complex64)> = (1..=n_max)
                        .map(|k| {
                            (
                                k,
                                Complex64::new(
                                    rng.random_range(-1.0..1.0),
                                    rng.random_range(-1.0..1.0),
                                ),
                            )
                        })
                        .collect();
                    (
                        "mean-value",
                        serde_json::to_value(mvt_check(&g, &coeffs, n_max)?),
                    )
                }
                CharsumKind::Pv => match chi {
                    None => ("polya-vinogradov", serde_json::to_value(pv_exhaustive(&g)?)),
                    Some(i) => (
                        "polya-vinogradov",
                        serde_json::to_value(pv_burgess_check(&g, &pick(*i)?, *start, n_max)?),
                    ),
                },
                CharsumKind::Burgess => {
                    let c = pick(chi.unwrap_or(1))?;
                    (
                        "burgess",
                        serde_json::to_value(pv_burgess_check(&g, &c, *start, n_max)?),
                    )
                }
                CharsumKind::Halasz => {
                    let z = (*q as f64).powf(*epsilon);
                    let sieve = cache.sieve(n_max)?;
                    let mut coeffs = Vec::new();
                    for k in 1..=n_max {
                        if sieve.factorize(k)?.primes().all(|p| p as f64 >= z) {
                            coeffs.push((k, Complex64::new(rng.random_range(-1.0..1.0), 0.0)));
                        }
                    }
                    let chars: Vec<usize> = (0..g.character_count()).collect();
                    let r = halasz_montgomery_report(&g, &coeffs, &chars, n_max, *epsilon)?;
                    ("halasz-montgomery", serde_json::to_value(r))
                }
                CharsumKind::Largevalues => {
                    let r = large_values_census(
                        &g,
                        |_| Complex64::new(1.0, 0.0),
                        *big_p,
                        *alpha,
                        *big_c,
                    )?;
                    ("large-values", serde_json::to_value(r))
                }
                CharsumKind::Amplify => {
                    let one = |_: u64| Complex64::new(1.0, 0.0);
                    (
                        "amplification",
                        serde_json::to_value(amplify_report(&g, one, one, *x, *y1, *y2)?),
                    )
                }
            };
            report(
                lemma,
                default_params(*q).as_ref(),
                body.map_err(|e| CliError::Input(e.to_string()))?,
            )
        }
        Command::Ladder {
            q1,
            q,
            overrides,
            n,
        } => {
            let ov = overrides.as_deref().map(parse_pairs).transpose()?;
            let spec = ladder_build(*q1, *q, ov.as_deref())?;
            let member = n.map(|n| spec.in_s(n)).transpose()?;
            let params = default_params(*q).map(|mut p| {
                p.q1 = *q1;
                p.p1 = q1 / std::f64::consts::E;
                p.ladder = spec.clone();
                p
            });
            report(
                "ladder",
                params.as_ref(),
                json!({"ladder": spec, "n": n, "in_s": member}),
            )
        }
        Command::Ramare {
            h,
            q,
            big_m,
            v,
            j,
            sign,
            p1,
            subgroup,
            b,
            params,
        } => {
            let p = resolve_params(*q, params)?;
            let hf = function(h, Some(*q), cache)?;
            let g = cache.group(*q)?;
            let c = coset(&g, *subgroup, *b)?.unwrap_or_else(|| g.full_coset());
            let cfg = RamareConfig {
                h: &hf,
                coset: c,
                delta: parse_sign(sign)?,
                m: *big_m,
                v: *v,
                j: *j,
                ladder: &p.ladder,
                p1: *p1,
            };
            report("decomposition", Some(&p), ramare_decompose(&g, &cfg)?)
        }
        Command::Stcompare {
            h,
            q,
            variant,
            deltas,
            ks,
            method,
            samples,
            budget,
            a,
            params,
        } => {
            let mut pa = params.clone();
            pa.general = *variant == Variant::General;
            let p = resolve_params(*q, &pa)?;
            let hf = function(h, Some(*q), cache)?;
            let g = cache.group(*q)?;
            let mut inst = match variant {
                Variant::Easy => {
                    let d = parse_signs::<3>(deltas.as_deref().unwrap_or("+-+"))?;
                    let cfg = EasyConfig {
                        b2: None,
                        b3: None,
                        deltas: d,
                        u_interval: None,
                    };
                    SInstance::easy(&hf, &g, &p, &cfg, None)?
                }
                Variant::General => {
                    let d = parse_signs::<6>(deltas.as_deref().unwrap_or("+-+-+-"))?;
                    let kv = ks
                        .split(';')
                        .map(|t| {
                            let v: Vec<i64> = parse_list(t)?;
                            <[i64; 3]>::try_from(v).map_err(|_| {
                                CliError::Input(format!("k-vector {t:?} needs 3 entries"))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    let cfg = GeneralConfig {
                        b4: None,
                        b5: None,
                        b6: None,
                        deltas: d,
                        ks: kv,
                    };
                    SInstance::general(&hf, &g, &p, &cfg, None)?
                }
            };
            let s = match method {
                SMethod::Auto => s_evaluate(&g, &inst, *budget, *samples, seed)?,
                SMethod::Direct => s_direct(&g, &inst, *budget)?,
                SMethod::Characters => s_characters(&g, &inst)?,
                SMethod::MonteCarlo => s_monte_carlo(&g, &inst, *samples, seed)?,
            };
            inst.build_models(&g)?;
            let st = st_compare(&g, &inst, &s, a % q)?;
            let sizes: Vec<Vec<usize>> = inst
                .terms
                .iter()
                .map(|t| t.factors.iter().map(|f| f.items.len()).collect())
                .collect();
            let body = json!({"method": s.method, "visits": inst.visits(), "factor_sizes": sizes, "comparison": st});
            report(&st.report.lemma, Some(&p), body)
        }
        Command::Audit {
            h,
            q,
            big_c,
            cap,
            params,
        } => {
            let p = resolve_params(*q, params)?;
            let g: Arc<UnitGroup> = cache.group(*q)?;
            let hf = function(h, Some(*q), cache)?;
            let cap = cap.unwrap_or_else(|| q.saturating_pow(3));
            let sieve = cache.sieve(cap)?;
            report(
                "dichotomy-audit",
                Some(&p),
                theorem_audit(&hf, &g, p.q1, *big_c, cap, &sieve)?,
            )
        }
        Command::Batch { h, qmin, qmax, cap } => {
            if qmin > qmax || *qmin < 1 {
                return input("need 1 ≤ qmin ≤ qmax");
            }
            let sieve = cache.sieve(*cap)?;
            let mut rows = Vec::new();
            for q in *qmin..=*qmax {
                let hf = function(h, Some(q), cache)?;
                let res = r_of_h_q_with(&hf, q, *cap, &sieve)?;
                let verified = verify_witnesses(&hf, &res)?;
                rows.push(json!({"q": q, "R": res.r_value, "classes": res.witnesses.len(), "verified": verified}));
            }
            if cli.format == Some(Format::Json) {
                return report(
                    "r-function-table",
                    None,
                    json!({"h": h, "cap": cap, "rows": rows}),
                );
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["q", "R", "classes", "verified"])
                .map_err(|e| CliError::Input(e.to_string()))?;
            for r in &rows {
                let rv = r["R"].as_u64().map(|v| v.to_string()).unwrap_or_default();
                w.write_record([
                    r["q"].to_string(),
                    rv,
                    r["classes"].to_string(),
                    r["verified"].to_string(),
                ])
                .map_err(|e| CliError::Input(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Input(e.to_string()))
        }
    }
}
