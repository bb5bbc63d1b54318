//! Product sets, stabilizers and convolution dichotomies in (Z/qZ)^×.

use serde::{Deserialize, Serialize};

use crate::error::{domain, precondition, Result};
use crate::group::{convolve_group, CosetSpec, UnitGroup};

/// A subset of the units, stored as a mask over unit indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UnitSet {
    mask: Vec<bool>,
}

impl UnitSet {
    pub fn empty(g: &UnitGroup) -> Self {
        UnitSet {
            mask: vec![false; g.units().len()],
        }
    }

    pub fn full(g: &UnitGroup) -> Self {
        UnitSet {
            mask: vec![true; g.units().len()],
        }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        UnitSet { mask }
    }

    pub fn from_residues(g: &UnitGroup, elems: &[u64]) -> Result<Self> {
        let mut s = Self::empty(g);
        for &a in elems {
            match g.index_of(a % g.q) {
                Some(i) => s.mask[i] = true,
                None => return domain(format!("{a} is not a unit mod {}", g.q)),
            }
        }
        Ok(s)
    }

    pub fn from_indices(g: &UnitGroup, idx: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(g);
        for i in idx {
            s.mask[i] = true;
        }
        s
    }

    pub fn from_coset(g: &UnitGroup, c: &CosetSpec) -> Self {
        UnitSet { mask: c.mask(g) }
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|&b| b)
    }

    pub fn contains_index(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn contains(&self, g: &UnitGroup, a: u64) -> bool {
        g.index_of(a % g.q).is_some_and(|i| self.mask[i])
    }

    pub fn insert(&mut self, i: usize) {
        self.mask[i] = true;
    }

    pub fn remove(&mut self, i: usize) {
        self.mask[i] = false;
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.mask
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
    }

    pub fn residues(&self, g: &UnitGroup) -> Vec<u64> {
        self.indices().map(|i| g.unit(i)).collect()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn is_subset(&self, other: &UnitSet) -> bool {
        self.mask.iter().zip(&other.mask).all(|(&a, &b)| !a || b)
    }

    pub fn intersection_len(&self, other: &UnitSet) -> usize {
        self.mask
            .iter()
            .zip(&other.mask)
            .filter(|(&a, &b)| a && b)
            .count()
    }

    /// x·S.
    pub fn translate(&self, g: &UnitGroup, x: usize) -> UnitSet {
        let mut out = UnitSet::empty(g);
        for i in self.indices() {
            out.mask[g.mul_index(x, i)] = true;
        }
        out
    }
}

/// A·B.
pub fn product_set(g: &UnitGroup, a: &UnitSet, b: &UnitSet) -> UnitSet {
    let mut out = UnitSet::empty(g);
    let bs: Vec<usize> = b.indices().collect();
    for i in a.indices() {
        for &j in &bs {
            out.mask[g.mul_index(i, j)] = true;
        }
    }
    out
}

/// {h : hS = S}; the empty set is stabilized by the whole group.
pub fn stabilizer(g: &UnitGroup, s: &UnitSet) -> UnitSet {
    if s.is_empty() {
        return UnitSet::full(g);
    }
    let members: Vec<usize> = s.indices().collect();
    let first = members[0];
    let mut out = UnitSet::empty(g);
    // h ∈ Stab(S) forces h·s₀ ∈ S, so h ranges over S·s₀^{-1}
    let inv = g.inverse_index(first);
    for &m in &members {
        let h = g.mul_index(m, inv);
        if members.iter().all(|&x| s.mask[g.mul_index(h, x)]) {
            out.mask[h] = true;
        }
    }
    out
}

pub fn is_subgroup(g: &UnitGroup, s: &UnitSet) -> bool {
    let one = g.index_of(1 % g.q).expect("1 is a unit");
    if !s.contains_index(one) {
        return false;
    }
    let m: Vec<usize> = s.indices().collect();
    m.iter().all(|&x| {
        s.contains_index(g.inverse_index(x))
            && m.iter().all(|&y| s.contains_index(g.mul_index(x, y)))
    })
}

/// (1_A ∗ 1_B)(c) for every unit index c.
pub fn convolution(g: &UnitGroup, a: &UnitSet, b: &UnitSet) -> Vec<i64> {
    let fa: Vec<i64> = a.mask.iter().map(|&x| x as i64).collect();
    let fb: Vec<i64> = b.mask.iter().map(|&x| x as i64).collect();
    convolve_group(g, &fa, &fb)
}

/// (1_{A1} ∗ 1_{A2} ∗ 1_{A3})(c) for every unit index c.
pub fn triple_convolution(g: &UnitGroup, a1: &UnitSet, a2: &UnitSet, a3: &UnitSet) -> Vec<i64> {
    let c12 = convolution(g, a1, a2);
    let f3: Vec<i64> = a3.mask.iter().map(|&x| x as i64).collect();
    convolve_group(g, &c12, &f3)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KneserReport {
    pub product: usize,
    pub a_h: usize,
    pub b_h: usize,
    pub h: usize,
    pub first: bool,
    pub second: bool,
}

impl KneserReport {
    pub fn holds(&self) -> bool {
        self.first && self.second
    }
}

/// |A·B| ≥ |A·H| + |B·H| − |H| ≥ |A| + |B| − |H| with H = Stab(A·B).
pub fn kneser_check(g: &UnitGroup, a: &UnitSet, b: &UnitSet) -> Result<KneserReport> {
    if a.is_empty() || b.is_empty() {
        return precondition("Kneser check needs nonempty sets");
    }
    let ab = product_set(g, a, b);
    let h = stabilizer(g, &ab);
    let ah = product_set(g, a, &h).len() as i64;
    let bh = product_set(g, b, &h).len() as i64;
    let (p, hl) = (ab.len() as i64, h.len() as i64);
    Ok(KneserReport {
        product: p as usize,
        a_h: ah as usize,
        b_h: bh as usize,
        h: hl as usize,
        first: p >= ah + bh - hl,
        second: ah + bh - hl >= a.len() as i64 + b.len() as i64 - hl,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionLowerReport {
    pub min_value: i64,
    pub bound: i64,
    pub holds: bool,
    /// Variant on a coset abH; `None` when no cosets were supplied.
    pub coset_min: Option<i64>,
    pub coset_bound: Option<i64>,
    pub coset_holds: Option<bool>,
}

/// Checks 1_A ∗ 1_B ≥ |A| + |B| − |G| everywhere, and ≥ |A| + |B| − |H| on abH when
/// A ⊆ aH and B ⊆ bH are given.
pub fn convolution_lower_check(
    g: &UnitGroup,
    a: &UnitSet,
    b: &UnitSet,
    cosets: Option<(&UnitSet, u64, u64)>,
) -> Result<ConvolutionLowerReport> {
    if a.is_empty() || b.is_empty() {
        return precondition("convolution bound needs nonempty sets");
    }
    let conv = convolution(g, a, b);
    let min_value = conv.iter().copied().min().unwrap_or(0);
    let bound = a.len() as i64 + b.len() as i64 - g.phi as i64;
    let mut report = ConvolutionLowerReport {
        min_value,
        bound,
        holds: min_value >= bound,
        coset_min: None,
        coset_bound: None,
        coset_holds: None,
    };
    if let Some((h, ra, rb)) = cosets {
        if !is_subgroup(g, h) {
            return precondition("supplied H is not a subgroup");
        }
        let (ia, ib) = match (g.index_of(ra % g.q), g.index_of(rb % g.q)) {
            (Some(x), Some(y)) => (x, y),
            _ => return domain("coset representatives must be units"),
        };
        if !a.is_subset(&h.translate(g, ia)) || !b.is_subset(&h.translate(g, ib)) {
            return precondition("A ⊄ aH or B ⊄ bH");
        }
        let target = h.translate(g, g.mul_index(ia, ib));
        let cmin = target.indices().map(|c| conv[c]).min().unwrap_or(0);
        let cb = a.len() as i64 + b.len() as i64 - h.len() as i64;
        report.coset_min = Some(cmin);
        report.coset_bound = Some(cb);
        report.coset_holds = Some(cmin >= cb);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    ExpandsEverywhere,
    CosetConcentrated,
    Both,
    Neither,
}

impl Branch {
    fn from_flags(a: bool, b: bool) -> Self {
        match (a, b) {
            (true, true) => Branch::Both,
            (true, false) => Branch::ExpandsEverywhere,
            (false, true) => Branch::CosetConcentrated,
            (false, false) => Branch::Neither,
        }
    }

    pub fn certified(self) -> bool {
        self != Branch::Neither
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopularA {
    pub count: usize,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopularB {
    pub a_trimmed: Vec<u64>,
    pub b_trimmed: Vec<u64>,
    pub removed: usize,
    pub min_on_product: i64,
    pub kneser: KneserReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopularOutcome {
    pub branch: Branch,
    pub a: PopularA,
    pub b: Option<PopularB>,
}

/// Decides which alternative of the popular-Kneser dichotomy holds for (A, B, t, u).
///
/// Branch (b) is searched by greedily removing the element with the most products
/// of low convolution, at most t − 1 times.
pub fn popular_kneser_classify(
    g: &UnitGroup,
    a: &UnitSet,
    b: &UnitSet,
    t: u64,
    u: u64,
) -> Result<PopularOutcome> {
    if !(t >= u && u >= 1) || (a.len() as u64) < t || (b.len() as u64) < t {
        return precondition(format!(
            "need t ≥ u ≥ 1 and |A|, |B| ≥ t (t = {t}, u = {u})"
        ));
    }
    let conv = convolution(g, a, b);
    let count = conv.iter().filter(|&&v| v >= u as i64).count();
    let bound =
        a.len() as f64 + b.len() as f64 - 2.0 * t as f64 - u as f64 * g.phi as f64 / t as f64;
    let pa = PopularA { count, bound };
    let a_ok = count as f64 >= bound;

    let t = t as i64;
    let mut a2 = a.clone();
    let mut b2 = b.clone();
    let mut removed = 0usize;
    let cert = loop {
        let bs: Vec<usize> = b2.indices().collect();
        let as_: Vec<usize> = a2.indices().collect();
        let mut bad_a = vec![0usize; conv.len()];
        let mut bad_b = vec![0usize; conv.len()];
        let mut any = false;
        for &i in &as_ {
            for &j in &bs {
                if conv[g.mul_index(i, j)] < t {
                    bad_a[i] += 1;
                    bad_b[j] += 1;
                    any = true;
                }
            }
        }
        if !any {
            break true;
        }
        if removed as i64 >= t - 1 {
            break false;
        }
        let (ia, &va) = bad_a
            .iter()
            .enumerate()
            .max_by_key(|&(i, v)| (*v, std::cmp::Reverse(i)))
            .unwrap();
        let (ib, &vb) = bad_b
            .iter()
            .enumerate()
            .max_by_key(|&(i, v)| (*v, std::cmp::Reverse(i)))
            .unwrap();
        if va >= vb {
            a2.remove(ia);
        } else {
            b2.remove(ib);
        }
        removed += 1;
        if a2.is_empty() || b2.is_empty() {
            break false;
        }
    };
    let pb = if cert && !a2.is_empty() && !b2.is_empty() {
        let prod = product_set(g, &a2, &b2);
        let min_on_product = prod.indices().map(|c| conv[c]).min().unwrap_or(i64::MAX);
        Some(PopularB {
            a_trimmed: a2.residues(g),
            b_trimmed: b2.residues(g),
            removed,
            min_on_product,
            kneser: kneser_check(g, &a2, &b2)?,
        })
    } else {
        None
    };
    Ok(PopularOutcome {
        branch: Branch::from_flags(a_ok, pb.is_some()),
        a: pa,
        b: pb,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureOutcome {
    pub branch: Branch,
    pub product: usize,
    pub product_bound: f64,
    pub stabilizer_index: u64,
    pub index_bound: f64,
}

/// Labels each unit index by the coset of the subgroup mask it lies in.
fn coset_labels(g: &UnitGroup, h: &[bool]) -> Vec<usize> {
    let n = h.len();
    let hs: Vec<usize> = (0..n).filter(|&i| h[i]).collect();
    let mut label = vec![usize::MAX; n];
    let mut next = 0;
    for i in 0..n {
        if label[i] == usize::MAX {
            for &x in &hs {
                label[g.mul_index(i, x)] = next;
            }
            next += 1;
        }
    }
    label
}

fn coset_proportion(labels: &[usize], s: &UnitSet) -> f64 {
    let total = labels.iter().max().map_or(0, |m| m + 1);
    let mut hit = vec![false; total];
    for i in s.indices() {
        hit[labels[i]] = true;
    }
    hit.iter().filter(|&&b| b).count() as f64 / total as f64
}

/// Either |A·B| ≥ βφ, or Stab(A·B) has index Y with 1 < Y < 1/(2α′ − β).
pub fn structure_classify(
    g: &UnitGroup,
    a: &UnitSet,
    b: &UnitSet,
    alpha: f64,
    alpha_p: f64,
    beta: f64,
) -> Result<StructureOutcome> {
    let in_unit = |x: f64| x > 0.0 && x <= 1.0;
    if !(in_unit(alpha)
        && in_unit(alpha_p)
        && in_unit(beta)
        && beta < 2.0 * alpha
        && alpha <= alpha_p)
    {
        return precondition(format!(
            "need β < 2α ≤ 2α′ in (0, 1], got α = {alpha}, α′ = {alpha_p}, β = {beta}"
        ));
    }
    let phi = g.phi as f64;
    if (a.len() as f64) < alpha * phi || (b.len() as f64) < alpha * phi {
        return precondition("|A| or |B| is below αφ(q)");
    }
    let index_cap = 1.0 / (2.0 * alpha - beta);
    for h0 in g.subgroups_of_index_below(index_cap) {
        let labels = coset_labels(g, &h0);
        if coset_proportion(&labels, a) < alpha_p || coset_proportion(&labels, b) < alpha_p {
            return precondition("A or B meets too few cosets of a small-index subgroup");
        }
    }
    let ab = product_set(g, a, b);
    let st = stabilizer(g, &ab);
    let y = g.phi / st.len() as u64;
    let gap = 2.0 * alpha_p - beta;
    let index_bound = if gap > 0.0 { 1.0 / gap } else { f64::INFINITY };
    let product_bound = beta * phi;
    let a_ok = ab.len() as f64 >= product_bound;
    let b_ok = y > 1 && (y as f64) < index_bound;
    Ok(StructureOutcome {
        branch: Branch::from_flags(a_ok, b_ok),
        product: ab.len(),
        product_bound,
        stabilizer_index: y,
        index_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleCertificate {
    /// Real character whose kernel is H.
    pub psi: Vec<u64>,
    pub reps: [u64; 3],
    pub overlaps: [usize; 3],
    pub overlap_bounds: [f64; 3],
    pub min_on_coset: i64,
    pub coset_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleOutcome {
    pub branch: Branch,
    pub min_value: i64,
    pub argmin: u64,
    pub expand_bound: f64,
    pub certificate: Option<TripleCertificate>,
}

/// Minimum of the triple convolution against ε²φ²/500, else an index-2 coset certificate.
pub fn triple_conv_classify(
    g: &UnitGroup,
    sets: [&UnitSet; 3],
    epsilon: f64,
) -> Result<TripleOutcome> {
    let phi = g.phi as f64;
    for (i, s) in sets.iter().enumerate() {
        if !(s.len() as f64 > (0.4 + epsilon) * phi) {
            return precondition(format!(
                "|A_{}| = {} is not above (2/5 + ε)φ(q)",
                i + 1,
                s.len()
            ));
        }
    }
    let conv = triple_convolution(g, sets[0], sets[1], sets[2]);
    let (arg, &min_value) = conv
        .iter()
        .enumerate()
        .min_by_key(|&(i, v)| (*v, i))
        .expect("group is nonempty");
    let expand_bound = epsilon * epsilon * phi * phi / 500.0;
    let a_ok = min_value as f64 >= expand_bound;
    let certificate = find_triple_certificate(g, sets, &conv, epsilon);
    Ok(TripleOutcome {
        branch: Branch::from_flags(a_ok, certificate.is_some()),
        min_value,
        argmin: g.unit(arg),
        expand_bound,
        certificate,
    })
}

fn find_triple_certificate(
    g: &UnitGroup,
    sets: [&UnitSet; 3],
    conv: &[i64],
    epsilon: f64,
) -> Option<TripleCertificate> {
    let phi = g.phi as f64;
    let coset_bound = phi * phi / 25.0;
    for h in g.index2_subgroups() {
        let reps = h.coset_reps(g);
        let cosets: Vec<UnitSet> = reps
            .iter()
            .map(|&r| UnitSet::from_coset(g, &h.with_rep(r)))
            .collect();
        // per set, the cosets meeting it well enough, with a member as representative
        let mut options: Vec<Vec<(u64, usize, usize)>> = Vec::new();
        for s in sets {
            let need = s.len() as f64 - epsilon * phi / 2.0;
            let opts: Vec<(u64, usize, usize)> = cosets
                .iter()
                .enumerate()
                .filter_map(|(k, c)| {
                    let ov = s.intersection_len(c);
                    let rep = s.indices().find(|&i| c.contains_index(i))?;
                    (ov as f64 >= need).then_some((g.unit(rep), ov, k))
                })
                .collect();
            options.push(opts);
        }
        for o1 in &options[0] {
            for o2 in &options[1] {
                for o3 in &options[2] {
                    let prod = g.mul(g.mul(o1.0, o2.0), o3.0);
                    let target = h.with_rep(prod);
                    let min_on_coset = (0..conv.len())
                        .filter(|&i| target.contains(g, g.unit(i)))
                        .map(|i| conv[i])
                        .min()
                        .unwrap_or(0);
                    if min_on_coset as f64 >= coset_bound {
                        let bound = |s: &UnitSet| s.len() as f64 - epsilon * phi / 2.0;
                        return Some(TripleCertificate {
                            psi: h.psi.dual.clone(),
                            reps: [o1.0, o2.0, o3.0],
                            overlaps: [o1.1, o2.1, o3.1],
                            overlap_bounds: [bound(sets[0]), bound(sets[1]), bound(sets[2])],
                            min_on_coset,
                            coset_bound,
                        });
                    }
                }
            }
        }
    }
    None
}

/// Recomputes a triple-convolution outcome from scratch and confirms its claims.
pub fn reverify_triple(
    g: &UnitGroup,
    sets: [&UnitSet; 3],
    epsilon: f64,
    out: &TripleOutcome,
) -> bool {
    let conv = triple_convolution(g, sets[0], sets[1], sets[2]);
    let phi = g.phi as f64;
    let a_claim = matches!(out.branch, Branch::ExpandsEverywhere | Branch::Both);
    if a_claim
        && conv
            .iter()
            .any(|&v| (v as f64) < epsilon * epsilon * phi * phi / 500.0)
    {
        return false;
    }
    if let Some(c) = &out.certificate {
        let Some(h) = g
            .index2_subgroups()
            .into_iter()
            .find(|h| h.psi.dual == c.psi)
        else {
            return false;
        };
        for (k, s) in sets.iter().enumerate() {
            if !s.contains(g, c.reps[k]) {
                return false;
            }
            let ov = s.intersection_len(&UnitSet::from_coset(g, &h.with_rep(c.reps[k])));
            if (ov as f64) < s.len() as f64 - epsilon * phi / 2.0 {
                return false;
            }
        }
        let target = h.with_rep(g.mul(g.mul(c.reps[0], c.reps[1]), c.reps[2]));
        if (0..conv.len())
            .any(|i| target.contains(g, g.unit(i)) && (conv[i] as f64) < phi * phi / 25.0)
        {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(g: &UnitGroup, xs: &[u64]) -> UnitSet {
        UnitSet::from_residues(g, xs).unwrap()
    }

    fn random_set(g: &UnitGroup, rng: &mut ChaCha8Rng, p: f64) -> UnitSet {
        UnitSet::from_mask((0..g.units().len()).map(|_| rng.random_bool(p)).collect())
    }

    #[test]
    fn stabilizer_examples() {
        let g = UnitGroup::new(5).unwrap();
        assert_eq!(stabilizer(&g, &set(&g, &[1, 2, 3])), set(&g, &[1]));
        assert_eq!(stabilizer(&g, &UnitSet::full(&g)), UnitSet::full(&g));
        assert_eq!(stabilizer(&g, &UnitSet::empty(&g)), UnitSet::full(&g));
        let g = UnitGroup::new(35).unwrap();
        for h in g.index2_subgroups() {
            for b in h.coset_reps(&g) {
                let c = UnitSet::from_coset(&g, &h.with_rep(b));
                assert_eq!(stabilizer(&g, &c), UnitSet::from_coset(&g, &h));
            }
        }
    }

    #[test]
    fn kneser_examples() {
        let g = UnitGroup::new(5).unwrap();
        let r = kneser_check(&g, &set(&g, &[1, 2]), &set(&g, &[1, 3])).unwrap();
        assert_eq!((r.product, r.a_h, r.b_h, r.h), (3, 2, 2, 1));
        assert!(r.holds());
        let r = kneser_check(&g, &set(&g, &[1]), &set(&g, &[1])).unwrap();
        assert_eq!(r.product, 1);
        assert!(kneser_check(&g, &UnitSet::empty(&g), &set(&g, &[1])).is_err());
    }

    #[test]
    fn convolution_lower_examples() {
        let g = UnitGroup::new(5).unwrap();
        let r =
            convolution_lower_check(&g, &set(&g, &[1, 2, 3]), &set(&g, &[2, 3, 4]), None).unwrap();
        assert!(r.min_value >= 2 && r.holds);
        let full = UnitSet::full(&g);
        assert!(convolution(&g, &full, &full).iter().all(|&v| v == 4));

        let g = UnitGroup::new(13).unwrap();
        let h = g.index2_subgroups().remove(0);
        let hs = UnitSet::from_coset(&g, &h);
        let reps = h.coset_reps(&g);
        let a = set(&g, &hs.residues(&g)[..4]);
        let bcos = UnitSet::from_coset(&g, &h.with_rep(reps[1]));
        let b = set(&g, &bcos.residues(&g)[..3]);
        let r = convolution_lower_check(&g, &a, &b, Some((&hs, 1, reps[1]))).unwrap();
        assert_eq!(r.coset_holds, Some(true));
        assert_eq!(r.coset_bound, Some(1));
        assert!(convolution_lower_check(&g, &b, &b, Some((&hs, 1, 1))).is_err());
    }

    #[test]
    fn triple_transform_route_matches_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for q in [15u64, 24, 35] {
            let g = UnitGroup::new(q).unwrap();
            let s: Vec<UnitSet> = (0..3).map(|_| random_set(&g, &mut rng, 0.6)).collect();
            let direct = triple_convolution(&g, &s[0], &s[1], &s[2]);
            let f = |u: &UnitSet| {
                u.mask()
                    .iter()
                    .map(|&b| Complex64::new(b as u8 as f64, 0.0))
                    .collect::<Vec<_>>()
            };
            let c12 = crate::group::convolve_via_transform(&g, &f(&s[0]), &f(&s[1])).unwrap();
            let c = crate::group::convolve_via_transform(&g, &c12, &f(&s[2])).unwrap();
            for (x, y) in direct.iter().zip(&c) {
                assert_eq!(*x, y.re.round() as i64);
                assert!((y.re - *x as f64).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn triple_examples() {
        let g = UnitGroup::new(101).unwrap();
        let full = UnitSet::full(&g);
        let r = triple_conv_classify(&g, [&full, &full, &full], 0.05).unwrap();
        assert_eq!(r.min_value, 100 * 100);
        assert!(matches!(r.branch, Branch::ExpandsEverywhere | Branch::Both));

        let h = g.index2_subgroups().remove(0);
        let hs = UnitSet::from_coset(&g, &h);
        let conv = triple_convolution(&g, &hs, &hs, &hs);
        for i in 0..100 {
            let expect = if hs.contains_index(i) { 2500 } else { 0 };
            assert_eq!(conv[i], expect);
        }
        // |H| = 50 > (2/5 + ε)·100 needs ε < 1/10
        let r = triple_conv_classify(&g, [&hs, &hs, &hs], 0.05).unwrap();
        assert_eq!(r.branch, Branch::CosetConcentrated);
        assert!(reverify_triple(&g, [&hs, &hs, &hs], 0.05, &r));
        assert!(triple_conv_classify(&g, [&hs, &hs, &hs], 0.2).is_err());
    }

    #[test]
    fn popular_examples() {
        let g = UnitGroup::new(35).unwrap();
        let full = UnitSet::full(&g);
        let r = popular_kneser_classify(&g, &full, &full, 1, 1).unwrap();
        assert_eq!(r.a.count, 24);
        assert!(r.branch.certified());

        let h = UnitSet::from_coset(&g, &g.index2_subgroups().remove(0));
        let r = popular_kneser_classify(&g, &h, &h, 6, 1).unwrap();
        let b = r.b.expect("H·H = H with convolution |H| on H");
        assert_eq!(b.removed, 0);
        assert_eq!(b.min_on_product, 12);
        assert!(popular_kneser_classify(&g, &h, &h, 1, 2).is_err());
    }

    #[test]
    fn structure_examples() {
        let g = UnitGroup::new(61).unwrap();
        let full = UnitSet::full(&g);
        let r = structure_classify(&g, &full, &full, 0.5, 0.5, 0.9).unwrap();
        assert!(matches!(r.branch, Branch::ExpandsEverywhere | Branch::Both));
        let h = UnitSet::from_coset(&g, &g.index2_subgroups().remove(0));
        let r = structure_classify(&g, &h, &h, 0.41, 0.5, 0.6).unwrap();
        assert_eq!(r.stabilizer_index, 2);
        assert_eq!(r.branch, Branch::CosetConcentrated);
    }

    #[test]
    fn random_popular_and_triple_certify() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = UnitGroup::new(35).unwrap();
        for _ in 0..200 {
            let (pa, pb) = (rng.random_range(0.3..0.9), rng.random_range(0.3..0.9));
            let a = random_set(&g, &mut rng, pa);
            let b = random_set(&g, &mut rng, pb);
            let m = a.len().min(b.len()) as u64;
            if m < 2 {
                continue;
            }
            let t = rng.random_range(1..=m);
            let u = rng.random_range(1..=t);
            let r = popular_kneser_classify(&g, &a, &b, t, u).unwrap();
            assert!(r.branch.certified(), "t={t} u={u} {r:?}");
        }
        let g = UnitGroup::new(101).unwrap();
        let hs = g.index2_subgroups();
        for _ in 0..100 {
            let h = &hs[0];
            let base = h.with_rep(h.coset_reps(&g)[rng.random_range(0..2)]);
            let sets: Vec<UnitSet> = (0..3)
                .map(|_| {
                    let mut s = UnitSet::from_coset(&g, &base);
                    for i in 0..100 {
                        if rng.random_bool(0.1) {
                            s.insert(i);
                        }
                    }
                    s
                })
                .collect();
            let r = triple_conv_classify(&g, [&sets[0], &sets[1], &sets[2]], 0.05).unwrap();
            assert!(r.branch.certified());
            assert!(reverify_triple(
                &g,
                [&sets[0], &sets[1], &sets[2]],
                0.05,
                &r
            ));
        }
    }
}
