//! The unit group Z_q^×, its Dirichlet characters, and Fourier analysis on it.
//!
//! Characters are dual exponent vectors against the CRT decomposition, with the
//! 2-part split as ⟨−1⟩ × ⟨5⟩. Values are exact rotations 2πk/m where m is the
//! exponent of the group. Fourier coefficients use the expectation normalization
//! Ê f(χ) = E_a f(a) conj χ(a); convolution is the plain counting sum.

use std::collections::{BTreeSet, HashSet};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, gcd, lcm, mul_mod, pow_mod};
use crate::error::{domain, Result};

pub const MAX_MODULUS: u64 = 10_000_000;
const MATERIALIZE_DLOG: u64 = 100_000;
const NO_INDEX: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicFactor {
    pub modulus: u64,
    pub generator: u64,
    pub order: u64,
}

#[derive(Debug, Clone)]
enum PartKind {
    /// odd p^e: one cyclic component
    Odd { table: Vec<u32> },
    /// 4: ⟨−1⟩
    Four,
    /// 2^e, e ≥ 3: ⟨−1⟩ × ⟨5⟩
    TwoBig { table5: Vec<u32> },
    /// 2: trivial
    Two,
}

#[derive(Debug, Clone)]
struct PrimePowerPart {
    pe: u64,
    kind: PartKind,
    offset: usize,
}

#[derive(Debug, Clone)]
pub struct UnitGroup {
    pub q: u64,
    pub phi: u64,
    pub components: Vec<CyclicFactor>,
    exponent: u64,
    parts: Vec<PrimePowerPart>,
    units: Vec<u64>,
    index: Vec<u32>,
    dlogs: Option<Vec<u32>>,
    roots: Vec<Complex64>,
}

fn primitive_root_prime(p: u64) -> u64 {
    if p == 2 {
        return 1;
    }
    let f = factorize(p - 1).expect("p - 1 >= 1");
    (2..p)
        .find(|&g| f.primes().all(|r| pow_mod(g, (p - 1) / r, p) != 1))
        .expect("primitive root exists")
}

impl UnitGroup {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return domain("modulus 0");
        }
        if q > MAX_MODULUS {
            return domain(format!("modulus {q} above enumeration bound {MAX_MODULUS}"));
        }
        let f = factorize(q)?;
        let mut components = Vec::new();
        let mut parts = Vec::new();
        for &(p, e) in &f.factors {
            let pe = p.pow(e);
            let offset = components.len();
            let kind = if p == 2 {
                match e {
                    1 => PartKind::Two,
                    2 => {
                        components.push(CyclicFactor {
                            modulus: 4,
                            generator: 3,
                            order: 2,
                        });
                        PartKind::Four
                    }
                    _ => {
                        let ord5 = pe / 4;
                        components.push(CyclicFactor {
                            modulus: pe,
                            generator: pe - 1,
                            order: 2,
                        });
                        components.push(CyclicFactor {
                            modulus: pe,
                            generator: 5,
                            order: ord5,
                        });
                        let mut table5 = vec![NO_INDEX; pe as usize];
                        let mut x = 1u64;
                        for k in 0..ord5 {
                            table5[x as usize] = k as u32;
                            x = x * 5 % pe;
                        }
                        PartKind::TwoBig { table5 }
                    }
                }
            } else {
                let mut g = primitive_root_prime(p);
                let order = pe / p * (p - 1);
                if e >= 2 && pow_mod(g, p - 1, p * p) == 1 {
                    g += p;
                }
                components.push(CyclicFactor {
                    modulus: pe,
                    generator: g,
                    order,
                });
                let mut table = vec![NO_INDEX; pe as usize];
                let mut x = 1u64;
                for k in 0..order {
                    table[x as usize] = k as u32;
                    x = mul_mod(x, g, pe);
                }
                PartKind::Odd { table }
            };
            parts.push(PrimePowerPart { pe, kind, offset });
        }
        let phi: u64 = components.iter().map(|c| c.order).product();
        let exponent = components.iter().fold(1u64, |acc, c| lcm(acc, c.order));
        let mut units = Vec::with_capacity(phi as usize);
        let mut index = vec![NO_INDEX; q as usize];
        for a in 0..q {
            if gcd(a, q) == 1 {
                index[a as usize] = units.len() as u32;
                units.push(a);
            }
        }
        if q == 1 {
            index[0] = 0;
            units = vec![0];
        }
        let roots = (0..exponent)
            .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / exponent as f64))
            .collect();
        let mut g = UnitGroup {
            q,
            phi,
            components,
            exponent,
            parts,
            units,
            index,
            dlogs: None,
            roots,
        };
        if q <= MATERIALIZE_DLOG {
            let r = g.rank();
            let mut d = vec![0u32; g.units.len() * r];
            let mut buf = vec![0u32; r];
            for (i, &a) in g.units.iter().enumerate() {
                g.dlog_into(a, &mut buf);
                d[i * r..(i + 1) * r].copy_from_slice(&buf);
            }
            g.dlogs = Some(d);
        }
        Ok(g)
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    /// Exponent of the group (lcm of component orders).
    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    pub fn units(&self) -> &[u64] {
        &self.units
    }

    #[inline]
    pub fn index_of(&self, n: u64) -> Option<usize> {
        let i = self.index[(n % self.q) as usize];
        (i != NO_INDEX).then_some(i as usize)
    }

    #[inline]
    pub fn is_unit(&self, n: u64) -> bool {
        self.index[(n % self.q) as usize] != NO_INDEX
    }

    #[inline]
    pub fn unit(&self, i: usize) -> u64 {
        self.units[i]
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.q)
    }

    #[inline]
    pub fn mul_index(&self, i: usize, j: usize) -> usize {
        self.index[mul_mod(self.units[i], self.units[j], self.q) as usize] as usize
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        let inv = crate::arith::inv_mod(self.units[i], self.q).expect("unit");
        self.index[inv as usize] as usize
    }

    /// exp(2πik/m) for the group exponent m.
    #[inline]
    pub fn root(&self, k: u64) -> Complex64 {
        self.roots[(k % self.exponent) as usize]
    }

    fn dlog_into(&self, a: u64, out: &mut [u32]) {
        for part in &self.parts {
            let x = a % part.pe;
            match &part.kind {
                PartKind::Two => {}
                PartKind::Four => out[part.offset] = u32::from(x % 4 == 3),
                PartKind::TwoBig { table5 } => {
                    let s = x % 4 == 3;
                    let y = if s { part.pe - x } else { x };
                    out[part.offset] = u32::from(s);
                    out[part.offset + 1] = table5[y as usize];
                }
                PartKind::Odd { table } => out[part.offset] = table[x as usize],
            }
        }
    }

    /// Exponent vector of a unit; `None` for non-units.
    pub fn dlog(&self, n: u64) -> Option<Vec<u32>> {
        let i = self.index_of(n)?;
        let r = self.rank();
        if let Some(d) = &self.dlogs {
            return Some(d[i * r..(i + 1) * r].to_vec());
        }
        let mut out = vec![0u32; r];
        self.dlog_into(n % self.q, &mut out);
        Some(out)
    }

    /// Unit with the given exponent vector.
    pub fn from_dlog(&self, v: &[u32]) -> u64 {
        if self.q == 1 {
            return 0;
        }
        let mut residues = Vec::with_capacity(self.parts.len());
        for part in &self.parts {
            let x = match &part.kind {
                PartKind::Two => 1,
                PartKind::Four => {
                    if v[part.offset] % 2 == 1 {
                        3
                    } else {
                        1
                    }
                }
                PartKind::TwoBig { .. } => {
                    let y = pow_mod(5, v[part.offset + 1] as u64, part.pe);
                    if v[part.offset] % 2 == 1 {
                        part.pe - y
                    } else {
                        y
                    }
                }
                PartKind::Odd { .. } => {
                    let c = &self.components[part.offset];
                    pow_mod(c.generator, v[part.offset] as u64, part.pe)
                }
            };
            residues.push((x, part.pe));
        }
        crt(&residues)
    }

    pub fn character_count(&self) -> usize {
        self.phi as usize
    }

    /// Character with the given mixed-radix index (index 0 is principal).
    pub fn character(&self, idx: usize) -> DirichletCharacter {
        let mut dual = Vec::with_capacity(self.rank());
        let mut rest = idx as u64;
        for c in &self.components {
            dual.push(rest % c.order);
            rest /= c.order;
        }
        DirichletCharacter::from_dual(self, dual)
    }

    pub fn character_index(&self, dual: &[u64]) -> usize {
        let mut idx = 0u64;
        for (c, &d) in self.components.iter().zip(dual).rev() {
            idx = idx * c.order + d % c.order;
        }
        idx as usize
    }

    pub fn characters(&self) -> Vec<DirichletCharacter> {
        (0..self.character_count())
            .map(|i| self.character(i))
            .collect()
    }

    pub fn principal(&self) -> DirichletCharacter {
        self.character(0)
    }

    pub fn real_characters(&self) -> Vec<DirichletCharacter> {
        let mut out = vec![Vec::<u64>::new()];
        for c in &self.components {
            let opts: Vec<u64> = if c.order % 2 == 0 {
                vec![0, c.order / 2]
            } else {
                vec![0]
            };
            out = out
                .into_iter()
                .flat_map(|v| {
                    opts.iter().map(move |&o| {
                        let mut w = v.clone();
                        w.push(o);
                        w
                    })
                })
                .collect();
        }
        let mut chars: Vec<DirichletCharacter> = out
            .into_iter()
            .map(|d| DirichletCharacter::from_dual(self, d))
            .collect();
        chars.sort_by_key(|c| self.character_index(&c.dual));
        chars
    }

    /// Kernels of the non-principal real characters.
    pub fn index2_subgroups(&self) -> Vec<CosetSpec> {
        self.real_characters()
            .into_iter()
            .filter(|c| !c.is_principal())
            .map(|psi| CosetSpec::new(self, psi, 1))
            .collect()
    }

    /// The whole group as a coset of itself.
    pub fn full_coset(&self) -> CosetSpec {
        CosetSpec::new(self, self.principal(), 1)
    }

    /// All subgroups of index strictly below `bound`, as membership masks.
    pub fn subgroups_of_index_below(&self, bound: f64) -> Vec<Vec<bool>> {
        // subgroups of G of index n are annihilators of dual subgroups of order n
        let n = self.character_count();
        let start: BTreeSet<usize> = [0usize].into_iter().collect();
        let mut seen: HashSet<BTreeSet<usize>> = HashSet::new();
        let mut frontier = vec![start.clone()];
        seen.insert(start);
        while let Some(s) = frontier.pop() {
            for c in 0..n {
                if s.contains(&c) {
                    continue;
                }
                let ext = self.dual_closure(&s, c);
                if (ext.len() as f64) < bound && seen.insert(ext.clone()) {
                    frontier.push(ext);
                }
            }
        }
        let mut out: Vec<Vec<bool>> = Vec::new();
        let mut sorted: Vec<BTreeSet<usize>> = seen.into_iter().collect();
        sorted.sort_by_key(|s| (s.len(), s.iter().copied().collect::<Vec<_>>()));
        for s in sorted {
            let chars: Vec<DirichletCharacter> = s.iter().map(|&i| self.character(i)).collect();
            let mask: Vec<bool> = self
                .units
                .iter()
                .map(|&a| chars.iter().all(|c| c.exponent_at(self, a) == Some(0)))
                .collect();
            out.push(mask);
        }
        out
    }

    fn dual_closure(&self, s: &BTreeSet<usize>, c: usize) -> BTreeSet<usize> {
        let mut out = s.clone();
        let cd = self.character(c).dual;
        let order = self.character(c).order;
        let mut power = vec![0u64; self.rank()];
        for _ in 1..order {
            for (i, comp) in self.components.iter().enumerate() {
                power[i] = (power[i] + cd[i]) % comp.order;
            }
            for &x in s {
                let xd = self.character(x).dual;
                let prod: Vec<u64> = xd
                    .iter()
                    .zip(&power)
                    .zip(&self.components)
                    .map(|((&a, &b), comp)| (a + b) % comp.order)
                    .collect();
                out.insert(self.character_index(&prod));
            }
        }
        out
    }

    /// Portable description of the character table: components plus all dual vectors.
    pub fn table_dump(&self) -> CharacterTableDump {
        CharacterTableDump {
            schema: TABLE_SCHEMA.to_string(),
            q: self.q,
            components: self.components.clone(),
            duals: self.characters().into_iter().map(|c| c.dual).collect(),
        }
    }
}

pub const TABLE_SCHEMA: &str = "linnik-lab/character-table/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterTableDump {
    pub schema: String,
    pub q: u64,
    pub components: Vec<CyclicFactor>,
    pub duals: Vec<Vec<u64>>,
}

impl CharacterTableDump {
    /// Checks the dump against a freshly built group.
    pub fn matches(&self, g: &UnitGroup) -> bool {
        self.schema == TABLE_SCHEMA
            && self.q == g.q
            && self.components == g.components
            && self.duals.len() == g.character_count()
            && self
                .duals
                .iter()
                .enumerate()
                .all(|(i, d)| d.len() == g.rank() && g.character_index(d) == i)
    }
}

fn crt(residues: &[(u64, u64)]) -> u64 {
    let mut x = 0u64;
    let mut m = 1u64;
    for &(r, pe) in residues {
        // x ≡ current mod m, find t with x + m t ≡ r mod pe
        let inv = crate::arith::inv_mod(m % pe, pe).expect("coprime");
        let diff = (r + pe - x % pe) % pe;
        let t = mul_mod(diff, inv, pe);
        x += m * t;
        m *= pe;
    }
    x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Angle {
    pub num: u64,
    pub den: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirichletCharacter {
    pub q: u64,
    pub dual: Vec<u64>,
    pub order: u64,
    weights: Vec<u64>,
    exponent: u64,
}

impl DirichletCharacter {
    pub fn from_dual(g: &UnitGroup, dual: Vec<u64>) -> Self {
        let m = g.exponent;
        let mut order = 1u64;
        let weights = dual
            .iter()
            .zip(&g.components)
            .map(|(&d, c)| {
                let d = d % c.order;
                order = lcm(order, c.order / gcd(d, c.order));
                d * (m / c.order) % m
            })
            .collect();
        DirichletCharacter {
            q: g.q,
            dual,
            order,
            weights,
            exponent: m,
        }
    }

    pub fn is_principal(&self) -> bool {
        self.order == 1
    }

    pub fn is_real(&self) -> bool {
        self.order <= 2
    }

    /// χ(n) = exp(2πi k/m); returns k, or `None` when gcd(n, q) > 1.
    pub fn exponent_at(&self, g: &UnitGroup, n: u64) -> Option<u64> {
        let i = g.index_of(n)?;
        Some(self.exponent_at_index(g, i))
    }

    #[inline]
    pub fn exponent_at_index(&self, g: &UnitGroup, i: usize) -> u64 {
        let r = g.rank();
        let m = self.exponent;
        if let Some(d) = &g.dlogs {
            let v = &d[i * r..(i + 1) * r];
            let mut k = 0u64;
            for (w, &e) in self.weights.iter().zip(v) {
                k += w * e as u64;
            }
            k % m
        } else {
            let mut buf = vec![0u32; r];
            g.dlog_into(g.units[i], &mut buf);
            self.weights
                .iter()
                .zip(&buf)
                .map(|(w, &e)| w * e as u64 % m)
                .sum::<u64>()
                % m
        }
    }

    /// Reduced angle fraction of χ(n).
    pub fn angle(&self, g: &UnitGroup, n: u64) -> Option<Angle> {
        let k = self.exponent_at(g, n)?;
        let d = gcd(k, self.exponent);
        Some(Angle {
            num: k / d,
            den: self.exponent / d,
        })
    }

    pub fn eval(&self, g: &UnitGroup, n: u64) -> Complex64 {
        match self.exponent_at(g, n) {
            Some(k) => g.root(k),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// Integer value of a real character: −1, 0 or 1.
    pub fn real_value(&self, g: &UnitGroup, n: u64) -> i32 {
        match self.exponent_at(g, n) {
            None => 0,
            Some(0) => 1,
            Some(_) => -1,
        }
    }

    /// Exponents at every unit, in unit-index order.
    pub fn exponents(&self, g: &UnitGroup) -> Vec<u64> {
        (0..g.units.len())
            .map(|i| self.exponent_at_index(g, i))
            .collect()
    }

    /// Complex values at every unit, in unit-index order.
    pub fn values(&self, g: &UnitGroup) -> Vec<Complex64> {
        (0..g.units.len())
            .map(|i| g.root(self.exponent_at_index(g, i)))
            .collect()
    }

    pub fn conj(&self, g: &UnitGroup) -> DirichletCharacter {
        let dual = self
            .dual
            .iter()
            .zip(&g.components)
            .map(|(&d, c)| (c.order - d % c.order) % c.order)
            .collect();
        DirichletCharacter::from_dual(g, dual)
    }
}

/// A coset bH of the kernel H of a real character ψ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CosetSpec {
    pub psi: DirichletCharacter,
    pub b: u64,
}

impl CosetSpec {
    pub fn new(g: &UnitGroup, psi: DirichletCharacter, b: u64) -> Self {
        debug_assert!(psi.is_real());
        let _ = g;
        CosetSpec { psi, b }
    }

    pub fn with_rep(&self, b: u64) -> Self {
        CosetSpec {
            psi: self.psi.clone(),
            b,
        }
    }

    pub fn index(&self) -> u64 {
        self.psi.order
    }

    pub fn contains(&self, g: &UnitGroup, a: u64) -> bool {
        match (self.psi.exponent_at(g, a), self.psi.exponent_at(g, self.b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    /// Members as a mask over unit indices.
    pub fn mask(&self, g: &UnitGroup) -> Vec<bool> {
        g.units.iter().map(|&a| self.contains(g, a)).collect()
    }

    pub fn members(&self, g: &UnitGroup) -> Vec<u64> {
        g.units
            .iter()
            .copied()
            .filter(|&a| self.contains(g, a))
            .collect()
    }

    /// Representatives of the cosets of H (one or two).
    pub fn coset_reps(&self, g: &UnitGroup) -> Vec<u64> {
        let mut reps = vec![1 % g.q.max(1)];
        if let Some(&a) = g
            .units
            .iter()
            .find(|&&a| self.psi.exponent_at(g, a) != Some(0))
        {
            reps.push(a);
        }
        reps
    }
}

/// Ê f(χ) = E_a f(a) conj χ(a), for all characters in index order.
pub fn fourier_forward(g: &UnitGroup, f: &[Complex64]) -> Result<Vec<Complex64>> {
    if f.len() != g.units.len() {
        return domain(format!(
            "function has {} values, group has {} units",
            f.len(),
            g.units.len()
        ));
    }
    let n = g.character_count();
    let inv = 1.0 / g.phi as f64;
    let m = g.exponent;
    Ok((0..n)
        .map(|c| {
            let chi = g.character(c);
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &v) in f.iter().enumerate() {
                let k = chi.exponent_at_index(g, i);
                acc += v * g.root((m - k) % m);
            }
            acc * inv
        })
        .collect())
}

/// f(a) = Σ_χ c(χ) χ(a).
pub fn fourier_inverse(g: &UnitGroup, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    if coeffs.len() != g.character_count() {
        return domain("coefficient vector length differs from number of characters");
    }
    let mut out = vec![Complex64::new(0.0, 0.0); g.units.len()];
    for (c, &w) in coeffs.iter().enumerate() {
        if w == Complex64::new(0.0, 0.0) {
            continue;
        }
        let chi = g.character(c);
        for (i, o) in out.iter_mut().enumerate() {
            *o += w * g.root(chi.exponent_at_index(g, i));
        }
    }
    Ok(out)
}

/// Function on units from (residue, value) pairs; non-units are rejected.
pub fn unit_function(g: &UnitGroup, pairs: &[(u64, Complex64)]) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); g.units.len()];
    for &(a, v) in pairs {
        match g.index_of(a) {
            Some(i) => out[i] += v,
            None => return domain(format!("{a} is not a unit mod {}", g.q)),
        }
    }
    Ok(out)
}

/// (f ∗ g)(a) = Σ_{xy=a} f(x) g(y), computed by the direct double loop.
pub fn convolve_group<T>(g: &UnitGroup, f: &[T], h: &[T]) -> Vec<T>
where
    T: Copy + Default + std::ops::Add<Output = T> + std::ops::Mul<Output = T> + PartialEq,
{
    let n = g.units.len();
    let zero = T::default();
    let mut out = vec![zero; n];
    for i in 0..n {
        if f[i] == zero {
            continue;
        }
        for j in 0..n {
            if h[j] == zero {
                continue;
            }
            let k = g.mul_index(i, j);
            out[k] = out[k] + f[i] * h[j];
        }
    }
    out
}

/// Same convolution through the transform: (f ∗ g)^ = φ · f̂ · ĝ.
pub fn convolve_via_transform(
    g: &UnitGroup,
    f: &[Complex64],
    h: &[Complex64],
) -> Result<Vec<Complex64>> {
    let ff = fourier_forward(g, f)?;
    let hh = fourier_forward(g, h)?;
    let phi = g.phi as f64;
    let prod: Vec<Complex64> = ff.iter().zip(&hh).map(|(a, b)| a * b * phi).collect();
    fourier_inverse(g, &prod)
}

/// Φ_m as an integer coefficient vector (constant term first).
pub fn cyclotomic_poly(m: u64) -> Vec<i64> {
    // x^m − 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in 1..m {
        if m.is_multiple_of(d) {
            num = poly_div_exact(&num, &cyclotomic_poly(d));
        }
    }
    num
}

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let nd = rem.len() - 1;
    let mut quo = vec![0i64; nd - dd + 1];
    for i in (0..=nd - dd).rev() {
        let c = rem[i + dd];
        quo[i] = c;
        for j in 0..=dd {
            rem[i + j] -= c * den[j];
        }
    }
    debug_assert!(rem.iter().all(|&x| x == 0));
    quo
}

/// Exact test that Σ_k counts[k] exp(2πik/m) = 0, by reduction modulo Φ_m.
pub fn root_sum_is_zero(counts: &[i64], m: u64) -> bool {
    let phi = cyclotomic_poly(m);
    let d = phi.len() - 1;
    let mut rem = counts.to_vec();
    for i in (d..rem.len()).rev() {
        let c = rem[i];
        if c != 0 {
            for j in 0..=d {
                rem[i - d + j] -= c * phi[j];
            }
        }
    }
    rem.iter().take(d).all(|&x| x == 0)
}

/// Exact value of E_a χ₁(a) conj χ₂(a): `Some(true)` for 1, `Some(false)` for 0,
/// `None` if neither (which orthogonality forbids).
pub fn orthogonality_exact(
    g: &UnitGroup,
    c1: &DirichletCharacter,
    c2: &DirichletCharacter,
) -> Option<bool> {
    let m = g.exponent;
    let mut counts = vec![0i64; m as usize];
    for i in 0..g.units.len() {
        let k = (c1.exponent_at_index(g, i) + m - c2.exponent_at_index(g, i)) % m;
        counts[k as usize] += 1;
    }
    if counts[0] == g.phi as i64 {
        Some(true)
    } else if root_sum_is_zero(&counts, m) {
        Some(false)
    } else {
        None
    }
}
