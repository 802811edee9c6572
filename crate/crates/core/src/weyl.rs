//! Generalized Weyl algebras in normal order.
//!
//! A [`WeylSignature`] has `k` pairs `(z_α, w_α)` with central commutators
//! `[z_α, w_α] = κ_α`; distinct pairs commute. Elements are stored in normal
//! order, every `z` to the left of every `w`, using `w z = z w − κ`.
//!
//! The quantum signature uses `κ = iħ`, which is what the Dirac condition
//! forces under the classical convention `{q, p} = −1`. The differential
//! signature `(u, d)` with `κ = [u, d] = −1` models multiplication by `q`
//! and `d/dq`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lie::StructureConstants;
use crate::linalg::{self, Rref, SparseVec};
use crate::par::Exec;
use crate::phasepoly::ClassicalPoly;
use crate::scalar::{rat, write_term, GaussianRational, HbarFraction, HbarScalar, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylSignature {
    names: Vec<(String, String)>,
    kappa: Vec<HbarScalar>,
}

impl WeylSignature {
    pub fn new(names: Vec<(String, String)>, kappa: Vec<HbarScalar>) -> Result<Arc<Self>> {
        if names.len() != kappa.len() {
            return Err(Error::Precondition("one commutation constant per pair".into()));
        }
        Ok(Arc::new(Self { names, kappa }))
    }

    /// `k` pairs `z1..zk`, `w1..wk` with `[z_α, w_α] = iħ`.
    pub fn quantum(k: usize) -> Arc<Self> {
        Self::quantum_with_kappa(vec![HbarScalar::i_hbar(); k])
    }

    pub fn quantum_with_kappa(kappa: Vec<HbarScalar>) -> Arc<Self> {
        let names = (1..=kappa.len()).map(|a| (format!("z{a}"), format!("w{a}"))).collect();
        Arc::new(Self { names, kappa })
    }

    /// One pair `(u, d)` with `[u, d] = −1`.
    pub fn differential() -> Arc<Self> {
        Arc::new(Self { names: vec![("u".into(), "d".into())], kappa: vec![HbarScalar::from_int(-1)] })
    }

    pub fn pairs(&self) -> usize {
        self.kappa.len()
    }

    pub fn kappa(&self) -> &[HbarScalar] {
        &self.kappa
    }

    pub fn names(&self) -> &[(String, String)] {
        &self.names
    }

    pub fn generators(&self) -> Vec<Generator> {
        let mut out: Vec<Generator> = (0..self.pairs()).map(|pair| Generator { pair, kind: GenKind::Z }).collect();
        out.extend((0..self.pairs()).map(|pair| Generator { pair, kind: GenKind::W }));
        out
    }

    pub fn generator_named(&self, name: &str) -> Option<Generator> {
        self.names.iter().enumerate().find_map(|(pair, (z, w))| {
            if z == name {
                Some(Generator { pair, kind: GenKind::Z })
            } else if w == name {
                Some(Generator { pair, kind: GenKind::W })
            } else {
                None
            }
        })
    }

    pub fn generator_name(&self, g: Generator) -> &str {
        match g.kind {
            GenKind::Z => &self.names[g.pair].0,
            GenKind::W => &self.names[g.pair].1,
        }
    }
}

fn same_sig(a: &Arc<WeylSignature>, b: &Arc<WeylSignature>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GenKind {
    /// First member of a pair, written left in normal order.
    Z,
    /// Second member of a pair.
    W,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator {
    pub pair: usize,
    pub kind: GenKind,
}

/// Normal-ordered exponents `(a_1..a_k | b_1..b_k)` stored flat.
pub type WeylExponents = Vec<u32>;

#[derive(Clone, Debug)]
pub struct WeylElement {
    sig: Arc<WeylSignature>,
    terms: BTreeMap<WeylExponents, HbarScalar>,
}

impl PartialEq for WeylElement {
    fn eq(&self, o: &Self) -> bool {
        same_sig(&self.sig, &o.sig) && self.terms == o.terms
    }
}

impl Eq for WeylElement {}

fn add_to(terms: &mut BTreeMap<WeylExponents, HbarScalar>, e: WeylExponents, c: HbarScalar) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&e) {
        Some(x) => {
            let s = &*x + &c;
            if s.is_zero() {
                terms.remove(&e);
            } else {
                *x = s;
            }
        }
        None => {
            terms.insert(e, c);
        }
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// `j! C(b, j) C(c, j) = b! c! / ((b−j)! (c−j)! j!)`.
fn reorder_weight(b: u32, c: u32, j: u32) -> Rational {
    let num = factorial(b) * factorial(c);
    let den = factorial(b - j) * factorial(c - j) * factorial(j);
    BigRational::new(num, den)
}

impl WeylElement {
    pub fn zero(sig: &Arc<WeylSignature>) -> Self {
        Self { sig: sig.clone(), terms: BTreeMap::new() }
    }

    pub fn scalar(sig: &Arc<WeylSignature>, c: HbarScalar) -> Self {
        let mut terms = BTreeMap::new();
        add_to(&mut terms, vec![0; 2 * sig.pairs()], c);
        Self { sig: sig.clone(), terms }
    }

    pub fn identity(sig: &Arc<WeylSignature>) -> Self {
        Self::scalar(sig, HbarScalar::one())
    }

    pub fn generator(sig: &Arc<WeylSignature>, g: Generator) -> Self {
        let k = sig.pairs();
        let mut e = vec![0; 2 * k];
        match g.kind {
            GenKind::Z => e[g.pair] = 1,
            GenKind::W => e[k + g.pair] = 1,
        }
        Self::monomial(sig, e, HbarScalar::one())
    }

    pub fn z(sig: &Arc<WeylSignature>, pair: usize) -> Self {
        Self::generator(sig, Generator { pair, kind: GenKind::Z })
    }

    pub fn w(sig: &Arc<WeylSignature>, pair: usize) -> Self {
        Self::generator(sig, Generator { pair, kind: GenKind::W })
    }

    /// `c · z^a w^b` for flat normal-ordered exponents.
    pub fn monomial(sig: &Arc<WeylSignature>, e: WeylExponents, c: HbarScalar) -> Self {
        assert_eq!(e.len(), 2 * sig.pairs());
        let mut terms = BTreeMap::new();
        add_to(&mut terms, e, c);
        Self { sig: sig.clone(), terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (WeylExponents, HbarScalar)>>(sig: &Arc<WeylSignature>, it: I) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in it {
            assert_eq!(e.len(), 2 * sig.pairs());
            add_to(&mut terms, e, c);
        }
        Self { sig: sig.clone(), terms }
    }

    pub fn signature(&self) -> &Arc<WeylSignature> {
        &self.sig
    }

    pub fn terms(&self) -> &BTreeMap<WeylExponents, HbarScalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The coefficient of the identity when the element is a scalar.
    pub fn as_scalar(&self) -> Option<HbarScalar> {
        match self.terms.len() {
            0 => Some(HbarScalar::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn scale(&self, c: &HbarScalar) -> Self {
        if c.is_zero() {
            return Self::zero(&self.sig);
        }
        let terms = self.terms.iter().map(|(e, x)| (e.clone(), x * c)).filter(|(_, x)| !x.is_zero()).collect();
        Self { sig: self.sig.clone(), terms }
    }

    /// Exact division of every coefficient by ħ.
    pub fn div_hbar(&self) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let q = c.div_hbar().ok_or_else(|| Error::HbarRemainder(self.to_string()))?;
            terms.insert(e.clone(), q);
        }
        Ok(Self { sig: self.sig.clone(), terms })
    }

    /// `(i/ħ) · self`.
    pub fn i_over_hbar(&self) -> Result<Self> {
        Ok(self.div_hbar()?.scale(&HbarScalar::i()))
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(&self.sig);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Normal-ordered product of two normal-ordered monomials.
    fn monomial_product(&self, x: &[u32], y: &[u32], out: &mut BTreeMap<WeylExponents, HbarScalar>, coef: &HbarScalar) {
        let k = self.sig.pairs();
        // per pair: the w-power of x meets the z-power of y
        let mut options: Vec<Vec<(u32, HbarScalar)>> = Vec::with_capacity(k);
        for a in 0..k {
            let b = x[k + a];
            let c = y[a];
            let neg_kappa = -&self.sig.kappa[a];
            let opts = (0..=b.min(c))
                .map(|j| {
                    let w = HbarScalar::from_rational(reorder_weight(b, c, j));
                    (j, &w * &neg_kappa.pow(j))
                })
                .filter(|(_, c)| !c.is_zero())
                .collect();
            options.push(opts);
        }
        let mut stack: Vec<(usize, Vec<u32>, HbarScalar)> = vec![(0, Vec::with_capacity(k), coef.clone())];
        while let Some((a, js, c)) = stack.pop() {
            if a == k {
                let mut e = vec![0; 2 * k];
                for p in 0..k {
                    e[p] = x[p] + y[p] - js[p];
                    e[k + p] = x[k + p] + y[k + p] - js[p];
                }
                add_to(out, e, c);
                continue;
            }
            for (j, w) in &options[a] {
                let mut js2 = js.clone();
                js2.push(*j);
                stack.push((a + 1, js2, &c * w));
            }
        }
    }

    pub(crate) fn monomial_string(sig: &WeylSignature, e: &[u32]) -> String {
        let k = sig.pairs();
        let mut parts = Vec::new();
        let mut push = |name: &str, x: u32| match x {
            0 => {}
            1 => parts.push(name.to_string()),
            x => parts.push(format!("{name}^{x}")),
        };
        for a in 0..k {
            push(&sig.names[a].0, e[a]);
        }
        for a in 0..k {
            push(&sig.names[a].1, e[k + a]);
        }
        parts.join("*")
    }

    /// Terms in rendering order: total degree descending, then exponents
    /// descending.
    pub fn ordered_terms(&self) -> Vec<(&WeylExponents, &HbarScalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        v
    }
}

fn check_sig(a: &WeylElement, b: &WeylElement) {
    assert!(same_sig(&a.sig, &b.sig), "mismatched Weyl signatures");
}

impl<'a> Add<&'a WeylElement> for &'a WeylElement {
    type Output = WeylElement;
    fn add(self, o: &WeylElement) -> WeylElement {
        check_sig(self, o);
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            add_to(&mut terms, e.clone(), c.clone());
        }
        WeylElement { sig: self.sig.clone(), terms }
    }
}

impl<'a> Sub<&'a WeylElement> for &'a WeylElement {
    type Output = WeylElement;
    fn sub(self, o: &WeylElement) -> WeylElement {
        self + &(-o)
    }
}

impl<'a> Neg for &'a WeylElement {
    type Output = WeylElement;
    fn neg(self) -> WeylElement {
        WeylElement { sig: self.sig.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl<'a> Mul<&'a WeylElement> for &'a WeylElement {
    type Output = WeylElement;
    fn mul(self, o: &WeylElement) -> WeylElement {
        check_sig(self, o);
        let mut terms = BTreeMap::new();
        for (x, cx) in &self.terms {
            for (y, cy) in &o.terms {
                self.monomial_product(x, y, &mut terms, &(cx * cy));
            }
        }
        WeylElement { sig: self.sig.clone(), terms }
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.ordered_terms() {
            let mono = Self::monomial_string(&self.sig, e);
            for (r, im, d) in c.atoms() {
                write_term(f, first, &r, im, d, &mono)?;
                first = false;
            }
        }
        Ok(())
    }
}

/// Associative product; fails on mismatched signatures.
pub fn weyl_mul(a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
    if !same_sig(&a.sig, &b.sig) {
        return Err(Error::SignatureMismatch);
    }
    Ok(a * b)
}

/// `[a, b] = ab − ba`.
pub fn weyl_commutator(a: &WeylElement, b: &WeylElement) -> Result<WeylElement> {
    if !same_sig(&a.sig, &b.sig) {
        return Err(Error::SignatureMismatch);
    }
    Ok(&(a * b) - &(b * a))
}

/// An unordered product of generators, before normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeylWord {
    pub signature: Arc<WeylSignature>,
    pub symbols: Vec<Generator>,
}

impl WeylWord {
    pub fn new(signature: &Arc<WeylSignature>, symbols: Vec<Generator>) -> Result<Self> {
        if symbols.iter().any(|g| g.pair >= signature.pairs()) {
            return Err(Error::Precondition("generator outside the signature".into()));
        }
        Ok(Self { signature: signature.clone(), symbols })
    }

    /// The product in the written order, normal-ordered.
    pub fn product(&self) -> WeylElement {
        self.symbols
            .iter()
            .fold(WeylElement::identity(&self.signature), |acc, g| &acc * &WeylElement::generator(&self.signature, *g))
    }
}

/// `S(z^a w^b)` for one pair: `Σ_j j! C(a,j) C(b,j) (−κ/2)^j z^{a−j} w^{b−j}`.
fn symmetric_pair(kappa: &HbarScalar, a: u32, b: u32) -> Vec<(u32, HbarScalar)> {
    let half = -&kappa.scale(&GaussianRational::real(rat(1, 2)));
    (0..=a.min(b))
        .map(|j| (j, &HbarScalar::from_rational(reorder_weight(a, b, j)) * &half.pow(j)))
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

/// Symmetrized product of `z_α^{a_α} w_α^{b_α}` over all pairs. Factors of
/// different pairs commute, so the symmetrization factorizes by pair.
pub fn symmetric_monomial(sig: &Arc<WeylSignature>, a: &[u32], b: &[u32]) -> WeylElement {
    let k = sig.pairs();
    let mut acc: Vec<(WeylExponents, HbarScalar)> = vec![(vec![0; 2 * k], HbarScalar::one())];
    for p in 0..k {
        let opts = symmetric_pair(&sig.kappa[p], a[p], b[p]);
        let mut next = Vec::with_capacity(acc.len() * opts.len());
        for (e, c) in &acc {
            for (j, w) in &opts {
                let mut e2 = e.clone();
                e2[p] = a[p] - j;
                e2[k + p] = b[p] - j;
                next.push((e2, c * w));
            }
        }
        acc = next;
    }
    WeylElement::from_terms(sig, acc)
}

/// Average of the word over all orderings of its symbols.
pub fn symmetrize(word: &WeylWord) -> WeylElement {
    let k = word.signature.pairs();
    let (mut a, mut b) = (vec![0; k], vec![0; k]);
    for g in &word.symbols {
        match g.kind {
            GenKind::Z => a[g.pair] += 1,
            GenKind::W => b[g.pair] += 1,
        }
    }
    symmetric_monomial(&word.signature, &a, &b)
}

/// Symmetrized products `S(B_1^{r_1} ⋯ B_K^{r_K})` of fixed factors.
///
/// With `R(r) = Σ` over distinct orderings of the factor multiset, the
/// recursion `R(r) = Σ_l B_l R(r − e_l)` (peel the leftmost factor) gives
/// every symmetrized power of total degree up to the bound in one pass;
/// `S(B^r) = R(r) / multinomial(r)`.
pub struct SymmetricPowers {
    factors: Vec<WeylElement>,
    table: HashMap<Vec<u32>, WeylElement>,
    max_degree: u32,
}

fn compositions(k: usize, total: u32) -> Vec<Vec<u32>> {
    if k == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=total).rev() {
        for mut rest in compositions(k - 1, total - first) {
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

/// All exponent vectors of length `k` with total degree `≤ max`, by degree.
pub fn exponent_vectors(k: usize, max: u32) -> Vec<Vec<u32>> {
    (0..=max).flat_map(|d| compositions(k, d)).collect()
}

fn multinomial(r: &[u32]) -> Rational {
    let n: u32 = r.iter().sum();
    let den = r.iter().fold(BigInt::one(), |a, &x| a * factorial(x));
    BigRational::new(factorial(n), den)
}

impl SymmetricPowers {
    pub fn new(factors: Vec<WeylElement>, max_degree: u32, exec: Exec) -> Result<Self> {
        let Some(sig) = factors.first().map(|f| f.sig.clone()) else {
            return Err(Error::Precondition("no factors".into()));
        };
        if factors.iter().any(|f| !same_sig(&f.sig, &sig)) {
            return Err(Error::SignatureMismatch);
        }
        let k = factors.len();
        // unnormalized sums R(r)
        let mut sums: HashMap<Vec<u32>, WeylElement> = HashMap::new();
        sums.insert(vec![0; k], WeylElement::identity(&sig));
        for d in 1..=max_degree {
            let level = compositions(k, d);
            let computed = exec.map(&level, |r| {
                let mut acc = WeylElement::zero(&sig);
                for l in 0..k {
                    if r[l] == 0 {
                        continue;
                    }
                    let mut prev = r.clone();
                    prev[l] -= 1;
                    acc = &acc + &(&factors[l] * &sums[&prev]);
                }
                acc
            });
            sums.extend(level.into_iter().zip(computed));
        }
        let table = sums
            .into_iter()
            .map(|(r, s)| {
                let m = multinomial(&r);
                let inv = HbarScalar::from_rational(BigRational::one() / m);
                (r, s.scale(&inv))
            })
            .collect();
        Ok(Self { factors, table, max_degree })
    }

    pub fn factors(&self) -> &[WeylElement] {
        &self.factors
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    /// `S(B^r)`; `None` beyond the degree bound.
    pub fn get(&self, r: &[u32]) -> Option<&WeylElement> {
        self.table.get(r)
    }
}

/// Symmetrization of an arbitrary list of factors (repeats allowed).
pub fn symmetrize_factors(factors: &[WeylElement]) -> Result<WeylElement> {
    let Some(first) = factors.first() else {
        return Err(Error::Precondition("no factors".into()));
    };
    // group equal factors so distinct orderings are counted once
    let mut classes: Vec<WeylElement> = Vec::new();
    let mut counts: Vec<u32> = Vec::new();
    for f in factors {
        if !same_sig(&f.sig, &first.sig) {
            return Err(Error::SignatureMismatch);
        }
        match classes.iter().position(|c| c == f) {
            Some(i) => counts[i] += 1,
            None => {
                classes.push(f.clone());
                counts.push(1);
            }
        }
    }
    let powers = SymmetricPowers::new(classes, factors.len() as u32, Exec::Sequential)?;
    Ok(powers.get(&counts).expect("within bound").clone())
}

/// Which signature pair each canonical pair maps to (`q_α ↦ z_{π(α)}`,
/// `p_α ↦ w_{π(α)}`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pairing(pub Vec<usize>);

impl Pairing {
    pub fn identity(n: usize) -> Self {
        Pairing((0..n).collect())
    }
}

/// Weyl (symmetric) ordering, monomial by monomial: `q^a p^b ↦ S(z^a w^b)`.
pub fn weyl_quantize(f: &ClassicalPoly, sig: &Arc<WeylSignature>) -> Result<WeylElement> {
    let n = f.space().pairs().ok_or(Error::CanonicalOnly)?;
    weyl_quantize_with(f, sig, &Pairing::identity(n))
}

pub fn weyl_quantize_with(f: &ClassicalPoly, sig: &Arc<WeylSignature>, pairing: &Pairing) -> Result<WeylElement> {
    let n = f.space().pairs().ok_or(Error::CanonicalOnly)?;
    if pairing.0.len() != n {
        return Err(Error::Precondition(format!("pairing needs {n} entries")));
    }
    let mut seen = vec![false; sig.pairs()];
    for &t in &pairing.0 {
        if t >= sig.pairs() || seen[t] {
            return Err(Error::Precondition("pairing must be injective into the signature".into()));
        }
        seen[t] = true;
    }
    let k = sig.pairs();
    let mut acc = WeylElement::zero(sig);
    for (e, c) in f.terms() {
        let (mut a, mut b) = (vec![0; k], vec![0; k]);
        for (alpha, &t) in pairing.0.iter().enumerate() {
            a[t] = e[alpha];
            b[t] = e[n + alpha];
        }
        acc = &acc + &symmetric_monomial(sig, &a, &b).scale(c);
    }
    Ok(acc)
}

/// Checks `[B_l, B_j] = −iħ Σ_m c_{lj}^m B_m` for every pair, i.e. that the
/// images realize the structure constants under `(i/ħ)[·,·]`.
pub fn validate_realization(images: &[WeylElement], c: &StructureConstants) -> Result<()> {
    let k = images.len();
    if c.dim() != k {
        return Err(Error::InconsistentStructure(format!("{} images for a {}-dimensional algebra", k, c.dim())));
    }
    let minus_i_hbar = -&HbarScalar::i_hbar();
    for l in 0..k {
        for j in 0..k {
            let lhs = weyl_commutator(&images[l], &images[j])?;
            let mut rhs = WeylElement::zero(images[0].signature());
            for m in 0..k {
                let cm = c.get(l, j, m);
                if !cm.is_zero() {
                    rhs = &rhs + &images[m].scale(&(&minus_i_hbar * &HbarScalar::constant(cm.clone())));
                }
            }
            if lhs != rhs {
                return Err(Error::InconsistentStructure(format!("[B{}, B{}]", l + 1, j + 1)));
            }
        }
    }
    Ok(())
}

/// Both sides of
/// `[S(B^r), B_j] = −iħ Σ_{l,m} r_l c_{lj}^m S(B^{r − e_l + e_m})`.
pub fn symmetrization_commutator_sides(
    powers: &SymmetricPowers,
    c: &StructureConstants,
    r: &[u32],
    j: usize,
) -> Result<(WeylElement, WeylElement)> {
    let b = powers.factors();
    let k = b.len();
    if r.len() != k || j >= k {
        return Err(Error::Precondition("exponent list or index does not match the basis".into()));
    }
    let s = powers
        .get(r)
        .ok_or_else(|| Error::Precondition("monomial beyond the precomputed degree".into()))?;
    let lhs = weyl_commutator(s, &b[j])?;
    let minus_i_hbar = -&HbarScalar::i_hbar();
    let mut rhs = WeylElement::zero(b[0].signature());
    for l in 0..k {
        if r[l] == 0 {
            continue;
        }
        for m in 0..k {
            let cm = c.get(l, j, m);
            if cm.is_zero() {
                continue;
            }
            let mut shifted = r.to_vec();
            shifted[l] -= 1;
            shifted[m] += 1;
            let term = powers.get(&shifted).expect("same total degree");
            let coef = &minus_i_hbar * &HbarScalar::constant(&GaussianRational::from_int(r[l] as i64) * cm);
            rhs = &rhs + &term.scale(&coef);
        }
    }
    Ok((lhs, rhs))
}

pub fn symmetrization_commutator_check(
    powers: &SymmetricPowers,
    c: &StructureConstants,
    r: &[u32],
    j: usize,
) -> Result<bool> {
    let (lhs, rhs) = symmetrization_commutator_sides(powers, c, r, j)?;
    Ok(lhs == rhs)
}

/// Result of checking the symmetrization identity over every monomial up to
/// a degree bound and every basis index.
#[derive(Clone, Debug)]
pub struct SymmetrizationReport {
    pub checked: usize,
    /// Failing `(r, j)` cases, sorted.
    pub failures: Vec<(Vec<u32>, usize)>,
}

pub fn symmetrization_commutator_scan(
    images: &[WeylElement],
    c: &StructureConstants,
    max_degree: u32,
    exec: Exec,
) -> Result<SymmetrizationReport> {
    validate_realization(images, c)?;
    let powers = SymmetricPowers::new(images.to_vec(), max_degree, exec)?;
    let k = images.len();
    let cases: Vec<(Vec<u32>, usize)> = exponent_vectors(k, max_degree)
        .into_iter()
        .flat_map(|r| (0..k).map(move |j| (r.clone(), j)))
        .collect();
    let results = exec.map(&cases, |(r, j)| symmetrization_commutator_check(&powers, c, r, *j));
    let mut failures = Vec::new();
    for (case, ok) in cases.iter().zip(results) {
        if !ok? {
            failures.push(case.clone());
        }
    }
    failures.sort();
    Ok(SymmetrizationReport { checked: cases.len(), failures })
}

fn weyl_monomials(k: usize, max_degree: u32) -> Vec<WeylExponents> {
    exponent_vectors(2 * k, max_degree)
}

fn to_fraction_vec(x: &WeylElement, index: &BTreeMap<WeylExponents, usize>) -> SparseVec<usize, HbarFraction> {
    x.terms.iter().map(|(e, c)| (index[e], HbarFraction::from(c.clone()))).collect()
}

/// Exact rank of a list of elements over Q(i)(ħ).
pub fn weyl_rank(elements: &[WeylElement]) -> usize {
    let mut index: BTreeMap<WeylExponents, usize> = BTreeMap::new();
    for x in elements {
        for e in x.terms.keys() {
            let n = index.len();
            index.entry(e.clone()).or_insert(n);
        }
    }
    let rows = elements.iter().map(|x| to_fraction_vec(x, &index)).collect();
    linalg::rank(rows, index.len())
}

/// Clears the ħ-denominators of a kernel vector and builds the element.
fn element_from_fractions(sig: &Arc<WeylSignature>, monos: &[WeylExponents], v: &[HbarFraction]) -> WeylElement {
    let mut lcm = HbarScalar::one();
    for x in v.iter().filter(|x| !x.is_zero()) {
        let d = x.denom();
        let g = lcm.gcd(d);
        lcm = (&lcm * d).div_rem(&g).0;
    }
    let terms = monos.iter().zip(v).filter(|(_, x)| !x.is_zero()).map(|(e, x)| {
        let (q, _) = (x.numer() * &lcm).div_rem(x.denom());
        (e.clone(), q)
    });
    WeylElement::from_terms(sig, terms)
}

/// Linear system for the unknown coefficients of `X` (normal-ordered,
/// degree ≤ bound) in the equations `[X, g] = ·`. Rows are keyed by
/// `(generator position, output monomial)`.
struct CommutatorSystem {
    monos: Vec<WeylExponents>,
    rows: BTreeMap<(usize, WeylExponents), SparseVec<usize, HbarFraction>>,
}

impl CommutatorSystem {
    fn build(sig: &Arc<WeylSignature>, gens: &[Generator], max_degree: u32) -> Self {
        let monos = weyl_monomials(sig.pairs(), max_degree);
        let mut rows: BTreeMap<(usize, WeylExponents), SparseVec<usize, HbarFraction>> = BTreeMap::new();
        for (gi, g) in gens.iter().enumerate() {
            let ge = WeylElement::generator(sig, *g);
            for (col, m) in monos.iter().enumerate() {
                let x = WeylElement::monomial(sig, m.clone(), HbarScalar::one());
                let comm = &(&x * &ge) - &(&ge * &x);
                for (e, c) in comm.terms {
                    rows.entry((gi, e)).or_default().insert(col, HbarFraction::from(c));
                }
            }
        }
        Self { monos, rows }
    }
}

/// Basis of `{X : [X, z_α] = [X, w_α] = 0 ∀α}` among elements of degree ≤
/// `max_degree`, with ħ-denominators cleared.
pub fn center_solve(sig: &Arc<WeylSignature>, max_degree: u32) -> Vec<WeylElement> {
    let gens = sig.generators();
    let sys = CommutatorSystem::build(sig, &gens, max_degree);
    let ncols = sys.monos.len();
    let rref = Rref::new(sys.rows.into_values().collect(), ncols);
    rref.nullspace().iter().map(|v| element_from_fractions(sig, &sys.monos, v)).collect()
}

/// Finds `X` of degree ≤ `max_degree` with `[X, g] = T_g` for every
/// supplied target; the constant term of `X` is set to zero. `None` when no
/// such `X` exists at this bound (or it would need ħ in a denominator).
pub fn inner_derivation_solve(
    sig: &Arc<WeylSignature>,
    targets: &[(Generator, WeylElement)],
    max_degree: u32,
) -> Result<Option<WeylElement>> {
    if targets.iter().any(|(_, t)| !same_sig(t.signature(), sig)) {
        return Err(Error::SignatureMismatch);
    }
    let gens: Vec<Generator> = targets.iter().map(|(g, _)| *g).collect();
    let mut sys = CommutatorSystem::build(sig, &gens, max_degree);
    let mut rhs: BTreeMap<(usize, WeylExponents), HbarFraction> = BTreeMap::new();
    for (gi, (_, t)) in targets.iter().enumerate() {
        for (e, c) in t.terms() {
            sys.rows.entry((gi, e.clone())).or_default();
            rhs.insert((gi, e.clone()), HbarFraction::from(c.clone()));
        }
    }
    let ncols = sys.monos.len();
    let (rows, b): (Vec<_>, Vec<_>) = sys
        .rows
        .into_iter()
        .map(|(key, row)| {
            let bi = rhs.remove(&key).unwrap_or_else(HbarFraction::zero);
            (row, bi)
        })
        .unzip();
    let Some(x) = linalg::solve(rows, b, ncols) else {
        return Ok(None);
    };
    let mut terms = Vec::new();
    for (e, v) in sys.monos.iter().zip(&x) {
        if v.is_zero() {
            continue;
        }
        match v.as_polynomial() {
            Some(p) => terms.push((e.clone(), p)),
            None => return Ok(None),
        }
    }
    Ok(Some(WeylElement::from_terms(sig, terms)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Normal ordering by adjacent swaps only: `w_α z_α → z_α w_α − κ_α`,
    /// letters of different pairs commute. Independent of the closed-form
    /// reordering used by the product.
    fn rewrite(sig: &Arc<WeylSignature>, word: &[Generator]) -> WeylElement {
        let mut pending: Vec<(Vec<Generator>, HbarScalar)> = vec![(word.to_vec(), HbarScalar::one())];
        let mut acc = WeylElement::zero(sig);
        while let Some((w, c)) = pending.pop() {
            let bad = (0..w.len().saturating_sub(1)).find(|&i| w[i].kind == GenKind::W && w[i + 1].kind == GenKind::Z);
            match bad {
                None => {
                    let k = sig.pairs();
                    let mut e = vec![0; 2 * k];
                    for g in &w {
                        match g.kind {
                            GenKind::Z => e[g.pair] += 1,
                            GenKind::W => e[k + g.pair] += 1,
                        }
                    }
                    acc = &acc + &WeylElement::monomial(sig, e, c);
                }
                Some(i) => {
                    let mut swapped = w.clone();
                    swapped.swap(i, i + 1);
                    if w[i].pair == w[i + 1].pair {
                        let mut shorter = w.clone();
                        shorter.drain(i..i + 2);
                        pending.push((shorter, &c * &(-&sig.kappa()[w[i].pair])));
                    }
                    pending.push((swapped, c));
                }
            }
        }
        acc
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..=p.len() {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    /// Average over all `n!` orderings, each product normal-ordered by `rewrite`.
    fn brute_symmetrize(sig: &Arc<WeylSignature>, word: &[Generator]) -> WeylElement {
        let perms = permutations(word.len());
        let mut acc = WeylElement::zero(sig);
        for p in &perms {
            let w: Vec<Generator> = p.iter().map(|&i| word[i]).collect();
            acc = &acc + &rewrite(sig, &w);
        }
        acc.scale(&HbarScalar::from_rational(BigRational::new(BigInt::one(), BigInt::from(perms.len()))))
    }

    fn brute_symmetrize_elements(factors: &[WeylElement]) -> WeylElement {
        let sig = factors[0].signature().clone();
        let perms = permutations(factors.len());
        let mut acc = WeylElement::zero(&sig);
        for p in &perms {
            acc = &acc + &p.iter().fold(WeylElement::identity(&sig), |a, &i| &a * &factors[i]);
        }
        acc.scale(&HbarScalar::from_rational(BigRational::new(BigInt::one(), BigInt::from(perms.len()))))
    }

    #[test]
    fn basic_relations() {
        let s = WeylSignature::quantum(1);
        let (z, w) = (WeylElement::z(&s, 0), WeylElement::w(&s, 0));
        let wz = &w * &z;
        let expect = &(&z * &w) - &WeylElement::scalar(&s, HbarScalar::i_hbar());
        assert_eq!(wz, expect);
        assert_eq!(weyl_commutator(&z, &w).unwrap().as_scalar(), Some(HbarScalar::i_hbar()));
        // [z², w²] = 4iħ zw + 2ħ²
        let c = weyl_commutator(&z.pow(2), &w.pow(2)).unwrap();
        let zw = &z * &w;
        let expect = &zw.scale(&HbarScalar::i_hbar().scale(&GaussianRational::from_int(4)))
            + &WeylElement::scalar(&s, HbarScalar::monomial(2, GaussianRational::from_int(2)));
        assert_eq!(c, expect);
        assert_eq!(c.to_string(), "4*i*h*z1*w1 + 2*h^2");
        let d = WeylSignature::differential();
        let (u, dd) = (WeylElement::z(&d, 0), WeylElement::w(&d, 0));
        assert_eq!(&dd * &u, &(&u * &dd) + &WeylElement::identity(&d));
    }

    #[test]
    fn mixed_signatures_rejected() {
        let a = WeylElement::z(&WeylSignature::quantum(1), 0);
        let b = WeylElement::z(&WeylSignature::differential(), 0);
        assert_eq!(weyl_mul(&a, &b), Err(Error::SignatureMismatch));
        assert_eq!(weyl_commutator(&a, &b), Err(Error::SignatureMismatch));
    }

    #[test]
    fn symmetrization_examples() {
        let s = WeylSignature::quantum(1);
        let (z, w) = (WeylElement::z(&s, 0), WeylElement::w(&s, 0));
        let zg = Generator { pair: 0, kind: GenKind::Z };
        let wg = Generator { pair: 0, kind: GenKind::W };
        let half_i_hbar = HbarScalar::i_hbar().scale(&GaussianRational::real(rat(1, 2)));
        let szw = symmetrize(&WeylWord::new(&s, vec![zg, wg]).unwrap());
        assert_eq!(szw, &(&z * &w) - &WeylElement::scalar(&s, half_i_hbar));
        let szzw = symmetrize(&WeylWord::new(&s, vec![zg, zg, wg]).unwrap());
        assert_eq!(szzw, &(&z.pow(2) * &w) - &z.scale(&HbarScalar::i_hbar()));
        assert_eq!(szzw.to_string(), "z1^2*w1 - i*h*z1");
    }

    #[test]
    fn symmetrized_monomials_independent() {
        let s = WeylSignature::quantum(1);
        let mons: Vec<WeylElement> =
            exponent_vectors(2, 5).iter().map(|e| symmetric_monomial(&s, &e[..1], &e[1..])).collect();
        assert_eq!(weyl_rank(&mons), mons.len());
        let s2 = WeylSignature::quantum(2);
        let mons: Vec<WeylElement> =
            exponent_vectors(4, 4).iter().map(|e| symmetric_monomial(&s2, &e[..2], &e[2..])).collect();
        assert_eq!(weyl_rank(&mons), mons.len());
    }

    #[test]
    fn weyl_quantization_of_quadratics() {
        let ps = crate::phasepoly::VariableSpace::canonical(1);
        let q = ClassicalPoly::var(&ps, 0);
        let p = ClassicalPoly::var(&ps, 1);
        let s = WeylSignature::quantum(1);
        let quads = [q.pow(2), &q * &p, p.pow(2)];
        for f in &quads {
            for g in &quads {
                let lhs = weyl_quantize(&f.bracket(g).unwrap(), &s).unwrap();
                let comm = weyl_commutator(&weyl_quantize(f, &s).unwrap(), &weyl_quantize(g, &s).unwrap()).unwrap();
                assert_eq!(lhs, comm.i_over_hbar().unwrap());
            }
        }
        let bad = Pairing(vec![0, 0]);
        let ps2 = crate::phasepoly::VariableSpace::canonical(2);
        let f = ClassicalPoly::var(&ps2, 0);
        assert!(weyl_quantize_with(&f, &WeylSignature::quantum(2), &bad).is_err());
    }

    #[test]
    fn center_is_scalars() {
        for k in [1, 2] {
            let s = WeylSignature::quantum(k);
            let deg = if k == 1 { 6 } else { 4 };
            let basis = center_solve(&s, deg);
            assert_eq!(basis.len(), 1);
            assert!(basis[0].as_scalar().is_some());
        }
    }

    #[test]
    fn inner_derivations() {
        let s = WeylSignature::quantum(1);
        let zg = Generator { pair: 0, kind: GenKind::Z };
        let wg = Generator { pair: 0, kind: GenKind::W };
        let (z, w) = (WeylElement::z(&s, 0), WeylElement::w(&s, 0));
        // X = z: [z, z] = 0, [z, w] = iħ
        let targets = [(zg, WeylElement::zero(&s)), (wg, WeylElement::scalar(&s, HbarScalar::i_hbar()))];
        assert_eq!(inner_derivation_solve(&s, &targets, 3).unwrap(), Some(z.clone()));
        let zero_targets = [(zg, WeylElement::zero(&s)), (wg, WeylElement::zero(&s))];
        assert_eq!(inner_derivation_solve(&s, &zero_targets, 3).unwrap(), Some(WeylElement::zero(&s)));
        let x = &(&z.pow(2) * &w) - &z.scale(&HbarScalar::i_hbar());
        let targets = [(zg, weyl_commutator(&x, &z).unwrap()), (wg, weyl_commutator(&x, &w).unwrap())];
        assert_eq!(inner_derivation_solve(&s, &targets, 4).unwrap(), Some(x));
        // a target of degree beyond what the bound can produce
        let far = [(zg, z.pow(5))];
        assert_eq!(inner_derivation_solve(&s, &far, 3).unwrap(), None);
    }

    fn example5_images() -> (Vec<WeylElement>, StructureConstants) {
        let s = WeylSignature::quantum(2);
        let (z1, z2, w1, w2) = (WeylElement::z(&s, 0), WeylElement::z(&s, 1), WeylElement::w(&s, 0), WeylElement::w(&s, 1));
        let images = vec![WeylElement::identity(&s), z1.clone(), w2.clone(), &(&z1 * &w2) + &z2, w1];
        let mut c = StructureConstants::zeros(5);
        let mut put = |i: usize, j: usize, k: usize, v: i64| {
            c.set(i, j, k, GaussianRational::from_int(v));
            c.set(j, i, k, GaussianRational::from_int(-v));
        };
        put(1, 4, 0, -1);
        put(2, 3, 0, 1);
        put(3, 4, 2, -1);
        (images, c)
    }

    #[test]
    fn symmetrization_identity_example5() {
        let (images, c) = example5_images();
        validate_realization(&images, &c).unwrap();
        let rep = symmetrization_commutator_scan(&images, &c, 3, Exec::default()).unwrap();
        assert!(rep.failures.is_empty());
        assert_eq!(rep.checked, exponent_vectors(5, 3).len() * 5);
        let mut wrong = c.clone();
        wrong.set(1, 4, 0, GaussianRational::from_int(1));
        assert!(matches!(validate_realization(&images, &wrong), Err(Error::InconsistentStructure(_))));
    }

    #[test]
    fn symmetric_powers_match_permutation_average() {
        let (images, _) = example5_images();
        let powers = SymmetricPowers::new(images[1..].to_vec(), 4, Exec::Sequential).unwrap();
        for r in exponent_vectors(4, 4) {
            let mut list = Vec::new();
            for (l, &x) in r.iter().enumerate() {
                list.extend(std::iter::repeat(images[l + 1].clone()).take(x as usize));
            }
            if list.is_empty() {
                continue;
            }
            assert_eq!(powers.get(&r).unwrap(), &brute_symmetrize_elements(&list), "r = {r:?}");
        }
        assert_eq!(
            symmetrize_factors(&[images[3].clone(), images[3].clone(), images[1].clone()]).unwrap(),
            brute_symmetrize_elements(&[images[3].clone(), images[3].clone(), images[1].clone()])
        );
    }

    fn generator() -> impl Strategy<Value = Generator> {
        (0usize..2, any::<bool>()).prop_map(|(pair, z)| Generator { pair, kind: if z { GenKind::Z } else { GenKind::W } })
    }

    fn element(sig: Arc<WeylSignature>) -> impl Strategy<Value = WeylElement> {
        prop::collection::vec((prop::collection::vec(0u32..3, 4), -3i64..4, 0u32..2), 0..4).prop_map(move |ts| {
            WeylElement::from_terms(
                &sig,
                ts.into_iter().map(|(e, c, h)| (e, HbarScalar::monomial(h, GaussianRational::from_int(c)))),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn product_matches_rewriting(word in prop::collection::vec(generator(), 0..7)) {
            let s = WeylSignature::quantum(2);
            let w = WeylWord::new(&s, word.clone()).unwrap();
            prop_assert_eq!(w.product(), rewrite(&s, &word));
        }

        #[test]
        fn symmetrize_matches_permutations(word in prop::collection::vec(generator(), 0..6)) {
            let s = WeylSignature::quantum(2);
            let w = WeylWord::new(&s, word.clone()).unwrap();
            prop_assert_eq!(symmetrize(&w), brute_symmetrize(&s, &word));
        }

        #[test]
        fn associative_and_jacobi(
            a in element(WeylSignature::quantum(2)),
            b in element(WeylSignature::quantum(2)),
            c in element(WeylSignature::quantum(2)),
        ) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            let comm = |x: &WeylElement, y: &WeylElement| weyl_commutator(x, y).unwrap();
            let j = &(&comm(&a, &comm(&b, &c)) + &comm(&b, &comm(&c, &a))) + &comm(&c, &comm(&a, &b));
            prop_assert!(j.is_zero());
        }
    }

    #[test]
    fn differential_signature_symmetrization() {
        let d = WeylSignature::differential();
        let ug = Generator { pair: 0, kind: GenKind::Z };
        let dg = Generator { pair: 0, kind: GenKind::W };
        for word in [vec![ug, dg], vec![ug, ug, dg, dg], vec![dg, ug, dg]] {
            let w = WeylWord::new(&d, word.clone()).unwrap();
            assert_eq!(symmetrize(&w), brute_symmetrize(&d, &word));
        }
    }
}
