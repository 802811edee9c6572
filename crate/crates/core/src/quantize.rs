//! Quantization maps as rule tables, the Dirac-condition checker, the
//! Groenewold witness, and the affine quantizations of `a(1)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lie::FinLieAlgebra;
use crate::par::Exec;
use crate::phasepoly::{same_space, ClassicalPoly, Exponents, VariableSpace};
use crate::scalar::{rat, GaussianRational, HbarScalar, Rational};
use crate::weyl::{exponent_vectors, symmetric_monomial, weyl_commutator, weyl_rank, Pairing, WeylElement, WeylSignature};

/// A pattern assigning images to whole families of monomials.
#[derive(Clone, Debug)]
pub enum Rule {
    /// Every monomial of total degree `≥ n` maps to zero.
    ZeroFromDegree(u32),
    /// `v^k ↦ k · image` for `k ≥ 1`.
    LinearInPower { var: usize, image: WeylElement },
    /// `base^l · var ↦ image` for `l ≥ 0`.
    FixedUnderFactor { var: usize, base: usize, image: WeylElement },
    /// Monomials with `var`-degree `≥ min` map to zero.
    ZeroWhenPowerAtLeast { var: usize, min: u32 },
    /// Weyl ordering, canonical spaces only.
    Symmetrized { pairing: Pairing },
}

impl Rule {
    fn apply(&self, q: &QuantizationMap, e: &[u32]) -> Option<WeylElement> {
        let only = |v: usize| e.iter().enumerate().all(|(i, &x)| i == v || x == 0);
        match self {
            Rule::ZeroFromDegree(n) => (e.iter().sum::<u32>() >= *n).then(|| WeylElement::zero(&q.target)),
            Rule::LinearInPower { var, image } => (only(*var) && e[*var] >= 1)
                .then(|| image.scale(&HbarScalar::from_int(e[*var] as i64))),
            Rule::FixedUnderFactor { var, base, image } => {
                let ok = e[*var] == 1 && e.iter().enumerate().all(|(i, &x)| i == *var || i == *base || x == 0);
                ok.then(|| image.clone())
            }
            Rule::ZeroWhenPowerAtLeast { var, min } => (e[*var] >= *min).then(|| WeylElement::zero(&q.target)),
            Rule::Symmetrized { pairing } => {
                let n = pairing.0.len();
                let k = q.target.pairs();
                let (mut a, mut b) = (vec![0; k], vec![0; k]);
                for (alpha, &t) in pairing.0.iter().enumerate() {
                    a[t] = e[alpha];
                    b[t] = e[n + alpha];
                }
                Some(symmetric_monomial(&q.target, &a, &b))
            }
        }
    }
}

/// A linear map from classical polynomials to a Weyl algebra, given on
/// monomials by an explicit table first and ordered patterns second.
/// Monomials matched by neither are a coverage error.
#[derive(Clone, Debug)]
pub struct QuantizationMap {
    pub name: String,
    source: Arc<VariableSpace>,
    target: Arc<WeylSignature>,
    table: BTreeMap<Exponents, WeylElement>,
    patterns: Vec<Rule>,
}

impl QuantizationMap {
    /// An empty map sending `1` to the identity.
    pub fn new(name: &str, source: &Arc<VariableSpace>, target: &Arc<WeylSignature>) -> Self {
        let mut table = BTreeMap::new();
        table.insert(vec![0; source.nvars()], WeylElement::identity(target));
        Self { name: name.into(), source: source.clone(), target: target.clone(), table, patterns: Vec::new() }
    }

    /// Sets (or overrides) the image of one monomial.
    pub fn with_entry(mut self, e: Exponents, image: WeylElement) -> Result<Self> {
        if e.len() != self.source.nvars() {
            return Err(Error::DimensionMismatch { expected: self.source.nvars(), got: e.len() });
        }
        if **image.signature() != *self.target {
            return Err(Error::SignatureMismatch);
        }
        self.table.insert(e, image);
        Ok(self)
    }

    pub fn with_rule(mut self, rule: Rule) -> Result<Self> {
        match &rule {
            Rule::Symmetrized { pairing } => {
                let n = self.source.pairs().ok_or(Error::CanonicalOnly)?;
                if pairing.0.len() != n || pairing.0.iter().any(|&t| t >= self.target.pairs()) {
                    return Err(Error::Precondition("pairing does not fit the spaces".into()));
                }
            }
            Rule::LinearInPower { image, .. } | Rule::FixedUnderFactor { image, .. } => {
                if **image.signature() != *self.target {
                    return Err(Error::SignatureMismatch);
                }
            }
            _ => {}
        }
        self.patterns.push(rule);
        Ok(self)
    }

    pub fn source(&self) -> &Arc<VariableSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<WeylSignature> {
        &self.target
    }

    fn monomial_image(&self, e: &[u32]) -> Result<WeylElement> {
        if let Some(x) = self.table.get(e) {
            return Ok(x.clone());
        }
        self.patterns
            .iter()
            .find_map(|r| r.apply(self, e))
            .ok_or_else(|| Error::Coverage(ClassicalPoly::monomial_string(&self.source, e)))
    }

    pub fn apply(&self, f: &ClassicalPoly) -> Result<WeylElement> {
        if !same_space(f.space(), &self.source) {
            return Err(Error::SpaceMismatch);
        }
        let mut acc = WeylElement::zero(&self.target);
        for (e, c) in f.terms() {
            acc = &acc + &self.monomial_image(e)?.scale(c);
        }
        Ok(acc)
    }
}

/// Weyl quantization `q^a p^b ↦ S(z^a w^b)` as a rule table.
pub fn weyl_map(source: &Arc<VariableSpace>, target: &Arc<WeylSignature>) -> Result<QuantizationMap> {
    let n = source.pairs().ok_or(Error::CanonicalOnly)?;
    QuantizationMap::new("weyl", source, target).with_rule(Rule::Symmetrized { pairing: Pairing::identity(n) })
}

/// `Q({f,g}) − (i/ħ)[Q(f), Q(g)]`.
pub fn q1_check(q: &QuantizationMap, f: &ClassicalPoly, g: &ClassicalPoly) -> Result<WeylElement> {
    let lhs = q.apply(&f.bracket(g)?)?;
    let comm = weyl_commutator(&q.apply(f)?, &q.apply(g)?)?;
    Ok(&lhs - &comm.i_over_hbar()?)
}

#[derive(Clone, Debug)]
pub struct Q1Failure {
    pub f: ClassicalPoly,
    pub g: ClassicalPoly,
    pub discrepancy: WeylElement,
}

#[derive(Clone, Debug)]
pub struct Q1ScanReport {
    pub checked: usize,
    pub failures: Vec<Q1Failure>,
}

impl Q1ScanReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Q1 over the given elements, unordered pairs `i < j` (the diagonal and the
/// swapped pairs follow by antisymmetry). Failures keep input order.
pub fn q1_scan_elements(q: &QuantizationMap, elems: &[ClassicalPoly], exec: Exec) -> Result<Q1ScanReport> {
    let pairs: Vec<(usize, usize)> =
        (0..elems.len()).flat_map(|i| (i + 1..elems.len()).map(move |j| (i, j))).collect();
    let results = exec.map(&pairs, |&(i, j)| q1_check(q, &elems[i], &elems[j]));
    let mut failures = Vec::new();
    for (&(i, j), d) in pairs.iter().zip(results) {
        let d = d?;
        if !d.is_zero() {
            failures.push(Q1Failure { f: elems[i].clone(), g: elems[j].clone(), discrepancy: d });
        }
    }
    Ok(Q1ScanReport { checked: pairs.len(), failures })
}

/// Monic monomials of the source space with total degree `≤ bound`.
pub fn monomials(space: &Arc<VariableSpace>, bound: u32) -> Vec<ClassicalPoly> {
    exponent_vectors(space.nvars(), bound)
        .into_iter()
        .map(|e| ClassicalPoly::monomial(space, e, HbarScalar::one()))
        .collect()
}

/// Q1 on every pair of monomials of total degree `≤ degree_bound`.
pub fn q1_scan(q: &QuantizationMap, degree_bound: u32, exec: Exec) -> Result<Q1ScanReport> {
    q1_scan_elements(q, &monomials(&q.source, degree_bound), exec)
}

#[derive(Clone, Debug)]
pub struct GroenewoldWitness {
    /// `{q³, p³}`.
    pub cubic_bracket: ClassicalPoly,
    /// `3{q²p, qp²}`.
    pub mixed_bracket: ClassicalPoly,
    pub classical_identity: bool,
    pub discrepancy: WeylElement,
    /// `c` with `discrepancy = c ħ² · 1`, when it has that shape.
    pub coefficient: Option<GaussianRational>,
}

/// The pair `(i/ħ)[Q_W q³, Q_W p³]` and `(i/ħ)[Q_W q²p, Q_W qp²]` on W(2).
pub fn groenewold_sides() -> Result<(WeylElement, WeylElement)> {
    let s = VariableSpace::canonical(1);
    let sig = WeylSignature::quantum(1);
    let qm = weyl_map(&s, &sig)?;
    let q = ClassicalPoly::var(&s, 0);
    let p = ClassicalPoly::var(&s, 1);
    let qw = |f: &ClassicalPoly| qm.apply(f);
    let a = weyl_commutator(&qw(&q.pow(3))?, &qw(&p.pow(3))?)?.i_over_hbar()?;
    let b = weyl_commutator(&qw(&(&q.pow(2) * &p))?, &qw(&(&q * &p.pow(2)))?)?.i_over_hbar()?;
    Ok((a, b))
}

pub fn groenewold_witness() -> Result<GroenewoldWitness> {
    let s = VariableSpace::canonical(1);
    let q = ClassicalPoly::var(&s, 0);
    let p = ClassicalPoly::var(&s, 1);
    let cubic_bracket = q.pow(3).bracket(&p.pow(3))?;
    let mixed_bracket = (&q.pow(2) * &p).bracket(&(&q * &p.pow(2)))?.scale(&HbarScalar::from_int(3));
    let (a, b) = groenewold_sides()?;
    let ninth = HbarScalar::from_rational(rat(1, 9));
    let third = HbarScalar::from_rational(rat(1, 3));
    let discrepancy = &a.scale(&ninth) - &b.scale(&third);
    let coefficient = discrepancy.as_scalar().and_then(|c| {
        let c2 = c.coeff(2);
        (c == HbarScalar::monomial(2, c2.clone())).then_some(c2)
    });
    Ok(GroenewoldWitness {
        classical_identity: cubic_bracket == mixed_bracket,
        cubic_bracket,
        mixed_bracket,
        discrepancy,
        coefficient,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// `Q(x) = −iħ u d`, `Q(y) = ±u²` on the differential signature.
fn affine_images(sign: Sign) -> (Arc<WeylSignature>, WeylElement, WeylElement) {
    let sig = WeylSignature::differential();
    let u = WeylElement::z(&sig, 0);
    let d = WeylElement::w(&sig, 0);
    let qx = (&u * &d).scale(&-&HbarScalar::i_hbar());
    let qy = u.pow(2).scale(&HbarScalar::from_int(sign.value()));
    (sig, qx, qy)
}

/// The affine quantization: linear on `{1, x, y}`, zero from degree 2 on.
pub fn affine_quantization(sign: Sign) -> QuantizationMap {
    let (sig, qx, qy) = affine_images(sign);
    let src = VariableSpace::affine();
    QuantizationMap::new(&format!("affine{}", sign.symbol()), &src, &sig)
        .with_entry(vec![1, 0], qx)
        .and_then(|m| m.with_entry(vec![0, 1], qy))
        .and_then(|m| m.with_rule(Rule::ZeroFromDegree(2)))
        .expect("well-formed affine rules")
}

/// `x^k ↦ k Q(x)`, `x^l y ↦ Q(y)`, `x^l y^m ↦ 0` for `m > 1`.
pub fn alternative_affine_quantization() -> QuantizationMap {
    let (sig, qx, qy) = affine_images(Sign::Plus);
    let src = VariableSpace::affine();
    QuantizationMap::new("affine-alt", &src, &sig)
        .with_rule(Rule::LinearInPower { var: 0, image: qx })
        .and_then(|m| m.with_rule(Rule::FixedUnderFactor { var: 1, base: 0, image: qy }))
        .and_then(|m| m.with_rule(Rule::ZeroWhenPowerAtLeast { var: 1, min: 2 }))
        .expect("well-formed alternative rules")
}

/// `(ν, λ)` in `R ⋊ R₊`, with `λ > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineGroupElement {
    nu: Rational,
    lambda: Rational,
}

impl AffineGroupElement {
    pub fn new(nu: Rational, lambda: Rational) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(Error::Precondition("group elements need λ > 0".into()));
        }
        Ok(Self { nu, lambda })
    }

    pub fn identity() -> Self {
        Self { nu: Rational::zero(), lambda: Rational::one() }
    }

    pub fn nu(&self) -> &Rational {
        &self.nu
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    /// `(ν,λ)(β,δ) = (ν + λ²β, λδ)`.
    pub fn compose(&self, o: &Self) -> Self {
        Self { nu: &self.nu + &self.lambda * &self.lambda * &o.nu, lambda: &self.lambda * &o.lambda }
    }

    pub fn inverse(&self) -> Self {
        Self { nu: -&self.nu / (&self.lambda * &self.lambda), lambda: self.lambda.recip() }
    }
}

/// The transform `ψ(q) ↦ e^{sign·iμcq²} ψ(sq)` with `μ` kept formal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseScalingState {
    pub sign: Sign,
    c: Rational,
    s: Rational,
}

impl PhaseScalingState {
    pub fn new(sign: Sign, c: Rational, s: Rational) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::Precondition("scaling must be positive".into()));
        }
        Ok(Self { sign, c, s })
    }

    pub fn identity(sign: Sign) -> Self {
        Self { sign, c: Rational::zero(), s: Rational::one() }
    }

    pub fn c(&self) -> &Rational {
        &self.c
    }

    pub fn s(&self) -> &Rational {
        &self.s
    }
}

/// Applies `U(ν,λ)` to the transform `(c, s)`, giving `(ν + λ²c, λs)`.
pub fn affine_rep_compose(sign: Sign, g: &AffineGroupElement, state: &PhaseScalingState) -> Result<PhaseScalingState> {
    if state.sign != sign {
        return Err(Error::Precondition("representation sign does not match the state".into()));
    }
    Ok(PhaseScalingState {
        sign,
        c: &g.nu + &g.lambda * &g.lambda * &state.c,
        s: &g.lambda * &state.s,
    })
}

/// Random rational group elements, reproducible from `seed`.
pub fn sample_group_elements(count: usize, seed: u64) -> Vec<AffineGroupElement> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let nu = rat(rng.gen_range(-20..=20), rng.gen_range(1..=7));
            let lambda = rat(rng.gen_range(1..=20), rng.gen_range(1..=7));
            AffineGroupElement::new(nu, lambda).expect("positive λ")
        })
        .collect()
}

/// One law check: `U(g₁)U(g₂)e` against `U(g₁g₂)e`.
#[derive(Clone, Debug)]
pub struct RepCase {
    pub g1: AffineGroupElement,
    pub g2: AffineGroupElement,
    pub expected: PhaseScalingState,
    pub actual: PhaseScalingState,
}

impl RepCase {
    pub fn passed(&self) -> bool {
        self.expected == self.actual
    }
}

pub fn rep_homomorphism_cases(sign: Sign, count: usize, seed: u64) -> Result<Vec<RepCase>> {
    let gs = sample_group_elements(2 * count, seed);
    let e = PhaseScalingState::identity(sign);
    gs.chunks(2)
        .map(|w| {
            let (g1, g2) = (&w[0], &w[1]);
            let actual = affine_rep_compose(sign, g1, &affine_rep_compose(sign, g2, &e)?)?;
            let expected = affine_rep_compose(sign, &g1.compose(g2), &e)?;
            Ok(RepCase { g1: g1.clone(), g2: g2.clone(), expected, actual })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct PairCheck {
    pub f: ClassicalPoly,
    pub g: ClassicalPoly,
    pub discrepancy: WeylElement,
}

#[derive(Clone, Debug)]
pub struct AuditReport {
    pub identity_ok: bool,
    pub basis_pairs: Vec<PairCheck>,
    pub image_rank: usize,
    pub dimension: usize,
    pub span: Q1ScanReport,
    /// Elements of the generated span that were scanned.
    pub span_size: usize,
}

impl AuditReport {
    pub fn faithful(&self) -> bool {
        self.image_rank == self.dimension
    }

    pub fn basis_q1_ok(&self) -> bool {
        self.basis_pairs.iter().all(|p| p.discrepancy.is_zero())
    }

    pub fn passed(&self) -> bool {
        self.identity_ok && self.basis_q1_ok() && self.faithful() && self.span.passed()
    }
}

/// Distinct products of at most `bound` basis elements, `1` included.
fn generated_products(algebra: &FinLieAlgebra, bound: u32) -> Vec<ClassicalPoly> {
    let mut seen: Vec<ClassicalPoly> = vec![ClassicalPoly::one(algebra.space())];
    let mut layer = seen.clone();
    for _ in 0..bound {
        let mut next = Vec::new();
        for f in &layer {
            for b in algebra.basis() {
                let h = f * b;
                if !seen.contains(&h) {
                    seen.push(h.clone());
                    next.push(h);
                }
            }
        }
        layer = next;
    }
    seen
}

/// `Q(1) = I`, Q1 on basis pairs, the rank of `Q` on the basis, and Q1 over
/// products of at most `degree_bound` basis elements.
pub fn basic_quantization_audit(
    q: &QuantizationMap,
    algebra: &FinLieAlgebra,
    degree_bound: u32,
    exec: Exec,
) -> Result<AuditReport> {
    if !same_space(algebra.space(), q.source()) {
        return Err(Error::SpaceMismatch);
    }
    let identity_ok = q.apply(&ClassicalPoly::one(q.source()))? == WeylElement::identity(q.target());
    let b = algebra.basis();
    let mut basis_pairs = Vec::new();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            basis_pairs.push(PairCheck { f: b[i].clone(), g: b[j].clone(), discrepancy: q1_check(q, &b[i], &b[j])? });
        }
    }
    let images = b.iter().map(|f| q.apply(f)).collect::<Result<Vec<_>>>()?;
    let image_rank = weyl_rank(&images);
    let products = generated_products(algebra, degree_bound);
    let span = q1_scan_elements(q, &products, exec)?;
    Ok(AuditReport { identity_ok, basis_pairs, image_rank, dimension: algebra.dim(), span, span_size: products.len() })
}

/// `a(1)` with basis `(x, y)` in the abstract affine space.
pub fn affine_algebra() -> FinLieAlgebra {
    let s = VariableSpace::affine();
    FinLieAlgebra::from_basis(vec![ClassicalPoly::var(&s, 0), ClassicalPoly::var(&s, 1)]).expect("a(1) is closed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;
    use proptest::prelude::*;

    fn affine_vars() -> (ClassicalPoly, ClassicalPoly) {
        let s = VariableSpace::affine();
        (ClassicalPoly::var(&s, 0), ClassicalPoly::var(&s, 1))
    }

    #[test]
    fn affine_images_and_q1() {
        let (x, y) = affine_vars();
        let q = affine_quantization(Sign::Plus);
        let sig = q.target().clone();
        let ud = &WeylElement::z(&sig, 0) * &WeylElement::w(&sig, 0);
        assert_eq!(q.apply(&x).unwrap(), ud.scale(&-&HbarScalar::i_hbar()));
        assert!(q.apply(&(&x * &y)).unwrap().is_zero());
        assert!(q1_check(&q, &x, &y).unwrap().is_zero());
        let qm = affine_quantization(Sign::Minus);
        assert_eq!(qm.apply(&y).unwrap(), WeylElement::z(&sig, 0).pow(2).scale(&HbarScalar::from_int(-1)));
        assert!(q1_check(&qm, &x, &y).unwrap().is_zero());
        for m in [&q, &qm] {
            assert!(q1_scan(m, 4, Exec::Sequential).unwrap().passed());
        }
    }

    #[test]
    fn alternative_affine_rules() {
        let (x, y) = affine_vars();
        let q = alternative_affine_quantization();
        let qx = affine_quantization(Sign::Plus).apply(&x).unwrap();
        let qy = affine_quantization(Sign::Plus).apply(&y).unwrap();
        assert_eq!(q.apply(&x.pow(3)).unwrap(), qx.scale(&HbarScalar::from_int(3)));
        assert_eq!(q.apply(&(&x.pow(2) * &y)).unwrap(), qy);
        assert!(q.apply(&(&x * &y.pow(2))).unwrap().is_zero());
        assert_eq!(q.apply(&ClassicalPoly::one(x.space())).unwrap(), WeylElement::identity(q.target()));
        assert!(q1_scan(&q, 4, Exec::Sequential).unwrap().passed());
    }

    #[test]
    fn coverage_gaps_are_errors() {
        let s = VariableSpace::affine();
        let sig = WeylSignature::differential();
        let q = QuantizationMap::new("partial", &s, &sig);
        let x = ClassicalPoly::var(&s, 0);
        assert!(matches!(q.apply(&x), Err(Error::Coverage(_))));
    }

    #[test]
    fn weyl_scan_fails_at_cubics() {
        let s = VariableSpace::canonical(1);
        let q = weyl_map(&s, &WeylSignature::quantum(1)).unwrap();
        assert!(q1_scan(&q, 2, Exec::Sequential).unwrap().passed());
        let rep = q1_scan(&q, 3, Exec::Sequential).unwrap();
        assert!(!rep.passed());
        assert!(rep.failures.iter().all(|f| f.f.total_degree().unwrap() + f.g.total_degree().unwrap() >= 5));
        let s2 = VariableSpace::canonical(2);
        let q2 = weyl_map(&s2, &WeylSignature::quantum(2)).unwrap();
        let qq = ClassicalPoly::var(&s2, 0).pow(2);
        let pp = ClassicalPoly::var(&s2, 2).pow(2);
        assert!(q1_check(&q2, &qq, &pp).unwrap().is_zero());
    }

    #[test]
    fn groenewold_shape() {
        let w = groenewold_witness().unwrap();
        assert!(w.classical_identity);
        let s = w.cubic_bracket.space().clone();
        let q2p2 = &ClassicalPoly::var(&s, 0).pow(2) * &ClassicalPoly::var(&s, 1).pow(2);
        assert_eq!(w.cubic_bracket, q2p2.scale(&HbarScalar::from_int(-9)));
        let c = w.coefficient.expect("a multiple of h^2");
        assert!(!c.is_zero());
        // each side matches Q_W of the classical bracket up to O(ħ²)
        let qm = weyl_map(&s, &WeylSignature::quantum(1)).unwrap();
        let (a, b) = groenewold_sides().unwrap();
        let target = qm.apply(&q2p2).unwrap();
        for (side, factor) in [(a, -9), (b, -3)] {
            let diff = &side - &target.scale(&HbarScalar::from_int(factor));
            for coef in diff.terms().values() {
                assert!(coef.coeff(0).is_zero() && coef.coeff(1).is_zero());
            }
        }
    }

    #[test]
    fn group_laws() {
        let g = AffineGroupElement::new(int(1), int(2)).unwrap();
        let h = AffineGroupElement::new(int(1), int(1)).unwrap();
        assert_eq!(g.compose(&h), AffineGroupElement::new(int(5), int(2)).unwrap());
        assert_eq!(g.compose(&AffineGroupElement::identity()), g);
        assert_eq!(g.compose(&g.inverse()), AffineGroupElement::identity());
        assert!(AffineGroupElement::new(int(0), int(0)).is_err());
    }

    #[test]
    fn rep_examples() {
        let g = AffineGroupElement::new(int(1), int(2)).unwrap();
        let e = PhaseScalingState::identity(Sign::Plus);
        let st = affine_rep_compose(Sign::Plus, &g, &e).unwrap();
        assert_eq!((st.c(), st.s()), (&int(1), &int(2)));
        let st1 = PhaseScalingState::new(Sign::Plus, int(1), int(1)).unwrap();
        let out = affine_rep_compose(Sign::Plus, &g, &st1).unwrap();
        assert_eq!((out.c(), out.s()), (&int(5), &int(2)));
        assert!(affine_rep_compose(Sign::Minus, &g, &st1).is_err());
        for sign in [Sign::Plus, Sign::Minus] {
            assert!(rep_homomorphism_cases(sign, 50, 3).unwrap().iter().all(RepCase::passed));
        }
    }

    #[test]
    fn audits() {
        let a = affine_algebra();
        for q in [affine_quantization(Sign::Plus), affine_quantization(Sign::Minus), alternative_affine_quantization()] {
            let rep = basic_quantization_audit(&q, &a, 4, Exec::Sequential).unwrap();
            assert!(rep.passed(), "{}", q.name);
            assert_eq!(rep.image_rank, 2);
        }
        let sig = WeylSignature::differential();
        let corrupt = affine_quantization(Sign::Plus).with_entry(vec![0, 1], WeylElement::zero(&sig)).unwrap();
        let rep = basic_quantization_audit(&corrupt, &a, 3, Exec::Sequential).unwrap();
        assert_eq!(rep.image_rank, 1);
        assert!(!rep.passed());
        // with y ↦ 0 both sides of Q1 on (x, y) vanish
        assert!(rep.basis_q1_ok());
        let no_x = affine_quantization(Sign::Plus).with_entry(vec![1, 0], WeylElement::zero(&sig)).unwrap();
        let rep = basic_quantization_audit(&no_x, &a, 3, Exec::Sequential).unwrap();
        assert!(!rep.basis_q1_ok());
    }

    fn affine_poly() -> impl Strategy<Value = ClassicalPoly> {
        prop::collection::vec((0u32..4, 0u32..4, -4i64..5), 0..4).prop_map(|ts| {
            let s = VariableSpace::affine();
            ClassicalPoly::from_terms(&s, ts.into_iter().map(|(a, b, c)| (vec![a, b], HbarScalar::from_int(c))))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn discrepancy_antisymmetric_and_bilinear(f in affine_poly(), g in affine_poly(), h in affine_poly(), k in -3i64..4) {
            let q = alternative_affine_quantization();
            let d1 = q1_check(&q, &f, &g).unwrap();
            prop_assert_eq!(&d1, &-&q1_check(&q, &g, &f).unwrap());
            let kf = &f.scale(&HbarScalar::from_int(k)) + &h;
            let lhs = q1_check(&q, &kf, &g).unwrap();
            let rhs = &d1.scale(&HbarScalar::from_int(k)) + &q1_check(&q, &h, &g).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
