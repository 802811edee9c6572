//! Classical phase-space polynomials and their Poisson bracket.
//!
//! Two kinds of variable space exist. A canonical space has coordinates
//! `q1..qn, p1..pn` with
//! `{f, g} = Σ_α (∂f/∂p_α ∂g/∂q_α − ∂f/∂q_α ∂g/∂p_α)`, so `{q_α, p_α} = −1`
//! and `{pq, q²} = 2q²`. An abstract space has free commuting generators and
//! a bracket table on them, extended to all polynomials by the Leibniz rule.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{write_term, GaussianRational, HbarScalar, Rational};

/// Exponent multi-index in the name order of the owning space.
pub type Exponents = Vec<u32>;

pub type Terms = BTreeMap<Exponents, HbarScalar>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpaceMode {
    /// `n` canonical pairs; variables ordered `q1..qn, p1..pn`.
    Canonical { n: usize },
    /// Free generators with `{x_i, x_j}` stored for every ordered pair
    /// whose bracket is nonzero.
    Abstract { table: BTreeMap<(usize, usize), Terms> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableSpace {
    names: Vec<String>,
    mode: SpaceMode,
}

impl VariableSpace {
    pub fn canonical(n: usize) -> Arc<Self> {
        let mut names: Vec<String> = (1..=n).map(|a| format!("q{a}")).collect();
        names.extend((1..=n).map(|a| format!("p{a}")));
        Arc::new(Self { names, mode: SpaceMode::Canonical { n } })
    }

    /// Abstract generators whose brackets all vanish until set with
    /// [`VariableSpace::with_bracket`].
    pub fn free<S: AsRef<str>>(names: &[S]) -> Arc<Self> {
        Arc::new(Self {
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
            mode: SpaceMode::Abstract { table: BTreeMap::new() },
        })
    }

    /// Returns a copy of this abstract space with `{x_i, x_j} = value`
    /// (and `{x_j, x_i} = −value`). `value` may be written in this space or
    /// in any space with the same generator names.
    pub fn with_bracket(&self, i: usize, j: usize, value: &ClassicalPoly) -> Result<Arc<Self>> {
        let SpaceMode::Abstract { table } = &self.mode else {
            return Err(Error::Precondition("bracket tables need an abstract space".into()));
        };
        if value.space.names != self.names {
            return Err(Error::SpaceMismatch);
        }
        if i == j {
            if value.is_zero() {
                return Ok(Arc::new(self.clone()));
            }
            return Err(Error::Precondition("a generator must Poisson-commute with itself".into()));
        }
        if i >= self.names.len() || j >= self.names.len() {
            return Err(Error::Precondition("generator index out of range".into()));
        }
        let mut table = table.clone();
        table.remove(&(i, j));
        table.remove(&(j, i));
        if !value.is_zero() {
            table.insert((i, j), value.terms.clone());
            table.insert((j, i), (-value).terms);
        }
        Ok(Arc::new(Self { names: self.names.clone(), mode: SpaceMode::Abstract { table } }))
    }

    /// The affine space `R[x, y]` with `{x, y} = 2y`.
    pub fn affine() -> Arc<Self> {
        let base = Self::free(&["x", "y"]);
        let two_y = ClassicalPoly::var(&base, 1).scale(&HbarScalar::from_int(2));
        base.with_bracket(0, 1, &two_y).expect("valid affine table")
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn mode(&self) -> &SpaceMode {
        &self.mode
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn is_canonical(&self) -> bool {
        matches!(self.mode, SpaceMode::Canonical { .. })
    }

    /// Number of canonical pairs; `None` for abstract spaces.
    pub fn pairs(&self) -> Option<usize> {
        match self.mode {
            SpaceMode::Canonical { n } => Some(n),
            SpaceMode::Abstract { .. } => None,
        }
    }

    /// Jacobi identity on every generator triple of an abstract table.
    pub fn table_satisfies_jacobi(self: &Arc<Self>) -> bool {
        let n = self.nvars();
        let v = |i| ClassicalPoly::var(self, i);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let (x, y, z) = (v(a), v(b), v(c));
                    let s = &(&x.bracket(&y.bracket(&z).unwrap()).unwrap()
                        + &y.bracket(&z.bracket(&x).unwrap()).unwrap())
                        + &z.bracket(&x.bracket(&y).unwrap()).unwrap();
                    if !s.is_zero() {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn bracket_pairs(&self) -> Vec<((usize, usize), Terms)> {
        match &self.mode {
            SpaceMode::Canonical { n } => {
                let mut out = Vec::with_capacity(2 * n);
                for a in 0..*n {
                    out.push(((a, n + a), Terms::from([(vec![0; 2 * n], HbarScalar::from_int(-1))])));
                    out.push(((n + a, a), Terms::from([(vec![0; 2 * n], HbarScalar::from_int(1))])));
                }
                out
            }
            SpaceMode::Abstract { table } => table.iter().map(|(k, v)| (*k, v.clone())).collect(),
        }
    }
}

pub(crate) fn same_space(a: &Arc<VariableSpace>, b: &Arc<VariableSpace>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A polynomial over [`HbarScalar`] in the variables of a [`VariableSpace`].
#[derive(Clone, Debug)]
pub struct ClassicalPoly {
    space: Arc<VariableSpace>,
    terms: Terms,
}

impl PartialEq for ClassicalPoly {
    fn eq(&self, other: &Self) -> bool {
        same_space(&self.space, &other.space) && self.terms == other.terms
    }
}

impl Eq for ClassicalPoly {}

impl ClassicalPoly {
    pub fn zero(space: &Arc<VariableSpace>) -> Self {
        Self { space: space.clone(), terms: Terms::new() }
    }

    pub fn constant(space: &Arc<VariableSpace>, c: HbarScalar) -> Self {
        Self::from_terms(space, [(vec![0; space.nvars()], c)])
    }

    pub fn one(space: &Arc<VariableSpace>) -> Self {
        Self::constant(space, HbarScalar::one())
    }

    pub fn var(space: &Arc<VariableSpace>, idx: usize) -> Self {
        let mut e = vec![0; space.nvars()];
        e[idx] = 1;
        Self::from_terms(space, [(e, HbarScalar::one())])
    }

    pub fn var_named(space: &Arc<VariableSpace>, name: &str) -> Option<Self> {
        space.index_of(name).map(|i| Self::var(space, i))
    }

    pub fn monomial(space: &Arc<VariableSpace>, exps: Exponents, c: HbarScalar) -> Self {
        Self::from_terms(space, [(exps, c)])
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponents, HbarScalar)>>(space: &Arc<VariableSpace>, it: I) -> Self {
        let mut terms = Terms::new();
        for (e, c) in it {
            assert_eq!(e.len(), space.nvars(), "exponent length must match the space");
            add_term(&mut terms, e, c);
        }
        Self { space: space.clone(), terms }
    }

    pub fn space(&self) -> &Arc<VariableSpace> {
        &self.space
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u32]) -> HbarScalar {
        self.terms.get(exps).cloned().unwrap_or_else(HbarScalar::zero)
    }

    /// The constant coefficient when the polynomial is a constant.
    pub fn as_constant(&self) -> Option<HbarScalar> {
        match self.terms.len() {
            0 => Some(HbarScalar::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Highest total degree, `None` for zero.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    pub fn is_hbar_free(&self) -> bool {
        self.terms.values().all(HbarScalar::is_hbar_free)
    }

    pub fn scale(&self, c: &HbarScalar) -> Self {
        if c.is_zero() {
            return Self::zero(&self.space);
        }
        let terms = self.terms.iter().map(|(e, x)| (e.clone(), x * c)).filter(|(_, x)| !x.is_zero()).collect();
        Self { space: self.space.clone(), terms }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.space);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut terms = Terms::new();
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            add_term(&mut terms, e2, c.scale(&GaussianRational::from_int(e[var] as i64)));
        }
        Self { space: self.space.clone(), terms }
    }

    /// Poisson bracket `{self, other}` under the space's convention.
    pub fn bracket(&self, other: &Self) -> Result<Self> {
        if !same_space(&self.space, &other.space) {
            return Err(Error::SpaceMismatch);
        }
        let mut acc = Self::zero(&self.space);
        let nv = self.space.nvars();
        let df: Vec<Option<Self>> = (0..nv).map(|_| None).collect();
        let mut df = df;
        let mut dg: Vec<Option<Self>> = (0..nv).map(|_| None).collect();
        for ((i, j), value) in self.space.bracket_pairs() {
            let fi = df[i].get_or_insert_with(|| self.derivative(i)).clone();
            if fi.is_zero() {
                continue;
            }
            let gj = dg[j].get_or_insert_with(|| other.derivative(j)).clone();
            if gj.is_zero() {
                continue;
            }
            let v = Self { space: self.space.clone(), terms: value };
            acc = &acc + &(&(&fi * &gj) * &v);
        }
        Ok(acc)
    }

    /// Substitutes `images[k]` for variable `k`; the result lives in the
    /// images' space.
    pub fn substitute(&self, images: &[ClassicalPoly]) -> Result<ClassicalPoly> {
        if images.len() != self.space.nvars() {
            return Err(Error::DimensionMismatch { expected: self.space.nvars(), got: images.len() });
        }
        let Some(target) = images.first().map(|p| p.space.clone()) else {
            return Ok(self.clone());
        };
        if images.iter().any(|p| !same_space(&p.space, &target)) {
            return Err(Error::SpaceMismatch);
        }
        let mut acc = ClassicalPoly::zero(&target);
        for (e, c) in &self.terms {
            let mut term = ClassicalPoly::constant(&target, c.clone());
            for (k, &x) in e.iter().enumerate() {
                if x > 0 {
                    term = &term * &images[k].pow(x);
                }
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Exact value at a point of a canonical space.
    pub fn evaluate(&self, m: &PhasePoint) -> Result<HbarScalar> {
        if !self.space.is_canonical() {
            return Err(Error::CanonicalOnly);
        }
        if m.coords.len() != self.space.nvars() {
            return Err(Error::DimensionMismatch { expected: self.space.nvars(), got: m.coords.len() });
        }
        let mut acc = HbarScalar::zero();
        for (e, c) in &self.terms {
            let mut v = Rational::one();
            for (x, &k) in m.coords.iter().zip(e) {
                if k > 0 {
                    v *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += &c.scale(&GaussianRational::real(v));
        }
        Ok(acc)
    }

    /// Components `(−∂g/∂p_α(m), ∂g/∂q_α(m))`, ordered `q1..qn, p1..pn`,
    /// so that `{f, g}(m)` is the derivative of `f` along them.
    pub fn hamiltonian_vector_field(&self, m: &PhasePoint) -> Result<Vec<HbarScalar>> {
        let n = self.space.pairs().ok_or(Error::CanonicalOnly)?;
        let mut out = Vec::with_capacity(2 * n);
        for a in 0..n {
            out.push(-self.derivative(n + a).evaluate(m)?);
        }
        for a in 0..n {
            out.push(self.derivative(a).evaluate(m)?);
        }
        Ok(out)
    }

    /// Homogeneous components by total degree, ascending; zero gives none.
    pub fn grade_decompose(&self) -> Vec<(u32, ClassicalPoly)> {
        let mut by_deg: BTreeMap<u32, Terms> = BTreeMap::new();
        for (e, c) in &self.terms {
            by_deg.entry(e.iter().sum()).or_default().insert(e.clone(), c.clone());
        }
        by_deg.into_iter().map(|(d, terms)| (d, Self { space: self.space.clone(), terms })).collect()
    }

    pub(crate) fn monomial_string(space: &VariableSpace, e: &[u32]) -> String {
        let mut parts = Vec::new();
        for (name, &k) in space.names.iter().zip(e) {
            match k {
                0 => {}
                1 => parts.push(name.clone()),
                k => parts.push(format!("{name}^{k}")),
            }
        }
        parts.join("*")
    }

    /// Terms in rendering order: total degree descending, then exponent
    /// vectors descending.
    pub fn ordered_terms(&self) -> Vec<(&Exponents, &HbarScalar)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| {
            let da: u32 = a.0.iter().sum();
            let db: u32 = b.0.iter().sum();
            db.cmp(&da).then_with(|| b.0.cmp(a.0))
        });
        v
    }
}

fn add_term(terms: &mut Terms, e: Exponents, c: HbarScalar) {
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

fn check_space(a: &ClassicalPoly, b: &ClassicalPoly) {
    assert!(same_space(&a.space, &b.space), "mismatched variable spaces");
}

impl<'a> Add<&'a ClassicalPoly> for &'a ClassicalPoly {
    type Output = ClassicalPoly;
    fn add(self, o: &ClassicalPoly) -> ClassicalPoly {
        check_space(self, o);
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            add_term(&mut terms, e.clone(), c.clone());
        }
        ClassicalPoly { space: self.space.clone(), terms }
    }
}

impl<'a> Sub<&'a ClassicalPoly> for &'a ClassicalPoly {
    type Output = ClassicalPoly;
    fn sub(self, o: &ClassicalPoly) -> ClassicalPoly {
        self + &(-o)
    }
}

impl<'a> Neg for &'a ClassicalPoly {
    type Output = ClassicalPoly;
    fn neg(self) -> ClassicalPoly {
        ClassicalPoly { space: self.space.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl<'a> Mul<&'a ClassicalPoly> for &'a ClassicalPoly {
    type Output = ClassicalPoly;
    fn mul(self, o: &ClassicalPoly) -> ClassicalPoly {
        check_space(self, o);
        let mut terms = Terms::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                add_term(&mut terms, e, ca * cb);
            }
        }
        ClassicalPoly { space: self.space.clone(), terms }
    }
}

impl fmt::Display for ClassicalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.ordered_terms() {
            let mono = Self::monomial_string(&self.space, e);
            for (r, im, d) in c.atoms() {
                write_term(f, first, &r, im, d, &mono)?;
                first = false;
            }
        }
        Ok(())
    }
}

/// A rational point of a canonical phase space, coordinates ordered
/// `q1..qn, p1..pn`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhasePoint {
    pub coords: Vec<Rational>,
}

impl PhasePoint {
    pub fn new(coords: Vec<Rational>) -> Self {
        Self { coords }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self { coords: v.iter().map(|&x| crate::scalar::int(x)).collect() }
    }
}

/// `ad_f^k g`, with `ad_f h = {f, h}`.
pub fn ad_power(f: &ClassicalPoly, g: &ClassicalPoly, k: u32) -> Result<ClassicalPoly> {
    if !same_space(&f.space, &g.space) {
        return Err(Error::SpaceMismatch);
    }
    let mut acc = g.clone();
    for _ in 0..k {
        if acc.is_zero() {
            break;
        }
        acc = f.bracket(&acc)?;
    }
    Ok(acc)
}

/// Checks `X_{ad_f^{k−1}(g^k)}(m) = k! {f,g}(m)^{k−1} X_g(m)` exactly.
/// Requires `g(m) = 0`.
pub fn ad_power_point_identity_check(f: &ClassicalPoly, g: &ClassicalPoly, k: u32, m: &PhasePoint) -> Result<bool> {
    if k < 2 {
        return Err(Error::Precondition("k must be at least 2".into()));
    }
    if !g.evaluate(m)?.is_zero() {
        return Err(Error::Precondition("g(m) must vanish".into()));
    }
    let lhs = ad_power(f, &g.pow(k), k - 1)?.hamiltonian_vector_field(m)?;
    let bracket_at_m = f.bracket(g)?.evaluate(m)?;
    let factorial: i64 = (1..=k as i64).product();
    let factor = &HbarScalar::from_int(factorial) * &bracket_at_m.pow(k - 1);
    let rhs: Vec<HbarScalar> = g.hamiltonian_vector_field(m)?.iter().map(|x| &factor * x).collect();
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};
    use proptest::prelude::*;

    fn canon1() -> (Arc<VariableSpace>, ClassicalPoly, ClassicalPoly) {
        let s = VariableSpace::canonical(1);
        let q = ClassicalPoly::var(&s, 0);
        let p = ClassicalPoly::var(&s, 1);
        (s, q, p)
    }

    fn c(n: i64) -> HbarScalar {
        HbarScalar::from_int(n)
    }

    #[test]
    fn affine_generator_bracket() {
        let (_, q, p) = canon1();
        let x = &p * &q;
        let y = q.pow(2);
        assert_eq!(x.bracket(&y).unwrap(), y.scale(&c(2)));
        assert!(x.bracket(&x).unwrap().is_zero());
        assert_eq!(q.bracket(&p).unwrap().as_constant(), Some(c(-1)));
    }

    #[test]
    fn mismatched_spaces_rejected() {
        let (_, q, _) = canon1();
        let other = ClassicalPoly::var(&VariableSpace::canonical(2), 0);
        assert_eq!(q.bracket(&other), Err(Error::SpaceMismatch));
    }

    #[test]
    fn hamiltonian_field_of_q_squared() {
        let (_, q, _) = canon1();
        let x = q.pow(2).hamiltonian_vector_field(&PhasePoint::from_ints(&[3, 0])).unwrap();
        assert_eq!(x, vec![c(0), c(6)]);
        let k = ClassicalPoly::constant(q.space(), c(7));
        let z = k.hamiltonian_vector_field(&PhasePoint::from_ints(&[1, 2])).unwrap();
        assert!(z.iter().all(HbarScalar::is_zero));
        let abs = ClassicalPoly::var(&VariableSpace::affine(), 0);
        assert_eq!(abs.hamiltonian_vector_field(&PhasePoint::from_ints(&[1, 1])), Err(Error::CanonicalOnly));
    }

    #[test]
    fn evaluation() {
        let (s, q, p) = canon1();
        assert_eq!((&q.pow(2) * &p).evaluate(&PhasePoint::from_ints(&[2, 3])).unwrap(), c(12));
        assert_eq!(ClassicalPoly::one(&s).evaluate(&PhasePoint::from_ints(&[5, 9])).unwrap(), c(1));
        assert!((&q + &p).pow(2).evaluate(&PhasePoint::from_ints(&[1, -1])).unwrap().is_zero());
        assert!(matches!(q.evaluate(&PhasePoint::from_ints(&[1])), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn ad_powers() {
        let (_, q, p) = canon1();
        assert_eq!(ad_power(&p, &q.pow(3), 1).unwrap(), q.pow(2).scale(&c(3)));
        assert_eq!(ad_power(&p, &q, 0).unwrap(), q);
        let a = VariableSpace::affine();
        let x = ClassicalPoly::var(&a, 0);
        let y = ClassicalPoly::var(&a, 1);
        assert_eq!(ad_power(&x, &y, 2).unwrap(), y.scale(&c(4)));
    }

    #[test]
    fn grading() {
        let a = VariableSpace::affine();
        let x = ClassicalPoly::var(&a, 0);
        let y = ClassicalPoly::var(&a, 1);
        let f = &(&x.pow(2) * &y) + &x;
        let parts = f.grade_decompose();
        assert_eq!(parts, vec![(1, x.clone()), (3, &x.pow(2) * &y)]);
        assert!(ClassicalPoly::zero(&a).grade_decompose().is_empty());
        assert_eq!((&x * &y).grade_decompose().len(), 1);
    }

    #[test]
    fn point_identity_examples() {
        let (s, q, p) = canon1();
        assert!(ad_power_point_identity_check(&p, &q, 2, &PhasePoint::from_ints(&[0, 5])).unwrap());
        for k in 2..5 {
            assert!(ad_power_point_identity_check(&q, &q, k, &PhasePoint::from_ints(&[0, 7])).unwrap());
        }
        let g = &q + &ClassicalPoly::one(&s);
        assert!(matches!(
            ad_power_point_identity_check(&p, &g, 2, &PhasePoint::from_ints(&[0, 0])),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn rendering() {
        let s = VariableSpace::canonical(2);
        let q1 = ClassicalPoly::var(&s, 0);
        let p1 = ClassicalPoly::var(&s, 2);
        let p2 = ClassicalPoly::var(&s, 3);
        let f = &(&q1.pow(2) * &p2) + &p1;
        assert_eq!(f.to_string(), "q1^2*p2 + p1");
        let g = &p1.scale(&HbarScalar::from_rational(rat(-1, 2))) + &ClassicalPoly::constant(&s, HbarScalar::i_hbar());
        assert_eq!(g.to_string(), "-1/2*p1 + i*h");
    }

    #[test]
    fn derivative_oracle_for_field() {
        // X_g(m) against hand partials for g = q1^2 p2 + q2 p1^3 at (1, 2, -1, 3)
        let s = VariableSpace::canonical(2);
        let v = |i| ClassicalPoly::var(&s, i);
        let g = &(&v(0).pow(2) * &v(3)) + &(&v(1) * &v(2).pow(3));
        let m = PhasePoint::from_ints(&[1, 2, -1, 3]);
        // dg/dq1 = 2 q1 p2 = 6, dg/dq2 = p1^3 = -1, dg/dp1 = 3 q2 p1^2 = 6, dg/dp2 = q1^2 = 1
        assert_eq!(g.hamiltonian_vector_field(&m).unwrap(), vec![c(-6), c(-1), c(6), c(-1)]);
    }

    fn poly_strategy(n: usize, max_deg: u32) -> impl Strategy<Value = ClassicalPoly> {
        let nv = 2 * n;
        proptest::collection::vec(
            (proptest::collection::vec(0..=max_deg, nv), -5i64..=5),
            0..5,
        )
        .prop_map(move |ts| {
            let s = VariableSpace::canonical(n);
            ClassicalPoly::from_terms(
                &s,
                ts.into_iter().filter(|(e, _)| e.iter().sum::<u32>() <= max_deg).map(|(e, k)| (e, HbarScalar::from_int(k))),
            )
        })
    }

    fn affine_poly() -> impl Strategy<Value = ClassicalPoly> {
        proptest::collection::vec(((0u32..4), (0u32..4), -4i64..=4), 0..4).prop_map(|ts| {
            let a = VariableSpace::affine();
            ClassicalPoly::from_terms(&a, ts.into_iter().map(|(i, j, k)| (vec![i, j], HbarScalar::from_int(k))))
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn poisson_axioms(f in poly_strategy(2, 3), g in poly_strategy(2, 3), h in poly_strategy(2, 3)) {
            let fg = f.bracket(&g).unwrap();
            prop_assert_eq!(fg.clone(), -&g.bracket(&f).unwrap());
            let jac = &(&f.bracket(&g.bracket(&h).unwrap()).unwrap() + &g.bracket(&h.bracket(&f).unwrap()).unwrap())
                + &h.bracket(&fg).unwrap();
            prop_assert!(jac.is_zero());
            let leib = &(&f.bracket(&g).unwrap() * &h) + &(&g * &f.bracket(&h).unwrap());
            prop_assert_eq!(f.bracket(&(&g * &h)).unwrap(), leib);
        }

        #[test]
        fn abstract_axioms(f in affine_poly(), g in affine_poly(), h in affine_poly()) {
            let jac = &(&f.bracket(&g.bracket(&h).unwrap()).unwrap() + &g.bracket(&h.bracket(&f).unwrap()).unwrap())
                + &h.bracket(&f.bracket(&g).unwrap()).unwrap();
            prop_assert!(jac.is_zero());
            prop_assert_eq!(f.bracket(&g).unwrap(), -&g.bracket(&f).unwrap());
        }

        #[test]
        fn field_is_directional_derivative(f in poly_strategy(1, 3), g in poly_strategy(1, 3), a in -4i64..4, b in -4i64..4) {
            let m = PhasePoint::new(vec![int(a), int(b)]);
            let x = g.hamiltonian_vector_field(&m).unwrap();
            let grad = [f.derivative(0).evaluate(&m).unwrap(), f.derivative(1).evaluate(&m).unwrap()];
            let dot = &(&grad[0] * &x[0]) + &(&grad[1] * &x[1]);
            prop_assert_eq!(dot, f.bracket(&g).unwrap().evaluate(&m).unwrap());
        }
    }
}
