//! Finite-dimensional Lie algebras of classical polynomials.
//!
//! All linear algebra here is exact over Q(i); ħ-dependent coefficients are
//! rejected since a basic algebra consists of classical observables.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, sparse_rows, Rref, SparseSpan, SparseVec};
use crate::phasepoly::{same_space, ClassicalPoly, Exponents, PhasePoint, VariableSpace};
use crate::scalar::{rat, GaussianRational, HbarScalar};

type Gq = GaussianRational;

/// `c_{ij}^k` with `{b_i, b_j} = Σ_k c_{ij}^k b_k`, zero-based indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    dim: usize,
    data: Vec<Gq>,
}

impl StructureConstants {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Gq::zero(); dim * dim * dim] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Gq {
        &self.data[(i * self.dim + j) * self.dim + k]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, v: Gq) {
        self.data[(i * self.dim + j) * self.dim + k] = v;
    }

    /// Antisymmetry and the Jacobi relation on the tensor itself.
    pub fn is_lie(&self) -> bool {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if *self.get(i, j, k) != -self.get(j, i, k) {
                        return false;
                    }
                }
            }
        }
        // Σ_l (c_ij^l c_lk^m + c_jk^l c_li^m + c_ki^l c_lj^m) = 0
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for m in 0..n {
                        let mut s = Gq::zero();
                        for l in 0..n {
                            s = s + self.get(i, j, l) * self.get(l, k, m)
                                + self.get(j, k, l) * self.get(l, i, m)
                                + self.get(k, i, l) * self.get(l, j, m);
                        }
                        if !s.is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Nonzero entries as `(i, j, k, value)` with `i < j`.
    pub fn nonzero(&self) -> Vec<(usize, usize, usize, Gq)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    if !v.is_zero() {
                        out.push((i, j, k, v.clone()));
                    }
                }
            }
        }
        out
    }
}

fn classical_vector(f: &ClassicalPoly) -> Result<SparseVec<Exponents, Gq>> {
    f.terms()
        .iter()
        .map(|(e, c)| c.as_constant().map(|g| (e.clone(), g)).ok_or_else(|| Error::HbarInLie(f.to_string())))
        .collect()
}

fn poly_from_coords(space: &Arc<VariableSpace>, basis: &[ClassicalPoly], x: &[Gq]) -> ClassicalPoly {
    let mut acc = ClassicalPoly::zero(space);
    for (b, c) in basis.iter().zip(x) {
        if !c.is_zero() {
            acc = &acc + &b.scale(&HbarScalar::constant(c.clone()));
        }
    }
    acc
}

/// A closed, linearly independent basis of classical polynomials together
/// with its structure constants.
#[derive(Clone, Debug)]
pub struct FinLieAlgebra {
    space: Arc<VariableSpace>,
    basis: Vec<ClassicalPoly>,
    span: SparseSpan<Exponents, Gq>,
    constants: StructureConstants,
}

#[derive(Clone, Debug)]
pub enum Closure {
    Closed(FinLieAlgebra),
    /// The span grew past the cap.
    CapExceeded { dim: usize },
}

impl Closure {
    pub fn algebra(self) -> Option<FinLieAlgebra> {
        match self {
            Closure::Closed(a) => Some(a),
            Closure::CapExceeded { .. } => None,
        }
    }
}

pub const DEFAULT_DIM_CAP: usize = 64;

/// Puts the constant `1` first when constants lie in the span, dropping
/// whichever later element becomes dependent.
fn normalize_constants_first(space: &Arc<VariableSpace>, basis: Vec<ClassicalPoly>) -> Result<Vec<ClassicalPoly>> {
    let one = ClassicalPoly::one(space);
    let mut span = SparseSpan::new();
    for b in &basis {
        span.insert(&classical_vector(b)?);
    }
    if !span.contains(&classical_vector(&one)?) || basis.first() == Some(&one) {
        return Ok(basis);
    }
    let mut out = vec![one.clone()];
    let mut fresh = SparseSpan::new();
    fresh.insert(&classical_vector(&one)?);
    for b in basis {
        if fresh.insert(&classical_vector(&b)?) {
            out.push(b);
        }
    }
    Ok(out)
}

/// Smallest bracket-closed span containing the generators.
pub fn close_under_bracket(generators: &[ClassicalPoly], dim_cap: usize) -> Result<Closure> {
    let Some(space) = generators.first().map(|g| g.space().clone()) else {
        return Err(Error::Precondition("at least one generator".into()));
    };
    if generators.iter().any(|g| !same_space(g.space(), &space)) {
        return Err(Error::SpaceMismatch);
    }
    let mut span: SparseSpan<Exponents, Gq> = SparseSpan::new();
    let mut basis: Vec<ClassicalPoly> = Vec::new();
    for g in generators {
        if span.insert(&classical_vector(g)?) {
            basis.push(g.clone());
        }
    }
    if basis.len() > dim_cap {
        return Ok(Closure::CapExceeded { dim: basis.len() });
    }
    // bracket every new element against everything before it
    let mut done = 0;
    while done < basis.len() {
        let j = done;
        for i in 0..j {
            let br = basis[i].bracket(&basis[j])?;
            if span.insert(&classical_vector(&br)?) {
                basis.push(br);
                if basis.len() > dim_cap {
                    return Ok(Closure::CapExceeded { dim: basis.len() });
                }
            }
        }
        done += 1;
    }
    let basis = normalize_constants_first(&space, basis)?;
    Ok(Closure::Closed(FinLieAlgebra::from_basis(basis)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesKind {
    AscendingCentral,
    Derived,
}

/// Dimensions along a series. Ascending-central lists `b^1, b^2, …`;
/// derived lists `g, [g,g], …`. Both stop when the dimension repeats or
/// the series terminates.
#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub kind: SeriesKind,
    pub dims: Vec<usize>,
    /// Index into `dims` of the last entry (where the series became stationary).
    pub stabilized_at: usize,
    #[serde(skip)]
    pub subspaces: Vec<Vec<Vec<Gq>>>,
}

impl SeriesReport {
    pub fn last_dim(&self) -> usize {
        self.dims.last().copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoInvariants {
    pub dimension: usize,
    pub derived_dims: Vec<usize>,
    pub ascending_dims: Vec<usize>,
    pub derived_subalgebra_dim: usize,
    pub nilpotency_class: Option<usize>,
}

impl IsoInvariants {
    /// Differing records certify non-isomorphism; equal records say nothing.
    pub fn certifies_non_isomorphic(&self, other: &Self) -> bool {
        self != other
    }
}

fn dense_basis(rows: Vec<SparseVec<usize, Gq>>, n: usize) -> Vec<Vec<Gq>> {
    Rref::new(rows, n)
        .rows
        .into_iter()
        .map(|(_, r)| {
            let mut v = vec![Gq::zero(); n];
            for (k, x) in r {
                v[k] = x;
            }
            v
        })
        .collect()
}

impl FinLieAlgebra {
    /// Validates independence, ħ-freeness and closure, and computes the
    /// structure constants.
    pub fn from_basis(basis: Vec<ClassicalPoly>) -> Result<Self> {
        let Some(space) = basis.first().map(|b| b.space().clone()) else {
            return Err(Error::Precondition("empty basis".into()));
        };
        if basis.iter().any(|b| !same_space(b.space(), &space)) {
            return Err(Error::SpaceMismatch);
        }
        let mut span = SparseSpan::new();
        for b in &basis {
            if !span.insert(&classical_vector(b)?) {
                return Err(Error::DependentBasis);
            }
        }
        let n = basis.len();
        let mut constants = StructureConstants::zeros(n);
        for i in 0..n {
            for j in i + 1..n {
                let br = basis[i].bracket(&basis[j])?;
                let coords = span
                    .coordinates(&classical_vector(&br)?)
                    .ok_or_else(|| Error::NotClosed(format!("{{{}, {}}}", basis[i], basis[j])))?;
                for (k, c) in coords.into_iter().enumerate() {
                    constants.set(j, i, k, -c.clone());
                    constants.set(i, j, k, c);
                }
            }
        }
        Ok(Self { space, basis, span, constants })
    }

    pub fn space(&self) -> &Arc<VariableSpace> {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ClassicalPoly] {
        &self.basis
    }

    pub fn structure_constants(&self) -> &StructureConstants {
        &self.constants
    }

    /// Coordinates of `f` in the basis, `None` outside the span.
    pub fn coordinates(&self, f: &ClassicalPoly) -> Result<Option<Vec<Gq>>> {
        if !same_space(f.space(), &self.space) {
            return Err(Error::SpaceMismatch);
        }
        Ok(self.span.coordinates(&classical_vector(f)?))
    }

    pub fn element(&self, x: &[Gq]) -> ClassicalPoly {
        poly_from_coords(&self.space, &self.basis, x)
    }

    /// Bracket of two coordinate vectors.
    pub fn bracket_coords(&self, u: &[Gq], v: &[Gq]) -> Vec<Gq> {
        let n = self.dim();
        let mut out = vec![Gq::zero(); n];
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if v[j].is_zero() {
                    continue;
                }
                let uv = &u[i] * &v[j];
                for (k, slot) in out.iter_mut().enumerate() {
                    let c = self.constants.get(i, j, k);
                    if !c.is_zero() {
                        *slot = &*slot + &(&uv * c);
                    }
                }
            }
        }
        out
    }

    /// `ad(b_i)` as a matrix acting on coordinate columns:
    /// `M[m][k] = c_{ik}^m`.
    pub fn adjoint_matrix(&self, i: usize) -> Vec<Vec<Gq>> {
        let n = self.dim();
        (0..n).map(|m| (0..n).map(|k| self.constants.get(i, k, m).clone()).collect()).collect()
    }

    pub fn adjoint_matrices(&self) -> Vec<Vec<Vec<Gq>>> {
        (0..self.dim()).map(|i| self.adjoint_matrix(i)).collect()
    }

    /// `c_{ij}^k = 0` whenever `k ≥ min{i, j}` (same condition zero-based).
    pub fn is_jordan_holder(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| (i.min(j)..n).all(|k| self.constants.get(i, j, k).is_zero())))
    }

    pub fn series(&self, kind: SeriesKind) -> SeriesReport {
        match kind {
            SeriesKind::AscendingCentral => self.ascending_central(),
            SeriesKind::Derived => self.derived(),
        }
    }

    fn ascending_central(&self) -> SeriesReport {
        let n = self.dim();
        let mut cur: Vec<Vec<Gq>> = Vec::new();
        let mut dims = Vec::new();
        let mut subspaces = Vec::new();
        loop {
            // functionals vanishing on the current term
            let phis = linalg::nullspace(sparse_rows(&cur), n);
            let mut rows = Vec::new();
            for i in 0..n {
                for phi in &phis {
                    let row: Vec<Gq> = (0..n)
                        .map(|k| (0..n).fold(Gq::zero(), |a, m| a + self.constants.get(i, k, m) * &phi[m]))
                        .collect();
                    rows.push(row);
                }
            }
            let next = dense_basis(sparse_rows(&linalg::nullspace(sparse_rows(&rows), n)), n);
            if next.len() == cur.len() && !dims.is_empty() {
                break;
            }
            dims.push(next.len());
            subspaces.push(next.clone());
            let full = next.len() == n;
            let stalled = next.len() == cur.len();
            cur = next;
            if full || stalled {
                break;
            }
        }
        SeriesReport { kind: SeriesKind::AscendingCentral, stabilized_at: dims.len() - 1, dims, subspaces }
    }

    fn derived(&self) -> SeriesReport {
        let n = self.dim();
        let mut cur: Vec<Vec<Gq>> =
            (0..n).map(|i| (0..n).map(|k| if k == i { Gq::one() } else { Gq::zero() }).collect()).collect();
        let mut dims = vec![n];
        let mut subspaces = vec![cur.clone()];
        while !cur.is_empty() {
            let mut brs = Vec::new();
            for a in 0..cur.len() {
                for b in a + 1..cur.len() {
                    brs.push(self.bracket_coords(&cur[a], &cur[b]));
                }
            }
            let next = dense_basis(sparse_rows(&brs), n);
            if next.len() == cur.len() {
                break;
            }
            dims.push(next.len());
            subspaces.push(next.clone());
            cur = next;
        }
        SeriesReport { kind: SeriesKind::Derived, stabilized_at: dims.len() - 1, dims, subspaces }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.ascending_central().last_dim() == self.dim()
    }

    pub fn is_solvable(&self) -> bool {
        self.derived().last_dim() == 0
    }

    /// Length of the ascending central series when nilpotent.
    pub fn nilpotency_class(&self) -> Option<usize> {
        let s = self.ascending_central();
        (s.last_dim() == self.dim()).then_some(s.dims.len())
    }

    /// Smallest `N` with `x ∈ b^{N+1}`, for an element given in coordinates.
    pub fn nildegree_coords(&self, x: &[Gq]) -> Result<usize> {
        let s = self.ascending_central();
        if s.last_dim() != self.dim() {
            return Err(Error::NotNilpotent);
        }
        if x.iter().all(Zero::is_zero) {
            return Ok(0);
        }
        for (idx, sub) in s.subspaces.iter().enumerate() {
            let mut rows = sub.clone();
            let r0 = linalg::rank(sparse_rows(&rows), self.dim());
            rows.push(x.to_vec());
            if linalg::rank(sparse_rows(&rows), self.dim()) == r0 {
                return Ok(idx);
            }
        }
        unreachable!("the last term is the whole algebra")
    }

    pub fn nildegree_basis(&self, i: usize) -> Result<usize> {
        let e: Vec<Gq> = (0..self.dim()).map(|k| if k == i { Gq::one() } else { Gq::zero() }).collect();
        self.nildegree_coords(&e)
    }

    /// Smallest `N` such that every `(N+1)`-fold composition of `ad(b_i)`
    /// kills `f`, searching up to `bound`.
    pub fn nildegree_poly(&self, f: &ClassicalPoly, bound: usize) -> Result<usize> {
        if !same_space(f.space(), &self.space) {
            return Err(Error::SpaceMismatch);
        }
        let mut layer = vec![f.clone()];
        if f.is_zero() {
            return Ok(0);
        }
        for t in 0..=bound {
            let mut span: SparseSpan<Exponents, Gq> = SparseSpan::new();
            let mut next = Vec::new();
            for g in &layer {
                for b in &self.basis {
                    let h = b.bracket(g)?;
                    if span.insert(&classical_vector(&h)?) {
                        next.push(h);
                    }
                }
            }
            if next.is_empty() {
                return Ok(t);
            }
            layer = next;
        }
        Err(Error::BoundExceeded(bound))
    }

    pub fn iso_invariants(&self) -> IsoInvariants {
        let derived = self.derived();
        let ascending = self.ascending_central();
        IsoInvariants {
            dimension: self.dim(),
            derived_subalgebra_dim: derived.dims.get(1).copied().unwrap_or(0),
            nilpotency_class: (ascending.last_dim() == self.dim()).then_some(ascending.dims.len()),
            derived_dims: derived.dims,
            ascending_dims: ascending.dims,
        }
    }

    /// Rank of the Hamiltonian vector fields of the basis at `m`.
    pub fn transitivity_rank(&self, m: &PhasePoint) -> Result<usize> {
        let pairs = self.space.pairs().ok_or(Error::CanonicalOnly)?;
        let mut rows = Vec::with_capacity(self.dim());
        for b in &self.basis {
            let x = b.hamiltonian_vector_field(m)?;
            let row: Vec<Gq> = x
                .iter()
                .map(|v| v.as_constant().ok_or_else(|| Error::HbarInLie(b.to_string())))
                .collect::<Result<_>>()?;
            rows.push(row);
        }
        Ok(linalg::rank(sparse_rows(&rows), 2 * pairs))
    }

    /// True iff every pair is told apart by some basis element. A sampled
    /// necessary condition only.
    pub fn separating_sample_check(&self, pairs: &[(PhasePoint, PhasePoint)]) -> Result<bool> {
        for (a, b) in pairs {
            if a == b {
                return Err(Error::Precondition("coincident points in a pair".into()));
            }
            let mut separated = false;
            for f in &self.basis {
                if f.evaluate(a)? != f.evaluate(b)? {
                    separated = true;
                    break;
                }
            }
            if !separated {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Abstract space `b1..bK` in which witness expressions are written.
    pub fn basis_space(&self) -> Arc<VariableSpace> {
        let names: Vec<String> = (1..=self.dim()).map(|k| format!("b{k}")).collect();
        VariableSpace::free(&names)
    }
}

/// Rational sample points, reproducible from `seed`. With `positive_q` the
/// `q` coordinates are drawn from `q > 0`.
pub fn sample_points(pairs: usize, count: usize, seed: u64, positive_q: bool) -> Vec<PhasePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coords = (0..2 * pairs)
                .map(|k| {
                    let den = rng.gen_range(1..=4);
                    let num = if positive_q && k < pairs { rng.gen_range(1..=12) } else { rng.gen_range(-9..=9) };
                    rat(num, den)
                })
                .collect();
            PhasePoint::new(coords)
        })
        .collect()
}

/// Pairs of distinct sample points.
pub fn sample_point_pairs(pairs: usize, count: usize, seed: u64, positive_q: bool) -> Vec<(PhasePoint, PhasePoint)> {
    let pts = sample_points(pairs, 4 * count + 4, seed, positive_q);
    pts.chunks(2).filter(|c| c[0] != c[1]).take(count).map(|c| (c[0].clone(), c[1].clone())).collect()
}

/// Kernel intersection for a family of nilpotent matrices.
///
/// Returns a nonzero vector killed by every operator, `None` when the
/// underlying space is zero.
pub fn engel_common_annihilator(ops: &[Vec<Vec<Gq>>], dim: usize) -> Result<Option<Vec<Gq>>> {
    for (idx, op) in ops.iter().enumerate() {
        if op.len() != dim || op.iter().any(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: op.len() });
        }
        if !is_nilpotent_matrix(op) {
            return Err(Error::NonNilpotentOperator(idx));
        }
    }
    if dim == 0 {
        return Ok(None);
    }
    let rows: Vec<Vec<Gq>> = ops.iter().flat_map(|op| op.iter().cloned()).collect();
    let kernel = linalg::nullspace(sparse_rows(&rows), dim);
    kernel.into_iter().next().map(Some).ok_or(Error::NoCommonAnnihilator)
}

fn mat_mul(a: &[Vec<Gq>], b: &[Vec<Gq>]) -> Vec<Vec<Gq>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).fold(Gq::zero(), |s, k| s + &a[i][k] * &b[k][j])).collect())
        .collect()
}

pub fn is_nilpotent_matrix(m: &[Vec<Gq>]) -> bool {
    let n = m.len();
    let mut p = m.to_vec();
    for _ in 1..n.max(1) {
        p = mat_mul(&p, m);
    }
    p.iter().all(|r| r.iter().all(Zero::is_zero))
}

/// Membership in the normal form
/// `φ_0 p_1 + φ_1(q_1) p_2 + ⋯ + φ_{n−1}(q_1..q_{n−1}) p_n + φ_n(q_1..q_n)`.
pub fn triangular_form_check(f: &ClassicalPoly) -> Result<bool> {
    let n = f.space().pairs().ok_or(Error::CanonicalOnly)?;
    for e in f.terms().keys() {
        let ps = &e[n..];
        let p_degree: u32 = ps.iter().sum();
        if p_degree == 0 {
            continue;
        }
        if p_degree > 1 {
            return Ok(false);
        }
        let alpha = ps.iter().position(|&x| x == 1).unwrap();
        if e[alpha..n].iter().any(|&x| x > 0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A claimed expression of a canonical coordinate as a polynomial in the
/// basis elements, written in [`FinLieAlgebra::basis_space`].
#[derive(Clone, Debug)]
pub struct Witness {
    pub target: ClassicalPoly,
    pub expression: ClassicalPoly,
}

/// Per-witness verdicts.
pub fn witness_results(algebra: &FinLieAlgebra, witnesses: &[Witness]) -> Result<Vec<bool>> {
    let space = algebra.space();
    space.pairs().ok_or(Error::CanonicalOnly)?;
    witnesses
        .iter()
        .map(|w| {
            if !same_space(w.target.space(), space) {
                return Err(Error::MalformedWitness("target outside the algebra's space".into()));
            }
            let is_coordinate = w.target.terms().len() == 1 && {
                let (e, c) = w.target.terms().iter().next().unwrap();
                c.is_one() && e.iter().sum::<u32>() == 1
            };
            if !is_coordinate {
                return Err(Error::MalformedWitness(format!("target {} is not a coordinate", w.target)));
            }
            if w.expression.space().nvars() != algebra.dim() || w.expression.space().is_canonical() {
                return Err(Error::MalformedWitness("expression must use b1..bK".into()));
            }
            Ok(w.expression.substitute(algebra.basis())? == w.target)
        })
        .collect()
}

pub fn canonical_witness_verify(algebra: &FinLieAlgebra, witnesses: &[Witness]) -> Result<bool> {
    Ok(witness_results(algebra, witnesses)?.into_iter().all(|b| b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gq(n: i64) -> Gq {
        Gq::from_int(n)
    }

    fn example5() -> FinLieAlgebra {
        let s = VariableSpace::canonical(2);
        let v = |i| ClassicalPoly::var(&s, i);
        let gens = vec![v(0), v(3), &(&v(0) * &v(3)) + &v(1), v(2), ClassicalPoly::one(&s)];
        close_under_bracket(&gens, DEFAULT_DIM_CAP).unwrap().algebra().unwrap()
    }

    fn heisenberg(n: usize) -> FinLieAlgebra {
        let s = VariableSpace::canonical(n);
        let gens: Vec<_> = (0..2 * n).map(|i| ClassicalPoly::var(&s, i)).collect();
        close_under_bracket(&gens, DEFAULT_DIM_CAP).unwrap().algebra().unwrap()
    }

    fn affine_canonical() -> FinLieAlgebra {
        let s = VariableSpace::canonical(1);
        let q = ClassicalPoly::var(&s, 0);
        let p = ClassicalPoly::var(&s, 1);
        close_under_bracket(&[&p * &q, q.pow(2)], DEFAULT_DIM_CAP).unwrap().algebra().unwrap()
    }

    #[test]
    fn closures() {
        assert_eq!(affine_canonical().dim(), 2);
        let h2 = heisenberg(1);
        assert_eq!(h2.dim(), 3);
        assert_eq!(h2.basis()[0], ClassicalPoly::one(h2.space()));
        let e5 = example5();
        assert_eq!(e5.dim(), 5);
        assert_eq!(e5.basis()[0], ClassicalPoly::one(e5.space()));
    }

    #[test]
    fn cap_exceeded_for_cubics() {
        let s = VariableSpace::canonical(1);
        let q = ClassicalPoly::var(&s, 0);
        let p = ClassicalPoly::var(&s, 1);
        let out = close_under_bracket(&[q.pow(3), p.pow(3)], 20).unwrap();
        assert!(matches!(out, Closure::CapExceeded { .. }));
    }

    #[test]
    fn structure_constant_examples() {
        let h2 = heisenberg(1); // (1, q, p)
        let c = h2.structure_constants();
        assert_eq!(c.get(1, 2, 0), &gq(-1));
        assert!(c.get(1, 2, 1).is_zero() && c.get(1, 2, 2).is_zero());
        let a = FinLieAlgebra::from_basis(vec![
            ClassicalPoly::var(&VariableSpace::affine(), 0),
            ClassicalPoly::var(&VariableSpace::affine(), 1),
        ])
        .unwrap();
        assert_eq!(a.structure_constants().get(0, 1, 1), &gq(2));
        assert!(a.structure_constants().is_lie());
        assert!(example5().is_jordan_holder());
        assert!(example5().structure_constants().is_lie());
    }

    #[test]
    fn example5_brackets() {
        // basis order (1, q1, p2, q1 p2 + q2, p1)
        let e = example5();
        let nz: Vec<(usize, usize)> = e.structure_constants().nonzero().iter().map(|(i, j, _, _)| (*i, *j)).collect();
        let mut pairs = nz.clone();
        pairs.dedup();
        assert_eq!(pairs, vec![(1, 4), (2, 3), (3, 4)]);
    }

    #[test]
    fn series_examples() {
        let e = example5();
        let asc = e.series(SeriesKind::AscendingCentral);
        assert_eq!(asc.dims, vec![1, 3, 5]);
        assert!(e.is_nilpotent());
        assert_eq!(e.nilpotency_class(), Some(3));
        let a = affine_canonical();
        assert_eq!(a.series(SeriesKind::Derived).dims, vec![2, 1, 0]);
        assert!(a.is_solvable());
        assert!(!a.is_nilpotent());
        assert_eq!(a.series(SeriesKind::AscendingCentral).dims, vec![0]);
        let s = VariableSpace::canonical(2);
        let ab = FinLieAlgebra::from_basis(vec![ClassicalPoly::var(&s, 0), ClassicalPoly::var(&s, 1)]).unwrap();
        assert_eq!(ab.series(SeriesKind::AscendingCentral).dims, vec![2]);
    }

    #[test]
    fn nildegrees() {
        let e = example5();
        let degs: Vec<usize> = (0..5).map(|i| e.nildegree_basis(i).unwrap()).collect();
        assert_eq!(degs, vec![0, 1, 1, 2, 2]);
        for (i, b) in e.basis().iter().enumerate() {
            assert_eq!(e.nildegree_poly(b, 10).unwrap(), degs[i]);
        }
        assert_eq!(affine_canonical().nildegree_basis(0), Err(Error::NotNilpotent));
    }

    #[test]
    fn engel_examples() {
        let h2 = heisenberg(1);
        let v = engel_common_annihilator(&h2.adjoint_matrices(), 3).unwrap().unwrap();
        assert_eq!(v, vec![gq(1), gq(0), gq(0)]);
        let e = example5();
        let v = engel_common_annihilator(&e.adjoint_matrices(), 5).unwrap().unwrap();
        assert!(v[1..].iter().all(Zero::is_zero) && !v[0].is_zero());
        let v = engel_common_annihilator(&[vec![vec![gq(0)]]], 1).unwrap().unwrap();
        assert_eq!(v, vec![gq(1)]);
        assert_eq!(engel_common_annihilator(&[], 0).unwrap(), None);
        let not_nil = vec![vec![gq(1), gq(0)], vec![gq(0), gq(0)]];
        assert_eq!(engel_common_annihilator(&[not_nil], 2), Err(Error::NonNilpotentOperator(0)));
    }

    #[test]
    fn transitivity() {
        let h2 = heisenberg(1);
        assert_eq!(h2.transitivity_rank(&PhasePoint::from_ints(&[3, -2])).unwrap(), 2);
        let a = affine_canonical();
        assert_eq!(a.transitivity_rank(&PhasePoint::from_ints(&[1, 1])).unwrap(), 2);
        assert!(a.transitivity_rank(&PhasePoint::from_ints(&[0, 1])).unwrap() <= 1);
        let e = example5();
        for m in sample_points(2, 5, 0, false) {
            assert_eq!(e.transitivity_rank(&m).unwrap(), 4);
        }
    }

    #[test]
    fn separation() {
        let h2 = heisenberg(1);
        assert!(h2.separating_sample_check(&sample_point_pairs(1, 10, 1, false)).unwrap());
        let s = VariableSpace::canonical(1);
        let only_q = FinLieAlgebra::from_basis(vec![ClassicalPoly::var(&s, 0)]).unwrap();
        let pair = (PhasePoint::from_ints(&[0, 0]), PhasePoint::from_ints(&[0, 1]));
        assert!(!only_q.separating_sample_check(&[pair.clone()]).unwrap());
        assert!(affine_canonical().separating_sample_check(&sample_point_pairs(1, 20, 0, true)).unwrap());
        let same = (pair.0.clone(), pair.0.clone());
        assert!(matches!(only_q.separating_sample_check(&[same]), Err(Error::Precondition(_))));
    }

    #[test]
    fn invariants_distinguish_example_from_h4() {
        let e = example5().iso_invariants();
        let h4 = heisenberg(2).iso_invariants();
        assert_eq!(e.derived_subalgebra_dim, 2);
        assert_eq!(h4.derived_subalgebra_dim, 1);
        assert!(e.certifies_non_isomorphic(&h4));
    }

    #[test]
    fn triangular_forms() {
        let s = VariableSpace::canonical(2);
        let v = |i| ClassicalPoly::var(&s, i);
        let f = &(&v(2) + &(&v(0) * &v(3))) + &(&v(0) * &v(1));
        assert!(triangular_form_check(&f).unwrap());
        assert!(!triangular_form_check(&(&v(1) * &v(2))).unwrap());
        assert!(!triangular_form_check(&(&v(2) * &v(3))).unwrap());
        for b in example5().basis() {
            assert!(triangular_form_check(b).unwrap());
        }
    }

    #[test]
    fn witnesses() {
        let e = example5();
        let bs = e.basis_space();
        let b = |i| ClassicalPoly::var(&bs, i);
        let q2 = ClassicalPoly::var(e.space(), 1);
        let good = Witness { target: q2.clone(), expression: &b(3) - &(&b(1) * &b(2)) };
        assert!(canonical_witness_verify(&e, &[good]).unwrap());
        let bad = Witness { target: q2.clone(), expression: b(3) };
        assert!(!canonical_witness_verify(&e, &[bad]).unwrap());
        let malformed = Witness { target: q2.scale(&HbarScalar::from_int(2)), expression: b(3) };
        assert!(matches!(canonical_witness_verify(&e, &[malformed]), Err(Error::MalformedWitness(_))));
        let h4 = heisenberg(2);
        let hs = h4.basis_space();
        let ws: Vec<Witness> = (0..4)
            .map(|i| {
                let target = ClassicalPoly::var(h4.space(), i);
                let k = h4.coordinates(&target).unwrap().unwrap().iter().position(|c| !c.is_zero()).unwrap();
                Witness { target, expression: ClassicalPoly::var(&hs, k) }
            })
            .collect();
        assert!(canonical_witness_verify(&h4, &ws).unwrap());
    }

    #[test]
    fn rejects_hbar() {
        let s = VariableSpace::canonical(1);
        let q = ClassicalPoly::var(&s, 0).scale(&HbarScalar::hbar());
        assert!(matches!(FinLieAlgebra::from_basis(vec![q]), Err(Error::HbarInLie(_))));
    }
}
