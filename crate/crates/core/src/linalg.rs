//! Exact sparse linear algebra over a field.
//!
//! Vectors are sparse maps from an ordered key to a nonzero entry. Two tools
//! live here: [`SparseSpan`], an incremental echelon basis that also tracks
//! how each row was built from the inserted vectors, and [`Rref`], a full
//! reduced row-echelon form used for ranks, kernels and particular solutions.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::scalar::{GaussianRational, HbarFraction};

pub trait Field:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
}

impl Field for GaussianRational {}
impl Field for HbarFraction {}

pub type SparseVec<K, F> = BTreeMap<K, F>;

/// `acc += c * v`, dropping entries that cancel.
pub fn axpy<K: Ord + Clone, F: Field>(acc: &mut SparseVec<K, F>, c: &F, v: &SparseVec<K, F>) {
    if c.is_zero() {
        return;
    }
    for (k, x) in v {
        let term = c.clone() * x.clone();
        match acc.get_mut(k) {
            Some(e) => {
                let s = e.clone() + term;
                if s.is_zero() {
                    acc.remove(k);
                } else {
                    *e = s;
                }
            }
            None => {
                acc.insert(k.clone(), term);
            }
        }
    }
}

#[derive(Clone, Debug)]
struct SpanRow<K, F> {
    pivot: K,
    vector: SparseVec<K, F>,
    combo: Vec<F>,
}

/// Incremental echelon basis of the span of inserted vectors.
#[derive(Clone, Debug)]
pub struct SparseSpan<K, F> {
    rows: Vec<SpanRow<K, F>>,
    inserted: usize,
}

impl<K: Ord + Clone + Debug, F: Field> Default for SparseSpan<K, F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone + Debug, F: Field> SparseSpan<K, F> {
    pub fn new() -> Self {
        Self { rows: Vec::new(), inserted: 0 }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; returns the remainder and the
    /// coefficients `a` (over inserted vectors) with `v = Σ a_j v_j + rem`.
    fn reduce(&self, v: &SparseVec<K, F>) -> (SparseVec<K, F>, Vec<F>) {
        let mut rem = v.clone();
        let mut combo = vec![F::zero(); self.inserted];
        for row in &self.rows {
            if let Some(c) = rem.get(&row.pivot).cloned() {
                axpy(&mut rem, &(-c.clone()), &row.vector);
                for (slot, t) in combo.iter_mut().zip(&row.combo) {
                    *slot = slot.clone() + c.clone() * t.clone();
                }
            }
        }
        (rem, combo)
    }

    pub fn contains(&self, v: &SparseVec<K, F>) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Inserts `v`; returns false (and leaves the span unchanged) when `v`
    /// is already in the span.
    pub fn insert(&mut self, v: &SparseVec<K, F>) -> bool {
        let (rem, combo) = self.reduce(v);
        let Some((pivot, lead)) = rem.iter().next().map(|(k, x)| (k.clone(), x.clone())) else {
            return false;
        };
        let inv = F::one() / lead;
        let mut vector = SparseVec::new();
        axpy(&mut vector, &inv, &rem);
        // row = (v - Σ combo_j v_j) / lead, as a combination of inserted vectors
        let mut row_combo: Vec<F> = combo.into_iter().map(|c| -(c * inv.clone())).collect();
        row_combo.push(inv);
        for r in &mut self.rows {
            r.combo.push(F::zero());
        }
        self.inserted += 1;
        self.rows.push(SpanRow { pivot, vector, combo: row_combo });
        true
    }

    /// Coefficients of `v` over the inserted (independent) vectors, in
    /// insertion order; `None` if `v` is outside the span.
    pub fn coordinates(&self, v: &SparseVec<K, F>) -> Option<Vec<F>> {
        let (rem, combo) = self.reduce(v);
        rem.is_empty().then_some(combo)
    }
}

/// Reduced row-echelon form of a matrix with `ncols` columns.
#[derive(Clone, Debug)]
pub struct Rref<F> {
    pub ncols: usize,
    /// Nonzero rows, each with a unit pivot; pivots strictly increasing.
    pub rows: Vec<(usize, SparseVec<usize, F>)>,
}

impl<F: Field> Rref<F> {
    pub fn new(rows: Vec<SparseVec<usize, F>>, ncols: usize) -> Self {
        let mut pending: Vec<SparseVec<usize, F>> = rows.into_iter().filter(|r| !r.is_empty()).collect();
        let mut done: Vec<(usize, SparseVec<usize, F>)> = Vec::new();
        for col in 0..ncols {
            // prefer the sparsest row carrying this column to limit fill-in
            let Some(idx) = pending
                .iter()
                .enumerate()
                .filter(|(_, r)| r.contains_key(&col) && r.keys().next() == Some(&col))
                .min_by_key(|(_, r)| r.len())
                .map(|(i, _)| i)
            else {
                continue;
            };
            let mut pivot_row = pending.swap_remove(idx);
            let inv = F::one() / pivot_row[&col].clone();
            for x in pivot_row.values_mut() {
                *x = x.clone() * inv.clone();
            }
            for r in pending.iter_mut() {
                if let Some(c) = r.get(&col).cloned() {
                    axpy(r, &(-c), &pivot_row);
                }
            }
            pending.retain(|r| !r.is_empty());
            for (_, r) in done.iter_mut() {
                if let Some(c) = r.get(&col).cloned() {
                    axpy(r, &(-c), &pivot_row);
                }
            }
            done.push((col, pivot_row));
        }
        debug_assert!(pending.is_empty());
        Self { ncols, rows: done }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|(p, _)| *p).collect()
    }

    /// Basis of the kernel, one vector per free column (free entry 1).
    pub fn nullspace(&self) -> Vec<Vec<F>> {
        let pivots = self.pivots();
        let free: Vec<usize> = (0..self.ncols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![F::zero(); self.ncols];
                v[fc] = F::one();
                for (p, row) in &self.rows {
                    if let Some(x) = row.get(&fc) {
                        v[*p] = -x.clone();
                    }
                }
                v
            })
            .collect()
    }
}

pub fn rank<F: Field>(rows: Vec<SparseVec<usize, F>>, ncols: usize) -> usize {
    Rref::new(rows, ncols).rank()
}

pub fn nullspace<F: Field>(rows: Vec<SparseVec<usize, F>>, ncols: usize) -> Vec<Vec<F>> {
    Rref::new(rows, ncols).nullspace()
}

/// A particular solution of `A x = b` with free variables set to zero.
pub fn solve<F: Field>(rows: Vec<SparseVec<usize, F>>, rhs: Vec<F>, ncols: usize) -> Option<Vec<F>> {
    assert_eq!(rows.len(), rhs.len());
    // augmented column `ncols`
    let aug: Vec<SparseVec<usize, F>> = rows
        .into_iter()
        .zip(rhs)
        .map(|(mut r, b)| {
            if !b.is_zero() {
                r.insert(ncols, b);
            }
            r
        })
        .collect();
    let rref = Rref::new(aug, ncols + 1);
    if rref.pivots().contains(&ncols) {
        return None;
    }
    let mut x = vec![F::zero(); ncols];
    for (p, row) in &rref.rows {
        if let Some(b) = row.get(&ncols) {
            x[*p] = b.clone();
        }
    }
    Some(x)
}

/// Dense rows to sparse rows.
pub fn sparse_rows<F: Field>(dense: &[Vec<F>]) -> Vec<SparseVec<usize, F>> {
    dense
        .iter()
        .map(|r| r.iter().enumerate().filter(|(_, x)| !x.is_zero()).map(|(i, x)| (i, x.clone())).collect())
        .collect()
}
