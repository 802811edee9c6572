//! Test-side oracles, written against the primitive relations only
//! (`w_α z_α = z_α w_α − κ_α`, pairs commute) and never calling the
//! engine's product, symmetrization or quantization code.

#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use polyquant::scalar::{GaussianRational, HbarScalar, Rational};
use polyquant::weyl::{GenKind, Generator, WeylElement, WeylSignature};

/// A noncommutative polynomial kept as a sum of unreduced words.
pub type WordSum = Vec<(Vec<Generator>, HbarScalar)>;

pub fn z(pair: usize) -> Generator {
    Generator { pair, kind: GenKind::Z }
}

pub fn w(pair: usize) -> Generator {
    Generator { pair, kind: GenKind::W }
}

/// Normal order by repeated adjacent swaps. The resulting monomials are
/// read off by counting letters, so only `WeylElement::monomial` (a
/// constructor) and addition are used from the engine.
pub fn normal_order(sig: &Arc<WeylSignature>, sum: &WordSum) -> WeylElement {
    let k = sig.pairs();
    let mut pending: WordSum = sum.clone();
    let mut acc = WeylElement::zero(sig);
    while let Some((word, c)) = pending.pop() {
        let bad = (0..word.len().saturating_sub(1))
            .find(|&i| word[i].kind == GenKind::W && word[i + 1].kind == GenKind::Z);
        match bad {
            None => {
                let mut e = vec![0; 2 * k];
                for g in &word {
                    match g.kind {
                        GenKind::Z => e[g.pair] += 1,
                        GenKind::W => e[k + g.pair] += 1,
                    }
                }
                acc = &acc + &WeylElement::monomial(sig, e, c);
            }
            Some(i) => {
                let mut swapped = word.clone();
                swapped.swap(i, i + 1);
                if word[i].pair == word[i + 1].pair {
                    let mut shorter = word.clone();
                    shorter.drain(i..i + 2);
                    pending.push((shorter, &c * &(-&sig.kappa()[word[i].pair])));
                }
                pending.push((swapped, c));
            }
        }
    }
    acc
}

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
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

pub fn frac(n: i64, d: i64) -> HbarScalar {
    HbarScalar::from_rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
}

/// `(1/n!) Σ_σ word_σ`, unreduced.
pub fn symmetrized_words(word: &[Generator]) -> WordSum {
    let perms = permutations(word.len());
    let weight = HbarScalar::from_rational(Rational::new(BigInt::one(), BigInt::from(perms.len())));
    perms.iter().map(|p| (p.iter().map(|&i| word[i]).collect(), weight.clone())).collect()
}

pub fn brute_symmetrize(sig: &Arc<WeylSignature>, word: &[Generator]) -> WeylElement {
    normal_order(sig, &symmetrized_words(word))
}

pub fn scale_words(a: &WordSum, c: &HbarScalar) -> WordSum {
    a.iter().map(|(w, x)| (w.clone(), x * c)).collect()
}

/// `a b − b a` by concatenation.
pub fn commutator_words(a: &WordSum, b: &WordSum) -> WordSum {
    let mut out = Vec::new();
    for (wa, ca) in a {
        for (wb, cb) in b {
            let mut ab = wa.clone();
            ab.extend_from_slice(wb);
            out.push((ab, ca * cb));
            let mut ba = wb.clone();
            ba.extend_from_slice(wa);
            out.push((ba, -&(ca * cb)));
        }
    }
    out
}

/// Weyl image of `q^a p^b` as symmetrized words in one pair.
pub fn weyl_words(a: usize, b: usize) -> WordSum {
    let mut word = vec![z(0); a];
    word.extend(std::iter::repeat(w(0)).take(b));
    symmetrized_words(&word)
}

/// The cubic obstruction computed entirely on words:
/// `(i/ħ)((1/9)[S(z³), S(w³)] − (1/3)[S(z²w), S(zw²)])`.
pub fn groenewold_oracle() -> WeylElement {
    let sig = WeylSignature::quantum(1);
    let a = commutator_words(&weyl_words(3, 0), &weyl_words(0, 3));
    let b = commutator_words(&weyl_words(2, 1), &weyl_words(1, 2));
    let mut sum = scale_words(&a, &frac(1, 9));
    sum.extend(scale_words(&b, &frac(-1, 3)));
    let normal = normal_order(&sig, &sum);
    let terms = normal.terms().iter().map(|(e, c)| {
        let q = c.div_hbar().expect("commutators carry a factor of h");
        (e.clone(), &q * &HbarScalar::constant(GaussianRational::i()))
    });
    WeylElement::from_terms(&sig, terms.collect::<Vec<_>>())
}

/// Phase/argument oracle for the representation: a transform is held as
/// the polynomials `E(q)` (phase exponent over `iμ·sign`) and `A(q)`
/// (argument), stored as coefficient vectors in `q`. `U(ν,λ)` maps them
/// to `ν q² + E(λq)` and `A(λq)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Transform {
    pub exponent: Vec<Rational>,
    pub argument: Vec<Rational>,
}

impl Transform {
    pub fn identity() -> Self {
        let r = |n: i64| Rational::from_integer(BigInt::from(n));
        Self { exponent: vec![r(0); 3], argument: vec![r(0), r(1)] }
    }

    pub fn apply(&self, nu: &Rational, lambda: &Rational) -> Self {
        let subst = |v: &[Rational]| -> Vec<Rational> {
            v.iter().enumerate().map(|(k, c)| c * num_traits::pow(lambda.clone(), k)).collect()
        };
        let mut exponent = subst(&self.exponent);
        exponent[2] = &exponent[2] + nu;
        Self { exponent, argument: subst(&self.argument) }
    }

    /// `(c, s)`: coefficient of `q²` in the exponent and of `q` in the argument.
    pub fn state(&self) -> (Rational, Rational) {
        (self.exponent[2].clone(), self.argument[1].clone())
    }
}
