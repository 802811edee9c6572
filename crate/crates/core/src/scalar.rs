//! Exact coefficient rings: rationals, Gaussian rationals and polynomials in
//! the formal symbol ħ (rendered `h`).
//!
//! Nothing in this module touches floating point. Every value is stored in a
//! canonical form so that structural equality is mathematical equality.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always reduced with a positive denominator.
pub type Rational = BigRational;

/// Builds the rational `num/den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

/// `a + b i` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussianRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussianRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self { re, im: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::real(int(n))
    }

    /// The imaginary unit.
    pub fn i() -> Self {
        Self { re: Rational::zero(), im: Rational::one() }
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// `|z|^2`, a non-negative rational.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(Self { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }
}

impl Zero for GaussianRational {
    fn zero() -> Self {
        Self::real(Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussianRational {
    fn one() -> Self {
        Self::real(Rational::one())
    }
}

impl From<Rational> for GaussianRational {
    fn from(r: Rational) -> Self {
        Self::real(r)
    }
}

impl From<i64> for GaussianRational {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

impl<'a> Add<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn add(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn sub(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a GaussianRational> for &'a GaussianRational {
    type Output = GaussianRational;
    fn mul(self, o: &GaussianRational) -> GaussianRational {
        GaussianRational {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

impl<'a> Neg for &'a GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational { re: -self.re.clone(), im: -self.im.clone() }
    }
}

macro_rules! forward_owned {
    ($ty:ty, $($tr:ident $m:ident),*) => {$(
        impl $tr<$ty> for $ty {
            type Output = $ty;
            fn $m(self, o: $ty) -> $ty { (&self).$m(&o) }
        }
    )*};
}

forward_owned!(GaussianRational, Add add, Sub sub, Mul mul);

impl Neg for GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        -&self
    }
}

impl Div for GaussianRational {
    type Output = GaussianRational;
    fn div(self, o: GaussianRational) -> GaussianRational {
        &self * &o.inv().expect("division by zero Gaussian rational")
    }
}

/// Polynomial in ħ with Gaussian-rational coefficients.
///
/// Stored as `(degree, coefficient)` pairs with strictly increasing degrees
/// and no zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct HbarScalar {
    terms: Vec<(u32, GaussianRational)>,
}

impl HbarScalar {
    pub fn from_terms<I: IntoIterator<Item = (u32, GaussianRational)>>(it: I) -> Self {
        let mut terms: Vec<(u32, GaussianRational)> = it.into_iter().collect();
        terms.sort_by_key(|(d, _)| *d);
        let mut out: Vec<(u32, GaussianRational)> = Vec::with_capacity(terms.len());
        for (d, c) in terms {
            match out.last_mut() {
                Some((ld, lc)) if *ld == d => *lc = &*lc + &c,
                _ => out.push((d, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Self { terms: out }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial(0, c)
    }

    pub fn monomial(degree: u32, c: GaussianRational) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Self { terms: vec![(degree, c)] }
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(GaussianRational::from_int(n))
    }

    pub fn from_rational(r: Rational) -> Self {
        Self::constant(GaussianRational::real(r))
    }

    /// The symbol ħ itself.
    pub fn hbar() -> Self {
        Self::monomial(1, GaussianRational::one())
    }

    pub fn i() -> Self {
        Self::constant(GaussianRational::i())
    }

    /// `i ħ`, the commutator of a canonical quantum pair.
    pub fn i_hbar() -> Self {
        Self::monomial(1, GaussianRational::i())
    }

    pub fn terms(&self) -> &[(u32, GaussianRational)] {
        &self.terms
    }

    /// Exact zero test: true iff every coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    /// Highest power of ħ present, `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.last().map(|(d, _)| *d)
    }

    pub fn leading(&self) -> Option<&GaussianRational> {
        self.terms.last().map(|(_, c)| c)
    }

    pub fn coeff(&self, degree: u32) -> GaussianRational {
        self.terms
            .iter()
            .find(|(d, _)| *d == degree)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(GaussianRational::zero)
    }

    /// The value when ħ-free, `None` otherwise.
    pub fn as_constant(&self) -> Option<GaussianRational> {
        match self.terms.as_slice() {
            [] => Some(GaussianRational::zero()),
            [(0, c)] => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_hbar_free(&self) -> bool {
        self.terms.iter().all(|(d, _)| *d == 0)
    }

    /// Conjugates `i`; ħ is fixed.
    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(|(d, c)| (*d, c.conj())).collect() }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(d, x)| (*d, x * c)).collect() }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact division by ħ. Fails when a constant term is present.
    pub fn div_hbar(&self) -> Option<Self> {
        if self.terms.first().is_some_and(|(d, _)| *d == 0) {
            return None;
        }
        Some(Self { terms: self.terms.iter().map(|(d, c)| (d - 1, c.clone())).collect() })
    }

    /// Euclidean division as univariate polynomials in ħ over Q(i).
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lead_inv = divisor.leading().unwrap().inv().unwrap();
        let mut quotient = Vec::new();
        let mut rem = self.clone();
        while let Some(rd) = rem.degree() {
            if rd < dd {
                break;
            }
            let c = rem.leading().unwrap() * &lead_inv;
            let shift = rd - dd;
            let sub = Self {
                terms: divisor.terms.iter().map(|(d, x)| (d + shift, x * &c)).collect(),
            };
            rem = &rem - &sub;
            quotient.push((shift, c));
        }
        (Self::from_terms(quotient), rem)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => self.scale(&l.inv().unwrap()),
        }
    }

    /// Rendered atoms `(coefficient, is_imaginary, hbar_power)` in canonical
    /// order: ascending ħ power, real part before imaginary part.
    pub(crate) fn atoms(&self) -> Vec<(Rational, bool, u32)> {
        let mut out = Vec::new();
        for (d, c) in &self.terms {
            if !c.re.is_zero() {
                out.push((c.re.clone(), false, *d));
            }
            if !c.im.is_zero() {
                out.push((c.im.clone(), true, *d));
            }
        }
        out
    }
}

impl Zero for HbarScalar {
    fn zero() -> Self {
        Self { terms: Vec::new() }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for HbarScalar {
    fn one() -> Self {
        Self::from_int(1)
    }
}

impl From<GaussianRational> for HbarScalar {
    fn from(c: GaussianRational) -> Self {
        Self::constant(c)
    }
}

impl From<Rational> for HbarScalar {
    fn from(r: Rational) -> Self {
        Self::from_rational(r)
    }
}

impl From<i64> for HbarScalar {
    fn from(n: i64) -> Self {
        Self::from_int(n)
    }
}

fn merge(a: &[(u32, GaussianRational)], b: &[(u32, GaussianRational)], negate_b: bool) -> HbarScalar {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_b = |c: &GaussianRational| if negate_b { -c } else { c.clone() };
        if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i == a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, take_b(&b[j].1)));
            j += 1;
        } else {
            let s = if negate_b { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
            if !s.is_zero() {
                out.push((a[i].0, s));
            }
            i += 1;
            j += 1;
        }
    }
    HbarScalar { terms: out }
}

impl<'a> Add<&'a HbarScalar> for &'a HbarScalar {
    type Output = HbarScalar;
    fn add(self, o: &HbarScalar) -> HbarScalar {
        merge(&self.terms, &o.terms, false)
    }
}

impl<'a> Sub<&'a HbarScalar> for &'a HbarScalar {
    type Output = HbarScalar;
    fn sub(self, o: &HbarScalar) -> HbarScalar {
        merge(&self.terms, &o.terms, true)
    }
}

impl<'a> Mul<&'a HbarScalar> for &'a HbarScalar {
    type Output = HbarScalar;
    fn mul(self, o: &HbarScalar) -> HbarScalar {
        if self.is_zero() || o.is_zero() {
            return HbarScalar::zero();
        }
        if self.terms.len() == 1 && self.terms[0].0 == 0 {
            return o.scale(&self.terms[0].1);
        }
        if o.terms.len() == 1 && o.terms[0].0 == 0 {
            return self.scale(&o.terms[0].1);
        }
        let mut acc = Vec::with_capacity(self.terms.len() * o.terms.len());
        for (da, ca) in &self.terms {
            for (db, cb) in &o.terms {
                acc.push((da + db, ca * cb));
            }
        }
        HbarScalar::from_terms(acc)
    }
}

impl<'a> Neg for &'a HbarScalar {
    type Output = HbarScalar;
    fn neg(self) -> HbarScalar {
        HbarScalar { terms: self.terms.iter().map(|(d, c)| (*d, -c)).collect() }
    }
}

forward_owned!(HbarScalar, Add add, Sub sub, Mul mul);

impl Neg for HbarScalar {
    type Output = HbarScalar;
    fn neg(self) -> HbarScalar {
        -&self
    }
}

impl AddAssign<&HbarScalar> for HbarScalar {
    fn add_assign(&mut self, o: &HbarScalar) {
        *self = &*self + o;
    }
}

/// Writes one signed term: `[-]coef*i*h^k*<monomial>`. `first` controls
/// whether a positive sign is printed as ` + `.
pub(crate) fn write_term(
    f: &mut fmt::Formatter<'_>,
    first: bool,
    coef: &Rational,
    imaginary: bool,
    hpow: u32,
    monomial: &str,
) -> fmt::Result {
    let negative = coef.is_negative();
    match (first, negative) {
        (true, true) => f.write_str("-")?,
        (true, false) => {}
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
    }
    let mag = coef.abs();
    let mut parts: Vec<String> = Vec::new();
    let has_other = imaginary || hpow > 0 || !monomial.is_empty();
    if !mag.is_one() || !has_other {
        parts.push(mag.to_string());
    }
    if imaginary {
        parts.push("i".into());
    }
    match hpow {
        0 => {}
        1 => parts.push("h".into()),
        k => parts.push(format!("h^{k}")),
    }
    if !monomial.is_empty() {
        parts.push(monomial.to_string());
    }
    f.write_str(&parts.join("*"))
}

impl fmt::Display for HbarScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms = self.atoms();
        if atoms.is_empty() {
            return f.write_str("0");
        }
        for (n, (c, im, d)) in atoms.iter().enumerate() {
            write_term(f, n == 0, c, *im, *d, "")?;
        }
        Ok(())
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        HbarScalar::constant(self.clone()).fmt(f)
    }
}

/// Element of the fraction field Q(i)(ħ). Used only inside exact linear
/// solves whose matrices carry ħ.
///
/// Normalized: numerator and denominator coprime, denominator monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HbarFraction {
    num: HbarScalar,
    den: HbarScalar,
}

impl HbarFraction {
    pub fn new(num: HbarScalar, den: HbarScalar) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (mut n, _) = num.div_rem(&g);
        let (mut d, _) = den.div_rem(&g);
        let lead = d.leading().unwrap().inv().unwrap();
        n = n.scale(&lead);
        d = d.scale(&lead);
        Self { num: n, den: d }
    }

    pub fn numer(&self) -> &HbarScalar {
        &self.num
    }

    pub fn denom(&self) -> &HbarScalar {
        &self.den
    }

    /// The polynomial value when the denominator is 1.
    pub fn as_polynomial(&self) -> Option<HbarScalar> {
        self.den.is_one().then(|| self.num.clone())
    }
}

impl From<HbarScalar> for HbarFraction {
    fn from(num: HbarScalar) -> Self {
        Self { num, den: HbarScalar::one() }
    }
}

impl Zero for HbarFraction {
    fn zero() -> Self {
        Self { num: HbarScalar::zero(), den: HbarScalar::one() }
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for HbarFraction {
    fn one() -> Self {
        Self { num: HbarScalar::one(), den: HbarScalar::one() }
    }
}

impl Add for HbarFraction {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        if self.den == o.den {
            if self.den.is_one() {
                return Self { num: &self.num + &o.num, den: self.den };
            }
            return Self::new(&self.num + &o.num, self.den);
        }
        Self::new(&self.num * &o.den + &o.num * &self.den, &self.den * &o.den)
    }
}

impl Sub for HbarFraction {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        self + (-o)
    }
}

impl Neg for HbarFraction {
    type Output = Self;
    fn neg(self) -> Self {
        Self { num: -self.num, den: self.den }
    }
}

impl Mul for HbarFraction {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return Self { num: &self.num * &o.num, den: self.den };
        }
        Self::new(&self.num * &o.num, &self.den * &o.den)
    }
}

impl Div for HbarFraction {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        assert!(!o.is_zero(), "division by zero fraction");
        if self.den.is_one() && o.den.is_one() {
            if let Some(c) = o.num.as_constant() {
                return Self { num: self.num.scale(&c.inv().unwrap()), den: self.den };
            }
        }
        Self::new(&self.num * &o.den, &self.den * &o.num)
    }
}
