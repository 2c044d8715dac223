//! Exact Laurent polynomials in `q`, truncated series in `q⁻¹`, and rational
//! functions in `q`.
//!
//! Everything here is generic over an integer coefficient type `C`; the crate
//! root exports the arbitrary-precision aliases used by the rest of the code.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_integer::Integer;
use num_traits::{FromPrimitive, Signed, ToPrimitive};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer coefficient ring.
pub trait Coeff:
    Integer + Signed + Clone + Hash + fmt::Debug + fmt::Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

impl<T> Coeff for T where
    T: Integer + Signed + Clone + Hash + fmt::Debug + fmt::Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

fn from_i64<C: Coeff>(v: i64) -> C {
    C::from_i64(v).expect("coefficient type cannot hold value")
}

/// Sparse element of `ℤ[q, q⁻¹]`. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly<C: Coeff> {
    terms: BTreeMap<i64, C>,
}

impl<C: Coeff> LaurentPoly<C> {
    pub fn zero() -> Self {
        Self { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(0, C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(0, c)
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(from_i64(c))
    }

    /// `c·qⁿ`.
    pub fn monomial(exp: i64, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Self { terms }
    }

    /// `qⁿ`.
    pub fn q_pow(exp: i64) -> Self {
        Self::monomial(exp, C::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, C)>>(it: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in it {
            p.add_term(e, c);
        }
        p
    }

    pub fn from_int_terms(ts: &[(i64, i64)]) -> Self {
        Self::from_terms(ts.iter().map(|&(e, c)| (e, from_i64(c))))
    }

    pub fn add_term(&mut self, exp: i64, c: C) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(C::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.coeff(0).is_one()
    }

    pub fn coeff(&self, exp: i64) -> C {
        self.terms.get(&exp).cloned().unwrap_or_else(C::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &C)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn leading(&self) -> Option<(i64, &C)> {
        self.terms.iter().next_back().map(|(e, c)| (*e, c))
    }

    /// `q ↦ q⁻¹`.
    pub fn bar(&self) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect() }
    }

    pub fn is_bar_invariant(&self) -> bool {
        self.terms.iter().all(|(e, c)| self.coeff(-e) == *c)
    }

    /// Multiply by `qᵏ`.
    pub fn shift(&self, k: i64) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect() }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, x)| (*e, x.clone() * c.clone())).collect() }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Value at `q = 1`.
    pub fn eval_one(&self) -> C {
        self.terms.values().fold(C::zero(), |a, c| a + c.clone())
    }

    /// Evaluate at an integer point `q = x`; negative exponents need `x = ±1`.
    pub fn eval_int(&self, x: i64) -> Option<C> {
        let mut acc = C::zero();
        for (e, c) in &self.terms {
            let base: C = from_i64(x);
            let v = if *e >= 0 {
                num_traits::pow(base, *e as usize)
            } else if x == 1 || x == -1 {
                num_traits::pow(base, (-*e) as usize)
            } else {
                return None;
            };
            acc = acc + v * c.clone();
        }
        Some(acc)
    }

    /// Substitute `q ↦ qᵈ`.
    pub fn subs_pow(&self, d: i64) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (e * d, c.clone())).collect() }
    }

    /// Substitute `q ↦ −q`.
    pub fn negate_q(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, if e.rem_euclid(2) == 1 { -c.clone() } else { c.clone() }))
                .collect(),
        }
    }

    pub fn all_coeffs_nonneg(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Support in strictly negative exponents, i.e. membership in `q⁻¹ℤ[q⁻¹]`.
    pub fn in_neg_part(&self) -> bool {
        self.max_exp().is_none_or(|e| e < 0)
    }

    /// Membership in `δ + q⁻¹ℤ[q⁻¹]` for `δ ∈ {0, 1}`.
    pub fn is_almost_delta(&self, delta: bool) -> bool {
        if delta {
            (self - &Self::one()).in_neg_part()
        } else {
            self.in_neg_part()
        }
    }

    /// The unique bar-invariant `p` with `g − p ∈ q⁻¹ℤ[q⁻¹]`.
    pub fn bar_invariant_head(&self) -> Self {
        let mut out = Self::zero();
        for (e, c) in self.terms.range(0..) {
            out.add_term(*e, c.clone());
            if *e > 0 {
                out.add_term(-*e, c.clone());
            }
        }
        out
    }

    /// Solves `m − bar(m) = α` with `m ∈ q⁻¹ℤ[q⁻¹]`.
    pub fn antisym_negative_part(&self) -> Result<Self> {
        if self.bar() != -self {
            return Err(Error::NotAntisymmetric(self.to_string()));
        }
        Ok(Self { terms: self.terms.range(..0).map(|(e, c)| (*e, c.clone())).collect() })
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> LaurentPoly<D> {
        LaurentPoly::from_terms(self.terms.iter().map(|(e, c)| (*e, f(c))))
    }

    /// Exact division; `None` if `d` does not divide `self` in `ℤ[q, q⁻¹]`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let (dmax, dlead) = d.leading().map(|(e, c)| (e, c.clone())).unwrap();
        let dmin = d.min_exp().unwrap();
        let mut rem = self.clone();
        let mut quo = Self::zero();
        while let Some((rmax, rlead)) = rem.leading().map(|(e, c)| (e, c.clone())) {
            if rmax - dmax < rem.min_exp().unwrap() - dmin {
                return None;
            }
            let (qc, r) = rlead.div_rem(&dlead);
            if !r.is_zero() {
                return None;
            }
            let t = Self::monomial(rmax - dmax, qc);
            rem = &rem - &(&t * d);
            quo = &quo + &t;
        }
        Some(quo)
    }

    /// Content (gcd of coefficients, nonnegative).
    pub fn content(&self) -> C {
        self.terms.values().fold(C::zero(), |g, c| g.gcd(c))
    }

    /// Render as `c*q^n` terms joined by `+`, exponent ascending.
    pub fn to_csv_string(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms.iter().map(|(e, c)| format!("{c}*q^{e}")).collect::<Vec<_>>().join("+")
    }
}

impl<C: Coeff> fmt::Display for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let unit = a.is_one();
            match (*e, unit) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{a}q")?,
                (e, true) => write!(f, "q^{e}")?,
                (e, false) => write!(f, "{a}q^{e}")?,
            }
        }
        Ok(())
    }
}

impl<C: Coeff> fmt::Debug for LaurentPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident) => {
        impl<C: Coeff> $tr<LaurentPoly<C>> for LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $m(self, rhs: LaurentPoly<C>) -> LaurentPoly<C> {
                (&self).$m(&rhs)
            }
        }
        impl<C: Coeff> $tr<&LaurentPoly<C>> for LaurentPoly<C> {
            type Output = LaurentPoly<C>;
            fn $m(self, rhs: &LaurentPoly<C>) -> LaurentPoly<C> {
                (&self).$m(rhs)
            }
        }
    };
}

impl<C: Coeff> Add<&LaurentPoly<C>> for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn add(self, rhs: &LaurentPoly<C>) -> LaurentPoly<C> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl<C: Coeff> Sub<&LaurentPoly<C>> for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn sub(self, rhs: &LaurentPoly<C>) -> LaurentPoly<C> {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl<C: Coeff> Mul<&LaurentPoly<C>> for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn mul(self, rhs: &LaurentPoly<C>) -> LaurentPoly<C> {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1.clone() * c2.clone());
            }
        }
        out
    }
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl<C: Coeff> Neg for &LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        LaurentPoly { terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }
}

impl<C: Coeff> Neg for LaurentPoly<C> {
    type Output = LaurentPoly<C>;
    fn neg(self) -> LaurentPoly<C> {
        -&self
    }
}

impl<C: Coeff> AddAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn add_assign(&mut self, rhs: &LaurentPoly<C>) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, c.clone());
        }
    }
}

impl<C: Coeff> SubAssign<&LaurentPoly<C>> for LaurentPoly<C> {
    fn sub_assign(&mut self, rhs: &LaurentPoly<C>) {
        for (e, c) in &rhs.terms {
            self.add_term(*e, -c.clone());
        }
    }
}

// JSON: {"terms": [[exp, coeff], ...]}; coefficients that overflow i64 are strings.
impl<C: Coeff> Serialize for LaurentPoly<C> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        struct Terms<'a, C: Coeff>(&'a BTreeMap<i64, C>);
        impl<C: Coeff> Serialize for Terms<'_, C> {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                let mut seq = s.serialize_seq(Some(self.0.len()))?;
                for (e, c) in self.0 {
                    match c.to_i64() {
                        Some(v) => seq.serialize_element(&(e, v))?,
                        None => seq.serialize_element(&(e, c.to_string()))?,
                    }
                }
                seq.end()
            }
        }
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LaurentPoly", 1)?;
        st.serialize_field("terms", &Terms(&self.terms))?;
        st.end()
    }
}

impl<'de, C: Coeff> Deserialize<'de> for LaurentPoly<C> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Num {
            Int(i64),
            Str(String),
        }
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            terms: Vec<(i64, Num)>,
        }
        let raw = Raw::deserialize(d)?;
        let mut p = LaurentPoly::zero();
        for (e, n) in raw.terms {
            let c = match n {
                Num::Int(v) => from_i64(v),
                Num::Str(s) => C::from_str_radix(&s, 10).map_err(|_| de::Error::custom(format!("bad coefficient {s:?}")))?,
            };
            p.add_term(e, c);
        }
        Ok(p)
    }
}

/// Balanced quantum integer `[a] = (qᵃ − q⁻ᵃ)/(q − q⁻¹)`.
pub fn qint<C: Coeff>(a: i64) -> Result<LaurentPoly<C>> {
    if a < 0 {
        return Err(Error::NegativeArgument(a));
    }
    Ok(LaurentPoly::from_terms((0..a).map(|k| (a - 1 - 2 * k, C::one()))))
}

/// `[n]_{q^d}` for any integer `n`, with `[−n] = −[n]`.
pub fn qint_at<C: Coeff>(n: i64, d: i64) -> LaurentPoly<C> {
    let v = qint::<C>(n.abs()).expect("nonnegative").subs_pow(d);
    if n < 0 {
        -v
    } else {
        v
    }
}

/// `[n]_{q^d}!`.
pub fn qfact_at<C: Coeff>(n: i64, d: i64) -> Result<LaurentPoly<C>> {
    Ok(qfact::<C>(n)?.subs_pow(d))
}

pub fn qfact<C: Coeff>(a: i64) -> Result<LaurentPoly<C>> {
    if a < 0 {
        return Err(Error::NegativeArgument(a));
    }
    let mut acc = LaurentPoly::one();
    for k in 1..=a {
        acc = &acc * &qint(k)?;
    }
    Ok(acc)
}

/// Gaussian binomial via the q-Pascal rule `[n,k] = q^{n-k}[n-1,k-1] + q^{-k}[n-1,k]`.
pub fn qbinom<C: Coeff>(n: i64, k: i64) -> Result<LaurentPoly<C>> {
    if n < 0 || k < 0 || k > n {
        return Err(Error::NegativeArgument(if n < 0 { n } else if k < 0 { k } else { n - k }));
    }
    let mut row = vec![LaurentPoly::<C>::one()];
    for m in 1..=n {
        let mut next = Vec::with_capacity(m as usize + 1);
        for j in 0..=m {
            let mut v = LaurentPoly::zero();
            if j >= 1 {
                v += &row[(j - 1) as usize].shift(m - j);
            }
            if j < m {
                v += &row[j as usize].shift(-j);
            }
            next.push(v);
        }
        row = next;
    }
    Ok(row.swap_remove(k as usize))
}

/// Element of `ℤ((q⁻¹))` known up to a finite window.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct LaurentTail<C: Coeff> {
    pub poly_part: LaurentPoly<C>,
    /// Exponents below `−truncation_order` are discarded.
    pub truncation_order: i64,
    /// True when some term was actually dropped.
    pub truncated: bool,
}

/// Outcome of a predicate decided on a finite window.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct WindowVerdict {
    pub holds: bool,
    pub window: i64,
}

impl<C: Coeff> LaurentTail<C> {
    pub const DEFAULT_ORDER: i64 = 32;

    pub fn new(p: LaurentPoly<C>, truncation_order: i64) -> Self {
        let truncated = p.min_exp().is_some_and(|m| m < -truncation_order);
        let poly_part = LaurentPoly::from_terms(p.terms().filter(|(e, _)| *e >= -truncation_order).map(|(e, c)| (e, c.clone())));
        Self { poly_part, truncation_order, truncated }
    }

    /// Sum of a geometric-style family `Σ_k c_k q^{e_k}`, dropping terms past the window.
    pub fn from_terms<I: IntoIterator<Item = (i64, C)>>(it: I, truncation_order: i64) -> Self {
        let mut p = LaurentPoly::zero();
        let mut truncated = false;
        for (e, c) in it {
            if e < -truncation_order {
                truncated |= !c.is_zero();
            } else {
                p.add_term(e, c);
            }
        }
        Self { poly_part: p, truncation_order, truncated }
    }

    pub fn add(&self, other: &Self) -> Self {
        let t = self.truncation_order.min(other.truncation_order);
        let mut out = Self::new(&self.poly_part + &other.poly_part, t);
        out.truncated |= self.truncated || other.truncated;
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let t = self.truncation_order.min(other.truncation_order);
        let mut out = Self::new(&self.poly_part * &other.poly_part, t);
        out.truncated |= self.truncated || other.truncated;
        out
    }

    /// `∈ q⁻¹ℤ[[q⁻¹]]`, decided on the stored window.
    pub fn in_neg_series(&self) -> WindowVerdict {
        WindowVerdict { holds: self.poly_part.in_neg_part(), window: self.truncation_order }
    }

    /// `∈ 1 + q⁻¹ℤ[[q⁻¹]]`.
    pub fn in_one_plus_neg_series(&self) -> WindowVerdict {
        WindowVerdict { holds: self.poly_part.is_almost_delta(true), window: self.truncation_order }
    }

    pub fn nonneg_coeffs(&self) -> WindowVerdict {
        WindowVerdict { holds: self.poly_part.all_coeffs_nonneg(), window: self.truncation_order }
    }
}

// ---------------------------------------------------------------------------
// Dense polynomials in ℤ[q] (ascending coefficients) used for gcds.

fn trim<C: Coeff>(v: &mut Vec<C>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn dense_content<C: Coeff>(v: &[C]) -> C {
    v.iter().fold(C::zero(), |g, c| g.gcd(c))
}

fn dense_primitive<C: Coeff>(v: &[C]) -> Vec<C> {
    let g = dense_content(v);
    if g.is_zero() {
        return v.to_vec();
    }
    let mut out: Vec<C> = v.iter().map(|c| c.div_floor(&g)).collect();
    if out.last().is_some_and(|c| c.is_negative()) {
        out.iter_mut().for_each(|c| *c = -c.clone());
    }
    out
}

/// Pseudo-remainder of `a` by `b` (b nonzero).
fn prem<C: Coeff>(a: &[C], b: &[C]) -> Vec<C> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b[db].clone();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        for c in r.iter_mut() {
            *c = c.clone() * lb.clone();
        }
        for (i, bc) in b.iter().enumerate() {
            let idx = dr - db + i;
            r[idx] = r[idx].clone() - lr.clone() * bc.clone();
        }
        trim(&mut r);
    }
    r
}

/// Gcd in `ℤ[q]` via the primitive remainder sequence; result primitive with positive lead,
/// times the gcd of contents.
fn dense_gcd<C: Coeff>(a: &[C], b: &[C]) -> Vec<C> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    if a.is_empty() {
        return dense_primitive(&b).into_iter().map(|c| c * dense_content(&b)).collect();
    }
    if b.is_empty() {
        return dense_primitive(&a).into_iter().map(|c| c * dense_content(&a)).collect();
    }
    let cg = dense_content(&a).gcd(&dense_content(&b));
    let mut x = dense_primitive(&a);
    let mut y = dense_primitive(&b);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = prem(&x, &y);
        x = y;
        y = if r.is_empty() { r } else { dense_primitive(&r) };
    }
    dense_primitive(&x).into_iter().map(|c| c * cg.clone()).collect()
}

fn to_dense<C: Coeff>(p: &LaurentPoly<C>) -> (i64, Vec<C>) {
    let lo = p.min_exp().unwrap_or(0);
    let hi = p.max_exp().unwrap_or(0);
    let mut v = vec![C::zero(); (hi - lo + 1) as usize];
    for (e, c) in p.terms() {
        v[(e - lo) as usize] = c.clone();
    }
    trim(&mut v);
    (lo, v)
}

fn from_dense<C: Coeff>(v: Vec<C>) -> LaurentPoly<C> {
    LaurentPoly::from_terms(v.into_iter().enumerate().map(|(i, c)| (i as i64, c)))
}

/// Gcd of two Laurent polynomials, normalized to min exponent 0 and positive lead.
pub fn poly_gcd<C: Coeff>(a: &LaurentPoly<C>, b: &LaurentPoly<C>) -> LaurentPoly<C> {
    let (_, da) = to_dense(a);
    let (_, db) = to_dense(b);
    from_dense(dense_gcd(&da, &db))
}

/// Element of `ℚ(q)` as a reduced fraction of Laurent polynomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QRatio<C: Coeff> {
    num: LaurentPoly<C>,
    den: LaurentPoly<C>,
}

impl<C: Coeff> QRatio<C> {
    pub fn new(num: LaurentPoly<C>, den: LaurentPoly<C>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize(num, den))
    }

    fn normalize(num: LaurentPoly<C>, den: LaurentPoly<C>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        // Move all q-powers into the numerator so the denominator is a polynomial with nonzero constant term.
        let s = den.min_exp().unwrap();
        let den = den.shift(-s);
        let num = num.shift(-s);
        let ns = num.min_exp().unwrap();
        let (_, dn) = to_dense(&num.shift(-ns));
        let (_, dd) = to_dense(&den);
        let g = dense_gcd(&dn, &dd);
        let mut num = num;
        let mut den = den;
        if !(g.len() == 1 && g[0].is_one()) {
            let gp = from_dense(g);
            num = num.div_exact(&gp).expect("gcd divides numerator");
            den = den.div_exact(&gp).expect("gcd divides denominator");
            let s2 = den.min_exp().unwrap();
            den = den.shift(-s2);
            num = num.shift(-s2);
        }
        if den.leading().unwrap().1.is_negative() {
            num = -num;
            den = -den;
        }
        Self { num, den }
    }

    pub fn zero() -> Self {
        Self { num: LaurentPoly::zero(), den: LaurentPoly::one() }
    }

    pub fn one() -> Self {
        Self::from_poly(LaurentPoly::one())
    }

    pub fn from_poly(p: LaurentPoly<C>) -> Self {
        Self { num: p, den: LaurentPoly::one() }
    }

    pub fn from_int(c: i64) -> Self {
        Self::from_poly(LaurentPoly::from_int(c))
    }

    pub fn numer(&self) -> &LaurentPoly<C> {
        &self.num
    }

    pub fn denom(&self) -> &LaurentPoly<C> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num.is_one()
    }

    /// The Laurent polynomial this equals, if any.
    pub fn as_poly(&self) -> Option<LaurentPoly<C>> {
        if self.den.is_one() {
            Some(self.num.clone())
        } else {
            // den has min exponent 0; it is a unit only if it is ±1
            None
        }
    }

    pub fn bar(&self) -> Self {
        Self::normalize(self.num.bar(), self.den.bar())
    }

    pub fn inv(&self) -> Result<Self> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &Self) -> Result<Self> {
        Ok(self * &o.inv()?)
    }

    pub fn scale_poly(&self, p: &LaurentPoly<C>) -> Self {
        Self::normalize(&self.num * p, self.den.clone())
    }
}

impl<C: Coeff> From<LaurentPoly<C>> for QRatio<C> {
    fn from(p: LaurentPoly<C>) -> Self {
        Self::from_poly(p)
    }
}

impl<C: Coeff> Add<&QRatio<C>> for &QRatio<C> {
    type Output = QRatio<C>;
    fn add(self, o: &QRatio<C>) -> QRatio<C> {
        if self.den == o.den {
            return QRatio::normalize(&self.num + &o.num, self.den.clone());
        }
        QRatio::normalize(&(&self.num * &o.den) + &(&o.num * &self.den), &self.den * &o.den)
    }
}

impl<C: Coeff> Sub<&QRatio<C>> for &QRatio<C> {
    type Output = QRatio<C>;
    fn sub(self, o: &QRatio<C>) -> QRatio<C> {
        self + &(-o)
    }
}

impl<C: Coeff> Mul<&QRatio<C>> for &QRatio<C> {
    type Output = QRatio<C>;
    fn mul(self, o: &QRatio<C>) -> QRatio<C> {
        if self.is_zero() || o.is_zero() {
            return QRatio::zero();
        }
        QRatio::normalize(&self.num * &o.num, &self.den * &o.den)
    }
}

impl<C: Coeff> Neg for &QRatio<C> {
    type Output = QRatio<C>;
    fn neg(self) -> QRatio<C> {
        QRatio { num: -&self.num, den: self.den.clone() }
    }
}

impl<C: Coeff> Neg for QRatio<C> {
    type Output = QRatio<C>;
    fn neg(self) -> QRatio<C> {
        -&self
    }
}

impl<C: Coeff> fmt::Display for QRatio<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl<C: Coeff> fmt::Debug for QRatio<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QRatio({self})")
    }
}

impl<C: Coeff> Serialize for QRatio<C> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("QRatio", 2)?;
        st.serialize_field("numerator", &self.num)?;
        st.serialize_field("denominator", &self.den)?;
        st.end()
    }
}

impl<'de, C: Coeff> Deserialize<'de> for QRatio<C> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields, bound = "")]
        struct Raw<C: Coeff> {
            numerator: LaurentPoly<C>,
            denominator: LaurentPoly<C>,
        }
        let r = Raw::<C>::deserialize(d)?;
        QRatio::new(r.numerator, r.denominator).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    type P = LaurentPoly<BigInt>;
    type R = QRatio<BigInt>;

    fn p(ts: &[(i64, i64)]) -> P {
        P::from_int_terms(ts)
    }

    #[test]
    fn bar_examples() {
        assert_eq!(P::one().bar(), P::one());
        assert_eq!(p(&[(2, 1), (-1, 3)]).bar(), p(&[(-2, 1), (1, 3)]));
        let x = p(&[(3, 5), (0, -2)]);
        assert_eq!(x.bar().bar(), x);
    }

    #[test]
    fn head_examples() {
        assert_eq!(P::zero().bar_invariant_head(), P::zero());
        assert_eq!(p(&[(1, 1), (0, 2)]).bar_invariant_head(), p(&[(1, 1), (-1, 1), (0, 2)]));
        let g = p(&[(3, 2), (1, 1), (0, -5), (-2, 4)]);
        assert_eq!(g.bar_invariant_head(), p(&[(3, 2), (-3, 2), (1, 1), (-1, 1), (0, -5)]));
    }

    #[test]
    fn antisym_examples() {
        assert_eq!(P::zero().antisym_negative_part().unwrap(), P::zero());
        assert_eq!(p(&[(2, 1), (-2, -1)]).antisym_negative_part().unwrap(), p(&[(-2, -1)]));
        assert_eq!(p(&[(1, 3), (-1, -3)]).antisym_negative_part().unwrap(), p(&[(-1, -3)]));
        assert!(p(&[(1, 1)]).antisym_negative_part().is_err());
        assert!(p(&[(0, 1)]).antisym_negative_part().is_err());
    }

    #[test]
    fn quantum_numbers() {
        assert_eq!(qint::<BigInt>(2).unwrap(), p(&[(1, 1), (-1, 1)]));
        assert_eq!(qfact::<BigInt>(0).unwrap(), P::one());
        assert_eq!(qbinom::<BigInt>(4, 2).unwrap(), p(&[(4, 1), (2, 1), (0, 2), (-2, 1), (-4, 1)]));
        assert!(qint::<BigInt>(-1).is_err());
        assert!(qbinom::<BigInt>(2, 3).is_err());
    }

    #[test]
    fn qbinom_matches_factorial_quotient() {
        for n in 0..=10 {
            for k in 0..=n {
                let num = qfact::<BigInt>(n).unwrap();
                let den = &qfact::<BigInt>(k).unwrap() * &qfact::<BigInt>(n - k).unwrap();
                assert_eq!(num.div_exact(&den).unwrap(), qbinom(n, k).unwrap(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn qbinom_bar_invariant_positive() {
        for n in 0..=12 {
            for k in 0..=n {
                let b = qbinom::<BigInt>(n, k).unwrap();
                assert!(b.is_bar_invariant());
                assert!(b.all_coeffs_nonneg());
            }
        }
    }

    #[test]
    fn generic_over_machine_ints() {
        let b: LaurentPoly<i64> = qbinom(5, 2).unwrap();
        assert_eq!(b.eval_one(), 10);
        let r = QRatio::<i64>::new(qfact(3).unwrap(), qint(3).unwrap()).unwrap();
        assert_eq!(r.as_poly().unwrap(), qint::<i64>(2).unwrap());
    }

    #[test]
    fn ratio_normalization() {
        let a = R::new(p(&[(2, 1), (0, -1)]), p(&[(1, 1), (0, -1)])).unwrap();
        assert_eq!(a.as_poly().unwrap(), p(&[(1, 1), (0, 1)]));
        let b = R::new(p(&[(0, 2)]), p(&[(0, -4)])).unwrap();
        assert_eq!(b.numer(), &p(&[(0, -1)]));
        assert_eq!(b.denom(), &p(&[(0, 2)]));
        let c = R::new(p(&[(-1, 1)]), p(&[(1, 1), (-1, 1)])).unwrap();
        assert_eq!(c.denom(), &p(&[(2, 1), (0, 1)]));
        assert_eq!(&(&c * &R::from_poly(p(&[(1, 1), (-1, 1)]))), &R::from_poly(p(&[(-1, 1)])));
        assert!(R::new(P::one(), P::zero()).is_err());
    }

    #[test]
    fn tail_window() {
        let t = LaurentTail::<BigInt>::from_terms((0..100).map(|k| (-2 * k, BigInt::from(1))), 10);
        assert!(t.truncated);
        assert_eq!(t.poly_part.len(), 6);
        let v = t.in_one_plus_neg_series();
        assert!(v.holds);
        assert_eq!(v.window, 10);
    }

    #[test]
    fn json_round_trip() {
        let x = p(&[(-3, 2), (4, -7)]);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"terms":[[-3,2],[4,-7]]}"#);
        assert_eq!(serde_json::from_str::<P>(&s).unwrap(), x);
        let big = P::monomial(1, BigInt::from(10).pow(30));
        let s = serde_json::to_string(&big).unwrap();
        assert_eq!(serde_json::from_str::<P>(&s).unwrap(), big);
        assert!(serde_json::from_str::<P>(r#"{"terms":[],"x":1}"#).is_err());
    }

    #[test]
    fn display() {
        assert_eq!(p(&[(1, 1), (-1, 1)]).to_string(), "q + q^-1");
        assert_eq!(p(&[(0, -2), (2, 3)]).to_string(), "3q^2 - 2");
        assert_eq!(p(&[(0, -2), (2, 3)]).to_csv_string(), "-2*q^0+3*q^2");
    }

    fn arb_poly() -> impl Strategy<Value = P> {
        prop::collection::vec((-6i64..=6, -5i64..=5), 0..6).prop_map(|v| P::from_int_terms(&v))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn bar_is_ring_involution(f in arb_poly(), g in arb_poly()) {
            prop_assert_eq!((&f * &g).bar(), &f.bar() * &g.bar());
            prop_assert_eq!((&f + &g).bar(), &f.bar() + &g.bar());
            prop_assert_eq!(f.bar().bar(), f);
        }

        #[test]
        fn head_properties(g in arb_poly()) {
            let h = g.bar_invariant_head();
            prop_assert!(h.is_bar_invariant());
            prop_assert!((&g - &h).in_neg_part());
        }

        #[test]
        fn antisym_properties(g in arb_poly()) {
            let alpha = &g - &g.bar();
            let m = alpha.antisym_negative_part().unwrap();
            prop_assert!(m.in_neg_part());
            prop_assert_eq!(&m - &m.bar(), alpha);
        }

        #[test]
        fn div_exact_inverts_mul(f in arb_poly(), g in arb_poly()) {
            prop_assume!(!g.is_zero());
            prop_assert_eq!((&f * &g).div_exact(&g), Some(f));
        }

        #[test]
        fn ratio_field_laws(a in arb_poly(), b in arb_poly(), c in arb_poly()) {
            prop_assume!(!b.is_zero() && !c.is_zero());
            let x = R::new(a.clone(), b.clone()).unwrap();
            let y = R::new(c.clone(), b.clone()).unwrap();
            let z = R::from_poly(c.clone());
            prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
            prop_assert_eq!(&(&x * &z) * &z.inv().unwrap(), x.clone());
            // equality agrees with cross-multiplication
            let w = R::new(&a * &c, &b * &c).unwrap();
            prop_assert_eq!(w, x);
        }
    }
}
