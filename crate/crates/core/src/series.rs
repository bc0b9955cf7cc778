//! Truncated multivariate formal series with exact rational coefficients.
//!
//! A [`Series`] is a finite sum of terms `c * q^a t^b s^c z^e` where `a, b, c`
//! are nonnegative and capped by a [`Truncation`], and `e` is an unbounded
//! Laurent exponent. Arithmetic happens in the quotient ring by the ideal
//! `(q^{max_q+1}, t^{max_t+1}, s^{max_s+1})`, so every identity between such
//! series is a finite, decidable equality of term maps.
//!
//! Invariants:
//! - no stored coefficient is zero
//! - every stored monomial is admitted by the truncation
//! - iteration is in the canonical order: lexicographic on `(q, t, s, z)`

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact coefficient type.
pub type Rational = BigRational;

/// Shorthand for the rational `num/den`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Shorthand for an integral rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Per-variable degree caps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Truncation {
    pub max_q: u32,
    pub max_t: u32,
    /// Present only when the series ring carries the extra parameter `s`.
    pub max_s: Option<u32>,
}

impl Truncation {
    pub fn new(max_q: u32, max_t: u32) -> Self {
        Truncation { max_q, max_t, max_s: None }
    }

    pub fn with_s(max_q: u32, max_t: u32, max_s: u32) -> Self {
        Truncation { max_q, max_t, max_s: Some(max_s) }
    }

    /// Effective cap on `s` (zero when `s` is absent).
    pub fn s_cap(&self) -> u32 {
        self.max_s.unwrap_or(0)
    }

    pub fn cap(&self, var: Var) -> Option<u32> {
        match var {
            Var::Q => Some(self.max_q),
            Var::T => Some(self.max_t),
            Var::S => self.max_s,
            Var::Z => None,
        }
    }

    pub fn admits(&self, m: &Monomial) -> bool {
        m.q <= self.max_q && m.t <= self.max_t && m.s <= self.s_cap()
    }

    /// Largest total `(q, t, s)`-degree a surviving monomial can have.
    pub fn max_degree(&self) -> u32 {
        self.max_q + self.max_t + self.s_cap()
    }

    /// True when every cap of `self` is at most the matching cap of `other`.
    pub fn is_within(&self, other: &Truncation) -> bool {
        self.max_q <= other.max_q
            && self.max_t <= other.max_t
            && match (self.max_s, other.max_s) {
                (None, _) => true,
                (Some(a), Some(b)) => a <= b,
                (Some(_), None) => false,
            }
    }
}

impl fmt::Display for Truncation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q<={}, t<={}", self.max_q, self.max_t)?;
        if let Some(s) = self.max_s {
            write!(f, ", s<={s}")?;
        }
        Ok(())
    }
}

/// The four variables of the series ring.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Q,
    T,
    S,
    Z,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Var::Q => "q",
            Var::T => "t",
            Var::S => "s",
            Var::Z => "z",
        };
        f.write_str(name)
    }
}

/// Exponent vector `q^q t^t s^s z^z`. The derived order is the canonical one.
#[derive(
    Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct Monomial {
    pub q: u32,
    pub t: u32,
    pub s: u32,
    pub z: i32,
}

impl Monomial {
    pub const ONE: Monomial = Monomial { q: 0, t: 0, s: 0, z: 0 };

    pub fn new(q: u32, t: u32, s: u32, z: i32) -> Self {
        Monomial { q, t, s, z }
    }

    pub fn q(e: u32) -> Self {
        Monomial { q: e, ..Self::ONE }
    }

    pub fn t(e: u32) -> Self {
        Monomial { t: e, ..Self::ONE }
    }

    pub fn s(e: u32) -> Self {
        Monomial { s: e, ..Self::ONE }
    }

    pub fn z(e: i32) -> Self {
        Monomial { z: e, ..Self::ONE }
    }

    pub fn qt(q: u32, t: u32) -> Self {
        Monomial { q, t, ..Self::ONE }
    }

    /// Total degree in the truncated variables.
    pub fn degree(&self) -> u32 {
        self.q + self.t + self.s
    }

    pub fn exponent(&self, var: Var) -> i64 {
        match var {
            Var::Q => self.q as i64,
            Var::T => self.t as i64,
            Var::S => self.s as i64,
            Var::Z => self.z as i64,
        }
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        Monomial {
            q: self.q + other.q,
            t: self.t + other.t,
            s: self.s + other.s,
            z: self.z + other.z,
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q^{} t^{} s^{} z^{}", self.q, self.t, self.s, self.z)
    }
}

/// Value substituted for a variable by [`Series::specialize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Substitution {
    Rational(Rational),
    Monomial(Monomial),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    terms: BTreeMap<Monomial, Rational>,
    trunc: Truncation,
}

fn check_same(a: &Truncation, b: &Truncation) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::TruncationMismatch { left: *a, right: *b })
    }
}

fn rational_pow(r: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(r.recip(), (-e) as usize)
    }
}

impl Series {
    pub fn zero(trunc: Truncation) -> Self {
        Series { terms: BTreeMap::new(), trunc }
    }

    pub fn one(trunc: Truncation) -> Self {
        Self::constant(Rational::one(), trunc)
    }

    pub fn constant(c: Rational, trunc: Truncation) -> Self {
        Self::monomial(c, Monomial::ONE, trunc)
    }

    /// `c * m`, or zero when `m` exceeds a cap.
    pub fn monomial(c: Rational, m: Monomial, trunc: Truncation) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() && trunc.admits(&m) {
            terms.insert(m, c);
        }
        Series { terms, trunc }
    }

    /// The unit-coefficient monomial `m`.
    pub fn mono(m: Monomial, trunc: Truncation) -> Self {
        Self::monomial(Rational::one(), m, trunc)
    }

    /// Builds a series from arbitrary terms, summing duplicates and dropping
    /// zeros and out-of-cap monomials.
    pub fn from_terms<I>(terms: I, trunc: Truncation) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut map: BTreeMap<Monomial, Rational> = BTreeMap::new();
        for (m, c) in terms {
            if !trunc.admits(&m) || c.is_zero() {
                continue;
            }
            *map.entry(m).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        Series { terms: map, trunc }
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::ONE)
    }

    /// Smallest and largest z-exponent present, if any.
    pub fn z_range(&self) -> Option<(i32, i32)> {
        let mut it = self.terms.keys().map(|m| m.z);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), z| (lo.min(z), hi.max(z))))
    }

    /// True when every coefficient has denominator one.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        check_same(&self.trunc, &other.trunc)?;
        let mut out = self.clone();
        out.add_assign_unchecked(other);
        Ok(out)
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        check_same(&self.trunc, &other.trunc)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let slot = out.terms.entry(*m).or_insert_with(Rational::zero);
            *slot -= c;
            if slot.is_zero() {
                out.terms.remove(m);
            }
        }
        Ok(out)
    }

    /// In-place sum; the caller guarantees equal truncations.
    pub(crate) fn add_assign_unchecked(&mut self, other: &Series) {
        debug_assert_eq!(self.trunc, other.trunc);
        for (m, c) in &other.terms {
            let slot = self.terms.entry(*m).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                self.terms.remove(m);
            }
        }
    }

    pub fn try_add_assign(&mut self, other: &Series) -> Result<()> {
        check_same(&self.trunc, &other.trunc)?;
        self.add_assign_unchecked(other);
        Ok(())
    }

    pub fn scale(&self, c: &Rational) -> Series {
        if c.is_zero() {
            return Series::zero(self.trunc);
        }
        Series {
            terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect(),
            trunc: self.trunc,
        }
    }

    /// Multiplies by `c * m`, dropping terms that leave the caps.
    pub fn mul_monomial(&self, c: &Rational, m: &Monomial) -> Series {
        if c.is_zero() {
            return Series::zero(self.trunc);
        }
        let terms = self
            .terms
            .iter()
            .filter_map(|(k, v)| {
                let p = k.times(m);
                self.trunc.admits(&p).then(|| (p, v * c))
            })
            .collect();
        Series { terms, trunc: self.trunc }
    }

    /// Cauchy product with eager truncation.
    pub fn mul(&self, other: &Series) -> Result<Series> {
        check_same(&self.trunc, &other.trunc)?;
        Ok(self.mul_capped(other, &self.trunc))
    }

    /// Product restricted to the monomials admitted by `caps` (which must lie
    /// within this series' truncation). The result keeps the original
    /// truncation label; it is exact for every monomial admitted by `caps`.
    pub(crate) fn mul_capped(&self, other: &Series, caps: &Truncation) -> Series {
        let trunc = self.trunc;
        if self.is_zero() || other.is_zero() {
            return Series::zero(trunc);
        }
        let (fz0, fz1) = self.z_range().unwrap();
        let (gz0, gz1) = other.z_range().unwrap();
        let zmin = fz0 + gz0;
        let nz = (fz1 + gz1 - zmin + 1) as usize;
        let nq = caps.max_q as usize + 1;
        let nt = caps.max_t as usize + 1;
        let ns = caps.s_cap() as usize + 1;
        let g: Vec<(&Monomial, &Rational)> = other.terms.iter().collect();
        let size = nq * nt * ns * nz;

        if size <= 1 << 22 {
            let mut acc: Vec<Rational> = vec![Rational::zero(); size];
            let mut touched = vec![false; size];
            for (ma, ca) in &self.terms {
                if !caps.admits(ma) {
                    continue;
                }
                for (mb, cb) in &g {
                    let q = ma.q + mb.q;
                    if q > caps.max_q {
                        break;
                    }
                    let t = ma.t + mb.t;
                    let s = ma.s + mb.s;
                    if t > caps.max_t || s > caps.s_cap() {
                        continue;
                    }
                    let z = (ma.z + mb.z - zmin) as usize;
                    let idx = ((q as usize * nt + t as usize) * ns + s as usize) * nz + z;
                    acc[idx] += ca * *cb;
                    touched[idx] = true;
                }
            }
            let mut terms = BTreeMap::new();
            for (idx, c) in acc.into_iter().enumerate() {
                if !touched[idx] || c.is_zero() {
                    continue;
                }
                let z = (idx % nz) as i32 + zmin;
                let rest = idx / nz;
                let s = (rest % ns) as u32;
                let rest = rest / ns;
                let t = (rest % nt) as u32;
                let q = (rest / nt) as u32;
                terms.insert(Monomial { q, t, s, z }, c);
            }
            Series { terms, trunc }
        } else {
            let mut acc: HashMap<Monomial, Rational> = HashMap::new();
            for (ma, ca) in &self.terms {
                for (mb, cb) in &g {
                    let p = ma.times(mb);
                    if p.q > caps.max_q {
                        break;
                    }
                    if !caps.admits(&p) {
                        continue;
                    }
                    *acc.entry(p).or_insert_with(Rational::zero) += ca * *cb;
                }
            }
            Series::from_terms(acc, trunc)
        }
    }

    pub fn pow(&self, n: u32) -> Series {
        let mut out = Series::one(self.trunc);
        for _ in 0..n {
            out = out.mul_capped(self, &self.trunc);
        }
        out
    }

    /// Multiplicative inverse by graded iteration on total `(q, t, s)`-degree.
    ///
    /// The degree-zero part must be a nonzero constant (no z-dependence).
    pub fn invert(&self) -> Result<Series> {
        let trunc = self.trunc;
        let c0 = self.constant_term();
        let degree_zero_ok = self
            .terms
            .keys()
            .filter(|m| m.degree() == 0)
            .all(|m| m.z == 0);
        if c0.is_zero() || !degree_zero_ok {
            return Err(Error::NonInvertible {
                series: self.render(),
                reason: "degree-zero part is not a nonzero constant".into(),
            });
        }
        let inv_c0 = c0.recip();
        let max_deg = trunc.max_degree() as usize;
        let mut by_degree: Vec<Vec<(Monomial, Rational)>> = vec![Vec::new(); max_deg + 1];
        for (m, c) in &self.terms {
            if m.degree() > 0 {
                by_degree[m.degree() as usize].push((*m, c.clone()));
            }
        }
        let mut parts: Vec<Vec<(Monomial, Rational)>> = Vec::with_capacity(max_deg + 1);
        parts.push(vec![(Monomial::ONE, inv_c0.clone())]);
        let neg_inv = -inv_c0;
        for d in 1..=max_deg {
            let mut acc: HashMap<Monomial, Rational> = HashMap::new();
            for e in 1..=d {
                for (ma, ca) in &by_degree[e] {
                    for (mb, cb) in &parts[d - e] {
                        let p = ma.times(mb);
                        if trunc.admits(&p) {
                            *acc.entry(p).or_insert_with(Rational::zero) += ca * cb;
                        }
                    }
                }
            }
            let mut part: Vec<(Monomial, Rational)> = acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m, c * &neg_inv))
                .collect();
            part.sort_by(|a, b| a.0.cmp(&b.0));
            parts.push(part);
        }
        Ok(Series {
            terms: parts.into_iter().flatten().collect(),
            trunc,
        })
    }

    /// `z -> 1/z`.
    pub fn flip_z(&self) -> Series {
        Series {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial { z: -m.z, ..*m }, c.clone()))
                .collect(),
            trunc: self.trunc,
        }
    }

    pub fn is_flip_symmetric(&self) -> bool {
        self.terms
            .iter()
            .all(|(m, c)| self.terms.get(&Monomial { z: -m.z, ..*m }) == Some(c))
    }

    /// `z -> z^d` for a nonzero integer `d`.
    pub fn substitute_z_power(&self, d: i32) -> Series {
        assert!(d != 0, "z -> z^0 collapses the Laurent variable; use specialize");
        Series {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (Monomial { z: m.z * d, ..*m }, c.clone()))
                .collect(),
            trunc: self.trunc,
        }
    }

    /// The sub-series of z-exponent zero.
    pub fn z_constant_part(&self) -> Series {
        Series {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.z == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
            trunc: self.trunc,
        }
    }

    /// Exact substitution of a rational or a monomial for one variable.
    ///
    /// Monomial targets for a truncated variable must not pull unknown
    /// (beyond-cap) terms back below the caps: substituting `v -> m` requires
    /// `(cap_v + 1) * deg_w(m) > cap_w` for some truncated `w` in `m`.
    /// Rational targets are accepted as given; only `0` is exact for a
    /// truncated variable.
    pub fn specialize(&self, var: Var, value: &Substitution) -> Result<Series> {
        let trunc = self.trunc;
        match (var, value) {
            (Var::Z, Substitution::Rational(r)) => {
                if r.is_zero() {
                    return Err(Error::Domain("z cannot be specialized to 0".into()));
                }
                Ok(Series::from_terms(
                    self.terms.iter().map(|(m, c)| {
                        (Monomial { z: 0, ..*m }, c * rational_pow(r, m.z as i64))
                    }),
                    trunc,
                ))
            }
            (Var::Z, Substitution::Monomial(target)) => {
                if target.degree() != 0 {
                    return Err(Error::Domain(format!(
                        "z may only be replaced by a power of z, not {target}"
                    )));
                }
                if target.z == 0 {
                    return self.specialize(var, &Substitution::Rational(Rational::one()));
                }
                Ok(self.substitute_z_power(target.z))
            }
            (_, Substitution::Rational(r)) => Ok(Series::from_terms(
                self.terms.iter().map(|(m, c)| {
                    let e = m.exponent(var);
                    let mut m2 = *m;
                    set_exponent(&mut m2, var, 0);
                    (m2, c * rational_pow(r, e))
                }),
                trunc,
            )),
            (_, Substitution::Monomial(target)) => {
                if let Some(cap_v) = trunc.cap(var) {
                    let safe = [Var::Q, Var::T, Var::S]
                        .into_iter()
                        .filter(|w| *w != var)
                        .filter_map(|w| trunc.cap(w).map(|cw| (w, cw)))
                        .any(|(w, cap_w)| {
                            let x = target.exponent(w);
                            x > 0 && (cap_v as i64 + 1) * x > cap_w as i64
                        })
                        || target.exponent(var) > 0;
                    if !safe {
                        return Err(Error::TruncationOverflow(format!(
                            "{var} -> {target} with caps {trunc}"
                        )));
                    }
                }
                Ok(Series::from_terms(
                    self.terms.iter().map(|(m, c)| {
                        let e = m.exponent(var) as u32;
                        let mut m2 = *m;
                        set_exponent(&mut m2, var, 0);
                        let scaled = Monomial {
                            q: target.q * e,
                            t: target.t * e,
                            s: target.s * e,
                            z: target.z * e as i32,
                        };
                        (m2.times(&scaled), c.clone())
                    }),
                    trunc,
                ))
            }
        }
    }

    /// Restricts to smaller caps.
    pub fn truncate_to(&self, caps: Truncation) -> Result<Series> {
        if !caps.is_within(&self.trunc) {
            return Err(Error::Usage(format!(
                "cannot truncate from {} to the larger {caps}",
                self.trunc
            )));
        }
        Ok(Series::from_terms(
            self.terms.iter().map(|(m, c)| (*m, c.clone())),
            caps,
        ))
    }

    /// Same terms relabelled with a larger truncation that admits them all.
    /// The result is only meaningful where the caller knows the extra
    /// coefficients vanish (e.g. a polynomial computed exactly).
    pub fn relabel(&self, trunc: Truncation) -> Series {
        Series::from_terms(self.terms.iter().map(|(m, c)| (*m, c.clone())), trunc)
    }

    /// Canonically smallest monomial where the two series differ.
    pub fn first_difference(&self, other: &Series) -> Option<(Monomial, Rational, Rational)> {
        let mut a = self.terms.iter().peekable();
        let mut b = other.terms.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return None,
                (Some((ma, ca)), None) => return Some((**ma, (*ca).clone(), Rational::zero())),
                (None, Some((mb, cb))) => return Some((**mb, Rational::zero(), (*cb).clone())),
                (Some((ma, ca)), Some((mb, cb))) => match ma.cmp(mb) {
                    std::cmp::Ordering::Less => {
                        return Some((**ma, (*ca).clone(), Rational::zero()))
                    }
                    std::cmp::Ordering::Greater => {
                        return Some((**mb, Rational::zero(), (*cb).clone()))
                    }
                    std::cmp::Ordering::Equal => {
                        if ca != cb {
                            return Some((**ma, (*ca).clone(), (*cb).clone()));
                        }
                        a.next();
                        b.next();
                    }
                },
            }
        }
    }

    /// Canonical text: terms in canonical order as `num/den * q^a t^b s^c z^e`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(m, c)| format!("{} * {m}", render_rational(c)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// `num/den` with a positive denominator, always written as a fraction.
pub fn render_rational(c: &Rational) -> String {
    let (n, d) = if c.denom().is_negative() {
        (-c.numer(), -c.denom())
    } else {
        (c.numer().clone(), c.denom().clone())
    };
    format!("{n}/{d}")
}

fn set_exponent(m: &mut Monomial, var: Var, e: i64) {
    match var {
        Var::Q => m.q = e as u32,
        Var::T => m.t = e as u32,
        Var::S => m.s = e as u32,
        Var::Z => m.z = e as i32,
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

// Operator forms panic on truncation mismatch; the checked methods return
// `Error::TruncationMismatch` instead.

impl Add for &Series {
    type Output = Series;
    fn add(self, rhs: &Series) -> Series {
        Series::add(self, rhs).expect("series truncations differ")
    }
}

impl Sub for &Series {
    type Output = Series;
    fn sub(self, rhs: &Series) -> Series {
        Series::sub(self, rhs).expect("series truncations differ")
    }
}

impl Mul for &Series {
    type Output = Series;
    fn mul(self, rhs: &Series) -> Series {
        Series::mul(self, rhs).expect("series truncations differ")
    }
}

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        Series {
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
            trunc: self.trunc,
        }
    }
}

/// Sums a sequence of series sharing one truncation.
pub fn sum_series<I: IntoIterator<Item = Series>>(items: I, trunc: Truncation) -> Series {
    items.into_iter().fold(Series::zero(trunc), |mut acc, s| {
        acc.add_assign_unchecked(&s);
        acc
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr() -> Truncation {
        Truncation::new(5, 4)
    }

    fn s(terms: &[((u32, u32, i32), i64)]) -> Series {
        Series::from_terms(
            terms
                .iter()
                .map(|&((q, t, z), c)| (Monomial::new(q, t, 0, z), int(c))),
            tr(),
        )
    }

    #[test]
    fn add_cancels() {
        let f = s(&[((0, 0, 0), 1), ((1, 0, 0), 1)]);
        let g = s(&[((0, 1, 0), 1), ((1, 0, 0), -1)]);
        assert_eq!(&f + &g, s(&[((0, 0, 0), 1), ((0, 1, 0), 1)]));
        assert_eq!(&f + &Series::zero(tr()), f);
        let h = s(&[((0, 0, 2), 1), ((0, 0, -2), 1)]);
        let k = s(&[((0, 0, 2), -1)]);
        assert_eq!(&h + &k, s(&[((0, 0, -2), 1)]));
    }

    #[test]
    fn mismatch_is_an_error() {
        let f = Series::one(tr());
        let g = Series::one(Truncation::new(5, 3));
        assert!(matches!(f.add(&g), Err(Error::TruncationMismatch { .. })));
        assert!(matches!(f.mul(&g), Err(Error::TruncationMismatch { .. })));
    }

    #[test]
    fn telescoping_geometric_series() {
        let one_minus_q = s(&[((0, 0, 0), 1), ((1, 0, 0), -1)]);
        let geo = s(&(0..=5).map(|i| ((i, 0, 0), 1)).collect::<Vec<_>>());
        assert_eq!(&one_minus_q * &geo, Series::one(tr()));
    }

    #[test]
    fn laurent_products() {
        assert_eq!(&s(&[((0, 0, 1), 1)]) * &s(&[((0, 0, -1), 1)]), Series::one(tr()));
        let a = s(&[((0, 0, 0), 1), ((0, 1, 2), 1)]);
        let b = s(&[((0, 0, 0), 1), ((0, 1, -2), 1)]);
        let expected = s(&[((0, 0, 0), 1), ((0, 1, 2), 1), ((0, 1, -2), 1), ((0, 2, 0), 1)]);
        assert_eq!(&a * &b, expected);
    }

    #[test]
    fn geometric_inverses() {
        let one_minus_t = s(&[((0, 0, 0), 1), ((0, 1, 0), -1)]);
        let inv = one_minus_t.invert().unwrap();
        assert_eq!(inv, s(&(0..=4).map(|i| ((0, i, 0), 1)).collect::<Vec<_>>()));
        assert_eq!(Series::one(tr()).invert().unwrap(), Series::one(tr()));
        let one_minus_tq = s(&[((0, 0, 0), 1), ((1, 1, 0), -1)]);
        let inv = one_minus_tq.invert().unwrap();
        assert_eq!(inv, s(&(0..=4).map(|i| ((i, i, 0), 1)).collect::<Vec<_>>()));
    }

    #[test]
    fn non_invertible_series() {
        let f = s(&[((1, 0, 0), 1)]);
        assert!(matches!(f.invert(), Err(Error::NonInvertible { .. })));
        let g = s(&[((0, 0, 0), 1), ((0, 0, 2), -1)]);
        assert!(matches!(g.invert(), Err(Error::NonInvertible { .. })));
    }

    #[test]
    fn coefficient_lookup() {
        let f = s(&[((0, 0, 0), 1), ((1, 1, 0), 1)]);
        assert_eq!(f.coefficient(&Monomial::qt(1, 1)), int(1));
        assert_eq!(f.coefficient(&Monomial::q(2)), int(0));
    }

    #[test]
    fn flip_is_an_involution() {
        let f = s(&[((0, 0, 2), 1), ((0, 0, 0), 1)]);
        assert_eq!(f.flip_z(), s(&[((0, 0, -2), 1), ((0, 0, 0), 1)]));
        assert_eq!(f.flip_z().flip_z(), f);
    }

    #[test]
    fn specializations() {
        let f = s(&[((0, 1, 2), 1)]);
        let one = Substitution::Rational(int(1));
        assert_eq!(f.specialize(Var::Z, &one).unwrap(), s(&[((0, 1, 0), 1)]));
        assert!(matches!(
            f.specialize(Var::Z, &Substitution::Rational(int(0))),
            Err(Error::Domain(_))
        ));

        let ts = Truncation::with_s(3, 3, 3);
        let one_plus_s = Series::from_terms([(Monomial::ONE, int(1)), (Monomial::s(1), int(1))], ts);
        assert_eq!(
            one_plus_s.specialize(Var::S, &Substitution::Rational(int(0))).unwrap(),
            Series::one(ts)
        );

        let schur = Truncation::new(4, 4);
        let tq = Series::mono(Monomial::qt(1, 1), schur);
        assert_eq!(
            tq.specialize(Var::T, &Substitution::Monomial(Monomial::q(1))).unwrap(),
            Series::mono(Monomial::q(2), schur)
        );
        // t-cap below q-cap would pull unknown terms below the q-cap
        let narrow = Series::mono(Monomial::qt(1, 1), Truncation::new(6, 2));
        assert!(matches!(
            narrow.specialize(Var::T, &Substitution::Monomial(Monomial::q(1))),
            Err(Error::TruncationOverflow(_))
        ));
    }

    #[test]
    fn render_format() {
        let f = s(&[((0, 0, 0), 1), ((1, 2, -2), -3)]);
        assert_eq!(f.render(), "1/1 * q^0 t^0 s^0 z^0 + -3/1 * q^1 t^2 s^0 z^-2");
        assert_eq!(Series::zero(tr()).render(), "0");
    }

    #[test]
    fn first_difference_is_canonical() {
        let f = s(&[((0, 0, 0), 1), ((1, 0, 0), 2), ((2, 0, 0), 1)]);
        let g = s(&[((0, 0, 0), 1), ((1, 0, 0), 3)]);
        assert_eq!(f.first_difference(&g), Some((Monomial::q(1), int(2), int(3))));
        assert_eq!(f.first_difference(&f), None);
    }
}
