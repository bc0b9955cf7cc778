//! Terminating basic hypergeometric series and the rational-point backend.
//!
//! Identities that are rational functions of `(q, t, s, ...)` and involve
//! negative-length Pochhammer symbols are verified by exact evaluation at
//! rational points. Negative lengths follow `(a;q)_{-m} = 1/(a q^{-m};q)_m`.
//! Every division goes through [`RationalPoint::divide`], which logs the
//! factor and fails with its name if it vanishes.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::qfunctions::{self, combined_poch, hermite, mono, poch_finite, poch_infinite, qbinomial, qq};
use crate::report::IdentityReport;
use crate::series::{int, render_rational, Rational, Series, Truncation};

/// Exact assignment of rationals to the variables of an identity.
#[derive(Clone, Debug)]
pub struct RationalPoint {
    values: BTreeMap<String, Rational>,
    pole_log: Vec<String>,
}

fn pow_i(r: &Rational, e: i64) -> Rational {
    if e >= 0 {
        num_traits::pow(r.clone(), e as usize)
    } else {
        num_traits::pow(r.recip(), (-e) as usize)
    }
}

impl RationalPoint {
    /// Builds a point; `q` must be present, nonzero, and not a root of unity
    /// of order up to `max_length`.
    pub fn new<I, S>(values: I, max_length: u32) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Rational)>,
        S: Into<String>,
    {
        let values: BTreeMap<String, Rational> =
            values.into_iter().map(|(k, v)| (k.into(), v)).collect();
        let q = values
            .get("q")
            .ok_or_else(|| Error::Usage("a rational point needs a value for q".into()))?;
        if q.is_zero() {
            return Err(Error::Domain("q = 0".into()));
        }
        let mut power = Rational::one();
        for j in 1..=max_length.max(1) {
            power *= q;
            if power.is_one() {
                return Err(Error::Domain(format!("q is a root of unity of order {j}")));
            }
        }
        Ok(RationalPoint { values, pole_log: Vec::new() })
    }

    /// Draws every variable as `±num/den` with `num, den` uniform in `[2, 97]`
    /// (sign positive), rejecting `q = 1` and coincident values.
    pub fn random(vars: &[&str], rng: &mut impl Rng, max_length: u32) -> Self {
        loop {
            let mut values = Vec::new();
            for v in vars {
                let num: i64 = rng.gen_range(2..=97);
                let den: i64 = rng.gen_range(2..=97);
                values.push((v.to_string(), Rational::new(num.into(), den.into())));
            }
            let mut distinct: Vec<&Rational> = values.iter().map(|(_, r)| r).collect();
            distinct.sort();
            distinct.dedup();
            if distinct.len() < values.len() {
                continue;
            }
            if let Ok(p) = RationalPoint::new(values, max_length) {
                return p;
            }
        }
    }

    pub fn get(&self, name: &str) -> Result<Rational> {
        self.values
            .get(name)
            .cloned()
            .ok_or_else(|| Error::Usage(format!("rational point has no value for `{name}`")))
    }

    pub fn q(&self) -> Rational {
        self.values["q"].clone()
    }

    pub fn with(&self, name: &str, value: Rational) -> Self {
        let mut p = self.clone();
        p.values.insert(name.to_string(), value);
        p
    }

    pub fn values(&self) -> &BTreeMap<String, Rational> {
        &self.values
    }

    /// Every denominator factor checked so far.
    pub fn pole_log(&self) -> &[String] {
        &self.pole_log
    }

    pub fn divide(&mut self, num: &Rational, den: &Rational, label: impl Into<String>) -> Result<Rational> {
        let label = label.into();
        if den.is_zero() {
            return Err(Error::Pole { factor: label });
        }
        self.pole_log.push(label);
        Ok(num / den)
    }

    /// `(a; q)_n` for any integer `n`.
    pub fn poch(&mut self, a: &Rational, n: i64, label: &str) -> Result<Rational> {
        let q = self.q();
        if n >= 0 {
            let mut out = Rational::one();
            let mut x = a.clone();
            for _ in 0..n {
                out *= Rational::one() - &x;
                x *= &q;
            }
            Ok(out)
        } else {
            let inv = self.poch_recip_negative(a, -n);
            self.divide(&Rational::one(), &inv, format!("({label};q)_{n}"))
        }
    }

    /// `1 / (a; q)_n` for any integer `n`; for negative `n` this is the
    /// polynomial `prod_{j=1}^{m} (1 - a q^{-j})` and never has a pole.
    pub fn poch_recip(&mut self, a: &Rational, n: i64, label: &str) -> Result<Rational> {
        if n >= 0 {
            let p = self.poch(a, n, label)?;
            self.divide(&Rational::one(), &p, format!("({label};q)_{n}"))
        } else {
            Ok(self.poch_recip_negative(a, -n))
        }
    }

    fn poch_recip_negative(&self, a: &Rational, m: i64) -> Rational {
        let qinv = self.q().recip();
        let mut out = Rational::one();
        let mut x = a * &qinv;
        for _ in 0..m {
            out *= Rational::one() - &x;
            x *= &qinv;
        }
        out
    }

    /// `[m choose n]_q` from the product formula.
    pub fn qbinomial(&mut self, m: i64, n: i64) -> Result<Rational> {
        if n < 0 || n > m {
            return Ok(Rational::zero());
        }
        let q = self.q();
        let num = self.poch(&q, m, "q")?;
        let d1 = self.poch(&q, n, "q")?;
        let d2 = self.poch(&q, m - n, "q")?;
        self.divide(&num, &(d1 * d2), format!("(q;q)_{n} (q;q)_{}", m - n))
    }

    pub fn pow(&self, name: &str, e: i64) -> Result<Rational> {
        Ok(pow_i(&self.get(name)?, e))
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .values
            .iter()
            .map(|(k, v)| format!("{k}={}", render_rational(v)))
            .collect();
        f.write_str(&parts.join(","))
    }
}

/// A terminating `r phi s` series: the listed upper parameters plus the
/// terminating parameter `q^{-n}`.
#[derive(Clone, Debug)]
pub struct PhiSpec {
    pub upper: Vec<Rational>,
    pub lower: Vec<Rational>,
    pub argument: Rational,
    pub n: u32,
}

/// Exact value of the terminating series
/// `sum_{k=0}^n (q^{-n}, a_1..;q)_k / (q, b_1..;q)_k [(-1)^k q^{k(k-1)/2}]^{1+s-r} x^k`.
pub fn phi_terminating(spec: &PhiSpec, point: &mut RationalPoint) -> Result<Rational> {
    let q = point.q();
    let term_param = pow_i(&q, -(spec.n as i64));
    let r = spec.upper.len() as i64 + 1;
    let s = spec.lower.len() as i64;
    let excess = 1 + s - r;
    let mut total = Rational::zero();
    for k in 0..=spec.n as i64 {
        let mut num = point.poch(&term_param, k, "q^-n")?;
        for a in &spec.upper {
            num *= point.poch(a, k, "upper")?;
        }
        let mut den = point.poch(&q, k, "q")?;
        for b in &spec.lower {
            den *= point.poch(b, k, "lower")?;
        }
        let mut term = point.divide(&num, &den, format!("lower parameters at k={k}"))?;
        term *= pow_i(&spec.argument, k);
        if excess != 0 {
            let sign = if k % 2 == 0 { int(1) } else { int(-1) };
            let base = sign * pow_i(&q, k * (k - 1) / 2);
            term *= pow_i(&base, excess);
        }
        total += term;
    }
    Ok(total)
}

/// The classical summation and transformation formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassicalIdentity {
    PfaffSaalschutz,
    ChuVandermonde2,
    QBinomialTheorem,
    SixPhiFive,
    Heine1,
}

impl ClassicalIdentity {
    pub const ALL: [ClassicalIdentity; 5] = [
        ClassicalIdentity::PfaffSaalschutz,
        ClassicalIdentity::ChuVandermonde2,
        ClassicalIdentity::QBinomialTheorem,
        ClassicalIdentity::SixPhiFive,
        ClassicalIdentity::Heine1,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ClassicalIdentity::PfaffSaalschutz => "pfaff-saalschutz",
            ClassicalIdentity::ChuVandermonde2 => "chu-vandermonde-2",
            ClassicalIdentity::QBinomialTheorem => "qbinomial-theorem",
            ClassicalIdentity::SixPhiFive => "sixphi5",
            ClassicalIdentity::Heine1 => "heine-1",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Variables a random point for this identity must carry. For the
    /// very-well-poised 6phi5, `r` stands for `a^{1/2}`.
    pub fn variables(&self) -> &'static [&'static str] {
        match self {
            ClassicalIdentity::PfaffSaalschutz => &["q", "a", "b", "c"],
            ClassicalIdentity::ChuVandermonde2 => &["q", "a", "c"],
            ClassicalIdentity::QBinomialTheorem => &["q", "z"],
            ClassicalIdentity::SixPhiFive => &["q", "r", "b", "c"],
            // q, z and b stay formal; a and c are rational
            ClassicalIdentity::Heine1 => &["q", "a", "c"],
        }
    }
}

impl fmt::Display for ClassicalIdentity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Truncation used for the nonterminating Heine check: `q` and `b` (held in
/// the `s` slot) formal to degree 6, the argument `z` (held in the `t` slot)
/// to degree 8.
pub const HEINE_TRUNCATION: Truncation = Truncation { max_q: 6, max_t: 8, max_s: Some(6) };

/// Compares both sides of a classical identity at `point` (and `n` for the
/// terminating ones).
pub fn classical_check(id: ClassicalIdentity, point: &RationalPoint, n: u32) -> Result<IdentityReport> {
    let started = Instant::now();
    let mut report = IdentityReport::new(id.name()).with_param("n", n);
    let mut p = point.clone();
    let q = p.q();
    let nn = n as i64;
    let context = Some(format!("point {point}"));
    match id {
        ClassicalIdentity::PfaffSaalschutz => {
            let (a, b, c) = (p.get("a")?, p.get("b")?, p.get("c")?);
            let fourth = &a * &b * pow_i(&q, 1 - nn) / &c;
            let lhs = phi_terminating(
                &PhiSpec { upper: vec![a.clone(), b.clone()], lower: vec![c.clone(), fourth], argument: q.clone(), n },
                &mut p,
            )?;
            let num = p.poch(&(&c / &a), nn, "c/a")? * p.poch(&(&c / &b), nn, "c/b")?;
            let den = p.poch(&c, nn, "c")? * p.poch(&(&c / (&a * &b)), nn, "c/ab")?;
            let rhs = p.divide(&num, &den, "(c, c/ab; q)_n")?;
            report.record_values(&lhs, &rhs, context);
        }
        ClassicalIdentity::ChuVandermonde2 => {
            let (a, c) = (p.get("a")?, p.get("c")?);
            let lhs = phi_terminating(
                &PhiSpec { upper: vec![a.clone()], lower: vec![c.clone()], argument: q.clone(), n },
                &mut p,
            )?;
            let num = pow_i(&a, nn) * p.poch(&(&c / &a), nn, "c/a")?;
            let den = p.poch(&c, nn, "c")?;
            let rhs = p.divide(&num, &den, "(c;q)_n")?;
            report.record_values(&lhs, &rhs, context);
        }
        ClassicalIdentity::QBinomialTheorem => {
            let z = p.get("z")?;
            let lhs = phi_terminating(&PhiSpec { upper: vec![], lower: vec![], argument: z.clone(), n }, &mut p)?;
            let rhs = p.poch(&(&z * pow_i(&q, -nn)), nn, "z q^-n")?;
            report.record_values(&lhs, &rhs, context);
        }
        ClassicalIdentity::SixPhiFive => {
            let (r, b, c) = (p.get("r")?, p.get("b")?, p.get("c")?);
            let a = &r * &r;
            let upper = vec![a.clone(), &r * &q, -(&r * &q), b.clone(), c.clone()];
            let lower = vec![
                r.clone(),
                -r.clone(),
                &a * &q / &b,
                &a * &q / &c,
                &a * pow_i(&q, nn + 1),
            ];
            let argument = &a * pow_i(&q, nn + 1) / (&b * &c);
            let lhs = phi_terminating(&PhiSpec { upper, lower, argument, n }, &mut p)?;
            let num = p.poch(&(&a * &q), nn, "aq")? * p.poch(&(&a * &q / (&b * &c)), nn, "aq/bc")?;
            let den = p.poch(&(&a * &q / &b), nn, "aq/b")? * p.poch(&(&a * &q / &c), nn, "aq/c")?;
            let rhs = p.divide(&num, &den, "(aq/b, aq/c; q)_n")?;
            report.record_values(&lhs, &rhs, context);
        }
        ClassicalIdentity::Heine1 => {
            let (a, c) = (p.get("a")?, p.get("c")?);
            let (lhs, rhs) = heine_sides(&a, &c, HEINE_TRUNCATION)?;
            report = report.with_truncation(HEINE_TRUNCATION);
            report.record_series(&lhs, &rhs, context);
        }
    }
    Ok(report.finish(started))
}

/// Heine's first transformation
/// `2phi1(a,b;c;q,z) = (b,az;q)_inf/(c,z;q)_inf 2phi1(c/b,z;az;q,b)`
/// as formal series in `q`, `z` (the `t` slot) and `b` (the `s` slot), with
/// `a`, `c` rational. On the right `(c/b;q)_k b^k = prod_{i<k} (b - c q^i)`.
pub fn heine_sides(a: &Rational, c: &Rational, trunc: Truncation) -> Result<(Series, Series)> {
    let b = mono(0, 0, 1, 0, trunc);
    let z = mono(0, 1, 0, 0, trunc);
    let cst = |r: &Rational| Series::constant(r.clone(), trunc);
    let a_s = cst(a);
    let c_s = cst(c);
    let az = z.scale(a);

    let mut lhs = Series::zero(trunc);
    for k in 0..=trunc.max_t {
        let num = &poch_finite(&a_s, k as i64)? * &poch_finite(&b, k as i64)?;
        let den = &qq(k, trunc) * &poch_finite(&c_s, k as i64)?;
        let term = (&num * &den.invert()?).mul_monomial(&Rational::one(), &crate::series::Monomial::t(k));
        lhs = &lhs + &term;
    }

    let mut r = 0u32;
    while (r + 1) * r / 2 <= trunc.max_q {
        r += 1;
    }
    let k_max = trunc.s_cap() + r + 1;
    let mut inner = Series::zero(trunc);
    let mut head = Series::one(trunc);
    for k in 0..=k_max {
        let den = &qq(k, trunc) * &poch_finite(&az, k as i64)?;
        let term = &(&head * &poch_finite(&z, k as i64)?) * &den.invert()?;
        inner = &inner + &term;
        let factor = &b - &mono(k, 0, 0, 0, trunc).scale(c);
        head = &head * &factor;
    }
    let pre_num = &poch_infinite(&b)? * &poch_infinite(&az)?;
    let pre_den = &poch_infinite(&c_s)? * &poch_infinite(&z)?;
    let rhs = &(&pre_num * &pre_den.invert()?) * &inner;
    Ok((lhs, rhs))
}

fn q_power(point: &RationalPoint, e: i64) -> Rational {
    pow_i(&point.q(), e)
}

/// `S_{d,n} = sum_{j=0}^{2n} (t;q)_j (t;q)_{2n-j} (t^{-1};q)_{j+d} t^{j+d} / ((q;q)_j (q;q)_{2n-j} (t;q)_{j+d})`.
pub fn s_sum(d: i64, n: u32, point: &mut RationalPoint) -> Result<Rational> {
    let t = point.get("t")?;
    let q = point.q();
    let tinv = t.recip();
    let nn = 2 * n as i64;
    let mut total = Rational::zero();
    for j in 0..=nn {
        let num = point.poch(&t, j, "t")?
            * point.poch(&t, nn - j, "t")?
            * point.poch(&tinv, j + d, "t^-1")?
            * pow_i(&t, j + d);
        let mut den = point.poch(&q, j, "q")? * point.poch(&q, nn - j, "q")?;
        let tail = point.poch_recip(&t, j + d, "t")?;
        den = point.divide(&Rational::one(), &den, "(q;q)_j (q;q)_{2n-j}")?;
        total += num * den * tail;
    }
    Ok(total)
}

/// `S_{d,n} = (t^2;q)_{2n} (q^d;q)_{2n} (t^{-1};q)_d t^d / ((q;q)_{2n} (t;q)_{2n+d})`.
pub fn s_closed(d: i64, n: u32, point: &mut RationalPoint) -> Result<Rational> {
    let t = point.get("t")?;
    let q = point.q();
    let nn = 2 * n as i64;
    let num = point.poch(&(&t * &t), nn, "t^2")?
        * point.poch(&q_power(point, d), nn, "q^d")?
        * point.poch(&t.recip(), d, "t^-1")?
        * pow_i(&t, d);
    let den = point.poch(&q, nn, "q")?;
    let tail = point.poch_recip(&t, nn + d, "t")?;
    Ok(point.divide(&num, &den, "(q;q)_{2n}")? * tail)
}

/// Both sides of the pairing identity
/// `sum_j [2l,j]_q S_{j-l-n,n} = - sum_j [2l,j]_q S_{j-l-n+1,n}`.
pub fn s_symmetry(l: u32, n: u32, point: &mut RationalPoint) -> Result<(Rational, Rational)> {
    let (l, nn) = (l as i64, n as i64);
    let mut lhs = Rational::zero();
    let mut rhs = Rational::zero();
    for j in 0..=2 * l {
        let b = point.qbinomial(2 * l, j)?;
        lhs += &b * s_sum(j - l - nn, n, point)?;
        rhs -= &b * s_sum(j - l - nn + 1, n, point)?;
    }
    Ok((lhs, rhs))
}

/// Shared left-hand side of the key summation and its `s`-extension:
/// `sum_{j=0}^{2l} w_j (q^{j-l-n};q)_{2n} (t^{-1};q)_{j-l-n} t^j / ((q;q)_j (q;q)_{2l-j} (t;q)_{j-l+n})`
/// with `w_j = (s;q)_j (s;q)_{2l-j}` when `with_s`, else `1`.
fn key_sum_lhs(l: u32, n: u32, point: &mut RationalPoint, with_s: bool) -> Result<Rational> {
    let t = point.get("t")?;
    let q = point.q();
    let s = if with_s { Some(point.get("s")?) } else { None };
    let (l, n) = (l as i64, n as i64);
    let mut total = Rational::zero();
    for j in 0..=2 * l {
        let shift = j - l - n;
        let mut num = point.poch(&q_power(point, shift), 2 * n, "q^{j-l-n}")?
            * point.poch(&t.recip(), shift, "t^-1")?
            * pow_i(&t, j);
        if let Some(s) = &s {
            num *= point.poch(s, j, "s")? * point.poch(s, 2 * l - j, "s")?;
        }
        // a zero numerator against a vanishing (t;q) factor is 0/0, not 0
        let tail = point.poch_recip(&t, j - l + n, "t")?;
        if num.is_zero() {
            continue;
        }
        let den = point.poch(&q, j, "q")? * point.poch(&q, 2 * l - j, "q")?;
        total += point.divide(&num, &den, format!("(q;q)_{j} (q;q)_{}", 2 * l - j))? * tail;
    }
    Ok(total)
}

/// Key summation: both sides of
/// `sum_j (q^{j-l-n};q)_{2n} (t^{-1};q)_{j-l-n} t^j / ((q;q)_j (q;q)_{2l-j} (t;q)_{j-l+n})
///   = t^{2l} / ((q;q)_{l-n} (tq;q)_{l+n})`.
pub fn lemma_b1_sides(l: u32, n: u32, point: &mut RationalPoint) -> Result<(Rational, Rational)> {
    let lhs = key_sum_lhs(l, n, point, false)?;
    let t = point.get("t")?;
    let q = point.q();
    let (li, ni) = (l as i64, n as i64);
    let rhs = pow_i(&t, 2 * li)
        * point.poch_recip(&q, li - ni, "q")?
        * point.poch_recip(&(&t * &q), li + ni, "tq")?;
    Ok((lhs, rhs))
}

/// The `s`-extension:
/// `... = (s t^{-1};q)_{l-n} (s;q)_{l+n} t^{2l} / ((q;q)_{l-n} (tq;q)_{l+n})`.
pub fn appendix_c_sides(l: u32, n: u32, point: &mut RationalPoint) -> Result<(Rational, Rational)> {
    let lhs = key_sum_lhs(l, n, point, true)?;
    let t = point.get("t")?;
    let s = point.get("s")?;
    let q = point.q();
    let (li, ni) = (l as i64, n as i64);
    let rhs = pow_i(&t, 2 * li)
        * point.poch(&(&s / &t), li - ni, "s/t")?
        * point.poch(&s, li + ni, "s")?
        * point.poch_recip(&q, li - ni, "q")?
        * point.poch_recip(&(&t * &q), li + ni, "tq")?;
    Ok((lhs, rhs))
}

pub fn lemma_b1(l: u32, n: u32, point: &RationalPoint) -> Result<IdentityReport> {
    let started = Instant::now();
    let mut p = point.clone();
    let (lhs, rhs) = lemma_b1_sides(l, n, &mut p)?;
    let mut report = IdentityReport::new("lemma-b1").with_param("l", l).with_param("n", n);
    report.record_values(&lhs, &rhs, Some(format!("l={l} n={n} point {point}")));
    Ok(report.finish(started))
}

pub fn appendix_c_sum(l: u32, n: u32, point: &RationalPoint) -> Result<IdentityReport> {
    let started = Instant::now();
    let mut p = point.clone();
    let (lhs, rhs) = appendix_c_sides(l, n, &mut p)?;
    let mut report = IdentityReport::new("appx-c").with_param("l", l).with_param("n", n);
    report.record_values(&lhs, &rhs, Some(format!("l={l} n={n} point {point}")));
    Ok(report.finish(started))
}

/// Draws `count` random points for `vars` from `seed`, skipping any point
/// at which `eval` hits a pole.
pub fn seeded_points(vars: &[&str], count: usize, seed: u64, max_length: u32) -> Vec<RationalPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| RationalPoint::random(vars, &mut rng, max_length))
        .collect()
}

/// Runs `check` over a grid of points, rejection-sampling replacements for
/// points that hit a pole. Returns the evaluated points alongside.
pub fn sample_points<F>(
    vars: &[&str],
    count: usize,
    seed: u64,
    max_length: u32,
    mut check: F,
) -> Result<Vec<RationalPoint>>
where
    F: FnMut(&RationalPoint) -> Result<()>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut accepted = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while accepted.len() < count {
        attempts += 1;
        if attempts > 100 * count.max(1) {
            return Err(Error::Domain(format!(
                "could not find {count} pole-free points for {vars:?}"
            )));
        }
        let p = RationalPoint::random(vars, &mut rng, max_length);
        match check(&p) {
            Ok(()) => accepted.push(p),
            Err(Error::Pole { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(accepted)
}

/// Defining sums and closed forms of
/// `B_n(z;q) = sum_s (-1)^{n-s} q^{C(n-s,2)} / ((q;q)_s^2 (q;q)_{n-s}) sum_{u1,u2} [s,u1][s,u2] z^{2u1-2u2}`
/// and `Phi_{n,n'}(q) = sum_s (-1)^{n-s} q^{C(n-s,2)} (q;q)_{s+n'} / ((q;q)_s^2 (q;q)_{n-s})`.
#[derive(Clone, Debug)]
pub struct BPhiForms {
    pub b_sum: Series,
    pub b_closed: Series,
    pub phi_sum: Series,
    pub phi_closed: Series,
}

pub fn b_phi_closed(n: u32, n_prime: u32, trunc: Truncation) -> Result<BPhiForms> {
    let one = Rational::one();
    let mut b_sum = Series::zero(trunc);
    let mut phi_sum = Series::zero(trunc);
    for s in 0..=n {
        let k = n - s;
        let sign = if k % 2 == 0 { int(1) } else { int(-1) };
        let weight = Series::monomial(sign, crate::series::Monomial::q(k * k.saturating_sub(1) / 2), trunc);
        let den = &(&qq(s, trunc) * &qq(s, trunc)) * &qq(k, trunc);
        let scalar = &weight * &den.invert()?;
        let mut z_part = Series::zero(trunc);
        for u1 in 0..=s {
            for u2 in 0..=s {
                let c = &qbinomial(s as i64, u1 as i64, trunc) * &qbinomial(s as i64, u2 as i64, trunc);
                z_part = &z_part
                    + &c.mul_monomial(&one, &crate::series::Monomial::z(2 * u1 as i32 - 2 * u2 as i32));
            }
        }
        b_sum = &b_sum + &(&scalar * &z_part);
        phi_sum = &phi_sum + &(&scalar * &qq(s + n_prime, trunc));
    }
    let qn_inv = qfunctions::qq_inv(n, trunc);
    let b_closed = &hermite(2 * n, trunc) * &(&qn_inv * &qn_inv);
    let phi_closed = &(&qq(n_prime, trunc) * &qn_inv)
        * &qbinomial(n_prime as i64, n as i64, trunc).mul_monomial(&one, &crate::series::Monomial::q(n * n));
    Ok(BPhiForms { b_sum, b_closed, phi_sum, phi_closed })
}

/// Binomial-theorem style helper used by the tests: `(b - q^0)(b - q)...`
/// at a rational point.
pub fn combined_poch_at(b: &Rational, n: u32, point: &RationalPoint) -> Rational {
    let q = point.q();
    (0..n as i64).fold(Rational::one(), |acc, i| acc * (b - pow_i(&q, i)))
}

#[doc(hidden)]
pub fn combined_poch_series(b: &Rational, n: u32, trunc: Truncation) -> Series {
    combined_poch(b, n, trunc)
}

/// Integer part of a rational, for reporting only.
pub fn is_integral(r: &Rational) -> bool {
    r.denom().abs() == BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rat;

    fn point(vals: &[(&str, Rational)]) -> RationalPoint {
        RationalPoint::new(vals.iter().map(|(k, v)| (k.to_string(), v.clone())), 16).unwrap()
    }

    fn fixed() -> RationalPoint {
        point(&[("q", rat(2, 3)), ("t", rat(3, 5)), ("s", rat(5, 7))])
    }

    #[test]
    fn roots_of_unity_are_rejected() {
        assert!(RationalPoint::new([("q", int(1))], 4).is_err());
        assert!(RationalPoint::new([("q", int(-1))], 4).is_err());
        assert!(RationalPoint::new([("q", int(0))], 4).is_err());
        assert!(RationalPoint::new([("t", int(2))], 4).is_err());
    }

    #[test]
    fn negative_pochhammer_convention() {
        let mut p = fixed();
        let q = p.q();
        let a = rat(7, 2);
        // (a;q)_{-2} = 1/((1 - a/q)(1 - a/q^2))
        let expected = (Rational::one() - &a / &q).recip() * (Rational::one() - &a / (&q * &q)).recip();
        assert_eq!(p.poch(&a, -2, "a").unwrap(), expected);
        assert_eq!(p.poch_recip(&a, -2, "a").unwrap(), expected.recip());
        // (q;q)_{-1} is infinite, its reciprocal zero
        assert!(matches!(p.poch(&q, -1, "q"), Err(Error::Pole { .. })));
        assert!(p.poch_recip(&q, -1, "q").unwrap().is_zero());
    }

    #[test]
    fn one_phi_zero_values() {
        let mut p = fixed();
        let q = p.q();
        for n in 1..5 {
            let v = phi_terminating(&PhiSpec { upper: vec![], lower: vec![], argument: q.clone(), n }, &mut p).unwrap();
            assert!(v.is_zero(), "n={n}");
        }
        let v = phi_terminating(&PhiSpec { upper: vec![], lower: vec![], argument: rat(3, 11), n: 0 }, &mut p).unwrap();
        assert_eq!(v, int(1));
    }

    #[test]
    fn classical_identities_at_fixed_points() {
        let pts = [
            point(&[("q", rat(2, 3)), ("a", rat(5, 7)), ("b", rat(11, 3)), ("c", rat(13, 17)), ("z", rat(3, 4)), ("r", rat(5, 6))]),
            point(&[("q", rat(7, 5)), ("a", rat(2, 9)), ("b", rat(3, 13)), ("c", rat(19, 4)), ("z", rat(9, 2)), ("r", rat(3, 8))]),
        ];
        for p in &pts {
            for id in ClassicalIdentity::ALL {
                if id == ClassicalIdentity::Heine1 {
                    continue;
                }
                for n in 0..=5 {
                    let r = classical_check(id, p, n).unwrap();
                    assert!(r.passed(), "{id} n={n}: {r}");
                }
            }
        }
    }

    #[test]
    fn pfaff_saalschutz_example() {
        let p = point(&[("q", rat(3, 7)), ("a", rat(2, 5)), ("b", rat(9, 4)), ("c", rat(5, 11))]);
        let r = classical_check(ClassicalIdentity::PfaffSaalschutz, &p, 3).unwrap();
        assert!(r.passed());
        assert!(classical_check(ClassicalIdentity::PfaffSaalschutz, &p, 0).unwrap().passed());
    }

    #[test]
    fn heine_transformation_as_series() {
        let trunc = Truncation::with_s(4, 5, 4);
        let (lhs, rhs) = heine_sides(&rat(2, 7), &rat(5, 3), trunc).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn s_closed_form_at_fixed_point() {
        let mut p = fixed();
        for n in 0..=3 {
            for d in -6..=6 {
                let a = s_sum(d, n, &mut p).unwrap();
                let b = s_closed(d, n, &mut p).unwrap();
                assert_eq!(a, b, "d={d} n={n}");
            }
        }
    }

    #[test]
    fn s_at_n_zero() {
        let mut p = fixed();
        let t = p.get("t").unwrap();
        for d in -3..=3i64 {
            let expected = p.poch(&t.recip(), d, "").unwrap() * pow_i(&t, d) * p.poch_recip(&t, d, "").unwrap();
            assert_eq!(s_sum(d, 0, &mut p).unwrap(), expected);
            assert_eq!(s_closed(d, 0, &mut p).unwrap(), expected);
        }
    }

    #[test]
    fn pairing_identity() {
        let mut p = fixed();
        for l in 0..=3 {
            for n in 0..=3 {
                let (a, b) = s_symmetry(l, n, &mut p).unwrap();
                assert_eq!(a, b, "l={l} n={n}");
            }
        }
    }

    // Independent brute force for l = 1, n = 0: the three summands written out.
    #[test]
    fn key_sum_three_term_expansion() {
        let mut p = fixed();
        let (q, t) = (p.q(), p.get("t").unwrap());
        let one = Rational::one();
        // j = 0: (t^-1;q)_{-1} / ((q;q)_2 (t;q)_{-1}) = (1 - t q^-1) / ((1-q)(1-q^2)(1 - t^-1 q^-1))
        let j0 = (&one - &t / &q) / ((&one - &q) * (&one - &q * &q) * (&one - (&t * &q).recip()));
        // j = 1: t / ((1-q)(1-q))
        let j1 = &t / ((&one - &q) * (&one - &q));
        // j = 2: (1 - t^-1) t^2 / ((1-q)(1-q^2)(1-t))
        let j2 = (&one - t.recip()) * &t * &t / ((&one - &q) * (&one - &q * &q) * (&one - &t));
        let brute = j0 + j1 + j2;
        let closed = &t * &t / ((&one - &q) * (&one - &t * &q));
        assert_eq!(brute, closed);
        let (lhs, rhs) = lemma_b1_sides(1, 0, &mut p).unwrap();
        assert_eq!(lhs, brute);
        assert_eq!(rhs, closed);
    }

    #[test]
    fn key_sum_vanishes_below_diagonal() {
        let mut p = fixed();
        for n in 1..=4 {
            for l in 0..n {
                let (lhs, rhs) = lemma_b1_sides(l, n, &mut p).unwrap();
                assert!(lhs.is_zero() && rhs.is_zero(), "l={l} n={n}");
                let (lhs, rhs) = appendix_c_sides(l, n, &mut p).unwrap();
                assert!(lhs.is_zero() && rhs.is_zero(), "l={l} n={n}");
            }
        }
        let (lhs, rhs) = lemma_b1_sides(0, 0, &mut p).unwrap();
        assert_eq!((lhs, rhs), (int(1), int(1)));
        let (lhs, rhs) = appendix_c_sides(0, 0, &mut p).unwrap();
        assert_eq!((lhs, rhs), (int(1), int(1)));
    }

    #[test]
    fn s_extension_reduces_at_s_zero() {
        let p = fixed().with("s", int(0));
        for l in 0..=4 {
            for n in 0..=4 {
                let mut a = p.clone();
                let mut b = p.clone();
                assert_eq!(
                    appendix_c_sides(l, n, &mut a).unwrap(),
                    lemma_b1_sides(l, n, &mut b).unwrap()
                );
            }
        }
    }

    #[test]
    fn key_sums_at_fixed_point() {
        let p = fixed();
        for l in 0..=6 {
            for n in 0..=6 {
                assert!(lemma_b1(l, n, &p).unwrap().passed(), "l={l} n={n}");
            }
        }
        for l in 0..=4 {
            for n in 0..=4 {
                assert!(appendix_c_sum(l, n, &p).unwrap().passed(), "l={l} n={n}");
            }
        }
    }

    #[test]
    fn degenerate_t_is_a_pole_not_a_mismatch() {
        let p = RationalPoint::new([("q", rat(9, 62)), ("t", rat(1, 1)), ("s", rat(21, 29))], 32).unwrap();
        assert!(matches!(lemma_b1(1, 0, &p), Err(Error::Pole { .. })));
        assert!(matches!(appendix_c_sum(1, 0, &p), Err(Error::Pole { .. })));
    }

    #[test]
    fn pole_is_named() {
        // t = q^-1 makes (tq;q)_1 vanish on the right-hand side
        let mut p = point(&[("q", rat(2, 3)), ("t", rat(3, 2))]);
        let err = lemma_b1_sides(1, 0, &mut p).unwrap_err();
        assert!(matches!(err, Error::Pole { .. }), "{err}");
    }

    #[test]
    fn b_and_phi_closed_forms() {
        let trunc = Truncation::new(8, 0);
        for n in 0..=4 {
            for np in 0..=4 {
                let f = b_phi_closed(n, np, trunc).unwrap();
                assert_eq!(f.b_sum, f.b_closed, "B n={n}");
                assert_eq!(f.phi_sum, f.phi_closed, "Phi n={n} n'={np}");
                if n > np {
                    assert!(f.phi_sum.is_zero());
                }
            }
        }
        let f = b_phi_closed(0, 3, trunc).unwrap();
        assert_eq!(f.b_sum, Series::one(trunc));
        assert_eq!(f.phi_sum, qq(3, trunc));
    }

    #[test]
    fn random_points_are_reproducible() {
        let a = seeded_points(&["q", "t"], 5, 42, 16);
        let b = seeded_points(&["q", "t"], 5, 42, 16);
        let fmt = |v: &[RationalPoint]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>();
        assert_eq!(fmt(&a), fmt(&b));
        assert!(a.iter().all(|p| p.pole_log().is_empty()));
    }

    #[test]
    fn combined_poch_agrees_with_series() {
        let p = point(&[("q", rat(2, 3))]);
        assert_eq!(combined_poch_at(&int(0), 3, &p), -pow_i(&p.q(), 3));
        let s = combined_poch_series(&int(0), 3, Truncation::new(5, 0));
        assert_eq!(s.coefficient(&crate::series::Monomial::q(3)), int(-1));
    }
}
