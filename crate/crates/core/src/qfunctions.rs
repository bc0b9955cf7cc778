//! q-Pochhammer symbols, Gaussian binomials, the continuous q-Hermite and
//! q-ultraspherical polynomials, and the constant-term functional that stands
//! in for the circle integrals `(1/pi) int_0^pi ... d theta`.

use std::collections::HashMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::series::{int, Monomial, Rational, Series, Truncation};

/// Length of a q-Pochhammer symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PochLength {
    Finite(i64),
    Infinite,
}

/// `(base; q)_length` as a value that can be expanded in the series ring.
#[derive(Clone, Debug)]
pub struct PochhammerArg {
    pub base: Series,
    pub length: PochLength,
}

impl PochhammerArg {
    pub fn new(base: Series, length: PochLength) -> Self {
        PochhammerArg { base, length }
    }

    pub fn eval(&self) -> Result<Series> {
        match self.length {
            PochLength::Finite(n) => poch_finite(&self.base, n),
            PochLength::Infinite => poch_infinite(&self.base),
        }
    }
}

/// The unit-coefficient monomial `q^a t^b s^c z^e` as a series.
pub fn mono(q: u32, t: u32, s: u32, z: i32, trunc: Truncation) -> Series {
    Series::mono(Monomial::new(q, t, s, z), trunc)
}

fn one_minus(x: &Series) -> Series {
    &Series::one(x.trunc()) - x
}

/// `x * q^{-j}`, failing if some term of `x` has q-degree below `j`.
fn divide_by_q_power(x: &Series, j: u32) -> Result<Series> {
    let terms: Option<Vec<_>> = x
        .terms()
        .map(|(m, c)| {
            (m.q >= j).then(|| (Monomial { q: m.q - j, ..*m }, c.clone()))
        })
        .collect();
    terms
        .map(|t| Series::from_terms(t, x.trunc()))
        .ok_or_else(|| {
            Error::Domain(format!(
                "negative-length Pochhammer needs ({}) * q^-{j} inside the series ring",
                x.render()
            ))
        })
}

/// `prod_{k=0}^{n-1} (1 - a q^k)`; for `n = -m < 0`, `1 / (a q^{-m}; q)_m`.
pub fn poch_finite(a: &Series, n: i64) -> Result<Series> {
    let trunc = a.trunc();
    if n >= 0 {
        let mut out = Series::one(trunc);
        let mut shifted = a.clone();
        for _ in 0..n {
            if shifted.is_zero() {
                break;
            }
            out = &out * &one_minus(&shifted);
            shifted = shifted.mul_monomial(&Rational::one(), &Monomial::q(1));
        }
        Ok(out)
    } else {
        let m = (-n) as u32;
        let mut denom = Series::one(trunc);
        for j in 1..=m {
            denom = &denom * &one_minus(&divide_by_q_power(a, j)?);
        }
        denom.invert().map_err(|_| {
            Error::Domain(format!(
                "({}; q)_{n} has a vanishing factor",
                a.render()
            ))
        })
    }
}

/// `1 / (a; q)_n`.
pub fn poch_finite_inv(a: &Series, n: i64) -> Result<Series> {
    poch_finite(a, n)?.invert()
}

/// `prod_{k>=0} (1 - a q^k)`, stopping once `a q^k` vanishes mod truncation.
pub fn poch_infinite(a: &Series) -> Result<Series> {
    let trunc = a.trunc();
    let guard = trunc.max_degree() as usize + 2;
    let mut out = Series::one(trunc);
    let mut shifted = a.clone();
    for _ in 0..guard {
        if shifted.is_zero() {
            return Ok(out);
        }
        out = &out * &one_minus(&shifted);
        shifted = shifted.mul_monomial(&Rational::one(), &Monomial::q(1));
    }
    if shifted.is_zero() {
        Ok(out)
    } else {
        Err(Error::Domain(format!(
            "({}; q)_inf does not terminate within {guard} factors",
            a.render()
        )))
    }
}

pub fn poch_infinite_inv(a: &Series) -> Result<Series> {
    poch_infinite(a)?.invert()
}

/// `prod_{i=0}^{n-1} (b - q^i)`, i.e. `(1/b; q)_n b^n` continued to `b = 0`.
pub fn combined_poch(b: &Rational, n: u32, trunc: Truncation) -> Series {
    let mut out = Series::one(trunc);
    for i in 0..n {
        let factor = &Series::constant(b.clone(), trunc) - &mono(i, 0, 0, 0, trunc);
        out = &out * &factor;
    }
    out
}

/// `(q; q)_n` with `n >= 0`.
pub fn qq(n: u32, trunc: Truncation) -> Series {
    poch_finite(&mono(1, 0, 0, 0, trunc), n as i64).expect("(q;q)_n with n >= 0")
}

/// `1 / (q; q)_n`.
pub fn qq_inv(n: u32, trunc: Truncation) -> Series {
    qq(n, trunc).invert().expect("(q;q)_n has constant term 1")
}

static QBINOMIAL_MEMO: OnceLock<RwLock<HashMap<(u32, u32), Arc<Vec<BigInt>>>>> = OnceLock::new();
static QBINOMIAL_FAULT: AtomicBool = AtomicBool::new(false);

/// Fault injection for mutation testing of the verification layer: while
/// set, every nontrivial Gaussian binomial gets an extra `q^1`.
#[doc(hidden)]
pub fn set_qbinomial_fault(on: bool) {
    QBINOMIAL_FAULT.store(on, Ordering::SeqCst);
}

/// Coefficients of the Gaussian polynomial `[m choose n]_q` (index = q-power),
/// via the q-Pascal rule `[m,n] = [m-1,n-1] + q^n [m-1,n]`.
pub fn qbinomial_poly(m: u32, n: u32) -> Arc<Vec<BigInt>> {
    let memo = QBINOMIAL_MEMO.get_or_init(Default::default);
    if let Some(p) = memo.read().unwrap().get(&(m, n)) {
        return p.clone();
    }
    let poly = if n > m {
        Vec::new()
    } else if n == 0 || n == m {
        vec![BigInt::one()]
    } else {
        let left = qbinomial_poly(m - 1, n - 1);
        let right = qbinomial_poly(m - 1, n);
        let len = (n * (m - n) + 1) as usize;
        let mut out = vec![BigInt::zero(); len];
        for (i, c) in left.iter().enumerate() {
            out[i] += c;
        }
        for (i, c) in right.iter().enumerate() {
            out[i + n as usize] += c;
        }
        out
    };
    let poly = Arc::new(poly);
    memo.write().unwrap().insert((m, n), poly.clone());
    poly
}

/// `[m choose n]_q`, zero unless `0 <= n <= m`.
pub fn qbinomial(m: i64, n: i64, trunc: Truncation) -> Series {
    if m < 0 || n < 0 || n > m {
        return Series::zero(trunc);
    }
    let poly = qbinomial_poly(m as u32, n as u32);
    let mut s = Series::from_terms(
        poly.iter()
            .enumerate()
            .map(|(i, c)| (Monomial::q(i as u32), Rational::from_integer(c.clone()))),
        trunc,
    );
    if QBINOMIAL_FAULT.load(Ordering::SeqCst) && n > 0 && n < m {
        s = &s + &mono(1, 0, 0, 0, trunc);
    }
    s
}

/// Continuous q-Hermite polynomial `H_n(z; q) = sum_j [n choose j]_q z^{n-2j}`.
pub fn hermite(n: u32, trunc: Truncation) -> Series {
    let mut out = Series::zero(trunc);
    for j in 0..=n {
        let b = qbinomial(n as i64, j as i64, trunc);
        out = &out + &b.mul_monomial(&Rational::one(), &Monomial::z(n as i32 - 2 * j as i32));
    }
    out
}

/// Continuous q-ultraspherical polynomial
/// `C_n(z, p; q) = sum_j (p;q)_j (p;q)_{n-j} / ((q;q)_j (q;q)_{n-j}) z^{n-2j}`
/// for a parameter series `p` (typically the monomial `t` or `s`).
pub fn ultraspherical(n: u32, param: &Series) -> Result<Series> {
    let trunc = param.trunc();
    let ratios: Vec<Series> = (0..=n)
        .map(|j| Ok(&poch_finite(param, j as i64)? * &qq_inv(j, trunc)))
        .collect::<Result<_>>()?;
    let mut out = Series::zero(trunc);
    for j in 0..=n {
        let c = &ratios[j as usize] * &ratios[(n - j) as usize];
        out = &out + &c.mul_monomial(&Rational::one(), &Monomial::z(n as i32 - 2 * j as i32));
    }
    Ok(out)
}

/// z-constant term of a z-symmetric series: the circle average
/// `(1/pi) int_0^pi f(e^{i theta}) d theta`.
pub fn ct_z(f: &Series) -> Result<Series> {
    if !f.is_flip_symmetric() {
        return Err(Error::Domain(
            "constant-term extraction needs a z <-> 1/z symmetric integrand".into(),
        ));
    }
    Ok(f.z_constant_part())
}

/// `(z^2, z^-2; q)_inf`.
pub fn hermite_weight(trunc: Truncation) -> Series {
    let a = poch_infinite(&mono(0, 0, 0, 2, trunc)).expect("terminates");
    let b = poch_infinite(&mono(0, 0, 0, -2, trunc)).expect("terminates");
    &a * &b
}

/// `(z^2, z^-2; q)_inf / (p z^2, p z^-2; q)_inf` for a parameter monomial `p`.
pub fn ultraspherical_weight(param: Monomial, trunc: Truncation) -> Result<Series> {
    let up = Monomial { z: 2, ..param };
    let down = Monomial { z: -2, ..param };
    let den = &poch_infinite(&Series::mono(up, trunc))? * &poch_infinite(&Series::mono(down, trunc))?;
    Ok(&hermite_weight(trunc) * &den.invert()?)
}

/// Circle inner product of `H_m` and `H_n` against the q-Hermite weight.
pub fn hermite_inner(m: u32, n: u32, trunc: Truncation) -> Result<Series> {
    let integrand = &(&hermite(m, trunc) * &hermite(n, trunc)) * &hermite_weight(trunc);
    ct_z(&integrand)
}

/// `2 (q;q)_n / (q;q)_inf * delta_{m,n}`.
pub fn hermite_inner_closed(m: u32, n: u32, trunc: Truncation) -> Result<Series> {
    if m != n {
        return Ok(Series::zero(trunc));
    }
    let qinf = poch_infinite_inv(&mono(1, 0, 0, 0, trunc))?;
    Ok((&qq(n, trunc) * &qinf).scale(&int(2)))
}

fn require_s(trunc: Truncation) -> Result<()> {
    if trunc.max_s.is_none() {
        return Err(Error::Usage("this computation needs a truncation carrying s".into()));
    }
    Ok(())
}

/// Circle inner product of `C_m(z,s)` and `C_n(z,s)` against the
/// q-ultraspherical weight with parameter `s`.
pub fn ultraspherical_inner(m: u32, n: u32, trunc: Truncation) -> Result<Series> {
    require_s(trunc)?;
    let s = mono(0, 0, 1, 0, trunc);
    let integrand = &(&ultraspherical(m, &s)? * &ultraspherical(n, &s)?)
        * &ultraspherical_weight(Monomial::s(1), trunc)?;
    ct_z(&integrand)
}

/// `2 (1-s) (s^2;q)_n (s, sq; q)_inf / ((1 - s q^n) (q;q)_n (q, s^2; q)_inf) * delta_{m,n}`.
pub fn ultraspherical_inner_closed(m: u32, n: u32, trunc: Truncation) -> Result<Series> {
    require_s(trunc)?;
    if m != n {
        return Ok(Series::zero(trunc));
    }
    let s = mono(0, 0, 1, 0, trunc);
    let s2 = mono(0, 0, 2, 0, trunc);
    let one_minus_s = one_minus(&s);
    let one_minus_sqn = one_minus(&mono(n, 0, 1, 0, trunc));
    let num = &(&(&one_minus_s * &poch_finite(&s2, n as i64)?) * &poch_infinite(&s)?)
        * &poch_infinite(&mono(1, 0, 1, 0, trunc))?;
    let den = &(&(&one_minus_sqn * &qq(n, trunc)) * &poch_infinite(&mono(1, 0, 0, 0, trunc))?)
        * &poch_infinite(&s2)?;
    Ok((&num * &den.invert()?).scale(&int(2)))
}

/// Right-hand side of the product linearization
/// `H_m H_n = sum_l (q;q)_m (q;q)_n / ((q;q)_l (q;q)_{m-l} (q;q)_{n-l}) H_{m+n-2l}`.
pub fn hermite_linearize(m: u32, n: u32, trunc: Truncation) -> Series {
    let mut out = Series::zero(trunc);
    for l in 0..=m.min(n) {
        let num = &qq(m, trunc) * &qq(n, trunc);
        let den = &(&qq(l, trunc) * &qq(m - l, trunc)) * &qq(n - l, trunc);
        let c = &num * &den.invert().expect("unit");
        out = &out + &(&c * &hermite(m + n - 2 * l, trunc));
    }
    out
}

/// `c_{n,l}` in `C_{2n}(z,t;q) / (t z^2, t z^-2; q)_inf = sum_l c_{n,l} H_{2l}(z;q)`,
/// extracted by q-Hermite orthogonality.
pub fn hermite_expansion_coeff(n: u32, l: u32, trunc: Truncation) -> Result<Series> {
    let t = mono(0, 1, 0, 0, trunc);
    let integrand = &(&ultraspherical(2 * n, &t)? * &hermite(2 * l, trunc))
        * &ultraspherical_weight(Monomial::t(1), trunc)?;
    let integral = ct_z(&integrand)?;
    let q_inf = poch_infinite(&mono(1, 0, 0, 0, trunc))?;
    let factor = &q_inf * &qq_inv(2 * l, trunc);
    Ok((&factor * &integral).scale(&Rational::new(1.into(), 2.into())))
}

/// Closed form
/// `(t,tq;q)_inf (t^2;q)_{2n} t^{l-n} / ((t^2;q)_inf (q;q)_{2n} (q;q)_{l-n} (tq;q)_{l+n})`,
/// zero for `l < n`.
pub fn hermite_expansion_coeff_closed(n: u32, l: u32, trunc: Truncation) -> Result<Series> {
    if l < n {
        return Ok(Series::zero(trunc));
    }
    let t = mono(0, 1, 0, 0, trunc);
    let tq = mono(1, 1, 0, 0, trunc);
    let t2 = mono(0, 2, 0, 0, trunc);
    let num = &(&poch_infinite(&t)? * &poch_infinite(&tq)?) * &poch_finite(&t2, 2 * n as i64)?;
    let den = &(&(&poch_infinite(&t2)? * &qq(2 * n, trunc)) * &qq(l - n, trunc))
        * &poch_finite(&tq, (l + n) as i64)?;
    Ok((&num * &den.invert()?).mul_monomial(&Rational::one(), &Monomial::t(l - n)))
}

/// Both sides of the bilateral weight expansion obtained from Ramanujan's
/// 1psi1 sum:
///
/// `(z^2,z^-2;q)_inf / (tz^2,tz^-2;q)_inf
///   = (t,tq;q)_inf (1 - z^-2) / (q,t^2;q)_inf * sum_k term_k z^{2k}`
///
/// with `term_k = prod_{i<k} (t - q^i) / (t;q)_k` for `k >= 0` and
/// `term_{-m} = (-1)^m prod_{j=1}^m (q^j - t) / (tq;q)_m`. Both index-combined
/// forms keep all exponents nonnegative.
pub fn weight_expansion(trunc: Truncation) -> Result<(Series, Series)> {
    let lhs = ultraspherical_weight(Monomial::t(1), trunc)?;

    let t = mono(0, 1, 0, 0, trunc);
    let tq = mono(1, 1, 0, 0, trunc);
    // largest r with r(r-1)/2 <= max_q bounds how many pure-q factors survive
    let mut r = 0u32;
    while (r + 1) * r / 2 <= trunc.max_q {
        r += 1;
    }
    let k_max = trunc.max_t + r + 1;

    let mut bilateral = Series::zero(trunc);
    let mut upper = Series::one(trunc);
    let mut lower = Series::one(trunc);
    for k in 0..=k_max {
        let term = &upper * &poch_finite_inv(&t, k as i64)?;
        bilateral = &bilateral + &term.mul_monomial(&Rational::one(), &Monomial::z(2 * k as i32));
        upper = &upper * &(&t - &mono(k, 0, 0, 0, trunc));

        if k >= 1 {
            let sign = if k % 2 == 0 { int(1) } else { int(-1) };
            lower = &lower * &(&mono(k, 0, 0, 0, trunc) - &t);
            let term = (&lower * &poch_finite_inv(&tq, k as i64)?).scale(&sign);
            bilateral = &bilateral + &term.mul_monomial(&Rational::one(), &Monomial::z(-2 * k as i32));
        }
    }

    let one_minus_zinv = one_minus(&mono(0, 0, 0, -2, trunc));
    let num = &(&poch_infinite(&t)? * &poch_infinite(&tq)?) * &one_minus_zinv;
    let den = &poch_infinite(&mono(1, 0, 0, 0, trunc))? * &poch_infinite(&mono(0, 2, 0, 0, trunc))?;
    let rhs = &(&num * &den.invert()?) * &bilateral;
    Ok((lhs, rhs))
}
