//! Bailey pairs, conjugate pairs, the Bailey chain, the conjugate WP pair,
//! and the Bailey transform, all relative to `(t, q)` with
//! `u_n = 1/(q;q)_n`, `v_n = 1/(tq;q)_n`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qfunctions::{combined_poch, mono, poch_finite, poch_infinite, qbinomial, qq, qq_inv};
use crate::report::IdentityReport;
use crate::series::{int, sum_series, Monomial, Rational, Series, Truncation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairKind {
    Alpha,
    Beta,
    Gamma,
    Delta,
}

impl fmt::Display for PairKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairKind::Alpha => "alpha",
            PairKind::Beta => "beta",
            PairKind::Gamma => "gamma",
            PairKind::Delta => "delta",
        })
    }
}

type Body = dyn Fn(usize) -> Result<Series> + Send + Sync;

/// A sequence `n -> t^{t_step * n} * body(n)` of truncated series.
///
/// `support_bound`, when present, is an index beyond which every entry
/// vanishes mod truncation; infinite sums over the family are cut there.
pub struct PairFamily {
    name: String,
    kind: PairKind,
    trunc: Truncation,
    support_bound: Option<usize>,
    t_step: u32,
    tq_depth: u32,
    body: Box<Body>,
    memo: Mutex<HashMap<usize, Series>>,
}

impl fmt::Debug for PairFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PairFamily")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("trunc", &self.trunc)
            .field("support_bound", &self.support_bound)
            .finish()
    }
}

impl PairFamily {
    pub fn new<F>(name: impl Into<String>, kind: PairKind, trunc: Truncation, support_bound: Option<usize>, body: F) -> Self
    where
        F: Fn(usize) -> Result<Series> + Send + Sync + 'static,
    {
        PairFamily {
            name: name.into(),
            kind,
            trunc,
            support_bound,
            t_step: 0,
            tq_depth: 0,
            body: Box::new(body),
            memo: Mutex::new(HashMap::new()),
        }
    }

    /// Declares that entry `n` is `t^{step * n}` times the body.
    pub fn with_t_step(mut self, step: u32) -> Self {
        self.t_step = step;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> PairKind {
        self.kind
    }

    pub fn trunc(&self) -> Truncation {
        self.trunc
    }

    pub fn support_bound(&self) -> Option<usize> {
        self.support_bound
    }

    pub fn t_step(&self) -> u32 {
        self.t_step
    }

    /// Entry `n` without its `t^{t_step * n}` prefactor.
    pub fn body(&self, n: usize) -> Result<Series> {
        (self.body)(n)
    }

    pub fn entry(&self, n: usize) -> Result<Series> {
        if let Some(hit) = self.memo.lock().expect("memo poisoned").get(&n) {
            return Ok(hit.clone());
        }
        let mut value = self.body(n)?;
        if self.t_step > 0 {
            value = value.mul_monomial(&Rational::one(), &Monomial::t(self.t_step * n as u32));
        }
        self.memo.lock().expect("memo poisoned").insert(n, value.clone());
        Ok(value)
    }

    fn require_bound(&self) -> Result<usize> {
        self.support_bound
            .ok_or_else(|| Error::MissingSupportBound { family: self.name.clone() })
    }
}

/// Parameters `b_1..b_k`, `c_1..c_k` of a k-fold Bailey chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainParams {
    pub b: Vec<Rational>,
    pub c: Vec<Rational>,
}

impl ChainParams {
    pub fn new(b: Vec<Rational>, c: Vec<Rational>) -> Result<Self> {
        if b.len() != c.len() {
            return Err(Error::Usage(format!(
                "chain needs as many b's as c's, got {} and {}",
                b.len(),
                c.len()
            )));
        }
        Ok(ChainParams { b, c })
    }

    /// All parameters zero.
    pub fn zeros(k: usize) -> Self {
        ChainParams { b: vec![Rational::zero(); k], c: vec![Rational::zero(); k] }
    }

    pub fn k(&self) -> usize {
        self.b.len()
    }
}

/// Largest `m` with `m(m-1)/2 <= cap`.
pub fn triangular_reach(cap: u32) -> usize {
    let mut m = 0usize;
    while (m + 1) * m / 2 <= cap as usize {
        m += 1;
    }
    m
}

fn sign(n: usize) -> Rational {
    if n % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

/// `1/(tq;q)_m` for `m = 0..=len`.
fn tq_inverses(trunc: Truncation, len: usize) -> Result<Vec<Series>> {
    let one = Series::one(trunc);
    let mut out = Vec::with_capacity(len + 1);
    out.push(one.clone());
    let mut acc = one.clone();
    for m in 1..=len {
        let factor = &one - &mono(m as u32, 1, 0, 0, trunc);
        acc = &acc * &factor;
        out.push(acc.invert()?);
    }
    Ok(out)
}

fn q_inverses(trunc: Truncation, len: usize) -> Vec<Series> {
    (0..=len).map(|m| qq_inv(m as u32, trunc)).collect()
}

/// The unit pair: `alpha_n = (-1)^n q^{C(n,2)} (1 - t q^{2n}) (t;q)_n / ((1-t)(q;q)_n)`
/// with `(t;q)_n/(1-t) = (tq;q)_{n-1}`, and `beta_n = [n = 0]`.
pub fn seed_pair(trunc: Truncation) -> (Arc<PairFamily>, Arc<PairFamily>) {
    let alpha_bound = triangular_reach(trunc.max_q);
    let alpha = PairFamily::new("seed", PairKind::Alpha, trunc, Some(alpha_bound), move |n| {
        if n == 0 {
            return Ok(Series::one(trunc));
        }
        let lead = Series::monomial(sign(n), Monomial::q((n * (n - 1) / 2) as u32), trunc);
        let tail = &Series::one(trunc) - &mono(2 * n as u32, 1, 0, 0, trunc);
        let tq = poch_finite(&mono(1, 1, 0, 0, trunc), n as i64 - 1)?;
        Ok(&(&(&lead * &tail) * &tq) * &qq_inv(n as u32, trunc))
    });
    let beta = PairFamily::new("seed", PairKind::Beta, trunc, Some(0), move |n| {
        Ok(if n == 0 { Series::one(trunc) } else { Series::zero(trunc) })
    });
    (Arc::new(alpha), Arc::new(beta))
}

/// One application of Bailey's lemma with parameters `(b, c)`.
pub fn lemma_step(
    alpha: &Arc<PairFamily>,
    beta: &Arc<PairFamily>,
    b: &Rational,
    c: &Rational,
) -> Result<(Arc<PairFamily>, Arc<PairFamily>)> {
    let trunc = alpha.trunc;
    if beta.trunc != trunc {
        return Err(Error::TruncationMismatch { left: trunc, right: beta.trunc });
    }
    let depth = alpha.tq_depth + 1;
    let reach = (trunc.max_t.min(trunc.max_q) / depth) as usize;
    let bound = alpha.support_bound.map_or(reach, |a| a.min(reach));
    let name = format!("{}+lift({},{})", alpha.name, crate::series::render_rational(b), crate::series::render_rational(c));

    // (b tq; q)_n (c tq; q)_n inverses and the numerator polynomials
    let btq = mono(1, 1, 0, 0, trunc).scale(b);
    let ctq = mono(1, 1, 0, 0, trunc).scale(c);
    let bctq = mono(1, 1, 0, 0, trunc).scale(&(b * c));
    let den_inv = {
        let (btq, ctq) = (btq.clone(), ctq.clone());
        move |n: usize| -> Result<Series> {
            (&poch_finite(&btq, n as i64)? * &poch_finite(&ctq, n as i64)?).invert()
        }
    };
    let (bb, cc) = (b.clone(), c.clone());
    let numer = move |n: usize| -> Series {
        (&combined_poch(&bb, n as u32, trunc) * &combined_poch(&cc, n as u32, trunc))
            .mul_monomial(&Rational::one(), &Monomial::qt(n as u32, n as u32))
    };

    let lower_alpha = Arc::clone(alpha);
    let (den_a, num_a) = (den_inv.clone(), numer.clone());
    let mut new_alpha = PairFamily::new(name.clone(), PairKind::Alpha, trunc, Some(bound), move |n| {
        let a = lower_alpha.entry(n)?;
        if a.is_zero() {
            return Ok(a);
        }
        Ok(&(&num_a(n) * &den_a(n)?) * &a)
    });
    new_alpha.tq_depth = depth;

    let lower_beta = Arc::clone(beta);
    let beta_bound = beta.support_bound;
    let new_beta = PairFamily::new(name, PairKind::Beta, trunc, None, move |n| {
        let top = beta_bound.map_or(n, |bb| bb.min(n));
        let mut acc = Series::zero(trunc);
        for j in 0..=top {
            let bj = lower_beta.entry(j)?;
            if bj.is_zero() {
                continue;
            }
            let gap = (n - j) as i64;
            let weight = &(&numer(j) * &poch_finite(&bctq, gap)?) * &qq_inv(gap as u32, trunc);
            acc = &acc + &(&weight * &bj);
        }
        Ok(&acc * &den_inv(n)?)
    });
    Ok((Arc::new(new_alpha), Arc::new(new_beta)))
}

/// The k-fold Bailey chain: step `i` uses `(b_i, c_i)`.
pub fn chain_lift(
    alpha: &Arc<PairFamily>,
    beta: &Arc<PairFamily>,
    params: &ChainParams,
) -> Result<(Arc<PairFamily>, Arc<PairFamily>)> {
    let mut pair = (Arc::clone(alpha), Arc::clone(beta));
    for (b, c) in params.b.iter().zip(&params.c) {
        pair = lemma_step(&pair.0, &pair.1, b, c)?;
    }
    Ok(pair)
}

/// `sum_{j=0}^{2n} coeff(j) z^{j-n}`.
fn z_sum<F>(n: usize, trunc: Truncation, coeff: F) -> Result<Series>
where
    F: Fn(usize) -> Result<Series>,
{
    let mut acc = Series::zero(trunc);
    for j in 0..=2 * n {
        let term = coeff(j)?.mul_monomial(&Rational::one(), &Monomial::z(j as i32 - n as i32));
        acc = &acc + &term;
    }
    Ok(acc)
}

/// `sum_{j=0}^{2n} (x;q)_j (x;q)_{2n-j} / ((q;q)_j (q;q)_{2n-j}) z^{j-n}`.
fn ultraspherical_half(n: usize, x: &Series) -> Result<Series> {
    let trunc = x.trunc();
    let pochs: Vec<Series> = (0..=2 * n)
        .map(|j| Ok(&poch_finite(x, j as i64)? * &qq_inv(j as u32, trunc)))
        .collect::<Result<_>>()?;
    z_sum(n, trunc, |j| Ok(&pochs[j] * &pochs[2 * n - j]))
}

/// `sum_{j=0}^{2n} [2n choose j]_q z^{j-n}`.
fn hermite_half(n: usize, trunc: Truncation) -> Result<Series> {
    z_sum(n, trunc, |j| Ok(qbinomial(2 * n as i64, j as i64, trunc)))
}

/// `t^n (q;q)_{2n} / (t^2;q)_{2n}` body without the `t^n`.
fn gamma_scalar(n: usize, trunc: Truncation) -> Result<Series> {
    let t2 = mono(0, 2, 0, 0, trunc);
    Ok(&qq(2 * n as u32, trunc) * &poch_finite(&t2, 2 * n as i64)?.invert()?)
}

/// `1 / (t, tq, tz, tz^{-1}; q)_inf`.
fn t_products_inv(trunc: Truncation) -> Result<Series> {
    let prod = [mono(0, 1, 0, 0, trunc), mono(1, 1, 0, 0, trunc), mono(0, 1, 0, 1, trunc), mono(0, 1, 0, -1, trunc)]
        .iter()
        .map(poch_infinite)
        .try_fold(Series::one(trunc), |acc, p| Ok::<_, Error>(&acc * &p?))?;
    prod.invert()
}

/// The conjugate pair
/// `gamma_n = t^n (q;q)_{2n} (t^2;q)_inf / ((t^2;q)_{2n} (t,tq,tz,tz^{-1};q)_inf) sum_j (t;q)_j (t;q)_{2n-j}/((q;q)_j (q;q)_{2n-j}) z^{j-n}`,
/// `delta_n = t^n sum_j [2n choose j]_q z^{j-n}`.
pub fn conjugate_pair(trunc: Truncation) -> Result<(Arc<PairFamily>, Arc<PairFamily>)> {
    let prefactor = Arc::new(&poch_infinite(&mono(0, 2, 0, 0, trunc))? * &t_products_inv(trunc)?);
    let bound = Some(trunc.max_t as usize);
    let t = mono(0, 1, 0, 0, trunc);
    let gamma = PairFamily::new("thm31", PairKind::Gamma, trunc, bound, move |n| {
        let inner = ultraspherical_half(n, &t)?;
        Ok(&(&*prefactor * &gamma_scalar(n, trunc)?) * &inner)
    })
    .with_t_step(1);
    let delta = PairFamily::new("thm31", PairKind::Delta, trunc, bound, move |n| hermite_half(n, trunc))
        .with_t_step(1);
    Ok((Arc::new(gamma), Arc::new(delta)))
}

/// The conjugate WP pair relative to `(s, t, q)`:
/// `gamma'_n` is `gamma_n` times `(sz, sz^{-1}; q)_inf`, and
/// `delta'_n = t^n (1 - s q^{2n}) (q;q)_{2n} (s^2;q)_inf / ((1-s)(s^2;q)_{2n}(s,sq;q)_inf) sum_j (s;q)_j (s;q)_{2n-j}/((q;q)_j (q;q)_{2n-j}) z^{j-n}`.
pub fn wp_conjugate_pair(trunc: Truncation) -> Result<(Arc<PairFamily>, Arc<PairFamily>)> {
    if trunc.max_s.is_none() {
        return Err(Error::Usage("the WP conjugate pair needs an s truncation".into()));
    }
    let sz = &poch_infinite(&mono(0, 0, 1, 1, trunc))? * &poch_infinite(&mono(0, 0, 1, -1, trunc))?;
    let prefactor = Arc::new(&(&poch_infinite(&mono(0, 2, 0, 0, trunc))? * &t_products_inv(trunc)?) * &sz);
    let bound = Some(trunc.max_t as usize);
    let t = mono(0, 1, 0, 0, trunc);
    let gamma = PairFamily::new("thm61", PairKind::Gamma, trunc, bound, move |n| {
        let inner = ultraspherical_half(n, &t)?;
        Ok(&(&*prefactor * &gamma_scalar(n, trunc)?) * &inner)
    })
    .with_t_step(1);

    // (s^2;q)_inf / ((1-s)(s;q)_inf (sq;q)_inf): the factor 1 - s^2 of the
    // numerator absorbs the k = 0 factor of (s;q)_inf, leaving
    // (1+s)(s^2 q;q)_inf / ((1-s) (sq;q)_inf^2)
    let one = Series::one(trunc);
    let s = mono(0, 0, 1, 0, trunc);
    let sq_inf = poch_infinite(&mono(1, 0, 1, 0, trunc))?;
    let numerator = &(&one + &s) * &poch_infinite(&mono(1, 0, 2, 0, trunc))?;
    let denominator = &(&(&one - &s) * &sq_inf) * &sq_inf;
    let s_prefactor = Arc::new(&numerator * &denominator.invert()?);
    let delta = PairFamily::new("thm61", PairKind::Delta, trunc, bound, move |n| {
        let s = mono(0, 0, 1, 0, trunc);
        let s2 = mono(0, 0, 2, 0, trunc);
        let lead = &Series::one(trunc) - &mono(2 * n as u32, 0, 1, 0, trunc);
        let scalar = &(&lead * &qq(2 * n as u32, trunc)) * &poch_finite(&s2, 2 * n as i64)?.invert()?;
        let inner = ultraspherical_half(n, &s)?;
        Ok(&(&*s_prefactor * &scalar) * &inner)
    })
    .with_t_step(1);
    Ok((Arc::new(gamma), Arc::new(delta)))
}

fn pair_report(id: &str, trunc: Truncation, families: &[&PairFamily]) -> IdentityReport {
    let mut report = IdentityReport::new(id).with_truncation(trunc);
    for f in families {
        report = report.with_param(&f.kind.to_string(), &f.name);
    }
    report
}

fn check_same_trunc(families: &[&PairFamily]) -> Result<Truncation> {
    let trunc = families[0].trunc;
    for f in families {
        if f.trunc != trunc {
            return Err(Error::TruncationMismatch { left: trunc, right: f.trunc });
        }
    }
    Ok(trunc)
}

fn fold_rows(mut report: IdentityReport, rows: Vec<(usize, Series, Series)>) -> IdentityReport {
    for (n, lhs, rhs) in rows {
        report.record_series(&lhs, &rhs, Some(format!("n={n}")));
    }
    report
}

/// Checks `beta_n = sum_{l<=n} alpha_l / ((q;q)_{n-l} (tq;q)_{n+l})` for `n <= n_max`.
pub fn verify_bailey_pair(alpha: &PairFamily, beta: &PairFamily, n_max: usize) -> Result<IdentityReport> {
    let started = Instant::now();
    let trunc = check_same_trunc(&[alpha, beta])?;
    let tq_inv = tq_inverses(trunc, 2 * n_max)?;
    let q_inv = q_inverses(trunc, n_max);
    let alpha_top = alpha.support_bound;
    let rows: Vec<(usize, Series, Series)> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let lhs = beta.entry(n)?;
            let top = alpha_top.map_or(n, |b| b.min(n));
            let mut rhs = Series::zero(trunc);
            for l in 0..=top {
                let a = alpha.entry(l)?;
                rhs = &rhs + &(&(&a * &q_inv[n - l]) * &tq_inv[n + l]);
            }
            Ok((n, lhs, rhs))
        })
        .collect::<Result<_>>()?;
    let report = pair_report("bailey-pair", trunc, &[alpha, beta]).with_param("n_max", n_max);
    Ok(fold_rows(report, rows).finish(started))
}

/// Checks `gamma_n = sum_{l>=n} delta_l / ((q;q)_{l-n} (tq;q)_{l+n})` for
/// `n <= n_max`, cutting the sum at the support bound of `delta`.
pub fn verify_conjugate_pair(gamma: &PairFamily, delta: &PairFamily, n_max: usize) -> Result<IdentityReport> {
    let started = Instant::now();
    let trunc = check_same_trunc(&[gamma, delta])?;
    let top = delta.require_bound()?;
    let tq_inv = tq_inverses(trunc, n_max + top.max(n_max))?;
    let q_inv = q_inverses(trunc, top);
    let rows: Vec<(usize, Series, Series)> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let lhs = gamma.entry(n)?;
            let mut rhs = Series::zero(trunc);
            for l in n..=top.max(n) {
                let d = delta.entry(l)?;
                rhs = &rhs + &(&(&d * &q_inv[l - n]) * &tq_inv[l + n]);
            }
            Ok((n, lhs, rhs))
        })
        .collect::<Result<_>>()?;
    let report = pair_report("conjugate-pair", trunc, &[gamma, delta]).with_param("n_max", n_max);
    Ok(fold_rows(report, rows).finish(started))
}

/// Index cut for the WP relation: entry `l` contributes
/// `t^n prod_{i<l-n} (t - s q^i) body(l)`, and a product term using `b`
/// of the `s q^i` factors has degree `l - b` in `t`, `b` in `s` and at
/// least `C(b,2)` in `q`.
pub fn wp_summation_bound(trunc: Truncation) -> usize {
    let b = (trunc.s_cap() as usize).min(triangular_reach(trunc.max_q));
    trunc.max_t as usize + b
}

/// Checks
/// `gamma'_n = sum_{l>=n} (s/t;q)_{l-n} (s;q)_{l+n} / ((q;q)_{l-n} (tq;q)_{l+n}) delta'_l`
/// for `n <= n_max`. The `t^l` prefactor of `delta'_l` absorbs `t^{-(l-n)}`
/// from `(s/t;q)_{l-n} = t^{-(l-n)} prod_{i<l-n} (t - s q^i)`.
pub fn verify_wp_conjugate(gamma: &PairFamily, delta: &PairFamily, n_max: usize) -> Result<IdentityReport> {
    let started = Instant::now();
    let trunc = check_same_trunc(&[gamma, delta])?;
    if trunc.max_s.is_none() {
        return Err(Error::Usage("the WP relation needs an s truncation".into()));
    }
    if delta.t_step != 1 {
        return Err(Error::MissingSupportBound { family: delta.name.clone() });
    }
    delta.require_bound()?;
    let top = wp_summation_bound(trunc).max(n_max);
    let tq_inv = tq_inverses(trunc, n_max + top)?;
    let q_inv = q_inverses(trunc, top);
    let t = mono(0, 1, 0, 0, trunc);
    let s = mono(0, 0, 1, 0, trunc);
    let bodies: Vec<Series> = (0..=top).into_par_iter().map(|l| delta.body(l)).collect::<Result<_>>()?;
    let rows: Vec<(usize, Series, Series)> = (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let lhs = gamma.entry(n)?;
            let mut rhs = Series::zero(trunc);
            let mut head = mono(0, n as u32, 0, 0, trunc);
            for l in n..=top {
                if head.is_zero() {
                    break;
                }
                let weight = &(&(&head * &poch_finite(&s, (l + n) as i64)?) * &q_inv[l - n]) * &tq_inv[l + n];
                rhs = &rhs + &(&weight * &bodies[l]);
                let factor = &t - &s.mul_monomial(&Rational::one(), &Monomial::q((l - n) as u32));
                head = &head * &factor;
            }
            Ok((n, lhs, rhs))
        })
        .collect::<Result<_>>()?;
    let report = pair_report("wp-conjugate-pair", trunc, &[gamma, delta]).with_param("n_max", n_max);
    Ok(fold_rows(report, rows).finish(started))
}

/// Checks `sum_n alpha_n gamma_n = sum_n beta_n delta_n`, each side cut at
/// the smaller support bound of its two factors.
pub fn bailey_transform_check(
    alpha: &PairFamily,
    beta: &PairFamily,
    gamma: &PairFamily,
    delta: &PairFamily,
) -> Result<IdentityReport> {
    let started = Instant::now();
    let trunc = check_same_trunc(&[alpha, beta, gamma, delta])?;
    let cut = |x: &PairFamily, y: &PairFamily| -> Result<usize> {
        match (x.support_bound, y.support_bound) {
            (Some(a), Some(b)) => Ok(a.min(b)),
            (Some(a), None) | (None, Some(a)) => Ok(a),
            (None, None) => Err(Error::MissingSupportBound { family: format!("{} / {}", x.name, y.name) }),
        }
    };
    let left_top = cut(alpha, gamma)?;
    let right_top = cut(beta, delta)?;
    let side = |x: &PairFamily, y: &PairFamily, top: usize| -> Result<Series> {
        let parts: Vec<Series> = (0..=top)
            .into_par_iter()
            .map(|n| {
                let a = x.entry(n)?;
                if a.is_zero() {
                    return Ok(a);
                }
                Ok(&a * &y.entry(n)?)
            })
            .collect::<Result<_>>()?;
        Ok(sum_series(parts, trunc))
    };
    let lhs = side(alpha, gamma, left_top)?;
    let rhs = side(beta, delta, right_top)?;
    let mut report = pair_report("bailey-transform", trunc, &[alpha, beta, gamma, delta]);
    report.record_series(&lhs, &rhs, None);
    Ok(report.finish(started))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rat, Substitution, Var};

    fn one_minus(x: &Series) -> Series {
        &Series::one(x.trunc()) - x
    }

    #[test]
    fn seed_entries() {
        let trunc = Truncation::new(6, 4);
        let (alpha, beta) = seed_pair(trunc);
        assert_eq!(beta.entry(0).unwrap(), Series::one(trunc));
        for n in 1..5 {
            assert!(beta.entry(n).unwrap().is_zero());
        }
        assert_eq!(alpha.entry(0).unwrap(), Series::one(trunc));
        // -(1 - t q^2) / (1 - q)
        let expected = (&one_minus(&mono(2, 1, 0, 0, trunc)) * &qq_inv(1, trunc)).scale(&int(-1));
        assert_eq!(alpha.entry(1).unwrap(), expected);
    }

    #[test]
    fn support_bounds_are_sound() {
        let trunc = Truncation::new(6, 4);
        let (alpha, _) = seed_pair(trunc);
        let bound = alpha.support_bound().unwrap();
        assert_eq!(bound, 4);
        assert!(!alpha.entry(bound).unwrap().is_zero());
        for n in bound + 1..bound + 3 {
            assert!(alpha.entry(n).unwrap().is_zero(), "n={n}");
        }
        let (gamma, delta) = conjugate_pair(trunc).unwrap();
        for n in 5..7 {
            assert!(gamma.entry(n).unwrap().is_zero());
            assert!(delta.entry(n).unwrap().is_zero());
        }
        let (a2, _) = chain_lift(&alpha, &seed_pair(trunc).1, &ChainParams::new(vec![rat(2, 3); 2], vec![rat(-1, 5); 2]).unwrap()).unwrap();
        let b2 = a2.support_bound().unwrap();
        assert_eq!(b2, 2);
        for n in b2 + 1..b2 + 3 {
            assert!(a2.entry(n).unwrap().is_zero());
        }
    }

    #[test]
    fn entries_are_reproducible() {
        let trunc = Truncation::new(5, 4);
        let (g1, d1) = conjugate_pair(trunc).unwrap();
        let (g2, d2) = conjugate_pair(trunc).unwrap();
        for n in 0..4 {
            assert_eq!(g1.entry(n).unwrap(), g2.entry(n).unwrap());
            assert_eq!(g1.entry(n).unwrap(), g1.entry(n).unwrap());
            assert_eq!(d1.entry(n).unwrap(), d2.entry(n).unwrap());
        }
    }

    #[test]
    fn seed_is_a_bailey_pair() {
        let trunc = Truncation::new(8, 6);
        let (alpha, beta) = seed_pair(trunc);
        let r = verify_bailey_pair(&alpha, &beta, 6).unwrap();
        assert!(r.passed(), "{r}");
        let r = verify_bailey_pair(&alpha, &beta, 0).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn mismatched_pair_is_reported() {
        let trunc = Truncation::new(4, 3);
        let (alpha, _) = seed_pair(trunc);
        let wrong = PairFamily::new("ones", PairKind::Beta, trunc, None, move |_| Ok(Series::one(trunc)));
        let r = verify_bailey_pair(&alpha, &wrong, 2).unwrap();
        assert!(!r.passed());
        assert_eq!(r.first_mismatch.unwrap().context.as_deref(), Some("n=1"));
    }

    #[test]
    fn chain_lifts_are_bailey_pairs() {
        let trunc = Truncation::new(6, 5);
        let (alpha, beta) = seed_pair(trunc);
        for k in 1..=3 {
            let (a, b) = chain_lift(&alpha, &beta, &ChainParams::zeros(k)).unwrap();
            assert_eq!(a.entry(0).unwrap(), Series::one(trunc));
            assert_eq!(b.entry(0).unwrap(), Series::one(trunc));
            let r = verify_bailey_pair(&a, &b, 5).unwrap();
            assert!(r.passed(), "k={k}: {r}");
        }
        let params = ChainParams::new(vec![rat(3, 7), rat(-2, 5)], vec![rat(5, 2), rat(1, 3)]).unwrap();
        for k in 1..=2 {
            let p = ChainParams::new(params.b[..k].to_vec(), params.c[..k].to_vec()).unwrap();
            let (a, b) = chain_lift(&alpha, &beta, &p).unwrap();
            let r = verify_bailey_pair(&a, &b, 4).unwrap();
            assert!(r.passed(), "k={k}: {r}");
        }
    }

    #[test]
    fn first_lift_of_beta_closed_form() {
        let trunc = Truncation::new(6, 5);
        let (alpha, beta) = seed_pair(trunc);
        let (b1, c1) = (rat(3, 4), rat(-5, 2));
        let (_, lifted) = chain_lift(&alpha, &beta, &ChainParams::new(vec![b1.clone()], vec![c1.clone()]).unwrap()).unwrap();
        let tq = mono(1, 1, 0, 0, trunc);
        for n in 0..5 {
            let num = poch_finite(&tq.scale(&(&b1 * &c1)), n).unwrap();
            let den = &(&qq(n as u32, trunc) * &poch_finite(&tq.scale(&b1), n).unwrap()) * &poch_finite(&tq.scale(&c1), n).unwrap();
            assert_eq!(lifted.entry(n as usize).unwrap(), &num * &den.invert().unwrap(), "n={n}");
        }
    }

    #[test]
    fn conjugate_pair_small_entries() {
        let trunc = Truncation::new(6, 4);
        let (gamma, delta) = conjugate_pair(trunc).unwrap();
        assert_eq!(delta.entry(0).unwrap(), Series::one(trunc));
        let d1 = delta.entry(1).unwrap();
        let expected = Series::from_terms(
            [
                (Monomial::new(0, 1, 0, -1), int(1)),
                (Monomial::new(0, 1, 0, 0), int(1)),
                (Monomial::new(1, 1, 0, 0), int(1)),
                (Monomial::new(0, 1, 0, 1), int(1)),
            ],
            trunc,
        );
        assert_eq!(d1, expected);
        let g0 = &poch_infinite(&mono(0, 2, 0, 0, trunc)).unwrap() * &t_products_inv(trunc).unwrap();
        assert_eq!(gamma.entry(0).unwrap(), g0);
        for n in 0..4 {
            assert!(gamma.entry(n).unwrap().is_flip_symmetric());
            assert!(delta.entry(n).unwrap().is_flip_symmetric());
        }
    }

    #[test]
    fn conjugate_pair_relation() {
        let trunc = Truncation::new(7, 6);
        let (gamma, delta) = conjugate_pair(trunc).unwrap();
        let r = verify_conjugate_pair(&gamma, &delta, 6).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn boundary_index_keeps_leading_term() {
        let trunc = Truncation::new(5, 4);
        let (gamma, delta) = conjugate_pair(trunc).unwrap();
        assert_eq!(gamma.entry(4).unwrap(), delta.entry(4).unwrap());
    }

    #[test]
    fn unbounded_delta_is_refused() {
        let trunc = Truncation::new(3, 3);
        let (gamma, _) = conjugate_pair(trunc).unwrap();
        let loose = PairFamily::new("loose", PairKind::Delta, trunc, None, move |_| Ok(Series::one(trunc)));
        let err = verify_conjugate_pair(&gamma, &loose, 2).unwrap_err();
        assert!(matches!(err, Error::MissingSupportBound { .. }));
        let (_, beta) = seed_pair(trunc);
        let beta_loose = PairFamily::new("loose", PairKind::Beta, trunc, None, move |_| Ok(Series::one(trunc)));
        let alpha_loose = PairFamily::new("loose", PairKind::Alpha, trunc, None, move |_| Ok(Series::one(trunc)));
        let gamma_loose = PairFamily::new("loose", PairKind::Gamma, trunc, None, move |_| Ok(Series::one(trunc)));
        assert!(bailey_transform_check(&alpha_loose, &beta, &gamma_loose, &loose).is_err());
        assert!(bailey_transform_check(&alpha_loose, &beta_loose, &gamma, &loose).is_err());
    }

    #[test]
    fn transform_with_seed_and_lifts() {
        let trunc = Truncation::new(6, 5);
        let (alpha, beta) = seed_pair(trunc);
        let (gamma, delta) = conjugate_pair(trunc).unwrap();
        assert!(bailey_transform_check(&alpha, &beta, &gamma, &delta).unwrap().passed());
        let (a1, b1) = chain_lift(&alpha, &beta, &ChainParams::zeros(1)).unwrap();
        let r = bailey_transform_check(&a1, &b1, &gamma, &delta).unwrap();
        assert!(r.passed(), "{r}");
        let zero = PairFamily::new("zero", PairKind::Gamma, trunc, Some(0), move |_| Ok(Series::zero(trunc)));
        let zero_d = PairFamily::new("zero", PairKind::Delta, trunc, Some(0), move |_| Ok(Series::zero(trunc)));
        assert!(bailey_transform_check(&alpha, &beta, &zero, &zero_d).unwrap().passed());
    }

    #[test]
    fn wp_pair_relation_and_reduction() {
        let trunc = Truncation::with_s(5, 4, 3);
        let (gp, dp) = wp_conjugate_pair(trunc).unwrap();
        let r = verify_wp_conjugate(&gp, &dp, 4).unwrap();
        assert!(r.passed(), "{r}");
        let (g, d) = conjugate_pair(trunc).unwrap();
        let zero = Substitution::Rational(Rational::zero());
        for n in 0..=4 {
            assert_eq!(gp.entry(n).unwrap().specialize(Var::S, &zero).unwrap(), g.entry(n).unwrap(), "gamma n={n}");
            assert_eq!(dp.entry(n).unwrap().specialize(Var::S, &zero).unwrap(), d.entry(n).unwrap(), "delta n={n}");
        }
    }

    #[test]
    fn wp_delta_at_zero() {
        let trunc = Truncation::with_s(4, 3, 3);
        let (_, dp) = wp_conjugate_pair(trunc).unwrap();
        let s = mono(0, 0, 1, 0, trunc);
        let direct = &poch_infinite(&mono(0, 0, 2, 0, trunc)).unwrap()
            * &(&poch_infinite(&s).unwrap() * &poch_infinite(&mono(1, 0, 1, 0, trunc)).unwrap()).invert().unwrap();
        assert_eq!(dp.entry(0).unwrap(), direct);
    }

    // n = 0 with every term written out: caps (q,t,s) = (2,1,1) leave l <= 2.
    #[test]
    fn wp_relation_by_hand_at_n_zero() {
        let trunc = Truncation::with_s(2, 1, 1);
        assert_eq!(wp_summation_bound(trunc), 2);
        let (gp, dp) = wp_conjugate_pair(trunc).unwrap();
        let t = mono(0, 1, 0, 0, trunc);
        let s = mono(0, 0, 1, 0, trunc);
        let sq = mono(1, 0, 1, 0, trunc);
        let tq_inv = |m: i64| poch_finite(&mono(1, 1, 0, 0, trunc), m).unwrap().invert().unwrap();
        let l1 = &(&(&(&t - &s) * &one_minus(&s)) * &qq_inv(1, trunc)) * &tq_inv(1);
        let l2 = &(&(&(&(&t - &s) * &(&t - &sq)) * &(&one_minus(&s) * &one_minus(&sq))) * &qq_inv(2, trunc)) * &tq_inv(2);
        let rhs = &(&dp.body(0).unwrap() + &(&l1 * &dp.body(1).unwrap())) + &(&l2 * &dp.body(2).unwrap());
        assert_eq!(gp.entry(0).unwrap(), rhs);
        assert!(verify_wp_conjugate(&gp, &dp, 0).unwrap().passed());
    }

    #[test]
    fn wp_bound_reaches_past_t_cap() {
        // with the sum cut at l <= max_t the relation fails
        let trunc = Truncation::with_s(3, 2, 2);
        let (gp, dp) = wp_conjugate_pair(trunc).unwrap();
        assert!(wp_summation_bound(trunc) > trunc.max_t as usize);
        let s = mono(0, 0, 1, 0, trunc);
        let t = mono(0, 1, 0, 0, trunc);
        let mut short = Series::zero(trunc);
        let mut head = Series::one(trunc);
        for l in 0..=trunc.max_t as usize {
            let w = &(&(&head * &poch_finite(&s, l as i64).unwrap()) * &qq_inv(l as u32, trunc))
                * &poch_finite(&mono(1, 1, 0, 0, trunc), l as i64).unwrap().invert().unwrap();
            short = &short + &(&w * &dp.body(l).unwrap());
            head = &head * &(&t - &s.mul_monomial(&Rational::one(), &Monomial::q(l as u32)));
        }
        assert_ne!(gp.entry(0).unwrap(), short);
        assert!(verify_wp_conjugate(&gp, &dp, 2).unwrap().passed());
    }

    #[test]
    fn wp_needs_s() {
        assert!(wp_conjugate_pair(Truncation::new(3, 3)).is_err());
    }
}
