//! The Macdonald index of the `(A_1, D_{2k+1})` Argyres-Douglas theory in
//! four representations, the parametrized duality with `b_i, c_i`, the
//! Andrews multisum Rogers-Ramanujan identity, and specializations.
//!
//! Every multisum is cut by exponent bounds: a summand whose guaranteed
//! `(q, t)`-degree exceeds the caps is dropped along with its tail, and
//! summands are computed at reduced caps before being shifted into place.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qfunctions::{combined_poch, mono, poch_finite, poch_infinite, qbinomial, qq_inv};
use crate::report::IdentityReport;
use crate::series::{int, sum_series, Monomial, Rational, Series, Substitution, Truncation, Var};

/// Adjacency matrix `A = 2I - Cartan(D_{2k+1})`, indexed from 0
/// (node `i` of the diagram is row `i - 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynkinData {
    pub k: usize,
    pub adjacency: Vec<Vec<i64>>,
}

impl DynkinData {
    pub fn new(k: usize) -> Result<Self> {
        check_k(k)?;
        let dim = 2 * k + 1;
        let mut cartan = vec![vec![0i64; dim]; dim];
        for (i, row) in cartan.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut edges: Vec<(usize, usize)> = (1..=2 * k - 2).map(|i| (i, i + 1)).collect();
        edges.push((2 * k - 1, 2 * k));
        edges.push((2 * k - 1, 2 * k + 1));
        for (a, b) in edges {
            cartan[a - 1][b - 1] = -1;
            cartan[b - 1][a - 1] = -1;
        }
        let adjacency = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| if i == j { 2 } else { 0 } - cartan[i][j])
                    .collect()
            })
            .collect();
        Ok(DynkinData { k, adjacency })
    }

    pub fn dim(&self) -> usize {
        2 * self.k + 1
    }

    /// Edges `(i, j)` with `i < j`, 1-based.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                if self.adjacency[i][j] != 0 {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Representation {
    Bosonic,
    Fermionic,
    Fermionic2,
    Original,
}

impl Representation {
    pub const ALL: [Representation; 4] = [
        Representation::Bosonic,
        Representation::Fermionic,
        Representation::Fermionic2,
        Representation::Original,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Representation::Bosonic => "bosonic",
            Representation::Fermionic => "fermionic",
            Representation::Fermionic2 => "fermionic2",
            Representation::Original => "original",
        }
    }
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Representation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Representation::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown representation `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexSpec {
    pub k: usize,
    pub rep: Representation,
    pub trunc: Truncation,
}

impl IndexSpec {
    pub fn new(k: usize, rep: Representation, trunc: Truncation) -> Result<Self> {
        check_k(k)?;
        Ok(IndexSpec { k, rep, trunc })
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::Usage("k must be at least 1".into()))
    } else {
        Ok(())
    }
}

pub fn index(spec: &IndexSpec) -> Result<Series> {
    match spec.rep {
        Representation::Bosonic => bosonic_index(spec),
        Representation::Fermionic => fermionic_index(spec),
        Representation::Fermionic2 => fermionic2_index(spec),
        Representation::Original => original_index(spec),
    }
}

/// Caps left after reserving `q^dq t^dt`, or `None` if that monomial is
/// already beyond them.
fn shrink(trunc: Truncation, dq: u64, dt: u64) -> Option<Truncation> {
    if dq > trunc.max_q as u64 || dt > trunc.max_t as u64 {
        return None;
    }
    Some(Truncation { max_q: trunc.max_q - dq as u32, max_t: trunc.max_t - dt as u32, max_s: trunc.max_s })
}

/// `c * q^dq t^dt * f`, with `f` computed at the reduced caps.
fn embed(f: &Series, c: &Rational, dq: u32, dt: u32, trunc: Truncation) -> Series {
    let shift = Monomial::qt(dq, dt);
    Series::from_terms(f.terms().map(|(m, v)| (m.times(&shift), v * c)), trunc)
}

fn sign(n: usize) -> Rational {
    if n % 2 == 0 {
        int(1)
    } else {
        int(-1)
    }
}

fn binom2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// `1/(q;q)_m` for `m = 0..=len`.
fn q_inverses(trunc: Truncation, len: usize) -> Vec<Series> {
    (0..=len).map(|m| qq_inv(m as u32, trunc)).collect()
}

/// `1 / (t, t z^2, t z^{-2}; q)_inf`.
fn bosonic_prefactor(trunc: Truncation) -> Result<Series> {
    let prod = &(&poch_infinite(&mono(0, 1, 0, 0, trunc))? * &poch_infinite(&mono(0, 1, 0, 2, trunc))?)
        * &poch_infinite(&mono(0, 1, 0, -2, trunc))?;
    prod.invert()
}

/// `(q^{n+1};q)_n (t^2 q^{2n};q)_inf / ((t q^n;q)_n (t q^{2n+1};q)_inf)
///  * sum_j (t;q)_j (t;q)_{2n-j} / ((q;q)_j (q;q)_{2n-j}) z^{2j-2n}`.
fn bosonic_summand(n: usize, trunc: Truncation) -> Result<Series> {
    let n32 = n as u32;
    let num = &poch_finite(&mono(n32 + 1, 0, 0, 0, trunc), n as i64)? * &poch_infinite(&mono(2 * n32, 2, 0, 0, trunc))?;
    let den = &poch_finite(&mono(n32, 1, 0, 0, trunc), n as i64)? * &poch_infinite(&mono(2 * n32 + 1, 1, 0, 0, trunc))?;
    let t = mono(0, 1, 0, 0, trunc);
    let ratios: Vec<Series> = (0..=2 * n)
        .map(|j| Ok(&poch_finite(&t, j as i64)? * &qq_inv(j as u32, trunc)))
        .collect::<Result<_>>()?;
    let mut inner = Series::zero(trunc);
    for j in 0..=2 * n {
        let c = &ratios[j] * &ratios[2 * n - j];
        inner = &inner + &c.mul_monomial(&Rational::one(), &Monomial::z(2 * j as i32 - 2 * n as i32));
    }
    Ok(&(&num * &den.invert()?) * &inner)
}

/// Single-sum form: `1/(t,tz^2,tz^{-2};q)_inf sum_n (-1)^n t^{(k+1)n} q^{kn^2+C(n,2)} ...`.
pub fn bosonic_index(spec: &IndexSpec) -> Result<Series> {
    let (k, trunc) = (spec.k as u64, spec.trunc);
    let mut ns = Vec::new();
    for n in 0u64.. {
        if (k + 1) * n > trunc.max_t as u64 || k * n * n + binom2(n) > trunc.max_q as u64 {
            break;
        }
        ns.push(n as usize);
    }
    let terms: Vec<Series> = ns
        .par_iter()
        .map(|&n| {
            let (dq, dt) = (k * (n * n) as u64 + binom2(n as u64), (k + 1) * n as u64);
            let sub = shrink(trunc, dq, dt).expect("bounded above");
            Ok(embed(&bosonic_summand(n, sub)?, &sign(n), dq as u32, dt as u32, trunc))
        })
        .collect::<Result<_>>()?;
    Ok(&bosonic_prefactor(trunc)? * &sum_series(terms, trunc))
}

/// `sum_{j=0}^{2n} [2n choose j]_q z^{2j-2n}`.
fn hermite_even(n: usize, trunc: Truncation) -> Series {
    let mut out = Series::zero(trunc);
    for j in 0..=2 * n {
        let b = qbinomial(2 * n as i64, j as i64, trunc);
        out = &out + &b.mul_monomial(&Rational::one(), &Monomial::z(2 * j as i32 - 2 * n as i32));
    }
    out
}

/// Nondecreasing chains `0 <= n_1 <= ... <= n_k` with `sum n_i <= t_cap` and
/// `sum_{i<k} w(n_i) <= q_cap` (`w` nondecreasing).
fn chains(k: usize, t_cap: u64, q_cap: u64, w: &dyn Fn(u64) -> u64) -> Vec<Vec<usize>> {
    fn go(
        k: usize,
        t_cap: u64,
        q_cap: u64,
        w: &dyn Fn(u64) -> u64,
        prefix: &mut Vec<usize>,
        t_used: u64,
        q_used: u64,
        out: &mut Vec<Vec<usize>>,
    ) {
        let i = prefix.len();
        if i == k {
            out.push(prefix.clone());
            return;
        }
        let start = prefix.last().copied().unwrap_or(0) as u64;
        let remaining = (k - i) as u64;
        for n in start.. {
            // every later index is at least n
            if t_used + remaining * n > t_cap {
                break;
            }
            let q_next = if i + 1 < k { q_used + w(n) } else { q_used };
            let q_floor = q_next + if i + 2 <= k.saturating_sub(1) { (k - 1 - (i + 1)) as u64 * w(n) } else { 0 };
            if q_floor > q_cap {
                break;
            }
            prefix.push(n as usize);
            go(k, t_cap, q_cap, w, prefix, t_used + n, q_next, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(k, t_cap, q_cap, w, &mut Vec::new(), 0, 0, &mut out);
    out
}

/// Multisum form: `sum t^{n_1+..+n_k} q^{n_1^2+..+n_{k-1}^2} / ((q;q)_{n_k-n_{k-1}} ... (q;q)_{n_1}) * sum_j [2n_k choose j]_q z^{2j-2n_k}`.
pub fn fermionic_index(spec: &IndexSpec) -> Result<Series> {
    let (k, trunc) = (spec.k, spec.trunc);
    let qinv = q_inverses(trunc, trunc.max_t as usize);
    let tuples = chains(k, trunc.max_t as u64, trunc.max_q as u64, &|n| n * n);
    let top = tuples.iter().map(|c| c[k - 1]).max().unwrap_or(0);
    let groups: Vec<Series> = (0..=top)
        .into_par_iter()
        .map(|nk| {
            let mut acc = Series::zero(trunc);
            for c in tuples.iter().filter(|c| c[k - 1] == nk) {
                let dt: usize = c.iter().sum();
                let dq: usize = c[..k - 1].iter().map(|n| n * n).sum();
                let mut term = Series::monomial(Rational::one(), Monomial::qt(dq as u32, dt as u32), trunc);
                let mut prev = 0;
                for &n in c {
                    term = &term * &qinv[n - prev];
                    prev = n;
                }
                acc = &acc + &term;
            }
            &acc * &hermite_even(nk, trunc)
        })
        .collect();
    Ok(sum_series(groups, trunc))
}

/// `sum_{u1,u2} [s choose u1]_q [s choose u2]_q z^{2u1-2u2}`.
fn hermite_square(s: usize, trunc: Truncation) -> Series {
    let binoms: Vec<Series> = (0..=s).map(|u| qbinomial(s as i64, u as i64, trunc)).collect();
    let mut out = Series::zero(trunc);
    for u1 in 0..=s {
        for u2 in 0..=s {
            let c = &binoms[u1] * &binoms[u2];
            out = &out + &c.mul_monomial(&Rational::one(), &Monomial::z(2 * u1 as i32 - 2 * u2 as i32));
        }
    }
    out
}

/// `1/((t;q)_r (q;q)_r)` for `r = 0..=len`.
fn tq_pair_inverses(trunc: Truncation, len: usize) -> Result<Vec<Series>> {
    let t = mono(0, 1, 0, 0, trunc);
    (0..=len)
        .map(|r| Ok(&poch_finite(&t, r as i64)?.invert()? * &qq_inv(r as u32, trunc)))
        .collect()
}

/// `(t, q; q)_inf^k`.
fn tq_infinite_power(k: usize, trunc: Truncation) -> Result<Series> {
    let base = &poch_infinite(&mono(0, 1, 0, 0, trunc))? * &poch_infinite(&mono(1, 0, 0, 0, trunc))?;
    Ok(base.pow(k as u32))
}

/// Compositions `(s_1..s_k)` with `sum s_i <= cap`.
fn compositions(k: usize, cap: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for c in &out {
            let used: usize = c.iter().sum();
            for s in 0..=cap - used {
                let mut d = c.clone();
                d.push(s);
                next.push(d);
            }
        }
        out = next;
    }
    out
}

/// `(t,q;q)_inf^k sum_{r,s} t^{sum s_i} q^{sum r_i(s_{i-1}+s_i+1)} / (prod (t,q;q)_{r_i} (q;q)_{s_i}^2)
///  * sum_{u1,u2} [s_k,u1][s_k,u2] z^{2u1-2u2}` with `s_0 = 0`.
pub fn fermionic2_index(spec: &IndexSpec) -> Result<Series> {
    let (k, trunc) = (spec.k, spec.trunc);
    let pair_inv = tq_pair_inverses(trunc, trunc.max_q as usize)?;
    // sum_r q^{r m} / (t,q;q)_r for each m >= 1
    let max_m = 2 * trunc.max_t as usize + 1;
    let r_sums: Vec<Series> = (0..=max_m)
        .into_par_iter()
        .map(|m| {
            if m == 0 {
                return Series::zero(trunc);
            }
            let mut acc = Series::zero(trunc);
            for r in 0..=trunc.max_q as usize / m {
                acc = &acc + &pair_inv[r].mul_monomial(&Rational::one(), &Monomial::q((r * m) as u32));
            }
            acc
        })
        .collect();
    let qinv = q_inverses(trunc, trunc.max_t as usize);
    let tuples = compositions(k, trunc.max_t as usize);
    let groups: Vec<Series> = (0..=trunc.max_t as usize)
        .into_par_iter()
        .map(|sk| {
            let mut acc = Series::zero(trunc);
            for c in tuples.iter().filter(|c| c[k - 1] == sk) {
                let dt: usize = c.iter().sum();
                let mut term = Series::monomial(Rational::one(), Monomial::t(dt as u32), trunc);
                let mut prev = 0;
                for &s in c {
                    term = &(&(&term * &r_sums[prev + s + 1]) * &qinv[s]) * &qinv[s];
                    prev = s;
                }
                acc = &acc + &term;
            }
            &acc * &hermite_square(sk, trunc)
        })
        .collect();
    Ok(&tq_infinite_power(k, trunc)? * &sum_series(groups, trunc))
}

/// One summand of the Dynkin-data form, on the full index vectors.
struct OriginalTerm {
    l: Vec<usize>,
    m: Vec<usize>,
    q_exp: u32,
    t_exp: u32,
}

/// `(2 * q-exponent, 2 * t-exponent)` of the Dynkin-data summand, with
/// unassigned entries read as 0.
fn original_exponents(d: &DynkinData, l: &[usize], m: &[usize]) -> (Rational, Rational) {
    let k = d.k;
    let half = Rational::new(1.into(), 2.into());
    let mut q = Rational::zero();
    for i in 0..d.dim() {
        for j in 0..d.dim() {
            if d.adjacency[i][j] != 0 {
                q += int(d.adjacency[i][j] * (l[i] * m[j]) as i64) * &half;
            }
        }
    }
    for i in 1..=k {
        q += int((l[2 * i - 2] + m[2 * i - 2]) as i64) * &half;
    }
    let mut t = Rational::zero();
    for i in 1..=k {
        t += int((l[2 * i - 1] + m[2 * i - 1]) as i64) * &half;
    }
    t += int((l[2 * k] + m[2 * k]) as i64) * &half;
    (q, t)
}

fn exceeds(x: &Rational, cap: u32) -> bool {
    x > &int(cap as i64)
}

/// Enumerates `(l, m)` under the constraints `l_i = m_i` (`i <= 2k-1`) and
/// `l_{2k} + l_{2k+1} = m_{2k} + m_{2k+1}`, pruning on the partial exponents.
fn original_terms(d: &DynkinData, trunc: Truncation) -> Result<Vec<OriginalTerm>> {
    let dim = d.dim();
    let mut out = Vec::new();
    let mut l = vec![0usize; dim];
    let mut m = vec![0usize; dim];
    fn go(
        d: &DynkinData,
        trunc: Truncation,
        pos: usize,
        l: &mut Vec<usize>,
        m: &mut Vec<usize>,
        out: &mut Vec<OriginalTerm>,
    ) -> Result<()> {
        let dim = d.dim();
        if pos == dim {
            // the free split of l_{2k} + l_{2k+1} on the m side
            let total = l[dim - 2] + l[dim - 1];
            for m2k in 0..=total {
                m[dim - 2] = m2k;
                m[dim - 1] = total - m2k;
                let (q, t) = original_exponents(d, l, m);
                if exceeds(&q, trunc.max_q) || exceeds(&t, trunc.max_t) {
                    continue;
                }
                if !q.is_integer() || !t.is_integer() {
                    return Err(Error::Internal(format!(
                        "non-integral exponent q^{q} t^{t} at l={l:?} m={m:?}"
                    )));
                }
                out.push(OriginalTerm {
                    l: l.clone(),
                    m: m.clone(),
                    q_exp: q.to_integer().try_into().expect("capped"),
                    t_exp: t.to_integer().try_into().expect("capped"),
                });
            }
            m[dim - 2] = 0;
            m[dim - 1] = 0;
            return Ok(());
        }
        for v in 0.. {
            l[pos] = v;
            if pos < dim - 2 {
                m[pos] = v;
            }
            let (q, t) = original_exponents(d, l, m);
            // exponents are nondecreasing in every index
            if exceeds(&q, trunc.max_q) || exceeds(&t, trunc.max_t) {
                break;
            }
            go(d, trunc, pos + 1, l, m, out)?;
        }
        l[pos] = 0;
        if pos < dim - 2 {
            m[pos] = 0;
        }
        Ok(())
    }
    go(d, trunc, 0, &mut l, &mut m, &mut out)?;
    Ok(out)
}

/// The Dynkin-data form
/// `(t,q;q)_inf^k sum delta(...) q^{sum a_ij l_i m_j/2 + sum (l_{2i-1}+m_{2i-1})/2} t^{...} z^{2m_{2k+1}-2l_{2k+1}} / (...)`.
pub fn original_index(spec: &IndexSpec) -> Result<Series> {
    let (k, trunc) = (spec.k, spec.trunc);
    let d = DynkinData::new(k)?;
    let terms = original_terms(&d, trunc)?;
    let cap = trunc.max_q.max(trunc.max_t) as usize;
    let t = mono(0, 1, 0, 0, trunc);
    let t_inv: Vec<Series> = (0..=cap)
        .map(|r| poch_finite(&t, r as i64)?.invert())
        .collect::<Result<_>>()?;
    let qinv = q_inverses(trunc, cap);
    let dim = d.dim();
    let parts: Vec<Series> = terms
        .par_chunks(64)
        .map(|chunk| {
            let mut acc = Series::zero(trunc);
            for term in chunk {
                let sub = shrink(trunc, term.q_exp as u64, term.t_exp as u64).expect("capped");
                let mut f = Series::one(sub);
                let factors = [&qinv[term.l[dim - 1]], &qinv[term.m[dim - 1]]];
                for g in factors {
                    f = f.mul_capped(&g.relabel(sub), &sub);
                }
                for i in 1..=k {
                    for g in [&qinv[term.l[2 * i - 1]], &qinv[term.m[2 * i - 1]], &t_inv[term.l[2 * i - 2]], &qinv[term.m[2 * i - 2]]] {
                        f = f.mul_capped(&g.truncate_to(sub).expect("smaller caps"), &sub);
                    }
                }
                let z = 2 * term.m[dim - 1] as i32 - 2 * term.l[dim - 1] as i32;
                let shifted = embed(&f, &Rational::one(), term.q_exp, term.t_exp, trunc)
                    .mul_monomial(&Rational::one(), &Monomial::z(z));
                acc = &acc + &shifted;
            }
            acc
        })
        .collect();
    Ok(&tq_infinite_power(k, trunc)? * &sum_series(parts, trunc))
}

/// Both sides of the parametrized duality for rational `b_i, c_i`.
pub fn generalized_sides(k: usize, b: &[Rational], c: &[Rational], trunc: Truncation) -> Result<(Series, Series)> {
    check_k(k)?;
    if b.len() != k || c.len() != k {
        return Err(Error::Usage(format!("need {k} values each of b and c")));
    }
    let tq = mono(1, 1, 0, 0, trunc);
    let qinv = q_inverses(trunc, trunc.max_t as usize);
    // (x tq; q)_n for n <= max_t
    let poch_table = |x: &Rational| -> Result<Vec<Series>> {
        (0..=trunc.max_t as usize).map(|n| poch_finite(&tq.scale(x), n as i64)).collect()
    };
    let bc_tables: Vec<Vec<Series>> = (0..k).map(|i| poch_table(&(&b[i] * &c[i]))).collect::<Result<_>>()?;
    let den_inv: Vec<Vec<Series>> = (0..k)
        .map(|i| {
            let (pb, pc) = (poch_table(&b[i])?, poch_table(&c[i])?);
            pb.iter().zip(&pc).map(|(x, y)| (x * y).invert()).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    // left: chains with weight q^{n_1+..+n_{k-1}}
    let tuples = chains(k, trunc.max_t as u64, trunc.max_q as u64, &|n| n);
    let top = tuples.iter().map(|t| t[k - 1]).max().unwrap_or(0);
    let groups: Vec<Series> = (0..=top)
        .into_par_iter()
        .map(|nk| {
            let mut acc = Series::zero(trunc);
            for ch in tuples.iter().filter(|ch| ch[k - 1] == nk) {
                let dt: usize = ch.iter().sum();
                let dq: usize = ch[..k - 1].iter().sum();
                let mut term = Series::monomial(Rational::one(), Monomial::qt(dq as u32, dt as u32), trunc);
                let mut prev = 0;
                for (i, &n) in ch.iter().enumerate() {
                    let gap = n - prev;
                    term = &(&(&term * &qinv[gap]) * &bc_tables[i][gap]) * &den_inv[i][n];
                    if i >= 1 {
                        let poly = &combined_poch(&b[i], prev as u32, trunc) * &combined_poch(&c[i], prev as u32, trunc);
                        term = &term * &poly;
                    }
                    prev = n;
                }
                acc = &acc + &term;
            }
            &acc * &hermite_even(nk, trunc)
        })
        .collect();
    let lhs = sum_series(groups, trunc);

    // right: bosonic-type sum with q^{kn + C(n,2)} and the b, c factor
    let k64 = k as u64;
    let mut ns = Vec::new();
    for n in 0u64.. {
        if (k64 + 1) * n > trunc.max_t as u64 || k64 * n + binom2(n) > trunc.max_q as u64 {
            break;
        }
        ns.push(n as usize);
    }
    let terms: Vec<Series> = ns
        .par_iter()
        .map(|&n| {
            let (dq, dt) = (k64 * n as u64 + binom2(n as u64), (k64 + 1) * n as u64);
            let sub = shrink(trunc, dq, dt).expect("bounded above");
            let mut f = bosonic_summand(n, sub)?;
            let tq_sub = mono(1, 1, 0, 0, sub);
            for i in 0..k {
                let poly = &combined_poch(&b[i], n as u32, sub) * &combined_poch(&c[i], n as u32, sub);
                let den = &poch_finite(&tq_sub.scale(&b[i]), n as i64)? * &poch_finite(&tq_sub.scale(&c[i]), n as i64)?;
                f = &(&f * &poly) * &den.invert()?;
            }
            Ok(embed(&f, &sign(n), dq as u32, dt as u32, trunc))
        })
        .collect::<Result<_>>()?;
    let rhs = &bosonic_prefactor(trunc)? * &sum_series(terms, trunc);
    Ok((lhs, rhs))
}

pub fn generalized_identity(k: usize, b: &[Rational], c: &[Rational], trunc: Truncation) -> Result<IdentityReport> {
    let started = Instant::now();
    let (lhs, rhs) = generalized_sides(k, b, c, trunc)?;
    let render = |v: &[Rational]| v.iter().map(crate::series::render_rational).collect::<Vec<_>>().join(",");
    let mut report = IdentityReport::new("thm-general")
        .with_param("k", k)
        .with_param("b", render(b))
        .with_param("c", render(c))
        .with_truncation(trunc);
    report.record_series(&lhs, &rhs, None);
    Ok(report.finish(started))
}

/// Largest `|n|` needed on the bilateral side: `ceil(sqrt(max_q/(k+1))) + 1`.
pub fn rogers_ramanujan_bound(k: usize, max_q: u32) -> i64 {
    let ratio = max_q as f64 / (k as f64 + 1.0);
    ratio.sqrt().ceil() as i64 + 1
}

/// Both sides of
/// `sum q^{n_1^2+..+n_k^2} / ((q;q)_{n_k-n_{k-1}} ... (q;q)_{n_1}) = 1/(q;q)_inf sum_n (-1)^n q^{(k+1)n^2 + C(n,2)}`.
pub fn multi_rogers_ramanujan_sides(k: usize, max_q: u32) -> Result<(Series, Series)> {
    check_k(k)?;
    let trunc = Truncation::new(max_q, 0);
    let qinv = q_inverses(trunc, max_q as usize);
    // every n_i <= n_k and n_k^2 <= max_q
    let tuples = chains(k, k as u64 * max_q as u64, max_q as u64, &|n| n * n)
        .into_iter()
        .filter(|c| c.iter().map(|n| n * n).sum::<usize>() <= max_q as usize)
        .collect::<Vec<_>>();
    let mut lhs = Series::zero(trunc);
    for c in tuples {
        let dq: usize = c.iter().map(|n| n * n).sum();
        let mut term = Series::mono(Monomial::q(dq as u32), trunc);
        let mut prev = 0;
        for &n in &c {
            term = &term * &qinv[n - prev];
            prev = n;
        }
        lhs = &lhs + &term;
    }
    let bound = rogers_ramanujan_bound(k, max_q);
    let mut bilateral = Series::zero(trunc);
    for n in -bound..=bound {
        let e = (k as i64 + 1) * n * n + n * (n - 1) / 2;
        let c = if n.rem_euclid(2) == 0 { int(1) } else { int(-1) };
        if e <= max_q as i64 {
            bilateral = &bilateral + &Series::monomial(c, Monomial::q(e as u32), trunc);
        }
    }
    let rhs = &poch_infinite(&mono(1, 0, 0, 0, trunc))?.invert()? * &bilateral;
    Ok((lhs, rhs))
}

pub fn multi_rogers_ramanujan(k: usize, max_q: u32) -> Result<IdentityReport> {
    let started = Instant::now();
    let (lhs, rhs) = multi_rogers_ramanujan_sides(k, max_q)?;
    let mut report = IdentityReport::new("multi-rr")
        .with_param("k", k)
        .with_truncation(Truncation::new(max_q, 0));
    report.record_series(&lhs, &rhs, None);
    Ok(report.finish(started))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Specialization {
    /// `t = q`
    Schur,
    /// `q = 0`
    HallLittlewood,
    /// `z = 1`
    Unrefined,
}

impl Specialization {
    pub fn name(&self) -> &'static str {
        match self {
            Specialization::Schur => "schur",
            Specialization::HallLittlewood => "hall-littlewood",
            Specialization::Unrefined => "unrefined",
        }
    }
}

impl FromStr for Specialization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Specialization::Schur, Specialization::HallLittlewood, Specialization::Unrefined]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown specialization `{s}`")))
    }
}

pub fn specialize_index(f: &Series, mode: Specialization) -> Result<Series> {
    match mode {
        Specialization::Schur => f.specialize(Var::T, &Substitution::Monomial(Monomial::q(1))),
        Specialization::HallLittlewood => f.specialize(Var::Q, &Substitution::Rational(Rational::zero())),
        Specialization::Unrefined => f.specialize(Var::Z, &Substitution::Rational(Rational::one())),
    }
}

/// One coefficient of an index in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub e_q: u32,
    pub e_t: u32,
    pub e_z: i32,
    pub num: String,
    pub den: String,
}

pub fn coefficient_table(f: &Series) -> Vec<TableRow> {
    f.terms()
        .map(|(m, c)| TableRow {
            e_q: m.q,
            e_t: m.t,
            e_z: m.z,
            num: c.numer().to_string(),
            den: c.denom().to_string(),
        })
        .collect()
}

/// Rows `e_q,e_t,e_z,num,den`, one per line, no header.
pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::new();
    for r in rows {
        out.push_str(&format!("{},{},{},{},{}\n", r.e_q, r.e_t, r.e_z, r.num, r.den));
    }
    out
}

pub fn table_json(rows: &[TableRow]) -> String {
    serde_json::to_string(rows).expect("rows serialize")
}

/// True when every coefficient is a nonnegative integer.
pub fn is_nonnegative_integral(f: &Series) -> bool {
    f.terms().all(|(_, c)| c.is_integer() && !c.is_negative())
}

/// Compares two representations of the same index.
pub fn compare_representations(k: usize, left: Representation, right: Representation, trunc: Truncation) -> Result<IdentityReport> {
    let started = Instant::now();
    let (a, b) = rayon::join(
        || index(&IndexSpec::new(k, left, trunc)?),
        || index(&IndexSpec::new(k, right, trunc)?),
    );
    let (a, b) = (a?, b?);
    let mut report = IdentityReport::new(format!("{left}={right}"))
        .with_param("k", k)
        .with_truncation(trunc);
    report.record_series(&a, &b, None);
    Ok(report.finish(started))
}
