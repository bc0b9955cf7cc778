//! The `verify` subcommand.

use std::time::Instant;

use adindex_core::bailey::{
    bailey_transform_check, chain_lift, conjugate_pair, seed_pair, verify_bailey_pair,
    verify_conjugate_pair, verify_wp_conjugate, wp_conjugate_pair, ChainParams,
};
use adindex_core::hypergeometric::{appendix_c_sum, lemma_b1, sample_points, RationalPoint};
use adindex_core::macdonald::{compare_representations, generalized_identity, multi_rogers_ramanujan, Representation};
use adindex_core::series::rat;
use adindex_core::{Error, IdentityReport, Result, Substitution, Truncation, Var};
use rayon::prelude::*;

use crate::args::{chain_values, rng_for, IdentityId, PairId, VerifyArgs};

/// The fixed point every key-sum check starts with.
pub fn fixed_point() -> RationalPoint {
    RationalPoint::new([("q", rat(2, 3)), ("t", rat(3, 5)), ("s", rat(5, 7))], 64).expect("valid point")
}

pub fn verify(args: &VerifyArgs, seed: u64) -> Result<IdentityReport> {
    if args.k == 0 {
        return Err(Error::Usage("k must be at least 1".into()));
    }
    let trunc = Truncation::new(args.nq, args.nt);
    let id = args.identity;
    let mut report = match id {
        IdentityId::ThmMain => compare(args.k, Representation::Fermionic, Representation::Bosonic, trunc)?,
        IdentityId::ThmKks => compare(args.k, Representation::Fermionic, Representation::Fermionic2, trunc)?,
        IdentityId::AppxA => compare(args.k, Representation::Original, Representation::Fermionic2, trunc)?,
        IdentityId::ThmConjPair => match pair_arg(args, PairId::Thm31)? {
            PairId::Thm31 => {
                let (gamma, delta) = conjugate_pair(trunc)?;
                verify_conjugate_pair(&gamma, &delta, args.nmax.unwrap_or(5) as usize)?
            }
            PairId::Thm61 => wp_check(args)?,
            other => return Err(Error::Usage(format!("{other:?} is not a conjugate pair"))),
        },
        IdentityId::ThmWp => wp_check(args)?,
        IdentityId::ThmGeneral => {
            let mut rng = rng_for(seed);
            let (b, rb) = chain_values(args.b.as_deref(), args.k, &mut rng)?;
            let (c, rc) = chain_values(args.c.as_deref(), args.k, &mut rng)?;
            let r = generalized_identity(args.k, &b, &c, trunc)?;
            if rb || rc {
                r.with_seed(seed)
            } else {
                r
            }
        }
        IdentityId::LemmaB1 | IdentityId::AppxC => key_sum(args, seed)?,
        IdentityId::MultiRr => multi_rogers_ramanujan(args.k, args.nq)?,
        IdentityId::CorollarySpecial => corollary(args, trunc, seed)?,
    };
    report.identity = id.name().to_string();
    Ok(report)
}

fn compare(k: usize, left: Representation, right: Representation, trunc: Truncation) -> Result<IdentityReport> {
    let report = compare_representations(k, left, right, trunc)?;
    let sides = report.identity.clone();
    Ok(report.with_param("sides", sides))
}

fn pair_arg(args: &VerifyArgs, default: PairId) -> Result<PairId> {
    match &args.pair {
        None => Ok(default),
        Some(p) => p.parse(),
    }
}

/// WP relation plus the entrywise `s = 0` reduction to the ordinary pair.
fn wp_check(args: &VerifyArgs) -> Result<IdentityReport> {
    let started = Instant::now();
    let trunc = Truncation::with_s(args.nq, args.nt, args.ns);
    let n_max = args.nmax.unwrap_or(4) as usize;
    let (gp, dp) = wp_conjugate_pair(trunc)?;
    let (g, d) = conjugate_pair(trunc)?;
    let mut report = verify_wp_conjugate(&gp, &dp, n_max)?;
    let zero = Substitution::Rational(rat(0, 1));
    let mut reduction = IdentityReport::new("s=0");
    for n in 0..=n_max {
        for (wp, plain, name) in [(&gp, &g, "gamma"), (&dp, &d, "delta")] {
            let lhs = wp.entry(n)?.specialize(Var::S, &zero)?;
            reduction.record_series(&lhs, &plain.entry(n)?, Some(format!("{name} n={n}")));
        }
    }
    report.absorb(&reduction);
    Ok(report.finish(started))
}

fn key_sum(args: &VerifyArgs, seed: u64) -> Result<IdentityReport> {
    let started = Instant::now();
    let lemma = args.identity == IdentityId::LemmaB1;
    let default = if lemma { 6 } else { 4 };
    let (l_max, n_max) = (args.lmax.unwrap_or(default), args.nmax.unwrap_or(default));
    let check = |l: u32, n: u32, p: &RationalPoint| if lemma { lemma_b1(l, n, p) } else { appendix_c_sum(l, n, p) };
    let grid: Vec<(u32, u32)> = (0..=l_max).flat_map(|l| (0..=n_max).map(move |n| (l, n))).collect();
    let run_point = |p: &RationalPoint| -> Result<Vec<IdentityReport>> {
        grid.par_iter().map(|&(l, n)| check(l, n, p)).collect()
    };

    let mut rows = run_point(&fixed_point())?;
    let max_length = 2 * (l_max + n_max) + 8;
    sample_points(&["q", "t", "s"], args.points, seed, max_length, |p| {
        rows.extend(run_point(p)?);
        Ok(())
    })?;

    let mut report = IdentityReport::new(args.identity.name())
        .with_param("lmax", l_max)
        .with_param("nmax", n_max)
        .with_param("points", args.points)
        .with_seed(seed);
    for r in &rows {
        report.absorb(r);
    }
    Ok(report.finish(started))
}

fn corollary(args: &VerifyArgs, trunc: Truncation, seed: u64) -> Result<IdentityReport> {
    let started = Instant::now();
    let pair = pair_arg(args, PairId::Seed)?;
    let (alpha, beta) = seed_pair(trunc);
    let mut randomized = false;
    let (alpha, beta) = match &pair {
        PairId::Seed => (alpha, beta),
        PairId::Chain { k, b, c } => {
            let mut rng = rng_for(seed);
            let (b, c) = match (b, c) {
                (Some(b), Some(c)) => (b.clone(), c.clone()),
                _ => {
                    let (b, rb) = chain_values(args.b.as_deref(), *k, &mut rng)?;
                    let (c, rc) = chain_values(args.c.as_deref(), *k, &mut rng)?;
                    randomized = rb || rc;
                    (b, c)
                }
            };
            chain_lift(&alpha, &beta, &ChainParams::new(b, c)?)?
        }
        other => return Err(Error::Usage(format!("{other:?} is not a Bailey pair"))),
    };
    let (gamma, delta) = conjugate_pair(trunc)?;
    let mut report = bailey_transform_check(&alpha, &beta, &gamma, &delta)?
        .with_param("pair", args.pair.as_deref().unwrap_or("seed"));
    let n_max = args.nmax.unwrap_or(4) as usize;
    report.absorb(&verify_bailey_pair(&alpha, &beta, n_max)?);
    if randomized {
        report = report.with_seed(seed);
    }
    Ok(report.finish(started))
}
