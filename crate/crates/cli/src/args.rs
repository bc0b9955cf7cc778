//! Command-line grammar.

use std::path::PathBuf;
use std::str::FromStr;

use adindex_core::{Error, Rational, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Parser)]
#[command(name = "adindex", version, about = "Exact checks of q-series identities behind Macdonald indices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, global = true, hide = true)]
    pub inject_fault: Option<Fault>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fault {
    Qbinomial,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check one identity and print its report
    Verify(VerifyArgs),
    /// Print the coefficient table of an index
    Table(TableArgs),
    /// Time every representation of the index
    Bench(BenchArgs),
    /// Run the classical-identity suite
    Selftest(SelftestArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdentityId {
    #[value(name = "thm-main")]
    ThmMain,
    #[value(name = "thm-kks")]
    ThmKks,
    #[value(name = "thm-conj-pair")]
    ThmConjPair,
    #[value(name = "thm-wp")]
    ThmWp,
    #[value(name = "thm-general")]
    ThmGeneral,
    #[value(name = "appx-a")]
    AppxA,
    #[value(name = "lemma-b1")]
    LemmaB1,
    #[value(name = "appx-c")]
    AppxC,
    #[value(name = "multi-rr")]
    MultiRr,
    #[value(name = "corollary-special")]
    CorollarySpecial,
}

impl IdentityId {
    pub fn name(self) -> &'static str {
        match self {
            IdentityId::ThmMain => "thm-main",
            IdentityId::ThmKks => "thm-kks",
            IdentityId::ThmConjPair => "thm-conj-pair",
            IdentityId::ThmWp => "thm-wp",
            IdentityId::ThmGeneral => "thm-general",
            IdentityId::AppxA => "appx-a",
            IdentityId::LemmaB1 => "lemma-b1",
            IdentityId::AppxC => "appx-c",
            IdentityId::MultiRr => "multi-rr",
            IdentityId::CorollarySpecial => "corollary-special",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    pub identity: IdentityId,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 8)]
    pub nq: u32,
    #[arg(long, default_value_t = 6)]
    pub nt: u32,
    #[arg(long, default_value_t = 4)]
    pub ns: u32,
    /// Largest index n checked (default depends on the identity)
    #[arg(long)]
    pub nmax: Option<u32>,
    #[arg(long)]
    pub lmax: Option<u32>,
    /// Random rational points on top of the fixed one
    #[arg(long, default_value_t = 10)]
    pub points: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated rationals, or `random`
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// seed | thm31 | thm61 | chain(K[;b1,..;c1,..])
    #[arg(long)]
    pub pair: Option<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// bosonic, fermionic, fermionic2, original, schur or hall-littlewood
    #[arg(long, default_value = "fermionic")]
    pub rep: String,
    #[arg(long, default_value_t = 8)]
    pub nq: u32,
    #[arg(long, default_value_t = 6)]
    pub nt: u32,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Benchmarks k = 1..=kmax
    #[arg(long, default_value_t = 3)]
    pub kmax: usize,
    #[arg(long, default_value_t = 8)]
    pub nq: u32,
    #[arg(long, default_value_t = 6)]
    pub nt: u32,
    /// Timed runs per row
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, value_delimiter = ',', default_value = "bosonic,fermionic,fermionic2")]
    pub rep: Vec<String>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SelftestArgs {
    #[arg(long)]
    pub json: bool,
}

/// A Bailey or conjugate Bailey pair named on the command line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairId {
    Seed,
    Thm31,
    Thm61,
    Chain { k: usize, b: Option<Vec<Rational>>, c: Option<Vec<Rational>> },
}

impl FromStr for PairId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Usage(format!("bad pair `{s}`; expected seed, thm31, thm61 or chain(K[;b..;c..])"));
        match s.trim() {
            "seed" => return Ok(PairId::Seed),
            "thm31" => return Ok(PairId::Thm31),
            "thm61" => return Ok(PairId::Thm61),
            _ => {}
        }
        let inner = s
            .trim()
            .strip_prefix("chain(")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(bad)?;
        let parts: Vec<&str> = inner.split(';').collect();
        let k: usize = parts[0].trim().parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(Error::Usage("chain length must be at least 1".into()));
        }
        match parts.len() {
            1 => Ok(PairId::Chain { k, b: None, c: None }),
            3 => Ok(PairId::Chain {
                k,
                b: Some(parse_rationals(parts[1], k)?),
                c: Some(parse_rationals(parts[2], k)?),
            }),
            _ => Err(bad()),
        }
    }
}

pub fn parse_rationals(s: &str, k: usize) -> Result<Vec<Rational>> {
    let values = s
        .split(',')
        .map(|v| {
            let v = v.trim();
            if v.ends_with("/0") {
                return Err(Error::Usage(format!("zero denominator in `{v}`")));
            }
            Rational::from_str(v).map_err(|_| Error::Usage(format!("`{v}` is not a rational")))
        })
        .collect::<Result<Vec<_>>>()?;
    if values.len() != k {
        return Err(Error::Usage(format!("expected {k} values, got {}", values.len())));
    }
    Ok(values)
}

/// `k` nonzero rationals `±n/d` with `n, d` in `1..=12`.
pub fn random_rationals(k: usize, rng: &mut ChaCha8Rng) -> Vec<Rational> {
    (0..k)
        .map(|_| {
            let n: i64 = rng.gen_range(1..=12);
            let d: i64 = rng.gen_range(1..=12);
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            Rational::new((sign * n).into(), d.into())
        })
        .collect()
}

/// Reads `--b`/`--c`; a missing value means zeros.
pub fn chain_values(spec: Option<&str>, k: usize, rng: &mut ChaCha8Rng) -> Result<(Vec<Rational>, bool)> {
    match spec {
        None => Ok((vec![Rational::from_integer(0.into()); k], false)),
        Some("random") => Ok((random_rationals(k, rng), true)),
        Some(list) => Ok((parse_rationals(list, k)?, false)),
    }
}

pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
