//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use adindex_cli::{report_json, run};
use adindex_core::hypergeometric::{appendix_c_sides, lemma_b1_sides, RationalPoint};
use adindex_core::macdonald::{
    generalized_sides, index, is_nonnegative_integral, specialize_index, IndexSpec, Representation, Specialization,
};
use adindex_core::series::rat;
use adindex_core::{IdentityReport, Rational, Truncation};

struct Runner {
    /// Every command line run so far with its output, for the determinism replay.
    log: Vec<(Vec<String>, String)>,
}

impl Runner {
    /// Runs the CLI; passes when the exit code is 0 and every report passes.
    fn cli(&mut self, args: &str) -> Result<Vec<IdentityReport>, String> {
        let argv: Vec<String> = std::iter::once("adindex".to_string())
            .chain(args.split_whitespace().map(String::from))
            .collect();
        let out = run(argv.clone());
        self.log.push((argv, normalized(&out.stdout)));
        let reports: Vec<IdentityReport> = out
            .stdout
            .lines()
            .map(|l| serde_json::from_str(l).map_err(|e| format!("`{args}`: bad json: {e}")))
            .collect::<Result<_, _>>()?;
        if out.code != 0 {
            let first = reports.iter().find(|r| !r.passed()).map(|r| r.to_string());
            return Err(format!("`{args}` exited {}: {}{}", out.code, first.unwrap_or_default(), out.stderr.trim()));
        }
        if reports.is_empty() {
            return Err(format!("`{args}` printed no report"));
        }
        Ok(reports)
    }

    fn timed(&mut self, args: &str, limit: Duration) -> Result<(), String> {
        let started = Instant::now();
        self.cli(args)?;
        let took = started.elapsed();
        if took > limit {
            return Err(format!("`{args}` took {took:?}, limit {limit:?}"));
        }
        Ok(())
    }
}

/// Report lines with the wall time zeroed.
fn normalized(stdout: &str) -> String {
    stdout
        .lines()
        .map(|l| match serde_json::from_str::<IdentityReport>(l) {
            Ok(mut r) => {
                r.wall_time_ms = 0;
                report_json(&r)
            }
            Err(_) => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

const MINUTE: Duration = Duration::from_secs(60);

fn duality(r: &mut Runner) -> Result<(), String> {
    for k in 1..=3 {
        r.timed(&format!("verify thm-main --k {k} --nq 10 --nt 8 --json"), MINUTE)?;
    }
    Ok(())
}

fn second_fermionic(r: &mut Runner) -> Result<(), String> {
    for k in 1..=2 {
        r.timed(&format!("verify thm-kks --k {k} --nq 8 --nt 6 --json"), 2 * MINUTE)?;
    }
    Ok(())
}

fn original_form(r: &mut Runner) -> Result<(), String> {
    for k in 1..=2 {
        r.cli(&format!("verify appx-a --k {k} --nq 6 --nt 4 --json"))?;
    }
    Ok(())
}

fn conjugate_pair(r: &mut Runner) -> Result<(), String> {
    r.cli("verify thm-conj-pair --pair thm31 --nq 10 --nt 10 --nmax 5 --json").map(|_| ())
}

fn bailey_transform(r: &mut Runner) -> Result<(), String> {
    for pair in ["seed", "chain(1)", "chain(2)"] {
        r.cli(&format!("verify corollary-special --pair {pair} --json"))?;
    }
    for (k, seed) in [(1, 11), (2, 12), (2, 13)] {
        r.cli(&format!("verify corollary-special --pair chain({k}) --b random --c random --seed {seed} --json"))?;
    }
    Ok(())
}

fn parametrized(r: &mut Runner) -> Result<(), String> {
    let trunc = Truncation::new(10, 8);
    for k in 1..=2 {
        r.cli(&format!("verify thm-general --k {k} --nq 10 --nt 8 --json"))?;
        for seed in [21, 22] {
            r.cli(&format!("verify thm-general --k {k} --nq 10 --nt 8 --b random --c random --seed {seed} --json"))?;
        }
        let zeros = vec![Rational::from_integer(0.into()); k];
        let (lhs, rhs) = generalized_sides(k, &zeros, &zeros, trunc).map_err(|e| e.to_string())?;
        for rep in [Representation::Bosonic, Representation::Fermionic] {
            let f = index(&IndexSpec::new(k, rep, trunc).unwrap()).map_err(|e| e.to_string())?;
            ensure(lhs == f && rhs == f, || format!("k={k}: zero-parameter sides differ from the {rep} index"))?;
        }
    }
    Ok(())
}

fn wp_pair(r: &mut Runner) -> Result<(), String> {
    r.cli("verify thm-wp --nq 8 --nt 8 --ns 6 --nmax 4 --json").map(|_| ())
}

fn key_sums(r: &mut Runner) -> Result<(), String> {
    r.cli("verify lemma-b1 --lmax 6 --nmax 6 --points 10 --seed 42 --json")?;
    r.cli("verify appx-c --lmax 4 --nmax 4 --points 10 --seed 43 --json")?;
    let fixed = RationalPoint::new([("q", rat(2, 3)), ("t", rat(3, 5)), ("s", rat(5, 7))], 64).unwrap();
    let zero = Rational::from_integer(0.into());
    for n in 1..=6u32 {
        for l in 0..n {
            let mut p = fixed.clone();
            let (a, b) = lemma_b1_sides(l, n, &mut p).map_err(|e| e.to_string())?;
            ensure(a == zero && b == zero, || format!("key sum l={l} n={n}: {a} = {b}, expected 0 = 0"))?;
            if n <= 4 {
                let (a, b) = appendix_c_sides(l, n, &mut p).map_err(|e| e.to_string())?;
                ensure(a == zero && b == zero, || format!("s-extension l={l} n={n}: {a} = {b}, expected 0 = 0"))?;
            }
        }
    }
    Ok(())
}

fn classical(r: &mut Runner) -> Result<(), String> {
    let reports = {
        let started = Instant::now();
        let reports = r.cli("selftest --json")?;
        ensure(started.elapsed() <= MINUTE, || format!("selftest took {:?}", started.elapsed()))?;
        reports
    };
    let names: Vec<&str> = reports.iter().map(|r| r.identity.as_str()).collect();
    for needed in [
        "pfaff-saalschutz",
        "chu-vandermonde-2",
        "qbinomial-theorem",
        "sixphi5",
        "heine-1",
        "s-closed-form",
        "s-symmetry",
        "b-closed-form",
        "phi-closed-form",
        "hermite-orthogonality",
        "ultraspherical-orthogonality",
        "hermite-linearization",
        "weight-expansion",
        "expansion-coefficients",
    ] {
        ensure(names.contains(&needed), || format!("selftest lacks {needed}"))?;
    }
    Ok(())
}

fn rogers_ramanujan(r: &mut Runner) -> Result<(), String> {
    for k in 1..=3 {
        r.cli(&format!("verify multi-rr --k {k} --nq 20 --json"))?;
    }
    Ok(())
}

fn positivity(_: &mut Runner) -> Result<(), String> {
    let trunc = Truncation::new(10, 8);
    for k in 1..=3 {
        let mut reps = vec![(Representation::Bosonic, trunc), (Representation::Fermionic, trunc), (Representation::Fermionic2, trunc)];
        if k <= 2 {
            reps.push((Representation::Original, Truncation::new(6, 4)));
        }
        for (rep, trunc) in reps {
            let f = index(&IndexSpec::new(k, rep, trunc).unwrap()).map_err(|e| e.to_string())?;
            ensure(f.is_flip_symmetric(), || format!("k={k} {rep}: not symmetric under z -> 1/z"))?;
            if rep == Representation::Bosonic {
                let u = specialize_index(&f, Specialization::Unrefined).map_err(|e| e.to_string())?;
                ensure(is_nonnegative_integral(&u), || format!("k={k}: unrefined index has a coefficient outside N"))?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    type Criterion = fn(&mut Runner) -> Result<(), String>;
    let criteria: [(&str, Criterion); 11] = [
        ("fermionic = bosonic, k=1..3 at (10,8), each under 60s", duality),
        ("fermionic = second fermionic form, k=1,2 at (8,6), each under 120s", second_fermionic),
        ("original multisum = second fermionic form, k=1,2 at (6,4)", original_form),
        ("conjugate Bailey pair relation, n<=5 at (10,10)", conjugate_pair),
        ("Bailey transform for the seed pair and chain lifts k<=2", bailey_transform),
        ("parametrized duality, k<=2, zero and random parameters", parametrized),
        ("WP conjugate pair, n<=4 at (8,8,6), s=0 reduction", wp_pair),
        ("key summation and its s-extension at fixed and random points", key_sums),
        ("classical layer via selftest, under 60s", classical),
        ("multisum Rogers-Ramanujan, k=1..3 at q^20", rogers_ramanujan),
        ("unrefined positivity and z -> 1/z symmetry", positivity),
    ];

    let mut runner = Runner { log: Vec::new() };
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let result = check(&mut runner);
        line(i + 1, name, &result, started.elapsed());
        failures += result.is_err() as usize;
    }

    let started = Instant::now();
    let first = std::mem::take(&mut runner.log);
    let mut result = Ok(());
    for (argv, output) in &first {
        let again = normalized(&run(argv.clone()).stdout);
        if &again != output {
            result = Err(format!("`{}` differs between runs", argv[1..].join(" ")));
            break;
        }
    }
    line(12, &format!("determinism: {} runs replayed byte-identically", first.len()), &result, started.elapsed());
    failures += result.is_err() as usize;

    println!("acceptance: {} of 12 criteria passed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn line(n: usize, name: &str, result: &Result<(), String>, took: Duration) {
    match result {
        Ok(()) => println!("criterion {n:>2} PASS {name} [{:.1}s]", took.as_secs_f64()),
        Err(e) => println!("criterion {n:>2} FAIL {name} [{:.1}s]: {e}", took.as_secs_f64()),
    }
}
