//! The `vieta` command line. [`run`] takes the arguments and output streams
//! and returns the process exit code, so it can be driven from tests.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::exactnum::{gcd, parse_bigint, parse_rational, BigInt, Rational};
use crate::invariants::{conjecture_r2_check, gcd_profile, product_identity, value_set_check, Status};
use crate::jump::{
    ascend, descend, eval_k, is_solution, jump_three, try_descend, Descent, EquationSpec, JumpKind, Pair,
    Tuple,
};
use crate::report::{Check, Report};
use crate::search::{brute_pairs, brute_tuples, chain_coverage_check, SearchBox};
use crate::sequences::{
    closed_form, d_closed_form, eval_binet, identity_suite, terms, Parity, SequenceId,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_VERIFICATION: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "vieta", version, about = "Vieta jumping for (a+r)/b + (b+r)/a = k")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Worker threads for `search` (0 = all cores).
    #[arg(long, global = true, env = "VIETA_THREADS", default_value_t = 0)]
    threads: usize,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print terms 0..=N of a sequence.
    Seq {
        id: SequenceId,
        n_max: u64,
        /// Print the closed form instead of the terms.
        #[arg(long)]
        closed_form: bool,
    },
    /// Descend from a solution to a diagonal one.
    Descend {
        #[arg(long, default_value = "1", value_parser = big)]
        r: BigInt,
        #[arg(long, value_parser = big)]
        k: BigInt,
        #[arg(value_parser = big)]
        a: BigInt,
        #[arg(value_parser = big)]
        b: BigInt,
    },
    /// Generate solutions above a starting solution with a >= b.
    Ascend {
        #[arg(long, default_value = "1", value_parser = big)]
        r: BigInt,
        #[arg(long, value_parser = big)]
        k: BigInt,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(value_parser = big)]
        a: BigInt,
        #[arg(value_parser = big)]
        b: BigInt,
    },
    /// Run the invariant battery on the k = 3 and k = 4 chains.
    Verify {
        #[arg(long, default_value_t = 60)]
        n_max: u64,
        /// Restrict to one chain (a_chain or b_chain).
        #[arg(long)]
        chain: Option<SequenceId>,
        /// Box size for the brute-force classification check.
        #[arg(long, default_value_t = 500)]
        bound: u64,
    },
    /// Exhaustive search over a box (m = 2) or by coordinate sum (m >= 3).
    Search {
        #[arg(long, default_value = "1", value_parser = big)]
        r: BigInt,
        #[arg(long, value_parser = big)]
        k: Option<BigInt>,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, value_parser = big, conflicts_with = "sum_bound")]
        bound: Option<BigInt>,
        #[arg(long, value_parser = big)]
        sum_bound: Option<BigInt>,
    },
    /// Check 2(a+b)/gcd^2 along the r = 2 chains.
    Conjecture {
        #[arg(long, default_value_t = 60)]
        n_max: u64,
    },
    /// Jump one entry of a three-variable solution.
    Jump3 {
        #[arg(long, value_parser = big)]
        r: BigInt,
        #[arg(long, value_parser = big)]
        k: BigInt,
        /// 1, 2 or 3; all three when omitted.
        #[arg(long)]
        position: Option<usize>,
        /// Entries, as integers or p/q.
        #[arg(num_args = 3, value_parser = rational)]
        entries: Vec<Rational>,
    },
}

fn big(s: &str) -> Result<BigInt, String> {
    parse_bigint(s).map_err(|e| e.to_string())
}

fn rational(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

/// Failure of a subcommand: exit code plus message for stderr.
struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Consistency(_) => EXIT_VERIFICATION,
            _ => EXIT_DATA,
        };
        Fail(code, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(EXIT_USAGE, msg.into())
}

/// Rendered output plus exit code.
struct Output {
    body: String,
    code: i32,
}

impl Output {
    fn ok(body: String) -> Self {
        Self { body, code: EXIT_OK }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn no_dot(format: Format, cmd: &str) -> Result<(), Fail> {
    if format == Format::Dot {
        Err(usage(format!("--format dot is only available for descend, not {cmd}")))
    } else {
        Ok(())
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Results go to `out` (or `--output`), diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = dispatch(&cli, err);
    match result {
        Ok(o) => {
            let written = match &cli.output {
                Some(path) => fs::write(path, &o.body).map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(o.body.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(msg) = written {
                let _ = writeln!(err, "error: {msg}");
                return EXIT_DATA;
            }
            o.code
        }
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cli: &Cli, err: &mut dyn Write) -> Result<Output, Fail> {
    let f = cli.format;
    match &cli.command {
        Command::Seq { id, n_max, closed_form } => {
            no_dot(f, "seq")?;
            cmd_seq(*id, *n_max, *closed_form, f)
        }
        Command::Descend { r, k, a, b } => cmd_descend(r, k, a, b, f),
        Command::Ascend { r, k, count, a, b } => {
            no_dot(f, "ascend")?;
            cmd_ascend(r, k, *count, a, b, f)
        }
        Command::Verify { n_max, chain, bound } => {
            no_dot(f, "verify")?;
            cmd_verify(*n_max, *chain, *bound, f, err)
        }
        Command::Search { r, k, m, bound, sum_bound } => {
            no_dot(f, "search")?;
            cmd_search(r, k.as_ref(), *m, bound.as_ref().or(sum_bound.as_ref()), cli.threads, f, err)
        }
        Command::Conjecture { n_max } => {
            no_dot(f, "conjecture")?;
            cmd_conjecture(*n_max, f, err)
        }
        Command::Jump3 { r, k, position, entries } => {
            no_dot(f, "jump3")?;
            cmd_jump3(r, k, *position, entries, f)
        }
    }
}

fn cmd_seq(id: SequenceId, n_max: u64, show_form: bool, f: Format) -> Result<Output, Fail> {
    if show_form {
        let forms: Vec<(String, String)> = match id {
            SequenceId::DOfA | SequenceId::DOfB => [(Parity::Odd, "d_{2n-1}"), (Parity::Even, "d_{2n}")]
                .into_iter()
                .map(|(p, name)| Ok((name.to_string(), d_closed_form(id, p)?.to_string())))
                .collect::<Result<_, Error>>()?,
            _ => vec![(id.to_string(), closed_form(id)?.to_string())],
        };
        return Ok(Output::ok(match f {
            Format::Json => to_json(&json!({
                "id": id,
                "closed_forms": forms.iter().map(|(n, v)| json!({"term": n, "form": v})).collect::<Vec<_>>(),
            })),
            _ => forms.iter().map(|(n, v)| format!("{n} = {v}\n")).collect(),
        }));
    }
    let len = usize::try_from(n_max)
        .ok()
        .and_then(|n| n.checked_add(1))
        .ok_or_else(|| usage("n_max too large"))?;
    let t = terms(id, len);
    Ok(Output::ok(match f {
        Format::Json => {
            let strs: Vec<String> = t.iter().map(|x| x.to_string()).collect();
            format!("{}\n", serde_json::to_string(&strs).expect("strings"))
        }
        _ => t.iter().map(|x| format!("{x}\n")).collect(),
    }))
}

fn solution_input(r: &BigInt, k: &BigInt, a: &BigInt, b: &BigInt) -> Result<(EquationSpec, Pair), Fail> {
    let spec = EquationSpec::pair(r.clone(), k.clone())?;
    let p = Pair::new(a.clone(), b.clone())?;
    if !is_solution(&p, &spec) {
        return Err(Fail(
            EXIT_DATA,
            format!(
                "{p} is not a solution for r = {r}, k = {k}: (a+r)/b + (b+r)/a = {}",
                eval_k(&p, r)
            ),
        ));
    }
    Ok((spec, p))
}

fn cmd_descend(r: &BigInt, k: &BigInt, a: &BigInt, b: &BigInt, f: Format) -> Result<Output, Fail> {
    let (spec, p) = solution_input(r, k, a, b)?;
    let outcome = if *r <= BigInt::from(2) {
        Descent::Complete(descend(&p, &spec)?)
    } else {
        try_descend(&p, &spec)?
    };
    let trace = outcome.trace();
    let body = match f {
        Format::Json => to_json(&outcome),
        Format::Dot => trace.to_dot(),
        Format::Text => {
            let mut s = trace.to_text();
            if let Descent::Stalled(st) = &outcome {
                s.push_str(&format!("stalled at {}: no jump lowers the coordinate sum\n", st.current));
                for step in &st.attempted {
                    s.push_str(&format!("  {} would give {}\n", step.kind(), step.after()));
                }
            }
            s
        }
    };
    Ok(Output::ok(body))
}

fn cmd_ascend(r: &BigInt, k: &BigInt, count: usize, a: &BigInt, b: &BigInt, f: Format) -> Result<Output, Fail> {
    let (spec, p) = solution_input(r, k, a, b)?;
    let pairs = ascend(&p, count, &spec)?;
    Ok(Output::ok(match f {
        Format::Json => to_json(&json!({ "spec": spec, "start": p, "pairs": pairs })),
        _ => pairs.iter().map(|q| format!("{q}\n")).collect(),
    }))
}

/// Everything `verify` checks for one of the two `r = 1` chains.
pub fn chain_battery(chain: SequenceId, n_max: u64) -> Result<Report, Error> {
    let (k, seed) = match chain {
        SequenceId::AChain => (3, 2),
        SequenceId::BChain => (4, 1),
        other => return Err(Error::Domain(format!("{other} is not a solution chain"))),
    };
    let spec = EquationSpec::pair(1, k)?;
    let t = terms(chain, n_max as usize + 2);
    let u = |n: u64| n as usize;
    let pair = |n: u64| Pair::new(t[u(n)].clone(), t[u(n) + 1].clone());
    let mut checks = vec![Check::over("(t_n, t_{n+1}) is a solution", 0..=n_max, |n| {
        pair(n).is_ok_and(|p| is_solution(&p, &spec))
    })];
    let form = closed_form(chain)?;
    checks.push(Check::over("closed form equals recurrence", 0..=n_max, |n| {
        eval_binet(&form, n).ok().as_ref() == Some(&t[u(n)])
    }));
    if chain == SequenceId::AChain {
        for parity in [Parity::Odd, Parity::Even] {
            let form = d_closed_form(SequenceId::DOfA, parity)?;
            let name = match parity {
                Parity::Odd => "d_{2n-1} closed form",
                Parity::Even => "d_{2n} closed form",
            };
            checks.push(Check::over(name, 1..=n_max / 2, |n| {
                let i = u(parity.sequence_index(n));
                eval_binet(&form, n).ok() == Some(gcd(&t[i], &t[i + 1]))
            }));
        }
    }
    let profile = gcd_profile(chain, n_max)?;
    checks.extend(profile.checks.iter().cloned());
    checks.extend(product_identity(chain, n_max)?.checks);
    let values = value_set_check(&spec, n_max)?;
    checks.push(values.check());
    let diagonal = Pair::new(seed, seed)?;
    checks.push(Check::over("descent from (t_{n+1}, t_n) reaches the seed", 0..=n_max, |n| {
        let Ok(p) = pair(n) else { return false };
        let Ok(tr) = descend(&crate::jump::flip(&p), &spec) else { return false };
        let sums: Vec<BigInt> = tr
            .steps()
            .iter()
            .filter(|s| s.kind() != JumpKind::Flip)
            .flat_map(|s| [s.before().sum(), s.after().sum()])
            .collect();
        *tr.terminal() == diagonal && sums.chunks(2).all(|w| w[1] < w[0])
    }));
    Ok(Report {
        chain: chain.to_string(),
        n_max,
        checks,
        observed_values: profile.report().observed_values,
    })
}

/// The full battery behind `verify`: per-chain checks, the Fibonacci
/// identities and the brute-force classification over `[1, bound]^2`.
pub fn verify_battery(n_max: u64, chain: Option<SequenceId>, bound: u64) -> Result<Vec<Report>, Error> {
    if n_max < 2 {
        return Err(Error::Domain(format!("verify needs n_max >= 2, got {n_max}")));
    }
    let chains = match chain {
        Some(c @ (SequenceId::AChain | SequenceId::BChain)) => vec![c],
        Some(other) => return Err(Error::Domain(format!("{other} is not a solution chain"))),
        None => vec![SequenceId::AChain, SequenceId::BChain],
    };
    let mut reports = Vec::new();
    for &c in &chains {
        reports.push(chain_battery(c, n_max)?);
    }
    if chains.contains(&SequenceId::AChain) {
        reports.push(identity_suite(n_max)?);
    }
    if chain.is_none() {
        reports.push(chain_coverage_check(&SearchBox::pairs(1, bound)?, 1)?);
    }
    Ok(reports)
}

fn cmd_verify(n_max: u64, chain: Option<SequenceId>, bound: u64, f: Format, err: &mut dyn Write) -> Result<Output, Fail> {
    let reports = verify_battery(n_max, chain, bound)?;
    let passed = reports.iter().all(Report::passed);
    for rep in &reports {
        for c in rep.failures() {
            let _ = writeln!(err, "FAIL {}: {}", rep.chain, c.name);
        }
    }
    let body = match f {
        Format::Json => to_json(&json!({ "n_max": n_max, "passed": passed, "reports": reports })),
        _ => {
            let mut s: String = reports.iter().map(Report::to_text).collect();
            s.push_str(if passed { "all checks passed\n" } else { "some checks FAILED\n" });
            s
        }
    };
    Ok(Output { body, code: if passed { EXIT_OK } else { EXIT_INVARIANT } })
}

fn small(x: &BigInt, what: &str) -> Result<u64, Fail> {
    x.to_u64().ok_or_else(|| Fail(EXIT_DATA, format!("{what} = {x} is out of range for a search")))
}

fn cmd_search(
    r: &BigInt,
    k: Option<&BigInt>,
    m: usize,
    bound: Option<&BigInt>,
    threads: usize,
    f: Format,
    err: &mut dyn Write,
) -> Result<Output, Fail> {
    let bound = bound.ok_or_else(|| usage("search needs --bound (m = 2) or --sum-bound (m >= 3)"))?;
    let k = match k {
        // no positive solution has k <= 0, so such a filter is simply empty
        Some(k) if *k <= BigInt::from(0) => Some(0),
        Some(k) => Some(small(k, "k")?),
        None => None,
    };
    let bx = SearchBox::new(small(r, "r")?, m, small(bound, "bound")?, k)?;
    let rep = if m == 2 { brute_pairs(&bx, threads)? } else { brute_tuples(&bx, threads)? };
    let _ = writeln!(err, "search finished in {:.3} s", rep.elapsed.as_secs_f64());
    let body = match f {
        Format::Json => to_json(&rep),
        _ => rep.to_text(),
    };
    let code = if rep.verification_failures > 0 {
        let _ = writeln!(err, "error: {} hits failed exact re-verification", rep.verification_failures);
        EXIT_VERIFICATION
    } else {
        EXIT_OK
    };
    Ok(Output { body, code })
}

fn cmd_conjecture(n_max: u64, f: Format, err: &mut dyn Write) -> Result<Output, Fail> {
    let rep = conjecture_r2_check(n_max)?;
    let mut code = EXIT_OK;
    match rep.status {
        Status::Pass => {}
        Status::CounterexampleCandidate => {
            for fam in rep.families.iter().filter(|x| x.status != Status::Pass) {
                let _ = writeln!(
                    err,
                    "COUNTEREXAMPLE CANDIDATE: k = {} at n = {}: {}",
                    fam.k,
                    fam.first_violation.unwrap_or(0),
                    fam.witness.as_ref().map(ToString::to_string).unwrap_or_default()
                );
            }
        }
        Status::Fail => code = EXIT_VERIFICATION,
    }
    let body = match f {
        Format::Json => to_json(&rep),
        _ => {
            let mut s = format!("r = 2, 2(a+b)/gcd^2 along the chains up to n = {n_max}\n");
            for fam in &rep.families {
                s.push_str(&format!(
                    "  k={}: observed {{{}}}, expected {{{}}}: {}\n",
                    fam.k,
                    fam.observed.join(", "),
                    fam.expected.join(", "),
                    match fam.status {
                        Status::Pass => "consistent".to_string(),
                        Status::Fail => "NOT A SOLUTION (bug)".to_string(),
                        Status::CounterexampleCandidate => format!(
                            "COUNTEREXAMPLE CANDIDATE at {}",
                            fam.witness.as_ref().map(ToString::to_string).unwrap_or_default()
                        ),
                    }
                ));
            }
            s
        }
    };
    Ok(Output { body, code })
}

fn cmd_jump3(r: &BigInt, k: &BigInt, position: Option<usize>, entries: &[Rational], f: Format) -> Result<Output, Fail> {
    let spec = EquationSpec::triple(r.clone(), k.clone())?;
    let t = Tuple::new(entries.to_vec())?;
    let positions = match position {
        Some(p) => vec![p],
        None => vec![1, 2, 3],
    };
    let mut results = Vec::new();
    for p in positions {
        let out = jump_three(&t, p, &spec)?;
        results.push((p, out.entries()[p - 1].clone(), out));
    }
    Ok(Output::ok(match f {
        Format::Json => to_json(&json!({
            "spec": spec,
            "start": t,
            "jumps": results
                .iter()
                .map(|(p, v, out)| json!({ "position": p, "value": v.to_string(), "tuple": out, "integral": out.is_integral() }))
                .collect::<Vec<_>>(),
        })),
        _ => results
            .iter()
            .map(|(p, _, out)| format!("position {p}: {out}{}\n", if out.is_integral() { "" } else { " (not integral)" }))
            .collect(),
    }))
}
