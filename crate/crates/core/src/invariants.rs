//! Checkers for the gcd structure of the solution chains and for the values
//! of the normalized sum `(a+b)/gcd(a,b)^2`.
//!
//! For the `k = 3` chain, `d_n = gcd(a_n, a_{n+1})` satisfies
//! `d_{2n-1} = F_{2n-1}`, `d_{2n} = L_{2n}` and `a_{n+1} = d_n d_{n+1}`; the
//! `k = 4` chain has the analogous closed forms over `2 +- sqrt3`. The
//! normalized sums alternate 5, 1 (`k = 3`) and 3, 2 (`k = 4`). For `r = 2`
//! the corresponding statement about `2(a+b)/gcd^2` is open, so a violation
//! there is reported as a counterexample candidate rather than a failure.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{gcd, to_integer, BigInt, Rational};
use crate::jump::{ascend, diagonal_solutions, is_solution, EquationSpec, Pair};
use crate::report::{big_as_str, bigs_as_strs, Check, Report};
use crate::sequences::{d_closed_form, eval_binet, terms, Parity, SequenceId, Snapshot};

fn require_chain(chain: SequenceId) -> Result<()> {
    match chain {
        SequenceId::AChain | SequenceId::BChain => Ok(()),
        other => Err(Error::Domain(format!("{other} is not a solution chain"))),
    }
}

/// Consecutive gcds of a chain and the normalized sums they produce.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GcdProfile {
    pub chain: SequenceId,
    pub n_max: u64,
    /// `d_n` for `0 <= n <= n_max`.
    #[serde(serialize_with = "bigs_as_strs")]
    pub gcds: Vec<BigInt>,
    /// `(t_n + t_{n+1}) / d_n^2` for `0 <= n <= n_max`.
    #[serde(serialize_with = "bigs_as_strs")]
    pub normalized_sums: Vec<BigInt>,
    pub checks: Vec<Check>,
}

impl GcdProfile {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn report(&self) -> Report {
        let observed: BTreeSet<&BigInt> = self.normalized_sums.iter().skip(1).collect();
        Report {
            chain: self.chain.to_string(),
            n_max: self.n_max,
            checks: self.checks.clone(),
            observed_values: observed.into_iter().map(|v| v.to_string()).collect(),
        }
    }
}

pub fn gcd_profile(chain: SequenceId, n_max: u64) -> Result<GcdProfile> {
    require_chain(chain)?;
    if n_max < 2 {
        return Err(Error::Domain(format!("gcd profile needs n_max >= 2, got {n_max}")));
    }
    let len = n_max as usize + 1;
    let t = Snapshot::new(chain, len + 1);
    let gcds: Vec<BigInt> = (0..len).map(|n| gcd(&t[n], &t[n + 1])).collect();
    let mut integral = None;
    let normalized_sums: Vec<BigInt> = (0..len)
        .map(|n| {
            let (q, rem) = (&t[n] + &t[n + 1]).div_rem(&(&gcds[n] * &gcds[n]));
            if !rem.is_zero() && integral.is_none() {
                integral = Some(n as u64);
            }
            q
        })
        .collect();

    let d = |n: u64| &gcds[n as usize];
    let mut checks = Vec::new();
    match chain {
        SequenceId::AChain => {
            let f = Snapshot::new(SequenceId::Fibonacci, 2 * len);
            let l = Snapshot::new(SequenceId::Lucas, 2 * len);
            checks.push(Check::over("d_{2n-1} = F_{2n-1}", 1..=n_max.div_ceil(2), |n| {
                *d(2 * n - 1) == f[(2 * n - 1) as usize]
            }));
            checks.push(Check::over("d_{2n} = L_{2n}", 1..=n_max / 2, |n| {
                *d(2 * n) == l[(2 * n) as usize]
            }));
        }
        _ => {
            for (parity, name, top) in [
                (Parity::Odd, "d_{2n-1} = closed form", n_max.div_ceil(2)),
                (Parity::Even, "d_{2n} = closed form", n_max / 2),
            ] {
                let form = d_closed_form(SequenceId::DOfB, parity)?;
                checks.push(Check::over(name, 1..=top, |n| {
                    eval_binet(&form, n).ok().as_ref() == Some(d(parity.sequence_index(n)))
                }));
            }
        }
    }
    checks.push(Check::new("gcd^2 divides t_n + t_{n+1}", integral));
    checks.push(Check::over(
        "(t_{n-1} + t_n)/d_{n-1}^2 = (d_{n-2} + d_n)/d_{n-1}",
        2..=n_max,
        |n| {
            let u = n as usize;
            let lhs = Rational::new(&t[u - 1] + &t[u], d(n - 1) * d(n - 1));
            let rhs = Rational::new(d(n - 2) + d(n), d(n - 1).clone());
            lhs == rhs
        },
    ));
    checks.push(Check::over("normalized sums are 2-periodic", 1..=n_max.saturating_sub(2), |n| {
        normalized_sums[n as usize] == normalized_sums[n as usize + 2]
    }));
    Ok(GcdProfile { chain, n_max, gcds, normalized_sums, checks })
}

/// Checks that each chain term is the product of the two adjacent gcds:
/// `a_{n+1} = d_n d_{n+1}` for `n >= 1`, `b_{n+1} = d_{n+1} d_n` for `n >= 0`,
/// up to `n = n_max`.
pub fn product_identity(chain: SequenceId, n_max: u64) -> Result<Report> {
    require_chain(chain)?;
    let len = n_max as usize + 3;
    let t = terms(chain, len);
    let d: Vec<BigInt> = t.windows(2).map(|w| gcd(&w[0], &w[1])).collect();
    let (name, start) = match chain {
        SequenceId::AChain => ("a_{n+1} = d_n d_{n+1}", 1),
        _ => ("b_{n+1} = d_{n+1} d_n", 0),
    };
    let check = Check::over(name, start..=n_max, |n| {
        let n = n as usize;
        t[n + 1] == &d[n] * &d[n + 1]
    });
    Ok(Report { chain: chain.to_string(), n_max, checks: vec![check], observed_values: Vec::new() })
}

/// `(a+b)/gcd(a,b)^2`, which must be an integer.
pub fn normalized_sum(p: &Pair) -> Result<BigInt> {
    let g = gcd(p.a(), p.b());
    let (q, rem) = p.sum().div_rem(&(&g * &g));
    if rem.is_zero() {
        Ok(q)
    } else {
        Err(Error::Domain(format!("(a+b)/gcd^2 is not an integer for {p}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    /// A proved statement failed; this is a bug.
    Fail,
    /// An open statement failed on a genuine solution.
    CounterexampleCandidate,
}

/// Observed versus expected normalized-sum values for one `(r, k)` family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValueSetReport {
    #[serde(serialize_with = "big_as_str")]
    pub r: BigInt,
    #[serde(serialize_with = "big_as_str")]
    pub k: BigInt,
    pub n_max: u64,
    /// Distinct observed values, ascending. Non-integral values appear as `p/q`.
    pub observed: Vec<String>,
    pub expected: Vec<String>,
    pub status: Status,
    pub first_violation: Option<u64>,
    /// The pair at `first_violation`.
    pub witness: Option<Pair>,
    /// Value at the seed pair `(t_0, t_1)`, which sits outside the indexed statements.
    pub degenerate_value: Option<String>,
}

impl ValueSetReport {
    /// Whether every expected value was seen (a short prefix may see only one).
    pub fn complete(&self) -> bool {
        self.observed == self.expected
    }

    pub fn check(&self) -> Check {
        Check::new(
            format!("normalized sums r={} k={}", self.r, self.k),
            match self.status {
                Status::Pass => None,
                _ => Some(self.first_violation.unwrap_or(0)),
            },
        )
    }
}

fn sorted_strings(values: impl IntoIterator<Item = Rational>) -> Vec<String> {
    let set: BTreeSet<Rational> = values.into_iter().collect();
    set.into_iter().map(|v| v.to_string()).collect()
}

/// Value-set check of `(a+b)/gcd^2` along the `r = 1` chain for `k = 3` or `4`:
/// pair `n` is `(t_n, t_{n+1})` for `1 <= n <= n_max`; odd `n` gives 5 (`k = 3`)
/// or 3 (`k = 4`), even `n` gives 1 or 2.
pub fn value_set_check(spec: &EquationSpec, n_max: u64) -> Result<ValueSetReport> {
    let k = spec.k().to_i64();
    let (chain, odd, even) = match (spec.r().to_i64(), k, spec.m()) {
        (Some(1), Some(3), 2) => (SequenceId::AChain, 5, 1),
        (Some(1), Some(4), 2) => (SequenceId::BChain, 3, 2),
        _ => return Err(Error::Domain(format!("value sets are proved for r=1, k in {{3,4}}; got {spec}"))),
    };
    let t = terms(chain, n_max as usize + 2);
    let pair = |n: usize| Pair::new(t[n].clone(), t[n + 1].clone()).expect("chain terms are positive");

    let mut status = Status::Pass;
    let mut first_violation = None;
    let mut witness = None;
    let mut observed = Vec::new();
    for n in 1..=n_max {
        let p = pair(n as usize);
        let expected = if n % 2 == 1 { odd } else { even };
        let ok = is_solution(&p, spec)
            && match normalized_sum(&p) {
                Ok(v) => {
                    observed.push(Rational::from_integer(v.clone()));
                    v == BigInt::from(expected)
                }
                Err(_) => false,
            };
        if !ok && first_violation.is_none() {
            status = Status::Fail;
            first_violation = Some(n);
            witness = Some(p);
        }
    }
    let all_values = [1, 2, 3, 5].map(|v| Rational::from_integer(BigInt::from(v)));
    if observed.iter().any(|v| !all_values.contains(v)) {
        status = Status::Fail;
    }
    let degenerate = normalized_sum(&pair(0))?;
    Ok(ValueSetReport {
        r: spec.r().clone(),
        k: spec.k().clone(),
        n_max,
        observed: sorted_strings(observed),
        expected: sorted_strings([odd, even].map(|v| Rational::from_integer(BigInt::from(v)))),
        status,
        first_violation,
        witness,
        degenerate_value: Some(degenerate.to_string()),
    })
}

/// Results of the `r = 2` value-set check, one family per diagonal seed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub n_max: u64,
    pub status: Status,
    pub families: Vec<ValueSetReport>,
}

/// The value set `2(a+b)/gcd^2` predicted for `r = 2`, by `k`.
pub fn conjectured_values(k: i64) -> Option<[i64; 2]> {
    match k {
        3 => Some([1, 5]),
        4 => Some([2, 3]),
        6 => Some([4, 8]),
        _ => None,
    }
}

/// Walks each `r = 2` chain from its diagonal seed through `n_max` ascents and
/// compares `2(a+b)/gcd^2` with the predicted values. Pair index 0 is the seed.
pub fn conjecture_r2_check(n_max: u64) -> Result<ConjectureReport> {
    let r = BigInt::from(2);
    let mut families = Vec::new();
    for (u, k) in diagonal_solutions(&r) {
        let spec = EquationSpec::pair(r.clone(), k.clone())?;
        let seed = Pair::new(u.clone(), u)?;
        let mut pairs = vec![seed.clone()];
        pairs.extend(ascend(&seed, n_max as usize, &spec)?);
        let expected = k.to_i64().and_then(conjectured_values);

        let mut status = Status::Pass;
        let mut first_violation = None;
        let mut witness = None;
        let mut observed = Vec::new();
        for (n, p) in pairs.iter().enumerate() {
            let g = gcd(p.a(), p.b());
            let v = Rational::new(p.sum() * 2, &g * &g);
            let verdict = if !is_solution(p, &spec) {
                Status::Fail
            } else if to_integer(&v)
                .and_then(|x| x.to_i64())
                .is_some_and(|x| expected.is_some_and(|e| e.contains(&x)))
            {
                Status::Pass
            } else {
                Status::CounterexampleCandidate
            };
            observed.push(v);
            if verdict != Status::Pass && first_violation.is_none() {
                status = verdict;
                first_violation = Some(n as u64);
                witness = Some(p.clone());
            }
        }
        families.push(ValueSetReport {
            r: r.clone(),
            k: k.clone(),
            n_max,
            observed: sorted_strings(observed),
            expected: expected
                .map(|e| sorted_strings(e.map(|v| Rational::from_integer(BigInt::from(v)))))
                .unwrap_or_default(),
            status,
            first_violation,
            witness,
            degenerate_value: None,
        });
    }
    let status = if families.iter().any(|f| f.status == Status::Fail) {
        Status::Fail
    } else if families.iter().any(|f| f.status == Status::CounterexampleCandidate) {
        Status::CounterexampleCandidate
    } else {
        Status::Pass
    };
    Ok(ConjectureReport { n_max, status, families })
}
