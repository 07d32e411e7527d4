//! Exact generators for the Fibonacci and Lucas numbers, the `k = 3` chain
//! `a_n` (A032908), the `k = 4` chain `b_n` (A101879) and their consecutive
//! gcd sequences, together with Binet-type closed forms evaluated in exact
//! quadratic-field arithmetic.
//!
//! Terms are produced by the linear recurrences; closed forms exist to be
//! checked against them.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{gcd, int, ratio, to_integer, BigInt, ExactQuad, Rational};
use crate::report::{Check, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceId {
    /// `F_0 = 0, F_1 = 1` (and `F_{-1} = 1` through [`fib`]).
    Fibonacci,
    /// `L_0 = 2, L_1 = 1`.
    Lucas,
    /// `a_0 = a_1 = 2, a_n = 3 a_{n-1} - a_{n-2} - 1`.
    AChain,
    /// `b_0 = b_1 = 1, b_n = 4 b_{n-1} - b_{n-2} - 1`.
    BChain,
    /// `d_n = gcd(a_n, a_{n+1})`.
    DOfA,
    /// `d_n = gcd(b_n, b_{n+1})`.
    DOfB,
}

impl SequenceId {
    pub const ALL: [SequenceId; 6] = [
        SequenceId::Fibonacci,
        SequenceId::Lucas,
        SequenceId::AChain,
        SequenceId::BChain,
        SequenceId::DOfA,
        SequenceId::DOfB,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SequenceId::Fibonacci => "fibonacci",
            SequenceId::Lucas => "lucas",
            SequenceId::AChain => "a_chain",
            SequenceId::BChain => "b_chain",
            SequenceId::DOfA => "d_of_a",
            SequenceId::DOfB => "d_of_b",
        }
    }

    /// Initial terms `(x_0, x_1)` of the recurrence sequences.
    fn seeds(self) -> Option<(i64, i64)> {
        match self {
            SequenceId::Fibonacci => Some((0, 1)),
            SequenceId::Lucas => Some((2, 1)),
            SequenceId::AChain => Some((2, 2)),
            SequenceId::BChain => Some((1, 1)),
            SequenceId::DOfA | SequenceId::DOfB => None,
        }
    }
}

impl fmt::Display for SequenceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SequenceId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SequenceId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown sequence {s:?}")))
    }
}

fn next_term(id: SequenceId, prev2: &BigInt, prev1: &BigInt) -> BigInt {
    match id {
        SequenceId::Fibonacci | SequenceId::Lucas => prev1 + prev2,
        SequenceId::AChain => prev1 * 3 - prev2 - 1,
        SequenceId::BChain => prev1 * 4 - prev2 - 1,
        SequenceId::DOfA | SequenceId::DOfB => unreachable!("gcd sequences have no recurrence"),
    }
}

fn extend_recurrence(id: SequenceId, terms: &mut Vec<BigInt>, len: usize) {
    let (x0, x1) = id.seeds().expect("recurrence sequence");
    if terms.is_empty() && len > 0 {
        terms.push(BigInt::from(x0));
    }
    if terms.len() == 1 && len > 1 {
        terms.push(BigInt::from(x1));
    }
    while terms.len() < len {
        let n = terms.len();
        let t = next_term(id, &terms[n - 2], &terms[n - 1]);
        terms.push(t);
    }
}

/// The first `len` terms of `id`, starting at index 0.
pub fn terms(id: SequenceId, len: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(len);
    match id {
        SequenceId::DOfA | SequenceId::DOfB => {
            let chain = if id == SequenceId::DOfA { SequenceId::AChain } else { SequenceId::BChain };
            let c = terms(chain, len + 1);
            out.extend(c.windows(2).map(|w| gcd(&w[0], &w[1])));
        }
        _ => extend_recurrence(id, &mut out, len),
    }
    out
}

/// An immutable, shareable prefix of a sequence. Extending produces a new
/// snapshot and leaves this one untouched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    id: SequenceId,
    terms: Arc<[BigInt]>,
}

impl Snapshot {
    pub fn new(id: SequenceId, len: usize) -> Self {
        Self { id, terms: terms(id, len).into() }
    }

    pub fn id(&self) -> SequenceId {
        self.id
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    pub fn get(&self, n: usize) -> Option<&BigInt> {
        self.terms.get(n)
    }

    /// A snapshot with at least `len` terms; shares storage if already long enough.
    pub fn extend(&self, len: usize) -> Snapshot {
        if len <= self.terms.len() {
            return self.clone();
        }
        let mut v = self.terms.to_vec();
        match self.id {
            SequenceId::DOfA | SequenceId::DOfB => v = terms(self.id, len),
            id => extend_recurrence(id, &mut v, len),
        }
        Snapshot { id: self.id, terms: v.into() }
    }
}

impl std::ops::Index<usize> for Snapshot {
    type Output = BigInt;

    fn index(&self, n: usize) -> &BigInt {
        &self.terms[n]
    }
}

/// `F_n` for `n >= -1`.
pub fn fib(n: i64) -> Result<BigInt> {
    if n < -1 {
        return Err(Error::Domain(format!("Fibonacci index {n} is below -1")));
    }
    // F_{-1}, F_0 then step forward
    let (mut prev, mut cur) = (BigInt::one(), BigInt::zero());
    for _ in 0..n {
        let next = &prev + &cur;
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(if n == -1 { prev } else { cur })
}

pub fn lucas(n: i64) -> Result<BigInt> {
    let n = usize::try_from(n).map_err(|_| Error::Domain(format!("Lucas index {n} is negative")))?;
    Ok(terms(SequenceId::Lucas, n + 1).pop().expect("non-empty"))
}

pub fn a_chain(n: u64) -> BigInt {
    terms(SequenceId::AChain, n as usize + 1).pop().expect("non-empty")
}

pub fn b_chain(n: u64) -> BigInt {
    terms(SequenceId::BChain, n as usize + 1).pop().expect("non-empty")
}

/// `A alpha^n + B beta^n + delta` with conjugate roots `alpha`, `beta`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinetForm {
    coeff_plus: ExactQuad,
    coeff_minus: ExactQuad,
    root_plus: ExactQuad,
    root_minus: ExactQuad,
    shift: Rational,
}

impl BinetForm {
    pub fn new(
        coeff_plus: ExactQuad,
        coeff_minus: ExactQuad,
        root_plus: ExactQuad,
        root_minus: ExactQuad,
        shift: Rational,
    ) -> Result<Self> {
        let d = root_plus.d();
        if [&coeff_plus, &coeff_minus, &root_minus].iter().any(|x| x.d() != d) {
            return Err(Error::Domain("closed-form parts live in different fields".into()));
        }
        if !root_plus.try_mul(&root_minus)?.is_rational() {
            return Err(Error::Domain(format!(
                "roots {root_plus} and {root_minus} have an irrational product"
            )));
        }
        Ok(Self { coeff_plus, coeff_minus, root_plus, root_minus, shift })
    }

    /// Solves `A + B = x0 - delta`, `A alpha + B beta = x1 - delta` for the
    /// coefficients.
    pub fn from_initial_terms(
        root_plus: ExactQuad,
        root_minus: ExactQuad,
        x0: Rational,
        x1: Rational,
        shift: Rational,
    ) -> Result<Self> {
        let d = root_plus.d();
        let c0 = ExactQuad::from_rational(&x0 - &shift, d)?;
        let c1 = ExactQuad::from_rational(&x1 - &shift, d)?;
        let a = c1
            .try_sub(&c0.try_mul(&root_minus)?)?
            .try_div(&root_plus.try_sub(&root_minus)?)?;
        let b = c0.try_sub(&a)?;
        Self::new(a, b, root_plus, root_minus, shift)
    }

    pub fn coeff_plus(&self) -> &ExactQuad {
        &self.coeff_plus
    }

    pub fn coeff_minus(&self) -> &ExactQuad {
        &self.coeff_minus
    }

    pub fn root_plus(&self) -> &ExactQuad {
        &self.root_plus
    }

    pub fn root_minus(&self) -> &ExactQuad {
        &self.root_minus
    }

    pub fn shift(&self) -> &Rational {
        &self.shift
    }

    /// The value at `n` as a field element, before any integrality check.
    pub fn eval_exact(&self, n: u64) -> ExactQuad {
        let plus = self.coeff_plus.try_mul(&self.root_plus.pow(n)).expect("same field");
        let minus = self.coeff_minus.try_mul(&self.root_minus.pow(n)).expect("same field");
        let shift = ExactQuad::from_rational(self.shift.clone(), self.root_plus.d()).expect("valid d");
        plus.try_add(&minus).and_then(|s| s.try_add(&shift)).expect("same field")
    }
}

impl fmt::Display for BinetForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})*({})^n + ({})*({})^n + {}",
            self.coeff_plus, self.root_plus, self.coeff_minus, self.root_minus, self.shift
        )
    }
}

/// Evaluates a closed form at `n`. Fails if the irrational parts do not
/// cancel or the value is not an integer, either of which means the form is wrong.
pub fn eval_binet(f: &BinetForm, n: u64) -> Result<BigInt> {
    let v = f.eval_exact(n);
    let p = v.rational_part().ok_or_else(|| {
        Error::Consistency(format!("closed form leaves irrational residue {v} at n = {n}"))
    })?;
    to_integer(p)
        .ok_or_else(|| Error::Consistency(format!("closed form gives non-integer {p} at n = {n}")))
}

fn quad(p: i64, q: i64, den: i64, d: u32) -> ExactQuad {
    ExactQuad::from_parts(p, q, den, d).expect("square-free radicand")
}

fn quad_div(x: ExactQuad, y: ExactQuad) -> ExactQuad {
    x.try_div(&y).expect("non-zero divisor")
}

/// Closed form of a recurrence sequence. The gcd sequences split by parity;
/// see [`d_closed_form`].
pub fn closed_form(id: SequenceId) -> Result<BinetForm> {
    let phi = quad(1, 1, 2, 5);
    let psi = quad(1, -1, 2, 5);
    let alpha5 = quad(3, 1, 2, 5);
    let beta5 = quad(3, -1, 2, 5);
    let alpha3 = quad(2, 1, 1, 3);
    let beta3 = quad(2, -1, 1, 3);
    let two_root5 = quad(0, 2, 1, 5);
    match id {
        SequenceId::Fibonacci => {
            let inv_root5 = quad(0, 1, 1, 5).inv()?;
            BinetForm::new(inv_root5.clone(), inv_root5.neg(), phi, psi, Rational::zero())
        }
        SequenceId::Lucas => {
            let one = ExactQuad::one(5)?;
            BinetForm::new(one.clone(), one, phi, psi, Rational::zero())
        }
        SequenceId::AChain => BinetForm::new(
            quad_div(quad(-1, 1, 1, 5), two_root5.clone()),
            quad_div(quad(1, 1, 1, 5), two_root5),
            alpha5,
            beta5,
            int(1),
        ),
        SequenceId::BChain => {
            BinetForm::new(quad(3, -1, 12, 3), quad(3, 1, 12, 3), alpha3, beta3, ratio(1, 2))
        }
        SequenceId::DOfA | SequenceId::DOfB => Err(Error::Domain(format!(
            "{id} has separate closed forms for odd and even indices"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// The form evaluated at `n >= 1` gives `d_{2n-1}`.
    Odd,
    /// The form evaluated at `n >= 1` gives `d_{2n}`.
    Even,
}

impl Parity {
    /// Index into the gcd sequence reached by form index `n`.
    pub fn sequence_index(self, n: u64) -> u64 {
        match self {
            Parity::Odd => 2 * n - 1,
            Parity::Even => 2 * n,
        }
    }
}

/// Closed forms for the gcd sequences, valid for form index `n >= 1`.
///
/// For the `k = 3` chain these are `F_{2n-1}` and `L_{2n}` written over the
/// roots `(3 +- sqrt5)/2`; for the `k = 4` chain,
/// `d_{2n-1} = (3-sqrt3)/6 alpha^n + (3+sqrt3)/6 beta^n` and
/// `d_{2n} = (alpha^n + beta^n)/2` with `alpha, beta = 2 +- sqrt3`.
pub fn d_closed_form(id: SequenceId, parity: Parity) -> Result<BinetForm> {
    match (id, parity) {
        (SequenceId::DOfA, Parity::Odd) => {
            let a = closed_form(SequenceId::AChain)?;
            BinetForm::new(a.coeff_plus, a.coeff_minus, a.root_plus, a.root_minus, Rational::zero())
        }
        (SequenceId::DOfA, Parity::Even) => {
            let one = ExactQuad::one(5)?;
            BinetForm::new(one.clone(), one, quad(3, 1, 2, 5), quad(3, -1, 2, 5), Rational::zero())
        }
        (SequenceId::DOfB, Parity::Odd) => BinetForm::new(
            quad(3, -1, 6, 3),
            quad(3, 1, 6, 3),
            quad(2, 1, 1, 3),
            quad(2, -1, 1, 3),
            Rational::zero(),
        ),
        (SequenceId::DOfB, Parity::Even) => {
            let half = quad(1, 0, 2, 3);
            BinetForm::new(half.clone(), half, quad(2, 1, 1, 3), quad(2, -1, 1, 3), Rational::zero())
        }
        _ => Err(Error::Domain(format!("{id} is not a gcd sequence"))),
    }
}

/// Checks the Fibonacci/Lucas identities behind the chain factorisation for
/// every `1 <= n <= n_max`.
pub fn identity_suite(n_max: u64) -> Result<Report> {
    if n_max < 2 {
        return Err(Error::Domain(format!("identity suite needs n_max >= 2, got {n_max}")));
    }
    let top = 4 * n_max as usize + 2;
    let f = Snapshot::new(SequenceId::Fibonacci, top);
    let l = Snapshot::new(SequenceId::Lucas, top);
    let a = Snapshot::new(SequenceId::AChain, 2 * n_max as usize + 1);
    let range = || 1..=n_max;
    let u = |n: u64| n as usize;
    let checks = vec![
        Check::over("F_{2n-1} = F_n^2 + F_{n-1}^2", range(), |n| {
            f[u(2 * n - 1)] == &f[u(n)] * &f[u(n)] + &f[u(n - 1)] * &f[u(n - 1)]
        }),
        Check::over("F_{n+1} F_{n-1} - F_n^2 = (-1)^n", range(), |n| {
            let sign = if n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
            &f[u(n + 1)] * &f[u(n - 1)] - &f[u(n)] * &f[u(n)] == sign
        }),
        Check::over("L_n = F_{n-1} + F_{n+1}", range(), |n| l[u(n)] == &f[u(n - 1)] + &f[u(n + 1)]),
        Check::over("F_{4n-1} = F_{2n-1} L_{2n} - 1", range(), |n| {
            f[u(4 * n - 1)] == &f[u(2 * n - 1)] * &l[u(2 * n)] - 1
        }),
        Check::over("F_{4n-3} = F_{2n-1} L_{2n-2} - 1", range(), |n| {
            f[u(4 * n - 3)] == &f[u(2 * n - 1)] * &l[u(2 * n - 2)] - 1
        }),
        Check::over("a_{2n} = F_{2n-1} L_{2n}", 1..=n_max / 2, |n| {
            a[u(2 * n)] == &f[u(2 * n - 1)] * &l[u(2 * n)]
        }),
        Check::over("a_{2n-1} = F_{2n-1} L_{2n-2}", 1..=n_max.div_ceil(2), |n| {
            a[u(2 * n - 1)] == &f[u(2 * n - 1)] * &l[u(2 * n - 2)]
        }),
        Check::over("a_n = F_{2n-1} + 1", range(), |n| a[u(n)] == &f[u(2 * n - 1)] + 1),
    ];
    Ok(Report { chain: "identities".into(), n_max, checks, observed_values: Vec::new() })
}
