//! The equation `(a+r)/b + (b+r)/a = k`, its jump and flip operators, descent
//! to a diagonal solution and ascent along the solution chain. Also the
//! rational jump for the three-variable cyclic equation
//! `(a+r)/b + (b+r)/c + (c+r)/a = k`.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::{SerializeSeq, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactnum::{BigInt, Rational};

/// One instance of the cyclic equation: shift `r`, target `k`, `m` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EquationSpec {
    r: BigInt,
    k: BigInt,
    m: usize,
}

impl EquationSpec {
    pub fn new(r: impl Into<BigInt>, k: impl Into<BigInt>, m: usize) -> Result<Self> {
        let r = r.into();
        if r < BigInt::one() {
            return Err(Error::Domain(format!("shift r must be >= 1, got {r}")));
        }
        if m < 2 {
            return Err(Error::Domain(format!("need at least 2 variables, got {m}")));
        }
        Ok(Self { r, k: k.into(), m })
    }

    /// Two-variable instance.
    pub fn pair(r: impl Into<BigInt>, k: impl Into<BigInt>) -> Result<Self> {
        Self::new(r, k, 2)
    }

    pub fn triple(r: impl Into<BigInt>, k: impl Into<BigInt>) -> Result<Self> {
        Self::new(r, k, 3)
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn k(&self) -> &BigInt {
        &self.k
    }

    pub fn m(&self) -> usize {
        self.m
    }
}

impl fmt::Display for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r={} k={} m={}", self.r, self.k, self.m)
    }
}

impl Serialize for EquationSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("EquationSpec", 3)?;
        st.serialize_field("r", &self.r.to_string())?;
        st.serialize_field("k", &self.k.to_string())?;
        st.serialize_field("m", &self.m)?;
        st.end()
    }
}

/// A pair of positive integers; a candidate solution of the two-variable equation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    a: BigInt,
    b: BigInt,
}

impl Pair {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>) -> Result<Self> {
        let (a, b) = (a.into(), b.into());
        if !a.is_positive() || !b.is_positive() {
            return Err(Error::Domain(format!("pair ({a},{b}) must have positive entries")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }

    pub fn b(&self) -> &BigInt {
        &self.b
    }

    pub fn sum(&self) -> BigInt {
        &self.a + &self.b
    }

    pub fn is_diagonal(&self) -> bool {
        self.a == self.b
    }

    /// Both entries as `u64`, if they fit.
    pub fn to_u64(&self) -> Option<(u64, u64)> {
        Some((self.a.to_u64()?, self.b.to_u64()?))
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

impl Serialize for Pair {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(2))?;
        seq.serialize_element(&self.a.to_string())?;
        seq.serialize_element(&self.b.to_string())?;
        seq.end()
    }
}

/// An ordered list of positive rationals; a candidate solution of the
/// `m`-variable cyclic equation. Integer solutions are the integral tuples.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tuple {
    entries: Vec<Rational>,
}

impl Tuple {
    pub fn new(entries: Vec<Rational>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::Domain("a tuple needs at least 2 entries".into()));
        }
        if let Some(bad) = entries.iter().find(|x| !x.is_positive()) {
            return Err(Error::Domain(format!("tuple entry {bad} is not positive")));
        }
        Ok(Self { entries })
    }

    pub fn from_integers<I, T>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = T>,
        T: Into<BigInt>,
    {
        Self::new(entries.into_iter().map(|x| Rational::from_integer(x.into())).collect())
    }

    pub fn entries(&self) -> &[Rational] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|x| x.is_integer())
    }

    /// The rotation whose first entry is smallest; ties go to the
    /// lexicographically smallest rotation.
    pub fn canonical_rotation(&self) -> Tuple {
        let n = self.entries.len();
        let best = (0..n)
            .min_by(|&i, &j| {
                let ri = self.entries[i..].iter().chain(&self.entries[..i]);
                let rj = self.entries[j..].iter().chain(&self.entries[..j]);
                ri.cmp(rj)
            })
            .unwrap_or(0);
        let mut entries = self.entries.clone();
        entries.rotate_left(best);
        Tuple { entries }
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

impl Serialize for Tuple {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.entries.len()))?;
        for x in &self.entries {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpKind {
    /// Replace `a` by the other root `k b - r - a`.
    JumpLeft,
    /// Replace `b` by the other root `k a - r - b`.
    JumpRight,
    Flip,
}

impl JumpKind {
    pub fn as_str(self) -> &'static str {
        match self {
            JumpKind::JumpLeft => "jump_left",
            JumpKind::JumpRight => "jump_right",
            JumpKind::Flip => "flip",
        }
    }
}

impl fmt::Display for JumpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JumpStep {
    kind: JumpKind,
    before: Pair,
    after: Pair,
}

impl JumpStep {
    /// Applies `kind` to a known solution `before` and checks the result.
    fn apply(kind: JumpKind, before: &Pair, spec: &EquationSpec) -> Result<Self> {
        let after = match kind {
            JumpKind::JumpLeft => jump_left(before, spec)?,
            JumpKind::JumpRight => jump_right(before, spec)?,
            JumpKind::Flip => flip(before),
        };
        if !is_solution(&after, spec) {
            return Err(Error::Consistency(format!(
                "{kind} took solution {before} to non-solution {after}"
            )));
        }
        Ok(Self { kind, before: before.clone(), after })
    }

    pub fn kind(&self) -> JumpKind {
        self.kind
    }

    pub fn before(&self) -> &Pair {
        &self.before
    }

    pub fn after(&self) -> &Pair {
        &self.after
    }
}

/// Ordered record of jump and flip steps from `start` to `terminal`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JumpTrace {
    spec: EquationSpec,
    start: Pair,
    steps: Vec<JumpStep>,
    terminal: Pair,
}

impl JumpTrace {
    pub fn spec(&self) -> &EquationSpec {
        &self.spec
    }

    pub fn start(&self) -> &Pair {
        &self.start
    }

    pub fn steps(&self) -> &[JumpStep] {
        &self.steps
    }

    pub fn terminal(&self) -> &Pair {
        &self.terminal
    }

    /// Every pair visited, start first.
    pub fn pairs(&self) -> Vec<&Pair> {
        std::iter::once(&self.start).chain(self.steps.iter().map(|s| &s.after)).collect()
    }

    /// One line per step, `kind (a,b) (a',b')`, then a `terminal (u,v)` line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&format!("{} {} {}\n", s.kind, s.before, s.after));
        }
        out.push_str(&format!("terminal {}\n", self.terminal));
        out
    }

    /// Graphviz description: nodes are pairs, edges are steps.
    pub fn to_dot(&self) -> String {
        let node = |p: &Pair| format!("\"{},{}\"", p.a, p.b);
        let mut out = String::from("digraph jump_trace {\n");
        out.push_str(&format!("  label=\"{}\";\n", self.spec));
        let mut seen = Vec::new();
        for p in self.pairs() {
            if seen.contains(&p) {
                continue;
            }
            seen.push(p);
            let shape = if p.is_diagonal() { "doublecircle" } else { "ellipse" };
            out.push_str(&format!("  {} [shape={}];\n", node(p), shape));
        }
        for s in &self.steps {
            out.push_str(&format!(
                "  {} -> {} [label=\"{}\"];\n",
                node(&s.before),
                node(&s.after),
                s.kind
            ));
        }
        out.push_str("}\n");
        out
    }
}

/// Why greedy descent stopped short of a diagonal solution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stall {
    /// The steps taken before stalling; its terminal is the stuck pair.
    pub trace: JumpTrace,
    /// The stuck pair, oriented so that `a > b`.
    pub current: Pair,
    /// Both available jumps from `current`; neither lowers the coordinate sum.
    pub attempted: Vec<JumpStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Descent {
    Complete(JumpTrace),
    Stalled(Stall),
}

impl Descent {
    pub fn trace(&self) -> &JumpTrace {
        match self {
            Descent::Complete(t) => t,
            Descent::Stalled(s) => &s.trace,
        }
    }
}

/// Exact value of `(a+r)/b + (b+r)/a`.
pub fn eval_k(p: &Pair, r: &BigInt) -> Rational {
    Rational::new(&p.a + r, p.b.clone()) + Rational::new(&p.b + r, p.a.clone())
}

/// Whether `a^2 + r a + b^2 + r b = k a b`. Always false for `m != 2`.
pub fn is_solution(p: &Pair, spec: &EquationSpec) -> bool {
    if spec.m != 2 {
        return false;
    }
    let (a, b, r) = (&p.a, &p.b, &spec.r);
    a * (a + r) + b * (b + r) == &spec.k * a * b
}

fn require_solution(p: &Pair, spec: &EquationSpec) -> Result<()> {
    if spec.m != 2 {
        return Err(Error::Domain(format!("pair operations need m = 2, got {}", spec.m)));
    }
    if is_solution(p, spec) {
        Ok(())
    } else {
        Err(Error::NotASolution {
            what: p.to_string(),
            value: eval_k(p, &spec.r).to_string(),
            k: spec.k.to_string(),
        })
    }
}

/// `(a, b) -> (k b - r - a, b)`.
pub fn jump_left(p: &Pair, spec: &EquationSpec) -> Result<Pair> {
    require_solution(p, spec)?;
    let a2 = &spec.k * &p.b - &spec.r - &p.a;
    Pair::new(a2, p.b.clone())
        .map_err(|_| Error::InvalidJump(format!("jump_left of {p} leaves the positive quadrant")))
}

/// `(a, b) -> (a, k a - r - b)`.
pub fn jump_right(p: &Pair, spec: &EquationSpec) -> Result<Pair> {
    require_solution(p, spec)?;
    let b2 = &spec.k * &p.a - &spec.r - &p.b;
    Pair::new(p.a.clone(), b2)
        .map_err(|_| Error::InvalidJump(format!("jump_right of {p} leaves the positive quadrant")))
}

pub fn flip(p: &Pair) -> Pair {
    Pair { a: p.b.clone(), b: p.a.clone() }
}

/// Greedy descent for any `r`: flip so that `a >= b`, jump the larger
/// coordinate, repeat until diagonal. Stops with a [`Stall`] if a jump would
/// not strictly lower the coordinate sum.
pub fn try_descend(p: &Pair, spec: &EquationSpec) -> Result<Descent> {
    require_solution(p, spec)?;
    let mut steps = Vec::new();
    let mut cur = p.clone();
    let trace = |steps: Vec<JumpStep>, terminal: Pair| JumpTrace {
        spec: spec.clone(),
        start: p.clone(),
        steps,
        terminal,
    };
    loop {
        if cur.is_diagonal() {
            return Ok(Descent::Complete(trace(steps, cur)));
        }
        if cur.a < cur.b {
            let step = JumpStep::apply(JumpKind::Flip, &cur, spec)?;
            cur = step.after.clone();
            steps.push(step);
        }
        let step = JumpStep::apply(JumpKind::JumpLeft, &cur, spec)?;
        if step.after.a >= cur.a {
            let attempted = vec![step, JumpStep::apply(JumpKind::JumpRight, &cur, spec)?];
            return Ok(Descent::Stalled(Stall {
                trace: trace(steps, cur.clone()),
                current: cur,
                attempted,
            }));
        }
        cur = step.after.clone();
        steps.push(step);
    }
}

/// Descent to a diagonal solution for `r` in {1, 2}, where every jump is
/// guaranteed to lower the coordinate sum.
pub fn descend(p: &Pair, spec: &EquationSpec) -> Result<JumpTrace> {
    if spec.r > BigInt::from(2) {
        return Err(Error::Unsupported(format!(
            "descent is only guaranteed for r <= 2 (got r = {}); use try_descend",
            spec.r
        )));
    }
    match try_descend(p, spec)? {
        Descent::Complete(t) => Ok(t),
        Descent::Stalled(s) => Err(Error::Consistency(format!(
            "descent stalled at {} for {spec}",
            s.current
        ))),
    }
}

/// `count` successive solutions above `start`: keep the larger coordinate,
/// replace the smaller one by the other root, and emit `(kept, new)`.
pub fn ascend(start: &Pair, count: usize, spec: &EquationSpec) -> Result<Vec<Pair>> {
    require_solution(start, spec)?;
    if start.a < start.b {
        return Err(Error::Domain(format!("ascend needs a >= b, got {start}")));
    }
    let mut out = Vec::with_capacity(count);
    let (mut big, mut small) = (start.a.clone(), start.b.clone());
    for _ in 0..count {
        let cur = Pair { a: big.clone(), b: small };
        let next = jump_right(&cur, spec)?;
        out.push(next.clone());
        small = big;
        big = next.b;
    }
    Ok(out)
}

/// All diagonal solutions `(u, u)` of the shift-`r` equation, as `(u, k)`
/// pairs sorted by `k`. They are exactly `u = 2r/(k-2)` for divisors `k-2` of `2r`.
pub fn diagonal_solutions(r: &BigInt) -> Vec<(BigInt, BigInt)> {
    if !r.is_positive() {
        return Vec::new();
    }
    let two_r: BigInt = r * 2;
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut t = BigInt::one();
    while &t * &t <= two_r {
        if (&two_r % &t).is_zero() {
            let co = &two_r / &t;
            if co != t {
                large.push(co.clone());
            }
            small.push(t.clone());
        }
        t += 1;
    }
    small
        .into_iter()
        .chain(large.into_iter().rev())
        .map(|t| (&two_r / &t, t + 2))
        .collect()
}

/// `sum_i (x_i + r) / x_{i+1}` with indices mod `m`.
pub fn cyclic_sum(entries: &[Rational], r: &BigInt) -> Rational {
    let r = Rational::from_integer(r.clone());
    let m = entries.len();
    (0..m).fold(Rational::zero(), |acc, i| acc + (&entries[i] + &r) / &entries[(i + 1) % m])
}

/// Whether `t` solves the `m`-variable cyclic equation exactly.
pub fn is_tuple_solution(t: &Tuple, spec: &EquationSpec) -> bool {
    t.len() == spec.m && cyclic_sum(&t.entries, &spec.r) == Rational::from_integer(spec.k.clone())
}

/// Replaces entry `position` (1-based) of a three-variable solution by the
/// other root of the quadratic it satisfies. For position 1 this is
/// `a' = b (k - (b+r)/c) - r - a`, with `a a' = b (c + r)`; the other
/// positions are the cyclic analogues. The result is rational in general.
pub fn jump_three(t: &Tuple, position: usize, spec: &EquationSpec) -> Result<Tuple> {
    if spec.m != 3 || t.len() != 3 {
        return Err(Error::Domain("jump_three needs a 3-variable equation and tuple".into()));
    }
    if !(1..=3).contains(&position) {
        return Err(Error::Domain(format!("position must be 1, 2 or 3, got {position}")));
    }
    if !is_tuple_solution(t, spec) {
        return Err(Error::NotASolution {
            what: t.to_string(),
            value: cyclic_sum(&t.entries, &spec.r).to_string(),
            k: spec.k.to_string(),
        });
    }
    let i = position - 1;
    let x = &t.entries;
    let next = &x[(i + 1) % 3];
    let prev = &x[(i + 2) % 3];
    let r = Rational::from_integer(spec.r.clone());
    let k = Rational::from_integer(spec.k.clone());
    let other = next * (k - (next + &r) / prev) - &r - &x[i];
    let mut entries = x.clone();
    entries[i] = other;
    let out = Tuple::new(entries)?;
    if !is_tuple_solution(&out, spec) {
        return Err(Error::Consistency(format!("jump_three of {t} left the solution set")));
    }
    Ok(out)
}
