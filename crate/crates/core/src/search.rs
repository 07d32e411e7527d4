//! Exhaustive brute-force oracles over bounded boxes.
//!
//! The inner loops test integrality with cleared denominators in `u128`; every
//! hit is then re-checked with exact big-integer arithmetic before it is
//! reported. Work is split by the residue of the first coordinate modulo the
//! thread count and the merged output is sorted, so the report does not depend
//! on the number of threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::thread;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactnum::{BigInt, Rational};
use crate::jump::{ascend, diagonal_solutions, flip, is_solution, is_tuple_solution, EquationSpec, Pair, Tuple};
use crate::report::{Check, Report};

/// Search region: `1 <= a, b <= bound` for `m = 2`, or coordinate sum
/// `<= bound` for `m >= 3`. `k` optionally restricts the reported solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBox {
    pub r: u64,
    pub m: usize,
    pub bound: u64,
    pub k: Option<u64>,
}

impl SearchBox {
    pub fn new(r: u64, m: usize, bound: u64, k: Option<u64>) -> Result<Self> {
        if r == 0 {
            return Err(Error::Domain("r must be positive".into()));
        }
        if m < 2 {
            return Err(Error::Domain(format!("m must be at least 2, got {m}")));
        }
        if bound < 1 || (m >= 3 && bound < m as u64) {
            return Err(Error::Domain(format!("bound {bound} is too small for m = {m}")));
        }
        Ok(Self { r, m, bound, k })
    }

    pub fn pairs(r: u64, bound: u64) -> Result<Self> {
        Self::new(r, 2, bound, None)
    }
}

/// All solutions found for one value of `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KGroup {
    pub k: u64,
    pub count: usize,
    pub minimal_sum: u64,
    pub minimal: Vec<Vec<u64>>,
    /// Sorted by coordinate sum, then lexicographically.
    pub solutions: Vec<Vec<u64>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub search: SearchBox,
    /// Sorted by `k`.
    pub groups: Vec<KGroup>,
    pub candidates_examined: u64,
    /// Fast-path hits that failed the exact re-check. Always 0 unless there is a bug.
    pub verification_failures: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl SearchReport {
    pub fn k_values(&self) -> Vec<u64> {
        self.groups.iter().map(|g| g.k).collect()
    }

    pub fn group(&self, k: u64) -> Option<&KGroup> {
        self.groups.iter().find(|g| g.k == k)
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn to_text(&self) -> String {
        let b = &self.search;
        let mut out = format!(
            "search r={} m={} {} {}",
            b.r,
            b.m,
            if b.m == 2 { "bound" } else { "sum bound" },
            b.bound
        );
        if let Some(k) = b.k {
            let _ = write!(out, " k={k}");
        }
        out.push('\n');
        if self.groups.is_empty() {
            out.push_str("no solutions\n");
        }
        for g in &self.groups {
            let minimal: Vec<String> = g.minimal.iter().map(|s| show(s)).collect();
            let _ = writeln!(
                out,
                "k={}: {} solutions, minimal sum {}: {}",
                g.k,
                g.count,
                g.minimal_sum,
                minimal.join(" ")
            );
            for s in &g.solutions {
                let _ = writeln!(out, "  {}", show(s));
            }
        }
        let _ = writeln!(out, "candidates examined: {}", self.candidates_examined);
        if self.verification_failures > 0 {
            let _ = writeln!(out, "VERIFICATION FAILURES: {}", self.verification_failures);
        }
        out
    }
}

fn show(s: &[u64]) -> String {
    let parts: Vec<String> = s.iter().map(u64::to_string).collect();
    format!("({})", parts.join(","))
}

/// Number of worker threads to use; 0 means all available cores.
pub fn resolve_threads(threads: usize) -> usize {
    if threads > 0 {
        threads
    } else {
        thread::available_parallelism().map_or(1, |n| n.get())
    }
}

/// Runs `work(part, parts)` on `parts` scoped threads and concatenates results.
fn fan_out<T, F>(parts: usize, work: F) -> (Vec<T>, u64)
where
    T: Send,
    F: Fn(u64, u64) -> (Vec<T>, u64) + Sync,
{
    let parts = parts.max(1) as u64;
    if parts == 1 {
        return work(0, 1);
    }
    thread::scope(|s| {
        let work = &work;
        let handles: Vec<_> = (0..parts).map(|p| s.spawn(move || work(p, parts))).collect();
        let mut hits = Vec::new();
        let mut examined = 0;
        for h in handles {
            let (h, e) = h.join().expect("search worker panicked");
            hits.extend(h);
            examined += e;
        }
        (hits, examined)
    })
}

fn build_report(bx: SearchBox, hits: Vec<(u64, Vec<u64>)>, examined: u64, failures: u64, start: Instant) -> SearchReport {
    let mut by_k: BTreeMap<u64, Vec<Vec<u64>>> = BTreeMap::new();
    for (k, s) in hits {
        by_k.entry(k).or_default().push(s);
    }
    let groups = by_k
        .into_iter()
        .map(|(k, mut sols)| {
            sols.sort_by(|x, y| (x.iter().sum::<u64>(), x).cmp(&(y.iter().sum::<u64>(), y)));
            let minimal_sum = sols[0].iter().sum();
            let minimal = sols.iter().filter(|s| s.iter().sum::<u64>() == minimal_sum).cloned().collect();
            KGroup { k, count: sols.len(), minimal_sum, minimal, solutions: sols }
        })
        .collect();
    SearchReport {
        search: bx,
        groups,
        candidates_examined: examined,
        verification_failures: failures,
        elapsed: start.elapsed(),
    }
}

/// All `1 <= a, b <= bound` for which `(a+r)/b + (b+r)/a` is an integer,
/// grouped by that integer. Ordered pairs are kept distinct.
pub fn brute_pairs(bx: &SearchBox, threads: usize) -> Result<SearchReport> {
    if bx.m != 2 {
        return Err(Error::Domain(format!("brute_pairs needs m = 2, got {}", bx.m)));
    }
    let start = Instant::now();
    let (r, bound) = (u128::from(bx.r), bx.bound);
    let (hits, examined) = fan_out(resolve_threads(threads), |part, parts| {
        let mut hits = Vec::new();
        let mut examined = 0u64;
        let mut a = part + 1;
        while a <= bound {
            let a128 = u128::from(a);
            let fa = a128 * (a128 + r);
            for b in 1..=bound {
                let b128 = u128::from(b);
                // a^2 + r a + b^2 + r b = k a b
                let num = fa + b128 * (b128 + r);
                let den = a128 * b128;
                if num % den == 0 {
                    let k = (num / den) as u64;
                    if bx.k.is_none_or(|want| want == k) {
                        hits.push((k, vec![a, b]));
                    }
                }
            }
            examined += bound;
            a += parts;
        }
        (hits, examined)
    });
    let r_big = BigInt::from(bx.r);
    let mut failures = 0;
    let verified = hits
        .into_iter()
        .filter(|(k, s)| {
            let ok = EquationSpec::pair(r_big.clone(), *k)
                .ok()
                .zip(Pair::new(s[0], s[1]).ok())
                .is_some_and(|(spec, p)| is_solution(&p, &spec));
            failures += u64::from(!ok);
            ok
        })
        .collect();
    Ok(build_report(*bx, verified, examined, failures, start))
}

/// Cyclic sum as `N / P` with `P = prod x_i`; `None` on `u128` overflow.
fn cleared_cyclic(x: &[u64], r: u128) -> Option<(u128, u128)> {
    let p = x.iter().try_fold(1u128, |acc, &v| acc.checked_mul(u128::from(v)))?;
    let m = x.len();
    let mut n = 0u128;
    for i in 0..m {
        let term = (u128::from(x[i]) + r).checked_mul(p / u128::from(x[(i + 1) % m]))?;
        n = n.checked_add(term)?;
    }
    Some((n, p))
}

fn exact_cyclic(x: &[u64], r: u64) -> Rational {
    let entries: Vec<Rational> = x.iter().map(|&v| Rational::from_integer(BigInt::from(v))).collect();
    crate::jump::cyclic_sum(&entries, &BigInt::from(r))
}

/// True if `x` is its own lexicographically smallest rotation.
fn is_canonical(x: &[u64]) -> bool {
    let m = x.len();
    (1..m).all(|s| {
        let rot = x[s..].iter().chain(&x[..s]);
        x.iter().cmp(rot) != std::cmp::Ordering::Greater
    })
}

/// Calls `visit` on every composition of `total` into `buf.len() - from`
/// positive parts written into `buf[from..]`.
fn compositions(buf: &mut [u64], from: usize, total: u64, visit: &mut impl FnMut(&[u64])) {
    let left = (buf.len() - from) as u64;
    if left == 1 {
        buf[from] = total;
        visit(buf);
        return;
    }
    for v in 1..=total - (left - 1) {
        buf[from] = v;
        compositions(buf, from + 1, total - v, visit);
    }
}

/// All positive `m`-tuples with coordinate sum at most `bound` whose cyclic
/// sum `sum (x_i + r)/x_{i+1}` is an integer, one representative per rotation
/// class (the lexicographically smallest rotation). Sums are walked in
/// increasing shells.
pub fn brute_tuples(bx: &SearchBox, threads: usize) -> Result<SearchReport> {
    if bx.m < 3 {
        return Err(Error::Domain(format!("brute_tuples needs m >= 3, got {}", bx.m)));
    }
    let start = Instant::now();
    let m = bx.m;
    let r = u128::from(bx.r);
    let (hits, examined) = fan_out(resolve_threads(threads), |part, parts| {
        let mut hits = Vec::new();
        let mut examined = 0u64;
        let mut buf = vec![0u64; m];
        for s in m as u64..=bx.bound {
            let mut x0 = part + 1;
            while x0 + (m as u64 - 1) <= s {
                buf[0] = x0;
                compositions(&mut buf, 1, s - x0, &mut |x| {
                    examined += 1;
                    let k = match cleared_cyclic(x, r) {
                        Some((n, p)) => (n % p == 0).then(|| (n / p) as u64),
                        None => {
                            let v = exact_cyclic(x, bx.r);
                            if v.is_integer() {
                                v.to_integer().to_u64()
                            } else {
                                None
                            }
                        }
                    };
                    if let Some(k) = k {
                        if bx.k.is_none_or(|want| want == k) && is_canonical(x) {
                            hits.push((k, x.to_vec()));
                        }
                    }
                });
                x0 += parts;
            }
        }
        (hits, examined)
    });
    let mut failures = 0;
    let verified = hits
        .into_iter()
        .filter(|(k, x)| {
            let ok = exact_cyclic(x, bx.r) == Rational::from_integer(BigInt::from(*k));
            failures += u64::from(!ok);
            ok
        })
        .collect();
    Ok(build_report(*bx, verified, examined, failures, start))
}

/// Exact check of the cyclic equation for `t` (any rotation-sensitive order).
pub fn verify_tuple(t: &Tuple, spec: &EquationSpec) -> bool {
    is_tuple_solution(t, spec)
}

/// Every solution in `[1, bound]^2` generated from a diagonal seed by ascent,
/// together with flips, keyed by `k`.
pub fn chain_pairs(r: u64, bound: u64) -> Result<BTreeMap<u64, BTreeSet<(u64, u64)>>> {
    let mut out = BTreeMap::new();
    for (u, k) in diagonal_solutions(&BigInt::from(r)) {
        let spec = EquationSpec::pair(r, k.clone())?;
        let seed = Pair::new(u.clone(), u)?;
        let mut set = BTreeSet::new();
        let mut cur = seed.clone();
        let mut pending = vec![seed];
        loop {
            let mut inside = false;
            for p in pending.drain(..) {
                for q in [flip(&p), p] {
                    if let Some((a, b)) = q.to_u64().filter(|&(a, b)| a <= bound && b <= bound) {
                        set.insert((a, b));
                        inside = true;
                    }
                }
            }
            // chain terms grow, so once both orientations leave the box they stay out
            if !inside {
                break;
            }
            let next = ascend(&cur, 1, &spec)?.remove(0);
            cur = flip(&next);
            pending.push(next);
        }
        let k = k.to_u64().ok_or_else(|| Error::Domain(format!("k = {k} out of range")))?;
        out.insert(k, set);
    }
    Ok(out)
}

/// Compares the brute-force solution set in a box with the ascent chains.
/// Only meaningful for `r` in {1, 2}, where every solution descends to a
/// diagonal one.
pub fn chain_coverage_check(bx: &SearchBox, threads: usize) -> Result<Report> {
    if bx.m != 2 || !(1..=2).contains(&bx.r) {
        return Err(Error::Domain("chain coverage needs m = 2 and r in {1, 2}".into()));
    }
    let found = brute_pairs(&SearchBox { k: None, ..*bx }, threads)?;
    let chains = chain_pairs(bx.r, bx.bound)?;
    let mut checks = vec![Check::single(
        "every k with solutions has a diagonal seed",
        found.groups.iter().all(|g| chains.contains_key(&g.k)),
    )];
    for (k, chain) in &chains {
        let brute: BTreeSet<(u64, u64)> = found
            .group(*k)
            .map(|g| g.solutions.iter().map(|s| (s[0], s[1])).collect())
            .unwrap_or_default();
        checks.push(Check::single(format!("k={k}: brute-force set equals chain set"), &brute == chain));
    }
    checks.push(Check::single("exact re-verification", found.verification_failures == 0));
    Ok(Report {
        chain: format!("coverage r={}", bx.r),
        n_max: bx.bound,
        checks,
        observed_values: found.k_values().iter().map(u64::to_string).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pairs_of(rep: &SearchReport, k: u64) -> BTreeSet<(u64, u64)> {
        rep.group(k).map(|g| g.solutions.iter().map(|s| (s[0], s[1])).collect()).unwrap_or_default()
    }

    #[test]
    fn pairs_r1_box_14() {
        let rep = brute_pairs(&SearchBox::pairs(1, 14).unwrap(), 1).unwrap();
        assert_eq!(rep.k_values(), vec![3, 4]);
        let k3: BTreeSet<_> = [(2, 2), (2, 3), (3, 2), (3, 6), (6, 3), (6, 14), (14, 6)].into();
        let k4: BTreeSet<_> = [(1, 1), (1, 2), (2, 1), (2, 6), (6, 2)].into();
        assert_eq!(pairs_of(&rep, 3), k3);
        assert_eq!(pairs_of(&rep, 4), k4);
        assert_eq!(rep.candidates_examined, 196);
        assert_eq!(rep.group(4).unwrap().minimal, vec![vec![1, 1]]);
    }

    #[test]
    fn pairs_k_sets() {
        let rep = brute_pairs(&SearchBox::pairs(2, 500).unwrap(), 4).unwrap();
        assert_eq!(rep.k_values(), vec![3, 4, 6]);
        let rep = brute_pairs(&SearchBox::new(1, 2, 100, Some(2)).unwrap(), 2).unwrap();
        assert!(rep.is_empty());
    }

    #[test]
    fn thread_count_does_not_change_report() {
        let bx = SearchBox::pairs(3, 300).unwrap();
        let one = serde_json::to_string(&brute_pairs(&bx, 1).unwrap()).unwrap();
        let many = serde_json::to_string(&brute_pairs(&bx, 7).unwrap()).unwrap();
        assert_eq!(one, many);
        let bx = SearchBox::new(2, 3, 60, None).unwrap();
        let one = serde_json::to_string(&brute_tuples(&bx, 1).unwrap()).unwrap();
        let many = serde_json::to_string(&brute_tuples(&bx, 5).unwrap()).unwrap();
        assert_eq!(one, many);
    }

    #[test]
    fn tuples_minimal_r2_k7() {
        let rep = brute_tuples(&SearchBox::new(2, 3, 100, Some(7)).unwrap(), 4).unwrap();
        let g = rep.group(7).unwrap();
        assert_eq!(g.minimal_sum, 65);
        assert_eq!(g.minimal, vec![vec![7, 18, 40]]);
        assert_eq!(rep.verification_failures, 0);
    }

    #[test]
    fn tuples_empty_for_large_k() {
        let rep = brute_tuples(&SearchBox::new(1, 3, 20, Some(100)).unwrap(), 2).unwrap();
        assert!(rep.is_empty());
        // 18 choose 2 tuples in each shell s contribute C(s-1, 2); total C(20, 3)
        assert_eq!(rep.candidates_examined, 1140);
    }

    #[test]
    fn tuples_oracle_small_box() {
        // independent triple loop with exact rationals
        let (r, s_max) = (2u64, 30u64);
        let mut expect = BTreeSet::new();
        for a in 1..s_max {
            for b in 1..s_max {
                for c in 1..s_max {
                    if a + b + c > s_max {
                        continue;
                    }
                    let v = exact_cyclic(&[a, b, c], r);
                    if v.is_integer() {
                        let rots = [[a, b, c], [b, c, a], [c, a, b]];
                        let min = *rots.iter().min().unwrap();
                        expect.insert((v.to_integer().to_u64().unwrap(), min.to_vec()));
                    }
                }
            }
        }
        let rep = brute_tuples(&SearchBox::new(r, 3, s_max, None).unwrap(), 3).unwrap();
        let got: BTreeSet<_> =
            rep.groups.iter().flat_map(|g| g.solutions.iter().map(move |s| (g.k, s.clone()))).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn four_variable_search_runs() {
        let rep = brute_tuples(&SearchBox::new(1, 4, 16, None).unwrap(), 2).unwrap();
        for g in &rep.groups {
            for s in &g.solutions {
                assert_eq!(exact_cyclic(s, 1), Rational::from_integer(BigInt::from(g.k)));
                assert!(is_canonical(s));
            }
        }
        // (1,1,1,1): 4 * 2 = 8
        assert_eq!(rep.group(8).unwrap().minimal, vec![vec![1, 1, 1, 1]]);
    }

    #[test]
    fn verify_tuple_examples() {
        let t = |v: [i64; 3]| Tuple::from_integers(v).unwrap();
        assert!(verify_tuple(&t([66, 48, 352]), &EquationSpec::triple(4, 7).unwrap()));
        let s27 = EquationSpec::triple(2, 7).unwrap();
        assert!(verify_tuple(&t([7, 18, 40]), &s27));
        assert!(!verify_tuple(&t([7, 40, 18]), &s27));
    }

    #[test]
    fn rotation_class_of_66_48_352() {
        let rep = brute_tuples(&SearchBox::new(4, 3, 470, Some(7)).unwrap(), 0).unwrap();
        let g = rep.group(7).unwrap();
        assert!(g.solutions.contains(&vec![48, 352, 66]));
        assert!(!g.solutions.contains(&vec![66, 48, 352]));
    }

    #[test]
    fn coverage_r1_and_r2() {
        for (r, b) in [(1, 2000), (2, 500)] {
            let rep = chain_coverage_check(&SearchBox::pairs(r, b).unwrap(), 0).unwrap();
            assert!(rep.passed(), "{}", rep.to_text());
        }
        let rep = chain_coverage_check(&SearchBox::pairs(1, 1).unwrap(), 1).unwrap();
        assert!(rep.passed());
        assert_eq!(rep.observed_values, vec!["4"]);
        assert!(chain_coverage_check(&SearchBox::pairs(3, 10).unwrap(), 1).is_err());
    }

    #[test]
    fn chain_pairs_k3_prefix() {
        let c = chain_pairs(1, 14).unwrap();
        let k3: BTreeSet<_> = [(2, 2), (2, 3), (3, 2), (3, 6), (6, 3), (6, 14), (14, 6)].into();
        assert_eq!(c[&3], k3);
    }

    #[test]
    fn canonical_rotation_matches_tuple_type() {
        for x in [[3u64, 1, 2], [1, 2, 1], [2, 2, 2], [5, 1, 1]] {
            let t = Tuple::from_integers(x.map(|v| v as i64)).unwrap();
            let canon: Vec<u64> =
                t.canonical_rotation().entries().iter().map(|e| e.to_integer().to_u64().unwrap()).collect();
            assert_eq!(is_canonical(&x), canon == x.to_vec(), "{x:?}");
        }
    }

    proptest! {
        #[test]
        fn found_pairs_descend_to_listed_diagonals(r in 1u64..=2, bound in 1u64..300) {
            let rep = brute_pairs(&SearchBox::pairs(r, bound).unwrap(), 2).unwrap();
            let diag = diagonal_solutions(&BigInt::from(r));
            for g in &rep.groups {
                let spec = EquationSpec::pair(r, g.k).unwrap();
                for s in &g.solutions {
                    let t = crate::jump::descend(&Pair::new(s[0], s[1]).unwrap(), &spec).unwrap();
                    let end = t.terminal();
                    prop_assert!(diag.iter().any(|(u, k)| end.a() == u && *k == BigInt::from(g.k)));
                }
            }
        }

        #[test]
        fn cleared_matches_exact(x in proptest::collection::vec(1u64..60, 3..6), r in 1u64..6) {
            let (n, p) = cleared_cyclic(&x, u128::from(r)).unwrap();
            let exact = exact_cyclic(&x, r);
            prop_assert_eq!(Rational::new(BigInt::from(n), BigInt::from(p)), exact);
        }
    }
}
