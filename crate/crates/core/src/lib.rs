//! Positive-integer solutions of `(a+r)/b + (b+r)/a = k` by Vieta jumping.
//!
//! For `r = 1` only `k = 3` and `k = 4` occur; their solutions are consecutive
//! terms of the chains `a_n = F_{2n-1} + 1` and `b_n` (`b_n = 4 b_{n-1} - b_{n-2} - 1`),
//! and `(a+b)/gcd(a,b)^2` only takes the values 1, 2, 3 and 5. This crate
//! computes all of that exactly and checks it:
//!
//! - [`exactnum`]: big integers, rationals and `p + q*sqrt(D)` field elements.
//! - [`jump`]: the equation, jumps, flips, descent and ascent; the rational
//!   three-variable jump.
//! - [`sequences`]: Fibonacci, Lucas and chain generators with exact closed forms.
//! - [`invariants`]: gcd structure and normalized-sum checkers, including the
//!   open `r = 2` value-set question.
//! - [`search`]: brute-force oracles over boxes and sum shells.
//! - [`cli`]: the `vieta` command-line driver.

pub mod cli;
pub mod error;
pub mod exactnum;
pub mod invariants;
pub mod jump;
pub mod report;
pub mod search;
pub mod sequences;

pub use error::{Error, Result};
