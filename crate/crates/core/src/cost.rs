//! Exact operation-count polynomials, instrumented counting, and the savings
//! tables and curves they induce.
//!
//! The counts model one unit per rational addition, multiplication, or
//! division performed on coefficient data. The evaluators in [`crate::bell`]
//! and [`crate::factorized`] charge:
//!
//! - one unit per incremental factorial-table product,
//! - one unit per conversion division `y_i = x_i / i!`,
//! - `2m - 1` units per inner sum of `m` products,
//! - two units for the final scale by `n!` and `k!`,
//! - in the staged evaluator, one unit per stage transition for the
//!   window-sum update.
//!
//! Under leading-zero reduction (`n0 > 0`) the factorial-table charge covers
//! `max(n - k*n0, conversion end)` entries; the table itself extends to `n`
//! for the final scale without further charges. With this convention the
//! measured count of every evaluator equals its predicted polynomial exactly,
//! which is what [`CostReport`] asserts and the `bench` command verifies.

use std::io::{self, Write};

use num_bigint::BigInt;

use crate::factorized::Factorization;
use crate::rational::Rational;

/// Basic-operation accumulator threaded through instrumented evaluations.
#[derive(Clone, Debug, Default)]
pub struct OpCounter {
    count: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn charge(&mut self, units: u64) {
        self.count += units;
    }

    pub fn count(&self) -> u64 {
        self.count
    }
}

/// Predicted vs. measured operation counts for one Bell-polynomial evaluation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CostReport {
    pub predicted: u64,
    pub measured: Option<u64>,
    pub n: u64,
    pub k: u64,
    pub n0: u64,
    pub factorization: Option<Factorization>,
}

impl CostReport {
    /// True unless a measurement is present and disagrees with the prediction.
    pub fn consistent(&self) -> bool {
        self.measured.is_none_or(|m| m == self.predicted)
    }
}

/// Operation count of the single-stage conversion scheme:
/// `Q(n,k) = k n^2 + 2(-k^2+k+1) n + k^3 - 2k^2 + 2`.
pub fn cost_q(n: u64, k: u64) -> i128 {
    assert!(n >= k && k >= 1, "cost_q needs n >= k >= 1");
    let (n, k) = (n as i128, k as i128);
    k * n * n + 2 * (-k * k + k + 1) * n + k * k * k - 2 * k * k + 2
}

/// Operation count of the staged scheme for the factor ordering stored in `f`.
pub fn cost_qprime(n: u64, f: &Factorization) -> i128 {
    assert!(n >= f.k() && f.k() >= 2, "cost_qprime needs n >= k >= 2");
    cost_qprime_ordered(n, f.factors())
}

/// Staged-scheme operation count for an arbitrary factor ordering.
///
/// With partial sums `s_t = p_1 + ... + p_t`:
/// `a = sum p_t`, `b = 2 + 2 sum (t - s_t) p_t`,
/// `c = sum (t - s_t)^2 p_t - sum p_t + 2 sigma`.
pub fn cost_qprime_ordered(n: u64, factors: &[u64]) -> i128 {
    assert!(!factors.is_empty(), "empty factorization");
    let n = n as i128;
    let sigma = factors.len() as i128;
    let mut a = 0i128;
    let mut b = 2i128;
    let mut c = 2 * sigma;
    let mut partial = 0i128;
    for (idx, &p) in factors.iter().enumerate() {
        let t = idx as i128 + 1;
        let p = p as i128;
        partial += p;
        let d = t - partial;
        a += p;
        b += 2 * d * p;
        c += d * d * p;
    }
    c -= a;
    a * n * n + b * n + c
}

/// Staged-scheme count with `n0` leading zeros exploited:
/// `Q'(n - k n0, k) + max(0, n0 + sigma - sum p_m)`.
pub fn cost_qprime_n0(n: u64, f: &Factorization, n0: u64) -> i128 {
    let k = f.k();
    assert!(
        n >= k * n0 && n - k * n0 >= k,
        "cost_qprime_n0 needs n - k*n0 >= k"
    );
    let correction = (n0 as i128 + f.sigma() as i128 - f.sum() as i128).max(0);
    cost_qprime(n - k * n0, f) + correction
}

/// Percentage of operations saved by the staged scheme over the single-stage
/// one, as an exact rational: `100 (Q - Q'_{n0}) / Q`.
///
/// `k` is factorized into primes in descending order. Prime `k` (and `k = 1`)
/// has no nontrivial factorization, so its saving at `n0 = 0` is zero.
pub fn savings(n: u64, k: u64, n0: u64) -> Rational {
    let q = cost_q(n, k);
    let qp = match Factorization::of_primes(k) {
        Some(f) => {
            if n0 == 0 {
                cost_qprime(n, &f)
            } else {
                cost_qprime_n0(n, &f, n0)
            }
        }
        None => {
            assert!(n0 == 0, "k = 1 admits no leading-zero reduction here");
            q
        }
    };
    ratio_percent(q - qp, q)
}

/// Large-`n` limit of the saving percentage: `100 (1 - sum p_j / k)`.
pub fn savings_limit(k: u64) -> Rational {
    match Factorization::of_primes(k) {
        Some(f) => ratio_percent(k as i128 - f.sum() as i128, k as i128),
        None => Rational::zero(),
    }
}

fn ratio_percent(num: i128, den: i128) -> Rational {
    let num = Rational::from(BigInt::from(num * 100));
    let den = Rational::from(BigInt::from(den));
    num / den
}

/// Cost change from swapping the adjacent factors at positions `i`, `i + 1`
/// (0-based) of `factors`: returns `Q'(swapped) - Q'(original)`.
///
/// Evaluated both by the closed form
/// `(p_i - p_{i+1}) (2n + p_i p_{i+1} - 2 p_i - 2 p_{i+1} + 2u + 3)` with
/// `u = i - (p_0 + ... + p_{i-1})`, and by differencing
/// [`cost_qprime_ordered`] on the two orderings; the two routes must agree.
pub fn ordering_cost_delta(n: u64, factors: &[u64], i: usize) -> i128 {
    assert!(i + 1 < factors.len(), "adjacent position out of range");
    let pi = factors[i] as i128;
    let pj = factors[i + 1] as i128;
    let u = i as i128 - factors[..i].iter().map(|&p| p as i128).sum::<i128>();
    let closed = (pi - pj) * (2 * n as i128 + pi * pj - 2 * pi - 2 * pj + 2 * u + 3);

    let mut swapped = factors.to_vec();
    swapped.swap(i, i + 1);
    let direct = cost_qprime_ordered(n, &swapped) - cost_qprime_ordered(n, factors);
    assert_eq!(closed, direct, "closed-form swap delta disagrees with polynomials");
    closed
}

/// One evaluated cost cell.
#[derive(Clone, Debug)]
pub struct CostRow {
    pub n: u64,
    pub k: u64,
    pub n0: u64,
    pub q: i128,
    pub qprime: i128,
    pub e_percent: Rational,
    /// Set when `k` has no nontrivial factorization (prime `k` or `k = 1`).
    pub no_factorization: bool,
}

impl CostRow {
    fn build(n: u64, k: u64, n0: u64) -> CostRow {
        let q = cost_q(n, k);
        let (qprime, no_factorization) = match Factorization::of_primes(k) {
            Some(f) if n0 == 0 => (cost_qprime(n, &f), f.sigma() == 1),
            Some(f) => (cost_qprime_n0(n, &f, n0), f.sigma() == 1),
            None => (q, true),
        };
        CostRow {
            n,
            k,
            n0,
            q,
            qprime,
            e_percent: ratio_percent(q - qprime, q),
            no_factorization,
        }
    }
}

/// Saving percentages over a grid, one row per `(n, k)` pair with `n >= k`,
/// at `n0 = 0`. Rows are ordered by `k`, then `n`.
pub fn table1(ns: &[u64], ks: &[u64]) -> Vec<CostRow> {
    let mut rows = Vec::new();
    for &k in ks {
        if k == 0 {
            continue;
        }
        for &n in ns {
            if n >= k {
                rows.push(CostRow::build(n, k, 0));
            }
        }
    }
    rows
}

/// The grid of the published savings table.
pub const TABLE1_NS: [u64; 9] = [50, 100, 250, 500, 750, 1000, 5000, 10_000, 100_000];
pub const TABLE1_KS: [u64; 9] = [10, 50, 100, 250, 500, 750, 1000, 5000, 10_000];

/// Saving curves for fixed `k`: rows for each `n0` in `n0s` over
/// `n = k ..= n_max`, restricted to `n - k*n0 >= k`. Ordered by `n0`, then `n`.
pub fn figure1_data(k: u64, n_max: u64, n0s: &[u64]) -> Vec<CostRow> {
    assert!(k >= 2, "figure1 curves need k >= 2");
    let mut rows = Vec::new();
    for &n0 in n0s {
        for n in k..=n_max {
            if n >= k * n0 && n - k * n0 >= k {
                rows.push(CostRow::build(n, k, n0));
            }
        }
    }
    rows
}

/// CSV emission: header `n,k,n0,Q,Qprime,e_percent`, LF line endings,
/// percentages rounded half-up to one decimal.
pub fn write_csv<W: Write>(rows: &[CostRow], out: &mut W) -> io::Result<()> {
    out.write_all(b"n,k,n0,Q,Qprime,e_percent\n")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            row.n,
            row.k,
            row.n0,
            row.q,
            row.qprime,
            row.e_percent.to_decimal_string(1)
        )?;
    }
    Ok(())
}
