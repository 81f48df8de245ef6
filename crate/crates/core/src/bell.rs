//! Partial Bell polynomials: the definitional brute-force oracle, the
//! classical recurrences for both flavors, the exponential/ordinary
//! conversions, and the instrumented single-stage evaluator that computes
//! the ordinary table once and converts at the boundary.
//!
//! Argument sequences must vanish below index 1. Callers holding sequences
//! with other supports go through [`crate::factorized`], which reduces
//! leading zeros away before evaluating.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;

use crate::cost::{cost_q, CostReport, OpCounter};
use crate::rational::{binomial_int, factorial, Rational};
use crate::sequence::Sequence;

/// Which polynomial family a value belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Exponential,
    Ordinary,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flavor::Exponential => write!(f, "exp"),
            Flavor::Ordinary => write!(f, "ord"),
        }
    }
}

/// How a [`BellResult`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgorithmTag {
    BruteForce,
    Recurrence,
    Alg91,
    Alg92,
    GenAl,
}

impl fmt::Display for AlgorithmTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmTag::BruteForce => write!(f, "bruteforce"),
            AlgorithmTag::Recurrence => write!(f, "recurrence"),
            AlgorithmTag::Alg91 => write!(f, "alg91"),
            AlgorithmTag::Alg92 => write!(f, "alg92"),
            AlgorithmTag::GenAl => write!(f, "genal"),
        }
    }
}

/// One evaluated partial Bell polynomial.
#[derive(Clone, Debug)]
pub struct BellResult {
    pub value: Rational,
    pub n: u64,
    pub k: u64,
    pub flavor: Flavor,
    pub algorithm: AlgorithmTag,
    pub cost: Option<CostReport>,
}

fn assert_bell_arg(x: &Sequence) {
    assert!(
        x.is_zero() || x.start() >= 1,
        "Bell arguments must vanish below index 1 (start = {})",
        x.start()
    );
}

/// Definitional oracle: enumerates all multiplicity tuples with
/// `sum j_i = k` and `sum i j_i = n` and sums the exact multinomial terms.
/// Intended for small `n` (the tuple count grows like the partition numbers).
pub fn bell_exp_bruteforce(x: &Sequence, n: u64, k: u64) -> Rational {
    assert_bell_arg(x);
    fn go(x: &Sequence, s: u64, rem: u64, cnt: u64, partial: &Rational, acc: &mut Rational) {
        if s == 0 {
            if rem == 0 && cnt == 0 {
                *acc += partial;
            }
            return;
        }
        if rem > s * cnt {
            return;
        }
        let base = x.get(s as i64) / Rational::from(factorial(s));
        let mut term = partial.clone();
        let max_j = (rem / s).min(cnt);
        for j in 0..=max_j {
            if j > 0 {
                term = term * &base / Rational::from(j as i64);
            }
            go(x, s - 1, rem - j * s, cnt - j, &term, acc);
        }
    }
    let mut acc = Rational::zero();
    go(x, n, n, k, &Rational::one(), &mut acc);
    acc * Rational::from(factorial(n))
}

/// Exponential Bell polynomial by the binomial-weighted recurrence.
pub fn bell_exp_recurrence(x: &Sequence, n: u64, k: u64) -> BellResult {
    assert_bell_arg(x);
    let value = exp_value_by_recurrence(x, n, k);
    BellResult {
        value,
        n,
        k,
        flavor: Flavor::Exponential,
        algorithm: AlgorithmTag::Recurrence,
        cost: None,
    }
}

/// Ordinary Bell polynomial by the plain convolution-style recurrence.
pub fn bell_ord_recurrence(x: &Sequence, n: u64, k: u64) -> BellResult {
    assert_bell_arg(x);
    let value = ord_value_by_recurrence(x, n, k);
    BellResult {
        value,
        n,
        k,
        flavor: Flavor::Ordinary,
        algorithm: AlgorithmTag::Recurrence,
        cost: None,
    }
}

fn exp_value_by_recurrence(x: &Sequence, n: u64, k: u64) -> Rational {
    if k == 0 || n < k {
        return kronecker(n == 0 && k == 0);
    }
    // trapezoidal table: layer l holds first indices l ..= n-k+l
    let w = (n - k) as usize;
    let y = x.window(1, (n - k + 1) as i64);
    let mut prev = vec![Rational::zero(); w + 1];
    prev[0] = Rational::one();
    for l in 1..=k {
        let mut cur = vec![Rational::zero(); w + 1];
        for (d, slot) in cur.iter_mut().enumerate() {
            let i = l + d as u64;
            let mut sum = Rational::zero();
            for j in 1..=d + 1 {
                if y[j - 1].is_zero() {
                    continue;
                }
                let weight = Rational::from(binomial_int(i - 1, j as u64 - 1));
                sum += weight * &y[j - 1] * &prev[d + 1 - j];
            }
            *slot = sum;
        }
        prev = cur;
    }
    prev[w].clone()
}

fn ord_value_by_recurrence(x: &Sequence, n: u64, k: u64) -> Rational {
    if k == 0 || n < k {
        return kronecker(n == 0 && k == 0);
    }
    let w = (n - k) as usize;
    let y = x.window(1, (n - k + 1) as i64);
    let mut prev = vec![Rational::zero(); w + 1];
    prev[0] = Rational::one();
    for _l in 1..=k {
        let mut cur = vec![Rational::zero(); w + 1];
        for (d, slot) in cur.iter_mut().enumerate() {
            let mut sum = Rational::zero();
            for j in 1..=d + 1 {
                if !y[j - 1].is_zero() {
                    sum += &y[j - 1] * &prev[d + 1 - j];
                }
            }
            *slot = sum;
        }
        prev = cur;
    }
    prev[w].clone()
}

fn kronecker(cond: bool) -> Rational {
    if cond {
        Rational::one()
    } else {
        Rational::zero()
    }
}

/// Whole row `B̂_{m,k}(x)` for `m = 0 ..= m_max`.
pub fn ord_bell_row(x: &Sequence, k: u64, m_max: u64) -> Vec<Rational> {
    ord_bell_layers(x, k, m_max).pop().expect("at least layer zero")
}

/// Whole row `B_{m,k}(x)` for `m = 0 ..= m_max`.
pub fn exp_bell_row(x: &Sequence, k: u64, m_max: u64) -> Vec<Rational> {
    exp_bell_layers(x, k, m_max).pop().expect("at least layer zero")
}

/// Layers `0 ..= k`, each a full row over `m = 0 ..= m_max`:
/// `layers[j][m] = B̂_{m,j}(x)`.
pub fn ord_bell_layers(x: &Sequence, k: u64, m_max: u64) -> Vec<Vec<Rational>> {
    assert_bell_arg(x);
    let m_max = m_max as usize;
    let y = x.window(1, m_max as i64);
    let mut layers = Vec::with_capacity(k as usize + 1);
    let mut row = vec![Rational::zero(); m_max + 1];
    row[0] = Rational::one();
    layers.push(row);
    for l in 1..=k as usize {
        let prev = &layers[l - 1];
        let mut row = vec![Rational::zero(); m_max + 1];
        for (m, slot) in row.iter_mut().enumerate().skip(l) {
            let mut sum = Rational::zero();
            for j in 1..=m - l + 1 {
                if !y[j - 1].is_zero() {
                    sum += &y[j - 1] * &prev[m - j];
                }
            }
            *slot = sum;
        }
        layers.push(row);
    }
    layers
}

/// Layers `0 ..= k`, each a full row over `m = 0 ..= m_max`:
/// `layers[j][m] = B_{m,j}(x)`.
pub fn exp_bell_layers(x: &Sequence, k: u64, m_max: u64) -> Vec<Vec<Rational>> {
    assert_bell_arg(x);
    let m_max = m_max as usize;
    let y = x.window(1, m_max as i64);
    let mut layers = Vec::with_capacity(k as usize + 1);
    let mut row = vec![Rational::zero(); m_max + 1];
    row[0] = Rational::one();
    layers.push(row);
    for l in 1..=k as usize {
        let prev = &layers[l - 1];
        let mut row = vec![Rational::zero(); m_max + 1];
        for (m, slot) in row.iter_mut().enumerate().skip(l) {
            let mut sum = Rational::zero();
            for j in 1..=m - l + 1 {
                if !y[j - 1].is_zero() {
                    let weight = Rational::from(binomial_int(m as u64 - 1, j as u64 - 1));
                    sum += weight * &y[j - 1] * &prev[m - j];
                }
            }
            *slot = sum;
        }
        layers.push(row);
    }
    layers
}

/// Argument conversion for evaluating an exponential polynomial through the
/// ordinary table: `y_i = x_i / i!`.
pub fn exp_arg_to_ord(x: &Sequence) -> Sequence {
    assert_bell_arg(x);
    let terms = x
        .terms()
        .iter()
        .enumerate()
        .map(|(off, t)| t / &Rational::from(factorial(x.start() as u64 + off as u64)))
        .collect();
    Sequence::new(x.start(), terms)
}

/// The reverse argument conversion: `y_i = i! x_i`.
pub fn ord_arg_to_exp(x: &Sequence) -> Sequence {
    assert_bell_arg(x);
    let terms = x
        .terms()
        .iter()
        .enumerate()
        .map(|(off, t)| t * &Rational::from(factorial(x.start() as u64 + off as u64)))
        .collect();
    Sequence::new(x.start(), terms)
}

/// Value conversion ordinary -> exponential: `B = (n!/k!) B̂`.
pub fn ord_value_to_exp(bhat: &Rational, n: u64, k: u64) -> Rational {
    assert!(n >= k, "value conversion needs n >= k");
    bhat * &Rational::from(factorial(n)) / Rational::from(factorial(k))
}

/// Value conversion exponential -> ordinary: `B̂ = (k!/n!) B`.
pub fn exp_value_to_ord(b: &Rational, n: u64, k: u64) -> Rational {
    assert!(n >= k, "value conversion needs n >= k");
    b * &Rational::from(factorial(k)) / Rational::from(factorial(n))
}

/// Single-stage instrumented evaluator: converts the argument, fills the
/// ordinary table layer by layer, and converts the value at the end. The
/// measured operation count equals `cost_q(n, k)` exactly.
pub fn bell_exp_alg91(
    x: &Sequence,
    n: u64,
    k: u64,
    counter: Option<&mut OpCounter>,
) -> BellResult {
    assert_bell_arg(x);
    assert!(n >= k && k >= 1, "single-stage evaluation needs n >= k >= 1");
    let mut ops: u64 = 0;

    // factorial table through n!, one product per entry past 1!
    let fact = charged_factorials(n, n, &mut ops);

    // conversion y_i = x_i / i!, i = 1 ..= n-k+1
    let m = (n - k + 1) as usize;
    let mut y = Vec::with_capacity(m + 1);
    y.push(Rational::zero()); // unused slot 0; y is 1-based
    for (i, fact_i) in fact.iter().enumerate().take(m + 1).skip(1) {
        y.push(x.get(i as i64) / Rational::from(fact_i));
        ops += 1;
    }

    // table layers l = 1 ..= k over first indices l ..= n-k+l
    let w = (n - k) as usize;
    let mut prev = vec![Rational::zero(); w + 1];
    prev[0] = Rational::one();
    for _l in 1..=k {
        let mut cur = vec![Rational::zero(); w + 1];
        for (d, slot) in cur.iter_mut().enumerate() {
            let mut sum = &y[1] * &prev[d];
            ops += 1;
            for j in 2..=d + 1 {
                sum += &y[j] * &prev[d + 1 - j];
                ops += 2;
            }
            *slot = sum;
        }
        prev = cur;
    }

    // final scale: multiply by n!, divide by k!
    let mut value = prev[w].clone() * Rational::from(&fact[n as usize]);
    ops += 1;
    value /= Rational::from(&fact[k as usize]);
    ops += 1;

    let predicted = u64::try_from(cost_q(n, k)).expect("cost fits in u64");
    if let Some(c) = counter {
        c.charge(ops);
    }
    BellResult {
        value,
        n,
        k,
        flavor: Flavor::Exponential,
        algorithm: AlgorithmTag::Alg91,
        cost: Some(CostReport {
            predicted,
            measured: Some(ops),
            n,
            k,
            n0: 0,
            factorization: None,
        }),
    }
}

/// Factorials `0! ..= limit!`. One product is charged per entry from `2!`
/// through `charge_end!`; entries past `charge_end` are built uncharged.
pub(crate) fn charged_factorials(limit: u64, charge_end: u64, ops: &mut u64) -> Vec<BigInt> {
    let mut fact = Vec::with_capacity(limit as usize + 1);
    fact.push(BigInt::one());
    for i in 1..=limit {
        let next = &fact[(i - 1) as usize] * i;
        fact.push(next);
        if (2..=charge_end).contains(&i) {
            *ops += 1;
        }
    }
    fact
}
