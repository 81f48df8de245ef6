//! Staged Bell-polynomial evaluation driven by a factorization of the second
//! index, leading-zero reduction of the first index, and cost-based selection
//! between the single-stage and staged evaluators.
//!
//! Factorizing `k = p_1 p_2 ... p_sigma` (descending) lets the ordinary table
//! be built in `sigma` nested stages, one per factor, each feeding its row
//! back in as the next argument sequence. When the argument has `n0` leading
//! zeros the first index is reduced to `n - k*n0` before staging.

use crate::bell::{
    bell_exp_alg91, charged_factorials, exp_value_to_ord, ord_arg_to_exp, AlgorithmTag,
    BellResult, Flavor,
};
use crate::cost::{cost_q, cost_qprime, cost_qprime_n0, CostReport, OpCounter};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::sequence::Sequence;

/// A multiset of integer factors of `k`, stored in descending order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    k: u64,
    factors: Vec<u64>,
}

impl Factorization {
    /// Full prime factorization of `k` with multiplicity, by trial division,
    /// sorted descending. `None` for `k < 2`.
    pub fn of_primes(k: u64) -> Option<Self> {
        if k < 2 {
            return None;
        }
        let mut factors = Vec::new();
        let mut rest = k;
        let mut d = 2u64;
        while d * d <= rest {
            while rest.is_multiple_of(d) {
                factors.push(d);
                rest /= d;
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if rest > 1 {
            factors.push(rest);
        }
        factors.reverse();
        Some(Factorization { k, factors })
    }

    /// Builds a factorization from explicit factors (each >= 2). The factors
    /// are sorted descending; their product must equal `k`.
    pub fn new(k: u64, mut factors: Vec<u64>) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|&p| p < 2) {
            return Err(Error::Domain(format!(
                "factorization of {k} needs at least one factor, all >= 2"
            )));
        }
        let product: u64 = factors.iter().product();
        if product != k {
            return Err(Error::Domain(format!(
                "factorization product {product} does not equal k = {k}"
            )));
        }
        factors.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Factorization { k, factors })
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    /// Number of factors.
    pub fn sigma(&self) -> usize {
        self.factors.len()
    }

    /// Sum of the factors.
    pub fn sum(&self) -> u64 {
        self.factors.iter().sum()
    }
}

/// Outcome of cost-based algorithm selection.
#[derive(Clone, Debug)]
pub struct AlgorithmChoice {
    pub tag: AlgorithmTag,
    pub factorization: Option<Factorization>,
    pub n0: u64,
    pub predicted_cost: u64,
}

/// Picks the evaluator with the smaller predicted cost; ties go to the
/// single-stage evaluator. `k = 1` has no factorization and always uses it.
pub fn select_algorithm(n: u64, k: u64, n0: u64) -> AlgorithmChoice {
    assert!(n >= k && k >= 1, "selection needs n >= k >= 1");
    let q = u64::try_from(cost_q(n, k)).expect("cost fits in u64");
    let Some(f) = Factorization::of_primes(k) else {
        return AlgorithmChoice {
            tag: AlgorithmTag::Alg91,
            factorization: None,
            n0,
            predicted_cost: q,
        };
    };
    let reduced_fits = k
        .checked_mul(n0)
        .and_then(|kn0| n.checked_sub(kn0))
        .is_some_and(|reduced| reduced >= k);
    if n0 > 0 && !reduced_fits {
        // every admissible tuple needs parts above n0, so the value is zero
        return AlgorithmChoice {
            tag: AlgorithmTag::GenAl,
            factorization: Some(f),
            n0,
            predicted_cost: 0,
        };
    }
    let qp = u64::try_from(cost_qprime_n0(n, &f, n0)).expect("cost fits in u64");
    if q <= qp {
        AlgorithmChoice {
            tag: AlgorithmTag::Alg91,
            factorization: None,
            n0,
            predicted_cost: q,
        }
    } else {
        AlgorithmChoice {
            tag: if n0 == 0 {
                AlgorithmTag::Alg92
            } else {
                AlgorithmTag::GenAl
            },
            factorization: Some(f),
            n0,
            predicted_cost: qp,
        }
    }
}

/// Staged evaluator for `B_{n,k}(x)` with the factor ordering of `f`.
/// Requires `n >= k >= 2` and `f.k() == k`. The measured count equals
/// `cost_qprime(n, f)` exactly.
pub fn bell_exp_alg92(
    x: &Sequence,
    n: u64,
    k: u64,
    f: &Factorization,
    counter: Option<&mut OpCounter>,
) -> Result<BellResult> {
    assert!(n >= k && k >= 2, "staged evaluation needs n >= k >= 2");
    if f.k() != k {
        return Err(Error::Domain(format!(
            "factorization is for {} but k = {k}",
            f.k()
        )));
    }
    let (value, ops) = run_staged(x, n, k, f, 0);
    let predicted = u64::try_from(cost_qprime(n, f)).expect("cost fits in u64");
    if let Some(c) = counter {
        c.charge(ops);
    }
    Ok(BellResult {
        value,
        n,
        k,
        flavor: Flavor::Exponential,
        algorithm: AlgorithmTag::Alg92,
        cost: Some(CostReport {
            predicted,
            measured: Some(ops),
            n,
            k,
            n0: 0,
            factorization: Some(f.clone()),
        }),
    })
}

/// Staged evaluator with leading-zero reduction, `n0` auto-detected from the
/// argument. `k = 1` routes through the single-stage evaluator.
pub fn bell_exp_genal(
    x: &Sequence,
    n: u64,
    k: u64,
    counter: Option<&mut OpCounter>,
) -> BellResult {
    let n0 = match x.leading_index() {
        Some(lead) => (lead - 1) as u64,
        None => return zero_result(n, k, AlgorithmTag::GenAl),
    };
    bell_exp_genal_with_n0(x, n, k, n0, counter)
}

/// Staged evaluator with a caller-supplied leading-zero count. The argument
/// must actually vanish at and below `n0`; fewer known zeros than the true
/// count is fine.
pub fn bell_exp_genal_with_n0(
    x: &Sequence,
    n: u64,
    k: u64,
    n0: u64,
    counter: Option<&mut OpCounter>,
) -> BellResult {
    assert!(k >= 1, "needs k >= 1");
    if let Some(lead) = x.leading_index() {
        assert!(
            lead > n0 as i64,
            "argument must vanish at and below n0 = {n0}, leading index is {lead}"
        );
        assert!(lead >= 1, "Bell arguments must vanish below index 1");
    }
    let reduced_fits = k
        .checked_mul(n0)
        .and_then(|kn0| n.checked_sub(kn0))
        .is_some_and(|reduced| reduced >= k);
    if x.is_zero() || n < k || !reduced_fits {
        return zero_result(n, k, AlgorithmTag::GenAl);
    }
    let Some(f) = Factorization::of_primes(k) else {
        // k = 1: no factorization exists, use the single-stage evaluator
        return bell_exp_alg91(x, n, k, counter);
    };
    let (value, ops) = run_staged(x, n, k, &f, n0);
    let predicted = u64::try_from(cost_qprime_n0(n, &f, n0)).expect("cost fits in u64");
    if let Some(c) = counter {
        c.charge(ops);
    }
    BellResult {
        value,
        n,
        k,
        flavor: Flavor::Exponential,
        algorithm: AlgorithmTag::GenAl,
        cost: Some(CostReport {
            predicted,
            measured: Some(ops),
            n,
            k,
            n0,
            factorization: Some(f),
        }),
    }
}

fn zero_result(n: u64, k: u64, algorithm: AlgorithmTag) -> BellResult {
    BellResult {
        value: Rational::zero(),
        n,
        k,
        flavor: Flavor::Exponential,
        algorithm,
        cost: Some(CostReport {
            predicted: 0,
            measured: Some(0),
            n,
            k,
            n0: 0,
            factorization: None,
        }),
    }
}

/// The staged core. Caller guarantees the argument vanishes at and below
/// `n0` and that `n' = n - k*n0 >= k`. Returns the value and the measured
/// operation count.
fn run_staged(x: &Sequence, n: u64, k: u64, f: &Factorization, n0: u64) -> (Rational, u64) {
    let n_red = n - k * n0;
    debug_assert!(n_red >= k);
    let sigma = f.sigma() as u64;
    let sum = f.sum();
    // conversion window: y_i = x_{i+n0} / (i+n0)! for i = 1 ..= n' + sigma - sum
    let conv_len = n_red + sigma - sum;
    let charge_end = n_red.max(conv_len + n0);
    let mut ops: u64 = 0;
    let fact = charged_factorials(n, charge_end, &mut ops);

    let mut y = vec![Rational::zero(); n_red as usize + 1];
    for i in 1..=conv_len {
        y[i as usize] = x.get((i + n0) as i64) / Rational::from(&fact[(i + n0) as usize]);
        ops += 1;
    }

    let factors = f.factors();
    let mut r = sum; // r_j = p_1 + ... + p_{sigma-j+1}
    for j in 1..=sigma {
        if j >= 2 {
            // window-sum update between stages; one bookkeeping unit
            r -= factors[(sigma - j + 1) as usize];
            ops += 1;
        }
        let p = factors[(sigma - j) as usize];
        let w = (n_red + sigma - j)
            .checked_sub(r)
            .expect("stage window must be non-negative") as usize;

        // table layers for this stage, previous layer only
        let mut prev = vec![Rational::zero(); w + 1];
        prev[0] = Rational::one();
        let mut cur = vec![Rational::zero(); w + 1];
        for _l in 1..=p {
            for (d, slot) in cur.iter_mut().enumerate() {
                let mut sum_term = &y[1] * &prev[d];
                ops += 1;
                for m in 2..=d + 1 {
                    sum_term += &y[m] * &prev[d + 1 - m];
                    ops += 2;
                }
                *slot = sum_term;
            }
            std::mem::swap(&mut prev, &mut cur);
        }
        // feed the finished row back in as the next argument
        for slot in y.iter_mut().take(p as usize).skip(1) {
            *slot = Rational::zero();
        }
        for (d, v) in prev.iter().enumerate() {
            y[p as usize + d] = v.clone();
        }
    }

    let mut value = y[n_red as usize].clone() * Rational::from(&fact[n as usize]);
    ops += 1;
    value /= Rational::from(&fact[k as usize]);
    ops += 1;
    (value, ops)
}

/// Which evaluator to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgorithmSelect {
    /// Pick by predicted cost.
    Auto,
    Alg91,
    Alg92,
    GenAl,
}

/// Evaluates a partial Bell polynomial of either flavor with the requested
/// evaluator. Ordinary values are computed through the exponential core by
/// scaling the argument up and the value back down; the attached cost report
/// describes the exponential core run.
pub fn bell_with(
    x: &Sequence,
    n: u64,
    k: u64,
    flavor: Flavor,
    select: AlgorithmSelect,
    counter: Option<&mut OpCounter>,
) -> Result<BellResult> {
    assert!(
        x.leading_index().is_none_or(|lead| lead >= 1),
        "Bell arguments must vanish below index 1"
    );
    if flavor == Flavor::Ordinary {
        let scaled = ord_arg_to_exp(x);
        let mut result = bell_with(&scaled, n, k, Flavor::Exponential, select, counter)?;
        if n >= k {
            result.value = exp_value_to_ord(&result.value, n, k);
        }
        result.flavor = Flavor::Ordinary;
        return Ok(result);
    }
    if n < k || k == 0 {
        let mut r = zero_result(n, k, AlgorithmTag::Recurrence);
        r.value = if n == 0 && k == 0 {
            Rational::one()
        } else {
            Rational::zero()
        };
        r.cost = None;
        return Ok(r);
    }
    match select {
        AlgorithmSelect::Auto => {
            let n0 = x.leading_index().map_or(0, |lead| (lead - 1) as u64);
            let choice = select_algorithm(n, k, n0);
            match choice.tag {
                AlgorithmTag::Alg91 => Ok(bell_exp_alg91(x, n, k, counter)),
                AlgorithmTag::Alg92 => bell_exp_alg92(
                    x,
                    n,
                    k,
                    choice.factorization.as_ref().expect("factorization"),
                    counter,
                ),
                _ => Ok(bell_exp_genal_with_n0(x, n, k, choice.n0, counter)),
            }
        }
        AlgorithmSelect::Alg91 => Ok(bell_exp_alg91(x, n, k, counter)),
        AlgorithmSelect::Alg92 => match Factorization::of_primes(k) {
            Some(f) => bell_exp_alg92(x, n, k, &f, counter),
            None => Ok(bell_exp_alg91(x, n, k, counter)),
        },
        AlgorithmSelect::GenAl => Ok(bell_exp_genal(x, n, k, counter)),
    }
}
