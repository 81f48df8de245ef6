//! Convolution calculus through Bell polynomials: integer convolution powers,
//! convolution roots (radicals), inversion of a Bell-polynomial sequence back
//! to its argument, the argument-independent nested ratio, and compound
//! distributions of i.i.d. positive-integer random variables.

use crate::bell::{exp_bell_layers, exp_bell_row, ord_bell_layers, ord_bell_row, Flavor};
use crate::error::{Error, Result};
use crate::factorized::{bell_with, AlgorithmSelect};
use crate::rational::{binomial_int, binomial_rational, factorial, Rational};
use crate::sequence::Sequence;

/// A convolution root together with its branch information.
#[derive(Clone, Debug)]
pub struct RootResult {
    pub root: Sequence,
    pub k: u64,
    /// For even `k` both `root` and `-root` solve the problem; the returned
    /// branch has a positive leading term.
    pub sign_pair: bool,
}

/// Convolution power `x^{*k}` computed through the ordinary Bell row
/// `x^{*k}_n = B̂_{n + k(1 - n0), k}(y)` with `y_m = x_{m - 1 + n0}`, exact
/// through `up_to`. Agrees with [`Sequence::conv_power`] on every input.
pub fn conv_power_via_bell(x: &Sequence, k: u64, up_to: i64) -> Sequence {
    if k == 0 {
        return Sequence::delta();
    }
    let Some(n0) = x.leading_index() else {
        return Sequence::zero();
    };
    let start = n0 * k as i64;
    if up_to < start {
        return Sequence::zero();
    }
    let y = x.shift(1 - n0);
    let m_max = (up_to - start) as u64 + k;
    let row = ord_bell_row(&y, k, m_max);
    let terms = (start..=up_to)
        .map(|n| row[(n - start) as usize + k as usize].clone())
        .collect();
    Sequence::new(start, terms)
}

/// K-th convolution root of `x`, exact through `up_to`.
///
/// The leading index `n0` must be divisible by `k` and the leading
/// coefficient must have an exact rational k-th root; the root starts at
/// `n0 / k` and its terms are
/// `x_{n0}^{1/k} * sum_j C(1/k, j) B̂_{m, j}(y)` with `y_m = x_{m+n0}/x_{n0}`.
pub fn conv_root(x: &Sequence, k: u64, up_to: i64) -> Result<RootResult> {
    assert!(k >= 1, "root order must be positive");
    let Some(n0) = x.leading_index() else {
        return Err(Error::NoRoot("the zero sequence has no leading term".into()));
    };
    if n0 % k as i64 != 0 {
        return Err(Error::NoRoot(format!(
            "root order {k} does not divide the leading index {n0}"
        )));
    }
    let lead = x.get(n0);
    let scale = lead.kth_root(k as u32).ok_or_else(|| {
        Error::IrrationalLeadingRoot(format!(
            "{lead} has no exact rational {k}-th root"
        ))
    })?;
    let root_start = n0 / k as i64;
    let sign_pair = k.is_multiple_of(2);
    if up_to < root_start {
        return Ok(RootResult {
            root: Sequence::zero(),
            k,
            sign_pair,
        });
    }
    let m_max = (up_to - root_start) as u64;
    let y = Sequence::new(
        1,
        (1..=m_max as i64).map(|m| x.get(m + n0) / &lead).collect(),
    );
    let layers = ord_bell_layers(&y, m_max, m_max);
    let inv_k = Rational::new(1, k as i64);
    let terms = (0..=m_max as usize)
        .map(|m| {
            let mut sum = Rational::zero();
            for (j, layer) in layers.iter().enumerate().take(m + 1) {
                let weight = binomial_rational(&inv_k, j as u64);
                if !weight.is_zero() && !layer[m].is_zero() {
                    sum += weight * &layer[m];
                }
            }
            sum * &scale
        })
        .collect();
    Ok(RootResult {
        root: Sequence::new(root_start, terms),
        k,
        sign_pair,
    })
}

fn resolve_leading(yk: &Rational, supplied: Option<&Rational>, k: u64) -> Result<Rational> {
    match supplied {
        Some(x1) => {
            if x1.is_zero() {
                return Err(Error::NonInvertible("supplied x1 is zero".into()));
            }
            if &x1.pow(k as i64) != yk {
                return Err(Error::Domain(format!(
                    "supplied x1 = {x1} does not satisfy x1^{k} = y_{k} = {yk}"
                )));
            }
            Ok(x1.clone())
        }
        None => {
            if yk.is_zero() {
                return Err(Error::NonInvertible(format!(
                    "y_{k} is zero, so x1 would be zero"
                )));
            }
            yk.kth_root(k as u32).ok_or_else(|| {
                Error::IrrationalLeadingRoot(format!(
                    "y_{k} = {yk} has no exact rational {k}-th root"
                ))
            })
        }
    }
}

/// Checks that `y` is explicitly known through `up_to - 1 + k`; recovering
/// `x_n` consumes forward values through `y_{n-1+k}`.
fn require_window(y: &Sequence, k: u64, up_to: u64) -> Result<()> {
    let required = up_to as i64 - 1 + k as i64;
    let end = y.end().unwrap_or(i64::MIN);
    if end < required {
        return Err(Error::InsufficientData(format!(
            "recovering x through {up_to} needs y through {required}, \
             but the stored window ends at {end}"
        )));
    }
    Ok(())
}

/// Recovers `x` from `y_n = B̂_{n,k}(x)`, exactly, for `n = 1 ..= up_to`:
/// `x_n = sum_j C(1/k, j) x1^{1-kj} B̂_{n-1, j}(w)` with `w_m = y_{m+k}`.
///
/// When `x1` is not supplied it is recovered as the k-th root of `y_k`
/// (positive branch for even `k`).
pub fn invert_bell_ordinary(
    y: &Sequence,
    k: u64,
    x1: Option<&Rational>,
    up_to: u64,
) -> Result<Sequence> {
    assert!(k >= 1 && up_to >= 1, "inversion needs k >= 1 and up_to >= 1");
    let x1 = resolve_leading(&y.get(k as i64), x1, k)?;
    require_window(y, k, up_to)?;
    let m_max = up_to - 1;
    let w = Sequence::new(
        1,
        (1..=m_max as i64).map(|m| y.get(m + k as i64)).collect(),
    );
    let layers = ord_bell_layers(&w, m_max, m_max);
    let inv_k = Rational::new(1, k as i64);
    let terms = (1..=up_to)
        .map(|n| {
            let mut sum = Rational::zero();
            for (j, layer) in layers.iter().enumerate().take(n as usize) {
                let cell = &layer[n as usize - 1];
                if cell.is_zero() {
                    continue;
                }
                let weight = binomial_rational(&inv_k, j as u64);
                if weight.is_zero() {
                    continue;
                }
                sum += weight * x1.pow(1 - (k * j as u64) as i64) * cell;
            }
            sum
        })
        .collect();
    Ok(Sequence::new(1, terms))
}

/// Recovers `x` from `y_n = B_{n,k}(x)`, exactly, for `n = 1 ..= up_to`:
/// `x_n = sum_j C(1/k, j) x1^{1-kj} j! n B_{n-1, j}(w)` with
/// `w_m = y_{m+k} / C(m+k, k)`.
pub fn invert_bell_exponential(
    y: &Sequence,
    k: u64,
    x1: Option<&Rational>,
    up_to: u64,
) -> Result<Sequence> {
    assert!(k >= 1 && up_to >= 1, "inversion needs k >= 1 and up_to >= 1");
    let x1 = resolve_leading(&y.get(k as i64), x1, k)?;
    require_window(y, k, up_to)?;
    let m_max = up_to - 1;
    let w = Sequence::new(
        1,
        (1..=m_max)
            .map(|m| {
                y.get((m + k) as i64) / Rational::from(binomial_int(m + k, k))
            })
            .collect(),
    );
    let layers = exp_bell_layers(&w, m_max, m_max);
    let inv_k = Rational::new(1, k as i64);
    let terms = (1..=up_to)
        .map(|n| {
            let mut sum = Rational::zero();
            for (j, layer) in layers.iter().enumerate().take(n as usize) {
                let cell = &layer[n as usize - 1];
                if cell.is_zero() {
                    continue;
                }
                let weight = binomial_rational(&inv_k, j as u64);
                if weight.is_zero() {
                    continue;
                }
                sum += weight
                    * x1.pow(1 - (k * j as u64) as i64)
                    * Rational::from(factorial(j as u64))
                    * Rational::from(n as i64)
                    * cell;
            }
            sum
        })
        .collect();
    Ok(Sequence::new(1, terms))
}

/// The nested ratio `B_{n,k1}(y'') / B_{n,k2}(y')` with `y'_m = B_{m,k1}(x)`
/// and `y''_m = B_{m,k2}(x)`. Its value does not depend on `x`:
/// it equals `(k1!)^(k2-1) / (k2!)^(k1-1)`.
pub fn nested_ratio_check(x: &Sequence, n: u64, k1: u64, k2: u64) -> Result<Rational> {
    let y_prime = Sequence::new(1, exp_bell_row(x, k1, n)[1..].to_vec());
    let y_second = Sequence::new(1, exp_bell_row(x, k2, n)[1..].to_vec());
    let numerator = exp_bell_row(&y_second, k1, n)[n as usize].clone();
    let denominator = exp_bell_row(&y_prime, k2, n)[n as usize].clone();
    if denominator.is_zero() {
        return Err(Error::Degenerate(format!(
            "B_({n},{k2}) of the nested argument vanishes"
        )));
    }
    Ok(numerator / denominator)
}

/// `P(S_k = n)` for a sum of `k` i.i.d. variables with step distribution `p`
/// on positive integers: the ordinary Bell value `B̂_{n,k}(p)`, evaluated
/// through cost-based algorithm selection.
pub fn compound_distribution(p: &Sequence, k: u64, n: u64) -> Result<Rational> {
    assert!(k >= 1, "compound distributions need k >= 1");
    if p.is_zero() {
        return Err(Error::InvalidDistribution(
            "probabilities sum to 0, not 1".into(),
        ));
    }
    if p.leading_index().unwrap_or(0) < 1 {
        return Err(Error::InvalidDistribution(
            "support must lie in the positive integers".into(),
        ));
    }
    if p.terms().iter().any(|t| t.is_negative()) {
        return Err(Error::InvalidDistribution(
            "probabilities must be non-negative".into(),
        ));
    }
    let total = p
        .terms()
        .iter()
        .fold(Rational::zero(), |acc, t| acc + t);
    if total != Rational::one() {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    if n < k {
        return Ok(Rational::zero());
    }
    let result = bell_with(p, n, k, Flavor::Ordinary, AlgorithmSelect::Auto, None)?;
    Ok(result.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(start: i64, terms: &[&str]) -> Sequence {
        Sequence::new(start, terms.iter().map(|t| t.parse().unwrap()).collect())
    }

    fn rat(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn power_via_bell_examples() {
        assert_eq!(conv_power_via_bell(&Sequence::delta(), 5, 10), Sequence::delta());
        let x = seq(0, &["1", "1"]);
        assert_eq!(conv_power_via_bell(&x, 2, 2), seq(0, &["1", "2", "1"]));
        let y = seq(1, &["2", "1"]);
        assert_eq!(conv_power_via_bell(&y, 3, 5).start(), 3);
    }

    #[test]
    fn power_via_bell_matches_repeated_squaring() {
        let cases = [
            seq(0, &["1", "1", "1/2"]),
            seq(1, &["2", "-1", "3", "1/3"]),
            seq(-2, &["1", "1/2", "0", "4"]),
            seq(3, &["-1/2", "5"]),
        ];
        for x in &cases {
            for k in 0..=5u64 {
                let up_to = x.start() * k as i64 + 9;
                assert_eq!(
                    conv_power_via_bell(x, k, up_to),
                    x.conv_power(k, up_to),
                    "x = {x:?}, k = {k}"
                );
            }
        }
    }

    #[test]
    fn root_of_explicit_series() {
        let x = seq(0, &["1", "2"]);
        let r = conv_root(&x, 2, 3).unwrap();
        assert_eq!(r.root, seq(0, &["1", "1", "-1/2", "1/2"]));
        assert!(r.sign_pair);
        assert_eq!(r.root.conv_power(2, 3), x.conv_power(1, 3));
    }

    #[test]
    fn root_round_trip() {
        let y = seq(0, &["1", "1/2", "-3", "2", "1/5"]);
        let x = y.conv_power(3, 12);
        let r = conv_root(&x, 3, 12).unwrap();
        assert!(!r.sign_pair);
        assert_eq!(r.root, y.conv_power(1, 12));
    }

    #[test]
    fn root_divisibility_condition() {
        let x = seq(2, &["1", "1"]);
        let err = conv_root(&x, 3, 10).unwrap_err();
        assert_eq!(err.code(), "NO_ROOT");
        assert!(conv_root(&x, 2, 10).is_ok());
    }

    #[test]
    fn root_with_even_support_and_square_lead() {
        let y = seq(2, &["3", "1", "-1/2"]);
        let x = y.conv_power(2, 13); // leading index 4, leading term 9
        let r = conv_root(&x, 2, 13).unwrap();
        assert_eq!(r.root.start(), 2);
        assert_eq!(r.root, y.conv_power(1, 13));
    }

    #[test]
    fn root_with_negative_support() {
        let y = seq(-1, &["1", "4", "-2"]);
        let x = y.conv_power(2, 8);
        let r = conv_root(&x, 2, 8).unwrap();
        assert_eq!(r.root.start(), -1);
        assert_eq!(r.root, y.conv_power(1, 8));
    }

    #[test]
    fn root_irrational_leading_term() {
        let x = seq(0, &["2", "1"]);
        assert_eq!(
            conv_root(&x, 2, 5).unwrap_err().code(),
            "IRRATIONAL_LEADING_ROOT"
        );
        let neg = seq(0, &["-4", "1"]);
        assert_eq!(
            conv_root(&neg, 2, 5).unwrap_err().code(),
            "IRRATIONAL_LEADING_ROOT"
        );
        // odd roots of negatives are fine
        let r = conv_root(&seq(0, &["-8", "1"]), 3, 4).unwrap();
        assert_eq!(r.root.get(0), rat("-2"));
    }

    #[test]
    fn root_of_zero_sequence() {
        assert_eq!(
            conv_root(&Sequence::zero(), 2, 5).unwrap_err().code(),
            "NO_ROOT"
        );
    }

    #[test]
    fn even_roots_come_in_sign_pairs() {
        let y = seq(0, &["1", "7", "-1/3", "2"]);
        let x = y.conv_power(4, 10);
        let r = conv_root(&x, 4, 10).unwrap();
        assert!(r.sign_pair);
        assert!(r.root.get(0) > Rational::zero());
        let negated = Sequence::new(
            r.root.start(),
            r.root.terms().iter().map(|t| -t).collect(),
        );
        assert_eq!(negated.conv_power(4, 10), x.conv_power(1, 10));
    }

    fn forward_ordinary(x: &Sequence, k: u64, through: u64) -> Sequence {
        Sequence::new(1, ord_bell_row(x, k, through)[1..].to_vec())
    }

    fn forward_exponential(x: &Sequence, k: u64, through: u64) -> Sequence {
        Sequence::new(1, exp_bell_row(x, k, through)[1..].to_vec())
    }

    #[test]
    fn ordinary_inversion_round_trip() {
        let x = seq(1, &["1", "1/2", "-3", "2", "1/5", "4", "-1", "2", "3", "-1/2"]);
        let up_to = 10u64;
        let y = forward_ordinary(&x, 3, up_to - 1 + 3);
        let recovered = invert_bell_ordinary(&y, 3, None, up_to).unwrap();
        assert_eq!(recovered, x.truncate(up_to as i64));
    }

    #[test]
    fn ordinary_inversion_k1_is_identity() {
        let y = seq(1, &["1", "4", "-2", "1/3", "5", "0", "7"]);
        let recovered = invert_bell_ordinary(&y, 1, None, 6).unwrap();
        assert_eq!(recovered, y.truncate(6));
    }

    #[test]
    fn exponential_inversion_round_trip() {
        let x = seq(1, &["1", "-2", "1/2", "3", "1/4", "1", "-1", "5"]);
        let up_to = 8u64;
        let y = forward_exponential(&x, 2, up_to - 1 + 2);
        let recovered = invert_bell_exponential(&y, 2, None, up_to).unwrap();
        assert_eq!(recovered, x.truncate(up_to as i64));
    }

    #[test]
    fn exponential_inversion_matches_ordinary_route() {
        use crate::bell::{exp_arg_to_ord, exp_value_to_ord};
        // the same data inverted through both flavors gives the same x
        let x = seq(1, &["1", "3", "-1/2", "2", "1", "-4", "1/3", "2", "5"]);
        let k = 3u64;
        let up_to = 6u64;
        let y_exp = forward_exponential(&x, k, up_to - 1 + k);
        let via_exp = invert_bell_exponential(&y_exp, k, None, up_to).unwrap();

        let y_ord = Sequence::new(
            1,
            (1..=(up_to - 1 + k) as i64)
                .map(|n| {
                    if (n as u64) < k {
                        Rational::zero()
                    } else {
                        exp_value_to_ord(&y_exp.get(n), n as u64, k)
                    }
                })
                .collect(),
        );
        let xhat = invert_bell_ordinary(&y_ord, k, None, up_to).unwrap();
        // xhat recovers x_n / n!
        assert_eq!(exp_arg_to_ord(&via_exp), xhat);
        assert_eq!(via_exp, x.truncate(up_to as i64));
    }

    #[test]
    fn inversion_recovers_leading_term_or_fails() {
        let x = seq(1, &["2", "1", "1"]);
        let y = forward_ordinary(&x, 2, 9);
        // y_2 = 4, recovered x1 = 2 (positive branch)
        let rec = invert_bell_ordinary(&y, 2, None, 3).unwrap();
        assert_eq!(rec.get(1), rat("2"));
        // the negative branch is reachable by supplying x1 = -2
        let neg = invert_bell_ordinary(&y, 2, Some(&rat("-2")), 3).unwrap();
        assert_eq!(neg.get(1), rat("-2"));

        // irrational leading root
        let x = seq(1, &["3", "1"]);
        let y = forward_ordinary(&x, 2, 6); // y_2 = 9? no: 3^2 = 9, fine — use k=3
        let _ = y;
        let y3 = forward_ordinary(&seq(1, &["2", "1"]), 3, 8); // y_3 = 8, cube root 2: fine
        assert!(invert_bell_ordinary(&y3, 3, None, 4).is_ok());
        let y3b = forward_ordinary(&seq(1, &["3", "1"]), 3, 8); // y_3 = 27 -> 3, fine too
        assert!(invert_bell_ordinary(&y3b, 3, None, 4).is_ok());
        let y2 = forward_ordinary(&seq(1, &["3", "1"]), 2, 6); // y_2 = 9 -> 3: also fine
        assert!(invert_bell_ordinary(&y2, 2, None, 3).is_ok());
    }

    #[test]
    fn inversion_error_paths() {
        // y_k = 0
        let y = seq(3, &["1", "2", "3"]);
        assert_eq!(
            invert_bell_ordinary(&y, 2, None, 2).unwrap_err().code(),
            "NON_INVERTIBLE"
        );
        // irrational x1
        let y = seq(2, &["2", "1", "1", "1", "1"]);
        assert_eq!(
            invert_bell_ordinary(&y, 2, None, 3).unwrap_err().code(),
            "IRRATIONAL_LEADING_ROOT"
        );
        // supplied x1 inconsistent with y_k
        let x = seq(1, &["1", "1", "1"]);
        let yv = forward_ordinary(&x, 2, 8);
        assert_eq!(
            invert_bell_ordinary(&yv, 2, Some(&rat("5")), 3)
                .unwrap_err()
                .code(),
            "DOMAIN_ERROR"
        );
        // window too short: recovering through 7 needs y through 8
        assert_eq!(
            invert_bell_ordinary(&yv, 2, None, 8).unwrap_err().code(),
            "INSUFFICIENT_DATA"
        );
    }

    #[test]
    fn nested_ratio_examples() {
        let x = seq(1, &["1", "2", "-1/2", "3", "1", "4", "-2", "1", "5", "1/3", "2", "1"]);
        assert_eq!(nested_ratio_check(&x, 8, 2, 3).unwrap(), rat("2/3"));
        assert_eq!(nested_ratio_check(&x, 9, 3, 3).unwrap(), Rational::one());
        assert_eq!(nested_ratio_check(&x, 4, 1, 2).unwrap(), Rational::one());

        // independent of the argument sequence
        let other = seq(1, &["2", "-1", "1/3", "1", "4", "1", "2", "3", "-5", "1", "1", "2"]);
        assert_eq!(
            nested_ratio_check(&other, 8, 2, 3).unwrap(),
            nested_ratio_check(&x, 8, 2, 3).unwrap()
        );

        // (3!)^3 / (4!)^2 = 216/576
        assert_eq!(nested_ratio_check(&x, 12, 3, 4).unwrap(), rat("3/8"));
    }

    #[test]
    fn nested_ratio_degenerate() {
        let x = seq(1, &["1", "1"]);
        // n < k1 k2 makes the denominator vanish
        assert_eq!(
            nested_ratio_check(&x, 5, 2, 3).unwrap_err().code(),
            "DEGENERATE"
        );
    }

    #[test]
    fn compound_distribution_examples() {
        let p = seq(1, &["1/2", "1/2"]);
        assert_eq!(compound_distribution(&p, 2, 3).unwrap(), rat("1/2"));
        assert_eq!(compound_distribution(&p, 1, 2).unwrap(), rat("1/2"));
        assert_eq!(compound_distribution(&p, 2, 1).unwrap(), Rational::zero());

        // mass sums to one over the reachable range
        let q = seq(1, &["1/6", "1/2", "1/3"]);
        for k in 1..=4u64 {
            let mut total = Rational::zero();
            for n in k..=3 * k {
                total += compound_distribution(&q, k, n).unwrap();
            }
            assert_eq!(total, Rational::one(), "k={k}");
        }
    }

    #[test]
    fn compound_distribution_validation() {
        let bad_sum = seq(1, &["1/2", "1/3"]);
        assert_eq!(
            compound_distribution(&bad_sum, 2, 3).unwrap_err().code(),
            "INVALID_DISTRIBUTION"
        );
        let negative = seq(1, &["3/2", "-1/2"]);
        assert_eq!(
            compound_distribution(&negative, 2, 3).unwrap_err().code(),
            "INVALID_DISTRIBUTION"
        );
        let at_zero = seq(0, &["1/2", "1/2"]);
        assert_eq!(
            compound_distribution(&at_zero, 2, 1).unwrap_err().code(),
            "INVALID_DISTRIBUTION"
        );
        assert_eq!(
            compound_distribution(&Sequence::zero(), 2, 3)
                .unwrap_err()
                .code(),
            "INVALID_DISTRIBUTION"
        );
    }
}
