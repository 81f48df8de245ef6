//! Right-hand sequences over exact rationals.
//!
//! A [`Sequence`] stores a finite window of rational terms beginning at an
//! integer `start`; every index outside the stored window reads as zero.
//! Operations that conceptually produce infinitely many terms (convolution,
//! convolution powers) take an explicit `up_to` bound and are exact for every
//! index they store.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::rational::Rational;

/// A right-hand sequence: zero below `start`, explicit terms from `start` on,
/// zero again above the stored window.
///
/// Construction canonicalizes so that the first stored term is nonzero (the
/// all-zero sequence is stored as an empty window). Trailing zero terms are
/// kept: they record how far the sequence is explicitly known.
#[derive(Clone, Serialize, Deserialize)]
#[serde(into = "SequenceDoc", try_from = "SequenceDoc")]
pub struct Sequence {
    start: i64,
    terms: Vec<Rational>,
}

/// JSON document form: `{"start": int, "terms": ["p/q", ...]}`.
#[derive(Serialize, Deserialize)]
struct SequenceDoc {
    start: i64,
    terms: Vec<Rational>,
}

impl From<Sequence> for SequenceDoc {
    fn from(s: Sequence) -> Self {
        SequenceDoc {
            start: s.start,
            terms: s.terms,
        }
    }
}

impl TryFrom<SequenceDoc> for Sequence {
    type Error = String;
    fn try_from(doc: SequenceDoc) -> Result<Self, String> {
        Ok(Sequence::new(doc.start, doc.terms))
    }
}

impl Sequence {
    /// Builds a sequence whose value at `start + i` is `terms[i]`, then
    /// canonicalizes leading zeros away.
    pub fn new(start: i64, terms: Vec<Rational>) -> Self {
        let mut seq = Sequence { start, terms };
        seq.canonicalize();
        seq
    }

    /// The all-zero sequence.
    pub fn zero() -> Self {
        Sequence {
            start: 0,
            terms: Vec::new(),
        }
    }

    /// The Kronecker delta: 1 at index 0.
    pub fn delta() -> Self {
        Sequence {
            start: 0,
            terms: vec![Rational::one()],
        }
    }

    /// Constant-one sequence on `start..=end`.
    pub fn ones(start: i64, end: i64) -> Self {
        let len = (end - start + 1).max(0) as usize;
        Sequence::new(start, vec![Rational::one(); len])
    }

    fn canonicalize(&mut self) {
        let leading = self.terms.iter().take_while(|t| t.is_zero()).count();
        if leading > 0 {
            self.terms.drain(..leading);
            self.start += leading as i64;
        }
        if self.terms.is_empty() {
            self.start = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// First index of the stored window (meaningless for the zero sequence).
    pub fn start(&self) -> i64 {
        self.start
    }

    /// Last index of the stored window, or `None` for the zero sequence.
    pub fn end(&self) -> Option<i64> {
        if self.terms.is_empty() {
            None
        } else {
            Some(self.start + self.terms.len() as i64 - 1)
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Rational] {
        &self.terms
    }

    /// Value at an arbitrary integer index; zero outside the stored window.
    pub fn get(&self, n: i64) -> Rational {
        if n < self.start {
            return Rational::zero();
        }
        match usize::try_from(n - self.start) {
            Ok(i) if i < self.terms.len() => self.terms[i].clone(),
            _ => Rational::zero(),
        }
    }

    /// Least index with a nonzero value, or `None` for the zero sequence.
    pub fn leading_index(&self) -> Option<i64> {
        if self.terms.is_empty() {
            None
        } else {
            // canonical form guarantees terms[0] != 0
            Some(self.start)
        }
    }

    /// Values at `from..=to` as a dense vector (zero-filled outside the window).
    pub fn window(&self, from: i64, to: i64) -> Vec<Rational> {
        if to < from {
            return Vec::new();
        }
        (from..=to).map(|i| self.get(i)).collect()
    }

    /// Time shift: the result has value `x[n - d]` at index `n`.
    pub fn shift(&self, d: i64) -> Sequence {
        Sequence {
            start: self.start + d,
            terms: self.terms.clone(),
        }
    }

    /// Restriction to indices `<= up_to`.
    pub fn truncate(&self, up_to: i64) -> Sequence {
        if self.is_zero() || up_to < self.start {
            return Sequence::zero();
        }
        let keep = (up_to - self.start + 1).min(self.terms.len() as i64) as usize;
        Sequence::new(self.start, self.terms[..keep].to_vec())
    }

    /// Convolution `(self * other)` with terms exact through index `up_to`.
    pub fn convolve(&self, other: &Sequence, up_to: i64) -> Sequence {
        if self.is_zero() || other.is_zero() {
            return Sequence::zero();
        }
        let start = self.start + other.start;
        if up_to < start {
            return Sequence::zero();
        }
        let len = (up_to - start + 1) as usize;
        let out = convolve_dense(&self.terms, &other.terms, len);
        Sequence::new(start, out)
    }

    /// Convolution power `self^{*k}` with terms exact through index `up_to`,
    /// computed by repeated squaring. `k = 0` yields the delta sequence.
    pub fn conv_power(&self, k: u64, up_to: i64) -> Sequence {
        if k == 0 {
            return Sequence::delta();
        }
        if self.is_zero() {
            return Sequence::zero();
        }
        let start = self.start * k as i64;
        if up_to < start {
            return Sequence::zero();
        }
        // Work on the dense coefficient vectors relative to each factor's
        // start; relative truncation is exact because relative indices are
        // non-negative.
        let rel_len = (up_to - start + 1) as usize;
        let mut result: Vec<Rational> = vec![Rational::one()];
        let mut base = self.terms.clone();
        base.truncate(rel_len);
        let mut e = k;
        loop {
            if e & 1 == 1 {
                result = convolve_dense(&result, &base, rel_len);
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = convolve_dense(&base, &base, rel_len);
        }
        Sequence::new(start, result)
    }
}

/// Dense convolution of coefficient vectors, truncated to `len` outputs.
fn convolve_dense(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() || len == 0 {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); len.min(a.len() + b.len() - 1)];
    for (i, ai) in a.iter().enumerate() {
        if i >= len || ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            let n = i + j;
            if n >= len {
                break;
            }
            if !bj.is_zero() {
                out[n] += ai * bj;
            }
        }
    }
    out
}

impl PartialEq for Sequence {
    /// Value equality: stored windows may differ by trailing zeros.
    fn eq(&self, other: &Self) -> bool {
        if self.is_zero() || other.is_zero() {
            return self.terms.iter().all(|t| t.is_zero())
                && other.terms.iter().all(|t| t.is_zero());
        }
        if self.start != other.start {
            return false;
        }
        let (short, long) = if self.terms.len() <= other.terms.len() {
            (&self.terms, &other.terms)
        } else {
            (&other.terms, &self.terms)
        };
        short == &long[..short.len()] && long[short.len()..].iter().all(|t| t.is_zero())
    }
}

impl Eq for Sequence {}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sequence(start={}, terms=[", self.start)?;
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{t}")?;
        }
        write!(f, "])")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(start: i64, terms: &[&str]) -> Sequence {
        Sequence::new(start, terms.iter().map(|t| t.parse().unwrap()).collect())
    }

    #[test]
    fn delta_is_convolution_identity() {
        let x = seq(2, &["3", "-1/2", "0", "7"]);
        assert_eq!(Sequence::delta().convolve(&x, 10), x);
        assert_eq!(x.convolve(&Sequence::delta(), 10), x);
    }

    #[test]
    fn convolve_matches_direct_sum() {
        let a = seq(0, &["1", "1"]);
        let b = seq(0, &["1", "1"]);
        assert_eq!(a.convolve(&b, 5), seq(0, &["1", "2", "1"]));
    }

    #[test]
    fn convolve_adds_supports() {
        let a = seq(2, &["1", "4"]);
        let b = seq(3, &["2"]);
        let c = a.convolve(&b, 10);
        assert_eq!(c.start(), 5);
        assert_eq!(c, seq(5, &["2", "8"]));
    }

    #[test]
    fn conv_power_basics() {
        let x = seq(0, &["1", "1"]);
        assert_eq!(x.conv_power(0, 5), Sequence::delta());
        assert_eq!(x.conv_power(1, 5), x);
        assert_eq!(x.conv_power(3, 3), seq(0, &["1", "3", "3", "1"]));
    }

    #[test]
    fn conv_power_support_is_k_times_start() {
        let x = seq(1, &["2", "5"]);
        assert_eq!(x.conv_power(4, 8).start(), 4);
        let y = seq(-2, &["1", "1"]);
        let p = y.conv_power(3, 0);
        assert_eq!(p.start(), -6);
        // (z^-2 (1+z))^3 expanded: indices -6..-3
        assert_eq!(p, seq(-6, &["1", "3", "3", "1"]));
    }

    #[test]
    fn conv_power_truncation_is_exact_for_negative_starts() {
        let y = seq(-2, &["1", "1", "1"]);
        let full = y.conv_power(4, 10);
        let tight = y.conv_power(4, -5);
        assert_eq!(tight, full.truncate(-5));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(Sequence::delta().shift(3).leading_index(), Some(3));
        let x = seq(1, &["1", "2"]);
        assert_eq!(x.shift(2).shift(-2), x);
        assert_eq!(x.shift(0), x);
    }

    #[test]
    fn leading_index_handles_stored_zeros() {
        let x = Sequence::new(1, vec![
            Rational::zero(),
            Rational::zero(),
            Rational::from(5),
        ]);
        assert_eq!(x.leading_index(), Some(3));
        assert_eq!(Sequence::delta().leading_index(), Some(0));
        assert_eq!(Sequence::zero().leading_index(), None);
    }

    #[test]
    fn equality_ignores_trailing_zeros() {
        let a = seq(1, &["1", "0", "0"]);
        let b = seq(1, &["1"]);
        assert_eq!(a, b);
        assert_ne!(a, seq(1, &["1", "0", "1"]));
        assert_eq!(Sequence::new(4, vec![Rational::zero()]), Sequence::zero());
    }

    #[test]
    fn get_outside_window_is_zero() {
        let x = seq(2, &["1", "5"]);
        assert!(x.get(1).is_zero());
        assert!(x.get(4).is_zero());
        assert_eq!(x.get(3), Rational::from(5));
    }

    #[test]
    fn json_round_trip() {
        let x = seq(1, &["1", "1/2", "0", "-2/3"]);
        let text = serde_json::to_string(&x).unwrap();
        assert_eq!(text, r#"{"start":1,"terms":["1","1/2","0","-2/3"]}"#);
        let back: Sequence = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);

        let zero: Sequence = serde_json::from_str(r#"{"start":0,"terms":[]}"#).unwrap();
        assert!(zero.is_zero());
    }

    #[test]
    fn json_rejects_decimals() {
        let res: Result<Sequence, _> = serde_json::from_str(r#"{"start":1,"terms":["1.5"]}"#);
        assert!(res.is_err());
    }
}
