//! Finite-support multi-indices over the positive integers.
//!
//! A [`TangencyVector`] records, for each contact order `k >= 1`, how many
//! contact points of that order a curve has with the relative divisor. The
//! same type carries fixed tangencies, moving tangencies and the allocations
//! made when a degenerate curve is smoothed.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use smallvec::SmallVec;

use crate::error::ParseError;

/// Sparse multi-index with strictly increasing indices and nonzero
/// multiplicities. Structural equality is mathematical equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct TangencyVector {
    entries: SmallVec<[(u32, u32); 4]>,
}

impl TangencyVector {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `mult * e_index`.
    pub fn unit(index: u32, mult: u32) -> Self {
        assert!(index >= 1, "tangency indices start at 1");
        let mut v = Self::zero();
        if mult > 0 {
            v.entries.push((index, mult));
        }
        v
    }

    /// Builds a vector from `(index, multiplicity)` pairs in any order.
    /// Repeated indices are summed and zero multiplicities dropped.
    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Self {
        let mut v = Self::zero();
        for (k, m) in pairs {
            v.add_at(k, m);
        }
        v
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Multiplicity of `e_index`.
    pub fn get(&self, index: u32) -> u32 {
        match self.entries.binary_search_by_key(&index, |&(k, _)| k) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0,
        }
    }

    /// Nonzero `(index, multiplicity)` pairs in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.entries.iter().copied()
    }

    pub fn max_index(&self) -> u32 {
        self.entries.last().map_or(0, |&(k, _)| k)
    }

    /// Adds `mult * e_index` in place.
    pub fn add_at(&mut self, index: u32, mult: u32) {
        assert!(index >= 1, "tangency indices start at 1");
        if mult == 0 {
            return;
        }
        match self.entries.binary_search_by_key(&index, |&(k, _)| k) {
            Ok(pos) => self.entries[pos].1 += mult,
            Err(pos) => self.entries.insert(pos, (index, mult)),
        }
    }

    /// Removes `mult * e_index`; returns `false` (and leaves `self`
    /// untouched) when that would go negative.
    pub fn sub_at(&mut self, index: u32, mult: u32) -> bool {
        if mult == 0 {
            return true;
        }
        match self.entries.binary_search_by_key(&index, |&(k, _)| k) {
            Ok(pos) if self.entries[pos].1 >= mult => {
                self.entries[pos].1 -= mult;
                if self.entries[pos].1 == 0 {
                    self.entries.remove(pos);
                }
                true
            }
            _ => false,
        }
    }

    /// `‖v‖`, the number of contact points.
    pub fn norm(&self) -> u64 {
        self.entries.iter().map(|&(_, m)| m as u64).sum()
    }

    /// `Iv`, the total contact order.
    pub fn weight(&self) -> u64 {
        self.entries.iter().map(|&(k, m)| k as u64 * m as u64).sum()
    }

    /// `I^v = Π k^{v_k}`.
    pub fn power(&self) -> BigUint {
        self.entries
            .iter()
            .fold(BigUint::one(), |acc, &(k, m)| acc * BigUint::from(k).pow(m))
    }

    /// `v! = Π v_k!`.
    pub fn factorial(&self) -> BigUint {
        self.entries
            .iter()
            .fold(BigUint::one(), |acc, &(_, m)| acc * factorial(m as u64))
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &Self) -> bool {
        self.entries.iter().all(|&(k, m)| other.get(k) >= m)
    }

    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut out = self.clone();
        for &(k, m) in &other.entries {
            if !out.sub_at(k, m) {
                return None;
            }
        }
        Some(out)
    }

    /// Every `γ` with `0 <= γ <= self`, exactly `Π (v_k + 1)` of them.
    pub fn subvectors(&self) -> Vec<TangencyVector> {
        let mut out = vec![TangencyVector::zero()];
        for &(k, m) in &self.entries {
            let mut next = Vec::with_capacity(out.len() * (m as usize + 1));
            for base in &out {
                for c in 0..=m {
                    let mut v = base.clone();
                    if c > 0 {
                        v.entries.push((k, c));
                    }
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }

    /// Subvectors whose weight does not exceed `max_weight`.
    pub fn subvectors_up_to_weight(&self, max_weight: u64) -> Vec<TangencyVector> {
        let mut out = vec![(TangencyVector::zero(), 0u64)];
        for &(k, m) in &self.entries {
            let mut next = Vec::new();
            for (base, w) in &out {
                for c in 0..=m {
                    let w2 = w + k as u64 * c as u64;
                    if w2 > max_weight {
                        break;
                    }
                    let mut v = base.clone();
                    if c > 0 {
                        v.entries.push((k, c));
                    }
                    next.push((v, w2));
                }
            }
            out = next;
        }
        out.into_iter().map(|(v, _)| v).collect()
    }

    /// All vectors of weight exactly `weight` (integer partitions of
    /// `weight`, read as tangency vectors).
    pub fn of_weight(weight: u64) -> Vec<TangencyVector> {
        fn rec(rest: u64, max_part: u64, cur: &mut Vec<(u32, u32)>, out: &mut Vec<TangencyVector>) {
            if rest == 0 {
                out.push(TangencyVector::from_pairs(cur.iter().copied()));
                return;
            }
            for part in (1..=max_part.min(rest)).rev() {
                for mult in 1..=rest / part {
                    cur.push((part as u32, mult as u32));
                    rec(rest - part * mult, part - 1, cur, out);
                    cur.pop();
                }
            }
        }
        let mut out = Vec::new();
        rec(weight, weight, &mut Vec::new(), &mut out);
        out
    }
}

impl std::ops::Add for &TangencyVector {
    type Output = TangencyVector;

    fn add(self, rhs: &TangencyVector) -> TangencyVector {
        let mut out = self.clone();
        for &(k, m) in &rhs.entries {
            out.add_at(k, m);
        }
        out
    }
}

impl std::ops::AddAssign<&TangencyVector> for TangencyVector {
    fn add_assign(&mut self, rhs: &TangencyVector) {
        for &(k, m) in &rhs.entries {
            self.add_at(k, m);
        }
    }
}

/// Total order used for canonical part ordering: compare as dense vectors
/// indexed from `e_1` upward.
impl Ord for TangencyVector {
    fn cmp(&self, other: &Self) -> Ordering {
        let top = self.max_index().max(other.max_index());
        for k in 1..=top {
            match self.get(k).cmp(&other.get(k)) {
                Ordering::Equal => {}
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for TangencyVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub fn factorial(n: u64) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, i| acc * i)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `α! / (α^(1)! ⋯ α^(m)! (α − Σ α^(i))!)`, or 0 when the parts do not fit
/// inside `α`.
pub fn vec_multinomial(alpha: &TangencyVector, parts: &[&TangencyVector]) -> BigUint {
    let mut rest = alpha.clone();
    for p in parts {
        match rest.checked_sub(p) {
            Some(r) => rest = r,
            None => return BigUint::from(0u32),
        }
    }
    let denom = parts
        .iter()
        .fold(rest.factorial(), |acc, p| acc * p.factorial());
    alpha.factorial() / denom
}

/// `Π_k (β_k choose γ_k)`; 0 unless `γ <= β`.
pub fn vec_binom(beta: &TangencyVector, gamma: &TangencyVector) -> BigUint {
    if !gamma.le(beta) {
        return BigUint::from(0u32);
    }
    gamma
        .iter()
        .fold(BigUint::one(), |acc, (k, m)| acc * binomial(beta.get(k) as u64, m as u64))
}

impl fmt::Display for TangencyVector {
    /// `k^m` terms in decreasing index order joined by `+`; zero is `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, &(k, m)) in self.entries.iter().rev().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            write!(f, "{k}^{m}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TangencyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_positive(s: &str, start: usize, what: &str) -> Result<u32, ParseError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::new(start, format!("expected {what} (positive integer), found {s:?}")));
    }
    match s.parse::<u32>() {
        Ok(0) => Err(ParseError::new(start, format!("{what} must be positive"))),
        Ok(v) => Ok(v),
        Err(_) => Err(ParseError::new(start, format!("{what} out of range"))),
    }
}

impl FromStr for TangencyVector {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        if s == "0" {
            return Ok(Self::zero());
        }
        if s.is_empty() {
            return Err(ParseError::new(0, "empty tangency vector (write 0 for zero)"));
        }
        let mut v = Self::zero();
        let mut pos = 0;
        for term in s.split('+') {
            let caret = term
                .find('^')
                .ok_or_else(|| ParseError::new(pos, format!("expected k^m, found {term:?}")))?;
            let k = parse_positive(&term[..caret], pos, "index")?;
            let m = parse_positive(&term[caret + 1..], pos + caret + 1, "multiplicity")?;
            if v.get(k) != 0 {
                return Err(ParseError::new(pos, format!("index {k} repeated")));
            }
            v.add_at(k, m);
            pos += term.len() + 1;
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tv(s: &str) -> TangencyVector {
        s.parse().unwrap()
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn scalar_functionals() {
        let z = TangencyVector::zero();
        let v = tv("3^1+1^2");
        assert_eq!((z.norm(), z.weight(), z.power(), z.factorial()), (0, 0, big(1), big(1)));
        assert_eq!((v.norm(), v.weight(), v.power(), v.factorial()), (3, 5, big(3), big(2)));
        assert_eq!(tv("5^1").norm(), 1);
        assert_eq!(tv("4^2").weight(), 8);
        assert_eq!(tv("3^2").power(), big(9));
        assert_eq!(tv("2^3").factorial(), big(6));
    }

    #[test]
    fn multinomials() {
        let e1 = tv("1^1");
        let z = TangencyVector::zero();
        assert_eq!(vec_multinomial(&tv("1^2"), &[&e1, &e1]), big(2));
        assert_eq!(vec_multinomial(&tv("1^4"), &[&z, &z, &z, &z, &z, &z]), big(1));
        assert_eq!(vec_multinomial(&tv("3^1+1^2"), &[&tv("3^1+1^1")]), big(2));
        assert_eq!(vec_multinomial(&tv("1^1"), &[&e1, &e1]), big(0));
        assert_eq!(vec_binom(&tv("3^1+1^2"), &tv("3^1+1^1")), big(2));
        assert_eq!(vec_binom(&tv("4^1"), &tv("4^1")), big(1));
        assert_eq!(vec_binom(&tv("1^1"), &tv("2^1")), big(0));
    }

    #[test]
    fn subvector_enumeration() {
        assert_eq!(TangencyVector::zero().subvectors(), vec![TangencyVector::zero()]);
        let mut got = tv("2^1+1^1").subvectors();
        got.sort();
        let mut want = vec![tv("0"), tv("1^1"), tv("2^1"), tv("2^1+1^1")];
        want.sort();
        assert_eq!(got, want);
        assert_eq!(tv("1^2").subvectors().len(), 3);
    }

    #[test]
    fn partitions_of_weight() {
        assert_eq!(TangencyVector::of_weight(0), vec![TangencyVector::zero()]);
        assert_eq!(TangencyVector::of_weight(4).len(), 5);
        assert_eq!(TangencyVector::of_weight(12).len(), 77);
        assert!(TangencyVector::of_weight(7).iter().all(|v| v.weight() == 7));
    }

    #[test]
    fn text_format() {
        assert_eq!(tv("1^4").to_string(), "1^4");
        assert_eq!(tv("1^3+2^1").to_string(), "2^1+1^3");
        assert_eq!(TangencyVector::zero().to_string(), "0");
        for bad in ["", "1", "1^", "^2", "0^1", "1^0", "1^2+", "1^2+1^1", "a^1", "1^2 ", "-1^1", "00"] {
            assert!(bad.parse::<TangencyVector>().is_err(), "{bad:?} accepted");
        }
        let err = "2^1+x^3".parse::<TangencyVector>().unwrap_err();
        assert_eq!(err.position, 4);
    }
}
