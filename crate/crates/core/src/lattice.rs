//! Picard lattice of the plane blown up at `a` points of a smooth conic and
//! one further point off it.
//!
//! Classes are stored as `D = dL − d_1 E_1 − ⋯ − d_{a+1} E_{a+1}`: `E_1` is
//! the exceptional curve of the point off the conic, `E_2, …, E_{a+1}` those
//! of the points on it. The strict transform of the conic is
//! `E = 2L − E_2 − ⋯ − E_{a+1}`.

use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{LatticeError, ParseError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SurfaceModel {
    a: u32,
}

impl SurfaceModel {
    pub fn new(a: u32) -> Result<Self, LatticeError> {
        if a < 5 {
            return Err(LatticeError::TooFewPoints(a));
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    /// Number of exceptional coordinates, `a + 1`.
    pub fn rank(&self) -> usize {
        self.a as usize + 1
    }

    /// Only `a = 5` and `a = 6` are checked against published values.
    pub fn is_validated(&self) -> bool {
        matches!(self.a, 5 | 6)
    }

    pub fn line(&self) -> DivisorClass {
        DivisorClass::new(1, vec![0; self.rank()])
    }

    /// `E_i` for `1 <= i <= a + 1`.
    pub fn exceptional(&self, i: usize) -> DivisorClass {
        assert!((1..=self.rank()).contains(&i), "no exceptional curve E_{i}");
        let mut exc = vec![0; self.rank()];
        exc[i - 1] = -1;
        DivisorClass::new(0, exc)
    }

    /// `K = −3L + E_1 + ⋯ + E_{a+1}`.
    pub fn canonical_class(&self) -> DivisorClass {
        DivisorClass::new(-3, vec![-1; self.rank()])
    }

    /// The relative divisor `E = 2L − E_2 − ⋯ − E_{a+1}`.
    pub fn conic_class(&self) -> DivisorClass {
        let mut exc = vec![1; self.rank()];
        exc[0] = 0;
        DivisorClass::new(2, exc)
    }

    /// `−(K + E) = L − E_1`, the pencil of lines through the point off the
    /// conic.
    pub fn aux_class(&self) -> DivisorClass {
        let mut exc = vec![0; self.rank()];
        exc[0] = 1;
        DivisorClass::new(1, exc)
    }

    /// Checks that `class` has `a + 1` exceptional coordinates.
    pub fn check(&self, class: &DivisorClass) -> Result<(), LatticeError> {
        if class.rank() != self.rank() {
            return Err(LatticeError::RankMismatch {
                a: self.a,
                expected: self.rank(),
                found: class.rank(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorClass {
    pub d: i32,
    pub exc: SmallVec<[i32; 8]>,
}

impl DivisorClass {
    pub fn new(d: i32, exc: impl IntoIterator<Item = i32>) -> Self {
        Self {
            d,
            exc: exc.into_iter().collect(),
        }
    }

    pub fn zero(rank: usize) -> Self {
        Self::new(0, std::iter::repeat_n(0, rank))
    }

    pub fn rank(&self) -> usize {
        self.exc.len()
    }

    /// `d_1`, the multiplicity at the point off the conic.
    pub fn d1(&self) -> i32 {
        self.exc[0]
    }

    pub fn is_zero(&self) -> bool {
        self.d == 0 && self.exc.iter().all(|&x| x == 0)
    }

    /// Intersection pairing; rejects classes of different rank.
    pub fn intersect(&self, other: &Self) -> Result<i64, LatticeError> {
        if self.rank() != other.rank() {
            return Err(LatticeError::Incompatible(self.rank(), other.rank()));
        }
        Ok(self.dot(other))
    }

    /// Intersection pairing on classes already known to share a lattice.
    pub fn dot(&self, other: &Self) -> i64 {
        debug_assert_eq!(self.rank(), other.rank());
        self.exc
            .iter()
            .zip(&other.exc)
            .fold(self.d as i64 * other.d as i64, |acc, (&x, &y)| {
                acc - x as i64 * y as i64
            })
    }

    pub fn self_intersection(&self) -> i64 {
        self.dot(self)
    }

    /// `D·E = 2d − d_2 − ⋯ − d_{a+1}`.
    pub fn de(&self) -> i64 {
        2 * self.d as i64 - self.exc[1..].iter().map(|&x| x as i64).sum::<i64>()
    }

    /// `D·K = −3d + Σ d_i`.
    pub fn dk(&self) -> i64 {
        -3 * self.d as i64 + self.exc.iter().map(|&x| x as i64).sum::<i64>()
    }

    /// `−D·(K + E) = d − d_1`.
    pub fn aux_degree(&self) -> i64 {
        self.d as i64 - self.d1() as i64
    }

    /// Arithmetic genus `(D² + D·K)/2 + 1`.
    pub fn arith_genus(&self) -> i64 {
        let s = self.self_intersection() + self.dk();
        debug_assert!(s % 2 == 0);
        s / 2 + 1
    }

    pub fn scaled(&self, s: i32) -> Self {
        Self::new(self.d * s, self.exc.iter().map(|&x| x * s))
    }

    /// `self / s` when every coordinate is divisible by `s`.
    pub fn divided(&self, s: i32) -> Option<Self> {
        if s == 0 || self.d % s != 0 || self.exc.iter().any(|&x| x % s != 0) {
            return None;
        }
        Some(Self::new(self.d / s, self.exc.iter().map(|&x| x / s)))
    }

    /// Exceptional coordinates `d_2, …, d_{a+1}` sorted in decreasing order.
    pub fn sorted_conic_coords(&self) -> SmallVec<[i32; 8]> {
        let mut rest: SmallVec<[i32; 8]> = self.exc[1..].iter().copied().collect();
        rest.sort_unstable_by(|x, y| y.cmp(x));
        rest
    }

    /// Representative of the orbit under permutations of the points on the
    /// conic.
    pub fn canonical(&self) -> Self {
        let mut exc: SmallVec<[i32; 8]> = SmallVec::with_capacity(self.rank());
        exc.push(self.d1());
        exc.extend(self.sorted_conic_coords());
        Self { d: self.d, exc }
    }
}

impl std::ops::Add for &DivisorClass {
    type Output = DivisorClass;

    fn add(self, rhs: &DivisorClass) -> DivisorClass {
        assert_eq!(self.rank(), rhs.rank());
        DivisorClass::new(
            self.d + rhs.d,
            self.exc.iter().zip(&rhs.exc).map(|(x, y)| x + y),
        )
    }
}

impl std::ops::Sub for &DivisorClass {
    type Output = DivisorClass;

    fn sub(self, rhs: &DivisorClass) -> DivisorClass {
        assert_eq!(self.rank(), rhs.rank());
        DivisorClass::new(
            self.d - rhs.d,
            self.exc.iter().zip(&rhs.exc).map(|(x, y)| x - y),
        )
    }
}

impl fmt::Display for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.d)?;
        for (i, x) in self.exc.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for DivisorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str, at: usize) -> Result<i32, ParseError> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(ParseError::new(at, format!("expected integer, found {s:?}")));
    }
    s.parse()
        .map_err(|_| ParseError::new(at, format!("integer {s:?} out of range")))
}

impl FromStr for DivisorClass {
    type Err = ParseError;

    /// `d;d_1,d_2,...,d_{a+1}`.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let semi = s
            .find(';')
            .ok_or_else(|| ParseError::new(s.len(), "expected ';' after the degree"))?;
        let d = parse_int(&s[..semi], 0)?;
        let mut exc = SmallVec::new();
        let mut pos = semi + 1;
        for field in s[semi + 1..].split(',') {
            exc.push(parse_int(field, pos)?);
            pos += field.len() + 1;
        }
        Ok(Self { d, exc })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(a: u32) -> SurfaceModel {
        SurfaceModel::new(a).unwrap()
    }

    /// `dL − m(E_1 + ⋯ + E_{a+1})`.
    fn uniform(s: &SurfaceModel, d: i32, m: i32) -> DivisorClass {
        DivisorClass::new(d, vec![m; s.rank()])
    }

    #[test]
    fn distinguished_classes() {
        for a in [5, 6, 7, 9] {
            let s = model(a);
            let (l, e, k, aux) = (s.line(), s.conic_class(), s.canonical_class(), s.aux_class());
            assert_eq!(l.dot(&l), 1);
            assert_eq!(k.dot(&l), -3);
            assert_eq!(k.self_intersection(), 9 - (a as i64 + 1));
            assert_eq!(e.self_intersection(), 4 - a as i64);
            assert_eq!(e.dot(&s.exceptional(1)), 0);
            assert_eq!(aux.self_intersection(), 0);
            assert_eq!(aux.dot(&e), 2);
            assert_eq!(aux.dot(&s.exceptional(1)), 1);
            // K + E = −(L − E_1)
            assert_eq!(&k + &e, aux.scaled(-1));
            // E is a smooth rational curve
            assert_eq!(e.self_intersection() + e.dot(&k), -2);
        }
        assert_eq!(model(6).conic_class().self_intersection(), -2);
    }

    #[test]
    fn numeric_invariants() {
        let (s5, s6) = (model(5), model(6));
        assert_eq!(uniform(&s6, 6, 2).de(), 0);
        assert_eq!(uniform(&s5, 6, 2).de(), 2);
        assert_eq!(s6.exceptional(2).de(), 1);
        assert_eq!(s6.line().arith_genus(), 0);
        assert_eq!(uniform(&s6, 6, 2).arith_genus(), 3);
        assert_eq!(uniform(&s5, 6, 2).arith_genus(), 4);
        let d = uniform(&s6, 6, 2);
        assert_eq!(d.de(), d.dot(&s6.conic_class()));
    }

    #[test]
    fn rank_mismatch() {
        let (s5, s6) = (model(5), model(6));
        assert!(s5.line().intersect(&s6.line()).is_err());
        assert!(s5.check(&s6.line()).is_err());
        assert!(SurfaceModel::new(4).is_err());
    }

    #[test]
    fn text_format() {
        let c: DivisorClass = "0;0,-1,0,0,0,0,0".parse().unwrap();
        assert_eq!(c, model(6).exceptional(2));
        assert_eq!(c.to_string(), "0;0,-1,0,0,0,0,0");
        for bad in ["", "1", "1;", "1;2,,3", "x;1", "1;2;3", "1;+2"] {
            assert!(bad.parse::<DivisorClass>().is_err(), "{bad:?}");
        }
        assert_eq!("1;2,x".parse::<DivisorClass>().unwrap_err().position, 4);
    }
}
