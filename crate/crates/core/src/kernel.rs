//! Quadruples `(D, g, α, β)`, their point count `R`, memo keys and the
//! initial values of the recursion.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::error::ParseError;
use crate::lattice::{DivisorClass, SurfaceModel};
use crate::tangency::TangencyVector;

/// Exact curve count.
pub type Count = BigUint;

/// Class `D`, genus `g`, fixed tangencies `α` and moving tangencies `β`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Quadruple {
    pub class: DivisorClass,
    pub genus: i32,
    pub alpha: TangencyVector,
    pub beta: TangencyVector,
}

impl Quadruple {
    pub fn new(class: DivisorClass, genus: i32, alpha: TangencyVector, beta: TangencyVector) -> Self {
        Self {
            class,
            genus,
            alpha,
            beta,
        }
    }

    /// `R(D, g, β) = −D·(K + E) + ‖β‖ + g − 1`, the number of point
    /// conditions.
    pub fn r_value(&self) -> i64 {
        self.class.aux_degree() + self.beta.norm() as i64 + self.genus as i64 - 1
    }

    /// `Iα + Iβ = D·E`.
    pub fn tangency_balanced(&self) -> bool {
        let de = self.class.de();
        de >= 0 && (self.alpha.weight() + self.beta.weight()) as i64 == de
    }

    /// Numeric admissibility: balanced tangencies, `g >= 0`, `R >= 0`.
    pub fn feasible(&self) -> bool {
        self.tangency_balanced() && self.genus >= 0 && self.r_value() >= 0
    }

    pub fn canonical_key(&self, model: &SurfaceModel) -> CanonicalKey {
        CanonicalKey {
            a: model.a(),
            class: self.class.canonical(),
            genus: self.genus,
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
        }
    }
}

impl fmt::Debug for Quadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.class, self.genus, self.alpha, self.beta)
    }
}

/// `s` when `D = −s(K + E) = s(L − E_1)` with `s >= 1`.
pub fn aux_multiple(class: &DivisorClass) -> Option<u32> {
    let is_multiple = class.d >= 1 && class.d1() == class.d && class.exc[1..].iter().all(|&x| x == 0);
    is_multiple.then_some(class.d as u32)
}

/// Smooth rational (−1)-curve classes meeting `E` once: `D² = D·K = −1`,
/// `D·E = 1`.
pub fn is_minus_one_crossing(class: &DivisorClass) -> bool {
    class.self_intersection() == -1 && class.dk() == -1 && class.de() == 1
}

/// `s` when `D = s·D_0` for a (−1)-curve `D_0` meeting `E` once.
pub fn minus_one_multiple(class: &DivisorClass, s: u32) -> bool {
    class
        .divided(s as i32)
        .is_some_and(|d0| is_minus_one_crossing(&d0))
}

/// Which initial-value rule settled a quadruple.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaseRule {
    /// Negative genus or unbalanced tangencies.
    Infeasible,
    /// `s`-fold cover of a line of the pencil, totally ramified over both
    /// points of `E`: `(−s(K+E), 0, 0, 2e_s)`.
    PencilDoubleContact,
    NegativeDimension,
    /// `(sD_0, 0, 0, e_s)` for a (−1)-curve `D_0`.
    MinusOneCover,
    /// `(−s(K+E), 0, 0, e_{2s})`: covers of the two pencil members tangent
    /// to `E`.
    TangentPencilCover,
    /// `(−s(K+E), 0, e_s, e_s)`: cover of the pencil line through a fixed
    /// point.
    FixedPencilCover,
    /// `−D(K+E) = 1`, `g = 0`, all contacts fixed.
    AuxDegreeOne,
    /// `R = 0` and none of the above.
    RigidEmpty,
    /// `g` above the arithmetic genus of `D`.
    GenusTooLarge,
}

impl BaseRule {
    pub fn value(self) -> u32 {
        match self {
            BaseRule::PencilDoubleContact
            | BaseRule::MinusOneCover
            | BaseRule::FixedPencilCover
            | BaseRule::AuxDegreeOne => 1,
            BaseRule::TangentPencilCover => 2,
            BaseRule::Infeasible | BaseRule::NegativeDimension | BaseRule::RigidEmpty | BaseRule::GenusTooLarge => 0,
        }
    }
}

/// Classifies `q` as an initial value, or `None` when the recursion must
/// evaluate it. Rules are tried in a fixed order; the multiple-cover rules
/// run before the arithmetic-genus bound, which they violate.
pub fn base_rule(q: &Quadruple) -> Option<BaseRule> {
    if q.genus < 0 || !q.tangency_balanced() {
        return Some(BaseRule::Infeasible);
    }
    let aux = aux_multiple(&q.class);
    let single_beta = single_index(&q.beta);
    if let Some(s) = aux {
        if q.genus == 0 && q.alpha.is_zero() && q.beta == TangencyVector::unit(s, 2) {
            return Some(BaseRule::PencilDoubleContact);
        }
    }
    let r = q.r_value();
    if r < 0 {
        return Some(BaseRule::NegativeDimension);
    }
    if r == 0 {
        if q.genus != 0 {
            return Some(BaseRule::RigidEmpty);
        }
        if q.alpha.is_zero() {
            if let Some(s) = single_beta {
                if minus_one_multiple(&q.class, s) {
                    return Some(BaseRule::MinusOneCover);
                }
            }
        }
        if let Some(s) = aux {
            if q.alpha.is_zero() && q.beta == TangencyVector::unit(2 * s, 1) {
                return Some(BaseRule::TangentPencilCover);
            }
            let es = TangencyVector::unit(s, 1);
            if q.alpha == es && q.beta == es {
                return Some(BaseRule::FixedPencilCover);
            }
        }
        if q.class.aux_degree() == 1 && q.beta.is_zero() {
            return Some(BaseRule::AuxDegreeOne);
        }
        return Some(BaseRule::RigidEmpty);
    }
    if q.genus as i64 > q.class.arith_genus() {
        return Some(BaseRule::GenusTooLarge);
    }
    None
}

/// `s` when `β = e_s`.
fn single_index(v: &TangencyVector) -> Option<u32> {
    let mut it = v.iter();
    match (it.next(), it.next()) {
        (Some((k, 1)), None) => Some(k),
        _ => None,
    }
}

/// Initial value of `q`, or `None` when it is not terminal.
pub fn base_value(q: &Quadruple) -> Option<Count> {
    base_rule(q).map(|rule| BigUint::from(rule.value()))
}

/// Memo key: the quadruple with `d_2, …, d_{a+1}` sorted in decreasing
/// order. Points on the conic are in general position, so counts only
/// depend on this orbit representative.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    pub a: u32,
    pub class: DivisorClass,
    pub genus: i32,
    pub alpha: TangencyVector,
    pub beta: TangencyVector,
}

impl CanonicalKey {
    pub fn quadruple(&self) -> Quadruple {
        Quadruple::new(self.class.clone(), self.genus, self.alpha.clone(), self.beta.clone())
    }

    pub fn is_canonical(&self) -> bool {
        self.class == self.class.canonical()
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|{}|{}|{}", self.a, self.class, self.genus, self.alpha, self.beta)
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for CanonicalKey {
    type Err = ParseError;

    /// Parses `a|d;d_1,...|g|α|β` and rejects keys that are not in
    /// canonical form.
    fn from_str(s: &str) -> Result<Self, ParseError> {
        let fields: Vec<&str> = s.split('|').collect();
        if fields.len() != 5 {
            return Err(ParseError::new(0, format!("expected 5 '|'-separated fields, found {}", fields.len())));
        }
        let mut offsets = [0usize; 5];
        for i in 1..5 {
            offsets[i] = offsets[i - 1] + fields[i - 1].len() + 1;
        }
        let a = fields[0]
            .parse::<u32>()
            .ok()
            .filter(|_| fields[0].bytes().all(|b| b.is_ascii_digit()))
            .ok_or_else(|| ParseError::new(0, format!("bad surface parameter {:?}", fields[0])))?;
        let class: DivisorClass = fields[1].parse().map_err(|e: ParseError| e.offset(offsets[1]))?;
        if class.rank() != a as usize + 1 {
            return Err(ParseError::new(offsets[1], format!("class needs {} exceptional coordinates", a + 1)));
        }
        let genus = fields[2]
            .parse::<i32>()
            .map_err(|_| ParseError::new(offsets[2], format!("bad genus {:?}", fields[2])))?;
        let alpha = fields[3].parse().map_err(|e: ParseError| e.offset(offsets[3]))?;
        let beta = fields[4].parse().map_err(|e: ParseError| e.offset(offsets[4]))?;
        let key = CanonicalKey {
            a,
            class,
            genus,
            alpha,
            beta,
        };
        if !key.is_canonical() {
            return Err(ParseError::new(offsets[1], "coordinates d_2..d_{a+1} are not sorted in decreasing order"));
        }
        Ok(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s6() -> SurfaceModel {
        SurfaceModel::new(6).unwrap()
    }

    fn q(class: DivisorClass, g: i32, alpha: &str, beta: &str) -> Quadruple {
        Quadruple::new(class, g, alpha.parse().unwrap(), beta.parse().unwrap())
    }

    fn rule(qd: &Quadruple) -> Option<BaseRule> {
        base_rule(qd)
    }

    #[test]
    fn r_values() {
        let s = s6();
        let d = DivisorClass::new(6, vec![2; 7]);
        assert_eq!(q(d, 0, "0", "0").r_value(), 3);
        for k in 1..5 {
            assert_eq!(q(s.aux_class().scaled(k), 0, "0", &format!("{k}^2")).r_value(), 1);
        }
        assert_eq!(q(s.exceptional(2), 0, "0", "1^1").r_value(), 0);
    }

    #[test]
    fn feasibility() {
        let s = s6();
        assert!(q(s.line(), 0, "0", "1^2").feasible());
        assert!(!q(s.line(), 0, "0", "1^1").feasible());
        assert!(!q(s.exceptional(2), 0, "1^1", "0").feasible());
        assert!(!q(s.line(), -1, "0", "1^2").feasible());
    }

    #[test]
    fn minus_one_curves() {
        let s = s6();
        let l = s.line();
        assert!(is_minus_one_crossing(&s.exceptional(2)));
        assert!(is_minus_one_crossing(&(&(&l - &s.exceptional(1)) - &s.exceptional(2))));
        assert!(!is_minus_one_crossing(&(&(&l - &s.exceptional(2)) - &s.exceptional(3))));
        assert!(!is_minus_one_crossing(&s.exceptional(1)));
        assert!(minus_one_multiple(&s.exceptional(4).scaled(3), 3));
    }

    #[test]
    fn initial_values() {
        let s = s6();
        let aux = s.aux_class();
        let one = Some(BigUint::from(1u32));
        assert_eq!(base_value(&q(s.exceptional(2), 0, "0", "1^1")), one);
        assert_eq!(base_value(&q(aux.clone(), 0, "0", "2^1")), Some(BigUint::from(2u32)));
        assert_eq!(base_value(&q(s.line(), 0, "1^2", "0")), one);
        assert_eq!(base_value(&q(s.exceptional(2).scaled(2), 0, "0", "2^1")), one);
        assert_eq!(rule(&q(s.exceptional(2).scaled(2), 0, "1^1", "1^1")), Some(BaseRule::RigidEmpty));
        assert_eq!(rule(&q(aux.clone(), 0, "0", "1^2")), Some(BaseRule::PencilDoubleContact));
        assert_eq!(rule(&q(aux.scaled(3), 0, "3^1", "3^1")), Some(BaseRule::FixedPencilCover));
        assert_eq!(rule(&q(s.line(), 0, "0", "1^2")), None);
        assert_eq!(rule(&q(s.line(), 1, "0", "1^2")), Some(BaseRule::GenusTooLarge));
        assert_eq!(rule(&q(s.line(), 0, "0", "2^1")), None);
        assert_eq!(rule(&q(s.line(), 0, "2^1", "0")), Some(BaseRule::AuxDegreeOne));
    }

    #[test]
    fn key_round_trip() {
        let s = s6();
        let qd = q(DivisorClass::new(4, [1, 0, 2, 1, 0, 2, 0]), 1, "1^1", "2^1+1^3");
        let key = qd.canonical_key(&s);
        assert_eq!(key.to_string(), "6|4;1,2,2,1,0,0,0|1|1^1|2^1+1^3");
        assert_eq!(key.to_string().parse::<CanonicalKey>().unwrap(), key);
        assert!("6|4;1,0,2,1,0,2,0|1|1^1|2^1+1^3".parse::<CanonicalKey>().is_err());
        assert!("6|4;1,2,2,1,0,0|1|1^1|2^1".parse::<CanonicalKey>().is_err());
    }
}
