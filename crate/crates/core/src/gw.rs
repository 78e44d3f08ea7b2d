//! Gromov–Witten invariants of the del Pezzo surfaces of degree 3 and 2.
//!
//! `P²_6` is handled by the surface with `a = 5`, where `E` is a (−1)-curve
//! and relative counts with transversal moving contacts are the absolute
//! invariants. `P²_7` is reached from `a = 6`, where `E` is a (−2)-curve:
//!
//! `GW_g(P²_7, D) = Σ_i C(D·E + 2i, i) N(D − iE, g, 0, (D·E + 2i)e_1)`.

use num_bigint::BigUint;
use num_traits::Zero;

use crate::engine::Engine;
use crate::kernel::{Count, Quadruple};
use crate::lattice::{DivisorClass, SurfaceModel};
use crate::tangency::{binomial, TangencyVector};

/// Target surface of a Gromov–Witten query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    P6,
    P7,
}

impl Target {
    /// Number of blown-up points.
    pub fn points(self) -> usize {
        match self {
            Target::P6 => 6,
            Target::P7 => 7,
        }
    }

    /// The surface `P²_{a,1}` whose counts compute this target.
    pub fn model(self) -> SurfaceModel {
        SurfaceModel::new(self.points() as u32 - 1).unwrap()
    }
}

/// `GW_g(P²_6, D)` using `engine`, which must be set up for `a = 5`.
pub fn gw_p6_with(engine: &mut Engine, class: &DivisorClass, g: i32) -> Count {
    assert_eq!(engine.model().a(), 5, "P²_6 invariants need the a = 5 surface");
    assert_eq!(class.rank(), 6, "class on P²_6 needs 6 exceptional coordinates");
    let de = class.de();
    if de < 0 || g < 0 {
        return BigUint::zero();
    }
    let q = Quadruple::new(class.clone(), g, TangencyVector::zero(), TangencyVector::unit(1, de as u32));
    engine.count(&q)
}

/// Terms `(i, C(D·E + 2i, i), N(D − iE, …))` of the conversion to `P²_7`,
/// for `0 <= i <= d/2`.
pub fn gw_p7_terms(engine: &mut Engine, class: &DivisorClass, g: i32) -> Vec<(u32, BigUint, Count)> {
    assert_eq!(engine.model().a(), 6, "P²_7 invariants need the a = 6 surface");
    assert_eq!(class.rank(), 7, "class on P²_7 needs 7 exceptional coordinates");
    let model = *engine.model();
    let de = class.de();
    if de < 0 || g < 0 {
        return Vec::new();
    }
    let points = -class.dk() + g as i64 - 1;
    let mut out = Vec::new();
    for i in 0..=(class.d.max(0) / 2) {
        let shifted = &(class - &model.conic_class().scaled(i));
        let contacts = de as u64 + 2 * i as u64;
        let q = Quadruple::new(shifted.clone(), g, TangencyVector::zero(), TangencyVector::unit(1, contacts as u32));
        assert_eq!(q.r_value(), points, "point count must not depend on i");
        debug_assert_eq!(shifted.de() as u64, contacts);
        let weight = binomial(contacts, i as u64);
        let value = engine.count(&q);
        out.push((i as u32, weight, value));
    }
    out
}

/// `GW_g(P²_7, D)` using `engine`, which must be set up for `a = 6`.
pub fn gw_p7_with(engine: &mut Engine, class: &DivisorClass, g: i32) -> Count {
    gw_p7_terms(engine, class, g)
        .into_iter()
        .map(|(_, w, v)| w * v)
        .sum()
}

pub fn gw_p6(class: &DivisorClass, g: i32) -> Count {
    gw_p6_with(&mut Engine::new(Target::P6.model()), class, g)
}

pub fn gw_p7(class: &DivisorClass, g: i32) -> Count {
    gw_p7_with(&mut Engine::new(Target::P7.model()), class, g)
}

/// `D` on `P²_6` read as a class on `P²_7` with coefficient 0 at `E_1`.
pub fn lift_to_p7(class: &DivisorClass) -> DivisorClass {
    assert_eq!(class.rank(), 6);
    DivisorClass::new(class.d, std::iter::once(0).chain(class.exc.iter().copied()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualPath {
    pub lhs: Count,
    pub rhs: Count,
    pub equal: bool,
}

/// Computes `GW_g(P²_6, D)` directly and through `P²_7`.
pub fn dual_path_check_with(p6: &mut Engine, p7: &mut Engine, class: &DivisorClass, g: i32) -> DualPath {
    let lhs = gw_p6_with(p6, class, g);
    let rhs = gw_p7_with(p7, &lift_to_p7(class), g);
    let equal = lhs == rhs;
    DualPath { lhs, rhs, equal }
}

pub fn dual_path_check(class: &DivisorClass, g: i32) -> DualPath {
    dual_path_check_with(
        &mut Engine::new(Target::P6.model()),
        &mut Engine::new(Target::P7.model()),
        class,
        g,
    )
}

/// Genera `0..=p_a(D)` for which invariants are tabulated.
pub fn genus_range(class: &DivisorClass) -> std::ops::RangeInclusive<i32> {
    0..=class.arith_genus().max(-1) as i32
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> DivisorClass {
        s.parse().unwrap()
    }

    #[test]
    fn lines_and_exceptional_curves() {
        assert_eq!(gw_p7(&c("1;0,0,0,0,0,0,0"), 0), BigUint::from(1u32));
        assert_eq!(gw_p7(&c("0;-1,0,0,0,0,0,0"), 0), BigUint::from(1u32));
        assert_eq!(gw_p7(&c("0;0,0,0,-1,0,0,0"), 0), BigUint::from(1u32));
        assert_eq!(gw_p6(&c("1;0,0,0,0,0,0"), 0), BigUint::from(1u32));
        assert_eq!(gw_p6(&c("1;1,1,0,0,0,0"), 0), BigUint::from(1u32));
    }

    #[test]
    fn lift() {
        assert_eq!(lift_to_p7(&c("6;2,2,2,2,2,2")), c("6;0,2,2,2,2,2,2"));
    }
}
