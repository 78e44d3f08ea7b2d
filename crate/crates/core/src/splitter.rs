//! Degeneration terms of the recursion.
//!
//! When one of the point conditions is specialized onto `E`, a curve either
//! acquires a fixed contact point (first sum of the recursion, handled by the
//! engine) or breaks into `E`, `k` tangent members of the pencil
//! `|−(K+E)|`, and further components `C^(i)` each attached to `E` at the
//! contacts recorded by `γ^(i)`. This module enumerates the second kind of
//! term, once per unordered configuration, together with its integer weight.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::kernel::{aux_multiple, base_rule, BaseRule, Quadruple};
use crate::lattice::{DivisorClass, SurfaceModel};
use crate::tangency::{binomial, factorial, vec_binom, vec_multinomial, TangencyVector};

/// One component `C^(i)` of a degenerate curve.
#[derive(Clone, PartialEq, Eq)]
pub struct SplitPart {
    pub quad: Quadruple,
    /// Contacts of this component that are smoothed against `E`.
    pub gamma: TangencyVector,
    /// `R(D^(i), g^(i), β^(i))`, the number of point conditions it carries.
    pub n: i64,
}

impl SplitPart {
    fn new(quad: Quadruple, gamma: TangencyVector) -> Self {
        let n = quad.r_value();
        Self { quad, gamma, n }
    }

    /// Covers of a pencil line through a fixed point of `E` carry neither a
    /// contact factor nor a recursive count.
    pub fn is_fixed_pencil_cover(&self) -> bool {
        base_rule(&self.quad) == Some(BaseRule::FixedPencilCover)
    }

    fn sort_key(&self) -> (&Quadruple, &TangencyVector) {
        (&self.quad, &self.gamma)
    }
}

impl Ord for SplitPart {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for SplitPart {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SplitPart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} γ={} n={}", self.quad, self.gamma, self.n)
    }
}

/// A degeneration term: `k` tangent pencil members and the components,
/// stored in non-increasing order.
#[derive(Clone)]
pub struct Splitting {
    pub k: u32,
    pub parts: Vec<SplitPart>,
    pub weight: BigUint,
}

impl Splitting {
    /// Quadruples whose counts multiply the weight.
    pub fn factors(&self) -> impl Iterator<Item = &Quadruple> {
        self.parts
            .iter()
            .filter(|p| !p.is_fixed_pencil_cover())
            .map(|p| &p.quad)
    }
}

impl fmt::Display for Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} weight={} parts=[", self.k, self.weight)?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}|{}|{}|{} γ={}", p.quad.class, p.quad.genus, p.quad.alpha, p.quad.beta, p.gamma)?;
        }
        f.write_str("]")
    }
}

/// `D − E + k(K + E)`.
pub fn residual_class(model: &SurfaceModel, class: &DivisorClass, k: u32) -> DivisorClass {
    let shifted = model.aux_class().scaled(k as i32);
    &(class - &model.conic_class()) - &shifted
}

/// Classes that can carry an irreducible curve meeting `E`, bounded by the
/// residual class they have to fit in.
///
/// A class qualifies when it is a (−1)-curve meeting `E`, a multiple of the
/// pencil class `L − E_1`, or has `d >= 1`, nonnegative arithmetic genus and
/// nonnegative intersection with the rigid curves of the surface.
fn candidate_classes(model: &SurfaceModel, target: &DivisorClass) -> Vec<DivisorClass> {
    let rank = model.rank();
    let mut out = Vec::new();
    for j in 1..rank {
        let mut exc = vec![0; rank];
        exc[j] = -1;
        out.push(DivisorClass::new(0, exc));
    }
    // upper bounds for each exceptional coordinate of a positive-degree part
    let mut cur = vec![0i32; rank];
    for d in 1..=target.d {
        let max1 = d.min(target.exc[0]);
        if max1 < 0 {
            continue;
        }
        let bounds: Vec<i32> = (1..rank).map(|j| d.min(target.exc[j] + 1)).collect();
        if bounds.iter().any(|&b| b < 0) {
            continue;
        }
        fill_classes(d, 0, max1, &bounds, &mut cur, &mut out);
    }
    out.retain(|c| c.de() >= 1 && carries_irreducible(c));
    out.sort_by(|x, y| y.cmp(x));
    out
}

fn fill_classes(d: i32, pos: usize, max1: i32, bounds: &[i32], cur: &mut Vec<i32>, out: &mut Vec<DivisorClass>) {
    if pos == cur.len() {
        out.push(DivisorClass::new(d, cur.iter().copied()));
        return;
    }
    let hi = if pos == 0 { max1 } else { bounds[pos - 1] };
    for v in 0..=hi {
        cur[pos] = v;
        fill_classes(d, pos + 1, max1, bounds, cur, out);
    }
    cur[pos] = 0;
}

/// Numerical test for classes of reduced irreducible curves (and the
/// pencil multiples that occur as covers).
pub fn carries_irreducible(c: &DivisorClass) -> bool {
    if c.d == 0 {
        // only exceptional curves over the conic points meet E
        return c.d1() == 0 && c.exc[1..].iter().filter(|&&x| x != 0).count() == 1 && c.exc[1..].iter().all(|&x| x == 0 || x == -1);
    }
    if aux_multiple(c).is_some() {
        return true;
    }
    if c.d < 0 || c.exc.iter().any(|&x| x < 0) {
        return false;
    }
    if c.self_intersection() == -1 && c.dk() == -1 {
        return true;
    }
    if c.arith_genus() < 0 {
        return false;
    }
    let (d, d1) = (c.d, c.d1());
    let conic = &c.exc[1..];
    // lines through the outside point and a conic point
    if conic.iter().any(|&x| d1 + x > d) {
        return false;
    }
    // lines through two conic points
    let mut sorted: Vec<i32> = conic.to_vec();
    sorted.sort_unstable_by(|x, y| y.cmp(x));
    if sorted.len() >= 2 && sorted[0] + sorted[1] > d {
        return false;
    }
    // conics through the outside point and four conic points
    if sorted.len() >= 4 && d1 + sorted[..4].iter().sum::<i32>() > 2 * d {
        return false;
    }
    true
}

/// Conditions on a single component, independent of the rest of the
/// configuration: it is not a tangent pencil member (those are counted by
/// `k`) and its count is not forced to vanish by an initial-value rule.
pub fn part_admissible(part: &SplitPart) -> bool {
    let q = &part.quad;
    if let Some(s) = aux_multiple(&q.class) {
        if q.genus == 0 && q.alpha.is_zero() && q.beta == TangencyVector::unit(2 * s, 1) {
            return false;
        }
    }
    !matches!(base_rule(q), Some(r) if r.value() == 0)
}

/// Shared state of one enumeration.
struct Search {
    classes: Vec<DivisorClass>,
    /// Genus-zero mode: every part is rational and attached at one point.
    genus0: bool,
    chosen: Vec<SplitPart>,
    found: Vec<Vec<SplitPart>>,
}

impl Search {
    fn run(&mut self, rem: DivisorClass, alpha_rem: TangencyVector, beta_rem: TangencyVector, budget: i64, start: usize) {
        if rem.is_zero() {
            if beta_rem.is_zero() && budget == 0 {
                self.emit();
            }
            return;
        }
        for ci in start..self.classes.len() {
            let class = self.classes[ci].clone();
            let after = &rem - &class;
            if !remainder_possible(&after) {
                continue;
            }
            let de = class.de() as u64;
            let aux = class.aux_degree();
            for alpha in alpha_rem.subvectors_up_to_weight(de - 1) {
                let left = de - alpha.weight();
                let alpha_after = alpha_rem.checked_sub(&alpha).unwrap();
                for delta in beta_rem.subvectors_up_to_weight(left - 1) {
                    let beta_after = beta_rem.checked_sub(&delta).unwrap();
                    let min_rest = after.aux_degree() + beta_after.norm() as i64;
                    let gammas = if self.genus0 {
                        vec![TangencyVector::unit((left - delta.weight()) as u32, 1)]
                    } else {
                        TangencyVector::of_weight(left - delta.weight())
                    };
                    for gamma in gammas {
                        let beta = &delta + &gamma;
                        let base_n = aux + beta.norm() as i64 - 1;
                        let mut genus = 0i32;
                        loop {
                            if self.genus0 && genus > 0 {
                                break;
                            }
                            let n = base_n + genus as i64;
                            if n > budget - min_rest {
                                break;
                            }
                            if n >= 0 {
                                let quad = Quadruple::new(class.clone(), genus, alpha.clone(), beta.clone());
                                let part = SplitPart::new(quad, gamma.clone());
                                if self.admissible(&part) {
                                    self.chosen.push(part);
                                    self.run(after.clone(), alpha_after.clone(), beta_after.clone(), budget - n, ci);
                                    self.chosen.pop();
                                }
                            }
                            genus += 1;
                        }
                    }
                }
            }
        }
    }

    fn admissible(&self, part: &SplitPart) -> bool {
        // parts come in non-increasing order; a rigid part with no fixed
        // contacts may not repeat
        if let Some(last) = self.chosen.last() {
            if part > last {
                return false;
            }
            if part.quad == last.quad && part.n == 0 && part.quad.alpha.is_zero() {
                return false;
            }
        }
        part_admissible(part)
    }

    fn emit(&mut self) {
        self.found.push(self.chosen.clone());
    }
}

/// All non-increasing part lists summing to `target`, drawing fixed
/// contacts from `alpha`, covering exactly `beta` with unattached contacts
/// and carrying `budget` point conditions in total.
fn split_residual(
    model: &SurfaceModel,
    target: &DivisorClass,
    alpha: &TangencyVector,
    beta: &TangencyVector,
    budget: i64,
    genus0: bool,
) -> Vec<Vec<SplitPart>> {
    if !remainder_possible(target) || budget < target.aux_degree() + beta.norm() as i64 {
        return Vec::new();
    }
    let mut classes = candidate_classes(model, target);
    if genus0 {
        classes.retain(|c| aux_multiple(c).is_none());
    }
    let mut search = Search {
        classes,
        genus0,
        chosen: Vec::new(),
        found: Vec::new(),
    };
    search.run(target.clone(), alpha.clone(), beta.clone(), budget, 0);
    search.found
}

/// Cheap necessary conditions for a residual class to split into further
/// admissible parts.
fn remainder_possible(after: &DivisorClass) -> bool {
    if after.d < 0 || after.d1() < 0 || after.d1() > after.d {
        return false;
    }
    if after.exc[1..].iter().any(|&x| x < -1 || x > after.d) {
        return false;
    }
    after.is_zero() || after.de() >= 1
}

/// Enumerates every degeneration term of the general recursion for `q`.
pub fn enumerate_general(model: &SurfaceModel, q: &Quadruple) -> Vec<Splitting> {
    let n = q.r_value();
    assert!(n > 0, "degeneration terms need R > 0");
    let mut out = Vec::new();
    for k in 0..=(q.class.d - 2).max(-1) {
        let k = k as u32;
        let target = residual_class(model, &q.class, k);
        let found = split_residual(model, &target, &q.alpha, &q.beta, n - 1, false);
        out.extend(found.into_iter().map(|parts| Splitting {
            k,
            weight: general_weight(q, n, k, &parts),
            parts,
        }));
    }
    for sp in &out {
        debug_check(model, q, sp);
    }
    out
}

fn debug_check(model: &SurfaceModel, q: &Quadruple, sp: &Splitting) {
    let mut sum = DivisorClass::zero(model.rank());
    let mut beta_sum = q.beta.clone();
    let mut beta_parts = TangencyVector::zero();
    let mut n_sum = 0;
    for p in &sp.parts {
        sum = &sum + &p.quad.class;
        beta_sum += &p.gamma;
        beta_parts += &p.quad.beta;
        n_sum += p.n;
        assert!(p.gamma.le(&p.quad.beta) && !p.gamma.is_zero());
        assert!(p.quad.class.d < q.class.d, "degree must drop");
    }
    assert_eq!(sum, residual_class(model, &q.class, sp.k), "class sum");
    assert_eq!(beta_sum, beta_parts, "moving tangency balance");
    assert_eq!(n_sum, q.r_value() - 1, "point budget");
}

/// Runs of equal parts in a sorted part list.
fn multiplicities<T: PartialEq>(parts: &[T]) -> Vec<u64> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < parts.len() {
        let mut j = i + 1;
        while j < parts.len() && parts[j] == parts[i] {
            j += 1;
        }
        out.push((j - i) as u64);
        i = j;
    }
    out
}

/// Weight of a general degeneration term, excluding the recursive counts.
///
/// Product of the fixed-point multinomial, the point distribution
/// `(n−1)!/Π n_i!`, `C(k+3, 3)` for the tangent pencil members and
/// `C(β^(i), γ^(i)) I^{γ^(i)}` per attached component, divided by the
/// order of the stabilizer of the ordered part list.
pub fn general_weight(q: &Quadruple, n: i64, k: u32, parts: &[SplitPart]) -> BigUint {
    let alphas: Vec<&TangencyVector> = parts.iter().map(|p| &p.quad.alpha).collect();
    let mut num = vec_multinomial(&q.alpha, &alphas) * factorial((n - 1) as u64) * binomial(k as u64 + 3, 3);
    let mut den = BigUint::one();
    for p in parts {
        den *= factorial(p.n as u64);
        if !p.is_fixed_pencil_cover() {
            num *= vec_binom(&p.quad.beta, &p.gamma) * p.gamma.power();
        }
    }
    for m in multiplicities(parts) {
        den *= factorial(m);
    }
    assert!((&num % &den).is_zero(), "non-integral splitting weight");
    num / den
}

/// One term of the genus-zero recursion.
#[derive(Clone)]
pub struct Genus0Splitting {
    pub k: u32,
    pub alpha0: TangencyVector,
    pub beta0: TangencyVector,
    pub parts: Vec<SplitPart>,
    pub weight: BigRational,
}

impl fmt::Display for Genus0Splitting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} α0={} β0={} weight={} parts=[", self.k, self.alpha0, self.beta0, self.weight)?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}|{}|{} γ={}", p.quad.class, p.quad.alpha, p.quad.beta, p.gamma)?;
        }
        f.write_str("]")
    }
}

/// Enumerates the terms of the genus-zero recursion for `q`.
///
/// Covers of pencil lines never appear as parts here: `α^(0)` records the
/// pencil lines through fixed points of `E` and `β^(0)` the pencil lines
/// through one of the point conditions that keep one moving contact. Their
/// contributions are closed-form factors of the weight.
pub fn enumerate_genus0(model: &SurfaceModel, q: &Quadruple) -> Vec<Genus0Splitting> {
    assert_eq!(q.genus, 0, "genus-zero terms need g = 0");
    let n = q.r_value();
    assert!(n > 0, "degeneration terms need R > 0");
    let mut out = Vec::new();
    let max_shift = q.class.d as i64 - 2;
    for alpha0 in q.alpha.subvectors_up_to_weight(max_shift.max(0) as u64) {
        let alpha_rest = q.alpha.checked_sub(&alpha0).unwrap();
        for beta0 in q.beta.subvectors_up_to_weight(max_shift.max(0) as u64 - alpha0.weight()) {
            let beta_rest = q.beta.checked_sub(&beta0).unwrap();
            let lines = alpha0.weight() + beta0.weight();
            let budget = n - 1 - beta0.norm() as i64;
            if max_shift < lines as i64 || budget < 0 {
                continue;
            }
            for k in 0..=(max_shift as u64 - lines) {
                let target = residual_class(model, &q.class, (k + lines) as u32);
                for parts in split_residual(model, &target, &alpha_rest, &beta_rest, budget, true) {
                    let weight = genus0_weight(q, n, k as u32, &alpha0, &beta0, &parts);
                    out.push(Genus0Splitting {
                        k: k as u32,
                        alpha0: alpha0.clone(),
                        beta0: beta0.clone(),
                        parts,
                        weight,
                    });
                }
            }
        }
    }
    out
}

/// Weight of a genus-zero term, excluding the recursive counts:
/// `2^{‖β0‖} I^{β0} / β0! · C(k+3, 3) · C(α; α0, α1, …) · (n−1)!/Π n_i! ·
/// Π C(β_i, γ_i) I^{γ_i}`, divided by the stabilizer order of the part list.
/// The `‖β0‖` points left after the components take theirs go one to each
/// pencil line of `β0`.
pub fn genus0_weight(
    q: &Quadruple,
    n: i64,
    k: u32,
    alpha0: &TangencyVector,
    beta0: &TangencyVector,
    parts: &[SplitPart],
) -> BigRational {
    let mut alphas: Vec<&TangencyVector> = vec![alpha0];
    alphas.extend(parts.iter().map(|p| &p.quad.alpha));
    let mut num = BigUint::from(2u32).pow(beta0.norm() as u32)
        * beta0.power()
        * binomial(k as u64 + 3, 3)
        * vec_multinomial(&q.alpha, &alphas)
        * factorial((n - 1) as u64);
    let mut den = beta0.factorial();
    for p in parts {
        den *= factorial(p.n as u64);
        num *= vec_binom(&p.quad.beta, &p.gamma) * p.gamma.power();
    }
    for m in multiplicities(parts) {
        den *= factorial(m);
    }
    BigRational::new(num.into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s6() -> SurfaceModel {
        SurfaceModel::new(6).unwrap()
    }

    fn quad(class: &str, g: i32, alpha: &str, beta: &str) -> Quadruple {
        Quadruple::new(class.parse().unwrap(), g, alpha.parse().unwrap(), beta.parse().unwrap())
    }

    #[test]
    fn line_has_no_terms() {
        let q = quad("1;0,0,0,0,0,0,0", 0, "0", "1^2");
        assert!(enumerate_general(&s6(), &q).is_empty());
        assert!(enumerate_genus0(&s6(), &q).is_empty());
    }

    #[test]
    fn conic_through_fixed_points() {
        let q = quad("2;0,0,0,0,0,0,0", 0, "1^4", "0");
        let general = enumerate_general(&s6(), &q);
        assert_eq!(general.len(), 1);
        let sp = &general[0];
        assert_eq!(sp.k, 0);
        assert_eq!(sp.weight, BigUint::one());
        assert_eq!(sp.parts.len(), 6);
        let mut classes: Vec<DivisorClass> = sp.parts.iter().map(|p| p.quad.class.clone()).collect();
        classes.sort();
        let mut expected: Vec<DivisorClass> = (2..=7).map(|j| s6().exceptional(j)).collect();
        expected.sort();
        assert_eq!(classes, expected);
        for p in &sp.parts {
            assert_eq!(p.quad.beta.to_string(), "1^1");
            assert_eq!(p.gamma.to_string(), "1^1");
        }

        let genus0 = enumerate_genus0(&s6(), &q);
        assert_eq!(genus0.len(), 1);
        assert!(genus0[0].alpha0.is_zero() && genus0[0].beta0.is_zero());
        assert_eq!(genus0[0].weight, BigRational::one());
    }

    #[test]
    fn moving_contact_cannot_be_matched() {
        let q = quad("2;0,0,0,0,0,0,0", 0, "1^3", "1^1");
        assert!(enumerate_general(&s6(), &q).is_empty());
    }

    #[test]
    fn pencil_weight() {
        let q = quad("3;0,0,0,0,0,0,0", 0, "0", "1^6");
        let n = q.r_value();
        let parts: Vec<SplitPart> = Vec::new();
        let base = general_weight(&q, n, 0, &parts);
        assert_eq!(general_weight(&q, n, 1, &parts), base * BigUint::from(4u32));
    }

    #[test]
    fn fixed_pencil_cover_carries_no_contact_factor() {
        let part = SplitPart::new(quad("2;2,0,0,0,0,0,0", 0, "2^1", "2^1"), "2^1".parse().unwrap());
        assert!(part.is_fixed_pencil_cover());
        let q = quad("4;2,0,0,0,0,0,0", 0, "2^1", "1^4");
        let w = general_weight(&q, q.r_value(), 0, std::slice::from_ref(&part));
        let n = q.r_value() as u64;
        assert_eq!(w, factorial(n - 1) / factorial(part.n as u64));
    }

    #[test]
    fn terms_respect_the_budget() {
        let model = s6();
        let q = quad("4;1,1,1,0,0,0,0", 1, "1^1", "1^3+2^1");
        let n = q.r_value();
        for sp in enumerate_general(&model, &q) {
            let mut sum = DivisorClass::zero(model.rank());
            for p in &sp.parts {
                sum = &sum + &p.quad.class;
                assert!(p.quad.class.d >= 0 && p.quad.class.d <= q.class.d - 2);
                assert!(p.gamma.norm() >= 1 && p.gamma.le(&p.quad.beta));
            }
            assert_eq!(sum, residual_class(&model, &q.class, sp.k));
            assert_eq!(sp.parts.iter().map(|p| p.n).sum::<i64>(), n - 1);
        }
    }

    #[test]
    fn beta0_factor() {
        let q = quad("3;0,0,0,0,0,0,0", 0, "0", "2^1+1^2");
        let n = q.r_value();
        let w = genus0_weight(&q, n, 0, &TangencyVector::zero(), &"2^1".parse().unwrap(), &[]);
        let plain = genus0_weight(&q, n, 0, &TangencyVector::zero(), &TangencyVector::zero(), &[]);
        assert_eq!(w, plain * BigRational::from_integer(4.into()));
    }
}
