//! Brute-force reference for the degeneration terms.
//!
//! Enumerates ordered part lists over a plain bounding box of classes, with
//! no ordering constraint and no pruning beyond the degree, `d_1` and
//! contact totals, and divides by the number of orderings at the end.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::engine::Engine;
use crate::kernel::Quadruple;
use crate::lattice::{DivisorClass, SurfaceModel};
use crate::splitter::{carries_irreducible, enumerate_general, part_admissible, residual_class, SplitPart};
use crate::tangency::{binomial, factorial, vec_binom, vec_multinomial, TangencyVector};

fn box_classes(model: &SurfaceModel, max_d: i32) -> Vec<DivisorClass> {
    let rank = model.rank();
    let mut out = Vec::new();
    for d in 0..=max_d {
        let values: Vec<i32> = (-1..=d).collect();
        let mut idx = vec![0usize; rank];
        loop {
            let c = DivisorClass::new(d, idx.iter().map(|&i| values[i]));
            if c.de() >= 1 && carries_irreducible(&c) {
                out.push(c);
            }
            let mut pos = 0;
            while pos < rank {
                idx[pos] += 1;
                if idx[pos] < values.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == rank {
                break;
            }
        }
    }
    out
}

struct Ordered<'a> {
    q: &'a Quadruple,
    /// Every part that fits the quadruple on its own, with its unattached
    /// contacts and `D·E`.
    options: Vec<(SplitPart, TangencyVector, i64)>,
    chosen: Vec<SplitPart>,
    lists: Vec<Vec<SplitPart>>,
}

impl Ordered<'_> {
    fn options(q: &Quadruple, classes: &[DivisorClass], budget: i64) -> Vec<(SplitPart, TangencyVector, i64)> {
        let mut out = Vec::new();
        for class in classes {
            let de = class.de();
            for a_i in q.alpha.subvectors() {
                if a_i.weight() as i64 >= de {
                    continue;
                }
                for b_i in TangencyVector::of_weight((de - a_i.weight() as i64) as u64) {
                    for g_i in b_i.subvectors() {
                        if g_i.is_zero() || !b_i.checked_sub(&g_i).is_some_and(|r| r.le(&q.beta)) {
                            continue;
                        }
                        for genus in 0..=budget as i32 {
                            let quad = Quadruple::new(class.clone(), genus, a_i.clone(), b_i.clone());
                            let n = quad.r_value();
                            let part = SplitPart {
                                quad,
                                gamma: g_i.clone(),
                                n,
                            };
                            if (0..=budget).contains(&n) && part_admissible(&part) {
                                let rest = b_i.checked_sub(&g_i).unwrap();
                                out.push((part, rest, de));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn run(&mut self, rem: DivisorClass, alpha: TangencyVector, beta: TangencyVector, budget: i64) {
        if rem.is_zero() {
            // fixed contacts left over lie on E itself
            if beta.is_zero() && budget == 0 {
                self.lists.push(self.chosen.clone());
            }
            return;
        }
        if rem.d < 0 || rem.de() <= 0 || budget < 0 {
            return;
        }
        // every admissible part has 0 <= d_1 <= d; a conic coordinate below
        // 0 needs an exceptional curve, and those cannot repeat
        if rem.d1() < 0 || rem.d1() > rem.d || rem.exc[1..].iter().any(|&x| x < -1 || x > rem.d) {
            return;
        }
        let rem_de = rem.de();
        for i in 0..self.options.len() {
            let (part, rest, de) = &self.options[i];
            if part.n > budget || *de > rem_de || !part.quad.alpha.le(&alpha) || !rest.le(&beta) {
                continue;
            }
            let beta_after = beta.checked_sub(rest).unwrap();
            if !Self::valid_with(&self.chosen, part) {
                continue;
            }
            let part = part.clone();
            let after = &rem - &part.quad.class;
            let alpha_after = alpha.checked_sub(&part.quad.alpha).unwrap();
            let n = part.n;
            self.chosen.push(part);
            self.run(after, alpha_after, beta_after, budget - n);
            self.chosen.pop();
        }
    }

    /// Rigid parts without fixed contacts are distinct curves and cannot
    /// occur twice.
    fn valid_with(list: &[SplitPart], next: &SplitPart) -> bool {
        !(next.n == 0 && next.quad.alpha.is_zero() && list.iter().any(|o| o.quad == next.quad))
    }

    fn ordered_weight(&self, k: u32, list: &[SplitPart]) -> BigUint {
        let n = self.q.r_value();
        let alphas: Vec<&TangencyVector> = list.iter().map(|p| &p.quad.alpha).collect();
        let mut num = vec_multinomial(&self.q.alpha, &alphas) * factorial((n - 1) as u64) * binomial(k as u64 + 3, 3);
        let mut den = BigUint::one();
        for p in list {
            den *= factorial(p.n as u64);
            if !p.is_fixed_pencil_cover() {
                num *= vec_binom(&p.quad.beta, &p.gamma) * p.gamma.power();
            }
        }
        num / den
    }
}

/// Sum of the degeneration terms of `q` (weights times counts) computed by
/// the ordered brute force, using `engine` for the counts of the parts.
pub fn ordered_total(engine: &mut Engine, q: &Quadruple) -> BigRational {
    let model = *engine.model();
    let n = q.r_value();
    let mut total = BigRational::zero();
    if n <= 0 {
        return total;
    }
    for k in 0..=(q.class.d - 2).max(-1) {
        let k = k as u32;
        let target = residual_class(&model, &q.class, k);
        let classes = box_classes(&model, target.d.max(0));
        let mut search = Ordered {
            q,
            options: Ordered::options(q, &classes, n - 1),
            chosen: Vec::new(),
            lists: Vec::new(),
        };
        search.run(target, q.alpha.clone(), q.beta.clone(), n - 1);
        for list in std::mem::take(&mut search.lists) {
            let mut value = BigInt::from(search.ordered_weight(k, &list));
            for p in &list {
                if !p.is_fixed_pencil_cover() {
                    value *= BigInt::from(engine.count(&p.quad));
                }
            }
            total += BigRational::new(value, BigInt::from(factorial(list.len() as u64)));
        }
    }
    total
}

/// The same sum from the canonical splitter.
pub fn splitter_total(engine: &mut Engine, q: &Quadruple) -> BigRational {
    let model = *engine.model();
    let mut total = BigUint::zero();
    if q.r_value() <= 0 {
        return BigRational::zero();
    }
    for sp in enumerate_general(&model, q) {
        let mut value = sp.weight.clone();
        for f in sp.factors() {
            value *= engine.count(f);
        }
        total += value;
    }
    BigRational::from_integer(total.into())
}
