//! Exhaustive quadruple batteries.

use crate::kernel::Quadruple;
use crate::lattice::{DivisorClass, SurfaceModel};
use crate::tangency::TangencyVector;

/// Canonical classes with `0 <= d <= max_d` and every exceptional
/// coordinate in `-bound..=bound`.
pub fn canonical_classes(model: &SurfaceModel, max_d: i32, bound: i32) -> Vec<DivisorClass> {
    fn conic(pos: usize, len: usize, hi: i32, lo: i32, cur: &mut Vec<i32>, out: &mut Vec<Vec<i32>>) {
        if pos == len {
            out.push(cur.clone());
            return;
        }
        for v in (lo..=hi).rev() {
            cur.push(v);
            conic(pos + 1, len, v, lo, cur, out);
            cur.pop();
        }
    }
    let mut rests = Vec::new();
    conic(0, model.a() as usize, bound, -bound, &mut Vec::new(), &mut rests);
    let mut out = Vec::new();
    for d in 0..=max_d {
        for d1 in -bound..=bound {
            for rest in &rests {
                out.push(DivisorClass::new(d, std::iter::once(d1).chain(rest.iter().copied())));
            }
        }
    }
    out
}

/// Genus-`g` quadruples on `classes` with balanced contacts and
/// `0 <= R <= max_r`.
pub fn quadruples(classes: &[DivisorClass], genus: i32, max_r: i64) -> Vec<Quadruple> {
    let mut out = Vec::new();
    for c in classes {
        let de = c.de();
        if de < 0 {
            continue;
        }
        let max_norm = max_r + 1 - c.aux_degree() - genus as i64;
        if max_norm < 0 {
            continue;
        }
        for wb in 0..=de as u64 {
            for beta in TangencyVector::of_weight(wb) {
                if beta.norm() as i64 > max_norm {
                    continue;
                }
                for alpha in TangencyVector::of_weight(de as u64 - wb) {
                    let q = Quadruple::new(c.clone(), genus, alpha, beta.clone());
                    let r = q.r_value();
                    if (0..=max_r).contains(&r) {
                        out.push(q);
                    }
                }
            }
        }
    }
    out
}
