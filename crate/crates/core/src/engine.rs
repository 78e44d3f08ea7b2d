//! Memoized evaluation of the relative counts `N(D, g, α, β)`.
//!
//! Evaluation runs over an explicit work stack: a quadruple is expanded into
//! its terms, the counts it depends on are pushed above it, and it is summed
//! once they are all known. Every dependency is strictly smaller in
//! `(degree, ‖β‖)`, so a dependency that is still being expanded means a bug
//! and aborts.

use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::kernel::{base_value, CanonicalKey, Count, Quadruple};
use crate::lattice::SurfaceModel;
use crate::splitter::{enumerate_general, enumerate_genus0};
use crate::tangency::TangencyVector;

/// Where a stored value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Base,
    Recursion,
    CacheFile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    pub entries: usize,
    pub hits: u64,
    pub misses: u64,
    pub max_degree: i32,
}

/// Canonical key to count. A stored value is never replaced.
#[derive(Debug, Clone)]
pub struct MemoStore {
    a: u32,
    map: HashMap<CanonicalKey, (Count, Origin)>,
    hits: u64,
    misses: u64,
    max_degree: i32,
}

impl MemoStore {
    pub fn new(model: &SurfaceModel) -> Self {
        Self {
            a: model.a(),
            map: HashMap::new(),
            hits: 0,
            misses: 0,
            max_degree: 0,
        }
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    fn lookup(&mut self, key: &CanonicalKey) -> Option<Count> {
        match self.map.get(key) {
            Some((v, _)) => {
                self.hits += 1;
                Some(v.clone())
            }
            None => {
                self.misses += 1;
                None
            }
        }
    }

    pub fn get(&self, key: &CanonicalKey) -> Option<&Count> {
        self.map.get(key).map(|(v, _)| v)
    }

    pub fn origin(&self, key: &CanonicalKey) -> Option<Origin> {
        self.map.get(key).map(|&(_, o)| o)
    }

    pub fn contains(&self, key: &CanonicalKey) -> bool {
        self.map.contains_key(key)
    }

    /// Stores `value` under `key`. Re-inserting an equal value is a no-op;
    /// a different value is a consistency violation and is returned as an
    /// error holding the value already stored.
    pub fn insert(&mut self, key: CanonicalKey, value: Count, origin: Origin) -> Result<(), Count> {
        assert_eq!(key.a, self.a, "key for a different surface");
        if let Some((old, _)) = self.map.get(&key) {
            return if *old == value { Ok(()) } else { Err(old.clone()) };
        }
        self.max_degree = self.max_degree.max(key.class.d);
        self.map.insert(key, (value, origin));
        Ok(())
    }

    pub fn stats(&self) -> Stats {
        Stats {
            entries: self.map.len(),
            hits: self.hits,
            misses: self.misses,
            max_degree: self.max_degree,
        }
    }

    /// Entries in key order.
    pub fn entries(&self) -> Vec<(&CanonicalKey, &Count)> {
        let mut v: Vec<_> = self.map.iter().map(|(k, (c, _))| (k, c)).collect();
        v.sort_by(|x, y| x.0.cmp(y.0));
        v
    }
}

/// Which recursion expands non-terminal quadruples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formula {
    /// All genera, multiple covers as explicit components.
    General,
    /// Genus zero only, multiple covers folded into closed-form factors.
    Genus0,
}

enum Weight {
    Int(BigUint),
    Ratio(BigRational),
}

struct Term {
    weight: Weight,
    factors: Vec<CanonicalKey>,
}

struct Frame {
    quad: Quadruple,
    key: CanonicalKey,
    terms: Option<Vec<Term>>,
}

pub struct Engine {
    model: SurfaceModel,
    formula: Formula,
    store: MemoStore,
    /// Key the memo on sorted classes. Turning this off evaluates every
    /// ordering of the conic points separately.
    symmetric: bool,
}

impl Engine {
    pub fn new(model: SurfaceModel) -> Self {
        Self::with_formula(model, Formula::General)
    }

    pub fn genus0(model: SurfaceModel) -> Self {
        Self::with_formula(model, Formula::Genus0)
    }

    pub fn with_formula(model: SurfaceModel, formula: Formula) -> Self {
        Self {
            model,
            formula,
            store: MemoStore::new(&model),
            symmetric: true,
        }
    }

    /// Engine whose memo does not identify classes differing by a
    /// permutation of the conic points.
    pub fn without_symmetry(model: SurfaceModel) -> Self {
        Self {
            symmetric: false,
            ..Self::new(model)
        }
    }

    /// Engine continuing from an existing store.
    pub fn with_store(model: SurfaceModel, store: MemoStore) -> Self {
        assert_eq!(store.a(), model.a());
        Self {
            model,
            formula: Formula::General,
            store,
            symmetric: true,
        }
    }

    pub fn model(&self) -> &SurfaceModel {
        &self.model
    }

    pub fn store(&self) -> &MemoStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut MemoStore {
        &mut self.store
    }

    pub fn into_store(self) -> MemoStore {
        self.store
    }

    pub fn stats(&self) -> Stats {
        self.store.stats()
    }

    /// `N(D, g, α, β)`.
    pub fn count(&mut self, q: &Quadruple) -> Count {
        assert_eq!(q.class.rank(), self.model.rank(), "class rank does not match the surface");
        if self.formula == Formula::Genus0 && q.genus != 0 {
            panic!("genus-zero engine asked for genus {}", q.genus);
        }
        let key = self.key(q);
        if let Some(v) = self.store.lookup(&key) {
            return v;
        }
        let mut stack = vec![Frame {
            quad: q.clone(),
            key,
            terms: None,
        }];
        let mut in_progress: HashSet<CanonicalKey> = HashSet::new();
        while let Some(top) = stack.last_mut() {
            if let Some(terms) = top.terms.take() {
                let value = self.sum_terms(&top.quad, &terms);
                let key = top.key.clone();
                in_progress.remove(&key);
                self.store.insert(key, value, Origin::Recursion).expect("memo value changed");
                stack.pop();
                continue;
            }
            if self.store.contains(&top.key) {
                stack.pop();
                continue;
            }
            if let Some(v) = base_value(&top.quad) {
                self.store.insert(top.key.clone(), v, Origin::Base).expect("memo value changed");
                stack.pop();
                continue;
            }
            let terms = self.expand(&top.quad);
            let mut pending: Vec<CanonicalKey> = Vec::new();
            let mut seen: HashSet<&CanonicalKey> = HashSet::new();
            for dep in terms.iter().flat_map(|t| &t.factors) {
                if !seen.insert(dep) || self.store.lookup(dep).is_some() {
                    continue;
                }
                let dq = dep.quadruple();
                if let Some(v) = base_value(&dq) {
                    self.store.insert(dep.clone(), v, Origin::Base).expect("memo value changed");
                    continue;
                }
                assert!(!in_progress.contains(dep), "cyclic dependency at {dep}");
                pending.push(dep.clone());
            }
            let top = stack.last_mut().unwrap();
            in_progress.insert(top.key.clone());
            top.terms = Some(terms);
            for dep in pending {
                stack.push(Frame {
                    quad: dep.quadruple(),
                    key: dep,
                    terms: None,
                });
            }
        }
        self.store.get(&self.key(q)).cloned().unwrap()
    }

    fn key(&self, q: &Quadruple) -> CanonicalKey {
        if self.symmetric {
            q.canonical_key(&self.model)
        } else {
            CanonicalKey {
                a: self.model.a(),
                class: q.class.clone(),
                genus: q.genus,
                alpha: q.alpha.clone(),
                beta: q.beta.clone(),
            }
        }
    }

    /// Evaluates the recursion at `q` even when `q` is an initial value,
    /// with every dependency counted normally.
    pub fn count_by_recursion(&mut self, q: &Quadruple) -> Count {
        let terms = self.expand(q);
        for dep in terms.iter().flat_map(|t| &t.factors) {
            self.count(&dep.quadruple());
        }
        self.sum_terms(q, &terms)
    }

    fn expand(&self, q: &Quadruple) -> Vec<Term> {
        let mut terms = Vec::new();
        // a fixed contact point appears where a moving one was
        for (j, _) in q.beta.iter() {
            let mut alpha = q.alpha.clone();
            alpha.add_at(j, 1);
            let mut beta = q.beta.clone();
            beta.sub_at(j, 1);
            let dep = Quadruple::new(q.class.clone(), q.genus, alpha, beta);
            terms.push(Term {
                weight: Weight::Int(BigUint::from(j)),
                factors: vec![self.key(&dep)],
            });
        }
        match self.formula {
            Formula::General => {
                for sp in enumerate_general(&self.model, q) {
                    let factors = sp.factors().map(|f| self.checked_key(q, f)).collect();
                    terms.push(Term {
                        weight: Weight::Int(sp.weight),
                        factors,
                    });
                }
            }
            Formula::Genus0 => {
                for sp in enumerate_genus0(&self.model, q) {
                    let factors = sp.parts.iter().map(|p| self.checked_key(q, &p.quad)).collect();
                    terms.push(Term {
                        weight: Weight::Ratio(sp.weight),
                        factors,
                    });
                }
            }
        }
        terms
    }

    fn checked_key(&self, parent: &Quadruple, dep: &Quadruple) -> CanonicalKey {
        assert!(dep.class.d < parent.class.d, "recursion must lower the degree");
        self.key(dep)
    }

    fn sum_terms(&self, q: &Quadruple, terms: &[Term]) -> Count {
        let mut int_total = BigUint::zero();
        let mut ratio_total = BigRational::zero();
        for t in terms {
            let mut prod = BigUint::one();
            for f in &t.factors {
                let v = self.store.get(f).expect("dependency evaluated");
                if v.is_zero() {
                    prod = BigUint::zero();
                    break;
                }
                prod *= v;
            }
            if prod.is_zero() {
                continue;
            }
            match &t.weight {
                Weight::Int(w) => int_total += w * prod,
                Weight::Ratio(w) => ratio_total += w * BigRational::from_integer(prod.into()),
            }
        }
        assert!(ratio_total.is_integer(), "non-integral genus-zero sum at {q:?}");
        let ratio_int = ratio_total.to_integer();
        let ratio_int = ratio_int
            .to_biguint()
            .unwrap_or_else(|| panic!("negative count at {q:?}"));
        int_total + ratio_int
    }
}

/// Convenience: `N(D, g, α, β)` with a fresh engine.
pub fn count(model: &SurfaceModel, q: &Quadruple) -> Count {
    Engine::new(*model).count(q)
}

/// Convenience: genus-zero `N(D, α, β)` through the genus-zero recursion.
pub fn count_genus0(model: &SurfaceModel, class: &crate::lattice::DivisorClass, alpha: &TangencyVector, beta: &TangencyVector) -> Count {
    let q = Quadruple::new(class.clone(), 0, alpha.clone(), beta.clone());
    Engine::genus0(*model).count(&q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(class: &str, g: i32, alpha: &str, beta: &str) -> Quadruple {
        Quadruple::new(class.parse().unwrap(), g, alpha.parse().unwrap(), beta.parse().unwrap())
    }

    fn s(a: u32) -> SurfaceModel {
        SurfaceModel::new(a).unwrap()
    }

    #[test]
    fn small_counts() {
        let m = s(6);
        assert_eq!(count(&m, &quad("0;0,-1,0,0,0,0,0", 0, "0", "1^1")), 1u32.into());
        assert_eq!(count(&m, &quad("1;0,0,0,0,0,0,0", 0, "0", "1^2")), 1u32.into());
        assert_eq!(count(&m, &quad("2;0,0,0,0,0,0,0", 0, "0", "1^4")), 1u32.into());
        assert_eq!(count(&m, &quad("1;0,0,0,0,0,0,0", -1, "0", "1^2")), 0u32.into());
    }

    #[test]
    fn genus0_path() {
        let m = s(6);
        let line: crate::lattice::DivisorClass = "1;0,0,0,0,0,0,0".parse().unwrap();
        let conic: crate::lattice::DivisorClass = "2;0,0,0,0,0,0,0".parse().unwrap();
        assert_eq!(count_genus0(&m, &line, &TangencyVector::zero(), &"1^2".parse().unwrap()), 1u32.into());
        assert_eq!(count_genus0(&m, &conic, &TangencyVector::zero(), &"1^4".parse().unwrap()), 1u32.into());
    }

    #[test]
    fn stats() {
        let mut e = Engine::new(s(6));
        assert_eq!(e.stats().entries, 0);
        let q = quad("0;0,-1,0,0,0,0,0", 0, "0", "1^1");
        e.count(&q);
        assert_eq!(e.stats().entries, 1);
        let misses = e.stats().misses;
        e.count(&q);
        assert_eq!(e.stats().misses, misses);
        assert!(e.stats().hits >= 1);
    }

    #[test]
    fn pencil_line_by_recursion() {
        let mut e = Engine::new(s(6));
        let q = quad("1;1,0,0,0,0,0,0", 0, "0", "1^2");
        assert!(crate::kernel::base_value(&q).is_some());
        assert_eq!(e.count_by_recursion(&q), 1u32.into());
        assert_eq!(e.count(&q), 1u32.into());
    }

    #[test]
    fn symmetric_keys_agree_with_raw_keys() {
        let q = quad("3;1,1,0,1,0,0,0", 0, "0", "1^5");
        let p = quad("3;1,0,0,0,0,1,1", 0, "0", "1^5");
        let mut raw = Engine::without_symmetry(s(6));
        let mut sym = Engine::new(s(6));
        let v = raw.count(&q);
        assert_eq!(raw.count(&p), v);
        assert_eq!(sym.count(&p), v);
        assert!(sym.stats().entries < raw.stats().entries);
    }

    #[test]
    fn store_keeps_first_value() {
        let m = s(6);
        let mut store = MemoStore::new(&m);
        let key = quad("1;0,0,0,0,0,0,0", 0, "0", "1^2").canonical_key(&m);
        assert!(store.insert(key.clone(), 1u32.into(), Origin::Recursion).is_ok());
        assert!(store.insert(key.clone(), 1u32.into(), Origin::Recursion).is_ok());
        assert_eq!(store.insert(key.clone(), 2u32.into(), Origin::CacheFile), Err(1u32.into()));
        assert_eq!(store.get(&key), Some(&1u32.into()));
        assert_eq!(store.origin(&key), Some(Origin::Recursion));
    }
}
