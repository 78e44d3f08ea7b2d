//! Self-verification suite: the published tables, initial values,
//! agreement of the two recursions and structural properties.

pub mod battery;
pub mod oracle;

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cache;
use crate::engine::{Engine, Formula, MemoStore};
use crate::gw::{dual_path_check_with, gw_p6_with, gw_p7_terms, gw_p7_with, Target};
use crate::kernel::{base_rule, is_minus_one_crossing, CanonicalKey, Count, Quadruple};
use crate::lattice::{DivisorClass, SurfaceModel};
use crate::tangency::TangencyVector;

pub const P6_TABLE: [u32; 5] = [3240, 1740, 369, 33, 1];
pub const P7_TABLE: [u32; 4] = [576, 204, 26, 1];

/// `6L − 2(E_1 + ⋯ + E_6)` on `P²_6`.
pub fn p6_anti_bicanonical() -> DivisorClass {
    DivisorClass::new(6, [2; 6])
}

/// `6L − 2(E_1 + ⋯ + E_7)` on `P²_7`.
pub fn p7_anti_bicanonical() -> DivisorClass {
    DivisorClass::new(6, [2; 7])
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    /// Smaller batteries for the two exhaustive criteria.
    pub quick: bool,
    pub threads: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self { quick: false, threads: 1 }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "[{tag}] {}. {}: {} ({:.2}s)",
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

/// Engines shared between criteria, one per target surface.
pub struct Workbench {
    pub p6: Engine,
    pub p7: Engine,
}

impl Workbench {
    pub fn new() -> Self {
        Self {
            p6: Engine::new(Target::P6.model()),
            p7: Engine::new(Target::P7.model()),
        }
    }
}

impl Default for Workbench {
    fn default() -> Self {
        Self::new()
    }
}

type Check = fn(&mut Workbench, Options) -> Result<String, String>;

pub const CRITERIA: [(u8, &str, Check); 8] = [
    (1, "P²_6 table for 6L−2ΣE_i, direct", table_p6),
    (2, "P²_6 table through P²_7", table_dual),
    (3, "P²_7 table for 6L−2ΣE_i", table_p7),
    (4, "initial values and near misses", initial_values),
    (5, "genus-zero recursion agrees with the general one", genus0_agreement),
    (6, "classical counts", classical_counts),
    (7, "symmetry, brute-force splitter and cache round trip", properties),
    (8, "point count independent of the summation index", index_independence),
];

/// Runs one criterion; a panic inside it counts as a failure.
pub fn run_one(id: u8, bench: &mut Workbench, opts: Options) -> Outcome {
    let &(id, title, check) = CRITERIA.iter().find(|c| c.0 == id).expect("criterion id");
    let start = Instant::now();
    let result = catch_unwind(AssertUnwindSafe(|| check(bench, opts)));
    let (passed, detail) = match result {
        Ok(Ok(d)) => (true, d),
        Ok(Err(d)) => (false, d),
        Err(panic) => {
            *bench = Workbench::new();
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            (false, format!("assertion failed: {msg}"))
        }
    };
    Outcome {
        id,
        title,
        passed,
        detail,
        elapsed: start.elapsed(),
    }
}

pub fn run_all(bench: &mut Workbench, opts: Options) -> Vec<Outcome> {
    CRITERIA.iter().map(|c| run_one(c.0, bench, opts)).collect()
}

fn join(values: &[Count]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn compare_table(got: &[Count], want: &[u32]) -> Result<String, String> {
    let want: Vec<Count> = want.iter().map(|&v| BigUint::from(v)).collect();
    if got == want.as_slice() {
        Ok(join(got))
    } else {
        Err(format!("got {}, expected {}", join(got), join(&want)))
    }
}

pub fn p6_table(engine: &mut Engine) -> Vec<Count> {
    let d = p6_anti_bicanonical();
    (0..P6_TABLE.len() as i32).map(|g| gw_p6_with(engine, &d, g)).collect()
}

pub fn p7_table(engine: &mut Engine) -> Vec<Count> {
    let d = p7_anti_bicanonical();
    (0..P7_TABLE.len() as i32).map(|g| gw_p7_with(engine, &d, g)).collect()
}

fn table_p6(bench: &mut Workbench, _: Options) -> Result<String, String> {
    compare_table(&p6_table(&mut bench.p6), &P6_TABLE)
}

fn table_dual(bench: &mut Workbench, _: Options) -> Result<String, String> {
    let d = p6_anti_bicanonical();
    let mut rhs = Vec::new();
    for g in 0..P6_TABLE.len() as i32 {
        let r = dual_path_check_with(&mut bench.p6, &mut bench.p7, &d, g);
        if !r.equal {
            return Err(format!("g={g}: direct {} but through P²_7 {}", r.lhs, r.rhs));
        }
        rhs.push(r.rhs);
    }
    compare_table(&rhs, &P6_TABLE)
}

fn table_p7(bench: &mut Workbench, _: Options) -> Result<String, String> {
    compare_table(&p7_table(&mut bench.p7), &P7_TABLE)
}

fn index_independence(_: &mut Workbench, _: Options) -> Result<String, String> {
    let mut checked = 0;
    let model = Target::P7.model();
    let classes = [(p7_anti_bicanonical(), P7_TABLE.len()), (crate::gw::lift_to_p7(&p6_anti_bicanonical()), P6_TABLE.len())];
    for (d, genera) in classes {
        let de = d.de();
        for g in 0..genera as i32 {
            let points = -d.dk() + g as i64 - 1;
            for i in 0..=d.d / 2 {
                let shifted = &d - &model.conic_class().scaled(i);
                let q = Quadruple::new(shifted, g, TangencyVector::zero(), TangencyVector::unit(1, (de + 2 * i as i64) as u32));
                if q.r_value() != points {
                    return Err(format!("{q:?}: R = {}, expected {points}", q.r_value()));
                }
                checked += 1;
            }
        }
    }
    // the same identity is asserted inside every evaluation of the sum
    let mut e = Engine::new(model);
    let terms = gw_p7_terms(&mut e, &p7_anti_bicanonical(), 0).len();
    Ok(format!("{checked} terms, {terms} per evaluation"))
}

fn expect(engine: &mut Engine, q: &Quadruple, want: u32, failures: &mut Vec<String>) {
    let got = engine.count(q);
    if got != BigUint::from(want) {
        failures.push(format!("{q:?}: got {got}, expected {want}"));
    }
}

fn minus_one_curves(model: &SurfaceModel) -> Vec<DivisorClass> {
    battery::canonical_classes(model, 3, 2)
        .into_iter()
        .filter(is_minus_one_crossing)
        .collect()
}

fn initial_values(_: &mut Workbench, _: Options) -> Result<String, String> {
    let mut failures = Vec::new();
    let mut cases = 0;
    for a in [5, 6] {
        let model = SurfaceModel::new(a).unwrap();
        let mut e = Engine::new(model);
        let aux = model.aux_class();
        let zero = TangencyVector::zero();
        let curves = minus_one_curves(&model);
        for s in 1..=4u32 {
            let cover = aux.scaled(s as i32);
            let es = TangencyVector::unit(s, 1);
            let cases_s = [
                (Quadruple::new(cover.clone(), 0, zero.clone(), TangencyVector::unit(s, 2)), 1),
                (Quadruple::new(cover.clone(), 0, zero.clone(), TangencyVector::unit(2 * s, 1)), 2),
                (Quadruple::new(cover.clone(), 0, es.clone(), es.clone()), 1),
            ];
            for (q, want) in cases_s {
                expect(&mut e, &q, want, &mut failures);
                cases += 1;
            }
            for d0 in &curves {
                let q = Quadruple::new(d0.scaled(s as i32), 0, zero.clone(), es.clone());
                expect(&mut e, &q, 1, &mut failures);
                cases += 1;
            }
            // −D(K+E) = 1, all contacts fixed
            for m in 0..=(a as i32).min(2 * s as i32) {
                let d = s as i32;
                let class = DivisorClass::new(d, std::iter::once(d - 1).chain((0..a as i32).map(|j| (j < m) as i32)));
                let de = class.de() as u64;
                for alpha in TangencyVector::of_weight(de) {
                    let q = Quadruple::new(class.clone(), 0, alpha, zero.clone());
                    expect(&mut e, &q, 1, &mut failures);
                    cases += 1;
                }
            }
        }
        for q in near_misses(&model) {
            expect(&mut e, &q, 0, &mut failures);
            cases += 1;
        }
    }
    if failures.is_empty() {
        Ok(format!("{cases} cases"))
    } else {
        Err(failures.join("; "))
    }
}

/// Quadruples one step away from an initial-value rule that count nothing.
pub fn near_misses(model: &SurfaceModel) -> Vec<Quadruple> {
    let t = |s: &str| s.parse::<TangencyVector>().unwrap();
    let aux = model.aux_class();
    let e2 = model.exceptional(2);
    let l = model.line();
    let d0 = &(&l - &model.exceptional(1)) - &e2;
    vec![
        Quadruple::new(aux.scaled(2), 1, t("0"), t("2^2")),
        Quadruple::new(aux.scaled(2), 0, t("0"), t("2^1+1^2")),
        Quadruple::new(aux.scaled(2), 0, t("1^1"), t("3^1")),
        Quadruple::new(aux.scaled(3), 0, t("0"), t("4^1+2^1")),
        Quadruple::new(aux.clone(), 0, t("2^1"), t("0")),
        Quadruple::new(e2.scaled(2), 0, t("0"), t("1^2")),
        Quadruple::new(e2.scaled(2), 0, t("1^1"), t("1^1")),
        Quadruple::new(e2.clone(), 0, t("1^1"), t("0")),
        Quadruple::new(e2, 1, t("0"), t("1^1")),
        Quadruple::new(d0.scaled(2), 0, t("0"), t("1^2")),
    ]
}

/// Splits `items` over `threads` workers, each with its own engines, and
/// returns the results in input order.
fn parallel<T: Sync, R: Send>(items: &[T], threads: usize, work: impl Fn(&[T]) -> Vec<R> + Sync) -> Vec<R> {
    let threads = threads.max(1);
    if threads == 1 || items.len() < 2 {
        return work(items);
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|scope| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| scope.spawn(|| work(c))).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn genus0_agreement(_: &mut Workbench, opts: Options) -> Result<String, String> {
    let max_d = if opts.quick { 3 } else { 4 };
    let mut cases = 0;
    let mut failures = Vec::new();
    for a in [5, 6] {
        let model = SurfaceModel::new(a).unwrap();
        let classes = battery::canonical_classes(&model, max_d, 2);
        let qs = battery::quadruples(&classes, 0, 6);
        cases += qs.len();
        let bad = parallel(&qs, opts.threads, |chunk| {
            let mut general = Engine::new(model);
            let mut genus0 = Engine::with_formula(model, Formula::Genus0);
            chunk
                .iter()
                .filter_map(|q| {
                    let (x, y) = (general.count(q), genus0.count(q));
                    (x != y).then(|| format!("a={a} {q:?}: {x} vs {y}"))
                })
                .collect()
        });
        failures.extend(bad);
    }
    if failures.is_empty() {
        Ok(format!("{cases} quadruples, d <= {max_d}"))
    } else {
        Err(format!("{} mismatches, first: {}", failures.len(), failures[0]))
    }
}

fn classical_counts(_: &mut Workbench, _: Options) -> Result<String, String> {
    let model = SurfaceModel::new(6).unwrap();
    let mut e = Engine::new(model);
    let t = |s: &str| s.parse::<TangencyVector>().unwrap();
    let one = BigUint::from(1u32);
    let checks = [
        ("N(L,0,0,2e_1)", e.count(&Quadruple::new(model.line(), 0, t("0"), t("1^2")))),
        ("N(2L,0,0,4e_1)", e.count(&Quadruple::new(model.line().scaled(2), 0, t("0"), t("1^4")))),
        ("GW(P²_7, L)", crate::gw::gw_p7(&model.line(), 0)),
        ("GW(P²_7, E_1)", crate::gw::gw_p7(&model.exceptional(1).clone(), 0)),
    ];
    let bad: Vec<String> = checks
        .iter()
        .filter(|(_, v)| *v != one)
        .map(|(n, v)| format!("{n} = {v}"))
        .collect();
    if bad.is_empty() {
        Ok(checks.iter().map(|(n, _)| format!("{n} = 1")).collect::<Vec<_>>().join(", "))
    } else {
        Err(bad.join(", "))
    }
}

fn random_quadruple(rng: &mut ChaCha8Rng, model: &SurfaceModel) -> Quadruple {
    loop {
        let d = rng.random_range(1..=5);
        let exc: Vec<i32> = (0..model.rank()).map(|_| rng.random_range(0..=2.min(d))).collect();
        let class = DivisorClass::new(d, exc);
        let de = class.de();
        if de < 0 || class.arith_genus() < 0 {
            continue;
        }
        let genus = rng.random_range(0..=class.arith_genus().min(1)) as i32;
        let betas = TangencyVector::of_weight(de as u64);
        let beta = betas[rng.random_range(0..betas.len())].clone();
        let q = Quadruple::new(class, genus, TangencyVector::zero(), beta);
        if (1..=5).contains(&q.r_value()) && base_rule(&q).is_none() {
            return q;
        }
    }
}

fn permutation_invariance(orbits: usize) -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut sym: Vec<Engine> = [5, 6].iter().map(|&a| Engine::new(SurfaceModel::new(a).unwrap())).collect();
    let mut raw: Vec<Engine> = [5, 6].iter().map(|&a| Engine::without_symmetry(SurfaceModel::new(a).unwrap())).collect();
    for _ in 0..orbits {
        let which = rng.random_range(0..2);
        let model = *sym[which].model();
        let q = random_quadruple(&mut rng, &model);
        let mut exc = q.class.exc.clone();
        exc[1..].shuffle(&mut rng);
        let permuted = Quadruple::new(DivisorClass::new(q.class.d, exc), q.genus, q.alpha.clone(), q.beta.clone());
        let (x, y, z) = (sym[which].count(&q), raw[which].count(&q), raw[which].count(&permuted));
        if x != y || y != z {
            return Err(format!("a={} {q:?} vs {permuted:?}: {x}, {y}, {z}", model.a()));
        }
    }
    Ok(format!("{orbits} orbits"))
}

fn brute_force_splitter(max_d: i32, max_r: i64, threads: usize) -> Result<String, String> {
    let mut cases = 0;
    for a in [5, 6] {
        let model = SurfaceModel::new(a).unwrap();
        let classes = battery::canonical_classes(&model, max_d, 1);
        let qs: Vec<Quadruple> = (0..=1)
            .flat_map(|g| battery::quadruples(&classes, g, max_r))
            .filter(|q| base_rule(q).is_none())
            .collect();
        cases += qs.len();
        let bad = parallel(&qs, threads, |chunk| {
            let mut e = Engine::new(model);
            chunk
                .iter()
                .filter_map(|q| {
                    let x = oracle::splitter_total(&mut e, q);
                    let y = oracle::ordered_total(&mut e, q);
                    (x != y).then(|| format!("a={a} {q:?}: splitter {x}, ordered enumeration {y}"))
                })
                .collect::<Vec<_>>()
        });
        if let Some(first) = bad.first() {
            return Err(first.clone());
        }
    }
    Ok(format!("{cases} quadruples with d <= {max_d}, R <= {max_r}"))
}

fn cache_round_trip(bench: &mut Workbench) -> Result<String, String> {
    let before = (join(&p6_table(&mut bench.p6)), join(&p7_table(&mut bench.p7)));
    let mut tables = Vec::new();
    for engine in [&bench.p6, &bench.p7] {
        let model = *engine.model();
        let text = cache::render(engine.store());
        let mut store = MemoStore::new(&model);
        cache::import_str(&mut store, &text).map_err(|e| e.to_string())?;
        if cache::render(&store) != text {
            return Err(format!("a={}: re-export differs", model.a()));
        }
        tables.push(Engine::with_store(model, store));
    }
    let after = (join(&p6_table(&mut tables[0])), join(&p7_table(&mut tables[1])));
    let misses = tables[0].stats().misses + tables[1].stats().misses;
    if before != after {
        return Err(format!("tables changed: {before:?} vs {after:?}"));
    }
    if misses != 0 {
        return Err(format!("{misses} entries missing after import"));
    }
    Ok("tables identical".into())
}

fn properties(bench: &mut Workbench, opts: Options) -> Result<String, String> {
    let (orbits, max_r) = if opts.quick { (50, 3) } else { (200, 4) };
    fn timed(f: impl FnOnce() -> Result<String, String>) -> Result<String, String> {
        let t = Instant::now();
        f().map(|s| format!("{s} in {:.1}s", t.elapsed().as_secs_f64()))
    }
    let a = timed(|| permutation_invariance(orbits))?;
    let b = timed(|| brute_force_splitter(3, max_r, opts.threads))?;
    let c = cache_round_trip(bench)?;
    Ok(format!("{a}; brute force {b}; cache {c}"))
}

/// Recomputes every entry of `store` from scratch and returns the keys
/// whose stored value is wrong.
pub fn audit(store: &MemoStore) -> Vec<(CanonicalKey, Count, Count)> {
    let model = SurfaceModel::new(store.a()).expect("store surface");
    let mut fresh = Engine::new(model);
    let mut bad = Vec::new();
    for (key, value) in store.entries() {
        let right = fresh.count(&key.quadruple());
        if &right != value {
            bad.push((key.clone(), value.clone(), right));
        }
    }
    bad
}
