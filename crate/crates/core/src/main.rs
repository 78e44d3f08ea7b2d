use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Number, Value};

use curvecount::cache;
use curvecount::engine::{Engine, MemoStore, Origin};
use curvecount::error::ParseError;
use curvecount::gw::{genus_range, gw_p6_with, gw_p7_with, Target};
use curvecount::kernel::{Count, Quadruple};
use curvecount::lattice::{DivisorClass, SurfaceModel};
use curvecount::tangency::TangencyVector;
use curvecount::verify::{self, Options, Workbench};

#[derive(Parser)]
#[command(name = "curvecount", version, about = "Relative curve counts on blown-up planes and Gromov-Witten invariants of P²_6 and P²_7")]
struct Cli {
    /// Worker threads for batch work.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Memo cache file, read before and updated after each computation.
    #[arg(long, global = true, env = "CURVECOUNT_CACHE")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relative count N(D, g, α, β) on P²_{a,1}.
    N(NArgs),
    /// Gromov-Witten invariant of P²_6 or P²_7.
    Gw(GwArgs),
    /// Run the acceptance suite.
    Verify {
        /// Smaller exhaustive batteries.
        #[arg(long)]
        quick: bool,
    },
    /// Import or export memo cache files.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Args)]
struct NArgs {
    #[arg(long)]
    a: u32,
    /// `d;d_1,...,d_{a+1}`.
    #[arg(long, allow_hyphen_values = true)]
    class: String,
    #[arg(long)]
    g: i32,
    /// Fixed contacts, e.g. `2^1+1^3` or `0`.
    #[arg(long)]
    alpha: String,
    /// Moving contacts.
    #[arg(long)]
    beta: String,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GwTarget {
    P6,
    P7,
}

#[derive(Args)]
struct GwArgs {
    #[arg(value_enum)]
    target: GwTarget,
    #[arg(long, allow_hyphen_values = true)]
    class: String,
    #[arg(long, required_unless_present = "all_genera", conflicts_with = "all_genera")]
    g: Option<i32>,
    /// Every genus from 0 to the arithmetic genus of the class.
    #[arg(long)]
    all_genera: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum CacheAction {
    /// Validate a cache file and merge it into the default cache.
    Import { path: PathBuf },
    /// Write the store for one surface, warmed with its reference table.
    Export {
        path: PathBuf,
        #[arg(long)]
        a: u32,
    },
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

type Outcome = Result<(), Failure>;

fn parse_field<T: std::str::FromStr<Err = ParseError>>(name: &str, text: &str) -> Result<T, Failure> {
    text.parse()
        .map_err(|e: ParseError| Failure::usage(format!("--{name} {text:?}: {e}")))
}

fn model(a: u32) -> Result<SurfaceModel, Failure> {
    let m = SurfaceModel::new(a).map_err(|e| Failure::usage(e.to_string()))?;
    if !m.is_validated() {
        eprintln!("warning: a = {a} is outside the range checked against published values (5, 6)");
    }
    Ok(m)
}

fn class_for(model: &SurfaceModel, text: &str) -> Result<DivisorClass, Failure> {
    let class: DivisorClass = parse_field("class", text)?;
    model.check(&class).map_err(|e| Failure::usage(e.to_string()))?;
    Ok(class)
}

fn big(n: &Count) -> Value {
    Value::Number(n.to_string().parse::<Number>().expect("decimal integer"))
}

/// Store for `model`, preloaded from the cache file when it matches.
fn open_store(path: Option<&Path>, model: &SurfaceModel) -> Result<MemoStore, Failure> {
    let mut store = MemoStore::new(model);
    let Some(path) = path else { return Ok(store) };
    if !path.exists() {
        return Ok(store);
    }
    match cache::import(&mut store, path) {
        Ok(_) => Ok(store),
        Err(cache::CacheError::SurfaceMismatch { found, .. }) => {
            eprintln!("warning: cache {} is for a = {found}, not used", path.display());
            Ok(MemoStore::new(model))
        }
        Err(e) => Err(Failure::usage(format!("cache {}: {e}", path.display()))),
    }
}

fn save_store(path: Option<&Path>, store: &MemoStore) -> Outcome {
    let Some(path) = path else { return Ok(()) };
    if path.exists() {
        // never replace a cache that belongs to another surface
        let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(e.to_string()))?;
        if let Ok((a, _)) = cache::parse(&text) {
            if a != store.a() {
                return Ok(());
            }
        }
    }
    let tmp = path.with_extension("tmp");
    cache::export(store, &tmp)
        .and_then(|_| std::fs::rename(&tmp, path).map_err(Into::into))
        .map_err(|e| Failure::usage(format!("cannot write cache {}: {e}", path.display())))
}

fn cmd_n(cli: &Cli, args: &NArgs) -> Outcome {
    let model = model(args.a)?;
    let class = class_for(&model, &args.class)?;
    let alpha: TangencyVector = parse_field("alpha", &args.alpha)?;
    let beta: TangencyVector = parse_field("beta", &args.beta)?;
    let q = Quadruple::new(class, args.g, alpha, beta);
    let mut engine = Engine::with_store(model, open_store(cli.cache.as_deref(), &model)?);
    let count = engine.count(&q);
    if args.json {
        let v = json!({
            "a": args.a,
            "class": q.class.to_string(),
            "genus": q.genus,
            "alpha": q.alpha.to_string(),
            "beta": q.beta.to_string(),
            "count": big(&count),
        });
        println!("{v}");
    } else {
        println!("{count}");
    }
    save_store(cli.cache.as_deref(), engine.store())
}

fn gw_value(target: Target, engine: &mut Engine, class: &DivisorClass, g: i32) -> Count {
    match target {
        Target::P6 => gw_p6_with(engine, class, g),
        Target::P7 => gw_p7_with(engine, class, g),
    }
}

/// Values for every genus, spread over `threads` engines.
fn all_genera(target: Target, store: MemoStore, class: &DivisorClass, threads: usize) -> (Vec<Count>, MemoStore) {
    let model = target.model();
    let genera: Vec<i32> = genus_range(class).collect();
    if threads <= 1 || genera.len() < 2 {
        let mut engine = Engine::with_store(model, store);
        let values = genera.iter().map(|&g| gw_value(target, &mut engine, class, g)).collect();
        return (values, engine.into_store());
    }
    let chunk = genera.len().div_ceil(threads);
    let results: Vec<(Vec<Count>, MemoStore)> = std::thread::scope(|scope| {
        let handles: Vec<_> = genera
            .chunks(chunk)
            .map(|gs| {
                let store = store.clone();
                scope.spawn(move || {
                    let mut engine = Engine::with_store(model, store);
                    let values: Vec<Count> = gs.iter().map(|&g| gw_value(target, &mut engine, class, g)).collect();
                    (values, engine.into_store())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut merged = store;
    let mut values = Vec::new();
    for (vs, s) in results {
        values.extend(vs);
        for (key, count) in s.entries() {
            merged
                .insert(key.clone(), count.clone(), Origin::Recursion)
                .expect("workers disagree on a memo entry");
        }
    }
    (values, merged)
}

fn cmd_gw(cli: &Cli, args: &GwArgs) -> Outcome {
    let target = match args.target {
        GwTarget::P6 => Target::P6,
        GwTarget::P7 => Target::P7,
    };
    let model = target.model();
    let name = match target {
        Target::P6 => "p6",
        Target::P7 => "p7",
    };
    let class: DivisorClass = parse_field("class", &args.class)?;
    if class.rank() != target.points() {
        return Err(Failure::usage(format!(
            "class on P²_{} needs {} exceptional coordinates, found {}",
            target.points(),
            target.points(),
            class.rank()
        )));
    }
    let store = open_store(cli.cache.as_deref(), &model)?;
    let store = if let Some(g) = args.g {
        let mut engine = Engine::with_store(model, store);
        let value = gw_value(target, &mut engine, &class, g);
        if args.json {
            println!("{}", json!({"target": name, "class": class.to_string(), "genus": g, "gw": big(&value)}));
        } else {
            println!("{value}");
        }
        engine.into_store()
    } else {
        let (values, store) = all_genera(target, store, &class, cli.threads);
        let genera: Vec<i32> = genus_range(&class).collect();
        if args.json {
            let vs: Vec<Value> = values.iter().map(big).collect();
            println!("{}", json!({"target": name, "class": class.to_string(), "genera": genera, "gw": vs}));
        } else {
            let row = |head: &str, cells: Vec<String>| {
                std::iter::once(head.to_string()).chain(cells).collect::<Vec<_>>().join(" ")
            };
            println!("{}", row("g", genera.iter().map(|g| g.to_string()).collect()));
            println!("{}", row("GW", values.iter().map(|v| v.to_string()).collect()));
        }
        store
    };
    save_store(cli.cache.as_deref(), &store)
}

fn cmd_verify(cli: &Cli, quick: bool) -> Outcome {
    let opts = Options { quick, threads: cli.threads };
    let mut bench = Workbench::new();
    let mut failed = 0;
    if let Some(path) = cli.cache.as_deref().filter(|p| p.exists()) {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(e.to_string()))?;
        let verdict = cache::parse(&text).map_err(|e| e.to_string()).and_then(|(a, _)| {
            let mut store = MemoStore::new(&SurfaceModel::new(a).map_err(|e| e.to_string())?);
            cache::import_str(&mut store, &text).map_err(|e| e.to_string())?;
            let bad = verify::audit(&store);
            match bad.first() {
                None => Ok(format!("{} entries recomputed", store.stats().entries)),
                Some((key, cached, right)) => Err(format!(
                    "{} wrong entries, first {key}: cached {cached}, recomputed {right}",
                    bad.len()
                )),
            }
        });
        match verdict {
            Ok(d) => println!("[PASS] 0. cache {}: {d}", path.display()),
            Err(d) => {
                failed += 1;
                println!("[FAIL] 0. cache {}: {d}", path.display());
            }
        }
    }
    for c in verify::CRITERIA {
        let outcome = verify::run_one(c.0, &mut bench, opts);
        println!("{outcome}");
        failed += usize::from(!outcome.passed);
    }
    if failed == 0 {
        println!("all criteria passed");
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: format!("{failed} criteria failed"),
        })
    }
}

fn cmd_cache(cli: &Cli, action: &CacheAction) -> Outcome {
    match action {
        CacheAction::Import { path } => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let (a, _) = cache::parse(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            let model = SurfaceModel::new(a).map_err(|e| Failure::usage(e.to_string()))?;
            if let Some(default) = cli.cache.as_deref().filter(|p| p.exists()) {
                let existing = std::fs::read_to_string(default).map_err(|e| Failure::usage(e.to_string()))?;
                let (found, _) = cache::parse(&existing).map_err(|e| Failure::usage(format!("{}: {e}", default.display())))?;
                if found != a {
                    return Err(Failure::usage(format!("{} is for a = {a}, cache {} is for a = {found}", path.display(), default.display())));
                }
            }
            let mut store = open_store(cli.cache.as_deref(), &model)?;
            let n = cache::import_str(&mut store, &text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            println!("{n} entries for a = {a}");
            save_store(cli.cache.as_deref(), &store)
        }
        CacheAction::Export { path, a } => {
            let model = model(*a)?;
            let mut engine = Engine::with_store(model, open_store(cli.cache.as_deref(), &model)?);
            match a {
                5 => drop(verify::p6_table(&mut engine)),
                6 => drop(verify::p7_table(&mut engine)),
                _ => {}
            }
            cache::export(engine.store(), path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            println!("{} entries for a = {a}", engine.stats().entries);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::N(args) => cmd_n(&cli, args),
        Command::Gw(args) => cmd_gw(&cli, args),
        Command::Verify { quick } => cmd_verify(&cli, *quick),
        Command::Cache { action } => cmd_cache(&cli, action),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
