use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::sync::Arc;

use log::{info, warn};
use rand::Rng;
use rand_distr::Uniform;
use rdad::cubical::{
    build_complex, EngineRegistry, PersistenceDiagram, PersistenceEngine, DEFAULT_PRIME,
};
use rdad::diagrams::{significant_points, write_significant_csv};
use rdad::filtration::{
    build_field_with, make_grid, FiltrationRegistry, FiltrationSpec, GridSpec, ScalarField,
    DEFAULT_M_DTM,
};
use rdad::inference::{
    oracle_bootstrap, replicate_seed, subsample_bootstrap, BootstrapConfig, BootstrapMode,
    BootstrapResult, Pipeline, DEFAULT_ALPHA, DEFAULT_MAX_REDRAWS, DEFAULT_REPLICATES,
};
use rdad::io::{crop_points, read_points, write_points, CropSpec};
use rdad::neighbors::PointCloud;
use rdad::synthgen::{self, Preset, PresetRegistry};
use serde_json::{json, Value};

use crate::config::ConfigFile;
use crate::{
    manifest, BootArgs, Cli, CliError, Command, EngineArgs, FieldArgs, GenerateArgs, IngestCmd,
};

pub const POINTS: &str = "points.csv";
pub const PROVENANCE: &str = "points.provenance.json";
pub const FIELD_JSON: &str = "field.json";
pub const FIELD_CSV: &str = "field.csv";
pub const DIAGRAM: &str = "diagram.csv";
pub const BOOTSTRAP: &str = "bootstrap.json";
pub const SIGNIFICANT: &str = "significant.csv";

const DEFAULT_KIND: &str = "rdad";
const DEFAULT_DELTA_X: f64 = 0.02;
const DEFAULT_PADDING: f64 = 0.05;
const DEFAULT_ENGINE: &str = "union-find";
const JITTER_SCALE: f64 = 1e-9;

type Config = BTreeMap<String, Value>;

struct Ctx {
    file: ConfigFile,
    seed_flag: Option<u64>,
    out: PathBuf,
    presets: PresetRegistry,
}

impl Ctx {
    /// Root seed; drawn from entropy and announced when not configured.
    fn seed(&self) -> Result<u64, CliError> {
        match self.file.pick(self.seed_flag, "seed")? {
            Some(s) => Ok(s),
            None => {
                let s: u64 = rand::rng().random();
                eprintln!("seed: {s}");
                Ok(s)
            }
        }
    }

    fn preset(&self, flag: Option<String>) -> Result<Option<Preset>, CliError> {
        match self.file.pick(flag, "preset")? {
            Some(name) => Ok(Some(self.presets.get(&name)?.clone())),
            None => Ok(None),
        }
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>, CliError> {
        Ok(BufWriter::new(File::create(self.out.join(name))?))
    }

    fn input(&self, flag: Option<PathBuf>, default: &str) -> Result<PathBuf, CliError> {
        let path = flag.unwrap_or_else(|| self.out.join(default));
        if !path.is_file() {
            return Err(CliError::Config(format!(
                "input file {} does not exist",
                path.display()
            )));
        }
        Ok(path)
    }
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    if let Some(n) = file.pick(cli.threads, "threads")? {
        if n == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    std::fs::create_dir_all(&cli.out)?;
    let ctx = Ctx {
        file,
        seed_flag: cli.seed,
        out: cli.out,
        presets: PresetRegistry::default(),
    };
    match cli.command {
        Command::Generate(a) => generate(&ctx, a).map(drop),
        Command::Field(a) => {
            let cloud = load_points(&ctx, a.points)?;
            let fs = FieldSettings::resolve(&ctx, a.field)?;
            field(&ctx, &fs, &cloud).map(drop)
        }
        Command::Persist(a) => {
            let path = ctx.input(a.field, FIELD_JSON)?;
            let f = ScalarField::read_json(File::open(&path)?)?;
            let es = EngineSettings::resolve(&ctx, a.engine)?;
            persist(&ctx, &es, &f, a.indices).map(drop)
        }
        Command::Bootstrap(a) => {
            let cloud = load_points(&ctx, a.points)?;
            let fs = FieldSettings::resolve(&ctx, a.field)?;
            let es = EngineSettings::resolve(&ctx, a.engine)?;
            let bs = BootSettings::resolve(&ctx, a.boot)?;
            bootstrap(&ctx, &fs, &es, &bs, &cloud).map(drop)
        }
        Command::Ingest(a) => ingest(&ctx, a),
        Command::Run(a) => {
            let fs = FieldSettings::resolve(&ctx, a.field)?;
            let es = EngineSettings::resolve(&ctx, a.engine)?;
            let bs = BootSettings::resolve(&ctx, a.boot)?;
            let cloud = match a.points {
                Some(p) => load_points(&ctx, Some(p))?,
                None => {
                    let preset = fs.preset.as_ref().ok_or_else(|| {
                        CliError::Config("run needs --points or a generator --preset".into())
                    })?;
                    generate_from(&ctx, preset)?
                }
            };
            let f = field(&ctx, &fs, &cloud)?;
            persist(&ctx, &es, &f, a.indices)?;
            bootstrap(&ctx, &fs, &es, &bs, &cloud).map(drop)
        }
    }
}

fn load_points(ctx: &Ctx, flag: Option<PathBuf>) -> Result<PointCloud, CliError> {
    let path = ctx.input(flag, POINTS)?;
    read_points(File::open(&path)?).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn generate(ctx: &Ctx, args: GenerateArgs) -> Result<PointCloud, CliError> {
    let name: String = ctx
        .file
        .pick(args.preset, "preset")?
        .ok_or_else(|| CliError::Config("generate needs --preset".into()))?;
    let preset = ctx.presets.get_in(&args.family, &name)?.clone();
    generate_from(ctx, &preset)
}

fn generate_from(ctx: &Ctx, preset: &Preset) -> Result<PointCloud, CliError> {
    let generator = preset.generator.as_ref().ok_or_else(|| {
        CliError::Config(format!(
            "preset {} has no generator; supply points",
            preset.name
        ))
    })?;
    let seed = ctx.seed()?;
    let cloud = generator.generate_seeded(seed)?;
    info!(
        "generated {} points from preset {}",
        cloud.len(),
        preset.name
    );

    let mut w = ctx.create(POINTS)?;
    write_points(&cloud, &mut w)?;
    w.flush()?;
    let provenance = json!({
        "family": generator.family(),
        "preset": preset.name,
        "seed": seed,
        "n_points": cloud.len(),
        "params": generator.params(),
    });
    write_json(ctx, PROVENANCE, &provenance)?;

    let config = config_of([
        ("command", json!("generate")),
        ("family", json!(generator.family())),
        ("preset", json!(preset.name)),
        ("seed", json!(seed)),
    ]);
    manifest::record(&ctx.out, "generate", &config, &[POINTS, PROVENANCE])?;
    Ok(cloud)
}

/// Filtration and grid choices shared by `field`, `bootstrap` and `run`.
struct FieldSettings {
    spec: FiltrationSpec,
    delta_x: f64,
    padding: f64,
    grid: Option<[f64; 4]>,
    preset: Option<Preset>,
    jitter: Option<u64>,
}

impl FieldSettings {
    fn resolve(ctx: &Ctx, a: FieldArgs) -> Result<Self, CliError> {
        let f = &ctx.file;
        let preset = ctx.preset(a.preset)?;
        let kind: String = f
            .pick(a.kind, "kind")?
            .unwrap_or_else(|| DEFAULT_KIND.into());
        let mut spec = FiltrationSpec::new(kind)
            .with_m_dtm(f.pick(a.m_dtm, "m_dtm")?.unwrap_or(DEFAULT_M_DTM));
        spec.k_dtm = f.pick(a.k_dtm, "k_dtm")?;
        spec.k_den = f.pick(a.k_den, "k_den")?;
        let delta_x = f
            .pick(a.delta_x, "delta_x")?
            .or(preset.as_ref().map(|p| p.delta_x))
            .unwrap_or(DEFAULT_DELTA_X);
        let jitter = if f.flag(a.jitter, "jitter")? {
            Some(ctx.seed()?)
        } else {
            None
        };
        Ok(Self {
            spec,
            delta_x,
            padding: f.pick(a.padding, "padding")?.unwrap_or(DEFAULT_PADDING),
            grid: f.pick(a.grid, "grid")?.map(|b| b.0),
            preset,
            jitter,
        })
    }

    fn grid_for(&self, cloud: &PointCloud) -> Result<GridSpec, CliError> {
        let rect = self
            .grid
            .map(|g| ([g[0], g[1]], [g[2], g[3]]))
            .or_else(|| self.preset.as_ref()?.grid_rect.map(|r| (r.lower, r.upper)));
        Ok(match rect {
            Some((lo, hi)) => GridSpec::covering(&lo, &hi, self.delta_x)?,
            None => make_grid(cloud, self.delta_x, self.padding)?,
        })
    }

    /// The cloud actually filtered: the input, jittered when requested.
    fn prepare(&self, cloud: &PointCloud) -> Result<PointCloud, CliError> {
        match self.jitter {
            Some(seed) => Ok(jitter(cloud, seed)?),
            None => Ok(cloud.clone()),
        }
    }

    fn config(&self, grid: &GridSpec) -> Config {
        config_of([
            ("kind", json!(self.spec.kind)),
            ("k_dtm", json!(self.spec.k_dtm)),
            ("k_den", json!(self.spec.k_den)),
            ("m_dtm", json!(self.spec.m_dtm)),
            ("delta_x", json!(grid.delta_x)),
            ("grid_lower", json!(grid.lower)),
            ("grid_counts", json!(grid.counts)),
            ("preset", json!(self.preset.as_ref().map(|p| p.name))),
            ("jitter_seed", json!(self.jitter)),
        ])
    }
}

/// Adds independent uniform noise of at most `1e-9` times the bounding
/// box diagonal to every coordinate.
fn jitter(cloud: &PointCloud, seed: u64) -> rdad::Result<PointCloud> {
    let (lo, hi) = cloud.bounds();
    let diag = lo
        .iter()
        .zip(&hi)
        .map(|(a, b)| (b - a) * (b - a))
        .sum::<f64>()
        .sqrt();
    let eps = JITTER_SCALE * diag;
    let mut rng = synthgen::rng(replicate_seed(seed, usize::MAX, 0));
    let u = Uniform::new_inclusive(-eps, eps).expect("finite jitter bounds");
    let coords = cloud.coords().iter().map(|c| c + rng.sample(u)).collect();
    let moved = PointCloud::new(cloud.dim(), coords)?;
    match cloud.labels() {
        Some(l) => moved.with_labels(l.to_vec()),
        None => Ok(moved),
    }
}

fn field(ctx: &Ctx, fs: &FieldSettings, cloud: &PointCloud) -> Result<ScalarField, CliError> {
    let cloud = fs.prepare(cloud)?;
    let grid = fs.grid_for(&cloud)?;
    let registry = FiltrationRegistry::default();
    let f = build_field_with(&registry, &cloud, &fs.spec, &grid, true)?;
    let r = f.filtration().expect("built fields carry their filtration");
    info!(
        "field {}: N={} k_den={} k_dtm={} grid={}x{} delta_x={}",
        r.kind,
        cloud.len(),
        fmt_opt(r.k_den),
        fmt_opt(r.k_dtm),
        grid.counts[0],
        grid.counts[1],
        grid.delta_x
    );
    let mut w = ctx.create(FIELD_JSON)?;
    f.write_json(&mut w)?;
    w.flush()?;
    let mut w = ctx.create(FIELD_CSV)?;
    f.write_csv(&mut w)?;
    w.flush()?;

    let mut config = fs.config(&grid);
    config.insert("command".into(), json!("field"));
    config.insert("n_points".into(), json!(cloud.len()));
    manifest::record(&ctx.out, "field", &config, &[FIELD_JSON, FIELD_CSV])?;
    Ok(f)
}

fn fmt_opt(v: Option<usize>) -> String {
    v.map_or_else(|| "-".into(), |k| k.to_string())
}

struct EngineSettings {
    name: String,
    prime: u32,
}

impl EngineSettings {
    fn resolve(ctx: &Ctx, a: EngineArgs) -> Result<Self, CliError> {
        Ok(Self {
            name: ctx
                .file
                .pick(a.engine, "engine")?
                .unwrap_or_else(|| DEFAULT_ENGINE.into()),
            prime: ctx.file.pick(a.prime, "prime")?.unwrap_or(DEFAULT_PRIME),
        })
    }

    fn build(&self) -> Result<Arc<dyn PersistenceEngine>, CliError> {
        Ok(EngineRegistry::default()
            .build(&self.name, self.prime)?
            .into())
    }
}

fn persist(
    ctx: &Ctx,
    es: &EngineSettings,
    f: &ScalarField,
    indices: bool,
) -> Result<PersistenceDiagram, CliError> {
    let engine = es.build()?;
    let complex = build_complex(f).map_err(|e| CliError::Data(format!("field: {e}")))?;
    let d = engine.diagram(&complex);
    info!(
        "diagram: {} points in dimension 0, {} in dimension 1",
        d.in_dim(0).count(),
        d.in_dim(1).count()
    );
    let mut w = ctx.create(DIAGRAM)?;
    d.write_csv(&mut w, f.grid(), indices)?;
    w.flush()?;
    let config = config_of([
        ("command", json!("persist")),
        ("engine", json!(es.name)),
        ("prime", json!(es.prime)),
        ("indices", json!(indices)),
    ]);
    manifest::record(&ctx.out, "persist", &config, &[DIAGRAM])?;
    Ok(d)
}

struct BootSettings {
    cfg: BootstrapConfig,
}

impl BootSettings {
    fn resolve(ctx: &Ctx, a: BootArgs) -> Result<Self, CliError> {
        let f = &ctx.file;
        let mode = match f.pick::<String>(a.mode, "mode")? {
            Some(m) => m.parse::<BootstrapMode>()?,
            None => BootstrapMode::Subsample,
        };
        let cfg = BootstrapConfig {
            replicates: f.pick(a.replicates, "B")?.unwrap_or(DEFAULT_REPLICATES),
            alpha: f.pick(a.alpha, "alpha")?.unwrap_or(DEFAULT_ALPHA),
            seed: ctx.seed()?,
            mode,
            dim: f.pick(a.dim, "dim")?.unwrap_or(1),
            max_redraws: DEFAULT_MAX_REDRAWS,
        };
        cfg.validate()?;
        Ok(Self { cfg })
    }
}

fn bootstrap(
    ctx: &Ctx,
    fs: &FieldSettings,
    es: &EngineSettings,
    bs: &BootSettings,
    cloud: &PointCloud,
) -> Result<BootstrapResult, CliError> {
    let cloud = fs.prepare(cloud)?;
    let grid = fs.grid_for(&cloud)?;
    let pipeline = Pipeline::with_engine(fs.spec.clone(), grid.clone(), es.build()?);
    let empirical = pipeline.diagram(&cloud, true)?;
    let cfg = &bs.cfg;
    let result = match cfg.mode {
        BootstrapMode::Subsample => subsample_bootstrap(&cloud, &pipeline, cfg)?,
        BootstrapMode::Oracle => {
            let generator = fs
                .preset
                .as_ref()
                .and_then(|p| p.generator.clone())
                .ok_or_else(|| CliError::Config("oracle mode needs a generator --preset".into()))?;
            oracle_bootstrap(&cloud, generator, &pipeline, cfg)?
        }
    };
    let sig = significant_points(&empirical, cfg.dim, result.radius);
    info!(
        "bootstrap ({}, B={}): radius {} at alpha {}; {} significant points in dimension {}",
        cfg.mode,
        cfg.replicates,
        result.radius,
        cfg.alpha,
        sig.len(),
        cfg.dim
    );
    if result.reseeded_replicates > 0 {
        warn!(
            "{} replicates were redrawn after duplicate overload",
            result.reseeded_replicates
        );
    }
    write_json(ctx, BOOTSTRAP, &result)?;
    let mut w = ctx.create(SIGNIFICANT)?;
    write_significant_csv(&sig, &grid, &mut w)?;
    w.flush()?;

    let mut config = fs.config(&grid);
    config.extend(config_of([
        ("command", json!("bootstrap")),
        ("engine", json!(es.name)),
        ("prime", json!(es.prime)),
        ("mode", json!(cfg.mode)),
        ("B", json!(cfg.replicates)),
        ("alpha", json!(cfg.alpha)),
        ("dim", json!(cfg.dim)),
        ("seed", json!(cfg.seed)),
    ]));
    manifest::record(&ctx.out, "bootstrap", &config, &[BOOTSTRAP, SIGNIFICANT])?;
    Ok(result)
}

fn ingest(ctx: &Ctx, a: IngestCmd) -> Result<(), CliError> {
    let preset = ctx.preset(a.preset)?;
    let (lower, upper) = match (a.bbox, preset.as_ref().and_then(|p| p.grid_rect)) {
        (Some(b), _) => ([b.0[0], b.0[1]], [b.0[2], b.0[3]]),
        (None, Some(r)) => (r.lower, r.upper),
        (None, None) => {
            return Err(CliError::Config(
                "ingest needs --bbox or a preset with a grid rectangle".into(),
            ))
        }
    };
    let spec = CropSpec::new(lower, upper)?.with_columns(&a.x_column, &a.y_column);
    let input = ctx.input(Some(a.input), POINTS)?;
    // Read fully first: the input may be the points file being replaced.
    let bytes = std::fs::read(&input)?;
    let mut w = ctx.create(POINTS)?;
    let report = crop_points(bytes.as_slice(), &mut w, &spec)
        .map_err(|e| CliError::Data(format!("{}: {e}", input.display())))?;
    w.flush()?;
    info!("ingest: kept {} of {} rows", report.kept, report.read);
    if report.kept == 0 {
        warn!("no rows inside {lower:?}..{upper:?}; wrote an empty points file");
    }
    let config = config_of([
        ("command", json!("ingest")),
        ("input", json!(input.display().to_string())),
        ("lower", json!(lower)),
        ("upper", json!(upper)),
        ("x_column", json!(a.x_column)),
        ("y_column", json!(a.y_column)),
    ]);
    manifest::record(&ctx.out, "ingest", &config, &[POINTS])
}

fn write_json<T: serde::Serialize>(ctx: &Ctx, name: &str, value: &T) -> Result<(), CliError> {
    let mut w = ctx.create(name)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(rdad::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn config_of<const N: usize>(entries: [(&str, Value); N]) -> Config {
    entries
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
}
