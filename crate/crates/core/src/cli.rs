//! The `migr` command line.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs::{self, OpenOptions};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, IngredientKind};
use crate::error::{Error, Result};
use crate::migr::synthesize_migr;
use crate::oracles::potential_kernel_integral;
use crate::recovery::{
    ergodic::{spread_csv, synthetic_csv},
    ergodic_diagnostic_data, ergodic_diagnostic_synthetic, nearfield_samples, nearfield_second_moment,
    recover_potential_strength, recover_source_strength, spectral_rel_error, SyntheticProcess,
};
use crate::rsgf::{write_field, AnyField};
use crate::scatter::{band_sweep, ingredient_seed, AcquisitionKind, FarFieldSet};
use crate::validate::{run_invariants, table};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "migr", version, about = "Random Schrödinger scattering: synthesis, sweeps and single-realization recovery")]
struct Cli {
    /// Run log to append the provenance line to [default: <output>/run.log, or ./run.log]
    #[arg(long, global = true)]
    log: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArg {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw one realization of a configured ingredient and write it as RSGF.
    Synth {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Which ingredient to draw: source or potential.
        #[arg(long)]
        which: Option<String>,
    },
    /// Far fields over the configured band and directions for one realization.
    Sweep {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the source strength from passive data.
    RecoverSource {
        #[command(flatten)]
        cfg: ConfigArg,
        /// Directory holding manifest.txt and farfield.csv [default: <output>/sweep]
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover the potential strength from backscatter data.
    RecoverPotential {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Near-field second moments at the configured points.
    Nearfield {
        #[command(flatten)]
        cfg: ConfigArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite and print a pass/fail table.
    Validate {
        /// Only run checks whose module/name contains this string.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Band-spread diagnostic for recorded data or a synthetic process.
    DiagnoseErgodic {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Band starts K, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        bands: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        tau: f64,
        /// Index into the direction list of the data.
        #[arg(long, default_value_t = 0)]
        dir: usize,
        /// Use the synthetic independent-mesh process instead of data.
        #[arg(long)]
        synthetic: bool,
        #[arg(long, default_value_t = 0.7)]
        c0: f64,
        #[arg(long, default_value_t = 2.5)]
        m: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 0.125)]
        delta: f64,
        #[arg(long, default_value_t = 50)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// What a run contributes to the provenance line.
struct Provenance {
    config_hash: String,
    seed: Option<u64>,
    default_log: PathBuf,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::new(), |mut s, b| {
        write!(s, "{b:02x}").unwrap();
        s
    })
}

fn load(path: &Path) -> Result<(ExperimentConfig, Provenance)> {
    let bytes = fs::read(path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| Error::config(format!("{} is not UTF-8", path.display())))?;
    let cfg = ExperimentConfig::parse(&text)?;
    let prov = Provenance { config_hash: sha256_hex(&bytes), seed: Some(cfg.seed), default_log: cfg.output.join("run.log") };
    Ok((cfg, prov))
}

fn no_config() -> Provenance {
    Provenance { config_hash: "none".into(), seed: None, default_log: PathBuf::from("run.log") }
}

fn emit(path: &Path, body: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, body)?;
    Ok(())
}

struct Outcome {
    prov: Provenance,
    artifacts: Vec<PathBuf>,
    /// Set when the command ran but its verdict is a failure.
    failed: bool,
}

fn synth(cfg_path: &Path, out: Option<PathBuf>, which: Option<String>) -> Result<Outcome> {
    let (cfg, prov) = load(cfg_path)?;
    let which = which.unwrap_or_else(|| if cfg.source.is_some() { "source".into() } else { "potential".into() });
    let (ing, slot) = match which.as_str() {
        "source" => (cfg.source.as_ref(), 0),
        "potential" => (cfg.potential.as_ref(), 1),
        other => return Err(Error::config(format!("--which {other:?} must be source or potential"))),
    };
    let ing = ing.ok_or_else(|| Error::config(format!("config has no [{which}] section")))?;
    let field = match ing.kind {
        IngredientKind::Fixed => ing.profile(cfg.grid)?,
        IngredientKind::Random { .. } => match ing.ingredient(cfg.grid)? {
            crate::scatter::Ingredient::Random(spec) => synthesize_migr(&spec, ingredient_seed(cfg.seed, slot))?.field,
            _ => unreachable!("random ingredient"),
        },
    };
    let out = out.unwrap_or_else(|| cfg.output.join(format!("{which}.rsgf")));
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    write_field(&out, &AnyField::Real(field))?;
    Ok(Outcome { prov, artifacts: vec![out], failed: false })
}

fn sweep(cfg_path: &Path, out: Option<PathBuf>) -> Result<Outcome> {
    let (cfg, prov) = load(cfg_path)?;
    let setup = cfg.sweep_setup()?;
    let set = band_sweep(&setup, &cfg.band.frequencies(), &cfg.directions, cfg.mode, cfg.seed)?;
    let out = out.unwrap_or_else(|| cfg.output.join("sweep"));
    set.write(&out)?;
    Ok(Outcome { prov, artifacts: vec![out], failed: false })
}

fn recover(cfg_path: &Path, data: Option<PathBuf>, out: Option<PathBuf>, kind: AcquisitionKind) -> Result<Outcome> {
    let (cfg, prov) = load(cfg_path)?;
    let data = data.unwrap_or_else(|| cfg.output.join("sweep"));
    let ff = FarFieldSet::read(&data)?;
    let (d_data, d_cfg) = (ff.delta(), cfg.band.delta);
    if (d_data - d_cfg).abs() > 1e-9 * d_cfg {
        return Err(Error::config(format!(
            "mesh mismatch: sweep in {} has delta = {d_data}, config band.delta = {d_cfg}",
            data.display()
        )));
    }
    let req = cfg.recovery_request(kind)?;
    let truth = cfg.ground_truth(kind)?;
    let report = match kind {
        AcquisitionKind::Passive => recover_source_strength(&ff, &req, truth.as_ref())?,
        AcquisitionKind::ActiveBackscatter => recover_potential_strength(&ff, &req, truth.as_ref())?,
    };
    let mut extra = vec![
        ("config_sha256".to_string(), prov.config_hash.clone()),
        ("seed".to_string(), ff.meta.seed.to_string()),
        ("version".to_string(), VERSION.to_string()),
    ];
    // recorded, not enforced: the joint recovery assumes m_f < 5 m_q - 11 (and m_q < m_f for q)
    if let (Some(mf), Some(mq)) =
        (cfg.source.as_ref().and_then(|s| s.order()), cfg.potential.as_ref().and_then(|p| p.order()))
    {
        let holds = match kind {
            AcquisitionKind::Passive => mf < 5.0 * mq - 11.0,
            AcquisitionKind::ActiveBackscatter => mf < 5.0 * mq - 11.0 && mq < mf,
        };
        extra.push(("order_condition".to_string(), if holds { "satisfied" } else { "violated" }.to_string()));
    }
    let target = match kind {
        AcquisitionKind::Passive => cfg.source.as_ref(),
        AcquisitionKind::ActiveBackscatter => cfg.potential.as_ref(),
    };
    if let Some(t) = target.filter(|t| t.order().is_some()) {
        let err = spectral_rel_error(&report.mu_hat_samples, |xi| t.shape.fourier(xi));
        extra.push(("spectral_rel_error".to_string(), format!("{err:.16e}")));
    }
    let name = match kind {
        AcquisitionKind::Passive => "recover-source",
        AcquisitionKind::ActiveBackscatter => "recover-potential",
    };
    let out = out.unwrap_or_else(|| cfg.output.join(name));
    report.write(&out, &extra)?;
    Ok(Outcome { prov, artifacts: vec![out], failed: false })
}

fn nearfield(cfg_path: &Path, out: Option<PathBuf>) -> Result<Outcome> {
    let (cfg, prov) = load(cfg_path)?;
    let nf = cfg.nearfield.as_ref().ok_or_else(|| Error::config("missing section [nearfield]"))?;
    let src = cfg.source.as_ref().ok_or_else(|| Error::config("nearfield needs a [source] section"))?;
    let m = src.order().ok_or_else(|| Error::config("nearfield needs a random source (source.kind = random)"))?;
    let spec = match src.ingredient(cfg.grid)? {
        crate::scatter::Ingredient::Random(spec) => spec,
        _ => unreachable!("random ingredient"),
    };
    let f = synthesize_migr(&spec, ingredient_seed(cfg.seed, 0))?.field;
    let ks = nf.frequencies();
    let mut csv = String::from("x,y,z,estimate,kernel_integral,ratio\n");
    for &x in &nf.points {
        let est = nearfield_second_moment(&nearfield_samples(&f, x, &ks)?, m)?;
        let oracle = potential_kernel_integral(spec.strength(), x)?;
        writeln!(csv, "{:.16e},{:.16e},{:.16e},{est:.16e},{oracle:.16e},{:.16e}", x[0], x[1], x[2], est / oracle).unwrap();
    }
    let out = out.unwrap_or_else(|| cfg.output.join("nearfield.csv"));
    emit(&out, &csv)?;
    Ok(Outcome { prov, artifacts: vec![out], failed: false })
}

fn validate(filter: Option<String>, config: Option<PathBuf>, out: Option<PathBuf>) -> Result<Outcome> {
    let prov = match &config {
        Some(p) => load(p)?.1,
        None => no_config(),
    };
    let checks = run_invariants(filter.as_deref());
    if checks.is_empty() {
        return Err(Error::config(format!("no check matches filter {:?}", filter.unwrap_or_default())));
    }
    let text = table(&checks);
    print!("{text}");
    let mut artifacts = Vec::new();
    if let Some(out) = out {
        emit(&out, &text)?;
        artifacts.push(out);
    }
    Ok(Outcome { prov, artifacts, failed: checks.iter().any(|c| !c.passed) })
}

#[allow(clippy::too_many_arguments)]
fn diagnose(
    config: Option<PathBuf>,
    data: Option<PathBuf>,
    bands: Vec<f64>,
    tau: f64,
    dir: usize,
    synthetic: bool,
    process: (f64, f64, f64),
    delta: f64,
    reps: usize,
    seed: u64,
    out: Option<PathBuf>,
) -> Result<Outcome> {
    let (prov, out_default) = match &config {
        Some(p) => {
            let (cfg, prov) = load(p)?;
            let out = cfg.output.join("ergodic.csv");
            (prov, out)
        }
        None => (no_config(), PathBuf::from("ergodic.csv")),
    };
    let csv = if synthetic {
        let (c0, m, rho) = process;
        let p = SyntheticProcess::new(c0, m, rho)?;
        synthetic_csv(&ergodic_diagnostic_synthetic(&p, m, &bands, delta, reps, seed)?)
    } else {
        let data = match (data, &config) {
            (Some(d), _) => d,
            (None, Some(p)) => load(p)?.0.output.join("sweep"),
            (None, None) => return Err(Error::config("diagnose-ergodic needs --data, --config or --synthetic")),
        };
        let ff = FarFieldSet::read(&data)?;
        let d = *ff
            .dirs()
            .get(dir)
            .ok_or_else(|| Error::config(format!("--dir {dir} is out of range ({} directions)", ff.dirs().len())))?;
        let m = ff.meta.m.unwrap_or(0.0);
        spread_csv(&ergodic_diagnostic_data(&ff, m, tau, d, &bands)?)
    };
    let out = out.unwrap_or(out_default);
    emit(&out, &csv)?;
    Ok(Outcome { prov, artifacts: vec![out], failed: false })
}

fn append_log(path: &Path, line: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    writeln!(f, "{line}")
}

fn exit_code(e: &Error) -> i32 {
    if e.is_numeric() {
        1
    } else {
        2
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Synth { .. } => "synth",
        Command::Sweep { .. } => "sweep",
        Command::RecoverSource { .. } => "recover-source",
        Command::RecoverPotential { .. } => "recover-potential",
        Command::Nearfield { .. } => "nearfield",
        Command::Validate { .. } => "validate",
        Command::DiagnoseErgodic { .. } => "diagnose-ergodic",
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit code: 0 on success, 1 on numeric failure, 2 on bad input.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let name = command_name(&cli.command);
    let result = match cli.command {
        Command::Synth { cfg, out, which } => synth(&cfg.config, out, which),
        Command::Sweep { cfg, out } => sweep(&cfg.config, out),
        Command::RecoverSource { cfg, data, out } => recover(&cfg.config, data, out, AcquisitionKind::Passive),
        Command::RecoverPotential { cfg, data, out } => {
            recover(&cfg.config, data, out, AcquisitionKind::ActiveBackscatter)
        }
        Command::Nearfield { cfg, out } => nearfield(&cfg.config, out),
        Command::Validate { filter, config, out } => validate(filter, config, out),
        Command::DiagnoseErgodic { config, data, bands, tau, dir, synthetic, c0, m, rho, delta, reps, seed, out } => {
            diagnose(config, data, bands, tau, dir, synthetic, (c0, m, rho), delta, reps, seed, out)
        }
    };
    let (code, prov, artifacts) = match result {
        Ok(o) => (if o.failed { 1 } else { 0 }, Some(o.prov), o.artifacts),
        Err(e) => {
            eprintln!("migr {name}: {e}");
            (exit_code(&e), None, Vec::new())
        }
    };
    // failed runs still leave a line; the config hash is unknown when the config did not load
    let prov = prov.unwrap_or_else(no_config);
    let log = cli.log.unwrap_or(prov.default_log);
    let stamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let seed = prov.seed.map_or("none".to_string(), |s| s.to_string());
    let outs: Vec<String> = artifacts.iter().map(|p| p.display().to_string()).collect();
    let line = format!(
        "time={stamp} command={name} version={VERSION} config_sha256={} seed={seed} exit={code} artifacts={}",
        prov.config_hash,
        outs.join(";")
    );
    if let Err(e) = append_log(&log, &line) {
        eprintln!("migr {name}: cannot append to run log {}: {e}", log.display());
        return if code == 0 { 2 } else { code };
    }
    code
}
