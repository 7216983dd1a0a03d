//! Run configuration: a flat `key = value` vocabulary resolved from
//! defaults, an optional config file, repeatable `--set` overrides, and
//! direct flags — later sources win. Every key carries provenance so runs
//! can echo exactly where each value came from.

use std::path::PathBuf;

use rbo_core::{EvolutionConfig, Grid, SeedProfile, SolverOptions, WaveParams};

use crate::CliError;

/// Where a resolved value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Default,
    File,
    Flag,
}

impl Source {
    pub fn label(self) -> &'static str {
        match self {
            Source::Default => "default",
            Source::File => "file",
            Source::Flag => "flag",
        }
    }
}

/// The complete key vocabulary with default values, in echo order.
const KEYS: &[(&str, &str)] = &[
    ("n", "1024"),
    ("half_length", "64"),
    ("c", "1"),
    ("gamma", "0.01"),
    ("gamma_list", ""),
    ("tol", "1e-10"),
    ("max_iter", "500"),
    ("alpha", "2"),
    ("seed_profile", "soliton"),
    ("damping", "none"),
    ("dt", "auto"),
    ("t_end", "1"),
    ("save_stride", "10"),
    ("dealias", "true"),
    ("amp", "0.01"),
    ("seed", "42"),
    ("t_horizon", "50"),
    ("ensemble", "1"),
    ("initial", ""),
    ("out_dir", "."),
];

fn canonical(key: &str) -> Option<&'static str> {
    KEYS.iter().map(|(k, _)| *k).find(|k| *k == key)
}

/// Direct command-line flags; they outrank both the file and `--set`.
#[derive(Debug, Default)]
pub struct FlagOverrides {
    pub c: Option<f64>,
    pub gamma: Option<f64>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
}

/// Typed, validated run parameters.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub half_length: f64,
    pub c: f64,
    pub gamma: f64,
    pub gamma_list: Vec<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub alpha: f64,
    pub seed_profile: SeedProfile,
    pub damping: Option<f64>,
    /// None means "auto": take the advisory step suggested by the data.
    pub dt: Option<f64>,
    pub t_end: f64,
    pub save_stride: usize,
    pub dealias: bool,
    pub amp: f64,
    pub seed: u64,
    pub t_horizon: f64,
    pub ensemble: usize,
    /// Initial field file for `evolve`; None means the built-in initial data.
    pub initial: Option<PathBuf>,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::new(self.n, self.half_length).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn params(&self) -> WaveParams {
        WaveParams { c: self.c, gamma: self.gamma }
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            alpha: self.alpha,
            seed: self.seed_profile,
            damping: self.damping,
        }
    }

    pub fn evolution_config(&self, dt: f64) -> EvolutionConfig {
        EvolutionConfig {
            dt,
            t_end: self.t_end,
            save_stride: self.save_stride,
            dealias: self.dealias,
            conserve_log: true,
        }
    }
}

/// A resolved configuration: the typed values plus the raw (value, source)
/// table in fixed key order, for the stdout echo and the run sidecar.
#[derive(Debug)]
pub struct Resolved {
    pub config: RunConfig,
    pub entries: Vec<(&'static str, String, Source)>,
}

/// Merge defaults, file, `--set` pairs, and flags (in that precedence
/// order), then validate into typed values. Unknown keys and malformed or
/// out-of-range values are configuration errors.
pub fn resolve(
    file_text: Option<&str>,
    sets: &[String],
    flags: &FlagOverrides,
) -> Result<Resolved, CliError> {
    let mut table: Vec<(&'static str, String, Source)> = KEYS
        .iter()
        .map(|&(k, v)| (k, v.to_string(), Source::Default))
        .collect();
    let mut put = |key: &'static str, value: String, source: Source| {
        let slot = table.iter_mut().find(|(k, _, _)| *k == key).expect("key is canonical");
        slot.1 = value;
        slot.2 = source;
    };

    if let Some(text) = file_text {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = split_pair(line)
                .ok_or_else(|| bad(format!("line {}: expected `key = value`", idx + 1)))?;
            let key = canonical(key)
                .ok_or_else(|| bad(format!("line {}: unknown key `{key}`", idx + 1)))?;
            put(key, value.to_string(), Source::File);
        }
    }

    for pair in sets {
        let (key, value) = split_pair(pair)
            .ok_or_else(|| bad(format!("--set {pair}: expected `key=value`")))?;
        let key = canonical(key).ok_or_else(|| bad(format!("--set: unknown key `{key}`")))?;
        put(key, value.to_string(), Source::Flag);
    }

    if let Some(c) = flags.c {
        put("c", format!("{c}"), Source::Flag);
    }
    if let Some(gamma) = flags.gamma {
        put("gamma", format!("{gamma}"), Source::Flag);
    }
    if let Some(seed) = flags.seed {
        put("seed", format!("{seed}"), Source::Flag);
    }
    if let Some(dir) = &flags.out_dir {
        put("out_dir", dir.display().to_string(), Source::Flag);
    }

    let config = typed(&table)?;
    Ok(Resolved { config, entries: table })
}

fn split_pair(s: &str) -> Option<(&str, &str)> {
    let (k, v) = s.split_once('=')?;
    let k = k.trim();
    if k.is_empty() {
        return None;
    }
    Some((k, v.trim()))
}

fn bad(msg: String) -> CliError {
    CliError::Config(msg)
}

fn get<'a>(table: &'a [(&'static str, String, Source)], key: &str) -> &'a str {
    &table.iter().find(|(k, _, _)| *k == key).expect("key is canonical").1
}

fn f64_key(table: &[(&'static str, String, Source)], key: &str) -> Result<f64, CliError> {
    let raw = get(table, key);
    raw.parse::<f64>()
        .map_err(|_| bad(format!("key `{key}` expects a number, got `{raw}`")))
}

fn usize_key(table: &[(&'static str, String, Source)], key: &str) -> Result<usize, CliError> {
    let raw = get(table, key);
    raw.parse::<usize>()
        .map_err(|_| bad(format!("key `{key}` expects a nonnegative integer, got `{raw}`")))
}

fn typed(table: &[(&'static str, String, Source)]) -> Result<RunConfig, CliError> {
    let n = usize_key(table, "n")?;
    if !n.is_power_of_two() || n < 16 {
        return Err(bad(format!("key `n` must be a power of two at least 16, got {n}")));
    }
    let half_length = f64_key(table, "half_length")?;
    if !(half_length.is_finite() && half_length > 0.0) {
        return Err(bad(format!(
            "key `half_length` must be positive and finite, got {half_length}"
        )));
    }
    let c = f64_key(table, "c")?;
    if !(c.is_finite() && c > 0.0) {
        return Err(bad(format!("key `c` must be positive and finite, got {c}")));
    }
    let gamma = f64_key(table, "gamma")?;
    if !(gamma.is_finite() && gamma >= 0.0) {
        return Err(bad(format!("key `gamma` must be nonnegative and finite, got {gamma}")));
    }

    let raw_list = get(table, "gamma_list");
    let mut gamma_list = Vec::new();
    if !raw_list.is_empty() {
        for piece in raw_list.split(',') {
            let piece = piece.trim();
            let value = piece.parse::<f64>().map_err(|_| {
                bad(format!("key `gamma_list` expects comma-separated numbers, got `{piece}`"))
            })?;
            if !(value.is_finite() && value > 0.0) {
                return Err(bad(format!(
                    "key `gamma_list` entries must be positive and finite, got {value}"
                )));
            }
            gamma_list.push(value);
        }
        if gamma_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(bad(format!(
                "key `gamma_list` must be strictly decreasing, got `{raw_list}`"
            )));
        }
    }

    let tol = f64_key(table, "tol")?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(bad(format!("key `tol` must be positive and finite, got {tol}")));
    }
    let max_iter = usize_key(table, "max_iter")?;
    if max_iter == 0 {
        return Err(bad("key `max_iter` must be at least 1".to_string()));
    }
    let alpha = f64_key(table, "alpha")?;
    if !(1.0..=3.0).contains(&alpha) {
        return Err(bad(format!("key `alpha` must lie in [1, 3], got {alpha}")));
    }

    let seed_profile = match get(table, "seed_profile") {
        "gaussian" => SeedProfile::Gaussian,
        "sech2" => SeedProfile::SechSquared,
        "soliton" => SeedProfile::Soliton,
        other => {
            return Err(bad(format!(
                "key `seed_profile` must be one of gaussian | sech2 | soliton, got `{other}`"
            )))
        }
    };

    let damping = match get(table, "damping") {
        "none" => None,
        raw => {
            let value = raw.parse::<f64>().map_err(|_| {
                bad(format!("key `damping` expects a number or `none`, got `{raw}`"))
            })?;
            if !(value > 0.0 && value <= 1.0) {
                return Err(bad(format!("key `damping` must lie in (0, 1], got {value}")));
            }
            Some(value)
        }
    };

    let dt = match get(table, "dt") {
        "auto" => None,
        raw => {
            let value = raw
                .parse::<f64>()
                .map_err(|_| bad(format!("key `dt` expects a number or `auto`, got `{raw}`")))?;
            if !(value.is_finite() && value > 0.0) {
                return Err(bad(format!("key `dt` must be positive and finite, got {value}")));
            }
            Some(value)
        }
    };

    let t_end = f64_key(table, "t_end")?;
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(bad(format!("key `t_end` must be nonnegative and finite, got {t_end}")));
    }
    let save_stride = usize_key(table, "save_stride")?;
    if save_stride == 0 {
        return Err(bad("key `save_stride` must be at least 1".to_string()));
    }
    let dealias = match get(table, "dealias") {
        "true" => true,
        "false" => false,
        other => {
            return Err(bad(format!("key `dealias` must be true or false, got `{other}`")))
        }
    };
    let amp = f64_key(table, "amp")?;
    if !(amp.is_finite() && amp >= 0.0) {
        return Err(bad(format!("key `amp` must be nonnegative and finite, got {amp}")));
    }
    let raw_seed = get(table, "seed");
    let seed = raw_seed
        .parse::<u64>()
        .map_err(|_| bad(format!("key `seed` expects an unsigned integer, got `{raw_seed}`")))?;
    let t_horizon = f64_key(table, "t_horizon")?;
    if !(t_horizon.is_finite() && t_horizon >= 0.0) {
        return Err(bad(format!(
            "key `t_horizon` must be nonnegative and finite, got {t_horizon}"
        )));
    }
    let ensemble = usize_key(table, "ensemble")?;
    if ensemble == 0 {
        return Err(bad("key `ensemble` must be at least 1".to_string()));
    }

    let initial = match get(table, "initial") {
        "" => None,
        path => Some(PathBuf::from(path)),
    };
    let out_dir = PathBuf::from(get(table, "out_dir"));

    Ok(RunConfig {
        n,
        half_length,
        c,
        gamma,
        gamma_list,
        tol,
        max_iter,
        alpha,
        seed_profile,
        damping,
        dt,
        t_end,
        save_stride,
        dealias,
        amp,
        seed,
        t_horizon,
        ensemble,
        initial,
        out_dir,
    })
}
