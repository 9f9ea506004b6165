//! Run configuration and the flat key-value config format.
//!
//! The config file is line-oriented `key = value` with `#` comments. Keys
//! mirror the [`RunConfig`] fields; unknown keys are errors so typos cannot
//! silently fall back to defaults.

use crate::error::{CliError, Result};
use icegsa_core::Builtin;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Where the data comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Builtin(Builtin),
    Csv {
        path: PathBuf,
        output_column: String,
        input_columns: Option<Vec<String>>,
    },
}

/// A marginal declared in the config, resolved against the data later.
#[derive(Debug, Clone, PartialEq)]
pub enum MarginalDecl {
    Uniform { lo: f64, hi: f64 },
    Gaussian { mean: f64, std: f64 },
    Empirical,
}

/// Full description of one run.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub source: Source,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Declared marginals by column name; anything undeclared is inferred
    /// empirically for CSV sources.
    pub marginals: Vec<(String, MarginalDecl)>,
    pub anchor: Option<Vec<f64>>,
    pub use_surrogate: bool,
    pub p_max: u32,
    pub q: f64,
    pub train_fraction: f64,
    /// Training-set size when fitting a surrogate to a builtin function.
    pub n_train: usize,
    pub k_grid: usize,
    pub k_joint: usize,
    pub n_mc: usize,
    pub n_base: usize,
    pub n_pts: usize,
    pub n_bg: usize,
    pub emit_json: bool,
    pub emit_csv: bool,
    pub emit_svg: bool,
}

impl RunConfig {
    pub fn builtin(b: Builtin, seed: u64) -> Self {
        Self {
            source: Source::Builtin(b),
            seed,
            out_dir: PathBuf::from("out"),
            marginals: Vec::new(),
            anchor: None,
            use_surrogate: false,
            p_max: 5,
            q: 1.0,
            train_fraction: 0.8,
            n_train: 2000,
            k_grid: 50,
            k_joint: 25,
            n_mc: 10_000,
            n_base: 100_000,
            n_pts: 10_000,
            n_bg: 1_000,
            emit_json: true,
            emit_csv: true,
            emit_svg: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction <= 1.0) {
            return Err(CliError::Config(format!(
                "train_fraction must be in (0, 1], got {}",
                self.train_fraction
            )));
        }
        if self.p_max < 1 {
            return Err(CliError::Config("p_max must be >= 1".into()));
        }
        if !(self.q > 0.0 && self.q <= 1.0) {
            return Err(CliError::Config(format!("q must be in (0, 1], got {}", self.q)));
        }
        if self.k_grid < 2 || self.k_joint < 2 {
            return Err(CliError::Config("grid sizes must be >= 2".into()));
        }
        if self.n_mc < 2 || self.n_base < 100 || self.n_pts < 1 || self.n_bg < 1 {
            return Err(CliError::Config(
                "sample sizes too small (n_mc >= 2, n_base >= 100, n_pts/n_bg >= 1)".into(),
            ));
        }
        if !self.emit_json && !self.emit_csv && !self.emit_svg {
            return Err(CliError::Config("at least one emit target required".into()));
        }
        Ok(())
    }

    pub fn source_label(&self) -> String {
        match &self.source {
            Source::Builtin(b) => format!("builtin:{b}"),
            Source::Csv { path, .. } => format!("csv:{}", path.display()),
        }
    }
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(CliError::Config(format!("{key}: expected true/false, got '{v}'"))),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>()
        .map_err(|_| CliError::Config(format!("{key}: invalid number '{v}'")))
}

/// Parses `uniform(lo, hi)`, `gaussian(mean, std)`, or `empirical`.
fn parse_marginal_decl(v: &str) -> Result<MarginalDecl> {
    let v = v.trim();
    if v == "empirical" {
        return Ok(MarginalDecl::Empirical);
    }
    let (kind, rest) = v
        .split_once('(')
        .ok_or_else(|| CliError::Config(format!("invalid marginal '{v}'")))?;
    let args = rest
        .strip_suffix(')')
        .ok_or_else(|| CliError::Config(format!("invalid marginal '{v}': missing ')'")))?;
    let nums: Vec<f64> = args
        .split(',')
        .map(|s| parse_num::<f64>("marginal", s.trim()))
        .collect::<Result<_>>()?;
    if nums.len() != 2 {
        return Err(CliError::Config(format!(
            "marginal '{v}' needs exactly two parameters"
        )));
    }
    match kind.trim() {
        "uniform" => Ok(MarginalDecl::Uniform { lo: nums[0], hi: nums[1] }),
        "gaussian" => Ok(MarginalDecl::Gaussian { mean: nums[0], std: nums[1] }),
        other => Err(CliError::Config(format!("unknown marginal family '{other}'"))),
    }
}

/// Applies a comma-separated emit list, e.g. `json,csv,svg`.
pub fn apply_emit_list(cfg: &mut RunConfig, v: &str) -> Result<()> {
    cfg.emit_json = false;
    cfg.emit_csv = false;
    cfg.emit_svg = false;
    for item in v.split(',') {
        match item.trim() {
            "json" => cfg.emit_json = true,
            "csv" => cfg.emit_csv = true,
            "svg" => cfg.emit_svg = true,
            other => {
                return Err(CliError::Config(format!("emit: unknown target '{other}'")))
            }
        }
    }
    Ok(())
}

/// Parses the flat key-value config format.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<RunConfig> {
    let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Config(format!("line {}: expected 'key = value'", line_no + 1))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if entries.insert(key.clone(), (line_no + 1, value)).is_some() {
            return Err(CliError::Config(format!(
                "line {}: duplicate key '{key}'",
                line_no + 1
            )));
        }
    }

    let mut take = |k: &str| entries.remove(k).map(|(_, v)| v);

    // Source: exactly one of builtin / csv.
    let builtin = take("builtin");
    let csv = take("csv");
    let output = take("output");
    let inputs = take("inputs");
    let source = match (builtin, csv) {
        (Some(b), None) => {
            if output.is_some() || inputs.is_some() {
                return Err(CliError::Config(
                    "output/inputs only apply to csv sources".into(),
                ));
            }
            Source::Builtin(
                b.parse::<Builtin>().map_err(|e| CliError::Config(e.to_string()))?,
            )
        }
        (None, Some(path)) => {
            let output_column = output
                .ok_or_else(|| CliError::Config("csv source requires 'output'".into()))?;
            let input_columns = inputs
                .map(|s| s.split(',').map(|c| c.trim().to_string()).collect::<Vec<_>>());
            let p = PathBuf::from(path);
            let path = if p.is_absolute() { p } else { base_dir.join(p) };
            Source::Csv { path, output_column, input_columns }
        }
        (Some(_), Some(_)) => {
            return Err(CliError::Config("exactly one source: builtin or csv".into()))
        }
        (None, None) => {
            return Err(CliError::Config("missing source: set builtin or csv".into()))
        }
    };

    let seed = take("seed")
        .ok_or_else(|| CliError::Config("seed is mandatory".into()))
        .and_then(|v| parse_num::<u64>("seed", &v))?;

    let mut cfg = match source {
        Source::Builtin(b) => RunConfig::builtin(b, seed),
        s => {
            let mut c = RunConfig::builtin(Builtin::Goldstein3, seed);
            c.source = s;
            c
        }
    };

    if let Some(v) = take("out_dir") {
        let p = PathBuf::from(v);
        cfg.out_dir = if p.is_absolute() { p } else { base_dir.join(p) };
    }
    if let Some(v) = take("anchor") {
        cfg.anchor = Some(
            v.split(',')
                .map(|s| parse_num::<f64>("anchor", s.trim()))
                .collect::<Result<_>>()?,
        );
    }
    if let Some(v) = take("use_surrogate") {
        cfg.use_surrogate = parse_bool("use_surrogate", &v)?;
    }
    if let Some(v) = take("p_max") {
        cfg.p_max = parse_num("p_max", &v)?;
    }
    if let Some(v) = take("q") {
        cfg.q = parse_num("q", &v)?;
    }
    if let Some(v) = take("train_fraction") {
        cfg.train_fraction = parse_num("train_fraction", &v)?;
    }
    if let Some(v) = take("n_train") {
        cfg.n_train = parse_num("n_train", &v)?;
    }
    if let Some(v) = take("k_grid") {
        cfg.k_grid = parse_num("k_grid", &v)?;
    }
    if let Some(v) = take("k_joint") {
        cfg.k_joint = parse_num("k_joint", &v)?;
    }
    if let Some(v) = take("n_mc") {
        cfg.n_mc = parse_num("n_mc", &v)?;
    }
    if let Some(v) = take("n_base") {
        cfg.n_base = parse_num("n_base", &v)?;
    }
    if let Some(v) = take("n_pts") {
        cfg.n_pts = parse_num("n_pts", &v)?;
    }
    if let Some(v) = take("n_bg") {
        cfg.n_bg = parse_num("n_bg", &v)?;
    }
    if let Some(v) = take("emit") {
        apply_emit_list(&mut cfg, &v)?;
    }

    // Remaining keys: marginal.<name> declarations, else unknown.
    let leftover: Vec<(String, (usize, String))> = entries.into_iter().collect();
    for (key, (line_no, value)) in leftover {
        if let Some(name) = key.strip_prefix("marginal.") {
            cfg.marginals.push((name.to_string(), parse_marginal_decl(&value)?));
        } else {
            return Err(CliError::Config(format!(
                "line {line_no}: unknown key '{key}'"
            )));
        }
    }

    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_builtin_config() {
        let cfg = parse_config("builtin = friedman5\nseed = 42\n", Path::new(".")).unwrap();
        assert_eq!(cfg.source, Source::Builtin(Builtin::Friedman5));
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.k_grid, 50);
        assert!(cfg.emit_json && cfg.emit_csv && cfg.emit_svg);
    }

    #[test]
    fn comments_and_overrides() {
        let text = "\
# a comment
builtin = goldstein3   # trailing comment
seed = 7
n_mc = 500
emit = json
";
        let cfg = parse_config(text, Path::new(".")).unwrap();
        assert_eq!(cfg.n_mc, 500);
        assert!(cfg.emit_json && !cfg.emit_csv && !cfg.emit_svg);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = parse_config("builtin = friedman5\nseed = 1\nnmc = 3\n", Path::new("."))
            .unwrap_err();
        assert!(err.to_string().contains("unknown key 'nmc'"), "{err}");
    }

    #[test]
    fn seed_is_mandatory() {
        let err = parse_config("builtin = friedman5\n", Path::new(".")).unwrap_err();
        assert!(err.to_string().contains("seed"));
    }

    #[test]
    fn exactly_one_source() {
        assert!(parse_config("seed = 1\n", Path::new(".")).is_err());
        assert!(parse_config(
            "builtin = friedman5\ncsv = x.csv\noutput = y\nseed = 1\n",
            Path::new(".")
        )
        .is_err());
    }

    #[test]
    fn csv_source_with_marginals() {
        let text = "\
csv = data.csv
output = y
seed = 3
marginal.x1 = uniform(0, 1)
marginal.x2 = gaussian(0.5, 2)
marginal.x3 = empirical
";
        let cfg = parse_config(text, Path::new("/tmp")).unwrap();
        match &cfg.source {
            Source::Csv { path, output_column, .. } => {
                assert_eq!(path, &PathBuf::from("/tmp/data.csv"));
                assert_eq!(output_column, "y");
            }
            _ => panic!("expected csv source"),
        }
        assert_eq!(cfg.marginals.len(), 3);
        assert_eq!(cfg.marginals[0].1, MarginalDecl::Uniform { lo: 0.0, hi: 1.0 });
    }

    #[test]
    fn invalid_train_fraction() {
        let err = parse_config(
            "builtin = friedman5\nseed = 1\ntrain_fraction = 1.5\n",
            Path::new("."),
        )
        .unwrap_err();
        assert!(err.to_string().contains("train_fraction"));
    }

    #[test]
    fn duplicate_key_rejected() {
        let err =
            parse_config("builtin = friedman5\nseed = 1\nseed = 2\n", Path::new("."))
                .unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }
}
