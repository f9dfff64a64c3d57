//! `key = value` run configuration for the sweep command.
//!
//! Blank lines and lines starting with `#` are ignored. Lists are comma
//! separated. Unknown or repeated keys are errors.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::dsp::PreprocessConfig;
use crate::epoch::DEFAULT_BASELINE_GUARD_S;
use crate::eval::{ComparisonTask, ExperimentConfig, PipelineConfig};
use crate::models::{GridSpec, ModelKind};
use crate::types::Window;

pub const KEYS: [&str; 20] = [
    "data_dir",
    "output_dir",
    "fs_override",
    "windows",
    "tasks",
    "models",
    "seeds",
    "master_seed",
    "n_boot",
    "baseline_guard_s",
    "notch_q",
    "ppg_extra_hp",
    "grid.svm_c",
    "grid.svm_linear",
    "grid.svm_gamma",
    "grid.gbt_rounds",
    "grid.gbt_eta",
    "grid.gbt_depth",
    "grid.gbt_lambda",
    "threads",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub data_dir: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub fs_override: Option<f64>,
    pub windows: Vec<Window>,
    pub tasks: Vec<ComparisonTask>,
    pub models: Vec<ModelKind>,
    pub seeds: usize,
    pub master_seed: u64,
    pub n_boot: usize,
    pub baseline_guard_s: f64,
    pub notch_q: f64,
    pub ppg_extra_hp: bool,
    pub grid: GridSpec,
    /// Worker threads for the sweep; 0 uses every available core.
    pub threads: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        let exp = ExperimentConfig::default();
        Self {
            data_dir: None,
            output_dir: PathBuf::from("out"),
            fs_override: None,
            windows: exp.windows,
            tasks: exp.tasks,
            models: exp.models,
            seeds: exp.n_seeds,
            master_seed: exp.master_seed,
            n_boot: exp.n_boot,
            baseline_guard_s: DEFAULT_BASELINE_GUARD_S,
            notch_q: PreprocessConfig::default().notch_q,
            ppg_extra_hp: false,
            grid: GridSpec::default(),
            threads: 0,
        }
    }
}

fn list<T: FromStr>(value: &str) -> Result<Vec<T>, String> {
    let items = value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| format!("cannot parse '{s}'")))
        .collect::<Result<Vec<T>, String>>()?;
    if items.is_empty() {
        return Err("empty list".into());
    }
    Ok(items)
}

fn one<T: FromStr>(value: &str) -> Result<T, String> {
    value
        .trim()
        .parse::<T>()
        .map_err(|_| format!("cannot parse '{}'", value.trim()))
}

fn positive(values: &[f64]) -> Result<(), String> {
    if values.iter().all(|v| *v > 0.0 && v.is_finite()) {
        Ok(())
    } else {
        Err("values must be positive".into())
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    /// Parses config text on top of the defaults. Errors carry the line.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let key = key.trim();
            if seen.contains(&key.to_string()) {
                return Err(format!("line {}: duplicate key '{key}'", i + 1));
            }
            seen.push(key.to_string());
            cfg.set(key, value).map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        Ok(cfg)
    }

    /// Sets one key, validating the value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let err = |e: String| format!("{key}: {e}");
        match key {
            "data_dir" => {
                let v = value.trim();
                self.data_dir = (!v.is_empty()).then(|| PathBuf::from(v));
            }
            "output_dir" => self.output_dir = PathBuf::from(value.trim()),
            "fs_override" => {
                let v = value.trim();
                self.fs_override = if v.is_empty() || v == "none" {
                    None
                } else {
                    let fs: f64 = one(v).map_err(err)?;
                    positive(&[fs]).map_err(err)?;
                    Some(fs)
                };
            }
            "windows" => {
                self.windows = list::<f64>(value)
                    .and_then(|v| {
                        v.into_iter()
                            .map(|s| Window::try_from(s).map_err(|e| e.to_string()))
                            .collect()
                    })
                    .map_err(err)?;
            }
            "tasks" => self.tasks = list(value).map_err(err)?,
            "models" => self.models = list(value).map_err(err)?,
            "seeds" => {
                self.seeds = one(value).map_err(err)?;
                if self.seeds == 0 {
                    return Err(err("must be at least 1".into()));
                }
            }
            "master_seed" => self.master_seed = one(value).map_err(err)?,
            "n_boot" => {
                self.n_boot = one(value).map_err(err)?;
                if self.n_boot == 0 {
                    return Err(err("must be at least 1".into()));
                }
            }
            "baseline_guard_s" => {
                let g: f64 = one(value).map_err(err)?;
                if !(g >= 0.0 && g.is_finite()) {
                    return Err(err("must be non-negative".into()));
                }
                self.baseline_guard_s = g;
            }
            "notch_q" => {
                let q: f64 = one(value).map_err(err)?;
                positive(&[q]).map_err(err)?;
                self.notch_q = q;
            }
            "ppg_extra_hp" => self.ppg_extra_hp = one(value).map_err(err)?,
            "grid.svm_c" => {
                self.grid.svm_c = list(value).map_err(err)?;
                positive(&self.grid.svm_c).map_err(err)?;
            }
            "grid.svm_linear" => self.grid.svm_linear = one(value).map_err(err)?,
            "grid.svm_gamma" => {
                let v = value.trim();
                self.grid.svm_gamma = if v.is_empty() || v == "none" {
                    Vec::new()
                } else {
                    list(v).map_err(err)?
                };
                positive(&self.grid.svm_gamma).map_err(err)?;
            }
            "grid.gbt_rounds" => {
                self.grid.gbt_rounds = list(value).map_err(err)?;
                if self.grid.gbt_rounds.contains(&0) {
                    return Err(err("rounds must be positive".into()));
                }
            }
            "grid.gbt_eta" => {
                self.grid.gbt_eta = list(value).map_err(err)?;
                positive(&self.grid.gbt_eta).map_err(err)?;
            }
            "grid.gbt_depth" => {
                self.grid.gbt_depth = list(value).map_err(err)?;
                if self.grid.gbt_depth.contains(&0) {
                    return Err(err("depth must be positive".into()));
                }
            }
            "grid.gbt_lambda" => {
                self.grid.gbt_lambda = list(value).map_err(err)?;
                if !self.grid.gbt_lambda.iter().all(|l| *l >= 0.0 && l.is_finite()) {
                    return Err(err("lambda must be non-negative".into()));
                }
            }
            "threads" => self.threads = one(value).map_err(err)?,
            other => return Err(format!("unknown key '{other}'")),
        }
        if !self.grid.svm_linear && self.grid.svm_gamma.is_empty() {
            return Err("grid.svm_linear = false needs at least one grid.svm_gamma".into());
        }
        Ok(())
    }

    /// Canonical text listing every key; parsing it gives back `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| writeln!(out, "{k} = {v}").unwrap();
        put(
            "data_dir",
            self.data_dir
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
        );
        put("output_dir", self.output_dir.display().to_string());
        put(
            "fs_override",
            self.fs_override.map_or("none".into(), |f| f.to_string()),
        );
        put("windows", join(&self.windows));
        put("tasks", join(&self.tasks));
        put("models", join(&self.models));
        put("seeds", self.seeds.to_string());
        put("master_seed", self.master_seed.to_string());
        put("n_boot", self.n_boot.to_string());
        put("baseline_guard_s", self.baseline_guard_s.to_string());
        put("notch_q", self.notch_q.to_string());
        put("ppg_extra_hp", self.ppg_extra_hp.to_string());
        put("grid.svm_c", join(&self.grid.svm_c));
        put("grid.svm_linear", self.grid.svm_linear.to_string());
        put(
            "grid.svm_gamma",
            if self.grid.svm_gamma.is_empty() {
                "none".into()
            } else {
                join(&self.grid.svm_gamma)
            },
        );
        put("grid.gbt_rounds", join(&self.grid.gbt_rounds));
        put("grid.gbt_eta", join(&self.grid.gbt_eta));
        put("grid.gbt_depth", join(&self.grid.gbt_depth));
        put("grid.gbt_lambda", join(&self.grid.gbt_lambda));
        put("threads", self.threads.to_string());
        out
    }

    pub fn preprocess(&self) -> PreprocessConfig {
        PreprocessConfig {
            notch_q: self.notch_q,
            ppg_extra_hp: self.ppg_extra_hp,
            ..PreprocessConfig::default()
        }
    }

    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            preprocess: self.preprocess(),
            baseline_guard_s: self.baseline_guard_s,
            experiment: ExperimentConfig {
                windows: self.windows.clone(),
                tasks: self.tasks.clone(),
                models: self.models.clone(),
                n_seeds: self.seeds,
                master_seed: self.master_seed,
                n_boot: self.n_boot,
                grid: self.grid.clone(),
                ..ExperimentConfig::default()
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_echoes() {
        let text = "# sweep\ndata_dir = d\nwindows = 3, 10\nmodels = svm,gbt\nseeds=4\ngrid.svm_c = 1,10\n";
        let cfg = RunConfig::parse(text).unwrap();
        assert_eq!(cfg.windows, vec![Window::S3, Window::S10]);
        assert_eq!(cfg.models, vec![ModelKind::Svm, ModelKind::Gbt]);
        assert_eq!(cfg.seeds, 4);
        assert_eq!(cfg.grid.svm_c, vec![1.0, 10.0]);
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
        assert_eq!(RunConfig::parse(&RunConfig::default().to_text()).unwrap(), RunConfig::default());
        for key in KEYS {
            assert!(cfg.to_text().contains(&format!("\n{key} = ")) || cfg.to_text().starts_with(key));
        }
    }

    #[test]
    fn rejects_bad_input() {
        for (text, needle) in [
            ("colour = red", "unknown key 'colour'"),
            ("windows = 4", "windows"),
            ("seeds = 0", "seeds"),
            ("seeds = 1\nseeds = 2", "duplicate"),
            ("notch_q = -3", "notch_q"),
            ("tasks = everything", "tasks"),
            ("just words", "expected key = value"),
            ("grid.svm_linear = false\ngrid.svm_gamma = none", "svm_gamma"),
        ] {
            let e = RunConfig::parse(text).unwrap_err();
            assert!(e.contains(needle), "{text}: {e}");
        }
    }
}
