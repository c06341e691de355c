use std::path::Path;

use microcalc::germ::HorizonSchedule;
use microcalc::numeric::Rational;
use microcalc::{Error, Result};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    #[default]
    Text,
    Json,
}

/// Settings read from the TOML file named by `--config` or `MICROCALC_CONFIG`.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub trunc: Option<i64>,
    pub precision: Option<u32>,
    pub horizons: Option<Vec<u64>>,
    pub r_max: Option<i64>,
    pub output: Option<Output>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::usage(format!("invalid config {}: {e}", path.display())))
    }
}

#[derive(Clone, Debug)]
pub struct Config {
    pub trunc: i64,
    pub precision: u32,
    /// Explicit horizon override; commands fall back to their own defaults.
    pub horizons: Option<Vec<u64>>,
    pub r_max: i64,
    pub output: Output,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            trunc: 8,
            precision: 15,
            horizons: None,
            r_max: 64,
            output: Output::Text,
        }
    }
}

impl Config {
    /// Layers a file config under explicit flag values.
    pub fn resolve(file: FileConfig, flags: FileConfig) -> Result<Self> {
        let d = Config::default();
        let c = Config {
            trunc: flags.trunc.or(file.trunc).unwrap_or(d.trunc),
            precision: flags.precision.or(file.precision).unwrap_or(d.precision),
            horizons: flags.horizons.or(file.horizons),
            r_max: flags.r_max.or(file.r_max).unwrap_or(d.r_max),
            output: flags.output.or(file.output).unwrap_or(d.output),
        };
        if c.trunc < 2 {
            return Err(Error::usage(format!("trunc must be at least 2, got {}", c.trunc)));
        }
        if c.precision < 15 {
            return Err(Error::usage(format!("precision must be at least 15 digits, got {}", c.precision)));
        }
        if c.r_max <= 0 {
            return Err(Error::usage(format!("r_max must be positive, got {}", c.r_max)));
        }
        if let Some(h) = &c.horizons {
            HorizonSchedule::new(h.clone())?;
        }
        Ok(c)
    }

    pub fn trunc(&self) -> Rational {
        Rational::from_integer(self.trunc)
    }

    pub fn schedule(&self) -> HorizonSchedule {
        self.horizons
            .as_ref()
            .and_then(|h| HorizonSchedule::new(h.clone()).ok())
            .unwrap_or_default()
    }

    pub fn echo(&self) -> Value {
        json!({
            "trunc": self.trunc.to_string(),
            "precision": self.precision.to_string(),
            "horizons": self.horizons.as_ref().map(|h| h.iter().map(u64::to_string).collect::<Vec<_>>()),
            "r_max": self.r_max.to_string(),
            "output": match self.output { Output::Text => "text", Output::Json => "json" },
        })
    }
}
