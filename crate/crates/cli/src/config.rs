use std::path::Path;

use serde::Deserialize;

/// Optional defaults read from a TOML file; command-line flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub prime: Option<u64>,
    pub seed: Option<u64>,
    pub degree_cap: Option<u32>,
    pub qmax: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

/// Settings after merging flags, config file and built-in defaults.
#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub prime: Option<u64>,
    pub seed: u64,
    pub degree_cap: u32,
    pub qmax: usize,
}

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_QMAX: usize = 20;

impl Settings {
    pub fn merge(flags: &crate::Global, file: Config) -> Self {
        Settings {
            prime: flags.prime.or(file.prime),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            degree_cap: flags
                .degree_cap
                .or(file.degree_cap)
                .unwrap_or(padic_heisenberg::expr::DEFAULT_DEGREE_CAP),
            qmax: flags.qmax.or(file.qmax).unwrap_or(DEFAULT_QMAX),
        }
    }
}
