//! Configuration resolution: flags > key=value file > `SYMBOLKIT_*`
//! environment > defaults.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde_json::{json, Value};
use symbolkit::pools::DEFAULT_SEED;
use symbolkit::SymbolError;

pub const KEYS: [&str; 7] = ["N", "grid_n", "grid_L", "tol_sigma", "tol_rank", "phi_samples", "seed"];

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub n: usize,
    pub grid_n: usize,
    pub grid_l: f64,
    pub tol_sigma: f64,
    pub tol_rank: f64,
    pub phi_samples: usize,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            n: 128,
            grid_n: 4096,
            grid_l: 40.0 * PI,
            tol_sigma: 1e-8,
            tol_rank: 1e-6,
            phi_samples: 64,
            seed: DEFAULT_SEED,
        }
    }
}

fn bad(key: &str, value: &str) -> SymbolError {
    SymbolError::Config(format!("cannot parse {key}={value}"))
}

impl Config {
    fn set(&mut self, key: &str, value: &str) -> Result<(), SymbolError> {
        let v = value.trim();
        match key {
            "N" => self.n = v.parse().map_err(|_| bad(key, v))?,
            "grid_n" => self.grid_n = v.parse().map_err(|_| bad(key, v))?,
            "grid_L" => self.grid_l = v.parse().map_err(|_| bad(key, v))?,
            "tol_sigma" => self.tol_sigma = v.parse().map_err(|_| bad(key, v))?,
            "tol_rank" => self.tol_rank = v.parse().map_err(|_| bad(key, v))?,
            "phi_samples" => self.phi_samples = v.parse().map_err(|_| bad(key, v))?,
            "seed" => self.seed = v.parse().map_err(|_| bad(key, v))?,
            _ => return Err(SymbolError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Layers the sources in increasing precedence.
    pub fn resolve(
        env: &BTreeMap<String, String>,
        file: Option<&str>,
        flags: &[(&str, String)],
    ) -> Result<Config, SymbolError> {
        let mut c = Config::default();
        for key in KEYS {
            if let Some(v) = env.get(&format!("SYMBOLKIT_{key}")) {
                c.set(key, v)?;
            }
        }
        if let Some(text) = file {
            for (i, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line
                    .split_once('=')
                    .ok_or_else(|| SymbolError::Config(format!("line {}: expected key=value", i + 1)))?;
                c.set(k.trim(), v)?;
            }
        }
        for (k, v) in flags {
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<(), SymbolError> {
        if self.n < 1 || self.phi_samples < 1 {
            return Err(SymbolError::Config("N and phi_samples must be positive".into()));
        }
        if self.tol_sigma <= 0.0 || self.tol_rank <= 0.0 {
            return Err(SymbolError::Config("tolerances must be positive".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "N": self.n,
            "grid_n": self.grid_n,
            "grid_L": self.grid_l,
            "tol_sigma": self.tol_sigma,
            "tol_rank": self.tol_rank,
            "phi_samples": self.phi_samples,
            "seed": self.seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let env: BTreeMap<String, String> =
            [("SYMBOLKIT_N".to_string(), "16".to_string()), ("SYMBOLKIT_seed".to_string(), "5".to_string())].into();
        let c = Config::resolve(&env, Some("N = 32\ntol_rank=1e-4 # looser\n"), &[("N", "64".into())]).unwrap();
        assert_eq!((c.n, c.seed, c.tol_rank), (64, 5, 1e-4));
        let c = Config::resolve(&env, Some("N=32"), &[]).unwrap();
        assert_eq!(c.n, 32);
        assert_eq!(Config::resolve(&env, None, &[]).unwrap().n, 16);
        assert!(Config::resolve(&BTreeMap::new(), Some("bogus=1"), &[]).is_err());
    }
}
