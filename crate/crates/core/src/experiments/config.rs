//! Experiment tolerances, optionally read from a TOML file.
//!
//! ```toml
//! # every key is optional
//! ks_tolerance = 0.03        # Kolmogorov–Smirnov distance for the Rayleigh law
//! relative_tolerance = 0.05  # relative error against asymptotic constants
//! se_multiplier = 3.0        # standard errors allowed against exact values
//! exact_max_n = 30           # sizes compared with exact series values
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub ks_tolerance: f64,
    pub relative_tolerance: f64,
    pub se_multiplier: f64,
    pub exact_max_n: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { ks_tolerance: 0.03, relative_tolerance: 0.05, se_multiplier: 3.0, exact_max_n: 30 }
    }
}

impl Tolerances {
    pub fn from_toml(text: &str) -> Result<Self> {
        let t: Tolerances = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if !(t.ks_tolerance > 0.0 && t.relative_tolerance > 0.0 && t.se_multiplier > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_override() {
        let t = Tolerances::from_toml("ks_tolerance = 0.05\n").unwrap();
        assert_eq!(t.ks_tolerance, 0.05);
        assert_eq!(t.exact_max_n, 30);
        assert!(Tolerances::from_toml("bogus = 1").is_err());
        assert!(Tolerances::from_toml("se_multiplier = -1.0").is_err());
    }
}
