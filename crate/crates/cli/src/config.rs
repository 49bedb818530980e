use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use gwquasi::arith::{parse_rat, Rat};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    atoms: BTreeMap<String, String>,
    cache_path: Option<PathBuf>,
    #[serde(default)]
    depths: BTreeMap<String, u32>,
    #[serde(default)]
    exploratory: Vec<String>,
}

/// Settings loaded from the `--config` TOML file.
#[derive(Debug, Default)]
pub struct Config {
    pub atoms: HashMap<String, Rat>,
    pub cache_path: Option<PathBuf>,
    pub depths: BTreeMap<String, u32>,
    pub exploratory: BTreeSet<String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).context("invalid config")?;
        let mut atoms = HashMap::new();
        for (k, v) in raw.atoms {
            let r = parse_rat(&v).with_context(|| format!("atom `{k}`"))?;
            atoms.insert(k, r);
        }
        Ok(Config {
            atoms,
            cache_path: raw.cache_path,
            depths: raw.depths,
            exploratory: raw.exploratory.into_iter().collect(),
        })
    }

    pub fn depth(&self, name: &str, default: u32) -> u32 {
        self.depths.get(name).copied().unwrap_or(default)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_atoms_and_depths() {
        let c = Config::parse(
            "exploratory = [\"genus2\"]\n[atoms]\n\"gw[N=1;g=1;ins=(0,1)]\" = \"-1/24\"\n[depths]\neo = 9\n",
        )
        .unwrap();
        assert_eq!(c.atoms.len(), 1);
        assert_eq!(c.depth("eo", 3), 9);
        assert_eq!(c.depth("grid", 3), 3);
        assert!(c.exploratory.contains("genus2"));
    }

    #[test]
    fn rejects_bad_rational() {
        assert!(Config::parse("[atoms]\nx = \"1/0\"\n").is_err());
        assert!(Config::parse("bogus = 1\n").is_err());
    }
}
