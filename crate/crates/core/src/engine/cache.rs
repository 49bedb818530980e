use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Engine, InvariantKey};
use crate::arith::SymRat;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Record {
    key: InvariantKey,
    value: SymRat,
}

impl Engine {
    /// Writes every cached entry as one JSON record per line, sorted by key.
    pub fn export_cache<W: Write>(&self, mut out: W) -> Result<usize> {
        let mut entries: Vec<(InvariantKey, SymRat)> = self
            .cache
            .read()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        entries.sort_by_key(|e| e.0.to_string());
        for (key, value) in &entries {
            let line = serde_json::to_string(&Record {
                key: key.clone(),
                value: value.clone(),
            })
            .map_err(|e| Error::Parse(e.to_string()))?;
            writeln!(out, "{line}").map_err(|e| Error::Parse(e.to_string()))?;
        }
        Ok(entries.len())
    }

    /// Loads records; a record disagreeing with an existing entry is an error.
    pub fn import_cache<R: BufRead>(&self, input: R) -> Result<usize> {
        let mut count = 0;
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: Record = serde_json::from_str(&line)
                .map_err(|e| Error::Parse(format!("cache line {}: {e}", lineno + 1)))?;
            let mut cache = self.cache.write();
            if let Some(old) = cache.get(&rec.key) {
                if *old != rec.value {
                    return Err(Error::Parse(format!(
                        "cache line {}: conflicting value for {}",
                        lineno + 1,
                        rec.key
                    )));
                }
            } else {
                cache.insert(rec.key, rec.value);
            }
            count += 1;
        }
        Ok(count)
    }
}
