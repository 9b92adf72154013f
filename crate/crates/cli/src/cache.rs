//! Append-only cache of fundamental solutions, one JSON record per line.
//!
//! Every record is re-checked against `t1^2 - d u1^2 = 1` when loaded; lines
//! that fail to parse or to check are skipped and counted. A record written
//! under another schema version stops the load.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use pellian_core::pell::{fundamental_solution, fundamental_unit_pm};
use pellian_core::PellSolution;

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable overriding the cache path.
pub const CACHE_ENV: &str = "PELLIAN_CACHE";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub schema_version: u32,
    pub d: u64,
    /// Fundamental solution of norm +1, in base 10.
    pub t1: String,
    pub u1: String,
    /// Norm of the fundamental unit.
    pub norm_pm: i8,
}

impl CacheRecord {
    pub fn new(sol: &PellSolution, norm_pm: i8) -> Self {
        CacheRecord {
            schema_version: SCHEMA_VERSION,
            d: sol.d,
            t1: sol.t.to_string(),
            u1: sol.u.to_string(),
            norm_pm,
        }
    }

    /// The solution, if the record is internally consistent.
    pub fn validate(&self) -> Option<PellSolution> {
        if !matches!(self.norm_pm, 1 | -1) {
            return None;
        }
        let t: BigUint = self.t1.parse().ok()?;
        let u: BigUint = self.u1.parse().ok()?;
        if u == BigUint::from(0u8) {
            return None;
        }
        PellSolution::new(self.d, t, u, 1).ok()
    }
}

#[derive(Debug)]
pub struct Cache {
    path: PathBuf,
    entries: BTreeMap<u64, (PellSolution, i8)>,
    /// Lines skipped on load.
    pub rejected: usize,
    /// Records appended since load.
    pub appended: usize,
}

impl Cache {
    /// Reads `path`; a missing file is an empty cache.
    pub fn load(path: &Path) -> CliResult<Self> {
        let mut cache = Cache {
            path: path.to_path_buf(),
            entries: BTreeMap::new(),
            rejected: 0,
            appended: 0,
        };
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(CliError::Cache(format!("{}: {e}", path.display()))),
        };
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| CliError::Cache(format!("{}: {e}", path.display())))?;
            if line.trim().is_empty() {
                continue;
            }
            let Ok(rec) = serde_json::from_str::<CacheRecord>(&line) else {
                cache.rejected += 1;
                continue;
            };
            if rec.schema_version != SCHEMA_VERSION {
                return Err(CliError::Cache(format!(
                    "{} line {}: schema version {} (expected {SCHEMA_VERSION})",
                    path.display(),
                    i + 1,
                    rec.schema_version
                )));
            }
            match rec.validate() {
                Some(sol) => {
                    cache.entries.insert(rec.d, (sol, rec.norm_pm));
                }
                None => cache.rejected += 1,
            }
        }
        Ok(cache)
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, d: u64) -> Option<&(PellSolution, i8)> {
        self.entries.get(&d)
    }

    pub fn records(&self) -> impl Iterator<Item = CacheRecord> + '_ {
        self.entries.values().map(|(s, n)| CacheRecord::new(s, *n))
    }

    /// Appends a record; a `d` already present is left alone.
    pub fn append(&mut self, sol: &PellSolution, norm_pm: i8) -> CliResult<()> {
        if self.entries.contains_key(&sol.d) {
            return Ok(());
        }
        let rec = CacheRecord::new(sol, norm_pm);
        let mut line = serde_json::to_string(&rec).map_err(|e| CliError::Cache(e.to_string()))?;
        line.push('\n');
        let io = |e: std::io::Error| CliError::Cache(format!("{}: {e}", self.path.display()));
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path).map_err(io)?;
        f.write_all(line.as_bytes()).map_err(io)?;
        self.entries.insert(sol.d, (sol.clone(), norm_pm));
        self.appended += 1;
        Ok(())
    }

    /// The fundamental solution and unit norm for `d`, computed and appended
    /// on a miss.
    pub fn fundamental(&mut self, d: u64) -> CliResult<(PellSolution, i8)> {
        if let Some(hit) = self.entries.get(&d) {
            return Ok(hit.clone());
        }
        let sol = fundamental_solution(d)?;
        let norm = fundamental_unit_pm(d)?.norm;
        self.append(&sol, norm)?;
        Ok((sol, norm))
    }
}
