//! Grid runs of [`certify`] with a JSON-lines result cache.
//!
//! Output lines are sorted by `(n, b, a, d)` so the file does not depend on
//! the number of worker threads. The cache is an append-only JSON-lines file;
//! entries written by a different engine version are ignored.

use std::collections::{BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bundle::certify;
use crate::constructions::k_of;
use crate::error::{Error, Result};

pub const ENGINE_VERSION: &str = concat!("syzslope-", env!("CARGO_PKG_VERSION"), "/cert-1");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtlasJob {
    pub n_range: (usize, usize),
    pub b_range: (u64, u64),
    /// Defaults to every `a` with `b < a <= k(n) b`, i.e. all covered cells.
    pub a_range: Option<(u64, u64)>,
    /// Empty means one degree-free certificate per cell.
    pub d_list: Vec<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtlasCell {
    pub n: usize,
    pub b: u64,
    pub a: u64,
    pub d: Option<u64>,
}

impl AtlasCell {
    pub fn key(&self) -> String {
        match self.d {
            Some(d) => format!("n={},a={},b={},d={d}", self.n, self.a, self.b),
            None => format!("n={},a={},b={}", self.n, self.a, self.b),
        }
    }
}

impl AtlasJob {
    pub fn cells(&self) -> Vec<AtlasCell> {
        let mut cells = BTreeSet::new();
        let degrees: Vec<Option<u64>> = if self.d_list.is_empty() {
            vec![None]
        } else {
            self.d_list.iter().copied().map(Some).collect()
        };
        for n in self.n_range.0.max(2)..=self.n_range.1 {
            for b in self.b_range.0.max(1)..=self.b_range.1 {
                let (lo, hi) = self.a_range.unwrap_or((b + 1, k_of(n) * b));
                for a in lo.max(b + 1)..=hi {
                    for &d in &degrees {
                        cells.insert(AtlasCell { n, b, a, d });
                    }
                }
            }
        }
        cells.into_iter().collect()
    }
}

#[derive(Serialize, Deserialize)]
struct CacheLine {
    engine: String,
    key: String,
    value: String,
}

/// Certificate cache keyed by cell, persisted as JSON lines.
pub struct ResultCache {
    entries: Mutex<HashMap<String, String>>,
    sink: Mutex<Option<File>>,
}

impl ResultCache {
    pub fn in_memory() -> Self {
        ResultCache {
            entries: Mutex::new(HashMap::new()),
            sink: Mutex::new(None),
        }
    }

    /// Loads entries for the current engine version and opens the file for
    /// appending. Truncated trailing lines from an interrupted run are skipped.
    pub fn open(path: &Path) -> Result<Self> {
        let mut entries = HashMap::new();
        if path.exists() {
            for line in BufReader::new(File::open(path)?).lines() {
                let line = line?;
                if let Ok(entry) = serde_json::from_str::<CacheLine>(&line) {
                    if entry.engine == ENGINE_VERSION {
                        entries.insert(entry.key, entry.value);
                    }
                }
            }
        }
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(ResultCache {
            entries: Mutex::new(entries),
            sink: Mutex::new(Some(file)),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, key: &str) -> Option<String> {
        self.entries.lock().expect("cache lock").get(key).cloned()
    }

    pub fn put(&self, key: String, value: String) -> Result<()> {
        let mut sink = self.sink.lock().expect("cache lock");
        if let Some(file) = sink.as_mut() {
            let line = CacheLine {
                engine: ENGINE_VERSION.to_string(),
                key: key.clone(),
                value: value.clone(),
            };
            writeln!(file, "{}", serde_json::to_string(&line)?)?;
            file.flush()?;
        }
        self.entries.lock().expect("cache lock").insert(key, value);
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AtlasSummary {
    pub cells: usize,
    pub from_cache: usize,
    pub covered: usize,
    pub certified: usize,
}

/// Certificates for every cell of `job`, one JSON object per line, in
/// canonical order.
pub fn run_atlas(
    job: &AtlasJob,
    cache: &ResultCache,
    threads: Option<usize>,
) -> Result<(Vec<String>, AtlasSummary)> {
    let cells = job.cells();
    let work = || -> Result<Vec<(String, bool)>> {
        cells
            .par_iter()
            .map(|cell| {
                let key = cell.key();
                if let Some(hit) = cache.get(&key) {
                    return Ok((hit, true));
                }
                let line = certify(cell.a, cell.b, cell.n, cell.d)?.to_json();
                cache.put(key, line.clone())?;
                Ok((line, false))
            })
            .collect()
    };
    let results = match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidParams(e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let mut summary = AtlasSummary {
        cells: results.len(),
        ..Default::default()
    };
    let mut lines = Vec::with_capacity(results.len());
    for (line, hit) in results {
        summary.from_cache += usize::from(hit);
        let v: serde_json::Value = serde_json::from_str(&line)?;
        if v["covered"] == true {
            summary.covered += 1;
        }
        if v["verdict"]["kind"] == "semistable_for_d_geq" {
            summary.certified += 1;
        }
        lines.push(line);
    }
    Ok((lines, summary))
}

pub fn write_lines(path: &PathBuf, lines: &[String]) -> Result<()> {
    let mut out = String::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for l in lines {
        out.push_str(l);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}
