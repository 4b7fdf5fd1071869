use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::RwLock;

use serde::Serialize;

use super::{max_cover_length, verify_cover, witness_integer, SearchConfig};
use crate::arith::{self, Int};
use crate::error::{Error, Result};

/// The shipped table: the values quoted for `k = 5, 10, ..., 50` and `k = 54`.
pub const DEFAULT_TABLE: &str = include_str!("../../data/h_table.txt");

/// Where an `h(k)` value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HSource {
    #[serde(rename = "paper")]
    Published,
    Computed,
    Ingested,
}

impl HSource {
    pub fn as_str(self) -> &'static str {
        match self {
            HSource::Published => "paper",
            HSource::Computed => "computed",
            HSource::Ingested => "ingested",
        }
    }

    pub fn parse(s: &str) -> Option<HSource> {
        match s {
            "paper" => Some(HSource::Published),
            "computed" => Some(HSource::Computed),
            "ingested" => Some(HSource::Ingested),
            _ => None,
        }
    }
}

impl fmt::Display for HSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HEntry {
    pub h: u64,
    pub source: HSource,
    /// First integer of a run of `h - 1` integers sharing a factor with
    /// `p_k#`; required for computed entries.
    pub witness_start: Option<Int>,
}

/// Exact `h(k)` values keyed by `k`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KnownHTable {
    entries: BTreeMap<usize, HEntry>,
}

fn check_entry(k: usize, e: &HEntry) -> std::result::Result<(), String> {
    if k == 0 {
        return Err("k must be >= 1".into());
    }
    if e.h == 0 {
        return Err("h must be positive".into());
    }
    if k >= 2 {
        let prev = arith::nth_prime(k - 1).map_err(|e| e.to_string())?;
        if e.h < 2 * prev {
            return Err(format!(
                "h({k}) = {} is below the elementary bound 2 * p_{} = {}",
                e.h,
                k - 1,
                2 * prev
            ));
        }
    }
    match (&e.witness_start, e.source) {
        (None, HSource::Computed) => Err(format!("computed h({k}) has no witness")),
        (Some(start), _) => {
            let primes = arith::first_primes(k).map_err(|e| e.to_string())?;
            if verify_cover(start, (e.h - 1) as usize, primes.as_slice()) {
                Ok(())
            } else {
                Err(format!(
                    "witness {start} for h({k}) = {} does not verify",
                    e.h
                ))
            }
        }
        (None, _) => Ok(()),
    }
}

impl KnownHTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// The shipped table.
    pub fn shipped() -> Self {
        Self::parse(DEFAULT_TABLE).expect("shipped table is valid")
    }

    pub fn get(&self, k: usize) -> Option<&HEntry> {
        self.entries.get(&k)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &HEntry)> {
        self.entries.iter().map(|(&k, e)| (k, e))
    }

    /// Validates and stores an entry, replacing any previous one.
    pub fn insert(&mut self, k: usize, entry: HEntry) -> Result<()> {
        check_entry(k, &entry).map_err(|message| Error::Validation { line: 0, message })?;
        self.entries.insert(k, entry);
        Ok(())
    }

    /// Entries with `k <= max_k` only.
    pub fn restrict(&self, max_k: usize) -> KnownHTable {
        KnownHTable {
            entries: self
                .entries
                .range(..=max_k)
                .map(|(&k, e)| (k, e.clone()))
                .collect(),
        }
    }

    /// Lines of `k,h,source[,witness_start]`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut table = KnownHTable::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let fields: Vec<&str> = body.split(',').map(str::trim).collect();
            let parse_err = |message: String| Error::Parse { line, message };
            if !(3..=4).contains(&fields.len()) {
                return Err(parse_err(format!(
                    "expected k,h,source[,witness_start], got {body:?}"
                )));
            }
            let k: usize = fields[0]
                .parse()
                .map_err(|_| parse_err(format!("bad k {:?}", fields[0])))?;
            let h: u64 = fields[1]
                .parse()
                .map_err(|_| parse_err(format!("bad h {:?}", fields[1])))?;
            let source = HSource::parse(fields[2])
                .ok_or_else(|| parse_err(format!("unknown source {:?}", fields[2])))?;
            let witness_start = match fields.get(3) {
                Some(s) => Some(
                    s.parse::<Int>()
                        .map_err(|_| parse_err(format!("bad witness start {s:?}")))?,
                ),
                None => None,
            };
            let entry = HEntry {
                h,
                source,
                witness_start,
            };
            check_entry(k, &entry).map_err(|message| Error::Validation { line, message })?;
            if table.entries.insert(k, entry).is_some() {
                return Err(Error::Validation {
                    line,
                    message: format!("duplicate entry for k = {k}"),
                });
            }
        }
        Ok(table)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# k,h,source[,witness_start]\n");
        for (k, e) in &self.entries {
            out.push_str(&format!("{k},{},{}", e.h, e.source));
            if let Some(s) = &e.witness_start {
                out.push_str(&format!(",{s}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

/// Whether missing `h(k)` values may be computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Policy {
    TableOnly,
    Compute { max_k: usize, search: SearchConfig },
}

impl Policy {
    /// Computation up to `k = 12`, which takes well under a second.
    pub fn quick() -> Self {
        Policy::Compute {
            max_k: 12,
            search: SearchConfig::default(),
        }
    }

    pub fn max_k(&self) -> usize {
        match self {
            Policy::TableOnly => 0,
            Policy::Compute { max_k, .. } => *max_k,
        }
    }
}

/// Exact `h(k)`: the table entry if present, otherwise computed (when the
/// policy allows) and stored back as [`HSource::Computed`].
pub fn h_of(k: usize, table: &mut KnownHTable, policy: &Policy) -> Result<(u64, HSource)> {
    if k == 0 {
        return Err(Error::InvalidArgument("h(k) needs k >= 1".into()));
    }
    if let Some(e) = table.get(k) {
        return Ok((e.h, e.source));
    }
    let entry = compute_entry(k, policy)?;
    let h = entry.h;
    table.insert(k, entry)?;
    Ok((h, HSource::Computed))
}

fn compute_entry(k: usize, policy: &Policy) -> Result<HEntry> {
    let search = match policy {
        Policy::Compute { max_k, search } if k <= *max_k => search,
        _ => return Err(Error::Unavailable(k)),
    };
    let primes = arith::first_primes(k)?;
    let (best, assignment) = max_cover_length(primes.as_slice(), search)?;
    Ok(HEntry {
        h: best as u64 + 1,
        source: HSource::Computed,
        witness_start: Some(witness_integer(&assignment).start),
    })
}

/// A shared table with a computation policy; concurrent readers, and
/// writers only when a missing value is computed.
#[derive(Debug)]
pub struct HProvider {
    table: RwLock<KnownHTable>,
    policy: Policy,
}

impl HProvider {
    pub fn new(table: KnownHTable, policy: Policy) -> Self {
        HProvider {
            table: RwLock::new(table),
            policy,
        }
    }

    pub fn policy(&self) -> &Policy {
        &self.policy
    }

    pub fn get(&self, k: usize) -> Result<(u64, HSource)> {
        if k == 0 {
            return Err(Error::InvalidArgument("h(k) needs k >= 1".into()));
        }
        if let Some(e) = self.table.read().expect("table lock").get(k) {
            return Ok((e.h, e.source));
        }
        // computed outside the lock; a racing writer stores the same value
        let entry = compute_entry(k, &self.policy)?;
        let h = entry.h;
        let mut table = self.table.write().expect("table lock");
        if let Some(e) = table.get(k) {
            return Ok((e.h, e.source));
        }
        table.insert(k, entry)?;
        Ok((h, HSource::Computed))
    }

    /// True when `h(k)` is stored or may be computed.
    pub fn is_available(&self, k: usize) -> bool {
        k >= 1
            && (k <= self.policy.max_k() || self.table.read().expect("table lock").get(k).is_some())
    }

    /// Largest `k` for which [`HProvider::is_available`] holds.
    pub fn max_available_k(&self) -> usize {
        let stored = self
            .table
            .read()
            .expect("table lock")
            .iter()
            .map(|(k, _)| k)
            .max()
            .unwrap_or(0);
        stored.max(self.policy.max_k())
    }

    pub fn snapshot(&self) -> KnownHTable {
        self.table.read().expect("table lock").clone()
    }
}
