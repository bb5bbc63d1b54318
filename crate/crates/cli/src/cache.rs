use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use linnik_core::arith::PrimeSieve;
use linnik_core::group::{CharacterTableDump, UnitGroup};
use log::{info, warn};

pub const CACHE_ENV: &str = "LINNIK_CACHE_DIR";

/// Sieve limits are rounded up to a multiple of this, so nearby requests share a file.
const SIEVE_GRANULE: u64 = 1 << 16;

/// Largest sieve the CLI will allocate (4 bytes per entry).
pub const MAX_SIEVE: u64 = 1 << 29;

/// Character tables as JSON and smallest-prime-factor tables as raw little-endian u32.
///
/// Loaded entries are always checked against the real thing; a mismatch is logged and
/// the value recomputed, so a bad cache costs time but never changes an answer.
pub struct Cache {
    dir: Option<PathBuf>,
    pub hits: u64,
    pub misses: u64,
}

impl Cache {
    pub fn open(dir: Option<PathBuf>) -> Self {
        let dir = dir.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from));
        let dir = dir.and_then(|d| match fs::create_dir_all(&d) {
            Ok(()) => Some(d),
            Err(e) => {
                warn!(
                    "cache directory {} unusable ({e}); continuing in memory",
                    d.display()
                );
                None
            }
        });
        Cache {
            dir,
            hits: 0,
            misses: 0,
        }
    }

    fn store(&self, path: &Path, bytes: &[u8]) {
        let tmp = path.with_extension("tmp");
        if let Err(e) = fs::write(&tmp, bytes).and_then(|()| fs::rename(&tmp, path)) {
            warn!("could not write cache file {} ({e})", path.display());
        }
    }

    pub fn group(&mut self, q: u64) -> linnik_core::Result<Arc<UnitGroup>> {
        let g = Arc::new(UnitGroup::new(q)?);
        let Some(dir) = &self.dir else { return Ok(g) };
        let path = dir.join(format!("chartable-{q}.json"));
        if let Ok(text) = fs::read_to_string(&path) {
            match serde_json::from_str::<CharacterTableDump>(&text) {
                Ok(dump) if dump.matches(&g) => {
                    self.hits += 1;
                    info!("cache hit: character table q={q}");
                    return Ok(g);
                }
                _ => warn!("corrupt cache file {}; recomputing", path.display()),
            }
        }
        self.misses += 1;
        info!("cache miss: character table q={q}");
        match serde_json::to_vec(&g.table_dump()) {
            Ok(bytes) => self.store(&path, &bytes),
            Err(e) => warn!("could not serialize character table ({e})"),
        }
        Ok(g)
    }

    pub fn sieve(&mut self, limit: u64) -> linnik_core::Result<PrimeSieve> {
        if limit > MAX_SIEVE {
            return Err(linnik_core::Error::Resource(format!(
                "a sieve up to {limit} exceeds the limit {MAX_SIEVE}"
            )));
        }
        let limit = limit.max(2).div_ceil(SIEVE_GRANULE) * SIEVE_GRANULE;
        let Some(dir) = &self.dir else {
            return Ok(PrimeSieve::new(limit));
        };
        let path = dir.join(format!("sieve-{limit}.bin"));
        if let Ok(bytes) = fs::read(&path) {
            let table = (bytes.len() % 4 == 0).then(|| {
                bytes
                    .chunks_exact(4)
                    .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
                    .collect::<Vec<u32>>()
            });
            match table
                .filter(|t| t.len() as u64 == limit + 1)
                .map(PrimeSieve::from_spf_table)
            {
                Some(Ok(s)) => {
                    self.hits += 1;
                    info!("cache hit: sieve limit={limit}");
                    return Ok(s);
                }
                _ => warn!("corrupt cache file {}; recomputing", path.display()),
            }
        }
        self.misses += 1;
        info!("cache miss: sieve limit={limit}");
        let s = PrimeSieve::new(limit);
        let bytes: Vec<u8> = s.spf_table().iter().flat_map(|v| v.to_le_bytes()).collect();
        self.store(&path, &bytes);
        Ok(s)
    }
}
