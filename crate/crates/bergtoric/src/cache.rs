//! Norm tables cached as JSON under the SHA-256 of their inputs.

use std::path::{Path, PathBuf};

use bergtoric_core::norms::build_norm_table;
use bergtoric_core::potential::PotentialSpec;
use bergtoric_core::{NormTable, QuadratureOptions, ToricPotential};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;
use crate::io::{to_json, write_atomic};

const FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub format: u32,
    pub potential: PotentialSpec,
    pub k: u32,
    pub quadrature: QuadratureOptions,
}

impl CacheKey {
    pub fn new(potential: &PotentialSpec, k: u32, quadrature: &QuadratureOptions) -> Self {
        CacheKey { format: FORMAT, potential: potential.clone(), k, quadrature: *quadrature }
    }

    pub fn digest(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("cache keys serialize");
        hex::encode(Sha256::digest(&bytes))
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CachedTable {
    key: CacheKey,
    table: NormTable,
}

pub struct NormCache {
    dir: PathBuf,
}

/// Whether a table came from disk or was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Computed,
}

impl NormCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        NormCache { dir: dir.into() }
    }

    pub fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.digest()))
    }

    fn read(&self, path: &Path, key: &CacheKey) -> Option<NormTable> {
        let bytes = std::fs::read(path).ok()?;
        match serde_json::from_slice::<CachedTable>(&bytes) {
            Ok(c) if &c.key == key => Some(c.table),
            Ok(_) => {
                log::warn!("cache entry {} has a different key; recomputing", path.display());
                None
            }
            Err(e) => {
                log::warn!("cache entry {} is unreadable ({e}); recomputing", path.display());
                None
            }
        }
    }

    pub fn get_or_build(
        &self,
        spec: &PotentialSpec,
        p: &dyn ToricPotential,
        k: u32,
        quadrature: &QuadratureOptions,
    ) -> Result<(NormTable, CacheOutcome), CliError> {
        let key = CacheKey::new(spec, k, quadrature);
        let path = self.path(&key);
        if let Some(t) = self.read(&path, &key) {
            log::debug!("k={k}: cache hit {}", path.display());
            return Ok((t, CacheOutcome::Hit));
        }
        let start = std::time::Instant::now();
        let table = build_norm_table(p, k, quadrature)?;
        log::info!("k={k}: {} norms in {:.2?}", table.len(), start.elapsed());
        let cached = CachedTable { key, table };
        write_atomic(&path, &to_json(&cached)?)?;
        Ok((cached.table, CacheOutcome::Computed))
    }
}
