//! On-disk memo of `t`-algebra dimension tables.
//!
//! When `GCG_CACHE_DIR` is set, tables are stored there as JSON files named
//! by `(n, g, variant, max_weight)`. Verification suites never read the
//! cache; only table output does.

use std::path::PathBuf;

use log::{info, warn};

use crate::grt::Variant;
use crate::lie::{t_g_presentation, t_nonframed_presentation, DimRow, GradedLie, LieError};

pub const CACHE_ENV: &str = "GCG_CACHE_DIR";

/// Cache file for one table, if caching is enabled.
pub fn cache_path(n: u8, g: u8, variant: Variant, max_weight: usize) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    Some(PathBuf::from(dir).join(format!("t-n{n}-g{g}-{variant}-w{max_weight}.json")))
}

/// Dimension table of `t_(g)(n)` (or its non-framed version) in weights
/// `1..=max_weight`.
pub fn t_dims(n: u8, g: u8, variant: Variant, max_weight: usize) -> Result<Vec<DimRow>, LieError> {
    let path = cache_path(n, g, variant, max_weight);
    if let Some(p) = &path {
        if let Ok(text) = std::fs::read_to_string(p) {
            match serde_json::from_str::<Vec<DimRow>>(&text) {
                Ok(rows) => {
                    info!("cache hit {}", p.display());
                    return Ok(rows);
                }
                Err(e) => warn!("ignoring unreadable cache file {}: {e}", p.display()),
            }
        }
    }
    let pres = match variant {
        Variant::Framed => t_g_presentation(n, g, true)?,
        Variant::Nonframed => {
            if g != 1 {
                return Err(LieError::Invalid("the non-framed variant is only defined for g = 1".into()));
            }
            t_nonframed_presentation(n)?
        }
    };
    let lie = GradedLie::new(&pres, max_weight)?;
    let rows: Vec<DimRow> = lie
        .dims()
        .into_iter()
        .map(|d| DimRow {
            algebra: lie.name.clone(),
            n,
            g,
            weight: d.weight,
            dim_free: d.dim_free,
            dim_ideal: d.dim_ideal,
            dim_quotient: d.dim_quotient,
        })
        .collect();
    if let Some(p) = &path {
        let written = p
            .parent()
            .map_or(Ok(()), std::fs::create_dir_all)
            .and_then(|_| std::fs::write(p, serde_json::to_string_pretty(&rows).expect("rows serialize")));
        match written {
            Ok(()) => info!("cached {}", p.display()),
            Err(e) => warn!("could not write cache file {}: {e}", p.display()),
        }
    }
    Ok(rows)
}
