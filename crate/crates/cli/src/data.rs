//! Seed table loading and the on-disk cache of extended Hauptmodul series.

use std::fs;
use std::path::{Path, PathBuf};

use modmoon_core::haupt::{extend_class, find_seed, parse_seeds, HauptSeed};
use modmoon_core::BigInt;

use crate::CliError;

pub const SHIPPED_SEEDS: &str = include_str!("../../../data/haupt_seeds.tsv");
pub const CACHE_ENV: &str = "MODMOON_CACHE_DIR";

pub fn load_seeds(path: Option<&Path>) -> Result<Vec<HauptSeed>, CliError> {
    let text = match path {
        None => SHIPPED_SEEDS.to_string(),
        Some(p) => fs::read_to_string(p).map_err(|e| CliError::Usage(format!("cannot read seed file {}: {e}", p.display())))?,
    };
    parse_seeds(&text).map_err(|e| CliError::Usage(format!("seed file: {e}")))
}

pub fn seed<'a>(seeds: &'a [HauptSeed], name: &str) -> Result<&'a HauptSeed, CliError> {
    find_seed(seeds, name).ok_or_else(|| CliError::Usage(format!("no seed row named {name}")))
}

fn cache_file(seed: &HauptSeed, terms: u32) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    let name: String = seed.label.chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    Some(Path::new(&dir).join(format!("{name}-p{}-{terms}.txt", seed.p)))
}

/// `c(0..=terms)` of the class, cached under `$MODMOON_CACHE_DIR` when set.
pub fn extended(seed: &HauptSeed, terms: u32) -> Result<Vec<BigInt>, CliError> {
    let file = cache_file(seed, terms);
    if let Some(f) = &file {
        if let Ok(text) = fs::read_to_string(f) {
            let parsed: Result<Vec<BigInt>, _> = text.split_whitespace().map(|s| s.parse()).collect();
            if let Ok(v) = parsed {
                if v.len() == terms as usize + 1 {
                    return Ok(v);
                }
            }
        }
    }
    let v = extend_class(seed, terms).map_err(|e| CliError::Failure(format!("extending {}: {e}", seed.label)))?;
    if let Some(f) = &file {
        let text: Vec<String> = v.iter().map(|x| x.to_string()).collect();
        if let Some(dir) = f.parent() {
            let _ = fs::create_dir_all(dir);
        }
        let _ = fs::write(f, text.join("\n") + "\n");
    }
    Ok(v)
}
