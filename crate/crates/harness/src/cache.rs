//! Line-delimited zero cache, one file per modulus.
//!
//! Each line holds one ordinate; a character with no zeros below `t_max`
//! is stored as a single record with a null ordinate. A set is usable only
//! when every one of its `n_zeros` records parsed, so a damaged line causes
//! that set to be recomputed.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use log::{info, warn};
use ratioslab_core::characters::CharacterFamily;
use ratioslab_core::lfunc::{find_family_zeros, find_zeros, ZeroSet};
use rayon::prelude::*;
use serde::Deserialize;

use crate::config::check_family_modulus;
use crate::error::HarnessError;

#[derive(Debug, Deserialize)]
struct Record {
    q: u64,
    j: u64,
    g: u64,
    ordinate: Option<f64>,
    t_max: f64,
    residual: f64,
    warning: bool,
    n_zeros: usize,
}

/// Zero sets for the whole family plus what it took to produce them.
#[derive(Debug, Clone)]
pub struct CacheOutcome {
    /// One set per non-principal character, ordered by `j`.
    pub sets: Vec<ZeroSet>,
    /// Characters whose zeros had to be computed in this call.
    pub computed: Vec<u64>,
    /// Lines that could not be parsed.
    pub corrupted_lines: usize,
}

pub fn cache_path(dir: &Path, q: u64) -> PathBuf {
    dir.join(format!("zeros-q{q}.jsonl"))
}

fn encode(set: &ZeroSet, out: &mut String) {
    let mut line = |ordinate: String| {
        let _ = writeln!(
            out,
            "{{\"q\":{},\"j\":{},\"g\":{},\"ordinate\":{},\"t_max\":{},\"residual\":{},\"warning\":{},\"n_zeros\":{}}}",
            set.q,
            set.j,
            set.g,
            ordinate,
            set.t_max,
            set.count_residual,
            set.count_warning,
            set.ordinates.len()
        );
    };
    if set.ordinates.is_empty() {
        line("null".into());
    }
    for g in &set.ordinates {
        line(format!("{g:.16e}"));
    }
}

/// Writes `text` to `path` through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, text: &str) -> Result<(), HarnessError> {
    let tmp = path.with_extension(format!(
        "{}tmp",
        path.extension().map(|e| format!("{}.", e.to_string_lossy())).unwrap_or_default()
    ));
    let res = (|| -> io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    res.map_err(|e| HarnessError::io(path, e))
}

type Key = (u64, u64);

fn load(path: &Path, q: u64) -> Result<(BTreeMap<Key, ZeroSet>, usize), HarnessError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok((BTreeMap::new(), 0)),
        Err(e) => return Err(HarnessError::io(path, e)),
    };
    let mut groups: BTreeMap<Key, Vec<Record>> = BTreeMap::new();
    let mut corrupted = 0;
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<Record>(line) {
            Ok(r) if r.q == q && r.t_max > 0.0 => groups.entry((r.j, r.t_max.to_bits())).or_default().push(r),
            Ok(_) | Err(_) => {
                warn!("{}:{}: skipping corrupted zero record", path.display(), n + 1);
                corrupted += 1;
            }
        }
    }
    let mut sets = BTreeMap::new();
    for (key, recs) in groups {
        let first = &recs[0];
        let consistent = recs.iter().all(|r| {
            r.n_zeros == first.n_zeros
                && r.g == first.g
                && r.residual.to_bits() == first.residual.to_bits()
                && r.warning == first.warning
        });
        let mut ordinates: Vec<f64> = recs.iter().filter_map(|r| r.ordinate).collect();
        let complete = if first.n_zeros == 0 {
            recs.len() == 1 && ordinates.is_empty()
        } else {
            recs.len() == first.n_zeros && ordinates.len() == first.n_zeros
        };
        if !(consistent && complete) {
            warn!(
                "{}: zero set q={q} j={} t_max={} is incomplete; recomputing",
                path.display(),
                first.j,
                first.t_max
            );
            continue;
        }
        ordinates.sort_by(f64::total_cmp);
        sets.insert(
            key,
            ZeroSet {
                q,
                j: first.j,
                g: first.g,
                t_max: first.t_max,
                ordinates,
                count_residual: first.residual,
                count_warning: first.warning,
            },
        );
    }
    Ok((sets, corrupted))
}

/// Zero sets of every `χ ∈ F(q)` up to height `t_max`, computing and
/// persisting only those missing from `dir`.
pub fn cache_zeros(q: u64, t_max: f64, dir: &Path) -> Result<CacheOutcome, HarnessError> {
    check_family_modulus(q)?;
    let family = CharacterFamily::new(q)?;
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let path = cache_path(dir, q);
    let (mut stored, corrupted_lines) = load(&path, q)?;

    let bits = t_max.to_bits();
    let missing: Vec<u64> = (1..q - 1).filter(|j| !stored.contains_key(&(*j, bits))).collect();
    let fresh: Vec<ZeroSet> = if missing.is_empty() {
        Vec::new()
    } else if missing.len() == (q - 2) as usize {
        info!("computing zeros for q={q} up to height {t_max}");
        find_family_zeros(&family, t_max)?
    } else {
        info!("computing zeros for {} characters mod {q} up to height {t_max}", missing.len());
        missing
            .par_iter()
            .map(|&j| find_zeros(&family.character(j)?, t_max).map_err(HarnessError::from))
            .collect::<Result<_, _>>()?
    };
    for set in &fresh {
        if set.count_warning {
            warn!(
                "q={q} j={}: zero count residual {:.3} exceeds tolerance",
                set.j, set.count_residual
            );
        }
    }

    if !fresh.is_empty() || corrupted_lines > 0 {
        for set in fresh {
            stored.insert((set.j, bits), set);
        }
        let mut text = String::new();
        for set in stored.values() {
            encode(set, &mut text);
        }
        write_atomic(&path, &text)?;
    }

    let sets: Vec<ZeroSet> = (1..q - 1).map(|j| stored[&(j, bits)].clone()).collect();
    Ok(CacheOutcome {
        sets,
        computed: missing,
        corrupted_lines,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_round_trips() {
        let set = ZeroSet {
            q: 7,
            j: 2,
            g: 3,
            t_max: 12.5,
            ordinates: vec![-3.123_456_789_012_345_6, 0.1 + 0.2, 11.999_999_999_999_998],
            count_residual: 0.123_456_789,
            count_warning: false,
        };
        let mut text = String::new();
        encode(&set, &mut text);
        let empty = ZeroSet { j: 3, ordinates: vec![], ..set.clone() };
        encode(&empty, &mut text);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("z.jsonl");
        fs::write(&path, text).unwrap();
        let (sets, bad) = load(&path, 7).unwrap();
        assert_eq!(bad, 0);
        assert_eq!(sets[&(2, 12.5f64.to_bits())], set);
        assert_eq!(sets[&(3, 12.5f64.to_bits())], empty);
    }
}
