use std::path::{Path, PathBuf};

use holonomy_core::canonical::nilpotent_corpus;

use crate::write_atomic;

pub const MIN_N: usize = 2;
pub const MAX_N: usize = 8;

/// Writes `n{n}_p{partition}_s{signs}.json` for every nilpotent spec with
/// `2 <= n <= max_n` and returns the paths in generation order.
pub fn cmd_corpus(max_n: usize, out: &Path) -> Result<Vec<PathBuf>, String> {
    if !(MIN_N..=MAX_N).contains(&max_n) {
        return Err(format!("--max-n must lie in {MIN_N}..={MAX_N}, got {max_n}"));
    }
    nilpotent_corpus(MIN_N, max_n)
        .into_iter()
        .map(|entry| {
            let path = out.join(format!("{}.json", entry.name));
            write_atomic(&path, entry.spec.to_json().as_bytes())
                .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            Ok(path)
        })
        .collect()
}
