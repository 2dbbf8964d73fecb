//! Command implementations behind the `holonomy` binary.

pub mod corpus;
pub mod summary;
pub mod verify;

use std::fs;
use std::io::Write;
use std::path::Path;

/// Process exit status; `max` of several outcomes is the combined outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Outcome {
    Pass = 0,
    Fail = 1,
    InputError = 2,
}

impl Outcome {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn from_pass(passed: bool) -> Self {
        if passed {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Applies `HOLONOMY_THREADS` (0 or unset means the rayon default).
pub fn configure_threads(value: Option<&str>) -> Result<(), String> {
    let Some(raw) = value else { return Ok(()) };
    let threads: usize = raw.trim().parse().map_err(|_| format!("HOLONOMY_THREADS must be a count, got {raw:?}"))?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}
