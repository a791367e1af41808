//! Vulnerability labeling from fix commits.
//!
//! The functions of the revision *before* a fix are the candidates: whichever
//! of them the fix patch touches are the vulnerable samples, everything else
//! in the project is non-vulnerable. "Touches" is judged on the pre-image:
//! the lines the patch deletes or rewrites, plus the insertion points of pure
//! additions, mapped against each function's span.

use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::process::{affected_pre_lines, Hunk};
use crate::span::FunctionKey;

use super::DatasetError;

/// One file's hunks from a fix patch, keyed by the pre-image path.
#[derive(Debug, Clone)]
pub struct FilePatch {
    pub path: String,
    pub hunks: Vec<Hunk>,
}

/// Keys of the pre-fix functions a patch touches, sorted by file, line, name.
///
/// `inventory` is the full function inventory of the pre-fix revision. A
/// patch with no hunks labels nothing and is reported as an error so the
/// caller can record the advisory as unusable.
pub fn label_from_fix(
    inventory: &[FunctionKey],
    patch: &[FilePatch],
) -> Result<Vec<FunctionKey>, DatasetError> {
    if patch.iter().all(|p| p.hunks.is_empty()) {
        return Err(DatasetError::EmptyPatch);
    }

    let mut by_path: HashMap<&str, Vec<&FunctionKey>> = HashMap::new();
    for key in inventory {
        by_path.entry(&key.file_path).or_default().push(key);
    }

    let mut vulnerable: Vec<FunctionKey> = Vec::new();
    for file in patch {
        let Some(keys) = by_path.get(file.path.as_str()) else {
            continue;
        };
        let lines = affected_pre_lines(&file.hunks);
        for key in keys {
            let hit = lines
                .iter()
                .any(|&l| l >= key.span.start_line && l <= key.span.end_line);
            if hit {
                vulnerable.push((*key).clone());
            }
        }
    }
    vulnerable.sort_by(|a, b| {
        (&a.file_path, a.span.start_line, &a.qualified_name).cmp(&(
            &b.file_path,
            b.span.start_line,
            &b.qualified_name,
        ))
    });
    vulnerable.dedup();
    Ok(vulnerable)
}
