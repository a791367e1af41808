//! Source positions and the identity key shared by every pipeline stage.

use alloc::string::String;
use serde::{Deserialize, Serialize};

/// Half-open-free source region: `start_line..=end_line` with column bounds.
///
/// Lines are 1-based; columns are 0-based byte offsets within their line.
/// `end_col` is the column one past the last byte of the region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start_line: u32,
    pub start_col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl SourceSpan {
    pub fn new(start_line: u32, start_col: u32, end_line: u32, end_col: u32) -> Self {
        SourceSpan { start_line, start_col, end_line, end_col }
    }

    /// Single-point span, used for diagnostics.
    pub fn point(line: u32, col: u32) -> Self {
        SourceSpan::new(line, col, line, col)
    }

    pub fn line_count(&self) -> u32 {
        self.end_line.saturating_sub(self.start_line) + 1
    }

    /// True when `line` falls within the spanned lines.
    pub fn contains_line(&self, line: u32) -> bool {
        line >= self.start_line && line <= self.end_line
    }

    /// Merge two spans into the smallest span covering both.
    pub fn cover(&self, other: &SourceSpan) -> SourceSpan {
        let (start_line, start_col) = if (self.start_line, self.start_col)
            <= (other.start_line, other.start_col)
        {
            (self.start_line, self.start_col)
        } else {
            (other.start_line, other.start_col)
        };
        let (end_line, end_col) =
            if (self.end_line, self.end_col) >= (other.end_line, other.end_col) {
                (self.end_line, self.end_col)
            } else {
                (other.end_line, other.end_col)
            };
        SourceSpan { start_line, start_col, end_line, end_col }
    }
}

/// Returns true when the two spans share at least one line.
///
/// Line granularity is deliberate: patch hunks and function extents are both
/// line-addressed, so overlap checks never consult columns.
pub fn span_overlaps(a: &SourceSpan, b: &SourceSpan) -> bool {
    a.start_line <= b.end_line && b.start_line <= a.end_line
}

/// Identity of one function at one revision of one file.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FunctionKey {
    pub file_path: String,
    pub qualified_name: String,
    pub span: SourceSpan,
}

impl FunctionKey {
    pub fn new(file_path: impl Into<String>, qualified_name: impl Into<String>, span: SourceSpan) -> Self {
        FunctionKey { file_path: file_path.into(), qualified_name: qualified_name.into(), span }
    }

    pub fn start_line(&self) -> u32 {
        self.span.start_line
    }

    pub fn end_line(&self) -> u32 {
        self.span.end_line
    }
}
