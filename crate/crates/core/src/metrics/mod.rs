//! Static source-code metrics: 42 values per function.
//!
//! Metric computation runs in two phases. `analyze_file` is a pure per-file
//! pass (parallelizable) producing per-function vectors with the file-local
//! metrics filled in, plus the call sites and normalized token stream the
//! project phase needs. `finalize_project` then resolves cross-file
//! invocation counts and clone metrics in one reduce step.
//!
//! The metric names and the exact emission order follow the published
//! reference table; `McCC`/`CYCL` and `NUMPAR`/`PARAMS` are alias pairs and
//! are emitted as duplicate columns.

pub mod calls;
pub mod clones;
pub mod complexity;
pub mod halstead;
pub mod lint;
pub mod size;
mod walk;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::inventory::{inventory_program, FunctionRecord};
use crate::lex::{tokenize, Diagnostic};
use crate::parse;

/// CSV column order for the static block. `CYCL` duplicates `McCC` and
/// `PARAMS` duplicates `NUMPAR`.
pub const STATIC_COLUMNS: [&str; 42] = [
    "CC",
    "CCL",
    "CCO",
    "CI",
    "CLC",
    "LDC",
    "McCC",
    "CYCL",
    "NII",
    "NL",
    "NLE",
    "NOI",
    "CD",
    "TCD",
    "CLOC",
    "TCLOC",
    "DLOC",
    "LLOC",
    "TLLOC",
    "LOC",
    "TLOC",
    "NOS",
    "TNOS",
    "NUMPAR",
    "PARAMS",
    "HOR_D",
    "HOR_T",
    "HON_D",
    "HON_T",
    "HLEN",
    "HVOC",
    "HDIFF",
    "HVOL",
    "HEFF",
    "HBUGS",
    "HTIME",
    "CYCL_DENS",
    "WarningInfo",
    "WarningMinor",
    "WarningMajor",
    "WarningCritical",
    "WarningBlocker",
];

/// One function's static metrics. All values are stored as `f64` so the
/// vector can flow into CSV emission and model training unchanged; count
/// metrics always hold exact small integers.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StaticVector {
    pub cc: f64,
    pub ccl: f64,
    pub cco: f64,
    pub ci: f64,
    pub clc: f64,
    pub ldc: f64,
    pub mccc: f64,
    pub nii: f64,
    pub nl: f64,
    pub nle: f64,
    pub noi: f64,
    pub cd: f64,
    pub tcd: f64,
    pub cloc: f64,
    pub tcloc: f64,
    pub dloc: f64,
    pub lloc: f64,
    pub tlloc: f64,
    pub loc: f64,
    pub tloc: f64,
    pub nos: f64,
    pub tnos: f64,
    pub numpar: f64,
    pub hor_d: f64,
    pub hor_t: f64,
    pub hon_d: f64,
    pub hon_t: f64,
    pub hlen: f64,
    pub hvoc: f64,
    pub hdiff: f64,
    pub hvol: f64,
    pub heff: f64,
    pub hbugs: f64,
    pub htime: f64,
    pub cycl_dens: f64,
    pub warning_info: f64,
    pub warning_minor: f64,
    pub warning_major: f64,
    pub warning_critical: f64,
    pub warning_blocker: f64,
}

impl StaticVector {
    /// Values in [`STATIC_COLUMNS`] order, alias columns duplicated.
    pub fn to_row(&self) -> [f64; 42] {
        [
            self.cc,
            self.ccl,
            self.cco,
            self.ci,
            self.clc,
            self.ldc,
            self.mccc,
            self.mccc,
            self.nii,
            self.nl,
            self.nle,
            self.noi,
            self.cd,
            self.tcd,
            self.cloc,
            self.tcloc,
            self.dloc,
            self.lloc,
            self.tlloc,
            self.loc,
            self.tloc,
            self.nos,
            self.tnos,
            self.numpar,
            self.numpar,
            self.hor_d,
            self.hor_t,
            self.hon_d,
            self.hon_t,
            self.hlen,
            self.hvoc,
            self.hdiff,
            self.hvol,
            self.heff,
            self.hbugs,
            self.htime,
            self.cycl_dens,
            self.warning_info,
            self.warning_minor,
            self.warning_major,
            self.warning_critical,
            self.warning_blocker,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("unknown severity `{0}` in lint configuration")]
    UnknownSeverity(String),
    #[error("unknown lint rule `{0}` in configuration")]
    UnknownRule(String),
    #[error("clone window must be at least 2 tokens, got {0}")]
    InvalidCloneWindow(usize),
}

/// Tuning knobs for the static pass. Loaded from the config file by the CLI;
/// every key has a default matching the documented metric definitions.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsConfig {
    /// Minimum clone length in normalized tokens.
    pub clone_window: usize,
    /// McCC construct toggles.
    pub mccc_if: bool,
    pub mccc_for: bool,
    pub mccc_foreach: bool,
    pub mccc_while: bool,
    pub mccc_do: bool,
    pub mccc_case: bool,
    pub mccc_catch: bool,
    pub mccc_ternary: bool,
    /// Rule-id → severity-name overrides for the built-in lint rules.
    pub lint_severities: BTreeMap<String, String>,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            clone_window: 50,
            mccc_if: true,
            mccc_for: true,
            mccc_foreach: true,
            mccc_while: true,
            mccc_do: true,
            mccc_case: true,
            mccc_catch: true,
            mccc_ternary: true,
            lint_severities: BTreeMap::new(),
        }
    }
}

impl MetricsConfig {
    pub fn validate(&self) -> Result<(), MetricsError> {
        if self.clone_window < 2 {
            return Err(MetricsError::InvalidCloneWindow(self.clone_window));
        }
        lint::RuleSet::from_config(self)?;
        Ok(())
    }
}

/// Per-file analysis output: everything the project phase needs, with no
/// references back into the AST.
#[derive(Debug, Clone)]
pub struct AnalyzedFile {
    pub path: String,
    pub records: Vec<FunctionRecord>,
    /// Parallel to `records`; invocation and clone fields are zero until
    /// [`finalize_project`] runs.
    pub vectors: Vec<StaticVector>,
    pub diagnostics: Vec<Diagnostic>,
    /// Lexer or parser recovered from errors; spans may be approximate.
    pub partial: bool,
    call_sites: Vec<calls::CallSite>,
    norm_tokens: clones::NormTokens,
}

/// Phase one: lex, parse, inventory, and compute all file-local metrics.
pub fn analyze_file(
    path: &str,
    source: &str,
    config: &MetricsConfig,
) -> Result<AnalyzedFile, MetricsError> {
    let rules = lint::RuleSet::from_config(config)?;
    let stream = tokenize(source);
    let parsed = parse::parse(&stream);
    let inventory = inventory_program(path, &parsed.program);

    let owners = size::token_owners(&stream.tokens, &inventory.records);
    let sizes = size::size_and_comments(&stream.tokens, &owners, &inventory);
    let mut vectors: Vec<StaticVector> = Vec::with_capacity(inventory.records.len());

    for (idx, def) in inventory.defs.iter().enumerate() {
        let mut v = StaticVector::default();

        let h = halstead::halstead_for(idx, &stream.tokens, &owners);
        v.hor_d = h.distinct_operators as f64;
        v.hor_t = h.total_operators as f64;
        v.hon_d = h.distinct_operands as f64;
        v.hon_t = h.total_operands as f64;
        let d = h.derive();
        v.hlen = d.length;
        v.hvoc = d.vocabulary;
        v.hdiff = d.difficulty;
        v.hvol = d.volume;
        v.heff = d.effort;
        v.hbugs = d.bugs;
        v.htime = d.time;

        let c = complexity::complexity(def, config);
        v.mccc = c.mccc as f64;
        v.nl = c.nl as f64;
        v.nle = c.nle as f64;

        let s = &sizes[idx];
        v.loc = s.loc as f64;
        v.tloc = s.tloc as f64;
        v.lloc = s.lloc as f64;
        v.tlloc = s.tlloc as f64;
        v.cloc = s.cloc as f64;
        v.tcloc = s.tcloc as f64;
        v.dloc = s.dloc as f64;
        v.cd = s.cd;
        v.tcd = s.tcd;
        v.numpar = inventory.records[idx].param_count as f64;

        let nos = size::statements(def);
        v.nos = nos as f64;

        v.cycl_dens = if s.lloc == 0 { 0.0 } else { c.mccc as f64 / s.lloc as f64 };

        let warnings = lint::lint_function(def, &rules);
        v.warning_info = warnings.info as f64;
        v.warning_minor = warnings.minor as f64;
        v.warning_major = warnings.major as f64;
        v.warning_critical = warnings.critical as f64;
        v.warning_blocker = warnings.blocker as f64;

        vectors.push(v);
    }

    // TNOS aggregates own statement counts bottom-up; records are pre-order,
    // so children always come after their parents.
    let mut tnos: Vec<u64> = vectors.iter().map(|v| v.nos as u64).collect();
    for idx in (0..inventory.records.len()).rev() {
        if let Some(parent) = inventory.records[idx].parent {
            tnos[parent] += tnos[idx];
        }
    }
    for (v, t) in vectors.iter_mut().zip(&tnos) {
        v.tnos = *t as f64;
    }

    let call_sites = calls::collect_call_sites(&parsed.program, &inventory);
    let norm_tokens = clones::normalize_tokens(&stream.tokens);

    let mut diagnostics = stream.diagnostics.clone();
    diagnostics.extend(parsed.diagnostics.iter().cloned());
    Ok(AnalyzedFile {
        path: String::from(path),
        partial: !diagnostics.is_empty(),
        records: inventory.records,
        vectors,
        diagnostics,
        call_sites,
        norm_tokens,
    })
}

/// Phase two: cross-file invocation resolution and clone detection. Fills the
/// `NII`, `NOI`, and clone-family fields of every vector in place.
pub fn finalize_project(files: &mut [AnalyzedFile], config: &MetricsConfig) {
    calls::resolve_invocations(files);
    clones::clone_metrics(files, config.clone_window);
}

/// Convenience wrapper for single-project analysis from in-memory sources.
pub fn analyze_project(
    sources: &[(String, String)],
    config: &MetricsConfig,
) -> Result<Vec<AnalyzedFile>, MetricsError> {
    let mut files = Vec::with_capacity(sources.len());
    for (path, text) in sources {
        files.push(analyze_file(path, text, config)?);
    }
    finalize_project(&mut files, config);
    Ok(files)
}
