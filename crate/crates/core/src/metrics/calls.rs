//! Invocation counting: NOI (outgoing) and NII (incoming).
//!
//! Resolution is lexical-first, name-based, and deliberately modest: no data
//! flow, no prototype chains. A plain `f()` looks for `f` defined in each
//! enclosing scope of the caller, innermost first, within the same file; a
//! method call `o.f()` keeps only the terminal name. Anything unresolved at
//! file scope falls back to a project-wide leaf-name lookup. `new`
//! expressions are construction, not invocation, and are excluded. Ambiguous
//! names credit every candidate: NII is an over-approximation by design.

use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::inventory::Inventory;
use crate::parse::{Expr, MemberProp, Program};

use super::walk::{walk_own_fn, walk_own_stmts, OwnNode};
use super::AnalyzedFile;

/// One call expression, reduced to what resolution needs.
#[derive(Debug, Clone)]
pub struct CallSite {
    /// Record index of the function whose own code contains the call; `None`
    /// for top-level code.
    pub caller: Option<usize>,
    /// Same-file candidate qualified names, innermost scope first. Empty for
    /// member calls, which carry only a terminal name.
    pub lexical: Vec<String>,
    /// Leaf name used for the project-wide fallback.
    pub terminal: String,
}

/// Strips the `#N` disambiguation suffix so duplicate definitions collapse
/// back onto the name a call would use.
fn base_name(qualified: &str) -> &str {
    if let Some((head, tail)) = qualified.rsplit_once('#') {
        if !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_digit()) {
            return head;
        }
    }
    qualified
}

fn push_sites(
    caller: Option<usize>,
    scope: &[&str],
    node: OwnNode<'_>,
    sites: &mut Vec<CallSite>,
) {
    let OwnNode::Expr(Expr::Call { callee, .. }) = node else { return };
    match callee.as_ref() {
        Expr::Ident { name, .. } => {
            let mut lexical = Vec::with_capacity(scope.len() + 1);
            for k in (0..=scope.len()).rev() {
                let mut candidate = scope[..k].join(".");
                if !candidate.is_empty() {
                    candidate.push('.');
                }
                candidate.push_str(name);
                lexical.push(candidate);
            }
            sites.push(CallSite { caller, lexical, terminal: name.clone() });
        }
        Expr::Member { prop: MemberProp::Static(prop), .. } => {
            sites.push(CallSite { caller, lexical: Vec::new(), terminal: prop.clone() });
        }
        // Computed members, call results, IIFEs: no name to resolve.
        _ => {}
    }
}

/// Extracts every named call site in the file, per owning function.
pub fn collect_call_sites(program: &Program, inventory: &Inventory<'_>) -> Vec<CallSite> {
    let mut sites = Vec::new();
    walk_own_stmts(&program.body, &mut |node| push_sites(None, &[], node, &mut sites));
    for (idx, def) in inventory.defs.iter().enumerate() {
        let base = base_name(&inventory.records[idx].key.qualified_name);
        let scope: Vec<&str> = base.split('.').collect();
        walk_own_fn(def, &mut |node| push_sites(Some(idx), &scope, node, &mut sites));
    }
    sites
}

/// Fills `NOI` and `NII` across the whole project.
pub fn resolve_invocations(files: &mut [AnalyzedFile]) {
    // name → every record sharing it, for the cross-file fallback.
    let mut by_leaf: HashMap<&str, Vec<(usize, usize)>> = HashMap::new();
    // Per file: base-qualified name → records, for lexical resolution.
    let mut by_base: Vec<HashMap<&str, Vec<usize>>> = Vec::with_capacity(files.len());
    for (fi, file) in files.iter().enumerate() {
        let mut base_map: HashMap<&str, Vec<usize>> = HashMap::new();
        for (ri, record) in file.records.iter().enumerate() {
            by_leaf.entry(record.name.as_str()).or_default().push((fi, ri));
            base_map.entry(base_name(&record.key.qualified_name)).or_default().push(ri);
        }
        by_base.push(base_map);
    }

    let mut incoming: Vec<Vec<u32>> = files.iter().map(|f| alloc::vec![0; f.records.len()]).collect();
    let mut outgoing: Vec<Vec<u32>> = files.iter().map(|f| alloc::vec![0; f.records.len()]).collect();

    for (fi, file) in files.iter().enumerate() {
        for site in &file.call_sites {
            let mut targets: Vec<(usize, usize)> = Vec::new();
            for candidate in &site.lexical {
                if let Some(records) = by_base[fi].get(candidate.as_str()) {
                    targets.extend(records.iter().map(|&ri| (fi, ri)));
                    break;
                }
            }
            if targets.is_empty() {
                if let Some(records) = by_leaf.get(site.terminal.as_str()) {
                    targets.extend(records.iter().copied());
                }
            }
            if targets.is_empty() {
                continue;
            }
            if let Some(caller) = site.caller {
                outgoing[fi][caller] += 1;
            }
            for (tf, tr) in targets {
                incoming[tf][tr] += 1;
            }
        }
    }

    drop(by_leaf);
    drop(by_base);
    for (fi, file) in files.iter_mut().enumerate() {
        for (ri, vector) in file.vectors.iter_mut().enumerate() {
            vector.noi = outgoing[fi][ri] as f64;
            vector.nii = incoming[fi][ri] as f64;
        }
    }
}
