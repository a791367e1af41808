//! Core algorithms for function-level JavaScript vulnerability prediction.
//!
//! Everything in this crate is pure computation over in-memory data: a
//! pragmatic ES2017 lexer and function-boundary parser, the static source
//! metrics, incremental change-history aggregation, dataset assembly
//! primitives, ten from-scratch classifiers, and the evaluation statistics.
//! File formats, git access, and the command-line pipeline live in the
//! companion `vulnjs` crate.
//!
//! The crate is `no_std` (with `alloc`) so the analysis kernel stays free of
//! platform dependencies; all I/O is the caller's business.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod dataset;
pub mod eval;
pub mod learn;
pub mod inventory;
pub mod lex;
pub mod metrics;
pub mod parse;
pub mod process;
pub mod span;

pub use span::{FunctionKey, SourceSpan};

pub(crate) mod fmath {
    //! Thin wrappers so the rest of the crate never touches `libm` directly.

    pub fn sqrt(x: f64) -> f64 {
        libm::sqrt(x)
    }

    pub fn exp(x: f64) -> f64 {
        libm::exp(x)
    }

    pub fn ln(x: f64) -> f64 {
        libm::log(x)
    }

    pub fn log2(x: f64) -> f64 {
        libm::log2(x)
    }

    pub fn tanh(x: f64) -> f64 {
        libm::tanh(x)
    }

    // Only the p-value cross-check uses this; the shipping path goes through
    // the incomplete gamma function.
    #[cfg_attr(not(test), allow(dead_code))]
    pub fn erfc(x: f64) -> f64 {
        libm::erfc(x)
    }

    pub fn ln_gamma(x: f64) -> f64 {
        libm::lgamma(x)
    }
}
