//! Halstead counts over a function's own tokens.
//!
//! Classification table (fixed, shipped with the module):
//! - operands: identifiers, literals (numbers, strings, regexes, template
//!   chunks), and the value-like keywords `true`, `false`, `null`, `this`;
//! - operators: every other keyword, all operator tokens, and punctuation,
//!   except the closing brackets `)`, `]`, `}` whose pair is counted once at
//!   the opener;
//! - comments are ignored.
//!
//! Distinctness is by exact lexeme.

use hashbrown::HashSet;

use crate::fmath;
use crate::lex::{Token, TokenKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct HalsteadCounts {
    pub distinct_operators: u32,
    pub total_operators: u32,
    pub distinct_operands: u32,
    pub total_operands: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HalsteadDerived {
    pub length: f64,
    pub vocabulary: f64,
    pub volume: f64,
    pub difficulty: f64,
    pub effort: f64,
    pub bugs: f64,
    pub time: f64,
}

impl HalsteadCounts {
    pub fn derive(&self) -> HalsteadDerived {
        let n1 = self.distinct_operators as f64;
        let big_n1 = self.total_operators as f64;
        let n2 = self.distinct_operands as f64;
        let big_n2 = self.total_operands as f64;
        let length = big_n1 + big_n2;
        let vocabulary = n1 + n2;
        let volume = if vocabulary == 0.0 { 0.0 } else { length * fmath::log2(vocabulary) };
        let difficulty = if n2 == 0.0 { 0.0 } else { (n1 / 2.0) * (big_n2 / n2) };
        let effort = difficulty * volume;
        HalsteadDerived {
            length,
            vocabulary,
            volume,
            difficulty,
            effort,
            bugs: volume / 3000.0,
            time: effort / 18.0,
        }
    }
}

/// True for tokens counted as operands under the classification table.
fn is_operand(token: &Token) -> bool {
    match token.kind {
        TokenKind::Identifier | TokenKind::Literal => true,
        TokenKind::Keyword => matches!(token.lexeme.as_str(), "true" | "false" | "null" | "this"),
        _ => false,
    }
}

/// Counts the tokens owned by record `idx`. `owners[i]` is the innermost
/// function containing token `i` (see `size::token_owners`).
pub fn halstead_for(idx: usize, tokens: &[Token], owners: &[Option<usize>]) -> HalsteadCounts {
    let mut counts = HalsteadCounts::default();
    let mut operators: HashSet<&str> = HashSet::new();
    let mut operands: HashSet<&str> = HashSet::new();
    for (token, owner) in tokens.iter().zip(owners) {
        if *owner != Some(idx) || token.is_comment() {
            continue;
        }
        if is_operand(token) {
            counts.total_operands += 1;
            operands.insert(&token.lexeme);
        } else {
            // Bracket pairs count once, at the opener.
            if matches!(token.lexeme.as_str(), ")" | "]" | "}") {
                continue;
            }
            counts.total_operators += 1;
            operators.insert(&token.lexeme);
        }
    }
    counts.distinct_operators = operators.len() as u32;
    counts.distinct_operands = operands.len() as u32;
    counts
}
