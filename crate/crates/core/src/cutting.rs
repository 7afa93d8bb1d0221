//! Cutting and pumping of solutions along congruent same-colour index pairs.
//!
//! For a solution `σ` and congruent indices `a < b` of equal colour:
//!
//! * cutting — if both blue with `l_a ⊑ l_b`, or both red with `r_b ⊑ r_a`,
//!   then `σ[0,a)·σ[b,N)` is again a solution;
//! * pumping — if both blue with `s_b ⊑ s_a`, or both red with `t_a ⊑ t_b`,
//!   then `σ[0,a)·σ[a,b)^k·σ[b,N)` is a solution for every `k ≥ 1`, which
//!   certifies infinitely many solutions.
//!
//! Pair scans are deterministic: smallest `b` first, then largest `a`,
//! blue pass before red pass.

use thiserror::Error;

use crate::instance::{PepInstance, Verdict};
use crate::margins::{color_indices, Color, ColoredSolution};
use crate::words::{is_subword, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CutError {
    #[error("the word is not a solution")]
    NotASolution,
    #[error("indices must satisfy a < b <= N")]
    IndicesOutOfOrder,
    #[error("indices {0} and {1} are not congruent")]
    NotCongruent(usize, usize),
    #[error("indices {0} and {1} have different colours")]
    ColorMismatch(usize, usize),
    #[error("margins are not comparable in the required direction")]
    MarginsNotComparable,
    #[error("left v-margin is undefined at index {0}")]
    MarginUndefined(usize),
    #[error("the pump exponent must be at least 1")]
    BadExponent,
}

/// Evidence for one cut: the pair, its colour, and the compared margins.
#[derive(Debug, Clone)]
pub struct CutCertificate {
    pub a: usize,
    pub b: usize,
    pub color: Color,
    pub margin_a: Word,
    pub margin_b: Word,
}

/// Evidence for pumping; `exponent` is the suggested exponent for re-checks,
/// the certificate is valid for every `k ≥ 1`.
#[derive(Debug, Clone)]
pub struct PumpCertificate {
    pub a: usize,
    pub b: usize,
    pub color: Color,
    pub margin_a: Word,
    pub margin_b: Word,
    pub exponent: usize,
}

fn check_pair(
    inst: &PepInstance,
    colored: &ColoredSolution,
    a: usize,
    b: usize,
) -> Result<(), CutError> {
    if a >= b || b > colored.len() {
        return Err(CutError::IndicesOutOfOrder);
    }
    if !inst.check_solution(colored.word()).is_solution() {
        return Err(CutError::NotASolution);
    }
    if colored.color(a) != colored.color(b) {
        return Err(CutError::ColorMismatch(a, b));
    }
    if !colored.congruent(a, b) {
        return Err(CutError::NotCongruent(a, b));
    }
    Ok(())
}

/// Removes `σ[a,b)` after validating the cutting conditions. The result is
/// guaranteed to be a solution; this is re-checked and a violation is a bug.
pub fn cut(
    inst: &PepInstance,
    colored: &ColoredSolution,
    a: usize,
    b: usize,
) -> Result<Word, CutError> {
    check_pair(inst, colored, a, b)?;
    match colored.color(a) {
        Color::Blue => {
            let la = colored.left_margin_u(a).expect("a is blue");
            let lb = colored.left_margin_u(b).expect("b is blue");
            if !is_subword(&la, &lb) {
                return Err(CutError::MarginsNotComparable);
            }
        }
        Color::Red => {
            let ra = colored.right_margin_u(a).expect("a is red");
            let rb = colored.right_margin_u(b).expect("b is red");
            if !is_subword(&rb, &ra) {
                return Err(CutError::MarginsNotComparable);
            }
        }
    }
    let word = colored.word();
    let shorter = word.prefix(a).concat(&word.suffix_from(b));
    assert!(
        inst.check_solution(&shorter).is_solution(),
        "cutting produced a non-solution; this is a bug"
    );
    Ok(shorter)
}

/// Repeats `σ[a,b)` `k` times after validating the pumping conditions.
pub fn pump(
    inst: &PepInstance,
    colored: &ColoredSolution,
    a: usize,
    b: usize,
    k: usize,
) -> Result<Word, CutError> {
    if k < 1 {
        return Err(CutError::BadExponent);
    }
    check_pair(inst, colored, a, b)?;
    match colored.color(a) {
        Color::Blue => {
            let sa = colored.right_margin_v(a).expect("a is blue");
            let sb = colored.right_margin_v(b).expect("b is blue");
            if !is_subword(&sb, &sa) {
                return Err(CutError::MarginsNotComparable);
            }
        }
        Color::Red => {
            let ta = colored
                .left_margin_v(a)
                .expect("a is red")
                .ok_or(CutError::MarginUndefined(a))?;
            let tb = colored
                .left_margin_v(b)
                .expect("b is red")
                .ok_or(CutError::MarginUndefined(b))?;
            if !is_subword(&ta, &tb) {
                return Err(CutError::MarginsNotComparable);
            }
        }
    }
    let word = colored.word();
    let pumped = word
        .prefix(a)
        .concat(&word.slice(a, b).repeat(k))
        .concat(&word.suffix_from(b));
    assert!(
        inst.check_solution(&pumped).is_solution(),
        "pumping produced a non-solution; this is a bug"
    );
    Ok(pumped)
}

fn scan<F>(colored: &ColoredSolution, mut qualifies: F) -> Option<(usize, usize, Color)>
where
    F: FnMut(usize, usize) -> bool,
{
    for color in [Color::Blue, Color::Red] {
        for b in 1..=colored.len() {
            if colored.color(b) != color {
                continue;
            }
            for a in (0..b).rev() {
                if colored.color(a) == color && colored.congruent(a, b) && qualifies(a, b) {
                    return Some((a, b, color));
                }
            }
        }
    }
    None
}

/// First cut pair in canonical scan order, if any. Call on solutions.
pub fn find_cut_pair(inst: &PepInstance, colored: &ColoredSolution) -> Option<CutCertificate> {
    let _ = inst;
    let (a, b, color) = scan(colored, |a, b| match colored.color(a) {
        Color::Blue => is_subword(
            &colored.left_margin_u(a).expect("blue"),
            &colored.left_margin_u(b).expect("blue"),
        ),
        Color::Red => is_subword(
            &colored.right_margin_u(b).expect("red"),
            &colored.right_margin_u(a).expect("red"),
        ),
    })?;
    let (margin_a, margin_b) = match color {
        Color::Blue => (
            colored.left_margin_u(a).unwrap(),
            colored.left_margin_u(b).unwrap(),
        ),
        Color::Red => (
            colored.right_margin_u(a).unwrap(),
            colored.right_margin_u(b).unwrap(),
        ),
    };
    Some(CutCertificate {
        a,
        b,
        color,
        margin_a,
        margin_b,
    })
}

/// First pump pair in canonical scan order, if any. Undefined red margins
/// are skipped. Call on solutions.
pub fn find_pump_pair(inst: &PepInstance, colored: &ColoredSolution) -> Option<PumpCertificate> {
    let _ = inst;
    let (a, b, color) = scan(colored, |a, b| match colored.color(a) {
        Color::Blue => is_subword(
            &colored.right_margin_v(b).expect("blue"),
            &colored.right_margin_v(a).expect("blue"),
        ),
        Color::Red => match (
            colored.left_margin_v(a).expect("red"),
            colored.left_margin_v(b).expect("red"),
        ) {
            (Some(ta), Some(tb)) => is_subword(&ta, &tb),
            _ => false,
        },
    })?;
    let (margin_a, margin_b) = match color {
        Color::Blue => (
            colored.right_margin_v(a).unwrap(),
            colored.right_margin_v(b).unwrap(),
        ),
        Color::Red => (
            colored.left_margin_v(a).unwrap().unwrap(),
            colored.left_margin_v(b).unwrap().unwrap(),
        ),
    };
    Some(PumpCertificate {
        a,
        b,
        color,
        margin_a,
        margin_b,
        exponent: 2,
    })
}

/// Cuts repeatedly until no pair qualifies. The result is a solution
/// admitting no cut certificate. Requires a solution.
pub fn minimize_solution(inst: &PepInstance, sigma: &Word) -> Word {
    assert!(
        inst.check_solution(sigma).is_solution(),
        "minimize_solution requires a solution"
    );
    let mut word = sigma.clone();
    loop {
        let colored = color_indices(inst, &word);
        match find_cut_pair(inst, &colored) {
            Some(cert) => {
                word = cut(inst, &colored, cert.a, cert.b).expect("certificate was validated");
            }
            None => return word,
        }
    }
}

/// Convenience: verdict-checked view of whether a word is a solution.
pub fn is_solution(inst: &PepInstance, sigma: &Word) -> bool {
    matches!(inst.check_solution(sigma), Verdict::Solution)
}
