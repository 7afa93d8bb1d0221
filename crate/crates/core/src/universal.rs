//! Universal variants: is *every* word of `R` a solution, and is every word
//! outside a finite exception set one.
//!
//! The reduction machinery eliminates the partial-codirectness constraint:
//! universal quantification commutes with the conjunction of the embedding
//! condition and the (itself universal) suffix condition. A negative
//! instance has a type-1 witness (`u(σ) ⋢ v(σ)`) or a type-2 witness (a
//! suffix `τ ∈ R'` with `u(τ) ⋢ v(τ)`); chasing both witness families
//! through suffix languages turns one partially-codirect universal question
//! into a plain almost-all question over a union of three languages:
//!
//! * `R` itself (type-1 witnesses),
//! * `→R ∩ R'` — suffixes of `R`-words constrained to `R'` (infinitely many
//!   distinct type-2 suffixes),
//! * `R̂ ∩ R'` with `R̂` the suffixes reached by removing more than `k_R`
//!   letters (one bad suffix of infinitely many hosts), asked plainly
//!   universally and therefore padded by a fresh neutral letter `z` with
//!   `u(z) = v(z) = ε`.
//!
//! The final almost-all oracle here is a bounded checker plus a sound
//! infinite-counterexample detector; completeness beyond the explored
//! bound is not claimed.

use std::sync::Arc;

use thiserror::Error;

use crate::automata::{suffix_language, Dfa, Nfa};
use crate::instance::{InstanceError, PepInstance, SuffixConstraint, Variant};
use crate::solver::{CountOutcome, ExactJustification};
use crate::words::{is_subword, Alphabet, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UniversalError {
    #[error("the construction needs a regular R' constraint")]
    NonRegularConstraint,
    #[error("operation not available for the {0} variant")]
    UnsupportedVariant(&'static str),
    #[error("budget exhausted after {explored} words")]
    BudgetExceeded { explored: u64 },
    #[error("instance construction failed: {0}")]
    Instance(String),
}

impl From<InstanceError> for UniversalError {
    fn from(e: InstanceError) -> Self {
        UniversalError::Instance(e.to_string())
    }
}

/// A counterexample `σ = α β γ` whose middle part is a nonempty
/// signature-idempotent loop of `R` with `|u(β)| > |v(β)|`: pumping `β`
/// stays in `R` and eventually outgrows every embedding, so all but
/// finitely many iterates are non-solutions — infinitely many in total.
#[derive(Debug, Clone)]
pub struct LoopWitness {
    pub word: Word,
    pub alpha_len: usize,
    pub beta_len: usize,
}

impl LoopWitness {
    pub fn pumped(&self, k: usize) -> Word {
        let i = self.alpha_len;
        let j = self.alpha_len + self.beta_len;
        self.word
            .prefix(i)
            .concat(&self.word.slice(i, j).repeat(k))
            .concat(&self.word.suffix_from(j))
    }
}

#[derive(Debug, Clone)]
pub enum UniversalVerdict {
    /// every enumerated word was a solution; says nothing beyond the bound
    HoldsUpTo { max_len: usize, checked: u64 },
    /// the first non-solution in canonical order, with its witness type:
    /// `type1` when the full embedding fails, `type2` when a gated partial
    /// condition fails
    Fails {
        counterexample: Word,
        type1: bool,
        type2: bool,
    },
    /// a loop certificate proves infinitely many non-solutions
    FailsInfinitely { witness: LoopWitness },
}

/// `(type1, type2)` classification of a non-solution.
pub fn classify_witness(inst: &PepInstance, sigma: &Word) -> (bool, bool) {
    let u = inst.morphism_u();
    let v = inst.morphism_v();
    let type1 = !is_subword(&u.apply(sigma), &v.apply(sigma));
    let n = sigma.len();
    let fails = |tau: &Word| !is_subword(&u.apply(tau), &v.apply(tau));
    let type2 = match inst.variant() {
        Variant::Plain => false,
        Variant::CodirPartial => (0..=n).any(|i| {
            let tau = sigma.suffix_from(i);
            inst.rp().contains(&tau) && fails(&tau)
        }),
        Variant::DirPartial => (0..=n).any(|i| {
            let tau = sigma.prefix(i);
            inst.rp().contains(&tau) && fails(&tau)
        }),
        Variant::CoAndDir => {
            (1..=n).any(|i| fails(&sigma.prefix(i))) || (1..n).any(|i| fails(&sigma.suffix_from(i)))
        }
    };
    (type1, type2)
}

fn fresh_token(al: &Alphabet, base: &str) -> String {
    if al.symbol(base).is_none() {
        return base.to_owned();
    }
    let mut i = 2usize;
    loop {
        let tok = format!("{base}{i}");
        if al.symbol(&tok).is_none() {
            return tok;
        }
        i += 1;
    }
}

fn extend_with_fresh(
    sigma: &Arc<Alphabet>,
    base: &str,
) -> (Arc<Alphabet>, String) {
    let tok = fresh_token(sigma, base);
    let mut tokens: Vec<String> = sigma.tokens().to_vec();
    tokens.push(tok.clone());
    let al = Alphabet::new(tokens).expect("fresh token stays fresh");
    (al, tok)
}

/// Appends `z*` to a language re-expressed over the extended alphabet.
fn pad_language(d: &Dfa, al: &Arc<Alphabet>, z: &str) -> Dfa {
    let z_sym = al.symbol(z).expect("padding letter exists");
    let nfa = d.to_nfa().reindex(al).expect("tokens are a subset");
    nfa.concat(&Nfa::symbol(al, z_sym).star())
        .determinize()
        .minimize()
}

/// Reduces the universal question to the almost-all question: a fresh
/// neutral letter `z` (`u(z) = v(z) = ε`) is appended, `R` becomes `R·z*`
/// and `R'` becomes `R'·z*`. Every word of the original `R` is a solution
/// iff all but finitely many words of the padded constraint are.
pub fn pad_forall_to_forall_inf(inst: &PepInstance) -> Result<PepInstance, UniversalError> {
    if !matches!(inst.variant(), Variant::Plain | Variant::CodirPartial) {
        return Err(UniversalError::UnsupportedVariant(inst.variant().as_str()));
    }
    let rp = inst
        .rp()
        .as_regular()
        .ok_or(UniversalError::NonRegularConstraint)?;
    let (sigma, z) = extend_with_fresh(inst.sigma(), "z");
    let eps = Word::empty(inst.gamma());
    let u = inst.morphism_u().extended(&sigma, vec![eps.clone()])?;
    let v = inst.morphism_v().extended(&sigma, vec![eps])?;
    let r = pad_language(inst.r(), &sigma, &z);
    let rp = pad_language(rp, &sigma, &z);
    Ok(PepInstance::new(
        inst.variant(),
        &sigma,
        inst.gamma(),
        u,
        v,
        r,
        SuffixConstraint::Regular(rp),
    )?)
}

/// The reduction's output with its three constituents kept for inspection.
#[derive(Debug, Clone)]
pub struct ForallReduction {
    /// plain instance over the (possibly extended) alphabet, to be asked as
    /// an almost-all question
    pub instance: PepInstance,
    /// `→R ∩ R'`, over the original alphabet
    pub suffixes_conjunct: Dfa,
    /// `R̂ ∩ R'`, over the original alphabet
    pub deep_suffixes_conjunct: Dfa,
    /// the suffix-removal threshold used for `R̂`
    pub k_r: usize,
    pub padded: bool,
    pub padding_token: Option<String>,
}

/// Builds the three-conjunct union for the almost-all reduction of a
/// partially-codirect universal instance. The padding letter is introduced
/// only when the plainly-universal conjunct is nonempty.
pub fn reduce_to_forall_inf_pep(inst: &PepInstance) -> Result<ForallReduction, UniversalError> {
    if !matches!(inst.variant(), Variant::Plain | Variant::CodirPartial) {
        return Err(UniversalError::UnsupportedVariant(inst.variant().as_str()));
    }
    let rp = inst
        .rp()
        .as_regular()
        .ok_or(UniversalError::NonRegularConstraint)?;
    let r_nfa = inst.r().to_nfa();
    let suffixes = suffix_language(&r_nfa, 0, false).determinize().minimize();
    let suffixes_conjunct = suffixes.intersect(rp);
    let k_r = inst.r().states();
    let deep = suffix_language(&r_nfa, k_r, true).determinize().minimize();
    let deep_suffixes_conjunct = deep.intersect(rp);

    let (sigma, union, padding_token) = if deep_suffixes_conjunct.is_empty_language() {
        let union = inst.r().union_with(&suffixes_conjunct);
        (Arc::clone(inst.sigma()), union, None)
    } else {
        let (sigma, z) = extend_with_fresh(inst.sigma(), "z");
        let reindex = |d: &Dfa| {
            d.to_nfa()
                .reindex(&sigma)
                .expect("tokens are a subset")
                .determinize()
                .minimize()
        };
        let padded_deep = pad_language(&deep_suffixes_conjunct, &sigma, &z);
        let union = reindex(inst.r())
            .union_with(&reindex(&suffixes_conjunct))
            .union_with(&padded_deep);
        (sigma, union, Some(z))
    };
    let padded = padding_token.is_some();
    let (u, v) = if padded {
        let eps = Word::empty(inst.gamma());
        (
            inst.morphism_u().extended(&sigma, vec![eps.clone()])?,
            inst.morphism_v().extended(&sigma, vec![eps])?,
        )
    } else {
        (inst.morphism_u().clone(), inst.morphism_v().clone())
    };
    let instance = PepInstance::new(
        Variant::Plain,
        &sigma,
        inst.gamma(),
        u,
        v,
        union,
        SuffixConstraint::none(&sigma),
    )?;
    Ok(ForallReduction {
        instance,
        suffixes_conjunct,
        deep_suffixes_conjunct,
        k_r,
        padded,
        padding_token,
    })
}

fn enumerate_checked<'a>(
    inst: &'a PepInstance,
    max_len: usize,
    budget: u64,
) -> impl Iterator<Item = Result<(Word, bool), UniversalError>> + 'a {
    let mut seen = 0u64;
    inst.r().enumerate(max_len).map(move |w| {
        seen += 1;
        if seen > budget {
            return Err(UniversalError::BudgetExceeded { explored: seen });
        }
        let ok = inst.check_solution(&w).is_solution();
        Ok((w, ok))
    })
}

/// Bounded check that every word of `R` up to `max_len` is a solution.
/// Fails on the first counterexample in canonical order.
pub fn forall_check(
    inst: &PepInstance,
    max_len: usize,
    budget: u64,
) -> Result<UniversalVerdict, UniversalError> {
    let mut checked = 0u64;
    for item in enumerate_checked(inst, max_len, budget) {
        let (w, ok) = item?;
        checked += 1;
        if !ok {
            let (type1, type2) = classify_witness(inst, &w);
            return Ok(UniversalVerdict::Fails {
                counterexample: w,
                type1,
                type2,
            });
        }
    }
    Ok(UniversalVerdict::HoldsUpTo { max_len, checked })
}

/// Searches a counterexample for a nonempty loop `β` with an idempotent
/// `R`-signature and `|u(β)| > |v(β)|`; iterates are re-verified as
/// non-solutions for small exponents before the witness is trusted.
pub fn find_loop_witness(inst: &PepInstance, counterexample: &Word) -> Option<LoopWitness> {
    let n = counterexample.len();
    let r = inst.r();
    let u = inst.morphism_u();
    let v = inst.morphism_v();
    for i in 0..n {
        for j in (i + 1)..=n {
            let beta = counterexample.slice(i, j);
            if u.apply(&beta).len() <= v.apply(&beta).len() {
                continue;
            }
            if !r.signature(&beta).is_idempotent() {
                continue;
            }
            let witness = LoopWitness {
                word: counterexample.clone(),
                alpha_len: i,
                beta_len: j - i,
            };
            let verified = (2..=4).all(|k| {
                let pumped = witness.pumped(k);
                r.membership(&pumped) && !inst.check_solution(&pumped).is_solution()
            });
            if verified {
                return Some(witness);
            }
        }
    }
    None
}

/// Bounded check of "all but finitely many words of `R` are solutions".
/// Only a loop certificate can refute it; finitely many plain
/// counterexamples prove nothing and leave the verdict bounded.
pub fn forall_inf_check(
    inst: &PepInstance,
    max_len: usize,
    budget: u64,
) -> Result<UniversalVerdict, UniversalError> {
    let mut checked = 0u64;
    for item in enumerate_checked(inst, max_len, budget) {
        let (w, ok) = item?;
        checked += 1;
        if !ok {
            if let Some(witness) = find_loop_witness(inst, &w) {
                return Ok(UniversalVerdict::FailsInfinitely { witness });
            }
        }
    }
    Ok(UniversalVerdict::HoldsUpTo { max_len, checked })
}

#[derive(Debug, Clone)]
pub struct NonSolutionCount {
    pub outcome: CountOutcome<LoopWitness>,
    pub max_len: usize,
    pub enumerated: u64,
}

/// Counts the words of `R` that are not solutions, up to `max_len`.
pub fn count_non_solutions(
    inst: &PepInstance,
    max_len: usize,
    budget: u64,
) -> Result<NonSolutionCount, UniversalError> {
    let mut count = 0u64;
    let mut enumerated = 0u64;
    for item in enumerate_checked(inst, max_len, budget) {
        let (w, ok) = item?;
        enumerated += 1;
        if ok {
            continue;
        }
        count += 1;
        if let Some(witness) = find_loop_witness(inst, &w) {
            return Ok(NonSolutionCount {
                outcome: CountOutcome::Infinite(witness),
                max_len,
                enumerated,
            });
        }
    }
    let outcome = match inst.r().finite_max_len() {
        Some(longest) if longest <= max_len => CountOutcome::Exact {
            count,
            justification: ExactJustification::LanguageFinite { longest },
        },
        _ => CountOutcome::FiniteAtLeast { count },
    };
    Ok(NonSolutionCount {
        outcome,
        max_len,
        enumerated,
    })
}
