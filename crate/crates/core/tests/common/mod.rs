//! Shared deterministic generators and brute-force oracles for the
//! acceptance suite.

#![allow(dead_code)]

use std::sync::Arc;

use pep::automata::Dfa;
use pep::instance::{Morphism, PepInstance, SuffixConstraint, Variant};
use pep::words::{Alphabet, Symbol, Word};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn alphabet(tokens: &[&str]) -> Arc<Alphabet> {
    Alphabet::new(tokens.iter().copied()).unwrap()
}

pub fn nth_symbol(al: &Arc<Alphabet>, id: usize) -> Symbol {
    al.symbols().nth(id).expect("symbol index in range")
}

pub fn random_word(rng: &mut ChaCha8Rng, al: &Arc<Alphabet>, max_len: usize) -> Word {
    let len = rng.random_range(0..=max_len);
    random_word_of_len(rng, al, len)
}

pub fn random_word_of_len(rng: &mut ChaCha8Rng, al: &Arc<Alphabet>, len: usize) -> Word {
    let syms = (0..len)
        .map(|_| nth_symbol(al, rng.random_range(0..al.len())))
        .collect();
    Word::from_symbols(al, syms)
}

/// A uniform-ish random scattered subword of `w`.
pub fn random_subword(rng: &mut ChaCha8Rng, w: &Word) -> Word {
    let syms = w
        .symbols()
        .iter()
        .filter(|_| rng.random_bool(0.5))
        .copied()
        .collect();
    Word::from_symbols(w.alphabet(), syms)
}

/// A random complete DFA with up to `max_states` states; usually accepts
/// something.
pub fn random_dfa(rng: &mut ChaCha8Rng, al: &Arc<Alphabet>, max_states: usize) -> Dfa {
    let n = rng.random_range(1..=max_states);
    let delta = (0..n)
        .map(|_| (0..al.len()).map(|_| rng.random_range(0..n)).collect())
        .collect();
    let mut accepting: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.4)).collect();
    if accepting.is_empty() && rng.random_bool(0.85) {
        accepting.push(rng.random_range(0..n));
    }
    Dfa::from_parts(al, 0, accepting, delta)
}

/// A random morphism; `long` images make embeddings (and hence solutions)
/// more likely on the v side.
pub fn random_morphism(
    rng: &mut ChaCha8Rng,
    sigma: &Arc<Alphabet>,
    gamma: &Arc<Alphabet>,
    long: bool,
) -> Morphism {
    let images = (0..sigma.len())
        .map(|_| {
            let len = if long {
                *[0, 1, 1, 2, 2].choose(rng).unwrap()
            } else {
                *[0, 0, 1, 1, 2].choose(rng).unwrap()
            };
            random_word_of_len(rng, gamma, len)
        })
        .collect();
    Morphism::new(sigma, gamma, images).unwrap()
}

pub fn random_instance(rng: &mut ChaCha8Rng, variant: Variant) -> PepInstance {
    let sigma_tokens = ["0", "1", "2"];
    let gamma_tokens = ["a", "b", "c"];
    let sigma = alphabet(&sigma_tokens[..rng.random_range(1..=3)]);
    let gamma = alphabet(&gamma_tokens[..rng.random_range(1..=3)]);
    let u = random_morphism(rng, &sigma, &gamma, false);
    let v = random_morphism(rng, &sigma, &gamma, true);
    let r = random_dfa(rng, &sigma, 3);
    let rp = match rng.random_range(0..4) {
        0 => SuffixConstraint::none(&sigma),
        1 => SuffixConstraint::all(&sigma),
        _ => SuffixConstraint::Regular(random_dfa(rng, &sigma, 3)),
    };
    PepInstance::new(variant, &sigma, &gamma, u, v, r, rp).unwrap()
}

/// All solutions up to `max_len` by exhaustive generation over Σ, filtered
/// by the checker — the reference the solver is measured against.
pub fn brute_solutions(inst: &PepInstance, max_len: usize, cap: usize) -> Vec<Word> {
    Dfa::universal(inst.sigma())
        .enumerate(max_len)
        .filter(|w| inst.check_solution(w).is_solution())
        .take(cap)
        .collect()
}
