//! Blue/red index colouring and the four margin families on a candidate.
//!
//! For a word `σ` of length `N`, index `i ∈ [0, N]` is blue when the image
//! suffix `u_{i,N}` embeds in `v_{i,N}`, red otherwise. Margins are extremal
//! slack words at an index:
//!
//! * `l_i` (blue) — longest suffix of `u_{0,i}` with `l_i·u_{i,N} ⊑ v_{i,N}`;
//! * `r_i` (red) — shortest prefix of `u_{i,N}` with `r_i⁻¹·u_{i,N} ⊑ v_{i,N}`;
//! * `s_i` (blue) — longest prefix of `v_{i,N}` with `u_{i,N} ⊑ s_i⁻¹·v_{i,N}`;
//! * `t_i` (red) — shortest suffix of `v_{0,i}` with `u_{i,N} ⊑ t_i·v_{i,N}`,
//!   which need not exist on arbitrary candidates and is then reported as
//!   undefined rather than failing.
//!
//! Everything here assumes the codirect orientation (`plain` or `codir`
//! variants); mirror `dir` instances first. Margins are memoized per
//! colouring and recomputed from scratch after cutting.

use std::sync::OnceLock;

use thiserror::Error;

use crate::automata::Signature;
use crate::instance::{PepInstance, SuffixConstraint, Variant};
use crate::words::{
    is_subword, longest_prefix_host, longest_suffix_carrier, same_alphabet,
    shortest_prefix_overflow, shortest_suffix_host, Word,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MarginError {
    #[error("index {0} is red, margin requires a blue index")]
    ExpectedBlue(usize),
    #[error("index {0} is blue, margin requires a red index")]
    ExpectedRed(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Color {
    Blue,
    Red,
}

/// A candidate word annotated with per-index colours, image cut points,
/// suffix signatures for both constraint automata, and memoized margins.
#[derive(Debug)]
pub struct ColoredSolution {
    word: Word,
    u_img: Word,
    v_img: Word,
    u_cuts: Vec<usize>,
    v_cuts: Vec<usize>,
    colors: Vec<Color>,
    r_sigs: Vec<Signature>,
    rp_sigs: Option<Vec<Signature>>,
    left_u: Vec<OnceLock<Word>>,
    right_u: Vec<OnceLock<Word>>,
    right_v: Vec<OnceLock<Word>>,
    left_v: Vec<OnceLock<Option<Word>>>,
}

/// Colours every index of `σ` (which need not be a solution).
///
/// Panics for `dir` and `coanddir` instances: the former must be mirrored
/// first, the latter has no colouring theory at all.
pub fn color_indices(inst: &PepInstance, sigma: &Word) -> ColoredSolution {
    ColoredSolution::new(inst, sigma)
}

impl ColoredSolution {
    pub fn new(inst: &PepInstance, sigma: &Word) -> ColoredSolution {
        assert!(
            matches!(inst.variant(), Variant::Plain | Variant::CodirPartial),
            "colouring works on the codirect orientation; mirror {} instances first",
            inst.variant()
        );
        assert!(
            same_alphabet(sigma.alphabet(), inst.sigma()),
            "colouring: word is not over the instance alphabet"
        );
        let n = sigma.len();
        let u_img = inst.morphism_u().apply(sigma);
        let v_img = inst.morphism_v().apply(sigma);
        let mut u_cuts = Vec::with_capacity(n + 1);
        let mut v_cuts = Vec::with_capacity(n + 1);
        let (mut cu, mut cv) = (0usize, 0usize);
        u_cuts.push(0);
        v_cuts.push(0);
        for &s in sigma.symbols() {
            cu += inst.morphism_u().image(s).len();
            cv += inst.morphism_v().image(s).len();
            u_cuts.push(cu);
            v_cuts.push(cv);
        }
        let colors = (0..=n)
            .map(|i| {
                if is_subword(
                    &u_img.suffix_from(u_cuts[i]),
                    &v_img.suffix_from(v_cuts[i]),
                ) {
                    Color::Blue
                } else {
                    Color::Red
                }
            })
            .collect();
        // suffix signatures, built from the back: sig(σ[i,N)) = sig(σ[i]) ∘ sig(σ[i+1,N))
        let suffix_sigs = |dfa: &crate::automata::Dfa| {
            let mut sigs = vec![Signature::identity(dfa.states()); n + 1];
            for i in (0..n).rev() {
                let sym_sig = dfa.symbol_signature(sigma.get(i));
                sigs[i] = sym_sig.compose(&sigs[i + 1]);
            }
            sigs
        };
        let r_sigs = suffix_sigs(inst.r());
        let rp_sigs = match inst.rp() {
            SuffixConstraint::Regular(d) => Some(suffix_sigs(d)),
            SuffixConstraint::LengthDiff(_) => None,
        };
        ColoredSolution {
            word: sigma.clone(),
            u_img,
            v_img,
            u_cuts,
            v_cuts,
            colors,
            r_sigs,
            rp_sigs,
            left_u: (0..=n).map(|_| OnceLock::new()).collect(),
            right_u: (0..=n).map(|_| OnceLock::new()).collect(),
            right_v: (0..=n).map(|_| OnceLock::new()).collect(),
            left_v: (0..=n).map(|_| OnceLock::new()).collect(),
        }
    }

    /// `N`, the candidate length; indices run over `0..=N`.
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn color(&self, i: usize) -> Color {
        self.colors[i]
    }

    pub fn is_blue(&self, i: usize) -> bool {
        self.colors[i] == Color::Blue
    }

    /// `u_{0,i}`
    pub fn u_prefix(&self, i: usize) -> Word {
        self.u_img.prefix(self.u_cuts[i])
    }

    /// `u_{i,N}`
    pub fn u_suffix(&self, i: usize) -> Word {
        self.u_img.suffix_from(self.u_cuts[i])
    }

    /// `v_{0,i}`
    pub fn v_prefix(&self, i: usize) -> Word {
        self.v_img.prefix(self.v_cuts[i])
    }

    /// `v_{i,N}`
    pub fn v_suffix(&self, i: usize) -> Word {
        self.v_img.suffix_from(self.v_cuts[i])
    }

    /// `u(σ[i,j))`
    pub fn u_segment(&self, i: usize, j: usize) -> Word {
        self.u_img.slice(self.u_cuts[i], self.u_cuts[j])
    }

    /// `v(σ[i,j))`
    pub fn v_segment(&self, i: usize, j: usize) -> Word {
        self.v_img.slice(self.v_cuts[i], self.v_cuts[j])
    }

    /// `l_i`, defined at blue indices.
    pub fn left_margin_u(&self, i: usize) -> Result<Word, MarginError> {
        if !self.is_blue(i) {
            return Err(MarginError::ExpectedBlue(i));
        }
        Ok(self.left_u[i]
            .get_or_init(|| {
                longest_suffix_carrier(&self.u_prefix(i), &self.u_suffix(i), &self.v_suffix(i))
                    .expect("blue index guarantees u_{i,N} ⊑ v_{i,N}")
            })
            .clone())
    }

    /// `r_i`, defined at red indices; never empty there.
    pub fn right_margin_u(&self, i: usize) -> Result<Word, MarginError> {
        if self.is_blue(i) {
            return Err(MarginError::ExpectedRed(i));
        }
        Ok(self.right_u[i]
            .get_or_init(|| shortest_prefix_overflow(&self.u_suffix(i), &self.v_suffix(i)))
            .clone())
    }

    /// `s_i`, defined at blue indices.
    pub fn right_margin_v(&self, i: usize) -> Result<Word, MarginError> {
        if !self.is_blue(i) {
            return Err(MarginError::ExpectedBlue(i));
        }
        Ok(self.right_v[i]
            .get_or_init(|| {
                longest_prefix_host(&self.u_suffix(i), &self.v_suffix(i))
                    .expect("blue index guarantees u_{i,N} ⊑ v_{i,N}")
            })
            .clone())
    }

    /// `t_i`, defined at red indices when `u_{i,N} ⊑ v(σ)` at all;
    /// `Ok(None)` reports the margin as undefined.
    pub fn left_margin_v(&self, i: usize) -> Result<Option<Word>, MarginError> {
        if self.is_blue(i) {
            return Err(MarginError::ExpectedRed(i));
        }
        Ok(self.left_v[i]
            .get_or_init(|| {
                shortest_suffix_host(&self.u_suffix(i), &self.v_prefix(i), &self.v_suffix(i)).ok()
            })
            .clone())
    }

    /// Congruence of the suffixes `σ[i,N)` and `σ[j,N)` under both
    /// constraint automata. Conservatively false when `R'` is not regular,
    /// so no cutting or pumping ever fires there.
    pub fn congruent(&self, i: usize, j: usize) -> bool {
        self.r_sigs[i] == self.r_sigs[j]
            && match &self.rp_sigs {
                Some(sigs) => sigs[i] == sigs[j],
                None => false,
            }
    }
}
