//! Problem instances: morphisms, constraint sets, variants, and solution
//! checking for all of them.
//!
//! An instance asks whether some `σ ∈ R` satisfies `u(σ) ⊑ v(σ)` together
//! with the variant's side conditions:
//!
//! * `plain` — no side condition;
//! * `dir` — `u(τ) ⊑ v(τ)` for every prefix `τ` of `σ` lying in `R'`;
//! * `codir` — the same for every suffix in `R'`;
//! * `coanddir` — both conditions at every split point, with `R' = Σ*`.
//!
//! The margin/cutting machinery in [`crate::margins`] and [`crate::cutting`]
//! works on the codirect orientation; direct instances are mirrored on entry
//! (see [`PepInstance::codir_oriented`]) and witnesses mirrored back.

use std::borrow::Cow;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::automata::Dfa;
use crate::words::{is_subword, same_alphabet, Alphabet, Symbol, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("morphism must map every letter of its domain (got {got}, need {need})")]
    MorphismIncomplete { got: usize, need: usize },
    #[error("morphism image for `{0}` is over the wrong alphabet")]
    ImageAlphabetMismatch(String),
    #[error("{0} automaton is over the wrong alphabet")]
    ConstraintAlphabetMismatch(&'static str),
    #[error("the target alphabet must not be empty")]
    EmptyTargetAlphabet,
    #[error("operation not available for the {0} variant")]
    UnsupportedVariant(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Plain,
    DirPartial,
    CodirPartial,
    CoAndDir,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::DirPartial => "dir",
            Variant::CodirPartial => "codir",
            Variant::CoAndDir => "coanddir",
        }
    }

    pub fn parse(text: &str) -> Option<Variant> {
        match text {
            "plain" => Some(Variant::Plain),
            "dir" => Some(Variant::DirPartial),
            "codir" => Some(Variant::CodirPartial),
            "coanddir" => Some(Variant::CoAndDir),
            _ => None,
        }
    }

    /// The variant whose solutions are the mirrors of this one's.
    pub fn mirrored(self) -> Variant {
        match self {
            Variant::DirPartial => Variant::CodirPartial,
            Variant::CodirPartial => Variant::DirPartial,
            v => v,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A total map from the letters of one alphabet to words over another,
/// applied to words letter by letter.
#[derive(Debug, Clone)]
pub struct Morphism {
    domain: Arc<Alphabet>,
    codomain: Arc<Alphabet>,
    images: Vec<Word>,
    expansion: usize,
}

impl Morphism {
    pub fn new(
        domain: &Arc<Alphabet>,
        codomain: &Arc<Alphabet>,
        images: Vec<Word>,
    ) -> Result<Morphism, InstanceError> {
        if images.len() != domain.len() {
            return Err(InstanceError::MorphismIncomplete {
                got: images.len(),
                need: domain.len(),
            });
        }
        for (i, img) in images.iter().enumerate() {
            if !same_alphabet(img.alphabet(), codomain) {
                return Err(InstanceError::ImageAlphabetMismatch(
                    domain.token(Symbol::new(i)).to_owned(),
                ));
            }
        }
        let expansion = images.iter().map(Word::len).max().unwrap_or(0);
        Ok(Morphism {
            domain: Arc::clone(domain),
            codomain: Arc::clone(codomain),
            images,
            expansion,
        })
    }

    pub fn domain(&self) -> &Arc<Alphabet> {
        &self.domain
    }

    pub fn codomain(&self) -> &Arc<Alphabet> {
        &self.codomain
    }

    pub fn image(&self, sym: Symbol) -> &Word {
        &self.images[sym.id()]
    }

    /// The longest image length, the expansion factor `K`.
    pub fn expansion_factor(&self) -> usize {
        self.expansion
    }

    pub fn apply(&self, w: &Word) -> Word {
        assert!(
            same_alphabet(w.alphabet(), &self.domain),
            "apply: word is not over the morphism's domain"
        );
        let mut syms = Vec::new();
        for &s in w.symbols() {
            syms.extend_from_slice(self.images[s.id()].symbols());
        }
        Word::from_symbols(&self.codomain, syms)
    }

    /// The morphism with every image mirrored; satisfies
    /// `mirrored(m)(mirror(w)) = mirror(m(w))`.
    pub fn mirrored(&self) -> Morphism {
        Morphism {
            domain: Arc::clone(&self.domain),
            codomain: Arc::clone(&self.codomain),
            images: self.images.iter().map(Word::mirror).collect(),
            expansion: self.expansion,
        }
    }

    /// Extends the domain with fresh letters mapped to the given images.
    pub fn extended(
        &self,
        new_domain: &Arc<Alphabet>,
        extra: Vec<Word>,
    ) -> Result<Morphism, InstanceError> {
        let mut images = self.images.clone();
        images.extend(extra);
        Morphism::new(new_domain, &self.codomain, images)
    }
}

/// Membership test for the non-regular constraint
/// `{ τ 2 τ' : τ, τ' plain, |u(ττ')| ≠ |v(ττ')| }`:
/// one left-to-right pass tracking the image-length difference and the
/// single occurrence of the marker letter.
#[derive(Debug, Clone)]
pub struct LengthDiffPredicate {
    marker: Symbol,
    forbidden: Symbol,
    diffs: Vec<i64>,
}

impl LengthDiffPredicate {
    pub fn new(u: &Morphism, v: &Morphism, marker: Symbol, forbidden: Symbol) -> Self {
        let diffs = (0..u.domain().len())
            .map(|i| {
                let s = Symbol::new(i);
                u.image(s).len() as i64 - v.image(s).len() as i64
            })
            .collect();
        LengthDiffPredicate {
            marker,
            forbidden,
            diffs,
        }
    }

    pub fn marker(&self) -> Symbol {
        self.marker
    }

    pub fn contains(&self, w: &Word) -> bool {
        let mut markers = 0usize;
        let mut diff = 0i64;
        for &s in w.symbols() {
            if s == self.forbidden {
                return false;
            }
            if s == self.marker {
                markers += 1;
            } else {
                diff += self.diffs[s.id()];
            }
        }
        markers == 1 && diff != 0
    }
}

/// The `R'` parameter: a regular language or the streaming length-difference
/// predicate used by correspondence-problem encodings.
#[derive(Debug, Clone)]
pub enum SuffixConstraint {
    Regular(Dfa),
    LengthDiff(LengthDiffPredicate),
}

impl SuffixConstraint {
    pub fn none(sigma: &Arc<Alphabet>) -> SuffixConstraint {
        SuffixConstraint::Regular(Dfa::empty_language(sigma))
    }

    pub fn all(sigma: &Arc<Alphabet>) -> SuffixConstraint {
        SuffixConstraint::Regular(Dfa::universal(sigma))
    }

    pub fn contains(&self, w: &Word) -> bool {
        match self {
            SuffixConstraint::Regular(d) => d.membership(w),
            SuffixConstraint::LengthDiff(p) => p.contains(w),
        }
    }

    pub fn as_regular(&self) -> Option<&Dfa> {
        match self {
            SuffixConstraint::Regular(d) => Some(d),
            SuffixConstraint::LengthDiff(_) => None,
        }
    }
}

/// Where a candidate fails, naming the earliest offending split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitSide {
    /// the whole word (plain variant)
    Full,
    /// the prefix `σ[0, split)`
    Prefix,
    /// the suffix `σ[split, N)`
    Suffix,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Solution,
    FailsMembership,
    FailsEmbedding { side: SplitSide, split: usize },
}

impl Verdict {
    pub fn is_solution(&self) -> bool {
        matches!(self, Verdict::Solution)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Solution => write!(f, "solution"),
            Verdict::FailsMembership => write!(f, "not in R"),
            Verdict::FailsEmbedding { side, split } => match side {
                SplitSide::Full => write!(f, "u(sigma) does not embed in v(sigma)"),
                SplitSide::Prefix => write!(f, "embedding fails on the prefix of length {split}"),
                SplitSide::Suffix => write!(f, "embedding fails on the suffix from index {split}"),
            },
        }
    }
}

/// A full problem instance. `R` and a regular `R'` are stored minimized, so
/// congruence signatures have syntactic-monoid granularity.
#[derive(Debug, Clone)]
pub struct PepInstance {
    variant: Variant,
    sigma: Arc<Alphabet>,
    gamma: Arc<Alphabet>,
    u: Morphism,
    v: Morphism,
    r: Dfa,
    rp: SuffixConstraint,
}

impl PepInstance {
    /// Builds and normalizes an instance: `R`/`R'` are minimized, `plain`
    /// forces `R' = ∅` and `coanddir` forces `R' = Σ*`.
    pub fn new(
        variant: Variant,
        sigma: &Arc<Alphabet>,
        gamma: &Arc<Alphabet>,
        u: Morphism,
        v: Morphism,
        r: Dfa,
        rp: SuffixConstraint,
    ) -> Result<PepInstance, InstanceError> {
        if gamma.is_empty() {
            return Err(InstanceError::EmptyTargetAlphabet);
        }
        for (m, name) in [(&u, "u"), (&v, "v")] {
            if !same_alphabet(m.domain(), sigma) || !same_alphabet(m.codomain(), gamma) {
                return Err(InstanceError::ImageAlphabetMismatch(name.to_owned()));
            }
        }
        if !same_alphabet(r.alphabet(), sigma) {
            return Err(InstanceError::ConstraintAlphabetMismatch("R"));
        }
        let rp = match variant {
            Variant::Plain => SuffixConstraint::none(sigma),
            Variant::CoAndDir => SuffixConstraint::all(sigma),
            _ => rp,
        };
        let rp = match rp {
            SuffixConstraint::Regular(d) => {
                if !same_alphabet(d.alphabet(), sigma) {
                    return Err(InstanceError::ConstraintAlphabetMismatch("R'"));
                }
                SuffixConstraint::Regular(d.minimize())
            }
            other => other,
        };
        Ok(PepInstance {
            variant,
            sigma: Arc::clone(sigma),
            gamma: Arc::clone(gamma),
            u,
            v,
            r: r.minimize(),
            rp,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn sigma(&self) -> &Arc<Alphabet> {
        &self.sigma
    }

    pub fn gamma(&self) -> &Arc<Alphabet> {
        &self.gamma
    }

    pub fn morphism_u(&self) -> &Morphism {
        &self.u
    }

    pub fn morphism_v(&self) -> &Morphism {
        &self.v
    }

    pub fn r(&self) -> &Dfa {
        &self.r
    }

    pub fn rp(&self) -> &SuffixConstraint {
        &self.rp
    }

    /// `K_u`, the expansion factor of `u`.
    pub fn expansion_u(&self) -> usize {
        self.u.expansion_factor()
    }

    /// `K_v`.
    pub fn expansion_v(&self) -> usize {
        self.v.expansion_factor()
    }

    /// Variant-correct verdict for a candidate, naming the earliest
    /// offending split on failure.
    pub fn check_solution(&self, sigma: &Word) -> Verdict {
        assert!(
            same_alphabet(sigma.alphabet(), &self.sigma),
            "check_solution: candidate is not over the instance alphabet"
        );
        if !self.r.membership(sigma) {
            return Verdict::FailsMembership;
        }
        let n = sigma.len();
        match self.variant {
            Variant::Plain => {
                if !is_subword(&self.u.apply(sigma), &self.v.apply(sigma)) {
                    return Verdict::FailsEmbedding {
                        side: SplitSide::Full,
                        split: 0,
                    };
                }
            }
            Variant::CodirPartial => {
                for i in 0..=n {
                    let tau = sigma.suffix_from(i);
                    let required = i == 0 || self.rp.contains(&tau);
                    if required && !is_subword(&self.u.apply(&tau), &self.v.apply(&tau)) {
                        return Verdict::FailsEmbedding {
                            side: SplitSide::Suffix,
                            split: i,
                        };
                    }
                }
            }
            Variant::DirPartial => {
                for i in 0..=n {
                    let tau = sigma.prefix(i);
                    let required = i == n || self.rp.contains(&tau);
                    if required && !is_subword(&self.u.apply(&tau), &self.v.apply(&tau)) {
                        return Verdict::FailsEmbedding {
                            side: SplitSide::Prefix,
                            split: i,
                        };
                    }
                }
            }
            Variant::CoAndDir => {
                for i in 0..=n {
                    let tau = sigma.prefix(i);
                    if !is_subword(&self.u.apply(&tau), &self.v.apply(&tau)) {
                        return Verdict::FailsEmbedding {
                            side: SplitSide::Prefix,
                            split: i,
                        };
                    }
                    let tau = sigma.suffix_from(i);
                    if !is_subword(&self.u.apply(&tau), &self.v.apply(&tau)) {
                        return Verdict::FailsEmbedding {
                            side: SplitSide::Suffix,
                            split: i,
                        };
                    }
                }
            }
        }
        Verdict::Solution
    }

    /// The mirrored instance: every image mirrored, `R` and a regular `R'`
    /// mirrored, `dir` and `codir` swapped. Solutions correspond by word
    /// mirroring. The length-difference predicate only depends on letter
    /// counts, so it is mirror-invariant and kept as is.
    pub fn mirrored(&self) -> PepInstance {
        let mirror_dfa = |d: &Dfa| d.to_nfa().mirror_language().determinize().minimize();
        let rp = match &self.rp {
            SuffixConstraint::Regular(d) => SuffixConstraint::Regular(mirror_dfa(d)),
            SuffixConstraint::LengthDiff(p) => SuffixConstraint::LengthDiff(p.clone()),
        };
        PepInstance {
            variant: self.variant.mirrored(),
            sigma: Arc::clone(&self.sigma),
            gamma: Arc::clone(&self.gamma),
            u: self.u.mirrored(),
            v: self.v.mirrored(),
            r: mirror_dfa(&self.r),
            rp,
        }
    }

    /// The instance itself when already suited to the codirect machinery,
    /// the mirrored instance for `dir`. The flag says whether witnesses must
    /// be mirrored back.
    pub fn codir_oriented(&self) -> (Cow<'_, PepInstance>, bool) {
        match self.variant {
            Variant::DirPartial => (Cow::Owned(self.mirrored()), true),
            _ => (Cow::Borrowed(self), false),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Regex;

    fn toy_alphabets() -> (Arc<Alphabet>, Arc<Alphabet>) {
        (
            Alphabet::new(["0", "1"]).unwrap(),
            Alphabet::new(["a", "b"]).unwrap(),
        )
    }

    fn morphism(sigma: &Arc<Alphabet>, gamma: &Arc<Alphabet>, images: &[&str]) -> Morphism {
        let images = images
            .iter()
            .map(|text| Word::parse(gamma, text).unwrap())
            .collect();
        Morphism::new(sigma, gamma, images).unwrap()
    }

    fn dfa(text: &str, al: &Arc<Alphabet>) -> Dfa {
        Regex::parse(text, al).unwrap().to_nfa().determinize()
    }

    #[test]
    fn apply_morphism() {
        let (sigma, gamma) = toy_alphabets();
        let u = morphism(&sigma, &gamma, &["a b", ""]);
        assert_eq!(
            u.apply(&Word::parse(&sigma, "0 0").unwrap()),
            Word::parse(&gamma, "a b a b").unwrap()
        );
        assert_eq!(
            u.apply(&Word::parse(&sigma, "1 1").unwrap()),
            Word::empty(&gamma)
        );
        assert_eq!(u.expansion_factor(), 2);
    }

    #[test]
    fn plain_checking() {
        let (sigma, gamma) = toy_alphabets();
        let u = morphism(&sigma, &gamma, &["a", "a"]);
        let v = morphism(&sigma, &gamma, &["a", "a"]);
        let inst = PepInstance::new(
            Variant::Plain,
            &sigma,
            &gamma,
            u,
            v,
            dfa("0 +", &sigma),
            SuffixConstraint::none(&sigma),
        )
        .unwrap();
        assert!(inst
            .check_solution(&Word::parse(&sigma, "0").unwrap())
            .is_solution());
        assert_eq!(
            inst.check_solution(&Word::parse(&sigma, "1").unwrap()),
            Verdict::FailsMembership
        );

        let u = morphism(&sigma, &gamma, &["a a", "a"]);
        let v = morphism(&sigma, &gamma, &["a", "a"]);
        let inst = PepInstance::new(
            Variant::Plain,
            &sigma,
            &gamma,
            u,
            v,
            dfa("0 +", &sigma),
            SuffixConstraint::none(&sigma),
        )
        .unwrap();
        assert_eq!(
            inst.check_solution(&Word::parse(&sigma, "0").unwrap()),
            Verdict::FailsEmbedding {
                side: SplitSide::Full,
                split: 0
            }
        );
    }

    #[test]
    fn codir_gating_by_rp() {
        let (sigma, gamma) = toy_alphabets();
        let u = morphism(&sigma, &gamma, &["a a", ""]);
        let v = morphism(&sigma, &gamma, &["a a", "a a a a"]);
        let r = dfa("( 0 | 1 ) +", &sigma);
        // R' = suffixes starting with 1
        let rp = SuffixConstraint::Regular(dfa("1 ( 0 | 1 ) *", &sigma));
        let inst = PepInstance::new(Variant::CodirPartial, &sigma, &gamma, u, v, r, rp).unwrap();
        assert!(inst
            .check_solution(&Word::parse(&sigma, "1 0").unwrap())
            .is_solution());
        assert!(inst
            .check_solution(&Word::parse(&sigma, "0 0").unwrap())
            .is_solution());

        // with R' = Σ*, the bare suffix "0" must now embed on its own
        let u = morphism(&sigma, &gamma, &["a a", ""]);
        let v = morphism(&sigma, &gamma, &["a", "a a a a a a"]);
        let inst = PepInstance::new(
            Variant::CodirPartial,
            &sigma,
            &gamma,
            u,
            v,
            dfa("( 0 | 1 ) +", &sigma),
            SuffixConstraint::all(&sigma),
        )
        .unwrap();
        assert_eq!(
            inst.check_solution(&Word::parse(&sigma, "1 0").unwrap()),
            Verdict::FailsEmbedding {
                side: SplitSide::Suffix,
                split: 1
            }
        );
    }

    #[test]
    fn dir_is_codir_mirrored() {
        let (sigma, gamma) = toy_alphabets();
        let u = morphism(&sigma, &gamma, &["a b", "b"]);
        let v = morphism(&sigma, &gamma, &["b a b", "a"]);
        let r = dfa("0 ( 0 | 1 ) *", &sigma);
        let rp = SuffixConstraint::Regular(dfa("( 0 | 1 ) 0", &sigma));
        let inst = PepInstance::new(Variant::DirPartial, &sigma, &gamma, u, v, r, rp).unwrap();
        let mirrored = inst.mirrored();
        assert_eq!(mirrored.variant(), Variant::CodirPartial);
        for cand in Dfa::universal(&sigma).enumerate(5) {
            assert_eq!(
                inst.check_solution(&cand).is_solution(),
                mirrored.check_solution(&cand.mirror()).is_solution(),
                "candidate {cand}"
            );
        }
        // double mirror preserves the solution set
        let back = mirrored.mirrored();
        for cand in Dfa::universal(&sigma).enumerate(5) {
            assert_eq!(
                inst.check_solution(&cand).is_solution(),
                back.check_solution(&cand).is_solution()
            );
        }
    }

    #[test]
    fn coanddir_requires_both_sides() {
        let (sigma, gamma) = toy_alphabets();
        let u = morphism(&sigma, &gamma, &["a", "b"]);
        let v = morphism(&sigma, &gamma, &["b", "a"]);
        let inst = PepInstance::new(
            Variant::CoAndDir,
            &sigma,
            &gamma,
            u,
            v,
            dfa("( 0 | 1 ) *", &sigma),
            SuffixConstraint::none(&sigma),
        )
        .unwrap();
        // the whole word already fails as the suffix at split 0
        assert_eq!(
            inst.check_solution(&Word::parse(&sigma, "0 1").unwrap()),
            Verdict::FailsEmbedding {
                side: SplitSide::Suffix,
                split: 0
            }
        );
        assert!(inst.check_solution(&Word::empty(&sigma)).is_solution());
    }

    #[test]
    fn length_diff_predicate() {
        let ext_sigma = Alphabet::new(["0", "1", "one", "two"]).unwrap();
        let gamma = Alphabet::new(["a", "b", "#"]).unwrap();
        let u = morphism(&ext_sigma, &gamma, &["a a", "b", "", "#"]);
        let v = morphism(&ext_sigma, &gamma, &["a", "b", "#", ""]);
        let pred = LengthDiffPredicate::new(
            &u,
            &v,
            ext_sigma.symbol("two").unwrap(),
            ext_sigma.symbol("one").unwrap(),
        );
        // "two 0": the 0 contributes +1, one marker, no forbidden letter
        assert!(pred.contains(&Word::parse(&ext_sigma, "two 0").unwrap()));
        // balanced images
        assert!(!pred.contains(&Word::parse(&ext_sigma, "two 1").unwrap()));
        // no marker / two markers / forbidden letter
        assert!(!pred.contains(&Word::parse(&ext_sigma, "0").unwrap()));
        assert!(!pred.contains(&Word::parse(&ext_sigma, "two two 0").unwrap()));
        assert!(!pred.contains(&Word::parse(&ext_sigma, "one two 0").unwrap()));
    }
}
