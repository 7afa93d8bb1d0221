//! Length-preserving string rewriting and its encoding into the co&dir
//! variant.
//!
//! One rewrite step `x → y` appears in a candidate as the letter-by-letter
//! interleaving `x ⧢ y` of the source with an overlined copy of the target
//! (`abc ⧢ bcc = a b̅ b c̅ c c̅`). A derivation with an even, non-zero number
//! of steps becomes an alternation of step encodings and *fillers* built
//! from primed copies (double-primed at the two ends). The morphisms send
//! plain letters to themselves under `u` and to a dagger under `v`, primed
//! letters the other way around, so each factor's `u`-image can only embed
//! into its neighbours' `v`-images: directness chains the derivation
//! forwards and codirectness chains it backwards, forcing consecutive
//! factors to carry equal words. Decoding reads the derivation back off the
//! tracks.
//!
//! The alphabet carries six copies of each letter: plain, primed,
//! double-primed, each also overlined. Overlining is written as a `~` token
//! prefix, primes literally (`a'`, `a''`).

use std::collections::{HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::automata::{to_regex, Dfa, Nfa, Regex};
use crate::instance::{Morphism, PepInstance, SuffixConstraint, Variant};
use crate::words::{same_alphabet, Alphabet, Symbol, Word};

use super::ReductionError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pub lhs: Word,
    pub rhs: Word,
}

/// A length-preserving string rewriting system with regular start and
/// target languages.
#[derive(Debug, Clone)]
pub struct SemiThueSystem {
    upsilon: Arc<Alphabet>,
    rules: Vec<RewriteRule>,
    p1: Dfa,
    p2: Dfa,
}

impl SemiThueSystem {
    pub fn new(
        upsilon: &Arc<Alphabet>,
        rules: Vec<RewriteRule>,
        p1: Dfa,
        p2: Dfa,
    ) -> Result<SemiThueSystem, ReductionError> {
        for (index, rule) in rules.iter().enumerate() {
            if rule.lhs.len() != rule.rhs.len() {
                return Err(ReductionError::NotLengthPreserving {
                    index,
                    lhs_len: rule.lhs.len(),
                    rhs_len: rule.rhs.len(),
                });
            }
            if rule.lhs.is_empty() {
                return Err(ReductionError::EmptyRule(index));
            }
            for w in [&rule.lhs, &rule.rhs] {
                if !same_alphabet(w.alphabet(), upsilon) {
                    return Err(ReductionError::Instance(
                        "rule words must be over the system alphabet".to_owned(),
                    ));
                }
            }
        }
        for (d, name) in [(&p1, "P1"), (&p2, "P2")] {
            if !same_alphabet(d.alphabet(), upsilon) {
                return Err(ReductionError::Instance(format!(
                    "{name} must be over the system alphabet"
                )));
            }
        }
        if p1.membership(&Word::empty(upsilon)) {
            return Err(ReductionError::EpsilonInStartLanguage);
        }
        Ok(SemiThueSystem {
            upsilon: Arc::clone(upsilon),
            rules,
            p1,
            p2,
        })
    }

    pub fn upsilon(&self) -> &Arc<Alphabet> {
        &self.upsilon
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn p1(&self) -> &Dfa {
        &self.p1
    }

    pub fn p2(&self) -> &Dfa {
        &self.p2
    }
}

fn apply_rule(w: &Word, rule: &RewriteRule, pos: usize) -> Option<Word> {
    let l = rule.lhs.len();
    if pos + l > w.len() {
        return None;
    }
    if w.symbols()[pos..pos + l] != *rule.lhs.symbols() {
        return None;
    }
    let mut syms = w.symbols().to_vec();
    syms[pos..pos + l].copy_from_slice(rule.rhs.symbols());
    Some(Word::from_symbols(w.alphabet(), syms))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RewriteStep {
    pub rule: usize,
    pub position: usize,
}

/// Successors under one rewrite step, ordered by rule then position.
pub fn one_step_successors(s: &SemiThueSystem, w: &Word) -> Vec<(Word, RewriteStep)> {
    let mut out = Vec::new();
    for (rule_idx, rule) in s.rules.iter().enumerate() {
        for pos in 0..=w.len().saturating_sub(rule.lhs.len()) {
            if let Some(next) = apply_rule(w, rule, pos) {
                out.push((
                    next,
                    RewriteStep {
                        rule: rule_idx,
                        position: pos,
                    },
                ));
            }
        }
    }
    out
}

/// A rewriting run `x_0 → x_1 → … → x_m` with each step justified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub words: Vec<Word>,
    pub steps: Vec<RewriteStep>,
}

impl Derivation {
    pub fn step_count(&self) -> usize {
        self.steps.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decoration {
    Plain,
    Primed,
    DoublePrimed,
}

/// The six-copies alphabet of an encoding: plain, primed and double-primed
/// copies of the system letters and the dagger, each also overlined.
#[derive(Debug, Clone)]
pub struct EncodedAlphabet {
    alphabet: Arc<Alphabet>,
    upsilon: Arc<Alphabet>,
}

const DAGGER: &str = "†";
const OVERLINE: &str = "~";

impl EncodedAlphabet {
    pub fn new(upsilon: &Arc<Alphabet>) -> Result<EncodedAlphabet, ReductionError> {
        for tok in upsilon.tokens() {
            if tok == DAGGER || tok.starts_with(OVERLINE) || tok.contains('\'') {
                return Err(ReductionError::TokenClash(tok.clone()));
            }
        }
        let mut tokens = Vec::new();
        for over in ["", OVERLINE] {
            for deco in ["", "'", "''"] {
                for base in upsilon.tokens().iter().map(String::as_str).chain([DAGGER]) {
                    tokens.push(format!("{over}{base}{deco}"));
                }
            }
        }
        Ok(EncodedAlphabet {
            alphabet: Alphabet::new(tokens)?,
            upsilon: Arc::clone(upsilon),
        })
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn upsilon(&self) -> &Arc<Alphabet> {
        &self.upsilon
    }

    fn base_count(&self) -> usize {
        self.upsilon.len() + 1
    }

    /// index of the dagger in the base row
    fn dagger_base(&self) -> usize {
        self.upsilon.len()
    }

    pub fn encode(&self, base: usize, deco: Decoration, overlined: bool) -> Symbol {
        let deco = match deco {
            Decoration::Plain => 0,
            Decoration::Primed => 1,
            Decoration::DoublePrimed => 2,
        };
        let id = usize::from(overlined) * 3 * self.base_count() + deco * self.base_count() + base;
        Symbol::new(id)
    }

    /// `(base index, decoration, overlined)`; the dagger has the last base
    /// index.
    pub fn classify(&self, sym: Symbol) -> (usize, Decoration, bool) {
        let id = sym.id();
        let group = self.base_count();
        let overlined = id >= 3 * group;
        let rest = id % (3 * group);
        let deco = match rest / group {
            0 => Decoration::Plain,
            1 => Decoration::Primed,
            _ => Decoration::DoublePrimed,
        };
        (rest % group, deco, overlined)
    }

    pub fn is_dagger(&self, sym: Symbol) -> bool {
        self.classify(sym).0 == self.dagger_base()
    }

    /// Lifts a system word into a copy row of the encoded alphabet.
    pub fn lift(&self, w: &Word, deco: Decoration, overlined: bool) -> Word {
        assert!(same_alphabet(w.alphabet(), &self.upsilon));
        let syms = w
            .symbols()
            .iter()
            .map(|s| self.encode(s.id(), deco, overlined))
            .collect();
        Word::from_symbols(&self.alphabet, syms)
    }

    /// Projects an encoded word of one copy row back onto the system
    /// alphabet; daggers and mixed rows are rejected.
    pub fn lower(&self, w: &Word, deco: Decoration, overlined: bool) -> Option<Word> {
        let mut syms = Vec::with_capacity(w.len());
        for &s in w.symbols() {
            let (base, d, o) = self.classify(s);
            if d != deco || o != overlined || base == self.dagger_base() {
                return None;
            }
            syms.push(Symbol::new(base));
        }
        Some(Word::from_symbols(&self.upsilon, syms))
    }

    pub fn dagger_run(&self, len: usize, deco: Decoration, overlined: bool) -> Word {
        let sym = self.encode(self.dagger_base(), deco, overlined);
        Word::from_symbols(&self.alphabet, vec![sym; len])
    }

    /// `w_Υ`: every system letter once, plain, in declared order.
    pub fn letters_word(&self) -> Word {
        let syms = (0..self.upsilon.len())
            .map(|b| self.encode(b, Decoration::Plain, false))
            .collect();
        Word::from_symbols(&self.alphabet, syms)
    }
}

/// The letter-by-letter interleaving `x_0·y̅_0·x_1·y̅_1·…` of two
/// equal-length words; the second track is overlined via the `~` twin of
/// each token.
pub fn shuffle(x: &Word, y: &Word) -> Result<Word, ReductionError> {
    if x.len() != y.len() {
        return Err(ReductionError::ShuffleLengthMismatch);
    }
    let al = x.alphabet();
    let mut syms = Vec::with_capacity(2 * x.len());
    for i in 0..x.len() {
        syms.push(x.get(i));
        let tok = al.token(y.get(i));
        let twin = al
            .symbol(&format!("{OVERLINE}{tok}"))
            .ok_or_else(|| ReductionError::NoOverlinedTwin(tok.to_owned()))?;
        syms.push(twin);
    }
    Ok(Word::from_symbols(al, syms))
}

/// The four step languages over the encoded alphabet: interleavings of one
/// rewrite step, forwards (`x ⧢ y` for `x → y`) and backwards (`y ⧢ x`),
/// and their restrictions with the plain track constrained to the start
/// (respectively target) language.
#[derive(Debug, Clone)]
pub struct StepLanguages {
    pub forward: Nfa,
    pub forward_start: Nfa,
    pub backward: Nfa,
    pub backward_target: Nfa,
}

/// `{x ⧢ y : x ∈ P}` (equal lengths, both tracks plain) as an automaton:
/// a product walking `P` on the even, non-overlined positions.
fn plain_track(enc: &EncodedAlphabet, p: &Dfa) -> Nfa {
    let al = enc.alphabet();
    let states = p.states() * 2;
    let pack = |q: usize, expecting_over: bool| q * 2 + usize::from(expecting_over);
    let mut nfa_delta: Vec<Vec<(Symbol, usize)>> = vec![Vec::new(); states];
    for q in 0..p.states() {
        for b in 0..enc.upsilon.len() {
            let plain = enc.encode(b, Decoration::Plain, false);
            let over = enc.encode(b, Decoration::Plain, true);
            let t = p.next(q, Symbol::new(b));
            nfa_delta[pack(q, false)].push((plain, pack(t, true)));
            nfa_delta[pack(q, true)].push((over, pack(q, false)));
        }
    }
    let mut builder = NfaBuilder::new(al, states);
    for (q, edges) in nfa_delta.into_iter().enumerate() {
        for (sym, t) in edges {
            builder.edge(q, sym, t);
        }
    }
    builder.initial(pack(p.initial(), false));
    for q in 0..p.states() {
        if p.is_accepting(q) {
            builder.accepting(pack(q, false));
        }
    }
    builder.build()
}

/// Small helper to assemble NFAs state by state via the public combinators.
struct NfaBuilder {
    edges: Vec<(usize, Symbol, usize)>,
    initial: Vec<usize>,
    accepting: Vec<usize>,
    states: usize,
    alphabet: Arc<Alphabet>,
}

impl NfaBuilder {
    fn new(alphabet: &Arc<Alphabet>, states: usize) -> NfaBuilder {
        NfaBuilder {
            edges: Vec::new(),
            initial: Vec::new(),
            accepting: Vec::new(),
            states,
            alphabet: Arc::clone(alphabet),
        }
    }

    fn edge(&mut self, from: usize, sym: Symbol, to: usize) {
        self.edges.push((from, sym, to));
    }

    fn initial(&mut self, q: usize) {
        self.initial.push(q);
    }

    fn accepting(&mut self, q: usize) {
        self.accepting.push(q);
    }

    fn build(self) -> Nfa {
        Nfa::from_edges(
            &self.alphabet,
            self.states,
            self.initial,
            self.accepting,
            self.edges,
        )
    }
}

fn identity_pairs_regex(enc: &EncodedAlphabet) -> Regex {
    let al = enc.alphabet();
    Regex::union(
        al,
        (0..enc.upsilon.len())
            .map(|b| {
                Regex::concat(vec![
                    Regex::symbol(al, enc.encode(b, Decoration::Plain, false)),
                    Regex::symbol(al, enc.encode(b, Decoration::Plain, true)),
                ])
            })
            .collect(),
    )
}

fn step_regex(enc: &EncodedAlphabet, s: &SemiThueSystem, forwards: bool) -> Regex {
    let al = enc.alphabet();
    let pairs = identity_pairs_regex(enc).star();
    let windows = Regex::union(
        al,
        s.rules
            .iter()
            .map(|rule| {
                let (first, second) = if forwards {
                    (&rule.lhs, &rule.rhs)
                } else {
                    (&rule.rhs, &rule.lhs)
                };
                let window = shuffle(
                    &enc.lift(first, Decoration::Plain, false),
                    &enc.lift(second, Decoration::Plain, false),
                )
                .expect("rules are length-preserving");
                Regex::literal(&window)
            })
            .collect(),
    );
    Regex::concat(vec![pairs.clone(), windows, pairs])
}

/// Builds the step languages for a system.
pub fn build_step_languages(s: &SemiThueSystem) -> Result<StepLanguages, ReductionError> {
    let enc = EncodedAlphabet::new(&s.upsilon)?;
    let forward = step_regex(&enc, s, true).to_nfa();
    let backward = step_regex(&enc, s, false).to_nfa();
    let forward_start = forward
        .determinize()
        .intersect(&plain_track(&enc, &s.p1).determinize())
        .to_nfa();
    let backward_target = backward
        .determinize()
        .intersect(&plain_track(&enc, &s.p2).determinize())
        .to_nfa();
    Ok(StepLanguages {
        forward,
        forward_start,
        backward,
        backward_target,
    })
}

#[derive(Debug, Clone)]
pub struct SemiThueEncoding {
    pub system: SemiThueSystem,
    pub encoded: EncodedAlphabet,
    pub steps: StepLanguages,
    pub instance: PepInstance,
    /// the constraint language, printable and re-parsable
    pub r_regex: Regex,
}

/// `(†·x̅)⁺` or `(x·†̅)⁺` over one decoration row: the second element of each
/// pair carries the overline.
fn filler_regex(enc: &EncodedAlphabet, deco: Decoration, dagger_first: bool) -> Regex {
    let al = enc.alphabet();
    Regex::union(
        al,
        (0..enc.upsilon.len())
            .map(|b| {
                let letter = Regex::symbol(al, enc.encode(b, deco, dagger_first));
                let dagger = Regex::symbol(al, enc.encode(enc.dagger_base(), deco, !dagger_first));
                if dagger_first {
                    Regex::concat(vec![dagger, letter])
                } else {
                    Regex::concat(vec![letter, dagger])
                }
            })
            .collect(),
    )
    .plus()
}

/// Encodes a reachability question as a co&dir instance. Correctness:
/// the system rewrites some start word to some target word in an even,
/// non-zero number of steps iff the instance has a solution.
pub fn encode_semithue(s: &SemiThueSystem) -> Result<SemiThueEncoding, ReductionError> {
    let enc = EncodedAlphabet::new(&s.upsilon)?;
    let steps = build_step_languages(s)?;
    let al = enc.alphabet();

    // u: plain letters pass through, primed letters collapse to daggers,
    // double-primed letters vanish; v: plain letters become daggers, primed
    // and double-primed letters come back, primed daggers spray every
    // letter; both commute with overlining
    let letters = enc.letters_word();
    let images = |to_image: &dyn Fn(usize, Decoration) -> Word| -> Vec<Word> {
        let mut out = Vec::with_capacity(al.len());
        for over in [false, true] {
            for deco in [
                Decoration::Plain,
                Decoration::Primed,
                Decoration::DoublePrimed,
            ] {
                for base in 0..enc.base_count() {
                    let img = to_image(base, deco);
                    let img = if over {
                        let syms = img
                            .symbols()
                            .iter()
                            .map(|&sym| {
                                let (b, d, o) = enc.classify(sym);
                                debug_assert!(!o);
                                enc.encode(b, d, true)
                            })
                            .collect();
                        Word::from_symbols(al, syms)
                    } else {
                        img
                    };
                    out.push(img);
                }
            }
        }
        out
    };
    let dagger = enc.dagger_base();
    let dagger_img = Word::from_symbols(al, vec![enc.encode(dagger, Decoration::Plain, false)]);
    let u_of = |base: usize, deco: Decoration| -> Word {
        match deco {
            Decoration::Plain => {
                Word::from_symbols(al, vec![enc.encode(base, Decoration::Plain, false)])
            }
            Decoration::Primed => dagger_img.clone(),
            Decoration::DoublePrimed => Word::empty(al),
        }
    };
    let v_of = |base: usize, deco: Decoration| -> Word {
        match deco {
            Decoration::Plain => dagger_img.clone(),
            Decoration::Primed | Decoration::DoublePrimed => {
                if base == dagger {
                    letters.clone()
                } else {
                    Word::from_symbols(al, vec![enc.encode(base, Decoration::Plain, false)])
                }
            }
        }
    };
    let u = Morphism::new(al, al, images(&u_of))?;
    let v = Morphism::new(al, al, images(&v_of))?;

    let outer = filler_regex(&enc, Decoration::DoublePrimed, false);
    let inner_odd = filler_regex(&enc, Decoration::Primed, true);
    let inner_even = filler_regex(&enc, Decoration::Primed, false);
    let fwd = step_regex(&enc, s, true);
    let bwd = step_regex(&enc, s, false);
    let fwd_start = to_regex(&steps.forward_start);
    let bwd_target = to_regex(&steps.backward_target);
    let r_regex = Regex::concat(vec![
        outer.clone(),
        fwd_start,
        inner_odd.clone(),
        Regex::concat(vec![bwd, inner_even, fwd, inner_odd]).star(),
        bwd_target,
        outer,
    ]);
    let r = r_regex.to_nfa().determinize().minimize();

    let instance = PepInstance::new(
        Variant::CoAndDir,
        al,
        al,
        u,
        v,
        r,
        SuffixConstraint::all(al),
    )?;
    Ok(SemiThueEncoding {
        system: s.clone(),
        encoded: enc,
        steps,
        instance,
        r_regex,
    })
}

fn validate_derivation(s: &SemiThueSystem, d: &Derivation) -> Result<usize, ReductionError> {
    if d.words.len() < 3 || d.words.len() % 2 == 0 || d.steps.len() != d.words.len() - 1 {
        return Err(ReductionError::DerivationNotEvenNonzero);
    }
    let k = d.words[0].len();
    if k == 0 || d.words.iter().any(|w| w.len() != k) {
        return Err(ReductionError::DerivationLengthMismatch);
    }
    for (i, step) in d.steps.iter().enumerate() {
        let rule = s
            .rules
            .get(step.rule)
            .ok_or(ReductionError::DerivationStepInvalid(i))?;
        match apply_rule(&d.words[i], rule, step.position) {
            Some(next) if next == d.words[i + 1] => {}
            _ => return Err(ReductionError::DerivationStepInvalid(i)),
        }
    }
    if !s.p1.membership(&d.words[0]) {
        return Err(ReductionError::DerivationEndpoint("start"));
    }
    if !s.p2.membership(d.words.last().expect("non-empty")) {
        return Err(ReductionError::DerivationEndpoint("target"));
    }
    Ok(k)
}

/// Builds the encoded solution for an even-length derivation: fillers around
/// interleaved steps, odd steps forwards, even steps backwards.
pub fn derivation_to_solution(
    s: &SemiThueSystem,
    d: &Derivation,
) -> Result<Word, ReductionError> {
    let k = validate_derivation(s, d)?;
    let enc = EncodedAlphabet::new(&s.upsilon)?;
    let m = d.words.len() - 1; // even, ≥ 2
    let mut out = shuffle(
        &enc.lift(&d.words[0], Decoration::DoublePrimed, false),
        &enc.dagger_run(k, Decoration::DoublePrimed, false),
    )?;
    for i in 1..=m {
        let step = if i % 2 == 1 {
            shuffle(
                &enc.lift(&d.words[i - 1], Decoration::Plain, false),
                &enc.lift(&d.words[i], Decoration::Plain, false),
            )?
        } else {
            shuffle(
                &enc.lift(&d.words[i], Decoration::Plain, false),
                &enc.lift(&d.words[i - 1], Decoration::Plain, false),
            )?
        };
        out = out.concat(&step);
        let filler = if i == m {
            shuffle(
                &enc.lift(&d.words[m], Decoration::DoublePrimed, false),
                &enc.dagger_run(k, Decoration::DoublePrimed, false),
            )?
        } else if i % 2 == 1 {
            shuffle(
                &enc.dagger_run(k, Decoration::Primed, false),
                &enc.lift(&d.words[i], Decoration::Primed, false),
            )?
        } else {
            shuffle(
                &enc.lift(&d.words[i], Decoration::Primed, false),
                &enc.dagger_run(k, Decoration::Primed, false),
            )?
        };
        out = out.concat(&filler);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SegmentKind {
    Step,
    Inner,
    Outer,
}

struct Segment {
    kind: SegmentKind,
    plain_track: Vec<Symbol>,
    over_track: Vec<Symbol>,
}

fn segment(enc: &EncodedAlphabet, sigma: &Word) -> Result<Vec<Segment>, ReductionError> {
    let kind_of = |sym: Symbol| match enc.classify(sym).1 {
        Decoration::Plain => SegmentKind::Step,
        Decoration::Primed => SegmentKind::Inner,
        Decoration::DoublePrimed => SegmentKind::Outer,
    };
    let mut segments: Vec<Segment> = Vec::new();
    for &sym in sigma.symbols() {
        let kind = kind_of(sym);
        if segments.last().map(|s| s.kind) != Some(kind) {
            segments.push(Segment {
                kind,
                plain_track: Vec::new(),
                over_track: Vec::new(),
            });
        }
        let seg = segments.last_mut().expect("just pushed");
        let overlined = enc.classify(sym).2;
        let expected_over = (seg.plain_track.len() + seg.over_track.len()) % 2 == 1;
        if overlined != expected_over {
            return Err(ReductionError::DecodeMalformed(
                "tracks must alternate plain and overlined letters".to_owned(),
            ));
        }
        if overlined {
            seg.over_track.push(sym);
        } else {
            seg.plain_track.push(sym);
        }
    }
    for seg in &segments {
        if seg.plain_track.len() != seg.over_track.len() {
            return Err(ReductionError::DecodeMalformed(
                "segment has unpaired letters".to_owned(),
            ));
        }
    }
    Ok(segments)
}

/// Recovers the derivation from a verified solution of an encoding.
/// Structural failures indicate a word that is not in the constraint
/// language (or an internal inconsistency) and are reported as malformed.
pub fn decode_semithue_solution(
    encoding: &SemiThueEncoding,
    sigma: &Word,
) -> Result<Derivation, ReductionError> {
    if !encoding.instance.check_solution(sigma).is_solution() {
        return Err(ReductionError::DecodeNotASolution);
    }
    let enc = &encoding.encoded;
    let s = &encoding.system;
    let segments = segment(enc, sigma)?;
    let n = segments.len();
    if n < 5 || n % 4 != 1 {
        return Err(ReductionError::DecodeMalformed(format!(
            "expected 4k+1 segments, found {n}"
        )));
    }
    let step_count = (n - 1) / 2; // = 2k
    let malformed = |msg: &str| ReductionError::DecodeMalformed(msg.to_owned());
    let word_of = |track: &[Symbol], deco: Decoration, overlined: bool| -> Option<Word> {
        enc.lower(
            &Word::from_symbols(enc.alphabet(), track.to_vec()),
            deco,
            overlined,
        )
    };
    let daggers = |track: &[Symbol], deco: Decoration, overlined: bool| -> bool {
        track.iter().all(|&sym| {
            let (b, d, o) = enc.classify(sym);
            b == enc.dagger_base() && d == deco && o == overlined
        })
    };

    // collect each x_i from every segment that carries it
    let mut xs: Vec<Option<Word>> = vec![None; step_count + 1];
    let put = |i: usize, w: Word, xs: &mut Vec<Option<Word>>| -> Result<(), ReductionError> {
        match &xs[i] {
            Some(old) if *old != w => Err(malformed("track words disagree")),
            _ => {
                xs[i] = Some(w);
                Ok(())
            }
        }
    };
    let mut outer_tracks: Vec<(usize, Word)> = Vec::new();
    for (idx, seg) in segments.iter().enumerate() {
        match seg.kind {
            SegmentKind::Outer => {
                if idx != 0 && idx != n - 1 {
                    return Err(malformed("double-primed filler inside the word"));
                }
                let x = word_of(&seg.plain_track, Decoration::DoublePrimed, false)
                    .ok_or_else(|| malformed("outer filler carries a foreign track"))?;
                if !daggers(&seg.over_track, Decoration::DoublePrimed, true) {
                    return Err(malformed("outer filler must be padded by daggers"));
                }
                // end fillers may carry extra letters; the embedding only
                // forces them to host the endpoint word, which is checked
                // once the endpoints are known
                let i = if idx == 0 { 0 } else { step_count };
                outer_tracks.push((i, x));
            }
            SegmentKind::Step => {
                if idx % 2 != 1 {
                    return Err(malformed("step segment out of position"));
                }
                let j = idx.div_ceil(2); // σ_j, 1-based
                let p = word_of(&seg.plain_track, Decoration::Plain, false)
                    .ok_or_else(|| malformed("step segment carries daggers"))?;
                let q = word_of(&seg.over_track, Decoration::Plain, true)
                    .ok_or_else(|| malformed("step segment carries daggers"))?;
                let (lo, hi) = if j % 2 == 1 { (p, q) } else { (q, p) };
                put(j - 1, lo, &mut xs)?;
                put(j, hi, &mut xs)?;
            }
            SegmentKind::Inner => {
                if idx % 2 != 0 || idx == 0 || idx == n - 1 {
                    return Err(malformed("filler segment out of position"));
                }
                let j = idx / 2; // ρ_j, 1 ≤ j ≤ 2k-1
                if j % 2 == 1 {
                    let x = word_of(&seg.over_track, Decoration::Primed, true)
                        .ok_or_else(|| malformed("filler carries a foreign track"))?;
                    if !daggers(&seg.plain_track, Decoration::Primed, false) {
                        return Err(malformed("odd filler must carry daggers plainly"));
                    }
                    put(j, x, &mut xs)?;
                } else {
                    let x = word_of(&seg.plain_track, Decoration::Primed, false)
                        .ok_or_else(|| malformed("filler carries a foreign track"))?;
                    if !daggers(&seg.over_track, Decoration::Primed, true) {
                        return Err(malformed("even filler must be padded by daggers"));
                    }
                    put(j, x, &mut xs)?;
                }
            }
        }
    }
    let words: Vec<Word> = xs
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| malformed("a derivation word is missing"))?;
    for (i, track) in outer_tracks {
        if !crate::words::is_subword(&words[i], &track) {
            return Err(malformed("outer filler does not host its endpoint word"));
        }
    }
    let mut steps = Vec::with_capacity(step_count);
    for i in 0..step_count {
        let step = one_step_successors(s, &words[i])
            .into_iter()
            .find(|(next, _)| *next == words[i + 1])
            .map(|(_, step)| step)
            .ok_or_else(|| malformed("consecutive words are not one rewrite apart"))?;
        steps.push(step);
    }
    let derivation = Derivation { words, steps };
    validate_derivation(s, &derivation)?;
    Ok(derivation)
}

#[derive(Debug, Clone)]
pub struct ReachOptions {
    /// maximum number of rewrite steps explored
    pub max_steps: usize,
    /// start-word enumeration cap; `None` uses the automaton state counts
    /// plus the longest rule as a default
    pub word_cap: Option<usize>,
    pub node_budget: u64,
}

impl ReachOptions {
    pub fn new(max_steps: usize) -> ReachOptions {
        ReachOptions {
            max_steps,
            word_cap: None,
            node_budget: 1_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReachReport {
    /// a shortest derivation from the start to the target language
    pub reachable: Option<Derivation>,
    /// a shortest derivation with an even, non-zero number of steps
    pub even_reachable: Option<Derivation>,
    /// both searches exhausted the whole reachable space: a `None` above is
    /// then definitive
    pub exhaustive: bool,
    pub explored: u64,
    pub start_cap: usize,
}

/// Breadth-first closure of the start language under rewriting, reporting
/// plain reachability and even-step reachability separately (the encoding
/// needs the latter; the restriction is not silently converted away).
pub fn semithue_reach_oracle(
    s: &SemiThueSystem,
    opts: &ReachOptions,
) -> Result<ReachReport, ReductionError> {
    let start_cap = opts.word_cap.unwrap_or_else(|| {
        s.p1.states() + s.p2.states() + s.rules.iter().map(|r| r.lhs.len()).max().unwrap_or(0)
    });
    let starts: Vec<Word> = s.p1.enumerate(start_cap).collect();
    let starts_complete = matches!(s.p1.finite_max_len(), Some(l) if l <= start_cap);

    // parity classes: 0 = start (zero steps), 1 = odd, 2 = even and positive;
    // a start word reached again after an even loop is a distinct state, so
    // even-length returns into the start language are not lost
    const START: u8 = 0;
    const ODD: u8 = 1;
    const EVEN: u8 = 2;
    type Key = (Word, u8);
    let mut parent: HashMap<Key, (Key, RewriteStep)> = HashMap::new();
    let mut dist: HashMap<Key, usize> = HashMap::new();
    let mut queue: VecDeque<Key> = VecDeque::new();
    let mut seen: HashSet<Key> = HashSet::new();
    for x in &starts {
        let key = (x.clone(), START);
        if seen.insert(key.clone()) {
            dist.insert(key.clone(), 0);
            queue.push_back(key);
        }
    }

    let rebuild = |end: &Key, parent: &HashMap<Key, (Key, RewriteStep)>| -> Derivation {
        let mut words = vec![end.0.clone()];
        let mut steps = Vec::new();
        let mut cur = end.clone();
        while let Some((prev, step)) = parent.get(&cur) {
            words.push(prev.0.clone());
            steps.push(*step);
            cur = prev.clone();
        }
        words.reverse();
        steps.reverse();
        Derivation { words, steps }
    };

    let mut reachable: Option<Derivation> = None;
    let mut even_reachable: Option<Derivation> = None;
    let mut explored = 0u64;
    let mut truncated = false;
    while let Some(key) = queue.pop_front() {
        let d = dist[&key];
        let (word, parity) = &key;
        if s.p2.membership(word) {
            if reachable.is_none() {
                reachable = Some(rebuild(&key, &parent));
            }
            if even_reachable.is_none() && *parity == EVEN {
                even_reachable = Some(rebuild(&key, &parent));
            }
            if reachable.is_some() && even_reachable.is_some() {
                break;
            }
        }
        if d == opts.max_steps {
            truncated = true;
            continue;
        }
        let next_parity = if *parity == ODD { EVEN } else { ODD };
        for (next, step) in one_step_successors(s, word) {
            explored += 1;
            if explored > opts.node_budget {
                return Err(ReductionError::BudgetExceeded { explored });
            }
            let next_key = (next, next_parity);
            if seen.insert(next_key.clone()) {
                dist.insert(next_key.clone(), d + 1);
                parent.insert(next_key.clone(), (key.clone(), step));
                queue.push_back(next_key);
            }
        }
    }
    Ok(ReachReport {
        reachable,
        even_reachable,
        exhaustive: starts_complete && !truncated,
        explored,
        start_cap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::Regex;

    /// the running example: rules ab → bc and cc → aa over {a, b, c}
    pub(crate) fn example_system() -> SemiThueSystem {
        let upsilon = Alphabet::new(["a", "b", "c"]).unwrap();
        let rules = vec![
            RewriteRule {
                lhs: Word::parse(&upsilon, "a b").unwrap(),
                rhs: Word::parse(&upsilon, "b c").unwrap(),
            },
            RewriteRule {
                lhs: Word::parse(&upsilon, "c c").unwrap(),
                rhs: Word::parse(&upsilon, "a a").unwrap(),
            },
        ];
        let dfa = |text: &str| {
            Regex::parse(text, &upsilon)
                .unwrap()
                .to_nfa()
                .determinize()
        };
        SemiThueSystem::new(&upsilon, rules, dfa("a b c"), dfa("b a a")).unwrap()
    }

    fn example_derivation(s: &SemiThueSystem) -> Derivation {
        let up = s.upsilon();
        Derivation {
            words: vec![
                Word::parse(up, "a b c").unwrap(),
                Word::parse(up, "b c c").unwrap(),
                Word::parse(up, "b a a").unwrap(),
            ],
            steps: vec![
                RewriteStep { rule: 0, position: 0 },
                RewriteStep { rule: 1, position: 1 },
            ],
        }
    }

    #[test]
    fn shuffle_examples() {
        let s = example_system();
        let enc = EncodedAlphabet::new(s.upsilon()).unwrap();
        let al = enc.alphabet();
        let x = Word::parse(al, "a b c").unwrap();
        let y = Word::parse(al, "b c c").unwrap();
        assert_eq!(
            shuffle(&x, &y).unwrap(),
            Word::parse(al, "a ~b b ~c c ~c").unwrap()
        );
        assert_eq!(
            shuffle(&Word::empty(al), &Word::empty(al)).unwrap(),
            Word::empty(al)
        );
        let ab = Word::parse(al, "a b").unwrap();
        assert_eq!(
            shuffle(&ab, &ab).unwrap(),
            Word::parse(al, "a ~a b ~b").unwrap()
        );
        assert_eq!(
            shuffle(&x, &ab).unwrap_err(),
            ReductionError::ShuffleLengthMismatch
        );
    }

    #[test]
    fn step_language_membership() {
        let s = example_system();
        let enc = EncodedAlphabet::new(s.upsilon()).unwrap();
        let al = enc.alphabet();
        let steps = build_step_languages(&s).unwrap();
        // abc → bcc appears as the interleaving
        let fwd = Word::parse(al, "a ~b b ~c c ~c").unwrap();
        assert!(steps.forward.accepts(&fwd));
        assert!(steps.forward_start.accepts(&fwd));
        // bcc → baa symmetrically
        let bwd = Word::parse(al, "b ~b a ~c a ~c").unwrap();
        assert!(steps.backward.accepts(&bwd));
        assert!(steps.backward_target.accepts(&bwd));
        // a word applying two rule windows at once is in neither
        let double = Word::parse(al, "a ~b b ~c c ~a c ~a").unwrap();
        assert!(!steps.forward.accepts(&double));
        // the identity interleaving makes no step
        let id = Word::parse(al, "a ~a b ~b c ~c").unwrap();
        assert!(!steps.forward.accepts(&id));
    }

    #[test]
    fn step_language_matches_one_step_checker() {
        let s = example_system();
        let enc = EncodedAlphabet::new(s.upsilon()).unwrap();
        let fwd = build_step_languages(&s).unwrap().forward.determinize();
        // every enumerated member decodes to a one-step rewrite…
        for w in fwd.enumerate(8) {
            let plain: Vec<Symbol> = w.symbols().iter().step_by(2).copied().collect();
            let over: Vec<Symbol> = w.symbols().iter().skip(1).step_by(2).copied().collect();
            let x = enc
                .lower(
                    &Word::from_symbols(enc.alphabet(), plain),
                    Decoration::Plain,
                    false,
                )
                .unwrap();
            let y = enc
                .lower(
                    &Word::from_symbols(enc.alphabet(), over),
                    Decoration::Plain,
                    true,
                )
                .unwrap();
            assert!(
                one_step_successors(&s, &x).into_iter().any(|(n, _)| n == y),
                "{x} should rewrite to {y}"
            );
        }
        // …and every one-step rewrite of a short word is a member
        let universal = crate::automata::Dfa::universal(s.upsilon());
        for x in universal.enumerate(4) {
            for (y, _) in one_step_successors(&s, &x) {
                let w = shuffle(
                    &enc.lift(&x, Decoration::Plain, false),
                    &enc.lift(&y, Decoration::Plain, false),
                )
                .unwrap();
                assert!(fwd.membership(&w), "{x} → {y} missing");
            }
        }
    }

    #[test]
    fn golden_solution_word() {
        let s = example_system();
        let encoding = encode_semithue(&s).unwrap();
        let d = example_derivation(&s);
        let sigma = derivation_to_solution(&s, &d).unwrap();
        let expected = "a'' ~†'' b'' ~†'' c'' ~†'' \
                        a ~b b ~c c ~c \
                        †' ~b' †' ~c' †' ~c' \
                        b ~b a ~c a ~c \
                        b'' ~†'' a'' ~†'' a'' ~†''";
        assert_eq!(sigma.to_string(), expected.split_whitespace().collect::<Vec<_>>().join(" "));
        assert_eq!(sigma.len(), 30);
        assert!(encoding.instance.check_solution(&sigma).is_solution());
    }

    #[test]
    fn golden_image_rows() {
        let s = example_system();
        let encoding = encode_semithue(&s).unwrap();
        let d = example_derivation(&s);
        let sigma = derivation_to_solution(&s, &d).unwrap();
        let u_img = encoding.instance.morphism_u().apply(&sigma);
        let v_img = encoding.instance.morphism_v().apply(&sigma);
        assert_eq!(
            u_img.to_string(),
            "a ~b b ~c c ~c † ~† † ~† † ~† b ~b a ~c a ~c"
        );
        assert_eq!(
            v_img.to_string(),
            "a ~a ~b ~c b ~a ~b ~c c ~a ~b ~c \
             † ~† † ~† † ~† \
             a b c ~b a b c ~c a b c ~c \
             † ~† † ~† † ~† \
             b ~a ~b ~c a ~a ~b ~c a ~a ~b ~c"
                .split_whitespace()
                .collect::<Vec<_>>()
                .join(" ")
        );
    }

    #[test]
    fn decode_round_trip() {
        let s = example_system();
        let encoding = encode_semithue(&s).unwrap();
        let d = example_derivation(&s);
        let sigma = derivation_to_solution(&s, &d).unwrap();
        let decoded = decode_semithue_solution(&encoding, &sigma).unwrap();
        assert_eq!(decoded, d);
    }

    #[test]
    fn segment_lengths_agree() {
        let s = example_system();
        let encoding = encode_semithue(&s).unwrap();
        let sigma = derivation_to_solution(&s, &example_derivation(&s)).unwrap();
        let segs = segment(&encoding.encoded, &sigma).unwrap();
        assert_eq!(segs.len(), 5);
        let lens: Vec<usize> = segs
            .iter()
            .map(|seg| seg.plain_track.len() + seg.over_track.len())
            .collect();
        assert_eq!(lens, vec![6, 6, 6, 6, 6]);
    }

    #[test]
    fn odd_derivations_are_rejected() {
        let s = example_system();
        let up = s.upsilon();
        let d = Derivation {
            words: vec![
                Word::parse(up, "a b c").unwrap(),
                Word::parse(up, "b c c").unwrap(),
            ],
            steps: vec![RewriteStep { rule: 0, position: 0 }],
        };
        assert_eq!(
            derivation_to_solution(&s, &d).unwrap_err(),
            ReductionError::DerivationNotEvenNonzero
        );
    }

    #[test]
    fn invalid_steps_are_rejected() {
        let s = example_system();
        let up = s.upsilon();
        let mut d = example_derivation(&s);
        d.words[1] = Word::parse(up, "c b c").unwrap();
        assert!(matches!(
            derivation_to_solution(&s, &d).unwrap_err(),
            ReductionError::DerivationStepInvalid(0)
        ));
    }

    #[test]
    fn oracle_finds_example_derivation() {
        let s = example_system();
        let report = semithue_reach_oracle(&s, &ReachOptions::new(6)).unwrap();
        assert!(report.exhaustive);
        let even = report.even_reachable.expect("reachable in two steps");
        assert_eq!(even, example_derivation(&s));
        assert_eq!(report.reachable.unwrap().step_count(), 2);
    }

    #[test]
    fn oracle_separates_plain_and_even_reachability() {
        // one rule aa → bb, start {aa}, target {aa}: reachable in zero
        // steps, but no even non-zero loop exists
        let upsilon = Alphabet::new(["a", "b"]).unwrap();
        let rules = vec![RewriteRule {
            lhs: Word::parse(&upsilon, "a a").unwrap(),
            rhs: Word::parse(&upsilon, "b b").unwrap(),
        }];
        let dfa = |text: &str| {
            Regex::parse(text, &upsilon)
                .unwrap()
                .to_nfa()
                .determinize()
        };
        let s = SemiThueSystem::new(&upsilon, rules, dfa("a a"), dfa("a a")).unwrap();
        let report = semithue_reach_oracle(&s, &ReachOptions::new(8)).unwrap();
        assert!(report.exhaustive);
        assert_eq!(report.reachable.unwrap().step_count(), 0);
        assert!(report.even_reachable.is_none());
    }

    #[test]
    fn oracle_unreachable() {
        let upsilon = Alphabet::new(["a", "b"]).unwrap();
        let rules = vec![RewriteRule {
            lhs: Word::parse(&upsilon, "a").unwrap(),
            rhs: Word::parse(&upsilon, "a").unwrap(),
        }];
        let dfa = |text: &str| {
            Regex::parse(text, &upsilon)
                .unwrap()
                .to_nfa()
                .determinize()
        };
        let s = SemiThueSystem::new(&upsilon, rules, dfa("a"), dfa("b")).unwrap();
        let report = semithue_reach_oracle(&s, &ReachOptions::new(8)).unwrap();
        assert!(report.exhaustive);
        assert!(report.reachable.is_none());
        assert!(report.even_reachable.is_none());
    }

    #[test]
    fn system_validation() {
        let upsilon = Alphabet::new(["a", "b"]).unwrap();
        let dfa = |text: &str| {
            Regex::parse(text, &upsilon)
                .unwrap()
                .to_nfa()
                .determinize()
        };
        let unbalanced = vec![RewriteRule {
            lhs: Word::parse(&upsilon, "a").unwrap(),
            rhs: Word::parse(&upsilon, "a b").unwrap(),
        }];
        assert!(matches!(
            SemiThueSystem::new(&upsilon, unbalanced, dfa("a"), dfa("b")).unwrap_err(),
            ReductionError::NotLengthPreserving { index: 0, .. }
        ));
        let empty = vec![RewriteRule {
            lhs: Word::empty(&upsilon),
            rhs: Word::empty(&upsilon),
        }];
        assert!(matches!(
            SemiThueSystem::new(&upsilon, empty, dfa("a"), dfa("b")).unwrap_err(),
            ReductionError::EmptyRule(0)
        ));
        assert!(matches!(
            SemiThueSystem::new(&upsilon, vec![], dfa("a *"), dfa("b")).unwrap_err(),
            ReductionError::EpsilonInStartLanguage
        ));
    }

    #[test]
    fn encoded_solutions_decode_even_when_found_by_search() {
        // tiny system where the only even derivation has two identical steps
        let upsilon = Alphabet::new(["a", "b"]).unwrap();
        let rules = vec![
            RewriteRule {
                lhs: Word::parse(&upsilon, "a").unwrap(),
                rhs: Word::parse(&upsilon, "b").unwrap(),
            },
            RewriteRule {
                lhs: Word::parse(&upsilon, "b").unwrap(),
                rhs: Word::parse(&upsilon, "a").unwrap(),
            },
        ];
        let dfa = |text: &str| {
            Regex::parse(text, &upsilon)
                .unwrap()
                .to_nfa()
                .determinize()
        };
        let s = SemiThueSystem::new(&upsilon, rules, dfa("a"), dfa("a")).unwrap();
        let report = semithue_reach_oracle(&s, &ReachOptions::new(4)).unwrap();
        let d = report.even_reachable.expect("a → b → a");
        assert_eq!(d.step_count(), 2);
        let encoding = encode_semithue(&s).unwrap();
        let sigma = derivation_to_solution(&s, &d).unwrap();
        assert!(encoding.instance.check_solution(&sigma).is_solution());
        assert_eq!(decode_semithue_solution(&encoding, &sigma).unwrap(), d);
    }
}
