//! Words over finite alphabets and the scattered-subword (embedding) order.
//!
//! A word `s` embeds in `t`, written `s ⊑ t`, when `s` can be obtained from
//! `t` by erasing letters. The four residual operations here compute extremal
//! prefixes/suffixes with respect to that order; they are the primitives all
//! margin computations are built on. They deliberately scan candidates in
//! order and test embedding each time: correctness over speed, and the scan
//! doubles as its own specification.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("duplicate token `{0}`")]
    DuplicateToken(String),
    #[error("token `{0}` contains whitespace")]
    WhitespaceInToken(String),
    #[error("empty token")]
    EmptyToken,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown token `{0}`")]
    UnknownToken(String),
    #[error("{0}")]
    Precondition(&'static str),
}

/// A finite ordered list of display tokens. Token order is the canonical
/// symbol order used for enumeration and witness reporting everywhere.
#[derive(Debug)]
pub struct Alphabet {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
    fingerprint: u64,
}

impl Alphabet {
    pub fn new<I, S>(tokens: I) -> Result<Arc<Self>, AlphabetError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, tok) in tokens.iter().enumerate() {
            if tok.is_empty() {
                return Err(AlphabetError::EmptyToken);
            }
            if tok.chars().any(char::is_whitespace) {
                return Err(AlphabetError::WhitespaceInToken(tok.clone()));
            }
            if index.insert(tok.clone(), i as u32).is_some() {
                return Err(AlphabetError::DuplicateToken(tok.clone()));
            }
        }
        let mut h = DefaultHasher::new();
        tokens.hash(&mut h);
        let fingerprint = h.finish();
        Ok(Arc::new(Alphabet {
            tokens,
            index,
            fingerprint,
        }))
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn symbol(&self, token: &str) -> Option<Symbol> {
        self.index.get(token).map(|&i| Symbol(i))
    }

    pub fn token(&self, sym: Symbol) -> &str {
        &self.tokens[sym.id()]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.tokens.len() as u32).map(Symbol)
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.fingerprint == other.fingerprint && self.tokens == other.tokens
    }
}

impl Eq for Alphabet {}

impl Hash for Alphabet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.fingerprint.hash(state);
    }
}

/// True when two alphabet handles denote the same alphabet.
pub fn same_alphabet(a: &Arc<Alphabet>, b: &Arc<Alphabet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// An interned letter: an index into its alphabet's token list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(u32);

impl Symbol {
    pub(crate) fn new(id: usize) -> Symbol {
        Symbol(id as u32)
    }

    pub fn id(self) -> usize {
        self.0 as usize
    }
}

/// A finite sequence of symbols over one alphabet.
#[derive(Clone)]
pub struct Word {
    alphabet: Arc<Alphabet>,
    syms: Vec<Symbol>,
}

impl Word {
    pub fn empty(alphabet: &Arc<Alphabet>) -> Word {
        Word {
            alphabet: Arc::clone(alphabet),
            syms: Vec::new(),
        }
    }

    pub fn from_symbols(alphabet: &Arc<Alphabet>, syms: Vec<Symbol>) -> Word {
        debug_assert!(syms.iter().all(|s| s.id() < alphabet.len()));
        Word {
            alphabet: Arc::clone(alphabet),
            syms,
        }
    }

    pub fn from_tokens<I, S>(alphabet: &Arc<Alphabet>, tokens: I) -> Result<Word, WordError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut syms = Vec::new();
        for tok in tokens {
            let tok = tok.as_ref();
            syms.push(
                alphabet
                    .symbol(tok)
                    .ok_or_else(|| WordError::UnknownToken(tok.to_owned()))?,
            );
        }
        Ok(Word {
            alphabet: Arc::clone(alphabet),
            syms,
        })
    }

    /// Parses a whitespace-separated token string.
    pub fn parse(alphabet: &Arc<Alphabet>, text: &str) -> Result<Word, WordError> {
        Word::from_tokens(alphabet, text.split_whitespace())
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.syms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syms.is_empty()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.syms
    }

    pub fn get(&self, i: usize) -> Symbol {
        self.syms[i]
    }

    pub fn concat(&self, other: &Word) -> Word {
        assert!(
            same_alphabet(&self.alphabet, &other.alphabet),
            "concat: alphabet mismatch"
        );
        let mut syms = self.syms.clone();
        syms.extend_from_slice(&other.syms);
        Word {
            alphabet: Arc::clone(&self.alphabet),
            syms,
        }
    }

    pub fn repeat(&self, k: usize) -> Word {
        let mut syms = Vec::with_capacity(self.syms.len() * k);
        for _ in 0..k {
            syms.extend_from_slice(&self.syms);
        }
        Word {
            alphabet: Arc::clone(&self.alphabet),
            syms,
        }
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word {
            alphabet: Arc::clone(&self.alphabet),
            syms: self.syms[from..to].to_vec(),
        }
    }

    pub fn prefix(&self, len: usize) -> Word {
        self.slice(0, len)
    }

    pub fn suffix_from(&self, from: usize) -> Word {
        self.slice(from, self.len())
    }

    pub fn mirror(&self) -> Word {
        let mut syms = self.syms.clone();
        syms.reverse();
        Word {
            alphabet: Arc::clone(&self.alphabet),
            syms,
        }
    }

    /// `x⁻¹·self`: removes the given prefix, if it is one.
    pub fn strip_prefix(&self, x: &Word) -> Option<Word> {
        if self.syms.starts_with(&x.syms) {
            Some(self.suffix_from(x.len()))
        } else {
            None
        }
    }

    /// `self·x⁻¹`: removes the given suffix, if it is one.
    pub fn strip_suffix(&self, x: &Word) -> Option<Word> {
        if self.syms.ends_with(&x.syms) {
            Some(self.prefix(self.len() - x.len()))
        } else {
            None
        }
    }

    /// Re-expresses the word over another alphabet containing the same tokens.
    pub fn reindex(&self, alphabet: &Arc<Alphabet>) -> Result<Word, WordError> {
        Word::from_tokens(alphabet, self.syms.iter().map(|&s| self.alphabet.token(s)))
    }

    pub fn token_strings(&self) -> Vec<String> {
        self.syms
            .iter()
            .map(|&s| self.alphabet.token(s).to_owned())
            .collect()
    }

    /// Length-then-lexicographic order, lexicographic by declared symbol order.
    pub fn cmp_length_lex(&self, other: &Word) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.syms.cmp(&other.syms))
    }
}

impl PartialEq for Word {
    fn eq(&self, other: &Self) -> bool {
        self.syms == other.syms && same_alphabet(&self.alphabet, &other.alphabet)
    }
}

impl Eq for Word {}

impl Hash for Word {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.alphabet.fingerprint.hash(state);
        self.syms.hash(state);
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "eps");
        }
        let mut first = true;
        for &s in &self.syms {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}", self.alphabet.token(s))?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨{}⟩", self)
    }
}

fn assert_same(a: &Word, b: &Word) {
    assert!(
        same_alphabet(&a.alphabet, &b.alphabet),
        "alphabet mismatch between words"
    );
}

/// Greedy decision of `s ⊑ t` on raw symbol slices.
pub(crate) fn embeds(s: &[Symbol], t: &[Symbol]) -> bool {
    let mut it = t.iter();
    s.iter().all(|a| it.any(|b| b == a))
}

/// Same, with the pattern given as two concatenated parts (avoids allocating).
fn embeds2(s1: &[Symbol], s2: &[Symbol], t: &[Symbol]) -> bool {
    let mut it = t.iter();
    s1.iter().chain(s2.iter()).all(|a| it.any(|b| b == a))
}

/// `s ⊑ t`: `s` embeds in `t` as a scattered subsequence.
///
/// Panics when the words use different alphabets.
pub fn is_subword(s: &Word, t: &Word) -> bool {
    assert_same(s, t);
    embeds(&s.syms, &t.syms)
}

/// The lexicographically least strictly increasing position sequence `p`
/// with `t[p_i] = s_i`, when `s ⊑ t`. This is the canonical embedding for
/// all witness output; rightmost embeddings are obtained by mirroring.
pub fn leftmost_embedding(s: &Word, t: &Word) -> Option<Vec<usize>> {
    assert_same(s, t);
    let mut positions = Vec::with_capacity(s.len());
    let mut j = 0;
    for &a in &s.syms {
        loop {
            if j >= t.len() {
                return None;
            }
            j += 1;
            if t.syms[j - 1] == a {
                positions.push(j - 1);
                break;
            }
        }
    }
    Some(positions)
}

/// The longest suffix `x` of `y` such that `x·z ⊑ t`.
///
/// Requires `z ⊑ t`, so that the empty suffix qualifies.
pub fn longest_suffix_carrier(y: &Word, z: &Word, t: &Word) -> Result<Word, WordError> {
    assert_same(y, z);
    assert_same(z, t);
    if !embeds(&z.syms, &t.syms) {
        return Err(WordError::Precondition(
            "longest_suffix_carrier requires z ⊑ t",
        ));
    }
    for cut in 0..=y.len() {
        if embeds2(&y.syms[cut..], &z.syms, &t.syms) {
            return Ok(y.suffix_from(cut));
        }
    }
    unreachable!("the empty suffix always qualifies once z ⊑ t")
}

/// The shortest prefix `x` of `z` such that `x⁻¹·z ⊑ t`. Always defined,
/// since `x = z` qualifies.
pub fn shortest_prefix_overflow(z: &Word, t: &Word) -> Word {
    assert_same(z, t);
    for cut in 0..=z.len() {
        if embeds(&z.syms[cut..], &t.syms) {
            return z.prefix(cut);
        }
    }
    unreachable!("x = z always qualifies")
}

/// The longest prefix `x` of `t` such that `z ⊑ x⁻¹·t`.
///
/// Requires `z ⊑ t`.
pub fn longest_prefix_host(z: &Word, t: &Word) -> Result<Word, WordError> {
    assert_same(z, t);
    if !embeds(&z.syms, &t.syms) {
        return Err(WordError::Precondition("longest_prefix_host requires z ⊑ t"));
    }
    for cut in (0..=t.len()).rev() {
        if embeds(&z.syms, &t.syms[cut..]) {
            return Ok(t.prefix(cut));
        }
    }
    unreachable!("the empty prefix always qualifies once z ⊑ t")
}

/// The shortest suffix `x` of `s` such that `z ⊑ x·t`.
///
/// Requires `z ⊑ s·t`.
pub fn shortest_suffix_host(z: &Word, s: &Word, t: &Word) -> Result<Word, WordError> {
    assert_same(z, s);
    assert_same(s, t);
    let hosted_by = |cut: usize| {
        let mut it = s.syms[cut..].iter().chain(t.syms.iter());
        z.syms.iter().all(|a| it.any(|b| b == a))
    };
    if !hosted_by(0) {
        return Err(WordError::Precondition(
            "shortest_suffix_host requires z ⊑ s·t",
        ));
    }
    for cut in (0..=s.len()).rev() {
        if hosted_by(cut) {
            return Ok(s.suffix_from(cut));
        }
    }
    unreachable!("x = s always qualifies once z ⊑ s·t")
}
