//! Regular languages for the constraint sets: NFAs with epsilon moves,
//! complete DFAs, boolean operations, suffix-language transforms,
//! length-lex enumeration, and transformation-monoid signatures.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::Arc;

use crate::words::{same_alphabet, Alphabet, Symbol, Word, WordError};

mod regex;
pub use regex::{to_regex, Regex, RegexParseError};

/// A nondeterministic automaton with epsilon moves.
#[derive(Debug, Clone)]
pub struct Nfa {
    alphabet: Arc<Alphabet>,
    states: usize,
    initial: BTreeSet<usize>,
    accepting: BTreeSet<usize>,
    delta: Vec<BTreeMap<Symbol, BTreeSet<usize>>>,
    eps: Vec<BTreeSet<usize>>,
}

impl Nfa {
    pub fn empty_language(alphabet: &Arc<Alphabet>) -> Nfa {
        Nfa {
            alphabet: Arc::clone(alphabet),
            states: 1,
            initial: BTreeSet::from([0]),
            accepting: BTreeSet::new(),
            delta: vec![BTreeMap::new()],
            eps: vec![BTreeSet::new()],
        }
    }

    pub fn epsilon(alphabet: &Arc<Alphabet>) -> Nfa {
        Nfa {
            alphabet: Arc::clone(alphabet),
            states: 1,
            initial: BTreeSet::from([0]),
            accepting: BTreeSet::from([0]),
            delta: vec![BTreeMap::new()],
            eps: vec![BTreeSet::new()],
        }
    }

    pub fn symbol(alphabet: &Arc<Alphabet>, sym: Symbol) -> Nfa {
        let mut nfa = Nfa {
            alphabet: Arc::clone(alphabet),
            states: 2,
            initial: BTreeSet::from([0]),
            accepting: BTreeSet::from([1]),
            delta: vec![BTreeMap::new(), BTreeMap::new()],
            eps: vec![BTreeSet::new(), BTreeSet::new()],
        };
        nfa.add_edge(0, sym, 1);
        nfa
    }

    pub fn literal(word: &Word) -> Nfa {
        let n = word.len();
        let mut nfa = Nfa {
            alphabet: Arc::clone(word.alphabet()),
            states: n + 1,
            initial: BTreeSet::from([0]),
            accepting: BTreeSet::from([n]),
            delta: vec![BTreeMap::new(); n + 1],
            eps: vec![BTreeSet::new(); n + 1],
        };
        for (i, &s) in word.symbols().iter().enumerate() {
            nfa.add_edge(i, s, i + 1);
        }
        nfa
    }

    /// Assembles an automaton from explicit parts.
    pub fn from_edges(
        alphabet: &Arc<Alphabet>,
        states: usize,
        initial: impl IntoIterator<Item = usize>,
        accepting: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = (usize, Symbol, usize)>,
    ) -> Nfa {
        let mut nfa = Nfa {
            alphabet: Arc::clone(alphabet),
            states,
            initial: initial.into_iter().inspect(|&q| assert!(q < states)).collect(),
            accepting: accepting.into_iter().inspect(|&q| assert!(q < states)).collect(),
            delta: vec![BTreeMap::new(); states],
            eps: vec![BTreeSet::new(); states],
        };
        for (from, sym, to) in edges {
            assert!(from < states && to < states && sym.id() < alphabet.len());
            nfa.add_edge(from, sym, to);
        }
        nfa
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn initial(&self) -> &BTreeSet<usize> {
        &self.initial
    }

    pub fn accepting(&self) -> &BTreeSet<usize> {
        &self.accepting
    }

    pub fn symbol_edges(&self) -> impl Iterator<Item = (usize, Symbol, usize)> + '_ {
        self.delta.iter().enumerate().flat_map(|(q, row)| {
            row.iter()
                .flat_map(move |(&sym, tgts)| tgts.iter().map(move |&t| (q, sym, t)))
        })
    }

    pub fn eps_edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.eps
            .iter()
            .enumerate()
            .flat_map(|(q, tgts)| tgts.iter().map(move |&t| (q, t)))
    }

    fn add_edge(&mut self, from: usize, sym: Symbol, to: usize) {
        self.delta[from].entry(sym).or_default().insert(to);
    }

    fn add_eps(&mut self, from: usize, to: usize) {
        self.eps[from].insert(to);
    }

    fn add_state(&mut self) -> usize {
        self.delta.push(BTreeMap::new());
        self.eps.push(BTreeSet::new());
        self.states += 1;
        self.states - 1
    }

    /// Copies `other`'s states into `self` (without initial/accepting marks),
    /// returning the index offset.
    fn absorb(&mut self, other: &Nfa) -> usize {
        assert!(
            same_alphabet(&self.alphabet, &other.alphabet),
            "automaton combination: alphabet mismatch"
        );
        let off = self.states;
        for q in 0..other.states {
            let me = self.add_state();
            debug_assert_eq!(me, off + q);
        }
        for (q, sym, t) in other.symbol_edges() {
            self.add_edge(off + q, sym, off + t);
        }
        for (q, t) in other.eps_edges() {
            self.add_eps(off + q, off + t);
        }
        off
    }

    pub fn union(&self, other: &Nfa) -> Nfa {
        let mut out = self.clone();
        let off = out.absorb(other);
        for &q in &other.initial {
            out.initial.insert(off + q);
        }
        for &q in &other.accepting {
            out.accepting.insert(off + q);
        }
        out
    }

    pub fn concat(&self, other: &Nfa) -> Nfa {
        let mut out = self.clone();
        let off = out.absorb(other);
        for &a in &self.accepting {
            for &i in &other.initial {
                out.add_eps(a, off + i);
            }
        }
        out.accepting = other.accepting.iter().map(|&q| off + q).collect();
        out
    }

    pub fn star(&self) -> Nfa {
        let mut out = self.clone();
        let hub = out.add_state();
        for &i in &self.initial {
            out.add_eps(hub, i);
        }
        for &a in &self.accepting {
            out.add_eps(a, hub);
        }
        out.initial = BTreeSet::from([hub]);
        out.accepting = BTreeSet::from([hub]);
        out
    }

    pub fn plus(&self) -> Nfa {
        let mut out = self.clone();
        let hub = out.add_state();
        for &i in &self.initial {
            out.add_eps(hub, i);
        }
        for &a in &self.accepting {
            out.add_eps(a, hub);
        }
        out.accepting = BTreeSet::from([hub]);
        out
    }

    pub fn optional(&self) -> Nfa {
        let mut out = self.clone();
        let hub = out.add_state();
        for &i in &self.initial {
            out.add_eps(hub, i);
        }
        out.initial = BTreeSet::from([hub]);
        out.accepting.insert(hub);
        out
    }

    /// Accepts exactly the mirrored words of this language.
    pub fn mirror_language(&self) -> Nfa {
        let mut out = Nfa {
            alphabet: Arc::clone(&self.alphabet),
            states: self.states,
            initial: self.accepting.clone(),
            accepting: self.initial.clone(),
            delta: vec![BTreeMap::new(); self.states],
            eps: vec![BTreeSet::new(); self.states],
        };
        for (q, sym, t) in self.symbol_edges() {
            out.add_edge(t, sym, q);
        }
        for (q, t) in self.eps_edges() {
            out.add_eps(t, q);
        }
        out
    }

    pub fn from_dfa(dfa: &Dfa) -> Nfa {
        let mut out = Nfa {
            alphabet: Arc::clone(&dfa.alphabet),
            states: dfa.states,
            initial: BTreeSet::from([dfa.initial]),
            accepting: dfa.accepting.clone(),
            delta: vec![BTreeMap::new(); dfa.states],
            eps: vec![BTreeSet::new(); dfa.states],
        };
        for q in 0..dfa.states {
            for s in dfa.alphabet.symbols() {
                out.add_edge(q, s, dfa.delta[q][s.id()]);
            }
        }
        out
    }

    fn eps_closure(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = set.clone();
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &t in &self.eps[q] {
                if out.insert(t) {
                    stack.push(t);
                }
            }
        }
        out
    }

    fn step(&self, set: &BTreeSet<usize>, sym: Symbol) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &q in set {
            if let Some(tgts) = self.delta[q].get(&sym) {
                out.extend(tgts.iter().copied());
            }
        }
        out
    }

    pub fn accepts(&self, w: &Word) -> bool {
        assert!(
            same_alphabet(&self.alphabet, w.alphabet()),
            "accepts: alphabet mismatch"
        );
        let mut cur = self.eps_closure(&self.initial);
        for &s in w.symbols() {
            cur = self.eps_closure(&self.step(&cur, s));
        }
        cur.iter().any(|q| self.accepting.contains(q))
    }

    /// Subset construction. The result is complete: the empty subset acts as
    /// the explicit sink state.
    pub fn determinize(&self) -> Dfa {
        let start = self.eps_closure(&self.initial);
        let mut ids: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let mut queue = VecDeque::new();
        ids.insert(start.clone(), 0);
        subsets.push(start);
        queue.push_back(0);
        while let Some(id) = queue.pop_front() {
            let subset = subsets[id].clone();
            let mut row = Vec::with_capacity(self.alphabet.len());
            for s in self.alphabet.symbols() {
                let tgt = self.eps_closure(&self.step(&subset, s));
                let next_id = *ids.entry(tgt.clone()).or_insert_with(|| {
                    subsets.push(tgt);
                    delta.push(Vec::new());
                    queue.push_back(subsets.len() - 1);
                    subsets.len() - 1
                });
                row.push(next_id);
            }
            while delta.len() <= id {
                delta.push(Vec::new());
            }
            delta[id] = row;
        }
        let accepting = subsets
            .iter()
            .enumerate()
            .filter(|(_, s)| s.iter().any(|q| self.accepting.contains(q)))
            .map(|(i, _)| i)
            .collect();
        Dfa {
            alphabet: Arc::clone(&self.alphabet),
            states: subsets.len(),
            initial: 0,
            accepting,
            delta,
        }
    }

    /// Re-expresses the automaton over another alphabet with the same tokens
    /// (typically a superset).
    pub fn reindex(&self, alphabet: &Arc<Alphabet>) -> Result<Nfa, WordError> {
        let mut out = Nfa {
            alphabet: Arc::clone(alphabet),
            states: self.states,
            initial: self.initial.clone(),
            accepting: self.accepting.clone(),
            delta: vec![BTreeMap::new(); self.states],
            eps: self.eps.clone(),
        };
        for (q, sym, t) in self.symbol_edges() {
            let tok = self.alphabet.token(sym);
            let new_sym = alphabet
                .symbol(tok)
                .ok_or_else(|| WordError::UnknownToken(tok.to_owned()))?;
            out.add_edge(q, new_sym, t);
        }
        Ok(out)
    }
}

/// Accepts the suffixes of the language's words obtained by removing at
/// least `k` leading letters (more than `k` when `strict`). With `k = 0`,
/// non-strict, this is the full suffix language.
pub fn suffix_language(n: &Nfa, k: usize, strict: bool) -> Nfa {
    let threshold = if strict { k + 1 } else { k };
    let mut level = n.eps_closure(&n.initial);
    for _ in 0..threshold {
        let mut next = BTreeSet::new();
        for s in n.alphabet.symbols() {
            next.extend(n.step(&level, s));
        }
        level = n.eps_closure(&next);
    }
    // saturate: anything reachable after the threshold also qualifies
    let mut starts = level;
    loop {
        let mut next = BTreeSet::new();
        for s in n.alphabet.symbols() {
            next.extend(n.step(&starts, s));
        }
        let closed = n.eps_closure(&next);
        let before = starts.len();
        starts.extend(closed);
        if starts.len() == before {
            break;
        }
    }
    let mut out = n.clone();
    out.initial = starts;
    out
}

/// Accepts exactly the words of the language that are longer than `m`.
pub fn strip_short(n: &Nfa, m: usize) -> Nfa {
    // track letters consumed, saturating at m+1
    let levels = m + 2;
    let pack = |q: usize, c: usize| q * levels + c;
    let mut out = Nfa {
        alphabet: Arc::clone(&n.alphabet),
        states: n.states * levels,
        initial: n.initial.iter().map(|&q| pack(q, 0)).collect(),
        accepting: n.accepting.iter().map(|&q| pack(q, m + 1)).collect(),
        delta: vec![BTreeMap::new(); n.states * levels],
        eps: vec![BTreeSet::new(); n.states * levels],
    };
    for (q, sym, t) in n.symbol_edges() {
        for c in 0..levels {
            out.add_edge(pack(q, c), sym, pack(t, (c + 1).min(m + 1)));
        }
    }
    for (q, t) in n.eps_edges() {
        for c in 0..levels {
            out.add_eps(pack(q, c), pack(t, c));
        }
    }
    out
}

/// A complete deterministic automaton.
#[derive(Debug, Clone)]
pub struct Dfa {
    alphabet: Arc<Alphabet>,
    states: usize,
    initial: usize,
    accepting: BTreeSet<usize>,
    delta: Vec<Vec<usize>>,
}

/// The state transformation a word induces on a DFA: a refinement of the
/// syntactic congruence, with composition by vector lookup.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature(Vec<usize>);

impl Signature {
    pub fn identity(states: usize) -> Signature {
        Signature((0..states).collect())
    }

    /// The transformation "first `self`, then `other`".
    pub fn compose(&self, other: &Signature) -> Signature {
        Signature(self.0.iter().map(|&q| other.0[q]).collect())
    }

    pub fn apply(&self, q: usize) -> usize {
        self.0[q]
    }

    pub fn is_idempotent(&self) -> bool {
        self.compose(self) == *self
    }
}

/// Exact transformation-monoid size when the closure fits under the cap,
/// otherwise the `m^m` bound for an `m`-state complete DFA.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonoidSize {
    Exact(u64),
    UpperBound(u128),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeBounds {
    pub n_r: MonoidSize,
    pub k_r: usize,
}

impl Dfa {
    pub fn from_parts(
        alphabet: &Arc<Alphabet>,
        initial: usize,
        accepting: impl IntoIterator<Item = usize>,
        delta: Vec<Vec<usize>>,
    ) -> Dfa {
        let states = delta.len();
        assert!(initial < states);
        assert!(delta.iter().all(|row| row.len() == alphabet.len()));
        assert!(delta.iter().flatten().all(|&t| t < states));
        let accepting: BTreeSet<usize> = accepting.into_iter().collect();
        assert!(accepting.iter().all(|&q| q < states));
        Dfa {
            alphabet: Arc::clone(alphabet),
            states,
            initial,
            accepting,
            delta,
        }
    }

    /// Accepts every word over the alphabet.
    pub fn universal(alphabet: &Arc<Alphabet>) -> Dfa {
        Dfa::from_parts(alphabet, 0, [0], vec![vec![0; alphabet.len()]])
    }

    pub fn empty_language(alphabet: &Arc<Alphabet>) -> Dfa {
        Dfa::from_parts(alphabet, 0, [], vec![vec![0; alphabet.len()]])
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn states(&self) -> usize {
        self.states
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting.contains(&q)
    }

    pub fn next(&self, q: usize, sym: Symbol) -> usize {
        self.delta[q][sym.id()]
    }

    pub fn run_from(&self, q: usize, w: &Word) -> usize {
        w.symbols().iter().fold(q, |q, &s| self.next(q, s))
    }

    pub fn membership(&self, w: &Word) -> bool {
        assert!(
            same_alphabet(&self.alphabet, w.alphabet()),
            "membership: alphabet mismatch"
        );
        self.is_accepting(self.run_from(self.initial, w))
    }

    pub fn signature(&self, w: &Word) -> Signature {
        Signature((0..self.states).map(|q| self.run_from(q, w)).collect())
    }

    pub fn symbol_signature(&self, sym: Symbol) -> Signature {
        Signature((0..self.states).map(|q| self.next(q, sym)).collect())
    }

    pub fn to_nfa(&self) -> Nfa {
        Nfa::from_dfa(self)
    }

    fn reachable(&self) -> Vec<usize> {
        let mut seen = vec![false; self.states];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for &t in &self.delta[q] {
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        order
    }

    /// Moore partition refinement, with states renumbered canonically by a
    /// breadth-first walk from the initial class.
    pub fn minimize(&self) -> Dfa {
        let reachable = self.reachable();
        let mut idx = vec![usize::MAX; self.states];
        for (i, &q) in reachable.iter().enumerate() {
            idx[q] = i;
        }
        let n = reachable.len();
        let syms = self.alphabet.len();
        // class per reachable state
        let mut class: Vec<usize> = reachable
            .iter()
            .map(|&q| usize::from(self.accepting.contains(&q)))
            .collect();
        loop {
            let mut sig_ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next_class = vec![0usize; n];
            for i in 0..n {
                let q = reachable[i];
                let row: Vec<usize> = (0..syms).map(|s| class[idx[self.delta[q][s]]]).collect();
                let id = sig_ids.len();
                let entry = *sig_ids.entry((class[i], row)).or_insert(id);
                next_class[i] = entry;
            }
            let stable = sig_ids.len() == class.iter().collect::<HashSet<_>>().len();
            class = next_class;
            if stable {
                break;
            }
        }
        // canonical renumbering: BFS over classes from the initial one
        let class_of = |q: usize| class[idx[q]];
        let mut renum: HashMap<usize, usize> = HashMap::new();
        let mut repr: Vec<usize> = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        renum.insert(class_of(self.initial), 0);
        repr.push(self.initial);
        while let Some(q) = queue.pop_front() {
            for s in 0..syms {
                let t = self.delta[q][s];
                let c = class_of(t);
                if !renum.contains_key(&c) {
                    renum.insert(c, repr.len());
                    repr.push(t);
                    queue.push_back(t);
                }
            }
        }
        let m = repr.len();
        let mut delta = vec![vec![0usize; syms]; m];
        let mut accepting = BTreeSet::new();
        for (i, &q) in repr.iter().enumerate() {
            for s in 0..syms {
                delta[i][s] = renum[&class_of(self.delta[q][s])];
            }
            if self.accepting.contains(&q) {
                accepting.insert(i);
            }
        }
        Dfa {
            alphabet: Arc::clone(&self.alphabet),
            states: m,
            initial: 0,
            accepting,
            delta,
        }
    }

    pub fn complement(&self) -> Dfa {
        let all: BTreeSet<usize> = (0..self.states).collect();
        let mut out = self.clone();
        out.accepting = all.difference(&self.accepting).copied().collect();
        out.minimize()
    }

    fn product(&self, other: &Dfa, accept: impl Fn(bool, bool) -> bool) -> Dfa {
        assert!(
            same_alphabet(&self.alphabet, &other.alphabet),
            "product: alphabet mismatch"
        );
        let syms = self.alphabet.len();
        let pack = |a: usize, b: usize| a * other.states + b;
        let states = self.states * other.states;
        let mut delta = vec![vec![0usize; syms]; states];
        let mut accepting = BTreeSet::new();
        for a in 0..self.states {
            for b in 0..other.states {
                for s in 0..syms {
                    delta[pack(a, b)][s] = pack(self.delta[a][s], other.delta[b][s]);
                }
                if accept(self.accepting.contains(&a), other.accepting.contains(&b)) {
                    accepting.insert(pack(a, b));
                }
            }
        }
        Dfa {
            alphabet: Arc::clone(&self.alphabet),
            states,
            initial: pack(self.initial, other.initial),
            accepting,
            delta,
        }
        .minimize()
    }

    pub fn intersect(&self, other: &Dfa) -> Dfa {
        self.product(other, |a, b| a && b)
    }

    pub fn union_with(&self, other: &Dfa) -> Dfa {
        self.product(other, |a, b| a || b)
    }

    pub fn difference(&self, other: &Dfa) -> Dfa {
        self.product(other, |a, b| a && !b)
    }

    pub fn equivalent(&self, other: &Dfa) -> bool {
        self.difference(other).is_empty_language() && other.difference(self).is_empty_language()
    }

    pub fn is_empty_language(&self) -> bool {
        let reachable = self.reachable();
        !reachable.iter().any(|q| self.accepting.contains(q))
    }

    /// `Some(l)` when the language is finite with no word longer than `l`
    /// (`Some(0)` for the empty language), `None` when infinite.
    pub fn finite_max_len(&self) -> Option<usize> {
        // trim: reachable and co-accessible states
        let reachable: HashSet<usize> = self.reachable().into_iter().collect();
        let mut co = vec![false; self.states];
        for &q in &self.accepting {
            co[q] = true;
        }
        loop {
            let mut changed = false;
            for q in 0..self.states {
                if !co[q] && self.delta[q].iter().any(|&t| co[t]) {
                    co[q] = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        let live: Vec<usize> = (0..self.states)
            .filter(|q| reachable.contains(q) && co[*q])
            .collect();
        if live.is_empty() {
            return Some(0);
        }
        // cycle detection + longest path on the live subgraph
        let live_set: HashSet<usize> = live.iter().copied().collect();
        let mut color = vec![0u8; self.states]; // 0 white, 1 grey, 2 black
        let mut longest = vec![0usize; self.states]; // longest path to an accepting state
        let mut ok = true;
        fn dfs(
            q: usize,
            dfa: &Dfa,
            live: &HashSet<usize>,
            color: &mut [u8],
            longest: &mut [usize],
            ok: &mut bool,
        ) {
            color[q] = 1;
            let mut best: Option<usize> = if dfa.accepting.contains(&q) {
                Some(0)
            } else {
                None
            };
            for s in 0..dfa.alphabet.len() {
                let t = dfa.delta[q][s];
                if !live.contains(&t) {
                    continue;
                }
                match color[t] {
                    0 => dfs(t, dfa, live, color, longest, ok),
                    1 => {
                        *ok = false;
                        continue;
                    }
                    _ => {}
                }
                if !*ok {
                    return;
                }
                best = Some(best.unwrap_or(0).max(longest[t] + 1));
            }
            longest[q] = best.unwrap_or(0);
            color[q] = 2;
        }
        dfs(
            self.initial,
            self,
            &live_set,
            &mut color,
            &mut longest,
            &mut ok,
        );
        if ok {
            Some(longest[self.initial])
        } else {
            None
        }
    }

    /// Words of the language up to `max_len`, in length-then-lexicographic
    /// order by declared symbol order.
    pub fn enumerate(&self, max_len: usize) -> LanguageIter<'_> {
        LanguageIter::new(self, max_len)
    }

    /// Transformation-monoid size (exact under `cap`, else the `m^m` bound)
    /// and the minimized state count.
    pub fn size_bounds(&self, cap: usize) -> SizeBounds {
        let m = self.minimize();
        let k_r = m.states;
        let gens: Vec<Signature> = m
            .alphabet
            .symbols()
            .map(|s| m.symbol_signature(s))
            .collect();
        let mut seen: HashSet<Signature> = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(Signature::identity(m.states));
        queue.push_back(Signature::identity(m.states));
        let mut capped = false;
        while let Some(sig) = queue.pop_front() {
            for g in &gens {
                let next = sig.compose(g);
                if seen.insert(next.clone()) {
                    if seen.len() > cap {
                        capped = true;
                        break;
                    }
                    queue.push_back(next);
                }
            }
            if capped {
                break;
            }
        }
        let n_r = if capped {
            let mut bound: u128 = 1;
            for _ in 0..k_r {
                bound = bound.saturating_mul(k_r as u128);
            }
            MonoidSize::UpperBound(bound)
        } else {
            MonoidSize::Exact(seen.len() as u64)
        };
        SizeBounds { n_r, k_r }
    }

    pub fn reindex(&self, alphabet: &Arc<Alphabet>) -> Result<Dfa, WordError> {
        Ok(self.to_nfa().reindex(alphabet)?.determinize().minimize())
    }
}

/// Length-lex enumeration of a DFA's language, lazily.
pub struct LanguageIter<'a> {
    dfa: &'a Dfa,
    max_len: usize,
    /// feas[q][d]: some accepting state is exactly `d` steps from `q`
    feas: Vec<Vec<bool>>,
    target: usize,
    stack: Vec<(usize, usize)>, // (state, next symbol id to try)
    path: Vec<Symbol>,
    fresh_target: bool,
    done: bool,
}

impl<'a> LanguageIter<'a> {
    fn new(dfa: &'a Dfa, max_len: usize) -> Self {
        let mut feas = vec![vec![false; max_len + 1]; dfa.states];
        for q in 0..dfa.states {
            feas[q][0] = dfa.accepting.contains(&q);
        }
        for d in 1..=max_len {
            for q in 0..dfa.states {
                feas[q][d] = dfa.delta[q].iter().any(|&t| feas[t][d - 1]);
            }
        }
        LanguageIter {
            dfa,
            max_len,
            feas,
            target: 0,
            stack: Vec::new(),
            path: Vec::new(),
            fresh_target: true,
            done: false,
        }
    }

    fn backtrack(&mut self) {
        self.stack.pop();
        if self.stack.is_empty() {
            self.target += 1;
            self.fresh_target = true;
            if self.target > self.max_len {
                self.done = true;
            }
        } else {
            self.path.pop();
        }
    }
}

impl Iterator for LanguageIter<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        loop {
            if self.done {
                return None;
            }
            if self.fresh_target {
                self.fresh_target = false;
                self.path.clear();
                self.stack.clear();
                if self.feas[self.dfa.initial][self.target] {
                    self.stack.push((self.dfa.initial, 0));
                } else {
                    self.target += 1;
                    self.fresh_target = true;
                    if self.target > self.max_len {
                        self.done = true;
                    }
                    continue;
                }
            }
            let depth = self.path.len();
            if depth == self.target {
                let word = Word::from_symbols(&self.dfa.alphabet, self.path.clone());
                self.backtrack();
                return Some(word);
            }
            let remaining = self.target - depth - 1;
            let (q, ref mut next_sym) = self.stack.last_mut().expect("non-empty stack");
            let q = *q;
            let mut advanced = false;
            while *next_sym < self.dfa.alphabet.len() {
                let s = *next_sym;
                *next_sym += 1;
                let t = self.dfa.delta[q][s];
                if self.feas[t][remaining] {
                    self.path.push(Symbol::new(s));
                    self.stack.push((t, 0));
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                self.backtrack();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn al01() -> Arc<Alphabet> {
        Alphabet::new(["0", "1"]).unwrap()
    }

    fn al0() -> Arc<Alphabet> {
        Alphabet::new(["0"]).unwrap()
    }

    fn w(alphabet: &Arc<Alphabet>, text: &str) -> Word {
        Word::parse(alphabet, text).unwrap()
    }

    fn rx(alphabet: &Arc<Alphabet>, text: &str) -> Dfa {
        Regex::parse(text, alphabet)
            .unwrap()
            .to_nfa()
            .determinize()
            .minimize()
    }

    #[test]
    fn boolean_operations() {
        let al = al01();
        let all = Dfa::universal(&al);
        let none = all.complement();
        assert!(none.is_empty_language());
        let r = rx(&al, "( 0 | 1 ) +");
        assert!(r.intersect(&r.complement()).is_empty_language());
        assert!(r.union_with(&r.complement()).equivalent(&all));
    }

    #[test]
    fn mirror_examples() {
        let al = al01();
        let ab = Regex::parse("0 1", &al).unwrap().to_nfa();
        let m = ab.mirror_language().determinize().minimize();
        let words: Vec<Word> = m.enumerate(4).collect();
        assert_eq!(words, vec![w(&al, "1 0")]);
        // double mirror is the identity on languages
        let mm = ab
            .mirror_language()
            .determinize()
            .to_nfa()
            .mirror_language()
            .determinize()
            .minimize();
        assert!(mm.equivalent(&ab.determinize().minimize()));
    }

    #[test]
    fn membership_examples() {
        let al = al0();
        let even = rx(&al, "( 0 0 ) *");
        assert!(even.membership(&w(&al, "0 0")));
        assert!(!even.membership(&w(&al, "0")));
        assert!(even.membership(&Word::empty(&al)));
    }

    #[test]
    fn signature_examples() {
        let al = al0();
        let even = rx(&al, "( 0 0 ) *");
        assert_eq!(even.signature(&w(&al, "0")), even.signature(&w(&al, "0 0 0")));
        assert_ne!(even.signature(&w(&al, "0")), even.signature(&w(&al, "0 0")));
        assert_eq!(
            even.signature(&Word::empty(&al)),
            Signature::identity(even.states())
        );
    }

    #[test]
    fn signature_composition_law() {
        let al = al01();
        let d = rx(&al, "0 ( 0 | 1 ) * 1");
        for a in ["0", "1 0", "0 1 1", ""] {
            for b in ["1", "0 0", "", "1 1 0"] {
                let (wa, wb) = (w(&al, a), w(&al, b));
                assert_eq!(
                    d.signature(&wa.concat(&wb)),
                    d.signature(&wa).compose(&d.signature(&wb))
                );
            }
        }
    }

    #[test]
    fn signature_equality_implies_context_equivalence() {
        let al = al01();
        let d = rx(&al, "( 0 1 ) *");
        let all: Vec<Word> = Dfa::universal(&al).enumerate(4).collect();
        for w1 in &all {
            for w2 in &all {
                if d.signature(w1) == d.signature(w2) {
                    for x in &all {
                        for y in &all {
                            assert_eq!(
                                d.membership(&x.concat(w1).concat(y)),
                                d.membership(&x.concat(w2).concat(y))
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn enumerate_examples() {
        let al = al01();
        let d = rx(&al, "( 0 | 1 ) +");
        let words: Vec<String> = d.enumerate(2).map(|w| w.to_string()).collect();
        assert_eq!(words, vec!["0", "1", "0 0", "0 1", "1 0", "1 1"]);

        let empty = Dfa::empty_language(&al);
        assert_eq!(empty.enumerate(10).count(), 0);

        let al = al0();
        let even = rx(&al, "( 0 0 ) *");
        let words: Vec<Word> = even.enumerate(4).collect();
        assert_eq!(words, vec![w(&al, ""), w(&al, "0 0"), w(&al, "0 0 0 0")]);
    }

    #[test]
    fn enumerate_is_membership_filtered() {
        let al = al01();
        for text in ["( 0 1 | 1 ) * 0", "0 * 1 *", "( 0 | 1 1 ) +"] {
            let d = rx(&al, text);
            let enumerated: Vec<Word> = d.enumerate(5).collect();
            let filtered: Vec<Word> = Dfa::universal(&al)
                .enumerate(5)
                .filter(|w| d.membership(w))
                .collect();
            assert_eq!(enumerated, filtered);
        }
    }

    #[test]
    fn suffix_language_examples() {
        let al = al01();
        let ab = Regex::parse("0 1", &al).unwrap().to_nfa();
        let suf = suffix_language(&ab, 0, false).determinize().minimize();
        let words: Vec<Word> = suf.enumerate(3).collect();
        assert_eq!(words, vec![w(&al, ""), w(&al, "1"), w(&al, "0 1")]);
        let suf1 = suffix_language(&ab, 1, false).determinize().minimize();
        let words: Vec<Word> = suf1.enumerate(3).collect();
        assert_eq!(words, vec![w(&al, ""), w(&al, "1")]);
    }

    #[test]
    fn suffix_language_contains_original() {
        let al = al01();
        for text in ["( 0 1 ) *", "1 ( 0 | 1 ) *", "0 0 0"] {
            let n = Regex::parse(text, &al).unwrap().to_nfa();
            let suf = suffix_language(&n, 0, false).determinize();
            let orig = n.determinize();
            assert!(orig.difference(&suf).is_empty_language());
        }
    }

    /// brute-force suffix sets: enumerate the language, take suffixes
    fn brute_suffixes(d: &Dfa, k: usize, strict: bool, enum_len: usize, keep_len: usize) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for word in d.enumerate(enum_len) {
            for cut in 0..=word.len() {
                let removed = cut;
                let ok = if strict { removed > k } else { removed >= k };
                if ok && word.len() - cut <= keep_len {
                    out.insert(word.suffix_from(cut).to_string());
                }
            }
        }
        out
    }

    #[test]
    fn suffix_language_matches_brute_force() {
        let al = al01();
        for text in ["( 0 1 ) *", "1 ( 0 | 1 ) * 0", "0 + 1 +"] {
            let n = Regex::parse(text, &al).unwrap().to_nfa();
            let d = n.determinize().minimize();
            for k in 0..=3usize {
                for strict in [false, true] {
                    let suf = suffix_language(&n, k, strict).determinize().minimize();
                    let got: BTreeSet<String> =
                        suf.enumerate(6).map(|w| w.to_string()).collect();
                    // words of length ≤ 6 arise from language words of length ≤ 6 + removed
                    // prefix; the automata here pump within 12 letters, so enumerating the
                    // language to 12+k is exhaustive for this comparison
                    let want = brute_suffixes(&d, k, strict, 12 + k, 6);
                    assert_eq!(got, want, "text={text} k={k} strict={strict}");
                }
            }
        }
    }

    #[test]
    fn strip_short_examples() {
        let al = al0();
        let zs = Regex::parse("0 *", &al).unwrap().to_nfa();
        let d = strip_short(&zs, 2).determinize().minimize();
        let words: Vec<String> = d.enumerate(5).map(|w| w.to_string()).collect();
        assert_eq!(words, vec!["0 0 0", "0 0 0 0", "0 0 0 0 0"]);

        let eps = Regex::parse("eps", &al).unwrap().to_nfa();
        assert!(strip_short(&eps, 0).determinize().is_empty_language());

        let plus = strip_short(&zs, 0).determinize().minimize();
        assert!(plus.equivalent(&rx(&al, "0 +")));
    }

    #[test]
    fn size_bounds_examples() {
        let al = al01();
        let all = Dfa::universal(&al);
        let b = all.size_bounds(1000);
        assert_eq!(b.n_r, MonoidSize::Exact(1));
        assert_eq!(b.k_r, 1);

        // (00)* over {0,1} minimizes to 3 states (even, odd, sink); its
        // monoid closure has the identity, the swap and the sink collapse
        let even = rx(&al, "( 0 0 ) *");
        let b = even.size_bounds(1000);
        assert_eq!(b.k_r, 3);
        assert_eq!(b.n_r, MonoidSize::Exact(3));

        // over the unary alphabet there is no sink: 2 states, monoid 2
        let al = al0();
        let even = rx(&al, "( 0 0 ) *");
        let b = even.size_bounds(1000);
        assert_eq!(b.k_r, 2);
        assert_eq!(b.n_r, MonoidSize::Exact(2));

        let al2 = al01();
        let lit = rx(&al2, "0 1");
        let b = lit.size_bounds(1000);
        assert_eq!(b.k_r, lit.minimize().states());

        // cap forces the m^m fallback
        let b = even.size_bounds(1);
        assert_eq!(b.n_r, MonoidSize::UpperBound(4));
    }

    #[test]
    fn finite_language_detection() {
        let al = al01();
        assert_eq!(rx(&al, "0 1 | 1").finite_max_len(), Some(2));
        assert_eq!(rx(&al, "( 0 ) *").finite_max_len(), None);
        assert_eq!(Dfa::empty_language(&al).finite_max_len(), Some(0));
        assert_eq!(rx(&al, "eps").finite_max_len(), Some(0));
    }

    #[test]
    fn reindex_preserves_membership() {
        let small = Alphabet::new(["0", "1"]).unwrap();
        let big = Alphabet::new(["z", "0", "1"]).unwrap();
        let d = rx(&small, "0 1 *");
        let r = d.reindex(&big).unwrap();
        assert!(r.membership(&w(&big, "0 1 1")));
        assert!(!r.membership(&w(&big, "z")));
        assert!(!r.membership(&w(&big, "1")));
    }
}
