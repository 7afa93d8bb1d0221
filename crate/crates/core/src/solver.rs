//! Bounded-complete existence search, solution counting, and certified
//! infinity checks.
//!
//! The search explores the product of `R`'s DFA with candidate extension,
//! iterative-deepening by length so the first witness found is the
//! length-lex least. Exact-distance feasibility to an accepting state prunes
//! dead branches. For the direct variants a prefix whose gated condition
//! already fails is discarded (the prefix condition is monotone); for plain
//! and codirect candidates no prefix pruning is sound, only `R`-liveness.
//!
//! A missing solution is only *certified* when the length-function bound is
//! actually computable and lies within the explored range — at realistic
//! parameters it almost never is, and the result honestly stays `NoneUpTo`.

use thiserror::Error;

use crate::automata::{strip_short, MonoidSize};
use crate::cutting::{find_pump_pair, pump, PumpCertificate};
use crate::higman::h_bound;
use crate::instance::{PepInstance, SuffixConstraint, Variant};
use crate::margins::color_indices;
use crate::words::{Symbol, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("node budget exhausted after {explored} expansions")]
    BudgetExceeded { explored: u64 },
    #[error("instance construction failed during counting: {0}")]
    Internal(String),
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub max_len: usize,
    pub node_budget: u64,
    /// cap for exact transformation-monoid closure in bound computation
    pub monoid_cap: usize,
    /// candidate budget for the length-function tree search
    pub hbound_budget: u64,
}

impl SolveOptions {
    pub fn new(max_len: usize) -> SolveOptions {
        SolveOptions {
            max_len,
            node_budget: 10_000_000,
            monoid_cap: 4096,
            hbound_budget: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// the length-lex least solution within the bound
    Found { witness: Word },
    /// nothing within the bound; says nothing about longer candidates
    NoneUpTo { max_len: usize },
    /// nothing within the bound, and the computed short-solution bound lies
    /// inside it: the instance has no solution at all
    NoneCertified { bound: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub outcome: SolveOutcome,
    pub nodes: u64,
}

struct Search<'a> {
    inst: &'a PepInstance,
    feas: Vec<Vec<bool>>,
    budget: u64,
    nodes: u64,
    word: Vec<Symbol>,
    u_img: Vec<Symbol>,
    v_img: Vec<Symbol>,
    /// per-depth greedy embedding state of u(prefix) into v(prefix)
    matched: Vec<(usize, usize)>,
    /// per-depth image lengths, for backtracking
    img_lens: Vec<(usize, usize)>,
    /// R'-DFA states along the prefix, for direct gating
    rp_states: Option<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(inst: &'a PepInstance, opts: &SolveOptions) -> Search<'a> {
        let r = inst.r();
        let mut feas = vec![vec![false; opts.max_len + 1]; r.states()];
        for q in 0..r.states() {
            feas[q][0] = r.is_accepting(q);
        }
        for d in 1..=opts.max_len {
            for q in 0..r.states() {
                feas[q][d] = inst
                    .sigma()
                    .symbols()
                    .any(|s| feas[r.next(q, s)][d - 1]);
            }
        }
        let rp_states = match (inst.variant(), inst.rp()) {
            (Variant::DirPartial, SuffixConstraint::Regular(d)) => Some(vec![d.initial()]),
            _ => None,
        };
        Search {
            inst,
            feas,
            budget: opts.node_budget,
            nodes: 0,
            word: Vec::new(),
            u_img: Vec::new(),
            v_img: Vec::new(),
            matched: vec![(0, 0)],
            img_lens: vec![(0, 0)],
            rp_states,
        }
    }

    fn push(&mut self, s: Symbol) {
        self.word.push(s);
        self.u_img
            .extend_from_slice(self.inst.morphism_u().image(s).symbols());
        self.v_img
            .extend_from_slice(self.inst.morphism_v().image(s).symbols());
        let (mut um, mut vp) = *self.matched.last().unwrap();
        while um < self.u_img.len() && vp < self.v_img.len() {
            if self.u_img[um] == self.v_img[vp] {
                um += 1;
            }
            vp += 1;
        }
        self.matched.push((um, vp));
        self.img_lens.push((self.u_img.len(), self.v_img.len()));
        if let Some(states) = &mut self.rp_states {
            let q = *states.last().unwrap();
            let d = self
                .inst
                .rp()
                .as_regular()
                .expect("rp state stack only exists for regular constraints");
            states.push(d.next(q, s));
        }
    }

    fn pop(&mut self) {
        self.word.pop();
        self.matched.pop();
        self.img_lens.pop();
        let (ul, vl) = *self.img_lens.last().unwrap();
        self.u_img.truncate(ul);
        self.v_img.truncate(vl);
        if let Some(states) = &mut self.rp_states {
            states.pop();
        }
    }

    fn prefix_embeds(&self) -> bool {
        self.matched.last().unwrap().0 == self.u_img.len()
    }

    /// True when the freshly pushed prefix rules out every extension.
    fn prefix_pruned(&self) -> bool {
        match self.inst.variant() {
            Variant::CoAndDir => !self.prefix_embeds(),
            Variant::DirPartial => {
                if self.prefix_embeds() {
                    return false;
                }
                match (&self.rp_states, self.inst.rp()) {
                    (Some(states), _) => {
                        let d = self.inst.rp().as_regular().unwrap();
                        d.is_accepting(*states.last().unwrap())
                    }
                    (None, SuffixConstraint::LengthDiff(p)) => {
                        let prefix = Word::from_symbols(self.inst.sigma(), self.word.clone());
                        p.contains(&prefix)
                    }
                    (None, SuffixConstraint::Regular(_)) => unreachable!(),
                }
            }
            _ => false,
        }
    }

    fn dfs(&mut self, depth: usize, target: usize, r_state: usize) -> Result<Option<Word>, SolveError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(SolveError::BudgetExceeded {
                explored: self.nodes,
            });
        }
        if depth == target {
            if !self.inst.r().is_accepting(r_state) || !self.prefix_embeds() {
                return Ok(None);
            }
            let candidate = Word::from_symbols(self.inst.sigma(), self.word.clone());
            let good = match self.inst.variant() {
                // membership and the full embedding are the whole condition
                Variant::Plain => true,
                // gated prefixes were enforced on the way down
                Variant::DirPartial => true,
                _ => self.inst.check_solution(&candidate).is_solution(),
            };
            return Ok(if good { Some(candidate) } else { None });
        }
        let remaining = target - depth - 1;
        for s in self.inst.sigma().symbols() {
            let t = self.inst.r().next(r_state, s);
            if !self.feas[t][remaining] {
                continue;
            }
            self.push(s);
            let result = if self.prefix_pruned() {
                Ok(None)
            } else {
                self.dfs(depth + 1, target, t)
            };
            self.pop();
            if let Some(w) = result? {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }
}

/// Bounded-complete search for the length-lex least solution.
pub fn solve(inst: &PepInstance, opts: &SolveOptions) -> Result<SolveResult, SolveError> {
    let mut search = Search::new(inst, opts);
    for target in 0..=opts.max_len {
        if !search.feas[inst.r().initial()][target] {
            continue;
        }
        if let Some(witness) = search.dfs(0, target, inst.r().initial())? {
            debug_assert!(inst.check_solution(&witness).is_solution());
            return Ok(SolveResult {
                outcome: SolveOutcome::Found { witness },
                nodes: search.nodes,
            });
        }
    }
    let outcome = match short_bound(inst, opts.monoid_cap, opts.hbound_budget) {
        Some(bound) if bound <= opts.max_len => SolveOutcome::NoneCertified { bound },
        _ => SolveOutcome::NoneUpTo {
            max_len: opts.max_len,
        },
    };
    Ok(SolveResult {
        outcome,
        nodes: search.nodes,
    })
}

/// `2·H(n_R·n_{R'} + 1, K_u, |Γ|)` when every ingredient is computable
/// within budget. Solutions, when any exist, exist within this length.
/// `None` for the co&dir variant (no such bound exists) and whenever the
/// monoid closure or the tree search exceeds its budget — which is the
/// common case beyond toy parameters.
pub fn short_bound(inst: &PepInstance, monoid_cap: usize, hbound_budget: u64) -> Option<usize> {
    if inst.variant() == Variant::CoAndDir {
        return None;
    }
    let rp = inst.rp().as_regular()?;
    let n_r = match inst.r().size_bounds(monoid_cap).n_r {
        MonoidSize::Exact(n) => n as usize,
        MonoidSize::UpperBound(_) => return None,
    };
    let n_rp = match rp.size_bounds(monoid_cap).n_r {
        MonoidSize::Exact(n) => n as usize,
        MonoidSize::UpperBound(_) => return None,
    };
    let n = n_r.checked_mul(n_rp)?.checked_add(1)?;
    let h = h_bound(n, inst.expansion_u(), inst.gamma().len(), hbound_budget).value()?;
    Some(2 * h)
}

#[derive(Debug, Clone)]
pub enum ExactJustification {
    /// `R` restricted to words longer than the explored bound is empty
    StrippedLanguageEmpty,
    /// the stripped instance's short-solution bound lies within the
    /// explored range, so no longer solution exists
    CertifiedBound { bound: usize },
    /// the constraint language is finite and fully enumerated
    LanguageFinite { longest: usize },
}

/// Evidence that a pump certificate produces infinitely many solutions.
/// `solution` is reported in the original orientation; the certificate's
/// indices refer to the codirect orientation (mirrored when `mirrored`).
#[derive(Debug, Clone)]
pub struct InfiniteWitness {
    pub solution: Word,
    pub certificate: PumpCertificate,
    pub mirrored: bool,
}

#[derive(Debug, Clone)]
pub enum CountOutcome<C> {
    Infinite(C),
    FiniteAtLeast { count: u64 },
    Exact { count: u64, justification: ExactJustification },
}

#[derive(Debug, Clone)]
pub struct CountResult {
    pub outcome: CountOutcome<InfiniteWitness>,
    pub max_len: usize,
    pub enumerated: u64,
}

fn search_pump_witness(
    oriented: &PepInstance,
    mirrored: bool,
    solution: &Word,
) -> Option<InfiniteWitness> {
    if oriented.variant() == Variant::CoAndDir {
        return None;
    }
    let colored = color_indices(oriented, solution);
    let cert = find_pump_pair(oriented, &colored)?;
    // re-verify before trusting: iterates must be solutions
    for k in [2, 3] {
        let pumped = pump(oriented, &colored, cert.a, cert.b, k).ok()?;
        if !oriented.check_solution(&pumped).is_solution() {
            return None;
        }
    }
    Some(InfiniteWitness {
        solution: if mirrored {
            solution.mirror()
        } else {
            solution.clone()
        },
        certificate: cert,
        mirrored,
    })
}

/// Counts solutions up to `max_len`. A pump certificate on any of them
/// settles the count as infinite; otherwise the count is exact only when a
/// sound argument rules out longer solutions.
pub fn count(inst: &PepInstance, opts: &SolveOptions) -> Result<CountResult, SolveError> {
    let (oriented, mirrored) = inst.codir_oriented();
    let mut count = 0u64;
    let mut enumerated = 0u64;
    for w in oriented.r().enumerate(opts.max_len) {
        enumerated += 1;
        if enumerated > opts.node_budget {
            return Err(SolveError::BudgetExceeded {
                explored: enumerated,
            });
        }
        if !oriented.check_solution(&w).is_solution() {
            continue;
        }
        count += 1;
        if let Some(witness) = search_pump_witness(&oriented, mirrored, &w) {
            return Ok(CountResult {
                outcome: CountOutcome::Infinite(witness),
                max_len: opts.max_len,
                enumerated,
            });
        }
    }
    // exactness: no solutions longer than max_len?
    let stripped = strip_short(&oriented.r().to_nfa(), opts.max_len)
        .determinize()
        .minimize();
    let justification = if stripped.is_empty_language() {
        Some(ExactJustification::StrippedLanguageEmpty)
    } else {
        let stripped_inst = PepInstance::new(
            oriented.variant(),
            oriented.sigma(),
            oriented.gamma(),
            oriented.morphism_u().clone(),
            oriented.morphism_v().clone(),
            stripped,
            oriented.rp().clone(),
        )
        .map_err(|e| SolveError::Internal(e.to_string()))?;
        match short_bound(&stripped_inst, opts.monoid_cap, opts.hbound_budget) {
            Some(bound) if bound <= opts.max_len => {
                Some(ExactJustification::CertifiedBound { bound })
            }
            _ => None,
        }
    };
    let outcome = match justification {
        Some(justification) => CountOutcome::Exact {
            count,
            justification,
        },
        None => CountOutcome::FiniteAtLeast { count },
    };
    Ok(CountResult {
        outcome,
        max_len: opts.max_len,
        enumerated,
    })
}

/// Searches bounded solutions for a pump certificate. Sound: a certificate
/// implies infinitely many solutions. Incomplete below the theoretical
/// long-solution threshold, which is far beyond any practical bound — a
/// `None` therefore proves nothing.
pub fn infinite_check(
    inst: &PepInstance,
    opts: &SolveOptions,
) -> Result<Option<InfiniteWitness>, SolveError> {
    let (oriented, mirrored) = inst.codir_oriented();
    if oriented.variant() == Variant::CoAndDir {
        return Ok(None);
    }
    let mut enumerated = 0u64;
    for w in oriented.r().enumerate(opts.max_len) {
        enumerated += 1;
        if enumerated > opts.node_budget {
            return Err(SolveError::BudgetExceeded {
                explored: enumerated,
            });
        }
        if !oriented.check_solution(&w).is_solution() {
            continue;
        }
        if let Some(witness) = search_pump_witness(&oriented, mirrored, &w) {
            return Ok(Some(witness));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{Dfa, Regex};
    use crate::instance::Morphism;
    use crate::words::Alphabet;
    

    fn unary(u0: &str, v0: &str, r: &str, variant: Variant) -> PepInstance {
        let sigma = Alphabet::new(["0"]).unwrap();
        let gamma = Alphabet::new(["a"]).unwrap();
        let u = Morphism::new(&sigma, &gamma, vec![Word::parse(&gamma, u0).unwrap()]).unwrap();
        let v = Morphism::new(&sigma, &gamma, vec![Word::parse(&gamma, v0).unwrap()]).unwrap();
        let r = Regex::parse(r, &sigma).unwrap().to_nfa().determinize();
        PepInstance::new(
            variant,
            &sigma,
            &gamma,
            u,
            v,
            r,
            crate::instance::SuffixConstraint::none(&sigma),
        )
        .unwrap()
    }

    #[test]
    fn solve_examples() {
        let inst = unary("a", "a", "0 0 *", Variant::Plain);
        let res = solve(&inst, &SolveOptions::new(3)).unwrap();
        assert_eq!(
            res.outcome,
            SolveOutcome::Found {
                witness: Word::parse(inst.sigma(), "0").unwrap()
            }
        );

        let inst = unary("a a", "a", "0 +", Variant::Plain);
        let res = solve(&inst, &SolveOptions::new(10)).unwrap();
        assert_eq!(res.outcome, SolveOutcome::NoneUpTo { max_len: 10 });
    }

    #[test]
    fn solve_returns_length_lex_least() {
        // two-letter sigma where "1" is a solution but "0" is not
        let sigma = Alphabet::new(["0", "1"]).unwrap();
        let gamma = Alphabet::new(["a"]).unwrap();
        let u = Morphism::new(
            &sigma,
            &gamma,
            vec![
                Word::parse(&gamma, "a a").unwrap(),
                Word::parse(&gamma, "a").unwrap(),
            ],
        )
        .unwrap();
        let v = Morphism::new(
            &sigma,
            &gamma,
            vec![
                Word::parse(&gamma, "a").unwrap(),
                Word::parse(&gamma, "a").unwrap(),
            ],
        )
        .unwrap();
        let inst = PepInstance::new(
            Variant::Plain,
            &sigma,
            &gamma,
            u,
            v,
            Dfa::universal(&sigma),
            crate::instance::SuffixConstraint::none(&sigma),
        )
        .unwrap();
        let res = solve(&inst, &SolveOptions::new(4)).unwrap();
        // ε is a solution (empty in R = Σ*), which is least of all
        assert_eq!(
            res.outcome,
            SolveOutcome::Found {
                witness: Word::empty(inst.sigma())
            }
        );
    }

    #[test]
    fn budget_exceeded_is_distinct() {
        let inst = unary("a a", "a", "0 +", Variant::Plain);
        let mut opts = SolveOptions::new(12);
        opts.node_budget = 5;
        match solve(&inst, &opts) {
            Err(SolveError::BudgetExceeded { explored }) => assert!(explored > 5),
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn short_bound_toy_example() {
        // |Γ| = 1, K_u = 1, one-state R and R': 2·H(2,1,1) = 4
        let inst = unary("a", "a", "0 *", Variant::Plain);
        assert_eq!(short_bound(&inst, 4096, 100_000), Some(4));
    }

    #[test]
    fn none_certified_on_toy_instance() {
        // u(0) = a, v(0) = ε over R = 0+: no solutions. R's monoid has two
        // elements, so the bound is 2·H(3,1,1) = 12, within a max_len of 12.
        let inst = unary("a", "", "0 +", Variant::Plain);
        let res = solve(&inst, &SolveOptions::new(12)).unwrap();
        assert_eq!(res.outcome, SolveOutcome::NoneCertified { bound: 12 });
        // one short of the bound, the verdict honestly stays bounded
        let res = solve(&inst, &SolveOptions::new(11)).unwrap();
        assert_eq!(res.outcome, SolveOutcome::NoneUpTo { max_len: 11 });
    }

    #[test]
    fn short_bound_unavailable_for_coanddir() {
        let inst = unary("a", "a", "0 *", Variant::CoAndDir);
        assert_eq!(short_bound(&inst, 4096, 100_000), None);
    }

    #[test]
    fn count_infinite_with_certificate() {
        let inst = unary("a", "a", "0 +", Variant::CodirPartial);
        let res = count(&inst, &SolveOptions::new(6)).unwrap();
        match res.outcome {
            CountOutcome::Infinite(witness) => {
                assert!(!witness.mirrored);
                // the certificate re-verifies for larger exponents
                let colored = color_indices(&inst, &witness.solution);
                for k in 2..=4 {
                    let pumped =
                        pump(&inst, &colored, witness.certificate.a, witness.certificate.b, k)
                            .unwrap();
                    assert!(inst.check_solution(&pumped).is_solution());
                }
            }
            other => panic!("expected infinite, got {other:?}"),
        }
    }

    #[test]
    fn count_zero_solutions() {
        // the stripped constraint counts lengths, so its monoid always
        // outgrows the explored range: the verdict stays a lower bound
        let inst = unary("a", "", "0 +", Variant::Plain);
        let res = count(&inst, &SolveOptions::new(4)).unwrap();
        match res.outcome {
            CountOutcome::FiniteAtLeast { count } => assert_eq!(count, 0),
            other => panic!("expected finite-at-least 0, got {other:?}"),
        }
    }

    #[test]
    fn count_exact_on_finite_language() {
        let inst = unary("a", "a", "0", Variant::Plain);
        let res = count(&inst, &SolveOptions::new(4)).unwrap();
        match res.outcome {
            CountOutcome::Exact {
                count,
                justification: ExactJustification::StrippedLanguageEmpty,
            } => assert_eq!(count, 1),
            other => panic!("expected exact 1, got {other:?}"),
        }
    }

    #[test]
    fn infinite_check_finds_certificates() {
        let inst = unary("a", "a a", "0 *", Variant::Plain);
        let witness = infinite_check(&inst, &SolveOptions::new(4))
            .unwrap()
            .expect("pumpable");
        let colored = color_indices(&inst, &witness.solution);
        let pumped = pump(
            &inst,
            &colored,
            witness.certificate.a,
            witness.certificate.b,
            5,
        )
        .unwrap();
        assert!(inst.check_solution(&pumped).is_solution());

        // finite R admits no pumping
        let inst = unary("a", "a a", "0 | 0 0", Variant::Plain);
        assert!(infinite_check(&inst, &SolveOptions::new(4)).unwrap().is_none());
    }

    #[test]
    fn dir_instances_count_via_mirroring() {
        // u(0) = a, v(0) = aa asymmetric under prefixes: dir instance still
        // counts correctly through the mirror
        let inst = unary("a", "a a", "0 +", Variant::DirPartial);
        let res = count(&inst, &SolveOptions::new(5)).unwrap();
        match res.outcome {
            CountOutcome::Infinite(witness) => {
                assert!(witness.mirrored);
                assert!(inst.check_solution(&witness.solution).is_solution());
            }
            other => panic!("expected infinite, got {other:?}"),
        }
    }

    #[test]
    fn solve_agrees_with_brute_force_spot_check() {
        let sigma = Alphabet::new(["0", "1"]).unwrap();
        let gamma = Alphabet::new(["a", "b"]).unwrap();
        let mk = |a: &str, b: &str| {
            Morphism::new(
                &sigma,
                &gamma,
                vec![Word::parse(&gamma, a).unwrap(), Word::parse(&gamma, b).unwrap()],
            )
            .unwrap()
        };
        for variant in [
            Variant::Plain,
            Variant::DirPartial,
            Variant::CodirPartial,
            Variant::CoAndDir,
        ] {
            let inst = PepInstance::new(
                variant,
                &sigma,
                &gamma,
                mk("a", "b a"),
                mk("a b", "b"),
                Regex::parse("( 0 | 1 ) *", &sigma)
                    .unwrap()
                    .to_nfa()
                    .determinize(),
                crate::instance::SuffixConstraint::Regular(
                    Regex::parse("1 ( 0 | 1 ) *", &sigma)
                        .unwrap()
                        .to_nfa()
                        .determinize(),
                ),
            )
            .unwrap();
            let brute: Option<Word> = Dfa::universal(&sigma)
                .enumerate(6)
                .find(|w| inst.check_solution(w).is_solution());
            let res = solve(&inst, &SolveOptions::new(6)).unwrap();
            match (brute, res.outcome) {
                (Some(w), SolveOutcome::Found { witness }) => {
                    assert_eq!(w, witness, "variant {variant}")
                }
                (None, SolveOutcome::NoneUpTo { .. }) | (None, SolveOutcome::NoneCertified { .. }) => {}
                (b, o) => panic!("variant {variant}: brute {b:?} vs solve {o:?}"),
            }
        }
    }
}
