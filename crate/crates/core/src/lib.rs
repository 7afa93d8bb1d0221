//! Post embedding problems with partial directness or codirectness.
//!
//! The crate is organised around a small stack of layers:
//!
//! * [`words`] — words over finite alphabets, the scattered-subword
//!   (embedding) order and its residual operations;
//! * [`automata`] — regexes, NFAs, DFAs, suffix-language transforms and
//!   transformation-monoid signatures for the regular constraint sets;
//! * [`instance`], [`margins`], [`cutting`] — problem instances, solution
//!   checking for all variants, blue/red index colouring, margin words, and
//!   the cutting/pumping rules built on them;
//! * [`solver`] — bounded-complete existence search, solution counting and
//!   certified infinity checks;
//! * [`universal`] — universal ("every word of R is a solution") variants
//!   and their reduction machinery;
//! * [`reductions`] — encoders from Post's correspondence problem and from
//!   length-preserving string rewriting, with decoders and an independent
//!   reachability oracle;
//! * [`higman`] — controlled bad sequences and the length function for the
//!   subword well-quasi-order.

pub mod automata;
pub mod cutting;
pub mod higman;
pub mod instance;
pub mod margins;
pub mod reductions;
pub mod solver;
pub mod universal;
pub mod words;

pub use automata::{Dfa, Nfa, Regex, Signature};
pub use cutting::{cut, find_cut_pair, find_pump_pair, minimize_solution, pump};
pub use cutting::{CutCertificate, PumpCertificate};
pub use instance::{Morphism, PepInstance, SuffixConstraint, Variant, Verdict};
pub use margins::{color_indices, Color, ColoredSolution};
pub use solver::{count, infinite_check, solve, SolveOptions, SolveOutcome};
pub use words::{Alphabet, Symbol, Word};
