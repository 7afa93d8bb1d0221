// probes criterion 5 iterations one by one
use pep::instance::Variant;
use pep::solver::{solve, SolveOptions};
#[path = "/root/crate/crates/core/tests/common/mod.rs"] mod common;
use common::*;

fn main() {
    let mut rng = rng(0xACC0_0005);
    let variants = [Variant::Plain, Variant::DirPartial, Variant::CodirPartial, Variant::CoAndDir];
    for i in 0..500usize {
        let inst = random_instance(&mut rng, variants[i % 4]);
        eprintln!("instance {i} variant {} sigma {} gamma {}", inst.variant(), inst.sigma().len(), inst.gamma().len());
        let brute = brute_solutions(&inst, 8, 1).into_iter().next();
        eprintln!("  brute done: {:?}", brute.as_ref().map(|w| w.to_string()));
        let res = solve(&inst, &SolveOptions::new(8)).expect("budget");
        eprintln!("  solve done: nodes {}", res.nodes);
    }
}
