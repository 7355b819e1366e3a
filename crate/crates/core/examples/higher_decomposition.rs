//! Lifts automorphisms of ℰ to the ambient quadrangle, so that every cover α ∘ π is also
//! π ∘ α̃.

use gqcov::automorphisms::{automorphism_group, decompose_higher, generator_permutations, higher_decomposition_check, DEFAULT_BUDGET};
use gqcov::constructions::build_q5_with_q4;
use gqcov::subtension::build_derived_pair;
use gqcov::suites::lift_matches;

fn main() -> gqcov::Result<()> {
    for q in [2, 3] {
        let (_, emb) = build_q5_with_q4(q)?;
        let pair = build_derived_pair(&emb)?;
        let rep = higher_decomposition_check(&pair, DEFAULT_BUDGET)?;
        println!("q = {q}: |Aut(E)| = {}, {} of {} generators lift", rep.aut_e_order, rep.induced, rep.generators);

        let aut = automorphism_group(&pair.e, DEFAULT_BUDGET)?;
        let gens = generator_permutations(&aut, &pair.e);
        let alpha = gens[0].then(&gens[gens.len() - 1]);
        let gamma = pair.require_cover()?.then_automorphism(&alpha);
        let lift = decompose_higher(&pair, &gamma, DEFAULT_BUDGET)?.expect("Q(5,q)/Q(4,q) has the higher decomposition property");
        println!("  γ = α ∘ π for a product of two generators: π ∘ α̃ = γ holds elementwise: {}", lift_matches(&pair, &lift, &gamma)?);
    }
    Ok(())
}
