//! Extends automorphisms of a subquadrangle to the ambient quadrangle.

use gqcov::automorphisms::{automorphism_group, extend_automorphism, generator_permutations, ExtensionMode, Permutation, DEFAULT_BUDGET};
use gqcov::constructions::{build_q4_with_q3, build_q5_with_q4};

fn main() -> gqcov::Result<()> {
    let (_, emb) = build_q5_with_q4(2)?;
    let id = Permutation::identity(emb.structure());
    let rep = extend_automorphism(&emb, &id, ExtensionMode::FindAll, DEFAULT_BUDGET)?;
    println!("identity of Q(4,2): {} extensions to Q(5,2), kernel of order {}", rep.extensions.len(), rep.kernel_order);

    for s in 2..=4 {
        let (_, emb) = build_q4_with_q3(s)?;
        let group = automorphism_group(emb.structure(), DEFAULT_BUDGET)?;
        let gens = generator_permutations(&group, emb.structure());
        let mut counts = Vec::new();
        for g in &gens {
            counts.push(extend_automorphism(&emb, g, ExtensionMode::FindAll, DEFAULT_BUDGET)?.extensions.len());
        }
        println!("grid({s}) in Q(4,{s}): extensions per generator {counts:?}");
    }
    Ok(())
}
