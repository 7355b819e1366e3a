//! Automorphism groups: the full group of Q(5,2), the stabilizer of its Q(4,2) section, the
//! kernel, and Aut(ℰ) computed two ways.

use gqcov::automorphisms::{
    aut_e_two_ways, automorphism_group, elementwise_kernel, induced_on_e, subgeometry_stabilizer, DEFAULT_BUDGET,
};
use gqcov::constructions::{build_grid, build_q5_with_q4};
use gqcov::subtension::build_derived_pair;

fn main() -> gqcov::Result<()> {
    for s in 2..=4 {
        println!("|Aut(grid({s}))| = {}", automorphism_group(&build_grid(s)?, DEFAULT_BUDGET)?.order());
    }
    for q in [2, 3] {
        let (g, emb) = build_q5_with_q4(q)?;
        let full = automorphism_group(&g, DEFAULT_BUDGET)?;
        let stab = subgeometry_stabilizer(&emb, DEFAULT_BUDGET)?;
        let kernel = elementwise_kernel(&emb, DEFAULT_BUDGET)?;
        let pair = build_derived_pair(&emb)?;
        let on_e = induced_on_e(&stab, &pair, &kernel)?;
        let brown = aut_e_two_ways(&pair, DEFAULT_BUDGET)?;
        println!(
            "Q(5,{q}): |Aut| = {}, stabilizer of Q(4,{q}) {}, kernel {}, induced on E {}, |Aut(E)| = {} (equal as groups: {})",
            full.order(),
            stab.order(),
            kernel.order(),
            on_e.induced_order,
            brown.direct_order,
            brown.equal
        );
    }
    Ok(())
}
