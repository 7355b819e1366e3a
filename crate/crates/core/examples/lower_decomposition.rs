//! Enumerates every cover 𝒜 → ℰ for Q(5,2)/Q(4,2), factorizes each as α ∘ π and checks the
//! connecting automorphism between two covers.

use gqcov::automorphisms::{automorphism_group, DEFAULT_BUDGET};
use gqcov::constructions::build_q5_with_q4;
use gqcov::covers::{enumerate_covers, factorize_lower, verify_initial_object, Orientation};
use gqcov::subtension::build_derived_pair;

fn main() -> gqcov::Result<()> {
    let (_, emb) = build_q5_with_q4(2)?;
    let pair = build_derived_pair(&emb)?;
    let covers = enumerate_covers(&pair.a, &pair.e, u64::MAX)?;
    let aut = automorphism_group(&pair.e, DEFAULT_BUDGET)?;
    println!("{} covers, |Aut(E)| = {}", covers.len(), aut.order());

    let mut forward = 0;
    for gamma in &covers {
        let f = factorize_lower(&pair, gamma)?;
        assert_eq!(pair.require_cover()?.then_automorphism(&f.alpha), *gamma);
        forward += usize::from(f.orientation == Orientation::Forward);
    }
    println!("every cover is α ∘ π; ζ is forward-oriented for {forward} of them");

    let (g1, g2) = (&covers[0], &covers[covers.len() - 1]);
    let delta = verify_initial_object(&pair, g1, g2)?;
    let back = verify_initial_object(&pair, g2, g1)?;
    println!("δ(γ,γ') moves {} points of E; δ(γ',γ) is its inverse: {}", delta.points.iter().enumerate().filter(|(i, &p)| *i != p).count(), back == delta.inverse());
    Ok(())
}
