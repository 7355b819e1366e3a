//! Counts how many external points subtend each ovoid, for several embeddings, and builds
//! the geometries 𝒜 and ℰ for the doubly subtended ones.

use gqcov::constructions::{build_h4_with_h3, build_q4_with_q3, build_q5_with_q3, build_q5_with_q4};
use gqcov::subtension::{build_derived_pair, observation_pi_check, theta_census};

fn main() -> gqcov::Result<()> {
    let embeddings = [
        ("Q(4,2) in Q(5,2)", build_q5_with_q4(2)?.1),
        ("Q(4,3) in Q(5,3)", build_q5_with_q4(3)?.1),
        ("Q(3,3) in Q(5,3)", build_q5_with_q3(3)?.1),
        ("Q(3,3) in Q(4,3)", build_q4_with_q3(3)?.1),
        ("Q(3,4) in Q(4,4)", build_q4_with_q3(4)?.1),
        ("H(3,4) in H(4,4)", build_h4_with_h3(2)?.1),
    ];
    for (name, emb) in &embeddings {
        let census = theta_census(emb)?;
        println!("{name}: {} external points, {} subtended ovoids, θ counts {:?}", census.external_points, census.ovoid_count, census.counts);
    }

    let (_, emb) = build_q5_with_q4(3)?;
    let pair = build_derived_pair(&emb)?;
    let obs = observation_pi_check(&pair)?;
    println!(
        "Q(5,3)/Q(4,3): 𝒜 has {} points and {} lines, ℰ has {} points and {} lines, π is a cover: {}",
        pair.a.point_count(),
        pair.a.line_count(),
        pair.e.point_count(),
        pair.e.line_count(),
        pair.is_cover_certified()
    );
    println!("fibres of π are the classes of \"no common neighbour\": {}", obs.holds());
    Ok(())
}
