//! Rebuilds the ambient quadrangle χ from a cover of ℰ and identifies χ' with the
//! subquadrangle.

use gqcov::automorphisms::{find_isomorphism, DEFAULT_BUDGET};
use gqcov::constructions::build_q5_with_q4;
use gqcov::covers::{identify_chi_prime, reconstruct_chi};
use gqcov::subtension::build_derived_pair;

fn main() -> gqcov::Result<()> {
    for q in [2, 3] {
        let (_, emb) = build_q5_with_q4(q)?;
        let pair = build_derived_pair(&emb)?;
        let rec = reconstruct_chi(&pair, &pair.a, pair.require_cover()?)?;
        let iso = find_isomorphism(&rec.chi, pair.ambient(), DEFAULT_BUDGET)?.is_some();
        identify_chi_prime(&rec, &pair)?;
        println!(
            "q = {q}: χ has {} points, order ({},{}), isomorphic to Q(5,{q}): {iso}; χ' identified with Q(4,{q})",
            rec.chi.point_count(),
            rec.order.s,
            rec.order.t
        );
    }
    Ok(())
}
