//! Samples W-sets and tests whether they lie in a plane.
//!
//! ```text
//! cargo run --example condition_c -- 7
//! ```

use std::collections::BTreeMap;

use gqcov::constructions::{build_h4_with_h3, build_q5_with_q4};
use gqcov::covers::{condition_c_instances, condition_c_planarity, Reading};
use gqcov::subtension::build_derived_pair;

fn main() -> gqcov::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    for (name, emb) in [("Q(5,2)/Q(4,2)", build_q5_with_q4(2)?.1), ("H(4,4)/H(3,4)", build_h4_with_h3(2)?.1)] {
        let pair = build_derived_pair(&emb)?;
        for reading in [Reading::Configuration, Reading::Literal] {
            let mut tally: BTreeMap<(bool, usize, bool), usize> = BTreeMap::new();
            for inst in condition_c_instances(&pair, 100, seed, reading, 1_000_000)? {
                let key = (inst.m_set.len() > 1, inst.w.len(), condition_c_planarity(&pair, &inst)?);
                *tally.entry(key).or_insert(0) += 1;
            }
            println!("{name} {reading:?} (seed {seed}):");
            for ((multi, size, planar), n) in tally {
                println!("  |M| {}  |W| = {size}  coplanar {planar:<5}  x{n}", if multi { "> 1" } else { "= 1" });
            }
        }
    }
    Ok(())
}
