//! Measures the semipartial geometry parameters of ℰ and compares them with the values the
//! subquadrangle predicts.

use gqcov::constructions::{build_h4_with_h3, build_q5_with_q3, build_q5_with_q4};
use gqcov::spg::{hypothesis_gate, verify_spg};
use gqcov::subtension::{build_derived_pair, theta_census};

fn main() -> gqcov::Result<()> {
    let cases = [("Q(5,2)/Q(4,2)", build_q5_with_q4(2)?.1), ("Q(5,3)/Q(4,3)", build_q5_with_q4(3)?.1), ("H(4,4)/H(3,4)", build_h4_with_h3(2)?.1)];
    for (name, emb) in cases {
        let pair = build_derived_pair(&emb)?;
        let gate = hypothesis_gate(&emb, &pair.census)?;
        match verify_spg(&pair.e, gate.predicted()) {
            Ok(m) => println!("{name}: measured {m}, predicted {}", gate.predicted().expect("uniform θ")),
            Err(f) => println!("{name}: {f}"),
        }
    }
    let (_, emb) = build_q5_with_q3(3)?;
    let gate = hypothesis_gate(&emb, &theta_census(&emb)?)?;
    println!("Q(5,3)/Q(3,3): gate passes: {}", gate.passes());
    Ok(())
}
