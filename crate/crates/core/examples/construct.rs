//! Builds the classical quadrangles with their distinguished subquadrangles, checks the
//! axioms and writes one of them in the JSON interchange format.
//!
//! ```text
//! cargo run --example construct -- /tmp/q5q4-2.json
//! ```

use gqcov::constructions::{build_family, Family};
use gqcov::io::{write_embedding, write_geometry};

fn main() -> gqcov::Result<()> {
    let cases = [(Family::Q5q4, 2), (Family::Q5q4, 3), (Family::Q4q3, 3), (Family::H4h3, 2), (Family::W, 3), (Family::Kk, 3)];
    for (family, q) in cases {
        let built = build_family(family, q, None)?;
        let g = &built.geometry;
        let order = g.verify_gq_axioms().map_err(|v| gqcov::Error::consistency(v.to_string()))?;
        print!("{:<12} {:>5} points {:>5} lines  order ({},{})", g.name(), g.point_count(), g.line_count(), order.s, order.t);
        if let Some(e) = &built.embedding {
            let sub = e.sub_order().expect("subquadrangle");
            print!("  section {}/{} of order ({},{})", e.points().len(), e.lines().len(), sub.s, sub.t);
        }
        if let Some(classical) = built.classical {
            print!("  classical: {classical}");
        }
        println!();
    }

    if let Some(path) = std::env::args().nth(1).map(std::path::PathBuf::from) {
        let built = build_family(Family::Q5q4, 2, None)?;
        write_geometry(&path, &built.geometry)?;
        let companion = path.with_extension("embedding.json");
        write_embedding(&companion, built.embedding.as_ref().expect("Q(4,2) section"))?;
        println!("wrote {} and {}", path.display(), companion.display());
    }
    Ok(())
}
