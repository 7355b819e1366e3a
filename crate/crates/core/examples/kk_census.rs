//! Enumerates the subquadrangles of order (q,q) through [∞] of a Kantor-Knuth quadrangle and
//! sorts them by how their ovoids are subtended. The default q = 3 is classical and quick;
//! q = 9 takes several minutes and can resume from a checkpoint directory.
//!
//! ```text
//! cargo run --release --example kk_census -- 9 /tmp/kk-checkpoint
//! ```

use std::collections::BTreeMap;

use gqcov::constructions::{build_family, Family};
use gqcov::kk_census::{census_report, enumerate_subgqs_through_line, EnumerationOptions};

fn main() -> gqcov::Result<()> {
    let mut args = std::env::args().skip(1);
    let q: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let checkpoint = args.next().map(std::path::PathBuf::from);
    let built = build_family(Family::Kk, q, None)?;
    println!("{}: {} points, classical: {:?}", built.geometry.name(), built.geometry.point_count(), built.classical);
    let opts = EnumerationOptions { checkpoint, ..Default::default() };
    let en = enumerate_subgqs_through_line(&built.geometry, built.infinity_line.expect("[∞]"), &opts)?;
    let report = census_report(&en.records)?;
    let mut per: BTreeMap<usize, usize> = BTreeMap::new();
    for &n in &report.one_subtended_per_omega2 {
        *per.entry(n).or_insert(0) += 1;
    }
    println!("{} subquadrangles ({} doubly subtended, {} not); one-subtended ovoid counts {per:?}", report.total, report.omega1, report.omega2);
    if q == 9 {
        println!("matches the expected census: {}", report.check(q).is_ok());
    }
    Ok(())
}
