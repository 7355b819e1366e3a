//! Subquadrangles of order (q, q) through the line `[∞]` of a quadrangle of order
//! (q, q²), classified by how their subtended ovoids are subtended.
//!
//! Seeds: fix a line `K₀` missing `[∞]`. Every such subquadrangle meets `K₀` in a point
//! `k`, and contains a line `M ∋ k` missing `[∞]`, hence the grid spanned by `[∞]` and
//! `M`, hence a further line through any grid point. Closing `[∞] ∪ M ∪ K` over all
//! those choices therefore reaches every subquadrangle.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incidence::{GQOrder, IncidenceStructure};
use crate::subgeometry::SubGeometryEmbedding;
use crate::subtension::{theta_census, ThetaCensus};

/// Outcome of closing a seed under "all points of a line" and "the line on two collinear points".
#[derive(Clone, Debug)]
pub enum SpanClosure {
    Proper(SubGeometryEmbedding),
    Everything,
    /// The closure grew past the point limit before it stabilized.
    Exceeded { limit: usize },
}

impl SpanClosure {
    pub fn proper(self) -> Option<SubGeometryEmbedding> {
        match self {
            SpanClosure::Proper(e) => Some(e),
            _ => None,
        }
    }
}

struct Closer<'a> {
    g: &'a IncidenceStructure,
    points: FixedBitSet,
    lines: FixedBitSet,
    queue: Vec<usize>,
}

impl<'a> Closer<'a> {
    fn new(g: &'a IncidenceStructure) -> Self {
        Closer { g, points: FixedBitSet::with_capacity(g.point_count()), lines: FixedBitSet::with_capacity(g.line_count()), queue: Vec::new() }
    }

    fn add_point(&mut self, p: usize) {
        if !self.points.put(p) {
            self.queue.push(p);
        }
    }

    fn add_line(&mut self, l: usize) {
        if !self.lines.put(l) {
            for &p in self.g.line(l) {
                self.add_point(p as usize);
            }
        }
    }

    /// Runs to a fixed point, giving up once more than `limit` points are present.
    fn close(&mut self, limit: usize) -> bool {
        while let Some(p) = self.queue.pop() {
            if self.points.count_ones(..) > limit {
                return false;
            }
            let mut seen = self.g.perp_bits(p).clone();
            seen.intersect_with(&self.points);
            for r in seen.ones() {
                if r != p {
                    let l = self.g.line_through(p, r).expect("collinear points share a line");
                    self.add_line(l);
                }
            }
        }
        self.points.count_ones(..) <= limit
    }
}

/// The smallest full, line-closed subgeometry containing the seed points and lines.
pub fn span_closure(g: &Arc<IncidenceStructure>, points: &[usize], lines: &[usize], limit: Option<usize>) -> Result<SpanClosure> {
    let mut c = Closer::new(g);
    for &p in points {
        g.ensure_point(p)?;
        c.add_point(p);
    }
    for &l in lines {
        if l >= g.line_count() {
            return Err(Error::input(format!("line {l} out of range")));
        }
        c.add_line(l);
    }
    let limit = limit.unwrap_or(g.point_count());
    if !c.close(limit) {
        return Ok(SpanClosure::Exceeded { limit });
    }
    if c.points.count_ones(..) == g.point_count() {
        return Ok(SpanClosure::Everything);
    }
    let pts: Vec<usize> = c.points.ones().collect();
    let lns: Vec<usize> = c.lines.ones().collect();
    Ok(SpanClosure::Proper(SubGeometryEmbedding::induced(g.clone(), &pts, &lns)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OrbitLabel {
    Omega1,
    Omega2,
}

#[derive(Clone, Debug)]
pub struct SubGQRecord {
    pub embedding: SubGeometryEmbedding,
    pub census: ThetaCensus,
    pub doubly_subtended: bool,
    pub one_subtended_ovoid_count: usize,
    pub orbit_label: OrbitLabel,
}

impl SubGQRecord {
    pub fn new(embedding: SubGeometryEmbedding) -> Result<SubGQRecord> {
        let census = theta_census(&embedding)?;
        let doubly_subtended = census.uniform == Some(2);
        let one_subtended_ovoid_count = census.counts.get(&1).copied().unwrap_or(0);
        let orbit_label = if doubly_subtended { OrbitLabel::Omega1 } else { OrbitLabel::Omega2 };
        Ok(SubGQRecord { embedding, census, doubly_subtended, one_subtended_ovoid_count, orbit_label })
    }

    pub fn summary(&self) -> SubGQSummary {
        SubGQSummary {
            points: self.embedding.points().to_vec(),
            theta_counts: self.census.counts.clone(),
            doubly_subtended: self.doubly_subtended,
            one_subtended_ovoid_count: self.one_subtended_ovoid_count,
            orbit_label: self.orbit_label,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubGQSummary {
    pub points: Vec<usize>,
    pub theta_counts: BTreeMap<usize, usize>,
    pub doubly_subtended: bool,
    pub one_subtended_ovoid_count: usize,
    pub orbit_label: OrbitLabel,
}

#[derive(Clone, Debug, Default)]
pub struct EnumerationOptions {
    /// Directory for resumable progress; nothing is persisted when absent.
    pub checkpoint: Option<PathBuf>,
    pub threads: Option<usize>,
    /// Stop after this many seed closures, returning a partial result.
    pub closure_budget: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub records: Vec<SubGQRecord>,
    /// False when the seed budget ran out first; counts are then not authoritative.
    pub complete: bool,
    pub closures: u64,
    pub expected_total: usize,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct Checkpoint {
    geometry: String,
    point_count: usize,
    line_count: usize,
    infinity_line: usize,
    next_seed: usize,
    closures: u64,
    found: Vec<Vec<u32>>,
}

fn checkpoint_path(dir: &Path) -> PathBuf {
    dir.join("kk-census.checkpoint.json")
}

fn load_checkpoint(dir: &Path, fresh: &Checkpoint) -> Result<Checkpoint> {
    let path = checkpoint_path(dir);
    if !path.exists() {
        return Ok(fresh.clone());
    }
    let cp: Checkpoint = serde_json::from_slice(&fs::read(&path)?)?;
    let same = cp.geometry == fresh.geometry && cp.point_count == fresh.point_count && cp.line_count == fresh.line_count && cp.infinity_line == fresh.infinity_line;
    if !same {
        return Err(Error::input(format!("{} belongs to a different geometry", path.display())));
    }
    Ok(cp)
}

/// Writes to a sibling file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

struct Seeds {
    /// Lines `M` missing `[∞]` through a point of `K₀`.
    ms: Vec<usize>,
}

fn seeds(g: &IncidenceStructure, infinity: usize) -> Result<Seeds> {
    let inf = g.line(infinity);
    let misses = |l: usize| g.line(l).iter().all(|p| inf.binary_search(p).is_err());
    let k0 = (0..g.line_count()).find(|&l| misses(l)).ok_or_else(|| Error::hypothesis("every line meets [∞]"))?;
    let mut ms = BTreeSet::new();
    for &k in g.line(k0) {
        for &m in g.lines_through(k as usize) {
            if misses(m as usize) {
                ms.insert(m as usize);
            }
        }
    }
    Ok(Seeds { ms: ms.into_iter().collect() })
}

/// All subquadrangles of order `(s, s)` through `[∞]` reached from one line `M`.
fn explore(g: &IncidenceStructure, infinity: usize, m: usize, target: usize, closures: &mut u64) -> Vec<FixedBitSet> {
    let mut grid = Closer::new(g);
    grid.add_line(infinity);
    grid.add_line(m);
    if !grid.close(target) {
        return Vec::new();
    }
    let anchor = g.line(m)[0] as usize;
    let mut found: Vec<FixedBitSet> = Vec::new();
    for &k in g.lines_through(anchor) {
        let k = k as usize;
        if grid.lines.contains(k) || found.iter().any(|f| g.line(k).iter().all(|&p| f.contains(p as usize))) {
            continue;
        }
        *closures += 1;
        let mut c = Closer { g, points: grid.points.clone(), lines: grid.lines.clone(), queue: Vec::new() };
        c.add_line(k);
        if c.close(target) && c.points.count_ones(..) == target {
            found.push(c.points);
        }
    }
    found
}

pub fn enumerate_subgqs_through_line(g: &Arc<IncidenceStructure>, infinity: usize, opts: &EnumerationOptions) -> Result<Enumeration> {
    let order = g.verify_gq_axioms().map_err(|v| Error::hypothesis(format!("not a quadrangle: {v}")))?;
    if order.t != order.s * order.s {
        return Err(Error::hypothesis(format!("order {order:?} is not of the form (q, q²)")));
    }
    if infinity >= g.line_count() {
        return Err(Error::input(format!("line {infinity} out of range")));
    }
    let q = order.s;
    let sub = GQOrder::new(q, q);
    let target = sub.point_count();
    let seeds = seeds(g, infinity)?;

    let fresh = Checkpoint {
        geometry: g.name().to_string(),
        point_count: g.point_count(),
        line_count: g.line_count(),
        infinity_line: infinity,
        ..Checkpoint::default()
    };
    let mut cp = match &opts.checkpoint {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            load_checkpoint(dir, &fresh)?
        }
        None => fresh,
    };
    let mut found: BTreeSet<Vec<u32>> = cp.found.iter().cloned().collect();
    let threads = opts.threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1);
    let batch = 8 * threads;
    let mut complete = true;

    while cp.next_seed < seeds.ms.len() {
        if opts.closure_budget.is_some_and(|b| cp.closures >= b) {
            complete = false;
            break;
        }
        let end = (cp.next_seed + batch).min(seeds.ms.len());
        let work = &seeds.ms[cp.next_seed..end];
        let results: Mutex<Vec<(Vec<FixedBitSet>, u64)>> = Mutex::new(Vec::new());
        std::thread::scope(|scope| {
            for chunk in work.chunks(work.len().div_ceil(threads)) {
                let results = &results;
                let g: &IncidenceStructure = g;
                scope.spawn(move || {
                    for &m in chunk {
                        let mut n = 0;
                        let sets = explore(g, infinity, m, target, &mut n);
                        results.lock().expect("no worker panicked").push((sets, n));
                    }
                });
            }
        });
        for (sets, n) in results.into_inner().expect("no worker panicked") {
            cp.closures += n;
            for s in sets {
                found.insert(s.ones().map(|p| p as u32).collect());
            }
        }
        cp.next_seed = end;
        if let Some(dir) = &opts.checkpoint {
            cp.found = found.iter().cloned().collect();
            write_atomic(&checkpoint_path(dir), &serde_json::to_vec(&cp)?)?;
        }
    }

    let sets: Vec<Vec<u32>> = found.into_iter().collect();
    let records: Mutex<Vec<(usize, Result<SubGQRecord>)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        let per = sets.len().div_ceil(threads).max(1);
        for (c, chunk) in sets.chunks(per).enumerate() {
            let records = &records;
            scope.spawn(move || {
                for (i, pts) in chunk.iter().enumerate() {
                    let rec = SubGeometryEmbedding::full_on_points(g.clone(), |p| pts.binary_search(&(p as u32)).is_ok()).and_then(|emb| {
                        if emb.sub_order() != Some(sub) || !emb.contains_line(infinity) {
                            return Err(Error::consistency(format!("closure {} is not a subquadrangle of order {sub:?} through [∞]", c * per + i)));
                        }
                        SubGQRecord::new(emb)
                    });
                    records.lock().expect("no worker panicked").push((c * per + i, rec));
                }
            });
        }
    });
    let mut records = records.into_inner().expect("no worker panicked");
    records.sort_by_key(|(i, _)| *i);
    let records = records.into_iter().map(|(_, r)| r).collect::<Result<Vec<_>>>()?;
    Ok(Enumeration { records, complete, closures: cp.closures, expected_total: q * q * q + q * q })
}

/// Schema of the `kk-census` report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub total: usize,
    pub omega1: usize,
    pub omega2: usize,
    pub one_subtended_per_omega2: Vec<usize>,
}

impl OrbitReport {
    /// Compares against `q³ + q²`, `2q²`, `(q-1)q²` and `(q+1)q²(q-1)`.
    pub fn check(&self, q: usize) -> Result<()> {
        let q2 = q * q;
        let want = (q2 * q + q2, 2 * q2, (q - 1) * q2, (q + 1) * q2 * (q - 1));
        if (self.total, self.omega1, self.omega2) != (want.0, want.1, want.2) {
            return Err(Error::consistency(format!(
                "found {} subquadrangles ({} doubly subtended, {} not), expected {} ({}, {})",
                self.total, self.omega1, self.omega2, want.0, want.1, want.2
            )));
        }
        if let Some(bad) = self.one_subtended_per_omega2.iter().find(|&&n| n != want.3) {
            return Err(Error::consistency(format!("a subquadrangle has {bad} one-subtended ovoids, expected {}", want.3)));
        }
        Ok(())
    }
}

pub fn census_report(records: &[SubGQRecord]) -> Result<OrbitReport> {
    for r in records {
        if let Some(th) = r.census.counts.keys().find(|&&th| th != 1 && th != 2) {
            return Err(Error::consistency(format!("an ovoid is {th}-subtended")));
        }
    }
    let omega1 = records.iter().filter(|r| r.orbit_label == OrbitLabel::Omega1).count();
    Ok(OrbitReport {
        total: records.len(),
        omega1,
        omega2: records.len() - omega1,
        one_subtended_per_omega2: records.iter().filter(|r| r.orbit_label == OrbitLabel::Omega2).map(|r| r.one_subtended_ovoid_count).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_kantor_knuth, build_q5_with_q4, QClanSpec};
    use crate::field::Field;

    #[test]
    fn single_line_closes_to_itself() {
        let (g, _) = build_q5_with_q4(2).unwrap();
        let emb = span_closure(&g, &[], &[0], None).unwrap().proper().unwrap();
        assert_eq!(emb.points().len(), 3);
        assert_eq!(emb.sub_order(), None);
    }

    #[test]
    fn hyperplane_section_is_closed() {
        let (g, emb) = build_q5_with_q4(2).unwrap();
        let c = span_closure(&g, emb.points(), &[], None).unwrap().proper().unwrap();
        assert_eq!(c.points(), emb.points());
        assert_eq!(c.lines(), emb.lines());
    }

    #[test]
    fn two_skew_lines_close_to_a_grid() {
        let (g, _) = build_q5_with_q4(3).unwrap();
        let m = (0..g.line_count()).find(|&m| g.line(m).iter().all(|p| g.line(0).binary_search(p).is_err())).unwrap();
        let emb = span_closure(&g, &[], &[0, m], None).unwrap().proper().unwrap();
        assert_eq!(emb.points().len(), 16);
        assert_eq!(emb.sub_order(), Some(GQOrder::new(3, 1)));
    }

    #[test]
    fn limit_is_reported() {
        let (g, emb) = build_q5_with_q4(2).unwrap();
        let x = emb.external_points()[0];
        // x and a line of S' close to two concurrent lines
        let two = span_closure(&g, &[x], &[emb.lines()[0]], None).unwrap().proper().unwrap();
        assert_eq!(two.points().len(), 5);
        let r = span_closure(&g, &[x], &[emb.lines()[0]], Some(4)).unwrap();
        assert!(matches!(r, SpanClosure::Exceeded { limit: 4 }));
    }

    #[test]
    fn classical_q3_census_is_all_doubly_subtended() {
        let f = Field::new(3).unwrap();
        let kk = build_kantor_knuth(&QClanSpec { q: 3, sigma: 1, m: f.first_nonsquare().unwrap() }).unwrap();
        let g = Arc::new(kk.geometry);
        let e = enumerate_subgqs_through_line(&g, kk.infinity_line, &EnumerationOptions::default()).unwrap();
        assert!(e.complete);
        let report = census_report(&e.records).unwrap();
        assert_eq!(report.total, 36);
        assert_eq!(report.omega1, 36);
        assert!(report.check(3).is_err());
    }

    #[test]
    fn checkpoint_resumes() {
        let f = Field::new(3).unwrap();
        let kk = build_kantor_knuth(&QClanSpec { q: 3, sigma: 1, m: f.first_nonsquare().unwrap() }).unwrap();
        let g = Arc::new(kk.geometry);
        let dir = tempfile::tempdir().unwrap();
        let partial = EnumerationOptions { checkpoint: Some(dir.path().to_path_buf()), threads: Some(1), closure_budget: Some(1) };
        let first = enumerate_subgqs_through_line(&g, kk.infinity_line, &partial).unwrap();
        assert!(!first.complete);
        let rest = EnumerationOptions { checkpoint: Some(dir.path().to_path_buf()), threads: Some(2), closure_budget: None };
        let second = enumerate_subgqs_through_line(&g, kk.infinity_line, &rest).unwrap();
        assert!(second.complete);
        assert_eq!(second.records.len(), 36);
    }
}
