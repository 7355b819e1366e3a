//! Subtended ovoids, rosettes, the θ-census, and the derived geometries 𝒜 and ℰ.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::covers::{verify_cover, CoverCertificate, GeometryMorphism};
use crate::error::{Error, Result};
use crate::incidence::{GQOrder, IncidenceStructure};
use crate::subgeometry::SubGeometryEmbedding;

/// `x^⊥ ∩ P'` for an external point `x`, with every external point subtending it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ovoid {
    /// Ambient point indices, ascending.
    pub points: Vec<usize>,
    /// Ambient external points `y` with `y^⊥ ∩ P' = points`, ascending.
    pub subtenders: Vec<usize>,
}

impl Ovoid {
    pub fn theta(&self) -> usize {
        self.subtenders.len()
    }
}

fn trace(emb: &SubGeometryEmbedding, x: usize) -> Vec<usize> {
    let mut bits: FixedBitSet = emb.ambient().perp_bits(x).clone();
    bits.intersect_with(emb.point_mask());
    bits.ones().collect()
}

/// Checks that `points` meets every line of the subgeometry exactly once.
pub fn is_ovoid_of(emb: &SubGeometryEmbedding, points: &[usize]) -> bool {
    let amb = emb.ambient();
    let mut inside = vec![false; amb.point_count()];
    for &p in points {
        inside[p] = true;
    }
    emb.lines().iter().all(|&l| amb.line(l).iter().filter(|&&p| inside[p as usize]).count() == 1)
}

/// The ovoid subtended by an external point, with its full subtender set.
pub fn subtended_ovoid(emb: &SubGeometryEmbedding, x: usize) -> Result<Ovoid> {
    emb.ambient().ensure_point(x)?;
    if emb.contains_point(x) {
        return Err(Error::input(format!("point {x} lies in the subquadrangle")));
    }
    let points = trace(emb, x);
    if !is_ovoid_of(emb, &points) {
        return Err(Error::consistency(format!("x^⊥ ∩ P' for x = {x} is not an ovoid")));
    }
    let subtenders = emb.external_points().into_iter().filter(|&y| trace(emb, y) == points).collect();
    Ok(Ovoid { points, subtenders })
}

/// All subtended ovoids of an embedding, in ascending order of point sets.
#[derive(Clone, Debug)]
pub struct SubtensionTable {
    pub ovoids: Vec<Ovoid>,
    /// Ovoid index for each ambient point; `None` on `P'`.
    pub ovoid_of: Vec<Option<usize>>,
}

impl SubtensionTable {
    pub fn new(emb: &SubGeometryEmbedding) -> Result<SubtensionTable> {
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for x in emb.external_points() {
            groups.entry(trace(emb, x)).or_default().push(x);
        }
        let mut ovoid_of = vec![None; emb.ambient().point_count()];
        let mut ovoids = Vec::with_capacity(groups.len());
        for (i, (points, subtenders)) in groups.into_iter().enumerate() {
            if !is_ovoid_of(emb, &points) {
                return Err(Error::consistency(format!("the trace of point {} is not an ovoid", subtenders[0])));
            }
            for &x in &subtenders {
                ovoid_of[x] = Some(i);
            }
            ovoids.push(Ovoid { points, subtenders });
        }
        Ok(SubtensionTable { ovoids, ovoid_of })
    }

    /// Index of the ovoid with this (sorted) point set.
    pub fn find(&self, points: &[usize]) -> Option<usize> {
        self.ovoids.binary_search_by(|o| o.points.as_slice().cmp(points)).ok()
    }
}

/// How many subtended ovoids have each subtender count θ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaCensus {
    pub counts: BTreeMap<usize, usize>,
    pub ovoid_count: usize,
    pub external_points: usize,
    /// The common θ when every ovoid has the same subtender count.
    pub uniform: Option<usize>,
}

impl ThetaCensus {
    fn from_table(emb: &SubGeometryEmbedding, table: &SubtensionTable) -> Result<ThetaCensus> {
        let mut counts = BTreeMap::new();
        for o in &table.ovoids {
            *counts.entry(o.theta()).or_insert(0) += 1;
        }
        let uniform = (counts.len() == 1).then(|| *counts.keys().next().unwrap());
        let external_points = emb.external_points().len();
        let accounted: usize = counts.iter().map(|(th, n)| th * n).sum();
        if accounted != external_points {
            return Err(Error::consistency(format!("θ-census accounts for {accounted} of {external_points} external points")));
        }
        if let (Some(amb), Some(sub)) = (emb.ambient_order(), emb.sub_order()) {
            if sub.s == amb.s {
                for &th in counts.keys() {
                    if (th - 1) * sub.t > amb.s {
                        return Err(Error::consistency(format!("θ = {th} with t' = {} exceeds (θ-1)t' <= s = {}", sub.t, amb.s)));
                    }
                }
            }
        }
        Ok(ThetaCensus { counts, ovoid_count: table.ovoids.len(), external_points, uniform })
    }
}

pub fn theta_census(emb: &SubGeometryEmbedding) -> Result<ThetaCensus> {
    ThetaCensus::from_table(emb, &SubtensionTable::new(emb)?)
}

fn orders(emb: &SubGeometryEmbedding) -> Result<(GQOrder, GQOrder)> {
    let amb = emb.ambient_order().ok_or_else(|| Error::hypothesis("ambient has no constant order"))?;
    let sub = emb.sub_order().ok_or_else(|| Error::hypothesis("subgeometry is not a quadrangle"))?;
    Ok((amb, sub))
}

/// Checks `t' ≠ 1`, `t = st'`, `(θ-1)t = s²` and uniform θ; returns θ.
pub fn lemma72_hypotheses(emb: &SubGeometryEmbedding, census: &ThetaCensus) -> Result<usize> {
    let (amb, sub) = orders(emb)?;
    let theta = census.uniform.ok_or_else(|| Error::hypothesis("θ is not uniform"))?;
    if sub.t == 1 {
        return Err(Error::hypothesis("t' = 1"));
    }
    if amb.t != amb.s * sub.t {
        return Err(Error::hypothesis(format!("t = {} differs from st' = {}", amb.t, amb.s * sub.t)));
    }
    if theta == 0 || (theta - 1) * amb.t != amb.s * amb.s {
        return Err(Error::hypothesis(format!("(θ-1)t = {} differs from s² = {}", theta.saturating_sub(1) * amb.t, amb.s * amb.s)));
    }
    Ok(theta)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lemma72Case {
    /// `x'` is collinear with no point of `O_x^⊥`.
    Detached,
    /// `x'` is collinear with some point of `O_x^⊥`.
    Attached,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma72Report {
    pub case: Lemma72Case,
    pub intersection: usize,
    pub expected: usize,
}

impl Lemma72Report {
    pub fn holds(&self) -> bool {
        self.intersection == self.expected
    }
}

fn lemma72_pair(emb: &SubGeometryEmbedding, table: &SubtensionTable, amb: GQOrder, x: usize, y: usize) -> Result<Lemma72Report> {
    let ox = &table.ovoids[table.ovoid_of[x].ok_or_else(|| Error::input(format!("point {x} is not external")))?];
    let oy = &table.ovoids[table.ovoid_of[y].ok_or_else(|| Error::input(format!("point {y} is not external")))?];
    // O_x^⊥ consists of the subtenders of O_x
    if ox.subtenders.binary_search(&y).is_ok() {
        return Err(Error::input(format!("point {y} lies in O_x^⊥")));
    }
    let g = emb.ambient();
    let attached = ox.subtenders.iter().any(|&z| g.collinear(y, z));
    let intersection = ox.points.iter().filter(|p| oy.points.binary_search(p).is_ok()).count();
    let (case, expected) = if attached { (Lemma72Case::Attached, 1) } else { (Lemma72Case::Detached, amb.t / amb.s + 1) };
    Ok(Lemma72Report { case, intersection, expected })
}

/// The intersection dichotomy for two external points.
pub fn lemma72_check(emb: &SubGeometryEmbedding, x: usize, y: usize) -> Result<Lemma72Report> {
    let table = SubtensionTable::new(emb)?;
    let census = ThetaCensus::from_table(emb, &table)?;
    lemma72_hypotheses(emb, &census)?;
    lemma72_pair(emb, &table, orders(emb)?.0, x, y)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma72Scan {
    pub detached_pairs: usize,
    pub attached_pairs: usize,
    pub failures: Vec<(usize, usize)>,
}

/// Runs the dichotomy over every ordered pair of external points with `x' ∉ O_x^⊥`.
pub fn lemma72_scan(emb: &SubGeometryEmbedding) -> Result<Lemma72Scan> {
    let table = SubtensionTable::new(emb)?;
    let census = ThetaCensus::from_table(emb, &table)?;
    lemma72_hypotheses(emb, &census)?;
    let amb = orders(emb)?.0;
    let ext = emb.external_points();
    let mut scan = Lemma72Scan::default();
    for &x in &ext {
        let ox = &table.ovoids[table.ovoid_of[x].unwrap()];
        for &y in &ext {
            if ox.subtenders.binary_search(&y).is_ok() {
                continue;
            }
            let r = lemma72_pair(emb, &table, amb, x, y)?;
            match r.case {
                Lemma72Case::Detached => scan.detached_pairs += 1,
                Lemma72Case::Attached => scan.attached_pairs += 1,
            }
            if !r.holds() {
                scan.failures.push((x, y));
            }
        }
    }
    Ok(scan)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialCaseReport {
    /// Histogram of `|z^⊥ ∩ (O_x ∪ S_x)|` over all ovoids and all `z ∉ O_x ∪ S_x`.
    pub histogram: BTreeMap<usize, usize>,
}

impl SpecialCaseReport {
    pub fn holds(&self) -> bool {
        self.histogram.keys().all(|&k| k == 2)
    }
}

/// For θ = s + 1 and t' = 1: every point off `O_x ∪ S_x` is collinear with exactly two of its points.
pub fn special_case_theta_s_plus_1(emb: &SubGeometryEmbedding) -> Result<SpecialCaseReport> {
    let (amb, sub) = orders(emb)?;
    let table = SubtensionTable::new(emb)?;
    let census = ThetaCensus::from_table(emb, &table)?;
    if sub.t != 1 || census.uniform != Some(amb.s + 1) {
        return Err(Error::hypothesis("needs t' = 1 and uniform θ = s + 1"));
    }
    let g = emb.ambient();
    let mut histogram = BTreeMap::new();
    for o in &table.ovoids {
        let mut set = FixedBitSet::with_capacity(g.point_count());
        for &p in o.points.iter().chain(&o.subtenders) {
            set.insert(p);
        }
        for z in (0..g.point_count()).filter(|&z| !set.contains(z)) {
            let c = g.perp_bits(z).intersection(&set).count();
            *histogram.entry(c).or_insert(0) += 1;
        }
    }
    Ok(SpecialCaseReport { histogram })
}

/// The ovoids of the external points on an ambient line meeting `P'` in one point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rosette {
    pub base_point: usize,
    /// Indices into the ovoid list, ascending.
    pub ovoids: Vec<usize>,
    /// Ambient lines `L` with `R_L` equal to this rosette, ascending.
    pub witness_lines: Vec<usize>,
}

/// Checks the rosette invariants: `s` members, pairwise meeting in the base point, and the
/// members minus the base point partitioning `P' ∖ z^⊥`.
pub fn check_rosette(emb: &SubGeometryEmbedding, ovoids: &[Ovoid], r: &Rosette) -> Result<()> {
    let (amb, _) = orders(emb)?;
    let fail = |m: String| Err(Error::consistency(format!("rosette at {}: {m}", r.base_point)));
    if r.ovoids.len() != amb.s {
        return fail(format!("{} ovoids instead of s = {}", r.ovoids.len(), amb.s));
    }
    let g = emb.ambient();
    let z = r.base_point;
    let mut cover = vec![0u32; g.point_count()];
    for &i in &r.ovoids {
        if ovoids[i].points.binary_search(&z).is_err() {
            return fail("a member misses the base point".into());
        }
        for &p in &ovoids[i].points {
            if p != z {
                cover[p] += 1;
            }
        }
    }
    for &p in emb.points() {
        let want = u32::from(!g.collinear(p, z));
        if cover[p] != want {
            return fail(format!("point {p} is covered {} times", cover[p]));
        }
    }
    Ok(())
}

/// The affine geometry 𝒜, the geometry ℰ of subtended ovoids and rosettes, and π.
#[derive(Clone, Debug)]
pub struct DerivedPair {
    pub embedding: SubGeometryEmbedding,
    /// Points are the external points, lines the ambient lines outside `L'` cut down to them.
    pub a: IncidenceStructure,
    /// Ambient index of each point of `a`.
    pub a_points: Vec<usize>,
    /// Ambient index of each line of `a`.
    pub a_lines: Vec<usize>,
    /// Points are the ovoids (same indices as `ovoids`), lines the rosettes.
    pub e: IncidenceStructure,
    pub ovoids: Vec<Ovoid>,
    /// Indexed like the lines of `e`.
    pub rosettes: Vec<Rosette>,
    pub census: ThetaCensus,
    /// π: x ↦ O_x, L ↦ R_L. Present when every line of 𝒜 has a foot.
    pub pi: Option<GeometryMorphism>,
    /// Present when π is a cover.
    pub pi_certificate: Option<CoverCertificate>,
}

impl DerivedPair {
    pub fn ambient(&self) -> &Arc<IncidenceStructure> {
        self.embedding.ambient()
    }

    pub fn order(&self) -> Result<(GQOrder, GQOrder)> {
        orders(&self.embedding)
    }

    /// Index in `e` of the ovoid with the given point set.
    pub fn ovoid_index(&self, points: &[usize]) -> Option<usize> {
        self.ovoids.binary_search_by(|o| o.points.as_slice().cmp(points)).ok()
    }

    /// Index of the point of `a` at an ambient external point.
    pub fn a_point(&self, ambient: usize) -> Option<usize> {
        self.a_points.binary_search(&ambient).ok()
    }

    pub fn is_cover_certified(&self) -> bool {
        self.pi_certificate.is_some()
    }

    pub fn require_cover(&self) -> Result<&GeometryMorphism> {
        match (&self.pi, &self.pi_certificate) {
            (Some(pi), Some(_)) => Ok(pi),
            _ => Err(Error::hypothesis("π is not a cover for this pair (the subquadrangle is not a geometric hyperplane)")),
        }
    }
}

pub fn build_derived_pair(emb: &SubGeometryEmbedding) -> Result<DerivedPair> {
    if !emb.flags().is_full {
        return Err(Error::hypothesis("the subgeometry is not full"));
    }
    let (amb, _) = orders(emb)?;
    if amb.s < 2 {
        return Err(Error::hypothesis("the ambient quadrangle is not thick"));
    }
    let g = emb.ambient();
    let table = SubtensionTable::new(emb)?;
    let census = ThetaCensus::from_table(emb, &table)?;

    let a_points = emb.external_points();
    let a_line_list: Vec<usize> = (0..g.line_count()).filter(|&l| !emb.contains_line(l)).collect();
    let a = g.restrict(&format!("{} minus subquadrangle", g.name()), &a_points, &a_line_list)?.renamed("A");
    let mut a_lines = vec![usize::MAX; a.line_count()];
    let mut index = vec![u32::MAX; g.point_count()];
    for (i, &p) in a_points.iter().enumerate() {
        index[p] = i as u32;
    }
    for &l in &a_line_list {
        let key: Vec<u32> = g.line(l).iter().filter(|&&p| index[p as usize] != u32::MAX).map(|&p| index[p as usize]).collect();
        let j = a.find_line(&key).ok_or_else(|| Error::consistency(format!("line {l} of 𝒜 was lost")))?;
        a_lines[j] = l;
    }

    // rosettes keyed by their member ovoids
    let mut by_members: BTreeMap<Vec<usize>, (usize, Vec<usize>)> = BTreeMap::new();
    let mut rosette_of_line: HashMap<usize, Vec<usize>> = HashMap::new();
    for &l in &a_line_list {
        let Some(z) = emb.foot(l) else { continue };
        let mut members: Vec<usize> = g
            .line(l)
            .iter()
            .filter(|&&p| p as usize != z)
            .map(|&p| table.ovoid_of[p as usize].expect("external point"))
            .collect();
        members.sort_unstable();
        members.dedup();
        let entry = by_members.entry(members.clone()).or_insert((z, Vec::new()));
        if entry.0 != z {
            return Err(Error::consistency("one rosette with two base points"));
        }
        entry.1.push(l);
        rosette_of_line.insert(l, members);
    }
    let e = IncidenceStructure::new("E", table.ovoids.len(), by_members.keys().cloned().collect())?;
    let mut rosettes: Vec<Option<Rosette>> = vec![None; e.line_count()];
    for (members, (z, witnesses)) in by_members {
        let key: Vec<u32> = members.iter().map(|&i| i as u32).collect();
        let j = e.find_line(&key).expect("rosette was inserted");
        rosettes[j] = Some(Rosette { base_point: z, ovoids: members, witness_lines: witnesses });
    }
    let rosettes: Vec<Rosette> = rosettes.into_iter().map(|r| r.expect("every line of E is a rosette")).collect();
    for r in &rosettes {
        check_rosette(emb, &table.ovoids, r)?;
    }

    let every_line_has_foot = a_lines.iter().all(|&l| emb.foot(l).is_some());
    let (pi, pi_certificate) = if every_line_has_foot {
        let point_map = a_points.iter().map(|&x| table.ovoid_of[x].unwrap()).collect();
        let line_map = a_lines
            .iter()
            .map(|&l| {
                let key: Vec<u32> = rosette_of_line[&l].iter().map(|&i| i as u32).collect();
                e.find_line(&key).unwrap()
            })
            .collect();
        let pi = GeometryMorphism { point_map, line_map };
        let cert = if emb.flags().is_geometric_hyperplane {
            let c = verify_cover(&a, &e, &pi).map_err(|f| Error::consistency(format!("π is not a cover: {f}")))?;
            if !c.is_surjective() {
                return Err(Error::consistency("π is not surjective"));
            }
            Some(c)
        } else {
            None
        };
        (Some(pi), cert)
    } else {
        (None, None)
    };

    Ok(DerivedPair {
        embedding: emb.clone(),
        a,
        a_points,
        a_lines,
        e,
        ovoids: table.ovoids,
        rosettes,
        census,
        pi,
        pi_certificate,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservationReport {
    pub pairs_checked: usize,
    /// Pairs where "no common neighbour in 𝒜" and "same ovoid" disagree.
    pub violations: Vec<(usize, usize)>,
    /// The relation "no common neighbour in 𝒜", with reflexivity added, has the π-fibres as classes.
    pub classes_are_fibres: bool,
}

impl ObservationReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && self.classes_are_fibres
    }
}

/// For distinct points `u, v` of 𝒜: `u^⊥ ∩ v^⊥ ∩ 𝒜 = ∅` exactly when `O_u = O_v`.
pub fn observation_pi_check(pair: &DerivedPair) -> Result<ObservationReport> {
    let pi = pair.pi.as_ref().ok_or_else(|| Error::hypothesis("π is not defined for this pair"))?;
    let g = pair.ambient();
    let mut external = FixedBitSet::with_capacity(g.point_count());
    for &p in &pair.a_points {
        external.insert(p);
    }
    let n = pair.a_points.len();
    let mut report = ObservationReport::default();
    let mut class: Vec<usize> = (0..n).collect();
    for u in 0..n {
        let mut pu = g.perp_bits(pair.a_points[u]).clone();
        pu.intersect_with(&external);
        for v in (u + 1)..n {
            report.pairs_checked += 1;
            let related = pu.intersection(g.perp_bits(pair.a_points[v])).next().is_none();
            let same = pi.point_map[u] == pi.point_map[v];
            if related != same {
                report.violations.push((pair.a_points[u], pair.a_points[v]));
            }
            if related {
                class[v] = class[v].min(class[u]);
            }
        }
    }
    // the first member of each class must be the first member of its π-fibre
    let mut first_of_fibre = vec![usize::MAX; pair.ovoids.len()];
    for u in 0..n {
        let f = &mut first_of_fibre[pi.point_map[u]];
        *f = (*f).min(u);
    }
    report.classes_are_fibres = (0..n).all(|u| class[u] == first_of_fibre[pi.point_map[u]]);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_h4_with_h3, build_q4_with_q3, build_q5_with_q3, build_q5_with_q4};

    #[test]
    fn q5_q4_ovoids() {
        let (_, emb) = build_q5_with_q4(2).unwrap();
        let x = emb.external_points()[0];
        let o = subtended_ovoid(&emb, x).unwrap();
        assert_eq!(o.points.len(), 5);
        assert_eq!(o.theta(), 2);
        assert!(subtended_ovoid(&emb, emb.points()[0]).is_err());
    }

    #[test]
    fn grid_section_census() {
        let (_, emb) = build_q4_with_q3(2).unwrap();
        let c = theta_census(&emb).unwrap();
        assert_eq!(c.uniform, Some(1));
        let (_, emb) = build_q4_with_q3(3).unwrap();
        assert_eq!(theta_census(&emb).unwrap().uniform, Some(2));
    }

    #[test]
    fn q5_q3_census_and_special_case() {
        let (_, emb) = build_q5_with_q3(2).unwrap();
        let c = theta_census(&emb).unwrap();
        assert_eq!(c.uniform, Some(3));
        let r = special_case_theta_s_plus_1(&emb).unwrap();
        assert!(r.holds(), "{:?}", r.histogram);
        let (_, emb4) = build_q5_with_q4(2).unwrap();
        assert!(matches!(special_case_theta_s_plus_1(&emb4), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn hermitian_subtenders() {
        let (_, emb) = build_h4_with_h3(2).unwrap();
        let o = subtended_ovoid(&emb, emb.external_points()[0]).unwrap();
        assert_eq!(o.theta(), 3);
    }

    #[test]
    fn lemma72_on_q2() {
        let (_, emb) = build_q5_with_q4(2).unwrap();
        let scan = lemma72_scan(&emb).unwrap();
        assert!(scan.failures.is_empty());
        // x and its partner already see all ten other external points
        assert_eq!((scan.detached_pairs, scan.attached_pairs), (0, 12 * 10));
        let (_, emb3) = build_q5_with_q4(3).unwrap();
        let scan = lemma72_scan(&emb3).unwrap();
        assert!(scan.failures.is_empty());
        assert!(scan.detached_pairs > 0 && scan.attached_pairs > 0);
        let (_, grid) = build_q4_with_q3(3).unwrap();
        assert!(matches!(lemma72_scan(&grid), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn derived_pair_q2() {
        let (_, emb) = build_q5_with_q4(2).unwrap();
        let pair = build_derived_pair(&emb).unwrap();
        assert_eq!((pair.a.point_count(), pair.a.line_count()), (12, 30));
        assert_eq!((pair.e.point_count(), pair.e.line_count()), (6, 15));
        let cert = pair.pi_certificate.as_ref().unwrap();
        assert_eq!(cert.theta, Some(2));
        assert!(observation_pi_check(&pair).unwrap().holds());
    }

    #[test]
    fn non_hyperplane_pair_is_flagged() {
        let (_, emb) = build_q5_with_q3(2).unwrap();
        let pair = build_derived_pair(&emb).unwrap();
        assert!(pair.pi.is_none());
        assert!(!pair.is_cover_certified());
        assert!(pair.require_cover().is_err());
    }
}
