//! Morphisms and covers between incidence structures, the lower factorization of a cover
//! of ℰ through π, reconstruction of the quadrangle χ from a triangle-free cover, and
//! the W-sets of Condition (C).

use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::automorphisms::Permutation;
use crate::constructions::points_coplanar;
use crate::error::{Error, Result};
use crate::incidence::{GQOrder, IncidenceStructure};
use crate::subgeometry::SubGeometryEmbedding;
use crate::subtension::{build_derived_pair, DerivedPair};

/// A point map and a line map. Serialized as `{"points": [...], "lines": [...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeometryMorphism {
    #[serde(rename = "points")]
    pub point_map: Vec<usize>,
    #[serde(rename = "lines")]
    pub line_map: Vec<usize>,
}

impl GeometryMorphism {
    pub fn identity(g: &IncidenceStructure) -> GeometryMorphism {
        GeometryMorphism { point_map: (0..g.point_count()).collect(), line_map: (0..g.line_count()).collect() }
    }

    /// `self` followed by an automorphism of the target.
    pub fn then_automorphism(&self, a: &Permutation) -> GeometryMorphism {
        GeometryMorphism {
            point_map: self.point_map.iter().map(|&x| a.points[x]).collect(),
            line_map: self.line_map.iter().map(|&l| a.lines[l]).collect(),
        }
    }

    /// An automorphism of the source followed by `self`.
    pub fn after_automorphism(&self, a: &Permutation) -> GeometryMorphism {
        GeometryMorphism {
            point_map: a.points.iter().map(|&x| self.point_map[x]).collect(),
            line_map: a.lines.iter().map(|&l| self.line_map[l]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoverFailure {
    /// Map sizes do not match the source, or an image is out of range.
    Shape(String),
    /// `point` lies on `line` but its image does not lie on the image line.
    NotMorphism { point: usize, line: usize },
    /// The pencil of `point` is not mapped bijectively onto the pencil of its image.
    Pencil { point: usize },
    /// The points of `line` are not mapped bijectively onto the points of its image.
    Row { line: usize },
}

impl CoverFailure {
    pub fn is_morphism(&self) -> bool {
        matches!(self, CoverFailure::Pencil { .. } | CoverFailure::Row { .. })
    }
}

impl fmt::Display for CoverFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverFailure::Shape(m) => write!(f, "malformed morphism: {m}"),
            CoverFailure::NotMorphism { point, line } => write!(f, "incidence of point {point} and line {line} is not preserved"),
            CoverFailure::Pencil { point } => write!(f, "not locally bijective on the pencil of point {point}"),
            CoverFailure::Row { line } => write!(f, "not locally bijective on the row of line {line}"),
        }
    }
}

impl std::error::Error for CoverFailure {}

/// Checks that incidence is preserved.
pub fn verify_morphism(source: &IncidenceStructure, target: &IncidenceStructure, m: &GeometryMorphism) -> Result<(), CoverFailure> {
    if m.point_map.len() != source.point_count() || m.line_map.len() != source.line_count() {
        return Err(CoverFailure::Shape("map lengths differ from the source".into()));
    }
    if m.point_map.iter().any(|&x| x >= target.point_count()) || m.line_map.iter().any(|&l| l >= target.line_count()) {
        return Err(CoverFailure::Shape("image outside the target".into()));
    }
    for l in 0..source.line_count() {
        for &p in source.line(l) {
            if !target.is_incident(m.point_map[p as usize], m.line_map[l]) {
                return Err(CoverFailure::NotMorphism { point: p as usize, line: l });
            }
        }
    }
    Ok(())
}

/// A verified cover with its fibres.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCertificate {
    pub morphism: GeometryMorphism,
    /// Common fibre size, when all point and line fibres have the same size.
    pub theta: Option<usize>,
    pub point_fibers: Vec<Vec<usize>>,
    pub line_fibers: Vec<Vec<usize>>,
}

impl CoverCertificate {
    pub fn is_surjective(&self) -> bool {
        self.point_fibers.iter().chain(&self.line_fibers).all(|f| !f.is_empty())
    }
}

fn is_bijection_onto(images: impl Iterator<Item = usize>, onto: &[u32]) -> bool {
    let mut v: Vec<u32> = images.map(|x| x as u32).collect();
    v.sort_unstable();
    v == onto
}

/// Checks the morphism property and local bijectivity on every pencil and row.
pub fn verify_cover(source: &IncidenceStructure, target: &IncidenceStructure, m: &GeometryMorphism) -> Result<CoverCertificate, CoverFailure> {
    verify_morphism(source, target, m)?;
    for p in 0..source.point_count() {
        let imgs = source.lines_through(p).iter().map(|&l| m.line_map[l as usize]);
        if !is_bijection_onto(imgs, target.lines_through(m.point_map[p])) {
            return Err(CoverFailure::Pencil { point: p });
        }
    }
    for l in 0..source.line_count() {
        let imgs = source.line(l).iter().map(|&p| m.point_map[p as usize]);
        if !is_bijection_onto(imgs, target.line(m.line_map[l])) {
            return Err(CoverFailure::Row { line: l });
        }
    }
    let mut point_fibers = vec![Vec::new(); target.point_count()];
    for (p, &x) in m.point_map.iter().enumerate() {
        point_fibers[x].push(p);
    }
    let mut line_fibers = vec![Vec::new(); target.line_count()];
    for (l, &x) in m.line_map.iter().enumerate() {
        line_fibers[x].push(l);
    }
    let first = point_fibers.first().map(Vec::len);
    let theta = first.filter(|&th| point_fibers.iter().chain(&line_fibers).all(|f| f.len() == th));
    Ok(CoverCertificate { morphism: m.clone(), theta, point_fibers, line_fibers })
}

/// Which way ζ carries ovoids onto their α-images.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    /// `α(O) = ζ(O)` as point sets.
    Forward,
    /// `α(O) = ζ⁻¹(O)` as point sets.
    Inverse,
}

/// `γ = α ∘ π` with α an automorphism of ℰ, and the automorphism ζ of `S'` induced by α.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationResult {
    pub alpha: Permutation,
    /// On the points of `S'` by subgeometry index.
    pub zeta: Permutation,
    pub orientation: Orientation,
}

/// Applies a point map of `S'` (by subgeometry index) to an ambient point set, sorted.
pub fn map_sub_points(emb: &SubGeometryEmbedding, map: &[usize], points: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = points.iter().map(|&p| emb.ambient_point(map[emb.sub_index(p).expect("point of S'")])).collect();
    out.sort_unstable();
    out
}

/// Factorizes a cover `γ: 𝒜 → ℰ` as `α ∘ π`, builds ζ from the feet of the fibres of γ
/// over each rosette, and determines the orientation linking α and ζ.
pub fn factorize_lower(pair: &DerivedPair, gamma: &GeometryMorphism) -> Result<FactorizationResult> {
    let pi = pair.require_cover()?;
    verify_cover(&pair.a, &pair.e, gamma).map_err(|f| Error::input(format!("γ is not a cover 𝒜 → ℰ: {f}")))?;
    let e = &pair.e;

    let mut points = vec![usize::MAX; e.point_count()];
    for (x, (&o, &img)) in pi.point_map.iter().zip(&gamma.point_map).enumerate() {
        match points[o] {
            usize::MAX => points[o] = img,
            prev if prev != img => {
                return Err(Error::consistency(format!(
                    "γ is not constant on the π-fibre of ovoid {o} (point {} of 𝒜)",
                    pair.a_points[x]
                )))
            }
            _ => {}
        }
    }
    let mut lines = vec![usize::MAX; e.line_count()];
    for (l, (&r, &img)) in pi.line_map.iter().zip(&gamma.line_map).enumerate() {
        match lines[r] {
            usize::MAX => lines[r] = img,
            prev if prev != img => {
                return Err(Error::consistency(format!("γ is not constant on the π-fibre of rosette {r} (line {l} of 𝒜)")))
            }
            _ => {}
        }
    }
    let alpha = Permutation { points, lines };
    if !alpha.is_automorphism_of(e) {
        return Err(Error::consistency("the induced map α is not an automorphism of ℰ"));
    }

    // ζ(u) = base of L for u the common foot of γ⁻¹(L)
    let emb = &pair.embedding;
    let n = emb.points().len();
    let mut zeta = vec![usize::MAX; n];
    let mut preimages: Vec<Vec<usize>> = vec![Vec::new(); e.line_count()];
    for (l, &img) in gamma.line_map.iter().enumerate() {
        preimages[img].push(l);
    }
    for (r, pre) in preimages.iter().enumerate() {
        let feet: Vec<usize> = pre.iter().map(|&l| emb.foot(pair.a_lines[l]).expect("lines of 𝒜 have a foot")).collect();
        let u = feet[0];
        if feet.iter().any(|&f| f != u) {
            return Err(Error::consistency(format!("the lines of γ⁻¹ of rosette {r} have no common point in S'")));
        }
        let (u, v) = (emb.sub_index(u).unwrap(), emb.sub_index(pair.rosettes[r].base_point).unwrap());
        if zeta[u] != usize::MAX && zeta[u] != v {
            return Err(Error::consistency(format!("ζ is not well defined at point {}", emb.ambient_point(u))));
        }
        zeta[u] = v;
    }
    if zeta.contains(&usize::MAX) {
        return Err(Error::consistency("ζ is not total"));
    }
    let zeta = Permutation::from_points(emb.structure(), zeta)
        .filter(|z| z.is_automorphism_of(emb.structure()))
        .ok_or_else(|| Error::consistency("ζ is not an automorphism of S'"))?;

    let inverse = zeta.inverse();
    let agrees = |map: &[usize]| {
        pair.ovoids
            .iter()
            .enumerate()
            .all(|(i, o)| map_sub_points(emb, map, &o.points) == pair.ovoids[alpha.points[i]].points)
    };
    let orientation = if agrees(&zeta.points) {
        Orientation::Forward
    } else if agrees(&inverse.points) {
        Orientation::Inverse
    } else {
        return Err(Error::consistency("ζ carries the ovoids onto their α-images in neither direction"));
    };
    Ok(FactorizationResult { alpha, zeta, orientation })
}

/// Points in an order where each next point lies on as many lines through placed points
/// as possible, so that images are constrained early.
fn constrained_order(g: &IncidenceStructure) -> Vec<usize> {
    let n = g.point_count();
    let mut placed = vec![false; n];
    let mut line_hit = vec![false; g.line_count()];
    let mut score = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        let x = (0..n).filter(|&p| !placed[p]).max_by_key(|&p| (score[p], std::cmp::Reverse(p))).expect("a point is left");
        placed[x] = true;
        order.push(x);
        for &l in g.lines_through(x) {
            let l = l as usize;
            if !line_hit[l] {
                line_hit[l] = true;
                for &y in g.line(l) {
                    score[y as usize] += 1;
                }
            }
        }
    }
    order
}

struct CoverSearch<'a> {
    source: &'a IncidenceStructure,
    target: &'a IncidenceStructure,
    order: Vec<usize>,
    point_img: Vec<usize>,
    line_img: Vec<usize>,
    found: Vec<GeometryMorphism>,
    nodes: u64,
    budget: u64,
}

const UNSET: usize = usize::MAX;

impl CoverSearch<'_> {
    fn run(&mut self, depth: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget { context: "cover enumeration".into(), limit: self.budget });
        }
        if depth == self.order.len() {
            let m = GeometryMorphism { point_map: self.point_img.clone(), line_map: self.line_img.clone() };
            if verify_cover(self.source, self.target, &m).is_ok() {
                self.found.push(m);
            }
            return Ok(());
        }
        let x = self.order[depth];
        // an image must be collinear with the images of the neighbours already placed
        let mut candidates = FixedBitSet::with_capacity(self.target.point_count());
        candidates.insert_range(..);
        for &l in self.source.lines_through(x) {
            let placed = self.source.line(l as usize).iter().map(|&y| self.point_img[y as usize]).find(|&f| f != UNSET);
            if let Some(f) = placed {
                candidates.intersect_with(self.target.perp_bits(f));
                candidates.set(f, false);
            }
        }
        for e in candidates.ones() {
            let mut newly = Vec::new();
            if self.try_assign(x, e, &mut newly) {
                self.run(depth + 1)?;
            }
            self.unassign(x, &newly);
        }
        Ok(())
    }

    fn try_assign(&mut self, x: usize, e: usize, newly: &mut Vec<usize>) -> bool {
        let src = self.source;
        let tgt = self.target;
        self.point_img[x] = e;
        for &l in src.lines_through(x) {
            let l = l as usize;
            if self.line_img[l] != UNSET {
                if !tgt.is_incident(e, self.line_img[l]) || src.line(l).iter().any(|&y| y as usize != x && self.point_img[y as usize] == e) {
                    return false;
                }
                continue;
            }
            let Some(&y) = src.line(l).iter().find(|&&y| y as usize != x && self.point_img[y as usize] != UNSET) else { continue };
            let f = self.point_img[y as usize];
            if f == e {
                return false;
            }
            let Some(m) = tgt.line_through(e, f) else { return false };
            if !src.line(l).iter().all(|&z| {
                let img = self.point_img[z as usize];
                img == UNSET || tgt.is_incident(img, m)
            }) {
                return false;
            }
            self.line_img[l] = m;
            newly.push(l);
        }
        // pencils of every point on a newly imaged line stay injective
        for &l in newly.iter() {
            for &y in src.line(l) {
                let y = y as usize;
                if self.point_img[y] == UNSET {
                    continue;
                }
                let mut imgs: Vec<usize> =
                    src.lines_through(y).iter().map(|&k| self.line_img[k as usize]).filter(|&i| i != UNSET).collect();
                let len = imgs.len();
                imgs.sort_unstable();
                imgs.dedup();
                if imgs.len() != len {
                    return false;
                }
            }
        }
        true
    }

    fn unassign(&mut self, x: usize, newly: &[usize]) {
        for &l in newly {
            self.line_img[l] = UNSET;
        }
        self.point_img[x] = UNSET;
    }
}

/// Every cover `source → target`, by backtracking over point images in a most-constrained order with
/// images tried in ascending order. The result is sorted.
pub fn enumerate_covers(source: &IncidenceStructure, target: &IncidenceStructure, budget: u64) -> Result<Vec<GeometryMorphism>> {
    let mut search = CoverSearch {
        source,
        target,
        order: constrained_order(source),
        point_img: vec![UNSET; source.point_count()],
        line_img: vec![UNSET; source.line_count()],
        found: Vec::new(),
        nodes: 0,
        budget,
    };
    search.run(0)?;
    let mut found = search.found;
    found.sort();
    found.dedup();
    Ok(found)
}

/// The connecting automorphism δ with `δ ∘ γ = γ'`.
///
/// δ is computed as `α' ∘ α⁻¹` from the two factorizations and compared with the map
/// forced by surjectivity of γ, `γ(x) ↦ γ'(x)`, which shows it is the only one.
pub fn verify_initial_object(pair: &DerivedPair, gamma: &GeometryMorphism, gamma2: &GeometryMorphism) -> Result<Permutation> {
    let f1 = factorize_lower(pair, gamma)?;
    let f2 = factorize_lower(pair, gamma2)?;
    let delta = f1.alpha.inverse().then(&f2.alpha);
    if gamma.then_automorphism(&delta) != *gamma2 {
        return Err(Error::consistency("δ ∘ γ differs from γ'"));
    }
    let e = &pair.e;
    let mut forced_points = vec![UNSET; e.point_count()];
    for (&a, &b) in gamma.point_map.iter().zip(&gamma2.point_map) {
        if forced_points[a] != UNSET && forced_points[a] != b {
            return Err(Error::consistency("no map δ satisfies δ ∘ γ = γ'"));
        }
        forced_points[a] = b;
    }
    let mut forced_lines = vec![UNSET; e.line_count()];
    for (&a, &b) in gamma.line_map.iter().zip(&gamma2.line_map) {
        if forced_lines[a] != UNSET && forced_lines[a] != b {
            return Err(Error::consistency("no map δ satisfies δ ∘ γ = γ'"));
        }
        forced_lines[a] = b;
    }
    if forced_points != delta.points || forced_lines != delta.lines {
        return Err(Error::consistency("δ is not the unique map forced by γ and γ'"));
    }
    Ok(delta)
}

/// The quadrangle χ rebuilt from a triangle-free θ-cover `C → ℰ`.
#[derive(Clone, Debug)]
pub struct ChiReconstruction {
    pub chi: Arc<IncidenceStructure>,
    /// Points `|C|..` of χ, one per point of `S'`, with the copies of the lines of `S'`.
    pub chi_prime: SubGeometryEmbedding,
    /// Point `i` of χ' goes to subgeometry point `sigma_star[i]` of `S'`.
    pub sigma_star: Vec<usize>,
    /// For each point `x` of `S'` (by subgeometry index), the lines of `C` forming `x*`.
    pub star_points: Vec<Vec<usize>>,
    pub order: GQOrder,
}

/// Builds χ from `C` and the cover `γ: C → ℰ` and verifies it.
pub fn reconstruct_chi(pair: &DerivedPair, c: &IncidenceStructure, gamma: &GeometryMorphism) -> Result<ChiReconstruction> {
    if let Some(tri) = c.find_triangle() {
        return Err(Error::hypothesis(format!("C has a triangle at points {tri:?}")));
    }
    let cert = verify_cover(c, &pair.e, gamma).map_err(|f| Error::input(format!("γ is not a cover C → ℰ: {f}")))?;
    cert.theta.ok_or_else(|| Error::hypothesis("γ has fibres of different sizes"))?;
    let (amb, sub) = pair.order()?;
    let emb = &pair.embedding;
    let n_sub = emb.points().len();
    let nc = c.point_count();

    let mut star_points: Vec<Vec<usize>> = vec![Vec::new(); n_sub];
    for (l, &r) in gamma.line_map.iter().enumerate() {
        star_points[emb.sub_index(pair.rosettes[r].base_point).unwrap()].push(l);
    }
    for (x, star) in star_points.iter().enumerate() {
        if star.len() != amb.t - sub.t {
            return Err(Error::consistency(format!(
                "x* for point {} has {} lines instead of t - t' = {}",
                emb.ambient_point(x),
                star.len(),
                amb.t - sub.t
            )));
        }
        for (i, &l) in star.iter().enumerate() {
            for &m in &star[i + 1..] {
                if c.line(l).iter().any(|p| c.line(m).binary_search(p).is_ok()) {
                    return Err(Error::consistency(format!("the lines of x* for point {} are not disjoint", emb.ambient_point(x))));
                }
            }
        }
    }

    let mut lines: Vec<Vec<usize>> = Vec::with_capacity(c.line_count() + emb.lines().len());
    let mut owner = vec![0usize; c.line_count()];
    for (x, star) in star_points.iter().enumerate() {
        for &l in star {
            owner[l] = x;
        }
    }
    for l in 0..c.line_count() {
        let mut pts: Vec<usize> = c.line(l).iter().map(|&p| p as usize).collect();
        pts.push(nc + owner[l]);
        lines.push(pts);
    }
    let s_prime = emb.structure();
    for j in 0..s_prime.line_count() {
        lines.push(s_prime.line(j).iter().map(|&p| nc + p as usize).collect());
    }
    let chi = IncidenceStructure::new("chi", nc + n_sub, lines)?;
    let expect_points = (amb.s + 1) * (amb.s * amb.t + 1);
    let expect_lines = (amb.t + 1) * (amb.s * amb.t + 1);
    if chi.point_count() != expect_points || chi.line_count() != expect_lines {
        return Err(Error::consistency(format!(
            "χ has {} points and {} lines, expected {expect_points} and {expect_lines}",
            chi.point_count(),
            chi.line_count()
        )));
    }
    if let Some(tri) = chi.find_triangle() {
        return Err(Error::consistency(format!("χ has a triangle at {tri:?}")));
    }
    let order = chi.verify_gq_axioms().map_err(|v| Error::consistency(format!("χ is not a quadrangle: {v}")))?;
    if order != amb {
        return Err(Error::consistency(format!("χ has order {order}, expected {amb}")));
    }

    let chi = Arc::new(chi);
    let prime_points: Vec<usize> = (nc..nc + n_sub).collect();
    let prime_lines: Vec<usize> = (0..chi.line_count()).filter(|&l| chi.line(l)[0] as usize >= nc).collect();
    let chi_prime = SubGeometryEmbedding::induced(chi.clone(), &prime_points, &prime_lines)?;
    let sigma_star: Vec<usize> = (0..n_sub).collect();
    let iso = Permutation::from_points(s_prime, sigma_star.clone());
    if chi_prime.structure() != s_prime || iso.is_none() {
        return Err(Error::consistency("σ* is not an isomorphism χ' → S'"));
    }

    // Γ(χ, χ') carried by σ* must be ℰ
    let derived = build_derived_pair(&chi_prime)?;
    let carry = |pts: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = pts.iter().map(|&p| emb.ambient_point(sigma_star[p - nc])).collect();
        v.sort_unstable();
        v
    };
    let mut ovoids: Vec<Vec<usize>> = derived.ovoids.iter().map(|o| carry(&o.points)).collect();
    ovoids.sort();
    let expected: Vec<Vec<usize>> = pair.ovoids.iter().map(|o| o.points.clone()).collect();
    if ovoids != expected {
        return Err(Error::consistency("the subtended ovoids of χ' differ from those of S'"));
    }
    let rosette_sets = |p: &DerivedPair, f: &dyn Fn(&[usize]) -> Vec<usize>| {
        let mut v: Vec<Vec<Vec<usize>>> = p
            .rosettes
            .iter()
            .map(|r| {
                let mut m: Vec<Vec<usize>> = r.ovoids.iter().map(|&i| f(&p.ovoids[i].points)).collect();
                m.sort();
                m
            })
            .collect();
        v.sort();
        v
    };
    if rosette_sets(&derived, &carry) != rosette_sets(pair, &|p: &[usize]| p.to_vec()) {
        return Err(Error::consistency("the rosettes of χ' differ from those of S'"));
    }
    Ok(ChiReconstruction { chi, chi_prime, sigma_star, star_points, order })
}

/// `x ↦ x**`: the common point of `S'` on the lines of `x*`, by subgeometry index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identification {
    pub double_star: Vec<usize>,
}

/// For a cover whose source is 𝒜 itself: each `x*` has a common foot `x**`, and `x ↦ x**`
/// is an automorphism of `S'`.
pub fn identify_chi_prime(rec: &ChiReconstruction, pair: &DerivedPair) -> Result<Identification> {
    let emb = &pair.embedding;
    let mut double_star = Vec::with_capacity(rec.star_points.len());
    for (x, star) in rec.star_points.iter().enumerate() {
        let feet: Vec<usize> = star.iter().map(|&l| emb.foot(pair.a_lines[l]).expect("lines of 𝒜 have a foot")).collect();
        if feet.iter().any(|&f| f != feet[0]) {
            return Err(Error::consistency(format!("the lines of x* for point {} have no common point", emb.ambient_point(x))));
        }
        double_star.push(emb.sub_index(feet[0]).unwrap());
    }
    let ok = Permutation::from_points(emb.structure(), double_star.clone()).is_some_and(|p| p.is_automorphism_of(emb.structure()));
    if !ok {
        return Err(Error::consistency("x* ↦ x** is not an isomorphism χ' → S'"));
    }
    Ok(Identification { double_star })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WVariant {
    /// `N_0` is not a line of `S'`.
    Plain,
    /// `N_0` is a line of `S'`.
    Overline,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionCInstance {
    pub l: usize,
    pub m_set: Vec<usize>,
    pub x0: usize,
    /// `x_1, …, x_α`.
    pub external: Vec<usize>,
    /// `N_0, N_1, …, N_α`.
    pub n_lines: Vec<usize>,
    /// Points of `S'` on the lines `N_i`, ascending.
    pub w: Vec<usize>,
    pub variant: WVariant,
}

/// How the points `x_1, …, x_α` may be chosen.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Reading {
    /// Any `α ∈ {s-1, s}` external points on the `M_i`.
    Literal,
    /// Only external points not collinear with the foot of `L`, so every `N_i` with `i ≥ 1`
    /// meets `L` off `S'`. Then `α = s` for the overline variant and `α = s-1` otherwise.
    #[default]
    Configuration,
}

/// Samples one instance with `|ℳ| = r`. Returns `None` when the random choices violate the
/// hypotheses (a line `L` concurrent with some `M_i`, or coincident points `N_i ∩ L`).
fn sample_instance(pair: &DerivedPair, r: usize, reading: Reading, rng: &mut ChaCha8Rng) -> Option<ConditionCInstance> {
    let g = pair.ambient();
    let emb = &pair.embedding;
    let s = g.line(0).len() - 1;
    let rosette = pair.rosettes.choose(rng)?;
    if rosette.witness_lines.len() < r {
        return None;
    }
    let x0 = rosette.base_point;
    let mut m_set: Vec<usize> = rosette.witness_lines.choose_multiple(rng, r).copied().collect();
    m_set.sort_unstable();

    let l = rng.gen_range(0..g.line_count());
    if emb.contains_line(l) || m_set.iter().any(|&m| g.line(m).iter().any(|p| g.line(l).binary_search(p).is_ok())) {
        return None;
    }
    let z = emb.foot(l)?;
    let (alpha, allowed): (usize, Box<dyn Fn(usize) -> bool>) = match reading {
        Reading::Literal => (if rng.gen_bool(0.5) { s - 1 } else { s }, Box::new(|_| true)),
        Reading::Configuration => (if g.collinear(x0, z) { s } else { s - 1 }, Box::new(move |p| !g.collinear(p, z))),
    };
    if alpha < r {
        return None;
    }
    // one point on each M_i, then the rest anywhere on the M lines
    let mut external: Vec<usize> = Vec::with_capacity(alpha);
    for &m in &m_set {
        let pts: Vec<usize> = g.line(m).iter().map(|&p| p as usize).filter(|&p| p != x0 && allowed(p)).collect();
        external.push(*pts.choose(rng)?);
    }
    let mut pool: Vec<usize> = m_set
        .iter()
        .flat_map(|&m| g.line(m).iter().map(|&p| p as usize))
        .filter(|&p| p != x0 && allowed(p) && !external.contains(&p))
        .collect();
    pool.shuffle(rng);
    external.extend(pool.into_iter().take(alpha - r));
    if external.len() != alpha {
        return None;
    }
    external.sort_unstable();

    let connect = |x: usize| -> Option<(usize, usize)> {
        let meet = g.line(l).iter().map(|&p| p as usize).find(|&p| g.collinear(x, p))?;
        Some((g.line_through(x, meet)?, meet))
    };
    let mut n_lines = Vec::with_capacity(alpha + 1);
    let mut meets = Vec::with_capacity(alpha + 1);
    for &x in std::iter::once(&x0).chain(&external) {
        let (n, p) = connect(x)?;
        n_lines.push(n);
        meets.push(p);
    }
    let mut uniq = meets.clone();
    uniq.sort_unstable();
    uniq.dedup();
    if uniq.len() != meets.len() {
        return None;
    }
    let mut w: Vec<usize> = n_lines
        .iter()
        .flat_map(|&n| g.line(n).iter().map(|&p| p as usize))
        .filter(|&p| emb.contains_point(p))
        .collect();
    w.sort_unstable();
    w.dedup();
    let variant = if emb.contains_line(n_lines[0]) { WVariant::Overline } else { WVariant::Plain };
    Some(ConditionCInstance { l, m_set, x0, external, n_lines, w, variant })
}

/// `count` seeded instances with `|ℳ| = 1` and `count` with `|ℳ| > 1`.
pub fn condition_c_instances(pair: &DerivedPair, count: usize, seed: u64, reading: Reading, max_attempts: usize) -> Result<Vec<ConditionCInstance>> {
    pair.require_cover()?;
    let theta = pair.census.uniform.ok_or_else(|| Error::hypothesis("θ is not uniform"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(2 * count);
    let mut single = 0;
    let mut multi = 0;
    let mut attempts = 0;
    while single < count || (theta > 1 && multi < count) {
        attempts += 1;
        if attempts > max_attempts {
            return Err(Error::Budget { context: "condition (C) sampling".into(), limit: max_attempts as u64 });
        }
        let r = if single < count && (multi >= count || theta == 1 || rng.gen_bool(0.5)) { 1 } else { rng.gen_range(2..=theta) };
        if let Some(inst) = sample_instance(pair, r, reading, &mut rng) {
            if r == 1 {
                single += 1;
            } else {
                multi += 1;
            }
            out.push(inst);
        }
    }
    Ok(out)
}

/// Whether `W` lies in a plane of the ambient projective space.
pub fn condition_c_planarity(pair: &DerivedPair, inst: &ConditionCInstance) -> Result<bool> {
    points_coplanar(pair.ambient(), &inst.w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_grid, build_q5_with_q4};

    fn pair2() -> DerivedPair {
        let (_, emb) = build_q5_with_q4(2).unwrap();
        build_derived_pair(&emb).unwrap()
    }

    #[test]
    fn identity_is_a_one_cover() {
        let g = build_grid(2).unwrap();
        let c = verify_cover(&g, &g, &GeometryMorphism::identity(&g)).unwrap();
        assert_eq!(c.theta, Some(1));
        assert!(c.is_surjective());
    }

    #[test]
    fn constant_map_is_morphism_not_cover() {
        let pair = pair2();
        let e = &pair.e;
        let z = 0;
        let l = e.lines_through(z)[0] as usize;
        let m = GeometryMorphism { point_map: vec![z; pair.a.point_count()], line_map: vec![l; pair.a.line_count()] };
        let f = verify_cover(&pair.a, e, &m).unwrap_err();
        assert!(f.is_morphism(), "{f}");
    }

    #[test]
    fn factorizing_pi_gives_identity() {
        let pair = pair2();
        let pi = pair.pi.clone().unwrap();
        let f = factorize_lower(&pair, &pi).unwrap();
        assert!(f.alpha.is_identity());
        assert!(f.zeta.is_identity());
    }

    #[test]
    fn twisted_cover_factorizes_to_its_twist() {
        let pair = pair2();
        let pi = pair.pi.clone().unwrap();
        // transposition of two ovoids extends to an automorphism of E = K6
        let mut pts: Vec<usize> = (0..6).collect();
        pts.swap(0, 1);
        let a0 = Permutation::from_points(&pair.e, pts).unwrap();
        let gamma = pi.then_automorphism(&a0);
        let f = factorize_lower(&pair, &gamma).unwrap();
        assert_eq!(f.alpha, a0);
        let d = verify_initial_object(&pair, &pi, &gamma).unwrap();
        assert_eq!(d, a0);
    }

    #[test]
    fn chi_from_canonical_cover() {
        let pair = pair2();
        let pi = pair.pi.clone().unwrap();
        let rec = reconstruct_chi(&pair, &pair.a, &pi).unwrap();
        assert_eq!((rec.chi.point_count(), rec.chi.line_count()), (27, 45));
        let id = identify_chi_prime(&rec, &pair).unwrap();
        assert!(id.double_star.iter().enumerate().all(|(i, &x)| i == x));
    }

    #[test]
    fn triangle_in_source_is_rejected() {
        let pair = pair2();
        let fano = IncidenceStructure::new(
            "fano",
            7,
            vec![vec![0, 1, 2], vec![0, 3, 4], vec![0, 5, 6], vec![1, 3, 5], vec![1, 4, 6], vec![2, 3, 6], vec![2, 4, 5]],
        )
        .unwrap();
        let m = GeometryMorphism { point_map: vec![0; 7], line_map: vec![0; 7] };
        assert!(matches!(reconstruct_chi(&pair, &fano, &m), Err(Error::Hypothesis(_))));
    }
}
