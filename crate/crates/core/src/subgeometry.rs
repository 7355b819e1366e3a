//! Subgeometries of a quadrangle: full subquadrangles, geometric
//! hyperplanes and ovoids.

use std::sync::Arc;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incidence::{GQOrder, IncidenceStructure};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingFlags {
    pub is_full: bool,
    pub is_ideal: bool,
    pub is_geometric_hyperplane: bool,
}

/// A subgeometry `(P', L')` of an ambient structure with the induced incidence.
#[derive(Clone, Debug)]
pub struct SubGeometryEmbedding {
    ambient: Arc<IncidenceStructure>,
    points: Vec<usize>,
    lines: Vec<usize>,
    point_mask: FixedBitSet,
    line_mask: FixedBitSet,
    sub_index: Vec<u32>,
    structure: IncidenceStructure,
    sub_line_to_ambient: Vec<usize>,
    ambient_order: Option<GQOrder>,
    sub_order: Option<GQOrder>,
    flags: EmbeddingFlags,
}

/// The two kinds of geometric hyperplane of a thick quadrangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum HyperplaneKind {
    Ovoid,
    /// A full subquadrangle of order `(s, t/s)`.
    FullSubGq { order: GQOrder },
}

/// Regular parameters `(s, t)` read off line sizes and degrees, without checking axiom (b).
fn regular_parameters(g: &IncidenceStructure) -> Option<GQOrder> {
    let s1 = g.lines().first()?.len();
    let t1 = g.lines_through(0).len();
    let regular = g.lines().iter().all(|l| l.len() == s1)
        && (0..g.point_count()).all(|p| g.lines_through(p).len() == t1);
    (regular && s1 >= 2 && t1 >= 2).then(|| GQOrder::new(s1 - 1, t1 - 1))
}

impl SubGeometryEmbedding {
    /// The subgeometry on the given points and lines with induced incidence.
    pub fn induced(ambient: Arc<IncidenceStructure>, points: &[usize], lines: &[usize]) -> Result<Self> {
        let mut points = points.to_vec();
        points.sort_unstable();
        points.dedup();
        let mut lines = lines.to_vec();
        lines.sort_unstable();
        lines.dedup();
        let mut point_mask = FixedBitSet::with_capacity(ambient.point_count());
        let mut sub_index = vec![u32::MAX; ambient.point_count()];
        for (i, &p) in points.iter().enumerate() {
            ambient.ensure_point(p)?;
            point_mask.insert(p);
            sub_index[p] = i as u32;
        }
        let mut line_mask = FixedBitSet::with_capacity(ambient.line_count());
        for &l in &lines {
            if l >= ambient.line_count() {
                return Err(Error::input(format!("line {l} out of range")));
            }
            line_mask.insert(l);
        }

        let structure = ambient.restrict(&format!("{} (sub)", ambient.name()), &points, &lines)?;
        let mut sub_line_to_ambient = vec![usize::MAX; lines.len()];
        for &l in &lines {
            let restricted: Vec<u32> = ambient
                .line(l)
                .iter()
                .filter(|&&p| sub_index[p as usize] != u32::MAX)
                .map(|&p| sub_index[p as usize])
                .collect();
            let j = structure
                .find_line(&restricted)
                .ok_or_else(|| Error::input(format!("ambient line {l} collapses onto another line of the subgeometry")))?;
            sub_line_to_ambient[j] = l;
        }

        let is_full = lines.iter().all(|&l| ambient.line(l).iter().all(|&p| point_mask.contains(p as usize)));
        let is_ideal = points.iter().all(|&p| ambient.lines_through(p).iter().all(|&l| line_mask.contains(l as usize)));
        let sub_lines_ok = (0..structure.line_count()).all(|j| structure.line(j).len() >= 2);
        let is_geometric_hyperplane = !points.is_empty()
            && sub_lines_ok
            && (0..ambient.line_count()).all(|l| {
                let meet = ambient.line(l).iter().filter(|&&p| point_mask.contains(p as usize)).count();
                if line_mask.contains(l) {
                    meet == ambient.line(l).len()
                } else {
                    meet == 1
                }
            });

        let sub_order = structure.verify_gq_axioms().ok();
        let ambient_order = regular_parameters(&ambient);
        Ok(SubGeometryEmbedding {
            ambient,
            points,
            lines,
            point_mask,
            line_mask,
            sub_index,
            structure,
            sub_line_to_ambient,
            ambient_order,
            sub_order,
            flags: EmbeddingFlags { is_full, is_ideal, is_geometric_hyperplane },
        })
    }

    /// Points satisfying `keep`, with every ambient line lying entirely inside them.
    pub fn full_on_points(ambient: Arc<IncidenceStructure>, keep: impl Fn(usize) -> bool) -> Result<Self> {
        let points: Vec<usize> = (0..ambient.point_count()).filter(|&p| keep(p)).collect();
        let lines: Vec<usize> = (0..ambient.line_count())
            .filter(|&l| ambient.line(l).iter().all(|&p| keep(p as usize)))
            .collect();
        SubGeometryEmbedding::induced(ambient, &points, &lines)
    }

    pub fn ambient(&self) -> &Arc<IncidenceStructure> {
        &self.ambient
    }

    /// The subgeometry as a standalone structure on indices `0..|P'|`.
    pub fn structure(&self) -> &IncidenceStructure {
        &self.structure
    }

    /// Ambient indices of the points, ascending.
    pub fn points(&self) -> &[usize] {
        &self.points
    }

    /// Ambient indices of the lines, ascending.
    pub fn lines(&self) -> &[usize] {
        &self.lines
    }

    pub fn flags(&self) -> EmbeddingFlags {
        self.flags
    }

    pub fn sub_order(&self) -> Option<GQOrder> {
        self.sub_order
    }

    /// `(s, t)` of the ambient, when it has constant line size and degree.
    pub fn ambient_order(&self) -> Option<GQOrder> {
        self.ambient_order
    }

    pub fn contains_point(&self, p: usize) -> bool {
        self.point_mask.contains(p)
    }

    pub fn contains_line(&self, l: usize) -> bool {
        self.line_mask.contains(l)
    }

    pub fn point_mask(&self) -> &FixedBitSet {
        &self.point_mask
    }

    /// Position of an ambient point among the subgeometry points.
    pub fn sub_index(&self, p: usize) -> Option<usize> {
        let i = self.sub_index[p];
        (i != u32::MAX).then_some(i as usize)
    }

    /// Ambient index of subgeometry point `i`.
    pub fn ambient_point(&self, i: usize) -> usize {
        self.points[i]
    }

    /// Ambient index of the line that is line `j` of [`Self::structure`].
    pub fn ambient_line(&self, j: usize) -> usize {
        self.sub_line_to_ambient[j]
    }

    /// Points of the ambient outside `P'`, ascending.
    pub fn external_points(&self) -> Vec<usize> {
        (0..self.ambient.point_count()).filter(|&p| !self.point_mask.contains(p)).collect()
    }

    /// The unique point of `P'` on an ambient line, if it meets `P'` in exactly one point.
    pub fn foot(&self, l: usize) -> Option<usize> {
        let mut it = self.ambient.line(l).iter().filter(|&&p| self.point_mask.contains(p as usize));
        let first = *it.next()?;
        it.next().is_none().then_some(first as usize)
    }

    /// Decides between the two kinds of geometric hyperplane of a thick quadrangle.
    pub fn classify_hyperplane(&self) -> Result<HyperplaneKind> {
        if !self.flags.is_geometric_hyperplane {
            return Err(Error::hypothesis("subgeometry is not a geometric hyperplane"));
        }
        let amb = self
            .ambient_order
            .ok_or_else(|| Error::hypothesis("ambient has no constant order"))?;
        if self.lines.is_empty() {
            // every ambient line meets P' exactly once
            return Ok(HyperplaneKind::Ovoid);
        }
        match self.sub_order {
            Some(o) if self.flags.is_full && o.s == amb.s => {
                if amb.t % amb.s != 0 || o.t != amb.t / amb.s {
                    return Err(Error::consistency(format!(
                        "hyperplane subquadrangle of order {o} in ambient of order {amb}: expected t' = t/s"
                    )));
                }
                if o.t == 1 && amb.t != amb.s {
                    return Err(Error::consistency(format!("hyperplane of order ({},1) but t = {} != s", o.s, amb.t)));
                }
                Ok(HyperplaneKind::FullSubGq { order: o })
            }
            _ => Err(Error::consistency("geometric hyperplane is neither an ovoid nor a full subquadrangle")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_q4_with_q3, build_q5_with_q4};

    #[test]
    fn q4_section_of_q5_is_full_hyperplane() {
        let (_, emb) = build_q5_with_q4(2).unwrap();
        let f = emb.flags();
        assert!(f.is_full && f.is_geometric_hyperplane && !f.is_ideal);
        assert_eq!(emb.sub_order(), Some(GQOrder::new(2, 2)));
        assert_eq!(emb.classify_hyperplane().unwrap(), HyperplaneKind::FullSubGq { order: GQOrder::new(2, 2) });
    }

    #[test]
    fn single_line_is_full_but_not_a_quadrangle() {
        let (q5, emb) = build_q5_with_q4(2).unwrap();
        let _ = q5;
        let q4 = Arc::new(emb.structure().clone());
        let line: Vec<usize> = q4.line(0).iter().map(|&p| p as usize).collect();
        let e = SubGeometryEmbedding::induced(q4, &line, &[0]).unwrap();
        assert!(e.flags().is_full);
        assert_eq!(e.sub_order(), None);
        assert!(!e.flags().is_geometric_hyperplane);
        assert!(e.classify_hyperplane().is_err());
    }

    #[test]
    fn ovoid_is_hyperplane() {
        let (_, emb) = build_q5_with_q4(2).unwrap();
        let q4 = Arc::new(emb.structure().clone());
        // a subtended ovoid of Q(4,2): points of Q(4,2) collinear with an external point
        let x = emb.external_points()[0];
        let ovoid: Vec<usize> = emb.points().iter().enumerate()
            .filter(|&(_, &p)| emb.ambient().collinear(p, x))
            .map(|(i, _)| i)
            .collect();
        assert_eq!(ovoid.len(), 5);
        let e = SubGeometryEmbedding::induced(q4, &ovoid, &[]).unwrap();
        assert!(e.flags().is_geometric_hyperplane);
        assert_eq!(e.classify_hyperplane().unwrap(), HyperplaneKind::Ovoid);
    }

    #[test]
    fn grid_hyperplane_forces_t_equal_s() {
        let (_, emb) = build_q4_with_q3(2).unwrap();
        assert_eq!(emb.ambient_order(), Some(GQOrder::new(2, 2)));
        assert_eq!(emb.classify_hyperplane().unwrap(), HyperplaneKind::FullSubGq { order: GQOrder::new(2, 1) });
    }

    #[test]
    fn feet_of_external_lines() {
        let (q5, emb) = build_q5_with_q4(2).unwrap();
        for l in 0..q5.line_count() {
            if !emb.contains_line(l) {
                let z = emb.foot(l).unwrap();
                assert!(emb.contains_point(z));
            }
        }
    }
}
