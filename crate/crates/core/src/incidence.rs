//! Finite point-line incidence structures.
//!
//! Points and lines are dense indices. Every line is stored as a sorted list
//! of point indices and the line list itself is kept in lexicographic order,
//! so two structures built from the same data are identical and serialize to
//! the same bytes.

use std::collections::VecDeque;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Fe, FieldSpec};

/// Homogeneous coordinates attached to the points of a constructed geometry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coordinates {
    pub field: FieldSpec,
    pub vectors: Vec<Vec<Fe>>,
}

#[derive(Clone, Debug)]
pub struct IncidenceStructure {
    name: String,
    point_count: usize,
    lines: Vec<Vec<u32>>,
    point_lines: Vec<Vec<u32>>,
    collinear: Vec<FixedBitSet>,
    coords: Option<Coordinates>,
}

impl PartialEq for IncidenceStructure {
    fn eq(&self, other: &Self) -> bool {
        self.point_count == other.point_count && self.lines == other.lines
    }
}

impl Eq for IncidenceStructure {}

impl IncidenceStructure {
    /// Builds a structure, sorting every line and the line list.
    ///
    /// Lines with repeated or out-of-range points, and repeated lines, are rejected.
    pub fn new(name: impl Into<String>, point_count: usize, lines: Vec<Vec<usize>>) -> Result<Self> {
        let mut sorted: Vec<Vec<u32>> = Vec::with_capacity(lines.len());
        for (i, line) in lines.into_iter().enumerate() {
            let mut l: Vec<u32> = line.into_iter().map(|p| p as u32).collect();
            l.sort_unstable();
            if let Some(&p) = l.iter().find(|&&p| p as usize >= point_count) {
                return Err(Error::input(format!("line {i} refers to point {p} but there are {point_count} points")));
            }
            if l.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::input(format!("line {i} repeats a point")));
            }
            sorted.push(l);
        }
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::input(format!("repeated line {:?}", w[0])));
        }

        let mut point_lines = vec![Vec::new(); point_count];
        for (li, l) in sorted.iter().enumerate() {
            for &p in l {
                point_lines[p as usize].push(li as u32);
            }
        }
        let mut collinear = vec![FixedBitSet::with_capacity(point_count); point_count];
        for (p, row) in collinear.iter_mut().enumerate() {
            row.insert(p);
        }
        for l in &sorted {
            for &a in l {
                let row = &mut collinear[a as usize];
                for &b in l {
                    row.insert(b as usize);
                }
            }
        }
        Ok(IncidenceStructure { name: name.into(), point_count, lines: sorted, point_lines, collinear, coords: None })
    }

    pub fn with_coordinates(mut self, coords: Coordinates) -> Result<Self> {
        if coords.vectors.len() != self.point_count {
            return Err(Error::input(format!(
                "{} coordinate vectors for {} points",
                coords.vectors.len(),
                self.point_count
            )));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn line_count(&self) -> usize {
        self.lines.len()
    }

    pub fn is_empty(&self) -> bool {
        self.point_count == 0 && self.lines.is_empty()
    }

    pub fn lines(&self) -> &[Vec<u32>] {
        &self.lines
    }

    pub fn line(&self, l: usize) -> &[u32] {
        &self.lines[l]
    }

    pub fn lines_through(&self, p: usize) -> &[u32] {
        &self.point_lines[p]
    }

    pub fn coords(&self) -> Option<&Coordinates> {
        self.coords.as_ref()
    }

    pub fn is_incident(&self, p: usize, l: usize) -> bool {
        self.lines[l].binary_search(&(p as u32)).is_ok()
    }

    /// Collinearity, reflexive.
    pub fn collinear(&self, p: usize, q: usize) -> bool {
        self.collinear[p].contains(q)
    }

    /// Bit row of `p^⊥`.
    pub fn perp_bits(&self, p: usize) -> &FixedBitSet {
        &self.collinear[p]
    }

    /// The line carrying both points, if any (first by index when several exist).
    pub fn line_through(&self, p: usize, q: usize) -> Option<usize> {
        let (a, b) = if self.point_lines[p].len() <= self.point_lines[q].len() { (p, q) } else { (q, p) };
        self.point_lines[a].iter().map(|&l| l as usize).find(|&l| l_contains(&self.lines[l], b))
    }

    /// Index of the line with exactly this point set.
    pub fn find_line(&self, points: &[u32]) -> Option<usize> {
        let mut key = points.to_vec();
        key.sort_unstable();
        self.lines.binary_search(&key).ok()
    }

    pub fn ensure_point(&self, p: usize) -> Result<()> {
        if p < self.point_count {
            Ok(())
        } else {
            Err(Error::input(format!("point {p} out of range ({} points)", self.point_count)))
        }
    }

    /// `x^⊥`: all points collinear with `x`, including `x`.
    pub fn perp(&self, x: usize) -> Result<Vec<usize>> {
        self.ensure_point(x)?;
        Ok(self.collinear[x].ones().collect())
    }

    pub fn perp_set_bits(&self, ys: &[usize]) -> Result<FixedBitSet> {
        let mut acc = FixedBitSet::with_capacity(self.point_count);
        acc.insert_range(..);
        for &y in ys {
            self.ensure_point(y)?;
            acc.intersect_with(&self.collinear[y]);
        }
        Ok(acc)
    }

    /// `Y^⊥`, the intersection of `y^⊥` over `y ∈ Y`; all points when `Y` is empty.
    pub fn perp_set(&self, ys: &[usize]) -> Result<Vec<usize>> {
        Ok(self.perp_set_bits(ys)?.ones().collect())
    }

    pub fn biperp(&self, ys: &[usize]) -> Result<Vec<usize>> {
        let first = self.perp_set(ys)?;
        self.perp_set(&first)
    }

    /// `cl(u,v) = { w : w^⊥ ∩ {u,v}^⊥⊥ ≠ ∅ }`.
    pub fn cl(&self, u: usize, v: usize) -> Result<Vec<usize>> {
        self.ensure_point(u)?;
        self.ensure_point(v)?;
        if u == v {
            return Err(Error::input("cl(u,v) needs distinct points"));
        }
        let bp = self.perp_set_bits(&self.perp_set(&[u, v])?)?;
        Ok((0..self.point_count).filter(|&w| self.collinear[w].intersection(&bp).next().is_some()).collect())
    }

    /// Checks the quadrangle axioms and returns the order.
    pub fn verify_gq_axioms(&self) -> Result<GQOrder, GqViolation> {
        if self.point_count == 0 || self.lines.is_empty() {
            return Err(GqViolation::Empty);
        }
        let s1 = self.lines[0].len();
        if let Some((l, line)) = self.lines.iter().enumerate().find(|(_, l)| l.len() != s1) {
            return Err(GqViolation::AxiomA { point: None, line: Some(l), expected: s1, found: line.len() });
        }
        let t1 = self.point_lines[0].len();
        if let Some((p, pl)) = self.point_lines.iter().enumerate().find(|(_, pl)| pl.len() != t1) {
            return Err(GqViolation::AxiomA { point: Some(p), line: None, expected: t1, found: pl.len() });
        }
        if s1 < 2 || t1 < 2 {
            return Err(GqViolation::Degenerate { s: s1.saturating_sub(1), t: t1.saturating_sub(1) });
        }

        // (c): two points share at most one line
        let mut seen = vec![u32::MAX; self.point_count];
        for x in 0..self.point_count {
            for &l in &self.point_lines[x] {
                for &y in &self.lines[l as usize] {
                    let y = y as usize;
                    if y == x {
                        continue;
                    }
                    if seen[y] != u32::MAX && seen[y] != l {
                        return Err(GqViolation::AxiomC { points: (x, y), lines: (seen[y] as usize, l as usize) });
                    }
                    seen[y] = l;
                }
            }
            for &l in &self.point_lines[x] {
                for &y in &self.lines[l as usize] {
                    seen[y as usize] = u32::MAX;
                }
            }
        }

        // (b): every line not on x carries exactly one point collinear with x
        let mut stamp = vec![u32::MAX; self.lines.len()];
        for x in 0..self.point_count {
            let tag = x as u32;
            for &l in &self.point_lines[x] {
                stamp[l as usize] = tag;
            }
            for &l in &self.point_lines[x] {
                for &y in &self.lines[l as usize] {
                    if y as usize == x {
                        continue;
                    }
                    for &m in &self.point_lines[y as usize] {
                        if m == l {
                            continue;
                        }
                        if stamp[m as usize] == tag {
                            return Err(GqViolation::AxiomB { point: x, line: m as usize, projections: 2 });
                        }
                        stamp[m as usize] = tag;
                    }
                }
            }
            if let Some(m) = stamp.iter().position(|&st| st != tag) {
                return Err(GqViolation::AxiomB { point: x, line: m, projections: 0 });
            }
        }
        Ok(GQOrder { s: s1 - 1, t: t1 - 1 })
    }

    /// Connectivity of the point-line incidence graph.
    pub fn is_connected(&self) -> bool {
        if self.point_count == 0 {
            return self.lines.len() <= 1 && self.lines.iter().all(|l| l.is_empty());
        }
        let mut seen_p = vec![false; self.point_count];
        let mut seen_l = vec![false; self.lines.len()];
        let mut queue = VecDeque::from([0usize]);
        seen_p[0] = true;
        while let Some(p) = queue.pop_front() {
            for &l in &self.point_lines[p] {
                if !seen_l[l as usize] {
                    seen_l[l as usize] = true;
                    for &y in &self.lines[l as usize] {
                        if !seen_p[y as usize] {
                            seen_p[y as usize] = true;
                            queue.push_back(y as usize);
                        }
                    }
                }
            }
        }
        seen_p.iter().all(|&b| b) && seen_l.iter().all(|&b| b)
    }

    /// Three pairwise collinear points with no line through all of them.
    pub fn find_triangle(&self) -> Option<[usize; 3]> {
        for (l, line) in self.lines.iter().enumerate() {
            for (i, &a) in line.iter().enumerate() {
                for &b in &line[i + 1..] {
                    let common = self.collinear[a as usize].intersection(&self.collinear[b as usize]);
                    for c in common {
                        if !self.is_incident(c, l) {
                            return Some([a as usize, b as usize, c]);
                        }
                    }
                }
            }
        }
        None
    }

    pub fn has_triangle(&self) -> bool {
        self.find_triangle().is_some()
    }

    /// Restriction to a point subset and a line subset, relabelled monotonically.
    ///
    /// Each kept line is intersected with the kept points. The result stores its lines
    /// in canonical order, so use [`Self::find_line`] to locate a particular one.
    pub fn restrict(&self, name: &str, point_subset: &[usize], line_subset: &[usize]) -> Result<IncidenceStructure> {
        let mut relabel = vec![u32::MAX; self.point_count];
        for (i, &p) in point_subset.iter().enumerate() {
            self.ensure_point(p)?;
            relabel[p] = i as u32;
        }
        let lines: Vec<Vec<usize>> = line_subset
            .iter()
            .map(|&l| {
                self.lines[l].iter().filter(|&&p| relabel[p as usize] != u32::MAX).map(|&p| relabel[p as usize] as usize).collect()
            })
            .collect();
        let mut sub = IncidenceStructure::new(name, point_subset.len(), lines)?;
        if let Some(c) = &self.coords {
            let vectors = point_subset.iter().map(|&p| c.vectors[p].clone()).collect();
            sub = sub.with_coordinates(Coordinates { field: c.field, vectors })?;
        }
        Ok(sub)
    }

    /// The dual structure: lines become points and points become lines.
    pub fn dual(&self, name: &str) -> Result<IncidenceStructure> {
        let lines = self.point_lines.iter().map(|pl| pl.iter().map(|&l| l as usize).collect()).collect();
        IncidenceStructure::new(name, self.lines.len(), lines)
    }

    /// Disjoint union, points and lines of `other` shifted past those of `self`.
    pub fn disjoint_union(&self, other: &IncidenceStructure, name: &str) -> Result<IncidenceStructure> {
        let shift = self.point_count;
        let mut lines: Vec<Vec<usize>> = self.lines.iter().map(|l| l.iter().map(|&p| p as usize).collect()).collect();
        lines.extend(other.lines.iter().map(|l| l.iter().map(|&p| p as usize + shift).collect()));
        IncidenceStructure::new(name, self.point_count + other.point_count, lines)
    }
}

#[inline]
fn l_contains(line: &[u32], p: usize) -> bool {
    line.binary_search(&(p as u32)).is_ok()
}

/// Order `(s, t)` of a generalized quadrangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GQOrder {
    pub s: usize,
    pub t: usize,
}

impl GQOrder {
    pub fn new(s: usize, t: usize) -> Self {
        GQOrder { s, t }
    }

    pub fn is_thick(&self) -> bool {
        self.s >= 2 && self.t >= 2
    }

    pub fn point_count(&self) -> usize {
        (self.s + 1) * (self.s * self.t + 1)
    }

    pub fn line_count(&self) -> usize {
        (self.t + 1) * (self.s * self.t + 1)
    }
}

impl fmt::Display for GQOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.s, self.t)
    }
}

/// Why a structure failed the quadrangle check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum GqViolation {
    /// No points or no lines.
    Empty,
    /// Line sizes or point degrees are not constant.
    AxiomA { point: Option<usize>, line: Option<usize>, expected: usize, found: usize },
    /// A non-incident point-line pair with zero or several projections.
    AxiomB { point: usize, line: usize, projections: usize },
    /// Two points on two common lines.
    AxiomC { points: (usize, usize), lines: (usize, usize) },
    /// Regular but with s = 0 or t = 0 (or a single line): not a quadrangle of order ≥ 1.
    Degenerate { s: usize, t: usize },
}

impl GqViolation {
    pub fn axiom(&self) -> Option<char> {
        match self {
            GqViolation::AxiomA { .. } => Some('a'),
            GqViolation::AxiomB { .. } => Some('b'),
            GqViolation::AxiomC { .. } => Some('c'),
            _ => None,
        }
    }
}

impl fmt::Display for GqViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GqViolation::Empty => write!(f, "empty structure"),
            GqViolation::AxiomA { point: Some(p), expected, found, .. } => {
                write!(f, "axiom (a): point {p} is on {found} lines, expected {expected}")
            }
            GqViolation::AxiomA { line, expected, found, .. } => {
                write!(f, "axiom (a): line {} has {found} points, expected {expected}", line.unwrap_or(0))
            }
            GqViolation::AxiomB { point, line, projections } => {
                write!(f, "axiom (b): point {point} has {projections} projections onto line {line}")
            }
            GqViolation::AxiomC { points, lines } => {
                write!(f, "axiom (c): points {points:?} share lines {lines:?}")
            }
            GqViolation::Degenerate { s, t } => write!(f, "degenerate order ({s},{t})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_grid;

    fn fano() -> IncidenceStructure {
        let lines = vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ];
        IncidenceStructure::new("fano", 7, lines).unwrap()
    }

    #[test]
    fn lines_are_canonical() {
        let a = IncidenceStructure::new("a", 3, vec![vec![2, 1], vec![0, 1]]).unwrap();
        assert_eq!(a.lines(), &[vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn repeated_lines_rejected() {
        assert!(IncidenceStructure::new("x", 3, vec![vec![0, 1], vec![1, 0]]).is_err());
        assert!(IncidenceStructure::new("x", 3, vec![vec![0, 0]]).is_err());
        assert!(IncidenceStructure::new("x", 2, vec![vec![0, 2]]).is_err());
    }

    #[test]
    fn grid_is_order_s_1() {
        let g = build_grid(2).unwrap();
        assert_eq!(g.verify_gq_axioms(), Ok(GQOrder::new(2, 1)));
    }

    #[test]
    fn empty_is_distinct_from_axiom_failure() {
        let e = IncidenceStructure::new("e", 0, vec![]).unwrap();
        assert_eq!(e.verify_gq_axioms(), Err(GqViolation::Empty));
        assert_eq!(GqViolation::Empty.axiom(), None);
    }

    #[test]
    fn single_line_is_degenerate() {
        let g = IncidenceStructure::new("line", 3, vec![vec![0, 1, 2]]).unwrap();
        assert!(matches!(g.verify_gq_axioms(), Err(GqViolation::Degenerate { s: 2, t: 0 })));
    }

    #[test]
    fn perp_of_empty_is_everything() {
        let g = build_grid(2).unwrap();
        assert_eq!(g.perp_set(&[]).unwrap().len(), 9);
    }

    #[test]
    fn grid_perp_pair() {
        let g = build_grid(2).unwrap();
        // (0,0) and (1,1) are not collinear
        let (u, v) = (0, 4);
        assert!(!g.collinear(u, v));
        assert_eq!(g.perp_set(&[u, v]).unwrap().len(), 2);
    }

    #[test]
    fn grid_cl_of_collinear_pair_is_everything() {
        let g = build_grid(2).unwrap();
        let (u, v) = (0, 1);
        let cl = g.cl(u, v).unwrap();
        // oracle: brute force over the definition
        let bp = g.biperp(&[u, v]).unwrap();
        let brute: Vec<usize> =
            (0..9).filter(|&w| bp.iter().any(|&b| g.collinear(w, b))).collect();
        assert_eq!(cl, brute);
        assert_eq!(cl.len(), 9);
        assert!(g.cl(u, u).is_err());
    }

    #[test]
    fn fano_has_triangle() {
        let f = fano();
        let [a, b, c] = f.find_triangle().unwrap();
        assert!(f.collinear(a, b) && f.collinear(b, c) && f.collinear(a, c));
        assert!(!(0..7).any(|l| f.is_incident(a, l) && f.is_incident(b, l) && f.is_incident(c, l)));
    }

    #[test]
    fn disjoint_grids_are_disconnected() {
        let g = build_grid(2).unwrap();
        let u = g.disjoint_union(&g, "two grids").unwrap();
        assert!(g.is_connected());
        assert!(!u.is_connected());
    }

    #[test]
    fn dual_of_grid_is_dual_grid() {
        let g = build_grid(3).unwrap();
        let d = g.dual("dual").unwrap();
        assert_eq!(d.point_count(), 8);
        assert_eq!(d.line_count(), 16);
        assert_eq!(d.verify_gq_axioms(), Ok(GQOrder::new(1, 3)));
    }
}
