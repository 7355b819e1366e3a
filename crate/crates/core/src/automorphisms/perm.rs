use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incidence::IncidenceStructure;

/// A permutation of `0..n`, composed left to right: `x^(gh) = (x^g)^h`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn identity(n: usize) -> Perm {
        Perm((0..n as u32).collect())
    }

    pub fn from_images(images: Vec<u32>) -> Result<Perm> {
        let mut seen = vec![false; images.len()];
        for &x in &images {
            let x = x as usize;
            if x >= images.len() || seen[x] {
                return Err(Error::input("image list is not a permutation"));
            }
            seen[x] = true;
        }
        Ok(Perm(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn image(&self, x: usize) -> usize {
        self.0[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.0
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Perm) -> Perm {
        Perm(self.0.iter().map(|&x| other.0[x as usize]).collect())
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0; self.0.len()];
        for (i, &x) in self.0.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm(inv)
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn first_moved(&self) -> Option<usize> {
        self.0.iter().enumerate().find(|&(i, &x)| i as u32 != x).map(|(i, _)| i)
    }

    pub fn fixes_all(&self, points: &[u32]) -> bool {
        points.iter().all(|&p| self.0[p as usize] == p)
    }

    /// Restriction to an invariant block `offset..offset+len`, renumbered from 0.
    pub fn restrict(&self, offset: usize, len: usize) -> Option<Perm> {
        let block = &self.0[offset..offset + len];
        if block.iter().any(|&x| (x as usize) < offset || x as usize >= offset + len) {
            return None;
        }
        Some(Perm(block.iter().map(|&x| x - offset as u32).collect()))
    }
}

/// A bijection of the points and of the lines of one incidence structure.
///
/// As a [`Perm`] it acts on the flat domain of points followed by lines.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Permutation {
    pub points: Vec<usize>,
    pub lines: Vec<usize>,
}

impl Permutation {
    pub fn identity(g: &IncidenceStructure) -> Permutation {
        Permutation { points: (0..g.point_count()).collect(), lines: (0..g.line_count()).collect() }
    }

    /// Completes a point bijection to lines. `None` if some line is not sent onto a line.
    pub fn from_points(g: &IncidenceStructure, points: Vec<usize>) -> Option<Permutation> {
        let mut lines = Vec::with_capacity(g.line_count());
        for l in 0..g.line_count() {
            let img: Vec<u32> = g.line(l).iter().map(|&p| points[p as usize] as u32).collect();
            lines.push(g.find_line(&img)?);
        }
        let p = Permutation { points, lines };
        p.is_bijective().then_some(p)
    }

    pub fn from_perm(p: &Perm, point_count: usize) -> Permutation {
        let img = p.images();
        Permutation {
            points: img[..point_count].iter().map(|&x| x as usize).collect(),
            lines: img[point_count..].iter().map(|&x| x as usize - point_count).collect(),
        }
    }

    pub fn to_perm(&self) -> Perm {
        let np = self.points.len();
        Perm(self.points.iter().map(|&x| x as u32).chain(self.lines.iter().map(|&x| (x + np) as u32)).collect())
    }

    fn is_bijective(&self) -> bool {
        let check = |v: &[usize]| {
            let mut seen = vec![false; v.len()];
            v.iter().all(|&x| x < v.len() && !std::mem::replace(&mut seen[x], true))
        };
        check(&self.points) && check(&self.lines)
    }

    /// Bijective on points and lines, and `x I L ⇔ x^g I L^g`.
    pub fn is_automorphism_of(&self, g: &IncidenceStructure) -> bool {
        if self.points.len() != g.point_count() || self.lines.len() != g.line_count() || !self.is_bijective() {
            return false;
        }
        // equal line sizes plus bijectivity make the forward inclusion an equivalence
        (0..g.line_count()).all(|l| {
            let target = self.lines[l];
            g.line(l).len() == g.line(target).len() && g.line(l).iter().all(|&p| g.is_incident(self.points[p as usize], target))
        })
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation {
            points: self.points.iter().map(|&x| other.points[x]).collect(),
            lines: self.lines.iter().map(|&x| other.lines[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let inv = |v: &[usize]| {
            let mut out = vec![0; v.len()];
            for (i, &x) in v.iter().enumerate() {
                out[x] = i;
            }
            out
        };
        Permutation { points: inv(&self.points), lines: inv(&self.lines) }
    }

    pub fn is_identity(&self) -> bool {
        self.points.iter().enumerate().all(|(i, &x)| i == x) && self.lines.iter().enumerate().all(|(i, &x)| i == x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::build_grid;

    #[test]
    fn composition_is_left_to_right() {
        let a = Perm::from_images(vec![1, 2, 0]).unwrap();
        let b = Perm::from_images(vec![0, 2, 1]).unwrap();
        // 0 -a-> 1 -b-> 2
        assert_eq!(a.then(&b).image(0), 2);
        assert!(a.then(&a.inverse()).is_identity());
        assert!(Perm::from_images(vec![0, 0]).is_err());
    }

    #[test]
    fn transpose_of_grid() {
        let g = build_grid(2).unwrap();
        let pts = (0..9).map(|p| (p % 3) * 3 + p / 3).collect();
        let t = Permutation::from_points(&g, pts).unwrap();
        assert!(t.is_automorphism_of(&g));
        assert!(t.then(&t).is_identity());
        let flat = t.to_perm();
        assert_eq!(Permutation::from_perm(&flat, 9), t);
    }

    #[test]
    fn non_collineation_is_rejected() {
        let g = build_grid(2).unwrap();
        // swap two points of one row only
        let mut pts: Vec<usize> = (0..9).collect();
        pts.swap(0, 4);
        assert!(Permutation::from_points(&g, pts).is_none());
    }
}
