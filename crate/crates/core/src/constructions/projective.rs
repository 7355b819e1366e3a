//! Points of PG(n-1, q) and polar geometries defined by a form.

use std::collections::{BTreeSet, HashMap};

use crate::error::Result;
use crate::field::{Fe, Field};
use crate::incidence::{Coordinates, IncidenceStructure};

/// A point of projective space: a nonzero vector whose first nonzero entry is 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectivePoint {
    coords: Vec<Fe>,
}

impl ProjectivePoint {
    /// Normalizes `v`; `None` for the zero vector.
    pub fn new(field: &Field, v: &[Fe]) -> Option<Self> {
        field.normalize(v).map(|coords| ProjectivePoint { coords })
    }

    pub fn coords(&self) -> &[Fe] {
        &self.coords
    }
}

/// All points of PG(n-1, q), listed in lexicographic order of their normalized coordinates.
pub struct ProjectiveSpace<'f> {
    field: &'f Field,
    n: usize,
    points: Vec<Vec<Fe>>,
    index: HashMap<u64, usize>,
}

impl<'f> ProjectiveSpace<'f> {
    pub fn new(field: &'f Field, n: usize) -> Self {
        let q = field.order();
        let mut points = Vec::new();
        let mut v = vec![0 as Fe; n];
        'outer: loop {
            if v.iter().find(|&&x| x != 0) == Some(&1) {
                points.push(v.clone());
            }
            for i in (0..n).rev() {
                v[i] += 1;
                if (v[i] as usize) < q {
                    continue 'outer;
                }
                v[i] = 0;
            }
            break;
        }
        let mut space = ProjectiveSpace { field, n, points, index: HashMap::new() };
        space.index = space.points.iter().enumerate().map(|(i, p)| (space.key(p), i)).collect();
        space
    }

    fn key(&self, v: &[Fe]) -> u64 {
        let q = self.field.order() as u64;
        v.iter().fold(0u64, |acc, &x| acc * q + x as u64)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[Vec<Fe>] {
        &self.points
    }

    /// Index of the point represented by `v`, after normalization.
    pub fn index_of(&self, v: &[Fe]) -> Option<usize> {
        let p = self.field.normalize(v)?;
        self.index.get(&self.key(&p)).copied()
    }

    /// Indices of the q+1 points on the line spanned by two distinct points.
    pub fn line_through(&self, a: usize, b: usize) -> Vec<usize> {
        let f = self.field;
        let (u, v) = (&self.points[a], &self.points[b]);
        let mut pts = vec![a];
        for lambda in f.elements() {
            let w: Vec<Fe> = u.iter().zip(v).map(|(&x, &y)| f.add(y, f.mul(lambda, x))).collect();
            pts.push(self.index_of(&w).expect("span of two points"));
        }
        pts.sort_unstable();
        pts
    }
}

/// The polar geometry of a form on GF(q)^n: singular points and totally singular lines.
///
/// `singular` decides whether a point is on the variety; `orthogonal` is the associated
/// polarity. A line is kept when its two spanning points are singular and orthogonal.
pub(crate) fn polar_geometry(
    name: &str,
    field: &Field,
    n: usize,
    singular: impl Fn(&[Fe]) -> bool,
    orthogonal: impl Fn(&[Fe], &[Fe]) -> bool,
) -> Result<IncidenceStructure> {
    let space = ProjectiveSpace::new(field, n);
    let sing: Vec<usize> = (0..space.points().len()).filter(|&i| singular(&space.points()[i])).collect();
    let mut relabel = vec![usize::MAX; space.points().len()];
    for (j, &i) in sing.iter().enumerate() {
        relabel[i] = j;
    }
    let mut lines = BTreeSet::new();
    for (a_pos, &a) in sing.iter().enumerate() {
        for &b in &sing[a_pos + 1..] {
            if !orthogonal(&space.points()[a], &space.points()[b]) {
                continue;
            }
            let line = space.line_through(a, b);
            // only record a line from its two smallest points
            if line[0] != a || line[1] != b {
                continue;
            }
            let mapped: Vec<usize> = line.iter().map(|&p| relabel[p]).collect();
            debug_assert!(mapped.iter().all(|&p| p != usize::MAX));
            lines.insert(mapped);
        }
    }
    let vectors = sing.iter().map(|&i| space.points()[i].clone()).collect();
    IncidenceStructure::new(name, sing.len(), lines.into_iter().collect())?
        .with_coordinates(Coordinates { field: field.spec(), vectors })
}

/// Polar form `B(u,v) = Q(u+v) - Q(u) - Q(v)` of a quadratic form.
pub(crate) fn polarize<'a>(field: &'a Field, quad: &'a impl Fn(&[Fe]) -> Fe) -> impl Fn(&[Fe], &[Fe]) -> Fe + 'a {
    move |u, v| {
        let w: Vec<Fe> = u.iter().zip(v).map(|(&a, &b)| field.add(a, b)).collect();
        field.sub(field.sub(quad(&w), quad(u)), quad(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pg_point_counts() {
        let f = Field::new(3).unwrap();
        assert_eq!(ProjectiveSpace::new(&f, 3).points().len(), 13);
        assert_eq!(ProjectiveSpace::new(&f, 4).points().len(), 40);
        let f4 = Field::new(4).unwrap();
        assert_eq!(ProjectiveSpace::new(&f4, 5).points().len(), 341);
    }

    #[test]
    fn normalization_is_unique() {
        let f = Field::new(5).unwrap();
        let a = ProjectivePoint::new(&f, &[0, 2, 4]).unwrap();
        let b = ProjectivePoint::new(&f, &[0, 3, 1]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coords(), &[0, 1, 2]);
        assert!(ProjectivePoint::new(&f, &[0, 0, 0]).is_none());
    }

    #[test]
    fn lines_have_q_plus_one_points() {
        let f = Field::new(4).unwrap();
        let s = ProjectiveSpace::new(&f, 3);
        let l = s.line_through(0, 7);
        assert_eq!(l.len(), 5);
        assert!(l.contains(&0) && l.contains(&7));
    }
}
