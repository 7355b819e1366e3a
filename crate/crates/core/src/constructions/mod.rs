//! Concrete quadrangles over small fields.
//!
//! Classical quadrangles are built as polar geometries in projective space,
//! with coordinates attached. Fixed forms:
//!
//! * Q(4,q): `x0² - x1x2 - x3x4`, and Q(3,q) is its `x0 = 0` section.
//! * Q(5,q): `x0² + b·x0x1 + c·x1² + x2x3 + x4x5` with `(b, c)` the first pair making the
//!   binary part irreducible. Q(4,q) is the `x1 = 0` section, Q(3,q) the `x0 = x1 = 0` one.
//! * H(n,q²): `Σ xᵢ^(q+1)`, and H(3,q²) is the `x4 = 0` section of H(4,q²).
//! * W(q): all points of PG(3,q) with the form `x0y1 - x1y0 + x2y3 - x3y2`.

mod kantor_knuth;
mod projective;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use kantor_knuth::{build_kantor_knuth, build_kantor_knuth_from_clan, KantorKnuth, QClan, QClanSpec};
pub use projective::{ProjectivePoint, ProjectiveSpace};

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::incidence::IncidenceStructure;
use crate::subgeometry::SubGeometryEmbedding;
use projective::{polar_geometry, polarize};

/// The `(s+1) × (s+1)` grid. Point `(i, j)` has index `i(s+1) + j`.
pub fn build_grid(s: usize) -> Result<IncidenceStructure> {
    if s == 0 {
        return Err(Error::input("grid needs s >= 1"));
    }
    let n = s + 1;
    let mut lines = Vec::with_capacity(2 * n);
    for i in 0..n {
        lines.push((0..n).map(|j| i * n + j).collect());
        lines.push((0..n).map(|j| j * n + i).collect());
    }
    IncidenceStructure::new(format!("grid({s})"), n * n, lines)
}

fn quadric(name: &str, field: &Field, n: usize, quad: impl Fn(&[Fe]) -> Fe) -> Result<IncidenceStructure> {
    let b = polarize(field, &quad);
    polar_geometry(name, field, n, |v| quad(v) == 0, |u, v| b(u, v) == 0)
}

/// Parabolic quadric Q(4,q).
pub fn build_q4(q: usize) -> Result<IncidenceStructure> {
    let f = Field::new(q)?;
    let quad = |v: &[Fe]| f.sub(f.sub(f.mul(v[0], v[0]), f.mul(v[1], v[2])), f.mul(v[3], v[4]));
    quadric(&format!("Q(4,{q})"), &f, 5, quad)
}

/// Elliptic quadric Q(5,q).
pub fn build_q5(q: usize) -> Result<IncidenceStructure> {
    let f = Field::new(q)?;
    let (b, c) = irreducible_binary(&f);
    let quad = |v: &[Fe]| {
        let bin = f.add(f.add(f.mul(v[0], v[0]), f.mul(b, f.mul(v[0], v[1]))), f.mul(c, f.mul(v[1], v[1])));
        f.add(bin, f.add(f.mul(v[2], v[3]), f.mul(v[4], v[5])))
    };
    quadric(&format!("Q(5,{q})"), &f, 6, quad)
}

/// First `(b, c)` in encoding order with `x² + bx + c` irreducible.
fn irreducible_binary(f: &Field) -> (Fe, Fe) {
    for b in f.elements() {
        for c in f.elements() {
            if f.elements().all(|x| f.add(f.add(f.mul(x, x), f.mul(b, x)), c) != 0) {
                return (b, c);
            }
        }
    }
    unreachable!("every finite field has an irreducible quadratic")
}

/// Symplectic quadrangle W(q).
pub fn build_w(q: usize) -> Result<IncidenceStructure> {
    let f = Field::new(q)?;
    let form = |u: &[Fe], v: &[Fe]| {
        let a = f.sub(f.mul(u[0], v[1]), f.mul(u[1], v[0]));
        let b = f.sub(f.mul(u[2], v[3]), f.mul(u[3], v[2]));
        f.add(a, b)
    };
    polar_geometry(&format!("W({q})"), &f, 4, |_| true, |u, v| form(u, v) == 0)
}

/// Hermitian variety H(n,q²) in PG(n, q²), built over GF(q²).
pub fn build_hermitian(n: usize, q: usize) -> Result<IncidenceStructure> {
    let f = Field::new(q * q)?;
    let herm = |u: &[Fe], v: &[Fe]| {
        u.iter().zip(v).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, f.pow(b, q as u64))))
    };
    polar_geometry(&format!("H({n},{})", q * q), &f, n + 1, |v| herm(v, v) == 0, |u, v| herm(u, v) == 0)
}

fn section(
    ambient: IncidenceStructure,
    keep: impl Fn(&[Fe]) -> bool,
) -> Result<(Arc<IncidenceStructure>, SubGeometryEmbedding)> {
    let coords = ambient.coords().expect("constructed with coordinates").vectors.clone();
    let ambient = Arc::new(ambient);
    let emb = SubGeometryEmbedding::full_on_points(ambient.clone(), |p| keep(&coords[p]))?;
    Ok((ambient, emb))
}

/// Q(5,q) with its parabolic section Q(4,q) at `x1 = 0`.
pub fn build_q5_with_q4(q: usize) -> Result<(Arc<IncidenceStructure>, SubGeometryEmbedding)> {
    section(build_q5(q)?, |v| v[1] == 0)
}

/// Q(5,q) with its hyperbolic section Q(3,q) at `x0 = x1 = 0`.
pub fn build_q5_with_q3(q: usize) -> Result<(Arc<IncidenceStructure>, SubGeometryEmbedding)> {
    section(build_q5(q)?, |v| v[0] == 0 && v[1] == 0)
}

/// Q(4,q) with its grid section Q(3,q) at `x0 = 0`.
pub fn build_q4_with_q3(q: usize) -> Result<(Arc<IncidenceStructure>, SubGeometryEmbedding)> {
    section(build_q4(q)?, |v| v[0] == 0)
}

/// H(4,q²) with its section H(3,q²) at `x4 = 0`. The argument is `q`, not `q²`.
pub fn build_h4_with_h3(q: usize) -> Result<(Arc<IncidenceStructure>, SubGeometryEmbedding)> {
    section(build_hermitian(4, q)?, |v| v[4] == 0)
}

/// `true` iff the coordinate vectors of `points` span a subspace of vector dimension at most 3.
pub fn points_coplanar(g: &IncidenceStructure, points: &[usize]) -> Result<bool> {
    let coords = g
        .coords()
        .ok_or_else(|| Error::hypothesis(format!("{} carries no coordinates", g.name())))?;
    let field = Field::from_spec(coords.field)?;
    let mut rows = Vec::with_capacity(points.len());
    for &p in points {
        g.ensure_point(p)?;
        rows.push(coords.vectors[p].clone());
    }
    Ok(field.rank(&rows) <= 3)
}

/// Geometry families exposed on the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Grid,
    W,
    Q4,
    Q5q4,
    Q4q3,
    Q5q3,
    H4h3,
    Kk,
}

/// A constructed geometry, with its distinguished subgeometry or line when the family has one.
pub struct Built {
    pub geometry: Arc<IncidenceStructure>,
    pub embedding: Option<SubGeometryEmbedding>,
    pub infinity_line: Option<usize>,
    pub classical: Option<bool>,
}

pub fn build_family(family: Family, q: usize, sigma: Option<u32>) -> Result<Built> {
    let plain = |g: IncidenceStructure| Built { geometry: Arc::new(g), embedding: None, infinity_line: None, classical: None };
    let pair = |(g, e): (Arc<IncidenceStructure>, SubGeometryEmbedding)| Built {
        geometry: g,
        embedding: Some(e),
        infinity_line: None,
        classical: None,
    };
    Ok(match family {
        Family::Grid => plain(build_grid(q)?),
        Family::W => plain(build_w(q)?),
        Family::Q4 => plain(build_q4(q)?),
        Family::Q5q4 => pair(build_q5_with_q4(q)?),
        Family::Q4q3 => pair(build_q4_with_q3(q)?),
        Family::Q5q3 => pair(build_q5_with_q3(q)?),
        Family::H4h3 => pair(build_h4_with_h3(q)?),
        // σ defaults to the Frobenius map, or to the identity (the classical case) over a prime field
        Family::Kk => {
            let field = Field::new(q)?;
            let spec = QClanSpec {
                q,
                sigma: sigma.unwrap_or(if field.spec().h > 1 { field.characteristic() } else { 1 }),
                m: field.first_nonsquare().ok_or_else(|| Error::input("q-clans need odd q"))?,
            };
            let kk = build_kantor_knuth(&spec)?;
            Built {
                geometry: Arc::new(kk.geometry),
                embedding: None,
                infinity_line: Some(kk.infinity_line),
                classical: Some(kk.classical),
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::GQOrder;

    fn check(g: &IncidenceStructure, s: usize, t: usize) {
        let o = g.verify_gq_axioms().unwrap_or_else(|e| panic!("{}: {e}", g.name()));
        assert_eq!(o, GQOrder::new(s, t), "{}", g.name());
        assert_eq!(g.point_count(), o.point_count());
        assert_eq!(g.line_count(), o.line_count());
    }

    #[test]
    fn grids() {
        for (s, p, l) in [(1, 4, 4), (2, 9, 6), (4, 25, 10)] {
            let g = build_grid(s).unwrap();
            assert_eq!((g.point_count(), g.line_count()), (p, l));
            check(&g, s, 1);
        }
        assert!(build_grid(0).is_err());
    }

    #[test]
    fn classical_orders() {
        for q in [2, 3, 4] {
            check(&build_q4(q).unwrap(), q, q);
            check(&build_w(q).unwrap(), q, q);
        }
        for q in [2, 3] {
            check(&build_q5(q).unwrap(), q, q * q);
        }
        check(&build_hermitian(3, 2).unwrap(), 4, 2);
        check(&build_hermitian(4, 2).unwrap(), 4, 8);
    }

    #[test]
    fn sections() {
        let (g, e) = build_q5_with_q4(2).unwrap();
        assert_eq!((g.point_count(), g.line_count()), (27, 45));
        assert_eq!((e.points().len(), e.lines().len()), (15, 15));
        let (g, e) = build_q5_with_q4(3).unwrap();
        assert_eq!((g.point_count(), g.line_count()), (112, 280));
        assert_eq!((e.points().len(), e.lines().len()), (40, 40));
        assert!(e.flags().is_geometric_hyperplane);

        let (_, e) = build_q4_with_q3(3).unwrap();
        assert_eq!(e.sub_order(), Some(GQOrder::new(3, 1)));
        assert!(e.flags().is_full);

        let (g, e) = build_h4_with_h3(2).unwrap();
        assert_eq!(g.point_count(), 165);
        assert_eq!(e.sub_order(), Some(GQOrder::new(4, 2)));
        assert!(e.flags().is_geometric_hyperplane);

        let (_, e) = build_q5_with_q3(2).unwrap();
        assert_eq!(e.sub_order(), Some(GQOrder::new(2, 1)));
        assert!(e.flags().is_full && !e.flags().is_geometric_hyperplane);
    }

    #[test]
    fn coplanarity() {
        let g = build_q4(2).unwrap();
        let line: Vec<usize> = g.line(0).iter().map(|&p| p as usize).collect();
        assert!(points_coplanar(&g, &line).unwrap());
        // four points whose coordinates span the whole space minus one dimension or more
        let coords = &g.coords().unwrap().vectors;
        let f = Field::new(2).unwrap();
        let mut chosen: Vec<usize> = Vec::new();
        for p in 0..g.point_count() {
            let mut rows: Vec<Vec<Fe>> = chosen.iter().map(|&c| coords[c].clone()).collect();
            rows.push(coords[p].clone());
            if f.rank(&rows) == rows.len() {
                chosen.push(p);
            }
            if chosen.len() == 4 {
                break;
            }
        }
        assert!(!points_coplanar(&g, &chosen).unwrap());
        assert!(points_coplanar(&build_grid(2).unwrap(), &[0]).is_err());
    }

    #[test]
    fn perp_sizes() {
        let g = build_q4(2).unwrap();
        for x in 0..g.point_count() {
            assert_eq!(g.perp(x).unwrap().len(), 7);
        }
    }
}
