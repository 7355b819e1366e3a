//! The Kantor–Knuth quadrangle of order (q, q²) from its q-clan.
//!
//! The flock quadrangle of order (q², q) is the coset geometry of a group
//! `G = {(α, c, β) : α, β ∈ F², c ∈ F}` with product
//! `(α, c, β)(α', c', β') = (α + α', c + c' + β·α', β + β')`
//! and the subgroup families
//!
//! ```text
//! A(t)  = {(α, α A_t αᵀ, α K_t)}     A(∞)  = {(0, 0, β)}
//! A*(t) = {(α, c, α K_t)}            A*(∞) = {(0, c, β)}
//! ```
//!
//! where `K_t = A_t + A_tᵀ`. Points are the elements of `G`, the cosets `A*(t)g` and a
//! symbol `(∞)`; lines are the cosets `A(t)g` and the symbols `[A*(t)]`. The returned
//! geometry is the dual, in which `(∞)` becomes the line `[∞]`.

use crate::error::{Error, Result};
use crate::field::{Fe, Field};
use crate::incidence::IncidenceStructure;

type Mat = [[Fe; 2]; 2];

/// Kantor–Knuth q-clan parameters: `A_t = [[t, 0], [0, -m t^σ]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QClanSpec {
    pub q: usize,
    /// Exponent of the field automorphism `x ↦ x^sigma`; 1 is the identity.
    pub sigma: u32,
    /// A non-square of GF(q).
    pub m: Fe,
}

/// A family of 2×2 matrices `A_t`, one for each `t ∈ GF(q)`, satisfying the q-clan condition.
#[derive(Clone, Debug)]
pub struct QClan {
    field: Field,
    matrices: Vec<Mat>,
}

impl QClan {
    pub fn kantor_knuth(spec: &QClanSpec) -> Result<QClan> {
        let field = Field::new(spec.q)?;
        let p = field.characteristic();
        let h = field.spec().h;
        if !(0..h).any(|i| p.pow(i) == spec.sigma) {
            return Err(Error::input(format!("x -> x^{} is not an automorphism of GF({})", spec.sigma, spec.q)));
        }
        if spec.m as usize >= spec.q || field.is_square(spec.m) {
            return Err(Error::input(format!("m = {} is not a non-square of GF({})", spec.m, spec.q)));
        }
        let neg_m = field.neg(spec.m);
        let matrices = field
            .elements()
            .map(|t| [[t, 0], [0, field.mul(neg_m, field.pow(t, spec.sigma as u64))]])
            .collect();
        QClan::new(field, matrices)
    }

    /// Validates the q-clan condition for odd q: for `t ≠ u`, with `A_t - A_u` in upper
    /// triangular form `[[x, y], [0, z]]`, the value `y² - 4xz` must be a non-square.
    pub fn new(field: Field, matrices: Vec<Mat>) -> Result<QClan> {
        let q = field.order();
        if field.characteristic() == 2 {
            return Err(Error::input("only odd q is supported for q-clans"));
        }
        if matrices.len() != q {
            return Err(Error::input(format!("a q-clan needs {q} matrices, got {}", matrices.len())));
        }
        let f = &field;
        let four = f.from_int(4);
        for t in 0..q {
            for u in (t + 1)..q {
                let (a, b) = (&matrices[t], &matrices[u]);
                let x = f.sub(a[0][0], b[0][0]);
                let y = f.sub(f.add(a[0][1], a[1][0]), f.add(b[0][1], b[1][0]));
                let z = f.sub(a[1][1], b[1][1]);
                let disc = f.sub(f.mul(y, y), f.mul(four, f.mul(x, z)));
                if f.is_square(disc) {
                    return Err(Error::input(format!("q-clan condition fails for t = {t}, u = {u}")));
                }
            }
        }
        Ok(QClan { field, matrices })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn matrices(&self) -> &[Mat] {
        &self.matrices
    }

    /// `t ↦ A_t` is GF(q)-linear (up to the symmetric part), which gives the classical quadrangle.
    pub fn is_linear(&self) -> bool {
        let f = &self.field;
        let norm = |m: &Mat| [m[0][0], f.add(m[0][1], m[1][0]), m[1][1]];
        let base0 = norm(&self.matrices[0]);
        let base1 = norm(&self.matrices[1]);
        f.elements().all(|t| {
            let got = norm(&self.matrices[t as usize]);
            (0..3).all(|i| got[i] == f.add(base0[i], f.mul(t, f.sub(base1[i], base0[i]))))
        })
    }
}

/// The dual of the flock quadrangle: order (q, q²), with the line `[∞]`.
#[derive(Clone, Debug)]
pub struct KantorKnuth {
    pub geometry: IncidenceStructure,
    pub infinity_line: usize,
    pub classical: bool,
}

pub fn build_kantor_knuth(spec: &QClanSpec) -> Result<KantorKnuth> {
    build_kantor_knuth_from_clan(&QClan::kantor_knuth(spec)?)
}

struct Group<'a> {
    f: &'a Field,
    q: usize,
}

impl Group<'_> {
    fn decode(&self, g: usize) -> [Fe; 5] {
        let mut out = [0; 5];
        let mut g = g;
        for d in out.iter_mut().rev() {
            *d = (g % self.q) as Fe;
            g /= self.q;
        }
        out
    }

    fn encode(&self, e: [Fe; 5]) -> usize {
        e.iter().fold(0, |acc, &d| acc * self.q + d as usize)
    }

    fn mul(&self, x: [Fe; 5], y: [Fe; 5]) -> [Fe; 5] {
        let f = self.f;
        let dot = f.add(f.mul(x[3], y[0]), f.mul(x[4], y[1]));
        [
            f.add(x[0], y[0]),
            f.add(x[1], y[1]),
            f.add(f.add(x[2], y[2]), dot),
            f.add(x[3], y[3]),
            f.add(x[4], y[4]),
        ]
    }
}

pub fn build_kantor_knuth_from_clan(clan: &QClan) -> Result<KantorKnuth> {
    let f = clan.field();
    let q = f.order();
    let grp = Group { f, q };
    let order = q.pow(5);
    let pairs: Vec<[Fe; 2]> = f.elements().flat_map(|a| f.elements().map(move |b| [a, b])).collect();

    // subgroups A(t), A*(t); index q stands for t = ∞
    let mut small: Vec<Vec<[Fe; 5]>> = Vec::with_capacity(q + 1);
    let mut star: Vec<Vec<[Fe; 5]>> = Vec::with_capacity(q + 1);
    for a in clan.matrices() {
        let k = [[f.add(a[0][0], a[0][0]), f.add(a[0][1], a[1][0])], [f.add(a[1][0], a[0][1]), f.add(a[1][1], a[1][1])]];
        let ak = |al: &[Fe; 2]| [f.add(f.mul(al[0], k[0][0]), f.mul(al[1], k[1][0])), f.add(f.mul(al[0], k[0][1]), f.mul(al[1], k[1][1]))];
        let quad = |al: &[Fe; 2]| {
            let cross = f.mul(f.mul(al[0], al[1]), f.add(a[0][1], a[1][0]));
            f.add(f.add(f.mul(f.mul(al[0], al[0]), a[0][0]), cross), f.mul(f.mul(al[1], al[1]), a[1][1]))
        };
        small.push(pairs.iter().map(|al| { let b = ak(al); [al[0], al[1], quad(al), b[0], b[1]] }).collect());
        star.push(
            pairs
                .iter()
                .flat_map(|al| {
                    let b = ak(al);
                    f.elements().map(move |c| [al[0], al[1], c, b[0], b[1]])
                })
                .collect(),
        );
    }
    small.push(pairs.iter().map(|b| [0, 0, 0, b[0], b[1]]).collect());
    star.push(pairs.iter().flat_map(|b| f.elements().map(move |c| [0, 0, c, b[0], b[1]])).collect());

    // right coset labels
    let label = |sub: &[[Fe; 5]], expected: usize| -> Result<Vec<u32>> {
        let mut id = vec![u32::MAX; order];
        let mut next = 0u32;
        for g in 0..order {
            if id[g] != u32::MAX {
                continue;
            }
            let ge = grp.decode(g);
            for a in sub {
                id[grp.encode(grp.mul(*a, ge))] = next;
            }
            next += 1;
        }
        if next as usize != expected {
            return Err(Error::consistency(format!("expected {expected} cosets, found {next}")));
        }
        Ok(id)
    };
    let q2 = q * q;
    let q3 = q2 * q;
    let mut small_id = Vec::with_capacity(q + 1);
    let mut star_id = Vec::with_capacity(q + 1);
    for ti in 0..=q {
        small_id.push(label(&small[ti], q3)?);
        star_id.push(label(&star[ti], q2)?);
    }

    // points of the dual: cosets A(t)g, then [A*(t)]
    let small_line = |ti: usize, id: u32| ti * q3 + id as usize;
    let bracket = |ti: usize| (q + 1) * q3 + ti;
    let point_count = (q + 1) * q3 + q + 1;

    let mut lines: Vec<Vec<usize>> = Vec::with_capacity(order + (q + 1) * q2 + 1);
    for g in 0..order {
        lines.push((0..=q).map(|ti| small_line(ti, small_id[ti][g])).collect());
    }
    for ti in 0..=q {
        let mut members: Vec<Vec<usize>> = vec![Vec::with_capacity(q + 1); q2];
        for g in 0..order {
            let m = &mut members[star_id[ti][g] as usize];
            let l = small_line(ti, small_id[ti][g]);
            if !m.contains(&l) {
                m.push(l);
            }
        }
        for mut m in members {
            m.push(bracket(ti));
            lines.push(m);
        }
    }
    let infinity: Vec<usize> = (0..=q).map(bracket).collect();
    lines.push(infinity.clone());

    let geometry = IncidenceStructure::new(format!("KK({q}) dual"), point_count, lines)?;
    let key: Vec<u32> = infinity.iter().map(|&p| p as u32).collect();
    let infinity_line = geometry.find_line(&key).expect("[∞] was inserted");
    Ok(KantorKnuth { geometry, infinity_line, classical: clan.is_linear() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::GQOrder;

    #[test]
    fn classical_q3_has_order_3_9() {
        let f = Field::new(3).unwrap();
        let spec = QClanSpec { q: 3, sigma: 1, m: f.first_nonsquare().unwrap() };
        let kk = build_kantor_knuth(&spec).unwrap();
        assert!(kk.classical);
        assert_eq!(kk.geometry.point_count(), 112);
        assert_eq!(kk.geometry.verify_gq_axioms(), Ok(GQOrder::new(3, 9)));
        assert_eq!(kk.geometry.line(kk.infinity_line).len(), 4);
    }

    #[test]
    fn rejects_square_m_and_bad_sigma() {
        assert!(QClan::kantor_knuth(&QClanSpec { q: 9, sigma: 3, m: 1 }).is_err());
        let f = Field::new(9).unwrap();
        let m = f.first_nonsquare().unwrap();
        assert!(QClan::kantor_knuth(&QClanSpec { q: 9, sigma: 2, m }).is_err());
        assert!(QClan::kantor_knuth(&QClanSpec { q: 9, sigma: 3, m }).is_ok());
    }

    #[test]
    fn tampered_clan_is_rejected() {
        let f = Field::new(9).unwrap();
        let m = f.first_nonsquare().unwrap();
        let clan = QClan::kantor_knuth(&QClanSpec { q: 9, sigma: 3, m }).unwrap();
        assert!(!clan.is_linear());
        let mut mats = clan.matrices().to_vec();
        // use a square for one value of t
        let t = 2;
        mats[t][1][1] = f.neg(f.pow(t as Fe, 3));
        assert!(QClan::new(f, mats).is_err());
    }
}
