//! Semipartial geometry checks for ℰ.
//!
//! [`verify_spg`] reads nothing but an [`IncidenceStructure`], so it serves as an oracle
//! that is independent of how ℰ was assembled from rosettes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::incidence::IncidenceStructure;
use crate::subgeometry::SubGeometryEmbedding;
use crate::subtension::{DerivedPair, ThetaCensus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SPGParameters {
    pub s_star: usize,
    pub t_star: usize,
    pub alpha_star: usize,
    pub mu_star: usize,
}

impl fmt::Display for SPGParameters {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.s_star, self.t_star, self.alpha_star, self.mu_star)
    }
}

impl FromStr for SPGParameters {
    type Err = Error;

    /// Parses `s,t,a,m`.
    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<usize> = text
            .trim_matches(|c| c == '(' || c == ')')
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|e| Error::input(format!("bad SPG parameter {p:?}: {e}"))))
            .collect::<Result<_>>()?;
        match parts[..] {
            [s_star, t_star, alpha_star, mu_star] => Ok(SPGParameters { s_star, t_star, alpha_star, mu_star }),
            _ => Err(Error::input(format!("expected four comma-separated integers, got {text:?}"))),
        }
    }
}

/// Measured parameters. `mu_star` is `None` when every two points are collinear, so that
/// the μ-axiom holds for any value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpgReport {
    pub s_star: usize,
    pub t_star: usize,
    pub alpha_star: usize,
    pub mu_star: Option<usize>,
}

impl SpgReport {
    pub fn parameters(&self) -> Option<SPGParameters> {
        Some(SPGParameters { s_star: self.s_star, t_star: self.t_star, alpha_star: self.alpha_star, mu_star: self.mu_star? })
    }

    pub fn agrees_with(&self, p: &SPGParameters) -> bool {
        (self.s_star, self.t_star, self.alpha_star) == (p.s_star, p.t_star, p.alpha_star) && self.mu_star.is_none_or(|m| m == p.mu_star)
    }
}

impl fmt::Display for SpgReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.mu_star {
            Some(m) => write!(f, "({},{},{},{m})", self.s_star, self.t_star, self.alpha_star),
            None => write!(f, "({},{},{},vacuous)", self.s_star, self.t_star, self.alpha_star),
        }
    }
}

/// The first axiom that fails, with a witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpgFailure {
    Empty,
    LineSize { line: usize, size: usize, expected: usize },
    PointDegree { point: usize, degree: usize, expected: usize },
    TwoCommonLines { p: usize, q: usize },
    /// A point off a line sees a number of its points other than 0 and α*.
    Alpha { point: usize, line: usize, seen: usize, expected: usize },
    /// No point sees any point of a line it is not on.
    NoAlpha,
    Mu { p: usize, q: usize, common: usize, expected: usize },
    Mismatch { expected: SPGParameters, measured: SpgReport },
}

impl fmt::Display for SpgFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpgFailure::Empty => write!(f, "the geometry has no points or no lines"),
            SpgFailure::LineSize { line, size, expected } => write!(f, "line {line} has {size} points, expected {expected}"),
            SpgFailure::PointDegree { point, degree, expected } => write!(f, "point {point} is on {degree} lines, expected {expected}"),
            SpgFailure::TwoCommonLines { p, q } => write!(f, "points {p} and {q} share two lines"),
            SpgFailure::Alpha { point, line, seen, expected } => {
                write!(f, "point {point} is collinear with {seen} points of line {line}, expected 0 or {expected}")
            }
            SpgFailure::NoAlpha => write!(f, "no point is collinear with a point of a line missing it"),
            SpgFailure::Mu { p, q, common, expected } => write!(f, "non-collinear {p}, {q} have {common} common neighbours, expected {expected}"),
            SpgFailure::Mismatch { expected, measured } => write!(f, "measured {measured}, expected {expected}"),
        }
    }
}

/// Measures `(s*, t*, α*, μ*)` and checks every axiom, comparing against `expected` when given.
pub fn verify_spg(e: &IncidenceStructure, expected: Option<SPGParameters>) -> std::result::Result<SpgReport, SpgFailure> {
    if e.point_count() == 0 || e.line_count() == 0 {
        return Err(SpgFailure::Empty);
    }
    let k = e.line(0).len();
    for l in 0..e.line_count() {
        if e.line(l).len() != k {
            return Err(SpgFailure::LineSize { line: l, size: e.line(l).len(), expected: k });
        }
    }
    let r = e.lines_through(0).len();
    for p in 0..e.point_count() {
        if e.lines_through(p).len() != r {
            return Err(SpgFailure::PointDegree { point: p, degree: e.lines_through(p).len(), expected: r });
        }
    }
    let n = e.point_count();
    let mut hits = vec![0u32; n];
    for p in 0..n {
        hits.iter_mut().for_each(|h| *h = 0);
        for &l in e.lines_through(p) {
            for &q in e.line(l as usize) {
                let q = q as usize;
                if q != p {
                    hits[q] += 1;
                    if hits[q] > 1 {
                        return Err(SpgFailure::TwoCommonLines { p: p.min(q), q: p.max(q) });
                    }
                }
            }
        }
    }

    let mut alpha = None;
    for l in 0..e.line_count() {
        let row = e.line(l);
        for p in 0..n {
            if row.binary_search(&(p as u32)).is_ok() {
                continue;
            }
            let seen = row.iter().filter(|&&q| e.collinear(p, q as usize)).count();
            if seen == 0 {
                continue;
            }
            match alpha {
                None => alpha = Some(seen),
                Some(a) if a != seen => return Err(SpgFailure::Alpha { point: p, line: l, seen, expected: a }),
                Some(_) => {}
            }
        }
    }
    let alpha = alpha.ok_or(SpgFailure::NoAlpha)?;

    let mut mu = None;
    for p in 0..n {
        let perp_p = e.perp_bits(p);
        for q in p + 1..n {
            if e.collinear(p, q) {
                continue;
            }
            let common = perp_p.intersection(e.perp_bits(q)).count();
            match mu {
                None => mu = Some(common),
                Some(m) if m != common => return Err(SpgFailure::Mu { p, q, common, expected: m }),
                Some(_) => {}
            }
        }
    }

    let measured = SpgReport { s_star: k - 1, t_star: r - 1, alpha_star: alpha, mu_star: mu };
    match expected {
        Some(x) if !measured.agrees_with(&x) => Err(SpgFailure::Mismatch { expected: x, measured }),
        _ => Ok(measured),
    }
}

/// The hypotheses under which ℰ is known to be a semipartial geometry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateReport {
    pub s: usize,
    pub t: usize,
    pub t_prime: usize,
    pub theta: Option<usize>,
    pub t_prime_not_one: bool,
    pub t_is_s_t_prime: bool,
    /// `(θ-1)t = s²`.
    pub theta_relation: bool,
    pub uniform_theta_above_one: bool,
}

impl GateReport {
    pub fn passes(&self) -> bool {
        self.t_prime_not_one && self.t_is_s_t_prime && self.theta_relation && self.uniform_theta_above_one
    }

    /// `(s-1, t, θ, θ(t-t'))`, defined whenever θ is uniform.
    pub fn predicted(&self) -> Option<SPGParameters> {
        let theta = self.theta?;
        Some(SPGParameters {
            s_star: self.s - 1,
            t_star: self.t,
            alpha_star: theta,
            mu_star: theta * self.t.checked_sub(self.t_prime)?,
        })
    }
}

pub fn hypothesis_gate(emb: &SubGeometryEmbedding, census: &ThetaCensus) -> Result<GateReport> {
    let amb = emb.ambient_order().ok_or_else(|| Error::hypothesis("ambient has no constant order"))?;
    let sub = emb.sub_order().ok_or_else(|| Error::hypothesis("subgeometry is not a quadrangle"))?;
    let theta = census.uniform;
    Ok(GateReport {
        s: amb.s,
        t: amb.t,
        t_prime: sub.t,
        theta,
        t_prime_not_one: sub.t != 1,
        t_is_s_t_prime: amb.t == amb.s * sub.t,
        theta_relation: theta.is_some_and(|th| th >= 1 && (th - 1) * amb.t == amb.s * amb.s),
        uniform_theta_above_one: theta.is_some_and(|th| th > 1),
    })
}

/// Result of recomputing, from every witness line of a rosette, the ℰ-lines through an
/// ovoid that meet the rosette.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub pairs_checked: usize,
    /// `(rosette, ovoid)` pairs where two witness lines disagree or differ from ℰ.
    pub mismatches: Vec<(usize, usize)>,
}

impl WitnessReport {
    pub fn holds(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// For each rosette `R` and ovoid `O ∉ R`, and each witness line `L` of `R`, collects the
/// rosettes `R_{M_i}` with `M_i` joining a subtender `x_i` of `O` to its neighbour on `L`.
pub fn alpha_witness_check(pair: &DerivedPair) -> Result<WitnessReport> {
    let g = pair.ambient();
    let e = &pair.e;
    let mut rosette_of = vec![usize::MAX; g.line_count()];
    for (j, r) in pair.rosettes.iter().enumerate() {
        for &l in &r.witness_lines {
            rosette_of[l] = j;
        }
    }
    let mut report = WitnessReport::default();
    for (j, r) in pair.rosettes.iter().enumerate() {
        let row = e.line(j);
        for (o, ovoid) in pair.ovoids.iter().enumerate() {
            if row.binary_search(&(o as u32)).is_ok() {
                continue;
            }
            report.pairs_checked += 1;
            let direct: BTreeSet<usize> = e
                .lines_through(o)
                .iter()
                .map(|&m| m as usize)
                .filter(|&m| e.line(m).iter().any(|q| row.binary_search(q).is_ok()))
                .collect();
            let mut agree = true;
            for &l in &r.witness_lines {
                let mut via: BTreeSet<usize> = BTreeSet::new();
                if !g.collinear(ovoid.subtenders[0], r.base_point) {
                    for &x in &ovoid.subtenders {
                        let u = g.line(l).iter().map(|&p| p as usize).find(|&p| g.collinear(x, p));
                        let Some(m) = u.and_then(|u| g.line_through(x, u)) else {
                            return Err(Error::consistency(format!("subtender {x} sees no point of line {l}")));
                        };
                        via.insert(rosette_of[m]);
                    }
                }
                agree &= via == direct;
            }
            if !agree {
                report.mismatches.push((j, o));
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_grid, build_q5_with_q3, build_q5_with_q4};
    use crate::subtension::{build_derived_pair, theta_census};

    #[test]
    fn parse_and_display_round_trip() {
        let p: SPGParameters = "1,4,2,4".parse().unwrap();
        assert_eq!(p, SPGParameters { s_star: 1, t_star: 4, alpha_star: 2, mu_star: 4 });
        assert_eq!(p.to_string().parse::<SPGParameters>().unwrap(), p);
        assert!("1,2,3".parse::<SPGParameters>().is_err());
    }

    #[test]
    fn q5_q4_2_is_spg_1_4_2_4() {
        let (_, emb) = build_q5_with_q4(2).unwrap();
        let pair = build_derived_pair(&emb).unwrap();
        let gate = hypothesis_gate(&emb, &pair.census).unwrap();
        assert!(gate.passes());
        let want = gate.predicted().unwrap();
        assert_eq!(want, SPGParameters { s_star: 1, t_star: 4, alpha_star: 2, mu_star: 4 });
        // ℰ is K6 here, so μ* is vacuous
        let got = verify_spg(&pair.e, Some(want)).unwrap();
        assert_eq!(got.mu_star, None);
        assert!(got.agrees_with(&want));
        assert!(alpha_witness_check(&pair).unwrap().holds());
    }

    #[test]
    fn gate_fails_for_grid_section() {
        let (_, emb) = build_q5_with_q3(2).unwrap();
        let gate = hypothesis_gate(&emb, &theta_census(&emb).unwrap()).unwrap();
        assert!(!gate.t_prime_not_one);
        assert!(!gate.passes());
    }

    #[test]
    fn generalized_quadrangle_is_spg_with_alpha_one() {
        // a GQ of order (s,t) is an spg(s,t,1,t+1)
        let g = build_grid(3).unwrap();
        assert_eq!(verify_spg(&g, None).unwrap().parameters(), Some(SPGParameters { s_star: 3, t_star: 1, alpha_star: 1, mu_star: 2 }));
    }

    #[test]
    fn mismatch_is_reported() {
        let g = build_grid(2).unwrap();
        let wrong = SPGParameters { s_star: 2, t_star: 1, alpha_star: 1, mu_star: 3 };
        assert!(matches!(verify_spg(&g, Some(wrong)), Err(SpgFailure::Mismatch { .. })));
    }

    #[test]
    fn two_common_lines_are_caught() {
        let g = IncidenceStructure::new("bad", 3, vec![vec![0, 1], vec![0, 1, 2]]).unwrap();
        assert!(matches!(verify_spg(&g, None), Err(SpgFailure::LineSize { .. })));
        let h = IncidenceStructure::new("bad", 4, vec![vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3], vec![2, 3]]).unwrap();
        assert_eq!(verify_spg(&h, None).unwrap().mu_star, None);
    }
}
