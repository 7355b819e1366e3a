//! Automorphism groups, stabilizers, induced actions and extensions.

mod extension;
mod group;
mod perm;
mod search;

pub use extension::{extend_automorphism, ExtensionMode, ExtensionReport};
pub use group::PermutationGroup;
pub use perm::{Perm, Permutation};
pub use search::{automorphism_group, coloured_automorphism_group, find_isomorphism, DEFAULT_BUDGET};

use serde::{Deserialize, Serialize};

use crate::covers::{factorize_lower, GeometryMorphism, Orientation};
use crate::error::{Error, Result};
use crate::incidence::IncidenceStructure;
use crate::subgeometry::SubGeometryEmbedding;
use crate::subtension::DerivedPair;

/// Generators of a group on the flat point-then-line domain, as point/line permutations.
pub fn generator_permutations(group: &PermutationGroup, g: &IncidenceStructure) -> Vec<Permutation> {
    group.generators().iter().map(|p| Permutation::from_perm(p, g.point_count())).collect()
}

fn flat_set(g: &IncidenceStructure, points: &[usize], lines: &[usize]) -> Vec<usize> {
    points.iter().copied().chain(lines.iter().map(|&l| l + g.point_count())).collect()
}

/// Stabilizer of a set of points and lines inside `group`, by backtracking along its chain.
pub fn setwise_stabilizer(
    group: &PermutationGroup,
    g: &IncidenceStructure,
    points: &[usize],
    lines: &[usize],
    budget: u64,
) -> Result<PermutationGroup> {
    group.setwise_stabilizer(&flat_set(g, points, lines), budget)
}

/// Stabilizer of the subquadrangle in the full automorphism group, by a coloured search.
pub fn subgeometry_stabilizer(emb: &SubGeometryEmbedding, budget: u64) -> Result<PermutationGroup> {
    let g = emb.ambient();
    let pc: Vec<u32> = (0..g.point_count()).map(|p| emb.contains_point(p) as u32).collect();
    let lc: Vec<u32> = (0..g.line_count()).map(|l| emb.contains_line(l) as u32).collect();
    coloured_automorphism_group(g, &pc, &lc, budget)
}

/// Automorphisms fixing every point and line of the subquadrangle.
pub fn elementwise_kernel(emb: &SubGeometryEmbedding, budget: u64) -> Result<PermutationGroup> {
    let g = emb.ambient();
    let mut pc = vec![0u32; g.point_count()];
    for (i, &p) in emb.points().iter().enumerate() {
        pc[p] = i as u32 + 1;
    }
    let mut lc = vec![0u32; g.line_count()];
    for (j, &l) in emb.lines().iter().enumerate() {
        lc[l] = j as u32 + 1;
    }
    coloured_automorphism_group(g, &pc, &lc, budget)
}

/// A group action induced on a smaller domain, with the size of its kernel.
#[derive(Clone, Debug)]
pub struct InducedAction {
    pub group: PermutationGroup,
    pub source_order: u128,
    pub induced_order: u128,
    pub kernel_order: u128,
}

impl InducedAction {
    /// The kernel of the action is exactly the supplied kernel.
    pub fn faithful_modulo_kernel(&self) -> bool {
        self.source_order == self.induced_order * self.kernel_order
    }
}

/// Restriction of an ambient automorphism to the subquadrangle, by subgeometry index.
pub fn restrict_to_subgeometry(emb: &SubGeometryEmbedding, p: &Permutation) -> Option<Permutation> {
    let points = emb.points().iter().map(|&x| emb.sub_index(p.points[x])).collect::<Option<Vec<_>>>()?;
    Permutation::from_points(emb.structure(), points)
}

/// The action of the subquadrangle stabilizer on `S'`.
pub fn induced_on_subgeometry(stabilizer: &PermutationGroup, emb: &SubGeometryEmbedding, kernel: &PermutationGroup) -> Result<InducedAction> {
    let g = emb.ambient();
    let sub = emb.structure();
    let mut gens = Vec::new();
    for p in generator_permutations(stabilizer, g) {
        let r = restrict_to_subgeometry(emb, &p).ok_or_else(|| Error::input("an element does not stabilize the subquadrangle"))?;
        gens.push(r.to_perm());
    }
    for k in generator_permutations(kernel, g) {
        if !restrict_to_subgeometry(emb, &k).is_some_and(|r| r.is_identity()) {
            return Err(Error::input("a kernel element moves the subquadrangle"));
        }
    }
    let group = PermutationGroup::new(sub.point_count() + sub.line_count(), gens)?;
    Ok(InducedAction { source_order: stabilizer.order(), induced_order: group.order(), kernel_order: kernel.order(), group })
}

/// The automorphism of ℰ induced by an automorphism of `S'`, acting on ovoids by point-set image.
/// `None` if some ovoid is not sent to an ovoid.
pub fn act_on_e(pair: &DerivedPair, phi: &Permutation) -> Option<Permutation> {
    let emb = &pair.embedding;
    let points = pair
        .ovoids
        .iter()
        .map(|o| pair.ovoid_index(&crate::covers::map_sub_points(emb, &phi.points, &o.points)))
        .collect::<Option<Vec<_>>>()?;
    Permutation::from_points(&pair.e, points)
}

/// The action of the subquadrangle stabilizer on ℰ.
pub fn induced_on_e(stabilizer: &PermutationGroup, pair: &DerivedPair, kernel: &PermutationGroup) -> Result<InducedAction> {
    let emb = &pair.embedding;
    let g = emb.ambient();
    let mut gens = Vec::new();
    for p in generator_permutations(stabilizer, g) {
        let r = restrict_to_subgeometry(emb, &p).ok_or_else(|| Error::input("an element does not stabilize the subquadrangle"))?;
        let a = act_on_e(pair, &r).ok_or_else(|| Error::consistency("an automorphism of S' does not preserve Ω"))?;
        gens.push(a.to_perm());
    }
    let group = PermutationGroup::new(pair.e.point_count() + pair.e.line_count(), gens)?;
    Ok(InducedAction { source_order: stabilizer.order(), induced_order: group.order(), kernel_order: kernel.order(), group })
}

/// Aut(ℰ) found directly and as the stabilizer of Ω in Aut(S'), both acting on Ω.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BrownComparison {
    pub direct_order: u128,
    pub stabilizer_order: u128,
    pub equal: bool,
}

pub fn aut_e_two_ways(pair: &DerivedPair, budget: u64) -> Result<BrownComparison> {
    let (amb, sub) = pair.order()?;
    if pair.census.uniform != Some(2) || sub.t != sub.s || amb.t != amb.s * amb.s || sub.s != amb.s {
        return Err(Error::hypothesis("needs a 2-subtended subquadrangle of order (u,u) in a quadrangle of order (u,u²)"));
    }
    let n_omega = pair.e.point_count();
    let direct = automorphism_group(&pair.e, budget)?.restrict(0, n_omega)?;

    let sub_g = pair.embedding.structure();
    let n_sub = sub_g.point_count();
    let aut_sub = automorphism_group(sub_g, budget)?.restrict(0, n_sub)?;
    let maps_omega = |p: &Perm| {
        let pts: Vec<usize> = p.images().iter().map(|&x| x as usize).collect();
        pair.ovoids
            .iter()
            .all(|o| pair.ovoid_index(&crate::covers::map_sub_points(&pair.embedding, &pts, &o.points)).is_some())
    };
    let stab = aut_sub.subgroup_search(|_, _| false, maps_omega, budget)?;
    let mut gens = Vec::new();
    for p in stab.generators() {
        let phi = Permutation::from_points(sub_g, p.images().iter().map(|&x| x as usize).collect())
            .ok_or_else(|| Error::consistency("a point permutation of S' is not a collineation"))?;
        let a = act_on_e(pair, &phi).ok_or_else(|| Error::consistency("the stabilizer of Ω does not act on ℰ"))?;
        gens.push(Perm::from_images(a.points.iter().map(|&x| x as u32).collect())?);
    }
    let on_omega = PermutationGroup::new(n_omega, gens)?;
    let equal = direct.equals(&on_omega);
    if !equal {
        return Err(Error::consistency(format!(
            "Aut(ℰ) has order {} but the stabilizer of Ω induces a group of order {}",
            direct.order(),
            on_omega.order()
        )));
    }
    Ok(BrownComparison { direct_order: direct.order(), stabilizer_order: stab.order(), equal })
}

/// Whether `π ∘ α̃ = α ∘ π` on every point and line of 𝒜.
pub fn lift_commutes(pair: &DerivedPair, alpha: &Permutation, lift: &Permutation) -> Result<bool> {
    let pi = pair.require_cover()?;
    let gamma = pi.then_automorphism(alpha);
    Ok(pi_after(pair, pi, lift)? == gamma)
}

/// `π ∘ α̃` as a morphism 𝒜 → ℰ.
fn pi_after(pair: &DerivedPair, pi: &GeometryMorphism, lift: &Permutation) -> Result<GeometryMorphism> {
    let point_map = pair
        .a_points
        .iter()
        .map(|&x| pair.a_point(lift.points[x]).map(|i| pi.point_map[i]))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::input("α̃ does not preserve 𝒜"))?;
    let mut a_line_of = vec![usize::MAX; pair.ambient().line_count()];
    for (i, &l) in pair.a_lines.iter().enumerate() {
        a_line_of[l] = i;
    }
    let line_map = pair
        .a_lines
        .iter()
        .map(|&l| match a_line_of[lift.lines[l]] {
            usize::MAX => None,
            i => Some(pi.line_map[i]),
        })
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::input("α̃ does not preserve 𝒜"))?;
    Ok(GeometryMorphism { point_map, line_map })
}

/// An ambient automorphism α̃ with `γ = π ∘ α̃`, if one exists.
pub fn decompose_higher(pair: &DerivedPair, gamma: &GeometryMorphism, budget: u64) -> Result<Option<Permutation>> {
    let pi = pair.require_cover()?;
    let f = factorize_lower(pair, gamma)?;
    let phi = match f.orientation {
        Orientation::Forward => f.zeta,
        Orientation::Inverse => f.zeta.inverse(),
    };
    let report = extend_automorphism(&pair.embedding, &phi, ExtensionMode::FindOne, budget)?;
    let Some(lift) = report.extensions.into_iter().next() else { return Ok(None) };
    if pi_after(pair, pi, &lift)? != *gamma {
        return Err(Error::consistency("an extension of the induced automorphism does not satisfy γ = π ∘ α̃"));
    }
    Ok(Some(lift))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HigherDecompositionReport {
    pub aut_e_order: u128,
    pub generators: usize,
    pub induced: usize,
    /// For each generator α of Aut(ℰ), an ambient α̃ with `π ∘ α̃ = α ∘ π`.
    pub lifts: Vec<Option<Permutation>>,
}

impl HigherDecompositionReport {
    pub fn verdict(&self) -> bool {
        self.induced == self.generators
    }
}

/// Every generator of Aut(ℰ) is induced by an automorphism of the ambient quadrangle.
pub fn higher_decomposition_check(pair: &DerivedPair, budget: u64) -> Result<HigherDecompositionReport> {
    let pi = pair.require_cover()?.clone();
    let aut_e = automorphism_group(&pair.e, budget)?;
    let gens = generator_permutations(&aut_e, &pair.e);
    let mut lifts = Vec::with_capacity(gens.len());
    for alpha in &gens {
        let gamma = pi.then_automorphism(alpha);
        let lift = decompose_higher(pair, &gamma, budget)?;
        if let Some(l) = &lift {
            if !lift_commutes(pair, alpha, l)? {
                return Err(Error::consistency("π ∘ α̃ differs from α ∘ π"));
            }
        }
        lifts.push(lift);
    }
    let induced = lifts.iter().filter(|l| l.is_some()).count();
    Ok(HigherDecompositionReport { aut_e_order: aut_e.order(), generators: gens.len(), induced, lifts })
}
