//! Permutation groups via a deterministic Schreier–Sims stabilizer chain.

use crate::error::{Error, Result};

use super::perm::Perm;

#[derive(Clone, Debug)]
struct Level {
    base: u32,
    gens: Vec<Perm>,
    orbit: Vec<u32>,
    /// `transversal[β]` maps the base point to `β`.
    transversal: Vec<Option<Perm>>,
}

impl Level {
    fn new(base: u32, degree: usize) -> Level {
        let mut l = Level { base, gens: Vec::new(), orbit: Vec::new(), transversal: Vec::new() };
        l.rebuild(degree);
        l
    }

    fn rebuild(&mut self, degree: usize) {
        self.transversal = vec![None; degree];
        self.transversal[self.base as usize] = Some(Perm::identity(degree));
        self.orbit = vec![self.base];
        let mut i = 0;
        while i < self.orbit.len() {
            let b = self.orbit[i] as usize;
            for x in &self.gens {
                let c = x.image(b);
                if self.transversal[c].is_none() {
                    let u = self.transversal[b].as_ref().unwrap().then(x);
                    self.transversal[c] = Some(u);
                    self.orbit.push(c as u32);
                }
            }
            i += 1;
        }
    }
}

/// A group given by generators, with a stabilizer chain for order and membership.
#[derive(Clone, Debug)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Perm>,
    levels: Vec<Level>,
}

impl PermutationGroup {
    pub fn trivial(degree: usize) -> PermutationGroup {
        PermutationGroup { degree, generators: Vec::new(), levels: Vec::new() }
    }

    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<PermutationGroup> {
        PermutationGroup::with_base_prefix(degree, generators, &[])
    }

    /// Builds the chain with the given points first in the base.
    pub fn with_base_prefix(degree: usize, generators: Vec<Perm>, prefix: &[usize]) -> Result<PermutationGroup> {
        if let Some(g) = generators.iter().find(|g| g.degree() != degree) {
            return Err(Error::input(format!("generator of degree {} in a group of degree {degree}", g.degree())));
        }
        let generators: Vec<Perm> = generators.into_iter().filter(|g| !g.is_identity()).collect();
        let mut grp = PermutationGroup { degree, generators, levels: Vec::new() };
        grp.schreier_sims(prefix);
        Ok(grp)
    }

    fn schreier_sims(&mut self, prefix: &[usize]) {
        let n = self.degree;
        let mut base: Vec<u32> = prefix.iter().map(|&p| p as u32).collect();
        for g in &self.generators {
            if g.fixes_all(&base) {
                base.push(g.first_moved().unwrap() as u32);
            }
        }
        self.levels = base
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                let mut l = Level { base: b, gens: Vec::new(), orbit: Vec::new(), transversal: Vec::new() };
                l.gens = self.generators.iter().filter(|g| g.fixes_all(&base[..i])).cloned().collect();
                l.rebuild(n);
                l
            })
            .collect();

        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let li = i as usize;
            let mut restart = None;
            'scan: for bi in 0..self.levels[li].orbit.len() {
                let beta = self.levels[li].orbit[bi] as usize;
                for xi in 0..self.levels[li].gens.len() {
                    let level = &self.levels[li];
                    let x = &level.gens[xi];
                    let u_beta = level.transversal[beta].as_ref().unwrap();
                    let u_img = level.transversal[x.image(beta)].as_ref().unwrap();
                    let h = u_beta.then(x).then(&u_img.inverse());
                    if h.is_identity() {
                        continue;
                    }
                    let (y, j) = self.strip(h);
                    if j < self.levels.len() || !y.is_identity() {
                        if j == self.levels.len() {
                            let b = y.first_moved().unwrap() as u32;
                            self.levels.push(Level::new(b, n));
                        }
                        for l in (li + 1)..=j {
                            self.levels[l].gens.push(y.clone());
                            self.levels[l].rebuild(n);
                        }
                        restart = Some(j);
                        break 'scan;
                    }
                }
            }
            match restart {
                Some(j) => i = j as isize,
                None => i -= 1,
            }
        }
    }

    /// Sifts `g` through the chain; returns the residue and the level where sifting stopped.
    fn strip(&self, g: Perm) -> (Perm, usize) {
        let mut g = g;
        for (j, level) in self.levels.iter().enumerate() {
            let beta = g.image(level.base as usize);
            match &level.transversal[beta] {
                Some(u) => g = g.then(&u.inverse()),
                None => return (g, j),
            }
        }
        (g, self.levels.len())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base as usize).collect()
    }

    /// Orbit lengths along the chain, whose product is the order.
    pub fn basic_orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        let (r, j) = self.strip(g.clone());
        j == self.levels.len() && r.is_identity()
    }

    /// Same degree, same order, and each generator of one lies in the other.
    pub fn equals(&self, other: &PermutationGroup) -> bool {
        self.degree == other.degree
            && self.order() == other.order()
            && other.generators.iter().all(|g| self.contains(g))
            && self.generators.iter().all(|g| other.contains(g))
    }

    /// Orbit partition of `0..degree`, each orbit sorted, orbits ordered by least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut label = vec![usize::MAX; self.degree];
        let mut out = Vec::new();
        for start in 0..self.degree {
            if label[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            label[start] = id;
            let mut orbit = vec![start];
            let mut i = 0;
            while i < orbit.len() {
                let b = orbit[i];
                for g in &self.generators {
                    let c = g.image(b);
                    if label[c] == usize::MAX {
                        label[c] = id;
                        orbit.push(c);
                    }
                }
                i += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    /// All elements, in chain order. Intended for small groups only.
    pub fn elements(&self, limit: usize) -> Result<Vec<Perm>> {
        if self.order() > limit as u128 {
            return Err(Error::Budget { context: "element listing".into(), limit: limit as u64 });
        }
        let mut out = vec![Perm::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for g in &out {
                for &b in &level.orbit {
                    next.push(g.then(level.transversal[b as usize].as_ref().unwrap()));
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Image of the group under restriction to an invariant block `offset..offset+len`.
    pub fn restrict(&self, offset: usize, len: usize) -> Result<PermutationGroup> {
        let gens = self
            .generators
            .iter()
            .map(|g| g.restrict(offset, len).ok_or_else(|| Error::input("block is not invariant")))
            .collect::<Result<Vec<_>>>()?;
        PermutationGroup::new(len, gens)
    }

    /// The subgroup of elements with property `accept`, by backtracking along the chain.
    ///
    /// `prune(β, γ)` may reject a partial element sending base point `β` to `γ`; it must
    /// never reject a prefix of an accepted element.
    pub fn subgroup_search(
        &self,
        prune: impl Fn(usize, usize) -> bool,
        accept: impl Fn(&Perm) -> bool,
        budget: u64,
    ) -> Result<PermutationGroup> {
        let mut found: Vec<Perm> = Vec::new();
        let mut nodes = 0u64;
        let k = self.levels.len();
        for i in (0..k).rev() {
            let level = &self.levels[i];
            let beta = level.base as usize;
            for &gamma in &level.orbit {
                let gamma = gamma as usize;
                if gamma == beta || prune(beta, gamma) {
                    continue;
                }
                if orbit_of(beta, &found, self.degree).contains(&gamma) {
                    continue;
                }
                let u = level.transversal[gamma].as_ref().unwrap().clone();
                if let Some(g) = self.dfs(i + 1, u, &prune, &accept, &mut nodes, budget)? {
                    found.push(g);
                }
            }
        }
        PermutationGroup::with_base_prefix(self.degree, found, &self.base())
    }

    fn dfs(
        &self,
        j: usize,
        suffix: Perm,
        prune: &impl Fn(usize, usize) -> bool,
        accept: &impl Fn(&Perm) -> bool,
        nodes: &mut u64,
        budget: u64,
    ) -> Result<Option<Perm>> {
        *nodes += 1;
        if *nodes > budget {
            return Err(Error::Budget { context: "stabilizer chain backtrack".into(), limit: budget });
        }
        if j == self.levels.len() {
            return Ok(accept(&suffix).then_some(suffix));
        }
        let level = &self.levels[j];
        for &delta in &level.orbit {
            let img = suffix.image(delta as usize);
            if prune(level.base as usize, img) {
                continue;
            }
            let next = level.transversal[delta as usize].as_ref().unwrap().then(&suffix);
            if let Some(g) = self.dfs(j + 1, next, prune, accept, nodes, budget)? {
                return Ok(Some(g));
            }
        }
        Ok(None)
    }

    /// Setwise stabilizer of `set` by backtracking with the set at the front of the base.
    pub fn setwise_stabilizer(&self, set: &[usize], budget: u64) -> Result<PermutationGroup> {
        let mut inside = vec![false; self.degree];
        for &x in set {
            inside[x] = true;
        }
        let rebased = PermutationGroup::with_base_prefix(self.degree, self.generators.clone(), set)?;
        rebased.subgroup_search(
            |b, g| inside[b] != inside[g],
            |p| set.iter().all(|&x| inside[p.image(x)]),
            budget,
        )
    }
}

fn orbit_of(x: usize, gens: &[Perm], degree: usize) -> Vec<usize> {
    let mut seen = vec![false; degree];
    seen[x] = true;
    let mut orbit = vec![x];
    let mut i = 0;
    while i < orbit.len() {
        for g in gens {
            let c = g.image(orbit[i]);
            if !seen[c] {
                seen[c] = true;
                orbit.push(c);
            }
        }
        i += 1;
    }
    orbit
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Perm {
        Perm::from_images((0..n as u32).map(|i| (i + 1) % n as u32).collect()).unwrap()
    }

    fn transposition(n: usize, a: usize, b: usize) -> Perm {
        let mut v: Vec<u32> = (0..n as u32).collect();
        v.swap(a, b);
        Perm::from_images(v).unwrap()
    }

    #[test]
    fn symmetric_group_order() {
        for n in 2..=7 {
            let g = PermutationGroup::new(n, vec![cycle(n), transposition(n, 0, 1)]).unwrap();
            assert_eq!(g.order(), (1..=n as u128).product::<u128>());
        }
    }

    #[test]
    fn cyclic_and_membership() {
        let g = PermutationGroup::new(6, vec![cycle(6)]).unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.contains(&cycle(6).then(&cycle(6))));
        assert!(!g.contains(&transposition(6, 0, 1)));
        assert_eq!(g.orbits().len(), 1);
    }

    #[test]
    fn elements_match_order() {
        let g = PermutationGroup::new(5, vec![cycle(5), transposition(5, 0, 1)]).unwrap();
        let els = g.elements(1000).unwrap();
        assert_eq!(els.len(), 120);
        let mut sorted = els.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), 120);
    }

    #[test]
    fn setwise_stabilizer_in_s6() {
        let g = PermutationGroup::new(6, vec![cycle(6), transposition(6, 0, 1)]).unwrap();
        let s = g.setwise_stabilizer(&[0, 1], 1_000_000).unwrap();
        assert_eq!(s.order(), 2 * 24);
        let e = g.setwise_stabilizer(&[], 1_000_000).unwrap();
        assert_eq!(e.order(), 720);
    }

    #[test]
    fn base_prefix_does_not_change_order() {
        let gens = vec![cycle(7), transposition(7, 2, 5)];
        let a = PermutationGroup::new(7, gens.clone()).unwrap();
        let b = PermutationGroup::with_base_prefix(7, gens, &[6, 3, 1]).unwrap();
        assert_eq!(a.order(), b.order());
        assert!(a.equals(&b));
    }
}
