//! Extending an automorphism of a full subquadrangle to the ambient quadrangle.
//!
//! An extension must send each external point `w` to a subtender of `φ(O_w)`, so the
//! search only chooses among the θ subtenders, pruned by collinearity with the
//! external points placed so far.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subgeometry::SubGeometryEmbedding;
use crate::subtension::SubtensionTable;

use super::perm::Permutation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExtensionMode {
    FindAll,
    FindOne,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionReport {
    /// On the points and lines of the subquadrangle.
    pub base_automorphism: Permutation,
    /// Ambient automorphisms restricting to the base automorphism.
    pub extensions: Vec<Permutation>,
    /// Number of ambient automorphisms fixing the subquadrangle elementwise.
    pub kernel_order: usize,
}

struct Extender<'a> {
    emb: &'a SubGeometryEmbedding,
    table: &'a SubtensionTable,
    by_points: HashMap<&'a [usize], usize>,
    order: Vec<usize>,
    image: Vec<usize>,
    used: Vec<bool>,
    found: Vec<Permutation>,
    mode: ExtensionMode,
    nodes: u64,
    budget: u64,
}

const UNSET: usize = usize::MAX;

impl Extender<'_> {
    fn run(&mut self, depth: usize) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget { context: "automorphism extension".into(), limit: self.budget });
        }
        if self.mode == ExtensionMode::FindOne && !self.found.is_empty() {
            return Ok(());
        }
        let emb = self.emb;
        let g = emb.ambient();
        if depth == self.order.len() {
            if let Some(p) = Permutation::from_points(g, self.image.clone()).filter(|p| p.is_automorphism_of(g)) {
                self.found.push(p);
            }
            return Ok(());
        }
        let w = self.order[depth];
        let ovoid = &self.table.ovoids[self.table.ovoid_of[w].expect("external point")];
        let mut target: Vec<usize> = ovoid.points.iter().map(|&p| self.image[p]).collect();
        target.sort_unstable();
        let Some(&k) = self.by_points.get(target.as_slice()) else { return Ok(()) };
        let table = self.table;
        for &c in &table.ovoids[k].subtenders {
            if self.used[c] {
                continue;
            }
            if self.order[..depth].iter().any(|&v| g.collinear(w, v) != g.collinear(c, self.image[v])) {
                continue;
            }
            self.image[w] = c;
            self.used[c] = true;
            self.run(depth + 1)?;
            self.used[c] = false;
            self.image[w] = UNSET;
        }
        Ok(())
    }
}

fn bfs_external(emb: &SubGeometryEmbedding) -> Vec<usize> {
    let g = emb.ambient();
    let mut seen = vec![false; g.point_count()];
    let mut order = Vec::new();
    for start in emb.external_points() {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for y in g.perp_bits(x).ones() {
                if !seen[y] && !emb.contains_point(y) {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    order
}

fn search(emb: &SubGeometryEmbedding, table: &SubtensionTable, phi: &Permutation, mode: ExtensionMode, budget: u64) -> Result<Vec<Permutation>> {
    let g = emb.ambient();
    let mut image = vec![UNSET; g.point_count()];
    let mut used = vec![false; g.point_count()];
    for (i, &j) in phi.points.iter().enumerate() {
        image[emb.ambient_point(i)] = emb.ambient_point(j);
        used[emb.ambient_point(j)] = true;
    }
    let by_points = table.ovoids.iter().enumerate().map(|(i, o)| (o.points.as_slice(), i)).collect();
    let mut ext = Extender { emb, table, by_points, order: bfs_external(emb), image, used, found: Vec::new(), mode, nodes: 0, budget };
    ext.run(0)?;
    Ok(ext.found)
}

/// Ambient automorphisms extending `phi`, an automorphism of `emb.structure()`.
pub fn extend_automorphism(emb: &SubGeometryEmbedding, phi: &Permutation, mode: ExtensionMode, budget: u64) -> Result<ExtensionReport> {
    if !emb.flags().is_full {
        return Err(Error::hypothesis("the subgeometry is not full"));
    }
    if !phi.is_automorphism_of(emb.structure()) {
        return Err(Error::input("φ is not an automorphism of the subquadrangle"));
    }
    let table = SubtensionTable::new(emb)?;
    let identity = Permutation::identity(emb.structure());
    let kernel = search(emb, &table, &identity, ExtensionMode::FindAll, budget)?;
    let extensions = if phi.is_identity() && mode == ExtensionMode::FindAll {
        kernel.clone()
    } else {
        search(emb, &table, phi, mode, budget)?
    };
    if mode == ExtensionMode::FindAll && !extensions.is_empty() {
        if extensions.len() != kernel.len() {
            return Err(Error::consistency(format!("{} extensions but a kernel of order {}", extensions.len(), kernel.len())));
        }
        // η: kernel → extensions, k ↦ k then e₀, is onto
        let mut shifted: Vec<Permutation> = kernel.iter().map(|k| k.then(&extensions[0])).collect();
        shifted.sort_by(|a, b| a.points.cmp(&b.points));
        let mut sorted = extensions.clone();
        sorted.sort_by(|a, b| a.points.cmp(&b.points));
        if shifted != sorted {
            return Err(Error::consistency("extensions are not a coset of the elementwise kernel"));
        }
    }
    Ok(ExtensionReport { base_automorphism: phi.clone(), extensions, kernel_order: kernel.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{build_q4_with_q3, build_q5_with_q4};

    #[test]
    fn identity_of_q4_2_extends_twice() {
        let (_, emb) = build_q5_with_q4(2).unwrap();
        let id = Permutation::identity(emb.structure());
        let r = extend_automorphism(&emb, &id, ExtensionMode::FindAll, 1_000_000).unwrap();
        assert_eq!(r.extensions.len(), 2);
        assert_eq!(r.kernel_order, 2);
        assert!(r.extensions.iter().any(|e| e.is_identity()));
    }

    #[test]
    fn grid_generators_extend_into_q4_2() {
        let (_, emb) = build_q4_with_q3(2).unwrap();
        let grp = crate::automorphisms::automorphism_group(emb.structure(), 1_000_000).unwrap();
        assert_eq!(grp.order(), 72);
        for g in grp.generators() {
            let phi = Permutation::from_perm(g, emb.structure().point_count());
            let r = extend_automorphism(&emb, &phi, ExtensionMode::FindAll, 1_000_000).unwrap();
            assert_eq!(r.kernel_order, 1);
            assert_eq!(r.extensions.len(), 1);
        }
    }
}
