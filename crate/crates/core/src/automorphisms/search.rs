//! Automorphisms and isomorphisms of incidence structures by partition refinement
//! and backtracking on the bipartite incidence graph.
//!
//! Vertices are the points followed by the lines. Points and lines always start in
//! different cells, so no search ever maps a point to a line.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};
use crate::incidence::IncidenceStructure;

use super::group::PermutationGroup;
use super::perm::{Perm, Permutation};

/// Default node budget for searches.
pub const DEFAULT_BUDGET: u64 = 5_000_000;

struct Graph {
    point_count: usize,
    adj: Vec<Vec<u32>>,
}

impl Graph {
    fn new(g: &IncidenceStructure) -> Graph {
        let np = g.point_count();
        let mut adj: Vec<Vec<u32>> = (0..np).map(|p| g.lines_through(p).iter().map(|&l| l + np as u32).collect()).collect();
        adj.extend(g.lines().iter().map(|l| l.clone()));
        for a in &mut adj {
            a.sort_unstable();
        }
        Graph { point_count: np, adj }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }
}

#[derive(Clone)]
struct Partition {
    cell_of: Vec<u32>,
    cells: usize,
    invariant: u64,
}

impl Partition {
    fn initial(graph: &Graph, colours: &[u32]) -> Partition {
        let np = graph.point_count;
        let key = |v: usize| ((v >= np) as u32, colours[v]);
        let mut keys: Vec<(u32, u32)> = (0..graph.len()).map(key).collect();
        keys.sort_unstable();
        keys.dedup();
        let cell_of = (0..graph.len()).map(|v| keys.binary_search(&key(v)).unwrap() as u32).collect();
        let mut p = Partition { cell_of, cells: keys.len(), invariant: 0 };
        p.refine(graph);
        p
    }

    /// Equitable refinement. New cells are ordered by (old cell, neighbour-cell multiset),
    /// which keeps the ordering isomorphism invariant.
    fn refine(&mut self, graph: &Graph) {
        let n = graph.len();
        if n == 0 {
            return;
        }
        let mut keyed: Vec<(u32, Vec<u32>, u32)> = Vec::with_capacity(n);
        loop {
            keyed.clear();
            for v in 0..n {
                let mut nb: Vec<u32> = graph.adj[v].iter().map(|&u| self.cell_of[u as usize]).collect();
                nb.sort_unstable();
                keyed.push((self.cell_of[v], nb, v as u32));
            }
            keyed.sort_unstable();
            let mut hasher = DefaultHasher::new();
            let mut id = 0u32;
            let mut run = 0usize;
            for i in 0..n {
                if i > 0 && (keyed[i].0 != keyed[i - 1].0 || keyed[i].1 != keyed[i - 1].1) {
                    (keyed[i - 1].0, &keyed[i - 1].1, run).hash(&mut hasher);
                    id += 1;
                    run = 0;
                }
                run += 1;
                self.cell_of[keyed[i].2 as usize] = id;
            }
            (keyed[n - 1].0, &keyed[n - 1].1, run).hash(&mut hasher);
            let cells = id as usize + 1;
            if cells == self.cells {
                self.invariant = hasher.finish();
                return;
            }
            self.cells = cells;
        }
    }

    fn is_discrete(&self) -> bool {
        self.cells == self.cell_of.len()
    }

    fn target_cell(&self) -> Option<(u32, Vec<u32>)> {
        let mut size = vec![0usize; self.cells];
        for &c in &self.cell_of {
            size[c as usize] += 1;
        }
        let target = size.iter().position(|&s| s > 1)? as u32;
        let members = (0..self.cell_of.len() as u32).filter(|&v| self.cell_of[v as usize] == target).collect();
        Some((target, members))
    }

    fn individualize(&self, graph: &Graph, w: u32) -> Partition {
        let target = self.cell_of[w as usize];
        let cell_of = self
            .cell_of
            .iter()
            .enumerate()
            .map(|(v, &c)| match c.cmp(&target) {
                std::cmp::Ordering::Less => c,
                std::cmp::Ordering::Equal => c + (v as u32 != w) as u32,
                std::cmp::Ordering::Greater => c + 1,
            })
            .collect();
        let mut p = Partition { cell_of, cells: self.cells + 1, invariant: 0 };
        p.refine(graph);
        p
    }

    fn order(&self) -> Vec<u32> {
        let mut pos = vec![0u32; self.cell_of.len()];
        for (v, &c) in self.cell_of.iter().enumerate() {
            pos[c as usize] = v as u32;
        }
        pos
    }
}

struct PathLevel {
    partition: Partition,
    target: u32,
    members: Vec<u32>,
    chosen: u32,
}

struct FirstPath {
    levels: Vec<PathLevel>,
    leaf: Partition,
}

impl FirstPath {
    fn build(graph: &Graph, root: Partition) -> FirstPath {
        let mut levels = Vec::new();
        let mut cur = root;
        while let Some((target, members)) = cur.target_cell() {
            let chosen = members[0];
            let next = cur.individualize(graph, chosen);
            levels.push(PathLevel { partition: cur, target, members, chosen });
            cur = next;
        }
        FirstPath { levels, leaf: cur }
    }

    fn signature(&self, depth: usize) -> (usize, u64) {
        let p = self.levels.get(depth).map_or(&self.leaf, |l| &l.partition);
        (p.cells, p.invariant)
    }
}

struct Searcher<'a> {
    source: &'a Graph,
    target: &'a Graph,
    path: &'a FirstPath,
    nodes: u64,
    budget: u64,
}

impl Searcher<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::Budget { context: "incidence graph search".into(), limit: self.budget });
        }
        Ok(())
    }

    /// Searches below `node` (at `depth` in the target tree) for a leaf giving an isomorphism.
    fn descend(&mut self, node: &Partition, depth: usize) -> Result<Option<Perm>> {
        self.tick()?;
        if node.is_discrete() {
            return Ok(self.leaf_map(node));
        }
        let Some((target, members)) = node.target_cell() else { return Ok(None) };
        if depth >= self.path.levels.len() || target != self.path.levels[depth].target {
            return Ok(None);
        }
        for w in members {
            let child = node.individualize(self.target, w);
            if (child.cells, child.invariant) != self.path.signature(depth + 1) {
                continue;
            }
            if let Some(p) = self.descend(&child, depth + 1)? {
                return Ok(Some(p));
            }
        }
        Ok(None)
    }

    fn leaf_map(&self, leaf: &Partition) -> Option<Perm> {
        let a = self.path.leaf.order();
        let b = leaf.order();
        let mut images = vec![0u32; a.len()];
        for k in 0..a.len() {
            images[a[k] as usize] = b[k];
        }
        let p = Perm::from_images(images).ok()?;
        maps_edges(self.source, self.target, &p).then_some(p)
    }
}

fn maps_edges(g: &Graph, h: &Graph, p: &Perm) -> bool {
    let mut buf = Vec::new();
    (0..g.len()).all(|v| {
        buf.clear();
        buf.extend(g.adj[v].iter().map(|&u| p.image(u as usize) as u32));
        buf.sort_unstable();
        buf == h.adj[p.image(v)]
    })
}

fn orbit_of(x: u32, gens: &[Perm], n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[x as usize] = true;
    let mut stack = vec![x as usize];
    while let Some(y) = stack.pop() {
        for g in gens {
            let z = g.image(y);
            if !seen[z] {
                seen[z] = true;
                stack.push(z);
            }
        }
    }
    seen
}

fn search_group(graph: &Graph, colours: &[u32], budget: u64) -> Result<PermutationGroup> {
    let n = graph.len();
    let root = Partition::initial(graph, colours);
    let path = FirstPath::build(graph, root);
    let mut searcher = Searcher { source: graph, target: graph, path: &path, nodes: 0, budget };
    let mut gens: Vec<Perm> = Vec::new();
    for depth in (0..path.levels.len()).rev() {
        let level = &path.levels[depth];
        let mut handled = orbit_of(level.chosen, &gens, n);
        for &w in &level.members {
            if handled[w as usize] {
                continue;
            }
            let child = level.partition.individualize(graph, w);
            let found = if (child.cells, child.invariant) == path.signature(depth + 1) {
                searcher.descend(&child, depth + 1)?
            } else {
                None
            };
            match found {
                Some(g) => {
                    gens.push(g);
                    handled = orbit_of(level.chosen, &gens, n);
                }
                None => {
                    // nothing sends the chosen vertex anywhere in the orbit of w
                    for (v, inside) in orbit_of(w, &gens, n).into_iter().enumerate() {
                        handled[v] |= inside;
                    }
                }
            }
        }
    }
    PermutationGroup::new(n, gens)
}

/// Full automorphism group, acting on points `0..np` and lines `np..np+nl`.
pub fn automorphism_group(g: &IncidenceStructure, budget: u64) -> Result<PermutationGroup> {
    coloured_automorphism_group(g, &vec![0; g.point_count()], &vec![0; g.line_count()], budget)
}

/// Automorphisms preserving the given point and line colours.
pub fn coloured_automorphism_group(
    g: &IncidenceStructure,
    point_colours: &[u32],
    line_colours: &[u32],
    budget: u64,
) -> Result<PermutationGroup> {
    if point_colours.len() != g.point_count() || line_colours.len() != g.line_count() {
        return Err(Error::input("colour vectors must cover every point and line"));
    }
    let graph = Graph::new(g);
    let colours: Vec<u32> = point_colours.iter().chain(line_colours).copied().collect();
    search_group(&graph, &colours, budget)
}

/// An isomorphism `g → h` if one exists. The result maps points of `g` to points of `h`
/// and lines to lines.
pub fn find_isomorphism(g: &IncidenceStructure, h: &IncidenceStructure, budget: u64) -> Result<Option<Permutation>> {
    if g.point_count() != h.point_count() || g.line_count() != h.line_count() {
        return Ok(None);
    }
    let (gg, hg) = (Graph::new(g), Graph::new(h));
    let zero = vec![0; gg.len()];
    let root_g = Partition::initial(&gg, &zero);
    let root_h = Partition::initial(&hg, &zero);
    if (root_g.cells, root_g.invariant) != (root_h.cells, root_h.invariant) {
        return Ok(None);
    }
    let path = FirstPath::build(&gg, root_g);
    let mut searcher = Searcher { source: &gg, target: &hg, path: &path, nodes: 0, budget };
    Ok(searcher.descend(&root_h, 0)?.map(|p| Permutation::from_perm(&p, g.point_count())))
}
