use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;
use proptest::sample::{select, subsequence};

use gqcov::automorphisms::{automorphism_group, generator_permutations, Permutation, PermutationGroup, DEFAULT_BUDGET};
use gqcov::constructions::{build_grid, build_q4, build_q4_with_q3, build_q5_with_q4, build_w};
use gqcov::covers::factorize_lower;
use gqcov::io::GeometryFile;
use gqcov::kk_census::span_closure;
use gqcov::spg::SPGParameters;
use gqcov::subtension::{build_derived_pair, DerivedPair};
use gqcov::IncidenceStructure;

fn geometries() -> &'static Vec<IncidenceStructure> {
    static G: OnceLock<Vec<IncidenceStructure>> = OnceLock::new();
    G.get_or_init(|| {
        vec![
            build_grid(2).unwrap(),
            build_grid(4).unwrap(),
            build_w(3).unwrap(),
            build_q4(3).unwrap(),
            (*build_q5_with_q4(2).unwrap().0).clone(),
        ]
    })
}

fn pair(q: usize) -> &'static DerivedPair {
    static P: OnceLock<Vec<DerivedPair>> = OnceLock::new();
    &P.get_or_init(|| [2, 3].iter().map(|&q| build_derived_pair(&build_q5_with_q4(q).unwrap().1).unwrap()).collect())[q - 2]
}

fn aut_e_gens(q: usize) -> &'static Vec<Permutation> {
    static A: OnceLock<Vec<Vec<Permutation>>> = OnceLock::new();
    &A.get_or_init(|| {
        [2, 3]
            .iter()
            .map(|&q| {
                let e = &pair(q).e;
                generator_permutations(&automorphism_group(e, DEFAULT_BUDGET).unwrap(), e)
            })
            .collect()
    })[q - 2]
}

/// Collinearity from the line lists alone.
fn collinear(g: &IncidenceStructure, x: usize, y: usize) -> bool {
    g.lines_through(x).iter().any(|&l| g.line(l as usize).contains(&(y as u32)))
}

fn word(gens: &[Permutation], e: &IncidenceStructure, picks: &[usize]) -> Permutation {
    picks.iter().fold(Permutation::identity(e), |acc, &i| acc.then(&gens[i % gens.len()]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn perp_is_symmetric(gi in 0usize..5, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        let g = &geometries()[gi];
        let (x, y) = (a.index(g.point_count()), b.index(g.point_count()));
        let px = g.perp(x).unwrap();
        let py = g.perp(y).unwrap();
        prop_assert_eq!(px.contains(&y), py.contains(&x));
        prop_assert_eq!(px.contains(&y), collinear(g, x, y));
    }

    #[test]
    fn set_lies_in_its_biperp(gi in 0usize..5, raw in prop::collection::vec(any::<prop::sample::Index>(), 1..5)) {
        let g = &geometries()[gi];
        let ys: BTreeSet<usize> = raw.iter().map(|i| i.index(g.point_count())).collect();
        let ys: Vec<usize> = ys.into_iter().collect();
        let bi = g.biperp(&ys).unwrap();
        prop_assert!(ys.iter().all(|y| bi.contains(y)));
        let perp = g.perp_set(&ys).unwrap();
        for &z in &perp {
            prop_assert!(ys.iter().all(|&y| collinear(g, y, z)));
        }
    }

    #[test]
    fn quadrangles_have_no_triangles(gi in 0usize..5, a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>(), c in any::<prop::sample::Index>()) {
        let g = &geometries()[gi];
        let n = g.point_count();
        let (x, y, z) = (a.index(n), b.index(n), c.index(n));
        prop_assume!(x != y && y != z && x != z);
        if collinear(g, x, y) && collinear(g, y, z) && collinear(g, x, z) {
            let l = g.line_through(x, y).unwrap();
            prop_assert!(g.is_incident(z, l));
        }
        prop_assert!(g.find_triangle().is_none());
    }

    #[test]
    fn group_order_does_not_depend_on_the_base(gi in 0usize..4, prefix in subsequence((0usize..40).collect::<Vec<_>>(), 0..6).prop_shuffle()) {
        let g = &geometries()[gi];
        let group = automorphism_group(g, DEFAULT_BUDGET).unwrap();
        let prefix: Vec<usize> = prefix.into_iter().filter(|&p| p < group.degree()).collect();
        let rebased = PermutationGroup::with_base_prefix(group.degree(), group.generators().to_vec(), &prefix).unwrap();
        prop_assert_eq!(rebased.order(), group.order());
        prop_assert!(rebased.equals(&group));
    }

    #[test]
    fn group_words_are_automorphisms(gi in 0usize..5, picks in prop::collection::vec(0usize..64, 0..12)) {
        let g = &geometries()[gi];
        let group = automorphism_group(g, DEFAULT_BUDGET).unwrap();
        let gens = generator_permutations(&group, g);
        let w = word(&gens, g, &picks);
        prop_assert!(w.is_automorphism_of(g));
        prop_assert!(w.then(&w.inverse()).is_identity());
        prop_assert!(group.contains(&w.to_perm()));
    }

    #[test]
    fn covers_alpha_pi_factorize_back(q in 2usize..4, picks in prop::collection::vec(0usize..64, 0..10)) {
        let p = pair(q);
        let alpha = word(aut_e_gens(q), &p.e, &picks);
        let gamma = p.require_cover().unwrap().then_automorphism(&alpha);
        let f = factorize_lower(p, &gamma).unwrap();
        prop_assert_eq!(f.alpha, alpha);
    }

    #[test]
    fn rosettes_partition_the_far_points(q in 2usize..4, r in any::<prop::sample::Index>()) {
        let p = pair(q);
        let ros = &p.rosettes[r.index(p.rosettes.len())];
        let g = p.ambient();
        let z = ros.base_point;
        let mut seen = BTreeSet::new();
        for &i in &ros.ovoids {
            prop_assert!(p.ovoids[i].points.contains(&z));
            for &x in &p.ovoids[i].points {
                if x != z {
                    prop_assert!(seen.insert(x), "point {} in two members", x);
                }
            }
        }
        let far: BTreeSet<usize> = p.embedding.points().iter().copied().filter(|&x| !collinear(g, x, z)).collect();
        prop_assert_eq!(seen, far);
    }

    #[test]
    fn span_closure_is_closed(seed in subsequence((0usize..27).collect::<Vec<_>>(), 1..4)) {
        let (g, _) = build_q5_with_q4(2).unwrap();
        let Some(emb) = span_closure(&g, &seed, &[], None).unwrap().proper() else { return Ok(()); };
        let inside: BTreeSet<usize> = emb.points().iter().copied().collect();
        prop_assert!(seed.iter().all(|p| inside.contains(p)));
        for l in 0..g.line_count() {
            let hits = g.line(l).iter().filter(|&&p| inside.contains(&(p as usize))).count();
            prop_assert!(hits <= 1 || hits == g.line(l).len());
        }
    }

    #[test]
    fn spg_parameters_round_trip(s in 0usize..50, t in 0usize..50, a in 0usize..50, m in 0usize..50) {
        let p = SPGParameters { s_star: s, t_star: t, alpha_star: a, mu_star: m };
        prop_assert_eq!(p.to_string().parse::<SPGParameters>().unwrap(), p);
    }

    #[test]
    fn geometry_files_round_trip(gi in 0usize..5) {
        let g = &geometries()[gi];
        let text = serde_json::to_string(&GeometryFile::from_structure(g)).unwrap();
        let back = serde_json::from_str::<GeometryFile>(&text).unwrap().into_structure().unwrap();
        prop_assert_eq!(&back, g);
    }

    #[test]
    fn theta_census_accounts_for_every_external_point(s in 2usize..5, pick in select(vec![true, false])) {
        let emb = if pick { build_q4_with_q3(s).unwrap().1 } else { build_q5_with_q4(s.min(3)).unwrap().1 };
        let census = gqcov::subtension::theta_census(&emb).unwrap();
        let external = (0..emb.ambient().point_count()).filter(|&p| !emb.contains_point(p)).count();
        prop_assert_eq!(census.counts.iter().map(|(th, n)| th * n).sum::<usize>(), external);
    }
}
