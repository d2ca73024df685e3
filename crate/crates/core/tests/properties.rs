use cographon::bijection::{adjacency_by_lca, cograph_to_cotree, cotree_to_cograph, is_cograph};
use cographon::samplers::{enumerate_unlabelled_trees, sample_labelled_cotree, EtaSampler, RngHandle, SampleBudget};
use cographon::skeleton::{spanned_skeleton, Parity};
use cographon::trees::{
    parse_cotree, parse_cotree_json, parse_unordered, serialize_cotree, serialize_unordered, to_json, Ancestry,
    Canonical, Cotree, RootedTree,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn cotree(n: usize, seed: u64) -> Cotree {
    let mut rng = RngHandle::new(seed, 0).rng();
    sample_labelled_cotree(n, &mut rng, &EtaSampler::new(), &SampleBudget::default()).unwrap().value
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_round_trip(n in 1usize..25, seed: u64) {
        let t = cotree(n, seed);
        let text = serialize_cotree(t.as_tree());
        let back = parse_cotree(&text).unwrap();
        prop_assert!(back.alternating);
        prop_assert_eq!(serialize_cotree(&back.tree), text);
    }

    #[test]
    fn json_round_trip(n in 1usize..25, seed: u64) {
        let t = cotree(n, seed);
        let back = parse_cotree_json(&to_json(t.as_tree()).to_string()).unwrap();
        prop_assert_eq!(back.tree.canonical_string(), t.canonical_string());
    }

    #[test]
    fn canonical_form_is_idempotent(n in 1usize..25, seed: u64) {
        let t = cotree(n, seed);
        let once = t.canonicalize();
        let twice = once.canonicalize();
        prop_assert_eq!(twice.as_tree(), once.as_tree());
        prop_assert_eq!(once.canonical_string(), t.canonical_string());
    }

    #[test]
    fn cotree_graph_cotree(n in 1usize..25, seed: u64) {
        let t = cotree(n, seed);
        let g = cotree_to_cograph(&t).unwrap();
        prop_assert!(is_cograph(&g));
        prop_assert_eq!(&adjacency_by_lca(t.as_tree()).unwrap(), &g);
        prop_assert_eq!(cograph_to_cotree(&g).unwrap().canonical_string(), t.canonical_string());
    }

    #[test]
    fn complement_flips_every_sign(n in 2usize..20, seed: u64) {
        let t = cotree(n, seed);
        let g = cotree_to_cograph(&t).unwrap();
        let c = Cotree::new(t.as_tree().complement()).unwrap();
        prop_assert_eq!(cotree_to_cograph(&c).unwrap(), g.complement());
    }

    #[test]
    fn lca_is_symmetric_and_an_ancestor(n in 1usize..30, seed: u64, picks in prop::collection::vec(any::<prop::sample::Index>(), 2)) {
        let t = cotree(n, seed);
        let anc = Ancestry::new(t.as_tree());
        let nodes = t.node_count();
        let (u, v) = (picks[0].index(nodes), picks[1].index(nodes));
        let w = anc.lca(u, v).unwrap();
        prop_assert_eq!(w, anc.lca(v, u).unwrap());
        prop_assert!(anc.is_ancestor(w, u) && anc.is_ancestor(w, v));
        for &c in t.children(w) {
            prop_assert!(!(anc.is_ancestor(c, u) && anc.is_ancestor(c, v)));
        }
    }

    #[test]
    fn skeleton_parities_follow_lengths(n in 2usize..40, seed: u64, k in 1usize..4) {
        let t = cotree(n, seed);
        let mut leaves = t.leaves();
        leaves.shuffle(&mut RngHandle::new(seed, 1).rng());
        leaves.truncate(k.min(n));
        let s = spanned_skeleton(t.as_tree(), &leaves).unwrap();
        prop_assert!(s.distances.iter().all(|&d| d >= 1) || n == 1);
        for (d, p) in s.distances.iter().zip(&s.distance_parities) {
            prop_assert_eq!(*p, if d % 2 == 1 { Parity::Odd } else { Parity::Even });
        }
        if s.is_proper() {
            prop_assert_eq!(s.distances.len(), 2 * leaves.len() - 1);
            prop_assert!(s.total_length() < t.node_count());
        }
    }
}

#[test]
fn single_leaf_skeleton_is_depth_on_all_small_trees() {
    for n in 1..=8 {
        for t in enumerate_unlabelled_trees(n).unwrap() {
            let depth = t.depths();
            for v in t.leaves() {
                let s = spanned_skeleton(&t, &[v]).unwrap();
                assert_eq!(s.distances, vec![depth[v]]);
            }
        }
    }
}

#[test]
fn unordered_round_trip_on_all_small_trees() {
    for n in 1..=9 {
        for t in enumerate_unlabelled_trees(n).unwrap() {
            let text = serialize_unordered(&t);
            assert_eq!(serialize_unordered(&parse_unordered(&text).unwrap()), text);
        }
    }
}
