use proptest::prelude::*;
use rootfind_core::growth::{grow_ua, grow_ua_regular};
use rootfind_core::tree::validate_plane_tree;
use rootfind_core::word::enumerate_weight_class;
use rootfind_core::{PlaneTree, Word};

/// Random recursive tree from arbitrary parent choices.
fn tree_from_choices(choices: &[u32]) -> PlaneTree {
    let mut parents = vec![None];
    let mut ranks = vec![0u32];
    let mut kids = vec![0u32];
    for (i, &c) in choices.iter().enumerate() {
        let id = i + 1;
        let p = c as usize % id;
        kids[p] += 1;
        parents.push(Some(p));
        ranks.push(kids[p]);
        kids.push(0);
    }
    PlaneTree::from_parent_ranks(&parents, &ranks).unwrap()
}

proptest! {
    #[test]
    fn parent_subtrees_are_strictly_larger(choices in prop::collection::vec(any::<u32>(), 0..300)) {
        let t = tree_from_choices(&choices);
        for u in 1..t.len() {
            let p = t.parent(u).unwrap();
            prop_assert!(t.subtree_size(p) > t.subtree_size(u));
        }
        prop_assert_eq!(t.subtree_size(0), t.len());
        let total_children: usize = (0..t.len()).map(|u| t.num_children(u)).sum();
        prop_assert_eq!(total_children, t.len() - 1);
        for u in 0..t.len() {
            let below: usize = t.children(u).iter().map(|&c| t.subtree_size(c as usize)).sum();
            prop_assert_eq!(t.subtree_size(u), 1 + below);
        }
    }

    #[test]
    fn words_round_trip_and_validate(choices in prop::collection::vec(any::<u32>(), 0..200)) {
        let t = tree_from_choices(&choices);
        let words: Vec<Word> = (0..t.len()).map(|u| t.word(u)).collect();
        prop_assert!(validate_plane_tree(&words).is_ok());
        let rebuilt = PlaneTree::from_words(&words).unwrap();
        prop_assert_eq!(rebuilt.len(), t.len());
        for w in &words {
            let a = t.find(w).unwrap();
            let b = rebuilt.find(w).unwrap();
            prop_assert_eq!(t.subtree_size(a), rebuilt.subtree_size(b));
        }
        prop_assert_eq!(PlaneTree::from_text(&t.to_text()).unwrap(), t.clone());
    }

    #[test]
    fn removing_a_node_with_children_breaks_validity(choices in prop::collection::vec(any::<u32>(), 1..100), pick in any::<usize>()) {
        let t = tree_from_choices(&choices);
        let internal: Vec<usize> = (1..t.len()).filter(|&u| t.num_children(u) > 0).collect();
        prop_assume!(!internal.is_empty());
        let gone = internal[pick % internal.len()];
        let words: Vec<Word> = (0..t.len()).filter(|&u| u != gone).map(|u| t.word(u)).collect();
        prop_assert!(validate_plane_tree(&words).is_err());
    }

    #[test]
    fn word_statistics_are_ordered(letters in prop::collection::vec(1u32..6, 1..12)) {
        let w = Word::new(letters).unwrap();
        prop_assert!(w.non_oldest_steps() <= w.height());
        prop_assert!(w.height() as u64 <= w.weight());
    }

    #[test]
    fn ua_growth_shape(n in 1usize..2000, seed in any::<u64>()) {
        let t = grow_ua(n, seed).unwrap();
        prop_assert_eq!(t.len(), n);
        for u in 1..t.len() {
            prop_assert!(t.parent(u).unwrap() < u);
        }
    }

    #[test]
    fn regular_growth_shape(d in 2u32..8, n in 1usize..400, seed in any::<u64>()) {
        let t = grow_ua_regular(d, n, seed).unwrap();
        prop_assert_eq!(t.len(), d as usize * n + 2);
        prop_assert_eq!(t.leaf_count(), (d as usize - 1) * n + 2);
        prop_assert_eq!(t.num_children(0), d as usize + 1);
        for u in 1..t.len() {
            let k = t.num_children(u);
            prop_assert!(k == 0 || k == d as usize);
            if k == d as usize {
                // Subtrees below the root are d-ary: (d-1)|t| = d·leaves - 1.
                let size = t.subtree_size(u);
                let leaves = count_leaves(&t, u);
                prop_assert_eq!((d as usize - 1) * size, d as usize * leaves - 1);
            }
        }
    }
}

fn count_leaves(t: &PlaneTree, u: usize) -> usize {
    let mut stack = vec![u];
    let mut leaves = 0;
    while let Some(v) = stack.pop() {
        if t.num_children(v) == 0 {
            leaves += 1;
        }
        stack.extend(t.children(v).iter().map(|&c| c as usize));
    }
    leaves
}

#[test]
fn weight_classes_are_distinct_with_correct_weight() {
    for m in 1..=12u32 {
        let class = enumerate_weight_class(m).unwrap();
        let set: std::collections::HashSet<&Word> = class.iter().collect();
        assert_eq!(set.len(), class.len());
        assert!(class.iter().all(|w| w.weight() == u64::from(m)));
        assert!(class.windows(2).all(|p| p[0] < p[1]));
    }
}

#[test]
fn attachment_targets_are_uniform() {
    use rootfind_core::stats::chi_square_gof;
    // Node 3 of a UA tree attaches to one of nodes 0, 1, 2.
    let mut counts = [0u64; 3];
    for seed in 0..100_000u64 {
        let t = grow_ua(4, seed).unwrap();
        counts[t.parent(3).unwrap()] += 1;
    }
    let (_, p) = chi_square_gof(&counts, &[1.0 / 3.0; 3]).unwrap();
    assert!(p > 0.001, "counts {counts:?}, p = {p}");
    // The first expansion of the regular model picks one of the d + 1 leaves.
    let mut counts = [0u64; 4];
    for seed in 0..100_000u64 {
        let t = grow_ua_regular(3, 2, seed).unwrap();
        let expanded = (1..=4).find(|&u| t.num_children(u) > 0).unwrap();
        counts[expanded - 1] += 1;
    }
    let (_, p) = chi_square_gof(&counts, &[0.25; 4]).unwrap();
    assert!(p > 0.001, "counts {counts:?}, p = {p}");
}
