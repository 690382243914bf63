mod common;

use std::sync::Arc;

use abduct::axioms::{check, implication_failures, AxiomId, AxiomSet, Universe};
use abduct::coherence::{
    all_envelopes, coherent_from_envelope, irr_envelope, is_envelope, lir_explain, maximal_envelopes,
    sigma_from_envelope, DecisionList, Envelope,
};
use abduct::data::{Dataset, Sample};
use abduct::explainers::{all_caxp, all_dwaxp, find_caxp, ExplanationSet, DEFAULT_CAP};
use abduct::surrogate::{id3_fit, DecisionTree, Id3Config};
use abduct::theory::PartialAssignment;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn case(seed: u64) -> common::Case {
    common::random_case(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn permuted(sample: &Sample, seed: u64) -> Arc<Sample> {
    let mut points = sample.dataset().instances().to_vec();
    points.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    Sample::new(sample.theory().clone(), sample.classifier().clone(), Arc::new(Dataset::from_instances(points))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn assignment_text_round_trips(seed in any::<u64>(), mask in 0u64..8) {
        let c = case(seed);
        let x = c.sample.dataset().get(0).clone();
        let e = x.restrict(mask & ((1 << x.len()) - 1));
        let text = c.theory.show(&e);
        prop_assert_eq!(c.theory.parse_assignment(&text).unwrap(), e);
    }

    #[test]
    fn subset_order_is_consistent(seed in any::<u64>()) {
        let c = case(seed);
        let x = c.sample.dataset().get(0).clone();
        let subs = common::subsets(&c.theory, &x);
        for a in &subs {
            for b in &subs {
                prop_assert_eq!(a.is_subset_of(b), a.literals().all(|l| b.contains(l)));
                prop_assert!(a.consistent_with(b));
                prop_assert_eq!(a.union(b).unwrap().len(), a.literals().chain(b.literals()).map(|l| l.feature).collect::<std::collections::BTreeSet<_>>().len());
            }
        }
    }

    #[test]
    fn irr_envelope_ignores_dataset_order(seed in any::<u64>(), shuffle in any::<u64>()) {
        let c = case(seed);
        let a = irr_envelope(&c.sample, DEFAULT_CAP).unwrap().to_set();
        let b = irr_envelope(&permuted(&c.sample, shuffle), DEFAULT_CAP).unwrap().to_set();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn irr_envelope_contains_dataset_and_is_envelope(seed in any::<u64>()) {
        let c = case(seed);
        let irr = irr_envelope(&c.sample, DEFAULT_CAP).unwrap();
        for y in c.sample.dataset().instances() {
            prop_assert!(irr.contains(&y.to_assignment()));
        }
        let members: Vec<PartialAssignment> = irr.members().cloned().collect();
        prop_assert!(is_envelope(&members, &c.sample).is_envelope());
        let oracle: ExplanationSet = common::irr(&c.theory, &common::rows_of(&c.sample)).into_iter().collect();
        prop_assert_eq!(irr.to_set(), oracle);
    }

    #[test]
    fn irr_is_meet_of_maximal_envelopes(seed in any::<u64>()) {
        let c = case(seed);
        let rows = common::rows_of(&c.sample);
        prop_assume!(common::pool(&c.theory, &rows).len() <= 14);
        let maximal = maximal_envelopes(&c.sample, DEFAULT_CAP).unwrap();
        let mut meet: Vec<PartialAssignment> = maximal[0].members().cloned().collect();
        meet.retain(|e| maximal.iter().all(|m| m.contains(e)));
        prop_assert_eq!(meet.into_iter().collect::<ExplanationSet>(), irr_envelope(&c.sample, DEFAULT_CAP).unwrap().to_set());

        let mut found: Vec<ExplanationSet> = all_envelopes(&c.sample, DEFAULT_CAP).unwrap().iter().map(Envelope::to_set).collect();
        let mut oracle: Vec<ExplanationSet> = common::envelopes(&c.theory, &rows).into_iter().map(|v| v.into_iter().collect()).collect();
        found.sort();
        oracle.sort();
        prop_assert_eq!(found, oracle);
    }

    #[test]
    fn irrefutable_explanations_are_weak(seed in any::<u64>()) {
        let c = case(seed);
        for q in c.sample.questions() {
            let lir = lir_explain(&q, DEFAULT_CAP).unwrap();
            prop_assert!(lir.is_subset(&all_dwaxp(&q, DEFAULT_CAP).unwrap()));
            prop_assert!(lir.contains(&q.target().to_assignment()));
        }
    }

    #[test]
    fn greedy_deletion_finds_a_concise_explanation(seed in any::<u64>(), shuffle in any::<u64>()) {
        let c = case(seed);
        let mut order: Vec<usize> = (0..c.theory.n_features()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        for q in c.sample.questions() {
            let e = find_caxp(&q, &order).unwrap();
            prop_assert!(all_caxp(&q, DEFAULT_CAP).unwrap().contains(&e));
        }
    }

    #[test]
    fn coherent_explainer_meets_its_guarantees(seed in any::<u64>()) {
        let c = case(seed);
        let irr = irr_envelope(&c.sample, DEFAULT_CAP).unwrap();
        let mut union = Vec::new();
        for q in c.sample.questions() {
            let set = coherent_from_envelope(&irr, &q).unwrap();
            prop_assert!(!set.is_empty());
            prop_assert!(set.is_subset(&all_dwaxp(&q, DEFAULT_CAP).unwrap()));
            union.extend(set);
        }
        prop_assert!(common::set_coherent(&union, &common::rows_of(&c.sample)));
    }

    #[test]
    fn decision_list_text_round_trips(seed in any::<u64>()) {
        let c = case(seed);
        let list = sigma_from_envelope(&irr_envelope(&c.sample, DEFAULT_CAP).unwrap(), &c.sample).unwrap();
        prop_assert!(list.rules.len() <= c.sample.len());
        let back = DecisionList::from_text(&c.theory, &list.to_text(&c.theory)).unwrap();
        prop_assert_eq!(back, list);
    }

    #[test]
    fn tree_json_round_trips(seed in any::<u64>()) {
        let c = case(seed);
        let tree = id3_fit(&c.sample, Id3Config::default()).unwrap();
        let back = DecisionTree::from_json(&tree.to_json().unwrap()).unwrap();
        for z in common::space(&c.theory) {
            prop_assert_eq!(back.predict(&z).unwrap(), tree.predict(&z).unwrap());
        }
        prop_assert_eq!(back, tree);
    }

    #[test]
    fn implications_hold_on_random_assignments(seed in any::<u64>()) {
        let u = Universe::desk();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sets: Vec<ExplanationSet> = (0..u.len())
            .map(|i| {
                let x = u.question(i).target().clone();
                common::subsets(u.theory(), &x).into_iter().filter(|_| rand::Rng::gen_bool(&mut rng, 0.5)).collect()
            })
            .collect();
        let refs: Vec<&ExplanationSet> = sets.iter().collect();
        let mut holds = AxiomSet::default();
        for a in AxiomId::ALL {
            if check(a, &u, &refs).holds() {
                holds.insert(a);
            }
        }
        prop_assert!(implication_failures(holds).is_empty(), "{:?}", implication_failures(holds));
    }
}

#[test]
fn decision_list_from_dataset_uses_instance_rules() {
    let c = case(11);
    let members: Vec<PartialAssignment> = c.sample.dataset().instances().iter().map(|y| y.to_assignment()).collect();
    let list = sigma_from_envelope(&Envelope::new(members, &c.sample).unwrap(), &c.sample).unwrap();
    assert_eq!(list.rules.len(), c.sample.len());
    for (i, y) in c.sample.dataset().instances().iter().enumerate() {
        assert_eq!(list.classify(y), c.sample.label(i));
    }
}
