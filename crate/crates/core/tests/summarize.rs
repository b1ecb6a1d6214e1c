use infosum::corpus::Document;
use infosum::summarize::{
    info_filter, info_rank, info_rank_from_probs, lead_words, random_rank, FixedScores, SummaryBudget, SummaryResult,
    System,
};
use proptest::prelude::*;

fn document() -> impl Strategy<Value = Document> {
    prop::collection::vec(prop::collection::vec("[a-z]{1,6}", 1..30), 1..15).prop_map(|sents| {
        let texts: Vec<String> = sents.iter().map(|w| format!("{}.", w.join(" "))).collect();
        let refs: Vec<&str> = texts.iter().map(String::as_str).collect();
        Document::new("doc", "", &refs, None).unwrap()
    })
}

fn case() -> impl Strategy<Value = (Document, Vec<f64>, usize)> {
    document().prop_flat_map(|d| {
        let n = d.sentences.len();
        (Just(d), prop::collection::vec(0.0f64..1.0, n), 1usize..120)
    })
}

fn assert_well_formed(doc: &Document, r: &SummaryResult, max_words: usize) -> Result<(), TestCaseError> {
    prop_assert!(r.word_total <= max_words);
    prop_assert!(r.selected.windows(2).all(|w| w[0] < w[1]));
    prop_assert!(r.selected.iter().all(|&i| i < doc.sentences.len()));
    let words = infosum::corpus::Sentence::new(0, r.text.as_str()).word_count();
    prop_assert_eq!(words, r.word_total);
    Ok(())
}

proptest! {
    #[test]
    fn every_system_respects_budget_and_order((doc, probs, max) in case(), seed in any::<u64>()) {
        let scorer = FixedScores(probs);
        for budget in [SummaryBudget::whole(max).unwrap(), SummaryBudget::truncate(max).unwrap()] {
            assert_well_formed(&doc, &lead_words(&doc, budget), max)?;
            assert_well_formed(&doc, &info_rank(&doc, &scorer, budget).unwrap(), max)?;
            assert_well_formed(&doc, &info_filter(&doc, &scorer, budget).unwrap(), max)?;
            assert_well_formed(&doc, &random_rank(&doc, budget, seed), max)?;
        }
    }

    #[test]
    fn infofilter_with_everything_important_is_the_lead((doc, _, max) in case()) {
        let budget = SummaryBudget::whole(max).unwrap();
        let all = FixedScores(vec![1.0; doc.sentences.len()]);
        let f = info_filter(&doc, &all, budget).unwrap();
        let l = lead_words(&doc, budget);
        prop_assert_eq!(f.selected, l.selected);
        prop_assert_eq!(f.text, l.text);
        prop_assert!(f.removed.is_empty());
    }

    #[test]
    fn infofilter_removed_sentences_are_unimportant((doc, probs, max) in case()) {
        let r = info_filter(&doc, &FixedScores(probs.clone()), SummaryBudget::whole(max).unwrap()).unwrap();
        if !r.fallback {
            prop_assert!(r.removed.iter().all(|&i| probs[i] < 0.5));
            prop_assert!(r.selected.iter().all(|&i| probs[i] >= 0.5));
        }
    }

    #[test]
    fn inforank_invariant_under_monotone_transforms((doc, probs, max) in case()) {
        let budget = SummaryBudget::whole(max).unwrap();
        let base = info_rank_from_probs(&doc, &probs, budget).unwrap();
        let mapped: Vec<f64> = probs.iter().map(|p| (3.0 * p).exp() / 40.0).collect();
        let again = info_rank_from_probs(&doc, &mapped, budget).unwrap();
        prop_assert_eq!(base.selected, again.selected);
    }

    #[test]
    fn seeded_randomrank_is_deterministic((doc, _, max) in case(), seed in any::<u64>()) {
        let budget = SummaryBudget::new(max, System::RandomRank.default_mode()).unwrap();
        prop_assert_eq!(random_rank(&doc, budget, seed), random_rank(&doc, budget, seed));
    }

    #[test]
    fn lead_is_a_document_prefix((doc, _, max) in case()) {
        let r = lead_words(&doc, SummaryBudget::truncate(max).unwrap());
        prop_assert_eq!(r.selected.clone(), (0..r.selected.len()).collect::<Vec<_>>());
        prop_assert_eq!(r.word_total, max.min(doc.word_count()));
    }
}
