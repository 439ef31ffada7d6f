//! Invariants checked over generated inputs.

use proptest::prelude::*;

use taskbot_core::dialogue::navigation::command_phrases;
use taskbot_core::diy::{formulate_queries, paraphrase_howto};
use taskbot_core::engine::Pipeline;
use taskbot_core::generators::MAX_RESPONSE_CHARS;
use taskbot_core::nlu::{classify_initiative, detect_domain, detect_question, Domain, DomainPrediction, InitiativeLevel, Intent};
use taskbot_core::provider::Provider;
use taskbot_core::qa::{answer_quantity, exact_match, fuzzy_match_score, heuristic_extractive, token_f1, QaContext};
use taskbot_core::recipe::{sentence_iob, tag_cooking_entities, tag_dish_name, EntityKind, NEGATION_WINDOW};
use taskbot_core::retrieval::levenshtein;
use taskbot_core::state::{ConversationState, DialoguePhase, ResponderId, MAX_SOCIAL_TURNS};
use taskbot_core::store::{FileStore, MemoryStore, StateStore};
use taskbot_core::text::tokenize;
use taskbot_core::{Config, Knowledge};

fn kb() -> &'static Knowledge {
    Knowledge::bundled()
}

fn pipeline() -> &'static Pipeline {
    static PIPELINE: std::sync::OnceLock<Pipeline> = std::sync::OnceLock::new();
    PIPELINE.get_or_init(|| Pipeline::new(Config::default()).unwrap())
}

const UTTERANCES: &[&str] = &[
    "hi",
    "hello there",
    "how are you",
    "what can you do?",
    "I want to make lemon pie",
    "How to fix a roof",
    "My roof is broken",
    "Could you recommend a DIY project?",
    "recommend me a recipe",
    "the first one",
    "the second one",
    "2",
    "the roof one",
    "yes",
    "no",
    "next",
    "previous",
    "repeat",
    "go to step 3",
    "show me the ingredients",
    "how many eggs do I need",
    "where to place it",
    "what can I use instead of butter",
    "help",
    "stop",
    "should I invest in bitcoin",
    "my girlfriend broke up with me",
    "tell me a joke",
    "how to clean grout",
    "I want to bake bread",
];

/// Run a script, returning every intermediate state.
fn run(script: &[usize]) -> Vec<ConversationState> {
    let mut state = ConversationState::new("prop");
    let mut states = Vec::new();
    for (t, &i) in script.iter().enumerate() {
        state = pipeline().turn(&state, UTTERANCES[i], t as u64).unwrap().state;
        states.push(state.clone());
    }
    states
}

fn script() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(0..UTTERANCES.len(), 1..14)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conversations_keep_their_invariants(script in script()) {
        let states = run(&script);
        for (n, state) in states.iter().enumerate() {
            prop_assert!(state.validate().is_ok(), "{:?}", state.validate());
            prop_assert_eq!(state.turns.len(), n + 1);
            let social = state.turns.iter().filter(|t| t.responder_id == ResponderId::SocialChat).count() as u32;
            prop_assert!(social <= MAX_SOCIAL_TURNS);
            let mut previous = DialoguePhase::Initialization;
            for turn in &state.turns {
                prop_assert!(previous.can_transition_to(turn.phase), "{previous} -> {}", turn.phase);
                prop_assert!(!turn.bot_text.is_empty() && turn.bot_text.chars().count() <= MAX_RESPONSE_CHARS);
                if turn.responder_id == ResponderId::SocialChat {
                    prop_assert!(turn.bot_text.ends_with('?'), "{}", turn.bot_text);
                }
                previous = turn.phase;
            }
        }
        // One task per episode: a started task never changes until the
        // conversation leaves the completion phase.
        for pair in states.windows(2) {
            if let (Some(a), Some(b)) = (&pair[0].task_session, &pair[1].task_session) {
                prop_assert_eq!(&a.doc_id, &b.doc_id);
            }
        }
    }

    #[test]
    fn turns_are_pure(script in script(), last in 0..UTTERANCES.len()) {
        let state = run(&script).pop().unwrap();
        let a = pipeline().turn(&state, UTTERANCES[last], 7).unwrap();
        let b = pipeline().turn(&state, UTTERANCES[last], 99).unwrap();
        prop_assert_eq!(a.state.without_timestamps(), b.state.without_timestamps());
        prop_assert_eq!(a.turn.bot_text, b.turn.bot_text);
    }

    #[test]
    fn stores_round_trip(script in script()) {
        let state = run(&script).pop().unwrap();
        let memory = MemoryStore::new();
        memory.put_state("prop", &state).unwrap();
        prop_assert_eq!(memory.get_state("prop").unwrap(), Some(state.clone()));
        let dir = tempfile::tempdir().unwrap();
        let files = FileStore::open(dir.path()).unwrap();
        files.put_state("prop", &state).unwrap();
        prop_assert_eq!(files.get_state("prop").unwrap(), Some(state));
    }

    #[test]
    fn levenshtein_is_a_metric(a in "[a-dé ]{0,12}", b in "[a-dé ]{0,12}", c in "[a-dé ]{0,12}") {
        prop_assert_eq!(levenshtein(&a, &b), levenshtein(&b, &a));
        prop_assert_eq!(levenshtein(&a, &a), 0);
        prop_assert_eq!(levenshtein(&a, &b) == 0, a == b);
        prop_assert!(levenshtein(&a, &c) <= levenshtein(&a, &b) + levenshtein(&b, &c));
    }

    #[test]
    fn metrics_are_bounded(gold in "[a-cA-C .,]{0,16}", pred in "[a-cA-C .,]{0,16}") {
        let (fz, f1, em) = (fuzzy_match_score(&gold, &pred), token_f1(&gold, &pred), exact_match(&gold, &pred));
        prop_assert!((0.0..=100.0).contains(&fz));
        prop_assert!((0.0..=1.0).contains(&f1));
        prop_assert!(em <= 1);
        prop_assert!(em == 0 || f1 == 1.0);
        prop_assert!(f1 < 1.0 || fz == 100.0);
    }

    #[test]
    fn paraphrases_start_with_how_to(words in prop::collection::vec("[a-z]{1,8}", 1..6)) {
        let utterance = words.join(" ");
        for c in paraphrase_howto(kb(), &utterance, 3).unwrap() {
            prop_assert!(c.text.starts_with("How to"), "{}", c.text);
        }
    }

    #[test]
    fn must_and_should_are_disjoint(i in 0..UTTERANCES.len(), extra in "[a-z]{0,8}") {
        let utterance = format!("{} {extra}", UTTERANCES[i]);
        if let Ok(f) = formulate_queries(kb(), &utterance) {
            for q in &f.queries {
                prop_assert!(q.must_terms.iter().all(|m| !q.should_terms.contains(m)), "{q:?}");
            }
        }
    }

    #[test]
    fn extractive_answers_are_spans(
        sentences in prop::collection::vec("[a-z]{2,7}( [a-z]{2,7}){2,6}", 1..5),
        question in "(how|where|what) [a-z]{2,7}( [a-z]{2,7}){0,3}",
    ) {
        let context = sentences.join(". ");
        let ctx = QaContext::new(context.clone(), Vec::new(), question, 1).unwrap();
        let answer = heuristic_extractive(kb(), &ctx, 0.15);
        prop_assert!(answer.is_unknown() || context.contains(&answer.text), "{:?} not in {context:?}", answer.text);
    }

    #[test]
    fn iob_is_well_formed(words in prop::collection::vec(
        prop::sample::select(vec!["strawberry", "cupcake", "lemon", "pie", "without", "chocolate", "italian", "dinner",
            "for", "a", "birthday", "make", "no", "nuts", "I", "want", "to", "bake", "bread", "chicken", "soup"]),
        1..12,
    )) {
        let sentence = words.join(" ");
        let len = tokenize(&sentence).len();
        for spans in [tag_dish_name(kb(), &sentence), tag_cooking_entities(kb(), &sentence)] {
            let tags = sentence_iob(len, &spans);
            for (i, tag) in tags.iter().enumerate() {
                if let Some(kind) = tag.strip_prefix("I-") {
                    prop_assert!(i > 0 && tags[i - 1].ends_with(kind), "{tags:?}");
                }
            }
        }
    }

    #[test]
    fn negation_stays_local(gap in 0usize..8) {
        let filler = vec!["really"; gap].join(" ");
        let sentence = format!("a cake without {filler} chocolate");
        let negative = tag_cooking_entities(kb(), &sentence).iter().any(|s| s.kind == EntityKind::NegativeIngredient);
        prop_assert_eq!(negative, gap < NEGATION_WINDOW);
        let plain = tag_cooking_entities(kb(), &format!("a cake with {filler} chocolate"));
        prop_assert!(plain.iter().all(|s| s.kind != EntityKind::NegativeIngredient));
    }

    #[test]
    fn domain_argmax_ignores_scale(i in 0..UTTERANCES.len(), factor in 0.1f64..20.0) {
        let scaled = kb().domains.scaled(factor);
        let a = detect_domain(UTTERANCES[i], &kb().domains, &Provider::Heuristic, 0.5).unwrap();
        let b = detect_domain(UTTERANCES[i], &scaled, &Provider::Heuristic, 0.5).unwrap();
        prop_assert_eq!(a.chosen, b.chosen);
    }

    #[test]
    fn quantities_come_from_the_recipe(recipe in 0usize..30, word in "[a-z]{3,8}") {
        let docs = kb().recipes.docs();
        let doc = &docs[recipe % docs.len()];
        for ingredient in doc.ingredients.iter().map(|i| i.name.clone()).chain([word]) {
            let answer = answer_quantity(kb(), doc, &format!("how much {ingredient} do I need"), 0.25);
            if answer.text.starts_with("You need ") {
                prop_assert!(doc.ingredients.iter().any(|i| !i.quantity.is_empty() && answer.text.contains(&i.quantity)), "{}", answer.text);
            }
        }
    }
}

#[test]
fn sensitive_terms_are_deflected_everywhere() {
    let state = ConversationState::new("safety");
    let mut checked = 0;
    for domain in Domain::ALL.into_iter().filter(|d| d.avoid()) {
        for (term, _) in kb().domains.get(domain).entries() {
            let utterance = format!("tell me about {term}");
            let out = pipeline().turn(&state, &utterance, 0).unwrap();
            if out.turn.annotations.domain.chosen.avoid() {
                checked += 1;
                assert_eq!(out.turn.responder_id, ResponderId::Deflection, "{utterance}");
                assert_eq!(out.decision.selected_generators, [ResponderId::Deflection]);
            }
        }
    }
    assert!(checked > 100, "{checked}");
}

#[test]
fn navigation_commands_are_not_questions() {
    for phrase in command_phrases() {
        assert!(!detect_question(phrase).0, "{phrase}");
    }
}

#[test]
fn initiative_table_is_total() {
    for domain in Domain::ALL {
        let mut scores = vec![0.0; Domain::ALL.len()];
        scores[Domain::ALL.iter().position(|d| *d == domain).unwrap()] = 1.0;
        let prediction = DomainPrediction::from_scores(scores, 0.5, false);
        for intent in Intent::ALL {
            let want = match intent {
                Intent::Recommend => InitiativeLevel::RecommendationRequest,
                Intent::Request if domain.is_task_domain() => InitiativeLevel::High,
                _ => InitiativeLevel::Low,
            };
            assert_eq!(classify_initiative(&prediction, intent, ""), want, "{domain:?} {intent:?}");
        }
    }
}
