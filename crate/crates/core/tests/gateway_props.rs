//! Property tests for the request digest: equality holds exactly when all
//! digest-relevant fields (roles, texts, image bytes, model id, temperature)
//! are equal.

mod common;

use std::path::PathBuf;

use deckgen::gateway::{ChatRequest, Message, Role};
use proptest::prelude::*;

#[derive(Clone, Debug, PartialEq)]
struct MsgSpec {
    role: u8,
    text: String,
    image: Option<bool>, // Some(false) -> fig_1, Some(true) -> fig_2
}

fn image_path(second: bool) -> PathBuf {
    common::fixture_path(if second {
        "bundles/target/assets/fig_2.png"
    } else {
        "bundles/target/assets/fig_1.png"
    })
}

fn build(messages: &[MsgSpec], model: &str, temp_half: bool, purpose: &str, max_tokens: u32) -> ChatRequest {
    ChatRequest {
        messages: messages
            .iter()
            .map(|m| Message {
                role: match m.role % 3 {
                    0 => Role::System,
                    1 => Role::User,
                    _ => Role::Assistant,
                },
                text: m.text.clone(),
                image_refs: m.image.map(|s| vec![image_path(s)]).into_iter().flatten().collect(),
            })
            .collect(),
        model_id: model.to_string(),
        temperature: if temp_half { 0.5 } else { 0.0 },
        max_tokens,
        purpose_tag: purpose.to_string(),
    }
}

fn msg_strategy() -> impl Strategy<Value = MsgSpec> {
    (0u8..3, "[a-c ]{0,6}", proptest::option::of(any::<bool>()))
        .prop_map(|(role, text, image)| MsgSpec { role, text, image })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn digest_equality_iff_relevant_fields_equal(
        a in proptest::collection::vec(msg_strategy(), 1..4),
        b in proptest::collection::vec(msg_strategy(), 1..4),
        model_a in 0u8..2, model_b in 0u8..2,
        temp_a in any::<bool>(), temp_b in any::<bool>(),
        purpose_a in "[xy]", purpose_b in "[xy]",
        tokens_a in 1u32..3, tokens_b in 1u32..3,
    ) {
        let models = ["model-one", "model-two"];
        let ra = build(&a, models[model_a as usize], temp_a, &purpose_a, tokens_a);
        let rb = build(&b, models[model_b as usize], temp_b, &purpose_b, tokens_b);
        let relevant_equal = a == b && model_a == model_b && temp_a == temp_b;
        prop_assert_eq!(
            ra.digest().unwrap() == rb.digest().unwrap(),
            relevant_equal,
            "digest equality must track exactly the digest-relevant fields"
        );
    }
}
