use explicate_core::classifier::sigmoid;
use explicate_core::lime::{highlight_spans, lime_explain, LimeConfig, Polarity};
use explicate_core::textprep::tokenize;
use proptest::prelude::*;

const WORDS: &[&str] = &["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliet"];

fn presence_model(text: &str, v: &[f64], bias: f64) -> f64 {
    let present: Vec<String> = tokenize(text).into_iter().map(|t| t.token).collect();
    let z: f64 = WORDS.iter().zip(v).filter(|(w, _)| present.iter().any(|p| p == *w)).map(|(_, c)| c).sum();
    sigmoid(bias + z)
}

#[test]
fn only_informative_token_gets_weight() {
    let f = |t: &str| sigmoid(2.0 * f64::from(u8::from(tokenize(t).iter().any(|x| x.token == "verify"))));
    let e = lime_explain(f, "please verify", &LimeConfig::default()).unwrap();
    let w = |tok: &str| e.attributions.iter().find(|a| a.token == tok).map_or(0.0, |a| a.weight);
    assert!(w("verify") > 0.0);
    assert!(w("verify").abs() > w("please").abs());
}

#[test]
fn constant_model_gives_zero_weights() {
    let e = lime_explain(|_: &str| 0.9, "one two three four", &LimeConfig::default()).unwrap();
    assert!(e.degenerate);
    assert!(e.attributions.iter().all(|a| a.weight.abs() < 1e-9));
}

#[test]
fn fixed_seed_is_bitwise_deterministic() {
    let texts = [
        "Urgent: Your account will be suspended. Click here to verify.",
        "Meeting scheduled for tomorrow at 2 PM in conference room.",
        "You've won $1M! Click to claim prize now!",
        "alpha bravo charlie delta echo",
        "golf golf hotel india juliet alpha",
    ];
    let v = [1.0, -0.5, 0.25, 2.0, -1.5, 0.8, -0.3, 1.2, -2.0, 0.6];
    for (i, text) in texts.iter().cycle().take(20).enumerate() {
        let cfg = LimeConfig { seed: i as u64, ..LimeConfig::default() };
        let a = lime_explain(|t: &str| presence_model(t, &v, -0.2), text, &cfg).unwrap();
        let b = lime_explain(|t: &str| presence_model(t, &v, -0.2), text, &cfg).unwrap();
        assert_eq!(a, b);
        for (x, y) in a.attributions.iter().zip(&b.attributions) {
            assert_eq!(x.weight.to_bits(), y.weight.to_bits());
        }
    }
}

#[test]
fn highlights_follow_attribution_sign() {
    let text = "Click here to click. Thanks, see you soon.";
    let f = |t: &str| {
        let toks: Vec<String> = tokenize(t).into_iter().map(|x| x.token).collect();
        let z = 1.5 * f64::from(u8::from(toks.iter().any(|x| x == "click")))
            - 1.0 * f64::from(u8::from(toks.iter().any(|x| x == "thanks")));
        sigmoid(z)
    };
    let e = lime_explain(f, text, &LimeConfig::default()).unwrap();
    let spans = highlight_spans(&e.attributions, text);
    let click: Vec<_> = spans.iter().filter(|h| text[h.span.0..h.span.1].eq_ignore_ascii_case("click")).collect();
    assert_eq!(click.len(), 2);
    assert!(click.iter().all(|h| h.polarity == Polarity::Positive));
    assert!(spans.iter().any(|h| &text[h.span.0..h.span.1] == "Thanks" && h.polarity == Polarity::Negative));
    assert!(highlight_spans(&[], text).is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    // Tokens whose presence coefficient clears the ridge shrinkage floor
    // must come back with the same sign.
    #[test]
    fn sign_agreement_with_presence_models(
        d in 2usize..=10,
        raw in prop::collection::vec(prop_oneof![-3.0..-0.6f64, 0.6..3.0f64], 10),
        bias in -1.0..1.0f64,
        seed in any::<u64>(),
    ) {
        let v: Vec<f64> = raw[..d].to_vec();
        let text = WORDS[..d].join(" ");
        let cfg = LimeConfig { seed, top_k: d, ..LimeConfig::default() };
        let e = lime_explain(|t: &str| presence_model(t, &v, bias), &text, &cfg).unwrap();
        prop_assert_eq!(e.attributions.len(), d);
        for a in &e.attributions {
            let idx = WORDS.iter().position(|w| *w == a.token).unwrap();
            prop_assert!(a.weight.signum() == v[idx].signum(), "{} got {} for coefficient {}", a.token, a.weight, v[idx]);
        }
        for (i, a) in e.attributions.iter().enumerate() {
            prop_assert_eq!(a.rank, i + 1);
            prop_assert_eq!(&text[a.span.0..a.span.1], a.token.as_str());
        }
    }

    #[test]
    fn attributions_only_for_present_tokens(text in "[a-z]{1,6}( [a-z]{1,6}){0,8}", seed in any::<u64>()) {
        let cfg = LimeConfig { seed, n_samples: 50, ..LimeConfig::default() };
        let e = lime_explain(|t: &str| t.len() as f64 / 100.0, &text, &cfg).unwrap();
        let present: Vec<String> = tokenize(&text).into_iter().map(|t| t.token).collect();
        for a in &e.attributions {
            prop_assert!(present.contains(&a.token));
        }
    }
}
