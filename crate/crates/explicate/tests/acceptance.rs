//! Acceptance run: one PASS/FAIL line per primary criterion, nonzero exit on any failure.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use common::{desk_corpus_path, start_stub, Reply, EMAIL_1, EMAIL_2, EMAIL_3};
use explicate::analysis::{analyze_xai, attach_llm, AnalysisMode, AnalyzeOptions};
use explicate::cli::train_on;
use explicate::config::Config;
use explicate::core::classifier::{logistic_gradient, logistic_loss, predict, sigmoid};
use explicate::core::dataset::{split, SplitConfig};
use explicate::core::eval::{compute_metrics, consistency_rate, flesch_reading_ease, lime_stability, ConfusionMatrix};
use explicate::core::lime::{lime_explain, LimeConfig};
use explicate::core::llm::{parse_verdict_line, ExplanationMode, ExplanationSource, VerdictLine};
use explicate::core::pipeline::Detector;
use explicate::core::shap::{shap_brute_force, shap_linear};
use explicate::core::{FeatureVector, LinearModel};
use explicate::eval_io::evaluate;
use explicate::ingest::{load_dataset, write_dataset, ColumnOverrides};
use explicate::llm_client::{EndpointConfig, LlmClient};
use explicate::model_io::{load_model, save_model};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn metric_identities() -> Outcome {
    let m = compute_metrics(&ConfusionMatrix::new(19657, 404, 18310, 230)).map_err(|e| e.to_string())?;
    ensure((m.accuracy - 0.9836).abs() <= 1e-4, format!("accuracy {}", m.accuracy))?;
    ensure((m.f1 - 0.984).abs() <= 1e-3, format!("f1 {}", m.f1))?;
    ensure((m.fnr - 0.012).abs() <= 1e-3, format!("fnr {}", m.fnr))?;
    ensure((m.fpr - 0.022).abs() <= 1e-3, format!("fpr {}", m.fpr))?;
    Ok(format!("accuracy {:.5} f1 {:.5} fnr {:.5} fpr {:.5}", m.accuracy, m.f1, m.fnr, m.fpr))
}

struct Desk {
    detector: Detector,
    test: Vec<explicate::core::dataset::DatasetRecord>,
    records: Vec<explicate::core::dataset::DatasetRecord>,
}

fn desk_accuracy(desk: &mut Option<Desk>) -> Outcome {
    let start = Instant::now();
    let data = load_dataset(&[desk_corpus_path()], &ColumnOverrides::default()).map_err(|e| e.to_string())?;
    let (legit, phish) = data.class_counts();
    ensure(data.records.len() >= 2000 && legit > 0 && phish > 0, "desk corpus too small or single-class")?;
    let (detector, _, test, n_train) = train_on(&data.records, &Config::default()).map_err(|e| e.to_string())?;
    let (_, m) = evaluate(&detector, &test).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    *desk = Some(Desk { detector, test, records: data.records });
    ensure(m.accuracy >= 0.90 && m.f1 >= 0.90, format!("accuracy {:.4} f1 {:.4}", m.accuracy, m.f1))?;
    ensure(secs < 300.0, format!("took {secs:.1} s"))?;
    Ok(format!("train {n_train} / held-out {}: accuracy {:.4} f1 {:.4} in {secs:.1} s", m.confusion.total(), m.accuracy, m.f1))
}

fn random_model(rng: &mut ChaCha8Rng, dim: usize) -> (LinearModel, FeatureVector) {
    let w: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
    let mu: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let x: Vec<f64> = (0..dim).map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(-2.0..2.0) }).collect();
    let model = LinearModel::new(w, rng.random_range(-2.0..2.0), mu).unwrap();
    (model, FeatureVector::from_dense(&x))
}

fn shap_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let dim = rng.random_range(1..=12);
        let (model, x) = random_model(&mut rng, dim);
        let fast = shap_linear(&model, &x).map_err(|e| e.to_string())?;
        let slow = shap_brute_force(&model, &x).map_err(|e| e.to_string())?;
        for (a, b) in fast.phi.iter().zip(&slow) {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst < 1e-9, format!("max per-feature gap {worst:e}"))?;
    let mut worst_eff = 0.0f64;
    for _ in 0..10_000 {
        let dim = rng.random_range(1..=60);
        let (model, x) = random_model(&mut rng, dim);
        let e = shap_linear(&model, &x).map_err(|e| e.to_string())?;
        let logit = model.logit(&x).map_err(|e| e.to_string())?;
        worst_eff = worst_eff.max((e.base_value + e.total() - logit).abs());
    }
    ensure(worst_eff < 1e-9, format!("efficiency gap {worst_eff:e}"))?;
    Ok(format!("500 models max gap {worst:.1e}; 10000 instances efficiency gap {worst_eff:.1e} (tol 1e-9)"))
}

fn gradient_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-6);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let dim = rng.random_range(1..8);
        let n = rng.random_range(2..16);
        let xs: Vec<FeatureVector> = (0..n)
            .map(|_| {
                let row: Vec<f64> = (0..dim).map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random_range(-2.0..2.0) }).collect();
                FeatureVector::from_dense(&row)
            })
            .collect();
        let ys: Vec<u8> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let w: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect();
        let b = rng.random_range(-1.0..1.0);
        let l2 = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..0.5) };
        let (gw, gb) = logistic_gradient(&w, b, &xs, &ys, l2);
        let h = 1e-6;
        for j in 0..dim {
            let (mut up, mut down) = (w.clone(), w.clone());
            up[j] += h;
            down[j] -= h;
            let numeric = (logistic_loss(&up, b, &xs, &ys, l2) - logistic_loss(&down, b, &xs, &ys, l2)) / (2.0 * h);
            worst = worst.max(rel(gw[j], numeric));
        }
        let numeric = (logistic_loss(&w, b + h, &xs, &ys, l2) - logistic_loss(&w, b - h, &xs, &ys, l2)) / (2.0 * h);
        worst = worst.max(rel(gb, numeric));
    }
    ensure(worst < 1e-5, format!("max relative error {worst:e}"))?;
    Ok(format!("100 instances, max relative error {worst:.1e} (tol 1e-5)"))
}

const PRESENCE_WORDS: [&str; 10] = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel", "india", "juliet"];

fn lime_properties(desk: &Desk) -> Outcome {
    let d = &desk.detector;
    let config = LimeConfig::default();

    // (a) bitwise determinism
    for r in desk.test.iter().take(20) {
        let a = d.explain_lime(&r.text, &config).map_err(|e| e.to_string())?;
        let b = d.explain_lime(&r.text, &config).map_err(|e| e.to_string())?;
        let same = a.attributions.len() == b.attributions.len()
            && a.attributions.iter().zip(&b.attributions).all(|(x, y)| x.token == y.token && x.weight.to_bits() == y.weight.to_bits());
        ensure(same, "attributions differ between identical runs")?;
    }

    // (b) sign agreement with token-presence models
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let dim = rng.random_range(2..=10);
        let coef: Vec<f64> = (0..dim)
            .map(|_| rng.random_range(0.6..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let bias = rng.random_range(-1.0..1.0);
        let words = &PRESENCE_WORDS[..dim];
        let model = |t: &str| {
            let present: BTreeSet<&str> = t.split_whitespace().collect();
            sigmoid(bias + words.iter().zip(&coef).filter(|(w, _)| present.contains(*w)).map(|(_, c)| c).sum::<f64>())
        };
        let text = words.join(" ");
        let e = lime_explain(model, &text, &LimeConfig { top_k: dim, ..config }).map_err(|e| e.to_string())?;
        for (w, c) in words.iter().zip(&coef) {
            let a = e.attributions.iter().find(|a| a.token == *w).ok_or(format!("{w} missing"))?;
            ensure(a.weight.signum() == c.signum(), format!("{w}: weight {} vs coefficient {c}", a.weight))?;
        }
    }

    // (c) stability over 10 seeds
    let seeds: Vec<u64> = (0..10).collect();
    let mut stab = Vec::new();
    for email in [EMAIL_1, EMAIL_2, EMAIL_3] {
        let s = lime_stability(|t: &str| d.probability(t), email, &seeds, 5, &config).map_err(|e| e.to_string())?;
        stab.push(s);
    }
    ensure(stab.iter().all(|s| *s >= 0.8), format!("stability {stab:?}"))?;

    // (d) sign anchors
    let weight = |email: &str, token: &str| -> Result<f64, String> {
        let e = d.explain_lime(email, &LimeConfig { top_k: 50, ..config }).map_err(|e| e.to_string())?;
        e.attributions.iter().find(|a| a.token == token).map(|a| a.weight).ok_or(format!("{token} not attributed"))
    };
    for t in ["account", "click", "verify"] {
        let w = weight(EMAIL_1, t)?;
        ensure(w > 0.0, format!("{t} weight {w}"))?;
    }
    for t in ["meeting", "conference", "pm"] {
        let w = weight(EMAIL_2, t)?;
        ensure(w < 0.0, format!("{t} weight {w}"))?;
    }
    Ok(format!(
        "determinism 20/20, sign agreement 100/100, stability {:.3}/{:.3}/{:.3} (min 0.8), anchors hold",
        stab[0], stab[1], stab[2]
    ))
}

fn llm_offline(desk: &Desk, rt: &tokio::runtime::Runtime) -> Outcome {
    rt.block_on(async {
        std::env::set_var("EXPLICATE_ACCEPTANCE_KEY", "acceptance-secret");
        let stub = start_stub(Reply::Echo).await;
        let remote = EndpointConfig {
            base_url: stub.base_url(),
            api_key_env: "EXPLICATE_ACCEPTANCE_KEY".into(),
            backoff_base_secs: 0.01,
            ..EndpointConfig::default()
        };
        let client = LlmClient::new(remote.clone()).map_err(|e| e.to_string())?;
        let config = Config::default();
        let mut pairs = Vec::new();
        let (mut n_remote, mut n_fallback) = (0, 0);
        for (i, r) in desk.test.iter().take(50).enumerate() {
            let mode = ExplanationMode::ALL[i % 4];
            let options = AnalyzeOptions { mode: AnalysisMode::XaiPlusLlm, explanation_mode: mode, top_k: None };
            let mut report = analyze_xai(&desk.detector, "v", &r.text, &options, &config.lime, 5).map_err(|e| e.to_string())?;
            let c = if i % 2 == 0 { Some(&client) } else { None };
            attach_llm(&mut report, &r.text, mode, c, &remote).await;
            let e = report.llm.clone().unwrap();
            match e.source {
                ExplanationSource::Remote => n_remote += 1,
                ExplanationSource::Fallback => n_fallback += 1,
            }
            let p = explicate::core::Prediction { probability: report.probability, verdict: report.verdict, logit: report.logit };
            pairs.push((e, p));
        }
        let summary = consistency_rate(&pairs).map_err(|e| e.to_string())?;
        ensure(summary.rate == 1.0 && summary.unparseable == 0, format!("{summary:?}"))?;
        ensure(n_remote == 25 && n_fallback == 25, format!("remote {n_remote} fallback {n_fallback}"))?;

        let cases = [
            ("VERDICT: phishing\nPressure and a credential request.", VerdictLine::Phishing),
            ("**Verdict: Legitimate**\nRoutine scheduling.", VerdictLine::Legitimate),
            ("This one seems fine to me.", VerdictLine::Unparseable),
            ("VERDICT: perhaps", VerdictLine::Unparseable),
            ("", VerdictLine::Unparseable),
        ];
        for (content, expected) in cases {
            let stub = start_stub(Reply::Content(content.into())).await;
            let ep = EndpointConfig { base_url: stub.base_url(), ..remote.clone() };
            let c = LlmClient::new(ep.clone()).map_err(|e| e.to_string())?;
            let report = analyze_xai(&desk.detector, "v", EMAIL_1, &AnalyzeOptions::default(), &config.lime, 5).map_err(|e| e.to_string())?;
            let req = explicate::analysis::explanation_request(&report, EMAIL_1, ExplanationMode::Simple, &ep);
            let e = c.generate_explanation(&req).await.map_err(|e| e.to_string())?;
            ensure(e.verdict_line == expected && parse_verdict_line(content) == expected, format!("{content:?} parsed as {:?}", e.verdict_line))?;
            ensure(!e.body.is_empty(), "empty body")?;
            if !content.is_empty() {
                ensure(e.body == content, "body not preserved")?;
            }
        }
        Ok(format!(
            "consistency {:.3} over 50 requests ({n_remote} stub, {n_fallback} template); 5/5 verdict-line cases",
            summary.rate
        ))
    })
}

fn readability() -> Outcome {
    let s = flesch_reading_ease("The cat sat.").map_err(|e| e.to_string())?;
    ensure((s - 119.19).abs() <= 0.01, format!("score {s}"))?;
    let text = "Do not click the link. Report the message to your security team!";
    let once = flesch_reading_ease(text).map_err(|e| e.to_string())?;
    let twice = flesch_reading_ease(&format!("{text} {text}")).map_err(|e| e.to_string())?;
    ensure((once - twice).abs() < 1e-9, format!("duplication changed {once} to {twice}"))?;
    Ok(format!("\"The cat sat.\" = {s:.4} (119.19 +/- 0.01); duplication invariant"))
}

fn latency(desk: &Desk) -> Outcome {
    let config = Config::default();
    let mut ms = Vec::with_capacity(desk.test.len());
    let options = AnalyzeOptions::default();
    for r in &desk.test {
        let t = Instant::now();
        analyze_xai(&desk.detector, "v", &r.text, &options, &config.lime, config.top_features).map_err(|e| e.to_string())?;
        ms.push(t.elapsed().as_secs_f64() * 1e3);
    }
    ms.sort_by(f64::total_cmp);
    let pct = |q: f64| ms[((ms.len() as f64 * q).ceil() as usize).saturating_sub(1).min(ms.len() - 1)];
    let (p50, p95, max) = (pct(0.5), pct(0.95), ms[ms.len() - 1]);
    ensure(p95 < 1200.0, format!("p95 {p95:.1} ms"))?;
    Ok(format!("{} emails: p50 {p50:.1} ms, p95 {p95:.1} ms, max {max:.1} ms (budget 1200 ms)", ms.len()))
}

fn round_trips(desk: &Desk) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("model.json");
    save_model(&desk.detector, &path).map_err(|e| e.to_string())?;
    let back = load_model(&path).map_err(|e| e.to_string())?;
    for r in &desk.test {
        let a = desk.detector.predict(&r.text).map_err(|e| e.to_string())?;
        let b = back.predict(&r.text).map_err(|e| e.to_string())?;
        ensure(a.probability.to_bits() == b.probability.to_bits(), "prediction changed after reload")?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let dim = desk.detector.registry().total_dim();
    for _ in 0..100 {
        let x: Vec<f64> = (0..dim).map(|_| if rng.random_bool(0.02) { rng.random_range(-3.0..3.0) } else { 0.0 }).collect();
        let x = FeatureVector::from_dense(&x);
        let a = predict(desk.detector.model(), &x).map_err(|e| e.to_string())?;
        let b = predict(back.model(), &x).map_err(|e| e.to_string())?;
        ensure(a.probability.to_bits() == b.probability.to_bits(), "random-vector prediction changed")?;
    }

    let mut noisy = desk.records.clone();
    noisy.extend(desk.records.iter().take(300).map(|r| {
        let mut r = r.clone();
        r.text = r.text.to_uppercase();
        r
    }));
    let raw = dir.path().join("raw.csv");
    write_dataset(&raw, &noisy).map_err(|e| e.to_string())?;
    let once = load_dataset(&[&raw], &ColumnOverrides::default()).map_err(|e| e.to_string())?;
    let again = dir.path().join("again.csv");
    write_dataset(&again, &once.records).map_err(|e| e.to_string())?;
    let twice = load_dataset(&[&again], &ColumnOverrides::default()).map_err(|e| e.to_string())?;
    ensure(once.records.len() == desk.records.len() && twice.records.len() == once.records.len(), "dedup not idempotent")?;

    let a = split(&desk.records, &SplitConfig::default()).map_err(|e| e.to_string())?;
    let b = split(&desk.records, &SplitConfig::default()).map_err(|e| e.to_string())?;
    ensure(a == b, "split differs under the same seed")?;
    Ok(format!(
        "{} held-out + 100 random vectors bitwise equal; dedup {} -> {} -> {}; split deterministic",
        desk.test.len(),
        noisy.len(),
        once.records.len(),
        twice.records.len()
    ))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(p) => Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into())),
    }
}

fn main() {
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build().unwrap();
    let mut desk = None;
    let mut results: Vec<(&str, f64, Outcome)> = Vec::new();
    let mut record = |name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let r = guarded(f);
        results.push((name, t.elapsed().as_secs_f64(), r));
    };

    record("1 metric identities", &mut metric_identities);
    record("2 desk detection accuracy", &mut || desk_accuracy(&mut desk));
    record("3 shap oracle equivalence", &mut shap_oracle);
    record("4 gradient check", &mut gradient_check);
    let missing = || Err::<String, String>("desk model unavailable".into());
    match &desk {
        Some(d) => {
            record("5 lime properties", &mut || lime_properties(d));
            record("6 llm layer offline", &mut || llm_offline(d, &rt));
        }
        None => {
            record("5 lime properties", &mut || missing());
            record("6 llm layer offline", &mut || missing());
        }
    }
    record("7 readability", &mut readability);
    match &desk {
        Some(d) => {
            record("8 latency budget", &mut || latency(d));
            record("9 round-trips", &mut || round_trips(d));
        }
        None => {
            record("8 latency budget", &mut || missing());
            record("9 round-trips", &mut || missing());
        }
    }

    let mut failed = 0;
    for (name, secs, r) in &results {
        match r {
            Ok(detail) => println!("PASS  {name:<28} {detail} [{secs:.2} s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name:<28} {detail} [{secs:.2} s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
