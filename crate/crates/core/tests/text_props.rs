use explicate_core::dataset::{dedup, dedup_key, normalize_label, split, DatasetRecord, SplitConfig};
use explicate_core::email::extract_urls;
use explicate_core::parse_email;
use explicate_core::textprep::{normalize_text, tokenize};
use proptest::prelude::*;

proptest! {
    #[test]
    fn normalize_is_idempotent(s in "\\PC{0,80}") {
        let once = normalize_text(&s);
        prop_assert_eq!(normalize_text(&once), once);
    }

    #[test]
    fn token_spans_index_the_source(s in "\\PC{0,80}") {
        for t in tokenize(&s) {
            let slice = s.get(t.start..t.end);
            prop_assert!(slice.is_some());
            prop_assert_eq!(slice.unwrap().to_lowercase(), t.token);
        }
    }

    #[test]
    fn parse_never_panics_and_body_offset_is_valid(s in "(\\PC|\n){0,200}") {
        let e = parse_email(&s);
        prop_assert!(s.is_char_boundary(e.body_offset));
        prop_assert_eq!(&s[e.body_offset..], e.body_text.as_str());
        if let Some((a, b)) = e.subject_span {
            prop_assert_eq!(&s[a..b], e.subject.as_str());
        }
    }

    #[test]
    fn extracted_urls_are_substrings(s in "[a-zA-Z0-9 :/.%@?=&-]{0,60}(https?://[a-z0-9.-]{1,20}(/[a-z0-9%@]{0,8}){0,3})?[ a-z.]{0,10}") {
        for url in extract_urls(&s) {
            prop_assert!(s.contains(&url.raw), "{} not in {}", url.raw, s);
        }
    }

    #[test]
    fn label_normalization_is_total(s in "\\PC{0,20}") {
        // Either maps to a class or reports the raw value back.
        match normalize_label(&s) {
            Ok(v) => prop_assert!(v <= 1),
            Err(explicate_core::Error::UnknownLabel(raw)) => prop_assert_eq!(raw, s),
            Err(other) => prop_assert!(false, "unexpected {other:?}"),
        }
    }

    #[test]
    fn split_partitions_records(n0 in 2usize..40, n1 in 2usize..40, seed in any::<u64>(), f in 0.05..0.95f64) {
        let records: Vec<DatasetRecord> = (0..n0 + n1)
            .map(|i| DatasetRecord { text: format!("mail {i}"), label: u8::from(i >= n0), source: "p".into() })
            .collect();
        let cfg = SplitConfig { test_fraction: f, seed, stratified: true };
        let (train, test) = split(&records, &cfg).unwrap();
        prop_assert_eq!(train.len() + test.len(), records.len());
        let mut all: Vec<_> = train.iter().chain(&test).map(|r| r.text.clone()).collect();
        all.sort();
        let mut want: Vec<_> = records.iter().map(|r| r.text.clone()).collect();
        want.sort();
        prop_assert_eq!(all, want);
        for (class, size) in [(0u8, n0), (1u8, n1)] {
            let got = test.iter().filter(|r| r.label == class).count() as f64;
            prop_assert!((got - size as f64 * f).abs() <= 1.0);
        }
        prop_assert_eq!(split(&records, &cfg).unwrap(), (train, test));
    }

    #[test]
    fn dedup_is_idempotent(texts in prop::collection::vec("[a-cA-C ]{0,6}", 0..30)) {
        let records: Vec<DatasetRecord> =
            texts.into_iter().map(|t| DatasetRecord { text: t, label: 0, source: "p".into() }).collect();
        let (once, _) = dedup(records);
        let (twice, removed) = dedup(once.clone());
        prop_assert_eq!(removed, 0);
        prop_assert_eq!(&twice, &once);
        let keys: std::collections::BTreeSet<_> = once.iter().map(|r| dedup_key(&r.text)).collect();
        prop_assert_eq!(keys.len(), once.len());
    }
}
