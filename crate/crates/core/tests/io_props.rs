use corrcoef::io::{parse_sample, Cell, OutputRecord};
use proptest::prelude::*;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        -1.0f64..1.0,
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE),
    ]
}

proptest! {
    #[test]
    fn csv_numbers_round_trip(rows in prop::collection::vec(prop::collection::vec(finite(), 3), 0..20)) {
        let mut rec = OutputRecord::new("simulate", "normal:table").config("seed", 7u64);
        rec.columns = vec!["a".into(), "b".into(), "c".into()];
        rec.rows = rows.iter().map(|r| r.iter().map(|&v| Cell::Num(v)).collect()).collect();
        let back = OutputRecord::from_csv(&rec.to_csv()).unwrap();
        prop_assert_eq!(back.rows.len(), rows.len());
        for (got, want) in back.rows.iter().zip(&rows) {
            for (g, w) in got.iter().zip(want) {
                let Cell::Num(g) = g else { panic!("{g:?}") };
                prop_assert_eq!(g.to_bits(), w.to_bits());
            }
        }
        prop_assert_eq!(back.config, rec.config);
    }

    #[test]
    fn parsing_arbitrary_text_never_panics(text in ".{0,200}", header in any::<bool>()) {
        let _ = parse_sample(&text, header);
    }

    #[test]
    fn parsing_arbitrary_bytes_never_panics(bytes in prop::collection::vec(any::<u8>(), 0..200)) {
        let _ = parse_sample(&String::from_utf8_lossy(&bytes), false);
    }

    #[test]
    fn well_formed_rows_parse_exactly(pairs in prop::collection::vec((finite(), finite()), 0..30)) {
        let text: String = pairs.iter().map(|(x, y)| format!("{x:?},{y:?}\r\n")).collect();
        match parse_sample(&text, false) {
            Ok(sample) => prop_assert_eq!(sample.len(), pairs.len()),
            Err(_) => prop_assert!(pairs.len() < 2),
        }
    }
}
