//! The fuzz corpus seeds run through every decoder on stable: `seed-*` files
//! produced by an encoder must decode, the malformed ones must be refused,
//! and mutated or random bytes must never panic.

use std::path::PathBuf;

use fpp_cli::acceptance::parse_acceptance_summary;
use fpp_cli::{parse_config, parse_manifest};
use fpp_core::io::{decode_sample_binary, decode_sample_csv, parse_geodesic_json};
use fpp_lab::bench::parse_bench_report;
use fpp_lab::parse_fluctuation_csv;
use proptest::prelude::*;

fn utf8(data: &[u8]) -> Option<&str> {
    std::str::from_utf8(data).ok()
}

/// Target name and whether it accepted the input.
type Target = (&'static str, fn(&[u8]) -> bool);

const TARGETS: [Target; 8] = [
    ("parse_config", |d| utf8(d).is_some_and(|t| parse_config(t).is_ok())),
    ("decode_sample_binary", |d| decode_sample_binary(d).is_ok()),
    ("decode_sample_csv", |d| utf8(d).is_some_and(|t| decode_sample_csv(t).is_ok())),
    ("parse_geodesic_json", |d| utf8(d).is_some_and(|t| parse_geodesic_json(t).is_ok())),
    ("parse_fluctuation_csv", |d| utf8(d).is_some_and(|t| parse_fluctuation_csv(t).is_ok_and(|rows| !rows.is_empty()))),
    ("parse_manifest", |d| utf8(d).is_some_and(|t| parse_manifest(t).is_ok())),
    ("parse_bench_report", |d| utf8(d).is_some_and(|t| parse_bench_report(t).is_ok())),
    ("parse_acceptance_summary", |d| utf8(d).is_some_and(|t| parse_acceptance_summary(t).is_ok())),
];

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus")
}

fn seeds(target: &str) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = std::fs::read_dir(corpus_dir().join(target))
        .unwrap_or_else(|e| panic!("{target}: {e}"))
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap().to_string_lossy().starts_with("seed-"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn seeds_decode_as_labelled() {
    let malformed = ["seed-empty-object", "seed-truncated", "seed-nan", "seed-header-only"];
    for (target, accepts) in TARGETS {
        let seeds = seeds(target);
        assert!(!seeds.is_empty(), "{target} has no seeds");
        for (name, bytes) in seeds {
            let expect = !malformed.contains(&name.as_str());
            assert_eq!(accepts(&bytes), expect, "{target}/{name}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn mutated_seeds_never_panic(pick in any::<prop::sample::Index>(), edits in prop::collection::vec((any::<prop::sample::Index>(), any::<u8>()), 1..8), cut in any::<prop::sample::Index>()) {
        for (target, accepts) in TARGETS {
            let seeds = seeds(target);
            let mut bytes = seeds[pick.index(seeds.len())].1.clone();
            for (at, b) in &edits {
                let i = at.index(bytes.len().max(1));
                if i < bytes.len() {
                    bytes[i] = *b;
                }
            }
            bytes.truncate(cut.index(bytes.len() + 1));
            let _ = accepts(&bytes);
        }
    }

    #[test]
    fn random_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..512)) {
        for (_, accepts) in TARGETS {
            let _ = accepts(&bytes);
        }
    }
}
