use blowup_core::cache::{load_or_build, CacheStatus};
use blowup_core::exceptional::{
    enumerate_constructible, orbit_representative, replay, to_int_char, Atlas, EnumerationConfig,
};
use blowup_core::par::with_threads;
use blowup_core::Execution;

fn build(m: usize, rank: i64, depth: usize, exec: Execution) -> Atlas {
    enumerate_constructible(m, &EnumerationConfig::new(rank, depth), exec).unwrap()
}

#[test]
fn larger_bounds_only_add_records() {
    for m in [0usize, 1, 3] {
        let small = build(m, 15, 3, Execution::Sequential);
        for (rank, depth) in [(15, 5), (30, 3), (30, 5)] {
            let big = build(m, rank, depth, Execution::Sequential);
            assert!(big.len() >= small.len());
            for rec in &small.records {
                assert!(big.contains(&rec.ch), "m={m}: {} lost at ({rank},{depth})", rec.ch);
            }
        }
    }
}

#[test]
fn thread_count_does_not_change_the_atlas() {
    for m in [0usize, 2, 4] {
        let cfg = EnumerationConfig::new(40, 5);
        let seq = enumerate_constructible(m, &cfg, Execution::Sequential).unwrap();
        for threads in [1, 3, 8] {
            let par = with_threads(threads, || {
                enumerate_constructible(m, &cfg, Execution::Parallel).unwrap()
            });
            assert_eq!(par.to_jsonl(), seq.to_jsonl(), "m={m}, {threads} threads");
        }
    }
}

#[test]
fn histories_replay_to_their_records() {
    let atlas = build(2, 30, 4, Execution::Sequential);
    for rec in &atlas.records {
        let window = replay(2, &rec.history, 30).expect("history replays");
        let rep = orbit_representative(&to_int_char(&rec.ch).unwrap());
        // records are stored up to twists by -K
        assert!(
            (0..window.len()).any(|j| orbit_representative(window.member(j)) == rep),
            "{} not in its replayed window",
            rec.ch
        );
    }
}

#[test]
fn jsonl_roundtrip_keeps_truncation() {
    let mut cfg = EnumerationConfig::new(50, 8);
    cfg.max_windows = 5;
    let atlas = enumerate_constructible(3, &cfg, Execution::Sequential).unwrap();
    assert!(atlas.truncated);
    let back = Atlas::from_jsonl(&atlas.to_jsonl()).unwrap();
    assert_eq!(back, atlas);
    assert!(back.truncated);
    assert_eq!(back.to_jsonl(), atlas.to_jsonl());
}

#[test]
fn cache_is_keyed_by_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let e = Execution::Sequential;
    let a = load_or_build(Some(dir.path()), 1, &EnumerationConfig::new(10, 3), e).unwrap();
    let b = load_or_build(Some(dir.path()), 1, &EnumerationConfig::new(12, 3), e).unwrap();
    assert_eq!(a.status, CacheStatus::Built);
    assert_eq!(b.status, CacheStatus::Built);
    assert_ne!(a.path, b.path);
    let again = load_or_build(Some(dir.path()), 1, &EnumerationConfig::new(10, 3), e).unwrap();
    assert_eq!(again.status, CacheStatus::Hit);
    assert_eq!(again.atlas.to_jsonl(), a.atlas.to_jsonl());

    // a bumped format version is stale
    let path = a.path.unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::write(&path, text.replacen("\"format_version\":1", "\"format_version\":0", 1)).unwrap();
    let rebuilt = load_or_build(Some(dir.path()), 1, &EnumerationConfig::new(10, 3), e).unwrap();
    assert!(matches!(rebuilt.status, CacheStatus::Rebuilt { .. }));
    assert_eq!(rebuilt.atlas.to_jsonl(), again.atlas.to_jsonl());
}
