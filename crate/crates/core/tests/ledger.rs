use gvr_core::baselines::{radix_select, RadixParams};
use gvr_core::gvr::{gvr_select, DoneKind, GvrParams};
use gvr_core::metrics::{speedup_proxy, traffic_bytes, PassKind, Phase, ScanLedger, BYTES_PER_ELEMENT};
use gvr_core::rope::RopeConfig;
use gvr_core::synth::{random_prediction, ScoreSynth};
use gvr_core::PredictionSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = 20_000;
const K: usize = 512;

#[test]
fn converged_runs_match_the_pass_formula() {
    let synth = ScoreSynth::new(&RopeConfig::default(), N).unwrap();
    let prior = synth.static_prior(N, K).unwrap();
    let params = GvrParams::with_k(K);
    let mut converged = 0;
    for seed in 0..12 {
        let row = synth.generate(seed, N, 0.1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let random = random_prediction(&mut rng, N, K).unwrap();
        for pred in [None, Some(&prior), Some(&random)] {
            let out = gvr_select(&row, pred, &params).unwrap();
            let s = *out.stats.gvr().unwrap();
            let entries = out.ledger.entries();
            assert!(out.ledger.full_row_scans() >= 1);
            if s.done_kind != DoneKind::Converged {
                continue;
            }
            converged += 1;
            let i = s.secant_iters as u64;
            assert_eq!(out.ledger.full_row_scans() as u64, i + 1);
            assert_eq!(out.ledger.count_phase(Phase::ThresholdSearch) as u64, i);
            assert_eq!(out.ledger.count_phase(Phase::CandidateCollect), 1);

            // Nothing after the collection pass touches the full row.
            let collect = entries
                .iter()
                .position(|e| e.phase == Phase::CandidateCollect)
                .unwrap();
            assert!(entries[collect + 1..].iter().all(|e| e.kind == PassKind::CandidateBuffer));

            let t = traffic_bytes(&out.ledger);
            let m = pred.map_or(K, PredictionSet::len) as u64;
            let cand: u64 = entries[collect + 1..].iter().map(|e| e.elements).sum();
            assert_eq!(
                t.bytes_read,
                (i + 1) * N as u64 * BYTES_PER_ELEMENT + m * BYTES_PER_ELEMENT + cand * BYTES_PER_ELEMENT
            );
            assert_eq!(t.scattered_bytes, m * BYTES_PER_ELEMENT);
        }
    }
    assert!(converged >= 30, "{converged}");
}

#[test]
fn radix_stays_within_its_schedule() {
    let synth = ScoreSynth::new(&RopeConfig::default(), N).unwrap();
    for schedule in [vec![16, 11, 5], vec![11, 11, 10], vec![8, 8, 8, 8]] {
        let params = RadixParams {
            digit_schedule: schedule.clone(),
            early_exit_threshold: K,
        };
        for seed in 0..4 {
            let row = synth.generate(seed, N, 0.1).unwrap();
            let out = radix_select(&row, K, &params).unwrap();
            let scans = out.ledger.full_row_scans();
            assert!(scans >= 2 && scans <= 2 * schedule.len() + 1, "{schedule:?}: {scans}");
            assert_eq!(out.ledger.count_phase(Phase::RadixCollect), 1);
            assert_eq!(
                out.ledger.count_phase(Phase::RadixHistogram) as u32,
                out.stats.rounds
            );
        }
    }
}

#[test]
fn proxy_examples_and_scale_invariance() {
    assert_eq!(traffic_bytes(&ScanLedger::new()).bytes_read, 0);
    let mut one = ScanLedger::new();
    one.record(PassKind::FullRow, 1000, Phase::OracleSort);
    assert_eq!(traffic_bytes(&one).bytes_read, 4000);

    let mut base = ScanLedger::new();
    for _ in 0..6 {
        base.record(PassKind::FullRow, N, Phase::RadixFilter);
    }
    let mut gvr = ScanLedger::new();
    for _ in 0..3 {
        gvr.record(PassKind::FullRow, N, Phase::ThresholdSearch);
    }
    let p = speedup_proxy(&traffic_bytes(&gvr), &traffic_bytes(&base)).unwrap();
    assert_eq!(p, 2.0);
    let same = speedup_proxy(&traffic_bytes(&gvr), &traffic_bytes(&gvr)).unwrap();
    assert_eq!(same, 1.0);
    for factor in [2, 7, 1000] {
        let q = speedup_proxy(
            &traffic_bytes(&gvr.scaled(factor)),
            &traffic_bytes(&base.scaled(factor)),
        )
        .unwrap();
        assert_eq!(q, p);
    }
    assert!(speedup_proxy(&traffic_bytes(&ScanLedger::new()), &traffic_bytes(&base)).is_err());
}
