//! End-to-end exercises of every subcommand against fixture corpora.

mod common;

use std::fs;

use common::{assert_exit, dir_snapshot, run_cli, write_corpus, LEXICON};
use viseval::{load_clip_auto, ClipReport, CorruptionKind, CorruptionMask};

fn p(path: &std::path::Path) -> String {
    path.to_string_lossy().into_owned()
}

#[test]
fn corrupt_random_writes_clips_and_mask_sidecars() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    let ids = write_corpus(&input, 3, 24, 24, 16, 25.0);
    let output = tmp.path().join("corr");

    let out = run_cli(
        &[
            "corrupt", "--input", &p(&input), "--output", &p(&output),
            "--kind", "random", "--rate", "0.75", "--seed", "7",
        ],
        &[],
    );
    assert_exit(&out, 0);

    for id in &ids {
        let mask_text = fs::read_to_string(output.join(format!("{id}.mask.json"))).unwrap();
        let mask = CorruptionMask::from_json(&mask_text).unwrap();
        assert_eq!(mask.kind, CorruptionKind::Random);
        assert_eq!(mask.len(), 12); // round(0.75 * 16)
        let (clip, _) = load_clip_auto(&output.join(id)).unwrap();
        assert_eq!(clip.num_frames(), 16);

        // Unmasked frames survive the PNG round trip bit-exactly.
        let (orig, _) = load_clip_auto(&input.join(id)).unwrap();
        for i in 0..16 {
            if !mask.contains(i) {
                assert_eq!(clip.frame(i), orig.frame(i));
            }
        }
    }
}

#[test]
fn corrupt_visemic_masks_the_bilabial_run() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    write_corpus(&input, 1, 24, 24, 32, 25.0);
    let output = tmp.path().join("corr");

    let out = run_cli(
        &[
            "corrupt", "--input", &p(&input), "--output", &p(&output),
            "--kind", "visemic", "--viseme", "p", "--seed", "3",
        ],
        &[],
    );
    assert_exit(&out, 0);

    let mask_text = fs::read_to_string(output.join("clip000.mask.json")).unwrap();
    let mask = CorruptionMask::from_json(&mask_text).unwrap();
    assert_eq!(mask.kind, CorruptionKind::Visemic);
    assert_eq!(mask.params["viseme"], serde_json::json!("p"));
    // The "M" phone spans [0.6, 0.7) of a 1.28 s clip at 25 fps:
    // centers 0.78, 0.82, 0.86 -> frames 19..=21.
    assert_eq!(mask.indices, vec![19, 20, 21]);
}

#[test]
fn corrupt_pos_masks_noun_frames_and_ngram_protects_edges() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    write_corpus(&input, 1, 24, 24, 32, 25.0);

    let pos_out = tmp.path().join("pos");
    let out = run_cli(
        &[
            "corrupt", "--input", &p(&input), "--output", &p(&pos_out),
            "--kind", "pos", "--tag", "NOUN",
        ],
        &[],
    );
    assert_exit(&out, 0);
    let mask =
        CorruptionMask::from_json(&fs::read_to_string(pos_out.join("clip000.mask.json")).unwrap())
            .unwrap();
    assert_eq!(mask.kind, CorruptionKind::Pos);
    assert!(!mask.is_empty());

    let gram_out = tmp.path().join("gram");
    let out = run_cli(
        &[
            "corrupt", "--input", &p(&input), "--output", &p(&gram_out),
            "--kind", "interword", "--span", "1,2",
        ],
        &[],
    );
    assert_exit(&out, 0);
    let gram_mask = CorruptionMask::from_json(
        &fs::read_to_string(gram_out.join("clip000.mask.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(gram_mask.kind, CorruptionKind::InterWord);
    // The span runs from the first "answer" frame to the last "million"
    // frame; the protected guard frames stay outside the mask.
    let first = *gram_mask.indices.first().unwrap();
    let last = *gram_mask.indices.last().unwrap();
    let guard = gram_mask.params["guard_frames"].as_u64().unwrap() as usize;
    assert!(guard >= 1);
    let (orig, _) = load_clip_auto(&input.join("clip000")).unwrap();
    let (corr, _) = load_clip_auto(&gram_out.join("clip000")).unwrap();
    for i in (first - guard)..first {
        assert_eq!(corr.frame(i), orig.frame(i), "guard frame {i} must not be corrupted");
    }
    for i in (last + 1)..(last + 1 + guard) {
        assert_eq!(corr.frame(i), orig.frame(i), "guard frame {i} must not be corrupted");
    }
}

#[test]
fn missing_alignment_skips_that_clip_and_exits_partial() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    write_corpus(&input, 2, 24, 24, 16, 25.0);
    fs::remove_file(input.join("clip001.TextGrid")).unwrap();
    let output = tmp.path().join("corr");

    let out = run_cli(
        &[
            "corrupt", "--input", &p(&input), "--output", &p(&output),
            "--kind", "visemic", "--viseme", "p",
        ],
        &[],
    );
    assert_exit(&out, 1);
    assert!(output.join("clip000").is_dir());
    assert!(!output.join("clip001").exists());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("clip001"), "stderr: {stderr}");
}

#[test]
fn evaluate_hold_baseline_produces_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    let ids = write_corpus(&input, 2, 24, 24, 16, 25.0);
    let corr = tmp.path().join("corr");
    let reports = tmp.path().join("reports");

    assert_exit(
        &run_cli(
            &[
                "corrupt", "--input", &p(&input), "--output", &p(&corr),
                "--kind", "random", "--rate", "0.40", "--seed", "5",
            ],
            &[],
        ),
        0,
    );
    assert_exit(
        &run_cli(
            &[
                "evaluate", "--original", &p(&input), "--corrupted", &p(&corr),
                "--model", "hold", "--output", &p(&reports),
            ],
            &[],
        ),
        0,
    );

    for id in &ids {
        let text = fs::read_to_string(reports.join(format!("{id}.report.json"))).unwrap();
        let report: ClipReport = serde_json::from_str(&text).unwrap();
        assert_eq!(report.model, "hold");
        assert_eq!(report.clip_id, *id);
        let c = report.corruption.as_ref().unwrap();
        assert_eq!(c.kind, CorruptionKind::Random);
        assert_eq!(c.num_corrupted, 6); // round(0.40 * 16)
        assert_eq!(report.metrics.evaluated_frames, 6);
        assert!(report.metrics.mse > 0.0);
        assert!(report.metrics.psnr_db.is_finite());
        assert!(report.metrics.ssim > 0.0 && report.metrics.ssim < 1.0);
    }
}

#[test]
fn evaluate_perfect_reconstruction_reports_inf_psnr() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    write_corpus(&input, 1, 24, 24, 12, 25.0);
    let reports = tmp.path().join("reports");

    // Reconstruction dir == original dir: identical clips, whole scope.
    assert_exit(
        &run_cli(
            &[
                "evaluate", "--original", &p(&input), "--reconstruction", &p(&input),
                "--scope", "whole", "--output", &p(&reports),
            ],
            &[],
        ),
        0,
    );
    let text = fs::read_to_string(reports.join("clip000.report.json")).unwrap();
    assert!(text.contains("\"psnr_db\": \"inf\""));
    let report: ClipReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.metrics.ssim, 1.0);
    assert_eq!(report.metrics.mse, 0.0);
    assert_eq!(report.model, "external");
    assert!(report.corruption.is_none());
}

#[test]
fn evaluate_with_roi_adds_the_roi_block() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    write_corpus(&input, 1, 24, 24, 12, 25.0);
    let corr = tmp.path().join("corr");
    let reports = tmp.path().join("reports");

    assert_exit(
        &run_cli(
            &[
                "corrupt", "--input", &p(&input), "--output", &p(&corr),
                "--kind", "random", "--rate", "0.40",
            ],
            &[],
        ),
        0,
    );
    assert_exit(
        &run_cli(
            &[
                "evaluate", "--original", &p(&input), "--corrupted", &p(&corr),
                "--model", "linear", "--output", &p(&reports),
                "--roi", &p(&input),
            ],
            &[],
        ),
        0,
    );
    let report: ClipReport = serde_json::from_str(
        &fs::read_to_string(reports.join("clip000.report.json")).unwrap(),
    )
    .unwrap();
    let roi = report.metrics.roi.expect("roi block present");
    assert_eq!(roi.coverage, 1.0);
    assert!(roi.ssim <= 1.0);
    assert_eq!(report.model, "linear");
}

#[test]
fn synth_freezes_clips_and_whole_scope_scores_them() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    write_corpus(&input, 1, 24, 24, 32, 25.0);
    let frozen = tmp.path().join("frozen");
    let reports = tmp.path().join("reports");

    assert_exit(
        &run_cli(&["synth", "--input", &p(&input), "--output", &p(&frozen)], &[]),
        0,
    );
    let (clip, _) = load_clip_auto(&frozen.join("clip000")).unwrap();
    let mut distinct: Vec<&viseval::Frame> = Vec::new();
    for f in clip.frames() {
        if !distinct.contains(&f) {
            distinct.push(f);
        }
    }
    assert_eq!(distinct.len(), 2);

    assert_exit(
        &run_cli(
            &[
                "evaluate", "--original", &p(&input), "--reconstruction", &p(&frozen),
                "--scope", "whole", "--output", &p(&reports), "--model-name", "freeze",
            ],
            &[],
        ),
        0,
    );
    let report: ClipReport = serde_json::from_str(
        &fs::read_to_string(reports.join("clip000.report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report.model, "freeze");
    assert!(report.metrics.ssim < 1.0);
    assert!(report.metrics.psnr_db.is_finite());
}

#[test]
fn pairs_finds_the_reference_word_pairs() {
    let tmp = tempfile::tempdir().unwrap();
    let lex = tmp.path().join("lexicon.dict");
    fs::write(&lex, LEXICON).unwrap();

    let out = run_cli(&["pairs", "--lexicon", &p(&lex), "--min-shared", "3"], &[]);
    assert_exit(&out, 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let million: Vec<&str> = stdout
        .lines()
        .find(|l| l.contains("billion") && l.contains("million"))
        .expect("million/billion row")
        .split('\t')
        .collect();
    assert_eq!(million[3], "p");
    assert_eq!(million[4], "0");
    let probably: Vec<&str> = stdout
        .lines()
        .find(|l| l.contains("possibly") && l.contains("probably"))
        .expect("probably/possibly row")
        .split('\t')
        .collect();
    assert_eq!(probably[3], "@");
    assert!(probably[4].parse::<usize>().unwrap() > 0);
}

#[test]
fn stats_counts_the_fixture_corpus() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    write_corpus(&input, 6, 24, 24, 16, 25.0);

    let out = run_cli(&["stats", "--input", &p(&input), "--format", "json"], &[]);
    assert_exit(&out, 0);
    let stats: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(stats["num_utterances"], 6);
    assert_eq!(stats["num_speakers"], 5); // spk00..spk04, one reused
    assert_eq!(stats["num_word_instances"], 18); // 3 tokens x 6 clips
    assert_eq!(stats["vocabulary"], 3);
}

#[test]
fn report_groups_by_corruption_and_model() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    write_corpus(&input, 2, 24, 24, 16, 25.0);
    let corr = tmp.path().join("corr");
    let reports = tmp.path().join("reports");

    assert_exit(
        &run_cli(
            &[
                "corrupt", "--input", &p(&input), "--output", &p(&corr),
                "--kind", "prefix", "--rate", "0.40",
            ],
            &[],
        ),
        0,
    );
    assert_exit(
        &run_cli(
            &[
                "evaluate", "--original", &p(&input), "--corrupted", &p(&corr),
                "--model", "hold", "--output", &p(&reports),
            ],
            &[],
        ),
        0,
    );

    let out = run_cli(&["report", "--reports", &p(&reports), "--group-by", "corruption"], &[]);
    assert_exit(&out, 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    let mut lines = stdout.lines();
    assert_eq!(lines.next().unwrap(), "group,n,mse,l1,ssim,psnr_db");
    let row = lines.next().unwrap();
    assert!(row.starts_with("prefix/0.40,2,"), "row: {row}");

    let out = run_cli(&["report", "--reports", &p(&reports), "--group-by", "model"], &[]);
    assert_exit(&out, 0);
    assert!(String::from_utf8_lossy(&out.stdout).lines().nth(1).unwrap().starts_with("hold,2,"));
}

#[test]
fn standardized_corruption_pads_and_evaluate_realigns() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    write_corpus(&input, 1, 24, 24, 30, 25.0);
    let corr = tmp.path().join("corr");
    let reports = tmp.path().join("reports");

    assert_exit(
        &run_cli(
            &[
                "corrupt", "--input", &p(&input), "--output", &p(&corr),
                "--kind", "random", "--rate", "0.40", "--standardize", "32",
            ],
            &[],
        ),
        0,
    );
    let mask =
        CorruptionMask::from_json(&fs::read_to_string(corr.join("clip000.mask.json")).unwrap())
            .unwrap();
    assert_eq!(mask.params["pad"], serde_json::json!([30, 31]));
    assert_eq!(mask.len(), 13); // round(0.40 * 32)
    assert!(mask.indices.iter().all(|&i| i < 30));
    let (clip, _) = load_clip_auto(&corr.join("clip000")).unwrap();
    assert_eq!(clip.num_frames(), 32);

    assert_exit(
        &run_cli(
            &[
                "evaluate", "--original", &p(&input), "--corrupted", &p(&corr),
                "--model", "hold", "--output", &p(&reports),
            ],
            &[],
        ),
        0,
    );
    let report: ClipReport = serde_json::from_str(
        &fs::read_to_string(reports.join("clip000.report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report.metrics.evaluated_frames, 13);
}

#[test]
fn per_frame_vectors_and_format_override() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    write_corpus(&input, 1, 24, 24, 10, 25.0);
    let corr = tmp.path().join("corr");
    let reports = tmp.path().join("reports");

    // PNG input republished as raw RGB8.
    assert_exit(
        &run_cli(
            &[
                "corrupt", "--input", &p(&input), "--output", &p(&corr),
                "--kind", "random", "--rate", "0.40", "--format", "raw",
            ],
            &[],
        ),
        0,
    );
    assert!(corr.join("clip000.rgb").is_file());
    assert!(corr.join("clip000.json").is_file());

    assert_exit(
        &run_cli(
            &[
                "evaluate", "--original", &p(&input), "--corrupted", &p(&corr),
                "--model", "hold", "--output", &p(&reports),
                "--scope", "whole", "--per-frame",
            ],
            &[],
        ),
        0,
    );
    let report: ClipReport = serde_json::from_str(
        &fs::read_to_string(reports.join("clip000.report.json")).unwrap(),
    )
    .unwrap();
    let pf = report.metrics.per_frame.expect("per-frame vectors present");
    assert_eq!(pf.frames, (0..10).collect::<Vec<_>>());
    assert_eq!(pf.ssim.len(), 10);
    assert_eq!(pf.mse.len(), 10);
    // Uncorrupted frames reconstruct exactly; their per-frame PSNR is the
    // +inf sentinel and survives the JSON round trip.
    assert!(pf.psnr_db.iter().any(|v| v.is_infinite()));
    assert!(pf.psnr_db.iter().any(|v| v.is_finite()));
}

#[test]
fn usage_errors_exit_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    write_corpus(&input, 1, 24, 24, 8, 25.0);

    // Missing --rate for a rate-based kind.
    let out = run_cli(
        &["corrupt", "--input", &p(&input), "--output", &p(&tmp.path().join("x")), "--kind", "random"],
        &[],
    );
    assert_exit(&out, 2);

    // Unknown flag comes from clap with the same code.
    let out = run_cli(&["corrupt", "--nonsense"], &[]);
    assert_exit(&out, 2);

    // Evaluate without any reconstruction source.
    let out = run_cli(
        &[
            "evaluate", "--original", &p(&input), "--output", &p(&tmp.path().join("y")),
            "--scope", "whole",
        ],
        &[],
    );
    assert_exit(&out, 2);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("orig");
    write_corpus(&input, 3, 24, 24, 16, 25.0);

    let mut snapshots = Vec::new();
    for run in ["a", "b"] {
        let corr = tmp.path().join(format!("corr_{run}"));
        assert_exit(
            &run_cli(
                &[
                    "corrupt", "--input", &p(&input), "--output", &p(&corr),
                    "--kind", "suffix", "--rate", "0.75", "--seed", "11",
                ],
                &[],
            ),
            0,
        );
        snapshots.push(dir_snapshot(&corr));
    }
    assert_eq!(snapshots[0], snapshots[1]);
}
