mod common;

use forge_core::client::ClientError;
use forge_core::model::{BBox, LanguageTag, ProblemRecord};
use forge_core::qe::{Aggregate, GateConfig, Verdict};
use forge_core::textmetrics::ChrfParams;
use forge_pipeline::clients::{
    EchoTranslator, FixedJudge, JudgeClient, JudgeLabel, JudgeRequest, ScriptedTranslator, TranslationClient,
};
use forge_pipeline::corruption::{corruption_loop, corruption_pass, JudgeItem};
use forge_pipeline::review::{FixRequest, ReviewStore, TaskKind, TaskStatus};
use forge_pipeline::stages::{joined_text, qe_stage, translate_problem, translate_stage};
use forge_pipeline::PipelineError;

fn eng() -> LanguageTag {
    LanguageTag::new("eng").unwrap()
}

fn cat() -> LanguageTag {
    LanguageTag::new("cat").unwrap()
}

fn gate() -> GateConfig {
    GateConfig::new(0.625, 0.85, Aggregate::Max).unwrap()
}

#[test]
fn text_unit_is_question_and_options() {
    let p = common::problem(3);
    let t = translate_problem(&p, &eng(), &cat(), &EchoTranslator::new("echo")).unwrap();
    assert_eq!(t.record.source_text, joined_text(&p));
    assert_eq!(t.record.source_text.split('\n').count(), 6);
    assert_eq!(t.options[4], "");
    assert_eq!(t.apply_to(&p), p);
}

#[test]
fn translation_failures_are_isolated() {
    let pool = common::pool(10);
    let client = ScriptedTranslator::new("mt").fail("p003").fail("p007");
    let out = translate_stage(&pool, &eng(), &cat(), &client, 4).unwrap();
    let ids: Vec<&str> = out.translations.iter().map(|t| t.record.problem_id.as_str()).collect();
    assert_eq!(ids.len(), 8);
    assert!(!ids.contains(&"p003") && !ids.contains(&"p007"));
    let failed: Vec<&str> = out.failures.iter().map(|f| f.problem_id.as_str()).collect();
    assert_eq!(failed, ["p003", "p007"]);
    assert!(out.failures.iter().all(|f| f.stage == "translate" && f.language.as_deref() == Some("cat")));
}

#[test]
fn parallel_equals_serial() {
    let pool = common::pool(30);
    let client = ScriptedTranslator::new("mt").fail("p011").reply("p004", "quatre");
    let serial = translate_stage(&pool, &eng(), &cat(), &client, 1).unwrap();
    let parallel = translate_stage(&pool, &eng(), &cat(), &client, 8).unwrap();
    assert_eq!(serial, parallel);
    let bt: Vec<&dyn TranslationClient> = vec![&client];
    let qs = qe_stage(&serial.translations, &bt, &gate(), &ChrfParams::default(), 1).unwrap();
    let qp = qe_stage(&serial.translations, &bt, &gate(), &ChrfParams::default(), 8).unwrap();
    assert_eq!(qs, qp);
}

#[test]
fn sabotaged_backtranslations_fail_the_gate() {
    let pool = common::pool(10);
    let t = translate_stage(&pool, &eng(), &cat(), &EchoTranslator::new("mt"), 2).unwrap();
    let sabotage = ScriptedTranslator::new("bt").reply("p001", "zzz").reply("p005", "qqq").reply("p008", "ww");
    let bt: Vec<&dyn TranslationClient> = vec![&sabotage];
    let out = qe_stage(&t.translations, &bt, &gate(), &ChrfParams::default(), 2).unwrap();
    let failed: Vec<&str> =
        out.reports.iter().filter(|r| r.verdict == Verdict::Fail).map(|r| r.problem_id.as_str()).collect();
    assert_eq!(failed, ["p001", "p005", "p008"]);
    assert!(out.reports.iter().filter(|r| r.verdict != Verdict::Fail).all(|r| r.aggregate_m == 1.0));
}

#[test]
fn a_second_backtranslator_can_rescue_a_sample() {
    let pool = common::pool(4);
    let t = translate_stage(&pool, &eng(), &cat(), &EchoTranslator::new("mt"), 1).unwrap();
    let bad = ScriptedTranslator::new("bad").reply("p002", "nonsense");
    let good = EchoTranslator::new("good");
    let only_bad: Vec<&dyn TranslationClient> = vec![&bad];
    let both: Vec<&dyn TranslationClient> = vec![&bad, &good];
    let a = qe_stage(&t.translations, &only_bad, &gate(), &ChrfParams::default(), 1).unwrap();
    let b = qe_stage(&t.translations, &both, &gate(), &ChrfParams::default(), 1).unwrap();
    assert_eq!(a.reports[2].verdict, Verdict::Fail);
    assert_eq!(b.reports[2].verdict, Verdict::PassHighQuality);
    assert_eq!(b.reports[2].num_backtranslators, 2);
}

#[test]
fn failing_backtranslator_is_dropped_per_sample() {
    let pool = common::pool(3);
    let t = translate_stage(&pool, &eng(), &cat(), &EchoTranslator::new("mt"), 1).unwrap();
    let flaky = ScriptedTranslator::new("flaky").fail("p001");
    let good = EchoTranslator::new("good");
    let bt: Vec<&dyn TranslationClient> = vec![&flaky, &good];
    let out = qe_stage(&t.translations, &bt, &gate(), &ChrfParams::default(), 1).unwrap();
    assert_eq!(out.reports.len(), 3);
    assert_eq!(out.reports[1].backtranslator_ids, ["good"]);
    assert_eq!(out.failures.len(), 1);

    let only_flaky: Vec<&dyn TranslationClient> = vec![&flaky];
    let out = qe_stage(&t.translations, &only_flaky, &gate(), &ChrfParams::default(), 1).unwrap();
    assert_eq!(out.reports.len(), 2);
    assert_eq!(out.failures.len(), 2);
}

fn items(records: &[ProblemRecord]) -> Vec<JudgeItem> {
    records
        .iter()
        .map(|r| JudgeItem { problem_id: r.id.clone(), image: vec![1, 2, 3], transcript: joined_text(r) })
        .collect()
}

fn loader(r: &ProblemRecord) -> Result<(JudgeItem, Option<(u32, u32)>), PipelineError> {
    Ok((items(std::slice::from_ref(r)).remove(0), Some((320, 100))))
}

#[test]
fn clean_judge_flags_nothing() {
    let pool = common::pool(10);
    assert!(corruption_pass(&items(&pool), &FixedJudge::default(), 1, 4).unwrap().is_empty());
    let store = ReviewStore::in_memory();
    let out = corruption_loop(pool.clone(), &loader, &FixedJudge::default(), &store, 5, 4).unwrap();
    assert_eq!(out.clean, pool);
    assert_eq!(out.rounds, 1);
    assert!(store.tasks().is_empty());
}

#[test]
fn flagged_samples_are_queued_and_held_back() {
    let pool = common::pool(10);
    let judge = FixedJudge::new(["p003", "p007"]);
    let flags = corruption_pass(&items(&pool), &judge, 1, 4).unwrap();
    let ids: Vec<&str> = flags.iter().map(|f| f.problem_id.as_str()).collect();
    assert_eq!(ids, ["p003", "p007"]);
    assert!(flags.iter().all(|f| f.label == JudgeLabel::Corrupted && !f.resolved));

    let store = ReviewStore::in_memory();
    let out = corruption_loop(pool, &loader, &judge, &store, 5, 4).unwrap();
    assert_eq!(out.clean.len(), 8);
    assert_eq!(out.pending, ["p003", "p007"]);
    let tasks = store.tasks();
    assert_eq!(tasks.len(), 2);
    assert!(tasks.iter().all(|t| t.kind == TaskKind::CorruptionFix && t.status == TaskStatus::Open));
    assert_eq!(tasks[0].payload.image_size, Some((320, 100)));
}

/// Flags a sample until its question text contains "fixed".
struct TextJudge;

impl JudgeClient for TextJudge {
    fn id(&self) -> &str {
        "text-judge"
    }

    fn judge(&self, request: &JudgeRequest<'_>) -> Result<JudgeLabel, ClientError> {
        let broken = request.problem_id == "p002" && !request.transcript.contains("fixed");
        Ok(if broken { JudgeLabel::Corrupted } else { JudgeLabel::NotCorrupted })
    }
}

#[test]
fn reviewer_fix_is_rejudged_on_the_next_run() {
    let pool = common::pool(5);
    let store = ReviewStore::in_memory();
    let first = corruption_loop(pool.clone(), &loader, &TextJudge, &store, 5, 2).unwrap();
    assert_eq!(first.pending, ["p002"]);
    let task = store.tasks().remove(0);
    let fix = FixRequest { text: Some("fixed question".into()), bbox: Some(BBox::new(1, 2, 30, 40)), version: None };
    store.fix(task.task_id, fix).unwrap();

    let second = corruption_loop(pool, &loader, &TextJudge, &store, 5, 2).unwrap();
    assert!(second.pending.is_empty());
    assert_eq!(second.clean.len(), 5);
    assert_eq!(second.clean[2].question_text, "fixed question");
    assert_eq!(second.clean[2].bbox, BBox::new(1, 2, 30, 40));
    assert_eq!(store.tasks().len(), 1);
}

/// Answers "maybe".
struct VagueJudge;

impl JudgeClient for VagueJudge {
    fn id(&self) -> &str {
        "vague"
    }

    fn judge(&self, _: &JudgeRequest<'_>) -> Result<JudgeLabel, ClientError> {
        JudgeLabel::parse("maybe")
    }
}

#[test]
fn unparseable_judge_reply_is_a_protocol_error() {
    let err = corruption_pass(&items(&common::pool(2)), &VagueJudge, 1, 1).unwrap_err();
    assert!(matches!(err, PipelineError::Judge { source: ClientError::Protocol(_), .. }), "{err}");
}
