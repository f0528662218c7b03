//! The review service over real HTTP: a server on an ephemeral port and
//! blocking clients on plain threads.

use std::net::SocketAddr;
use std::sync::{Arc, Barrier};

use forge_core::model::BBox;
use forge_pipeline::review::{
    router, ErrorBody, QueuePage, ReviewEvent, ReviewState, ReviewStore, ReviewTask, TaskKind, TaskPayload, TaskStatus,
};
use reqwest::blocking::Client;
use reqwest::StatusCode;
use serde_json::{json, Value};

fn serve(store: ReviewStore) -> String {
    let (tx, rx) = std::sync::mpsc::channel::<SocketAddr>();
    std::thread::spawn(move || {
        let rt = tokio::runtime::Runtime::new().unwrap();
        rt.block_on(async move {
            let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
            tx.send(listener.local_addr().unwrap()).unwrap();
            axum::serve(listener, router(store, None)).await.unwrap();
        });
    });
    format!("http://{}", rx.recv().unwrap())
}

fn fix_task(store: &ReviewStore, id: &str) -> ReviewTask {
    let payload = TaskPayload { image_size: Some((200, 100)), text: Some("broken".into()), ..TaskPayload::default() };
    store.enqueue(TaskKind::CorruptionFix, id, None, payload).unwrap()
}

fn score_task(store: &ReviewStore, id: &str, lang: &str) -> ReviewTask {
    store.enqueue(TaskKind::TranslationScore, id, Some(lang.into()), TaskPayload::default()).unwrap()
}

fn post(client: &Client, url: String, body: Value) -> (StatusCode, Value) {
    let resp = client.post(url).json(&body).send().unwrap();
    let status = resp.status();
    (status, resp.json().unwrap())
}

#[test]
fn racing_fixes_yield_one_task_not_open() {
    let store = ReviewStore::in_memory();
    let task = fix_task(&store, "p1");
    let base = serve(store.clone());
    let barrier = Arc::new(Barrier::new(2));
    let handles: Vec<_> = ["first", "second"]
        .into_iter()
        .map(|text| {
            let (barrier, url) = (barrier.clone(), format!("{base}/task/{}/fix", task.task_id));
            std::thread::spawn(move || {
                let client = Client::new();
                barrier.wait();
                post(&client, url, json!({ "text": text, "version": 0 }))
            })
        })
        .collect();
    let results: Vec<(StatusCode, Value)> = handles.into_iter().map(|h| h.join().unwrap()).collect();
    let ok = results.iter().filter(|(s, _)| *s == StatusCode::OK).count();
    let conflicts: Vec<&Value> = results.iter().filter(|(s, _)| *s == StatusCode::CONFLICT).map(|(_, b)| b).collect();
    assert_eq!(ok, 1);
    assert_eq!(conflicts.len(), 1);
    assert_eq!(conflicts[0]["error"], "TaskNotOpen");
    assert_eq!(store.get(task.task_id).unwrap().status, TaskStatus::Fixed);
}

#[test]
fn stale_version_is_rejected() {
    let store = ReviewStore::in_memory();
    let task = fix_task(&store, "p1");
    let base = serve(store.clone());
    let (status, body) =
        post(&Client::new(), format!("{base}/task/{}/fix", task.task_id), json!({ "text": "x", "version": 7 }));
    assert_eq!(status, StatusCode::CONFLICT);
    let err: ErrorBody = serde_json::from_value(body).unwrap();
    assert_eq!(err.error, "TaskNotOpen");
    assert_eq!(store.get(task.task_id).unwrap().status, TaskStatus::Open);
}

#[test]
fn four_point_low_score_needs_a_second_review() {
    let store = ReviewStore::in_memory();
    let task = score_task(&store, "p1", "cat");
    let base = serve(store.clone());
    let client = Client::new();
    let url = format!("{base}/task/{}/score", task.task_id);
    let (status, body) = post(&client, url.clone(), json!({ "scale": "FourPoint", "value": 1, "reviewer_id": "a" }));
    assert_eq!(status, StatusCode::OK);
    let t: ReviewTask = serde_json::from_value(body).unwrap();
    assert_eq!(t.status, TaskStatus::Open);
    assert!(t.label.as_ref().unwrap().second_review.is_none());

    let (status, _) = post(&client, url.clone(), json!({ "scale": "FourPoint", "value": 1, "reviewer_id": "a" }));
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);

    let (status, body) = post(&client, url.clone(), json!({ "scale": "FourPoint", "value": 2, "reviewer_id": "b" }));
    assert_eq!(status, StatusCode::OK);
    let t: ReviewTask = serde_json::from_value(body).unwrap();
    assert_eq!(t.status, TaskStatus::Discarded);
    let label = t.label.unwrap();
    assert_eq!((label.value, label.second_review, label.second_reviewer_id.as_deref()), (1, Some(2), Some("b")));
    assert!(store.is_discarded("p1", "cat"));
    assert!(!store.is_discarded("p1", "deu"));
}

#[test]
fn four_point_second_review_can_keep_the_sample() {
    let store = ReviewStore::in_memory();
    let task = score_task(&store, "p1", "cat");
    let base = serve(store.clone());
    let client = Client::new();
    let url = format!("{base}/task/{}/score", task.task_id);
    post(&client, url.clone(), json!({ "scale": "FourPoint", "value": 2, "reviewer_id": "a" }));
    let (_, body) = post(&client, url, json!({ "scale": "FourPoint", "value": 3, "reviewer_id": "b" }));
    assert_eq!(body["status"], "Fixed");
}

#[test]
fn score_rules() {
    let store = ReviewStore::in_memory();
    let ids: Vec<u64> = (0..4).map(|i| score_task(&store, &format!("p{i}"), "cat").task_id).collect();
    let base = serve(store.clone());
    let client = Client::new();
    let score = |id: u64, body: Value| post(&client, format!("{base}/task/{id}/score"), body);
    assert_eq!(score(ids[0], json!({ "scale": "FourPoint", "value": 3, "reviewer_id": "a" })).1["status"], "Fixed");
    assert_eq!(score(ids[1], json!({ "scale": "TenPoint", "value": 4, "reviewer_id": "a" })).1["status"], "Discarded");
    assert_eq!(score(ids[2], json!({ "scale": "TenPoint", "value": 5, "reviewer_id": "a" })).1["status"], "Fixed");
    let (status, body) = score(ids[3], json!({ "scale": "FourPoint", "value": 5, "reviewer_id": "a" }));
    assert_eq!((status, body["error"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("OutOfRangeLabel")));
    let (status, body) = score(ids[3], json!({ "scale": "TenPoint", "value": -1, "reviewer_id": "a" }));
    assert_eq!((status, body["error"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("OutOfRangeLabel")));
}

#[test]
fn fix_validation() {
    let store = ReviewStore::in_memory();
    let fix = fix_task(&store, "p1");
    let scoring = score_task(&store, "p2", "cat");
    let base = serve(store.clone());
    let client = Client::new();
    let url = |id: u64, what: &str| format!("{base}/task/{id}/{what}");

    let (status, body) =
        post(&client, url(fix.task_id, "fix"), json!({ "bbox": { "x": 150, "y": 0, "w": 100, "h": 10 } }));
    assert_eq!((status, body["error"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("InvalidBbox")));
    let (status, body) = post(&client, url(fix.task_id, "fix"), json!({}));
    assert_eq!((status, body["error"].as_str()), (StatusCode::UNPROCESSABLE_ENTITY, Some("InvalidRequest")));
    let (status, body) = post(&client, url(scoring.task_id, "fix"), json!({ "text": "x" }));
    assert_eq!((status, body["error"].as_str()), (StatusCode::CONFLICT, Some("WrongKind")));
    let (status, body) =
        post(&client, url(fix.task_id, "score"), json!({ "scale": "TenPoint", "value": 9, "reviewer_id": "a" }));
    assert_eq!((status, body["error"].as_str()), (StatusCode::CONFLICT, Some("WrongKind")));
    let (status, body) = post(&client, url(999, "fix"), json!({ "text": "x" }));
    assert_eq!((status, body["error"].as_str()), (StatusCode::NOT_FOUND, Some("NotFound")));

    let (status, body) = post(
        &client,
        url(fix.task_id, "fix"),
        json!({ "text": "repaired", "bbox": { "x": 0, "y": 0, "w": 200, "h": 100 } }),
    );
    assert_eq!(status, StatusCode::OK);
    let t: ReviewTask = serde_json::from_value(body).unwrap();
    assert_eq!(t.fix.unwrap().bbox, Some(BBox::new(0, 0, 200, 100)));
    assert!(t.recheck_pending);
    let rechecks = store.take_rechecks().unwrap();
    assert_eq!(rechecks.len(), 1);
    assert!(store.take_rechecks().unwrap().is_empty());
}

#[test]
fn queue_filters_and_pages() {
    let store = ReviewStore::in_memory();
    for i in 0..5 {
        fix_task(&store, &format!("f{i}"));
    }
    for i in 0..3 {
        score_task(&store, &format!("s{i}"), "cat");
    }
    store.fix(1, forge_pipeline::review::FixRequest { text: Some("ok".into()), bbox: None, version: None }).unwrap();
    let base = serve(store);
    let client = Client::new();
    let get = |q: &str| -> QueuePage { client.get(format!("{base}/queue{q}")).send().unwrap().json().unwrap() };

    let all = get("");
    assert_eq!((all.total, all.tasks.len(), all.page), (8, 8, 1));
    assert_eq!(get("?kind=TranslationScore").total, 3);
    assert_eq!(get("?kind=CorruptionFix&status=Open").total, 4);
    let p2 = get("?per_page=3&page=2");
    assert_eq!(p2.tasks.iter().map(|t| t.task_id).collect::<Vec<_>>(), [4, 5, 6]);
    assert!(get("?per_page=3&page=4").tasks.is_empty());

    let resp = client.get(format!("{base}/task/2")).send().unwrap();
    assert_eq!(resp.status(), StatusCode::OK);
    assert_eq!(resp.json::<ReviewTask>().unwrap().problem_id, "f1");
    assert_eq!(client.get(format!("{base}/task/42")).send().unwrap().status(), StatusCode::NOT_FOUND);
    assert!(client.get(format!("{base}/queue?kind=Bogus")).send().unwrap().status().is_client_error());
}

#[test]
fn enqueue_over_http() {
    let store = ReviewStore::in_memory();
    let base = serve(store.clone());
    let (status, body) = post(
        &Client::new(),
        format!("{base}/queue"),
        json!({ "kind": "BboxAdjust", "problem_id": "p9", "language": "deu", "payload": { "note": "too long" } }),
    );
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["task_id"], 1);
    assert_eq!(store.tasks()[0].payload.note.as_deref(), Some("too long"));
}

#[test]
fn persisted_log_replays_to_the_same_state() {
    let dir = tempfile::tempdir().unwrap();
    let store = ReviewStore::open(dir.path()).unwrap();
    let a = fix_task(&store, "p1");
    let b = score_task(&store, "p2", "cat");
    let base = serve(store.clone());
    let client = Client::new();
    post(&client, format!("{base}/task/{}/fix", a.task_id), json!({ "text": "fixed" }));
    post(
        &client,
        format!("{base}/task/{}/score", b.task_id),
        json!({ "scale": "TenPoint", "value": 1, "reviewer_id": "r" }),
    );
    // A rejected request leaves no trace in the log.
    post(&client, format!("{base}/task/{}/fix", a.task_id), json!({ "text": "again" }));
    assert_eq!(store.events().len(), 4);

    let reopened = ReviewStore::open(dir.path()).unwrap();
    assert_eq!(reopened.tasks(), store.tasks());
    let replayed = ReviewState::replay(&store.events()).unwrap();
    assert_eq!(replayed.tasks(), store.tasks().as_slice());
    assert!(reopened.is_discarded("p2", "cat"));
    assert!(matches!(store.events()[2], ReviewEvent::Fixed { .. }));
}
