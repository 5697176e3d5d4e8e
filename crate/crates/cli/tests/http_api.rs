use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

use mathseek_cli::server::{router, AppState};
use mathseek_core::app::{bundled, DataDir};
use mathseek_core::{extract_rules, Mode};

struct Fixture {
    _dir: tempfile::TempDir,
    app: Router,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let data = DataDir::new(dir.path());
    data.save_corpus(&bundled::corpus().unwrap()).unwrap();
    extract_rules(&bundled::parallel().unwrap())
        .save(data.rules_path())
        .unwrap();
    for mode in Mode::ALL {
        data.build(mode, None).unwrap();
    }
    let app = router(AppState::open(data).unwrap(), None);
    Fixture { _dir: dir, app }
}

async fn send(app: &Router, method: Method, uri: &str, body: Option<Value>) -> (StatusCode, Value) {
    let mut req = Request::builder().method(method).uri(uri);
    let body = match body {
        Some(v) => {
            req = req.header("content-type", "application/json");
            Body::from(v.to_string())
        }
        None => Body::empty(),
    };
    let resp = app.clone().oneshot(req.body(body).unwrap()).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes();
    let value = serde_json::from_slice(&bytes)
        .unwrap_or_else(|_| Value::String(String::from_utf8_lossy(&bytes).into_owned()));
    (status, value)
}

async fn get(app: &Router, uri: &str) -> (StatusCode, Value) {
    send(app, Method::GET, uri, None).await
}

async fn post(app: &Router, uri: &str, body: Value) -> (StatusCode, Value) {
    send(app, Method::POST, uri, Some(body)).await
}

fn encode(s: &str) -> String {
    s.bytes()
        .map(|b| match b {
            b'A'..=b'Z' | b'a'..=b'z' | b'0'..=b'9' | b'-' | b'_' | b'.' => (b as char).to_string(),
            _ => format!("%{b:02X}"),
        })
        .collect()
}

#[tokio::test]
async fn search_by_query_id_returns_ranked_markup() {
    let f = fixture();
    let (status, body) = get(&f.app, "/api/search?query_id=q4&mode=se&k=5").await;
    assert_eq!(status, StatusCode::OK);
    let results = body["results"].as_array().unwrap();
    assert!(!results.is_empty() && results.len() <= 5);
    for (i, r) in results.iter().enumerate() {
        assert_eq!(r["rank"], i + 1);
        assert!(r["score"].as_f64().unwrap() > 0.0);
        assert!(r["pmathml"].as_str().unwrap().starts_with("<math>"));
        assert!(r.get("cmathml").is_some());
    }
    assert_eq!(body["mode"], "se");
    assert_eq!(body["query_id"], "q4");
}

#[tokio::test]
async fn search_with_markup_in_url_and_body() {
    let f = fixture();
    let q = "<math><msup><mi>x</mi><mn>2</mn></msup></math>";
    let (status, by_url) = get(&f.app, &format!("/api/search?mode=pmathml&q={}", encode(q))).await;
    assert_eq!(status, StatusCode::OK);
    let (status, by_body) = post(&f.app, "/api/search", json!({"q": q, "mode": "pmathml"})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(by_url, by_body);
    assert!(!by_url["results"].as_array().unwrap().is_empty());
}

#[tokio::test]
async fn errors_carry_code_and_message() {
    let f = fixture();
    let bad = encode("<math><mi>x</math>");
    let (status, body) = get(&f.app, &format!("/api/search?mode=se&q={bad}")).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(body["code"], "malformed_mathml");
    assert!(body["message"].as_str().is_some());

    let (status, body) = get(&f.app, "/api/search?mode=latex&query_id=q1").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "not_found");

    let (status, _) = get(&f.app, "/api/search?mode=se&query_id=q99").await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, _) = get(&f.app, "/api/search?mode=se").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);

    let (status, body) = get(&f.app, "/api/nothing").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(body["code"], "not_found");
}

#[tokio::test]
async fn lists_bundled_queries() {
    let f = fixture();
    let (status, body) = get(&f.app, "/api/queries").await;
    assert_eq!(status, StatusCode::OK);
    let ids: Vec<&str> = body
        .as_array()
        .unwrap()
        .iter()
        .map(|q| q["id"].as_str().unwrap())
        .collect();
    for i in 1..=15 {
        assert!(ids.contains(&format!("q{i}").as_str()));
    }
}

#[tokio::test]
async fn judgment_changes_evaluation() {
    let f = fixture();
    let (_, before) = get(&f.app, "/api/eval?mode=se").await;
    let row = before["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["query_id"] == "q1")
        .unwrap()
        .clone();
    let retrieved: Vec<String> = serde_json::from_value(row["retrieved"].clone()).unwrap();
    let (_, qrels) = get(&f.app, "/api/qrels").await;
    let qrels = qrels.as_str().unwrap().to_string();
    // a retrieved document not already graded 0.5 for q1
    let doc = retrieved
        .iter()
        .find(|d| {
            !qrels
                .lines()
                .any(|l| l.starts_with("q1\t") && l.contains(d.as_str()) && l.ends_with("0.5"))
        })
        .unwrap();

    let (status, rec) = post(
        &f.app,
        "/api/judgments",
        json!({"query_id": "q1", "doc_id": doc, "grade": 0.5}),
    )
    .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(rec["grade"], 0.5);

    let (_, after) = get(&f.app, "/api/eval?mode=se").await;
    let new_row = after["rows"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["query_id"] == "q1")
        .unwrap();
    assert_ne!(row["p_at_10"], new_row["p_at_10"]);

    let (_, listed) = get(&f.app, "/api/judgments?query_id=q1").await;
    assert_eq!(listed.as_array().unwrap().len(), 1);
    let (_, qrels) = get(&f.app, "/api/qrels").await;
    assert!(qrels.as_str().unwrap().contains(&format!("q1\t{doc}\t0.5")));
}

#[tokio::test]
async fn judgment_validation_and_conflicts() {
    let f = fixture();
    let write = |body: Value| post(&f.app, "/api/judgments", body);

    let (status, _) = write(json!({"query_id": "q2", "doc_id": "d001", "grade": 0.7})).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = write(json!({"query_id": "nope", "doc_id": "d001", "grade": 1})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    let (status, _) = write(json!({"query_id": "q2", "doc_id": "zzz", "grade": 1})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);

    let (status, _) =
        write(json!({"query_id": "q2", "doc_id": "d001", "grade": 1, "expected": null})).await;
    assert_eq!(status, StatusCode::CREATED);
    let (status, body) =
        write(json!({"query_id": "q2", "doc_id": "d001", "grade": 0, "expected": null})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    assert_eq!(body["code"], "conflict");
    let (status, _) =
        write(json!({"query_id": "q2", "doc_id": "d001", "grade": 0, "expected": 0.5})).await;
    assert_eq!(status, StatusCode::CONFLICT);
    let (status, _) =
        write(json!({"query_id": "q2", "doc_id": "d001", "grade": 0, "expected": 1})).await;
    assert_eq!(status, StatusCode::CREATED);
    let (status, _) = write(json!({"query_id": "q2", "doc_id": "d001", "grade": 0.5})).await;
    assert_eq!(status, StatusCode::CREATED);
}

#[tokio::test(flavor = "multi_thread", worker_threads = 4)]
async fn concurrent_first_judgments_admit_one_writer() {
    let f = fixture();
    let app = Arc::new(f.app.clone());
    let tasks: Vec<_> = (0..16)
        .map(|i| {
            let app = app.clone();
            tokio::spawn(async move {
                let grade = [0.0, 0.5, 1.0][i % 3];
                post(
                    &app,
                    "/api/judgments",
                    json!({"query_id": "q3", "doc_id": "d002", "grade": grade, "expected": null}),
                )
                .await
                .0
            })
        })
        .collect();
    let mut created = 0;
    for t in tasks {
        match t.await.unwrap() {
            StatusCode::CREATED => created += 1,
            StatusCode::CONFLICT => {}
            other => panic!("unexpected {other}"),
        }
    }
    assert_eq!(created, 1);
}

#[tokio::test]
async fn rebuild_swaps_indexes_and_keeps_results() {
    let f = fixture();
    let (_, before) = get(&f.app, "/api/search?query_id=q5&mode=cmathml").await;
    let (status, reports) = post(&f.app, "/api/admin/rebuild?mode=cmathml", json!({})).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(reports[0]["mode"], "cmathml");
    let (_, after) = get(&f.app, "/api/search?query_id=q5&mode=cmathml").await;
    assert_eq!(before, after);
    let (status, _) = post(&f.app, "/api/admin/rebuild?mode=bogus", json!({})).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn eval_reports_every_built_mode() {
    let f = fixture();
    let (status, body) = get(&f.app, "/api/eval").await;
    assert_eq!(status, StatusCode::OK);
    let modes: Vec<&str> = body["summary"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["mode"].as_str().unwrap())
        .collect();
    assert_eq!(modes, ["pmathml", "se", "cmathml"]);
    let (status, _) = get(&f.app, "/api/eval?mode=xyz").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}
