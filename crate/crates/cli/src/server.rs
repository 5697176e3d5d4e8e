//! JSON HTTP API over a data directory.
//!
//! Searches run against immutable engine snapshots; a rebuild builds new
//! indexes under an exclusive lock and swaps the snapshot in one step.
//! Judgments go straight to the append-only log, so evaluation always sees
//! the latest grades.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::extract::{Query as UrlQuery, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use tower_http::services::ServeDir;

use mathseek_core::app::{DataDir, Expect, JudgmentLog, JudgmentRecord};
use mathseek_core::eval::run_comparison;
use mathseek_core::{parse_mathml, Document, Engine, Error, Grade, Mode, Query};

pub const DEFAULT_K: usize = 10;

/// What one search hit carries besides its score.
#[derive(Debug, Clone)]
struct DocView {
    pmathml: String,
    cmathml: Option<String>,
}

struct Snapshot {
    engine: Engine,
    docs: HashMap<String, DocView>,
}

impl Snapshot {
    fn load(data: &DataDir) -> mathseek_core::Result<Snapshot> {
        let docs = if data.corpus_path().exists() {
            data.load_corpus()?
        } else {
            Vec::new()
        };
        Ok(Snapshot {
            engine: data.load_engine()?,
            docs: docs.iter().map(view).collect(),
        })
    }
}

fn view(doc: &Document) -> (String, DocView) {
    (
        doc.doc_id.clone(),
        DocView {
            pmathml: doc.ptree.to_xml(),
            cmathml: doc.ctree_gold.as_ref().map(|t| t.to_xml()),
        },
    )
}

pub struct AppState {
    data: DataDir,
    queries: Vec<Query>,
    /// One appender for the whole service, so conditional writes serialize.
    judgments: Arc<JudgmentLog>,
    snapshot: RwLock<Arc<Snapshot>>,
    rebuild: tokio::sync::Mutex<()>,
}

impl AppState {
    pub fn open(data: DataDir) -> mathseek_core::Result<Arc<AppState>> {
        let snapshot = Snapshot::load(&data)?;
        Ok(Arc::new(AppState {
            queries: data.load_queries()?,
            judgments: Arc::new(data.judgments()),
            data,
            snapshot: RwLock::new(Arc::new(snapshot)),
            rebuild: tokio::sync::Mutex::new(()),
        }))
    }

    fn current(&self) -> Arc<Snapshot> {
        self.snapshot
            .read()
            .unwrap_or_else(|p| p.into_inner())
            .clone()
    }

    fn qrels(&self) -> mathseek_core::Result<mathseek_core::Qrels> {
        self.judgments.compile(&self.data.load_base_qrels()?)
    }

    fn query(&self, id: &str) -> Result<&Query, ApiError> {
        self.queries
            .iter()
            .find(|q| q.id == id)
            .ok_or_else(|| not_found("query", id))
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: &'a str,
    message: &'a str,
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = ErrorBody {
            code: self.code,
            message: &self.message,
        };
        (self.status, Json(body)).into_response()
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> ApiError {
        let (status, code) = match &e {
            Error::Xml { .. } | Error::Structure { .. } => {
                (StatusCode::BAD_REQUEST, "malformed_mathml")
            }
            Error::InvalidGrade(_) | Error::InvalidArgument(_) => {
                (StatusCode::BAD_REQUEST, "invalid_argument")
            }
            Error::NotFound { .. } | Error::MissingMode(_) => (StatusCode::NOT_FOUND, "not_found"),
            Error::Conflict(_) => (StatusCode::CONFLICT, "conflict"),
            _ => (StatusCode::INTERNAL_SERVER_ERROR, "internal"),
        };
        if status == StatusCode::INTERNAL_SERVER_ERROR {
            log::error!("{e}");
        }
        ApiError {
            status,
            code,
            message: e.to_string(),
        }
    }
}

fn bad_request(message: impl Into<String>) -> ApiError {
    ApiError {
        status: StatusCode::BAD_REQUEST,
        code: "invalid_argument",
        message: message.into(),
    }
}

fn not_found(kind: &'static str, id: &str) -> ApiError {
    Error::NotFound {
        kind,
        id: id.to_string(),
    }
    .into()
}

/// Unknown mode names are reported as missing resources.
fn parse_mode(name: &str) -> Result<Mode, ApiError> {
    name.parse().map_err(|_| not_found("mode", name))
}

type ApiResult<T> = Result<Json<T>, ApiError>;

#[derive(Debug, Default, Deserialize)]
pub struct SearchParams {
    /// Presentation MathML text.
    pub q: Option<String>,
    pub query_id: Option<String>,
    pub mode: Option<String>,
    pub k: Option<usize>,
}

#[derive(Debug, Serialize)]
pub struct Hit {
    pub doc_id: String,
    pub rank: usize,
    pub score: f64,
    pub pmathml: Option<String>,
    pub cmathml: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SearchResponse {
    pub mode: Mode,
    pub query_id: Option<String>,
    pub results: Vec<Hit>,
}

fn run_search(state: &AppState, params: SearchParams) -> ApiResult<SearchResponse> {
    let mode = parse_mode(params.mode.as_deref().unwrap_or("se"))?;
    let k = params.k.unwrap_or(DEFAULT_K);
    let query = match (&params.q, &params.query_id) {
        (Some(q), _) if !q.trim().is_empty() => Query::new("adhoc", parse_mathml(q)?),
        (_, Some(id)) => state.query(id)?.clone(),
        _ => return Err(bad_request("either `q` or `query_id` is required")),
    };
    let snapshot = state.current();
    let results = snapshot
        .engine
        .search(mode, &query, k)?
        .into_iter()
        .map(|r| {
            let doc = snapshot.docs.get(&r.doc_id);
            Hit {
                pmathml: doc.map(|d| d.pmathml.clone()),
                cmathml: doc.and_then(|d| d.cmathml.clone()),
                doc_id: r.doc_id,
                rank: r.rank,
                score: r.score,
            }
        })
        .collect();
    Ok(Json(SearchResponse {
        mode,
        query_id: params.q.is_none().then_some(params.query_id).flatten(),
        results,
    }))
}

async fn search_get(
    State(state): State<Arc<AppState>>,
    UrlQuery(params): UrlQuery<SearchParams>,
) -> ApiResult<SearchResponse> {
    run_search(&state, params)
}

async fn search_post(
    State(state): State<Arc<AppState>>,
    Json(params): Json<SearchParams>,
) -> ApiResult<SearchResponse> {
    run_search(&state, params)
}

#[derive(Debug, Serialize)]
struct QueryView {
    id: String,
    pmathml: String,
    cmathml: Option<String>,
    note: Option<String>,
}

async fn list_queries(State(state): State<Arc<AppState>>) -> Json<Vec<QueryView>> {
    Json(
        state
            .queries
            .iter()
            .map(|q| QueryView {
                id: q.id.clone(),
                pmathml: q.pmathml.to_xml(),
                cmathml: q.cmathml.as_ref().map(|t| t.to_xml()),
                note: q.note.clone(),
            })
            .collect(),
    )
}

#[derive(Debug, Deserialize)]
pub struct JudgmentParams {
    pub query_id: Option<String>,
}

async fn list_judgments(
    State(state): State<Arc<AppState>>,
    UrlQuery(params): UrlQuery<JudgmentParams>,
) -> ApiResult<Vec<JudgmentRecord>> {
    let mut records = state.judgments.records()?;
    if let Some(id) = params.query_id {
        records.retain(|r| r.query_id == id);
    }
    Ok(Json(records))
}

/// Body of a judgment write. `expected` guards against lost updates: when
/// present, the write only happens if the stored grade still equals it
/// (`null` meaning not yet judged).
#[derive(Debug, Deserialize)]
pub struct JudgmentBody {
    pub query_id: String,
    pub doc_id: String,
    pub grade: Value,
    #[serde(default)]
    pub annotator: Option<String>,
    #[serde(default, deserialize_with = "present")]
    pub expected: Option<Value>,
}

/// Distinguishes an explicit `null` from a missing field.
fn present<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Option<Value>, D::Error> {
    Value::deserialize(d).map(Some)
}

fn grade(value: &Value) -> Result<Grade, ApiError> {
    let v = value
        .as_f64()
        .ok_or_else(|| bad_request(format!("grade must be 0, 0.5 or 1, got {value}")))?;
    Ok(Grade::try_from(v)?)
}

async fn post_judgment(
    State(state): State<Arc<AppState>>,
    Json(body): Json<JudgmentBody>,
) -> Result<(StatusCode, Json<JudgmentRecord>), ApiError> {
    state.query(&body.query_id)?;
    let snapshot = state.current();
    if !snapshot.docs.is_empty() && !snapshot.docs.contains_key(&body.doc_id) {
        return Err(not_found("document", &body.doc_id));
    }
    let expect = match &body.expected {
        None => Expect::Any,
        Some(Value::Null) => Expect::Unjudged,
        Some(v) => Expect::Grade(grade(v)?),
    };
    let record = JudgmentRecord::now(
        &body.query_id,
        &body.doc_id,
        grade(&body.grade)?,
        body.annotator,
    );
    let log = state.judgments.clone();
    let r = record.clone();
    tokio::task::spawn_blocking(move || log.append_checked(&r, expect))
        .await
        .map_err(|e| Error::InvalidArgument(e.to_string()))??;
    Ok((StatusCode::CREATED, Json(record)))
}

#[derive(Debug, Deserialize)]
pub struct EvalParams {
    pub mode: Option<String>,
    pub k: Option<usize>,
}

async fn eval(
    State(state): State<Arc<AppState>>,
    UrlQuery(params): UrlQuery<EvalParams>,
) -> Result<Json<mathseek_core::MetricsReport>, ApiError> {
    let snapshot = state.current();
    let modes: Vec<Mode> = match params.mode.as_deref() {
        Some(name) => {
            let mode = parse_mode(name)?;
            snapshot.engine.index(mode)?;
            vec![mode]
        }
        None => snapshot.engine.modes().collect(),
    };
    let qrels = state.qrels()?;
    let report = run_comparison(
        &snapshot.engine,
        &state.queries,
        &qrels,
        &modes,
        params.k.unwrap_or(DEFAULT_K),
    )?;
    Ok(Json(report))
}

async fn qrels(State(state): State<Arc<AppState>>) -> Result<String, ApiError> {
    Ok(state.qrels()?.to_tsv())
}

#[derive(Debug, Deserialize)]
pub struct RebuildParams {
    pub mode: Option<String>,
}

async fn rebuild(
    State(state): State<Arc<AppState>>,
    UrlQuery(params): UrlQuery<RebuildParams>,
) -> ApiResult<Vec<mathseek_core::app::BuildReport>> {
    let modes = match params.mode.as_deref() {
        Some(name) => vec![parse_mode(name)?],
        None => Mode::ALL.to_vec(),
    };
    let _exclusive = state.rebuild.lock().await;
    let st = state.clone();
    let reports = tokio::task::spawn_blocking(move || {
        let reports = modes
            .into_iter()
            .map(|m| st.data.build(m, None))
            .collect::<mathseek_core::Result<Vec<_>>>()?;
        let fresh = Arc::new(Snapshot::load(&st.data)?);
        *st.snapshot.write().unwrap_or_else(|p| p.into_inner()) = fresh;
        Ok::<_, Error>(reports)
    })
    .await
    .map_err(|e| Error::InvalidArgument(e.to_string()))??;
    Ok(Json(reports))
}

#[derive(Serialize)]
struct Health {
    modes: Vec<Mode>,
    documents: usize,
}

async fn health(State(state): State<Arc<AppState>>) -> Json<Health> {
    let snapshot = state.current();
    Json(Health {
        modes: snapshot.engine.modes().collect(),
        documents: snapshot.docs.len(),
    })
}

async fn unknown_api() -> ApiError {
    ApiError {
        status: StatusCode::NOT_FOUND,
        code: "not_found",
        message: "no such endpoint".into(),
    }
}

/// The API routes, plus static files from `assets` for everything else.
pub fn router(state: Arc<AppState>, assets: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/health", get(health))
        .route("/search", get(search_get).post(search_post))
        .route("/queries", get(list_queries))
        .route("/judgments", get(list_judgments).post(post_judgment))
        .route("/eval", get(eval))
        .route("/qrels", get(qrels))
        .route("/admin/rebuild", post(rebuild))
        .fallback(unknown_api);
    let app = Router::new().nest("/api", api).with_state(state);
    match assets {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}

pub async fn serve(state: Arc<AppState>, port: u16, assets: Option<PathBuf>) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(("0.0.0.0", port)).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state, assets))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
